use rand::Rng;

use super::{check_action, EnvSpec, EnvStep, Environment, TaskKind};
use crate::error::Result;
use crate::rng::Rng as StreamRng;

pub const MIN_POSITION: f64 = -1.2;
pub const MAX_POSITION: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const GOAL_POSITION: f64 = 0.5;
pub const GOAL_REWARD: f64 = 1000.0;

/// Under-powered car in a valley; only reaching the goal pays (1000).
/// Actions: 0 push left, 1 coast, 2 push right.
pub struct MountainCar {
    spec: EnvSpec,
    position: f64,
    velocity: f64,
    steps: u64,
    rng: StreamRng,
}

impl MountainCar {
    pub fn new(episode_limit: u64, rng: StreamRng) -> Self {
        Self {
            spec: EnvSpec {
                name: "mountaincar".into(),
                state_dim: 2,
                action_count: 3,
                episode_limit,
                reward_range: (0.0, GOAL_REWARD),
                kind: TaskKind::MultiStep,
            },
            position: -0.5,
            velocity: 0.0,
            steps: 0,
            rng,
        }
    }

    pub fn set_state(&mut self, position: f64, velocity: f64) {
        self.position = position;
        self.velocity = velocity;
    }

    pub fn raw_state(&self) -> (f64, f64) {
        (self.position, self.velocity)
    }

    fn observe(&self) -> Vec<f64> {
        vec![
            ((self.position - MIN_POSITION) / (MAX_POSITION - MIN_POSITION)).clamp(0.0, 1.0),
            ((self.velocity + MAX_SPEED) / (2.0 * MAX_SPEED)).clamp(0.0, 1.0),
        ]
    }
}

impl Environment for MountainCar {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self) -> Vec<f64> {
        self.position = self.rng.random_range(-0.6..-0.4);
        self.velocity = 0.0;
        self.steps = 0;
        self.observe()
    }

    fn reset_uniform(&mut self) -> Vec<f64> {
        self.position = self.rng.random_range(MIN_POSITION..=MAX_POSITION);
        self.velocity = self.rng.random_range(-MAX_SPEED..=MAX_SPEED);
        self.steps = 0;
        self.observe()
    }

    fn step(&mut self, action: usize) -> Result<EnvStep> {
        check_action(&self.spec, action)?;
        self.velocity += (action as f64 - 1.0) * 0.001 - 0.0025 * (3.0 * self.position).cos();
        self.velocity = self.velocity.clamp(-MAX_SPEED, MAX_SPEED);
        self.position = (self.position + self.velocity).clamp(MIN_POSITION, MAX_POSITION);
        if self.position == MIN_POSITION && self.velocity < 0.0 {
            self.velocity = 0.0;
        }
        self.steps += 1;
        let goal = self.position >= GOAL_POSITION;
        Ok(EnvStep {
            next_state: self.observe(),
            reward: if goal { GOAL_REWARD } else { 0.0 },
            terminal: goal || self.steps >= self.spec.episode_limit,
        })
    }
}

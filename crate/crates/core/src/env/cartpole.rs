use rand::Rng;

use super::{check_action, EnvSpec, EnvStep, Environment, TaskKind};
use crate::error::Result;
use crate::rng::Rng as StreamRng;

const GRAVITY: f64 = 9.8;
const CART_MASS: f64 = 1.0;
const POLE_MASS: f64 = 0.1;
const TOTAL_MASS: f64 = CART_MASS + POLE_MASS;
/// Half the pole length.
const LENGTH: f64 = 0.5;
const POLE_MASS_LENGTH: f64 = POLE_MASS * LENGTH;
const FORCE: f64 = 10.0;
const TAU: f64 = 0.02;
pub const X_LIMIT: f64 = 2.4;
pub const THETA_LIMIT: f64 = 12.0 * std::f64::consts::PI / 180.0;

/// Raw physical state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

impl CartPoleState {
    /// One explicit Euler step under `force`.
    pub fn advance(self, force: f64) -> Self {
        let (sin, cos) = self.theta.sin_cos();
        let temp = (force + POLE_MASS_LENGTH * self.theta_dot * self.theta_dot * sin) / TOTAL_MASS;
        let theta_acc = (GRAVITY * sin - cos * temp)
            / (LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / TOTAL_MASS));
        let x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos / TOTAL_MASS;
        Self {
            x: self.x + TAU * self.x_dot,
            x_dot: self.x_dot + TAU * x_acc,
            theta: self.theta + TAU * self.theta_dot,
            theta_dot: self.theta_dot + TAU * theta_acc,
        }
    }

    pub fn failed(&self) -> bool {
        self.x.abs() > X_LIMIT || self.theta.abs() > THETA_LIMIT
    }
}

/// Symmetric normalization ranges for the four state variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartPoleBounds {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

impl Default for CartPoleBounds {
    fn default() -> Self {
        Self {
            x: X_LIMIT,
            x_dot: 3.0,
            theta: THETA_LIMIT,
            theta_dot: 3.5,
        }
    }
}

impl CartPoleBounds {
    pub fn normalize(&self, s: &CartPoleState) -> Vec<f64> {
        let n = |v: f64, b: f64| ((v + b) / (2.0 * b)).clamp(0.0, 1.0);
        vec![
            n(s.x, self.x),
            n(s.x_dot, self.x_dot),
            n(s.theta, self.theta),
            n(s.theta_dot, self.theta_dot),
        ]
    }
}

/// Cart-pole balancing with +1 per balanced step and 0 on the failing
/// step. Action 0 pushes left, action 1 pushes right.
pub struct CartPole {
    spec: EnvSpec,
    bounds: CartPoleBounds,
    state: CartPoleState,
    steps: u64,
    rng: StreamRng,
}

impl CartPole {
    pub fn new(bounds: CartPoleBounds, episode_limit: u64, rng: StreamRng) -> Self {
        Self {
            spec: EnvSpec {
                name: "cartpole".into(),
                state_dim: 4,
                action_count: 2,
                episode_limit,
                reward_range: (0.0, 1.0),
                kind: TaskKind::MultiStep,
            },
            bounds,
            state: CartPoleState::default(),
            steps: 0,
            rng,
        }
    }

    pub fn state(&self) -> CartPoleState {
        self.state
    }

    pub fn set_state(&mut self, state: CartPoleState) {
        self.state = state;
    }
}

impl Environment for CartPole {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self) -> Vec<f64> {
        let mut u = || self.rng.random_range(-0.05..0.05);
        self.state = CartPoleState {
            x: u(),
            x_dot: u(),
            theta: u(),
            theta_dot: u(),
        };
        self.steps = 0;
        self.bounds.normalize(&self.state)
    }

    fn reset_uniform(&mut self) -> Vec<f64> {
        let b = self.bounds;
        let rng = &mut self.rng;
        self.state = CartPoleState {
            x: rng.random_range(-b.x..=b.x),
            x_dot: rng.random_range(-b.x_dot..=b.x_dot),
            theta: rng.random_range(-b.theta..=b.theta),
            theta_dot: rng.random_range(-b.theta_dot..=b.theta_dot),
        };
        self.steps = 0;
        self.bounds.normalize(&self.state)
    }

    fn step(&mut self, action: usize) -> Result<EnvStep> {
        check_action(&self.spec, action)?;
        let force = if action == 1 { FORCE } else { -FORCE };
        self.state = self.state.advance(force);
        self.steps += 1;
        let failed = self.state.failed();
        Ok(EnvStep {
            next_state: self.bounds.normalize(&self.state),
            reward: if failed { 0.0 } else { 1.0 },
            terminal: failed || self.steps >= self.spec.episode_limit,
        })
    }
}

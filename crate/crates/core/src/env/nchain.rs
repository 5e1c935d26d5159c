use rand::Rng;

use super::{check_action, EnvSpec, EnvStep, Environment, TaskKind};
use crate::error::Result;
use crate::rng::Rng as StreamRng;

pub const DEFAULT_SLIP: f64 = 0.2;
pub const SMALL_REWARD: f64 = 2.0;
pub const LARGE_REWARD: f64 = 10.0;

pub const FORWARD: usize = 0;
pub const BACK: usize = 1;

/// The slippery n-chain: moving forward pays nothing until the last
/// state, which pays the large reward for staying; going back pays the
/// small reward and returns to state 0. With probability `slip` the
/// executed action is the opposite of the chosen one. Episodes end only
/// at the step limit.
pub struct NChain {
    spec: EnvSpec,
    n: usize,
    slip: f64,
    state: usize,
    steps: u64,
    rng: StreamRng,
}

impl NChain {
    pub fn new(n: usize, slip: f64, episode_limit: u64, rng: StreamRng) -> Self {
        assert!(n >= 2);
        Self {
            spec: EnvSpec {
                name: format!("{n}chain"),
                state_dim: 1,
                action_count: 2,
                episode_limit,
                reward_range: (0.0, LARGE_REWARD),
                kind: TaskKind::MultiStep,
            },
            n,
            slip,
            state: 0,
            steps: 0,
            rng,
        }
    }

    pub fn position(&self) -> usize {
        self.state
    }

    pub fn set_position(&mut self, state: usize) {
        assert!(state < self.n);
        self.state = state;
    }

    fn observe(&self) -> Vec<f64> {
        vec![self.state as f64 / (self.n - 1) as f64]
    }
}

impl Environment for NChain {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self) -> Vec<f64> {
        self.state = 0;
        self.steps = 0;
        self.observe()
    }

    fn reset_uniform(&mut self) -> Vec<f64> {
        self.state = self.rng.random_range(0..self.n);
        self.steps = 0;
        self.observe()
    }

    fn step(&mut self, action: usize) -> Result<EnvStep> {
        check_action(&self.spec, action)?;
        let mut executed = action;
        if self.slip > 0.0 && self.rng.random::<f64>() < self.slip {
            executed = 1 - executed;
        }
        let reward = if executed == BACK {
            self.state = 0;
            SMALL_REWARD
        } else if self.state < self.n - 1 {
            self.state += 1;
            0.0
        } else {
            LARGE_REWARD
        };
        self.steps += 1;
        Ok(EnvStep {
            next_state: self.observe(),
            reward,
            terminal: self.steps >= self.spec.episode_limit,
        })
    }
}

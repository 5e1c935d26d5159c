use rand::Rng;

use super::{binary_reward, check_action, EnvSpec, EnvStep, Environment, TaskKind};
use crate::error::Result;
use crate::rng::Rng as StreamRng;

/// Correct answer of the real multiplexer with `address_bits` address
/// inputs. An input counts as bit 1 iff it is strictly above 0.5.
pub fn multiplexer_answer(state: &[f64], address_bits: usize) -> usize {
    let bit = |x: f64| usize::from(x > 0.5);
    let address = state[..address_bits]
        .iter()
        .fold(0, |acc, &x| (acc << 1) | bit(x));
    bit(state[address_bits + address])
}

/// Real-valued multiplexer classification task.
pub struct Multiplexer {
    spec: EnvSpec,
    address_bits: usize,
    state: Vec<f64>,
    rng: StreamRng,
}

impl Multiplexer {
    pub fn new(address_bits: usize, rng: StreamRng) -> Self {
        let dim = address_bits + (1 << address_bits);
        Self {
            spec: EnvSpec {
                name: format!("rmp{dim}"),
                state_dim: dim,
                action_count: 2,
                episode_limit: 1,
                reward_range: (0.0, 1000.0),
                kind: TaskKind::SingleStep,
            },
            address_bits,
            state: vec![0.0; dim],
            rng,
        }
    }

    pub fn correct_action(&self) -> usize {
        multiplexer_answer(&self.state, self.address_bits)
    }

    /// Places the environment in `state`; test hook.
    pub fn set_state(&mut self, state: Vec<f64>) {
        assert_eq!(state.len(), self.spec.state_dim);
        self.state = state;
    }
}

impl Environment for Multiplexer {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self) -> Vec<f64> {
        let rng = &mut self.rng;
        self.state.iter_mut().for_each(|x| *x = rng.random());
        self.state.clone()
    }

    fn reset_uniform(&mut self) -> Vec<f64> {
        self.reset()
    }

    fn step(&mut self, action: usize) -> Result<EnvStep> {
        check_action(&self.spec, action)?;
        Ok(EnvStep {
            next_state: self.state.clone(),
            reward: binary_reward(action == self.correct_action()),
            terminal: true,
        })
    }
}

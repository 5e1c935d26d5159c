use super::{EnvSpec, EnvStep, Environment};
use crate::error::Result;

/// Starts every episode from a uniformly random state over the wrapped
/// environment's full bounds. Steps are forwarded unchanged.
pub struct Teletransport<E> {
    inner: E,
}

impl<E: Environment> Teletransport<E> {
    pub fn new(inner: E) -> Self {
        Self { inner }
    }

    pub fn into_inner(self) -> E {
        self.inner
    }
}

impl<E: Environment> Environment for Teletransport<E> {
    fn spec(&self) -> &EnvSpec {
        self.inner.spec()
    }

    fn reset(&mut self) -> Vec<f64> {
        self.inner.reset_uniform()
    }

    fn reset_uniform(&mut self) -> Vec<f64> {
        self.inner.reset_uniform()
    }

    fn step(&mut self, action: usize) -> Result<EnvStep> {
        self.inner.step(action)
    }
}

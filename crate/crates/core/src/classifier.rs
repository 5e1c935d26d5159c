use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Hyperparameters, PredictionKind};

/// One interval of an unordered-bound condition. Either endpoint may be
/// the larger one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub p: f64,
    pub q: f64,
}

impl Interval {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    #[inline]
    pub fn lower(&self) -> f64 {
        self.p.min(self.q)
    }

    #[inline]
    pub fn upper(&self) -> f64 {
        self.p.max(self.q)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }

    pub fn width(&self) -> f64 {
        (self.q - self.p).abs()
    }

    pub fn covers(&self, other: &Interval) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }
}

/// Hyperrectangular condition over `[0, 1]^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub bounds: Vec<Interval>,
}

impl Condition {
    pub fn new(bounds: Vec<Interval>) -> Self {
        Self { bounds }
    }

    /// The whole input cube.
    pub fn full(dim: usize) -> Self {
        Self::new(vec![Interval::new(0.0, 1.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Match test; errors when `state` has the wrong dimensionality.
    pub fn matches(&self, state: &[f64]) -> Result<bool> {
        if state.len() != self.bounds.len() {
            return Err(Error::contract(format!(
                "state has {} dimensions, condition has {}",
                state.len(),
                self.bounds.len()
            )));
        }
        Ok(self.matches_unchecked(state))
    }

    #[inline]
    pub(crate) fn matches_unchecked(&self, state: &[f64]) -> bool {
        self.bounds.iter().zip(state).all(|(i, &x)| i.contains(x))
    }

    /// True when this hyperrectangle contains `other` in every dimension.
    pub fn covers(&self, other: &Condition) -> bool {
        self.bounds.len() == other.bounds.len()
            && self
                .bounds
                .iter()
                .zip(&other.bounds)
                .all(|(a, b)| a.covers(b))
    }

    /// Normalized hypervolume.
    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(Interval::width).product()
    }
}

/// Linear payoff model `w · (x0, s)` with its RLS gain matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    /// Row-major `(D+1) x (D+1)` matrix.
    pub gain: Vec<f64>,
}

impl LinearModel {
    pub fn new(dim: usize, p_ini: f64, delta_rls: f64) -> Self {
        let n = dim + 1;
        let mut weights = vec![0.0; n];
        weights[0] = p_ini;
        Self {
            weights,
            gain: scaled_identity(n, delta_rls),
        }
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn reset_gain(&mut self, delta_rls: f64) {
        self.gain = scaled_identity(self.order(), delta_rls);
    }

    pub fn predict(&self, x0: f64, state: &[f64]) -> f64 {
        self.weights[0] * x0
            + self.weights[1..]
                .iter()
                .zip(state)
                .map(|(w, s)| w * s)
                .sum::<f64>()
    }
}

pub(crate) fn scaled_identity(n: usize, scale: f64) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = scale;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Prediction {
    Scalar(f64),
    Linear(LinearModel),
}

impl Prediction {
    pub fn initial(kind: PredictionKind, dim: usize, hp: &Hyperparameters) -> Self {
        match kind {
            PredictionKind::Scalar => Prediction::Scalar(hp.p_ini),
            PredictionKind::Linear => {
                Prediction::Linear(LinearModel::new(dim, hp.p_ini, hp.delta_rls))
            }
        }
    }

    /// Payoff prediction at `state`.
    #[inline]
    pub fn value(&self, x0: f64, state: &[f64]) -> f64 {
        match self {
            Prediction::Scalar(p) => *p,
            Prediction::Linear(m) => m.predict(x0, state),
        }
    }
}

/// A condition-action rule with its learned statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub condition: Condition,
    pub action: usize,
    pub prediction: Prediction,
    /// Absolute prediction error estimate.
    pub epsilon: f64,
    /// Macro-classifier fitness.
    pub fitness: f64,
    pub experience: u64,
    /// Step at which the rule last took part in a GA.
    pub timestamp: u64,
    pub action_set_size: f64,
    pub numerosity: u32,
}

impl Classifier {
    /// A fresh rule with the initial statistics from `hp`.
    pub fn new(condition: Condition, action: usize, t: u64, hp: &Hyperparameters) -> Self {
        let prediction = Prediction::initial(hp.prediction, condition.dim(), hp);
        Self {
            condition,
            action,
            prediction,
            epsilon: hp.epsilon_ini,
            fitness: hp.f_ini,
            experience: 0,
            timestamp: t,
            action_set_size: 1.0,
            numerosity: 1,
        }
    }

    pub fn matches(&self, state: &[f64]) -> Result<bool> {
        self.condition.matches(state)
    }

    pub fn predict(&self, x0: f64, state: &[f64]) -> f64 {
        self.prediction.value(x0, state)
    }

    /// Fitness per micro-classifier.
    pub fn micro_fitness(&self) -> f64 {
        self.fitness / self.numerosity as f64
    }

    /// Same condition and action.
    pub fn same_rule(&self, other: &Classifier) -> bool {
        self.action == other.action && self.condition == other.condition
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cond(b: &[(f64, f64)]) -> Condition {
        Condition::new(b.iter().map(|&(p, q)| Interval::new(p, q)).collect())
    }

    #[test]
    fn match_interior_point() {
        assert!(cond(&[(0.2, 0.8)]).matches(&[0.5]).unwrap());
    }

    #[test]
    fn match_unordered_endpoints() {
        assert!(cond(&[(0.8, 0.2)]).matches(&[0.5]).unwrap());
    }

    #[test]
    fn match_fails_in_second_dimension() {
        assert!(!cond(&[(0.2, 0.8), (0.0, 0.1)]).matches(&[0.5, 0.5]).unwrap());
    }

    #[test]
    fn match_includes_endpoints() {
        let c = cond(&[(0.3, 0.6)]);
        assert!(c.matches(&[0.3]).unwrap());
        assert!(c.matches(&[0.6]).unwrap());
        assert!(!c.matches(&[0.6000001]).unwrap());
    }

    #[test]
    fn match_dimension_mismatch_is_an_error() {
        assert!(matches!(
            cond(&[(0.2, 0.8)]).matches(&[0.5, 0.5]),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn containment_and_volume() {
        let general = cond(&[(0.9, 0.1)]);
        let specific = cond(&[(0.2, 0.8)]);
        assert!(general.covers(&specific));
        assert!(!specific.covers(&general));
        assert!((cond(&[(0.5, 0.1), (0.0, 0.5)]).volume() - 0.2).abs() < 1e-12);
        assert_eq!(Condition::full(3).volume(), 1.0);
    }

    #[test]
    fn linear_model_starts_at_p_ini() {
        let m = LinearModel::new(2, 7.0, 1.0);
        assert_eq!(m.weights, vec![7.0, 0.0, 0.0]);
        assert_eq!(m.gain, scaled_identity(3, 1.0));
        assert_eq!(m.predict(1.0, &[0.3, 0.9]), 7.0);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a classifier computes its payoff prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionKind {
    /// Constant prediction trained with the Widrow-Hoff rule.
    Scalar,
    /// Linear prediction over `(x0, s)` trained with recursive least squares.
    Linear,
}

/// How mutation treats the state that triggered the GA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationMode {
    /// Endpoints move freely; offspring may stop matching the GA state.
    Unrestricted,
    /// Endpoint moves that would exclude the GA state are rejected.
    Restricted,
}

/// Every tunable of XCS and its replay extension.
///
/// Field names follow the usual XCS symbols. Values are checked by
/// [`Hyperparameters::validate`] before an agent is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Population capacity in micro-classifiers.
    pub n_max: usize,
    pub beta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub epsilon0: f64,
    pub nu: f64,
    pub theta_del: u64,
    pub delta: f64,
    pub theta_mna: usize,
    pub p_ini: f64,
    pub epsilon_ini: f64,
    pub f_ini: f64,
    pub mu: f64,
    pub chi: f64,
    pub theta_ga: f64,
    pub theta_sub: u64,
    /// Tournament size relative to the action set's numerosity.
    pub tournament_size: f64,
    pub tournament_replacement: bool,
    pub f_reduce: f64,
    pub epsilon_reduce: f64,
    pub m0: f64,
    pub r0: f64,
    pub mutation: MutationMode,
    pub prediction: PredictionKind,
    pub delta_rls: f64,
    pub lambda_rls: f64,
    /// Constant input prepended to the state for linear predictions.
    pub x0: f64,
    pub exploration_prob: f64,
    pub rm_capacity: usize,
    pub minibatch: usize,
    pub sample_with_replacement: bool,
    pub warmup_steps: u64,
    pub max_learning_steps: u64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            n_max: 800,
            beta: 0.2,
            gamma: 0.0,
            alpha: 0.1,
            epsilon0: 10.0,
            nu: 5.0,
            theta_del: 20,
            delta: 0.1,
            theta_mna: 2,
            p_ini: 10.0,
            epsilon_ini: 0.0,
            f_ini: 0.01,
            mu: 0.04,
            chi: 0.8,
            theta_ga: 12.0,
            theta_sub: 20,
            tournament_size: 0.4,
            tournament_replacement: false,
            f_reduce: 0.1,
            epsilon_reduce: 1.0,
            m0: 0.1,
            r0: 1.0,
            mutation: MutationMode::Unrestricted,
            prediction: PredictionKind::Scalar,
            delta_rls: 1.0,
            lambda_rls: 1.0,
            x0: 1.0,
            exploration_prob: 0.5,
            rm_capacity: 50_000,
            minibatch: 4,
            sample_with_replacement: true,
            warmup_steps: 1000,
            max_learning_steps: 40_000,
        }
    }
}

fn bad(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

fn check(ok: bool, name: &'static str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(bad(name, reason))
    }
}

fn unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        check(self.n_max >= 1, "N_max", "must be positive")?;
        check(self.beta > 0.0 && self.beta <= 1.0, "beta", "must lie in (0, 1]")?;
        check(unit(self.gamma), "gamma", "must lie in [0, 1]")?;
        check(self.alpha > 0.0 && self.alpha <= 1.0, "alpha", "must lie in (0, 1]")?;
        check(self.epsilon0 > 0.0, "epsilon0", "must be positive")?;
        check(self.nu > 0.0, "nu", "must be positive")?;
        check(unit(self.delta), "delta", "must lie in [0, 1]")?;
        check(self.theta_mna >= 1, "theta_mna", "must be at least 1")?;
        check(self.p_ini.is_finite(), "p_ini", "must be finite")?;
        check(self.epsilon_ini >= 0.0, "epsilon_ini", "must be non-negative")?;
        check(self.f_ini > 0.0 && self.f_ini <= 1.0, "F_ini", "must lie in (0, 1]")?;
        check(unit(self.mu), "mu", "must lie in [0, 1]")?;
        check(unit(self.chi), "chi", "must lie in [0, 1]")?;
        check(self.theta_ga >= 0.0, "theta_GA", "must be non-negative")?;
        check(
            self.tournament_size > 0.0 && self.tournament_size <= 1.0,
            "tournament_size",
            "must lie in (0, 1]",
        )?;
        check(
            self.f_reduce > 0.0 && self.f_reduce <= 1.0,
            "F_reduce",
            "must lie in (0, 1]",
        )?;
        check(self.epsilon_reduce >= 0.0, "epsilon_reduce", "must be non-negative")?;
        check(self.m0 >= 0.0, "m0", "must be non-negative")?;
        check(self.r0 >= 0.0, "r0", "must be non-negative")?;
        check(self.delta_rls > 0.0, "delta_RLS", "must be positive")?;
        check(
            self.lambda_rls > 0.0 && self.lambda_rls <= 1.0,
            "lambda_RLS",
            "must lie in (0, 1]",
        )?;
        check(unit(self.exploration_prob), "exploration_prob", "must lie in [0, 1]")?;
        check(self.minibatch >= 1, "minibatch", "must be at least 1")?;
        check(
            self.rm_capacity >= self.minibatch,
            "rm_capacity",
            "must be at least the minibatch size",
        )?;
        Ok(())
    }

    /// Validation that also depends on the environment's action count.
    pub fn validate_for(&self, action_count: usize) -> Result<()> {
        self.validate()?;
        if self.theta_mna > action_count {
            return Err(bad(
                "theta_mna",
                format!("exceeds the environment's {action_count} actions"),
            ));
        }
        Ok(())
    }

    /// Accuracy threshold above which a rule counts as accurate.
    pub fn accurate(&self, epsilon: f64) -> bool {
        epsilon < self.epsilon0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        Hyperparameters::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let hp = Hyperparameters {
            beta: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            hp.validate(),
            Err(Error::InvalidParameter { name: "beta", .. })
        ));
        let hp = Hyperparameters {
            rm_capacity: 2,
            minibatch: 4,
            ..Default::default()
        };
        assert!(hp.validate().is_err());
        let hp = Hyperparameters {
            theta_mna: 3,
            ..Default::default()
        };
        assert!(hp.validate_for(2).is_err());
    }
}

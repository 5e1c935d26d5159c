//! Credit assignment: payoff targets, prediction/error updates and the
//! accuracy-based fitness update.

use crate::classifier::{scaled_identity, LinearModel, Prediction};
use crate::error::{Error, Result};
use crate::matching::PredictionArray;
use crate::params::Hyperparameters;
use crate::population::{ClassifierId, Population};

/// Accuracy of a rule with error `epsilon`: 1 below `epsilon0`, otherwise
/// `alpha * (epsilon / epsilon0)^-nu`.
pub fn accuracy(epsilon: f64, hp: &Hyperparameters) -> f64 {
    if epsilon < hp.epsilon0 {
        1.0
    } else {
        hp.alpha * (epsilon / hp.epsilon0).powf(-hp.nu)
    }
}

/// Update target `r + gamma * max_a PA(a)`, or `r` when there is no
/// successor state to bootstrap from.
pub fn compute_payoff(reward: f64, next: Option<&PredictionArray>, gamma: f64) -> f64 {
    match next.and_then(PredictionArray::max_value) {
        Some(best) => reward + gamma * best,
        None => reward,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlsOutcome {
    Updated,
    /// A non-finite value appeared; the gain matrix was reinitialized.
    Reset,
}

/// One recursive least squares step on `x = (x0, state)` towards `target`.
pub fn rls_update(
    model: &mut LinearModel,
    state: &[f64],
    target: f64,
    hp: &Hyperparameters,
) -> RlsOutcome {
    let n = model.order();
    let mut x = Vec::with_capacity(n);
    x.push(hp.x0);
    x.extend_from_slice(state);
    debug_assert_eq!(x.len(), n);

    let v = &model.gain;
    // vx = V x
    let vx: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| v[i * n + j] * x[j]).sum())
        .collect();
    let denom = hp.lambda_rls + x.iter().zip(&vx).map(|(a, b)| a * b).sum::<f64>();
    let gain: Vec<f64> = vx.iter().map(|g| g / denom).collect();
    let residual = target - model.weights.iter().zip(&x).map(|(w, xi)| w * xi).sum::<f64>();
    let new_weights: Vec<f64> = model
        .weights
        .iter()
        .zip(&gain)
        .map(|(w, g)| w + g * residual)
        .collect();

    // xtv = x^T V
    let xtv: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| x[i] * v[i * n + j]).sum())
        .collect();
    let mut next = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            next[i * n + j] = (v[i * n + j] - gain[i] * xtv[j]) / hp.lambda_rls;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (next[i * n + j] + next[j * n + i]);
            next[i * n + j] = m;
            next[j * n + i] = m;
        }
    }

    let finite = denom.is_finite()
        && new_weights.iter().all(|w| w.is_finite())
        && next.iter().all(|v| v.is_finite());
    if !finite {
        model.gain = scaled_identity(n, hp.delta_rls);
        return RlsOutcome::Reset;
    }
    model.weights = new_weights;
    model.gain = next;
    RlsOutcome::Updated
}

/// Summary of one action-set update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateReport {
    pub updated: usize,
    pub rls_resets: usize,
}

/// Applies the experience, error, prediction, action-set-size and fitness
/// updates to every live rule of `action_set` for payoff `target` observed
/// at `state`.
///
/// Errors are updated against the prediction before this step. Fitness
/// moves toward the numerosity-weighted relative accuracy
/// `kappa * num / sum(kappa * num)` over the set.
pub fn update_action_set(
    pop: &mut Population,
    action_set: &[ClassifierId],
    target: f64,
    state: &[f64],
    hp: &Hyperparameters,
) -> Result<UpdateReport> {
    let live: Vec<ClassifierId> = action_set
        .iter()
        .copied()
        .filter(|id| pop.contains(*id))
        .collect();
    if live.is_empty() {
        return Err(Error::contract("update of an empty action set"));
    }
    let set_size: f64 = live
        .iter()
        .map(|id| pop.get(*id).map_or(0, |c| c.numerosity) as f64)
        .sum();

    let mut report = UpdateReport::default();
    for id in &live {
        let cl = pop.get_mut(*id).expect("live id");
        cl.experience += 1;
        let before = cl.prediction.value(hp.x0, state);
        cl.epsilon += hp.beta * ((target - before).abs() - cl.epsilon);
        match &mut cl.prediction {
            Prediction::Scalar(p) => *p += hp.beta * (target - *p),
            Prediction::Linear(m) => {
                if rls_update(m, state, target, hp) == RlsOutcome::Reset {
                    report.rls_resets += 1;
                    // low fitness puts the rule first in line for deletion
                    cl.fitness = cl.fitness.min(hp.f_ini);
                }
            }
        }
        cl.action_set_size += hp.beta * (set_size - cl.action_set_size);
        report.updated += 1;
    }

    let weighted: Vec<f64> = live
        .iter()
        .map(|id| {
            let cl = pop.get(*id).expect("live id");
            accuracy(cl.epsilon, hp) * cl.numerosity as f64
        })
        .collect();
    let total: f64 = weighted.iter().sum();
    for (id, w) in live.iter().zip(&weighted) {
        let cl = pop.get_mut(*id).expect("live id");
        cl.fitness += hp.beta * (w / total - cl.fitness);
    }
    Ok(report)
}

/// Relative accuracies of the rules in `action_set`, in set order.
pub fn relative_accuracies(
    pop: &Population,
    action_set: &[ClassifierId],
    hp: &Hyperparameters,
) -> Vec<f64> {
    let w: Vec<f64> = action_set
        .iter()
        .filter_map(|id| pop.get(*id))
        .map(|cl| accuracy(cl.epsilon, hp) * cl.numerosity as f64)
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

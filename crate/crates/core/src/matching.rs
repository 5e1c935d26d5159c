//! Matching, covering, the prediction array and action selection.

use rand::Rng;

use crate::classifier::{Classifier, Condition, Interval};
use crate::error::{Error, Result};
use crate::evolution;
use crate::params::Hyperparameters;
use crate::population::{ClassifierId, Population};

/// Creates a rule matching `state` that advocates `action`.
///
/// Interval `i` spans `[s_i - U(0, r0), s_i + U(0, r0)]` clipped to `[0, 1]`.
pub fn cover<R: Rng + ?Sized>(
    state: &[f64],
    action: usize,
    t: u64,
    hp: &Hyperparameters,
    rng: &mut R,
) -> Classifier {
    let bounds = state
        .iter()
        .map(|&s| {
            let lo = s - rng.random::<f64>() * hp.r0;
            let hi = s + rng.random::<f64>() * hp.r0;
            Interval::new(lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0))
        })
        .collect();
    Classifier::new(Condition::new(bounds), action, t, hp)
}

fn distinct_actions(pop: &Population, set: &[ClassifierId], action_count: usize) -> Vec<bool> {
    let mut seen = vec![false; action_count];
    for id in set {
        if let Some(cl) = pop.get(*id) {
            seen[cl.action] = true;
        }
    }
    seen
}

/// Builds the match set for `state`, covering until at least `theta_mna`
/// distinct actions are advocated. Returns the ids of matching rules and
/// the number of covering rules created.
pub fn build_match_set<R: Rng + ?Sized>(
    pop: &mut Population,
    state: &[f64],
    t: u64,
    hp: &Hyperparameters,
    action_count: usize,
    rng: &mut R,
) -> Result<(Vec<ClassifierId>, usize)> {
    let required = hp.theta_mna.min(action_count);
    if pop.max_size() < required {
        return Err(Error::contract(
            "population capacity below the number of actions covering must provide",
        ));
    }
    let mut covered = 0;
    loop {
        let set = pop.matching(state)?;
        let seen = distinct_actions(pop, &set, action_count);
        let present = seen.iter().filter(|&&b| b).count();
        if present >= required {
            return Ok((set, covered));
        }
        let missing: Vec<usize> = (0..action_count).filter(|&a| !seen[a]).collect();
        let action = missing[rng.random_range(0..missing.len())];
        pop.insert(cover(state, action, t, hp, rng))?;
        covered += 1;
        while pop.over_capacity() {
            evolution::delete_one(pop, hp, rng)?;
        }
    }
}

/// Fitness-weighted system prediction per action.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionArray {
    /// `(weighted prediction sum, fitness sum)` per action.
    sums: Vec<(f64, f64)>,
    present: Vec<bool>,
}

impl PredictionArray {
    pub fn new(
        pop: &Population,
        match_set: &[ClassifierId],
        state: &[f64],
        x0: f64,
        action_count: usize,
    ) -> Self {
        let mut sums = vec![(0.0, 0.0); action_count];
        let mut present = vec![false; action_count];
        for cl in match_set.iter().filter_map(|id| pop.get(*id)) {
            let p = cl.predict(x0, state);
            let entry = &mut sums[cl.action];
            entry.0 += p * cl.fitness;
            entry.1 += cl.fitness;
            present[cl.action] = true;
        }
        Self { sums, present }
    }

    /// Builds an array directly from `(action, prediction, fitness)` triples.
    pub fn from_votes(action_count: usize, votes: &[(usize, f64, f64)]) -> Self {
        let mut sums = vec![(0.0, 0.0); action_count];
        let mut present = vec![false; action_count];
        for &(a, p, f) in votes {
            sums[a].0 += p * f;
            sums[a].1 += f;
            present[a] = true;
        }
        Self { sums, present }
    }

    pub fn get(&self, action: usize) -> Option<f64> {
        if *self.present.get(action)? {
            let (num, den) = self.sums[action];
            Some(num / den)
        } else {
            None
        }
    }

    pub fn fitness_sum(&self, action: usize) -> Option<f64> {
        self.present
            .get(action)
            .copied()
            .filter(|&p| p)
            .map(|_| self.sums[action].1)
    }

    pub fn actions(&self) -> impl Iterator<Item = usize> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(a, &p)| p.then_some(a))
    }

    pub fn is_empty(&self) -> bool {
        !self.present.iter().any(|&p| p)
    }

    /// Largest system prediction, `None` for an empty array.
    pub fn max_value(&self) -> Option<f64> {
        self.actions()
            .filter_map(|a| self.get(a))
            .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
    }

    /// All actions attaining the maximum.
    pub fn best_actions(&self) -> Vec<usize> {
        match self.max_value() {
            Some(best) => self.actions().filter(|&a| self.get(a) == Some(best)).collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub action: usize,
    pub explore: bool,
}

/// Epsilon-greedy choice over the actions present in `pa`; greedy ties are
/// broken uniformly at random.
pub fn select_action<R: Rng + ?Sized>(
    pa: &PredictionArray,
    exploration_prob: f64,
    rng: &mut R,
) -> Result<Selection> {
    if pa.is_empty() {
        return Err(Error::contract("action selection on an empty prediction array"));
    }
    if exploration_prob > 0.0 && rng.random::<f64>() < exploration_prob {
        let actions: Vec<usize> = pa.actions().collect();
        let action = actions[rng.random_range(0..actions.len())];
        return Ok(Selection {
            action,
            explore: true,
        });
    }
    let best = pa.best_actions();
    let action = if best.len() == 1 {
        best[0]
    } else {
        best[rng.random_range(0..best.len())]
    };
    Ok(Selection {
        action,
        explore: false,
    })
}

/// Members of `match_set` advocating `action`. An empty result is a
/// contract violation since the action was chosen from the match set.
pub fn build_action_set(
    pop: &Population,
    match_set: &[ClassifierId],
    action: usize,
) -> Result<Vec<ClassifierId>> {
    let set = action_subset(pop, match_set, action);
    if set.is_empty() {
        Err(Error::contract(format!("no rule in the match set advocates action {action}")))
    } else {
        Ok(set)
    }
}

pub(crate) fn action_subset(
    pop: &Population,
    match_set: &[ClassifierId],
    action: usize,
) -> Vec<ClassifierId> {
    match_set
        .iter()
        .copied()
        .filter(|id| pop.get(*id).is_some_and(|cl| cl.action == action))
        .collect()
}

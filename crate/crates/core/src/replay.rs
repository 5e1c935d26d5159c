//! Replay memory and the replayed reinforcement step.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::evolution::{ga_should_run, run_ga};
use crate::learning::{compute_payoff, update_action_set, UpdateReport};
use crate::matching::{action_subset, PredictionArray};
use crate::params::Hyperparameters;
use crate::population::Population;

/// A stored transition. Single-step tasks store `(s, a, r)` with no
/// successor; multi-step tasks store the successor state and whether it
/// ended the episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Option<Vec<f64>>,
    pub terminal: bool,
}

impl Experience {
    pub fn single_step(state: Vec<f64>, action: usize, reward: f64) -> Self {
        Self {
            state,
            action,
            reward,
            next_state: None,
            terminal: true,
        }
    }

    pub fn transition(
        state: Vec<f64>,
        action: usize,
        reward: f64,
        next_state: Vec<f64>,
        terminal: bool,
    ) -> Self {
        Self {
            state,
            action,
            reward,
            next_state: Some(next_state),
            terminal,
        }
    }

    /// Whether the payoff bootstraps from the successor state.
    pub fn bootstraps(&self) -> bool {
        !self.terminal && self.next_state.is_some()
    }
}

/// Bounded FIFO of experiences; pushing onto a full memory evicts the
/// oldest entry.
#[derive(Debug, Clone)]
pub struct ReplayMemory {
    buffer: VecDeque<Experience>,
    capacity: usize,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay memory capacity must be positive");
        Self {
            buffer: VecDeque::with_capacity(capacity.min(1 << 16)),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Appends `e`, returning the evicted experience if the memory was full.
    pub fn push(&mut self, e: Experience) -> Option<Experience> {
        let evicted = if self.buffer.len() == self.capacity {
            self.buffer.pop_front()
        } else {
            None
        };
        self.buffer.push_back(e);
        evicted
    }

    pub fn get(&self, i: usize) -> Option<&Experience> {
        self.buffer.get(i)
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Experience> {
        self.buffer.iter()
    }
}

/// Indices of `m` uniform draws from `rm`, with or without replacement.
pub fn sample_indices<R: Rng + ?Sized>(
    rm: &ReplayMemory,
    m: usize,
    with_replacement: bool,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    if rm.is_empty() {
        return Err(Error::contract("sampling from an empty replay memory"));
    }
    if with_replacement {
        Ok((0..m).map(|_| rng.random_range(0..rm.len())).collect())
    } else {
        let m = m.min(rm.len());
        Ok(rand::seq::index::sample(rng, rm.len(), m).into_vec())
    }
}

/// A minibatch of `m` experiences drawn uniformly with replacement.
pub fn sample_minibatch<'a, R: Rng + ?Sized>(
    rm: &'a ReplayMemory,
    m: usize,
    rng: &mut R,
) -> Result<Vec<&'a Experience>> {
    Ok(sample_indices(rm, m, true, rng)?
        .into_iter()
        .map(|i| &rm.buffer[i])
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplayOutcome {
    /// No current rule matches the experience's state and action.
    Skipped,
    Replayed { update: UpdateReport, ga: bool },
}

/// Replays one experience against the current population: rebuilds the
/// action set without covering, updates it towards the payoff target and
/// gives the GA a chance to run on it.
pub fn experience_replay<R: Rng + ?Sized>(
    e: &Experience,
    pop: &mut Population,
    t: u64,
    hp: &Hyperparameters,
    action_count: usize,
    rng: &mut R,
) -> Result<ReplayOutcome> {
    let match_set = pop.matching(&e.state)?;
    let action_set = action_subset(pop, &match_set, e.action);
    if action_set.is_empty() {
        return Ok(ReplayOutcome::Skipped);
    }
    let target = match (&e.next_state, e.bootstraps()) {
        (Some(next), true) => {
            let next_match = pop.matching(next)?;
            let pa = PredictionArray::new(pop, &next_match, next, hp.x0, action_count);
            compute_payoff(e.reward, Some(&pa), hp.gamma)
        }
        _ => e.reward,
    };
    let update = update_action_set(pop, &action_set, target, &e.state, hp)?;
    let ga = ga_should_run(pop, &action_set, t, hp.theta_ga)?;
    if ga {
        run_ga(pop, &action_set, &e.state, t, hp, action_count, rng)?;
    }
    Ok(ReplayOutcome::Replayed { update, ga })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{Classifier, Condition, Interval, Prediction};
    use crate::rng::{stream, Stream};

    fn exp(i: usize) -> Experience {
        Experience::single_step(vec![i as f64], 0, i as f64)
    }

    #[test]
    fn fifo_eviction() {
        let mut rm = ReplayMemory::new(5);
        for i in 1..=7 {
            rm.push(exp(i));
        }
        let kept: Vec<f64> = rm.iter().map(|e| e.reward).collect();
        assert_eq!(kept, vec![3.0, 4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    fn singleton_minibatch_repeats() {
        let mut rng = stream(1, Stream::Replay);
        let mut rm = ReplayMemory::new(10);
        rm.push(exp(42));
        let b = sample_minibatch(&rm, 4, &mut rng).unwrap();
        assert_eq!(b.len(), 4);
        assert!(b.iter().all(|e| e.reward == 42.0));
    }

    #[test]
    fn degenerate_minibatches() {
        let mut rng = stream(1, Stream::Replay);
        let rm = ReplayMemory::new(10);
        assert!(sample_minibatch(&rm, 0, &mut rng).unwrap().is_empty());
        assert!(matches!(
            sample_minibatch(&rm, 1, &mut rng),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn sampling_without_replacement_is_distinct() {
        let mut rng = stream(1, Stream::Replay);
        let mut rm = ReplayMemory::new(10);
        for i in 0..10 {
            rm.push(exp(i));
        }
        let mut idx = sample_indices(&rm, 10, false, &mut rng).unwrap();
        idx.sort();
        assert_eq!(idx, (0..10).collect::<Vec<_>>());
    }

    fn scalar_rule(lo: f64, hi: f64, action: usize, p: f64) -> Classifier {
        let hp = Hyperparameters::default();
        let mut cl = Classifier::new(Condition::new(vec![Interval::new(lo, hi)]), action, 0, &hp);
        cl.prediction = Prediction::Scalar(p);
        cl
    }

    #[test]
    fn terminal_replay_moves_advocates_towards_reward() {
        let hp = Hyperparameters {
            theta_ga: 1e9,
            ..Default::default()
        };
        let mut rng = stream(1, Stream::Ga);
        let mut pop = Population::new(1, 10);
        let a = pop.insert(scalar_rule(0.0, 1.0, 1, 0.0)).unwrap();
        let b = pop.insert(scalar_rule(0.3, 0.6, 1, 500.0)).unwrap();
        let other = pop.insert(scalar_rule(0.0, 1.0, 0, 0.0)).unwrap();
        let e = Experience::single_step(vec![0.5], 1, 1000.0);
        let out = experience_replay(&e, &mut pop, 5, &hp, 2, &mut rng).unwrap();
        assert!(matches!(out, ReplayOutcome::Replayed { ga: false, .. }));
        assert_eq!(pop.get(a).unwrap().prediction, Prediction::Scalar(200.0));
        assert_eq!(pop.get(b).unwrap().prediction, Prediction::Scalar(600.0));
        assert_eq!(pop.get(other).unwrap().prediction, Prediction::Scalar(0.0));
        assert_eq!(pop.get(other).unwrap().experience, 0);
    }

    #[test]
    fn unmatched_replay_is_skipped() {
        let hp = Hyperparameters::default();
        let mut rng = stream(1, Stream::Ga);
        let mut pop = Population::new(1, 10);
        pop.insert(scalar_rule(0.0, 0.2, 0, 0.0)).unwrap();
        let before = pop.clone();
        let e = Experience::single_step(vec![0.5], 0, 1000.0);
        let out = experience_replay(&e, &mut pop, 5, &hp, 2, &mut rng).unwrap();
        assert_eq!(out, ReplayOutcome::Skipped);
        assert_eq!(
            pop.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>(),
            before.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn bootstrapped_target() {
        // gamma 0.99, max PA(s') = 500, r = 0 -> target 495
        let hp = Hyperparameters {
            gamma: 0.99,
            beta: 1.0,
            theta_ga: 1e9,
            ..Default::default()
        };
        let mut rng = stream(1, Stream::Ga);
        let mut pop = Population::new(1, 10);
        let a = pop.insert(scalar_rule(0.0, 0.3, 0, 0.0)).unwrap();
        pop.insert(scalar_rule(0.7, 1.0, 0, 500.0)).unwrap();
        pop.insert(scalar_rule(0.7, 1.0, 1, 100.0)).unwrap();
        let e = Experience::transition(vec![0.1], 0, 0.0, vec![0.9], false);
        experience_replay(&e, &mut pop, 1, &hp, 2, &mut rng).unwrap();
        assert_eq!(pop.get(a).unwrap().prediction, Prediction::Scalar(495.0));
    }
}

//! Steady-state niche GA: tournament selection, uniform crossover over
//! whole intervals, endpoint mutation, GA subsumption and roulette-wheel
//! deletion.

use rand::seq::index;
use rand::Rng;

use crate::classifier::{Classifier, Condition, Interval, Prediction};
use crate::error::{Error, Result};
use crate::params::{Hyperparameters, MutationMode};
use crate::population::{ClassifierId, Population};

/// True when the numerosity-weighted mean timestamp of `action_set` lies
/// more than `theta_ga` steps in the past.
pub fn ga_should_run(
    pop: &Population,
    action_set: &[ClassifierId],
    t: u64,
    theta_ga: f64,
) -> Result<bool> {
    let (mut weighted, mut num) = (0.0, 0.0);
    for cl in action_set.iter().filter_map(|id| pop.get(*id)) {
        weighted += cl.timestamp as f64 * cl.numerosity as f64;
        num += cl.numerosity as f64;
    }
    if num == 0.0 {
        return Err(Error::contract("GA check on an empty action set"));
    }
    Ok(t as f64 - weighted / num > theta_ga)
}

/// Tournament selection over the micro-classifiers of `set`. The winner is
/// the participant with the highest fitness per micro-classifier.
pub fn tournament<R: Rng + ?Sized>(
    pop: &Population,
    set: &[ClassifierId],
    hp: &Hyperparameters,
    rng: &mut R,
) -> Result<ClassifierId> {
    let members: Vec<(ClassifierId, &Classifier)> = set
        .iter()
        .filter_map(|id| pop.get(*id).map(|c| (*id, c)))
        .collect();
    if members.is_empty() {
        return Err(Error::contract("selection from an empty action set"));
    }
    let total: usize = members.iter().map(|(_, c)| c.numerosity as usize).sum();
    let size = ((hp.tournament_size * total as f64).ceil() as usize).clamp(1, total);
    let mut picks: Vec<usize> = if hp.tournament_replacement {
        (0..size).map(|_| rng.random_range(0..total)).collect()
    } else {
        index::sample(rng, total, size).into_vec()
    };
    picks.sort_unstable();

    let mut best: Option<(ClassifierId, f64)> = None;
    let mut picks = picks.into_iter().peekable();
    let mut offset = 0;
    for (id, cl) in members {
        let end = offset + cl.numerosity as usize;
        let mut hit = false;
        while picks.peek().is_some_and(|&p| p < end) {
            picks.next();
            hit = true;
        }
        offset = end;
        if hit {
            let f = cl.micro_fitness();
            if best.is_none_or(|(_, bf)| f > bf) {
                best = Some((id, f));
            }
        }
    }
    Ok(best.expect("at least one participant").0)
}

/// Endpoint mutation plus action mutation, each event with probability
/// `mu`. Endpoints move by `±U(0, m0)` and are clipped to `[0, 1]`.
pub fn mutate<R: Rng + ?Sized>(
    condition: &Condition,
    action: usize,
    state: &[f64],
    hp: &Hyperparameters,
    action_count: usize,
    rng: &mut R,
) -> (Condition, usize) {
    let mut bounds = condition.bounds.clone();
    for (iv, &s) in bounds.iter_mut().zip(state) {
        for endpoint in 0..2 {
            if rng.random::<f64>() >= hp.mu {
                continue;
            }
            let step = rng.random::<f64>() * hp.m0;
            let step = if rng.random_bool(0.5) { step } else { -step };
            let mut moved = *iv;
            if endpoint == 0 {
                moved.p = (moved.p + step).clamp(0.0, 1.0);
            } else {
                moved.q = (moved.q + step).clamp(0.0, 1.0);
            }
            if hp.mutation == MutationMode::Unrestricted || moved.contains(s) {
                *iv = moved;
            }
        }
    }
    let mut action = action;
    if action_count > 1 && rng.random::<f64>() < hp.mu {
        let other = rng.random_range(0..action_count - 1);
        action = if other >= action { other + 1 } else { other };
    }
    (Condition::new(bounds), action)
}

/// Uniform crossover swapping whole intervals. Returns whether anything
/// was exchanged.
pub fn crossover<R: Rng + ?Sized>(a: &mut Condition, b: &mut Condition, rng: &mut R) -> bool {
    let mut swapped = false;
    for (x, y) in a.bounds.iter_mut().zip(b.bounds.iter_mut()) {
        if rng.random_bool(0.5) {
            std::mem::swap::<Interval>(x, y);
            swapped = true;
        }
    }
    swapped
}

/// `general` is experienced, accurate, advocates the same action and its
/// hyperrectangle contains `specific`'s.
pub fn does_subsume(general: &Classifier, specific: &Classifier, hp: &Hyperparameters) -> bool {
    general.action == specific.action
        && general.experience > hp.theta_sub
        && general.epsilon < hp.epsilon0
        && general.condition.covers(&specific.condition)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    /// A parent or action-set member absorbed the offspring.
    Subsumed(ClassifierId),
    /// An identical rule absorbed the offspring.
    Merged(ClassifierId),
    Inserted(ClassifierId),
}

/// Adds `child` to the population, preferring subsumption by a parent,
/// then by any member of `action_set`, then merging with an identical
/// rule. Deletes until the capacity bound holds again.
pub fn insert_with_subsumption<R: Rng + ?Sized>(
    pop: &mut Population,
    child: Classifier,
    parents: &[ClassifierId],
    action_set: &[ClassifierId],
    hp: &Hyperparameters,
    rng: &mut R,
) -> Result<Insertion> {
    let subsumer = parents
        .iter()
        .chain(action_set)
        .copied()
        .find(|id| pop.get(*id).is_some_and(|g| does_subsume(g, &child, hp)));
    let outcome = if let Some(id) = subsumer {
        pop.add_numerosity(id, 1)?;
        Insertion::Subsumed(id)
    } else if let Some(id) = pop.find_identical(&child) {
        pop.add_numerosity(id, 1)?;
        Insertion::Merged(id)
    } else {
        Insertion::Inserted(pop.insert(child)?)
    };
    while pop.over_capacity() {
        delete_one(pop, hp, rng)?;
    }
    Ok(outcome)
}

/// Deletion vote of one macro-classifier given the population's mean
/// micro-classifier fitness.
pub fn deletion_vote(cl: &Classifier, mean_fitness: f64, hp: &Hyperparameters) -> f64 {
    let vote = cl.action_set_size * cl.numerosity as f64;
    let micro = cl.micro_fitness();
    if cl.experience > hp.theta_del && micro < hp.delta * mean_fitness {
        vote * mean_fitness / micro
    } else {
        vote
    }
}

/// Mean fitness per micro-classifier over the population.
pub fn mean_fitness(pop: &Population) -> f64 {
    let total: f64 = pop.iter().map(|(_, c)| c.fitness).sum();
    total / pop.numerosity_sum() as f64
}

/// Removes one micro-classifier chosen by roulette wheel over deletion
/// votes. Returns the affected rule's id.
pub fn delete_one<R: Rng + ?Sized>(
    pop: &mut Population,
    hp: &Hyperparameters,
    rng: &mut R,
) -> Result<ClassifierId> {
    if pop.is_empty() {
        return Err(Error::contract("deletion from an empty population"));
    }
    let mean = mean_fitness(pop);
    let votes: Vec<(ClassifierId, f64)> = pop
        .iter()
        .map(|(id, cl)| (id, deletion_vote(cl, mean, hp)))
        .collect();
    let total: f64 = votes.iter().map(|(_, v)| v).sum();
    let mut point = rng.random::<f64>() * total;
    let mut victim = votes.last().expect("non-empty").0;
    for (id, v) in &votes {
        if point < *v {
            victim = *id;
            break;
        }
        point -= v;
    }
    pop.remove_one(victim)?;
    Ok(victim)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GaReport {
    pub offspring: usize,
    pub subsumed: usize,
    pub crossed: bool,
}

fn offspring_from(parent: &Classifier, t: u64, hp: &Hyperparameters) -> Classifier {
    let mut child = parent.clone();
    if let Prediction::Linear(m) = &mut child.prediction {
        m.reset_gain(hp.delta_rls);
    }
    child.numerosity = 1;
    child.experience = 0;
    child.timestamp = t;
    child
}

/// One GA invocation on `action_set` triggered at `state`.
///
/// The caller has established [`ga_should_run`]; this sets the set's
/// timestamps to `t`, breeds two offspring and inserts them.
pub fn run_ga<R: Rng + ?Sized>(
    pop: &mut Population,
    action_set: &[ClassifierId],
    state: &[f64],
    t: u64,
    hp: &Hyperparameters,
    action_count: usize,
    rng: &mut R,
) -> Result<GaReport> {
    let live: Vec<ClassifierId> = action_set
        .iter()
        .copied()
        .filter(|id| pop.contains(*id))
        .collect();
    if live.is_empty() {
        return Err(Error::contract("GA on an empty action set"));
    }
    for id in &live {
        pop.get_mut(*id).expect("live").timestamp = t;
    }
    let first = tournament(pop, &live, hp, rng)?;
    let second = tournament(pop, &live, hp, rng)?;
    let (pa, pb) = (pop.get(first).expect("live"), pop.get(second).expect("live"));

    let fitness = hp.f_reduce * 0.5 * (pa.micro_fitness() + pb.micro_fitness());
    let epsilon = hp.epsilon_reduce * 0.5 * (pa.epsilon + pb.epsilon);
    let mut a = offspring_from(pa, t, hp);
    let mut b = offspring_from(pb, t, hp);

    let mut report = GaReport::default();
    if rng.random::<f64>() < hp.chi {
        report.crossed = crossover(&mut a.condition, &mut b.condition, rng);
        if report.crossed {
            blend_predictions(&mut a.prediction, &mut b.prediction);
        }
    }
    for child in [&mut a, &mut b] {
        let (condition, action) =
            mutate(&child.condition, child.action, state, hp, action_count, rng);
        child.condition = condition;
        child.action = action;
        child.fitness = fitness;
        child.epsilon = epsilon;
    }

    let parents = [first, second];
    for child in [a, b] {
        report.offspring += 1;
        if let Insertion::Subsumed(_) =
            insert_with_subsumption(pop, child, &parents, &live, hp, rng)?
        {
            report.subsumed += 1;
        }
    }
    Ok(report)
}

fn blend_predictions(a: &mut Prediction, b: &mut Prediction) {
    match (a, b) {
        (Prediction::Scalar(x), Prediction::Scalar(y)) => {
            let m = 0.5 * (*x + *y);
            *x = m;
            *y = m;
        }
        (Prediction::Linear(x), Prediction::Linear(y)) => {
            for (wx, wy) in x.weights.iter_mut().zip(y.weights.iter_mut()) {
                let m = 0.5 * (*wx + *wy);
                *wx = m;
                *wy = m;
            }
        }
        _ => {}
    }
}

//! The learning agent: one environment interaction per call, in either the
//! plain XCS mode or the experience-replay mode.

use serde::{Deserialize, Serialize};

use crate::env::{EnvSpec, Environment, TaskKind};
use crate::error::{Error, Result};
use crate::evolution::{ga_should_run, run_ga};
use crate::learning::{compute_payoff, update_action_set, UpdateReport};
use crate::matching::{build_action_set, build_match_set, select_action, PredictionArray};
use crate::params::Hyperparameters;
use crate::population::{ClassifierId, Population};
use crate::replay::{experience_replay, sample_minibatch, Experience, ReplayMemory, ReplayOutcome};
use crate::rng::Streams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Plain XCS: every experience is learned from once, directly.
    Standard,
    /// Experiences reach the learner only through the replay memory.
    Er,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Er => "er",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" | "xcs" => Ok(Mode::Standard),
            "er" | "xcs-er" => Ok(Mode::Er),
            _ => Err(Error::Config(format!("unknown mode `{s}` (standard|er)"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What happened during one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub reward: f64,
    pub explore: bool,
    pub action: usize,
    /// System prediction for the executed action.
    pub prediction: f64,
    /// Realized payoff target: `r` at episode end, otherwise
    /// `r + gamma * max PA(s')` over the current population.
    pub target: f64,
    pub terminal: bool,
    pub covered: usize,
}

impl StepRecord {
    pub fn system_error(&self) -> f64 {
        (self.prediction - self.target).abs()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Action-set updates (direct or replayed).
    pub updates: u64,
    pub ga_invocations: u64,
    pub replays: u64,
    pub replay_skips: u64,
    pub covered: u64,
    pub rls_resets: u64,
}

#[derive(Debug, Clone)]
struct Carry {
    state: Vec<f64>,
    reward: f64,
    action_set: Vec<ClassifierId>,
}

pub struct Agent {
    mode: Mode,
    hp: Hyperparameters,
    action_count: usize,
    single_step: bool,
    pop: Population,
    rm: Option<ReplayMemory>,
    streams: Streams,
    t: u64,
    /// Observation the next step acts on; `None` at episode start.
    current: Option<Vec<f64>>,
    prev: Option<Carry>,
    counters: Counters,
}

impl Agent {
    pub fn new(mode: Mode, hp: Hyperparameters, spec: &EnvSpec, seed: u64) -> Result<Self> {
        let (state_dim, action_count) = (spec.state_dim, spec.action_count);
        hp.validate_for(action_count)?;
        let rm = (mode == Mode::Er).then(|| ReplayMemory::new(hp.rm_capacity));
        Ok(Self {
            mode,
            pop: Population::new(state_dim, hp.n_max),
            hp,
            action_count,
            single_step: spec.kind == TaskKind::SingleStep,
            rm,
            streams: Streams::new(seed),
            t: 0,
            current: None,
            prev: None,
            counters: Counters::default(),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hp
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn replay_memory(&self) -> Option<&ReplayMemory> {
        self.rm.as_ref()
    }

    /// Steps taken so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Whether a delayed update is pending from the previous step.
    pub fn has_carry(&self) -> bool {
        self.prev.is_some()
    }

    /// Takes one step in `env`, resetting it first at episode start.
    pub fn step(&mut self, env: &mut dyn Environment) -> Result<StepRecord> {
        let state = match self.current.take() {
            Some(s) => s,
            None => {
                self.prev = None;
                env.reset()
            }
        };
        let rec = match self.mode {
            Mode::Standard => self.step_standard(env, state)?,
            Mode::Er => self.step_er(env, state)?,
        };
        self.t += 1;
        Ok(rec)
    }

    /// Match, predict, choose and act. Returns the action set, the record
    /// (target still unset) and the successor observation.
    fn act(
        &mut self,
        env: &mut dyn Environment,
        state: &[f64],
    ) -> Result<(Vec<ClassifierId>, StepRecord, Vec<f64>, PredictionArray)> {
        let (match_set, covered) = build_match_set(
            &mut self.pop,
            state,
            self.t,
            &self.hp,
            self.action_count,
            &mut self.streams.ga,
        )?;
        self.counters.covered += covered as u64;
        let pa = PredictionArray::new(&self.pop, &match_set, state, self.hp.x0, self.action_count);
        let sel = select_action(&pa, self.hp.exploration_prob, &mut self.streams.action)?;
        let action_set = build_action_set(&self.pop, &match_set, sel.action)?;
        let out = env.step(sel.action)?;
        let rec = StepRecord {
            t: self.t,
            reward: out.reward,
            explore: sel.explore,
            action: sel.action,
            prediction: pa.get(sel.action).unwrap_or(0.0),
            target: out.reward,
            terminal: out.terminal,
            covered,
        };
        Ok((action_set, rec, out.next_state, pa))
    }

    fn bootstrap_target(&self, reward: f64, next: &[f64]) -> Result<f64> {
        let m = self.pop.matching(next)?;
        let pa = PredictionArray::new(&self.pop, &m, next, self.hp.x0, self.action_count);
        Ok(compute_payoff(reward, Some(&pa), self.hp.gamma))
    }

    fn learn(&mut self, action_set: &[ClassifierId], target: f64, state: &[f64]) -> Result<()> {
        if !action_set.iter().any(|id| self.pop.contains(*id)) {
            return Ok(());
        }
        let UpdateReport { rls_resets, .. } =
            update_action_set(&mut self.pop, action_set, target, state, &self.hp)?;
        self.counters.updates += 1;
        self.counters.rls_resets += rls_resets as u64;
        if ga_should_run(&self.pop, action_set, self.t, self.hp.theta_ga)? {
            run_ga(
                &mut self.pop,
                action_set,
                state,
                self.t,
                &self.hp,
                self.action_count,
                &mut self.streams.ga,
            )?;
            self.counters.ga_invocations += 1;
        }
        Ok(())
    }

    /// One iteration of plain XCS with the one-step-delayed update.
    fn step_standard(&mut self, env: &mut dyn Environment, state: Vec<f64>) -> Result<StepRecord> {
        let (action_set, mut rec, next, pa) = self.act(env, &state)?;
        if let Some(prev) = self.prev.take() {
            let p = compute_payoff(prev.reward, Some(&pa), self.hp.gamma);
            self.learn(&prev.action_set, p, &prev.state)?;
        }
        if rec.terminal {
            self.learn(&action_set, rec.reward, &state)?;
        } else {
            rec.target = self.bootstrap_target(rec.reward, &next)?;
            self.prev = Some(Carry {
                state,
                reward: rec.reward,
                action_set,
            });
            self.current = Some(next);
        }
        Ok(rec)
    }

    /// One iteration with experience replay: act, store, replay a
    /// minibatch once the warm-up is over.
    fn step_er(&mut self, env: &mut dyn Environment, state: Vec<f64>) -> Result<StepRecord> {
        let (_, mut rec, next, _) = self.act(env, &state)?;
        let e = if self.single_step {
            Experience::single_step(state, rec.action, rec.reward)
        } else {
            Experience::transition(state, rec.action, rec.reward, next.clone(), rec.terminal)
        };
        if !rec.terminal {
            rec.target = self.bootstrap_target(rec.reward, &next)?;
            self.current = Some(next);
        }
        let rm = self.rm.as_mut().expect("replay memory in er mode");
        rm.push(e);
        if self.t >= self.hp.warmup_steps {
            self.replay()?;
        }
        Ok(rec)
    }

    fn replay(&mut self) -> Result<()> {
        let rm = self.rm.as_ref().expect("replay memory in er mode");
        if rm.is_empty() {
            return Ok(());
        }
        let batch: Vec<Experience> = sample_minibatch(rm, self.hp.minibatch, &mut self.streams.replay)?
            .into_iter()
            .cloned()
            .collect();
        for e in &batch {
            let out = experience_replay(
                e,
                &mut self.pop,
                self.t,
                &self.hp,
                self.action_count,
                &mut self.streams.ga,
            )?;
            self.counters.replays += 1;
            match out {
                ReplayOutcome::Skipped => self.counters.replay_skips += 1,
                ReplayOutcome::Replayed { update, ga } => {
                    self.counters.updates += 1;
                    self.counters.rls_resets += update.rls_resets as u64;
                    if ga {
                        self.counters.ga_invocations += 1;
                    }
                }
            }
        }
        Ok(())
    }
}

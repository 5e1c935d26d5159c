//! Seeded repetitions, aggregation and persistence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::metrics::{diverged, final_otm, mean_sd, system_error, MeanSd, SlidingMean};
use super::runlog::{EpisodeRow, RepSummary, RunLog, StepRow, METRICS};
use crate::agent::Agent;
use crate::env::{make_env, EnvData};
use crate::error::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.cfg";
pub const SUMMARY_SCHEMA: u32 = 1;

pub fn steps_file(rep: usize) -> String {
    format!("rep_{rep:03}.csv")
}

pub fn episodes_file(rep: usize) -> String {
    format!("rep_{rep:03}_episodes.csv")
}

/// Seed of repetition `rep`.
pub fn rep_seed(cfg: &ExperimentConfig, rep: usize) -> u64 {
    cfg.base_seed.wrapping_add(rep as u64)
}

/// Runs repetition `rep` to completion and returns its full log.
pub fn run_repetition(cfg: &ExperimentConfig, data: &EnvData, rep: usize) -> Result<RunLog> {
    run(cfg, data, rep, true)
}

/// Like [`run_repetition`] but keeps only the summary, for large sweeps.
pub fn summarize_repetition(cfg: &ExperimentConfig, data: &EnvData, rep: usize) -> Result<RepSummary> {
    Ok(run(cfg, data, rep, false)?.summary)
}

fn run(cfg: &ExperimentConfig, data: &EnvData, rep: usize, keep: bool) -> Result<RunLog> {
    let seed = rep_seed(cfg, rep);
    let mut env = make_env(&cfg.env, data, seed)?;
    let mut agent = Agent::new(cfg.mode, cfg.hp.clone(), env.spec(), seed)?;
    let total = cfg.hp.max_learning_steps;

    let mut steps = Vec::with_capacity(if keep { total as usize } else { 0 });
    let mut episodes = Vec::new();
    let mut returns = Vec::new();
    let mut reward_win = SlidingMean::new(cfg.reward_window);
    let mut err_win = SlidingMean::new(cfg.reward_window);
    let (mut reward_sum, mut err_sum, mut exploit) = (0.0, 0.0, 0u64);
    let (mut episode, mut ep_return, mut ep_len) = (0u64, 0.0, 0u64);
    let mut corrupt = None;

    for _ in 0..total {
        let rec = agent.step(env.as_mut())?;
        let sys_err = system_error(rec.prediction, rec.target);
        let generality = agent.population().generality();
        if let Some(bad) = [("reward", rec.reward), ("sys_err", sys_err), ("generality", generality)]
            .iter()
            .find(|(_, v)| !v.is_finite())
        {
            corrupt = Some(format!("non-finite {} ({}) at t={}", bad.0, bad.1, rec.t));
            break;
        }
        if !rec.explore {
            reward_win.push(rec.reward);
            err_win.push(sys_err);
            reward_sum += rec.reward;
            err_sum += sys_err;
            exploit += 1;
        }
        if keep {
            steps.push(StepRow {
                t: rec.t,
                episode,
                reward: rec.reward,
                explore: rec.explore,
                sys_err,
                macro_count: agent.population().macro_count(),
                num_sum: agent.population().numerosity_sum(),
                generality,
            });
        }
        ep_return += rec.reward;
        ep_len += 1;
        if rec.terminal {
            episodes.push(EpisodeRow {
                episode,
                ret: ep_return,
                length: ep_len,
            });
            returns.push(ep_return);
            episode += 1;
            ep_return = 0.0;
            ep_len = 0;
        }
    }

    let pop = agent.population();
    let otm = cfg
        .env
        .kind
        .is_multi_step()
        .then(|| final_otm(&returns, cfg.otm_window))
        .flatten();
    let per_exploit = |s: f64| if exploit > 0 { s / exploit as f64 } else { f64::NAN };
    let summary = RepSummary {
        rep,
        seed,
        steps: agent.t(),
        episodes: episodes.len() as u64,
        reward: per_exploit(reward_sum),
        reward_final: reward_win.mean().unwrap_or(f64::NAN),
        sys_err: per_exploit(err_sum),
        sys_err_final: err_win.mean().unwrap_or(f64::NAN),
        macro_count: pop.macro_count(),
        num_sum: pop.numerosity_sum(),
        generality: pop.generality(),
        otm,
        diverged: otm.and_then(|o| diverged(o, cfg.env.kind)),
        counters: agent.counters(),
        corrupt,
    };
    if !keep {
        episodes.clear();
    }
    Ok(RunLog {
        steps,
        episodes,
        summary,
    })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))
}

/// Runs every repetition on `jobs` workers. Results are ordered by
/// repetition regardless of completion order.
pub fn run_experiment(cfg: &ExperimentConfig, data: &EnvData, jobs: usize) -> Result<Vec<RunLog>> {
    cfg.validate()?;
    pool(jobs)?.install(|| {
        (0..cfg.repetitions)
            .into_par_iter()
            .map(|rep| run_repetition(cfg, data, rep))
            .collect()
    })
}

/// Summaries only.
pub fn run_summaries(cfg: &ExperimentConfig, data: &EnvData, jobs: usize) -> Result<Vec<RepSummary>> {
    cfg.validate()?;
    pool(jobs)?.install(|| {
        (0..cfg.repetitions)
            .into_par_iter()
            .map(|rep| summarize_repetition(cfg, data, rep))
            .collect()
    })
}

/// What `summary.json` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub schema: u32,
    pub config: ExperimentConfig,
    /// The resolved config in its text form.
    pub config_text: String,
    pub runs: Vec<RepSummary>,
    /// Mean and SD over repetitions per metric.
    pub aggregate: BTreeMap<String, MeanSd>,
    pub divergences: Option<usize>,
    pub corrupt_runs: usize,
}

impl ExperimentSummary {
    pub fn new(cfg: &ExperimentConfig, runs: Vec<RepSummary>) -> Self {
        let aggregate = METRICS
            .iter()
            .filter_map(|&m| {
                let xs: Vec<f64> = runs.iter().filter_map(|r| r.metric(m)).collect();
                (!xs.is_empty()).then(|| (m.to_string(), mean_sd(&xs)))
            })
            .collect();
        let divergences = cfg
            .env
            .kind
            .divergence_threshold()
            .map(|_| runs.iter().filter(|r| r.diverged == Some(true)).count());
        Self {
            schema: SUMMARY_SCHEMA,
            config: cfg.clone(),
            config_text: cfg.to_text(),
            corrupt_runs: runs.iter().filter(|r| r.corrupt.is_some()).count(),
            runs,
            aggregate,
            divergences,
        }
    }

    /// Per-repetition values of `metric`, in repetition order.
    pub fn values(&self, metric: &str) -> Result<Vec<f64>> {
        self.runs
            .iter()
            .map(|r| {
                r.metric(metric).ok_or_else(|| {
                    Error::Config(format!("metric `{metric}` unavailable for repetition {}", r.rep))
                })
            })
            .collect()
    }
}

/// Writes per-repetition CSVs, the config echo and `summary.json`.
pub fn write_experiment(dir: &Path, cfg: &ExperimentConfig, logs: &[RunLog]) -> Result<ExperimentSummary> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for log in logs {
        let rep = log.summary.rep;
        log.write_steps(&dir.join(steps_file(rep)))?;
        log.write_episodes(&dir.join(episodes_file(rep)))?;
    }
    let summary = ExperimentSummary::new(cfg, logs.iter().map(|l| l.summary.clone()).collect());
    let cfg_path = dir.join(CONFIG_FILE);
    std::fs::write(&cfg_path, &summary.config_text).map_err(|e| Error::io(&cfg_path, e))?;
    let path = dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}

pub fn load_summary(dir: &Path) -> Result<ExperimentSummary> {
    let path: PathBuf = dir.join(SUMMARY_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let s: ExperimentSummary = serde_json::from_str(&text)?;
    if s.schema != SUMMARY_SCHEMA {
        return Err(Error::Config(format!(
            "{}: schema {} not supported (expected {SUMMARY_SCHEMA})",
            path.display(),
            s.schema
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::Mode;
    use crate::env::EnvKind;

    fn small(kind: EnvKind, mode: Mode) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.mode = mode;
        cfg.repetitions = 2;
        cfg.hp.max_learning_steps = 1500;
        cfg
    }

    #[test]
    fn single_step_run_logs_every_step() {
        let cfg = small(EnvKind::Rmp6, Mode::Standard);
        let log = run_repetition(&cfg, &EnvData::default(), 0).unwrap();
        assert_eq!(log.steps.len(), 1500);
        assert_eq!(log.episodes.len(), 1500);
        assert!(log.steps.windows(2).all(|w| w[0].t + 1 == w[1].t));
        assert!(log.summary.corrupt.is_none());
    }

    #[test]
    fn episode_returns_sum_step_rewards() {
        let cfg = small(EnvKind::NChain16, Mode::Er);
        let log = run_repetition(&cfg, &EnvData::default(), 1).unwrap();
        for ep in &log.episodes {
            let r: f64 = log
                .steps
                .iter()
                .filter(|s| s.episode == ep.episode)
                .map(|s| s.reward)
                .sum();
            assert_eq!(r, ep.ret);
        }
        assert_eq!(log.episodes.len(), 7);
    }

    #[test]
    fn summary_only_matches_full_run() {
        let cfg = small(EnvKind::CartPole, Mode::Standard);
        let full = run_repetition(&cfg, &EnvData::default(), 0).unwrap();
        let brief = summarize_repetition(&cfg, &EnvData::default(), 0).unwrap();
        assert_eq!(full.summary, brief);
    }

    #[test]
    fn aggregates_recompute_from_runs() {
        let cfg = small(EnvKind::Rmp6, Mode::Er);
        let runs = run_summaries(&cfg, &EnvData::default(), 1).unwrap();
        let s = ExperimentSummary::new(&cfg, runs.clone());
        let rewards: Vec<f64> = runs.iter().map(|r| r.reward).collect();
        assert_eq!(s.aggregate["reward"], mean_sd(&rewards));
        assert_eq!(s.divergences, None);
    }
}

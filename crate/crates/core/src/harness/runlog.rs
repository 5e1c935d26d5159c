//! Per-repetition logs and their CSV form.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agent::Counters;
use crate::error::{Error, Result};

/// Header of the per-step CSV.
pub const STEP_HEADER: [&str; 8] = [
    "t",
    "episode",
    "reward",
    "explore",
    "sys_err",
    "macro",
    "num_sum",
    "generality",
];

pub const EPISODE_HEADER: [&str; 3] = ["episode", "return", "length"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub t: u64,
    pub episode: u64,
    pub reward: f64,
    #[serde(with = "bit")]
    pub explore: bool,
    pub sys_err: f64,
    #[serde(rename = "macro")]
    pub macro_count: usize,
    pub num_sum: usize,
    pub generality: f64,
}

mod bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*b as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        Ok(u8::deserialize(d)? != 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub episode: u64,
    #[serde(rename = "return")]
    pub ret: f64,
    pub length: u64,
}

/// Scalar results of one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSummary {
    pub rep: usize,
    pub seed: u64,
    pub steps: u64,
    /// Completed episodes.
    pub episodes: u64,
    /// Mean reward over all exploit steps of the run.
    pub reward: f64,
    /// Mean reward over the last `reward_window` exploit steps.
    pub reward_final: f64,
    /// Mean system error over all exploit steps.
    pub sys_err: f64,
    pub sys_err_final: f64,
    /// Macro-classifiers at the end of the run.
    #[serde(rename = "macro")]
    pub macro_count: usize,
    pub num_sum: usize,
    pub generality: f64,
    /// Final sliding mean of episode returns.
    pub otm: Option<f64>,
    pub diverged: Option<bool>,
    pub counters: Counters,
    /// Why the run was stopped early, if it was.
    pub corrupt: Option<String>,
}

/// Metric names accepted by [`RepSummary::metric`].
pub const METRICS: [&str; 9] = [
    "reward",
    "reward_final",
    "sys_err",
    "sys_err_final",
    "macro",
    "num_sum",
    "generality",
    "otm",
    "episodes",
];

impl RepSummary {
    pub fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "reward" => Some(self.reward),
            "reward_final" => Some(self.reward_final),
            "sys_err" => Some(self.sys_err),
            "sys_err_final" => Some(self.sys_err_final),
            "macro" => Some(self.macro_count as f64),
            "num_sum" => Some(self.num_sum as f64),
            "generality" => Some(self.generality),
            "otm" => self.otm,
            "episodes" => Some(self.episodes as f64),
            _ => None,
        }
    }

    pub fn metrics(&self) -> BTreeMap<&'static str, f64> {
        METRICS
            .iter()
            .filter_map(|&m| self.metric(m).map(|v| (m, v)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub steps: Vec<StepRow>,
    pub episodes: Vec<EpisodeRow>,
    pub summary: RepSummary,
}

impl RunLog {
    pub fn write_steps(&self, path: &Path) -> Result<()> {
        write_rows(path, &self.steps)
    }

    pub fn write_episodes(&self, path: &Path) -> Result<()> {
        write_rows(path, &self.episodes)
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    })?;
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header `{}`, found `{}`", header.join(","), found.join(",")),
        });
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn read_steps(path: &Path) -> Result<Vec<StepRow>> {
    read_rows(path, &STEP_HEADER)
}

pub fn read_episodes(path: &Path) -> Result<Vec<EpisodeRow>> {
    read_rows(path, &EPISODE_HEADER)
}

//! Learning curves aggregated over repetitions.
//!
//! The output CSV has one row per step and, for every experiment, a
//! `<label>_mean` and a `<label>_sd` column.

use std::path::Path;
use std::str::FromStr;

use super::experiment::{load_summary, steps_file};
use super::metrics::{mean_sd, SlidingMean};
use super::runlog::{read_steps, StepRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMetric {
    /// Sliding mean of exploit-step rewards.
    Reward,
    /// Sliding mean of exploit-step system error.
    SysErr,
    Macro,
    NumSum,
    Generality,
    /// Sliding mean of completed episode returns.
    Otm,
}

impl CurveMetric {
    pub const ALL: [CurveMetric; 6] = [
        CurveMetric::Reward,
        CurveMetric::SysErr,
        CurveMetric::Macro,
        CurveMetric::NumSum,
        CurveMetric::Generality,
        CurveMetric::Otm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveMetric::Reward => "reward",
            CurveMetric::SysErr => "sys_err",
            CurveMetric::Macro => "macro",
            CurveMetric::NumSum => "num_sum",
            CurveMetric::Generality => "generality",
            CurveMetric::Otm => "otm",
        }
    }
}

impl FromStr for CurveMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown curve metric `{s}`")))
    }
}

/// Curve of one repetition. Sliding means report 0 until their first
/// sample arrives.
pub fn curve(rows: &[StepRow], metric: CurveMetric, reward_window: usize, otm_window: usize) -> Vec<f64> {
    match metric {
        CurveMetric::Macro => rows.iter().map(|r| r.macro_count as f64).collect(),
        CurveMetric::NumSum => rows.iter().map(|r| r.num_sum as f64).collect(),
        CurveMetric::Generality => rows.iter().map(|r| r.generality).collect(),
        CurveMetric::Reward | CurveMetric::SysErr => {
            let mut w = SlidingMean::new(reward_window);
            rows.iter()
                .map(|r| {
                    if !r.explore {
                        w.push(if metric == CurveMetric::Reward { r.reward } else { r.sys_err });
                    }
                    w.mean().unwrap_or(0.0)
                })
                .collect()
        }
        CurveMetric::Otm => {
            let mut w = SlidingMean::new(otm_window);
            let mut ret = 0.0;
            rows.iter()
                .enumerate()
                .map(|(i, r)| {
                    ret += r.reward;
                    let ends = rows.get(i + 1).is_some_and(|n| n.episode != r.episode);
                    if ends {
                        w.push(ret);
                        ret = 0.0;
                    }
                    w.mean().unwrap_or(0.0)
                })
                .collect()
        }
    }
}

/// Pointwise mean and sample SD over equally long curves.
pub fn aggregate(curves: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let len = curves.first().map_or(0, Vec::len);
    if curves.iter().any(|c| c.len() != len) {
        return Err(Error::Config("repetition logs differ in length".into()));
    }
    let mut mean = Vec::with_capacity(len);
    let mut sd = Vec::with_capacity(len);
    let mut col = vec![0.0; curves.len()];
    for i in 0..len {
        for (c, v) in curves.iter().zip(col.iter_mut()) {
            *v = c[i];
        }
        let m = mean_sd(&col);
        mean.push(m.mean);
        sd.push(m.sd);
    }
    Ok((mean, sd))
}

/// A labelled aggregated curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

/// Loads every repetition log of the experiment in `dir` and aggregates
/// `metric`, using the windows recorded in its summary.
pub fn experiment_curve(dir: &Path, metric: CurveMetric) -> Result<Series> {
    let summary = load_summary(dir)?;
    let curves = summary
        .runs
        .iter()
        .map(|r| {
            let rows = read_steps(&dir.join(steps_file(r.rep)))?;
            Ok(curve(
                &rows,
                metric,
                summary.config.reward_window,
                summary.config.otm_window,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mean, sd) = aggregate(&curves)?;
    let label = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    Ok(Series { label, mean, sd })
}

/// Writes `series` side by side; labels are made unique by suffixing.
pub fn write_curves(path: &Path, series: &[Series]) -> Result<()> {
    let len = series.first().map_or(0, |s| s.mean.len());
    if series.iter().any(|s| s.mean.len() != len) {
        return Err(Error::Config("experiments differ in log length".into()));
    }
    let mut labels: Vec<String> = Vec::new();
    for s in series {
        let mut l = s.label.clone();
        let mut k = 2;
        while labels.contains(&l) {
            l = format!("{}_{k}", s.label);
            k += 1;
        }
        labels.push(l);
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header = vec!["t".to_string()];
    for l in &labels {
        header.push(format!("{l}_mean"));
        header.push(format!("{l}_sd"));
    }
    w.write_record(&header)?;
    for i in 0..len {
        let mut rec = vec![i.to_string()];
        for s in series {
            rec.push(s.mean[i].to_string());
            rec.push(s.sd[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

//! Baseline-versus-treatment comparison of one metric.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::shapiro::shapiro_wilk;
use super::ttest::{paired_t_one_sided, Alternative};
use super::wilcoxon::wilcoxon_signed_rank;
use crate::error::{Error, Result};
use crate::harness::metrics::{mean_sd, MeanSd};

/// Significance level of the normality gate.
pub const NORMALITY_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Test {
    /// Paired one-sided t-test in the direction of the observed shift.
    PairedT,
    /// Two-sided Wilcoxon signed-rank test.
    Wilcoxon,
    /// The samples are identical pair by pair.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub metric: String,
    pub baseline: MeanSd,
    pub treatment: MeanSd,
    /// Shapiro-Wilk p of each sample; `None` when the test was not
    /// applicable (sample size outside 3..=50 or zero variance).
    pub normality_baseline: Option<f64>,
    pub normality_treatment: Option<f64>,
    pub test: Test,
    pub statistic: Option<f64>,
    pub p: Option<f64>,
    /// Whether the treatment mean went up or down.
    pub direction: Option<Alternative>,
    pub stars: String,
}

impl ComparisonRow {
    pub fn arrow(&self) -> &'static str {
        match self.direction {
            Some(Alternative::Greater) => "↑",
            Some(Alternative::Less) => "↓",
            None => "",
        }
    }

    pub fn significant(&self) -> bool {
        !self.stars.is_empty()
    }
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

fn normality(x: &[f64]) -> Option<f64> {
    shapiro_wilk(x).ok().map(|(_, p)| p)
}

/// Compares paired per-repetition values of `metric`. Both samples must
/// pass the normality gate for the t-test; otherwise the Wilcoxon test
/// is used.
pub fn compare(baseline: &[f64], treatment: &[f64], metric: &str) -> Result<ComparisonRow> {
    if baseline.len() != treatment.len() {
        return Err(Error::Stats(format!(
            "`{metric}`: {} baseline repetitions vs {} treatment repetitions",
            baseline.len(),
            treatment.len()
        )));
    }
    if baseline.is_empty() {
        return Err(Error::Stats(format!("`{metric}`: no repetitions")));
    }
    if baseline.iter().chain(treatment).any(|v| !v.is_finite()) {
        return Err(Error::Stats(format!("`{metric}`: non-finite values")));
    }
    let b = mean_sd(baseline);
    let t = mean_sd(treatment);
    let direction = if t.mean > b.mean {
        Some(Alternative::Greater)
    } else if t.mean < b.mean {
        Some(Alternative::Less)
    } else {
        None
    };
    let nb = normality(baseline);
    let nt = normality(treatment);
    let mut row = ComparisonRow {
        metric: metric.to_string(),
        baseline: b,
        treatment: t,
        normality_baseline: nb,
        normality_treatment: nt,
        test: Test::None,
        statistic: None,
        p: None,
        direction,
        stars: String::new(),
    };
    if baseline == treatment {
        row.direction = None;
        return Ok(row);
    }
    let normal = matches!((nb, nt), (Some(p), Some(q)) if p >= NORMALITY_ALPHA && q >= NORMALITY_ALPHA);
    let t_result = if normal {
        let alt = direction.unwrap_or(Alternative::Greater);
        paired_t_one_sided(treatment, baseline, alt).ok()
    } else {
        None
    };
    let (test, stat, p) = match t_result {
        Some((stat, p)) => (Test::PairedT, stat, p),
        None => {
            let w = wilcoxon_signed_rank(treatment, baseline)?;
            (Test::Wilcoxon, w.statistic, w.p)
        }
    };
    row.test = test;
    row.statistic = Some(stat);
    row.p = Some(p);
    row.stars = stars(p).to_string();
    Ok(row)
}

pub const CSV_HEADER: [&str; 13] = [
    "metric",
    "baseline_mean",
    "baseline_sd",
    "treatment_mean",
    "treatment_sd",
    "normality_p_baseline",
    "normality_p_treatment",
    "test",
    "statistic",
    "p",
    "direction",
    "stars",
    "n",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.metric.clone(),
            r.baseline.mean.to_string(),
            r.baseline.sd.to_string(),
            r.treatment.mean.to_string(),
            r.treatment.sd.to_string(),
            opt(r.normality_baseline),
            opt(r.normality_treatment),
            match r.test {
                Test::PairedT => "paired_t",
                Test::Wilcoxon => "wilcoxon",
                Test::None => "none",
            }
            .to_string(),
            opt(r.statistic),
            opt(r.p),
            match r.direction {
                Some(Alternative::Greater) => "up",
                Some(Alternative::Less) => "down",
                None => "",
            }
            .to_string(),
            r.stars.clone(),
            r.baseline.n.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn cell(m: &MeanSd) -> String {
    let digits = if m.mean.abs() >= 1.0 || m.mean == 0.0 { 2 } else { 6 };
    format!("{:.*} ±{:.*}", digits, m.mean, digits, m.sd)
}

/// A text table with one column per metric: the treatment row first
/// (arrows and stars attached), the baseline row below.
pub fn format_table(rows: &[ComparisonRow], baseline: &str, treatment: &str) -> String {
    let label_w = baseline.len().max(treatment.len()).max(6);
    let treat: Vec<String> = rows
        .iter()
        .map(|r| format!("{}{}{}", cell(&r.treatment), r.arrow(), r.stars))
        .collect();
    let base: Vec<String> = rows.iter().map(|r| cell(&r.baseline)).collect();
    let widths: Vec<usize> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.metric
                .chars()
                .count()
                .max(treat[i].chars().count())
                .max(base[i].chars().count())
        })
        .collect();
    let mut s = String::new();
    let line = |s: &mut String, label: &str, cells: &[String]| {
        let _ = write!(s, "{label:<label_w$}");
        for (c, w) in cells.iter().zip(&widths) {
            let pad = w - c.chars().count();
            let _ = write!(s, "  {c}{}", " ".repeat(pad));
        }
        s.push('\n');
    };
    let header: Vec<String> = rows.iter().map(|r| r.metric.clone()).collect();
    line(&mut s, "", &header);
    line(&mut s, treatment, &treat);
    line(&mut s, baseline, &base);
    s
}

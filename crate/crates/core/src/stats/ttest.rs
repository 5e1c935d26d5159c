//! Paired one-sided Student t-test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Alternative hypothesis about `x - y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alternative {
    /// `x` tends to be larger than `y`.
    Greater,
    Less,
}

impl Alternative {
    pub fn reversed(self) -> Self {
        match self {
            Alternative::Greater => Alternative::Less,
            Alternative::Less => Alternative::Greater,
        }
    }
}

/// Returns `(t, p)` for the paired differences `x - y`.
pub fn paired_t_one_sided(x: &[f64], y: &[f64], alternative: Alternative) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::Stats(format!(
            "paired samples differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Stats("paired t-test needs at least 2 pairs".into()));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var.is_nan() || var <= 0.0 {
        return Err(Error::Stats("paired differences have zero variance".into()));
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).map_err(|e| Error::Stats(e.to_string()))?;
    let p = match alternative {
        Alternative::Greater => dist.sf(t),
        Alternative::Less => dist.cdf(t),
    };
    Ok((t, p.clamp(0.0, 1.0)))
}

//! Run metrics: sliding means, OTM and divergence.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::env::EnvKind;

/// Mean of the most recent `window` values. Before the window fills, the
/// mean runs over whatever has been seen.
#[derive(Debug, Clone)]
pub struct SlidingMean {
    window: usize,
    buf: VecDeque<f64>,
}

impl SlidingMean {
    pub fn new(window: usize) -> Self {
        assert!(window > 0, "window must be positive");
        Self {
            window,
            buf: VecDeque::with_capacity(window),
        }
    }

    pub fn push(&mut self, x: f64) {
        if self.buf.len() == self.window {
            self.buf.pop_front();
        }
        self.buf.push_back(x);
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// `None` until the first value arrives.
    pub fn mean(&self) -> Option<f64> {
        if self.buf.is_empty() {
            None
        } else {
            // summed afresh each time so the result never depends on history
            Some(self.buf.iter().sum::<f64>() / self.buf.len() as f64)
        }
    }
}

/// Sliding means after each element of `xs`.
pub fn sliding_means(xs: &[f64], window: usize) -> Vec<f64> {
    let mut m = SlidingMean::new(window);
    xs.iter()
        .map(|&x| {
            m.push(x);
            m.mean().expect("non-empty")
        })
        .collect()
}

/// OTM series: the sliding `window`-episode mean of episode returns.
pub fn otm(returns: &[f64], window: usize) -> Vec<f64> {
    sliding_means(returns, window)
}

/// The OTM at the end of the run, `None` without a completed episode.
pub fn final_otm(returns: &[f64], window: usize) -> Option<f64> {
    let tail = &returns[returns.len().saturating_sub(window)..];
    (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64)
}

/// Whether a run with final OTM `otm` counts as diverged on `kind`;
/// `None` for tasks without a divergence threshold.
pub fn diverged(otm: f64, kind: EnvKind) -> Option<bool> {
    kind.divergence_threshold().map(|th| otm < th)
}

/// Absolute error of the system prediction against the payoff target.
pub fn system_error(prediction: f64, target: f64) -> f64 {
    (prediction - target).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub sd: f64,
    pub n: usize,
}

pub fn mean_sd(xs: &[f64]) -> MeanSd {
    let n = xs.len();
    if n == 0 {
        return MeanSd {
            mean: f64::NAN,
            sd: f64::NAN,
            n,
        };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    MeanSd { mean, sd, n }
}

//! Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped and tied magnitudes share their mean rank.
//! Up to 12 pairs the null distribution is enumerated exactly over all
//! sign assignments of the observed ranks; beyond that a normal
//! approximation with continuity and tie corrections is used. The p-value
//! is two-sided; [`WilcoxonResult::direction`] carries the sign.

use statrs::distribution::ContinuousCDF;

use super::std_normal;
use super::ttest::Alternative;
use crate::error::{Error, Result};

/// Largest sample solved by exact enumeration.
pub const EXACT_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Two-sided p-value.
    pub p: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub exact: bool,
    /// Which way `x - y` leans; `None` when the rank sums balance.
    pub direction: Option<Alternative>,
}

/// Mid-ranks (1-based) of `v`.
pub fn mid_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_with(x, y, None)
}

/// Same test with the method forced: `Some(true)` exact, `Some(false)`
/// normal approximation.
pub fn wilcoxon_with(x: &[f64], y: &[f64], exact: Option<bool>) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::Stats(format!(
            "paired samples differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return Err(Error::Stats("all paired differences are zero".into()));
    }
    let mags: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = mid_ranks(&mags);
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let exact = exact.unwrap_or(n <= EXACT_MAX);
    let p = if exact {
        if n > 25 {
            return Err(Error::Stats(format!("exact enumeration over {n} pairs is too large")));
        }
        exact_p(&ranks, w_plus)
    } else {
        normal_p(&mags, w_plus)
    };
    let direction = if w_plus > w_minus {
        Some(Alternative::Greater)
    } else if w_plus < w_minus {
        Some(Alternative::Less)
    } else {
        None
    };
    Ok(WilcoxonResult {
        statistic: w_plus.min(w_minus),
        w_plus,
        w_minus,
        p,
        n,
        exact,
        direction,
    })
}

/// Two-sided p by enumerating all 2^n sign patterns. Ranks are doubled so
/// mid-ranks become integers.
fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    let r2: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max: usize = r2.iter().sum();
    // counts[s] = number of sign patterns whose doubled W+ equals s
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for &r in &r2 {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let obs = (w_plus * 2.0).round() as usize;
    let all = (1u64 << ranks.len()) as f64;
    let lower: u64 = counts[..=obs].iter().sum();
    let upper: u64 = counts[obs..].iter().sum();
    (2.0 * lower.min(upper) as f64 / all).min(1.0)
}

fn normal_p(mags: &[f64], w_plus: f64) -> f64 {
    let n = mags.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = mags.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        let t = j as f64;
        ties += t * t * t - t;
        i += j;
    }
    let var = (n * (n + 1.0) * (2.0 * n + 1.0) - ties / 2.0) / 24.0;
    let se = var.sqrt();
    let mut z = (w_plus - mean) / se;
    z -= z.signum() * 0.5 / se;
    (2.0 * std_normal().sf(z.abs())).min(1.0)
}

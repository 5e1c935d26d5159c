//! Significance testing over repetition results: a Shapiro-Wilk
//! normality gate, then a paired one-sided t-test or a Wilcoxon
//! signed-rank test.

pub mod compare;
pub mod shapiro;
pub mod ttest;
pub mod wilcoxon;

pub use compare::{compare, format_table, write_csv, ComparisonRow, Test};
pub use shapiro::shapiro_wilk;
pub use ttest::{paired_t_one_sided, Alternative};
pub use wilcoxon::wilcoxon_signed_rank;

use statrs::distribution::Normal;

pub(crate) fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

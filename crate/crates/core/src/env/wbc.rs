use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;

use super::{binary_reward, check_action, EnvSpec, EnvStep, Environment, TaskKind};
use crate::error::{Error, Result};
use crate::rng::Rng as StreamRng;

pub const WBC_FEATURES: usize = 9;

/// Parsed rows of the UCI `breast-cancer-wisconsin.data` file.
#[derive(Debug, Clone, PartialEq)]
pub struct WbcData {
    pub path: PathBuf,
    /// Features scaled to `[0, 1]` by `(v - 1) / 9`.
    pub features: Vec<[f64; WBC_FEATURES]>,
    /// 0 = benign (class 2), 1 = malignant (class 4).
    pub labels: Vec<usize>,
    /// Rows dropped for containing the `?` missing-value marker.
    pub dropped: usize,
}

impl WbcData {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Each line: `id, f1..f9 (integers 1-10), class (2|4)`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut data = WbcData {
            path: path.to_path_buf(),
            features: Vec::new(),
            labels: Vec::new(),
            dropped: 0,
        };
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let err = |reason: String| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                reason,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != WBC_FEATURES + 2 {
                return Err(err(format!("expected 11 columns, found {}", cols.len())));
            }
            if cols.contains(&"?") {
                data.dropped += 1;
                continue;
            }
            let mut row = [0.0; WBC_FEATURES];
            for (f, raw) in row.iter_mut().zip(&cols[1..=WBC_FEATURES]) {
                let v: u32 = raw
                    .parse()
                    .map_err(|_| err(format!("feature `{raw}` is not an integer")))?;
                if !(1..=10).contains(&v) {
                    return Err(err(format!("feature {v} outside 1..=10")));
                }
                *f = (v as f64 - 1.0) / 9.0;
            }
            let label = match cols[WBC_FEATURES + 1] {
                "2" => 0,
                "4" => 1,
                other => return Err(err(format!("class `{other}` is neither 2 nor 4"))),
            };
            data.features.push(row);
            data.labels.push(label);
        }
        if data.features.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                reason: "no usable rows".into(),
            });
        }
        Ok(data)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Stream classification over the WBC rows, sampled with replacement.
pub struct Wbc {
    spec: EnvSpec,
    data: Arc<WbcData>,
    row: usize,
    rng: StreamRng,
}

impl Wbc {
    pub fn new(data: Arc<WbcData>, rng: StreamRng) -> Self {
        Self {
            spec: EnvSpec {
                name: "wbc".into(),
                state_dim: WBC_FEATURES,
                action_count: 2,
                episode_limit: 1,
                reward_range: (0.0, 1000.0),
                kind: TaskKind::SingleStep,
            },
            data,
            row: 0,
            rng,
        }
    }

    pub fn correct_action(&self) -> usize {
        self.data.labels[self.row]
    }
}

impl Environment for Wbc {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self) -> Vec<f64> {
        self.row = self.rng.random_range(0..self.data.len());
        self.data.features[self.row].to_vec()
    }

    fn reset_uniform(&mut self) -> Vec<f64> {
        self.reset()
    }

    fn step(&mut self, action: usize) -> Result<EnvStep> {
        check_action(&self.spec, action)?;
        Ok(EnvStep {
            next_state: self.data.features[self.row].to_vec(),
            reward: binary_reward(action == self.correct_action()),
            terminal: true,
        })
    }
}

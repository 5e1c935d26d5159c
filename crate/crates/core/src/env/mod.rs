//! Benchmark environments.
//!
//! Every environment emits observations in `[0, 1]^D`, owns its random
//! stream and counts its own episode length. Single-step tasks end every
//! episode after one step.

mod cartpole;
mod mario;
mod mountain_car;
mod multiplexer;
pub mod nchain;
mod teleport;
mod wbc;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

pub use cartpole::{CartPole, CartPoleBounds, CartPoleState};
pub use mario::{Mario, Sprite};
pub use mountain_car::MountainCar;
pub use multiplexer::{multiplexer_answer, Multiplexer};
pub use nchain::NChain;
pub use teleport::Teletransport;
pub use wbc::{Wbc, WbcData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    SingleStep,
    MultiStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub name: String,
    pub state_dim: usize,
    pub action_count: usize,
    /// Maximum episode length in steps.
    pub episode_limit: u64,
    pub reward_range: (f64, f64),
    pub kind: TaskKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvStep {
    pub next_state: Vec<f64>,
    pub reward: f64,
    pub terminal: bool,
}

pub trait Environment: Send {
    fn spec(&self) -> &EnvSpec;

    /// Starts an episode from the environment's usual initial distribution.
    fn reset(&mut self) -> Vec<f64>;

    /// Starts an episode from a state drawn uniformly over the full state
    /// bounds.
    fn reset_uniform(&mut self) -> Vec<f64>;

    fn step(&mut self, action: usize) -> Result<EnvStep>;
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn spec(&self) -> &EnvSpec {
        (**self).spec()
    }
    fn reset(&mut self) -> Vec<f64> {
        (**self).reset()
    }
    fn reset_uniform(&mut self) -> Vec<f64> {
        (**self).reset_uniform()
    }
    fn step(&mut self, action: usize) -> Result<EnvStep> {
        (**self).step(action)
    }
}

pub(crate) fn check_action(spec: &EnvSpec, action: usize) -> Result<()> {
    if action < spec.action_count {
        Ok(())
    } else {
        Err(Error::contract(format!(
            "{}: action {action} out of range 0..{}",
            spec.name, spec.action_count
        )))
    }
}

pub(crate) fn binary_reward(correct: bool) -> f64 {
    if correct {
        1000.0
    } else {
        0.0
    }
}

/// The six benchmark tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvKind {
    #[serde(rename = "rmp6")]
    Rmp6,
    #[serde(rename = "mario")]
    Mario,
    #[serde(rename = "wbc")]
    Wbc,
    #[serde(rename = "16chain")]
    NChain16,
    #[serde(rename = "cartpole")]
    CartPole,
    #[serde(rename = "mountaincar")]
    MountainCar,
}

impl EnvKind {
    pub const ALL: [EnvKind; 6] = [
        EnvKind::Mario,
        EnvKind::Rmp6,
        EnvKind::Wbc,
        EnvKind::NChain16,
        EnvKind::CartPole,
        EnvKind::MountainCar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Rmp6 => "rmp6",
            EnvKind::Mario => "mario",
            EnvKind::Wbc => "wbc",
            EnvKind::NChain16 => "16chain",
            EnvKind::CartPole => "cartpole",
            EnvKind::MountainCar => "mountaincar",
        }
    }

    pub fn is_multi_step(self) -> bool {
        matches!(
            self,
            EnvKind::NChain16 | EnvKind::CartPole | EnvKind::MountainCar
        )
    }

    /// Final-OTM threshold below which a multi-step run counts as diverged.
    pub fn divergence_threshold(self) -> Option<f64> {
        match self {
            EnvKind::NChain16 => Some(1.0),
            EnvKind::CartPole => Some(70.0),
            EnvKind::MountainCar => Some(200.0),
            _ => None,
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown environment `{s}`")))
    }
}

/// Everything needed to construct an environment instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub kind: EnvKind,
    pub teletransport: bool,
    /// WBC data file.
    pub data_path: Option<PathBuf>,
    /// Mario sprite grid; the bundled sprite when absent.
    pub sprite_path: Option<PathBuf>,
    /// nChain slip probability.
    pub slip: f64,
    /// Overrides the task's default episode cap.
    pub episode_limit: Option<u64>,
}

impl EnvConfig {
    pub fn new(kind: EnvKind) -> Self {
        Self {
            kind,
            teletransport: false,
            data_path: None,
            sprite_path: None,
            slip: nchain::DEFAULT_SLIP,
            episode_limit: None,
        }
    }
}

/// Data shared by every repetition of an experiment, loaded once.
#[derive(Debug, Clone, Default)]
pub struct EnvData {
    pub wbc: Option<Arc<WbcData>>,
    pub sprite: Option<Arc<Sprite>>,
}

impl EnvData {
    pub fn load(cfg: &EnvConfig) -> Result<Self> {
        let mut data = EnvData::default();
        match cfg.kind {
            EnvKind::Wbc => {
                let path = cfg.data_path.clone().ok_or_else(|| {
                    Error::Config("wbc needs `env.data_path` (breast-cancer-wisconsin.data)".into())
                })?;
                data.wbc = Some(Arc::new(WbcData::load(&path)?));
            }
            EnvKind::Mario => {
                let sprite = match &cfg.sprite_path {
                    Some(p) => Sprite::load(p)?,
                    None => Sprite::bundled(),
                };
                data.sprite = Some(Arc::new(sprite));
            }
            _ => {}
        }
        Ok(data)
    }
}

/// Builds the environment for one repetition, drawing from the `Env`
/// stream of `seed`.
pub fn make_env(cfg: &EnvConfig, data: &EnvData, seed: u64) -> Result<Box<dyn Environment>> {
    let rng = rng::stream(seed, Stream::Env);
    let mut env: Box<dyn Environment> = match cfg.kind {
        EnvKind::Rmp6 => Box::new(Multiplexer::new(2, rng)),
        EnvKind::Mario => {
            let sprite = data.sprite.clone().unwrap_or_else(|| Arc::new(Sprite::bundled()));
            Box::new(Mario::new(sprite, rng))
        }
        EnvKind::Wbc => {
            let d = data
                .wbc
                .clone()
                .ok_or_else(|| Error::Config("wbc data not loaded".into()))?;
            Box::new(Wbc::new(d, rng))
        }
        EnvKind::NChain16 => Box::new(NChain::new(16, cfg.slip, cfg.episode_limit.unwrap_or(200), rng)),
        EnvKind::CartPole => Box::new(CartPole::new(
            CartPoleBounds::default(),
            cfg.episode_limit.unwrap_or(200),
            rng,
        )),
        EnvKind::MountainCar => Box::new(MountainCar::new(cfg.episode_limit.unwrap_or(500), rng)),
    };
    if cfg.teletransport {
        env = Box::new(Teletransport::new(env));
    }
    Ok(env)
}

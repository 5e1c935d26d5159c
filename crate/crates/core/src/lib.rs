//! XCS with experience replay for real-valued inputs.

pub mod agent;
pub mod classifier;
pub mod env;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod learning;
pub mod matching;
pub mod params;
pub mod population;
pub mod replay;
pub mod rng;
pub mod stats;

pub use classifier::{Classifier, Condition, Interval, LinearModel, Prediction};
pub use env::{EnvConfig, EnvKind, EnvSpec, EnvStep, Environment, TaskKind};
pub use error::{Error, Result};
pub use params::{Hyperparameters, MutationMode, PredictionKind};
pub use population::{ClassifierId, Population};
pub use replay::{Experience, ReplayMemory};
pub use agent::{Agent, Counters, Mode, StepRecord};

//! Experiment configuration in a flat `section.key = value` text format.
//!
//! Blank lines and `#` comments are ignored. Keys under `xcs.` carry the
//! usual XCS symbol names (`N_max`, `theta_GA`, `delta_RLS`, ...). A bare
//! key without its section is accepted when the name is unambiguous.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agent::Mode;
use crate::env::{EnvConfig, EnvKind};
use crate::error::{Error, Result};
use crate::params::{Hyperparameters, MutationMode, PredictionKind};

/// The bundled presets, one per benchmark task.
pub const PRESETS: [(&str, &str); 6] = [
    ("mario", include_str!("../../../../presets/mario.cfg")),
    ("rmp6", include_str!("../../../../presets/rmp6.cfg")),
    ("wbc", include_str!("../../../../presets/wbc.cfg")),
    ("16chain", include_str!("../../../../presets/16chain.cfg")),
    ("cartpole", include_str!("../../../../presets/cartpole.cfg")),
    ("mountaincar", include_str!("../../../../presets/mountaincar.cfg")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub mode: Mode,
    pub hp: Hyperparameters,
    pub repetitions: usize,
    /// Repetition `i` runs with seed `base_seed + i`.
    pub base_seed: u64,
    /// Exploit steps in the reward and system-error sliding means.
    pub reward_window: usize,
    /// Episodes in the OTM sliding mean.
    pub otm_window: usize,
}

impl ExperimentConfig {
    pub fn new(kind: EnvKind) -> Self {
        let mut hp = Hyperparameters::default();
        if kind.is_multi_step() {
            hp.exploration_prob = 0.3;
        }
        Self {
            env: EnvConfig::new(kind),
            mode: Mode::Standard,
            hp,
            repetitions: 30,
            base_seed: 1,
            reward_window: 100,
            otm_window: 100,
        }
    }

    /// A bundled preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        let text = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                Error::Config(format!("unknown preset `{name}` (one of {})", names.join(", ")))
            })?;
        Self::parse(text, Path::new(name))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses config text; `origin` only labels error messages.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut env = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                reason: format!("expected `key = value`, found `{line}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            let key = canonical_key(k).map_err(|reason| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                reason,
            })?;
            if key == "experiment.env" {
                env = Some(v.parse::<EnvKind>()?);
            }
            pairs.push((i + 1, key, v.to_string()));
        }
        let kind = env.ok_or_else(|| Error::Parse {
            path: origin.to_path_buf(),
            line: 0,
            reason: "missing `experiment.env`".into(),
        })?;
        let mut cfg = Self::new(kind);
        let mut rule = None;
        for (line, key, v) in pairs {
            let wrap = |e: Error| Error::Parse {
                path: origin.to_path_buf(),
                line,
                reason: e.to_string(),
            };
            if key == "xcs.learning_rule" {
                rule = Some(v);
                continue;
            }
            cfg.set_canonical(key, &v).map_err(wrap)?;
        }
        if let Some(rule) = rule {
            cfg.check_learning_rule(&rule)?;
        }
        Ok(cfg)
    }

    fn check_learning_rule(&self, rule: &str) -> Result<()> {
        let expected = learning_rule(self.hp.prediction);
        if !rule.eq_ignore_ascii_case(expected) {
            return Err(Error::Config(format!(
                "`xcs.learning_rule = {rule}` does not fit `xcs.prediction = {}` (expects {expected})",
                prediction_name(self.hp.prediction)
            )));
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = canonical_key(key).map_err(Error::Config)?;
        if key == "xcs.learning_rule" {
            return self.check_learning_rule(value);
        }
        self.set_canonical(key, value)
    }

    /// Applies a `key=value` string.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{pair}` is not `key=value`")))?;
        self.set(k.trim(), v.trim())
    }

    fn set_canonical(&mut self, key: &'static str, v: &str) -> Result<()> {
        let hp = &mut self.hp;
        match key {
            "experiment.env" => {
                let kind: EnvKind = v.parse()?;
                if kind != self.env.kind {
                    self.env = EnvConfig {
                        kind,
                        ..self.env.clone()
                    };
                }
            }
            "experiment.mode" => self.mode = v.parse()?,
            "experiment.repetitions" => self.repetitions = num(key, v)?,
            "experiment.seed" => self.base_seed = num(key, v)?,
            "experiment.steps" => hp.max_learning_steps = num(key, v)?,
            "experiment.reward_window" => self.reward_window = num(key, v)?,
            "experiment.otm_window" => self.otm_window = num(key, v)?,
            "env.teletransport" => self.env.teletransport = boolean(key, v)?,
            "env.data_path" => self.env.data_path = opt_path(v),
            "env.sprite_path" => self.env.sprite_path = opt_path(v),
            "env.slip" => self.env.slip = num(key, v)?,
            "env.episode_limit" => {
                self.env.episode_limit = if v.is_empty() || v == "default" {
                    None
                } else {
                    Some(num(key, v)?)
                }
            }
            "xcs.N_max" => hp.n_max = num(key, v)?,
            "xcs.beta" => hp.beta = num(key, v)?,
            "xcs.gamma" => hp.gamma = num(key, v)?,
            "xcs.alpha" => hp.alpha = num(key, v)?,
            "xcs.epsilon0" => hp.epsilon0 = num(key, v)?,
            "xcs.nu" => hp.nu = num(key, v)?,
            "xcs.theta_del" => hp.theta_del = num(key, v)?,
            "xcs.delta" => hp.delta = num(key, v)?,
            "xcs.theta_mna" => hp.theta_mna = num(key, v)?,
            "xcs.p_ini" => hp.p_ini = num(key, v)?,
            "xcs.epsilon_ini" => hp.epsilon_ini = num(key, v)?,
            "xcs.F_ini" => hp.f_ini = num(key, v)?,
            "xcs.mu" => hp.mu = num(key, v)?,
            "xcs.chi" => hp.chi = num(key, v)?,
            "xcs.theta_GA" => hp.theta_ga = num(key, v)?,
            "xcs.theta_sub" => hp.theta_sub = num(key, v)?,
            "xcs.ga_selection" => {
                if !v.eq_ignore_ascii_case("TS") {
                    return Err(Error::Config(format!(
                        "`{key} = {v}`: only tournament selection (TS) is supported"
                    )));
                }
            }
            "xcs.tournament_size" => hp.tournament_size = num(key, v)?,
            "xcs.tournament_replacement" => hp.tournament_replacement = boolean(key, v)?,
            "xcs.F_reduce" => hp.f_reduce = num(key, v)?,
            "xcs.epsilon_reduce" => hp.epsilon_reduce = num(key, v)?,
            "xcs.condition" => {
                if !v.eq_ignore_ascii_case("UBR") {
                    return Err(Error::Config(format!(
                        "`{key} = {v}`: only unordered-bound intervals (UBR) are supported"
                    )));
                }
            }
            "xcs.mutation" => {
                hp.mutation = match v {
                    "unrestricted" => MutationMode::Unrestricted,
                    "restricted" => MutationMode::Restricted,
                    _ => return Err(Error::Config(format!("`{key} = {v}`: unrestricted|restricted"))),
                }
            }
            "xcs.prediction" => {
                hp.prediction = match v {
                    "scalar" => PredictionKind::Scalar,
                    "linear" => PredictionKind::Linear,
                    _ => return Err(Error::Config(format!("`{key} = {v}`: scalar|linear"))),
                }
            }
            "xcs.m0" => hp.m0 = num(key, v)?,
            "xcs.r0" => hp.r0 = num(key, v)?,
            "xcs.delta_RLS" => hp.delta_rls = num(key, v)?,
            "xcs.lambda_RLS" => hp.lambda_rls = num(key, v)?,
            "xcs.x0" => hp.x0 = num(key, v)?,
            "xcs.exploration_prob" => hp.exploration_prob = num(key, v)?,
            "er.capacity" => hp.rm_capacity = num(key, v)?,
            "er.minibatch" => hp.minibatch = num(key, v)?,
            "er.warmup" => hp.warmup_steps = num(key, v)?,
            "er.with_replacement" => hp.sample_with_replacement = boolean(key, v)?,
            _ => unreachable!("canonical key table and setter disagree on `{key}`"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("`experiment.repetitions` must be at least 1".into()));
        }
        if self.reward_window == 0 || self.otm_window == 0 {
            return Err(Error::Config("metric windows must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.env.slip) {
            return Err(Error::Config("`env.slip` must lie in [0, 1]".into()));
        }
        if self.env.episode_limit == Some(0) {
            return Err(Error::Config("`env.episode_limit` must be positive".into()));
        }
        if !self.hp.sample_with_replacement {
            return Err(Error::Config(
                "`er.with_replacement = false` is not supported by the replay loop".into(),
            ));
        }
        self.hp.validate()
    }

    /// Resolves a relative data or sprite path against `data_dir`.
    pub fn resolve_paths(&mut self, data_dir: &Path) {
        for p in [&mut self.env.data_path, &mut self.env.sprite_path]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = data_dir.join(&*p);
            }
        }
    }

    /// The full resolved configuration in the same text format; parsing it
    /// back yields an identical config.
    pub fn to_text(&self) -> String {
        let hp = &self.hp;
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("experiment.env", self.env.kind.to_string());
        put("experiment.mode", self.mode.to_string());
        put("experiment.repetitions", self.repetitions.to_string());
        put("experiment.seed", self.base_seed.to_string());
        put("experiment.steps", hp.max_learning_steps.to_string());
        put("experiment.reward_window", self.reward_window.to_string());
        put("experiment.otm_window", self.otm_window.to_string());
        put("env.teletransport", self.env.teletransport.to_string());
        put("env.data_path", path(&self.env.data_path));
        put("env.sprite_path", path(&self.env.sprite_path));
        put("env.slip", self.env.slip.to_string());
        put(
            "env.episode_limit",
            self.env.episode_limit.map_or("default".into(), |l| l.to_string()),
        );
        put("xcs.N_max", hp.n_max.to_string());
        put("xcs.beta", hp.beta.to_string());
        put("xcs.gamma", hp.gamma.to_string());
        put("xcs.alpha", hp.alpha.to_string());
        put("xcs.epsilon0", hp.epsilon0.to_string());
        put("xcs.nu", hp.nu.to_string());
        put("xcs.theta_del", hp.theta_del.to_string());
        put("xcs.delta", hp.delta.to_string());
        put("xcs.theta_mna", hp.theta_mna.to_string());
        put("xcs.p_ini", hp.p_ini.to_string());
        put("xcs.epsilon_ini", hp.epsilon_ini.to_string());
        put("xcs.F_ini", hp.f_ini.to_string());
        put("xcs.mu", hp.mu.to_string());
        put("xcs.chi", hp.chi.to_string());
        put("xcs.theta_GA", hp.theta_ga.to_string());
        put("xcs.theta_sub", hp.theta_sub.to_string());
        put("xcs.ga_selection", "TS".into());
        put("xcs.tournament_size", hp.tournament_size.to_string());
        put("xcs.tournament_replacement", hp.tournament_replacement.to_string());
        put("xcs.F_reduce", hp.f_reduce.to_string());
        put("xcs.epsilon_reduce", hp.epsilon_reduce.to_string());
        put("xcs.condition", "UBR".into());
        put(
            "xcs.mutation",
            match hp.mutation {
                MutationMode::Unrestricted => "unrestricted",
                MutationMode::Restricted => "restricted",
            }
            .into(),
        );
        put("xcs.m0", hp.m0.to_string());
        put("xcs.r0", hp.r0.to_string());
        put("xcs.prediction", prediction_name(hp.prediction).into());
        put("xcs.learning_rule", learning_rule(hp.prediction).into());
        put("xcs.delta_RLS", hp.delta_rls.to_string());
        put("xcs.lambda_RLS", hp.lambda_rls.to_string());
        put("xcs.x0", hp.x0.to_string());
        put("xcs.exploration_prob", hp.exploration_prob.to_string());
        put("er.capacity", hp.rm_capacity.to_string());
        put("er.minibatch", hp.minibatch.to_string());
        put("er.warmup", hp.warmup_steps.to_string());
        put("er.with_replacement", hp.sample_with_replacement.to_string());
        s
    }
}

/// Every recognised key.
pub const KEYS: &[&str] = &[
    "experiment.env",
    "experiment.mode",
    "experiment.repetitions",
    "experiment.seed",
    "experiment.steps",
    "experiment.reward_window",
    "experiment.otm_window",
    "env.teletransport",
    "env.data_path",
    "env.sprite_path",
    "env.slip",
    "env.episode_limit",
    "xcs.N_max",
    "xcs.beta",
    "xcs.gamma",
    "xcs.alpha",
    "xcs.epsilon0",
    "xcs.nu",
    "xcs.theta_del",
    "xcs.delta",
    "xcs.theta_mna",
    "xcs.p_ini",
    "xcs.epsilon_ini",
    "xcs.F_ini",
    "xcs.mu",
    "xcs.chi",
    "xcs.theta_GA",
    "xcs.theta_sub",
    "xcs.ga_selection",
    "xcs.tournament_size",
    "xcs.tournament_replacement",
    "xcs.F_reduce",
    "xcs.epsilon_reduce",
    "xcs.condition",
    "xcs.mutation",
    "xcs.m0",
    "xcs.r0",
    "xcs.prediction",
    "xcs.learning_rule",
    "xcs.delta_RLS",
    "xcs.lambda_RLS",
    "xcs.x0",
    "xcs.exploration_prob",
    "er.capacity",
    "er.minibatch",
    "er.warmup",
    "er.with_replacement",
];

fn canonical_key(k: &str) -> std::result::Result<&'static str, String> {
    if let Some(&key) = KEYS.iter().find(|&&key| key == k) {
        return Ok(key);
    }
    if !k.contains('.') {
        let hits: Vec<&'static str> = KEYS
            .iter()
            .copied()
            .filter(|key| key.split_once('.').is_some_and(|(_, name)| name == k))
            .collect();
        if hits.len() == 1 {
            return Ok(hits[0]);
        }
    }
    Err(format!("unknown key `{k}`"))
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}`")))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{key}`: expected true or false, found `{v}`"))),
    }
}

fn opt_path(v: &str) -> Option<PathBuf> {
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn prediction_name(k: PredictionKind) -> &'static str {
    match k {
        PredictionKind::Scalar => "scalar",
        PredictionKind::Linear => "linear",
    }
}

fn learning_rule(k: PredictionKind) -> &'static str {
    match k {
        PredictionKind::Scalar => "WH",
        PredictionKind::Linear => "RLS",
    }
}

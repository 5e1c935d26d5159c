use std::path::Path;
use std::sync::Arc;

use rand::Rng;

use super::{binary_reward, check_action, EnvSpec, EnvStep, Environment, TaskKind};
use crate::error::{Error, Result};
use crate::rng::Rng as StreamRng;

pub const SPRITE_SIZE: usize = 16;
pub const SPRITE_COLORS: usize = 7;

const BUNDLED: &str = include_str!("../../data/mario.txt");

/// A 16x16 grid of color indices `0..7`, row-major with row 0 on top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sprite {
    cells: [[u8; SPRITE_SIZE]; SPRITE_SIZE],
}

impl Sprite {
    /// The sprite shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED, Path::new("<bundled mario.txt>")).expect("bundled sprite is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses 16 non-empty lines of 16 whitespace-separated integers in
    /// `0..7`. Lines starting with `#` are ignored. All seven colors must
    /// occur.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, reason: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let mut cells = [[0u8; SPRITE_SIZE]; SPRITE_SIZE];
        let mut row = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if row == SPRITE_SIZE {
                return Err(err(lineno + 1, "more than 16 rows".into()));
            }
            let values: Vec<&str> = line.split_whitespace().collect();
            if values.len() != SPRITE_SIZE {
                return Err(err(lineno + 1, format!("expected 16 values, found {}", values.len())));
            }
            for (col, v) in values.iter().enumerate() {
                let c: u8 = v
                    .parse()
                    .map_err(|_| err(lineno + 1, format!("`{v}` is not an integer")))?;
                if c as usize >= SPRITE_COLORS {
                    return Err(err(lineno + 1, format!("color {c} outside 0..7")));
                }
                cells[row][col] = c;
            }
            row += 1;
        }
        if row != SPRITE_SIZE {
            return Err(err(text.lines().count(), format!("expected 16 rows, found {row}")));
        }
        let sprite = Self { cells };
        if sprite.distinct_colors() != SPRITE_COLORS {
            return Err(err(0, "sprite must use all seven colors".into()));
        }
        Ok(sprite)
    }

    pub fn color(&self, col: usize, row: usize) -> usize {
        self.cells[row][col] as usize
    }

    pub fn distinct_colors(&self) -> usize {
        let mut seen = [false; 256];
        for r in &self.cells {
            for &c in r {
                seen[c as usize] = true;
            }
        }
        seen.iter().filter(|&&b| b).count()
    }

    /// Cell `(column, row)` under the point `(x, y)` of the unit square.
    pub fn cell_of(x: f64, y: f64) -> (usize, usize) {
        let idx = |v: f64| ((v * SPRITE_SIZE as f64).floor() as usize).min(SPRITE_SIZE - 1);
        (idx(x), idx(y))
    }
}

/// Classify a point of the unit square by the sprite color under it.
pub struct Mario {
    spec: EnvSpec,
    sprite: Arc<Sprite>,
    state: [f64; 2],
    rng: StreamRng,
}

impl Mario {
    pub fn new(sprite: Arc<Sprite>, rng: StreamRng) -> Self {
        Self {
            spec: EnvSpec {
                name: "mario".into(),
                state_dim: 2,
                action_count: SPRITE_COLORS,
                episode_limit: 1,
                reward_range: (0.0, 1000.0),
                kind: TaskKind::SingleStep,
            },
            sprite,
            state: [0.0; 2],
            rng,
        }
    }

    pub fn correct_action(&self) -> usize {
        let (c, r) = Sprite::cell_of(self.state[0], self.state[1]);
        self.sprite.color(c, r)
    }

    pub fn set_state(&mut self, x: f64, y: f64) {
        self.state = [x, y];
    }
}

impl Environment for Mario {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self) -> Vec<f64> {
        self.state = [self.rng.random(), self.rng.random()];
        self.state.to_vec()
    }

    fn reset_uniform(&mut self) -> Vec<f64> {
        self.reset()
    }

    fn step(&mut self, action: usize) -> Result<EnvStep> {
        check_action(&self.spec, action)?;
        Ok(EnvStep {
            next_state: self.state.to_vec(),
            reward: binary_reward(action == self.correct_action()),
            terminal: true,
        })
    }
}

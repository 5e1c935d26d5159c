//! The rule population.
//!
//! Classifiers live in generation-tagged slots so that match and action
//! sets (lists of [`ClassifierId`]) stay valid across insertions and
//! deletions: an id whose rule was deleted simply stops resolving. A flat
//! copy of every live condition's lower/upper bounds makes matching a
//! linear scan.

use crate::classifier::Classifier;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassifierId {
    index: u32,
    generation: u32,
}

#[derive(Debug, Clone)]
struct Slot {
    generation: u32,
    classifier: Option<Classifier>,
}

#[derive(Debug, Clone)]
pub struct Population {
    dim: usize,
    max_size: usize,
    slots: Vec<Slot>,
    free: Vec<u32>,
    /// `2 * dim` bounds per slot, lower then upper. Dead slots hold an
    /// empty interval so they never match.
    bounds: Vec<f64>,
    numerosity: usize,
    macro_count: usize,
}

impl Population {
    pub fn new(dim: usize, max_size: usize) -> Self {
        Self {
            dim,
            max_size,
            slots: Vec::new(),
            free: Vec::new(),
            bounds: Vec::new(),
            numerosity: 0,
            macro_count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// Sum of numerosities (micro-classifier count).
    pub fn numerosity_sum(&self) -> usize {
        self.numerosity
    }

    /// Number of distinct rules (macro-classifiers).
    pub fn macro_count(&self) -> usize {
        self.macro_count
    }

    pub fn is_empty(&self) -> bool {
        self.macro_count == 0
    }

    pub fn over_capacity(&self) -> bool {
        self.numerosity > self.max_size
    }

    /// Appends `cl` as a new macro-classifier without any deduplication.
    pub fn insert(&mut self, cl: Classifier) -> Result<ClassifierId> {
        if cl.condition.dim() != self.dim {
            return Err(Error::contract(format!(
                "classifier has {} dimensions, population expects {}",
                cl.condition.dim(),
                self.dim
            )));
        }
        if cl.numerosity == 0 {
            return Err(Error::contract("classifier numerosity must be positive"));
        }
        self.numerosity += cl.numerosity as usize;
        self.macro_count += 1;
        let index = match self.free.pop() {
            Some(i) => i as usize,
            None => {
                self.slots.push(Slot {
                    generation: 0,
                    classifier: None,
                });
                self.bounds.resize(self.bounds.len() + 2 * self.dim, 0.0);
                self.slots.len() - 1
            }
        };
        let off = 2 * self.dim * index;
        for (d, iv) in cl.condition.bounds.iter().enumerate() {
            self.bounds[off + d] = iv.lower();
            self.bounds[off + self.dim + d] = iv.upper();
        }
        let slot = &mut self.slots[index];
        slot.classifier = Some(cl);
        Ok(ClassifierId {
            index: index as u32,
            generation: slot.generation,
        })
    }

    pub fn get(&self, id: ClassifierId) -> Option<&Classifier> {
        self.slots
            .get(id.index as usize)
            .filter(|s| s.generation == id.generation)
            .and_then(|s| s.classifier.as_ref())
    }

    /// Mutable access. Conditions must not be edited through this handle.
    pub fn get_mut(&mut self, id: ClassifierId) -> Option<&mut Classifier> {
        self.slots
            .get_mut(id.index as usize)
            .filter(|s| s.generation == id.generation)
            .and_then(|s| s.classifier.as_mut())
    }

    pub fn contains(&self, id: ClassifierId) -> bool {
        self.get(id).is_some()
    }

    /// Adds `n` to a rule's numerosity.
    pub fn add_numerosity(&mut self, id: ClassifierId, n: u32) -> Result<()> {
        let cl = self
            .get_mut(id)
            .ok_or_else(|| Error::contract("numerosity change on a deleted rule"))?;
        cl.numerosity += n;
        self.numerosity += n as usize;
        Ok(())
    }

    /// Removes one micro-classifier; the rule disappears at numerosity 0.
    /// Returns true when the macro-classifier was removed.
    pub fn remove_one(&mut self, id: ClassifierId) -> Result<bool> {
        let cl = self
            .get_mut(id)
            .ok_or_else(|| Error::contract("deletion of a deleted rule"))?;
        cl.numerosity -= 1;
        let gone = cl.numerosity == 0;
        self.numerosity -= 1;
        if gone {
            self.release(id.index as usize);
        }
        Ok(gone)
    }

    /// Removes a macro-classifier entirely.
    pub fn remove(&mut self, id: ClassifierId) -> Option<Classifier> {
        let num = self.get(id)?.numerosity as usize;
        self.numerosity -= num;
        Some(self.release(id.index as usize))
    }

    fn release(&mut self, index: usize) -> Classifier {
        let slot = &mut self.slots[index];
        let cl = slot.classifier.take().expect("live slot");
        slot.generation = slot.generation.wrapping_add(1);
        let off = 2 * self.dim * index;
        for d in 0..self.dim {
            self.bounds[off + d] = f64::INFINITY;
            self.bounds[off + self.dim + d] = f64::NEG_INFINITY;
        }
        self.free.push(index as u32);
        self.macro_count -= 1;
        cl
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassifierId, &Classifier)> {
        self.slots.iter().enumerate().filter_map(|(i, s)| {
            s.classifier.as_ref().map(|cl| {
                (
                    ClassifierId {
                        index: i as u32,
                        generation: s.generation,
                    },
                    cl,
                )
            })
        })
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (ClassifierId, &mut Classifier)> {
        self.slots.iter_mut().enumerate().filter_map(|(i, s)| {
            let generation = s.generation;
            s.classifier.as_mut().map(|cl| {
                (
                    ClassifierId {
                        index: i as u32,
                        generation,
                    },
                    cl,
                )
            })
        })
    }

    pub fn ids(&self) -> Vec<ClassifierId> {
        self.iter().map(|(id, _)| id).collect()
    }

    /// Ids of all rules whose condition contains `state`, in slot order.
    pub fn matching(&self, state: &[f64]) -> Result<Vec<ClassifierId>> {
        if state.len() != self.dim {
            return Err(Error::contract(format!(
                "state has {} dimensions, population expects {}",
                state.len(),
                self.dim
            )));
        }
        let mut out = Vec::new();
        let stride = 2 * self.dim;
        for (i, b) in self.bounds.chunks_exact(stride).enumerate() {
            let (lo, hi) = b.split_at(self.dim);
            let hit = state
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&x, (&l, &h))| l <= x && x <= h);
            if hit {
                out.push(ClassifierId {
                    index: i as u32,
                    generation: self.slots[i].generation,
                });
            }
        }
        Ok(out)
    }

    /// A rule with the same condition and action as `cl`, if any.
    pub fn find_identical(&self, cl: &Classifier) -> Option<ClassifierId> {
        self.iter().find(|(_, o)| o.same_rule(cl)).map(|(id, _)| id)
    }

    /// Numerosity-weighted mean condition volume.
    pub fn generality(&self) -> f64 {
        if self.numerosity == 0 {
            return 0.0;
        }
        let weighted: f64 = self
            .iter()
            .map(|(_, cl)| cl.condition.volume() * cl.numerosity as f64)
            .sum();
        weighted / self.numerosity as f64
    }

    /// Recomputes the cached counters from scratch; test helper.
    pub fn check_consistency(&self) -> bool {
        let num: usize = self.iter().map(|(_, c)| c.numerosity as usize).sum();
        let mac = self.iter().count();
        num == self.numerosity && mac == self.macro_count
    }
}

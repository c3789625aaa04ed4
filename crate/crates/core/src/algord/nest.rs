use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::special::alive_vertices;
use super::{LimitSystem, Refutation};
use crate::diagram::{realize_nest_system, NestStage, OrderedBratteliDiagram};
use crate::error::{Error, Result};
use crate::exact::matrix::IntVec;

/// Realised stages of an ordered diagram, with one block per minimal
/// diagonal projection.
#[derive(Debug, Clone)]
pub struct OrderedNestSystem {
    name: String,
    diagram: OrderedBratteliDiagram,
    stages: Vec<NestStage>,
    injective_envelope: bool,
    alive: Option<Vec<bool>>,
}

impl OrderedNestSystem {
    /// Realises stages `0..=depth`, repeating a stationary step as needed.
    pub fn new(name: impl Into<String>, d: &OrderedBratteliDiagram, depth: usize) -> Result<Self> {
        let diagram = d.extend_to(depth)?;
        let stages = realize_nest_system(&diagram, depth)?;
        let under = diagram.underlying();
        let injective_envelope = under.steps().iter().all(|m| m.rank() == m.cols());
        let alive = diagram.is_stationary().then(|| alive_vertices(&diagram.orders()[0]));
        Ok(OrderedNestSystem {
            name: name.into(),
            diagram,
            stages,
            injective_envelope,
            alive,
        })
    }

    pub fn diagram(&self) -> &OrderedBratteliDiagram {
        &self.diagram
    }

    pub fn stages(&self) -> &[NestStage] {
        &self.stages
    }

    fn stage(&self, k: usize) -> Result<&NestStage> {
        self.stages.get(k).ok_or(Error::Stage {
            stage: k,
            available: self.stages.len() - 1,
        })
    }

    /// Class of the minimal projection at `position` of stage `k`.
    pub fn point_class(&self, k: usize, position: usize) -> Result<IntVec> {
        let n = self.stage(k)?.algebra.n();
        if position >= n {
            return Err(Error::Shape(format!("position {position} at a stage of size {n}")));
        }
        let mut v = vec![BigInt::zero(); n];
        v[position] = BigInt::from(1);
        Ok(v)
    }
}

impl LimitSystem for OrderedNestSystem {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn unit(&self) -> IntVec {
        vec![BigInt::from(1); self.stages[0].algebra.n()]
    }

    fn max_stage(&self) -> Option<usize> {
        Some(self.stages.len() - 1)
    }

    fn width(&self, k: usize) -> Result<usize> {
        Ok(self.stage(k)?.algebra.n())
    }

    fn push(&self, k: usize, v: &[BigInt]) -> Result<IntVec> {
        let e = self.stage(k)?.embedding.as_ref().ok_or(Error::Stage {
            stage: k + 1,
            available: k,
        })?;
        let mut out = vec![BigInt::zero(); self.stage(k + 1)?.algebra.n()];
        for (i, img) in e.images().iter().enumerate() {
            for &j in img {
                out[j] += &v[i];
            }
        }
        Ok(out)
    }

    fn relation(&self, k: usize) -> Result<Vec<Vec<bool>>> {
        Ok(self.stage(k)?.algebra.relation().to_vec())
    }

    /// Within each summand, every tail of `q` must dominate that of `p`.
    fn transport_exists(&self, k: usize, p: &[BigInt], q: &[BigInt]) -> Result<bool> {
        let s = self.stage(k)?;
        for (w, &off) in s.offsets.iter().enumerate() {
            let mut tail = BigInt::zero();
            for x in (off..off + s.sizes[w]).rev() {
                tail += &q[x] - &p[x];
                if tail.is_negative() {
                    return Ok(false);
                }
            }
            if !tail.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn envelope(&self, k: usize, v: &[BigInt]) -> Option<IntVec> {
        if !self.injective_envelope {
            return None;
        }
        let s = self.stages.get(k)?;
        Some(
            s.offsets
                .iter()
                .zip(&s.sizes)
                .map(|(&o, &n)| v[o..o + n].iter().sum())
                .collect(),
        )
    }

    fn future_key(&self, _k: usize) -> Option<usize> {
        None
    }

    /// The right-most point of a summand lying on an infinite chain of
    /// right-most points receives nothing from any other point.
    fn obstruction(&self, k: usize, p: &[BigInt], q: &[BigInt]) -> Option<Refutation> {
        let alive = self.alive.as_ref()?;
        let s = self.stages.get(k)?;
        for (w, (&o, &n)) in s.offsets.iter().zip(&s.sizes).enumerate() {
            let x = o + n - 1;
            if alive[w] && p[x] > q[x] {
                return Some(Refutation::SpecialGerm {
                    stage: k,
                    vertex: w,
                    position: x,
                });
            }
        }
        None
    }
}

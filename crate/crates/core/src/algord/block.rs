use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{LimitSystem, Refutation};
use crate::diagram::BratteliDiagram;
use crate::dimgroup::InducedMap;
use crate::error::{Error, Result};
use crate::exact::matrix::{IntMatrix, IntVec};
use crate::fdcsl::PreorderAlgebra;

/// Linear envelope: `maps[k]` carries stage-`k` block counts into the
/// envelope's stage `k`, whose connecting maps are `steps[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Envelope {
    #[serde(with = "crate::exact::decimal::vec")]
    pub unit: IntVec,
    pub maps: Vec<IntMatrix>,
    pub steps: Vec<IntMatrix>,
}

/// Block-level system whose push maps, relations and envelope data are
/// eventually periodic: index `k` reads entry `k` below `pre`, and entry
/// `pre + (k - pre) % period` beyond.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSystem {
    name: String,
    #[serde(with = "crate::exact::decimal::vec")]
    unit: IntVec,
    pre: usize,
    steps: Vec<IntMatrix>,
    rels: Vec<Vec<Vec<bool>>>,
    #[serde(skip)]
    closed: Vec<Option<Vec<Vec<usize>>>>,
    envelope: Option<Envelope>,
}

const CLOSED_SET_LIMIT: usize = 12;

/// Sets `U` with `j in U, rel[i][j] => i in U`.
fn closed_sets(rel: &[Vec<bool>]) -> Option<Vec<Vec<usize>>> {
    let n = rel.len();
    if n > CLOSED_SET_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let inside = |i: usize| mask & (1 << i) != 0;
        let closed = (0..n).all(|j| !inside(j) || (0..n).all(|i| !rel[i][j] || inside(i)));
        if closed && mask != (1u32 << n) - 1 {
            out.push((0..n).filter(|&i| inside(i)).collect());
        }
    }
    Some(out)
}

fn is_preorder(rel: &[Vec<bool>]) -> bool {
    PreorderAlgebra::from_matrix(rel.to_vec()).is_ok()
}

impl BlockSystem {
    pub fn periodic(
        name: impl Into<String>,
        unit: IntVec,
        steps: Vec<IntMatrix>,
        rels: Vec<Vec<Vec<bool>>>,
        pre: usize,
        envelope: Option<Envelope>,
    ) -> Result<Self> {
        if steps.is_empty() || steps.len() != rels.len() || pre >= steps.len() {
            return Err(Error::Shape(format!(
                "{} steps, {} relations, preperiod {pre}",
                steps.len(),
                rels.len()
            )));
        }
        let len = steps.len();
        for k in 0..len {
            let next = if k + 1 < len { k + 1 } else { pre };
            let (m, w) = (&steps[k], rels[k].len());
            if m.cols() != w || m.rows() != rels[next].len() {
                return Err(Error::Shape(format!("step {k} is {}x{} between widths {w} and {}", m.rows(), m.cols(), rels[next].len())));
            }
            if !is_preorder(&rels[k]) {
                return Err(Error::Relation(format!("stage {k} relation is not a preorder")));
            }
            m.require_nonnegative()?;
        }
        if unit.len() != rels[0].len() || unit.iter().any(|u| !u.is_positive()) {
            return Err(Error::Shape("unit must be positive with one entry per block".into()));
        }
        let mut envelope = envelope;
        if let Some(env) = &envelope {
            if env.maps.len() != len || env.steps.len() != len {
                return Err(Error::Shape("envelope data must follow the same periodic indexing".into()));
            }
            for k in 0..len {
                let next = if k + 1 < len { k + 1 } else { pre };
                if env.maps[next].mul(&steps[k])? != env.steps[k].mul(&env.maps[k])? {
                    return Err(Error::Diagram(format!("envelope square at stage {k} does not commute")));
                }
            }
            if env.maps[0].mul_vec(&unit)? != env.unit {
                return Err(Error::Diagram("envelope map does not carry the unit to the envelope unit".into()));
            }
            if env.steps.iter().any(|s| s.rank() != s.cols()) {
                envelope = None;
            }
        }
        let closed = rels.iter().map(|r| closed_sets(r)).collect();
        Ok(BlockSystem {
            name: name.into(),
            unit,
            pre,
            steps,
            rels,
            closed,
            envelope,
        })
    }

    /// Constant multiplicity and constant block relation.
    pub fn stationary(
        name: impl Into<String>,
        x: IntMatrix,
        unit: IntVec,
        rel: Vec<Vec<bool>>,
        envelope: Option<(IntMatrix, IntMatrix)>,
    ) -> Result<Self> {
        let env = envelope.map(|(y, s)| {
            let eu = s.mul_vec(&unit).unwrap_or_default();
            Envelope {
                unit: eu,
                maps: vec![s],
                steps: vec![y],
            }
        });
        Self::periodic(name, unit, vec![x], vec![rel], 0, env)
    }

    /// A single algebra with blocks of the given sizes, enveloped by the
    /// full matrix algebra.
    pub fn finite(name: impl Into<String>, algebra: &PreorderAlgebra) -> Result<Self> {
        let sizes = algebra.block_sizes();
        let r = sizes.len();
        let unit: IntVec = sizes.iter().map(|&s| BigInt::from(s)).collect();
        let ones = IntMatrix::from_big_rows(vec![vec![BigInt::one(); r]], r)?;
        Self::stationary(
            name,
            IntMatrix::identity(r),
            unit,
            algebra.block_relation(),
            Some((IntMatrix::identity(1), ones)),
        )
    }

    fn idx(&self, k: usize) -> usize {
        if k < self.steps.len() {
            k
        } else {
            self.pre + (k - self.pre) % (self.steps.len() - self.pre)
        }
    }

    pub fn preperiod(&self) -> usize {
        self.pre
    }

    pub fn period(&self) -> usize {
        self.steps.len() - self.pre
    }

    pub fn step_matrix(&self, k: usize) -> &IntMatrix {
        &self.steps[self.idx(k)]
    }

    pub fn block_relation(&self, k: usize) -> &[Vec<bool>] {
        &self.rels[self.idx(k)]
    }

    pub fn envelope_data(&self) -> Option<&Envelope> {
        self.envelope.as_ref()
    }

    /// The multiplicities as a Bratteli diagram: stationary when the
    /// push map never changes, otherwise the prefix up to `depth`.
    pub fn diagram(&self, depth: usize) -> Result<BratteliDiagram> {
        if self.steps.iter().all(|m| *m == self.steps[0]) {
            return BratteliDiagram::stationary(&self.steps[0], self.unit.clone(), depth);
        }
        BratteliDiagram::new(self.unit.clone(), (0..depth).map(|k| self.step_matrix(k).clone()).collect())
    }

    /// The envelope map as a homomorphism of limit groups.
    pub fn envelope_map(&self, depth: usize) -> Result<Option<InducedMap>> {
        let Some(env) = &self.envelope else { return Ok(None) };
        let src = self.diagram(depth)?;
        let stationary = env.steps.iter().all(|m| *m == env.steps[0]) && env.maps.iter().all(|m| *m == env.maps[0]);
        if stationary && src.is_stationary() {
            let tgt = BratteliDiagram::stationary(&env.steps[0], env.unit.clone(), depth)?;
            return Ok(Some(InducedMap::stationary(src, tgt, env.maps[0].clone())?));
        }
        let tgt = BratteliDiagram::new(
            env.unit.clone(),
            (0..depth).map(|k| env.steps[self.idx(k)].clone()).collect(),
        )?;
        let levels = (0..=depth).map(|k| env.maps[self.idx(k)].clone()).collect();
        Ok(Some(InducedMap::new(src, tgt, levels)?))
    }
}

impl LimitSystem for BlockSystem {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn unit(&self) -> IntVec {
        self.unit.clone()
    }

    fn max_stage(&self) -> Option<usize> {
        None
    }

    fn width(&self, k: usize) -> Result<usize> {
        Ok(self.rels[self.idx(k)].len())
    }

    fn push(&self, k: usize, v: &[BigInt]) -> Result<IntVec> {
        self.step_matrix(k).mul_vec(v)
    }

    fn relation(&self, k: usize) -> Result<Vec<Vec<bool>>> {
        Ok(self.block_relation(k).to_vec())
    }

    fn transport_exists(&self, k: usize, p: &[BigInt], q: &[BigInt]) -> Result<bool> {
        let i = self.idx(k);
        match &self.closed[i] {
            Some(sets) => {
                let total: BigInt = p.iter().zip(q).map(|(a, b)| a - b).sum();
                if !total.is_zero() {
                    return Ok(false);
                }
                Ok(sets.iter().all(|u| {
                    let d: BigInt = u.iter().map(|&b| &p[b] - &q[b]).sum();
                    !d.is_negative()
                }))
            }
            None => Ok(super::transport(&self.rels[i], p, q)?.is_some()),
        }
    }

    fn envelope(&self, k: usize, v: &[BigInt]) -> Option<IntVec> {
        let env = self.envelope.as_ref()?;
        env.maps[self.idx(k)].mul_vec(v).ok()
    }

    fn future_key(&self, k: usize) -> Option<usize> {
        (k >= self.pre).then(|| self.idx(k))
    }

    fn obstruction(&self, _k: usize, _p: &[BigInt], _q: &[BigInt]) -> Option<Refutation> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algord::{limit_order_holds, order_holds_at, OrderVerdict};
    use crate::dimgroup::LimitElement;
    use crate::exact::matrix::int_vec;

    #[test]
    fn closed_sets_of_chain() {
        let rel = PreorderAlgebra::upper_triangular(3).relation().to_vec();
        assert_eq!(closed_sets(&rel).unwrap(), vec![vec![0], vec![0, 1]]);
    }

    #[test]
    fn finite_nest_agrees_with_stage_oracle() {
        let a = PreorderAlgebra::nest(&[1, 2]);
        let sys = BlockSystem::finite("T(1,2)", &a).unwrap();
        let p = LimitElement::from_i64(0, &[1, 0]);
        let q = LimitElement::from_i64(0, &[0, 1]);
        assert!(limit_order_holds(&sys, &p, &q, 4).unwrap().holds());
        let back = limit_order_holds(&sys, &q, &p, 4).unwrap();
        assert!(back.refuted(), "{back:?}");
        let unequal = limit_order_holds(&sys, &p, &LimitElement::from_i64(0, &[1, 1]), 4).unwrap();
        assert!(matches!(unequal, OrderVerdict::Refuted { .. }));
    }

    #[test]
    fn certificates_revalidate_and_persist() {
        let a = PreorderAlgebra::nest(&[1, 1, 1]);
        let sys = BlockSystem::finite("T3", &a).unwrap();
        let p = LimitElement::from_i64(0, &[1, 0, 0]);
        let q = LimitElement::from_i64(0, &[0, 0, 1]);
        let OrderVerdict::Holds { certificate } = limit_order_holds(&sys, &p, &q, 3).unwrap() else {
            panic!()
        };
        assert!(certificate.validate(&sys, &p, &q).unwrap());
        for k in 0..4 {
            let c = order_holds_at(&sys, &p, &q, k).unwrap().unwrap();
            assert!(c.validate(&sys, &p, &q).unwrap());
        }
    }

    #[test]
    fn bad_shapes_rejected() {
        let x = IntMatrix::from_rows(&[[1, 1], [1, 0]]);
        let rel = PreorderAlgebra::diagonal(3).relation().to_vec();
        assert!(BlockSystem::stationary("bad", x, int_vec(&[1, 1]), rel, None).is_err());
    }
}

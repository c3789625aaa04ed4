//! The algebraic order on the scale of a limit algebra, decided by pushing
//! scale classes to finite stages.

mod block;
pub mod closed;
mod cut;
mod fiber;
pub mod gallery;
mod iso;
mod nest;
mod realize;
mod special;

pub use block::{BlockSystem, Envelope};
pub use cut::CutSystem;
pub use fiber::{fiber_equivalence_check, FiberReport};
pub use iso::{
    iso_search, iso_search_with, ChainMap, IsoCertificate, IsoOutcome, Side, DEFAULT_ISO_BUDGET, DEFAULT_ISO_DEPTH,
    DEFAULT_ISO_ROUNDS,
};
pub use nest::OrderedNestSystem;
pub use realize::{realize_relation, unit_algebra, RealizationOutcome, RelationSpec};
pub use special::{brute_force_special_count, distinguish, special_point_exists, Distinction, SpecialPointVerdict};

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dimgroup::LimitElement;
use crate::error::{Error, Result};
use crate::exact::matrix::IntVec;
use crate::fdcsl::{block_transport, Transfer};

pub const DEFAULT_ORDER_DEPTH: usize = 12;

/// A direct system of finite-dimensional algebras presented block-wise:
/// at each stage a preorder on blocks, block capacities, and a linear
/// push map on block-count vectors.
pub trait LimitSystem {
    fn name(&self) -> String;

    /// Block capacities at stage 0.
    fn unit(&self) -> IntVec;

    /// Last available stage, if bounded.
    fn max_stage(&self) -> Option<usize>;

    fn width(&self, k: usize) -> Result<usize>;

    /// Block counts at stage `k` pushed to stage `k + 1`.
    fn push(&self, k: usize, v: &[BigInt]) -> Result<IntVec>;

    /// `rel[i][j]`: units of block `j` may be carried onto units of block `i`.
    fn relation(&self, k: usize) -> Result<Vec<Vec<bool>>>;

    /// Whether a transport from `q` onto `p` exists at stage `k`.
    fn transport_exists(&self, k: usize, p: &[BigInt], q: &[BigInt]) -> Result<bool> {
        Ok(transport(&self.relation(k)?, p, q)?.is_some())
    }

    /// Image in an enveloping system whose connecting maps are injective
    /// from stage `k` on.
    fn envelope(&self, k: usize, v: &[BigInt]) -> Option<IntVec>;

    /// Equal keys at two stages mean identical relations and push maps from
    /// those stages on.
    fn future_key(&self, k: usize) -> Option<usize>;

    /// A stage-independent reason why `q` never carries onto `p`.
    fn obstruction(&self, _k: usize, _p: &[BigInt], _q: &[BigInt]) -> Option<Refutation> {
        None
    }
}

pub(crate) fn to_u128(v: &[BigInt]) -> Result<Vec<u128>> {
    v.iter()
        .map(|x| x.to_u128().ok_or_else(|| Error::TooLarge(format!("block count {x} outside u128"))))
        .collect()
}

fn transport(rel: &[Vec<bool>], p: &[BigInt], q: &[BigInt]) -> Result<Option<Vec<Transfer>>> {
    Ok(block_transport(rel, &to_u128(p)?, &to_u128(q)?))
}

/// Push a stage-`from` vector to stage `to`.
pub fn push_to(sys: &dyn LimitSystem, from: usize, v: &[BigInt], to: usize) -> Result<IntVec> {
    let mut cur = v.to_vec();
    for k in from..to {
        cur = sys.push(k, &cur)?;
    }
    Ok(cur)
}

fn within(v: &[BigInt], cap: &[BigInt]) -> bool {
    v.iter().zip(cap).all(|(x, c)| !x.is_negative() && x <= c)
}

/// First stage up to `depth` at which `e` lies between zero and the unit.
pub fn scale_stage(sys: &dyn LimitSystem, e: &LimitElement, depth: usize) -> Result<Option<usize>> {
    let last = sys.max_stage().map_or(depth, |m| m.min(depth));
    if e.stage > last {
        return Ok(None);
    }
    let mut v = e.vector.clone();
    let mut cap = push_to(sys, 0, &sys.unit(), e.stage)?;
    for k in e.stage..=last {
        if within(&v, &cap) {
            return Ok(Some(k));
        }
        if k < last {
            v = sys.push(k, &v)?;
            cap = sys.push(k, &cap)?;
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitOrderCertificate {
    pub stage: usize,
    #[serde(with = "crate::exact::decimal::vec")]
    pub p: IntVec,
    #[serde(with = "crate::exact::decimal::vec")]
    pub q: IntVec,
    pub transfers: Vec<Transfer>,
}

impl LimitOrderCertificate {
    /// Re-pushes both classes and checks the transport plan.
    pub fn validate(&self, sys: &dyn LimitSystem, p: &LimitElement, q: &LimitElement) -> Result<bool> {
        if self.stage < p.stage || self.stage < q.stage {
            return Ok(false);
        }
        let pv = push_to(sys, p.stage, &p.vector, self.stage)?;
        let qv = push_to(sys, q.stage, &q.vector, self.stage)?;
        if pv != self.p || qv != self.q {
            return Ok(false);
        }
        let rel = sys.relation(self.stage)?;
        let w = rel.len();
        let mut into = vec![BigInt::zero(); w];
        let mut out = vec![BigInt::zero(); w];
        for t in &self.transfers {
            if t.to_block >= w || t.from_block >= w || !rel[t.to_block][t.from_block] {
                return Ok(false);
            }
            into[t.to_block] += BigInt::from(t.count);
            out[t.from_block] += BigInt::from(t.count);
        }
        Ok(into == pv && out == qv)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    /// The classes differ in the enveloping system.
    EnvelopeMismatch {
        stage: usize,
        #[serde(with = "crate::exact::decimal::vec")]
        p: IntVec,
        #[serde(with = "crate::exact::decimal::vec")]
        q: IntVec,
    },
    /// The stage data and the difference vector repeat without a transport.
    Recurrence { first: usize, stage: usize },
    /// `p` covers a special germ that `q` misses.
    SpecialGerm { stage: usize, vertex: usize, position: usize },
    /// A functional that every transport keeps nonnegative is negative on
    /// `p - q`.
    NegativeFunctional { stage: usize, functional: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrderVerdict {
    Holds { certificate: LimitOrderCertificate },
    Refuted { reason: Refutation },
    Inconclusive { depth: usize },
}

impl OrderVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, OrderVerdict::Holds { .. })
    }

    pub fn refuted(&self) -> bool {
        matches!(self, OrderVerdict::Refuted { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            OrderVerdict::Holds { .. } => "holds",
            OrderVerdict::Refuted { .. } => "refuted",
            OrderVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Transport certificate at exactly stage `k`, if one exists there.
pub fn order_holds_at(
    sys: &dyn LimitSystem,
    p: &LimitElement,
    q: &LimitElement,
    k: usize,
) -> Result<Option<LimitOrderCertificate>> {
    let pv = push_to(sys, p.stage, &p.vector, k)?;
    let qv = push_to(sys, q.stage, &q.vector, k)?;
    let cap = push_to(sys, 0, &sys.unit(), k)?;
    if !within(&pv, &cap) || !within(&qv, &cap) {
        return Ok(None);
    }
    let rel = sys.relation(k)?;
    Ok(transport(&rel, &pv, &qv)?.map(|transfers| LimitOrderCertificate {
        stage: k,
        p: pv,
        q: qv,
        transfers,
    }))
}

fn check_shape(sys: &dyn LimitSystem, e: &LimitElement) -> Result<()> {
    let w = sys.width(e.stage)?;
    if e.vector.len() != w {
        return Err(Error::Shape(format!(
            "class of length {} at a stage with {w} blocks",
            e.vector.len()
        )));
    }
    Ok(())
}

/// `p - q` divided by the gcd of its entries. Transport depends on the
/// difference only through homogeneous inequalities.
fn primitive_direction(p: &[BigInt], q: &[BigInt]) -> IntVec {
    let d: IntVec = p.iter().zip(q).map(|(a, b)| a - b).collect();
    let g = d.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        d
    } else {
        d.into_iter().map(|x| x / &g).collect()
    }
}

/// Decides `[p] S [q]`: some partial isometry in the limit algebra has
/// initial projection of class `q` and final projection of class `p`.
pub fn limit_order_holds(
    sys: &dyn LimitSystem,
    p: &LimitElement,
    q: &LimitElement,
    depth: usize,
) -> Result<OrderVerdict> {
    check_shape(sys, p)?;
    check_shape(sys, q)?;
    let start = p.stage.max(q.stage);
    let last = match sys.max_stage() {
        Some(m) => depth.min(m),
        None => depth,
    };
    let mut pv = push_to(sys, p.stage, &p.vector, start)?;
    let mut qv = push_to(sys, q.stage, &q.vector, start)?;
    let mut cap = push_to(sys, 0, &sys.unit(), start)?;
    let mut seen: HashMap<(usize, IntVec), usize> = HashMap::new();
    let mut k = start;
    while k <= last {
        if let (Some(a), Some(b)) = (sys.envelope(k, &pv), sys.envelope(k, &qv)) {
            if a != b {
                return Ok(OrderVerdict::Refuted {
                    reason: Refutation::EnvelopeMismatch { stage: k, p: a, q: b },
                });
            }
        }
        if within(&pv, &cap) && within(&qv, &cap) {
            if sys.transport_exists(k, &pv, &qv)? {
                let transfers = transport(&sys.relation(k)?, &pv, &qv)?
                    .ok_or_else(|| Error::Internal("transport test and plan disagree".into()))?;
                return Ok(OrderVerdict::Holds {
                    certificate: LimitOrderCertificate {
                        stage: k,
                        p: pv,
                        q: qv,
                        transfers,
                    },
                });
            }
            if let Some(reason) = sys.obstruction(k, &pv, &qv) {
                return Ok(OrderVerdict::Refuted { reason });
            }
            if let Some(key) = sys.future_key(k) {
                let d = primitive_direction(&pv, &qv);
                if let Some(&first) = seen.get(&(key, d.clone())) {
                    return Ok(OrderVerdict::Refuted {
                        reason: Refutation::Recurrence { first, stage: k },
                    });
                }
                seen.insert((key, d), k);
            }
        }
        if k == last {
            break;
        }
        pv = sys.push(k, &pv)?;
        qv = sys.push(k, &qv)?;
        cap = sys.push(k, &cap)?;
        k += 1;
    }
    Ok(OrderVerdict::Inconclusive { depth })
}

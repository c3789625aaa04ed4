//! Stationary inclusions `D ⊆ B` given by one multiplicity matrix with a
//! symmetric partition, and the algebras lying between them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algord::{limit_order_holds, BlockSystem, OrderVerdict};
use crate::diagram::BratteliDiagram;
use crate::dimgroup::{InducedMap, LimitElement};
use crate::error::{Error, Result};
use crate::exact::matrix::{IntMatrix, IntVec};
use crate::fdcsl::{enumerate_preorders, PreorderAlgebra};

/// Number of relation iterates scanned for eventual periodicity.
const PERIOD_SCAN: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StationaryPair {
    x: IntMatrix,
    partition: Vec<usize>,
    y: IntMatrix,
    s: IntMatrix,
    #[serde(with = "crate::exact::decimal::vec")]
    unit: IntVec,
}

/// Checks the partial column sums and forms the quotient matrix.
pub fn derive_pair(x: &IntMatrix, partition: &[usize], unit: IntVec) -> Result<StationaryPair> {
    let n = x.require_square()?;
    x.require_nonnegative()?;
    if partition.iter().sum::<usize>() != n || partition.contains(&0) {
        return Err(Error::Shape(format!("partition {partition:?} does not split {n} vertices")));
    }
    if unit.len() != n || unit.iter().any(|u| !u.is_positive()) {
        return Err(Error::Shape("unit must be positive with one entry per vertex".into()));
    }
    let groups = group_ranges(partition);
    let r = partition.len();
    let mut y = IntMatrix::zeros(r, r);
    for (i, gi) in groups.iter().enumerate() {
        for (j, gj) in groups.iter().enumerate() {
            let sum = |col: usize| -> BigInt { gi.clone().map(|v| x[(v, col)].clone()).sum() };
            let first = sum(gj.start);
            for col in gj.clone().skip(1) {
                let other = sum(col);
                if other != first {
                    return Err(Error::PartialColumnSum {
                        i,
                        j,
                        col_a: gj.start,
                        col_b: col,
                        first: first.to_string(),
                        second: other.to_string(),
                    });
                }
            }
            y[(i, j)] = first;
        }
    }
    let mut s = IntMatrix::zeros(r, n);
    for (i, g) in groups.iter().enumerate() {
        for v in g.clone() {
            s[(i, v)] = BigInt::one();
        }
    }
    if s.mul(x)? != y.mul(&s)? {
        return Err(Error::Internal("summation map does not intertwine the pair".into()));
    }
    Ok(StationaryPair {
        x: x.clone(),
        partition: partition.to_vec(),
        y,
        s,
        unit,
    })
}

fn group_ranges(partition: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    partition
        .iter()
        .map(|&k| {
            let r = start..start + k;
            start += k;
            r
        })
        .collect()
}

impl StationaryPair {
    pub fn x(&self) -> &IntMatrix {
        &self.x
    }

    pub fn y(&self) -> &IntMatrix {
        &self.y
    }

    /// Summation map: `(Sx)_i` adds the coordinates in group `i`.
    pub fn s(&self) -> &IntMatrix {
        &self.s
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn unit(&self) -> &IntVec {
        &self.unit
    }

    pub fn groups(&self) -> Vec<std::ops::Range<usize>> {
        group_ranges(&self.partition)
    }

    fn group_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.x.rows()];
        for (i, g) in self.groups().into_iter().enumerate() {
            for v in g {
                out[v] = i;
            }
        }
        out
    }

    pub fn inner(&self, depth: usize) -> Result<BratteliDiagram> {
        BratteliDiagram::stationary(&self.x, self.unit.clone(), depth)
    }

    pub fn outer(&self, depth: usize) -> Result<BratteliDiagram> {
        BratteliDiagram::stationary(&self.y, self.s.mul_vec(&self.unit)?, depth)
    }
}

/// The summation maps as a homomorphism of limit groups.
pub fn s_infinity(p: &StationaryPair, depth: usize) -> Result<InducedMap> {
    InducedMap::stationary(p.inner(depth)?, p.outer(depth)?, p.s.clone())
        .map_err(|e| Error::Internal(format!("commuting square failed: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnimodularityReport {
    #[serde(with = "crate::exact::decimal::int")]
    pub det_x: BigInt,
    #[serde(with = "crate::exact::decimal::int")]
    pub det_y: BigInt,
    /// Whether `det Y` divides `det X`.
    pub divides: bool,
    pub x_unimodular: bool,
    pub y_unimodular: bool,
}

pub fn unimodularity_check(p: &StationaryPair) -> Result<UnimodularityReport> {
    let det_x = p.x.det()?;
    let det_y = p.y.det()?;
    let divides = if det_y.is_zero() {
        det_x.is_zero()
    } else {
        (&det_x % &det_y).is_zero()
    };
    Ok(UnimodularityReport {
        x_unimodular: det_x.abs().is_one(),
        y_unimodular: det_y.abs().is_one(),
        det_x,
        det_y,
        divides,
    })
}

/// A preorder on the vertices of one group, generating stage algebras
/// between the two sides of a pair. Other groups carry the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntermediateSpec {
    pub group: usize,
    /// `relation[a][b]` over the group's vertices in order.
    pub relation: Vec<Vec<bool>>,
}

impl IntermediateSpec {
    pub fn new(p: &StationaryPair, group: usize, relation: &PreorderAlgebra) -> Result<Self> {
        let size = *p
            .partition
            .get(group)
            .ok_or_else(|| Error::Shape(format!("no group {group}")))?;
        if relation.n() != size {
            return Err(Error::Shape(format!("relation on {} points for a group of {size}", relation.n())));
        }
        Ok(IntermediateSpec {
            group,
            relation: relation.relation().to_vec(),
        })
    }

    fn initial(&self, p: &StationaryPair) -> Vec<Vec<bool>> {
        let n = p.x.rows();
        let off = p.groups()[self.group].start;
        let mut rel: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        for (a, row) in self.relation.iter().enumerate() {
            for (b, &on) in row.iter().enumerate() {
                rel[off + a][off + b] |= on;
            }
        }
        rel
    }

    /// Vertex relations of the stage algebras, stages `0..=depth`.
    pub fn stage_relations(&self, p: &StationaryPair, depth: usize) -> Result<Vec<Vec<Vec<bool>>>> {
        let mut out = vec![self.initial(p)];
        for k in 0..depth {
            out.push(next_relation(p, &out[k])?);
        }
        Ok(out)
    }

    /// The generated limit system, with the outer side as envelope.
    pub fn system(&self, p: &StationaryPair) -> Result<BlockSystem> {
        let mut seen: BTreeMap<Vec<Vec<bool>>, usize> = BTreeMap::new();
        let mut rels = vec![self.initial(p)];
        for k in 0..PERIOD_SCAN {
            if let Some(&pre) = seen.get(&rels[k]) {
                rels.truncate(k);
                let steps = vec![p.x.clone(); k];
                let env = crate::algord::Envelope {
                    unit: p.s.mul_vec(&p.unit)?,
                    maps: vec![p.s.clone(); k],
                    steps: vec![p.y.clone(); k],
                };
                return BlockSystem::periodic(
                    format!("intermediate on group {}", self.group),
                    p.unit.clone(),
                    steps,
                    rels,
                    pre,
                    Some(env),
                );
            }
            seen.insert(rels[k].clone(), k);
            let next = next_relation(p, &rels[k])?;
            rels.push(next);
        }
        Err(Error::TooLarge(format!("stage relations not periodic within {PERIOD_SCAN} stages")))
    }
}

/// Copies each unit `(a, b)` of a stage into every summand of the next
/// stage, copy `t` of vertex `a` landing in the `t`-th vertex of the list
/// in which each target vertex `v` appears `X[v][a]` times.
fn next_relation(p: &StationaryPair, rel: &[Vec<bool>]) -> Result<Vec<Vec<bool>>> {
    let n = rel.len();
    let group = p.group_of();
    let groups = p.groups();
    let mut pairs = Vec::new();
    for target in &groups {
        let lists: Vec<Vec<usize>> = (0..n)
            .map(|a| {
                let mut l = Vec::new();
                for v in target.clone() {
                    let m = p.x[(v, a)].to_usize().unwrap_or(0);
                    l.extend(std::iter::repeat(v).take(m));
                }
                l
            })
            .collect();
        for a in 0..n {
            for b in 0..n {
                if a != b && rel[a][b] {
                    if group[a] != group[b] {
                        return Err(Error::Relation(format!("vertices {a} and {b} lie in different groups")));
                    }
                    for (&x, &y) in lists[a].iter().zip(&lists[b]) {
                        pairs.push((x, y));
                    }
                }
            }
        }
    }
    Ok(PreorderAlgebra::closure(n, &pairs)?.relation().to_vec())
}

/// Every preorder on the vertices of `group`.
pub fn enumerate_intermediates(p: &StationaryPair, group: usize) -> Result<Vec<IntermediateSpec>> {
    let size = *p
        .partition
        .get(group)
        .ok_or_else(|| Error::Shape(format!("no group {group}")))?;
    if size > 5 {
        return Err(Error::TooLarge(format!("group of {size} vertices exceeds the enumeration guard of 5")));
    }
    enumerate_preorders(size)?
        .iter()
        .map(|r| IntermediateSpec::new(p, group, r))
        .collect()
}

/// Groups specs whose stage relations agree through `depth`. Classes are
/// listed by first member.
pub fn collapse_detect(p: &StationaryPair, specs: &[IntermediateSpec], depth: usize) -> Result<Vec<Vec<usize>>> {
    let mut classes: BTreeMap<Vec<Vec<Vec<bool>>>, Vec<usize>> = BTreeMap::new();
    let mut order = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        let key = s.stage_relations(p, depth)?;
        let entry = classes.entry(key.clone()).or_default();
        if entry.is_empty() {
            order.push(key);
        }
        entry.push(i);
    }
    Ok(order.into_iter().map(|k| classes.remove(&k).unwrap_or_default()).collect())
}

pub fn intermediate_order_oracle(
    p: &StationaryPair,
    spec: &IntermediateSpec,
    a: &LimitElement,
    b: &LimitElement,
    depth: usize,
) -> Result<OrderVerdict> {
    limit_order_holds(&spec.system(p)?, a, b, depth)
}

//! Bratteli diagrams and ordered Bratteli diagrams as finite prefixes of
//! direct systems, with telescoping and realisation as nest algebras.
//!
//! Multiplicity matrices act on column vectors: entry `(w, v)` counts the
//! edges from vertex `v` at one level to vertex `w` at the next.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::matrix::{IntMatrix, IntVec};
use crate::fdcsl::{MatrixUnitEmbedding, PreorderAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BratteliDiagram {
    #[serde(with = "crate::exact::decimal::vec")]
    unit: IntVec,
    steps: Vec<IntMatrix>,
    generator: Option<IntMatrix>,
}

fn matrix_violations(unit_len: usize, steps: &[IntMatrix]) -> Vec<String> {
    let mut out = Vec::new();
    let mut width = unit_len;
    for (k, m) in steps.iter().enumerate() {
        if m.cols() != width {
            out.push(format!(
                "step {k}: matrix has {} columns but level {k} has {width} vertices",
                m.cols()
            ));
        }
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if m[(r, c)].is_negative() {
                    out.push(format!("step {k}: negative multiplicity at ({r}, {c})"));
                }
            }
            if (0..m.cols()).all(|c| m[(r, c)].is_zero()) {
                out.push(format!("step {k}: vertex {r} of level {} receives no edges", k + 1));
            }
        }
        for c in 0..m.cols() {
            if (0..m.rows()).all(|r| m[(r, c)].is_zero()) {
                out.push(format!("step {k}: vertex {c} of level {k} has no outgoing edges"));
            }
        }
        width = m.rows();
    }
    out
}

impl BratteliDiagram {
    pub fn new(unit: IntVec, steps: Vec<IntMatrix>) -> Result<Self> {
        let d = BratteliDiagram {
            unit,
            steps,
            generator: None,
        };
        if let Some(v) = d.validate().into_iter().next() {
            return Err(Error::Diagram(v));
        }
        Ok(d)
    }

    /// Constant multiplicity `x` repeated for `depth` steps.
    pub fn stationary(x: &IntMatrix, unit: IntVec, depth: usize) -> Result<Self> {
        let n = x.require_square()?;
        x.require_nonnegative()?;
        if unit.len() != n {
            return Err(Error::Shape(format!("unit of length {} for {n}x{n} matrix", unit.len())));
        }
        let d = BratteliDiagram {
            unit,
            steps: vec![x.clone(); depth],
            generator: Some(x.clone()),
        };
        if let Some(v) = d.validate().into_iter().next() {
            return Err(Error::Diagram(v));
        }
        Ok(d)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = matrix_violations(self.unit.len(), &self.steps);
        if let Some(i) = self.unit.iter().position(|u| !u.is_positive()) {
            out.push(format!("unit entry {i} is not positive"));
        }
        out
    }

    pub fn unit(&self) -> &IntVec {
        &self.unit
    }

    pub fn steps(&self) -> &[IntMatrix] {
        &self.steps
    }

    pub fn generator(&self) -> Option<&IntMatrix> {
        self.generator.as_ref()
    }

    pub fn is_stationary(&self) -> bool {
        self.generator.is_some()
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// Multiplicity from level `k` to `k + 1`; unbounded when stationary.
    pub fn step(&self, k: usize) -> Result<&IntMatrix> {
        match (&self.generator, self.steps.get(k)) {
            (_, Some(m)) => Ok(m),
            (Some(x), None) => Ok(x),
            (None, None) => Err(Error::Stage {
                stage: k + 1,
                available: self.depth(),
            }),
        }
    }

    pub fn width(&self, level: usize) -> usize {
        if level == 0 {
            self.unit.len()
        } else {
            match self.step(level - 1) {
                Ok(m) => m.rows(),
                Err(_) => 0,
            }
        }
    }

    /// Summand sizes at each level.
    pub fn level_sizes(&self) -> Vec<IntVec> {
        let mut out = vec![self.unit.clone()];
        for m in &self.steps {
            let next = m.mul_vec(out.last().unwrap()).expect("validated shapes");
            out.push(next);
        }
        out
    }

    /// Product of the multiplicities from level `from` to level `to`.
    pub fn transition(&self, from: usize, to: usize) -> Result<IntMatrix> {
        if from > to || (to > self.depth() && self.generator.is_none()) {
            return Err(Error::Stage {
                stage: to,
                available: self.depth(),
            });
        }
        let mut acc = IntMatrix::identity(self.width(from));
        for k in from..to {
            acc = self.step(k)?.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Keep the levels in `selection` (0-based, strictly increasing,
    /// starting at 0) and compose the multiplicities in between.
    pub fn telescope(&self, selection: &[usize]) -> Result<Self> {
        check_selection(selection, self.depth())?;
        let steps = selection
            .windows(2)
            .map(|w| self.transition(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        let generator = match (&self.generator, uniform_gap(selection)) {
            (Some(x), Some(g)) => Some(x.pow(g as u64)?),
            _ => None,
        };
        Ok(BratteliDiagram {
            unit: self.unit.clone(),
            steps,
            generator,
        })
    }
}

fn uniform_gap(selection: &[usize]) -> Option<usize> {
    let g = selection.get(1)? - selection[0];
    selection.windows(2).all(|w| w[1] - w[0] == g).then_some(g)
}

fn check_selection(selection: &[usize], depth: usize) -> Result<()> {
    if selection.first() != Some(&0) {
        return Err(Error::Diagram("telescope selection must start at level 0".into()));
    }
    if selection.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Diagram("telescope selection must be strictly increasing".into()));
    }
    if let Some(&last) = selection.last() {
        if last > depth {
            return Err(Error::Stage {
                stage: last,
                available: depth,
            });
        }
    }
    Ok(())
}

/// Edge orders: `orders[k][w]` lists, in nest order, the level-`k` sources
/// of the edges entering vertex `w` of level `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderedBratteliDiagram {
    #[serde(with = "crate::exact::decimal::vec")]
    unit: IntVec,
    orders: Vec<Vec<Vec<usize>>>,
    stationary: bool,
}

impl OrderedBratteliDiagram {
    pub fn new(unit: IntVec, orders: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let d = OrderedBratteliDiagram {
            unit,
            orders,
            stationary: false,
        };
        if let Some(v) = d.validate().into_iter().next() {
            return Err(Error::Diagram(v));
        }
        Ok(d)
    }

    /// One step of orders repeated `depth` times (at least once); `step[w]`
    /// orders vertex `w`.
    pub fn stationary(step: Vec<Vec<usize>>, unit: IntVec, depth: usize) -> Result<Self> {
        if step.len() != unit.len() {
            return Err(Error::Shape(format!(
                "{} vertex orders for {} vertices",
                step.len(),
                unit.len()
            )));
        }
        let mut d = Self::new(unit, vec![step; depth.max(1)])?;
        d.stationary = true;
        Ok(d)
    }

    /// Raw construction for validation reports; `None` marks a missing order.
    pub fn validate_raw(unit_len: usize, orders: &[Vec<Option<Vec<usize>>>]) -> Vec<String> {
        let mut out = Vec::new();
        let mut width = unit_len;
        for (k, level) in orders.iter().enumerate() {
            for (w, o) in level.iter().enumerate() {
                match o {
                    None => out.push(format!(
                        "level {}: vertex {w} has no edge order",
                        k + 1
                    )),
                    Some(seq) if seq.is_empty() => out.push(format!(
                        "level {}: vertex {w} receives no edges",
                        k + 1
                    )),
                    Some(seq) => {
                        if let Some(s) = seq.iter().find(|&&s| s >= width) {
                            out.push(format!(
                                "level {}: vertex {w} names source {s}, level {k} has {width} vertices",
                                k + 1
                            ));
                        }
                    }
                }
            }
            for s in 0..width {
                let used = level.iter().flatten().any(|seq| seq.contains(&s));
                if !used {
                    out.push(format!("level {k}: vertex {s} has no outgoing edges"));
                }
            }
            width = level.len();
        }
        out
    }

    /// The same diagram with at least `depth` steps; stationary diagrams
    /// repeat their step.
    pub fn extend_to(&self, depth: usize) -> Result<Self> {
        if depth <= self.depth() {
            return Ok(self.clone());
        }
        if !self.stationary || self.orders.is_empty() {
            return Err(Error::Stage {
                stage: depth,
                available: self.depth(),
            });
        }
        let mut d = self.clone();
        d.orders.resize(depth, self.orders[0].clone());
        Ok(d)
    }

    pub fn validate(&self) -> Vec<String> {
        let raw:Vec<Vec<Option<Vec<usize>>>> = self
            .orders
            .iter()
            .map(|l| l.iter().cloned().map(Some).collect())
            .collect();
        let mut out = Self::validate_raw(self.unit.len(), &raw);
        if let Some(i) = self.unit.iter().position(|u| !u.is_positive()) {
            out.push(format!("unit entry {i} is not positive"));
        }
        out
    }

    pub fn unit(&self) -> &IntVec {
        &self.unit
    }

    pub fn orders(&self) -> &[Vec<Vec<usize>>] {
        &self.orders
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    pub fn depth(&self) -> usize {
        self.orders.len()
    }

    pub fn width(&self, level: usize) -> usize {
        if level == 0 {
            self.unit.len()
        } else {
            self.orders[level - 1].len()
        }
    }

    /// Multiplicity matrix of step `k`, derived from the orders.
    pub fn multiplicity(&self, k: usize) -> IntMatrix {
        let rows = self.orders[k].len();
        let cols = self.width(k);
        let mut m = IntMatrix::zeros(rows, cols);
        for (w, seq) in self.orders[k].iter().enumerate() {
            for &s in seq {
                m[(w, s)] += 1;
            }
        }
        m
    }

    pub fn underlying(&self) -> BratteliDiagram {
        let steps: Vec<IntMatrix> = (0..self.depth()).map(|k| self.multiplicity(k)).collect();
        let generator = if self.stationary && !steps.is_empty() {
            Some(steps[0].clone())
        } else {
            None
        };
        BratteliDiagram {
            unit: self.unit.clone(),
            steps,
            generator,
        }
    }

    pub fn level_sizes(&self) -> Vec<IntVec> {
        self.underlying().level_sizes()
    }

    /// Composite order from level `from` to level `to`: each source label is
    /// replaced by that source's own order.
    pub fn composite_order(&self, from: usize, to: usize) -> Vec<Vec<usize>> {
        let mut acc: Vec<Vec<usize>> = (0..self.width(from)).map(|v| vec![v]).collect();
        for k in from..to {
            acc = self.orders[k]
                .iter()
                .map(|seq| seq.iter().flat_map(|&s| acc[s].iter().copied()).collect())
                .collect();
        }
        acc
    }

    pub fn telescope(&self, selection: &[usize]) -> Result<Self> {
        check_selection(selection, self.depth())?;
        let orders = selection
            .windows(2)
            .map(|w| self.composite_order(w[0], w[1]))
            .collect();
        Ok(OrderedBratteliDiagram {
            unit: self.unit.clone(),
            orders,
            stationary: self.stationary && uniform_gap(selection).is_some(),
        })
    }

    /// Stages `0..=depth` as direct sums of upper triangular algebras.
    pub fn realize(&self, depth: usize) -> Result<Vec<NestStage>> {
        realize_nest_system(self, depth)
    }
}

/// One stage of a realised ordered diagram: a direct sum of upper
/// triangular algebras, one per vertex, laid out consecutively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestStage {
    pub algebra: PreorderAlgebra,
    pub sizes: Vec<usize>,
    pub offsets: Vec<usize>,
    pub embedding: Option<MatrixUnitEmbedding>,
}

impl NestStage {
    /// Vertex and position of a global index.
    pub fn locate(&self, index: usize) -> (usize, usize) {
        let v = self.offsets.partition_point(|&o| o <= index) - 1;
        (v, index - self.offsets[v])
    }
}

const REALIZE_GUARD: usize = 20_000;

fn small_sizes(v: &IntVec) -> Result<Vec<usize>> {
    let out: Option<Vec<usize>> = v.iter().map(|x| x.to_usize()).collect();
    match out {
        Some(s) if s.iter().sum::<usize>() <= REALIZE_GUARD => Ok(s),
        _ => Err(Error::TooLarge(format!(
            "stage of total size above {REALIZE_GUARD}"
        ))),
    }
}

fn offsets_of(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .scan(0, |acc, &x| {
            let o = *acc;
            *acc += x;
            Some(o)
        })
        .collect()
}

/// Direct sum of upper triangular algebras with the given sizes.
pub fn nest_sum(sizes: &[usize]) -> PreorderAlgebra {
    let parts: Vec<PreorderAlgebra> = sizes.iter().map(|&n| PreorderAlgebra::upper_triangular(n)).collect();
    PreorderAlgebra::direct_sum(&parts)
}

/// Embedding of `⊕ T_{src[v]}` into `⊕ T_{tgt[w]}` placing the copies named
/// by `orders[w]` in consecutive intervals of `T_{tgt[w]}`.
pub fn concatenation_embedding(
    src: &[usize],
    tgt: &[usize],
    orders: &[Vec<usize>],
) -> Result<MatrixUnitEmbedding> {
    if orders.len() != tgt.len() {
        return Err(Error::Shape(format!("{} orders for {} target vertices", orders.len(), tgt.len())));
    }
    let (so, to) = (offsets_of(src), offsets_of(tgt));
    let mut image: Vec<Vec<usize>> = vec![Vec::new(); src.iter().sum()];
    for (w, seq) in orders.iter().enumerate() {
        let mut off = to[w];
        for &s in seq {
            let len = *src.get(s).ok_or_else(|| Error::Diagram(format!("unknown source vertex {s}")))?;
            for o in 0..len {
                image[so[s] + o].push(off + o);
            }
            off += len;
        }
        if off != to[w] + tgt[w] {
            return Err(Error::Diagram(format!("order of target vertex {w} does not fill it")));
        }
    }
    MatrixUnitEmbedding::aligned(nest_sum(src), nest_sum(tgt), image)
}

/// Realise levels `0..=depth`. The copy of source `s_t` named `t`-th in the
/// order of `w` occupies the `t`-th consecutive interval of `T_{n_w}`.
pub fn realize_nest_system(d: &OrderedBratteliDiagram, depth: usize) -> Result<Vec<NestStage>> {
    if depth > d.depth() {
        return Err(Error::Stage {
            stage: depth,
            available: d.depth(),
        });
    }
    let sizes = d.level_sizes();
    let mut stages: Vec<NestStage> = Vec::with_capacity(depth + 1);
    for lvl in sizes.iter().take(depth + 1) {
        let s = small_sizes(lvl)?;
        stages.push(NestStage {
            algebra: nest_sum(&s),
            offsets: offsets_of(&s),
            sizes: s,
            embedding: None,
        });
    }
    for k in 0..depth {
        let e = concatenation_embedding(&stages[k].sizes, &stages[k + 1].sizes, &d.orders()[k])?;
        stages[k].embedding = Some(e);
    }
    Ok(stages)
}

/// Refinement `T_{2^n} -> T_{2^{n+1}}` except on the last column, whose
/// matrix units `e_{i,N}` go to `f_{2i,2N-1} + f_{2i-1,2N}` (1-based).
pub fn twisted_refinement_stage(n: u32) -> Result<MatrixUnitEmbedding> {
    if n == 0 {
        return Err(Error::Embedding("twisted refinement needs n >= 1".into()));
    }
    let size = 1usize << n;
    let src = PreorderAlgebra::upper_triangular(size);
    let tgt = PreorderAlgebra::upper_triangular(2 * size);
    let image: Vec<Vec<usize>> = (0..size).map(|i| vec![2 * i, 2 * i + 1]).collect();
    let mut units = BTreeMap::new();
    for (i, j) in src.pairs() {
        if i == j {
            continue;
        }
        let v = if j == size - 1 {
            vec![(2 * i, 2 * size - 1), (2 * i + 1, 2 * size - 2)]
        } else {
            vec![(2 * i, 2 * j), (2 * i + 1, 2 * j + 1)]
        };
        units.insert((i, j), v);
    }
    MatrixUnitEmbedding::new(src, tgt, image, units)
}

/// Convenience: sizes as machine integers.
pub fn sizes_usize(v: &[BigInt]) -> Option<Vec<usize>> {
    v.iter().map(|x| x.to_usize()).collect()
}

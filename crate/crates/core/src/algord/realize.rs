use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{push_to, LimitSystem};
use crate::dimgroup::LimitElement;
use crate::error::{Error, Result};
use crate::fdcsl::search::search_with_images;
use crate::fdcsl::{MatrixUnitEmbedding, PreorderAlgebra, SearchOutcome};

/// Largest stage algebra, in minimal projections, that the realiser expands.
pub const UNIT_GUARD: usize = 256;

/// A finite relation among projection classes: node `i` carries class
/// `classes[i]`, and `relation[i][j]` asks for a partial isometry from
/// the projection of node `j` onto that of node `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationSpec {
    pub relation: PreorderAlgebra,
    pub classes: Vec<LimitElement>,
}

impl RelationSpec {
    pub fn new(relation: PreorderAlgebra, classes: Vec<LimitElement>) -> Result<Self> {
        if relation.n() != classes.len() {
            return Err(Error::Shape(format!(
                "{} classes for a relation on {} nodes",
                classes.len(),
                relation.n()
            )));
        }
        if classes.iter().any(|c| c.vector.iter().any(Signed::is_negative) || c.is_zero_vector()) {
            return Err(Error::Scale("node classes must be nonzero and nonnegative".into()));
        }
        Ok(RelationSpec { relation, classes })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RealizationOutcome {
    /// Star-extendible embedding of the relation's algebra into the stage
    /// algebra, with `images[i]` the minimal projections under node `i`.
    Found {
        stage: usize,
        images: Vec<Vec<usize>>,
        embedding: MatrixUnitEmbedding,
    },
    /// No stage up to `stage` admits a realisation.
    Exhausted { stage: usize, nodes: u64 },
    /// A stage search ran out of budget or the stages outgrew the guard.
    Inconclusive { stage: usize, nodes: u64 },
}

/// Minimal-projection algebra of stage `k`, blocks laid out consecutively.
pub fn unit_algebra(sys: &dyn LimitSystem, k: usize) -> Result<(PreorderAlgebra, Vec<usize>)> {
    let cap = push_to(sys, 0, &sys.unit(), k)?;
    let caps: Vec<usize> = cap
        .iter()
        .map(|c| c.to_usize().filter(|&c| c <= UNIT_GUARD))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::TooLarge(format!("stage {k} exceeds {UNIT_GUARD} units")))?;
    let total: usize = caps.iter().sum();
    if total > UNIT_GUARD {
        return Err(Error::TooLarge(format!("stage {k} has {total} units")));
    }
    let mut block = Vec::with_capacity(total);
    let mut offsets = Vec::with_capacity(caps.len());
    for (b, &c) in caps.iter().enumerate() {
        offsets.push(block.len());
        block.extend(std::iter::repeat(b).take(c));
    }
    let rel = sys.relation(k)?;
    let units = (0..total)
        .map(|x| (0..total).map(|y| rel[block[x]][block[y]]).collect())
        .collect();
    Ok((PreorderAlgebra::from_matrix(units)?, offsets))
}

/// Lowest free units of each block, node by node; `None` when the classes
/// do not fit side by side.
fn node_images(classes: &[Vec<BigInt>], caps: &[BigInt], offsets: &[usize]) -> Option<Vec<Vec<usize>>> {
    let mut used = vec![BigInt::zero(); caps.len()];
    let mut out = Vec::new();
    for c in classes {
        let mut img = Vec::new();
        for (b, n) in c.iter().enumerate() {
            let start = used[b].to_usize()?;
            used[b] += n;
            if used[b] > caps[b] {
                return None;
            }
            img.extend(offsets[b] + start..offsets[b] + used[b].to_usize()?);
        }
        out.push(img);
    }
    Some(out)
}

/// Searches stages up to `stage_budget` for projections and matrix units
/// realising the relation. Within a block any choice of units is
/// conjugate to the lowest free ones, so those are used.
pub fn realize_relation(
    sys: &dyn LimitSystem,
    r: &RelationSpec,
    stage_budget: usize,
    node_budget: u64,
) -> Result<RealizationOutcome> {
    let start = r.classes.iter().map(|c| c.stage).max().unwrap_or(0);
    let mut nodes = 0;
    let mut undecided = false;
    for k in start..=stage_budget {
        let (alg, offsets) = match unit_algebra(sys, k) {
            Ok(x) => x,
            Err(Error::TooLarge(_)) => return Ok(RealizationOutcome::Inconclusive { stage: k, nodes }),
            Err(e) => return Err(e),
        };
        let classes = r
            .classes
            .iter()
            .map(|c| push_to(sys, c.stage, &c.vector, k))
            .collect::<Result<Vec<_>>>()?;
        let cap = push_to(sys, 0, &sys.unit(), k)?;
        let Some(images) = node_images(&classes, &cap, &offsets) else { continue };
        match search_with_images(&r.relation, &alg, &images, node_budget, false)? {
            SearchOutcome::Found(embedding) => {
                return Ok(RealizationOutcome::Found { stage: k, images, embedding });
            }
            SearchOutcome::None { nodes: n } => nodes += n,
            SearchOutcome::Inconclusive { nodes: n } => {
                nodes += n;
                undecided = true;
            }
        }
    }
    Ok(if undecided {
        RealizationOutcome::Inconclusive {
            stage: stage_budget,
            nodes,
        }
    } else {
        RealizationOutcome::Exhausted {
            stage: stage_budget,
            nodes,
        }
    })
}

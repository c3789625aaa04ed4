use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::{limit_order_holds, LimitSystem, OrderVerdict};
use crate::dimgroup::{equal, Equality, InducedMap, LimitElement};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    /// Sample indices grouped by their image in the envelope.
    pub fibers: Vec<Vec<usize>>,
    /// Sample indices grouped by chains of order relations inside the sample.
    pub classes: Vec<Vec<usize>>,
    pub classes_within_fibers: bool,
    pub fibers_connected: bool,
    /// Pairs inside one fiber left undecided both ways.
    pub inconclusive_pairs: usize,
}

fn groups(uf: &UnionFind<usize>, n: usize) -> Vec<Vec<usize>> {
    let labels = uf.clone().into_labeling();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut seen = std::collections::BTreeMap::new();
    for i in 0..n {
        let g = *seen.entry(labels[i]).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[g].push(i);
    }
    out
}

/// Compares the equivalence generated by the order with the fibers of
/// `induced` over a sample of scale classes.
pub fn fiber_equivalence_check(
    sys: &dyn LimitSystem,
    induced: &InducedMap,
    sample: &[LimitElement],
    depth: usize,
) -> Result<FiberReport> {
    let n = sample.len();
    let images = sample.iter().map(|e| induced.apply(e)).collect::<Result<Vec<_>>>()?;
    let mut fiber_uf = UnionFind::new(n);
    let mut class_uf = UnionFind::new(n);
    let mut crossing = false;
    let mut inconclusive_pairs = 0;
    for i in 0..n {
        for j in i + 1..n {
            let same_fiber = matches!(equal(induced.target(), &images[i], &images[j])?, Equality::Equal { .. });
            if same_fiber {
                fiber_uf.union(i, j);
            }
            let forward = limit_order_holds(sys, &sample[i], &sample[j], depth)?;
            let backward = limit_order_holds(sys, &sample[j], &sample[i], depth)?;
            if forward.holds() || backward.holds() {
                class_uf.union(i, j);
                crossing |= !same_fiber;
            } else if same_fiber
                && matches!(forward, OrderVerdict::Inconclusive { .. })
                && matches!(backward, OrderVerdict::Inconclusive { .. })
            {
                inconclusive_pairs += 1;
            }
        }
    }
    let fibers = groups(&fiber_uf, n);
    let classes = groups(&class_uf, n);
    let fibers_connected = fibers
        .iter()
        .all(|f| f.iter().all(|&i| class_uf.equiv(i, f[0])));
    Ok(FiberReport {
        fibers,
        classes,
        classes_within_fibers: !crossing,
        fibers_connected,
        inconclusive_pairs,
    })
}

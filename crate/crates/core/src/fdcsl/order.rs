use petgraph::algo::ford_fulkerson;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use super::preorder::PreorderAlgebra;
use crate::error::{Error, Result};

/// Per-block projection counts, each bounded by the block size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ScaleVector {
    counts: Vec<u64>,
    capacities: Vec<u64>,
}

impl ScaleVector {
    pub fn new(counts: Vec<u64>, capacities: Vec<u64>) -> Result<Self> {
        if counts.len() != capacities.len() {
            return Err(Error::Scale(format!(
                "{} counts for {} blocks",
                counts.len(),
                capacities.len()
            )));
        }
        if let Some(i) = (0..counts.len()).find(|&i| counts[i] > capacities[i]) {
            return Err(Error::Scale(format!(
                "block {i} count {} exceeds capacity {}",
                counts[i], capacities[i]
            )));
        }
        Ok(ScaleVector { counts, capacities })
    }

    pub fn for_algebra(a: &PreorderAlgebra, counts: &[u64]) -> Result<Self> {
        Self::new(
            counts.to_vec(),
            a.block_sizes().iter().map(|&s| s as u64).collect(),
        )
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacities
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

const SCALE_GUARD: u128 = 1_000_000;

/// The full product lattice of per-block counts.
pub fn scale_enumerate(a: &PreorderAlgebra) -> Result<Vec<ScaleVector>> {
    let caps: Vec<u64> = a.block_sizes().iter().map(|&s| s as u64).collect();
    let size: u128 = caps.iter().map(|&c| c as u128 + 1).product();
    if size > SCALE_GUARD {
        return Err(Error::TooLarge(format!("scale has {size} elements")));
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut cur = vec![0u64; caps.len()];
    loop {
        out.push(ScaleVector {
            counts: cur.clone(),
            capacities: caps.clone(),
        });
        let mut k = caps.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if cur[k] < caps[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Units moved from the `q` side block `j` to the `p` side block `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub to_block: usize,
    pub from_block: usize,
    #[serde(with = "crate::exact::decimal::count")]
    pub count: u128,
}

/// Block-level transport: `rel[i][j]` allows moving units of `q` in block
/// `j` onto units of `p` in block `i`. Returns a saturating transport plan
/// when totals agree and one exists.
pub fn block_transport(rel: &[Vec<bool>], p: &[u128], q: &[u128]) -> Option<Vec<Transfer>> {
    let r = rel.len();
    let total: u128 = q.iter().sum();
    if p.iter().sum::<u128>() != total {
        return None;
    }
    if total == 0 {
        return Some(Vec::new());
    }
    let mut g: DiGraph<(), u128> = DiGraph::new();
    let src = g.add_node(());
    let sink = g.add_node(());
    let left: Vec<NodeIndex> = (0..r).map(|_| g.add_node(())).collect();
    let right: Vec<NodeIndex> = (0..r).map(|_| g.add_node(())).collect();
    for j in 0..r {
        if q[j] > 0 {
            g.add_edge(src, left[j], q[j]);
        }
        if p[j] > 0 {
            g.add_edge(right[j], sink, p[j]);
        }
    }
    let mut mids = Vec::new();
    for j in 0..r {
        if q[j] == 0 {
            continue;
        }
        for i in 0..r {
            if p[i] > 0 && rel[i][j] {
                let e = g.add_edge(left[j], right[i], total);
                mids.push((e, i, j));
            }
        }
    }
    let (flow, flows) = ford_fulkerson(&g, src, sink);
    if flow != total {
        return None;
    }
    Some(
        mids.into_iter()
            .filter(|(e, _, _)| flows[e.index()] > 0)
            .map(|(e, i, j)| Transfer {
                to_block: i,
                from_block: j,
                count: flows[e.index()],
            })
            .collect(),
    )
}

/// Matching of minimal diagonal projections realising `q ->_v p`: each
/// `(a, b)` pair contributes the matrix unit `e_ab` to `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderCertificate {
    pub transfers: Vec<Transfer>,
    pub units: Vec<(usize, usize)>,
}

impl OrderCertificate {
    /// Every matched pair lies in the relation, the final projections have
    /// class `p`, the initial projections have class `q`, and no minimal
    /// projection is used twice on either side.
    pub fn validate(&self, a: &PreorderAlgebra, p: &ScaleVector, q: &ScaleVector) -> bool {
        let blocks = a.blocks();
        let mut block_of = vec![0; a.n()];
        for (b, members) in blocks.iter().enumerate() {
            for &x in members {
                block_of[x] = b;
            }
        }
        let mut pc = vec![0u64; blocks.len()];
        let mut qc = vec![0u64; blocks.len()];
        let mut used_a = vec![false; a.n()];
        let mut used_b = vec![false; a.n()];
        for &(x, y) in &self.units {
            if x >= a.n() || y >= a.n() || !a.contains(x, y) || used_a[x] || used_b[y] {
                return false;
            }
            used_a[x] = true;
            used_b[y] = true;
            pc[block_of[x]] += 1;
            qc[block_of[y]] += 1;
        }
        pc == p.counts() && qc == q.counts()
    }
}

fn check_pair(a: &PreorderAlgebra, p: &ScaleVector, q: &ScaleVector) -> Result<()> {
    let caps: Vec<u64> = a.block_sizes().iter().map(|&s| s as u64).collect();
    for (name, v) in [("p", p), ("q", q)] {
        if v.capacities() != caps.as_slice() {
            return Err(Error::Scale(format!(
                "{name} has capacities {:?}, algebra blocks are {:?}",
                v.capacities(),
                caps
            )));
        }
    }
    Ok(())
}

/// Representatives: the first `count` indices of each block.
fn representatives(a: &PreorderAlgebra, v: &ScaleVector) -> Vec<Vec<usize>> {
    a.blocks()
        .iter()
        .zip(v.counts())
        .map(|(b, &c)| b[..c as usize].to_vec())
        .collect()
}

/// Decides `[p] S [q]`: some partial isometry `v` in the algebra has
/// `v*v = q` and `vv* = p`.
pub fn order_holds(
    a: &PreorderAlgebra,
    p: &ScaleVector,
    q: &ScaleVector,
) -> Result<Option<OrderCertificate>> {
    check_pair(a, p, q)?;
    let wide = |v: &ScaleVector| v.counts().iter().map(|&c| c as u128).collect::<Vec<_>>();
    let Some(transfers) = block_transport(&a.block_relation(), &wide(p), &wide(q)) else {
        return Ok(None);
    };
    let mut p_free = representatives(a, p);
    let mut q_free = representatives(a, q);
    let mut units = Vec::new();
    for t in &transfers {
        for _ in 0..t.count {
            let x = p_free[t.to_block].remove(0);
            let y = q_free[t.from_block].remove(0);
            units.push((x, y));
        }
    }
    units.sort_unstable();
    Ok(Some(OrderCertificate { transfers, units }))
}

/// Tail-sum criterion for `T(n_1, ..., n_r)`: equal totals and
/// `b_k + ... + b_r >= a_k + ... + a_r` for every `k`.
pub fn nest_order_formula(sizes: &[usize], a: &[u64], b: &[u64]) -> Result<bool> {
    if a.len() != sizes.len() || b.len() != sizes.len() {
        return Err(Error::Shape(format!(
            "vectors of length {} and {} for {} blocks",
            a.len(),
            b.len(),
            sizes.len()
        )));
    }
    if a.iter().sum::<u64>() != b.iter().sum::<u64>() {
        return Ok(false);
    }
    let (mut ta, mut tb) = (0u64, 0u64);
    for k in (0..sizes.len()).rev() {
        ta += a[k];
        tb += b[k];
        if tb < ta {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides the strong order on a direct sum of nest algebras. A strong
/// normalising partial isometry must be an order isomorphism between the
/// minimal subprojections of `q` and of `p`; along a nest that forces the
/// positional matching of the two sorted lists.
pub fn strong_order_holds(
    a: &PreorderAlgebra,
    p: &ScaleVector,
    q: &ScaleVector,
) -> Result<Option<OrderCertificate>> {
    check_pair(a, p, q)?;
    if !a.is_nest_sum() {
        return Err(Error::NotNest(format!("{a:?}")));
    }
    let blocks = a.blocks();
    let p_reps = representatives(a, p);
    let q_reps = representatives(a, q);
    let mut units = Vec::new();
    let mut transfers: Vec<Transfer> = Vec::new();
    for comp in a.components() {
        // Blocks of this component, in nest order.
        let mut comp_blocks: Vec<usize> = (0..blocks.len())
            .filter(|&b| comp.contains(&blocks[b][0]))
            .collect();
        comp_blocks.sort_by(|&x, &y| {
            let (i, j) = (blocks[x][0], blocks[y][0]);
            match (a.contains(i, j), a.contains(j, i)) {
                (true, false) => std::cmp::Ordering::Less,
                (false, true) => std::cmp::Ordering::Greater,
                _ => std::cmp::Ordering::Equal,
            }
        });
        let ps: Vec<(usize, usize)> = comp_blocks
            .iter()
            .flat_map(|&b| p_reps[b].iter().map(move |&x| (b, x)))
            .collect();
        let qs: Vec<(usize, usize)> = comp_blocks
            .iter()
            .flat_map(|&b| q_reps[b].iter().map(move |&y| (b, y)))
            .collect();
        if ps.len() != qs.len() {
            return Ok(None);
        }
        for k in 0..ps.len() {
            let (bp, x) = ps[k];
            let (bq, y) = qs[k];
            if !a.contains(x, y) {
                return Ok(None);
            }
            // Order isomorphism: equal blocks on one side iff on the other.
            if k > 0 && (ps[k - 1].0 == bp) != (qs[k - 1].0 == bq) {
                return Ok(None);
            }
            units.push((x, y));
            match transfers.last_mut() {
                Some(t) if t.to_block == bp && t.from_block == bq => t.count += 1,
                _ => transfers.push(Transfer {
                    to_block: bp,
                    from_block: bq,
                    count: 1,
                }),
            }
        }
    }
    units.sort_unstable();
    Ok(Some(OrderCertificate { transfers, units }))
}

/// Whether the partial isometry given by `units` preserves the relation in
/// both directions between its initial and final projections.
pub fn is_strong_matching(a: &PreorderAlgebra, units: &[(usize, usize)]) -> bool {
    units.iter().all(|&(x1, y1)| {
        units
            .iter()
            .all(|&(x2, y2)| a.contains(y1, y2) == a.contains(x1, x2))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(a: &PreorderAlgebra, c: &[u64]) -> ScaleVector {
        ScaleVector::for_algebra(a, c).unwrap()
    }

    #[test]
    fn scale_examples() {
        let t11 = PreorderAlgebra::nest(&[1, 1]);
        let s: Vec<Vec<u64>> = scale_enumerate(&t11)
            .unwrap()
            .iter()
            .map(|v| v.counts().to_vec())
            .collect();
        assert_eq!(s, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(scale_enumerate(&PreorderAlgebra::nest(&[2, 1])).unwrap().len(), 6);
        assert_eq!(scale_enumerate(&PreorderAlgebra::full(2)).unwrap().len(), 3);
        assert!(scale_enumerate(&PreorderAlgebra::diagonal(20)).is_err());
    }

    #[test]
    fn order_examples() {
        let a = PreorderAlgebra::nest(&[1, 1]);
        let c = order_holds(&a, &sv(&a, &[1, 0]), &sv(&a, &[0, 1])).unwrap().unwrap();
        assert_eq!(c.units, vec![(0, 1)]);
        assert!(c.validate(&a, &sv(&a, &[1, 0]), &sv(&a, &[0, 1])));
        assert!(order_holds(&a, &sv(&a, &[0, 1]), &sv(&a, &[1, 0])).unwrap().is_none());
        let p = sv(&a, &[1, 1]);
        assert!(order_holds(&a, &p, &p).unwrap().is_some());
    }

    #[test]
    fn capacity_violation_rejected() {
        let a = PreorderAlgebra::nest(&[1, 1]);
        assert!(ScaleVector::for_algebra(&a, &[2, 0]).is_err());
        let other = ScaleVector::new(vec![1], vec![2]).unwrap();
        assert!(order_holds(&a, &other, &other).is_err());
    }

    #[test]
    fn formula_examples() {
        assert!(nest_order_formula(&[1, 2], &[1, 1], &[0, 2]).unwrap());
        assert!(nest_order_formula(&[1, 2], &[1, 1], &[1, 1]).unwrap());
        assert!(!nest_order_formula(&[1, 2], &[0, 2], &[1, 1]).unwrap());
        assert!(nest_order_formula(&[1], &[1, 0], &[1, 0]).is_err());
    }

    #[test]
    fn strong_examples() {
        let t3 = PreorderAlgebra::upper_triangular(3);
        let c = strong_order_holds(&t3, &sv(&t3, &[1, 0, 0]), &sv(&t3, &[0, 0, 1]))
            .unwrap()
            .unwrap();
        assert_eq!(c.units, vec![(0, 2)]);
        let t11 = PreorderAlgebra::nest(&[1, 1]);
        assert!(strong_order_holds(&t11, &sv(&t11, &[0, 1]), &sv(&t11, &[1, 0]))
            .unwrap()
            .is_none());
        let t2 = PreorderAlgebra::upper_triangular(2);
        let err = strong_order_holds(&t2.tensor(&t2), &sv(&t2.tensor(&t2), &[0; 4]), &sv(&t2.tensor(&t2), &[0; 4]))
            .unwrap_err();
        assert!(err.to_string().contains("strong order oracle requires nest structure"));
    }

    #[test]
    fn strong_order_is_proper_on_non_triangular_nest() {
        // T(2,1): one unit from each block can be moved into the first
        // block, but no order isomorphism does it.
        let a = PreorderAlgebra::nest(&[2, 1]);
        let (p, q) = (sv(&a, &[2, 0]), sv(&a, &[1, 1]));
        let c = order_holds(&a, &p, &q).unwrap().unwrap();
        assert!(!is_strong_matching(&a, &c.units));
        assert!(strong_order_holds(&a, &p, &q).unwrap().is_none());
    }

    #[test]
    fn strong_certificates_are_strong() {
        let a = PreorderAlgebra::direct_sum(&[
            PreorderAlgebra::upper_triangular(3),
            PreorderAlgebra::upper_triangular(2),
        ]);
        let scale = scale_enumerate(&a).unwrap();
        for p in &scale {
            for q in &scale {
                let s = strong_order_holds(&a, p, q).unwrap();
                assert_eq!(s.is_some(), order_holds(&a, p, q).unwrap().is_some());
                if let Some(c) = s {
                    assert!(c.validate(&a, p, q));
                    assert!(is_strong_matching(&a, &c.units));
                }
            }
        }
    }
}

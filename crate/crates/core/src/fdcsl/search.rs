//! Backtracking over star-extendible embeddings with a fixed diagonal
//! restriction. An embedding is parameterised, per connected component of
//! the source, by bijections from each image onto the image of the
//! component's least index; every such choice is star-extendible, and it
//! lands in the target iff every induced pair lies in the target relation.

use std::collections::BTreeMap;

use serde::Serialize;

use super::embedding::MatrixUnitEmbedding;
use super::order::block_transport;
use super::preorder::PreorderAlgebra;
use crate::error::{Error, Result};

pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SearchOutcome {
    Found(MatrixUnitEmbedding),
    /// The search space was exhausted.
    None { nodes: u64 },
    /// The node budget ran out first.
    Inconclusive { nodes: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ConjugacyVerdict {
    Holds { embeddings: usize },
    Counterexample {
        first: MatrixUnitEmbedding,
        second: MatrixUnitEmbedding,
    },
    Inconclusive { nodes: u64 },
}

/// Canonical diagonal images from per-block multiplicities:
/// `assignment[i][b]` target indices of block `b` go to source index `i`,
/// taken in increasing order. Any other choice differs by a permutation
/// inside target blocks.
pub fn images_from_assignment(
    src: &PreorderAlgebra,
    tgt: &PreorderAlgebra,
    assignment: &[Vec<u64>],
) -> Result<Vec<Vec<usize>>> {
    let blocks = tgt.blocks();
    if assignment.len() != src.n() || assignment.iter().any(|r| r.len() != blocks.len()) {
        return Err(Error::Shape(format!(
            "assignment must be {} x {}",
            src.n(),
            blocks.len()
        )));
    }
    let mut next = vec![0usize; blocks.len()];
    let mut images = Vec::with_capacity(src.n());
    for (i, row) in assignment.iter().enumerate() {
        let mut img = Vec::new();
        for (b, &c) in row.iter().enumerate() {
            let c = c as usize;
            if next[b] + c > blocks[b].len() {
                return Err(Error::Embedding(format!(
                    "target block {b} of size {} over-assigned at source index {i}",
                    blocks[b].len()
                )));
            }
            img.extend_from_slice(&blocks[b][next[b]..next[b] + c]);
            next[b] += c;
        }
        img.sort_unstable();
        images.push(img);
    }
    Ok(images)
}

/// One candidate embedding: for every source index, its bijection onto
/// the image of its component root.
type Frame = Vec<BTreeMap<usize, usize>>;

struct Search<'a> {
    src: &'a PreorderAlgebra,
    tgt: &'a PreorderAlgebra,
    images: &'a [Vec<usize>],
    root_of: Vec<usize>,
    order: Vec<usize>,
    block_of: Vec<usize>,
    strongly_regular_only: bool,
    budget: u64,
    nodes: u64,
}

enum Step {
    Continue,
    Stop,
}

impl<'a> Search<'a> {
    fn new(
        src: &'a PreorderAlgebra,
        tgt: &'a PreorderAlgebra,
        images: &'a [Vec<usize>],
        budget: u64,
        strongly_regular_only: bool,
    ) -> Result<Self> {
        if images.len() != src.n() {
            return Err(Error::Shape(format!(
                "{} images for {} source indices",
                images.len(),
                src.n()
            )));
        }
        let mut root_of = vec![0; src.n()];
        let mut order = Vec::new();
        for comp in src.components() {
            let size = images[comp[0]].len();
            if let Some(&i) = comp.iter().find(|&&i| images[i].len() != size) {
                return Err(Error::Embedding(format!(
                    "images of {} and {i} must have equal size",
                    comp[0]
                )));
            }
            for &i in &comp {
                root_of[i] = comp[0];
                order.push(i);
            }
        }
        let mut block_of = vec![0; tgt.n()];
        for (b, members) in tgt.blocks().iter().enumerate() {
            for &x in members {
                block_of[x] = b;
            }
        }
        Ok(Search {
            src,
            tgt,
            images,
            root_of,
            order,
            block_of,
            strongly_regular_only,
            budget,
            nodes: 0,
        })
    }

    /// Hall condition for every source matrix unit taken alone.
    fn locally_feasible(&self) -> bool {
        let m = self.tgt.n();
        let ones = |img: &[usize]| {
            let mut v = vec![0u128; m];
            for &a in img {
                v[a] = 1;
            }
            v
        };
        self.src.pairs().into_iter().filter(|(i, j)| i != j).all(|(i, j)| {
            block_transport(self.tgt.relation(), &ones(&self.images[i]), &ones(&self.images[j]))
                .is_some()
        })
    }

    /// Whether pairing `a` (in image of `y`) with `d` (in image of `x`)
    /// is allowed by the relation and, if requested, keeps every image an
    /// order isomorphism.
    fn compatible(&self, frame: &Frame, y: usize, a: usize, c: usize) -> bool {
        for &x in &self.order {
            if frame[x].is_empty() || self.root_of[x] != self.root_of[y] {
                continue;
            }
            let fwd = self.src.contains(x, y) && x != y;
            let bwd = self.src.contains(y, x) && x != y;
            if !fwd && !bwd && x != y {
                continue;
            }
            let Some((&d, _)) = frame[x].iter().find(|(_, &v)| v == c) else {
                continue;
            };
            if x == y {
                continue;
            }
            if fwd && !self.tgt.contains(d, a) {
                return false;
            }
            if bwd && !self.tgt.contains(a, d) {
                return false;
            }
            if self.strongly_regular_only {
                // Against every earlier pair (d2 in x, a2 in y) with the
                // same root image.
                for (&a2, &c2) in &frame[y] {
                    let Some((&d2, _)) = frame[x].iter().find(|(_, &v)| v == c2) else {
                        continue;
                    };
                    if self.tgt.contains(a, a2) != self.tgt.contains(d, d2)
                        || self.tgt.contains(a2, a) != self.tgt.contains(d2, d)
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, visit: &mut dyn FnMut(&Frame) -> Step) -> Option<bool> {
        let mut frame: Frame = vec![BTreeMap::new(); self.src.n()];
        for &i in &self.order {
            if self.root_of[i] == i {
                frame[i] = self.images[i].iter().map(|&a| (a, a)).collect();
            }
        }
        let slots: Vec<(usize, usize)> = self
            .order
            .iter()
            .filter(|&&i| self.root_of[i] != i)
            .flat_map(|&i| self.images[i].iter().map(move |&a| (i, a)))
            .collect();
        self.descend(&mut frame, &slots, 0, visit)
    }

    /// `Some(true)` when the visitor stopped, `None` on budget exhaustion.
    fn descend(
        &mut self,
        frame: &mut Frame,
        slots: &[(usize, usize)],
        k: usize,
        visit: &mut dyn FnMut(&Frame) -> Step,
    ) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if k == slots.len() {
            return Some(matches!(visit(frame), Step::Stop));
        }
        let (y, a) = slots[k];
        let root = self.root_of[y];
        for &c in &self.images[root].clone() {
            if frame[y].values().any(|&v| v == c) {
                continue;
            }
            if !self.compatible(frame, y, a, c) {
                continue;
            }
            frame[y].insert(a, c);
            let r = self.descend(frame, slots, k + 1, visit);
            frame[y].remove(&a);
            match r {
                Some(false) => {}
                other => return other,
            }
        }
        Some(false)
    }

    fn build(&self, frame: &Frame) -> MatrixUnitEmbedding {
        let mut units = BTreeMap::new();
        for (i, j) in self.src.pairs() {
            if i == j {
                continue;
            }
            let inv_j: BTreeMap<usize, usize> = frame[j].iter().map(|(&b, &c)| (c, b)).collect();
            let v: Vec<(usize, usize)> = frame[i].iter().map(|(&a, c)| (a, inv_j[c])).collect();
            units.insert((i, j), v);
        }
        MatrixUnitEmbedding::new(
            self.src.clone(),
            self.tgt.clone(),
            self.images.to_vec(),
            units,
        )
        .expect("search builds well-formed embeddings")
    }

    /// Whether two frames differ by a permutation inside target blocks that
    /// fixes every image set.
    fn conjugate(&self, f: &Frame, g: &Frame) -> bool {
        let roots: Vec<usize> = self
            .order
            .iter()
            .copied()
            .filter(|&i| self.root_of[i] == i)
            .collect();
        roots.iter().all(|&r| {
            let members: Vec<usize> = self
                .order
                .iter()
                .copied()
                .filter(|&i| self.root_of[i] == r)
                .collect();
            let img: Vec<usize> = self.images[r].clone();
            let mut perm = vec![usize::MAX; img.len()];
            let mut used = vec![false; img.len()];
            self.extend_perm(&img, &members, f, g, &mut perm, &mut used, 0)
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_perm(
        &self,
        img: &[usize],
        members: &[usize],
        f: &Frame,
        g: &Frame,
        perm: &mut [usize],
        used: &mut [bool],
        k: usize,
    ) -> bool {
        if k == img.len() {
            return true;
        }
        for t in 0..img.len() {
            if used[t] {
                continue;
            }
            // pi_r sends img[k] to img[t]; each member's induced map must
            // keep target blocks.
            let ok = members.iter().all(|&i| {
                let a = f[i].iter().find(|(_, &c)| c == img[k]).map(|(&a, _)| a).unwrap();
                let a2 = g[i].iter().find(|(_, &c)| c == img[t]).map(|(&a, _)| a).unwrap();
                self.block_of[a] == self.block_of[a2]
            });
            if !ok {
                continue;
            }
            perm[k] = t;
            used[t] = true;
            if self.extend_perm(img, members, f, g, perm, used, k + 1) {
                return true;
            }
            used[t] = false;
        }
        false
    }
}

/// First star-extendible embedding (in lexicographic order of the root
/// bijections) with the given diagonal multiplicities.
pub fn search_regular_embedding(
    src: &PreorderAlgebra,
    tgt: &PreorderAlgebra,
    assignment: &[Vec<u64>],
    budget: u64,
) -> Result<SearchOutcome> {
    let images = images_from_assignment(src, tgt, assignment)?;
    search_with_images(src, tgt, &images, budget, false)
}

pub fn search_with_images(
    src: &PreorderAlgebra,
    tgt: &PreorderAlgebra,
    images: &[Vec<usize>],
    budget: u64,
    strongly_regular_only: bool,
) -> Result<SearchOutcome> {
    let mut s = Search::new(src, tgt, images, budget, strongly_regular_only)?;
    if !s.locally_feasible() {
        return Ok(SearchOutcome::None { nodes: 0 });
    }
    let mut found = None;
    let r = s.run(&mut |f| {
        found = Some(f.clone());
        Step::Stop
    });
    Ok(match (r, found) {
        (_, Some(f)) => SearchOutcome::Found(s.build(&f)),
        (None, _) => SearchOutcome::Inconclusive { nodes: s.nodes },
        _ => SearchOutcome::None { nodes: s.nodes },
    })
}

/// All star-extendible embeddings with the given diagonal images.
pub fn enumerate_embeddings(
    src: &PreorderAlgebra,
    tgt: &PreorderAlgebra,
    images: &[Vec<usize>],
    budget: u64,
    strongly_regular_only: bool,
) -> Result<Option<Vec<MatrixUnitEmbedding>>> {
    let mut s = Search::new(src, tgt, images, budget, strongly_regular_only)?;
    let mut frames = Vec::new();
    let r = s.run(&mut |f| {
        frames.push(f.clone());
        Step::Continue
    });
    if r.is_none() {
        return Ok(None);
    }
    Ok(Some(frames.iter().map(|f| s.build(f)).collect()))
}

/// Whether every star-extendible embedding with the given diagonal images
/// is conjugate to every other by a permutation unitary of the target's
/// diagonal blocks.
pub fn conjugacy_check(
    src: &PreorderAlgebra,
    tgt: &PreorderAlgebra,
    images: &[Vec<usize>],
    budget: u64,
    strongly_regular_only: bool,
) -> Result<ConjugacyVerdict> {
    let mut s = Search::new(src, tgt, images, budget, strongly_regular_only)?;
    let mut frames: Vec<Frame> = Vec::new();
    let r = s.run(&mut |f| {
        frames.push(f.clone());
        Step::Continue
    });
    if r.is_none() {
        return Ok(ConjugacyVerdict::Inconclusive { nodes: s.nodes });
    }
    for f in frames.iter().skip(1) {
        if !s.conjugate(&frames[0], f) {
            return Ok(ConjugacyVerdict::Counterexample {
                first: s.build(&frames[0]),
                second: s.build(f),
            });
        }
    }
    Ok(ConjugacyVerdict::Holds {
        embeddings: frames.len(),
    })
}

/// The eight-dimensional algebra receiving `T_2 ⊗ T_2` with diagonal map
/// `c -> c ⊗ I_2` but admitting no regular injection inducing it.
pub fn obstructed_target() -> PreorderAlgebra {
    let off = [
        (0, 2),
        (0, 4),
        (0, 6),
        (0, 7),
        (1, 3),
        (1, 5),
        (1, 6),
        (1, 7),
        (2, 6),
        (3, 7),
        (4, 7),
        (5, 6),
    ];
    PreorderAlgebra::from_pairs(8, &off).expect("transitive")
}

/// Multiplicities of `c -> c ⊗ I_2` from `T_2 ⊗ T_2` into
/// [`obstructed_target`].
pub fn obstructed_assignment() -> Vec<Vec<u64>> {
    (0..4)
        .map(|i| (0..8).map(|b| u64::from(b / 2 == i)).collect())
        .collect()
}

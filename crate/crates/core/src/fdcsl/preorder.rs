use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite-dimensional algebra spanned by the matrix units `e_ij` with
/// `(i, j)` in a reflexive transitive relation on `0..n`. Indices are the
/// minimal diagonal projections.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "PreorderRepr", try_from = "PreorderRepr")]
pub struct PreorderAlgebra {
    n: usize,
    rel: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violation: Option<String>,
    pub blocks: Vec<Vec<usize>>,
    pub triangular: bool,
    pub nest: bool,
}

/// Checks reflexivity and transitivity of a relation given as pairs.
pub fn validate(n: usize, pairs: &[(usize, usize)]) -> ValidationReport {
    let mut rel = vec![vec![false; n]; n];
    let mut violation = None;
    for &(i, j) in pairs {
        if i >= n || j >= n {
            violation.get_or_insert(format!("pair ({i}, {j}) out of range 0..{n}"));
            continue;
        }
        rel[i][j] = true;
    }
    if violation.is_none() {
        if let Some(i) = (0..n).find(|&i| !rel[i][i]) {
            violation = Some(format!("not reflexive: ({i}, {i}) missing"));
        }
    }
    if violation.is_none() {
        'outer: for i in 0..n {
            for j in 0..n {
                if !rel[i][j] {
                    continue;
                }
                for k in 0..n {
                    if rel[j][k] && !rel[i][k] {
                        violation = Some(format!(
                            "not transitive: ({i}, {j}) and ({j}, {k}) present, ({i}, {k}) missing"
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    if violation.is_some() {
        return ValidationReport {
            ok: false,
            violation,
            blocks: Vec::new(),
            triangular: false,
            nest: false,
        };
    }
    let a = PreorderAlgebra { n, rel };
    ValidationReport {
        ok: true,
        violation: None,
        blocks: a.blocks(),
        triangular: a.is_triangular(),
        nest: a.is_nest(),
    }
}

impl PreorderAlgebra {
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut all: Vec<(usize, usize)> = pairs.to_vec();
        all.extend((0..n).map(|i| (i, i)));
        let report = validate(n, &all);
        if let Some(v) = report.violation {
            return Err(Error::Relation(v));
        }
        Self::from_matrix(
            (0..n)
                .map(|i| (0..n).map(|j| all.contains(&(i, j))).collect())
                .collect(),
        )
    }

    pub fn from_matrix(rel: Vec<Vec<bool>>) -> Result<Self> {
        let n = rel.len();
        if rel.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("relation matrix is not square".into()));
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| rel[i][j])
            .collect();
        if let Some(v) = validate(n, &pairs).violation {
            return Err(Error::Relation(v));
        }
        Ok(PreorderAlgebra { n, rel })
    }

    /// Reflexive transitive closure of the given pairs.
    pub fn closure(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut rel = vec![vec![false; n]; n];
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::Relation(format!("pair ({i}, {j}) out of range 0..{n}")));
            }
            rel[i][j] = true;
        }
        close(&mut rel);
        Ok(PreorderAlgebra { n, rel })
    }

    pub fn full(n: usize) -> Self {
        PreorderAlgebra {
            n,
            rel: vec![vec![true; n]; n],
        }
    }

    pub fn diagonal(n: usize) -> Self {
        PreorderAlgebra {
            n,
            rel: (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect(),
        }
    }

    /// Upper triangular matrices `T_n`.
    pub fn upper_triangular(n: usize) -> Self {
        PreorderAlgebra {
            n,
            rel: (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect(),
        }
    }

    /// Block upper triangular `T(n_1, ..., n_r)`.
    pub fn nest(sizes: &[usize]) -> Self {
        let label: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat(b).take(s))
            .collect();
        let n = label.len();
        PreorderAlgebra {
            n,
            rel: (0..n)
                .map(|i| (0..n).map(|j| label[i] <= label[j]).collect())
                .collect(),
        }
    }

    pub fn direct_sum(parts: &[PreorderAlgebra]) -> Self {
        let n = parts.iter().map(|p| p.n).sum();
        let mut rel = vec![vec![false; n]; n];
        let mut off = 0;
        for p in parts {
            for i in 0..p.n {
                for j in 0..p.n {
                    rel[off + i][off + j] = p.rel[i][j];
                }
            }
            off += p.n;
        }
        PreorderAlgebra { n, rel }
    }

    /// Tensor product; index `(a, b)` becomes `a * other.n + b`.
    pub fn tensor(&self, other: &PreorderAlgebra) -> Self {
        let n = self.n * other.n;
        let m = other.n;
        PreorderAlgebra {
            n,
            rel: (0..n)
                .map(|x| {
                    (0..n)
                        .map(|y| self.rel[x / m][y / m] && other.rel[x % m][y % m])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        PreorderAlgebra {
            n: self.n,
            rel: (0..self.n)
                .map(|i| (0..self.n).map(|j| self.rel[j][i]).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether the matrix unit `e_ij` lies in the algebra.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rel[i][j]
    }

    pub fn relation(&self) -> &[Vec<bool>] {
        &self.rel
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.rel[i][j])
            .collect()
    }

    /// Equivalence classes of `rel ∩ rel⁻¹`, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for i in 0..self.n {
            if seen[i] {
                continue;
            }
            let b: Vec<usize> = (i..self.n)
                .filter(|&j| self.rel[i][j] && self.rel[j][i])
                .collect();
            for &j in &b {
                seen[j] = true;
            }
            out.push(b);
        }
        out
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks().iter().map(Vec::len).collect()
    }

    /// Relation between blocks: `(I, J)` iff `e_ij` is in the algebra for
    /// representatives `i` of `I` and `j` of `J`.
    pub fn block_relation(&self) -> Vec<Vec<bool>> {
        let reps: Vec<usize> = self.blocks().iter().map(|b| b[0]).collect();
        reps.iter()
            .map(|&i| reps.iter().map(|&j| self.rel[i][j]).collect())
            .collect()
    }

    pub fn is_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || !(self.rel[i][j] && self.rel[j][i])))
    }

    /// Total preorder: every pair comparable.
    pub fn is_nest(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.rel[i][j] || self.rel[j][i]))
    }

    /// Connected components of the undirected comparability graph.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = Vec::new();
            while let Some(x) = stack.pop() {
                members.push(x);
                for y in 0..self.n {
                    if comp[y] == usize::MAX && (self.rel[x][y] || self.rel[y][x]) {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Each connected component is totally preordered.
    pub fn is_nest_sum(&self) -> bool {
        self.components().iter().all(|c| {
            c.iter()
                .all(|&i| c.iter().all(|&j| self.rel[i][j] || self.rel[j][i]))
        })
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self.n, &self.pairs())
    }
}

pub(crate) fn close(rel: &mut [Vec<bool>]) {
    let n = rel.len();
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                for j in 0..n {
                    if rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
    }
}

/// All reflexive transitive relations on `0..m`, in a fixed order.
pub fn enumerate_preorders(m: usize) -> Result<Vec<PreorderAlgebra>> {
    if m > 5 {
        return Err(Error::TooLarge(format!(
            "preorder enumeration limited to 5 points, got {m}"
        )));
    }
    let off: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    // Grow relations pair by pair, closing transitively, so every preorder
    // is reached as the closure of itself.
    let mut stack = vec![PreorderAlgebra::diagonal(m)];
    seen.insert(PreorderAlgebra::diagonal(m).rel);
    while let Some(a) = stack.pop() {
        for &(i, j) in &off {
            if a.rel[i][j] {
                continue;
            }
            let mut rel = a.rel.clone();
            rel[i][j] = true;
            close(&mut rel);
            if seen.insert(rel.clone()) {
                stack.push(PreorderAlgebra { n: m, rel });
            }
        }
        out.push(a);
    }
    out.sort_by(|a, b| a.rel.cmp(&b.rel));
    Ok(out)
}

impl fmt::Debug for PreorderAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PreorderAlgebra(n={}, {{", self.n)?;
        let off: Vec<String> = self
            .pairs()
            .into_iter()
            .filter(|(i, j)| i != j)
            .map(|(i, j)| format!("({i},{j})"))
            .collect();
        write!(f, "{}}})", off.join(","))
    }
}

/// Size plus the off-diagonal pairs.
#[derive(Serialize, Deserialize)]
struct PreorderRepr {
    n: usize,
    rel: Vec<(usize, usize)>,
}

impl From<PreorderAlgebra> for PreorderRepr {
    fn from(a: PreorderAlgebra) -> Self {
        let rel = a.pairs().into_iter().filter(|(i, j)| i != j).collect();
        PreorderRepr { n: a.n, rel }
    }
}

impl TryFrom<PreorderRepr> for PreorderAlgebra {
    type Error = Error;

    fn try_from(r: PreorderRepr) -> Result<Self> {
        let mut pairs = r.rel;
        pairs.extend((0..r.n).map(|i| (i, i)));
        PreorderAlgebra::from_pairs(r.n, &pairs)
    }
}

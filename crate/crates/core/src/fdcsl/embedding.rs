use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::preorder::PreorderAlgebra;
use crate::error::{Error, Result};

/// An embedding sending each matrix unit `e_ij` of the source to a sum of
/// target matrix units `f_ab`. The diagonal unit `e_ii` goes to the sum over
/// `image[i]`; `units[(i, j)]` lists the `(a, b)` for `i != j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "EmbeddingRepr", try_from = "EmbeddingRepr")]
pub struct MatrixUnitEmbedding {
    source: PreorderAlgebra,
    target: PreorderAlgebra,
    image: Vec<Vec<usize>>,
    units: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EmbeddingVerdict {
    Ok,
    Violation(String),
}

impl EmbeddingVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, EmbeddingVerdict::Ok)
    }
}

/// A pair of minimal projections under `v*v` whose order relation is not
/// carried over by conjugation with the image `v` of a source matrix unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityWitness {
    pub source_unit: (usize, usize),
    pub initial: (usize, usize),
    pub r#final: (usize, usize),
    pub relation_initial: bool,
    pub relation_final: bool,
}

#[derive(Serialize, Deserialize)]
struct UnitImage {
    unit: (usize, usize),
    image: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingRepr {
    source: PreorderAlgebra,
    target: PreorderAlgebra,
    image: Vec<Vec<usize>>,
    units: Vec<UnitImage>,
}

impl From<MatrixUnitEmbedding> for EmbeddingRepr {
    fn from(e: MatrixUnitEmbedding) -> Self {
        EmbeddingRepr {
            source: e.source,
            target: e.target,
            image: e.image,
            units: e.units.into_iter().map(|(unit, image)| UnitImage { unit, image }).collect(),
        }
    }
}

impl TryFrom<EmbeddingRepr> for MatrixUnitEmbedding {
    type Error = Error;

    fn try_from(r: EmbeddingRepr) -> Result<Self> {
        let units = r.units.into_iter().map(|u| (u.unit, u.image)).collect();
        MatrixUnitEmbedding::new(r.source, r.target, r.image, units)
    }
}

impl MatrixUnitEmbedding {
    pub fn new(
        source: PreorderAlgebra,
        target: PreorderAlgebra,
        image: Vec<Vec<usize>>,
        units: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
    ) -> Result<Self> {
        let e = MatrixUnitEmbedding {
            source,
            target,
            image,
            units,
        };
        e.check_shape()?;
        Ok(e)
    }

    /// Images of `e_ij` pair `image[i][k]` with `image[j][k]`.
    pub fn aligned(
        source: PreorderAlgebra,
        target: PreorderAlgebra,
        image: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut units = BTreeMap::new();
        for (i, j) in source.pairs() {
            if i != j {
                if image[i].len() != image[j].len() {
                    return Err(Error::Embedding(format!(
                        "images of {i} and {j} have different sizes"
                    )));
                }
                let v = image[i].iter().copied().zip(image[j].iter().copied()).collect();
                units.insert((i, j), v);
            }
        }
        Self::new(source, target, image, units)
    }

    /// `a -> a ⊗ 1` from `T_n` into `T_{nm}`.
    pub fn refinement(n: usize, m: usize) -> Self {
        let image = (0..n).map(|i| (i * m..(i + 1) * m).collect()).collect();
        Self::aligned(
            PreorderAlgebra::upper_triangular(n),
            PreorderAlgebra::upper_triangular(n * m),
            image,
        )
        .expect("refinement is well formed")
    }

    /// `a -> 1 ⊗ a` from `T_m` into `T_{nm}`.
    pub fn standard(m: usize, n: usize) -> Self {
        let image = (0..m).map(|i| (0..n).map(|k| k * m + i).collect()).collect();
        Self::aligned(
            PreorderAlgebra::upper_triangular(m),
            PreorderAlgebra::upper_triangular(n * m),
            image,
        )
        .expect("standard embedding is well formed")
    }

    /// `T_2 -> T_4` sending `e_01` to `f_03 + f_12`.
    pub fn crossed_t2_t4() -> Self {
        let mut units = BTreeMap::new();
        units.insert((0, 1), vec![(0, 3), (1, 2)]);
        Self::new(
            PreorderAlgebra::upper_triangular(2),
            PreorderAlgebra::upper_triangular(4),
            vec![vec![0, 1], vec![2, 3]],
            units,
        )
        .expect("well formed")
    }

    pub fn source(&self) -> &PreorderAlgebra {
        &self.source
    }

    pub fn target(&self) -> &PreorderAlgebra {
        &self.target
    }

    pub fn image(&self, i: usize) -> &[usize] {
        &self.image[i]
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.image
    }

    /// Target matrix units making up the image of `e_ij`.
    pub fn unit_image(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        if i == j {
            self.image[i].iter().map(|&a| (a, a)).collect()
        } else {
            self.units.get(&(i, j)).cloned().unwrap_or_default()
        }
    }

    pub fn units(&self) -> &BTreeMap<(usize, usize), Vec<(usize, usize)>> {
        &self.units
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.source.n();
        let m = self.target.n();
        if self.image.len() != n {
            return Err(Error::Embedding(format!(
                "{} images for {n} source indices",
                self.image.len()
            )));
        }
        let mut owner = vec![usize::MAX; m];
        for (i, img) in self.image.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::Embedding(format!("index {i} has empty image")));
            }
            for &a in img {
                if a >= m {
                    return Err(Error::Embedding(format!("target index {a} out of range")));
                }
                if owner[a] != usize::MAX {
                    return Err(Error::Embedding(format!(
                        "images of {} and {i} overlap at {a}",
                        owner[a]
                    )));
                }
                owner[a] = i;
            }
        }
        for (i, j) in self.source.pairs() {
            if i == j {
                continue;
            }
            let Some(v) = self.units.get(&(i, j)) else {
                return Err(Error::Embedding(format!("no image for e_{i}{j}")));
            };
            let mut rows: Vec<usize> = v.iter().map(|p| p.0).collect();
            let mut cols: Vec<usize> = v.iter().map(|p| p.1).collect();
            rows.sort_unstable();
            cols.sort_unstable();
            let mut ri = self.image[i].clone();
            let mut cj = self.image[j].clone();
            ri.sort_unstable();
            cj.sort_unstable();
            if rows != ri || cols != cj {
                return Err(Error::Embedding(format!(
                    "image of e_{i}{j} is not a bijection from image({j}) onto image({i})"
                )));
            }
        }
        for &(i, j) in self.units.keys() {
            if i >= n || j >= n || i == j || !self.source.contains(i, j) {
                return Err(Error::Embedding(format!("e_{i}{j} is not a source matrix unit")));
            }
        }
        Ok(())
    }

    /// Partner map of `e_ij`'s image: column index to row index.
    fn partner(&self, i: usize, j: usize) -> BTreeMap<usize, usize> {
        self.unit_image(i, j).into_iter().map(|(a, b)| (b, a)).collect()
    }

    /// The images of matrix units extend to a matrix unit system of the
    /// enveloping full matrix algebras: they lie in the target, and the
    /// bijections they induce are consistent around every cycle of the
    /// comparability graph.
    pub fn check_star_extendible(&self) -> EmbeddingVerdict {
        for (&(i, j), v) in &self.units {
            if let Some(&(a, b)) = v.iter().find(|&&(a, b)| !self.target.contains(a, b)) {
                return EmbeddingVerdict::Violation(format!(
                    "image of e_{i}{j} contains f_{a}{b}, which is not in the target"
                ));
            }
        }
        let n = self.source.n();
        // to_root[i]: target index in image(i) -> target index in image(root)
        let mut to_root: Vec<Option<BTreeMap<usize, usize>>> = vec![None; n];
        for comp in self.source.components() {
            let root = comp[0];
            to_root[root] = Some(self.image[root].iter().map(|&a| (a, a)).collect());
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &y in &comp {
                    if to_root[y].is_some() {
                        continue;
                    }
                    // Move from image(y) to image(x) using e_xy or e_yx.
                    let step: BTreeMap<usize, usize> = if self.source.contains(x, y) {
                        self.partner(x, y)
                    } else if self.source.contains(y, x) {
                        self.partner(y, x).into_iter().map(|(b, a)| (a, b)).collect()
                    } else {
                        continue;
                    };
                    let tx = to_root[x].as_ref().unwrap();
                    to_root[y] = Some(step.iter().map(|(&b, a)| (b, tx[a])).collect());
                    queue.push_back(y);
                }
            }
        }
        for (&(i, j), v) in &self.units {
            let (ti, tj) = (to_root[i].as_ref().unwrap(), to_root[j].as_ref().unwrap());
            if let Some(&(a, b)) = v.iter().find(|&&(a, b)| ti[&a] != tj[&b]) {
                return EmbeddingVerdict::Violation(format!(
                    "image of e_{i}{j} pairs f_{a} with f_{b}, inconsistent with the other matrix unit images"
                ));
            }
        }
        EmbeddingVerdict::Ok
    }

    /// Conjugation by the image of every source matrix unit is an order
    /// isomorphism between the minimal projections under its initial and
    /// final projections.
    pub fn check_strongly_regular(&self) -> Option<RegularityWitness> {
        for (&(i, j), v) in &self.units {
            for &(a1, b1) in v {
                for &(a2, b2) in v {
                    let init = self.target.contains(b1, b2);
                    let fin = self.target.contains(a1, a2);
                    if init != fin {
                        return Some(RegularityWitness {
                            source_unit: (i, j),
                            initial: (b1, b2),
                            r#final: (a1, a2),
                            relation_initial: init,
                            relation_final: fin,
                        });
                    }
                }
            }
        }
        None
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &MatrixUnitEmbedding) -> Result<MatrixUnitEmbedding> {
        if self.target != other.source {
            return Err(Error::Embedding("composition of mismatched embeddings".into()));
        }
        let image = self
            .image
            .iter()
            .map(|img| img.iter().flat_map(|&a| other.image[a].clone()).collect())
            .collect();
        let mut units = BTreeMap::new();
        for (&(i, j), v) in &self.units {
            let mut out = Vec::new();
            for &(a, b) in v {
                out.extend(other.unit_image(a, b));
            }
            out.sort_unstable();
            units.insert((i, j), out);
        }
        MatrixUnitEmbedding::new(self.source.clone(), other.target.clone(), image, units)
    }

    /// The same embedding with each unit list sorted, for comparisons.
    pub fn normalized(&self) -> MatrixUnitEmbedding {
        let mut e = self.clone();
        for v in e.units.values_mut() {
            v.sort_unstable();
        }
        for img in &mut e.image {
            img.sort_unstable();
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_and_standard() {
        for (n, m) in [(2, 2), (2, 3), (3, 2), (1, 6), (6, 1)] {
            let r = MatrixUnitEmbedding::refinement(n, m);
            assert!(r.check_star_extendible().is_ok());
            assert!(r.check_strongly_regular().is_none());
            let s = MatrixUnitEmbedding::standard(n, m);
            assert!(s.check_star_extendible().is_ok());
            assert!(s.check_strongly_regular().is_none());
        }
    }

    #[test]
    fn crossed_embedding_is_not_strongly_regular() {
        let e = MatrixUnitEmbedding::crossed_t2_t4();
        assert!(e.check_star_extendible().is_ok());
        let w = e.check_strongly_regular().unwrap();
        assert_eq!(w.source_unit, (0, 1));
        assert_ne!(w.relation_initial, w.relation_final);
    }

    #[test]
    fn inconsistent_composition_detected() {
        let t3 = PreorderAlgebra::upper_triangular(3);
        let t6 = PreorderAlgebra::upper_triangular(6);
        let mut units = BTreeMap::new();
        units.insert((0, 1), vec![(0, 2), (1, 3)]);
        units.insert((1, 2), vec![(2, 4), (3, 5)]);
        units.insert((0, 2), vec![(0, 5), (1, 4)]);
        let e = MatrixUnitEmbedding::new(t3, t6, vec![vec![0, 1], vec![2, 3], vec![4, 5]], units)
            .unwrap();
        assert!(!e.check_star_extendible().is_ok());
    }

    #[test]
    fn malformed_rejected() {
        let t2 = PreorderAlgebra::upper_triangular(2);
        let t4 = PreorderAlgebra::upper_triangular(4);
        assert!(MatrixUnitEmbedding::aligned(t2.clone(), t4.clone(), vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(MatrixUnitEmbedding::aligned(t2, t4, vec![vec![0, 1], vec![2]]).is_err());
    }

    #[test]
    fn composition_of_refinements() {
        let a = MatrixUnitEmbedding::refinement(2, 2);
        let b = MatrixUnitEmbedding::refinement(4, 2);
        assert_eq!(a.then(&b).unwrap().normalized(), MatrixUnitEmbedding::refinement(2, 4).normalized());
    }

    #[test]
    fn json_round_trip() {
        let e = MatrixUnitEmbedding::crossed_t2_t4();
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.contains(r#""units":[{"unit":[0,1],"image":[[0,3],[1,2]]}]"#));
        assert_eq!(serde_json::from_str::<MatrixUnitEmbedding>(&s).unwrap(), e);
        let bad = s.replace("[[0,3],[1,2]]", "[[0,3],[0,2]]");
        assert!(serde_json::from_str::<MatrixUnitEmbedding>(&bad).is_err());
    }
}

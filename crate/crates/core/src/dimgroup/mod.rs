//! Elements of dimension groups presented as direct limits of
//! `Z^{n_k}` under multiplicity matrices.

mod positivity;
mod report;

pub use positivity::{class_decomposition, positive, NegativeCertificate, PositivityVerdict};
pub use report::{k0_report, ClassData, K0Class, K0Report};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};
use crate::exact::matrix::{IntMatrix, IntVec};

pub const DEFAULT_DEPTH: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LimitElement {
    pub stage: usize,
    #[serde(with = "crate::exact::decimal::vec")]
    pub vector: IntVec,
}

impl LimitElement {
    pub fn new(stage: usize, vector: IntVec) -> Self {
        LimitElement { stage, vector }
    }

    pub fn from_i64(stage: usize, v: &[i64]) -> Self {
        LimitElement::new(stage, v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn is_zero_vector(&self) -> bool {
        self.vector.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.vector.iter().all(|x| !x.is_negative())
    }

    pub fn neg(&self) -> Self {
        LimitElement::new(self.stage, self.vector.iter().map(|x| -x).collect())
    }

    fn check(&self, d: &BratteliDiagram) -> Result<()> {
        let w = d.width(self.stage);
        if !d.is_stationary() && self.stage > d.depth() {
            return Err(Error::Stage {
                stage: self.stage,
                available: d.depth(),
            });
        }
        if self.vector.len() != w {
            return Err(Error::Shape(format!(
                "element of length {} at a level with {w} vertices",
                self.vector.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for LimitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vector.iter().map(|x| x.to_string()).collect();
        write!(f, "{}:{}", self.stage, v.join(","))
    }
}

/// Parses `stage:v1,v2,...`; a missing `stage:` prefix means stage 0.
impl FromStr for LimitElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (stage, rest) = match s.split_once(':') {
            Some((a, b)) => (
                a.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: 1,
                    column: 1,
                    message: format!("bad stage '{a}': {e}"),
                })?,
                b,
            ),
            None => (0, s),
        };
        let mut vector = Vec::new();
        let base = s.len() - rest.len();
        let mut col = base + 1;
        for tok in rest.split(',') {
            let t = tok.trim();
            vector.push(t.parse::<BigInt>().map_err(|e| Error::Parse {
                line: 1,
                column: col,
                message: format!("bad integer '{t}': {e}"),
            })?);
            col += tok.len() + 1;
        }
        Ok(LimitElement { stage, vector })
    }
}

pub fn push(d: &BratteliDiagram, e: &LimitElement, to_stage: usize) -> Result<LimitElement> {
    e.check(d)?;
    if to_stage < e.stage {
        return Err(Error::Stage {
            stage: to_stage,
            available: e.stage,
        });
    }
    let mut v = e.vector.clone();
    for k in e.stage..to_stage {
        v = d.step(k)?.mul_vec(&v)?;
    }
    Ok(LimitElement::new(to_stage, v))
}

pub fn add(d: &BratteliDiagram, a: &LimitElement, b: &LimitElement) -> Result<LimitElement> {
    let s = a.stage.max(b.stage);
    let (pa, pb) = (push(d, a, s)?, push(d, b, s)?);
    Ok(LimitElement::new(s, pa.vector.iter().zip(&pb.vector).map(|(x, y)| x + y).collect()))
}

pub fn sub(d: &BratteliDiagram, a: &LimitElement, b: &LimitElement) -> Result<LimitElement> {
    add(d, a, &b.neg())
}

/// The order unit at level 0.
pub fn unit_element(d: &BratteliDiagram) -> LimitElement {
    LimitElement::new(0, d.unit().clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Equality {
    Equal { stage: usize },
    Distinct,
}

fn injective(m: &IntMatrix) -> bool {
    m.rank() == m.cols()
}

/// Decides equality in the limit. A difference that survives `n` further
/// steps of a stationary generator on `n` vertices survives forever.
pub fn equal(d: &BratteliDiagram, a: &LimitElement, b: &LimitElement) -> Result<Equality> {
    let diff = sub(d, a, b)?;
    let s = diff.stage;
    let horizon = match d.generator() {
        Some(x) => {
            let tail_ok = injective(x) && (s..d.depth()).all(|k| injective(&d.steps()[k]));
            if tail_ok {
                s
            } else {
                s.max(d.depth()) + x.rows()
            }
        }
        None => d.depth(),
    };
    let mut v = diff;
    loop {
        if v.is_zero_vector() {
            return Ok(Equality::Equal { stage: v.stage });
        }
        if v.stage >= horizon {
            return Ok(Equality::Distinct);
        }
        v = push(d, &v, v.stage + 1)?;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ScaleVerdict {
    InScale { stage: usize },
    NotInScale { witness: String },
    Inconclusive { depth: usize },
}

impl ScaleVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ScaleVerdict::InScale { .. })
    }
}

/// Whether `0 <= e <= unit` in the limit order.
pub fn in_scale(d: &BratteliDiagram, e: &LimitElement, depth: usize) -> Result<ScaleVerdict> {
    let lower = positive(d, e, depth)?;
    let upper = positive(d, &sub(d, &unit_element(d), e)?, depth)?;
    Ok(match (&lower, &upper) {
        (PositivityVerdict::NotPositive { .. }, _) => ScaleVerdict::NotInScale {
            witness: "element is not positive".into(),
        },
        (_, PositivityVerdict::NotPositive { .. }) => ScaleVerdict::NotInScale {
            witness: "unit minus element is not positive".into(),
        },
        (PositivityVerdict::Inconclusive { .. }, _) | (_, PositivityVerdict::Inconclusive { .. }) => {
            ScaleVerdict::Inconclusive { depth }
        }
        _ => ScaleVerdict::InScale {
            stage: lower.stage().max(upper.stage()).max(e.stage),
        },
    })
}

/// Group homomorphism between two limits given by level maps that commute
/// with the multiplicities. Stationary maps apply at every level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedMap {
    source: BratteliDiagram,
    target: BratteliDiagram,
    levels: Vec<IntMatrix>,
    stationary: bool,
}

impl InducedMap {
    pub fn new(source: BratteliDiagram, target: BratteliDiagram, levels: Vec<IntMatrix>) -> Result<Self> {
        let m = InducedMap {
            source,
            target,
            levels,
            stationary: false,
        };
        m.verify()?;
        Ok(m)
    }

    /// One matrix `s` with `s X = Y s` for stationary source `X`, target `Y`.
    pub fn stationary(source: BratteliDiagram, target: BratteliDiagram, s: IntMatrix) -> Result<Self> {
        if !source.is_stationary() || !target.is_stationary() {
            return Err(Error::Diagram("stationary map needs stationary diagrams".into()));
        }
        let m = InducedMap {
            source,
            target,
            levels: vec![s],
            stationary: true,
        };
        m.verify()?;
        Ok(m)
    }

    fn verify(&self) -> Result<()> {
        let checks = if self.stationary { 1 } else { self.levels.len().saturating_sub(1) };
        for k in 0..checks {
            let (a, b) = (self.level(k)?, self.level(k + 1)?);
            let left = b.mul(self.source.step(k)?)?;
            let right = self.target.step(k)?.mul(a)?;
            if left != right {
                return Err(Error::Diagram(format!("square at level {k} does not commute")));
            }
        }
        Ok(())
    }

    pub fn level(&self, k: usize) -> Result<&IntMatrix> {
        if self.stationary {
            return Ok(&self.levels[0]);
        }
        self.levels.get(k).ok_or(Error::Stage {
            stage: k,
            available: self.levels.len().saturating_sub(1),
        })
    }

    pub fn source(&self) -> &BratteliDiagram {
        &self.source
    }

    pub fn target(&self) -> &BratteliDiagram {
        &self.target
    }

    pub fn apply(&self, e: &LimitElement) -> Result<LimitElement> {
        e.check(&self.source)?;
        Ok(LimitElement::new(e.stage, self.level(e.stage)?.mul_vec(&e.vector)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;
    use proptest::prelude::*;

    pub(crate) fn golden() -> BratteliDiagram {
        let x = IntMatrix::from_rows(&[[1, 0, 0], [0, 1, 1], [1, 1, 0]]);
        BratteliDiagram::stationary(&x, int_vec(&[1, 1, 1]), 0).unwrap()
    }

    fn fib() -> BratteliDiagram {
        let y = IntMatrix::from_rows(&[[1, 1], [1, 0]]);
        BratteliDiagram::stationary(&y, int_vec(&[1, 1]), 0).unwrap()
    }

    fn dyadic() -> BratteliDiagram {
        BratteliDiagram::stationary(&IntMatrix::from_rows(&[[2]]), int_vec(&[1]), 0).unwrap()
    }

    #[test]
    fn pushing() {
        let e = LimitElement::from_i64(0, &[1, 0]);
        assert_eq!(push(&fib(), &e, 0).unwrap(), e);
        assert_eq!(push(&fib(), &e, 1).unwrap(), LimitElement::from_i64(1, &[1, 1]));
        let f = LimitElement::from_i64(0, &[1, 0, 0]);
        assert_eq!(push(&golden(), &f, 1).unwrap().vector, int_vec(&[1, 0, 1]));
        assert!(push(&fib(), &LimitElement::from_i64(2, &[1, 0]), 1).is_err());
        let finite = BratteliDiagram::new(int_vec(&[1]), vec![IntMatrix::from_rows(&[[2]])]).unwrap();
        assert!(push(&finite, &LimitElement::from_i64(0, &[1]), 2).is_err());
    }

    #[test]
    fn equality() {
        let d = dyadic();
        let a = LimitElement::from_i64(1, &[1]);
        assert_eq!(equal(&d, &a, &a).unwrap(), Equality::Equal { stage: 1 });
        assert!(matches!(
            equal(&d, &a, &LimitElement::from_i64(2, &[2])).unwrap(),
            Equality::Equal { .. }
        ));
        let (x, y) = (LimitElement::from_i64(0, &[1, 0]), LimitElement::from_i64(0, &[0, 1]));
        assert_eq!(equal(&fib(), &x, &y).unwrap(), Equality::Distinct);
        // collapsing generator: the two vertices merge after one step
        let c = BratteliDiagram::stationary(&IntMatrix::from_rows(&[[1, 1], [1, 1]]), int_vec(&[1, 1]), 0).unwrap();
        assert!(matches!(equal(&c, &x, &y).unwrap(), Equality::Equal { stage: 1 }));
    }

    #[test]
    fn parse_elements() {
        let e: LimitElement = "2:1,-3,0".parse().unwrap();
        assert_eq!(e, LimitElement::from_i64(2, &[1, -3, 0]));
        assert_eq!(e.to_string(), "2:1,-3,0");
        let err = "0:1,x".parse::<LimitElement>().unwrap_err();
        assert!(matches!(err, Error::Parse { column: 5, .. }));
    }

    #[test]
    fn partition_map() {
        let y = fib();
        let s = IntMatrix::from_rows(&[[1, 1, 0], [0, 0, 1]]);
        let m = InducedMap::stationary(golden(), y, s).unwrap();
        let e = LimitElement::from_i64(0, &[2, 3, 5]);
        assert_eq!(m.apply(&e).unwrap().vector, int_vec(&[5, 5]));
        assert!(m.apply(&LimitElement::from_i64(0, &[0, 0, 0])).unwrap().is_zero_vector());
        let bad = InducedMap::stationary(golden(), fib(), IntMatrix::from_rows(&[[1, 0, 0], [0, 1, 1]]));
        assert!(bad.is_err());
    }

    #[test]
    fn scale_of_dyadics() {
        let d = dyadic();
        assert!(in_scale(&d, &LimitElement::from_i64(0, &[0]), 10).unwrap().holds());
        assert!(in_scale(&d, &LimitElement::from_i64(0, &[1]), 10).unwrap().holds());
        assert!(in_scale(&d, &LimitElement::from_i64(3, &[5]), 10).unwrap().holds());
        assert!(!in_scale(&d, &LimitElement::from_i64(3, &[9]), 10).unwrap().holds());
    }

    proptest! {
        #[test]
        fn push_commutes_with_partition_map(v in proptest::collection::vec(-20i64..20, 3), k in 0usize..6) {
            let m = InducedMap::stationary(golden(), fib(), IntMatrix::from_rows(&[[1, 1, 0], [0, 0, 1]])).unwrap();
            let e = LimitElement::from_i64(0, &v);
            let a = m.apply(&push(&golden(), &e, k).unwrap()).unwrap();
            let b = push(&fib(), &m.apply(&e).unwrap(), k).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

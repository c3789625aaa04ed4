use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::{push, LimitElement};
use crate::diagram::BratteliDiagram;
use crate::error::Result;
use crate::exact::algebraic::Sign;
use crate::exact::matrix::{IntMatrix, IntVec};
use crate::exact::perron::{adjugate_row, perron};
use crate::exact::poly::QPoly;

/// Iterations spent looking for a nonnegative push once positivity is certified.
const CERTIFIED_SEARCH_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NegativeCertificate {
    /// Leading coefficient of the pushed vector on this class is negative.
    NegativeCoefficient { class: Vec<usize> },
    /// Leading coefficient vanishes but the class component never dies out.
    VanishingCoefficient { class: Vec<usize> },
    /// The pushed vectors repeat while having a negative entry.
    Cycle { stage: usize, period: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PositivityVerdict {
    Positive { stage: usize },
    Zero { stage: usize },
    NotPositive { certificate: NegativeCertificate },
    Inconclusive { depth: usize },
}

impl PositivityVerdict {
    /// Positive or zero.
    pub fn holds(&self) -> bool {
        matches!(self, PositivityVerdict::Positive { .. } | PositivityVerdict::Zero { .. })
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, PositivityVerdict::Inconclusive { .. })
    }

    pub fn stage(&self) -> usize {
        match self {
            PositivityVerdict::Positive { stage } | PositivityVerdict::Zero { stage } => *stage,
            _ => 0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PositivityVerdict::Positive { .. } => "positive",
            PositivityVerdict::Zero { .. } => "zero",
            PositivityVerdict::NotPositive { .. } => "not_positive",
            PositivityVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    /// Re-checks the verdict's certificate against the element.
    pub fn validate(&self, d: &BratteliDiagram, e: &LimitElement) -> Result<bool> {
        Ok(match self {
            PositivityVerdict::Positive { stage } => {
                *stage >= e.stage && push(d, e, *stage)?.is_nonnegative()
            }
            PositivityVerdict::Zero { stage } => *stage >= e.stage && push(d, e, *stage)?.is_zero_vector(),
            PositivityVerdict::NotPositive { certificate } => match certificate {
                NegativeCertificate::Cycle { stage, period } => {
                    let a = push(d, e, *stage)?;
                    let b = push(d, e, stage + period)?;
                    *period > 0 && a.vector == b.vector && !a.is_nonnegative()
                }
                NegativeCertificate::NegativeCoefficient { .. }
                | NegativeCertificate::VanishingCoefficient { .. } => match d.generator() {
                    Some(x) => matches!(analyse(x, &e.vector)?, Outcome::Negative(ref c) if c == certificate),
                    None => false,
                },
            },
            PositivityVerdict::Inconclusive { .. } => true,
        })
    }
}

/// Strongly connected classes of the multiplicity graph, sources first.
pub fn class_decomposition(x: &IntMatrix) -> Vec<Vec<usize>> {
    let n = x.rows();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for w in 0..n {
        for v in 0..n {
            if x[(w, v)].is_positive() {
                g.add_edge(nodes[v], nodes[w], ());
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|i| i.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    classes.reverse();
    classes
}

fn forward_closure(x: &IntMatrix, start: &[usize]) -> Vec<bool> {
    let n = x.rows();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = start.to_vec();
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        stack.extend((0..n).filter(|&w| x[(w, v)].is_positive() && !seen[w]));
    }
    seen
}

fn backward_closure(x: &IntMatrix, start: &[usize]) -> Vec<bool> {
    forward_closure(&x.transpose(), start)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Outcome {
    Positive,
    Negative(NegativeCertificate),
    Undecided,
}

fn restrict(v: &[BigInt], idx: &[usize]) -> IntVec {
    idx.iter().map(|&i| v[i].clone()).collect()
}

fn big(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Sign of the leading coefficient of `X^m v` on each class. Classes with
/// a primitive diagonal block whose Perron root strictly exceeds that of
/// every live ancestor are decided; anything else is left undecided.
fn analyse(x: &IntMatrix, v: &[BigInt]) -> Result<Outcome> {
    let support: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
    let live = forward_closure(x, &support);
    for class in class_decomposition(x) {
        if !class.iter().any(|&i| live[i]) {
            continue;
        }
        let xcc = x.principal(&class);
        if class.len() == 1 && xcc[(0, 0)].is_zero() {
            continue;
        }
        if !xcc.is_primitive()? {
            return Ok(Outcome::Undecided);
        }
        let pd = perron(&xcc)?;
        let vc = restrict(v, &class);
        let anc_mask = backward_closure(x, &class);
        let anc: Vec<usize> = (0..x.rows())
            .filter(|&u| anc_mask[u] && live[u] && !class.contains(&u))
            .collect();
        if anc.is_empty() {
            match pd.sign_of(&pd.dot(&vc)?) {
                Sign::Positive => continue,
                Sign::Negative => {
                    return Ok(Outcome::Negative(NegativeCertificate::NegativeCoefficient { class }))
                }
                Sign::Zero => {
                    let tail = xcc.pow(class.len() as u64)?.mul_vec(&vc)?;
                    if tail.iter().all(Zero::is_zero) {
                        continue;
                    }
                    return Ok(Outcome::Negative(NegativeCertificate::VanishingCoefficient { class }));
                }
            }
        }
        let x_up = x.principal(&anc);
        let (cp, adj) = x_up.char_poly_with_adjugate()?;
        let p_up = QPoly::from_ints(&cp);
        let rho = pd.eigenvalue();
        if rho.is_root_of(&p_up) || rho.has_root_above(&p_up) {
            return Ok(Outcome::Undecided);
        }
        // adj(tI - X_up) v_up
        let v_up = restrict(v, &anc);
        let h: Vec<QPoly> = (0..anc.len())
            .map(|a| {
                adjugate_row(&adj, a)
                    .iter()
                    .zip(&v_up)
                    .fold(QPoly::zero(), |acc, (p, c)| acc.add(&p.scale(&big(c))))
            })
            .collect();
        let mut g = QPoly::zero();
        for (i, &ci) in class.iter().enumerate() {
            let mut f = p_up.scale(&big(&vc[i]));
            for (a, &u) in anc.iter().enumerate() {
                if x[(ci, u)].is_positive() {
                    f = f.add(&h[a].scale(&big(&x[(ci, u)])));
                }
            }
            g = g.add(&pd.left_eigenvector()[i].mul(&f));
        }
        match rho.sign_of(&g) {
            Sign::Positive => {}
            Sign::Negative => return Ok(Outcome::Negative(NegativeCertificate::NegativeCoefficient { class })),
            Sign::Zero => return Ok(Outcome::Undecided),
        }
    }
    Ok(Outcome::Positive)
}

/// Whether `e` lies in the positive cone of the limit.
pub fn positive(d: &BratteliDiagram, e: &LimitElement, depth: usize) -> Result<PositivityVerdict> {
    let start = push(d, e, e.stage)?;
    if start.is_zero_vector() {
        return Ok(PositivityVerdict::Zero { stage: e.stage });
    }
    let outcome = match d.generator() {
        Some(x) if e.stage >= d.depth() || d.steps().iter().all(|m| m == x) => {
            let settled = push(d, e, e.stage + x.rows())?;
            if settled.is_zero_vector() {
                let mut s = e.stage;
                while !push(d, e, s)?.is_zero_vector() {
                    s += 1;
                }
                return Ok(PositivityVerdict::Zero { stage: s });
            }
            analyse(x, &e.vector)?
        }
        _ => Outcome::Undecided,
    };
    if let Outcome::Negative(certificate) = outcome {
        return Ok(PositivityVerdict::NotPositive { certificate });
    }
    let budget = if outcome == Outcome::Positive {
        CERTIFIED_SEARCH_CAP.max(depth)
    } else {
        depth
    };
    let stationary = d.generator().is_some();
    let mut seen: HashMap<IntVec, usize> = HashMap::new();
    let mut cur = start;
    for _ in 0..=budget {
        if cur.is_zero_vector() {
            return Ok(PositivityVerdict::Zero { stage: cur.stage });
        }
        if cur.is_nonnegative() {
            return Ok(PositivityVerdict::Positive { stage: cur.stage });
        }
        if stationary {
            if let Some(&first) = seen.get(&cur.vector) {
                return Ok(PositivityVerdict::NotPositive {
                    certificate: NegativeCertificate::Cycle {
                        stage: first,
                        period: cur.stage - first,
                    },
                });
            }
            seen.insert(cur.vector.clone(), cur.stage);
        } else if cur.stage >= d.depth() {
            break;
        }
        cur = push(d, &cur, cur.stage + 1)?;
    }
    Ok(PositivityVerdict::Inconclusive { depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;
    use proptest::prelude::*;

    fn stat(rows: &[&[i64]]) -> BratteliDiagram {
        let x = IntMatrix::from_rows(rows);
        let n = x.rows();
        BratteliDiagram::stationary(&x, vec![BigInt::from(1); n], 0).unwrap()
    }

    fn golden() -> BratteliDiagram {
        stat(&[&[1, 0, 0], &[0, 1, 1], &[1, 1, 0]])
    }

    fn verdict(d: &BratteliDiagram, v: &[i64]) -> PositivityVerdict {
        positive(d, &LimitElement::from_i64(0, v), 40).unwrap()
    }

    #[test]
    fn classes_of_example_matrix() {
        let x = IntMatrix::from_rows(&[[1, 0, 0], [0, 1, 1], [1, 1, 0]]);
        assert_eq!(class_decomposition(&x), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn basis_vectors_are_positive() {
        let d = golden();
        for i in 0..3 {
            let mut v = [0; 3];
            v[i] = 1;
            assert_eq!(verdict(&d, &v), PositivityVerdict::Positive { stage: 0 });
        }
    }

    #[test]
    fn example_points() {
        let d = golden();
        // pushes to (1,-1,1) then (1,0,0)
        assert_eq!(verdict(&d, &[1, 0, -1]), PositivityVerdict::Positive { stage: 2 });
        assert_eq!(verdict(&d, &[1, 0, 0]), PositivityVerdict::Positive { stage: 0 });
        // fixed vector with a negative entry
        let v = verdict(&d, &[1, -1, 0]);
        assert_eq!(v.label(), "not_positive");
        assert!(v.validate(&d, &LimitElement::from_i64(0, &[1, -1, 0])).unwrap());
        assert_eq!(verdict(&d, &[-1, 5, 5]).label(), "not_positive");
        assert_eq!(verdict(&d, &[0, 0, 0]), PositivityVerdict::Zero { stage: 0 });
    }

    #[test]
    fn vanishing_dominant_coefficient() {
        let d = stat(&[&[3, 1], &[1, 3]]);
        let e = LimitElement::from_i64(0, &[1, -1]);
        let v = positive(&d, &e, 40).unwrap();
        assert!(matches!(
            v,
            PositivityVerdict::NotPositive {
                certificate: NegativeCertificate::VanishingCoefficient { .. }
            }
        ));
        assert!(v.validate(&d, &e).unwrap());
    }

    #[test]
    fn nilpotent_part_gives_zero() {
        let d = stat(&[&[1, 1], &[1, 1]]);
        assert_eq!(verdict(&d, &[1, -1]), PositivityVerdict::Zero { stage: 1 });
    }

    #[test]
    fn finite_prefix_can_be_inconclusive() {
        let d = BratteliDiagram::new(int_vec(&[1, 1]), vec![IntMatrix::from_rows(&[[1, 1], [1, 0]])]).unwrap();
        let v = positive(&d, &LimitElement::from_i64(0, &[2, -3]), 40).unwrap();
        assert_eq!(v, PositivityVerdict::Inconclusive { depth: 40 });
    }

    fn brute(x: &IntMatrix, v: &[i64], steps: usize) -> Option<bool> {
        let mut cur: IntVec = v.iter().map(|&a| BigInt::from(a)).collect();
        for _ in 0..steps {
            if cur.iter().all(|a| !a.is_negative()) {
                return Some(true);
            }
            cur = x.mul_vec(&cur).unwrap();
        }
        None
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn verdicts_agree_with_long_iteration(v in proptest::collection::vec(-9i64..9, 3)) {
            let d = golden();
            let x = d.generator().unwrap().clone();
            let verdict = positive(&d, &LimitElement::from_i64(0, &v), 40).unwrap();
            prop_assert!(verdict.is_decided());
            let e = LimitElement::from_i64(0, &v);
            prop_assert!(verdict.validate(&d, &e).unwrap());
            if !verdict.holds() {
                prop_assert_eq!(brute(&x, &v, 200), None);
            }
        }

        #[test]
        fn cone_is_closed_under_addition(a in proptest::collection::vec(-6i64..6, 3), b in proptest::collection::vec(-6i64..6, 3)) {
            let d = golden();
            let (ea, eb) = (LimitElement::from_i64(0, &a), LimitElement::from_i64(0, &b));
            if positive(&d, &ea, 40).unwrap().holds() && positive(&d, &eb, 40).unwrap().holds() {
                let s = super::super::add(&d, &ea, &eb).unwrap();
                prop_assert!(positive(&d, &s, 40).unwrap().holds());
            }
        }

        #[test]
        fn positive_both_ways_only_for_zero(a in proptest::collection::vec(-6i64..6, 2)) {
            let d = stat(&[&[3, 1], &[1, 3]]);
            let e = LimitElement::from_i64(0, &a);
            let (p, n) = (positive(&d, &e, 40).unwrap(), positive(&d, &e.neg(), 40).unwrap());
            if p.holds() && n.holds() {
                prop_assert!(e.is_zero_vector());
            }
        }
    }
}

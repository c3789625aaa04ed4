//! Literal evaluations of closed-form order and cone tests, used as
//! reference oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::algebraic::{AlgebraicReal, Sign};
use crate::exact::poly::QPoly;
use crate::fdcsl::nest_order_formula;

/// Tail-sum formula for block upper triangular nests.
pub fn finite_nest_formula(sizes: &[usize], a: &[u64], b: &[u64]) -> Result<bool> {
    nest_order_formula(sizes, a, b)
}

/// An element `dyadic + alpha * a` of `Q_d + a Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CutCoordinate {
    #[serde(with = "crate::exact::decimal::ratio")]
    pub dyadic: BigRational,
    #[serde(with = "crate::exact::decimal::int")]
    pub alpha: BigInt,
}

impl CutCoordinate {
    pub fn sign(&self, a: &AlgebraicReal) -> Sign {
        let p = QPoly::new(vec![self.dyadic.clone(), BigRational::from_integer(self.alpha.clone())]);
        a.sign_of(&p)
    }

    pub fn sub(&self, o: &CutCoordinate) -> CutCoordinate {
        CutCoordinate {
            dyadic: &self.dyadic - &o.dyadic,
            alpha: &self.alpha - &o.alpha,
        }
    }

    pub fn add(&self, o: &CutCoordinate) -> CutCoordinate {
        CutCoordinate {
            dyadic: &self.dyadic + &o.dyadic,
            alpha: &self.alpha + &o.alpha,
        }
    }
}

/// Left and right masses of a class of `T(n, 1, m)` inside `M_{2^K}`,
/// where `n = floor(2^K a)`.
pub fn cut_coordinates(n: &BigInt, absolute_stage: usize, v: &[BigInt]) -> Result<(CutCoordinate, CutCoordinate)> {
    if v.len() != 3 {
        return Err(Error::Shape(format!("expected 3 block counts, got {}", v.len())));
    }
    let scale = BigRational::from_integer(BigInt::one() << absolute_stage);
    let left = CutCoordinate {
        dyadic: BigRational::from_integer(&v[0] - &v[1] * n) / &scale,
        alpha: v[1].clone(),
    };
    let right = CutCoordinate {
        dyadic: BigRational::from_integer(&v[2] + &v[1] * (n + 1)) / &scale,
        alpha: -&v[1],
    };
    Ok((left, right))
}

/// `(a + b) S (c + d)` iff `a + b = c + d` and `b <= d`.
pub fn cut_formula(
    alpha: &AlgebraicReal,
    p: &(CutCoordinate, CutCoordinate),
    q: &(CutCoordinate, CutCoordinate),
) -> bool {
    p.0.add(&p.1) == q.0.add(&q.1) && q.1.sub(&p.1).sign(alpha) != Sign::Negative
}

/// Coordinates of a class of `T_2 (x) M_{4^s}`: total trace and the
/// difference functional, normalised so the unit is `(1, 0)`.
pub fn uhf4_coordinates(stage: usize, v: &[BigInt]) -> Result<(BigRational, BigRational)> {
    if v.len() != 2 {
        return Err(Error::Shape(format!("expected 2 block counts, got {}", v.len())));
    }
    let a = BigRational::new(&v[0] + &v[1], BigInt::from(2) << (2 * stage));
    let b = BigRational::new(&v[1] - &v[0], BigInt::from(2) << stage);
    Ok((a, b))
}

/// `(a, b) S (c, d)` iff `a = c` and `b <= d`.
pub fn uhf4_formula(p: &(BigRational, BigRational), q: &(BigRational, BigRational)) -> bool {
    p.0 == q.0 && p.1 <= q.1
}

fn triple(v: &[BigInt]) -> Result<&[BigInt]> {
    if v.len() != 3 {
        return Err(Error::Shape(format!("expected a triple, got {} entries", v.len())));
    }
    Ok(v)
}

/// `(l, m, n) S (q, r, s)` iff `n = s`, `l + m = q + r` and `m <= r`.
pub fn golden_formula(p: &[BigInt], q: &[BigInt]) -> Result<bool> {
    let (p, q) = (triple(p)?, triple(q)?);
    Ok(p[2] == q[2] && &p[0] + &p[1] == &q[0] + &q[1] && p[1] <= q[1])
}

/// The golden ratio, largest root of `t^2 - t - 1`.
pub fn golden() -> AlgebraicReal {
    AlgebraicReal::largest_root(&QPoly::from_i64(&[-1, -1, 1])).expect("t^2 - t - 1 has real roots")
}

fn golden_sign(c0: &BigInt, c1: &BigInt) -> Sign {
    golden().sign_of(&QPoly::from_ints(&[c0.clone(), c1.clone()]))
}

/// The cone as stated: `l >= 0`; for `l = 0`, `m a + n >= 0` with
/// equality only at zero; for `l >= 1`, `m a + n >= l (1 - a)`.
pub fn golden_cone_stated(v: &[BigInt]) -> Result<bool> {
    let v = triple(v)?;
    let (l, m, n) = (&v[0], &v[1], &v[2]);
    Ok(if l.is_negative() {
        false
    } else if l.is_zero() {
        (m.is_zero() && n.is_zero()) || golden_sign(n, m) == Sign::Positive
    } else {
        golden_sign(&(n - l), &(m + l)) != Sign::Negative
    })
}

/// The cone of the stationary system: zero, or `l >= 0` with
/// `(m + l) a + n > 0`.
pub fn golden_cone(v: &[BigInt]) -> Result<bool> {
    let v = triple(v)?;
    let (l, m, n) = (&v[0], &v[1], &v[2]);
    Ok(v.iter().all(Zero::is_zero) || (!l.is_negative() && golden_sign(n, &(m + l)) == Sign::Positive))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;

    #[test]
    fn golden_formula_examples() {
        assert!(golden_formula(&int_vec(&[1, 0, 2]), &int_vec(&[0, 1, 2])).unwrap());
        assert!(!golden_formula(&int_vec(&[1, 0, 2]), &int_vec(&[1, 0, 3])).unwrap());
        assert!(finite_nest_formula(&[2, 1], &[1, 1], &[1, 1]).unwrap());
        assert!(golden_formula(&int_vec(&[1]), &int_vec(&[1])).is_err());
    }

    #[test]
    fn cones_differ_on_the_band() {
        // (1, 0, -1): (m + l) a + n = a - 1 > 0 but a - 1 < l (1 - a) fails
        let v = int_vec(&[1, 0, -1]);
        assert!(golden_cone(&v).unwrap());
        assert!(!golden_cone_stated(&v).unwrap());
        // fixed vector (l, -l, 0) lies in neither
        let f = int_vec(&[2, -2, 0]);
        assert!(!golden_cone(&f).unwrap());
        assert!(!golden_cone_stated(&f).unwrap());
        for v in [[0, 0, 0], [0, 1, 0], [0, -1, 2], [3, 0, 0]] {
            let v = int_vec(&v);
            assert_eq!(golden_cone_stated(&v).unwrap(), golden_cone(&v).unwrap(), "{v:?}");
        }
    }

    #[test]
    fn uhf4_coordinates_are_push_invariant() {
        let v = int_vec(&[2, 5]);
        let w = int_vec(&[3 * 2 + 5, 2 + 3 * 5]);
        assert_eq!(uhf4_coordinates(0, &v).unwrap(), uhf4_coordinates(1, &w).unwrap());
        let unit = uhf4_coordinates(0, &int_vec(&[1, 1])).unwrap();
        assert_eq!(unit, (BigRational::one(), BigRational::zero()));
    }

    #[test]
    fn cut_coordinates_are_push_invariant() {
        // n_2 = 1, n_3 = 3 for a = sqrt 2 - 1, so the connecting bit is 1
        let v = int_vec(&[1, 1, 2]);
        let w = int_vec(&[2 + 1, 1, 4]);
        let a = cut_coordinates(&BigInt::from(1), 2, &v).unwrap();
        let b = cut_coordinates(&BigInt::from(3), 3, &w).unwrap();
        assert_eq!(a, b);
    }
}

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::closed::{cut_coordinates, CutCoordinate};
use super::{LimitSystem, Refutation};
use crate::error::{Error, Result};
use crate::exact::algebraic::{AlgebraicReal, Sign};
use crate::exact::matrix::IntVec;
use crate::exact::poly::QPoly;

/// `T(n_K, 1, m_K)` inside `M_{2^K}` under refinement, where the middle
/// point straddles a fixed irrational cut `a` in `(0, 1)`. System stage 0
/// is the first `K` with `n_K, m_K >= 1`.
#[derive(Debug, Clone)]
pub struct CutSystem {
    alpha: AlgebraicReal,
    base: usize,
    floors: Vec<BigInt>,
}

impl CutSystem {
    /// Precomputes the cut through system stage `stages`.
    pub fn new(alpha: AlgebraicReal, stages: usize) -> Result<Self> {
        if alpha.degree() < 2 || !alpha.is_minimal() {
            return Err(Error::Scale("the cut point must be irrational".into()));
        }
        let zero = num_rational::BigRational::zero();
        let one = num_rational::BigRational::one();
        if alpha.cmp_rational(&zero).is_le() || alpha.cmp_rational(&one).is_ge() {
            return Err(Error::Scale("the cut point must lie in (0, 1)".into()));
        }
        let mut floors = vec![BigInt::zero()];
        let mut base = None;
        let mut k = 0usize;
        loop {
            let n = &floors[k];
            if base.is_none() && n.is_positive() && (BigInt::one() << k) - n - 1u32 >= BigInt::one() {
                base = Some(k);
            }
            if let Some(b) = base {
                if k >= b + stages {
                    break;
                }
            }
            let probe = num_rational::BigRational::new(BigInt::from(2) * n + 1u32, BigInt::one() << (k + 1));
            let bit = u32::from(alpha.cmp_rational(&probe).is_gt());
            floors.push(BigInt::from(2) * n + bit);
            k += 1;
        }
        let base = base.expect("loop exits only after the base is found");
        Ok(CutSystem {
            alpha,
            floors: floors.split_off(base),
            base,
        })
    }

    /// `sqrt 2 - 1`, the positive root of `t^2 + 2t - 1`.
    pub fn sqrt2_minus_one(stages: usize) -> Result<Self> {
        let a = AlgebraicReal::largest_root(&QPoly::from_i64(&[-1, 2, 1])).expect("real roots");
        Self::new(a, stages)
    }

    pub fn alpha(&self) -> &AlgebraicReal {
        &self.alpha
    }

    /// Matrix size exponent `K` of system stage 0.
    pub fn base_stage(&self) -> usize {
        self.base
    }

    fn floor(&self, k: usize) -> Result<&BigInt> {
        self.floors.get(k).ok_or(Error::Stage {
            stage: k,
            available: self.floors.len() - 1,
        })
    }

    /// Connecting bit between system stages `k` and `k + 1`.
    pub fn bit(&self, k: usize) -> Result<bool> {
        let next = self.floor(k + 1)?;
        Ok(*next != BigInt::from(2) * self.floor(k)?)
    }

    /// Left and right masses of a class at system stage `k`.
    pub fn coordinates(&self, k: usize, v: &[BigInt]) -> Result<(CutCoordinate, CutCoordinate)> {
        cut_coordinates(self.floor(k)?, self.base + k, v)
    }
}

impl LimitSystem for CutSystem {
    fn name(&self) -> String {
        "dyadic cut".into()
    }

    fn unit(&self) -> IntVec {
        let n = self.floors[0].clone();
        let m = (BigInt::one() << self.base) - &n - 1u32;
        vec![n, BigInt::one(), m]
    }

    fn max_stage(&self) -> Option<usize> {
        Some(self.floors.len() - 1)
    }

    fn width(&self, k: usize) -> Result<usize> {
        self.floor(k)?;
        Ok(3)
    }

    fn push(&self, k: usize, v: &[BigInt]) -> Result<IntVec> {
        let two = BigInt::from(2);
        Ok(if self.bit(k)? {
            vec![&two * &v[0] + &v[1], v[1].clone(), &two * &v[2]]
        } else {
            vec![&two * &v[0], v[1].clone(), &v[1] + &two * &v[2]]
        })
    }

    fn relation(&self, k: usize) -> Result<Vec<Vec<bool>>> {
        self.floor(k)?;
        Ok((0..3).map(|i| (0..3).map(|j| i <= j).collect()).collect())
    }

    /// The trace: total number of points in `M_{2^K}`.
    fn envelope(&self, k: usize, v: &[BigInt]) -> Option<IntVec> {
        self.floors.get(k)?;
        Some(vec![v.iter().sum()])
    }

    fn future_key(&self, _k: usize) -> Option<usize> {
        None
    }

    /// Units only move leftwards, so the left mass of `p - q` is
    /// nonnegative whenever `p S q`.
    fn obstruction(&self, k: usize, p: &[BigInt], q: &[BigInt]) -> Option<Refutation> {
        let d: IntVec = p.iter().zip(q).map(|(a, b)| a - b).collect();
        let (left, _) = self.coordinates(k, &d).ok()?;
        (left.sign(&self.alpha) == Sign::Negative).then(|| Refutation::NegativeFunctional {
            stage: k,
            functional: "left mass".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;

    #[test]
    fn cut_at_sqrt2_minus_one() {
        let s = CutSystem::sqrt2_minus_one(6).unwrap();
        assert_eq!(s.base_stage(), 2);
        assert_eq!(s.unit(), int_vec(&[1, 1, 2]));
        // 0.0110101000001... in binary
        let bits: Vec<bool> = (0..5).map(|k| s.bit(k).unwrap()).collect();
        assert_eq!(bits, vec![true, false, true, false, true]);
        let u = s.unit();
        let (l, r) = s.coordinates(0, &u).unwrap();
        assert_eq!(l.add(&r).dyadic, num_rational::BigRational::one());
        assert!(l.add(&r).alpha.is_zero());
    }

    #[test]
    fn rational_cut_rejected() {
        let half = AlgebraicReal::from_rational(num_rational::BigRational::new(1.into(), 3.into()));
        assert!(CutSystem::new(half, 3).is_err());
    }
}

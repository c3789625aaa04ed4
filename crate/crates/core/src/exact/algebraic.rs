//! Real algebraic numbers by isolating interval, with exact sign
//! determination of polynomial expressions in them.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::poly::{count_roots, rat, sign_variations, QPoly};

/// Bisections tried by interval arithmetic before the Sturm-Tarski fallback.
pub const DEFAULT_REFINEMENT_BUDGET: usize = 256;

/// Candidate evaluations allowed in Kronecker factor search.
const KRONECKER_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Signed>(v: &T) -> Sign {
        if v.is_positive() {
            Sign::Positive
        } else if v.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, o: Sign) -> Sign {
        match self.as_i8() * o.as_i8() {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

/// A real root of a square-free rational polynomial, pinned by an open
/// interval `(lo, hi)` that contains no other root and whose endpoints are
/// not roots.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraicReal {
    poly: QPoly,
    lo: BigRational,
    hi: BigRational,
    irreducible: bool,
}

impl AlgebraicReal {
    pub fn from_rational(r: BigRational) -> Self {
        let poly = QPoly::new(vec![-r.clone(), BigRational::one()]);
        AlgebraicReal {
            poly,
            lo: &r - BigRational::one(),
            hi: r + BigRational::one(),
            irreducible: true,
        }
    }

    /// The largest real root of `p`, or `None` when `p` has no real roots.
    /// The defining polynomial is reduced to the irreducible factor
    /// carrying the root whenever the factor search completes.
    pub fn largest_root(p: &QPoly) -> Option<Self> {
        let sf = p.square_free();
        sf.degree().filter(|&d| d > 0)?;
        let b = sf.root_bound();
        let mut lo = -b.clone();
        let mut hi = b;
        if count_roots(&sf, &lo, &hi) == 0 {
            return None;
        }
        while count_roots(&sf, &lo, &hi) > 1 {
            let mut mid = (&lo + &hi) / rat(2);
            if sf.eval(&mid).is_zero() {
                mid = (&mid + &hi) / rat(2);
                if sf.eval(&mid).is_zero() {
                    mid = (&lo + &mid) / rat(2);
                }
            }
            if count_roots(&sf, &mid, &hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // (lo, hi] holds one root; make sure hi itself is not that root.
        if sf.eval(&hi).is_zero() {
            let r = hi.clone();
            return Some(Self::from_rational(r));
        }
        let mut a = AlgebraicReal {
            poly: sf,
            lo,
            hi,
            irreducible: false,
        };
        a.reduce_to_factor();
        Some(a)
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    /// Whether the defining polynomial is certified irreducible, i.e. the
    /// minimal polynomial of the number.
    pub fn is_minimal(&self) -> bool {
        self.irreducible
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.degree() == 1 {
            let c = self.poly.coeffs();
            Some(-&c[0] / &c[1])
        } else {
            None
        }
    }

    pub fn approx(&self) -> f64 {
        let mut a = self.clone();
        for _ in 0..60 {
            a.bisect();
        }
        ((&a.lo + &a.hi) / rat(2)).to_f64().unwrap_or(f64::NAN)
    }

    fn bisect(&mut self) {
        let mut mid = (&self.lo + &self.hi) / rat(2);
        let v = self.poly.eval(&mid);
        if v.is_zero() {
            // The root is rational and equals `mid`.
            *self = Self::from_rational(mid);
            return;
        }
        let s_lo = Sign::of(&self.poly.eval(&self.lo));
        if Sign::of(&v) == s_lo {
            std::mem::swap(&mut self.lo, &mut mid);
        } else {
            std::mem::swap(&mut self.hi, &mut mid);
        }
    }

    /// Replace the defining polynomial by the factor vanishing at the number,
    /// splitting off rational roots and then Kronecker factors.
    fn reduce_to_factor(&mut self) {
        loop {
            if self.degree() <= 1 {
                self.irreducible = true;
                return;
            }
            let ints = self.poly.primitive_integer();
            let factor = rational_root_factor(&ints).or_else(|| {
                if self.degree() <= 3 {
                    None
                } else {
                    kronecker_factor(&ints)
                }
            });
            match factor {
                Some(f) => self.split_by(&f),
                None => {
                    // Rational roots exhausted; degree <= 3 is then
                    // irreducible. For higher degree, a `None` from the
                    // Kronecker search is only trusted when it finished.
                    self.irreducible = self.degree() <= 3 || kronecker_completes(&ints);
                    return;
                }
            }
        }
    }

    /// Keep whichever of `f`, `poly / f` vanishes at the number.
    fn split_by(&mut self, f: &QPoly) {
        let (other, r) = self.poly.div_rem(f);
        debug_assert!(r.is_zero());
        self.poly = if count_roots(f, &self.lo, &self.hi) == 1 {
            f.monic()
        } else {
            other.monic()
        };
    }

    /// Restrict the defining polynomial by a factor found elsewhere (gcd with
    /// an expression known to be nonzero at the number).
    pub fn discard_factor(&mut self, g: &QPoly) {
        let (q, r) = self.poly.div_rem(g);
        if r.is_zero() && count_roots(g, &self.lo, &self.hi) == 0 {
            self.poly = q.monic();
        }
    }

    pub fn reduce(&self, g: &QPoly) -> QPoly {
        g.rem(&self.poly)
    }

    /// Whether `g` vanishes at the number.
    pub fn is_root_of(&self, g: &QPoly) -> bool {
        let r = self.reduce(g);
        if r.is_zero() {
            return true;
        }
        if self.irreducible {
            return false;
        }
        let h = r.gcd(&self.poly);
        h.degree().unwrap_or(0) > 0 && count_roots(&h, &self.lo, &self.hi) == 1
    }

    /// Exact sign of `g` at the number.
    pub fn sign_of(&self, g: &QPoly) -> Sign {
        self.sign_of_with_budget(g, DEFAULT_REFINEMENT_BUDGET)
    }

    pub fn sign_of_with_budget(&self, g: &QPoly, budget: usize) -> Sign {
        let r = self.reduce(g);
        if self.is_root_of(&r) {
            return Sign::Zero;
        }
        let mut a = self.clone();
        for _ in 0..=budget {
            let (lo, hi) = r.eval_interval(&a.lo, &a.hi);
            if lo.is_positive() {
                return Sign::Positive;
            }
            if hi.is_negative() {
                return Sign::Negative;
            }
            if let Some(q) = a.as_rational() {
                return Sign::of(&r.eval(&q));
            }
            a.bisect();
        }
        self.sign_by_sturm_tarski(&r)
    }

    /// Sign of `g` at the number from the Tarski query on `(lo, hi)`:
    /// variations of the signed remainder sequence of `(p, p' g)`.
    pub fn sign_by_sturm_tarski(&self, g: &QPoly) -> Sign {
        let p = &self.poly;
        let seq = p.sturm_sequence(&p.derivative().mul(g));
        let v_lo = sign_variations(&seq, &self.lo) as i64;
        let v_hi = sign_variations(&seq, &self.hi) as i64;
        match v_lo - v_hi {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }

    /// Compare with a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        // sign of (t - q) at the number
        let g = QPoly::new(vec![-q.clone(), BigRational::one()]);
        match self.sign_of(&g) {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }

    /// Whether `p` has a real root strictly greater than this number.
    pub fn has_root_above(&self, p: &QPoly) -> bool {
        let sf = p.square_free();
        if sf.degree().unwrap_or(0) == 0 {
            return false;
        }
        let mut a = self.clone();
        let at_self = a.is_root_of(&sf);
        // Shrink until the interval holds no root of `sf` other than possibly
        // the number itself.
        for _ in 0..10_000 {
            let inside = count_roots(&sf, &a.lo, &a.hi);
            if inside == usize::from(at_self) && !sf.eval(&a.hi).is_zero() {
                break;
            }
            a.bisect();
            if a.degree() == 1 {
                break;
            }
        }
        let bound = sf.root_bound();
        if a.hi >= bound {
            return false;
        }
        let mut hi_point = a.hi.clone();
        if sf.eval(&hi_point).is_zero() {
            // only happens when the number is rational and equal to a root
            hi_point += BigRational::new(BigInt::one(), BigInt::from(1u64 << 40));
        }
        count_roots(&sf, &hi_point, &bound) > 0
    }
}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "root of {} in ({}, {}) ~ {:.6}",
            self.poly,
            self.lo,
            self.hi,
            self.approx()
        )
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let e = &n / &d;
            if e != d {
                large.push(e);
            }
        }
        d += 1;
        if small.len() + large.len() > 20_000 {
            break;
        }
    }
    large.reverse();
    small.extend(large);
    small
}

/// A linear factor `(q t - p)` for a rational root `p/q`, if any.
fn rational_root_factor(ints: &[BigInt]) -> Option<QPoly> {
    if ints.len() < 2 {
        return None;
    }
    if ints[0].is_zero() {
        return Some(QPoly::x());
    }
    let poly = QPoly::from_ints(ints);
    for p in divisors(&ints[0]) {
        for q in divisors(ints.last().unwrap()) {
            if !p.gcd(&q).is_one() {
                continue;
            }
            for s in [1, -1] {
                let r = BigRational::new(&p * s, q.clone());
                if poly.eval(&r).is_zero() {
                    return Some(QPoly::new(vec![-r, BigRational::one()]));
                }
            }
        }
    }
    None
}

fn eval_points(ints: &[BigInt], count: usize) -> Vec<(BigInt, BigInt)> {
    let poly = QPoly::from_ints(ints);
    let mut pts = Vec::new();
    let mut k: i64 = 0;
    while pts.len() < count && k < 1000 {
        for x in [k, -k] {
            if pts.len() >= count || (x == -k && k == 0 && !pts.is_empty()) {
                continue;
            }
            if pts.iter().any(|(px, _): &(BigInt, BigInt)| *px == BigInt::from(x)) {
                continue;
            }
            let v = poly.eval(&rat(x)).to_integer();
            if !v.is_zero() {
                pts.push((BigInt::from(x), v));
            }
        }
        k += 1;
    }
    pts
}

fn lagrange(points: &[(BigInt, BigInt)]) -> QPoly {
    let mut acc = QPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut term = QPoly::constant(BigRational::from_integer(yi.clone()));
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                let denom = BigRational::from_integer(xi - xj);
                let lin = QPoly::new(vec![
                    BigRational::from_integer(-xj.clone()) / &denom,
                    BigRational::one() / &denom,
                ]);
                term = term.mul(&lin);
            }
        }
        acc = acc.add(&term);
    }
    acc
}

/// Outcome of one Kronecker sweep: a factor, a completed search with none,
/// or an exhausted budget.
enum Kronecker {
    Factor(QPoly),
    Irreducible,
    Budget,
}

fn kronecker(ints: &[BigInt]) -> Kronecker {
    let deg = ints.len() - 1;
    let target = QPoly::from_ints(ints);
    let mut spent = 0usize;
    for k in 2..=deg / 2 {
        let pts = eval_points(ints, k + 1);
        if pts.len() < k + 1 {
            return Kronecker::Budget;
        }
        let choices: Vec<Vec<BigInt>> = pts
            .iter()
            .map(|(_, v)| {
                divisors(v)
                    .into_iter()
                    .flat_map(|d| [d.clone(), -d])
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; k + 1];
        loop {
            spent += 1;
            if spent > KRONECKER_BUDGET {
                return Kronecker::Budget;
            }
            // Fix the sign of the first value to skip the g / -g duplicate.
            if choices[0][idx[0]].is_positive() {
                let sample: Vec<(BigInt, BigInt)> = pts
                    .iter()
                    .zip(&idx)
                    .zip(&choices)
                    .map(|(((x, _), &i), ch)| (x.clone(), ch[i].clone()))
                    .collect();
                let cand = lagrange(&sample);
                if cand.degree() == Some(k)
                    && cand.coeffs().iter().all(|c| c.is_integer())
                    && target.rem(&cand).is_zero()
                {
                    return Kronecker::Factor(cand);
                }
            }
            let mut pos = 0;
            loop {
                if pos > k {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos > k {
                break;
            }
        }
    }
    Kronecker::Irreducible
}

fn kronecker_factor(ints: &[BigInt]) -> Option<QPoly> {
    match kronecker(ints) {
        Kronecker::Factor(f) => Some(f),
        _ => None,
    }
}

fn kronecker_completes(ints: &[BigInt]) -> bool {
    matches!(kronecker(ints), Kronecker::Irreducible)
}

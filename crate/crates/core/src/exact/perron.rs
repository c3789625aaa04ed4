//! Perron data of primitive nonnegative integer matrices: the dominant
//! eigenvalue as an algebraic real and a left eigenvector over the number
//! field it generates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::algebraic::{AlgebraicReal, Sign};
use super::matrix::IntMatrix;
use super::poly::QPoly;
use crate::error::{Error, Result};

/// Elements of Q(lambda), stored as polynomials in lambda reduced modulo
/// the defining polynomial of the eigenvalue.
pub type FieldElement = QPoly;

#[derive(Clone, Debug)]
pub struct PerronData {
    matrix: IntMatrix,
    eigenvalue: AlgebraicReal,
    left_eigenvector: Vec<FieldElement>,
}

/// Perron eigenvalue and left eigenvector of a primitive matrix.
pub fn perron(m: &IntMatrix) -> Result<PerronData> {
    let n = m.require_square()?;
    m.require_nonnegative()?;
    if !m.is_primitive()? {
        return Err(Error::NotPrimitive {
            bound: IntMatrix::wielandt_bound(n),
        });
    }
    let (cp, adj) = m.char_poly_with_adjugate()?;
    let lambda = AlgebraicReal::largest_root(&QPoly::from_ints(&cp))
        .ok_or_else(|| Error::Internal("primitive matrix without real eigenvalue".into()))?;
    Ok(PerronData::from_adjugate(m.clone(), lambda, &adj))
}

/// Row `r` of `adj(tI - M)` as polynomials in `t`.
pub fn adjugate_row(adj: &[IntMatrix], r: usize) -> Vec<QPoly> {
    let n = adj.len();
    (0..n)
        .map(|j| {
            let mut c = vec![BigInt::zero(); n];
            for (k, mk) in adj.iter().enumerate() {
                c[n - 1 - k] = mk[(r, j)].clone();
            }
            QPoly::from_ints(&c)
        })
        .collect()
}

/// Column `c` of `adj(tI - M)` as polynomials in `t`.
pub fn adjugate_col(adj: &[IntMatrix], c: usize) -> Vec<QPoly> {
    let n = adj.len();
    (0..n)
        .map(|i| {
            let mut co = vec![BigInt::zero(); n];
            for (k, mk) in adj.iter().enumerate() {
                co[n - 1 - k] = mk[(i, c)].clone();
            }
            QPoly::from_ints(&co)
        })
        .collect()
}

impl PerronData {
    fn from_adjugate(matrix: IntMatrix, mut lambda: AlgebraicReal, adj: &[IntMatrix]) -> Self {
        let row = adjugate_row(adj, 0);
        // Each row of adj(lambda I - M) is a left eigenvector; for a primitive
        // matrix its entries are nonzero at lambda.
        let lead = row[0].clone();
        let inverse = loop {
            let (g, s, _) = lead.ext_gcd(lambda.poly());
            if g.degree() == Some(0) {
                break s;
            }
            // A common factor cannot vanish at lambda because the first
            // entry does not; drop it from the modulus.
            lambda.discard_factor(&g);
        };
        let left_eigenvector = row
            .iter()
            .map(|w| lambda.reduce(&w.mul(&inverse)))
            .collect();
        PerronData {
            matrix,
            eigenvalue: lambda,
            left_eigenvector,
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn eigenvalue(&self) -> &AlgebraicReal {
        &self.eigenvalue
    }

    pub fn left_eigenvector(&self) -> &[FieldElement] {
        &self.left_eigenvector
    }

    /// `w X - lambda w`, reduced in Q(lambda). All zero for valid data.
    pub fn eigen_residual(&self) -> Vec<FieldElement> {
        let n = self.left_eigenvector.len();
        (0..n)
            .map(|j| {
                let mut acc = QPoly::zero();
                for (i, wi) in self.left_eigenvector.iter().enumerate() {
                    let x = &self.matrix[(i, j)];
                    if !x.is_zero() {
                        acc = acc.add(&wi.scale(&BigRational::from_integer(x.clone())));
                    }
                }
                acc = acc.sub(&QPoly::x().mul(&self.left_eigenvector[j]));
                self.eigenvalue.reduce(&acc)
            })
            .collect()
    }

    pub fn eigen_identity_holds(&self) -> bool {
        self.eigen_residual()
            .iter()
            .all(|r| self.eigenvalue.is_root_of(r))
    }

    /// `sum v_i w_i` as an element of Q(lambda).
    pub fn dot(&self, v: &[BigInt]) -> Result<FieldElement> {
        if v.len() != self.left_eigenvector.len() {
            return Err(Error::Shape(format!(
                "vector of length {} against eigenvector of length {}",
                v.len(),
                self.left_eigenvector.len()
            )));
        }
        let mut acc = QPoly::zero();
        for (vi, wi) in v.iter().zip(&self.left_eigenvector) {
            if !vi.is_zero() {
                acc = acc.add(&wi.scale(&BigRational::from_integer(vi.clone())));
            }
        }
        Ok(self.eigenvalue.reduce(&acc))
    }

    pub fn sign_of(&self, x: &FieldElement) -> Sign {
        self.eigenvalue.sign_of(x)
    }

    pub fn approx_eigenvector(&self) -> Vec<f64> {
        let lam = self.eigenvalue.approx();
        self.left_eigenvector
            .iter()
            .map(|w| {
                w.coeffs()
                    .iter()
                    .rev()
                    .fold(0.0, |acc, c| acc * lam + ratio_f64(c))
            })
            .collect()
    }
}

fn ratio_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

/// Exact sign of `v . w` for the Perron left eigenvector `w`.
pub fn sign_dot(v: &[BigInt], p: &PerronData) -> Result<Sign> {
    let x = p.dot(v)?;
    Ok(p.sign_of(&x))
}

impl Serialize for PerronData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (lo, hi) = self.eigenvalue.interval();
        let mut st = s.serialize_struct("PerronData", 6)?;
        st.serialize_field("matrix", &self.matrix.to_string())?;
        st.serialize_field("eigenvalue_polynomial", &self.eigenvalue.poly().to_string())?;
        st.serialize_field("polynomial_is_minimal", &self.eigenvalue.is_minimal())?;
        st.serialize_field("isolating_interval", &[lo.to_string(), hi.to_string()])?;
        st.serialize_field("eigenvalue_approx", &self.eigenvalue.approx())?;
        let w: Vec<String> = self
            .left_eigenvector
            .iter()
            .map(|e| e.to_string().replace('t', "λ"))
            .collect();
        st.serialize_field("left_eigenvector", &w)?;
        st.end()
    }
}

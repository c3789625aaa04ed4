use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::positivity::class_decomposition;
use crate::diagram::BratteliDiagram;
use crate::error::Result;
use crate::exact::matrix::{IntMatrix, IntVec};
use crate::exact::perron::perron;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum K0Class {
    /// Unimodular stationary generator: the limit is `Z^rank`.
    FreeAbelian,
    /// The limit is `Z[1/p : p in primes]^rank`.
    Localized { primes: Vec<u64> },
    /// Stationary but neither of the above.
    StationaryPresented { determinant: String },
    /// Non-stationary; the system itself is the description.
    Presented,
}

/// Perron data of one strongly connected class of the generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassData {
    pub vertices: Vec<usize>,
    pub primitive: bool,
    pub eigenvalue_polynomial: Option<String>,
    pub eigenvalue: Option<f64>,
    pub left_eigenvector: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct K0Report {
    pub rank: usize,
    pub classification: K0Class,
    pub generator: Option<Vec<Vec<String>>>,
    pub classes: Vec<ClassData>,
    #[serde(with = "crate::exact::decimal::vecs")]
    pub levels: Vec<IntVec>,
}

fn prime_factors(n: &BigInt) -> Option<Vec<u64>> {
    let mut n = n.abs().to_u64()?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    Some(out)
}

fn nilpotent_mod(x: &IntMatrix, p: u64) -> Result<bool> {
    let n = x.rows();
    let pb = BigInt::from(p);
    let mut acc = IntMatrix::identity(n);
    for _ in 0..n {
        let next = acc.mul(x)?;
        let rows: Vec<Vec<BigInt>> = next.to_rows().into_iter().map(|r| r.into_iter().map(|v| v.mod_floor(&pb)).collect()).collect();
        acc = IntMatrix::from_big_rows(rows, n)?;
    }
    Ok(acc.to_rows().iter().flatten().all(Zero::is_zero))
}

fn class_data(x: &IntMatrix) -> Vec<ClassData> {
    class_decomposition(x)
        .into_iter()
        .map(|vertices| {
            let block = x.principal(&vertices);
            match perron(&block) {
                Ok(pd) => ClassData {
                    vertices,
                    primitive: true,
                    eigenvalue_polynomial: Some(pd.eigenvalue().poly().to_string()),
                    eigenvalue: Some(pd.eigenvalue().approx()),
                    left_eigenvector: Some(
                        pd.left_eigenvector().iter().map(|w| w.to_string().replace('t', "λ")).collect(),
                    ),
                },
                Err(_) => ClassData {
                    vertices,
                    primitive: false,
                    eigenvalue_polynomial: None,
                    eigenvalue: None,
                    left_eigenvector: None,
                },
            }
        })
        .collect()
}

/// Describes the limit group of a diagram.
pub fn k0_report(d: &BratteliDiagram) -> Result<K0Report> {
    let levels = d.level_sizes();
    let Some(x) = d.generator() else {
        return Ok(K0Report {
            rank: d.width(d.depth()),
            classification: K0Class::Presented,
            generator: None,
            classes: Vec::new(),
            levels,
        });
    };
    let det = x.det()?;
    let classification = if det.abs().is_one() {
        K0Class::FreeAbelian
    } else if det.is_zero() {
        K0Class::StationaryPresented { determinant: det.to_string() }
    } else {
        match prime_factors(&det) {
            Some(primes) if primes.iter().map(|&p| nilpotent_mod(x, p)).collect::<Result<Vec<_>>>()?.iter().all(|&b| b) => {
                K0Class::Localized { primes }
            }
            _ => K0Class::StationaryPresented { determinant: det.to_string() },
        }
    };
    Ok(K0Report {
        rank: x.rows(),
        classification,
        generator: Some(x.to_rows().iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect()),
        classes: class_data(x),
        levels,
    })
}

impl fmt::Display for K0Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.classification {
            K0Class::FreeAbelian => writeln!(f, "K0: free abelian of rank {} (unimodular generator)", self.rank)?,
            K0Class::Localized { primes } => {
                let ps: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
                let name = match primes.as_slice() {
                    [2] => "dyadic rationals".to_string(),
                    _ => format!("Z[1/{}]", ps.join(",1/")),
                };
                if self.rank == 1 {
                    writeln!(f, "K0: {name}")?;
                } else {
                    writeln!(f, "K0: ({name})^{}", self.rank)?;
                }
            }
            K0Class::StationaryPresented { determinant } => writeln!(
                f,
                "K0: stationary limit of Z^{} (generator determinant {determinant})",
                self.rank
            )?,
            K0Class::Presented => writeln!(f, "K0: presented direct limit, final rank {}", self.rank)?,
        }
        if let Some(g) = &self.generator {
            let rows: Vec<String> = g.iter().map(|r| format!("[{}]", r.join(", "))).collect();
            writeln!(f, "generator: [{}]", rows.join(", "))?;
        }
        for c in &self.classes {
            match (&c.eigenvalue_polynomial, c.eigenvalue, &c.left_eigenvector) {
                (Some(p), Some(l), Some(w)) => writeln!(
                    f,
                    "class {:?}: Perron root of {p} (~{l:.6}), left eigenvector ({})",
                    c.vertices,
                    w.join(", ")
                )?,
                _ => writeln!(f, "class {:?}: not primitive", c.vertices)?,
            }
        }
        if self.generator.is_none() {
            for (k, l) in self.levels.iter().enumerate() {
                let v: Vec<String> = l.iter().map(|x| x.to_string()).collect();
                writeln!(f, "level {k}: sizes ({})", v.join(", "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;

    fn stat(rows: &[&[i64]]) -> BratteliDiagram {
        let x = IntMatrix::from_rows(rows);
        let n = x.rows();
        BratteliDiagram::stationary(&x, int_vec(&vec![1; n]), 0).unwrap()
    }

    #[test]
    fn reports() {
        let r = k0_report(&stat(&[&[1, 0, 0], &[0, 1, 1], &[1, 1, 0]])).unwrap();
        assert_eq!(r.rank, 3);
        assert_eq!(r.classification, K0Class::FreeAbelian);
        let golden = r.classes.iter().find(|c| c.vertices == vec![1, 2]).unwrap();
        assert_eq!(golden.eigenvalue_polynomial.as_deref(), Some("t^2 - t - 1"));
        assert!((golden.eigenvalue.unwrap() - 1.618034).abs() < 1e-5);

        let r = k0_report(&stat(&[&[2]])).unwrap();
        assert_eq!(r.classification, K0Class::Localized { primes: vec![2] });
        assert!(r.to_string().contains("dyadic rationals"));

        let r = k0_report(&stat(&[&[3, 1], &[1, 3]])).unwrap();
        assert_eq!(r.classification, K0Class::Localized { primes: vec![2] });
        assert!(r.to_string().contains("(dyadic rationals)^2"));

        let r = k0_report(&stat(&[&[2, 1], &[1, 1]])).unwrap();
        assert_eq!(r.classification, K0Class::FreeAbelian);

        let r = k0_report(&stat(&[&[1, 1], &[1, 1]])).unwrap();
        assert!(matches!(r.classification, K0Class::StationaryPresented { .. }));

        let nonstat = BratteliDiagram::new(int_vec(&[1]), vec![IntMatrix::from_rows(&[[2]])]).unwrap();
        assert_eq!(k0_report(&nonstat).unwrap().classification, K0Class::Presented);
    }
}

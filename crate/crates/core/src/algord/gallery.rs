//! The worked example systems, ready for the order procedures.

use num_bigint::BigInt;
use num_traits::One;

use super::{BlockSystem, CutSystem};
use crate::diagram::OrderedBratteliDiagram;
use crate::error::{Error, Result};
use crate::exact::matrix::{int_vec, IntMatrix};
use crate::fdcsl::PreorderAlgebra;
use crate::statpair::{derive_pair, IntermediateSpec, StationaryPair};

/// The block upper triangular nest `T(n_1, ..., n_r)`.
pub fn finite_nest(sizes: &[usize]) -> Result<BlockSystem> {
    BlockSystem::finite(format!("T{sizes:?}"), &PreorderAlgebra::nest(sizes))
}

/// Nest blocks of dyadic sizes `counts[i] / 2^exponent` refined by
/// doubling; the counts must add up to `2^exponent`.
pub fn dyadic_nest(counts: &[u64], exponent: u32) -> Result<BlockSystem> {
    let total: u64 = counts.iter().sum();
    if total != 1u64 << exponent || counts.contains(&0) {
        return Err(Error::Scale(format!("{counts:?} are not positive parts of 2^{exponent}")));
    }
    let r = counts.len();
    let x = IntMatrix::identity(r).scale(&BigInt::from(2));
    let unit = counts.iter().map(|&c| BigInt::from(c)).collect();
    let ones = IntMatrix::from_big_rows(vec![vec![BigInt::one(); r]], r)?;
    BlockSystem::stationary(
        format!("dyadic nest {counts:?}/2^{exponent}"),
        x,
        unit,
        PreorderAlgebra::upper_triangular(r).relation().to_vec(),
        Some((IntMatrix::from_rows(&[[2]]), ones)),
    )
}

/// Cut at `sqrt 2 - 1`.
pub fn irrational_cut(stages: usize) -> Result<CutSystem> {
    CutSystem::sqrt2_minus_one(stages)
}

pub fn uhf4_pair() -> Result<StationaryPair> {
    derive_pair(&IntMatrix::from_rows(&[[3, 1], [1, 3]]), &[2], int_vec(&[1, 1]))
}

/// `T_2 (x) M_{4^k}`.
pub fn uhf4() -> Result<BlockSystem> {
    let p = uhf4_pair()?;
    IntermediateSpec::new(&p, 0, &PreorderAlgebra::upper_triangular(2))?.system(&p)
}

pub fn golden_pair() -> Result<StationaryPair> {
    derive_pair(
        &IntMatrix::from_rows(&[[1, 0, 0], [0, 1, 1], [1, 1, 0]]),
        &[2, 1],
        int_vec(&[1, 1, 1]),
    )
}

pub fn golden() -> Result<BlockSystem> {
    let p = golden_pair()?;
    IntermediateSpec::new(&p, 0, &PreorderAlgebra::upper_triangular(2))?.system(&p)
}

pub fn five_vertex_pair() -> Result<StationaryPair> {
    derive_pair(
        &IntMatrix::from_rows(&[
            [1, 0, 0, 0, 1],
            [0, 1, 0, 0, 1],
            [0, 0, 1, 0, 1],
            [0, 0, 0, 1, 1],
            [1, 1, 1, 1, 3],
        ]),
        &[4, 1],
        int_vec(&[1; 5]),
    )
}

/// The intermediate algebra generated by `T_4` on the grouped vertices.
pub fn five_vertex() -> Result<BlockSystem> {
    let p = five_vertex_pair()?;
    IntermediateSpec::new(&p, 0, &PreorderAlgebra::upper_triangular(4))?.system(&p)
}

/// Fibonacci nests, `x + y -> y + (x + y)`.
pub fn theta() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![1], vec![0, 1]], int_vec(&[1, 1]), 1).expect("valid orders")
}

/// Fibonacci nests, `x + y -> y + (y + x)`.
pub fn psi() -> OrderedBratteliDiagram {
    OrderedBratteliDiagram::stationary(vec![vec![1], vec![1, 0]], int_vec(&[1, 1]), 1).expect("valid orders")
}

/// One vertex, `a -> diag(a, ..., a)` with multiplicities cycling through
/// `pattern`, for `depth` steps.
pub fn standard(pattern: &[usize], depth: usize) -> Result<OrderedBratteliDiagram> {
    if pattern.is_empty() || pattern.contains(&0) {
        return Err(Error::Diagram("multiplicity pattern must be nonempty and positive".into()));
    }
    let orders = (0..depth).map(|k| vec![vec![0; pattern[k % pattern.len()]]]).collect();
    OrderedBratteliDiagram::new(int_vec(&[1]), orders)
}

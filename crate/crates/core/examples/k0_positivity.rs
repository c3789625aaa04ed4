//! Limit group of the Fibonacci diagram, then positivity and scale membership.

use afk0::diagram::BratteliDiagram;
use afk0::dimgroup::{in_scale, k0_report, positive, LimitElement};
use afk0::exact::matrix::{int_vec, IntMatrix};

fn main() -> afk0::Result<()> {
    let x = IntMatrix::from_rows(&[[1, 1], [1, 0]]);
    let d = BratteliDiagram::stationary(&x, int_vec(&[1, 1]), 8)?;

    let report = k0_report(&d)?;
    println!("rank {} classified as {:?}", report.rank, report.classification);
    for c in &report.classes {
        println!("class {:?}: primitive {}, eigenvalue {:?}", c.vertices, c.primitive, c.eigenvalue);
    }

    // 2 - golden ratio is positive; 1 - golden ratio is not.
    for v in [[-1, 2], [-1, 1], [3, -5]] {
        let e = LimitElement::from_i64(0, &v);
        let p = positive(&d, &e, 40)?;
        println!("{e}: {}", p.label());
    }

    let e = LimitElement::from_i64(2, &[2, 1]);
    println!("{e} in scale: {:?}", in_scale(&d, &e, 40)?);
    Ok(())
}

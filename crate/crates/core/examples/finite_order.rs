//! Order on projections of a finite-dimensional CSL algebra: transport
//! between blocks, with an explicit partial isometry as certificate.

use afk0::fdcsl::order::{order_holds, scale_enumerate, strong_order_holds, ScaleVector};
use afk0::fdcsl::PreorderAlgebra;

fn main() -> afk0::Result<()> {
    // Nest with blocks of sizes 2 and 1: block 1 can absorb units of block 0.
    let a = PreorderAlgebra::nest(&[2, 1]);
    let scale = scale_enumerate(&a)?;
    println!("{} scale vectors", scale.len());

    let p = ScaleVector::for_algebra(&a, &[1, 0])?;
    let q = ScaleVector::for_algebra(&a, &[0, 1])?;
    for (x, y) in [(&p, &q), (&q, &p)] {
        match order_holds(&a, x, y)? {
            Some(c) => println!("{:?} S {:?} via units {:?}", x.counts(), y.counts(), c.units),
            None => println!("{:?} S {:?} fails", x.counts(), y.counts()),
        }
    }
    println!("strong order {:?}", strong_order_holds(&a, &q, &p)?.is_some());
    Ok(())
}

//! Algebraic order in a limit of block upper-triangular systems. Holding
//! pairs carry a transport certificate; refuted ones say why.

use afk0::algord::{gallery, limit_order_holds, scale_stage, OrderVerdict};
use afk0::dimgroup::LimitElement;

fn main() -> afk0::Result<()> {
    let sys = gallery::golden()?;
    // Every pair of stage-1 elements below the unit's image.
    let mut scale = vec![];
    for x in 0..=1 {
        for y in 0..=2 {
            for z in 0..=2 {
                scale.push(LimitElement::from_i64(1, &[x, y, z]));
            }
        }
    }
    let (mut holds, mut refuted) = (0, 0);
    let mut shown = std::collections::BTreeSet::new();
    for a in &scale {
        for b in &scale {
            match limit_order_holds(&sys, a, b, 12)? {
                OrderVerdict::Holds { certificate } => {
                    assert!(certificate.validate(&sys, a, b)?);
                    if a != b && shown.insert(format!("holds {}", certificate.stage)) {
                        println!("{a} S {b}: holds at stage {}", certificate.stage);
                    }
                    holds += 1;
                }
                OrderVerdict::Refuted { reason } => {
                    if shown.insert(format!("{reason:?}").split([' ', '{']).next().unwrap().to_string()) {
                        println!("{a} S {b}: refuted ({reason:?})");
                    }
                    refuted += 1;
                }
                OrderVerdict::Inconclusive { depth } => println!("{a} S {b}: undecided to depth {depth}"),
            }
        }
    }
    println!("{holds} pairs hold, {refuted} refuted");

    let e = LimitElement::from_i64(0, &[1, 0, 1]);
    println!("{e} enters the scale at {:?}", scale_stage(&sys, &e, 12)?);
    Ok(())
}

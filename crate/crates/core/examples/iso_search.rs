//! Bounded search for an isomorphism between ordered diagrams, up to
//! telescoping on either side.

use afk0::algord::{gallery, iso_search, IsoOutcome};

fn main() -> afk0::Result<()> {
    let cases = [
        ("2,4 vs 4,2", gallery::standard(&[2, 4], 4)?, gallery::standard(&[4, 2], 4)?),
        ("theta vs psi", gallery::theta(), gallery::psi()),
    ];
    for (name, a, b) in cases {
        match iso_search(&a, &b, 3)? {
            IsoOutcome::Found { certificate } => {
                println!("{name}: isomorphic, certificate valid {}", certificate.validate(&a, &b)?);
            }
            IsoOutcome::Exhausted { depth, nodes } => println!("{name}: nothing to depth {depth} ({nodes} nodes)"),
            IsoOutcome::BudgetExceeded { nodes } => println!("{name}: gave up after {nodes} nodes"),
        }
    }
    Ok(())
}

//! Right-most points that receive no units: count their germs in two
//! ordered diagrams with the same underlying diagram.

use afk0::algord::{distinguish, gallery, SpecialPointVerdict};

fn main() -> afk0::Result<()> {
    let r = distinguish(&gallery::theta(), &gallery::psi(), 12)?;
    for (name, v) in [("theta", &r.first), ("psi", &r.second)] {
        match v {
            SpecialPointVerdict::Exists { witness, germs, .. } => {
                println!("{name}: {germs} germ(s), first through {witness:?}")
            }
            SpecialPointVerdict::None { depth } => println!("{name}: none to depth {depth}"),
        }
    }
    println!("distinguished: {}", r.distinguished);
    Ok(())
}

//! A stationary pair of algebras: the outer diagram, the inner one obtained
//! by collapsing a partition, the connecting map and the intermediate
//! algebras between them.

use afk0::algord::gallery;
use afk0::statpair::{collapse_detect, enumerate_intermediates, s_infinity, unimodularity_check};

fn main() -> afk0::Result<()> {
    let pair = gallery::five_vertex_pair()?;
    println!("X = {:?}", pair.x().to_rows());
    println!("Y = {:?}", pair.y().to_rows());

    let u = unimodularity_check(&pair)?;
    println!("det X = {}, det Y = {}", u.det_x, u.det_y);
    let map = s_infinity(&pair, 3)?;
    println!("connecting map at level 0: {:?}", map.level(0)?.to_rows());

    for (g, range) in pair.groups().iter().enumerate() {
        if range.len() < 2 {
            continue;
        }
        let specs = enumerate_intermediates(&pair, g)?;
        let classes = collapse_detect(&pair, &specs, 4)?;
        println!("group {g}: {} intermediates in {} order classes", specs.len(), classes.len());
    }
    Ok(())
}

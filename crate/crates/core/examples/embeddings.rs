//! Matrix unit embeddings between CSL algebras: strong regularity, and a
//! search that proves no regular embedding exists.

use afk0::fdcsl::search::{obstructed_assignment, obstructed_target, DEFAULT_SEARCH_BUDGET};
use afk0::fdcsl::{search_regular_embedding, MatrixUnitEmbedding, PreorderAlgebra, SearchOutcome};

fn main() -> afk0::Result<()> {
    let refine = MatrixUnitEmbedding::refinement(2, 2);
    println!("refinement 2 -> 4 strongly regular: {}", refine.check_strongly_regular().is_none());
    let crossed = MatrixUnitEmbedding::crossed_t2_t4();
    println!("crossed T2 -> T4 witness: {:?}", crossed.check_strongly_regular());

    let t2 = PreorderAlgebra::upper_triangular(2);
    let src = t2.tensor(&t2);
    let tgt = obstructed_target();
    let found = search_regular_embedding(&t2, &PreorderAlgebra::upper_triangular(4), &[vec![1, 1, 0, 0], vec![0, 0, 1, 1]], DEFAULT_SEARCH_BUDGET)?;
    println!("T2 -> T4 doubling each point: found {}", matches!(found, SearchOutcome::Found(_)));
    match search_regular_embedding(&src, &tgt, &obstructed_assignment(), DEFAULT_SEARCH_BUDGET)? {
        SearchOutcome::Found(e) => println!("found {:?}", e.images()),
        SearchOutcome::None { nodes } => println!("no regular embedding ({nodes} nodes)"),
        SearchOutcome::Inconclusive { nodes } => println!("budget spent after {nodes} nodes"),
    }
    Ok(())
}

//! Finite-dimensional algebras spanned by matrix units over a preorder,
//! their scales and algebraic orders, and embeddings between them.

pub mod embedding;
pub mod order;
pub mod preorder;
pub mod search;

pub use embedding::{EmbeddingVerdict, MatrixUnitEmbedding, RegularityWitness};
pub use order::{
    block_transport, nest_order_formula, order_holds, scale_enumerate, strong_order_holds,
    OrderCertificate, ScaleVector, Transfer,
};
pub use preorder::{enumerate_preorders, validate, PreorderAlgebra, ValidationReport};
pub use search::{conjugacy_check, search_regular_embedding, ConjugacyVerdict, SearchOutcome};

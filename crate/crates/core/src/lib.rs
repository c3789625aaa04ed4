pub mod error;
pub mod exact;
pub mod diagram;
pub mod dimgroup;
pub mod fdcsl;
pub mod algord;
pub mod statpair;
pub mod cli;

pub use error::{Error, Result};

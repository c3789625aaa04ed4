pub mod algebraic;
pub mod decimal;
pub mod matrix;
pub mod perron;
pub mod poly;

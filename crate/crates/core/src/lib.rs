//! Exact sin²-Jacobi–Perron continued fractions for conjugate totally-real
//! cubic vectors, plus the classical Jacobi–Perron algorithm on certified
//! numeric enclosures.

pub mod field;
mod interval;
pub mod matrix;
pub mod states;
pub mod transforms;
pub mod numeric;
pub mod engine;
pub mod periodicity;

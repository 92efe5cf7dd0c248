pub mod dtta;
pub mod error;
pub mod field;
pub mod sexp;
pub mod transducer;
pub mod tree;
pub mod poly;
pub mod system;
pub mod linalg;
pub mod affine;
pub mod invariant;
pub mod group;
pub mod pipeline;
pub mod format;
pub mod cli;

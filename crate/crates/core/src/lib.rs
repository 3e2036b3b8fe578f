//! Bookkeeping engine for quasihomogeneous blowups of manifolds with
//! corners, polyhomogeneous index families, and the operator calculus built
//! on the resulting double and triple spaces.

pub mod a_spaces;
pub mod cli;
pub mod corner_spaces;
pub mod densities;
pub mod index_algebra;
pub mod model_symbols;
pub mod op_calculus;
pub mod rational;

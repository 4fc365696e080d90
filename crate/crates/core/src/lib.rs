//! Semidefinite encodings of graph 3-colorability for graphs of maximum
//! degree 4, a dense interior-point solver for them, and a harness that
//! checks every solver verdict against exact brute-force coloring.

pub mod cones;
pub mod encoder;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod solver;

//! Finite-radius experiments on finitely presented groups: Cayley balls,
//! geodesics, fellow traveling, loop shortening, almost convexity and
//! filling certificates.

pub mod cayley;
pub mod fellow;
pub mod hnn;
pub mod presentation;
pub mod properties;
pub mod solver;
pub mod zoo;

pub use presentation::{parse_presentation, Alphabet, Letter, Presentation, Word};
pub use solver::{build_hnn_solver, build_solver, ElementKey, HnnSolver, Solver, WordProblem};

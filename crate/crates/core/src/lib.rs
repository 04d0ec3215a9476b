//! Field algebras over finite-dimensional symplectic spaces.
//!
//! Weyl representations (Schrodinger, regular, finite clock/shift), the
//! twisted convolution algebra of measures, graded projections onto the
//! components C*(E), and N-body style spectral analysis built on top.

pub mod error;
pub mod grading;
pub mod lattice;
pub mod linalg;
pub mod rep;
pub mod spectra;
pub mod symplin;
pub mod tol;
pub mod twisted;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Thread count for dense linear algebra; `0` or `1` runs sequentially.
pub fn set_threads(n: usize) {
    let par = if n <= 1 { faer::Par::Seq } else { faer::Par::rayon(n) };
    faer::set_global_parallelism(par);
}

//! Simulation and pulse-parameter optimization for coherently driven,
//! dissipative quantum systems obeying a Lindblad-form Liouville equation.
//!
//! Units: ħ = 1; energies and rates are angular frequencies.

pub mod config;
pub mod control;
pub mod error;
pub mod liouville;
pub mod model;
pub mod output;
pub mod propagation;
pub mod pumping;
pub mod runner;
pub mod states;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Conjugate transpose shorthand kept out of hot loops.
pub(crate) fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Largest entrywise |m - m†|.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

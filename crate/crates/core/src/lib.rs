//! Geometric GKSL (Lindblad) dynamics on su(n).
//!
//! * [`liealg`]: dense complex matrices, su(n) bases, structure constants, seeded sampling.
//! * [`channels`]: GKSL dissipators and the preset channel catalog.
//! * [`acsp`]: adjoint torsion, diamond operator, advected variables and the
//!   Euler–Poincaré vector field that reproduces the Hermitian-channel generator.
//! * [`bloch`]: Bloch coordinates, coordinate-space fields and closed-form solutions.
//! * [`dynamics`]: fixed-step RK4, trajectories with diagnostics, the `(ρ, z)` purity ledger.
//! * [`brackets`]: Lie–Poisson and metric brackets, commutant projections, double-bracket flows.
//! * [`verify`]: Haar twirls, commutator factorization, uniqueness and bound checks.

pub mod acsp;
pub mod bloch;
pub mod brackets;
pub mod channels;
pub mod dynamics;
pub mod error;
pub mod liealg;
pub mod verify;

pub use error::{Error, Result};
pub use liealg::{Basis, ComplexMatrix, DensityMatrix, HermitianOperator, SeededRng};

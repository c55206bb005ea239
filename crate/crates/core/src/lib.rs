//! Simulation library for work extraction enabled by quantum nondemolition
//! (QND) measurements of a qubit coupled to a non-Markovian bosonic bath.
//!
//! The library covers four layers of the problem:
//!
//! - [`bath`] / [`modulation`]: the Lorentzian bath response `G_T(ω)` with
//!   detailed-balance (KMS) thermal weighting, and the piston drive `ω(t)`
//!   with its accumulated phase factor `ε(t)` and Bessel sideband expansion.
//! - [`kernels`]: weak-coupling, non-Markovian relaxation integrals
//!   `J_e(t)`, `J_g(t)` obtained as spectral overlaps of the bath response
//!   with the modulation spectrum, and the polarization trajectory `s(t)`.
//! - [`work`]: cycle work through three interchangeable routes (quadrature
//!   of `-∮ s ω̇ dt`, a zero-temperature closed form, and a strongly
//!   non-Markovian approximation), selective-measurement work, the
//!   measurement/information bounds and the three-stroke optimal-cycle
//!   ledger.
//! - [`exactsim`]: numerically exact dynamics of the discretized
//!   qubit + probe + modes supersystem: thermal states, the nondemolition
//!   dephasing channel and its CNOT-pulse realization, piecewise-exponential
//!   propagation with energy-flow traces, and total-work audits.
//! - [`markovian`]: the Pauli rate-equation baseline with detailed balance,
//!   entropy-production inequality, and the no-work theorem for closed
//!   cycles on a single Markovian bath.
//!
//! All quantities are in natural units (`ħ = k_B = 1`).

pub mod bath;
pub mod error;
pub mod exactsim;
pub mod kernels;
pub mod markovian;
pub mod modulation;
pub mod numerics;
pub mod work;

pub use bath::{BathSpec, SpectralTruncation};
pub use error::{Error, Result};
pub use exactsim::{DensityOperator, EnergyTrace, SupersystemModel};
pub use kernels::KernelTable;
pub use modulation::{Drive, DriveSpec, SinusoidDrive};
pub use work::WorkLedger;

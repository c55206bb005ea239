//! Numerically exact dynamics of the discretized supersystem: a qubit S, an
//! optional two-state probe P (H_P = 0), and N bosonic modes B truncated at
//! a Fock cutoff, with full σ_x ⊗ (a + a†) coupling (no rotating-wave
//! approximation — the equilibrium correlation energy ⟨H_SB⟩ < 0 is the
//! whole point).
//!
//! Basis ordering: (s ∈ {g, e}) ⊗ (p ∈ {0, 1}) ⊗ mode occupations, index
//! `(s·p_dim + p)·b_dim + b` with the mode word `b` in big-endian digit
//! order.

mod channel;
mod density;
mod model;
mod propagate;

pub use channel::{
    cnot_channel, ideal_cnot_sp, nsm_channel, pulse_profile, pulse_unitary_sp, selective_channel,
    Outcome,
};
pub use density::{entropy_of, DensityOperator};
pub use model::{discretize_bath, Measurement, SpaceDims, SupersystemModel};
pub use propagate::{
    cnot_pulse_propagate, probe_reuse_check, propagate, run_measurement_cycle, total_work_audit,
    CycleRun, EnergyTrace, ProbeReuseReport, PropagateOptions,
};

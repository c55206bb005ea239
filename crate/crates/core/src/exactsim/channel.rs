//! Measurement channels: the nondemolition dephasing channel, its selective
//! (read) counterpart, and the CNOT realizations (exact permutation and
//! smooth pulse profile).

use super::density::DensityOperator;
use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ground,
    Excited,
}

/// Non-selective measurement of the qubit energy:
/// ρ ↦ |e⟩⟨e| ρ |e⟩⟨e| + |g⟩⟨g| ρ |g⟩⟨g| (projectors on S alone).
/// Diagonal S-blocks are preserved bit-exactly.
pub fn nsm_channel(rho: &DensityOperator) -> DensityOperator {
    let mut out = rho.clone();
    let d = rho.dims;
    let block = d.p_dim() * d.b_dim();
    for i in 0..d.dim() {
        for j in 0..d.dim() {
            if i / block != j / block {
                out.mat[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    out
}

/// Selective measurement: project onto the qubit state `outcome` and
/// renormalize. Returns (probability, conditional state). Fails when the
/// outcome probability is below 1e−14.
pub fn selective_channel(
    rho: &DensityOperator,
    outcome: Outcome,
) -> Result<(f64, DensityOperator)> {
    let d = rho.dims;
    let block = d.p_dim() * d.b_dim();
    let s = match outcome {
        Outcome::Ground => 0,
        Outcome::Excited => 1,
    };
    let mut p = 0.0;
    for b in s * block..(s + 1) * block {
        p += rho.mat[(b, b)].re;
    }
    if p < 1e-14 {
        return Err(Error::ZeroProbability { p });
    }
    let mut out = Array2::<C64>::zeros(rho.mat.raw_dim());
    let scale = C64::new(1.0 / p, 0.0);
    for i in s * block..(s + 1) * block {
        for j in s * block..(s + 1) * block {
            out[(i, j)] = rho.mat[(i, j)] * scale;
        }
    }
    Ok((p, DensityOperator::new(out, d)?))
}

/// Exact CNOT on S ⊗ P (control = qubit in |e⟩, target = probe), as a basis
/// permutation: (e, p, b) ↔ (e, 1−p, b). Traces nothing out.
pub fn cnot_channel(rho: &DensityOperator) -> Result<DensityOperator> {
    let d = rho.dims;
    if !d.has_probe() {
        return Err(Error::invalid("cnot", "model has no probe"));
    }
    let n = d.dim();
    let b_dim = d.b_dim();
    let perm: Vec<usize> = (0..n)
        .map(|i| {
            let s = i / (2 * b_dim);
            let p = (i / b_dim) % 2;
            let b = i % b_dim;
            if s == 1 {
                d.index(1, 1 - p, b)
            } else {
                i
            }
        })
        .collect();
    let mut out = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[(perm[i], perm[j])] = rho.mat[(i, j)];
        }
    }
    DensityOperator::new(out, d)
}

/// Smooth measurement-pulse profile
/// h(t) = (π/4τ_m) (tanh²((t − t_m)/τ_m) − 1), with ∫ h dt = −π/2.
pub fn pulse_profile(t: f64, t_m: f64, tau_m: f64) -> f64 {
    let x = ((t - t_m) / tau_m).tanh();
    std::f64::consts::PI / (4.0 * tau_m) * (x * x - 1.0)
}

/// Time-ordered propagation of the pulse Hamiltonian
/// h(t)|e⟩⟨e| ⊗ (1 − σ_x^P) alone, on the 4-dimensional S ⊗ P space
/// (basis g0, g1, e0, e1), over [t_m − half_width·τ_m, t_m + half_width·τ_m]
/// with midpoint-sampled exponential steps.
pub fn pulse_unitary_sp(t_m: f64, tau_m: f64, half_width: f64, n_steps: usize) -> Array2<C64> {
    let t0 = t_m - half_width * tau_m;
    let t1 = t_m + half_width * tau_m;
    let dt = (t1 - t0) / n_steps as f64;
    let mut u = Array2::<C64>::eye(4);
    for k in 0..n_steps {
        let t_mid = t0 + (k as f64 + 0.5) * dt;
        let a = pulse_profile(t_mid, t_m, tau_m) * dt;
        // exp(−i a (1 − σ_x)) on the e-block = e^{−ia}(cos a + i sin a σ_x)
        let phase = C64::new(0.0, -a).exp();
        let c = phase * C64::new(a.cos(), 0.0);
        let s = phase * C64::new(0.0, a.sin());
        let mut step = Array2::<C64>::eye(4);
        step[(2, 2)] = c;
        step[(3, 3)] = c;
        step[(2, 3)] = s;
        step[(3, 2)] = s;
        u = step.dot(&u);
    }
    u
}

/// The ideal CNOT on S ⊗ P with the qubit as control.
pub fn ideal_cnot_sp() -> Array2<C64> {
    let mut u = Array2::<C64>::zeros((4, 4));
    u[(0, 0)] = C64::new(1.0, 0.0);
    u[(1, 1)] = C64::new(1.0, 0.0);
    u[(2, 3)] = C64::new(1.0, 0.0);
    u[(3, 2)] = C64::new(1.0, 0.0);
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathSpec;
    use crate::exactsim::model::{discretize_bath, Measurement, SupersystemModel};
    use crate::modulation::{DriveSpec, SinusoidDrive};
    use std::sync::Arc;

    fn small_model(eta: f64, probe: bool, probe_d: f64) -> SupersystemModel {
        let bath = BathSpec::new(eta, 10.0 / 7.0, 10.0, 3.74).unwrap();
        let (freqs, gs) = discretize_bath(&bath, 3, 4.0).unwrap();
        let drive = Arc::new(
            SinusoidDrive::new(DriveSpec {
                omega_a: 1.0,
                delta: 0.25,
                omega_mod: 2.5,
                t_start: 1.0,
            })
            .unwrap(),
        );
        SupersystemModel::new(
            drive,
            bath,
            freqs,
            gs,
            2,
            probe,
            Measurement::Instantaneous { t_m: 1.0 },
            probe_d,
            None,
            8192,
        )
        .unwrap()
    }

    #[test]
    fn nsm_is_idempotent_and_preserves_diagonal_blocks() {
        let m = small_model(0.2, false, 0.0);
        let rho = m.thermal_state(3.74).unwrap();
        let once = nsm_channel(&rho);
        let twice = nsm_channel(&once);
        assert_eq!(once.mat, twice.mat);
        // reduced qubit and bath states unchanged (bit-exact diagonal blocks)
        let s_before = rho.reduce_s();
        let s_after = once.reduce_s();
        for i in 0..2 {
            assert_eq!(s_before[(i, i)], s_after[(i, i)]);
        }
        let b_before = rho.reduce_b();
        let b_after = once.reduce_b();
        let worst = (&b_before - &b_after)
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-14);
    }

    #[test]
    fn nsm_zeroes_correlation_energy() {
        let m = small_model(0.25, false, 0.0);
        let rho = m.thermal_state(3.74).unwrap();
        let before = rho.expectation(m.h_sb());
        assert!(before < 0.0);
        let after = nsm_channel(&rho);
        assert!(after.expectation(m.h_sb()).abs() < 1e-12);
    }

    #[test]
    fn nsm_never_decreases_entropy() {
        let m = small_model(0.2, false, 0.0);
        for beta in [0.5, 3.74, 20.0] {
            let rho = m.thermal_state(beta).unwrap();
            let s0 = rho.entropy().unwrap();
            let s1 = nsm_channel(&rho).entropy().unwrap();
            assert!(s1 >= s0 - 1e-10, "β={beta}: {s1} < {s0}");
        }
    }

    #[test]
    fn selective_outcomes_mix_back_to_nsm() {
        let m = small_model(0.2, false, 0.0);
        let rho = m.thermal_state(3.74).unwrap();
        let (p_g, rho_g) = selective_channel(&rho, Outcome::Ground).unwrap();
        let (p_e, rho_e) = selective_channel(&rho, Outcome::Excited).unwrap();
        assert!((p_g + p_e - 1.0).abs() < 1e-14);
        let mixed = &rho_g.mat * C64::new(p_g, 0.0) + &rho_e.mat * C64::new(p_e, 0.0);
        let nsm = nsm_channel(&rho);
        let worst = (&mixed - &nsm.mat)
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-14, "mixture deviates by {worst}");
    }

    #[test]
    fn selective_zero_probability_fails() {
        // pure |g⟩ ⊗ vacuum: asking for the excited outcome must fail
        let m = small_model(0.0, false, 0.0);
        let rho = m.thermal_state(f64::INFINITY).unwrap();
        let (p, cond) = selective_channel(&rho, Outcome::Ground).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let diff = (&cond.mat - &rho.mat)
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        assert!(diff < 1e-12);
        assert!(matches!(
            selective_channel(&rho, Outcome::Excited),
            Err(Error::ZeroProbability { .. })
        ));
    }

    #[test]
    fn selective_probability_tracks_equilibrium_polarization() {
        let m = small_model(0.1, false, 0.0);
        let rho = m.thermal_state(3.74).unwrap();
        let (p_e, _) = selective_channel(&rho, Outcome::Excited).unwrap();
        let s_eq = crate::kernels::equilibrium_polarization(3.74, 1.0);
        // agreement up to O(η²) interaction dressing
        assert!((p_e - (0.5 + s_eq)).abs() < 0.02, "p_e = {p_e}");
    }

    #[test]
    fn cnot_with_diagonal_probe_implements_nsm() {
        // any probe (1 + dσ_z)/2 leaves the same reduced channel on S+B
        for d in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let m = small_model(0.2, true, d);
            let rho = m.thermal_state(3.74).unwrap();
            let after = cnot_channel(&rho).unwrap();
            let reduced = after.reduce_sb();
            let want = nsm_channel(&rho.reduce_sb());
            let worst = (&reduced.mat - &want.mat)
                .iter()
                .map(|v| v.norm())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-13, "d={d}: deviation {worst}");
        }
    }

    #[test]
    fn pulse_profile_integral_is_minus_half_pi() {
        let tau = 1e-3;
        let q = crate::numerics::quad::adaptive(
            |t| pulse_profile(t, 0.0, tau),
            -30.0 * tau,
            30.0 * tau,
            1e-13,
            4000,
        )
        .unwrap();
        assert!(
            (q.value + std::f64::consts::FRAC_PI_2).abs() < 1e-10,
            "∫h = {}",
            q.value
        );
    }

    #[test]
    fn pulse_unitary_converges_to_cnot() {
        let u = pulse_unitary_sp(0.0, 1e-3, 9.0, 4000);
        let ideal = ideal_cnot_sp();
        // fidelity |Tr(U_C† U)|/4 up to global phase
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                tr += ideal[(j, i)].conj() * u[(j, i)];
            }
        }
        let fidelity = tr.norm() / 4.0;
        assert!(fidelity >= 1.0 - 1e-4, "fidelity {fidelity}");
        // CNOT action on basis states
        // |e,0⟩ → |e,1⟩ up to phase
        assert!(u[(3, 2)].norm() > 1.0 - 1e-4);
        assert!(u[(2, 2)].norm() < 1e-2);
        // |g,0⟩ untouched
        assert!(u[(0, 0)].norm() > 1.0 - 1e-6);
    }
}

//! The discretized supersystem: star discretization of the bath, operator
//! construction, and thermal states.

use super::density::DensityOperator;
use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::modulation::Drive;
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use std::sync::Arc;

/// Factor layout of the Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceDims {
    probe: bool,
    n_modes: usize,
    fock_cutoff: usize,
}

impl SpaceDims {
    pub fn new(probe: bool, n_modes: usize, fock_cutoff: usize) -> Self {
        SpaceDims {
            probe,
            n_modes,
            fock_cutoff,
        }
    }

    pub fn p_dim(&self) -> usize {
        if self.probe {
            2
        } else {
            1
        }
    }

    pub fn local_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn b_dim(&self) -> usize {
        self.local_dim().pow(self.n_modes as u32)
    }

    pub fn dim(&self) -> usize {
        2 * self.p_dim() * self.b_dim()
    }

    pub fn has_probe(&self) -> bool {
        self.probe
    }

    pub fn without_probe(&self) -> SpaceDims {
        SpaceDims {
            probe: false,
            ..*self
        }
    }

    /// Flat index of (s, p, mode word b).
    pub fn index(&self, s: usize, p: usize, b: usize) -> usize {
        (s * self.p_dim() + p) * self.b_dim() + b
    }

    /// Occupation of mode `k` in mode word `b` (big-endian digits).
    pub fn occupation(&self, b: usize, k: usize) -> usize {
        let stride = self.local_dim().pow((self.n_modes - 1 - k) as u32);
        (b / stride) % self.local_dim()
    }
}

/// When and how the qubit energy is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measurement {
    /// Exact dephasing channel applied at `t_m`.
    Instantaneous { t_m: f64 },
    /// Smooth CNOT pulse of width `tau_m` centered at `t_m` (requires the
    /// probe).
    Pulse { t_m: f64, tau_m: f64 },
}

impl Measurement {
    pub fn t_m(&self) -> f64 {
        match self {
            Measurement::Instantaneous { t_m } => *t_m,
            Measurement::Pulse { t_m, .. } => *t_m,
        }
    }
}

/// Star discretization of the bath: uniform bins over
/// [ω_0 − span/tc, ω_0 + span/tc], one mode per bin center, with
/// g_k² = (1/2π) ∫_bin G_0(ω) dω (closed form through arctan).
/// Bins reaching below ω = 0 are clamped (and logged).
pub fn discretize_bath(
    bath: &BathSpec,
    n_modes: usize,
    span_widths: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    bath.validate()?;
    if n_modes == 0 {
        return Err(Error::invalid("discretization", "need n_modes ≥ 1"));
    }
    let w = bath.width();
    let lo = bath.omega0 - span_widths * w;
    let hi = bath.omega0 + span_widths * w;
    if lo < 0.0 {
        log::warn!("bath discretization grid extends below ω = 0; clamping");
    }
    let area = |a: f64, b: f64| -> f64 {
        // (1/2π) ∫_a^b G_0 = η²/(2π) [atan((ω−ω0) tc)]_max(a,0)^b
        let a = a.max(0.0);
        if b <= a {
            return 0.0;
        }
        bath.eta * bath.eta / (2.0 * std::f64::consts::PI)
            * (((b - bath.omega0) * bath.tc).atan() - ((a - bath.omega0) * bath.tc).atan())
    };
    let mut freqs = Vec::with_capacity(n_modes);
    let mut couplings = Vec::with_capacity(n_modes);
    let step = (hi - lo) / n_modes as f64;
    for k in 0..n_modes {
        let a = lo + k as f64 * step;
        let b = a + step;
        let center = (0.5 * (a + b)).max(0.0);
        freqs.push(center);
        couplings.push(area(a, b).sqrt());
    }
    Ok((freqs, couplings))
}

/// The full qubit + probe + modes model with precomputed dense operators.
///
/// H(t) = ω(t) σ_z/2 + Σ_k ω_k a_k†a_k + σ_x ⊗ Σ_k g_k (a_k + a_k†)
///        [+ h(t) |e⟩⟨e| ⊗ (1 − σ_x^P) during a measurement pulse]
pub struct SupersystemModel {
    pub drive: Arc<dyn Drive>,
    pub bath: BathSpec,
    pub mode_freqs: Vec<f64>,
    pub couplings: Vec<f64>,
    pub dims: SpaceDims,
    pub measurement: Measurement,
    /// Probe preparation (1 + d σ_z)/2; d = 0 is the fully mixed probe.
    pub probe_d: f64,
    /// Optional probe phase reference for coherence plots (H_P = 0, so it
    /// never enters the dynamics or the recorded magnitudes).
    pub probe_freq: Option<f64>,
    // dense static operators
    h_static: Array2<C64>,
    h_sb: Array2<C64>,
    sz_half: Vec<f64>,
    hb_diag: Vec<f64>,
    /// (i, j) index pairs |e,1,n⟩⟨g,0,n±1| tracked as S–P coherences.
    coherence_pairs: Vec<(usize, usize)>,
}

impl SupersystemModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        drive: Arc<dyn Drive>,
        bath: BathSpec,
        mode_freqs: Vec<f64>,
        couplings: Vec<f64>,
        fock_cutoff: usize,
        include_probe: bool,
        measurement: Measurement,
        probe_d: f64,
        probe_freq: Option<f64>,
        dim_cap: usize,
    ) -> Result<Self> {
        if mode_freqs.len() != couplings.len() {
            return Err(Error::invalid("model", "mode/coupling length mismatch"));
        }
        if !(-1.0..=1.0).contains(&probe_d) {
            return Err(Error::invalid("model", format!("probe_d = {probe_d} outside [−1, 1]")));
        }
        if let Measurement::Pulse { tau_m, .. } = measurement {
            if !include_probe {
                return Err(Error::invalid("model", "a CNOT pulse requires the probe"));
            }
            if tau_m <= 0.0 {
                return Err(Error::invalid("model", "tau_m must be > 0"));
            }
        }
        let dims = SpaceDims::new(include_probe, mode_freqs.len(), fock_cutoff);
        let dim = dims.dim();
        if dim > dim_cap {
            return Err(Error::DimensionCap {
                required: dim,
                cap: dim_cap,
            });
        }
        let mut model = SupersystemModel {
            drive,
            bath,
            mode_freqs,
            couplings,
            dims,
            measurement,
            probe_d,
            probe_freq,
            h_static: Array2::zeros((dim, dim)),
            h_sb: Array2::zeros((dim, dim)),
            sz_half: vec![0.0; dim],
            hb_diag: vec![0.0; dim],
            coherence_pairs: Vec::new(),
        };
        model.build_operators();
        Ok(model)
    }

    fn build_operators(&mut self) {
        let d = self.dims;
        let local = d.local_dim();
        let n_modes = d.n_modes();
        // diagonal pieces
        for s in 0..2 {
            for p in 0..d.p_dim() {
                for b in 0..d.b_dim() {
                    let i = d.index(s, p, b);
                    self.sz_half[i] = if s == 1 { 0.5 } else { -0.5 };
                    let mut eb = 0.0;
                    for k in 0..n_modes {
                        eb += self.mode_freqs[k] * d.occupation(b, k) as f64;
                    }
                    self.hb_diag[i] = eb;
                    self.h_static[(i, i)] += C64::new(eb, 0.0);
                }
            }
        }
        // σ_x ⊗ B̂ with B̂ = Σ_k g_k (a_k + a_k†): connects s ↔ 1−s and
        // n_k ↔ n_k ± 1. Each unordered pair is generated once, from its
        // lower-occupation side, together with its Hermitian image.
        for s in 0..2 {
            for p in 0..d.p_dim() {
                for b in 0..d.b_dim() {
                    let i = d.index(s, p, b);
                    for k in 0..n_modes {
                        let occ = d.occupation(b, k);
                        let stride = local.pow((n_modes - 1 - k) as u32);
                        if occ + 1 < local {
                            // a† on mode k
                            let b2 = b + stride;
                            let j = d.index(1 - s, p, b2);
                            let amp = self.couplings[k] * ((occ + 1) as f64).sqrt();
                            self.h_sb[(j, i)] += C64::new(amp, 0.0);
                            self.h_sb[(i, j)] += C64::new(amp, 0.0);
                        }
                    }
                }
            }
        }
        self.h_static = &self.h_static + &self.h_sb;
        // S–P coherence pairs |e,1,n⟩⟨g,0,n±1|
        if d.has_probe() {
            for b1 in 0..d.b_dim() {
                for k in 0..n_modes {
                    let occ = d.occupation(b1, k);
                    let stride = local.pow((n_modes - 1 - k) as u32);
                    if occ + 1 < local {
                        self.coherence_pairs
                            .push((d.index(1, 1, b1), d.index(0, 0, b1 + stride)));
                    }
                    if occ > 0 {
                        self.coherence_pairs
                            .push((d.index(1, 1, b1), d.index(0, 0, b1 - stride)));
                    }
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.dim()
    }

    /// Static part H_B + H_SB (time-independent under the drive).
    pub fn h_static(&self) -> &Array2<C64> {
        &self.h_static
    }

    pub fn h_sb(&self) -> &Array2<C64> {
        &self.h_sb
    }

    /// Diagonal of σ_z/2 over the full space.
    pub fn sz_half(&self) -> &[f64] {
        &self.sz_half
    }

    pub fn hb_diag(&self) -> &[f64] {
        &self.hb_diag
    }

    pub fn coherence_pairs(&self) -> &[(usize, usize)] {
        &self.coherence_pairs
    }

    /// Full Hamiltonian at time `t` (drive on; no pulse term).
    pub fn hamiltonian(&self, t: f64) -> Array2<C64> {
        let mut h = self.h_static.clone();
        let w = self.drive.omega(t);
        for i in 0..self.dim() {
            h[(i, i)] += C64::new(w * self.sz_half[i], 0.0);
        }
        h
    }

    /// Mean energy Tr[ρ H(t)].
    pub fn energy(&self, rho: &DensityOperator, t: f64) -> f64 {
        rho.expectation(&self.hamiltonian(t))
    }

    /// Gibbs state e^{−βH}/Z of the supersystem at the cycle-start
    /// Hamiltonian (drive at ω(t_start) = ω_a), via eigendecomposition with
    /// spectral-shift normalization. The probe (H_P = 0) is appended as
    /// (1 + d σ_z)/2.
    pub fn thermal_state(&self, beta: f64) -> Result<DensityOperator> {
        if !(beta > 0.0) {
            return Err(Error::invalid("thermal state", format!("beta = {beta}")));
        }
        let d = self.dims;
        let b_dim = d.b_dim();
        let dim_sb = 2 * b_dim;
        // S ⊗ B Hamiltonian (probe excluded; H_P = 0, H_SP = 0 before the
        // pulse)
        let mut h = Array2::<C64>::zeros((dim_sb, dim_sb));
        let no_probe = d.without_probe();
        let w0 = self.drive.omega(self.drive.t_start());
        for s in 0..2 {
            for b in 0..b_dim {
                let i_full = d.index(s, 0, b);
                let i = no_probe.index(s, 0, b);
                h[(i, i)] = C64::new(
                    self.hb_diag[i_full] + w0 * self.sz_half[i_full],
                    0.0,
                );
            }
        }
        for s1 in 0..2 {
            for b1 in 0..b_dim {
                for s2 in 0..2 {
                    for b2 in 0..b_dim {
                        let v = self.h_sb[(d.index(s1, 0, b1), d.index(s2, 0, b2))];
                        if v.norm_sqr() > 0.0 {
                            h[(no_probe.index(s1, 0, b1), no_probe.index(s2, 0, b2))] += v;
                        }
                    }
                }
            }
        }
        let (vals, vecs) = h
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Numerical(format!("thermal eigh failed: {e}")))?;
        let e0 = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = if beta.is_infinite() {
            let degeneracy_tol = 1e-12 * (1.0 + e0.abs());
            vals.iter()
                .map(|&e| if e - e0 <= degeneracy_tol { 1.0 } else { 0.0 })
                .collect()
        } else {
            vals.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
        };
        let z: f64 = weights.iter().sum();
        let mut rho_sb = Array2::<C64>::zeros((dim_sb, dim_sb));
        for (k, &w) in weights.iter().enumerate() {
            if w / z < 1e-300 {
                continue;
            }
            let col = vecs.column(k);
            let scale = C64::new(w / z, 0.0);
            for i in 0..dim_sb {
                if col[i].norm_sqr() < 1e-60 {
                    continue;
                }
                let ci = col[i] * scale;
                for j in 0..dim_sb {
                    rho_sb[(i, j)] += ci * col[j].conj();
                }
            }
        }
        // embed the probe factor (diagonal (1+d)/2, (1−d)/2)
        let mut mat = Array2::<C64>::zeros((d.dim(), d.dim()));
        let probe_diag = if d.has_probe() {
            vec![(1.0 + self.probe_d) / 2.0, (1.0 - self.probe_d) / 2.0]
        } else {
            vec![1.0]
        };
        for s1 in 0..2 {
            for b1 in 0..b_dim {
                for s2 in 0..2 {
                    for b2 in 0..b_dim {
                        let v = rho_sb[(no_probe.index(s1, 0, b1), no_probe.index(s2, 0, b2))];
                        if v.norm_sqr() == 0.0 {
                            continue;
                        }
                        for (p, &pw) in probe_diag.iter().enumerate() {
                            mat[(d.index(s1, p, b1), d.index(s2, p, b2))] = v * pw;
                        }
                    }
                }
            }
        }
        DensityOperator::new(mat, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::{DriveSpec, SinusoidDrive};
    use crate::numerics::quad::adaptive;

    fn fig1_bath(eta: f64, beta: f64) -> BathSpec {
        BathSpec::new(eta, 10.0 / 7.0, 10.0, beta).unwrap()
    }

    fn fig1_model(eta: f64, beta: f64, n_modes: usize, probe: bool) -> SupersystemModel {
        let bath = fig1_bath(eta, beta);
        let (freqs, gs) = discretize_bath(&bath, n_modes, 4.0).unwrap();
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
            0.0,
            None,
            8192,
        )
        .unwrap()
    }

    #[test]
    fn discretization_conserves_spectral_weight() {
        // Σ g_k² = (1/2π)∫ G_0 over the span (quadrature oracle)
        let bath = fig1_bath(0.2, 3.74);
        let (freqs, gs) = discretize_bath(&bath, 6, 4.0).unwrap();
        assert_eq!(freqs.len(), 6);
        let total: f64 = gs.iter().map(|g| g * g).sum();
        let lo = bath.omega0 - 0.4;
        let hi = bath.omega0 + 0.4;
        let oracle = adaptive(|w| bath.response_zero_t(w), lo, hi, 1e-13, 2000)
            .unwrap()
            .value
            / (2.0 * std::f64::consts::PI);
        assert!((total - oracle).abs() < 1e-10, "{total} vs {oracle}");
    }

    #[test]
    fn zero_coupling_discretizes_to_zero() {
        let bath = fig1_bath(0.0, 3.74);
        let (_, gs) = discretize_bath(&bath, 4, 4.0).unwrap();
        assert!(gs.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn single_narrow_bin_captures_peak_area() {
        let bath = fig1_bath(1.0, f64::INFINITY);
        let (freqs, gs) = discretize_bath(&bath, 1, 0.5).unwrap();
        assert!((freqs[0] - bath.omega0).abs() < 1e-14);
        // η²/(2π)·2·atan(0.5)
        let want = 1.0 / (2.0 * std::f64::consts::PI) * 2.0 * 0.5f64.atan();
        assert!((gs[0] * gs[0] - want).abs() < 1e-14);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let bath = fig1_bath(0.2, 3.74);
        let (freqs, gs) = discretize_bath(&bath, 8, 4.0).unwrap();
        let drive = Arc::new(
            SinusoidDrive::new(DriveSpec {
                omega_a: 1.0,
                delta: 0.25,
                omega_mod: 2.5,
                t_start: 0.0,
            })
            .unwrap(),
        );
        let err = SupersystemModel::new(
            drive,
            bath,
            freqs,
            gs,
            2,
            false,
            Measurement::Instantaneous { t_m: 0.0 },
            0.0,
            None,
            4096,
        );
        match err {
            Err(Error::DimensionCap { required, cap }) => {
                assert_eq!(required, 2 * 3usize.pow(8));
                assert_eq!(cap, 4096);
            }
            other => panic!("expected cap error, got {:?}", other.map(|m| m.dim())),
        }
    }

    #[test]
    fn thermal_state_is_stationary_and_correlated() {
        let m = fig1_model(0.2, 3.74, 4, false);
        let rho = m.thermal_state(3.74).unwrap();
        rho.validate(1e-10, true).unwrap();
        // commutes with H(t_start): [ρ, H] = 0 up to numerics
        let h = m.hamiltonian(m.drive.t_start());
        let comm = rho.mat.dot(&h) - h.dot(&rho.mat);
        let worst = comm.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "[ρ,H] = {worst}");
        // negative correlation energy
        let e_sb = rho.expectation(m.h_sb());
        assert!(e_sb < 0.0, "⟨H_SB⟩ = {e_sb}");
    }

    #[test]
    fn uncoupled_ground_state_has_zero_correlation() {
        let m = fig1_model(0.0, 3.74, 3, false);
        let rho = m.thermal_state(f64::INFINITY).unwrap();
        rho.validate(1e-12, true).unwrap();
        assert!(rho.expectation(m.h_sb()).abs() < 1e-14);
        // pure product ground state: qubit in g, all modes empty
        let d = m.dims;
        let idx = d.index(0, 0, 0);
        assert!((rho.mat[(idx, idx)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_state_matches_independent_construction() {
        // cross-check ⟨H_SB⟩ against an independent dense construction
        // (built before this module; see the pinned value)
        let m = fig1_model(0.2, 3.74, 5, false);
        let rho = m.thermal_state(3.74).unwrap();
        let e_sb = rho.expectation(m.h_sb());
        assert!(
            (e_sb - (-0.015307307006832528)).abs() < 1e-9,
            "⟨H_SB⟩ = {e_sb}"
        );
    }

    #[test]
    fn probe_embedding() {
        let m = fig1_model(0.2, 3.74, 3, true);
        let rho = m.thermal_state(3.74).unwrap();
        rho.validate(1e-10, false).unwrap();
        let p = rho.reduce_p().unwrap();
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!(p[(0, 1)].norm() < 1e-14);
    }
}

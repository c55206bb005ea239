//! Unitary propagation of the supersystem under the driven Hamiltonian,
//! dρ/dt = −i[H(t), ρ].
//!
//! Each step applies the exponential of the midpoint-sampled Hamiltonian in
//! symmetrized factored form,
//!
//! ```text
//! U_step = D(½ω(t_mid)dt) · K(½h(t_mid)dt) · e^{−iH_0 dt} · K · D,
//! ```
//!
//! where D is the diagonal qubit-splitting factor, K the (optional)
//! measurement-pulse factor on the probe, and e^{−iH_0 dt} the exact
//! exponential of the static part from one cached eigendecomposition. The
//! factorization agrees with the midpoint exponential to O(dt³) per step;
//! step halving is repeated until the traced observables move less than
//! `tol_per_step` per step between refinements.
//!
//! The drive is considered off before its start time (ω clamped to ω(t_start)),
//! so a thermal state is exactly stationary until the measurement.

use super::channel::{nsm_channel, pulse_profile};
use super::density::DensityOperator;
use super::model::{Measurement, SupersystemModel};
use crate::error::{Error, Result};
use crate::work::{binary_entropy, WorkLedger};
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use std::io::Write;

#[derive(Debug, Clone, Copy)]
pub struct PropagateOptions {
    /// Initial (coarsest) step.
    pub dt_max: f64,
    /// Per-step observable budget for the halving convergence control.
    pub tol_per_step: f64,
    pub max_halvings: usize,
    /// Half-width of the integrated pulse window, in units of τ_m.
    pub pulse_half_width: f64,
    /// Steps across the pulse window at the coarsest refinement.
    pub pulse_steps: usize,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        PropagateOptions {
            dt_max: 5e-3,
            tol_per_step: 1e-8,
            max_halvings: 8,
            pulse_half_width: 9.0,
            pulse_steps: 512,
        }
    }
}

/// Energy flows along a propagation. `e_piston` is the accumulated
/// −∫ Tr[ρ ∂_t H_S] dt (positive = energy gained by the piston);
/// `sp_coherence` is the largest tracked |⟨e,1,n|ρ|g,0,n±1⟩|.
#[derive(Debug, Clone, Default)]
pub struct EnergyTrace {
    pub t: Vec<f64>,
    pub e_s: Vec<f64>,
    pub e_b: Vec<f64>,
    pub e_sb: Vec<f64>,
    pub e_piston: Vec<f64>,
    pub sp_coherence: Vec<f64>,
}

impl EnergyTrace {
    /// CSV with columns `t, E_S, E_B, E_SB, E_piston, sp_coherence` at full
    /// double precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,E_S,E_B,E_SB,E_piston,sp_coherence")?;
        for i in 0..self.t.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.t[i],
                self.e_s[i],
                self.e_b[i],
                self.e_sb[i],
                self.e_piston[i],
                self.sp_coherence[i]
            )?;
        }
        Ok(())
    }

    fn sample(&self, t: f64) -> [f64; 4] {
        // linear interpolation of the four energies at t
        let idx = match self
            .t
            .binary_search_by(|v| v.partial_cmp(&t).unwrap())
        {
            Ok(i) => return [self.e_s[i], self.e_b[i], self.e_sb[i], self.e_piston[i]],
            Err(i) => i.clamp(1, self.t.len() - 1),
        };
        let (t0, t1) = (self.t[idx - 1], self.t[idx]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        let lerp = |a: &[f64]| a[idx - 1] + w * (a[idx] - a[idx - 1]);
        [
            lerp(&self.e_s),
            lerp(&self.e_b),
            lerp(&self.e_sb),
            lerp(&self.e_piston),
        ]
    }
}

struct StaticEig {
    vecs: Array2<C64>,
    vals: Vec<f64>,
}

impl StaticEig {
    fn new(model: &SupersystemModel) -> Result<Self> {
        let (vals, vecs) = model
            .h_static()
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Numerical(format!("static eigh failed: {e}")))?;
        Ok(StaticEig {
            vecs,
            vals: vals.to_vec(),
        })
    }

    /// e^{−i H_0 dt} = W e^{−iΛdt} W†.
    fn exponential(&self, dt: f64) -> Array2<C64> {
        let n = self.vals.len();
        let mut scaled = self.vecs.clone();
        for (k, &lam) in self.vals.iter().enumerate() {
            let phase = C64::new(0.0, -lam * dt).exp();
            for i in 0..n {
                scaled[(i, k)] *= phase;
            }
        }
        let vdag = self.vecs.t().mapv(|v| v.conj());
        scaled.dot(&vdag)
    }
}

fn effective_omega(model: &SupersystemModel, t: f64) -> f64 {
    let start = model.drive.t_start();
    if t < start {
        model.drive.omega(start)
    } else {
        model.drive.omega(t)
    }
}

fn effective_omega_dot(model: &SupersystemModel, t: f64) -> f64 {
    if t < model.drive.t_start() {
        0.0
    } else {
        model.drive.omega_dot(t)
    }
}

/// Build the step operator D·K·E0·K·D.
fn step_operator(
    model: &SupersystemModel,
    e0: &Array2<C64>,
    t_mid: f64,
    dt: f64,
    with_pulse: bool,
) -> Array2<C64> {
    let n = model.dim();
    let mut m = e0.clone();
    if with_pulse {
        if let Measurement::Pulse { t_m, tau_m } = model.measurement {
            let a = pulse_profile(t_mid, t_m, tau_m) * dt / 2.0;
            let phase = C64::new(0.0, -a).exp();
            let c = phase * C64::new(a.cos(), 0.0);
            let s = phase * C64::new(0.0, a.sin());
            let dims = model.dims;
            let b_dim = dims.b_dim();
            // rows: (e,0,b) and (e,1,b) mix
            for b in 0..b_dim {
                let r0 = dims.index(1, 0, b);
                let r1 = dims.index(1, 1, b);
                for j in 0..n {
                    let x0 = m[(r0, j)];
                    let x1 = m[(r1, j)];
                    m[(r0, j)] = c * x0 + s * x1;
                    m[(r1, j)] = s * x0 + c * x1;
                }
            }
            // columns
            for b in 0..b_dim {
                let c0 = dims.index(1, 0, b);
                let c1 = dims.index(1, 1, b);
                for i in 0..n {
                    let x0 = m[(i, c0)];
                    let x1 = m[(i, c1)];
                    m[(i, c0)] = c * x0 + s * x1;
                    m[(i, c1)] = s * x0 + c * x1;
                }
            }
        }
    }
    let f = effective_omega(model, t_mid) * dt / 2.0;
    let sz = model.sz_half();
    for i in 0..n {
        let di = C64::new(0.0, -f * sz[i]).exp();
        for j in 0..n {
            m[(i, j)] *= di * C64::new(0.0, -f * sz[j]).exp();
        }
    }
    m
}

struct Segment {
    t0: f64,
    t1: f64,
    steps: usize,
    pulse: bool,
}

fn plan_segments(
    model: &SupersystemModel,
    t0: f64,
    t1: f64,
    opts: &PropagateOptions,
    level: u32,
) -> Vec<Segment> {
    let dt = opts.dt_max / 2f64.powi(level as i32);
    let main = |a: f64, b: f64, pulse: bool, out: &mut Vec<Segment>| {
        if b <= a {
            return;
        }
        let steps = if pulse {
            opts.pulse_steps << level
        } else {
            (((b - a) / dt).ceil() as usize).max(1)
        };
        out.push(Segment {
            t0: a,
            t1: b,
            steps,
            pulse,
        });
    };
    let mut out = Vec::new();
    if let Measurement::Pulse { t_m, tau_m } = model.measurement {
        let ws = t_m - opts.pulse_half_width * tau_m;
        let we = t_m + opts.pulse_half_width * tau_m;
        if we > t0 && ws < t1 {
            main(t0, ws.max(t0), false, &mut out);
            main(ws.max(t0), we.min(t1), true, &mut out);
            main(we.min(t1), t1, false, &mut out);
            return out;
        }
    }
    main(t0, t1, false, &mut out);
    out
}

fn run_once(
    model: &SupersystemModel,
    eig: &StaticEig,
    rho0: &DensityOperator,
    t0: f64,
    t1: f64,
    opts: &PropagateOptions,
    level: u32,
) -> Result<(DensityOperator, EnergyTrace)> {
    let mut rho = rho0.clone();
    let mut trace = EnergyTrace::default();
    let record =
        |trace: &mut EnergyTrace, rho: &DensityOperator, t: f64, piston: f64| {
            let s = rho.expectation_diag(model.sz_half());
            trace.t.push(t);
            trace.e_s.push(effective_omega(model, t) * s);
            trace.e_b.push(rho.expectation_diag(model.hb_diag()));
            trace.e_sb.push(rho.expectation(model.h_sb()));
            trace.e_piston.push(piston);
            let coh = model
                .coherence_pairs()
                .iter()
                .map(|&(i, j)| rho.mat[(i, j)].norm())
                .fold(0.0f64, f64::max);
            trace.sp_coherence.push(coh);
        };
    let mut piston = 0.0;
    record(&mut trace, &rho, t0, piston);
    let mut steps_done = 0usize;
    for seg in plan_segments(model, t0, t1, opts, level) {
        let dt = (seg.t1 - seg.t0) / seg.steps as f64;
        let e0 = eig.exponential(dt);
        let mut s_prev = rho.expectation_diag(model.sz_half());
        for k in 0..seg.steps {
            let t_a = seg.t0 + k as f64 * dt;
            let t_mid = t_a + 0.5 * dt;
            let m = step_operator(model, &e0, t_mid, dt, seg.pulse);
            let tmp = m.dot(&rho.mat);
            let mdag = m.t().mapv(|v| v.conj());
            rho.mat = tmp.dot(&mdag);
            steps_done += 1;
            if steps_done % 256 == 0 {
                rho.rehermitize();
            }
            let t_now = t_a + dt;
            let s_now = rho.expectation_diag(model.sz_half());
            piston += -0.5
                * dt
                * (effective_omega_dot(model, t_a) * s_prev
                    + effective_omega_dot(model, t_now) * s_now);
            s_prev = s_now;
            record(&mut trace, &rho, t_now, piston);
        }
    }
    Ok((rho, trace))
}

/// Propagate `rho` from `t0` to `t1`, refining the step until the traced
/// observables (E_S, E_B, E_SB, E_piston) move less than
/// `tol_per_step × n_steps` between consecutive refinements.
pub fn propagate(
    model: &SupersystemModel,
    rho: &DensityOperator,
    t0: f64,
    t1: f64,
    opts: &PropagateOptions,
) -> Result<(DensityOperator, EnergyTrace)> {
    if t1 <= t0 {
        return Err(Error::invalid("propagation", "t1 must exceed t0"));
    }
    let eig = StaticEig::new(model)?;
    let mut prev = run_once(model, &eig, rho, t0, t1, opts, 0)?;
    let mut achieved = f64::INFINITY;
    for level in 1..=opts.max_halvings as u32 {
        let fine = run_once(model, &eig, rho, t0, t1, opts, level)?;
        let n_coarse = (prev.1.t.len() - 1) as f64;
        let mut worst = 0.0f64;
        for (i, &t) in prev.1.t.iter().enumerate() {
            let coarse = [
                prev.1.e_s[i],
                prev.1.e_b[i],
                prev.1.e_sb[i],
                prev.1.e_piston[i],
            ];
            let fine_vals = fine.1.sample(t);
            for (c, f) in coarse.iter().zip(fine_vals.iter()) {
                worst = worst.max((c - f).abs());
            }
        }
        achieved = worst / n_coarse;
        prev = fine;
        if achieved <= opts.tol_per_step {
            return Ok(prev);
        }
    }
    Err(Error::PropagationConvergence {
        tol: opts.tol_per_step,
        achieved,
        halvings: opts.max_halvings,
    })
}

/// Propagate across a measurement pulse. The window must cover at least
/// ±6 τ_m around t_m.
pub fn cnot_pulse_propagate(
    model: &SupersystemModel,
    rho: &DensityOperator,
    t0: f64,
    t1: f64,
    opts: &PropagateOptions,
) -> Result<(DensityOperator, EnergyTrace)> {
    let Measurement::Pulse { t_m, tau_m } = model.measurement else {
        return Err(Error::invalid("pulse", "model measurement is not a pulse"));
    };
    if t0 > t_m - 6.0 * tau_m || t1 < t_m + 6.0 * tau_m {
        return Err(Error::invalid(
            "pulse",
            format!("[{t0}, {t1}] must cover [t_m − 6τ_m, t_m + 6τ_m]"),
        ));
    }
    propagate(model, rho, t0, t1, opts)
}

/// Total-work audit of a cycle that starts at the measurement:
/// W_cycle = E_piston(t_end), W_tot = W_cycle − ΔE_meas. A positive W_tot
/// beyond `tol` is flagged as a convergence/model violation, never
/// accepted silently.
pub fn total_work_audit(trace: &EnergyTrace, de_meas: f64, tol: f64) -> Result<WorkLedger> {
    let w_cycle = *trace
        .e_piston
        .last()
        .ok_or_else(|| Error::invalid("audit", "empty trace"))?;
    let ledger = WorkLedger {
        de_meas,
        w_cycle,
        ..WorkLedger::default()
    }
    .finalize();
    if ledger.w_tot > tol {
        return Err(Error::Numerical(format!(
            "total-work audit failed: W_tot = {:e} > {tol:e} (second law)",
            ledger.w_tot
        )));
    }
    Ok(ledger)
}

/// Outcome of one full measurement-powered cycle in the exact simulator.
pub struct CycleRun {
    pub ledger: WorkLedger,
    pub trace: EnergyTrace,
    pub rho_final: DensityOperator,
    /// Excited-state probability right before the measurement.
    pub p_e: f64,
    pub entropy_before: f64,
    pub entropy_after: f64,
}

/// The canonical cycle: thermal state at `beta` → non-selective measurement
/// at the drive start → `n_periods` of driven evolution, with the full
/// ledger (measurement cost, entropy cost, bounds, cycle work, total work).
pub fn run_measurement_cycle(
    model: &SupersystemModel,
    beta: f64,
    n_periods: usize,
    opts: &PropagateOptions,
) -> Result<CycleRun> {
    let rho_eq = model.thermal_state(beta)?;
    let t_m = model.measurement.t_m();
    let h_init = model.hamiltonian(t_m);
    let e_before = rho_eq.expectation(&h_init);
    let sb_before = rho_eq.reduce_sb();
    let entropy_before = sb_before.entropy()?;
    let p_e: f64 = {
        let s = rho_eq.reduce_s();
        s[(1, 1)].re
    };
    let measured = nsm_channel(&rho_eq);
    let e_after = measured.expectation(&h_init);
    let entropy_after = nsm_channel(&sb_before).entropy()?;
    let de_meas = e_after - e_before;
    let ds_meas = entropy_after - entropy_before;
    let period = model.drive.period();
    let (rho_final, trace) = propagate(
        model,
        &measured,
        t_m,
        t_m + n_periods as f64 * period,
        opts,
    )?;
    let temperature = if beta.is_infinite() { 0.0 } else { 1.0 / beta };
    let w_cycle = *trace.e_piston.last().unwrap();
    let w_nsm_max = de_meas - temperature * ds_meas;
    let w_sl = temperature * binary_entropy(p_e);
    let ledger = WorkLedger {
        de_meas,
        ds_meas,
        w_cycle,
        w_sl,
        w_nsm_max,
        w_sel_max: w_nsm_max + w_sl,
        ..WorkLedger::default()
    }
    .finalize();
    Ok(CycleRun {
        ledger,
        trace,
        rho_final,
        p_e,
        entropy_before,
        entropy_after,
    })
}

/// Probe-reuse audit: the measurement channel obtained by tracing out a
/// fully mixed probe equals the dephasing channel, the bath decorrelates
/// the probe from the supersystem, and an unreset probe implements the
/// same channel again.
#[derive(Debug, Clone)]
pub struct ProbeReuseReport {
    /// Max deviation |Tr_P∘CNOT − nsm| on the first measurement.
    pub first_deviation: f64,
    /// Same for the second measurement with the unreset probe.
    pub second_deviation: f64,
    /// Probe off-diagonal magnitude after decorrelation.
    pub probe_offdiagonal: f64,
    /// (t, max tracked S–P coherence) along the inter-measurement
    /// evolution.
    pub coherence_trace: Vec<(f64, f64)>,
}

pub fn probe_reuse_check(
    model: &SupersystemModel,
    beta: f64,
    n_periods: usize,
    opts: &PropagateOptions,
) -> Result<ProbeReuseReport> {
    if !model.dims.has_probe() {
        return Err(Error::invalid("probe reuse", "model has no probe"));
    }
    if model.probe_d != 0.0 {
        return Err(Error::invalid("probe reuse", "probe must start fully mixed (d = 0)"));
    }
    let rho_eq = model.thermal_state(beta)?;
    let t_m = model.measurement.t_m();
    let measure = |rho: &DensityOperator| -> Result<DensityOperator> {
        match model.measurement {
            Measurement::Instantaneous { .. } => super::channel::cnot_channel(rho),
            Measurement::Pulse { tau_m, .. } => {
                let w = opts.pulse_half_width * tau_m;
                Ok(cnot_pulse_propagate(model, rho, t_m - w, t_m + w, opts)?.0)
            }
        }
    };
    let max_dev = |a: &Array2<C64>, b: &Array2<C64>| -> f64 {
        (a - b).iter().map(|v| v.norm()).fold(0.0f64, f64::max)
    };
    let after1 = measure(&rho_eq)?;
    let want1 = nsm_channel(&rho_eq.reduce_sb());
    let first_deviation = max_dev(&after1.reduce_sb().mat, &want1.mat);
    // let the bath scrub the S–P correlations
    let period = model.drive.period();
    let (evolved, trace) = propagate(
        model,
        &after1,
        t_m,
        t_m + n_periods as f64 * period,
        opts,
    )?;
    let coherence_trace = trace
        .t
        .iter()
        .zip(&trace.sp_coherence)
        .map(|(&t, &c)| (t, c))
        .collect();
    let probe = evolved.reduce_p()?;
    let probe_offdiagonal = probe[(0, 1)].norm();
    // second, unreset measurement on the full evolved state
    let after2 = measure(&evolved)?;
    let want2 = nsm_channel(&evolved.reduce_sb());
    let second_deviation = max_dev(&after2.reduce_sb().mat, &want2.mat);
    Ok(ProbeReuseReport {
        first_deviation,
        second_deviation,
        probe_offdiagonal,
        coherence_trace,
    })
}

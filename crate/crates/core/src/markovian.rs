//! Markovian (Pauli) rate equations with detailed balance: the second-law
//! baseline. Populations of a driven two-level system obey
//!
//! ```text
//! ρ̇_ee = R_g(t) ρ_gg − R_e(t) ρ_ee,   ρ̇_gg = −ρ̇_ee,
//! ```
//!
//! with non-negative rates satisfying instantaneous detailed balance
//! R_e ρ^eq_ee = R_g ρ^eq_gg against ρ^eq_jj ∝ e^{−βE_j(t)}. Under these
//! assumptions entropy production is non-negative and no work can be
//! extracted over a closed cycle.

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::modulation::Drive;
use crate::numerics::spline::CubicSpline;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Sampled rates and level energies over an integer number of periods.
#[derive(Debug, Clone)]
pub struct RateTrajectory {
    pub t: Vec<f64>,
    pub r_e: Vec<f64>,
    pub r_g: Vec<f64>,
    pub e_e: Vec<f64>,
    pub e_g: Vec<f64>,
    pub beta: f64,
    pub period: f64,
}

impl RateTrajectory {
    /// Instantaneous golden-rule rates from a bath and a drive:
    /// R_e(t) = G_T(ω(t)), R_g(t) = G_T(−ω(t)), E_{e,g} = ±ω(t)/2.
    pub fn golden_rule(
        bath: &BathSpec,
        drive: &dyn Drive,
        points_per_period: usize,
    ) -> Result<Self> {
        bath.validate()?;
        if bath.beta.is_infinite() {
            return Err(Error::invalid(
                "rate trajectory",
                "detailed balance needs finite β (absorption vanishes at T = 0)",
            ));
        }
        let period = drive.period();
        let n = points_per_period.max(16);
        let t0 = drive.t_start();
        let mut out = RateTrajectory {
            t: Vec::with_capacity(n + 1),
            r_e: Vec::with_capacity(n + 1),
            r_g: Vec::with_capacity(n + 1),
            e_e: Vec::with_capacity(n + 1),
            e_g: Vec::with_capacity(n + 1),
            beta: bath.beta,
            period,
        };
        for i in 0..=n {
            let u = i as f64 * period / n as f64;
            let w = drive.omega(t0 + u);
            out.t.push(u);
            out.r_e.push(bath.response_finite_t(w)?);
            out.r_g.push(bath.response_finite_t(-w)?);
            out.e_e.push(0.5 * w);
            out.e_g.push(-0.5 * w);
        }
        out.check_detailed_balance(1e-12)?;
        Ok(out)
    }

    /// Randomized detailed-balance trajectory: a positive periodic gap
    /// ω(t), a positive periodic overall rate scale c(t), and
    /// R_e = c ρ^eq_gg, R_g = c ρ^eq_ee (detailed balance by construction).
    pub fn randomized(seed: u64, points_per_period: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = rng.gen_range(0.4..4.0);
        let omega0 = rng.gen_range(0.6..2.0);
        let period = rng.gen_range(2.0..12.0);
        let om = 2.0 * std::f64::consts::PI / period;
        let mut amps = [0.0; 3];
        let mut phases = [0.0; 3];
        let total: f64 = rng.gen_range(0.25..0.45) * omega0;
        let split: f64 = rng.gen_range(0.2..0.8);
        amps[0] = total * split;
        amps[1] = total * (1.0 - split) * 0.7;
        amps[2] = total * (1.0 - split) * 0.3;
        for p in &mut phases {
            *p = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        }
        let c0 = rng.gen_range(0.1..1.5);
        let c_mod = rng.gen_range(0.0..0.8);
        let c_phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let n = points_per_period.max(64);
        let mut out = RateTrajectory {
            t: Vec::with_capacity(n + 1),
            r_e: Vec::with_capacity(n + 1),
            r_g: Vec::with_capacity(n + 1),
            e_e: Vec::with_capacity(n + 1),
            e_g: Vec::with_capacity(n + 1),
            beta,
            period,
        };
        for i in 0..=n {
            let u = i as f64 * period / n as f64;
            let mut w = omega0;
            for k in 0..3 {
                w += amps[k] * ((k + 1) as f64 * om * u + phases[k]).sin();
            }
            let c = c0 * (1.0 + c_mod * (om * u + c_phase).sin());
            let z = (-beta * 0.5 * w).exp() + (beta * 0.5 * w).exp();
            let p_ee = (-beta * 0.5 * w).exp() / z;
            let p_gg = (beta * 0.5 * w).exp() / z;
            out.t.push(u);
            out.r_e.push(c * p_gg);
            out.r_g.push(c * p_ee);
            out.e_e.push(0.5 * w);
            out.e_g.push(-0.5 * w);
        }
        out
    }

    /// Gibbs populations (ρ^eq_ee, ρ^eq_gg) at grid point `i`.
    pub fn equilibrium_populations(&self, i: usize) -> (f64, f64) {
        let (ee, eg) = (self.e_e[i], self.e_g[i]);
        let shift = ee.min(eg);
        let we = (-self.beta * (ee - shift)).exp();
        let wg = (-self.beta * (eg - shift)).exp();
        (we / (we + wg), wg / (we + wg))
    }

    /// Detailed balance residual R_e ρ^eq_ee − R_g ρ^eq_gg, verified
    /// point-by-point at relative tolerance `tol`.
    pub fn check_detailed_balance(&self, tol: f64) -> Result<()> {
        for i in 0..self.t.len() {
            if self.r_e[i] < 0.0 || self.r_g[i] < 0.0 {
                return Err(Error::invalid("rate trajectory", "negative rate"));
            }
            let (p_ee, p_gg) = self.equilibrium_populations(i);
            let lhs = self.r_e[i] * p_ee;
            let rhs = self.r_g[i] * p_gg;
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            if (lhs - rhs).abs() > tol * scale {
                return Err(Error::invalid(
                    "rate trajectory",
                    format!(
                        "detailed balance violated at t = {}: {} vs {}",
                        self.t[i], lhs, rhs
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Population trajectory; `rho_ee` sampled on `t`, ρ_gg = 1 − ρ_ee exactly.
#[derive(Debug, Clone)]
pub struct PopulationTrajectory {
    pub t: Vec<f64>,
    pub rho_ee: Vec<f64>,
}

struct RateInterp {
    r_e: CubicSpline,
    r_g: CubicSpline,
    period: f64,
}

impl RateInterp {
    fn new(r: &RateTrajectory) -> Result<Self> {
        Ok(RateInterp {
            r_e: CubicSpline::new(&r.t, &r.r_e)?,
            r_g: CubicSpline::new(&r.t, &r.r_g)?,
            period: r.period,
        })
    }

    fn rates(&self, t: f64) -> (f64, f64) {
        let u = t.rem_euclid(self.period);
        (self.r_e.eval(u).max(0.0), self.r_g.eval(u).max(0.0))
    }
}

/// Integrate the population equation from `rho0 = (ρ_ee, ρ_gg)` across the
/// trajectory grid with adaptive embedded Runge–Kutta (Dormand–Prince 4/5).
/// Only the difference variable is integrated, so the populations sum to 1
/// exactly.
pub fn evolve_populations(
    r: &RateTrajectory,
    rho0: (f64, f64),
    rel_tol: f64,
) -> Result<PopulationTrajectory> {
    if (rho0.0 + rho0.1 - 1.0).abs() > 1e-12 || rho0.0 < 0.0 || rho0.1 < 0.0 {
        return Err(Error::invalid(
            "populations",
            format!("ρ0 = {rho0:?} must be a distribution"),
        ));
    }
    let interp = RateInterp::new(r)?;
    let rhs = |t: f64, x: f64| {
        let (re, rg) = interp.rates(t);
        rg * (1.0 - x) - re * x
    };
    let mut x = rho0.0;
    let mut out = PopulationTrajectory {
        t: r.t.clone(),
        rho_ee: Vec::with_capacity(r.t.len()),
    };
    out.rho_ee.push(x);
    for w in r.t.windows(2) {
        x = rk45_step_to(&rhs, w[0], w[1], x, rel_tol)?;
        out.rho_ee.push(x.clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Dormand–Prince 4(5) from `t0` to `t1` with step-size control.
fn rk45_step_to<F: Fn(f64, f64) -> f64>(
    rhs: &F,
    t0: f64,
    t1: f64,
    mut x: f64,
    rel_tol: f64,
) -> Result<f64> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let mut t = t0;
    let mut h = (t1 - t0).min(0.1);
    let mut steps = 0usize;
    while t < t1 {
        if steps > 1_000_000 {
            return Err(Error::Numerical("rate equation integration stalled".into()));
        }
        steps += 1;
        h = h.min(t1 - t);
        let k1 = rhs(t, x);
        let k2 = rhs(t + A21 * h, x + h * A21 * k1);
        let k3 = rhs(t + 0.3 * h, x + h * (A31 * k1 + A32 * k2));
        let k4 = rhs(t + 0.8 * h, x + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = rhs(
            t + 8.0 / 9.0 * h,
            x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
        );
        let k6 = rhs(
            t + h,
            x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
        );
        let x5 = x + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = rhs(t + h, x5);
        let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let scale = rel_tol * (x.abs().max(x5.abs()).max(1e-3));
        if err.abs() <= scale {
            t += h;
            x = x5;
            h *= (scale / err.abs().max(1e-300)).powf(0.2).clamp(0.5, 5.0) * 0.9;
        } else {
            h *= (scale / err.abs()).powf(0.25).clamp(0.1, 0.9);
            if h < 1e-14 {
                return Err(Error::Numerical("rate equation step underflow".into()));
            }
        }
    }
    Ok(x)
}

/// Entropy-production audit along a trajectory: Ṡ − Q̇/T ≥ 0 pointwise, and
/// the auxiliary pairwise inequality
/// R_g ρ^eq_gg (x ln y − x ln x + x − y) + R_e ρ^eq_ee (y ln x − y ln y + y − x) ≤ 0,
/// with x = ρ_gg/ρ^eq_gg, y = ρ_ee/ρ^eq_ee.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyProductionReport {
    /// Ṡ − Q̇/T at every grid point.
    pub net: Vec<f64>,
    /// Worst (most negative) value of `net`, clipped at 0 from above.
    pub max_violation: f64,
    /// Worst positive value of the auxiliary expression (must be ≤ 0).
    pub aux_max: f64,
    pub worst_t: f64,
}

pub fn entropy_production_check(
    r: &RateTrajectory,
    traj: &PopulationTrajectory,
) -> Result<EntropyProductionReport> {
    if r.t.len() != traj.t.len() {
        return Err(Error::invalid("entropy check", "grid mismatch"));
    }
    let temperature = 1.0 / r.beta;
    let mut net = Vec::with_capacity(r.t.len());
    let mut max_violation = 0.0f64;
    let mut aux_max = f64::NEG_INFINITY;
    let mut worst_t = r.t[0];
    for i in 0..r.t.len() {
        let ee = traj.rho_ee[i].clamp(1e-300, 1.0);
        let gg = (1.0 - traj.rho_ee[i]).clamp(1e-300, 1.0);
        let xdot = r.r_g[i] * gg - r.r_e[i] * ee;
        let s_dot = -xdot * ee.ln() + xdot * gg.ln();
        let q_dot = xdot * r.e_e[i] - xdot * r.e_g[i];
        let value = s_dot - q_dot / temperature;
        if value < -max_violation {
            max_violation = -value;
            worst_t = r.t[i];
        }
        net.push(value);
        let (p_ee, p_gg) = r.equilibrium_populations(i);
        let x = gg / p_gg;
        let y = ee / p_ee;
        let aux = r.r_g[i] * p_gg * (x * y.ln() - x * x.ln() + x - y)
            + r.r_e[i] * p_ee * (y * x.ln() - y * y.ln() + y - x);
        aux_max = aux_max.max(aux);
    }
    Ok(EntropyProductionReport {
        net,
        max_violation,
        aux_max,
        worst_t,
    })
}

/// Closed-cycle report; serializes to `{W, max_entropy_violation,
/// cycle_closure_error}`.
#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    #[serde(rename = "W")]
    pub w: f64,
    pub max_entropy_violation: f64,
    pub cycle_closure_error: f64,
}

/// Periodic steady state of the rate equation, found from the exact
/// one-period map of the linear scalar ODE:
/// x* = e^{−Λ(T)} ∫_0^T R_g e^{Λ(u)} du / (1 − e^{−Λ(T)}).
pub fn periodic_steady_state(r: &RateTrajectory, rel_tol: f64) -> Result<PopulationTrajectory> {
    let interp = RateInterp::new(r)?;
    // Λ(t) = ∫ (R_e + R_g); refine the grid 8× with Simpson
    let n = (r.t.len() - 1) * 8;
    let h = r.period / n as f64;
    let mut lam = vec![0.0; n + 1];
    let mut integral = 0.0;
    let mut weighted = 0.0; // ∫ R_g e^{Λ − Λ(T)} … accumulated in two passes
    for i in 0..n {
        let t0 = i as f64 * h;
        let tm = t0 + 0.5 * h;
        let t1 = t0 + h;
        let f = |t: f64| {
            let (re, rg) = interp.rates(t);
            re + rg
        };
        integral += h / 6.0 * (f(t0) + 4.0 * f(tm) + f(t1));
        lam[i + 1] = integral;
    }
    let lam_total = lam[n];
    if lam_total < 1e-12 {
        return Err(Error::CycleClosure {
            err: f64::INFINITY,
            tol: rel_tol,
        });
    }
    // second pass for ∫ R_g e^{Λ(u) − Λ(T)} du with a stable exponent
    for i in 0..n {
        let t0 = i as f64 * h;
        let tm = t0 + 0.5 * h;
        let t1 = t0 + h;
        let lam_mid = 0.5 * (lam[i] + lam[i + 1]);
        let g = |t: f64, l: f64| interp.rates(t).1 * (l - lam_total).exp();
        weighted += h / 6.0 * (g(t0, lam[i]) + 4.0 * g(tm, lam_mid) + g(t1, lam[i + 1]));
    }
    let x_star = weighted / (1.0 - (-lam_total).exp());
    let traj = evolve_populations(r, (x_star, 1.0 - x_star), rel_tol)?;
    Ok(traj)
}

/// Work over a closed cycle, W = −∮ Σ_j ρ_jj Ė_j dt. The trajectory must
/// close (|ρ(T) − ρ(0)| within `closure_tol`); a positive W beyond
/// `violation_tol` is flagged as an error (second law), never silently
/// accepted.
pub fn closed_cycle_work(
    r: &RateTrajectory,
    traj: &PopulationTrajectory,
    closure_tol: f64,
    violation_tol: f64,
) -> Result<CycleReport> {
    let closure = (traj.rho_ee[traj.rho_ee.len() - 1] - traj.rho_ee[0]).abs();
    if closure > closure_tol {
        return Err(Error::CycleClosure {
            err: closure,
            tol: closure_tol,
        });
    }
    let sp_ee = CubicSpline::new(&r.t, &r.e_e)?;
    let sp_eg = CubicSpline::new(&r.t, &r.e_g)?;
    let integrand: Vec<f64> = (0..r.t.len())
        .map(|i| {
            let ee_dot = sp_ee.deriv(r.t[i]);
            let eg_dot = sp_eg.deriv(r.t[i]);
            traj.rho_ee[i] * ee_dot + (1.0 - traj.rho_ee[i]) * eg_dot
        })
        .collect();
    let sp_int = CubicSpline::new(&r.t, &integrand)?;
    let w = -sp_int.integral(r.period);
    let entropy = entropy_production_check(r, traj)?;
    if w > violation_tol {
        return Err(Error::Numerical(format!(
            "second-law violation: closed-cycle W = {w:e} > {violation_tol:e}"
        )));
    }
    Ok(CycleReport {
        w,
        max_entropy_violation: entropy.max_violation,
        cycle_closure_error: closure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::{DriveSpec, SinusoidDrive};

    fn fig1_rates() -> RateTrajectory {
        let bath = BathSpec::new(0.1, 10.0 / 7.0, 10.0, 3.74).unwrap();
        let drive = SinusoidDrive::new(DriveSpec {
            omega_a: 1.0,
            delta: 0.25,
            omega_mod: 2.5,
            t_start: 0.0,
        })
        .unwrap();
        RateTrajectory::golden_rule(&bath, &drive, 512).unwrap()
    }

    #[test]
    fn golden_rule_satisfies_detailed_balance() {
        let r = fig1_rates();
        r.check_detailed_balance(1e-12).unwrap();
    }

    #[test]
    fn constant_rates_relax_to_gibbs() {
        let mut r = fig1_rates();
        // freeze the drive: constant gap ω_a = 1
        let bath = BathSpec::new(0.1, 10.0 / 7.0, 10.0, 3.74).unwrap();
        let re = bath.response_finite_t(1.0).unwrap();
        let rg = bath.response_finite_t(-1.0).unwrap();
        for i in 0..r.t.len() {
            r.r_e[i] = re;
            r.r_g[i] = rg;
            r.e_e[i] = 0.5;
            r.e_g[i] = -0.5;
        }
        // stretch over many relaxation times
        let scale = 12.0 / (re + rg) / r.period;
        for t in &mut r.t {
            *t *= scale;
        }
        r.period *= scale;
        let traj = evolve_populations(&r, (0.9, 0.1), 1e-10).unwrap();
        let p_eq = (-3.74f64).exp() / (1.0 + (-3.74f64).exp());
        let got = *traj.rho_ee.last().unwrap();
        assert!((got - p_eq).abs() < 1e-6, "{got} vs {p_eq}");
    }

    #[test]
    fn zero_rates_freeze_populations() {
        let mut r = fig1_rates();
        for i in 0..r.t.len() {
            r.r_e[i] = 0.0;
            r.r_g[i] = 0.0;
        }
        let traj = evolve_populations(&r, (0.37, 0.63), 1e-10).unwrap();
        for &x in &traj.rho_ee {
            assert_eq!(x, 0.37);
        }
    }

    #[test]
    fn trajectory_matches_refined_reference() {
        // fine-grid oracle: same integrator at 10× the resolution and
        // 100× tighter tolerance
        let r = fig1_rates();
        let traj = evolve_populations(&r, (0.2, 0.8), 1e-8).unwrap();
        let mut fine = RateTrajectory {
            t: Vec::new(),
            r_e: Vec::new(),
            r_g: Vec::new(),
            e_e: Vec::new(),
            e_g: Vec::new(),
            beta: r.beta,
            period: r.period,
        };
        let bath = BathSpec::new(0.1, 10.0 / 7.0, 10.0, 3.74).unwrap();
        let drive = SinusoidDrive::new(DriveSpec {
            omega_a: 1.0,
            delta: 0.25,
            omega_mod: 2.5,
            t_start: 0.0,
        })
        .unwrap();
        let n = 5120;
        for i in 0..=n {
            let u = i as f64 * r.period / n as f64;
            let w = drive.omega(u);
            fine.t.push(u);
            fine.r_e.push(bath.response_finite_t(w).unwrap());
            fine.r_g.push(bath.response_finite_t(-w).unwrap());
            fine.e_e.push(0.5 * w);
            fine.e_g.push(-0.5 * w);
        }
        let oracle = evolve_populations(&fine, (0.2, 0.8), 1e-10).unwrap();
        let got = *traj.rho_ee.last().unwrap();
        let want = *oracle.rho_ee.last().unwrap();
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
    }

    #[test]
    fn equilibrium_state_produces_no_entropy() {
        let mut r = fig1_rates();
        let bath = BathSpec::new(0.1, 10.0 / 7.0, 10.0, 3.74).unwrap();
        let re = bath.response_finite_t(1.0).unwrap();
        let rg = bath.response_finite_t(-1.0).unwrap();
        for i in 0..r.t.len() {
            r.r_e[i] = re;
            r.r_g[i] = rg;
            r.e_e[i] = 0.5;
            r.e_g[i] = -0.5;
        }
        let p_eq = (-3.74f64).exp() / (1.0 + (-3.74f64).exp());
        let traj = evolve_populations(&r, (p_eq, 1.0 - p_eq), 1e-10).unwrap();
        let rep = entropy_production_check(&r, &traj).unwrap();
        assert!(rep.max_violation < 1e-12);
        for &v in &rep.net {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_production_nonnegative_along_relaxation() {
        let r = fig1_rates();
        let traj = evolve_populations(&r, (0.9, 0.1), 1e-9).unwrap();
        let rep = entropy_production_check(&r, &traj).unwrap();
        assert!(rep.max_violation <= 1e-10, "violation {}", rep.max_violation);
        assert!(rep.aux_max <= 1e-12, "aux {}", rep.aux_max);
    }

    #[test]
    fn static_levels_give_zero_work() {
        let mut r = fig1_rates();
        for i in 0..r.t.len() {
            r.e_e[i] = 0.5;
            r.e_g[i] = -0.5;
            // rebalance rates for the static gap
            let bath = BathSpec::new(0.1, 10.0 / 7.0, 10.0, 3.74).unwrap();
            r.r_e[i] = bath.response_finite_t(1.0).unwrap();
            r.r_g[i] = bath.response_finite_t(-1.0).unwrap();
        }
        let traj = periodic_steady_state(&r, 1e-10).unwrap();
        let rep = closed_cycle_work(&r, &traj, 1e-6, 1e-8).unwrap();
        assert!(rep.w.abs() < 1e-12);
    }

    #[test]
    fn fig1_drive_markovian_work_is_negative() {
        let r = fig1_rates();
        let traj = periodic_steady_state(&r, 1e-10).unwrap();
        let rep = closed_cycle_work(&r, &traj, 1e-6, 1e-8).unwrap();
        assert!(rep.w < 0.0, "Markovian W = {}", rep.w);
        assert!(rep.cycle_closure_error < 1e-6);
    }

    #[test]
    fn randomized_campaign_obeys_second_law() {
        for seed in 0..25u64 {
            let r = RateTrajectory::randomized(seed, 256);
            r.check_detailed_balance(1e-12).unwrap();
            let traj = periodic_steady_state(&r, 1e-9).unwrap();
            let rep = closed_cycle_work(&r, &traj, 1e-6, 1e-8)
                .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert!(rep.w <= 1e-8, "seed {seed}: W = {}", rep.w);
            let ent = entropy_production_check(&r, &traj).unwrap();
            assert!(ent.max_violation <= 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn zero_temperature_rates_are_rejected() {
        let bath = BathSpec::new(0.1, 10.0 / 7.0, 10.0, f64::INFINITY).unwrap();
        let drive = SinusoidDrive::new(DriveSpec {
            omega_a: 1.0,
            delta: 0.25,
            omega_mod: 2.5,
            t_start: 0.0,
        })
        .unwrap();
        assert!(RateTrajectory::golden_rule(&bath, &drive, 64).is_err());
    }
}

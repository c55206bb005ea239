//! Piston drive ω(t), its accumulated phase factor ε(t), and the Bessel
//! sideband decomposition.
//!
//! Drives are strategy objects behind the [`Drive`] trait so that kernels,
//! work routes and the exact simulator accept any periodic modulation; the
//! sinusoidal Stark shift is the canonical instance and carries analytic
//! fast paths. Variants are selectable by name via [`drive_names`] /
//! [`build_drive`].

use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_j_row;
use crate::numerics::quad::adaptive_complex;
use crate::numerics::spline::CubicSpline;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Parameters of the sinusoidal Stark-shift drive
/// ω(t) = ω_a + δ sin(Ω (t − t_start)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    /// Carrier (mean level splitting).
    pub omega_a: f64,
    /// Modulation depth; may be negative (phase-flipped drive).
    pub delta: f64,
    /// Modulation angular rate Ω; one cycle lasts 2π/Ω.
    pub omega_mod: f64,
    /// Cycle start time (the measurement that opens the cycle).
    pub t_start: f64,
}

impl DriveSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a > 0.0 && self.omega_a.is_finite()) {
            return Err(Error::invalid(
                "drive",
                format!("omega_a = {} must be > 0", self.omega_a),
            ));
        }
        if !(self.omega_mod > 0.0 && self.omega_mod.is_finite()) {
            return Err(Error::invalid(
                "drive",
                format!("omega_mod = {} must be > 0", self.omega_mod),
            ));
        }
        if !(self.delta.abs() < self.omega_a) {
            return Err(Error::invalid(
                "drive",
                format!(
                    "|delta| = {} must stay below omega_a = {} (level ordering)",
                    self.delta.abs(),
                    self.omega_a
                ),
            ));
        }
        if !self.t_start.is_finite() {
            return Err(Error::invalid("drive", "t_start must be finite"));
        }
        Ok(())
    }

    pub fn t_cycle(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_mod
    }
}

/// A periodic level-splitting modulation. `t` is absolute time; phase
/// integrals start at `t_start()`.
pub trait Drive: Send + Sync {
    fn name(&self) -> &'static str;
    fn omega(&self, t: f64) -> f64;
    fn omega_dot(&self, t: f64) -> f64;
    /// ∫_{t_start}^{t} ω(s) ds.
    fn phase(&self, t: f64) -> f64;
    fn period(&self) -> f64;
    fn t_start(&self) -> f64;
    /// Carrier frequency (the period-average of ω).
    fn carrier(&self) -> f64;

    /// Unit-modulus phase factor ε(t) = exp(i ∫_{t_start}^t ω(s) ds).
    fn phase_factor(&self, t: f64) -> C64 {
        (C64::i() * self.phase(t)).exp()
    }

    /// Modulation spectral amplitude
    /// A(x, τ) = ∫_0^τ e^{i x u} ε(t_start + u) du.
    ///
    /// The default evaluates the oscillatory integral by adaptive
    /// quadrature; analytic drives override it.
    fn spectral_amplitude(&self, x: f64, tau: f64, abs_tol: f64) -> Result<C64> {
        if tau <= 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let t0 = self.t_start();
        let (value, _err) = adaptive_complex(
            |u| (C64::i() * (x * u + self.phase(t0 + u))).exp(),
            0.0,
            tau,
            abs_tol,
            4000,
        )?;
        Ok(value)
    }
}

/// Sinusoidal Stark-shift drive with closed-form phase and a Bessel-series
/// spectral amplitude.
#[derive(Debug, Clone)]
pub struct SinusoidDrive {
    spec: DriveSpec,
    /// iⁿ J_n(−δ/Ω) for n = 0..n_max, with J_{−n} = (−1)ⁿ J_n.
    bessel: Vec<f64>,
}

impl SinusoidDrive {
    pub fn new(spec: DriveSpec) -> Result<Self> {
        spec.validate()?;
        let z = spec.delta / spec.omega_mod;
        // carry the row out to a hard floor so the sideband series is
        // exact to rounding
        let mut n_max = (z.abs().ceil() as usize) + 24;
        let mut row;
        loop {
            row = bessel_j_row(n_max, -z);
            if row[n_max].abs() < 1e-17 || n_max > 400 {
                break;
            }
            n_max += 16;
        }
        if row[n_max].abs() >= 1e-17 {
            return Err(Error::invalid(
                "drive",
                format!("sideband series for delta/Omega = {z} does not truncate"),
            ));
        }
        Ok(SinusoidDrive { spec, bessel: row })
    }

    pub fn spec(&self) -> &DriveSpec {
        &self.spec
    }
}

impl Drive for SinusoidDrive {
    fn name(&self) -> &'static str {
        "sinusoid"
    }

    fn omega(&self, t: f64) -> f64 {
        let d = &self.spec;
        d.omega_a + d.delta * (d.omega_mod * (t - d.t_start)).sin()
    }

    fn omega_dot(&self, t: f64) -> f64 {
        let d = &self.spec;
        d.delta * d.omega_mod * (d.omega_mod * (t - d.t_start)).cos()
    }

    fn phase(&self, t: f64) -> f64 {
        let d = &self.spec;
        let u = t - d.t_start;
        d.omega_a * u + d.delta / d.omega_mod * (1.0 - (d.omega_mod * u).cos())
    }

    fn period(&self) -> f64 {
        self.spec.t_cycle()
    }

    fn t_start(&self) -> f64 {
        self.spec.t_start
    }

    fn carrier(&self) -> f64 {
        self.spec.omega_a
    }

    /// Closed form via the Jacobi–Anger expansion:
    /// A(x, τ) = e^{iδ/Ω} Σ_n iⁿ J_n(−δ/Ω) E(x + ω_a + nΩ, τ),
    /// E(y, τ) = (e^{iyτ} − 1)/(iy).
    fn spectral_amplitude(&self, x: f64, tau: f64, _abs_tol: f64) -> Result<C64> {
        if tau <= 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let d = &self.spec;
        let mut sum = C64::new(0.0, 0.0);
        let n_max = self.bessel.len() as i32 - 1;
        for n in -n_max..=n_max {
            let jn = {
                let a = self.bessel[n.unsigned_abs() as usize];
                if n < 0 && n % 2 != 0 {
                    -a
                } else {
                    a
                }
            };
            if jn == 0.0 {
                continue;
            }
            let i_pow = match n.rem_euclid(4) {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, 1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, -1.0),
            };
            let y = x + d.omega_a + n as f64 * d.omega_mod;
            sum += i_pow * jn * resonant_window(y, tau);
        }
        Ok((C64::i() * (d.delta / d.omega_mod)).exp() * sum)
    }
}

/// E(y, τ) = ∫_0^τ e^{iyu} du = (e^{iyτ} − 1)/(iy), series near y = 0.
fn resonant_window(y: f64, tau: f64) -> C64 {
    let z = y * tau;
    if z.abs() < 1e-4 {
        // τ (1 + iz/2 − z²/6 − iz³/24)
        C64::new(1.0 - z * z / 6.0, z / 2.0 - z * z * z / 24.0) * tau
    } else {
        ((C64::i() * z).exp() - 1.0) / C64::new(0.0, y)
    }
}

/// Arbitrary periodic drive given by samples of ω over one period.
/// Interpolates with a cubic spline; phase by spline integration.
#[derive(Debug, Clone)]
pub struct TabulatedDrive {
    spline: CubicSpline,
    cumulative: Vec<f64>,
    period: f64,
    t_start: f64,
    carrier: f64,
}

impl TabulatedDrive {
    /// `times` span exactly one period starting at 0; `omegas` are the
    /// level splittings at those offsets from `t_start`.
    pub fn new(times: &[f64], omegas: &[f64], t_start: f64) -> Result<Self> {
        if times.len() != omegas.len() || times.len() < 4 {
            return Err(Error::invalid("drive", "need ≥ 4 matching samples"));
        }
        if times[0] != 0.0 {
            return Err(Error::invalid("drive", "samples must start at 0"));
        }
        if (omegas[0] - omegas[omegas.len() - 1]).abs()
            > 1e-9 * omegas[0].abs().max(1.0)
        {
            return Err(Error::invalid("drive", "ω must close over the period"));
        }
        if omegas.iter().any(|&w| w <= 0.0) {
            return Err(Error::invalid("drive", "ω(t) must stay positive"));
        }
        let spline = CubicSpline::new(times, omegas)?;
        let cumulative = spline.cumulative_at_knots();
        let period = *times.last().unwrap();
        let carrier = cumulative.last().unwrap() / period;
        Ok(TabulatedDrive {
            spline,
            cumulative,
            period,
            t_start,
            carrier,
        })
    }

    fn fold(&self, t: f64) -> (f64, f64) {
        let u = t - self.t_start;
        let k = (u / self.period).floor();
        (u - k * self.period, k)
    }
}

impl Drive for TabulatedDrive {
    fn name(&self) -> &'static str {
        "tabulated"
    }

    fn omega(&self, t: f64) -> f64 {
        let (u, _) = self.fold(t);
        self.spline.eval(u)
    }

    fn omega_dot(&self, t: f64) -> f64 {
        let (u, _) = self.fold(t);
        self.spline.deriv(u)
    }

    fn phase(&self, t: f64) -> f64 {
        let (u, k) = self.fold(t);
        k * self.cumulative.last().unwrap() + self.spline.integral(u)
    }

    fn period(&self) -> f64 {
        self.period
    }

    fn t_start(&self) -> f64 {
        self.t_start
    }

    fn carrier(&self) -> f64 {
        self.carrier
    }
}

/// Sideband weights iⁿ J_n(−δ/Ω) for n ∈ [−n_max, n_max]. Partial sums
/// reconstruct e^{−i(δ/Ω) cos(Ω(t−t_start))}; fails when the truncation
/// tail at |n| = n_max would exceed a 1e−10 reconstruction error.
pub fn sideband_weights(d: &DriveSpec, n_max: usize) -> Result<Vec<(i32, C64)>> {
    d.validate()?;
    let z = -d.delta / d.omega_mod;
    let row = bessel_j_row(n_max, z);
    if row[n_max].abs() > 1e-11 {
        return Err(Error::invalid(
            "sideband order",
            format!(
                "|J_{n_max}({z})| = {:.2e} too large for 1e-10 reconstruction",
                row[n_max].abs()
            ),
        ));
    }
    let mut out = Vec::with_capacity(2 * n_max + 1);
    for n in -(n_max as i32)..=(n_max as i32) {
        let a = row[n.unsigned_abs() as usize];
        let jn = if n < 0 && n % 2 != 0 { -a } else { a };
        let i_pow = match n.rem_euclid(4) {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        out.push((n, i_pow * jn));
    }
    Ok(out)
}

/// Names understood by [`build_drive`].
pub fn drive_names() -> &'static [&'static str] {
    &["sinusoid", "tabulated"]
}

/// Runtime drive selection by name. `tabulated` expects matching sample
/// vectors; `sinusoid` ignores them.
pub fn build_drive(
    name: &str,
    spec: &DriveSpec,
    samples: Option<(&[f64], &[f64])>,
) -> Result<Box<dyn Drive>> {
    match name {
        "sinusoid" => Ok(Box::new(SinusoidDrive::new(*spec)?)),
        "tabulated" => {
            let (t, w) = samples.ok_or_else(|| {
                Error::invalid("drive", "tabulated drive needs omega samples")
            })?;
            Ok(Box::new(TabulatedDrive::new(t, w, spec.t_start)?))
        }
        other => Err(Error::invalid(
            "drive",
            format!("unknown drive kind '{other}'; known: {:?}", drive_names()),
        )),
    }
}

//! Cycle work, measurement bounds, and the three-stroke optimal-cycle
//! ledger.
//!
//! Work sign convention: positive = extracted by the piston (the negative
//! of the invested work). Entropies use the natural logarithm, k_B = 1.
//!
//! The three cycle-work routes (quadrature, closed form, approximation)
//! discretize the same physics and are interchangeable strategies behind
//! [`CycleWorkRoute`]; they register by name in [`route_registry`] for
//! runtime selection.

use crate::bath::{BathSpec, SpectralTruncation};
use crate::error::{Error, Result};
use crate::kernels::KernelTable;
use crate::modulation::{Drive, DriveSpec};
use crate::numerics::quad::adaptive_intervals;
use crate::numerics::spline::CubicSpline;
use serde::Serialize;

/// One stage of a thermodynamic cycle.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Stroke {
    pub label: String,
    /// Work extracted during the stroke (negative = invested).
    pub work: f64,
    pub energy_change: f64,
    pub entropy_change: f64,
}

/// Energy/entropy bookkeeping of a measurement-powered cycle.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct WorkLedger {
    #[serde(rename = "dE_meas")]
    pub de_meas: f64,
    #[serde(rename = "dS_meas")]
    pub ds_meas: f64,
    #[serde(rename = "W_cycle")]
    pub w_cycle: f64,
    #[serde(rename = "W_tot")]
    pub w_tot: f64,
    #[serde(rename = "W_SL")]
    pub w_sl: f64,
    #[serde(rename = "W_nsm_max")]
    pub w_nsm_max: f64,
    #[serde(rename = "W_sel_max")]
    pub w_sel_max: f64,
    pub strokes: Option<Vec<Stroke>>,
}

impl WorkLedger {
    /// Recompute `W_tot = W_cycle − dE_meas`.
    pub fn finalize(mut self) -> Self {
        self.w_tot = self.w_cycle - self.de_meas;
        self
    }
}

/// Binary Shannon entropy ℋ(p) = −p ln p − (1−p) ln(1−p) (natural log).
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    term(p) + term(1.0 - p)
}

fn check_covers_period(table: &KernelTable, period: f64) -> Result<()> {
    let t_end = *table.t.last().unwrap_or(&0.0);
    if t_end + 1e-9 * period < period {
        return Err(Error::invalid(
            "work integral",
            format!("kernel grid ends at {t_end}, must cover one period {period}"),
        ));
    }
    Ok(())
}

/// Integrate `f` sampled on the table grid over `[0, period]` with a cubic
/// spline (grid points need not align with the period end).
fn integrate_on_grid(t: &[f64], f: &[f64], period: f64) -> Result<f64> {
    let sp = CubicSpline::new(t, f)?;
    Ok(sp.integral(period))
}

/// W = −∮ s(t) ω̇(t) dt over one drive period by composite quadrature on
/// the table grid. Requires the polarization to be filled.
pub fn cycle_work_quadrature(table: &KernelTable, drive: &dyn Drive) -> Result<f64> {
    let s = table
        .s
        .as_ref()
        .ok_or_else(|| Error::invalid("work integral", "polarization not filled"))?;
    let period = drive.period();
    check_covers_period(table, period)?;
    let t0 = drive.t_start();
    let integrand: Vec<f64> = table
        .t
        .iter()
        .zip(s)
        .map(|(&u, &sv)| sv * drive.omega_dot(t0 + u))
        .collect();
    Ok(-integrate_on_grid(&table.t, &integrand, period)?)
}

/// Zero-temperature closed form for weak modulation,
///
/// W ≈ δ ∫ G_0(ω) (1/ω⁺²) [sinc(2π(ω⁺+Ω)/Ω) + sinc(2π(ω⁺−Ω)/Ω)] dω,
///
/// with ω⁺ = ω + ω_a and sinc(x) = sin(x)/x. Uses the bath's G_0
/// regardless of its β (leading order in the coupling at T = 0); valid for
/// δ/Ω ≪ 1, warns above 0.2.
pub fn cycle_work_closed_form(
    bath: &BathSpec,
    drive: &DriveSpec,
    trunc: &SpectralTruncation,
    quad_abs_tol: f64,
) -> Result<f64> {
    bath.validate()?;
    drive.validate()?;
    let ratio = (drive.delta / drive.omega_mod).abs();
    if ratio > 0.2 {
        log::warn!("closed-form work used at delta/Omega = {ratio:.3} > 0.2");
    }
    if bath.eta == 0.0 || drive.delta == 0.0 {
        return Ok(0.0);
    }
    // positive lobe of G_0 only
    let zero_t = BathSpec {
        beta: f64::INFINITY,
        ..*bath
    };
    let support = zero_t.support(trunc);
    let two_pi = 2.0 * std::f64::consts::PI;
    let sinc = |x: f64| if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    let q = adaptive_intervals(
        |w| {
            let wp = w + drive.omega_a;
            let window = sinc(two_pi * (wp + drive.omega_mod) / drive.omega_mod)
                + sinc(two_pi * (wp - drive.omega_mod) / drive.omega_mod);
            bath.response_zero_t(w) / (wp * wp) * window
        },
        &support,
        quad_abs_tol / drive.delta.abs(),
        8000,
    )?;
    Ok(drive.delta * q.value)
}

/// Strongly non-Markovian approximation W ≈ −∮ J_g(t) ω̇(t) dt (for the
/// sinusoid, −δ ∫ J_g(t) Ω cos Ωt dt).
pub fn cycle_work_approx(table: &KernelTable, drive: &dyn Drive) -> Result<f64> {
    let period = drive.period();
    check_covers_period(table, period)?;
    let t0 = drive.t_start();
    let integrand: Vec<f64> = table
        .t
        .iter()
        .zip(&table.j_g)
        .map(|(&u, &jg)| jg * drive.omega_dot(t0 + u))
        .collect();
    Ok(-integrate_on_grid(&table.t, &integrand, period)?)
}

/// Selective-measurement cycle work with per-outcome modulations,
///
/// W_sel = ∮ [J_g(t) (1−p_e) ω̇_g(t) − J_e(t) p_e ω̇_e(t)] dt,
///
/// with J_g taken from the g-outcome table (drive `d_g`) and J_e from the
/// e-outcome table (drive `d_e`), ρ_gg(0) = 1−p_e, ρ_ee(0) = p_e.
pub fn selective_cycle_work(
    k_e: &KernelTable,
    k_g: &KernelTable,
    d_e: &dyn Drive,
    d_g: &dyn Drive,
    p_e: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_e) {
        return Err(Error::invalid("selective work", format!("p_e = {p_e}")));
    }
    let period = d_g.period();
    if (d_e.period() - period).abs() > 1e-9 * period {
        return Err(Error::invalid(
            "selective work",
            format!(
                "outcome modulations have different periods: {} vs {}",
                d_e.period(),
                period
            ),
        ));
    }
    check_covers_period(k_e, period)?;
    check_covers_period(k_g, period)?;
    let ig: Vec<f64> = k_g
        .t
        .iter()
        .zip(&k_g.j_g)
        .map(|(&u, &jg)| jg * d_g.omega_dot(d_g.t_start() + u))
        .collect();
    let ie: Vec<f64> = k_e
        .t
        .iter()
        .zip(&k_e.j_e)
        .map(|(&u, &je)| je * d_e.omega_dot(d_e.t_start() + u))
        .collect();
    let term_g = integrate_on_grid(&k_g.t, &ig, period)?;
    let term_e = integrate_on_grid(&k_e.t, &ie, period)?;
    Ok((1.0 - p_e) * term_g - p_e * term_e)
}

/// Non-selective counterpart with a single shared modulation,
/// W_nsm = ∮ [J_g(t)(1−p_e) − J_e(t) p_e] ω̇(t) dt.
pub fn nsm_cycle_work(table: &KernelTable, drive: &dyn Drive, p_e: f64) -> Result<f64> {
    selective_cycle_work(table, table, drive, drive, p_e)
}

/// Thermodynamic bounds from the measurement cost:
/// W_nsm_max = ΔE_meas − T Δ𝒮_meas, W_SL = T ℋ(p_e),
/// W_sel_max = W_nsm_max + W_SL.
pub fn bounds(de_meas: f64, ds_meas: f64, temperature: f64, p_e: f64) -> Result<WorkLedger> {
    if ds_meas < -1e-12 {
        return Err(Error::invalid("bounds", format!("dS_meas = {ds_meas} < 0")));
    }
    if temperature < 0.0 {
        return Err(Error::invalid("bounds", format!("T = {temperature} < 0")));
    }
    if !(0.0..=1.0).contains(&p_e) {
        return Err(Error::invalid("bounds", format!("p_e = {p_e}")));
    }
    let w_nsm_max = de_meas - temperature * ds_meas;
    let w_sl = temperature * binary_entropy(p_e);
    Ok(WorkLedger {
        de_meas,
        ds_meas,
        w_sl,
        w_nsm_max,
        w_sel_max: w_nsm_max + w_sl,
        ..WorkLedger::default()
    })
}

/// The three-stroke optimal cycle: measurement → sudden stabilization →
/// isothermal return. Inputs are supersystem mean energies and von Neumann
/// entropies before/after the measurement and the stabilized energy
/// E_stab = ⟨H′⟩_ρ′.
///
/// The stroke works satisfy
/// W_sudden + W_isotherm = ΔE_meas − T Δ𝒮_meas identically.
pub fn optimal_cycle_ledger(
    e_before: f64,
    e_after_meas: f64,
    s_before: f64,
    s_after_meas: f64,
    e_stab: f64,
    temperature: f64,
) -> WorkLedger {
    let de_meas = e_after_meas - e_before;
    let ds_meas = s_after_meas - s_before;
    let w_sudden = e_after_meas - e_stab;
    let w_isotherm = -(e_before - e_stab) + temperature * (-ds_meas);
    let strokes = vec![
        Stroke {
            label: "measurement".into(),
            work: -de_meas,
            energy_change: de_meas,
            entropy_change: ds_meas,
        },
        Stroke {
            label: "sudden stabilization".into(),
            work: w_sudden,
            energy_change: e_stab - e_after_meas,
            entropy_change: 0.0,
        },
        Stroke {
            label: "isothermal return".into(),
            work: w_isotherm,
            energy_change: e_before - e_stab,
            entropy_change: -ds_meas,
        },
    ];
    WorkLedger {
        de_meas,
        ds_meas,
        w_cycle: w_sudden + w_isotherm,
        w_nsm_max: de_meas - temperature * ds_meas,
        w_sel_max: de_meas - temperature * ds_meas,
        strokes: Some(strokes),
        ..WorkLedger::default()
    }
    .finalize()
}

/// Context handed to a cycle-work route.
pub struct WorkContext<'a> {
    pub bath: &'a BathSpec,
    pub drive: &'a dyn Drive,
    /// Sinusoid parameters when the drive is the canonical sinusoid (the
    /// closed-form route requires them).
    pub spec: Option<DriveSpec>,
    /// Kernel table over one period (with polarization for the quadrature
    /// route).
    pub table: Option<&'a KernelTable>,
    pub truncation: SpectralTruncation,
    pub quad_abs_tol: f64,
}

/// A named, interchangeable algorithm computing the extractable work over
/// one cycle.
pub trait CycleWorkRoute: Send + Sync {
    fn name(&self) -> &'static str;
    fn compute(&self, cx: &WorkContext) -> Result<f64>;
}

struct QuadratureRoute;
struct ClosedFormRoute;
struct ApproxRoute;

impl CycleWorkRoute for QuadratureRoute {
    fn name(&self) -> &'static str {
        "quadrature"
    }
    fn compute(&self, cx: &WorkContext) -> Result<f64> {
        let table = cx
            .table
            .ok_or_else(|| Error::invalid("work route", "quadrature route needs a kernel table"))?;
        cycle_work_quadrature(table, cx.drive)
    }
}

impl CycleWorkRoute for ClosedFormRoute {
    fn name(&self) -> &'static str {
        "closed_form"
    }
    fn compute(&self, cx: &WorkContext) -> Result<f64> {
        let spec = cx.spec.ok_or_else(|| {
            Error::invalid("work route", "closed-form route needs sinusoid parameters")
        })?;
        cycle_work_closed_form(cx.bath, &spec, &cx.truncation, cx.quad_abs_tol)
    }
}

impl CycleWorkRoute for ApproxRoute {
    fn name(&self) -> &'static str {
        "approx"
    }
    fn compute(&self, cx: &WorkContext) -> Result<f64> {
        let table = cx
            .table
            .ok_or_else(|| Error::invalid("work route", "approx route needs a kernel table"))?;
        cycle_work_approx(table, cx.drive)
    }
}

static ROUTES: [&dyn CycleWorkRoute; 3] = [&QuadratureRoute, &ClosedFormRoute, &ApproxRoute];

/// All registered cycle-work routes.
pub fn route_registry() -> &'static [&'static dyn CycleWorkRoute] {
    &ROUTES
}

pub fn route_by_name(name: &str) -> Result<&'static dyn CycleWorkRoute> {
    ROUTES
        .iter()
        .copied()
        .find(|r| r.name() == name)
        .ok_or_else(|| {
            let known: Vec<_> = ROUTES.iter().map(|r| r.name()).collect();
            Error::invalid("work route", format!("unknown route '{name}'; known: {known:?}"))
        })
}

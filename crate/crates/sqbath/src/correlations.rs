//! Two-time correlations and stationary spectra via the quantum regression
//! theorem.
//!
//! For a stationary state `rho_ss` of a Liouvillian `L`, the regression
//! theorem gives `C(tau) = <A(tau) B(0)> = Tr[A exp(L tau) (B rho_ss)]`.
//! Spectra use the one-sided transform
//!
//! ```text
//! S(omega) = 2 Re Integral_0^inf exp(i omega tau) C(tau) dtau
//! ```
//!
//! which is real, reproduces Lorentzian half-widths equal to the negative
//! real parts of Liouvillian eigenvalues, and keeps fluorescence spectra
//! nonnegative once the coherent (delta-function) part is split off.  The
//! integral is evaluated by resolvent solves: with the stationary component
//! deflated, `S(omega) = 2 Re Tr[A x]` where
//! `(-i omega I - L + P0) vec(x) = vec(B rho_ss) - vec(rho_ss) Tr[B rho_ss]`
//! and `P0 = vec(rho_ss) vec(I)^T` pins the zero mode.  The coherent weight
//! `Tr[A rho_ss] Tr[B rho_ss]` is reported separately on [`Spectrum`].
//!
//! Three physical spectra are provided: the dipole fluorescence spectrum of
//! a two-level emitter, the quadrature fluorescence spectrum of the
//! ground-state transition of the four-level scheme (whose cross terms change
//! amplitudes but not line positions or widths), and the weak-probe
//! absorption spectrum `W = FT<[sigma(tau), sigma_dag(0)]>`, positive for
//! absorption and negative in gain regions.  A trapezoidal direct transform
//! of the time-domain correlation is included as an independent cross-check
//! of the resolvent evaluation.

use crate::error::{config_err, numerical_err, Result};
use crate::expm::{expm, one_norm};
use crate::hilbert::{DensityMatrix, Operator};
use crate::liouville::{
    eigenmodes, trace_vector, vec_density, Liouvillian, DEGENERATE_NULL_TOL, STEADY_RESIDUAL_TOL,
};
use crate::models::{DriveParams, FourLevelParams};
use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use num_complex::Complex64 as C64;

/// Slack on the dipole-correlation bound `|C(tau)| <= |C(0)|`.
pub const CORRELATION_BOUND_TOL: f64 = 1e-6;

/// Floor for fluorescence spectra after coherent-part subtraction, relative
/// to the spectral maximum.
pub const FLUORESCENCE_FLOOR_TOL: f64 = 1e-8;

/// Number of points in the default frequency grid.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Correlation horizon for the direct-transform cross-check, in units of the
/// slowest decay time: exp(-30) ~ 1e-13 truncation error.
pub const CORRELATION_HORIZON: f64 = 30.0;

/// Relative tolerance for detecting a uniform time grid.
const UNIFORM_GRID_REL_TOL: f64 = 1e-9;

/// A stationary two-time correlation `C(tau)` sampled on a time grid.
#[derive(Debug, Clone)]
pub struct CorrelationSeries {
    taus: Vec<f64>,
    values: Vec<C64>,
}

impl CorrelationSeries {
    /// Validate and wrap a sampled correlation.
    ///
    /// The grid must start at `tau = 0` and increase strictly; values must
    /// be finite.  For dipole correlations `<sigma_dag(tau) sigma(0)>` the
    /// magnitude is additionally bounded by `|C(0)|` up to
    /// [`CORRELATION_BOUND_TOL`]; that bound depends on the operators and is
    /// asserted by callers, not here.
    pub fn new(taus: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if taus.is_empty() {
            return config_err("correlation grid is empty".to_string());
        }
        if taus.len() != values.len() {
            return config_err(format!(
                "correlation grid length {} does not match value count {}",
                taus.len(),
                values.len()
            ));
        }
        if taus[0] != 0.0 {
            return config_err(format!(
                "correlation grid must start at tau = 0, got {}",
                taus[0]
            ));
        }
        for w in taus.windows(2) {
            if !(w[1] > w[0]) {
                return config_err(format!(
                    "correlation grid must increase strictly: {} then {}",
                    w[0], w[1]
                ));
            }
        }
        for (t, v) in taus.iter().zip(&values) {
            if !v.re.is_finite() || !v.im.is_finite() {
                return numerical_err(format!("correlation non-finite at tau = {t}"));
            }
        }
        Ok(Self { taus, values })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

/// A real spectrum on a frequency grid, with the coherent line split off.
#[derive(Debug, Clone)]
pub struct Spectrum {
    omegas: Vec<f64>,
    values: Vec<f64>,
    coherent: C64,
}

impl Spectrum {
    /// Validate and wrap spectrum samples; `coherent` is the weight of the
    /// delta line at the drive frequency, `Tr[A rho_ss] Tr[B rho_ss]`.
    pub fn new(omegas: Vec<f64>, values: Vec<f64>, coherent: C64) -> Result<Self> {
        if omegas.is_empty() {
            return config_err("frequency grid is empty".to_string());
        }
        if omegas.len() != values.len() {
            return config_err(format!(
                "frequency grid length {} does not match value count {}",
                omegas.len(),
                values.len()
            ));
        }
        for w in omegas.windows(2) {
            if !(w[1] > w[0]) {
                return config_err(format!(
                    "frequency grid must increase strictly: {} then {}",
                    w[0], w[1]
                ));
            }
        }
        for (om, v) in omegas.iter().zip(&values) {
            if !v.is_finite() {
                return numerical_err(format!("spectrum non-finite at omega = {om}"));
            }
        }
        if !coherent.re.is_finite() || !coherent.im.is_finite() {
            return numerical_err("coherent weight non-finite".to_string());
        }
        Ok(Self {
            omegas,
            values,
            coherent,
        })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Weight of the coherent (elastic) delta line, reported separately so
    /// the sampled values hold only the inelastic part.
    pub fn coherent(&self) -> C64 {
        self.coherent
    }

    /// Largest absolute sampled value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Default frequency grid: 2001 points over `+-1.5 Omega_D` when driven,
/// `+-10 gamma` when not; symmetric with an exact zero sample.
pub fn default_omega_grid(drive: Option<&DriveParams>, gamma: f64) -> Result<Vec<f64>> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return config_err(format!("frequency grid needs gamma > 0, got {gamma}"));
    }
    let span = match drive {
        Some(d) => 1.5 * d.omega_d,
        None => 10.0 * gamma,
    };
    if !(span > 0.0) {
        return config_err(format!("frequency grid span must be positive, got {span}"));
    }
    let n = DEFAULT_GRID_POINTS;
    Ok((0..n)
        .map(|i| span * (2.0 * (i as f64) / ((n - 1) as f64) - 1.0))
        .collect())
}

/// Uniform time grid from 0 to `CORRELATION_HORIZON / (narrowest half-width)`,
/// long enough that every mode of `l` has fully decayed at the endpoint.
pub fn default_tau_grid(l: &Liouvillian, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return config_err(format!("time grid needs at least 2 points, got {points}"));
    }
    let modes = eigenmodes(l)?;
    let scale = modes
        .iter()
        .map(|m| m.eigenvalue.norm())
        .fold(0.0f64, f64::max);
    let hw_min = modes
        .iter()
        .filter(|m| m.eigenvalue.norm() > DEGENERATE_NULL_TOL * scale)
        .map(|m| m.halfwidth)
        .fold(f64::INFINITY, f64::min);
    if !(hw_min > 0.0) || !hw_min.is_finite() {
        return numerical_err(format!(
            "cannot choose correlation horizon: narrowest decaying half-width is {hw_min}"
        ));
    }
    let tau_max = CORRELATION_HORIZON / hw_min;
    Ok((0..points)
        .map(|i| tau_max * (i as f64) / ((points - 1) as f64))
        .collect())
}

/// `Tr[a . unvec(v)]` without forming the product matrix.
fn trace_product(a: &Array2<C64>, v: &Array1<C64>, d: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[[i, j]] * v[j + d * i];
        }
    }
    acc
}

fn trace_of(m: &Array2<C64>) -> C64 {
    (0..m.nrows()).map(|i| m[[i, i]]).sum()
}

/// Confirm `rho_ss` lives on the model's space and is stationary under `l`.
fn check_stationary(l: &Liouvillian, rho_ss: &DensityMatrix) -> Result<()> {
    if rho_ss.space() != l.space() {
        return config_err(format!(
            "state space {:?} does not match model space {:?}",
            rho_ss.space().labels(),
            l.space().labels()
        ));
    }
    let v = vec_density(rho_ss.matrix());
    let residual = l.matrix().dot(&v).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let allow = STEADY_RESIDUAL_TOL * one_norm(l.matrix());
    if residual > allow {
        return numerical_err(format!(
            "state is not stationary: |L rho| = {residual:.3e} exceeds {allow:.3e}"
        ));
    }
    Ok(())
}

fn check_operator_space(l: &Liouvillian, op: &Operator, what: &str) -> Result<()> {
    if op.space() != l.space() {
        return config_err(format!(
            "{what} operator space {:?} does not match model space {:?}",
            op.space().labels(),
            l.space().labels()
        ));
    }
    Ok(())
}

/// Stationary correlation `C(tau) = <A(tau) B(0)>` on a given time grid.
///
/// Uniform grids are propagated by one precomputed matrix exponential per
/// step; non-uniform grids fall back to one exponential per sample.
pub fn two_time_correlation(
    l: &Liouvillian,
    a: &Operator,
    b: &Operator,
    rho_ss: &DensityMatrix,
    taus: &[f64],
) -> Result<CorrelationSeries> {
    check_operator_space(l, a, "left")?;
    check_operator_space(l, b, "right")?;
    check_stationary(l, rho_ss)?;
    if taus.is_empty() {
        return config_err("correlation grid is empty".to_string());
    }
    if taus[0] != 0.0 {
        return config_err(format!(
            "correlation grid must start at tau = 0, got {}",
            taus[0]
        ));
    }
    for w in taus.windows(2) {
        if !(w[1] > w[0]) {
            return config_err(format!(
                "correlation grid must increase strictly: {} then {}",
                w[0], w[1]
            ));
        }
    }

    let d = l.dim();
    let a_mat = a.matrix();
    let v0 = vec_density(&b.matrix().dot(rho_ss.matrix()));

    let uniform = taus.len() >= 2 && {
        let step = taus[1] - taus[0];
        taus.windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= UNIFORM_GRID_REL_TOL * step)
    };

    let mut values = Vec::with_capacity(taus.len());
    if uniform {
        let step = taus[1] - taus[0];
        let prop = expm(&l.matrix().mapv(|z| z * step))?;
        let mut v = v0;
        for _ in taus {
            values.push(trace_product(a_mat, &v, d));
            v = prop.dot(&v);
        }
    } else {
        for &tau in taus {
            let v = if tau == 0.0 {
                v0.clone()
            } else {
                expm(&l.matrix().mapv(|z| z * tau))?.dot(&v0)
            };
            values.push(trace_product(a_mat, &v, d));
        }
    }
    CorrelationSeries::new(taus.to_vec(), values)
}

/// Resolvent evaluation shared by all spectra: `a_mat` is the observable,
/// `x0` the initial operand of the regression evolution.
fn resolvent_spectrum(
    l: &Liouvillian,
    a_mat: &Array2<C64>,
    x0: &Array2<C64>,
    rho_ss: &DensityMatrix,
    omegas: &[f64],
) -> Result<(Vec<f64>, C64)> {
    check_stationary(l, rho_ss)?;
    if omegas.is_empty() {
        return config_err("frequency grid is empty".to_string());
    }
    for om in omegas {
        if !om.is_finite() {
            return config_err(format!("frequency grid contains non-finite omega = {om}"));
        }
    }

    let d = l.dim();
    let d2 = d * d;
    let vss = vec_density(rho_ss.matrix());
    let t = trace_vector(d);
    let tr_x0 = trace_of(x0);
    let x = vec_density(x0) - vss.mapv(|z| z * tr_x0);
    // Deflation P0 = vec(rho_ss) vec(I)^T: shifts only the zero mode, and x
    // has no component along it (its trace is zero by construction).
    let deflated = Array2::from_shape_fn((d2, d2), |(i, j)| vss[i] * t[j]) - l.matrix();

    let mut values = Vec::with_capacity(omegas.len());
    for &om in omegas {
        let mut m = deflated.clone();
        for k in 0..d2 {
            m[[k, k]] += C64::new(0.0, -om);
        }
        let y = m.solve(&x).map_err(|e| {
            crate::error::Error::Numerical(format!("resolvent solve failed at omega = {om}: {e}"))
        })?;
        values.push(2.0 * trace_product(a_mat, &y, d).re);
    }
    let tr_a_rho = trace_of(&a_mat.dot(rho_ss.matrix()));
    Ok((values, tr_a_rho * tr_x0))
}

/// Spectrum `2 Re FT <A(tau) B(0)>` by resolvent solves, coherent line
/// removed before inversion and reported on the result.
pub fn spectrum_from_resolvent(
    l: &Liouvillian,
    a: &Operator,
    b: &Operator,
    rho_ss: &DensityMatrix,
    omegas: &[f64],
) -> Result<Spectrum> {
    check_operator_space(l, a, "left")?;
    check_operator_space(l, b, "right")?;
    let x0 = b.matrix().dot(rho_ss.matrix());
    let (values, coherent) = resolvent_spectrum(l, a.matrix(), &x0, rho_ss, omegas)?;
    Spectrum::new(omegas.to_vec(), values, coherent)
}

/// The lowering operator of the radiating transition: `|g-><g+|` when those
/// labels exist (ground doublet of the four-level scheme), else the
/// canonical lowering operator of a two-level space.
fn ground_sigma(l: &Liouvillian) -> Result<Array2<C64>> {
    let space = l.space();
    let d = space.dim();
    let mut m = Array2::zeros((d, d));
    if let (Ok(lo), Ok(up)) = (space.index("g-"), space.index("g+")) {
        m[[lo, up]] = C64::new(1.0, 0.0);
        return Ok(m);
    }
    if d == 2 {
        m[[0, 1]] = C64::new(1.0, 0.0);
        return Ok(m);
    }
    config_err(format!(
        "no radiating transition in space {:?}: need labels \"g-\",\"g+\" or a two-level space",
        space.labels()
    ))
}

/// Dipole fluorescence spectrum `FT <sigma_dag(0) sigma(tau)>` of a
/// two-level emitter (equivalently `2 Re FT <sigma_dag(tau) sigma(0)>`).
pub fn fluorescence_spectrum_two_level(
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    omegas: &[f64],
) -> Result<Spectrum> {
    if l.dim() != 2 {
        return config_err(format!(
            "two-level fluorescence needs a two-level model, got dimension {}",
            l.dim()
        ));
    }
    let sigma = ground_sigma(l)?;
    let sigma_dag = sigma.t().mapv(|z| z.conj());
    let x0 = sigma.dot(rho_ss.matrix());
    let (values, coherent) = resolvent_spectrum(l, &sigma_dag, &x0, rho_ss, omegas)?;
    Spectrum::new(omegas.to_vec(), values, coherent)
}

/// Quadrature fluorescence spectrum of the ground-state transition,
/// `FT <X_dag(0) X(tau)>` with `X = eps_plus e^{-i phi_L} sigma + eps_minus sigma_dag`.
///
/// Works on the effective two-level model or the full four-level model (via
/// its `g-`/`g+` transition).  The cross terms change line amplitudes
/// relative to the plain dipole spectrum but not positions or widths; at
/// `eps_minus = 0` it reduces exactly to `eps_plus^2` times the dipole
/// spectrum.
pub fn fluorescence_spectrum_four_level(
    l: &Liouvillian,
    params: &FourLevelParams,
    rho_ss: &DensityMatrix,
    omegas: &[f64],
) -> Result<Spectrum> {
    params.validate()?;
    let sigma = ground_sigma(l)?;
    let sigma_dag = sigma.t().mapv(|z| z.conj());
    let coef = C64::from_polar(params.eps_plus, -params.phi_l);
    let x = sigma.mapv(|z| z * coef) + sigma_dag.mapv(|z| z * C64::new(params.eps_minus, 0.0));
    let x_dag = x.t().mapv(|z| z.conj());
    let x0 = rho_ss.matrix().dot(&x_dag);
    let (values, coherent) = resolvent_spectrum(l, &x, &x0, rho_ss, omegas)?;
    Spectrum::new(omegas.to_vec(), values, coherent)
}

/// Weak-probe absorption spectrum `W = FT <[sigma(tau), sigma_dag(0)]>`:
/// positive where the emitter absorbs, negative in gain regions.
pub fn absorption_spectrum(
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    omegas: &[f64],
) -> Result<Spectrum> {
    let sigma = ground_sigma(l)?;
    let sigma_dag = sigma.t().mapv(|z| z.conj());
    let absorb = sigma_dag.dot(rho_ss.matrix());
    let emit = rho_ss.matrix().dot(&sigma_dag);
    let (v_abs, c_abs) = resolvent_spectrum(l, &sigma, &absorb, rho_ss, omegas)?;
    let (v_emit, c_emit) = resolvent_spectrum(l, &sigma, &emit, rho_ss, omegas)?;
    let values = v_abs.iter().zip(&v_emit).map(|(a, e)| a - e).collect();
    Spectrum::new(omegas.to_vec(), values, c_abs - c_emit)
}

/// Direct one-sided transform `2 Re Integral exp(i omega tau) (C - asymptote)`
/// by the trapezoidal rule, as an independent cross-check of the resolvent
/// spectra; `asymptote` is the coherent plateau `lim C(tau)`.
pub fn spectrum_from_correlation_ft(
    series: &CorrelationSeries,
    omegas: &[f64],
    asymptote: C64,
) -> Result<Spectrum> {
    if omegas.is_empty() {
        return config_err("frequency grid is empty".to_string());
    }
    let taus = series.taus();
    let centered: Vec<C64> = series.values().iter().map(|c| c - asymptote).collect();
    let mut values = Vec::with_capacity(omegas.len());
    for &om in omegas {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..taus.len() - 1 {
            let dt = taus[k + 1] - taus[k];
            let f0 = centered[k] * C64::from_polar(1.0, om * taus[k]);
            let f1 = centered[k + 1] * C64::from_polar(1.0, om * taus[k + 1]);
            acc += (f0 + f1) * (0.5 * dt);
        }
        values.push(2.0 * acc.re);
    }
    Spectrum::new(omegas.to_vec(), values, asymptote)
}

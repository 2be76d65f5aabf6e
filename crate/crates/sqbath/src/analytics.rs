//! Closed-form results: Bloch relaxation rates, the driven Bloch ODE,
//! strong-driving linewidth tables, and the cross-decay interference rate.
//!
//! Squeezing makes the two transverse Bloch decay rates asymmetric,
//! `gamma_x = gamma(N + 1/2 - M)` versus `gamma_y = gamma(N + 1/2 + M)`
//! (phases referenced to phi = 0), while `gamma_z = gamma(2N + 1)`. Under
//! strong driving the Mollow lines inherit phase-dependent half-widths;
//! [`mollow_linewidths`] evaluates them at phi in {0, pi}, including the
//! cross-decay-degraded forms parameterized by the linear branching
//! amplitude `g_l` (defined at maximal squeezing, where the four-level
//! mapping lives). [`cross_decay_rate`] is the interference formula for
//! residual ground-state pumping through two far-detuned upper manifolds,
//! minimized at the detuning ratio of [`optimal_detuning_ratio`];
//! [`extracted_cross_decay_rate`] measures the same rate from the steady
//! state of the interference-subsystem master equation.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{config_err, numerical_err, Result};
use crate::expm::expm;
use crate::hilbert::expectation;
use crate::liouville::{build_liouvillian, steady_state};
use crate::models::{
    recycled_subsystem_model, DriveParams, SqueezedBathParams, SubsystemParams,
};

/// Slack on the Bloch-vector length bound |S| <= 1.
pub const BLOCH_LENGTH_TOL: f64 = 1e-9;

/// A classical Bloch vector, validated to lie in the unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub s_x: f64,
    pub s_y: f64,
    pub s_z: f64,
}

impl BlochState {
    pub fn new(s_x: f64, s_y: f64, s_z: f64) -> Result<Self> {
        let len2 = s_x * s_x + s_y * s_y + s_z * s_z;
        if !len2.is_finite() || len2 > 1.0 + BLOCH_LENGTH_TOL {
            return config_err(format!(
                "Bloch vector length^2 = {len2} outside the unit ball"
            ));
        }
        Ok(Self { s_x, s_y, s_z })
    }
}

/// Bloch decay rates of the squeezed bath, phases referenced to phi = 0:
/// `(gamma(N+1/2-M), gamma(N+1/2+M), gamma(2N+1))`.
pub fn bloch_decay_rates(p: &SqueezedBathParams) -> Result<(f64, f64, f64)> {
    p.validate()?;
    let half = p.n + 0.5;
    Ok((
        p.gamma * (half - p.m),
        p.gamma * (half + p.m),
        p.gamma * (2.0 * p.n + 1.0),
    ))
}

/// Transverse rates when the squeezed modes fill only a fraction
/// `epsilon` of the solid angle; the rest sees ordinary vacuum:
/// `gamma_x = gamma [eps (N+1/2-M) + (1-eps)/2]`, analogously with `+M`.
pub fn partial_solid_angle_rates(
    p: &SqueezedBathParams,
    epsilon: f64,
) -> Result<(f64, f64)> {
    p.validate()?;
    if !(0.0..=1.0).contains(&epsilon) {
        return config_err(format!(
            "solid-angle fraction must lie in [0, 1], got {epsilon}"
        ));
    }
    let half = p.n + 0.5;
    let vac = (1.0 - epsilon) / 2.0;
    Ok((
        p.gamma * (epsilon * (half - p.m) + vac),
        p.gamma * (epsilon * (half + p.m) + vac),
    ))
}

/// Coefficients of the linear Bloch system `dS/dt = A S + b` for the
/// driven squeezed bath, generalized by the branching factor `g_l^2`
/// multiplying every squeezing- and population-decay term (the
/// cross-decay dephasing fills in the difference):
///
/// ```text
/// A = [ -gamma(N+1/2 - gl^2 M cos phi)    gamma gl^2 M sin phi          Omega_D sin phi_D ]
///     [  gamma gl^2 M sin phi            -gamma(N+1/2 + gl^2 M cos phi) Omega_D cos phi_D ]
///     [ -Omega_D sin phi_D               -Omega_D cos phi_D            -gamma gl^2 (2N+1) ]
/// b = (0, 0, -gamma gl^2)
/// ```
///
/// At `g_l = 1` this is the driven Gardiner-Bloch equation; its eigenvalues
/// coincide with the nonzero Liouvillian eigenvalues of the matching model.
pub fn bloch_coefficients(
    p: &SqueezedBathParams,
    drive: Option<DriveParams>,
    g_l: f64,
) -> Result<(Array2<f64>, Array1<f64>)> {
    p.validate()?;
    if !(0.0..=1.0).contains(&g_l) {
        return config_err(format!("g_l must lie in [0, 1], got {g_l}"));
    }
    let gl2 = g_l * g_l;
    let half = p.n + 0.5;
    let (cos_phi, sin_phi) = (p.phi.cos(), p.phi.sin());
    let mut a = Array2::zeros((3, 3));
    a[[0, 0]] = -p.gamma * (half - gl2 * p.m * cos_phi);
    a[[0, 1]] = p.gamma * gl2 * p.m * sin_phi;
    a[[1, 0]] = p.gamma * gl2 * p.m * sin_phi;
    a[[1, 1]] = -p.gamma * (half + gl2 * p.m * cos_phi);
    a[[2, 2]] = -p.gamma * gl2 * (2.0 * p.n + 1.0);
    if let Some(d) = drive {
        let (cos_d, sin_d) = (d.phi_d.cos(), d.phi_d.sin());
        a[[0, 2]] += d.omega_d * sin_d;
        a[[1, 2]] += d.omega_d * cos_d;
        a[[2, 0]] -= d.omega_d * sin_d;
        a[[2, 1]] -= d.omega_d * cos_d;
    }
    let b = Array1::from_vec(vec![0.0, 0.0, -p.gamma * gl2]);
    Ok((a, b))
}

/// Integrate the Bloch ODE exactly through the matrix exponential of the
/// affine system (augmented 4x4), sampling at the given times.
pub fn bloch_evolve(
    p: &SqueezedBathParams,
    drive: Option<DriveParams>,
    g_l: f64,
    s0: &BlochState,
    times: &[f64],
) -> Result<Vec<BlochState>> {
    let (a, b) = bloch_coefficients(p, drive, g_l)?;
    let mut prev = f64::NEG_INFINITY;
    for &t in times {
        if !(t >= 0.0) {
            return config_err(format!("times must be nonnegative, got {t}"));
        }
        if t < prev {
            return config_err("times must be sorted ascending".to_string());
        }
        prev = t;
    }
    let mut aug: Array2<C64> = Array2::zeros((4, 4));
    for i in 0..3 {
        for j in 0..3 {
            aug[[i, j]] = C64::new(a[[i, j]], 0.0);
        }
        aug[[i, 3]] = C64::new(b[i], 0.0);
    }
    let x0 = Array1::from_vec(vec![
        C64::new(s0.s_x, 0.0),
        C64::new(s0.s_y, 0.0),
        C64::new(s0.s_z, 0.0),
        C64::new(1.0, 0.0),
    ]);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let prop = expm(&aug.mapv(|z| z * t))?;
        let x = prop.dot(&x0);
        out.push(BlochState::new(x[0].re, x[1].re, x[2].re)?);
    }
    Ok(out)
}

/// Strong-driving Mollow half-widths `(center, sidebands)` at phi in
/// {0, pi}, from the closed-form table rows. With `s = +1` at phi = 0 and
/// `s = -1` at phi = pi:
///
/// `center = gamma (N + 1/2 - s gl^2 M)`,
/// `sidebands = (gamma/4) [(2N+1) + 2 gl^2 ((2N+1) + s M)]`.
///
/// At `g_l = 1` these reduce to the two-level table (center `gamma_x` at
/// phi = 0, sidebands `(gamma/4)(6N+3+2M)`, and their phi = pi partners).
/// For `g_l < 1` the rows are defined only at maximal squeezing, where the
/// four-level mapping holds; that precondition is enforced.
pub fn mollow_linewidths(
    p: &SqueezedBathParams,
    phi: f64,
    g_l: f64,
) -> Result<(f64, f64)> {
    p.validate()?;
    if !(0.0..=1.0).contains(&g_l) {
        return config_err(format!("g_l must lie in [0, 1], got {g_l}"));
    }
    let sign = if phi.abs() < 1e-12 {
        1.0
    } else if (phi - std::f64::consts::PI).abs() < 1e-12 {
        -1.0
    } else {
        return config_err(format!(
            "unsupported phase: linewidth table is defined at phi = 0 or pi, got {phi}"
        ));
    };
    let gl2 = g_l * g_l;
    let max_m2 = p.n * (p.n + 1.0);
    if (1.0 - gl2).abs() > 1e-12 && (p.m * p.m - max_m2).abs() > 1e-9 * (1.0 + max_m2) {
        return config_err(format!(
            "linewidth rows with g_l < 1 require maximal squeezing M^2 = N(N+1), got M^2 = {}",
            p.m * p.m
        ));
    }
    let two_n1 = 2.0 * p.n + 1.0;
    let center = p.gamma * (p.n + 0.5 - sign * gl2 * p.m);
    let sidebands = 0.25 * p.gamma * (two_n1 + 2.0 * gl2 * (two_n1 + sign * p.m));
    Ok((center, sidebands))
}

/// Interference-suppressed cross-decay rate
/// `prefactor |gc_a^2 Gamma_a / (Delta_a - i Gamma_a/2)
///            - gc_e^2 Gamma_e / (Delta_e - i Gamma_e/2)|^2`.
/// The two amplitudes subtract because the paths emit into the same
/// continuum with opposite sign; equal manifolds at equal detunings
/// cancel exactly.
pub fn cross_decay_rate(p: &SubsystemParams) -> Result<f64> {
    p.validate()?;
    if p.delta_e == 0.0 || p.delta_a == 0.0 {
        return config_err("cross-decay formula needs nonzero detunings".to_string());
    }
    let term_a = C64::new(p.gc_a * p.gc_a * p.gamma_a, 0.0)
        / C64::new(p.delta_a, -p.gamma_a / 2.0);
    let term_e = C64::new(p.gc_e * p.gc_e * p.gamma_e, 0.0)
        / C64::new(p.delta_e, -p.gamma_e / 2.0);
    Ok(p.prefactor * (term_a - term_e).norm_sqr())
}

/// Second-order-perturbation-theory limit of [`cross_decay_rate`]: the
/// `i Gamma/2` line-widths are dropped from the denominators.
pub fn cross_decay_rate_second_order(p: &SubsystemParams) -> Result<f64> {
    p.validate()?;
    if p.delta_e == 0.0 || p.delta_a == 0.0 {
        return config_err("cross-decay formula needs nonzero detunings".to_string());
    }
    let diff = p.gc_a * p.gc_a * p.gamma_a / p.delta_a - p.gc_e * p.gc_e * p.gamma_e / p.delta_e;
    Ok(p.prefactor * diff * diff)
}

/// The detuning ratio `Delta_e / Delta_a = gc_e^2 Gamma_e / (gc_a^2 Gamma_a)`
/// nulling the leading-order cross-decay amplitude.
pub fn optimal_detuning_ratio(p: &SubsystemParams) -> Result<f64> {
    p.validate()?;
    let denom = p.gc_a * p.gc_a * p.gamma_a;
    if denom == 0.0 {
        return config_err(
            "optimal detuning ratio undefined: gc_a^2 Gamma_a vanishes".to_string(),
        );
    }
    Ok(p.gc_e * p.gc_e * p.gamma_e / denom)
}

/// Measure the residual cross-decay rate from the master equation: drive
/// the recycled interference subsystem with Rabi amplitudes
/// `omega_scale * sqrt(gc^2 Gamma)` per manifold (the laser couples
/// through the same dipoles), solve for the steady state, and read off
/// the circular-channel flux normalized by `(omega_scale/2)^2`, which puts
/// it on the same scale as [`cross_decay_rate`] with the same prefactor.
pub fn extracted_cross_decay_rate(p: &SubsystemParams, omega_scale: f64) -> Result<f64> {
    p.validate()?;
    if !(omega_scale > 0.0) {
        return config_err(format!("omega_scale must be positive, got {omega_scale}"));
    }
    let omega_e = omega_scale * (p.gc_e * p.gc_e * p.gamma_e).sqrt();
    let omega_a = omega_scale * (p.gc_a * p.gc_a * p.gamma_a).sqrt();
    let (model, circ) = recycled_subsystem_model(p, omega_e, omega_a)?;
    let l = build_liouvillian(&model);
    let rho_ss = steady_state(&l)?;
    let flux_op = crate::hilbert::Operator::from_matrix(
        model.space().clone(),
        circ.dagger().matrix().dot(circ.matrix()),
    )?;
    let flux = expectation(&rho_ss, &flux_op)?.re;
    Ok(p.prefactor * flux / (omega_scale / 2.0) / (omega_scale / 2.0))
}

/// Fit `A kappa^2 / ((omega - center)^2 + kappa^2) + B` to `(omegas,
/// values)` by golden-grid search over the half-width `kappa` (amplitude
/// and offset solved linearly per candidate); returns the best-fit
/// half-width. Used to read the half-width of an absorption feature whose
/// wings sit on a smooth background.
pub fn lorentzian_halfwidth_fit(
    omegas: &[f64],
    values: &[f64],
    center: f64,
    kappa_range: (f64, f64),
) -> Result<f64> {
    if omegas.len() != values.len() {
        return config_err(format!(
            "grid mismatch: {} frequencies vs {} values",
            omegas.len(),
            values.len()
        ));
    }
    if omegas.len() < 5 {
        return config_err("need at least 5 points to fit a line shape".to_string());
    }
    let (mut lo, mut hi) = kappa_range;
    if !(lo > 0.0 && hi > lo) {
        return config_err(format!(
            "half-width search range must satisfy 0 < lo < hi, got ({lo}, {hi})"
        ));
    }

    let sse_at = |kappa: f64| -> (f64, f64) {
        // least squares for (A, B) given kappa
        let mut suu = 0.0f64;
        let mut su = 0.0f64;
        let mut suv = 0.0f64;
        let mut sv = 0.0f64;
        let n = omegas.len() as f64;
        let us: Vec<f64> = omegas
            .iter()
            .map(|&w| {
                let d = w - center;
                kappa * kappa / (d * d + kappa * kappa)
            })
            .collect();
        for (u, &v) in us.iter().zip(values) {
            suu += u * u;
            su += u;
            suv += u * v;
            sv += v;
        }
        let det = suu * n - su * su;
        if det.abs() < 1e-300 {
            return (f64::INFINITY, kappa);
        }
        let a = (suv * n - su * sv) / det;
        let b = (suu * sv - su * suv) / det;
        let sse: f64 = us
            .iter()
            .zip(values)
            .map(|(u, &v)| {
                let r = a * u + b - v;
                r * r
            })
            .sum();
        (sse, kappa)
    };

    let mut best = (f64::INFINITY, lo);
    for _pass in 0..3 {
        let step = (hi - lo) / 400.0;
        for k in 0..=400 {
            let kappa = lo + step * k as f64;
            let cand = sse_at(kappa);
            if cand.0 < best.0 {
                best = cand;
            }
        }
        lo = (best.1 - 2.0 * step).max(kappa_range.0);
        hi = (best.1 + 2.0 * step).min(kappa_range.1);
    }
    if !best.0.is_finite() {
        return numerical_err("line-shape fit failed: degenerate normal equations".to_string());
    }
    Ok(best.1)
}

//! Liouvillian assembly, steady states, propagation, and eigenmode analysis.
//!
//! Density matrices are vectorized by column stacking, `v[i + d*j] = rho[i, j]`,
//! under which `vec(A X B) = (B^T kron A) vec(X)`. The generator of
//! `drho/dt = -i[H, rho] + sum_k r_k (c_k rho c_k^dag - {c_k^dag c_k, rho}/2)`
//! is then the dense d^2 x d^2 matrix
//!
//! `L = -i (I kron H - H^T kron I)
//!     + sum_k r_k (conj(c_k) kron c_k
//!                  - (I kron c_k^dag c_k + (c_k^dag c_k)^T kron I) / 2)`.
//!
//! Eigenvalues of `L` are interpreted spectroscopically: the imaginary part
//! is a line position, the negative real part a half-width. The three
//! narrowest modes of a driven model form the Mollow triplet (center near
//! zero, sidebands near +/- Omega_D).

use ndarray::{linalg::kron, Array1, Array2, ArrayView1};
use ndarray_linalg::{Eig, Solve};
use num_complex::Complex64 as C64;

use crate::error::{config_err, numerical_err, Result};
use crate::expm::{expm, one_norm};
use crate::hilbert::{DensityMatrix, HilbertSpace};
use crate::models::LindbladModel;

/// Relative threshold separating a numerically degenerate null space from
/// a unique steady state.
pub const DEGENERATE_NULL_TOL: f64 = 1e-10;
/// Residual bound for the steady state: `||L vec(rho_ss)|| <= tol * ||L||`.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;
/// Trace of `L rho` must vanish to this for every Hermitian `rho`.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-10;

/// The master-equation generator as a dense matrix on vectorized states.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

/// Column-stack a d x d matrix: `v[i + d*j] = m[i, j]`.
pub(crate) fn vec_density(m: &Array2<C64>) -> Array1<C64> {
    let d = m.nrows();
    Array1::from_shape_fn(d * d, |a| m[[a % d, a / d]])
}

/// Invert [`vec_density`].
pub(crate) fn unvec_density(v: &ArrayView1<C64>, d: usize) -> Array2<C64> {
    Array2::from_shape_fn((d, d), |(i, j)| v[i + d * j])
}

/// Vectorized identity; `trace_vector . vec(rho) = Tr(rho)` as a dot with
/// the conjugate, but since it is real it doubles as the left trace row.
pub(crate) fn trace_vector(d: usize) -> Array1<C64> {
    let mut t = Array1::zeros(d * d);
    for i in 0..d {
        t[i + d * i] = C64::new(1.0, 0.0);
    }
    t
}

impl Liouvillian {
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Apply the generator to a density-matrix-shaped operand.
    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let v = self.matrix.dot(&vec_density(rho));
        unvec_density(&v.view(), self.space.dim())
    }
}

/// Vectorize a Lindblad model into its Liouvillian matrix.
pub fn build_liouvillian(model: &LindbladModel) -> Liouvillian {
    let d = model.space().dim();
    let eye: Array2<C64> = Array2::eye(d);
    let h = model.hamiltonian().matrix();
    let minus_i = C64::new(0.0, -1.0);

    let mut l = (kron(&eye, h) - kron(&h.t().to_owned(), &eye)).mapv(|z| z * minus_i);
    for (rate, op) in model.jumps() {
        let c = op.matrix();
        let cdc = op.dagger().matrix().dot(c);
        let gain = kron(&c.mapv(|z| z.conj()), c);
        let loss = kron(&eye, &cdc) + kron(&cdc.t().to_owned(), &eye);
        l = l + (gain - loss.mapv(|z| z * 0.5)).mapv(|z| z * *rate);
    }
    Liouvillian {
        space: model.space().clone(),
        matrix: l,
    }
}

/// Unique steady state `L rho_ss = 0`, Hermitized and trace-normalized.
///
/// The null direction is found by a trace-deflated linear solve
/// `(L + vec(I/d) t^T) x = vec(I/d)` (`t` the trace row), which pins the
/// zero mode without shifting any other eigenvalue; uniqueness is checked
/// first on the full spectrum ([`DEGENERATE_NULL_TOL`]).
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let d = l.dim();
    let (evals, _) = l
        .matrix
        .eig()
        .map_err(|e| crate::error::Error::Numerical(format!("eigensolve failed: {e}")))?;
    let mut mags: Vec<f64> = evals.iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = *mags.last().unwrap();
    if scale == 0.0 {
        return numerical_err("non-unique steady state: generator vanishes".to_string());
    }
    if mags[1] < DEGENERATE_NULL_TOL * scale {
        return numerical_err(format!(
            "non-unique steady state: second eigenvalue magnitude {:.3e} below {:.0e} x scale {:.3e}",
            mags[1], DEGENERATE_NULL_TOL, scale
        ));
    }

    let t = trace_vector(d);
    let target = t.mapv(|z| z / d as f64);
    let mut deflated = l.matrix.clone();
    for a in 0..d * d {
        if target[a].norm() == 0.0 {
            continue;
        }
        for b in 0..d * d {
            deflated[[a, b]] += target[a] * t[b];
        }
    }
    let x = deflated
        .solve(&target)
        .map_err(|e| crate::error::Error::Numerical(format!("steady-state solve failed: {e}")))?;

    let raw = unvec_density(&x.view(), d);
    let mut rho = (&raw + &raw.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
    let tr: C64 = (0..d).map(|i| rho[[i, i]]).sum();
    rho = rho.mapv(|z| z / tr);

    let residual = l.matrix.dot(&vec_density(&rho));
    let res_norm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let l_norm = one_norm(&l.matrix);
    if res_norm > STEADY_RESIDUAL_TOL * l_norm {
        return numerical_err(format!(
            "steady-state residual {res_norm:.3e} exceeds {STEADY_RESIDUAL_TOL:.0e} x ||L|| = {:.3e}",
            STEADY_RESIDUAL_TOL * l_norm
        ));
    }
    DensityMatrix::new(l.space.clone(), rho)
}

/// Propagate `rho0` to each requested time via `rho(t) = exp(L t) rho0`.
/// Every output is validated as a density matrix; a breach is an
/// internal-consistency failure.
pub fn evolve(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    if rho0.space() != &l.space {
        return config_err("initial state space differs from Liouvillian space".to_string());
    }
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
    let v0 = vec_density(rho0.matrix());
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let propagator = expm(&l.matrix.mapv(|z| z * t))?;
        let v = propagator.dot(&v0);
        let rho = unvec_density(&v.view(), l.dim());
        out.push(DensityMatrix::new(l.space.clone(), rho)?);
    }
    Ok(out)
}

/// One Liouvillian eigenvalue read as a spectral line: position =
/// imaginary part, half-width = negative real part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMode {
    pub eigenvalue: C64,
    pub position: f64,
    pub halfwidth: f64,
}

impl EigenMode {
    fn from_eigenvalue(z: C64) -> Self {
        Self {
            eigenvalue: z,
            position: z.im,
            halfwidth: -z.re,
        }
    }
}

/// All d^2 eigenmodes, sorted by half-width (narrowest first).
pub fn eigenmodes(l: &Liouvillian) -> Result<Vec<EigenMode>> {
    let (evals, _) = l
        .matrix
        .eig()
        .map_err(|e| crate::error::Error::Numerical(format!("eigensolve failed: {e}")))?;
    let mut modes: Vec<EigenMode> = evals
        .iter()
        .map(|&z| EigenMode::from_eigenvalue(z))
        .collect();
    modes.sort_by(|a, b| a.halfwidth.partial_cmp(&b.halfwidth).unwrap());
    Ok(modes)
}

/// The Mollow triplet picked out of a mode list, plus the half-width of
/// the narrowest mode left over (the first line beyond the triplet).
#[derive(Debug, Clone)]
pub struct MollowTriplet {
    pub center: EigenMode,
    /// Ordered (lower, upper) by position: near -Omega_D and +Omega_D.
    pub sidebands: (EigenMode, EigenMode),
    /// Narrowest remaining half-width after removing the zero mode, the
    /// center line (with its conjugate partner), and the sidebands;
    /// `None` when nothing remains (two-level models).
    pub next_halfwidth: Option<f64>,
}

/// Identify the triplet: center = narrowest mode with `|position| < Omega_D/2`
/// (zero steady mode excluded), sidebands = narrowest modes with
/// `|position -/+ Omega_D| < Omega_D/2`.
pub fn mollow_modes(modes: &[EigenMode], omega_d: f64) -> Result<MollowTriplet> {
    if !(omega_d > 0.0) {
        return config_err(format!("mollow_modes requires Omega_D > 0, got {omega_d}"));
    }
    let scale = modes
        .iter()
        .map(|m| m.eigenvalue.norm())
        .fold(0.0f64, f64::max);
    let is_zero_mode = |m: &EigenMode| m.eigenvalue.norm() < DEGENERATE_NULL_TOL * scale;

    let narrowest_in = |window: &dyn Fn(&EigenMode) -> bool| -> Option<usize> {
        modes
            .iter()
            .enumerate()
            .filter(|(_, m)| !is_zero_mode(m) && window(m))
            .min_by(|a, b| a.1.halfwidth.partial_cmp(&b.1.halfwidth).unwrap())
            .map(|(i, _)| i)
    };

    let half = omega_d / 2.0;
    let center_idx = narrowest_in(&|m: &EigenMode| m.position.abs() < half)
        .ok_or(())
        .or_else(|_| numerical_err("triplet not resolved: no mode in the center window".to_string()))?;
    let upper_idx = narrowest_in(&|m: &EigenMode| (m.position - omega_d).abs() < half)
        .ok_or(())
        .or_else(|_| numerical_err("triplet not resolved: no mode in the upper sideband window".to_string()))?;
    let lower_idx = narrowest_in(&|m: &EigenMode| (m.position + omega_d).abs() < half)
        .ok_or(())
        .or_else(|_| numerical_err("triplet not resolved: no mode in the lower sideband window".to_string()))?;

    let center = modes[center_idx];
    let mut excluded = vec![center_idx, upper_idx, lower_idx];
    // A center line off exact zero is half of a conjugate pair; its partner
    // belongs to the same line and is excluded from "next narrowest".
    if center.position.abs() > 1e-12 * scale {
        let conj = center.eigenvalue.conj();
        if let Some((partner, _)) = modes
            .iter()
            .enumerate()
            .filter(|(i, _)| !excluded.contains(i))
            .min_by(|a, b| {
                (a.1.eigenvalue - conj)
                    .norm()
                    .partial_cmp(&(b.1.eigenvalue - conj).norm())
                    .unwrap()
            })
        {
            if (modes[partner].eigenvalue - conj).norm() <= 1e-6 * scale {
                excluded.push(partner);
            }
        }
    }
    let next_halfwidth = modes
        .iter()
        .enumerate()
        .filter(|(i, m)| !excluded.contains(i) && !is_zero_mode(m))
        .map(|(_, m)| m.halfwidth)
        .fold(None, |acc: Option<f64>, w| {
            Some(acc.map_or(w, |a| a.min(w)))
        });

    Ok(MollowTriplet {
        center,
        sidebands: (modes[lower_idx], modes[upper_idx]),
        next_halfwidth,
    })
}

//! Canned, parameterized experiments: each one reproduces a figure-level
//! result of the squeezed-bath / four-level correspondence as a data table
//! plus a summary of derived scalars.
//!
//! Six experiments are provided:
//!
//! * `steady-sweep` — steady-state Bloch vector of the driven ground doublet
//!   versus squeezing phase, for several branching ratios `g_l`; the
//!   phase contrast of `S_x` shrinks as cross decay grows.
//! * `absorption` — weak-probe absorption spectrum of the effective
//!   two-level system, with the fitted central half-width and gain minima.
//! * `fluorescence` — quadrature fluorescence spectrum of the ground-state
//!   transition at one or more squeezing phases, with eigenmode-extracted
//!   triplet widths.
//! * `eigenscan` — full four-level versus adiabatic effective-model triplet
//!   widths and positions as the drive-to-decay ratio grows; quantifies
//!   where the elimination is valid.
//! * `crossdecay` — interference suppression of cross decay versus the
//!   detuning ratio of the two excited manifolds, formula versus
//!   master-equation extraction.
//! * `bloch-demo` — anisotropic Bloch-vector decay in a squeezed bath,
//!   master equation versus Monte Carlo trajectory ensemble.
//!
//! All experiments are deterministic given their parameter record (the
//! trajectory demo carries an explicit seed), and every summary embeds the
//! exact resolved parameters, so outputs are self-describing.  Parameter
//! points within a sweep run concurrently; assembly is in sweep order, so
//! results do not depend on the thread count.

use crate::analytics::{
    bloch_decay_rates, cross_decay_rate, cross_decay_rate_second_order,
    extracted_cross_decay_rate, lorentzian_halfwidth_fit, optimal_detuning_ratio,
};
use crate::correlations::{
    absorption_spectrum, default_omega_grid, fluorescence_spectrum_four_level, Spectrum,
};
use crate::error::{config_err, Error, Result};
use crate::hilbert::{bloch_vector, DensityMatrix};
use crate::liouville::{build_liouvillian, eigenmodes, evolve, mollow_modes, steady_state};
use crate::models::{
    effective_ground_master, four_level_master, inverse_map, squeezed_bath_master, DriveParams,
    FourLevelParams, SqueezedBathParams, SubsystemParams,
};
use crate::parallel::run_indexed;
use crate::trajectories::{simulate, JumpScheme, TrajectoryConfig};
use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

/// The experiment catalog, in presentation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SteadySweep,
    Absorption,
    Fluorescence,
    Eigenscan,
    CrossDecay,
    BlochDemo,
}

impl ExperimentKind {
    pub fn all() -> [ExperimentKind; 6] {
        [
            ExperimentKind::SteadySweep,
            ExperimentKind::Absorption,
            ExperimentKind::Fluorescence,
            ExperimentKind::Eigenscan,
            ExperimentKind::CrossDecay,
            ExperimentKind::BlochDemo,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::SteadySweep => "steady-sweep",
            ExperimentKind::Absorption => "absorption",
            ExperimentKind::Fluorescence => "fluorescence",
            ExperimentKind::Eigenscan => "eigenscan",
            ExperimentKind::CrossDecay => "crossdecay",
            ExperimentKind::BlochDemo => "bloch-demo",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::all()
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or(())
            .or_else(|_| {
                config_err(format!(
                    "unknown experiment '{name}'; known experiments: {}",
                    Self::all().map(|k| k.name()).join(", ")
                ))
            })
    }

    fn describe(&self) -> &'static str {
        match self {
            ExperimentKind::SteadySweep => {
                "steady-state Bloch vector of the driven ground doublet vs squeezing phase"
            }
            ExperimentKind::Absorption => {
                "weak-probe absorption spectrum of the effective two-level system"
            }
            ExperimentKind::Fluorescence => {
                "quadrature fluorescence spectrum of the ground-state transition"
            }
            ExperimentKind::Eigenscan => {
                "full vs adiabatic triplet widths as the drive-to-decay ratio grows"
            }
            ExperimentKind::CrossDecay => {
                "cross-decay suppression vs excited-manifold detuning ratio"
            }
            ExperimentKind::BlochDemo => {
                "anisotropic Bloch decay: master equation vs trajectory ensemble"
            }
        }
    }

    fn defaults(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            ExperimentKind::SteadySweep => &[
                ("n", "2.1"),
                ("gamma_ratio", "1.9e-5"),
                ("drive.omega_d", "5.1"),
                ("g_l", "1,0.99,0.95,0.9"),
                ("phi_points", "73"),
            ],
            ExperimentKind::Absorption => &[
                ("n", "1"),
                ("gamma_ratio", "3.3333333333333335e-5"),
                ("drive.omega_d", "7.1"),
                ("g_l", "1,0.9,0.816496580927726,0.5773502691896257"),
                ("phi", "0"),
            ],
            ExperimentKind::Fluorescence => &[
                ("n", "0.2"),
                ("gamma_ratio", "7.1e-5"),
                ("drive.omega_d", "7.1"),
                ("g_l", "1"),
                ("phi", "0,3.141592653589793"),
            ],
            ExperimentKind::Eigenscan => &[
                ("n", "0.2"),
                ("drive.omega_d", "7.1"),
                ("g_l", "1"),
                ("phi", "0"),
                ("omega_ratio_min", "0.01"),
                ("omega_ratio_max", "1"),
                ("points", "25"),
            ],
            ExperimentKind::CrossDecay => &[
                ("gamma_e", "1"),
                ("gamma_a", "1.5"),
                ("gc_e", "0.816496580927726"),
                ("gc_a", "0.5773502691896257"),
                ("delta_a", "30"),
                ("prefactor", "1"),
                ("omega_scale", "0.02"),
                ("ratio_min", "0.5"),
                ("ratio_max", "2.5"),
                ("points", "41"),
            ],
            ExperimentKind::BlochDemo => &[
                ("gamma", "1"),
                ("n", "1"),
                ("phi", "0"),
                ("n_traj", "2000"),
                ("dt", "0.002"),
                ("t_max", "2"),
                ("samples", "21"),
                ("seed", "20260823"),
            ],
        }
    }
}

/// One catalog entry for display.
#[derive(Debug, Clone)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub defaults: &'static [(&'static str, &'static str)],
}

/// List all experiments with their default parameters.
pub fn catalog() -> Vec<ExperimentInfo> {
    ExperimentKind::all()
        .into_iter()
        .map(|k| ExperimentInfo {
            name: k.name(),
            description: k.describe(),
            defaults: k.defaults(),
        })
        .collect()
}

/// An experiment plus flat key=value parameter overrides.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub overrides: BTreeMap<String, String>,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            overrides: BTreeMap::new(),
        }
    }
}

/// Result table plus self-describing summary.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// CSV column names, in order.
    pub header: Vec<String>,
    /// Numeric table rows, row-major.
    pub rows: Vec<Vec<f64>>,
    /// Scalars derived from the table, the resolved parameter record, and a
    /// timestamp isolated under its own key.
    pub summary: Value,
}

/// Parameter record after defaults and overrides are merged.
struct Resolved {
    name: &'static str,
    map: BTreeMap<String, String>,
}

impl Resolved {
    fn raw(&self, key: &str) -> Result<&str> {
        self.map.get(key).map(|s| s.as_str()).ok_or(()).or_else(|_| {
            config_err(format!(
                "experiment '{}': missing key '{key}'",
                self.name
            ))
        })
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let raw = self.raw(key)?;
        let v: f64 = raw.parse().map_err(|_| {
            Error::Config(format!(
                "experiment '{}': key '{key}': cannot parse '{raw}' as a number",
                self.name
            ))
        })?;
        if !v.is_finite() {
            return config_err(format!(
                "experiment '{}': key '{key}': value '{raw}' is not finite",
                self.name
            ));
        }
        Ok(v)
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.raw(key)?;
        let mut out = Vec::new();
        for part in raw.split(',') {
            let part = part.trim();
            let v: f64 = part.parse().map_err(|_| {
                Error::Config(format!(
                    "experiment '{}': key '{key}': cannot parse '{part}' as a number",
                    self.name
                ))
            })?;
            if !v.is_finite() {
                return config_err(format!(
                    "experiment '{}': key '{key}': entry '{part}' is not finite",
                    self.name
                ));
            }
            out.push(v);
        }
        if out.is_empty() {
            return config_err(format!(
                "experiment '{}': key '{key}': empty list",
                self.name
            ));
        }
        Ok(out)
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let raw = self.raw(key)?;
        raw.parse().map_err(|_| {
            Error::Config(format!(
                "experiment '{}': key '{key}': cannot parse '{raw}' as a nonnegative integer",
                self.name
            ))
        })
    }

    fn u64(&self, key: &str) -> Result<u64> {
        let raw = self.raw(key)?;
        raw.parse().map_err(|_| {
            Error::Config(format!(
                "experiment '{}': key '{key}': cannot parse '{raw}' as a 64-bit integer",
                self.name
            ))
        })
    }
}

/// Merge defaults and overrides, rejecting unknown keys.
fn resolve(spec: &ExperimentSpec) -> Result<Resolved> {
    let name = spec.kind.name();
    let mut map: BTreeMap<String, String> = spec
        .kind
        .defaults()
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    for (k, v) in &spec.overrides {
        if !map.contains_key(k) {
            let known: Vec<&str> = spec.kind.defaults().iter().map(|(k, _)| *k).collect();
            return config_err(format!(
                "experiment '{name}': unknown key '{k}'; known keys: {}",
                known.join(", ")
            ));
        }
        map.insert(k.clone(), v.clone());
    }
    Ok(Resolved { name, map })
}

fn with_context(name: &str, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("experiment '{name}': {m}")),
        Error::Numerical(m) => Error::Numerical(format!("experiment '{name}': {m}")),
        other => other,
    }
}

/// Four-level parameters in units of the effective decay rate `gamma = 1`:
/// the bath photon number fixes the branch amplitudes (maximal squeezing),
/// `gamma_ratio = gamma/Gamma` fixes the pump strength, and the drive is
/// `omega_d` in units of `gamma`.
fn four_level_params(
    n: f64,
    gamma_ratio: f64,
    omega_d_over_gamma: f64,
    phi_l: f64,
    g_l: f64,
) -> Result<FourLevelParams> {
    if !(gamma_ratio > 0.0) {
        return config_err(format!(
            "gamma_ratio must be positive, got {gamma_ratio}"
        ));
    }
    let gamma_up = 1.0 / gamma_ratio;
    let (eps_plus, eps_minus, omega) = inverse_map(n, 1.0, gamma_up)?;
    let g_c = (1.0 - g_l * g_l).max(0.0).sqrt();
    let p = FourLevelParams {
        gamma_up,
        omega,
        eps_plus,
        eps_minus,
        phi_l,
        g_l,
        g_c,
        drive: Some(DriveParams::new(omega_d_over_gamma, 0.0)?),
    };
    p.validate()?;
    Ok(p)
}

/// Evaluate a spectrum over contiguous grid chunks on up to `threads`
/// workers; every frequency is solved by the same code path, so the merged
/// values are identical for any thread count.
fn chunked_spectrum<F>(omegas: &[f64], threads: usize, eval: F) -> Result<(Vec<f64>, C64)>
where
    F: Fn(&[f64]) -> Result<Spectrum> + Sync,
{
    let workers = threads.max(1).min(omegas.len().max(1));
    if workers <= 1 {
        let s = eval(omegas)?;
        return Ok((s.values().to_vec(), s.coherent()));
    }
    let n = omegas.len();
    let chunks = run_indexed(workers, workers, |k| {
        let lo = k * n / workers;
        let hi = (k + 1) * n / workers;
        eval(&omegas[lo..hi])
    });
    let mut values = Vec::with_capacity(n);
    let mut coherent = C64::new(0.0, 0.0);
    for (k, chunk) in chunks.into_iter().enumerate() {
        let s = chunk?;
        if k == 0 {
            coherent = s.coherent();
        }
        values.extend_from_slice(s.values());
    }
    Ok((values, coherent))
}

fn json_f64(v: f64) -> Value {
    json!(v)
}

type Table = (Vec<String>, Vec<Vec<f64>>, Map<String, Value>);

// ---------------------------------------------------------------- steady sweep

fn steady_sweep(p: &Resolved, threads: usize) -> Result<Table> {
    let n = p.f64("n")?;
    let gamma_ratio = p.f64("gamma_ratio")?;
    let omega_d = p.f64("drive.omega_d")?;
    let g_ls = p.f64_list("g_l")?;
    let phi_points = p.usize("phi_points")?;
    if phi_points < 2 {
        return config_err(format!("phi_points must be at least 2, got {phi_points}"));
    }
    // validate the parameter set once before sweeping
    four_level_params(n, gamma_ratio, omega_d, 0.0, g_ls[0])?;

    let phis: Vec<f64> = (0..phi_points)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / (phi_points - 1) as f64)
        .collect();
    let n_items = g_ls.len() * phi_points;
    let results = run_indexed(n_items, threads, |idx| -> Result<[f64; 5]> {
        let g_l = g_ls[idx / phi_points];
        let phi = phis[idx % phi_points];
        let params = four_level_params(n, gamma_ratio, omega_d, phi, g_l)?;
        let l = build_liouvillian(&effective_ground_master(&params)?);
        let rho = steady_state(&l)?;
        let (sx, sy, sz) = bloch_vector(&rho, "g-", "g+")?;
        Ok([phi, g_l, sx, sy, sz])
    });
    let mut rows = Vec::with_capacity(n_items);
    for r in results {
        rows.push(r?.to_vec());
    }

    // phase contrast of S_x per branching ratio
    let mut contrasts = Map::new();
    for (gi, g_l) in g_ls.iter().enumerate() {
        let slice = &rows[gi * phi_points..(gi + 1) * phi_points];
        let max = slice.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max);
        let min = slice.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
        contrasts.insert(format!("{g_l}"), json_f64(max - min));
    }
    let mut derived = Map::new();
    derived.insert("s_x_contrast".to_string(), Value::Object(contrasts));

    let header = ["phi", "g_l", "s_x", "s_y", "s_z"]
        .map(String::from)
        .to_vec();
    Ok((header, rows, derived))
}

// ----------------------------------------------------------------- absorption

fn absorption(p: &Resolved, threads: usize) -> Result<Table> {
    let n = p.f64("n")?;
    let gamma_ratio = p.f64("gamma_ratio")?;
    let omega_d = p.f64("drive.omega_d")?;
    let g_ls = p.f64_list("g_l")?;
    let phi = p.f64("phi")?;

    let drive = DriveParams::new(omega_d, 0.0)?;
    let grid = default_omega_grid(Some(&drive), 1.0)?;
    let mut rows = Vec::with_capacity(g_ls.len() * grid.len());
    let mut derived_per_gl = Map::new();
    for &g_l in &g_ls {
        let params = four_level_params(n, gamma_ratio, omega_d, phi, g_l)?;
        let l = build_liouvillian(&effective_ground_master(&params)?);
        let rho = steady_state(&l)?;
        let (values, _) =
            chunked_spectrum(&grid, threads, |oms| absorption_spectrum(&l, &rho, oms))?;

        // central feature: fit a Lorentzian + constant on a window of a few
        // reference half-widths around zero
        let triplet = mollow_modes(&eigenmodes(&l)?, omega_d)?;
        let kappa_ref = triplet.center.halfwidth;
        let window = 3.0 * kappa_ref;
        let (mut win_o, mut win_v) = (Vec::new(), Vec::new());
        for (o, v) in grid.iter().zip(&values) {
            if o.abs() <= window {
                win_o.push(*o);
                win_v.push(*v);
            }
        }
        let fit = lorentzian_halfwidth_fit(&win_o, &win_v, 0.0, (kappa_ref / 10.0, kappa_ref * 10.0))?;

        let mut entry = Map::new();
        let mid = (grid.len() - 1) / 2;
        entry.insert("w_at_zero".to_string(), json_f64(values[mid]));
        entry.insert(
            "w_minimum".to_string(),
            json_f64(values.iter().copied().fold(f64::INFINITY, f64::min)),
        );
        entry.insert("center_halfwidth_fit".to_string(), json_f64(fit));
        entry.insert(
            "center_halfwidth_eigen".to_string(),
            json_f64(kappa_ref),
        );
        if let Ok(bath) = SqueezedBathParams::maximal(1.0, n, phi) {
            if let Ok((center, sideband)) = crate::analytics::mollow_linewidths(&bath, phi, g_l) {
                entry.insert("center_halfwidth_formula".to_string(), json_f64(center));
                entry.insert("sideband_halfwidth_formula".to_string(), json_f64(sideband));
            }
        }
        derived_per_gl.insert(format!("{g_l}"), Value::Object(entry));

        for (o, v) in grid.iter().zip(&values) {
            rows.push(vec![g_l, *o, *v]);
        }
    }
    let mut derived = Map::new();
    derived.insert("per_g_l".to_string(), Value::Object(derived_per_gl));
    let header = ["g_l", "omega", "intensity"].map(String::from).to_vec();
    Ok((header, rows, derived))
}

// --------------------------------------------------------------- fluorescence

fn fluorescence(p: &Resolved, threads: usize) -> Result<Table> {
    let n = p.f64("n")?;
    let gamma_ratio = p.f64("gamma_ratio")?;
    let omega_d = p.f64("drive.omega_d")?;
    let g_l = p.f64("g_l")?;
    let phis = p.f64_list("phi")?;

    let drive = DriveParams::new(omega_d, 0.0)?;
    let grid = default_omega_grid(Some(&drive), 1.0)?;
    let mut rows = Vec::with_capacity(phis.len() * grid.len());
    let mut derived_per_phi = Map::new();
    let mut centers = Vec::new();
    for &phi in &phis {
        let params = four_level_params(n, gamma_ratio, omega_d, phi, g_l)?;
        let l = build_liouvillian(&effective_ground_master(&params)?);
        let rho = steady_state(&l)?;
        let (values, coherent) = chunked_spectrum(&grid, threads, |oms| {
            fluorescence_spectrum_four_level(&l, &params, &rho, oms)
        })?;

        let triplet = mollow_modes(&eigenmodes(&l)?, omega_d)?;
        let mut entry = Map::new();
        entry.insert(
            "center_halfwidth".to_string(),
            json_f64(triplet.center.halfwidth),
        );
        entry.insert(
            "center_position".to_string(),
            json_f64(triplet.center.position),
        );
        entry.insert(
            "sideband_halfwidth".to_string(),
            json_f64(triplet.sidebands.1.halfwidth),
        );
        entry.insert(
            "sideband_position".to_string(),
            json_f64(triplet.sidebands.1.position),
        );
        entry.insert("coherent_weight".to_string(), json_f64(coherent.re));
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        entry.insert("intensity_max".to_string(), json_f64(peak));
        entry.insert("intensity_min".to_string(), json_f64(min));
        derived_per_phi.insert(format!("{phi}"), Value::Object(entry));
        centers.push(triplet.center.halfwidth);

        for (o, v) in grid.iter().zip(&values) {
            rows.push(vec![phi, *o, *v]);
        }
    }
    let mut derived = Map::new();
    derived.insert("per_phi".to_string(), Value::Object(derived_per_phi));
    if phis.len() >= 2 {
        derived.insert(
            "first_phase_center_narrower".to_string(),
            Value::Bool(centers[0] < centers[centers.len() - 1]),
        );
    }
    let header = ["phi", "omega", "intensity"].map(String::from).to_vec();
    Ok((header, rows, derived))
}

// ------------------------------------------------------------------ eigenscan

/// Triplet widths and positions at one drive-to-decay ratio, from the full
/// four-level model and from the adiabatic effective model, in units of the
/// pump rate `Gamma = 1`.
#[derive(Debug, Clone, Copy)]
pub struct EigenscanRow {
    pub omega_over_gamma_up: f64,
    /// Effective decay rate `gamma` implied by the pump, in `Gamma` units.
    pub gamma: f64,
    pub full_center_halfwidth: f64,
    pub adiabatic_center_halfwidth: f64,
    pub full_sideband_halfwidth: f64,
    pub adiabatic_sideband_halfwidth: f64,
    pub full_sideband_position: f64,
    pub adiabatic_sideband_position: f64,
}

/// One point of the adiabatic-validity scan: hold the bath photon number
/// and `Omega_D/gamma` fixed, set `Omega = x Gamma`, and read the Mollow
/// triplet from both generators.
pub fn eigenscan_point(
    n: f64,
    omega_d_over_gamma: f64,
    phi_l: f64,
    g_l: f64,
    omega_ratio: f64,
) -> Result<EigenscanRow> {
    if !(omega_ratio > 0.0) {
        return config_err(format!(
            "omega_ratio must be positive, got {omega_ratio}"
        ));
    }
    // gamma = (eps_plus^2 - eps_minus^2) Omega^2 / Gamma with maximal
    // squeezing at photon number n; Gamma = 1 sets the units.
    let gamma = omega_ratio * omega_ratio / (2.0 * n + 1.0);
    let (eps_plus, eps_minus, omega) = inverse_map(n, gamma, 1.0)?;
    let omega_d = omega_d_over_gamma * gamma;
    let g_c = (1.0 - g_l * g_l).max(0.0).sqrt();
    let params = FourLevelParams {
        gamma_up: 1.0,
        omega,
        eps_plus,
        eps_minus,
        phi_l,
        g_l,
        g_c,
        drive: Some(DriveParams::new(omega_d, 0.0)?),
    };
    params.validate()?;

    let full = mollow_modes(
        &eigenmodes(&build_liouvillian(&four_level_master(&params)?))?,
        omega_d,
    )?;
    let adiabatic = mollow_modes(
        &eigenmodes(&build_liouvillian(&effective_ground_master(&params)?))?,
        omega_d,
    )?;
    Ok(EigenscanRow {
        omega_over_gamma_up: omega_ratio,
        gamma,
        full_center_halfwidth: full.center.halfwidth,
        adiabatic_center_halfwidth: adiabatic.center.halfwidth,
        full_sideband_halfwidth: full.sidebands.1.halfwidth,
        adiabatic_sideband_halfwidth: adiabatic.sidebands.1.halfwidth,
        full_sideband_position: full.sidebands.1.position,
        adiabatic_sideband_position: adiabatic.sidebands.1.position,
    })
}

fn eigenscan(p: &Resolved, threads: usize) -> Result<Table> {
    let n = p.f64("n")?;
    let omega_d = p.f64("drive.omega_d")?;
    let g_l = p.f64("g_l")?;
    let phi = p.f64("phi")?;
    let x_min = p.f64("omega_ratio_min")?;
    let x_max = p.f64("omega_ratio_max")?;
    let points = p.usize("points")?;
    if !(x_min > 0.0 && x_max > x_min) {
        return config_err(format!(
            "omega_ratio range must satisfy 0 < min < max, got ({x_min}, {x_max})"
        ));
    }
    if points < 2 {
        return config_err(format!("points must be at least 2, got {points}"));
    }

    let (lg_min, lg_max) = (x_min.log10(), x_max.log10());
    let xs: Vec<f64> = (0..points)
        .map(|i| 10f64.powf(lg_min + (lg_max - lg_min) * i as f64 / (points - 1) as f64))
        .collect();
    let results = run_indexed(points, threads, |i| {
        eigenscan_point(n, omega_d, phi, g_l, xs[i])
    });
    let mut rows = Vec::with_capacity(points);
    let mut scan = Vec::with_capacity(points);
    for r in results {
        let row = r?;
        rows.push(vec![
            row.omega_over_gamma_up,
            row.gamma,
            row.full_center_halfwidth,
            row.adiabatic_center_halfwidth,
            row.full_sideband_halfwidth,
            row.adiabatic_sideband_halfwidth,
            row.full_sideband_position,
            row.adiabatic_sideband_position,
        ]);
        scan.push(row);
    }

    // agreement at the grid point nearest the validity edge x = 0.05, and
    // the narrowing seen from x = 0.5 upward
    let mut derived = Map::new();
    if let Some(row) = scan.iter().min_by(|a, b| {
        (a.omega_over_gamma_up - 0.05)
            .abs()
            .partial_cmp(&(b.omega_over_gamma_up - 0.05).abs())
            .unwrap()
    }) {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        let width_dev = rel(row.full_center_halfwidth, row.adiabatic_center_halfwidth)
            .max(rel(row.full_sideband_halfwidth, row.adiabatic_sideband_halfwidth));
        let mut near = Map::new();
        near.insert(
            "omega_ratio".to_string(),
            json_f64(row.omega_over_gamma_up),
        );
        near.insert("max_width_deviation".to_string(), json_f64(width_dev));
        near.insert(
            "position_deviation".to_string(),
            json_f64(
                (row.full_sideband_position - row.adiabatic_sideband_position).abs()
                    / row.adiabatic_sideband_position.abs(),
            ),
        );
        derived.insert("near_validity_edge".to_string(), Value::Object(near));
    }
    let all_narrower = scan
        .iter()
        .filter(|r| r.omega_over_gamma_up >= 0.5 * (1.0 - 1e-9))
        .all(|r| {
            r.full_center_halfwidth < r.adiabatic_center_halfwidth
                && r.full_sideband_halfwidth < r.adiabatic_sideband_halfwidth
        });
    derived.insert(
        "narrower_beyond_half".to_string(),
        Value::Bool(all_narrower),
    );

    let header = [
        "omega_over_gamma_up",
        "gamma",
        "center_halfwidth_full",
        "center_halfwidth_adiabatic",
        "sideband_halfwidth_full",
        "sideband_halfwidth_adiabatic",
        "sideband_position_full",
        "sideband_position_adiabatic",
    ]
    .map(String::from)
    .to_vec();
    Ok((header, rows, derived))
}

// ----------------------------------------------------------------- crossdecay

fn crossdecay(p: &Resolved, threads: usize) -> Result<Table> {
    let gamma_e = p.f64("gamma_e")?;
    let gamma_a = p.f64("gamma_a")?;
    let gc_e = p.f64("gc_e")?;
    let gc_a = p.f64("gc_a")?;
    let delta_a = p.f64("delta_a")?;
    let prefactor = p.f64("prefactor")?;
    let omega_scale = p.f64("omega_scale")?;
    let r_min = p.f64("ratio_min")?;
    let r_max = p.f64("ratio_max")?;
    let points = p.usize("points")?;
    if !(r_min > 0.0 && r_max > r_min) {
        return config_err(format!(
            "ratio range must satisfy 0 < min < max, got ({r_min}, {r_max})"
        ));
    }
    if points < 2 {
        return config_err(format!("points must be at least 2, got {points}"));
    }

    let at_ratio = |ratio: f64| -> Result<[f64; 5]> {
        let params = SubsystemParams {
            gamma_e,
            gamma_a,
            delta_e: ratio * delta_a,
            delta_a,
            gc_e,
            gc_a,
            prefactor,
        };
        params.validate()?;
        Ok([
            ratio,
            params.delta_e,
            cross_decay_rate(&params)?,
            cross_decay_rate_second_order(&params)?,
            extracted_cross_decay_rate(&params, omega_scale)?,
        ])
    };

    let ratios: Vec<f64> = (0..points)
        .map(|i| r_min + (r_max - r_min) * i as f64 / (points - 1) as f64)
        .collect();
    let results = run_indexed(points, threads, |i| at_ratio(ratios[i]));
    let mut rows = Vec::with_capacity(points);
    for r in results {
        rows.push(r?.to_vec());
    }

    // suppression relative to the equal-detuning baseline, evaluated at the
    // exact optimum (not a grid point)
    let base = SubsystemParams {
        gamma_e,
        gamma_a,
        delta_e: delta_a,
        delta_a,
        gc_e,
        gc_a,
        prefactor,
    };
    let optimal_ratio = optimal_detuning_ratio(&base)?;
    let baseline = at_ratio(1.0)?;
    let optimal = at_ratio(optimal_ratio)?;
    let mut derived = Map::new();
    derived.insert("optimal_ratio".to_string(), json_f64(optimal_ratio));
    let scan_min = rows
        .iter()
        .min_by(|a, b| a[2].partial_cmp(&b[2]).unwrap())
        .map(|r| r[0])
        .unwrap_or(f64::NAN);
    derived.insert("scan_minimum_ratio".to_string(), json_f64(scan_min));
    if optimal[2] > 0.0 {
        derived.insert(
            "suppression_formula".to_string(),
            json_f64(baseline[2] / optimal[2]),
        );
    }
    if optimal[4] > 0.0 {
        derived.insert(
            "suppression_extracted".to_string(),
            json_f64(baseline[4] / optimal[4]),
        );
    }
    let _ = threads; // sweep already parallel above

    let header = [
        "detuning_ratio",
        "delta_e",
        "rate_formula",
        "rate_second_order",
        "rate_extracted",
    ]
    .map(String::from)
    .to_vec();
    Ok((header, rows, derived))
}

// ----------------------------------------------------------------- bloch demo

fn bloch_demo(p: &Resolved, threads: usize) -> Result<Table> {
    let gamma = p.f64("gamma")?;
    let n = p.f64("n")?;
    let phi = p.f64("phi")?;
    let n_traj = p.usize("n_traj")?;
    let dt = p.f64("dt")?;
    let t_max = p.f64("t_max")?;
    let samples = p.usize("samples")?;
    let seed = p.u64("seed")?;
    if samples < 2 {
        return config_err(format!("samples must be at least 2, got {samples}"));
    }

    let bath = SqueezedBathParams::maximal(gamma, n, phi)?;
    let model = squeezed_bath_master(&bath, None)?;
    let l = build_liouvillian(&model);

    // initial state with S_x = S_y = S_z = 1/sqrt(3): every decay rate is
    // visible in one run
    let a = 1.0 / 3f64.sqrt();
    let c = ((1.0 - a) / 2.0).sqrt();
    let s = ((1.0 + a) / 2.0).sqrt();
    let psi0 = Array1::from_vec(vec![
        C64::new(c, 0.0),
        C64::from_polar(s, std::f64::consts::FRAC_PI_4),
    ]);

    let times: Vec<f64> = (0..samples)
        .map(|i| t_max * i as f64 / (samples - 1) as f64)
        .collect();
    let rho0 = DensityMatrix::from_pure(model.space().clone(), &psi0)?;
    let exact = evolve(&l, &rho0, &times)?;

    let cfg = TrajectoryConfig {
        n_traj,
        dt,
        t_max,
        seed,
        scheme: JumpScheme::FirstOrder,
    };
    let result = simulate(&model, &psi0, &cfg, &times, threads)?;
    let sampled = result.bloch_series("g", "e")?;

    let mut rows = Vec::with_capacity(samples);
    let mut max_dev_se = 0.0f64;
    let mut within = true;
    for (k, t) in times.iter().enumerate() {
        let truth = bloch_vector(&exact[k], "g", "e")?;
        let s = &sampled[k];
        rows.push(vec![
            *t,
            truth.0,
            s.mean.0,
            s.std_error.0,
            truth.1,
            s.mean.1,
            s.std_error.1,
            truth.2,
            s.mean.2,
            s.std_error.2,
        ]);
        for (mean, se, want) in [
            (s.mean.0, s.std_error.0, truth.0),
            (s.mean.1, s.std_error.1, truth.1),
            (s.mean.2, s.std_error.2, truth.2),
        ] {
            let dev = (mean - want).abs();
            if se > 1e-12 {
                max_dev_se = max_dev_se.max(dev / se);
            }
            if dev > 3.0 * se + 1e-9 {
                within = false;
            }
        }
    }

    let (gx, gy, gz) = bloch_decay_rates(&bath)?;
    let mut derived = Map::new();
    derived.insert("gamma_x".to_string(), json_f64(gx));
    derived.insert("gamma_y".to_string(), json_f64(gy));
    derived.insert("gamma_z".to_string(), json_f64(gz));
    derived.insert("within_three_stderr".to_string(), Value::Bool(within));
    derived.insert(
        "max_deviation_in_stderr_units".to_string(),
        json_f64(max_dev_se),
    );

    let header = [
        "time",
        "s_x_exact",
        "s_x_mean",
        "s_x_stderr",
        "s_y_exact",
        "s_y_mean",
        "s_y_stderr",
        "s_z_exact",
        "s_z_mean",
        "s_z_stderr",
    ]
    .map(String::from)
    .to_vec();
    Ok((header, rows, derived))
}

// -------------------------------------------------------------------- drivers

/// Check a spec's parameters against all module invariants without running
/// the sweep.
pub fn validate(spec: &ExperimentSpec) -> Result<()> {
    let p = resolve(spec)?;
    let out = match spec.kind {
        ExperimentKind::SteadySweep => {
            let n = p.f64("n")?;
            let gr = p.f64("gamma_ratio")?;
            let od = p.f64("drive.omega_d")?;
            let pts = p.usize("phi_points")?;
            if pts < 2 {
                return Err(with_context(
                    p.name,
                    Error::Config(format!("phi_points must be at least 2, got {pts}")),
                ));
            }
            for g_l in p.f64_list("g_l")? {
                four_level_params(n, gr, od, 0.0, g_l)?;
            }
            Ok(())
        }
        ExperimentKind::Absorption => {
            let n = p.f64("n")?;
            let gr = p.f64("gamma_ratio")?;
            let od = p.f64("drive.omega_d")?;
            let phi = p.f64("phi")?;
            for g_l in p.f64_list("g_l")? {
                four_level_params(n, gr, od, phi, g_l)?;
            }
            Ok(())
        }
        ExperimentKind::Fluorescence => {
            let n = p.f64("n")?;
            let gr = p.f64("gamma_ratio")?;
            let od = p.f64("drive.omega_d")?;
            let g_l = p.f64("g_l")?;
            for phi in p.f64_list("phi")? {
                four_level_params(n, gr, od, phi, g_l)?;
            }
            Ok(())
        }
        ExperimentKind::Eigenscan => {
            let n = p.f64("n")?;
            let od = p.f64("drive.omega_d")?;
            let g_l = p.f64("g_l")?;
            let phi = p.f64("phi")?;
            let x_min = p.f64("omega_ratio_min")?;
            let x_max = p.f64("omega_ratio_max")?;
            let pts = p.usize("points")?;
            if !(x_min > 0.0 && x_max > x_min) {
                return Err(with_context(
                    p.name,
                    Error::Config(format!(
                        "omega_ratio range must satisfy 0 < min < max, got ({x_min}, {x_max})"
                    )),
                ));
            }
            if pts < 2 {
                return Err(with_context(
                    p.name,
                    Error::Config(format!("points must be at least 2, got {pts}")),
                ));
            }
            // constructing the endpoint parameter sets exercises the model
            // invariants without any eigensolve
            let gamma = x_min * x_min / (2.0 * n + 1.0);
            let (ep, em, om) = inverse_map(n, gamma, 1.0)?;
            FourLevelParams {
                gamma_up: 1.0,
                omega: om,
                eps_plus: ep,
                eps_minus: em,
                phi_l: phi,
                g_l,
                g_c: (1.0 - g_l * g_l).max(0.0).sqrt(),
                drive: Some(DriveParams::new(od * gamma, 0.0)?),
            }
            .validate()?;
            Ok(())
        }
        ExperimentKind::CrossDecay => {
            let r_min = p.f64("ratio_min")?;
            let r_max = p.f64("ratio_max")?;
            let pts = p.usize("points")?;
            if !(r_min > 0.0 && r_max > r_min) {
                return Err(with_context(
                    p.name,
                    Error::Config(format!(
                        "ratio range must satisfy 0 < min < max, got ({r_min}, {r_max})"
                    )),
                ));
            }
            if pts < 2 {
                return Err(with_context(
                    p.name,
                    Error::Config(format!("points must be at least 2, got {pts}")),
                ));
            }
            if !(p.f64("omega_scale")? > 0.0) {
                return Err(with_context(
                    p.name,
                    Error::Config("omega_scale must be positive".to_string()),
                ));
            }
            for ratio in [r_min, r_max] {
                SubsystemParams {
                    gamma_e: p.f64("gamma_e")?,
                    gamma_a: p.f64("gamma_a")?,
                    delta_e: ratio * p.f64("delta_a")?,
                    delta_a: p.f64("delta_a")?,
                    gc_e: p.f64("gc_e")?,
                    gc_a: p.f64("gc_a")?,
                    prefactor: p.f64("prefactor")?,
                }
                .validate()?;
            }
            Ok(())
        }
        ExperimentKind::BlochDemo => {
            let bath = SqueezedBathParams::maximal(p.f64("gamma")?, p.f64("n")?, p.f64("phi")?)?;
            let model = squeezed_bath_master(&bath, None)?;
            let cfg = TrajectoryConfig {
                n_traj: p.usize("n_traj")?,
                dt: p.f64("dt")?,
                t_max: p.f64("t_max")?,
                seed: p.u64("seed")?,
                scheme: JumpScheme::FirstOrder,
            };
            cfg.validate(&model)?;
            if p.usize("samples")? < 2 {
                return Err(with_context(
                    p.name,
                    Error::Config("samples must be at least 2".to_string()),
                ));
            }
            Ok(())
        }
    };
    out.map_err(|e| with_context(spec.kind.name(), e))
}

/// Run an experiment on up to `threads` workers.
pub fn run(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentOutput> {
    let p = resolve(spec)?;
    let name = spec.kind.name();
    let (header, rows, derived) = match spec.kind {
        ExperimentKind::SteadySweep => steady_sweep(&p, threads),
        ExperimentKind::Absorption => absorption(&p, threads),
        ExperimentKind::Fluorescence => fluorescence(&p, threads),
        ExperimentKind::Eigenscan => eigenscan(&p, threads),
        ExperimentKind::CrossDecay => crossdecay(&p, threads),
        ExperimentKind::BlochDemo => bloch_demo(&p, threads),
    }
    .map_err(|e| with_context(name, e))?;

    let spec_echo: Map<String, Value> = p
        .map
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_else(|_| "0".to_string());
    let summary = json!({
        "experiment": name,
        "spec": Value::Object(spec_echo),
        "derived": Value::Object(derived),
        "timestamp_unix_seconds": timestamp,
    });
    Ok(ExperimentOutput {
        header,
        rows,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_with(kind: ExperimentKind, pairs: &[(&str, &str)]) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(kind);
        for (k, v) in pairs {
            spec.overrides.insert(k.to_string(), v.to_string());
        }
        spec
    }

    #[test]
    fn catalog_has_six_validating_defaults() {
        let cat = catalog();
        assert_eq!(cat.len(), 6);
        for info in &cat {
            let kind = ExperimentKind::from_name(info.name).unwrap();
            validate(&ExperimentSpec::new(kind)).unwrap();
        }
    }

    #[test]
    fn unknown_keys_and_bad_numbers_are_rejected() {
        let err = validate(&spec_with(
            ExperimentKind::SteadySweep,
            &[("bogus", "1")],
        ))
        .unwrap_err();
        assert!(err.to_string().contains("bogus"), "got: {err}");
        let err = validate(&spec_with(ExperimentKind::SteadySweep, &[("n", "abc")])).unwrap_err();
        assert!(
            err.to_string().contains("abc") && err.to_string().contains("n"),
            "got: {err}"
        );
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn steady_sweep_contrast_shrinks_with_cross_decay() {
        let spec = spec_with(
            ExperimentKind::SteadySweep,
            &[("phi_points", "13"), ("g_l", "1,0.9")],
        );
        let out = run(&spec, 2).unwrap();
        assert_eq!(out.rows.len(), 26);
        let contrasts = &out.summary["derived"]["s_x_contrast"];
        let c1 = contrasts["1"].as_f64().unwrap();
        let c09 = contrasts["0.9"].as_f64().unwrap();
        assert!(c1 > 0.1, "ideal contrast too small: {c1}");
        assert!(c1 > c09, "contrast must shrink: {c1} vs {c09}");
    }

    #[test]
    fn eigenscan_point_agrees_deep_in_validity_range() {
        let row = eigenscan_point(0.2, 7.1, 0.0, 1.0, 0.01).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(row.full_center_halfwidth, row.adiabatic_center_halfwidth) < 0.01);
        assert!(rel(row.full_sideband_halfwidth, row.adiabatic_sideband_halfwidth) < 0.01);
        assert!(
            rel(row.full_sideband_position, row.adiabatic_sideband_position) < 0.01
        );
    }

    #[test]
    fn crossdecay_scan_finds_the_optimum() {
        let spec = spec_with(ExperimentKind::CrossDecay, &[("points", "21")]);
        let out = run(&spec, 2).unwrap();
        let derived = &out.summary["derived"];
        // gc_e^2 Gamma_e / (gc_a^2 Gamma_a) = (2/3)/(1/3 * 1.5) = 4/3
        let optimal = derived["optimal_ratio"].as_f64().unwrap();
        assert!((optimal - 4.0 / 3.0).abs() < 1e-12);
        let scan_min = derived["scan_minimum_ratio"].as_f64().unwrap();
        assert!((scan_min - optimal).abs() <= 0.1, "grid min {scan_min}");
        let supp = derived["suppression_formula"].as_f64().unwrap();
        assert!(supp > 10.0, "suppression at the optimum: {supp}");
    }

    #[test]
    fn fluorescence_center_narrower_at_phase_zero() {
        let out = run(&ExperimentSpec::new(ExperimentKind::Fluorescence), 2).unwrap();
        assert!(out.summary["derived"]["first_phase_center_narrower"]
            .as_bool()
            .unwrap());
        let per_phi = &out.summary["derived"]["per_phi"];
        let c0 = per_phi["0"]["center_halfwidth"].as_f64().unwrap();
        // center half-width at phi = 0: gamma (N + 1/2 - M) with N = 0.2
        let expect = 0.7 - 0.24f64.sqrt();
        assert!((c0 - expect).abs() < 1e-6 * expect.max(1.0), "center {c0}");
        // spectra are nonnegative after coherent subtraction
        for key in ["0", "3.141592653589793"] {
            let min = per_phi[key]["intensity_min"].as_f64().unwrap();
            let max = per_phi[key]["intensity_max"].as_f64().unwrap();
            assert!(min >= -1e-8 * max, "phi={key}: min {min} vs max {max}");
        }
    }

    #[test]
    fn absorption_defaults_show_gain_and_positive_center() {
        let out = run(&ExperimentSpec::new(ExperimentKind::Absorption), 2).unwrap();
        let ideal = &out.summary["derived"]["per_g_l"]["1"];
        assert!(ideal["w_at_zero"].as_f64().unwrap() > 0.0);
        assert!(ideal["w_minimum"].as_f64().unwrap() < 0.0, "gain region");
        let fit = ideal["center_halfwidth_fit"].as_f64().unwrap();
        let formula = ideal["center_halfwidth_formula"].as_f64().unwrap();
        assert!(
            (fit - formula).abs() / formula < 0.02,
            "fit {fit} vs formula {formula}"
        );
    }

    #[test]
    fn bloch_demo_stays_within_three_stderr() {
        let spec = spec_with(
            ExperimentKind::BlochDemo,
            &[("n_traj", "400"), ("samples", "6")],
        );
        let out = run(&spec, 2).unwrap();
        assert_eq!(out.rows.len(), 6);
        assert!(out.summary["derived"]["within_three_stderr"]
            .as_bool()
            .unwrap());
    }

    #[test]
    fn reruns_are_identical_except_timestamp() {
        let spec = spec_with(
            ExperimentKind::SteadySweep,
            &[("phi_points", "7"), ("g_l", "1")],
        );
        let a = run(&spec, 1).unwrap();
        let b = run(&spec, 3).unwrap();
        assert_eq!(a.rows, b.rows);
        let strip = |v: &Value| {
            let mut v = v.clone();
            v.as_object_mut().unwrap().remove("timestamp_unix_seconds");
            v
        };
        assert_eq!(strip(&a.summary), strip(&b.summary));
    }

    #[test]
    fn seed_changes_the_trajectory_demo() {
        let base = spec_with(
            ExperimentKind::BlochDemo,
            &[("n_traj", "50"), ("samples", "3")],
        );
        let other = spec_with(
            ExperimentKind::BlochDemo,
            &[("n_traj", "50"), ("samples", "3"), ("seed", "7")],
        );
        let a = run(&base, 1).unwrap();
        let b = run(&other, 1).unwrap();
        assert_ne!(a.rows, b.rows);
    }
}

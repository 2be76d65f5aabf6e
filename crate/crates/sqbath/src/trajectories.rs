//! Monte Carlo wave-function (quantum-jump) unraveling of a Lindblad model.
//!
//! Each trajectory evolves a pure state with first-order jump/no-jump
//! stepping on a fixed grid: in a step of length `dt` a jump through channel
//! `k` fires with probability `p_k = r_k |c_k psi|^2 dt` (at most one per
//! step, replacing the step), otherwise the state advances by the exact
//! no-jump propagator `exp((-iH - 1/2 sum_k r_k c_k^dag c_k) dt)` and is
//! renormalized.  The scheme's bias is controlled by the step invariant
//! `dt * (sum_k r_k lambda_max(c_k^dag c_k)) <= 0.01`.
//!
//! The ensemble average of the pure-state projectors converges to the
//! master-equation solution at the Monte Carlo rate `O(n_traj^{-1/2})`; this
//! module exists as an independent statistical cross-check of the
//! deterministic solvers, not as a performance component.
//!
//! Reproducibility: trajectory `n` draws from a counter-based generator
//! seeded with the run seed and moved to stream `n`, so results are
//! bit-identical for a given `(seed, n_traj, dt)` regardless of thread
//! count, and a shorter run is a prefix of a longer one with the same seed
//! (common random numbers for convergence studies).

use crate::error::{config_err, numerical_err, Result};
use crate::expm::expm;
use crate::hilbert::DensityMatrix;
use crate::models::LindbladModel;
use crate::parallel::run_indexed;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Bound on `dt * (total jump rate scale)` for the first-order scheme.
pub const STEP_RATE_BOUND: f64 = 0.01;

/// Sample times must sit on the step grid within this fraction of a step.
const SAMPLE_ALIGNMENT_TOL: f64 = 1e-6;

/// Below this norm the no-jump branch can no longer be resolved.
const NORM_FLOOR: f64 = 1e-150;

/// Stepping scheme; only first-order jump/no-jump is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JumpScheme {
    #[default]
    FirstOrder,
}

/// Ensemble size, step, horizon, and seed of a trajectory run.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryConfig {
    pub n_traj: usize,
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    pub scheme: JumpScheme,
}

impl TrajectoryConfig {
    /// Check counts, horizon, and the step bound against the model's rates.
    pub fn validate(&self, model: &LindbladModel) -> Result<()> {
        if self.n_traj < 1 {
            return config_err(format!("n_traj must be at least 1, got {}", self.n_traj));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return config_err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max >= self.dt) || !self.t_max.is_finite() {
            return config_err(format!(
                "t_max must be at least one step, got t_max = {} with dt = {}",
                self.t_max, self.dt
            ));
        }
        let scale = jump_rate_scale(model)?;
        if self.dt * scale > STEP_RATE_BOUND {
            return config_err(format!(
                "dt = {} too coarse: dt * jump-rate scale = {:.3e} exceeds {STEP_RATE_BOUND}",
                self.dt,
                self.dt * scale
            ));
        }
        Ok(())
    }
}

/// `sum_k r_k lambda_max(c_k^dag c_k)`: the fastest total jump rate any
/// state can see, which bounds the per-step jump probability.
fn jump_rate_scale(model: &LindbladModel) -> Result<f64> {
    let mut scale = 0.0;
    for (rate, op) in model.jumps() {
        let cdc = op.dagger().matrix().dot(op.matrix());
        let evals = cdc
            .eigh(UPLO::Upper)
            .map_err(|e| crate::error::Error::Numerical(format!("rate-scale eigensolve failed: {e}")))?
            .0;
        let top = evals.iter().fold(0.0f64, |m, v| m.max(*v));
        scale += rate * top;
    }
    Ok(scale)
}

/// Ensemble averages and their statistical errors on the sample grid.
#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    sample_times: Vec<f64>,
    means: Vec<DensityMatrix>,
    std_errors: Vec<Array2<C64>>,
}

/// Bloch vector of a two-level ensemble at one sample time, with the
/// standard error of each component.
#[derive(Debug, Clone, Copy)]
pub struct BlochSample {
    pub time: f64,
    pub mean: (f64, f64, f64),
    pub std_error: (f64, f64, f64),
}

impl TrajectoryResult {
    pub fn sample_times(&self) -> &[f64] {
        &self.sample_times
    }

    /// Ensemble-averaged density matrix per sample time.
    pub fn means(&self) -> &[DensityMatrix] {
        &self.means
    }

    /// Entrywise standard errors: real part holds the standard error of the
    /// entry's real part, imaginary part that of its imaginary part.  All
    /// zero when `n_traj = 1` (no variance estimate from one trajectory).
    pub fn std_errors(&self) -> &[Array2<C64>] {
        &self.std_errors
    }

    /// Bloch components and exact standard errors for a two-level ensemble.
    ///
    /// For normalized pure states the components are linear in single
    /// matrix entries (`S_x = 2 Re rho[u,l]`, `S_y = 2 Im rho[u,l]`,
    /// `S_z = 2 rho[u,u] - 1`), so entry errors convert exactly.
    pub fn bloch_series(&self, lower: &str, upper: &str) -> Result<Vec<BlochSample>> {
        let space = self.means[0].space();
        if space.dim() != 2 {
            return config_err(format!(
                "Bloch readout needs a two-level ensemble, got dimension {}",
                space.dim()
            ));
        }
        let lo = space.index(lower)?;
        let up = space.index(upper)?;
        let mut out = Vec::with_capacity(self.sample_times.len());
        for (k, t) in self.sample_times.iter().enumerate() {
            let mean = crate::hilbert::bloch_vector(&self.means[k], lower, upper)?;
            let se = &self.std_errors[k];
            let err = (
                2.0 * se[[up, lo]].re,
                2.0 * se[[up, lo]].im,
                2.0 * se[[up, up]].re,
            );
            out.push(BlochSample {
                time: *t,
                mean,
                std_error: err,
            });
        }
        Ok(out)
    }
}

/// Map sample times onto step indices, requiring grid alignment.
fn sample_steps(sample_times: &[f64], dt: f64, t_max: f64) -> Result<Vec<usize>> {
    if sample_times.is_empty() {
        return config_err("no sample times given".to_string());
    }
    let mut steps = Vec::with_capacity(sample_times.len());
    let mut last: Option<usize> = None;
    for &t in sample_times {
        if !(t >= 0.0) || !t.is_finite() {
            return config_err(format!("sample time must be nonnegative, got {t}"));
        }
        if t > t_max + 0.5 * dt {
            return config_err(format!("sample time {t} exceeds t_max = {t_max}"));
        }
        let frac = t / dt;
        let k = frac.round();
        if (frac - k).abs() > SAMPLE_ALIGNMENT_TOL {
            return config_err(format!(
                "sample time {t} is off the step grid (dt = {dt}); nearest step is {k}"
            ));
        }
        let k = k as usize;
        if let Some(prev) = last {
            if k <= prev {
                return config_err(format!(
                    "sample times must increase strictly on the step grid; step {k} after {prev}"
                ));
            }
        }
        last = Some(k);
        steps.push(k);
    }
    Ok(steps)
}

/// One trajectory: returns the pure-state projector at each sample step.
fn run_one(
    traj_index: usize,
    seed: u64,
    psi0: &Array1<C64>,
    no_jump_prop: &Array2<C64>,
    jumps: &[(f64, Array2<C64>)],
    steps: &[usize],
    dt: f64,
) -> Result<Vec<Array2<C64>>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(traj_index as u64);

    let d = psi0.len();
    let mut psi = psi0.clone();
    let mut snapshots = Vec::with_capacity(steps.len());
    let mut next = 0usize;
    let last_step = *steps.last().expect("validated nonempty");

    for step in 0..=last_step {
        if next < steps.len() && steps[next] == step {
            snapshots.push(Array2::from_shape_fn((d, d), |(i, j)| {
                psi[i] * psi[j].conj()
            }));
            next += 1;
        }
        if step == last_step {
            break;
        }

        // one uniform decides both whether a jump fires and which channel
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        let mut jumped = false;
        for (rate, c) in jumps {
            let cpsi = c.dot(&psi);
            let weight = rate * cpsi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dt;
            cum += weight;
            if u < cum {
                let norm = cpsi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm < NORM_FLOOR {
                    return numerical_err(format!(
                        "jump into a dark state: channel norm {norm:.3e} at step {step}"
                    ));
                }
                psi = cpsi.mapv(|z| z / norm);
                jumped = true;
                break;
            }
        }
        if !jumped {
            let evolved = no_jump_prop.dot(&psi);
            let norm = evolved.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < NORM_FLOOR {
                return numerical_err(format!(
                    "norm underflow in no-jump branch at step {step}: dt cannot resolve jumps"
                ));
            }
            psi = evolved.mapv(|z| z / norm);
        }
    }
    Ok(snapshots)
}

/// Evolve an ensemble of quantum trajectories and average the projectors.
///
/// `psi0` must be normalized on the model's space; `sample_times` must lie
/// on the step grid.  Trajectories run concurrently on up to `threads`
/// workers; the reduction is done in trajectory order, so the result does
/// not depend on the thread count.
pub fn simulate(
    model: &LindbladModel,
    psi0: &Array1<C64>,
    cfg: &TrajectoryConfig,
    sample_times: &[f64],
    threads: usize,
) -> Result<TrajectoryResult> {
    cfg.validate(model)?;
    let d = model.space().dim();
    if psi0.len() != d {
        return config_err(format!(
            "initial state has {} amplitudes on a dimension-{d} space",
            psi0.len()
        ));
    }
    let norm = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return config_err(format!("initial state norm {norm} is not 1"));
    }
    let steps = sample_steps(sample_times, cfg.dt, cfg.t_max)?;
    let JumpScheme::FirstOrder = cfg.scheme;

    // exact no-jump propagator exp((-iH - 1/2 sum r c^dag c) dt)
    let minus_i = C64::new(0.0, -1.0);
    let drift = model.hamiltonian().matrix().mapv(|z| z * minus_i)
        - model.total_jump_form().mapv(|z| z * 0.5);
    let no_jump_prop = expm(&drift.mapv(|z| z * cfg.dt))?;
    let jumps: Vec<(f64, Array2<C64>)> = model
        .jumps()
        .iter()
        .map(|(r, op)| (*r, op.matrix().clone()))
        .collect();

    let per_traj = run_indexed(cfg.n_traj, threads, |n| {
        run_one(n, cfg.seed, psi0, &no_jump_prop, &jumps, &steps, cfg.dt)
    });

    // Welford accumulation in trajectory order: bit-stable for any thread
    // count, and safe against cancellation in the variance.
    let n_samples = steps.len();
    let mut mean_re = vec![Array2::<f64>::zeros((d, d)); n_samples];
    let mut mean_im = vec![Array2::<f64>::zeros((d, d)); n_samples];
    let mut m2_re = vec![Array2::<f64>::zeros((d, d)); n_samples];
    let mut m2_im = vec![Array2::<f64>::zeros((d, d)); n_samples];
    let mut count = 0.0f64;
    for traj in per_traj {
        let snapshots = traj?;
        count += 1.0;
        for (s, snap) in snapshots.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    let dre = snap[[i, j]].re - mean_re[s][[i, j]];
                    mean_re[s][[i, j]] += dre / count;
                    m2_re[s][[i, j]] += dre * (snap[[i, j]].re - mean_re[s][[i, j]]);
                    let dim = snap[[i, j]].im - mean_im[s][[i, j]];
                    mean_im[s][[i, j]] += dim / count;
                    m2_im[s][[i, j]] += dim * (snap[[i, j]].im - mean_im[s][[i, j]]);
                }
            }
        }
    }

    let n = cfg.n_traj as f64;
    let mut means = Vec::with_capacity(n_samples);
    let mut std_errors = Vec::with_capacity(n_samples);
    for s in 0..n_samples {
        let rho = Array2::from_shape_fn((d, d), |(i, j)| {
            C64::new(mean_re[s][[i, j]], mean_im[s][[i, j]])
        });
        means.push(DensityMatrix::new(model.space().clone(), rho)?);
        let se = if cfg.n_traj >= 2 {
            Array2::from_shape_fn((d, d), |(i, j)| {
                C64::new(
                    (m2_re[s][[i, j]].max(0.0) / (n * (n - 1.0))).sqrt(),
                    (m2_im[s][[i, j]].max(0.0) / (n * (n - 1.0))).sqrt(),
                )
            })
        } else {
            Array2::zeros((d, d))
        };
        std_errors.push(se);
    }

    Ok(TrajectoryResult {
        sample_times: sample_times.to_vec(),
        means,
        std_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_operator, HilbertSpace, Operator};
    use crate::liouville::{build_liouvillian, evolve};
    use crate::models::{squeezed_bath_master, DriveParams, SqueezedBathParams};
    use approx::assert_abs_diff_eq;

    fn ground() -> Array1<C64> {
        let mut psi = Array1::zeros(2);
        psi[0] = C64::new(1.0, 0.0);
        psi
    }

    fn excited() -> Array1<C64> {
        let mut psi = Array1::zeros(2);
        psi[1] = C64::new(1.0, 0.0);
        psi
    }

    fn superposition() -> Array1<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Array1::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)])
    }

    fn cfg(n_traj: usize, dt: f64, t_max: f64) -> TrajectoryConfig {
        TrajectoryConfig {
            n_traj,
            dt,
            t_max,
            seed: 20260823,
            scheme: JumpScheme::FirstOrder,
        }
    }

    fn decay_model() -> crate::models::LindbladModel {
        let bath = SqueezedBathParams::vacuum(1.0).unwrap();
        squeezed_bath_master(&bath, None).unwrap()
    }

    #[test]
    fn unitary_evolution_stays_pure() {
        let space = HilbertSpace::two_level();
        let sig = basis_operator(&space, "g", "e").unwrap();
        let h = Operator::from_matrix(
            space.clone(),
            (sig.matrix() + &sig.dagger().matrix().view()).mapv(|z| z * 0.5),
        )
        .unwrap();
        let model = crate::models::LindbladModel::new(space, h, vec![]).unwrap();
        let times = [0.0, 1.0, 2.0];
        let result = simulate(&model, &ground(), &cfg(8, 0.01, 2.0), &times, 1).unwrap();
        for (rho, se) in result.means().iter().zip(result.std_errors()) {
            let m = rho.matrix();
            let purity = m.dot(m).diag().iter().map(|z| z.re).sum::<f64>();
            assert_abs_diff_eq!(purity, 1.0, epsilon = 1e-8);
            assert!(se.iter().all(|z| z.norm() < 1e-12), "identical trajectories");
        }
    }

    #[test]
    fn amplitude_damping_follows_exponential_law() {
        let model = decay_model();
        let times = [0.5, 1.0, 2.0, 3.0];
        let result = simulate(&model, &excited(), &cfg(2000, 0.005, 3.0), &times, 2).unwrap();
        for (k, t) in times.iter().enumerate() {
            let pop = result.means()[k].matrix()[[1, 1]].re;
            let se = result.std_errors()[k][[1, 1]].re;
            let exact = (-t).exp();
            assert!(
                (pop - exact).abs() <= 3.0 * se,
                "t={t}: population {pop} vs {exact}, se {se}"
            );
        }
    }

    #[test]
    fn squeezed_bath_ensemble_matches_master_equation() {
        let bath = SqueezedBathParams::maximal(1.0, 0.5, 0.0).unwrap();
        let drive = DriveParams::new(2.0, 0.0).unwrap();
        let model = squeezed_bath_master(&bath, Some(drive)).unwrap();
        let l = build_liouvillian(&model);
        let times = [0.0, 0.5, 1.0, 2.0];

        let psi0 = superposition();
        let rho0 = DensityMatrix::from_pure(model.space().clone(), &psi0).unwrap();
        let exact = evolve(&l, &rho0, &times).unwrap();

        let result = simulate(&model, &psi0, &cfg(1000, 0.005, 2.0), &times, 2).unwrap();
        let samples = result.bloch_series("g", "e").unwrap();
        for (k, sample) in samples.iter().enumerate() {
            let truth = crate::hilbert::bloch_vector(&exact[k], "g", "e").unwrap();
            for (mean, se, want) in [
                (sample.mean.0, sample.std_error.0, truth.0),
                (sample.mean.1, sample.std_error.1, truth.1),
                (sample.mean.2, sample.std_error.2, truth.2),
            ] {
                assert!(
                    (mean - want).abs() <= 3.0 * se + 1e-9,
                    "t={}: component {mean} vs {want}, se {se}",
                    sample.time
                );
            }
        }
    }

    #[test]
    fn error_halves_when_ensemble_quadruples() {
        // common random numbers: the small run is a prefix of the large one
        let bath = SqueezedBathParams::maximal(1.0, 0.5, 0.0).unwrap();
        let drive = DriveParams::new(2.0, 0.0).unwrap();
        let model = squeezed_bath_master(&bath, Some(drive)).unwrap();
        let l = build_liouvillian(&model);
        let times: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();

        let psi0 = superposition();
        let rho0 = DensityMatrix::from_pure(model.space().clone(), &psi0).unwrap();
        let exact = evolve(&l, &rho0, &times).unwrap();

        let rms = |n_traj: usize| -> f64 {
            let result =
                simulate(&model, &psi0, &cfg(n_traj, 0.005, 2.0), &times, 2).unwrap();
            let samples = result.bloch_series("g", "e").unwrap();
            let mut sq = 0.0;
            for (k, s) in samples.iter().enumerate() {
                let t = crate::hilbert::bloch_vector(&exact[k], "g", "e").unwrap();
                sq += (s.mean.0 - t.0).powi(2) + (s.mean.1 - t.1).powi(2)
                    + (s.mean.2 - t.2).powi(2);
            }
            (sq / (3.0 * samples.len() as f64)).sqrt()
        };
        let ratio = rms(250) / rms(1000);
        assert!(
            (1.33..=3.0).contains(&ratio),
            "error ratio {ratio} outside factor-1.5 band around 2"
        );
    }

    #[test]
    fn identical_configuration_reproduces_identical_bytes() {
        let model = decay_model();
        let times = [0.0, 0.5, 1.0];
        let base = simulate(&model, &superposition(), &cfg(64, 0.005, 1.0), &times, 1).unwrap();
        for threads in [1usize, 4] {
            let again =
                simulate(&model, &superposition(), &cfg(64, 0.005, 1.0), &times, threads)
                    .unwrap();
            for (a, b) in base.means().iter().zip(again.means()) {
                assert_eq!(a.matrix(), b.matrix(), "threads = {threads}");
            }
            for (a, b) in base.std_errors().iter().zip(again.std_errors()) {
                assert_eq!(a, b, "threads = {threads}");
            }
        }
    }

    #[test]
    fn seed_selects_the_ensemble() {
        let model = decay_model();
        let times = [1.0];
        let mut other = cfg(64, 0.005, 1.0);
        other.seed = 7;
        let a = simulate(&model, &superposition(), &cfg(64, 0.005, 1.0), &times, 1).unwrap();
        let b = simulate(&model, &superposition(), &other, &times, 1).unwrap();
        assert_ne!(a.means()[0].matrix(), b.means()[0].matrix());
    }

    #[test]
    fn configuration_errors_are_rejected() {
        let model = decay_model();
        let times = [0.5];
        // step bound: vacuum decay has rate scale 1, so dt <= 0.01
        assert!(simulate(&model, &excited(), &cfg(10, 0.02, 1.0), &times, 1).is_err());
        assert!(simulate(&model, &excited(), &cfg(0, 0.005, 1.0), &times, 1).is_err());
        // off-grid sample time
        assert!(simulate(&model, &excited(), &cfg(10, 0.005, 1.0), &[0.0033], 1).is_err());
        // unnormalized initial state
        let bad = Array1::from_vec(vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0)]);
        assert!(simulate(&model, &bad, &cfg(10, 0.005, 1.0), &times, 1).is_err());
        // sample beyond horizon
        assert!(simulate(&model, &excited(), &cfg(10, 0.005, 1.0), &[2.0], 1).is_err());
    }
}

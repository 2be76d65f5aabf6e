//! Lindblad model builders and the parameter map linking them.
//!
//! Three master equations describe the same physics at different levels:
//!
//! 1. [`squeezed_bath_master`] — a two-level atom in a broadband squeezed
//!    reservoir (photon number N, squeezing M, phase phi), written in the
//!    three-channel form with the squeezed jump operator
//!    `Sigma = sqrt(N1+1) sigma + e^{i phi} sqrt(N1) sigma^dag`, where
//!    `N1(N1+1) = M^2` and the leftover thermal weight is `N2 = N - N1`.
//! 2. [`four_level_master`] — the J=1/2 -> J=1/2 atom in ordinary vacuum,
//!    pumped on its two Raman legs; interference of the two linear-dipole
//!    decay paths (shared channel `sigma_1 + sigma_2`) is what synthesizes
//!    squeezing for the ground-state dynamics.
//! 3. [`effective_ground_master`] — the two ground states after adiabatic
//!    elimination of the excited manifold: a squeezed-looking jump
//!    `eps_plus sigma + e^{i phi_L} eps_minus sigma^dag` at rate
//!    `g_l^2 Omega^2 / Gamma` plus a `sigma_z` dephasing channel at
//!    `g_c^2 Omega^2 / (4 Gamma)` from the non-interfering cross decay.
//!
//! [`map_parameters`] converts four-level parameters into the equivalent
//! squeezed-bath parameters (always maximally squeezed, `M^2 = N(N+1)`);
//! [`inverse_map`] reverses it so experiments can be stated in bath
//! language. [`interference_subsystem_model`] builds the two-upper-manifold
//! system used to study how detuning tuning suppresses residual cross decay.
//!
//! Canonical basis orders: `(g, e)` two-level, `(g-, g+)` effective ground,
//! `(g-, g+, e-, e+)` four-level, `(g-, g+, e, a)` interference subsystem.
//! Units: two-level models take `gamma = 1`, four-level models `Gamma = 1`.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{config_err, Result};
use crate::hilbert::{basis_operator, HilbertSpace, Operator};

/// Tolerance on the amplitude normalizations `eps+^2 + eps-^2 = 1` and
/// `g_l^2 + g_c^2 = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Relative slack on the squeezing bound `M^2 <= N(N+1)`; scaled with
/// N(N+1) so mapped parameters at large N survive roundoff.
pub const SQUEEZING_BOUND_TOL: f64 = 1e-12;
/// Adiabatic elimination is trustworthy for `Omega/Gamma` below this.
pub const ADIABATIC_VALIDITY_BOUND: f64 = 0.2;

/// Squeezed-reservoir parameters: decay rate `gamma`, effective photon
/// number `n` (N), squeezing magnitude `m` (M), squeezing phase `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedBathParams {
    pub gamma: f64,
    pub n: f64,
    pub m: f64,
    pub phi: f64,
}

impl SqueezedBathParams {
    pub fn new(gamma: f64, n: f64, m: f64, phi: f64) -> Result<Self> {
        let p = Self { gamma, n, m, phi };
        p.validate()?;
        Ok(p)
    }

    /// Ordinary vacuum: N = M = 0.
    pub fn vacuum(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0, 0.0, 0.0)
    }

    /// Maximal squeezing `M = sqrt(N(N+1))` at the given photon number.
    pub fn maximal(gamma: f64, n: f64, phi: f64) -> Result<Self> {
        Self::new(gamma, n, (n * (n + 1.0)).sqrt(), phi)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return config_err(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.n >= 0.0) {
            return config_err(format!("photon number N must be >= 0, got {}", self.n));
        }
        if !(self.m >= 0.0) {
            return config_err(format!("squeezing M must be >= 0, got {}", self.m));
        }
        if !self.phi.is_finite() {
            return config_err(format!("phase phi must be finite, got {}", self.phi));
        }
        let bound = self.n * (self.n + 1.0);
        if self.m * self.m > bound + SQUEEZING_BOUND_TOL * (1.0 + bound) {
            return config_err(format!(
                "squeezing bound violated: M^2 = {} exceeds N(N+1) = {}",
                self.m * self.m,
                bound
            ));
        }
        Ok(())
    }
}

/// Coherent drive on the effective two-level transition: Rabi frequency
/// `omega_d` and phase `phi_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub omega_d: f64,
    pub phi_d: f64,
}

impl DriveParams {
    pub fn new(omega_d: f64, phi_d: f64) -> Result<Self> {
        if !(omega_d >= 0.0) {
            return config_err(format!("drive omega_D must be >= 0, got {omega_d}"));
        }
        if !phi_d.is_finite() {
            return config_err(format!("drive phase phi_D must be finite, got {phi_d}"));
        }
        Ok(Self { omega_d, phi_d })
    }
}

/// Four-level atom parameters: excited-state decay `gamma_up` (Gamma),
/// pump scale `omega` (Omega), normalized field amplitudes `eps_plus`,
/// `eps_minus`, relative laser phase `phi_l`, branching amplitudes `g_l`
/// (linear, interfering) and `g_c` (circular, cross), and an optional
/// Raman drive between the ground states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevelParams {
    pub gamma_up: f64,
    pub omega: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub phi_l: f64,
    pub g_l: f64,
    pub g_c: f64,
    pub drive: Option<DriveParams>,
}

impl FourLevelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        gamma_up: f64,
        omega: f64,
        eps_plus: f64,
        eps_minus: f64,
        phi_l: f64,
        g_l: f64,
        g_c: f64,
        drive: Option<DriveParams>,
    ) -> Result<Self> {
        let p = Self {
            gamma_up,
            omega,
            eps_plus,
            eps_minus,
            phi_l,
            g_l,
            g_c,
            drive,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_up > 0.0) {
            return config_err(format!("Gamma must be positive, got {}", self.gamma_up));
        }
        if !(self.omega >= 0.0) {
            return config_err(format!("Omega must be >= 0, got {}", self.omega));
        }
        if !(self.eps_plus >= 0.0 && self.eps_minus >= 0.0) {
            return config_err(format!(
                "field amplitudes must be >= 0, got eps_plus = {}, eps_minus = {}",
                self.eps_plus, self.eps_minus
            ));
        }
        let eps_norm = self.eps_plus * self.eps_plus + self.eps_minus * self.eps_minus;
        if (eps_norm - 1.0).abs() > NORMALIZATION_TOL {
            return config_err(format!(
                "field normalization violated: eps_plus^2 + eps_minus^2 = {eps_norm}, expected 1"
            ));
        }
        if !(self.g_l >= 0.0 && self.g_c >= 0.0) {
            return config_err(format!(
                "branching amplitudes must be >= 0, got g_l = {}, g_c = {}",
                self.g_l, self.g_c
            ));
        }
        let g_norm = self.g_l * self.g_l + self.g_c * self.g_c;
        if (g_norm - 1.0).abs() > NORMALIZATION_TOL {
            return config_err(format!(
                "branching normalization violated: g_l^2 + g_c^2 = {g_norm}, expected 1"
            ));
        }
        if !self.phi_l.is_finite() {
            return config_err(format!("phase phi_L must be finite, got {}", self.phi_l));
        }
        if let Some(d) = &self.drive {
            DriveParams::new(d.omega_d, d.phi_d)?;
        }
        Ok(())
    }

    /// Pump strength relative to the spontaneous rate; the small parameter
    /// of the adiabatic elimination.
    pub fn omega_over_gamma(&self) -> f64 {
        self.omega / self.gamma_up
    }

    /// Warning text when the pump is too strong for adiabatic elimination
    /// (`Omega/Gamma > 0.2`); `None` inside the validity regime.
    pub fn adiabatic_validity_warning(&self) -> Option<String> {
        let x = self.omega_over_gamma();
        if x > ADIABATIC_VALIDITY_BOUND {
            Some(format!(
                "adiabatic elimination outside validity: Omega/Gamma = {x:.4} > {ADIABATIC_VALIDITY_BOUND}"
            ))
        } else {
            None
        }
    }
}

/// Interference-subsystem parameters: two upper manifolds (e at detuning
/// `delta_e`, a at `delta_a`) decaying at `gamma_e`, `gamma_a`, with
/// circular-channel branching amplitudes `gc_e`, `gc_a`. `prefactor`
/// replaces the absolute radiometric scale in the cross-decay formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsystemParams {
    pub gamma_e: f64,
    pub gamma_a: f64,
    pub delta_e: f64,
    pub delta_a: f64,
    pub gc_e: f64,
    pub gc_a: f64,
    pub prefactor: f64,
}

impl SubsystemParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_e > 0.0 && self.gamma_a > 0.0) {
            return config_err(format!(
                "manifold decay rates must be positive, got Gamma_e = {}, Gamma_a = {}",
                self.gamma_e, self.gamma_a
            ));
        }
        for (name, g) in [("gc_e", self.gc_e), ("gc_a", self.gc_a)] {
            if !(0.0..=1.0).contains(&g) {
                return config_err(format!("{name} must lie in [0, 1], got {g}"));
            }
        }
        if !(self.prefactor > 0.0) {
            return config_err(format!("prefactor must be positive, got {}", self.prefactor));
        }
        if !(self.delta_e.is_finite() && self.delta_a.is_finite()) {
            return config_err("detunings must be finite".to_string());
        }
        Ok(())
    }
}

/// A Hamiltonian plus weighted jump channels on a labeled space; the
/// universal input to the Liouvillian, trajectory, and spectrum machinery.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    space: HilbertSpace,
    hamiltonian: Operator,
    jumps: Vec<(f64, Operator)>,
}

impl LindbladModel {
    /// Validate and assemble: Hermitian Hamiltonian, nonnegative rates,
    /// every operator on the same space.
    pub fn new(
        space: HilbertSpace,
        hamiltonian: Operator,
        jumps: Vec<(f64, Operator)>,
    ) -> Result<Self> {
        if hamiltonian.space() != &space {
            return config_err("hamiltonian space differs from model space".to_string());
        }
        if !hamiltonian.is_hermitian() {
            return config_err(format!(
                "hamiltonian not Hermitian: defect {:.3e}",
                hamiltonian.hermiticity_defect()
            ));
        }
        for (rate, op) in &jumps {
            if !(*rate >= 0.0) {
                return config_err(format!("jump rate must be >= 0, got {rate}"));
            }
            if op.space() != &space {
                return config_err("jump operator space differs from model space".to_string());
            }
        }
        Ok(Self {
            space,
            hamiltonian,
            jumps,
        })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[(f64, Operator)] {
        &self.jumps
    }

    /// `sum_k r_k c_k^dag c_k`, the total decay form entering both the
    /// no-jump Hamiltonian and the Liouvillian anticommutator.
    pub fn total_jump_form(&self) -> Array2<C64> {
        let d = self.space.dim();
        let mut total: Array2<C64> = Array2::zeros((d, d));
        for (rate, op) in &self.jumps {
            let cdc = op.dagger().matrix().dot(op.matrix());
            total = total + cdc.mapv(|z| z * *rate);
        }
        total
    }
}

/// Split bath photon number into squeezed and thermal parts:
/// `N1 = (-1 + sqrt(1 + 4 M^2)) / 2` (so `N1(N1+1) = M^2`), `N2 = N - N1`.
/// At maximal squeezing N1 = N and N2 = 0.
pub fn squeezing_split(p: &SqueezedBathParams) -> (f64, f64) {
    let n1 = 0.5 * (-1.0 + (1.0 + 4.0 * p.m * p.m).sqrt());
    let n2 = (p.n - n1).max(0.0);
    (n1, n2)
}

fn drive_term(h: &mut Array2<C64>, lower: usize, upper: usize, d: &DriveParams) {
    // (Omega_D/2)(e^{-i phi_D} sigma^dag + e^{i phi_D} sigma), sigma = |lower><upper|
    let amp = C64::from_polar(d.omega_d / 2.0, -d.phi_d);
    h[[upper, lower]] += amp;
    h[[lower, upper]] += amp.conj();
}

/// Two-level atom in a broadband squeezed reservoir, optionally driven.
///
/// Channels: `(gamma, Sigma)`, `(gamma N2, sigma)`, `(gamma N2, sigma^dag)`
/// with `Sigma = sqrt(N1+1) sigma + e^{i phi} sqrt(N1) sigma^dag`.
/// Hamiltonian `(Omega_D/2)(e^{-i phi_D} sigma^dag + e^{i phi_D} sigma)`
/// when driven. Basis order (g, e).
pub fn squeezed_bath_master(
    p: &SqueezedBathParams,
    drive: Option<DriveParams>,
) -> Result<LindbladModel> {
    p.validate()?;
    let space = HilbertSpace::two_level();
    let (n1, n2) = squeezing_split(p);

    let sigma = basis_operator(&space, "g", "e")?;
    let sigma_dag = sigma.dagger();
    let sq_jump = sigma.matrix().mapv(|z| z * (n1 + 1.0).sqrt())
        + sigma_dag
            .matrix()
            .mapv(|z| z * C64::from_polar(n1.sqrt(), p.phi));
    let sigma_sq = Operator::from_matrix(space.clone(), sq_jump)?;

    let mut h = Array2::zeros((2, 2));
    if let Some(d) = &drive {
        drive_term(&mut h, 0, 1, d);
    }
    let hamiltonian = Operator::from_matrix(space.clone(), h)?;

    LindbladModel::new(
        space,
        hamiltonian,
        vec![
            (p.gamma, sigma_sq),
            (p.gamma * n2, sigma),
            (p.gamma * n2, sigma_dag),
        ],
    )
}

/// Four-level atom in ordinary vacuum with Raman pumping.
///
/// Basis order (g-, g+, e-, e+). Pump Hamiltonian
/// `(eps_minus Omega/2)(sigma_-^dag + sigma_-) +
///  (eps_plus Omega/2)(e^{-i phi_L} sigma_+^dag + e^{i phi_L} sigma_+)`
/// with `sigma_- = |g-><e+|`, `sigma_+ = |g+><e-|`, plus an optional Raman
/// drive on `sigma_gg = |g-><g+|`. Channels: one shared interfering linear
/// channel `(g_l^2 Gamma, sigma_1 + sigma_2)` and two circular cross
/// channels `(g_c^2 Gamma, sigma_-)`, `(g_c^2 Gamma, sigma_+)`. The
/// excited-state decay enters only through these channels (total jump form
/// `Gamma P_e`); there is no separate non-Hermitian Hamiltonian piece.
pub fn four_level_master(p: &FourLevelParams) -> Result<LindbladModel> {
    p.validate()?;
    let space = HilbertSpace::four_level();

    let sigma_1 = basis_operator(&space, "g-", "e-")?;
    let sigma_2 = basis_operator(&space, "g+", "e+")?;
    let sigma_minus = basis_operator(&space, "g-", "e+")?;
    let sigma_plus = basis_operator(&space, "g+", "e-")?;
    let linear = Operator::from_matrix(space.clone(), sigma_1.matrix() + sigma_2.matrix())?;

    let mut h: Array2<C64> = Array2::zeros((4, 4));
    // eps_minus leg: couples g- <-> e+ with real amplitude
    let a_minus = C64::new(p.eps_minus * p.omega / 2.0, 0.0);
    h[[3, 0]] += a_minus;
    h[[0, 3]] += a_minus;
    // eps_plus leg: couples g+ <-> e- carrying the laser phase
    let a_plus = C64::from_polar(p.eps_plus * p.omega / 2.0, -p.phi_l);
    h[[2, 1]] += a_plus;
    h[[1, 2]] += a_plus.conj();
    if let Some(d) = &p.drive {
        // Raman drive between the ground states, sigma_gg = |g-><g+|
        drive_term(&mut h, 0, 1, d);
    }
    let hamiltonian = Operator::from_matrix(space.clone(), h)?;

    let gl2 = p.g_l * p.g_l;
    let gc2 = p.g_c * p.g_c;
    LindbladModel::new(
        space,
        hamiltonian,
        vec![
            (gl2 * p.gamma_up, linear),
            (gc2 * p.gamma_up, sigma_minus),
            (gc2 * p.gamma_up, sigma_plus),
        ],
    )
}

/// Effective ground-state master equation after adiabatic elimination of
/// the excited manifold.
///
/// Two-level model on (g-, g+) with `sigma = |g-><g+|`; channels
/// `(g_l^2 Omega^2/Gamma, eps_plus sigma + e^{i phi_L} eps_minus sigma^dag)`
/// and `(g_c^2 Omega^2/(4 Gamma), sigma_z)`. Valid for weak pumping; callers
/// should consult [`FourLevelParams::adiabatic_validity_warning`] when
/// `Omega/Gamma > 0.2`.
pub fn effective_ground_master(p: &FourLevelParams) -> Result<LindbladModel> {
    p.validate()?;
    let space = HilbertSpace::new(&["g-", "g+"])?;

    let sigma = basis_operator(&space, "g-", "g+")?;
    let squeezed = sigma.matrix().mapv(|z| z * p.eps_plus)
        + sigma
            .dagger()
            .matrix()
            .mapv(|z| z * C64::from_polar(p.eps_minus, p.phi_l));
    let squeezed = Operator::from_matrix(space.clone(), squeezed)?;

    // sigma_z = P_{g+} - P_{g-}
    let mut sz = Array2::zeros((2, 2));
    sz[[0, 0]] = C64::new(-1.0, 0.0);
    sz[[1, 1]] = C64::new(1.0, 0.0);
    let sigma_z = Operator::from_matrix(space.clone(), sz)?;

    let mut h = Array2::zeros((2, 2));
    if let Some(d) = &p.drive {
        drive_term(&mut h, 0, 1, d);
    }
    let hamiltonian = Operator::from_matrix(space.clone(), h)?;

    let w2_over_g = p.omega * p.omega / p.gamma_up;
    LindbladModel::new(
        space,
        hamiltonian,
        vec![
            (p.g_l * p.g_l * w2_over_g, squeezed),
            (p.g_c * p.g_c * w2_over_g / 4.0, sigma_z),
        ],
    )
}

/// Four-level parameters -> equivalent squeezed-bath parameters:
/// `gamma = (eps+^2 - eps-^2) Omega^2 / Gamma`, `N = eps-^2 / (eps+^2 - eps-^2)`,
/// `M = eps- eps+ / (eps+^2 - eps-^2)`, `phi = phi_L`. The output is always
/// maximally squeezed: `M^2 = N(N+1)` follows from `eps+^2 + eps-^2 = 1`.
pub fn map_parameters(p: &FourLevelParams) -> Result<SqueezedBathParams> {
    p.validate()?;
    if p.eps_plus <= p.eps_minus {
        return config_err("mapping singular: eps_plus must exceed eps_minus".to_string());
    }
    if !(p.omega > 0.0) {
        return config_err("mapping requires Omega > 0".to_string());
    }
    let diff = p.eps_plus * p.eps_plus - p.eps_minus * p.eps_minus;
    SqueezedBathParams::new(
        diff * p.omega * p.omega / p.gamma_up,
        p.eps_minus * p.eps_minus / diff,
        p.eps_minus * p.eps_plus / diff,
        p.phi_l,
    )
}

/// Invert the parameter map: given target photon number `n` and decay rate
/// `gamma` at fixed `gamma_up`, return `(eps_plus, eps_minus, omega)` with
/// `eps-^2 = N/(2N+1)`, `eps+^2 = (N+1)/(2N+1)`, `Omega = sqrt(gamma Gamma (2N+1))`.
pub fn inverse_map(n: f64, gamma: f64, gamma_up: f64) -> Result<(f64, f64, f64)> {
    if !(n >= 0.0) {
        return config_err(format!("photon number N must be >= 0, got {n}"));
    }
    if !(gamma > 0.0 && gamma_up > 0.0) {
        return config_err(format!(
            "rates must be positive, got gamma = {gamma}, Gamma = {gamma_up}"
        ));
    }
    let denom = 2.0 * n + 1.0;
    let eps_minus = (n / denom).sqrt();
    let eps_plus = ((n + 1.0) / denom).sqrt();
    let omega = (gamma * gamma_up * denom).sqrt();
    Ok((eps_plus, eps_minus, omega))
}

fn subsystem_amplitudes(p: &SubsystemParams) -> (f64, f64, f64, f64) {
    let circ_e = (p.gc_e * p.gc_e * p.gamma_e).sqrt();
    let circ_a = (p.gc_a * p.gc_a * p.gamma_a).sqrt();
    let lin_e = ((1.0 - p.gc_e * p.gc_e) * p.gamma_e).sqrt();
    let lin_a = ((1.0 - p.gc_a * p.gc_a) * p.gamma_a).sqrt();
    (circ_e, circ_a, lin_e, lin_a)
}

/// Two ground states plus two far-detuned upper manifolds (e, a), driven
/// from `g-` with Rabi amplitudes `omega_e`, `omega_a`.
///
/// Basis order (g-, g+, e, a); rotating-frame Hamiltonian
/// `-Delta_e |e><e| + Delta_a |a><a|` plus the two laser couplings. Decay
/// is two combined channels at unit rate whose operators carry the
/// amplitudes `sqrt(g^2 Gamma)` per transition: the linear channel returns
/// both manifolds to `g-` (amplitudes interfere through the shared vacuum),
/// the circular cross channel routes both into `g+`. Destructive
/// interference between the two paths of the cross channel is the
/// suppression mechanism under study.
pub fn interference_subsystem_model(
    p: &SubsystemParams,
    omega_e: f64,
    omega_a: f64,
) -> Result<LindbladModel> {
    p.validate()?;
    let space = HilbertSpace::new(&["g-", "g+", "e", "a"])?;
    let (circ_e, circ_a, lin_e, lin_a) = subsystem_amplitudes(p);

    let mut h: Array2<C64> = Array2::zeros((4, 4));
    h[[2, 2]] = C64::new(-p.delta_e, 0.0);
    h[[3, 3]] = C64::new(p.delta_a, 0.0);
    for (upper, omega) in [(2, omega_e), (3, omega_a)] {
        let amp = C64::new(omega / 2.0, 0.0);
        h[[upper, 0]] += amp;
        h[[0, upper]] += amp;
    }
    let hamiltonian = Operator::from_matrix(space.clone(), h)?;

    let mut lin: Array2<C64> = Array2::zeros((4, 4));
    lin[[0, 2]] = C64::new(lin_e, 0.0);
    lin[[0, 3]] = C64::new(lin_a, 0.0);
    let mut circ: Array2<C64> = Array2::zeros((4, 4));
    circ[[1, 2]] = C64::new(circ_e, 0.0);
    circ[[1, 3]] = C64::new(circ_a, 0.0);

    LindbladModel::new(
        space.clone(),
        hamiltonian,
        vec![
            (1.0, Operator::from_matrix(space.clone(), lin)?),
            (1.0, Operator::from_matrix(space, circ)?),
        ],
    )
}

/// Recycled three-level variant for steady-state rate extraction: both
/// channels return to the single ground state `g`, so the cross-channel
/// flux `Tr(c^dag c rho_ss)` is a stationary pumping rate rather than a
/// transient. Basis order (g, e, a).
pub(crate) fn recycled_subsystem_model(
    p: &SubsystemParams,
    omega_e: f64,
    omega_a: f64,
) -> Result<(LindbladModel, Operator)> {
    p.validate()?;
    let space = HilbertSpace::new(&["g", "e", "a"])?;
    let (circ_e, circ_a, lin_e, lin_a) = subsystem_amplitudes(p);

    let mut h: Array2<C64> = Array2::zeros((3, 3));
    h[[1, 1]] = C64::new(-p.delta_e, 0.0);
    h[[2, 2]] = C64::new(p.delta_a, 0.0);
    for (upper, omega) in [(1, omega_e), (2, omega_a)] {
        let amp = C64::new(omega / 2.0, 0.0);
        h[[upper, 0]] += amp;
        h[[0, upper]] += amp;
    }
    let hamiltonian = Operator::from_matrix(space.clone(), h)?;

    let mut lin: Array2<C64> = Array2::zeros((3, 3));
    lin[[0, 1]] = C64::new(lin_e, 0.0);
    lin[[0, 2]] = C64::new(lin_a, 0.0);
    let mut circ: Array2<C64> = Array2::zeros((3, 3));
    circ[[0, 1]] = C64::new(circ_e, 0.0);
    circ[[0, 2]] = C64::new(circ_a, 0.0);
    let circ_op = Operator::from_matrix(space.clone(), circ)?;

    let model = LindbladModel::new(
        space.clone(),
        hamiltonian,
        vec![
            (1.0, Operator::from_matrix(space, lin)?),
            (1.0, circ_op.clone()),
        ],
    )?;
    Ok((model, circ_op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    fn ideal_four_level(omega: f64, eps_minus_sq: f64, phi_l: f64) -> FourLevelParams {
        FourLevelParams::new(
            1.0,
            omega,
            (1.0 - eps_minus_sq).sqrt(),
            eps_minus_sq.sqrt(),
            phi_l,
            1.0,
            0.0,
            None,
        )
        .unwrap()
    }

    #[test]
    fn vacuum_bath_reduces_to_plain_decay() {
        let p = SqueezedBathParams::vacuum(1.0).unwrap();
        let model = squeezed_bath_master(&p, None).unwrap();
        let jumps = model.jumps();
        assert_eq!(jumps.len(), 3);
        // Sigma collapses to sigma, thermal channels carry zero rate.
        assert_abs_diff_eq!(jumps[0].0, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(jumps[0].1.matrix()[[0, 1]].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(jumps[0].1.matrix()[[1, 0]].norm(), 0.0, epsilon = 1e-15);
        assert_eq!(jumps[1].0, 0.0);
        assert_eq!(jumps[2].0, 0.0);
    }

    #[test]
    fn maximal_squeezing_at_n1_has_pure_sigma_jump() {
        // N=1, M=sqrt(2): N1=1, N2=0, Sigma = sqrt(2) sigma + sigma^dag
        let p = SqueezedBathParams::maximal(1.0, 1.0, 0.0).unwrap();
        let (n1, n2) = squeezing_split(&p);
        assert_abs_diff_eq!(n1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(n2, 0.0, epsilon = 1e-12);
        let model = squeezed_bath_master(&p, None).unwrap();
        let sq = &model.jumps()[0].1;
        assert_abs_diff_eq!(sq.matrix()[[0, 1]].re, SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(sq.matrix()[[1, 0]].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_maximal_split_solves_quadratic() {
        // N=1, M=1: N1(N1+1)=1 gives N1=(sqrt(5)-1)/2
        let p = SqueezedBathParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let (n1, n2) = squeezing_split(&p);
        assert_abs_diff_eq!(n1, 0.618_033_988_749_894_9, epsilon = 1e-12);
        assert_abs_diff_eq!(n2, 0.381_966_011_250_105_1, epsilon = 1e-12);
    }

    #[test]
    fn squeezing_phase_lands_on_raising_component() {
        let p = SqueezedBathParams::maximal(1.0, 0.5, 0.7).unwrap();
        let model = squeezed_bath_master(&p, None).unwrap();
        let raising = model.jumps()[0].1.matrix()[[1, 0]];
        let expected = C64::from_polar(0.5f64.sqrt(), 0.7);
        assert_abs_diff_eq!((raising - expected).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn squeezing_bound_enforced() {
        assert!(SqueezedBathParams::new(1.0, 1.0, 1.5, 0.0).is_err());
        let err = squeezed_bath_master(
            &SqueezedBathParams {
                gamma: 1.0,
                n: 0.5,
                m: 1.0,
                phi: 0.0,
            },
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("squeezing bound"), "{err}");
    }

    #[test]
    fn drive_hamiltonian_phase_convention() {
        let p = SqueezedBathParams::vacuum(1.0).unwrap();
        let d = DriveParams::new(2.0, 0.3).unwrap();
        let model = squeezed_bath_master(&p, Some(d)).unwrap();
        let h = model.hamiltonian().matrix();
        // sigma^dag entry carries (Omega_D/2) e^{-i phi_D}
        let expected = C64::from_polar(1.0, -0.3);
        assert_abs_diff_eq!((h[[1, 0]] - expected).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((h[[0, 1]] - expected.conj()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn four_level_total_jump_form_is_gamma_projector() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let em2: f64 = 0.49 * rng.gen::<f64>();
            let gl2: f64 = rng.gen();
            let p = FourLevelParams::new(
                1.0,
                0.1,
                (1.0 - em2).sqrt(),
                em2.sqrt(),
                rng.gen::<f64>() * 2.0 * PI,
                gl2.sqrt(),
                (1.0 - gl2).sqrt(),
                None,
            )
            .unwrap();
            let model = four_level_master(&p).unwrap();
            let total = model.total_jump_form();
            // sum r c^dag c = Gamma (P_{e-} + P_{e+}) regardless of branching
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j && i >= 2 { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(total[[i, j]].re, want, epsilon = 1e-12);
                    assert_abs_diff_eq!(total[[i, j]].im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn four_level_hamiltonian_couplings() {
        let p = FourLevelParams::new(
            1.0,
            0.2,
            (2.0f64 / 3.0).sqrt(),
            (1.0f64 / 3.0).sqrt(),
            0.9,
            1.0,
            0.0,
            Some(DriveParams::new(0.05, 0.0).unwrap()),
        )
        .unwrap();
        let model = four_level_master(&p).unwrap();
        let h = model.hamiltonian().matrix();
        // g- <-> e+ leg real, g+ <-> e- leg carries e^{-i phi_L}
        assert_abs_diff_eq!(h[[3, 0]].re, p.eps_minus * 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(h[[3, 0]].im, 0.0, epsilon = 1e-15);
        let want = C64::from_polar(p.eps_plus * 0.1, -0.9);
        assert_abs_diff_eq!((h[[2, 1]] - want).norm(), 0.0, epsilon = 1e-15);
        // Raman drive sits on the ground-state block, sigma_gg = |g-><g+|
        assert_abs_diff_eq!(h[[1, 0]].re, 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(h[[0, 1]].re, 0.025, epsilon = 1e-15);
        // no diagonal terms
        for i in 0..4 {
            assert_abs_diff_eq!(h[[i, i]].norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ideal_effective_channel_equals_mapped_squeezed_channel() {
        // g_c=0, eps+^2=2/3 maps to N=1, M=sqrt(2), gamma=Omega^2/(3 Gamma);
        // the weighted jump operators sqrt(r) c must agree entrywise.
        let p = ideal_four_level(0.01, 1.0 / 3.0, 0.0);
        let eff = effective_ground_master(&p).unwrap();
        let bath = map_parameters(&p).unwrap();
        assert_abs_diff_eq!(bath.n, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bath.m, SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(bath.gamma, 0.01 * 0.01 / 3.0, epsilon = 1e-18);
        let sq = squeezed_bath_master(&bath, None).unwrap();

        let weighted = |model: &LindbladModel, k: usize| {
            let (r, op) = &model.jumps()[k];
            op.matrix().mapv(|z| z * r.sqrt())
        };
        let a = weighted(&eff, 0);
        let b = weighted(&sq, 0);
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!((a[[i, j]] - b[[i, j]]).norm(), 0.0, epsilon = 1e-14);
            }
        }
        // remaining channels carry zero weight on both sides
        assert_abs_diff_eq!(eff.jumps()[1].0, 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(sq.jumps()[1].0 + sq.jumps()[2].0, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn effective_dephasing_rate_normalization() {
        let p = FourLevelParams::new(
            1.0,
            0.1,
            (2.0f64 / 3.0).sqrt(),
            (1.0f64 / 3.0).sqrt(),
            0.0,
            (2.0f64 / 3.0).sqrt(),
            (1.0f64 / 3.0).sqrt(),
            None,
        )
        .unwrap();
        let eff = effective_ground_master(&p).unwrap();
        let (rate, op) = &eff.jumps()[1];
        // g_c^2 Omega^2 / (4 Gamma) on sigma_z
        assert_abs_diff_eq!(*rate, (1.0 / 3.0) * 0.01 / 4.0, epsilon = 1e-18);
        assert_abs_diff_eq!(op.matrix()[[0, 0]].re, -1.0, epsilon = 0.0);
        assert_abs_diff_eq!(op.matrix()[[1, 1]].re, 1.0, epsilon = 0.0);
    }

    #[test]
    fn phase_pi_flips_raising_component_of_effective_jump() {
        let p0 = ideal_four_level(0.01, 1.0 / 3.0, 0.0);
        let ppi = ideal_four_level(0.01, 1.0 / 3.0, PI);
        let j0 = effective_ground_master(&p0).unwrap().jumps()[0].1.clone();
        let jpi = effective_ground_master(&ppi).unwrap().jumps()[0].1.clone();
        assert_abs_diff_eq!(j0.matrix()[[1, 0]].re, (1.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            jpi.matrix()[[1, 0]].re,
            -(1.0f64 / 3.0).sqrt(),
            epsilon = 1e-12
        );
        assert_eq!(j0.matrix()[[0, 1]], jpi.matrix()[[0, 1]]);
    }

    #[test]
    fn mapping_reference_points() {
        // eps-^2 = 1/7 -> N = 0.2, gamma = (5/7) Omega^2 / Gamma
        let p = ideal_four_level(0.009_969_954_864_010_04, 1.0 / 7.0, 0.0);
        let bath = map_parameters(&p).unwrap();
        assert_abs_diff_eq!(bath.n, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(
            bath.gamma,
            (5.0 / 7.0) * p.omega * p.omega,
            epsilon = 1e-18
        );
        // this Omega reproduces the gamma/Gamma = 7.1e-5 working point
        assert_abs_diff_eq!(bath.gamma, 7.1e-5, epsilon = 1e-12);

        // eps- = 0 -> plain vacuum, gamma = Omega^2/Gamma
        let p0 = ideal_four_level(0.02, 0.0, 0.0);
        let b0 = map_parameters(&p0).unwrap();
        assert_abs_diff_eq!(b0.n, 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(b0.m, 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(b0.gamma, 4e-4, epsilon = 1e-18);
    }

    #[test]
    fn mapping_is_always_maximally_squeezed() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..100 {
            let em: f64 = 1e-3 + (FRAC_1_SQRT_2 - 2e-3) * rng.gen::<f64>();
            let p = ideal_four_level(0.01, em * em, 0.0);
            let bath = map_parameters(&p).unwrap();
            let target = bath.n * (bath.n + 1.0);
            let rel = (bath.m * bath.m - target).abs() / target.max(1e-300);
            assert!(rel < 1e-12, "relative defect {rel:.3e} at eps- = {em}");
        }
    }

    #[test]
    fn mapping_singular_when_amplitudes_cross() {
        let p = FourLevelParams::new(
            1.0,
            0.01,
            FRAC_1_SQRT_2,
            FRAC_1_SQRT_2,
            0.0,
            1.0,
            0.0,
            None,
        )
        .unwrap();
        let err = map_parameters(&p).unwrap_err();
        assert!(
            err.to_string()
                .contains("mapping singular: eps_plus must exceed eps_minus"),
            "{err}"
        );
    }

    #[test]
    fn inverse_map_reference_points() {
        let (ep, em, om) = inverse_map(1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(em * em, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ep * ep, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(om, 3.0f64.sqrt(), epsilon = 1e-15);

        let (ep, em, om) = inverse_map(0.0, 2.0, 5.0).unwrap();
        assert_eq!((ep, em), (1.0, 0.0));
        assert_abs_diff_eq!(om, 10.0f64.sqrt(), epsilon = 1e-15);

        let (_, em, _) = inverse_map(2.1, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(em * em, 2.1 / 5.2, epsilon = 1e-15);
    }

    #[test]
    fn inverse_map_round_trips_through_mapping() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for _ in 0..30 {
            let n: f64 = 5.0 * rng.gen::<f64>();
            let gamma: f64 = 1e-6 + rng.gen::<f64>();
            let gamma_up = 1.0;
            let (ep, em, om) = inverse_map(n, gamma, gamma_up).unwrap();
            let p = FourLevelParams::new(gamma_up, om, ep, em, 0.0, 1.0, 0.0, None).unwrap();
            let bath = map_parameters(&p).unwrap();
            assert_abs_diff_eq!(bath.n, n, epsilon = 1e-12 * (1.0 + n));
            assert_abs_diff_eq!(bath.gamma, gamma, epsilon = 1e-12 * gamma);
        }
    }

    #[test]
    fn lindblad_model_rejects_bad_inputs() {
        let sp = HilbertSpace::two_level();
        let sigma = basis_operator(&sp, "g", "e").unwrap();
        // non-Hermitian Hamiltonian
        assert!(LindbladModel::new(sp.clone(), sigma.clone(), vec![]).is_err());
        // negative rate
        let zero = Operator::zero(sp.clone());
        assert!(LindbladModel::new(sp.clone(), zero.clone(), vec![(-1.0, sigma.clone())]).is_err());
        // mismatched space
        let other = Operator::zero(HilbertSpace::four_level());
        assert!(LindbladModel::new(sp, zero, vec![(1.0, other)]).is_err());
    }

    #[test]
    fn subsystem_model_structure() {
        let p = SubsystemParams {
            gamma_e: 1.0,
            gamma_a: 1.5,
            delta_e: 30.0,
            delta_a: 30.0,
            gc_e: (2.0f64 / 3.0).sqrt(),
            gc_a: (1.0f64 / 3.0).sqrt(),
            prefactor: 1.0,
        };
        let model = interference_subsystem_model(&p, 0.02, 0.03).unwrap();
        assert_eq!(model.space().dim(), 4);
        let h = model.hamiltonian().matrix();
        assert_abs_diff_eq!(h[[2, 2]].re, -30.0, epsilon = 0.0);
        assert_abs_diff_eq!(h[[3, 3]].re, 30.0, epsilon = 0.0);
        // both decay channels are combined operators at unit rate
        for (rate, op) in model.jumps() {
            assert_abs_diff_eq!(*rate, 1.0, epsilon = 0.0);
            let weight: f64 = op.matrix().iter().map(|z| z.norm_sqr()).sum();
            assert!(weight > 0.0);
        }
        // circular channel amplitudes carry sqrt(gc^2 Gamma)
        let circ = &model.jumps()[1].1;
        assert_abs_diff_eq!(
            circ.matrix()[[1, 2]].re,
            (2.0f64 / 3.0).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(circ.matrix()[[1, 3]].re, (0.5f64).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn adiabatic_validity_warning_threshold() {
        let p = ideal_four_level(0.1, 1.0 / 3.0, 0.0);
        assert!(p.adiabatic_validity_warning().is_none());
        let strong = FourLevelParams { omega: 0.5, ..p };
        let warning = strong.adiabatic_validity_warning().unwrap();
        assert!(warning.contains("0.5"), "{warning}");
    }

    #[test]
    fn normalization_invariants_enforced() {
        assert!(FourLevelParams::new(1.0, 0.1, 0.9, 0.5, 0.0, 1.0, 0.0, None).is_err());
        assert!(FourLevelParams::new(1.0, 0.1, 1.0, 0.0, 0.0, 0.9, 0.5, None).is_err());
    }
}

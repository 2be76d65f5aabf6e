//! Labeled Hilbert-space bookkeeping and dense complex operators.
//!
//! Every model in this crate lives on a small labeled basis (two to eight
//! levels). The basis order is frozen when a [`HilbertSpace`] is built and
//! all matrices over that space use it; modules state their canonical order
//! explicitly (`"g-", "g+", "e-", "e+"` for the four-level atom). Keeping
//! the labels attached to every operator removes silent index-permutation
//! bugs when operators built in one module are consumed in another.
//!
//! Bloch-vector convention, with `sigma = |lower><upper|`:
//! `S_x = <sigma^dag + sigma>`, `S_y = <(sigma - sigma^dag)/i>`,
//! `S_z = <P_upper - P_lower>`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{config_err, numerical_err, Result};

/// Hermiticity tolerance for operators flagged Hermitian.
pub const OPERATOR_HERMITICITY_TOL: f64 = 1e-12;
/// Hermiticity tolerance for density matrices.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-10;
/// Trace-normalization tolerance for density matrices.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
/// Numerical positivity floor: eigenvalues of a density matrix may not
/// fall below this. Violations signal solver bugs and fail loudly.
pub const DENSITY_POSITIVITY_FLOOR: f64 = -1e-8;

/// An ordered, labeled finite basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    labels: Vec<String>,
}

impl HilbertSpace {
    /// Build a space from unique level labels, in the order given.
    pub fn new(labels: &[&str]) -> Result<Self> {
        if labels.len() < 2 {
            return config_err(format!(
                "a Hilbert space needs at least 2 levels, got {}",
                labels.len()
            ));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return config_err(format!("duplicate level label \"{a}\""));
            }
        }
        Ok(Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Two-level space with the canonical order (g, e).
    pub fn two_level() -> Self {
        Self::new(&["g", "e"]).unwrap()
    }

    /// Four-level space with the canonical order (g-, g+, e-, e+).
    pub fn four_level() -> Self {
        Self::new(&["g-", "g+", "e-", "e+"]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index of a label, or a config error naming the offending label.
    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or(())
            .or_else(|_| config_err(format!("unknown label {label}")))
    }
}

/// A dense complex matrix over a labeled space.
#[derive(Debug, Clone)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl Operator {
    /// Wrap an explicit matrix; dimensions must match the space.
    pub fn from_matrix(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.shape() != [d, d] {
            return config_err(format!(
                "operator matrix is {:?}, space dimension is {d}",
                matrix.shape()
            ));
        }
        Ok(Self { space, matrix })
    }

    /// The zero operator.
    pub fn zero(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            matrix: Array2::zeros((d, d)),
            space,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Hermitian adjoint.
    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    /// Max entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.space.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= OPERATOR_HERMITICITY_TOL
    }
}

/// `|ket><bra|` over a labeled space: a single unit entry at
/// (index(ket), index(bra)).
pub fn basis_operator(space: &HilbertSpace, ket: &str, bra: &str) -> Result<Operator> {
    let i = space.index(ket)?;
    let j = space.index(bra)?;
    let d = space.dim();
    let mut m = Array2::zeros((d, d));
    m[[i, j]] = C64::new(1.0, 0.0);
    Ok(Operator {
        space: space.clone(),
        matrix: m,
    })
}

/// A state: Hermitian, unit-trace, positive (to numerical floor).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    /// Validate and wrap. Positivity is enforced by assertion with floor
    /// [`DENSITY_POSITIVITY_FLOOR`], not by projection.
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.shape() != [d, d] {
            return config_err(format!(
                "density matrix is {:?}, space dimension is {d}",
                matrix.shape()
            ));
        }
        let mut herm = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                herm = herm.max((matrix[[i, j]] - matrix[[j, i]].conj()).norm());
            }
        }
        if herm > DENSITY_HERMITICITY_TOL {
            return numerical_err(format!(
                "density matrix violates Hermiticity: defect {herm:.3e} > {DENSITY_HERMITICITY_TOL:.0e}"
            ));
        }
        let tr: C64 = (0..d).map(|i| matrix[[i, i]]).sum();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TRACE_TOL {
            return numerical_err(format!(
                "density matrix violates unit trace: trace {tr} (tolerance {DENSITY_TRACE_TOL:.0e})"
            ));
        }
        // Eigenvalues of the Hermitized matrix; floor check.
        let hermitized = (&matrix + &matrix.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
        let (evals, _) = hermitized
            .eigh(UPLO::Lower)
            .map_err(|e| crate::error::Error::Numerical(format!("eigh failed: {e}")))?;
        if let Some(min) = evals.iter().cloned().reduce(f64::min) {
            if min < DENSITY_POSITIVITY_FLOOR {
                return numerical_err(format!(
                    "density matrix violates positivity: eigenvalue {min:.3e} < floor {DENSITY_POSITIVITY_FLOOR:.0e}"
                ));
            }
        }
        Ok(Self { space, matrix })
    }

    /// Projector onto a normalized pure state.
    pub fn from_pure(space: HilbertSpace, psi: &Array1<C64>) -> Result<Self> {
        let d = space.dim();
        if psi.len() != d {
            return config_err(format!("state vector length {} != dim {d}", psi.len()));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return config_err(format!("state vector not normalized: |psi| = {norm}"));
        }
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = psi[i] * psi[j].conj();
            }
        }
        Ok(Self { space, matrix: m })
    }

    /// The fully mixed state I/d.
    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.dim();
        let m = Array2::eye(d).mapv(|z: f64| C64::new(z / d as f64, 0.0));
        Self { space, matrix: m }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }
}

/// `Tr(A rho)`. Real to 1e-10 when `A` is Hermitian.
pub fn expectation(rho: &DensityMatrix, a: &Operator) -> Result<C64> {
    if rho.space() != a.space() {
        return config_err(format!(
            "space mismatch: state on {:?}, operator on {:?}",
            rho.space().labels(),
            a.space().labels()
        ));
    }
    let d = rho.space().dim();
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            tr += a.matrix()[[i, k]] * rho.matrix()[[k, i]];
        }
    }
    Ok(tr)
}

/// Bloch vector (S_x, S_y, S_z) of a designated two-level subspace.
///
/// With `sigma = |lower><upper|` the components are `S_x = <sigma^dag + sigma>`,
/// `S_y = <(sigma - sigma^dag)/i>`, `S_z = <P_upper - P_lower>`; equivalently
/// `S_x = 2 Re rho[u,l]`, `S_y = 2 Im rho[u,l]`, `S_z = rho[u,u] - rho[l,l]`.
pub fn bloch_vector(rho: &DensityMatrix, lower: &str, upper: &str) -> Result<(f64, f64, f64)> {
    let l = rho.space().index(lower)?;
    let u = rho.space().index(upper)?;
    let m = rho.matrix();
    let s_x = 2.0 * m[[u, l]].re;
    let s_y = 2.0 * m[[u, l]].im;
    let s_z = m[[u, u]].re - m[[l, l]].re;
    Ok((s_x, s_y, s_z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn space_rejects_duplicates_and_tiny_dims() {
        assert!(HilbertSpace::new(&["g", "g"]).is_err());
        assert!(HilbertSpace::new(&["g"]).is_err());
        assert_eq!(HilbertSpace::four_level().dim(), 4);
    }

    #[test]
    fn basis_operator_is_single_unit_entry() {
        let sp = HilbertSpace::two_level();
        let sigma = basis_operator(&sp, "g", "e").unwrap();
        assert_eq!(sigma.matrix()[[0, 1]], c(1.0, 0.0));
        assert_eq!(sigma.matrix()[[0, 0]], c(0.0, 0.0));
        assert_eq!(sigma.matrix()[[1, 0]], c(0.0, 0.0));

        let sp4 = HilbertSpace::four_level();
        let sigma2 = basis_operator(&sp4, "g+", "e+").unwrap();
        let total: f64 = sigma2.matrix().iter().map(|z| z.norm()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 0.0);
        assert_eq!(sigma2.matrix()[[1, 3]], c(1.0, 0.0));
    }

    #[test]
    fn basis_operator_unknown_label_names_it() {
        let sp = HilbertSpace::two_level();
        let err = basis_operator(&sp, "x", "e").unwrap_err();
        assert!(err.to_string().contains("unknown label x"), "{err}");
    }

    #[test]
    fn dagger_of_basis_operator_swaps_labels_exactly() {
        let sp = HilbertSpace::four_level();
        for (a, b) in [("g-", "e+"), ("g+", "e-"), ("g-", "g+")] {
            let lhs = basis_operator(&sp, a, b).unwrap().dagger();
            let rhs = basis_operator(&sp, b, a).unwrap();
            assert_eq!(lhs.matrix(), rhs.matrix());
        }
    }

    #[test]
    fn expectation_ground_state_sigma_z() {
        let sp = HilbertSpace::two_level();
        let rho = DensityMatrix::new(
            sp.clone(),
            array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
        )
        .unwrap();
        // sigma_z = P_e - P_g
        let sz = Operator::from_matrix(
            sp,
            array![[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        )
        .unwrap();
        let v = expectation(&rho, &sz).unwrap();
        assert_abs_diff_eq!(v.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expectation_mixed_state_sigma_vanishes() {
        let sp = HilbertSpace::two_level();
        let rho = DensityMatrix::maximally_mixed(sp.clone());
        let sigma = basis_operator(&sp, "g", "e").unwrap();
        assert_abs_diff_eq!(expectation(&rho, &sigma).unwrap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expectation_rejects_space_mismatch() {
        let rho = DensityMatrix::maximally_mixed(HilbertSpace::two_level());
        let a = Operator::zero(HilbertSpace::four_level());
        assert!(expectation(&rho, &a).is_err());
    }

    #[test]
    fn bloch_vector_cardinal_states() {
        let sp = HilbertSpace::two_level();
        let ground = DensityMatrix::from_pure(sp.clone(), &array![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(bloch_vector(&ground, "g", "e").unwrap(), (0.0, 0.0, -1.0));

        let s = 1.0 / 2f64.sqrt();
        let plus = DensityMatrix::from_pure(sp.clone(), &array![c(s, 0.0), c(s, 0.0)]).unwrap();
        let (x, y, z) = bloch_vector(&plus, "g", "e").unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z, 0.0, epsilon = 1e-15);

        let plus_i = DensityMatrix::from_pure(sp, &array![c(s, 0.0), c(0.0, s)]).unwrap();
        let (x, y, z) = bloch_vector(&plus_i, "g", "e").unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn bloch_vector_length_bounded_for_random_states() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let sp = HilbertSpace::two_level();
        for _ in 0..100 {
            let raw: Vec<C64> = (0..2)
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let psi = Array1::from_vec(raw.iter().map(|z| z / norm).collect());
            let rho = DensityMatrix::from_pure(sp.clone(), &psi).unwrap();
            let (x, y, z) = bloch_vector(&rho, "g", "e").unwrap();
            assert!(x * x + y * y + z * z <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn expectation_hermitian_is_real_for_random_states() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let sp = HilbertSpace::four_level();
        for _ in 0..50 {
            let raw: Vec<C64> = (0..4)
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let psi = Array1::from_vec(raw.iter().map(|z| z / norm).collect());
            let rho = DensityMatrix::from_pure(sp.clone(), &psi).unwrap();
            // random Hermitian operator
            let mut m = Array2::zeros((4, 4));
            for i in 0..4 {
                for j in 0..=i {
                    let z = c(rng.gen::<f64>() - 0.5, if i == j { 0.0 } else { rng.gen::<f64>() - 0.5 });
                    m[[i, j]] = z;
                    m[[j, i]] = z.conj();
                }
            }
            let a = Operator::from_matrix(sp.clone(), m).unwrap();
            assert!(a.is_hermitian());
            assert!(expectation(&rho, &a).unwrap().im.abs() < 1e-10);
        }
    }

    #[test]
    fn density_matrix_rejects_bad_trace_and_negativity() {
        let sp = HilbertSpace::two_level();
        let bad_trace = array![[c(0.9, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(DensityMatrix::new(sp.clone(), bad_trace).is_err());

        let negative = array![[c(1.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.5, 0.0)]];
        assert!(DensityMatrix::new(sp, negative).is_err());
    }
}

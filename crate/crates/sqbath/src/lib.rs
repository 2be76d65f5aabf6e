//! Driven two-level atom in a broadband squeezed vacuum, and the four-level
//! Raman system that mimics it in ordinary vacuum.
//!
//! The crate builds Lindblad master equations for three related models —
//! a two-level atom coupled to a squeezed reservoir, a driven four-level
//! atom whose two ground states see engineered Raman couplings, and the
//! effective two-level ground-state model obtained by adiabatically
//! eliminating the excited states — and provides the machinery to compare
//! them: steady states, Liouvillian eigenmode analysis, emission and
//! absorption spectra via the quantum regression theorem, closed-form
//! linewidth tables, and Monte Carlo wave-function trajectories.
//!
//! Modules:
//! - [`hilbert`]: labeled spaces, operators, density matrices, Bloch vectors.
//! - [`models`]: the three master-equation builders and the parameter map
//!   linking them, plus a four-level interference model for cross-decay.
//! - [`liouville`]: superoperator assembly, steady states, time evolution,
//!   eigenmode linewidths, Mollow-triplet mode identification.
//! - [`correlations`]: two-time correlations and spectra via the resolvent,
//!   with a direct Fourier-transform cross-check.
//! - [`analytics`]: closed-form Bloch relaxation rates, triplet linewidth
//!   formulas, and the interference-suppressed cross-decay rate.
//! - [`trajectories`]: seeded, reproducible quantum-jump unravelling.
//! - [`experiments`]: named, parameterized experiment presets with CSV and
//!   JSON summary outputs.
//! - [`cli`]: the `sqbath` command-line front end.

pub mod analytics;
pub mod cli;
pub mod correlations;
pub mod error;
mod expm;
pub mod experiments;
pub mod hilbert;
pub mod liouville;
pub mod models;
mod parallel;
pub mod trajectories;

pub use error::{Error, Result};
pub use hilbert::{basis_operator, bloch_vector, expectation, DensityMatrix, HilbertSpace, Operator};

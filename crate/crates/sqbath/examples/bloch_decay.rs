//! Decay of the Bloch vector in a broadband squeezed reservoir.
//!
//! Squeezing splits the transverse relaxation into two rates: the
//! quadrature aligned with the quiet reservoir noise decays at
//! `gamma_x = gamma (N + 1/2 - M)`, the noisy one at
//! `gamma_y = gamma (N + 1/2 + M)`, and the inversion at
//! `gamma_z = gamma (2N + 1)`.  With maximal squeezing
//! (`M^2 = N(N+1)`) the quiet rate collapses toward `gamma/(8N)` —
//! far below the ordinary-vacuum value `gamma/2`.
//!
//! Run with: `cargo run --example bloch_decay`

use sqbath::analytics::bloch_decay_rates;
use sqbath::liouville::{build_liouvillian, evolve};
use sqbath::models::{squeezed_bath_master, SqueezedBathParams};
use sqbath::{bloch_vector, DensityMatrix, HilbertSpace};

use ndarray::array;
use num_complex::Complex64 as C64;

fn main() -> sqbath::Result<()> {
    let p = SqueezedBathParams::maximal(1.0, 1.0, 0.0)?;
    let (gx, gy, gz) = bloch_decay_rates(&p)?;
    println!("squeezed reservoir: gamma = {}, N = {}, M = {:.6}", p.gamma, p.n, p.m);
    println!("analytic rates: gamma_x = {gx:.6}  gamma_y = {gy:.6}  gamma_z = {gz:.6}");
    println!("ordinary vacuum would give gamma/2 = 0.5 for both transverse rates\n");

    // evolve a transverse superposition and compare against pure exponentials
    let space = HilbertSpace::two_level();
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let psi = array![C64::new(amp, 0.0), C64::new(amp, 0.0)]; // S_x = 1
    let rho0 = DensityMatrix::from_pure(space, &psi)?;
    let l = build_liouvillian(&squeezed_bath_master(&p, None)?);

    let times: Vec<f64> = (0..=6).map(|k| 2.0 * k as f64).collect();
    let states = evolve(&l, &rho0, &times)?;
    println!("{:>6}  {:>12}  {:>12}", "t", "S_x(t)", "exp(-gamma_x t)");
    for (t, rho) in times.iter().zip(&states) {
        let (sx, _, _) = bloch_vector(rho, "g", "e")?;
        println!("{t:>6.1}  {sx:>12.6}  {:>12.6}", (-gx * t).exp());
    }

    println!("\nquiet-quadrature rate vs the strong-squeezing asymptote gamma/(8N):");
    println!("{:>8}  {:>12}  {:>12}  {:>8}", "N", "gamma_x", "gamma/(8N)", "ratio");
    for n in [1.0, 10.0, 100.0] {
        let p = SqueezedBathParams::maximal(1.0, n, 0.0)?;
        let (gx, _, _) = bloch_decay_rates(&p)?;
        let asymptote = 1.0 / (8.0 * n);
        println!("{n:>8.0}  {gx:>12.6e}  {asymptote:>12.6e}  {:>8.4}", gx / asymptote);
    }
    Ok(())
}

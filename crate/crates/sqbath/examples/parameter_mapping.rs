//! The four-level atom as a synthetic squeezed reservoir.
//!
//! A Raman-driven four-level atom whose excited states decay back into a
//! ground doublet realizes, after adiabatic elimination, exactly the
//! master equation of a two-level atom in a broadband squeezed bath.  The
//! dictionary is
//!
//! ```text
//! gamma = (eps_+^2 - eps_-^2) Omega^2 / Gamma
//! N     = eps_-^2 / (eps_+^2 - eps_-^2)
//! M     = eps_- eps_+ / (eps_+^2 - eps_-^2)
//! phi   = phi_L
//! ```
//!
//! and the normalization `eps_+^2 + eps_-^2 = 1` forces `M^2 = N(N+1)`:
//! the synthetic bath is always maximally squeezed.
//!
//! Run with: `cargo run --example parameter_mapping`

use sqbath::liouville::build_liouvillian;
use sqbath::models::{
    effective_ground_master, inverse_map, map_parameters, squeezed_bath_master, FourLevelParams,
};

fn main() -> sqbath::Result<()> {
    // ask for photon number N = 0.5 at unit decay rate, pump Gamma = 10^4
    let (n_target, gamma_target, gamma_up) = (0.5, 1.0, 1.0e4);
    let (eps_plus, eps_minus, omega) = inverse_map(n_target, gamma_target, gamma_up)?;
    println!("target: N = {n_target}, gamma = {gamma_target}, Gamma = {gamma_up}");
    println!("drive recipe: eps_+ = {eps_plus:.6}, eps_- = {eps_minus:.6}, Omega = {omega:.3}");
    println!("adiabatic ratio Omega/Gamma = {:.4}\n", omega / gamma_up);

    let params = FourLevelParams::new(
        gamma_up, omega, eps_plus, eps_minus, 0.3, 1.0, 0.0, None,
    )?;
    let bath = map_parameters(&params)?;
    println!("mapped bath: gamma = {:.6}, N = {:.6}, M = {:.6}, phi = {:.3}", bath.gamma, bath.n, bath.m, bath.phi);
    println!(
        "maximal-squeezing identity: M^2 = {:.12}, N(N+1) = {:.12}",
        bath.m * bath.m,
        bath.n * (bath.n + 1.0)
    );

    // the effective ground-doublet generator IS the squeezed-bath generator
    let l_eff = build_liouvillian(&effective_ground_master(&params)?);
    let l_map = build_liouvillian(&squeezed_bath_master(&bath, None)?);
    let gap = l_eff
        .matrix()
        .iter()
        .zip(l_map.matrix().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    println!("\nlargest entrywise gap between the two generators: {gap:.3e}");
    Ok(())
}

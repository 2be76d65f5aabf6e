//! Weak-probe absorption of the driven synthetic squeezed-bath atom.
//!
//! The absorption profile `W(omega)` of a weak probe is the transform of
//! the commutator correlation `<[sigma(tau), sigma^dag(0)]>`: positive
//! where the probe is absorbed, negative where it is amplified.  With the
//! squeezing phase at 0 the central line is a narrow absorptive peak
//! whose half-width matches the subnatural fluorescence line, flanked by
//! gain regions between the triplet lines; at phase pi even the center
//! shows stimulated emission.
//!
//! Run with: `cargo run --example absorption_spectrum`

use sqbath::correlations::absorption_spectrum;
use sqbath::liouville::{build_liouvillian, steady_state};
use sqbath::models::{effective_ground_master, inverse_map, DriveParams, FourLevelParams};

fn model(phi: f64) -> sqbath::Result<FourLevelParams> {
    let gamma_up = 3.0e4;
    let (eps_plus, eps_minus, omega) = inverse_map(1.0, 1.0, gamma_up)?;
    FourLevelParams::new(
        gamma_up,
        omega,
        eps_plus,
        eps_minus,
        phi,
        1.0,
        0.0,
        Some(DriveParams::new(7.1, 0.0)?),
    )
}

fn main() -> sqbath::Result<()> {
    let omegas: Vec<f64> = (-20..=20).map(|k| 0.5 * k as f64).collect();
    for phi in [0.0, std::f64::consts::PI] {
        let params = model(phi)?;
        let l = build_liouvillian(&effective_ground_master(&params)?);
        let rho = steady_state(&l)?;
        let spectrum = absorption_spectrum(&l, &rho, &omegas)?;

        println!("squeezing phase phi = {phi:.3}");
        println!("{:>8}  {:>12}  sign", "omega", "W(omega)");
        for (o, v) in omegas.iter().zip(spectrum.values()) {
            let sign = if *v > 0.0 { "absorption" } else { "gain" };
            println!("{o:>8.1}  {v:>12.5}  {sign}");
        }
        let center = spectrum.values()[(omegas.len() - 1) / 2];
        let min = spectrum
            .values()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        println!("center W(0) = {center:.5}, strongest gain = {min:.5}\n");
    }
    Ok(())
}

//! Phase sensitivity of the driven steady state.
//!
//! A two-level atom driven by a laser and damped by a squeezed reservoir
//! reaches a steady state that depends on the relative phase between
//! squeezing and drive — unlike a thermal reservoir, which forgets every
//! phase.  In the four-level realization the laser phase `phi_L` plays
//! the squeezing-phase role, and imperfect branching (`g_l < 1`, which
//! switches on the incoherent cross channel) erodes the phase contrast.
//!
//! Run with: `cargo run --example steady_state_sweep`

use sqbath::liouville::{build_liouvillian, steady_state};
use sqbath::models::{effective_ground_master, inverse_map, DriveParams, FourLevelParams};
use sqbath::bloch_vector;

fn main() -> sqbath::Result<()> {
    let (n, gamma_up, omega_d) = (2.1, 1.0e4, 5.1);
    let (eps_plus, eps_minus, omega) = inverse_map(n, 1.0, gamma_up)?;
    let phis: Vec<f64> = (0..13)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 12.0)
        .collect();

    println!("steady-state S_x vs squeezing phase (N = {n}, Omega_D = {omega_d} gamma)\n");
    print!("{:>8}", "phi/pi");
    for g_l in [1.0, 0.99, 0.95, 0.9] {
        print!("  g_l={g_l:<6}");
    }
    println!();

    let mut contrasts = Vec::new();
    for g_l in [1.0, 0.99, 0.95, 0.9] {
        let mut series = Vec::new();
        for &phi in &phis {
            let params = FourLevelParams::new(
                gamma_up,
                omega,
                eps_plus,
                eps_minus,
                phi,
                g_l,
                (1.0 - g_l * g_l).max(0.0).sqrt(),
                Some(DriveParams::new(omega_d, 0.0)?),
            )?;
            let l = build_liouvillian(&effective_ground_master(&params)?);
            let (sx, _, _) = bloch_vector(&steady_state(&l)?, "g-", "g+")?;
            series.push(sx);
        }
        contrasts.push((g_l, series));
    }
    for (i, &phi) in phis.iter().enumerate() {
        print!("{:>8.3}", phi / std::f64::consts::PI);
        for (_, series) in &contrasts {
            print!("  {:>10.5}", series[i]);
        }
        println!();
    }

    println!("\nphase contrast of S_x (max - min):");
    for (g_l, series) in &contrasts {
        let max = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = series.iter().cloned().fold(f64::INFINITY, f64::min);
        println!("  g_l = {g_l:<5} contrast = {:.5}", max - min);
    }
    Ok(())
}

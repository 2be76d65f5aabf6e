//! Subnatural triplet lines of a strongly driven atom in squeezed vacuum.
//!
//! Under a strong resonant drive the fluorescence splits into a triplet
//! at detunings `{0, ±Omega_D}`.  A squeezed reservoir makes the line
//! half-widths phase-sensitive: at squeezing phase `phi = 0` the center
//! line narrows to `gamma (N + 1/2 - M)` — far below the ordinary-vacuum
//! half-width — while the sidebands broaden; at `phi = pi` the center
//! broadens instead and the sidebands narrow.  The widths here come from
//! the eigenvalue spectrum of the full generator, checked against the
//! closed forms.
//!
//! Run with: `cargo run --example mollow_linewidths`

use sqbath::analytics::mollow_linewidths;
use sqbath::liouville::{build_liouvillian, eigenmodes, mollow_modes};
use sqbath::models::{squeezed_bath_master, DriveParams, SqueezedBathParams};

fn main() -> sqbath::Result<()> {
    let omega_d = 50.0;
    println!("triplet half-widths at Omega_D = {omega_d} gamma, N = 1, maximal M\n");
    println!(
        "{:>8}  {:>16}  {:>16}  {:>16}  {:>16}",
        "phi", "center (eigen)", "center (form)", "sideband (eigen)", "sideband (form)"
    );
    for phi in [0.0, std::f64::consts::PI] {
        let bath = SqueezedBathParams::maximal(1.0, 1.0, phi)?;
        let l = build_liouvillian(&squeezed_bath_master(
            &bath,
            Some(DriveParams::new(omega_d, 0.0)?),
        )?);
        let triplet = mollow_modes(&eigenmodes(&l)?, omega_d)?;
        let (center, sideband) = mollow_linewidths(&bath, phi, 1.0)?;
        println!(
            "{:>8.4}  {:>16.6}  {:>16.6}  {:>16.6}  {:>16.6}",
            phi,
            triplet.center.halfwidth,
            center,
            triplet.sidebands.1.halfwidth,
            sideband
        );
        println!(
            "{:>8}  positions: center {:+.4}, sidebands {:+.4} / {:+.4}",
            "",
            triplet.center.position,
            triplet.sidebands.0.position,
            triplet.sidebands.1.position
        );
    }
    println!("\nordinary vacuum for comparison: center gamma/2 = 0.5, sidebands 3 gamma/4 = 0.75");
    Ok(())
}

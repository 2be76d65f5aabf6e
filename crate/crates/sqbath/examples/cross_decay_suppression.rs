//! Suppressing the parasitic cross channel by detuning interference.
//!
//! The incoherent cross channel (`g+ <- e, a` population transfer) spoils
//! the synthetic squeezed bath.  Its rate is a coherent sum of two
//! scattering amplitudes,
//!
//! ```text
//! rate ∝ | gc_e^2 Gamma_e / (Delta_e - i Gamma_e/2)
//!        - gc_a^2 Gamma_a / (Delta_a - i Gamma_a/2) |^2 ,
//! ```
//!
//! which vanishes to leading order when the detunings satisfy
//! `Delta_e / Delta_a = gc_e^2 Gamma_e / (gc_a^2 Gamma_a)`.  The residual
//! rate at the optimum scales as `(Gamma/Delta)^2`: two orders of
//! magnitude for `Gamma/Delta = 0.05`.  A small auxiliary master-equation
//! model reproduces the same rate without the formula.
//!
//! Run with: `cargo run --example cross_decay_suppression`

use sqbath::analytics::{cross_decay_rate, extracted_cross_decay_rate, optimal_detuning_ratio};
use sqbath::models::SubsystemParams;

fn main() -> sqbath::Result<()> {
    let base = SubsystemParams {
        gamma_e: 1.0,
        gamma_a: 1.5,
        delta_e: 30.0,
        delta_a: 30.0,
        gc_e: (2.0f64 / 3.0).sqrt(),
        gc_a: (1.0f64 / 3.0).sqrt(),
        prefactor: 1.0,
    };
    let opt = optimal_detuning_ratio(&base)?;
    println!("optimal detuning ratio Delta_e/Delta_a = {opt:.6} (here 4/3)\n");

    println!(
        "{:>12}  {:>14}  {:>14}  {:>12}",
        "Gamma/Delta", "rate(optimal)", "rate(equal)", "suppression"
    );
    let mut last: Option<(f64, f64)> = None;
    for width_over_detuning in [0.01, 0.02, 0.05, 0.1] {
        let delta_a = base.gamma_a / width_over_detuning;
        let optimal = cross_decay_rate(&SubsystemParams {
            delta_a,
            delta_e: opt * delta_a,
            ..base
        })?;
        let equal = cross_decay_rate(&SubsystemParams {
            delta_a,
            delta_e: delta_a,
            ..base
        })?;
        println!(
            "{width_over_detuning:>12}  {optimal:>14.6e}  {equal:>14.6e}  {:>12.1}",
            equal / optimal
        );
        if let Some((w0, r0)) = last {
            let slope = ((optimal / equal) / r0).ln() / (width_over_detuning / w0).ln();
            println!("{:>12}  log-log slope of the residual vs Gamma/Delta: {slope:.3}", "");
        }
        last = Some((width_over_detuning, optimal / equal));
    }

    println!("\nformula vs master-equation extraction at equal detunings:");
    let formula = cross_decay_rate(&base)?;
    let extracted = extracted_cross_decay_rate(&base, 0.02)?;
    println!("  closed form  rate = {formula:.6e}");
    println!("  extracted    rate = {extracted:.6e}");
    println!("  relative gap      = {:.3e}", (extracted - formula).abs() / formula);
    Ok(())
}

//! Inspect the Beta prior, its logit-normal approximation, and the exact vs
//! approximate one- and two-observation posteriors, to choose epsilon and
//! the observation strength s before fitting anything.
//!
//! Run with: cargo run --example prior_inspection

use gpp::beta_gp::prior_inspect;

fn main() -> gpp::Result<()> {
    let epsilon = 0.1;
    let strength = 5.0;
    let curves = prior_inspect(epsilon, epsilon, strength, 9)?;

    println!("epsilon = {epsilon}, s = {strength}");
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "y", "Beta prior", "approx", "Beta 1 neg", "probe 1 neg", "Beta +/-", "probe +/-"
    );
    for i in 0..curves.y.len() {
        println!(
            "{:>6.3} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            curves.y[i],
            curves.beta_prior[i],
            curves.approx_prior[i],
            curves.beta_one_negative[i],
            curves.gp_one_negative[i],
            curves.beta_pos_neg_pair[i],
            curves.gp_pos_neg_pair[i],
        );
    }
    println!();
    println!("The approximation is coarse at the prior (it cannot reproduce the");
    println!("Beta spikes at 0 and 1) but tracks the exact posteriors once");
    println!("observations arrive; larger s makes single observations stronger.");
    Ok(())
}

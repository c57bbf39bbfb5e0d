//! The trace seminorm Q(alpha) of 1 - x^alpha by quadrature, checked
//! against importance-sampled Monte Carlo.

use std::error::Error;

use singleslip::analysis::{q_alpha, q_alpha_cross, q_alpha_monte_carlo, q_alpha_reflected};

fn main() -> Result<(), Box<dyn Error>> {
    println!("{:>5}  {:>12}  {:>12}  {:>12}  {:>22}", "alpha", "Q", "cross", "reflected", "Monte Carlo (1e6)");
    for (k, a) in [1.0, 0.5, 0.2, 0.1, 0.05, 0.01].into_iter().enumerate() {
        let mc = q_alpha_monte_carlo(a, 1_000_000, 11 + k as u64, false)?;
        println!(
            "{a:>5}  {:>12.8}  {:>12.8}  {:>12.8}  {:>12.8} +- {:.1e}",
            q_alpha(a)?,
            q_alpha_cross(a)?,
            q_alpha_reflected(a)?,
            mc.mean,
            mc.std_error
        );
    }
    Ok(())
}

//! Log-gamma, digamma, trigamma and the digamma inverse.
use pym_entropy::special::{digamma, inverse_digamma, log_beta, log_gamma, trigamma, EULER_GAMMA};

fn main() -> pym_entropy::Result<()> {
    println!("{:>8} {:>20} {:>20} {:>20}", "x", "ln Γ(x)", "ψ0(x)", "ψ1(x)");
    for x in [1e-6, 0.5, 1.0, 2.5, 10.0, 1e6] {
        println!("{x:>8} {:>20.15} {:>20.15} {:>20.15}", log_gamma(x)?, digamma(x)?, trigamma(x)?);
    }
    println!("ψ0(1) + γ = {:e}", digamma(1.0)? + EULER_GAMMA);
    let y = 3.0;
    let x = inverse_digamma(y)?;
    println!("ψ0⁻¹({y}) = {x}, ψ0 of that = {}", digamma(x)?);
    println!("ln B(0.5, 0.5) = {} (ln π = {})", log_beta(0.5, 0.5)?, std::f64::consts::PI.ln());
    Ok(())
}

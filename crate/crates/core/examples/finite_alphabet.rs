//! Plugin, Miller-Madow, NSB and asymptotic NSB on the same undersampled data.
use pym_entropy::dirichlet::{ansb_estimate, miller_madow, nsb_estimate, plugin_entropy};
use pym_entropy::synthetic::{build, DistSpec};
use pym_entropy::RngSeed;

fn main() -> pym_entropy::Result<()> {
    let dist = build(DistSpec::Uniform { size: 500 }, RngSeed(0))?;
    println!("true entropy {:.4} nats", dist.true_entropy);
    for n in [50u64, 200, 1000, 5000] {
        let c = dist.draw_counts(n, RngSeed(n));
        let nsb = nsb_estimate(&c, 500)?;
        let ansb = ansb_estimate(&c).map(|e| format!("{:.4}", e.mean)).unwrap_or_else(|e| e.to_string());
        println!(
            "N={n:>5} K={:>4}  plugin {:.4}  mima {:.4}  nsb {:.4} ± {:.4}  ansb {ansb}",
            c.k(),
            plugin_entropy(&c)?,
            miller_madow(&c)?,
            nsb.mean,
            nsb.std.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}

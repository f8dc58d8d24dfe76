//! Building count data from raw samples and summarizing it by multiplicities.
use pym_entropy::{CountData, Multiplicities};

fn main() -> pym_entropy::Result<()> {
    let text = "it was the best of times it was the worst of times";
    let c = CountData::from_samples(text.split_whitespace());
    println!("N = {}, K = {}, coincidences = {}", c.n(), c.k(), c.coincidences());
    for (sym, n) in c.iter() {
        println!("  {sym:>6} {n}");
    }

    let m = c.to_multiplicities();
    println!("frequency profile:");
    for (k, mk) in m.iter() {
        println!("  {mk} symbol(s) seen {k} time(s)");
    }

    // A large summary table needs no raw data.
    let big = Multiplicities::from_pairs([(1, 12_000), (2, 3_100), (3, 900), (50, 4)])?;
    println!("table: N = {}, K = {}", big.n(), big.k());
    Ok(())
}

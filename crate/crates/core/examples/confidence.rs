//! Exact binomial intervals for split accuracies.

use rasp_recogs::score::clopper_pearson;

fn main() -> anyhow::Result<()> {
    for (k, n) in [(3000, 3000), (1000, 1000), (922, 1000), (0, 20)] {
        let (lo, hi) = clopper_pearson(k, n, 0.05)?;
        println!(
            "{k:>4}/{n:<4} {:6.2}%  [{:.4}, {:.4}]",
            100.0 * k as f64 / n as f64,
            lo,
            hi
        );
    }
    Ok(())
}

//! Finite closed-form lower bounds and their limits, exported as CSV.

use pcsf::cli::{export_plot_data, PlotRow};
use pcsf::decomposition::{bound_alpha, bound_alpha_limit, bound_beta, bound_beta_limit};
use pcsf::rational::{fmt_rational, to_f64};

fn main() -> pcsf::Result<()> {
    println!("alpha limit {}", fmt_rational(&bound_alpha_limit()));
    for (n, k) in [(4, 1), (100, 5), (1_000_000, 100), (1_000_000_000, 100)] {
        let b = bound_alpha(n, k)?;
        println!("alpha bound n={n} k={k}: {:.9}", to_f64(&b));
    }
    for l in [3, 4, 6, 12] {
        println!("beta limit l={l}: {} (n=10^6, k=50: {:.6})", fmt_rational(&bound_beta_limit(l)?), to_f64(&bound_beta(l, 1_000_000, 50)?));
    }
    let mut rows = Vec::new();
    for k in 0..=20u32 {
        let n = 1_000u64;
        rows.push(PlotRow { n: Some(n), k: Some(k), bound: Some(fmt_rational(&bound_alpha(n, k)?)), ..PlotRow::default() });
    }
    let path = std::env::temp_dir().join("pcsf_alpha_curve.csv");
    export_plot_data(&rows, &path)?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

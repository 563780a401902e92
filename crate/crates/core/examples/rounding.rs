//! Rounds an optimal cut LP point on a random instance with each method and
//! compares the objective against the guarantee.

use pcsf::cutlp::{solve_lp, LpMode};
use pcsf::instances::{random_instance, RandomSpec};
use pcsf::rational::{fmt_rational, int, rat};
use pcsf::rounding::{best_threshold_round, gw_with_dual, mu_bound, threshold_bound, threshold_round};

fn main() -> pcsf::Result<()> {
    let spec = RandomSpec { nodes: 8, max_edges: 14, pairs: 4, ..RandomSpec::default() };
    let inst = random_instance(&spec, 7)?;
    let lp = solve_lp(&inst, LpMode::Exact)?;
    println!("LP value {}", fmt_rational(&lp.value));

    let theta = rat(1, 3);
    let t = threshold_round(&inst, &lp.solution, &theta)?;
    println!("threshold 1/3: {} (guarantee {} x LP)", fmt_rational(&t.objective()), fmt_rational(&threshold_bound(&theta)));

    let (best, how) = best_threshold_round(&inst, &lp.solution)?;
    println!("best threshold: {} via {:?}", fmt_rational(&best.objective()), how);

    let all: Vec<usize> = (0..inst.pair_count()).collect();
    let (forest, dual) = gw_with_dual(&inst, &all)?;
    let cost: pcsf::Rational = forest.iter().map(|e| inst.costs[e].clone()).sum();
    println!("moat growing on all pairs: cost {} dual {} (cost <= 2 dual: {})", fmt_rational(&cost), fmt_rational(&dual), cost <= int(2) * &dual);

    let (mu, p) = mu_bound(&rat(1, 3))?;
    println!("two-value guarantee at gamma 1/3: {} with p = {}", fmt_rational(&mu), fmt_rational(&p));
    Ok(())
}

//! Finds the smallest scaling of a fractional point that dominates a convex
//! combination of integral solutions, then turns the dual into an instance
//! whose LP value is at most 1 and whose integral optimum is that scaling.

use pcsf::cutlp::{solve_lp, LpMode};
use pcsf::decomposition::{min_alpha, witness_costs_from_dual};
use pcsf::exact::solve_ip;
use pcsf::graph::named;
use pcsf::instances::{FracSolution, PcsfInstance, PointMode};
use pcsf::rational::{fmt_rational, int, rat};
use pcsf::Penalty;

fn main() -> pcsf::Result<()> {
    let inst = PcsfInstance::new(named::complete(3), vec![int(1); 3], vec![(0, 1)], vec![Penalty::Finite(int(1))])?;
    let point = FracSolution { x: vec![rat(1, 3); 3], z: vec![rat(1, 3)] };
    let dec = min_alpha(&inst, &point)?;
    println!("alpha* = {} using {} columns", fmt_rational(&dec.value), dec.columns);
    for (forest, w) in dec.distribution.entries() {
        println!("  weight {} on edges {:?}", fmt_rational(w), forest.as_slice());
    }
    println!("dual at the point: {}", fmt_rational(&dec.witness.value_at(&point)));
    let witness = witness_costs_from_dual(&inst, &dec.witness, PointMode::Gap, &dec.value)?;
    let lp = solve_lp(&witness, LpMode::Exact)?;
    let ip = solve_ip(&witness)?;
    println!("witness instance: LP {} IP {}", fmt_rational(&lp.value), fmt_rational(&ip.objective()));
    Ok(())
}

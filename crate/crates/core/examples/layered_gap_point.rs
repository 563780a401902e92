//! Generates the layered K4 construction, checks its canonical gap point
//! against the full cut LP, and compares LP and integral optima on a small copy.

use pcsf::cutlp::{check_feasible, solve_lp, LpMode};
use pcsf::exact::solve_ip;
use pcsf::instances::{build_layered, canonical_point, layered_instance, make_base, BaseKind, CostScheme, PointMode, DEFAULT_NODE_CAP};
use pcsf::rational::fmt_rational;

fn main() -> pcsf::Result<()> {
    let base = make_base(&BaseKind::K4)?;
    for (m, k) in [(2, 0), (4, 0), (4, 1)] {
        let lc = build_layered(&base, m, k, DEFAULT_NODE_CAP)?;
        let inst = layered_instance(&lc, &CostScheme::Unit)?;
        let point = canonical_point(&lc, PointMode::Gap)?;
        let ok = check_feasible(&inst, &point)?.is_feasible();
        println!(
            "m={m} k={k}: {} nodes {} edges {} pairs, gap point feasible: {ok}, LP objective {}",
            inst.graph.node_count(),
            inst.edge_count(),
            inst.pair_count(),
            fmt_rational(&inst.lp_objective(&point))
        );
    }
    let lc = build_layered(&base, 2, 0, DEFAULT_NODE_CAP)?;
    let inst = layered_instance(&lc, &CostScheme::Unit)?;
    let lp = solve_lp(&inst, LpMode::Exact)?;
    let ip = solve_ip(&inst)?;
    println!("m=2 k=0 unit costs: LP {} IP {}", fmt_rational(&lp.value), fmt_rational(&ip.objective()));
    Ok(())
}

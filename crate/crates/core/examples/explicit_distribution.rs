//! Writes down the mixture of replicated spanning trees and one tree of the
//! whole graph, then checks its marginals exactly at several factors.

use pcsf::decomposition::{explicit_gap_distribution, verify_distribution};
use pcsf::instances::{build_layered, canonical_point, layered_instance, make_base, BaseKind, CostScheme, PointMode, DEFAULT_NODE_CAP};
use pcsf::rational::{fmt_rational, rat};

fn main() -> pcsf::Result<()> {
    let lc = build_layered(&make_base(&BaseKind::K4)?, 4, 1, DEFAULT_NODE_CAP)?;
    let inst = layered_instance(&lc, &CostScheme::Unit)?;
    let point = canonical_point(&lc, PointMode::Gap)?;
    let alpha = rat(9, 4);
    let dist = explicit_gap_distribution(&lc, &alpha)?;
    println!("support size {}", dist.len());
    for f in [rat(2, 1), rat(15, 8), rat(9, 4)] {
        let r = verify_distribution(&inst, &point, &dist, PointMode::Gap, &f)?;
        println!("checked at {}: passes {}", fmt_rational(&f), r.passes);
    }
    let r = verify_distribution(&inst, &point, &dist, PointMode::Gap, &alpha)?;
    let max = r.marginals.iter().max().cloned().unwrap_or_default();
    println!("largest edge marginal {}", fmt_rational(&max));
    if let (Some(e), Some(p)) = (&r.worst_edge_ratio, &r.worst_pair_ratio) {
        println!("smallest passing factor: edges {} pairs {}", fmt_rational(e), fmt_rational(p));
    }
    Ok(())
}

//! Follows witness nodes down the layered construction under the explicit
//! distribution and checks the step, joint and recursive inequalities exactly.

use pcsf::decomposition::{chain_trace, explicit_gap_distribution};
use pcsf::instances::{build_layered, make_base, BaseKind, DEFAULT_NODE_CAP};
use pcsf::rational::{fmt_rational, rat};

fn main() -> pcsf::Result<()> {
    let lc = build_layered(&make_base(&BaseKind::K4)?, 4, 1, DEFAULT_NODE_CAP)?;
    let alpha = rat(9, 4);
    let dist = explicit_gap_distribution(&lc, &alpha)?;
    let trace = chain_trace(&lc, &dist, &alpha)?;
    for s in &trace.steps {
        println!(
            "j={} node {} leaf {} contained {} | root {} parent {} joint {} | {} {} {}",
            s.j,
            lc.node_name(s.witness.node),
            fmt_rational(&s.witness.p_leaf),
            fmt_rational(&s.witness.p_contained),
            fmt_rational(&s.p_root),
            fmt_rational(&s.p_parent),
            fmt_rational(&s.p_joint),
            s.step_bound,
            s.joint_bound,
            s.recursion
        );
    }
    if let Some(why) = &trace.truncated {
        println!("stopped early: {why}");
    }
    println!("all inequalities hold: {}", trace.holds);
    Ok(())
}

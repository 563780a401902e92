//! Decompositions where penalties must be dominated without scaling: the
//! smallest edge factor by column generation, the packing value around it,
//! and the closed-form mixture for points with two z values.

use pcsf::decomposition::{feasibility_at_beta, min_beta, two_value_lmp_distribution, verify_distribution};
use pcsf::graph::named;
use pcsf::instances::{FracSolution, PcsfInstance, PointMode};
use pcsf::rational::{fmt_rational, int, rat};
use pcsf::Penalty;

fn main() -> pcsf::Result<()> {
    let g = named::cycle(4);
    let inst = PcsfInstance::new(g, vec![int(1); 4], vec![(0, 2), (1, 3)], vec![Penalty::Finite(int(2)); 2])?;
    let gamma = rat(1, 3);
    let point = FracSolution { x: vec![rat(1, 2); 4], z: vec![int(0), gamma.clone()] };

    let dec = min_beta(&inst, &point)?;
    println!("beta* = {} ({} columns)", fmt_rational(&dec.value), dec.columns);
    let below = &dec.value - rat(1, 100);
    for beta in [dec.value.clone(), below] {
        let f = feasibility_at_beta(&inst, &point, &beta)?;
        println!("packing value at {}: {}", fmt_rational(&beta), fmt_rational(&f.value()));
    }

    let (dist, beta) = two_value_lmp_distribution(&inst, &point)?;
    let r = verify_distribution(&inst, &point, &dist, PointMode::Lmp, &beta)?;
    println!("two-value mixture: beta {} over {} forests, passes {}", fmt_rational(&beta), dist.len(), r.passes);
    Ok(())
}

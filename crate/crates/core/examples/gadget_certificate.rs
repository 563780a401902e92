//! Builds the ten-node gadget chain for k = 6 and certifies that its
//! canonical point is an extreme point of the cut LP with largest value 1/3.

use pcsf::cutlp::verify_vertex;
use pcsf::instances::{gadget_family_labels, gadget_tight_family, pcst_gadget_instance};

fn main() -> pcsf::Result<()> {
    let k = 6;
    let (inst, point, _) = pcst_gadget_instance(k)?;
    let family = gadget_tight_family(&inst, k)?;
    let labels = gadget_family_labels(k);
    println!("{} nodes, {} edges, {} pairs, {} tight constraints", inst.graph.node_count(), inst.edge_count(), inst.pair_count(), family.len());
    for label in labels.iter().take(5) {
        println!("  e.g. {label}");
    }
    let report = verify_vertex(&inst, &point, &family)?;
    println!("feasible {} all tight {} rank {} of {}", report.is_feasible, report.all_tight, report.rank, report.dimension);
    println!("unique solution: {}", report.unique);
    println!("largest coordinate: {}", report.max_coordinate);
    Ok(())
}

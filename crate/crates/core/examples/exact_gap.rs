//! Exact integral optimum against the exact LP value on small instances.

use pcsf::exact::{enumerate_ip, gap, solve_ip_with, IpOptions};
use pcsf::graph::named;
use pcsf::instances::{random_instance, PcsfInstance, RandomSpec};
use pcsf::rational::{fmt_rational, int};
use pcsf::Penalty;

fn main() -> pcsf::Result<()> {
    let c4 = PcsfInstance::new(named::cycle(4), vec![int(1); 4], vec![(0, 2), (1, 3)], vec![Penalty::Infinite; 2])?;
    println!("C4 with crossing pairs: {}", gap(&c4)?);

    let spec = RandomSpec { nodes: 7, max_edges: 14, pairs: 4, ..RandomSpec::default() };
    for seed in 0..5 {
        let inst = random_instance(&spec, seed)?;
        let (dp, stats) = solve_ip_with(&inst, &IpOptions::default())?;
        let (bb, _) = solve_ip_with(&inst, &IpOptions { frontier: false, ..IpOptions::default() })?;
        let (enumerated, _) = enumerate_ip(&inst)?;
        println!(
            "seed {seed}: {} edges, frontier width {:?}, dp {} b&b {} enumeration {} | {}",
            inst.edge_count(),
            stats.frontier_width,
            fmt_rational(&dp.objective()),
            fmt_rational(&bb.objective()),
            fmt_rational(&enumerated),
            gap(&inst)?
        );
    }
    Ok(())
}

//! Belief propagation on classical factor graphs.
//!
//! cargo run --example classical_bp

use holoprop::bp::{run_bp, BpConfig, Schedule};
use holoprop::fixtures::{self, EdgeKind};
use holoprop::model::{exact_value, from_factor_graph, FactorGraph};

fn main() -> holoprop::Result<()> {
    // a chain is a tree, so Bethe is exact
    let mut chain = FactorGraph::new();
    let x = chain.add_variable("x", vec![1.0, 2.0]);
    let y = chain.add_variable("y", vec![1.0, 1.0]);
    let z = chain.add_variable("z", vec![3.0, 1.0]);
    chain.add_factor("xy", vec![x, y], vec![2.0, 1.0, 1.0, 2.0]);
    chain.add_factor("yz", vec![y, z], vec![1.0, 3.0, 3.0, 1.0]);
    let m = from_factor_graph(&chain)?;
    let r = run_bp(&m, &BpConfig::default())?;
    println!("chain: Z = {}, Bethe = {} after {} sweeps", exact_value(&m)?, r.bethe, r.iterations);

    // closing the chain into a cycle makes Bethe approximate
    chain.add_factor("zx", vec![z, x], vec![1.0, 2.0, 2.0, 1.0]);
    let m = from_factor_graph(&chain)?;
    for schedule in [Schedule::Synchronous, Schedule::Sequential] {
        let cfg = BpConfig { schedule, ..BpConfig::default() };
        let r = run_bp(&m, &cfg)?;
        println!(
            "cycle ({schedule:?}): Z = {}, Bethe = {:.12}, {} sweeps, converged {}",
            exact_value(&m)?,
            r.bethe,
            r.iterations,
            r.converged
        );
    }
    let r = run_bp(&m, &BpConfig::default())?;
    for e in 0..m.edges().len() {
        println!("  {} factor->variable {:?}", m.edge_label(e), r.messages.to_right[e]);
    }

    // Gram-weighted orthant edges behave the same way
    let gm = fixtures::random_tree_model(4, 8);
    let r = run_bp(&gm, &BpConfig::default())?;
    println!("random tree: Z = {:.12}, Bethe = {:.12}", exact_value(&gm)?, r.bethe);
    let loopy = fixtures::fused_cycles(EdgeKind::OrthantGram(2), 6);
    let r = run_bp(&loopy, &BpConfig { damping: 0.2, ..BpConfig::default() })?;
    println!("fused cycles, damped: Z = {:.12}, Bethe = {:.12}", exact_value(&loopy)?, r.bethe);
    Ok(())
}

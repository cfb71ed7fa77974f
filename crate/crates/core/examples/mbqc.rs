//! Measurement outcomes on graph states, against a state-vector simulation.
//!
//! cargo run --example mbqc

use holoprop::bp::{run_bp, BpConfig};
use holoprop::fixtures;
use holoprop::loopcalc::{build_edge_frames, loop_series};
use holoprop::model::exact_value;
use holoprop::quantum::{build_mbqc_model, statevector_probability, GraphStateSpec};

fn main() -> holoprop::Result<()> {
    let mut rng = fixtures::rng(9);
    for (name, edges, n) in [
        ("path", fixtures::path_graph(4), 4),
        ("star", fixtures::star_graph(5), 5),
        ("ring", fixtures::cycle_graph(5), 5),
        ("2x3 grid", fixtures::grid_graph(2, 3), 6),
    ] {
        let spec = GraphStateSpec::new(n, &edges, fixtures::random_outcomes(n, &mut rng))?;
        let model = exact_value(&build_mbqc_model(&spec)?)?;
        println!("{name}: model {model:.15}, state vector {:.15}", statevector_probability(&spec)?);
    }

    // outcome probabilities over the computational basis sum to one
    let edges = fixtures::cycle_graph(3);
    let mut total = 0.0;
    for bits in 0..8 {
        total += exact_value(&build_mbqc_model(&GraphStateSpec::new(3, &edges, fixtures::basis_outcomes(3, bits))?)?)?;
    }
    println!("triangle, basis outcomes: total probability {total:.15}");

    // loop series on a plaquette with X-Y plane outcomes
    let spec = fixtures::mbqc_grid(2, 2, 5);
    let m = build_mbqc_model(&spec)?;
    let fp = run_bp(&m, &BpConfig::default())?;
    let s = loop_series(&m, &fp, m.edges().len())?;
    println!(
        "2x2 grid: probability {:.15}, Bethe {:.15}, loop-corrected {:.15}",
        statevector_probability(&spec)?,
        s.bethe,
        s.partial_sum
    );

    // generic outcomes push ring messages to rank one, and frames are refused
    let spec = GraphStateSpec::new(4, &fixtures::cycle_graph(4), fixtures::random_outcomes(4, &mut rng))?;
    let m = build_mbqc_model(&spec)?;
    let fp = run_bp(&m, &BpConfig { max_iterations: 3000, ..BpConfig::default() })?;
    match build_edge_frames(&m, &fp) {
        Ok(_) => println!("generic ring: frames built"),
        Err(e) => println!("generic ring: {e}"),
    }
    Ok(())
}

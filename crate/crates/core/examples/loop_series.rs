//! Frames at a BP fixed point and the loop series that corrects Bethe.
//!
//! cargo run --example loop_series

use holoprop::bp::{run_bp, BpConfig};
use holoprop::fixtures::{self, EdgeKind};
use holoprop::loopcalc::{
    biorthogonality_residual, build_edge_frames, check_vanishing_conditions, enumerate_generalized_loops, loop_series,
};
use holoprop::model::exact_value;

fn main() -> holoprop::Result<()> {
    let m = fixtures::fused_cycles(EdgeKind::Orthant(2), 4);
    let z = exact_value(&m)?;
    let fp = run_bp(&m, &BpConfig::default())?;
    let frames = build_edge_frames(&m, &fp)?;
    let vanishing = check_vanishing_conditions(&m, &frames);
    println!("Z = {z:.12}, Bethe = {:.12}", fp.bethe);
    println!(
        "biorthogonality residual {:.1e}, single-excitation coefficients up to {:.1e}",
        biorthogonality_residual(&m, &frames),
        vanishing.max_abs
    );

    let loops = enumerate_generalized_loops(&m)?;
    println!("{} generalized loops:", loops.len());
    for support in &loops {
        let labels: Vec<String> = support.iter().map(|&e| m.edge_label(e)).collect();
        println!("  {}", labels.join(" "));
    }

    for k in 0..=m.edges().len() {
        let s = loop_series(&m, &fp, k)?;
        println!("supports up to {k}: partial sum {:.12}, error {:.1e}", s.partial_sum, (s.partial_sum - z).abs());
    }

    // qubit edges: the same machinery with PSD cones
    let q = fixtures::cycle_model(2, EdgeKind::Qubit, 3);
    let fp = run_bp(&q, &BpConfig::default())?;
    let s = loop_series(&q, &fp, q.edges().len())?;
    println!(
        "qubit 4-cycle: Z = {:.12}, Bethe = {:.12}, {} loop terms, resummed {:.12}",
        exact_value(&q)?,
        s.bethe,
        s.terms.len(),
        s.partial_sum
    );
    Ok(())
}

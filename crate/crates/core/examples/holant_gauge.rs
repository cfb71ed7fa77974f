//! Gauge invariance of the value under per-edge basis changes.
//!
//! cargo run --example holant_gauge

use nalgebra::DMatrix;

use holoprop::fixtures;
use holoprop::holographic::{apply_gauge, random_gauge, GaugeMap};
use holoprop::model::exact_value;

fn main() -> holoprop::Result<()> {
    let m = fixtures::single_edge();
    let swap = GaugeMap::new(&m, vec![DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])])?;
    let gauged = apply_gauge(&m, &swap)?;
    println!(
        "swap gauge: f {:?} -> {:?}, g {:?} -> {:?}, value {}",
        m.f(0).coeffs(),
        gauged.f(0).coeffs(),
        m.g(0).coeffs(),
        gauged.g(0).coeffs(),
        exact_value(&gauged)?
    );

    for seed in 0..5 {
        let m = fixtures::random_model(seed, 8);
        let g = random_gauge(&m, 100 + seed);
        let worst = g.condition_numbers().iter().copied().fold(1.0, f64::max);
        let z = exact_value(&m)?;
        let zg = exact_value(&apply_gauge(&m, &g)?)?;
        println!(
            "seed {seed}: {} edges, worst condition {worst:.1}, value {z:.12} gauged {zg:.12}, relative gap {:.1e}",
            m.edges().len(),
            ((z - zg) / z).abs()
        );
    }

    // two gauges applied in turn act as their product
    let m = fixtures::random_model(3, 6);
    let (a, b) = (random_gauge(&m, 1), random_gauge(&m, 2));
    let twice = apply_gauge(&apply_gauge(&m, &a)?, &b)?;
    let once = apply_gauge(&m, &a.compose(&m, &b)?)?;
    println!("composition: {:.12} vs {:.12}", exact_value(&twice)?, exact_value(&once)?);

    let singular = GaugeMap::new(&fixtures::single_edge(), vec![DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0])]);
    println!("singular gauge: {}", singular.unwrap_err());
    Ok(())
}

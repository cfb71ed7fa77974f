//! A generalized probabilistic theory with a simplicial, non-orthant state cone.
//!
//! cargo run --example gpt_cone

use std::sync::Arc;

use nalgebra::DMatrix;

use holoprop::bp::{messages_in_cones, run_bp, BpConfig};
use holoprop::cones::{ConeKind, RayCone};
use holoprop::loopcalc::build_edge_frames;
use holoprop::model::{exact_value, ModelBuilder};
use holoprop::spaces::Space;

fn main() -> holoprop::Result<()> {
    // states: conic hull of three skewed rays; effects: the dual cone, generated by R⁻ᵀ
    let rays = vec![vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
    let r = DMatrix::from_fn(3, 3, |i, j| rays[j][i]);
    let dual = r.transpose().try_inverse().expect("rays form a basis");
    let dual_gens: Vec<Vec<f64>> = (0..3).map(|j| dual.column(j).iter().copied().collect()).collect();
    let dual_interior: Vec<f64> = (0..3).map(|i| dual.row(i).sum()).collect();
    let cone = ConeKind::Custom(Arc::new(RayCone::new(rays.clone(), dual_interior)));

    // preparation → channel → two measurements: a tree with custom-cone edges
    let mut b = ModelBuilder::new();
    let prep = b.left("prep");
    let meas = b.left("meas");
    let channel = b.right("channel");
    let readout = b.right("readout");
    b.edge(prep, channel, Space::euclidean(3), Some(cone.clone()));
    b.edge(meas, channel, Space::euclidean(3), Some(cone.clone()));
    b.edge(meas, readout, Space::euclidean(3), Some(cone));
    let state: Vec<f64> = (0..3).map(|i| 0.6 * rays[0][i] + 0.4 * rays[2][i]).collect();
    b.f(prep, state);
    // meas ∈ C ⊗ C: a mixture of products of rays
    let mut joint = vec![0.0; 9];
    for (a, (ra, rb)) in [(&rays[0], &rays[1]), (&rays[1], &rays[1]), (&rays[2], &rays[0])].into_iter().enumerate() {
        let w = [0.5, 0.3, 0.2][a];
        for i in 0..3 {
            for j in 0..3 {
                joint[3 * i + j] += w * ra[i] * rb[j];
            }
        }
    }
    b.f(meas, joint);
    // channel and readout ∈ C* ⊗ C* and C*
    let mut ch = vec![0.0; 9];
    for (x, y) in [(0, 0), (1, 2), (2, 1)] {
        for i in 0..3 {
            for j in 0..3 {
                ch[3 * i + j] += dual_gens[x][i] * dual_gens[y][j];
            }
        }
    }
    b.g(channel, ch);
    b.g(readout, dual_gens[1].iter().zip(&dual_gens[2]).map(|(a, c)| a + 0.5 * c).collect());
    let m = b.build()?;

    let fp = run_bp(&m, &BpConfig::default())?;
    println!("value {:.15}, Bethe {:.15}, converged {}", exact_value(&m)?, fp.bethe, fp.converged);
    println!("messages stay in their cones: {}", messages_in_cones(&m, &fp.messages, 1e-9)?);
    match build_edge_frames(&m, &fp) {
        Ok(_) => println!("frames built"),
        Err(e) => println!("frames: {e}"),
    }
    Ok(())
}

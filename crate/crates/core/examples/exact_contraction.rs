//! Exact values by contraction, cross-checked by orthonormal enumeration.
//!
//! cargo run --example exact_contraction

use holoprop::fixtures;
use holoprop::model::{exact_value, expanded_value, validate_model, ModelBuilder};
use holoprop::spaces::Space;

fn main() -> holoprop::Result<()> {
    // ⟨f, g⟩ on one edge
    let single = fixtures::single_edge();
    println!("single edge: {}", exact_value(&single)?);

    // equality tensors around a 4-cycle count the two consistent colorings
    let cycle = fixtures::four_cycle_equality();
    println!("4-cycle: contraction {} enumeration {}", exact_value(&cycle)?, expanded_value(&cycle)?);

    // a non-Euclidean edge: the value pairs f with K g
    let k = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let mut b = ModelBuilder::new();
    let v = b.left("v");
    let w = b.right("w");
    b.edge(v, w, Space::with_gram(k)?, None);
    b.f(v, vec![1.0, 2.0]).g(w, vec![3.0, 4.0]);
    let gram = b.build()?;
    println!("gram edge: {} (expected 1*(2*3+0.5*4) + 2*(0.5*3+1*4) = 19)", exact_value(&gram)?);

    let m = fixtures::random_model(11, 8);
    println!(
        "random model: {} edges, contraction {:.12} enumeration {:.12}, peak intermediate {} entries",
        m.edges().len(),
        exact_value(&m)?,
        expanded_value(&m)?,
        m.contraction_peak()
    );

    // malformed models are reported, not evaluated
    let mut b = ModelBuilder::new();
    let v = b.left("v");
    let w = b.right("w");
    b.edge(v, w, Space::euclidean(2), None);
    b.f(v, vec![1.0, 2.0, 3.0]).g(w, vec![1.0, 1.0]);
    let bad = b.build_unchecked();
    println!("validation: {}", validate_model(&bad));
    Ok(())
}

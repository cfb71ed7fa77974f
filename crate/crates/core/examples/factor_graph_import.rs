//! Reading a factor-graph file and converting it to a bipartite model.
//!
//! cargo run --example factor_graph_import [path]

use holoprop::format::{parse_model_file, to_json, ModelFile};
use holoprop::model::{classical_partition_oracle, exact_value, from_factor_graph};

fn main() -> holoprop::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/factor_graph.json").to_string());
    let ModelFile::FactorGraph(fg) = parse_model_file(&path)? else {
        return Err(holoprop::Error::Format(format!("{path} is not a factor_graph file")));
    };
    println!("{} variables, {} factors", fg.variables.len(), fg.factors.len());
    let z = classical_partition_oracle(&fg)?;
    let m = from_factor_graph(&fg)?;
    println!("Z by enumeration {z}, by contraction {}", exact_value(&m)?);
    println!("{}", to_json(&ModelFile::Bipartite(m)));
    Ok(())
}

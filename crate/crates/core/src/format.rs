//! JSON model files.
//!
//! Three document kinds share one top-level `"kind"` tag:
//!
//! ```json
//! {"kind": "bipartite",
//!  "left": ["v"], "right": ["w"],
//!  "edges": [{"left": "v", "right": "w", "dim": 2, "cone": "orthant"}],
//!  "tensors": {"v": [1, 2], "w": [3, 4]},
//!  "scale": 1}
//!
//! {"kind": "factor_graph",
//!  "variables": [{"name": "x", "weights": [1, 1]}],
//!  "factors": [{"name": "a", "scope": ["x"], "table": [2, 3]}]}
//!
//! {"kind": "graph_state",
//!  "adjacency": [[1], [0]],
//!  "outcomes": [[[1, 0], [0, 0]], [[1, 0], [0, 0]]]}
//! ```
//!
//! Edges may carry a row-major `"gram"`; `"cone"` is `"orthant"`, `"psd"` or
//! `"none"` (the default). Tensors are row-major with axes in canonical order:
//! a vertex's incident edges sorted by the peer's position in its side's list.
//! Unknown fields are rejected and schema errors carry the offending path.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cones::ConeKind;
use crate::error::{Error, Result};
use crate::holographic::GaugeMap;
use crate::model::{BipartiteModel, FactorGraph, ModelBuilder};
use crate::quantum::GraphStateSpec;
use crate::spaces::Space;

#[derive(Debug, Clone)]
pub enum ModelFile {
    Bipartite(BipartiteModel),
    FactorGraph(FactorGraph),
    GraphState(GraphStateSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ConeName {
    Orthant,
    Psd,
    #[default]
    None,
}

fn is_default_cone(c: &ConeName) -> bool {
    *c == ConeName::None
}

fn is_unit(x: &f64) -> bool {
    *x == 1.0
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    left: String,
    right: String,
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gram: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_default_cone")]
    cone: ConeName,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BipartiteDoc {
    left: Vec<String>,
    right: Vec<String>,
    edges: Vec<EdgeDoc>,
    tensors: BTreeMap<String, Vec<f64>>,
    #[serde(default = "unit", skip_serializing_if = "is_unit")]
    scale: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    name: String,
    scope: Vec<String>,
    table: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorGraphDoc {
    variables: Vec<VariableDoc>,
    factors: Vec<FactorDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphStateDoc {
    adjacency: Vec<Vec<usize>>,
    outcomes: Vec<[[f64; 2]; 2]>,
}

fn schema(msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("schema error: {msg}"))
}

fn typed<T: for<'de> Deserialize<'de>>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema(format!("at {path}: {}", e.into_inner()))
    })
}

pub fn parse_model_file(path: impl AsRef<Path>) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.as_ref().display())))?;
    parse_model_str(&text)
}

pub fn parse_model_str(text: &str) -> Result<ModelFile> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    let serde_json::Value::Object(mut map) = value else {
        return Err(schema("top level must be an object"));
    };
    let kind = match map.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        Some(_) => return Err(schema("at kind: expected a string")),
        None => return Err(schema("missing field `kind`")),
    };
    let rest = serde_json::Value::Object(map);
    match kind.as_str() {
        "bipartite" => Ok(ModelFile::Bipartite(bipartite_from_doc(typed(rest)?)?)),
        "factor_graph" => Ok(ModelFile::FactorGraph(factor_graph_from_doc(typed(rest)?)?)),
        "graph_state" => Ok(ModelFile::GraphState(graph_state_from_doc(typed(rest)?)?)),
        other => Err(schema(format!(
            "at kind: unknown kind `{other}`, expected one of `bipartite`, `factor_graph`, `graph_state`"
        ))),
    }
}

fn index_names(names: &[String], side: &str) -> Result<HashMap<String, usize>> {
    let mut out = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if out.insert(n.clone(), i).is_some() {
            return Err(schema(format!("at {side}: duplicate vertex `{n}`")));
        }
    }
    Ok(out)
}

fn bipartite_from_doc(doc: BipartiteDoc) -> Result<BipartiteModel> {
    let left = index_names(&doc.left, "left")?;
    let right = index_names(&doc.right, "right")?;
    if let Some(n) = doc.left.iter().find(|n| right.contains_key(*n)) {
        return Err(schema(format!("vertex name `{n}` appears on both sides")));
    }
    let mut b = ModelBuilder::new();
    for n in &doc.left {
        b.left(n);
    }
    for n in &doc.right {
        b.right(n);
    }
    for (k, e) in doc.edges.iter().enumerate() {
        let at = |field: &str| format!("at edges[{k}].{field}");
        let l = *left.get(&e.left).ok_or_else(|| schema(format!("{}: unknown left vertex `{}`", at("left"), e.left)))?;
        let r = *right.get(&e.right).ok_or_else(|| schema(format!("{}: unknown right vertex `{}`", at("right"), e.right)))?;
        let space = match &e.gram {
            None => Space::euclidean(e.dim),
            Some(g) => {
                if g.len() != e.dim * e.dim {
                    return Err(schema(format!("{}: expected {} entries, found {}", at("gram"), e.dim * e.dim, g.len())));
                }
                Space::with_gram(DMatrix::from_row_slice(e.dim, e.dim, g)).map_err(|err| schema(format!("{}: {err}", at("gram"))))?
            }
        };
        let cone = match e.cone {
            ConeName::Orthant => Some(ConeKind::NonnegativeOrthant),
            ConeName::Psd => Some(ConeKind::PsdHermitian),
            ConeName::None => None,
        };
        b.edge(l, r, space, cone);
    }
    for name in doc.tensors.keys() {
        if !left.contains_key(name) && !right.contains_key(name) {
            return Err(schema(format!("at tensors.{name}: unknown vertex")));
        }
    }
    for (name, coeffs) in doc.tensors {
        if let Some(&v) = left.get(&name) {
            b.f(v, coeffs);
        } else {
            b.g(right[&name], coeffs);
        }
    }
    b.scale(doc.scale);
    b.build()
}

fn factor_graph_from_doc(doc: FactorGraphDoc) -> Result<FactorGraph> {
    let names: Vec<String> = doc.variables.iter().map(|v| v.name.clone()).collect();
    let index = index_names(&names, "variables")?;
    let mut fg = FactorGraph::new();
    for (k, v) in doc.variables.into_iter().enumerate() {
        let weights = match (v.arity, v.weights) {
            (_, Some(w)) if v.arity.is_some_and(|a| a != w.len()) => {
                return Err(schema(format!("at variables[{k}].weights: {} weights for arity {}", w.len(), v.arity.unwrap())));
            }
            (_, Some(w)) => w,
            (Some(a), None) => vec![1.0; a],
            (None, None) => return Err(schema(format!("at variables[{k}]: need `arity` or `weights`"))),
        };
        fg.add_variable(&v.name, weights);
    }
    for (k, a) in doc.factors.into_iter().enumerate() {
        let scope = a
            .scope
            .iter()
            .map(|n| index.get(n).copied().ok_or_else(|| schema(format!("at factors[{k}].scope: unknown variable `{n}`"))))
            .collect::<Result<Vec<_>>>()?;
        fg.add_factor(&a.name, scope, a.table);
    }
    fg.validate()?;
    Ok(fg)
}

fn graph_state_from_doc(doc: GraphStateDoc) -> Result<GraphStateSpec> {
    let n = doc.adjacency.len();
    let mut edges = Vec::new();
    for (i, nbrs) in doc.adjacency.iter().enumerate() {
        for &j in nbrs {
            if j >= n {
                return Err(schema(format!("at adjacency[{i}]: vertex {j} out of range")));
            }
            let e = (i.min(j), i.max(j));
            if i != j && edges.contains(&e) {
                continue;
            }
            edges.push(e);
        }
    }
    let outcomes = doc
        .outcomes
        .iter()
        .map(|[a, b]| [Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1])])
        .collect();
    GraphStateSpec::new(n, &edges, outcomes)
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TaggedDoc {
    Bipartite(BipartiteDoc),
    FactorGraph(FactorGraphDoc),
    GraphState(GraphStateDoc),
}

/// Canonical JSON text of a model file.
pub fn to_json(file: &ModelFile) -> String {
    let doc = match file {
        ModelFile::Bipartite(m) => TaggedDoc::Bipartite(bipartite_doc(m)),
        ModelFile::FactorGraph(fg) => TaggedDoc::FactorGraph(factor_graph_doc(fg)),
        ModelFile::GraphState(g) => TaggedDoc::GraphState(graph_state_doc(g)),
    };
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}

fn bipartite_doc(m: &BipartiteModel) -> BipartiteDoc {
    let edges = m
        .edges()
        .iter()
        .map(|e| EdgeDoc {
            left: m.left_name(e.left).to_string(),
            right: m.right_name(e.right).to_string(),
            dim: e.space.dim(),
            gram: (!e.space.is_euclidean()).then(|| {
                let k = e.space.gram();
                (0..k.nrows()).flat_map(|i| (0..k.ncols()).map(move |j| k[(i, j)])).collect()
            }),
            cone: match e.cone {
                Some(ConeKind::NonnegativeOrthant) => ConeName::Orthant,
                Some(ConeKind::PsdHermitian) => ConeName::Psd,
                _ => ConeName::None,
            },
        })
        .collect();
    let mut tensors = BTreeMap::new();
    for v in 0..m.n_left() {
        tensors.insert(m.left_name(v).to_string(), m.f(v).coeffs().to_vec());
    }
    for w in 0..m.n_right() {
        tensors.insert(m.right_name(w).to_string(), m.g(w).coeffs().to_vec());
    }
    BipartiteDoc {
        left: m.left_names().to_vec(),
        right: m.right_names().to_vec(),
        edges,
        tensors,
        scale: m.scale(),
    }
}

fn factor_graph_doc(fg: &FactorGraph) -> FactorGraphDoc {
    FactorGraphDoc {
        variables: fg
            .variables
            .iter()
            .map(|v| VariableDoc { name: v.name.clone(), arity: None, weights: Some(v.weights.clone()) })
            .collect(),
        factors: fg
            .factors
            .iter()
            .map(|a| FactorDoc {
                name: a.name.clone(),
                scope: a.scope.iter().map(|&i| fg.variables[i].name.clone()).collect(),
                table: a.table.clone(),
            })
            .collect(),
    }
}

fn graph_state_doc(g: &GraphStateSpec) -> GraphStateDoc {
    let mut adjacency = vec![Vec::new(); g.n_vertices()];
    for &(a, b) in g.edges() {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let outcomes = g.outcomes().iter().map(|[a, b]| [[a.re, a.im], [b.re, b.im]]).collect();
    GraphStateDoc { adjacency, outcomes }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeEdgeDoc {
    left: String,
    right: String,
    /// Row-major `dim × dim`.
    matrix: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeDoc {
    edges: Vec<GaugeEdgeDoc>,
}

/// Reads `{"edges": [{"left", "right", "matrix"}]}`; every model edge must appear exactly once.
pub fn parse_gauge_str(text: &str, m: &BipartiteModel) -> Result<GaugeMap> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    let doc: GaugeDoc = typed(value)?;
    let mut mats: Vec<Option<DMatrix<f64>>> = vec![None; m.edges().len()];
    for (k, g) in doc.edges.iter().enumerate() {
        let l = m.left_names().iter().position(|n| *n == g.left);
        let r = m.right_names().iter().position(|n| *n == g.right);
        let e = match (l, r) {
            (Some(l), Some(r)) => m.edge_index(l, r),
            _ => None,
        }
        .ok_or_else(|| schema(format!("at edges[{k}]: no edge {}-{}", g.left, g.right)))?;
        let d = m.edges()[e].space.dim();
        if g.matrix.len() != d * d {
            return Err(schema(format!("at edges[{k}].matrix: expected {} entries, found {}", d * d, g.matrix.len())));
        }
        if mats[e].is_some() {
            return Err(schema(format!("at edges[{k}]: edge listed twice")));
        }
        mats[e] = Some(DMatrix::from_row_slice(d, d, &g.matrix));
    }
    let found = mats.iter().filter(|x| x.is_some()).count();
    if found != mats.len() {
        return Err(Error::GaugeShape { expected: mats.len(), found });
    }
    GaugeMap::new(m, mats.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::exact_value;

    const SINGLE: &str = r#"{"kind":"bipartite","left":["v"],"right":["w"],
        "edges":[{"left":"v","right":"w","dim":2,"cone":"orthant"}],
        "tensors":{"v":[1,2],"w":[3,4]}}"#;

    fn bipartite(text: &str) -> BipartiteModel {
        match parse_model_str(text).unwrap() {
            ModelFile::Bipartite(m) => m,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_edge_file() {
        let m = bipartite(SINGLE);
        assert_eq!(exact_value(&m).unwrap(), 11.0);
    }

    #[test]
    fn round_trip_is_stable() {
        let text = to_json(&parse_model_str(SINGLE).unwrap());
        let again = to_json(&parse_model_str(&text).unwrap());
        assert_eq!(text, again);

        let gram = r#"{"kind":"bipartite","left":["a"],"right":["b","c"],"scale":0.5,
            "edges":[{"left":"a","right":"c","dim":2,"gram":[2,0,0,1]},{"left":"a","right":"b","dim":1}],
            "tensors":{"a":[1,2],"b":[1],"c":[1,1]}}"#;
        let text = to_json(&parse_model_str(gram).unwrap());
        assert_eq!(to_json(&parse_model_str(&text).unwrap()), text);
        assert!((exact_value(&bipartite(&text)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn schema_errors_name_the_problem() {
        let short = SINGLE.replace("[1,2]", "[1,2,3]");
        let err = parse_model_str(&short).unwrap_err().to_string();
        assert!(err.contains("tensor v"), "{err}");

        let unknown = SINGLE.replace("\"scale\"", "\"x\"").replace("\"tensors\"", "\"extra\":1,\"tensors\"");
        let err = parse_model_str(&unknown).unwrap_err().to_string();
        assert!(err.contains("unknown field `extra`"), "{err}");

        let bad_dim = SINGLE.replace("\"dim\":2", "\"dim\":\"two\"");
        let err = parse_model_str(&bad_dim).unwrap_err().to_string();
        assert!(err.contains("edges[0].dim"), "{err}");

        assert!(parse_model_str("{").unwrap_err().to_string().contains("malformed JSON"));
        assert!(parse_model_str(r#"{"kind":"mystery"}"#).is_err());
    }

    #[test]
    fn factor_graph_and_graph_state_kinds() {
        let fg = r#"{"kind":"factor_graph","variables":[{"name":"i","arity":2}],
            "factors":[{"name":"a","scope":["i"],"table":[2,3]}]}"#;
        let ModelFile::FactorGraph(g) = parse_model_str(fg).unwrap() else { panic!() };
        assert_eq!(crate::model::classical_partition_oracle(&g).unwrap(), 5.0);
        let text = to_json(&ModelFile::FactorGraph(g));
        assert_eq!(to_json(&parse_model_str(&text).unwrap()), text);

        let gs = r#"{"kind":"graph_state","adjacency":[[1],[0]],"outcomes":[[[1,0],[0,0]],[[1,0],[0,0]]]}"#;
        let ModelFile::GraphState(s) = parse_model_str(gs).unwrap() else { panic!() };
        assert_eq!(s.edges(), &[(0, 1)]);
        let text = to_json(&ModelFile::GraphState(s));
        assert_eq!(to_json(&parse_model_str(&text).unwrap()), text);
    }

    #[test]
    fn gauge_file() {
        let m = bipartite(SINGLE);
        let g = parse_gauge_str(r#"{"edges":[{"left":"v","right":"w","matrix":[0,1,1,0]}]}"#, &m).unwrap();
        assert_eq!(g.phi(0)[(0, 1)], 1.0);
        assert!(parse_gauge_str(r#"{"edges":[]}"#, &m).is_err());
        assert!(parse_gauge_str(r#"{"edges":[{"left":"v","right":"w","matrix":[1,2,2,4]}]}"#, &m).is_err());
    }
}

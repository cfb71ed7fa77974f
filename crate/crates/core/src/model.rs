//! Bipartite models, classical factor graphs, and exact evaluation.
//!
//! A model has left vertices `V`, right vertices `W` and edges `E ⊆ V × W`.
//! Each edge carries a [`Space`] and optionally a cone; each vertex carries a
//! tensor with one axis per incident edge. The value of the model is
//! `scale · ⟨⊗_v f_v, ⊗_w g_w⟩`.
//!
//! Axis order is canonical: a vertex's axes follow its incident edges sorted
//! by the peer vertex's index. Edges themselves are stored sorted by
//! `(left, right)`.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::DMatrix;

use crate::cones::ConeKind;
use crate::error::{Error, Result};
use crate::spaces::Space;
use crate::tensor::{self, Labeled, MultiIndex};

/// Default cap on tensor and intermediate contraction sizes, in coefficients.
pub const DEFAULT_COEFFICIENT_CAP: usize = 1 << 24;

#[derive(Debug, Clone)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub space: Space,
    pub cone: Option<ConeKind>,
}

/// Coefficients of a vertex tensor, row-major over its axes in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexTensor {
    pub shape: Vec<usize>,
    pub coeffs: Vec<f64>,
}

impl VertexTensor {
    pub fn new(shape: Vec<usize>, coeffs: Vec<f64>) -> Self {
        VertexTensor { shape, coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    IsolatedVertex { side: Side, vertex: String },
    ParallelEdge { left: String, right: String },
    MissingTensor { side: Side, vertex: String },
    AxisDegreeMismatch { vertex: String, axes: usize, degree: usize },
    ShapeMismatch { vertex: String, axis: usize, expected: usize, found: usize },
    CoefficientCount { vertex: String, expected: usize, found: usize },
    NonFinite { vertex: String },
    NonFiniteScale,
    ConeSpace { edge: usize, reason: String },
    SizeCap { size: usize, cap: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IsolatedVertex { side, vertex } => write!(f, "isolated {side} vertex {vertex}"),
            Violation::ParallelEdge { left, right } => write!(f, "parallel edges between {left} and {right}"),
            Violation::MissingTensor { side, vertex } => write!(f, "missing tensor for {side} vertex {vertex}"),
            Violation::AxisDegreeMismatch { vertex, axes, degree } => {
                write!(f, "axis/degree mismatch at {vertex}: {axes} axes, degree {degree}")
            }
            Violation::ShapeMismatch { vertex, axis, expected, found } => {
                write!(f, "shape mismatch at {vertex} axis {axis}: expected {expected}, found {found}")
            }
            Violation::CoefficientCount { vertex, expected, found } => {
                write!(f, "tensor {vertex}: expected {expected} coefficients, found {found}")
            }
            Violation::NonFinite { vertex } => write!(f, "non-finite coefficient at {vertex}"),
            Violation::NonFiniteScale => f.write_str("non-finite scale"),
            Violation::ConeSpace { edge, reason } => write!(f, "edge {edge}: {reason}"),
            Violation::SizeCap { size, cap } => write!(f, "size cap exceeded: {size} > {cap}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

#[derive(Debug, Clone)]
pub struct BipartiteModel {
    left_names: Vec<String>,
    right_names: Vec<String>,
    edges: Vec<Edge>,
    left_incident: Vec<Vec<usize>>,
    right_incident: Vec<Vec<usize>>,
    f: Vec<VertexTensor>,
    g: Vec<VertexTensor>,
    scale: f64,
}

/// Incremental construction of a [`BipartiteModel`].
///
/// Tensors passed to [`ModelBuilder::f`] / [`ModelBuilder::g`] must list their
/// coefficients in canonical axis order (incident edges sorted by peer index).
#[derive(Debug, Default)]
pub struct ModelBuilder {
    left_names: Vec<String>,
    right_names: Vec<String>,
    edges: Vec<Edge>,
    f: Vec<Option<TensorInput>>,
    g: Vec<Option<TensorInput>>,
    scale: Option<f64>,
}

#[derive(Debug, Clone)]
enum TensorInput {
    Flat(Vec<f64>),
    Shaped(VertexTensor),
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn left(&mut self, name: &str) -> usize {
        self.left_names.push(name.to_string());
        self.f.push(None);
        self.left_names.len() - 1
    }

    pub fn right(&mut self, name: &str) -> usize {
        self.right_names.push(name.to_string());
        self.g.push(None);
        self.right_names.len() - 1
    }

    pub fn edge(&mut self, left: usize, right: usize, space: Space, cone: Option<ConeKind>) -> &mut Self {
        assert!(left < self.left_names.len() && right < self.right_names.len(), "edge endpoint out of range");
        self.edges.push(Edge { left, right, space, cone });
        self
    }

    /// Tensor for a left vertex; the shape is taken from its incident edges.
    pub fn f(&mut self, v: usize, coeffs: Vec<f64>) -> &mut Self {
        self.f[v] = Some(TensorInput::Flat(coeffs));
        self
    }

    pub fn g(&mut self, w: usize, coeffs: Vec<f64>) -> &mut Self {
        self.g[w] = Some(TensorInput::Flat(coeffs));
        self
    }

    /// Tensor with an explicit shape, checked against the edges by validation.
    pub fn f_shaped(&mut self, v: usize, t: VertexTensor) -> &mut Self {
        self.f[v] = Some(TensorInput::Shaped(t));
        self
    }

    pub fn g_shaped(&mut self, w: usize, t: VertexTensor) -> &mut Self {
        self.g[w] = Some(TensorInput::Shaped(t));
        self
    }

    pub fn scale(&mut self, scale: f64) -> &mut Self {
        self.scale = Some(scale);
        self
    }

    /// Assembles the model without validating it.
    pub fn build_unchecked(self) -> BipartiteModel {
        let mut edges = self.edges;
        edges.sort_by_key(|e| (e.left, e.right));
        let mut left_incident = vec![Vec::new(); self.left_names.len()];
        let mut right_incident = vec![Vec::new(); self.right_names.len()];
        for (k, e) in edges.iter().enumerate() {
            left_incident[e.left].push(k);
            right_incident[e.right].push(k);
        }
        // left lists are already sorted by peer; right lists by construction too
        for list in &mut right_incident {
            list.sort_by_key(|&k| edges[k].left);
        }
        let resolve = |input: Option<TensorInput>, incident: &[usize]| match input {
            Some(TensorInput::Shaped(t)) => t,
            Some(TensorInput::Flat(c)) => {
                VertexTensor { shape: incident.iter().map(|&k| edges[k].space.dim()).collect(), coeffs: c }
            }
            None => VertexTensor { shape: vec![], coeffs: vec![] },
        };
        let f = self.f.into_iter().zip(&left_incident).map(|(t, inc)| resolve(t, inc)).collect();
        let g = self.g.into_iter().zip(&right_incident).map(|(t, inc)| resolve(t, inc)).collect();
        BipartiteModel {
            left_names: self.left_names,
            right_names: self.right_names,
            edges,
            left_incident,
            right_incident,
            f,
            g,
            scale: self.scale.unwrap_or(1.0),
        }
    }

    pub fn build(self) -> Result<BipartiteModel> {
        let m = self.build_unchecked();
        let report = validate_model(&m);
        if report.is_ok() {
            Ok(m)
        } else {
            Err(Error::InvalidModel(report))
        }
    }
}

impl BipartiteModel {
    pub fn n_left(&self) -> usize {
        self.left_names.len()
    }

    pub fn n_right(&self) -> usize {
        self.right_names.len()
    }

    pub fn left_name(&self, v: usize) -> &str {
        &self.left_names[v]
    }

    pub fn right_name(&self, w: usize) -> &str {
        &self.right_names[w]
    }

    pub fn left_names(&self) -> &[String] {
        &self.left_names
    }

    pub fn right_names(&self) -> &[String] {
        &self.right_names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, left: usize, right: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.left == left && e.right == right)
    }

    pub fn edge_label(&self, e: usize) -> String {
        let edge = &self.edges[e];
        format!("{}-{}", self.left_names[edge.left], self.right_names[edge.right])
    }

    pub fn left_incident(&self, v: usize) -> &[usize] {
        &self.left_incident[v]
    }

    pub fn right_incident(&self, w: usize) -> &[usize] {
        &self.right_incident[w]
    }

    pub fn f(&self, v: usize) -> &VertexTensor {
        &self.f[v]
    }

    pub fn g(&self, w: usize) -> &VertexTensor {
        &self.g[w]
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(&self, scale: f64) -> BipartiteModel {
        BipartiteModel { scale, ..self.clone() }
    }

    pub(crate) fn left_dims(&self, v: usize) -> Vec<usize> {
        self.left_incident[v].iter().map(|&e| self.edges[e].space.dim()).collect()
    }

    pub(crate) fn right_dims(&self, w: usize) -> Vec<usize> {
        self.right_incident[w].iter().map(|&e| self.edges[e].space.dim()).collect()
    }

    /// Same topology and scale with new spaces, cones and tensors (shapes re-derived).
    pub fn rebuild(
        &self,
        spaces: Vec<Space>,
        cones: Vec<Option<ConeKind>>,
        f: Vec<Vec<f64>>,
        g: Vec<Vec<f64>>,
    ) -> Result<BipartiteModel> {
        if spaces.len() != self.edges.len() || cones.len() != self.edges.len() {
            return Err(Error::DimensionMismatch { expected: self.edges.len(), found: spaces.len() });
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .zip(spaces.into_iter().zip(cones))
            .map(|(e, (space, cone))| Edge { left: e.left, right: e.right, space, cone })
            .collect();
        let shape = |inc: &[usize]| inc.iter().map(|&k| edges[k].space.dim()).collect::<Vec<_>>();
        let f = f.into_iter().zip(&self.left_incident).map(|(c, inc)| VertexTensor::new(shape(inc), c)).collect();
        let g = g.into_iter().zip(&self.right_incident).map(|(c, inc)| VertexTensor::new(shape(inc), c)).collect();
        let m = BipartiteModel { edges, f, g, ..self.clone() };
        let report = validate_model(&m);
        if report.is_ok() {
            Ok(m)
        } else {
            Err(Error::InvalidModel(report))
        }
    }

    /// Same model with every cone removed.
    pub fn without_cones(&self) -> BipartiteModel {
        let mut m = self.clone();
        for e in &mut m.edges {
            e.cone = None;
        }
        m
    }

    /// Same model with tensors replaced and cones removed.
    pub(crate) fn with_tensors_without_cones(&self, f: Vec<Vec<f64>>, g: Vec<Vec<f64>>) -> BipartiteModel {
        let mut m = self.clone();
        for e in &mut m.edges {
            e.cone = None;
        }
        for (t, c) in m.f.iter_mut().zip(f) {
            t.coeffs = c;
        }
        for (t, c) in m.g.iter_mut().zip(g) {
            t.coeffs = c;
        }
        m
    }

    /// Same model with one left tensor multiplied by `c`.
    pub fn scale_left_tensor(&self, v: usize, c: f64) -> BipartiteModel {
        let mut m = self.clone();
        for x in &mut m.f[v].coeffs {
            *x *= c;
        }
        m
    }

    pub fn is_forest(&self) -> bool {
        self.components() + self.edges.len() == self.n_left() + self.n_right()
    }

    fn components(&self) -> usize {
        let n = self.n_left() + self.n_right();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut comps = n;
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.left), find(&mut parent, self.n_left() + e.right));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
        comps
    }

    /// Longest shortest path (in edges) within any connected component.
    pub fn diameter(&self) -> usize {
        let nl = self.n_left();
        let n = nl + self.n_right();
        let neighbors = |x: usize| -> Vec<usize> {
            if x < nl {
                self.left_incident[x].iter().map(|&e| nl + self.edges[e].right).collect()
            } else {
                self.right_incident[x - nl].iter().map(|&e| self.edges[e].left).collect()
            }
        };
        let mut best = 0;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for y in neighbors(x) {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        best = best.max(dist[y]);
                        queue.push_back(y);
                    }
                }
            }
        }
        best
    }

    /// Euclidean tensor network: `f_v` as stored, `g_w` with Grams applied, labels = edge indices.
    fn network(&self) -> Vec<Labeled> {
        let mut out = Vec::with_capacity(self.n_left() + self.n_right());
        for v in 0..self.n_left() {
            out.push(Labeled { labels: self.left_incident[v].clone(), dims: self.left_dims(v), data: self.f[v].coeffs.clone() });
        }
        for w in 0..self.n_right() {
            let dims = self.right_dims(w);
            let mats: Vec<Option<&DMatrix<f64>>> = self.right_incident[w]
                .iter()
                .map(|&e| {
                    let s = &self.edges[e].space;
                    if s.is_euclidean() {
                        None
                    } else {
                        Some(s.gram())
                    }
                })
                .collect();
            let (data, _) = tensor::mode_products(&self.g[w].coeffs, &dims, &mats);
            out.push(Labeled { labels: self.right_incident[w].clone(), dims, data });
        }
        out
    }

    /// Largest tensor handled while contracting this model.
    pub fn contraction_peak(&self) -> usize {
        let spec: Vec<(Vec<usize>, Vec<usize>)> = (0..self.n_left())
            .map(|v| (self.left_incident[v].clone(), self.left_dims(v)))
            .chain((0..self.n_right()).map(|w| (self.right_incident[w].clone(), self.right_dims(w))))
            .collect();
        tensor::greedy_order(&spec).1
    }

    /// Per-vertex tensors expressed in the given per-edge bases:
    /// coefficient `x` is `⟨t, ⊗_e b^e_{x_e}⟩` where column `x` of `bases[e]` is `b^e_x`.
    pub(crate) fn tensors_in_bases(&self, bases: &[DMatrix<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        // ⟨t, ⊗b⟩ applies (Bᵀ K) along each axis
        let dual: Vec<DMatrix<f64>> = bases
            .iter()
            .zip(&self.edges)
            .map(|(b, e)| b.transpose() * e.space.gram())
            .collect();
        let convert = |t: &VertexTensor, incident: &[usize]| {
            let mats: Vec<Option<&DMatrix<f64>>> = incident.iter().map(|&e| Some(&dual[e])).collect();
            tensor::mode_products(&t.coeffs, &t.shape, &mats).0
        };
        let f = (0..self.n_left()).map(|v| convert(&self.f[v], &self.left_incident[v])).collect();
        let g = (0..self.n_right()).map(|w| convert(&self.g[w], &self.right_incident[w])).collect();
        (f, g)
    }
}

/// Checks every structural invariant with the default size cap.
pub fn validate_model(m: &BipartiteModel) -> ValidationReport {
    validate_model_with_cap(m, DEFAULT_COEFFICIENT_CAP)
}

pub fn validate_model_with_cap(m: &BipartiteModel, cap: usize) -> ValidationReport {
    let mut violations = Vec::new();
    for v in 0..m.n_left() {
        if m.left_incident[v].is_empty() {
            violations.push(Violation::IsolatedVertex { side: Side::Left, vertex: m.left_names[v].clone() });
        }
    }
    for w in 0..m.n_right() {
        if m.right_incident[w].is_empty() {
            violations.push(Violation::IsolatedVertex { side: Side::Right, vertex: m.right_names[w].clone() });
        }
    }
    for pair in m.edges.windows(2) {
        if pair[0].left == pair[1].left && pair[0].right == pair[1].right {
            violations.push(Violation::ParallelEdge {
                left: m.left_names[pair[0].left].clone(),
                right: m.right_names[pair[0].right].clone(),
            });
        }
    }
    for (k, e) in m.edges.iter().enumerate() {
        if let Some(cone) = &e.cone {
            if let Err(err) = cone.check_space(&e.space) {
                violations.push(Violation::ConeSpace { edge: k, reason: err.to_string() });
            }
            if !e.space.is_positive_definite() {
                violations.push(Violation::ConeSpace { edge: k, reason: "cone on a space whose gram is not positive definite".into() });
            }
        }
    }

    let mut check_tensor = |side: Side, name: &str, t: &VertexTensor, dims: Vec<usize>| {
        if t.shape.is_empty() && t.coeffs.is_empty() {
            violations.push(Violation::MissingTensor { side, vertex: name.to_string() });
            return;
        }
        if t.shape.len() != dims.len() {
            violations.push(Violation::AxisDegreeMismatch { vertex: name.to_string(), axes: t.shape.len(), degree: dims.len() });
        } else {
            for (axis, (&s, &d)) in t.shape.iter().zip(&dims).enumerate() {
                if s != d {
                    violations.push(Violation::ShapeMismatch { vertex: name.to_string(), axis, expected: d, found: s });
                }
            }
        }
        let expected: usize = t.shape.iter().product();
        if expected != t.coeffs.len() {
            violations.push(Violation::CoefficientCount { vertex: name.to_string(), expected, found: t.coeffs.len() });
        }
        if t.coeffs.iter().any(|c| !c.is_finite()) {
            violations.push(Violation::NonFinite { vertex: name.to_string() });
        }
    };
    for v in 0..m.n_left() {
        check_tensor(Side::Left, &m.left_names[v], &m.f[v], m.left_dims(v));
    }
    for w in 0..m.n_right() {
        check_tensor(Side::Right, &m.right_names[w], &m.g[w], m.right_dims(w));
    }
    if !m.scale.is_finite() {
        violations.push(Violation::NonFiniteScale);
    }
    let peak = m.contraction_peak();
    if peak > cap {
        violations.push(Violation::SizeCap { size: peak, cap });
    }
    ValidationReport { violations }
}

fn ensure_valid(m: &BipartiteModel) -> Result<()> {
    let report = validate_model(m);
    if report.is_ok() {
        Ok(())
    } else if let [Violation::SizeCap { size, cap }] = report.violations.as_slice() {
        Err(Error::CapExceeded { size: *size, cap: *cap })
    } else {
        Err(Error::InvalidModel(report))
    }
}

/// `scale · ⟨⊗f_v, ⊗g_w⟩` by pairwise contraction through each edge's Gram.
pub fn exact_value(m: &BipartiteModel) -> Result<f64> {
    ensure_valid(m)?;
    Ok(m.scale * tensor::contract_network(&m.network()))
}

/// The same value as a sum over edge assignments in orthonormal bases, each
/// term a product of one coefficient per vertex. Exponential in `|E|`; used as
/// an independent check of [`exact_value`].
pub fn expanded_value(m: &BipartiteModel) -> Result<f64> {
    let bases = m
        .edges
        .iter()
        .map(|e| e.space.gram_power(-0.5))
        .collect::<Result<Vec<_>>>()?;
    expanded_value_in(m, &bases)
}

/// [`expanded_value`] with caller-chosen orthonormal bases (column `x` of `bases[e]` is `e_x`).
pub fn expanded_value_in(m: &BipartiteModel, bases: &[DMatrix<f64>]) -> Result<f64> {
    ensure_valid(m)?;
    let dims: Vec<usize> = m.edges.iter().map(|e| e.space.dim()).collect();
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
    if total > DEFAULT_COEFFICIENT_CAP {
        return Err(Error::CapExceeded { size: total, cap: DEFAULT_COEFFICIENT_CAP });
    }
    let (f, g) = m.tensors_in_bases(bases);
    let index = |incident: &[usize], x: &[usize]| {
        incident.iter().fold(0usize, |acc, &e| acc * dims[e] + x[e])
    };
    let mut sum = 0.0;
    let mut it = MultiIndex::new(&dims);
    while let Some(x) = it.current() {
        let mut w = 1.0;
        for v in 0..m.n_left() {
            w *= f[v][index(&m.left_incident[v], x)];
        }
        for u in 0..m.n_right() {
            w *= g[u][index(&m.right_incident[u], x)];
        }
        sum += w;
        it.advance();
    }
    Ok(m.scale * sum)
}

// ---------------------------------------------------------------------------
// Factor graphs

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    /// Unary weights `f_i(x)`, one per symbol; the alphabet size is their count.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub name: String,
    /// Variable indices, in the order the table's axes follow.
    pub scope: Vec<usize>,
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactorGraph {
    pub variables: Vec<Variable>,
    pub factors: Vec<Factor>,
}

/// Maximum number of joint assignments the brute-force oracle will enumerate.
pub const ORACLE_ASSIGNMENT_CAP: usize = 1 << 24;

impl FactorGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: &str, weights: Vec<f64>) -> usize {
        self.variables.push(Variable { name: name.to_string(), weights });
        self.variables.len() - 1
    }

    pub fn add_factor(&mut self, name: &str, scope: Vec<usize>, table: Vec<f64>) -> usize {
        self.factors.push(Factor { name: name.to_string(), scope, table });
        self.factors.len() - 1
    }

    /// Table shapes, positivity of unary weights and non-negativity of factor tables.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidFactorGraph(msg));
        for v in &self.variables {
            if v.weights.is_empty() {
                return bad(format!("variable {} has an empty alphabet", v.name));
            }
            if v.weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
                return bad(format!("variable {} has a non-positive unary weight", v.name));
            }
        }
        for a in &self.factors {
            let mut seen = vec![false; self.variables.len()];
            for &i in &a.scope {
                if i >= self.variables.len() {
                    return bad(format!("factor {} references variable {i}", a.name));
                }
                if seen[i] {
                    return bad(format!("factor {} lists variable {} twice", a.name, self.variables[i].name));
                }
                seen[i] = true;
            }
            let expected: usize = a.scope.iter().map(|&i| self.variables[i].weights.len()).product();
            if a.table.len() != expected {
                return bad(format!("factor {}: expected {expected} table entries, found {}", a.name, a.table.len()));
            }
            if a.table.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
                return bad(format!("factor {} has a negative or non-finite entry", a.name));
            }
        }
        Ok(())
    }
}

/// Brute-force `Z = Σ_x ∏_a f_a(x_∂a) ∏_i f_i(x_i)`.
pub fn classical_partition_oracle(fg: &FactorGraph) -> Result<f64> {
    fg.validate()?;
    let dims: Vec<usize> = fg.variables.iter().map(|v| v.weights.len()).collect();
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
    if total > ORACLE_ASSIGNMENT_CAP {
        return Err(Error::CapExceeded { size: total, cap: ORACLE_ASSIGNMENT_CAP });
    }
    let mut z = 0.0;
    let mut it = MultiIndex::new(&dims);
    while let Some(x) = it.current() {
        let mut w: f64 = fg.variables.iter().zip(x).map(|(v, &xi)| v.weights[xi]).product();
        for a in &fg.factors {
            let idx = a.scope.iter().fold(0usize, |acc, &i| acc * dims[i] + x[i]);
            w *= a.table[idx];
        }
        z += w;
        it.advance();
    }
    Ok(z)
}

/// Bipartite normal form: factors on the left, variables on the right as
/// weighted equality tensors, one Euclidean orthant edge per incidence.
pub fn from_factor_graph(fg: &FactorGraph) -> Result<BipartiteModel> {
    fg.validate()?;
    if fg.variables.is_empty() {
        return Err(Error::InvalidFactorGraph("empty graph".into()));
    }
    let mut degree = vec![0usize; fg.variables.len()];
    for a in &fg.factors {
        if a.scope.is_empty() {
            return Err(Error::InvalidFactorGraph(format!("factor {} has no neighbors", a.name)));
        }
        for &i in &a.scope {
            degree[i] += 1;
        }
    }
    if let Some(i) = degree.iter().position(|&d| d == 0) {
        return Err(Error::InvalidFactorGraph(format!("variable {} is isolated", fg.variables[i].name)));
    }

    let mut b = ModelBuilder::new();
    let vars: Vec<usize> = fg.variables.iter().map(|v| b.right(&v.name)).collect();
    let facs: Vec<usize> = fg.factors.iter().map(|a| b.left(&a.name)).collect();
    let spaces: Vec<Space> = fg.variables.iter().map(|v| Space::euclidean(v.weights.len())).collect();
    for (a, fac) in fg.factors.iter().zip(&facs) {
        for &i in &a.scope {
            // one space object per incidence
            let s = Space::euclidean(spaces[i].dim());
            b.edge(*fac, vars[i], s, Some(ConeKind::NonnegativeOrthant));
        }
        // canonical axis order = scope sorted by variable index
        let mut perm: Vec<usize> = (0..a.scope.len()).collect();
        perm.sort_by_key(|&k| a.scope[k]);
        let dims: Vec<usize> = a.scope.iter().map(|&i| fg.variables[i].weights.len()).collect();
        let (table, _) = tensor::permute(&a.table, &dims, &perm);
        b.f(*fac, table);
    }
    for (i, v) in fg.variables.iter().enumerate() {
        let q = v.weights.len();
        let d = degree[i];
        let mut t = vec![0.0; q.pow(d as u32)];
        let stride: usize = (0..d).map(|k| q.pow(k as u32)).sum();
        for (x, &w) in v.weights.iter().enumerate() {
            t[x * stride] = w;
        }
        b.g(vars[i], t);
    }
    b.build()
}

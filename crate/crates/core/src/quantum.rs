//! Hermitian operators as real coordinate vectors, and the quantum model builders.
//!
//! Hermitian `q × q` matrices form a real inner-product space of dimension
//! `q²` under `Tr(AB)`. Coordinates are taken against the generalized
//! Gell-Mann basis, which is orthonormal for that inner product, so the Gram of
//! every edge space built here is the identity. Complex arithmetic never leaves
//! this module.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::cones::ConeKind;
use crate::error::{Error, Result};
use crate::model::{BipartiteModel, ModelBuilder};
use crate::spaces::Space;
use crate::tensor;

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-10;

/// Generalized Gell-Mann basis: `B₀ = I/√q`, then symmetric pairs, antisymmetric
/// pairs and diagonals, all traceless and Hilbert–Schmidt orthonormal.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    q: usize,
    elements: Vec<CMatrix>,
}

impl HermitianBasis {
    pub fn new(q: usize) -> HermitianBasis {
        assert!(q > 0);
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(q * q);
        elements.push(CMatrix::identity(q, q) * c(1.0 / (q as f64).sqrt(), 0.0));
        let pairs: Vec<(usize, usize)> = (0..q).flat_map(|j| (j + 1..q).map(move |k| (j, k))).collect();
        for &(j, k) in &pairs {
            let mut m = CMatrix::zeros(q, q);
            m[(j, k)] = c(s, 0.0);
            m[(k, j)] = c(s, 0.0);
            elements.push(m);
        }
        for &(j, k) in &pairs {
            let mut m = CMatrix::zeros(q, q);
            m[(j, k)] = c(0.0, -s);
            m[(k, j)] = c(0.0, s);
            elements.push(m);
        }
        for l in 1..q {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut m = CMatrix::zeros(q, q);
            for i in 0..l {
                m[(i, i)] = c(norm, 0.0);
            }
            m[(l, l)] = c(-(l as f64) * norm, 0.0);
            elements.push(m);
        }
        HermitianBasis { q, elements }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Index of the first diagonal (traceless) element.
    pub fn first_diagonal(&self) -> usize {
        1 + self.q * (self.q - 1)
    }

    pub fn coords(&self, a: &CMatrix) -> Vec<f64> {
        self.elements.iter().map(|b| hs_inner(a, b)).collect()
    }

    pub fn coords_to_herm(&self, coords: &[f64]) -> CMatrix {
        let mut a = CMatrix::zeros(self.q, self.q);
        for (x, b) in coords.iter().zip(&self.elements) {
            a += b * Complex64::new(*x, 0.0);
        }
        a
    }

    /// Per-site maps between operator entries `(i, j)` and coordinates.
    fn entry_to_coord(&self) -> CMatrix {
        let q = self.q;
        // Tr(A B_x) = Σ_ij A_ij (B_x)_ji
        CMatrix::from_fn(q * q, q * q, |x, ij| self.elements[x][(ij % q, ij / q)])
    }

    fn coord_to_entry(&self) -> CMatrix {
        let q = self.q;
        CMatrix::from_fn(q * q, q * q, |ij, x| self.elements[x][(ij / q, ij % q)])
    }
}

/// `Re Tr(AB)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s.re
}

fn hermiticity_defect(a: &CMatrix) -> f64 {
    (a - a.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn check_hermitian(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    let scale = a.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let deviation = hermiticity_defect(a);
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitian { deviation });
    }
    Ok(())
}

/// Coordinates of a Hermitian matrix: `x_k = Tr(A B_k)`.
pub fn herm_to_coords(a: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    Ok(HermitianBasis::new(a.nrows()).coords(a))
}

pub fn coords_to_herm(coords: &[f64]) -> Result<CMatrix> {
    let q = (coords.len() as f64).sqrt().round() as usize;
    if q * q != coords.len() || q == 0 {
        return Err(Error::DimensionMismatch { expected: q * q, found: coords.len() });
    }
    Ok(HermitianBasis::new(q).coords_to_herm(coords))
}

/// Coordinates of an operator on `⊗ C^{q_k}` in the product of per-site Gell-Mann bases,
/// row-major over sites.
pub fn operator_to_coords(a: &CMatrix, sites: &[usize]) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let n: usize = sites.iter().product();
    if a.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
    }
    let d = sites.len();
    // row-major entries, viewed as axes (i_1..i_d, j_1..j_d)
    let entries: Vec<Complex64> = (0..n * n).map(|k| a[(k / n, k % n)]).collect();
    let dims: Vec<usize> = sites.iter().chain(sites).copied().collect();
    let perm: Vec<usize> = (0..d).flat_map(|k| [k, d + k]).collect();
    let (paired, _) = tensor::permute(&entries, &dims, &perm);
    let pair_dims: Vec<usize> = sites.iter().map(|q| q * q).collect();
    let maps: Vec<CMatrix> = sites.iter().map(|&q| HermitianBasis::new(q).entry_to_coord()).collect();
    let refs: Vec<Option<&CMatrix>> = maps.iter().map(Some).collect();
    let (coords, _) = tensor::mode_products(&paired, &pair_dims, &refs);
    Ok(coords.iter().map(|z| z.re).collect())
}

pub fn coords_to_operator(coords: &[f64], sites: &[usize]) -> Result<CMatrix> {
    let pair_dims: Vec<usize> = sites.iter().map(|q| q * q).collect();
    let total: usize = pair_dims.iter().product();
    if coords.len() != total {
        return Err(Error::DimensionMismatch { expected: total, found: coords.len() });
    }
    let d = sites.len();
    let data: Vec<Complex64> = coords.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let maps: Vec<CMatrix> = sites.iter().map(|&q| HermitianBasis::new(q).coord_to_entry()).collect();
    let refs: Vec<Option<&CMatrix>> = maps.iter().map(Some).collect();
    let (entries, _) = tensor::mode_products(&data, &pair_dims, &refs);
    // axes (i_1, j_1, ..., i_d, j_d) back to (i_1..i_d, j_1..j_d)
    let dims: Vec<usize> = sites.iter().flat_map(|&q| [q, q]).collect();
    let perm: Vec<usize> = (0..d).map(|k| 2 * k).chain((0..d).map(|k| 2 * k + 1)).collect();
    let (flat, _) = tensor::permute(&entries, &dims, &perm);
    let n: usize = sites.iter().product();
    Ok(CMatrix::from_fn(n, n, |i, j| flat[i * n + j]))
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `A^p` for a positive definite Hermitian `A`.
pub(crate) fn hermitian_power(a: &CMatrix, p: f64) -> CMatrix {
    let eig = SymmetricEigen::new(a.clone());
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.powf(p), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// `A ⋆ B = A^{1/2} B A^{1/2}`.
pub fn star(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let r = hermitian_power(a, 0.5);
    &r * b * &r
}

fn check_psd(name: &str, a: &CMatrix) -> Result<()> {
    check_hermitian(a)?;
    let ev = hermitian_eigenvalues(a);
    let scale = ev.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    if ev[0] < -HERMITIAN_TOL * scale {
        return Err(Error::InvalidOperator(format!("{name} is not positive semidefinite (eigenvalue {:e})", ev[0])));
    }
    Ok(())
}

fn check_state(name: &str, rho: &CMatrix) -> Result<()> {
    check_psd(name, rho)?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::InvalidOperator(format!("{name} has trace {tr}, expected 1")));
    }
    Ok(())
}

fn check_effect(name: &str, p: &CMatrix) -> Result<()> {
    check_psd(name, p)?;
    let complement = CMatrix::identity(p.nrows(), p.ncols()) - p;
    check_psd(&format!("I - {name}"), &complement)
}

fn psd_space(q: usize) -> Space {
    Space::euclidean(q * q)
}

/// Outcome probability `Tr(ρP)` as a single-edge model.
pub fn build_measurement_model(rho: &CMatrix, p: &CMatrix) -> Result<BipartiteModel> {
    check_state("rho", rho)?;
    check_effect("P", p)?;
    if rho.nrows() != p.nrows() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), found: p.nrows() });
    }
    let mut b = ModelBuilder::new();
    let v = b.left("rho");
    let w = b.right("P");
    b.edge(v, w, psd_space(rho.nrows()), Some(ConeKind::PsdHermitian));
    b.f(v, herm_to_coords(rho)?);
    b.g(w, herm_to_coords(p)?);
    b.build()
}

/// Teleportation-type model: `τ` on Bob ⊗ A₁, `ρ` on A₂, effect `P` on Bob, `Q` on A₁ ⊗ A₂.
///
/// Edges are `(τ, P)` for Bob, `(τ, Q)` for A₁ and `(ρ, Q)` for A₂.
pub fn build_teleportation_model(tau: &CMatrix, rho: &CMatrix, p: &CMatrix, q: &CMatrix) -> Result<BipartiteModel> {
    check_state("tau", tau)?;
    check_state("rho", rho)?;
    check_effect("P", p)?;
    check_effect("Q", q)?;
    let d_bob = p.nrows();
    let d_a2 = rho.nrows();
    if !tau.nrows().is_multiple_of(d_bob) {
        return Err(Error::DimensionMismatch { expected: d_bob, found: tau.nrows() });
    }
    let d_a1 = tau.nrows() / d_bob;
    if q.nrows() != d_a1 * d_a2 {
        return Err(Error::DimensionMismatch { expected: d_a1 * d_a2, found: q.nrows() });
    }
    let mut b = ModelBuilder::new();
    let v1 = b.left("tau");
    let v2 = b.left("rho");
    let w1 = b.right("P");
    let w2 = b.right("Q");
    b.edge(v1, w1, psd_space(d_bob), Some(ConeKind::PsdHermitian));
    b.edge(v1, w2, psd_space(d_a1), Some(ConeKind::PsdHermitian));
    b.edge(v2, w2, psd_space(d_a2), Some(ConeKind::PsdHermitian));
    b.f(v1, operator_to_coords(tau, &[d_bob, d_a1])?);
    b.f(v2, herm_to_coords(rho)?);
    b.g(w1, herm_to_coords(p)?);
    b.g(w2, operator_to_coords(q, &[d_a1, d_a2])?);
    b.build()
}

/// Maximum number of graph vertices for graph-state models and the state-vector oracle.
pub const GRAPH_STATE_CAP: usize = 12;

/// A graph state together with one measurement outcome `|γ_i⟩` per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStateSpec {
    n: usize,
    edges: Vec<(usize, usize)>,
    outcomes: Vec<[Complex64; 2]>,
}

impl GraphStateSpec {
    /// Edges are normalized to `(min, max)` and sorted.
    pub fn new(n: usize, edges: &[(usize, usize)], outcomes: Vec<[Complex64; 2]>) -> Result<GraphStateSpec> {
        if outcomes.len() != n {
            return Err(Error::InvalidGraphState(format!("{} outcomes for {n} vertices", outcomes.len())));
        }
        let mut norm_edges = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraphState(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidGraphState(format!("self-loop at {a}")));
            }
            norm_edges.push((a.min(b), a.max(b)));
        }
        norm_edges.sort_unstable();
        let before = norm_edges.len();
        norm_edges.dedup();
        if norm_edges.len() != before {
            return Err(Error::InvalidGraphState("duplicate edge".into()));
        }
        for (i, g) in outcomes.iter().enumerate() {
            let norm = g[0].norm_sqr() + g[1].norm_sqr();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidGraphState(format!("outcome {i} has squared norm {norm}")));
            }
        }
        Ok(GraphStateSpec { n, edges: norm_edges, outcomes })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn outcomes(&self) -> &[[Complex64; 2]] {
        &self.outcomes
    }

    pub fn with_outcomes(&self, outcomes: Vec<[Complex64; 2]>) -> Result<GraphStateSpec> {
        GraphStateSpec::new(self.n, &self.edges, outcomes)
    }

    fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }
}

/// The MBQC outcome probability as a PSD-cone bipartite model.
///
/// Graph vertices become left vertices carrying `P_i† |γ_i⟩⟨γ_i| P_i`, graph
/// edges become right vertices carrying `|Ω⟩⟨Ω|` with `|Ω⟩ = CZ |+⟩|+⟩`, and the
/// model scale is `2^{2|E| - |V|}`. Isolated vertices contribute the scalar
/// `|γ₀ + γ₁|²` to the scale.
pub fn build_mbqc_model(spec: &GraphStateSpec) -> Result<BipartiteModel> {
    if spec.n > GRAPH_STATE_CAP {
        return Err(Error::CapExceeded { size: spec.n, cap: GRAPH_STATE_CAP });
    }
    let c = |re: f64| Complex64::new(re, 0.0);
    let mut scale = 2f64.powi(2 * spec.edges.len() as i32 - spec.n as i32);

    let mut b = ModelBuilder::new();
    let mut left = vec![None; spec.n];
    for (i, slot) in left.iter_mut().enumerate() {
        let deg = spec.neighbors(i).len();
        let [g0, g1] = spec.outcomes[i];
        if deg == 0 {
            scale *= (g0 + g1).norm_sqr();
            continue;
        }
        let v = b.left(&format!("q{i}"));
        *slot = Some(v);
        // P_i† |γ⟩ = γ₀ |0…0⟩ + γ₁ |1…1⟩
        let dim = 1usize << deg;
        let mut phi = nalgebra::DVector::<Complex64>::zeros(dim);
        phi[0] = g0;
        phi[dim - 1] = g1;
        let f = &phi * phi.adjoint();
        b.f(v, operator_to_coords(&f, &vec![2; deg])?);
    }

    let omega = nalgebra::DVector::from_vec(vec![c(0.5), c(0.5), c(0.5), c(-0.5)]);
    let omega_proj = &omega * omega.adjoint();
    let omega_coords = operator_to_coords(&omega_proj, &[2, 2])?;
    for &(i, j) in &spec.edges {
        let w = b.right(&format!("e{i}_{j}"));
        b.edge(left[i].unwrap(), w, psd_space(2), Some(ConeKind::PsdHermitian));
        b.edge(left[j].unwrap(), w, psd_space(2), Some(ConeKind::PsdHermitian));
        b.g(w, omega_coords.clone());
    }
    b.scale(scale);
    b.build()
}

/// `|⟨⊗γ_i | G⟩|²` from a dense state vector; vertex 0 is the most significant bit.
pub fn statevector_probability(spec: &GraphStateSpec) -> Result<f64> {
    let n = spec.n;
    if n > GRAPH_STATE_CAP {
        return Err(Error::CapExceeded { size: n, cap: GRAPH_STATE_CAP });
    }
    let amp0 = 2f64.powf(-(n as f64) / 2.0);
    let bit = |x: usize, i: usize| (x >> (n - 1 - i)) & 1;
    let mut overlap = Complex64::new(0.0, 0.0);
    for x in 0..(1usize << n) {
        let parity = spec.edges.iter().filter(|&&(a, b)| bit(x, a) == 1 && bit(x, b) == 1).count();
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
        let mut bra = Complex64::new(1.0, 0.0);
        for i in 0..n {
            bra *= spec.outcomes[i][bit(x, i)].conj();
        }
        overlap += bra * sign * amp0;
    }
    Ok(overlap.norm_sqr())
}

/// Re-expresses a classical (orthant, Euclidean) model with diagonal operators on PSD edges.
pub fn embed_classical(model: &BipartiteModel) -> Result<BipartiteModel> {
    let mut maps = Vec::with_capacity(model.edges().len());
    let mut spaces = Vec::with_capacity(model.edges().len());
    for (e, edge) in model.edges().iter().enumerate() {
        if !matches!(edge.cone, Some(ConeKind::NonnegativeOrthant)) || !edge.space.is_euclidean() {
            return Err(Error::UnsupportedCone { edge: e, reason: "only Euclidean orthant edges embed diagonally".into() });
        }
        let q = edge.space.dim();
        let basis = HermitianBasis::new(q);
        let cols: Vec<Vec<f64>> = (0..q)
            .map(|x| {
                let mut d = CMatrix::zeros(q, q);
                d[(x, x)] = Complex64::new(1.0, 0.0);
                basis.coords(&d)
            })
            .collect();
        maps.push(DMatrix::from_fn(q * q, q, |r, x| cols[x][r]));
        spaces.push(psd_space(q));
    }
    let lift = |incident: &[usize], coeffs: &[f64]| {
        let dims: Vec<usize> = incident.iter().map(|&e| model.edges()[e].space.dim()).collect();
        let mats: Vec<Option<&DMatrix<f64>>> = incident.iter().map(|&e| Some(&maps[e])).collect();
        tensor::mode_products(coeffs, &dims, &mats).0
    };
    let f = (0..model.n_left()).map(|v| lift(model.left_incident(v), model.f(v).coeffs())).collect();
    let g = (0..model.n_right()).map(|w| lift(model.right_incident(w), model.g(w).coeffs())).collect();
    model.rebuild(spaces, vec![Some(ConeKind::PsdHermitian); model.edges().len()], f, g)
}

//! Small named models and seeded generators for tests, examples and benchmarks.
//!
//! Random tensors are sums of a few product tensors whose factors lie in the
//! edge cones (`f` side) or their duals (`g` side), so BP messages stay in the
//! cone interiors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cones::ConeKind;
use crate::model::{BipartiteModel, FactorGraph, ModelBuilder};
use crate::quantum::{herm_to_coords, CMatrix, GraphStateSpec};
use crate::spaces::Space;
use crate::tensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `f = (1, 2)`, `g = (3, 4)` on one binary orthant edge; value 11.
pub fn single_edge() -> BipartiteModel {
    let mut b = ModelBuilder::new();
    let v = b.left("v");
    let w = b.right("w");
    b.edge(v, w, Space::euclidean(2), Some(ConeKind::NonnegativeOrthant));
    b.f(v, vec![1.0, 2.0]);
    b.g(w, vec![3.0, 4.0]);
    b.build().expect("valid fixture")
}

/// Two left and two right vertices, all four binary edges, equality tensors everywhere; value 2.
pub fn four_cycle_equality() -> BipartiteModel {
    let mut b = ModelBuilder::new();
    let v = [b.left("v1"), b.left("v2")];
    let w = [b.right("w1"), b.right("w2")];
    for &vi in &v {
        for &wj in &w {
            b.edge(vi, wj, Space::euclidean(2), Some(ConeKind::NonnegativeOrthant));
        }
    }
    let eq = vec![1.0, 0.0, 0.0, 1.0];
    for &vi in &v {
        b.f(vi, eq.clone());
    }
    for &wj in &w {
        b.g(wj, eq.clone());
    }
    b.build().expect("valid fixture")
}

/// Edge kinds the random generators draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Euclidean orthant edge of the given dimension.
    Orthant(usize),
    /// Orthant edge with a random positive definite Gram.
    OrthantGram(usize),
    /// Qubit PSD edge (dimension 4).
    Qubit,
}

fn make_space(kind: EdgeKind, rng: &mut impl Rng) -> (Space, ConeKind) {
    match kind {
        EdgeKind::Orthant(d) => (Space::euclidean(d), ConeKind::NonnegativeOrthant),
        EdgeKind::OrthantGram(d) => {
            let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-0.3..0.3));
            let k = DMatrix::identity(d, d) + &a * a.transpose();
            (Space::with_gram(k).expect("positive definite"), ConeKind::NonnegativeOrthant)
        }
        EdgeKind::Qubit => (Space::euclidean(4), ConeKind::PsdHermitian),
    }
}

/// Random full-rank qubit density-like operator, in coordinates.
fn random_pd_coords(rng: &mut impl Rng, q: usize) -> Vec<f64> {
    let a = CMatrix::from_fn(q, q, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let p = &a * a.adjoint() + CMatrix::identity(q, q) * Complex64::new(0.2, 0.0);
    herm_to_coords(&p).expect("Hermitian by construction")
}

/// A random point strictly inside the edge cone (`dual = false`) or its dual.
fn random_cone_point(rng: &mut impl Rng, space: &Space, cone: &ConeKind, dual: bool) -> Vec<f64> {
    match cone {
        ConeKind::PsdHermitian => {
            let q = (space.dim() as f64).sqrt().round() as usize;
            random_pd_coords(rng, q)
        }
        _ => {
            let p: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(0.2..1.0)).collect();
            // K c ∈ C for the dual side
            if dual {
                space.raise(&p)
            } else {
                p
            }
        }
    }
}

/// Sum of `rank` product tensors over the given edges.
fn separable_tensor(rng: &mut impl Rng, edges: &[(Space, ConeKind)], dual: bool, rank: usize) -> Vec<f64> {
    let n: usize = edges.iter().map(|(s, _)| s.dim()).product();
    let mut out = vec![0.0; n];
    for _ in 0..rank {
        let factors: Vec<Vec<f64>> = edges.iter().map(|(s, c)| random_cone_point(rng, s, c, dual)).collect();
        let refs: Vec<&[f64]> = factors.iter().map(Vec::as_slice).collect();
        for (o, x) in out.iter_mut().zip(tensor::outer(&refs)) {
            *o += x;
        }
    }
    out
}

/// Builds a model over an explicit bipartite edge list with random separable tensors.
pub fn random_cone_model(
    n_left: usize,
    n_right: usize,
    edges: &[(usize, usize, EdgeKind)],
    rank: usize,
    rng: &mut impl Rng,
) -> BipartiteModel {
    let mut b = ModelBuilder::new();
    for i in 0..n_left {
        b.left(&format!("v{i}"));
    }
    for j in 0..n_right {
        b.right(&format!("w{j}"));
    }
    let mut sorted: Vec<(usize, usize, EdgeKind)> = edges.to_vec();
    sorted.sort_by_key(|&(l, r, _)| (l, r));
    let spaces: Vec<(Space, ConeKind)> = sorted.iter().map(|&(_, _, k)| make_space(k, rng)).collect();
    for ((l, r, _), (s, c)) in sorted.iter().zip(&spaces) {
        b.edge(*l, *r, s.clone(), Some(c.clone()));
    }
    for v in 0..n_left {
        let inc: Vec<(Space, ConeKind)> =
            sorted.iter().zip(&spaces).filter(|((l, _, _), _)| *l == v).map(|(_, sc)| sc.clone()).collect();
        let t = separable_tensor(rng, &inc, false, rank);
        b.f(v, t);
    }
    for w in 0..n_right {
        // canonical order on the right is by left index, which `sorted` already follows
        let inc: Vec<(Space, ConeKind)> =
            sorted.iter().zip(&spaces).filter(|((_, r, _), _)| *r == w).map(|(_, sc)| sc.clone()).collect();
        let t = separable_tensor(rng, &inc, true, rank);
        b.g(w, t);
    }
    b.build().expect("generated model is valid")
}

/// Cycle of length `2·len`: `v_i` joined to `w_i` and `w_{i+1}`.
pub fn cycle_edges(len: usize, kind: EdgeKind) -> Vec<(usize, usize, EdgeKind)> {
    (0..len).flat_map(|i| [(i, i, kind), (i, (i + 1) % len, kind)]).collect()
}

/// Random cycle model with `2·len` edges.
pub fn cycle_model(len: usize, kind: EdgeKind, seed: u64) -> BipartiteModel {
    random_cone_model(len, len, &cycle_edges(len, kind), 2, &mut rng(seed))
}

/// Two left vertices joined to three right vertices: three 4-cycles sharing edges.
pub fn fused_cycles(kind: EdgeKind, seed: u64) -> BipartiteModel {
    let edges: Vec<_> = (0..2).flat_map(|v| (0..3).map(move |w| (v, w, kind))).collect();
    random_cone_model(2, 3, &edges, 2, &mut rng(seed))
}

/// Two vertex-disjoint 4-cycles.
pub fn two_disjoint_four_cycles(seed: u64) -> BipartiteModel {
    let k = EdgeKind::Orthant(2);
    let mut edges = cycle_edges(2, k);
    edges.extend(cycle_edges(2, k).into_iter().map(|(l, r, k)| (l + 2, r + 2, k)));
    random_cone_model(4, 4, &edges, 2, &mut rng(seed))
}

/// Path `v0 - w0 - v1 - w1 - …` with `n_edges` edges.
pub fn path_model(n_edges: usize, kind: EdgeKind, seed: u64) -> BipartiteModel {
    let edges: Vec<_> = (0..n_edges).map(|k| (k.div_ceil(2), k / 2, kind)).collect();
    let n_left = (n_edges / 2) + 1;
    let n_right = n_edges.div_ceil(2);
    random_cone_model(n_left, n_right, &edges, 2, &mut rng(seed))
}

/// Random tree on 2 to `max_vertices` vertices, degree at most 3, mixing
/// Euclidean orthant, Gram orthant and qubit PSD edges.
pub fn random_tree_model(seed: u64, max_vertices: usize) -> BipartiteModel {
    let mut r = rng(seed);
    let n = r.random_range(2..=max_vertices.max(2));
    // side[k]: false = left; each new vertex hangs off an earlier one on the other side
    let mut side = vec![false];
    let mut degree = vec![0usize];
    let mut links = Vec::new();
    for k in 1..n {
        let candidates: Vec<usize> = (0..k).filter(|&p| degree[p] < 3).collect();
        let parent = candidates[r.random_range(0..candidates.len())];
        side.push(!side[parent]);
        degree.push(1);
        degree[parent] += 1;
        links.push((parent, k));
    }
    let mut index = vec![0usize; n];
    let (mut nl, mut nr) = (0, 0);
    for k in 0..n {
        if side[k] {
            index[k] = nr;
            nr += 1;
        } else {
            index[k] = nl;
            nl += 1;
        }
    }
    let edges: Vec<(usize, usize, EdgeKind)> = links
        .iter()
        .map(|&(a, b)| {
            let (l, rr) = if side[a] { (b, a) } else { (a, b) };
            let kind = match r.random_range(0..4) {
                0 => EdgeKind::Qubit,
                1 => EdgeKind::OrthantGram(r.random_range(2..=3)),
                _ => EdgeKind::Orthant(r.random_range(2..=3)),
            };
            (index[l], index[rr], kind)
        })
        .collect();
    random_cone_model(nl, nr, &edges, 2, &mut r)
}

/// Random model for gauge experiments: 1 to 6 vertices per side, edge dims 1 to 4,
/// random Grams on some edges, at most `max_edges` edges, positive entries, no cones.
pub fn random_model(seed: u64, max_edges: usize) -> BipartiteModel {
    let mut r = rng(seed);
    loop {
        let nl = r.random_range(1..=6);
        let nr = r.random_range(1..=6);
        let mut pairs: Vec<(usize, usize)> = (0..nl).flat_map(|v| (0..nr).map(move |w| (v, w))).collect();
        // shuffle, then take a spanning-ish subset
        for i in (1..pairs.len()).rev() {
            let j = r.random_range(0..=i);
            pairs.swap(i, j);
        }
        let m = r.random_range(nl.max(nr)..=max_edges.max(nl.max(nr)));
        let chosen: Vec<(usize, usize)> = pairs.into_iter().take(m).collect();
        let covered_l = (0..nl).all(|v| chosen.iter().any(|&(a, _)| a == v));
        let covered_r = (0..nr).all(|w| chosen.iter().any(|&(_, b)| b == w));
        if !covered_l || !covered_r {
            continue;
        }
        let mut b = ModelBuilder::new();
        for i in 0..nl {
            b.left(&format!("v{i}"));
        }
        for j in 0..nr {
            b.right(&format!("w{j}"));
        }
        for &(v, w) in &chosen {
            let d = r.random_range(1..=4);
            let space = if r.random_bool(0.3) {
                let a = DMatrix::from_fn(d, d, |_, _| r.random_range(-0.5..0.5));
                Space::with_gram(DMatrix::identity(d, d) + &a * a.transpose()).expect("positive definite")
            } else {
                Space::euclidean(d)
            };
            b.edge(v, w, space, None);
        }
        let mut model = b.build_unchecked();
        let fill = |dims: Vec<usize>, r: &mut ChaCha8Rng| (0..dims.iter().product()).map(|_| r.random_range(0.1..1.0)).collect();
        let f: Vec<Vec<f64>> = (0..nl).map(|v| fill(model.left_dims(v), &mut r)).collect();
        let g: Vec<Vec<f64>> = (0..nr).map(|w| fill(model.right_dims(w), &mut r)).collect();
        model = model
            .rebuild(model.edges().iter().map(|e| e.space.clone()).collect(), vec![None; chosen.len()], f, g)
            .expect("generated model is valid");
        return model;
    }
}

/// Random factor graph: 1 to `max_vars` variables with alphabets 1 to `max_alphabet`,
/// factors of arity 1 to 3 covering every variable.
pub fn random_factor_graph(seed: u64, max_vars: usize, max_alphabet: usize) -> FactorGraph {
    let mut r = rng(seed);
    let n = r.random_range(1..=max_vars);
    let mut fg = FactorGraph::new();
    for i in 0..n {
        let q = r.random_range(1..=max_alphabet);
        fg.add_variable(&format!("x{i}"), (0..q).map(|_| r.random_range(0.5..1.5)).collect());
    }
    let n_factors = r.random_range(1..=n + 2);
    let mut covered = vec![false; n];
    for a in 0..n_factors + n {
        let scope: Vec<usize> = if a < n_factors {
            let arity = r.random_range(1..=3.min(n));
            let mut s: Vec<usize> = Vec::new();
            while s.len() < arity {
                let i = r.random_range(0..n);
                if !s.contains(&i) {
                    s.push(i);
                }
            }
            s
        } else if !covered[a - n_factors] {
            vec![a - n_factors]
        } else {
            continue;
        };
        for &i in &scope {
            covered[i] = true;
        }
        let size: usize = scope.iter().map(|&i| fg.variables[i].weights.len()).product();
        let table = (0..size).map(|_| r.random_range(0.0..1.0)).collect();
        fg.add_factor(&format!("a{}", fg.factors.len()), scope, table);
    }
    fg
}

pub fn path_graph(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

pub fn cycle_graph(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

/// Vertex 0 joined to every other vertex.
pub fn star_graph(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (0, i)).collect()
}

/// `rows × cols` grid, vertices numbered row-major.
pub fn grid_graph(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let id = |r: usize, c: usize| r * cols + c;
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                out.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                out.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    out
}

/// A random unit vector in `C²` with both components bounded away from zero.
pub fn random_outcome(rng: &mut impl Rng) -> [Complex64; 2] {
    let theta: f64 = rng.random_range(0.3..1.27);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    [Complex64::new(theta.cos(), 0.0), Complex64::from_polar(theta.sin(), phase)]
}

pub fn random_outcomes(n: usize, rng: &mut impl Rng) -> Vec<[Complex64; 2]> {
    (0..n).map(|_| random_outcome(rng)).collect()
}

/// `(|0⟩ + e^{iφ}|1⟩)/√2` with a random phase: a measurement in the X–Y plane.
pub fn random_equatorial_outcome(rng: &mut impl Rng) -> [Complex64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    [Complex64::new(s, 0.0), Complex64::from_polar(s, phase)]
}

/// Every computational-basis outcome tuple on `n` qubits, vertex 0 most significant.
pub fn basis_outcomes(n: usize, bits: usize) -> Vec<[Complex64; 2]> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    (0..n).map(|i| if (bits >> (n - 1 - i)) & 1 == 0 { [one, zero] } else { [zero, one] }).collect()
}

/// Graph state on a `rows × cols` grid with random X–Y plane outcomes.
///
/// With unequal outcome amplitudes, BP around a cycle acts on each message by a
/// fixed congruence and drives it to rank one, where frames do not exist. Equal
/// amplitudes keep the messages at the identity.
pub fn mbqc_grid(rows: usize, cols: usize, seed: u64) -> GraphStateSpec {
    let n = rows * cols;
    let mut r = rng(seed);
    let outcomes = (0..n).map(|_| random_equatorial_outcome(&mut r)).collect();
    GraphStateSpec::new(n, &grid_graph(rows, cols), outcomes).expect("valid graph state")
}

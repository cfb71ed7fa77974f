//! Loop calculus around a BP fixed point.
//!
//! At a fixed point every edge gets two biorthogonal frames: `Φ(e_x)` with
//! `Φ(e₀) = m_{v→w}`, and `Φ̂*(e_x)` with `Φ̂*(e₀) = m_{w→v} / ⟨m_{v→w}, m_{w→v}⟩`.
//! For `x ≥ 1`, with `M = m_{v→w}`, `N = m_{w→v}` read as Hermitian matrices
//! (diagonal ones for orthant edges) and `T_x` an orthonormal traceless family,
//!
//! ```text
//! Φ̂*(e_x) = M^{-1/2} T_x M^{-1/2}
//! Φ(e_x)   = M^{1/2} (T_x − Tr(b T_x) I) M^{1/2},   b = M^{1/2} N M^{1/2} / Tr(M N)
//! ```
//!
//! Gauging the model by these frames and expanding in orthonormal coordinates
//! writes the value as a sum over edge assignments. The all-zero assignment
//! is the Bethe value; at a fixed point every other assignment whose support
//! has a vertex of degree one vanishes, leaving the generalized loops.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bp::{fixed_point_residual, BpResult, MessageSet};
use crate::cones::ConeKind;
use crate::error::{Direction, Error, Result};
use crate::holographic::{apply_gauge, GaugeMap};
use crate::model::BipartiteModel;
use crate::quantum::{hermitian_eigenvalues, hermitian_power, CMatrix, HermitianBasis};
use crate::tensor::MultiIndex;

/// Fixed-point residual above which frames are refused.
pub const FIXED_POINT_CERTIFICATE: f64 = 1e-8;
/// Smallest admissible message eigenvalue (orthant: entry).
pub const MESSAGE_FLOOR: f64 = 1e-9;
/// Largest edge count for subset enumeration.
pub const LOOP_EDGE_CAP: usize = 24;
/// Largest number of assignments [`loop_series`] will evaluate.
pub const LOOP_TERM_CAP: usize = 1 << 22;

/// Biorthogonal frame vectors of one edge, in storage coordinates.
#[derive(Debug, Clone)]
pub struct EdgeFrame {
    /// `Φ(e_x)`, `x = 0..dim`.
    pub phi: Vec<Vec<f64>>,
    /// `Φ̂*(e_x)`, `x = 0..dim`.
    pub phi_hat_star: Vec<Vec<f64>>,
}

impl EdgeFrame {
    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    /// Matrix whose column `x` is `Φ(e_x)`.
    pub fn phi_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, x| self.phi[x][i])
    }

    pub fn phi_hat_star_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, x| self.phi_hat_star[x][i])
    }
}

fn frame_cone(m: &BipartiteModel, e: usize) -> Result<&ConeKind> {
    match &m.edges()[e].cone {
        None => Err(Error::MissingCone { edge: e }),
        Some(ConeKind::Custom(_)) => Err(Error::UnsupportedCone {
            edge: e,
            reason: "frames are defined for orthant and PSD edges only".into(),
        }),
        Some(c) => Ok(c),
    }
}

/// Frames for every edge at a certified fixed point.
pub fn build_edge_frames(m: &BipartiteModel, fp: &BpResult) -> Result<Vec<EdgeFrame>> {
    build_edge_frames_from(m, &fp.messages)
}

pub fn build_edge_frames_from(m: &BipartiteModel, msgs: &MessageSet) -> Result<Vec<EdgeFrame>> {
    let residual = fixed_point_residual(m, msgs)?;
    if !(residual <= FIXED_POINT_CERTIFICATE) {
        return Err(Error::NonFixedPoint { residual });
    }
    frames_unchecked(m, msgs)
}

/// Frames from arbitrary cone-interior messages, skipping fixed-point certification.
pub fn frames_unchecked(m: &BipartiteModel, msgs: &MessageSet) -> Result<Vec<EdgeFrame>> {
    (0..m.edges().len())
        .map(|e| {
            let space = &m.edges()[e].space;
            let mv = &msgs.to_right[e];
            // pairing through the Gram becomes a plain dot product against K n
            let n_low = space.lower(&msgs.to_left[e]);
            let (phi, b_low) = match frame_cone(m, e)? {
                ConeKind::NonnegativeOrthant => orthant_frame(e, mv, &n_low)?,
                ConeKind::PsdHermitian => psd_frame(e, mv, &n_low)?,
                ConeKind::Custom(_) => unreachable!(),
            };
            let phi_hat_star = b_low.iter().map(|b| space.raise(b)).collect();
            Ok(EdgeFrame { phi, phi_hat_star })
        })
        .collect()
}

type FramePair = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn orthant_frame(e: usize, m: &[f64], n: &[f64]) -> Result<FramePair> {
    let q = m.len();
    let floor = |v: &[f64], direction| {
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        if min > MESSAGE_FLOOR {
            Ok(())
        } else {
            Err(Error::SingularMessage { edge: e, direction, min_eigenvalue: min })
        }
    };
    floor(m, Direction::LeftToRight)?;
    floor(n, Direction::RightToLeft)?;
    let p: f64 = m.iter().zip(n).map(|(a, b)| a * b).sum();
    let b: Vec<f64> = m.iter().zip(n).map(|(a, c)| a * c / p).collect();
    let mut phi = vec![m.to_vec()];
    let mut dual = vec![n.iter().map(|x| x / p).collect::<Vec<_>>()];
    for l in 1..q {
        let t = diagonal_gell_mann(q, l);
        let c: f64 = b.iter().zip(&t).map(|(x, y)| x * y).sum();
        phi.push(m.iter().zip(&t).map(|(mi, ti)| mi * (ti - c)).collect());
        dual.push(m.iter().zip(&t).map(|(mi, ti)| ti / mi).collect());
    }
    Ok((phi, dual))
}

/// `diag(1, …, 1, −l, 0, …) / √(l(l+1))` of length `q`.
fn diagonal_gell_mann(q: usize, l: usize) -> Vec<f64> {
    let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
    (0..q)
        .map(|i| match i.cmp(&l) {
            std::cmp::Ordering::Less => norm,
            std::cmp::Ordering::Equal => -(l as f64) * norm,
            std::cmp::Ordering::Greater => 0.0,
        })
        .collect()
}

fn psd_frame(e: usize, m: &[f64], n: &[f64]) -> Result<FramePair> {
    let q = (m.len() as f64).sqrt().round() as usize;
    let basis = HermitianBasis::new(q);
    let mm = basis.coords_to_herm(m);
    let nn = basis.coords_to_herm(n);
    for (mat, direction) in [(&mm, Direction::LeftToRight), (&nn, Direction::RightToLeft)] {
        let min = hermitian_eigenvalues(mat)[0];
        if !(min > MESSAGE_FLOOR) {
            return Err(Error::SingularMessage { edge: e, direction, min_eigenvalue: min });
        }
    }
    let p: f64 = m.iter().zip(n).map(|(a, b)| a * b).sum();
    let root = hermitian_power(&mm, 0.5);
    let inv_root = hermitian_power(&mm, -0.5);
    let b: CMatrix = (&root * &nn * &root) / Complex64::new(p, 0.0);
    let id = CMatrix::identity(q, q);
    let mut phi = vec![m.to_vec()];
    let mut dual = vec![n.iter().map(|x| x / p).collect::<Vec<_>>()];
    for t in &basis.elements()[1..] {
        let c = (&b * t).trace().re;
        let shifted = t - &id * Complex64::new(c, 0.0);
        phi.push(basis.coords(&(&root * shifted * &root)));
        dual.push(basis.coords(&(&inv_root * t * &inv_root)));
    }
    Ok((phi, dual))
}

/// `max |⟨Φ(e_x), Φ̂*(e_y)⟩ − δ(x, y)|` over all edges.
pub fn biorthogonality_residual(m: &BipartiteModel, frames: &[EdgeFrame]) -> f64 {
    let mut worst = 0.0f64;
    for (edge, fr) in m.edges().iter().zip(frames) {
        for (x, a) in fr.phi.iter().enumerate() {
            for (y, b) in fr.phi_hat_star.iter().enumerate() {
                let target = if x == y { 1.0 } else { 0.0 };
                worst = worst.max((edge.space.pair(a, b) - target).abs());
            }
        }
    }
    worst
}

/// Gauge with `Φ_e ẽ_x = Φ(e_x)` for the orthonormal basis `ẽ_x` (columns of `K^{-1/2}`).
pub fn frame_gauge(m: &BipartiteModel, frames: &[EdgeFrame]) -> Result<GaugeMap> {
    let phi = m
        .edges()
        .iter()
        .zip(frames)
        .map(|(edge, fr)| Ok(fr.phi_matrix() * edge.space.gram_power(0.5)?))
        .collect::<Result<Vec<_>>>()?;
    GaugeMap::new(m, phi)
}

/// `max_e ‖Φ̂_e − K^{-1/2} Bᵀ K‖` where `B` holds the `Φ̂*(e_x)`: the inverse
/// predicted by biorthogonality against the one computed numerically.
pub fn frame_gauge_defect(m: &BipartiteModel, frames: &[EdgeFrame], gauge: &GaugeMap) -> Result<f64> {
    let mut worst = 0.0f64;
    for (e, (edge, fr)) in m.edges().iter().zip(frames).enumerate() {
        let predicted = edge.space.gram_power(-0.5)? * fr.phi_hat_star_matrix().transpose() * edge.space.gram();
        worst = worst.max((predicted - gauge.phi_inv(e)).amax());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingReport {
    /// Largest `|⟨f_v, Φ̂*(e_x) ⊗ (⊗Φ̂*(e₀))⟩|` or `|⟨Φ(e_x) ⊗ (⊗Φ(e₀)), g_w⟩|` over edges and `x ≥ 1`.
    pub max_abs: f64,
    /// The same pairings divided by the vertex's all-zero pairing.
    pub max_rel: f64,
}

/// The single-excitation pairings at every vertex, which vanish at a fixed point.
pub fn check_vanishing_conditions(m: &BipartiteModel, frames: &[EdgeFrame]) -> VanishingReport {
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut visit = |incident: &[usize], t: &crate::model::VertexTensor, vecs: &dyn Fn(usize, usize) -> Vec<f64>| {
        let ground: Vec<Vec<f64>> = incident.iter().map(|&e| m.edges()[e].space.lower(&vecs(e, 0))).collect();
        let refs: Vec<&[f64]> = ground.iter().map(Vec::as_slice).collect();
        let base = crate::tensor::contract_rank_one(t.coeffs(), &t.shape, &refs).abs();
        for (pos, &e) in incident.iter().enumerate() {
            for x in 1..m.edges()[e].space.dim() {
                let excited = m.edges()[e].space.lower(&vecs(e, x));
                let mut r = refs.clone();
                r[pos] = &excited;
                let val = crate::tensor::contract_rank_one(t.coeffs(), &t.shape, &r).abs();
                max_abs = max_abs.max(val);
                max_rel = max_rel.max(if base > 0.0 { val / base } else { f64::INFINITY });
            }
        }
    };
    for v in 0..m.n_left() {
        visit(m.left_incident(v), m.f(v), &|e, x| frames[e].phi_hat_star[x].clone());
    }
    for w in 0..m.n_right() {
        visit(m.right_incident(w), m.g(w), &|e, x| frames[e].phi[x].clone());
    }
    VanishingReport { max_abs, max_rel }
}

fn is_generalized_loop(m: &BipartiteModel, mask: u64) -> bool {
    let mut dl = vec![0u8; m.n_left()];
    let mut dr = vec![0u8; m.n_right()];
    for (k, e) in m.edges().iter().enumerate() {
        if mask >> k & 1 == 1 {
            dl[e.left] = dl[e.left].saturating_add(1);
            dr[e.right] = dr[e.right].saturating_add(1);
        }
    }
    dl.iter().chain(&dr).all(|&d| d != 1)
}

fn mask_edges(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&k| mask >> k & 1 == 1).collect()
}

/// Every nonempty edge subset in which each vertex has degree 0 or at least 2,
/// in binary-counting order over the canonical edge order.
pub fn enumerate_generalized_loops(m: &BipartiteModel) -> Result<Vec<Vec<usize>>> {
    let n = m.edges().len();
    if n > LOOP_EDGE_CAP {
        return Err(Error::CapExceeded { size: n, cap: LOOP_EDGE_CAP });
    }
    Ok((1u64..1 << n).filter(|&s| is_generalized_loop(m, s)).map(|s| mask_edges(s, n)).collect())
}

/// One nonzero-support assignment of the expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopTerm {
    /// Edges with a nonzero index, ascending.
    pub support: Vec<usize>,
    /// Index `x_e ≥ 1` for each support edge, aligned with `support`.
    pub assignment: Vec<usize>,
    /// Weight relative to the all-zero assignment.
    pub weight: f64,
}

impl LoopTerm {
    /// `x_e` for any edge, 0 off the support.
    pub fn index(&self, edge: usize) -> usize {
        self.support.iter().position(|&k| k == edge).map_or(0, |p| self.assignment[p])
    }
}

#[derive(Debug, Clone)]
pub struct LoopSeries {
    pub bethe: f64,
    /// Terms supported on generalized loops, ordered by support mask then assignment.
    pub terms: Vec<LoopTerm>,
    /// `bethe · (1 + Σ weights)` over `terms`.
    pub partial_sum: f64,
    /// Whether every support size was enumerated.
    pub is_exhaustive: bool,
    pub max_support: usize,
    /// Largest `|weight|` among supports that are not generalized loops.
    pub max_nonloop_weight: f64,
    pub nonloop_terms: usize,
}

impl LoopSeries {
    /// Terms summed per support, in the order supports first appear.
    pub fn support_weights(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out: Vec<(Vec<usize>, f64)> = Vec::new();
        for t in &self.terms {
            match out.last_mut() {
                Some((s, w)) if *s == t.support => *w += t.weight,
                _ => out.push((t.support.clone(), t.weight)),
            }
        }
        out
    }
}

/// Number of assignments with at most `k` excited edges.
fn assignment_count(dims: &[usize], k: usize) -> f64 {
    // coefficients of ∏ (1 + (q_e − 1) t), truncated at degree k
    let mut poly = vec![0.0f64; k + 1];
    poly[0] = 1.0;
    for &q in dims {
        for j in (1..=k).rev() {
            poly[j] += poly[j - 1] * (q as f64 - 1.0);
        }
    }
    poly.iter().sum()
}

/// Expands the model around the fixed point `fp`, enumerating supports of up to `max_support` edges.
pub fn loop_series(m: &BipartiteModel, fp: &BpResult, max_support: usize) -> Result<LoopSeries> {
    let frames = build_edge_frames(m, fp)?;
    loop_series_with_frames(m, &frames, max_support)
}

pub fn loop_series_with_frames(m: &BipartiteModel, frames: &[EdgeFrame], max_support: usize) -> Result<LoopSeries> {
    let n = m.edges().len();
    if n > LOOP_EDGE_CAP {
        return Err(Error::CapExceeded { size: n, cap: LOOP_EDGE_CAP });
    }
    let k = max_support.min(n);
    let dims: Vec<usize> = m.edges().iter().map(|e| e.space.dim()).collect();
    let count = assignment_count(&dims, k);
    if count > LOOP_TERM_CAP as f64 {
        return Err(Error::CapExceeded { size: count.min(usize::MAX as f64) as usize, cap: LOOP_TERM_CAP });
    }

    let gauge = frame_gauge(m, frames)?;
    let gauged = apply_gauge(m, &gauge)?;
    let ortho = m.edges().iter().map(|e| e.space.gram_power(-0.5)).collect::<Result<Vec<_>>>()?;
    let (fc, gc) = gauged.tensors_in_bases(&ortho);

    // per vertex: flat index = Σ_e x_e · stride(v, e)
    let stride_table = |incident: &[usize]| {
        let mut s = vec![0usize; n];
        let mut acc = 1;
        for &e in incident.iter().rev() {
            s[e] = acc;
            acc *= dims[e];
        }
        s
    };
    let lstride: Vec<Vec<usize>> = (0..m.n_left()).map(|v| stride_table(m.left_incident(v))).collect();
    let rstride: Vec<Vec<usize>> = (0..m.n_right()).map(|w| stride_table(m.right_incident(w))).collect();

    let ground: f64 = fc.iter().map(|t| t[0]).chain(gc.iter().map(|t| t[0])).product();
    let bethe = m.scale() * ground;
    if ground == 0.0 || !ground.is_finite() {
        return Err(Error::DegenerateBethe { value: bethe });
    }

    let mut terms = Vec::new();
    let mut max_nonloop_weight = 0.0f64;
    let mut nonloop_terms = 0usize;
    let mut sum = 0.0;
    for mask in 1u64..1 << n {
        if mask.count_ones() as usize > k {
            continue;
        }
        let support = mask_edges(mask, n);
        let is_loop = is_generalized_loop(m, mask);
        let ranges: Vec<usize> = support.iter().map(|&e| dims[e] - 1).collect();
        let mut it = MultiIndex::new(&ranges);
        let mut li = vec![0usize; m.n_left()];
        let mut ri = vec![0usize; m.n_right()];
        while let Some(x) = it.current() {
            li.iter_mut().for_each(|i| *i = 0);
            ri.iter_mut().for_each(|i| *i = 0);
            for (&e, &xe) in support.iter().zip(x) {
                let edge = &m.edges()[e];
                li[edge.left] += (xe + 1) * lstride[edge.left][e];
                ri[edge.right] += (xe + 1) * rstride[edge.right][e];
            }
            let w: f64 = fc.iter().zip(&li).map(|(t, &i)| t[i]).chain(gc.iter().zip(&ri).map(|(t, &i)| t[i])).product::<f64>()
                / ground;
            if is_loop {
                sum += w;
                terms.push(LoopTerm { support: support.clone(), assignment: x.iter().map(|xe| xe + 1).collect(), weight: w });
            } else {
                nonloop_terms += 1;
                max_nonloop_weight = max_nonloop_weight.max(w.abs());
            }
            it.advance();
        }
    }
    Ok(LoopSeries {
        bethe,
        terms,
        partial_sum: bethe * (1.0 + sum),
        is_exhaustive: k >= n,
        max_support: k,
        max_nonloop_weight,
        nonloop_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::{init_messages, run_bp, BpConfig};
    use crate::model::{exact_value, ModelBuilder};
    use crate::spaces::Space;

    fn cycle(len: usize, table: [f64; 4]) -> BipartiteModel {
        // left v_i joined to right w_i and w_{i+1}
        let mut b = ModelBuilder::new();
        let v: Vec<usize> = (0..len).map(|i| b.left(&format!("v{i}"))).collect();
        let w: Vec<usize> = (0..len).map(|i| b.right(&format!("w{i}"))).collect();
        for i in 0..len {
            b.edge(v[i], w[i], Space::euclidean(2), Some(ConeKind::NonnegativeOrthant));
            b.edge(v[i], w[(i + 1) % len], Space::euclidean(2), Some(ConeKind::NonnegativeOrthant));
        }
        for i in 0..len {
            b.f(v[i], table.to_vec());
            b.g(w[i], vec![1.0, 0.5, 0.5, 2.0]);
        }
        b.build().unwrap()
    }

    fn single_edge() -> BipartiteModel {
        let mut b = ModelBuilder::new();
        let v = b.left("v");
        let w = b.right("w");
        b.edge(v, w, Space::euclidean(3), Some(ConeKind::NonnegativeOrthant));
        b.f(v, vec![1.0, 2.0, 0.5]);
        b.g(w, vec![3.0, 4.0, 1.0]);
        b.build().unwrap()
    }

    #[test]
    fn frames_are_biorthogonal() {
        let m = cycle(2, [1.0, 2.0, 0.7, 1.3]);
        let fp = run_bp(&m, &BpConfig::default()).unwrap();
        let frames = build_edge_frames(&m, &fp).unwrap();
        assert!(biorthogonality_residual(&m, &frames) < 1e-12);
        for (edge, fr) in m.edges().iter().zip(&frames) {
            assert!((edge.space.pair(&fr.phi[0], &fr.phi_hat_star[0]) - 1.0).abs() < 1e-15);
        }
        let gauge = frame_gauge(&m, &frames).unwrap();
        assert!(frame_gauge_defect(&m, &frames, &gauge).unwrap() < 1e-9);
    }

    #[test]
    fn symmetric_qubit_point_gives_traceless_frames() {
        // m_{v→w} = m_{w→v} = coords of I/2 on a PSD(2) edge, used directly
        let mut b = ModelBuilder::new();
        let v = b.left("v");
        let w = b.right("w");
        b.edge(v, w, Space::euclidean(4), Some(ConeKind::PsdHermitian));
        b.f(v, vec![1.0, 0.0, 0.0, 0.0]);
        b.g(w, vec![1.0, 0.0, 0.0, 0.0]);
        let m = b.build().unwrap();
        let msgs = init_messages(&m).unwrap();
        let frames = build_edge_frames_from(&m, &msgs).unwrap();
        let fr = &frames[0];
        for x in 1..4 {
            // Φ̂*(e_x) = 2 T_x and Φ(e_x) = T_x / 2 in coordinates
            for y in 0..4 {
                let t = if x == y { 1.0 } else { 0.0 };
                assert!((fr.phi_hat_star[x][y] - 2.0 * t).abs() < 1e-12);
                assert!((fr.phi[x][y] - 0.5 * t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn certification_and_positivity_preconditions() {
        let m = cycle(2, [1.0, 2.0, 0.7, 1.3]);
        let msgs = init_messages(&m).unwrap();
        assert!(matches!(build_edge_frames_from(&m, &msgs), Err(Error::NonFixedPoint { .. })));

        let mut b = ModelBuilder::new();
        let v = b.left("v");
        let w = b.right("w");
        b.edge(v, w, Space::euclidean(2), Some(ConeKind::NonnegativeOrthant));
        b.f(v, vec![1.0, 0.0]);
        b.g(w, vec![1.0, 1.0]);
        let edge_zero = b.build().unwrap();
        let fp = run_bp(&edge_zero, &BpConfig::default()).unwrap();
        assert!(matches!(
            build_edge_frames(&edge_zero, &fp),
            Err(Error::SingularMessage { edge: 0, direction: Direction::LeftToRight, .. })
        ));
    }

    #[test]
    fn vanishing_conditions_at_and_off_the_fixed_point() {
        let m = cycle(2, [1.0, 2.0, 0.7, 1.3]);
        let fp = run_bp(&m, &BpConfig::default()).unwrap();
        let frames = build_edge_frames(&m, &fp).unwrap();
        let report = check_vanishing_conditions(&m, &frames);
        assert!(report.max_abs < 1e-9 && report.max_rel < 1e-9, "{report:?}");

        let off = frames_unchecked(&m, &init_messages(&m).unwrap()).unwrap();
        assert!(check_vanishing_conditions(&m, &off).max_abs > 1e-3);

        let s = single_edge();
        let fp = run_bp(&s, &BpConfig::default()).unwrap();
        let frames = build_edge_frames(&s, &fp).unwrap();
        assert!(check_vanishing_conditions(&s, &frames).max_abs < 1e-12);
    }

    #[test]
    fn generalized_loop_enumeration() {
        let s = single_edge();
        assert!(enumerate_generalized_loops(&s).unwrap().is_empty());
        let c = cycle(2, [1.0; 4]);
        assert_eq!(enumerate_generalized_loops(&c).unwrap(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn resummation_on_cycles() {
        for len in [2, 3] {
            let m = cycle(len, [1.0, 2.0, 0.7, 1.3]);
            let fp = run_bp(&m, &BpConfig::default()).unwrap();
            let series = loop_series(&m, &fp, usize::MAX).unwrap();
            let z = exact_value(&m).unwrap();
            assert!(series.is_exhaustive);
            assert!((series.bethe - fp.bethe).abs() < 1e-10 * fp.bethe.abs());
            assert!((series.partial_sum - z).abs() < 1e-10 * z, "{} vs {z}", series.partial_sum);
            assert!(series.max_nonloop_weight < 1e-9);
            // one binary cycle, one term
            assert_eq!(series.terms.len(), 1);
        }
    }

    #[test]
    fn tree_series_is_the_bethe_value() {
        let s = single_edge();
        let fp = run_bp(&s, &BpConfig::default()).unwrap();
        let series = loop_series(&s, &fp, 4).unwrap();
        assert!(series.terms.is_empty());
        assert!((series.partial_sum - 11.5).abs() < 1e-12);
        assert_eq!(series.partial_sum, series.bethe);
    }

    #[test]
    fn truncated_series_is_not_exhaustive() {
        let m = cycle(3, [1.0, 2.0, 0.7, 1.3]);
        let fp = run_bp(&m, &BpConfig::default()).unwrap();
        let series = loop_series(&m, &fp, 2).unwrap();
        assert!(!series.is_exhaustive);
        assert!(series.terms.is_empty());
        assert_eq!(series.partial_sum, series.bethe);
    }

    #[test]
    fn assignment_count_matches_enumeration() {
        assert_eq!(assignment_count(&[2, 2, 2], 3), 8.0);
        assert_eq!(assignment_count(&[4, 4], 1), 7.0);
    }

    #[test]
    fn missing_and_custom_cones_rejected() {
        let s = single_edge().without_cones();
        let msgs = MessageSet { to_right: vec![vec![1.0; 3]], to_left: vec![vec![1.0; 3]], iteration: 0 };
        assert!(matches!(frames_unchecked(&s, &msgs), Err(Error::MissingCone { edge: 0 })));
    }
}

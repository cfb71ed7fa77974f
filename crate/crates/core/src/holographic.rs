//! Per-edge gauge transformations.
//!
//! Inverse maps act on the `f` side and right adjoints on the `g` side, so
//! `⟨(⊗Φ̂) f, (⊗Φ*) g⟩ = ⟨f, g⟩` edge by edge and the model value is unchanged.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::BipartiteModel;
use crate::spaces::adjoint_map;
use crate::tensor;

const SINGULAR_RATIO: f64 = 1e-12;
const RANDOM_CONDITION_LIMIT: f64 = 1e4;

/// One invertible map per edge, in the model's edge order.
#[derive(Debug, Clone)]
pub struct GaugeMap {
    phi: Vec<DMatrix<f64>>,
    phi_inv: Vec<DMatrix<f64>>,
    phi_adj: Vec<DMatrix<f64>>,
    condition: Vec<f64>,
}

fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().svd(false, false).singular_values;
    let (max, min) = (sv.max(), sv.min());
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

impl GaugeMap {
    /// Builds the gauge from one matrix per edge of `m`.
    pub fn new(m: &BipartiteModel, phi: Vec<DMatrix<f64>>) -> Result<GaugeMap> {
        if phi.len() != m.edges().len() {
            return Err(Error::GaugeShape { expected: m.edges().len(), found: phi.len() });
        }
        let mut inv = Vec::with_capacity(phi.len());
        let mut adj = Vec::with_capacity(phi.len());
        let mut condition = Vec::with_capacity(phi.len());
        for (e, (p, edge)) in phi.iter().zip(m.edges()).enumerate() {
            let d = edge.space.dim();
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.nrows().max(p.ncols()) });
            }
            let c = condition_number(p);
            if !(c.is_finite() && 1.0 / c >= SINGULAR_RATIO) {
                return Err(Error::SingularGauge { edge: e, condition: c });
            }
            let pi = p.clone().try_inverse().ok_or(Error::SingularGauge { edge: e, condition: c })?;
            adj.push(adjoint_map(p, &edge.space, &edge.space)?);
            inv.push(pi);
            condition.push(c);
        }
        Ok(GaugeMap { phi, phi_inv: inv, phi_adj: adj, condition })
    }

    /// Identity on every edge.
    pub fn identity(m: &BipartiteModel) -> GaugeMap {
        let phi = m.edges().iter().map(|e| DMatrix::identity(e.space.dim(), e.space.dim())).collect();
        GaugeMap::new(m, phi).expect("identity is invertible")
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn phi(&self, e: usize) -> &DMatrix<f64> {
        &self.phi[e]
    }

    /// `Φ̂ = Φ⁻¹`.
    pub fn phi_inv(&self, e: usize) -> &DMatrix<f64> {
        &self.phi_inv[e]
    }

    /// `Φ* = K⁻¹ Φᵀ K`.
    pub fn phi_adj(&self, e: usize) -> &DMatrix<f64> {
        &self.phi_adj[e]
    }

    pub fn condition_numbers(&self) -> &[f64] {
        &self.condition
    }

    /// Per-edge product `Φ · Φ'`: applying the result equals applying `self` then `other`.
    pub fn compose(&self, m: &BipartiteModel, other: &GaugeMap) -> Result<GaugeMap> {
        if other.len() != self.len() {
            return Err(Error::GaugeShape { expected: self.len(), found: other.len() });
        }
        let phi = self.phi.iter().zip(&other.phi).map(|(a, b)| a * b).collect();
        GaugeMap::new(m, phi)
    }

    /// `max_e ‖Φ_e Φ̂_e − I‖_max`.
    pub fn inverse_defect(&self) -> f64 {
        self.phi
            .iter()
            .zip(&self.phi_inv)
            .map(|(p, pi)| {
                let d = p * pi - DMatrix::identity(p.nrows(), p.ncols());
                d.amax()
            })
            .fold(0.0, f64::max)
    }
}

/// `f̂_v = (⊗Φ̂) f_v`, `ĝ_w = (⊗Φ*) g_w`; cones are dropped on the result.
pub fn apply_gauge(m: &BipartiteModel, gauge: &GaugeMap) -> Result<BipartiteModel> {
    if gauge.len() != m.edges().len() {
        return Err(Error::GaugeShape { expected: m.edges().len(), found: gauge.len() });
    }
    let f = (0..m.n_left())
        .map(|v| {
            let mats: Vec<Option<&DMatrix<f64>>> = m.left_incident(v).iter().map(|&e| Some(&gauge.phi_inv[e])).collect();
            tensor::mode_products(m.f(v).coeffs(), &m.f(v).shape, &mats).0
        })
        .collect();
    let g = (0..m.n_right())
        .map(|w| {
            let mats: Vec<Option<&DMatrix<f64>>> = m.right_incident(w).iter().map(|&e| Some(&gauge.phi_adj[e])).collect();
            tensor::mode_products(m.g(w).coeffs(), &m.g(w).shape, &mats).0
        })
        .collect();
    Ok(m.with_tensors_without_cones(f, g))
}

/// Deterministic random gauge: entries uniform in `[-1, 1]`, each matrix
/// resampled until its condition number is below `1e4`.
pub fn random_gauge(m: &BipartiteModel, seed: u64) -> GaugeMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = m
        .edges()
        .iter()
        .map(|e| random_well_conditioned(&mut rng, e.space.dim()))
        .collect();
    GaugeMap::new(m, phi).expect("sampled gauges are well conditioned")
}

fn random_well_conditioned(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    loop {
        let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..=1.0));
        if condition_number(&a) < RANDOM_CONDITION_LIMIT {
            return a;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::ConeKind;
    use crate::model::{exact_value, ModelBuilder};
    use crate::spaces::Space;
    use crate::tensor::MultiIndex;

    fn single_edge() -> BipartiteModel {
        let mut b = ModelBuilder::new();
        let v = b.left("v");
        let w = b.right("w");
        b.edge(v, w, Space::euclidean(2), Some(ConeKind::NonnegativeOrthant));
        b.f(v, vec![1.0, 2.0]);
        b.g(w, vec![3.0, 4.0]);
        b.build().unwrap()
    }

    fn star_model(gram: Option<DMatrix<f64>>) -> BipartiteModel {
        let mut b = ModelBuilder::new();
        let v = b.left("v");
        let v2 = b.left("v2");
        let w1 = b.right("w1");
        let w2 = b.right("w2");
        let space = |d| match &gram {
            Some(k) if d == 2 => Space::with_gram(k.clone()).unwrap(),
            _ => Space::euclidean(d),
        };
        b.edge(v, w1, space(2), None);
        b.edge(v, w2, space(3), None);
        b.edge(v2, w2, space(2), None);
        b.f(v, (0..6).map(|k| 0.3 + k as f64).collect());
        b.f(v2, vec![1.5, -0.5]);
        b.g(w1, vec![2.0, 1.0]);
        b.g(w2, (0..6).map(|k| 1.0 / (1.0 + k as f64)).collect());
        b.build().unwrap()
    }

    #[test]
    fn identity_gauge_is_a_no_op() {
        let m = star_model(None);
        let out = apply_gauge(&m, &GaugeMap::identity(&m)).unwrap();
        for v in 0..m.n_left() {
            assert_eq!(out.f(v).coeffs(), m.f(v).coeffs());
        }
        for w in 0..m.n_right() {
            assert_eq!(out.g(w).coeffs(), m.g(w).coeffs());
        }
    }

    #[test]
    fn swap_gauge_on_single_edge() {
        let m = single_edge();
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let out = apply_gauge(&m, &GaugeMap::new(&m, vec![swap]).unwrap()).unwrap();
        assert_eq!(out.f(0).coeffs(), &[2.0, 1.0]);
        assert_eq!(out.g(0).coeffs(), &[4.0, 3.0]);
        assert_eq!(exact_value(&out).unwrap(), 11.0);
        assert!(out.edges()[0].cone.is_none());
    }

    #[test]
    fn singular_gauge_rejected() {
        let m = single_edge();
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(GaugeMap::new(&m, vec![bad]), Err(Error::SingularGauge { edge: 0, .. })));
        assert!(matches!(GaugeMap::new(&m, vec![]), Err(Error::GaugeShape { .. })));
    }

    #[test]
    fn random_gauge_is_deterministic_and_conditioned() {
        let m = star_model(None);
        let a = random_gauge(&m, 3);
        let b = random_gauge(&m, 3);
        let c = random_gauge(&m, 4);
        for e in 0..m.edges().len() {
            assert_eq!(a.phi(e), b.phi(e));
        }
        assert!((0..m.edges().len()).any(|e| a.phi(e) != c.phi(e)));
        assert!(a.condition_numbers().iter().all(|&k| k < 1e4));
        assert!(a.inverse_defect() < 1e-10);
    }

    #[test]
    fn holant_invariance_with_gram() {
        let k = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let m = star_model(Some(k));
        let z = exact_value(&m).unwrap();
        for seed in 0..20 {
            let out = apply_gauge(&m, &random_gauge(&m, seed)).unwrap();
            let zh = exact_value(&out).unwrap();
            assert!((zh - z).abs() <= 1e-9 * z.abs(), "seed {seed}: {zh} vs {z}");
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let m = star_model(None);
        let a = random_gauge(&m, 10);
        let b = random_gauge(&m, 11);
        let twice = apply_gauge(&apply_gauge(&m, &a).unwrap(), &b).unwrap();
        let once = apply_gauge(&m, &a.compose(&m, &b).unwrap()).unwrap();
        for v in 0..m.n_left() {
            for (x, y) in twice.f(v).coeffs().iter().zip(once.f(v).coeffs()) {
                assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()));
            }
        }
        for w in 0..m.n_right() {
            for (x, y) in twice.g(w).coeffs().iter().zip(once.g(w).coeffs()) {
                assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()));
            }
        }
    }

    #[test]
    fn euclidean_transform_matches_entrywise_sums() {
        // f̂_v(y) = Σ_x ∏_e φ̂_e(y_e, x_e) f_v(x), ĝ_w(y) = Σ_x ∏_e φ_e(x_e, y_e) g_w(x)
        let m = star_model(None);
        let gauge = random_gauge(&m, 5);
        let out = apply_gauge(&m, &gauge).unwrap();
        let v = 0;
        let edges = m.left_incident(v);
        let dims = m.f(v).shape.clone();
        let mut y_it = MultiIndex::new(&dims);
        let mut k = 0;
        while let Some(y) = y_it.current() {
            let mut s = 0.0;
            let mut x_it = MultiIndex::new(&dims);
            let mut j = 0;
            while let Some(x) = x_it.current() {
                let coef: f64 = edges.iter().enumerate().map(|(a, &e)| gauge.phi_inv(e)[(y[a], x[a])]).product();
                s += coef * m.f(v).coeffs()[j];
                j += 1;
                x_it.advance();
            }
            assert!((s - out.f(v).coeffs()[k]).abs() < 1e-12 * (1.0 + s.abs()));
            k += 1;
            y_it.advance();
        }
        let w = 1;
        let edges = m.right_incident(w);
        let dims = m.g(w).shape.clone();
        let mut y_it = MultiIndex::new(&dims);
        let mut k = 0;
        while let Some(y) = y_it.current() {
            let mut s = 0.0;
            let mut x_it = MultiIndex::new(&dims);
            let mut j = 0;
            while let Some(x) = x_it.current() {
                let coef: f64 = edges.iter().enumerate().map(|(a, &e)| gauge.phi(e)[(x[a], y[a])]).product();
                s += coef * m.g(w).coeffs()[j];
                j += 1;
                x_it.advance();
            }
            assert!((s - out.g(w).coeffs()[k]).abs() < 1e-12 * (1.0 + s.abs()));
            k += 1;
            y_it.advance();
        }
    }
}

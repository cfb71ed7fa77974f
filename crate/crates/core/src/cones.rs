//! Edge cones and their duals.
//!
//! Messages flowing `v → w` live in the edge cone `C`, messages flowing
//! `w → v` in its dual `C* = { f | ⟨f, g⟩ ≥ 0 for all g ∈ C }`. The orthant and
//! the PSD cone are self-dual for a Euclidean Gram; for a general Gram `K` the
//! dual is `{ f | K f ∈ C }`, which is what the predicates below test.
//!
//! Cones of generalized probabilistic theories plug in through [`CustomCone`].

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::HermitianBasis;
use crate::spaces::{Space, Vector};

/// User-supplied cone, described by membership predicates in storage coordinates.
pub trait CustomCone: Send + Sync + fmt::Debug {
    fn contains(&self, coeffs: &[f64], tol: f64) -> bool;
    fn dual_contains(&self, coeffs: &[f64], tol: f64) -> bool;
    /// A point `u` in the interior of the cone.
    fn interior(&self) -> Option<Vec<f64>>;
    /// A point `u*` in the interior of the dual cone.
    fn dual_interior(&self) -> Option<Vec<f64>>;
}

#[derive(Clone, Debug)]
pub enum ConeKind {
    NonnegativeOrthant,
    /// Hermitian PSD matrices in generalized Gell-Mann coordinates; the space has dimension `q²`.
    PsdHermitian,
    Custom(Arc<dyn CustomCone>),
}

impl ConeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ConeKind::NonnegativeOrthant => "orthant",
            ConeKind::PsdHermitian => "psd",
            ConeKind::Custom(_) => "custom",
        }
    }

    /// Checks that the kind fits a space of this dimension.
    pub fn check_space(&self, space: &Space) -> Result<()> {
        if let ConeKind::PsdHermitian = self {
            psd_side(space.dim())?;
        }
        Ok(())
    }

    pub(crate) fn contains_raw(&self, space: &Space, coeffs: &[f64], tol: f64) -> bool {
        match self {
            ConeKind::NonnegativeOrthant => coeffs.iter().all(|&c| c >= -tol),
            ConeKind::PsdHermitian => psd_contains(space.dim(), coeffs, tol),
            ConeKind::Custom(c) => c.contains(coeffs, tol),
        }
    }

    pub(crate) fn dual_contains_raw(&self, space: &Space, coeffs: &[f64], tol: f64) -> bool {
        match self {
            ConeKind::Custom(c) => c.dual_contains(coeffs, tol),
            _ => self.contains_raw(space, &space.lower(coeffs), tol),
        }
    }

    /// `(u, u*)` as raw coefficient vectors.
    pub(crate) fn interior_raw(&self, space: &Space) -> Result<(Vec<f64>, Vec<f64>)> {
        let u = match self {
            ConeKind::NonnegativeOrthant => vec![1.0; space.dim()],
            ConeKind::PsdHermitian => {
                let q = psd_side(space.dim())?;
                crate::quantum::herm_to_coords(&DMatrix::<Complex64>::identity(q, q))?
            }
            ConeKind::Custom(c) => {
                let u = c.interior().ok_or(Error::MissingInterior)?;
                let us = c.dual_interior().ok_or(Error::MissingInterior)?;
                if u.len() != space.dim() || us.len() != space.dim() {
                    return Err(Error::DimensionMismatch { expected: space.dim(), found: u.len() });
                }
                return Ok((u, us));
            }
        };
        // self-dual up to the Gram: u* = K⁻¹ u pairs with c ∈ C as the Euclidean sum
        let us = space.raise(&u);
        Ok((u, us))
    }
}

fn psd_side(dim: usize) -> Result<usize> {
    let q = (dim as f64).sqrt().round() as usize;
    if q * q != dim {
        return Err(Error::DimensionMismatch { expected: q * q, found: dim });
    }
    Ok(q)
}

fn psd_contains(dim: usize, coeffs: &[f64], tol: f64) -> bool {
    let Ok(q) = psd_side(dim) else { return false };
    let basis = HermitianBasis::new(q);
    let a = basis.coords_to_herm(coeffs);
    let eig = SymmetricEigen::new(a).eigenvalues;
    let max_abs = eig.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    eig.min() >= -tol * (max_abs + 1.0)
}

/// A cone attached to a concrete space.
#[derive(Clone, Debug)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub space: Space,
}

impl ConeSpec {
    pub fn new(kind: ConeKind, space: Space) -> Result<ConeSpec> {
        kind.check_space(&space)?;
        Ok(ConeSpec { kind, space })
    }

    pub fn orthant(dim: usize) -> ConeSpec {
        ConeSpec { kind: ConeKind::NonnegativeOrthant, space: Space::euclidean(dim) }
    }

    pub fn psd(q: usize) -> ConeSpec {
        ConeSpec { kind: ConeKind::PsdHermitian, space: Space::euclidean(q * q) }
    }

    fn check(&self, f: &Vector) -> Result<()> {
        match f.space().factors() {
            [s] if *s == self.space => Ok(()),
            _ => Err(Error::SpaceMismatch),
        }
    }
}

pub fn cone_contains(cone: &ConeSpec, f: &Vector, tol: f64) -> Result<bool> {
    cone.check(f)?;
    Ok(cone.kind.contains_raw(&cone.space, f.coeffs(), tol))
}

pub fn dual_cone_contains(cone: &ConeSpec, f: &Vector, tol: f64) -> Result<bool> {
    cone.check(f)?;
    Ok(cone.kind.dual_contains_raw(&cone.space, f.coeffs(), tol))
}

/// Reference interior vectors `(u, u*)` used to normalize messages.
pub fn interior_unit(cone: &ConeSpec) -> Result<(Vector, Vector)> {
    let (u, us) = cone.kind.interior_raw(&cone.space)?;
    Ok((Vector::new(cone.space.clone(), u)?, Vector::new(cone.space.clone(), us)?))
}

/// A polyhedral cone generated by finitely many rays in a Euclidean space, with
/// its dual given by the same generators: `f ∈ C*` iff `⟨f, r⟩ ≥ 0` for every ray.
///
/// Primal membership is only decided for the cases that arise in tests and
/// examples (a single ray, or rays forming a basis).
#[derive(Debug, Clone)]
pub struct RayCone {
    rays: Vec<Vec<f64>>,
    dual_interior: Vec<f64>,
}

impl RayCone {
    pub fn new(rays: Vec<Vec<f64>>, dual_interior: Vec<f64>) -> RayCone {
        RayCone { rays, dual_interior }
    }

    fn dim(&self) -> usize {
        self.dual_interior.len()
    }
}

impl CustomCone for RayCone {
    fn contains(&self, coeffs: &[f64], tol: f64) -> bool {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        match self.rays.len() {
            0 => coeffs.iter().all(|c| c.abs() <= tol),
            1 => {
                let r = &self.rays[0];
                let t = dot(coeffs, r) / dot(r, r);
                t >= -tol && coeffs.iter().zip(r).all(|(c, ri)| (c - t * ri).abs() <= tol * (1.0 + t.abs()))
            }
            n if n == self.dim() => {
                // basis of rays: solve for the conic coefficients
                let m = DMatrix::from_fn(n, n, |i, j| self.rays[j][i]);
                match m.lu().solve(&nalgebra::DVector::from_column_slice(coeffs)) {
                    Some(t) => t.iter().all(|&ti| ti >= -tol),
                    None => false,
                }
            }
            _ => false,
        }
    }

    fn dual_contains(&self, coeffs: &[f64], tol: f64) -> bool {
        self.rays.iter().all(|r| r.iter().zip(coeffs).map(|(a, b)| a * b).sum::<f64>() >= -tol)
    }

    fn interior(&self) -> Option<Vec<f64>> {
        if self.rays.len() != self.dim() {
            return None;
        }
        let mut u = vec![0.0; self.dim()];
        for r in &self.rays {
            for (ui, ri) in u.iter_mut().zip(r) {
                *ui += ri;
            }
        }
        Some(u)
    }

    fn dual_interior(&self) -> Option<Vec<f64>> {
        Some(self.dual_interior.clone())
    }
}

//! Real linear spaces carrying a symmetric nondegenerate bilinear form.
//!
//! A [`Space`] is stored as its Gram matrix `K` in a fixed storage basis, so
//! `⟨f, g⟩ = fᵀ K g`. Products of spaces carry the Kronecker product of the
//! factor Grams, which is never materialised except on request: every kernel
//! here applies the factor Grams axis by axis.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tensor;

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceId(u64);

#[derive(Debug)]
struct SpaceInner {
    id: SpaceId,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    euclidean: bool,
}

/// An edge-local space: dimension plus Gram matrix. Cheap to clone; clones share identity.
#[derive(Debug, Clone)]
pub struct Space {
    inner: Arc<SpaceInner>,
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.inner.id == other.inner.id
    }
}

impl Space {
    pub fn euclidean(dim: usize) -> Space {
        assert!(dim > 0, "space dimension must be positive");
        let id = SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed));
        Space {
            inner: Arc::new(SpaceInner {
                id,
                gram: DMatrix::identity(dim, dim),
                gram_inv: DMatrix::identity(dim, dim),
                euclidean: true,
            }),
        }
    }

    /// Builds a space from a Gram matrix, checking symmetry (1e-12 relative) and
    /// nondegeneracy (σ_min > 1e-10 σ_max).
    pub fn with_gram(gram: DMatrix<f64>) -> Result<Space> {
        let q = gram.nrows();
        if q == 0 || gram.ncols() != q {
            return Err(Error::DimensionMismatch { expected: q, found: gram.ncols() });
        }
        let scale = gram.amax().max(f64::MIN_POSITIVE);
        let asymmetry = (&gram - gram.transpose()).amax();
        if asymmetry > 1e-12 * scale {
            return Err(Error::AsymmetricGram { asymmetry });
        }
        let sym = (&gram + gram.transpose()) * 0.5;
        let sv = sym.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 1e-10 * smax) {
            return Err(Error::SingularGram { condition: smax / smin });
        }
        let gram_inv = sym.clone().try_inverse().ok_or(Error::SingularGram { condition: f64::INFINITY })?;
        let euclidean = sym == DMatrix::identity(q, q);
        let id = SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed));
        Ok(Space { inner: Arc::new(SpaceInner { id, gram: sym, gram_inv, euclidean }) })
    }

    pub fn id(&self) -> SpaceId {
        self.inner.id
    }

    pub fn dim(&self) -> usize {
        self.inner.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.inner.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.inner.gram_inv
    }

    pub fn is_euclidean(&self) -> bool {
        self.inner.euclidean
    }

    pub fn is_positive_definite(&self) -> bool {
        if self.is_euclidean() {
            return true;
        }
        let eig = SymmetricEigen::new(self.gram().clone());
        eig.eigenvalues.min() > 1e-12 * eig.eigenvalues.amax()
    }

    /// `K^{p}` for a positive definite Gram, via symmetric eigendecomposition.
    pub(crate) fn gram_power(&self, p: f64) -> Result<DMatrix<f64>> {
        if self.is_euclidean() {
            return Ok(DMatrix::identity(self.dim(), self.dim()));
        }
        let eig = SymmetricEigen::new(self.gram().clone());
        if !(eig.eigenvalues.min() > 1e-12 * eig.eigenvalues.amax()) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(p)));
        Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
    }

    /// `⟨f, g⟩` on raw coefficient slices of this space.
    pub(crate) fn pair(&self, f: &[f64], g: &[f64]) -> f64 {
        if self.is_euclidean() {
            return f.iter().zip(g).map(|(a, b)| a * b).sum();
        }
        let k = self.gram();
        let mut s = 0.0;
        for i in 0..f.len() {
            for j in 0..g.len() {
                s += f[i] * k[(i, j)] * g[j];
            }
        }
        s
    }

    /// `K g` on a raw slice.
    pub(crate) fn lower(&self, g: &[f64]) -> Vec<f64> {
        if self.is_euclidean() {
            return g.to_vec();
        }
        let k = self.gram();
        (0..g.len()).map(|i| (0..g.len()).map(|j| k[(i, j)] * g[j]).sum()).collect()
    }

    /// `K⁻¹ g` on a raw slice.
    pub(crate) fn raise(&self, g: &[f64]) -> Vec<f64> {
        if self.is_euclidean() {
            return g.to_vec();
        }
        let k = self.gram_inv();
        (0..g.len()).map(|i| (0..g.len()).map(|j| k[(i, j)] * g[j]).sum()).collect()
    }
}

/// Ordered tensor product of spaces. A single space is a one-factor product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    factors: Vec<Space>,
}

impl From<Space> for ProductSpace {
    fn from(s: Space) -> Self {
        ProductSpace { factors: vec![s] }
    }
}

impl ProductSpace {
    pub fn new(factors: Vec<Space>) -> Self {
        ProductSpace { factors }
    }

    pub fn factors(&self) -> &[Space] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(Space::dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(Space::dim).product()
    }

    pub fn tensor(&self, other: &ProductSpace) -> ProductSpace {
        ProductSpace { factors: self.factors.iter().chain(&other.factors).cloned().collect() }
    }

    /// Kronecker product of factor Grams. Only sensible for small products.
    pub fn gram(&self) -> DMatrix<f64> {
        self.factors.iter().fold(DMatrix::identity(1, 1), |acc, s| acc.kronecker(s.gram()))
    }

    fn gram_factors(&self) -> Vec<Option<&DMatrix<f64>>> {
        self.factors.iter().map(|s| if s.is_euclidean() { None } else { Some(s.gram()) }).collect()
    }

    /// `(⊗K) g` on raw coefficients.
    pub(crate) fn lower(&self, coeffs: &[f64]) -> Vec<f64> {
        let mats = self.gram_factors();
        if mats.iter().all(Option::is_none) {
            return coeffs.to_vec();
        }
        tensor::mode_products(coeffs, &self.dims(), &mats).0
    }
}

/// A vector of a (product) space, coefficients in the storage basis, row-major over factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    space: ProductSpace,
    coeffs: Vec<f64>,
}

impl Vector {
    pub fn new(space: impl Into<ProductSpace>, coeffs: Vec<f64>) -> Result<Vector> {
        let space = space.into();
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: coeffs.len() });
        }
        Ok(Vector { space, coeffs })
    }

    pub fn zeros(space: impl Into<ProductSpace>) -> Vector {
        let space = space.into();
        let coeffs = vec![0.0; space.dim()];
        Vector { space, coeffs }
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }
}

/// `fᵀ K g` with `K` the (product) Gram matrix.
pub fn bilinear_form(f: &Vector, g: &Vector) -> Result<f64> {
    if f.coeffs.len() != g.coeffs.len() {
        return Err(Error::DimensionMismatch { expected: f.coeffs.len(), found: g.coeffs.len() });
    }
    if f.space != g.space {
        return Err(Error::SpaceMismatch);
    }
    let lowered = f.space.lower(&g.coeffs);
    Ok(f.coeffs.iter().zip(&lowered).map(|(a, b)| a * b).sum())
}

pub fn tensor_product(f: &Vector, g: &Vector) -> Vector {
    Vector {
        space: f.space.tensor(&g.space),
        coeffs: tensor::outer(&[&f.coeffs, &g.coeffs]),
    }
}

/// Right adjoint of `a: from → to`, i.e. `K_from⁻¹ aᵀ K_to`.
pub fn adjoint_map(a: &DMatrix<f64>, from: &Space, to: &Space) -> Result<DMatrix<f64>> {
    if a.nrows() != to.dim() || a.ncols() != from.dim() {
        return Err(Error::DimensionMismatch { expected: to.dim() * from.dim(), found: a.len() });
    }
    let adj = from.gram_inv() * a.transpose() * to.gram();
    if !adj.iter().all(|x| x.is_finite()) {
        return Err(Error::SingularGram { condition: f64::INFINITY });
    }
    Ok(adj)
}

/// Partial inner product: contracts `g` against the axes `axes` of `f` and
/// returns the vector `h` over the remaining axes with `⟨h, w⟩ = ⟨f, g ⊗ w⟩`.
///
/// `g`'s factors must equal the factors of `f` at `axes`, in that order.
pub fn partial_inner(f: &Vector, g: &Vector, axes: &[usize]) -> Result<Vector> {
    let factors = f.space.factors();
    let mut seen = vec![false; factors.len()];
    for &a in axes {
        if a >= factors.len() || seen[a] {
            return Err(Error::AxisMismatch { axes: axes.to_vec() });
        }
        seen[a] = true;
    }
    if g.space.factors().len() != axes.len()
        || axes.iter().zip(g.space.factors()).any(|(&a, s)| factors[a] != *s)
    {
        return Err(Error::AxisMismatch { axes: axes.to_vec() });
    }

    let rest: Vec<usize> = (0..factors.len()).filter(|k| !seen[*k]).collect();
    let perm: Vec<usize> = axes.iter().chain(&rest).copied().collect();
    let (permuted, pdims) = tensor::permute(&f.coeffs, &f.space.dims(), &perm);

    let lowered_g = g.space.lower(&g.coeffs);
    let contracted: usize = pdims[..axes.len()].iter().product();
    let remaining: usize = pdims[axes.len()..].iter().product();
    let mut h = vec![0.0; remaining];
    for (c, &gc) in lowered_g.iter().enumerate().take(contracted) {
        if gc == 0.0 {
            continue;
        }
        let row = &permuted[c * remaining..(c + 1) * remaining];
        for (hv, &fv) in h.iter_mut().zip(row) {
            *hv += gc * fv;
        }
    }
    let space = ProductSpace::new(rest.iter().map(|&k| factors[k].clone()).collect());
    Ok(Vector { space, coeffs: h })
}

/// Orthonormal basis `e_x = K^{-1/2} δ_x`, i.e. the columns of `K^{-1/2}`.
pub fn orthonormalize(space: &Space) -> Result<Vec<Vector>> {
    let inv_sqrt = space.gram_power(-0.5)?;
    Ok((0..space.dim())
        .map(|x| Vector { space: space.clone().into(), coeffs: inv_sqrt.column(x).iter().copied().collect() })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(space: &Space, c: &[f64]) -> Vector {
        Vector::new(space.clone(), c.to_vec()).unwrap()
    }

    fn diag2() -> Space {
        Space::with_gram(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap()
    }

    fn spd(entries: &[f64], q: usize) -> DMatrix<f64> {
        let a = DMatrix::from_row_slice(q, q, entries);
        &a * a.transpose() + DMatrix::identity(q, q) * 0.5
    }

    #[test]
    fn euclidean_dot() {
        let s = Space::euclidean(2);
        assert_eq!(bilinear_form(&v(&s, &[1.0, 2.0]), &v(&s, &[3.0, 4.0])).unwrap(), 11.0);
        assert_eq!(bilinear_form(&v(&s, &[1.0, 0.0]), &v(&s, &[1.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn weighted_form() {
        let s = diag2();
        assert_eq!(bilinear_form(&v(&s, &[1.0, 1.0]), &v(&s, &[1.0, 1.0])).unwrap(), 3.0);
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let a = Space::euclidean(2);
        let b = Space::euclidean(2);
        assert!(matches!(bilinear_form(&v(&a, &[1.0, 0.0]), &v(&b, &[1.0, 0.0])), Err(Error::SpaceMismatch)));
        let c = Space::euclidean(3);
        assert!(matches!(
            bilinear_form(&v(&a, &[1.0, 0.0]), &v(&c, &[1.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gram_validation() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(Space::with_gram(asym), Err(Error::AsymmetricGram { .. })));
        let sing = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(Space::with_gram(sing), Err(Error::SingularGram { .. })));
        // indefinite is allowed, just not positive definite
        let indef = Space::with_gram(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
        assert!(!indef.is_positive_definite());
        assert!(orthonormalize(&indef).is_err());
    }

    #[test]
    fn tensor_product_examples() {
        let s = Space::euclidean(2);
        let t = tensor_product(&v(&s, &[1.0, 0.0]), &v(&s, &[0.0, 1.0]));
        assert_eq!(t.coeffs(), &[0.0, 1.0, 0.0, 0.0]);
        let one = Space::euclidean(1);
        assert_eq!(tensor_product(&v(&one, &[2.0]), &v(&one, &[3.0])).coeffs(), &[6.0]);
    }

    #[test]
    fn adjoint_examples() {
        let e = Space::euclidean(2);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(adjoint_map(&a, &e, &e).unwrap(), a.transpose());

        let k = diag2();
        let id = DMatrix::identity(2, 2);
        assert_eq!(adjoint_map(&id, &k, &k).unwrap(), id);

        // ⟨A f, g⟩_W = ⟨f, A* g⟩_V over the storage basis sweep
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let adj = adjoint_map(&a, &k, &e).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let f = DMatrix::from_fn(2, 1, |r, _| (r == i) as u8 as f64);
                let g = DMatrix::from_fn(2, 1, |r, _| (r == j) as u8 as f64);
                let lhs = ((&a * &f).transpose() * e.gram() * &g)[(0, 0)];
                let rhs = (f.transpose() * k.gram() * (&adj * &g))[(0, 0)];
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
        // K_V⁻¹ Aᵀ K_W = diag(1/2, 1) [[0,0],[1,0]]
        assert_eq!(adj, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn partial_inner_examples() {
        let s = Space::euclidean(2);
        let a = v(&s, &[1.0, 2.0]);
        let b = v(&s, &[3.0, -1.0]);
        let h = partial_inner(&tensor_product(&a, &b), &a, &[0]).unwrap();
        assert_eq!(h.coeffs(), &[15.0, -5.0]);

        let f = Vector::new(ProductSpace::new(vec![s.clone(), s.clone()]), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let z = partial_inner(&f, &Vector::zeros(s.clone()), &[1]).unwrap();
        assert_eq!(z.coeffs(), &[0.0, 0.0]);

        assert!(partial_inner(&f, &a, &[2]).is_err());
        let other = v(&Space::euclidean(2), &[1.0, 0.0]);
        assert!(partial_inner(&f, &other, &[0]).is_err());
    }

    #[test]
    fn partial_inner_reduces_to_full_form_on_one_dim_rest() {
        let k = diag2();
        let one = Space::with_gram(DMatrix::from_element(1, 1, 3.0)).unwrap();
        let f = Vector::new(ProductSpace::new(vec![k.clone(), one.clone()]), vec![1.5, -2.0]).unwrap();
        let g = v(&k, &[0.5, 4.0]);
        let h = partial_inner(&f, &g, &[0]).unwrap();
        let w = v(&one, &[1.0]);
        let lhs = bilinear_form(&h, &w).unwrap();
        let rhs = bilinear_form(&f, &tensor_product(&g, &w)).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn orthonormalize_examples() {
        let e = Space::euclidean(3);
        let basis = orthonormalize(&e).unwrap();
        for (x, b) in basis.iter().enumerate() {
            for (y, c) in b.coeffs().iter().enumerate() {
                assert_eq!(*c, (x == y) as u8 as f64);
            }
        }
        let s = Space::with_gram(DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0])).unwrap();
        let basis = orthonormalize(&s).unwrap();
        assert!((basis[0].coeffs()[0] - 0.5).abs() < 1e-15 && basis[0].coeffs()[1].abs() < 1e-15);
        assert!((basis[1].coeffs()[1] - 1.0).abs() < 1e-15 && basis[1].coeffs()[0].abs() < 1e-15);
    }

    fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, n)
    }

    proptest! {
        #[test]
        fn form_is_symmetric(k in vec_strategy(9), f in vec_strategy(3), g in vec_strategy(3)) {
            let s = Space::with_gram(spd(&k, 3)).unwrap();
            let a = bilinear_form(&v(&s, &f), &v(&s, &g)).unwrap();
            let b = bilinear_form(&v(&s, &g), &v(&s, &f)).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn tensor_product_factorizes(
            k1 in vec_strategy(4), k2 in vec_strategy(9),
            f1 in vec_strategy(2), f2 in vec_strategy(2), g1 in vec_strategy(3), g2 in vec_strategy(3),
        ) {
            let s = Space::with_gram(spd(&k1, 2)).unwrap();
            let t = Space::with_gram(spd(&k2, 3)).unwrap();
            let lhs = bilinear_form(&tensor_product(&v(&s, &f1), &v(&t, &g1)), &tensor_product(&v(&s, &f2), &v(&t, &g2))).unwrap();
            let rhs = bilinear_form(&v(&s, &f1), &v(&s, &f2)).unwrap() * bilinear_form(&v(&t, &g1), &v(&t, &g2)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn adjoint_identity_and_involution(kv in vec_strategy(4), kw in vec_strategy(9), a in vec_strategy(6), f in vec_strategy(2), g in vec_strategy(3)) {
            let sv = Space::with_gram(spd(&kv, 2)).unwrap();
            let sw = Space::with_gram(spd(&kw, 3)).unwrap();
            let a = DMatrix::from_row_slice(3, 2, &a);
            let adj = adjoint_map(&a, &sv, &sw).unwrap();
            let fv = DMatrix::from_row_slice(2, 1, &f);
            let gv = DMatrix::from_row_slice(3, 1, &g);
            let lhs = ((&a * &fv).transpose() * sw.gram() * &gv)[(0, 0)];
            let rhs = (fv.transpose() * sv.gram() * (&adj * &gv))[(0, 0)];
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            let back = adjoint_map(&adj, &sw, &sv).unwrap();
            prop_assert!((back - &a).amax() <= 1e-12 * (1.0 + a.amax()));
        }

        #[test]
        fn adjoint_of_kronecker_is_kronecker_of_adjoints(ka in vec_strategy(4), kb in vec_strategy(4), a in vec_strategy(4), b in vec_strategy(4)) {
            let sa = Space::with_gram(spd(&ka, 2)).unwrap();
            let sb = Space::with_gram(spd(&kb, 2)).unwrap();
            let prod = Space::with_gram(sa.gram().kronecker(sb.gram())).unwrap();
            let a = DMatrix::from_row_slice(2, 2, &a);
            let b = DMatrix::from_row_slice(2, 2, &b);
            let lhs = adjoint_map(&a.kronecker(&b), &prod, &prod).unwrap();
            let rhs = adjoint_map(&a, &sa, &sa).unwrap().kronecker(&adjoint_map(&b, &sb, &sb).unwrap());
            prop_assert!((lhs - &rhs).amax() <= 1e-10 * (1.0 + rhs.amax()));
        }

        #[test]
        fn partial_inner_defining_identity(kv in vec_strategy(4), kw in vec_strategy(9), f in vec_strategy(6), g in vec_strategy(2), w in vec_strategy(3)) {
            let sv = Space::with_gram(spd(&kv, 2)).unwrap();
            let sw = Space::with_gram(spd(&kw, 3)).unwrap();
            // contract the second axis so the permutation path is exercised
            let f = Vector::new(ProductSpace::new(vec![sw.clone(), sv.clone()]), f).unwrap();
            let g = v(&sv, &g);
            let w = v(&sw, &w);
            let h = partial_inner(&f, &g, &[1]).unwrap();
            let lhs = bilinear_form(&h, &w).unwrap();
            let rhs = bilinear_form(&f, &tensor_product(&w, &g)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn orthonormalized_basis_has_identity_gram(k in vec_strategy(16)) {
            let s = Space::with_gram(spd(&k, 4)).unwrap();
            let basis = orthonormalize(&s).unwrap();
            for x in 0..4 {
                for y in 0..4 {
                    let p = bilinear_form(&basis[x], &basis[y]).unwrap();
                    let expect = if x == y { 1.0 } else { 0.0 };
                    prop_assert!((p - expect).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn product_gram_is_kronecker(k1 in vec_strategy(4), k2 in vec_strategy(4), f in vec_strategy(4), g in vec_strategy(4)) {
            let s = Space::with_gram(spd(&k1, 2)).unwrap();
            let t = Space::with_gram(spd(&k2, 2)).unwrap();
            let p = ProductSpace::new(vec![s.clone(), t.clone()]);
            let dense = p.gram();
            let fv = DMatrix::from_row_slice(4, 1, &f);
            let gv = DMatrix::from_row_slice(4, 1, &g);
            let expect = (fv.transpose() * dense * gv)[(0, 0)];
            let got = bilinear_form(&Vector::new(p.clone(), f).unwrap(), &Vector::new(p, g).unwrap()).unwrap();
            prop_assert!((expect - got).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }
}

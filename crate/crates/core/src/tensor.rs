//! Dense row-major tensor kernels shared by the rest of the crate.
//!
//! Tensors are flat slices plus a shape; axis 0 is the slowest-varying.

use nalgebra::{ComplexField, DMatrix};

pub(crate) fn numel(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Split `dims` around `axis` into (outer, n, inner) block sizes.
fn blocks(dims: &[usize], axis: usize) -> (usize, usize, usize) {
    let outer = numel(&dims[..axis]);
    let inner = numel(&dims[axis + 1..]);
    (outer, dims[axis], inner)
}

/// Apply `mat` (rows × dims\[axis\]) along one axis.
pub(crate) fn mode_product<T: ComplexField + Copy>(
    data: &[T],
    dims: &[usize],
    axis: usize,
    mat: &DMatrix<T>,
) -> (Vec<T>, Vec<usize>) {
    let (outer, n, inner) = blocks(dims, axis);
    debug_assert_eq!(mat.ncols(), n);
    let rows = mat.nrows();
    let mut out = vec![T::zero(); outer * rows * inner];
    for o in 0..outer {
        for c in 0..n {
            let src = &data[(o * n + c) * inner..(o * n + c + 1) * inner];
            for r in 0..rows {
                let coef = mat[(r, c)];
                if coef == T::zero() {
                    continue;
                }
                let dst = &mut out[(o * rows + r) * inner..(o * rows + r + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += coef * *s;
                }
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[axis] = rows;
    (out, new_dims)
}

/// Apply one matrix per axis (`None` leaves the axis alone).
pub(crate) fn mode_products<T: ComplexField + Copy>(
    data: &[T],
    dims: &[usize],
    mats: &[Option<&DMatrix<T>>],
) -> (Vec<T>, Vec<usize>) {
    let mut cur = data.to_vec();
    let mut cur_dims = dims.to_vec();
    for (axis, mat) in mats.iter().enumerate() {
        if let Some(m) = mat {
            let (next, next_dims) = mode_product(&cur, &cur_dims, axis, m);
            cur = next;
            cur_dims = next_dims;
        }
    }
    (cur, cur_dims)
}

/// Sum out one axis against a vector.
pub(crate) fn contract_axis(data: &[f64], dims: &[usize], axis: usize, vec: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let (outer, n, inner) = blocks(dims, axis);
    debug_assert_eq!(vec.len(), n);
    let mut out = vec![0.0; outer * inner];
    for o in 0..outer {
        let dst = &mut out[o * inner..(o + 1) * inner];
        for (c, &coef) in vec.iter().enumerate() {
            let src = &data[(o * n + c) * inner..(o * n + c + 1) * inner];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += coef * s;
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims.remove(axis);
    (out, new_dims)
}

/// Contract every axis except `keep` against the given vectors; returns a vector over `keep`.
pub(crate) fn contract_all_but(data: &[f64], dims: &[usize], keep: usize, vecs: &[&[f64]]) -> Vec<f64> {
    let mut cur = data.to_vec();
    let mut cur_dims = dims.to_vec();
    // contract from the last axis down so indices below stay valid
    for axis in (0..dims.len()).rev() {
        if axis == keep {
            continue;
        }
        let (next, next_dims) = contract_axis(&cur, &cur_dims, axis, vecs[axis]);
        cur = next;
        cur_dims = next_dims;
    }
    cur
}

/// Full contraction against a rank-one tensor `⊗ vecs`.
pub(crate) fn contract_rank_one(data: &[f64], dims: &[usize], vecs: &[&[f64]]) -> f64 {
    let mut cur = data.to_vec();
    let mut cur_dims = dims.to_vec();
    for axis in (0..dims.len()).rev() {
        let (next, next_dims) = contract_axis(&cur, &cur_dims, axis, vecs[axis]);
        cur = next;
        cur_dims = next_dims;
    }
    cur[0]
}

/// Outer product of flat vectors, first factor slowest.
pub(crate) fn outer<T: ComplexField + Copy>(factors: &[&[T]]) -> Vec<T> {
    let mut out = vec![T::one()];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for &a in &out {
            next.extend(f.iter().map(|&b| a * b));
        }
        out = next;
    }
    out
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// New axis `k` is old axis `perm[k]`.
pub(crate) fn permute<T: Copy>(data: &[T], dims: &[usize], perm: &[usize]) -> (Vec<T>, Vec<usize>) {
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let gather: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let n = data.len();
    let mut out = Vec::with_capacity(n);
    let mut idx = vec![0usize; dims.len()];
    let mut src = 0usize;
    for _ in 0..n {
        out.push(data[src]);
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            src += gather[k];
            if idx[k] < new_dims[k] {
                break;
            }
            src -= gather[k] * idx[k];
            idx[k] = 0;
        }
    }
    (out, new_dims)
}

/// Odometer over a mixed-radix index space, last digit fastest.
pub(crate) struct MultiIndex {
    dims: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl MultiIndex {
    pub(crate) fn new(dims: &[usize]) -> Self {
        MultiIndex {
            dims: dims.to_vec(),
            idx: vec![0; dims.len()],
            done: dims.contains(&0),
        }
    }

    pub(crate) fn current(&self) -> Option<&[usize]> {
        if self.done {
            None
        } else {
            Some(&self.idx)
        }
    }

    pub(crate) fn advance(&mut self) {
        for k in (0..self.idx.len()).rev() {
            self.idx[k] += 1;
            if self.idx[k] < self.dims[k] {
                return;
            }
            self.idx[k] = 0;
        }
        self.done = true;
    }
}

/// A tensor whose axes carry integer labels; a label shared by two tensors is summed over.
#[derive(Debug, Clone)]
pub(crate) struct Labeled {
    pub labels: Vec<usize>,
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

impl Labeled {
    pub(crate) fn scalar(value: f64) -> Self {
        Labeled { labels: vec![], dims: vec![], data: vec![value] }
    }

    /// Contract over all shared labels. Result axes: free axes of `self`, then free axes of `other`.
    pub(crate) fn contract(&self, other: &Labeled) -> Labeled {
        let shared: Vec<usize> = self.labels.iter().copied().filter(|l| other.labels.contains(l)).collect();
        let pos = |labels: &[usize], l: usize| labels.iter().position(|&x| x == l).unwrap();

        let a_free: Vec<usize> = (0..self.labels.len()).filter(|&k| !shared.contains(&self.labels[k])).collect();
        let b_free: Vec<usize> = (0..other.labels.len()).filter(|&k| !shared.contains(&other.labels[k])).collect();
        let a_shared: Vec<usize> = shared.iter().map(|&l| pos(&self.labels, l)).collect();
        let b_shared: Vec<usize> = shared.iter().map(|&l| pos(&other.labels, l)).collect();

        let a_perm: Vec<usize> = a_free.iter().chain(&a_shared).copied().collect();
        let b_perm: Vec<usize> = b_shared.iter().chain(&b_free).copied().collect();
        let (a, _) = permute(&self.data, &self.dims, &a_perm);
        let (b, _) = permute(&other.data, &other.dims, &b_perm);

        let m: usize = a_free.iter().map(|&k| self.dims[k]).product();
        let s: usize = a_shared.iter().map(|&k| self.dims[k]).product();
        let n: usize = b_free.iter().map(|&k| other.dims[k]).product();

        let mut out = vec![0.0; m * n];
        for i in 0..m {
            let row = &a[i * s..(i + 1) * s];
            let dst = &mut out[i * n..(i + 1) * n];
            for (k, &aik) in row.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                let brow = &b[k * n..(k + 1) * n];
                for (d, &bkj) in dst.iter_mut().zip(brow) {
                    *d += aik * bkj;
                }
            }
        }

        let labels = a_free.iter().map(|&k| self.labels[k]).chain(b_free.iter().map(|&k| other.labels[k])).collect();
        let dims = a_free.iter().map(|&k| self.dims[k]).chain(b_free.iter().map(|&k| other.dims[k])).collect();
        Labeled { labels, dims, data: out }
    }
}

/// Contraction plan: greedy order that keeps the running frontier small.
///
/// Each inner vector lists the labels of one tensor. Returns the visiting order
/// and the largest intermediate size encountered.
pub(crate) fn greedy_order(tensors: &[(Vec<usize>, Vec<usize>)]) -> (Vec<usize>, usize) {
    let n = tensors.len();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut peak = tensors.iter().map(|(_, d)| numel(d)).max().unwrap_or(1);
    // frontier: label -> dim, for labels open in the running tensor
    let mut frontier: Vec<(usize, usize)> = Vec::new();

    while order.len() < n {
        let mut best: Option<(usize, usize, bool)> = None; // (idx, size, connected)
        for i in (0..n).filter(|&i| !used[i]) {
            let (labels, dims) = &tensors[i];
            let connected = labels.iter().any(|l| frontier.iter().any(|(f, _)| f == l));
            let mut size: usize = frontier
                .iter()
                .filter(|(f, _)| !labels.contains(f))
                .map(|&(_, d)| d)
                .product();
            for (l, d) in labels.iter().zip(dims) {
                if !frontier.iter().any(|(f, _)| f == l) {
                    size = size.saturating_mul(*d);
                }
            }
            let better = match best {
                None => true,
                Some((_, bs, bc)) => (connected && !bc) || (connected == bc && size < bs),
            };
            if better {
                best = Some((i, size, connected));
            }
        }
        let (i, size, _) = best.unwrap();
        used[i] = true;
        order.push(i);
        peak = peak.max(size);
        let (labels, dims) = &tensors[i];
        let mut next: Vec<(usize, usize)> = frontier.iter().copied().filter(|(f, _)| !labels.contains(f)).collect();
        for (l, d) in labels.iter().zip(dims) {
            if !frontier.iter().any(|(f, _)| f == l) {
                next.push((*l, *d));
            }
        }
        frontier = next;
    }
    (order, peak)
}

/// Contract a closed network (every label appears exactly twice) to a scalar.
pub(crate) fn contract_network(tensors: &[Labeled]) -> f64 {
    let spec: Vec<(Vec<usize>, Vec<usize>)> = tensors.iter().map(|t| (t.labels.clone(), t.dims.clone())).collect();
    let (order, _) = greedy_order(&spec);
    let mut acc = Labeled::scalar(1.0);
    for i in order {
        acc = acc.contract(&tensors[i]);
    }
    debug_assert!(acc.labels.is_empty());
    acc.data[0]
}

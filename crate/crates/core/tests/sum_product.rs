//! Cone BP on imported factor graphs against a plain sum-product implementation.

use holoprop::bp::{run_bp, BpConfig};
use holoprop::fixtures;
use holoprop::model::{from_factor_graph, BipartiteModel, FactorGraph};

/// Textbook sum-product: messages indexed by (factor, position in scope).
struct SumProduct {
    to_var: Vec<Vec<Vec<f64>>>,
    to_factor: Vec<Vec<Vec<f64>>>,
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn strides(fg: &FactorGraph, a: usize) -> (Vec<usize>, usize) {
    let dims: Vec<usize> = fg.factors[a].scope.iter().map(|&i| fg.variables[i].weights.len()).collect();
    (dims.clone(), dims.iter().product())
}

fn decode(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut x = vec![0; dims.len()];
    for j in (0..dims.len()).rev() {
        x[j] = flat % dims[j];
        flat /= dims[j];
    }
    x
}

fn sum_product(fg: &FactorGraph, sweeps: usize) -> SumProduct {
    let q = |i: usize| fg.variables[i].weights.len();
    let mut to_var: Vec<Vec<Vec<f64>>> =
        fg.factors.iter().map(|f| f.scope.iter().map(|&i| vec![1.0 / q(i) as f64; q(i)]).collect()).collect();
    let mut to_factor = to_var.clone();
    for _ in 0..sweeps {
        // variable → factor
        let mut next_f = to_factor.clone();
        for (a, f) in fg.factors.iter().enumerate() {
            for (p, &i) in f.scope.iter().enumerate() {
                let mut m = fg.variables[i].weights.clone();
                for (b, g) in fg.factors.iter().enumerate() {
                    for (r, &j) in g.scope.iter().enumerate() {
                        if j == i && (b, r) != (a, p) {
                            m.iter_mut().zip(&to_var[b][r]).for_each(|(x, y)| *x *= y);
                        }
                    }
                }
                next_f[a][p] = normalized(m);
            }
        }
        to_factor = next_f;
        // factor → variable
        let mut next_v = to_var.clone();
        for (a, f) in fg.factors.iter().enumerate() {
            let (dims, total) = strides(fg, a);
            for p in 0..f.scope.len() {
                let mut m = vec![0.0; dims[p]];
                for flat in 0..total {
                    let x = decode(flat, &dims);
                    let mut w = f.table[flat];
                    for r in 0..f.scope.len() {
                        if r != p {
                            w *= to_factor[a][r][x[r]];
                        }
                    }
                    m[x[p]] += w;
                }
                next_v[a][p] = normalized(m);
            }
        }
        to_var = next_v;
    }
    SumProduct { to_var, to_factor }
}

/// Bethe value from sum-product messages: `∏ Z_a ∏ Z_i / ∏ Z_ai`.
fn bethe(fg: &FactorGraph, sp: &SumProduct) -> f64 {
    let mut log_z = 0.0;
    for (a, f) in fg.factors.iter().enumerate() {
        let (dims, total) = strides(fg, a);
        let za: f64 = (0..total)
            .map(|flat| {
                let x = decode(flat, &dims);
                (0..f.scope.len()).fold(f.table[flat], |w, r| w * sp.to_factor[a][r][x[r]])
            })
            .sum();
        log_z += za.ln();
        for p in 0..f.scope.len() {
            let zai: f64 = sp.to_factor[a][p].iter().zip(&sp.to_var[a][p]).map(|(x, y)| x * y).sum();
            log_z -= zai.ln();
        }
    }
    for (i, v) in fg.variables.iter().enumerate() {
        let zi: f64 = (0..v.weights.len())
            .map(|x| {
                let mut w = v.weights[x];
                for (a, f) in fg.factors.iter().enumerate() {
                    for (p, &j) in f.scope.iter().enumerate() {
                        if j == i {
                            w *= sp.to_var[a][p][x];
                        }
                    }
                }
                w
            })
            .sum();
        log_z += zi.ln();
    }
    log_z.exp()
}

fn edge_of(m: &BipartiteModel, fg: &FactorGraph, a: usize, i: usize) -> usize {
    let l = m.left_names().iter().position(|n| *n == fg.factors[a].name).unwrap();
    let r = m.right_names().iter().position(|n| *n == fg.variables[i].name).unwrap();
    m.edge_index(l, r).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Compares messages and Bethe values; `false` when cone BP did not converge.
fn check(fg: &FactorGraph) -> bool {
    let m = from_factor_graph(fg).unwrap();
    let cfg = BpConfig { max_iterations: 5000, tolerance: 1e-13, ..BpConfig::default() };
    let r = run_bp(&m, &cfg).unwrap();
    if !r.converged {
        return false;
    }
    let sp = sum_product(fg, r.iterations + 50);
    for (a, f) in fg.factors.iter().enumerate() {
        for (p, &i) in f.scope.iter().enumerate() {
            let e = edge_of(&m, fg, a, i);
            assert!(max_diff(&r.messages.to_right[e], &sp.to_var[a][p]) < 1e-8, "factor→variable on {a}/{i}");
            assert!(max_diff(&r.messages.to_left[e], &sp.to_factor[a][p]) < 1e-8, "variable→factor on {a}/{i}");
        }
    }
    let b = bethe(fg, &sp);
    assert!((r.bethe - b).abs() < 1e-8 * b, "bethe {} vs {}", r.bethe, b);
    true
}

#[test]
fn random_factor_graphs_match_sum_product() {
    let compared = (0..60).filter(|&seed| check(&fixtures::random_factor_graph(seed, 5, 3))).count();
    assert!(compared >= 50, "only {compared} of 60 runs converged");
}

#[test]
fn loopy_triangle_matches_sum_product() {
    let mut fg = FactorGraph::new();
    let x = fg.add_variable("x", vec![1.0, 2.0]);
    let y = fg.add_variable("y", vec![1.0, 1.0]);
    let z = fg.add_variable("z", vec![0.5, 1.0, 1.5]);
    fg.add_factor("a", vec![x, y], vec![1.0, 2.0, 3.0, 4.0]);
    fg.add_factor("b", vec![z, y], vec![1.0, 0.0, 2.0, 1.0, 0.0, 3.0]);
    fg.add_factor("c", vec![x, z], vec![1.0, 2.0, 1.0, 2.0, 1.0, 3.0]);
    let m = from_factor_graph(&fg).unwrap();
    assert!(run_bp(&m, &BpConfig::default()).unwrap().converged);
    assert!(check(&fg));
}

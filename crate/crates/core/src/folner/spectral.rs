//! Spectral gap of the lazy averaging walk.
//!
//! The walk moves along each edge `{x, y}` with conductance
//! `c(x, y) = ½·min(μ(x)/deg(x), μ(y)/deg(y))` and otherwise stays put, so it
//! is reversible with respect to `μ` and holds with probability at least ½.
//! On a regular graph with uniform weights it is exactly `(I + D⁻¹A)/2`.
//! We work with the symmetrized operator
//! `S = M^{1/2} P M^{-1/2}`, whose spectrum lies in `[0, 1]` with top
//! eigenvector `√μ`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphing::Graphing;

/// Largest atom count handled by the dense eigensolver in `Auto` mode.
pub const DENSE_LIMIT: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    Exact,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// `None` picks exact up to [`DENSE_LIMIT`] atoms, iterative above.
    pub method: Option<SpectralMethod>,
    /// Residual tolerance `‖Sv − θv‖` for the iterative solver.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            method: None,
            tol: 1e-8,
            max_iter: 1500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// `1 − λ₂`, where `λ₂` is the largest eigenvalue on mean-zero functions.
    pub gap: f64,
    /// Eigenvalues in descending order: the full spectrum in exact mode, the
    /// leading Ritz values (after the stationary eigenvalue 1) otherwise.
    pub eigenvalue_estimates: Vec<f64>,
    pub method: SpectralMethod,
    pub residual: f64,
    pub iterations: usize,
    pub components: usize,
}

/// Sparse symmetrized lazy walk.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    diag: Vec<f64>,
    /// `(x, y, s)` for every ordered edge.
    entries: Vec<Vec<(usize, f64)>>,
    sqrt_mu: Vec<f64>,
}

impl WalkOperator {
    pub fn new(g: &Graphing) -> Self {
        let n = g.atom_count();
        let mut diag = vec![1.0; n];
        let mut entries = vec![Vec::new(); n];
        let sqrt_mu: Vec<f64> = (0..n).map(|x| g.weight(x).sqrt()).collect();
        for x in 0..n {
            let wx = g.weight(x);
            for &y in g.neighbors(x) {
                let c = 0.5
                    * (wx / g.degree(x) as f64).min(g.weight(y) / g.degree(y) as f64);
                diag[x] -= c / wx;
                entries[x].push((y, c / (sqrt_mu[x] * sqrt_mu[y])));
            }
        }
        Self {
            diag,
            entries,
            sqrt_mu,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (x, o) in out.iter_mut().enumerate() {
            let mut acc = self.diag[x] * v[x];
            for &(y, s) in &self.entries[x] {
                acc += s * v[y];
            }
            *o = acc;
        }
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            m[(x, x)] = self.diag[x];
            for &(y, s) in &self.entries[x] {
                m[(x, y)] = s;
            }
        }
        m
    }

    /// Unit top eigenvector `√μ`.
    pub fn stationary(&self) -> &[f64] {
        &self.sqrt_mu
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Ritz {
    values: Vec<f64>,
    /// Eigenvector of the top value in the symmetrized coordinates.
    vector: Vec<f64>,
    residual: f64,
    iterations: usize,
    converged: bool,
}

/// Lanczos with full reorthogonalization against the Krylov basis and the
/// stationary vector.
fn lanczos_deflated(op: &WalkOperator, tol: f64, max_iter: usize) -> Ritz {
    let n = op.dim();
    let v0 = op.stationary();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c = dot(&q, v0);
    axpy(-c, v0, &mut q);
    let nq = norm(&q);
    q.iter_mut().for_each(|x| *x /= nq);

    let steps = max_iter.min(n - 1);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best = Ritz {
        values: vec![],
        vector: q.clone(),
        residual: f64::INFINITY,
        iterations: 0,
        converged: false,
    };
    basis.push(q);
    for k in 0..steps {
        op.apply(&basis[k], &mut w);
        let a = dot(&w, &basis[k]);
        alpha.push(a);
        // two passes of Gram–Schmidt against v0 and the basis
        for _ in 0..2 {
            let c = dot(&w, v0);
            axpy(-c, v0, &mut w);
            for b in &basis {
                let c = dot(&w, b);
                axpy(-c, b, &mut w);
            }
        }
        let b = norm(&w);
        let m = k + 1;
        let check = m % 5 == 0 || m == steps || b < 1e-12;
        if check {
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
            let top = order[0];
            let residual = (b * eig.eigenvectors[(m - 1, top)]).abs();
            if residual < best.residual || b < 1e-12 {
                let mut y = vec![0.0; n];
                for (i, basis_vec) in basis.iter().enumerate() {
                    axpy(eig.eigenvectors[(i, top)], basis_vec, &mut y);
                }
                best = Ritz {
                    values: order.iter().take(5).map(|&i| eig.eigenvalues[i]).collect(),
                    vector: y,
                    residual,
                    iterations: m,
                    converged: residual <= tol || b < 1e-12,
                };
            }
            if best.converged {
                best.iterations = m;
                return best;
            }
        }
        best.iterations = m;
        if b < 1e-12 {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    best
}

fn single_atom_report(method: SpectralMethod) -> SpectralReport {
    SpectralReport {
        gap: 1.0,
        eigenvalue_estimates: vec![1.0],
        method,
        residual: 0.0,
        iterations: 0,
        components: 1,
    }
}

fn dense_eigen(op: &WalkOperator) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = SymmetricEigen::new(op.dense());
    let n = op.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Spectral gap of the lazy walk. A disconnected graphing reports gap 0 and
/// its component count; a single atom reports gap 1 (no mean-zero functions).
pub fn spectral_gap(g: &Graphing, opts: SpectralOptions) -> Result<SpectralReport> {
    let n = g.atom_count();
    let method = opts.method.unwrap_or(if n <= DENSE_LIMIT {
        SpectralMethod::Exact
    } else {
        SpectralMethod::Iterative
    });
    if n == 1 {
        return Ok(single_atom_report(method));
    }
    let components = g.component_count();
    let op = WalkOperator::new(g);
    match method {
        SpectralMethod::Exact => {
            let (values, vectors) = dense_eigen(&op);
            let mut sv = vec![0.0; n];
            op.apply(&vectors[1], &mut sv);
            axpy(-values[1], &vectors[1], &mut sv);
            let gap = if components > 1 {
                0.0
            } else {
                (1.0 - values[1]).clamp(0.0, 1.0)
            };
            Ok(SpectralReport {
                gap,
                eigenvalue_estimates: values,
                method,
                residual: norm(&sv),
                iterations: 0,
                components,
            })
        }
        SpectralMethod::Iterative => {
            if components > 1 {
                return Ok(SpectralReport {
                    gap: 0.0,
                    eigenvalue_estimates: vec![1.0, 1.0],
                    method,
                    residual: 0.0,
                    iterations: 0,
                    components,
                });
            }
            let ritz = lanczos_deflated(&op, opts.tol, opts.max_iter);
            if !ritz.converged {
                return Err(Error::NotConverged {
                    iterations: ritz.iterations,
                    residual: ritz.residual,
                });
            }
            let mut est = vec![1.0];
            est.extend(&ritz.values);
            Ok(SpectralReport {
                gap: (1.0 - ritz.values[0]).clamp(0.0, 1.0),
                eigenvalue_estimates: est,
                method,
                residual: ritz.residual,
                iterations: ritz.iterations,
                components,
            })
        }
    }
}

/// Second eigenfunction of the walk in `L²(μ)` coordinates (`f = v/√μ`).
///
/// Used to order atoms for sweep cuts, so an unconverged Lanczos vector is
/// returned as is rather than treated as an error.
pub fn fiedler_vector(g: &Graphing, max_iter: usize) -> Vec<f64> {
    let n = g.atom_count();
    if n <= 1 {
        return vec![0.0; n];
    }
    let op = WalkOperator::new(g);
    let v = if n <= DENSE_LIMIT {
        dense_eigen(&op).1.swap_remove(1)
    } else {
        lanczos_deflated(&op, 1e-8, max_iter).vector
    };
    // fix the sign so that the result is deterministic
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
    v.iter()
        .zip(op.stationary())
        .map(|(vi, s)| sign * vi / s)
        .collect()
}

#[cfg(test)]
fn rayleigh(op: &WalkOperator, v: &[f64]) -> f64 {
    let mut w = vec![0.0; v.len()];
    op.apply(v, &mut w);
    dot(v, &w) / dot(v, v)
}

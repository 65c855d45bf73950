//! Brute-force reference implementations for small instances.
//!
//! Nothing here calls into the adjacency, BFS, search or eigensolver code of
//! the rest of the crate: neighbourhoods are rebuilt from generator pairs,
//! distances come from Floyd–Warshall and eigenvalues from cyclic Jacobi
//! rotations.

use crate::atoms::AtomSet;
use crate::error::{Error, Result};
use crate::graphing::{Distance, Graphing};
use crate::space::MASS_TOL;

/// Largest atom count for subset enumeration.
pub const ENUMERATION_CAP: usize = 20;
/// Largest atom count for the dense spectrum.
pub const DENSE_CAP: usize = 512;

const JACOBI_SWEEPS: usize = 100;

fn check_cap(g: &Graphing, cap: usize, what: &str) -> Result<()> {
    if g.atom_count() > cap {
        return Err(Error::CapExceeded {
            what: what.into(),
            cap,
        });
    }
    Ok(())
}

/// Neighbour bitmasks read straight off the generator pairs.
fn neighbour_bits(g: &Graphing) -> Vec<u32> {
    let mut nb = vec![0u32; g.atom_count()];
    for phi in g.generators() {
        for (x, y) in phi.pairs() {
            if x != y {
                nb[x] |= 1 << y;
                nb[y] |= 1 << x;
            }
        }
    }
    nb
}

fn bits_to_set(bits: u32, n: usize) -> AtomSet {
    (0..n).filter(|&x| bits >> x & 1 == 1).collect()
}

/// Exact minimiser of `μ(∂A)/μ(A)` over non-empty `A` with
/// `μ(A) ∈ [mass_lo, mass_hi]`, lexicographically smallest among ties.
/// `Ok(None)` when the window holds no set.
pub fn brute_min_boundary_ratio(
    g: &Graphing,
    mass_lo: f64,
    mass_hi: f64,
) -> Result<Option<(AtomSet, f64)>> {
    check_cap(g, ENUMERATION_CAP, "atoms for subset enumeration")?;
    let n = g.atom_count();
    let w = g.space().weights();
    let nb = neighbour_bits(g);
    let mut best: Option<(f64, AtomSet)> = None;
    for bits in 1u32..(1u32 << n) {
        let mut mass = 0.0;
        let mut reach = 0u32;
        for x in 0..n {
            if bits >> x & 1 == 1 {
                mass += w[x];
                reach |= nb[x];
            }
        }
        if mass < mass_lo - MASS_TOL || mass > mass_hi + MASS_TOL {
            continue;
        }
        let outside = reach & !bits;
        let mut bmass = 0.0;
        for x in 0..n {
            if outside >> x & 1 == 1 {
                bmass += w[x];
            }
        }
        let ratio = bmass / mass;
        match &best {
            Some((r, _)) if ratio > *r => {}
            Some((r, s)) if ratio == *r => {
                let cand = bits_to_set(bits, n);
                if cand < *s {
                    best = Some((ratio, cand));
                }
            }
            _ => best = Some((ratio, bits_to_set(bits, n))),
        }
    }
    Ok(best.map(|(r, s)| (s, r)))
}

const FAR: u32 = u32::MAX;

fn all_pairs_distances(g: &Graphing) -> Vec<Vec<u32>> {
    let n = g.atom_count();
    let mut d = vec![vec![FAR; n]; n];
    for (x, row) in d.iter_mut().enumerate() {
        row[x] = 0;
    }
    for phi in g.generators() {
        for (x, y) in phi.pairs() {
            if x != y {
                d[x][y] = 1;
                d[y][x] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == FAR {
                continue;
            }
            for j in 0..n {
                if d[k][j] != FAR && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn to_distance(d: u32) -> Distance {
    if d == FAR {
        Distance::Infinite
    } else {
        Distance::Finite(d as usize)
    }
}

/// `sup d(A, B)` over `μ(A) ≥ δ`, `μ(B) ≥ δ′`, with a pair attaining it.
///
/// For fixed `A` the best `B` is `{x : d(x, A) ≥ t}` for the largest `t`
/// keeping its mass at least `δ′`, so only `A` is enumerated.
pub fn brute_concentration(
    g: &Graphing,
    delta: f64,
    delta_prime: f64,
) -> Result<(Distance, (AtomSet, AtomSet))> {
    check_cap(g, ENUMERATION_CAP, "atoms for subset enumeration")?;
    let n = g.atom_count();
    let w = g.space().weights();
    let d = all_pairs_distances(g);
    let mut best: Option<(u32, u32, u32)> = None;
    let mut to_a = vec![FAR; n];
    for a in 1u32..(1u32 << n) {
        let mass: f64 = (0..n).filter(|&x| a >> x & 1 == 1).map(|x| w[x]).sum();
        if mass < delta - MASS_TOL {
            continue;
        }
        for (y, slot) in to_a.iter_mut().enumerate() {
            *slot = (0..n)
                .filter(|&x| a >> x & 1 == 1)
                .map(|x| d[x][y])
                .min()
                .unwrap();
        }
        // candidate thresholds are the distinct distances, tried from the top
        let mut levels: Vec<u32> = to_a.clone();
        levels.sort_unstable_by(|p, q| q.cmp(p));
        levels.dedup();
        for t in levels {
            let b: u32 = (0..n).filter(|&y| to_a[y] >= t).fold(0, |m, y| m | 1 << y);
            let bmass: f64 = (0..n).filter(|&y| b >> y & 1 == 1).map(|y| w[y]).sum();
            if bmass >= delta_prime - MASS_TOL {
                let better = match best {
                    None => true,
                    Some((bt, ba, bb)) => {
                        t > bt
                            || (t == bt
                                && (bits_to_set(a, n), bits_to_set(b, n))
                                    < (bits_to_set(ba, n), bits_to_set(bb, n)))
                    }
                };
                if better {
                    best = Some((t, a, b));
                }
                break;
            }
        }
    }
    let (t, a, b) = best.expect("the whole space is feasible");
    Ok((to_distance(t), (bits_to_set(a, n), bits_to_set(b, n))))
}

/// Dense lazy walk matrix `M^{1/2} P M^{-1/2}` assembled from generator pairs.
fn lazy_walk_matrix(g: &Graphing) -> Vec<Vec<f64>> {
    let n = g.atom_count();
    let w = g.space().weights();
    let mut adj = vec![vec![false; n]; n];
    for phi in g.generators() {
        for (x, y) in phi.pairs() {
            if x != y {
                adj[x][y] = true;
                adj[y][x] = true;
            }
        }
    }
    let deg: Vec<f64> = adj
        .iter()
        .map(|row| row.iter().filter(|&&b| b).count() as f64)
        .collect();
    let mut m = vec![vec![0.0; n]; n];
    for x in 0..n {
        let mut stay = 1.0;
        for y in 0..n {
            if adj[x][y] {
                let c = 0.5 * (w[x] / deg[x]).min(w[y] / deg[y]);
                m[x][y] = c / (w[x] * w[y]).sqrt();
                stay -= c / w[x];
            }
        }
        m[x][x] = stay;
    }
    m
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = a.len();
    let scale: f64 = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * scale {
            let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
            eig.sort_by(|p, q| q.total_cmp(p));
            return Ok(eig);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::NotConverged {
        iterations: JACOBI_SWEEPS,
        residual: f64::NAN,
    })
}

/// Full spectrum of the symmetrized lazy walk, descending.
pub fn brute_dense_spectrum(g: &Graphing) -> Result<Vec<f64>> {
    check_cap(g, DENSE_CAP, "atoms for the dense spectrum")?;
    jacobi_eigenvalues(lazy_walk_matrix(g))
}

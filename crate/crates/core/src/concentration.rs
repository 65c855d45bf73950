//! Distances between sets, the concentration profile `c(δ, δ′)`, witnesses
//! of non-concentration, and level sets of distance profiles.
//!
//! Essential infima over atoms are plain minima: every atom has positive
//! mass.

use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};
use crate::folner::defect::{generator_defect, invariance_defect, InvarianceReport};
use crate::folner::spectral::{fiedler_vector, spectral_gap, SpectralOptions};
use crate::graphing::{Distance, Graphing};
use crate::space::MASS_TOL;

/// Largest atom count accepted by [`profile_exact`].
pub const EXACT_CAP: usize = 20;

/// `min_{x∈A, y∈B} d(x, y)`.
pub fn set_distance(g: &Graphing, a: &AtomSet, b: &AtomSet) -> Result<Distance> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    g.space().check_set(a)?;
    g.space().check_set(b)?;
    let dist = g.distances_from(a);
    Ok(b.iter().filter_map(|y| dist[y]).min().into())
}

/// Every pair of non-null sets lies at finite distance, i.e. the graphing is
/// connected.
pub fn is_ergodic_metric(g: &Graphing) -> bool {
    g.is_connected()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub delta: f64,
    pub delta_prime: f64,
    pub c_lower: Distance,
    pub c_upper: Distance,
    pub witness: Option<(AtomSet, AtomSet)>,
    pub lower_method: String,
    pub upper_method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationProfile {
    pub mode: ProfileMode,
    pub samples: Vec<ProfileSample>,
}

impl ConcentrationProfile {
    pub fn sample(&self, delta: f64, delta_prime: f64) -> Option<&ProfileSample> {
        self.samples
            .iter()
            .find(|s| s.delta == delta && s.delta_prime == delta_prime)
    }

    /// `c_lower ≤ c_upper` everywhere, and `c_upper` non-increasing in
    /// `δ′` at fixed `δ` over the sampled grid.
    pub fn is_consistent(&self) -> bool {
        let ordered = self.samples.iter().all(|s| s.c_lower <= s.c_upper);
        let monotone = self.samples.iter().all(|s| {
            self.samples.iter().all(|t| {
                s.delta != t.delta || s.delta_prime > t.delta_prime || s.c_upper >= t.c_upper
            })
        });
        ordered && monotone
    }
}

fn check_grid(grid: &[(f64, f64)]) -> Result<()> {
    for &(d, dp) in grid {
        if !(d > 0.0 && d <= 1.0 && dp > 0.0 && dp <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "grid point ({d}, {dp}) outside (0, 1]²"
            )));
        }
    }
    Ok(())
}

/// Largest `t` with `μ{x : d(x, A) ≥ t} ≥ δ′`, together with that far set.
/// Unreachable atoms sit at infinite distance.
fn far_set(g: &Graphing, dist: &[Option<usize>], delta_prime: f64) -> Option<(Distance, AtomSet)> {
    let mut by_dist: Vec<(Distance, Atom)> = dist
        .iter()
        .enumerate()
        .map(|(x, d)| (Distance::from(*d), x))
        .collect();
    by_dist.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut mass = 0.0;
    let mut i = 0;
    while i < by_dist.len() {
        let level = by_dist[i].0;
        while i < by_dist.len() && by_dist[i].0 == level {
            mass += g.weight(by_dist[i].1);
            i += 1;
        }
        if mass >= delta_prime - MASS_TOL {
            let set = by_dist[..i].iter().map(|&(_, x)| x).collect();
            return Some((level, set));
        }
    }
    None
}

/// Exact profile by enumerating every `A` with `μ(A) ≥ δ` and pairing it with
/// its far set. Atom counts above [`EXACT_CAP`] are refused.
pub fn profile_exact(g: &Graphing, grid: &[(f64, f64)]) -> Result<ConcentrationProfile> {
    let n = g.atom_count();
    if n > EXACT_CAP {
        return Err(Error::CapExceeded {
            what: "atoms for exact concentration".into(),
            cap: EXACT_CAP,
        });
    }
    check_grid(grid)?;
    let mut best: Vec<Option<(Distance, AtomSet, AtomSet)>> = vec![None; grid.len()];
    let mut mask = vec![false; n];
    for bits in 1u64..(1u64 << n) {
        let mut mass = 0.0;
        for (x, m) in mask.iter_mut().enumerate() {
            *m = bits >> x & 1 == 1;
            if *m {
                mass += g.weight(x);
            }
        }
        if !grid.iter().any(|&(d, _)| mass >= d - MASS_TOL) {
            continue;
        }
        let a = AtomSet::from_mask(&mask);
        let dist = g.distances_from(&a);
        for (slot, &(d, dp)) in best.iter_mut().zip(grid) {
            if mass < d - MASS_TOL {
                continue;
            }
            let Some((c, b)) = far_set(g, &dist, dp) else { continue };
            let better = match slot {
                None => true,
                Some((bc, ba, bb)) => c > *bc || (c == *bc && (&a, &b) < (&*ba, &*bb)),
            };
            if better {
                *slot = Some((c, a.clone(), b));
            }
        }
    }
    let samples = grid
        .iter()
        .zip(best)
        .map(|(&(delta, delta_prime), b)| {
            let (c, a, b) = b.expect("the whole space is always feasible");
            ProfileSample {
                delta,
                delta_prime,
                c_lower: c,
                c_upper: c,
                witness: Some((a, b)),
                lower_method: "enumeration".into(),
                upper_method: "enumeration".into(),
            }
        })
        .collect();
    Ok(ConcentrationProfile {
        mode: ProfileMode::Exact,
        samples,
    })
}

/// Ball growth around `seed` in BFS order (ties by atom index) until the
/// mass reaches `delta`.
fn grow_ball(g: &Graphing, seed: Atom, delta: f64) -> AtomSet {
    let dist = g.distances_from_atom(seed);
    let mut order: Vec<(usize, Atom)> = dist
        .iter()
        .enumerate()
        .filter_map(|(x, d)| d.map(|d| (d, x)))
        .collect();
    order.sort_unstable();
    grow_along(g, order.into_iter().map(|(_, x)| x), delta)
}

fn grow_along(g: &Graphing, order: impl Iterator<Item = Atom>, delta: f64) -> AtomSet {
    let mut mass = 0.0;
    let mut set = Vec::new();
    for x in order {
        set.push(x);
        mass += g.weight(x);
        if mass >= delta - MASS_TOL {
            break;
        }
    }
    AtomSet::from(set)
}

/// Starting sets of mass about `delta`: balls around max-eccentricity atoms
/// and around the extremes of the Fiedler vector, the two Fiedler sweeps, and
/// balls around up to `effort` further atoms spread over the index range.
fn candidate_sets(g: &Graphing, delta: f64, effort: usize) -> Vec<AtomSet> {
    let n = g.atom_count();
    let ecc: Vec<usize> = (0..n).map(|x| g.eccentricity(x)).collect();
    let max_ecc = ecc.iter().copied().max().unwrap_or(0);
    let mut seeds: Vec<Atom> = (0..n).filter(|&x| ecc[x] == max_ecc).take(4).collect();
    let f = fiedler_vector(g, 300);
    let mut sweep: Vec<Atom> = (0..n).collect();
    sweep.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    if let (Some(&lo), Some(&hi)) = (sweep.first(), sweep.last()) {
        seeds.extend([lo, hi]);
    }
    if effort > 0 {
        let stride = n.div_ceil(effort).max(1);
        seeds.extend((0..n).step_by(stride));
    }
    seeds.sort_unstable();
    seeds.dedup();
    let mut sets: Vec<AtomSet> = seeds.into_iter().map(|s| grow_ball(g, s, delta)).collect();
    sets.push(grow_along(g, sweep.iter().copied(), delta));
    sets.push(grow_along(g, sweep.iter().rev().copied(), delta));
    sets
}

/// Best far pair from the candidate sets: `B` is the largest-distance far set
/// of mass at least `δ′`.
fn best_far_pair(
    g: &Graphing,
    delta: f64,
    delta_prime: f64,
    effort: usize,
) -> Option<(Distance, AtomSet, AtomSet)> {
    let mut best: Option<(Distance, AtomSet, AtomSet)> = None;
    for a in candidate_sets(g, delta, effort) {
        if g.mass(&a) < delta - MASS_TOL {
            continue;
        }
        let dist = g.distances_from(&a);
        if let Some((c, b)) = far_set(g, &dist, delta_prime) {
            let better = match &best {
                None => true,
                Some((bc, ba, bb)) => c > *bc || (c == *bc && (&a, &b) < (ba, bb)),
            };
            if better {
                best = Some((c, a, b));
            }
        }
    }
    best
}

/// Upper bound on `c(δ, δ′)` from a spectral gap `γ` of the lazy walk.
///
/// For `μ(A) ≥ δ`, `μ(B) ≥ δ′` and `t` steps of the walk,
/// `⟨1_A, Pᵗ 1_B⟩ ≥ μ(A)μ(B) − (1−γ)ᵗ √(μ(A)μ(B))·√((1−μ(A))(1−μ(B)))`,
/// which is positive once `(1−γ)ᵗ ≤ √(δδ′)`; then `B` is reached from `A` in
/// `t` steps, so `d(A, B) ≤ ⌈log(1/(δδ′)) / (2 log(1/(1−γ)))⌉`. When
/// `δ + δ′ > 1` the sets must meet and the bound is 0.
pub fn spectral_upper_bound(gap: f64, delta: f64, delta_prime: f64) -> Distance {
    if delta + delta_prime > 1.0 + MASS_TOL {
        return Distance::Finite(0);
    }
    if gap <= 0.0 {
        return Distance::Infinite;
    }
    if gap >= 1.0 {
        return Distance::Finite(1);
    }
    let t = (1.0 / (delta * delta_prime)).ln() / (2.0 * (1.0 / (1.0 - gap)).ln());
    Distance::Finite((t.ceil() as usize).max(1))
}

/// Far-pair search for `c_lower`, spectral bound for `c_upper`.
pub fn profile_heuristic(
    g: &Graphing,
    grid: &[(f64, f64)],
    effort: usize,
) -> Result<ConcentrationProfile> {
    check_grid(grid)?;
    let gap = spectral_gap(g, SpectralOptions::default()).ok().map(|r| r.gap);
    let samples = grid
        .iter()
        .map(|&(delta, delta_prime)| {
            let (c_lower, witness) = match best_far_pair(g, delta, delta_prime, effort) {
                Some((c, a, b)) => (c, Some((a, b))),
                None => (Distance::Finite(0), None),
            };
            let (c_upper, upper_method) = match gap {
                Some(gap) => (spectral_upper_bound(gap, delta, delta_prime), "spectral"),
                None => (Distance::Infinite, "none"),
            };
            ProfileSample {
                delta,
                delta_prime,
                c_lower,
                c_upper,
                witness,
                lower_method: "far_pair".into(),
                upper_method: upper_method.into(),
            }
        })
        .collect();
    Ok(ConcentrationProfile {
        mode: ProfileMode::Heuristic,
        samples,
    })
}

/// A pair with `μ(A), μ(B) ≥ δ` and `d(A, B) ≥ target`, if the seeded search
/// finds one. `A` grows as a ball until mass `δ`; `B` is the complement of
/// `ball(A, target − 1)`.
pub fn nonconcentration_witness(
    g: &Graphing,
    delta: f64,
    target_distance: usize,
) -> Result<Option<(AtomSet, AtomSet)>> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    let mut best: Option<(Distance, AtomSet, AtomSet)> = None;
    for a in candidate_sets(g, delta, 0) {
        if g.mass(&a) < delta - MASS_TOL {
            continue;
        }
        let dist = g.distances_from(&a);
        let b: AtomSet = (0..g.atom_count())
            .filter(|&x| Distance::from(dist[x]).at_least(target_distance.max(1)))
            .collect();
        if b.is_empty() || g.mass(&b) < delta - MASS_TOL {
            continue;
        }
        let d = set_distance(g, &a, &b)?;
        let better = match &best {
            None => true,
            Some((bd, ba, bb)) => d > *bd || (d == *bd && (&a, &b) < (ba, bb)),
        };
        if better {
            best = Some((d, a, b));
        }
    }
    Ok(best.map(|(_, a, b)| (a, b)))
}

/// `π(x) = max(0, 1 − d(x, A)/n)`: 1 on the base set, dropping by `1/n` per
/// step, 0 from distance `n` on and on other components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfileFunction {
    pub base_set: AtomSet,
    pub radius: usize,
    pub values: Vec<f64>,
}

impl DistanceProfileFunction {
    /// Fails when `radius` exceeds every finite distance from the base set,
    /// since the profile then never reaches 0.
    pub fn new(g: &Graphing, base: &AtomSet, radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidInput("radius must be at least 1".into()));
        }
        if base.is_empty() {
            return Err(Error::EmptySet);
        }
        g.space().check_set(base)?;
        let dist = g.distances_from(base);
        let reach = dist.iter().flatten().copied().max().unwrap_or(0);
        if radius > reach {
            return Err(Error::Degenerate(format!(
                "radius {radius} exceeds the largest distance {reach} from the base set"
            )));
        }
        let values = dist
            .iter()
            .map(|d| match d {
                Some(d) if *d < radius => (radius - d) as f64 / radius as f64,
                _ => 0.0,
            })
            .collect();
        Ok(Self {
            base_set: base.clone(),
            radius,
            values,
        })
    }

    /// `{π ≥ α}`
    pub fn level_set(&self, alpha: f64) -> AtomSet {
        (0..self.values.len())
            .filter(|&x| self.values[x] >= alpha)
            .collect()
    }

    /// The value set `{i/n : 1 ≤ i ≤ n}` on which `∫₀¹ … dα` is an average.
    pub fn canonical_grid(&self) -> Vec<f64> {
        (1..=self.radius)
            .map(|i| i as f64 / self.radius as f64)
            .collect()
    }
}

/// Default extraction thresholds `{1/n, …, (n−1)/n}`.
pub fn canonical_alphas(radius: usize) -> Vec<f64> {
    (1..radius).map(|i| i as f64 / radius as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub alpha: f64,
    pub set: AtomSet,
    pub mass: f64,
    pub report: InvarianceReport,
}

/// Both sides of the coarea identity for one generator `φ: D → D′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoareaCheck {
    pub generator: usize,
    /// `‖(π∘φ⁻¹ − π)|_{D′}‖₁`
    pub l1_norm: f64,
    /// Mean of `μ(φ(A^α ∩ D) Δ (A^α ∩ D′))` over `α ∈ {i/n}`.
    pub averaged_defect: f64,
    /// `|φ| = Σ_{y∈D′} d(φ⁻¹y, y)·μ(y)`
    pub displacement: f64,
    pub identity_holds: bool,
    pub bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetExtraction {
    pub profile: DistanceProfileFunction,
    pub levels: Vec<LevelSet>,
    pub coarea: Vec<CoareaCheck>,
}

impl LevelSetExtraction {
    pub fn coarea_holds(&self) -> bool {
        self.coarea.iter().all(|c| c.identity_holds && c.bound_holds)
    }
}

const COAREA_TOL: f64 = 1e-9;

/// Super-level sets of the distance profile from `a` at each `α`, with their
/// invariance defects and the per-generator coarea check.
pub fn level_set_extraction(
    g: &Graphing,
    a: &AtomSet,
    radius: usize,
    alphas: &[f64],
) -> Result<LevelSetExtraction> {
    if let Some(&bad) = alphas.iter().find(|&&al| !(al > 0.0 && al < 1.0)) {
        return Err(Error::InvalidInput(format!("alpha {bad} outside (0, 1)")));
    }
    let profile = DistanceProfileFunction::new(g, a, radius)?;
    let levels = alphas
        .iter()
        .map(|&alpha| {
            let set = profile.level_set(alpha);
            Ok(LevelSet {
                alpha,
                mass: g.mass(&set),
                report: invariance_defect(g, &set)?,
                set,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let grid_masks: Vec<Vec<bool>> = profile
        .canonical_grid()
        .iter()
        .map(|&al| profile.level_set(al).mask(g.atom_count()))
        .collect();
    let pi = &profile.values;
    let coarea = g
        .generators()
        .iter()
        .enumerate()
        .map(|(i, phi)| {
            let mut l1_norm = 0.0;
            let mut displacement = 0.0;
            for (x, y) in phi.pairs() {
                l1_norm += (pi[x] - pi[y]).abs() * g.weight(y);
                if x != y {
                    displacement += g.weight(y);
                }
            }
            let averaged_defect = grid_masks
                .iter()
                .map(|m| generator_defect(g, phi, m).1)
                .sum::<f64>()
                / radius as f64;
            CoareaCheck {
                generator: i,
                l1_norm,
                averaged_defect,
                displacement,
                identity_holds: (l1_norm - averaged_defect).abs() <= COAREA_TOL,
                bound_holds: averaged_defect <= displacement / radius as f64 + COAREA_TOL,
            }
        })
        .collect();
    Ok(LevelSetExtraction {
        profile,
        levels,
        coarea,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{product_graphing, rotation_arc, rotation_graphing};
    use crate::graphing::build_graphing;
    use crate::space::{FiniteMeasuredSpace, PartialIsomorphism};

    fn set(v: &[usize]) -> AtomSet {
        AtomSet::from(v.to_vec())
    }

    fn complete(n: usize) -> Graphing {
        let s = FiniteMeasuredSpace::uniform(n).unwrap();
        let gens = (1..n)
            .map(|k| {
                let perm: Vec<_> = (0..n).map(|x| (x + k) % n).collect();
                PartialIsomorphism::from_permutation(&s, &perm).unwrap()
            })
            .collect();
        build_graphing(s, gens).unwrap()
    }

    fn two_cycles() -> Graphing {
        let s = FiniteMeasuredSpace::uniform(8).unwrap();
        let perm = vec![1, 2, 3, 0, 5, 6, 7, 4];
        let phi = PartialIsomorphism::from_permutation(&s, &perm).unwrap();
        build_graphing(s, vec![phi]).unwrap()
    }

    #[test]
    fn distances_between_sets() {
        let c8 = rotation_graphing(8, 1).unwrap();
        assert_eq!(set_distance(&c8, &set(&[0, 1]), &set(&[1, 5])).unwrap(), Distance::Finite(0));
        assert_eq!(set_distance(&c8, &set(&[0, 1]), &set(&[4, 5])).unwrap(), Distance::Finite(3));
        let split = two_cycles();
        assert_eq!(set_distance(&split, &set(&[0]), &set(&[4])).unwrap(), Distance::Infinite);
        assert!(set_distance(&c8, &AtomSet::default(), &set(&[1])).is_err());
    }

    #[test]
    fn ergodic_metric_is_connectivity() {
        assert!(is_ergodic_metric(&rotation_graphing(8, 1).unwrap()));
        assert!(!is_ergodic_metric(&two_cycles()));
        let single = build_graphing(FiniteMeasuredSpace::uniform(1).unwrap(), vec![]).unwrap();
        assert!(is_ergodic_metric(&single));
    }

    #[test]
    fn exact_profile_examples() {
        let c8 = rotation_graphing(8, 1).unwrap();
        let p = profile_exact(&c8, &[(0.25, 0.25), (0.6, 0.6)]).unwrap();
        assert_eq!(p.samples[0].c_lower, Distance::Finite(3));
        assert_eq!(p.samples[0].witness, Some((set(&[0, 1]), set(&[4, 5]))));
        assert_eq!(p.samples[1].c_upper, Distance::Finite(0));
        let k6 = complete(6);
        let p = profile_exact(&k6, &[(0.2, 0.3), (0.5, 0.5)]).unwrap();
        assert!(p.samples.iter().all(|s| s.c_lower == Distance::Finite(1)));
        let p = profile_exact(&two_cycles(), &[(0.5, 0.5)]).unwrap();
        assert_eq!(p.samples[0].c_lower, Distance::Infinite);
        let big = rotation_graphing(21, 1).unwrap();
        assert!(matches!(profile_exact(&big, &[(0.5, 0.5)]), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn heuristic_sandwiches_exact() {
        let g = rotation_graphing(12, 1).unwrap();
        let grid = [(0.2, 0.2), (0.25, 0.5), (0.5, 0.5)];
        let exact = profile_exact(&g, &grid).unwrap();
        let heur = profile_heuristic(&g, &grid, 4).unwrap();
        for (e, h) in exact.samples.iter().zip(&heur.samples) {
            assert!(h.c_lower <= e.c_lower && e.c_upper <= h.c_upper);
        }
        assert!(heur.is_consistent());
    }

    #[test]
    fn heuristic_lower_bound_on_cycles() {
        for n in [16, 40, 64] {
            let g = rotation_graphing(n, 1).unwrap();
            let p = profile_heuristic(&g, &[(0.25, 0.25)], 8).unwrap();
            assert!(p.samples[0].c_lower >= Distance::Finite(n / 4 - 1));
        }
    }

    #[test]
    fn spectral_bound_arithmetic() {
        assert_eq!(spectral_upper_bound(0.0, 0.25, 0.25), Distance::Infinite);
        assert_eq!(spectral_upper_bound(0.0, 0.6, 0.6), Distance::Finite(0));
        // log 16 / (2 log 2) = 2
        assert_eq!(spectral_upper_bound(0.5, 0.25, 0.25), Distance::Finite(2));
    }

    #[test]
    fn witness_examples() {
        let c16 = rotation_graphing(16, 1).unwrap();
        let (a, b) = nonconcentration_witness(&c16, 0.25, 4).unwrap().unwrap();
        assert!(c16.mass(&a) >= 0.25 && c16.mass(&b) >= 0.25);
        assert!(set_distance(&c16, &a, &b).unwrap() >= Distance::Finite(4));
        assert!(nonconcentration_witness(&complete(8), 0.25, 2).unwrap().is_none());
        let c8 = rotation_graphing(8, 1).unwrap();
        let torus = product_graphing(&c8, &c8, 1 << 20).unwrap();
        let (a, b) = nonconcentration_witness(&torus, 0.25, 3).unwrap().unwrap();
        assert!(torus.mass(&a) >= 0.25 - 1e-12 && torus.mass(&b) >= 0.25 - 1e-12);
        assert!(set_distance(&torus, &a, &b).unwrap() >= Distance::Finite(3));
    }

    #[test]
    fn profile_function_values() {
        let c16 = rotation_graphing(16, 1).unwrap();
        let a = rotation_arc(&c16, 0, 4).unwrap();
        let pi = DistanceProfileFunction::new(&c16, &a, 4).unwrap();
        assert_eq!(pi.values[0], 1.0);
        assert_eq!(pi.values[4], 0.75);
        assert_eq!(pi.values[8], 0.0);
        for (x, y) in c16.edges() {
            assert!((pi.values[x] - pi.values[y]).abs() <= 0.25 + 1e-15);
        }
        assert_eq!(pi.level_set(1.0), a);
        assert!(DistanceProfileFunction::new(&c16, &a, 7).is_err());
    }

    #[test]
    fn coarea_on_cycle_arc() {
        let c16 = rotation_graphing(16, 1).unwrap();
        let a = rotation_arc(&c16, 0, 4).unwrap();
        let ex = level_set_extraction(&c16, &a, 4, &canonical_alphas(4)).unwrap();
        assert!(ex.coarea_holds());
        let c = &ex.coarea[0];
        assert!(c.averaged_defect <= 0.25);
        // two sides of the arc each drop 1/4 per step over 4 steps: 2·4·(1/4)/16
        assert!((c.l1_norm - 0.125).abs() < 1e-12);
        assert_eq!(ex.levels.len(), 3);
    }

    #[test]
    fn identity_generator_has_no_defect() {
        let s = FiniteMeasuredSpace::uniform(6).unwrap();
        let rot = PartialIsomorphism::from_permutation(&s, &[1, 2, 3, 4, 5, 0]).unwrap();
        let id = PartialIsomorphism::identity(&s, &AtomSet::range(6)).unwrap();
        let g = build_graphing(s, vec![rot, id]).unwrap();
        let ex = level_set_extraction(&g, &set(&[0]), 2, &[0.5]).unwrap();
        assert_eq!(ex.levels[0].report.per_generator[1].symmetric_defect, 0.0);
        assert_eq!(ex.coarea[1].l1_norm, 0.0);
        assert!(ex.coarea_holds());
    }
}

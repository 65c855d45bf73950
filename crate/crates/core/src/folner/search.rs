//! Search for sets of small boundary-to-mass ratio at a ladder of mass scales.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};
use crate::folner::spectral::fiedler_vector;
use crate::graphing::Graphing;
use crate::space::MASS_TOL;

/// Largest atom count for which the search may fall back to enumeration.
const ENUMERATION_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FolnerOptions {
    /// Number of ball-growing seeds, local-search rounds per start, and the
    /// subset budget below which every subset is enumerated.
    pub effort: usize,
    /// Length of the mass ladder `cap, cap/2, cap/4, …`.
    pub scales: usize,
    pub seed: u64,
    /// Scale `k` (1-based) counts as vanishing when its ratio is at most
    /// `threshold / √k`.
    pub threshold: f64,
    /// Lanczos steps used for the sweep-cut ordering on large graphings.
    pub spectral_iter: usize,
}

impl Default for FolnerOptions {
    fn default() -> Self {
        Self {
            effort: 32,
            scales: 4,
            seed: 0,
            threshold: 1.0,
            spectral_iter: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FolnerScale {
    /// 1-based position on the ladder.
    pub index: usize,
    pub window: [f64; 2],
    pub set: AtomSet,
    pub mass: f64,
    /// `μ(∂A)/μ(A)`
    pub ratio: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FolnerCertificate {
    pub scales: Vec<FolnerScale>,
    pub vanishing: bool,
}

impl FolnerCertificate {
    pub fn sets(&self) -> Vec<&AtomSet> {
        self.scales.iter().map(|s| &s.set).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.scales.iter().map(|s| s.mass).collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.scales.iter().map(|s| s.ratio).collect()
    }

    /// Recomputes every mass and ratio from its set.
    pub fn verify(&self, g: &Graphing) -> bool {
        self.scales.iter().all(|s| {
            !s.set.is_empty()
                && (g.mass(&s.set) - s.mass).abs() <= MASS_TOL
                && (boundary_ratio(g, &s.set) - s.ratio).abs() <= MASS_TOL
        })
    }
}

/// `μ(∂A)/μ(A)`, summed in atom order.
pub fn boundary_ratio(g: &Graphing, a: &AtomSet) -> f64 {
    let mask = a.mask(g.atom_count());
    ratio_of_mask(g, &mask)
}

fn ratio_of_mask(g: &Graphing, mask: &[bool]) -> f64 {
    let b = g.boundary_mask(mask);
    let mut mass = 0.0;
    let mut bmass = 0.0;
    for x in 0..g.atom_count() {
        if mask[x] {
            mass += g.weight(x);
        } else if b[x] {
            bmass += g.weight(x);
        }
    }
    bmass / mass
}

fn in_window(mass: f64, lo: f64, hi: f64) -> bool {
    mass >= lo - MASS_TOL && mass <= hi + MASS_TOL
}

/// Incrementally maintained set with its boundary mass.
struct State<'g> {
    g: &'g Graphing,
    inside: Vec<bool>,
    /// number of neighbours inside the set
    cnt: Vec<u32>,
    size: usize,
    mass: f64,
    bmass: f64,
}

impl<'g> State<'g> {
    fn new(g: &'g Graphing) -> Self {
        let n = g.atom_count();
        Self {
            g,
            inside: vec![false; n],
            cnt: vec![0; n],
            size: 0,
            mass: 0.0,
            bmass: 0.0,
        }
    }

    fn from_mask(g: &'g Graphing, mask: &[bool]) -> Self {
        let mut s = Self::new(g);
        for x in (0..g.atom_count()).filter(|&x| mask[x]) {
            s.add(x);
        }
        s
    }

    fn ratio(&self) -> f64 {
        self.bmass / self.mass
    }

    fn add(&mut self, x: Atom) {
        let g = self.g;
        self.inside[x] = true;
        self.size += 1;
        self.mass += g.weight(x);
        if self.cnt[x] > 0 {
            self.bmass -= g.weight(x);
        }
        for &y in g.neighbors(x) {
            self.cnt[y] += 1;
            if !self.inside[y] && self.cnt[y] == 1 {
                self.bmass += g.weight(y);
            }
        }
    }

    fn remove(&mut self, x: Atom) {
        let g = self.g;
        self.inside[x] = false;
        self.size -= 1;
        self.mass -= g.weight(x);
        for &y in g.neighbors(x) {
            self.cnt[y] -= 1;
            if !self.inside[y] && self.cnt[y] == 0 {
                self.bmass -= g.weight(y);
            }
        }
        if self.cnt[x] > 0 {
            self.bmass += g.weight(x);
        }
    }

    fn bmass_after_add(&self, x: Atom) -> f64 {
        let g = self.g;
        let mut b = self.bmass;
        if self.cnt[x] > 0 {
            b -= g.weight(x);
        }
        for &y in g.neighbors(x) {
            if !self.inside[y] && self.cnt[y] == 0 {
                b += g.weight(y);
            }
        }
        b
    }

    fn bmass_after_remove(&self, x: Atom) -> f64 {
        let g = self.g;
        let mut b = self.bmass;
        if self.cnt[x] > 0 {
            b += g.weight(x);
        }
        for &y in g.neighbors(x) {
            if !self.inside[y] && self.cnt[y] == 1 {
                b -= g.weight(y);
            }
        }
        b
    }

    /// Best single add/remove move keeping the mass in the window; applies it
    /// if it strictly lowers the ratio.
    fn improve(&mut self, lo: f64, hi: f64) -> bool {
        let current = self.ratio();
        let mut best: Option<(f64, Atom)> = None;
        for x in 0..self.g.atom_count() {
            let w = self.g.weight(x);
            let cand = if self.inside[x] {
                if self.size == 1 || !in_window(self.mass - w, lo, hi) {
                    continue;
                }
                self.bmass_after_remove(x) / (self.mass - w)
            } else if self.cnt[x] > 0 {
                if !in_window(self.mass + w, lo, hi) {
                    continue;
                }
                self.bmass_after_add(x) / (self.mass + w)
            } else {
                continue;
            };
            if cand < current - 1e-12 && best.is_none_or(|(r, _)| cand < r) {
                best = Some((cand, x));
            }
        }
        match best {
            Some((_, x)) => {
                if self.inside[x] {
                    self.remove(x);
                } else {
                    self.add(x);
                }
                true
            }
            None => false,
        }
    }
}

#[derive(Default)]
struct Best {
    found: Option<(f64, AtomSet)>,
}

impl Best {
    fn offer(&mut self, g: &Graphing, mask: &[bool]) {
        let ratio = ratio_of_mask(g, mask);
        let better = match &self.found {
            None => true,
            Some((r, s)) => {
                ratio < *r || (ratio == *r && AtomSet::from_mask(mask) < *s)
            }
        };
        if better {
            self.found = Some((ratio, AtomSet::from_mask(mask)));
        }
    }
}

/// Candidate generator over one graphing; the sweep ordering and seed list
/// are computed once and shared by every mass window.
pub struct FolnerSearcher<'g> {
    g: &'g Graphing,
    sweep: Vec<Atom>,
    seeds: Vec<Atom>,
    effort: usize,
}

impl<'g> FolnerSearcher<'g> {
    pub fn new(g: &'g Graphing, opts: &FolnerOptions) -> Self {
        let n = g.atom_count();
        let f = fiedler_vector(g, opts.spectral_iter);
        let mut sweep: Vec<Atom> = (0..n).collect();
        sweep.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
        let mut seeds: Vec<Atom> = (0..n).collect();
        seeds.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
        seeds.truncate(opts.effort.min(n));
        Self {
            g,
            sweep,
            seeds,
            effort: opts.effort,
        }
    }

    fn bfs_order(&self, seed: Atom) -> Vec<Atom> {
        let n = self.g.atom_count();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([seed]);
        seen[seed] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in self.g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        order
    }

    /// Best-ratio prefix of `order` with mass in the window.
    fn best_prefix(&self, order: &[Atom], lo: f64, hi: f64) -> Option<Vec<bool>> {
        let mut st = State::new(self.g);
        let mut best: Option<(f64, usize)> = None;
        for (i, &x) in order.iter().enumerate() {
            st.add(x);
            if st.mass > hi + MASS_TOL {
                break;
            }
            if in_window(st.mass, lo, hi) && best.is_none_or(|(r, _)| st.ratio() < r) {
                best = Some((st.ratio(), i + 1));
            }
        }
        best.map(|(_, len)| {
            let mut mask = vec![false; self.g.atom_count()];
            for &x in &order[..len] {
                mask[x] = true;
            }
            mask
        })
    }

    /// Minimum of `μ(∂A)/μ(A)` found over non-empty `A` with
    /// `μ(A) ∈ [lo, hi]`, ties broken by the lexicographically smaller set.
    pub fn best_in_window(&self, lo: f64, hi: f64) -> Option<(AtomSet, f64)> {
        let g = self.g;
        let n = g.atom_count();
        let mut best = Best::default();

        let reversed: Vec<Atom> = self.sweep.iter().rev().copied().collect();
        let mut starts: Vec<Vec<bool>> = Vec::new();
        starts.extend(self.best_prefix(&self.sweep, lo, hi));
        starts.extend(self.best_prefix(&reversed, lo, hi));
        for &s in &self.seeds {
            starts.extend(self.best_prefix(&self.bfs_order(s), lo, hi));
        }
        for start in starts {
            best.offer(g, &start);
            let mut st = State::from_mask(g, &start);
            let mut rounds = 0;
            while rounds < self.effort && st.improve(lo, hi) {
                rounds += 1;
            }
            if rounds > 0 {
                best.offer(g, &st.inside);
            }
        }

        if n <= ENUMERATION_LIMIT && (1usize << n) <= self.effort {
            let nb: Vec<u32> = (0..n)
                .map(|x| g.neighbors(x).iter().fold(0u32, |m, &y| m | (1 << y)))
                .collect();
            let mut mask = vec![false; n];
            let mut best_ratio = f64::INFINITY;
            for bits in 1u32..(1u32 << n) {
                let mut mass = 0.0;
                let mut reach = 0u32;
                for x in 0..n {
                    if bits >> x & 1 == 1 {
                        mass += g.weight(x);
                        reach |= nb[x];
                    }
                }
                if !in_window(mass, lo, hi) {
                    continue;
                }
                let outer = reach & !bits;
                let bmass: f64 = (0..n)
                    .filter(|&x| outer >> x & 1 == 1)
                    .map(|x| g.weight(x))
                    .sum();
                let r = bmass / mass;
                if r <= best_ratio {
                    best_ratio = r;
                    for (x, m) in mask.iter_mut().enumerate() {
                        *m = bits >> x & 1 == 1;
                    }
                    best.offer(g, &mask);
                }
            }
        }
        best.found.map(|(r, s)| (s, r))
    }
}

/// Best-ratio sets at masses `cap, cap/2, cap/4, …` (window `[m/2, m]` at
/// scale `m`). Scales finer than the lightest atom, or with no feasible set,
/// are skipped.
pub fn folner_search(g: &Graphing, mass_cap: f64, opts: &FolnerOptions) -> Result<FolnerCertificate> {
    if !(mass_cap > 0.0 && mass_cap <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "mass cap must lie in (0, 1], got {mass_cap}"
        )));
    }
    let searcher = FolnerSearcher::new(g, opts);
    let lightest = g.space().weights().iter().copied().fold(f64::INFINITY, f64::min);
    let mut scales = Vec::new();
    for k in 0..opts.scales {
        let hi = mass_cap / (1u64 << k) as f64;
        if hi < lightest - MASS_TOL {
            break;
        }
        let lo = hi / 2.0;
        if let Some((set, ratio)) = searcher.best_in_window(lo, hi) {
            let index = scales.len() + 1;
            scales.push(FolnerScale {
                index,
                window: [lo, hi],
                mass: g.mass(&set),
                set,
                ratio,
                threshold: opts.threshold / (index as f64).sqrt(),
            });
        }
    }
    let vanishing = !scales.is_empty() && scales.iter().all(|s| s.ratio <= s.threshold);
    Ok(FolnerCertificate { scales, vanishing })
}

/// Reads a family of certificates (one per resolution, increasing) along the
/// diagonal: resolution `i` contributes its `i`-th scale. The family vanishes
/// when those masses strictly decrease and ratio `i` is at most
/// `threshold / √i`.
pub fn diagonal_vanishing(family: &[FolnerCertificate], threshold: f64) -> bool {
    let diag: Vec<&FolnerScale> = family
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.scales.get(i))
        .collect();
    diag.len() == family.len()
        && !diag.is_empty()
        && diag.windows(2).all(|w| w[1].mass < w[0].mass)
        && diag
            .iter()
            .enumerate()
            .all(|(i, s)| s.ratio <= threshold / ((i + 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_graphing, rotation_graphing};
    use crate::graphing::build_graphing;
    use crate::space::{FiniteMeasuredSpace, PartialIsomorphism};

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

    #[test]
    fn incremental_state_matches_recomputation() {
        let g = random_graphing(12, 3, 0.7, 9).unwrap();
        let mut st = State::new(&g);
        for x in [3, 5, 7, 0, 11] {
            st.add(x);
        }
        st.remove(5);
        st.add(2);
        st.remove(3);
        let set = AtomSet::from_mask(&st.inside);
        assert!((st.ratio() - boundary_ratio(&g, &set)).abs() < 1e-12);
    }

    #[test]
    fn cycle_arcs_at_quarter_mass() {
        let g = rotation_graphing(64, 1).unwrap();
        let cert = folner_search(&g, 0.25, &FolnerOptions::default()).unwrap();
        assert_eq!(cert.scales[0].ratio, 0.125);
        assert_eq!(cert.scales[0].mass, 0.25);
        let ratios = cert.ratios();
        assert_eq!(ratios, vec![0.125, 0.25, 0.5, 1.0]);
        assert!(cert.verify(&g));
        // 1.0 > 1/√4
        assert!(!cert.vanishing);
    }

    #[test]
    fn complete_graph_ratio_is_complement() {
        let g = complete(16);
        let searcher = FolnerSearcher::new(&g, &FolnerOptions::default());
        let (set, ratio) = searcher.best_in_window(0.25, 0.25).unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(ratio, 3.0);
    }

    #[test]
    fn infeasible_window_yields_nothing() {
        let g = rotation_graphing(8, 1).unwrap();
        let searcher = FolnerSearcher::new(&g, &FolnerOptions::default());
        assert!(searcher.best_in_window(0.13, 0.24).is_none());
        assert!(folner_search(&g, 0.0, &FolnerOptions::default()).is_err());
    }

    #[test]
    fn diagonal_family_vanishes_on_cycles() {
        let opts = FolnerOptions::default();
        let family: Vec<FolnerCertificate> = [32, 128, 512]
            .iter()
            .map(|&n| folner_search(&rotation_graphing(n, 1).unwrap(), 0.25, &opts).unwrap())
            .collect();
        // masses 1/4, 1/8, 1/16 with ratios 1/4, 1/8, 1/16
        assert!(diagonal_vanishing(&family, 1.0));
        let flat = vec![family[0].clone(), family[0].clone()];
        assert!(!diagonal_vanishing(&flat, 0.1));
    }
}

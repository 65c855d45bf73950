//! Finite measured spaces, partial isomorphisms between atom subsets, and the
//! Radon–Nikodym cocycle they induce.
//!
//! A [`FiniteMeasuredSpace`] is a probability vector with strictly positive
//! entries. Essential infima and suprema over such a space are plain minima
//! and maxima over atoms, since no atom is null.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};

/// Tolerance on total mass after normalization.
pub const MASS_TOL: f64 = 1e-12;
/// Relative tolerance on products of cocycle values along chains.
pub const COCYCLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMeasuredSpace {
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct SpaceFile {
    weights: Vec<f64>,
}

impl<'de> Deserialize<'de> for FiniteMeasuredSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SpaceFile::deserialize(d)?;
        make_space(raw.weights).map_err(serde::de::Error::custom)
    }
}

/// Normalizes positive weights into a probability space.
pub fn make_space(weights: Vec<f64>) -> Result<FiniteMeasuredSpace> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("space needs at least one atom".into()));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(Error::InvalidInput(format!(
            "weight {w} at atom {i} is not a positive finite number"
        )));
    }
    let total: f64 = weights.iter().sum();
    let weights = weights.into_iter().map(|w| w / total).collect();
    Ok(FiniteMeasuredSpace { weights })
}

impl FiniteMeasuredSpace {
    pub fn uniform(n: usize) -> Result<Self> {
        make_space(vec![1.0; n])
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: Atom) -> f64 {
        self.weights[atom]
    }

    pub fn mass(&self, set: &AtomSet) -> f64 {
        set.iter().map(|a| self.weights[a]).sum()
    }

    pub fn mass_of_mask(&self, mask: &[bool]) -> f64 {
        mask.iter()
            .zip(&self.weights)
            .filter(|(m, _)| **m)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn is_uniform(&self) -> bool {
        let w0 = self.weights[0];
        self.weights.iter().all(|w| (w - w0).abs() <= MASS_TOL)
    }

    pub fn check_atom(&self, atom: Atom) -> Result<()> {
        if atom < self.atom_count() {
            Ok(())
        } else {
            Err(Error::AtomOutOfRange {
                atom,
                count: self.atom_count(),
            })
        }
    }

    pub fn check_set(&self, set: &AtomSet) -> Result<()> {
        match set.max_atom() {
            Some(a) => self.check_atom(a),
            None => Ok(()),
        }
    }
}

/// A partial injection `domain[i] -> image[i]` with the masses of both
/// endpoints, from which the Radon–Nikodym weights are read off.
///
/// Pairs are kept sorted by domain atom, so two partial isomorphisms with the
/// same graph compare equal regardless of how they were built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialIsomorphism {
    domain: Vec<Atom>,
    image: Vec<Atom>,
    #[serde(skip)]
    source_mass: Vec<f64>,
    #[serde(skip)]
    target_mass: Vec<f64>,
}

/// On-disk form of a partial isomorphism. Radon–Nikodym data is never read
/// from files; it is recomputed against the space on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialIsomorphismFile {
    pub domain: Vec<Atom>,
    pub image: Vec<Atom>,
}

impl PartialIsomorphism {
    pub fn new(space: &FiniteMeasuredSpace, domain: Vec<Atom>, image: Vec<Atom>) -> Result<Self> {
        if domain.len() != image.len() {
            return Err(Error::InvalidInput(format!(
                "domain has {} atoms but image has {}",
                domain.len(),
                image.len()
            )));
        }
        for &a in domain.iter().chain(&image) {
            space.check_atom(a)?;
        }
        let mut pairs: Vec<(Atom, Atom)> = domain.into_iter().zip(image).collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("domain atoms must be distinct".into()));
        }
        let mut seen = vec![false; space.atom_count()];
        for &(_, y) in &pairs {
            if std::mem::replace(&mut seen[y], true) {
                return Err(Error::InvalidInput(format!(
                    "image atom {y} hit twice; map is not injective"
                )));
            }
        }
        let (domain, image): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let source_mass = domain.iter().map(|&x| space.weight(x)).collect();
        let target_mass = image.iter().map(|&y| space.weight(y)).collect();
        Ok(Self {
            domain,
            image,
            source_mass,
            target_mass,
        })
    }

    pub fn from_file(space: &FiniteMeasuredSpace, file: &PartialIsomorphismFile) -> Result<Self> {
        Self::new(space, file.domain.clone(), file.image.clone())
    }

    pub fn to_file(&self) -> PartialIsomorphismFile {
        PartialIsomorphismFile {
            domain: self.domain.clone(),
            image: self.image.clone(),
        }
    }

    pub fn identity(space: &FiniteMeasuredSpace, set: &AtomSet) -> Result<Self> {
        let atoms: Vec<Atom> = set.iter().collect();
        Self::new(space, atoms.clone(), atoms)
    }

    /// The full map `x -> perm[x]`.
    pub fn from_permutation(space: &FiniteMeasuredSpace, perm: &[Atom]) -> Result<Self> {
        if perm.len() != space.atom_count() {
            return Err(Error::InvalidInput(format!(
                "permutation has length {} for a space of {} atoms",
                perm.len(),
                space.atom_count()
            )));
        }
        Self::new(space, (0..perm.len()).collect(), perm.to_vec())
    }

    pub fn empty() -> Self {
        Self {
            domain: Vec::new(),
            image: Vec::new(),
            source_mass: Vec::new(),
            target_mass: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn domain(&self) -> &[Atom] {
        &self.domain
    }

    pub fn image(&self) -> &[Atom] {
        &self.image
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Atom, Atom)> + '_ {
        self.domain.iter().copied().zip(self.image.iter().copied())
    }

    /// `rn_weights[i] = μ(image[i]) / μ(domain[i])`.
    pub fn rn_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.rn_weight(i)).collect()
    }

    pub fn rn_weight(&self, i: usize) -> f64 {
        self.target_mass[i] / self.source_mass[i]
    }

    pub fn domain_set(&self) -> AtomSet {
        AtomSet::from_sorted_unchecked(self.domain.clone())
    }

    pub fn image_set(&self) -> AtomSet {
        self.image.iter().copied().collect()
    }

    /// Image of `x`, if `x` is in the domain.
    pub fn apply(&self, x: Atom) -> Option<Atom> {
        self.domain.binary_search(&x).ok().map(|i| self.image[i])
    }

    pub fn max_atom(&self) -> Option<Atom> {
        self.domain.iter().chain(&self.image).copied().max()
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.image
    }

    /// Same graph (domain/image pairs), ignoring mass bookkeeping.
    pub fn same_graph(&self, other: &Self) -> bool {
        self.domain == other.domain && self.image == other.image
    }

    /// φ(A ∩ D) for a membership mask `a`.
    pub fn image_of(&self, a: &[bool]) -> AtomSet {
        self.pairs().filter(|&(x, _)| a[x]).map(|(_, y)| y).collect()
    }
}

/// `g ∘ f`, defined on `f⁻¹(dom g)`.
pub fn compose(f: &PartialIsomorphism, g: &PartialIsomorphism) -> PartialIsomorphism {
    let mut out = PartialIsomorphism::empty();
    for (i, (x, y)) in f.pairs().enumerate() {
        if let Ok(j) = g.domain.binary_search(&y) {
            out.domain.push(x);
            out.image.push(g.image[j]);
            out.source_mass.push(f.source_mass[i]);
            out.target_mass.push(g.target_mass[j]);
        }
    }
    out
}

pub fn inverse(f: &PartialIsomorphism) -> PartialIsomorphism {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_unstable_by_key(|&i| f.image[i]);
    PartialIsomorphism {
        domain: order.iter().map(|&i| f.image[i]).collect(),
        image: order.iter().map(|&i| f.domain[i]).collect(),
        source_mass: order.iter().map(|&i| f.target_mass[i]).collect(),
        target_mass: order.iter().map(|&i| f.source_mass[i]).collect(),
    }
}

/// Radon–Nikodym cocycle on the relation generated by a family of partial
/// isomorphisms: `δ(x, y) = potential[x] / potential[y]` within one orbit.
#[derive(Debug, Clone)]
pub struct Cocycle {
    orbit: Vec<usize>,
    potential: Vec<f64>,
}

impl Cocycle {
    /// `δ(x, y)`, or `None` when `x` and `y` lie on different orbits.
    pub fn value(&self, x: Atom, y: Atom) -> Option<f64> {
        (self.orbit[x] == self.orbit[y]).then(|| self.potential[x] / self.potential[y])
    }

    pub fn same_orbit(&self, x: Atom, y: Atom) -> bool {
        self.orbit[x] == self.orbit[y]
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit.iter().max().map_or(0, |m| m + 1)
    }

    /// All related ordered pairs with their values. Quadratic in orbit size.
    pub fn pairs(&self) -> Vec<((Atom, Atom), f64)> {
        let n = self.orbit.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if let Some(v) = self.value(x, y) {
                    out.push(((x, y), v));
                }
            }
        }
        out
    }
}

/// Builds the cocycle from generator Radon–Nikodym data by propagating along
/// a spanning forest, then checks every generator edge against it.
pub fn cocycle_of(space: &FiniteMeasuredSpace, generators: &[PartialIsomorphism]) -> Result<Cocycle> {
    let n = space.atom_count();
    // (neighbor, δ(neighbor, x)) lists
    let mut adj: Vec<Vec<(Atom, f64)>> = vec![Vec::new(); n];
    for g in generators {
        if let Some(m) = g.max_atom() {
            space.check_atom(m)?;
        }
        for (i, (x, y)) in g.pairs().enumerate() {
            let rn = g.rn_weight(i);
            if !(rn.is_finite() && rn > 0.0) {
                return Err(Error::Inconsistent(format!(
                    "non-positive Radon–Nikodym weight on {x} -> {y}"
                )));
            }
            // δ(y, x) = μ(y)/μ(x) = rn
            adj[x].push((y, rn));
            adj[y].push((x, 1.0 / rn));
        }
    }
    let mut orbit = vec![usize::MAX; n];
    let mut potential = vec![1.0; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for root in 0..n {
        if orbit[root] != usize::MAX {
            continue;
        }
        orbit[root] = next;
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            for &(y, d_yx) in &adj[x] {
                if orbit[y] == usize::MAX {
                    orbit[y] = next;
                    potential[y] = d_yx * potential[x];
                    queue.push_back(y);
                }
            }
        }
        next += 1;
    }
    for x in 0..n {
        for &(y, d_yx) in &adj[x] {
            let via_tree = potential[y] / potential[x];
            if ((via_tree - d_yx) / d_yx).abs() > COCYCLE_TOL {
                return Err(Error::Inconsistent(format!(
                    "cocycle mismatch on ({y}, {x}): {via_tree} vs {d_yx}"
                )));
            }
        }
    }
    Ok(Cocycle { orbit, potential })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(space: &FiniteMeasuredSpace, k: usize) -> PartialIsomorphism {
        let n = space.atom_count();
        let perm: Vec<_> = (0..n).map(|x| (x + k) % n).collect();
        PartialIsomorphism::from_permutation(space, &perm).unwrap()
    }

    #[test]
    fn make_space_normalizes() {
        let s = make_space(vec![1.0; 4]).unwrap();
        assert_eq!(s.weights(), &[0.25; 4]);
        let s = make_space(vec![2.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.weights(), &[0.5, 0.25, 0.25]);
        assert!((s.weights().iter().sum::<f64>() - 1.0).abs() <= MASS_TOL);
    }

    #[test]
    fn make_space_rejects_bad_input() {
        assert!(make_space(vec![]).is_err());
        assert!(make_space(vec![1.0, 0.0]).is_err());
        assert!(make_space(vec![1.0, -2.0]).is_err());
        assert!(make_space(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn compose_identities_intersects_domains() {
        let s = FiniteMeasuredSpace::uniform(3).unwrap();
        let f = PartialIsomorphism::identity(&s, &vec![0, 1].into()).unwrap();
        let g = PartialIsomorphism::identity(&s, &vec![1, 2].into()).unwrap();
        let h = compose(&f, &g);
        assert_eq!(h.domain(), &[1]);
        assert_eq!(h.image(), &[1]);
    }

    #[test]
    fn compose_with_inverse_is_identity_on_domain() {
        let s = make_space(vec![0.5, 0.3, 0.2, 0.7]).unwrap();
        let phi = PartialIsomorphism::new(&s, vec![0, 1, 3], vec![2, 0, 1]).unwrap();
        let id = compose(&phi, &inverse(&phi));
        assert_eq!(id.domain(), phi.domain());
        assert!(id.is_identity());
        assert!(id.rn_weights().iter().all(|&r| r == 1.0));
    }

    #[test]
    fn rotation_squared() {
        let s = FiniteMeasuredSpace::uniform(3).unwrap();
        let r = rotation(&s, 1);
        let r2 = compose(&r, &r);
        // brute-force permutation composition
        let perm = [1usize, 2, 0];
        let expected: Vec<_> = (0..3).map(|x| perm[perm[x]]).collect();
        assert_eq!(expected, vec![2, 0, 1]);
        assert_eq!(r2.image(), expected.as_slice());
    }

    #[test]
    fn inverse_is_an_involution() {
        let s = make_space(vec![0.1, 0.3, 0.6, 0.7, 1.3]).unwrap();
        let phi = PartialIsomorphism::new(&s, vec![4, 0, 2], vec![1, 3, 0]).unwrap();
        assert_eq!(inverse(&inverse(&phi)), phi);
        let id = PartialIsomorphism::identity(&s, &AtomSet::range(5)).unwrap();
        assert_eq!(inverse(&id), id);
        let u = FiniteMeasuredSpace::uniform(5).unwrap();
        let r = rotation(&u, 2);
        assert!(inverse(&r).rn_weights().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn rn_weights_transport_mass() {
        let s = make_space(vec![0.1, 0.3, 0.6, 0.7, 1.3]).unwrap();
        let phi = PartialIsomorphism::new(&s, vec![4, 0, 2], vec![1, 3, 0]).unwrap();
        for (i, (x, y)) in phi.pairs().enumerate() {
            assert!((phi.rn_weight(i) * s.weight(x) - s.weight(y)).abs() <= MASS_TOL);
        }
    }

    #[test]
    fn rejects_non_injective_maps() {
        let s = FiniteMeasuredSpace::uniform(3).unwrap();
        assert!(PartialIsomorphism::new(&s, vec![0, 1], vec![2, 2]).is_err());
        assert!(PartialIsomorphism::new(&s, vec![0, 0], vec![1, 2]).is_err());
        assert!(PartialIsomorphism::new(&s, vec![0], vec![3]).is_err());
        assert!(PartialIsomorphism::new(&s, vec![0], vec![]).is_err());
    }

    #[test]
    fn cocycle_uniform_is_trivial() {
        let s = FiniteMeasuredSpace::uniform(5).unwrap();
        let c = cocycle_of(&s, &[rotation(&s, 1)]).unwrap();
        assert!(c.pairs().iter().all(|&(_, v)| v == 1.0));
    }

    #[test]
    fn cocycle_is_weight_ratio() {
        let s = make_space(vec![0.5, 0.25, 0.25]).unwrap();
        let e = PartialIsomorphism::new(&s, vec![0], vec![1]).unwrap();
        let c = cocycle_of(&s, &[e]).unwrap();
        assert!((c.value(0, 1).unwrap() - 2.0).abs() < 1e-15);
        assert!((c.value(1, 0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(c.value(0, 2), None);
    }

    #[test]
    fn cocycle_chain_multiplies() {
        let s = make_space(vec![0.5, 0.3, 0.2]).unwrap();
        let a = PartialIsomorphism::new(&s, vec![0], vec![1]).unwrap();
        let b = PartialIsomorphism::new(&s, vec![1], vec![2]).unwrap();
        let c = cocycle_of(&s, &[a, b]).unwrap();
        let expected = (0.5 / 0.3) * (0.3 / 0.2);
        assert!((c.value(0, 2).unwrap() - expected).abs() / expected <= COCYCLE_TOL);
        assert!((expected - 2.5).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_recomputes_rn() {
        let s: FiniteMeasuredSpace = serde_json::from_str(r#"{"weights":[2,1,1]}"#).unwrap();
        assert_eq!(s.weights(), &[0.5, 0.25, 0.25]);
        let f: PartialIsomorphismFile =
            serde_json::from_str(r#"{"domain":[0,1],"image":[1,2]}"#).unwrap();
        let phi = PartialIsomorphism::from_file(&s, &f).unwrap();
        assert_eq!(phi.rn_weights(), vec![0.5, 1.0]);
        assert!(serde_json::from_str::<FiniteMeasuredSpace>(r#"{"weights":[1,0]}"#).is_err());
    }
}

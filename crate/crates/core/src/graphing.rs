//! Graphings: symmetric edge sets over a finite measured space, presented as
//! unions of graphs of partial isomorphisms.
//!
//! The metric is the unweighted simplicial one: `d(x, y)` is the least number
//! of edges joining `x` to `y`, and [`Distance::Infinite`] across components.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};
use crate::space::{compose, inverse, FiniteMeasuredSpace, PartialIsomorphism, PartialIsomorphismFile};

/// Default cap on the number of distinct words produced by [`word_family`].
pub const WORD_CAP: usize = 1_000_000;

/// Simplicial distance, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Distance::Infinite)
    }

    /// `self >= t` for a finite threshold.
    pub fn at_least(self, t: usize) -> bool {
        match self {
            Distance::Finite(d) => d >= t,
            Distance::Infinite => true,
        }
    }
}

impl From<Option<usize>> for Distance {
    fn from(d: Option<usize>) -> Self {
        d.map_or(Distance::Infinite, Distance::Finite)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u64(*d as u64),
            Distance::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Distance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Distance::Finite(n as usize)),
            Raw::S(s) if s == "inf" => Ok(Distance::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad distance {s:?}"))),
        }
    }
}

/// Provenance of a generated graphing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Rotation { n: usize, step: usize },
    Odometer { levels: u32 },
    Expander { n: usize, degree: usize, seed: u64 },
    Product,
    Restriction,
    Quotient,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Rokhlin tower partitions, one per level; each lists the columns in
    /// the cyclic order the generator permutes them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub towers: Vec<Vec<AtomSet>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graphing {
    space: FiniteMeasuredSpace,
    generators: Vec<PartialIsomorphism>,
    adjacency: Vec<Vec<Atom>>,
    pub metadata: Metadata,
}

/// JSON layout: `{ "space": {...}, "generators": [ {domain, image}, ... ] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphingFile {
    pub space: FiniteMeasuredSpace,
    pub generators: Vec<PartialIsomorphismFile>,
    #[serde(default, skip_serializing_if = "is_default_metadata")]
    pub metadata: Metadata,
}

fn is_default_metadata(m: &Metadata) -> bool {
    *m == Metadata::default()
}

impl Serialize for Graphing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graphing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GraphingFile::deserialize(d)?;
        Graphing::from_file(file).map_err(serde::de::Error::custom)
    }
}

/// Symmetrized union of generator graphs, self-loops dropped.
pub fn build_graphing(
    space: FiniteMeasuredSpace,
    generators: Vec<PartialIsomorphism>,
) -> Result<Graphing> {
    let n = space.atom_count();
    let mut adjacency = vec![Vec::new(); n];
    for g in &generators {
        if let Some(m) = g.max_atom() {
            space.check_atom(m)?;
        }
        for (x, y) in g.pairs() {
            if x != y {
                adjacency[x].push(y);
                adjacency[y].push(x);
            }
        }
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
        nb.dedup();
    }
    Ok(Graphing {
        space,
        generators,
        adjacency,
        metadata: Metadata::default(),
    })
}

impl Graphing {
    pub fn from_file(file: GraphingFile) -> Result<Self> {
        let generators = file
            .generators
            .iter()
            .map(|g| PartialIsomorphism::from_file(&file.space, g))
            .collect::<Result<Vec<_>>>()?;
        let mut g = build_graphing(file.space, generators)?;
        g.metadata = file.metadata;
        Ok(g)
    }

    pub fn to_file(&self) -> GraphingFile {
        GraphingFile {
            space: self.space.clone(),
            generators: self.generators.iter().map(|g| g.to_file()).collect(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn space(&self) -> &FiniteMeasuredSpace {
        &self.space
    }

    pub fn atom_count(&self) -> usize {
        self.space.atom_count()
    }

    pub fn weight(&self, x: Atom) -> f64 {
        self.space.weight(x)
    }

    pub fn mass(&self, set: &AtomSet) -> f64 {
        self.space.mass(set)
    }

    pub fn generators(&self) -> &[PartialIsomorphism] {
        &self.generators
    }

    pub fn neighbors(&self, x: Atom) -> &[Atom] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: Atom) -> usize {
        self.adjacency[x].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Undirected edges `(x, y)` with `x < y`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Atom, Atom)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(x, nb)| nb.iter().filter(move |&&y| x < y).map(move |&y| (x, y)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, x: Atom, y: Atom) -> bool {
        self.adjacency[x].binary_search(&y).is_ok()
    }

    /// Multi-source BFS distances from `set`; `None` marks unreachable atoms.
    pub fn distances_from(&self, set: &AtomSet) -> Vec<Option<usize>> {
        let n = self.atom_count();
        let mut dist = vec![None; n];
        let mut queue = VecDeque::new();
        for a in set.iter().filter(|&a| a < n) {
            dist[a] = Some(0);
            queue.push_back(a);
        }
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn distances_from_atom(&self, x: Atom) -> Vec<Option<usize>> {
        self.distances_from(&AtomSet::from_sorted_unchecked(vec![x]))
    }

    /// Component label per atom; labels are assigned in order of smallest atom.
    pub fn components(&self) -> Vec<usize> {
        let n = self.atom_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            stack.push(root);
            while let Some(x) = stack.pop() {
                for &y in &self.adjacency[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    pub fn eccentricity(&self, x: Atom) -> usize {
        self.distances_from_atom(x)
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0)
    }

    /// Largest finite distance (max component diameter).
    pub fn diameter(&self) -> usize {
        (0..self.atom_count())
            .map(|x| self.eccentricity(x))
            .max()
            .unwrap_or(0)
    }

    /// Points outside `set` adjacent to it, as a mask.
    pub fn boundary_mask(&self, set_mask: &[bool]) -> Vec<bool> {
        let mut out = vec![false; self.atom_count()];
        for x in (0..self.atom_count()).filter(|&x| set_mask[x]) {
            for &y in &self.adjacency[x] {
                if !set_mask[y] {
                    out[y] = true;
                }
            }
        }
        out
    }

    pub fn boundary_mass(&self, set: &AtomSet) -> f64 {
        let m = set.mask(self.atom_count());
        self.space.mass_of_mask(&self.boundary_mask(&m))
    }
}

pub fn bfs_distance(g: &Graphing, x: Atom, y: Atom) -> Result<Distance> {
    g.space.check_atom(x)?;
    g.space.check_atom(y)?;
    Ok(g.distances_from_atom(x)[y].into())
}

/// `∂A`: atoms outside `a` at distance one from it.
pub fn boundary(g: &Graphing, a: &AtomSet) -> Result<AtomSet> {
    g.space.check_set(a)?;
    Ok(AtomSet::from_mask(&g.boundary_mask(&a.mask(g.atom_count()))))
}

/// `{ y : d(y, a) <= r }`.
pub fn ball(g: &Graphing, a: &AtomSet, r: usize) -> Result<AtomSet> {
    g.space.check_set(a)?;
    Ok(g.distances_from(a)
        .into_iter()
        .enumerate()
        .filter_map(|(y, d)| matches!(d, Some(d) if d <= r).then_some(y))
        .collect())
}

/// Generators together with their inverses, deduplicated by graph.
pub fn symmetric_letters(g: &Graphing) -> Vec<PartialIsomorphism> {
    let mut letters: Vec<PartialIsomorphism> = Vec::new();
    for phi in g.generators() {
        for cand in [phi.clone(), inverse(phi)] {
            if !cand.is_empty() && !letters.iter().any(|l| l.same_graph(&cand)) {
                letters.push(cand);
            }
        }
    }
    letters
}

/// All words of length `<= r` in the generators and their inverses,
/// deduplicated by action, starting with the identity. Empty maps are dropped.
pub fn word_family(g: &Graphing, r: usize, cap: usize) -> Result<Vec<PartialIsomorphism>> {
    let letters = symmetric_letters(g);
    let id = PartialIsomorphism::identity(&g.space, &AtomSet::range(g.atom_count()))?;
    let key = |w: &PartialIsomorphism| (w.domain().to_vec(), w.image().to_vec());
    let mut seen: HashSet<(Vec<Atom>, Vec<Atom>)> = HashSet::new();
    seen.insert(key(&id));
    let mut words = vec![id];
    let mut frontier = 0..1;
    for _ in 0..r {
        let start = words.len();
        for wi in frontier.clone() {
            for l in &letters {
                let w = compose(&words[wi], l);
                if w.is_empty() || !seen.insert(key(&w)) {
                    continue;
                }
                if words.len() >= cap {
                    return Err(Error::CapExceeded {
                        what: format!("word family of radius {r}"),
                        cap,
                    });
                }
                words.push(w);
            }
        }
        if words.len() == start {
            break;
        }
        frontier = start..words.len();
    }
    Ok(words)
}

/// Degree and counting-measure constants of a graphing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub max_degree: usize,
    /// `h(K) = Σ_x μ(x)·deg(x)`
    pub horizontal_mass: f64,
    /// `h⁻¹(K) = Σ_{(x,y)∈K} μ(y)`
    pub vertical_mass: f64,
    /// `sup_{(x,y)∈K} δ(x,y)`; 1 for an edgeless graphing.
    pub ulb_constant: f64,
}

pub fn degree_report(g: &Graphing) -> DegreeReport {
    let mut horizontal = 0.0;
    let mut vertical = 0.0;
    let mut ulb: f64 = 1.0;
    for x in 0..g.atom_count() {
        let wx = g.weight(x);
        for &y in g.neighbors(x) {
            let wy = g.weight(y);
            horizontal += wx;
            vertical += wy;
            ulb = ulb.max(wx / wy);
        }
    }
    DegreeReport {
        max_degree: g.max_degree(),
        horizontal_mass: horizontal,
        vertical_mass: vertical,
        ulb_constant: ulb,
    }
}

//! Constructors for the standard model families and the stable-isomorphism
//! operations: restriction to a subset, saturation back to the full space,
//! and push-forward to a quotient.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};
use crate::graphing::{build_graphing, Family, Graphing, Metadata};
use crate::space::{inverse, make_space, FiniteMeasuredSpace, PartialIsomorphism};

/// Seed used for the shipped expander instances.
pub const DEFAULT_EXPANDER_SEED: u64 = 7;
/// Full configuration-model re-draws before giving up.
pub const EXPANDER_ATTEMPTS: usize = 100;
/// Default cap on the atom count of a product graphing.
pub const PRODUCT_CAP: usize = 1 << 20;
pub const MAX_ODOMETER_LEVELS: u32 = 20;

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Uniform `n`-atom space with the single generator `x -> x + step mod n`.
/// Disconnected (non-ergodic) when `gcd(step, n) != 1`; that case is recorded
/// as a warning in the metadata.
pub fn rotation_graphing(n: usize, step: usize) -> Result<Graphing> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("rotation needs n >= 3, got {n}")));
    }
    let step = step % n;
    let space = FiniteMeasuredSpace::uniform(n)?;
    let perm: Vec<Atom> = (0..n).map(|x| (x + step) % n).collect();
    let phi = PartialIsomorphism::from_permutation(&space, &perm)?;
    let mut meta = Metadata {
        family: Some(Family::Rotation { n, step }),
        ..Metadata::default()
    };
    let d = gcd(step, n);
    if d != 1 {
        meta.warnings.push(format!(
            "gcd(step, n) = {d}: rotation splits into {d} orbits (non-ergodic model)"
        ));
    }
    Ok(build_graphing(space, vec![phi])?.with_metadata(meta))
}

fn reverse_bits(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Binary adding machine on `2^levels` atoms.
///
/// Atom `x` encodes the digit sequence whose first digit is the most
/// significant bit of `x`, so the generator `+1 with carry` acts as
/// `x -> rev(rev(x) + 1)`. The metadata carries the tower partition at every
/// level `k = 0..=levels`: `2^k` columns listed in the cyclic order in which
/// the generator permutes them.
pub fn odometer_graphing(levels: u32) -> Result<Graphing> {
    if !(1..=MAX_ODOMETER_LEVELS).contains(&levels) {
        return Err(Error::InvalidInput(format!(
            "odometer levels must lie in 1..={MAX_ODOMETER_LEVELS}, got {levels}"
        )));
    }
    let n = 1usize << levels;
    let space = FiniteMeasuredSpace::uniform(n)?;
    let perm: Vec<Atom> = (0..n)
        .map(|x| reverse_bits((reverse_bits(x, levels) + 1) % n, levels))
        .collect();
    let phi = PartialIsomorphism::from_permutation(&space, &perm)?;
    let towers = (0..=levels)
        .map(|k| {
            let cols = 1usize << k;
            let mut columns = vec![Vec::new(); cols];
            for x in 0..n {
                columns[reverse_bits(x, levels) % cols].push(x);
            }
            columns.into_iter().map(AtomSet::from).collect()
        })
        .collect();
    let meta = Metadata {
        family: Some(Family::Odometer { levels }),
        towers,
        ..Metadata::default()
    };
    Ok(build_graphing(space, vec![phi])?.with_metadata(meta))
}

/// Random simple `degree`-regular graph on `n` uniform atoms.
///
/// Stubs are paired by the configuration model; self-loops and multi-edges
/// are repaired by random re-pairing with other pairs. The simple graph is
/// oriented along an Euler circuit (so every atom has in- and out-degree at
/// most `⌈degree/2⌉`) and the oriented edges are split into `⌈degree/2⌉`
/// partial permutations by bipartite edge colouring. For even degree the
/// generators are full permutations.
pub fn expander_graphing(n: usize, degree: usize, seed: u64) -> Result<Graphing> {
    if degree < 3 {
        return Err(Error::InvalidInput(format!(
            "expander degree must be >= 3, got {degree}"
        )));
    }
    if degree >= n || (n * degree) % 2 == 1 {
        return Err(Error::InvalidInput(format!(
            "infeasible degree sequence: n = {n}, degree = {degree}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..EXPANDER_ATTEMPTS)
        .find_map(|_| configuration_pairing(n, degree, &mut rng))
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "no simple {degree}-regular pairing on {n} atoms after {EXPANDER_ATTEMPTS} attempts"
            ))
        })?;
    let arcs = euler_orientation(n, &edges);
    let colors = degree.div_ceil(2);
    let classes = bipartite_edge_coloring(n, colors, &arcs);
    let space = FiniteMeasuredSpace::uniform(n)?;
    let generators = classes
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let (d, i): (Vec<_>, Vec<_>) = c.into_iter().unzip();
            PartialIsomorphism::new(&space, d, i)
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = Metadata {
        family: Some(Family::Expander { n, degree, seed }),
        ..Metadata::default()
    };
    Ok(build_graphing(space, generators)?.with_metadata(meta))
}

fn configuration_pairing(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(Atom, Atom)>> {
    let mut stubs: Vec<Atom> = (0..n).flat_map(|x| std::iter::repeat_n(x, degree)).collect();
    stubs.shuffle(rng);
    let mut pairs: Vec<(Atom, Atom)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
    let key = |a: Atom, b: Atom| (a.min(b), a.max(b));
    let mut count: HashMap<(Atom, Atom), usize> = HashMap::new();
    for &(a, b) in &pairs {
        *count.entry(key(a, b)).or_default() += 1;
    }
    let is_bad = |p: (Atom, Atom), count: &HashMap<(Atom, Atom), usize>| {
        p.0 == p.1 || count[&key(p.0, p.1)] > 1
    };
    let budget = 50 * n * degree;
    let m = pairs.len();
    for _ in 0..budget {
        let Some(i) = (0..m).find(|&i| is_bad(pairs[i], &count)) else {
            return Some(pairs);
        };
        let j = rng.gen_range(0..m);
        if j == i {
            continue;
        }
        let (a, b) = pairs[i];
        let (c, d) = pairs[j];
        let (p, q) = if rng.gen_bool(0.5) {
            ((a, c), (b, d))
        } else {
            ((a, d), (b, c))
        };
        let fresh = |e: (Atom, Atom)| e.0 != e.1 && !count.contains_key(&key(e.0, e.1));
        if !fresh(p) || !fresh(q) || key(p.0, p.1) == key(q.0, q.1) {
            continue;
        }
        for e in [(a, b), (c, d)] {
            let k = key(e.0, e.1);
            let v = count.get_mut(&k).unwrap();
            *v -= 1;
            if *v == 0 {
                count.remove(&k);
            }
        }
        count.insert(key(p.0, p.1), 1);
        count.insert(key(q.0, q.1), 1);
        pairs[i] = p;
        pairs[j] = q;
    }
    (0..m).all(|i| !is_bad(pairs[i], &count)).then_some(pairs)
}

/// Orients each edge along an Euler circuit of the graph augmented with a
/// hub joined to every odd-degree vertex.
fn euler_orientation(n: usize, edges: &[(Atom, Atom)]) -> Vec<(Atom, Atom)> {
    let hub = n;
    let mut all: Vec<(Atom, Atom)> = edges.to_vec();
    let mut deg = vec![0usize; n];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    for (x, &d) in deg.iter().enumerate() {
        if d % 2 == 1 {
            all.push((x, hub));
        }
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (i, &(a, b)) in all.iter().enumerate() {
        incident[a].push(i);
        incident[b].push(i);
    }
    let mut used = vec![false; all.len()];
    let mut cursor = vec![0usize; n + 1];
    let mut oriented = Vec::with_capacity(edges.len());
    for start in 0..=n {
        // Hierholzer: each edge is oriented in the direction it is first walked
        let mut stack = vec![start];
        while let Some(&v) = stack.last() {
            let mut advanced = false;
            while cursor[v] < incident[v].len() {
                let e = incident[v][cursor[v]];
                cursor[v] += 1;
                if used[e] {
                    continue;
                }
                used[e] = true;
                let (a, b) = all[e];
                let w = if a == v { b } else { a };
                if e < edges.len() {
                    oriented.push((v, w));
                }
                stack.push(w);
                advanced = true;
                break;
            }
            if !advanced {
                stack.pop();
            }
        }
    }
    oriented
}

/// Kőnig edge colouring of the bipartite (tail, head) graph of `arcs` with
/// `colors` colours; requires max in/out degree `<= colors`. Returns one
/// list of `(tail, head)` pairs per colour, sorted by tail.
fn bipartite_edge_coloring(n: usize, colors: usize, arcs: &[(Atom, Atom)]) -> Vec<Vec<(Atom, Atom)>> {
    let mut left: Vec<Vec<Option<Atom>>> = vec![vec![None; colors]; n];
    let mut right: Vec<Vec<Option<Atom>>> = vec![vec![None; colors]; n];
    for &(u, v) in arcs {
        let a = (0..colors).find(|&c| left[u][c].is_none()).expect("out-degree within bound");
        let b = (0..colors).find(|&c| right[v][c].is_none()).expect("in-degree within bound");
        if right[v][a].is_some() {
            // flip the a/b alternating path starting at v
            let mut path = Vec::new();
            let mut r = v;
            loop {
                let Some(l) = right[r][a] else { break };
                path.push((l, r, a));
                let Some(r2) = left[l][b] else { break };
                path.push((l, r2, b));
                r = r2;
            }
            for &(l, r, c) in &path {
                left[l][c] = None;
                right[r][c] = None;
            }
            for &(l, r, c) in &path {
                let c2 = if c == a { b } else { a };
                left[l][c2] = Some(r);
                right[r][c2] = Some(l);
            }
        }
        debug_assert!(left[u][a].is_none() && right[v][a].is_none());
        left[u][a] = Some(v);
        right[v][a] = Some(u);
    }
    (0..colors)
        .map(|c| (0..n).filter_map(|u| left[u][c].map(|v| (u, v))).collect())
        .collect()
}

/// Product space with product weights; each factor's generators act on its
/// coordinate. Atom `(i, j)` is numbered `i * n2 + j`.
pub fn product_graphing(g1: &Graphing, g2: &Graphing, cap: usize) -> Result<Graphing> {
    let (n1, n2) = (g1.atom_count(), g2.atom_count());
    let n = n1.saturating_mul(n2);
    if n > cap {
        return Err(Error::CapExceeded {
            what: format!("product atom count {n1} x {n2}"),
            cap,
        });
    }
    let mut weights = Vec::with_capacity(n);
    for i in 0..n1 {
        for j in 0..n2 {
            weights.push(g1.weight(i) * g2.weight(j));
        }
    }
    let space = make_space(weights)?;
    let mut generators = Vec::new();
    for phi in g1.generators() {
        let (mut d, mut im) = (Vec::new(), Vec::new());
        for (x, y) in phi.pairs() {
            for j in 0..n2 {
                d.push(x * n2 + j);
                im.push(y * n2 + j);
            }
        }
        generators.push(PartialIsomorphism::new(&space, d, im)?);
    }
    for psi in g2.generators() {
        let (mut d, mut im) = (Vec::new(), Vec::new());
        for i in 0..n1 {
            for (x, y) in psi.pairs() {
                d.push(i * n2 + x);
                im.push(i * n2 + y);
            }
        }
        generators.push(PartialIsomorphism::new(&space, d, im)?);
    }
    let meta = Metadata {
        family: Some(Family::Product),
        ..Metadata::default()
    };
    Ok(build_graphing(space, generators)?.with_metadata(meta))
}

/// Induced graphing on a subset, with the map back to the parent.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub graphing: Graphing,
    /// `atoms[i]` is the parent atom carried by restricted atom `i`.
    pub atoms: Vec<Atom>,
    /// `μ(Y)`, the factor the restricted weights were divided by.
    pub normalization: f64,
    /// Word-length cap used for first-return enumeration.
    pub cap: usize,
}

impl Restriction {
    pub fn lift(&self, set: &AtomSet) -> AtomSet {
        set.iter().map(|i| self.atoms[i]).collect()
    }

    /// Parent set intersected with the subset, in restricted labels.
    pub fn pull(&self, set: &AtomSet) -> AtomSet {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, &a)| set.contains(a))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Default first-return word-length cap: twice the largest component diameter.
pub fn default_restrict_cap(g: &Graphing) -> usize {
    (2 * g.diameter()).max(1)
}

/// Induced graphing on `y`: generators are first-return words of the parent
/// pseudo-group into `y` of length at most `cap` (default
/// [`default_restrict_cap`]), grouped by spelling.
pub fn restrict(g: &Graphing, y: &AtomSet, cap: Option<usize>) -> Result<Restriction> {
    if y.is_empty() {
        return Err(Error::EmptySet);
    }
    g.space().check_set(y)?;
    let cap = cap.unwrap_or_else(|| default_restrict_cap(g));
    let n = g.atom_count();
    let in_y = y.mask(n);
    let mut label = vec![usize::MAX; n];
    for (i, a) in y.iter().enumerate() {
        label[a] = i;
    }
    // letter 2k is generator k, letter 2k+1 its inverse
    let letters: Vec<PartialIsomorphism> = g
        .generators()
        .iter()
        .flat_map(|phi| [phi.clone(), inverse(phi)])
        .collect();

    let mut by_spelling: BTreeMap<Vec<u32>, Vec<(Atom, Atom)>> = BTreeMap::new();
    let mut depth = vec![usize::MAX; n];
    let mut spelling: Vec<Vec<u32>> = vec![Vec::new(); n];
    for x in y.iter() {
        let mut touched = vec![x];
        depth[x] = 0;
        spelling[x].clear();
        let mut found: Vec<Atom> = Vec::new();
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            let du = depth[u];
            if du >= cap {
                continue;
            }
            for (li, l) in letters.iter().enumerate() {
                let Some(v) = l.apply(u) else { continue };
                if in_y[v] {
                    if v != x && !found.contains(&v) {
                        found.push(v);
                        let mut s = spelling[u].clone();
                        s.push(li as u32);
                        by_spelling.entry(s).or_default().push((label[x], label[v]));
                    }
                } else if depth[v] == usize::MAX {
                    depth[v] = du + 1;
                    let mut s = spelling[u].clone();
                    s.push(li as u32);
                    spelling[v] = s;
                    touched.push(v);
                    queue.push_back(v);
                }
            }
        }
        for t in touched {
            depth[t] = usize::MAX;
        }
    }

    let normalization = g.mass(y);
    let space = make_space(y.iter().map(|a| g.weight(a)).collect())?;
    let mut generators: Vec<PartialIsomorphism> = Vec::new();
    for pairs in by_spelling.into_values() {
        let (d, im): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let phi = PartialIsomorphism::new(&space, d, im)?;
        let inv = inverse(&phi);
        if !generators
            .iter()
            .any(|h| h.same_graph(&phi) || h.same_graph(&inv))
        {
            generators.push(phi);
        }
    }
    let meta = Metadata {
        family: Some(Family::Restriction),
        ..Metadata::default()
    };
    let restricted = build_graphing(space, generators)?.with_metadata(meta);

    let parent_comp = g.components();
    let child_comp = restricted.components();
    let mut first_child: HashMap<usize, usize> = HashMap::new();
    for (i, a) in y.iter().enumerate() {
        let c = *first_child.entry(parent_comp[a]).or_insert(child_comp[i]);
        if c != child_comp[i] {
            let atom = (0..n).find(|&b| parent_comp[b] == parent_comp[a]).unwrap();
            return Err(Error::RestrictionDisconnected { cap, atom });
        }
    }
    Ok(Restriction {
        graphing: restricted,
        atoms: y.iter().collect(),
        normalization,
        cap,
    })
}

/// Assigns every atom to a representative in `y`: atoms of `y` represent
/// themselves; an atom at distance `k` from `y` inherits the representative
/// of its lowest-indexed neighbour at distance `k - 1`.
pub fn representatives(g: &Graphing, y: &AtomSet) -> Result<Vec<Atom>> {
    g.space().check_set(y)?;
    let dist = g.distances_from(y);
    if let Some(atom) = dist.iter().position(Option::is_none) {
        return Err(Error::Unreachable { atom });
    }
    let dist: Vec<usize> = dist.into_iter().map(Option::unwrap).collect();
    let mut order: Vec<Atom> = (0..g.atom_count()).collect();
    order.sort_by_key(|&x| (dist[x], x));
    let mut root = vec![usize::MAX; g.atom_count()];
    for x in order {
        if dist[x] == 0 {
            root[x] = x;
        } else {
            let parent = g
                .neighbors(x)
                .iter()
                .copied()
                .find(|&p| dist[p] + 1 == dist[x])
                .expect("BFS parent exists");
            root[x] = root[parent];
        }
    }
    Ok(root)
}

/// `a` together with every atom outside `y` whose representative lies in `a`.
pub fn saturate_sequence(g: &Graphing, y: &AtomSet, a: &AtomSet) -> Result<AtomSet> {
    if !a.is_subset(y) {
        return Err(Error::InvalidInput("saturated set must lie inside y".into()));
    }
    let root = representatives(g, y)?;
    Ok((0..g.atom_count()).filter(|&x| a.contains(root[x])).collect())
}

/// Push-forward of a graphing along a partition of its atoms.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub graphing: Graphing,
    /// Blocks ordered by their smallest atom; block `i` is quotient atom `i`.
    pub blocks: Vec<AtomSet>,
    pub block_of: Vec<usize>,
}

/// Quotient atoms carry summed block masses; edges are pushed forward with
/// self-loops dropped, then greedily edge-coloured into involutive
/// generators.
pub fn quotient_pushforward(g: &Graphing, blocks: &[AtomSet]) -> Result<Quotient> {
    let n = g.atom_count();
    let mut blocks: Vec<AtomSet> = blocks.to_vec();
    if blocks.iter().any(AtomSet::is_empty) {
        return Err(Error::InvalidInput("partition has an empty block".into()));
    }
    blocks.sort_by_key(|b| b.as_slice()[0]);
    let mut block_of = vec![usize::MAX; n];
    for (i, b) in blocks.iter().enumerate() {
        g.space().check_set(b)?;
        for a in b.iter() {
            if block_of[a] != usize::MAX {
                return Err(Error::InvalidInput(format!("atom {a} lies in two blocks")));
            }
            block_of[a] = i;
        }
    }
    if let Some(a) = block_of.iter().position(|&b| b == usize::MAX) {
        return Err(Error::InvalidInput(format!("atom {a} lies in no block")));
    }
    let space = make_space(blocks.iter().map(|b| g.mass(b)).collect())?;
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(x, y)| (block_of[x], block_of[y]))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();

    let k = blocks.len();
    let mut used: Vec<Vec<bool>> = vec![Vec::new(); k];
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    for (a, b) in edges {
        let c = (0..)
            .find(|&c| !used[a].get(c).copied().unwrap_or(false) && !used[b].get(c).copied().unwrap_or(false))
            .unwrap();
        for v in [a, b] {
            if used[v].len() <= c {
                used[v].resize(c + 1, false);
            }
            used[v][c] = true;
        }
        if classes.len() <= c {
            classes.resize(c + 1, Vec::new());
        }
        classes[c].push((a, b));
    }
    let generators = classes
        .into_iter()
        .map(|cls| {
            let (mut d, mut im) = (Vec::new(), Vec::new());
            for (a, b) in cls {
                d.extend([a, b]);
                im.extend([b, a]);
            }
            PartialIsomorphism::new(&space, d, im)
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = Metadata {
        family: Some(Family::Quotient),
        ..Metadata::default()
    };
    Ok(Quotient {
        graphing: build_graphing(space, generators)?.with_metadata(meta),
        blocks,
        block_of,
    })
}

/// Orbit segment `{start, start + step, …}` of `len` atoms in a rotation
/// graphing.
pub fn rotation_arc(g: &Graphing, start: Atom, len: usize) -> Result<AtomSet> {
    match g.metadata.family {
        Some(Family::Rotation { n, step }) => {
            if len > n {
                return Err(Error::InvalidInput(format!("arc of {len} atoms on {n}")));
            }
            Ok((0..len).map(|i| (start + i * step) % n).collect())
        }
        _ => Err(Error::InvalidInput("arcs need a rotation graphing".into())),
    }
}

/// Random mixed-weight generator for tests and sweeps: `count` random partial
/// maps on `n` atoms with weights drawn from `[0.5, 2)`.
pub fn random_graphing(n: usize, count: usize, density: f64, seed: u64) -> Result<Graphing> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let space = make_space(weights)?;
    let mut generators = Vec::with_capacity(count);
    for _ in 0..count {
        let mut perm: Vec<Atom> = (0..n).collect();
        perm.shuffle(&mut rng);
        let (d, im): (Vec<_>, Vec<_>) = (0..n)
            .filter(|_| rng.gen_bool(density))
            .map(|x| (x, perm[x]))
            .unzip();
        generators.push(PartialIsomorphism::new(&space, d, im)?);
    }
    build_graphing(space, generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphing::{bfs_distance, boundary, Distance};

    fn set(v: &[usize]) -> AtomSet {
        v.to_vec().into()
    }

    #[test]
    fn rotations() {
        let g = rotation_graphing(8, 1).unwrap();
        assert_eq!(g.edge_count(), 8);
        assert!(g.is_connected());
        assert!(g.metadata.warnings.is_empty());

        let g3 = rotation_graphing(8, 3).unwrap();
        assert_eq!(g3.edge_count(), 8);
        assert_eq!(g3.diameter(), 4);
        assert!((0..8).all(|x| g3.degree(x) == 2));

        let g2 = rotation_graphing(8, 2).unwrap();
        assert_eq!(g2.component_count(), 2);
        assert_eq!(g2.metadata.warnings.len(), 1);
        assert!(rotation_graphing(2, 1).is_err());
    }

    #[test]
    fn arcs_have_ratio_two_over_length() {
        let g = rotation_graphing(32, 1).unwrap();
        for k in 1..=16 {
            let a = rotation_arc(&g, 5, k).unwrap();
            let b = boundary(&g, &a).unwrap();
            assert_eq!(g.mass(&b) / g.mass(&a), 2.0 / k as f64);
        }
    }

    #[test]
    fn odometer_small_cases() {
        let g1 = odometer_graphing(1).unwrap();
        assert_eq!(g1.atom_count(), 2);
        assert_eq!(g1.edges().collect::<Vec<_>>(), vec![(0, 1)]);

        let g = odometer_graphing(3).unwrap();
        let phi = &g.generators()[0];
        let mut orbit = vec![0];
        for _ in 0..7 {
            orbit.push(phi.apply(*orbit.last().unwrap()).unwrap());
        }
        // add-one-with-carry on the first digit, enumerated by hand
        assert_eq!(orbit, vec![0, 4, 2, 6, 1, 5, 3, 7]);
        assert_eq!(phi.apply(7), Some(0));
        assert_eq!(g.edge_count(), 8);
        assert!(odometer_graphing(0).is_err());
        assert!(odometer_graphing(21).is_err());
    }

    #[test]
    fn odometer_towers_are_cyclic_and_dyadic() {
        let levels = 5;
        let g = odometer_graphing(levels).unwrap();
        let phi = &g.generators()[0];
        assert_eq!(g.metadata.towers.len(), levels as usize + 1);
        for (k, tower) in g.metadata.towers.iter().enumerate() {
            assert_eq!(tower.len(), 1 << k);
            for (i, col) in tower.iter().enumerate() {
                assert_eq!(g.mass(col), 1.0 / (1 << k) as f64);
                let next = &tower[(i + 1) % tower.len()];
                let img: AtomSet = col.iter().map(|x| phi.apply(x).unwrap()).collect();
                assert_eq!(&img, next);
            }
        }
    }

    #[test]
    fn expander_k4() {
        for seed in 0..5 {
            let g = expander_graphing(4, 3, seed).unwrap();
            assert_eq!(g.edge_count(), 6);
            assert!((0..4).all(|x| g.degree(x) == 3));
            assert_eq!(g.generators().len(), 2);
        }
    }

    #[test]
    fn expander_is_simple_regular_and_seeded() {
        let g = expander_graphing(200, 4, 11).unwrap();
        assert!((0..200).all(|x| g.degree(x) == 4));
        assert_eq!(g.generators().len(), 2);
        assert!(g.generators().iter().all(|p| p.len() == 200));
        let again = expander_graphing(200, 4, 11).unwrap();
        assert_eq!(g, again);
        let other = expander_graphing(200, 4, 12).unwrap();
        assert_ne!(g, other);

        let odd = expander_graphing(100, 5, 3).unwrap();
        assert!((0..100).all(|x| odd.degree(x) == 5));
        assert_eq!(odd.generators().len(), 3);
    }

    #[test]
    fn expander_guards() {
        assert!(expander_graphing(10, 2, 0).is_err());
        assert!(expander_graphing(5, 3, 0).is_err());
        assert!(expander_graphing(4, 4, 0).is_err());
    }

    #[test]
    fn products() {
        let c4 = rotation_graphing(4, 1).unwrap();
        let t = product_graphing(&c4, &c4, PRODUCT_CAP).unwrap();
        assert_eq!(t.atom_count(), 16);
        assert!((0..16).all(|x| t.degree(x) == 4));
        assert_eq!(t.edge_count(), 32);

        let c8 = rotation_graphing(8, 1).unwrap();
        let t8 = product_graphing(&c8, &c8, PRODUCT_CAP).unwrap();
        assert_eq!(t8.diameter(), 8);
        assert_eq!(bfs_distance(&t8, 0, 4 * 8 + 4).unwrap(), Distance::Finite(8));

        let point = build_graphing(FiniteMeasuredSpace::uniform(1).unwrap(), vec![]).unwrap();
        let same = product_graphing(&c8, &point, PRODUCT_CAP).unwrap();
        assert_eq!(same.edges().collect::<Vec<_>>(), c8.edges().collect::<Vec<_>>());
        assert_eq!(same.space(), c8.space());

        assert!(matches!(
            product_graphing(&c8, &c8, 63),
            Err(Error::CapExceeded { cap: 63, .. })
        ));
    }

    #[test]
    fn product_degree_adds() {
        let a = random_graphing(5, 2, 0.6, 1).unwrap();
        let b = random_graphing(4, 2, 0.6, 2).unwrap();
        let p = product_graphing(&a, &b, PRODUCT_CAP).unwrap();
        for i in 0..5 {
            for j in 0..4 {
                assert_eq!(p.degree(i * 4 + j), a.degree(i) + b.degree(j));
            }
        }
    }

    #[test]
    fn restrict_to_evens() {
        let g = rotation_graphing(8, 1).unwrap();
        let evens = set(&[0, 2, 4, 6]);
        let r = restrict(&g, &evens, None).unwrap();
        assert_eq!(r.graphing.atom_count(), 4);
        assert_eq!(r.normalization, 0.5);
        assert_eq!(r.graphing.space().weights(), &[0.25; 4]);
        assert_eq!(
            r.graphing.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 3), (1, 2), (2, 3)]
        );
        // the first-return map is the double rotation
        assert_eq!(r.graphing.generators().len(), 1);
        let phi = &r.graphing.generators()[0];
        let lifted: Vec<_> = (0..4).map(|i| r.atoms[phi.apply(i).unwrap()]).collect();
        assert!(lifted == vec![2, 4, 6, 0] || lifted == vec![6, 0, 2, 4]);
    }

    #[test]
    fn restrict_to_everything_and_to_a_point() {
        let g = expander_graphing(30, 4, 1).unwrap();
        let r = restrict(&g, &AtomSet::range(30), None).unwrap();
        assert_eq!(
            r.graphing.edges().collect::<Vec<_>>(),
            g.edges().collect::<Vec<_>>()
        );
        let p = restrict(&g, &set(&[7]), None).unwrap();
        assert_eq!(p.graphing.atom_count(), 1);
        assert_eq!(p.graphing.edge_count(), 0);
        assert!(restrict(&g, &AtomSet::new(), None).is_err());
    }

    #[test]
    fn restrict_reports_short_cap() {
        let g = rotation_graphing(12, 1).unwrap();
        let y = set(&[0, 6]);
        assert!(matches!(
            restrict(&g, &y, Some(3)),
            Err(Error::RestrictionDisconnected { cap: 3, atom: 0 })
        ));
        let ok = restrict(&g, &y, Some(6)).unwrap();
        assert_eq!(ok.graphing.edge_count(), 1);
    }

    #[test]
    fn saturation() {
        let g = rotation_graphing(8, 1).unwrap();
        let evens = set(&[0, 2, 4, 6]);
        assert_eq!(saturate_sequence(&g, &evens, &evens).unwrap(), AtomSet::range(8));
        assert!(saturate_sequence(&g, &evens, &AtomSet::new()).unwrap().is_empty());
        assert_eq!(saturate_sequence(&g, &evens, &set(&[0])).unwrap(), set(&[0, 1, 7]));
        assert!(saturate_sequence(&g, &evens, &set(&[1])).is_err());

        let split = rotation_graphing(8, 2).unwrap();
        assert!(matches!(
            saturate_sequence(&split, &set(&[0]), &set(&[0])),
            Err(Error::Unreachable { atom: 1 })
        ));
    }

    #[test]
    fn quotients() {
        let g = rotation_graphing(8, 1).unwrap();
        let singletons: Vec<AtomSet> = (0..8).map(|i| set(&[i])).collect();
        let q = quotient_pushforward(&g, &singletons).unwrap();
        assert_eq!(q.graphing.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        assert_eq!(q.graphing.space(), g.space());

        let one = quotient_pushforward(&g, &[AtomSet::range(8)]).unwrap();
        assert_eq!(one.graphing.atom_count(), 1);
        assert_eq!(one.graphing.edge_count(), 0);

        let antipodal: Vec<AtomSet> = (0..4).map(|i| set(&[i, i + 4])).collect();
        let q4 = quotient_pushforward(&g, &antipodal).unwrap();
        assert_eq!(q4.graphing.space().weights(), &[0.25; 4]);
        assert_eq!(
            q4.graphing.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 3), (1, 2), (2, 3)]
        );

        assert!(quotient_pushforward(&g, &[set(&[0, 1])]).is_err());
        assert!(quotient_pushforward(&g, &[AtomSet::range(8), set(&[3])]).is_err());
    }
}

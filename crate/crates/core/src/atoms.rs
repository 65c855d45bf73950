//! Atom indices and sorted atom sets.

use serde::{Deserialize, Serialize};

/// Index of an atom in a [`crate::FiniteMeasuredSpace`].
pub type Atom = usize;

/// A finite set of atoms, stored sorted and deduplicated.
///
/// The derived ordering is lexicographic on the sorted atom list; every
/// deterministic tie-break in the crate uses it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct AtomSet {
    atoms: Vec<Atom>,
}

impl AtomSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sorted_unchecked(atoms: Vec<Atom>) -> Self {
        debug_assert!(atoms.windows(2).all(|w| w[0] < w[1]));
        Self { atoms }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Self {
            atoms: mask
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        }
    }

    pub fn range(n: usize) -> Self {
        Self { atoms: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: Atom) -> bool {
        self.atoms.binary_search(&atom).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.atoms.iter().copied()
    }

    pub fn as_slice(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn max_atom(&self) -> Option<Atom> {
        self.atoms.last().copied()
    }

    /// Membership mask of length `n`. Atoms `>= n` are ignored.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &a in &self.atoms {
            if a < n {
                m[a] = true;
            }
        }
        m
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.atoms, &other.atoms);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    v.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    v.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    v.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&a[i..]);
        v.extend_from_slice(&b[j..]);
        AtomSet { atoms: v }
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        AtomSet {
            atoms: self.iter().filter(|&a| other.contains(a)).collect(),
        }
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        AtomSet {
            atoms: self.iter().filter(|&a| !other.contains(a)).collect(),
        }
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.iter().all(|a| other.contains(a))
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.iter().all(|a| !other.contains(a))
    }

    /// Complement within `0..n`.
    pub fn complement(&self, n: usize) -> AtomSet {
        let m = self.mask(n);
        AtomSet {
            atoms: (0..n).filter(|&i| !m[i]).collect(),
        }
    }
}

impl From<Vec<Atom>> for AtomSet {
    fn from(mut atoms: Vec<Atom>) -> Self {
        atoms.sort_unstable();
        atoms.dedup();
        Self { atoms }
    }
}

impl From<AtomSet> for Vec<Atom> {
    fn from(s: AtomSet) -> Self {
        s.atoms
    }
}

impl FromIterator<Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        iter.into_iter().collect::<Vec<_>>().into()
    }
}

impl<'a> IntoIterator for &'a AtomSet {
    type Item = Atom;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, Atom>>;

    fn into_iter(self) -> Self::IntoIter {
        self.atoms.iter().copied()
    }
}

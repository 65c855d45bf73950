//! Invariance defects of a set under the generators of a graphing.

use serde::{Deserialize, Serialize};

use crate::atoms::AtomSet;
use crate::error::Result;
use crate::graphing::Graphing;
use crate::space::PartialIsomorphism;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDefect {
    pub generator: usize,
    /// `μ(φ(A ∩ D) ∖ A)`
    pub defect: f64,
    /// `μ(φ(A ∩ D) Δ (A ∩ D′))`, `D′` the image of `φ`.
    pub symmetric_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub per_generator: Vec<GeneratorDefect>,
    pub max_defect: f64,
    pub max_symmetric_defect: f64,
}

impl InvarianceReport {
    pub fn symmetric_defects(&self) -> Vec<f64> {
        self.per_generator.iter().map(|d| d.symmetric_defect).collect()
    }
}

/// `(μ(φ(A∩D)∖A), μ(φ(A∩D) Δ (A∩D′)))` for a membership mask.
pub fn generator_defect(g: &Graphing, phi: &PartialIsomorphism, a: &[bool]) -> (f64, f64) {
    let n = g.atom_count();
    let mut pushed = vec![false; n];
    let mut escaped = 0.0;
    for (x, y) in phi.pairs() {
        if a[x] {
            pushed[y] = true;
            if !a[y] {
                escaped += g.weight(y);
            }
        }
    }
    let mut missed = 0.0;
    for &y in phi.image() {
        if a[y] && !pushed[y] {
            missed += g.weight(y);
        }
    }
    (escaped, escaped + missed)
}

pub fn invariance_defect(g: &Graphing, a: &AtomSet) -> Result<InvarianceReport> {
    g.space().check_set(a)?;
    let mask = a.mask(g.atom_count());
    let per_generator: Vec<GeneratorDefect> = g
        .generators()
        .iter()
        .enumerate()
        .map(|(i, phi)| {
            let (defect, symmetric_defect) = generator_defect(g, phi, &mask);
            GeneratorDefect {
                generator: i,
                defect,
                symmetric_defect,
            }
        })
        .collect();
    let max_defect = per_generator.iter().map(|d| d.defect).fold(0.0, f64::max);
    let max_symmetric_defect = per_generator
        .iter()
        .map(|d| d.symmetric_defect)
        .fold(0.0, f64::max);
    Ok(InvarianceReport {
        per_generator,
        max_defect,
        max_symmetric_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::rotation_graphing;

    #[test]
    fn invariant_sets_have_no_defect() {
        let g = rotation_graphing(8, 1).unwrap();
        for a in [AtomSet::new(), AtomSet::range(8)] {
            let r = invariance_defect(&g, &a).unwrap();
            assert_eq!(r.max_defect, 0.0);
            assert_eq!(r.max_symmetric_defect, 0.0);
        }
    }

    #[test]
    fn half_cycle_escapes_one_atom() {
        let g = rotation_graphing(8, 1).unwrap();
        let r = invariance_defect(&g, &vec![0, 1, 2, 3].into()).unwrap();
        assert_eq!(r.per_generator[0].defect, 0.125);
        // image {1,2,3,4}: gains 4, loses 0
        assert_eq!(r.per_generator[0].symmetric_defect, 0.25);
    }

    #[test]
    fn component_is_invariant() {
        let g = rotation_graphing(8, 2).unwrap();
        let evens: AtomSet = vec![0, 2, 4, 6].into();
        assert_eq!(invariance_defect(&g, &evens).unwrap().max_defect, 0.0);
    }
}

//! Defect series along a family of graphings of increasing resolution.

use serde::{Deserialize, Serialize};

use crate::atoms::AtomSet;
use crate::concentration::DistanceProfileFunction;
use crate::error::{Error, Result};
use crate::folner::accumulate::{accumulate_invariant, PieceSource};
use crate::folner::defect::{invariance_defect, InvarianceReport};
use crate::folner::search::FolnerOptions;
use crate::generators::rotation_arc;
use crate::graphing::Graphing;
use crate::space::MASS_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesStrategy {
    /// Smallest super-level set of the distance profile from atom 0 that
    /// reaches the target mass.
    LevelSet,
    /// Greedy accumulation towards the target mass.
    Accumulate,
    /// Arc `{0, …, ⌊target·n⌉ − 1}` of a rotation.
    Arcs,
}

impl std::str::FromStr for SeriesStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "level_set" | "level-set" => Ok(Self::LevelSet),
            "accumulate" => Ok(Self::Accumulate),
            "arcs" => Ok(Self::Arcs),
            _ => Err(Error::InvalidInput(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub target_mass: f64,
    /// Tolerance of the accumulate strategy.
    pub epsilon: f64,
    pub search: FolnerOptions,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            target_mass: 0.25,
            epsilon: 1.0,
            search: FolnerOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub index: usize,
    pub atom_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<AtomSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<InvarianceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn build_set(g: &Graphing, strategy: SeriesStrategy, opts: &SeriesOptions) -> Result<AtomSet> {
    match strategy {
        SeriesStrategy::Arcs => {
            let len = (opts.target_mass * g.atom_count() as f64).round() as usize;
            rotation_arc(g, 0, len.max(1))
        }
        SeriesStrategy::LevelSet => {
            let base = AtomSet::from(vec![0]);
            let radius = g.eccentricity(0);
            if radius == 0 {
                return Err(Error::Degenerate("atom 0 has no neighbours".into()));
            }
            let pi = DistanceProfileFunction::new(g, &base, radius)?;
            // level sets grow as alpha decreases
            (1..=radius)
                .rev()
                .map(|i| pi.level_set(i as f64 / radius as f64))
                .find(|s| g.mass(s) >= opts.target_mass - MASS_TOL)
                .ok_or_else(|| {
                    Error::Degenerate("component of atom 0 is lighter than the target".into())
                })
        }
        SeriesStrategy::Accumulate => Ok(accumulate_invariant(
            g,
            opts.epsilon,
            opts.target_mass,
            &PieceSource::Search(opts.search),
        )?
        .set),
    }
}

/// One entry per family member; a member the strategy cannot handle gets an
/// error entry and the series continues.
pub fn asymptotic_invariance_series(
    family: &[Graphing],
    strategy: SeriesStrategy,
    opts: &SeriesOptions,
) -> Vec<SeriesEntry> {
    family
        .iter()
        .enumerate()
        .map(|(index, g)| {
            let outcome = build_set(g, strategy, opts)
                .and_then(|set| invariance_defect(g, &set).map(|r| (set, r)));
            match outcome {
                Ok((set, report)) => SeriesEntry {
                    index,
                    atom_count: g.atom_count(),
                    mass: Some(g.mass(&set)),
                    set: Some(set),
                    report: Some(report),
                    error: None,
                },
                Err(e) => SeriesEntry {
                    index,
                    atom_count: g.atom_count(),
                    set: None,
                    mass: None,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

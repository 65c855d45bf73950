//! Invariance defects, spectral gaps, small-boundary set search and the
//! greedy accumulation of almost invariant sets.

pub mod accumulate;
pub mod defect;
pub mod search;
pub mod series;
pub mod spectral;

pub use accumulate::{accumulate_invariant, inner_epsilon, AccumulationResult, MergeStep, PieceSource};
pub use defect::{generator_defect, invariance_defect, GeneratorDefect, InvarianceReport};
pub use search::{
    boundary_ratio, diagonal_vanishing, folner_search, FolnerCertificate, FolnerOptions,
    FolnerScale, FolnerSearcher,
};
pub use series::{asymptotic_invariance_series, SeriesEntry, SeriesOptions, SeriesStrategy};
pub use spectral::{
    fiedler_vector, spectral_gap, SpectralMethod, SpectralOptions, SpectralReport, WalkOperator,
};

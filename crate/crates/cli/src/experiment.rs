//! Config-driven sweeps: one family, one instance per sweep point, a list of
//! analyses run on every instance.
//!
//! ```json
//! {
//!   "family": "expander",
//!   "sweep": [{"n": 256, "degree": 4}, {"n": 1024, "degree": 4}],
//!   "analyses": ["spectrum", "folner", "series:accumulate"],
//!   "seed": 7,
//!   "output": "runs/expander",
//!   "settings": {"effort": 32, "target_mass": 0.25}
//! }
//! ```
//!
//! Layout of the output directory:
//! `instances/<label>.json`, `reports/<label>.<analysis>.json`,
//! `series-<strategy>.json`, `summary-<analysis>.csv` and `manifest.json`.
//! Only the manifest carries timing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use orbitlab::concentration::{profile_exact, profile_heuristic, ConcentrationProfile, EXACT_CAP};
use orbitlab::folner::{
    asymptotic_invariance_series, folner_search, spectral_gap, FolnerCertificate, FolnerOptions,
    SeriesEntry, SeriesOptions, SeriesStrategy, SpectralOptions, SpectralReport,
};
use orbitlab::generators::{
    expander_graphing, odometer_graphing, rotation_graphing, DEFAULT_EXPANDER_SEED,
};
use orbitlab::Graphing;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::{csv_bytes, to_json, write_file};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Rotation,
    Odometer,
    Expander,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub n: Option<usize>,
    pub step: Option<usize>,
    pub levels: Option<u32>,
    pub degree: Option<usize>,
    pub seed: Option<u64>,
}

fn default_seed() -> u64 {
    DEFAULT_EXPANDER_SEED
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(default = "Settings::default_grid")]
    pub grid: Vec<(f64, f64)>,
    #[serde(default)]
    pub exact: bool,
    #[serde(default = "Settings::default_effort")]
    pub effort: usize,
    #[serde(default = "Settings::default_mass_cap")]
    pub mass_cap: f64,
    #[serde(default = "Settings::default_scales")]
    pub scales: usize,
    #[serde(default = "Settings::default_target_mass")]
    pub target_mass: f64,
    #[serde(default = "Settings::default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "Settings::default_tol")]
    pub tol: f64,
    #[serde(default = "Settings::default_max_iter")]
    pub max_iter: usize,
}

impl Settings {
    fn default_grid() -> Vec<(f64, f64)> {
        let v = [0.2, 0.3, 0.5];
        v.iter().flat_map(|&d| v.map(|e| (d, e))).collect()
    }
    fn default_effort() -> usize {
        32
    }
    fn default_mass_cap() -> f64 {
        0.5
    }
    fn default_scales() -> usize {
        4
    }
    fn default_target_mass() -> f64 {
        0.25
    }
    fn default_epsilon() -> f64 {
        1.0
    }
    fn default_tol() -> f64 {
        1e-8
    }
    fn default_max_iter() -> usize {
        1500
    }
}

impl Default for Settings {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all settings have defaults")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilyName,
    pub sweep: Vec<SweepPoint>,
    #[serde(default)]
    pub analyses: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analysis {
    Concentrate,
    Folner,
    Spectrum,
    Series(SeriesStrategy),
}

impl Analysis {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "concentrate" => Some(Self::Concentrate),
            "folner" => Some(Self::Folner),
            "spectrum" => Some(Self::Spectrum),
            _ => s
                .strip_prefix("series:")
                .and_then(|st| st.parse().ok())
                .map(Self::Series),
        }
    }

    fn name(self) -> String {
        match self {
            Self::Concentrate => "concentrate".into(),
            Self::Folner => "folner".into(),
            Self::Spectrum => "spectrum".into(),
            Self::Series(st) => format!("series-{}", strategy_name(st)),
        }
    }
}

fn strategy_name(s: SeriesStrategy) -> &'static str {
    match s {
        SeriesStrategy::LevelSet => "level_set",
        SeriesStrategy::Accumulate => "accumulate",
        SeriesStrategy::Arcs => "arcs",
    }
}

fn config_error(pointer: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        pointer: pointer.into(),
        message: message.into(),
    }
}

pub fn parse_config(text: &str) -> CliResult<(ExperimentConfig, serde_json::Value)> {
    let raw: serde_json::Value =
        serde_json::from_str(text).map_err(|e| config_error("", e.to_string()))?;
    let config: ExperimentConfig = serde_path_to_error::deserialize(&raw).map_err(|e| {
        let pointer = e.path().to_string();
        config_error(pointer, e.into_inner().to_string())
    })?;
    Ok((config, raw))
}

fn analyses(config: &ExperimentConfig) -> CliResult<Vec<Analysis>> {
    config
        .analyses
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Analysis::parse(s).ok_or_else(|| {
                config_error(
                    format!("analyses[{i}]"),
                    format!("unknown analysis {s:?}; expected concentrate, folner, spectrum or series:<level_set|accumulate|arcs>"),
                )
            })
        })
        .collect()
}

struct Instance {
    label: String,
    seed: Option<u64>,
    graphing: Graphing,
}

fn need<T: Copy>(v: Option<T>, i: usize, key: &str) -> CliResult<T> {
    v.ok_or_else(|| config_error(format!("sweep[{i}].{key}"), "missing for this family"))
}

fn build_instance(config: &ExperimentConfig, i: usize, p: &SweepPoint) -> CliResult<Instance> {
    let wrap = |e: orbitlab::Error| match e {
        orbitlab::Error::InvalidInput(m) => config_error(format!("sweep[{i}]"), m),
        other => CliError::Core(other),
    };
    Ok(match config.family {
        FamilyName::Rotation => {
            let n = need(p.n, i, "n")?;
            let step = p.step.unwrap_or(1);
            Instance {
                label: format!("rotation-n{n}-s{step}"),
                seed: None,
                graphing: rotation_graphing(n, step).map_err(wrap)?,
            }
        }
        FamilyName::Odometer => {
            let levels = need(p.levels, i, "levels")?;
            Instance {
                label: format!("odometer-l{levels}"),
                seed: None,
                graphing: odometer_graphing(levels).map_err(wrap)?,
            }
        }
        FamilyName::Expander => {
            let n = need(p.n, i, "n")?;
            let degree = p.degree.unwrap_or(4);
            let seed = p.seed.unwrap_or(config.seed);
            Instance {
                label: format!("expander-n{n}-d{degree}-seed{seed}"),
                seed: Some(seed),
                graphing: expander_graphing(n, degree, seed).map_err(wrap)?,
            }
        }
    })
}

fn folner_options(config: &ExperimentConfig) -> FolnerOptions {
    FolnerOptions {
        effort: config.settings.effort,
        scales: config.settings.scales,
        seed: config.seed,
        ..FolnerOptions::default()
    }
}

enum Report {
    Concentrate(ConcentrationProfile),
    Folner(FolnerCertificate),
    Spectrum(SpectralReport),
    Series(SeriesEntry),
}

fn analyse(config: &ExperimentConfig, inst: &Instance, a: Analysis) -> CliResult<Report> {
    let g = &inst.graphing;
    let s = &config.settings;
    Ok(match a {
        Analysis::Concentrate => {
            let profile = if s.exact && g.atom_count() <= EXACT_CAP {
                profile_exact(g, &s.grid)?
            } else {
                profile_heuristic(g, &s.grid, s.effort)?
            };
            Report::Concentrate(profile)
        }
        Analysis::Folner => Report::Folner(folner_search(g, s.mass_cap, &folner_options(config))?),
        Analysis::Spectrum => Report::Spectrum(spectral_gap(
            g,
            SpectralOptions {
                method: None,
                tol: s.tol,
                max_iter: s.max_iter,
            },
        )?),
        Analysis::Series(strategy) => {
            let opts = SeriesOptions {
                target_mass: s.target_mass,
                epsilon: s.epsilon,
                search: folner_options(config),
            };
            let entry = asymptotic_invariance_series(std::slice::from_ref(g), strategy, &opts)
                .pop()
                .expect("one entry per member");
            Report::Series(entry)
        }
    })
}

fn report_json(r: &Report) -> CliResult<String> {
    match r {
        Report::Concentrate(p) => to_json(p),
        Report::Folner(c) => to_json(c),
        Report::Spectrum(s) => to_json(s),
        Report::Series(e) => to_json(e),
    }
}

/// Runs the sweep and writes every report. Returns the manifest.
pub fn run_experiment(
    config: &ExperimentConfig,
    raw: &serde_json::Value,
    output: &Path,
) -> CliResult<serde_json::Value> {
    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let analyses = analyses(config)?;
    if config.sweep.is_empty() {
        return Err(config_error("sweep", "empty sweep"));
    }
    let instances: Vec<Instance> = config
        .sweep
        .par_iter()
        .enumerate()
        .map(|(i, p)| build_instance(config, i, p))
        .collect::<CliResult<_>>()?;

    fs::create_dir_all(output).map_err(|e| CliError::io(output, e))?;
    let mut files: Vec<String> = Vec::new();

    if !analyses.is_empty() {
        for inst in &instances {
            let rel = format!("instances/{}.json", inst.label);
            write_file(&output.join(&rel), to_json(&inst.graphing)?.as_bytes())?;
            files.push(rel);
        }
    }

    for &a in &analyses {
        let reports: Vec<Report> = instances
            .par_iter()
            .map(|inst| analyse(config, inst, a))
            .collect::<CliResult<_>>()?;
        for (inst, r) in instances.iter().zip(&reports) {
            let rel = format!("reports/{}.{}.json", inst.label, a.name());
            write_file(&output.join(&rel), report_json(r)?.as_bytes())?;
            files.push(rel);
        }
        let (header, rows) = summary_rows(&instances, &reports);
        let rel = format!("summary-{}.csv", a.name());
        write_file(&output.join(&rel), &csv_bytes(&header, rows)?)?;
        files.push(rel);
        if let Analysis::Series(_) = a {
            let entries: Vec<SeriesEntry> = reports
                .into_iter()
                .enumerate()
                .map(|(i, r)| match r {
                    Report::Series(mut e) => {
                        e.index = i;
                        e
                    }
                    _ => unreachable!(),
                })
                .collect();
            let rel = format!("{}.json", a.name());
            write_file(&output.join(&rel), to_json(&entries)?.as_bytes())?;
            files.push(rel);
        }
    }

    let manifest = json!({
        "tool": "orbitlab",
        "version": env!("CARGO_PKG_VERSION"),
        "config": raw,
        "seeds": {
            "run": config.seed,
            "instances": instances.iter().map(|i| i.seed).collect::<Vec<_>>(),
        },
        "instances": instances.iter().map(|i| &i.label).collect::<Vec<_>>(),
        "files": files,
        "started_unix": started_unix,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_file(&output.join("manifest.json"), to_json(&manifest)?.as_bytes())?;
    Ok(manifest)
}

fn summary_rows(instances: &[Instance], reports: &[Report]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let mut rows = Vec::new();
    let header = match reports.first() {
        Some(Report::Concentrate(_)) => vec!["instance", "delta", "delta_prime", "c_lower", "c_upper"],
        Some(Report::Folner(_)) => vec!["instance", "scale", "mass", "ratio"],
        Some(Report::Spectrum(_)) => vec!["instance", "atoms", "gap", "method", "residual"],
        Some(Report::Series(_)) | None => {
            vec!["index", "instance", "atoms", "mass", "max_defect", "max_symmetric_defect", "error"]
        }
    };
    for (i, (inst, r)) in instances.iter().zip(reports).enumerate() {
        let label = inst.label.clone();
        match r {
            Report::Concentrate(p) => {
                for s in &p.samples {
                    rows.push(vec![
                        label.clone(),
                        s.delta.to_string(),
                        s.delta_prime.to_string(),
                        s.c_lower.to_string(),
                        s.c_upper.to_string(),
                    ]);
                }
            }
            Report::Folner(c) => {
                for s in &c.scales {
                    rows.push(vec![
                        label.clone(),
                        s.index.to_string(),
                        s.mass.to_string(),
                        s.ratio.to_string(),
                    ]);
                }
            }
            Report::Spectrum(s) => rows.push(vec![
                label,
                inst.graphing.atom_count().to_string(),
                s.gap.to_string(),
                format!("{:?}", s.method).to_lowercase(),
                s.residual.to_string(),
            ]),
            Report::Series(e) => rows.push(vec![
                i.to_string(),
                label,
                e.atom_count.to_string(),
                e.mass.map(|m| m.to_string()).unwrap_or_default(),
                e.report.as_ref().map(|r| r.max_defect.to_string()).unwrap_or_default(),
                e.report
                    .as_ref()
                    .map(|r| r.max_symmetric_defect.to_string())
                    .unwrap_or_default(),
                e.error.clone().unwrap_or_default(),
            ]),
        }
    }
    (header, rows)
}

//! Heuristics against the brute-force references.

use orbitlab::concentration::{profile_exact, profile_heuristic, set_distance};
use orbitlab::folner::{
    boundary_ratio, folner_search, spectral_gap, FolnerOptions, FolnerSearcher, SpectralMethod,
    SpectralOptions,
};
use orbitlab::generators::{expander_graphing, random_graphing, rotation_graphing, DEFAULT_EXPANDER_SEED};
use orbitlab::oracle::{brute_concentration, brute_dense_spectrum, brute_min_boundary_ratio};
use orbitlab::space::MASS_TOL;
use orbitlab::{build_graphing, AtomSet, FiniteMeasuredSpace, Graphing, PartialIsomorphism};

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

fn small_instances(count: u64, max_atoms: usize) -> Vec<Graphing> {
    (0..count)
        .map(|s| {
            let n = 4 + (s as usize * 7) % (max_atoms - 3);
            random_graphing(n, 1 + s as usize % 3, 0.5 + 0.1 * (s % 5) as f64, 1000 + s).unwrap()
        })
        .collect()
}

#[test]
fn search_matches_enumeration_when_exhaustive() {
    let opts = FolnerOptions {
        effort: 1 << 14,
        scales: 4,
        ..FolnerOptions::default()
    };
    for g in small_instances(25, 14) {
        let searcher = FolnerSearcher::new(&g, &opts);
        for (lo, hi) in [(0.5, 1.0), (0.25, 0.5), (0.125, 0.25), (0.3, 0.4)] {
            let got = searcher.best_in_window(lo, hi);
            let want = brute_min_boundary_ratio(&g, lo, hi).unwrap();
            assert_eq!(got, want, "window [{lo}, {hi}] on {} atoms", g.atom_count());
        }
    }
}

#[test]
fn search_never_loses_to_its_sweep_cut() {
    for g in small_instances(20, 40) {
        let f = orbitlab::folner::fiedler_vector(&g, 300);
        let mut order: Vec<usize> = (0..g.atom_count()).collect();
        order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
        let cert = folner_search(&g, 0.5, &FolnerOptions::default()).unwrap();
        for s in &cert.scales {
            let [lo, hi] = s.window;
            let mut prefix = Vec::new();
            for &x in &order {
                prefix.push(x);
                let set = AtomSet::from(prefix.clone());
                let m = g.mass(&set);
                if m > hi + MASS_TOL {
                    break;
                }
                if m >= lo - MASS_TOL {
                    assert!(s.ratio <= boundary_ratio(&g, &set));
                }
            }
        }
    }
}

#[test]
fn search_respects_the_cheeger_bound() {
    // μ(∂A) ≥ 2·Q(A, Aᶜ) ≥ 2γ·μ(A)(1 − μ(A)) for the lazy walk
    let mut family = small_instances(20, 40);
    family.push(expander_graphing(1024, 4, DEFAULT_EXPANDER_SEED).unwrap());
    for g in family.iter().filter(|g| g.is_connected()) {
        let gap = spectral_gap(g, SpectralOptions::default()).unwrap().gap;
        let cert = folner_search(g, 0.5, &FolnerOptions::default()).unwrap();
        for s in &cert.scales {
            assert!(s.ratio >= 2.0 * gap * (1.0 - s.mass) - 1e-9);
        }
    }
}

#[test]
fn expander_ratios_stay_above_floor() {
    let g = expander_graphing(1024, 4, DEFAULT_EXPANDER_SEED).unwrap();
    let cert = folner_search(&g, 0.5, &FolnerOptions::default()).unwrap();
    assert_eq!(cert.scales.len(), 4);
    assert!(cert.scales.iter().all(|s| s.ratio >= 0.05));
    assert!(!cert.vanishing);
}

#[test]
fn exact_profile_matches_enumeration() {
    let grid: Vec<(f64, f64)> = [0.2, 0.3, 0.5]
        .iter()
        .flat_map(|&d| [0.2, 0.3, 0.5].map(|e| (d, e)))
        .collect();
    for g in small_instances(15, 13) {
        let p = profile_exact(&g, &grid).unwrap();
        for s in &p.samples {
            let (c, (a, b)) = brute_concentration(&g, s.delta, s.delta_prime).unwrap();
            assert_eq!(s.c_lower, c);
            assert_eq!(set_distance(&g, &a, &b).unwrap(), c);
        }
    }
}

#[test]
fn heuristic_profile_brackets_exact() {
    let grid = [(0.2, 0.2), (0.3, 0.5), (0.5, 0.5), (0.25, 0.25)];
    for g in small_instances(15, 16) {
        let exact = profile_exact(&g, &grid).unwrap();
        let heur = profile_heuristic(&g, &grid, 4).unwrap();
        assert!(heur.is_consistent());
        for (e, h) in exact.samples.iter().zip(&heur.samples) {
            assert!(h.c_lower <= e.c_lower, "{h:?} vs {e:?}");
            assert!(e.c_upper <= h.c_upper, "{h:?} vs {e:?}");
        }
    }
}

#[test]
fn spectral_gap_matches_dense_oracle() {
    let mut family = small_instances(10, 30);
    family.push(complete(9));
    family.push(rotation_graphing(17, 1).unwrap());
    family.push(expander_graphing(128, 4, 3).unwrap());
    for g in &family {
        let eig = brute_dense_spectrum(g).unwrap();
        let rep = spectral_gap(g, SpectralOptions::default()).unwrap();
        if g.is_connected() {
            assert!((rep.gap - (1.0 - eig[1])).abs() < 1e-9);
        } else {
            assert_eq!(rep.gap, 0.0);
        }
        for (a, b) in rep.eigenvalue_estimates.iter().zip(&eig) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn iterative_gap_matches_dense_oracle() {
    let g = expander_graphing(256, 4, DEFAULT_EXPANDER_SEED).unwrap();
    let eig = brute_dense_spectrum(&g).unwrap();
    let opts = SpectralOptions {
        method: Some(SpectralMethod::Iterative),
        ..SpectralOptions::default()
    };
    let rep = spectral_gap(&g, opts).unwrap();
    assert!((rep.gap - (1.0 - eig[1])).abs() < 1e-8);
    assert!(rep.residual <= opts.tol);
}

#[test]
fn closed_form_spectra() {
    for n in [3, 5, 8, 12] {
        let gap = 1.0 - brute_dense_spectrum(&complete(n)).unwrap()[1];
        assert!((gap - 0.5 * n as f64 / (n - 1) as f64).abs() < 1e-9);
    }
    for n in [5, 9, 16, 31] {
        let gap = 1.0 - brute_dense_spectrum(&rotation_graphing(n, 1).unwrap()).unwrap()[1];
        let want = (1.0 - (2.0 * std::f64::consts::PI / n as f64).cos()) / 2.0;
        assert!((gap - want).abs() < 1e-9);
    }
}

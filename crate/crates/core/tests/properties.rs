use std::path::Path;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sperner_core::binom::binomial_u64;
use sperner_core::geometry::{
    classify_coords, eps_neighborhood_volume_exact, mc_count, mc_minkowski_content, sample_simplex,
    SimplexPoint, VoronoiSpec,
};
use sperner_core::labeling::{
    compute_stats, find_rainbow_cells, first_choice, injection_witness, max_coordinate,
    random_admissible, top_coordinate, Labeling,
};
use sperner_core::lattice::SimplexLattice;
use sperner_core::search::{
    exhaustive_search, random_restart_min_max_colors, Objective, SearchSpec,
};
use statrs::distribution::{Beta, ContinuousCDF};

fn fixture(name: &str) -> Labeling {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    Labeling::read_from(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap()
}

fn interior_point(k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![0.0; k];
    sample_simplex(&mut rng, &mut z);
    z
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn strategies_are_admissible(k in 2usize..=6, q in 1u32..=40) {
        prop_assert!(first_choice(k, q).unwrap().is_admissible());
        prop_assert!(max_coordinate(k, q).unwrap().is_admissible());
        if k >= 4 && q as usize >= k * k {
            prop_assert!(top_coordinate(k, q).unwrap().is_admissible());
        }
    }

    #[test]
    fn rank_unrank_round_trip(k in 2usize..=7, q in 0u32..=15, pick in any::<prop::sample::Index>()) {
        let lattice = SimplexLattice::new(k, q).unwrap();
        let r = pick.index(lattice.len());
        let p = lattice.unrank(r);
        prop_assert_eq!(p.q(), q);
        prop_assert_eq!(lattice.rank(p.coords()), r);
    }

    #[test]
    fn labeling_file_round_trip(k in 2usize..=5, q in 1u32..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_admissible(k, q, &mut rng).unwrap();
        let back = Labeling::read_from(l.to_file_string().as_bytes()).unwrap();
        prop_assert_eq!(back, l);
    }

    #[test]
    fn classify_ignores_constant_shift(seed in any::<u64>(), k in 2usize..=8, c in -5.0f64..5.0) {
        let z = interior_point(k, seed);
        let x = interior_point(k, seed ^ 0x9e37_79b9);
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let z_shifted: Vec<f64> = z.iter().map(|v| v + 2.0 * c).collect();
        let a = classify_coords(&x, &z);
        let b = classify_coords(&shifted, &z_shifted);
        prop_assert_eq!(a.part, b.part);
        prop_assert!((a.gap - b.gap).abs() < 1e-9);
        // part i forces x_i >= z_i > 0
        prop_assert!(x[a.part - 1] > 0.0);
    }

    #[test]
    fn pruned_search_matches_unpruned(k in 3usize..=4, q in 1u32..=3, max_colors in any::<bool>()) {
        let objective = if max_colors { Objective::MinMaxColors } else { Objective::MinNonmono };
        let mut spec = SearchSpec::new(k, q, objective);
        spec.use_known_bound = false;
        let pruned = exhaustive_search(&spec).unwrap();
        spec.prune = false;
        let full = exhaustive_search(&spec).unwrap();
        prop_assert_eq!(pruned.optimum, full.optimum);
        prop_assert!(pruned.nodes_visited <= full.nodes_visited);
    }

    #[test]
    fn local_search_never_worse_than_start(k in 3usize..=5, q in 2u32..=8, seed in any::<u64>()) {
        let start = random_restart_min_max_colors(k, q, seed, 0).unwrap();
        let r = random_restart_min_max_colors(k, q, seed, 2000).unwrap();
        prop_assert!(r.optimum <= start.optimum);
        prop_assert!(r.optimum >= r.lower_bound_used);
        prop_assert_eq!(compute_stats(&r.witness).max_colors_per_cell, r.optimum);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn random_labelings_meet_bound_with_injection(k in 2usize..=5, q in 2u32..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_admissible(k, q, &mut rng).unwrap();
        let stats = compute_stats(&l);
        let bound = binomial_u64(q as u64 + k as u64 - 3, k as u64 - 2).unwrap() as usize;
        prop_assert!(stats.nonmonochromatic_count >= bound);
        let w = injection_witness(&l).unwrap();
        prop_assert_eq!(w.monochromatic_total, stats.monochromatic_count);
        for (i, imgs) in w.images.iter().enumerate() {
            prop_assert_eq!(imgs.len(), stats.per_color_mono[i]);
        }
    }

    #[test]
    fn every_labeling_has_a_rainbow_triangle(q in 1u32..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_admissible(3, q, &mut rng).unwrap();
        let found = find_rainbow_cells(&l).unwrap();
        // the number of rainbow triangles is odd
        prop_assert_eq!(found.len() % 2, 1);
    }
}

#[test]
fn labelings_need_a_positive_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(random_admissible(3, 0, &mut rng).is_err());
    assert!(first_choice(3, 0).is_err());
}

#[test]
fn mixed_fixture_injects_into_smaller_lattice() {
    let l = fixture("mixed_mono_k3_q5.labeling");
    let stats = compute_stats(&l);
    assert_eq!(stats.monochromatic_count, 10);
    assert_eq!(stats.per_color_mono, vec![2, 4, 4]);
    let w = injection_witness(&l).unwrap();
    let mut images: Vec<_> = w.images.iter().flatten().collect();
    images.sort();
    images.dedup();
    assert_eq!(images.len(), 10);
    assert_eq!(w.target_size, 10);
}

#[test]
fn single_rainbow_fixture_is_admissible() {
    let l = fixture("single_rainbow_k3_q5.labeling");
    assert!(l.is_admissible());
    assert_eq!(find_rainbow_cells(&l).unwrap().len(), 1);
}

#[test]
fn sampler_marginals_are_beta() {
    let n = 400_000;
    for k in [2usize, 3, 5, 8] {
        let beta = Beta::new(1.0, k as f64 - 1.0).unwrap();
        let mean_se = (beta_variance(k) / n as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let mut x = vec![0.0; k];
        let mut sums = vec![0.0; k];
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            sample_simplex(&mut rng, &mut x);
            for (s, v) in sums.iter_mut().zip(&x) {
                *s += v;
            }
            samples.push(x[k - 1]);
        }
        for s in sums {
            assert!(
                (s / n as f64 - 1.0 / k as f64).abs() <= 3.0 * mean_se,
                "k={k} mean"
            );
        }
        for d in 1..10 {
            let p = d as f64 / 10.0;
            let t = beta.inverse_cdf(p);
            let frac = samples.iter().filter(|&&v| v <= t).count() as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((frac - p).abs() <= 3.0 * se, "k={k} decile {d}: {frac}");
        }
    }
}

fn beta_variance(k: usize) -> f64 {
    let b = k as f64 - 1.0;
    b / ((1.0 + b).powi(2) * (2.0 + b))
}

#[test]
fn content_does_not_depend_on_base_point() {
    for k in 3..=5 {
        for j in 0..20u64 {
            let spec =
                VoronoiSpec::new(SimplexPoint::new(interior_point(k, 100 + j)).unwrap()).unwrap();
            let r = mc_minkowski_content(&spec, 1e-3, 200_000, j).unwrap();
            let s = r.sigmas_off.unwrap();
            assert!(s.abs() <= 3.0, "k={k} z#{j}: {s:.2} sigma");
        }
    }
}

#[test]
fn neighborhood_volume_matches_closed_form() {
    for k in 3..=5 {
        for eps in [1e-2, 1e-3] {
            let spec = VoronoiSpec::barycenter(k);
            let r = mc_minkowski_content(&spec, eps, 400_000, 5).unwrap();
            let exact = eps_neighborhood_volume_exact(k, eps).unwrap();
            let d = (r.neighborhood_volume - exact) / r.neighborhood_std_error();
            assert!(d.abs() <= 3.0, "k={k} eps={eps}: {d:.2} sigma");
        }
    }
}

#[test]
fn mc_count_is_additive_over_disjoint_predicates() {
    let z = interior_point(4, 9);
    let per_part: usize = (1..=4)
        .map(|i| mc_count(4, 100_000, 3, |x| classify_coords(x, &z).part == i))
        .sum();
    assert_eq!(per_part, 100_000);
}

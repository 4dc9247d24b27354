//! Acceptance suite. Runs every criterion at its stated tolerance and time
//! budget and prints one PASS/FAIL line each; exits non-zero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sperner_core::geometry::{
    eps_neighborhood_volume_exact, mc_minkowski_content, sample_simplex,
    separating_set_content_exact, shrink_partition, simplex_height, simplex_volume, square_demo,
    SimplexPoint, VoronoiSpec,
};
use sperner_core::labeling::{
    compute_stats, compute_stats_with_cells, find_rainbow_cells, first_choice, injection_witness,
    max_coordinate, random_admissible, top_coordinate, Labeling, TriangleKind,
};
use sperner_core::lattice::{enumerate_cells, Hypergraph, SimplexLattice};
use sperner_core::search::{exhaustive_min_nonmono, Objective, SearchResult, SearchSpec};

const TIGHT_INSTANCES: [(usize, u32); 5] = [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3)];

/// Binomial coefficients from an additive Pascal triangle.
struct Pascal(Vec<Vec<u128>>);

impl Pascal {
    fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<u128>> = vec![vec![1]];
        for i in 1..=n {
            let prev = &rows[i - 1];
            let row = (0..=i)
                .map(|j| {
                    let a = if j > 0 { prev[j - 1] } else { 0 };
                    let b = if j < i { prev[j] } else { 0 };
                    a + b
                })
                .collect();
            rows.push(row);
        }
        Pascal(rows)
    }

    fn c(&self, n: i64, r: i64) -> u128 {
        if n < 0 || r < 0 || r > n {
            0
        } else {
            self.0[n as usize][r as usize]
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn counting_identities() -> Result<String, String> {
    let pascal = Pascal::new(64);
    let count = |k: usize, q: i64| -> u128 {
        if q < 0 {
            0
        } else {
            SimplexLattice::new(k, q as u32).unwrap().len() as u128
        }
    };
    let mut checked = 0;
    for k in 2..=6usize {
        for q in 1..=12i64 {
            let ki = k as i64;
            let v = count(k, q);
            ensure(v == pascal.c(q + ki - 1, ki - 1), || {
                format!("|V| at k={k} q={q}")
            })?;
            let e = enumerate_cells(k, q as u32).unwrap().len() as u128;
            ensure(e == count(k, q - 1), || format!("|E| at k={k} q={q}"))?;
            ensure(
                count(k, q - 1) - count(k, q - 2) == pascal.c(q + ki - 3, ki - 2),
                || format!("difference identity at k={k} q={q}"),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (k,q) pairs"))
}

fn bound(pascal: &Pascal, k: usize, q: u32) -> usize {
    pascal.c(q as i64 + k as i64 - 3, k as i64 - 2) as usize
}

fn tightness() -> Result<String, String> {
    let pascal = Pascal::new(64);
    let mut proofs = Vec::new();
    for (k, q) in TIGHT_INSTANCES {
        let mut spec = SearchSpec::new(k, q, Objective::MinNonmono);
        spec.use_known_bound = false;
        let r = exhaustive_min_nonmono(&spec).map_err(|e| e.to_string())?;
        ensure(r.proven_optimal && !r.budget_exhausted, || {
            format!("({k},{q}) not proven")
        })?;
        ensure(r.optimum == bound(&pascal, k, q), || {
            format!(
                "({k},{q}) optimum {} vs bound {}",
                r.optimum,
                bound(&pascal, k, q)
            )
        })?;
        proofs.push(format!(
            "({k},{q})={} in {} nodes",
            r.optimum, r.nodes_visited
        ));
    }
    for k in 2..=6 {
        for q in 1..=20 {
            let l = first_choice(k, q).unwrap();
            let stats = compute_stats_with_cells(&l);
            ensure(stats.nonmonochromatic_count == bound(&pascal, k, q), || {
                format!("first-choice nonmono at k={k} q={q}")
            })?;
            let per_cell = stats.cell_color_counts.unwrap();
            let hg = Hypergraph::new(k, q).unwrap();
            let mut bad = None;
            hg.bases().visit(|c, b| {
                if (per_cell[c] > 1) != (b[0] == 0) && bad.is_none() {
                    bad = Some(b.to_vec());
                }
            });
            ensure(bad.is_none(), || {
                format!("first-choice k={k} q={q}: cell {bad:?} breaks the b_1 = 0 pattern")
            })?;
        }
    }
    Ok(format!("{}; first-choice k<=6 q<=20", proofs.join(", ")))
}

fn universal_bound() -> Result<String, String> {
    let pascal = Pascal::new(64);
    let mut total = 0;
    for (k, q) in [(3usize, 5u32), (4, 4), (5, 3)] {
        let target = SimplexLattice::new(k, q - 2).unwrap().len();
        for i in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let l = random_admissible(k, q, &mut rng).unwrap();
            let stats = compute_stats(&l);
            ensure(stats.nonmonochromatic_count >= bound(&pascal, k, q), || {
                format!("({k},{q}) seed {i} below bound")
            })?;
            let w = injection_witness(&l).map_err(|e| format!("({k},{q}) seed {i}: {e}"))?;
            let mut images: Vec<&[u32]> = w.images.iter().flatten().map(|p| p.coords()).collect();
            ensure(
                images.iter().all(|p| p.iter().sum::<u32>() == q - 2),
                || "image outside V(k,q-2)".into(),
            )?;
            let n = images.len();
            images.sort();
            images.dedup();
            ensure(
                images.len() == n && n == stats.monochromatic_count && n <= target,
                || format!("({k},{q}) seed {i}: injection certificate"),
            )?;
            total += 1;
        }
    }
    Ok(format!("{total} labelings"))
}

fn top_coordinate_colors() -> Result<String, String> {
    let mut seen = Vec::new();
    let instances = (4..=7usize)
        .map(|k| (k, (k * k) as u32))
        .chain((17..=24).map(|q| (4, q)));
    for (k, q) in instances {
        let l = top_coordinate(k, q).map_err(|e| e.to_string())?;
        let s = compute_stats(&l);
        ensure(s.admissible && s.max_colors_per_cell <= 4, || {
            format!("top-coordinate ({k},{q}): {} colors", s.max_colors_per_cell)
        })?;
        seen.push(format!("({k},{q}):{}", s.max_colors_per_cell));
    }
    let m = compute_stats(&max_coordinate(5, 25).unwrap()).max_colors_per_cell;
    ensure(m == 5, || format!("max-coordinate (5,25) gave {m}"))?;
    Ok(format!("{}; max-coordinate(5,25):5", seen.join(" ")))
}

fn fixture(name: &str) -> Labeling {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    let file = std::fs::File::open(&path).unwrap();
    Labeling::read_from(std::io::BufReader::new(file)).unwrap()
}

fn rainbow_triangles() -> Result<String, String> {
    for i in 0..10_000u64 {
        let q = 2 + (i % 5) as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let l = random_admissible(3, q, &mut rng).unwrap();
        let found = find_rainbow_cells(&l).map_err(|e| e.to_string())?;
        ensure(!found.is_empty(), || {
            format!("seed {i} q={q}: no rainbow triangle")
        })?;
    }
    let found = find_rainbow_cells(&fixture("single_rainbow_k3_q5.labeling")).unwrap();
    ensure(
        found.len() == 1 && found[0].kind == TriangleKind::Down,
        || format!("fixture gave {found:?}"),
    )?;
    Ok(format!(
        "10000 labelings; fixture: down triangle at base {}",
        found[0].base
    ))
}

fn closed_forms() -> Result<String, String> {
    for k in 2..=10 {
        let lhs = simplex_volume(k + 1);
        let rhs = simplex_height(k + 1) * simplex_volume(k) / k as f64;
        ensure(rel_err(lhs, rhs) < 1e-12, || {
            format!("volume recursion at k={k}")
        })?;
    }
    for k in 3..=10 {
        let fact: f64 = (1..=k - 2).map(|i| i as f64).product();
        let rhs = simplex_height(k) * ((k as f64 - 1.0) / 2.0).sqrt() / fact;
        ensure(
            rel_err(separating_set_content_exact(k), rhs) < 1e-12,
            || format!("pyramid identity at k={k}"),
        )?;
    }
    ensure(
        rel_err(simplex_volume(3), 3f64.sqrt() / 2.0) < 1e-12,
        || "vol(3)".into(),
    )?;
    ensure(
        rel_err(separating_set_content_exact(3), 1.5f64.sqrt()) < 1e-12,
        || "content(3)".into(),
    )?;
    ensure(
        rel_err(separating_set_content_exact(2), 1.0) < 1e-12,
        || "content(2)".into(),
    )?;
    Ok("identities k<=10, spot values".into())
}

fn content_by_monte_carlo() -> Result<String, String> {
    let (eps, samples) = (1e-3, 1_000_000);
    let mut worst: f64 = 0.0;
    for k in 3..=5 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        let mut specs = vec![VoronoiSpec::barycenter(k)];
        for _ in 0..5 {
            let mut z = vec![0.0; k];
            sample_simplex(&mut rng, &mut z);
            specs.push(VoronoiSpec::new(SimplexPoint::new(z).unwrap()).unwrap());
        }
        for (j, spec) in specs.iter().enumerate() {
            let r = mc_minkowski_content(spec, eps, samples, 7 + j as u64)
                .map_err(|e| e.to_string())?;
            let s = r.sigmas_off.ok_or("zero standard error")?;
            worst = worst.max(s.abs());
            ensure(s.abs() <= 3.0, || format!("k={k} z#{j}: {s:.2} sigma"))?;
            if j == 0 {
                let exact = eps_neighborhood_volume_exact(k, eps).unwrap();
                let d = (r.neighborhood_volume - exact) / r.neighborhood_std_error();
                worst = worst.max(d.abs());
                ensure(d.abs() <= 3.0, || {
                    format!("k={k} neighborhood volume: {d:.2} sigma")
                })?;
            }
        }
    }
    Ok(format!("18 estimates, worst {worst:.2} sigma"))
}

fn shrinking() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for k in [3, 4] {
        for eps in [1e-2, 1e-3] {
            let spec = VoronoiSpec::barycenter(k);
            let r = shrink_partition(&spec, eps)
                .and_then(|s| s.verify(1_000_000, 11))
                .map_err(|e| e.to_string())?;
            ensure(
                r.overlap_violations == 0 && r.containment_violations == 0,
                || format!("k={k} eps={eps}: {r:?}"),
            )?;
            let sigma = r.shrunk_std_error.hypot(r.neighborhood_std_error);
            let d = (r.shrunk_volume + r.neighborhood_volume - r.simplex_volume) / sigma;
            worst = worst.max(d.abs());
            ensure(d.abs() <= 3.0, || {
                format!("k={k} eps={eps}: volume sum {d:.2} sigma")
            })?;
        }
    }
    Ok(format!("4 configurations, worst {worst:.2} sigma"))
}

fn square() -> Result<String, String> {
    let demo = square_demo(&[0.2, 0.1, 0.05, 0.01]).map_err(|e| e.to_string())?;
    ensure((demo.voronoi_length - 2.0).abs() < 1e-12, || {
        "voronoi length".into()
    })?;
    ensure((demo.diagonal_infimum - 2f64.sqrt()).abs() < 1e-12, || {
        "infimum".into()
    })?;
    ensure(demo.family.windows(2).all(|w| w[1].1 < w[0].1), || {
        format!("family not decreasing: {:?}", demo.family)
    })?;
    Ok(format!("family {:?}", demo.family))
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn determinism() -> Result<String, String> {
    let measure = |threads| {
        in_pool(threads, || {
            let r = mc_minkowski_content(&VoronoiSpec::barycenter(4), 1e-3, 200_000, 7).unwrap();
            serde_json::to_string(&r).unwrap()
        })
    };
    let a = measure(1);
    ensure(a == measure(1) && a == measure(4), || {
        "measure JSON differs".into()
    })?;
    let stats = |threads| {
        in_pool(threads, || {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let l = random_admissible(4, 6, &mut rng).unwrap();
            serde_json::to_string(&compute_stats(&l).report(4, 6).unwrap()).unwrap()
        })
    };
    ensure(stats(1) == stats(4), || "stats JSON differs".into())?;
    for (k, q) in TIGHT_INSTANCES {
        let run = |threads| -> SearchResult {
            in_pool(threads, || {
                let mut spec = SearchSpec::new(k, q, Objective::MinNonmono);
                spec.use_known_bound = false;
                exhaustive_min_nonmono(&spec).unwrap()
            })
        };
        let (one, many) = (run(1), run(4));
        ensure(one == many, || {
            format!("search ({k},{q}) depends on worker count")
        })?;
    }
    Ok("measure, stats and search identical across 1 and 4 workers".into())
}

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check, Duration); 10] = [
        (
            "1 counting identities",
            counting_identities,
            Duration::from_secs(1),
        ),
        (
            "2 tightness of the non-monochromatic bound",
            tightness,
            Duration::from_secs(60),
        ),
        (
            "3 bound and injection on random labelings",
            universal_bound,
            Duration::from_secs(30),
        ),
        (
            "4 top-coordinate uses at most 4 colors",
            top_coordinate_colors,
            Duration::from_secs(120),
        ),
        (
            "5 rainbow triangles",
            rainbow_triangles,
            Duration::from_secs(30),
        ),
        (
            "6 geometry closed forms",
            closed_forms,
            Duration::from_secs(1),
        ),
        (
            "7 separating-set content by Monte Carlo",
            content_by_monte_carlo,
            Duration::from_secs(300),
        ),
        (
            "8 shrinking construction",
            shrinking,
            Duration::from_secs(60),
        ),
        ("9 square demo", square, Duration::from_secs(1)),
        ("10 determinism", determinism, Duration::from_secs(300)),
    ];
    let mut failures = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; exceeded {budget:?} budget")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL  {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}

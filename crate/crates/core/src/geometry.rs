//! Voronoi-type partitions of the regular simplex `Delta(k) = conv(e_1..e_k)`.
//!
//! For an interior base point `z`, part `i` collects the points where
//! `x_i - z_i` is maximal. The separating set of such a partition has
//! `(k-2)`-dimensional Minkowski content `sqrt(k/2) / (k-2)!` whatever `z` is,
//! and a point lies within distance `eps` of the separating set exactly when
//! the largest and second-largest entries of `x - z` are within `eps * sqrt 2`
//! of each other. Monte Carlo estimates below use that gap test directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the unit-sum and non-negativity checks on simplex points.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Samples per Monte Carlo block. Each block draws from its own ChaCha
/// stream, so estimates do not depend on the number of worker threads.
pub const MC_BLOCK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    /// Accepts `x` with `x >= -tol` and `|sum x - 1| <= tol`, then clamps and
    /// renormalizes.
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::invalid("simplex points need k >= 2"));
        }
        if x.iter().any(|v| !v.is_finite() || *v < -SIMPLEX_TOL) {
            return Err(Error::invalid(format!(
                "coordinates must be non-negative: {x:?}"
            )));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::invalid(format!(
                "coordinates must sum to 1, got {sum}"
            )));
        }
        let clamped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        let s: f64 = clamped.iter().sum();
        Ok(SimplexPoint(clamped.into_iter().map(|v| v / s).collect()))
    }

    pub fn barycenter(k: usize) -> Self {
        SimplexPoint(vec![1.0 / k as f64; k])
    }

    /// The vertex `e_i`, 1-based.
    pub fn vertex(k: usize, i: usize) -> Self {
        let mut x = vec![0.0; k];
        x[i - 1] = 1.0;
        SimplexPoint(x)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// The base point of a Voronoi-type partition; strictly interior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiSpec {
    z: SimplexPoint,
}

impl VoronoiSpec {
    pub fn new(z: SimplexPoint) -> Result<Self> {
        if let Some(i) = z.coords().iter().position(|&v| v <= 0.0) {
            return Err(Error::Precondition(format!(
                "base point must be interior, but z_{} = {}",
                i + 1,
                z.coords()[i]
            )));
        }
        Ok(VoronoiSpec { z })
    }

    /// The plain Voronoi partition by nearest vertex.
    pub fn barycenter(k: usize) -> Self {
        VoronoiSpec {
            z: SimplexPoint::barycenter(k),
        }
    }

    pub fn k(&self) -> usize {
        self.z.k()
    }

    pub fn z(&self) -> &SimplexPoint {
        &self.z
    }

    pub fn classify(&self, x: &SimplexPoint) -> PartitionAssignment {
        classify_coords(x.coords(), self.z.coords())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionAssignment {
    /// 1-based part index.
    pub part: usize,
    /// Largest minus second-largest entry of `x - z`; zero on the separating set.
    pub gap: f64,
}

pub fn classify(x: &SimplexPoint, spec: &VoronoiSpec) -> PartitionAssignment {
    spec.classify(x)
}

/// `argmax_i (x_i - z_i)` with the smallest index on exact ties, plus the gap.
pub fn classify_coords(x: &[f64], z: &[f64]) -> PartitionAssignment {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for (i, (xi, zi)) in x.iter().zip(z).enumerate() {
        let v = xi - zi;
        if v > best_v {
            second = best_v;
            best_v = v;
            best = i;
        } else if v > second {
            second = v;
        }
    }
    PartitionAssignment {
        part: best + 1,
        gap: best_v - second,
    }
}

/// Proof that a Voronoi-type partition is Sperner-admissible: every point of
/// part `i` has `x_i >= z_i`, and all `z_i` are positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityCertificate {
    /// Lower bound on `x_i` over part `i`, at index `i - 1`.
    pub part_lower_bounds: Vec<f64>,
    /// `min_i z_i`.
    pub margin: f64,
}

/// In part `i`, `x_i - z_i` is the largest entry of `x - z`, whose entries
/// sum to zero, so it is at least their mean `0`.
pub fn is_sperner_admissible_partition(z: &SimplexPoint) -> Result<AdmissibilityCertificate> {
    let spec = VoronoiSpec::new(z.clone())?;
    let bounds = spec.z.coords().to_vec();
    let margin = bounds.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(AdmissibilityCertificate {
        part_lower_bounds: bounds,
        margin,
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `(k-1)`-volume of `Delta(k)`: `sqrt(k) / (k-1)!`.
pub fn simplex_volume(k: usize) -> f64 {
    assert!(k >= 2, "simplex_volume needs k >= 2");
    (k as f64).sqrt() / factorial(k - 1)
}

/// Distance from a vertex of `Delta(k)` to the opposite facet.
pub fn simplex_height(k: usize) -> f64 {
    assert!(k >= 2, "simplex_height needs k >= 2");
    (k as f64 / (k as f64 - 1.0)).sqrt()
}

/// Minkowski content of the separating set of any Voronoi-type partition of
/// `Delta(k)`: `sqrt(k/2) / (k-2)!`, which is `1` (a point count) at `k = 2`.
pub fn separating_set_content_exact(k: usize) -> f64 {
    assert!(k >= 2, "separating_set_content_exact needs k >= 2");
    (k as f64 / 2.0).sqrt() / factorial(k - 2)
}

/// Largest `eps` accepted by the neighborhood routines for dimension `k`:
/// `eps * sqrt 2 < 1/k`.
pub fn max_safe_eps(k: usize) -> f64 {
    1.0 / (k as f64 * std::f64::consts::SQRT_2)
}

fn check_eps(k: usize, eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps < max_safe_eps(k)) {
        return Err(Error::Precondition(format!(
            "eps = {eps} outside [0, {}) for k = {k}",
            max_safe_eps(k)
        )));
    }
    Ok(())
}

/// Volume of the `eps`-neighborhood of the separating set within `Delta(k)`:
/// the complement is `k` translated pieces filling `(1 - eps*sqrt 2) Delta(k)`,
/// so the volume is `(1 - (1 - eps*sqrt 2)^(k-1)) * vol(Delta(k))`.
pub fn eps_neighborhood_volume_exact(k: usize, eps: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    check_eps(k, eps)?;
    let shrink = 1.0 - eps * std::f64::consts::SQRT_2;
    Ok((1.0 - shrink.powi(k as i32 - 1)) * simplex_volume(k))
}

/// Writes a uniform sample of `Delta(k)` into `out` (normalized i.i.d.
/// standard exponentials).
pub fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut sum = 0.0;
    for v in out.iter_mut() {
        let e: f64 = rng.sample(Exp1);
        *v = e;
        sum += e;
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
}

/// The RNG for Monte Carlo block `block` under `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Counts uniform samples of `Delta(k)` satisfying `pred`, in fixed-size
/// blocks with per-block streams. The result depends only on `seed`.
pub fn mc_count<F>(k: usize, samples: usize, seed: u64, pred: F) -> usize
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let blocks = samples.div_ceil(MC_BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut rng = block_rng(seed, b as u64);
            let mut x = vec![0.0; k];
            let mut hits = 0;
            for _ in 0..n {
                sample_simplex(&mut rng, &mut x);
                if pred(&x) {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

/// Binomial estimate of `p` with its standard error.
fn proportion(hits: usize, samples: usize) -> (f64, f64) {
    let n = samples as f64;
    let p = hits as f64 / n;
    (p, (p * (1.0 - p) / n).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub k: usize,
    pub z: Vec<f64>,
    pub eps: f64,
    pub samples: usize,
    pub seed: u64,
    /// Estimated `(k-1)`-volume of the `eps`-neighborhood.
    pub neighborhood_volume: f64,
    /// `neighborhood_volume / (2 eps)`.
    pub content_estimate: f64,
    /// `sqrt(k/2) / (k-2)!`.
    pub exact: f64,
    /// Standard error of `content_estimate`.
    pub std_error: f64,
    /// `(content_estimate - exact) / std_error`; `None` when the standard
    /// error is zero.
    pub sigmas_off: Option<f64>,
}

impl MeasureReport {
    /// Standard error of `neighborhood_volume`.
    pub fn neighborhood_std_error(&self) -> f64 {
        self.std_error * 2.0 * self.eps
    }
}

/// Monte Carlo estimate of the separating-set content of the partition
/// defined by `spec`.
pub fn mc_minkowski_content(
    spec: &VoronoiSpec,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<MeasureReport> {
    let k = spec.k();
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    check_eps(k, eps)?;
    if eps == 0.0 {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let threshold = eps * std::f64::consts::SQRT_2;
    let z = spec.z.coords();
    let hits = mc_count(k, samples, seed, |x| classify_coords(x, z).gap <= threshold);
    let vol = simplex_volume(k);
    let (p, se) = proportion(hits, samples);
    let content = p * vol / (2.0 * eps);
    let std_error = se * vol / (2.0 * eps);
    let exact = separating_set_content_exact(k);
    Ok(MeasureReport {
        k,
        z: z.to_vec(),
        eps,
        samples,
        seed,
        neighborhood_volume: p * vol,
        content_estimate: content,
        exact,
        std_error,
        sigmas_off: (std_error > 0.0).then(|| (content - exact) / std_error),
    })
}

/// The shrunk parts `A'_i` (points of part `i` farther than `eps` from the
/// separating set) and their translates `A''_i = A'_i - eps*sqrt 2 * e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShrunkPartition {
    z: Vec<f64>,
    shift: f64,
}

pub fn shrink_partition(spec: &VoronoiSpec, eps: f64) -> Result<ShrunkPartition> {
    check_eps(spec.k(), eps)?;
    Ok(ShrunkPartition {
        z: spec.z.coords().to_vec(),
        shift: eps * std::f64::consts::SQRT_2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkReport {
    pub k: usize,
    pub eps: f64,
    pub samples: usize,
    /// Points of `(1 - eps*sqrt 2) Delta(k)` found in two or more `A''_i`.
    pub overlap_violations: usize,
    /// Points of `(1 - eps*sqrt 2) Delta(k)` found in no `A''_i`.
    pub uncovered: usize,
    /// Translates `x - eps*sqrt 2 * e_i` of points `x` in `A'_i` that left
    /// `(1 - eps*sqrt 2) Delta(k)`.
    pub containment_violations: usize,
    pub shrunk_volume: f64,
    pub shrunk_std_error: f64,
    pub neighborhood_volume: f64,
    pub neighborhood_std_error: f64,
    pub simplex_volume: f64,
}

impl ShrunkPartition {
    /// The translation length `eps * sqrt 2`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `Some(i)` iff `x` lies in `A'_i`: `x_i - z_i` exceeds every other
    /// `x_l - z_l` by more than the shift.
    pub fn shrunk_part(&self, x: &[f64]) -> Option<usize> {
        if x.iter().any(|&v| v < -SIMPLEX_TOL) {
            return None;
        }
        let a = classify_coords(x, &self.z);
        (a.gap > self.shift).then_some(a.part)
    }

    /// `x - shift * e_i`.
    pub fn translate(&self, x: &[f64], part: usize) -> Vec<f64> {
        let mut y = x.to_vec();
        y[part - 1] -= self.shift;
        y
    }

    /// Whether `y` lies in `A''_i`, by undoing the translation.
    pub fn in_translated(&self, y: &[f64], part: usize) -> bool {
        let mut x = y.to_vec();
        x[part - 1] += self.shift;
        self.shrunk_part(&x) == Some(part)
    }

    /// Sampled checks: the `A''_i` do not overlap and cover the smaller
    /// simplex, translates stay inside it, and `vol(union A'_i)` and
    /// `vol(S_eps)`, estimated from independent streams, add up to the
    /// simplex volume.
    pub fn verify(&self, samples: usize, seed: u64) -> Result<ShrinkReport> {
        if samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        let k = self.z.len();
        let scale = 1.0 - self.shift;
        let blocks = samples.div_ceil(MC_BLOCK);
        let (overlap, uncovered, containment) = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let n = MC_BLOCK.min(samples - b * MC_BLOCK);
                let mut rng = block_rng(seed, b as u64);
                let mut x = vec![0.0; k];
                let (mut overlap, mut uncovered, mut containment) = (0, 0, 0);
                for _ in 0..n {
                    // a point of the smaller simplex
                    sample_simplex(&mut rng, &mut x);
                    let y: Vec<f64> = x.iter().map(|v| v * scale).collect();
                    match (1..=k).filter(|&i| self.in_translated(&y, i)).count() {
                        0 => uncovered += 1,
                        1 => {}
                        _ => overlap += 1,
                    }
                    // a point of the full simplex, translated if shrunk
                    sample_simplex(&mut rng, &mut x);
                    if let Some(i) = self.shrunk_part(&x) {
                        let t = self.translate(&x, i);
                        let sum: f64 = t.iter().sum();
                        if t.iter().any(|&v| v < 0.0) || (sum - scale).abs() > 1e-12 {
                            containment += 1;
                        }
                    }
                }
                (overlap, uncovered, containment)
            })
            .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

        let vol = simplex_volume(k);
        let inside = mc_count(k, samples, seed.wrapping_add(1), |x| {
            self.shrunk_part(x).is_some()
        });
        let near = mc_count(k, samples, seed.wrapping_add(2), |x| {
            classify_coords(x, &self.z).gap <= self.shift
        });
        let (p_in, se_in) = proportion(inside, samples);
        let (p_near, se_near) = proportion(near, samples);
        Ok(ShrinkReport {
            k,
            eps: self.shift / std::f64::consts::SQRT_2,
            samples,
            overlap_violations: overlap,
            uncovered,
            containment_violations: containment,
            shrunk_volume: p_in * vol,
            shrunk_std_error: se_in * vol,
            neighborhood_volume: p_near * vol,
            neighborhood_std_error: se_near * vol,
            simplex_volume: vol,
        })
    }
}

/// A line segment in the plane.
pub type Segment = [[f64; 2]; 2];

fn segment_length(s: &Segment) -> f64 {
    (s[1][0] - s[0][0]).hypot(s[1][1] - s[0][1])
}

/// Separating set of the unit square's nearest-vertex partition: the two
/// axis-parallel segments through the center.
pub fn square_voronoi_segments() -> Vec<Segment> {
    vec![[[0.5, 0.0], [0.5, 1.0]], [[0.0, 0.5], [1.0, 0.5]]]
}

/// Separating set of the corner-cut partition of the unit square with cut
/// parameter `delta` in `[0, 1/2)`.
///
/// Corners `(0,0)` and `(1,1)` keep small right triangles with legs `delta`,
/// cut off by the segments `(delta,0)-(0,delta)` and
/// `(1,1-delta)-(1-delta,1)`. The two remaining parts, owning corners
/// `(1,0)` and `(0,1)`, are split by the diagonal between the cut midpoints
/// `(delta/2, delta/2)` and `(1-delta/2, 1-delta/2)`. Total length
/// `sqrt 2 * (1 + delta)`.
pub fn square_corner_cut_segments(delta: f64) -> Result<Vec<Segment>> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::invalid(format!("delta = {delta} outside [0, 1/2)")));
    }
    let h = delta / 2.0;
    Ok(vec![
        [[delta, 0.0], [0.0, delta]],
        [[1.0, 1.0 - delta], [1.0 - delta, 1.0]],
        [[h, h], [1.0 - h, 1.0 - h]],
    ])
}

pub fn total_length(segments: &[Segment]) -> f64 {
    segments.iter().map(segment_length).sum()
}

/// Part (1..=4, counter-clockwise from the corner at the origin) of the
/// corner-cut partition containing `p`.
pub fn square_corner_cut_part(delta: f64, p: [f64; 2]) -> usize {
    let [x, y] = p;
    if x + y < delta {
        1
    } else if x + y > 2.0 - delta {
        3
    } else if x > y {
        2
    } else {
        4
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareDemo {
    pub voronoi_length: f64,
    pub diagonal_infimum: f64,
    /// `(delta, length)` pairs of the corner-cut family.
    pub family: Vec<(f64, f64)>,
}

/// Separating-set lengths of the two square partitions: the nearest-vertex
/// cross (length 2) and the corner-cut family, whose length decreases to
/// `sqrt 2` as `delta -> 0`.
pub fn square_demo(deltas: &[f64]) -> Result<SquareDemo> {
    let family = deltas
        .iter()
        .map(|&d| {
            if d <= 0.0 {
                return Err(Error::invalid("family members need delta > 0"));
            }
            Ok((d, total_length(&square_corner_cut_segments(d)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SquareDemo {
        voronoi_length: total_length(&square_voronoi_segments()),
        diagonal_infimum: total_length(&square_corner_cut_segments(0.0)?),
        family,
    })
}

fn point_segment_distance(p: [f64; 2], s: &Segment) -> f64 {
    let [a, b] = *s;
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// Monte Carlo Minkowski length of a union of segments in the unit square:
/// area of the `eps`-neighborhood (clipped to the square) over `2 eps`.
/// Returns `(estimate, std_error)`.
pub fn mc_square_length(segments: &[Segment], eps: f64, samples: usize, seed: u64) -> (f64, f64) {
    let blocks = samples.div_ceil(MC_BLOCK);
    let hits: usize = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut rng = block_rng(seed, b as u64);
            (0..n)
                .filter(|_| {
                    let p = [rng.random::<f64>(), rng.random::<f64>()];
                    segments.iter().any(|s| point_segment_distance(p, s) <= eps)
                })
                .count()
        })
        .sum();
    let (p, se) = proportion(hits, samples);
    (p / (2.0 * eps), se / (2.0 * eps))
}

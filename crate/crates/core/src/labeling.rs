//! Labelings `V(k,q) -> [k]` of the simplex-lattice hypergraph.
//!
//! A labeling is stored densely, one color per vertex in canonical rank
//! order. Colors are 1-based throughout, matching the labeling file format.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binom::binomial;
use crate::error::{Error, Result};
use crate::lattice::{Block, Hypergraph, LatticePoint, SimplexLattice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    k: usize,
    q: u32,
    colors: Vec<u32>,
}

/// Splits `data` into the mutable runs covered by `blocks`.
fn split_blocks<'a, T>(mut data: &'a mut [T], blocks: &[Block]) -> Vec<(Block, &'a mut [T])> {
    let mut out = Vec::with_capacity(blocks.len());
    for &b in blocks {
        let (head, tail) = data.split_at_mut(b.len);
        out.push((b, head));
        data = tail;
    }
    out
}

impl Labeling {
    /// Builds a labeling by evaluating `f` on every vertex, in parallel over
    /// first-coordinate blocks. `f` must return a color in `1..=k`.
    pub fn from_fn<F>(k: usize, q: u32, f: F) -> Result<Self>
    where
        F: Fn(&[u32]) -> u32 + Sync,
    {
        if q < 1 {
            return Err(Error::invalid("labelings need q >= 1"));
        }
        let lattice = SimplexLattice::new(k, q)?;
        let mut colors = vec![0u32; lattice.len()];
        let blocks = lattice.blocks();
        split_blocks(&mut colors, &blocks)
            .into_par_iter()
            .for_each(|(block, out)| {
                lattice.visit_block(block, |rank, coords| out[rank - block.start] = f(coords));
            });
        Labeling::from_colors(k, q, colors)
    }

    /// Wraps a color vector aligned with canonical vertex order.
    pub fn from_colors(k: usize, q: u32, colors: Vec<u32>) -> Result<Self> {
        let lattice = SimplexLattice::new(k, q)?;
        if q < 1 {
            return Err(Error::invalid("labelings need q >= 1"));
        }
        if colors.len() != lattice.len() {
            return Err(Error::invalid(format!(
                "expected {} colors for V({k},{q}), got {}",
                lattice.len(),
                colors.len()
            )));
        }
        if let Some(bad) = colors.iter().find(|&&c| c == 0 || c as usize > k) {
            return Err(Error::invalid(format!("color {bad} outside 1..={k}")));
        }
        Ok(Labeling { k, q, colors })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Colors in canonical vertex order.
    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn lattice(&self) -> SimplexLattice {
        SimplexLattice::new(self.k, self.q).expect("validated at construction")
    }

    pub fn color_of(&self, a: &LatticePoint) -> Option<u32> {
        let r = self.lattice().try_rank(a.coords())?;
        Some(self.colors[r])
    }

    /// Replaces the color of the vertex at `rank`.
    pub fn set_color(&mut self, rank: usize, color: u32) {
        assert!(color >= 1 && color as usize <= self.k);
        self.colors[rank] = color;
    }

    /// Every vertex `a` carries a color `i` with `a_i > 0`.
    pub fn is_admissible(&self) -> bool {
        let lattice = self.lattice();
        let colors = &self.colors;
        lattice.blocks().into_par_iter().all(|block| {
            let mut ok = true;
            lattice.visit_block(block, |rank, coords| {
                ok &= coords[colors[rank] as usize - 1] > 0;
            });
            ok
        })
    }

    /// Serializes in the labeling file format: a `#labeling k=K q=Q` header,
    /// then `a1 ... ak -> c` per vertex in canonical order.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "#labeling k={} q={}", self.k, self.q)?;
        let lattice = self.lattice();
        let mut line = String::new();
        let mut result = Ok(());
        lattice.visit(|rank, coords| {
            if result.is_err() {
                return;
            }
            line.clear();
            for (i, c) in coords.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&c.to_string());
            }
            line.push_str(" -> ");
            line.push_str(&self.colors[rank].to_string());
            line.push('\n');
            result = w.write_all(line.as_bytes());
        });
        result
    }

    pub fn to_file_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// Parses the labeling file format. Vertices must appear exactly once
    /// each, in canonical order.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (k, q) = match lines.next() {
            Some((_, line)) => parse_header(&line?)?,
            None => return Err(Error::parse(1, "empty input")),
        };
        let lattice = SimplexLattice::new(k, q)?;
        let mut expected = lattice.iter();
        let mut colors = Vec::with_capacity(lattice.len());
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let (point, color) = line
                .split_once(" -> ")
                .ok_or_else(|| Error::parse(lineno, "expected `a1 ... ak -> c`"))?;
            let coords = point
                .split(' ')
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(lineno, e.to_string()))?;
            let color: u32 = color
                .parse()
                .map_err(|e: std::num::ParseIntError| Error::parse(lineno, e.to_string()))?;
            match expected.next() {
                Some(p) if p.coords() == coords.as_slice() => {}
                Some(p) => {
                    return Err(Error::parse(
                        lineno,
                        format!("expected vertex `{p}`, found `{point}`"),
                    ))
                }
                None => return Err(Error::parse(lineno, "more vertices than V(k,q) holds")),
            }
            if color == 0 || color as usize > k {
                return Err(Error::parse(
                    lineno,
                    format!("color {color} outside 1..={k}"),
                ));
            }
            colors.push(color);
        }
        if colors.len() != lattice.len() {
            return Err(Error::parse(
                colors.len() + 2,
                format!(
                    "expected {} vertices, found {}",
                    lattice.len(),
                    colors.len()
                ),
            ));
        }
        Labeling::from_colors(k, q, colors)
    }
}

fn parse_header(line: &str) -> Result<(usize, u32)> {
    let rest = line
        .strip_prefix("#labeling ")
        .ok_or_else(|| Error::parse(1, "expected `#labeling k=K q=Q` header"))?;
    let mut k = None;
    let mut q = None;
    for tok in rest.split(' ') {
        if let Some(v) = tok.strip_prefix("k=") {
            k = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("q=") {
            q = v.parse().ok();
        } else {
            return Err(Error::parse(1, format!("unexpected header token `{tok}`")));
        }
    }
    match (k, q) {
        (Some(k), Some(q)) => Ok((k, q)),
        _ => Err(Error::parse(1, "header must carry k=K and q=Q")),
    }
}

/// Label by the smallest index in the support.
pub fn first_choice(k: usize, q: u32) -> Result<Labeling> {
    Labeling::from_fn(k, q, |a| {
        a.iter().position(|&c| c > 0).expect("q >= 1") as u32 + 1
    })
}

/// Label by the largest coordinate, smallest index on ties.
pub fn max_coordinate(k: usize, q: u32) -> Result<Labeling> {
    Labeling::from_fn(k, q, max_coordinate_label)
}

fn max_coordinate_label(a: &[u32]) -> u32 {
    let mut best = 0;
    for (i, &c) in a.iter().enumerate() {
        if c > a[best] {
            best = i;
        }
    }
    best as u32 + 1
}

/// The descending order of a point's coordinates and its top prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopDecomposition {
    /// 1-based indices sorted by decreasing value, ties by increasing index.
    pub pi: Vec<usize>,
    /// Longest prefix length with `a[pi[j]] >= k - j + 1` for every `j <= t`.
    pub t: usize,
}

impl TopDecomposition {
    pub fn new(a: &[u32]) -> Self {
        let k = a.len();
        let mut pi: Vec<usize> = (1..=k).collect();
        pi.sort_by_key(|&i| (std::cmp::Reverse(a[i - 1]), i));
        let t = pi
            .iter()
            .enumerate()
            .take_while(|&(j, &i)| a[i - 1] as usize >= k - j)
            .count();
        TopDecomposition { pi, t }
    }

    pub fn top(&self) -> &[usize] {
        &self.pi[..self.t]
    }

    /// The last top coordinate. When the top prefix is empty (only possible
    /// when `max_i a_i < k`) the largest coordinate is used instead.
    pub fn label(&self) -> usize {
        if self.t == 0 {
            self.pi[0]
        } else {
            self.pi[self.t - 1]
        }
    }
}

/// Allocation-free equivalent of `TopDecomposition::new(a).label()`.
fn top_label(a: &[u32]) -> u32 {
    let k = a.len();
    if k > 64 {
        return TopDecomposition::new(a).label() as u32;
    }
    let mut idx = [0u8; 64];
    for (i, slot) in idx[..k].iter_mut().enumerate() {
        *slot = i as u8;
    }
    let idx = &mut idx[..k];
    idx.sort_unstable_by_key(|&i| (std::cmp::Reverse(a[i as usize]), i));
    let t = idx
        .iter()
        .enumerate()
        .take_while(|&(j, &i)| a[i as usize] as usize >= k - j)
        .count();
    u32::from(idx[t.saturating_sub(1)]) + 1
}

/// The top-coordinate labeling, which keeps every cell at 4 or fewer colors
/// for `k >= 4` and `q >= k^2`. Outside that range this returns
/// [`Error::OutOfDomain`]; see [`top_coordinate_unchecked`].
pub fn top_coordinate(k: usize, q: u32) -> Result<Labeling> {
    if k < 4 {
        return Err(Error::OutOfDomain(format!(
            "top-coordinate labeling needs k >= 4, got k={k}"
        )));
    }
    if (q as usize) < k * k {
        return Err(Error::OutOfDomain(format!(
            "top-coordinate labeling needs q >= k^2 = {}, got q={q}",
            k * k
        )));
    }
    top_coordinate_unchecked(k, q)
}

/// The top-coordinate rule applied without the `k >= 4, q >= k^2` domain
/// check. Still admissible, but with no bound on colors per cell.
pub fn top_coordinate_unchecked(k: usize, q: u32) -> Result<Labeling> {
    Labeling::from_fn(k, q, top_label)
}

/// Independent uniform choice from `L(a)` at every vertex.
pub fn random_admissible<R: Rng + ?Sized>(k: usize, q: u32, rng: &mut R) -> Result<Labeling> {
    if q < 1 {
        return Err(Error::invalid("labelings need q >= 1"));
    }
    let lattice = SimplexLattice::new(k, q)?;
    let mut colors = Vec::with_capacity(lattice.len());
    let mut support = Vec::with_capacity(k);
    lattice.visit(|_, coords| {
        support.clear();
        support.extend((0..k).filter(|&i| coords[i] > 0));
        colors.push(support[rng.random_range(0..support.len())] as u32 + 1);
    });
    Labeling::from_colors(k, q, colors)
}

/// `C(q+k-3, k-2)`: no admissible labeling of `H(k,q)` has fewer
/// non-monochromatic cells.
pub fn nonmono_lower_bound(k: usize, q: u32) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if q < 1 {
        return Err(Error::invalid("the bound needs q >= 1"));
    }
    Ok(binomial(u64::from(q) + k as u64 - 3, k as u64 - 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingStats {
    pub admissible: bool,
    pub monochromatic_count: usize,
    pub nonmonochromatic_count: usize,
    pub max_colors_per_cell: usize,
    /// `|C_i|` at index `i - 1`.
    pub per_color_mono: Vec<usize>,
    /// Distinct colors per cell in canonical cell order, when requested.
    pub cell_color_counts: Option<Vec<u32>>,
}

impl LabelingStats {
    pub fn num_cells(&self) -> usize {
        self.monochromatic_count + self.nonmonochromatic_count
    }

    /// The stats object emitted by the CLI.
    pub fn report(&self, k: usize, q: u32) -> Result<StatsReport> {
        let bound = nonmono_lower_bound(k, q)?
            .to_u64()
            .ok_or_else(|| Error::invalid("bound exceeds 64 bits"))?;
        Ok(StatsReport {
            admissible: self.admissible,
            mono: self.monochromatic_count as u64,
            nonmono: self.nonmonochromatic_count as u64,
            max_colors_per_cell: self.max_colors_per_cell as u64,
            per_color_mono: self
                .per_color_mono
                .iter()
                .enumerate()
                .map(|(i, &n)| ((i + 1).to_string(), n as u64))
                .collect(),
            bound,
            meets_bound: self.nonmonochromatic_count as u64 == bound,
        })
    }
}

/// JSON shape of [`LabelingStats`]. `meets_bound` means the non-monochromatic
/// count equals the lower bound exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub admissible: bool,
    pub mono: u64,
    pub nonmono: u64,
    pub max_colors_per_cell: u64,
    pub per_color_mono: BTreeMap<String, u64>,
    pub bound: u64,
    pub meets_bound: bool,
}

struct Partial {
    mono: Vec<usize>,
    nonmono: usize,
    max_colors: usize,
    per_cell: Vec<u32>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in self.mono.iter_mut().zip(&other.mono) {
            *a += b;
        }
        self.nonmono += other.nonmono;
        self.max_colors = self.max_colors.max(other.max_colors);
        self.per_cell.extend(other.per_cell);
        self
    }
}

/// Counts distinct values with a generation-stamped table, `O(len)` per call.
pub(crate) struct DistinctCounter {
    stamp: Vec<u32>,
    generation: u32,
}

impl DistinctCounter {
    pub(crate) fn new(k: usize) -> Self {
        DistinctCounter {
            stamp: vec![0; k + 1],
            generation: 0,
        }
    }

    pub(crate) fn count(&mut self, colors: impl Iterator<Item = u32>) -> usize {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
        let mut n = 0;
        for c in colors {
            let s = &mut self.stamp[c as usize];
            if *s != self.generation {
                *s = self.generation;
                n += 1;
            }
        }
        n
    }
}

fn stats_impl(labeling: &Labeling, keep_cells: bool) -> LabelingStats {
    let k = labeling.k;
    let hg = Hypergraph::new(k, labeling.q).expect("validated at construction");
    let colors = &labeling.colors;
    let partials: Vec<Partial> = hg
        .bases()
        .blocks()
        .into_par_iter()
        .map(|block| {
            let mut p = Partial {
                mono: vec![0; k],
                nonmono: 0,
                max_colors: 0,
                per_cell: Vec::new(),
            };
            if keep_cells {
                p.per_cell.reserve(block.len);
            }
            let mut ranks = vec![0usize; k];
            let mut counter = DistinctCounter::new(k);
            hg.bases().visit_block(block, |_, base| {
                hg.cell_vertex_ranks(base, &mut ranks);
                let n = counter.count(ranks.iter().map(|&r| colors[r]));
                if n == 1 {
                    p.mono[colors[ranks[0]] as usize - 1] += 1;
                } else {
                    p.nonmono += 1;
                }
                p.max_colors = p.max_colors.max(n);
                if keep_cells {
                    p.per_cell.push(n as u32);
                }
            });
            p
        })
        .collect();
    let total = partials
        .into_iter()
        .reduce(Partial::merge)
        .expect("at least one block");
    LabelingStats {
        admissible: labeling.is_admissible(),
        monochromatic_count: total.mono.iter().sum(),
        nonmonochromatic_count: total.nonmono,
        max_colors_per_cell: total.max_colors,
        per_color_mono: total.mono,
        cell_color_counts: keep_cells.then_some(total.per_cell),
    }
}

/// Exact monochromatic / non-monochromatic counts over all of `E(k,q)`.
pub fn compute_stats(labeling: &Labeling) -> LabelingStats {
    stats_impl(labeling, false)
}

/// [`compute_stats`] plus the number of distinct colors in every cell.
pub fn compute_stats_with_cells(labeling: &Labeling) -> LabelingStats {
    stats_impl(labeling, true)
}

/// Certificate that the monochromatic cells inject into `V(k,q-2)` via
/// `b -> b - e_i` for a cell of color `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectionWitness {
    pub k: usize,
    pub q: u32,
    /// Images of the color-`i` monochromatic cells at index `i - 1`.
    pub images: Vec<Vec<LatticePoint>>,
    pub monochromatic_total: usize,
    /// `|V(k,q-2)|`.
    pub target_size: usize,
}

/// Builds and checks the injection: each image is a valid point, images of
/// different colors never collide, and their total fits in `V(k,q-2)`.
///
/// A failing check on an admissible labeling is reported as
/// [`Error::InternalInconsistency`].
pub fn injection_witness(labeling: &Labeling) -> Result<InjectionWitness> {
    let (k, q) = (labeling.k, labeling.q);
    if q < 2 {
        return Err(Error::Precondition(format!(
            "the injection needs q >= 2, got {q}"
        )));
    }
    if !labeling.is_admissible() {
        return Err(Error::Precondition("labeling is not admissible".into()));
    }
    let hg = Hypergraph::new(k, q)?;
    let target = SimplexLattice::new(k, q - 2)?;
    let mut owner = vec![0u32; target.len()];
    let mut images: Vec<Vec<LatticePoint>> = vec![Vec::new(); k];
    let mut ranks = vec![0usize; k];
    let mut failure = None;
    hg.bases().visit(|_, base| {
        if failure.is_some() {
            return;
        }
        hg.cell_vertex_ranks(base, &mut ranks);
        let c = labeling.colors[ranks[0]];
        if ranks.iter().any(|&r| labeling.colors[r] != c) {
            return;
        }
        let i = c as usize - 1;
        if base[i] == 0 {
            failure = Some(format!(
                "monochromatic cell {base:?} of color {c} has b_{c} = 0"
            ));
            return;
        }
        let mut image = base.to_vec();
        image[i] -= 1;
        let r = target.rank(&image);
        if owner[r] != 0 {
            failure = Some(format!(
                "image {image:?} hit by colors {} and {c}",
                owner[r]
            ));
            return;
        }
        owner[r] = c;
        images[i].push(LatticePoint::from_raw(image));
    });
    if let Some(msg) = failure {
        return Err(Error::InternalInconsistency(msg));
    }
    let total: usize = images.iter().map(Vec::len).sum();
    if total > target.len() {
        return Err(Error::InternalInconsistency(format!(
            "{total} monochromatic cells exceed |V(k,q-2)| = {}",
            target.len()
        )));
    }
    Ok(InjectionWitness {
        k,
        q,
        images,
        monochromatic_total: total,
        target_size: target.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleKind {
    Up,
    Down,
}

/// A triangle of the `k = 3` triangulation, identified by kind and base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub kind: TriangleKind,
    pub base: LatticePoint,
}

impl Triangle {
    pub fn vertices(&self) -> [LatticePoint; 3] {
        let b = &self.base;
        match self.kind {
            TriangleKind::Up => [b.plus_unit(1), b.plus_unit(2), b.plus_unit(3)],
            TriangleKind::Down => [
                b.plus_unit(1).plus_unit(2),
                b.plus_unit(1).plus_unit(3),
                b.plus_unit(2).plus_unit(3),
            ],
        }
    }
}

/// Every up- or down-triangle of the `k = 3` triangulation whose three
/// vertices carry three distinct colors. Up-triangles come first, each group
/// in canonical base order.
pub fn find_rainbow_cells(labeling: &Labeling) -> Result<Vec<Triangle>> {
    if labeling.k != 3 {
        return Err(Error::Precondition(format!(
            "rainbow search is defined for k = 3, got k = {}",
            labeling.k
        )));
    }
    if !labeling.is_admissible() {
        return Err(Error::Precondition("labeling is not admissible".into()));
    }
    let q = labeling.q;
    let lattice = labeling.lattice();
    let colors = &labeling.colors;
    let rainbow = |pts: &[[u32; 3]; 3]| {
        let c = pts.map(|p| colors[lattice.rank(&p)]);
        c[0] != c[1] && c[0] != c[2] && c[1] != c[2]
    };
    let mut out = Vec::new();
    for b in SimplexLattice::new(3, q - 1)?.iter() {
        let [x, y, z] = [b.coords()[0], b.coords()[1], b.coords()[2]];
        if rainbow(&[[x + 1, y, z], [x, y + 1, z], [x, y, z + 1]]) {
            out.push(Triangle {
                kind: TriangleKind::Up,
                base: b,
            });
        }
    }
    if q >= 2 {
        for b in SimplexLattice::new(3, q - 2)?.iter() {
            let [x, y, z] = [b.coords()[0], b.coords()[1], b.coords()[2]];
            if rainbow(&[[x + 1, y + 1, z], [x + 1, y, z + 1], [x, y + 1, z + 1]]) {
                out.push(Triangle {
                    kind: TriangleKind::Down,
                    base: b,
                });
            }
        }
    }
    Ok(out)
}

//! The simplex lattice `V(k,q)`, its up-cells `E(k,q)` and, for `k = 3`, the
//! down-cells that complete the up-cells to a triangulation.
//!
//! Points are enumerated in descending lexicographic order: the first
//! coordinate varies slowest, starting from `(q, 0, ..., 0)` and ending at
//! `(0, ..., 0, q)`. Every table indexed "by vertex" in this crate uses the
//! rank in that order.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit on `k * q` for any lattice point.
pub const MAX_KQ: u64 = 1_000_000;

fn check_kq(k: usize, q: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if (k as u64).saturating_mul(q) > MAX_KQ {
        return Err(Error::invalid(format!(
            "k*q = {} exceeds the supported limit {MAX_KQ}",
            (k as u64).saturating_mul(q)
        )));
    }
    Ok(())
}

/// A point of `V(k,q)`: `k` non-negative integers summing to `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint {
    coords: Vec<u32>,
}

impl LatticePoint {
    pub fn new(coords: Vec<u32>) -> Result<Self> {
        let q: u64 = coords.iter().map(|&c| u64::from(c)).sum();
        check_kq(coords.len(), q)?;
        Ok(LatticePoint { coords })
    }

    pub(crate) fn from_raw(coords: Vec<u32>) -> Self {
        LatticePoint { coords }
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn q(&self) -> u32 {
        self.coords.iter().sum()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.coords
    }

    /// `self + e_i` for a 1-based coordinate index.
    pub fn plus_unit(&self, i: usize) -> LatticePoint {
        let mut coords = self.coords.clone();
        coords[i - 1] += 1;
        LatticePoint { coords }
    }

    /// `self - e_i` for a 1-based index, `None` if that coordinate is zero.
    pub fn minus_unit(&self, i: usize) -> Option<LatticePoint> {
        let mut coords = self.coords.clone();
        coords[i - 1] = coords[i - 1].checked_sub(1)?;
        Some(LatticePoint { coords })
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_coords(f, &self.coords)
    }
}

fn write_coords(f: &mut impl fmt::Write, coords: &[u32]) -> fmt::Result {
    for (i, c) in coords.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

/// An up-cell (hyperedge) `e(b) = {b + e_1, ..., b + e_k}` of `H(k,q)`,
/// identified by its base `b` in `V(k,q-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cell {
    base: LatticePoint,
}

impl Cell {
    pub fn new(base: Vec<u32>) -> Result<Self> {
        let base = LatticePoint::new(base)?;
        check_kq(base.k(), u64::from(base.q()) + 1)?;
        Ok(Cell { base })
    }

    pub fn from_base(base: LatticePoint) -> Self {
        Cell { base }
    }

    pub fn base(&self) -> &LatticePoint {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    /// The `q` of the lattice this cell lives in (one more than the base sum).
    pub fn q(&self) -> u32 {
        self.base.q() + 1
    }

    /// The `k` vertices `b + e_i` in index order.
    pub fn vertices(&self) -> Vec<LatticePoint> {
        (1..=self.k()).map(|i| self.base.plus_unit(i)).collect()
    }

    /// Two distinct cells are adjacent iff they share a vertex, which happens
    /// exactly when their bases differ by `+1` and `-1` in two coordinates.
    pub fn is_adjacent(&self, other: &Cell) -> Result<bool> {
        if self.k() != other.k() || self.q() != other.q() {
            return Err(Error::invalid(format!(
                "cells from different lattices: (k={}, q={}) vs (k={}, q={})",
                self.k(),
                self.q(),
                other.k(),
                other.q()
            )));
        }
        let mut plus = 0;
        let mut minus = 0;
        for (&a, &b) in self.base.coords().iter().zip(other.base.coords()) {
            match i64::from(a) - i64::from(b) {
                0 => {}
                1 => plus += 1,
                -1 => minus += 1,
                _ => return Ok(false),
            }
        }
        Ok(plus == 1 && minus == 1)
    }
}

/// Free-function form of [`Cell::is_adjacent`].
pub fn cells_adjacent(c1: &Cell, c2: &Cell) -> Result<bool> {
    c1.is_adjacent(c2)
}

/// Free-function form of [`Cell::vertices`].
pub fn cell_vertices(c: &Cell) -> Vec<LatticePoint> {
    c.vertices()
}

/// An inverted triangle of the `k = 3` triangulation, with vertices
/// `base + e_i + e_j` for `i < j`. The base sums to `q - 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DownCell {
    base: LatticePoint,
}

impl DownCell {
    pub fn new(base: [u32; 3]) -> Self {
        DownCell {
            base: LatticePoint::from_raw(base.to_vec()),
        }
    }

    pub fn base(&self) -> &LatticePoint {
        &self.base
    }

    pub fn q(&self) -> u32 {
        self.base.q() + 2
    }

    /// Vertices in the order `(e1+e2, e1+e3, e2+e3)` relative to the base.
    pub fn vertices(&self) -> [LatticePoint; 3] {
        let b = &self.base;
        [
            b.plus_unit(1).plus_unit(2),
            b.plus_unit(1).plus_unit(3),
            b.plus_unit(2).plus_unit(3),
        ]
    }
}

/// The admissible colors `L(a) = { i : a_i > 0 }`, 1-based and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorList(Vec<usize>);

impl ColorList {
    pub fn colors(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, color: usize) -> bool {
        self.0.binary_search(&color).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn admissible_colors(a: &LatticePoint) -> Result<ColorList> {
    let list: Vec<usize> = a
        .coords()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, _)| i + 1)
        .collect();
    if list.is_empty() {
        return Err(Error::EmptyColorList);
    }
    Ok(ColorList(list))
}

/// Rank/unrank machinery and enumeration for one `V(k,q)`.
///
/// `counts[m][d]` is the number of compositions of `d` into `m` parts. The
/// table is built with checked additions so a lattice that cannot be indexed
/// by `usize` is rejected at construction.
#[derive(Clone, Debug)]
pub struct SimplexLattice {
    k: usize,
    q: u32,
    counts: Vec<Vec<usize>>,
}

/// A contiguous run of ranks sharing the same first coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub first: u32,
    pub start: usize,
    pub len: usize,
}

impl SimplexLattice {
    pub fn new(k: usize, q: u32) -> Result<Self> {
        check_kq(k, u64::from(q))?;
        let q_us = q as usize;
        let mut counts = vec![vec![0usize; q_us + 1]; k + 1];
        counts[0][0] = 1;
        for m in 1..=k {
            counts[m][0] = 1;
            for d in 1..=q_us {
                counts[m][d] = counts[m - 1][d]
                    .checked_add(counts[m][d - 1])
                    .ok_or_else(|| {
                        Error::invalid(format!("V({k},{q}) is too large to index in memory"))
                    })?;
            }
        }
        Ok(SimplexLattice { k, q, counts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `|V(k,q)| = C(q+k-1, k-1)`.
    pub fn len(&self) -> usize {
        self.counts[self.k][self.q as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of compositions of `d` into `m` parts, `d <= q`, `m <= k`.
    #[inline]
    pub fn compositions(&self, m: usize, d: u32) -> usize {
        self.counts[m][d as usize]
    }

    /// Points ranked before `a` that agree with it up to position `i`, given
    /// that `d` units remain after position `i`.
    #[inline]
    fn skip(&self, i: usize, d: u32) -> usize {
        if d == 0 {
            0
        } else {
            self.counts[self.k - i][(d - 1) as usize]
        }
    }

    /// Rank of `coords` in canonical order. `coords` must be a point of this
    /// lattice.
    pub fn rank(&self, coords: &[u32]) -> usize {
        debug_assert_eq!(coords.len(), self.k);
        let mut remaining = self.q;
        let mut r = 0;
        for (i, &c) in coords[..self.k - 1].iter().enumerate() {
            remaining -= c;
            r += self.skip(i, remaining);
        }
        r
    }

    /// Checked variant of [`rank`](Self::rank) for untrusted input.
    pub fn try_rank(&self, coords: &[u32]) -> Option<usize> {
        if coords.len() != self.k {
            return None;
        }
        let sum: u64 = coords.iter().map(|&c| u64::from(c)).sum();
        (sum == u64::from(self.q)).then(|| self.rank(coords))
    }

    pub fn unrank(&self, mut r: usize) -> LatticePoint {
        assert!(
            r < self.len(),
            "rank {r} out of range for V({},{})",
            self.k,
            self.q
        );
        let mut coords = vec![0u32; self.k];
        let mut remaining = self.q;
        for (i, slot) in coords[..self.k - 1].iter_mut().enumerate() {
            // larger values come first; each value v owns a run of
            // compositions(k-i-1, remaining-v) ranks
            let mut v = remaining;
            loop {
                let run = self.counts[self.k - i - 1][(remaining - v) as usize];
                if r < run {
                    break;
                }
                r -= run;
                v -= 1;
            }
            *slot = v;
            remaining -= v;
        }
        coords[self.k - 1] = remaining;
        LatticePoint::from_raw(coords)
    }

    /// Ranks of the `k` points `b + e_j` of the lattice, for a base `b`
    /// summing to `q - 1`, written into `out` in index order. Runs in `O(k)`.
    pub fn up_neighbor_ranks(&self, base: &[u32], out: &mut [usize]) {
        let k = self.k;
        debug_assert_eq!(base.len(), k);
        debug_assert!(out.len() >= k);
        // b + e_j shifts the remainder after position i up by one for i < j
        // and leaves it unchanged for i >= j
        let mut suffix = 0usize;
        let mut remaining = self.q - 1;
        for (i, &b) in base[..k - 1].iter().enumerate() {
            remaining -= b;
            suffix += self.skip(i, remaining);
        }
        let mut prefix = 0usize;
        let mut remaining = self.q - 1;
        for j in 0..k {
            out[j] = prefix + suffix;
            if j < k - 1 {
                remaining -= base[j];
                prefix += self.skip(j, remaining + 1);
                suffix -= self.skip(j, remaining);
            }
        }
    }

    /// Ranks are grouped by first coordinate, from `q` down to `0`.
    pub fn blocks(&self) -> Vec<Block> {
        let mut start = 0;
        (0..=self.q)
            .rev()
            .map(|first| {
                let len = self.counts[self.k - 1][(self.q - first) as usize];
                let b = Block { first, start, len };
                start += len;
                b
            })
            .collect()
    }

    /// Calls `f(rank, coords)` for every point of `block` in canonical order.
    pub fn visit_block(&self, block: Block, mut f: impl FnMut(usize, &[u32])) {
        let mut coords = vec![0u32; self.k];
        coords[0] = block.first;
        coords[1] = self.q - block.first;
        let mut rank = block.start;
        loop {
            f(rank, &coords);
            rank += 1;
            if !advance(&mut coords, 1) {
                break;
            }
        }
        debug_assert_eq!(rank, block.start + block.len);
    }

    /// Calls `f(rank, coords)` for every point in canonical order.
    pub fn visit(&self, mut f: impl FnMut(usize, &[u32])) {
        for block in self.blocks() {
            self.visit_block(block, &mut f);
        }
    }

    pub fn iter(&self) -> Compositions {
        Compositions::new(self.k, self.q)
    }

    pub fn points(&self) -> Vec<LatticePoint> {
        self.iter().collect()
    }
}

/// Moves `coords` to its successor in descending lexicographic order, only
/// touching positions `from..`. Returns `false` after the last composition.
fn advance(coords: &mut [u32], from: usize) -> bool {
    let k = coords.len();
    let Some(i) = (from..k - 1).rev().find(|&i| coords[i] > 0) else {
        return false;
    };
    let tail: u32 = coords[i + 1..].iter().sum();
    coords[i] -= 1;
    coords[i + 1] = tail + 1;
    for c in &mut coords[i + 2..] {
        *c = 0;
    }
    true
}

/// Iterator over the compositions of `q` into `k` parts in canonical order.
#[derive(Clone, Debug)]
pub struct Compositions {
    next: Option<Vec<u32>>,
}

impl Compositions {
    pub fn new(k: usize, q: u32) -> Self {
        let next = (k > 0).then(|| {
            let mut c = vec![0u32; k];
            c[0] = q;
            c
        });
        Compositions { next }
    }
}

impl Iterator for Compositions {
    type Item = LatticePoint;

    fn next(&mut self) -> Option<LatticePoint> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if advance(&mut succ, 0) {
            self.next = Some(succ);
        }
        Some(LatticePoint::from_raw(current))
    }
}

/// All of `V(k,q)` in canonical order.
pub fn enumerate_vertices(k: usize, q: u32) -> Result<Vec<LatticePoint>> {
    check_kq(k, u64::from(q))?;
    Ok(Compositions::new(k, q).collect())
}

/// All up-cells of `H(k,q)`; their bases are exactly `V(k,q-1)`.
pub fn enumerate_cells(k: usize, q: u32) -> Result<Vec<Cell>> {
    if q < 1 {
        return Err(Error::invalid("cells need q >= 1"));
    }
    check_kq(k, u64::from(q))?;
    Ok(Compositions::new(k, q - 1).map(Cell::from_base).collect())
}

/// All down-cells of the `k = 3` triangulation of `Delta(3,q)`.
pub fn enumerate_down_cells(q: u32) -> Result<Vec<DownCell>> {
    if q < 2 {
        return Err(Error::invalid(format!("down cells need q >= 2, got {q}")));
    }
    check_kq(3, u64::from(q))?;
    Ok(Compositions::new(3, q - 2)
        .map(|b| {
            let c = b.coords();
            DownCell::new([c[0], c[1], c[2]])
        })
        .collect())
}

/// Up-cells and vertex ranks of `H(k,q)`.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    vertices: SimplexLattice,
    bases: SimplexLattice,
}

impl Hypergraph {
    pub fn new(k: usize, q: u32) -> Result<Self> {
        if q < 1 {
            return Err(Error::invalid("the hypergraph needs q >= 1"));
        }
        Ok(Hypergraph {
            vertices: SimplexLattice::new(k, q)?,
            bases: SimplexLattice::new(k, q - 1)?,
        })
    }

    pub fn k(&self) -> usize {
        self.vertices.k()
    }

    pub fn q(&self) -> u32 {
        self.vertices.q()
    }

    pub fn vertices(&self) -> &SimplexLattice {
        &self.vertices
    }

    /// The lattice `V(k,q-1)` of cell bases.
    pub fn bases(&self) -> &SimplexLattice {
        &self.bases
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.bases.len()
    }

    /// Vertex ranks of the cell with base `base`.
    pub fn cell_vertex_ranks(&self, base: &[u32], out: &mut [usize]) {
        self.vertices.up_neighbor_ranks(base, out)
    }
}

/// Writes points one per line as space-separated integers.
pub fn write_points<'a, W: Write>(
    mut w: W,
    points: impl IntoIterator<Item = &'a LatticePoint>,
) -> io::Result<()> {
    let mut line = String::new();
    for p in points {
        line.clear();
        write_coords(&mut line, p.coords()).expect("writing to a String");
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Writes cell bases with a `#cells k=K q=Q` header.
pub fn write_cells<'a, W: Write>(
    mut w: W,
    k: usize,
    q: u32,
    cells: impl IntoIterator<Item = &'a Cell>,
) -> io::Result<()> {
    writeln!(w, "#cells k={k} q={q}")?;
    write_points(w, cells.into_iter().map(Cell::base))
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::binom::composition_count;

    fn pts(v: &[&[u32]]) -> Vec<LatticePoint> {
        v.iter()
            .map(|c| LatticePoint::new(c.to_vec()).unwrap())
            .collect()
    }

    /// All k-tuples over 0..=q with the right sum, by filtering the full cube.
    fn brute_force(k: usize, q: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (q as usize + 1).pow(k as u32);
        for mut n in 0..total {
            let mut v = vec![0u32; k];
            for c in v.iter_mut() {
                *c = (n % (q as usize + 1)) as u32;
                n /= q as usize + 1;
            }
            if v.iter().sum::<u32>() == q {
                out.push(v);
            }
        }
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_vertices(3, 5).unwrap().len(), 21);
        assert_eq!(enumerate_vertices(2, 0).unwrap(), pts(&[&[0, 0]]));
        assert_eq!(enumerate_vertices(4, 3).unwrap().len(), 20);
        assert_eq!(enumerate_cells(3, 5).unwrap().len(), 15);
        assert_eq!(
            enumerate_cells(2, 1).unwrap(),
            vec![Cell::new(vec![0, 0]).unwrap()]
        );
        assert_eq!(enumerate_cells(4, 3).unwrap().len(), 10);
    }

    #[test]
    fn canonical_order_is_descending_lex() {
        let v = enumerate_vertices(3, 2).unwrap();
        assert_eq!(
            v,
            pts(&[
                &[2, 0, 0],
                &[1, 1, 0],
                &[1, 0, 1],
                &[0, 2, 0],
                &[0, 1, 1],
                &[0, 0, 2]
            ])
        );
        for (k, q) in [(2, 4), (3, 4), (4, 3), (5, 2)] {
            let got: Vec<Vec<u32>> = enumerate_vertices(k, q)
                .unwrap()
                .into_iter()
                .map(LatticePoint::into_coords)
                .collect();
            assert_eq!(got, brute_force(k, q));
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            enumerate_vertices(1, 3),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            enumerate_cells(3, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            enumerate_down_cells(1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(enumerate_vertices(1000, 1001).is_err());
    }

    #[test]
    fn counts_match_binomial() {
        for k in 2..=6 {
            for q in 0..=10 {
                let n = enumerate_vertices(k, q).unwrap().len();
                assert_eq!(composition_count(k as u64, q as u64), n.into());
                assert_eq!(SimplexLattice::new(k, q).unwrap().len(), n);
            }
        }
    }

    #[test]
    fn rank_unrank_agree_with_enumeration() {
        for (k, q) in [(2, 7), (3, 5), (4, 4), (6, 3), (7, 6)] {
            let lat = SimplexLattice::new(k, q).unwrap();
            for (r, p) in lat.iter().enumerate() {
                assert_eq!(lat.rank(p.coords()), r);
                assert_eq!(lat.unrank(r), p);
            }
            let mut seen = 0;
            lat.visit(|r, c| {
                assert_eq!(r, seen);
                assert_eq!(lat.rank(c), r);
                seen += 1;
            });
            assert_eq!(seen, lat.len());
        }
    }

    #[test]
    fn up_neighbor_ranks_match_direct_rank() {
        for (k, q) in [(2, 3), (3, 5), (4, 4), (5, 3)] {
            let hg = Hypergraph::new(k, q).unwrap();
            let mut out = vec![0; k];
            for cell in enumerate_cells(k, q).unwrap() {
                hg.cell_vertex_ranks(cell.base().coords(), &mut out);
                let direct: Vec<usize> = cell
                    .vertices()
                    .iter()
                    .map(|v| hg.vertices().rank(v.coords()))
                    .collect();
                assert_eq!(out, direct);
            }
        }
    }

    #[test]
    fn cell_vertex_examples() {
        let c = Cell::new(vec![1, 0, 0]).unwrap();
        assert_eq!(c.vertices(), pts(&[&[2, 0, 0], &[1, 1, 0], &[1, 0, 1]]));
        let c = Cell::new(vec![0, 2, 2]).unwrap();
        assert_eq!(c.vertices(), pts(&[&[1, 2, 2], &[0, 3, 2], &[0, 2, 3]]));
        let c = Cell::new(vec![0, 0, 0, 1]).unwrap();
        assert_eq!(
            c.vertices(),
            pts(&[&[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1], &[0, 0, 0, 2]])
        );
    }

    #[test]
    fn every_cell_vertex_is_a_lattice_point() {
        for (k, q) in [(3, 4), (4, 3), (5, 3)] {
            let all: HashSet<_> = enumerate_vertices(k, q).unwrap().into_iter().collect();
            for c in enumerate_cells(k, q).unwrap() {
                let vs = c.vertices();
                assert_eq!(vs.iter().collect::<HashSet<_>>().len(), k);
                assert!(vs.iter().all(|v| all.contains(v)));
            }
        }
    }

    #[test]
    fn admissible_color_examples() {
        let l = |c: &[u32]| admissible_colors(&LatticePoint::new(c.to_vec()).unwrap());
        assert_eq!(l(&[5, 0, 0]).unwrap().colors(), &[1]);
        assert_eq!(l(&[1, 0, 4]).unwrap().colors(), &[1, 3]);
        assert_eq!(l(&[1, 1, 1]).unwrap().colors(), &[1, 2, 3]);
        assert!(matches!(l(&[0, 0, 0]), Err(Error::EmptyColorList)));
    }

    #[test]
    fn adjacency_examples() {
        let c = |v: &[u32]| Cell::new(v.to_vec()).unwrap();
        assert!(cells_adjacent(&c(&[1, 0, 0]), &c(&[0, 1, 0])).unwrap());
        assert!(!cells_adjacent(&c(&[2, 0, 0]), &c(&[0, 2, 0])).unwrap());
        assert!(!cells_adjacent(&c(&[1, 1, 0]), &c(&[1, 1, 0])).unwrap());
        assert!(cells_adjacent(&c(&[1, 0, 0]), &c(&[1, 0, 0, 0])).is_err());
        assert!(cells_adjacent(&c(&[1, 0, 0]), &c(&[1, 1, 0])).is_err());
    }

    #[test]
    fn adjacency_agrees_with_shared_vertices() {
        for (k, q) in [(3, 4), (4, 3)] {
            let cells = enumerate_cells(k, q).unwrap();
            for a in &cells {
                let va: HashSet<_> = a.vertices().into_iter().collect();
                for b in &cells {
                    let shared = a != b && b.vertices().iter().any(|v| va.contains(v));
                    assert_eq!(a.is_adjacent(b).unwrap(), shared);
                    assert_eq!(a.is_adjacent(b).unwrap(), b.is_adjacent(a).unwrap());
                }
            }
        }
    }

    #[test]
    fn down_cell_examples() {
        let d = enumerate_down_cells(2).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(
            d[0].vertices().to_vec(),
            pts(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, 1]])
        );
        assert_eq!(enumerate_down_cells(3).unwrap().len(), 3);
        assert_eq!(enumerate_down_cells(5).unwrap().len(), 10);
    }

    #[test]
    fn dump_format() {
        let mut buf = Vec::new();
        write_points(&mut buf, &enumerate_vertices(2, 2).unwrap()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2 0\n1 1\n0 2\n");
        let mut buf = Vec::new();
        write_cells(&mut buf, 3, 2, &enumerate_cells(3, 2).unwrap()).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "#cells k=3 q=2\n1 0 0\n0 1 0\n0 0 1\n"
        );
    }
}

//! Search over Sperner-admissible labelings of small instances.
//!
//! The exhaustive search is a depth-first backtracking over vertices ordered
//! by list size (corners first, since their color is forced). A cell is
//! scored as soon as its last vertex is assigned, and with pruning enabled a
//! branch is abandoned once its partial score can no longer beat the
//! incumbent.
//!
//! The top of the tree is split into a fixed number of independent subtrees
//! that all start from the same incumbent. Subtrees never share bounds, so
//! `nodes_visited` and the chosen witness do not depend on how many threads
//! run them.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::{
    compute_stats, first_choice, max_coordinate, nonmono_lower_bound, top_coordinate,
    DistinctCounter, Labeling,
};
use crate::lattice::{Hypergraph, SimplexLattice};

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

/// Minimum number of independent subtrees the exhaustive search is split into.
const SPLIT_TASKS: usize = 64;
const FLUSH_EVERY: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Number of non-monochromatic cells.
    MinNonmono,
    /// Largest number of distinct colors on a single cell.
    MinMaxColors,
}

impl Objective {
    pub fn evaluate(self, labeling: &Labeling) -> usize {
        let s = compute_stats(labeling);
        match self {
            Objective::MinNonmono => s.nonmonochromatic_count,
            Objective::MinMaxColors => s.max_colors_per_cell,
        }
    }

    fn combine(self, acc: usize, distinct: usize) -> usize {
        match self {
            Objective::MinNonmono => acc + usize::from(distinct > 1),
            Objective::MinMaxColors => acc.max(distinct),
        }
    }

    /// A value no admissible labeling of `H(k,q)` can beat.
    pub fn lower_bound(self, k: usize, q: u32) -> Result<usize> {
        match self {
            Objective::MinNonmono => nonmono_lower_bound(k, q)?
                .to_usize()
                .ok_or_else(|| Error::invalid("lower bound exceeds usize")),
            // the single cell of H(k,1) holds all k corners; for q >= 2 some
            // cell is non-monochromatic
            Objective::MinMaxColors => Ok(if q == 1 { k } else { 2 }),
        }
    }

    /// The starting incumbent: first-choice for the non-monochromatic count,
    /// top-coordinate (where defined) or max-coordinate for colors per cell.
    pub fn initial_labeling(self, k: usize, q: u32) -> Result<Labeling> {
        match self {
            Objective::MinNonmono => first_choice(k, q),
            Objective::MinMaxColors => match top_coordinate(k, q) {
                Ok(l) => Ok(l),
                Err(Error::OutOfDomain(_)) => max_coordinate(k, q),
                Err(e) => Err(e),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub k: usize,
    pub q: u32,
    pub objective: Objective,
    pub node_limit: u64,
    pub time_limit: Duration,
    /// Cut branches whose partial score already matches the incumbent.
    pub prune: bool,
    /// Stop as soon as the incumbent reaches [`Objective::lower_bound`].
    /// When off, optimality is established by exhausting the tree alone.
    pub use_known_bound: bool,
}

impl SearchSpec {
    pub fn new(k: usize, q: u32, objective: Objective) -> Self {
        SearchSpec {
            k,
            q,
            objective,
            node_limit: DEFAULT_NODE_LIMIT,
            time_limit: DEFAULT_TIME_LIMIT,
            prune: true,
            use_known_bound: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub objective: Objective,
    pub optimum: usize,
    pub witness: Labeling,
    pub nodes_visited: u64,
    pub proven_optimal: bool,
    /// The node or time budget ran out before the search finished.
    pub budget_exhausted: bool,
    pub lower_bound_used: usize,
    /// `prod_a |L(a)|`, the number of admissible labelings.
    pub space_size: BigUint,
}

/// `prod_a |L(a)|` over `V(k,q)`.
pub fn search_space_size(k: usize, q: u32) -> Result<BigUint> {
    let lattice = SimplexLattice::new(k, q)?;
    let mut by_support = vec![0u64; k + 1];
    lattice.visit(|_, a| by_support[a.iter().filter(|&&c| c > 0).count()] += 1);
    let mut size = BigUint::one();
    for (s, &n) in by_support.iter().enumerate().skip(2) {
        size *= BigUint::from(s).pow(n as u32);
    }
    Ok(size)
}

/// Static problem data shared by all subtrees.
struct Problem {
    k: usize,
    objective: Objective,
    prune: bool,
    /// Vertex rank assigned at each depth.
    order: Vec<usize>,
    /// Admissible colors of the vertex at each depth.
    choices: Vec<Vec<u32>>,
    /// Flattened vertex ranks of every cell.
    cell_vertices: Vec<usize>,
    /// Cells whose last vertex is assigned at each depth.
    completes_at: Vec<Vec<usize>>,
}

impl Problem {
    fn new(hg: &Hypergraph, objective: Objective, prune: bool) -> Self {
        let k = hg.k();
        let n = hg.num_vertices();
        let mut support = vec![0usize; n];
        let mut lists = vec![Vec::new(); n];
        hg.vertices().visit(|r, a| {
            lists[r] = (0..k).filter(|&i| a[i] > 0).map(|i| i as u32 + 1).collect();
            support[r] = lists[r].len();
        });
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&r| (support[r], r));
        let mut depth_of = vec![0usize; n];
        for (d, &r) in order.iter().enumerate() {
            depth_of[r] = d;
        }
        let choices = order.iter().map(|&r| lists[r].clone()).collect();

        let mut cell_vertices = vec![0usize; hg.num_cells() * k];
        let mut completes_at = vec![Vec::new(); n];
        hg.bases().visit(|c, base| {
            let slot = &mut cell_vertices[c * k..(c + 1) * k];
            hg.cell_vertex_ranks(base, slot);
            let last = slot.iter().map(|&r| depth_of[r]).max().expect("k >= 2");
            completes_at[last].push(c);
        });
        Problem {
            k,
            objective,
            prune,
            order,
            choices,
            cell_vertices,
            completes_at,
        }
    }

    fn depth(&self) -> usize {
        self.order.len()
    }

    /// Folds the cells completed at `depth` into `acc`.
    fn score_depth(
        &self,
        depth: usize,
        colors: &[u32],
        acc: usize,
        counter: &mut DistinctCounter,
    ) -> usize {
        self.completes_at[depth].iter().fold(acc, |acc, &c| {
            let vs = &self.cell_vertices[c * self.k..(c + 1) * self.k];
            let n = counter.count(vs.iter().map(|&r| colors[r]));
            self.objective.combine(acc, n)
        })
    }
}

/// Shared stop signals; crossing a limit flips `aborted` for every subtree.
struct Budget {
    node_limit: u64,
    deadline: Instant,
    nodes: AtomicU64,
    aborted: AtomicBool,
}

impl Budget {
    fn charge(&self, n: u64) -> bool {
        let total = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        if total > self.node_limit || Instant::now() > self.deadline {
            self.aborted.store(true, Ordering::Relaxed);
        }
        !self.aborted.load(Ordering::Relaxed)
    }
}

/// One subtree: a fixed prefix of assignments and its own incumbent.
struct Subtree<'a> {
    problem: &'a Problem,
    budget: &'a Budget,
    stop_at: Option<usize>,
    colors: Vec<u32>,
    best: usize,
    best_colors: Option<Vec<u32>>,
    nodes: u64,
    unflushed: u64,
    counter: DistinctCounter,
    stopped: bool,
}

impl Subtree<'_> {
    fn run(&mut self, depth: usize, partial: usize) {
        self.nodes += 1;
        self.unflushed += 1;
        if self.unflushed >= FLUSH_EVERY {
            if !self.budget.charge(self.unflushed) {
                self.stopped = true;
            }
            self.unflushed = 0;
        }
        if self.stopped {
            return;
        }
        let p = self.problem;
        if depth == p.depth() {
            if partial < self.best {
                self.best = partial;
                self.best_colors = Some(self.colors.clone());
                if self.stop_at.is_some_and(|lb| partial <= lb) {
                    self.stopped = true;
                }
            }
            return;
        }
        let vertex = p.order[depth];
        for &c in &p.choices[depth] {
            self.colors[vertex] = c;
            let score = p.score_depth(depth, &self.colors, partial, &mut self.counter);
            if p.prune && score >= self.best {
                continue;
            }
            self.run(depth + 1, score);
            if self.stopped {
                return;
            }
        }
    }
}

#[derive(Clone)]
struct Prefix {
    colors: Vec<u32>,
    depth: usize,
    score: usize,
}

/// Expands the top of the tree breadth-first until there are at least
/// `SPLIT_TASKS` open prefixes. Returns the prefixes and the number of
/// interior nodes expanded.
fn split(problem: &Problem, n_vertices: usize, incumbent: usize) -> (Vec<Prefix>, u64) {
    let mut counter = DistinctCounter::new(problem.k);
    let mut frontier = vec![Prefix {
        colors: vec![0; n_vertices],
        depth: 0,
        score: 0,
    }];
    let mut nodes = 0u64;
    while frontier.len() < SPLIT_TASKS && frontier.iter().any(|p| p.depth < problem.depth()) {
        let mut next = Vec::new();
        for prefix in frontier {
            if prefix.depth == problem.depth() {
                next.push(prefix);
                continue;
            }
            nodes += 1;
            let vertex = problem.order[prefix.depth];
            for &c in &problem.choices[prefix.depth] {
                let mut colors = prefix.colors.clone();
                colors[vertex] = c;
                let score = problem.score_depth(prefix.depth, &colors, prefix.score, &mut counter);
                if problem.prune && score >= incumbent {
                    continue;
                }
                next.push(Prefix {
                    colors,
                    depth: prefix.depth + 1,
                    score,
                });
            }
        }
        frontier = next;
    }
    (frontier, nodes)
}

/// Exhaustive (optionally pruned) minimization of `spec.objective`.
pub fn exhaustive_search(spec: &SearchSpec) -> Result<SearchResult> {
    let (k, q) = (spec.k, spec.q);
    let hg = Hypergraph::new(k, q)?;
    let space_size = search_space_size(k, q)?;
    if !spec.prune && space_size > BigUint::from(spec.node_limit) {
        return Err(Error::SearchSpaceTooLarge {
            size: space_size.to_string(),
            budget: spec.node_limit,
        });
    }
    let lower = spec.objective.lower_bound(k, q)?;
    let initial = spec.objective.initial_labeling(k, q)?;
    let initial_value = spec.objective.evaluate(&initial);
    let stop_at = spec.use_known_bound.then_some(lower);

    if stop_at.is_some_and(|lb| initial_value <= lb) {
        return Ok(SearchResult {
            objective: spec.objective,
            optimum: initial_value,
            witness: initial,
            nodes_visited: 0,
            proven_optimal: true,
            budget_exhausted: false,
            lower_bound_used: lower,
            space_size,
        });
    }

    let problem = Problem::new(&hg, spec.objective, spec.prune);
    let budget = Budget {
        node_limit: spec.node_limit,
        deadline: Instant::now() + spec.time_limit,
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
    };
    let (prefixes, split_nodes) = split(&problem, hg.num_vertices(), initial_value);
    budget.charge(split_nodes);

    let outcomes: Vec<(usize, Option<Vec<u32>>, u64)> = prefixes
        .into_par_iter()
        .map(|prefix| {
            let mut sub = Subtree {
                problem: &problem,
                budget: &budget,
                stop_at,
                colors: prefix.colors,
                best: initial_value,
                best_colors: None,
                nodes: 0,
                unflushed: 0,
                counter: DistinctCounter::new(k),
                stopped: false,
            };
            sub.run(prefix.depth, prefix.score);
            budget.charge(sub.unflushed);
            (sub.best, sub.best_colors, sub.nodes)
        })
        .collect();

    let nodes_visited = split_nodes + outcomes.iter().map(|o| o.2).sum::<u64>();
    let mut best_value = initial_value;
    let mut best_colors: Option<Vec<u32>> = None;
    for (value, colors, _) in outcomes {
        let Some(colors) = colors else { continue };
        let better = value < best_value
            || (value == best_value && best_colors.as_ref().is_some_and(|b| colors < *b));
        if better {
            best_value = value;
            best_colors = Some(colors);
        }
    }
    let witness = match best_colors {
        Some(colors) => Labeling::from_colors(k, q, colors)?,
        None => initial,
    };
    let exhausted = budget.aborted.load(Ordering::Relaxed);
    check_witness(&witness, spec.objective, best_value)?;
    Ok(SearchResult {
        objective: spec.objective,
        optimum: best_value,
        witness,
        nodes_visited,
        proven_optimal: !exhausted || best_value <= lower,
        budget_exhausted: exhausted,
        lower_bound_used: lower,
        space_size,
    })
}

fn check_witness(witness: &Labeling, objective: Objective, value: usize) -> Result<()> {
    if !witness.is_admissible() {
        return Err(Error::InternalInconsistency(
            "search produced an inadmissible witness".into(),
        ));
    }
    let actual = objective.evaluate(witness);
    if actual != value {
        return Err(Error::InternalInconsistency(format!(
            "witness scores {actual}, search reported {value}"
        )));
    }
    Ok(())
}

/// Minimum number of non-monochromatic cells over all admissible labelings.
pub fn exhaustive_min_nonmono(spec: &SearchSpec) -> Result<SearchResult> {
    exhaustive_search(&SearchSpec {
        objective: Objective::MinNonmono,
        ..spec.clone()
    })
}

/// Minimum over admissible labelings of the most colors on any one cell.
pub fn exhaustive_min_max_colors(spec: &SearchSpec) -> Result<SearchResult> {
    exhaustive_search(&SearchSpec {
        objective: Objective::MinMaxColors,
        ..spec.clone()
    })
}

/// Incremental per-cell color counts for local search.
struct LocalState {
    k: usize,
    colors: Vec<u32>,
    /// `counts[cell * (k + 1) + color]`.
    counts: Vec<u32>,
    distinct: Vec<u32>,
    /// Number of cells with each distinct-color count.
    histogram: Vec<usize>,
    /// Cells containing each vertex, flattened with offsets.
    cells_of: Vec<usize>,
    cells_offset: Vec<usize>,
}

impl LocalState {
    fn new(hg: &Hypergraph, colors: Vec<u32>) -> Self {
        let k = hg.k();
        let n_cells = hg.num_cells();
        let mut counts = vec![0u32; n_cells * (k + 1)];
        let mut distinct = vec![0u32; n_cells];
        let mut histogram = vec![0usize; k + 1];
        let mut ranks = vec![0usize; k];
        let mut membership: Vec<Vec<usize>> = vec![Vec::new(); hg.num_vertices()];
        hg.bases().visit(|c, base| {
            hg.cell_vertex_ranks(base, &mut ranks);
            for &r in &ranks {
                membership[r].push(c);
                let slot = &mut counts[c * (k + 1) + colors[r] as usize];
                if *slot == 0 {
                    distinct[c] += 1;
                }
                *slot += 1;
            }
            histogram[distinct[c] as usize] += 1;
        });
        let mut cells_offset = Vec::with_capacity(membership.len() + 1);
        let mut cells_of = Vec::new();
        cells_offset.push(0);
        for m in membership {
            cells_of.extend(m);
            cells_offset.push(cells_of.len());
        }
        LocalState {
            k,
            colors,
            counts,
            distinct,
            histogram,
            cells_of,
            cells_offset,
        }
    }

    /// `(max colors on a cell, number of cells at that max)`, smaller is better.
    fn score(&self) -> (usize, usize) {
        let m = (1..=self.k)
            .rev()
            .find(|&d| self.histogram[d] > 0)
            .unwrap_or(0);
        (m, self.histogram[m])
    }

    fn recolor(&mut self, vertex: usize, color: u32) {
        let old = self.colors[vertex];
        if old == color {
            return;
        }
        let stride = self.k + 1;
        for &c in &self.cells_of[self.cells_offset[vertex]..self.cells_offset[vertex + 1]] {
            let before = self.distinct[c] as usize;
            let o = &mut self.counts[c * stride + old as usize];
            *o -= 1;
            if *o == 0 {
                self.distinct[c] -= 1;
            }
            let n = &mut self.counts[c * stride + color as usize];
            if *n == 0 {
                self.distinct[c] += 1;
            }
            *n += 1;
            let after = self.distinct[c] as usize;
            if before != after {
                self.histogram[before] -= 1;
                self.histogram[after] += 1;
            }
        }
        self.colors[vertex] = color;
    }
}

/// Hill-climbing over single-vertex recolorings with restarts, minimizing
/// the most colors on any cell. Starts from top-coordinate when `k >= 4` and
/// `q >= k^2`, else max-coordinate. Deterministic for a given seed; the
/// result is never marked proven optimal.
pub fn random_restart_min_max_colors(
    k: usize,
    q: u32,
    seed: u64,
    iters: u64,
) -> Result<SearchResult> {
    let objective = Objective::MinMaxColors;
    let hg = Hypergraph::new(k, q)?;
    let lower = objective.lower_bound(k, q)?;
    let initial = objective.initial_labeling(k, q)?;
    let lattice = hg.vertices();
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); lattice.len()];
    lattice.visit(|r, a| {
        lists[r] = (0..k).filter(|&i| a[i] > 0).map(|i| i as u32 + 1).collect();
    });
    let free: Vec<usize> = (0..lists.len()).filter(|&r| lists[r].len() > 1).collect();

    let mut state = LocalState::new(&hg, initial.colors().to_vec());
    let mut best_score = state.score();
    let mut best_colors = state.colors.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stall_limit = (10 * lists.len() as u64).max(1000);
    let kick = (free.len() / 20).max(1);
    let mut stall = 0u64;

    if !free.is_empty() {
        for _ in 0..iters {
            let v = *free.choose(&mut rng).expect("non-empty");
            let old = state.colors[v];
            let c = loop {
                let c = *lists[v].choose(&mut rng).expect("non-empty");
                if c != old {
                    break c;
                }
            };
            let before = state.score();
            state.recolor(v, c);
            let after = state.score();
            if after > before {
                state.recolor(v, old);
            }
            if state.score() < best_score {
                best_score = state.score();
                best_colors.clone_from(&state.colors);
                stall = 0;
            } else {
                stall += 1;
            }
            if stall >= stall_limit {
                stall = 0;
                for (v, &c) in best_colors.iter().enumerate() {
                    state.recolor(v, c);
                }
                for _ in 0..kick {
                    let v = free[rng.random_range(0..free.len())];
                    let c = *lists[v].choose(&mut rng).expect("non-empty");
                    state.recolor(v, c);
                }
            }
        }
    }

    let witness = Labeling::from_colors(k, q, best_colors)?;
    check_witness(&witness, objective, best_score.0)?;
    Ok(SearchResult {
        objective,
        optimum: best_score.0,
        witness,
        nodes_visited: iters,
        proven_optimal: false,
        budget_exhausted: false,
        lower_bound_used: lower,
        space_size: search_space_size(k, q)?,
    })
}

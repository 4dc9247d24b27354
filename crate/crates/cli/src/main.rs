//! `sperner`: command-line access to lattice enumeration, labelings, bound
//! verification, optimal-labeling search, Monte Carlo measures and SVG
//! drawings.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 invalid arguments or
//! out-of-domain input, 3 search budget exhausted (partial result emitted).

mod output;
mod svg;

use std::collections::BTreeMap;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sperner_core::geometry::{
    mc_minkowski_content, mc_square_length, shrink_partition, square_corner_cut_segments,
    square_demo, SimplexPoint, VoronoiSpec,
};
use sperner_core::labeling::{
    compute_stats, compute_stats_with_cells, first_choice, injection_witness, max_coordinate,
    random_admissible, top_coordinate, top_coordinate_unchecked, Labeling, StatsReport,
};
use sperner_core::lattice::{enumerate_down_cells, Hypergraph, SimplexLattice};
use sperner_core::search::{
    exhaustive_search, random_restart_min_max_colors, Objective, SearchResult, SearchSpec,
    DEFAULT_NODE_LIMIT,
};

use output::{resolve_out, Format, Provenance, Report};

#[derive(Parser, Debug)]
#[command(
    name = "sperner",
    version,
    about = "Sperner labelings of simplex lattices and partitions of the simplex"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Output file. Relative paths resolve against $SPERNER_OUT_DIR when set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the vertices, cells or down-cells of H(k,q).
    Enumerate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value = "vertices")]
        what: Items,
    },
    /// Build a labeling. Writes the labeling file to --out, or to stdout
    /// when neither --out nor --stats is given.
    Label {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum)]
        strategy: Strategy,
        /// Apply top-coordinate outside k >= 4, q >= k^2.
        #[arg(long)]
        force: bool,
        /// Print the cell statistics.
        #[arg(long)]
        stats: bool,
    },
    /// Cell statistics of a labeling.
    Stats {
        #[command(flatten)]
        source: Source,
        /// Include the distinct-color count of every cell.
        #[arg(long)]
        cells: bool,
    },
    /// Check the non-monochromatic lower bound and certify it with the
    /// injection of monochromatic cells into V(k,q-2).
    VerifyBound {
        #[command(flatten)]
        source: Source,
    },
    /// Search for a labeling minimizing an objective. Writes the witness
    /// labeling to --out.
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value = "exhaustive")]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        /// Wall-clock budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        /// Enumerate every labeling instead of pruning.
        #[arg(long)]
        no_prune: bool,
        /// Keep searching after the incumbent reaches the known lower bound.
        #[arg(long)]
        no_known_bound: bool,
        /// Local-search iterations.
        #[arg(long, default_value_t = 100_000)]
        iters: u64,
    },
    /// Monte Carlo content of the separating set of a Voronoi-type partition.
    Measure {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Interior base point, comma separated (default: barycenter).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Option<Vec<f64>>,
        /// Check the shrinking construction instead.
        #[arg(long)]
        shrink: bool,
    },
    /// Separating-set lengths of the square partitions.
    SquareDemo {
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.01")]
        deltas: Vec<f64>,
        /// Monte Carlo cross-check of each family length.
        #[arg(long, default_value_t = 0)]
        mc_samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        mc_eps: f64,
    },
    /// SVG drawing of a k = 3 lattice, labeling or Voronoi-type partition.
    Render {
        #[command(flatten)]
        source: Source,
        /// Draw the partition of the triangle instead of the lattice.
        #[arg(long)]
        voronoi: bool,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Option<Vec<f64>>,
    },
}

/// A labeling read from --input or built from --k, --q and --strategy.
#[derive(Args, Debug)]
struct Source {
    #[arg(long, conflicts_with_all = ["k", "q", "strategy"])]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, value_enum)]
    strategy: Option<Strategy>,
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Items {
    Vertices,
    Cells,
    DownCells,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Strategy {
    FirstChoice,
    MaxCoordinate,
    TopCoordinate,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveArg {
    MinNonmono,
    MinMaxColors,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Method {
    Exhaustive,
    Local,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(sperner_core::Error),
    Io(std::io::Error),
}

impl From<sperner_core::Error> for Failure {
    fn from(e: sperner_core::Error) -> Self {
        match e {
            sperner_core::Error::Io(e) => Failure::Io(e),
            e => Failure::Core(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 1,
            Failure::Core(sperner_core::Error::InternalInconsistency(_)) => 1,
            Failure::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .expect("the global pool is configured once");
    }
    let provenance = Provenance::new(cli.seed);
    eprintln!("{}", provenance.header());
    match run(&cli, &provenance) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli, prov: &Provenance) -> Outcome {
    match &cli.command {
        Command::Enumerate { k, q, what } => enumerate(cli, prov, *k, *q, *what),
        Command::Label {
            k,
            q,
            strategy,
            force,
            stats,
        } => label(cli, prov, *k, *q, *strategy, *force, *stats),
        Command::Stats { source, cells } => stats(cli, prov, source, *cells),
        Command::VerifyBound { source } => verify_bound(cli, prov, source),
        Command::Search {
            k,
            q,
            objective,
            method,
            node_limit,
            time_limit,
            no_prune,
            no_known_bound,
            iters,
        } => {
            let objective = match objective {
                ObjectiveArg::MinNonmono => Objective::MinNonmono,
                ObjectiveArg::MinMaxColors => Objective::MinMaxColors,
            };
            if !(time_limit.is_finite() && *time_limit > 0.0) {
                return Err(Failure::Usage("--time-limit must be positive".into()));
            }
            let spec = SearchSpec {
                k: *k,
                q: *q,
                objective,
                node_limit: *node_limit,
                time_limit: Duration::from_secs_f64(*time_limit),
                prune: !no_prune,
                use_known_bound: !no_known_bound,
            };
            search(cli, prov, &spec, *method, *iters)
        }
        Command::Measure {
            k,
            eps,
            samples,
            z,
            shrink,
        } => measure(cli, prov, *k, *eps, *samples, z.as_deref(), *shrink),
        Command::SquareDemo {
            deltas,
            mc_samples,
            mc_eps,
        } => square(cli, prov, deltas, *mc_samples, *mc_eps),
        Command::Render { source, voronoi, z } => render(cli, prov, source, *voronoi, z.as_deref()),
    }
}

/// Writes `report` to --out when given, else to stdout.
fn emit_report(cli: &Cli, report: &Report) -> Result<(), Failure> {
    let bytes = report.render(cli.format)?;
    match &cli.out {
        Some(path) => write_file(path, &bytes).map(|_| ()),
        None => write_stdout(&bytes),
    }
}

fn write_stdout(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)?;
    out.flush()?;
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<PathBuf, Failure> {
    let path = resolve_out(path);
    std::fs::write(&path, bytes)?;
    Ok(path)
}

fn build_labeling(
    k: usize,
    q: u32,
    strategy: Strategy,
    force: bool,
    seed: u64,
) -> Result<Labeling, Failure> {
    let l = match strategy {
        Strategy::FirstChoice => first_choice(k, q)?,
        Strategy::MaxCoordinate => max_coordinate(k, q)?,
        Strategy::TopCoordinate if force => top_coordinate_unchecked(k, q)?,
        Strategy::TopCoordinate => top_coordinate(k, q)?,
        Strategy::Random => random_admissible(k, q, &mut ChaCha8Rng::seed_from_u64(seed))?,
    };
    Ok(l)
}

fn load(source: &Source, seed: u64) -> Result<Labeling, Failure> {
    if let Some(path) = &source.input {
        let file = std::fs::File::open(path)?;
        return Ok(Labeling::read_from(BufReader::new(file))?);
    }
    match (source.k, source.q, source.strategy) {
        (Some(k), Some(q), Some(s)) => build_labeling(k, q, s, source.force, seed),
        _ => Err(Failure::Usage(
            "give --input FILE, or --k, --q and --strategy".into(),
        )),
    }
}

fn enumerate(cli: &Cli, prov: &Provenance, k: usize, q: u32, what: Items) -> Outcome {
    let (kind, items): (&str, Vec<Vec<u32>>) = match what {
        Items::Vertices => (
            "vertices",
            SimplexLattice::new(k, q)?
                .iter()
                .map(|p| p.into_coords())
                .collect(),
        ),
        Items::Cells => {
            if q < 1 {
                return Err(Failure::Usage("cells need q >= 1".into()));
            }
            let hg = Hypergraph::new(k, q)?;
            (
                "cells",
                hg.bases().iter().map(|p| p.into_coords()).collect(),
            )
        }
        Items::DownCells => {
            if k != 3 {
                return Err(Failure::Usage("down-cells are defined for k = 3".into()));
            }
            let cells = enumerate_down_cells(q)?;
            (
                "down_cells",
                cells.iter().map(|c| c.base().coords().to_vec()).collect(),
            )
        }
    };
    #[derive(Serialize)]
    struct Body<'a> {
        k: usize,
        q: u32,
        kind: &'a str,
        count: usize,
        items: &'a [Vec<u32>],
    }
    let header = match what {
        Items::Vertices => (1..=k).map(|i| format!("a{i}")).collect(),
        _ => (1..=k).map(|i| format!("b{i}")).collect(),
    };
    let rows = items
        .iter()
        .map(|p| p.iter().map(u32::to_string).collect())
        .collect();
    let body = Body {
        k,
        q,
        kind,
        count: items.len(),
        items: &items,
    };
    emit_report(cli, &Report::new(prov, &body).with_table(header, rows))?;
    Ok(0)
}

#[derive(Serialize)]
struct LabelBody {
    k: usize,
    q: u32,
    strategy: Strategy,
    file: Option<String>,
    #[serde(flatten)]
    stats: Option<StatsReport>,
}

fn label(
    cli: &Cli,
    prov: &Provenance,
    k: usize,
    q: u32,
    strategy: Strategy,
    force: bool,
    with_stats: bool,
) -> Outcome {
    let l = build_labeling(k, q, strategy, force, cli.seed)?;
    let file = match &cli.out {
        Some(path) => Some(write_file(path, l.to_file_string().as_bytes())?),
        None if !with_stats => {
            write_stdout(l.to_file_string().as_bytes())?;
            return Ok(0);
        }
        None => None,
    };
    let stats = if with_stats {
        Some(compute_stats(&l).report(k, q)?)
    } else {
        None
    };
    let body = LabelBody {
        k,
        q,
        strategy,
        file: file.map(|p| p.display().to_string()),
        stats,
    };
    write_stdout(&Report::new(prov, &body).render(cli.format)?)?;
    Ok(0)
}

fn stats(cli: &Cli, prov: &Provenance, source: &Source, cells: bool) -> Outcome {
    let l = load(source, cli.seed)?;
    let s = if cells {
        compute_stats_with_cells(&l)
    } else {
        compute_stats(&l)
    };
    #[derive(Serialize)]
    struct Body {
        k: usize,
        q: u32,
        #[serde(flatten)]
        report: StatsReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        cell_color_counts: Option<Vec<u32>>,
    }
    let body = Body {
        k: l.k(),
        q: l.q(),
        report: s.report(l.k(), l.q())?,
        cell_color_counts: s.cell_color_counts,
    };
    emit_report(cli, &Report::new(prov, &body))?;
    Ok(0)
}

fn verify_bound(cli: &Cli, prov: &Provenance, source: &Source) -> Outcome {
    let l = load(source, cli.seed)?;
    let stats = compute_stats(&l).report(l.k(), l.q())?;
    let witness = injection_witness(&l)?;
    #[derive(Serialize)]
    struct Body {
        k: usize,
        q: u32,
        admissible: bool,
        mono: u64,
        nonmono: u64,
        bound: u64,
        holds: bool,
        monochromatic_total: usize,
        target_size: usize,
        images_per_color: BTreeMap<String, usize>,
        injective: bool,
    }
    let body = Body {
        k: l.k(),
        q: l.q(),
        admissible: stats.admissible,
        mono: stats.mono,
        nonmono: stats.nonmono,
        bound: stats.bound,
        holds: stats.nonmono >= stats.bound,
        monochromatic_total: witness.monochromatic_total,
        target_size: witness.target_size,
        images_per_color: witness
            .images
            .iter()
            .enumerate()
            .map(|(i, imgs)| ((i + 1).to_string(), imgs.len()))
            .collect(),
        // injection_witness fails rather than return a non-injective map
        injective: true,
    };
    emit_report(cli, &Report::new(prov, &body))?;
    Ok(0)
}

fn search(cli: &Cli, prov: &Provenance, spec: &SearchSpec, method: Method, iters: u64) -> Outcome {
    let result: SearchResult = match method {
        Method::Exhaustive => exhaustive_search(spec)?,
        Method::Local => {
            if spec.objective != Objective::MinMaxColors {
                return Err(Failure::Usage(
                    "local search supports --objective min-max-colors only".into(),
                ));
            }
            random_restart_min_max_colors(spec.k, spec.q, cli.seed, iters)?
        }
    };
    let witness_file = match &cli.out {
        Some(path) => Some(write_file(
            path,
            result.witness.to_file_string().as_bytes(),
        )?),
        None => None,
    };
    #[derive(Serialize)]
    struct Body {
        k: usize,
        q: u32,
        objective: Objective,
        method: Method,
        optimum: usize,
        proven_optimal: bool,
        budget_exhausted: bool,
        nodes_visited: u64,
        bound: usize,
        space_size: String,
        witness_file: Option<String>,
    }
    let body = Body {
        k: spec.k,
        q: spec.q,
        objective: result.objective,
        method,
        optimum: result.optimum,
        proven_optimal: result.proven_optimal,
        budget_exhausted: result.budget_exhausted,
        nodes_visited: result.nodes_visited,
        bound: result.lower_bound_used,
        space_size: result.space_size.to_string(),
        witness_file: witness_file.map(|p| p.display().to_string()),
    };
    write_stdout(&Report::new(prov, &body).render(cli.format)?)?;
    Ok(if result.budget_exhausted { 3 } else { 0 })
}

fn voronoi_spec(k: usize, z: Option<&[f64]>) -> Result<VoronoiSpec, Failure> {
    match z {
        None => Ok(VoronoiSpec::barycenter(k)),
        Some(z) => {
            if z.len() != k {
                return Err(Failure::Usage(format!(
                    "--z has {} entries, expected {k}",
                    z.len()
                )));
            }
            Ok(VoronoiSpec::new(SimplexPoint::new(z.to_vec())?)?)
        }
    }
}

fn measure(
    cli: &Cli,
    prov: &Provenance,
    k: usize,
    eps: f64,
    samples: usize,
    z: Option<&[f64]>,
    shrink: bool,
) -> Outcome {
    if k < 2 {
        return Err(Failure::Usage("--k must be at least 2".into()));
    }
    let spec = voronoi_spec(k, z)?;
    let report = if shrink {
        let r = shrink_partition(&spec, eps)?.verify(samples, cli.seed)?;
        #[derive(Serialize)]
        struct Body {
            z: Vec<f64>,
            seed: u64,
            #[serde(flatten)]
            report: sperner_core::geometry::ShrinkReport,
        }
        Report::new(
            prov,
            &Body {
                z: spec.z().coords().to_vec(),
                seed: cli.seed,
                report: r,
            },
        )
    } else {
        Report::new(prov, &mc_minkowski_content(&spec, eps, samples, cli.seed)?)
    };
    emit_report(cli, &report)?;
    Ok(0)
}

fn square(cli: &Cli, prov: &Provenance, deltas: &[f64], mc_samples: usize, mc_eps: f64) -> Outcome {
    let demo = square_demo(deltas)?;
    #[derive(Serialize)]
    struct Member {
        delta: f64,
        length: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        mc_length: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        mc_std_error: Option<f64>,
    }
    #[derive(Serialize)]
    struct Body {
        voronoi_length: f64,
        diagonal_infimum: f64,
        length_formula: &'static str,
        family: Vec<Member>,
    }
    if mc_samples > 0 && !(mc_eps > 0.0 && mc_eps < 0.5) {
        return Err(Failure::Usage("--mc-eps must lie in (0, 0.5)".into()));
    }
    let mut family = Vec::new();
    for (i, &(delta, length)) in demo.family.iter().enumerate() {
        let (mc_length, mc_std_error) = if mc_samples > 0 {
            let segs = square_corner_cut_segments(delta)?;
            let (est, se) =
                mc_square_length(&segs, mc_eps, mc_samples, cli.seed.wrapping_add(i as u64));
            (Some(est), Some(se))
        } else {
            (None, None)
        };
        family.push(Member {
            delta,
            length,
            mc_length,
            mc_std_error,
        });
    }
    let rows = family
        .iter()
        .map(|m| vec![m.delta.to_string(), m.length.to_string()])
        .collect();
    let body = Body {
        voronoi_length: demo.voronoi_length,
        diagonal_infimum: demo.diagonal_infimum,
        length_formula: "sqrt(2) * (1 + delta)",
        family,
    };
    let mut report = Report::new(prov, &body);
    if cli.format != Format::Json {
        report = report.with_table(vec!["delta".into(), "length".into()], rows);
    }
    emit_report(cli, &report)?;
    Ok(0)
}

fn render(
    cli: &Cli,
    prov: &Provenance,
    source: &Source,
    voronoi: bool,
    z: Option<&[f64]>,
) -> Outcome {
    if source.k.is_some_and(|k| k != 3) {
        return Err(Failure::Usage("render draws k = 3 only".into()));
    }
    let (svg, summary) = if voronoi {
        svg::render_voronoi(&voronoi_spec(3, z)?)
    } else if source.input.is_some() || source.strategy.is_some() {
        let l = load(source, cli.seed)?;
        if l.k() != 3 {
            return Err(Failure::Usage("render draws k = 3 only".into()));
        }
        svg::render_lattice(l.q(), Some(&l))
    } else {
        let q = source
            .q
            .ok_or_else(|| Failure::Usage("give --q, a labeling source or --voronoi".into()))?;
        SimplexLattice::new(3, q)?;
        svg::render_lattice(q, None)
    };
    let Some(path) = &cli.out else {
        write_stdout(svg.as_bytes())?;
        return Ok(0);
    };
    let file = write_file(path, svg.as_bytes())?;
    #[derive(Serialize)]
    struct Body {
        file: String,
        #[serde(flatten)]
        summary: svg::RenderSummary,
    }
    let body = Body {
        file: file.display().to_string(),
        summary,
    };
    write_stdout(&Report::new(prov, &body).render(cli.format)?)?;
    Ok(0)
}

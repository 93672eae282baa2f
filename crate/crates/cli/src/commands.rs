use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use hamsim_core::amplify::{amplification_table, search_cost_report, write_amplification_csv, QueryConvention};
use hamsim_core::decompose::{
    bipartition, color_edges, decompose, graph_laplacian, honeycomb, laplacian_chain, projector_squaring_residual,
    reconstruction_residual, InteractionGraph, SparseHermitian,
};
use hamsim_core::linalg::hermitian_eigenvalues;
use hamsim_core::pauli::bloch_point;
use hamsim_core::search::{bloch_trajectories, equivalence_params, equivalence_residual, projector_terms, SearchInstance};
use hamsim_core::statevector::{first_lobe_steps, peak, success_curve_with, write_curve_csv, DEFAULT_MAX_DIMENSION};
use hamsim_core::trotter::{commutator_error, error_scan, loglog_slope, HermitianTermSet, ScanPoint, DEFAULT_STEP_CAP};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{FileConfig, Format, Lattice, Model};
use crate::error::{invalid, CliError, CliResult};

/// Residual above which an equivalence row counts as a failure.
const EQUIVALENCE_TOLERANCE: f64 = 1e-9;
const ENDPOINT_TOLERANCE: f64 = 1e-9;
/// Allowed ratio of measured Trotter error to `t ‖E⁽²⁾‖ Δt`.
const BOUND_SLACK: f64 = 2.0;
const DEFAULT_SEED: u64 = 1;
/// Largest dimension for which `decompose` checks the dense spectrum.
const SPECTRUM_CHECK_LIMIT: usize = 4096;

/// Settings shared by every subcommand.
pub struct Context {
    pub file: FileConfig,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

impl Context {
    fn format(&self, default: Format) -> Format {
        self.format.or(self.file.format).unwrap_or(default)
    }

    fn json_only(&self, command: &str) -> CliResult<()> {
        match self.format(Format::Json) {
            Format::Json => Ok(()),
            Format::Csv => Err(invalid(format!("{command} writes JSON only"))),
        }
    }
}

/// What a subcommand produced. Output is written even when a check fails.
pub struct Outcome {
    pub body: Vec<u8>,
    /// Secondary document and where it goes (stderr when no path).
    pub report: Option<(Option<PathBuf>, Vec<u8>)>,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn new(body: Vec<u8>) -> Self {
        Self { body, report: None, failure: None }
    }

    fn fail_if(mut self, bad: bool, msg: impl FnOnce() -> String) -> Self {
        if bad && self.failure.is_none() {
            self.failure = Some(CliError::Assertion(msg()));
        }
        self
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s.into_bytes()
}

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(format!("{name} must be positive, got {x}")))
    }
}

fn at_least<T: PartialOrd + std::fmt::Display>(name: &str, x: T, min: T) -> CliResult<T> {
    if x >= min {
        Ok(x)
    } else {
        Err(invalid(format!("{name} must be at least {min}, got {x}")))
    }
}

fn search_instance(n: u64) -> CliResult<SearchInstance> {
    Ok(SearchInstance::new(at_least("N", n, 2)?)?)
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    /// Database size N.
    #[arg(long)]
    pub n: Option<u64>,
    /// Evenly spaced times in [0, T].
    #[arg(long)]
    pub samples: Option<usize>,
}

pub fn trajectory(args: &TrajectoryArgs, ctx: &Context) -> CliResult<Outcome> {
    let n = args.n.or(ctx.file.single_n()?).unwrap_or(16);
    let samples = at_least("samples", args.samples.or(ctx.file.samples).unwrap_or(101), 2)?;
    let inst = search_instance(n)?;
    let points = bloch_trajectories(&inst, samples)?;

    let source = bloch_point(&inst.source_state())?;
    let target = [0.0, 0.0, 1.0];
    let dist = |a: &[f64; 3], b: &[f64; 3]| (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
    let (first, last) = (&points[0], &points[points.len() - 1]);
    let endpoint = [
        dist(&first.continuous, &source),
        dist(&first.discrete, &source),
        dist(&last.continuous, &target),
        dist(&last.discrete, &target),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let sphere = points
        .iter()
        .flat_map(|p| [p.continuous, p.discrete])
        .map(|r| (dist(&r, &[0.0; 3]) - 1.0).abs())
        .fold(0.0, f64::max);

    let body = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("t,x_C,y_C,z_C,x_G,y_G,z_G\n");
            for p in &points {
                let c = p.continuous;
                let g = p.discrete;
                let cols = [p.t, c[0], c[1], c[2], g[0], g[1], g[2]].map(num);
                writeln!(s, "{}", cols.join(",")).unwrap();
            }
            s.into_bytes()
        }
        Format::Json => to_json(&json!({ "n": n, "T": inst.search_time(), "points": points })),
    };
    Ok(Outcome::new(body)
        .fail_if(endpoint > ENDPOINT_TOLERANCE, || format!("endpoints off |s>/|t> by {endpoint:e}"))
        .fail_if(sphere > ENDPOINT_TOLERANCE, || format!("trajectory leaves the unit sphere by {sphere:e}")))
}

#[derive(Debug, Args)]
pub struct EquivalenceArgs {
    /// Database sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    /// Grid points per N on [0, T].
    #[arg(long)]
    pub points: Option<usize>,
    /// Explicit times instead of the grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct EquivalenceRow {
    n: u64,
    t: f64,
    qt: f64,
    beta: f64,
    residual: f64,
    in_domain: bool,
}

pub fn equivalence(args: &EquivalenceArgs, ctx: &Context) -> CliResult<Outcome> {
    let ns = args
        .n
        .clone()
        .or(ctx.file.n.clone().map(|v| v.into_vec()))
        .unwrap_or_else(|| vec![4, 16, 64, 256, 1024]);
    let times = args.t.clone().or(ctx.file.t.clone().map(|v| v.into_vec()));
    let points = at_least("points", args.points.or(ctx.file.points).unwrap_or(20), 2)?;
    if ns.is_empty() {
        return Err(invalid("no N given"));
    }
    let instances = ns.iter().map(|&n| search_instance(n)).collect::<CliResult<Vec<_>>>()?;
    if let Some(ts) = &times {
        if let Some(bad) = ts.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(invalid(format!("t must be non-negative, got {bad}")));
        }
    }

    let rows: Vec<EquivalenceRow> = instances
        .par_iter()
        .map(|inst| {
            let grid: Vec<f64> = match &times {
                Some(ts) => ts.clone(),
                None => (0..points)
                    .map(|k| inst.search_time() * k as f64 / (points - 1) as f64)
                    .collect(),
            };
            grid.into_iter()
                .map(|t| match equivalence_params(inst, t) {
                    Ok(p) => EquivalenceRow {
                        n: inst.size(),
                        t,
                        qt: p.qt,
                        beta: p.beta,
                        residual: equivalence_residual(inst, t).expect("t checked above"),
                        in_domain: true,
                    },
                    Err(_) => EquivalenceRow {
                        n: inst.size(),
                        t,
                        qt: f64::NAN,
                        beta: f64::NAN,
                        residual: f64::NAN,
                        in_domain: false,
                    },
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let outside: Vec<&EquivalenceRow> = rows.iter().filter(|r| !r.in_domain).collect();
    for r in &outside {
        log::warn!("N={} t={} lies outside [0, T]; row left as NaN", r.n, r.t);
    }
    let worst = rows.iter().filter(|r| r.in_domain).map(|r| r.residual).fold(0.0, f64::max);

    let body = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("N,t,Q_t,beta,residual\n");
            for r in &rows {
                writeln!(s, "{},{},{},{},{}", r.n, num(r.t), num(r.qt), num(r.beta), num(r.residual)).unwrap();
            }
            s.into_bytes()
        }
        Format::Json => to_json(&json!({ "rows": rows, "max_residual": worst })),
    };
    let mut out = Outcome::new(body).fail_if(worst > EQUIVALENCE_TOLERANCE, || {
        format!("residual {worst:e} exceeds {EQUIVALENCE_TOLERANCE:e}")
    });
    if out.failure.is_none() && !outside.is_empty() {
        out.failure = Some(invalid(format!("{} time(s) outside [0, T]", outside.len())));
    }
    Ok(out)
}

/// Lattice selection shared by `trotter-scan` and `decompose`.
#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Sites of a chain or ring.
    #[arg(long)]
    pub size: Option<usize>,
    /// Honeycomb width.
    #[arg(long)]
    pub lx: Option<usize>,
    /// Honeycomb height.
    #[arg(long)]
    pub ly: Option<usize>,
    /// Wrap the honeycomb periodically.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub periodic: Option<bool>,
}

fn build_lattice(kind: Lattice, args: &LatticeArgs, file: &FileConfig) -> CliResult<(SparseHermitian, InteractionGraph)> {
    let size = args.size.or(file.size).unwrap_or(16);
    Ok(match kind {
        Lattice::Chain => laplacian_chain(size, false)?,
        Lattice::Ring => laplacian_chain(size, true)?,
        Lattice::Honeycomb => honeycomb(
            args.lx.or(file.lx).unwrap_or(6),
            args.ly.or(file.ly).unwrap_or(4),
            args.periodic.or(file.periodic).unwrap_or(false),
        )?,
    })
}

#[derive(Debug, Args)]
pub struct TrotterScanArgs {
    /// Built-in term set.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Term-set JSON file, overrides --model.
    #[arg(long)]
    pub terms: Option<PathBuf>,
    /// Database size for the search model.
    #[arg(long)]
    pub n: Option<u64>,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Total evolution time (search default: T).
    #[arg(long)]
    pub t: Option<f64>,
    /// Requested steps, comma separated, at least 4.
    #[arg(long, value_delimiter = ',')]
    pub dt: Option<Vec<f64>>,
    #[arg(long)]
    pub step_cap: Option<u64>,
}

pub fn trotter_scan(args: &TrotterScanArgs, ctx: &Context) -> CliResult<Outcome> {
    let file = &ctx.file;
    let t_given = args.t.or(file.single_t()?);
    let (set, default_t) = match args.terms.as_ref().or(file.terms.as_ref()) {
        Some(path) => {
            let set = HermitianTermSet::load(path).map_err(|e| CliError::io(path, e))??;
            (set, None)
        }
        None => match args.model.or(file.model).unwrap_or(Model::Search) {
            Model::Search => {
                let inst = search_instance(args.n.or(file.single_n()?).unwrap_or(16))?;
                (projector_terms(&inst), Some(inst.search_time()))
            }
            m => {
                let kind = match m {
                    Model::Chain => Lattice::Chain,
                    Model::Ring => Lattice::Ring,
                    _ => Lattice::Honeycomb,
                };
                let (h, g) = build_lattice(kind, &args.lattice, file)?;
                (decompose(&h, &g, &color_edges(&g)?)?, Some(2.0))
            }
        },
    };
    let t = match t_given.or(default_t) {
        Some(t) => positive("t", t)?,
        None => return Err(invalid("t is required with a term-set file")),
    };
    let grid = args.dt.clone().or(file.dt.clone()).unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]);
    if grid.len() < 4 {
        return Err(invalid(format!("need at least 4 step sizes, got {}", grid.len())));
    }
    for &dt in &grid {
        positive("dt", dt)?;
    }
    let cap = at_least("step_cap", args.step_cap.or(file.step_cap).unwrap_or(DEFAULT_STEP_CAP), 1)?;

    let scan: Vec<ScanPoint> = grid
        .par_iter()
        .map(|&dt| error_scan(&set, t, &[dt], cap).map(|v| v[0]))
        .collect::<Result<_, _>>()?;
    let norm = commutator_error(&set).norm_e2;
    let slope = loglog_slope(&scan);
    let worst_ratio = scan.iter().filter(|p| p.bound > 0.0).map(|p| p.error / p.bound).fold(0.0, f64::max);

    let footer = json!({
        "t": t,
        "norm_e2": norm,
        "slope": slope,
        "max_error_over_bound": worst_ratio,
        "terms": set.labels(),
    });
    let body = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("dt,n,error,bound\n");
            for p in &scan {
                writeln!(s, "{},{},{},{}", num(p.dt), p.steps, num(p.error), num(p.bound)).unwrap();
            }
            writeln!(s, "# {footer}").unwrap();
            s.into_bytes()
        }
        Format::Json => to_json(&json!({ "summary": footer, "points": scan })),
    };
    let mut out = Outcome::new(body);
    if norm > 0.0 {
        let s = slope.unwrap_or(f64::NAN);
        out = out
            .fail_if(!(0.9..=1.1).contains(&s), || format!("fitted slope {s} outside [0.9, 1.1]"))
            .fail_if(worst_ratio > BOUND_SLACK, || {
                format!("error reaches {worst_ratio:.3} times t‖E2‖Δt, allowed {BOUND_SLACK}")
            });
    }
    Ok(out)
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long, value_enum)]
    pub lattice: Option<Lattice>,
    /// Interaction-graph JSON; the Hamiltonian is its Laplacian.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub dims: LatticeArgs,
    /// Where to write the validation report (default stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct TermReport {
    label: String,
    entries: usize,
    /// `max |T² − 2T|` for unit-weight edge terms.
    squaring_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SpectrumCheck {
    formula: &'static str,
    max_deviation: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct DecomposeReport {
    vertices: usize,
    edges: usize,
    max_degree: usize,
    bipartite: bool,
    color_count: usize,
    terms: Vec<TermReport>,
    reconstruction_residual: f64,
    spectrum_check: Option<SpectrumCheck>,
}

fn spectrum_check(h: &SparseHermitian, kind: Lattice) -> CliResult<Option<SpectrumCheck>> {
    let l = h.dim();
    if l > SPECTRUM_CHECK_LIMIT {
        return Ok(None);
    }
    let (formula, mut expected): (&'static str, Vec<f64>) = match kind {
        Lattice::Ring => (
            "4 sin^2(pi j / L), j = 0..L-1",
            (0..l).map(|j| 4.0 * (std::f64::consts::PI * j as f64 / l as f64).sin().powi(2)).collect(),
        ),
        Lattice::Chain => (
            "4 sin^2(pi j / (2(L+1))), j = 1..L",
            (1..=l)
                .map(|j| 4.0 * (std::f64::consts::PI * j as f64 / (2.0 * (l + 1) as f64)).sin().powi(2))
                .collect(),
        ),
        Lattice::Honeycomb => return Ok(None),
    };
    let mut actual = hermitian_eigenvalues(&h.to_dense())?;
    actual.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    let dev = actual.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Some(SpectrumCheck { formula, max_deviation: dev, passed: dev < 1e-10 }))
}

pub fn decompose_cmd(args: &DecomposeArgs, ctx: &Context) -> CliResult<Outcome> {
    ctx.json_only("decompose")?;
    let file = &ctx.file;
    let (h, g, kind) = match args.graph.as_ref().or(file.graph.as_ref()) {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let g = InteractionGraph::from_json(&text)?;
            (graph_laplacian(&g), g, None)
        }
        None => {
            let kind = args.lattice.or(file.lattice).unwrap_or(Lattice::Ring);
            let (h, g) = build_lattice(kind, &args.dims, file)?;
            (h, g, Some(kind))
        }
    };
    let coloring = color_edges(&g).map_err(|e| CliError::Assertion(format!("edge coloring failed: {e}")))?;
    let set = decompose(&h, &g, &coloring)?;

    let unit = g.edges().iter().all(|e| e.weight == 1.0);
    let terms: Vec<TermReport> = set
        .terms()
        .iter()
        .map(|t| TermReport {
            label: t.label.clone(),
            entries: t.entries().len(),
            squaring_residual: (unit && t.label != "diagonal")
                .then(|| projector_squaring_residual(&t.to_dense(set.dimension()))),
        })
        .collect();
    let report = DecomposeReport {
        vertices: g.vertex_count(),
        edges: g.edges().len(),
        max_degree: g.max_degree(),
        bipartite: bipartition(&g).is_some(),
        color_count: coloring.color_count,
        reconstruction_residual: reconstruction_residual(&h, &set),
        spectrum_check: match kind {
            Some(k) => spectrum_check(&h, k)?,
            None => None,
        },
        terms,
    };

    let squaring = report.terms.iter().filter_map(|t| t.squaring_residual).fold(0.0, f64::max);
    let residual = report.reconstruction_residual;
    let spectrum_ok = report.spectrum_check.as_ref().is_none_or(|c| c.passed);
    let mut out = Outcome::new(format!("{}\n", set.to_json()?).into_bytes())
        .fail_if(residual > 1e-12, || format!("terms miss H by {residual:e}"))
        .fail_if(squaring > 1e-12, || format!("T² ≠ 2T by {squaring:e}"))
        .fail_if(!spectrum_ok, || "spectrum differs from the closed form".to_string());
    out.report = Some((args.report.clone().or(file.report.clone()), to_json(&report)));
    Ok(out)
}

#[derive(Debug, Args)]
pub struct GroverArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Steps to simulate (default: the first rise and fall).
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub target: Option<usize>,
    /// Odd repetition counts for the majority-vote table, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub runs: Option<Vec<u64>>,
    /// Monte Carlo trials per repetition count.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub max_dimension: Option<usize>,
}

pub fn grover(args: &GroverArgs, ctx: &Context) -> CliResult<Outcome> {
    let file = &ctx.file;
    let n = args.n.or(file.single_n()?.map(|n| n as usize)).unwrap_or(16);
    let inst = search_instance(n as u64)?;
    let max_steps = at_least("max_steps", args.max_steps.or(file.max_steps).unwrap_or_else(|| first_lobe_steps(&inst)), 1)?;
    let target = args.target.or(file.target).unwrap_or(0);
    let cap = args.max_dimension.or(file.max_dimension).unwrap_or(DEFAULT_MAX_DIMENSION);
    let runs = args.runs.clone().or(file.runs.clone());
    let trials = args.trials.or(file.trials).unwrap_or(100_000);
    let seed = ctx.seed.or(file.seed).unwrap_or(DEFAULT_SEED);

    let curve = success_curve_with(n, target, max_steps, cap)?;
    let best = peak(&curve).expect("curve has at least two points");
    let table = match &runs {
        Some(rs) => Some(amplification_table(1.0 / n as f64, rs, trials, seed)?),
        None => None,
    };

    let body = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_curve_csv(&mut buf, &curve).expect("writing to memory");
            if let Some(rows) = &table {
                buf.push(b'\n');
                write_amplification_csv(&mut buf, rows).expect("writing to memory");
            }
            buf
        }
        Format::Json => to_json(&json!({
            "n": n,
            "target": target,
            "integer_steps": inst.integer_steps(),
            "peak": best,
            "curve": curve,
            "amplification": table,
            "seed": seed,
        })),
    };
    let floor = 1.0 - 1.0 / n as f64;
    let covered = max_steps >= inst.integer_steps();
    if !covered {
        log::warn!("curve stops before step {}; peak check skipped", inst.integer_steps());
    }
    Ok(Outcome::new(body).fail_if(covered && best.probability < floor, || {
        format!("peak probability {} below 1 - 1/N = {floor}", best.probability)
    }))
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[arg(long)]
    pub n: Option<u64>,
    /// Evolution time (default: T).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Measured per-run failure probability instead of 1/N.
    #[arg(long)]
    pub per_run_error: Option<f64>,
    #[arg(long)]
    pub queries_per_trotter_step: Option<f64>,
    #[arg(long)]
    pub queries_per_grover_step: Option<f64>,
}

pub fn cost(args: &CostArgs, ctx: &Context) -> CliResult<Outcome> {
    ctx.json_only("cost")?;
    let file = &ctx.file;
    let inst = search_instance(args.n.or(file.single_n()?).unwrap_or(1024))?;
    let t = positive("t", args.t.or(file.single_t()?).unwrap_or_else(|| inst.search_time()))?;
    let epsilon = args.epsilon.or(file.epsilon).unwrap_or(1e-6);
    let per_run = args.per_run_error.or(file.per_run_error);
    let defaults = QueryConvention::default();
    let convention = QueryConvention {
        per_trotter_step: positive(
            "queries_per_trotter_step",
            args.queries_per_trotter_step.or(file.queries_per_trotter_step).unwrap_or(defaults.per_trotter_step),
        )?,
        per_grover_step: positive(
            "queries_per_grover_step",
            args.queries_per_grover_step.or(file.queries_per_grover_step).unwrap_or(defaults.per_grover_step),
        )?,
    };
    let norm = commutator_error(&projector_terms(&inst)).norm_e2;
    let report = search_cost_report(inst.size(), t, epsilon, norm, convention, per_run)?;
    Ok(Outcome::new(to_json(&report)))
}

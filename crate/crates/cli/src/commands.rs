//! Command implementations and emitters.
//!
//! Output is deterministic: JSON objects keep sorted keys (serde_json's
//! default map) with shortest-round-trip floats; CSV uses fixed 17
//! significant digit scientific notation.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nalgebra::DMatrix;
use periodic_spectra::*;
use serde_json::{json, Value};

pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PowerCapExceeded { .. } | Error::OracleCapExceeded { .. } => 3,
            Error::EigensolverFailure => 4,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<(), CliError>;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args)]
pub struct GraphSource {
    /// Built-in graph: square, kagome, zline, gp (with --p) or g<p>
    #[arg(long, conflicts_with = "graph")]
    example: Option<String>,

    /// Chord length for the gp builtin
    #[arg(long)]
    p: Option<usize>,

    /// Path to a JSON graph document
    #[arg(long)]
    graph: Option<PathBuf>,

    /// Replace vertex potentials (comma separated, by vertex order)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    potential: Option<Vec<f64>>,
}

impl GraphSource {
    fn load(&self) -> std::result::Result<(FundamentalGraph, String), CliError> {
        let (graph, label) = match (&self.example, &self.graph) {
            (Some(name), None) => {
                let resolved = if name == "gp" {
                    let p = self
                        .p
                        .ok_or_else(|| CliError::input("--example gp requires --p"))?;
                    format!("g{p}")
                } else {
                    name.clone()
                };
                let g = builtin_graph(&resolved).ok_or_else(|| {
                    CliError::input(format!("unknown builtin graph `{resolved}`"))
                })?;
                (g, resolved)
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                let doc: GraphDocument = serde_json::from_str(&text)
                    .map_err(|e| CliError::input(format!("invalid graph document: {e}")))?;
                let g = FundamentalGraph::from_document(&doc)?;
                (g, path.display().to_string())
            }
            _ => {
                return Err(CliError::input(
                    "exactly one of --example or --graph is required",
                ))
            }
        };
        match &self.potential {
            Some(values) => Ok((graph.with_potentials(values)?, label)),
            None => Ok((graph, label)),
        }
    }
}

#[derive(Args)]
pub struct ComputeLimits {
    /// Cap for symbolic matrix powers
    #[arg(long, default_value_t = 12)]
    power_cap: usize,

    /// Cap for exhaustive cycle enumeration
    #[arg(long, default_value_t = 8)]
    oracle_cap: usize,

    /// Per-dimension grid for operator-norm estimates and quadrature oracles
    #[arg(long, default_value_t = 16)]
    grid: usize,
}

impl ComputeLimits {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            power_cap: self.power_cap,
            oracle_cap: self.oracle_cap,
            norm_grid: self.grid,
        }
    }
}

#[derive(Args)]
pub struct OutputTarget {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,

    /// Output path (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputTarget {
    fn emit(&self, json: Value, csv: String) -> CliResult {
        let bytes = match self.format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&json)
                    .map_err(|e| CliError::input(e.to_string()))?;
                text.push('\n');
                text.into_bytes()
            }
            Format::Csv => csv.into_bytes(),
        };
        match &self.output {
            Some(path) => std::fs::write(path, bytes)?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }
}

fn parse_k(spec: &Option<String>, dimension: usize) -> std::result::Result<Vec<f64>, CliError> {
    let Some(spec) = spec else {
        return Ok(vec![0.0; dimension]);
    };
    let parts: std::result::Result<Vec<f64>, _> =
        spec.split(',').map(|p| p.trim().parse()).collect();
    let k = parts.map_err(|_| CliError::input(format!("cannot parse quasimomentum `{spec}`")))?;
    if k.len() != dimension {
        return Err(CliError::input(format!(
            "quasimomentum has {} components but the graph dimension is {dimension}",
            k.len()
        )));
    }
    Ok(k)
}

/// 17 significant digits, fixed scientific notation.
fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn json_complex(z: Complex64) -> Value {
    json!({ "re": json_float(z.re), "im": json_float(z.im) })
}

fn grid_points(dimension: usize, m: usize) -> Vec<Vec<f64>> {
    let total = m.pow(dimension as u32);
    (0..total)
        .map(|mut flat| {
            let mut k = vec![0.0; dimension];
            for coord in k.iter_mut() {
                *coord = 2.0 * std::f64::consts::PI * (flat % m) as f64 / m as f64;
                flat /= m;
            }
            k
        })
        .collect()
}

#[derive(Args)]
pub struct TracesArgs {
    #[command(flatten)]
    source: GraphSource,

    #[arg(long, value_enum, default_value = "adjacency")]
    kind: OperatorKind,

    /// Trace power; repeat for several powers
    #[arg(long = "n", required = true)]
    powers: Vec<usize>,

    #[command(flatten)]
    limits: ComputeLimits,

    #[command(flatten)]
    out: OutputTarget,
}

pub fn traces(args: TracesArgs) -> CliResult {
    let (graph, label) = args.source.load()?;
    let config = args.limits.config();
    let mut results = Vec::new();
    let mut csv = String::new();
    let d = graph.dimension();
    csv.push_str("n,");
    csv.push_str(&(1..=d).map(|j| format!("m_{j}")).collect::<Vec<_>>().join(","));
    csv.push_str(",coefficient\n");
    for &n in &args.powers {
        let series = trace_series(&graph, args.kind, n, &config)?;
        let mut entry = series.to_json();
        entry["regularized_trace"] = json_float(series.constant_term());
        results.push(entry);
        for (m, c) in series.coefficients() {
            let key = m
                .components()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            csv.push_str(&format!("{n},{key},{}\n", csv_float(*c)));
        }
    }
    let json = json!({
        "graph": label,
        "kind": args.kind.as_str(),
        "dimension": d,
        "results": results,
    });
    args.out.emit(json, csv)
}

#[derive(Args)]
pub struct BandsArgs {
    #[command(flatten)]
    source: GraphSource,

    #[arg(long, value_enum, default_value = "adjacency")]
    kind: OperatorKind,

    /// Samples per dimension
    #[arg(long, default_value_t = 32)]
    grid: usize,

    #[command(flatten)]
    out: OutputTarget,
}

pub fn bands(args: BandsArgs) -> CliResult {
    let (graph, label) = args.source.load()?;
    let band = band_structure(&graph, args.kind, args.grid)?;

    let bound = (args.kind == OperatorKind::Schrodinger).then(|| {
        let report = bandwidth_bound_check(&graph, &band);
        json!({
            "total_bandwidth": json_float(report.total_bandwidth),
            "lower_bound": json_float(report.lower_bound),
            "v_star": json_float(report.v_star),
            "satisfied": report.satisfied,
        })
    });
    let json = json!({
        "graph": label,
        "kind": args.kind.as_str(),
        "dimension": band.dimension,
        "grid": band.grid,
        "bands": band.bands.iter().map(|b| json!({
            "min": json_float(b.min),
            "max": json_float(b.max),
            "flat": b.flat,
        })).collect::<Vec<_>>(),
        "total_bandwidth": json_float(band.total_bandwidth),
        "bandwidth_bound": bound,
        "endpoint_note": "band endpoints are sampled extrema; resolution O(1/grid)",
    });

    let nu = graph.num_vertices();
    let mut csv = String::new();
    csv.push_str(
        &(1..=band.dimension)
            .map(|j| format!("k_{j}"))
            .chain((1..=nu).map(|j| format!("lambda_{j}")))
            .collect::<Vec<_>>()
            .join(","),
    );
    csv.push('\n');
    for sample in &band.samples {
        let row: Vec<String> = sample
            .k
            .iter()
            .chain(sample.eigenvalues.iter())
            .map(|&x| csv_float(x))
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    args.out.emit(json, csv)
}

struct ExpansionRow {
    parameter: f64,
    approx: SeriesApprox,
    oracle: Complex64,
}

fn expansion_output(
    label: &str,
    kind: OperatorKind,
    parameter_name: &str,
    extra: Value,
    rows: Vec<ExpansionRow>,
    out: &OutputTarget,
) -> CliResult {
    let mut csv = format!(
        "{parameter_name},value_re,value_im,truncation,tail_bound,oracle_re,oracle_im,abs_error\n"
    );
    let mut entries = Vec::new();
    for row in &rows {
        let abs_error = (row.approx.value - row.oracle).norm();
        entries.push(json!({
            parameter_name: json_float(row.parameter),
            "value": json_complex(row.approx.value),
            "truncation": row.approx.truncation,
            "tail_bound": json_float(row.approx.tail_bound),
            "oracle_value": json_complex(row.oracle),
            "abs_error": json_float(abs_error),
        }));
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            csv_float(row.parameter),
            csv_float(row.approx.value.re),
            csv_float(row.approx.value.im),
            row.approx.truncation,
            csv_float(row.approx.tail_bound),
            csv_float(row.oracle.re),
            csv_float(row.oracle.im),
            csv_float(abs_error),
        ));
    }
    let mut json = json!({
        "graph": label,
        "kind": kind.as_str(),
        "results": entries,
    });
    if let Value::Object(extra) = extra {
        if let Value::Object(map) = &mut json {
            map.extend(extra);
        }
    }
    out.emit(json, csv)
}

#[derive(Args)]
pub struct HeatArgs {
    #[command(flatten)]
    source: GraphSource,

    #[arg(long, value_enum, default_value = "schrodinger")]
    kind: OperatorKind,

    /// Time parameter; repeat for a sweep
    #[arg(long = "t", required = true, allow_hyphen_values = true)]
    times: Vec<f64>,

    /// Quasimomentum, comma separated (defaults to 0)
    #[arg(long)]
    k: Option<String>,

    /// Truncation order of the power series
    #[arg(long, default_value_t = 12)]
    n_max: usize,

    /// Average over the Brillouin zone instead of a single quasimomentum
    #[arg(long)]
    integrated: bool,

    #[command(flatten)]
    limits: ComputeLimits,

    #[command(flatten)]
    out: OutputTarget,
}

pub fn heat(args: HeatArgs) -> CliResult {
    let (graph, label) = args.source.load()?;
    let config = args.limits.config();
    let engine = ExpansionEngine::new(&graph, args.kind, args.n_max, &config)?;
    let k = parse_k(&args.k, graph.dimension())?;
    let oracle_grid = grid_points(graph.dimension(), args.limits.grid);
    let mut rows = Vec::new();
    for &t in &args.times {
        let tc = Complex64::new(t, 0.0);
        let (approx, oracle) = if args.integrated {
            let approx = engine.heat_trace_integrated(tc)?;
            let mut sum = 0.0;
            for point in &oracle_grid {
                sum += eigenvalues_at(&graph, args.kind, point)?
                    .iter()
                    .map(|l| (t * l).exp())
                    .sum::<f64>();
            }
            (approx, Complex64::new(sum / oracle_grid.len() as f64, 0.0))
        } else {
            let approx = engine.heat_trace(tc, &k)?;
            let oracle: f64 = eigenvalues_at(&graph, args.kind, &k)?
                .iter()
                .map(|l| (t * l).exp())
                .sum();
            (approx, Complex64::new(oracle, 0.0))
        };
        rows.push(ExpansionRow {
            parameter: t,
            approx,
            oracle,
        });
    }
    let extra = json!({ "k": k, "integrated": args.integrated, "n_max": args.n_max });
    expansion_output(&label, args.kind, "t", extra, rows, &args.out)
}

#[derive(Args)]
pub struct ResolventArgs {
    #[command(flatten)]
    source: GraphSource,

    #[arg(long, value_enum, default_value = "schrodinger")]
    kind: OperatorKind,

    /// Spectral parameter; repeat for a sweep (must lie outside the
    /// spectrum)
    #[arg(long = "lambda", required = true, allow_hyphen_values = true)]
    lambdas: Vec<f64>,

    /// Quasimomentum, comma separated (defaults to 0)
    #[arg(long)]
    k: Option<String>,

    /// Truncation order of the power series
    #[arg(long, default_value_t = 12)]
    n_max: usize,

    /// Average over the Brillouin zone instead of a single quasimomentum
    #[arg(long)]
    integrated: bool,

    #[command(flatten)]
    limits: ComputeLimits,

    #[command(flatten)]
    out: OutputTarget,
}

pub fn resolvent(args: ResolventArgs) -> CliResult {
    let (graph, label) = args.source.load()?;
    let config = args.limits.config();
    let engine = ExpansionEngine::new(&graph, args.kind, args.n_max, &config)?;
    let k = parse_k(&args.k, graph.dimension())?;
    let oracle_grid = grid_points(graph.dimension(), args.limits.grid);
    let mut rows = Vec::new();
    for &lambda in &args.lambdas {
        let lc = Complex64::new(lambda, 0.0);
        let (approx, oracle) = if args.integrated {
            let approx = engine.resolvent_trace_integrated(lc)?;
            let mut sum = 0.0;
            for point in &oracle_grid {
                sum += eigenvalues_at(&graph, args.kind, point)?
                    .iter()
                    .map(|l| 1.0 / (l - lambda))
                    .sum::<f64>();
            }
            (approx, Complex64::new(sum / oracle_grid.len() as f64, 0.0))
        } else {
            let approx = engine.resolvent_trace(lc, &k)?;
            let oracle: f64 = eigenvalues_at(&graph, args.kind, &k)?
                .iter()
                .map(|l| 1.0 / (l - lambda))
                .sum();
            (approx, Complex64::new(oracle, 0.0))
        };
        rows.push(ExpansionRow {
            parameter: lambda,
            approx,
            oracle,
        });
    }
    let extra = json!({ "k": k, "integrated": args.integrated, "n_max": args.n_max });
    expansion_output(&label, args.kind, "lambda", extra, rows, &args.out)
}

#[derive(Args)]
pub struct DetArgs {
    #[command(flatten)]
    source: GraphSource,

    #[arg(long, value_enum, default_value = "schrodinger")]
    kind: OperatorKind,

    /// Determinant parameter; repeat for a sweep (inside the convergence
    /// radius)
    #[arg(long = "t", required = true, allow_hyphen_values = true)]
    times: Vec<f64>,

    /// Quasimomentum, comma separated (defaults to 0)
    #[arg(long)]
    k: Option<String>,

    /// Largest prime-cycle length kept in the product
    #[arg(long, default_value_t = 8)]
    length_cap: usize,

    /// Compute the renormalized log-determinant (zero-index classes,
    /// Brillouin average) instead of the fiber determinant
    #[arg(long)]
    gamma: bool,

    #[command(flatten)]
    limits: ComputeLimits,

    #[command(flatten)]
    out: OutputTarget,
}

pub fn det(args: DetArgs) -> CliResult {
    let (graph, label) = args.source.load()?;
    let config = args.limits.config();
    let k = parse_k(&args.k, graph.dimension())?;
    let oracle_grid = grid_points(graph.dimension(), args.limits.grid);
    let mut rows = Vec::new();
    for &t in &args.times {
        let tc = Complex64::new(t, 0.0);
        let (approx, oracle) = if args.gamma {
            let approx = gamma_log_determinant(&graph, args.kind, tc, args.length_cap, &config)?;
            let mut sum = 0.0;
            for point in &oracle_grid {
                sum += eigenvalues_at(&graph, args.kind, point)?
                    .iter()
                    .map(|l| (1.0 - t * l).ln())
                    .sum::<f64>();
            }
            (approx, Complex64::new(sum / oracle_grid.len() as f64, 0.0))
        } else {
            let approx = determinant_product(&graph, args.kind, tc, &k, args.length_cap, &config)?;
            let matrix = fiber_matrix_numeric(&graph, args.kind, &k)?;
            let nu = matrix.nrows();
            let direct = (DMatrix::<Complex64>::identity(nu, nu) - matrix * tc).determinant();
            (approx, direct)
        };
        rows.push(ExpansionRow {
            parameter: t,
            approx,
            oracle,
        });
    }
    let extra = json!({
        "k": k,
        "gamma": args.gamma,
        "length_cap": args.length_cap,
        "certified_radius": json_float(certified_product_radius(&graph, args.kind)?),
    });
    expansion_output(&label, args.kind, "t", extra, rows, &args.out)
}

#[derive(Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    source: GraphSource,

    /// Zeta argument; repeat for a sweep
    #[arg(long = "u", required = true, allow_hyphen_values = true)]
    us: Vec<f64>,

    /// Largest prime-cycle length kept in the product
    #[arg(long, default_value_t = 8)]
    length_cap: usize,

    /// Also evaluate the adjacency L-function at the quasimomentum
    #[arg(long)]
    l_function: bool,

    /// Quasimomentum for the L-function, comma separated (defaults to 0)
    #[arg(long)]
    k: Option<String>,

    #[command(flatten)]
    limits: ComputeLimits,

    #[command(flatten)]
    out: OutputTarget,
}

pub fn zeta(args: ZetaArgs) -> CliResult {
    let (graph, label) = args.source.load()?;
    let config = args.limits.config();
    let k = parse_k(&args.k, graph.dimension())?;
    let mut entries = Vec::new();
    let mut csv = String::from("u,zeta_re,zeta_im,tail_bound,l_re,l_im,l_times_det_re\n");
    for &u in &args.us {
        let uc = Complex64::new(u, 0.0);
        let zeta = ihara_zeta(&graph, uc, args.length_cap, &config)?;
        let mut entry = json!({
            "u": json_float(u),
            "zeta": json_complex(zeta.value),
            "truncation": zeta.truncation,
            "tail_bound": json_float(zeta.tail_bound),
        });
        let mut l_cols = (String::from(""), String::from(""), String::from(""));
        if args.l_function {
            let l = l_function(&graph, uc, &k, args.length_cap, &config)?;
            let matrix = fiber_matrix_numeric(&graph, OperatorKind::Adjacency, &k)?;
            let nu = matrix.nrows();
            let direct = (DMatrix::<Complex64>::identity(nu, nu) - matrix * uc).determinant();
            let reciprocity = l.value * direct;
            entry["l_function"] = json!({
                "value": json_complex(l.value),
                "tail_bound": json_float(l.tail_bound),
                "l_times_det": json_complex(reciprocity),
            });
            l_cols = (
                csv_float(l.value.re),
                csv_float(l.value.im),
                csv_float(reciprocity.re),
            );
        }
        entries.push(entry);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_float(u),
            csv_float(zeta.value.re),
            csv_float(zeta.value.im),
            csv_float(zeta.tail_bound),
            l_cols.0,
            l_cols.1,
            l_cols.2,
        ));
    }
    let json = json!({
        "graph": label,
        "length_cap": args.length_cap,
        "k": k,
        "results": entries,
    });
    args.out.emit(json, csv)
}

#[derive(Args)]
pub struct BipartiteArgs {
    #[command(flatten)]
    source: GraphSource,

    #[command(flatten)]
    limits: ComputeLimits,

    #[command(flatten)]
    out: OutputTarget,
}

pub fn bipartite(args: BipartiteArgs) -> CliResult {
    let (graph, label) = args.source.load()?;
    let config = args.limits.config();
    let report = bipartite_report(&graph, &config);
    let witness = report.witness.as_ref().map(|w| {
        let parity: serde_json::Map<String, Value> = graph
            .vertices()
            .iter()
            .zip(&w.vertex_parity)
            .map(|(v, &p)| (v.id.clone(), json!(p)))
            .collect();
        json!({ "vertex_parity": parity, "character": w.character })
    });
    let json = json!({
        "graph": label,
        "fundamental": report.fundamental,
        "periodic": report.periodic,
        "fundamental_by_coloring": report.fundamental_by_coloring,
        "fundamental_by_traces": report.fundamental_by_traces,
        "witness": witness,
    });
    let csv = format!(
        "key,value\nfundamental,{}\nperiodic,{}\n",
        report.fundamental, report.periodic
    );
    args.out.emit(json, csv)
}

#[derive(Args)]
pub struct ExampleArgs {
    /// Builtin name: square, kagome, zline, gp (with --p) or g<p>
    name: String,

    /// Chord length for the gp builtin
    #[arg(long)]
    p: Option<usize>,

    #[command(flatten)]
    out: OutputTarget,
}

pub fn example(args: ExampleArgs) -> CliResult {
    let resolved = if args.name == "gp" {
        let p = args
            .p
            .ok_or_else(|| CliError::input("example gp requires --p"))?;
        format!("g{p}")
    } else {
        args.name.clone()
    };
    let graph = builtin_graph(&resolved)
        .ok_or_else(|| CliError::input(format!("unknown builtin graph `{resolved}`")))?;
    let doc = graph.to_document();
    let json = serde_json::to_value(&doc).map_err(|e| CliError::input(e.to_string()))?;
    let mut csv = String::from("from,to,index\n");
    for e in &doc.edges {
        let idx = e
            .index
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        csv.push_str(&format!("{},{},{}\n", e.from, e.to, idx));
    }
    args.out.emit(json, csv)
}

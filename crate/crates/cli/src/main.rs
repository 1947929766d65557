use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use shilov::dimension::{auto_scales, box_dimension, DimEstimate, PointCloud};
use shilov::finite::{boundary_report, FamilyDocument};
use shilov::polytope::{face_lattice, linear_exposure_oracle, shilov_psh, PolytopeDocument, ShilovReport};
use shilov::qpsh::{reg_max, RegMaxParams, DEFAULT_NODES};
use shilov::registry::{domain, parse_params};
use shilov::smooth::{sample_boundary, strict_q_set};

const HISTOGRAM_BINS: usize = 16;

#[derive(Parser)]
#[command(name = "shilov", version, about = "Shilov boundaries of finite families, polytopes and smooth domains")]
struct Cli {
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "SHILOV_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shilov boundary, peak points and minimal boundary of a tabulated family.
    Finite {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// q-plurisubharmonic Shilov boundary of a polytope in C^N.
    Polytope {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        q: usize,
        /// Cloud points sampled on the boundary faces.
        #[arg(long, default_value_t = 2000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random functionals checked against the face set; 0 skips the check.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Strict q-pseudoconvexity flags on a sampled domain boundary.
    Smooth {
        #[arg(long)]
        domain: String,
        /// Domain parameters, e.g. `n=3,radius=2`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 0)]
        q: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative eigenvalue threshold for strict positivity.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Regularized maximum of a vector; prints a plain decimal.
    Regmax {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
    },
    /// Box-counting dimension of a CSV point cloud.
    Dim {
        #[arg(long)]
        cloud: PathBuf,
        /// Box sides; chosen from the cloud when omitted.
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Directory for `report.json` and, where produced, `cloud.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Invalid { kind: &'static str, message: String, path: Option<String> },
    Oracle { message: String, details: serde_json::Value },
}

impl Failure {
    fn invalid(kind: &'static str, e: impl std::fmt::Display) -> Self {
        Failure::Invalid { kind, message: e.to_string(), path: None }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Invalid { .. } => 2,
            Failure::Oracle { .. } => 3,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Invalid { kind, message, path } => {
                json!({ "error": kind, "message": message, "path": path })
            }
            Failure::Oracle { message, details } => {
                json!({ "error": "oracle", "message": message, "details": details })
            }
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid("io", format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Failure::Invalid { kind: "input", message: e.inner().to_string(), path: Some(path) }
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Prints the report and, with `--out`, writes it and the optional CSV.
fn emit<T: Serialize>(out: &OutArgs, report: &T, csv: Option<String>) -> Outcome {
    let text = pretty(report);
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::invalid("io", format!("stdout: {e}")))?;
    if let Some(dir) = &out.out {
        let io = |e: std::io::Error| Failure::invalid("io", format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("report.json"), &text).map_err(io)?;
        if let Some(csv) = csv {
            fs::write(dir.join("cloud.csv"), csv).map_err(io)?;
        }
    }
    Ok(())
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn coordinate_header(n: usize) -> Vec<String> {
    (1..=n).flat_map(|k| [format!("x{k}"), format!("y{k}")]).collect()
}

fn run_finite(input: &Path, out: &OutArgs) -> Outcome {
    let doc: FamilyDocument = read_json(input)?;
    let family = doc.into_family().map_err(|e| Failure::invalid("family", e))?;
    emit(out, &boundary_report(&family), None)
}

#[derive(Serialize)]
struct PolytopeOutput {
    #[serde(flatten)]
    report: ShilovReport,
    oracle_trials: usize,
    oracle_violations: usize,
}

fn run_polytope(input: &Path, q: usize, count: usize, seed: u64, trials: usize, out: &OutArgs) -> Outcome {
    let doc: PolytopeDocument = read_json(input)?;
    let poly = doc.build().map_err(|e| Failure::invalid("polytope", e))?;
    let n = poly.complex_dim();
    if q >= n {
        return Err(Failure::invalid("q", format!("q = {q} must be below N = {n}")));
    }
    let lattice = face_lattice(&poly).map_err(|e| Failure::invalid("polytope", e))?;
    let result = shilov_psh(&lattice, q, count, seed).map_err(|e| Failure::invalid("polytope", e))?;
    let oracle = linear_exposure_oracle(&poly, &lattice, &result.shilov_faces, trials, seed);
    if !oracle.passed() {
        return Err(Failure::Oracle {
            message: format!("{} of {trials} functionals peak off the computed face set", oracle.violations.len()),
            details: serde_json::to_value(&oracle.violations).expect("violations serialize"),
        });
    }
    let mut csv = coordinate_header(n);
    csv.push("face_id".into());
    let mut csv = csv.join(",") + "\n";
    for (p, face) in result.cloud.points().iter().zip(&result.cloud_faces) {
        let row: Vec<String> = p.iter().map(|&x| float(x)).collect();
        csv.push_str(&format!("{},{face}\n", row.join(",")));
    }
    let report = PolytopeOutput {
        report: result.report(&lattice),
        oracle_trials: trials,
        oracle_violations: 0,
    };
    emit(out, &report, Some(csv))
}

#[derive(Serialize)]
struct Histogram {
    edges: Vec<f64>,
    counts: Vec<usize>,
}

fn histogram(values: &[f64]) -> Histogram {
    // the range always covers zero so the sign split sits on a bin edge
    let lo = values.iter().copied().fold(0.0, f64::min);
    let hi = values.iter().copied().fold(0.0, f64::max);
    if values.is_empty() {
        return Histogram { edges: vec![], counts: vec![] };
    }
    let width = if hi > lo { (hi - lo) / HISTOGRAM_BINS as f64 } else { 1.0 };
    let edges = (0..=HISTOGRAM_BINS).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0; HISTOGRAM_BINS];
    for v in values {
        let bin = (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
        counts[bin] += 1;
    }
    Histogram { edges, counts }
}

#[derive(Serialize)]
struct SmoothSummary {
    domain: String,
    params: std::collections::BTreeMap<String, f64>,
    #[serde(rename = "N")]
    n: usize,
    q: usize,
    count: usize,
    skipped: usize,
    below_floor: usize,
    delta: f64,
    /// Strictly q-pseudoconvex fraction for q = 0..N-1.
    flagged_fraction: Vec<f64>,
    closure_fraction: f64,
    closure_radius: f64,
    /// Restricted Levi eigenvalues, all samples pooled.
    spectrum: Histogram,
}

fn run_smooth(
    name: &str,
    params: &str,
    q: usize,
    count: usize,
    seed: u64,
    tol: Option<f64>,
    out: &OutArgs,
) -> Outcome {
    let parsed = parse_params(params).map_err(|e| Failure::invalid("params", e))?;
    let mut d = domain(name, &parsed).map_err(|e| Failure::invalid("domain", e))?;
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::invalid("tol", format!("tolerance must be positive, got {t}")));
        }
        d.delta = t;
    }
    let n = d.complex_dim();
    if q >= n {
        return Err(Failure::invalid("q", format!("q = {q} must be below N = {n}")));
    }
    let sample = sample_boundary(&d, count, seed).map_err(|e| Failure::invalid("sampling", e))?;
    let per_q = (0..n)
        .map(|k| strict_q_set(&d, k, &sample.cloud))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::invalid("levi", e))?;
    let chosen = &per_q[q];
    let len = sample.cloud.len();

    let mut header = coordinate_header(n);
    header.extend((1..n).map(|k| format!("lambda{k}")));
    header.extend((0..n).map(|k| format!("strict_q{k}")));
    header.push(format!("closure_q{q}"));
    let mut csv = header.join(",") + "\n";
    for (i, p) in sample.cloud.points().iter().enumerate() {
        let mut row: Vec<String> = p.iter().map(|&x| float(x)).collect();
        row.extend(chosen.flags[i].eigenvalues.iter().map(|&x| float(x)));
        row.extend(per_q.iter().map(|f| u8::from(f.flags[i].flagged).to_string()));
        row.push(u8::from(chosen.flags[i].closure).to_string());
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let eigenvalues: Vec<f64> = chosen.flags.iter().flat_map(|f| f.eigenvalues.iter().copied()).collect();
    let summary = SmoothSummary {
        domain: d.name.clone(),
        params: parsed,
        n,
        q,
        count: len,
        skipped: sample.skipped,
        below_floor: sample.below_floor,
        delta: d.delta,
        flagged_fraction: per_q.iter().map(|f| f.flagged_fraction()).collect(),
        closure_fraction: chosen.flags.iter().filter(|f| f.closure).count() as f64 / len.max(1) as f64,
        closure_radius: chosen.closure_radius,
        spectrum: histogram(&eigenvalues),
    };
    emit(out, &summary, Some(csv))
}

fn run_regmax(t: &[f64], eps: Vec<f64>, nodes: usize) -> Outcome {
    let params = RegMaxParams::new(eps, nodes).map_err(|e| Failure::invalid("regmax", e))?;
    let m = reg_max(t, &params).map_err(|e| Failure::invalid("regmax", e))?;
    println!("{m}");
    Ok(())
}

/// Reads coordinates from a CSV. With a header, only `x<k>`/`y<k>` columns
/// are used when present, so cloud files from other subcommands load as is.
fn read_cloud(path: &Path) -> Result<PointCloud, Failure> {
    let bad = |e: &dyn std::fmt::Display| Failure::invalid("cloud", format!("{}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(&e))?;
    let mut columns: Option<Vec<usize>> = None;
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(&e))?;
        let line = i + 1;
        if line == 1 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            let coords: Vec<usize> = record
                .iter()
                .enumerate()
                .filter(|(_, name)| {
                    let mut ch = name.chars();
                    matches!(ch.next(), Some('x' | 'y')) && {
                        let rest = ch.as_str();
                        !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
                    }
                })
                .map(|(i, _)| i)
                .collect();
            columns = Some(if coords.is_empty() { (0..record.len()).collect() } else { coords });
            continue;
        }
        let cols = columns.get_or_insert_with(|| (0..record.len()).collect());
        let p = cols
            .iter()
            .map(|&i| {
                record
                    .get(i)
                    .and_then(|c| c.parse::<f64>().ok())
                    .ok_or_else(|| bad(&format!("line {line}, column {}: not a number", i + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        points.push(p);
    }
    let dim = points.first().map_or(0, Vec::len);
    PointCloud::from_points(dim, points, path.display().to_string()).map_err(|e| bad(&e))
}

fn run_dim(cloud: &Path, scales: Vec<f64>, out: &OutArgs) -> Outcome {
    let cloud = read_cloud(cloud)?;
    let scales = if scales.is_empty() {
        auto_scales(&cloud).map_err(|e| Failure::invalid("scales", e))?
    } else {
        scales
    };
    let est: DimEstimate = box_dimension(&cloud, &scales).map_err(|e| Failure::invalid("dimension", e))?;
    emit(out, &est, None)
}

fn run(cli: Cli) -> Outcome {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| Failure::invalid("jobs", e))?;
    }
    match cli.command {
        Command::Finite { input, out } => run_finite(&input, &out),
        Command::Polytope { input, q, count, seed, trials, out } => {
            run_polytope(&input, q, count, seed, trials, &out)
        }
        Command::Smooth { domain, params, q, count, seed, tol, out } => {
            run_smooth(&domain, &params, q, count, seed, tol, &out)
        }
        Command::Regmax { t, eps, nodes } => run_regmax(&t, eps, nodes),
        Command::Dim { cloud, scales, out } => run_dim(&cloud, scales, &out),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    match run(cli) {
        Ok(()) => {
            log::info!("done in {:.2?}", started.elapsed());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f.to_json()).expect("error serializes"));
            ExitCode::from(f.code())
        }
    }
}

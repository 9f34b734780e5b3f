use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use viscount::bench::{config_line, generated_scenes, query_points, run_bench, run_points, write_csv, write_jsonl, BenchOutcome, BenchScene};
use viscount::config::parse_alpha;
use viscount::persist::{index_from_json, index_to_json};
use viscount::pipeline::{build, BuildError};
use viscount::sceneio::{format_evg_dump, format_scene, read_scene, LoadError};
use viscount::RunConfig;
use viscount_core::scene::{generate_random, GenParams};
use viscount_core::visibility::visible_count_oracle;
use viscount_core::{Point, Rect, Scalar, Scene};

#[derive(Parser)]
#[command(name = "viscount", version, about = "Exact visibility counting among disjoint segments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON run config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record wall-clock times (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Points sampled to check the cover against the oracle.
    #[arg(long)]
    cover_samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scene in general position.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Side length of the square bounding box.
        #[arg(long, default_value_t = 1000)]
        extent: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load a scene and report degeneracies.
    Validate { scene: PathBuf },
    /// Build and save an index.
    Build {
        scene: PathBuf,
        #[arg(long)]
        alpha: Option<String>,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Index file to write.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stats report file (default: stdout).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the scene plus its EVG edge list here.
        #[arg(long)]
        evg_dump: Option<PathBuf>,
    },
    /// Answer queries `x,y` from a saved index.
    Query {
        index: PathBuf,
        #[arg(required = true)]
        points: Vec<String>,
        /// Also run the oracle and fail on any disagreement.
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare all answerers over generated or given scenes.
    Bench {
        scenes: Vec<PathBuf>,
        /// Generated scene sizes, used when no scene files are given.
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 15, 20, 25, 30])]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = ["1/4".to_string(), "1/2".to_string(), "3/4".to_string()])]
        alpha: Vec<String>,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Record file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary file (default: stderr).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Compare all answerers on one scene at given (or sampled) points.
    Compare {
        scene: PathBuf,
        points: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values_t = ["1/2".to_string()])]
        alpha: Vec<String>,
        /// Sampled points when none are given.
        #[arg(long, default_value_t = 20)]
        queries: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Validation(String),
    Exactness(String),
    Build(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Exactness(_) => 3,
            Failure::Build(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Exactness(m) | Failure::Build(m) => m,
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Build(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn write_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn load_config(args: &ConfigArgs, alpha: Option<&str>) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(a) = alpha {
        cfg.alpha = parse_alpha(a).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if let Some(k) = args.cover_samples {
        cfg.cover_samples = k;
    }
    cfg.timing |= args.timing;
    cfg.validate().map_err(|e| Failure::Usage(format!("config: {e}")))?;
    Ok(cfg)
}

fn alphas(raw: &[String], cfg: &RunConfig) -> Result<Vec<Scalar>> {
    raw.iter()
        .map(|a| {
            let alpha = parse_alpha(a).map_err(|e| Failure::Usage(e.to_string()))?;
            cfg.with_alpha(alpha.clone()).validate().map_err(|e| Failure::Usage(format!("config: {e}")))?;
            Ok(alpha)
        })
        .collect()
}

fn parse_point(s: &str) -> Result<Point> {
    let bad = || Failure::Usage(format!("point `{s}` is not `x,y`"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok(Point::new(x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

fn scene_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn cmd_gen(n: usize, seed: u64, extent: i64, out: Option<&Path>) -> Result<()> {
    if n == 0 || extent <= 0 {
        return Err(Failure::Usage("--n and --extent must be positive".into()));
    }
    let mut params = GenParams::new(n);
    params.bbox = Rect::new(Point::from_ints(0, 0), Point::from_ints(extent, extent));
    let scene = generate_random(&params, seed).map_err(|e| Failure::Build(format!("gen: {e}")))?;
    let mut text = format!("# viscount gen --n {n} --seed {seed} --extent {extent}\n");
    text.push_str(&format_scene(&scene));
    write_to(out, &text)?;
    if out.is_some() {
        eprintln!("wrote {n} segments");
    }
    Ok(())
}

#[derive(Serialize)]
struct ValidateReport {
    segments: usize,
    clean: bool,
    collinear_endpoints: usize,
    shared_x: usize,
    endpoint_on_segment_line: usize,
}

fn cmd_validate(path: &Path) -> Result<()> {
    let scene = read_scene(path)?;
    let r = scene.validate().map_err(|e| Failure::Validation(e.to_string()))?;
    let report = ValidateReport {
        segments: scene.len(),
        clean: r.is_clean(),
        collinear_endpoints: r.collinear_endpoints.len(),
        shared_x: r.shared_x.len(),
        endpoint_on_segment_line: r.endpoint_on_segment_line.len(),
    };
    write_to(None, &to_json(&report))
}

fn cmd_build(scene_path: &Path, cfg: &RunConfig, out: Option<&Path>, report: Option<&Path>, evg_dump: Option<&Path>) -> Result<()> {
    let scene = read_scene(scene_path)?;
    let (prepared, built) = build(&scene, cfg)?;
    if let Some(p) = evg_dump {
        std::fs::write(p, format_evg_dump(&scene, &prepared.evg)).map_err(|e| io_err(p, e))?;
    }
    if let Some(p) = out {
        std::fs::write(p, index_to_json(&built.index, cfg)).map_err(|e| io_err(p, e))?;
    }
    write_to(report, &to_json(&built.report))?;
    match &built.report.cover.check {
        Some(c) if c.counterexamples > 0 => Err(Failure::Exactness(format!("cover check found {} counterexamples", c.counterexamples))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct QueryRecord {
    point: String,
    count: Option<usize>,
    cell: Option<usize>,
    candidates: usize,
    fallback: bool,
    oracle: Option<usize>,
    error: Option<String>,
}

fn cmd_query(index_path: &Path, points: &[String], check: bool, format: Format, out: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(index_path).map_err(|e| io_err(index_path, e))?;
    let (index, cfg) = index_from_json(&text).map_err(|e| Failure::Validation(format!("{}: {e}", index_path.display())))?;
    let points: Vec<Point> = points.iter().map(|s| parse_point(s)).collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(points.len());
    let mut mismatches = 0;
    for (raw, p) in points.iter().map(|p| (format!("{},{}", p.x, p.y), p)) {
        let mut rec = QueryRecord { point: raw, count: None, cell: None, candidates: 0, fallback: false, oracle: None, error: None };
        match index.query(p) {
            Ok(a) => {
                rec.count = Some(a.count);
                rec.cell = a.cell;
                rec.candidates = a.candidate_edges_scanned;
                rec.fallback = a.used_fallback;
                if check {
                    let o = visible_count_oracle(index.scene(), p).expect("point already answered").count;
                    mismatches += usize::from(o != a.count);
                    rec.oracle = Some(o);
                }
            }
            Err(e) => rec.error = Some(e.to_string()),
        }
        records.push(rec);
    }
    let mut buf = Vec::new();
    match format {
        Format::Jsonl => {
            writeln!(buf, "{}", config_line(&cfg)).expect("write to memory");
            for r in &records {
                writeln!(buf, "{}", serde_json::to_string(r).expect("record serializes")).expect("write to memory");
            }
        }
        Format::Csv => {
            writeln!(buf, "# config {}", serde_json::to_string(&cfg).expect("config serializes")).expect("write to memory");
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in &records {
                w.serialize(r).expect("record serializes");
            }
            w.flush().expect("write to memory");
        }
    }
    write_to(out, &String::from_utf8(buf).expect("utf-8 output"))?;
    if mismatches > 0 {
        return Err(Failure::Exactness(format!("{mismatches} answers differ from the oracle")));
    }
    Ok(())
}

fn emit_bench(outcome: &BenchOutcome, cfg: &RunConfig, format: Format, out: Option<&Path>, summary: Option<&Path>) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(&outcome.records, cfg, &mut buf),
        Format::Jsonl => write_jsonl(&outcome.records, cfg, &mut buf),
    }
    .expect("write to memory");
    write_to(out, &String::from_utf8(buf).expect("utf-8 output"))?;
    let text = to_json(&outcome.summary);
    match summary {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e))?,
        None => eprint!("{text}"),
    }
    let s = &outcome.summary;
    if !s.exact() {
        return Err(Failure::Exactness(format!("{} answers differ from the oracle", s.exactness_violations.len())));
    }
    if !s.build_failures.is_empty() {
        return Err(Failure::Build(format!("{} builds failed", s.build_failures.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { n, seed, extent, out } => cmd_gen(n, seed, extent, out.as_deref()),
        Command::Validate { scene } => cmd_validate(&scene),
        Command::Build { scene, alpha, cfg, out, report, evg_dump } => {
            let cfg = load_config(&cfg, alpha.as_deref())?;
            cmd_build(&scene, &cfg, out.as_deref(), report.as_deref(), evg_dump.as_deref())
        }
        Command::Query { index, points, check, format, out } => cmd_query(&index, &points, check, format, out.as_deref()),
        Command::Bench { scenes, sizes, alpha, queries, cfg, format, out, summary } => {
            let cfg = load_config(&cfg, None)?;
            let alphas = alphas(&alpha, &cfg)?;
            let set = if scenes.is_empty() {
                generated_scenes(&sizes, cfg.seed).map_err(|e| Failure::Build(format!("gen: {e}")))?
            } else {
                scenes.iter().map(|p| Ok(BenchScene { id: scene_id(p), scene: read_scene(p)? })).collect::<Result<_>>()?
            };
            let outcome = run_bench(&set, &alphas, queries, &cfg);
            emit_bench(&outcome, &cfg, format, out.as_deref(), summary.as_deref())
        }
        Command::Compare { scene, points, alpha, queries, cfg, format, out } => {
            let cfg = load_config(&cfg, None)?;
            let alphas = alphas(&alpha, &cfg)?;
            let s: Scene = read_scene(&scene)?;
            let pts = if points.is_empty() {
                query_points(&s, queries, cfg.seed, 0)
            } else {
                points.iter().map(|p| parse_point(p)).collect::<Result<_>>()?
            };
            if let Some(p) = pts.iter().find(|p| !s.bbox().contains(p) || s.on_any_segment(p)) {
                return Err(Failure::Usage(format!("point {},{} is outside the box or on a segment", p.x, p.y)));
            }
            let outcome = run_points(&BenchScene { id: scene_id(&scene), scene: s }, &pts, &alphas, &cfg);
            emit_bench(&outcome, &cfg, format, out.as_deref(), None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

//! Benchmark harness: oracle, arrangement baseline, cutting index and the
//! visible-endpoint estimate on shared query points.

use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use viscount_core::scene::{generate_random, sample_point, GenParams};
use viscount_core::visibility::{visible_count_oracle, visible_endpoint_count};
use viscount_core::{Point, Scalar, Scene, SceneError};

use crate::config::RunConfig;
use crate::pipeline::prepare;

#[derive(Debug, Clone)]
pub struct BenchScene {
    pub id: String,
    pub scene: Scene,
}

/// One generated scene per entry of `sizes`, the `i`-th seeded with `seed + i`.
pub fn generated_scenes(sizes: &[usize], seed: u64) -> Result<Vec<BenchScene>, SceneError> {
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let s = seed.wrapping_add(i as u64);
            Ok(BenchScene { id: format!("gen-n{n}-s{s}"), scene: generate_random(&GenParams::new(n), s)? })
        })
        .collect()
}

/// `count` seeded points inside the box and off every segment.
pub fn query_points(scene: &Scene, count: usize, seed: u64, stream: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = sample_point(&mut rng, scene.bbox());
        if !scene.on_any_segment(&p) {
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub scene_id: String,
    pub n: usize,
    /// EVG edges.
    pub m: usize,
    /// `|VT_S|`.
    pub vt: usize,
    /// `|E|`.
    pub e: usize,
    pub alpha: String,
    pub r: usize,
    pub cells: usize,
    pub retry_count: u32,
    pub build_ms: Option<f64>,
    pub query: usize,
    pub x: String,
    pub y: String,
    pub oracle: usize,
    pub baseline: usize,
    pub index: usize,
    /// `None` only if the point lies on an obstacle.
    pub ve: Option<usize>,
    pub candidates: usize,
    pub colors_tested: usize,
    pub corrections: i64,
    pub fallback: bool,
    pub query_us: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub scene_id: String,
    pub alpha: String,
    pub query: usize,
    pub answerer: &'static str,
    pub answer: usize,
    pub oracle: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildFailure {
    pub scene_id: String,
    pub alpha: Option<String>,
    pub error: String,
}

/// How `ve_p` sits against `[m_p, 2 m_p]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VeBand {
    pub points: usize,
    /// `ve_p < m_p`: reported as findings, not failures.
    pub below_lower: usize,
    pub above_upper: usize,
    /// `ve_p / m_p` over points with `m_p > 0`.
    pub mean_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSummary {
    pub alpha: String,
    pub scenes: usize,
    pub mean_r: f64,
    pub mean_cells: f64,
    pub mean_candidates: f64,
    pub mean_colors_tested: f64,
    pub fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub config: RunConfig,
    pub scenes: usize,
    pub records: usize,
    pub exactness_violations: Vec<Violation>,
    pub build_failures: Vec<BuildFailure>,
    pub ve_band: VeBand,
    pub per_alpha: Vec<AlphaSummary>,
    /// Mean candidates non-decreasing and mean cells non-increasing as alpha grows.
    pub candidates_trend_ok: bool,
    pub cells_trend_ok: bool,
}

impl BenchSummary {
    pub fn exact(&self) -> bool {
        self.exactness_violations.is_empty()
    }
}

pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub summary: BenchSummary,
}

struct SceneRun {
    records: Vec<BenchRecord>,
    failures: Vec<BuildFailure>,
    ve: Vec<(usize, Option<usize>)>,
}

fn run_scene(id: &str, scene: &Scene, points: &[Point], alphas: &[Scalar], cfg: &RunConfig) -> SceneRun {
    let mut run = SceneRun { records: Vec::new(), failures: Vec::new(), ve: Vec::new() };
    let t = Instant::now();
    let prepared = match prepare(scene, cfg) {
        Ok(p) => p,
        Err(e) => {
            run.failures.push(BuildFailure { scene_id: id.into(), alpha: None, error: e.to_string() });
            return run;
        }
    };
    let prep_ms = t.elapsed().as_secs_f64() * 1e3;
    let truth: Vec<(usize, usize, Option<usize>)> = points
        .iter()
        .map(|p| {
            let oracle = visible_count_oracle(scene, p).expect("query points lie off the obstacles").count;
            let baseline = prepared.arrangement.baseline_query(scene, p).expect("query points lie in the box").count;
            (oracle, baseline, visible_endpoint_count(scene, p).ok())
        })
        .collect();
    run.ve = truth.iter().map(|&(o, _, v)| (o, v)).collect();
    let (vt, e) = (prepared.cover.len(), prepared.cover.edges().len());
    for alpha in alphas {
        let acfg = cfg.with_alpha(alpha.clone());
        let t = Instant::now();
        let built = match prepared.build_index(scene, &acfg) {
            Ok(b) => b,
            Err(err) => {
                run.failures.push(BuildFailure { scene_id: id.into(), alpha: Some(alpha.to_ratio_string()), error: err.to_string() });
                continue;
            }
        };
        let build_ms = prep_ms + t.elapsed().as_secs_f64() * 1e3;
        let rep = &built.report;
        for (q, (p, &(oracle, baseline, ve))) in points.iter().zip(&truth).enumerate() {
            let t = Instant::now();
            let answer = built.index.query(p).expect("query points lie in the box");
            let query_us = t.elapsed().as_secs_f64() * 1e6;
            run.records.push(BenchRecord {
                scene_id: id.into(),
                n: scene.len(),
                m: rep.evg.edges,
                vt,
                e,
                alpha: alpha.to_ratio_string(),
                r: rep.cutting.r,
                cells: rep.cutting.cells,
                retry_count: rep.cutting.retry_count,
                build_ms: cfg.timing.then_some(build_ms),
                query: q,
                x: p.x.to_ratio_string(),
                y: p.y.to_ratio_string(),
                oracle,
                baseline,
                index: answer.count,
                ve,
                candidates: answer.candidate_edges_scanned,
                colors_tested: answer.colors_tested,
                corrections: answer.corrections,
                fallback: answer.used_fallback,
                query_us: cfg.timing.then_some(query_us),
            });
        }
    }
    run
}

/// Runs `f` over `0..n` on up to `available_parallelism` threads and
/// returns the results in index order.
pub fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(n.max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                slots.lock().expect("no worker panicked")[i] = Some(out);
            });
        }
    });
    slots.into_inner().expect("no worker panicked").into_iter().map(|o| o.expect("every job ran")).collect()
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Full cross product of scenes, alphas and `queries` points per scene.
/// Per-scene build failures are collected, not fatal.
pub fn run_bench(scenes: &[BenchScene], alphas: &[Scalar], queries: usize, cfg: &RunConfig) -> BenchOutcome {
    let runs = par_map(scenes.len(), |i| {
        let points = query_points(&scenes[i].scene, queries, cfg.seed, i as u64);
        run_scene(&scenes[i].id, &scenes[i].scene, &points, alphas, cfg)
    });
    summarize(runs, alphas, scenes.len(), cfg)
}

/// Same as [`run_bench`] for one scene and given points.
pub fn run_points(scene: &BenchScene, points: &[Point], alphas: &[Scalar], cfg: &RunConfig) -> BenchOutcome {
    let run = run_scene(&scene.id, &scene.scene, points, alphas, cfg);
    summarize(vec![run], alphas, 1, cfg)
}

fn summarize(runs: Vec<SceneRun>, alphas: &[Scalar], scenes: usize, cfg: &RunConfig) -> BenchOutcome {
    let mut records = Vec::new();
    let mut build_failures = Vec::new();
    let mut band = VeBand::default();
    let mut ratios = Vec::new();
    for run in runs {
        records.extend(run.records);
        build_failures.extend(run.failures);
        for (m, ve) in run.ve {
            let Some(ve) = ve else { continue };
            band.points += 1;
            band.below_lower += usize::from(ve < m);
            band.above_upper += usize::from(ve > 2 * m);
            if m > 0 {
                ratios.push(ve as f64 / m as f64);
            }
        }
    }
    band.mean_ratio = mean(ratios.iter().copied());
    band.max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let mut exactness_violations = Vec::new();
    for r in &records {
        for (answerer, answer) in [("baseline", r.baseline), ("index", r.index)] {
            if answer != r.oracle {
                exactness_violations.push(Violation { scene_id: r.scene_id.clone(), alpha: r.alpha.clone(), query: r.query, answerer, answer, oracle: r.oracle });
            }
        }
    }
    let per_alpha: Vec<AlphaSummary> = alphas
        .iter()
        .map(|a| {
            let alpha = a.to_ratio_string();
            let rs: Vec<&BenchRecord> = records.iter().filter(|r| r.alpha == alpha).collect();
            let firsts: Vec<&BenchRecord> = rs.iter().copied().filter(|r| r.query == 0).collect();
            AlphaSummary {
                scenes: firsts.len(),
                mean_r: mean(firsts.iter().map(|r| r.r as f64)),
                mean_cells: mean(firsts.iter().map(|r| r.cells as f64)),
                mean_candidates: mean(rs.iter().map(|r| r.candidates as f64)),
                mean_colors_tested: mean(rs.iter().map(|r| r.colors_tested as f64)),
                fallbacks: rs.iter().filter(|r| r.fallback).count(),
                alpha,
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|&i, &j| alphas[i].cmp(&alphas[j]));
    let sorted: Vec<&AlphaSummary> = order.iter().map(|&i| &per_alpha[i]).collect();
    let candidates_trend_ok = sorted.windows(2).all(|w| w[0].mean_candidates <= w[1].mean_candidates);
    let cells_trend_ok = sorted.windows(2).all(|w| w[0].mean_cells >= w[1].mean_cells);
    let summary = BenchSummary {
        config: cfg.clone(),
        scenes,
        records: records.len(),
        exactness_violations,
        build_failures,
        ve_band: band,
        per_alpha,
        candidates_trend_ok,
        cells_trend_ok,
    };
    BenchOutcome { records, summary }
}

/// `{"config": ...}` with fields in declaration order.
pub fn config_line(cfg: &RunConfig) -> String {
    format!("{{\"config\":{}}}", serde_json::to_string(cfg).expect("config serializes"))
}

/// CSV with the config echoed as a leading `#` comment line.
pub fn write_csv(records: &[BenchRecord], cfg: &RunConfig, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "# config {}", serde_json::to_string(cfg).expect("config serializes"))?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(io::Error::other)?;
    }
    w.flush()
}

/// One JSON object per line; the first line is `{"config": ...}`.
pub fn write_jsonl(records: &[BenchRecord], cfg: &RunConfig, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{}", config_line(cfg))?;
    for r in records {
        writeln!(out, "{}", serde_json::to_string(r).expect("record serializes"))?;
    }
    Ok(())
}

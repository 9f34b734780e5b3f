//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;

use viscount::bench::{generated_scenes, par_map, query_points, run_bench, write_csv};
use viscount::persist::index_to_json;
use viscount::pipeline::{build, prepare};
use viscount::RunConfig;
use viscount_core::cover::{verify_cover, Cover};
use viscount_core::cutting::{build_cutting, correction_walk, CuttingParams};
use viscount_core::scene::{generate_random, GenParams};
use viscount_core::visibility::{visible_count_oracle, visible_endpoint_count};
use viscount_core::{Point, Rect, Scalar, Triangle};

const SIZES: [usize; 20] = [3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 18, 20, 24, 28, 32, 40];
const QUERIES: usize = 200;
const COVER_SAMPLES: usize = 1000;
const SCENE_SEED: u64 = 1000;

fn alphas() -> Vec<Scalar> {
    ["1/4", "1/2", "3/4"].iter().map(|a| a.parse().unwrap()).collect()
}

#[derive(Default)]
struct AlphaRun {
    alpha: String,
    built: bool,
    r: usize,
    cells: usize,
    max_crossing: usize,
    crossing_bound: f64,
    cell_bound: f64,
    retries: u32,
    candidates: usize,
    index_mismatches: usize,
    audited: usize,
    audit_mismatches: usize,
    error: Option<String>,
}

#[derive(Default)]
struct SceneRun {
    id: String,
    n: usize,
    queries: usize,
    baseline_mismatches: usize,
    cover_samples: usize,
    cover_counterexamples: usize,
    mutation_counterexamples: usize,
    membership_points: usize,
    distinct_mismatches: usize,
    multiplicity_out_of_band: usize,
    ve_points: usize,
    ve_above: usize,
    ve_below: Vec<String>,
    alphas: Vec<AlphaRun>,
    error: Option<String>,
}

fn run_scene(i: usize, n: usize) -> SceneRun {
    let seed = SCENE_SEED + i as u64;
    let mut run = SceneRun { id: format!("gen-n{n}-s{seed}"), n, ..SceneRun::default() };
    let scene = generate_random(&GenParams::new(n), seed).expect("generator succeeds");
    let cfg = RunConfig { seed: i as u64, ..RunConfig::default() };
    let prepared = match prepare(&scene, &cfg) {
        Ok(p) => p,
        Err(e) => {
            run.error = Some(e.to_string());
            return run;
        }
    };
    let cover = &prepared.cover;
    let check = verify_cover(cover, &scene, COVER_SAMPLES, seed);
    run.cover_samples = check.samples;
    run.cover_counterexamples = check.counterexamples.len();
    if let Some(k) = cover.largest_triangle() {
        run.mutation_counterexamples = verify_cover(&cover.without_triangle(k), &scene, COVER_SAMPLES, seed).counterexamples.len();
    }

    let points = query_points(&scene, QUERIES, cfg.seed, i as u64);
    let truth: Vec<usize> = points.iter().map(|p| visible_count_oracle(&scene, p).unwrap().count).collect();
    run.queries = points.len();
    for (p, &m) in points.iter().zip(&truth) {
        if prepared.arrangement.baseline_query(&scene, p).unwrap().count != m {
            run.baseline_mismatches += 1;
        }
        let mem = cover.membership(p);
        if !mem.boundary {
            run.membership_points += 1;
            run.distinct_mismatches += usize::from(mem.distinct() != m);
            run.multiplicity_out_of_band += usize::from(mem.total() < m || mem.total() > 2 * m);
        }
        let ve = visible_endpoint_count(&scene, p).unwrap();
        run.ve_points += 1;
        run.ve_above += usize::from(ve > 2 * m);
        if ve < m {
            run.ve_below.push(format!("{} at ({}, {}): ve {ve} < m {m}", run.id, p.x, p.y));
        }
    }

    for alpha in alphas() {
        let acfg = cfg.with_alpha(alpha.clone());
        let mut a = AlphaRun { alpha: alpha.to_ratio_string(), ..AlphaRun::default() };
        match prepared.build_index(&scene, &acfg) {
            Ok(built) => {
                let c = &built.report.cutting;
                a.built = true;
                (a.r, a.cells, a.max_crossing, a.crossing_bound, a.cell_bound, a.retries) = (c.r, c.cells, c.max_crossing, c.crossing_bound, c.cell_bound, c.retry_count);
                for (p, &m) in points.iter().zip(&truth) {
                    let q = built.index.query(p).unwrap();
                    a.candidates += q.candidate_edges_scanned;
                    a.index_mismatches += usize::from(q.count != m);
                }
                a.audited = built.index.cells().len();
                a.audit_mismatches = built.index.audit().len();
            }
            Err(e) => a.error = Some(e.to_string()),
        }
        run.alphas.push(a);
    }
    run
}

/// Three nested triangles, red (0) around green (1) and blue (2); `p_i` sees
/// all three and the walk to `p` leaves green only.
fn nested_colors() -> (usize, i64, usize) {
    let tri = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| Triangle::new(Point::from_ints(a.0, a.1), Point::from_ints(b.0, b.1), Point::from_ints(c.0, c.1)).unwrap();
    let bbox = Rect::new(Point::from_ints(0, 0), Point::from_ints(10, 10));
    let cover = Cover::from_triangles(bbox.clone(), 3, vec![(tri((1, 1), (9, 1), (5, 9)), 0), (tri((2, 2), (6, 2), (4, 6)), 1), (tri((1, 2), (9, 2), (5, 8)), 2)]);
    let (pi, p) = (Point::from_ints(4, 3), Point::from_ints(7, 3));
    let m_pi = cover.membership(&pi).distinct();
    let cutting = build_cutting(cover.edges(), &bbox, &CuttingParams::new(Scalar::from_ratio(1, 2)), 0).unwrap();
    let walk = correction_walk(&pi, m_pi, &p, &cover, &cutting).unwrap();
    (m_pi, walk.corrections, walk.count)
}

/// Build report, index file and bench CSV for one seed.
fn artifacts(seed: u64) -> (String, String, Vec<u8>) {
    let scene = generate_random(&GenParams::new(12), seed).unwrap();
    let cfg = RunConfig { seed, ..RunConfig::default() };
    let (_, built) = build(&scene, &cfg).unwrap();
    let report = serde_json::to_string(&built.report).unwrap();
    let index = index_to_json(&built.index, &cfg);
    let scenes = generated_scenes(&[4, 6, 8], seed).unwrap();
    let outcome = run_bench(&scenes, &alphas(), 30, &cfg);
    let mut csv = Vec::new();
    write_csv(&outcome.records, &cfg, &mut csv).unwrap();
    csv.extend(serde_json::to_vec(&outcome.summary).unwrap());
    (report, index, csv)
}

struct Line {
    pass: bool,
    text: String,
}

fn line(id: u32, name: &str, pass: bool, detail: String) -> Line {
    Line { pass, text: format!("[{}] {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }) }
}

fn main() -> ExitCode {
    let runs = par_map(SIZES.len(), |i| run_scene(i, SIZES[i]));
    let mut lines = Vec::new();
    let failed: Vec<String> = runs.iter().filter_map(|r| r.error.as_ref().map(|e| format!("{}: {e}", r.id))).collect();
    let all_alpha = || runs.iter().flat_map(|r| r.alphas.iter());
    let total = |f: fn(&SceneRun) -> usize| runs.iter().map(f).sum::<usize>();

    let queries: usize = all_alpha().filter(|a| a.built).count() * QUERIES;
    let index_bad: usize = all_alpha().map(|a| a.index_mismatches).sum();
    let built_all = failed.is_empty() && all_alpha().all(|a| a.built);
    lines.push(line(1, "index exactness", built_all && index_bad == 0 && runs.len() >= 20, format!("{} scenes, n 3..=40, 3 alphas, {queries} index answers, {index_bad} mismatches", runs.len())));

    let base_bad = total(|r| r.baseline_mismatches);
    lines.push(line(2, "baseline exactness", failed.is_empty() && base_bad == 0, format!("{} answers, {base_bad} mismatches", total(|r| r.queries))));

    let cover_bad = total(|r| r.cover_counterexamples);
    let weak_mutations = runs.iter().filter(|r| r.mutation_counterexamples == 0).count();
    lines.push(line(
        3,
        "cover exactness",
        failed.is_empty() && cover_bad == 0 && weak_mutations == 0,
        format!("{} samples, {cover_bad} counterexamples; mutation caught in {}/{} scenes", total(|r| r.cover_samples), runs.len() - weak_mutations, runs.len()),
    ));

    let distinct_bad = total(|r| r.distinct_mismatches);
    let band_bad = total(|r| r.multiplicity_out_of_band);
    lines.push(line(
        4,
        "membership counts",
        failed.is_empty() && distinct_bad == 0 && band_bad == 0,
        format!("{} points, {distinct_bad} distinct-color mismatches, {band_bad} multiplicities outside [m_p, 2 m_p]", total(|r| r.membership_points)),
    ));

    let ve_above = total(|r| r.ve_above);
    let findings: Vec<&String> = runs.iter().flat_map(|r| &r.ve_below).collect();
    lines.push(line(5, "endpoint estimate", failed.is_empty() && ve_above == 0, format!("{} points, {ve_above} above 2 m_p, {} below m_p (findings)", total(|r| r.ve_points), findings.len())));

    let over: Vec<String> = all_alpha()
        .filter(|a| a.built && (a.max_crossing as f64 > a.crossing_bound || a.cells as f64 > a.cell_bound))
        .map(|a| format!("alpha {} max crossing {} / {:.1}, cells {} / {:.0}", a.alpha, a.max_crossing, a.crossing_bound, a.cells, a.cell_bound))
        .collect();
    let build_errors: Vec<&String> = all_alpha().filter_map(|a| a.error.as_ref()).collect();
    let max_retries = all_alpha().map(|a| a.retries).max().unwrap_or(0);
    lines.push(line(
        6,
        "cutting bounds",
        failed.is_empty() && build_errors.is_empty() && over.is_empty(),
        format!("{} builds, {} failed, {} over a bound, max retries {max_retries}", all_alpha().count(), build_errors.len(), over.len()),
    ));

    let big = runs.iter().find(|r| r.n == 40).expect("n = 40 scene present");
    let trend: Vec<(f64, usize)> = big.alphas.iter().map(|a| (a.candidates as f64 / QUERIES as f64, a.cells)).collect();
    let trend_ok = big.alphas.iter().all(|a| a.built) && trend.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 >= w[1].1);
    let shown: Vec<String> = big.alphas.iter().zip(&trend).map(|(a, (c, k))| format!("alpha {}: {c:.2} candidates, {k} cells", a.alpha)).collect();
    lines.push(line(7, "alpha tradeoff", trend_ok, format!("{}: {}", big.id, shown.join("; "))));

    let (m_pi, corrections, answer) = nested_colors();
    lines.push(line(8, "three nested colors", m_pi == 3 && answer == 2, format!("m_pi {m_pi}, corrections {corrections:+}, answer {answer}")));

    let audited: usize = all_alpha().map(|a| a.audited).sum();
    let audit_bad: usize = all_alpha().map(|a| a.audit_mismatches).sum();
    let audited_scenes = runs.iter().filter(|r| !r.alphas.is_empty() && r.alphas.iter().all(|a| a.built)).count();
    lines.push(line(9, "cell count audit", audited_scenes >= 5 && audit_bad == 0, format!("{audited_scenes} scenes, {audited} cells, {audit_bad} mismatches")));

    let (a, b) = (artifacts(5), artifacts(5));
    let same = a == b;
    lines.push(line(10, "determinism", same, format!("report {} bytes, index {} bytes, bench {} bytes, identical: {same}", a.0.len(), a.1.len(), a.2.len())));

    for e in failed.iter().chain(build_errors) {
        println!("error: {e}");
    }
    for o in &over {
        println!("over bound: {o}");
    }
    for f in &findings {
        println!("finding: {f}");
    }
    for l in &lines {
        println!("{}", l.text);
    }
    if lines.iter().all(|l| l.pass) {
        println!("acceptance: all {} criteria pass", lines.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of {} criteria fail", lines.iter().filter(|l| !l.pass).count(), lines.len());
        ExitCode::FAILURE
    }
}

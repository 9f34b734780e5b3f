//! Scene → EVG → arrangement → cover → cutting → index, with a stats report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use viscount_core::arrangement::Arrangement;
use viscount_core::cover::{build_cover, verify_cover, Cover, CoverReport};
use viscount_core::cutting::{build_cutting, CuttingError};
use viscount_core::evg::{build_evg, EdgeKind, Evg};
use viscount_core::index::{Index, IndexError};
use viscount_core::trapmap::TrapMapError;
use viscount_core::Scene;

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("arrangement: {0}")]
    Arrangement(#[from] TrapMapError),
    #[error("cutting: {0}")]
    Cutting(#[from] CuttingError),
    #[error("index: {0}")]
    Index(Box<IndexError>),
}

impl From<IndexError> for BuildError {
    fn from(e: IndexError) -> Self {
        BuildError::Index(Box::new(e))
    }
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// The alpha-independent half of the pipeline.
pub struct Prepared {
    pub evg: Evg,
    pub arrangement: Arrangement,
    pub cover: Cover,
    pub cover_check: Option<CoverReport>,
    times: [f64; 3],
}

pub fn prepare(scene: &Scene, cfg: &RunConfig) -> Result<Prepared, BuildError> {
    cfg.validate()?;
    let t = Instant::now();
    let evg = build_evg(scene);
    let t_evg = millis(t);
    let t = Instant::now();
    let arrangement = Arrangement::from_evg(scene, &evg, cfg.seed)?;
    let t_arr = millis(t);
    let t = Instant::now();
    let cover = build_cover(&arrangement.map, &arrangement.labels, scene.len());
    let cover_check = (cfg.cover_samples > 0).then(|| verify_cover(&cover, scene, cfg.cover_samples, cfg.seed));
    let t_cover = millis(t);
    Ok(Prepared { evg, arrangement, cover, cover_check, times: [t_evg, t_arr, t_cover] })
}

pub struct Built {
    pub index: Index,
    pub report: BuildReport,
}

impl Prepared {
    /// Cutting and index for `cfg.alpha`.
    pub fn build_index(&self, scene: &Scene, cfg: &RunConfig) -> Result<Built, BuildError> {
        cfg.validate()?;
        let params = cfg.cutting_params();
        let t = Instant::now();
        let cutting = build_cutting(self.cover.edges(), scene.bbox(), &params, cfg.seed)?;
        let t_cut = millis(t);
        let stats = cutting.stats(&params);
        let t = Instant::now();
        let index = Index::build(scene.clone(), cutting, &cfg.index_options())?;
        let t_index = millis(t);
        let a = self.arrangement.stats();
        let cs = self.cover.stats();
        let ctr = index.counters();
        let visibility_edges = self.evg.edges.iter().filter(|e| e.kind == EdgeKind::Visibility).count();
        let report = BuildReport {
            config: cfg.clone(),
            scene: SceneReport { segments: scene.len(), bbox: bbox_strings(scene) },
            evg: EvgReport { edges: self.evg.edge_count(), visibility_edges, extension_edges: self.evg.edge_count() - visibility_edges },
            arrangement: ArrangementReport {
                critical_edges: a.critical_edges,
                traps: a.traps,
                crossings: a.crossings,
                faces: a.faces,
                label_histogram: a.label_histogram,
            },
            cover: CoverSummary {
                triangles: cs.triangles,
                shapes: cs.shapes,
                edges: cs.edges,
                evg_edges: self.evg.edge_count(),
                per_color: cs.per_color,
                check: self.cover_check.as_ref().map(|c| CoverCheck { samples: c.samples, rejected: c.rejected, counterexamples: c.counterexamples.len() }),
            },
            cutting: CuttingReport {
                alpha: cfg.alpha.to_ratio_string(),
                edges: stats.edges,
                r: stats.r,
                cells: stats.cells,
                retry_count: stats.retry_count,
                max_crossing: stats.max_crossing,
                crossing_bound: stats.crossing_bound,
                cell_bound: stats.cell_bound,
                crossing_histogram: stats.crossing_histogram,
            },
            index: IndexReport {
                cells: index.cells().len(),
                oracle_calls: ctr.oracle_calls,
                walks: ctr.walks,
                candidates_scanned: ctr.candidates_scanned,
                colors_tested: ctr.colors_tested,
                verified: ctr.verified,
            },
            timing_ms: cfg.timing.then_some(StageTimes { evg: self.times[0], arrangement: self.times[1], cover: self.times[2], cutting: t_cut, index: t_index }),
        };
        Ok(Built { index, report })
    }
}

/// Runs the whole pipeline for `cfg.alpha`.
pub fn build(scene: &Scene, cfg: &RunConfig) -> Result<(Prepared, Built), BuildError> {
    let prepared = prepare(scene, cfg)?;
    let built = prepared.build_index(scene, cfg)?;
    Ok((prepared, built))
}

fn bbox_strings(scene: &Scene) -> [String; 4] {
    let b = scene.bbox();
    [&b.min.x, &b.min.y, &b.max.x, &b.max.y].map(|v| v.to_ratio_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub config: RunConfig,
    pub scene: SceneReport,
    pub evg: EvgReport,
    pub arrangement: ArrangementReport,
    pub cover: CoverSummary,
    pub cutting: CuttingReport,
    pub index: IndexReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<StageTimes>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneReport {
    pub segments: usize,
    pub bbox: [String; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvgReport {
    /// `m`.
    pub edges: usize,
    pub visibility_edges: usize,
    pub extension_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrangementReport {
    pub critical_edges: usize,
    pub traps: usize,
    pub crossings: usize,
    pub faces: usize,
    /// Positive-area traps per visible count.
    pub label_histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverSummary {
    /// `|VT_S|`.
    pub triangles: usize,
    pub shapes: usize,
    /// `|E|`.
    pub edges: usize,
    pub evg_edges: usize,
    pub per_color: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CoverCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverCheck {
    pub samples: usize,
    pub rejected: usize,
    pub counterexamples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuttingReport {
    pub alpha: String,
    pub edges: usize,
    pub r: usize,
    pub cells: usize,
    pub retry_count: u32,
    pub max_crossing: usize,
    pub crossing_bound: f64,
    pub cell_bound: f64,
    pub crossing_histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub cells: usize,
    pub oracle_calls: usize,
    pub walks: usize,
    pub candidates_scanned: usize,
    pub colors_tested: usize,
    pub verified: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTimes {
    pub evg: f64,
    pub arrangement: f64,
    pub cover: f64,
    pub cutting: f64,
    pub index: f64,
}

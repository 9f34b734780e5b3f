//! Versioned JSON container for a built index.
//!
//! Every coordinate is an exact `"n/d"` string. The file holds the scene, the
//! edge set `E`, the cutting sample and one `(rep, count)` pair per cell; the
//! cutting itself is rebuilt from the sample on load, and every stored
//! invariant is checked again before the index is handed out.

use serde::{Deserialize, Serialize};
use viscount_core::cover::CoverEdge;
use viscount_core::cutting::{sample_size, Cutting};
use viscount_core::index::{Index, IndexCell};
use viscount_core::{Point, Rect, Scalar, Scene, SceneError, Segment};

use crate::config::{ConfigError, RunConfig};

pub const FORMAT: &str = "viscount-index";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("malformed index file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported index file: format `{format}` version {version}")]
    Version { format: String, version: u32 },
    #[error("invalid rational `{0}`")]
    Number(String),
    #[error("stored config: {0}")]
    Config(#[from] ConfigError),
    #[error("stored scene: {0}")]
    Scene(#[from] SceneError),
    #[error("inconsistent index: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexFile {
    format: String,
    version: u32,
    config: RunConfig,
    scene: SceneRecord,
    edges: Vec<EdgeRecord>,
    cutting: CuttingRecord,
    cells: Vec<CellRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneRecord {
    bbox: [String; 4],
    segments: Vec<[String; 4]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    a: [String; 2],
    b: [String; 2],
    colors: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CuttingRecord {
    alpha: String,
    r: usize,
    sample_seed: u64,
    retry_count: u32,
    sample: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellRecord {
    rep: [String; 2],
    count: usize,
}

fn s(v: &Scalar) -> String {
    v.to_ratio_string()
}

fn pt(p: &Point) -> [String; 2] {
    [s(&p.x), s(&p.y)]
}

fn num(v: &str) -> Result<Scalar, PersistError> {
    v.parse().map_err(|_| PersistError::Number(v.to_owned()))
}

fn point(v: &[String; 2]) -> Result<Point, PersistError> {
    Ok(Point::new(num(&v[0])?, num(&v[1])?))
}

pub fn index_to_json(index: &Index, config: &RunConfig) -> String {
    let scene = index.scene();
    let cutting = index.cutting();
    let b = scene.bbox();
    let file = IndexFile {
        format: FORMAT.into(),
        version: VERSION,
        config: config.clone(),
        scene: SceneRecord {
            bbox: [s(&b.min.x), s(&b.min.y), s(&b.max.x), s(&b.max.y)],
            segments: scene.segments().iter().map(|g| [s(&g.a.x), s(&g.a.y), s(&g.b.x), s(&g.b.y)]).collect(),
        },
        edges: cutting.edges().iter().map(|e| EdgeRecord { a: pt(&e.segment.a), b: pt(&e.segment.b), colors: e.colors.clone() }).collect(),
        cutting: CuttingRecord {
            alpha: s(&cutting.alpha),
            r: cutting.r,
            sample_seed: cutting.sample_seed,
            retry_count: cutting.retry_count,
            sample: cutting.sample.clone(),
        },
        cells: index.cells().iter().map(|c| CellRecord { rep: pt(&c.rep), count: c.count }).collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("index serializes");
    out.push('\n');
    out
}

fn invalid(msg: String) -> PersistError {
    PersistError::Invalid(msg)
}

/// Parses and re-validates an index file.
pub fn index_from_json(text: &str) -> Result<(Index, RunConfig), PersistError> {
    let file: IndexFile = serde_json::from_str(text)?;
    if file.format != FORMAT || file.version != VERSION {
        return Err(PersistError::Version { format: file.format, version: file.version });
    }
    file.config.validate()?;
    let [x0, y0, x1, y1] = &file.scene.bbox;
    let bbox = Rect::new(Point::new(num(x0)?, num(y0)?), Point::new(num(x1)?, num(y1)?));
    let mut segments = Vec::with_capacity(file.scene.segments.len());
    for [ax, ay, bx, by] in &file.scene.segments {
        segments.push(Segment::new(Point::new(num(ax)?, num(ay)?), Point::new(num(bx)?, num(by)?)));
    }
    let scene = Scene::new(bbox, segments)?;
    let mut edges = Vec::with_capacity(file.edges.len());
    for (i, e) in file.edges.iter().enumerate() {
        let (a, b) = (point(&e.a)?, point(&e.b)?);
        if a == b {
            return Err(invalid(format!("edge {i} is degenerate")));
        }
        if e.colors.is_empty() || e.colors.iter().any(|&c| c >= scene.len()) || !e.colors.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid(format!("edge {i} has an invalid color list")));
        }
        edges.push(CoverEdge { segment: Segment::new(a, b), colors: e.colors.clone() });
    }
    let c = &file.cutting;
    let alpha = num(&c.alpha)?;
    if alpha != file.config.alpha {
        return Err(invalid(format!("cutting alpha {} differs from config alpha {}", alpha, file.config.alpha)));
    }
    let r = sample_size(edges.len(), &alpha);
    if c.r != r || c.sample.len() != r {
        return Err(invalid(format!("stored r {} and sample of {} for an expected r of {r}", c.r, c.sample.len())));
    }
    if c.sample.iter().any(|&k| k >= edges.len()) || !c.sample.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("sample ids out of range or unsorted".into()));
    }
    let cutting = Cutting::from_sample(&edges, scene.bbox(), alpha, c.sample.clone(), c.sample_seed, c.retry_count).map_err(|e| invalid(format!("cutting rebuild: {e}")))?;
    if cutting.len() != file.cells.len() {
        return Err(invalid(format!("{} stored cells for {} cutting cells", file.cells.len(), cutting.len())));
    }
    let mut cells = Vec::with_capacity(file.cells.len());
    for (i, cell) in file.cells.iter().enumerate() {
        let rep = point(&cell.rep)?;
        if cutting.locate(&rep) != Some(i) || cutting.on_edge(&rep) || scene.on_any_segment(&rep) {
            return Err(invalid(format!("representative of cell {i} is not a general-position point of that cell")));
        }
        if cell.count > scene.len() {
            return Err(invalid(format!("cell {i} count {} exceeds {} segments", cell.count, scene.len())));
        }
        cells.push(IndexCell { rep, count: cell.count });
    }
    Ok((Index::from_parts(scene, cutting, cells), file.config))
}

//! Text scene files.
//!
//! ```text
//! # comment lines start with '#'
//! bbox 0 0 10 10
//! 3 5 7 5
//! 3.5 3 6.5 3
//! ```
//!
//! Coordinates are decimal literals. `n/d` is also accepted, and is what
//! [`format_scene`] writes for values without a terminating decimal form, so
//! every scene survives a save/load round trip unchanged.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use viscount_core::evg::{EdgeKind, Evg, Hit};
use viscount_core::{Point, Rect, Scalar, Scene, SceneError, Segment};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid scene: {0}")]
    Scene(#[from] SceneError),
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(i, t)| (line[..i].chars().count() + 1, t)).collect()
}

fn coords(line_no: usize, line: &str, toks: &[(usize, &str)]) -> Result<[Scalar; 4], ParseError> {
    if toks.len() != 4 {
        let column = toks.get(4).map_or(line.chars().count() + 1, |t| t.0);
        return Err(ParseError { line: line_no, column, message: format!("expected 4 coordinates, found {}", toks.len()) });
    }
    let mut out = Vec::with_capacity(4);
    for &(column, t) in toks {
        out.push(t.parse().map_err(|_| ParseError { line: line_no, column, message: format!("invalid number `{t}`") })?);
    }
    Ok(out.try_into().expect("four coordinates"))
}

/// Parses and validates a scene.
pub fn parse_scene(text: &str) -> Result<Scene, LoadError> {
    let mut bbox = None;
    let mut segments = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let toks = tokens(line);
        match toks.first() {
            None => continue,
            Some((_, t)) if t.starts_with('#') => continue,
            _ => {}
        }
        if bbox.is_none() {
            let (column, head) = toks[0];
            if head != "bbox" {
                return Err(ParseError { line: line_no, column, message: format!("expected `bbox`, found `{head}`") }.into());
            }
            let [x0, y0, x1, y1] = coords(line_no, line, &toks[1..])?;
            bbox = Some(Rect::new(Point::new(x0, y0), Point::new(x1, y1)));
            continue;
        }
        let [x1, y1, x2, y2] = coords(line_no, line, &toks)?;
        segments.push(Segment::new(Point::new(x1, y1), Point::new(x2, y2)));
    }
    let bbox = bbox.ok_or(ParseError { line: last_line.max(1), column: 1, message: "missing `bbox` line".into() })?;
    Ok(Scene::new(bbox, segments)?)
}

fn push_coords(out: &mut String, values: &[&Scalar]) {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    out.push_str(&parts.join(" "));
    out.push('\n');
}

/// Canonical text form; `parse_scene(&format_scene(s)) == Ok(s)`.
pub fn format_scene(scene: &Scene) -> String {
    let b = scene.bbox();
    let mut out = String::from("bbox ");
    push_coords(&mut out, &[&b.min.x, &b.min.y, &b.max.x, &b.max.y]);
    for s in scene.segments() {
        push_coords(&mut out, &[&s.a.x, &s.a.y, &s.b.x, &s.b.y]);
    }
    out
}

pub fn read_scene(path: &Path) -> Result<Scene, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_owned(), source })?;
    parse_scene(&text)
}

pub fn write_scene(path: &Path, scene: &Scene) -> std::io::Result<()> {
    std::fs::write(path, format_scene(scene))
}

/// Scene file followed by the EVG as comment lines, one edge per line:
/// `# edge <vis|ext> x1 y1 x2 y2 incident=<ids> hit=<segment id|bbox|->`.
/// The result still loads as the plain scene.
pub fn format_evg_dump(scene: &Scene, evg: &Evg) -> String {
    let mut out = format_scene(scene);
    let _ = writeln!(out, "# evg edges={} vertices={}", evg.edge_count(), evg.vertices.len());
    for e in &evg.edges {
        let kind = match e.kind {
            EdgeKind::Visibility => "vis",
            EdgeKind::Extension => "ext",
        };
        let incident: Vec<String> = e.incident.iter().map(|i| i.to_string()).collect();
        let hit = match e.hit {
            Some(Hit::Segment(s)) => s.to_string(),
            Some(Hit::BoundingBox) => "bbox".into(),
            None => "-".into(),
        };
        let s = &e.segment;
        let _ = writeln!(out, "# edge {kind} {} {} {} {} incident={} hit={hit}", s.a.x, s.a.y, s.b.x, s.b.y, incident.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENE_B: &str = "bbox 0 0 10 10\n3 5 7 5\n3.5 3 6.5 3\n";

    #[test]
    fn round_trip_is_byte_stable() {
        let scene = parse_scene(SCENE_B).unwrap();
        assert_eq!(format_scene(&scene), SCENE_B);
        let thirds = parse_scene("bbox 0 0 1 1\n1/3 1/3 2/3 0.5\n").unwrap();
        let text = format_scene(&thirds);
        assert_eq!(text, "bbox 0 0 1 1\n1/3 1/3 2/3 0.5\n");
        assert_eq!(parse_scene(&text).unwrap(), thirds);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# scene B\n\nbbox 0 0 10 10\n  # inner comment\n3 5 7 5\n\n3.5 3 6.5 3\n";
        assert_eq!(parse_scene(text).unwrap(), parse_scene(SCENE_B).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let err = |t: &str| match parse_scene(t) {
            Err(LoadError::Parse(e)) => (e.line, e.column),
            other => panic!("{other:?}"),
        };
        assert_eq!(err("bbox 0 0 10 10\n3 5 7x 5\n"), (2, 5));
        assert_eq!(err("box 0 0 10 10\n"), (1, 1));
        assert_eq!(err("bbox 0 0 10 10\n1 2 3\n"), (2, 6));
        assert_eq!(err("bbox 0 0 10 10\n1 2 3 4 5\n"), (2, 9));
        assert_eq!(err("# nothing\n"), (1, 1));
    }

    #[test]
    fn validation_runs_on_load() {
        let crossing = "bbox 0 0 10 10\n1 1 9 9\n1 9 9 1\n";
        assert!(matches!(parse_scene(crossing), Err(LoadError::Scene(SceneError::DisjointnessViolation(0, 1)))));
        assert!(matches!(parse_scene("bbox 0 0 10 10\n0 1 5 1\n"), Err(LoadError::Scene(SceneError::OutOfBounds(0)))));
    }

    #[test]
    fn evg_dump_loads_as_scene() {
        let scene = parse_scene(SCENE_B).unwrap();
        let evg = viscount_core::evg::build_evg(&scene);
        let dump = format_evg_dump(&scene, &evg);
        assert_eq!(dump.lines().filter(|l| l.starts_with("# edge ")).count(), evg.edge_count());
        assert_eq!(parse_scene(&dump).unwrap(), scene);
    }
}

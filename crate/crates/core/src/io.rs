//! Plain-text carriers for detections, homographies, per-frame affines and
//! results.
//!
//! Detections and results use the MOTChallenge CSV layout
//! `frame,id,left,top,width,height,conf,x,y,z`. A homography file holds nine
//! whitespace-separated numbers in row-major order. An affine file holds one
//! `frame a11 a12 a13 a21 a22 a23` row per frame.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::Labeled;
use crate::geometry::{AffineMotion, Homography};
use crate::image_filter::BBox;
use crate::tracker::{Detection, FrameResult};

pub type DetectionsByFrame = BTreeMap<i64, Vec<Detection>>;
pub type AffinesByFrame = BTreeMap<i64, AffineMotion>;

/// Everything needed to track one sequence.
#[derive(Debug, Clone)]
pub struct SequenceBundle {
    pub name: String,
    pub detections: DetectionsByFrame,
    pub h0: Homography,
    pub affines: AffinesByFrame,
    pub frame_rate: f64,
}

impl SequenceBundle {
    pub fn load(dets: &Path, homography: &Path, affines: Option<&Path>, frame_rate: f64) -> Result<Self> {
        let name = dets.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Self {
            name,
            detections: read_detections(dets)?,
            h0: read_homography(homography)?,
            affines: match affines {
                Some(p) => read_affines(p)?,
                None => AffinesByFrame::new(),
            },
            frame_rate,
        })
    }

    /// Affine for `frame`; frames without a row are identity.
    pub fn affine(&self, frame: i64) -> AffineMotion {
        self.affines.get(&frame).copied().unwrap_or_else(AffineMotion::identity)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn number(path: &Path, line: usize, field: &str, name: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(path, line, format!("{name}: cannot parse {field:?} as a number")))
}

fn frame_index(path: &Path, line: usize, field: &str) -> Result<i64> {
    let v = number(path, line, field, "frame")?;
    if v.fract() != 0.0 || !v.is_finite() || v.abs() > 1e15 {
        return Err(Error::parse(path, line, format!("frame {field:?} is not an integer")));
    }
    Ok(v as i64)
}

/// One MOTChallenge row: frame, id, box, and the confidence if present.
fn mot_row(path: &Path, line: usize, text: &str) -> Result<(i64, f64, BBox, Option<f64>)> {
    let fields: Vec<&str> = text.split(',').collect();
    if fields.len() < 6 {
        return Err(Error::parse(path, line, format!("expected at least 6 fields, found {}", fields.len())));
    }
    let frame = frame_index(path, line, fields[0])?;
    let id = number(path, line, fields[1], "id")?;
    let l = number(path, line, fields[2], "left")?;
    let t = number(path, line, fields[3], "top")?;
    let mut w = number(path, line, fields[4], "width")?;
    let mut h = number(path, line, fields[5], "height")?;
    if !(l.is_finite() && t.is_finite() && w.is_finite() && h.is_finite()) {
        return Err(Error::parse(path, line, "non-finite box"));
    }
    if w < 0.0 || h < 0.0 {
        log::warn!("{}:{line}: negative box size ({w}, {h}) clamped to zero", path.display());
        w = w.max(0.0);
        h = h.max(0.0);
    }
    let conf = match fields.get(6) {
        Some(f) if !f.trim().is_empty() => Some(number(path, line, f, "confidence")?),
        _ => None,
    };
    Ok((frame, id, BBox::from_ltwh(l, t, w, h), conf))
}

/// Parses MOTChallenge detections; the id column is ignored and a missing
/// confidence reads as 1.
pub fn parse_detections(text: &str, path: &Path) -> Result<DetectionsByFrame> {
    let mut out = DetectionsByFrame::new();
    for (line, row) in content_lines(text) {
        let (frame, _, bbox, conf) = mot_row(path, line, row)?;
        out.entry(frame).or_default().push(Detection::new(bbox, conf.unwrap_or(1.0)));
    }
    Ok(out)
}

pub fn read_detections(path: &Path) -> Result<DetectionsByFrame> {
    parse_detections(&std::fs::read_to_string(path)?, path)
}

/// Parses a ground-truth or result file into per-frame labelled boxes.
pub fn parse_labeled(text: &str, path: &Path) -> Result<Labeled> {
    let mut out = Labeled::new();
    for (line, row) in content_lines(text) {
        let (frame, id, bbox, _) = mot_row(path, line, row)?;
        if id < 0.0 || id.fract() != 0.0 {
            return Err(Error::parse(path, line, format!("track id {id} is not a non-negative integer")));
        }
        out.entry(frame).or_default().push((id as u64, bbox));
    }
    Ok(out)
}

pub fn read_labeled(path: &Path) -> Result<Labeled> {
    parse_labeled(&std::fs::read_to_string(path)?, path)
}

pub fn parse_homography(text: &str, path: &Path) -> Result<Homography> {
    let mut values = Vec::with_capacity(9);
    for (line, row) in content_lines(text) {
        for tok in row.split_whitespace() {
            values.push((line, number(path, line, tok, "homography entry")?));
        }
    }
    if values.len() != 9 {
        let line = values.last().map_or(1, |v| v.0);
        return Err(Error::parse(path, line, format!("expected 9 homography entries, found {}", values.len())));
    }
    let mut e = [0.0; 9];
    for (dst, (_, v)) in e.iter_mut().zip(values) {
        *dst = v;
    }
    let h = Homography::new(e)?;
    let det = h.matrix().determinant();
    let scale = h.entries().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if det.abs() <= 1e-12 * scale.powi(3) {
        return Err(Error::SingularHomography(format!("{}: determinant {det:e}", path.display())));
    }
    Ok(h)
}

pub fn read_homography(path: &Path) -> Result<Homography> {
    parse_homography(&std::fs::read_to_string(path)?, path)
}

/// Parses per-frame affines. A repeated frame keeps its last row.
pub fn parse_affines(text: &str, path: &Path) -> Result<AffinesByFrame> {
    let mut out = AffinesByFrame::new();
    for (line, row) in content_lines(text) {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != 7 {
            return Err(Error::parse(path, line, format!("expected 7 fields, found {}", fields.len())));
        }
        let frame = frame_index(path, line, fields[0])?;
        let mut a = [0.0; 6];
        for (k, f) in fields[1..].iter().enumerate() {
            a[k] = number(path, line, f, "affine entry")?;
        }
        let affine = AffineMotion::from_rows(a);
        if !affine.is_finite() {
            return Err(Error::parse(path, line, "non-finite affine entry"));
        }
        if out.insert(frame, affine).is_some() {
            log::warn!("{}:{line}: duplicate affine for frame {frame}; keeping the later row", path.display());
        }
    }
    Ok(out)
}

pub fn read_affines(path: &Path) -> Result<AffinesByFrame> {
    parse_affines(&std::fs::read_to_string(path)?, path)
}

fn push_row(out: &mut String, frame: i64, id: u64, b: &BBox, conf: f64) {
    let [l, t, w, h] = b.ltwh();
    writeln!(out, "{frame},{id},{l:.2},{t:.2},{w:.2},{h:.2},{conf:.4},-1,-1,-1").unwrap();
}

/// MOTChallenge result rows, frames then ids ascending.
pub fn format_results(results: &[FrameResult]) -> String {
    let mut rows: Vec<_> = results.iter().flat_map(|r| r.outputs.iter()).collect();
    rows.sort_by_key(|r| (r.frame, r.id));
    let mut out = String::new();
    for r in rows {
        push_row(&mut out, r.frame, r.id, &r.bbox, r.conf);
    }
    out
}

pub fn write_results(results: &[FrameResult], path: &Path) -> Result<()> {
    std::fs::write(path, format_results(results))?;
    Ok(())
}

/// Ground-truth rows with confidence 1.
pub fn format_labeled(labeled: &Labeled) -> String {
    let mut out = String::new();
    for (&frame, objs) in labeled {
        let mut objs = objs.clone();
        objs.sort_by_key(|o| o.0);
        for (id, b) in objs {
            push_row(&mut out, frame, id, &b, 1.0);
        }
    }
    out
}

pub fn format_detections(dets: &DetectionsByFrame) -> String {
    let mut out = String::new();
    for (&frame, ds) in dets {
        for d in ds {
            let [l, t, w, h] = d.bbox.ltwh();
            writeln!(out, "{frame},-1,{l:.2},{t:.2},{w:.2},{h:.2},{:.4},-1,-1,-1", d.conf).unwrap();
        }
    }
    out
}

pub fn format_homography(h: &Homography) -> String {
    let e = h.entries();
    let mut out = String::new();
    for row in e.chunks(3) {
        writeln!(out, "{} {} {}", row[0], row[1], row[2]).unwrap();
    }
    out
}

pub fn format_affines(affines: &AffinesByFrame) -> String {
    let mut out = String::new();
    for (frame, a) in affines {
        let r = a.rows();
        writeln!(out, "{frame} {} {} {} {} {} {}", r[0], r[1], r[2], r[3], r[4], r[5]).unwrap();
    }
    out
}

/// Paths of a bundle written by [`write_bundle`].
#[derive(Debug, Clone)]
pub struct BundlePaths {
    pub detections: PathBuf,
    pub homography: PathBuf,
    pub affines: PathBuf,
    pub gt: PathBuf,
}

impl BundlePaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            detections: dir.join("det.txt"),
            homography: dir.join("homography.txt"),
            affines: dir.join("affines.txt"),
            gt: dir.join("gt.txt"),
        }
    }
}

/// Writes detections, homography, affines and ground truth into `dir`.
pub fn write_bundle(
    dir: &Path,
    dets: &DetectionsByFrame,
    h0: &Homography,
    affines: &AffinesByFrame,
    gt: &Labeled,
) -> Result<BundlePaths> {
    std::fs::create_dir_all(dir)?;
    let paths = BundlePaths::in_dir(dir);
    std::fs::write(&paths.detections, format_detections(dets))?;
    std::fs::write(&paths.homography, format_homography(h0))?;
    std::fs::write(&paths.affines, format_affines(affines))?;
    std::fs::write(&paths.gt, format_labeled(gt))?;
    Ok(paths)
}

//! Per-frame tracking pipeline.
//!
//! Each frame: predict every track, associate confirmed and coasted tracks
//! with high-confidence detections (stage 1), then the leftovers with the
//! low-confidence and still-unmatched detections (stage 2), coast or drop
//! the tracks that remain, match tentative tracks against the remaining
//! high-confidence detections (stage 3), and start new tracks from what is
//! left.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::association::{
    maximize_assignment, p_of_d, stage1_score, stage2_score, AssocModelProbs,
};
use crate::config::{MixedScore, TrackerConfig};
use crate::error::{Error, Result};
use crate::geometry::{apply_affine_wh, bottom_centre, AffineMotion, Homography, ImagePoint};
use crate::ground_imm::{ImmState, Prediction};
use crate::image_filter::{biou, coast_box, BBox, BoxBuffer};
use crate::linalg::{inv2, psd_repair, Mat2, Vec2};
use crate::noise::ground_process_q;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub bbox: BBox,
    pub conf: f64,
}

impl Detection {
    pub fn new(bbox: BBox, conf: f64) -> Self {
        Self { bbox, conf }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lifecycle {
    Tentative,
    Confirmed,
    Coasted,
}

#[derive(Debug, Clone)]
pub struct Track {
    pub id: u64,
    pub lifecycle: Lifecycle,
    pub imm: ImmState,
    pub assoc_mu: AssocModelProbs,
    pub box_buf: BoxBuffer,
    /// Width and height carried through coasting.
    pub last_wh: (f64, f64),
    /// Box used while coasting (last associated box when coupling is off).
    pub coast_bbox: BBox,
    pub frames_since_update: u32,
    pub consecutive_hits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputRow {
    pub frame: i64,
    pub id: u64,
    pub bbox: BBox,
    pub conf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackDiagnostics {
    pub id: u64,
    pub lifecycle: Lifecycle,
    /// Static / dynamic camera-model probabilities.
    pub camera_mu: [f64; 2],
    pub assoc_mu: AssocModelProbs,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameResult {
    pub frame: i64,
    pub outputs: Vec<OutputRow>,
    pub diagnostics: Vec<TrackDiagnostics>,
}

/// Splits detections into high- and low-confidence sets; anything below
/// `d_low` is dropped.
pub fn split_detections(dets: &[Detection], d_high: f64, d_low: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&d_low) || !(0.0..=1.0).contains(&d_high) || d_low > d_high {
        return Err(Error::InvalidThresholds { d_low, d_high });
    }
    let high = (0..dets.len()).filter(|&k| dets[k].conf >= d_high).collect();
    let low = (0..dets.len()).filter(|&k| dets[k].conf >= d_low && dets[k].conf < d_high).collect();
    Ok((high, low))
}

/// Per-track quantities shared by every candidate detection this frame.
struct Predicted {
    pred: Prediction,
    assoc_mu: AssocModelProbs,
    bbox: BBox,
    z_hat: Option<ImagePoint>,
    s_inv: Mat2,
    ln_det: f64,
}

impl Predicted {
    fn p_of_d(&self, z: ImagePoint, dof: u32) -> f64 {
        let Some(z_hat) = self.z_hat else { return 0.0 };
        let d = Vec2::new(z.x - z_hat.x, z.y - z_hat.y);
        p_of_d((d.transpose() * self.s_inv * d)[0] + self.ln_det, dof)
    }
}

pub struct Tracker {
    cfg: TrackerConfig,
    h0: Homography,
    tracks: Vec<Track>,
    next_id: u64,
    last_frame: Option<i64>,
}

impl Tracker {
    pub fn new(cfg: TrackerConfig, h0: Homography) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, h0, tracks: Vec::new(), next_id: 1, last_frame: None })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    fn predict_track(&self, t: &Track, affine: &AffineMotion, dt: f64) -> Result<(Predicted, (f64, f64))> {
        let q_ground = ground_process_q(self.cfg.sigma_x, self.cfg.sigma_y, dt);
        let pred = t.imm.predict(affine, &q_ground, dt)?;
        let assoc_mu = t.assoc_mu.predict(self.cfg.p_ii, self.cfg.p_ww);
        let mut wh = t.last_wh;
        let z_hat = pred.state.measure().ok();
        let bbox = if t.lifecycle == Lifecycle::Coasted {
            if self.cfg.coast_coupling {
                wh = apply_affine_wh(affine, wh.0, wh.1);
                match z_hat {
                    Some(p) => coast_box(p, (wh.0.max(0.0), wh.1.max(0.0))),
                    None => t.box_buf.predict()?,
                }
            } else {
                t.coast_bbox
            }
        } else {
            t.box_buf.predict()?
        };
        let (s_inv, ln_det) = match pred.state.jacobian() {
            Ok(j) => {
                let s = psd_repair(&(j * pred.state.p * j.transpose() + t.imm.r_prev(pred.mu_pred)));
                match inv2(&s) {
                    Some((inv, det)) => (inv, det.ln()),
                    None => (Mat2::zeros(), f64::INFINITY),
                }
            }
            Err(_) => (Mat2::zeros(), f64::INFINITY),
        };
        Ok((Predicted { pred, assoc_mu, bbox, z_hat, s_inv, ln_det }, wh))
    }

    fn mixed_score(&self, p: &Predicted, det: &Detection) -> f64 {
        let p_d = p.p_of_d(bottom_centre(&det.bbox), self.cfg.chi2_dof);
        match self.cfg.mixed_score {
            MixedScore::ImmLike => stage2_score(&p.assoc_mu, p_d, biou(&det.bbox, &p.bbox, self.cfg.b), det.conf),
            MixedScore::GroundOnly => p_d * det.conf,
        }
    }

    fn associate(
        &self,
        tracks: &[usize],
        dets: &[usize],
        gate: f64,
        score: impl Fn(usize, usize) -> f64,
    ) -> Vec<(usize, usize)> {
        if tracks.is_empty() || dets.is_empty() {
            return Vec::new();
        }
        let w = DMatrix::from_fn(tracks.len(), dets.len(), |i, j| score(tracks[i], dets[j]));
        maximize_assignment(&w, gate).into_iter().map(|(i, j)| (tracks[i], dets[j])).collect()
    }

    fn new_track(&mut self, det: &Detection) -> Option<Track> {
        let imm = match ImmState::init(&det.bbox, &self.h0, &self.cfg) {
            Ok(imm) => imm,
            Err(e) => {
                log::warn!("cannot start a track from {:?}: {e}", det.bbox);
                return None;
            }
        };
        let mut box_buf = BoxBuffer::new(self.cfg.n);
        box_buf.push(det.bbox);
        let id = self.next_id;
        self.next_id += 1;
        Some(Track {
            id,
            lifecycle: Lifecycle::Tentative,
            imm,
            assoc_mu: AssocModelProbs::default(),
            box_buf,
            last_wh: (det.bbox.width(), det.bbox.height()),
            coast_bbox: det.bbox,
            frames_since_update: 0,
            consecutive_hits: 1,
        })
    }

    /// Measurement update of a matched track.
    fn apply_match(&self, t: &mut Track, p: &Predicted, det: &Detection) {
        let z = bottom_centre(&det.bbox);
        let lambda_w = p.p_of_d(z, self.cfg.chi2_dof);
        let lambda_i = biou(&det.bbox, &p.bbox, self.cfg.b);
        if let Err(e) = t.imm.update(z, &p.pred) {
            log::warn!("track {}: update failed ({e}); restarting its ground filter", t.id);
            match ImmState::init(&det.bbox, &self.h0, &self.cfg) {
                Ok(imm) => t.imm = imm,
                Err(_) => t.imm.coast(&p.pred),
            }
        }
        t.assoc_mu = p.assoc_mu.update_or_keep(lambda_i, lambda_w);
        if t.lifecycle == Lifecycle::Coasted {
            t.box_buf.clear_and_seed(det.bbox);
        } else {
            t.box_buf.push(det.bbox);
        }
        t.last_wh = (det.bbox.width(), det.bbox.height());
        t.coast_bbox = det.bbox;
        t.frames_since_update = 0;
    }

    pub fn step(&mut self, frame: i64, dets: &[Detection], affine: &AffineMotion) -> Result<FrameResult> {
        let gap = match self.last_frame {
            Some(prev) if frame <= prev => return Err(Error::NonMonotonicFrame { prev, got: frame }),
            Some(prev) => (frame - prev) as f64,
            None => 1.0,
        };
        let dt = self.cfg.dt * gap;
        let affine = if affine.is_finite() { *affine } else { AffineMotion::identity() };
        let (high, low) = split_detections(dets, self.cfg.d_high, self.cfg.d_low)?;

        let mut predicted = Vec::with_capacity(self.tracks.len());
        for t in &self.tracks {
            predicted.push(self.predict_track(t, &affine, dt)?);
        }

        let active: Vec<usize> = (0..self.tracks.len())
            .filter(|&i| self.tracks[i].lifecycle != Lifecycle::Tentative)
            .collect();
        let tentative: Vec<usize> = (0..self.tracks.len())
            .filter(|&i| self.tracks[i].lifecycle == Lifecycle::Tentative)
            .collect();
        let mut det_used = vec![false; dets.len()];
        let mut track_match: Vec<Option<usize>> = vec![None; self.tracks.len()];

        // stage 1
        let s1 = self.associate(&active, &high, self.cfg.alpha1, |ti, di| {
            let p = &predicted[ti].0;
            let det = &dets[di];
            let p_d = p.p_of_d(bottom_centre(&det.bbox), self.cfg.chi2_dof);
            stage1_score(p_d, biou(&det.bbox, &p.bbox, self.cfg.b), det.conf)
        });
        for (ti, di) in s1 {
            track_match[ti] = Some(di);
            det_used[di] = true;
        }

        // stage 2
        let rest_tracks: Vec<usize> = active.iter().copied().filter(|&i| track_match[i].is_none()).collect();
        let mut stage2_dets: Vec<usize> = high.iter().copied().filter(|&k| !det_used[k]).collect();
        stage2_dets.extend(low.iter().copied());
        stage2_dets.sort_unstable();
        let s2 = self.associate(&rest_tracks, &stage2_dets, self.cfg.alpha2, |ti, di| {
            self.mixed_score(&predicted[ti].0, &dets[di])
        });
        for (ti, di) in s2 {
            track_match[ti] = Some(di);
            det_used[di] = true;
        }

        // stage 3
        let rest_high: Vec<usize> = high.iter().copied().filter(|&k| !det_used[k]).collect();
        let s3 = self.associate(&tentative, &rest_high, self.cfg.alpha3, |ti, di| {
            self.mixed_score(&predicted[ti].0, &dets[di])
        });
        for (ti, di) in s3 {
            track_match[ti] = Some(di);
            det_used[di] = true;
        }

        if log::log_enabled!(log::Level::Trace) {
            for (ti, t) in self.tracks.iter().enumerate() {
                let p = &predicted[ti].0;
                for (di, det) in dets.iter().enumerate() {
                    let b = biou(&det.bbox, &p.bbox, self.cfg.b);
                    if b > 0.0 || track_match[ti] == Some(di) {
                        log::trace!(
                            "frame {frame} track {} {:?} det {di}: p_d {:.3} biou {:.3} conf {:.2} mu_i {:.2} matched {}",
                            t.id,
                            t.lifecycle,
                            p.p_of_d(bottom_centre(&det.bbox), self.cfg.chi2_dof),
                            b,
                            det.conf,
                            p.assoc_mu.mu_i,
                            track_match[ti] == Some(di)
                        );
                    }
                }
            }
        }

        let mut outputs = Vec::new();
        let mut tracks = std::mem::take(&mut self.tracks);
        let mut keep = vec![true; tracks.len()];
        for (ti, t) in tracks.iter_mut().enumerate() {
            let (p, wh) = &predicted[ti];
            match track_match[ti] {
                Some(di) => {
                    let det = &dets[di];
                    self.apply_match(t, p, det);
                    t.consecutive_hits += 1;
                    if t.lifecycle != Lifecycle::Tentative || t.consecutive_hits >= 2 {
                        t.lifecycle = Lifecycle::Confirmed;
                        outputs.push(OutputRow { frame, id: t.id, bbox: det.bbox, conf: det.conf });
                    }
                }
                None => {
                    if t.lifecycle == Lifecycle::Tentative {
                        keep[ti] = false;
                        continue;
                    }
                    t.imm.coast(&p.pred);
                    t.assoc_mu = p.assoc_mu;
                    if t.lifecycle == Lifecycle::Coasted && self.cfg.coast_coupling {
                        t.last_wh = *wh;
                    }
                    t.lifecycle = Lifecycle::Coasted;
                    t.consecutive_hits = 0;
                    t.frames_since_update += 1;
                    if t.frames_since_update > self.cfg.omega {
                        keep[ti] = false;
                    }
                }
            }
        }
        let mut k = keep.into_iter();
        tracks.retain(|_| k.next().unwrap());
        self.tracks = tracks;

        for &di in &high {
            if !det_used[di] {
                if let Some(t) = self.new_track(&dets[di]) {
                    self.tracks.push(t);
                }
            }
        }

        outputs.sort_by_key(|r| r.id);
        let diagnostics = self
            .tracks
            .iter()
            .map(|t| TrackDiagnostics { id: t.id, lifecycle: t.lifecycle, camera_mu: t.imm.mu, assoc_mu: t.assoc_mu })
            .collect();
        self.last_frame = Some(frame);
        Ok(FrameResult { frame, outputs, diagnostics })
    }
}

/// Tracks a whole sequence, stepping through every frame between the first
/// and last detection frame. Frames without an affine use the identity.
pub fn run_sequence(
    detections: &BTreeMap<i64, Vec<Detection>>,
    h0: &Homography,
    affines: &BTreeMap<i64, AffineMotion>,
    cfg: &TrackerConfig,
) -> Result<Vec<FrameResult>> {
    let mut tracker = Tracker::new(cfg.clone(), *h0)?;
    let (Some(&first), Some(&last)) = (detections.keys().next(), detections.keys().next_back()) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity((last - first + 1) as usize);
    for frame in first..=last {
        let dets = detections.get(&frame).map(Vec::as_slice).unwrap_or(&[]);
        let affine = affines.get(&frame).copied().unwrap_or_default();
        out.push(tracker.step(frame, dets, &affine)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(l: f64, t: f64, conf: f64) -> Detection {
        Detection::new(BBox::from_ltwh(l, t, 40.0, 100.0), conf)
    }

    fn scene_h() -> Homography {
        // ~40 px per metre, ground y increasing downwards in the image
        Homography::new([40.0, 0.0, 640.0, 0.0, 40.0, 300.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn split_examples() {
        let dets = [det(0.0, 0.0, 0.95), det(0.0, 0.0, 0.55), det(0.0, 0.0, 0.05)];
        let (h, l) = split_detections(&dets, 0.6, 0.1).unwrap();
        assert_eq!((h, l), (vec![0], vec![1]));
        let (h, l) = split_detections(&dets, 0.55, 0.55).unwrap();
        assert_eq!((h, l), (vec![0, 1], vec![]));
        assert!(matches!(split_detections(&dets, 0.5, 0.6), Err(Error::InvalidThresholds { .. })));
    }

    #[test]
    fn cold_start_makes_tentative_tracks() {
        let mut tr = Tracker::new(TrackerConfig::default(), scene_h()).unwrap();
        let r = tr.step(1, &[det(100.0, 100.0, 0.9), det(400.0, 100.0, 0.9)], &AffineMotion::identity()).unwrap();
        assert!(r.outputs.is_empty());
        assert_eq!(tr.tracks().len(), 2);
        assert!(tr.tracks().iter().all(|t| t.lifecycle == Lifecycle::Tentative));
    }

    #[test]
    fn confirm_on_second_hit_then_coast_and_delete() {
        let cfg = TrackerConfig { omega: 3, ..TrackerConfig::default() };
        let mut tr = Tracker::new(cfg, scene_h()).unwrap();
        let id = AffineMotion::identity();
        tr.step(1, &[det(100.0, 100.0, 0.9)], &id).unwrap();
        let r = tr.step(2, &[det(101.0, 100.0, 0.9)], &id).unwrap();
        assert_eq!(r.outputs.len(), 1);
        assert_eq!(r.outputs[0].id, 1);
        assert_eq!(tr.tracks()[0].lifecycle, Lifecycle::Confirmed);
        for f in 3..=5 {
            let r = tr.step(f, &[], &id).unwrap();
            assert!(r.outputs.is_empty());
            assert_eq!(tr.tracks()[0].lifecycle, Lifecycle::Coasted);
            assert!(tr.tracks()[0].frames_since_update <= 3);
        }
        tr.step(6, &[], &id).unwrap();
        assert!(tr.tracks().is_empty());
    }

    #[test]
    fn tentative_miss_deletes() {
        let mut tr = Tracker::new(TrackerConfig::default(), scene_h()).unwrap();
        let id = AffineMotion::identity();
        tr.step(1, &[det(100.0, 100.0, 0.9)], &id).unwrap();
        tr.step(2, &[], &id).unwrap();
        assert!(tr.tracks().is_empty());
        // ids are not reused
        tr.step(3, &[det(100.0, 100.0, 0.9)], &id).unwrap();
        assert_eq!(tr.tracks()[0].id, 2);
    }

    #[test]
    fn non_monotonic_frames_rejected() {
        let mut tr = Tracker::new(TrackerConfig::default(), scene_h()).unwrap();
        tr.step(5, &[], &AffineMotion::identity()).unwrap();
        assert!(matches!(
            tr.step(5, &[], &AffineMotion::identity()),
            Err(Error::NonMonotonicFrame { prev: 5, got: 5 })
        ));
    }

    #[test]
    fn low_confidence_never_starts_tracks() {
        let mut tr = Tracker::new(TrackerConfig::default(), scene_h()).unwrap();
        tr.step(1, &[det(100.0, 100.0, 0.55)], &AffineMotion::identity()).unwrap();
        assert!(tr.tracks().is_empty());
    }

    #[test]
    fn empty_sequence() {
        let r = run_sequence(&BTreeMap::new(), &scene_h(), &BTreeMap::new(), &TrackerConfig::default()).unwrap();
        assert!(r.is_empty());
    }
}

//! Deterministic synthetic scenes: agents walking on a ground plane, seen
//! through a homographic camera whose motion is scripted frame by frame.
//!
//! Randomness comes from ChaCha8 keyed by the scene seed. Every draw for
//! agent `k` in frame `f` uses stream `k` at word offset `f << 16`; camera
//! draws use stream `u64::MAX`. A scene is therefore reproducible from its
//! spec alone, independent of draw order elsewhere.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::eval::metrics::Labeled;
use crate::geometry::{apply_affine, AffineMotion, GroundPoint, Homography, ImagePoint};
use crate::image_filter::{coast_box, BBox};
use crate::tracker::Detection;

const CAMERA_STREAM: u64 = u64::MAX;

/// Vertical excursion of an agent's box, e.g. a jump, with the ground
/// position unchanged. The offset follows half a sine period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub start: i64,
    pub len: i64,
    pub height_px: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub start: GroundPoint,
    /// Metres per second.
    pub velocity: (f64, f64),
    /// Physical width and height in metres.
    pub size: (f64, f64),
    pub jumps: Vec<JumpEvent>,
    /// Inclusive frame ranges in which the agent is fully hidden.
    pub occlusions: Vec<(i64, i64)>,
}

impl AgentSpec {
    pub fn walker(start: GroundPoint, velocity: (f64, f64)) -> Self {
        Self { start, velocity, size: (0.5, 1.7), jumps: Vec::new(), occlusions: Vec::new() }
    }

    fn jump_offset(&self, frame: i64) -> f64 {
        self.jumps
            .iter()
            .filter(|j| frame >= j.start && frame < j.start + j.len)
            .map(|j| j.height_px * (std::f64::consts::PI * (frame - j.start) as f64 / j.len as f64).sin())
            .sum()
    }

    fn occluded(&self, frame: i64) -> bool {
        self.occlusions.iter().any(|&(a, b)| frame >= a && frame <= b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CameraScript {
    Static,
    /// Horizontal pan at `speed` px per frame, reversing direction so the
    /// view oscillates within `±amplitude` px of its start.
    Pan { speed: f64, amplitude: f64 },
    /// Explicit per-frame motion; entry `k` moves frame `k + 1` to `k + 2`.
    Custom(Vec<AffineMotion>),
}

impl CameraScript {
    fn motion(&self, frame: i64) -> AffineMotion {
        match self {
            CameraScript::Static => AffineMotion::identity(),
            CameraScript::Pan { speed, amplitude } => {
                // triangle wave: up for a quarter period, down for half, up for a quarter
                let quarter = (amplitude / speed).round().max(1.0) as i64;
                let k = (frame - 2).rem_euclid(4 * quarter);
                let dir = if k < quarter || k >= 3 * quarter { 1.0 } else { -1.0 };
                AffineMotion::translation(dir * speed, 0.0)
            }
            CameraScript::Custom(v) => v.get((frame - 2) as usize).copied().unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub seed: u64,
    pub n_frames: i64,
    pub fps: f64,
    pub agents: Vec<AgentSpec>,
    pub h0: Homography,
    pub camera: CameraScript,
    /// Std of the detected bottom-centre coordinates (and of width/height), px.
    pub noise_px: f64,
    pub dropout: f64,
    pub base_conf: f64,
    /// Confidence lost when fully covered by a nearer agent.
    pub occlusion_penalty: f64,
    pub conf_jitter: f64,
    /// Std of the translation error in the supplied per-frame affines, px.
    pub affine_noise_px: f64,
    pub image_size: (f64, f64),
}

/// Pinhole camera over a flat floor: focal length 800 px, principal point
/// (640, 360), 1.5 m above ground, ground `y = 0` at 10 m depth.
pub fn default_homography() -> Homography {
    let (f, cx, cy, hc, d0) = (800.0, 640.0, 360.0, 1.5, 10.0);
    Homography::new([f, cx, cx * d0, 0.0, cy, cy * d0 + f * hc, 0.0, 1.0, d0]).expect("valid camera")
}

impl SceneSpec {
    pub fn new(seed: u64, n_frames: i64, agents: Vec<AgentSpec>, camera: CameraScript) -> Self {
        Self {
            seed,
            n_frames,
            fps: 20.0,
            agents,
            h0: default_homography(),
            camera,
            noise_px: 1.0,
            dropout: 0.0,
            base_conf: 0.9,
            occlusion_penalty: 0.5,
            conf_jitter: 0.02,
            affine_noise_px: 0.0,
            image_size: (1280.0, 720.0),
        }
    }

    /// `n` agents walking in alternating directions on depth lanes 8 to 18 m
    /// from the camera, so neighbouring lanes pass each other mid-sequence.
    pub fn crossing(seed: u64, n_agents: usize, n_frames: i64, camera: CameraScript) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let duration = n_frames as f64 / 20.0;
        let agents = (0..n_agents)
            .map(|k| {
                let dir = if k % 2 == 0 { 1.0 } else { -1.0 };
                let lane = -2.0 + 10.0 * (k as f64 + 0.5) / n_agents as f64;
                let speed = rng.random_range(0.7..0.8);
                let span = speed * duration;
                // same-direction walkers keep a 3 m headway so occlusions come from passing
                let slot = (k / 2) as f64 - 0.5 * ((n_agents - 1) / 2) as f64;
                let x0 = -dir * 0.5 * span + 3.0 * slot + rng.random_range(-0.3..0.3);
                AgentSpec::walker(GroundPoint::new(x0, lane), (dir * speed, rng.random_range(-0.02..0.02)))
            })
            .collect();
        Self::new(seed, n_frames, agents, camera)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_frames < 0 {
            return Err(Error::InvalidSpec("negative frame count".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidSpec(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        if !(self.fps > 0.0) {
            return Err(Error::InvalidSpec("fps must be positive".into()));
        }
        if !(self.noise_px >= 0.0 && self.affine_noise_px >= 0.0 && self.conf_jitter >= 0.0) {
            return Err(Error::InvalidSpec("noise levels must be non-negative".into()));
        }
        for a in &self.agents {
            if !(a.size.0 > 0.0 && a.size.1 > 0.0) {
                return Err(Error::InvalidSpec("agent size must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GtObject {
    pub id: u64,
    pub bbox: BBox,
    pub ground: GroundPoint,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    pub frames: BTreeMap<i64, Vec<GtObject>>,
}

impl GroundTruth {
    pub fn labeled(&self) -> Labeled {
        self.frames.iter().map(|(f, v)| (*f, v.iter().map(|o| (o.id, o.bbox)).collect())).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub gt: GroundTruth,
    pub detections: BTreeMap<i64, Vec<Detection>>,
    pub h0: Homography,
    /// Camera motion as supplied to the tracker (possibly noisy).
    pub affines: BTreeMap<i64, AffineMotion>,
    /// True per-frame homographies.
    pub homographies: BTreeMap<i64, Homography>,
}

fn rng_for(seed: u64, lane: u64, frame: i64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(lane);
    rng.set_word_pos((frame as u128) << 16);
    rng
}

fn true_box(h: &Homography, agent: &AgentSpec, pos: GroundPoint, frame: i64) -> Result<BBox> {
    let bc = h.project(pos)?;
    let half = 0.5 * agent.size.0;
    let left = h.project(GroundPoint::new(pos.x - half, pos.y))?;
    let right = h.project(GroundPoint::new(pos.x + half, pos.y))?;
    let w = ((right.x - left.x).powi(2) + (right.y - left.y).powi(2)).sqrt();
    let hgt = w * agent.size.1 / agent.size.0;
    let lifted = ImagePoint::new(bc.x, bc.y - agent.jump_offset(frame));
    Ok(coast_box(lifted, (w, hgt)))
}

fn covered_fraction(b: &BBox, by: &BBox) -> f64 {
    let iw = (b.r.min(by.r) - b.l.max(by.l)).max(0.0);
    let ih = (b.b.min(by.b) - b.t.max(by.t)).max(0.0);
    if b.area() <= 0.0 {
        return 0.0;
    }
    (iw * ih / b.area()).clamp(0.0, 1.0)
}

pub fn generate(spec: &SceneSpec) -> Result<Scene> {
    spec.validate()?;
    let dt = 1.0 / spec.fps;
    let (img_w, img_h) = spec.image_size;
    let mut h = spec.h0;
    let mut scene = Scene {
        gt: GroundTruth::default(),
        detections: BTreeMap::new(),
        h0: spec.h0,
        affines: BTreeMap::new(),
        homographies: BTreeMap::new(),
    };
    let box_noise = Normal::new(0.0, spec.noise_px.max(f64::MIN_POSITIVE)).unwrap();
    let conf_noise = Normal::new(0.0, spec.conf_jitter.max(f64::MIN_POSITIVE)).unwrap();
    let affine_noise = Normal::new(0.0, spec.affine_noise_px.max(f64::MIN_POSITIVE)).unwrap();

    for frame in 1..=spec.n_frames {
        if frame > 1 {
            let a = spec.camera.motion(frame);
            h = apply_affine(&a, &h)?;
            let mut supplied = a;
            if spec.affine_noise_px > 0.0 {
                let mut rng = rng_for(spec.seed, CAMERA_STREAM, frame);
                supplied.t[0] += affine_noise.sample(&mut rng);
                supplied.t[1] += affine_noise.sample(&mut rng);
            }
            scene.affines.insert(frame, supplied);
        }
        scene.homographies.insert(frame, h);

        let t = (frame - 1) as f64 * dt;
        let mut visible: Vec<(usize, GroundPoint, BBox)> = Vec::new();
        for (k, agent) in spec.agents.iter().enumerate() {
            let pos = GroundPoint::new(agent.start.x + agent.velocity.0 * t, agent.start.y + agent.velocity.1 * t);
            let bbox = true_box(&h, agent, pos, frame)?;
            let foot = ImagePoint::new(0.5 * (bbox.l + bbox.r), bbox.b + agent.jump_offset(frame));
            let in_view = foot.x >= 0.0 && foot.x <= img_w && foot.y >= 0.0 && foot.y <= img_h;
            if in_view && !agent.occluded(frame) {
                visible.push((k, pos, bbox));
            }
        }

        let gt_rows: Vec<GtObject> =
            visible.iter().map(|&(k, pos, bbox)| GtObject { id: k as u64 + 1, bbox, ground: pos }).collect();
        let mut dets = Vec::new();
        for &(k, _, bbox) in &visible {
            let mut rng = rng_for(spec.seed, k as u64, frame);
            let drop_draw: f64 = rng.random();
            // draws happen unconditionally so dropout does not shift later noise
            let (ex, ey, ew, eh) = if spec.noise_px > 0.0 {
                (
                    box_noise.sample(&mut rng),
                    box_noise.sample(&mut rng),
                    box_noise.sample(&mut rng),
                    box_noise.sample(&mut rng),
                )
            } else {
                (0.0, 0.0, 0.0, 0.0)
            };
            let jitter = if spec.conf_jitter > 0.0 { conf_noise.sample(&mut rng) } else { 0.0 };
            if drop_draw < spec.dropout {
                continue;
            }
            // nearer agents (lower bottom edge in the image) cover farther ones
            let cover = visible
                .iter()
                .filter(|&&(j, _, other)| j != k && other.b > bbox.b)
                .map(|&(_, _, other)| covered_fraction(&bbox, &other))
                .fold(0.0, f64::max);
            let conf = (spec.base_conf - spec.occlusion_penalty * cover + jitter).clamp(0.01, 1.0);
            let det_box = if spec.noise_px > 0.0 {
                let w = (bbox.width() + ew).max(1.0);
                let hh = (bbox.height() + eh).max(1.0);
                coast_box(ImagePoint::new(0.5 * (bbox.l + bbox.r) + ex, bbox.b + ey), (w, hh))
            } else {
                bbox
            };
            dets.push(Detection::new(det_box, conf));
        }
        scene.gt.frames.insert(frame, gt_rows);
        scene.detections.insert(frame, dets);
    }
    Ok(scene)
}

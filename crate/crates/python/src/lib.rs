//! Python bindings: homography geometry, the frame-by-frame tracker,
//! association primitives, synthetic scenes and metrics.
//!
//! Boxes cross the boundary as `(left, top, width, height)` tuples and
//! detections as `(left, top, width, height, conf)`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use groundtrack::association::{maximize_assignment, ScoreMatrix};
use groundtrack::eval::metrics::evaluate;
use groundtrack::eval::synth::{generate, CameraScript, SceneSpec};
use groundtrack::eval::Labeled;
use groundtrack::tracker::Detection;
use groundtrack::{AffineMotion, BBox, GroundPoint, ImagePoint, TrackerConfig};

type Ltwh = (f64, f64, f64, f64);
type Det = (f64, f64, f64, f64, f64);
type TrackRow = (u64, String, (f64, f64), (f64, f64));

fn err(e: groundtrack::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn bbox(b: Ltwh) -> BBox {
    BBox::from_ltwh(b.0, b.1, b.2, b.3)
}

fn ltwh(b: &BBox) -> Ltwh {
    let [l, t, w, h] = b.ltwh();
    (l, t, w, h)
}

#[pyclass(name = "Homography", module = "groundtrack_py", skip_from_py_object)]
#[derive(Clone)]
struct PyHomography {
    inner: groundtrack::Homography,
}

#[pymethods]
impl PyHomography {
    /// Nine row-major entries; divided through by the last one.
    #[new]
    fn new(entries: [f64; 9]) -> PyResult<Self> {
        Ok(Self { inner: groundtrack::Homography::new(entries).map_err(err)? })
    }

    #[staticmethod]
    fn identity() -> Self {
        Self { inner: groundtrack::Homography::identity() }
    }

    fn entries(&self) -> [f64; 9] {
        self.inner.entries()
    }

    fn project(&self, x: f64, y: f64) -> PyResult<(f64, f64)> {
        let q = self.inner.project(GroundPoint::new(x, y)).map_err(err)?;
        Ok((q.x, q.y))
    }

    fn unproject(&self, u: f64, v: f64) -> PyResult<(f64, f64)> {
        let p = self.inner.unproject(ImagePoint::new(u, v)).map_err(err)?;
        Ok((p.x, p.y))
    }

    /// 2×2 Jacobian of the projection with respect to the ground point.
    fn jacobian_ground(&self, x: f64, y: f64) -> PyResult<[[f64; 2]; 2]> {
        let j = self.inner.jacobian_ground(GroundPoint::new(x, y)).map_err(err)?;
        Ok([[j[(0, 0)], j[(0, 1)]], [j[(1, 0)], j[(1, 1)]]])
    }

    fn __repr__(&self) -> String {
        format!("Homography({:?})", self.inner.entries())
    }
}

fn config_from(params: Option<&Bound<'_, PyDict>>) -> PyResult<TrackerConfig> {
    let mut cfg = TrackerConfig::default();
    if let Some(d) = params {
        for (k, v) in d.iter() {
            let key: String = k.extract()?;
            let value: f64 = v.extract()?;
            cfg.set(&key, value).map_err(err)?;
        }
    }
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// Numeric defaults of every tracker parameter.
#[pyfunction]
fn default_config() -> BTreeMap<String, f64> {
    let cfg = TrackerConfig::default();
    groundtrack::config::TUNABLE
        .iter()
        .chain(["sigma_m", "n", "m", "chi2_dof", "dt"].iter())
        .map(|k| (k.to_string(), cfg.get(k).unwrap()))
        .collect()
}

#[pyclass(name = "Tracker", module = "groundtrack_py")]
struct PyTracker {
    inner: groundtrack::Tracker,
}

#[pymethods]
impl PyTracker {
    /// `config` maps parameter names (as in `default_config()`, plus `fps`)
    /// to values; missing keys keep their defaults.
    #[new]
    #[pyo3(signature = (homography, config=None))]
    fn new(homography: &PyHomography, config: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let cfg = config_from(config)?;
        Ok(Self { inner: groundtrack::Tracker::new(cfg, homography.inner).map_err(err)? })
    }

    /// Advances one frame. Returns `(id, (l, t, w, h), conf)` for each
    /// confirmed track updated this frame.
    #[pyo3(signature = (frame, detections, affine=None))]
    fn step(
        &mut self,
        frame: i64,
        detections: Vec<Det>,
        affine: Option<[f64; 6]>,
    ) -> PyResult<Vec<(u64, Ltwh, f64)>> {
        let dets: Vec<Detection> =
            detections.iter().map(|d| Detection::new(BBox::from_ltwh(d.0, d.1, d.2, d.3), d.4)).collect();
        let a = affine.map(AffineMotion::from_rows).unwrap_or_else(AffineMotion::identity);
        let r = self.inner.step(frame, &dets, &a).map_err(err)?;
        Ok(r.outputs.iter().map(|o| (o.id, ltwh(&o.bbox), o.conf)).collect())
    }

    /// `(id, lifecycle, (mu_static, mu_dynamic), (mu_image, mu_ground))`
    /// for every live track.
    fn tracks(&self) -> Vec<TrackRow> {
        self.inner
            .tracks()
            .iter()
            .map(|t| {
                (
                    t.id,
                    format!("{:?}", t.lifecycle).to_lowercase(),
                    (t.imm.mu[0], t.imm.mu[1]),
                    (t.assoc_mu.mu_i, t.assoc_mu.mu_w),
                )
            })
            .collect()
    }
}

#[pyfunction]
#[pyo3(signature = (x, k=24))]
fn chi2_cdf(x: f64, k: u32) -> f64 {
    groundtrack::association::chi2_cdf(x, k)
}

#[pyfunction]
#[pyo3(signature = (d, k=24))]
fn p_of_d(d: f64, k: u32) -> f64 {
    groundtrack::association::p_of_d(d, k)
}

#[pyfunction]
#[pyo3(signature = (a, c, b=0.0))]
fn biou(a: Ltwh, c: Ltwh, b: f64) -> f64 {
    groundtrack::image_filter::biou(&bbox(a), &bbox(c), b)
}

/// Maximum-total-score matching; pairs scoring below `gate` are dropped.
#[pyfunction]
#[pyo3(signature = (scores, gate=0.0))]
fn solve_assignment(scores: Vec<Vec<f64>>, gate: f64) -> PyResult<Vec<(usize, usize)>> {
    let rows = scores.len();
    let cols = scores.first().map_or(0, Vec::len);
    if scores.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("score rows differ in length"));
    }
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    let m = ScoreMatrix::from_rows(&scores, gate);
    Ok(maximize_assignment(&m.scores, m.gate))
}

/// Synthetic crossing scene as a dict with `detections`, `gt`,
/// `homography` and `affines`, each keyed by frame where applicable.
#[pyfunction]
#[pyo3(signature = (seed=0, agents=5, frames=300, camera="pan", noise_px=1.0, dropout=0.1))]
fn synth_scene<'py>(
    py: Python<'py>,
    seed: u64,
    agents: usize,
    frames: i64,
    camera: &str,
    noise_px: f64,
    dropout: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let camera = match camera {
        "static" => CameraScript::Static,
        "pan" => CameraScript::Pan { speed: 2.0, amplitude: 100.0 },
        other => return Err(PyValueError::new_err(format!("unknown camera {other:?}"))),
    };
    let mut spec = SceneSpec::crossing(seed, agents, frames, camera);
    spec.noise_px = noise_px;
    spec.dropout = dropout;
    let scene = generate(&spec).map_err(err)?;
    let dets: BTreeMap<i64, Vec<Det>> = scene
        .detections
        .iter()
        .map(|(&f, ds)| {
            let v = ds.iter().map(|d| {
                let (l, t, w, h) = ltwh(&d.bbox);
                (l, t, w, h, d.conf)
            });
            (f, v.collect())
        })
        .collect();
    let gt: BTreeMap<i64, Vec<(u64, Ltwh)>> =
        scene.gt.labeled().into_iter().map(|(f, objs)| (f, objs.iter().map(|(id, b)| (*id, ltwh(b))).collect())).collect();
    let affines: BTreeMap<i64, [f64; 6]> = scene.affines.iter().map(|(&f, a)| (f, a.rows())).collect();
    let out = PyDict::new(py);
    out.set_item("detections", dets)?;
    out.set_item("gt", gt)?;
    out.set_item("homography", scene.h0.entries())?;
    out.set_item("affines", affines)?;
    Ok(out)
}

fn labeled(m: BTreeMap<i64, Vec<(u64, Ltwh)>>) -> Labeled {
    m.into_iter().map(|(f, objs)| (f, objs.into_iter().map(|(id, b)| (id, bbox(b))).collect())).collect()
}

/// CLEAR MOT and identity metrics; both inputs map frame to `(id, ltwh)`.
#[pyfunction]
#[pyo3(signature = (gt, res, iou_gate=0.5))]
fn evaluate_tracks(
    gt: BTreeMap<i64, Vec<(u64, Ltwh)>>,
    res: BTreeMap<i64, Vec<(u64, Ltwh)>>,
    iou_gate: f64,
) -> BTreeMap<String, f64> {
    let m = evaluate(&labeled(gt), &labeled(res), iou_gate);
    BTreeMap::from([
        ("mota".to_string(), m.mota),
        ("idf1".to_string(), m.idf1),
        ("idsw".to_string(), m.idsw as f64),
        ("fp".to_string(), m.fp as f64),
        ("fn".to_string(), m.fn_ as f64),
        ("gt".to_string(), m.gt as f64),
    ])
}

#[pymodule]
fn groundtrack_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHomography>()?;
    m.add_class::<PyTracker>()?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(chi2_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(p_of_d, m)?)?;
    m.add_function(wrap_pyfunction!(biou, m)?)?;
    m.add_function(wrap_pyfunction!(solve_assignment, m)?)?;
    m.add_function(wrap_pyfunction!(synth_scene, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_tracks, m)?)?;
    Ok(())
}

//! Hooke-Jeeves style coordinate pattern search over tracker parameters.
//!
//! One iteration is an exploratory sweep over the free coordinates in
//! declaration order. For each coordinate `+step` is tried, then `-step`,
//! and the first strict improvement is kept before moving to the next
//! coordinate. A sweep without any improvement halves every step. The search
//! stops after `max_iters` sweeps or once every free step is below `1e-4`
//! of its initial size.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::{TrackerConfig, TUNABLE};
use crate::error::{Error, Result};
use crate::eval::metrics::{evaluate, labeled_from_results};
use crate::eval::synth::{generate, CameraScript, Scene, SceneSpec};
use crate::tracker::run_sequence;

const STOP_RATIO: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub init: f64,
    pub step: f64,
    pub lower: f64,
    pub upper: f64,
    pub fixed: bool,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, init: f64, step: f64, lower: f64, upper: f64) -> Self {
        Self { name: name.into(), init, step, lower, upper, fixed: false }
    }

    pub fn fixed(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), init: value, step: 1.0, lower: value, upper: value, fixed: true }
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SearchSpace {
    pub params: Vec<ParamSpec>,
}

impl SearchSpace {
    pub fn new(params: Vec<ParamSpec>) -> Result<Self> {
        for p in &params {
            if !(p.lower <= p.upper) || !(p.lower..=p.upper).contains(&p.init) {
                return Err(Error::InvalidConfig(format!(
                    "{}: initial value {} outside [{}, {}]",
                    p.name, p.init, p.lower, p.upper
                )));
            }
            if !p.fixed && !(p.step > 0.0 && p.step.is_finite()) {
                return Err(Error::InvalidConfig(format!("{}: step {} must be positive", p.name, p.step)));
            }
        }
        Ok(Self { params })
    }

    pub fn initial(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.init).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.name.as_str()).collect()
    }

    /// Default box around `cfg` over the tunable parameters.
    pub fn around(cfg: &TrackerConfig) -> Self {
        let params = TUNABLE
            .iter()
            .map(|&name| {
                let v = cfg.get(name).expect("tunable key");
                let (step, lo, hi) = default_range(name);
                ParamSpec::new(name, v.clamp(lo, hi), step, lo, hi)
            })
            .collect();
        Self { params }
    }

    /// Restricts the search to the parameters listed in a bounds file:
    /// one `name lower upper step` row per free parameter, `#` starts a
    /// comment. Every other tunable is held at its value in `cfg`.
    pub fn from_bounds(cfg: &TrackerConfig, text: &str, path: &Path) -> Result<Self> {
        let mut params: Vec<ParamSpec> =
            TUNABLE.iter().map(|&n| ParamSpec::fixed(n, cfg.get(n).expect("tunable key"))).collect();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::parse(path, i + 1, "expected `name lower upper step`"));
            }
            let Some(p) = params.iter_mut().find(|p| p.name == f[0]) else {
                return Err(Error::parse(path, i + 1, format!("unknown tunable parameter {:?}", f[0])));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(path, i + 1, format!("bad number {s:?}")));
            let (lo, hi, step) = (num(f[1])?, num(f[2])?, num(f[3])?);
            *p = ParamSpec::new(p.name.clone(), p.init.clamp(lo, hi), step, lo, hi);
        }
        Self::new(params)
    }

    /// Copy of `base` with the search-space values applied.
    pub fn apply(&self, base: &TrackerConfig, x: &[f64]) -> Result<TrackerConfig> {
        let mut cfg = base.clone();
        for (p, &v) in self.params.iter().zip(x) {
            cfg.set(&p.name, v)?;
        }
        Ok(cfg)
    }
}

fn default_range(name: &str) -> (f64, f64, f64) {
    match name {
        "sigma_x" | "sigma_y" => (1.0, 0.01, 100.0),
        "omega" => (5.0, 1.0, 300.0),
        "v" => (0.1, 0.01, 10.0),
        _ => (0.1, 0.0, 1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iter: usize,
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: Vec<f64>,
    pub value: f64,
    /// Best point after each sweep; entry 0 is the initial point.
    pub trace: Vec<TraceEntry>,
    pub evaluations: usize,
}

/// Maximizes `objective` over `space`.
pub fn pattern_search<F>(mut objective: F, space: &SearchSpace, max_iters: usize) -> Result<SearchResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| -> Result<f64> {
        *evaluations += 1;
        match objective(x) {
            Ok(v) if !v.is_nan() => Ok(v),
            Ok(v) => Err(Error::ObjectiveFailure { params: x.to_vec(), msg: format!("objective returned {v}") }),
            Err(e @ Error::ObjectiveFailure { .. }) => Err(e),
            Err(e) => Err(Error::ObjectiveFailure { params: x.to_vec(), msg: e.to_string() }),
        }
    };

    let mut x: Vec<f64> = space.params.iter().map(|p| p.clamp(p.init)).collect();
    let mut fx = eval(&x, &mut evaluations)?;
    let mut steps: Vec<f64> = space.params.iter().map(|p| p.step).collect();
    let mut trace = vec![TraceEntry { iter: 0, params: x.clone(), value: fx }];
    let free: Vec<usize> = (0..x.len()).filter(|&i| !space.params[i].fixed).collect();

    for iter in 1..=max_iters {
        if free.iter().all(|&i| steps[i] < STOP_RATIO * space.params[i].step) {
            break;
        }
        let mut improved = false;
        for &i in &free {
            for sign in [1.0, -1.0] {
                let mut cand = x.clone();
                cand[i] = space.params[i].clamp(x[i] + sign * steps[i]);
                if cand[i] == x[i] {
                    continue;
                }
                let fc = eval(&cand, &mut evaluations)?;
                if fc > fx {
                    x = cand;
                    fx = fc;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in &mut steps {
                *s *= 0.5;
            }
        }
        trace.push(TraceEntry { iter, params: x.clone(), value: fx });
    }
    Ok(SearchResult { best: x, value: fx, trace, evaluations })
}

/// `iter,param_vector,value` rows; the vector is space separated.
pub fn format_trace(trace: &[TraceEntry]) -> String {
    let mut out = String::from("iter,param_vector,value\n");
    for e in trace {
        let v: Vec<String> = e.params.iter().map(|p| format!("{p}")).collect();
        writeln!(out, "{},{},{}", e.iter, v.join(" "), e.value).unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mota,
    Idf1,
}

/// Synthetic scenes the `tune` subcommand scores against: crowded crossings
/// with weak, noisy detections so the initial point leaves room to improve.
pub fn benchmark_specs() -> Vec<SceneSpec> {
    [(11, CameraScript::Static), (12, CameraScript::Pan { speed: 2.0, amplitude: 120.0 })]
        .into_iter()
        .map(|(seed, camera)| {
            let mut s = SceneSpec::crossing(seed, 6, 200, camera);
            s.noise_px = 2.0;
            s.dropout = 0.15;
            s.base_conf = 0.7;
            s.conf_jitter = 0.05;
            s
        })
        .collect()
}

/// Mean metric of a config over pre-generated scenes. Configs that fail
/// validation score negative infinity so the search steps around them.
pub fn mean_metric(cfg: &TrackerConfig, scenes: &[Scene], metric: Metric) -> Result<f64> {
    if cfg.validate().is_err() {
        return Ok(f64::NEG_INFINITY);
    }
    let mut total = 0.0;
    for s in scenes {
        let r = run_sequence(&s.detections, &s.h0, &s.affines, cfg)?;
        let m = evaluate(&s.gt.labeled(), &labeled_from_results(&r), 0.5);
        total += match metric {
            Metric::Mota => m.mota,
            Metric::Idf1 => m.idf1,
        };
    }
    Ok(total / scenes.len().max(1) as f64)
}

/// Tunes `base` on the benchmark scenes.
pub fn tune_on_benchmark(
    base: &TrackerConfig,
    space: &SearchSpace,
    metric: Metric,
    max_iters: usize,
) -> Result<(TrackerConfig, SearchResult)> {
    let scenes = benchmark_specs().iter().map(generate).collect::<Result<Vec<_>>>()?;
    let result = pattern_search(|x| mean_metric(&space.apply(base, x)?, &scenes, metric), space, max_iters)?;
    Ok((space.apply(base, &result.best)?, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_quadratic() {
        let space = SearchSpace::new(vec![ParamSpec::new("x", 0.0, 1.0, -10.0, 10.0)]).unwrap();
        let r = pattern_search(|x| Ok(-(x[0] - 3.0).powi(2)), &space, 200).unwrap();
        assert!((r.best[0] - 3.0).abs() < 1e-3);
    }

    #[test]
    fn zero_iterations_keep_start() {
        let space = SearchSpace::new(vec![ParamSpec::new("x", 0.5, 1.0, -10.0, 10.0)]).unwrap();
        let r = pattern_search(|x| Ok(-x[0] * x[0]), &space, 0).unwrap();
        assert_eq!(r.best, vec![0.5]);
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn constant_objective_contracts() {
        let space = SearchSpace::new(vec![ParamSpec::new("x", 1.0, 1.0, -10.0, 10.0)]).unwrap();
        let r = pattern_search(|_| Ok(2.0), &space, 200).unwrap();
        assert_eq!(r.best, vec![1.0]);
        // 14 halvings bring the step below 1e-4 of its start
        assert_eq!(r.trace.len(), 15);
    }

    #[test]
    fn nan_is_a_failure() {
        let space = SearchSpace::new(vec![ParamSpec::new("x", 0.0, 1.0, -1.0, 1.0)]).unwrap();
        let e = pattern_search(|x| Ok(if x[0] > 0.0 { f64::NAN } else { 0.0 }), &space, 5).unwrap_err();
        assert!(matches!(e, Error::ObjectiveFailure { ref params, .. } if params == &vec![1.0]));
    }

    #[test]
    fn bounds_file() {
        let cfg = TrackerConfig::default();
        let s = SearchSpace::from_bounds(&cfg, "# free\nalpha2 0.1 0.9 0.05\n", Path::new("b")).unwrap();
        let free: Vec<&str> = s.params.iter().filter(|p| !p.fixed).map(|p| p.name.as_str()).collect();
        assert_eq!(free, vec!["alpha2"]);
        assert!(SearchSpace::from_bounds(&cfg, "nope 0 1 0.1\n", Path::new("b")).is_err());
    }
}

//! Tracker hyperparameters and the flat `key = value` config grammar.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// How stage-2 and stage-3 association scores are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedScore {
    /// `(mu_I * BIoU + mu_W * P(D)) * conf`
    ImmLike,
    /// `P(D) * conf` only; kept for ablation runs.
    GroundOnly,
}

/// Likelihood used to weigh the two camera-motion models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CameraLikelihood {
    /// Gaussian density of the innovation.
    Gaussian,
    /// Chi-squared tail probability of the normalized distance.
    ChiSquared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    /// Maximum frames a confirmed track may go without an update.
    pub omega: u32,
    /// Buffer scale for BIoU.
    pub b: f64,
    pub d_high: f64,
    pub d_low: f64,
    pub p_ss: f64,
    pub p_dd: f64,
    pub p_ww: f64,
    pub p_ii: f64,
    /// Initial velocity variance.
    pub v: f64,
    pub sigma_m: f64,
    /// Box buffer length.
    pub n: usize,
    /// Noise window length.
    pub m: usize,
    pub chi2_dof: u32,
    /// Seconds per frame.
    pub dt: f64,
    pub mixed_score: MixedScore,
    /// Couple coasted boxes to the projected ground position. When off,
    /// coasted boxes stay frozen at the last associated box.
    pub coast_coupling: bool,
    pub camera_likelihood: CameraLikelihood,
}

impl Default for TrackerConfig {
    /// Starting point of the hyperparameter search.
    fn default() -> Self {
        Self {
            sigma_x: 5.0,
            sigma_y: 5.0,
            alpha1: 0.5,
            alpha2: 0.5,
            alpha3: 0.5,
            omega: 30,
            b: 0.0,
            d_high: 0.6,
            d_low: 0.5,
            p_ss: 0.9,
            p_dd: 0.9,
            p_ww: 0.9,
            p_ii: 0.9,
            v: 0.5,
            sigma_m: 0.05,
            n: 5,
            m: 5,
            chi2_dof: 24,
            dt: 1.0 / 20.0,
            mixed_score: MixedScore::ImmLike,
            coast_coupling: true,
            camera_likelihood: CameraLikelihood::Gaussian,
        }
    }
}

/// Names of the tunable scalars, in declaration order.
pub const TUNABLE: [&str; 14] = [
    "sigma_x", "sigma_y", "alpha1", "alpha2", "alpha3", "omega", "b", "d_high", "d_low", "p_ss", "p_dd",
    "p_ww", "p_ii", "v",
];

impl TrackerConfig {
    /// Tuned values for dance-style sequences.
    pub fn dancetrack() -> Self {
        Self {
            sigma_x: 5.0,
            sigma_y: 18.75,
            alpha1: 0.27,
            alpha2: 0.99,
            alpha3: 0.82,
            omega: 62,
            b: 0.0,
            d_high: 0.9,
            d_low: 0.1,
            p_ss: 0.16,
            p_dd: 0.53,
            p_ww: 0.9,
            p_ii: 0.01,
            v: 0.56,
            ..Self::default()
        }
    }

    pub fn with_fps(mut self, fps: f64) -> Self {
        self.dt = 1.0 / fps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
            ("d_high", self.d_high),
            ("d_low", self.d_low),
            ("p_ss", self.p_ss),
            ("p_dd", self.p_dd),
            ("p_ww", self.p_ww),
            ("p_ii", self.p_ii),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        if self.d_low > self.d_high {
            return Err(Error::InvalidThresholds { d_low: self.d_low, d_high: self.d_high });
        }
        if self.omega < 1 {
            return Err(Error::InvalidConfig("omega must be at least 1".into()));
        }
        let nonneg = [("sigma_x", self.sigma_x), ("sigma_y", self.sigma_y), ("b", self.b), ("v", self.v)];
        for (name, x) in nonneg {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} = {x} must be finite and non-negative")));
            }
        }
        if !(self.sigma_m > 0.0 && self.sigma_m.is_finite()) {
            return Err(Error::InvalidConfig("sigma_m must be positive".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig("dt must be positive".into()));
        }
        if self.n < 1 || self.m < 1 || self.chi2_dof < 1 {
            return Err(Error::InvalidConfig("n, m and chi2_dof must be at least 1".into()));
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "sigma_x" => self.sigma_x,
            "sigma_y" => self.sigma_y,
            "alpha1" => self.alpha1,
            "alpha2" => self.alpha2,
            "alpha3" => self.alpha3,
            "omega" => self.omega as f64,
            "b" => self.b,
            "d_high" => self.d_high,
            "d_low" => self.d_low,
            "p_ss" => self.p_ss,
            "p_dd" => self.p_dd,
            "p_ww" => self.p_ww,
            "p_ii" => self.p_ii,
            "v" => self.v,
            "sigma_m" => self.sigma_m,
            "n" => self.n as f64,
            "m" => self.m as f64,
            "chi2_dof" => self.chi2_dof as f64,
            "dt" => self.dt,
            _ => return None,
        })
    }

    /// Sets a numeric field. Integer fields are rounded.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidConfig(format!("{key} = {value} is not finite")));
        }
        let count = |v: f64| -> Result<u64> {
            if v < 0.0 {
                return Err(Error::InvalidConfig(format!("{key} = {v} must be non-negative")));
            }
            Ok(v.round() as u64)
        };
        match key {
            "sigma_x" => self.sigma_x = value,
            "sigma_y" => self.sigma_y = value,
            "alpha1" => self.alpha1 = value,
            "alpha2" => self.alpha2 = value,
            "alpha3" => self.alpha3 = value,
            "omega" => self.omega = count(value)? as u32,
            "b" => self.b = value,
            "d_high" => self.d_high = value,
            "d_low" => self.d_low = value,
            "p_ss" => self.p_ss = value,
            "p_dd" => self.p_dd = value,
            "p_ww" => self.p_ww = value,
            "p_ii" => self.p_ii = value,
            "v" => self.v = value,
            "sigma_m" => self.sigma_m = value,
            "n" => self.n = count(value)? as usize,
            "m" => self.m = count(value)? as usize,
            "chi2_dof" => self.chi2_dof = count(value)? as u32,
            "dt" => self.dt = value,
            "fps" => {
                if value <= 0.0 {
                    return Err(Error::InvalidConfig("fps must be positive".into()));
                }
                self.dt = 1.0 / value
            }
            _ => return Err(Error::InvalidConfig(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, idx + 1, format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let res = match key {
                "mixed_score" => match value {
                    "imm" => {
                        cfg.mixed_score = MixedScore::ImmLike;
                        Ok(())
                    }
                    "ground" => {
                        cfg.mixed_score = MixedScore::GroundOnly;
                        Ok(())
                    }
                    _ => Err(format!("mixed_score must be `imm` or `ground`, got `{value}`")),
                },
                "coast_coupling" => match value {
                    "true" => {
                        cfg.coast_coupling = true;
                        Ok(())
                    }
                    "false" => {
                        cfg.coast_coupling = false;
                        Ok(())
                    }
                    _ => Err(format!("coast_coupling must be `true` or `false`, got `{value}`")),
                },
                "camera_likelihood" => match value {
                    "gaussian" => {
                        cfg.camera_likelihood = CameraLikelihood::Gaussian;
                        Ok(())
                    }
                    "chi2" => {
                        cfg.camera_likelihood = CameraLikelihood::ChiSquared;
                        Ok(())
                    }
                    _ => Err(format!("camera_likelihood must be `gaussian` or `chi2`, got `{value}`")),
                },
                _ => match value.parse::<f64>() {
                    Ok(v) => cfg.set(key, v).map_err(|e| e.to_string()),
                    Err(_) => Err(format!("`{value}` is not a number")),
                },
            };
            res.map_err(|msg| Error::parse(path, idx + 1, msg))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in TUNABLE.iter().chain(["sigma_m", "n", "m", "chi2_dof", "dt"].iter()) {
            writeln!(out, "{key} = {}", self.get(key).unwrap()).unwrap();
        }
        let mixed = match self.mixed_score {
            MixedScore::ImmLike => "imm",
            MixedScore::GroundOnly => "ground",
        };
        let cam = match self.camera_likelihood {
            CameraLikelihood::Gaussian => "gaussian",
            CameraLikelihood::ChiSquared => "chi2",
        };
        writeln!(out, "mixed_score = {mixed}").unwrap();
        writeln!(out, "coast_coupling = {}", self.coast_coupling).unwrap();
        writeln!(out, "camera_likelihood = {cam}").unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_search_start() {
        let c = TrackerConfig::default();
        assert_eq!((c.sigma_x, c.sigma_y), (5.0, 5.0));
        assert_eq!((c.alpha1, c.alpha2, c.alpha3), (0.5, 0.5, 0.5));
        assert_eq!(c.omega, 30);
        assert_eq!((c.b, c.d_high, c.d_low), (0.0, 0.6, 0.5));
        assert_eq!((c.p_ss, c.p_dd, c.p_ww, c.p_ii, c.v), (0.9, 0.9, 0.9, 0.9, 0.5));
        assert_eq!((c.sigma_m, c.n, c.m, c.chi2_dof), (0.05, 5, 5, 24));
        c.validate().unwrap();
        TrackerConfig::dancetrack().validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let mut c = TrackerConfig::dancetrack();
        c.coast_coupling = false;
        c.mixed_score = MixedScore::GroundOnly;
        let back = TrackerConfig::parse(&c.to_text(), Path::new("cfg")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_comments_and_errors() {
        let c = TrackerConfig::parse("# comment\nomega = 12 # trailing\n\nfps = 25\n", Path::new("c")).unwrap();
        assert_eq!(c.omega, 12);
        assert!((c.dt - 0.04).abs() < 1e-15);
        match TrackerConfig::parse("v = 1\nbogus = 3\n", Path::new("c")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(TrackerConfig::parse("v 1", Path::new("c")), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            TrackerConfig::parse("d_low = 0.7", Path::new("c")),
            Err(Error::InvalidThresholds { .. })
        ));
    }
}

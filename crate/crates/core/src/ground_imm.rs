//! Two-model IMM extended Kalman filter over the joint ground/homography
//! state.
//!
//! State layout (13): `x, vx, y, vy` in metres and metres per second,
//! followed by the homography entries in column order
//! `h1, h4, h7, h2, h5, h8, h3, h6, h9`. `h9` is pinned to one and carries
//! no covariance.
//!
//! Model 0 keeps the homography fixed between frames; model 1 left-multiplies
//! it by the frame's camera-motion affine. Each model owns its own
//! measurement and homography-process noise windows.

use crate::association::p_of_d;
use crate::config::{CameraLikelihood, TrackerConfig};
use crate::error::{Error, Result};
use crate::geometry::{bottom_centre, AffineMotion, GroundPoint, Homography, ImagePoint};
use crate::image_filter::BBox;
use crate::linalg::{inv2, psd_repair, symmetrize, Mat13, Mat13x2, Mat2, Mat2x13, Mat4, Mat9, Vec13, Vec2};
use crate::noise::{
    extract_homography_block, initial_r, measurement_noise_sample, process_noise_sample, MeasurementWindow,
    ProcessWindow,
};

pub const STATE_DIM: usize = 13;
pub const H9: usize = 12;
const HOMOG: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CameraModel {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub x: Vec13,
    pub p: Mat13,
}

impl GroundState {
    pub fn new(pos: GroundPoint, vel: (f64, f64), h: &Homography, p: Mat13) -> Self {
        let mut x = Vec13::zeros();
        x[0] = pos.x;
        x[1] = vel.0;
        x[2] = pos.y;
        x[3] = vel.1;
        for (k, v) in h.to_state_block().into_iter().enumerate() {
            x[HOMOG + k] = v;
        }
        let mut s = Self { x, p };
        s.pin_h9();
        s
    }

    pub fn position(&self) -> GroundPoint {
        GroundPoint::new(self.x[0], self.x[2])
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.x[1], self.x[3])
    }

    pub fn homography(&self) -> Result<Homography> {
        Homography::from_state_block(&self.x.as_slice()[HOMOG..])
    }

    /// Projected bottom-centre of the track.
    pub fn measure(&self) -> Result<ImagePoint> {
        self.homography()?.project(self.position())
    }

    /// Measurement Jacobian over the full state (zero on velocities).
    pub fn jacobian(&self) -> Result<Mat2x13> {
        let h = self.homography()?;
        let pos = self.position();
        let jg = h.jacobian_ground(pos)?;
        let jh = h.jacobian_homography(pos)?;
        let mut j = Mat2x13::zeros();
        j.fixed_view_mut::<2, 1>(0, 0).copy_from(&jg.column(0));
        j.fixed_view_mut::<2, 1>(0, 2).copy_from(&jg.column(1));
        j.fixed_view_mut::<2, 9>(0, HOMOG).copy_from(&jh);
        Ok(j)
    }

    fn pin_h9(&mut self) {
        self.x[H9] = 1.0;
        self.p.row_mut(H9).fill(0.0);
        self.p.column_mut(H9).fill(0.0);
    }

    fn tidy(&mut self) {
        self.p = psd_repair(&self.p);
        self.pin_h9();
    }
}

/// Block-diagonal transition matrix for one frame.
pub fn transition_matrix(model: CameraModel, affine: &AffineMotion, dt: f64) -> Mat13 {
    let mut f = Mat13::identity();
    f[(0, 1)] = dt;
    f[(2, 3)] = dt;
    if model == CameraModel::Dynamic {
        // H' = A H acts on each stacked column of H
        let a = affine.matrix();
        for c in 0..3 {
            let o = HOMOG + 3 * c;
            f.fixed_view_mut::<3, 3>(o, o).copy_from(&a);
        }
    }
    f
}

/// `F P F^T + diag(q_ground, q_h)` with the mean mapped through `F`.
pub fn predict_state(s: &GroundState, f: &Mat13, q_ground: &Mat4, q_h: &Mat9) -> GroundState {
    let mut q = Mat13::zeros();
    q.fixed_view_mut::<4, 4>(0, 0).copy_from(q_ground);
    q.fixed_view_mut::<9, 9>(HOMOG, HOMOG).copy_from(q_h);
    let mut out = GroundState { x: f * s.x, p: symmetrize(&(f * s.p * f.transpose() + q)) };
    out.pin_h9();
    out
}

/// One EKF correction with a given measurement noise.
#[derive(Debug, Clone)]
pub struct Correction {
    pub posterior: GroundState,
    pub innovation: Vec2,
    pub s: Mat2,
    pub gain: Mat13x2,
}

pub fn ekf_correct(prior: &GroundState, z: ImagePoint, r: &Mat2) -> Result<Correction> {
    let z_hat = prior.measure()?;
    let j = prior.jacobian()?;
    let d = Vec2::new(z.x - z_hat.x, z.y - z_hat.y);
    let s = psd_repair(&(j * prior.p * j.transpose() + r));
    let (s_inv, _) = inv2(&s).ok_or(Error::SingularInnovation(s.determinant()))?;
    let k = prior.p * j.transpose() * s_inv;
    let ikj = Mat13::identity() - k * j;
    let mut posterior = GroundState {
        x: prior.x + k * d,
        p: ikj * prior.p * ikj.transpose() + k * r * k.transpose(),
    };
    posterior.tidy();
    Ok(Correction { posterior, innovation: d, s, gain: k })
}

/// Gaussian log-density of an innovation.
pub fn gaussian_log_likelihood(d: &Vec2, s: &Mat2) -> Result<f64> {
    let (s_inv, det) = inv2(s).ok_or(Error::SingularInnovation(s.determinant()))?;
    let m = (d.transpose() * s_inv * d)[0];
    Ok(-0.5 * m - 0.5 * det.ln() - (2.0 * std::f64::consts::PI).ln())
}

/// Result of a full adaptive update of one model filter.
#[derive(Debug, Clone)]
pub struct ModelUpdate {
    pub posterior: GroundState,
    pub innovation: Vec2,
    pub s: Mat2,
    pub r: Mat2,
    pub log_likelihood: f64,
}

/// A single camera-model EKF with its own noise windows.
#[derive(Debug, Clone)]
pub struct ModelFilter {
    pub kind: CameraModel,
    pub state: GroundState,
    pub r_window: MeasurementWindow,
    pub q_window: ProcessWindow,
    pub r0: Mat2,
}

impl ModelFilter {
    pub fn new(kind: CameraModel, state: GroundState, r0: Mat2, window: usize) -> Self {
        Self { kind, state, r_window: MeasurementWindow::new(window), q_window: ProcessWindow::new(window), r0 }
    }

    /// Measurement noise from the previous update (the initial guess before
    /// the first one).
    pub fn r_prev(&self) -> Mat2 {
        self.r_window.mean().map(|r| psd_repair(&r)).unwrap_or(self.r0)
    }

    /// Homography process noise for the next prediction.
    pub fn q_h(&self) -> Mat9 {
        self.q_window.mean().map(|q| psd_repair(&q)).unwrap_or_else(|_| Mat9::zeros())
    }

    pub fn predict_from(&self, start: &GroundState, affine: &AffineMotion, q_ground: &Mat4, dt: f64) -> GroundState {
        let f = transition_matrix(self.kind, affine, dt);
        predict_state(start, &f, q_ground, &self.q_h())
    }

    /// Dummy update with the previous R to get a residual, refresh the R
    /// window, update for real with the refreshed R, then feed the gain and
    /// innovation into the Q window. Does not overwrite `self.state`.
    pub fn update(
        &mut self,
        prior: &GroundState,
        z: ImagePoint,
        lik: CameraLikelihood,
        chi2_dof: u32,
    ) -> Result<ModelUpdate> {
        let j = prior.jacobian()?;
        let dummy = ekf_correct(prior, z, &self.r_prev())?;
        let z_post = dummy.posterior.measure()?;
        let residual = Vec2::new(z.x - z_post.x, z.y - z_post.y);
        self.r_window.push(measurement_noise_sample(&residual, &j, &prior.p));
        let r = self.r_prev();
        let real = ekf_correct(prior, z, &r)?;
        self.q_window.push(extract_homography_block(&process_noise_sample(&real.gain, &real.innovation)));
        let log_likelihood = match lik {
            CameraLikelihood::Gaussian => gaussian_log_likelihood(&real.innovation, &real.s)?,
            CameraLikelihood::ChiSquared => {
                let (s_inv, det) = inv2(&real.s).ok_or(Error::SingularInnovation(real.s.determinant()))?;
                let d = (real.innovation.transpose() * s_inv * real.innovation)[0] + det.ln();
                p_of_d(d, chi2_dof).ln()
            }
        };
        Ok(ModelUpdate { posterior: real.posterior, innovation: real.innovation, s: real.s, r, log_likelihood })
    }
}

#[derive(Debug, Clone)]
pub struct Prediction {
    /// Probability-weighted mixture of the two model predictions.
    pub state: GroundState,
    pub per_model: [GroundState; 2],
    pub mu_pred: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct UpdateStats {
    pub log_likelihoods: [f64; 2],
    pub innovations: [Vec2; 2],
    pub r: [Mat2; 2],
}

#[derive(Debug, Clone)]
pub struct ImmState {
    pub models: [ModelFilter; 2],
    pub mu: [f64; 2],
    /// Row-stochastic: `trans[j][i]` is the probability of switching from
    /// model `j` to model `i`.
    pub trans: [[f64; 2]; 2],
    pub likelihood: CameraLikelihood,
    pub chi2_dof: u32,
}

/// Transition matrix with self-probabilities on the diagonal.
pub fn two_state_transition(p00: f64, p11: f64) -> [[f64; 2]; 2] {
    [[p00, 1.0 - p00], [1.0 - p11, p11]]
}

/// Moment-matched mixture `sum w_i N(x_i, P_i)`.
pub fn mixture(states: &[GroundState; 2], w: [f64; 2]) -> GroundState {
    let x = states[0].x * w[0] + states[1].x * w[1];
    let mut p = Mat13::zeros();
    for (s, wi) in states.iter().zip(w) {
        if wi == 0.0 {
            continue;
        }
        let dx = s.x - x;
        p += (s.p + dx * dx.transpose()) * wi;
    }
    let mut out = GroundState { x, p: symmetrize(&p) };
    out.pin_h9();
    out
}

/// `mu_i ∝ mu_pred_i * exp(log_lik_i)`; keeps `mu_pred` when every product
/// vanishes.
pub fn update_model_probs_log(mu_pred: [f64; 2], log_lik: [f64; 2]) -> [f64; 2] {
    let live: Vec<usize> = (0..2).filter(|&i| mu_pred[i] > 0.0 && log_lik[i] > f64::NEG_INFINITY).collect();
    if live.is_empty() {
        return mu_pred;
    }
    let top = live.iter().map(|&i| log_lik[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; 2];
    for &i in &live {
        out[i] = mu_pred[i] * (log_lik[i] - top).exp();
    }
    let total = out[0] + out[1];
    if !(total > 0.0) || !total.is_finite() {
        return mu_pred;
    }
    [out[0] / total, out[1] / total]
}

pub fn update_model_probs(mu_pred: [f64; 2], lik: [f64; 2]) -> [f64; 2] {
    update_model_probs_log(mu_pred, lik.map(f64::ln))
}

impl ImmState {
    /// New track filter from its first detection: position back-projected
    /// from the box bottom-centre, zero velocity, position covariance from
    /// the initial pixel noise mapped onto the ground, velocity variance
    /// `v`, and an exact homography.
    pub fn init(det: &BBox, h0: &Homography, cfg: &TrackerConfig) -> Result<Self> {
        let r0 = initial_r(det.width(), det.height(), cfg.sigma_m)?;
        let pos = h0.unproject(bottom_centre(det))?;
        let j = h0.jacobian_ground(pos)?;
        let j_inv = j
            .try_inverse()
            .ok_or_else(|| Error::SingularHomography("ground Jacobian is singular".into()))?;
        let pos_cov = j_inv * r0 * j_inv.transpose();
        let mut p = Mat13::zeros();
        for (a, ia) in [(0usize, 0usize), (1, 2)] {
            for (b, ib) in [(0usize, 0usize), (1, 2)] {
                p[(ia, ib)] = pos_cov[(a, b)];
            }
        }
        p[(1, 1)] = cfg.v;
        p[(3, 3)] = cfg.v;
        let state = GroundState::new(pos, (0.0, 0.0), h0, symmetrize(&p));
        Ok(Self::from_state(state, r0, cfg, [CameraModel::Static, CameraModel::Dynamic]))
    }

    pub fn from_state(state: GroundState, r0: Mat2, cfg: &TrackerConfig, kinds: [CameraModel; 2]) -> Self {
        Self {
            models: kinds.map(|k| ModelFilter::new(k, state.clone(), r0, cfg.m)),
            mu: [0.5, 0.5],
            trans: two_state_transition(cfg.p_ss, cfg.p_dd),
            likelihood: cfg.camera_likelihood,
            chi2_dof: cfg.chi2_dof,
        }
    }

    /// Predicted model probabilities `sum_j p_ji mu_j`.
    pub fn mu_pred(&self) -> [f64; 2] {
        predict_probs(&self.trans, self.mu)
    }

    /// Mixed initial conditions and the mixing weights `w[i][j] = mu^{i|j}`.
    pub fn mix(&self) -> Result<([GroundState; 2], [[f64; 2]; 2])> {
        let mu = self.mu;
        let simplex = mu.iter().all(|&m| m.is_finite() && m >= 0.0) && ((mu[0] + mu[1]) - 1.0).abs() < 1e-9;
        if !simplex {
            return Err(Error::DegenerateMixing(format!("model probabilities {mu:?} are not on the simplex")));
        }
        let c = self.mu_pred();
        let states = [&self.models[0].state, &self.models[1].state];
        let mut weights = [[0.0; 2]; 2];
        let mut mixed: [GroundState; 2] = [states[0].clone(), states[1].clone()];
        for i in 0..2 {
            if c[i] < 1e-15 {
                // nothing flows into this model; keep its own state
                weights[i][i] = 1.0;
                continue;
            }
            for j in 0..2 {
                weights[i][j] = self.trans[j][i] * mu[j] / c[i];
            }
            mixed[i] = mixture(&[states[0].clone(), states[1].clone()], weights[i]);
        }
        Ok((mixed, weights))
    }

    pub fn predict(&self, affine: &AffineMotion, q_ground: &Mat4, dt: f64) -> Result<Prediction> {
        let (mixed, _) = self.mix()?;
        let per_model = [
            self.models[0].predict_from(&mixed[0], affine, q_ground, dt),
            self.models[1].predict_from(&mixed[1], affine, q_ground, dt),
        ];
        let mu_pred = self.mu_pred();
        let state = mixture(&per_model, mu_pred);
        Ok(Prediction { state, per_model, mu_pred })
    }

    /// Measurement-noise estimate `R_{t-1}` weighted by the predicted model
    /// probabilities.
    pub fn r_prev(&self, mu_pred: [f64; 2]) -> Mat2 {
        self.models[0].r_prev() * mu_pred[0] + self.models[1].r_prev() * mu_pred[1]
    }

    pub fn update(&mut self, z: ImagePoint, pred: &Prediction) -> Result<UpdateStats> {
        let u0 = self.models[0].update(&pred.per_model[0], z, self.likelihood, self.chi2_dof)?;
        let u1 = self.models[1].update(&pred.per_model[1], z, self.likelihood, self.chi2_dof)?;
        let log_likelihoods = [u0.log_likelihood, u1.log_likelihood];
        self.mu = update_model_probs_log(pred.mu_pred, log_likelihoods);
        let stats = UpdateStats { log_likelihoods, innovations: [u0.innovation, u1.innovation], r: [u0.r, u1.r] };
        self.models[0].state = u0.posterior;
        self.models[1].state = u1.posterior;
        Ok(stats)
    }

    /// Accepts the prediction without a measurement.
    pub fn coast(&mut self, pred: &Prediction) {
        self.models[0].state = pred.per_model[0].clone();
        self.models[1].state = pred.per_model[1].clone();
        self.mu = pred.mu_pred;
    }

    /// Probability-weighted combined estimate.
    pub fn combine(&self) -> GroundState {
        mixture(&[self.models[0].state.clone(), self.models[1].state.clone()], self.mu)
    }
}

pub fn predict_probs(trans: &[[f64; 2]; 2], mu: [f64; 2]) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (i, o) in out.iter_mut().enumerate() {
        *o = trans[0][i] * mu[0] + trans[1][i] * mu[1];
    }
    let total = out[0] + out[1];
    [out[0] / total, out[1] / total]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eigenvalue;
    use crate::noise::ground_process_q;

    fn cfg() -> TrackerConfig {
        TrackerConfig::default()
    }

    fn identity_track() -> ImmState {
        // bottom-centre (5, 20)
        let det = BBox::from_ltwh(0.0, 10.0, 10.0, 10.0);
        ImmState::init(&det, &Homography::identity(), &cfg()).unwrap()
    }

    #[test]
    fn init_identity() {
        let s = identity_track();
        for m in &s.models {
            let x = &m.state.x;
            assert_eq!(&x.as_slice()[..4], &[5.0, 0.0, 20.0, 0.0]);
            assert_eq!(&x.as_slice()[4..], &Homography::identity().to_state_block());
            assert_eq!(m.state.p.fixed_view::<9, 9>(4, 4).into_owned(), Mat9::zeros());
            // identity Jacobian: position covariance equals R0 = diag(0.25, 0.25)
            assert!((m.state.p[(0, 0)] - 0.25).abs() < 1e-15);
            assert!((m.state.p[(2, 2)] - 0.25).abs() < 1e-15);
        }
        assert_eq!(s.mu, [0.5, 0.5]);
        assert_eq!(s.models[0].kind, CameraModel::Static);
        assert_eq!(s.models[1].kind, CameraModel::Dynamic);
    }

    #[test]
    fn init_velocity_variance() {
        let mut c = cfg();
        c.v = 0.56;
        let s = ImmState::init(&BBox::from_ltwh(0.0, 0.0, 4.0, 4.0), &Homography::identity(), &c).unwrap();
        assert_eq!(s.models[0].state.p[(1, 1)], 0.56);
        assert_eq!(s.models[0].state.p[(3, 3)], 0.56);
    }

    #[test]
    fn init_rejects_singular_homography() {
        let h = Homography::new([1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            ImmState::init(&BBox::from_ltwh(0.0, 0.0, 4.0, 4.0), &h, &cfg()),
            Err(Error::SingularHomography(_))
        ));
    }

    #[test]
    fn mix_identical_states() {
        let mut s = identity_track();
        s.mu = [0.3, 0.7];
        let (mixed, _) = s.mix().unwrap();
        for m in &mixed {
            assert!((m.x - s.models[0].state.x).abs().max() < 1e-12);
            assert!((m.p - s.models[0].state.p).abs().max() < 1e-12);
        }
    }

    #[test]
    fn mix_identity_transition_keeps_model0() {
        let mut s = identity_track();
        s.models[1].state.x[0] = 100.0;
        s.trans = two_state_transition(1.0, 1.0);
        s.mu = [1.0, 0.0];
        let (mixed, w) = s.mix().unwrap();
        assert_eq!(mixed[0], s.models[0].state);
        assert_eq!(w[0], [1.0, 0.0]);
    }

    #[test]
    fn mix_rejects_off_simplex() {
        let mut s = identity_track();
        s.mu = [0.7, 0.7];
        assert!(matches!(s.mix(), Err(Error::DegenerateMixing(_))));
    }

    #[test]
    fn mix_spread_term() {
        let mut s = identity_track();
        s.models[1].state.x[0] = 7.0;
        s.mu = [0.5, 0.5];
        s.trans = two_state_transition(0.8, 0.8);
        let (mixed, w) = s.mix().unwrap();
        assert!((w[0][0] - 0.8).abs() < 1e-15 && (w[0][1] - 0.2).abs() < 1e-15);
        // dense oracle for the (0,0) entry
        let p = s.models[0].state.p[(0, 0)];
        let mean = 0.8 * 5.0 + 0.2 * 7.0;
        let want = 0.8 * (p + (5.0f64 - mean).powi(2)) + 0.2 * (p + (7.0f64 - mean).powi(2));
        assert!((mixed[0].x[0] - mean).abs() < 1e-12);
        assert!((mixed[0].p[(0, 0)] - want).abs() < 1e-12);
        let avg = s.models[0].state.p;
        assert!(min_eigenvalue(&(mixed[0].p - avg)) > -1e-12);
    }

    #[test]
    fn predict_constant_velocity() {
        let mut s = identity_track();
        let q = ground_process_q(0.0, 0.0, 1.0);
        let p = s.predict(&AffineMotion::identity(), &q, 1.0).unwrap();
        for m in &p.per_model {
            assert_eq!((m.x[0], m.x[2]), (5.0, 20.0));
        }
        for m in s.models.iter_mut() {
            m.state.x[1] = 1.0;
        }
        let p = s.predict(&AffineMotion::identity(), &q, 1.0).unwrap();
        assert_eq!(p.per_model[0].x[0], 6.0);
        assert_eq!(p.state.x[0], 6.0);
    }

    #[test]
    fn predict_affine_moves_only_dynamic_homography() {
        let s = identity_track();
        let a = AffineMotion::translation(5.0, 0.0);
        let p = s.predict(&a, &Mat4::zeros(), 0.05).unwrap();
        let want = crate::geometry::apply_affine(&a, &Homography::identity()).unwrap();
        assert_eq!(p.per_model[1].homography().unwrap(), want);
        assert_eq!(p.per_model[0].homography().unwrap(), Homography::identity());
        assert_eq!(p.per_model[1].x[H9], 1.0);
    }

    #[test]
    fn update_zero_innovation_keeps_probs() {
        let mut s = identity_track();
        s.trans = two_state_transition(0.7, 0.6);
        let pred = s.predict(&AffineMotion::identity(), &Mat4::zeros(), 0.05).unwrap();
        let z = pred.per_model[0].measure().unwrap();
        let before = pred.per_model[0].x;
        let stats = s.update(z, &pred).unwrap();
        assert_eq!(stats.innovations[0], Vec2::zeros());
        assert!((s.models[0].state.x - before).abs().max() < 1e-12);
        assert!((s.mu[0] - pred.mu_pred[0]).abs() < 1e-12);
    }

    #[test]
    fn scalar_gain_oracle() {
        // identity H, P = diag(1, 0, 1, 0, 0...), R = I: gain 1/2 on x and y
        let mut p = Mat13::zeros();
        p[(0, 0)] = 1.0;
        p[(2, 2)] = 1.0;
        let prior = GroundState::new(GroundPoint::new(0.0, 0.0), (0.0, 0.0), &Homography::identity(), p);
        let c = ekf_correct(&prior, ImagePoint::new(2.0, -4.0), &Mat2::identity()).unwrap();
        assert!((c.gain[(0, 0)] - 0.5).abs() < 1e-15 && (c.gain[(2, 1)] - 0.5).abs() < 1e-15);
        assert!((c.posterior.x[0] - 1.0).abs() < 1e-15);
        assert!((c.posterior.x[2] + 2.0).abs() < 1e-15);
        assert!((c.posterior.p[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_likelihood_excludes_model() {
        assert_eq!(update_model_probs([0.4, 0.6], [0.0, 2.0]), [0.0, 1.0]);
        assert_eq!(update_model_probs([0.4, 0.6], [0.0, 0.0]), [0.4, 0.6]);
        let mu = update_model_probs([0.5, 0.5], [3.0, 1.0]);
        assert!((mu[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn combine_examples() {
        let mut s = identity_track();
        s.models[1].state.x[0] = 9.0;
        s.mu = [1.0, 0.0];
        assert_eq!(s.combine(), s.models[0].state);
        s.mu = [0.5, 0.5];
        let c = s.combine();
        assert_eq!(c.x[0], 7.0);
        assert!((c.p[(0, 0)] - (s.models[0].state.p[(0, 0)] + 4.0)).abs() < 1e-12);
        assert!(min_eigenvalue(&(c.p - s.models[0].state.p)) > -1e-12);
    }

    #[test]
    fn windows_fill_on_update() {
        let mut s = identity_track();
        let pred = s.predict(&AffineMotion::identity(), &Mat4::zeros(), 0.05).unwrap();
        s.update(ImagePoint::new(5.5, 20.2), &pred).unwrap();
        for m in &s.models {
            assert_eq!(m.r_window.len(), 1);
            assert_eq!(m.q_window.len(), 1);
        }
    }
}

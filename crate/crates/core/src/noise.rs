//! Online noise covariance estimation over fixed-length moving windows.

use std::collections::VecDeque;

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::linalg::{symmetrize, Mat13, Mat13x2, Mat2, Mat2x13, Mat4, Mat9, Vec2};

/// Moving window of covariance samples; the estimate is the mean of
/// whatever is currently stored.
#[derive(Debug, Clone)]
pub struct NoiseWindow<const D: usize> {
    samples: VecDeque<SMatrix<f64, D, D>>,
    capacity: usize,
}

impl<const D: usize> NoiseWindow<D> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "noise window capacity must be positive");
        Self { samples: VecDeque::with_capacity(capacity), capacity }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Stores the symmetric part of `sample`, evicting the oldest at capacity.
    pub fn push(&mut self, sample: SMatrix<f64, D, D>) {
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back(symmetrize(&sample));
    }

    pub fn mean(&self) -> Result<SMatrix<f64, D, D>> {
        if self.samples.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let sum = self.samples.iter().fold(SMatrix::<f64, D, D>::zeros(), |acc, s| acc + s);
        Ok(symmetrize(&(sum / self.samples.len() as f64)))
    }
}

pub type MeasurementWindow = NoiseWindow<2>;
pub type ProcessWindow = NoiseWindow<9>;

/// Measurement noise used before any residual has been observed.
pub fn initial_r(w: f64, h: f64, sigma_m: f64) -> Result<Mat2> {
    if !(w > 0.0 && h > 0.0) {
        return Err(Error::InvalidBox { w, h });
    }
    Ok(Mat2::new((sigma_m * w).powi(2), 0.0, 0.0, (sigma_m * h).powi(2)))
}

/// Constant-velocity process noise `G diag(sx, sy) G^T` for the state
/// ordering `(x, vx, y, vy)`.
pub fn ground_process_q(sigma_x: f64, sigma_y: f64, dt: f64) -> Mat4 {
    let a = 0.5 * dt * dt;
    #[rustfmt::skip]
    let g = SMatrix::<f64, 4, 2>::new(
        a, 0.0,
        dt, 0.0,
        0.0, a,
        0.0, dt,
    );
    g * Mat2::new(sigma_x, 0.0, 0.0, sigma_y) * g.transpose()
}

/// `e e^T + J P J^T` with `e` the post-update residual.
pub fn measurement_noise_sample(residual: &Vec2, j: &Mat2x13, p_prior: &Mat13) -> Mat2 {
    symmetrize(&(residual * residual.transpose() + j * p_prior * j.transpose()))
}

/// `K d d^T K^T` with `d` the innovation.
pub fn process_noise_sample(gain: &Mat13x2, innovation: &Vec2) -> Mat13 {
    let kd = gain * innovation;
    kd * kd.transpose()
}

/// Homography block (state indices 4..13) of a full-state sample, with the
/// `h9` row and column zeroed.
pub fn extract_homography_block(q_full: &Mat13) -> Mat9 {
    let mut q: Mat9 = q_full.fixed_view::<9, 9>(4, 4).into_owned();
    q.row_mut(8).fill(0.0);
    q.column_mut(8).fill(0.0);
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_r_examples() {
        assert_eq!(initial_r(100.0, 200.0, 0.05).unwrap(), Mat2::new(25.0, 0.0, 0.0, 100.0));
        assert_eq!(initial_r(20.0, 20.0, 0.05).unwrap(), Mat2::identity());
        let r = initial_r(10.0, 10.0, 0.1).unwrap();
        assert!((r - Mat2::identity()).abs().max() < 1e-15);
        assert!(matches!(initial_r(0.0, 5.0, 0.05), Err(Error::InvalidBox { .. })));
        assert!(matches!(initial_r(5.0, -1.0, 0.05), Err(Error::InvalidBox { .. })));
    }

    #[test]
    fn ground_q_unit() {
        #[rustfmt::skip]
        let want = Mat4::new(
            0.25, 0.5, 0.0, 0.0,
            0.5, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.25, 0.5,
            0.0, 0.0, 0.5, 1.0,
        );
        assert_eq!(ground_process_q(1.0, 1.0, 1.0), want);
        assert_eq!(ground_process_q(0.0, 0.0, 0.3), Mat4::zeros());
    }

    #[test]
    fn ground_q_dancetrack_values() {
        // element-wise oracle: q_ij = sigma * g_i * g_j within each axis block
        let dt = 1.0 / 20.0;
        let q = ground_process_q(5.0, 18.75, dt);
        let g = [dt * dt / 2.0, dt];
        for (axis, s) in [(0usize, 5.0), (1, 18.75)] {
            for a in 0..2 {
                for b in 0..2 {
                    let want = s * g[a] * g[b];
                    assert!((q[(2 * axis + a, 2 * axis + b)] - want).abs() < 1e-18);
                }
            }
        }
        assert_eq!(q[(0, 2)], 0.0);
        assert_eq!(q[(1, 3)], 0.0);
        assert!((q[(0, 0)] - 5.0 * 0.00125f64.powi(2)).abs() < 1e-18);
        assert!((q[(3, 3)] - 18.75 * 0.0025).abs() < 1e-15);
    }

    #[test]
    fn measurement_sample_examples() {
        let j = Mat2x13::zeros();
        let p = Mat13::zeros();
        assert_eq!(measurement_noise_sample(&Vec2::zeros(), &j, &p), Mat2::zeros());
        assert_eq!(measurement_noise_sample(&Vec2::new(1.0, 2.0), &j, &p), Mat2::new(1.0, 2.0, 2.0, 4.0));
    }

    #[test]
    fn process_sample_examples() {
        let k = Mat13x2::from_fn(|r, c| (r as f64) - 3.0 * c as f64);
        assert_eq!(process_noise_sample(&Mat13x2::zeros(), &Vec2::new(3.0, 1.0)), Mat13::zeros());
        assert_eq!(process_noise_sample(&k, &Vec2::zeros()), Mat13::zeros());
    }

    #[test]
    fn window_examples() {
        let mut w = MeasurementWindow::new(5);
        assert!(matches!(w.mean(), Err(Error::EmptyWindow)));
        let s = Mat2::new(2.0, 1.0, 1.0, 3.0);
        w.push(s);
        assert_eq!(w.mean().unwrap(), s);
        for _ in 0..6 {
            w.push(s);
        }
        assert_eq!(w.len(), 5);
        assert_eq!(w.mean().unwrap(), s);

        let mut w = MeasurementWindow::new(5);
        w.push(Mat2::zeros());
        w.push(Mat2::identity() * 2.0);
        assert_eq!(w.mean().unwrap(), Mat2::identity());
    }

    #[test]
    fn window_evicts_oldest() {
        let mut w = MeasurementWindow::new(2);
        w.push(Mat2::identity() * 100.0);
        w.push(Mat2::identity());
        w.push(Mat2::identity() * 3.0);
        assert_eq!(w.mean().unwrap(), Mat2::identity() * 2.0);
    }

    #[test]
    fn homography_block_examples() {
        let q = extract_homography_block(&Mat13::identity());
        let mut want = Mat9::identity();
        want[(8, 8)] = 0.0;
        assert_eq!(q, want);

        let mut full = Mat13::zeros();
        let block = Mat9::from_fn(|r, c| if r < 8 && c < 8 { (r * 9 + c) as f64 } else { 0.0 });
        full.fixed_view_mut::<9, 9>(4, 4).copy_from(&block);
        full.fixed_view_mut::<4, 4>(0, 0).fill(7.0);
        assert_eq!(extract_homography_block(&full), block);
    }
}

//! Projective geometry between the ground plane and the image plane.
//!
//! Homographies map ground coordinates (metres) to image coordinates
//! (pixels) and are always stored with `h9 == 1`.

use crate::error::{Error, Result};
use crate::image_filter::BBox;
use crate::linalg::{Mat2, Mat2x9, Mat3};

/// Guard for projective division.
pub const EPS_DIV: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundPoint {
    pub x: f64,
    pub y: f64,
}

impl GroundPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePoint {
    pub x: f64,
    pub y: f64,
}

impl ImagePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Ground-to-image homography, row-major `h1..h9` with `h9 == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    h: [f64; 9],
}

impl Homography {
    pub fn identity() -> Self {
        Self { h: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0] }
    }

    /// Builds from nine row-major entries, dividing through by `h9`.
    pub fn new(entries: [f64; 9]) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularHomography("non-finite entry".into()));
        }
        let h9 = entries[8];
        if h9.abs() < EPS_DIV {
            return Err(Error::SingularHomography(format!("h9 = {h9:e}")));
        }
        let mut h = entries.map(|v| v / h9);
        h[8] = 1.0;
        Ok(Self { h })
    }

    pub fn from_matrix(m: &Mat3) -> Result<Self> {
        let mut e = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                e[3 * r + c] = m[(r, c)];
            }
        }
        Self::new(e)
    }

    pub fn entries(&self) -> [f64; 9] {
        self.h
    }

    pub fn matrix(&self) -> Mat3 {
        Mat3::from_row_slice(&self.h)
    }

    /// Entries in state order `(h1, h4, h7, h2, h5, h8, h3, h6, h9)`,
    /// i.e. the columns of the matrix stacked.
    pub fn to_state_block(&self) -> [f64; 9] {
        let h = &self.h;
        [h[0], h[3], h[6], h[1], h[4], h[7], h[2], h[5], h[8]]
    }

    pub fn from_state_block(s: &[f64]) -> Result<Self> {
        assert_eq!(s.len(), 9);
        Self::new([s[0], s[3], s[6], s[1], s[4], s[7], s[2], s[5], s[8]])
    }

    fn unnormalized(&self, p: GroundPoint) -> [f64; 3] {
        let h = &self.h;
        [
            h[0] * p.x + h[1] * p.y + h[2],
            h[3] * p.x + h[4] * p.y + h[5],
            h[6] * p.x + h[7] * p.y + h[8],
        ]
    }

    pub fn project(&self, p: GroundPoint) -> Result<ImagePoint> {
        let b = self.unnormalized(p);
        if b[2].abs() <= EPS_DIV {
            return Err(Error::DegenerateProjection(b[2]));
        }
        Ok(ImagePoint::new(b[0] / b[2], b[1] / b[2]))
    }

    pub fn unproject(&self, q: ImagePoint) -> Result<GroundPoint> {
        let m = self.matrix();
        let det = m.determinant();
        if !(det.abs() > EPS_DIV) {
            return Err(Error::SingularHomography(format!("det = {det:e}")));
        }
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::SingularHomography("not invertible".into()))?;
        let b = inv * nalgebra::Vector3::new(q.x, q.y, 1.0);
        if b[2].abs() <= EPS_DIV {
            return Err(Error::DegenerateProjection(b[2]));
        }
        Ok(GroundPoint::new(b[0] / b[2], b[1] / b[2]))
    }

    /// Jacobian of the projected point with respect to `(x, y)` on the ground.
    pub fn jacobian_ground(&self, p: GroundPoint) -> Result<Mat2> {
        let b = self.unnormalized(p);
        if b[2].abs() <= EPS_DIV {
            return Err(Error::DegenerateProjection(b[2]));
        }
        let g = 1.0 / b[2];
        let (xi, yi) = (b[0] * g, b[1] * g);
        let h = &self.h;
        Ok(Mat2::new(
            g * (h[0] - h[6] * xi),
            g * (h[1] - h[7] * xi),
            g * (h[3] - h[6] * yi),
            g * (h[4] - h[7] * yi),
        ))
    }

    /// Jacobian of the projected point with respect to the homography
    /// entries, columns in state order. The `h9` column is zero since `h9`
    /// is pinned by normalization.
    pub fn jacobian_homography(&self, p: GroundPoint) -> Result<Mat2x9> {
        let b = self.unnormalized(p);
        if b[2].abs() <= EPS_DIV {
            return Err(Error::DegenerateProjection(b[2]));
        }
        let g = 1.0 / b[2];
        let (xi, yi) = (b[0] * g, b[1] * g);
        let (xw, yw) = (p.x, p.y);
        #[rustfmt::skip]
        let j = Mat2x9::from_row_slice(&[
            xw, 0.0, -xi * xw, yw, 0.0, -xi * yw, 1.0, 0.0, 0.0,
            0.0, xw, -yi * xw, 0.0, yw, -yi * yw, 0.0, 1.0, 0.0,
        ]);
        Ok(j * g)
    }
}

impl Default for Homography {
    fn default() -> Self {
        Self::identity()
    }
}

/// Global camera motion between consecutive frames: `[R | t]` with an
/// implicit bottom row `(0, 0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMotion {
    pub r: [[f64; 2]; 2],
    pub t: [f64; 2],
}

impl AffineMotion {
    pub fn identity() -> Self {
        Self { r: [[1.0, 0.0], [0.0, 1.0]], t: [0.0, 0.0] }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self { t: [tx, ty], ..Self::identity() }
    }

    /// From the six entries `a11 a12 a13 a21 a22 a23`.
    pub fn from_rows(a: [f64; 6]) -> Self {
        Self { r: [[a[0], a[1]], [a[3], a[4]]], t: [a[2], a[5]] }
    }

    pub fn rows(&self) -> [f64; 6] {
        [self.r[0][0], self.r[0][1], self.t[0], self.r[1][0], self.r[1][1], self.t[1]]
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().flatten().chain(self.t.iter()).all(|v| v.is_finite())
    }

    pub fn matrix(&self) -> Mat3 {
        Mat3::new(
            self.r[0][0], self.r[0][1], self.t[0],
            self.r[1][0], self.r[1][1], self.t[1],
            0.0, 0.0, 1.0,
        )
    }

    pub fn apply_point(&self, p: ImagePoint) -> ImagePoint {
        ImagePoint::new(
            self.r[0][0] * p.x + self.r[0][1] * p.y + self.t[0],
            self.r[1][0] * p.x + self.r[1][1] * p.y + self.t[1],
        )
    }
}

impl Default for AffineMotion {
    fn default() -> Self {
        Self::identity()
    }
}

/// Propagates a homography through one frame of camera motion.
pub fn apply_affine(a: &AffineMotion, h: &Homography) -> Result<Homography> {
    let m = a.matrix() * h.matrix();
    if m[(2, 2)].abs() < EPS_DIV {
        return Err(Error::SingularHomography(format!("h9 = {:e} after camera motion", m[(2, 2)])));
    }
    Homography::from_matrix(&m)
}

/// Camera-motion compensation of a box width and height.
pub fn apply_affine_wh(a: &AffineMotion, w: f64, h: f64) -> (f64, f64) {
    (a.r[0][0] * w + a.r[0][1] * h, a.r[1][0] * w + a.r[1][1] * h)
}

/// The point where the box touches the ground: horizontal centre, bottom edge.
pub fn bottom_centre(b: &BBox) -> ImagePoint {
    ImagePoint::new(0.5 * (b.l + b.r), b.b)
}

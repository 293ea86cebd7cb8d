//! Image-plane box motion: a short buffer of associated boxes whose mean
//! frame-to-frame displacement predicts the next box, plus the buffered IoU
//! used to score boxes against detections.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::ImagePoint;

/// Axis-aligned box in pixels, stored as left/top/right/bottom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub l: f64,
    pub t: f64,
    pub r: f64,
    pub b: f64,
}

impl BBox {
    pub fn new(l: f64, t: f64, r: f64, b: f64) -> Self {
        Self { l, t, r, b }
    }

    pub fn from_ltwh(l: f64, t: f64, w: f64, h: f64) -> Self {
        Self { l, t, r: l + w, b: t + h }
    }

    pub fn width(&self) -> f64 {
        self.r - self.l
    }

    pub fn height(&self) -> f64 {
        self.b - self.t
    }

    pub fn ltwh(&self) -> [f64; 4] {
        [self.l, self.t, self.width(), self.height()]
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    fn as_array(&self) -> [f64; 4] {
        [self.l, self.t, self.r, self.b]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Scales width and height by `factor` about the box centre.
    pub fn expanded(&self, factor: f64) -> Self {
        let (cx, cy) = (0.5 * (self.l + self.r), 0.5 * (self.t + self.b));
        let (hw, hh) = (0.5 * factor * self.width(), 0.5 * factor * self.height());
        Self::new(cx - hw, cy - hh, cx + hw, cy + hh)
    }
}

pub fn iou(a: &BBox, c: &BBox) -> f64 {
    let iw = (a.r.min(c.r) - a.l.max(c.l)).max(0.0);
    let ih = (a.b.min(c.b) - a.t.max(c.t)).max(0.0);
    let inter = iw * ih;
    let union = a.area() + c.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// IoU after both boxes are grown by `2b + 1` about their centres.
pub fn biou(a: &BBox, c: &BBox, buf_scale: f64) -> f64 {
    if buf_scale == 0.0 {
        return iou(a, c);
    }
    let f = 2.0 * buf_scale + 1.0;
    iou(&a.expanded(f), &c.expanded(f))
}

/// Box with the given bottom-centre and size.
pub fn coast_box(ground_proj: ImagePoint, wh: (f64, f64)) -> BBox {
    let (w, h) = wh;
    BBox::new(ground_proj.x - 0.5 * w, ground_proj.y - h, ground_proj.x + 0.5 * w, ground_proj.y)
}

#[derive(Debug, Clone)]
pub struct BoxBuffer {
    boxes: VecDeque<BBox>,
    capacity: usize,
}

impl BoxBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "box buffer capacity must be positive");
        Self { boxes: VecDeque::with_capacity(capacity), capacity }
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn last(&self) -> Option<&BBox> {
        self.boxes.back()
    }

    pub fn push(&mut self, b: BBox) {
        if self.boxes.len() == self.capacity {
            self.boxes.pop_front();
        }
        self.boxes.push_back(b);
    }

    pub fn clear_and_seed(&mut self, b: BBox) {
        self.boxes.clear();
        self.boxes.push_back(b);
    }

    /// Last box plus the mean displacement between consecutive buffered
    /// boxes; the last box alone when fewer than two are buffered.
    pub fn predict(&self) -> Result<BBox> {
        let last = *self.boxes.back().ok_or(Error::EmptyBuffer)?;
        if self.boxes.len() < 2 {
            return Ok(last);
        }
        let steps = (self.boxes.len() - 1) as f64;
        let first = self.boxes.front().unwrap().as_array();
        let last_a = last.as_array();
        // consecutive differences telescope
        let mut out = last_a;
        for k in 0..4 {
            out[k] += (last_a[k] - first[k]) / steps;
        }
        Ok(BBox::from_array(out))
    }
}

//! CLEAR-MOT accuracy and identity F1.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;

use crate::association::maximize_assignment;
use crate::image_filter::{iou, BBox};
use crate::tracker::FrameResult;

/// Per-frame labelled boxes, `(id, box)`.
pub type Labeled = BTreeMap<i64, Vec<(u64, BBox)>>;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClearMetrics {
    pub gt: usize,
    pub hyp: usize,
    pub matches: usize,
    pub fp: usize,
    pub fn_: usize,
    pub idsw: usize,
    pub mota: f64,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
    pub idf1: f64,
}

/// Collects tracker outputs into per-frame labelled boxes.
pub fn labeled_from_results(results: &[FrameResult]) -> Labeled {
    let mut out = Labeled::new();
    for r in results {
        for row in &r.outputs {
            out.entry(row.frame).or_default().push((row.id, row.bbox));
        }
    }
    out
}

fn frames_of(gt: &Labeled, res: &Labeled) -> BTreeSet<i64> {
    gt.keys().chain(res.keys()).copied().collect()
}

/// Frame-by-frame matching with correspondence carry-over and IoU-gated
/// optimal assignment for the rest.
fn clear_mot(gt: &Labeled, res: &Labeled, iou_gate: f64) -> (usize, usize, usize, usize) {
    let empty = Vec::new();
    let mut last: HashMap<u64, u64> = HashMap::new();
    let (mut n_gt, mut n_hyp, mut n_match, mut idsw) = (0, 0, 0, 0);
    for f in frames_of(gt, res) {
        let g = gt.get(&f).unwrap_or(&empty);
        let h = res.get(&f).unwrap_or(&empty);
        n_gt += g.len();
        n_hyp += h.len();
        let mut g_used = vec![false; g.len()];
        let mut h_used = vec![false; h.len()];
        let mut matched: Vec<(usize, usize)> = Vec::new();
        for (gi, (gid, gb)) in g.iter().enumerate() {
            if let Some(&hid) = last.get(gid) {
                if let Some(hi) = h.iter().position(|(id, _)| *id == hid) {
                    if !h_used[hi] && iou(gb, &h[hi].1) >= iou_gate {
                        g_used[gi] = true;
                        h_used[hi] = true;
                        matched.push((gi, hi));
                    }
                }
            }
        }
        let gi_free: Vec<usize> = (0..g.len()).filter(|&i| !g_used[i]).collect();
        let hi_free: Vec<usize> = (0..h.len()).filter(|&i| !h_used[i]).collect();
        if !gi_free.is_empty() && !hi_free.is_empty() {
            let w = DMatrix::from_fn(gi_free.len(), hi_free.len(), |a, b| iou(&g[gi_free[a]].1, &h[hi_free[b]].1));
            for (a, b) in maximize_assignment(&w, iou_gate) {
                if w[(a, b)] > 0.0 {
                    matched.push((gi_free[a], hi_free[b]));
                }
            }
        }
        for (gi, hi) in matched {
            let (gid, hid) = (g[gi].0, h[hi].0);
            if let Some(prev) = last.insert(gid, hid) {
                if prev != hid {
                    idsw += 1;
                }
            }
            n_match += 1;
        }
    }
    (n_gt, n_hyp, n_match, idsw)
}

/// Identity true positives under the best global one-to-one id mapping.
fn id_true_positives(gt: &Labeled, res: &Labeled, iou_gate: f64) -> usize {
    let gids: Vec<u64> = gt.values().flatten().map(|(id, _)| *id).collect::<BTreeSet<_>>().into_iter().collect();
    let hids: Vec<u64> = res.values().flatten().map(|(id, _)| *id).collect::<BTreeSet<_>>().into_iter().collect();
    if gids.is_empty() || hids.is_empty() {
        return 0;
    }
    let gpos: HashMap<u64, usize> = gids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let hpos: HashMap<u64, usize> = hids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut counts = DMatrix::<f64>::zeros(gids.len(), hids.len());
    for (f, g) in gt {
        let Some(h) = res.get(f) else { continue };
        for (gid, gb) in g {
            for (hid, hb) in h {
                if iou(gb, hb) >= iou_gate {
                    counts[(gpos[gid], hpos[hid])] += 1.0;
                }
            }
        }
    }
    maximize_assignment(&counts, 1.0).into_iter().map(|(i, j)| counts[(i, j)] as usize).sum()
}

pub fn evaluate(gt: &Labeled, res: &Labeled, iou_gate: f64) -> ClearMetrics {
    let (n_gt, n_hyp, n_match, idsw) = clear_mot(gt, res, iou_gate);
    let fp = n_hyp - n_match;
    let fn_ = n_gt - n_match;
    let mota = if n_gt == 0 {
        if n_hyp == 0 { 1.0 } else { f64::NEG_INFINITY }
    } else {
        1.0 - (fn_ + fp + idsw) as f64 / n_gt as f64
    };
    let idtp = id_true_positives(gt, res, iou_gate);
    let idfp = n_hyp - idtp;
    let idfn = n_gt - idtp;
    let denom = 2 * idtp + idfp + idfn;
    let idf1 = if denom == 0 { 1.0 } else { 2.0 * idtp as f64 / denom as f64 };
    ClearMetrics { gt: n_gt, hyp: n_hyp, matches: n_match, fp, fn_, idsw, mota, idtp, idfp, idfn, idf1 }
}

pub fn mota(gt: &Labeled, res: &Labeled, iou_gate: f64) -> f64 {
    evaluate(gt, res, iou_gate).mota
}

pub fn idf1(gt: &Labeled, res: &Labeled, iou_gate: f64) -> f64 {
    evaluate(gt, res, iou_gate).idf1
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two agents moving toward each other along x over 10 frames.
    fn two_agents() -> Labeled {
        let mut gt = Labeled::new();
        for f in 1..=10 {
            let a = BBox::from_ltwh(10.0 * f as f64, 0.0, 20.0, 40.0);
            let b = BBox::from_ltwh(300.0 - 10.0 * f as f64, 0.0, 20.0, 40.0);
            gt.insert(f, vec![(1, a), (2, b)]);
        }
        gt
    }

    fn relabel(gt: &Labeled, map: impl Fn(i64, u64) -> u64) -> Labeled {
        gt.iter().map(|(f, v)| (*f, v.iter().map(|(id, b)| (map(*f, *id), *b)).collect())).collect()
    }

    #[test]
    fn perfect_and_empty() {
        let gt = two_agents();
        let m = evaluate(&gt, &gt, 0.5);
        assert_eq!((m.mota, m.idf1, m.idsw), (1.0, 1.0, 0));
        let m = evaluate(&gt, &Labeled::new(), 0.5);
        assert_eq!((m.mota, m.idf1, m.fn_), (0.0, 0.0, 20));
    }

    #[test]
    fn mid_sequence_swap_counts_two_switches() {
        let gt = two_agents();
        let res = relabel(&gt, |f, id| if f >= 6 { 3 - id + 10 } else { id + 10 });
        let m = evaluate(&gt, &res, 0.5);
        assert_eq!(m.idsw, 2);
        assert!((m.mota - (1.0 - 2.0 / 20.0)).abs() < 1e-15);
    }

    #[test]
    fn half_sequence_swap_idf1_matches_brute_force() {
        let gt = two_agents();
        // agent 1 changes label halfway, agent 2 keeps one label
        let res = relabel(&gt, |f, id| match (id, f >= 6) {
            (1, false) => 7,
            (1, true) => 9,
            _ => 8,
        });
        // brute force over every injective map from gt ids to hyp ids
        let hyps = [7u64, 8, 9];
        let mut best = 0;
        for &a in &hyps {
            for &b in &hyps {
                if a == b {
                    continue;
                }
                let mut tp = 0;
                for (f, g) in &gt {
                    for (gid, gb) in g {
                        let want = if *gid == 1 { a } else { b };
                        if res[f].iter().any(|(hid, hb)| *hid == want && iou(gb, hb) >= 0.5) {
                            tp += 1;
                        }
                    }
                }
                best = best.max(tp);
            }
        }
        let want = 2.0 * best as f64 / (2.0 * best as f64 + (20 - best) as f64 * 2.0);
        let m = evaluate(&gt, &res, 0.5);
        assert_eq!(m.idtp, best);
        assert!((m.idf1 - want).abs() < 1e-15);
        assert!((m.idf1 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn relabeling_is_invariant() {
        let gt = two_agents();
        let res = relabel(&gt, |f, id| if f >= 4 && id == 2 { 5 } else { id });
        let a = evaluate(&gt, &res, 0.5);
        let b = evaluate(&gt, &relabel(&res, |_, id| id * 31 + 2), 0.5);
        assert_eq!(a, b);
    }
}

use std::collections::{BTreeSet, HashSet};

use groundtrack::eval::synth::{generate, CameraScript, SceneSpec};
use groundtrack::linalg::min_eigenvalue;
use groundtrack::tracker::{run_sequence, Lifecycle};
use groundtrack::{AffineMotion, Tracker, TrackerConfig};

fn busy_scene(seed: u64) -> groundtrack::eval::synth::Scene {
    let mut spec = SceneSpec::crossing(seed, 6, 150, CameraScript::Pan { speed: 2.0, amplitude: 80.0 });
    spec.noise_px = 2.0;
    spec.dropout = 0.2;
    generate(&spec).unwrap()
}

#[test]
fn output_ids_are_confirmed_and_unique() {
    let scene = busy_scene(3);
    let mut tracker = Tracker::new(TrackerConfig::default(), scene.h0).unwrap();
    let mut retired: BTreeSet<u64> = BTreeSet::new();
    let mut alive: BTreeSet<u64> = BTreeSet::new();
    for (&frame, dets) in &scene.detections {
        let a = scene.affines.get(&frame).copied().unwrap_or_default();
        let r = tracker.step(frame, dets, &a).unwrap();
        let ids: Vec<u64> = r.outputs.iter().map(|o| o.id).collect();
        assert_eq!(ids.len(), ids.iter().collect::<HashSet<_>>().len(), "duplicate id in frame {frame}");
        for o in &r.outputs {
            let d = r.diagnostics.iter().find(|d| d.id == o.id).expect("output track exists");
            assert_eq!(d.lifecycle, Lifecycle::Confirmed);
            assert!(!retired.contains(&o.id), "id {} reused", o.id);
        }
        // each detection feeds at most one output
        let boxes: HashSet<[u64; 4]> = r.outputs.iter().map(|o| o.bbox.ltwh().map(f64::to_bits)).collect();
        assert_eq!(boxes.len(), r.outputs.len());

        let now: BTreeSet<u64> = r.diagnostics.iter().map(|d| d.id).collect();
        retired.extend(alive.difference(&now));
        alive = now;
    }
}

#[test]
fn filter_invariants_hold_along_a_sequence() {
    let scene = busy_scene(4);
    let mut tracker = Tracker::new(TrackerConfig::default(), scene.h0).unwrap();
    for (&frame, dets) in &scene.detections {
        let a = scene.affines.get(&frame).copied().unwrap_or_default();
        tracker.step(frame, dets, &a).unwrap();
        for t in tracker.tracks() {
            assert!((t.imm.mu.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!((t.assoc_mu.mu_i + t.assoc_mu.mu_w - 1.0).abs() < 1e-9);
            for m in &t.imm.models {
                let s = &m.state;
                assert_eq!(s.x[12], 1.0);
                assert!(s.p.row(12).iter().all(|&v| v == 0.0));
                assert!(s.p.column(12).iter().all(|&v| v == 0.0));
                assert_eq!(s.p, s.p.transpose());
                assert!(min_eigenvalue(&s.p) >= -1e-9 * s.p.abs().max());
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let scene = busy_scene(5);
    let a = run_sequence(&scene.detections, &scene.h0, &scene.affines, &TrackerConfig::default()).unwrap();
    let b = run_sequence(&scene.detections, &scene.h0, &scene.affines, &TrackerConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tracks_expire_after_omega() {
    let scene = busy_scene(6);
    let cfg = TrackerConfig { omega: 5, ..TrackerConfig::default() };
    let mut tracker = Tracker::new(cfg, scene.h0).unwrap();
    for (&frame, dets) in scene.detections.range(..=60) {
        tracker.step(frame, dets, &scene.affines.get(&frame).copied().unwrap_or_default()).unwrap();
    }
    for f in 61..=66 {
        tracker.step(f, &[], &AffineMotion::identity()).unwrap();
    }
    assert!(tracker.tracks().is_empty());
}

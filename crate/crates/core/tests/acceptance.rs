//! Acceptance checks for the whole toolkit, one test per criterion.
//!
//! Each test prints a `criterion N (...): pass` line when it succeeds; a
//! failing criterion fails its test. Criteria 7 and 8 share one seeded
//! dataset (4 groups × 3 agents × 2 days, ten minutes each) and one
//! experiment run, cached in process-wide cells.

use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bodyfield_core::classify::{
    binary_gradient, binary_loss, smooth_predictions, train, Hyperparams,
};
use bodyfield_core::evaluate::{
    logo_folds, macro_f, run_experiment, train_cell_fold_model, write_report, ExperimentConfig,
    ExperimentReport, SensorConfig,
};
use bodyfield_core::features::FeatureSchema;
use bodyfield_core::ingest::{LabelClass, SessionData};
use bodyfield_core::preprocess::{
    clip_delta, make_windows, task_classes, Source, TargetClass, WindowParams,
};
use bodyfield_core::sim::{
    capacitance_jump, charge_share, group_day_script, relax, synth_session, BodyState, SimConfig,
};

// ---------------------------------------------------------------------------
// 1. physics invariants
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_physics_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let config = SimConfig::default();
    for _ in 0..1000 {
        // charge conservation: the shared potential preserves total charge
        let n = rng.gen_range(2..=5);
        let bodies: Vec<BodyState> = (0..n)
            .map(|_| BodyState::new(rng.gen_range(10.0..500.0), rng.gen_range(-5.0..5.0)).unwrap())
            .collect();
        let shared = charge_share(&bodies).unwrap();
        let charge_before: f64 = bodies.iter().map(|b| b.capacitance_pf * b.potential_v).sum();
        let c_total: f64 = bodies.iter().map(|b| b.capacitance_pf).sum();
        let charge_after = shared * c_total;
        let scale: f64 = bodies
            .iter()
            .map(|b| (b.capacitance_pf * b.potential_v).abs())
            .sum::<f64>()
            .max(1e-30);
        assert!(
            ((charge_before - charge_after) / scale).abs() <= 1e-9,
            "charge not conserved: {charge_before} vs {charge_after}"
        );

        // capacitance jump round trip
        let v = rng.gen_range(-5.0..5.0);
        let c_old = rng.gen_range(10.0..500.0);
        let c_new = rng.gen_range(10.0..500.0);
        let back = capacitance_jump(capacitance_jump(v, c_old, c_new).unwrap(), c_new, c_old)
            .unwrap();
        assert!(
            (back - v).abs() <= 1e-12 * v.abs().max(1.0),
            "jump round trip drifted: {v} -> {back}"
        );

        // relaxation is a contraction toward the rest potential
        let dt = rng.gen_range(0.001..1.0);
        let v1 = rng.gen_range(-5.0..5.0);
        let v2 = rng.gen_range(-5.0..5.0);
        let r1 = relax(v1, &config, dt).unwrap();
        let r2 = relax(v2, &config, dt).unwrap();
        assert!((r1 - r2).abs() < (v1 - v2).abs() || v1 == v2);
        let rest = config.rest_potential_v;
        assert!((r1 - rest).abs() <= (v1 - rest).abs());
    }
    println!("criterion 1 (physics invariants): pass");
}

// ---------------------------------------------------------------------------
// 2. amplitude ordering
// ---------------------------------------------------------------------------

/// Mean |Δpotential| per sample inside intervals of one kind, skipping the
/// first half second of each interval (grab transients, settling).
fn class_delta(session: &SessionData, want: LabelClass, want_joint: bool) -> Option<f64> {
    let rate = session.sample_rate_hz;
    let mut sum = 0.0;
    let mut n = 0usize;
    for interval in &session.labels {
        if interval.class != want || interval.joint != want_joint {
            continue;
        }
        let lo = ((interval.start_s + 0.5) * rate).ceil() as usize;
        let hi = ((interval.end_s * rate).floor() as usize).min(session.n_samples());
        if hi <= lo + 1 {
            continue;
        }
        for i in (lo + 1)..hi {
            sum += (session.potential_mv[i] - session.potential_mv[i - 1]).abs();
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

#[test]
fn criterion_2_amplitude_ordering() {
    let config = SimConfig {
        noise_std_mv: 0.0,
        ..SimConfig::default()
    };
    for seed in 0..20 {
        let script = group_day_script(1, 1, &["w1", "w2", "w3"], 300.0, seed).unwrap();
        let sessions = synth_session(&script, &config).unwrap();
        let mut walk = Vec::new();
        let mut carry = Vec::new();
        let mut joint = Vec::new();
        for s in &sessions {
            walk.extend(class_delta(s, LabelClass::A3, false));
            carry.extend(class_delta(s, LabelClass::A4, false));
            joint.extend(class_delta(s, LabelClass::A5, true));
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(!walk.is_empty() && !carry.is_empty() && !joint.is_empty(), "seed {seed}");
        let (walk, carry, joint) = (mean(&walk), mean(&carry), mean(&joint));
        assert!(
            joint < carry && carry < walk,
            "seed {seed}: joint {joint} carry {carry} walk {walk}"
        );
    }
    println!("criterion 2 (amplitude ordering): pass");
}

// ---------------------------------------------------------------------------
// 3. pipeline mechanics
// ---------------------------------------------------------------------------

fn flat_session(n: usize, rate: f64) -> SessionData {
    SessionData {
        agent_id: "w".into(),
        group_id: 1,
        day_index: 1,
        sample_rate_hz: rate,
        potential_mv: vec![0.0; n],
        accel_wrist: vec![[0.0, 0.0, 1.0]; n],
        accel_calf: vec![[0.0, 0.0, 1.0]; n],
        valid: vec![true; n],
        labels: Vec::new(),
    }
}

#[test]
fn criterion_3_pipeline_mechanics() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let rate = 50.0;
    for _ in 0..200 {
        // durations in deciseconds keep the sample counts exact
        let window_ds = rng.gen_range(5..=80u64);
        let step_ds = rng.gen_range(1..=window_ds);
        let span_ds = rng.gen_range(window_ds..=600);
        let params = WindowParams {
            window_s: window_ds as f64 / 10.0,
            step_s: step_ds as f64 / 10.0,
            clip_mv: 3.0,
        };
        let n = (span_ds as f64 / 10.0 * rate).round() as usize;
        let w = (params.window_s * rate).round() as usize;
        let p = (params.step_s * rate).round() as usize;
        let expected = if n >= w { (n - w) / p + 1 } else { 0 };
        let windows = make_windows(&flat_session(n, rate), &params).unwrap();
        assert_eq!(windows.len(), expected, "n={n} w={w} p={p}");
    }

    // clipping is idempotent and bounded
    for _ in 0..1000 {
        let x = rng.gen_range(-50.0..50.0);
        let limit = rng.gen_range(0.5..10.0);
        let clipped = clip_delta(x, limit);
        assert!(clipped.abs() <= limit);
        assert_eq!(clip_delta(clipped, limit), clipped);
    }

    // the four task class sets, exhaustively
    use TargetClass::*;
    let expect: [(&str, Vec<TargetClass>); 4] = [
        ("single_user_full", vec![Walk, CarryAlone, CarryJointly, Lift, Drop, Null]),
        ("single_user_lift_drop_null", vec![Walk, CarryAlone, CarryJointly, Null]),
        ("pairwise_full", vec![CarryJointly, LiftTogether, DropTogether, Null]),
        ("pairwise_lift_drop_null", vec![CarryJointly, Null]),
    ];
    for (token, classes) in expect {
        assert_eq!(task_classes(token.parse().unwrap()), classes, "{token}");
    }
    println!("criterion 3 (pipeline mechanics): pass");
}

// ---------------------------------------------------------------------------
// 4. optimizer correctness
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_optimizer_correctness() {
    // analytic gradient vs central finite differences of the actual loss
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..50 {
        let n = rng.gen_range(4..10);
        let dim = rng.gen_range(1..5);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let t: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..2))).collect();
        let iw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
        let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: f64 = rng.gen_range(-1.0..1.0);
        let l2 = 0.01;
        let (dw, db) = binary_gradient(&x, &t, &iw, &w, b, l2);
        let h = 1e-6;
        for j in 0..dim {
            let mut wp = w.clone();
            wp[j] += h;
            let mut wm = w.clone();
            wm[j] -= h;
            let num = (binary_loss(&x, &t, &iw, &wp, b, l2)
                - binary_loss(&x, &t, &iw, &wm, b, l2))
                / (2.0 * h);
            let denom = num.abs().max(dw[j].abs()).max(1e-8);
            assert!(((dw[j] - num) / denom).abs() <= 1e-5);
        }
        let num_b = (binary_loss(&x, &t, &iw, &w, b + h, l2)
            - binary_loss(&x, &t, &iw, &w, b - h, l2))
            / (2.0 * h);
        let denom = num_b.abs().max(db.abs()).max(1e-8);
        assert!(((db - num_b) / denom).abs() <= 1e-5);
    }

    // separable toy set reaches training accuracy 1.0 at default settings
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..25 {
        let v = 0.1 + 0.05 * i as f64;
        x.push(vec![v, -v]);
        y.push(TargetClass::Walk);
        x.push(vec![-v, v]);
        y.push(TargetClass::Null);
    }
    let full = FeatureSchema::for_sources(&[Source::AWrist]);
    let schema = FeatureSchema {
        names: full.names[..2].to_vec(),
    };
    let classes = [TargetClass::Walk, TargetClass::Null];
    let model = train(&x, &y, &vec![1.0; x.len()], &classes, &schema, &Hyperparams::default())
        .unwrap();
    for (xi, &yi) in x.iter().zip(&y) {
        assert_eq!(model.predict(xi).unwrap(), yi, "separable toy misclassified");
    }
    println!("criterion 4 (optimizer correctness): pass");
}

// ---------------------------------------------------------------------------
// 5. smoothing
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_smoothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    // radius 0 is exactly argmax
    for _ in 0..100 {
        let stream: Vec<Vec<f64>> = (0..rng.gen_range(1..20))
            .map(|_| {
                let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / sum).collect()
            })
            .collect();
        let smoothed = smooth_predictions(&stream, 0).unwrap();
        let argmax: Vec<usize> = stream
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                    .unwrap()
                    .0
            })
            .collect();
        assert_eq!(smoothed, argmax);
    }

    // constant streams are invariant
    let constant = vec![vec![0.1, 0.6, 0.3]; 15];
    assert_eq!(smooth_predictions(&constant, 3).unwrap(), vec![1; 15]);

    // a lone dissenting window is voted away
    let mut stream = vec![vec![0.7, 0.3]; 11];
    stream[5] = vec![0.05, 0.95];
    assert_eq!(smooth_predictions(&stream, 3).unwrap(), vec![0; 11]);
    println!("criterion 5 (smoothing): pass");
}

// ---------------------------------------------------------------------------
// 6. evaluation integrity
// ---------------------------------------------------------------------------

fn stub_session(agent: &str, group: u32, day: u32) -> SessionData {
    let mut s = flat_session(4, 50.0);
    s.agent_id = agent.to_string();
    s.group_id = group;
    s.day_index = day;
    s
}

fn poisoning_dataset() -> Vec<SessionData> {
    let mut sessions = Vec::new();
    for (group, seed) in [(1u32, 61u64), (2, 62)] {
        let ids = [format!("g{group}a"), format!("g{group}b")];
        let refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
        let script = group_day_script(group, 1, &refs, 150.0, seed).unwrap();
        let config = SimConfig {
            seed: 600 + seed,
            ..SimConfig::default()
        };
        sessions.extend(synth_session(&script, &config).unwrap());
    }
    sessions
}

#[test]
fn criterion_6_evaluation_integrity() {
    // fold disjointness and coverage on randomized group assignments
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..30 {
        let n_groups = rng.gen_range(2..=6u32);
        let mut sessions = Vec::new();
        for g in 1..=n_groups {
            for d in 1..=rng.gen_range(1..=3u32) {
                for a in 0..rng.gen_range(1..=4u32) {
                    sessions.push(stub_session(&format!("g{g}p{a}"), g, d));
                }
            }
        }
        let folds = logo_folds(&sessions).unwrap();
        assert_eq!(folds.len(), n_groups as usize);
        let mut covered: Vec<usize> = folds.iter().flat_map(|f| f.test.clone()).collect();
        covered.sort_unstable();
        assert_eq!(covered, (0..sessions.len()).collect::<Vec<_>>());
        for fold in &folds {
            assert!(fold.train.iter().all(|i| !fold.test.contains(i)));
            assert!(fold
                .test
                .iter()
                .all(|&i| sessions[i].group_id == fold.held_out_group));
        }
    }

    // poisoning the held-out group never changes the trained weights
    let mut sessions = poisoning_dataset();
    let config = ExperimentConfig {
        sensor_configs: vec!["e_wrist+a_wrist".parse().unwrap()],
        tasks: vec!["single_user_full".parse().unwrap()],
        ..ExperimentConfig::default()
    };
    let sensors: SensorConfig = "e_wrist+a_wrist".parse().unwrap();
    let task = "single_user_full".parse().unwrap();
    let clean = train_cell_fold_model(&sessions, &config, &sensors, task, 2).unwrap();
    for s in sessions.iter_mut().filter(|s| s.group_id == 2) {
        let mut chaos = ChaCha8Rng::seed_from_u64(99);
        for v in &mut s.potential_mv {
            *v = chaos.gen_range(-20.0..20.0);
        }
        for a in &mut s.accel_wrist {
            a[1] = chaos.gen_range(-2.0..2.0);
        }
    }
    let poisoned = train_cell_fold_model(&sessions, &config, &sensors, task, 2).unwrap();
    assert_eq!(clean, poisoned, "test-side poisoning leaked into training");

    // the hand-computed macro F example
    let mut y_true = vec![0usize; 10];
    y_true.extend(vec![1usize; 10]);
    let mut y_pred = vec![0usize; 8];
    y_pred.extend(vec![1usize; 2]);
    y_pred.extend(vec![0usize; 3]);
    y_pred.extend(vec![1usize; 7]);
    let m = macro_f(&y_true, &y_pred, 2).unwrap();
    assert!((m - 0.7494).abs() <= 1e-4, "macro F {m}");
    println!("criterion 6 (evaluation integrity): pass");
}

// ---------------------------------------------------------------------------
// 7 & 8. end-to-end constructed effect, reproducibility
// ---------------------------------------------------------------------------

fn acceptance_dataset() -> &'static Vec<SessionData> {
    static DATASET: OnceLock<Vec<SessionData>> = OnceLock::new();
    DATASET.get_or_init(|| {
        let mut sessions = Vec::new();
        for group in 1..=4u32 {
            for day in 1..=2u32 {
                let ids: Vec<String> =
                    (0..3).map(|i| format!("g{group}{}", (b'a' + i) as char)).collect();
                let refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
                let script =
                    group_day_script(group, day, &refs, 600.0, u64::from(group * 10 + day))
                        .unwrap();
                let config = SimConfig {
                    seed: 7000 + u64::from(group * 10 + day),
                    ..SimConfig::default()
                };
                sessions.extend(synth_session(&script, &config).unwrap());
            }
        }
        sessions
    })
}

fn acceptance_config() -> ExperimentConfig {
    ExperimentConfig {
        sensor_configs: vec!["a_wrist".parse().unwrap(), "e_wrist+a_wrist".parse().unwrap()],
        tasks: vec!["pairwise_full".parse().unwrap(), "single_user_full".parse().unwrap()],
        ..ExperimentConfig::default()
    }
}

fn acceptance_report() -> &'static ExperimentReport {
    static REPORT: OnceLock<ExperimentReport> = OnceLock::new();
    REPORT.get_or_init(|| run_experiment(acceptance_dataset(), &acceptance_config()).unwrap())
}

#[test]
fn criterion_7_end_to_end_constructed_effect() {
    let start = Instant::now();
    let report = acceptance_report();
    let fused_pair = report.cells["e_wrist+a_wrist__pairwise_full"].pooled.macro_f;
    let accel_pair = report.cells["a_wrist__pairwise_full"].pooled.macro_f;
    let fused_single = report.cells["e_wrist+a_wrist__single_user_full"].pooled.macro_f;
    let elapsed = start.elapsed();
    assert!(
        fused_pair > accel_pair,
        "(a) fused pairwise {fused_pair:.4} must beat accelerometer-only {accel_pair:.4}"
    );
    assert!(
        fused_single >= 0.85,
        "(b) fused single-user macro F {fused_single:.4} below 0.85"
    );
    assert!(
        elapsed.as_secs() < 300,
        "run took {elapsed:?}, budget is 5 minutes"
    );
    println!(
        "criterion 7 (end-to-end constructed effect): pass \
         (fused pairwise {fused_pair:.4} > accel {accel_pair:.4}; single-user {fused_single:.4}; {elapsed:?})"
    );
}

#[test]
fn criterion_8_reproducibility() {
    let first = acceptance_report();
    let second = run_experiment(acceptance_dataset(), &acceptance_config()).unwrap();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    write_report(dir_a.path(), first).unwrap();
    write_report(dir_b.path(), &second).unwrap();
    let mut files: Vec<String> = vec![
        "report.json".into(),
        "summary.tsv".into(),
        "per_class.tsv".into(),
        "feature_schema.json".into(),
    ];
    for key in first.cells.keys() {
        files.push(format!("confusion/{key}.tsv"));
    }
    for file in files {
        let a = std::fs::read(dir_a.path().join(&file)).unwrap();
        let b = std::fs::read(dir_b.path().join(&file)).unwrap();
        assert_eq!(a, b, "{file} differs between same-seed runs");
    }
    println!("criterion 8 (reproducibility): pass");
}

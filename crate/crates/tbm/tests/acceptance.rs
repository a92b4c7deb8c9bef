//! Acceptance suite. Each test checks one criterion and prints a
//! `PASS`/`FAIL` line with the measured values; run with `--nocapture`
//! to see them all.

use std::process::Command;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tbm_core::decision::{cost, cost_surface, grid_points, optimize, CostParams, GridSpec};
use tbm_core::domain::{MachineSetting, MuckGeometry, RockClass, RockMassState};
use tbm_core::io::{emit_records_csv, load_model, load_surface, parse_records_csv, save_model, save_surface};
use tbm_core::model::{build_samples, Target};
use tbm_core::preprocess::fit_preprocessor;
use tbm_core::sabpnn::{fit_regressor, loss_and_gradient, mse, random_init, Architecture, InitStrategy, NetworkParams, Samples};
use tbm_core::synth::{generate_dataset, median, reference_rock, train_pair, GroundTruth, ReplicationReport, ScenarioSpec, TargetSet};

/// Criteria run one at a time so each runtime is measured without
/// competing for the thread pool.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(name: &str, pass: bool, elapsed: Duration, limit: Duration, detail: String) {
    let in_time = elapsed <= limit;
    let ok = pass && in_time;
    println!(
        "{} {name}: {detail} [{:.2}s, limit {:.0}s]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    assert!(pass, "{name}: {detail}");
    assert!(in_time, "{name}: took {elapsed:?}, limit {limit:?}");
}

#[test]
fn c1_cost_golden_values() {
    let _guard = serial();
    let t = Instant::now();
    let p = CostParams::default();
    let rows = [
        (60.42, 38.63, 10532.50),
        (68.04, 45.21, 9323.98),
        (70.74, 40.22, 9089.32),
        (68.98, 32.03, 9515.31),
    ];
    let mut worst = 0.0f64;
    let mut got = Vec::new();
    for (pr, ef, want) in rows {
        let c = cost(pr, ef, &p).unwrap().total;
        worst = worst.max((c - want).abs());
        got.push(format!("{c:.2}"));
    }
    verdict(
        "cost golden values",
        worst <= 1.0,
        t.elapsed(),
        Duration::from_secs(1),
        format!("costs [{}], max |diff| {worst:.3} (tolerance 1)", got.join(", ")),
    );
}

#[test]
fn c2_grid_census() {
    let _guard = serial();
    let t = Instant::now();
    let pts = grid_points(&GridSpec::default()).unwrap();
    let first = pts[0];
    let last = *pts.last().unwrap();
    let pass = pts.len() == 2187
        && (first.th, first.tor) == (2000.0, 200.0)
        && (last.th, last.tor) == (10000.0, 1500.0);
    verdict(
        "grid census",
        pass,
        t.elapsed(),
        Duration::from_secs(1),
        format!("{} points, first ({}, {}), last ({}, {})", pts.len(), first.th, first.tor, last.th, last.tor),
    );
}

fn random_rock(rng: &mut ChaCha8Rng) -> RockMassState {
    let s = ScenarioSpec::prcr(0);
    RockMassState {
        src: RockClass::new(rng.random_range(2..=5)).unwrap(),
        ucs: s.ucs.at(rng.random()),
        rqd: s.rqd.at(rng.random()),
        cai: s.cai.at(rng.random()),
        q: s.q.at(rng.random()),
        ci: s.ci.at(rng.random()),
        m: s.m.at(rng.random()),
        mgt: MuckGeometry::new(rng.random_range(1..=4)).unwrap(),
    }
}

#[test]
fn c3_optimizer_matches_exhaustive_oracle() {
    let _guard = serial();
    let t = Instant::now();
    let gt = GroundTruth::default();
    let p = CostParams::default();
    let (pr, ef) = (gt.surrogate(Target::Pr), gt.surrogate(Target::Ef));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut matched = 0;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let rock = random_rock(&mut rng);
        let rec = optimize(&rock, &pr, &ef, &p, &GridSpec::default()).unwrap();
        let mut best = (0.0, 0.0, f64::INFINITY);
        for i in 0..=80 {
            for j in 0..=26 {
                let m = MachineSetting::new(2000.0 + 100.0 * i as f64, 200.0 + 50.0 * j as f64);
                let c = cost(gt.pr_truth(&rock, &m), gt.ef_truth(&rock, &m), &p).unwrap().total;
                if c < best.2 {
                    best = (m.th, m.tor, c);
                }
            }
        }
        if (rec.th, rec.tor) == (best.0, best.1) {
            matched += 1;
        }
        worst = worst.max((rec.cost - best.2).abs());
    }
    verdict(
        "optimizer oracle equivalence",
        matched == 20 && worst <= 1e-9,
        t.elapsed(),
        Duration::from_secs(5),
        format!("{matched}/20 exact (th, tor) matches, max cost diff {worst:e}"),
    );
}

#[test]
fn c4_learning_pipeline() {
    let _guard = serial();
    let t = Instant::now();
    let gt = GroundTruth::default();
    let (mut pr_mape, mut pr_trend, mut ef_mape, mut ef_trend) = (vec![], vec![], vec![], vec![]);
    for seed in 0..5 {
        let (pr, ef) = train_pair(seed, &gt).unwrap();
        let (a, b) = (pr.training_meta.test.unwrap(), ef.training_meta.test.unwrap());
        pr_mape.push(a.mape);
        pr_trend.push(a.trend_accuracy.unwrap());
        ef_mape.push(b.mape);
        ef_trend.push(b.trend_accuracy.unwrap());
    }
    let (pm, pt, em, et) = (median(&pr_mape), median(&pr_trend), median(&ef_mape), median(&ef_trend));
    verdict(
        "learning pipeline",
        pm <= 20.0 && em <= 20.0 && pt >= 70.0 && et >= 70.0,
        t.elapsed(),
        Duration::from_secs(300),
        format!(
            "median test MAPE pr {pm:.2}% ef {em:.2}% (<= 20), median trend pr {pt:.1}% ef {et:.1}% (>= 70)"
        ),
    );
}

#[test]
fn c5_annealing_benefit() {
    let _guard = serial();
    let t = Instant::now();
    let gt = GroundTruth::default();
    let (mut sa, mut rnd) = (Vec::new(), Vec::new());
    for seed in 0..10 {
        let spec = ScenarioSpec::prcr(seed);
        let data = generate_dataset(&spec, &gt).unwrap();
        let (train, _) = spec.split(&data);
        let state = fit_preprocessor(train).unwrap();
        let samples = build_samples(train, &state, Target::Pr).unwrap();
        let mut cfg = Target::Pr.default_config(seed);
        sa.push(fit_regressor(&samples, &cfg, Target::Pr.architecture()).unwrap().final_loss());
        cfg.init = InitStrategy::Random;
        rnd.push(fit_regressor(&samples, &cfg, Target::Pr.architecture()).unwrap().final_loss());
    }
    let (a, b) = (median(&sa), median(&rnd));
    verdict(
        "annealing benefit",
        a <= b,
        t.elapsed(),
        Duration::from_secs(600),
        format!("median final training MSE: annealed {a:.5}, random {b:.5}"),
    );
}

fn gradient_case(seed: u64) -> (NetworkParams, Samples) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arch = Architecture {
        input_dim: rng.random_range(2..14),
        hidden_nodes: rng.random_range(2..13),
    };
    let flat: Vec<f64> = random_init(arch, &mut rng)
        .flatten()
        .into_iter()
        .map(|w| w * rng.random_range(0.5..3.0))
        .collect();
    let net = NetworkParams::from_flat(arch, &flat).unwrap();
    let n = rng.random_range(5..30);
    let x = (0..n)
        .map(|_| (0..arch.input_dim).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let y = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    (net, Samples::new(x, y).unwrap())
}

#[test]
fn c6_gradient_correctness() {
    let _guard = serial();
    let t = Instant::now();
    let eps = 1e-5;
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (net, data) = gradient_case(500 + seed);
        let arch = net.architecture();
        let analytic = loss_and_gradient(&net, &data).1.flatten();
        let base = net.flatten();
        let mut num = 0.0;
        let mut den_a = 0.0;
        let mut den_n = 0.0;
        for k in 0..base.len() {
            let (mut plus, mut minus) = (base.clone(), base.clone());
            plus[k] += eps;
            minus[k] -= eps;
            let fd = (mse(&NetworkParams::from_flat(arch, &plus).unwrap(), &data)
                - mse(&NetworkParams::from_flat(arch, &minus).unwrap(), &data))
                / (2.0 * eps);
            num += (analytic[k] - fd).powi(2);
            den_a += analytic[k].powi(2);
            den_n += fd * fd;
        }
        worst = worst.max(num.sqrt() / (den_a.sqrt() + den_n.sqrt()));
    }
    verdict(
        "gradient correctness",
        worst < 1e-6,
        t.elapsed(),
        Duration::from_secs(10),
        format!("max relative error over 20 instances {worst:e} (< 1e-6)"),
    );
}

#[test]
fn c7_field_test_replication() {
    let _guard = serial();
    let t = Instant::now();
    let dir = tempfile::TempDir::new().unwrap();
    let json = dir.path().join("replicate.json");
    let out = Command::new(env!("CARGO_BIN_EXE_tbm"))
        .env_remove("TBM_SEED")
        .args(["replicate", "--seeds", "5", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    print!("{stdout}");
    let r: ReplicationReport = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    let cost_ok = r.median_cost_reduction_pct >= 3.0;
    let pr_ok = r.median_pr_change_pct >= 0.0;
    let ef_ok = r.median_ef_change_pct >= 0.0;
    verdict(
        "field-test replication",
        r.runs.len() == 5 && cost_ok && pr_ok && ef_ok,
        t.elapsed(),
        Duration::from_secs(600),
        format!(
            "median cost saving {:.2}% (>= 3: {}), pr change {:+.2}% (>= 0: {}), ef change {:+.2}% (>= 0: {})",
            r.median_cost_reduction_pct,
            pass_word(cost_ok),
            r.median_pr_change_pct,
            pass_word(pr_ok),
            r.median_ef_change_pct,
            pass_word(ef_ok)
        ),
    );
}

fn pass_word(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

#[test]
fn c8_determinism_and_round_trips() {
    let _guard = serial();
    let t = Instant::now();
    let gt = GroundTruth::default();
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };

    let (pr_a, ef_a) = train_pair(11, &gt).unwrap();
    let (pr_b, ef_b) = train_pair(11, &gt).unwrap();
    let (ta, tb) = (save_model(&pr_a).unwrap(), save_model(&pr_b).unwrap());
    check(ta == tb && save_model(&ef_a).unwrap() == save_model(&ef_b).unwrap(), "models");

    let back = load_model(ta.as_bytes()).unwrap();
    check(save_model(&back).unwrap() == ta && back == pr_a, "model round-trip");

    let rock = reference_rock(MuckGeometry::DEBRIS_BLOCKS);
    let (p, g) = (CostParams::default(), GridSpec::default());
    let ra = optimize(&rock, &pr_a, &ef_a, &p, &g).unwrap();
    let rb = optimize(&rock, &pr_b, &ef_b, &p, &g).unwrap();
    check(ra == rb, "recommendations");

    let sa = cost_surface(&rock, &pr_a, &ef_a, &p, &g).unwrap();
    let sb = cost_surface(&rock, &pr_b, &ef_b, &p, &g).unwrap();
    let (ja, jb) = (save_surface(&sa).unwrap(), save_surface(&sb).unwrap());
    check(ja == jb, "surfaces");
    let sback = load_surface(ja.as_bytes()).unwrap();
    check(save_surface(&sback).unwrap() == ja && sback.optimum == sa.optimum, "surface round-trip");

    let spec = ScenarioSpec {
        targets: TargetSet::Both,
        ..ScenarioSpec::prcr(11)
    };
    let d1 = generate_dataset(&spec, &gt).unwrap();
    let d2 = generate_dataset(&spec, &gt).unwrap();
    check(d1 == d2, "datasets");
    let csv = emit_records_csv(&d1).unwrap();
    check(parse_records_csv(csv.as_bytes()).unwrap() == d1, "csv round-trip");

    verdict(
        "determinism and round-trips",
        failures.is_empty(),
        t.elapsed(),
        Duration::from_secs(60),
        if failures.is_empty() {
            "models, recommendations, surfaces, datasets identical; model/surface/CSV round-trips exact".into()
        } else {
            format!("mismatch in {}", failures.join(", "))
        },
    );
}

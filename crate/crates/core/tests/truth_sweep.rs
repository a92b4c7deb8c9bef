use tbm_core::decision::{grid_points, GridSpec};
use tbm_core::domain::{MachineSetting, MuckGeometry, RockClass, RockMassState};
use tbm_core::synth::{GroundTruth, ScenarioSpec};

/// Corners of the combined rock envelope over both presets, at the muck
/// categories with the lowest and highest PR factor, plus the centre.
fn rock_states() -> Vec<RockMassState> {
    let (a, b) = (ScenarioSpec::prcr(0), ScenarioSpec::ccr(0));
    let span = |x: tbm_core::synth::Range, y: tbm_core::synth::Range| [x.min.min(y.min), x.max.max(y.max)];
    let ucs = span(a.ucs, b.ucs);
    let rqd = span(a.rqd, b.rqd);
    let cai = span(a.cai, b.cai);
    let q = span(a.q, b.q);
    let mut out = Vec::new();
    for bits in 0..32u32 {
        let pick = |r: [f64; 2], bit: u32| r[((bits >> bit) & 1) as usize];
        out.push(RockMassState {
            src: RockClass::III,
            ucs: pick(ucs, 0),
            rqd: pick(rqd, 1),
            cai: pick(cai, 2),
            q: pick(q, 3),
            ci: 400.0,
            m: 10.0,
            mgt: if bits & 16 == 0 { MuckGeometry::DEBRIS } else { MuckGeometry::DEBRIS_BLOCKS },
        });
    }
    let mid = |r: [f64; 2]| 0.5 * (r[0] + r[1]);
    out.push(RockMassState {
        src: RockClass::III,
        ucs: mid(ucs),
        rqd: mid(rqd),
        cai: mid(cai),
        q: mid(q),
        ci: 400.0,
        m: 10.0,
        mgt: MuckGeometry::DEBRIS_SLICES,
    });
    out
}

#[test]
fn envelope_over_grid_and_rock_corners() {
    let gt = GroundTruth::default();
    let grid = grid_points(&GridSpec::default()).unwrap();
    let (mut pr_lo, mut pr_hi, mut ef_lo, mut ef_hi) = (f64::MAX, 0.0f64, f64::MAX, 0.0f64);
    for rock in rock_states() {
        for m in &grid {
            let pr = gt.pr_truth(&rock, m);
            let ef = gt.ef_truth(&rock, m);
            pr_lo = pr_lo.min(pr);
            pr_hi = pr_hi.max(pr);
            ef_lo = ef_lo.min(ef);
            ef_hi = ef_hi.max(ef);
        }
    }
    println!("pr in [{pr_lo}, {pr_hi}], ef in [{ef_lo}, {ef_hi}]");
    assert!(pr_lo > 0.0 && pr_hi < 120.0);
    assert!(ef_lo > 5.0 && ef_hi < 60.0);
    // hard, fractured rock at the weakest setting falls below 20 mm/min
    assert!((pr_lo - 10.7846).abs() < 1e-3);
}

#[test]
fn low_pr_corner() {
    let rock = RockMassState {
        src: RockClass::V,
        ucs: 149.03,
        rqd: 5.0,
        cai: 5.32,
        q: 95.21,
        ci: 400.0,
        m: 10.0,
        mgt: MuckGeometry::DEBRIS,
    };
    let pr = GroundTruth::default().pr_truth(&rock, &MachineSetting::new(2000.0, 200.0));
    assert!((pr - 10.784_589_548).abs() < 1e-8);
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tbm_core::decision::{cost, cost_surface, optimize, CostParams, GridSpec};
use tbm_core::domain::{MachineSetting, MuckGeometry, RockClass, RockMassState};
use tbm_core::model::Target;
use tbm_core::synth::{GroundTruth, ScenarioSpec};

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

/// Plain nested loops with their own arithmetic, independent of the
/// library's grid enumeration.
fn brute_force(rock: &RockMassState, gt: &GroundTruth) -> (f64, f64, f64) {
    let p = CostParams::default();
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for i in 0..=80 {
        let th = 2000.0 + 100.0 * i as f64;
        for j in 0..=26 {
            let tor = 200.0 + 50.0 * j as f64;
            let m = MachineSetting::new(th, tor);
            let c = cost(gt.pr_truth(rock, &m), gt.ef_truth(rock, &m), &p).unwrap().total;
            if c < best.2 {
                best = (th, tor, c);
            }
        }
    }
    best
}

#[test]
fn matches_exhaustive_oracle_on_random_rocks() {
    let gt = GroundTruth::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let rock = random_rock(&mut rng);
        let rec = optimize(
            &rock,
            &gt.surrogate(Target::Pr),
            &gt.surrogate(Target::Ef),
            &CostParams::default(),
            &GridSpec::default(),
        )
        .unwrap();
        let (th, tor, c) = brute_force(&rock, &gt);
        assert_eq!((rec.th, rec.tor), (th, tor));
        assert!((rec.cost - c).abs() <= 1e-9);
        assert!((rec.cost - rec.cutter_cost - rec.period_cost).abs() <= 1e-9);
    }
}

#[test]
fn never_worse_than_sampled_points() {
    let gt = GroundTruth::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let rock = random_rock(&mut rng);
    let (pr, ef) = (gt.surrogate(Target::Pr), gt.surrogate(Target::Ef));
    let p = CostParams::default();
    let s = cost_surface(&rock, &pr, &ef, &p, &GridSpec::default()).unwrap();
    for _ in 0..200 {
        let (i, j) = (rng.random_range(0..81), rng.random_range(0..27));
        assert!(s.recommendation.cost <= s.cost[i][j] + 1e-9);
    }
}

use tbm_core::model::{build_samples, Target};
use tbm_core::preprocess::fit_preprocessor;
use tbm_core::sabpnn::{cross_validate, fit_regressor, InitStrategy};
use tbm_core::synth::{generate_dataset, median, train_pair, GroundTruth, ScenarioSpec, EF_FOLDS, PR_FOLDS};

#[test]
fn trained_models_generalize() {
    let gt = GroundTruth::default();
    let (pr, ef) = train_pair(1, &gt).unwrap();
    for b in [&pr, &ef] {
        let test = b.training_meta.test.unwrap();
        println!("{:?}: test {:?}", b.target, test);
        assert!(test.mape < 25.0);
        assert_eq!(b.training_meta.fold_reports.len(), b.training_meta.k_folds);
        let best = b
            .training_meta
            .fold_reports
            .iter()
            .map(|r| r.mape)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(b.training_meta.validation.mape, best);
    }
    assert_eq!(pr.training_meta.k_folds, PR_FOLDS);
    assert_eq!(ef.training_meta.k_folds, EF_FOLDS);
    assert_eq!(pr.training_meta.fold_sizes, vec![54, 53, 53]);
    assert_eq!(ef.training_meta.fold_sizes, vec![23, 23, 22, 22]);
}

#[test]
fn cross_validation_is_deterministic() {
    let spec = ScenarioSpec::ccr(4);
    let data = generate_dataset(&spec, &GroundTruth::default()).unwrap();
    let (train, _) = spec.split(&data);
    let mut cfg = Target::Ef.default_config(4);
    cfg.sa_iterations = 100;
    cfg.gd_iterations = 200;
    let a = cross_validate(train, Target::Ef, 4, &cfg, Target::Ef.architecture()).unwrap();
    let b = cross_validate(train, Target::Ef, 4, &cfg, Target::Ef.architecture()).unwrap();
    assert_eq!(a.bundle, b.bundle);
    assert_eq!(a.reports, b.reports);
}

#[test]
fn annealing_lowers_the_starting_loss() {
    let spec = ScenarioSpec::prcr(0);
    let data = generate_dataset(&spec, &GroundTruth::default()).unwrap();
    let (train, _) = spec.split(&data);
    let state = fit_preprocessor(train).unwrap();
    let samples = build_samples(train, &state, Target::Pr).unwrap();
    let mut sa = Vec::new();
    let mut rnd = Vec::new();
    for seed in 0..3 {
        let mut cfg = Target::Pr.default_config(seed);
        let a = fit_regressor(&samples, &cfg, Target::Pr.architecture()).unwrap();
        cfg.init = InitStrategy::Random;
        let b = fit_regressor(&samples, &cfg, Target::Pr.architecture()).unwrap();
        // same seed, same random draw before annealing
        assert_eq!(a.initial_energy, b.initial_energy);
        assert!(a.annealed_energy < 0.5 * a.initial_energy);
        sa.push(a.final_loss());
        rnd.push(b.final_loss());
    }
    println!("final training MSE, annealed {sa:?}, random {rnd:?}");
    assert!(median(&sa) <= median(&rnd));
}

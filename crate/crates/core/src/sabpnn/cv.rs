use rayon::prelude::*;

use super::{train_sa_bpnn, Architecture, EvalReport, TrainConfig, TrainedModel};
use crate::domain::TunnelingRecord;
use crate::error::Result;
use crate::model::{build_samples, ModelBundle, Target, TrainingMeta, SCHEMA_VERSION};
use crate::preprocess::{fit_preprocessor, kfold_split, FoldPlan, PreprocessorState};

#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub plan: FoldPlan,
    /// Held-out report for each fold, in fold order.
    pub reports: Vec<EvalReport>,
    pub selected_fold: usize,
    /// The model trained with the selected fold held out.
    pub bundle: ModelBundle,
}

/// K-fold training. Each fold fits its own preprocessor on the training
/// part and trains with `cfg` unchanged (same seed). The fold with the
/// lowest held-out MAPE wins, then lowest MAE, then lowest index.
pub fn cross_validate(
    records: &[TunnelingRecord],
    target: Target,
    k: usize,
    cfg: &TrainConfig,
    arch: Architecture,
) -> Result<CrossValidation> {
    cfg.validate()?;
    for r in records {
        r.validate()?;
    }
    let plan = kfold_split(records.len(), k, cfg.seed)?;

    let runs: Vec<(PreprocessorState, TrainedModel, EvalReport)> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let (train_idx, held_idx) = plan.split(fold);
            let train: Vec<TunnelingRecord> = train_idx.iter().map(|&i| records[i]).collect();
            let held: Vec<TunnelingRecord> = held_idx.iter().map(|&i| records[i]).collect();
            let state = fit_preprocessor(&train)?;
            let train_s = build_samples(&train, &state, target)?;
            let held_s = build_samples(&held, &state, target)?;
            let (model, report) = train_sa_bpnn(&train_s, &held_s, cfg, arch)?;
            Ok((state, model, report))
        })
        .collect::<Result<_>>()?;

    let reports: Vec<EvalReport> = runs.iter().map(|r| r.2).collect();
    let selected_fold = select_fold(&reports);
    let (state, model, report) = runs.into_iter().nth(selected_fold).expect("fold exists");

    let bundle = ModelBundle {
        schema_version: SCHEMA_VERSION.into(),
        target,
        preprocessor: state,
        target_scaler: model.regressor.target_scaler,
        network: model.regressor.network.clone(),
        training_meta: TrainingMeta {
            seed: cfg.seed,
            config: *cfg,
            architecture: arch,
            k_folds: k,
            fold_sizes: plan.fold_sizes(),
            fold_reports: reports.clone(),
            selected_fold,
            validation: report,
            test: None,
            n_records: records.len(),
            initial_energy: model.initial_energy,
            annealed_energy: model.annealed_energy,
            final_loss: model.final_loss(),
        },
        created_at: None,
    };
    Ok(CrossValidation {
        plan,
        reports,
        selected_fold,
        bundle,
    })
}

fn select_fold(reports: &[EvalReport]) -> usize {
    let mut best = 0;
    for (i, r) in reports.iter().enumerate().skip(1) {
        let b = &reports[best];
        if r.mape < b.mape || (r.mape == b.mape && r.mae < b.mae) {
            best = i;
        }
    }
    best
}

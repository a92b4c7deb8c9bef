//! Trained surrogate bundles and the [`Surrogate`] abstraction the
//! optimizer works against.

use serde::{Deserialize, Serialize};

use crate::domain::{MachineSetting, RockMassState, TunnelingRecord};
use crate::error::{Error, Result};
use crate::preprocess::{transform, PreprocessorState};
use crate::sabpnn::{evaluate, Architecture, EvalReport, NetworkParams, Samples, TargetScaler, TrainConfig};

pub const SCHEMA_VERSION: &str = "1";

/// Which quantity a model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Penetration rate, mm/min.
    Pr,
    /// Cutter life, m³/mm.
    Ef,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Pr => "pr",
            Target::Ef => "ef",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pr" => Ok(Target::Pr),
            "ef" => Ok(Target::Ef),
            other => Err(Error::invalid("target", format!("expected pr or ef, got `{other}`"))),
        }
    }

    pub fn value(self, record: &TunnelingRecord) -> Option<f64> {
        match self {
            Target::Pr => record.pr,
            Target::Ef => record.ef,
        }
    }

    pub fn architecture(self) -> Architecture {
        match self {
            Target::Pr => Architecture::prcr(),
            Target::Ef => Architecture::ccr(),
        }
    }

    pub fn default_config(self, seed: u64) -> TrainConfig {
        match self {
            Target::Pr => TrainConfig::prcr(seed),
            Target::Ef => TrainConfig::ccr(seed),
        }
    }
}

/// Transforms `records` and pairs them with the `target` column.
pub fn build_samples(
    records: &[TunnelingRecord],
    state: &PreprocessorState,
    target: Target,
) -> Result<Samples> {
    let mut x = Vec::with_capacity(records.len());
    let mut y = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let v = target.value(r).ok_or_else(|| {
            Error::invalid(target.name(), format!("record {i} has no {} value", target.name()))
        })?;
        x.push(transform(state, &r.rock, &r.machine));
        y.push(v);
    }
    Samples::new(x, y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub config: TrainConfig,
    pub architecture: Architecture,
    pub k_folds: usize,
    pub fold_sizes: Vec<usize>,
    pub fold_reports: Vec<EvalReport>,
    pub selected_fold: usize,
    pub validation: EvalReport,
    pub test: Option<EvalReport>,
    pub n_records: usize,
    pub initial_energy: f64,
    pub annealed_energy: f64,
    pub final_loss: f64,
}

/// Self-contained trained model: preprocessing, scaling and weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub schema_version: String,
    pub target: Target,
    pub preprocessor: PreprocessorState,
    pub target_scaler: TargetScaler,
    pub network: NetworkParams,
    pub training_meta: TrainingMeta,
    #[serde(default)]
    pub created_at: Option<String>,
}

impl ModelBundle {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::UnsupportedVersion {
                found: self.schema_version.clone(),
                expected: SCHEMA_VERSION.into(),
            });
        }
        self.preprocessor.validate()?;
        self.network.validate()?;
        if self.network.input_dim != self.preprocessor.output_dim {
            return Err(Error::ShapeMismatch(format!(
                "network takes {} inputs, preprocessor produces {}",
                self.network.input_dim, self.preprocessor.output_dim
            )));
        }
        if !(self.target_scaler.mean.is_finite()
            && self.target_scaler.std.is_finite()
            && self.target_scaler.std >= 0.0)
        {
            return Err(Error::Malformed("invalid target scaler".into()));
        }
        Ok(())
    }

    pub fn features(&self, rock: &RockMassState, machine: &MachineSetting) -> Vec<f64> {
        transform(&self.preprocessor, rock, machine)
    }

    /// Scores `records` in their given order.
    pub fn evaluate_records(&self, records: &[TunnelingRecord], ordered: bool) -> Result<EvalReport> {
        let samples = build_samples(records, &self.preprocessor, self.target)?;
        let pred: Vec<f64> = samples
            .x
            .iter()
            .map(|x| self.target_scaler.denormalize(self.network.forward_unchecked(x)))
            .collect();
        evaluate(&pred, &samples.y, ordered)
    }
}

/// Anything that maps a rock state and machine setting to a prediction.
pub trait Surrogate: Sync {
    fn predict(&self, rock: &RockMassState, machine: &MachineSetting) -> Result<f64>;
}

impl Surrogate for ModelBundle {
    fn predict(&self, rock: &RockMassState, machine: &MachineSetting) -> Result<f64> {
        let x = self.features(rock, machine);
        Ok(self.target_scaler.denormalize(self.network.forward(&x)?))
    }
}

/// Returns the same value everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl Surrogate for Constant {
    fn predict(&self, _: &RockMassState, _: &MachineSetting) -> Result<f64> {
        Ok(self.0)
    }
}

/// Wraps a closure.
pub struct FnSurrogate<F>(pub F);

impl<F> Surrogate for FnSurrogate<F>
where
    F: Fn(&RockMassState, &MachineSetting) -> f64 + Sync,
{
    fn predict(&self, rock: &RockMassState, machine: &MachineSetting) -> Result<f64> {
        Ok((self.0)(rock, machine))
    }
}

impl<S: Surrogate + ?Sized> Surrogate for &S {
    fn predict(&self, rock: &RockMassState, machine: &MachineSetting) -> Result<f64> {
        (**self).predict(rock, machine)
    }
}

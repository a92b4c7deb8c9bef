//! Request and response bodies shared by the HTTP service and the CLI.

use serde::{Deserialize, Serialize};

use crate::decision::{
    cost_surface, evaluate_point, optimize, CostBreakdown, CostParams, CostSurface, GridSpec,
    Recommendation,
};
use crate::domain::{MachineSetting, RockMassState};
use crate::error::{Error, Result};
use crate::model::Surrogate;
use crate::synth::rate_of_change;

/// One validation problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

/// Runs every check and collects all errors, not just the first.
fn collect(checks: impl IntoIterator<Item = Result<()>>) -> std::result::Result<(), ValidationError> {
    let mut errors = Vec::new();
    for c in checks {
        match c {
            Ok(()) => {}
            Err(Error::InvalidInput { field, message }) => errors.push(FieldError { field, message }),
            Err(other) => errors.push(FieldError {
                field: String::new(),
                message: other.to_string(),
            }),
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ValidationError { errors })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationError {
    pub errors: Vec<FieldError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRequest {
    pub rock: RockMassState,
    pub th: f64,
    pub tor: f64,
    #[serde(default)]
    pub cost: Option<CostParams>,
}

impl PredictRequest {
    pub fn validate(&self) -> std::result::Result<(), ValidationError> {
        let p = self.cost.unwrap_or_default();
        collect([
            self.rock.validate(),
            MachineSetting::new(self.th, self.tor).validate(),
            p.validate(),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub th: f64,
    pub tor: f64,
    pub pr: f64,
    pub ef: f64,
    /// Absent when either prediction is non-positive.
    pub cost: Option<CostBreakdown>,
    pub cost_params: CostParams,
}

pub fn predict(
    req: &PredictRequest,
    pr_model: &dyn Surrogate,
    ef_model: &dyn Surrogate,
) -> Result<PredictResponse> {
    let p = req.cost.unwrap_or_default();
    let machine = MachineSetting::new(req.th, req.tor);
    let e = evaluate_point(&req.rock, &machine, pr_model, ef_model, &p)?;
    Ok(PredictResponse {
        th: e.th,
        tor: e.tor,
        pr: e.pr,
        ef: e.ef,
        cost: e.cost,
        cost_params: p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendRequest {
    pub rock: RockMassState,
    #[serde(default)]
    pub cost: Option<CostParams>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub baseline: Option<MachineSetting>,
}

impl RecommendRequest {
    pub fn validate(&self) -> std::result::Result<(), ValidationError> {
        let baseline = self.baseline.map(|b| b.validate()).unwrap_or(Ok(()));
        collect([
            self.rock.validate(),
            self.cost.unwrap_or_default().validate(),
            self.grid.unwrap_or_default().validate(),
            baseline,
        ])
    }
}

/// Surrogate evaluation at the operator's setting next to the
/// recommendation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineComparison {
    pub th: f64,
    pub tor: f64,
    pub pr: f64,
    pub ef: f64,
    pub cost: Option<CostBreakdown>,
    /// `(recommended − baseline)/baseline·100`.
    pub pr_change_pct: f64,
    pub ef_change_pct: f64,
    /// `(baseline − recommended)/baseline·100`; absent if the baseline is
    /// infeasible.
    pub cost_reduction_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendResponse {
    pub recommendation: Recommendation,
    pub cost_params: CostParams,
    pub grid: GridSpec,
    pub baseline: Option<BaselineComparison>,
}

pub fn recommend(
    req: &RecommendRequest,
    pr_model: &dyn Surrogate,
    ef_model: &dyn Surrogate,
) -> Result<RecommendResponse> {
    let p = req.cost.unwrap_or_default();
    let g = req.grid.unwrap_or_default();
    let rec = optimize(&req.rock, pr_model, ef_model, &p, &g)?;
    let baseline = match req.baseline {
        None => None,
        Some(b) => {
            let e = evaluate_point(&req.rock, &b, pr_model, ef_model, &p)?;
            Some(BaselineComparison {
                th: b.th,
                tor: b.tor,
                pr: e.pr,
                ef: e.ef,
                cost: e.cost,
                pr_change_pct: rate_of_change(e.pr, rec.pr),
                ef_change_pct: rate_of_change(e.ef, rec.ef),
                cost_reduction_pct: e.cost.map(|c| -rate_of_change(c.total, rec.cost)),
            })
        }
    };
    Ok(RecommendResponse {
        recommendation: rec,
        cost_params: p,
        grid: g,
        baseline,
    })
}

pub fn surface(
    req: &RecommendRequest,
    pr_model: &dyn Surrogate,
    ef_model: &dyn Surrogate,
) -> Result<CostSurface> {
    cost_surface(
        &req.rock,
        pr_model,
        ef_model,
        &req.cost.unwrap_or_default(),
        &req.grid.unwrap_or_default(),
    )
}

//! Per-metre cost objective and exhaustive grid search over (thrust, torque).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::{MachineSetting, RockMassState};
use crate::error::{Error, Result};
use crate::model::Surrogate;

/// Cost coefficients. All values must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostParams {
    /// Price of one cutter, RMB.
    pub c1: f64,
    /// Project cost per day, RMB.
    pub c2: f64,
    /// Cutterhead diameter, m.
    pub d_tbm: f64,
    /// Cutter wear limit, mm.
    pub w_max: f64,
    /// Effective boring hours per day.
    pub t_daily: f64,
    /// Reference length, m.
    pub l: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            c1: 30000.0,
            c2: 350000.0,
            d_tbm: 6.0,
            w_max: 25.0,
            t_daily: 10.0,
            l: 1.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("d_tbm", self.d_tbm),
            ("w_max", self.w_max),
            ("t_daily", self.t_daily),
            ("l", self.l),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, "must be > 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    /// Cutter replacement cost.
    pub cutter: f64,
    /// Schedule (time) cost.
    pub period: f64,
}

/// Cost of boring `p.l` metres at penetration rate `pr` (mm/min) with
/// cutter life `ef` (m³/mm).
///
/// `pr·0.06·t_daily` converts mm/min into metres per day.
pub fn cost(pr: f64, ef: f64, p: &CostParams) -> Result<CostBreakdown> {
    if !(pr.is_finite() && pr > 0.0) {
        return Err(Error::Infeasible(format!("pr = {pr}")));
    }
    if !(ef.is_finite() && ef > 0.0) {
        return Err(Error::Infeasible(format!("ef = {ef}")));
    }
    let cutter = p.c1 * PI * p.d_tbm * p.d_tbm * p.l / (4.0 * ef * p.w_max);
    let period = p.c2 * p.l / (pr * 0.06 * p.t_daily);
    Ok(CostBreakdown {
        total: cutter + period,
        cutter,
        period,
    })
}

/// Inclusive search bounds. `min == max` gives a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub th_min: f64,
    pub th_max: f64,
    pub th_step: f64,
    pub tor_min: f64,
    pub tor_max: f64,
    pub tor_step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            th_min: 2000.0,
            th_max: 10000.0,
            th_step: 100.0,
            tor_min: 200.0,
            tor_max: 1500.0,
            tor_step: 50.0,
        }
    }
}

/// Limit on points per surface, to keep requests bounded.
pub const MAX_GRID_POINTS: usize = 1_000_000;

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        axis_check("th", self.th_min, self.th_max, self.th_step)?;
        axis_check("tor", self.tor_min, self.tor_max, self.tor_step)?;
        let n = self.th_values().len() * self.tor_values().len();
        if n > MAX_GRID_POINTS {
            return Err(Error::invalid(
                "grid",
                format!("{n} points exceeds the limit of {MAX_GRID_POINTS}"),
            ));
        }
        Ok(())
    }

    pub fn th_values(&self) -> Vec<f64> {
        axis(self.th_min, self.th_max, self.th_step)
    }

    pub fn tor_values(&self) -> Vec<f64> {
        axis(self.tor_min, self.tor_max, self.tor_step)
    }
}

fn axis_check(name: &str, min: f64, max: f64, step: f64) -> Result<()> {
    if !(min.is_finite() && min > 0.0) {
        return Err(Error::invalid(format!("{name}_min"), "must be > 0"));
    }
    if !(max.is_finite() && max >= min) {
        return Err(Error::invalid(format!("{name}_max"), "must be >= min"));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(format!("{name}_step"), "must be > 0"));
    }
    if (max - min) / step > MAX_GRID_POINTS as f64 {
        return Err(Error::invalid(format!("{name}_step"), "too small for the range"));
    }
    Ok(())
}

/// `min + i·step` for every `i` with the value not beyond `max`; a small
/// relative tolerance keeps `max` itself when the range is a multiple of
/// `step`.
fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}

/// Every grid setting, thrust outer and torque inner.
pub fn grid_points(g: &GridSpec) -> Result<Vec<MachineSetting>> {
    g.validate()?;
    let tors = g.tor_values();
    Ok(g.th_values()
        .into_iter()
        .flat_map(|th| tors.iter().map(move |&tor| MachineSetting::new(th, tor)))
        .collect())
}

/// Surrogate predictions and (when feasible) cost at one setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointEvaluation {
    pub th: f64,
    pub tor: f64,
    pub pr: f64,
    pub ef: f64,
    pub cost: Option<CostBreakdown>,
}

pub fn evaluate_point(
    rock: &RockMassState,
    machine: &MachineSetting,
    pr_model: &dyn Surrogate,
    ef_model: &dyn Surrogate,
    p: &CostParams,
) -> Result<PointEvaluation> {
    let pr = pr_model.predict(rock, machine)?;
    let ef = ef_model.predict(rock, machine)?;
    Ok(PointEvaluation {
        th: machine.th,
        tor: machine.tor,
        pr,
        ef,
        cost: cost(pr, ef, p).ok(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub th: f64,
    pub tor: f64,
    pub pr: f64,
    pub ef: f64,
    pub cost: f64,
    pub cutter_cost: f64,
    pub period_cost: f64,
    /// Share of grid points where both predictions were positive.
    pub feasible_fraction: f64,
}

fn evaluate_grid(
    rock: &RockMassState,
    pr_model: &dyn Surrogate,
    ef_model: &dyn Surrogate,
    p: &CostParams,
    g: &GridSpec,
) -> Result<Vec<PointEvaluation>> {
    rock.validate()?;
    p.validate()?;
    let points = grid_points(g)?;
    points
        .par_iter()
        .map(|m| evaluate_point(rock, m, pr_model, ef_model, p))
        .collect()
}

/// Index of the cheapest feasible point; the first one wins ties, which
/// in row-major order means lower thrust, then lower torque.
fn argmin(evals: &[PointEvaluation]) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    let mut feasible = 0usize;
    for (i, e) in evals.iter().enumerate() {
        if let Some(c) = e.cost {
            feasible += 1;
            if best.is_none_or(|(_, b)| c.total < b) {
                best = Some((i, c.total));
            }
        }
    }
    let fraction = feasible as f64 / evals.len() as f64;
    match best {
        Some((i, _)) => Ok((i, fraction)),
        None => Err(Error::NoFeasiblePoint {
            feasible_fraction: fraction,
        }),
    }
}

fn recommendation(e: &PointEvaluation, feasible_fraction: f64) -> Recommendation {
    let c = e.cost.expect("feasible point");
    Recommendation {
        th: e.th,
        tor: e.tor,
        pr: e.pr,
        ef: e.ef,
        cost: c.total,
        cutter_cost: c.cutter,
        period_cost: c.period,
        feasible_fraction,
    }
}

/// Exhaustive search for the cheapest grid setting. Points where either
/// prediction is non-positive are skipped.
pub fn optimize(
    rock: &RockMassState,
    pr_model: &dyn Surrogate,
    ef_model: &dyn Surrogate,
    p: &CostParams,
    g: &GridSpec,
) -> Result<Recommendation> {
    let evals = evaluate_grid(rock, pr_model, ef_model, p, g)?;
    let (i, frac) = argmin(&evals)?;
    Ok(recommendation(&evals[i], frac))
}

/// Cost, PR and Ef over the full grid (rows = thrust, columns = torque).
/// Infeasible cells hold NaN and serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSurface {
    pub th_values: Vec<f64>,
    pub tor_values: Vec<f64>,
    #[serde(with = "nan_matrix")]
    pub cost: Vec<Vec<f64>>,
    #[serde(with = "nan_matrix")]
    pub pr: Vec<Vec<f64>>,
    #[serde(with = "nan_matrix")]
    pub ef: Vec<Vec<f64>>,
    /// `[thrust index, torque index]` of the minimum.
    pub optimum: [usize; 2],
    pub recommendation: Recommendation,
}

impl CostSurface {
    pub fn validate(&self) -> Result<()> {
        let (r, c) = (self.th_values.len(), self.tor_values.len());
        for (name, m) in [("cost", &self.cost), ("pr", &self.pr), ("ef", &self.ef)] {
            if m.len() != r || m.iter().any(|row| row.len() != c) {
                return Err(Error::ShapeMismatch(format!("{name} is not {r}x{c}")));
            }
        }
        if self.optimum[0] >= r || self.optimum[1] >= c {
            return Err(Error::ShapeMismatch("optimum outside the grid".into()));
        }
        Ok(())
    }
}

pub fn cost_surface(
    rock: &RockMassState,
    pr_model: &dyn Surrogate,
    ef_model: &dyn Surrogate,
    p: &CostParams,
    g: &GridSpec,
) -> Result<CostSurface> {
    let evals = evaluate_grid(rock, pr_model, ef_model, p, g)?;
    let (best, frac) = argmin(&evals)?;
    let th_values = g.th_values();
    let tor_values = g.tor_values();
    let cols = tor_values.len();
    let matrix = |f: &dyn Fn(&PointEvaluation) -> f64| -> Vec<Vec<f64>> {
        evals.chunks(cols).map(|row| row.iter().map(f).collect()).collect()
    };
    let masked = |e: &PointEvaluation, v: f64| if e.cost.is_some() { v } else { f64::NAN };
    Ok(CostSurface {
        cost: matrix(&|e| e.cost.map_or(f64::NAN, |c| c.total)),
        pr: matrix(&|e| masked(e, e.pr)),
        ef: matrix(&|e| masked(e, e.ef)),
        optimum: [best / cols, best % cols],
        recommendation: recommendation(&evals[best], frac),
        th_values,
        tor_values,
    })
}

mod nan_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Option<f64>>> = m
            .iter()
            .map(|r| r.iter().map(|v| v.is_finite().then_some(*v)).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<f64>>, D::Error> {
        let rows: Vec<Vec<Option<f64>>> = Deserialize::deserialize(d)?;
        Ok(rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
            .collect())
    }
}

//! Single-hidden-layer regression network whose starting weights are
//! chosen by simulated annealing and then refined by full-batch gradient
//! descent.

mod anneal;
mod cv;
mod gd;
mod gradient;
mod metrics;

pub use anneal::{anneal, random_init, sa_init, sa_init_scaled, SaOutcome};
pub use cv::{cross_validate, CrossValidation};
pub use gd::{gd_train, GdOutcome, MIN_LEARN_RATE};
pub use gradient::{loss_and_gradient, mse};
pub use metrics::{evaluate, EvalReport};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::INPUT_DIM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden_nodes: usize,
}

impl Architecture {
    /// Penetration-rate model: 11 hidden nodes.
    pub fn prcr() -> Self {
        Architecture {
            input_dim: INPUT_DIM,
            hidden_nodes: 11,
        }
    }

    /// Cutter-life model: 12 hidden nodes.
    pub fn ccr() -> Self {
        Architecture {
            input_dim: INPUT_DIM,
            hidden_nodes: 12,
        }
    }

    pub fn param_count(&self) -> usize {
        self.hidden_nodes * (self.input_dim + 2) + 1
    }
}

/// Network weights. `weights_ih` is row-major, one row per hidden node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub input_dim: usize,
    pub hidden_nodes: usize,
    pub weights_ih: Vec<Vec<f64>>,
    pub bias_h: Vec<f64>,
    pub weights_ho: Vec<f64>,
    pub bias_o: f64,
    pub hidden_activation: String,
    pub output_activation: String,
}

impl NetworkParams {
    pub fn zeros(arch: Architecture) -> Self {
        NetworkParams {
            input_dim: arch.input_dim,
            hidden_nodes: arch.hidden_nodes,
            weights_ih: vec![vec![0.0; arch.input_dim]; arch.hidden_nodes],
            bias_h: vec![0.0; arch.hidden_nodes],
            weights_ho: vec![0.0; arch.hidden_nodes],
            bias_o: 0.0,
            hidden_activation: "tanh".into(),
            output_activation: "linear".into(),
        }
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            input_dim: self.input_dim,
            hidden_nodes: self.hidden_nodes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_activation != "tanh" || self.output_activation != "linear" {
            return Err(Error::Malformed(format!(
                "unsupported activations {}/{}",
                self.hidden_activation, self.output_activation
            )));
        }
        let shapes_ok = self.weights_ih.len() == self.hidden_nodes
            && self.weights_ih.iter().all(|r| r.len() == self.input_dim)
            && self.bias_h.len() == self.hidden_nodes
            && self.weights_ho.len() == self.hidden_nodes;
        if !shapes_ok {
            return Err(Error::ShapeMismatch(format!(
                "network does not match {}x{} architecture",
                self.input_dim, self.hidden_nodes
            )));
        }
        if !self.flatten().iter().all(|v| v.is_finite()) {
            return Err(Error::Malformed("network has non-finite parameters".into()));
        }
        Ok(())
    }

    /// `W_ho · tanh(W_ih·x + b_h) + b_o`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim {
            return Err(Error::invalid(
                "x",
                format!("expected {} inputs, got {}", self.input_dim, x.len()),
            ));
        }
        Ok(self.forward_unchecked(x))
    }

    pub(crate) fn hidden_activation(&self, j: usize, x: &[f64]) -> f64 {
        let mut s = self.bias_h[j];
        for (w, xi) in self.weights_ih[j].iter().zip(x) {
            s += w * xi;
        }
        s.tanh()
    }

    pub(crate) fn output_from_hidden(&self, h: &[f64]) -> f64 {
        let mut o = self.bias_o;
        for (w, hj) in self.weights_ho.iter().zip(h) {
            o += w * hj;
        }
        o
    }

    pub(crate) fn forward_unchecked(&self, x: &[f64]) -> f64 {
        let h: Vec<f64> = (0..self.hidden_nodes)
            .map(|j| self.hidden_activation(j, x))
            .collect();
        self.output_from_hidden(&h)
    }

    /// Parameters in the order `weights_ih` (row-major), `bias_h`,
    /// `weights_ho`, `bias_o`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.weights_ih.iter().flatten().copied().collect();
        v.extend_from_slice(&self.bias_h);
        v.extend_from_slice(&self.weights_ho);
        v.push(self.bias_o);
        v
    }

    pub fn from_flat(arch: Architecture, flat: &[f64]) -> Result<Self> {
        if flat.len() != arch.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} parameters, got {}",
                arch.param_count(),
                flat.len()
            )));
        }
        let mut net = NetworkParams::zeros(arch);
        for (k, &v) in flat.iter().enumerate() {
            *net.param_mut(k) = v;
        }
        Ok(net)
    }

    pub fn param_count(&self) -> usize {
        self.architecture().param_count()
    }

    pub(crate) fn param_mut(&mut self, k: usize) -> &mut f64 {
        match self.locate(k) {
            Param::InputHidden(j, i) => &mut self.weights_ih[j][i],
            Param::HiddenBias(j) => &mut self.bias_h[j],
            Param::HiddenOutput(j) => &mut self.weights_ho[j],
            Param::OutputBias => &mut self.bias_o,
        }
    }

    pub(crate) fn locate(&self, k: usize) -> Param {
        let n_ih = self.hidden_nodes * self.input_dim;
        if k < n_ih {
            Param::InputHidden(k / self.input_dim, k % self.input_dim)
        } else if k < n_ih + self.hidden_nodes {
            Param::HiddenBias(k - n_ih)
        } else if k < n_ih + 2 * self.hidden_nodes {
            Param::HiddenOutput(k - n_ih - self.hidden_nodes)
        } else {
            Param::OutputBias
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Param {
    InputHidden(usize, usize),
    HiddenBias(usize),
    HiddenOutput(usize),
    OutputBias,
}

/// How the starting weights for gradient descent are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// Random draw refined by simulated annealing.
    Annealed,
    /// The random draw alone (plain BP network).
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learn_rate: f64,
    pub gd_iterations: usize,
    pub sa_initial_temp: f64,
    pub sa_drop_ratio: f64,
    pub sa_inner_loops: usize,
    pub sa_iterations: usize,
    pub sa_final_temp: f64,
    pub seed: u64,
    pub target_normalization: bool,
    pub init: InitStrategy,
}

impl TrainConfig {
    /// Penetration-rate hyperparameters.
    pub fn prcr(seed: u64) -> Self {
        TrainConfig {
            learn_rate: 0.1,
            gd_iterations: 2000,
            sa_initial_temp: 100.0,
            sa_drop_ratio: 0.99,
            sa_inner_loops: 50,
            sa_iterations: 1000,
            sa_final_temp: 0.0,
            seed,
            target_normalization: true,
            init: InitStrategy::Annealed,
        }
    }

    /// Cutter-life hyperparameters.
    pub fn ccr(seed: u64) -> Self {
        TrainConfig {
            learn_rate: 0.15,
            gd_iterations: 1000,
            sa_initial_temp: 80.0,
            sa_inner_loops: 30,
            ..TrainConfig::prcr(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learn_rate.is_finite() && self.learn_rate > 0.0) {
            return Err(Error::invalid("learn_rate", "must be > 0"));
        }
        if !(self.sa_drop_ratio > 0.0 && self.sa_drop_ratio < 1.0) {
            return Err(Error::invalid("sa_drop_ratio", "must lie in (0, 1)"));
        }
        if !(self.sa_initial_temp.is_finite() && self.sa_initial_temp > 0.0) {
            return Err(Error::invalid("sa_initial_temp", "must be > 0"));
        }
        if !(self.sa_final_temp.is_finite() && self.sa_final_temp >= 0.0) {
            return Err(Error::invalid("sa_final_temp", "must be >= 0"));
        }
        if self.sa_inner_loops == 0 || self.sa_iterations == 0 {
            return Err(Error::invalid("sa_iterations", "annealing counts must be >= 1"));
        }
        Ok(())
    }
}

/// Feature vectors paired with scalar targets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Samples {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Samples {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} inputs vs {} targets",
                x.len(),
                y.len()
            )));
        }
        Ok(Samples { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn check_dim(&self, input_dim: usize) -> Result<()> {
        if self.is_empty() {
            return Err(Error::invalid("data", "no training samples"));
        }
        if let Some(row) = self.x.iter().position(|r| r.len() != input_dim) {
            return Err(Error::ShapeMismatch(format!(
                "sample {row} has {} features, network expects {input_dim}",
                self.x[row].len()
            )));
        }
        Ok(())
    }
}

/// Affine map between physical target units and the scale the network
/// is trained on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetScaler {
    pub mean: f64,
    /// Zero for a constant target, in which case every prediction is `mean`.
    pub std: f64,
}

impl TargetScaler {
    pub const IDENTITY: TargetScaler = TargetScaler { mean: 0.0, std: 1.0 };

    pub fn fit(y: &[f64]) -> Self {
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        TargetScaler {
            mean,
            std: var.sqrt(),
        }
    }

    pub fn normalize(&self, y: f64) -> f64 {
        let d = if self.std > 0.0 { self.std } else { 1.0 };
        (y - self.mean) / d
    }

    pub fn denormalize(&self, z: f64) -> f64 {
        self.mean + self.std * z
    }
}

/// A trained network together with its target scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regressor {
    pub network: NetworkParams,
    pub target_scaler: TargetScaler,
}

impl Regressor {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.target_scaler.denormalize(self.network.forward(x)?))
    }
}

/// Everything produced by one SA + GD training run.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub regressor: Regressor,
    pub initial_energy: f64,
    pub annealed_energy: f64,
    pub loss_trace: Vec<f64>,
    pub final_learn_rate: f64,
}

impl TrainedModel {
    /// Training MSE on the normalized scale after gradient descent.
    pub fn final_loss(&self) -> f64 {
        self.loss_trace
            .last()
            .copied()
            .unwrap_or(self.annealed_energy)
    }
}

/// Fits the target scaler, picks starting weights (annealed or random),
/// then runs gradient descent.
pub fn fit_regressor(train: &Samples, cfg: &TrainConfig, arch: Architecture) -> Result<TrainedModel> {
    cfg.validate()?;
    train.check_dim(arch.input_dim)?;

    let target_scaler = if cfg.target_normalization {
        TargetScaler::fit(&train.y)
    } else {
        TargetScaler::IDENTITY
    };
    let scaled = Samples {
        x: train.x.clone(),
        y: train.y.iter().map(|&y| target_scaler.normalize(y)).collect(),
    };

    let (start, initial_energy, annealed_energy) = match cfg.init {
        InitStrategy::Annealed => {
            let scale = if target_scaler.std > 0.0 {
                target_scaler.std * target_scaler.std
            } else {
                1.0
            };
            let sa = sa_init_scaled(&scaled, cfg, arch, scale)?;
            (sa.best, sa.initial_energy, sa.best_energy)
        }
        InitStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let net = random_init(arch, &mut rng);
            let e = mse(&net, &scaled);
            (net, e, e)
        }
    };

    let gd = gd_train(start, &scaled, cfg)?;
    Ok(TrainedModel {
        regressor: Regressor {
            network: gd.net,
            target_scaler,
        },
        initial_energy,
        annealed_energy,
        loss_trace: gd.loss_trace,
        final_learn_rate: gd.final_learn_rate,
    })
}

/// Annealing initialisation followed by gradient descent; the report is
/// computed on `validation` in its given order.
pub fn train_sa_bpnn(
    train: &Samples,
    validation: &Samples,
    cfg: &TrainConfig,
    arch: Architecture,
) -> Result<(TrainedModel, EvalReport)> {
    let model = fit_regressor(train, cfg, arch)?;
    validation.check_dim(arch.input_dim)?;
    let pred = validation
        .x
        .iter()
        .map(|x| model.regressor.predict(x))
        .collect::<Result<Vec<_>>>()?;
    let report = evaluate(&pred, &validation.y, true)?;
    Ok((model, report))
}

//! Simulated-annealing search for starting weights.
//!
//! Energy is the training MSE. Each proposal perturbs one randomly chosen
//! parameter with Gaussian noise of std `0.5·(t/t0) + 0.01`, clamped to the
//! parameter's initialization interval so hidden units cannot drift into
//! tanh saturation. The search keeps per-sample hidden activations so a
//! proposal only recomputes the affected hidden unit; results are
//! bit-identical to a full forward pass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{mse, Architecture, NetworkParams, Param, Samples, TrainConfig};
use crate::error::Result;

/// Half-width of the initialization interval for a parameter's layer.
fn init_limit(arch: Architecture, slot: Param) -> f64 {
    match slot {
        Param::InputHidden(..) | Param::HiddenBias(_) => {
            (6.0 / (arch.input_dim + arch.hidden_nodes) as f64).sqrt()
        }
        Param::HiddenOutput(_) | Param::OutputBias => (6.0 / (arch.hidden_nodes + 1) as f64).sqrt(),
    }
}

/// Uniform Glorot-style draw for weights and biases of each layer.
pub fn random_init<R: Rng + ?Sized>(arch: Architecture, rng: &mut R) -> NetworkParams {
    let mut net = NetworkParams::zeros(arch);
    let lim_ih = init_limit(arch, Param::HiddenBias(0));
    let lim_ho = init_limit(arch, Param::OutputBias);
    for row in net.weights_ih.iter_mut() {
        for w in row.iter_mut() {
            *w = rng.random_range(-lim_ih..lim_ih);
        }
    }
    for b in net.bias_h.iter_mut() {
        *b = rng.random_range(-lim_ih..lim_ih);
    }
    for w in net.weights_ho.iter_mut() {
        *w = rng.random_range(-lim_ho..lim_ho);
    }
    net.bias_o = rng.random_range(-lim_ho..lim_ho);
    net
}

#[derive(Debug, Clone)]
pub struct SaOutcome {
    /// Lowest-energy parameters seen.
    pub best: NetworkParams,
    pub best_energy: f64,
    /// The random draw the search started from.
    pub initial: NetworkParams,
    pub initial_energy: f64,
    /// Best energy after each temperature step.
    pub best_trace: Vec<f64>,
    pub accepted: usize,
    pub proposals: usize,
}

/// Draws random weights from `cfg.seed` and anneals them.
pub fn sa_init(data: &Samples, cfg: &TrainConfig, arch: Architecture) -> Result<SaOutcome> {
    sa_init_scaled(data, cfg, arch, 1.0)
}

/// As [`sa_init`], with Metropolis decisions taken on `energy_scale·MSE`.
/// Training on standardized targets passes the target variance here so
/// temperatures keep their meaning in physical units.
pub fn sa_init_scaled(
    data: &Samples,
    cfg: &TrainConfig,
    arch: Architecture,
    energy_scale: f64,
) -> Result<SaOutcome> {
    cfg.validate()?;
    data.check_dim(arch.input_dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let start = random_init(arch, &mut rng);
    Ok(anneal(start, data, cfg, energy_scale, &mut rng))
}

/// Metropolis annealing from `start` under the geometric schedule
/// `t ← sa_drop_ratio·t`, `sa_inner_loops` proposals per temperature.
/// Stops after `sa_iterations` steps or once `t < max(sa_final_temp, 1e-8)`.
/// Reported energies are plain MSE; only acceptance uses `energy_scale`.
pub fn anneal<R: Rng + ?Sized>(
    start: NetworkParams,
    data: &Samples,
    cfg: &TrainConfig,
    energy_scale: f64,
    rng: &mut R,
) -> SaOutcome {
    let mut state = Cache::new(start.clone(), data);
    let initial_energy = state.energy;
    let mut best = start.clone();
    let mut best_energy = initial_energy;
    let mut best_trace = Vec::with_capacity(cfg.sa_iterations);
    let (mut accepted, mut proposals) = (0, 0);

    let t0 = cfg.sa_initial_temp;
    let floor = cfg.sa_final_temp.max(1e-8);
    let n_params = start.param_count();
    let mut t = t0;

    for _ in 0..cfg.sa_iterations {
        if t < floor {
            break;
        }
        let step = Normal::new(0.0, 0.5 * (t / t0) + 0.01).expect("positive std");
        for _ in 0..cfg.sa_inner_loops {
            let k = rng.random_range(0..n_params);
            let delta = step.sample(rng);
            let candidate = state.propose(k, delta);
            let d_e = energy_scale * (candidate - state.energy);
            let u: f64 = rng.random();
            proposals += 1;
            if d_e <= 0.0 || u < (-d_e / t).exp() {
                state.commit();
                accepted += 1;
                if state.energy < best_energy {
                    best_energy = state.energy;
                    best = state.net.clone();
                }
            }
        }
        best_trace.push(best_energy);
        t *= cfg.sa_drop_ratio;
    }

    debug_assert_eq!(best_energy, mse(&best, data));
    SaOutcome {
        best,
        best_energy,
        initial: start,
        initial_energy,
        best_trace,
        accepted,
        proposals,
    }
}

/// Current parameters plus cached per-sample activations.
struct Cache<'a> {
    data: &'a Samples,
    net: NetworkParams,
    /// `hidden[s][j]` = tanh activation of unit `j` on sample `s`.
    hidden: Vec<Vec<f64>>,
    out: Vec<f64>,
    energy: f64,
    pending: Option<Pending>,
    scratch_hidden: Vec<f64>,
    scratch_col: Vec<f64>,
    scratch_out: Vec<f64>,
}

struct Pending {
    param: usize,
    value: f64,
    unit: Option<usize>,
    energy: f64,
}

impl<'a> Cache<'a> {
    fn new(net: NetworkParams, data: &'a Samples) -> Self {
        let hidden: Vec<Vec<f64>> = data
            .x
            .iter()
            .map(|x| (0..net.hidden_nodes).map(|j| net.hidden_activation(j, x)).collect())
            .collect();
        let out: Vec<f64> = hidden.iter().map(|h| net.output_from_hidden(h)).collect();
        let energy = energy(&out, &data.y);
        let n = data.len();
        Cache {
            data,
            hidden,
            out,
            energy,
            pending: None,
            scratch_hidden: vec![0.0; net.hidden_nodes],
            scratch_col: vec![0.0; n],
            scratch_out: vec![0.0; n],
            net,
        }
    }

    /// Energy if parameter `k` were shifted by `delta`.
    fn propose(&mut self, k: usize, delta: f64) -> f64 {
        let old = self.net.flatten_get(k);
        let slot = self.net.locate(k);
        let lim = init_limit(self.net.architecture(), slot);
        let value = (old + delta).clamp(-lim, lim);
        *self.net.param_mut(k) = value;

        let unit = match slot {
            Param::InputHidden(j, _) | Param::HiddenBias(j) => Some(j),
            Param::HiddenOutput(_) | Param::OutputBias => None,
        };
        for s in 0..self.data.len() {
            self.scratch_hidden.copy_from_slice(&self.hidden[s]);
            if let Some(j) = unit {
                let h = self.net.hidden_activation(j, &self.data.x[s]);
                self.scratch_hidden[j] = h;
                self.scratch_col[s] = h;
            }
            self.scratch_out[s] = self.net.output_from_hidden(&self.scratch_hidden);
        }
        *self.net.param_mut(k) = old;

        let e = energy(&self.scratch_out, &self.data.y);
        self.pending = Some(Pending {
            param: k,
            value,
            unit,
            energy: e,
        });
        e
    }

    fn commit(&mut self) {
        let p = self.pending.take().expect("commit without proposal");
        *self.net.param_mut(p.param) = p.value;
        if let Some(j) = p.unit {
            for (row, &h) in self.hidden.iter_mut().zip(&self.scratch_col) {
                row[j] = h;
            }
        }
        std::mem::swap(&mut self.out, &mut self.scratch_out);
        self.energy = p.energy;
    }
}

fn energy(out: &[f64], y: &[f64]) -> f64 {
    let mut e = 0.0;
    for (o, t) in out.iter().zip(y) {
        let d = o - t;
        e += d * d;
    }
    e / y.len() as f64
}

impl NetworkParams {
    fn flatten_get(&self, k: usize) -> f64 {
        match self.locate(k) {
            Param::InputHidden(j, i) => self.weights_ih[j][i],
            Param::HiddenBias(j) => self.bias_h[j],
            Param::HiddenOutput(j) => self.weights_ho[j],
            Param::OutputBias => self.bias_o,
        }
    }
}

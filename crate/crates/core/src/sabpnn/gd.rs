use super::{loss_and_gradient, NetworkParams, Samples, TrainConfig};
use crate::error::{Error, Result};

/// Floor for the step-size halving safeguard.
pub const MIN_LEARN_RATE: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct GdOutcome {
    pub net: NetworkParams,
    /// Training loss after each iteration; never increases.
    pub loss_trace: Vec<f64>,
    pub final_learn_rate: f64,
}

/// Full-batch gradient descent on MSE.
///
/// A step that would raise the loss is rejected and the learn rate halved
/// (down to [`MIN_LEARN_RATE`]), so the loss trace is non-increasing.
pub fn gd_train(net: NetworkParams, data: &Samples, cfg: &TrainConfig) -> Result<GdOutcome> {
    cfg.validate()?;
    data.check_dim(net.input_dim)?;

    let mut lr = cfg.learn_rate;
    let (mut loss, mut grad) = loss_and_gradient(&net, data);
    if !loss.is_finite() {
        return Err(Error::TrainingDiverged { iteration: 0, loss });
    }
    let mut net = net;
    let mut params = net.flatten();
    let mut trace = Vec::with_capacity(cfg.gd_iterations);

    for iteration in 0..cfg.gd_iterations {
        let g = grad.flatten();
        let candidate: Vec<f64> = params.iter().zip(&g).map(|(p, d)| p - lr * d).collect();
        let cand_net = NetworkParams::from_flat(net.architecture(), &candidate)?;
        let (cand_loss, cand_grad) = loss_and_gradient(&cand_net, data);
        if !cand_loss.is_finite() {
            return Err(Error::TrainingDiverged {
                iteration,
                loss: cand_loss,
            });
        }
        if cand_loss > loss {
            lr = (lr * 0.5).max(MIN_LEARN_RATE);
        } else {
            net = cand_net;
            params = candidate;
            loss = cand_loss;
            grad = cand_grad;
        }
        trace.push(loss);
    }

    Ok(GdOutcome {
        net,
        loss_trace: trace,
        final_learn_rate: lr,
    })
}

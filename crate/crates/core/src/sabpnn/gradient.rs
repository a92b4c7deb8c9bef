use super::{NetworkParams, Samples};

/// Mean-squared error over `data`.
pub fn mse(net: &NetworkParams, data: &Samples) -> f64 {
    let mut e = 0.0;
    for (x, &y) in data.x.iter().zip(&data.y) {
        let d = net.forward_unchecked(x) - y;
        e += d * d;
    }
    e / data.len() as f64
}

/// MSE and its gradient with respect to every parameter, by backprop.
/// The gradient is returned in the same shape as the network.
pub fn loss_and_gradient(net: &NetworkParams, data: &Samples) -> (f64, NetworkParams) {
    let n = data.len() as f64;
    let mut grad = NetworkParams::zeros(net.architecture());
    let mut hidden = vec![0.0; net.hidden_nodes];
    let mut loss = 0.0;

    for (x, &y) in data.x.iter().zip(&data.y) {
        for (j, h) in hidden.iter_mut().enumerate() {
            *h = net.hidden_activation(j, x);
        }
        let out = net.output_from_hidden(&hidden);
        let diff = out - y;
        loss += diff * diff;

        let d_out = 2.0 * diff / n;
        grad.bias_o += d_out;
        for j in 0..net.hidden_nodes {
            let h = hidden[j];
            grad.weights_ho[j] += d_out * h;
            let d_pre = d_out * net.weights_ho[j] * (1.0 - h * h);
            grad.bias_h[j] += d_pre;
            for (g, xi) in grad.weights_ih[j].iter_mut().zip(x) {
                *g += d_pre * xi;
            }
        }
    }
    (loss / n, grad)
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mae: f64,
    /// Percent.
    pub mape: f64,
    /// Percent of consecutive pairs whose direction of change agrees.
    /// Only defined for ordered data with at least two samples.
    pub trend_accuracy: Option<f64>,
    pub n: usize,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// MAE, MAPE and (for ordered samples) trend agreement.
///
/// MAPE is undefined when any true value is zero; the offending indices
/// are reported in the error.
pub fn evaluate(pred: &[f64], truth: &[f64], ordered: bool) -> Result<EvalReport> {
    if pred.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions vs {} targets",
            pred.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("truth", "nothing to evaluate"));
    }
    let zeros: Vec<usize> = truth
        .iter()
        .enumerate()
        .filter(|(_, t)| **t == 0.0)
        .map(|(i, _)| i)
        .collect();
    if !zeros.is_empty() {
        return Err(Error::MapeUndefined { indices: zeros });
    }

    let n = truth.len() as f64;
    let mae = pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum::<f64>() / n;
    let mape = 100.0
        * pred
            .iter()
            .zip(truth)
            .map(|(p, t)| ((p - t) / t).abs())
            .sum::<f64>()
        / n;

    let trend_accuracy = (ordered && truth.len() >= 2).then(|| {
        let pairs = truth.len() - 1;
        let hits = (0..pairs)
            .filter(|&i| sign(pred[i + 1] - pred[i]) == sign(truth[i + 1] - truth[i]))
            .count();
        100.0 * hits as f64 / pairs as f64
    });

    Ok(EvalReport {
        mae,
        mape,
        trend_accuracy,
        n: truth.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_prediction() {
        let t = [1.0, 3.0, 2.0, 2.0];
        let r = evaluate(&t, &t, true).unwrap();
        assert_eq!((r.mae, r.mape, r.trend_accuracy), (0.0, 0.0, Some(100.0)));
    }

    #[test]
    fn worked_values() {
        let r = evaluate(&[2.0, 4.0], &[1.0, 4.0], false).unwrap();
        assert_eq!(r.mae, 0.5);
        assert_eq!(r.mape, 50.0);
        assert_eq!(r.trend_accuracy, None);

        // pairs: (+,+) agree, (+,-) disagree
        let r = evaluate(&[3.0, 2.0, 5.0], &[1.0, 2.0, 3.0], true).unwrap();
        assert_eq!(r.trend_accuracy, Some(50.0));
    }

    #[test]
    fn flat_steps_count_as_their_own_direction() {
        let r = evaluate(&[1.0, 1.0, 2.0], &[5.0, 5.0, 4.0], true).unwrap();
        assert_eq!(r.trend_accuracy, Some(50.0));
    }

    #[test]
    fn zero_truth_is_reported() {
        let err = evaluate(&[1.0, 1.0, 1.0], &[1.0, 0.0, 0.0], false).unwrap_err();
        match err {
            Error::MapeUndefined { indices } => assert_eq!(indices, vec![1, 2]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_errors() {
        assert!(evaluate(&[1.0], &[1.0, 2.0], false).is_err());
        assert!(evaluate(&[], &[], false).is_err());
    }

    proptest! {
        #[test]
        fn mape_scales_with_uniform_relative_error(
            truth in prop::collection::vec(0.5f64..100.0, 1..30),
            r in -0.9f64..0.9,
        ) {
            let pred: Vec<f64> = truth.iter().map(|t| t * (1.0 + r)).collect();
            let rep = evaluate(&pred, &truth, true).unwrap();
            prop_assert!((rep.mape - 100.0 * r.abs()).abs() < 1e-9);
            prop_assert!(rep.mae >= 0.0);
            if truth.len() >= 2 && r > -1.0 {
                // positive scaling preserves every direction
                prop_assert_eq!(rep.trend_accuracy, Some(100.0));
            }
        }
    }
}

//! Feature pipeline: z-scoring, PCA of the two correlated input pairs,
//! one-hot muck geometry, correlation reporting and k-fold splitting.
//!
//! Standardization and the pair covariances both use the population
//! (1/n) convention, so a z-scored pair with correlation `r` has
//! covariance `[[1, r], [r, 1]]` and eigenvalues `1 ± r`. Pearson
//! correlations use the sample (1/(n−1)) convention.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{MachineSetting, MuckGeometry, RockMassState, TunnelingRecord};
use crate::error::{Error, Result};

/// Raw numeric inputs, in the order `means`/`stds` are stored.
pub const RAW_FEATURES: [&str; 9] = ["src", "ucs", "rqd", "cai", "q", "ci", "m", "th", "tor"];

const SRC: usize = 0;
const UCS: usize = 1;
const RQD: usize = 2;
const CAI: usize = 3;
const Q: usize = 4;
const CI: usize = 5;
const M: usize = 6;
const TH: usize = 7;
const TOR: usize = 8;

/// Model input layout produced by [`transform`].
pub const MODEL_FEATURES: [&str; 13] = [
    "src_z",
    "rqd_z",
    "cai_z",
    "q_z",
    "pc1_ucs_th",
    "pc2_ucs_th",
    "pc1_ci_m",
    "pc2_ci_m",
    "tor_z",
    "mgt_1",
    "mgt_2",
    "mgt_3",
    "mgt_4",
];

pub const INPUT_DIM: usize = MODEL_FEATURES.len();

/// Columns reported by [`pearson_matrix`].
pub const CORRELATION_FEATURES: [&str; 8] = ["ucs", "rqd", "cai", "q", "ci", "m", "th", "tor"];

pub fn raw_vector(rock: &RockMassState, machine: &MachineSetting) -> [f64; 9] {
    [
        f64::from(rock.src.ordinal()),
        rock.ucs,
        rock.rqd,
        rock.cai,
        rock.q,
        rock.ci,
        rock.m,
        machine.th,
        machine.tor,
    ]
}

/// Unit basis vector for a muck geometry category.
pub fn one_hot(mgt: MuckGeometry) -> [f64; 4] {
    let mut v = [0.0; 4];
    v[mgt.index()] = 1.0;
    v
}

/// Same as [`one_hot`] for an unchecked category number.
pub fn one_hot_category(category: u8) -> Result<[f64; 4]> {
    MuckGeometry::new(category).map(one_hot)
}

/// Principal axes of a standardized feature pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairPca {
    /// Loading of the larger-eigenvalue component.
    pub pc1: [f64; 2],
    pub pc2: [f64; 2],
    /// `[λ1, λ2]` with `λ1 ≥ λ2`.
    pub eigenvalues: [f64; 2],
}

impl PairPca {
    /// Eigendecomposition of a symmetric 2×2 covariance `[[a, c], [c, b]]`.
    pub fn from_covariance(a: f64, b: f64, c: f64) -> Self {
        let mid = 0.5 * (a + b);
        let radius = (0.25 * (a - b) * (a - b) + c * c).sqrt();
        let (l1, l2) = (mid + radius, mid - radius);

        let v = if c == 0.0 {
            if a >= b {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            }
        } else {
            // two algebraically equivalent eigenvectors; take the better conditioned
            let u = [l1 - b, c];
            let w = [c, l1 - a];
            if norm(u) >= norm(w) {
                u
            } else {
                w
            }
        };
        let pc1 = sign_convention(normalize(v));
        let pc2 = sign_convention([-pc1[1], pc1[0]]);
        PairPca {
            pc1,
            pc2,
            eigenvalues: [l1, l2],
        }
    }

    pub fn scores(&self, z: [f64; 2]) -> [f64; 2] {
        [
            self.pc1[0] * z[0] + self.pc1[1] * z[1],
            self.pc2[0] * z[0] + self.pc2[1] * z[1],
        ]
    }

    pub fn explained_share(&self) -> f64 {
        let total = self.eigenvalues[0] + self.eigenvalues[1];
        if total > 0.0 {
            self.eigenvalues[0] / total
        } else {
            0.0
        }
    }
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let n = norm(v);
    [v[0] / n, v[1] / n]
}

fn sign_convention(v: [f64; 2]) -> [f64; 2] {
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Fitted state of the feature pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessorState {
    pub feature_names: Vec<String>,
    pub raw_features: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub pca_ucs_th: PairPca,
    pub pca_ci_m: PairPca,
    pub mgt_categories: Vec<u8>,
    pub output_dim: usize,
}

impl PreprocessorState {
    pub fn validate(&self) -> Result<()> {
        let n = RAW_FEATURES.len();
        if self.means.len() != n || self.stds.len() != n || self.raw_features.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "preprocessor expects {n} raw features"
            )));
        }
        if self.feature_names.len() != self.output_dim || self.output_dim != INPUT_DIM {
            return Err(Error::ShapeMismatch(format!(
                "preprocessor output_dim {} does not match layout of {INPUT_DIM}",
                self.output_dim
            )));
        }
        if let Some(i) = self.stds.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Malformed(format!(
                "std of `{}` must be positive",
                RAW_FEATURES[i]
            )));
        }
        for pca in [&self.pca_ucs_th, &self.pca_ci_m] {
            if (norm(pca.pc1) - 1.0).abs() > 1e-9 || pca.pc1[0] < 0.0 {
                return Err(Error::Malformed("PCA loading is not a signed unit vector".into()));
            }
        }
        Ok(())
    }

    fn z(&self, raw: &[f64; 9], i: usize) -> f64 {
        (raw[i] - self.means[i]) / self.stds[i]
    }
}

fn population_stats(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Population covariance of two equally long columns.
fn population_cov(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / n
}

/// Fits z-score statistics and the two pair PCAs on `records`.
pub fn fit_preprocessor(records: &[TunnelingRecord]) -> Result<PreprocessorState> {
    if records.len() < 2 {
        return Err(Error::invalid(
            "records",
            format!("need at least 2 records, got {}", records.len()),
        ));
    }
    let raws: Vec<[f64; 9]> = records
        .iter()
        .map(|r| raw_vector(&r.rock, &r.machine))
        .collect();

    let mut means = Vec::with_capacity(RAW_FEATURES.len());
    let mut stds = Vec::with_capacity(RAW_FEATURES.len());
    for (i, name) in RAW_FEATURES.iter().enumerate() {
        let col: Vec<f64> = raws.iter().map(|r| r[i]).collect();
        let (mean, std) = population_stats(&col);
        if !(std > 0.0 && std.is_finite()) {
            return Err(Error::Fit {
                column: (*name).to_string(),
                message: "is constant".into(),
            });
        }
        means.push(mean);
        stds.push(std);
    }

    let zcol = |i: usize| -> Vec<f64> {
        raws.iter().map(|r| (r[i] - means[i]) / stds[i]).collect()
    };
    let fit_pair = |i: usize, j: usize| {
        let (zi, zj) = (zcol(i), zcol(j));
        PairPca::from_covariance(
            population_cov(&zi, &zi),
            population_cov(&zj, &zj),
            population_cov(&zi, &zj),
        )
    };
    let pca_ucs_th = fit_pair(UCS, TH);
    let pca_ci_m = fit_pair(CI, M);

    Ok(PreprocessorState {
        feature_names: MODEL_FEATURES.iter().map(|s| s.to_string()).collect(),
        raw_features: RAW_FEATURES.iter().map(|s| s.to_string()).collect(),
        means,
        stds,
        pca_ucs_th,
        pca_ci_m,
        mgt_categories: MuckGeometry::ALL.iter().map(|m| m.category()).collect(),
        output_dim: INPUT_DIM,
    })
}

/// Maps one (rock, machine) pair to the model input vector.
pub fn transform(
    state: &PreprocessorState,
    rock: &RockMassState,
    machine: &MachineSetting,
) -> Vec<f64> {
    let raw = raw_vector(rock, machine);
    let ucs_th = state
        .pca_ucs_th
        .scores([state.z(&raw, UCS), state.z(&raw, TH)]);
    let ci_m = state.pca_ci_m.scores([state.z(&raw, CI), state.z(&raw, M)]);
    let mut out = Vec::with_capacity(INPUT_DIM);
    out.extend_from_slice(&[
        state.z(&raw, SRC),
        state.z(&raw, RQD),
        state.z(&raw, CAI),
        state.z(&raw, Q),
        ucs_th[0],
        ucs_th[1],
        ci_m[0],
        ci_m[1],
        state.z(&raw, TOR),
    ]);
    out.extend_from_slice(&one_hot(rock.mgt));
    out
}

/// Pairwise Pearson correlations over the continuous inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// `None` where a column is constant and the coefficient is undefined.
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        self.values[i][j]
    }
}

/// Sample Pearson correlation; `None` if either column is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let denom_n = nf - 1.0;
    let (cov, vx, vy) = (sxy / denom_n, sxx / denom_n, syy / denom_n);
    if vx <= 0.0 || vy <= 0.0 {
        return None;
    }
    Some((cov / (vx.sqrt() * vy.sqrt())).clamp(-1.0, 1.0))
}

pub fn pearson_matrix(records: &[TunnelingRecord]) -> Result<CorrelationMatrix> {
    if records.len() < 3 {
        return Err(Error::invalid(
            "records",
            format!("need at least 3 records, got {}", records.len()),
        ));
    }
    let cols: Vec<Vec<f64>> = (UCS..=TOR)
        .map(|i| {
            records
                .iter()
                .map(|r| raw_vector(&r.rock, &r.machine)[i])
                .collect()
        })
        .collect();
    let k = cols.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = if i == j {
                pearson(&cols[i], &cols[i]).map(|_| 1.0)
            } else {
                pearson(&cols[i], &cols[j])
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: CORRELATION_FEATURES.iter().map(|s| s.to_string()).collect(),
        values,
    })
}

/// Assignment of records to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Fold index for each record.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    /// `(training indices, held-out indices)` for one fold, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.assignments.len()).partition(|&i| self.assignments[i] != fold)
    }
}

/// Seeded shuffle followed by contiguous assignment; the first `n % k`
/// folds receive one extra record.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::invalid("k", format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(
            "k",
            format!("{k} folds requested for {n} records"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let (base, extra) = (n / k, n % k);
    let mut assignments = vec![0; n];
    let mut pos = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &idx in &order[pos..pos + size] {
            assignments[idx] = fold;
        }
        pos += size;
    }
    Ok(FoldPlan {
        k,
        seed,
        assignments,
    })
}

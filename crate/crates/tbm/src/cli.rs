//! Command-line driver.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use tbm_core::api::{self, RecommendRequest, ValidationError};
use tbm_core::domain::{coarseness_index, mean_grain_size, MachineSetting, RockMassState};
use tbm_core::io::{emit_records_csv, load_model, parse_records_csv, parse_sieve_csv, save_model, save_surface};
use tbm_core::model::{ModelBundle, Target};
use tbm_core::sabpnn::cross_validate;
use tbm_core::synth::{
    format_report, generate_dataset, replicate_field_test, report_csv, GroundTruth, ScenarioSpec, EF_FOLDS,
    PR_FOLDS,
};
use tbm_core::Error;

use crate::service::{self, AppState};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "tbm", version, about = "Thrust/torque recommendation for hard-rock TBMs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Prcr,
    Ccr,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TargetArg {
    Pr,
    Ef,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Pr => Target::Pr,
            TargetArg::Ef => Target::Ef,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MuckIndex {
    /// Coarseness index (sum of cumulative percent retained).
    Ci,
    /// Mean grain size from the 16/50/84 percentiles.
    Mgs,
}

/// Inputs shared by `recommend` and `surface`.
#[derive(Debug, clap::Args)]
pub struct DecisionArgs {
    #[arg(long)]
    pub pr_model: PathBuf,
    #[arg(long)]
    pub ef_model: PathBuf,
    /// Rock state as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub rock: String,
    /// Cost parameter overrides (inline JSON or file).
    #[arg(long)]
    pub cost: Option<String>,
    /// Grid overrides (inline JSON or file).
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset from the built-in ground truth.
    Synth {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Total records; the preset's train/test ratio is kept.
        #[arg(long)]
        n: Option<usize>,
        /// Relative noise standard deviation, percent.
        #[arg(long, default_value_t = 8.0)]
        noise: f64,
        #[arg(long, env = "TBM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write the test split here and only the training split to `--out`.
        #[arg(long)]
        holdout: Option<PathBuf>,
    },
    /// Cross-validate an SA-BPNN surrogate and save the selected fold.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Defaults to 3 for pr and 4 for ef.
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long, env = "TBM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Held-out records to score and record in the bundle.
        #[arg(long)]
        test: Option<PathBuf>,
    },
    /// Score a saved model on a dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Muck indices from sieve analyses.
    Muck {
        #[arg(value_enum)]
        index: MuckIndex,
        #[arg(long)]
        sieve: PathBuf,
    },
    /// Recommend thrust and torque for one rock state.
    Recommend {
        #[command(flatten)]
        args: DecisionArgs,
        /// Operator setting to compare against, `TH,TOR`.
        #[arg(long)]
        baseline: Option<String>,
    },
    /// Write the full cost surface.
    Surface {
        #[command(flatten)]
        args: DecisionArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on fresh synthetic data per seed and rerun the field comparison.
    Replicate {
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// First seed; runs use `base..base+seeds`.
        #[arg(long, env = "TBM_SEED", default_value_t = 0)]
        base: u64,
        #[arg(long, default_value_t = 8.0)]
        noise: f64,
        /// Also write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write one CSV row per seed and muck category.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Serve the HTTP API over two saved models.
    Serve {
        #[arg(long)]
        pr_model: PathBuf,
        #[arg(long)]
        ef_model: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: u8,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: e.code(),
            exit: if e.is_validation() { EXIT_VALIDATION } else { EXIT_RUNTIME },
            message: e.to_string(),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(v: ValidationError) -> Self {
        let message = v
            .errors
            .iter()
            .map(|e| format!("`{}`: {}", e.field, e.message))
            .collect::<Vec<_>>()
            .join("; ");
        CliError {
            code: "invalid_input",
            message,
            exit: EXIT_VALIDATION,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError {
        code: "io_error",
        message: format!("{}: {e}", path.display()),
        exit: EXIT_VALIDATION,
    })
}

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| CliError {
        code: "io_error",
        message: format!("{}: {e}", path.display()),
        exit: EXIT_RUNTIME,
    })
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn json_arg<T: DeserializeOwned>(name: &str, arg: &str) -> CliResult<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.as_bytes().to_vec()
    } else {
        read(Path::new(arg))?
    };
    serde_json::from_slice(&text).map_err(|e| Error::invalid(name, e.to_string()).into())
}

fn parse_baseline(s: &str) -> CliResult<MachineSetting> {
    let bad = || CliError::from(Error::invalid("baseline", format!("expected TH,TOR, got `{s}`")));
    let (th, tor) = s.split_once(',').ok_or_else(bad)?;
    let th: f64 = th.trim().parse().map_err(|_| bad())?;
    let tor: f64 = tor.trim().parse().map_err(|_| bad())?;
    Ok(MachineSetting::new(th, tor))
}

fn load_pair(pr: &Path, ef: &Path) -> CliResult<(ModelBundle, ModelBundle)> {
    let pr = load_model(&read(pr)?)?;
    let ef = load_model(&read(ef)?)?;
    if pr.target != Target::Pr || ef.target != Target::Ef {
        return Err(Error::invalid("model", "expected a pr model and an ef model").into());
    }
    Ok((pr, ef))
}

fn decision_request(args: &DecisionArgs, baseline: Option<MachineSetting>) -> CliResult<(RecommendRequest, ModelBundle, ModelBundle)> {
    let req = RecommendRequest {
        rock: json_arg::<RockMassState>("rock", &args.rock)?,
        cost: args.cost.as_deref().map(|c| json_arg("cost", c)).transpose()?,
        grid: args.grid.as_deref().map(|g| json_arg("grid", g)).transpose()?,
        baseline,
    };
    req.validate()?;
    let (pr, ef) = load_pair(&args.pr_model, &args.ef_model)?;
    Ok((req, pr, ef))
}

fn check_noise(noise: f64) -> CliResult<GroundTruth> {
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::invalid("noise", "must be a finite percentage >= 0").into());
    }
    Ok(GroundTruth { noise_sigma_pct: noise })
}

fn print_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::from(e).into())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Synth {
            preset,
            n,
            noise,
            seed,
            out: path,
            holdout,
        } => {
            let gt = check_noise(noise)?;
            let mut spec = match preset {
                Preset::Prcr => ScenarioSpec::prcr(seed),
                Preset::Ccr => ScenarioSpec::ccr(seed),
            };
            if let Some(n) = n {
                let test = (n as f64 * spec.n_test as f64 / spec.n_total() as f64).round() as usize;
                spec.n_test = test;
                spec.n_train = n.saturating_sub(test);
            }
            let data = generate_dataset(&spec, &gt)?;
            match holdout {
                Some(h) => {
                    let (train, test) = spec.split(&data);
                    write(&path, &emit_records_csv(train)?)?;
                    write(&h, &emit_records_csv(test)?)?;
                }
                None => write(&path, &emit_records_csv(&data)?)?,
            }
            writeln!(out, "wrote {} records ({} train, {} test)", data.len(), spec.n_train, spec.n_test)
                .map_err(Error::from)?;
        }
        Command::Train {
            data,
            target,
            folds,
            seed,
            out: path,
            test,
        } => {
            let target = Target::from(target);
            let k = folds.unwrap_or(match target {
                Target::Pr => PR_FOLDS,
                Target::Ef => EF_FOLDS,
            });
            let records = parse_records_csv(&read(&data)?)?;
            let test = test.map(|t| read(&t).and_then(|b| Ok(parse_records_csv(&b)?))).transpose()?;
            let cv = cross_validate(&records, target, k, &target.default_config(seed), target.architecture())?;
            let mut bundle = cv.bundle;
            if let Some(t) = test {
                bundle.training_meta.test = Some(bundle.evaluate_records(&t, true)?);
            }
            bundle.created_at = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
            write(&path, &save_model(&bundle)?)?;
            let m = &bundle.training_meta;
            writeln!(
                out,
                "selected fold {} of {}: validation MAE {:.4}, MAPE {:.2}%",
                m.selected_fold + 1,
                m.k_folds,
                m.validation.mae,
                m.validation.mape
            )
            .map_err(Error::from)?;
            if let Some(t) = m.test {
                writeln!(out, "test: MAE {:.4}, MAPE {:.2}%", t.mae, t.mape).map_err(Error::from)?;
            }
        }
        Command::Evaluate { model, data } => {
            let bundle = load_model(&read(&model)?)?;
            let mut records = parse_records_csv(&read(&data)?)?;
            // trend needs a meaningful order; use chainage when every row has one
            let ordered = records.iter().all(|r| r.chainage.is_some());
            if ordered {
                records.sort_by(|a, b| a.chainage.unwrap().total_cmp(&b.chainage.unwrap()));
            }
            let report = bundle.evaluate_records(&records, ordered)?;
            print_json(out, &report)?;
        }
        Command::Muck { index, sieve } => {
            let samples = parse_sieve_csv(&read(&sieve)?)?;
            match index {
                MuckIndex::Ci => {
                    writeln!(out, "sample_id,ci").map_err(Error::from)?;
                    for s in &samples {
                        writeln!(out, "{},{}", s.sample_id, coarseness_index(s)?).map_err(Error::from)?;
                    }
                }
                MuckIndex::Mgs => {
                    writeln!(out, "sample_id,m_mm,phi16_mm,phi50_mm,phi84_mm,clamped").map_err(Error::from)?;
                    for s in &samples {
                        let g = mean_grain_size(s)?;
                        writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            s.sample_id, g.mean_mm, g.phi16, g.phi50, g.phi84, g.clamped
                        )
                        .map_err(Error::from)?;
                    }
                }
            }
        }
        Command::Recommend { args, baseline } => {
            let baseline = baseline.as_deref().map(parse_baseline).transpose()?;
            let (req, pr, ef) = decision_request(&args, baseline)?;
            print_json(out, &api::recommend(&req, &pr, &ef)?)?;
        }
        Command::Surface { args, out: path } => {
            let (req, pr, ef) = decision_request(&args, None)?;
            let s = api::surface(&req, &pr, &ef)?;
            write(&path, &save_surface(&s)?)?;
            let r = &s.recommendation;
            writeln!(
                out,
                "{}x{} surface, optimum th {} tor {} cost {:.2}",
                s.th_values.len(),
                s.tor_values.len(),
                r.th,
                r.tor,
                r.cost
            )
            .map_err(Error::from)?;
        }
        Command::Replicate {
            seeds,
            base,
            noise,
            json,
            csv,
        } => {
            let gt = check_noise(noise)?;
            let seeds: Vec<u64> = (base..base.saturating_add(seeds)).collect();
            let report = replicate_field_test(&gt, &seeds)?;
            write!(out, "{}", format_report(&report)).map_err(Error::from)?;
            if let Some(p) = json {
                write(&p, &serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?)?;
            }
            if let Some(p) = csv {
                write(&p, &report_csv(&report)?)?;
            }
        }
        Command::Serve {
            pr_model,
            ef_model,
            port,
            host,
        } => {
            let (pr, ef) = load_pair(&pr_model, &ef_model)?;
            let state = AppState::from_bundles(pr, ef)?;
            let rt = tokio::runtime::Runtime::new().map_err(Error::from)?;
            rt.block_on(service::serve(state, SocketAddr::new(host, port)))
                .map_err(Error::from)?;
        }
    }
    Ok(())
}

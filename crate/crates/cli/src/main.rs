//! `jspec`: joint spectra, Bernstein-calculus reports and stability
//! analysis of commuting matrix tuples, driven by JSON inputs.
//!
//! Exit codes: 0 success, 2 invalid input (malformed JSON, non-commuting
//! tuple, invalid Bernstein data, bad flags), 3 numerical non-convergence.
//! Errors are emitted to stderr as a JSON object. All randomness flows from
//! `--seed`, so artifacts are byte-identical across reruns.

mod output;
mod serialize;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use jspec_core::bernstein::{self, BernsteinData, BernsteinFunction, ProbeGrid};
use jspec_core::error::Error;
use jspec_core::json::{ConeJson, SpectrumJson, SpectrumKind, TupleJson};
use jspec_core::koszul;
use jspec_core::linalg::{candidate_points, joint_eigenvalues, CommutingTuple, ToleranceConfig};
use jspec_core::spectra;
use jspec_core::stability::{
    basis_probes, cascade_solve, rolewicz_check, stability_report, strong_stability_conditions,
    Cone, GridSpec, PhiFunction, QuadratureConfig,
};

use output::{fmt_full, provenance, write_json, CsvArtifact};

#[derive(Parser)]
#[command(name = "jspec", version, about = "Joint spectra of commuting matrix tuples")]
struct Cli {
    /// Seed for every random draw (triangularization, sampling).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    tolerances: ToleranceArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ToleranceArgs {
    /// Relative commutation tolerance.
    #[arg(long, global = true)]
    tau_comm: Option<f64>,
    /// Relative singular-value cutoff.
    #[arg(long, global = true)]
    tau_rank: Option<f64>,
    /// Absolute dedup distance.
    #[arg(long, global = true)]
    tau_dedup: Option<f64>,
    /// Feasibility residual bound.
    #[arg(long, global = true)]
    tau_feas: Option<f64>,
}

impl ToleranceArgs {
    fn build(&self) -> Result<ToleranceConfig, CliError> {
        let mut cfg = ToleranceConfig::default();
        if let Some(v) = self.tau_comm {
            cfg.tau_comm = v;
        }
        if let Some(v) = self.tau_rank {
            cfg.tau_rank = v;
        }
        if let Some(v) = self.tau_dedup {
            cfg.tau_dedup = v;
        }
        if let Some(v) = self.tau_feas {
            cfg.tau_feas = v;
        }
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute joint spectra of a tuple.
    Spectra {
        /// Tuple JSON input.
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated kinds (point, sigma_a, sigma_R, sigma_J,
        /// sigma_prime, sigma_biprime, shilov, taylor) or "all".
        #[arg(long, default_value = "all")]
        kinds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit the Koszul complex: per-candidate ranks and kernel dimensions.
    Taylor {
        #[arg(long = "in")]
        input: PathBuf,
        /// Extra points, "re,im;re,im" per point, ':'-separated.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a Bernstein function and produce the spectral-mapping report.
    Bernstein {
        #[arg(long = "in")]
        input: PathBuf,
        /// Bernstein JSON input.
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stability battery on a cone (plus strong-stability conditions).
    Stability {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cone: PathBuf,
        /// Horizon for the decay fits.
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        #[arg(long)]
        out: PathBuf,
        /// Optional decay-curve CSV (ray id, t, norm).
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Integral stability criterion with phi(t) = t^p.
    Rolewicz {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cone: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        phi_power: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-parameter cascade Cauchy problem; CSV of (t1, t2, norm).
    Cascade {
        #[arg(long = "in")]
        input: PathBuf,
        /// Initial vector: "ones", "e1" or comma-separated reals.
        #[arg(long, default_value = "ones")]
        v0: String,
        /// Grid as "N1xN2".
        #[arg(long, default_value = "20x20")]
        grid: String,
        #[arg(long, default_value_t = 5.0)]
        t1_max: f64,
        #[arg(long, default_value_t = 5.0)]
        t2_max: f64,
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate inputs: a tuple (--in) and/or a Bernstein function (--psi).
    Validate {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        psi: Option<PathBuf>,
    },
}

/// Error carrying the process exit code and a machine-readable kind.
pub struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    fn io(message: String) -> Self {
        Self {
            code: 2,
            kind: "io",
            message,
        }
    }

    fn parse(message: String) -> Self {
        Self {
            code: 2,
            kind: "parse",
            message,
        }
    }

    fn invalid(message: String) -> Self {
        Self {
            code: 2,
            kind: "validation",
            message,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Dimension(_) => (2, "dimension"),
            Error::Validation(_) => (2, "validation"),
            Error::Domain(_) => (2, "domain"),
            Error::NonConvergence(_) => (3, "nonconvergence"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = json!({ "error": { "kind": e.kind, "message": e.message } });
            eprintln!("{obj}");
            ExitCode::from(e.code)
        }
    }
}

/// `JSPEC_THREADS` caps the worker pool used by the candidate scans.
fn init_thread_pool() {
    if let Ok(raw) = std::env::var("JSPEC_THREADS") {
        if let Ok(k) = raw.trim().parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("parsing {}: {e}", path.display())))
}

fn load_tuple(path: &Path, cfg: &ToleranceConfig) -> Result<CommutingTuple, CliError> {
    let json: TupleJson = read_json(path)?;
    json.to_tuple(cfg).map_err(CliError::from)
}

fn load_cone(path: &Path) -> Result<Cone, CliError> {
    let json: ConeJson = read_json(path)?;
    json.to_cone().map_err(CliError::from)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.tolerances.build()?;
    let seed = cli.seed;
    match &cli.command {
        Command::Spectra { input, kinds, out } => {
            let tuple = load_tuple(input, &cfg)?;
            let kinds = parse_kinds(kinds)?;
            let mut spectra_json = Vec::with_capacity(kinds.len());
            for kind in kinds {
                let mut diagnostics = None;
                let set = match kind {
                    SpectrumKind::Point => spectra::point_spectrum(&tuple, &cfg),
                    SpectrumKind::Approximate => spectra::approximate_spectrum(&tuple, &cfg),
                    SpectrumKind::Residual => spectra::residual_spectrum(&tuple, &cfg),
                    SpectrumKind::Joint => spectra::joint_spectrum_j(&tuple, &cfg),
                    SpectrumKind::Commutant => spectra::commutant_scan(&tuple, &cfg).map(|scan| {
                        diagnostics = Some(serialize::marginal_audit(&scan));
                        scan.spectrum
                    }),
                    SpectrumKind::Bicommutant => {
                        spectra::bicommutant_scan(&tuple, &cfg).map(|scan| {
                            diagnostics = Some(serialize::marginal_audit(&scan));
                            scan.spectrum
                        })
                    }
                    SpectrumKind::Shilov => spectra::shilov_with_diagnostics(&tuple, &cfg, seed)
                        .map(|sh| {
                            diagnostics = Some(serialize::shilov(&sh));
                            sh.spectrum
                        }),
                    SpectrumKind::Taylor => koszul::taylor_spectrum(&tuple, &cfg),
                }
                .map_err(CliError::from)?;
                let mut value = serde_json::to_value(SpectrumJson::from_set(kind, &set))
                    .map_err(|e| CliError::io(e.to_string()))?;
                if let Some(diag) = diagnostics {
                    value["diagnostics"] = diag;
                }
                spectra_json.push(value);
            }
            write_json(
                out,
                &json!({
                    "provenance": provenance(seed, &cfg),
                    "spectra": spectra_json,
                }),
            )
        }
        Command::Taylor { input, lambda, out } => {
            let tuple = load_tuple(input, &cfg)?;
            let mut points: Vec<Vec<Complex64>> = candidate_points(&tuple, &cfg)
                .map_err(CliError::from)?
                .points()
                .to_vec();
            if let Some(extra) = lambda {
                points.extend(parse_points(extra, tuple.n())?);
            }
            let mut audits = Vec::with_capacity(points.len());
            for p in &points {
                let complex = koszul::build_complex(&tuple, p).map_err(CliError::from)?;
                let audit = koszul::exactness_audit(&complex, &cfg).map_err(CliError::from)?;
                audits.push(serialize::exactness_audit(p, !audit.exact, &audit));
            }
            write_json(
                out,
                &json!({
                    "provenance": provenance(seed, &cfg),
                    "audits": audits,
                }),
            )
        }
        Command::Bernstein { input, psi, out } => {
            let tuple = load_tuple(input, &cfg)?;
            let data: BernsteinData = read_json(psi)?;
            let validation = bernstein::validate(&data, &ProbeGrid::default());
            if !validation.passed {
                let obj = serialize::validation_report(&validation);
                return Err(CliError::invalid(format!("invalid Bernstein data: {obj}")));
            }
            let function = BernsteinFunction::from_data(&data).map_err(CliError::from)?;
            let report = bernstein::spectral_mapping_report(&function, &tuple, &cfg, seed)
                .map_err(CliError::from)?;
            write_json(
                out,
                &json!({
                    "provenance": provenance(seed, &cfg),
                    "validation": serialize::validation_report(&validation),
                    "report": serialize::spectral_mapping(&report),
                }),
            )
        }
        Command::Stability {
            input,
            cone,
            t_max,
            out,
            curves,
        } => {
            let tuple = load_tuple(input, &cfg)?;
            let cone = load_cone(cone)?;
            let report =
                stability_report(&tuple, &cone, *t_max, &cfg, seed).map_err(CliError::from)?;
            let strong = strong_stability_conditions(&tuple, &cone, *t_max, &cfg, seed)
                .map_err(CliError::from)?;
            if let Some(curve_path) = curves {
                let mut csv = CsvArtifact::new(seed, &cfg, &[], "ray,t,norm");
                for (ray_id, fit) in report.fitted_rates.iter().enumerate() {
                    for &(t, norm) in &fit.samples {
                        csv.row(&[ray_id.to_string(), fmt_full(t), fmt_full(norm)]);
                    }
                }
                csv.write(curve_path)?;
            }
            write_json(
                out,
                &json!({
                    "provenance": provenance(seed, &cfg),
                    "report": serialize::stability(&report, &strong),
                }),
            )
        }
        Command::Rolewicz {
            input,
            cone,
            phi_power,
            out,
        } => {
            let tuple = load_tuple(input, &cfg)?;
            let cone = load_cone(cone)?;
            let phi = PhiFunction::Power { p: *phi_power };
            let probes = basis_probes(tuple.dim());
            let report = rolewicz_check(
                &tuple,
                &cone,
                &phi,
                &probes,
                &QuadratureConfig::default(),
                &cfg,
                seed,
            )
            .map_err(CliError::from)?;
            write_json(
                out,
                &json!({
                    "provenance": provenance(seed, &cfg),
                    "report": serialize::rolewicz(&report),
                }),
            )
        }
        Command::Cascade {
            input,
            v0,
            grid,
            t1_max,
            t2_max,
            cone,
            out,
        } => {
            let tuple = load_tuple(input, &cfg)?;
            let cone = load_cone(cone)?;
            let (n1, n2) = parse_grid(grid)?;
            let spec = GridSpec::new(n1, n2, *t1_max, *t2_max).map_err(CliError::from)?;
            let v0 = parse_v0(v0, tuple.dim())?;
            let sol = cascade_solve(&tuple, &v0, &spec, &cone, &cfg).map_err(CliError::from)?;
            let mut csv = CsvArtifact::new(
                seed,
                &cfg,
                &[
                    format!("fitted_m={}", fmt_full(sol.fitted_m)),
                    format!("fitted_omega={}", fmt_full(sol.fitted_omega)),
                ],
                "t1,t2,norm,in_cone",
            );
            for (i, &a) in sol.t1.iter().enumerate() {
                for (j, &b) in sol.t2.iter().enumerate() {
                    csv.row(&[
                        fmt_full(a),
                        fmt_full(b),
                        fmt_full(sol.norms[i][j]),
                        (sol.in_cone[i][j] as u8).to_string(),
                    ]);
                }
            }
            csv.write(out)
        }
        Command::Validate { input, psi } => {
            if input.is_none() && psi.is_none() {
                return Err(CliError::invalid(
                    "validate needs --in and/or --psi".to_string(),
                ));
            }
            if let Some(path) = input {
                let tuple = load_tuple(path, &cfg)?;
                // exercise the oracle so hidden degeneracies surface early
                joint_eigenvalues(&tuple, &cfg, seed).map_err(CliError::from)?;
            }
            if let Some(path) = psi {
                let data: BernsteinData = read_json(path)?;
                let report = bernstein::validate(&data, &ProbeGrid::default());
                if !report.passed {
                    let obj = serialize::validation_report(&report);
                    return Err(CliError::invalid(format!("invalid Bernstein data: {obj}")));
                }
            }
            Ok(())
        }
    }
}

fn parse_kinds(raw: &str) -> Result<Vec<SpectrumKind>, CliError> {
    if raw.trim() == "all" {
        return Ok(SpectrumKind::ALL.to_vec());
    }
    raw.split(',')
        .map(|s| SpectrumKind::parse(s.trim()).map_err(CliError::from))
        .collect()
}

fn parse_grid(raw: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = raw
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::parse(format!("grid must look like 20x20, got '{raw}'")))?;
    let n1 = a
        .trim()
        .parse()
        .map_err(|e| CliError::parse(format!("grid axis '{a}': {e}")))?;
    let n2 = b
        .trim()
        .parse()
        .map_err(|e| CliError::parse(format!("grid axis '{b}': {e}")))?;
    Ok((n1, n2))
}

fn parse_v0(raw: &str, d: usize) -> Result<Vec<Complex64>, CliError> {
    match raw.trim() {
        "ones" => Ok(vec![Complex64::new(1.0, 0.0); d]),
        "e1" => {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[0] = Complex64::new(1.0, 0.0);
            Ok(v)
        }
        list => {
            let values: Result<Vec<f64>, _> =
                list.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let values =
                values.map_err(|e| CliError::parse(format!("initial vector '{list}': {e}")))?;
            if values.len() != d {
                return Err(CliError::invalid(format!(
                    "initial vector has {} components, the space has {d}",
                    values.len()
                )));
            }
            Ok(values.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
        }
    }
}

/// Points as "re,im;re,im" per point, multiple points separated by ':'.
fn parse_points(raw: &str, n: usize) -> Result<Vec<Vec<Complex64>>, CliError> {
    raw.split(':')
        .map(|point| {
            let coords: Result<Vec<Complex64>, CliError> = point
                .split(';')
                .map(|pair| {
                    let (re, im) = pair.split_once(',').ok_or_else(|| {
                        CliError::parse(format!("coordinate must be re,im; got '{pair}'"))
                    })?;
                    let re = re
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::parse(format!("real part '{re}': {e}")))?;
                    let im = im
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::parse(format!("imaginary part '{im}': {e}")))?;
                    Ok(Complex64::new(re, im))
                })
                .collect();
            let coords = coords?;
            if coords.len() != n {
                return Err(CliError::invalid(format!(
                    "point has {} coordinates, tuple has {n}",
                    coords.len()
                )));
            }
            Ok(coords)
        })
        .collect()
}

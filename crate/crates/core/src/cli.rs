//! Command-line front end.
//!
//! Every subcommand reads its parameters from flags, then from an optional
//! flat `key = value` config file, then from defaults. Exit codes: 0 on
//! success, 1 on a numerical failure, 2 on a usage or configuration error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use crate::accuracy::{closed_form_predictive, closed_form_retrodictive, errors_povm};
use crate::coloring::{check_coloring, find_legal_coloring, ortho_structure, peres_rays, RaySet, SolveOutcome};
use crate::context::{
    contextuality_experiment, find_illegal_triad, AlignmentDistribution, AlignmentKind, ExperimentConfig,
    ExperimentSummary, ValuationStrategy,
};
use crate::error::Error;
use crate::matrix::{spectral_norm, Ket};
use crate::measure::povm::{matrix_rows, MatrixRows};
use crate::measure::{illegal_bound, second_order_povm, JointScheme};
use crate::spin1::{squared_projection, triad_from_angles};
use crate::tolerance;

/// Largest `|ψ|`, `|θ|` for which `povm` also reports the second-order
/// approximation.
pub const SMALL_ANGLE: f64 = 0.1;

#[derive(Parser, Debug)]
#[command(name = "spin1-ks", version, about = "Spin-1 approximate joint measurements and Kochen-Specker checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact POVM of the joint measurement of a triad, with its second-order approximation at small angles.
    Povm(PovmArgs),
    /// Retrodictive and predictive errors over a grid of triad angles.
    Errors(ErrorsArgs),
    /// Decide Kochen-Specker colourability of a ray set.
    KsCheck(KsArgs),
    /// Hidden-variable versus quantum illegal-combination experiment.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` config file; flags take precedence over it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct PovmArgs {
    #[command(flatten)]
    common: Common,
    /// ψ, radians.
    #[arg(long, allow_negative_numbers = true)]
    psi: Option<f64>,
    /// θ, radians.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// φ, radians.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// sequential or contemporaneous.
    #[arg(long)]
    model: Option<String>,
}

#[derive(Args, Debug)]
struct ErrorsArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated values used for both ψ and θ, radians.
    #[arg(long, allow_negative_numbers = true)]
    angles: Option<String>,
    /// Comma-separated φ values, radians.
    #[arg(long, allow_negative_numbers = true)]
    phis: Option<String>,
    /// sequential or contemporaneous.
    #[arg(long)]
    model: Option<String>,
}

#[derive(Args, Debug)]
struct KsArgs {
    #[command(flatten)]
    common: Common,
    /// Built-in ray set (`peres33`).
    #[arg(long)]
    set: Option<String>,
    /// Ray-set file: three reals per line, `#` comments.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// Orthogonality tolerance on |r·s|.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    /// rms angular alignment error, radians.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Samples per direction for the p(n) estimates.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// independent or correlated.
    #[arg(long)]
    mode: Option<String>,
    /// sequential or contemporaneous.
    #[arg(long)]
    model: Option<String>,
    /// Three comma-separated real amplitudes; normalized on input.
    #[arg(long, allow_negative_numbers = true)]
    state: Option<String>,
    /// Built-in ray set searched for an illegal triad (`peres33`).
    #[arg(long)]
    set: Option<String>,
    /// Ray-set file searched for an illegal triad.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let (name, result) = match cli.command {
        Command::Povm(a) => ("povm", cmd_povm(a, out)),
        Command::Errors(a) => ("errors", cmd_errors(a, out)),
        Command::KsCheck(a) => ("ks-check", cmd_ks_check(a, out)),
        Command::Experiment(a) => ("experiment", cmd_experiment(a, out)),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let mut cmd = Cli::command();
            let usage = cmd.find_subcommand_mut(name).map(|c| c.render_usage().to_string()).unwrap_or_default();
            let _ = writeln!(err, "error: {msg}\n\n{usage}");
            2
        }
        Err(CliError::Numeric(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

/// Values from a flat config file, consumed key by key so that leftovers
/// can be reported as unknown.
struct ConfigFile {
    values: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile { values: BTreeMap::new() });
        };
        let text = std::fs::read_to_string(path)
            .or_else(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return usage(format!("config line {}: expected `key = value`", n + 1));
            };
            let key = k.trim().replace('_', "-");
            if values.insert(key.clone(), (n + 1, v.trim().to_string())).is_some() {
                return usage(format!("config line {}: duplicate key {key:?}", n + 1));
            }
        }
        Ok(ConfigFile { values })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.remove(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .or_else(|e| usage(format!("config line {line}: invalid value for {key}: {e}"))),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        match self.values.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => usage(format!("config line {line}: unknown key {k:?}")),
        }
    }
}

fn merge<T: FromStr>(flag: Option<T>, file: &mut ConfigFile, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let from_file = file.take(key)?;
    Ok(flag.or(from_file))
}

fn parse_choice<T: FromStr<Err = Error>>(value: Option<String>, default: T) -> Result<T, CliError> {
    match value {
        None => Ok(default),
        Some(v) => v.parse().or_else(|e: Error| usage(e.to_string())),
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => usage(format!("{what} must be a comma-separated list of finite reals, got {s:?}")),
    }
}

fn finite(value: f64, name: &str) -> Result<f64, CliError> {
    if value.is_finite() {
        Ok(value)
    } else {
        usage(format!("--{name} must be finite"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Text,
}

fn parse_format(value: Option<String>, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = match value.as_deref() {
        None => default,
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some("text") => Format::Text,
        Some(other) => return usage(format!("unknown format {other:?}")),
    };
    if allowed.contains(&f) {
        Ok(f)
    } else {
        usage(format!("format {f:?} is not available for this command").to_lowercase())
    }
}

/// Common output settings after merging with the config file.
struct Sink {
    output: Option<PathBuf>,
}

impl Sink {
    fn emit(&self, out: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
        match &self.output {
            Some(path) => std::fs::write(path, bytes)
                .or_else(|e| usage(format!("cannot write {}: {e}", path.display()))),
            None => out.write_all(bytes).map_err(|e| CliError::Numeric(e.to_string())),
        }
    }
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

#[derive(Serialize)]
struct SecondOrder {
    elements: BTreeMap<String, MatrixRows>,
    deviations: BTreeMap<String, f64>,
    max_deviation: f64,
}

#[derive(Serialize)]
struct PovmOutput {
    psi: f64,
    theta: f64,
    phi: f64,
    model: &'static str,
    outcomes: Vec<String>,
    elements: BTreeMap<String, MatrixRows>,
    kraus: BTreeMap<String, MatrixRows>,
    completeness_defect: f64,
    illegal_bound: f64,
    second_order: Option<SecondOrder>,
}

#[derive(Serialize)]
struct PovmCsvRow {
    outcome: String,
    i: usize,
    j: usize,
    re: f64,
    im: f64,
    approx_re: Option<f64>,
    approx_im: Option<f64>,
    deviation: Option<f64>,
}

fn cmd_povm(a: PovmArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut file = ConfigFile::load(a.common.config.as_deref())?;
    let psi = merge(a.psi, &mut file, "psi")?;
    let theta = merge(a.theta, &mut file, "theta")?;
    let phi = merge(a.phi, &mut file, "phi")?;
    let model = merge(a.model, &mut file, "model")?;
    let format = merge(a.common.format, &mut file, "format")?;
    let output = merge(a.common.output, &mut file, "output")?;
    file.finish()?;

    let (Some(psi), Some(theta), Some(phi)) = (psi, theta, phi) else {
        return usage("povm needs --psi, --theta and --phi");
    };
    let (psi, theta, phi) = (finite(psi, "psi")?, finite(theta, "theta")?, finite(phi, "phi")?);
    let scheme = parse_choice(model, JointScheme::Sequential)?;
    let format = parse_format(format, Format::Json, &[Format::Json, Format::Csv])?;

    let povm = scheme.model(&triad_from_angles(psi, theta, phi)).povm();
    if !povm.is_valid(tolerance::POVM) {
        return Err(CliError::Numeric(format!("POVM check failed (defect {:e})", povm.completeness_defect())));
    }
    let labels = povm.labels();
    let approx = (psi.abs().max(theta.abs()) <= SMALL_ANGLE).then(|| second_order_povm(psi, theta, phi));
    let deviations: Option<Vec<f64>> =
        approx.as_ref().map(|ap| povm.elements().iter().zip(ap).map(|(e, x)| spectral_norm(&(e - x))).collect());

    let bytes = match format {
        Format::Csv => {
            let mut rows = Vec::new();
            for (k, e) in povm.elements().iter().enumerate() {
                for i in 0..3 {
                    for j in 0..3 {
                        let x = approx.as_ref().map(|ap| ap[k][(i, j)]);
                        rows.push(PovmCsvRow {
                            outcome: labels[k].clone(),
                            i,
                            j,
                            re: e[(i, j)].re,
                            im: e[(i, j)].im,
                            approx_re: x.map(|z| z.re),
                            approx_im: x.map(|z| z.im),
                            deviation: deviations.as_ref().map(|d| d[k]),
                        });
                    }
                }
            }
            csv_bytes(&rows)?
        }
        _ => {
            let doc = povm.to_document();
            let second_order = approx.as_ref().zip(deviations.as_ref()).map(|(ap, dev)| SecondOrder {
                elements: labels.iter().cloned().zip(ap.iter().map(matrix_rows)).collect(),
                deviations: labels.iter().cloned().zip(dev.iter().copied()).collect(),
                max_deviation: dev.iter().copied().fold(0.0, f64::max),
            });
            json_bytes(&PovmOutput {
                psi,
                theta,
                phi,
                model: scheme.name(),
                outcomes: labels.clone(),
                elements: doc.elements,
                kraus: doc.kraus,
                completeness_defect: povm.completeness_defect(),
                illegal_bound: illegal_bound(&povm),
                second_order,
            })
        }
    };
    Sink { output }.emit(out, &bytes)
}

#[derive(Serialize)]
struct ErrorsCsvRow {
    psi: f64,
    theta: f64,
    phi: f64,
    r: usize,
    delta_ei: f64,
    delta_ef: f64,
    closed_ei: f64,
    closed_ef: f64,
    rel_dev_ei: Option<f64>,
    rel_dev_ef: Option<f64>,
}

fn relative_deviation(value: f64, reference: f64) -> Option<f64> {
    (reference != 0.0).then(|| (value - reference) / reference)
}

const DEFAULT_ANGLES: &str = "0.03,0.01,0.003";
const DEFAULT_PHIS: &str = "0,0.7853981633974483,1.5707963267948966,2";

fn cmd_errors(a: ErrorsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut file = ConfigFile::load(a.common.config.as_deref())?;
    let angles = merge(a.angles, &mut file, "angles")?;
    let phis = merge(a.phis, &mut file, "phis")?;
    let model = merge(a.model, &mut file, "model")?;
    let format = merge(a.common.format, &mut file, "format")?;
    let output = merge(a.common.output, &mut file, "output")?;
    file.finish()?;

    let angles = parse_list(angles.as_deref().unwrap_or(DEFAULT_ANGLES), "--angles")?;
    let phis = parse_list(phis.as_deref().unwrap_or(DEFAULT_PHIS), "--phis")?;
    let scheme = parse_choice(model, JointScheme::Sequential)?;
    let format = parse_format(format, Format::Csv, &[Format::Csv, Format::Json])?;

    let mut rows = Vec::new();
    for &eps in &angles {
        for &phi in &phis {
            let t = triad_from_angles(eps, eps, phi);
            let povm = scheme.model(&t).povm();
            for r in 0..3 {
                let e = errors_povm(&povm, r, &squared_projection(t.axis(r))?)?;
                let closed_ei = closed_form_retrodictive(r, eps, eps, phi);
                let closed_ef = closed_form_predictive(r, eps, eps, phi);
                rows.push(ErrorsCsvRow {
                    psi: eps,
                    theta: eps,
                    phi,
                    r: r + 1,
                    delta_ei: e.retrodictive,
                    delta_ef: e.predictive,
                    closed_ei,
                    closed_ef,
                    rel_dev_ei: relative_deviation(e.retrodictive, closed_ei),
                    rel_dev_ef: relative_deviation(e.predictive, closed_ef),
                });
            }
        }
    }
    let bytes = match format {
        Format::Json => json_bytes(&rows),
        _ => csv_bytes(&rows)?,
    };
    Sink { output }.emit(out, &bytes)
}

fn load_rays(set: Option<&str>, file: Option<&Path>) -> Result<(String, RaySet), CliError> {
    match (set, file) {
        (Some(_), Some(_)) => usage("give either --set or --file, not both"),
        (Some("peres33"), None) | (None, None) => Ok(("peres33".into(), peres_rays())),
        (Some(other), None) => usage(format!("unknown built-in set {other:?} (available: peres33)")),
        (None, Some(path)) => {
            let rs = RaySet::load(path).or_else(|e| usage(format!("{}: {e}", path.display())))?;
            Ok((path.display().to_string(), rs))
        }
    }
}

#[derive(Serialize)]
struct KsOutput {
    set: String,
    rays: usize,
    pairs: usize,
    triads: usize,
    satisfiable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    coloring: Option<Vec<ColoredRay>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conflicts: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decisions: Option<u64>,
}

#[derive(Serialize)]
struct ColoredRay {
    label: String,
    value: u8,
}

fn cmd_ks_check(a: KsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut file = ConfigFile::load(a.common.config.as_deref())?;
    let set = merge(a.set, &mut file, "set")?;
    let path = merge(a.file, &mut file, "file")?;
    let tol = merge(a.tol, &mut file, "tol")?.unwrap_or(tolerance::ORTHOGONAL);
    let format = merge(a.common.format, &mut file, "format")?;
    let output = merge(a.common.output, &mut file, "output")?;
    file.finish()?;

    if !(tol >= 0.0 && tol.is_finite()) {
        return usage("--tol must be finite and >= 0");
    }
    let format = parse_format(format, Format::Text, &[Format::Text, Format::Json])?;
    let (name, rays) = load_rays(set.as_deref(), path.as_deref())?;
    let os = ortho_structure(&rays, tol);
    let outcome = find_legal_coloring(&os, rays.len());
    let mut report = KsOutput {
        set: name,
        rays: rays.len(),
        pairs: os.pairs.len(),
        triads: os.triads.len(),
        satisfiable: outcome.is_colorable(),
        coloring: None,
        conflicts: None,
        decisions: None,
    };
    match outcome {
        SolveOutcome::Colorable(c) => {
            if !check_coloring(&os, &c)?.is_empty() {
                return Err(CliError::Numeric("solver returned an invalid colouring".into()));
            }
            report.coloring = Some(
                (0..rays.len())
                    .map(|i| ColoredRay { label: rays.label(i).to_string(), value: c.value(i).unwrap_or(0) })
                    .collect(),
            );
        }
        SolveOutcome::Unsatisfiable(cert) => {
            report.conflicts = Some(cert.conflicts);
            report.decisions = Some(cert.decisions);
        }
    }
    let bytes = match format {
        Format::Json => json_bytes(&report),
        _ => {
            let mut s = format!(
                "set: {}\nrays: {}\npairs: {}\ntriads: {}\n",
                report.set, report.rays, report.pairs, report.triads
            );
            if let Some(colors) = &report.coloring {
                s.push_str("result: SAT\n");
                for (i, c) in colors.iter().enumerate() {
                    s.push_str(&format!("{i}\t{}\t{}\n", c.label, c.value));
                }
            } else {
                s.push_str(&format!(
                    "result: UNSAT\nconflicts: {}\ndecisions: {}\n",
                    report.conflicts.unwrap_or(0),
                    report.decisions.unwrap_or(0)
                ));
            }
            s.into_bytes()
        }
    };
    Sink { output }.emit(out, &bytes)
}

#[derive(Serialize)]
struct SearchResult {
    set: String,
    labels: [String; 3],
    combination: String,
    completed_pair: bool,
}

#[derive(Serialize)]
struct ExperimentOutput {
    illegal_triad: Option<SearchResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<ExperimentSummary>,
}

fn parse_state(s: Option<&str>) -> Result<Ket, CliError> {
    let Some(s) = s else {
        return Ok(Ket::from_real(&[1.0, 1.0, 1.0]).normalized());
    };
    let v = parse_list(s, "--state")?;
    if v.len() != 3 || v.iter().all(|x| *x == 0.0) {
        return usage("--state needs three real amplitudes, not all zero");
    }
    Ok(Ket::from_real(&v).normalized())
}

fn cmd_experiment(a: ExperimentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut file = ConfigFile::load(a.common.config.as_deref())?;
    let sigma = merge(a.sigma, &mut file, "sigma")?.unwrap_or(0.01);
    let trials = merge(a.trials, &mut file, "trials")?.unwrap_or(10_000);
    let samples = merge(a.samples, &mut file, "samples")?.unwrap_or(20_000);
    let seed = merge(a.seed, &mut file, "seed")?.unwrap_or(1);
    let mode = merge(a.mode, &mut file, "mode")?;
    let model = merge(a.model, &mut file, "model")?;
    let state = merge(a.state, &mut file, "state")?;
    let set = merge(a.set, &mut file, "set")?;
    let path = merge(a.file, &mut file, "file")?;
    let format = merge(a.common.format, &mut file, "format")?;
    let output = merge(a.common.output, &mut file, "output")?;
    file.finish()?;

    if trials == 0 {
        return usage("--trials must be >= 1");
    }
    if samples == 0 {
        return usage("--samples must be >= 1");
    }
    let kind = parse_choice(mode, AlignmentKind::Independent)?;
    let d = AlignmentDistribution::new(kind, sigma, seed).or_else(|e| usage(e.to_string()))?;
    let scheme = parse_choice(model, JointScheme::Sequential)?;
    let psi = parse_state(state.as_deref())?;
    let format = parse_format(format, Format::Csv, &[Format::Csv, Format::Json])?;
    let (set_name, rays) = load_rays(set.as_deref(), path.as_deref())?;

    let f = ValuationStrategy::default();
    let Some(found) = find_illegal_triad(&f, &d, &rays, samples)? else {
        return Sink { output: None }
            .emit(out, &json_bytes(&ExperimentOutput { illegal_triad: None, summary: None }));
    };
    let cfg = ExperimentConfig { trials, samples, scheme };
    let report = contextuality_experiment(&found.triad, &f, &d, &psi, &cfg)?;

    if let Some(path) = &output {
        let bytes = match format {
            Format::Json => json_bytes(&report.rows),
            _ => csv_bytes(&report.rows)?,
        };
        Sink { output: Some(path.clone()) }.emit(out, &bytes)?;
    }
    let summary = ExperimentOutput {
        illegal_triad: Some(SearchResult {
            set: set_name,
            combination: found.combination(),
            completed_pair: found.rays[2].is_none(),
            labels: found.labels,
        }),
        summary: Some(report.summary),
    };
    Sink { output: None }.emit(out, &json_bytes(&summary))
}

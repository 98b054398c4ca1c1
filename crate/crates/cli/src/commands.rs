//! Subcommand implementations. Each returns whether every check passed;
//! errors carry their exit code.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use weakval_core::contextuality::{parity_obstruction, verify_table, ContextTable, TableReport};
use weakval_core::scenarios::{
    ghz_table, mermin_square_table, run_scenario, scenario, Scenario, ScenarioReport,
    SCENARIO_NAMES,
};
use weakval_core::weakmeas::{
    exact_pointer_distribution, weak_value_estimate, PointerConfig, PointerDistribution,
    PointerSampler, WeakValueEstimate,
};
use weakval_core::{pps, Error};

use crate::output::{write_exact_csv, write_json, write_report_csv, write_sampled_csv};
use crate::table::{parse_table, ParseError};
use crate::parallel;

pub const TABLE_NAMES: [&str; 2] = ["mermin_square", "ghz"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Numerical(Error),
    #[error("{0}")]
    Check(Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::GridRange { .. }
            | Error::ZeroCoupling
            | Error::NoSamples
            | Error::InvalidPointerConfig(_) => CliError::Numerical(e),
            Error::UnknownObservable(_) => CliError::Usage(e.to_string()),
            e => CliError::Check(e),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".to_string(),
        source,
    }
}

fn unsupported(cmd: &str, format: Format) -> CliError {
    CliError::Usage(format!("`{cmd}` does not support --format {format:?}").to_lowercase())
}

fn lookup_scenario(name: &str) -> Result<Scenario, CliError> {
    scenario(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown scenario `{name}`; expected one of {}",
            SCENARIO_NAMES.join(", ")
        ))
    })
}

/// Writes to `path` when given, else to `stdout`.
fn emit(
    output: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            let mut w = BufWriter::new(file);
            body(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
        }
        None => body(stdout).map_err(stdout_err),
    }
}

pub fn cmd_scenario(
    name: &str,
    format: Option<Format>,
    output: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<bool, CliError> {
    let s = lookup_scenario(name)?;
    let report = run_scenario(&s)?;
    match format.unwrap_or(Format::Json) {
        Format::Json => emit(output, stdout, |w| write_json(&mut *w, &report))?,
        Format::Csv => emit(output, stdout, |w| write_report_csv(&mut *w, &report))?,
        Format::Text => emit(output, stdout, |w| write_report_text(w, &report))?,
    }
    Ok(report.overall)
}

fn write_report_text(w: &mut dyn Write, report: &ScenarioReport) -> io::Result<()> {
    writeln!(w, "scenario {}", report.scenario)?;
    for e in &report.entries {
        let computed = e.computed.map_or("none".to_string(), |c| format!("{c:.12}"));
        writeln!(
            w,
            "  {} {:<10} {:<40} expected {:>8} computed {:>16}",
            if e.pass { "PASS" } else { "FAIL" },
            e.kind,
            e.target,
            e.expected,
            computed
        )?;
    }
    writeln!(w, "overall: {}", if report.overall { "pass" } else { "fail" })
}

#[derive(Debug, Serialize)]
struct Listing {
    scenarios: Vec<ScenarioListing>,
    tables: Vec<&'static str>,
}

#[derive(Debug, Serialize)]
struct ScenarioListing {
    name: String,
    dim: usize,
    observables: Vec<String>,
}

pub fn cmd_list(format: Option<Format>, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let listing = Listing {
        scenarios: SCENARIO_NAMES
            .iter()
            .map(|n| {
                let s = lookup_scenario(n).expect("registered scenario");
                ScenarioListing {
                    name: s.name.clone(),
                    dim: s.pps.dim(),
                    observables: s.observables.iter().map(|o| o.name().to_string()).collect(),
                }
            })
            .collect(),
        tables: TABLE_NAMES.to_vec(),
    };
    match format.unwrap_or(Format::Text) {
        Format::Json => write_json(stdout, &listing).map_err(stdout_err)?,
        Format::Text => {
            let mut text = String::from("scenarios:\n");
            for s in &listing.scenarios {
                text += &format!("  {} (dim {}): {}\n", s.name, s.dim, s.observables.join(" "));
            }
            text += &format!("tables: {}\n", listing.tables.join(" "));
            stdout.write_all(text.as_bytes()).map_err(stdout_err)?;
        }
        f @ Format::Csv => return Err(unsupported("list", f)),
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct WeakmeasArgs {
    pub scenario: String,
    pub observable: String,
    pub lambda: f64,
    pub samples: usize,
    pub seed: u64,
    pub grid_points: Option<usize>,
    pub grid_halfwidth: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakmeasSummary {
    pub scenario: String,
    pub observable: String,
    pub seed: u64,
    pub pointer: PointerConfig,
    pub weak_value_re: f64,
    pub weak_value_im: f64,
    /// Exact pointer mean divided by `λ`; `null` at `λ = 0`.
    pub exact_mean_over_lambda: Option<f64>,
    pub post_selection_probability: f64,
    pub estimate: Option<WeakValueEstimate>,
}

/// Explicit grid flags are used as given. Without them the default grid is
/// widened just enough to hold every pointer peak.
fn pointer_config(args: &WeakmeasArgs, max_abs_eigenvalue: f64) -> PointerConfig {
    let mut cfg = PointerConfig::new(args.lambda);
    if args.grid_points.is_none() && args.grid_halfwidth.is_none() {
        if exceeds_default_grid(&cfg, max_abs_eigenvalue) {
            cfg = PointerConfig::covering(args.lambda, cfg.spread, max_abs_eigenvalue);
        }
        return cfg;
    }
    if let Some(points) = args.grid_points {
        cfg.points = points;
    }
    if let Some(half_width) = args.grid_halfwidth {
        cfg.half_width = half_width;
    }
    cfg
}

fn exceeds_default_grid(cfg: &PointerConfig, max_abs_eigenvalue: f64) -> bool {
    (cfg.lambda * max_abs_eigenvalue).abs() + 6.0 * cfg.spread > cfg.half_width
}

pub struct WeakmeasRun {
    pub summary: WeakmeasSummary,
    pub exact: PointerDistribution,
    pub counts: Option<Vec<u64>>,
}

pub fn run_weakmeas(args: &WeakmeasArgs) -> Result<WeakmeasRun, CliError> {
    let s = lookup_scenario(&args.scenario)?;
    let obs = s.observable(&args.observable).ok_or_else(|| {
        let names: Vec<&str> = s.observables.iter().map(|o| o.name()).collect();
        CliError::Usage(format!(
            "scenario `{}` has no observable `{}`; expected one of {}",
            s.name,
            args.observable,
            names.join(", ")
        ))
    })?;
    if !args.lambda.is_finite() {
        return Err(CliError::Numerical(Error::InvalidPointerConfig("coupling must be finite")));
    }
    if args.samples > 0 && args.lambda == 0.0 {
        return Err(CliError::Numerical(Error::ZeroCoupling));
    }
    let cfg = pointer_config(args, obs.max_abs_eigenvalue());
    let exact = exact_pointer_distribution(&s.pps, obs, &cfg)?;
    let wv = pps::weak_value(&s.pps, obs.op())?;
    let (counts, estimate) = if args.samples > 0 {
        let samples = parallel::sample(&PointerSampler::new(&exact), args.samples, args.seed);
        let estimate = weak_value_estimate(&samples, cfg.lambda, cfg.spread)?;
        (Some(exact.bin_counts(&samples)), Some(estimate))
    } else {
        (None, None)
    };
    let summary = WeakmeasSummary {
        scenario: s.name.clone(),
        observable: obs.name().to_string(),
        seed: args.seed,
        pointer: cfg,
        weak_value_re: wv.re(),
        weak_value_im: wv.im(),
        exact_mean_over_lambda: (cfg.lambda != 0.0).then(|| exact.mean() / cfg.lambda),
        post_selection_probability: exact.post_selection_probability,
        estimate,
    };
    Ok(WeakmeasRun {
        summary,
        exact,
        counts,
    })
}

/// With `--output DIR`, writes `exact.csv`, `sampled.csv` (when sampling)
/// and `summary.json` there and echoes the summary. Without it, prints the
/// exact histogram CSV, or the summary with `--format json`.
pub fn cmd_weakmeas(args: &WeakmeasArgs, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let format = args.format.unwrap_or(Format::Csv);
    if format == Format::Text {
        return Err(unsupported("weakmeas", format));
    }
    let run = run_weakmeas(args)?;
    match &args.output {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            let exact_path = dir.join("exact.csv");
            emit(Some(&exact_path), stdout, |w| write_exact_csv(w, &run.exact))?;
            if let Some(counts) = &run.counts {
                let sampled_path = dir.join("sampled.csv");
                emit(Some(&sampled_path), stdout, |w| {
                    write_sampled_csv(w, &run.exact.grid, counts)
                })?;
            }
            let summary_path = dir.join("summary.json");
            emit(Some(&summary_path), stdout, |w| write_json(w, &run.summary))?;
            write_json(stdout, &run.summary).map_err(stdout_err)?;
        }
        None if format == Format::Json => write_json(stdout, &run.summary).map_err(stdout_err)?,
        None => write_exact_csv(stdout, &run.exact).map_err(stdout_err)?,
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvtReport {
    pub table: String,
    pub observables: usize,
    pub contexts: usize,
    pub verify: Option<TableReport>,
    pub verify_error: Option<String>,
    pub assignments: usize,
    pub space: u64,
    /// Context labels of the parity certificate, if one exists.
    pub certificate: Option<Vec<String>>,
    /// Up to the first 16 satisfying assignments, in search order.
    pub examples: Vec<std::collections::BTreeMap<String, i8>>,
}

pub fn load_table(source: &str) -> Result<(String, ContextTable), CliError> {
    let path = Path::new(source);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        return Ok((source.to_string(), parse_table(&text)?));
    }
    match source {
        "mermin_square" => Ok((source.to_string(), mermin_square_table())),
        "ghz" => Ok((source.to_string(), ghz_table())),
        _ => Err(CliError::Usage(format!(
            "`{source}` is neither a table file nor a built-in table ({})",
            TABLE_NAMES.join(", ")
        ))),
    }
}

pub fn run_hvt(source: &str) -> Result<HvtReport, CliError> {
    let (name, table) = load_table(source)?;
    let (verify, verify_error) = match verify_table(&table) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let found = parallel::search(&table)?;
    let certificate = parity_obstruction(&table)
        .map(|c| c.contexts.iter().map(|&i| table.context_label(i)).collect());
    Ok(HvtReport {
        table: name,
        observables: table.observables().len(),
        contexts: table.contexts().len(),
        verify,
        verify_error,
        assignments: found.len(),
        space: table.assignment_space(),
        certificate,
        examples: found.into_iter().take(16).map(|a| a.values).collect(),
    })
}

/// Exit status fails only when the table's operator identities do not hold.
pub fn cmd_hvt(
    source: &str,
    format: Option<Format>,
    output: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<bool, CliError> {
    let report = run_hvt(source)?;
    match format.unwrap_or(Format::Text) {
        Format::Json => emit(output, stdout, |w| write_json(&mut *w, &report))?,
        Format::Text => emit(output, stdout, |w| write_hvt_text(w, &report))?,
        f @ Format::Csv => return Err(unsupported("hvt", f)),
    }
    Ok(report.verify_error.is_none())
}

fn write_hvt_text(w: &mut dyn Write, r: &HvtReport) -> io::Result<()> {
    writeln!(w, "table {} ({} observables, {} contexts)", r.table, r.observables, r.contexts)?;
    match (&r.verify, &r.verify_error) {
        (Some(v), _) => {
            let kind = if v.state_dependent { "state-dependent" } else { "operator" };
            writeln!(w, "verify ({kind} identities): max residual {:.3e}", v.max_residual())?;
            for c in &v.contexts {
                writeln!(
                    w,
                    "  {:<28} commutator {:.3e}  product {:.3e}",
                    c.label, c.commutator, c.product
                )?;
            }
        }
        (None, Some(e)) => writeln!(w, "verify FAILED: {e}")?,
        (None, None) => {}
    }
    let cert = match &r.certificate {
        Some(c) => format!("certificate: {} contexts", c.len()),
        None => "certificate: none".to_string(),
    };
    writeln!(w, "{} assignments / {}; {cert}", r.assignments, r.space)?;
    if let Some(c) = &r.certificate {
        for label in c {
            writeln!(w, "  {label}")?;
        }
    }
    for a in &r.examples {
        let values: Vec<String> = a.iter().map(|(k, v)| format!("{k}={v:+}")).collect();
        writeln!(w, "  assignment {}", values.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(scenario: &str, observable: &str, lambda: f64, samples: usize) -> WeakmeasArgs {
        WeakmeasArgs {
            scenario: scenario.to_string(),
            observable: observable.to_string(),
            lambda,
            samples,
            seed: 0,
            grid_points: None,
            grid_halfwidth: None,
            output: None,
            format: None,
        }
    }

    #[test]
    fn strong_coupling_widens_default_grid() {
        let run = run_weakmeas(&args("three_box", "P_C", 50.0, 0)).unwrap();
        assert!(run.summary.pointer.half_width >= 56.0);
        let peak = run.exact.mass_between(46.0, 54.0);
        assert!((peak - 0.2).abs() < 1e-6, "{peak}");
    }

    #[test]
    fn explicit_grid_is_respected() {
        let mut a = args("three_box", "P_C", 50.0, 0);
        a.grid_halfwidth = Some(10.0);
        let e = run_weakmeas(&a).err().unwrap();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_weakmeas(&args("three_box", "P_C", 0.0, 10)).err().unwrap().exit_code(), 3);
        assert_eq!(run_weakmeas(&args("nope", "P_C", 0.1, 0)).err().unwrap().exit_code(), 2);
        assert_eq!(run_weakmeas(&args("three_box", "P_Z", 0.1, 0)).err().unwrap().exit_code(), 2);
        assert_eq!(run_hvt("no_such_table").err().unwrap().exit_code(), 2);
    }

    #[test]
    fn zero_coupling_without_samples_is_allowed() {
        let run = run_weakmeas(&args("three_box", "P_C", 0.0, 0)).unwrap();
        assert_eq!(run.summary.exact_mean_over_lambda, None);
    }

    #[test]
    fn hvt_builtin_mermin() {
        let r = run_hvt("mermin_square").unwrap();
        assert_eq!((r.assignments, r.space), (0, 512));
        assert_eq!(r.certificate.unwrap().len(), 6);
    }
}

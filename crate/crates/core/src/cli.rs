//! Command-line front end: argument and config parsing, scans, output.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::evolve::{linear_grid, moments_from_tridiag, renyi2_dense, renyi2_tridiag, scan, survival_moments_nn};
use crate::lintri::Propagator;
use crate::models::{analytic_lanczos, KrylovSpec, ModelKind, ModelSpec, MAX_REDUCED_LENGTH};
use crate::output::{evolve_table, Cell, Table};
use crate::verify::{CoefficientSource, Level, Verifier};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "deco-krylov", version, about = "Krylov complexity of decohered Ising chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lanczos coefficients a_n, b_n
    Coeffs(RunArgs),
    /// Krylov complexity and Rényi-2 correlator over a tau grid
    Evolve(RunArgs),
    /// Wavepacket amplitudes psi_n at explicit tau values
    Wavepacket(RunArgs),
    /// Rényi-2 correlator over a tau grid
    Renyi2(RunArgs),
    /// Survival-amplitude moments
    Moments(RunArgs),
    /// Oracle and acceptance checks
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliModel {
    Nn,
    Ir,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    model: Option<CliModel>,
    /// Comma-separated chain lengths
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    /// Inclusive linear grid start:stop:count
    #[arg(long, conflicts_with = "tau_list")]
    tau: Option<String>,
    /// Comma-separated tau values
    #[arg(long, value_delimiter = ',')]
    tau_list: Option<Vec<f64>>,
    /// Highest moment order
    #[arg(long)]
    n_max: Option<usize>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads, default: available parallelism
    #[arg(long)]
    threads: Option<usize>,
    /// Flat JSON object with the same fields; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    level: CliLevel,
    #[arg(long)]
    threads: Option<usize>,
    /// Test fixture: scale b_INDEX by FACTOR, given as INDEX:FACTOR
    #[arg(long, hide = true)]
    tamper_b: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliLevel {
    Quick,
    Full,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<String>,
    pub lengths: Option<Vec<usize>>,
    pub tau: Option<String>,
    pub tau_list: Option<Vec<f64>>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Observable {
    Coeffs,
    Complexity,
    Wavepacket,
    Renyi2,
    Moments,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: ModelKind,
    pub lengths: Vec<usize>,
    pub taus: Vec<f64>,
    pub n_max: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

/// Failure that maps to an exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_INVALID, message: e.to_string() }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INVALID, message: format!("invalid {field}: {msg}") }
}

fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid("tau", format!("{s:?} is not start:stop:count")));
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| invalid("tau", format!("bad start {:?}", parts[0])))?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| invalid("tau", format!("bad stop {:?}", parts[1])))?;
    let count: usize = parts[2].trim().parse().map_err(|_| invalid("tau", format!("bad count {:?}", parts[2])))?;
    linear_grid(start, stop, count).map_err(|_| invalid("tau", "need start >= 0, stop >= start, count >= 1"))
}

fn read_config(path: &Path) -> std::result::Result<ConfigFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid("config", format!("{}: {e}", path.display())))
}

fn default_lengths(kind: ModelKind, obs: Observable) -> Vec<usize> {
    match (obs, kind) {
        (Observable::Renyi2, _) => vec![8, 10, 12, 14],
        (Observable::Moments, _) | (Observable::Coeffs, _) => vec![10],
        (_, ModelKind::NN) => vec![20, 100],
        (_, ModelKind::IR) => vec![100, 200, 500],
    }
}

fn default_taus(kind: ModelKind) -> Vec<f64> {
    match kind {
        ModelKind::NN => linear_grid(0.0, 3.0, 301).expect("static grid"),
        ModelKind::IR => {
            let mut g = linear_grid(0.0, 2.0, 401).expect("static grid");
            g.extend([5.0, 10.0]);
            g
        }
    }
}

fn resolve(args: RunArgs, obs: Observable) -> std::result::Result<RunConfig, Failure> {
    let file = match &args.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    let kind = match (args.model, file.model) {
        (Some(CliModel::Nn), _) => ModelKind::NN,
        (Some(CliModel::Ir), _) => ModelKind::IR,
        (None, Some(s)) => s.parse().map_err(|e: Error| invalid("model", e))?,
        (None, None) => return Err(invalid("model", "missing, pass --model nn|ir")),
    };
    let lengths = args.lengths.or(file.lengths).unwrap_or_else(|| default_lengths(kind, obs));
    if lengths.is_empty() {
        return Err(invalid("lengths", "empty list"));
    }
    for &l in &lengths {
        ModelSpec::new(kind, l)?;
    }
    if obs == Observable::Renyi2 && kind == ModelKind::NN {
        if let Some(&l) = lengths.iter().find(|&&l| l > MAX_REDUCED_LENGTH) {
            return Err(invalid("lengths", format!("NN Rényi-2 needs L <= {MAX_REDUCED_LENGTH}, got {l}")));
        }
    }
    let flag_taus = match (args.tau, args.tau_list) {
        (Some(g), _) => Some(parse_grid(&g)?),
        (None, Some(list)) => Some(list),
        (None, None) => None,
    };
    let file_taus = match (file.tau, file.tau_list) {
        (Some(_), Some(_)) => return Err(invalid("config", "give either tau or tau_list")),
        (Some(g), None) => Some(parse_grid(&g)?),
        (None, list) => list,
    };
    let taus = match flag_taus.or(file_taus) {
        Some(t) => t,
        None if obs == Observable::Wavepacket => return Err(invalid("tau", "wavepacket needs explicit --tau-list or --tau")),
        None => default_taus(kind),
    };
    if taus.is_empty() {
        return Err(invalid("tau", "empty list"));
    }
    if let Some(t) = taus.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(invalid("tau", format!("{t} is not a nonnegative number")));
    }
    let n_max = args.n_max.or(file.n_max).unwrap_or(10);
    let threads = args.threads.or(file.threads);
    if threads == Some(0) {
        return Err(invalid("threads", "must be at least 1"));
    }
    Ok(RunConfig {
        kind,
        lengths,
        taus,
        n_max,
        out: args.out.or(file.out),
        format: args.format.or(file.format).unwrap_or(Format::Csv),
        threads,
    })
}

fn specs(cfg: &RunConfig) -> Result<Vec<KrylovSpec>> {
    let mut lengths = cfg.lengths.clone();
    lengths.sort_unstable();
    lengths.dedup();
    lengths.iter().map(|&l| analytic_lanczos(&ModelSpec::new(cfg.kind, l)?)).collect()
}

fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> std::result::Result<R, Failure> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| invalid("threads", e))?;
    Ok(pool.install(f))
}

pub fn coeffs_table(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(vec!["model", "L", "n", "a_n", "b_n"]);
    for spec in specs(cfg)? {
        let tri = &spec.tridiag;
        for n in 0..tri.dim() {
            let b = if n == 0 { Cell::Empty } else { Cell::Num(tri.offdiag()[n - 1]) };
            t.push(vec![
                Cell::Text(cfg.kind.to_string()),
                Cell::Int(spec.model.length()),
                Cell::Int(n),
                Cell::Num(tri.diag()[n]),
                b,
            ]);
        }
    }
    Ok(t)
}

pub fn evolve_rows(cfg: &RunConfig) -> Result<Table> {
    Ok(evolve_table(&scan(&specs(cfg)?, &cfg.taus)?))
}

pub fn wavepacket_table(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(vec!["model", "L", "tau", "n", "psi", "psi2"]);
    for spec in specs(cfg)? {
        let prop = Propagator::new(&spec.tridiag)?;
        for &tau in &cfg.taus {
            let s = prop.propagate(tau)?;
            for (n, &p) in s.psi.iter().enumerate() {
                t.push(vec![
                    Cell::Text(cfg.kind.to_string()),
                    Cell::Int(spec.model.length()),
                    Cell::Num(tau),
                    Cell::Int(n),
                    Cell::Num(p),
                    Cell::Num(p * p),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn renyi2_table(cfg: &RunConfig) -> Result<Table> {
    use rayon::prelude::*;
    let mut t = Table::new(vec!["model", "L", "tau", "chi"]);
    for spec in specs(cfg)? {
        let chis: Vec<f64> = match cfg.kind {
            ModelKind::NN => cfg.taus.par_iter().map(|&tau| renyi2_dense(&spec.model, tau)).collect::<Result<_>>()?,
            ModelKind::IR => {
                let prop = Propagator::new(&spec.tridiag)?;
                cfg.taus
                    .par_iter()
                    .map(|&tau| renyi2_tridiag(&spec, &prop.propagate(tau)?))
                    .collect::<Result<_>>()?
            }
        };
        for (&tau, chi) in cfg.taus.iter().zip(chis) {
            t.push(vec![Cell::Text(cfg.kind.to_string()), Cell::Int(spec.model.length()), Cell::Num(tau), Cell::Num(chi)]);
        }
    }
    Ok(t)
}

pub fn moments_table(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(vec!["model", "L", "n", "mu_tridiag", "mu_exact"]);
    for spec in specs(cfg)? {
        let tri = moments_from_tridiag(&spec.tridiag, cfg.n_max)?;
        let exact = match cfg.kind {
            ModelKind::NN => Some(survival_moments_nn(spec.model.length(), cfg.n_max)?),
            ModelKind::IR => None,
        };
        for (n, &m) in tri.iter().enumerate() {
            t.push(vec![
                Cell::Text(cfg.kind.to_string()),
                Cell::Int(spec.model.length()),
                Cell::Int(n),
                Cell::Num(m),
                exact.as_ref().map(|e| e[n]).into(),
            ]);
        }
    }
    Ok(t)
}

// a closed stdout (e.g. piped into head) is not an error worth a panic
fn say(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(table: &Table, cfg: &RunConfig) -> std::result::Result<(), Failure> {
    let text = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure { code: EXIT_INVALID, message: format!("cannot write {}: {e}", p.display()) }),
        None => {
            say(&text);
            Ok(())
        }
    }
}

fn run_observable(args: RunArgs, obs: Observable) -> std::result::Result<i32, Failure> {
    let cfg = resolve(args, obs)?;
    let table = with_pool(cfg.threads, || match obs {
        Observable::Coeffs => coeffs_table(&cfg),
        Observable::Complexity => evolve_rows(&cfg),
        Observable::Wavepacket => wavepacket_table(&cfg),
        Observable::Renyi2 => renyi2_table(&cfg),
        Observable::Moments => moments_table(&cfg),
    })??;
    emit(&table, &cfg)?;
    Ok(EXIT_OK)
}

fn parse_tamper(s: &str) -> std::result::Result<CoefficientSource, Failure> {
    let (i, f) = s.split_once(':').ok_or_else(|| invalid("tamper-b", "expected INDEX:FACTOR"))?;
    let index = i.parse().map_err(|_| invalid("tamper-b", format!("bad index {i:?}")))?;
    let factor: f64 = f.parse().map_err(|_| invalid("tamper-b", format!("bad factor {f:?}")))?;
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(invalid("tamper-b", "factor must be positive"));
    }
    Ok(CoefficientSource::Tampered { index, factor })
}

fn run_verify(args: VerifyArgs) -> std::result::Result<i32, Failure> {
    let source = match &args.tamper_b {
        Some(s) => parse_tamper(s)?,
        None => CoefficientSource::Analytic,
    };
    let level = match args.level {
        CliLevel::Quick => Level::Quick,
        CliLevel::Full => Level::Full,
    };
    let v = Verifier { level, source };
    let outcomes = with_pool(args.threads, || {
        v.ids()
            .into_iter()
            .map(|id| {
                let o = v.run(id);
                say(&format!("{o}\n"));
                o
            })
            .collect::<Vec<_>>()
    })?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| format!("A{} {}", o.id, o.name)).collect();
    if failed.is_empty() {
        say(&format!("all {} checks passed\n", outcomes.len()));
        Ok(EXIT_OK)
    } else {
        say(&format!("failed: {}\n", failed.join(", ")));
        Ok(EXIT_VERIFY_FAILED)
    }
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Coeffs(a) => run_observable(a, Observable::Coeffs),
        Command::Evolve(a) => run_observable(a, Observable::Complexity),
        Command::Wavepacket(a) => run_observable(a, Observable::Wavepacket),
        Command::Renyi2(a) => run_observable(a, Observable::Renyi2),
        Command::Moments(a) => run_observable(a, Observable::Moments),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> RunArgs {
        let mut full = vec!["deco-krylov", "evolve"];
        full.extend_from_slice(list);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Evolve(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn resolves_flags_and_defaults() {
        let cfg = resolve(args(&["--model", "ir"]), Observable::Complexity).ok().unwrap();
        assert_eq!(cfg.lengths, vec![100, 200, 500]);
        assert_eq!(cfg.taus.len(), 403);
        let cfg = resolve(args(&["--model", "nn", "--lengths", "4,6", "--tau", "0:1:3"]), Observable::Complexity).ok().unwrap();
        assert_eq!(cfg.taus, vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.lengths, vec![4, 6]);
    }

    #[test]
    fn rejects_invalid_configs() {
        let e = resolve(args(&["--model", "ir", "--lengths", "5"]), Observable::Coeffs).err().unwrap();
        assert_eq!(e.code, EXIT_INVALID);
        assert!(e.message.contains("IR model requires even L"));
        assert!(resolve(args(&["--model", "nn", "--tau", "1:0:3"]), Observable::Complexity).is_err());
        assert!(resolve(args(&["--model", "nn"]), Observable::Wavepacket).is_err());
        assert!(resolve(args(&["--lengths", "4"]), Observable::Coeffs).err().unwrap().message.contains("model"));
        assert!(resolve(args(&["--model", "nn", "--lengths", "16"]), Observable::Renyi2).is_err());
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.json");
        std::fs::write(&p, r#"{"model": "ir", "lengths": [8], "tau": "0:1:2", "format": "json"}"#).unwrap();
        let cfg = resolve(args(&["--config", p.to_str().unwrap(), "--lengths", "10"]), Observable::Complexity).ok().unwrap();
        assert_eq!(cfg.kind, ModelKind::IR);
        assert_eq!(cfg.lengths, vec![10]);
        assert_eq!(cfg.taus, vec![0.0, 1.0]);
        assert_eq!(cfg.format, Format::Json);
        std::fs::write(&p, r#"{"model": "ir", "colour": 1}"#).unwrap();
        assert!(resolve(args(&["--config", p.to_str().unwrap()]), Observable::Complexity).is_err());
    }

    #[test]
    fn coefficient_rows() {
        let cfg = resolve(args(&["--model", "nn", "--lengths", "4"]), Observable::Coeffs).ok().unwrap();
        let csv = coeffs_table(&cfg).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "model,L,n,a_n,b_n");
        assert_eq!(lines[1], "nn,4,0,0.0000000000000000e0,");
        assert!(lines[2].ends_with(&crate::output::format_number(3f64.sqrt())));
    }
}

//! Command implementations behind the `poptlab` binary.
//!
//! Every command produces a [`RunReport`]. Exit codes: 0 when the checked
//! claim holds, 1 when it is falsified (or the input is not a member), 2 on
//! usage and IO errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::catalog;
use crate::cones::{classify_state, is_popt, PoptSearchConfig};
use crate::decomposition::{prop1_decompose, verify_prop1, Prop1Decomposition};
use crate::distinguish::{verify_s24, verify_s24_two_site_z, verify_s8, PairwiseCertificate};
use crate::error::Error;
use crate::game::{
    builtin_classical_bit, builtin_quantum_baseline, builtin_sepbar8, simulate, GameSpec, GameStrategy,
};
use crate::io::{to_json_string, write_json_atomic};
use crate::HermitianOperator;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "poptlab", version, about = "Cones, distinguishability and the pairwise game for composite quantum systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Numerical tolerance for distinguishability and cone membership.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Random restarts of the product-state search.
    #[arg(long, global = true, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, global = true, env = "POPTLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Print the full JSON report instead of a summary line.
    #[arg(long, global = true)]
    pub json: bool,
    /// Report `wall_time_ms` as 0 so identical runs print identical bytes.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

impl GlobalOpts {
    pub fn search_config(&self) -> PoptSearchConfig {
        PoptSearchConfig {
            restarts: self.restarts,
            membership_tol: self.tol,
            seed: self.seed,
            ..PoptSearchConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise certificates for the lookup tables.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Classify an operator file as quantum state, witness state or neither.
    PoptCheck {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Write a POPT state as a positive map applied to a fixed pure state.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        verify: bool,
        /// Check this stored decomposition instead of computing a new one.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Play the pairwise-distinguishability game.
    Game {
        #[command(subcommand)]
        what: GameCommand,
    },
    /// Export the state families as operator files.
    Catalog {
        #[command(subcommand)]
        what: CatalogCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        /// Table II variant: the printed parity rows, or the z rows coarse
        /// grained to the two z sites.
        #[arg(long, value_enum, default_value_t = ZRows::Printed)]
        z_rows: ZRows,
        /// Write the pairwise certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZRows {
    Printed,
    TwoSite,
}

#[derive(Debug, Subcommand)]
pub enum GameCommand {
    Run {
        #[arg(long, value_enum)]
        strategy: StrategyName,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    Sepbar8,
    QuantumBaseline,
    ClassicalBit,
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    Export {
        #[arg(long, value_enum)]
        set: FamilyName,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    S8,
    S24,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the command, its parameters and the bytes of every input file.
    pub inputs_digest: String,
    pub pass: bool,
    pub details: Value,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_OK
        } else {
            EXIT_FALSIFIED
        }
    }
}

/// A failed command: the exit code plus either a report (falsified claim) or
/// an error message.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Rejected(RunReport),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Digest256(Sha256);

impl Digest256 {
    fn new(command: &str, params: &Value) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update([0]);
        h.update(params.to_string().as_bytes());
        Self(h)
    }

    fn file(&mut self, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        self.0.update([0]);
        self.0.update(&bytes);
        Ok(bytes)
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

fn parse_operator(path: &Path, bytes: &[u8]) -> Result<HermitianOperator, Failure> {
    serde_json::from_slice(bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn details<T: Serialize>(value: &T) -> Result<Value, Failure> {
    serde_json::to_value(value).map_err(|e| Failure::Usage(e.to_string()))
}

/// Runs one parsed command. `Ok` carries a report whose `pass` decides the
/// exit code; `Err(Usage)` maps to exit 2.
pub fn execute(cli: &Cli) -> Result<RunReport, Failure> {
    let start = Instant::now();
    let g = &cli.global;
    if !(g.tol.is_finite() && g.tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", g.tol)));
    }
    g.search_config().validate()?;
    let mut report = match &cli.command {
        Command::Verify {
            what: VerifyCommand::Tables { which, z_rows, out },
        } => verify_tables(g, *which, *z_rows, out.as_deref())?,
        Command::PoptCheck { input } => popt_check(g, input)?,
        Command::Decompose {
            input,
            out,
            verify,
            from,
        } => decompose(g, input, out.as_deref(), *verify, from.as_deref())?,
        Command::Game {
            what: GameCommand::Run { strategy, n, rounds },
        } => game(g, *strategy, *n, *rounds)?,
        Command::Catalog {
            what: CatalogCommand::Export { set, out },
        } => catalog_export(g, *set, out)?,
    };
    report.wall_time_ms = if g.no_timing {
        0
    } else {
        start.elapsed().as_millis() as u64
    };
    Ok(report)
}

fn verify_tables(g: &GlobalOpts, which: u8, z_rows: ZRows, out: Option<&Path>) -> Result<RunReport, Failure> {
    let params = json!({ "which": which, "z_rows": z_rows, "tol": g.tol });
    let digest = Digest256::new("verify tables", &params).finish();
    let cert: PairwiseCertificate = match (which, z_rows) {
        (1, _) => verify_s8(g.tol)?,
        (_, ZRows::Printed) => verify_s24(g.tol)?,
        (_, ZRows::TwoSite) => verify_s24_two_site_z(g.tol)?,
    };
    if let Some(path) = out {
        write_json_atomic(path, &cert)?;
    }
    let failures: Vec<Value> = cert
        .failures()
        .map(|p| {
            json!({
                "first": p.first,
                "second": p.second,
                "measurement": p.measurement,
                "max_deviation": p.report.as_ref().map(|r| r.max_deviation),
                "error": p.error,
            })
        })
        .collect();
    let mut d = json!({
        "table": which,
        "states": cert.labels.len(),
        "pairs": cert.pairs.len(),
        "pairs_passed": cert.pairs.len() - failures.len(),
        "max_deviation": cert.max_deviation,
        "tol": g.tol,
        "failures": failures,
    });
    if which == 2 {
        d["z_rows"] = json!(z_rows);
        d["printed_table_divergences"] = details(&catalog::table2_cross_check())?;
    }
    Ok(RunReport {
        command: "verify tables".into(),
        inputs_digest: digest,
        pass: cert.complete,
        details: d,
        wall_time_ms: 0,
    })
}

fn popt_check(g: &GlobalOpts, input: &Path) -> Result<RunReport, Failure> {
    let cfg = g.search_config();
    let mut digest = Digest256::new("popt-check", &details(&cfg)?);
    let bytes = digest.file(input)?;
    let w = parse_operator(input, &bytes)?;
    let digest = digest.finish();
    let min_eigenvalue = w.min_eigenvalue();
    let (_, search) = is_popt(&w, &cfg, false)?;
    let (class, trace_error) = match classify_state(&w, &cfg) {
        Ok(c) => (Some(c), None),
        Err(e @ Error::NonUnitTrace { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let member = matches!(
        class,
        Some(crate::cones::StateClass::Quantum | crate::cones::StateClass::WitnessState)
    );
    Ok(RunReport {
        command: "popt-check".into(),
        inputs_digest: digest,
        pass: member,
        details: json!({
            "shape": w.shape().dims(),
            "trace": w.trace(),
            "class": class,
            "error": trace_error,
            "min_eigenvalue": min_eigenvalue,
            "popt": search,
        }),
        wall_time_ms: 0,
    })
}

fn decompose(
    g: &GlobalOpts,
    input: &Path,
    out: Option<&Path>,
    verify: bool,
    from: Option<&Path>,
) -> Result<RunReport, Failure> {
    let cfg = g.search_config();
    let params = json!({ "cfg": cfg, "verify": verify, "stored": from.is_some() });
    let mut digest = Digest256::new("decompose", &params);
    let bytes = digest.file(input)?;
    let w = parse_operator(input, &bytes)?;
    let stored = match from {
        Some(path) => {
            let bytes = digest.file(path)?;
            let d: Prop1Decomposition =
                serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Some(d)
        }
        None => None,
    };
    let digest = digest.finish();

    let decomposition = match stored {
        Some(d) => d,
        None => match prop1_decompose(&w, &cfg) {
            Ok(d) => d,
            Err(e @ (Error::NotPopt { .. } | Error::NonUnitTrace { .. })) => {
                let (_, search) = is_popt(&w, &cfg, false)?;
                return Err(Failure::Rejected(RunReport {
                    command: "decompose".into(),
                    inputs_digest: digest,
                    pass: false,
                    details: json!({
                        "error": e.to_string(),
                        "min_product_expectation": search.min_value,
                        "witness_vectors": search.argmin,
                    }),
                    wall_time_ms: 0,
                }));
            }
            Err(e) => return Err(e.into()),
        },
    };
    if let Some(path) = out {
        write_json_atomic(path, &decomposition)?;
    }
    let reconstruction_residual = decomposition.reconstruct()?.frobenius_distance(&decomposition.input)?;
    let marginal_full_rank = decomposition.p_b_perp.frobenius_norm() == 0.0;
    let mut d = json!({
        "shape": decomposition.input.shape().dims(),
        "marginal_full_rank": marginal_full_rank,
        "kraus_margin": decomposition.kraus_margin,
        "reconstruction_residual": reconstruction_residual,
    });
    let pass = if verify {
        let v = verify_prop1(&w, &decomposition, &cfg)?;
        d["verification"] = details(&v)?;
        v.pass
    } else {
        reconstruction_residual <= crate::decomposition::RECONSTRUCTION_TOL
    };
    Ok(RunReport {
        command: "decompose".into(),
        inputs_digest: digest,
        pass,
        details: d,
        wall_time_ms: 0,
    })
}

fn strategy(name: StrategyName, n: usize) -> Result<GameStrategy, Error> {
    match name {
        StrategyName::Sepbar8 => builtin_sepbar8().truncated(n),
        StrategyName::QuantumBaseline => builtin_quantum_baseline(n),
        StrategyName::ClassicalBit if n == 2 => Ok(builtin_classical_bit()),
        StrategyName::ClassicalBit => Err(Error::Unsupported(format!(
            "one classical bit carries two messages, got n = {n}"
        ))),
    }
}

fn game(g: &GlobalOpts, name: StrategyName, n: usize, rounds: u64) -> Result<RunReport, Failure> {
    let params = json!({ "strategy": name, "n": n, "rounds": rounds, "seed": g.seed });
    let digest = Digest256::new("game run", &params).finish();
    let s = strategy(name, n)?;
    let spec = GameSpec::uniform(n)?;
    s.validate(n, &g.search_config())?;
    let result = simulate(&s, &spec, rounds, g.seed)?;
    let mut d = details(&result)?;
    d["perfect"] = json!(result.exact_win_prob == 1.0);
    Ok(RunReport {
        command: "game run".into(),
        inputs_digest: digest,
        pass: result.within_three_sigma,
        details: d,
        wall_time_ms: 0,
    })
}

fn catalog_export(g: &GlobalOpts, set: FamilyName, dir: &Path) -> Result<RunReport, Failure> {
    let cfg = g.search_config();
    let params = json!({ "set": set, "cfg": cfg });
    let digest = Digest256::new("catalog export", &params).finish();
    let family: Vec<(String, HermitianOperator)> = match set {
        FamilyName::S8 => catalog::s8().into_iter().map(|(l, w)| (l.to_string(), w)).collect(),
        FamilyName::S24 => catalog::s24().into_iter().map(|(l, w)| (l.to_string(), w)).collect(),
    };
    fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let mut manifest = Vec::new();
    for (label, w) in &family {
        let file = format!("{label}.json");
        write_json_atomic(&dir.join(&file), w)?;
        manifest.push(json!({
            "label": label,
            "file": file,
            "class": classify_state(w, &cfg)?,
            "min_eigenvalue": w.min_eigenvalue(),
        }));
    }
    let manifest = json!({ "set": set, "states": manifest });
    write_json_atomic(&dir.join("manifest.json"), &manifest)?;
    Ok(RunReport {
        command: "catalog export".into(),
        inputs_digest: digest,
        pass: true,
        details: manifest,
        wall_time_ms: 0,
    })
}

fn summary(r: &RunReport) -> String {
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let d = &r.details;
    let extra = match r.command.as_str() {
        "verify tables" => format!(
            "{}/{} pairs, max deviation {:e}",
            d["pairs_passed"], d["pairs"], d["max_deviation"].as_f64().unwrap_or(f64::NAN)
        ),
        "popt-check" => format!("class {}", d["class"]),
        "decompose" => match d["error"].as_str() {
            Some(e) => e.to_string(),
            None => format!(
                "reconstruction residual {:e}",
                d["reconstruction_residual"].as_f64().unwrap_or(f64::NAN)
            ),
        },
        "game run" => format!(
            "exact {} empirical {}",
            d["exact_win_prob"], d["empirical_win_rate"]
        ),
        "catalog export" => format!("{} states", d["states"].as_array().map_or(0, Vec::len)),
        _ => String::new(),
    };
    format!("{verdict} {}: {extra}", r.command)
}

fn emit(report: &RunReport, json: bool) {
    if json {
        match to_json_string(report) {
            Ok(s) => print!("{s}"),
            Err(e) => eprintln!("error: {e}"),
        }
    } else {
        println!("{}", summary(report));
    }
}

/// Parses `args` and runs the command, printing to stdout/stderr. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            emit(&report, cli.global.json);
            report.exit_code()
        }
        Err(Failure::Rejected(report)) => {
            emit(&report, cli.global.json);
            EXIT_FALSIFIED
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

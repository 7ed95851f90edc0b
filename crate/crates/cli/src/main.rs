//! `nlskp`: solve, decompose and verify two-sided reflections from CSV/JSON.
//!
//! Exit codes: 0 success, 1 a check failed, 2 rejected input, 3 numeric failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlskp::genpaths::generate;
use nlskp::io::{read_pair_json, read_path_csv, write_path, write_solution};
use nlskp::reflector::picard_iterate;
use nlskp::verify::suite::{run_suite, threads_from_env, to_jsonl, Manifest};
use nlskp::verify::{self, VerificationReport};
use nlskp::{oscillation_times, solve, support_check, BoundaryPair, CadlagPath, Error, GenSpec, PathKind, Tolerances};

#[derive(Parser)]
#[command(
    name = "nlskp",
    version,
    about = "Two-sided reflection with nonlinear time-dependent boundaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Relative root residual accepted by the boundary inversion.
    #[arg(long, default_value_t = 1e-12)]
    tol_root: f64,
    /// Additive slack on every verified inequality.
    #[arg(long, default_value_t = 1e-9)]
    tol_check: f64,
}

impl TolArgs {
    fn build(&self) -> Result<Tolerances, Error> {
        for (name, v) in [("--tol-root", self.tol_root), ("--tol-check", self.tol_check)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Tolerances::default()
            .with_root(self.tol_root)
            .with_check(self.tol_check))
    }
}

#[derive(Args)]
struct InstanceArgs {
    /// Driver CSV with header `t,value`.
    #[arg(long)]
    path: PathBuf,
    /// Boundary-pair JSON; offset files resolve relative to it.
    #[arg(long)]
    pair: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write the solution CSV (t,S,Phi,Psi,K,X,Kr,Kl,TV).
    Solve(InstanceArgs),
    /// Oscillation schedule, support check and coupled fixed point as JSON.
    Decompose(InstanceArgs),
    /// Run every single-instance check; JSONL, one report per line.
    Verify(InstanceArgs),
    /// Check comparison and continuity bounds between two drivers.
    Compare(CompareArgs),
    /// Run a seeded campaign; the built-in manifest when none is given.
    Suite(SuiteArgs),
    /// Generate a seeded path CSV.
    Gen(GenArgs),
}

#[derive(Args)]
struct CompareArgs {
    /// First driver `S1`.
    #[arg(long)]
    path: PathBuf,
    /// Second driver `S2`, on the grid of `S1`.
    #[arg(long)]
    path2: PathBuf,
    #[arg(long)]
    pair: PathBuf,
    /// Boundary pair for `S2`; `--pair` when omitted.
    #[arg(long)]
    pair2: Option<PathBuf>,
    /// Nondecreasing `ν` with `ν_0 = 0`; enables the comparison checks.
    #[arg(long)]
    nu: Option<PathBuf>,
    /// Initial position added to `S1`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c01: f64,
    /// Initial position added to `S2`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c02: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct SuiteArgs {
    /// Manifest JSON `{checks, seeds, instances}`.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Replace the manifest seeds with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct GenArgs {
    /// GenSpec JSON; the flags below apply when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind, default_value = "brownian")]
    kind: PathKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 101)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1.0)]
    vol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<PathKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown kind `{s}` (brownian, jump, ramp, sawtooth, step, staircase_nu)"))
}

enum Failure {
    Checks,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("nlskp: {e}");
            ExitCode::from(if e.is_numeric() { 3 } else { 2 })
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve(a) => {
            let (s, pair, tol) = load(&a)?;
            let sol = solve(&s, &pair, &tol)?;
            let mut buf = Vec::new();
            write_solution(&mut buf, &sol)?;
            emit(a.out.as_deref(), &buf)?;
        }
        Command::Decompose(a) => {
            let (s, pair, tol) = load(&a)?;
            let sol = solve(&s, &pair, &tol)?;
            let schedule = oscillation_times(&sol.phi, &sol.psi)?;
            let support = support_check(&sol, &pair, tol.check)?;
            let fp = picard_iterate(&s, &pair, &tol)?;
            let gap = fp.kr.sup_distance(&sol.kr)?.max(fp.kl.sup_distance(&sol.kl)?);
            let doc = serde_json::json!({
                "schedule": schedule,
                "support": support,
                "fixpoint": { "sweeps": fp.sweeps, "residual": fp.residual, "split_gap": gap },
                "total_variation": sol.tv.last(),
            });
            let text = serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n";
            emit(a.out.as_deref(), text.as_bytes())?;
            if !support.passed || gap >= tol.fix {
                return Err(Failure::Checks);
            }
        }
        Command::Verify(a) => {
            let (s, pair, tol) = load(&a)?;
            let sol = solve(&s, &pair, &tol)?;
            let n = sol.len();
            let mut reports = vec![
                verify::check_definition(&sol, &pair, &tol),
                verify::check_separation(&sol, &pair, &tol),
                verify::check_oracle(&sol),
                verify::check_representation(&sol),
                verify::check_oscillation_domination(&sol, &tol),
                verify::check_coupled_fixpoint(&sol, &pair, &tol),
            ];
            let shifts = [n / 4, n / 2, 3 * n / 4]
                .into_iter()
                .map(|i| verify::check_shift(&sol, &pair, s.grid().time(i), &tol))
                .collect::<Result<Vec<_>, _>>()?;
            reports.push(VerificationReport::combine("shift", shifts));
            report(a.out.as_deref(), &reports)?;
        }
        Command::Compare(a) => {
            let tol = a.tol.build()?;
            let s1 = read_path_csv(&a.path)?;
            let s2 = read_path_csv(&a.path2)?;
            let pair = read_pair_json(&a.pair, &tol)?;
            let pair2 = match &a.pair2 {
                Some(p) => read_pair_json(p, &tol)?,
                None => pair.clone(),
            };
            let mut reports = vec![verify::check_uniform_continuity(
                &s1.map(|v| v + a.c01)?,
                &s2.map(|v| v + a.c02)?,
                &pair,
                &pair2,
                &tol,
            )?];
            if a.pair2.is_some() {
                reports.push(verify::check_monotone_boundaries(&s1, &pair, &pair2, &tol)?);
            }
            if let Some(nu) = &a.nu {
                let nu = read_path_csv(nu)?;
                let (c01, c02) = (a.c01, a.c02);
                reports.push(verify::check_comparison_one_sided(
                    &s1,
                    &s2,
                    c01,
                    c02,
                    &nu,
                    pair.lower(),
                    &tol,
                )?);
                reports.push(verify::check_comparison_net(&s1, &s2, c01, c02, &nu, &pair, &tol)?);
                reports.push(verify::check_comparison_split(&s2, c01, c02, &nu, &pair, &tol)?);
            }
            report(a.out.as_deref(), &reports)?;
        }
        Command::Suite(a) => {
            let tol = a.tol.build()?;
            let mut manifest = match &a.manifest {
                Some(p) => {
                    let text = fs::read_to_string(p).map_err(|e| io_error(p, e))?;
                    serde_json::from_str::<Manifest>(&text).map_err(Error::from)?
                }
                None => Manifest::standard(),
            };
            if let Some(seed) = a.seed {
                manifest.seeds = vec![seed];
            }
            let records = run_suite(&manifest, &tol, threads_from_env())?;
            emit(a.out.as_deref(), to_jsonl(&records)?.as_bytes())?;
            let failed: Vec<_> = records.iter().filter(|r| !r.report.passed).collect();
            for r in &failed {
                eprintln!(
                    "FAIL {} {} seed {}: {}",
                    r.report.check_name, r.instance, r.seed, r.report.details
                );
            }
            if !failed.is_empty() {
                return Err(Failure::Checks);
            }
        }
        Command::Gen(a) => {
            let spec = match &a.spec {
                Some(p) => {
                    let text = fs::read_to_string(p).map_err(|e| io_error(p, e))?;
                    serde_json::from_str::<GenSpec>(&text).map_err(Error::from)?
                }
                None => GenSpec::new(a.kind, a.seed, a.n)
                    .with_horizon(a.horizon)
                    .with_vol(a.vol),
            };
            let p: CadlagPath = generate(&spec)?;
            let mut buf = Vec::new();
            write_path(&mut buf, &p)?;
            emit(a.out.as_deref(), &buf)?;
        }
    }
    Ok(())
}

fn load(a: &InstanceArgs) -> Result<(CadlagPath, BoundaryPair, Tolerances), Error> {
    let tol = a.tol.build()?;
    let s = read_path_csv(&a.path)?;
    let pair = read_pair_json(&a.pair, &tol)?;
    Ok((s, pair, tol))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to `out`, or to standard output.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| io_error(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

/// JSONL reports; fails with exit code 1 when any report failed.
fn report(out: Option<&Path>, reports: &[VerificationReport]) -> Result<(), Failure> {
    let mut text = String::new();
    for r in reports {
        text.push_str(&serde_json::to_string(r).map_err(Error::from)?);
        text.push('\n');
    }
    emit(out, text.as_bytes())?;
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

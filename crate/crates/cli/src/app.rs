use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use screenant_core::experiments::thread_pool;
use screenant_core::{run_sweep, ScenarioConfig, SweepKind, SweepOutput};

use crate::config::load_config;
use crate::error::{CliError, CliResult};
use crate::output::{check_writable, write_results, RunManifest, SweepSpec};
use crate::validate::run_checks;
use crate::values::parse_values;

pub const SEED_ENV: &str = "SCREENANT_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "screenant",
    version,
    about = "On-screen antenna array link simulator"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario JSON; missing keys take the defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base seed; falls back to SCREENANT_SEED, then the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per point.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overwrite existing result files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Also write per-trial records (trials.csv).
    #[arg(long, global = true)]
    pub records: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured scenario once and print mean SEs.
    Run,
    /// Sweep one parameter.
    Sweep {
        #[arg(long, value_parser = parse_kind)]
        name: SweepKind,
        /// `start:stop:step` or a comma list; defaults to the standard grid.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
    },
    /// Gradient and oracle self-checks on small instances.
    Validate,
    /// Run every sweep on its standard grid.
    Figures {
        #[arg(long, required = true)]
        all: bool,
    },
    /// Regenerate an output directory from its manifest.
    Replay { manifest: PathBuf },
}

fn parse_kind(s: &str) -> Result<SweepKind, String> {
    s.parse().map_err(|e: screenant_core::Error| e.to_string())
}

fn resolve_seed(flag: Option<u64>, env: Option<String>) -> CliResult<Option<u64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match env {
        Some(text) => text
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} is not a u64: {text:?}"))),
        None => Ok(None),
    }
}

/// Config file plus command-line overrides.
fn scenario(global: &GlobalArgs) -> CliResult<ScenarioConfig> {
    let mut cfg = match &global.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = resolve_seed(global.seed, std::env::var(SEED_ENV).ok())? {
        cfg.run.base_seed = seed;
    }
    if let Some(trials) = global.trials {
        cfg.run.trials = trials;
    }
    if let Some(threads) = global.threads {
        cfg.run.threads = threads;
    }
    cfg.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn sweep_into(
    out: &mut dyn Write,
    cfg: &ScenarioConfig,
    kind: SweepKind,
    values: &[f64],
    dir: Option<&Path>,
    global: &GlobalArgs,
) -> CliResult<()> {
    if let Some(dir) = dir {
        check_writable(dir, global.records, global.force)?;
    }
    let pool = thread_pool(cfg.run.threads)?;
    let SweepOutput { result, records } =
        pool.install(|| run_sweep::<f64>(kind, cfg, values, global.records))?;
    for p in &result.points {
        let _ = writeln!(
            out,
            "{kind} {:>10} screenant {:.4} oracle {:.4} edgeant {:.4} gain {:+.2}%",
            p.value,
            p.stats.screenant.mean,
            p.stats.oracle.mean,
            p.stats.edgeant.mean,
            100.0 * p.stats.relative_gain
        );
    }
    if let Some(dir) = dir {
        let spec = SweepSpec {
            name: kind.name().to_string(),
            values: values.to_vec(),
        };
        write_results(
            dir,
            cfg,
            kind.name(),
            Some(spec),
            &result,
            records.as_deref(),
            global.force,
        )?;
    }
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let global = &cli.global;
    match &cli.command {
        Command::Run => {
            let cfg = scenario(global)?;
            if let Some(dir) = &global.out {
                check_writable(dir, global.records, global.force)?;
            }
            let pool = thread_pool(cfg.run.threads)?;
            let records = pool.install(|| screenant_core::Scenario::prepare(&cfg)?.run_trials())?;
            let stats = screenant_core::aggregate(&records)?;
            let _ = writeln!(
                out,
                "trials {}\nscreenant {:.6} ± {:.6}\noracle {:.6} ± {:.6}\nedgeant {:.6} ± {:.6}\nrelative_gain {:.6} ± {:.6}",
                stats.trials,
                stats.screenant.mean,
                stats.screenant.ci95,
                stats.oracle.mean,
                stats.oracle.ci95,
                stats.edgeant.mean,
                stats.edgeant.ci95,
                stats.relative_gain,
                stats.relative_gain_ci95
            );
            if let Some(dir) = &global.out {
                let result = screenant_core::SweepResult {
                    kind: SweepKind::Alpha,
                    points: vec![screenant_core::experiments::SweepPoint { value: 0.0, stats }],
                };
                let kept = [records];
                let records = global.records.then_some(&kept[..]);
                write_results(dir, &cfg, "scenario", None, &result, records, global.force)?;
            }
            Ok(())
        }
        Command::Sweep { name, values } => {
            let cfg = scenario(global)?;
            let values = match values {
                Some(spec) => parse_values(spec)?,
                None => name.default_values(),
            };
            sweep_into(out, &cfg, *name, &values, global.out.as_deref(), global)
        }
        Command::Figures { .. } => {
            let cfg = scenario(global)?;
            for kind in SweepKind::ALL {
                let dir = global.out.as_ref().map(|d| d.join(kind.name()));
                sweep_into(
                    out,
                    &cfg,
                    kind,
                    &kind.default_values(),
                    dir.as_deref(),
                    global,
                )?;
            }
            Ok(())
        }
        Command::Validate => {
            let seed = resolve_seed(global.seed, std::env::var(SEED_ENV).ok())?.unwrap_or(0);
            let checks = run_checks(seed);
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{status} {}: {}", c.name, c.detail);
            }
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                n => Err(CliError::Validation(format!("{n} check(s) failed"))),
            }
        }
        Command::Replay { manifest } => {
            let m = RunManifest::load(manifest)?;
            let mut cfg = m.config;
            if let Some(threads) = global.threads {
                cfg.run.threads = threads;
            }
            cfg.validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
            let sweep = m
                .sweep
                .ok_or_else(|| CliError::Usage("manifest does not describe a sweep".into()))?;
            let kind = parse_kind(&sweep.name).map_err(CliError::Usage)?;
            let dir = global
                .out
                .as_deref()
                .ok_or_else(|| CliError::Usage("replay needs --out".into()))?;
            sweep_into(out, &cfg, kind, &sweep.values, Some(dir), global)
        }
    }
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.exit_code() == 1 {
                let _ = writeln!(err, "usage: screenant [--config <path>] [--out <dir>] [--seed <u64>] [--trials <n>] [--threads <n>] [--force] <run|sweep|validate|figures|replay>");
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("screenant").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, _, err) = call(&["frobnicate"]);
        assert_eq!(code, 1);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn bad_sweep_name_is_usage_error() {
        assert_eq!(call(&["sweep", "--name", "gamma"]).0, 1);
    }

    #[test]
    fn non_square_elements_is_usage_error() {
        let (code, _, err) = call(&[
            "sweep", "--name", "elements", "--values", "35", "--trials", "1",
        ]);
        assert_eq!(code, 1, "{err}");
        assert!(err.contains("perfect square"));
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(3), Some("9".into())).unwrap(), Some(3));
        assert_eq!(resolve_seed(None, Some(" 9 ".into())).unwrap(), Some(9));
        assert_eq!(resolve_seed(None, None).unwrap(), None);
        assert!(resolve_seed(None, Some("x".into())).is_err());
    }

    #[test]
    fn validate_passes() {
        let (code, out, _) = call(&["validate", "--seed", "1"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().all(|l| l.starts_with("PASS")));
    }

    #[test]
    fn run_prints_means() {
        let (code, out, err) = call(&["run", "--trials", "3", "--seed", "2"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("screenant") && out.contains("edgeant"));
    }
}

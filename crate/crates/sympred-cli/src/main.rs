//! Command-line front end: configuration resolution, command dispatch, and
//! rendering. Exit codes: 0 when every requested check passes, 1 when a
//! check fails, 2 for invalid input or environment problems.

mod dto;
mod report;
mod runner;

use clap::{Parser, Subcommand, ValueEnum};
use dto::{EffectiveConfig, GeneratorSpec, LabelDto, RunConfigFile, KNOWN_COMMANDS};
use runner::{run_suite, RICHARDSON_BAND};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use sympred_core::chart::Chart;
use sympred_core::classify::classify_quotient;
use sympred_core::curvature::{closed_form_curvature, kappa_closed_form};
use sympred_core::frame::horizontal_frame;
use sympred_core::oracle::{nabla_ricci_compare, oracle_compare};
use sympred_core::quadric::Quadric;
use sympred_core::tol::{self, Tolerances};

#[derive(Parser)]
#[command(
    name = "sympred",
    version,
    about = "Build and verify symplectic connections obtained by reducing quadric level sets"
)]
struct Cli {
    /// JSON run configuration; explicit flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Generator family (the explicit-matrix kind is config-file only)
    #[arg(long, global = true, value_enum)]
    case: Option<CaseFlag>,

    /// Half-dimension parameter: the ambient space is R^(2n+2)
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Family parameter p (case1: positive planes, case3: rank)
    #[arg(long, global = true)]
    p: Option<usize>,

    /// Family parameter q (case3: positive pairing signs)
    #[arg(long, global = true)]
    q: Option<usize>,

    /// Level of the quadratic Hamiltonian (defaults per family)
    #[arg(long, global = true, allow_negative_numbers = true)]
    mu0: Option<f64>,

    /// Points sampled per check
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// RNG seed; falls back to config, then SYMPRED_SEED, then 42
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format (report files: json|csv; other commands: text|json)
    #[arg(long, global = true, value_enum)]
    format: Option<FormatFlag>,

    /// Finite-difference step for the oracle commands
    #[arg(long = "h", global = true)]
    h: Option<f64>,

    /// Worker threads for point-level checks (results are order-stable)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseFlag {
    /// A^2 = -Id (p positive planes; defaults to p = n+1)
    Case1,
    /// A^2 = +Id
    Case2,
    /// A^2 = 0 (rank p, q positive signs; defaults p = n+1, q = p)
    Case3,
    /// 4-dimensional generator with eigenvalues +-1 +- i
    Remark,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatFlag {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the catalog label of the reduced space
    Classify,
    /// Run the verification suite and print one line per check
    Verify,
    /// Run the verification suite and write the report to a file
    Report {
        /// Output path
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form curvature summary at one sampled point
    Curvature,
    /// Step-based curvature and Ricci-derivative oracles at one chart
    Oracle,
    /// Flow a sampled point for time t and report the drift
    Flow {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Merge config file, flags, environment, and defaults into one record.
fn resolve_config(cli: &Cli) -> Result<EffectiveConfig, String> {
    let file: RunConfigFile = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("invalid config: {e}"))?
        }
        None => RunConfigFile::default(),
    };

    if let Some(commands) = &file.commands {
        for name in commands {
            if !KNOWN_COMMANDS.contains(&name.as_str()) {
                return Err(format!(
                    "unknown command {name:?} in config; known: {}",
                    KNOWN_COMMANDS.join(", ")
                ));
            }
        }
    }

    let generator = match cli.case {
        Some(flag) => {
            let n = cli.n.unwrap_or(1);
            match flag {
                CaseFlag::Case1 => GeneratorSpec::Case1 {
                    n,
                    p: cli.p.unwrap_or(n + 1),
                },
                CaseFlag::Case2 => GeneratorSpec::Case2 { n },
                CaseFlag::Case3 => {
                    let p = cli.p.unwrap_or(n + 1);
                    GeneratorSpec::Case3 {
                        n,
                        p,
                        q: cli.q.unwrap_or(p),
                    }
                }
                CaseFlag::Remark => GeneratorSpec::Remark { a: 1.0, b: 1.0 },
            }
        }
        None => {
            if cli.n.is_some() || cli.p.is_some() || cli.q.is_some() {
                return Err(String::from("--n/--p/--q require --case"));
            }
            file.generator
                .clone()
                .ok_or("no generator: pass --case or a config file with a generator")?
        }
    };

    let mu0 = match cli.mu0.or(file.mu0) {
        Some(v) => v,
        None => generator.build().map_err(|e| e.to_string())?.default_mu0(),
    };

    let seed = match cli.seed.or(file.seed) {
        Some(s) => s,
        None => match std::env::var("SYMPRED_SEED") {
            Ok(text) => text
                .parse::<u64>()
                .map_err(|_| format!("SYMPRED_SEED must be an unsigned integer, got {text:?}"))?,
            Err(_) => 42,
        },
    };

    Ok(EffectiveConfig {
        generator,
        mu0,
        samples: cli.samples.or(file.samples).unwrap_or(20),
        seed,
        tolerances: file.tolerances,
        h: cli.h.or(file.h).unwrap_or(tol::FD_STEP),
        workers: cli.workers.or(file.workers).unwrap_or(1),
        expect_locally_symmetric: file.expect_locally_symmetric,
    })
}

fn build_quadric(config: &EffectiveConfig) -> Result<(Quadric, Tolerances), String> {
    let (gen, tols) = config.validate()?;
    let quadric = Quadric::new(gen, config.mu0).map_err(|e| e.to_string())?;
    Ok((quadric, tols))
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable output")
    );
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let config = resolve_config(&cli)?;
    let format = cli.format.unwrap_or(match cli.command {
        Command::Report { .. } => FormatFlag::Json,
        _ => FormatFlag::Text,
    });

    match cli.command {
        Command::Classify => {
            let gen = config.generator.build().map_err(|e| e.to_string())?;
            let label: LabelDto = classify_quotient(&gen, config.mu0)
                .map_err(|e| e.to_string())?
                .into();
            match format {
                FormatFlag::Json => print_json(&label),
                _ => {
                    println!(
                        "quadric={:?} quotient={:?} group={}{}",
                        label.quadric,
                        label.quotient,
                        label.group,
                        label
                            .note
                            .as_ref()
                            .map(|n| format!(" note={n:?}"))
                            .unwrap_or_default()
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let (quadric, tols) = build_quadric(&config)?;
            let report = run_suite(&quadric, &tols, &config)?;
            match format {
                FormatFlag::Json => print!("{}", report.to_json()),
                FormatFlag::Csv => print!("{}", report.to_csv()),
                FormatFlag::Text => print!("{}", report.to_text()),
            }
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Report { ref out } => {
            let (quadric, tols) = build_quadric(&config)?;
            let report = run_suite(&quadric, &tols, &config)?;
            let payload = match format {
                FormatFlag::Csv => report.to_csv(),
                _ => report.to_json(),
            };
            std::fs::write(out, payload)
                .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            eprintln!(
                "wrote {} ({} checks, {})",
                out.display(),
                report.checks.len(),
                if report.all_passed() { "all passed" } else { "FAILURES" }
            );
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Curvature => {
            let (quadric, tols) = build_quadric(&config)?;
            let point = quadric
                .sample_point(config.seed, 0)
                .map_err(|e| e.to_string())?;
            let frame = horizontal_frame(&quadric, &point).map_err(|e| e.to_string())?;
            let curv =
                closed_form_curvature(&quadric, &point, &frame).map_err(|e| e.to_string())?;
            let n = quadric.generator().n();
            let summary = CurvatureSummary {
                dim: curv.dim(),
                kappa: curv.kappa(),
                kappa_closed: kappa_closed_form(n, quadric.mu0()),
                kappa_fit_residual: curv.kappa_residual(),
                w_norm: curv.w_norm(),
                antisymmetry_residual: curv.antisymmetry_residual(),
                bianchi_residual: curv.bianchi_residual(),
                symplectic_symmetry_residual: curv.symplectic_symmetry_residual(),
                ricci: matrix_rows(curv.ricci()),
            };
            match format {
                FormatFlag::Json => print_json(&summary),
                _ => {
                    println!(
                        "dim={} kappa={:.12} (closed form {:.12}) fit_residual={:.3e}",
                        summary.dim, summary.kappa, summary.kappa_closed, summary.kappa_fit_residual
                    );
                    println!(
                        "w_norm={:.3e} antisymmetry={:.3e} bianchi={:.3e} symplectic={:.3e}",
                        summary.w_norm,
                        summary.antisymmetry_residual,
                        summary.bianchi_residual,
                        summary.symplectic_symmetry_residual
                    );
                }
            }
            let healthy = summary.w_norm <= tols.transport
                && summary.kappa_fit_residual <= tols.transport;
            Ok(if healthy { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Oracle => {
            let (quadric, tols) = build_quadric(&config)?;
            let center = quadric
                .sample_point(config.seed, 0)
                .map_err(|e| e.to_string())?;
            let chart = Chart::new(&quadric, center).map_err(|e| e.to_string())?;
            let report = oracle_compare(&chart, config.h).map_err(|e| e.to_string())?;
            let nabla = nabla_ricci_compare(&chart, config.h);
            let (nabla_discrepancy, nabla_pass) = match &nabla {
                Ok(cmp) => (cmp.discrepancy(), cmp.discrepancy() <= tols.fd_cross),
                Err(_) => (f64::INFINITY, false),
            };
            let ratio_pass = !report.ratio_is_measurable()
                || (report.richardson_ratio() - 4.0).abs() <= RICHARDSON_BAND;
            let summary = OracleSummary {
                h: report.h(),
                closed_max: report.closed_max(),
                discrepancy: report.discrepancy(),
                discrepancy_half: report.discrepancy_half(),
                richardson_ratio: report.richardson_ratio(),
                ratio_measurable: report.ratio_is_measurable(),
                nabla_ricci_discrepancy: nabla_discrepancy,
            };
            match format {
                FormatFlag::Json => print_json(&summary),
                _ => {
                    println!(
                        "h={:.1e} discrepancy={:.3e} (h/2: {:.3e}) ratio={:.3} measurable={}",
                        summary.h,
                        summary.discrepancy,
                        summary.discrepancy_half,
                        summary.richardson_ratio,
                        summary.ratio_measurable
                    );
                    println!("nabla_ricci_discrepancy={nabla_discrepancy:.3e}");
                }
            }
            let pass = report.discrepancy() <= tols.oracle && ratio_pass && nabla_pass;
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Flow { t } => {
            let (quadric, _) = build_quadric(&config)?;
            let point = quadric
                .sample_point(config.seed, 0)
                .map_err(|e| e.to_string())?;
            let moved = quadric.flow(&point, t).map_err(|e| e.to_string())?;
            let rep = quadric.orbit_representative(&moved).ok();
            let summary = FlowSummary {
                t,
                before: point.coords().iter().copied().collect(),
                after: moved.coords().iter().copied().collect(),
                level_residual: moved.residual(),
                orbit_representative: rep.map(|r| r.coords().iter().copied().collect()),
            };
            match format {
                FormatFlag::Json => print_json(&summary),
                _ => {
                    println!(
                        "t={} |x(0)|={:.6} |x(t)|={:.6} level_residual={:.3e}",
                        summary.t,
                        point.coords().norm(),
                        moved.coords().norm(),
                        summary.level_residual
                    );
                    match &summary.orbit_representative {
                        Some(r) => println!(
                            "orbit_representative_norm={:.6}",
                            r.iter().map(|v| v * v).sum::<f64>().sqrt()
                        ),
                        None => println!("orbit_representative=unsupported for this family"),
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
struct CurvatureSummary {
    dim: usize,
    kappa: f64,
    kappa_closed: f64,
    kappa_fit_residual: f64,
    w_norm: f64,
    antisymmetry_residual: f64,
    bianchi_residual: f64,
    symplectic_symmetry_residual: f64,
    ricci: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct OracleSummary {
    h: f64,
    closed_max: f64,
    discrepancy: f64,
    discrepancy_half: f64,
    richardson_ratio: f64,
    ratio_measurable: bool,
    nabla_ricci_discrepancy: f64,
}

#[derive(Serialize)]
struct FlowSummary {
    t: f64,
    before: Vec<f64>,
    after: Vec<f64>,
    level_residual: f64,
    orbit_representative: Option<Vec<f64>>,
}

fn matrix_rows(m: &sympred_core::linalg::Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flag_generator_defaults_fill_family_parameters() {
        let cli = Cli::parse_from(["sympred", "--case", "case3", "--n", "1", "--p", "2", "--q", "1", "classify"]);
        let config = resolve_config(&cli).unwrap();
        assert_eq!(config.generator, GeneratorSpec::Case3 { n: 1, p: 2, q: 1 });
        assert_eq!(config.mu0, 1.0);
        assert_eq!(config.samples, 20);

        let cli = Cli::parse_from(["sympred", "--case", "case2", "verify"]);
        let config = resolve_config(&cli).unwrap();
        assert_eq!(config.generator, GeneratorSpec::Case2 { n: 1 });
        assert_eq!(config.mu0, -2.0);
    }

    #[test]
    fn parameter_flags_without_case_are_rejected() {
        let cli = Cli::parse_from(["sympred", "--n", "2", "verify"]);
        assert!(resolve_config(&cli).is_err());
    }

    #[test]
    fn seed_resolution_prefers_explicit_flag() {
        let cli = Cli::parse_from(["sympred", "--case", "case2", "--seed", "7", "verify"]);
        let config = resolve_config(&cli).unwrap();
        assert_eq!(config.seed, 7);
    }

    #[test]
    fn unknown_config_commands_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"generator": {"kind": "case2", "n": 1}, "commands": ["verify", "frobnicate"]}"#,
        )
        .unwrap();
        let cli = Cli::parse_from(["sympred", "--config", path.to_str().unwrap(), "verify"]);
        assert!(resolve_config(&cli).unwrap_err().contains("frobnicate"));
    }

    #[test]
    fn negative_mu0_parses_from_the_flag() {
        let cli = Cli::parse_from(["sympred", "--case", "case1", "--mu0", "-1", "classify"]);
        let config = resolve_config(&cli).unwrap();
        assert_eq!(config.mu0, -1.0);
    }
}

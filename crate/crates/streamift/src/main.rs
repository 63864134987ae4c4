//! Command-line front end.
//!
//! Exit codes: 0 on success or agreement, 1 on hypothesis failure or
//! coefficient disagreement, 2 on usage, IO, or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use streamift::bench::{run_bench, to_csv};
use streamift::engine::{SolveMode, StreamSolution};
use streamift::ift::{check_hypotheses, derive_pipeline, IftError};
use streamift::parse::{parse_system, PolySystem};
use streamift::taylor::{build_classical_ode, compare_methods, taylor_solve};
use streamift::var::VarOrder;

#[derive(Parser)]
#[command(
    name = "streamift",
    version,
    about = "Derive and solve stream differential equations from implicit polynomial systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Sde,
    Ode,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the solvability hypotheses at the initial point
    Check {
        file: PathBuf,
        /// Differentiation order: comma-separated variable names, least first
        #[arg(long)]
        order: Option<String>,
    },
    /// Derive the polynomial stream differential system
    Sde {
        file: PathBuf,
        #[arg(long)]
        order: Option<String>,
        /// Emit the re-ingestable guarded system-file form instead
        #[arg(long)]
        guarded: bool,
    },
    /// Generate solution coefficients
    Coeffs {
        file: PathBuf,
        /// Highest coefficient index
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value = "sde")]
        method: MethodArg,
        #[arg(long)]
        order: Option<String>,
    },
    /// Run both methods and compare coefficients exactly
    Compare {
        file: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        order: Option<String>,
    },
    /// Time both methods over a range of coefficient counts, CSV on stdout
    Bench {
        file: PathBuf,
        /// Ascending comma-separated coefficient counts, e.g. 100,200,300
        #[arg(short)]
        k: String,
        /// Repetitions per measurement; the median is reported
        #[arg(long, default_value_t = 3)]
        repeat: usize,
        #[arg(long)]
        order: Option<String>,
    },
}

fn load_system(path: &Path) -> Result<PolySystem, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_system(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve_order(sys: &PolySystem, arg: Option<&str>) -> Result<VarOrder, String> {
    let Some(spec) = arg else {
        return Ok(sys.order.clone());
    };
    let mut perm = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match sys.names.iter().position(|n| n == name) {
            Some(i) => perm.push(i as u32 + 1),
            None => return Err(format!("--order mentions unknown variable `{name}`")),
        }
    }
    VarOrder::from_permutation(&perm)
        .ok_or_else(|| "--order must list every variable exactly once".to_string())
}

fn render_rows(rows: &[Vec<streamift::Rat>]) -> String {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn solution_rows(
    sys: &PolySystem,
    order: &VarOrder,
    k: usize,
    method: MethodArg,
) -> Result<Vec<Vec<streamift::Rat>>, IftError> {
    let n = sys.n();
    match method {
        MethodArg::Sde => {
            let sde = derive_pipeline(sys, order)?;
            let mut sol = StreamSolution::new(&sde, SolveMode::Sde);
            sol.extend(k);
            Ok((1..=n).map(|i| sol.stream(i).to_vec()).collect())
        }
        MethodArg::Ode => {
            let ode = build_classical_ode(sys)?;
            let rows = taylor_solve(&ode, k);
            Ok(rows.into_iter().take(n).collect())
        }
        MethodArg::Both => unreachable!("handled by caller"),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Check { file, order } => {
            let sys = load_system(&file)?;
            let order = resolve_order(&sys, order.as_deref())?;
            let report = check_hypotheses(&sys, &order).map_err(|e| e.to_string())?;
            print!("{}", report.render());
            Ok(if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Sde {
            file,
            order,
            guarded,
        } => {
            let sys = load_system(&file)?;
            let order = resolve_order(&sys, order.as_deref())?;
            match derive_pipeline(&sys, &order) {
                Ok(sde) => {
                    if guarded {
                        print!("{}", sde.as_guarded_system().render_file());
                    } else {
                        print!("{}", sde.render());
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(IftError::Hypothesis(report)) => {
                    eprint!("{}", report.render());
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Cmd::Coeffs {
            file,
            k,
            method,
            order,
        } => {
            let sys = load_system(&file)?;
            let order = resolve_order(&sys, order.as_deref())?;
            let outcome = (|| -> Result<ExitCode, IftError> {
                match method {
                    MethodArg::Both => {
                        let sde_rows = solution_rows(&sys, &order, k, MethodArg::Sde)?;
                        let ode_rows = solution_rows(&sys, &order, k, MethodArg::Ode)?;
                        println!("{}", render_rows(&sde_rows));
                        println!("{}", render_rows(&ode_rows));
                        if sde_rows == ode_rows {
                            Ok(ExitCode::SUCCESS)
                        } else {
                            eprintln!("methods disagree");
                            Ok(ExitCode::from(1))
                        }
                    }
                    single => {
                        let rows = solution_rows(&sys, &order, k, single)?;
                        println!("{}", render_rows(&rows));
                        Ok(ExitCode::SUCCESS)
                    }
                }
            })();
            match outcome {
                Ok(code) => Ok(code),
                Err(IftError::Hypothesis(report)) => {
                    eprint!("{}", report.render());
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Cmd::Compare { file, k, order } => {
            let sys = load_system(&file)?;
            let order = resolve_order(&sys, order.as_deref())?;
            match compare_methods(&sys, &order, k) {
                Ok(report) => {
                    println!("{report}");
                    Ok(if report.agree() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                Err(IftError::Hypothesis(report)) => {
                    eprint!("{}", report.render());
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Cmd::Bench {
            file,
            k,
            repeat,
            order,
        } => {
            let sys = load_system(&file)?;
            let order = resolve_order(&sys, order.as_deref())?;
            let mut k_list = Vec::new();
            for part in k.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let v: usize = part
                    .parse()
                    .map_err(|_| format!("bad coefficient count `{part}`"))?;
                k_list.push(v);
            }
            if k_list.is_empty() {
                return Err("no coefficient counts given".to_string());
            }
            if !k_list.windows(2).all(|w| w[0] < w[1]) {
                return Err("coefficient counts must be strictly ascending".to_string());
            }
            if repeat == 0 {
                return Err("--repeat must be at least 1".to_string());
            }
            let name = file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "system".to_string());
            match run_bench(&sys, &order, &name, &k_list, repeat) {
                Ok(records) => {
                    print!("{}", to_csv(&records));
                    Ok(ExitCode::SUCCESS)
                }
                Err(IftError::Hypothesis(report)) => {
                    eprint!("{}", report.render());
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.to_string()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

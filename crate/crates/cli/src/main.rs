use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grws_core::analysis::{DEFAULT_K_MAX, DEFAULT_N_MAX};
use grws_core::berger::DEFAULT_DEPTH;
use grws_core::completion::TwoAtomSpec;
use grws_core::hankel::{DEFAULT_J_PROBE, DEFAULT_K_PROBE};
use grws_core::rational::parse_rational;
use grws_core::registry::{CheckContext, CheckRegistry, TransformRegistry};
use grws_core::report::{self, to_json, SweepSpec};
use grws_core::{GrwsError, Rational, ShiftParams};

/// Exact analysis of geometrically regular weighted shifts.
#[derive(Parser, Debug)]
#[command(name = "grws", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sector label, predicted properties and the checks that test them.
    Classify {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        depth: Depths,
        /// Extra checks to run, comma separated.
        #[arg(long, value_delimiter = ',')]
        batteries: Vec<String>,
    },
    /// Compare exact Hankel determinants with the closed form.
    VerifyDet {
        #[command(flatten)]
        point: Point,
        #[arg(long = "k-max", default_value_t = 6)]
        k_max: usize,
        #[arg(long = "j-max", default_value_t = 10)]
        j_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build the atomic Berger measure and check its moments.
    VerifyBerger {
        #[command(flatten)]
        point: Point,
        /// Coefficients computed before truncation.
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Highest moment compared.
        #[arg(long = "depth-n", default_value_t = 12)]
        depth_n: usize,
    },
    /// Run named checks on one point.
    Battery {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        depth: Depths,
        #[arg(long, value_delimiter = ',', default_value = "mid")]
        batteries: Vec<String>,
    },
    /// Apply a transform pipeline, optionally ending in a battery.
    Transform {
        #[command(flatten)]
        point: Point,
        /// e.g. "aluthge|subshift:2,1|battery:log-alternating"
        #[arg(long)]
        pipeline: String,
        #[arg(long = "depth-n", default_value_t = DEFAULT_N_MAX)]
        depth_n: usize,
        #[arg(long = "depth-k", default_value_t = DEFAULT_K_MAX)]
        depth_k: usize,
    },
    /// Complete the moments of a two-atomic measure by a GRWS.
    Complete {
        /// Relative mass at the atom 1/p.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Family parameter in (-1, 0].
        #[arg(long = "N", allow_hyphen_values = true)]
        n: Option<String>,
    },
    /// Run checks over a grid of the open square.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        step: String,
        #[arg(long, value_delimiter = ',')]
        batteries: Vec<String>,
        #[command(flatten)]
        depth: Depths,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Point {
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    #[arg(long = "N", allow_hyphen_values = true)]
    n: String,
    #[arg(long = "D", allow_hyphen_values = true)]
    d: String,
}

impl Point {
    fn params(&self) -> Result<ShiftParams, GrwsError> {
        ShiftParams::new(
            parse_rational(&self.p)?,
            parse_rational(&self.n)?,
            parse_rational(&self.d)?,
        )
    }
}

#[derive(Args, Debug)]
struct Depths {
    /// Highest difference order tested.
    #[arg(long = "depth-n", default_value_t = DEFAULT_N_MAX)]
    depth_n: usize,
    /// Highest starting index tested.
    #[arg(long = "depth-k", default_value_t = DEFAULT_K_MAX)]
    depth_k: usize,
    /// Largest hyponormality order probed.
    #[arg(long = "k-max", default_value_t = DEFAULT_K_PROBE)]
    k_max: usize,
    /// Largest Hankel window start probed.
    #[arg(long = "j-max", default_value_t = DEFAULT_J_PROBE)]
    j_max: usize,
}

impl Depths {
    fn context(&self, params: ShiftParams) -> CheckContext {
        CheckContext {
            n_max: self.depth_n,
            k_max: self.depth_k,
            k_probe: self.k_max,
            j_probe: self.j_max,
            ..CheckContext::new(params)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Report text plus whether an invariant was breached.
struct Output {
    text: String,
    breach: bool,
}

fn ok(text: String) -> Result<Output, GrwsError> {
    Ok(Output {
        text,
        breach: false,
    })
}

fn run(cli: Cli) -> Result<Output, GrwsError> {
    match cli.command {
        Command::Classify {
            point,
            depth,
            batteries,
        } => {
            let ctx = depth.context(point.params()?);
            let r = report::classify_report(&ctx, &CheckRegistry::default(), &batteries)?;
            Ok(Output {
                breach: r.contradictions() > 0,
                text: to_json(&r),
            })
        }
        Command::VerifyDet {
            point,
            k_max,
            j_max,
            format,
        } => {
            let r = report::det_report(&point.params()?, k_max, j_max)?;
            let text = match format {
                Format::Json => to_json(&r),
                Format::Csv => report::det_csv(&r),
            };
            Ok(Output {
                breach: r.mismatches > 0,
                text,
            })
        }
        Command::VerifyBerger {
            point,
            depth,
            depth_n,
        } => {
            let r = report::berger_report(&point.params()?, depth, depth_n);
            Ok(Output {
                breach: r.representation.as_ref().is_some_and(|v| v.is_violated()),
                text: to_json(&r),
            })
        }
        Command::Battery {
            point,
            depth,
            batteries,
        } => {
            let ctx = depth.context(point.params()?);
            ok(to_json(&report::battery_report(
                &ctx,
                &CheckRegistry::default(),
                &batteries,
            )?))
        }
        Command::Transform {
            point,
            pipeline,
            depth_n,
            depth_k,
        } => {
            let r = report::transform_report(
                &point.params()?,
                &pipeline,
                &TransformRegistry::default(),
                depth_n,
                depth_k,
            )?;
            ok(to_json(&r))
        }
        Command::Complete { a, p, n } => {
            let spec = TwoAtomSpec::new(parse_rational(&a)?, parse_rational(&p)?)?;
            let n: Option<Rational> = n.as_deref().map(parse_rational).transpose()?;
            ok(to_json(&report::complete_report(&spec, n.as_ref())?))
        }
        Command::Sweep {
            p,
            step,
            batteries,
            depth,
            format,
            jobs,
        } => {
            let p = parse_rational(&p)?;
            // validates p before any grid work
            let probe = ShiftParams::new(p.clone(), Rational::default(), Rational::default())?;
            let checks = if batteries.is_empty() {
                report::SWEEP_CHECKS.iter().map(|s| s.to_string()).collect()
            } else {
                batteries
            };
            let spec = SweepSpec {
                p,
                step: parse_rational(&step)?,
                checks,
                template: depth.context(probe),
            };
            let registry = CheckRegistry::default();
            let r = match jobs {
                Some(0) => {
                    return Err(GrwsError::InvalidArgument(
                        "--jobs must be at least 1".into(),
                    ))
                }
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build()
                    .map_err(|e| GrwsError::InvalidArgument(e.to_string()))?
                    .install(|| report::sweep(&spec, &registry))?,
                None => report::sweep(&spec, &registry)?,
            };
            ok(match format {
                Format::Json => to_json(&r),
                Format::Csv => report::sweep_csv(&r),
            })
        }
    }
}

fn error_json(kind: &str, message: &str) -> String {
    let v = serde_json::json!({ "error": kind, "message": message });
    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            print!("{}", error_json("usage", e.to_string().trim_end()));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.breach {
                eprintln!("invariant breach: see report");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            print!("{}", error_json(e.kind(), &e.to_string()));
            ExitCode::from(1)
        }
    }
}

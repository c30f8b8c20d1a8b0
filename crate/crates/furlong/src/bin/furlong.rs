//! Batch driver for the furlong library.
//!
//! Thin by design: every subcommand parses flags into library types and
//! delegates. Fatal errors print a machine-readable JSON summary on
//! stderr and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use furlong::ingest::open_archive;
use furlong::pipeline::{
    build_datasets, build_returns, run_pipeline, summarize, write_report_tables, AnalysisReport,
    RunConfig,
};
use furlong::synth::{generate_series, write_stream_tree, Family, GeneratorSpec, SyntheticStreamSpec};

#[derive(Parser)]
#[command(name = "furlong", version, about = "Betting-exchange stream parsing and stylized-facts analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Repeat for more log detail (-v, -vv)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an archive and print message counts and data-quality warnings
    Ingest {
        /// tar.bz2 archive, directory tree, or single market file
        input: PathBuf,
    },
    /// Replay into the runner-change, definition, and winners CSVs
    Build {
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compute commission-adjusted settlement return files
    Returns {
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Commission override in [0, 1); default: market base rate or 5%
        #[arg(long)]
        commission: Option<f64>,
    },
    /// Full pipeline: datasets, returns, estimators, report, plot data
    Analyze(AnalyzeArgs),
    /// Summarize an existing report.json and re-derive its CSV tables
    Report {
        report: PathBuf,
        /// Where to write the derived tables (default: the report's directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded synthetic data generators
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// TOML config file; flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    commission: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    max_lag: Option<usize>,
    /// Comma-separated Hill tail fractions, e.g. 0.01,0.05,0.1
    #[arg(long, value_delimiter = ',')]
    k_fractions: Option<Vec<f64>>,
    #[arg(long)]
    ks_level: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the Hurst estimator
    #[arg(long)]
    no_hurst: bool,
    /// Skip the generalized Gaussian fit
    #[arg(long)]
    no_gg_fit: bool,
    /// Skip ADF and KPSS
    #[arg(long)]
    no_stationarity: bool,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum SynthCommand {
    /// Draw a seeded return series and write it as CSV (t,value)
    Series {
        /// gaussian | laplace | generalized_gaussian | pareto | student_t |
        /// ar1 | random_walk | garch11
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "series.csv")]
        out: PathBuf,
        #[arg(long)] mean: Option<f64>,
        #[arg(long)] std: Option<f64>,
        #[arg(long)] loc: Option<f64>,
        #[arg(long)] scale: Option<f64>,
        #[arg(long)] mu: Option<f64>,
        #[arg(long)] beta: Option<f64>,
        #[arg(long)] alpha: Option<f64>,
        #[arg(long)] x_min: Option<f64>,
        #[arg(long)] df: Option<f64>,
        #[arg(long)] phi: Option<f64>,
        #[arg(long)] omega: Option<f64>,
        #[arg(long)] a1: Option<f64>,
        #[arg(long)] b1: Option<f64>,
    },
    /// Generate a synthetic exchange stream as an ingestible directory tree
    Stream {
        #[arg(long, default_value_t = 1)]
        markets: usize,
        #[arg(long, default_value_t = 200)]
        messages: usize,
        #[arg(long, default_value_t = 3)]
        runners_min: usize,
        #[arg(long, default_value_t = 21)]
        runners_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "stream")]
        out: PathBuf,
        /// Write bz2-compressed market files instead of plain JSON lines
        #[arg(long)]
        compress: bool,
    },
}

struct FamilyFlags {
    mean: Option<f64>,
    std: Option<f64>,
    loc: Option<f64>,
    scale: Option<f64>,
    mu: Option<f64>,
    beta: Option<f64>,
    alpha: Option<f64>,
    x_min: Option<f64>,
    df: Option<f64>,
    phi: Option<f64>,
    omega: Option<f64>,
    a1: Option<f64>,
    b1: Option<f64>,
}

fn family_from_flags(name: &str, f: &FamilyFlags) -> Result<Family, String> {
    let family = match name {
        "gaussian" => Family::Gaussian {
            mean: f.mean.unwrap_or(0.0),
            std: f.std.unwrap_or(1.0),
        },
        "laplace" => Family::Laplace {
            loc: f.loc.unwrap_or(0.0),
            scale: f.scale.unwrap_or(1.0),
        },
        "generalized_gaussian" => Family::GeneralizedGaussian {
            mu: f.mu.unwrap_or(0.0),
            scale: f.scale.unwrap_or(1.0),
            beta: f.beta.unwrap_or(2.0),
        },
        "pareto" => Family::Pareto {
            alpha: f.alpha.unwrap_or(3.0),
            x_min: f.x_min.unwrap_or(1.0),
        },
        "student_t" => Family::StudentT { df: f.df.unwrap_or(4.0) },
        "ar1" => Family::Ar1 { phi: f.phi.unwrap_or(0.5) },
        "random_walk" => Family::RandomWalk,
        "garch11" => Family::Garch11 {
            omega: f.omega.unwrap_or(0.005),
            a1: f.a1.unwrap_or(0.05),
            b1: f.b1.unwrap_or(0.945),
        },
        other => return Err(format!("unknown family {other:?}")),
    };
    Ok(family)
}

fn analyze_config(args: &AnalyzeArgs) -> furlong::Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_toml_file(path)?,
        None => RunConfig::default(),
    };
    config.input = args.input.clone();
    config.out_dir = args.out.clone();
    if let Some(c) = args.commission {
        config.commission = Some(c);
    }
    if let Some(s) = args.scale {
        config.scale = s;
    }
    if let Some(l) = args.max_lag {
        config.max_lag = l;
    }
    if let Some(k) = &args.k_fractions {
        config.k_fractions = k.clone();
    }
    if let Some(level) = args.ks_level {
        config.ks_level = level;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.no_hurst {
        config.estimators.hurst = false;
    }
    if args.no_gg_fit {
        config.estimators.gg_fit = false;
    }
    if args.no_stationarity {
        config.estimators.adf = false;
        config.estimators.kpss = false;
    }
    Ok(config)
}

fn run(cli: Cli) -> furlong::Result<()> {
    match cli.command {
        Command::Ingest { input } => {
            let streams = open_archive(&input)?;
            let mut total_messages = 0usize;
            let mut total_warnings = 0usize;
            for stream in &streams {
                let parsed = stream.parse()?;
                total_messages += parsed.stats.messages;
                total_warnings += parsed.warnings.len();
                println!(
                    "{}/{}: {} messages, {} unknown fields, {} warnings",
                    parsed.event_id,
                    parsed.market_id,
                    parsed.stats.messages,
                    parsed.stats.unknown_fields,
                    parsed.warnings.len()
                );
                for warning in parsed.warnings.iter().take(5) {
                    println!("  warning: {warning}");
                }
            }
            println!(
                "{} market files, {total_messages} messages, {total_warnings} warnings",
                streams.len()
            );
        }
        Command::Build { input, out } => {
            let summary = build_datasets(&input, &out)?;
            println!(
                "{} markets -> {} runner-change rows, {} definition rows, {} winners ({} warnings)",
                summary.markets,
                summary.runner_change_rows,
                summary.definition_rows,
                summary.winners,
                summary.warnings
            );
            for path in &summary.written {
                println!("wrote {}", path.display());
            }
        }
        Command::Returns {
            input,
            out,
            commission,
        } => {
            let summary = build_returns(&input, &out, commission)?;
            println!(
                "{} markets settled: {} positive, {} negative, {} zero records ({} warnings)",
                summary.markets_settled,
                summary.positive,
                summary.negative,
                summary.zeros,
                summary.warnings
            );
            for path in &summary.written {
                println!("wrote {}", path.display());
            }
        }
        Command::Analyze(args) => {
            let config = analyze_config(&args)?;
            let output = run_pipeline(&config)?;
            print!("{}", summarize(&output.report));
            println!(
                "wrote {} files under {}",
                output.written.len(),
                config.out_dir.display()
            );
        }
        Command::Report { report, out } => {
            let parsed = AnalysisReport::from_json_file(&report)?;
            print!("{}", summarize(&parsed));
            let out_dir = out.unwrap_or_else(|| {
                report
                    .parent()
                    .map(|p| p.to_path_buf())
                    .unwrap_or_else(|| PathBuf::from("."))
            });
            let written = write_report_tables(&parsed, &out_dir)?;
            println!("derived {} tables under {}", written.len(), out_dir.display());
        }
        Command::Synth(synth) => match synth {
            SynthCommand::Series {
                family,
                n,
                seed,
                out,
                mean,
                std,
                loc,
                scale,
                mu,
                beta,
                alpha,
                x_min,
                df,
                phi,
                omega,
                a1,
                b1,
            } => {
                let flags = FamilyFlags {
                    mean, std, loc, scale, mu, beta, alpha, x_min, df, phi, omega, a1, b1,
                };
                let family = family_from_flags(&family, &flags).map_err(furlong::Error::Domain)?;
                let spec = GeneratorSpec { family, n, seed };
                let series = generate_series(&spec)?;
                let mut writer = csv::Writer::from_path(&out).map_err(furlong::Error::from)?;
                writer
                    .write_record(["t", "value"])
                    .map_err(furlong::Error::from)?;
                for (t, v) in &series.points {
                    writer
                        .write_record(&[t.to_string(), v.to_string()])
                        .map_err(furlong::Error::from)?;
                }
                writer.flush().map_err(|e| furlong::Error::io(&out, e))?;
                println!("wrote {} values to {}", series.len(), out.display());
            }
            SynthCommand::Stream {
                markets,
                messages,
                runners_min,
                runners_max,
                seed,
                out,
                compress,
            } => {
                let spec = SyntheticStreamSpec {
                    markets,
                    runners_min,
                    runners_max,
                    messages_per_market: messages,
                    seed,
                    ..Default::default()
                };
                let paths = write_stream_tree(&spec, &out, compress)?;
                println!("wrote {} market files under {}", paths.len(), out.display());
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    // die quietly when stdout is a closed pipe (e.g. `furlong ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let summary = serde_json::json!({ "error": e.to_string() });
            eprintln!("{summary}");
            ExitCode::FAILURE
        }
    }
}

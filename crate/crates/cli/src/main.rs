//! `ptorus`: simple geodesic spectra, homology norm balls, counting
//! series, and property verification for hyperbolic once-punctured tori.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ptorus_cli::{CliError, FileConfig, Format, Mode, RunConfig, TripleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Float,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Optional JSON config file mirroring the flags; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fricke triple "x,y,z" or the preset "modular" = 3,3,3.
    #[arg(long, global = true)]
    triple: Option<String>,
    /// Trace arithmetic: float (doubles) or exact (big integers; integer
    /// triples only).
    #[arg(long, value_enum, global = true)]
    mode: Option<ModeArg>,
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<FormatArg>,
    /// Output path; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for spectrum enumeration; output is identical for
    /// every setting.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Debug, Parser)]
#[command(
    name = "ptorus",
    about = "Simple closed geodesics on hyperbolic once-punctured tori",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Count simple closed geodesics up to each cutoff L.
    Count {
        #[command(flatten)]
        common: Common,
        /// Length cutoff; repeatable.
        #[arg(long = "L")]
        l: Vec<f64>,
        /// Also report the counting constant predicted by the unit ball.
        #[arg(long)]
        with_ball: bool,
        /// Farey depth of the ball used with --with-ball.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Emit the simple length spectrum up to L.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Length cutoff.
        #[arg(long = "L")]
        l: Option<f64>,
    },
    /// Emit the unit ball of the homology norm.
    Ball {
        #[command(flatten)]
        common: Common,
        /// Farey sampling depth.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Report maximal lift heights against the length-2 cusp region.
    Cusp {
        #[command(flatten)]
        common: Common,
        /// Largest |m| + |n| of the slopes examined.
        #[arg(long)]
        word_bound: Option<u64>,
        /// Conjugator word length per lift.
        #[arg(long)]
        conj_depth: Option<u32>,
    },
    /// Run the property-verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// all | oracle | counting | triangle | convexity | cusp.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        word_bound: Option<u64>,
        #[arg(long)]
        conj_depth: Option<u32>,
    },
}

fn resolve(common: &Common) -> Result<(RunConfig, FileConfig), CliError> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let defaults = RunConfig::default();
    let triple_str = common
        .triple
        .clone()
        .or_else(|| file.triple.clone())
        .unwrap_or_else(|| "modular".into());
    let cfg = RunConfig {
        triple: TripleSpec::parse(&triple_str)?,
        mode: common
            .mode
            .map(|m| match m {
                ModeArg::Float => Mode::Float,
                ModeArg::Exact => Mode::Exact,
            })
            .or(file.mode)
            .unwrap_or(defaults.mode),
        format: common
            .format
            .map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            })
            .or(file.format)
            .unwrap_or(defaults.format),
        out: common.out.clone().or_else(|| file.out.clone()),
        parallel: common
            .parallel
            .or(file.parallel)
            .unwrap_or(defaults.parallel)
            .max(1),
        ..defaults
    };
    Ok((cfg, file))
}

fn run(cli: Cli) -> i32 {
    let build = || -> Result<(&'static str, RunConfig), CliError> {
        match &cli.cmd {
            Cmd::Count {
                common,
                l,
                with_ball,
                depth,
            } => {
                let (mut cfg, file) = resolve(common)?;
                cfg.l = if l.is_empty() {
                    file.l.unwrap_or_default()
                } else {
                    l.clone()
                };
                cfg.with_ball = *with_ball || file.with_ball.unwrap_or(false);
                cfg.depth = depth.or(file.depth).unwrap_or(12);
                Ok(("count", cfg))
            }
            Cmd::Spectrum { common, l } => {
                let (mut cfg, file) = resolve(common)?;
                cfg.l = l
                    .map(|v| vec![v])
                    .or(file.l)
                    .unwrap_or_default();
                Ok(("spectrum", cfg))
            }
            Cmd::Ball { common, depth } => {
                let (mut cfg, file) = resolve(common)?;
                cfg.depth = depth.or(file.depth).unwrap_or(8);
                Ok(("ball", cfg))
            }
            Cmd::Cusp {
                common,
                word_bound,
                conj_depth,
            } => {
                let (mut cfg, file) = resolve(common)?;
                cfg.word_bound = word_bound.or(file.word_bound).unwrap_or(6);
                cfg.conj_depth = conj_depth.or(file.conj_depth).unwrap_or(4);
                Ok(("cusp", cfg))
            }
            Cmd::Verify {
                common,
                suite,
                word_bound,
                conj_depth,
            } => {
                let (mut cfg, file) = resolve(common)?;
                cfg.suite = suite
                    .clone()
                    .or_else(|| file.suite.clone())
                    .unwrap_or_else(|| "all".into());
                cfg.word_bound = word_bound.or(file.word_bound).unwrap_or(6);
                cfg.conj_depth = conj_depth.or(file.conj_depth).unwrap_or(4);
                Ok(("verify", cfg))
            }
        }
    };
    match build() {
        Ok((command, cfg)) => ptorus_cli::dispatch(command, &cfg),
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()) as u8)
}

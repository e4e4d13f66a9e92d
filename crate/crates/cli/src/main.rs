//! `relaynet`: rate analysis for a bidirectional two-tier relay network.
//!
//! Subcommands: `sweep` (Monte-Carlo over the power parameter), `surface`
//! (basestation-power x user-power grid at fixed relay power), `solve`
//! (full single-instance report), `bound` (cut-set bound only).

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use relaynet_core::{
    bound_single, channels_from_cfg, run_surface, run_sweep, solve_single, surface_to_csv,
    sweep_rows_to_csv, ChannelModel, ChannelRealization, ChannelsDoc, GaussianKind, Mode,
    SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "relaynet",
    about = "Achievable rates, cut-set bounds, and TDMA baseline for a \
             bidirectional two-tier relay network",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo sweep over the power parameter P (budgets P, P/2, P/4).
    Sweep(CommonArgs),
    /// Trial-averaged sum-rate surface over (P_BS, P_U) at fixed relay power.
    Surface(CommonArgs),
    /// Solve a single instance and emit the full JSON report.
    Solve(CommonArgs),
    /// Cut-set bound of a single instance.
    Bound(CommonArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Real Gaussian entries, unit variance.
    Real,
    /// Circularly-symmetric complex Gaussian entries, unit variance.
    Complex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Basestation antenna count.
    #[arg(long, default_value_t = 5)]
    m: usize,

    /// Monte-Carlo trials per grid point.
    #[arg(long, default_value_t = 500)]
    trials: usize,

    /// Master seed (overridden by RELAYNET_SEED when set).
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Power grid "start:end:step" (inclusive), or a single value "8".
    /// `solve` and `bound` use the first grid value.
    #[arg(long = "p-grid", default_value = "0:25:1")]
    p_grid: String,

    /// Fading distribution of the channel entries.
    #[arg(long = "channel-model", value_enum, default_value_t = ModelArg::Real)]
    channel_model: ModelArg,

    /// Fixed relay power for the surface mode.
    #[arg(long = "p-r-fixed", default_value_t = 5.0)]
    p_r_fixed: f64,

    /// JSON channels file; when absent, channels are sampled from the seed.
    #[arg(long = "channels-file")]
    channels_file: Option<PathBuf>,

    /// Reproduce the alternative transmit-branch labeling and psi1 power
    /// pairing for comparison; residual interference is not nulled.
    #[arg(long = "strict-paper", default_value_t = false)]
    strict_paper: bool,

    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format (default: csv for sweep/surface, json for solve/bound).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

/// Parse "start:end:step" (inclusive) or a single value.
fn parse_p_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("invalid number {s:?} in --p-grid"))
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [start, end, step] => {
            let (a, b, h) = (parse(start)?, parse(end)?, parse(step)?);
            if h <= 0.0 {
                bail!("--p-grid step must be positive, got {h}");
            }
            if b < a {
                bail!("--p-grid end {b} is below start {a}");
            }
            let mut grid = Vec::new();
            let mut k = 0u64;
            loop {
                let v = a + h * k as f64;
                if v > b + 1e-9 * h.max(1.0) {
                    break;
                }
                grid.push(v.min(b));
                k += 1;
            }
            Ok(grid)
        }
        _ => bail!("--p-grid expects \"start:end:step\" or a single value, got {spec:?}"),
    }
}

fn build_config(args: &CommonArgs, mode: Mode) -> Result<SweepConfig> {
    let seed = match std::env::var("RELAYNET_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .with_context(|| format!("RELAYNET_SEED={s:?} is not a valid u64"))?,
        Err(_) => args.seed,
    };
    let kind = match args.channel_model {
        ModelArg::Real => GaussianKind::Real,
        ModelArg::Complex => GaussianKind::ComplexCircular,
    };
    Ok(SweepConfig {
        m: args.m,
        trials: args.trials,
        seed,
        channel_model: ChannelModel::new(kind, 1.0)?,
        p_grid: parse_p_grid(&args.p_grid)?,
        mode,
        strict_paper: args.strict_paper,
    })
}

fn load_channels(args: &CommonArgs, cfg: &SweepConfig) -> Result<ChannelRealization> {
    match &args.channels_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading channels file {}", path.display()))?;
            let ch = ChannelsDoc::from_json(&text)?.to_realization()?;
            Ok(ch)
        }
        None => Ok(channels_from_cfg(cfg)?),
    }
}

fn emit(args: &CommonArgs, text: String) -> Result<()> {
    match &args.out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing output to {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = build_config(&args, Mode::Sweep)?;
            let rows = run_sweep(&cfg)?;
            let text = match args.format.unwrap_or(FormatArg::Csv) {
                FormatArg::Csv => sweep_rows_to_csv(&rows),
                FormatArg::Json => json_line(&rows)?,
            };
            emit(&args, text)
        }
        Command::Surface(args) => {
            let cfg = build_config(&args, Mode::Surface)?;
            let grid = run_surface(&cfg, &cfg.p_grid, &cfg.p_grid, args.p_r_fixed)?;
            let text = match args.format.unwrap_or(FormatArg::Csv) {
                FormatArg::Csv => surface_to_csv(&grid),
                FormatArg::Json => json_line(&grid)?,
            };
            emit(&args, text)
        }
        Command::Solve(args) => {
            let cfg = build_config(&args, Mode::Solve)?;
            if args.format == Some(FormatArg::Csv) {
                bail!("solve emits a structured report; only --format json is supported");
            }
            let ch = load_channels(&args, &cfg)?;
            let p = cfg.p_grid[0];
            let report = solve_single(&cfg, &ch, p)?;
            emit(&args, json_line(&report)?)
        }
        Command::Bound(args) => {
            let cfg = build_config(&args, Mode::Bound)?;
            if args.format == Some(FormatArg::Csv) {
                bail!("bound emits a structured report; only --format json is supported");
            }
            let ch = load_channels(&args, &cfg)?;
            let p = cfg.p_grid[0];
            let report = bound_single(&cfg, &ch, p)?;
            emit(&args, json_line(&report)?)
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_grid_single_value() {
        assert_eq!(parse_p_grid("8").unwrap(), vec![8.0]);
        assert_eq!(parse_p_grid(" 2.5 ").unwrap(), vec![2.5]);
    }

    #[test]
    fn p_grid_range() {
        assert_eq!(
            parse_p_grid("0:25:5").unwrap(),
            vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
        );
        let fine = parse_p_grid("0:25:1").unwrap();
        assert_eq!(fine.len(), 26);
        assert_eq!(*fine.last().unwrap(), 25.0);
    }

    #[test]
    fn p_grid_fractional_step_hits_endpoint() {
        let g = parse_p_grid("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p_grid_rejects_bad_specs() {
        assert!(parse_p_grid("").is_err());
        assert!(parse_p_grid("1:2").is_err());
        assert!(parse_p_grid("5:1:1").is_err());
        assert!(parse_p_grid("0:5:0").is_err());
        assert!(parse_p_grid("a:b:c").is_err());
    }
}

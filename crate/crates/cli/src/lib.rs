//! Command-line front end for the `xccy-eps` pricing library: reference
//! tables, single quotes, hedge tickets, fair fees and simulated paths.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use xccy_eps::BasketVariant;

use crate::commands::{Method, QuoteKind, Strategy};
pub use crate::config::{RowSpec, RunConfig, DEFAULT_CONFIG};
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "xeps",
    version,
    about = "Price and hedge cross-currency equity protection swaps"
)]
pub struct Cli {
    /// Configuration file; the bundled reference configuration when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for simulations, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of simulated paths, overriding the configuration.
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; plain text for single quotes when absent.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Domestic,
    Nominal,
    Effective,
    Quanto,
    Aggregated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Effective,
    Quanto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Geometric,
    Moments,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Replication,
    Superhedge,
    Approximate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reproduce a reference table (2: separate returns, 3: aggregated
    /// effective, 4: aggregated quanto) over the configured rows.
    Tables {
        /// Table number: 2, 3 or 4.
        id: u8,
    },
    /// Quote one configured row.
    Price {
        #[arg(long, value_enum, default_value = "domestic")]
        kind: KindArg,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// 1-based row of the configuration.
        #[arg(long, default_value_t = 1)]
        row: usize,
    },
    /// Hedge ticket with currency strikes and option units for one row.
    Hedge {
        #[arg(long, value_enum, default_value = "replication")]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value = "effective")]
        variant: VariantArg,
        /// Premium method of the replication strategy.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, default_value_t = 1)]
        row: usize,
    },
    /// Fee rate at which the quote of one row vanishes.
    FairFee {
        #[arg(long, value_enum, default_value = "domestic")]
        kind: KindArg,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, default_value_t = 1)]
        row: usize,
    },
    /// Simulated paths of both stocks and the exchange rate as CSV.
    Paths {
        /// Time steps per path.
        #[arg(long, default_value_t = 252)]
        steps: usize,
    },
}

impl From<KindArg> for QuoteKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Domestic => QuoteKind::Domestic,
            KindArg::Nominal => QuoteKind::Nominal,
            KindArg::Effective => QuoteKind::Effective,
            KindArg::Quanto => QuoteKind::Quanto,
            KindArg::Aggregated => QuoteKind::Aggregated,
        }
    }
}

impl From<VariantArg> for BasketVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Effective => BasketVariant::Effective,
            VariantArg::Quanto => BasketVariant::Quanto,
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Geometric => Method::Geometric,
            MethodArg::Moments => Method::Moments,
            MethodArg::Mc => Method::Mc,
        }
    }
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Replication => Strategy::Replication,
            StrategyArg::Superhedge => Strategy::Superhedge,
            StrategyArg::Approximate => Strategy::Approximate,
        }
    }
}

/// Loads the configuration named by the flags and applies the seed and
/// path overrides.
pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::bundled(),
    };
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    if let Some(n) = cli.paths {
        if n == 0 {
            return Err(CliError::Usage("--paths must be at least 1".into()));
        }
        cfg.mc.n_paths = n;
    }
    Ok(cfg)
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn no_csv(cli: &Cli, what: &str) -> Result<bool, CliError> {
    match cli.format {
        Some(Format::Csv) => Err(CliError::Usage(format!(
            "{what} supports text or --format json"
        ))),
        Some(Format::Json) => Ok(true),
        None => Ok(false),
    }
}

/// Runs a parsed command and returns the text it produces.
pub fn render(cli: &Cli) -> Result<String, CliError> {
    let cfg = load_config(cli)?;
    log::debug!(
        "{} rows, {} paths, seed {}",
        cfg.rows.len(),
        cfg.mc.n_paths,
        cfg.mc.seed
    );
    match &cli.command {
        Command::Tables { id } => {
            let rows = commands::table(&cfg, *id)?;
            Ok(match cli.format {
                Some(Format::Json) => json_text(&commands::table_json(&cfg, &rows)),
                _ => commands::table_csv(&cfg, &rows),
            })
        }
        Command::Price {
            kind,
            variant,
            method,
            row,
        } => {
            let json = no_csv(cli, "price")?;
            let pq = commands::price(
                &cfg,
                *row,
                (*kind).into(),
                variant.map(Into::into),
                method.map(Into::into),
            )?;
            Ok(if json {
                json_text(&commands::price_json(&cfg, *row, &pq)?)
            } else {
                commands::price_text(&cfg, &pq)
            })
        }
        Command::Hedge {
            strategy,
            variant,
            method,
            row,
        } => {
            let json = no_csv(cli, "hedge")?;
            let ticket = commands::hedge(
                &cfg,
                *row,
                (*strategy).into(),
                (*variant).into(),
                method.map(Into::into),
            )?;
            Ok(if json {
                json_text(&commands::hedge_json(&ticket))
            } else {
                commands::hedge_text(&ticket)
            })
        }
        Command::FairFee {
            kind,
            variant,
            method,
            row,
        } => {
            let json = no_csv(cli, "fair-fee")?;
            let ff = commands::fair_fee_row(
                &cfg,
                *row,
                (*kind).into(),
                variant.map(Into::into),
                method.map(Into::into),
            )?;
            Ok(if json {
                json_text(&commands::fair_fee_json(&ff))
            } else {
                commands::fair_fee_text(&ff)
            })
        }
        Command::Paths { steps } => {
            if cli.format == Some(Format::Json) {
                return Err(CliError::Usage("paths writes CSV only".into()));
            }
            commands::paths_csv(&cfg, *steps, cli.paths.unwrap_or(1), cfg.mc.seed)
        }
    }
}

/// Runs a parsed command, writing to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let text = render(cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

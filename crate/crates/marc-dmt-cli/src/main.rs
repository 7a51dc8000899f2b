//! Command-line front end: tradeoff curve generation, oracle verification,
//! outage Monte Carlo sweeps, and codeword-level protocol simulation, all
//! emitting CSV.
//!
//! Exit status: 0 on success, 1 on verification failure, 2 on usage error.

mod cmds;
mod config;
mod fmt;

use std::fmt::Display;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{
    parse_f64, parse_snr_spec, parse_u64, parse_usize, parse_usize_list, parse_window, ConfigMap,
};
use marc_dmt::codeword_sim::ProtocolMode;

/// A bad flag or config value; maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Parser)]
#[command(
    name = "marc-dmt",
    version,
    about = "Diversity-multiplexing tradeoff toolkit for DDF/HDAF relaying on the two-user multiple-access relay channel"
)]
struct Cli {
    /// Plain key=value config file merged under flags (flags win)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample analytic tradeoff curves to CSV
    Curve(CurveArgs),
    /// Check every closed form against the grid oracle and certify the
    /// correlated-term and hybrid inequalities
    Verify(VerifyArgs),
    /// Monte Carlo outage sweep with a diversity-slope fit
    Outage(OutageArgs),
    /// Codeword-level protocol simulation
    Sim(SimArgs),
    /// Finite-M DDF curves for M = 2, 5, 10, 20 next to the infinite-M
    /// limit
    Fig2(Fig2Args),
}

#[derive(Args)]
struct CurveArgs {
    /// ddf_finite, ddf_infinite, maf, hdaf, or hdaf_modified
    #[arg(long)]
    protocol: Option<String>,
    /// Comma-separated slot counts, e.g. 2,5,10,20
    #[arg(long = "M", value_name = "LIST")]
    m_list: Option<String>,
    /// Uniform sample count on [0, 1] (breakpoints are added)
    #[arg(long)]
    samples: Option<usize>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Slot counts to verify, e.g. 2,4,5
    #[arg(long = "M", value_name = "LIST")]
    m_list: Option<String>,
    /// Multiplexing-gain grid step
    #[arg(long)]
    r_step: Option<f64>,
    /// Grid stride for the closed-form oracles
    #[arg(long)]
    oracle_step: Option<f64>,
    /// Grid stride for the correlated-term and hybrid objectives
    #[arg(long)]
    certify_step: Option<f64>,
    /// Inject a known-bad closed-form value to exercise the FAIL path
    #[arg(long)]
    corrupt: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OutageArgs {
    /// Slots per codeword
    #[arg(long = "M")]
    slots: Option<usize>,
    /// Sum multiplexing gain in [0, 1]
    #[arg(long)]
    r: Option<f64>,
    /// SNR sweep in dB: start:stop:step or a comma list
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Source-relay SNR advantage in dB
    #[arg(long)]
    offset_db: Option<f64>,
    /// Fit window lo:hi in dB (defaults to the whole sweep)
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// ddf, maf, hdaf, or hdaf_modified
    #[arg(long)]
    mode: Option<String>,
    #[arg(long = "M")]
    slots: Option<usize>,
    #[arg(long = "T")]
    symbols_per_slot: Option<usize>,
    /// Messages per user
    #[arg(long = "n")]
    n_msgs: Option<usize>,
    /// Multiplexing gain selecting the hybrid regime
    #[arg(long)]
    r: Option<f64>,
    /// Sphere growth factor (needs mu*T > 3)
    #[arg(long)]
    mu: Option<f64>,
    /// SNR sweep in dB: start:stop:step or a comma list
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Second mode run seed-paired; reports the outcome agreement rate
    #[arg(long)]
    compare_mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig2Args {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<ProtocolMode, UsageError> {
    ProtocolMode::parse(s).map_err(|e| UsageError(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<i32, UsageError> {
    let cfg = match &cli.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::default(),
    };
    match cli.command {
        Command::Curve(a) => {
            let protocol = cfg.resolve(
                a.protocol,
                "protocol",
                |s| Ok(s.to_string()),
                "ddf_finite".to_string(),
            )?;
            let m_list = cfg.resolve(
                a.m_list.map(|s| parse_usize_list(&s)).transpose()?,
                "M",
                parse_usize_list,
                vec![2, 5, 10, 20],
            )?;
            let samples = cfg.resolve(a.samples, "samples", parse_usize, 201)?;
            let out = cfg.resolve_opt(a.out, "out", |s| Ok(PathBuf::from(s)))?;
            cmds::cmd_curve(&protocol, &m_list, samples, out.as_deref())
        }
        Command::Verify(a) => {
            let params = cmds::VerifyParams {
                m_list: cfg.resolve(
                    a.m_list.map(|s| parse_usize_list(&s)).transpose()?,
                    "M",
                    parse_usize_list,
                    vec![2, 4, 5],
                )?,
                r_step: cfg.resolve(a.r_step, "r_step", parse_f64, 0.1)?,
                oracle_step: cfg.resolve(a.oracle_step, "oracle_step", parse_f64, 0.02)?,
                certify_step: cfg.resolve(a.certify_step, "certify_step", parse_f64, 0.05)?,
                corrupt: a.corrupt,
            };
            let out = cfg.resolve_opt(a.out, "out", |s| Ok(PathBuf::from(s)))?;
            cmds::cmd_verify(&params, out.as_deref())
        }
        Command::Outage(a) => {
            let snr_db_list = cfg.resolve(
                a.snr.map(|s| parse_snr_spec(&s)).transpose()?,
                "snr",
                parse_snr_spec,
                parse_snr_spec("10:25:3").unwrap(),
            )?;
            let window = cfg.resolve_opt(
                a.window.map(|s| parse_window(&s)).transpose()?,
                "window",
                parse_window,
            )?;
            let params = cmds::OutageParams {
                slots: cfg.resolve(a.slots, "M", parse_usize, 2)?,
                r: cfg.resolve(a.r, "r", parse_f64, 0.2)?,
                snr_db_list,
                trials: cfg.resolve(a.trials, "trials", parse_u64, 100_000)?,
                seed: cfg.resolve(a.seed, "seed", parse_u64, 7)?,
                offset_db: cfg.resolve(a.offset_db, "offset_db", parse_f64, 0.0)?,
                window,
            };
            let out = cfg.resolve_opt(a.out, "out", |s| Ok(PathBuf::from(s)))?;
            cmds::cmd_outage(&params, out.as_deref())
        }
        Command::Sim(a) => {
            let snr_db_list = cfg.resolve(
                a.snr.map(|s| parse_snr_spec(&s)).transpose()?,
                "snr",
                parse_snr_spec,
                vec![10.0, 20.0, 30.0],
            )?;
            let symbols_per_slot = cfg.resolve(a.symbols_per_slot, "T", parse_usize, 4)?;
            let params = cmds::SimParams {
                mode: cfg.resolve(
                    a.mode.map(|s| parse_mode(&s)).transpose()?,
                    "mode",
                    parse_mode,
                    ProtocolMode::Ddf,
                )?,
                slots: cfg.resolve(a.slots, "M", parse_usize, 2)?,
                symbols_per_slot,
                n_msgs: cfg.resolve(a.n_msgs, "n", parse_usize, 2)?,
                r: cfg.resolve(a.r, "r", parse_f64, 0.25)?,
                mu: cfg.resolve(a.mu, "mu", parse_f64, 4.0 / symbols_per_slot as f64)?,
                snr_db_list,
                trials: cfg.resolve(a.trials, "trials", parse_u64, 1000)?,
                seed: cfg.resolve(a.seed, "seed", parse_u64, 3)?,
                compare_mode: cfg.resolve_opt(
                    a.compare_mode.map(|s| parse_mode(&s)).transpose()?,
                    "compare_mode",
                    parse_mode,
                )?,
            };
            let out = cfg.resolve_opt(a.out, "out", |s| Ok(PathBuf::from(s)))?;
            cmds::cmd_sim(&params, out.as_deref())
        }
        Command::Fig2(a) => {
            let samples = cfg.resolve(a.samples, "samples", parse_usize, 201)?;
            let out = cfg.resolve_opt(a.out, "out", |s| Ok(PathBuf::from(s)))?;
            cmds::cmd_fig2(samples, out.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

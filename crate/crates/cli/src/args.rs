use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Non-signaling channel simulation: exact distortions, Rényi capacities and exponents.
///
/// Rates and information quantities are read and computed in nats; `--bits`
/// only changes how results are displayed.
#[derive(Debug, Parser)]
#[command(name = "simex", version)]
pub struct Cli {
    /// Display information quantities in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-shot distortion ε(M, W).
    EpsNs(EpsNsArgs),
    /// Distortion ε(M, W^⊗n) of the i.i.d. extension.
    EpsNsIid(EpsNsIidArgs),
    /// Sibson mutual information I_α(p, W).
    RenyiMi(RenyiMiArgs),
    /// Rényi capacity I_α(W).
    Capacity(CapacityArgs),
    /// Error exponent at rate r.
    ExponentEe(RateArgs),
    /// Strong converse exponent at rate r.
    ExponentSce(RateArgs),
    /// Finite-n bounds on -(1/n) log ε, with the exact value for comparison.
    BoundsEe(BoundsArgs),
    /// Finite-n bounds on -(1/n) log(1 - ε), with the exact value for comparison.
    BoundsSce(BoundsArgs),
    /// Bracket on the shared-randomness distortion at M' messages.
    SrSandwich(SrSandwichArgs),
    /// Max-information I_∞(W), the zero-distortion threshold.
    MaxInfo(ChannelArg),
    /// Evaluate one quantity over a grid and write CSV.
    Sweep(SweepArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Validate a channel file and print it in canonical form.
    Channel(ChannelOutArgs),
}

#[derive(Debug, Args)]
pub struct ChannelArg {
    /// Channel JSON file: {"matrix": [[...], ...], "input": [...], "output": [...]}.
    #[arg(long)]
    pub channel: PathBuf,
}

#[derive(Debug, Args)]
pub struct EpsNsArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Number of messages.
    #[arg(long = "M", value_name = "M")]
    pub m: u64,
    /// Solve the relaxed dual program instead of the primal.
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Args)]
pub struct EpsNsIidArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Blocklength.
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub size: SizeArgs,
    /// Enumerate all input sequences instead of working over types.
    #[arg(long)]
    pub bruteforce: bool,
    /// Which form of the type-reduced program to solve.
    #[arg(long, value_enum, default_value_t = Formulation::Dual)]
    pub formulation: Formulation,
}

/// Message size given directly or as ⌊e^{nr}⌋.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SizeArgs {
    #[arg(long = "M", value_name = "M")]
    pub m: Option<u64>,
    /// Rate in nats; the message size is ⌊e^{n·rate}⌋.
    #[arg(long)]
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Formulation {
    Primal,
    Dual,
}

#[derive(Debug, Args)]
pub struct RenyiMiArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Order α ≥ 0 (`inf` allowed).
    #[arg(long)]
    pub alpha: f64,
    /// Comma-separated input distribution; uniform if omitted.
    #[arg(long, value_delimiter = ',')]
    pub input: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Order α ≥ 0 (`inf` allowed).
    #[arg(long)]
    pub alpha: f64,
    /// Width of the certified bracket at which to stop.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Rate in nats.
    #[arg(long)]
    pub rate: f64,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Rate in nats.
    #[arg(long)]
    pub rate: f64,
    /// Blocklength.
    #[arg(long)]
    pub n: usize,
    /// Skip the exact distortion (useful when n is large).
    #[arg(long)]
    pub skip_exact: bool,
}

#[derive(Debug, Args)]
pub struct SrSandwichArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Blocklength; with n = 1 the one-shot program is used.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Size of the simulated non-signaling code.
    #[command(flatten)]
    pub size: SizeArgs,
    /// Number of messages of the shared-randomness code.
    #[arg(long = "M-prime", value_name = "M_PRIME", conflicts_with = "rate_prime")]
    pub m_prime: Option<u64>,
    /// Rate in nats of the shared-randomness code.
    #[arg(long)]
    pub rate_prime: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    EpsNs,
    EpsNsIid,
    RenyiMi,
    Capacity,
    ExponentEe,
    ExponentSce,
    BoundsEe,
    BoundsSce,
    SrSandwich,
    MaxInfo,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::EpsNs => "eps-ns",
            Quantity::EpsNsIid => "eps-ns-iid",
            Quantity::RenyiMi => "renyi-mi",
            Quantity::Capacity => "capacity",
            Quantity::ExponentEe => "exponent-ee",
            Quantity::ExponentSce => "exponent-sce",
            Quantity::BoundsEe => "bounds-ee",
            Quantity::BoundsSce => "bounds-sce",
            Quantity::SrSandwich => "sr-sandwich",
            Quantity::MaxInfo => "max-info",
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Blocklengths: `4,8,12` or `4..20:4`.
    #[arg(long)]
    pub n: Option<String>,
    /// Rates in nats: `0.2,0.4` or `0.1..0.6:0.1`.
    #[arg(long)]
    pub rate: Option<String>,
    /// Message sizes: `1,2,3` or `1..8`.
    #[arg(long = "M", value_name = "M")]
    pub m: Option<String>,
    /// Rényi orders: `0.5,1,2` or `0.25..4:0.25`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// CSV destination; standard output if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Seed for the random restarts of the capacity solver.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    All,
    Oracle,
    Sandwich,
    Types,
    Continuity,
    Definetti,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Blocklengths (`4..14`, `4..14:2` or a list); for `definetti` the largest n.
    #[arg(long)]
    pub n: Option<String>,
    /// Largest alphabet for the de Finetti suite.
    #[arg(long)]
    pub alphabet: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random instances per continuity property.
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
    /// Print the report as JSON instead of one line per check.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ChannelOutArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Write the canonical form here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parses `a,b,c` or an inclusive range `a..b` / `a..b:step` of integers.
pub fn parse_int_grid(s: &str) -> Result<Vec<u64>, String> {
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, step),
            None => (rest, "1"),
        };
        let lo: u64 = parse_num(lo)?;
        let hi: u64 = parse_num(hi)?;
        let step: u64 = parse_num(step)?;
        if step == 0 {
            return Err("range step must be positive".into());
        }
        return Ok((lo..=hi).step_by(step as usize).collect());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_num).collect()
}

/// Parses `a,b,c` or an inclusive range `a..b:step` of reals; range points are `a + i·step`.
pub fn parse_real_grid(s: &str) -> Result<Vec<f64>, String> {
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = rest
            .split_once(':')
            .ok_or_else(|| format!("real range '{s}' needs a step, e.g. 0.1..1:0.1"))?;
        let lo: f64 = parse_num(lo)?;
        let hi: f64 = parse_num(hi)?;
        let step: f64 = parse_num(step)?;
        if step.is_nan() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("invalid range '{s}'"));
        }
        let count = ((hi - lo) / step + 1e-9).floor();
        if count < 0.0 {
            return Ok(Vec::new());
        }
        return Ok((0..=count as usize).map(|i| lo + i as f64 * step).collect());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_num).collect()
}

fn parse_num<N: std::str::FromStr>(t: &str) -> Result<N, String> {
    t.trim()
        .parse()
        .map_err(|_| format!("cannot parse '{}' as a number", t.trim()))
}

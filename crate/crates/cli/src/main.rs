mod args;
mod query;
mod record;
mod sweep;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use simex::verify::{self, Suite, VerifyConfig};

use args::{Cli, Command, SuiteArg, VerifyArgs};
use query::Ctx;
use record::{error_record, fmt17, Failure, Outcome, Record, Units};

/// Exit status of `verify` when some inequality fails.
const VERIFY_FAILED: u8 = 1;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.exit_code() == 0 { 0 } else { 3 });
        }
    };
    let units = Units { bits: cli.bits };
    let name = command_name(&cli.command);
    match run(cli.command, units) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("simex {name}: {f}");
            emit(&error_record(name, &f).to_string());
            ExitCode::from(f.exit_code())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::EpsNs(_) => "eps-ns",
        Command::EpsNsIid(_) => "eps-ns-iid",
        Command::RenyiMi(_) => "renyi-mi",
        Command::Capacity(_) => "capacity",
        Command::ExponentEe(_) => "exponent-ee",
        Command::ExponentSce(_) => "exponent-sce",
        Command::BoundsEe(_) => "bounds-ee",
        Command::BoundsSce(_) => "bounds-sce",
        Command::SrSandwich(_) => "sr-sandwich",
        Command::MaxInfo(_) => "max-info",
        Command::Sweep(_) => "sweep",
        Command::Verify(_) => "verify",
        Command::Channel(_) => "channel",
    }
}

fn run(command: Command, units: Units) -> Outcome<u8> {
    let load = |c: &args::ChannelArg| Ctx::load(&c.channel, units);
    let record = match command {
        Command::EpsNs(a) => query::eps_ns(&load(&a.channel)?, &a)?,
        Command::EpsNsIid(a) => query::eps_ns_iid(&load(&a.channel)?, &a)?,
        Command::RenyiMi(a) => query::renyi_mi(&load(&a.channel)?, &a)?,
        Command::Capacity(a) => query::capacity(&load(&a.channel)?, &a)?,
        Command::ExponentEe(a) => query::exponent_ee(&load(&a.channel)?, &a)?,
        Command::ExponentSce(a) => query::exponent_sce(&load(&a.channel)?, &a)?,
        Command::BoundsEe(a) => query::bounds_ee(&load(&a.channel)?, &a)?,
        Command::BoundsSce(a) => query::bounds_sce(&load(&a.channel)?, &a)?,
        Command::SrSandwich(a) => query::sr_sandwich(&load(&a.channel)?, &a)?,
        Command::MaxInfo(a) => query::max_info(&load(&a)?)?,
        Command::Sweep(a) => {
            let mut ctx = load(&a.channel)?;
            if let Some(seed) = a.seed {
                ctx.seed = seed;
            }
            return run_sweep(&ctx, &a);
        }
        Command::Verify(a) => return run_verify(&a),
        Command::Channel(a) => return canonical_channel(&a),
    };
    print_record(&record)
}

/// Writes a line to standard output; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_record(r: &Record) -> Outcome<u8> {
    let text = serde_json::to_string_pretty(r).map_err(|e| Failure::Solver(format!("cannot encode result: {e}")))?;
    emit(&text);
    Ok(if r.certified { 0 } else { 2 })
}

fn run_sweep(ctx: &Ctx, a: &args::SweepArgs) -> Outcome<u8> {
    let rows = sweep::run(ctx, a)?;
    match &a.output {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Failure::Input(format!("cannot create {}: {e}", path.display())))?;
            sweep::write_csv(std::io::BufWriter::new(file), &rows)?;
        }
        None => sweep::write_csv(std::io::stdout().lock(), &rows)?,
    }
    let failed = rows.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        eprintln!("simex sweep: {failed} of {} rows failed", rows.len());
    }
    Ok(if !rows.is_empty() && failed == rows.len() { 2 } else { 0 })
}

fn run_verify(a: &VerifyArgs) -> Outcome<u8> {
    let suite = match a.suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Oracle => Suite::Oracle,
        SuiteArg::Sandwich => Suite::Sandwich,
        SuiteArg::Types => Suite::Types,
        SuiteArg::Continuity => Suite::Continuity,
        SuiteArg::Definetti => Suite::Definetti,
    };
    let ns = match &a.n {
        Some(s) => {
            let v = args::parse_int_grid(s).map_err(Failure::Input)?;
            if v.is_empty() || v.contains(&0) {
                return Err(Failure::Input("--n must list blocklengths of at least 1".into()));
            }
            Some(v.into_iter().map(|n| n as usize).collect::<Vec<_>>())
        }
        None => None,
    };
    let cfg = VerifyConfig {
        seed: a.seed,
        channel: a.channel.as_ref().map(simex::io::read_channel).transpose()?,
        rate: a.rate,
        // The de Finetti suite takes a single largest n.
        n: ns.as_ref().and_then(|v| v.iter().copied().max()),
        ns,
        alphabet: a.alphabet,
        instances: a.instances,
    };
    let report = verify::run(suite, &cfg)?;
    let failures = report.failures().count();
    if a.json {
        let text = serde_json::to_string_pretty(&json!({
            "suite": suite.name(),
            "seed": a.seed,
            "passed": report.passed(),
            "failures": failures,
            "checks": report.checks,
        }))
        .map_err(|e| Failure::Solver(format!("cannot encode report: {e}")))?;
        emit(&text);
    } else {
        let mut out = std::io::stdout().lock();
        for c in &report.checks {
            let _ = writeln!(
                out,
                "{} [{}] {}: {} <= {} (margin {})",
                if c.pass { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                fmt17(c.lhs),
                fmt17(c.rhs),
                fmt17(c.margin)
            );
        }
        let _ = writeln!(
            out,
            "verify {}: {} checks, {} failed",
            suite.name(),
            report.checks.len(),
            failures
        );
    }
    Ok(if report.passed() { 0 } else { VERIFY_FAILED })
}

fn canonical_channel(a: &args::ChannelOutArgs) -> Outcome<u8> {
    let w = simex::io::read_channel(&a.channel.channel)?;
    match &a.output {
        Some(path) => simex::io::write_channel(&w, path)?,
        None => emit(&simex::io::channel_to_json(&w)),
    }
    Ok(0)
}

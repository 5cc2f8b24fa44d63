//! Single-quantity computations shared by the query subcommands and sweeps.

use std::path::Path;

use serde_json::{json, Value};
use simex::exponents::{correction_sequences, ExponentSolver, FiniteBound};
use simex::msgsize::MessageSize;
use simex::nsdist::{
    eps_ns_iid_bruteforce, eps_ns_iid_with, eps_ns_oneshot, eps_ns_oneshot_relaxed, ReducedConfig, ReducedFormulation,
    Reference, SolveReport, SolveStatus,
};
use simex::prob::{Channel, Pmf};
use simex::renyi::{renyi_capacity_with, sibson_minimizer, CapacityOptions, RenyiOrder};
use simex::srbounds::{sr_sandwich_sizes, sr_success_sandwich};

use crate::args::{self, Formulation};
use crate::record::{num, nums, Failure, Outcome, Record, Units};

/// Overrides the nonzero cap of the type-reduced program.
pub const MAX_NONZEROS_ENV: &str = "SIMEX_MAX_LP_NONZEROS";

/// Tolerance for capacities reported by `capacity` and `max-info` when not given.
const DEFAULT_CAPACITY_TOL: f64 = 1e-10;

/// Everything a computation needs besides its own parameters.
pub struct Ctx {
    pub channel_path: String,
    pub solver: ExponentSolver,
    pub units: Units,
    pub reduced: ReducedConfig,
    /// Seeds the random restarts of the capacity solver.
    pub seed: u64,
}

impl Ctx {
    pub fn load(path: &Path, units: Units) -> Outcome<Self> {
        let channel = simex::io::read_channel(path)?;
        Ok(Self {
            channel_path: path.display().to_string(),
            solver: ExponentSolver::new(channel),
            units,
            reduced: reduced_config()?,
            seed: CapacityOptions::default().seed,
        })
    }

    pub fn w(&self) -> &Channel<f64> {
        self.solver.channel()
    }
}

fn reduced_config() -> Outcome<ReducedConfig> {
    let mut cfg = ReducedConfig::default();
    if let Ok(v) = std::env::var(MAX_NONZEROS_ENV) {
        cfg.max_nonzeros = v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{MAX_NONZEROS_ENV} must be a non-negative integer, got '{v}'")))?;
    }
    Ok(cfg)
}

/// `M` given directly, or `⌊e^{n·rate}⌋`.
pub fn message_size(n: usize, m: Option<u64>, rate: Option<f64>) -> Outcome<MessageSize> {
    match (m, rate) {
        (Some(m), _) => Ok(MessageSize::new(m)?),
        (None, Some(r)) => Ok(MessageSize::from_rate(n, r)?),
        (None, None) => Err(Failure::Input("either --M or --rate is required".into())),
    }
}

pub fn check_n(n: usize) -> Outcome<()> {
    if n == 0 {
        return Err(Failure::Input("blocklength n must be at least 1".into()));
    }
    Ok(())
}

fn check_rate(r: f64) -> Outcome<()> {
    if r.is_nan() || r <= 0.0 || r.is_infinite() {
        return Err(Failure::Input(format!("rate must be positive and finite, got {r}")));
    }
    Ok(())
}

/// Exact `ε(M, W^{⊗n})` over type space.
pub fn eps_iid(ctx: &Ctx, n: usize, size: &MessageSize) -> Outcome<SolveReport<f64>> {
    check_n(n)?;
    Ok(eps_ns_iid_with(ctx.w(), n, size, &ctx.reduced)?)
}

fn certified(rep: &SolveReport<f64>) -> bool {
    rep.status == SolveStatus::Optimal
}

fn reference_json(rep: &SolveReport<f64>) -> Value {
    match &rep.optimal_reference {
        Reference::Pmf(q) => nums(q.probs()),
        Reference::TypeMasses(masses) => Value::Array(
            masses
                .iter()
                .map(|(t, m)| json!({ "type": t.counts(), "mass": num(*m) }))
                .collect(),
        ),
    }
}

fn solve_certificate(rep: &SolveReport<f64>) -> Value {
    json!({
        "status": rep.status.as_str(),
        "lower_bound": num(rep.lower_bound),
        "gap": num(rep.certificate_gap),
        "iterations": rep.iterations,
        "reference": reference_json(rep),
    })
}

fn order(alpha: f64) -> Outcome<RenyiOrder<f64>> {
    Ok(RenyiOrder::new(alpha)?)
}

pub fn eps_ns(ctx: &Ctx, a: &args::EpsNsArgs) -> Outcome<Record> {
    let rep = if a.relaxed {
        eps_ns_oneshot_relaxed(ctx.w(), a.m)?
    } else {
        eps_ns_oneshot(ctx.w(), a.m)?
    };
    Ok(Record {
        quantity: "eps-ns",
        inputs: json!({ "channel": ctx.channel_path, "M": a.m, "relaxed": a.relaxed }),
        value: num(rep.value),
        certificate: solve_certificate(&rep),
        warnings: rep.warnings.clone(),
        certified: certified(&rep),
    })
}

pub fn eps_ns_iid(ctx: &Ctx, a: &args::EpsNsIidArgs) -> Outcome<Record> {
    check_n(a.n)?;
    let size = message_size(a.n, a.size.m, a.size.rate)?;
    let rep = if a.bruteforce {
        let m = size
            .to_u64()
            .ok_or_else(|| Failure::Input(format!("M = {size} is too large for the brute-force solver")))?;
        eps_ns_iid_bruteforce(ctx.w(), a.n, m)?
    } else {
        let mut cfg = ctx.reduced;
        cfg.formulation = match a.formulation {
            Formulation::Primal => ReducedFormulation::Primal,
            Formulation::Dual => ReducedFormulation::Dual,
        };
        eps_ns_iid_with(ctx.w(), a.n, &size, &cfg)?
    };
    Ok(Record {
        quantity: "eps-ns-iid",
        inputs: json!({
            "channel": ctx.channel_path,
            "n": a.n,
            "M": size.to_string(),
            "rate": a.size.rate.map(num),
            "method": if a.bruteforce { "bruteforce" } else { "types" },
        }),
        value: num(rep.value),
        certificate: solve_certificate(&rep),
        warnings: rep.warnings.clone(),
        certified: certified(&rep),
    })
}

/// `I_α(p, W)` and its minimizing reference.
pub fn sibson(ctx: &Ctx, alpha: f64, input: Option<&[f64]>) -> Outcome<(f64, Pmf<f64>, Pmf<f64>)> {
    let p = match input {
        Some(v) => Pmf::new(v.to_vec())?,
        None => Pmf::uniform(ctx.w().input_size()),
    };
    let (value, q) = sibson_minimizer(&p, ctx.w(), order(alpha)?)?;
    Ok((value, p, q))
}

pub fn renyi_mi(ctx: &Ctx, a: &args::RenyiMiArgs) -> Outcome<Record> {
    let (value, p, q) = sibson(ctx, a.alpha, a.input.as_deref())?;
    Ok(Record {
        quantity: "renyi-mi",
        inputs: json!({ "channel": ctx.channel_path, "alpha": num(a.alpha), "input": nums(p.probs()), "unit": ctx.units.name() }),
        value: ctx.units.info_json(value),
        certificate: json!({ "reference": nums(q.probs()) }),
        warnings: Vec::new(),
        certified: true,
    })
}

pub fn capacity_value(ctx: &Ctx, alpha: f64, tol: f64) -> Outcome<simex::renyi::CapacityResult<f64>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Failure::Input(format!("tolerance must be positive, got {tol}")));
    }
    let opts = CapacityOptions {
        tol,
        seed: ctx.seed,
        ..CapacityOptions::default()
    };
    Ok(renyi_capacity_with(ctx.w(), order(alpha)?, &opts)?)
}

pub fn capacity(ctx: &Ctx, a: &args::CapacityArgs) -> Outcome<Record> {
    let res = capacity_value(ctx, a.alpha, a.tol)?;
    Ok(Record {
        quantity: "capacity",
        inputs: json!({ "channel": ctx.channel_path, "alpha": num(a.alpha), "tol": num(a.tol), "unit": ctx.units.name() }),
        value: ctx.units.info_json(res.value),
        certificate: json!({
            "optimal_input": nums(res.optimal_input.probs()),
            "optimal_reference": nums(res.optimal_reference.probs()),
            "residual": ctx.units.info_json(res.residual),
            "iterations": res.iterations,
        }),
        warnings: Vec::new(),
        certified: true,
    })
}

pub fn max_info(ctx: &Ctx) -> Outcome<Record> {
    let res = capacity_value(ctx, f64::INFINITY, DEFAULT_CAPACITY_TOL)?;
    Ok(Record {
        quantity: "max-info",
        inputs: json!({ "channel": ctx.channel_path, "unit": ctx.units.name() }),
        value: ctx.units.info_json(res.value),
        certificate: json!({
            "optimal_reference": nums(res.optimal_reference.probs()),
            "zero_distortion_threshold_M": num(res.value.exp()),
        }),
        warnings: Vec::new(),
        certified: true,
    })
}

fn exponent_record(ctx: &Ctx, quantity: &'static str, rate: f64) -> Outcome<Record> {
    check_rate(rate)?;
    let mut res = if quantity == "exponent-ee" {
        ctx.solver.error_exponent(rate)?
    } else {
        ctx.solver.sc_exponent(rate)?
    };
    if !res.finite {
        res.warnings.push(format!(
            "rate exceeds the max-information {}; the distortion is zero for every n large enough, so the exponent is infinite",
            ctx.solver.max_information()?
        ));
    }
    Ok(Record {
        quantity,
        inputs: json!({ "channel": ctx.channel_path, "rate": num(rate), "unit": ctx.units.name() }),
        value: ctx.units.info_json(res.value),
        certificate: json!({
            "argmax_alpha": num(res.argmax_alpha),
            "finite": res.finite,
            "grid_resolution": num(res.grid_resolution),
            "capacity": ctx.units.info_json(ctx.solver.capacity(1.0)?),
            "max_information": ctx.units.info_json(ctx.solver.max_information()?),
        }),
        warnings: res.warnings,
        certified: true,
    })
}

pub fn exponent_ee(ctx: &Ctx, a: &args::RateArgs) -> Outcome<Record> {
    exponent_record(ctx, "exponent-ee", a.rate)
}

pub fn exponent_sce(ctx: &Ctx, a: &args::RateArgs) -> Outcome<Record> {
    exponent_record(ctx, "exponent-sce", a.rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `−(1/n) log ε`.
    Error,
    /// `−(1/n) log(1 − ε)`.
    Success,
}

/// Exact finite-n exponent bracketed by the finite-n bounds.
pub struct BoundsEval {
    pub exact: Option<(f64, SolveReport<f64>)>,
    pub lower: f64,
    pub upper: f64,
    pub lower_valid: bool,
    pub upper_valid: bool,
    pub lower_argmax: f64,
    pub upper_argmax: f64,
    pub warnings: Vec<String>,
}

impl BoundsEval {
    /// Both bounds proven at this n and the exact value between them.
    pub fn consistent(&self) -> Option<bool> {
        let (a, _) = self.exact.as_ref()?;
        Some(self.lower <= *a + 1e-9 && *a <= self.upper + 1e-9)
    }
}

/// Bounds are stated on `(1/n) log(·)`; negating turns them into exponent
/// bounds with lower and upper swapped.
pub fn bounds(ctx: &Ctx, side: Side, rate: f64, n: usize, exact: bool) -> Outcome<BoundsEval> {
    check_rate(rate)?;
    check_n(n)?;
    let s = &ctx.solver;
    let (upper_of_log, lower_of_log): (FiniteBound, FiniteBound) = match side {
        Side::Error => (s.ee_ach_bound(rate, n)?, s.ee_conv_bound(rate, n)?),
        Side::Success => (s.sce_conv_bound(rate, n)?, s.sce_ach_bound(rate, n)?),
    };
    let exact = if exact {
        let rep = eps_iid(ctx, n, &MessageSize::from_rate(n, rate)?)?;
        let prob = match side {
            Side::Error => rep.value,
            Side::Success => 1.0 - rep.value,
        };
        Some((-prob.max(0.0).ln() / n as f64, rep))
    } else {
        None
    };
    let mut warnings = upper_of_log.warnings.clone();
    warnings.extend(lower_of_log.warnings.iter().cloned());
    Ok(BoundsEval {
        exact,
        lower: -upper_of_log.value,
        upper: -lower_of_log.value,
        lower_valid: upper_of_log.valid,
        upper_valid: lower_of_log.valid,
        lower_argmax: upper_of_log.argmax_alpha,
        upper_argmax: lower_of_log.argmax_alpha,
        warnings,
    })
}

fn bounds_record(ctx: &Ctx, quantity: &'static str, side: Side, a: &args::BoundsArgs) -> Outcome<Record> {
    let b = bounds(ctx, side, a.rate, a.n, !a.skip_exact)?;
    let c = correction_sequences(ctx.w(), a.rate, a.n)?;
    let u = ctx.units;
    let mut warnings = b.warnings.clone();
    if b.consistent() == Some(false) && b.lower_valid && b.upper_valid {
        warnings.push("exact value lies outside the proven bounds".into());
    }
    let certified = b.exact.as_ref().is_none_or(|(_, rep)| certified(rep));
    Ok(Record {
        quantity,
        inputs: json!({ "channel": ctx.channel_path, "rate": num(a.rate), "n": a.n, "unit": u.name() }),
        value: b.exact.as_ref().map_or(Value::Null, |(v, _)| u.info_json(*v)),
        certificate: json!({
            "lower": u.info_json(b.lower),
            "upper": u.info_json(b.upper),
            "lower_valid": b.lower_valid,
            "upper_valid": b.upper_valid,
            "lower_argmax_alpha": num(b.lower_argmax),
            "upper_argmax_alpha": num(b.upper_argmax),
            "within_bounds": b.consistent(),
            "eps": b.exact.as_ref().map(|(_, rep)| num(rep.value)),
            "eps_certificate": b.exact.as_ref().map(|(_, rep)| json!({
                "status": rep.status.as_str(),
                "gap": num(rep.certificate_gap),
            })),
            "corrections": {
                "r_n": num(c.r_n),
                "f_n": num(c.f_n),
                "g_n": num(c.g_n),
                "f_tilde_n": num(c.f_tilde_n),
                "g_tilde_n": num(c.g_tilde_n),
            },
        }),
        warnings,
        certified,
    })
}

pub fn bounds_ee(ctx: &Ctx, a: &args::BoundsArgs) -> Outcome<Record> {
    bounds_record(ctx, "bounds-ee", Side::Error, a)
}

pub fn bounds_sce(ctx: &Ctx, a: &args::BoundsArgs) -> Outcome<Record> {
    bounds_record(ctx, "bounds-sce", Side::Success, a)
}

/// NS distortion at blocklength n; one-shot program when n = 1 and M fits.
pub fn eps_at(ctx: &Ctx, n: usize, size: &MessageSize) -> Outcome<SolveReport<f64>> {
    match (n, size.to_u64()) {
        (1, Some(m)) => Ok(eps_ns_oneshot(ctx.w(), m)?),
        _ => eps_iid(ctx, n, size),
    }
}

pub struct SandwichEval {
    pub lower: f64,
    pub upper: f64,
    pub residual: f64,
    pub reports: [SolveReport<f64>; 2],
}

pub fn sandwich(ctx: &Ctx, n: usize, m: &MessageSize, m_prime: &MessageSize) -> Outcome<SandwichEval> {
    check_n(n)?;
    let at_m = eps_at(ctx, n, m)?;
    let at_mp = if m_prime == m {
        at_m.clone()
    } else {
        eps_at(ctx, n, m_prime)?
    };
    let s = sr_sandwich_sizes(at_m.value.clamp(0.0, 1.0), at_mp.value.clamp(0.0, 1.0), m, m_prime)?;
    Ok(SandwichEval {
        lower: s.lower,
        upper: s.upper,
        residual: s.residual,
        reports: [at_m, at_mp],
    })
}

pub fn sr_sandwich(ctx: &Ctx, a: &args::SrSandwichArgs) -> Outcome<Record> {
    check_n(a.n)?;
    let m = message_size(a.n, a.size.m, a.size.rate)?;
    let m_prime = match (a.m_prime, a.rate_prime) {
        (None, None) => m.clone(),
        (mp, rp) => message_size(a.n, mp, rp)?,
    };
    let s = sandwich(ctx, a.n, &m, &m_prime)?;
    let success = if m == m_prime {
        let (lo, hi) = sr_success_sandwich(s.reports[0].value.clamp(0.0, 1.0))?;
        json!({ "lower": num(lo), "upper": num(hi) })
    } else {
        Value::Null
    };
    let mut warnings = s.reports[0].warnings.clone();
    warnings.extend(s.reports[1].warnings.iter().cloned());
    Ok(Record {
        quantity: "sr-sandwich",
        inputs: json!({
            "channel": ctx.channel_path,
            "n": a.n,
            "M": m.to_string(),
            "M_prime": m_prime.to_string(),
        }),
        value: json!({ "lower": num(s.lower), "upper": num(s.upper) }),
        certificate: json!({
            "eps_ns_at_M": num(s.reports[0].value),
            "eps_ns_at_M_prime": num(s.reports[1].value),
            "residual": num(s.residual),
            "success_probability": success,
            "gaps": [num(s.reports[0].certificate_gap), num(s.reports[1].certificate_gap)],
        }),
        warnings,
        certified: s.reports.iter().all(certified),
    })
}

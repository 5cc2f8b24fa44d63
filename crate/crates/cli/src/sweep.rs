//! Grid evaluation of one quantity, written as CSV in grid order.

use std::io::Write;

use rayon::prelude::*;
use simex::msgsize::MessageSize;
use simex::nsdist::SolveStatus;

use crate::args::{parse_int_grid, parse_real_grid, Quantity, SweepArgs};
use crate::query::{self, Ctx, Side};
use crate::record::{fmt17, Failure, Outcome};

pub const HEADER: [&str; 9] = [
    "quantity", "n", "rate", "M", "alpha", "value", "cert_gap", "status", "warning",
];

/// One grid point; unused coordinates stay `None`.
#[derive(Debug, Clone, Default)]
pub struct Point {
    pub n: Option<usize>,
    pub rate: Option<f64>,
    pub m: Option<u64>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub quantity: String,
    pub point: Point,
    /// Exact message size when it is derived from a rate.
    pub size: Option<String>,
    pub value: Option<f64>,
    pub cert_gap: Option<f64>,
    pub status: String,
    pub warning: String,
}

impl Row {
    fn new(quantity: impl Into<String>, point: &Point) -> Self {
        Self {
            quantity: quantity.into(),
            point: point.clone(),
            size: None,
            value: None,
            cert_gap: None,
            status: "ok".into(),
            warning: String::new(),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == "error" || self.status == "numerical-failure"
    }

    fn fields(&self) -> [String; 9] {
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        let p = &self.point;
        [
            self.quantity.clone(),
            p.n.map(|n| n.to_string()).unwrap_or_default(),
            opt(p.rate),
            self.size.clone().or(p.m.map(|m| m.to_string())).unwrap_or_default(),
            opt(p.alpha),
            opt(self.value),
            opt(self.cert_gap),
            self.status.clone(),
            self.warning.clone(),
        ]
    }
}

/// Which grid axes a quantity consumes.
struct Axes {
    n: bool,
    size: bool,
    rate: bool,
    alpha: bool,
}

fn axes(q: Quantity) -> Axes {
    let (n, size, rate, alpha) = match q {
        Quantity::EpsNs => (false, true, false, false),
        Quantity::EpsNsIid | Quantity::SrSandwich => (true, true, false, false),
        Quantity::RenyiMi | Quantity::Capacity => (false, false, false, true),
        Quantity::ExponentEe | Quantity::ExponentSce => (false, false, true, false),
        Quantity::BoundsEe | Quantity::BoundsSce => (true, false, true, false),
        Quantity::MaxInfo => (false, false, false, false),
    };
    Axes { n, size, rate, alpha }
}

fn nonempty<T>(flag: &str, v: Vec<T>) -> Outcome<Vec<T>> {
    if v.is_empty() {
        return Err(Failure::Input(format!("grid --{flag} is empty")));
    }
    Ok(v)
}

/// Cartesian product in the order n, then M or rate, then α.
pub fn grid(a: &SweepArgs) -> Outcome<Vec<Point>> {
    let ax = axes(a.quantity);
    let name = a.quantity.name();
    let unused = |flag: &str, given: bool, used: bool| -> Outcome<()> {
        if given && !used {
            return Err(Failure::Input(format!("--{flag} is not a grid axis of {name}")));
        }
        Ok(())
    };
    unused("n", a.n.is_some(), ax.n)?;
    unused("alpha", a.alpha.is_some(), ax.alpha)?;
    unused("M", a.m.is_some(), ax.size)?;
    unused("rate", a.rate.is_some(), ax.rate || ax.size)?;
    if ax.size && a.m.is_some() && a.rate.is_some() {
        return Err(Failure::Input("give either --M or --rate, not both".into()));
    }
    let required = |flag: &str, v: &Option<String>| {
        v.clone()
            .ok_or_else(|| Failure::Input(format!("{name} sweeps need --{flag}")))
    };

    let ns: Vec<Option<usize>> = if ax.n {
        let ns = nonempty("n", parse_int_grid(&required("n", &a.n)?).map_err(Failure::Input)?)?;
        if ns.contains(&0) {
            return Err(Failure::Input("blocklengths must be at least 1".into()));
        }
        ns.into_iter().map(|n| Some(n as usize)).collect()
    } else {
        vec![None]
    };
    let mut sizes: Vec<(Option<u64>, Option<f64>)> = vec![(None, None)];
    if ax.size {
        sizes = match (&a.m, &a.rate) {
            (Some(m), _) => nonempty("M", parse_int_grid(m).map_err(Failure::Input)?)?
                .into_iter()
                .map(|m| (Some(m), None))
                .collect(),
            (None, Some(r)) => rates(r)?.into_iter().map(|r| (None, Some(r))).collect(),
            (None, None) => return Err(Failure::Input(format!("{name} sweeps need --M or --rate"))),
        };
        if sizes.iter().any(|(m, _)| *m == Some(0)) {
            return Err(Failure::Input("message sizes must be at least 1".into()));
        }
    } else if ax.rate {
        sizes = rates(&required("rate", &a.rate)?)?
            .into_iter()
            .map(|r| (None, Some(r)))
            .collect();
    }
    let alphas: Vec<Option<f64>> = if ax.alpha {
        let v = nonempty(
            "alpha",
            parse_real_grid(&required("alpha", &a.alpha)?).map_err(Failure::Input)?,
        )?;
        if v.iter().any(|x| x.is_nan() || *x < 0.0) {
            return Err(Failure::Input("orders must lie in [0, inf]".into()));
        }
        v.into_iter().map(Some).collect()
    } else {
        vec![None]
    };

    let mut points = Vec::with_capacity(ns.len() * sizes.len() * alphas.len());
    for &n in &ns {
        for &(m, rate) in &sizes {
            for &alpha in &alphas {
                points.push(Point { n, rate, m, alpha });
            }
        }
    }
    Ok(points)
}

fn rates(s: &str) -> Outcome<Vec<f64>> {
    let v = nonempty("rate", parse_real_grid(s).map_err(Failure::Input)?)?;
    if v.iter().any(|r| r.is_nan() || *r <= 0.0 || r.is_infinite()) {
        return Err(Failure::Input("rates must be positive and finite".into()));
    }
    Ok(v)
}

fn status(s: SolveStatus) -> String {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::NumericalFailure => "numerical-failure",
    }
    .into()
}

/// Rows contributed by one grid point; solver errors become `error` rows.
pub fn evaluate(ctx: &Ctx, q: Quantity, p: &Point) -> Vec<Row> {
    match evaluate_inner(ctx, q, p) {
        Ok(rows) => rows,
        Err(e) => {
            let mut row = Row::new(q.name(), p);
            row.status = "error".into();
            row.warning = e.to_string();
            vec![row]
        }
    }
}

fn evaluate_inner(ctx: &Ctx, q: Quantity, p: &Point) -> Outcome<Vec<Row>> {
    let u = ctx.units;
    let mut row = Row::new(q.name(), p);
    let size = |n: usize| -> Outcome<MessageSize> { query::message_size(n, p.m, p.rate) };
    match q {
        Quantity::EpsNs | Quantity::EpsNsIid => {
            let n = p.n.unwrap_or(1);
            let m = size(n)?;
            let rep = if q == Quantity::EpsNs {
                query::eps_at(ctx, 1, &m)?
            } else {
                query::eps_iid(ctx, n, &m)?
            };
            row.size = Some(m.to_string());
            row.value = Some(rep.value);
            row.cert_gap = Some(rep.certificate_gap);
            row.status = status(rep.status);
            row.warning = rep.warnings.join("; ");
            Ok(vec![row])
        }
        Quantity::RenyiMi => {
            let (v, _, _) = query::sibson(ctx, p.alpha.unwrap_or(1.0), None)?;
            row.value = Some(u.info(v));
            Ok(vec![row])
        }
        Quantity::Capacity => {
            let res = query::capacity_value(ctx, p.alpha.unwrap_or(1.0), 1e-10)?;
            row.value = Some(u.info(res.value));
            row.cert_gap = Some(u.info(res.residual));
            row.status = "optimal".into();
            Ok(vec![row])
        }
        Quantity::MaxInfo => {
            let res = query::capacity_value(ctx, f64::INFINITY, 1e-10)?;
            row.value = Some(u.info(res.value));
            row.cert_gap = Some(u.info(res.residual));
            row.status = "optimal".into();
            Ok(vec![row])
        }
        Quantity::ExponentEe | Quantity::ExponentSce => {
            let r = p.rate.unwrap_or_default();
            let res = if q == Quantity::ExponentEe {
                ctx.solver.error_exponent(r)?
            } else {
                ctx.solver.sc_exponent(r)?
            };
            row.value = Some(u.info(res.value));
            row.warning = res.warnings.join("; ");
            Ok(vec![row])
        }
        Quantity::BoundsEe | Quantity::BoundsSce => {
            let side = if q == Quantity::BoundsEe {
                Side::Error
            } else {
                Side::Success
            };
            let n = p.n.unwrap_or(1);
            let r = p.rate.unwrap_or_default();
            let b = query::bounds(ctx, side, r, n, true)?;
            let m = MessageSize::from_rate(n, r)?.to_string();
            let base = q.name();
            let mut exact = Row::new(format!("{base}.exact"), p);
            let (value, rep) = b.exact.as_ref().expect("exact requested");
            exact.size = Some(m.clone());
            exact.value = Some(u.info(*value));
            exact.cert_gap = Some(rep.certificate_gap);
            exact.status = status(rep.status);
            exact.warning = rep.warnings.join("; ");
            let bound = |suffix: &str, v: f64, valid: bool| {
                let mut r = Row::new(format!("{base}.{suffix}"), p);
                r.size = Some(m.clone());
                r.value = Some(u.info(v));
                r.status = if valid { "valid" } else { "invalid-n" }.into();
                r.warning = b.warnings.join("; ");
                r
            };
            Ok(vec![
                exact,
                bound("lower", b.lower, b.lower_valid),
                bound("upper", b.upper, b.upper_valid),
            ])
        }
        Quantity::SrSandwich => {
            let n = p.n.unwrap_or(1);
            let m = size(n)?;
            let s = query::sandwich(ctx, n, &m, &m)?;
            let gap = s.reports[0].certificate_gap.max(s.reports[1].certificate_gap);
            let st = if s.reports.iter().all(|r| r.status == SolveStatus::Optimal) {
                "optimal".to_string()
            } else {
                "numerical-failure".to_string()
            };
            let make = |suffix: &str, v: f64| {
                let mut r = Row::new(format!("sr-sandwich.{suffix}"), p);
                r.size = Some(m.to_string());
                r.value = Some(v);
                r.cert_gap = Some(gap);
                r.status = st.clone();
                r
            };
            Ok(vec![make("lower", s.lower), make("upper", s.upper)])
        }
    }
}

/// Evaluates the grid on `workers` threads (0 = rayon default) and returns
/// the rows in grid order.
pub fn run(ctx: &Ctx, a: &SweepArgs) -> Outcome<Vec<Row>> {
    let points = grid(a)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.workers)
        .build()
        .map_err(|e| Failure::Solver(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<Vec<Row>> = pool.install(|| points.par_iter().map(|p| evaluate(ctx, a.quantity, p)).collect());
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Outcome<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Failure::Input(format!("cannot write CSV: {e}"));
    w.write_record(HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r.fields()).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Failure::Input(format!("cannot write CSV: {e}")))?;
    Ok(())
}

//! Wall-clock comparison of the two coefficient routes.
//!
//! For each requested `k` both routes solve a fresh table from scratch;
//! the reported time is the median over the requested repeats. Output is
//! one CSV row per (method, k) with the operator counts of the DAG the
//! method ran on.

use std::fmt;
use std::time::Instant;

use crate::engine::{build_term_graph, SolveMode, StreamSolution};
use crate::ift::{derive_pipeline, IftError};
use crate::parse::PolySystem;
use crate::taylor::build_classical_ode;
use crate::var::VarOrder;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    SdeRecurrence,
    OdeSeries,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::SdeRecurrence => f.write_str("sde-recurrence"),
            Method::OdeSeries => f.write_str("ode-series"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub system: String,
    pub method: Method,
    pub k: usize,
    pub seconds: f64,
    pub products: usize,
    pub sums: usize,
}

pub const CSV_HEADER: &str = "system,method,k,seconds,P,S";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{},{}",
            self.system, self.method, self.k, self.seconds, self.products, self.sums
        )
    }
}

fn median(mut times: Vec<f64>) -> f64 {
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times[times.len() / 2]
}

/// Times both routes on one system for every `k` in ascending `k_list`.
pub fn run_bench(
    sys: &PolySystem,
    order: &VarOrder,
    name: &str,
    k_list: &[usize],
    repeat: usize,
) -> Result<Vec<BenchRecord>, IftError> {
    assert!(repeat >= 1, "need at least one repetition");
    assert!(
        k_list.windows(2).all(|w| w[0] < w[1]),
        "k values must be strictly ascending"
    );
    let sde = derive_pipeline(sys, order)?;
    let ode = build_classical_ode(sys)?;
    let ode_engine = crate::ift::SdeSystem {
        names: ode.names.clone(),
        rhs: ode.rhs.clone(),
        init: ode.init.clone(),
    };
    let sde_graph = build_term_graph(&sde);
    let ode_graph = build_term_graph(&ode_engine);

    let mut records = Vec::new();
    for &k in k_list {
        for method in [Method::SdeRecurrence, Method::OdeSeries] {
            let (target, mode, p, s) = match method {
                Method::SdeRecurrence => (
                    &sde,
                    SolveMode::Sde,
                    sde_graph.products(),
                    sde_graph.sums(),
                ),
                Method::OdeSeries => (
                    &ode_engine,
                    SolveMode::OdeSeries,
                    ode_graph.products(),
                    ode_graph.sums(),
                ),
            };
            let times: Vec<f64> = (0..repeat)
                .map(|_| {
                    let start = Instant::now();
                    let mut sol = StreamSolution::new(target, mode);
                    sol.extend(k);
                    std::hint::black_box(sol.stream(1).last());
                    start.elapsed().as_secs_f64()
                })
                .collect();
            records.push(BenchRecord {
                system: name.to_string(),
                method,
                k,
                seconds: median(times),
                products: p,
                sums: s,
            });
        }
    }
    Ok(records)
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Least-squares slope of `log(seconds)` against `log(k)`.
pub fn loglog_slope(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|(k, t)| ((*k as f64).ln(), t.max(1e-9).ln()))
        .collect();
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

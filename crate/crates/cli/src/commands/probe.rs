use anyhow::Result;
use clap::Args;
use freepos::rmt::Seed;
use freepos::witness::reduction_limit_trend;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::output::{num, Sink, Table};
use crate::svg::Plot;

/// Final agreement rate below which the run counts as inconsistent.
pub const FINAL_AGREEMENT: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeParams {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 300)]
    pub d: usize,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// ε schedule, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
    pub eps: Vec<f64>,
    /// Number of test states (alternating Wishart and pure).
    #[arg(long, default_value_t = 40)]
    pub samples: usize,
}

pub fn run(p: &ProbeParams, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
    let trend = reduction_limit_trend(p.n, p.d, &p.eps, p.m, p.samples, seed)?;
    let mut rates = Table::new(&["eps", "rank", "agreement_rate"]);
    let mut states = Table::new(&["eps", "state", "kind", "red_min", "map_min", "agree"]);
    for r in &trend.reports {
        rates.push(vec![num(r.eps), r.rank.to_string(), num(r.agreement_rate)]);
        for (i, s) in r.states.iter().enumerate() {
            let kind = serde_json::to_value(s.kind)?;
            states.push(vec![
                num(r.eps),
                i.to_string(),
                kind.as_str().unwrap_or("").into(),
                num(s.red_min),
                num(s.map_min),
                s.agree.to_string(),
            ]);
        }
    }
    let pts: Vec<(f64, f64)> = trend
        .reports
        .iter()
        .map(|r| (r.eps.log10(), r.agreement_rate))
        .collect();
    let plot = Plot::new("agreement with the reduction test", "log10 eps", "agreement rate")
        .line(pts.clone(), 0)
        .markers(pts, 0)
        .hline(FINAL_AGREEMENT, 1);
    sink.plot("probe", &plot, &rates)?;
    sink.csv("probe_states.csv", &states)?;
    let doc = serde_json::to_value(&trend)?;
    sink.json("probe.json", &doc)?;
    let consistent = trend.final_rate >= FINAL_AGREEMENT;
    Ok(Outcome {
        summary: json!({ "trend": doc, "final_agreement_ok": consistent }),
        consistent,
    })
}

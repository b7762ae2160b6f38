use anyhow::Result;
use clap::Args;
use freepos::measures::MeasureSpec;
use freepos::registry::support_engines;
use freepos::rmt::{free_power_oracle_run, Seed};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::config::{parse_json, ConfigError};
use crate::output::{num, Sink, Table};
use crate::svg::Plot;

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeconvParams {
    /// Measure as JSON, e.g. '{"family":"semicircle","a":1,"sigma":1}'.
    #[arg(long, value_parser = parse_spec)]
    pub spec: MeasureSpec,
    /// Convolution power T >= 1.
    #[arg(long = "power", short = 'T')]
    pub power: f64,
    /// Support engine: auto, closed_form or critical_point.
    #[arg(long, default_value = "auto")]
    #[serde(default = "auto")]
    pub engine: String,
    /// Cross-check against corners of an m×m matrix (T must be rational).
    #[arg(long, value_name = "M")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<usize>,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    pub oracle_trials: usize,
}

fn auto() -> String {
    "auto".into()
}

fn one() -> usize {
    1
}

pub fn parse_spec(s: &str) -> Result<MeasureSpec, String> {
    let spec: MeasureSpec = parse_json(s, "--spec").map_err(|e| e.to_string())?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// Smallest `(n, k)` with `n/k = T`, denominators up to 1000.
pub fn ratio(power: f64) -> Option<(usize, usize)> {
    (1..=1000usize).find_map(|k| {
        let n = (power * k as f64).round();
        ((power * k as f64 - n).abs() < 1e-9 && n >= k as f64).then_some((n as usize, k))
    })
}

pub fn run(p: &FreeconvParams, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
    let engines = support_engines();
    let engine = engines.get(&p.engine)?;
    let support = engine.support(&p.spec, p.power)?;
    let result_spec = freepos::freeconv::closed_form_power(&p.spec, p.power);
    let oracle = match p.oracle {
        None => None,
        Some(m) => {
            let (n, k) = ratio(p.power)
                .ok_or_else(|| ConfigError::other(format!("--oracle needs a rational T, got {}", p.power)))?;
            // the oracle compresses m×m to (m/n)·k; round m to a multiple of n
            let m = m.div_ceil(n) * n;
            let run = free_power_oracle_run(&p.spec, n, k, m, p.oracle_trials, seed)?;
            Some(run)
        }
    };
    let gap = oracle.as_ref().map(|o| {
        let lo = (o.profile.min_supp - support.min_supp).abs();
        let hi = (o.profile.max_supp - support.max_supp).abs();
        json!({ "min_supp": lo, "max_supp": hi, "max": lo.max(hi) })
    });
    let doc = json!({
        "input": p.spec,
        "T": p.power,
        "engine": engine.name(),
        "result_spec": result_spec,
        "support": support,
        "oracle": oracle,
        "gap": gap,
    });
    sink.json("freeconv.json", &doc)?;

    let mut t = Table::new(&["source", "kind", "lo", "hi", "weight"]);
    let mut segs = Vec::new();
    for &(lo, hi) in &support.bands {
        t.push(vec!["engine".into(), "band".into(), num(lo), num(hi), String::new()]);
        segs.push((lo, hi, 1.0));
    }
    for &(x, w) in &support.atoms {
        t.push(vec!["engine".into(), "atom".into(), num(x), num(x), num(w)]);
        segs.push((x, x, 1.0));
    }
    let mut plot = Plot::new(&format!("support of the free power T = {}", p.power), "x", "").intervals(segs, 0);
    if let Some(o) = &oracle {
        t.push(vec![
            "oracle".into(),
            "band".into(),
            num(o.profile.min_supp),
            num(o.profile.max_supp),
            String::new(),
        ]);
        plot = plot.intervals(vec![(o.profile.min_supp, o.profile.max_supp, 0.0)], 1);
    }
    sink.plot("support", &plot, &t)?;
    Ok(Outcome::ok(doc))
}

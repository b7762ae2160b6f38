use anyhow::Result;
use clap::Args;
use freepos::rmt::Seed;
use freepos::witness::{separability_threshold, separable_construction, separable_construction_x};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::config::ConfigError;
use crate::output::{num, Sink, Table};

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparabilityParams {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 120)]
    #[serde(default = "d")]
    pub d: usize,
    /// Decompose 2I + αG, i.e. x = 2/α.
    #[arg(long, conflicts_with = "x")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Decompose xI + G directly.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[arg(long, default_value_t = 0.99)]
    #[serde(default = "beta")]
    pub beta: f64,
    /// Number of sampled constructions; 0 reports the analytic threshold only.
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    pub trials: usize,
}

fn d() -> usize {
    120
}

fn beta() -> f64 {
    0.99
}

fn one() -> usize {
    1
}

pub fn run(p: &SeparabilityParams, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
    let threshold = separability_threshold(p.n)?;
    if p.trials > 0 && p.alpha.is_none() && p.x.is_none() {
        return Err(ConfigError::other("sampled constructions need --alpha or --x").into());
    }
    let runs = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let s = seed.with_trial(t as u64);
            match (p.alpha, p.x) {
                (Some(a), _) => separable_construction(p.n, p.d, a, p.beta, s),
                (None, Some(x)) => separable_construction_x(p.n, p.d, x, p.beta, s),
                (None, None) => unreachable!(),
            }
        })
        .collect::<freepos::Result<Vec<_>>>()?;

    let mut comps = Table::new(&["trial", "kind", "i", "j", "s", "lambda_min", "lambda_min_scaled"]);
    for (t, run) in runs.iter().enumerate() {
        for c in &run.components {
            let kind = serde_json::to_value(c.kind)?;
            comps.push(vec![
                t.to_string(),
                kind.as_str().unwrap_or("").into(),
                c.i.to_string(),
                c.j.to_string(),
                c.s.to_string(),
                num(c.lambda_min),
                num(c.lambda_min_scaled),
            ]);
        }
    }
    if p.trials > 0 {
        sink.csv("components.csv", &comps)?;
    }
    let diagnostics: Vec<_> = runs.iter().map(|r| &r.diagnostics).collect();
    let doc = json!({
        "n": p.n,
        "d": p.d,
        "beta": p.beta,
        "x_star": threshold.x_star,
        "alpha_star": threshold.alpha_star,
        "ball_ratio": threshold.ball_ratio,
        "trials": diagnostics,
    });
    sink.json("separability.json", &doc)?;
    Ok(Outcome::ok(doc))
}

use anyhow::Result;
use clap::{Args, ValueEnum};
use freepos::measures::MeasureSpec;
use freepos::positivity::{max_k_positive, verdict_table};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::config::ConfigError;
use crate::output::{num, Sink, Table};
use crate::svg::Plot;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// SC_{a,σ}
    Semicircle,
    /// 1 − a·π_t
    Mp,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    /// Semicircle width.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Free Poisson rate.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[arg(long)]
    pub n: usize,
}

impl ThresholdParams {
    fn spec(&self) -> Result<MeasureSpec> {
        let spec = match self.family {
            Family::Semicircle => {
                if self.t.is_some() {
                    return Err(ConfigError::other("--t does not apply to the semicircle family").into());
                }
                MeasureSpec::semicircle(self.a, self.sigma.unwrap_or(1.0))?
            }
            Family::Mp => {
                if self.sigma.is_some() {
                    return Err(ConfigError::other("--sigma does not apply to the mp family").into());
                }
                let t = self.t.ok_or_else(|| ConfigError::other("the mp family needs --t"))?;
                MeasureSpec::shifted_free_poisson(self.a, t)?
            }
        };
        Ok(spec)
    }
}

pub fn run(p: &ThresholdParams, sink: &mut Sink) -> Result<Outcome> {
    let spec = p.spec()?;
    let table = verdict_table(&spec, p.n)?;
    let max_k = max_k_positive(&spec, p.n)?;
    let doc = json!({ "family": p.family, "spec": spec, "n": p.n, "max_k": max_k, "table": table });
    sink.json("threshold.json", &doc)?;
    let mut t = Table::new(&["k", "margin", "is_k_positive", "method"]);
    for v in &table {
        let method = serde_json::to_value(v.method)?;
        t.push(vec![
            v.k.to_string(),
            num(v.margin),
            v.is_k_positive.to_string(),
            method.as_str().unwrap_or("").to_string(),
        ]);
    }
    let plot = Plot::new("bottom of the support of the n/k-th free power", "k", "margin")
        .line(table.iter().map(|v| (v.k as f64, v.margin)).collect(), 0)
        .markers(table.iter().map(|v| (v.k as f64, v.margin)).collect(), 0)
        .hline(0.0, 1);
    sink.plot("threshold", &plot, &t)?;
    Ok(Outcome::ok(doc))
}

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use freepos::kposcheck::SeeSawOptions;
use freepos::registry::kpos_strategies;
use freepos::rmt::{io, Seed};
use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::output::{num, Sink, Table};
use crate::svg::Plot;

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KposParams {
    /// Choi matrix file: binary, or CSV of (row, col, re, im).
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 32)]
    #[serde(default = "restarts")]
    pub restarts: usize,
    /// Search strategy: see_saw or net.
    #[arg(long, default_value = "see_saw")]
    #[serde(default = "see_saw")]
    pub strategy: String,
    /// Shorthand for `--strategy net` (n <= 3, k = 1).
    #[arg(long)]
    #[serde(default)]
    pub net: bool,
    #[arg(long, default_value_t = 24)]
    #[serde(default = "resolution")]
    pub net_resolution: usize,
    /// Stop a see-saw restart once its objective drops below this value.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_below: Option<f64>,
}

fn restarts() -> usize {
    32
}

fn see_saw() -> String {
    "see_saw".into()
}

fn resolution() -> usize {
    24
}

pub fn run(p: &KposParams, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
    let c = io::load_operator(&p.matrix, p.n, p.d)?;
    let opts = SeeSawOptions {
        restarts: p.restarts,
        stop_below: p.stop_below,
        ..SeeSawOptions::default()
    };
    let strategies = kpos_strategies(opts, p.net_resolution);
    let name = if p.net { "net" } else { p.strategy.as_str() };
    let result = strategies.get(name)?.check(&c, p.k, seed)?;
    let doc = serde_json::to_value(&result)?;
    sink.json("kpos.json", &doc)?;
    if !result.history.is_empty() {
        let mut t = Table::new(&["iteration", "objective"]);
        for (i, v) in result.history.iter().enumerate() {
            t.push(vec![i.to_string(), num(*v)]);
        }
        let plot = Plot::new(
            "see-saw objective of the winning restart",
            "iteration",
            "compressed bottom eigenvalue",
        )
        .line(
            result.history.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect(),
            0,
        )
        .hline(0.0, 1);
        sink.plot("history", &plot, &t)?;
    }
    Ok(Outcome::ok(doc))
}

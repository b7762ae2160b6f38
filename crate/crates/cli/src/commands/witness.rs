use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use freepos::rmt::Seed;
use freepos::witness::{detection_verdict, WitnessExperimentConfig, WitnessReport, DEFAULT_TOL_W};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::config::read_json;
use crate::output::{num, Sink, Table};
use crate::svg::Plot;

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessParams {
    /// Experiment config JSON (n, d, alpha, shift_eps, trials, seed, tol_w,
    /// keep_spectra); replaces the other flags and the seed.
    #[arg(long, conflicts_with_all = ["n", "d", "alpha", "shift_eps", "trials", "tol_w", "keep_spectra"])]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 25)]
    pub n: usize,
    #[arg(long, default_value_t = 120)]
    pub d: usize,
    #[arg(long, default_value_t = 0.9)]
    pub alpha: f64,
    #[arg(long = "eps", default_value_t = 0.1)]
    pub shift_eps: f64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_TOL_W)]
    #[serde(default = "tol_w")]
    pub tol_w: f64,
    /// Write the full spectra of Z, PT(Z) and C to spectra.csv.
    #[arg(long)]
    #[serde(default)]
    pub keep_spectra: bool,
}

fn tol_w() -> f64 {
    DEFAULT_TOL_W
}

impl WitnessParams {
    pub fn experiment(&self, seed: Seed) -> WitnessExperimentConfig {
        WitnessExperimentConfig {
            n: self.n,
            d: self.d,
            alpha: self.alpha,
            shift_eps: self.shift_eps,
            trials: self.trials,
            seed,
            tol_w: self.tol_w,
            keep_spectra: self.keep_spectra,
        }
    }

    /// Replaces the flags with the contents of `--config`, returning its seed.
    pub fn resolve(&mut self) -> Result<Option<Seed>> {
        let Some(path) = self.config.take() else {
            return Ok(None);
        };
        let cfg: WitnessExperimentConfig = read_json(&path)?;
        *self = WitnessParams {
            config: None,
            n: cfg.n,
            d: cfg.d,
            alpha: cfg.alpha,
            shift_eps: cfg.shift_eps,
            trials: cfg.trials,
            tol_w: cfg.tol_w,
            keep_spectra: cfg.keep_spectra,
        };
        Ok(Some(cfg.seed))
    }
}

/// Writes the report artifacts; the JSON copy leaves the spectra to the CSV.
pub fn write_report(report: &WitnessReport, sink: &mut Sink) -> Result<serde_json::Value> {
    let mut trials = Table::new(&[
        "trial",
        "witness",
        "lambda_min_z",
        "lambda_min_ptz",
        "z_psd",
        "ppt",
        "detected",
    ]);
    for t in &report.trials {
        trials.push(vec![
            t.trial.to_string(),
            num(t.witness),
            num(t.lambda_min_z),
            num(t.lambda_min_ptz),
            t.z_psd.to_string(),
            t.ppt.to_string(),
            t.detected.to_string(),
        ]);
    }
    let pts: Vec<(f64, f64)> = report.trials.iter().map(|t| (t.trial as f64, t.witness)).collect();
    let plot = Plot::new("Bell witness per trial", "trial", "witness")
        .markers(pts, 0)
        .hline(report.theory.witness_limit, 1)
        .hline(0.0, 2);
    sink.plot("witness", &plot, &trials)?;
    if !report.spectra.is_empty() {
        let mut sp = Table::new(&["trial", "kind", "index", "eigenvalue"]);
        for s in &report.spectra {
            let kind = serde_json::to_value(s.kind)?;
            for (i, v) in s.eigenvalues.iter().enumerate() {
                sp.push(vec![
                    s.trial.to_string(),
                    kind.as_str().unwrap_or("").into(),
                    i.to_string(),
                    num(*v),
                ]);
            }
        }
        sink.csv("spectra.csv", &sp)?;
    }
    let mut slim = report.clone();
    slim.spectra.clear();
    let doc = serde_json::to_value(&slim)?;
    sink.json("witness_report.json", &doc)?;
    Ok(doc)
}

pub fn run(p: &WitnessParams, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
    let cfg = p.experiment(seed);
    let report = detection_verdict(&cfg)?;
    let consistent = report.regime_consistent();
    if !consistent {
        log::warn!(
            "detection rate {} contradicts the regime prediction (expected detection: {})",
            report.aggregates.detection_rate,
            report.theory.detection_expected
        );
    }
    let doc = write_report(&report, sink)?;
    Ok(Outcome {
        summary: json!({ "report": doc, "regime_consistent": consistent }),
        consistent,
    })
}

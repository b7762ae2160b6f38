use anyhow::Result;
use freepos::rmt::Seed;
use freepos::witness::{detection_verdict, IndecomposabilityReport};
use serde_json::json;

use super::witness::{write_report, WitnessParams};
use super::Outcome;
use crate::output::{num, Sink, Table};

/// Certificates are only attempted in the detection regime; elsewhere the
/// run stops with a configuration error before sampling anything.
pub fn run(p: &WitnessParams, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
    let cfg = p.experiment(seed);
    cfg.validate()?;
    if !cfg.in_detection_regime() {
        // same guard and message as the library entry point
        freepos::witness::indecomposability_certificate(&cfg)?;
    }
    let detection = detection_verdict(&cfg)?;
    write_report(&detection, sink)?;
    let report = IndecomposabilityReport::from_detection(detection)?;
    let mut t = Table::new(&["trial", "certified", "witness", "lambda_min_z", "lambda_min_ptz"]);
    for r in &report.records {
        t.push(vec![
            r.trial.to_string(),
            r.certified.to_string(),
            num(r.witness),
            num(r.lambda_min_z),
            num(r.lambda_min_ptz),
        ]);
    }
    sink.csv("certificates.csv", &t)?;
    let doc = json!({
        "records": report.records,
        "issued": report.issued,
        "rate": report.rate,
        "sound": report.is_sound(),
    });
    sink.json("certificates.json", &doc)?;
    let consistent = report.detection.regime_consistent();
    Ok(Outcome {
        summary: doc,
        consistent,
    })
}

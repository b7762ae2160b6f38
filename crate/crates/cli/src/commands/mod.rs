//! One subcommand per experiment. Every parameter struct doubles as the
//! `params` object of a run configuration.

use anyhow::Result;
use clap::Subcommand;
use freepos::rmt::Seed;
use serde::{Deserialize, Serialize};

use crate::output::Sink;

pub mod certify;
pub mod choi;
pub mod freeconv;
pub mod kpos;
pub mod probe;
pub mod separability;
pub mod spectrum;
pub mod threshold;
pub mod witness;

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Params {
    /// k-positivity verdict table for a semicircle or shifted free Poisson Choi law.
    Threshold(threshold::ThresholdParams),
    /// Support of a free additive convolution power, optionally against the matrix oracle.
    Freeconv(freeconv::FreeconvParams),
    /// Bell-witness detection on GUE-built PPT candidates.
    Witness(witness::WitnessParams),
    /// Indecomposability certificates from a witness run.
    Certify(witness::WitnessParams),
    /// Explicit separable decomposition of xI + GUE.
    Separability(separability::SeparabilityParams),
    /// Numeric k-positivity search on a Choi matrix file.
    Kpos(kpos::KposParams),
    /// Eigenvalues and histogram of a random-matrix ensemble.
    Spectrum(spectrum::SpectrumParams),
    /// Writes a Choi matrix file.
    Choi(choi::ChoiParams),
    /// Agreement of the small-rank map test with the reduction test over an ε schedule.
    Probe(probe::ProbeParams),
}

/// What a command reports back to `main`.
pub struct Outcome {
    /// Printed to stdout as JSON.
    pub summary: serde_json::Value,
    /// False when the scientific outcome contradicts the theory (exit code 3).
    pub consistent: bool,
}

impl Outcome {
    pub fn ok(summary: serde_json::Value) -> Self {
        Outcome {
            summary,
            consistent: true,
        }
    }
}

impl Params {
    pub fn name(&self) -> &'static str {
        match self {
            Params::Threshold(_) => "threshold",
            Params::Freeconv(_) => "freeconv",
            Params::Witness(_) => "witness",
            Params::Certify(_) => "certify",
            Params::Separability(_) => "separability",
            Params::Kpos(_) => "kpos",
            Params::Spectrum(_) => "spectrum",
            Params::Choi(_) => "choi",
            Params::Probe(_) => "probe",
        }
    }

    pub fn execute(&self, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
        match self {
            Params::Threshold(p) => threshold::run(p, sink),
            Params::Freeconv(p) => freeconv::run(p, seed, sink),
            Params::Witness(p) => witness::run(p, seed, sink),
            Params::Certify(p) => certify::run(p, seed, sink),
            Params::Separability(p) => separability::run(p, seed, sink),
            Params::Kpos(p) => kpos::run(p, seed, sink),
            Params::Spectrum(p) => spectrum::run(p, seed, sink),
            Params::Choi(p) => choi::run(p, seed, sink),
            Params::Probe(p) => probe::run(p, seed, sink),
        }
    }
}

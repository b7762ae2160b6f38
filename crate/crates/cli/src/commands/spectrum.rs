use anyhow::Result;
use clap::{Args, ValueEnum};
use freepos::measures::MeasureSpec;
use freepos::rmt::{build_block_gue, deterministic_diagonal, sample_gue, GaussianFamily, Seed, Spectrum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::config::ConfigError;
use crate::output::{num, Sink, Table};
use crate::svg::Plot;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// d×d GUE.
    Gue,
    /// Block GUE on ℂⁿ ⊗ ℂᵈ.
    BlockGue,
    /// Deterministic quantile diagonal of --spec with d entries.
    Diag,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    #[arg(long, value_enum)]
    pub ensemble: Ensemble,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    pub n: usize,
    /// Measure JSON for the diag ensemble.
    #[arg(long, value_parser = super::freeconv::parse_spec)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<MeasureSpec>,
    #[arg(long, default_value_t = 60)]
    #[serde(default = "bins")]
    pub bins: usize,
}

fn one() -> usize {
    1
}

fn bins() -> usize {
    60
}

pub fn run(p: &SpectrumParams, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
    if p.d == 0 || p.n == 0 || p.bins == 0 {
        return Err(ConfigError::other("d, n and bins must be positive").into());
    }
    let standard = MeasureSpec::semicircle(0.0, 1.0)?;
    let (spectrum, reference) = match p.ensemble {
        Ensemble::Gue => (sample_gue(p.d, seed).spectrum()?, standard),
        Ensemble::BlockGue => {
            let fam = GaussianFamily::sample(p.n, p.d, seed);
            (build_block_gue(p.n, p.d, &fam)?.spectrum()?, standard)
        }
        Ensemble::Diag => {
            let spec = p
                .spec
                .clone()
                .ok_or_else(|| ConfigError::other("the diag ensemble needs --spec"))?;
            (Spectrum::from_sorted(deterministic_diagonal(&spec, p.d * p.n)?), spec)
        }
    };
    let ks = (!reference.is_finitely_supported()).then(|| spectrum.kolmogorov_distance(|x| reference.cdf(x)));

    let mut eig = Table::new(&["index", "eigenvalue"]);
    for (i, v) in spectrum.values().iter().enumerate() {
        eig.push(vec![i.to_string(), num(*v)]);
    }
    sink.csv("eigenvalues.csv", &eig)?;

    let supp = reference.support();
    let lo = spectrum.min().min(supp.min_supp);
    let hi = spectrum.max().max(supp.max_supp);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let h = spectrum.histogram(p.bins, lo, hi);
    let mut t = Table::new(&["lo", "hi", "count", "density", "reference_density"]);
    let mut bars = Vec::new();
    let mut overlay = Vec::new();
    for b in 0..h.counts.len() {
        let (a, z) = (h.edges[b], h.edges[b + 1]);
        let reference_density = (reference.cdf(z) - reference.cdf(a)) / (z - a);
        t.push(vec![
            num(a),
            num(z),
            h.counts[b].to_string(),
            num(h.density[b]),
            num(reference_density),
        ]);
        bars.push((a, z, h.density[b]));
        overlay.push((0.5 * (a + z), reference_density));
    }
    let plot = Plot::new("eigenvalue histogram", "eigenvalue", "density")
        .bars(bars, 0)
        .line(overlay, 1);
    sink.plot("histogram", &plot, &t)?;

    let doc = json!({
        "ensemble": p.ensemble,
        "dim": spectrum.len(),
        "min": spectrum.min(),
        "max": spectrum.max(),
        "norm": spectrum.norm(),
        "reference": reference,
        "kolmogorov_distance": ks,
    });
    sink.json("spectrum.json", &doc)?;
    Ok(Outcome::ok(doc))
}

use anyhow::Result;
use clap::{Args, ValueEnum};
use faer::{c64, Mat};
use freepos::measures::MeasureSpec;
use freepos::rmt::{io, sample_choi_map, BipartiteOperator, HermitianMatrix, Seed};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::config::ConfigError;
use crate::output::Sink;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ChoiKind {
    /// U·diag(spec)·U* with Haar U.
    Sampled,
    /// The transposition map on M_n (needs d = n).
    Transpose,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Binary,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiParams {
    #[arg(long, value_enum)]
    pub kind: ChoiKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// Measure JSON for the sampled kind.
    #[arg(long, value_parser = super::freeconv::parse_spec)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<MeasureSpec>,
    #[arg(long, value_enum, default_value = "binary")]
    #[serde(default = "binary")]
    pub format: Format,
}

fn binary() -> Format {
    Format::Binary
}

fn transpose_choi(n: usize) -> Result<BipartiteOperator> {
    let mut m = Mat::<c64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            m[(i * n + j, j * n + i)] = c64::new(1.0, 0.0);
        }
    }
    Ok(BipartiteOperator::new(n, n, HermitianMatrix::new(m)?)?)
}

pub fn run(p: &ChoiParams, seed: Seed, sink: &mut Sink) -> Result<Outcome> {
    if p.n == 0 || p.d == 0 {
        return Err(ConfigError::other("n and d must be positive").into());
    }
    let c = match p.kind {
        ChoiKind::Sampled => {
            let spec = p
                .spec
                .as_ref()
                .ok_or_else(|| ConfigError::other("the sampled kind needs --spec"))?;
            sample_choi_map(spec, p.n, p.d, seed)?
        }
        ChoiKind::Transpose => {
            if p.n != p.d {
                return Err(ConfigError::other("the transposition Choi matrix needs d = n").into());
            }
            transpose_choi(p.n)?
        }
        ChoiKind::Identity => BipartiteOperator::identity(p.n, p.d),
    };
    let file = match p.format {
        Format::Binary => "choi.fprm",
        Format::Csv => "choi.csv",
    };
    // the matrix is the product of this command, so it is written regardless of the emit flags
    match p.format {
        Format::Binary => sink.write_raw(file, &io::to_bytes(&c))?,
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_csv(&mut buf, c.matrix())?;
            sink.write_raw(file, &buf)?;
        }
    }
    let doc = json!({
        "kind": p.kind,
        "n": p.n,
        "d": p.d,
        "file": sink.dir().join(file),
        "min_eigenvalue": c.min_eigenvalue()?,
    });
    sink.json("choi.json", &doc)?;
    Ok(Outcome::ok(doc))
}

//! Compactly supported probability measures on the real line.
//!
//! A [`MeasureSpec`] is either one of the two parametric families used
//! throughout the crate (semicircle, free Poisson), an affine image of another
//! spec, or a finitely supported law (explicit atoms or an empirical sample).
//! Every variant exposes moments, free cumulants (where closed forms exist),
//! the Cauchy transform, the exact support and the quantile function.

use faer::c64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quadrature;

/// Absolute tolerance used for all density quadratures.
pub const QUAD_TOL: f64 = 1e-10;

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// Semicircle law of mean `a` and variance `sigma²`, supported on `[a-2σ, a+2σ]`.
    Semicircle { a: f64, sigma: f64 },
    /// Free Poisson (Marchenko–Pastur) law of rate `t`.
    FreePoisson { t: f64 },
    /// Law of `offset + scale·X` where `X` has law `base`.
    Affine {
        base: Box<MeasureSpec>,
        offset: f64,
        scale: f64,
    },
    /// Finitely many atoms, each given as `[weight, location]`.
    Atomic { atoms: Vec<(f64, f64)> },
    /// Equal-weight empirical law of a sorted sample.
    Empirical { samples: Vec<f64> },
}

/// How a [`SupportProfile`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportMethod {
    ClosedForm,
    CriticalPoint,
    MonteCarlo,
}

/// Support of a measure: hull endpoints, absolutely continuous bands and atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportProfile {
    #[serde(rename = "min")]
    pub min_supp: f64,
    #[serde(rename = "max")]
    pub max_supp: f64,
    /// Disjoint intervals carrying the absolutely continuous part, ascending.
    #[serde(default)]
    pub bands: Vec<(f64, f64)>,
    /// Point masses as `(location, weight)`, ascending in location.
    pub atoms: Vec<(f64, f64)>,
    pub method: SupportMethod,
}

impl SupportProfile {
    pub(crate) fn from_parts(mut bands: Vec<(f64, f64)>, mut atoms: Vec<(f64, f64)>, method: SupportMethod) -> Self {
        bands.sort_by(|a, b| a.0.total_cmp(&b.0));
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let lo = bands
            .iter()
            .map(|b| b.0)
            .chain(atoms.iter().map(|a| a.0))
            .fold(f64::INFINITY, f64::min);
        let hi = bands
            .iter()
            .map(|b| b.1)
            .chain(atoms.iter().map(|a| a.0))
            .fold(f64::NEG_INFINITY, f64::max);
        SupportProfile {
            min_supp: lo,
            max_supp: hi,
            bands,
            atoms,
            method,
        }
    }

    /// Image of the support under `x ↦ offset + scale·x`.
    pub fn affine_image(&self, offset: f64, scale: f64) -> Self {
        let map = |x: f64| offset + scale * x;
        let bands = self
            .bands
            .iter()
            .map(|&(l, h)| {
                let (a, b) = (map(l), map(h));
                (a.min(b), a.max(b))
            })
            .collect();
        let atoms = self.atoms.iter().map(|&(x, w)| (map(x), w)).collect();
        Self::from_parts(bands, atoms, self.method)
    }

    pub fn contains_nonnegative_only(&self, tol: f64) -> bool {
        self.min_supp >= -tol
    }
}

fn variant_name(spec: &MeasureSpec) -> &'static str {
    match spec {
        MeasureSpec::Semicircle { .. } => "semicircle",
        MeasureSpec::FreePoisson { .. } => "free_poisson",
        MeasureSpec::Affine { .. } => "affine",
        MeasureSpec::Atomic { .. } => "atomic",
        MeasureSpec::Empirical { .. } => "empirical",
    }
}

/// Principal-branch product `√(z-l)·√(z-h)`; its cut is exactly `[l, h]` and it
/// behaves like `z - (l+h)/2` at infinity.
fn edge_sqrt(z: c64, l: f64, h: f64) -> c64 {
    (z - l).sqrt() * (z - h).sqrt()
}

impl MeasureSpec {
    pub fn semicircle(a: f64, sigma: f64) -> Result<Self> {
        let s = MeasureSpec::Semicircle { a, sigma };
        s.validate()?;
        Ok(s)
    }

    pub fn free_poisson(t: f64) -> Result<Self> {
        let s = MeasureSpec::FreePoisson { t };
        s.validate()?;
        Ok(s)
    }

    pub fn affine(base: MeasureSpec, offset: f64, scale: f64) -> Result<Self> {
        let s = MeasureSpec::Affine {
            base: Box::new(base),
            offset,
            scale,
        };
        s.validate()?;
        Ok(s)
    }

    /// Atoms given as `(weight, location)` pairs.
    pub fn atomic(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let s = MeasureSpec::Atomic { atoms };
        s.validate()?;
        Ok(s)
    }

    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        samples.sort_by(f64::total_cmp);
        let s = MeasureSpec::Empirical { samples };
        s.validate()?;
        Ok(s)
    }

    /// The law `1 - a·X_t` with `X_t` free Poisson of rate `t`.
    pub fn shifted_free_poisson(a: f64, t: f64) -> Result<Self> {
        Self::affine(Self::free_poisson(t)?, 1.0, -a)
    }

    /// Point mass at `c`.
    pub fn dirac(c: f64) -> Self {
        MeasureSpec::Atomic { atoms: vec![(1.0, c)] }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: MeasureSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMeasure(m));
        match self {
            MeasureSpec::Semicircle { a, sigma } => {
                if !a.is_finite() || !sigma.is_finite() || *sigma <= 0.0 {
                    return bad(format!(
                        "semicircle needs finite a and sigma > 0 (a={a}, sigma={sigma})"
                    ));
                }
            }
            MeasureSpec::FreePoisson { t } => {
                if !t.is_finite() || *t <= 0.0 {
                    return bad(format!("free Poisson rate must be positive, got {t}"));
                }
            }
            MeasureSpec::Affine { base, offset, scale } => {
                if !offset.is_finite() || !scale.is_finite() || *scale == 0.0 {
                    return bad(format!(
                        "affine map needs finite offset and nonzero scale (scale={scale})"
                    ));
                }
                base.validate()?;
            }
            MeasureSpec::Atomic { atoms } => {
                if atoms.is_empty() {
                    return bad("atomic measure has no atoms".into());
                }
                let mut total = 0.0;
                for &(w, x) in atoms {
                    if !(w > 0.0 && w <= 1.0) || !x.is_finite() {
                        return bad(format!(
                            "atom ({w}, {x}) has weight outside (0,1] or non-finite location"
                        ));
                    }
                    total += w;
                }
                if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                    return bad(format!("atom weights sum to {total}"));
                }
            }
            MeasureSpec::Empirical { samples } => {
                if samples.is_empty() {
                    return bad("empirical measure has no samples".into());
                }
                if samples.iter().any(|x| !x.is_finite()) {
                    return bad("empirical sample is not finite".into());
                }
                if samples.windows(2).any(|w| w[0] > w[1]) {
                    return bad("empirical samples must be sorted".into());
                }
            }
        }
        Ok(())
    }

    pub fn is_finitely_supported(&self) -> bool {
        match self {
            MeasureSpec::Atomic { .. } | MeasureSpec::Empirical { .. } => true,
            MeasureSpec::Affine { base, .. } => base.is_finitely_supported(),
            _ => false,
        }
    }

    /// Canonical atom list `(location, weight)`: sorted, duplicates merged.
    ///
    /// Only meaningful for finitely supported specs; returns `None` otherwise.
    pub fn canonical_atoms(&self) -> Option<Vec<(f64, f64)>> {
        let mut raw: Vec<(f64, f64)> = match self {
            MeasureSpec::Atomic { atoms } => atoms.iter().map(|&(w, x)| (x, w)).collect(),
            MeasureSpec::Empirical { samples } => {
                let w = 1.0 / samples.len() as f64;
                samples.iter().map(|&x| (x, w)).collect()
            }
            MeasureSpec::Affine { base, offset, scale } => base
                .canonical_atoms()?
                .into_iter()
                .map(|(x, w)| (offset + scale * x, w))
                .collect(),
            _ => return None,
        };
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (x, w) in raw {
            match out.last_mut() {
                Some(last) if (x - last.0).abs() <= 1e-14 * (1.0 + x.abs()) => last.1 += w,
                _ => out.push((x, w)),
            }
        }
        Some(out)
    }

    /// Empirical laws become equal-weight atomic laws; everything else is returned as is.
    pub fn canonicalize(&self) -> MeasureSpec {
        match self {
            MeasureSpec::Empirical { .. } => MeasureSpec::Atomic {
                atoms: self
                    .canonical_atoms()
                    .expect("empirical is finitely supported")
                    .into_iter()
                    .map(|(x, w)| (w, x))
                    .collect(),
            },
            _ => self.clone(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            MeasureSpec::Semicircle { a, .. } => *a,
            MeasureSpec::FreePoisson { t } => *t,
            MeasureSpec::Affine { base, offset, scale } => offset + scale * base.mean(),
            MeasureSpec::Atomic { atoms } => atoms.iter().map(|&(w, x)| w * x).sum(),
            MeasureSpec::Empirical { samples } => samples.iter().sum::<f64>() / samples.len() as f64,
        }
    }

    /// Free cumulants `κ_1, …, κ_{p_max}`.
    pub fn free_cumulants(&self, p_max: usize) -> Result<Vec<f64>> {
        if p_max == 0 {
            return Err(domain("p_max must be at least 1"));
        }
        match self {
            MeasureSpec::Semicircle { a, sigma } => Ok((1..=p_max)
                .map(|p| match p {
                    1 => *a,
                    2 => sigma * sigma,
                    _ => 0.0,
                })
                .collect()),
            MeasureSpec::FreePoisson { t } => Ok(vec![*t; p_max]),
            MeasureSpec::Affine { base, offset, scale } => {
                let mut k = base.free_cumulants(p_max)?;
                k[0] = offset + scale * k[0];
                for (i, kp) in k.iter_mut().enumerate().skip(1) {
                    *kp *= scale.powi(i as i32 + 1);
                }
                Ok(k)
            }
            other => Err(Error::UnsupportedVariant {
                op: "free_cumulants",
                variant: variant_name(other),
            }),
        }
    }

    pub fn support(&self) -> SupportProfile {
        match self {
            MeasureSpec::Semicircle { a, sigma } => SupportProfile::from_parts(
                vec![(a - 2.0 * sigma, a + 2.0 * sigma)],
                vec![],
                SupportMethod::ClosedForm,
            ),
            MeasureSpec::FreePoisson { t } => {
                let r = t.sqrt();
                let band = ((1.0 - r).powi(2), (1.0 + r).powi(2));
                let atoms = if *t < 1.0 { vec![(0.0, 1.0 - t)] } else { vec![] };
                SupportProfile::from_parts(vec![band], atoms, SupportMethod::ClosedForm)
            }
            MeasureSpec::Affine { base, offset, scale } => base.support().affine_image(*offset, *scale),
            MeasureSpec::Atomic { .. } | MeasureSpec::Empirical { .. } => SupportProfile::from_parts(
                vec![],
                self.canonical_atoms().expect("finitely supported"),
                SupportMethod::ClosedForm,
            ),
        }
    }

    /// Density of the absolutely continuous part (zero for finitely supported laws).
    pub fn density(&self, x: f64) -> f64 {
        match self {
            MeasureSpec::Semicircle { a, sigma } => {
                let u = x - a;
                let r = 4.0 * sigma * sigma - u * u;
                if r <= 0.0 {
                    0.0
                } else {
                    r.sqrt() / (2.0 * PI * sigma * sigma)
                }
            }
            MeasureSpec::FreePoisson { t } => {
                let u = x - 1.0 - t;
                let r = 4.0 * t - u * u;
                if r <= 0.0 || x <= 0.0 {
                    0.0
                } else {
                    r.sqrt() / (2.0 * PI * x)
                }
            }
            MeasureSpec::Affine { base, offset, scale } => base.density((x - offset) / scale) / scale.abs(),
            MeasureSpec::Atomic { .. } | MeasureSpec::Empirical { .. } => 0.0,
        }
    }

    /// `∫ f dμ`, atoms summed exactly and the density integrated adaptively.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.integrate_dyn(&f)
    }

    fn integrate_dyn(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        match self {
            MeasureSpec::Affine { base, offset, scale } => base.integrate_dyn(&|x| f(offset + scale * x)),
            _ => {
                let supp = self.support();
                let atoms: f64 = supp.atoms.iter().map(|&(x, w)| w * f(x)).sum();
                let ac: f64 = supp
                    .bands
                    .iter()
                    .map(|&(l, h)| quadrature::integrate(|x| f(x) * self.density(x), l, h, QUAD_TOL))
                    .sum();
                atoms + ac
            }
        }
    }

    /// Repartition function `F(x) = μ((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            MeasureSpec::Semicircle { a, sigma } => {
                let u = ((x - a) / sigma).clamp(-2.0, 2.0);
                (0.5 + u * (4.0 - u * u).max(0.0).sqrt() / (4.0 * PI) + (u / 2.0).asin() / PI).clamp(0.0, 1.0)
            }
            MeasureSpec::FreePoisson { t } => {
                let r = t.sqrt();
                let (l, h) = ((1.0 - r).powi(2), (1.0 + r).powi(2));
                let atom = if *t < 1.0 && x >= 0.0 { 1.0 - t } else { 0.0 };
                let ac = if x <= l {
                    0.0
                } else {
                    let mass = if *t < 1.0 { *t } else { 1.0 };
                    if x >= h {
                        mass
                    } else {
                        quadrature::integrate(|y| self.density(y), l, x, QUAD_TOL).min(mass)
                    }
                };
                (atom + ac).clamp(0.0, 1.0)
            }
            MeasureSpec::Affine { base, offset, scale } => {
                let y = (x - offset) / scale;
                if *scale > 0.0 {
                    base.cdf(y)
                } else {
                    // P(X >= y) = 1 - F(y) + P(X = y)
                    let at = base.point_mass(y);
                    (1.0 - base.cdf(y) + at).clamp(0.0, 1.0)
                }
            }
            MeasureSpec::Atomic { .. } | MeasureSpec::Empirical { .. } => self
                .canonical_atoms()
                .expect("finitely supported")
                .iter()
                .filter(|a| a.0 <= x)
                .map(|a| a.1)
                .sum::<f64>()
                .min(1.0),
        }
    }

    /// Mass carried by the point `{x}`.
    pub fn point_mass(&self, x: f64) -> f64 {
        match self {
            MeasureSpec::Affine { base, offset, scale } => base.point_mass((x - offset) / scale),
            _ => self
                .support()
                .atoms
                .iter()
                .filter(|a| (a.0 - x).abs() <= 1e-14 * (1.0 + x.abs()))
                .map(|a| a.1)
                .sum(),
        }
    }

    /// Generalized inverse `inf{x : F(x) >= p}` for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain(format!("quantile level must lie in (0,1), got {p}")));
        }
        if self.is_finitely_supported() {
            let atoms = self.canonical_atoms().expect("finitely supported");
            let mut cum = 0.0;
            for &(x, w) in &atoms {
                cum += w;
                if cum >= p - 1e-12 {
                    return Ok(x);
                }
            }
            return Ok(atoms.last().expect("non-empty").0);
        }
        let supp = self.support();
        let scale = 1.0 + supp.max_supp.abs().max(supp.min_supp.abs());
        let mut lo = supp.min_supp - 1e-9 * scale;
        let mut hi = supp.max_supp;
        while hi - lo > 1e-13 * scale {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Quantile grid `quantile((i - 1/2)/m)`, `i = 1..m`, ascending.
    pub fn quantile_grid(&self, m: usize) -> Result<Vec<f64>> {
        (1..=m).map(|i| self.quantile((i as f64 - 0.5) / m as f64)).collect()
    }

    /// Equal-weight atomic approximation on the quantile grid.
    pub fn discretize(&self, m: usize) -> Result<MeasureSpec> {
        if m == 0 {
            return Err(domain("discretization needs at least one atom"));
        }
        let w = 1.0 / m as f64;
        let atoms = self.quantile_grid(m)?.into_iter().map(|x| (w, x)).collect();
        Ok(MeasureSpec::Atomic { atoms })
    }

    /// Cauchy transform `G(z) = ∫ dμ(x)/(z - x)` on the upper half-plane.
    pub fn cauchy_transform(&self, z: c64) -> Result<c64> {
        if !(z.im > 0.0) {
            return Err(domain(format!("Cauchy transform needs Im z > 0, got {z}")));
        }
        Ok(self.resolvent(z))
    }

    /// Cauchy transform at any point off the support (no half-plane check).
    pub fn resolvent(&self, z: c64) -> c64 {
        match self {
            MeasureSpec::Semicircle { a, sigma } => {
                let w = (z - a) / sigma;
                // rationalized: no cancellation for large |z|
                2.0 / (sigma * (w + edge_sqrt(w, -2.0, 2.0)))
            }
            MeasureSpec::FreePoisson { t } => {
                let r = t.sqrt();
                let (l, h) = ((1.0 - r).powi(2), (1.0 + r).powi(2));
                2.0 / (z + 1.0 - t + edge_sqrt(z, l, h))
            }
            MeasureSpec::Affine { base, offset, scale } => base.resolvent((z - offset) / scale) / scale,
            MeasureSpec::Atomic { .. } | MeasureSpec::Empirical { .. } => self
                .canonical_atoms()
                .expect("finitely supported")
                .iter()
                .map(|&(x, w)| w / (z - x))
                .sum(),
        }
    }
}

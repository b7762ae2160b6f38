//! Free additive convolution powers `μ^{⊞T}` and the compression law.
//!
//! Closed forms cover the semicircle and free Poisson families and their affine
//! images (free cumulants scale linearly in `T`). Finitely supported laws go
//! through a critical-point engine: with `F = 1/G` and
//! `H_T(ω) = Tω + (1 - T)F(ω)` (which is `K_T(G(ω))` for the inverse Cauchy
//! transform `K_T` of the power), the complement of the support of `μ^{⊞T}` is
//! the image under `H_T` of the real set where `H_T' > 0`, and the support edges
//! are the values of `H_T` at the real zeros of `H_T'`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measures::{MeasureSpec, SupportMethod, SupportProfile};

/// Outcome of a free power computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreePowerResult {
    pub input: MeasureSpec,
    #[serde(rename = "T")]
    pub power: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result_spec: Option<MeasureSpec>,
    pub support: SupportProfile,
}

/// Total number of grid points used by the critical-point scan.
pub const SCAN_POINTS: usize = 10_000;
const MIN_POINTS_PER_SEGMENT: usize = 256;
const BISECTION_TOL: f64 = 1e-12;

/// Closed form of `spec^{⊞T}` when one exists.
pub fn closed_form_power(spec: &MeasureSpec, power: f64) -> Option<MeasureSpec> {
    match spec {
        MeasureSpec::Semicircle { a, sigma } => Some(MeasureSpec::Semicircle {
            a: a * power,
            sigma: sigma * power.sqrt(),
        }),
        MeasureSpec::FreePoisson { t } => Some(MeasureSpec::FreePoisson { t: t * power }),
        MeasureSpec::Affine { base, offset, scale } => {
            // κ_1 = T(β + γκ_1), κ_p = Tγ^p κ_p: same as β·T + γ·(base^{⊞T})
            closed_form_power(base, power).map(|b| MeasureSpec::Affine {
                base: Box::new(b),
                offset: offset * power,
                scale: *scale,
            })
        }
        MeasureSpec::Atomic { atoms } if atoms.len() == 1 => Some(MeasureSpec::dirac(atoms[0].1 * power)),
        _ => None,
    }
}

/// `μ^{⊞T}` for `T >= 1`.
pub fn free_power(spec: &MeasureSpec, power: f64) -> Result<FreePowerResult> {
    spec.validate()?;
    if !(power >= 1.0) || !power.is_finite() {
        return Err(domain(format!("free convolution power needs T >= 1, got {power}")));
    }
    if power == 1.0 {
        return Ok(FreePowerResult {
            input: spec.clone(),
            power,
            result_spec: Some(spec.clone()),
            support: spec.support(),
        });
    }
    if let Some(res) = closed_form_power(spec, power) {
        let support = res.support();
        return Ok(FreePowerResult {
            input: spec.clone(),
            power,
            result_spec: Some(res),
            support,
        });
    }
    let support = numeric_free_power_support(spec, power)?;
    Ok(FreePowerResult {
        input: spec.clone(),
        power,
        result_spec: None,
        support,
    })
}

/// Law of `t⁻¹ p a p` for a free projection `p` of trace `t`, i.e. `μ^{⊞1/t}`.
///
/// Spectra of compressed corners must be multiplied by `1/t` before comparison.
pub fn compression_law(spec: &MeasureSpec, t: f64) -> Result<FreePowerResult> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!("projection trace must lie in (0,1), got {t}")));
    }
    free_power(spec, 1.0 / t)
}

/// Atom of `μ^{⊞T}` created by an atom of `μ` at `x` of weight `w`.
pub fn surviving_atom(x: f64, w: f64, power: f64) -> Option<(f64, f64)> {
    let mass = power * w - (power - 1.0);
    (mass > 1e-12).then_some((power * x, mass))
}

/// Evaluates `H_T` and `H_T'` for a finitely supported law.
struct Subordination<'a> {
    atoms: &'a [(f64, f64)],
    power: f64,
}

impl Subordination<'_> {
    fn sums(&self, omega: f64) -> (f64, f64) {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for &(x, w) in self.atoms {
            let r = 1.0 / (omega - x);
            s1 += w * r;
            s2 += w * r * r;
        }
        (s1, s2)
    }

    /// `H_T'(ω) = T - (T-1)F'(ω)` with `F' = S2/S1²`.
    fn slope(&self, omega: f64) -> f64 {
        let (s1, s2) = self.sums(omega);
        if s1 == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.power - (self.power - 1.0) * (s2 / s1) / s1
    }

    fn value(&self, omega: f64) -> f64 {
        let (s1, _) = self.sums(omega);
        self.power * omega + (1.0 - self.power) / s1
    }
}

#[derive(Clone, Copy)]
enum NodeKind {
    Grid,
    Atom(f64),
    Pole,
}

#[derive(Clone, Copy)]
struct Sample {
    omega: f64,
    slope: f64,
    kind: NodeKind,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Zero of `S1` in the open gap between two consecutive atoms.
fn pole_between(sub: &Subordination<'_>, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if sub.sums(m).0 > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn push_two_sided(points: &mut Vec<f64>, p: f64, q: f64, k: usize) {
    let half = 0.5 * (q - p);
    for i in 0..k {
        let s = half * 10f64.powf(-12.0 + 12.0 * i as f64 / (k - 1) as f64);
        let (l, r) = (p + s, q - s);
        if l > p && l < q {
            points.push(l);
        }
        if r > p && r < q && (r - l).abs() > 0.0 {
            points.push(r);
        }
    }
}

fn push_one_sided(points: &mut Vec<f64>, anchor: f64, dir: f64, k: usize) {
    for i in 0..k {
        let s = 10f64.powf(-8.0 + 16.0 * i as f64 / (k - 1) as f64);
        points.push(anchor + dir * s);
    }
}

/// Support of `μ^{⊞T}` for a finitely supported `μ` by the critical-point scan.
pub fn numeric_free_power_support(spec: &MeasureSpec, power: f64) -> Result<SupportProfile> {
    let atoms = spec.canonical_atoms().ok_or(Error::UnsupportedVariant {
        op: "numeric_free_power_support",
        variant: "absolutely continuous",
    })?;
    if !(power >= 1.0) || !power.is_finite() {
        return Err(domain(format!("free convolution power needs T >= 1, got {power}")));
    }
    if atoms.len() == 1 || power == 1.0 {
        let scaled = atoms.iter().map(|&(x, w)| (power * x, w)).collect();
        return Ok(SupportProfile::from_parts(vec![], scaled, SupportMethod::CriticalPoint));
    }

    let sub = Subordination { atoms: &atoms, power };
    let poles: Vec<f64> = atoms.windows(2).map(|w| pole_between(&sub, w[0].0, w[1].0)).collect();

    // nodes: atom, pole, atom, pole, ..., atom
    let mut nodes: Vec<(f64, NodeKind)> = Vec::with_capacity(2 * atoms.len());
    for (i, &(x, w)) in atoms.iter().enumerate() {
        nodes.push((x, NodeKind::Atom(w)));
        if let Some(&p) = poles.get(i) {
            nodes.push((p, NodeKind::Pole));
        }
    }
    let segments = nodes.len() + 1;
    let k = (SCAN_POINTS / segments).max(MIN_POINTS_PER_SEGMENT);

    let mut omegas = Vec::with_capacity(k * 2 * segments);
    push_one_sided(&mut omegas, atoms[0].0, -1.0, k);
    push_one_sided(&mut omegas, atoms[atoms.len() - 1].0, 1.0, k);
    for w in nodes.windows(2) {
        push_two_sided(&mut omegas, w[0].0, w[1].0, k);
    }
    let mut samples: Vec<Sample> = omegas
        .into_iter()
        .map(|omega| Sample {
            omega,
            slope: sub.slope(omega),
            kind: NodeKind::Grid,
        })
        .collect();
    for &(omega, kind) in &nodes {
        let slope = match kind {
            NodeKind::Atom(w) => power - (power - 1.0) / w,
            _ => f64::NEG_INFINITY,
        };
        samples.push(Sample { omega, slope, kind });
    }
    samples.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    samples.dedup_by(|a, b| a.omega == b.omega);

    let edge_value = |s: &Sample| match s.kind {
        NodeKind::Atom(_) => power * s.omega,
        _ => sub.value(s.omega),
    };

    // Walk the scan and record sign changes of H_T' as (omega, +1 exit / -1 enter).
    let mut crossings: Vec<(f64, i8)> = Vec::new();
    let mut prev: Option<Sample> = None;
    let mut pending_zero: Option<Sample> = None;
    for s in &samples {
        let sg = sign(s.slope);
        if sg == 0 {
            pending_zero.get_or_insert(*s);
            continue;
        }
        if let Some(p) = prev {
            let psg = sign(p.slope);
            if psg != sg {
                let edge = match pending_zero {
                    Some(z) => edge_value(&z),
                    None => {
                        let (mut a, mut b) = (p.omega, s.omega);
                        while b - a > BISECTION_TOL * (1.0 + a.abs().max(b.abs())) {
                            let m = 0.5 * (a + b);
                            if m <= a || m >= b {
                                break;
                            }
                            if sign(sub.slope(m)) == psg {
                                a = m;
                            } else {
                                b = m;
                            }
                        }
                        sub.value(0.5 * (a + b))
                    }
                };
                crossings.push((edge, sg));
            }
        }
        pending_zero = None;
        prev = Some(*s);
    }

    if !crossings.len().is_multiple_of(2) {
        return Err(Error::ConvergenceFailure(format!(
            "odd number ({}) of critical points found for T = {power}",
            crossings.len()
        )));
    }
    let mut bands = Vec::with_capacity(crossings.len() / 2);
    for pair in crossings.chunks(2) {
        let ((lo, d0), (hi, d1)) = (pair[0], pair[1]);
        if d0 != -1 || d1 != 1 {
            return Err(Error::ConvergenceFailure(
                "critical points do not alternate between band entry and exit".into(),
            ));
        }
        bands.push((lo.min(hi), lo.max(hi)));
    }
    let surviving: Vec<(f64, f64)> = atoms.iter().filter_map(|&(x, w)| surviving_atom(x, w, power)).collect();
    if bands.is_empty() && surviving.is_empty() {
        return Err(Error::ConvergenceFailure(format!(
            "scan found neither bands nor atoms for T = {power}"
        )));
    }
    Ok(SupportProfile::from_parts(
        bands,
        surviving,
        SupportMethod::CriticalPoint,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_power_closed_form() {
        let r = free_power(&MeasureSpec::semicircle(1.0, 1.0).unwrap(), 4.0).unwrap();
        assert_eq!(r.result_spec, Some(MeasureSpec::Semicircle { a: 4.0, sigma: 2.0 }));
        assert_eq!((r.support.min_supp, r.support.max_supp), (0.0, 8.0));
    }

    #[test]
    fn unit_power_is_identity() {
        for spec in [
            MeasureSpec::semicircle(0.3, 0.7).unwrap(),
            MeasureSpec::atomic(vec![(0.25, -1.0), (0.75, 2.0)]).unwrap(),
            MeasureSpec::shifted_free_poisson(0.6, 0.25).unwrap(),
        ] {
            let r = free_power(&spec, 1.0).unwrap();
            assert_eq!(r.result_spec.as_ref(), Some(&spec));
            assert_eq!(r.support, spec.support());
        }
    }

    #[test]
    fn rejects_small_powers() {
        let sc = MeasureSpec::semicircle(0.0, 1.0).unwrap();
        assert!(matches!(free_power(&sc, 0.5), Err(Error::Domain(_))));
        assert!(matches!(compression_law(&sc, 1.0), Err(Error::Domain(_))));
        assert!(matches!(compression_law(&sc, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn compression_of_semicircle() {
        let r = compression_law(&MeasureSpec::semicircle(0.0, 1.0).unwrap(), 0.5).unwrap();
        let s = 2f64.sqrt();
        match r.result_spec.unwrap() {
            MeasureSpec::Semicircle { a, sigma } => {
                assert_eq!(a, 0.0);
                assert!((sigma - s).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!((r.support.min_supp + 2.0 * s).abs() < 1e-14);
    }

    #[test]
    fn compression_of_shifted_free_poisson_bottom() {
        let (a, t0, n, k) = (0.6, 0.25, 4.0, 2.0);
        let r = compression_law(&MeasureSpec::shifted_free_poisson(a, t0).unwrap(), k / n).unwrap();
        let expected = 1.0 - (k / n) * a * (1.0 + t0 * n / k + 2.0 * (t0 * n / k).sqrt());
        assert!((r.support.min_supp * k / n - expected).abs() < 1e-12);
    }

    #[test]
    fn dirac_power() {
        let r = numeric_free_power_support(&MeasureSpec::dirac(1.5), 3.0).unwrap();
        assert_eq!(r.atoms, vec![(4.5, 1.0)]);
        assert!(r.bands.is_empty());
    }

    #[test]
    fn bernoulli_square_is_arcsine_on_two() {
        let spec = MeasureSpec::atomic(vec![(0.5, -1.0), (0.5, 1.0)]).unwrap();
        let s = numeric_free_power_support(&spec, 2.0).unwrap();
        assert!(s.atoms.is_empty());
        assert_eq!(s.bands.len(), 1);
        assert!((s.min_supp + 2.0).abs() < 1e-9, "{s:?}");
        assert!((s.max_supp - 2.0).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn heavy_atom_survives() {
        let spec = MeasureSpec::atomic(vec![(0.75, -1.0), (0.25, 3.0)]).unwrap();
        let s = numeric_free_power_support(&spec, 2.0).unwrap();
        assert_eq!(s.atoms.len(), 1);
        assert!((s.atoms[0].0 + 2.0).abs() < 1e-15);
        assert!((s.atoms[0].1 - 0.5).abs() < 1e-15);
        assert_eq!(s.bands.len(), 1);
        // the continuous band sits to the right of the atom
        assert!(s.bands[0].0 > -2.0);
    }

    #[test]
    fn numeric_matches_closed_form_for_free_poisson_discretization() {
        // 1 - 0.6 X_{1/4} discretized: the bottom edge of the square power
        let spec = MeasureSpec::shifted_free_poisson(0.6, 0.25).unwrap();
        let exact = free_power(&spec, 2.0).unwrap().support;
        let approx = numeric_free_power_support(&spec.discretize(400).unwrap(), 2.0).unwrap();
        assert!(
            (approx.min_supp - exact.min_supp).abs() < 0.03,
            "{approx:?} vs {exact:?}"
        );
    }

    #[test]
    fn slightly_powered_bernoulli_keeps_atoms() {
        // T = 1.2: atoms at ±12 keep mass 1.2/2 - 0.2 = 0.4, the band is ±20√0.2/2
        let spec = MeasureSpec::atomic(vec![(0.5, -10.0), (0.5, 10.0)]).unwrap();
        let s = numeric_free_power_support(&spec, 1.2).unwrap();
        assert_eq!(s.atoms.len(), 2);
        assert!((s.atoms[1].0 - 12.0).abs() < 1e-12 && (s.atoms[1].1 - 0.4).abs() < 1e-12);
        assert_eq!(s.bands.len(), 1, "{s:?}");
        let edge = 20.0 * 0.2f64.sqrt();
        assert!((s.bands[0].1 - edge).abs() < 1e-8, "{s:?}");
        assert!((s.bands[0].0 + edge).abs() < 1e-8, "{s:?}");
    }
}

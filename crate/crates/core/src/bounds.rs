//! Sampled Schwarz-type bounds, three-circle convexity, hoop lemmas and degeneracy
//! profiles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::functionals::{k_ricci_extremes, ricci_extremes, scalar};
use crate::geometry::{curvature_tensor, KahlerChart};
use crate::identities::{fraction_text, HypothesisSampling, HYPOTHESIS_TOL};
use crate::linalg::CMatrix;
use crate::maps::{map_point_data, sigma_k, HoloMap, MapPointData};
use crate::report::{
    point_json, BoundDirection, BoundReport, CheckReport, CheckStatus, ConstantSource, DegeneracyProfile, Hypothesis,
    ProfileRow,
};
use crate::sampling::Sampler;
use crate::{Error, Result, C64};

pub const DEFAULT_BOUND_TOL: f64 = 1e-8;
/// Largest deviation of `g` from the identity accepted for a flat domain chart.
pub const FLAT_TOL: f64 = 1e-12;

/// Curvature quantity whose sampled extreme defines a hypothesis constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    HolomorphicSectional,
    Scalar,
    Ricci,
    /// `Ric_k`, the `k`-Ricci curvature.
    RicciK(usize),
}

/// Form of the hypothesis in terms of the constant `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    /// `q ≥ −C`
    AtLeastMinus,
    /// `q ≤ −C`
    AtMostMinus,
    /// `q ≥ C`
    AtLeast,
    /// `q ≤ C`
    AtMost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Domain,
    Target,
}

/// A hypothesis constant: the analytic value when given, otherwise estimated from samples.
#[derive(Clone, Copy, Debug)]
pub struct HypothesisSpec {
    pub name: &'static str,
    pub side: Side,
    pub quantity: Quantity,
    pub sense: Sense,
    pub given: Option<f64>,
}

fn quantity_text(q: Quantity, side: Side) -> String {
    let s = if side == Side::Domain { "M" } else { "N" };
    match q {
        Quantity::HolomorphicSectional => format!("H^{s}"),
        Quantity::Scalar => format!("S^{s}"),
        Quantity::Ricci => format!("Ric^{s}"),
        Quantity::RicciK(k) => format!("Ric^{s}_{k}"),
    }
}

fn statement(spec: &HypothesisSpec) -> String {
    let q = quantity_text(spec.quantity, spec.side);
    let c = spec.name;
    match spec.sense {
        Sense::AtLeastMinus => format!("{q} >= -{c}"),
        Sense::AtMostMinus => format!("{q} <= -{c}"),
        Sense::AtLeast => format!("{q} >= {c}"),
        Sense::AtMost => format!("{q} <= {c}"),
    }
}

fn range_at(chart: &KahlerChart, point: &[C64], q: Quantity, hs: &HypothesisSampling) -> Result<(f64, f64)> {
    let cp = curvature_tensor(chart, point)?;
    match q {
        Quantity::HolomorphicSectional => {
            let e = k_ricci_extremes(&cp, 1, &hs.search)?;
            Ok((e.min, e.max))
        }
        Quantity::Scalar => {
            let s = scalar(&cp);
            Ok((s, s))
        }
        Quantity::Ricci => ricci_extremes(&cp),
        Quantity::RicciK(k) => {
            let e = k_ricci_extremes(&cp, k, &hs.search)?;
            Ok((e.min, e.max))
        }
    }
}

/// Sampled range of a curvature quantity over the given chart points.
pub fn sampled_range(chart: &KahlerChart, points: &[Vec<C64>], q: Quantity, hs: &HypothesisSampling) -> Result<(f64, f64)> {
    let ranges: Vec<Result<(f64, f64)>> = points.par_iter().map(|p| range_at(chart, p, q, hs)).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in ranges {
        let (a, b) = r?;
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}

/// Resolves a hypothesis constant against sampled curvature at `domain_points` (and their
/// images for target quantities).
pub fn resolve_hypothesis(
    f: &HoloMap,
    domain_points: &[Vec<C64>],
    spec: &HypothesisSpec,
    hs: &HypothesisSampling,
) -> Result<Hypothesis> {
    let pts = &domain_points[..hs.points.min(domain_points.len())];
    let (chart, sample_pts): (&KahlerChart, Vec<Vec<C64>>) = match spec.side {
        Side::Domain => (f.domain(), pts.to_vec()),
        Side::Target => (f.target(), pts.iter().map(|p| f.image(p)).collect::<Result<_>>()?),
    };
    let (lo, hi) = sampled_range(chart, &sample_pts, spec.quantity, hs)?;
    let extreme = match spec.sense {
        Sense::AtLeastMinus | Sense::AtLeast => lo,
        Sense::AtMostMinus | Sense::AtMost => hi,
    };
    let (value, source, holds) = match spec.given {
        Some(c) => {
            let t = HYPOTHESIS_TOL * (1.0 + c.abs());
            let holds = match spec.sense {
                Sense::AtLeastMinus => extreme >= -c - t,
                Sense::AtMostMinus => extreme <= -c + t,
                Sense::AtLeast => extreme >= c - t,
                Sense::AtMost => extreme <= c + t,
            };
            (c, ConstantSource::Analytic, holds)
        }
        None => {
            let c = match spec.sense {
                Sense::AtLeastMinus => (-extreme).max(0.0),
                Sense::AtMostMinus => -extreme,
                Sense::AtLeast | Sense::AtMost => extreme,
            };
            (c, ConstantSource::Sampled, true)
        }
    };
    Ok(Hypothesis {
        name: spec.name.to_string(),
        statement: statement(spec),
        value,
        source,
        sampled_extreme: Some(extreme),
        holds_on_samples: holds,
    })
}

fn require_positive(h: &Hypothesis) -> Result<f64> {
    if !(h.value > 0.0) {
        return Err(Error::config(format!("{} must be positive, got {}", h.name, h.value)));
    }
    Ok(h.value)
}

fn point_data(f: &HoloMap, points: &[Vec<C64>]) -> Result<Vec<MapPointData>> {
    points.par_iter().map(|p| map_point_data(f, p)).collect()
}

fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if best.is_none_or(|b| *v > values[b]) {
            best = Some(i);
        }
    }
    best
}

#[derive(Clone, Copy, Debug)]
pub struct BoundSettings {
    pub tol: f64,
    pub hypotheses: HypothesisSampling,
}

impl Default for BoundSettings {
    fn default() -> Self {
        BoundSettings { tol: DEFAULT_BOUND_TOL, hypotheses: HypothesisSampling::default() }
    }
}

fn max_report(
    kind: &str,
    direction: BoundDirection,
    hyps: Vec<Hypothesis>,
    values: &[f64],
    points: &[Vec<C64>],
    bound: f64,
    tol: f64,
) -> BoundReport {
    let i = argmax(values);
    let observed = i.map(|i| values[i]).unwrap_or(f64::NAN);
    BoundReport::new(kind, direction, hyps, observed, i.map(|i| points[i].as_slice()), bound, tol, values.len())
}

/// `max ‖∂f‖²_m ≤ K/κ` under `H^M ≥ −K` and `H^N ≤ −κ`.
pub fn schwarz_bound_report(
    f: &HoloMap,
    points: &[Vec<C64>],
    k: Option<f64>,
    kappa: Option<f64>,
    s: &BoundSettings,
) -> Result<BoundReport> {
    let hk = resolve_hypothesis(
        f,
        points,
        &HypothesisSpec { name: "K", side: Side::Domain, quantity: Quantity::HolomorphicSectional, sense: Sense::AtLeastMinus, given: k },
        &s.hypotheses,
    )?;
    let hkappa = resolve_hypothesis(
        f,
        points,
        &HypothesisSpec {
            name: "kappa",
            side: Side::Target,
            quantity: Quantity::HolomorphicSectional,
            sense: Sense::AtMostMinus,
            given: kappa,
        },
        &s.hypotheses,
    )?;
    let kappa = require_positive(&hkappa)?;
    let bound = hk.value / kappa;
    let values: Vec<f64> = point_data(f, points)?.iter().map(|d| d.max_norm()).collect();
    let mut r = max_report("schwarz", BoundDirection::Upper, vec![hk, hkappa], &values, points, bound, s.tol);
    if bound == 0.0 {
        r.notes.push("K = 0 forces every holomorphic map to be constant".into());
    }
    Ok(r)
}

/// `max D ≤ (K/(mκ))^m` under `S^M ≥ −K` and `Ric^N_m ≤ −κ`.
pub fn volume_bound_report(
    f: &HoloMap,
    points: &[Vec<C64>],
    k: Option<f64>,
    kappa: Option<f64>,
    s: &BoundSettings,
) -> Result<BoundReport> {
    let m = f.m();
    if m > f.n() {
        return Err(Error::config("volume bound needs dim M <= dim N"));
    }
    let hk = resolve_hypothesis(
        f,
        points,
        &HypothesisSpec { name: "K", side: Side::Domain, quantity: Quantity::Scalar, sense: Sense::AtLeastMinus, given: k },
        &s.hypotheses,
    )?;
    let hkappa = resolve_hypothesis(
        f,
        points,
        &HypothesisSpec { name: "kappa", side: Side::Target, quantity: Quantity::RicciK(m), sense: Sense::AtMostMinus, given: kappa },
        &s.hypotheses,
    )?;
    let kappa = require_positive(&hkappa)?;
    let bound = (hk.value / (m as f64 * kappa)).powi(m as i32);
    let values: Vec<f64> = point_data(f, points)?.iter().map(|d| d.volume_ratio()).collect();
    let mut r = max_report("volume", BoundDirection::Upper, vec![hk, hkappa], &values, points, bound, s.tol);
    if bound == 0.0 {
        r.notes.push("K = 0: the hypotheses force D to vanish identically (degenerate maps only)".into());
    }
    Ok(r)
}

/// `max ‖∂f‖² ≤ (2d/(d+1))·K/κ` under `Ric^M ≥ −K` and `H^N ≤ −κ`, `d` the largest
/// sampled rank.
pub fn royden_bound_report(
    f: &HoloMap,
    points: &[Vec<C64>],
    k: Option<f64>,
    kappa: Option<f64>,
    s: &BoundSettings,
) -> Result<BoundReport> {
    let hk = resolve_hypothesis(
        f,
        points,
        &HypothesisSpec { name: "K", side: Side::Domain, quantity: Quantity::Ricci, sense: Sense::AtLeastMinus, given: k },
        &s.hypotheses,
    )?;
    let hkappa = resolve_hypothesis(
        f,
        points,
        &HypothesisSpec {
            name: "kappa",
            side: Side::Target,
            quantity: Quantity::HolomorphicSectional,
            sense: Sense::AtMostMinus,
            given: kappa,
        },
        &s.hypotheses,
    )?;
    let kappa = require_positive(&hkappa)?;
    let data = point_data(f, points)?;
    let d = data.iter().map(|x| x.rank).max().unwrap_or(0).max(1);
    let coefficient = 2.0 * d as f64 / (d as f64 + 1.0);
    let bound = coefficient * hk.value / kappa;
    let values: Vec<f64> = data.iter().map(|x| x.energy_density()).collect();
    let mut r = max_report("royden", BoundDirection::Upper, vec![hk, hkappa], &values, points, bound, s.tol);
    r.coefficient_text = Some(fraction_text(2 * d, d + 1));
    r.set("rank", d);
    r.set("coefficient", coefficient);
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoopMode {
    /// `max D^{1/m} ≥ K/κ` under `Ric^M ≥ K` and `Ric^N_m ≤ κ`.
    Volume,
    /// `max ‖∂f‖²_m ≥ K/κ` under `H^M ≥ K` and `H^N ≤ κ`.
    Stretching,
}

/// Lower bounds on the maximal stretch. Samples only see a lower estimate of the true
/// maximum, so a failure is advisory.
pub fn hoop_check(
    f: &HoloMap,
    points: &[Vec<C64>],
    mode: HoopMode,
    k: Option<f64>,
    kappa: Option<f64>,
    s: &BoundSettings,
) -> Result<BoundReport> {
    let m = f.m();
    let (qm, qn) = match mode {
        HoopMode::Volume => {
            if m > f.n() {
                return Err(Error::config("volume hoop needs dim M <= dim N"));
            }
            (Quantity::Ricci, Quantity::RicciK(m))
        }
        HoopMode::Stretching => (Quantity::HolomorphicSectional, Quantity::HolomorphicSectional),
    };
    let hk = resolve_hypothesis(
        f,
        points,
        &HypothesisSpec { name: "K", side: Side::Domain, quantity: qm, sense: Sense::AtLeast, given: k },
        &s.hypotheses,
    )?;
    let hkappa = resolve_hypothesis(
        f,
        points,
        &HypothesisSpec { name: "kappa", side: Side::Target, quantity: qn, sense: Sense::AtMost, given: kappa },
        &s.hypotheses,
    )?;
    let kv = require_positive(&hk)?;
    let kappa = require_positive(&hkappa)?;
    let data = point_data(f, points)?;
    let values: Vec<f64> = data
        .iter()
        .map(|d| match mode {
            HoopMode::Volume => d.volume_ratio().powf(1.0 / m as f64),
            HoopMode::Stretching => d.max_norm(),
        })
        .collect();
    let kind = match mode {
        HoopMode::Volume => "hoop_volume",
        HoopMode::Stretching => "hoop_stretching",
    };
    let mut r = max_report(kind, BoundDirection::Lower, vec![hk, hkappa], &values, points, kv / kappa, s.tol);
    if values.iter().all(|v| *v == 0.0) {
        r.status = CheckStatus::NotApplicable;
        r.passed = false;
        r.advisory = true;
        r.notes.push("the map looks constant or degenerate on the samples; the lemma does not apply".into());
    } else if !r.passed {
        r.advisory = true;
        r.notes.push("the sampled maximum underestimates the true maximum, so this failure is advisory".into());
    }
    Ok(r)
}

fn require_flat(f: &HoloMap, points: &[Vec<C64>]) -> Result<()> {
    let m = f.m();
    for p in points {
        let g = f.domain().metric_at(p)?;
        let dev = (g - CMatrix::identity(m, m)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > FLAT_TOL {
            return Err(Error::config(format!("radius-dependent checks need a flat domain; |g − I| = {dev:e}")));
        }
    }
    Ok(())
}

/// `M(r)`, the sampled maximum of `‖∂f‖` on the sphere `|z| = r`, with its argmax.
pub fn sphere_max_norm(f: &HoloMap, radius: f64, count: usize, seed: u64) -> Result<(f64, Vec<C64>)> {
    let pts = Sampler::sphere(count, radius, seed).points(f.m())?;
    require_flat(f, &pts[..pts.len().min(4)])?;
    let vals: Vec<f64> = point_data(f, &pts)?.iter().map(|d| d.energy_density().sqrt()).collect();
    let i = argmax(&vals).ok_or_else(|| Error::config("sphere sampler needs at least one point"))?;
    Ok((vals[i], pts[i].clone()))
}

/// `log M(r₂) ≤ ((log r₃ − log r₂) log M(r₁) + (log r₂ − log r₁) log M(r₃)) / (log r₃ − log r₁)`
/// with `M(r)` from `count` seeded samples per sphere. Slack is right side minus left
/// side and the check passes when `slack ≥ −tol`.
pub fn three_circle_check(
    f: &HoloMap,
    radii: [f64; 3],
    count: usize,
    seed: u64,
    tol: f64,
    hs: &HypothesisSampling,
) -> Result<CheckReport> {
    let [r1, r2, r3] = radii;
    if !(0.0 < r1 && r1 < r2 && r2 < r3) {
        return Err(Error::config(format!("radii must satisfy 0 < r1 < r2 < r3, got {radii:?}")));
    }
    let mut report = CheckReport::new("three_circle", tol);
    let hyp_pts = Sampler::ball(hs.points, r3, seed).points(f.m())?;
    require_flat(f, &hyp_pts)?;
    let target = resolve_hypothesis(
        f,
        &hyp_pts,
        &HypothesisSpec {
            name: "0",
            side: Side::Target,
            quantity: Quantity::HolomorphicSectional,
            sense: Sense::AtMost,
            given: Some(0.0),
        },
        hs,
    )?;
    let (_, tgt_bis_max) = sampled_range_bisectional(f, &hyp_pts, hs)?;
    report.set("target_bisectional_max", tgt_bis_max);
    report.set("target_holomorphic_sectional_max", target.sampled_extreme.unwrap_or(f64::NAN));
    if tgt_bis_max > HYPOTHESIS_TOL {
        return Ok(report.not_applicable("target bisectional curvature <= 0 failed on the samples"));
    }

    let mut logs = [0.0; 3];
    let mut argmaxes = Vec::with_capacity(3);
    for (slot, r) in radii.iter().enumerate() {
        let (mr, at) = sphere_max_norm(f, *r, count, seed)?;
        if !(mr > 0.0) {
            report.notes.push(format!("M({r}) = 0: the map is constant on the sphere"));
            report.finish();
            return Ok(report);
        }
        logs[slot] = mr.ln();
        argmaxes.push(at);
    }
    let (l1, l2, l3) = (r1.ln(), r2.ln(), r3.ln());
    let interpolation = ((l3 - l2) * logs[0] + (l2 - l1) * logs[2]) / (l3 - l1);
    let slack = interpolation - logs[1];
    report.record_residual(&argmaxes[1], (-slack).max(0.0));
    report.finish();
    report.set("slack", slack);
    report.set("log_m", logs.to_vec());
    report.set("radii", radii.to_vec());
    report.set("samples_per_sphere", count);
    report.notes.push("M(r) is a sampled maximum over the sphere |z| = r".into());
    Ok(report)
}

fn sampled_range_bisectional(f: &HoloMap, points: &[Vec<C64>], hs: &HypothesisSampling) -> Result<(f64, f64)> {
    let ranges: Vec<Result<(f64, f64)>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let cp = curvature_tensor(f.target(), &f.image(p)?)?;
            crate::functionals::bisectional_range(&cp, hs.probes, hs.search.seed.wrapping_add(i as u64))
        })
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in ranges {
        let (a, b) = r?;
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}

/// Smallest singular value `min |λ_γ|²` and `σ_{m−1}` along rays `r·u`; reporting only.
pub fn degeneracy_profile(f: &HoloMap, directions: &[Vec<C64>], radii: &[f64]) -> Result<DegeneracyProfile> {
    let m = f.m();
    if radii.is_empty() {
        return Err(Error::config("degeneracy profile needs at least one radius"));
    }
    if directions.is_empty() {
        return Err(Error::config("degeneracy profile needs at least one direction"));
    }
    let mut pts = Vec::new();
    let mut index = Vec::new();
    for (di, u) in directions.iter().enumerate() {
        if u.len() != m {
            return Err(Error::config(format!("direction {di} has {} components, expected {m}", u.len())));
        }
        let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Degenerate(format!("direction {di} is zero")));
        }
        for &r in radii {
            pts.push(u.iter().map(|z| z * (r / norm)).collect::<Vec<C64>>());
            index.push((di, r));
        }
    }
    require_flat(f, &pts)?;
    let data = point_data(f, &pts)?;
    let mut rows = Vec::with_capacity(pts.len());
    for ((p, d), (di, r)) in pts.iter().zip(&data).zip(index) {
        rows.push(ProfileRow {
            direction: di,
            radius: r,
            point: point_json(p),
            min_singular_value: d.singular_values[m - 1],
            sigma_m_minus_1: sigma_k(&d.singular_values, m - 1)?,
            volume_ratio: d.volume_ratio(),
        });
    }
    Ok(DegeneracyProfile {
        record: "profile",
        kind: "degeneracy_profile".into(),
        label: "degeneracy_profile".into(),
        status: CheckStatus::Pass,
        passed: true,
        advisory: true,
        rows,
        notes: vec!["pointwise data only; no asymptotic claim is made".into()],
    })
}

//! Numerical checks of the Bochner-type identities, the sandwich inequality, the
//! averaging identity and plurisubharmonicity.
//!
//! Left-hand sides are complex Hessians of assembled global scalars, differentiated as
//! jets. Right-hand sides are tensor contractions of curvature and the covariant map
//! Hessian at the point. The two paths share only metric evaluation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::functionals::{bisectional_range, k_ricci_extremes, ricci, ricci_extremes, SearchConfig};
use crate::geometry::{curvature_tensor, CurvaturePoint};
use crate::linalg::{column, form, hermitian_eigenvalues, hermitian_part, hermitian_residual, mat_vec, norm_sq, orthonormal_frame, pencil_eigenvalues, random_unit_vector, CMatrix};
use crate::maps::{map_hessian, map_jets, map_point_data, AnchoredBarrier, HoloMap};
use crate::report::{point_json, BoundDirection, BoundReport, CheckReport, ConstantSource, Hypothesis};
use crate::{Error, Result, C64};

pub const DEFAULT_IDENTITY_TOL: f64 = 1e-6;
/// Relative gap below which the top singular value counts as repeated.
pub const SIMPLE_GAP: f64 = 1e-8;
pub const SANDWICH_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance used when testing curvature-sign hypotheses on samples.
pub const HYPOTHESIS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    Boch1,
    Boch2,
    LogW,
}

impl IdentityKind {
    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::Boch1 => "boch1",
            IdentityKind::Boch2 => "boch2",
            IdentityKind::LogW => "log_w",
        }
    }
}

/// Both sides of an identity at one point, with the right-hand side split into terms.
#[derive(Clone, Debug)]
pub struct IdentityValue {
    pub lhs: f64,
    pub rhs: f64,
    pub terms: Vec<(&'static str, f64)>,
}

impl IdentityValue {
    fn new(lhs: f64, terms: Vec<(&'static str, f64)>) -> Self {
        let rhs = terms.iter().map(|(_, t)| t).sum();
        IdentityValue { lhs, rhs, terms }
    }
}

fn check_direction(m: usize, v: &[C64]) -> Result<()> {
    if v.len() != m {
        return Err(Error::config(format!("direction has {} components, expected {m}", v.len())));
    }
    if v.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::Degenerate("direction is the zero vector".into()));
    }
    Ok(())
}

fn columns(mat: &CMatrix) -> Vec<Vec<C64>> {
    (0..mat.ncols()).map(|j| column(mat, j)).collect()
}

/// `∂_v∂̄_v ‖∂f‖²` against `|D_v∂f|² − Σ R^N(∂f e_α, ∂f e_α, ∂f v, ∂f v) + Σ ⟨∂f(R^M_{vv̄} e), ∂f e⟩`.
pub fn boch1_terms(f: &HoloMap, point: &[C64], v: &[C64], order: usize) -> Result<IdentityValue> {
    check_direction(f.m(), v)?;
    let lhs = map_jets(f, point, order.max(2))?.energy()?.levi_form(v)?.re;

    let data = map_point_data(f, point)?;
    let hess = map_hessian(f, point)?;
    let cm = curvature_tensor(f.domain(), point)?;
    let cn = curvature_tensor(f.target(), &data.image)?;
    let h = &data.h;
    let e = columns(&orthonormal_frame(&data.g)?);
    let fe: Vec<Vec<C64>> = e.iter().map(|x| mat_vec(&data.pushforward, x)).collect();
    let fv = mat_vec(&data.pushforward, v);

    let hessian_term: f64 = e.iter().map(|x| norm_sq(h, &hess.apply(x, v))).sum();
    let target_term: f64 = -fe.iter().map(|y| cn.riem_form(y, y, &fv, &fv).re).sum::<f64>();
    let mut domain_term = C64::new(0.0, 0.0);
    for (a, fa) in fe.iter().enumerate() {
        for (b, fb) in fe.iter().enumerate() {
            domain_term += cm.riem_form(&e[b], &e[a], v, v) * form(h, fa, fb);
        }
    }
    Ok(IdentityValue::new(
        lhs,
        vec![("hessian", hessian_term), ("target_curvature", target_term), ("domain_curvature", domain_term.re)],
    ))
}

/// `∂_v∂̄_v log D` against
/// `Σ_α Σ_{i>m} |f^i_{αv}|²/|λ_α|² − Σ_α R^N(ε_α, ε̄_α, ∂f v, ∂f v) + Ric^M(v, v̄)` in adapted frames.
pub fn boch2_terms(f: &HoloMap, point: &[C64], v: &[C64], order: usize) -> Result<IdentityValue> {
    let (m, n) = (f.m(), f.n());
    if m > n {
        return Err(Error::config("log D identity needs dim M <= dim N"));
    }
    check_direction(m, v)?;
    let data = map_point_data(f, point)?;
    if data.rank < m {
        return Err(Error::Rank(format!("rank {} < {m} at the point", data.rank)));
    }
    let lhs = map_jets(f, point, order.max(2))?.log_volume_ratio()?.levi_form(v)?.re;

    let hess = map_hessian(f, point)?;
    let cm = curvature_tensor(f.domain(), point)?;
    let cn = curvature_tensor(f.target(), &data.image)?;
    let h = &data.h;
    let e = columns(&data.domain_frame);
    let eps = columns(&data.target_frame);
    let fv = mat_vec(&data.pushforward, v);

    let mut normal_term = 0.0;
    for (a, ea) in e.iter().enumerate() {
        let d = hess.apply(ea, v);
        let lam2 = data.lambdas[a] * data.lambdas[a];
        for ei in &eps[m..] {
            normal_term += form(h, &d, ei).norm_sqr() / lam2;
        }
    }
    let target_term: f64 = -eps[..m].iter().map(|y| cn.riem_form(y, y, &fv, &fv).re).sum::<f64>();
    let ricci_term = form(&ricci(&cm), v, v).re;
    Ok(IdentityValue::new(
        lhs,
        vec![("second_fundamental", normal_term), ("target_curvature", target_term), ("domain_ricci", ricci_term)],
    ))
}

/// `∂_v∂̄_v log W` in the domain normal chart anchored at the top singular direction,
/// against `R^M(e_1,ē_1,v,v̄) − R^N(ε_1,ε̄_1,∂f v,∂f v) + Σ_{i≠1} |f^i_{1v}|²/W`.
pub fn log_w_terms(f: &HoloMap, point: &[C64], v: &[C64], order: usize) -> Result<IdentityValue> {
    let m = f.m();
    check_direction(m, v)?;
    let data = map_point_data(f, point)?;
    if data.rank == 0 {
        return Err(Error::Rank("∂f vanishes at the point".into()));
    }
    let s = &data.singular_values;
    if m > 1 && s[0] - s[1] < SIMPLE_GAP * s[0] {
        return Err(Error::Multiplicity(format!("top values {:e} and {:e}", s[0], s[1])));
    }
    let anchored = AnchoredBarrier::new(f, point)?;
    let vw = anchored.coords.pull_tangent(v);
    let zero = vec![C64::new(0.0, 0.0); m];
    let lhs = map_jets(&anchored.map, &zero, order.max(2))?.barrier()?.ln()?.levi_form(&vw)?.re;

    let hess = map_hessian(f, point)?;
    let cm = curvature_tensor(f.domain(), point)?;
    let cn = curvature_tensor(f.target(), &data.image)?;
    let h = &data.h;
    let e1 = column(&data.domain_frame, 0);
    let eps1 = column(&data.target_frame, 0);
    let fv = mat_vec(&data.pushforward, v);
    let w = s[0];
    let d = hess.apply(&e1, v);
    let transverse = (norm_sq(h, &d) - form(h, &d, &eps1).norm_sqr()) / w;
    Ok(IdentityValue::new(
        lhs,
        vec![
            ("domain_curvature", cm.riem_form(&e1, &e1, v, v).re),
            ("target_curvature", -cn.riem_form(&eps1, &eps1, &fv, &fv).re),
            ("transverse_hessian", transverse),
        ],
    ))
}

pub fn identity_terms(kind: IdentityKind, f: &HoloMap, point: &[C64], v: &[C64], order: usize) -> Result<IdentityValue> {
    match kind {
        IdentityKind::Boch1 => boch1_terms(f, point, v, order),
        IdentityKind::Boch2 => boch2_terms(f, point, v, order),
        IdentityKind::LogW => log_w_terms(f, point, v, order),
    }
}

fn skippable(e: &Error) -> bool {
    matches!(e, Error::Rank(_) | Error::Multiplicity(_) | Error::SingularJet(_))
}

/// Evaluates an identity at every point (in parallel, aggregated in input order).
/// Rank-deficient and repeated-top-value points are counted as skipped.
pub fn check_identity(
    kind: IdentityKind,
    f: &HoloMap,
    points: &[Vec<C64>],
    directions: &[Vec<C64>],
    tol: f64,
    order: usize,
) -> Result<CheckReport> {
    if points.len() != directions.len() {
        return Err(Error::config("need one direction per point"));
    }
    let results: Vec<Result<IdentityValue>> = points
        .par_iter()
        .zip(directions.par_iter())
        .map(|(p, v)| identity_terms(kind, f, p, v, order))
        .collect();
    let mut samples = Vec::with_capacity(points.len());
    let mut skipped = 0;
    let mut first_skip = None;
    for (p, r) in points.iter().zip(results) {
        match r {
            Ok(val) => samples.push((p.clone(), val.lhs, val.rhs)),
            Err(e) if skippable(&e) => {
                skipped += 1;
                first_skip.get_or_insert_with(|| e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let mut report = CheckReport::from_samples(kind.name(), tol, &samples, skipped);
    if let Some(msg) = first_skip {
        report.notes.push(format!("{skipped} point(s) skipped, first: {msg}"));
    }
    Ok(report)
}

pub fn verify_boch1(f: &HoloMap, point: &[C64], v: &[C64], tol: f64) -> Result<CheckReport> {
    check_identity(IdentityKind::Boch1, f, &[point.to_vec()], &[v.to_vec()], tol, 4)
}

pub fn verify_boch2(f: &HoloMap, point: &[C64], v: &[C64], tol: f64) -> Result<CheckReport> {
    check_identity(IdentityKind::Boch2, f, &[point.to_vec()], &[v.to_vec()], tol, 4)
}

pub fn verify_log_w(f: &HoloMap, point: &[C64], v: &[C64], tol: f64) -> Result<CheckReport> {
    check_identity(IdentityKind::LogW, f, &[point.to_vec()], &[v.to_vec()], tol, 4)
}

/// Result of the sandwich inequality for one index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sandwich {
    pub middle: f64,
    pub sup: f64,
    pub inf: f64,
}

impl Sandwich {
    /// `min(sup − middle, middle − inf)`.
    pub fn slack(&self) -> f64 {
        (self.sup - self.middle).min(self.middle - self.inf)
    }
}

/// `G^{sβ̄} A_{αβ̄} G^{αs̄} / G^{ss̄}` with the extreme Rayleigh quotients of `(A, G)`.
pub fn sandwich_check(a: &CMatrix, g: &CMatrix, s: usize) -> Result<Sandwich> {
    let m = g.nrows();
    if a.nrows() != m || a.ncols() != m || g.ncols() != m {
        return Err(Error::config("A and G must be square of the same size"));
    }
    if s >= m {
        return Err(Error::config(format!("index {s} out of range for size {m}")));
    }
    let scale = 1.0 + a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if hermitian_residual(a) > PSD_TOL * scale {
        return Err(Error::MetricValidity("A is not Hermitian".into()));
    }
    let vals = hermitian_eigenvalues(&hermitian_part(a));
    if vals[0] < -PSD_TOL * scale {
        return Err(Error::MetricValidity(format!("A has negative eigenvalue {:e}", vals[0])));
    }
    crate::geometry::validate_metric(g)?;
    let ginv = crate::linalg::inverse(&g.transpose())?;
    let mut num = C64::new(0.0, 0.0);
    for al in 0..m {
        for be in 0..m {
            num += ginv[(s, be)] * a[(al, be)] * ginv[(al, s)];
        }
    }
    let middle = (num / ginv[(s, s)]).re;
    let pencil = pencil_eigenvalues(a, g)?;
    Ok(Sandwich { middle, sup: pencil[0], inf: pencil[m - 1] })
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let cols_v: Vec<Vec<C64>> = (0..cols).map(|_| random_unit_vector(rows, rng)).collect();
    CMatrix::from_fn(rows, cols, |i, j| cols_v[j][i] * ((rows + j) as f64).sqrt())
}

/// Seeded random instances `A = B B^H ⪰ 0` (sometimes singular) and `G = C C^H + I/10`
/// in sizes 1 to 4, all indices `s`. Residual per instance is `max(0, −slack)`.
pub fn sandwich_random_check(count: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("sandwich", tol);
    let mut min_slack = f64::INFINITY;
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let m = 1 + i % 4;
        let rank = 1 + (i / 4) % m;
        let b = gaussian_matrix(m, rank, &mut rng);
        let c = gaussian_matrix(m, m, &mut rng);
        let a = &b * b.adjoint();
        let g = &c * c.adjoint() + CMatrix::identity(m, m) * C64::new(0.1, 0.0);
        for s in 0..m {
            let sw = sandwich_check(&a, &g, s)?;
            let slack = sw.slack();
            min_slack = min_slack.min(slack);
            report.record_residual(&[C64::new(i as f64, 0.0), C64::new(s as f64, 0.0)], (-slack).max(0.0));
        }
    }
    report.finish();
    report.set("instances", count);
    report.set("min_slack", min_slack);
    report.notes.push("worst_point holds (instance, index)".into());
    Ok(report)
}

/// Outcome of the averaging identity and, when `κ` is known, inequality (a1).
#[derive(Clone, Debug)]
pub struct Averaging {
    pub algebraic: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub identity: CheckReport,
    pub inequality: Option<BoundReport>,
}

const AVERAGING_CHUNK: usize = 1024;

/// Averages `R(Y,Ȳ,Y,Ȳ)` for `Y = Σ λ_i w_i ε_i` over `w` uniform on `S^{2d−1}` (nonzero
/// weights only, `ε` a `g`-orthonormal frame) and compares with
/// `2/(d(d+1)) Σ R(ε_i,ε̄_i,ε_j,ε̄_j)|λ_i|²|λ_j|²`; agreement means within
/// `3·stderr + 1e-12`. With `kappa`, checks `Σ R |λ_i|²|λ_j|² ≤ −((d+1)/(2d)) κ (Σ|λ_i|²)²`.
pub fn averaging_identity_check(
    cp: &CurvaturePoint,
    weights: &[C64],
    kappa: Option<Hypothesis>,
    count: usize,
    seed: u64,
    tol: f64,
) -> Result<Averaging> {
    let m = cp.dim();
    if weights.len() != m {
        return Err(Error::config(format!("need {m} weights, got {}", weights.len())));
    }
    if count < 2 {
        return Err(Error::config("averaging needs at least 2 samples"));
    }
    let frame = columns(&orthonormal_frame(&cp.g)?);
    let active: Vec<usize> = (0..m).filter(|&i| weights[i].norm() > 0.0).collect();
    let d = active.len();
    if d == 0 {
        return Err(Error::Degenerate("all weights are zero".into()));
    }
    let w2: Vec<f64> = weights.iter().map(|z| z.norm_sqr()).collect();
    let mut quartic = 0.0;
    for &i in &active {
        for &j in &active {
            quartic += cp.riem_form(&frame[i], &frame[i], &frame[j], &frame[j]).re * w2[i] * w2[j];
        }
    }
    let df = d as f64;
    let algebraic = 2.0 / (df * (df + 1.0)) * quartic;

    let chunks = count.div_ceil(AVERAGING_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let len = AVERAGING_CHUNK.min(count - ci * AVERAGING_CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let w = random_unit_vector(d, &mut rng);
                let mut y = vec![C64::new(0.0, 0.0); m];
                for (k, &i) in active.iter().enumerate() {
                    for (yc, ec) in y.iter_mut().zip(&frame[i]) {
                        *yc += weights[i] * w[k] * ec;
                    }
                }
                let r = cp.riem_form(&y, &y, &y, &y).re;
                s += r;
                s2 += r * r;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = count as f64;
    let estimate = s / n;
    let var = ((s2 / n - estimate * estimate) * n / (n - 1.0)).max(0.0);
    let stderr = (var / n).sqrt();

    let agreement = 3.0 * stderr + 1e-12;
    let mut identity = CheckReport::new("averaging_identity", agreement);
    identity.record_residual(&cp.point, (estimate - algebraic).abs());
    identity.finish();
    identity.set("algebraic", algebraic);
    identity.set("quadrature", estimate);
    identity.set("stderr", stderr);
    identity.set("samples", count);
    identity.set("d", d);

    let inequality = kappa.map(|hyp| {
        let energy: f64 = w2.iter().sum();
        let coefficient = (df + 1.0) / (2.0 * df);
        let bound = -coefficient * hyp.value * energy * energy;
        let mut b = BoundReport::new(
            "averaging_inequality",
            BoundDirection::Upper,
            vec![hyp],
            quartic,
            Some(&cp.point),
            bound,
            tol,
            1,
        );
        b.set("coefficient", coefficient);
        b.coefficient_text = Some(fraction_text(d + 1, 2 * d));
        b
    });
    Ok(Averaging { algebraic, estimate, stderr, identity, inequality })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `p/q` in lowest terms, or an integer when the denominator reduces to 1.
pub fn fraction_text(p: usize, q: usize) -> String {
    let g = gcd(p, q).max(1);
    let (p, q) = (p / g, q / g);
    if q == 1 {
        p.to_string()
    } else {
        format!("{p}/{q}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PshQuantity {
    /// `log(1 + ‖∂f‖²)`, expected plurisubharmonic when `M` has nonnegative and `N`
    /// nonpositive bisectional curvature.
    Log1pEnergy,
    /// `log D`, expected plurisubharmonic when `Ric^M ≥ 0` and `Ric^N_m ≤ 0`.
    LogD,
}

impl PshQuantity {
    pub fn name(self) -> &'static str {
        match self {
            PshQuantity::Log1pEnergy => "log1p_energy",
            PshQuantity::LogD => "log_d",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HypothesisSampling {
    /// Number of leading sample points at which the curvature hypotheses are tested.
    pub points: usize,
    pub probes: usize,
    pub search: SearchConfig,
}

impl Default for HypothesisSampling {
    fn default() -> Self {
        HypothesisSampling { points: 8, probes: 16, search: SearchConfig { restarts: 8, iterations: 60, seed: 0 } }
    }
}

fn sampled_hypothesis(name: &str, statement: &str, extreme: f64, holds: bool) -> Hypothesis {
    Hypothesis {
        name: name.into(),
        statement: statement.into(),
        value: 0.0,
        source: ConstantSource::Sampled,
        sampled_extreme: Some(extreme),
        holds_on_samples: holds,
    }
}

fn psh_hypotheses(q: PshQuantity, f: &HoloMap, points: &[Vec<C64>], hs: &HypothesisSampling) -> Result<Vec<Hypothesis>> {
    let pts = &points[..hs.points.min(points.len())];
    let per_point: Vec<Result<(f64, f64)>> = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let cm = curvature_tensor(f.domain(), p)?;
            let cn = curvature_tensor(f.target(), &f.image(p)?)?;
            match q {
                PshQuantity::Log1pEnergy => {
                    let (dom_min, _) = bisectional_range(&cm, hs.probes, hs.search.seed.wrapping_add(i as u64))?;
                    let (_, tgt_max) = bisectional_range(&cn, hs.probes, hs.search.seed.wrapping_add(i as u64))?;
                    Ok((dom_min, tgt_max))
                }
                PshQuantity::LogD => {
                    let (ric_min, _) = ricci_extremes(&cm)?;
                    let tgt = k_ricci_extremes(&cn, f.m(), &hs.search)?;
                    Ok((ric_min, tgt.max))
                }
            }
        })
        .collect();
    let (mut dom, mut tgt) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in per_point {
        let (a, b) = r?;
        dom = dom.min(a);
        tgt = tgt.max(b);
    }
    let (dn, ds, tn, ts) = match q {
        PshQuantity::Log1pEnergy => (
            "domain_bisectional_min",
            "bisectional curvature of M >= 0",
            "target_bisectional_max",
            "bisectional curvature of N <= 0",
        ),
        PshQuantity::LogD => ("domain_ricci_min", "Ric^M >= 0", "target_ricci_m_max", "Ric^N_m <= 0"),
    };
    Ok(vec![
        sampled_hypothesis(dn, ds, dom, dom >= -HYPOTHESIS_TOL),
        sampled_hypothesis(tn, ts, tgt, tgt <= HYPOTHESIS_TOL),
    ])
}

/// Smallest eigenvalue of the complex Hessian of the chosen scalar at each point.
pub fn psh_min_eigenvalue(q: PshQuantity, f: &HoloMap, point: &[C64], order: usize) -> Result<f64> {
    let jets = map_jets(f, point, order.max(2))?;
    let scalar = match q {
        PshQuantity::Log1pEnergy => jets.energy()?.add_scalar(C64::new(1.0, 0.0)).ln()?,
        PshQuantity::LogD => {
            if f.m() > f.n() {
                return Err(Error::config("log D needs dim M <= dim N"));
            }
            let data = map_point_data(f, point)?;
            if data.rank < f.m() {
                return Err(Error::Rank(format!("rank {} < {}", data.rank, f.m())));
            }
            jets.log_volume_ratio()?
        }
    };
    let hess = hermitian_part(&scalar.complex_hessian()?);
    Ok(hermitian_eigenvalues(&hess)[0])
}

/// Checks that the complex Hessian is positive semidefinite (smallest eigenvalue
/// `≥ −tol`) at every point. If a curvature hypothesis fails on the samples, the report
/// is "not applicable" rather than failed.
pub fn psh_check(
    q: PshQuantity,
    f: &HoloMap,
    points: &[Vec<C64>],
    tol: f64,
    order: usize,
    hs: &HypothesisSampling,
) -> Result<CheckReport> {
    let mut report = CheckReport::new(&format!("psh_{}", q.name()), tol);
    let hyps = psh_hypotheses(q, f, points, hs)?;
    for h in &hyps {
        report.set(&h.name, h.sampled_extreme.unwrap_or(f64::NAN));
    }
    report.set("hypothesis_points", hs.points.min(points.len()));
    if let Some(h) = hyps.iter().find(|h| !h.holds_on_samples) {
        return Ok(report.not_applicable(format!("hypothesis '{}' failed on the samples", h.statement)));
    }
    let results: Vec<Result<f64>> = points.par_iter().map(|p| psh_min_eigenvalue(q, f, p, order)).collect();
    let mut min_eig = f64::INFINITY;
    let mut min_point = None;
    for (p, r) in points.iter().zip(results) {
        match r {
            Ok(lam) => {
                if lam < min_eig {
                    min_eig = lam;
                    min_point = Some(point_json(p));
                }
                report.record_residual(p, (-lam).max(0.0));
            }
            Err(e) if skippable(&e) => report.points_skipped += 1,
            Err(e) => return Err(e),
        }
    }
    report.finish();
    if min_point.is_some() {
        report.set("min_eigenvalue", min_eig);
        report.set("min_eigenvalue_point", serde_json::to_value(min_point).expect("points serialize"));
    }
    report.notes.push("curvature hypotheses were checked by sampling only".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{complex_hyperbolic_ball, flat, fubini_study, poincare_disk};
    use crate::sampling::Sampler;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn parse(dom: crate::geometry::KahlerChart, tgt: crate::geometry::KahlerChart, comps: &[&str]) -> HoloMap {
        HoloMap::parse(Arc::new(dom), Arc::new(tgt), comps).unwrap()
    }

    #[test]
    fn disk_identity_curvature_terms_cancel() {
        let f = parse(poincare_disk(1.0).unwrap(), poincare_disk(2.0).unwrap(), &["z1"]);
        let p = [c(0.3, -0.2)];
        let v = [c(1.0, 0.0)];
        let b1 = boch1_terms(&f, &p, &v, 4).unwrap();
        assert!(b1.lhs.abs() < 1e-9 && b1.rhs.abs() < 1e-9, "{b1:?}");
        assert!(b1.terms[0].1.abs() < 1e-12);
        let w = log_w_terms(&f, &p, &v, 4).unwrap();
        assert!(w.lhs.abs() < 1e-9 && w.rhs.abs() < 1e-9, "{w:?}");
    }

    #[test]
    fn boch1_flat_to_ball() {
        let f = parse(flat(1).unwrap(), complex_hyperbolic_ball(2, 1.0).unwrap(), &["z1/2", "z1^2/2"]);
        let pts = Sampler::ball(12, 0.9, 7).points(1).unwrap();
        let dirs = vec![vec![c(1.0, 0.0)]; pts.len()];
        let r = check_identity(IdentityKind::Boch1, &f, &pts, &dirs, 1e-6, 4).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn boch2_and_log_w_curved() {
        let f = parse(poincare_disk(1.0).unwrap(), complex_hyperbolic_ball(2, 1.0).unwrap(), &["z1/2", "z1^2/2"]);
        let pts = Sampler::ball(8, 0.8, 1).points(1).unwrap();
        let dirs = vec![vec![c(1.0, 0.0)]; pts.len()];
        for kind in [IdentityKind::Boch2, IdentityKind::LogW, IdentityKind::Boch1] {
            let r = check_identity(kind, &f, &pts, &dirs, 1e-6, 4).unwrap();
            assert!(r.passed, "{kind:?} {r:?}");
        }
        let g = parse(flat(1).unwrap(), fubini_study(1, 1.0).unwrap(), &["z1"]);
        let val = boch2_terms(&g, &[c(0.2, 0.4)], &[c(1.0, 0.0)], 4).unwrap();
        assert!((val.lhs - val.rhs).abs() < 1e-9, "{val:?}");
    }

    #[test]
    fn two_dimensional_domain() {
        let f = parse(
            complex_hyperbolic_ball(2, 1.0).unwrap(),
            complex_hyperbolic_ball(3, 2.0).unwrap(),
            &["z1/2 + z2^2/4", "z2/2", "z1*z2/3"],
        );
        let pts = Sampler::ball(6, 0.6, 4).points(2).unwrap();
        let dirs = Sampler::ball(6, 0.6, 4).directions(2);
        for kind in [IdentityKind::Boch1, IdentityKind::Boch2, IdentityKind::LogW] {
            let r = check_identity(kind, &f, &pts, &dirs, 1e-6, 4).unwrap();
            assert!(r.passed, "{kind:?} {r:?}");
        }
    }

    #[test]
    fn sandwich_examples() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(4.0, 0.0)]));
        let g = CMatrix::identity(2, 2);
        assert_eq!(sandwich_check(&a, &g, 0).unwrap(), Sandwich { middle: 1.0, sup: 4.0, inf: 1.0 });
        let s1 = sandwich_check(&a, &g, 1).unwrap();
        assert!((s1.middle - 4.0).abs() < 1e-12 && (s1.sup - 4.0).abs() < 1e-12);
        let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0, 0.0), c(4.0, 0.0)]));
        assert!(matches!(sandwich_check(&neg, &g, 0), Err(Error::MetricValidity(_))));
        let r = sandwich_random_check(100, 0, SANDWICH_TOL).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn averaging_on_ball() {
        let cp = curvature_tensor(&complex_hyperbolic_ball(2, 1.0).unwrap(), &[c(0.0, 0.0); 2]).unwrap();
        let kappa = Hypothesis {
            name: "kappa".into(),
            statement: "H^N <= -kappa".into(),
            value: 2.0,
            source: ConstantSource::Analytic,
            sampled_extreme: None,
            holds_on_samples: true,
        };
        let out = averaging_identity_check(&cp, &[c(1.0, 0.0), c(1.0, 0.0)], Some(kappa), 20000, 3, 1e-8).unwrap();
        assert!((out.algebraic + 2.0).abs() < 1e-12);
        assert!(out.identity.passed, "{:?}", out.identity);
        let ineq = out.inequality.unwrap();
        assert!(ineq.passed && ineq.equality_case);
        assert!((ineq.observed + 6.0).abs() < 1e-12);
        assert!(averaging_identity_check(&cp, &[c(0.0, 0.0); 2], None, 100, 0, 1e-8).is_err());
        assert_eq!(fraction_text(3, 4), "3/4");
        assert_eq!(fraction_text(2, 2), "1");
    }

    #[test]
    fn psh_flat_to_ball() {
        let f = parse(flat(1).unwrap(), complex_hyperbolic_ball(2, 1.0).unwrap(), &["z1/2", "z1^2/2"]);
        let pts = Sampler::ball(20, 0.9, 2).points(1).unwrap();
        let r = psh_check(PshQuantity::Log1pEnergy, &f, &pts, 1e-8, 4, &HypothesisSampling::default()).unwrap();
        assert!(r.passed, "{r:?}");
        let g = parse(flat(2).unwrap(), complex_hyperbolic_ball(2, 1.0).unwrap(), &["z1/2", "z2/2"]);
        let pts2 = Sampler::ball(20, 0.9, 2).points(2).unwrap();
        let r2 = psh_check(PshQuantity::LogD, &g, &pts2, 1e-8, 4, &HypothesisSampling::default()).unwrap();
        assert!(r2.passed, "{r2:?}");
        let fs = parse(complex_hyperbolic_ball(1, 1.0).unwrap(), fubini_study(1, 1.0).unwrap(), &["z1/3"]);
        let r3 = psh_check(PshQuantity::Log1pEnergy, &fs, &pts, 1e-8, 4, &HypothesisSampling::default()).unwrap();
        assert_eq!(r3.status, crate::report::CheckStatus::NotApplicable);
    }
}

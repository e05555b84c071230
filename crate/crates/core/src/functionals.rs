//! Curvature functionals at a point: holomorphic sectional, bisectional, Ricci,
//! scalar, k-scalar curvature and the k-Ricci extremes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::CurvaturePoint;
use crate::linalg::{column, form, hermitian_eigen, mat_vec, norm_sq, orthonormal_frame, pencil_eigenvalues, random_unit_vector, CMatrix};
use crate::{Error, Result, C64};

/// Imaginary parts above this (relative) are reported instead of truncated.
pub const REALITY_TOL: f64 = 1e-10;
pub const FRAME_TOL: f64 = 1e-10;

fn real_part(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > REALITY_TOL * (1.0 + z.re.abs()) {
        return Err(Error::Numerical(format!("{what} has imaginary part {:e}", z.im)));
    }
    Ok(z.re)
}

fn nonzero(cp: &CurvaturePoint, v: &[C64], what: &str) -> Result<f64> {
    if v.len() != cp.dim() {
        return Err(Error::config(format!("{what} has {} components, expected {}", v.len(), cp.dim())));
    }
    let n = norm_sq(&cp.g, v);
    if !(n > 0.0) || v.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Err(Error::Degenerate(format!("{what} is the zero vector")));
    }
    Ok(n)
}

/// `(R(Z,Z̄,Z,Z̄), R(Z,Z̄,Z,Z̄)/|Z|⁴)`.
pub fn holo_sectional(cp: &CurvaturePoint, z: &[C64]) -> Result<(f64, f64)> {
    let n = nonzero(cp, z, "Z")?;
    let raw = real_part(cp.riem_form(z, z, z, z), "holomorphic sectional curvature")?;
    Ok((raw, raw / (n * n)))
}

/// `R(X,X̄,Y,Ȳ)`.
pub fn bisectional(cp: &CurvaturePoint, x: &[C64], y: &[C64]) -> Result<f64> {
    nonzero(cp, x, "X")?;
    nonzero(cp, y, "Y")?;
    real_part(cp.riem_form(x, x, y, y), "bisectional curvature")
}

/// `Ric_{γδ̄} = g^{αβ̄} R_{αβ̄γδ̄}`.
pub fn ricci(cp: &CurvaturePoint) -> CMatrix {
    let m = cp.dim();
    CMatrix::from_fn(m, m, |c, d| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..m {
            for b in 0..m {
                acc += cp.g_inv[(a, b)] * cp.riem(a, b, c, d);
            }
        }
        acc
    })
}

pub fn scalar(cp: &CurvaturePoint) -> f64 {
    let ric = ricci(cp);
    let m = cp.dim();
    let mut acc = C64::new(0.0, 0.0);
    for c in 0..m {
        for d in 0..m {
            acc += cp.g_inv[(c, d)] * ric[(c, d)];
        }
    }
    acc.re
}

/// Smallest and largest eigenvalue of `Ric` relative to `g`.
pub fn ricci_extremes(cp: &CurvaturePoint) -> Result<(f64, f64)> {
    let vals = pencil_eigenvalues(&ricci(cp), &cp.g)?;
    Ok((*vals.last().expect("m >= 1"), vals[0]))
}

/// A `g`-orthonormal frame of a `k`-dimensional subspace of the tangent space.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceFrame {
    pub vectors: Vec<Vec<C64>>,
}

impl SubspaceFrame {
    pub fn new(g: &CMatrix, vectors: Vec<Vec<C64>>) -> Result<Self> {
        let m = g.nrows();
        if vectors.is_empty() || vectors.len() > m {
            return Err(Error::config(format!("a frame needs between 1 and {m} vectors")));
        }
        for v in &vectors {
            if v.len() != m {
                return Err(Error::config("frame vector has the wrong length"));
            }
        }
        for (i, u) in vectors.iter().enumerate() {
            for (j, w) in vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                let err = (form(g, u, w) - C64::new(target, 0.0)).norm();
                if err > FRAME_TOL {
                    return Err(Error::Frame(format!("Gram entry ({i},{j}) is off by {err:e}")));
                }
            }
        }
        Ok(SubspaceFrame { vectors })
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    /// `Σ w_i E_i`.
    pub fn combine(&self, w: &[C64]) -> Vec<C64> {
        let m = self.vectors[0].len();
        let mut out = vec![C64::new(0.0, 0.0); m];
        for (wi, e) in w.iter().zip(&self.vectors) {
            for (o, x) in out.iter_mut().zip(e) {
                *o += wi * x;
            }
        }
        out
    }
}

/// `Σ_{i,j} R(E_i, Ē_i, E_j, Ē_j)`.
pub fn k_scalar(cp: &CurvaturePoint, frame: &SubspaceFrame) -> Result<f64> {
    let frame = SubspaceFrame::new(&cp.g, frame.vectors.clone())?;
    let mut acc = C64::new(0.0, 0.0);
    for e in &frame.vectors {
        for f in &frame.vectors {
            acc += cp.riem_form(e, e, f, f);
        }
    }
    real_part(acc, "k-scalar curvature")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub estimate: f64,
    pub stderr: f64,
    pub count: usize,
}

pub const MIN_QUADRATURE_COUNT: usize = 100;
const CHUNK: usize = 1024;

/// Monte Carlo form of `S_k`: `k(k+1)/2` times the mean of `H` over unit vectors of the
/// subspace, sampled as normalized complex Gaussians.
pub fn k_scalar_quadrature(cp: &CurvaturePoint, frame: &SubspaceFrame, count: usize, seed: u64) -> Result<Quadrature> {
    if count < MIN_QUADRATURE_COUNT {
        return Err(Error::config(format!("quadrature needs at least {MIN_QUADRATURE_COUNT} samples, got {count}")));
    }
    let frame = SubspaceFrame::new(&cp.g, frame.vectors.clone())?;
    let k = frame.k();
    let chunks = count.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(count - c * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let w = random_unit_vector(k, &mut rng);
                let z = frame.combine(&w);
                let h = cp.riem_form(&z, &z, &z, &z).re;
                s += h;
                s2 += h * h;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = count as f64;
    let mean = s / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let scale = (k * (k + 1)) as f64 / 2.0;
    Ok(Quadrature { estimate: scale * mean, stderr: scale * (var / n).sqrt(), count })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { restarts: 50, iterations: 200, seed: 0 }
    }
}

/// Best values found by the Grassmannian search. These are search bounds, not proofs.
#[derive(Clone, Debug)]
pub struct KRicciExtremes {
    pub k: usize,
    pub max: f64,
    pub argmax: SubspaceFrame,
    pub argmax_vector: Vec<C64>,
    pub min: f64,
    pub argmin: SubspaceFrame,
    pub argmin_vector: Vec<C64>,
}

// Curvature tensor in a g-orthonormal basis, so the search runs on the round sphere.
struct Normalized {
    m: usize,
    r: Vec<C64>,
}

impl Normalized {
    fn new(cp: &CurvaturePoint) -> Result<(Self, CMatrix)> {
        let m = cp.dim();
        let p = orthonormal_frame(&cp.g)?;
        let cols: Vec<Vec<C64>> = (0..m).map(|j| column(&p, j)).collect();
        let mut r = vec![C64::new(0.0, 0.0); m * m * m * m];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        r[((a * m + b) * m + c) * m + d] = cp.riem_form(&cols[a], &cols[b], &cols[c], &cols[d]);
                    }
                }
            }
        }
        Ok((Normalized { m, r }, p))
    }

    fn at(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        let m = self.m;
        self.r[((a * m + b) * m + c) * m + d]
    }

    // M_{ab} = R(e_a, ē_b, v, v̄); the form y ↦ R(y,ȳ,v,v̄) is x^H M x with x = conj(y)
    fn q_matrix(&self, v: &[C64]) -> CMatrix {
        let m = self.m;
        CMatrix::from_fn(m, m, |a, b| {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..m {
                for d in 0..m {
                    acc += self.at(a, b, c, d) * v[c] * v[d].conj();
                }
            }
            acc
        })
    }

    /// `s·Ric_Σ(v)` maximized over `Σ ∋ v`, with the optimal complement.
    fn objective(&self, v: &[C64], k: usize, sign: f64) -> (f64, Vec<Vec<C64>>) {
        let q = self.q_matrix(v);
        let h = (0..self.m)
            .map(|a| (0..self.m).map(|b| q[(a, b)] * v[a] * v[b].conj()).sum::<C64>())
            .sum::<C64>()
            .re;
        if k == 1 {
            return (sign * h, Vec::new());
        }
        // conj(v^⊥) basis in the x = conj(y) picture
        let vc: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        let basis = complement(&vc);
        let b = CMatrix::from_fn(self.m, basis.len(), |i, j| basis[j][i]);
        let reduced = b.adjoint() * (&q * C64::new(sign, 0.0)) * &b;
        let (vals, vecs) = hermitian_eigen(&reduced);
        let take = k - 1;
        let n = vals.len();
        let mut total = sign * h;
        let mut ys = Vec::with_capacity(take);
        for idx in (n - take..n).rev() {
            total += vals[idx];
            let x = mat_vec(&b, &column(&vecs, idx));
            ys.push(x.iter().map(|z| z.conj()).collect());
        }
        (total, ys)
    }

    // s·Ric_Σ restricted to Σ = span(frame) as a Hermitian form in the frame coefficients
    fn best_in_subspace(&self, frame: &[Vec<C64>], sign: f64) -> Vec<C64> {
        let k = frame.len();
        let m = self.m;
        let mut form_m = CMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = C64::new(0.0, 0.0);
                for e in frame {
                    for a in 0..m {
                        for b in 0..m {
                            for c in 0..m {
                                for d in 0..m {
                                    acc += self.at(a, b, c, d) * e[a] * e[b].conj() * frame[i][c] * frame[j][d].conj();
                                }
                            }
                        }
                    }
                }
                form_m[(i, j)] = acc * sign;
            }
        }
        let (_, vecs) = hermitian_eigen(&form_m);
        let x = column(&vecs, k - 1);
        let w: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        let mut v = vec![C64::new(0.0, 0.0); m];
        for (wi, e) in w.iter().zip(frame) {
            for (o, x) in v.iter_mut().zip(e) {
                *o += wi * x;
            }
        }
        normalize(v)
    }
}

fn normalize(v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Orthonormal basis of the Hermitian orthogonal complement of the unit vector `u`.
fn complement(u: &[C64]) -> Vec<Vec<C64>> {
    let m = u.len();
    let mut basis: Vec<Vec<C64>> = vec![u.to_vec()];
    for j in 0..m {
        let mut e = vec![C64::new(0.0, 0.0); m];
        e[j] = C64::new(1.0, 0.0);
        for b in &basis {
            let proj: C64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
            for (ei, bi) in e.iter_mut().zip(b) {
                *ei -= proj * bi;
            }
        }
        let n = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            basis.push(e.into_iter().map(|z| z / n).collect());
        }
        if basis.len() == m {
            break;
        }
    }
    basis.remove(0);
    basis
}

struct Found {
    value: f64,
    v: Vec<C64>,
    others: Vec<Vec<C64>>,
}

fn local_ascent(nr: &Normalized, k: usize, sign: f64, start: Vec<C64>, iterations: usize) -> Found {
    let m = nr.m;
    let mut v = start;
    let (mut value, mut others) = nr.objective(&v, k, sign);
    let mut step = 0.1;
    for _ in 0..iterations {
        let before = value;
        if k > 1 {
            let mut frame = vec![v.clone()];
            frame.extend(others.iter().cloned());
            let cand = nr.best_in_subspace(&frame, sign);
            let (val, oth) = nr.objective(&cand, k, sign);
            if val > value {
                v = cand;
                value = val;
                others = oth;
            }
        }
        // central-difference gradient over the 2m real directions, projected to the sphere
        let h = 1e-6;
        let mut grad = vec![C64::new(0.0, 0.0); m];
        for (i, g) in grad.iter_mut().enumerate() {
            for (unit, part) in [(C64::new(1.0, 0.0), 0), (C64::new(0.0, 1.0), 1)] {
                let mut plus = v.clone();
                let mut minus = v.clone();
                plus[i] += unit * h;
                minus[i] -= unit * h;
                let d = (nr.objective(&normalize(plus), k, sign).0 - nr.objective(&normalize(minus), k, sign).0) / (2.0 * h);
                if part == 0 {
                    g.re = d;
                } else {
                    g.im = d;
                }
            }
        }
        let radial: f64 = grad.iter().zip(&v).map(|(g, x)| g.re * x.re + g.im * x.im).sum();
        for (g, x) in grad.iter_mut().zip(&v) {
            *g -= x * radial;
        }
        let gnorm = grad.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if gnorm > 1e-12 {
            let mut t = step;
            loop {
                let cand = normalize(v.iter().zip(&grad).map(|(x, g)| x + g * (t / gnorm)).collect());
                let (val, oth) = nr.objective(&cand, k, sign);
                if val > value {
                    v = cand;
                    value = val;
                    others = oth;
                    step = (t * 2.0).min(1.0);
                    break;
                }
                t *= 0.5;
                if t < 1e-10 {
                    step = 1e-3;
                    break;
                }
            }
        }
        if value - before <= 1e-15 * (1.0 + value.abs()) && gnorm <= 1e-9 {
            break;
        }
    }
    Found { value, v, others }
}

fn search(nr: &Normalized, k: usize, sign: f64, cfg: &SearchConfig) -> Found {
    let results: Vec<Found> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(2 * r as u64 + if sign > 0.0 { 0 } else { 1 });
            let u = crate::linalg::haar_unitary(nr.m, &mut rng);
            local_ascent(nr, k, sign, column(&u, 0), cfg.iterations)
        })
        .collect();
    let mut best: Option<Found> = None;
    for f in results {
        if best.as_ref().is_none_or(|b| f.value > b.value) {
            best = Some(f);
        }
    }
    best.expect("at least one restart")
}

/// Extremes of `Ric_Σ(v,v̄) = Σ_γ R(E_γ,Ē_γ,v,v̄)` over `k`-dimensional `Σ` and unit `v ∈ Σ`.
///
/// For fixed `v` the best complement is given by the extreme `k−1` eigenvalues of
/// `y ↦ R(y,ȳ,v,v̄)` on `v^⊥`, so the search runs over the unit sphere only.
pub fn k_ricci_extremes(cp: &CurvaturePoint, k: usize, cfg: &SearchConfig) -> Result<KRicciExtremes> {
    let m = cp.dim();
    if k == 0 || k > m {
        return Err(Error::config(format!("k must be in 1..={m}, got {k}")));
    }
    let (nr, p) = Normalized::new(cp)?;
    let to_orig = |x: &[C64]| mat_vec(&p, x);
    let top = search(&nr, k, 1.0, cfg);
    let bottom = search(&nr, k, -1.0, cfg);
    let frame_of = |f: &Found| {
        let mut vs = vec![to_orig(&f.v)];
        vs.extend(f.others.iter().map(|y| to_orig(y)));
        SubspaceFrame { vectors: vs }
    };
    Ok(KRicciExtremes {
        k,
        max: top.value,
        argmax: frame_of(&top),
        argmax_vector: to_orig(&top.v),
        min: -bottom.value,
        argmin: frame_of(&bottom),
        argmin_vector: to_orig(&bottom.v),
    })
}

/// `Ric_Σ(v, v̄)` for an explicit frame.
pub fn k_ricci(cp: &CurvaturePoint, frame: &SubspaceFrame, v: &[C64]) -> Result<f64> {
    let frame = SubspaceFrame::new(&cp.g, frame.vectors.clone())?;
    let mut acc = C64::new(0.0, 0.0);
    for e in &frame.vectors {
        acc += cp.riem_form(e, e, v, v);
    }
    real_part(acc, "k-Ricci curvature")
}

/// Smallest and largest bisectional curvature `R(X,X̄,Y,Ȳ)` over unit `X, Y`, sampled.
///
/// For each probe `Y` (the coordinate axes of a `g`-orthonormal basis plus `probes` random
/// unit vectors) the extremes over `X` are exact eigenvalues, so only `Y` is sampled.
pub fn bisectional_range(cp: &CurvaturePoint, probes: usize, seed: u64) -> Result<(f64, f64)> {
    let (nr, _) = Normalized::new(cp)?;
    let m = nr.m;
    let mut ys: Vec<Vec<C64>> = (0..m)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); m];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ys.extend((0..probes).map(|_| random_unit_vector(m, &mut rng)));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for y in &ys {
        let vals = crate::linalg::hermitian_eigenvalues(&crate::linalg::hermitian_part(&nr.q_matrix(y)));
        lo = lo.min(vals[0]);
        hi = hi.max(vals[vals.len() - 1]);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{complex_hyperbolic_ball, curvature_tensor, flat, fubini_study, poincare_polydisk};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ball_origin() -> CurvaturePoint {
        curvature_tensor(&complex_hyperbolic_ball(2, 1.0).unwrap(), &[c(0.0, 0.0); 2]).unwrap()
    }

    #[test]
    fn sectional_values() {
        let cp = ball_origin();
        assert_eq!(holo_sectional(&cp, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), (-2.0, -2.0));
        let (raw, norm) = holo_sectional(&cp, &[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((raw + 32.0).abs() < 1e-12 && (norm + 2.0).abs() < 1e-12);
        assert!(matches!(holo_sectional(&cp, &[c(0.0, 0.0); 2]), Err(Error::Degenerate(_))));
        let b = bisectional(&cp, &[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((b + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ricci_and_scalar() {
        let cp = ball_origin();
        let ric = ricci(&cp);
        assert!((ric - CMatrix::identity(2, 2) * c(-3.0, 0.0)).norm() < 1e-12);
        assert!((scalar(&cp) + 6.0).abs() < 1e-12);
        let fs = curvature_tensor(&fubini_study(2, 1.0).unwrap(), &[c(0.0, 0.0); 2]).unwrap();
        assert!((ricci(&fs) - CMatrix::identity(2, 2) * c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn k_scalar_trace_form() {
        let cp = ball_origin();
        let frame = SubspaceFrame::new(&cp.g, vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!((k_scalar(&cp, &frame).unwrap() + 6.0).abs() < 1e-12);
        let bad = SubspaceFrame { vectors: vec![vec![c(1.0, 0.0), c(1.0, 0.0)]] };
        assert!(matches!(k_scalar(&cp, &bad), Err(Error::Frame(_))));
    }

    #[test]
    fn quadrature_is_exact_for_k_equal_one() {
        let cp = ball_origin();
        let s = 0.5f64.sqrt();
        let frame = SubspaceFrame::new(&cp.g, vec![vec![c(s, 0.0), c(0.0, s)]]).unwrap();
        let q = k_scalar_quadrature(&cp, &frame, 200, 1).unwrap();
        assert!((q.estimate + 2.0).abs() < 1e-12 && q.stderr < 1e-12);
        assert!(matches!(k_scalar_quadrature(&cp, &frame, 10, 1), Err(Error::Config(_))));
    }

    #[test]
    fn k_ricci_on_models() {
        let cfg = SearchConfig { restarts: 8, iterations: 100, seed: 5 };
        let cp = ball_origin();
        let one = k_ricci_extremes(&cp, 1, &cfg).unwrap();
        assert!((one.max + 2.0).abs() < 1e-9 && (one.min + 2.0).abs() < 1e-9);
        let two = k_ricci_extremes(&cp, 2, &cfg).unwrap();
        assert!((two.max + 3.0).abs() < 1e-9 && (two.min + 3.0).abs() < 1e-9);
        let fl = curvature_tensor(&flat(2).unwrap(), &[c(0.0, 0.0); 2]).unwrap();
        let z = k_ricci_extremes(&fl, 2, &cfg).unwrap();
        assert!(z.max.abs() < 1e-12 && z.min.abs() < 1e-12);
        assert!(matches!(k_ricci_extremes(&cp, 3, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn polydisk_sectional_range() {
        let cfg = SearchConfig { restarts: 16, iterations: 200, seed: 2 };
        let cp = curvature_tensor(&poincare_polydisk(2, 1.0).unwrap(), &[c(0.1, 0.2), c(-0.3, 0.0)]).unwrap();
        let h = k_ricci_extremes(&cp, 1, &cfg).unwrap();
        assert!((h.min + 2.0).abs() < 1e-7, "{}", h.min);
        assert!((h.max + 1.0).abs() < 1e-7, "{}", h.max);
    }

    #[test]
    fn bisectional_range_on_ball() {
        let (lo, hi) = bisectional_range(&ball_origin(), 32, 0).unwrap();
        assert!((lo + 2.0).abs() < 1e-12, "{lo}");
        assert!(hi <= -1.0 + 1e-12 && hi > -1.2, "{hi}");
    }
}

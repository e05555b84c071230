use crate::jet::JetMatrix;
use crate::linalg::{inverse, CMatrix};
use crate::{Result, C64};

use super::chart::{validate_metric, KahlerChart};

/// Metric, Christoffel symbols and the lowered curvature tensor at one point.
///
/// Index conventions: `g_inv[(β, δ)] = g^{βδ̄}` with `Σ_δ g^{βδ̄} g_{αδ̄} = δ^β_α`,
/// `gamma(β, α, γ) = Γ^β_{αγ} = Σ_δ ∂_γ g_{αδ̄} g^{βδ̄}` and
/// `riem(α, β, γ, δ) = R_{αβ̄γδ̄} = −∂_γ∂̄_δ g_{αβ̄} + Σ g^{pq̄} ∂_γ g_{αq̄} ∂̄_δ g_{pβ̄}`,
/// which is `−∂̄_δ Γ` lowered with `g`. With this sign the hyperbolic models have
/// negative holomorphic sectional curvature.
#[derive(Clone, Debug)]
pub struct CurvaturePoint {
    pub point: Vec<C64>,
    pub g: CMatrix,
    pub g_inv: CMatrix,
    gamma: Vec<C64>,
    riem: Vec<C64>,
}

fn unit(m: usize, k: usize) -> Vec<usize> {
    let mut v = vec![0; m];
    v[k] += 1;
    v
}

/// Builds the curvature point from metric jets of order at least 2.
pub fn curvature_from_metric_jets(point: &[C64], jets: &JetMatrix) -> Result<CurvaturePoint> {
    let m = jets.len();
    let zero = vec![0; m];
    let g = CMatrix::from_fn(m, m, |a, b| jets[a][b].value());
    validate_metric(&g)?;
    let g_inv = inverse(&g.transpose())?;
    // dg[(c*m + a)*m + b] = ∂_c g_{ab̄}, dbg likewise for ∂̄_c
    let mut dg = vec![C64::new(0.0, 0.0); m * m * m];
    let mut dbg = vec![C64::new(0.0, 0.0); m * m * m];
    for c in 0..m {
        for a in 0..m {
            for b in 0..m {
                dg[(c * m + a) * m + b] = jets[a][b].derivative(&unit(m, c), &zero)?;
                dbg[(c * m + a) * m + b] = jets[a][b].derivative(&zero, &unit(m, c))?;
            }
        }
    }
    let mut gamma = vec![C64::new(0.0, 0.0); m * m * m];
    for beta in 0..m {
        for alpha in 0..m {
            for c in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for delta in 0..m {
                    acc += dg[(c * m + alpha) * m + delta] * g_inv[(beta, delta)];
                }
                gamma[(beta * m + alpha) * m + c] = acc;
            }
        }
    }
    let mut riem = vec![C64::new(0.0, 0.0); m * m * m * m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut acc = -jets[a][b].derivative(&unit(m, c), &unit(m, d))?;
                    for p in 0..m {
                        for q in 0..m {
                            acc += g_inv[(p, q)] * dg[(c * m + a) * m + q] * dbg[(d * m + p) * m + b];
                        }
                    }
                    riem[((a * m + b) * m + c) * m + d] = acc;
                }
            }
        }
    }
    Ok(CurvaturePoint { point: point.to_vec(), g, g_inv, gamma, riem })
}

pub fn curvature_tensor(chart: &KahlerChart, point: &[C64]) -> Result<CurvaturePoint> {
    let jets = chart.metric_jets_at(point, 2)?;
    curvature_from_metric_jets(point, &jets)
}

/// `Γ^β_{αγ}` as `gamma[β][α][γ]`.
pub fn christoffel(chart: &KahlerChart, point: &[C64]) -> Result<Vec<Vec<Vec<C64>>>> {
    let jets = chart.metric_jets_at(point, 1)?;
    let m = chart.dim();
    let zero = vec![0; m];
    let g = CMatrix::from_fn(m, m, |a, b| jets[a][b].value());
    validate_metric(&g)?;
    let g_inv = inverse(&g.transpose())?;
    let mut out = vec![vec![vec![C64::new(0.0, 0.0); m]; m]; m];
    for (beta, plane) in out.iter_mut().enumerate() {
        for (alpha, row) in plane.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                for delta in 0..m {
                    *entry += jets[alpha][delta].derivative(&unit(m, c), &zero)? * g_inv[(beta, delta)];
                }
            }
        }
    }
    Ok(out)
}

impl CurvaturePoint {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `Γ^β_{αγ}`.
    pub fn gamma(&self, beta: usize, alpha: usize, c: usize) -> C64 {
        let m = self.dim();
        self.gamma[(beta * m + alpha) * m + c]
    }

    /// `R_{αβ̄γδ̄}`.
    pub fn riem(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        let m = self.dim();
        self.riem[((a * m + b) * m + c) * m + d]
    }

    /// `R(X, Ȳ, Z, W̄) = Σ R_{αβ̄γδ̄} X^α conj(Y^β) Z^γ conj(W^δ)`.
    pub fn riem_form(&self, x: &[C64], y: &[C64], z: &[C64], w: &[C64]) -> C64 {
        let m = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..m {
            if x[a] == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..m {
                let xy = x[a] * y[b].conj();
                for c in 0..m {
                    let xyz = xy * z[c];
                    for d in 0..m {
                        acc += self.riem[((a * m + b) * m + c) * m + d] * xyz * w[d].conj();
                    }
                }
            }
        }
        acc
    }

    /// `Γ(u, v)^β = Σ Γ^β_{αγ} u^α v^γ`.
    pub fn gamma_apply(&self, u: &[C64], v: &[C64]) -> Vec<C64> {
        let m = self.dim();
        (0..m)
            .map(|beta| {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..m {
                    for c in 0..m {
                        acc += self.gamma(beta, a, c) * u[a] * v[c];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn raw_riem(&self) -> &[C64] {
        &self.riem
    }

    /// Largest violation of the Kähler curvature symmetries.
    pub fn symmetry_residual(&self) -> f64 {
        let m = self.dim();
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let r = self.riem(a, b, c, d);
                        worst = worst
                            .max((r - self.riem(c, b, a, d)).norm())
                            .max((r - self.riem(a, d, c, b)).norm())
                            .max((r - self.riem(b, a, d, c).conj()).norm());
                    }
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{complex_hyperbolic_ball, flat, fubini_study, normal_chart, poincare_disk};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ball_origin_tensor() {
        let cp = curvature_tensor(&complex_hyperbolic_ball(2, 1.0).unwrap(), &[c(0.0, 0.0); 2]).unwrap();
        assert!((cp.riem(0, 0, 0, 0) - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((cp.riem(0, 0, 1, 1) - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((cp.riem(0, 1, 1, 0) - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(cp.riem(0, 1, 0, 1).norm() < 1e-12);
    }

    #[test]
    fn fubini_study_origin_is_positive() {
        let cp = curvature_tensor(&fubini_study(2, 1.0).unwrap(), &[c(0.0, 0.0); 2]).unwrap();
        assert!((cp.riem(0, 0, 0, 0) - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn flat_is_flat() {
        let cp = curvature_tensor(&flat(3).unwrap(), &[c(0.3, 1.0), c(-2.0, 0.5), c(4.0, 0.0)]).unwrap();
        assert!(cp.raw_riem().iter().all(|r| r.norm() < 1e-12));
    }

    #[test]
    fn disk_christoffel_is_independent_of_scale() {
        let z = c(0.3, -0.4);
        for a in [1.0, 4.0, 0.25] {
            let gamma = christoffel(&poincare_disk(a).unwrap(), &[z]).unwrap();
            let expect = z.conj() * 2.0 / (1.0 - z.norm_sqr());
            assert!((gamma[0][0][0] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn normal_chart_kills_first_derivatives() {
        let chart = poincare_disk(4.0).unwrap();
        let n = normal_chart(&chart, &[c(0.5, 0.0)]).unwrap();
        let jets = n.metric_jets_at(&[c(0.0, 0.0)], 1).unwrap();
        assert!((jets[0][0].value() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(jets[0][0].derivative(&[1], &[0]).unwrap().norm() < 1e-9);
        assert!(jets[0][0].derivative(&[0], &[1]).unwrap().norm() < 1e-9);
    }

    #[test]
    fn curvature_is_invariant_under_normal_chart() {
        let chart = complex_hyperbolic_ball(2, 1.0).unwrap();
        let p = [c(0.2, 0.1), c(-0.3, 0.25)];
        let cp = curvature_tensor(&chart, &p).unwrap();
        let (n, coords) = crate::geometry::normal_chart_with_frame(&chart, &p, None).unwrap();
        let cn = curvature_tensor(&n, &[c(0.0, 0.0); 2]).unwrap();
        let x = [c(1.0, 0.5), c(-0.2, 0.3)];
        let y = [c(0.1, -0.7), c(0.4, 0.0)];
        let lhs = cp.riem_form(&x, &x, &y, &y);
        let (xn, yn) = (coords.pull_tangent(&x), coords.pull_tangent(&y));
        let rhs = cn.riem_form(&xn, &xn, &yn, &yn);
        assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
    }
}

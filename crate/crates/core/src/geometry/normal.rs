use std::sync::Arc;

use crate::expr::{Expr, Var};
use crate::linalg::{inverse, mat_vec, orthonormal_frame, CMatrix};
use crate::{Error, Result, C64};

use super::chart::KahlerChart;
use super::curvature::christoffel;

/// The holomorphic coordinate change `z = p + L w − ½ Γ_p(L w, L w)` behind a normal chart.
///
/// `L` satisfies `L^T g(p) conj(L) = I`; in the `w` chart the metric is the identity
/// at `w = 0` and its first derivatives vanish there.
#[derive(Clone, Debug)]
pub struct NormalCoordinates {
    pub center: Vec<C64>,
    pub linear: CMatrix,
    linear_inv: CMatrix,
    pub coords: Vec<Expr>,
}

impl NormalCoordinates {
    /// Original coordinates of the normal-chart point `w`.
    pub fn to_original(&self, w: &[C64]) -> Result<Vec<C64>> {
        self.coords.iter().map(|e| e.eval(w)).collect()
    }

    /// Tangent vector at the center, normal components to original components.
    pub fn push_tangent(&self, u: &[C64]) -> Vec<C64> {
        mat_vec(&self.linear, u)
    }

    /// Tangent vector at the center, original components to normal components.
    pub fn pull_tangent(&self, v: &[C64]) -> Vec<C64> {
        mat_vec(&self.linear_inv, v)
    }
}

fn w(index: usize) -> Expr {
    Expr::Var(Var { letter: 'w', index })
}

/// Normal chart centered at `point` using the Cholesky normalization.
pub fn normal_chart(chart: &KahlerChart, point: &[C64]) -> Result<KahlerChart> {
    Ok(normal_chart_with_frame(chart, point, None)?.0)
}

/// Normal chart whose coordinate axes are `P·U`, `P` the Cholesky normalization and
/// `U` an optional unitary matrix (e.g. an adapted frame).
pub fn normal_chart_with_frame(
    chart: &KahlerChart,
    point: &[C64],
    unitary: Option<&CMatrix>,
) -> Result<(KahlerChart, NormalCoordinates)> {
    let m = chart.dim();
    let g = chart.metric_at(point)?;
    let mut linear = orthonormal_frame(&g)?;
    if let Some(u) = unitary {
        if u.nrows() != m || u.ncols() != m {
            return Err(Error::config("frame matrix has the wrong size"));
        }
        let defect = (u.adjoint() * u - CMatrix::identity(m, m)).norm();
        if defect > 1e-10 {
            return Err(Error::Frame(format!("adapted frame is not unitary (defect {defect:e})")));
        }
        linear = &linear * u;
    }
    let linear_inv = inverse(&linear)
        .map_err(|_| Error::MetricValidity("normalizing map is not invertible".into()))?;
    let gamma = christoffel(chart, point)?;

    let mut coords = Vec::with_capacity(m);
    for k in 0..m {
        let mut e = Expr::constant(point[k]);
        for j in 0..m {
            let l = linear[(k, j)];
            if l != C64::new(0.0, 0.0) {
                e = Expr::add(e, Expr::mul(Expr::constant(l), w(j + 1)));
            }
        }
        for a in 0..m {
            for b in a..m {
                let mut coef = C64::new(0.0, 0.0);
                for nu in 0..m {
                    for rho in 0..m {
                        let gl = gamma[k][nu][rho];
                        coef += gl * linear[(nu, a)] * linear[(rho, b)];
                        if a != b {
                            coef += gl * linear[(nu, b)] * linear[(rho, a)];
                        }
                    }
                }
                coef *= -0.5;
                if coef.norm() > 0.0 {
                    e = Expr::add(e, Expr::mul(Expr::constant(coef), Expr::mul(w(a + 1), w(b + 1))));
                }
            }
        }
        coords.push(e);
    }
    let name = format!("normal({})", chart.name());
    let normal = KahlerChart::pullback(name, Arc::new(chart.clone()), coords.clone())?;
    Ok((normal, NormalCoordinates { center: point.to_vec(), linear, linear_inv, coords }))
}

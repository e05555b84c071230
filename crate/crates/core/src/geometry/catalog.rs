use crate::expr::{Expr, Func};
use crate::linalg::CMatrix;
use crate::{Error, Result, C64};

use super::chart::{KahlerChart, Region};

pub fn catalog_names() -> &'static [&'static str] {
    &["flat", "poincare_disk", "poincare_polydisk", "complex_hyperbolic_ball", "fubini_study"]
}

fn sum_abs2(m: usize) -> Expr {
    (1..=m).map(|k| Expr::func(Func::Abs2, Expr::z(k))).reduce(Expr::add).expect("m >= 1")
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::config(format!("{name} must be positive, got {value}")))
    }
}

fn dim_ok(m: usize) -> Result<usize> {
    if (1..=crate::jet::MAX_VARS).contains(&m) {
        Ok(m)
    } else {
        Err(Error::config(format!("dimension must be in 1..={}, got {m}", crate::jet::MAX_VARS)))
    }
}

pub fn flat(m: usize) -> Result<KahlerChart> {
    let m = dim_ok(m)?;
    let comps = (0..m)
        .map(|a| (0..m).map(|b| Expr::num(if a == b { 1.0 } else { 0.0 })).collect())
        .collect();
    KahlerChart::from_components(format!("flat({m})"), m, comps, Region::Whole)
}

fn disk_factor(k: usize, a: f64) -> Expr {
    Expr::div(
        Expr::num(a),
        Expr::pow(Expr::sub(Expr::num(1.0), Expr::func(Func::Abs2, Expr::z(k))), 2),
    )
}

/// `g = a / (1 − |z|²)²` on the unit disk.
pub fn poincare_disk(a: f64) -> Result<KahlerChart> {
    let a = positive("a", a)?;
    KahlerChart::from_components(
        format!("poincare_disk(a={a})"),
        1,
        vec![vec![disk_factor(1, a)]],
        Region::Ball { radius: 1.0 },
    )
}

pub fn poincare_polydisk(m: usize, a: f64) -> Result<KahlerChart> {
    let m = dim_ok(m)?;
    let a = positive("a", a)?;
    let comps = (0..m)
        .map(|i| (0..m).map(|j| if i == j { disk_factor(i + 1, a) } else { Expr::num(0.0) }).collect())
        .collect();
    KahlerChart::from_components(format!("poincare_polydisk({m}, a={a})"), m, comps, Region::Polydisk { radius: 1.0 })
}

/// Potential `−c log(1 − |z|²)` on the unit ball.
pub fn complex_hyperbolic_ball(m: usize, c: f64) -> Result<KahlerChart> {
    let m = dim_ok(m)?;
    let c = positive("c", c)?;
    let phi = Expr::mul(
        Expr::num(-c),
        Expr::func(Func::Log, Expr::sub(Expr::num(1.0), sum_abs2(m))),
    );
    KahlerChart::from_potential(format!("complex_hyperbolic_ball({m}, c={c})"), m, phi, Region::Ball { radius: 1.0 })
}

/// Potential `c log(1 + |z|²)` on the affine chart of projective space.
pub fn fubini_study(m: usize, c: f64) -> Result<KahlerChart> {
    let m = dim_ok(m)?;
    let c = positive("c", c)?;
    let phi = Expr::mul(Expr::num(c), Expr::func(Func::Log, Expr::add(Expr::num(1.0), sum_abs2(m))));
    KahlerChart::from_potential(format!("fubini_study({m}, c={c})"), m, phi, Region::Whole)
}

/// Catalog lookup. `scale` is `a` for the disk models and `c` for the ball and
/// Fubini–Study models; it defaults to 1.
pub fn catalog(name: &str, dim: usize, scale: Option<f64>) -> Result<KahlerChart> {
    let s = scale.unwrap_or(1.0);
    match name {
        "flat" => flat(dim),
        "poincare_disk" => {
            if dim != 1 {
                return Err(Error::config("poincare_disk has dimension 1"));
            }
            poincare_disk(s)
        }
        "poincare_polydisk" => poincare_polydisk(dim, s),
        "complex_hyperbolic_ball" => complex_hyperbolic_ball(dim, s),
        "fubini_study" => fubini_study(dim, s),
        other => Err(Error::config(format!(
            "unknown catalog chart '{other}' (known: {})",
            catalog_names().join(", ")
        ))),
    }
}

/// Closed-form curvature ranges of a catalog model, per unit vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelCurvature {
    pub holomorphic_sectional: (f64, f64),
    pub bisectional: (f64, f64),
    pub ricci: (f64, f64),
    pub scalar: f64,
    /// The holomorphic sectional curvature when it is constant.
    constant_hsc: Option<f64>,
}

impl ModelCurvature {
    /// Range of `Ric_k` over all `k`-subspaces and unit vectors in them, when known.
    pub fn ricci_k(&self, k: usize, m: usize) -> Option<(f64, f64)> {
        if k == 0 || k > m {
            return None;
        }
        if let Some(h) = self.constant_hsc {
            let v = h * (k as f64 + 1.0) / 2.0;
            return Some((v, v));
        }
        if k == 1 {
            Some(self.holomorphic_sectional)
        } else if k == m {
            Some(self.ricci)
        } else {
            None
        }
    }
}

pub fn model_curvature(name: &str, dim: usize, scale: Option<f64>) -> Result<ModelCurvature> {
    let s = scale.unwrap_or(1.0);
    let m = dim as f64;
    let constant = |h: f64| ModelCurvature {
        holomorphic_sectional: (h, h),
        bisectional: if dim == 1 {
            (h, h)
        } else if h < 0.0 {
            (h, h / 2.0)
        } else {
            (h / 2.0, h)
        },
        ricci: (h * (m + 1.0) / 2.0, h * (m + 1.0) / 2.0),
        scalar: h * m * (m + 1.0) / 2.0,
        constant_hsc: Some(h),
    };
    match name {
        "flat" => Ok(constant(0.0)),
        "poincare_disk" => Ok(constant(-2.0 / positive("a", s)?)),
        "complex_hyperbolic_ball" => Ok(constant(-2.0 / positive("c", s)?)),
        "fubini_study" => Ok(constant(2.0 / positive("c", s)?)),
        "poincare_polydisk" => {
            let h = -2.0 / positive("a", s)?;
            if dim == 1 {
                return Ok(constant(h));
            }
            Ok(ModelCurvature {
                holomorphic_sectional: (h, h / m),
                bisectional: (h, 0.0),
                ricci: (h, h),
                scalar: h * m,
                constant_hsc: None,
            })
        }
        other => Err(Error::config(format!("unknown catalog chart '{other}'"))),
    }
}

/// Disk automorphism `e^{iθ} (z − a) / (1 − ā z)`.
pub fn disk_automorphism(a: C64, theta: f64) -> Result<Expr> {
    if a.norm() >= 1.0 {
        return Err(Error::config("disk automorphism needs |a| < 1"));
    }
    let rot = C64::from_polar(1.0, theta);
    Ok(Expr::div(
        Expr::mul(Expr::constant(rot), Expr::sub(Expr::z(1), Expr::constant(a))),
        Expr::sub(Expr::num(1.0), Expr::mul(Expr::constant(a.conj()), Expr::z(1))),
    ))
}

/// Linear isometry `z ↦ U z` of the ball or of Fubini–Study space.
pub fn ball_unitary(u: &CMatrix) -> Result<Vec<Expr>> {
    let m = u.nrows();
    if u.ncols() != m || (u.adjoint() * u - CMatrix::identity(m, m)).norm() > 1e-10 {
        return Err(Error::config("ball isometry needs a square unitary matrix"));
    }
    Ok((0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| u[(i, j)] != C64::new(0.0, 0.0))
                .map(|j| Expr::mul(Expr::constant(u[(i, j)]), Expr::z(j + 1)))
                .reduce(Expr::add)
                .unwrap_or(Expr::num(0.0))
        })
        .collect())
}

use std::fmt;
use std::sync::Arc;

use crate::expr::Expr;
use crate::jet::{JetMatrix, WirtingerJet, MAX_VARS};
use crate::linalg::{hermitian_eigenvalues, hermitian_residual, CMatrix};
use crate::{Error, Result, C64};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const POSITIVITY_FLOOR: f64 = 1e-10;
pub const KAHLER_TOL: f64 = 1e-8;

/// Region of validity of a chart.
#[derive(Clone, Debug)]
pub enum Region {
    Whole,
    /// `Σ|z_k|² < radius²`.
    Ball { radius: f64 },
    /// `|z_k| < radius` for every `k`.
    Polydisk { radius: f64 },
    /// Points whose image under `coords` lies in `base`.
    Image { base: Box<Region>, coords: Vec<Expr> },
}

impl Region {
    pub fn contains(&self, z: &[C64]) -> bool {
        match self {
            Region::Whole => z.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            Region::Ball { radius } => z.iter().map(|c| c.norm_sqr()).sum::<f64>() < radius * radius,
            Region::Polydisk { radius } => z.iter().all(|c| c.norm() < *radius),
            Region::Image { base, coords } => {
                let image: Result<Vec<C64>> = coords.iter().map(|e| e.eval(z)).collect();
                image.is_ok_and(|w| base.contains(&w))
            }
        }
    }

    /// Radius of a coordinate ball around the origin contained in the region, if known.
    pub fn inner_radius(&self) -> Option<f64> {
        match self {
            Region::Whole => None,
            Region::Ball { radius } | Region::Polydisk { radius } => Some(*radius),
            Region::Image { .. } => None,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Whole => write!(f, "C^m"),
            Region::Ball { radius } => write!(f, "|z| < {radius}"),
            Region::Polydisk { radius } => write!(f, "max |z_k| < {radius}"),
            Region::Image { base, .. } => write!(f, "preimage of ({base})"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum MetricSource {
    /// Real potential `φ` with `g_{αβ̄} = ∂_α ∂̄_β φ`.
    Potential(Expr),
    /// Component expressions `g_{αβ̄}`.
    Components(Vec<Vec<Expr>>),
    /// Pullback of `base` along the holomorphic coordinate change `z = coords(w)`.
    Pullback { base: Arc<KahlerChart>, coords: Vec<Expr>, jacobian: Vec<Vec<Expr>> },
}

/// A Kähler metric on a single coordinate chart of `C^m`.
#[derive(Clone, Debug)]
pub struct KahlerChart {
    name: String,
    dim: usize,
    source: MetricSource,
    region: Region,
    // symbolic g_{αβ̄}, used when the metric is evaluated on composite jets
    metric_exprs: Vec<Vec<Expr>>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_VARS {
        return Err(Error::config(format!("chart dimension must be in 1..={MAX_VARS}, got {dim}")));
    }
    Ok(())
}

fn check_vars(e: &Expr, dim: usize, what: &str) -> Result<()> {
    if e.max_var_index() > dim {
        return Err(Error::config(format!(
            "{what} uses variable index {} but the chart has dimension {dim}",
            e.max_var_index()
        )));
    }
    Ok(())
}

impl KahlerChart {
    pub fn from_potential(name: impl Into<String>, dim: usize, potential: Expr, region: Region) -> Result<Self> {
        check_dim(dim)?;
        check_vars(&potential, dim, "potential")?;
        let metric_exprs = (0..dim)
            .map(|a| (0..dim).map(|b| potential.d_z(a).d_zbar(b)).collect())
            .collect();
        Ok(KahlerChart { name: name.into(), dim, source: MetricSource::Potential(potential), region, metric_exprs })
    }

    pub fn from_components(
        name: impl Into<String>,
        dim: usize,
        components: Vec<Vec<Expr>>,
        region: Region,
    ) -> Result<Self> {
        check_dim(dim)?;
        if components.len() != dim || components.iter().any(|row| row.len() != dim) {
            return Err(Error::config(format!("metric components must form a {dim}x{dim} array")));
        }
        for row in &components {
            for e in row {
                check_vars(e, dim, "metric component")?;
            }
        }
        Ok(KahlerChart {
            name: name.into(),
            dim,
            metric_exprs: components.clone(),
            source: MetricSource::Components(components),
            region,
        })
    }

    /// The chart `w ↦ base(coords(w))`; `coords` must be holomorphic in `w`.
    pub fn pullback(name: impl Into<String>, base: Arc<KahlerChart>, coords: Vec<Expr>) -> Result<Self> {
        let dim = base.dim;
        if coords.len() != dim {
            return Err(Error::config("pullback needs one coordinate expression per dimension"));
        }
        for e in &coords {
            check_vars(e, dim, "coordinate change")?;
            if e.has_antiholomorphic() {
                return Err(Error::Holomorphy("coordinate change must be holomorphic".into()));
            }
        }
        let jacobian: Vec<Vec<Expr>> =
            coords.iter().map(|zk| (0..dim).map(|a| zk.d_z(a)).collect()).collect();
        let mut metric_exprs = vec![vec![Expr::num(0.0); dim]; dim];
        for (a, row) in metric_exprs.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                let mut acc = Expr::num(0.0);
                for mu in 0..dim {
                    for nu in 0..dim {
                        let g = base.metric_exprs[mu][nu].substitute(&coords)?;
                        let term = Expr::mul(
                            Expr::mul(jacobian[mu][a].clone(), g),
                            Expr::func(crate::expr::Func::Conj, jacobian[nu][b].clone()),
                        );
                        acc = Expr::add(acc, term);
                    }
                }
                *entry = acc;
            }
        }
        let region = Region::Image { base: Box::new(base.region.clone()), coords: coords.clone() };
        Ok(KahlerChart {
            name: name.into(),
            dim,
            source: MetricSource::Pullback { base, coords, jacobian },
            region,
            metric_exprs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &MetricSource {
        &self.source
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn potential(&self) -> Option<&Expr> {
        match &self.source {
            MetricSource::Potential(p) => Some(p),
            _ => None,
        }
    }

    /// Symbolic metric components.
    pub fn metric_exprs(&self) -> &[Vec<Expr>] {
        &self.metric_exprs
    }

    pub fn contains(&self, point: &[C64]) -> bool {
        point.len() == self.dim && self.region.contains(point)
    }

    pub fn check_point(&self, point: &[C64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::config(format!(
                "point has {} coordinates, chart '{}' has dimension {}",
                point.len(),
                self.name,
                self.dim
            )));
        }
        if !self.region.contains(point) {
            return Err(Error::Domain(format!("{:?} is outside {} ({})", point, self.name, self.region)));
        }
        Ok(())
    }

    /// Jets of `g_{αβ̄}` of the given order at a point of the chart.
    pub fn metric_jets_at(&self, point: &[C64], order: usize) -> Result<JetMatrix> {
        self.check_point(point)?;
        match &self.source {
            MetricSource::Potential(phi) => {
                let vars = WirtingerJet::coordinates(point, order + 2)?;
                let pj = phi.eval_jet(&vars)?;
                let mut out = Vec::with_capacity(self.dim);
                for a in 0..self.dim {
                    let da = pj.partial_z(a)?;
                    let mut row = Vec::with_capacity(self.dim);
                    for b in 0..self.dim {
                        row.push(da.partial_zbar(b)?);
                    }
                    out.push(row);
                }
                Ok(out)
            }
            _ => {
                let jets = self.metric_jets_on(&WirtingerJet::coordinates(point, order.max(1))?)?;
                if order == 0 {
                    jets.iter().map(|row| row.iter().map(|j| j.truncate(0)).collect()).collect()
                } else {
                    Ok(jets)
                }
            }
        }
    }

    /// Metric components evaluated on arbitrary coordinate jets (e.g. the jets of `f(z)`).
    pub fn metric_jets_on(&self, vars: &[WirtingerJet]) -> Result<JetMatrix> {
        if vars.len() != self.dim {
            return Err(Error::config("wrong number of coordinate jets"));
        }
        let values: Vec<C64> = vars.iter().map(|v| v.value()).collect();
        self.check_point(&values)?;
        match &self.source {
            MetricSource::Pullback { base, coords, jacobian } => {
                let zj: Vec<WirtingerJet> = coords.iter().map(|e| e.eval_jet(vars)).collect::<Result<_>>()?;
                let g = base.metric_jets_on(&zj)?;
                let jac: Vec<Vec<WirtingerJet>> = jacobian
                    .iter()
                    .map(|row| row.iter().map(|e| e.eval_jet(vars)).collect::<Result<_>>())
                    .collect::<Result<_>>()?;
                let jac_bar: Vec<Vec<WirtingerJet>> =
                    jac.iter().map(|row| row.iter().map(|j| j.conj()).collect()).collect();
                let like = &vars[0];
                let mut out = Vec::with_capacity(self.dim);
                for a in 0..self.dim {
                    let mut row = Vec::with_capacity(self.dim);
                    for b in 0..self.dim {
                        let mut acc = WirtingerJet::zero(like.num_vars(), like.order())?;
                        for mu in 0..self.dim {
                            for nu in 0..self.dim {
                                acc += &(&(&jac[mu][a] * &g[mu][nu]) * &jac_bar[nu][b]);
                            }
                        }
                        row.push(acc);
                    }
                    out.push(row);
                }
                Ok(out)
            }
            _ => self
                .metric_exprs
                .iter()
                .map(|row| row.iter().map(|e| e.eval_jet(vars)).collect::<Result<Vec<_>>>())
                .collect(),
        }
    }

    /// Metric matrix `g_{αβ̄}` at a point, validated.
    pub fn metric_at(&self, point: &[C64]) -> Result<CMatrix> {
        let order = match self.source {
            MetricSource::Components(_) => 1,
            _ => 0,
        };
        let jets = self.metric_jets_at(point, order)?;
        let g = CMatrix::from_fn(self.dim, self.dim, |a, b| jets[a][b].value());
        validate_metric(&g)?;
        if order == 1 {
            let resid = kahler_residual(&jets)?;
            let scale = 1.0 + g.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if resid > KAHLER_TOL * scale {
                return Err(Error::MetricValidity(format!("Kähler condition fails: residual {resid:e}")));
            }
        }
        Ok(g)
    }
}

/// Hermiticity and positive-definiteness of a metric matrix.
pub fn validate_metric(g: &CMatrix) -> Result<()> {
    if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::MetricValidity("metric has non-finite entries".into()));
    }
    let scale = g.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let resid = hermitian_residual(g);
    if resid > HERMITIAN_TOL * scale {
        return Err(Error::MetricValidity(format!("metric is not Hermitian: residual {resid:e}")));
    }
    let smallest = hermitian_eigenvalues(g)[0];
    if smallest <= POSITIVITY_FLOOR {
        return Err(Error::MetricValidity(format!("metric is not positive definite: eigenvalue {smallest:e}")));
    }
    Ok(())
}

/// `max |∂_γ g_{αβ̄} − ∂_α g_{γβ̄}|` from first-order metric jets.
pub fn kahler_residual(jets: &JetMatrix) -> Result<f64> {
    let m = jets.len();
    let mut worst = 0.0f64;
    let e = |k: usize| {
        let mut v = vec![0; m];
        v[k] = 1;
        v
    };
    let zero = vec![0; m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let lhs = jets[a][b].derivative(&e(c), &zero)?;
                let rhs = jets[c][b].derivative(&e(a), &zero)?;
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    Ok(worst)
}

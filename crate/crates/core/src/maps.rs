//! Holomorphic maps between charts and their pointwise invariants.

use std::sync::Arc;

use crate::expr::{parse_map_component, Expr};
use crate::geometry::{christoffel, normal_chart_with_frame, KahlerChart, NormalCoordinates};
use crate::jet::{jet_inverse, JetMatrix, WirtingerJet};
use crate::linalg::{column, fix_phase, inverse, orthonormal_frame, pencil_eigen, CMatrix};
use crate::{Error, Result, C64};

pub const HOLOMORPHY_TOL: f64 = 1e-12;
pub const RANK_RTOL: f64 = 1e-10;
pub const RANK_FLOOR: f64 = 1e-30;
pub const NEGATIVE_SINGULAR_TOL: f64 = 1e-10;

/// A holomorphic map `f: M → N` given by component expressions in the domain coordinates.
#[derive(Clone, Debug)]
pub struct HoloMap {
    domain: Arc<KahlerChart>,
    target: Arc<KahlerChart>,
    components: Vec<Expr>,
}

impl HoloMap {
    pub fn new(domain: Arc<KahlerChart>, target: Arc<KahlerChart>, components: Vec<Expr>) -> Result<Self> {
        if components.len() != target.dim() {
            return Err(Error::config(format!(
                "map has {} components but the target has dimension {}",
                components.len(),
                target.dim()
            )));
        }
        for (i, e) in components.iter().enumerate() {
            if e.has_antiholomorphic() {
                return Err(Error::Holomorphy(format!("component {} uses conj/abs2", i + 1)));
            }
            if e.max_var_index() > domain.dim() {
                return Err(Error::config(format!(
                    "component {} uses variable index {} but the domain has dimension {}",
                    i + 1,
                    e.max_var_index(),
                    domain.dim()
                )));
            }
        }
        Ok(HoloMap { domain, target, components })
    }

    pub fn parse(domain: Arc<KahlerChart>, target: Arc<KahlerChart>, components: &[&str]) -> Result<Self> {
        let exprs = components.iter().map(|s| parse_map_component(s)).collect::<Result<Vec<_>>>()?;
        HoloMap::new(domain, target, exprs)
    }

    pub fn domain(&self) -> &Arc<KahlerChart> {
        &self.domain
    }

    pub fn target(&self) -> &Arc<KahlerChart> {
        &self.target
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Domain dimension.
    pub fn m(&self) -> usize {
        self.domain.dim()
    }

    /// Target dimension.
    pub fn n(&self) -> usize {
        self.target.dim()
    }

    /// `f(point)`, checked against both chart domains.
    pub fn image(&self, point: &[C64]) -> Result<Vec<C64>> {
        self.domain.check_point(point)?;
        let y = self.components.iter().map(|e| e.eval(point)).collect::<Result<Vec<_>>>()?;
        self.target
            .check_point(&y)
            .map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("image {msg}")),
                other => other,
            })?;
        Ok(y)
    }

    /// Jets of the components at `point`.
    pub fn jets(&self, point: &[C64], order: usize) -> Result<Vec<WirtingerJet>> {
        self.image(point)?;
        let vars = WirtingerJet::coordinates(point, order)?;
        self.jets_on(&vars)
    }

    /// Components evaluated on arbitrary domain coordinate jets.
    pub fn jets_on(&self, vars: &[WirtingerJet]) -> Result<Vec<WirtingerJet>> {
        let out = self.components.iter().map(|e| e.eval_jet(vars)).collect::<Result<Vec<_>>>()?;
        for (i, j) in out.iter().enumerate() {
            let r = j.antiholomorphic_residual();
            if r > HOLOMORPHY_TOL {
                return Err(Error::Holomorphy(format!("component {} has antiholomorphic part {r:e}", i + 1)));
            }
        }
        Ok(out)
    }

    /// `f ∘ φ` where `z = φ(w)` maps `new_domain` into the current domain.
    pub fn precompose(&self, coords: &[Expr], new_domain: Arc<KahlerChart>) -> Result<HoloMap> {
        let comps = self.components.iter().map(|e| e.substitute(coords)).collect::<Result<Vec<_>>>()?;
        HoloMap::new(new_domain, self.target.clone(), comps)
    }

    /// `ψ ∘ f` for a holomorphic self-map `ψ` of the target chart (e.g. an isometry).
    pub fn postcompose(&self, outer: &[Expr]) -> Result<HoloMap> {
        if outer.len() != self.n() {
            return Err(Error::config("outer map must have one component per target dimension"));
        }
        let comps = outer.iter().map(|e| e.substitute(&self.components)).collect::<Result<Vec<_>>>()?;
        HoloMap::new(self.domain.clone(), self.target.clone(), comps)
    }
}

/// `f^i_α` as an `n × m` matrix.
pub fn pushforward(f: &HoloMap, point: &[C64]) -> Result<CMatrix> {
    let jets = f.jets(point, 1)?;
    jacobian_of(&jets, f.m())
}

fn unit(m: usize, k: usize) -> Vec<usize> {
    let mut v = vec![0; m];
    v[k] = 1;
    v
}

fn jacobian_of(jets: &[WirtingerJet], m: usize) -> Result<CMatrix> {
    let zero = vec![0; m];
    let mut out = CMatrix::zeros(jets.len(), m);
    for (i, j) in jets.iter().enumerate() {
        for a in 0..m {
            out[(i, a)] = j.derivative(&unit(m, a), &zero)?;
        }
    }
    Ok(out)
}

/// `A_{αβ̄} = f^i_α h_{iȷ̄} conj(f^j_β)`.
pub fn pullback_form(jac: &CMatrix, h: &CMatrix) -> CMatrix {
    jac.transpose() * h * jac.map(|z| z.conj())
}

/// Zeroes values below the rank threshold and clamps small negatives.
pub fn threshold_singular_values(values: &mut [f64]) -> Result<usize> {
    let largest = values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = RANK_RTOL * largest.max(RANK_FLOOR);
    let mut rank = 0;
    for v in values.iter_mut() {
        if *v < -NEGATIVE_SINGULAR_TOL * (1.0 + largest) {
            return Err(Error::Numerical(format!("pencil eigenvalue {v:e} is negative")));
        }
        if *v <= cutoff {
            *v = 0.0;
        } else {
            rank += 1;
        }
    }
    Ok(rank)
}

#[derive(Clone, Debug)]
pub struct MapPointData {
    pub point: Vec<C64>,
    pub image: Vec<C64>,
    pub g: CMatrix,
    pub h: CMatrix,
    /// `f^i_α`, `n × m`.
    pub pushforward: CMatrix,
    pub pullback: CMatrix,
    /// `|λ_1|² ≥ … ≥ |λ_m|²`, thresholded.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Columns `e_α`, `g`-unitary, `∂f(e_α) = λ_α ε_α`.
    pub domain_frame: CMatrix,
    /// Columns `ε_i`, `h`-unitary.
    pub target_frame: CMatrix,
    /// `λ_α ≥ 0` from the SVD of the normalized pushforward.
    pub lambdas: Vec<f64>,
}

impl MapPointData {
    pub fn volume_ratio(&self) -> f64 {
        self.singular_values.iter().product()
    }

    pub fn energy_density(&self) -> f64 {
        self.singular_values.iter().sum()
    }

    pub fn max_norm(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// `∂f` in the adapted frames: `ε^{-1} F e`, which is `diag(λ)` padded with zeros.
    pub fn adapted_pushforward(&self) -> Result<CMatrix> {
        Ok(inverse(&self.target_frame)? * &self.pushforward * &self.domain_frame)
    }
}

/// Completes orthonormal columns to a unitary matrix.
fn complete_unitary(cols: &[Vec<C64>], n: usize) -> CMatrix {
    let mut basis: Vec<Vec<C64>> = cols.to_vec();
    for j in 0..n {
        if basis.len() == n {
            break;
        }
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[j] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei -= proj * bi;
                }
            }
        }
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(e.into_iter().map(|z| z / norm).collect());
        }
    }
    CMatrix::from_fn(n, n, |i, j| basis[j][i])
}

pub fn map_point_data(f: &HoloMap, point: &[C64]) -> Result<MapPointData> {
    let (m, n) = (f.m(), f.n());
    let image = f.image(point)?;
    let jac = pushforward(f, point)?;
    let g = f.domain().metric_at(point)?;
    let h = f.target().metric_at(&image)?;
    let a = pullback_form(&jac, &h);
    let (mut values, _) = pencil_eigen(&a, &g)?;
    let rank = threshold_singular_values(&mut values)?;

    let pg = orthonormal_frame(&g)?;
    let ph = orthonormal_frame(&h)?;
    let ph_inv = inverse(&ph)?;
    let normalized = &ph_inv * &jac * &pg;
    let svd = normalized.clone().svd(true, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not return V".into()))?;
    let sv = svd.singular_values;
    let k = sv.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let v_full = v_t.adjoint();
    let mut vcols: Vec<Vec<C64>> = Vec::with_capacity(m);
    let mut lambdas = Vec::with_capacity(m);
    for &idx in &order {
        vcols.push(column(&v_full, idx));
        lambdas.push(sv[idx]);
    }
    // m > n: the thin SVD leaves a kernel to fill in
    let vmat = complete_unitary(&vcols, m);
    let mut vcols: Vec<Vec<C64>> = (0..m).map(|j| column(&vmat, j)).collect();
    lambdas.resize(m, 0.0);
    let top = lambdas.iter().cloned().fold(0.0f64, f64::max);
    let mut ucols: Vec<Vec<C64>> = Vec::new();
    for (j, v) in vcols.iter_mut().enumerate() {
        fix_phase(v, 1e-12);
        let s = lambdas[j];
        if s > (RANK_RTOL * (top * top).max(RANK_FLOOR)).sqrt() && ucols.len() < n {
            let fv: Vec<C64> = (0..n).map(|i| (0..m).map(|c| normalized[(i, c)] * v[c]).sum()).collect();
            ucols.push(fv.into_iter().map(|z| z / s).collect());
        } else {
            lambdas[j] = 0.0;
        }
    }
    let umat = complete_unitary(&ucols, n);
    let vmat = CMatrix::from_fn(m, m, |i, j| vcols[j][i]);
    Ok(MapPointData {
        point: point.to_vec(),
        image,
        domain_frame: &pg * vmat,
        target_frame: &ph * umat,
        g,
        h,
        pushforward: jac,
        pullback: a,
        singular_values: values,
        rank,
        lambdas,
    })
}

pub fn volume_ratio(f: &HoloMap, point: &[C64]) -> Result<f64> {
    if f.m() > f.n() {
        return Err(Error::config("volume ratio needs dim M <= dim N"));
    }
    Ok(map_point_data(f, point)?.volume_ratio())
}

pub fn energy_density(f: &HoloMap, point: &[C64]) -> Result<f64> {
    Ok(map_point_data(f, point)?.energy_density())
}

pub fn max_norm(f: &HoloMap, point: &[C64]) -> Result<f64> {
    Ok(map_point_data(f, point)?.max_norm())
}

/// Elementary symmetric polynomial of degree `k`.
pub fn sigma_k(values: &[f64], k: usize) -> Result<f64> {
    if k > values.len() {
        return Err(Error::config(format!("sigma_k needs k <= {}, got {k}", values.len())));
    }
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in values {
        for j in (1..=k).rev() {
            e[j] += e[j - 1] * x;
        }
    }
    Ok(e[k])
}

/// Covariant Hessian `f^i_{α,β}` of a holomorphic map.
#[derive(Clone, Debug)]
pub struct MapHessian {
    pub n: usize,
    pub m: usize,
    data: Vec<C64>,
}

impl MapHessian {
    pub fn get(&self, i: usize, a: usize, b: usize) -> C64 {
        self.data[(i * self.m + a) * self.m + b]
    }

    /// `Ddf(X, Y)^i = Σ f^i_{α,β} X^α Y^β`.
    pub fn apply(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..self.m {
                    for b in 0..self.m {
                        acc += self.get(i, a, b) * x[a] * y[b];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `f^i_{α,β} = ∂_α∂_β f^i − Γ^{M,γ}_{αβ} f^i_γ + Γ^{N,i}_{jk} f^j_α f^k_β`.
pub fn map_hessian(f: &HoloMap, point: &[C64]) -> Result<MapHessian> {
    let (m, n) = (f.m(), f.n());
    let jets = f.jets(point, 2)?;
    let image: Vec<C64> = jets.iter().map(|j| j.value()).collect();
    let jac = jacobian_of(&jets, m)?;
    let gm = christoffel(f.domain(), point)?;
    let gn = christoffel(f.target(), &image)?;
    let zero = vec![0; m];
    let mut data = vec![C64::new(0.0, 0.0); n * m * m];
    for i in 0..n {
        for a in 0..m {
            for b in 0..m {
                let mut d = vec![0; m];
                d[a] += 1;
                d[b] += 1;
                let mut acc = jets[i].derivative(&d, &zero)?;
                for c in 0..m {
                    acc -= gm[c][a][b] * jac[(i, c)];
                }
                for j in 0..n {
                    for k in 0..n {
                        acc += gn[i][j][k] * jac[(j, a)] * jac[(k, b)];
                    }
                }
                data[(i * m + a) * m + b] = acc;
            }
        }
    }
    Ok(MapHessian { n, m, data })
}

/// Jets of the domain metric, the pullback form and the map at a point.
#[derive(Clone, Debug)]
pub struct MapJets {
    pub g: JetMatrix,
    pub a: JetMatrix,
}

impl MapJets {
    /// `g^{αβ̄}` as jets, indexed like `g_inv` in `CurvaturePoint`.
    pub fn g_inv(&self) -> Result<JetMatrix> {
        let m = self.g.len();
        let gt: JetMatrix = (0..m).map(|a| (0..m).map(|b| self.g[b][a].clone()).collect()).collect();
        jet_inverse(&gt)
    }

    /// `‖∂f‖² = g^{αβ̄} A_{αβ̄}`.
    pub fn energy(&self) -> Result<WirtingerJet> {
        let gi = self.g_inv()?;
        let m = self.g.len();
        let mut acc = WirtingerJet::zero(m, self.g[0][0].order())?;
        for a in 0..m {
            for b in 0..m {
                acc += &(&gi[a][b] * &self.a[a][b]);
            }
        }
        Ok(acc)
    }

    /// `log D = log det A − log det g`.
    pub fn log_volume_ratio(&self) -> Result<WirtingerJet> {
        let da = crate::jet::jet_det(&self.a)?;
        let dg = crate::jet::jet_det(&self.g)?;
        Ok(da.ln()? - dg.ln()?)
    }

    /// `W = g^{1β̄} A_{αβ̄} g^{α1̄} / g^{11̄}`.
    pub fn barrier(&self) -> Result<WirtingerJet> {
        let gi = self.g_inv()?;
        let m = self.g.len();
        let mut acc = WirtingerJet::zero(m, self.g[0][0].order())?;
        for a in 0..m {
            for b in 0..m {
                acc += &(&(&gi[0][b] * &self.a[a][b]) * &gi[a][0]);
            }
        }
        acc.div(&gi[0][0])
    }
}

/// Metric and pullback-form jets of order `order` at `point`, using the map jets of
/// order `order + 1`.
pub fn map_jets(f: &HoloMap, point: &[C64], order: usize) -> Result<MapJets> {
    let m = f.m();
    let fj = f.jets(point, order + 1)?;
    let g = f.domain().metric_jets_at(point, order)?;
    let fj_low = fj.iter().map(|j| j.truncate(order)).collect::<Result<Vec<_>>>()?;
    let h = f.target().metric_jets_on(&fj_low)?;
    let df: Vec<Vec<WirtingerJet>> = fj
        .iter()
        .map(|j| (0..m).map(|a| j.partial_z(a)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let df_bar: Vec<Vec<WirtingerJet>> = df.iter().map(|row| row.iter().map(|j| j.conj()).collect()).collect();
    let n = f.n();
    let mut a = Vec::with_capacity(m);
    for al in 0..m {
        let mut row = Vec::with_capacity(m);
        for be in 0..m {
            let mut acc = WirtingerJet::zero(m, order)?;
            for i in 0..n {
                for j in 0..n {
                    acc += &(&(&df[i][al] * &h[i][j]) * &df_bar[j][be]);
                }
            }
            row.push(acc);
        }
        a.push(row);
    }
    Ok(MapJets { g, a })
}

/// The barrier `W` anchored at a point: a domain normal chart whose first axis is the
/// top singular direction of `∂f` there.
#[derive(Clone, Debug)]
pub struct AnchoredBarrier {
    pub anchor: MapPointData,
    pub coords: NormalCoordinates,
    /// `f` in the anchored normal coordinates.
    pub map: HoloMap,
}

impl AnchoredBarrier {
    pub fn new(f: &HoloMap, anchor: &[C64]) -> Result<Self> {
        let data = map_point_data(f, anchor)?;
        if data.rank == 0 {
            return Err(Error::Rank("∂f vanishes at the anchor".into()));
        }
        let pg = orthonormal_frame(&data.g)?;
        // domain_frame = P_g V, so V = P_g^{-1} domain_frame
        let v = inverse(&pg)? * &data.domain_frame;
        let (chart, coords) = normal_chart_with_frame(f.domain(), anchor, Some(&v))?;
        let map = f.precompose(&coords.coords, Arc::new(chart))?;
        Ok(AnchoredBarrier { anchor: data, coords, map })
    }

    /// `W` at the normal-chart point `w`.
    pub fn value(&self, w: &[C64]) -> Result<f64> {
        Ok(map_jets(&self.map, w, 1)?.barrier()?.value().re)
    }

    /// `max_norm` at the normal-chart point `w` (a coordinate-free quantity).
    pub fn max_norm(&self, w: &[C64]) -> Result<f64> {
        max_norm(&self.map, w)
    }
}

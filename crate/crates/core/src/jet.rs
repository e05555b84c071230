//! Truncated Taylor arithmetic in the Wirtinger variables.
//!
//! A [`WirtingerJet`] carries every mixed partial of a function `F(z, z̄)` up to a
//! fixed total order at one base point. `z¹..zᵐ` and `z̄¹..z̄ᵐ` are independent
//! formal variables, so a jet over `m` complex variables is a polynomial in `2m`
//! variables. The coefficient stored for the multi-index pair `(a, b)` is
//! `(1/a!b!) ∂^{|a|+|b|}F/∂z^a∂z̄^b`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Largest supported complex dimension.
pub const MAX_VARS: usize = 4;
/// Order used when nothing else is requested.
pub const DEFAULT_ORDER: usize = 4;
/// `|constant term|` below which division and log refuse to proceed.
pub const SINGULAR_FLOOR: f64 = 1e-12;

type Exponent = [u8; 2 * MAX_VARS];

/// Monomial layout shared by every jet with the same `(num_vars, order)`.
#[derive(Debug)]
struct Shape {
    num_vars: usize,
    order: usize,
    exps: Vec<Exponent>,
    degree: Vec<usize>,
    lookup: HashMap<Exponent, usize>,
    // (i, j, k): monomial i times monomial j is monomial k
    products: Vec<(u32, u32, u32)>,
    conj_perm: Vec<usize>,
}

impl Shape {
    fn build(num_vars: usize, order: usize) -> Shape {
        let nv = 2 * num_vars;
        let mut exps: Vec<Exponent> = Vec::new();
        for deg in 0..=order {
            let mut cur = [0u8; 2 * MAX_VARS];
            enumerate_degree(nv, deg, 0, &mut cur, &mut exps);
        }
        let degree: Vec<usize> = exps.iter().map(|e| e.iter().map(|&x| x as usize).sum()).collect();
        let lookup: HashMap<Exponent, usize> = exps.iter().enumerate().map(|(i, e)| (*e, i)).collect();

        let mut products = Vec::new();
        for (i, ei) in exps.iter().enumerate() {
            for (j, ej) in exps.iter().enumerate() {
                if degree[i] + degree[j] > order {
                    continue;
                }
                let mut ek = [0u8; 2 * MAX_VARS];
                for v in 0..nv {
                    ek[v] = ei[v] + ej[v];
                }
                products.push((i as u32, j as u32, lookup[&ek] as u32));
            }
        }

        let conj_perm = exps
            .iter()
            .map(|e| {
                let mut s = [0u8; 2 * MAX_VARS];
                for v in 0..num_vars {
                    s[v] = e[num_vars + v];
                    s[num_vars + v] = e[v];
                }
                lookup[&s]
            })
            .collect();

        Shape { num_vars, order, exps, degree, lookup, products, conj_perm }
    }

    fn len(&self) -> usize {
        self.exps.len()
    }
}

// Graded order: within one degree, earlier variables get the larger exponent first.
fn enumerate_degree(nv: usize, remaining: usize, var: usize, cur: &mut Exponent, out: &mut Vec<Exponent>) {
    if var + 1 == nv {
        cur[var] = remaining as u8;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for take in (0..=remaining).rev() {
        cur[var] = take as u8;
        enumerate_degree(nv, remaining - take, var + 1, cur, out);
    }
    cur[var] = 0;
}

fn shape(num_vars: usize, order: usize) -> Arc<Shape> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Shape>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|p| p.into_inner());
    guard
        .entry((num_vars, order))
        .or_insert_with(|| Arc::new(Shape::build(num_vars, order)))
        .clone()
}

fn check_config(num_vars: usize, order: usize) -> Result<()> {
    if num_vars == 0 || num_vars > MAX_VARS {
        return Err(Error::config(format!(
            "jets support 1..={MAX_VARS} complex variables, got {num_vars}"
        )));
    }
    if order > 12 {
        return Err(Error::config(format!("jet order {order} is unreasonably large")));
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Truncated multivariate Taylor polynomial in `(z, z̄)`.
#[derive(Clone)]
pub struct WirtingerJet {
    shape: Arc<Shape>,
    coeffs: Vec<C64>,
}

impl fmt::Debug for WirtingerJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (e, c) in self.shape.exps.iter().zip(&self.coeffs) {
            if *c != C64::new(0.0, 0.0) {
                let m = self.shape.num_vars;
                map.entry(&(&e[..m], &e[m..2 * m]), c);
            }
        }
        map.finish()
    }
}

impl PartialEq for WirtingerJet {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars() == other.num_vars() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl WirtingerJet {
    pub fn zero(num_vars: usize, order: usize) -> Result<Self> {
        check_config(num_vars, order)?;
        let shape = shape(num_vars, order);
        let coeffs = vec![C64::new(0.0, 0.0); shape.len()];
        Ok(WirtingerJet { shape, coeffs })
    }

    pub fn constant(value: C64, num_vars: usize, order: usize) -> Result<Self> {
        let mut j = Self::zero(num_vars, order)?;
        j.coeffs[0] = value;
        Ok(j)
    }

    /// Jet of the coordinate function `z^index` at a point whose `index`-th
    /// coordinate is `base`.
    pub fn variable(index: usize, base: C64, num_vars: usize, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::config("coordinate jets need order >= 1"));
        }
        if index >= num_vars {
            return Err(Error::config(format!(
                "variable index {index} out of range for {num_vars} variables"
            )));
        }
        let mut j = Self::constant(base, num_vars, order)?;
        let mut e = [0u8; 2 * MAX_VARS];
        e[index] = 1;
        let k = j.shape.lookup[&e];
        j.coeffs[k] = C64::new(1.0, 0.0);
        Ok(j)
    }

    /// Coordinate jets `z¹..zᵐ` based at `point`.
    pub fn coordinates(point: &[C64], order: usize) -> Result<Vec<Self>> {
        (0..point.len())
            .map(|k| Self::variable(k, point[k], point.len(), order))
            .collect()
    }

    pub fn num_vars(&self) -> usize {
        self.shape.num_vars
    }

    pub fn order(&self) -> usize {
        self.shape.order
    }

    pub fn value(&self) -> C64 {
        self.coeffs[0]
    }

    fn same_shape(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.shape, &other.shape)
    }

    fn like(&self, value: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.shape.len()];
        coeffs[0] = value;
        WirtingerJet { shape: self.shape.clone(), coeffs }
    }

    fn exponent(&self, a: &[usize], b: &[usize]) -> Result<Exponent> {
        let m = self.num_vars();
        if a.len() != m || b.len() != m {
            return Err(Error::config(format!(
                "multi-indices must have length {m}, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let requested: usize = a.iter().chain(b).sum();
        if requested > self.order() {
            return Err(Error::OutOfOrder { requested, order: self.order() });
        }
        let mut e = [0u8; 2 * MAX_VARS];
        for v in 0..m {
            e[v] = a[v] as u8;
            e[m + v] = b[v] as u8;
        }
        Ok(e)
    }

    /// Raw Taylor coefficient at the multi-index pair `(a, b)`.
    pub fn coeff(&self, a: &[usize], b: &[usize]) -> Result<C64> {
        let e = self.exponent(a, b)?;
        Ok(self.coeffs[self.shape.lookup[&e]])
    }

    pub fn set_coeff(&mut self, a: &[usize], b: &[usize], value: C64) -> Result<()> {
        let e = self.exponent(a, b)?;
        let k = self.shape.lookup[&e];
        self.coeffs[k] = value;
        Ok(())
    }

    /// Iterates `(a, b, coefficient)` over the nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Vec<usize>, C64)> + '_ {
        let m = self.num_vars();
        self.shape.exps.iter().zip(&self.coeffs).filter(|(_, c)| c.norm() != 0.0).map(move |(e, c)| {
            let a = e[..m].iter().map(|&x| x as usize).collect();
            let b = e[m..2 * m].iter().map(|&x| x as usize).collect();
            (a, b, *c)
        })
    }

    /// `∂^{|a|+|b|}F/∂z^a∂z̄^b` at the base point.
    pub fn derivative(&self, a: &[usize], b: &[usize]) -> Result<C64> {
        let c = self.coeff(a, b)?;
        let scale: f64 = a.iter().chain(b).map(|&k| factorial(k)).product();
        Ok(c * scale)
    }

    /// Largest modulus among coefficients with a nonzero antiholomorphic part.
    pub fn antiholomorphic_residual(&self) -> f64 {
        let m = self.num_vars();
        self.shape
            .exps
            .iter()
            .zip(&self.coeffs)
            .filter(|(e, _)| e[m..2 * m].iter().any(|&x| x > 0))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Complex conjugate: coefficient `(a, b)` becomes `conj` of coefficient `(b, a)`.
    pub fn conj(&self) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[self.shape.conj_perm[k]] = c.conj();
        }
        WirtingerJet { shape: self.shape.clone(), coeffs }
    }

    /// Drops every term above `order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order >= self.order() {
            return Ok(self.clone());
        }
        let mut out = Self::zero(self.num_vars(), order)?;
        for (k, e) in out.shape.clone().exps.iter().enumerate() {
            out.coeffs[k] = self.coeffs[self.shape.lookup[e]];
        }
        Ok(out)
    }

    fn partial_var(&self, var: usize) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::OutOfOrder { requested: 1, order: 0 });
        }
        let mut out = Self::zero(self.num_vars(), self.order() - 1)?;
        let lower = out.shape.clone();
        for (k, e) in lower.exps.iter().enumerate() {
            let mut up = *e;
            up[var] += 1;
            out.coeffs[k] = self.coeffs[self.shape.lookup[&up]] * f64::from(up[var]);
        }
        Ok(out)
    }

    /// Jet of `∂F/∂z^k`, one order lower.
    pub fn partial_z(&self, k: usize) -> Result<Self> {
        self.check_var(k)?;
        self.partial_var(k)
    }

    /// Jet of `∂F/∂z̄^k`, one order lower.
    pub fn partial_zbar(&self, k: usize) -> Result<Self> {
        self.check_var(k)?;
        self.partial_var(self.num_vars() + k)
    }

    fn check_var(&self, k: usize) -> Result<()> {
        if k >= self.num_vars() {
            return Err(Error::config(format!("variable {k} out of range")));
        }
        Ok(())
    }

    /// `∂F/∂z^γ` at the base point.
    pub fn gradient(&self) -> Result<Vec<C64>> {
        let m = self.num_vars();
        (0..m)
            .map(|g| {
                let mut a = vec![0; m];
                a[g] = 1;
                self.derivative(&a, &vec![0; m])
            })
            .collect()
    }

    /// Matrix of `∂²F/∂z^γ∂z̄^δ` at the base point, indexed `(γ, δ)`.
    pub fn complex_hessian(&self) -> Result<DMatrix<C64>> {
        let m = self.num_vars();
        let mut h = DMatrix::zeros(m, m);
        for g in 0..m {
            for d in 0..m {
                let mut a = vec![0; m];
                let mut b = vec![0; m];
                a[g] = 1;
                b[d] = 1;
                h[(g, d)] = self.derivative(&a, &b)?;
            }
        }
        Ok(h)
    }

    /// `Σ v^γ conj(v^δ) ∂²F/∂z^γ∂z̄^δ`.
    pub fn levi_form(&self, v: &[C64]) -> Result<C64> {
        let h = self.complex_hessian()?;
        let m = self.num_vars();
        if v.len() != m {
            return Err(Error::config("direction has wrong dimension"));
        }
        let mut acc = C64::new(0.0, 0.0);
        for g in 0..m {
            for d in 0..m {
                acc += v[g] * v[d].conj() * h[(g, d)];
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, s: C64) -> Self {
        WirtingerJet { shape: self.shape.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add_scalar(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    fn assert_same(&self, other: &Self) {
        assert!(
            self.same_shape(other),
            "jet shape mismatch: ({}, {}) vs ({}, {})",
            self.num_vars(),
            self.order(),
            other.num_vars(),
            other.order()
        );
    }

    fn mul_jet(&self, other: &Self) -> Self {
        self.assert_same(other);
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        for &(i, j, k) in &self.shape.products {
            let a = self.coeffs[i as usize];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            coeffs[k as usize] += a * other.coeffs[j as usize];
        }
        WirtingerJet { shape: self.shape.clone(), coeffs }
    }

    // Σ_k series[k] (F − F(0))^k, truncated.
    fn compose_series(&self, series: &[C64]) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = C64::new(0.0, 0.0);
        let mut out = self.like(series[0]);
        let mut power = self.like(C64::new(1.0, 0.0));
        for s in series.iter().skip(1) {
            power = power.mul_jet(&h);
            if *s != C64::new(0.0, 0.0) {
                for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                    *o += s * p;
                }
            }
        }
        out
    }

    fn check_nonsingular(&self) -> Result<C64> {
        let c0 = self.value();
        if c0.norm() <= SINGULAR_FLOOR {
            return Err(Error::SingularJet(c0.norm()));
        }
        Ok(c0)
    }

    pub fn recip(&self) -> Result<Self> {
        let c0 = self.check_nonsingular()?;
        let inv = c0.inv();
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut t = inv;
        for _ in 0..=self.order() {
            series.push(t);
            t *= -inv;
        }
        Ok(self.compose_series(&series))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_jet(&other.recip()?))
    }

    pub fn exp(&self) -> Self {
        let e0 = self.value().exp();
        let series: Vec<C64> = (0..=self.order()).map(|k| e0 / factorial(k)).collect();
        self.compose_series(&series)
    }

    /// Principal-branch logarithm.
    pub fn ln(&self) -> Result<Self> {
        let c0 = self.check_nonsingular()?;
        let inv = c0.inv();
        let mut series = vec![c0.ln()];
        let mut t = inv;
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(t * (sign / k as f64));
            t *= inv;
        }
        Ok(self.compose_series(&series))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut result = self.like(C64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_jet(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_jet(&base);
            }
        }
        result
    }

    /// Largest coefficient difference against another jet of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.assert_same(other);
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Degree of each stored coefficient, in storage order.
    pub fn degrees(&self) -> &[usize] {
        &self.shape.degree
    }

    pub fn raw_coeffs(&self) -> &[C64] {
        &self.coeffs
    }
}

impl Add for &WirtingerJet {
    type Output = WirtingerJet;
    fn add(self, rhs: &WirtingerJet) -> WirtingerJet {
        self.assert_same(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        WirtingerJet { shape: self.shape.clone(), coeffs }
    }
}

impl Add for WirtingerJet {
    type Output = WirtingerJet;
    fn add(self, rhs: WirtingerJet) -> WirtingerJet {
        &self + &rhs
    }
}

impl AddAssign<&WirtingerJet> for WirtingerJet {
    fn add_assign(&mut self, rhs: &WirtingerJet) {
        self.assert_same(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &WirtingerJet {
    type Output = WirtingerJet;
    fn sub(self, rhs: &WirtingerJet) -> WirtingerJet {
        self.assert_same(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        WirtingerJet { shape: self.shape.clone(), coeffs }
    }
}

impl Sub for WirtingerJet {
    type Output = WirtingerJet;
    fn sub(self, rhs: WirtingerJet) -> WirtingerJet {
        &self - &rhs
    }
}

impl Mul for &WirtingerJet {
    type Output = WirtingerJet;
    fn mul(self, rhs: &WirtingerJet) -> WirtingerJet {
        self.mul_jet(rhs)
    }
}

impl Mul for WirtingerJet {
    type Output = WirtingerJet;
    fn mul(self, rhs: WirtingerJet) -> WirtingerJet {
        self.mul_jet(&rhs)
    }
}

impl Neg for &WirtingerJet {
    type Output = WirtingerJet;
    fn neg(self) -> WirtingerJet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Neg for WirtingerJet {
    type Output = WirtingerJet;
    fn neg(self) -> WirtingerJet {
        -&self
    }
}

/// Square matrix of jets, used for metric and pullback-form fields.
pub type JetMatrix = Vec<Vec<WirtingerJet>>;

/// Determinant by elimination, pivoting on the largest constant term.
pub fn jet_det(mat: &JetMatrix) -> Result<WirtingerJet> {
    let n = mat.len();
    if n == 0 {
        return Err(Error::config("empty jet matrix"));
    }
    let mut a = mat.clone();
    let mut det = a[0][0].like(C64::new(1.0, 0.0));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].value().norm().total_cmp(&a[j][col].value().norm()))
            .unwrap_or(col);
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let inv = a[col][col].recip()?;
        det = &det * &a[col][col];
        for row in col + 1..n {
            let factor = &a[row][col] * &inv;
            for k in col..n {
                let t = &factor * &a[col][k];
                a[row][k] = &a[row][k] - &t;
            }
        }
    }
    Ok(det)
}

/// Matrix inverse by Gauss–Jordan elimination.
pub fn jet_inverse(mat: &JetMatrix) -> Result<JetMatrix> {
    let n = mat.len();
    if n == 0 {
        return Err(Error::config("empty jet matrix"));
    }
    let one = mat[0][0].like(C64::new(1.0, 0.0));
    let zero = mat[0][0].like(C64::new(0.0, 0.0));
    let mut a = mat.clone();
    let mut inv: JetMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].value().norm().total_cmp(&a[j][col].value().norm()))
            .unwrap_or(col);
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col].recip()?;
        for k in 0..n {
            a[col][k] = &a[col][k] * &p;
            inv[col][k] = &inv[col][k] * &p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            for k in 0..n {
                let t = &factor * &a[col][k];
                a[row][k] = &a[row][k] - &t;
                let t = &factor * &inv[col][k];
                inv[row][k] = &inv[row][k] - &t;
            }
        }
    }
    Ok(inv)
}

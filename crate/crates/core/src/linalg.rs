//! Small dense Hermitian linear algebra on top of nalgebra.
//!
//! Hermitian forms follow the index convention `B(u, w̄) = Σ u^a B_{ab̄} conj(w^b)`,
//! i.e. `u^T B conj(w)`. Substituting `x = conj(u)` turns this into the usual
//! `x^H B x`, which is what the eigen-solvers below work with.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, C64};

pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `Σ u^a B_{ab̄} conj(w^b)`.
pub fn form(b: &CMatrix, u: &[C64], w: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            acc += u[i] * b[(i, j)] * w[j].conj();
        }
    }
    acc
}

pub fn norm_sq(g: &CMatrix, u: &[C64]) -> f64 {
    form(g, u, u).re
}

pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

pub fn column(m: &CMatrix, j: usize) -> Vec<C64> {
    m.column(j).iter().copied().collect()
}

/// `max |B_{ab} − conj(B_{ba})|`.
pub fn hermitian_residual(b: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            worst = worst.max((b[(i, j)] - b[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(b: &CMatrix) -> CMatrix {
    (b + b.adjoint()) * c(0.5, 0.0)
}

/// Eigenvalues (ascending) and unit eigenvectors `x` (columns) of `x^H B x`.
pub fn hermitian_eigen(b: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = b.nrows();
    let eig = hermitian_part(b).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(b: &CMatrix) -> Vec<f64> {
    hermitian_eigen(b).0
}

/// Lower-triangular `L` with `M = L L^H`.
pub fn cholesky(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .cholesky()
        .map(|ch| ch.l())
        .ok_or_else(|| Error::MetricValidity("matrix is not positive definite".into()))
}

/// Columns `P_j` with `P_j^T G conj(P_k) = δ_jk`: a `G`-unitary basis of tangent vectors.
pub fn orthonormal_frame(g: &CMatrix) -> Result<CMatrix> {
    let l = cholesky(&g.map(|z| z.conj()))?;
    let l_inv = l
        .try_inverse()
        .ok_or_else(|| Error::MetricValidity("metric Cholesky factor is singular".into()))?;
    Ok(l_inv.adjoint())
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone().try_inverse().ok_or_else(|| Error::Numerical("singular matrix".into()))
}

/// Generalized eigenpairs of the Hermitian-definite pencil `(A, G)` in the form
/// convention above: values descending, tangent vectors `u` (columns) normalized
/// so that `u^T G conj(u) = 1`.
pub fn pencil_eigen(a: &CMatrix, g: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = g.nrows();
    if a.nrows() != n || a.ncols() != n || g.ncols() != n {
        return Err(Error::config("pencil matrices must be square and of equal size"));
    }
    // x = conj(u): A(u,ū) = x^H A x.  G = L L^H, y = L^H x.
    let l = cholesky(g)?;
    let l_inv = l
        .try_inverse()
        .ok_or_else(|| Error::Numerical("pencil Cholesky factor is singular".into()))?;
    let reduced = &l_inv * a * l_inv.adjoint();
    let (vals, ys) = hermitian_eigen(&reduced);
    let xs = l_inv.adjoint() * ys;
    let mut values = Vec::with_capacity(n);
    let mut us = CMatrix::zeros(n, n);
    for (dst, src) in (0..n).rev().enumerate() {
        values.push(vals[src]);
        us.set_column(dst, &xs.column(src).map(|z| z.conj()));
    }
    Ok((values, us))
}

pub fn pencil_eigenvalues(a: &CMatrix, g: &CMatrix) -> Result<Vec<f64>> {
    Ok(pencil_eigen(a, g)?.0)
}

/// Makes the first entry with modulus above `floor` real and positive.
pub fn fix_phase(v: &mut [C64], floor: f64) -> C64 {
    if let Some(z) = v.iter().find(|z| z.norm() > floor).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
        phase
    } else {
        c(1.0, 0.0)
    }
}

/// Haar-distributed unitary matrix from the QR factorization of a complex Gaussian.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Uniform point on the unit sphere of `C^n` from a normalized complex Gaussian.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                c(re, im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_is_orthonormal() {
        let g = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(1.5, 0.0)]);
        let p = orthonormal_frame(&g).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                let v = form(&g, &column(&p, j), &column(&p, k));
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((v - c(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pencil_matches_rayleigh_quotients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = haar_unitary(3, &mut rng);
        let a = &b * CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)])) * b.adjoint();
        let g = CMatrix::from_row_slice(
            3,
            3,
            &[c(2.0, 0.0), c(0.1, 0.2), c(0.0, 0.0), c(0.1, -0.2), c(1.0, 0.0), c(0.0, 0.1), c(0.0, 0.0), c(0.0, -0.1), c(1.5, 0.0)],
        );
        let (vals, us) = pencil_eigen(&a, &g).unwrap();
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
        for k in 0..3 {
            let u = column(&us, k);
            assert!((norm_sq(&g, &u) - 1.0).abs() < 1e-12);
            assert!((form(&a, &u, &u).re - vals[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = haar_unitary(4, &mut rng);
        let err = (q.adjoint() * &q - CMatrix::identity(4, 4)).norm();
        assert!(err < 1e-13);
    }
}

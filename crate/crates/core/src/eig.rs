//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, plus the
//! spectral norms built on it.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::tol;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V diag(f(lambda)) V^dagger`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled.matmul(&self.vectors.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    hermitian_eig_with_tol(h, tol::HERM)
}

/// Cyclic Jacobi. Each rotation first rephases the pivot so that `a_pq` is
/// real and then applies a real Givens rotation; sweeps continue until the
/// off-diagonal Hilbert-Schmidt norm is at most `1e-12 ||H||`.
pub fn hermitian_eig_with_tol(h: &ComplexMatrix, herm_tol: f64) -> Result<HermitianEig> {
    let n = h.require_square()?;
    let scale = h.hs_norm();
    let dev = h.hermiticity_deviation();
    if dev > herm_tol * scale.max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    // Work on the exactly Hermitian part.
    let mut a = (h + &h.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);
    let target = 1e-12 * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &v.column(old));
    }
    Ok(HermitianEig { values, vectors })
}

pub fn eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(h)?.values)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;
    let n = a.rows();

    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    // A <- J^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// Singular values (descending) as square roots of the eigenvalues of
/// `M^dagger M`, with negative round-off clamped to zero.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let gram = if m.rows() <= m.cols() { m.matmul(&m.adjoint()) } else { m.adjoint().matmul(m) };
    let mut values: Vec<f64> = eigenvalues(&gram)
        .expect("Gram matrix is Hermitian")
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    values.reverse();
    values
}

/// Sum of singular values. Hermitian input goes through the eigenvalues
/// directly, which avoids squaring the conditioning.
pub fn schatten_1_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.is_square() && m.is_hermitian(tol::HERM * m.hs_norm().max(1.0)) {
        return Ok(eigenvalues(m)?.iter().map(|x| x.abs()).sum());
    }
    Ok(singular_values(m).iter().sum())
}

pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.hs_norm()
}

/// `tau^alpha` for positive semidefinite `tau`.
pub fn psd_power(tau: &ComplexMatrix, alpha: f64) -> Result<ComplexMatrix> {
    if alpha.fract() == 0.0 && (0.0..=64.0).contains(&alpha) {
        return Ok(tau.powi(alpha as u32));
    }
    let eig = hermitian_eig(tau)?;
    if let Some(&min) = eig.values.first() {
        if min < -tol::PSD {
            return Err(Error::InvalidInput(format!("fractional power of a matrix with eigenvalue {min:e}")));
        }
    }
    Ok(eig.reconstruct_with(|x| if x <= 0.0 { 0.0 } else { x.powf(alpha) }))
}

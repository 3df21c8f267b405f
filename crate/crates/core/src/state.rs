//! Kets, density matrices and bipartite bookkeeping.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eig::{eigenvalues, singular_values};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::rng::sample_rng;
use crate::tol;

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tol(amplitudes, tol::NORM)
    }

    pub fn with_tol(amplitudes: Vec<C64>, norm_tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("ket of dimension 0"));
        }
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > norm_tol {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Ket { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(Ket { amplitudes: amplitudes.into_iter().map(|z| z / n).collect() })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ket { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes) }
    }

    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// The `dim_a x dim_b` coefficient matrix `Psi[a][b]`.
    pub fn coefficient_matrix(&self, shape: BipartiteShape) -> Result<ComplexMatrix> {
        shape.check(self.dim())?;
        ComplexMatrix::from_vec(shape.dim_a, shape.dim_b, self.amplitudes.clone())
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.matrix
    }
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tol(matrix, &tol::Tolerances::default())
    }

    pub fn with_tol(matrix: ComplexMatrix, tols: &tol::Tolerances) -> Result<Self> {
        let n = matrix.require_square()?;
        if n == 0 {
            return Err(Error::InvalidState("dimension 0".into()));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > tols.herm {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tols.norm || tr.im.abs() > tols.norm {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = eigenvalues(&matrix)?[0];
        if min < -tols.psd {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Wraps a matrix known to be a state by construction (partial traces,
    /// conjugation by isometries). Hermitian symmetrization is applied.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let matrix = (&matrix + &matrix.adjoint()).scale_real(0.5);
        DensityMatrix { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn transpose(&self) -> DensityMatrix {
        DensityMatrix { matrix: self.matrix.transpose() }
    }

    pub fn purity(&self) -> f64 {
        self.matrix.hs_inner(&self.matrix).re
    }

    /// Real with respect to the computational basis, within `tol` on the
    /// largest imaginary part.
    pub fn is_real(&self, tol: f64) -> bool {
        self.matrix.as_slice().iter().all(|z| z.im.abs() <= tol)
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// Spectrum, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        eigenvalues(&self.matrix).expect("density matrices are Hermitian")
    }

    /// Dominant eigenvector; for pure states this recovers the ket up to a
    /// global phase.
    pub fn principal_ket(&self) -> Ket {
        let eig = crate::eig::hermitian_eig(&self.matrix).expect("density matrices are Hermitian");
        let v = eig.vectors.column(self.dim() - 1);
        Ket::normalized(v).expect("eigenvectors are unit vectors")
    }

    pub fn hs_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix).hs_norm()
    }

    /// `rho - rho^T`
    pub fn antisymmetric_part(&self) -> ComplexMatrix {
        &self.matrix - &self.matrix.transpose()
    }

    /// `U rho U^dagger` for an isometry `U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: u.cols() });
        }
        Ok(DensityMatrix::from_trusted(u.matmul(&self.matrix).matmul(&u.adjoint())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteShape {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteShape {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::invalid("bipartite dimensions must be at least 1"));
        }
        Ok(BipartiteShape { dim_a, dim_b })
    }

    pub fn square(m: usize) -> Result<Self> {
        Self::new(m, m)
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    fn check(&self, dim: usize) -> Result<()> {
        if dim != self.total() {
            return Err(Error::DimensionMismatch { expected: self.total(), actual: dim });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced density matrix on `keep`, with the composite index
/// `a * dim_b + b`.
pub fn partial_trace(rho: &DensityMatrix, shape: BipartiteShape, keep: Subsystem) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_trusted(partial_trace_matrix(rho.matrix(), shape, keep)?))
}

pub fn partial_trace_matrix(m: &ComplexMatrix, shape: BipartiteShape, keep: Subsystem) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    shape.check(n)?;
    let (da, db) = (shape.dim_a, shape.dim_b);
    let out = match keep {
        Subsystem::A => {
            let mut r = ComplexMatrix::zeros(da, da);
            for a in 0..da {
                for a2 in 0..da {
                    r[(a, a2)] = (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum();
                }
            }
            r
        }
        Subsystem::B => {
            let mut r = ComplexMatrix::zeros(db, db);
            for b in 0..db {
                for b2 in 0..db {
                    r[(b, b2)] = (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum();
                }
            }
            r
        }
    };
    Ok(out)
}

/// Both marginals of a pure bipartite state from its coefficient matrix:
/// `rho_A = Psi Psi^dagger`, `rho_B = Psi^T conj(Psi)`.
pub fn pure_marginals(psi: &Ket, shape: BipartiteShape) -> Result<(DensityMatrix, DensityMatrix)> {
    let c = psi.coefficient_matrix(shape)?;
    let a = c.matmul(&c.adjoint());
    let b = c.transpose().matmul(&c.conj());
    Ok((DensityMatrix::from_trusted(a), DensityMatrix::from_trusted(b)))
}

/// Schmidt coefficients in descending order.
pub fn schmidt_coefficients(psi: &Ket, shape: BipartiteShape) -> Result<Vec<f64>> {
    let c = psi.coefficient_matrix(shape)?;
    Ok(singular_values(&c))
}

/// True iff `p` majorizes `q`: every partial sum of `p` sorted descending is
/// at least the matching partial sum of `q`, within `tol`. The shorter list is
/// padded with zeros.
pub fn majorizes(p: &[f64], q: &[f64], tol: f64) -> Result<bool> {
    let clean = |v: &[f64]| -> Result<Vec<f64>> {
        if let Some(&x) = v.iter().find(|&&x| x < -tol || !x.is_finite()) {
            return Err(Error::invalid(format!("majorization needs nonnegative entries, got {x}")));
        }
        let mut out: Vec<f64> = v.iter().map(|&x| x.max(0.0)).collect();
        out.sort_by(|a, b| b.total_cmp(a));
        Ok(out)
    };
    let (mut p, mut q) = (clean(p)?, clean(q)?);
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if (sp - sq).abs() > tol::NORM.max(tol) {
        return Err(Error::invalid(format!("majorization needs equal sums, got {sp} and {sq}")));
    }
    let n = p.len().max(q.len());
    p.resize(n, 0.0);
    q.resize(n, 0.0);
    let (mut acc_p, mut acc_q) = (0.0, 0.0);
    for k in 0..n {
        acc_p += p[k];
        acc_q += q[k];
        if acc_p < acc_q - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    PureComplex,
    PureReal,
    MixedComplex,
    MixedReal,
}

/// Haar-random pure kets (Gaussian amplitudes, normalized).
pub fn random_ket(dim: usize, real: bool, seed: u64, index: u64) -> Ket {
    let mut rng = sample_rng(seed, index);
    let amps: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = if real { 0.0 } else { StandardNormal.sample(&mut rng) };
            C64::new(re, im)
        })
        .collect();
    Ket::normalized(amps).expect("Gaussian vectors are nonzero almost surely")
}

/// Seeded random state of the given kind. Mixed states are `G G^dagger / tr`
/// for a square Ginibre matrix `G` (real Ginibre for the real kind).
pub fn random_state(dim: usize, kind: StateKind, seed: u64) -> DensityMatrix {
    random_state_indexed(dim, kind, seed, 0)
}

pub fn random_state_indexed(dim: usize, kind: StateKind, seed: u64, index: u64) -> DensityMatrix {
    match kind {
        StateKind::PureComplex => random_ket(dim, false, seed, index).density(),
        StateKind::PureReal => random_ket(dim, true, seed, index).density(),
        StateKind::MixedComplex | StateKind::MixedReal => {
            let real = kind == StateKind::MixedReal;
            let mut rng = sample_rng(seed, index);
            let mut g = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = if real { 0.0 } else { StandardNormal.sample(&mut rng) };
                    g[(i, j)] = C64::new(re, im);
                }
            }
            let w = g.matmul(&g.adjoint());
            let tr = w.trace().re;
            let m = w.scale_real(1.0 / tr);
            if real {
                DensityMatrix { matrix: m.map(|z| C64::new(z.re, 0.0)) }
            } else {
                DensityMatrix::from_trusted(m)
            }
        }
    }
}

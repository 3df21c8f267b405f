//! Hurwitz-Radon families: anticommuting anti-Hermitian unitaries
//! `U_j U_k + U_k U_j = -2 delta_jk I`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eig::psd_power;
use crate::error::{Error, Result};
use crate::matrix::{pauli, tensor_all, tensor_product, ComplexMatrix, C64, I, ZERO};
use crate::rng::sample_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HrRepr", into = "HrRepr")]
pub struct HrSet {
    dim: usize,
    matrices: Vec<ComplexMatrix>,
    real_orthogonal: bool,
}

#[derive(Serialize, Deserialize)]
struct HrRepr {
    dim: usize,
    real_orthogonal: bool,
    matrices: Vec<ComplexMatrix>,
}

impl TryFrom<HrRepr> for HrSet {
    type Error = Error;

    fn try_from(r: HrRepr) -> Result<Self> {
        HrSet::new(r.dim, r.matrices, r.real_orthogonal)
    }
}

impl From<HrSet> for HrRepr {
    fn from(s: HrSet) -> Self {
        HrRepr { dim: s.dim, real_orthogonal: s.real_orthogonal, matrices: s.matrices }
    }
}

impl HrSet {
    /// Checks shapes and, when `real_orthogonal` is claimed, that every entry
    /// is real. The HR relations themselves are left to
    /// [`verify_hr_relations`].
    pub fn new(dim: usize, matrices: Vec<ComplexMatrix>, real_orthogonal: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("HR family of dimension 0"));
        }
        for m in &matrices {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: m.rows().max(m.cols()) });
            }
            if real_orthogonal && !m.is_real() {
                return Err(Error::invalid("family flagged real-orthogonal has complex entries"));
            }
        }
        Ok(HrSet { dim, matrices, real_orthogonal })
    }

    pub fn empty(dim: usize, real_orthogonal: bool) -> Self {
        HrSet { dim, matrices: Vec::new(), real_orthogonal }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn is_real_orthogonal(&self) -> bool {
        self.real_orthogonal
    }

    /// `U_j` with the convention `U_0 = I`.
    pub fn with_identity(&self, j: usize) -> ComplexMatrix {
        if j == 0 {
            ComplexMatrix::identity(self.dim)
        } else {
            self.matrices[j - 1].clone()
        }
    }

    /// The first `s` members.
    pub fn truncate(mut self, s: usize) -> Self {
        self.matrices.truncate(s);
        self
    }

    /// `U_j (x) I_k` for every member.
    pub fn pad(&self, k: usize) -> Result<HrSet> {
        if k == 1 {
            return Ok(self.clone());
        }
        let id = ComplexMatrix::identity(k);
        let matrices = self.matrices.iter().map(|u| tensor_product(u, &id)).collect::<Result<_>>()?;
        Ok(HrSet { dim: self.dim * k, matrices, real_orthogonal: self.real_orthogonal })
    }

    /// `U(c) = sum_j c_j U_j` over `{I} u set`.
    pub fn linear_combination(&self, c: &[C64]) -> Result<ComplexMatrix> {
        if c.len() != self.count() + 1 {
            return Err(Error::DimensionMismatch { expected: self.count() + 1, actual: c.len() });
        }
        let mut u = ComplexMatrix::identity(self.dim).scale(c[0]);
        for (cj, m) in c[1..].iter().zip(&self.matrices) {
            u = &u + &m.scale(*cj);
        }
        Ok(u)
    }
}

/// `{i sigma_x, i sigma_y, i sigma_z}`
pub fn pauli_hr() -> HrSet {
    HrSet { dim: 2, matrices: vec![pauli::ix(), pauli::iy(), pauli::iz()], real_orthogonal: false }
}

/// `U_j -> U_j (x) sigma_z`, then append `I (x) i sigma_x` and `I (x) i sigma_y`.
pub fn extend_by_doubling(base: &HrSet) -> Result<HrSet> {
    let id = ComplexMatrix::identity(base.dim);
    let z = pauli::z();
    let mut matrices = base.matrices.iter().map(|u| tensor_product(u, &z)).collect::<Result<Vec<_>>>()?;
    matrices.push(tensor_product(&id, &pauli::ix())?);
    matrices.push(tensor_product(&id, &pauli::iy())?);
    Ok(HrSet { dim: 2 * base.dim, matrices, real_orthogonal: false })
}

/// `r + s + 1` members in dimension `2 m1 m2`:
/// `U_j (x) I (x) sigma_z`, then `I (x) V_k (x) sigma_x`, then `I (x) I (x) i sigma_y`.
pub fn compose(u: &HrSet, v: &HrSet) -> Result<HrSet> {
    let (i1, i2) = (ComplexMatrix::identity(u.dim), ComplexMatrix::identity(v.dim));
    let (x, z) = (pauli::x(), pauli::z());
    let mut matrices = Vec::with_capacity(u.count() + v.count() + 1);
    for uj in &u.matrices {
        matrices.push(tensor_all(&[uj, &i2, &z])?);
    }
    for vk in &v.matrices {
        matrices.push(tensor_all(&[&i1, vk, &x])?);
    }
    matrices.push(tensor_all(&[&i1, &i2, &pauli::iy()])?);
    Ok(HrSet { dim: 2 * u.dim * v.dim, matrices, real_orthogonal: u.real_orthogonal && v.real_orthogonal })
}

/// Maximal real-orthogonal families in dimensions 2, 4 and 8 (1, 3 and 7 members).
pub fn real_orthogonal_base(dim: usize) -> Result<HrSet> {
    let (id, x, z, iy) = (pauli::id(), pauli::x(), pauli::z(), pauli::iy());
    let matrices = match dim {
        2 => vec![iy],
        4 => vec![tensor_product(&iy, &z)?, tensor_product(&iy, &x)?, tensor_product(&id, &iy)?],
        8 => vec![
            tensor_all(&[&x, &iy, &id])?,
            tensor_all(&[&x, &z, &iy])?,
            tensor_all(&[&x, &x, &iy])?,
            tensor_all(&[&iy, &id, &id])?,
            tensor_all(&[&z, &id, &iy])?,
            tensor_all(&[&z, &iy, &z])?,
            tensor_all(&[&z, &iy, &x])?,
        ],
        _ => return Err(Error::NotApplicable(format!("no real-orthogonal base family in dimension {dim}"))),
    };
    Ok(HrSet { dim, matrices: matrices.into_iter().map(strip_imaginary).collect(), real_orthogonal: true })
}

fn strip_imaginary(m: ComplexMatrix) -> ComplexMatrix {
    m.map(|z| C64::new(z.re, 0.0))
}

/// `kappa(d) = 2^floor((d-1)/2)`
pub fn kappa(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::invalid(format!("kappa needs d >= 2, got {d}")));
    }
    1usize.checked_shl(((d - 1) / 2) as u32).filter(|&k| k != 0).ok_or_else(|| Error::DimensionLimit {
        requested: usize::MAX,
        limit: crate::matrix::max_dimension(),
    })
}

/// `kappa(d)` when `d mod 8` is 0, 1 or 7, and `2 kappa(d)` otherwise.
pub fn kappa_real(d: usize) -> Result<usize> {
    let k = kappa(d)?;
    Ok(if matches!(d % 8, 0 | 1 | 7) { k } else { 2 * k })
}

/// `max(kappa(d), 2)`
pub fn kappa_tilde(d: usize) -> Result<usize> {
    Ok(kappa(d)?.max(2))
}

/// `s` traceless HR matrices in dimension `m`. Fails with
/// [`Error::Divisibility`] unless `m` is a multiple of `kappa(s + 1)`
/// (`kappa_real(s + 1)` for real families).
///
/// For `s = 1` over the complex field and even `m` the single member is
/// `diag(i I, -i I)`; for odd `m` it is `i I`, the only option.
pub fn build_hr(s: usize, m: usize, real: bool) -> Result<HrSet> {
    if m == 0 {
        return Err(Error::invalid("HR family of dimension 0"));
    }
    if s == 0 {
        return Ok(HrSet::empty(m, real));
    }
    let required = if real { kappa_real(s + 1)? } else { kappa(s + 1)? };
    if !m.is_multiple_of(required) {
        return Err(Error::Divisibility { dim: m, required });
    }
    if required > crate::matrix::max_dimension() {
        return Err(Error::DimensionLimit { requested: required, limit: crate::matrix::max_dimension() });
    }
    if !real && s == 1 {
        let mut diag = vec![I; m];
        if m.is_multiple_of(2) {
            for z in &mut diag[m / 2..] {
                *z = -I;
            }
        }
        return Ok(HrSet { dim: m, matrices: vec![ComplexMatrix::diagonal(&diag)], real_orthogonal: false });
    }
    let minimal = if real { minimal_real(s)? } else { minimal_complex(s)? };
    debug_assert_eq!(minimal.dim, required);
    minimal.pad(m / required)
}

fn minimal_complex(s: usize) -> Result<HrSet> {
    let mut set = pauli_hr();
    while set.count() < s {
        set = extend_by_doubling(&set)?;
    }
    Ok(set.truncate(s))
}

fn minimal_real(s: usize) -> Result<HrSet> {
    match s {
        0 => Ok(HrSet::empty(1, true)),
        1 => real_orthogonal_base(2),
        2 | 3 => Ok(real_orthogonal_base(4)?.truncate(s)),
        4..=7 => Ok(real_orthogonal_base(8)?.truncate(s)),
        _ => compose(&real_orthogonal_base(8)?, &minimal_real(s - 8)?),
    }
}

/// Largest deviation found for each defining relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HrReport {
    pub count: usize,
    pub dim: usize,
    pub anticommutator: f64,
    pub unitarity: f64,
    pub anti_hermiticity: f64,
    pub orthogonality: f64,
    pub trace: f64,
    pub tol: f64,
    pub pass: bool,
}

impl HrReport {
    pub fn max_deviation(&self) -> f64 {
        self.anticommutator.max(self.unitarity).max(self.anti_hermiticity).max(self.orthogonality).max(self.trace)
    }
}

pub fn verify_hr_relations(set: &HrSet, tol: f64) -> HrReport {
    let m = set.dim;
    let id = ComplexMatrix::identity(m);
    let mut rep = HrReport {
        count: set.count(),
        dim: m,
        anticommutator: 0.0,
        unitarity: 0.0,
        anti_hermiticity: 0.0,
        orthogonality: 0.0,
        trace: 0.0,
        tol,
        pass: true,
    };
    for (j, u) in set.matrices.iter().enumerate() {
        rep.unitarity = rep.unitarity.max(u.unitarity_deviation());
        rep.anti_hermiticity = rep.anti_hermiticity.max((&u.adjoint() + u).hs_norm());
        if set.count() >= 2 {
            rep.trace = rep.trace.max(u.trace().norm());
        }
        for (k, v) in set.matrices.iter().enumerate().skip(j) {
            let target = if j == k { id.scale_real(-2.0) } else { ComplexMatrix::zeros(m, m) };
            rep.anticommutator = rep.anticommutator.max((&u.anticommutator(v) - &target).hs_norm());
            let expected = if j == k { m as f64 } else { 0.0 };
            rep.orthogonality = rep.orthogonality.max((u.hs_inner(v) - expected).norm());
        }
    }
    rep.pass = rep.max_deviation() <= tol;
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationReport {
    pub trials: usize,
    /// Largest `||U(c)^dagger U(c) - |c|^2 I||_hs` over real `c`.
    pub max_real_deviation: f64,
    /// Deviation for `c = (1, i, 0, ...)/sqrt(2)`; absent for an empty family.
    pub complex_witness_deviation: Option<f64>,
    pub pass: bool,
}

/// Samples normalized real coefficient vectors over `{I} u set` and checks
/// that `U(c)` is unitary, then confirms that one complex vector is not.
pub fn verify_linear_combination_unitarity(set: &HrSet, trials: usize, seed: u64, tol: f64) -> Result<CombinationReport> {
    let n = set.count() + 1;
    let id = ComplexMatrix::identity(set.dim);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = sample_rng(seed, t as u64);
        let raw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let c: Vec<C64> = raw.iter().map(|x| C64::new(x / norm, 0.0)).collect();
        let u = set.linear_combination(&c)?;
        worst = worst.max((&u.adjoint().matmul(&u) - &id).hs_norm());
    }
    let witness = if set.count() >= 1 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut c = vec![ZERO; n];
        c[0] = C64::new(h, 0.0);
        c[1] = C64::new(0.0, h);
        let u = set.linear_combination(&c)?;
        Some((&u.adjoint().matmul(&u) - &id).hs_norm())
    } else {
        None
    };
    let pass = worst <= tol && witness.is_none_or(|w| w > tol);
    Ok(CombinationReport { trials, max_real_deviation: worst, complex_witness_deviation: witness, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceIdentityReport {
    pub count: usize,
    pub alpha: f64,
    /// Largest `|tr(U_j U_k tau^alpha)|` over `j < k`.
    pub quadratic: f64,
    /// Largest deviation of the quartic traces from their predicted values.
    pub quartic: f64,
    /// `tr(U_1 U_2 U_3 tau^alpha)` when `s = 3`.
    pub triple_trace: Option<[f64; 2]>,
    pub tol: f64,
    pub pass: bool,
}

/// Sign of the permutation `(a, b, c)` of `(1, 2, 3)`, or 0.
pub fn levi_civita(a: usize, b: usize, c: usize) -> i32 {
    match (a, b, c) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (1, 3, 2) | (3, 2, 1) | (2, 1, 3) => -1,
        _ => 0,
    }
}

/// Checks, with `U_0 = I` and `0 <= j < k <= s`, `0 <= j' < k' <= s`:
/// `tr(U_j U_k tau^a) = 0` and
/// `tr(U_j U_k U_j' U_k' tau^a) = -tr(tau^a) d_jj' d_kk'`,
/// plus `(d_{j=0} e_{kj'k'} + d_{j'=0} e_{jkk'}) tr(U_1 U_2 U_3 tau^a)` when `s = 3`.
pub fn verify_trace_identities(set: &HrSet, tau: &ComplexMatrix, alpha: f64, tol: f64) -> Result<TraceIdentityReport> {
    let s = set.count();
    if s < 2 {
        return Err(Error::NotApplicable(format!("trace identities need at least 2 HR matrices, got {s}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if tau.rows() != set.dim || tau.cols() != set.dim {
        return Err(Error::DimensionMismatch { expected: set.dim, actual: tau.rows() });
    }
    let herm = tau.hermiticity_deviation();
    if herm > tol {
        return Err(Error::NotHermitian(herm));
    }
    let comm = set.matrices.iter().map(|u| u.commutator(tau).hs_norm()).fold(0.0, f64::max);
    if comm > tol {
        return Err(Error::NotCommuting(comm));
    }
    let ta = psd_power(tau, alpha)?;
    let tr_ta = ta.trace();
    let us: Vec<ComplexMatrix> = (0..=s).map(|j| set.with_identity(j)).collect();
    let pairs: Vec<(usize, usize)> = (0..=s).flat_map(|j| (j + 1..=s).map(move |k| (j, k))).collect();
    let products: Vec<ComplexMatrix> = pairs.iter().map(|&(j, k)| us[j].matmul(&us[k])).collect();
    let triple = (s == 3).then(|| us[1].matmul(&us[2]).matmul(&us[3]).matmul(&ta).trace());

    let mut quadratic: f64 = 0.0;
    for p in &products {
        quadratic = quadratic.max(p.matmul(&ta).trace().norm());
    }
    let mut quartic: f64 = 0.0;
    for (a, &(j, k)) in pairs.iter().enumerate() {
        let left = ta.matmul(&products[a]);
        for (b, &(j2, k2)) in pairs.iter().enumerate() {
            let observed = left.trace_product(&products[b]);
            let mut expected = if a == b { -tr_ta } else { ZERO };
            if let Some(t) = triple {
                let sign = if j == 0 { levi_civita(k, j2, k2) } else { 0 } + if j2 == 0 { levi_civita(j, k, k2) } else { 0 };
                expected += t * sign as f64;
            }
            quartic = quartic.max((observed - expected).norm());
        }
    }
    let pass = quadratic <= tol && quartic <= tol;
    Ok(TraceIdentityReport {
        count: s,
        alpha,
        quadratic,
        quartic,
        triple_trace: triple.map(|t| [t.re, t.im]),
        tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;

    /// Anticommutator check written out entry by entry.
    fn oracle_anticommute(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        let n = a.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for k in 0..n {
                    s += a[(i, k)] * b[(k, j)] + b[(i, k)] * a[(k, j)];
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    #[test]
    fn pauli_family_is_hr_and_traceless() {
        let p = pauli_hr();
        assert!(verify_hr_relations(&p, 1e-14).pass);
        assert!(p.matrices().iter().all(|u| u.trace().norm() == 0.0));
        let xy = p.matrices()[0].matmul(&p.matrices()[1]);
        let yx = p.matrices()[1].matmul(&p.matrices()[0]);
        assert_eq!(xy, pauli::iz().scale_real(-1.0));
        assert_ne!(xy, yx);
    }

    #[test]
    fn doubling_grows_by_two() {
        let d1 = extend_by_doubling(&pauli_hr()).unwrap();
        assert_eq!((d1.count(), d1.dim()), (5, 4));
        let d2 = extend_by_doubling(&d1).unwrap();
        assert_eq!((d2.count(), d2.dim()), (7, 8));
        for (a, u) in d2.matrices().iter().enumerate() {
            for v in &d2.matrices()[a + 1..] {
                assert!(oracle_anticommute(u, v) < 1e-12);
            }
        }
        assert!(verify_hr_relations(&d2, 1e-12).pass);
    }

    #[test]
    fn composition_examples() {
        let c = compose(&HrSet::empty(1, true), &real_orthogonal_base(2).unwrap()).unwrap();
        assert_eq!((c.count(), c.dim()), (2, 4));
        assert!(verify_hr_relations(&c, 1e-14).pass && c.is_real_orthogonal());
        let r4 = real_orthogonal_base(4).unwrap();
        let big = compose(&r4, &r4).unwrap();
        assert_eq!((big.count(), big.dim()), (7, 32));
        assert!(big.is_real_orthogonal());
        assert!(big.matrices().iter().all(|m| m.is_real()));
        assert!(verify_hr_relations(&big, 1e-12).pass);
        let mixed = compose(&pauli_hr(), &r4).unwrap();
        assert!(!mixed.is_real_orthogonal());
        assert!(verify_hr_relations(&mixed, 1e-12).pass);
    }

    #[test]
    fn real_bases() {
        let r2 = real_orthogonal_base(2).unwrap();
        assert_eq!(r2.matrices()[0], ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]));
        for dim in [2, 4, 8] {
            let r = real_orthogonal_base(dim).unwrap();
            assert_eq!(r.count(), dim - 1);
            assert!(r.matrices().iter().all(|m| m.is_real()));
            assert!(verify_hr_relations(&r, 1e-14).pass, "dim {dim}");
        }
        let expected = tensor_all(&[&pauli::x(), &pauli::iy(), &pauli::id()]).unwrap();
        assert!(real_orthogonal_base(8).unwrap().matrices().iter().any(|m| (m - &expected).hs_norm() == 0.0));
        assert!(real_orthogonal_base(3).is_err());
    }

    #[test]
    fn failing_families() {
        let dup = HrSet::new(2, vec![pauli::ix(), pauli::ix()], false).unwrap();
        let r = verify_hr_relations(&dup, 1e-10);
        assert!(!r.pass && r.anticommutator > 1.0);
        let id = HrSet::new(2, vec![pauli::id()], false).unwrap();
        let r = verify_hr_relations(&id, 1e-10);
        assert!(!r.pass && r.anti_hermiticity > 1.0);
    }

    #[test]
    fn kappa_values() {
        assert_eq!((kappa(2).unwrap(), kappa_tilde(2).unwrap()), (1, 2));
        assert_eq!((kappa(5).unwrap(), kappa(9).unwrap()), (4, 16));
        assert_eq!((kappa_real(7).unwrap(), kappa(7).unwrap()), (8, 8));
        assert_eq!(kappa_real(4).unwrap(), 4);
        assert!(kappa(1).is_err());
        let ratios: Vec<usize> = (2..=17).map(|d| kappa_real(d).unwrap() / kappa(d).unwrap()).collect();
        assert_eq!(ratios, vec![2, 2, 2, 2, 2, 1, 1, 1, 2, 2, 2, 2, 2, 1, 1, 1]);
    }

    #[test]
    fn build_examples() {
        let b = build_hr(2, 2, false).unwrap();
        assert_eq!(b.matrices(), &pauli_hr().matrices()[..2]);
        let four = build_hr(4, 4, false).unwrap();
        assert_eq!((four.count(), four.dim()), (4, 4));
        assert!(verify_hr_relations(&four, 1e-12).pass);
        assert!(matches!(build_hr(2, 2, true), Err(Error::Divisibility { dim: 2, required: 4 })));
        let one = build_hr(1, 4, false).unwrap();
        assert_eq!(one.matrices()[0].trace(), ZERO);
        assert_eq!(build_hr(1, 1, false).unwrap().matrices()[0][(0, 0)], I);
        let padded = build_hr(3, 8, true).unwrap();
        assert_eq!((padded.count(), padded.dim()), (3, 8));
        assert!(padded.is_real_orthogonal() && verify_hr_relations(&padded, 1e-12).pass);
    }

    #[test]
    fn build_covers_d_up_to_17() {
        for d in 2..=17 {
            let k = kappa(d).unwrap();
            let set = build_hr(d - 1, k, false).unwrap();
            assert_eq!((set.count(), set.dim()), (d - 1, k));
            assert!(verify_hr_relations(&set, 1e-11).pass, "complex d={d}");
            if k >= 2 {
                assert!(matches!(build_hr(d - 1, k / 2, false), Err(Error::Divisibility { .. })));
            }
            let kr = kappa_real(d).unwrap();
            let real = build_hr(d - 1, kr, true).unwrap();
            assert_eq!((real.count(), real.dim()), (d - 1, kr));
            assert!(real.is_real_orthogonal());
            assert!(verify_hr_relations(&real, 1e-11).pass, "real d={d}");
            if kr >= 2 {
                assert!(build_hr(d - 1, kr / 2, true).is_err());
            }
        }
    }

    #[test]
    fn linear_combinations() {
        let r = verify_linear_combination_unitarity(&pauli_hr(), 100, 7, 1e-12).unwrap();
        assert!(r.pass && r.max_real_deviation < 1e-12);
        assert!((r.complex_witness_deviation.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let mut c = vec![ZERO; 4];
        c[0] = ONE;
        assert_eq!(pauli_hr().linear_combination(&c).unwrap(), ComplexMatrix::identity(2));
        let single = HrSet::new(2, vec![pauli::ix()], false).unwrap();
        let r = verify_linear_combination_unitarity(&single, 10, 1, 1e-12).unwrap();
        assert!(r.complex_witness_deviation.unwrap() > 1.0);
    }

    #[test]
    fn trace_identities_pauli() {
        let r = verify_trace_identities(&pauli_hr(), &ComplexMatrix::identity(2), 1.0, 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.triple_trace, Some([2.0, 0.0]));
        let two = pauli_hr().truncate(2);
        let r = verify_trace_identities(&two, &ComplexMatrix::identity(2), 1.0, 1e-12).unwrap();
        assert!(r.pass && r.triple_trace.is_none());
        // brute force for s = 2: tr(U_j U_k U_j' U_k') = -2 d_jj' d_kk'
        let pairs = [(0, 1), (0, 2), (1, 2)];
        for (a, &(j, k)) in pairs.iter().enumerate() {
            for (b, &(j2, k2)) in pairs.iter().enumerate() {
                let t = two.with_identity(j).matmul(&two.with_identity(k)).matmul(&two.with_identity(j2)).matmul(&two.with_identity(k2)).trace();
                let e = if a == b { -2.0 } else { 0.0 };
                assert!((t - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn trace_identities_with_commuting_tau() {
        let tau = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::diagonal(&[C64::new(0.3, 0.0), C64::new(0.2, 0.0)])).unwrap();
        let set = pauli_hr().pad(2).unwrap();
        for alpha in [0.5, 1.0, 2.0, 3.7] {
            assert!(verify_trace_identities(&set, &tau, alpha, 1e-12).unwrap().pass);
        }
        let bad = ComplexMatrix::diagonal(&[ONE, ZERO, ZERO, ZERO]);
        assert!(matches!(verify_trace_identities(&set, &bad, 1.0, 1e-12), Err(Error::NotCommuting(_))));
        assert!(verify_trace_identities(&pauli_hr().truncate(1), &ComplexMatrix::identity(2), 1.0, 1e-12).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = build_hr(3, 4, true).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"real_orthogonal\":true"));
        let back: HrSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let lie = text.replace("\"real_orthogonal\":true", "\"real_orthogonal\":false");
        assert!(!serde_json::from_str::<HrSet>(&lie).unwrap().is_real_orthogonal());
    }
}

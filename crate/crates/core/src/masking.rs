//! Masker isometries: construction, application, verification and recovery
//! of the underlying Hurwitz-Radon structure.

use serde::{Deserialize, Serialize};

use crate::eig::hermitian_eig;
use crate::error::{Error, Result};
use crate::hr::{build_hr, kappa, kappa_real, levi_civita, pauli_hr, HrSet};
use crate::matrix::{ComplexMatrix, C64, I, ONE, ZERO};
use crate::state::{
    random_state_indexed, BipartiteShape, DensityMatrix, Ket, StateKind, Subsystem,
};
use crate::tol;

/// The HR families behind a masker: `M|j> = (U_j (x) I)|Psi_0> = (I (x) V_j)|Psi_0>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskerHr {
    pub a: HrSet,
    pub b: HrSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaskerRepr", into = "MaskerRepr")]
pub struct Masker {
    input_dim: usize,
    shape: BipartiteShape,
    isometry: ComplexMatrix,
    tau_a: DensityMatrix,
    tau_b: DensityMatrix,
    spectrum: Vec<(f64, usize)>,
    purity: f64,
    hr: Option<MaskerHr>,
}

#[derive(Serialize, Deserialize)]
struct MaskerRepr {
    d: usize,
    #[serde(rename = "dA")]
    d_a: usize,
    #[serde(rename = "dB")]
    d_b: usize,
    isometry: ComplexMatrix,
    spectrum: Vec<(f64, usize)>,
    purity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hr: Option<HrSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hr_b: Option<HrSet>,
}

impl TryFrom<MaskerRepr> for Masker {
    type Error = Error;

    fn try_from(r: MaskerRepr) -> Result<Self> {
        let shape = BipartiteShape::new(r.d_a, r.d_b)?;
        let m = Masker::from_isometry(r.d, shape, r.isometry)?;
        match (r.hr, r.hr_b) {
            (None, None) => Ok(m),
            (Some(a), Some(b)) => m.with_hr(MaskerHr { a, b }, tol::NORM),
            _ => Err(Error::invalid("masker JSON needs both hr and hr_b or neither")),
        }
    }
}

impl From<Masker> for MaskerRepr {
    fn from(m: Masker) -> Self {
        let (hr, hr_b) = match m.hr {
            Some(h) => (Some(h.a), Some(h.b)),
            None => (None, None),
        };
        MaskerRepr {
            d: m.input_dim,
            d_a: m.shape.dim_a,
            d_b: m.shape.dim_b,
            isometry: m.isometry,
            spectrum: m.spectrum,
            purity: m.purity,
            hr,
            hr_b,
        }
    }
}

/// Nonzero eigenvalues grouped into `(value, multiplicity)` pairs, largest
/// first. Values below `tol::SPECTRUM_ZERO` are dropped and neighbours
/// within `tol::SPECTRUM_MERGE` (relative) are merged.
pub fn group_spectrum(values: &[f64]) -> Vec<(f64, usize)> {
    let mut v: Vec<f64> = values.iter().copied().filter(|&x| x > tol::SPECTRUM_ZERO).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for x in v {
        match groups.last_mut() {
            Some((lead, n)) if (*lead - x).abs() <= tol::SPECTRUM_MERGE * lead.abs().max(x.abs()) => {
                *n += 1;
                *sums.last_mut().unwrap() += x;
            }
            _ => {
                groups.push((x, 1));
                sums.push(x);
            }
        }
    }
    groups.iter().zip(sums).map(|(&(_, n), s)| (s / n as f64, n)).collect()
}

/// Coefficient matrix of column `j` of the isometry.
fn column_matrix(isometry: &ComplexMatrix, shape: BipartiteShape, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_vec(shape.dim_a, shape.dim_b, isometry.column(j)).expect("column length is dA*dB")
}

/// Isometry whose column `j` is the row-major vectorization of `cols[j]`.
fn isometry_from_coefficients(cols: &[ComplexMatrix]) -> ComplexMatrix {
    let n = cols[0].rows() * cols[0].cols();
    let mut m = ComplexMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c.as_slice());
    }
    m
}

impl Masker {
    /// Wraps an isometry `C^d -> C^dA (x) C^dB`. The fixed marginals are read
    /// off `M|0>`.
    pub fn from_isometry(input_dim: usize, shape: BipartiteShape, isometry: ComplexMatrix) -> Result<Self> {
        if input_dim < 2 {
            return Err(Error::invalid(format!("input dimension must be at least 2, got {input_dim}")));
        }
        if isometry.cols() != input_dim {
            return Err(Error::DimensionMismatch { expected: input_dim, actual: isometry.cols() });
        }
        if isometry.rows() != shape.total() {
            return Err(Error::DimensionMismatch { expected: shape.total(), actual: isometry.rows() });
        }
        let defect = (&isometry.adjoint().matmul(&isometry) - &ComplexMatrix::identity(input_dim)).hs_norm();
        if defect > tol::ISO {
            return Err(Error::invalid(format!("not an isometry (defect {defect:e})")));
        }
        let psi0 = column_matrix(&isometry, shape, 0);
        let tau_a = DensityMatrix::from_trusted(psi0.matmul(&psi0.adjoint()));
        let tau_b = DensityMatrix::from_trusted(psi0.transpose().matmul(&psi0.conj()));
        let spectrum = group_spectrum(&tau_a.spectrum());
        let purity = tau_a.purity();
        Ok(Masker { input_dim, shape, isometry, tau_a, tau_b, spectrum, purity, hr: None })
    }

    /// Attaches HR families after checking `M|j> = (U_j (x) I)M|0> = (I (x) V_j)M|0>`
    /// and that each `U_j` (`V_j`) commutes with `tau_A` (`tau_B`).
    pub fn with_hr(mut self, hr: MaskerHr, tol: f64) -> Result<Self> {
        let s = self.input_dim - 1;
        if hr.a.count() != s || hr.b.count() != s {
            return Err(Error::invalid(format!("HR families need {s} members")));
        }
        if hr.a.dim() != self.shape.dim_a || hr.b.dim() != self.shape.dim_b {
            return Err(Error::DimensionMismatch { expected: self.shape.dim_a, actual: hr.a.dim() });
        }
        let psi0 = column_matrix(&self.isometry, self.shape, 0);
        for j in 1..self.input_dim {
            let psij = column_matrix(&self.isometry, self.shape, j);
            let (u, v) = (&hr.a.matrices()[j - 1], &hr.b.matrices()[j - 1]);
            let dev_a = (&u.matmul(&psi0) - &psij).hs_norm();
            let dev_b = (&psi0.matmul(&v.transpose()) - &psij).hs_norm();
            let comm = u.commutator(self.tau_a.matrix()).hs_norm().max(v.commutator(self.tau_b.matrix()).hs_norm());
            if dev_a.max(dev_b) > tol {
                return Err(Error::NotAMasker(format!("column {j} is not generated by the given HR families")));
            }
            if comm > tol {
                return Err(Error::NotCommuting(comm));
            }
        }
        self.hr = Some(hr);
        Ok(self)
    }

    /// `M W` for a unitary `W` on the input space. HR metadata is dropped;
    /// use [`extract_hr`] to recover it in the new frame.
    pub fn with_input_frame(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.rows() != self.input_dim || w.cols() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, actual: w.rows() });
        }
        if w.unitarity_deviation() > tol::ISO {
            return Err(Error::invalid("input frame is not unitary"));
        }
        Masker::from_isometry(self.input_dim, self.shape, self.isometry.matmul(w))
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    pub fn tau_a(&self) -> &DensityMatrix {
        &self.tau_a
    }

    pub fn tau_b(&self) -> &DensityMatrix {
        &self.tau_b
    }

    pub fn spectrum(&self) -> &[(f64, usize)] {
        &self.spectrum
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    pub fn hr(&self) -> Option<&MaskerHr> {
        self.hr.as_ref()
    }

    /// `M|j>`
    pub fn image(&self, j: usize) -> Ket {
        Ket::normalized(self.isometry.column(j)).expect("isometry columns are unit vectors")
    }

    pub fn apply_ket(&self, psi: &Ket) -> Result<Ket> {
        if psi.dim() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, actual: psi.dim() });
        }
        Ket::normalized(self.isometry.apply(psi.amplitudes()))
    }

    /// Both marginals of `M rho M^dagger` from the coefficient matrices
    /// `A_j` of `M|j>`, without forming the composite state:
    /// `rho_A = sum_jk rho_jk A_j A_k^dagger`, `rho_B = sum_jk rho_jk A_j^T conj(A_k)`.
    pub fn marginals(&self, rho: &DensityMatrix) -> Result<(DensityMatrix, DensityMatrix)> {
        if rho.dim() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, actual: rho.dim() });
        }
        let (da, db) = (self.shape.dim_a, self.shape.dim_b);
        let cols: Vec<ComplexMatrix> = (0..self.input_dim).map(|j| column_matrix(&self.isometry, self.shape, j)).collect();
        let mut ra = ComplexMatrix::zeros(da, da);
        let mut rb = ComplexMatrix::zeros(db, db);
        for k in 0..self.input_dim {
            let mut ck = ComplexMatrix::zeros(da, db);
            for (j, aj) in cols.iter().enumerate() {
                let r = rho.entry(j, k);
                if r != ZERO {
                    ck = &ck + &aj.scale(r);
                }
            }
            ra = &ra + &ck.matmul(&cols[k].adjoint());
            rb = &rb + &ck.transpose().matmul(&cols[k].conj());
        }
        Ok((DensityMatrix::from_trusted(ra), DensityMatrix::from_trusted(rb)))
    }
}

/// `M|j> = (U_j (x) I)|Phi>` with `|Phi>` maximally entangled in `m x m`
/// and `U_0 = I`. Requires `m` even and divisible by `kappa(d)`
/// (`kappa_real(d)` for a real masker).
pub fn canonical_real_masker(d: usize, m: usize, real: bool) -> Result<Masker> {
    if d < 2 {
        return Err(Error::invalid(format!("input dimension must be at least 2, got {d}")));
    }
    let required = if real { kappa_real(d)? } else { kappa(d)? }.max(2);
    if m == 0 || !m.is_multiple_of(required) {
        return Err(Error::Divisibility { dim: m, required });
    }
    let family = build_hr(d - 1, m, real)?;
    masker_from_family(&family, &vec![1.0 / m as f64; m])
}

/// Builds `M|j> = (U_j (x) I)|Psi_0>` with `|Psi_0> = sum_i sqrt(lambda_i)|ii>`.
/// The family must commute with `diag(lambda)`; the B-side family is `U_j^T`.
fn masker_from_family(family: &HrSet, diag: &[f64]) -> Result<Masker> {
    let m = family.dim();
    let sqrt: Vec<C64> = diag.iter().map(|&x| C64::new(x.sqrt(), 0.0)).collect();
    let root = ComplexMatrix::diagonal(&sqrt);
    let cols: Vec<ComplexMatrix> = (0..=family.count()).map(|j| family.with_identity(j).matmul(&root)).collect();
    let shape = BipartiteShape::square(m)?;
    let b = HrSet::new(m, family.matrices().iter().map(|u| u.transpose()).collect(), family.is_real_orthogonal())?;
    let masker = Masker::from_isometry(family.count() + 1, shape, isometry_from_coefficients(&cols))?;
    masker.with_hr(MaskerHr { a: family.clone(), b }, tol::NORM)
}

/// The two-qubit magic basis:
/// `(|00>+|11>)/sqrt2`, `i(|01>+|10>)/sqrt2`, `(|01>-|10>)/sqrt2`, `i(|00>-|11>)/sqrt2`.
pub fn magic_basis_masker() -> Masker {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = C64::new(h, 0.0);
    let i = C64::new(0.0, h);
    let kets = [[r, ZERO, ZERO, r], [ZERO, i, i, ZERO], [ZERO, r, -r, ZERO], [i, ZERO, ZERO, -i]];
    let mut iso = ComplexMatrix::zeros(4, 4);
    for (j, k) in kets.iter().enumerate() {
        iso.set_column(j, k);
    }
    let shape = BipartiteShape::square(2).expect("2x2 is a valid shape");
    let p = pauli_hr();
    let b = HrSet::new(2, p.matrices().iter().map(|u| u.transpose()).collect(), false).expect("transposes keep shape");
    Masker::from_isometry(4, shape, iso)
        .and_then(|m| m.with_hr(MaskerHr { a: p, b }, tol::NORM))
        .expect("the magic basis is a masker over the Pauli family")
}

/// A masker whose fixed marginals have the requested nonzero spectrum
/// `{(lambda_o, m_o)}`, from the block family `U_j = (+)_o U_{o,j}`.
/// Each `m_o` must be divisible by `kappa(d)` (`kappa_real(d)` when real).
/// The complex qubit case has its own construction, [`qubit_complex_masker`].
pub fn masker_from_spectrum(d: usize, spectrum: &[(f64, usize)], real: bool) -> Result<Masker> {
    if d < 2 {
        return Err(Error::invalid(format!("input dimension must be at least 2, got {d}")));
    }
    if d == 2 && !real {
        return Err(Error::NotApplicable("complex qubit maskers are built by qubit_complex_masker".into()));
    }
    if spectrum.is_empty() {
        return Err(Error::invalid("empty spectrum"));
    }
    let mut total = 0.0;
    for &(lambda, mult) in spectrum {
        if !(lambda > 0.0) || !lambda.is_finite() || mult == 0 {
            return Err(Error::invalid(format!("invalid spectrum entry ({lambda}, {mult})")));
        }
        total += lambda * mult as f64;
    }
    if (total - 1.0).abs() > tol::NORM {
        return Err(Error::invalid(format!("spectrum sums to {total}, not 1")));
    }
    let required = if real { kappa_real(d)? } else { kappa(d)? };
    let mut blocks: Vec<HrSet> = Vec::new();
    let mut diag = Vec::new();
    for &(lambda, mult) in spectrum {
        if mult % required != 0 {
            return Err(Error::Divisibility { dim: mult, required });
        }
        blocks.push(build_hr(d - 1, mult, real)?);
        diag.extend(std::iter::repeat_n(lambda, mult));
    }
    let m = diag.len();
    if m > crate::matrix::max_dimension() {
        return Err(Error::DimensionLimit { requested: m, limit: crate::matrix::max_dimension() });
    }
    let matrices = (0..d - 1)
        .map(|j| ComplexMatrix::direct_sum(&blocks.iter().map(|b| b.matrices()[j].clone()).collect::<Vec<_>>()))
        .collect();
    let family = HrSet::new(m, matrices, real)?;
    masker_from_family(&family, &diag)
}

/// A sign vector `v` with `sum_l v_l mu_l = 0` within `tol`, if one exists.
/// Exhaustive over `2^(n-1)` patterns, so limited to 24 entries.
pub fn find_balanced_signs(mu: &[f64], tol: f64) -> Option<Vec<i8>> {
    let n = mu.len();
    if n == 0 || n > 24 {
        return None;
    }
    for mask in 0u32..(1 << (n - 1)) {
        let signs: Vec<i8> = (0..n).map(|l| if l > 0 && mask >> (l - 1) & 1 == 1 { -1 } else { 1 }).collect();
        let s: f64 = signs.iter().zip(mu).map(|(&v, &m)| v as f64 * m).sum();
        if s.abs() <= tol {
            return Some(signs);
        }
    }
    None
}

/// The qubit masker `|Psi_0> = sum_l sqrt(mu_l)|ll>`, `|Psi_1> = i sum_l v_l sqrt(mu_l)|ll>`.
pub fn qubit_complex_masker(mu: &[f64], signs: &[i8]) -> Result<Masker> {
    if mu.is_empty() || mu.len() != signs.len() {
        return Err(Error::invalid("mu and signs must be nonempty and of equal length"));
    }
    if mu.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::invalid("mu entries must be positive"));
    }
    if signs.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::invalid("signs must be +1 or -1"));
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > tol::NORM {
        return Err(Error::invalid(format!("mu sums to {total}, not 1")));
    }
    let balance: f64 = mu.iter().zip(signs).map(|(&m, &v)| m * v as f64).sum();
    if balance.abs() > tol::NORM {
        return Err(Error::invalid(format!("signs are not balanced: sum v_l mu_l = {balance}")));
    }
    let u = ComplexMatrix::diagonal(&signs.iter().map(|&v| I * v as f64).collect::<Vec<_>>());
    let family = HrSet::new(mu.len(), vec![u], false)?;
    masker_from_family(&family, mu)
}

/// `|j> -> |jj>` into `d x d`.
pub fn phase_masker(d: usize) -> Result<Masker> {
    if d < 2 {
        return Err(Error::invalid(format!("input dimension must be at least 2, got {d}")));
    }
    let mut iso = ComplexMatrix::zeros(d * d, d);
    for j in 0..d {
        iso[(j * d + j, j)] = ONE;
    }
    Masker::from_isometry(d, BipartiteShape::square(d)?, iso)
}

/// `M rho M^dagger`
pub fn apply(masker: &Masker, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != masker.input_dim {
        return Err(Error::DimensionMismatch { expected: masker.input_dim, actual: rho.dim() });
    }
    rho.conjugate_by(&masker.isometry)
}

/// Reproducible state source: every sample is a pure function of
/// `(seed, index)`.
pub trait StateSampler {
    fn dim(&self) -> usize;
    fn sample(&self, seed: u64, index: u64) -> DensityMatrix;
}

#[derive(Clone, Copy, Debug)]
pub struct RandomStates {
    pub dim: usize,
    pub kind: StateKind,
}

impl StateSampler for RandomStates {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, seed: u64, index: u64) -> DensityMatrix {
        random_state_indexed(self.dim, self.kind, seed, index)
    }
}

/// Random states with a guaranteed imaginary part: a pure complex state is
/// resampled on a shifted stream until `||rho - rho^T||_hs > 1e-3`.
#[derive(Clone, Copy, Debug)]
pub struct NonRealStates {
    pub dim: usize,
}

impl StateSampler for NonRealStates {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, seed: u64, index: u64) -> DensityMatrix {
        let mut attempt = 0u64;
        loop {
            let rho = random_state_indexed(self.dim, StateKind::PureComplex, seed, index + (attempt << 40));
            if rho.antisymmetric_part().hs_norm() > 1e-3 {
                return rho;
            }
            attempt += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskReport {
    pub checked_states: usize,
    pub max_dev_a: f64,
    pub max_dev_b: f64,
    pub is_masker: bool,
    pub is_partial_masker_a: bool,
    pub witness_state: Option<DensityMatrix>,
}

/// Which marginals the samples are compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    /// `tau_A`, `tau_B` of `M|0>`.
    Anchor,
    /// The marginals of the first sample, for sets that do not contain `|0>`.
    FirstSample,
}

/// Samples `n` states and reports the largest Hilbert-Schmidt deviation of
/// each marginal of `M(rho)` from `tau_A`, `tau_B`. The worst offending
/// state is kept as a witness when either deviation exceeds `tol`.
pub fn verify_masker(masker: &Masker, sampler: &dyn StateSampler, n: usize, seed: u64, tol: f64) -> Result<MaskReport> {
    verify_masker_against(masker, sampler, n, seed, tol, Reference::Anchor)
}

pub fn verify_masker_against(
    masker: &Masker,
    sampler: &dyn StateSampler,
    n: usize,
    seed: u64,
    tol: f64,
    reference: Reference,
) -> Result<MaskReport> {
    if sampler.dim() != masker.input_dim {
        return Err(Error::DimensionMismatch { expected: masker.input_dim, actual: sampler.dim() });
    }
    let (ref_a, ref_b) = match reference {
        Reference::Anchor => (masker.tau_a.clone(), masker.tau_b.clone()),
        Reference::FirstSample => masker.marginals(&sampler.sample(seed, 0))?,
    };
    let (mut max_a, mut max_b, mut worst) = (0.0f64, 0.0f64, None::<(f64, u64)>);
    for index in 0..n as u64 {
        let rho = sampler.sample(seed, index);
        let (ra, rb) = masker.marginals(&rho)?;
        let (da, db) = (ra.hs_distance(&ref_a), rb.hs_distance(&ref_b));
        max_a = max_a.max(da);
        max_b = max_b.max(db);
        let dev = da.max(db);
        if worst.is_none_or(|(w, _)| dev > w) {
            worst = Some((dev, index));
        }
    }
    let witness_state = worst.filter(|&(w, _)| w > tol).map(|(_, index)| sampler.sample(seed, index));
    Ok(MaskReport {
        checked_states: n,
        max_dev_a: max_a,
        max_dev_b: max_b,
        is_masker: max_a <= tol && max_b <= tol,
        is_partial_masker_a: max_a <= tol,
        witness_state,
    })
}

/// `tau + sum_{j<k} (rho_kj - rho_jk) U_j U_k tau` with `U_0 = I`, using the
/// masker's HR family on the requested side.
pub fn reduced_state_fast(masker: &Masker, rho: &DensityMatrix, side: Subsystem) -> Result<DensityMatrix> {
    let hr = masker.hr.as_ref().ok_or_else(|| Error::NotApplicable("masker carries no HR family".into()))?;
    if rho.dim() != masker.input_dim {
        return Err(Error::DimensionMismatch { expected: masker.input_dim, actual: rho.dim() });
    }
    let (family, tau) = match side {
        Subsystem::A => (&hr.a, masker.tau_a.matrix()),
        Subsystem::B => (&hr.b, masker.tau_b.matrix()),
    };
    let d = masker.input_dim;
    let mut sum = ComplexMatrix::zeros(family.dim(), family.dim());
    for j in 0..d {
        for k in j + 1..d {
            let a = rho.entry(k, j) - rho.entry(j, k);
            if a != ZERO {
                sum = &sum + &family.with_identity(j).matmul(&family.with_identity(k)).scale(a);
            }
        }
    }
    Ok(DensityMatrix::from_trusted(tau + &sum.matmul(tau)))
}

/// Recovers the unique local unitaries with
/// `M|j> = (U_j (x) I)M|0> = (I (x) V_j)M|0>`:
/// `U_j = Psi_j Psi_0^dagger tau_A^-1`, `V_j = Psi_j^T conj(Psi_0) tau_B^-1`,
/// where `Psi_j` is the coefficient matrix of `M|j>`.
///
/// When the marginals are rank deficient, both sides are first restricted to
/// their supports and the families are returned in the eigenbasis of the
/// support. Fails with [`Error::NotAMasker`] if the recovered families are not
/// HR, do not reproduce the isometry, or violate the commutation or
/// zero-trace conditions.
pub fn extract_hr(masker: &Masker, tol: f64) -> Result<MaskerHr> {
    let shape = masker.shape;
    let s = masker.input_dim - 1;
    let eig_a = hermitian_eig(masker.tau_a.matrix())?;
    let eig_b = hermitian_eig(masker.tau_b.matrix())?;
    let support = |values: &[f64]| -> Vec<usize> { (0..values.len()).filter(|&i| values[i] > tol::SPECTRUM_ZERO).collect() };
    let (sa, sb) = (support(&eig_a.values), support(&eig_b.values));
    if sa.len() != sb.len() {
        return Err(Error::NotAMasker("marginal supports differ in rank".into()));
    }
    let r = sa.len();
    let qa = select_columns(&eig_a.vectors, &sa);
    let qb = select_columns(&eig_b.vectors, &sb);
    let full_a = r == shape.dim_a;
    let full_b = r == shape.dim_b;

    // Psi~ = Q_A^dagger Psi conj(Q_B)
    let restrict = |psi: &ComplexMatrix| qa.adjoint().matmul(psi).matmul(&qb.conj());
    let psis: Vec<ComplexMatrix> = (0..=s).map(|j| column_matrix(&masker.isometry, shape, j)).collect();
    let restricted: Vec<ComplexMatrix> = psis.iter().map(&restrict).collect();
    for (j, p) in restricted.iter().enumerate() {
        let lost = 1.0 - p.hs_norm().powi(2);
        if lost.abs() > tol {
            return Err(Error::NotAMasker(format!("M|{j}> leaves the support of the fixed marginals")));
        }
    }
    let inv_a = ComplexMatrix::diagonal(&sa.iter().map(|&i| C64::new(1.0 / eig_a.values[i], 0.0)).collect::<Vec<_>>());
    let inv_b = ComplexMatrix::diagonal(&sb.iter().map(|&i| C64::new(1.0 / eig_b.values[i], 0.0)).collect::<Vec<_>>());
    let tau_a_r = masker.tau_a.matrix().clone();
    let tau_b_r = masker.tau_b.matrix().clone();
    let ta = qa.adjoint().matmul(&tau_a_r).matmul(&qa);
    let tb = qb.adjoint().matmul(&tau_b_r).matmul(&qb);

    let p0 = &restricted[0];
    let mut us = Vec::with_capacity(s);
    let mut vs = Vec::with_capacity(s);
    for pj in &restricted[1..] {
        let u = pj.matmul(&p0.adjoint()).matmul(&inv_a);
        let v = pj.transpose().matmul(&p0.conj()).matmul(&inv_b);
        if (&u.matmul(p0) - pj).hs_norm() > tol || (&p0.matmul(&v.transpose()) - pj).hs_norm() > tol {
            return Err(Error::NotAMasker("columns are not related by local unitaries".into()));
        }
        if u.commutator(&ta).hs_norm() > tol || v.commutator(&tb).hs_norm() > tol {
            return Err(Error::NotAMasker("recovered unitaries do not commute with the marginals".into()));
        }
        if u.trace_product(&ta).norm() > tol || v.trace_product(&tb).norm() > tol {
            return Err(Error::NotAMasker("recovered unitaries have nonzero weighted trace".into()));
        }
        us.push(u);
        vs.push(v);
    }
    let lift = |ms: Vec<ComplexMatrix>, q: &ComplexMatrix, full: bool| -> Vec<ComplexMatrix> {
        if full {
            ms.into_iter().map(|m| q.matmul(&m).matmul(&q.adjoint())).collect()
        } else {
            ms
        }
    };
    let us = lift(us, &qa, full_a);
    let vs = lift(vs, &qb, full_b);
    let real_a = us.iter().all(|u| u.is_real());
    let real_b = vs.iter().all(|v| v.is_real());
    let a = HrSet::new(us.first().map_or(r, |u| u.rows()), us, real_a)?;
    let b = HrSet::new(vs.first().map_or(r, |v| v.rows()), vs, real_b)?;
    for (name, fam) in [("A", &a), ("B", &b)] {
        let rep = crate::hr::verify_hr_relations(fam, tol);
        let ok = rep.anticommutator <= tol && rep.unitarity <= tol && rep.anti_hermiticity <= tol;
        if !ok {
            return Err(Error::NotAMasker(format!("recovered {name} family violates the HR relations (deviation {:e})", rep.max_deviation())));
        }
    }
    Ok(MaskerHr { a, b })
}

fn select_columns(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m.rows(), idx.len());
    for (new, &old) in idx.iter().enumerate() {
        out.set_column(new, &m.column(old));
    }
    out
}

/// Closed-form purities `(tr rho_A^2, tr rho_B^2)` of the marginals of
/// `M(rho)`:
/// `P/2 (2 + ||rho - rho^T||_hs^2)` per side, plus for `d = 4` the term
/// `+- sum (d_{j=0} e_{kj'k'} + d_{j'=0} e_{jkk'}) a_jk a_j'k' tr(U_1 U_2 U_3 tau_A^2)`
/// with `a_jk = rho_kj - rho_jk`. Not defined for `d = 2`.
pub fn purity_closed_form(masker: &Masker, rho: &DensityMatrix) -> Result<(f64, f64)> {
    let d = masker.input_dim;
    if d == 2 {
        return Err(Error::NotApplicable("purity identities need d >= 3".into()));
    }
    if rho.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: rho.dim() });
    }
    let base = 0.5 * masker.purity * (2.0 + rho.antisymmetric_part().hs_norm().powi(2));
    if d != 4 {
        return Ok((base, base));
    }
    let hr = masker.hr.as_ref().ok_or_else(|| Error::NotApplicable("the d = 4 correction needs the HR family".into()))?;
    let u = |j: usize| hr.a.with_identity(j);
    let tau2 = masker.tau_a.matrix().matmul(masker.tau_a.matrix());
    let t = u(1).matmul(&u(2)).matmul(&u(3)).trace_product(&tau2);
    let a = |j: usize, k: usize| rho.entry(k, j) - rho.entry(j, k);
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|j| (j + 1..4).map(move |k| (j, k))).collect();
    let mut corr = ZERO;
    for &(j, k) in &pairs {
        for &(j2, k2) in &pairs {
            let sign = if j == 0 { levi_civita(k, j2, k2) } else { 0 } + if j2 == 0 { levi_civita(j, k, k2) } else { 0 };
            if sign != 0 {
                corr += a(j, k) * a(j2, k2) * t * sign as f64;
            }
        }
    }
    Ok((base + corr.re, base - corr.re))
}

/// The qubit masker with spectrum `(1/4, 1/4, 1/2)` together with an input
/// whose image is more entangled than the masker's anchor.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub masker: Masker,
    pub psi: Ket,
    pub output: Ket,
    pub concurrence_out: f64,
    pub bound: f64,
}

pub fn counterexample_d2() -> Counterexample {
    let masker = qubit_complex_masker(&[0.25, 0.25, 0.5], &[1, 1, -1]).expect("balanced spectrum");
    let s = 2f64.sqrt();
    let psi = Ket::normalized(vec![
        C64::new((6.0 * (3.0 - 2.0 * s)).sqrt() / 6.0, 0.0),
        C64::new(0.0, -(6.0 * (3.0 + 2.0 * s)).sqrt() / 6.0),
    ])
    .expect("nonzero ket");
    let output = masker.apply_ket(&psi).expect("dimension 2 input");
    let concurrence_out = crate::measures::concurrence_pure(&output, masker.shape).expect("normalized output");
    let bound = (2.0 * (1.0 - masker.purity)).sqrt();
    Counterexample { masker, psi, output, concurrence_out, bound }
}

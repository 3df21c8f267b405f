//! Finite state sets: informational completeness, Bloch geometry, 2-designs,
//! standard fixtures, and the sampled families used by the masking
//! experiments (one-sided hiding in `d = 4`, phase states).

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::eig::hermitian_eig;
use crate::error::{Error, Result};
use crate::masking::{Masker, StateSampler};
use crate::matrix::{tensor_product, ComplexMatrix, C64, I, ONE, ZERO};
use crate::rng::sample_rng;
use crate::state::{random_state_indexed, DensityMatrix, Ket, StateKind};
use crate::tol;

/// Relative eigenvalue cutoff for Gram ranks.
pub const RANK_CUTOFF: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateSetRepr", into = "StateSetRepr")]
pub struct StateSet {
    dim: usize,
    states: Vec<DensityMatrix>,
    weights: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct StateSetRepr {
    dim: usize,
    weights: Option<Vec<f64>>,
    states: Vec<DensityMatrix>,
}

impl TryFrom<StateSetRepr> for StateSet {
    type Error = Error;

    fn try_from(r: StateSetRepr) -> Result<Self> {
        StateSet::new(r.dim, r.states, r.weights)
    }
}

impl From<StateSet> for StateSetRepr {
    fn from(s: StateSet) -> Self {
        StateSetRepr { dim: s.dim, weights: s.weights, states: s.states }
    }
}

impl StateSet {
    pub fn new(dim: usize, states: Vec<DensityMatrix>, weights: Option<Vec<f64>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::invalid("state set is empty"));
        }
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, actual: bad.dim() });
        }
        if let Some(w) = &weights {
            if w.len() != states.len() {
                return Err(Error::DimensionMismatch { expected: states.len(), actual: w.len() });
            }
            if w.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
                return Err(Error::invalid("weights must be finite and strictly positive"));
            }
        }
        Ok(StateSet { dim, states, weights })
    }

    pub fn from_kets(kets: &[Ket]) -> Result<Self> {
        let dim = kets.first().map_or(0, Ket::dim);
        StateSet::new(dim, kets.iter().map(Ket::density).collect(), None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Weights normalized to sum 1 (uniform when absent).
    pub fn normalized_weights(&self) -> Vec<f64> {
        match &self.weights {
            Some(w) => {
                let total: f64 = w.iter().sum();
                w.iter().map(|x| x / total).collect()
            }
            None => vec![1.0 / self.len() as f64; self.len()],
        }
    }
}

/// Orthonormal (Hilbert-Schmidt) basis of the d x d Hermitian matrices:
/// `E_ii`, then `(E_ij + E_ji)/sqrt 2` and `i(E_ji - E_ij)/sqrt 2` for i < j.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = ONE;
        basis.push(e);
    }
    let h = 1.0 / SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(i, j)] = C64::new(h, 0.0);
            s[(j, i)] = C64::new(h, 0.0);
            basis.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(i, j)] = C64::new(0.0, -h);
            a[(j, i)] = C64::new(0.0, h);
            basis.push(a);
        }
    }
    basis
}

/// Generalized Gell-Mann matrices, normalized as `tr(l_j l_k) = 2 delta_jk`.
pub fn gell_mann(d: usize) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> =
        hermitian_basis(d).into_iter().skip(d).map(|m| m.scale_real(SQRT_2)).collect();
    for l in 1..d {
        let c = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![ZERO; d];
        for z in diag.iter_mut().take(l) {
            *z = C64::new(c, 0.0);
        }
        diag[l] = C64::new(-c * l as f64, 0.0);
        out.push(ComplexMatrix::diagonal(&diag));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub components: Vec<f64>,
}

impl BlochVector {
    /// `r_j = tr(rho l_j)`.
    pub fn of(rho: &DensityMatrix) -> BlochVector {
        let components = gell_mann(rho.dim()).iter().map(|l| rho.matrix().trace_product(l).re).collect();
        BlochVector { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn coordinates(set: &StateSet) -> Vec<Vec<f64>> {
    let basis = hermitian_basis(set.dim);
    set.states.iter().map(|s| basis.iter().map(|b| s.matrix().trace_product(b).re).collect()).collect()
}

/// Real symmetric Gram matrix of the given rows.
fn gram(rows: &[Vec<f64>]) -> ComplexMatrix {
    let n = rows.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            g[(i, j)] = C64::new(v, 0.0);
            g[(j, i)] = C64::new(v, 0.0);
        }
    }
    g
}

/// Frame operator `sum_i x_i x_i^T`.
fn frame(rows: &[Vec<f64>], n: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(n, n);
    for r in rows {
        for i in 0..n {
            for j in 0..n {
                f[(i, j)] += C64::new(r[i] * r[j], 0.0);
            }
        }
    }
    f
}

/// Number of eigenvalues above `cutoff * max(largest, 1)`. The floor of 1
/// keeps a set of identical vectors from promoting rounding noise to rank.
fn rank_of(rows: &[Vec<f64>], cutoff: f64) -> Result<usize> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || width == 0 {
        return Ok(0);
    }
    let m = if rows.len() <= width { gram(rows) } else { frame(rows, width) };
    let values = hermitian_eig(&m)?.values;
    let largest = values.last().copied().unwrap_or(0.0).max(0.0);
    let threshold = cutoff * largest.max(1.0);
    Ok(values.iter().filter(|&&v| v > threshold).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcReport {
    pub informationally_complete: bool,
    pub span_dim: usize,
    pub full_dim: usize,
}

/// Real-linear span dimension of the set inside the `d^2`-dimensional space
/// of Hermitian matrices.
pub fn is_informationally_complete(set: &StateSet, cutoff: f64) -> Result<IcReport> {
    let span_dim = rank_of(&coordinates(set), cutoff)?;
    let full_dim = set.dim * set.dim;
    Ok(IcReport { informationally_complete: span_dim == full_dim, span_dim, full_dim })
}

/// A unit Hilbert-Schmidt norm Hermitian `Q` orthogonal to every member, or
/// `None` when the set is IC.
pub fn separating_observable(set: &StateSet, cutoff: f64) -> Result<Option<ComplexMatrix>> {
    let rows = coordinates(set);
    let n = set.dim * set.dim;
    let eig = hermitian_eig(&frame(&rows, n))?;
    let largest = eig.values.last().copied().unwrap_or(0.0).max(1.0);
    if eig.values[0] > cutoff * largest {
        return Ok(None);
    }
    let q = eig.vectors.column(0);
    let basis = hermitian_basis(set.dim);
    let mut out = ComplexMatrix::zeros(set.dim, set.dim);
    for (b, c) in basis.iter().zip(&q) {
        out = &out + &b.scale_real(c.re);
    }
    let norm = out.hs_norm();
    Ok(Some(out.scale_real(1.0 / norm)))
}

/// Affine dimension of the set's generalized Bloch vectors.
pub fn bloch_affine_dimension(set: &StateSet, cutoff: f64) -> Result<usize> {
    let vectors: Vec<Vec<f64>> = set.states.iter().map(|s| BlochVector::of(s).components).collect();
    let base = vectors[0].clone();
    let centered: Vec<Vec<f64>> =
        vectors[1..].iter().map(|v| v.iter().zip(&base).map(|(a, b)| a - b).collect()).collect();
    rank_of(&centered, cutoff)
}

/// Whether the Bloch vectors of a qubit set fit in a plane section of the
/// ball.
pub fn qubit_disk_test(set: &StateSet) -> Result<bool> {
    if set.dim != 2 {
        return Err(Error::NotApplicable(format!("disk criterion needs dim 2, got {}", set.dim)));
    }
    Ok(bloch_affine_dimension(set, RANK_CUTOFF)? <= 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub is_design: bool,
    pub deviation: f64,
    pub tol: f64,
}

/// Compares `sum_j w_j rho_j (x) rho_j` with `P_sym / tr P_sym`.
pub fn is_weighted_2_design(set: &StateSet, tol: f64) -> Result<DesignReport> {
    if let Some(k) = set.states.iter().position(|s| !s.is_pure(tol::NORM)) {
        return Err(Error::InvalidState(format!("member {k} is not pure")));
    }
    let d = set.dim;
    let mut avg = ComplexMatrix::zeros(d * d, d * d);
    for (s, w) in set.states.iter().zip(set.normalized_weights()) {
        avg = &avg + &tensor_product(s.matrix(), s.matrix())?.scale_real(w);
    }
    let mut sym = ComplexMatrix::identity(d * d);
    for a in 0..d {
        for b in 0..d {
            sym[(a * d + b, b * d + a)] += ONE;
        }
    }
    let sym = sym.scale_real(1.0 / (d * (d + 1)) as f64);
    let deviation = (&avg - &sym).hs_norm();
    Ok(DesignReport { is_design: deviation <= tol, deviation, tol })
}

/// Qubit SIC: Bloch vectors `(1,1,1)`, `(1,-1,-1)`, `(-1,1,-1)`, `(-1,-1,1)`
/// over sqrt 3.
pub fn sic_qubit() -> StateSet {
    let s = 1.0 / 3f64.sqrt();
    let vertices = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let states = vertices
        .iter()
        .map(|v| {
            let (x, y, z) = (v[0] * s, v[1] * s, v[2] * s);
            let m = ComplexMatrix::from_rows(&[
                vec![C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
                vec![C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
            ]);
            DensityMatrix::new(m).expect("Bloch vectors of unit length give states")
        })
        .collect();
    StateSet::new(2, states, None).expect("fixture is well formed")
}

/// The `d + 1` bases of a complete MUB set for `d` in {2, 3}: the
/// computational basis and the quadratic-phase Fourier bases
/// `sum_j w^(b j^2 + m j) |j> / sqrt d` (for d = 2, the eigenbases of
/// the Pauli matrices).
pub fn mub_bases(d: usize) -> Result<Vec<Vec<Ket>>> {
    let mut bases = vec![(0..d).map(|j| Ket::basis(d, j)).collect::<Vec<_>>()];
    match d {
        2 => {
            let h = 1.0 / SQRT_2;
            let x = vec![
                Ket::new(vec![C64::new(h, 0.0), C64::new(h, 0.0)])?,
                Ket::new(vec![C64::new(h, 0.0), C64::new(-h, 0.0)])?,
            ];
            let y = vec![
                Ket::new(vec![C64::new(h, 0.0), C64::new(0.0, h)])?,
                Ket::new(vec![C64::new(h, 0.0), C64::new(0.0, -h)])?,
            ];
            bases.push(x);
            bases.push(y);
        }
        3 => {
            let s = 1.0 / 3f64.sqrt();
            for b in 0..3 {
                let basis = (0..3)
                    .map(|m| {
                        let amps = (0..3)
                            .map(|j| C64::from_polar(s, 2.0 * PI * ((b * j * j + m * j) % 3) as f64 / 3.0))
                            .collect();
                        Ket::new(amps)
                    })
                    .collect::<Result<Vec<_>>>()?;
                bases.push(basis);
            }
        }
        _ => return Err(Error::NotApplicable(format!("no complete MUB fixture for d = {d}"))),
    }
    Ok(bases)
}

pub fn mub_complete(d: usize) -> Result<StateSet> {
    let kets: Vec<Ket> = mub_bases(d)?.into_iter().flatten().collect();
    StateSet::from_kets(&kets)
}

/// Fixture lookup by CLI name.
pub fn fixture(name: &str) -> Result<StateSet> {
    match name {
        "sic2" => Ok(sic_qubit()),
        "mub2" => mub_complete(2),
        "mub3" => mub_complete(3),
        "basis2" | "basis3" | "basis4" => {
            let d = name[5..].parse::<usize>().expect("matched digit");
            StateSet::from_kets(&(0..d).map(|j| Ket::basis(d, j)).collect::<Vec<_>>())
        }
        other => Err(Error::invalid(format!("unknown fixture `{other}`"))),
    }
}

/// Residuals of `Im r01 = Im r23`, `Im r02 = -Im r13`, `Im r03 = Im r12`.
pub fn constrained_residuals(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, actual: rho.dim() });
    }
    let im = |i, j| rho.entry(i, j).im;
    Ok([im(0, 1) - im(2, 3), im(0, 2) + im(1, 3), im(0, 3) - im(1, 2)])
}

pub fn is_constrained_member(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    Ok(constrained_residuals(rho)?.iter().all(|r| r.abs() <= tol))
}

/// Orthogonal projection of the imaginary part onto the constraint
/// subspace, then mixing with `I/4` just enough to restore positivity.
pub fn constrained_project(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, actual: rho.dim() });
    }
    let mut m = rho.matrix().clone();
    let mut set = |i: usize, j: usize, im: f64| {
        let z = C64::new(m[(i, j)].re, im);
        m[(i, j)] = z;
        m[(j, i)] = z.conj();
    };
    let im = |i, j| rho.entry(i, j).im;
    let a = (im(0, 1) + im(2, 3)) / 2.0;
    let b = (im(0, 2) - im(1, 3)) / 2.0;
    let c = (im(0, 3) + im(1, 2)) / 2.0;
    set(0, 1, a);
    set(2, 3, a);
    set(0, 2, b);
    set(1, 3, -b);
    set(0, 3, c);
    set(1, 2, c);
    let lambda_min = hermitian_eig(&m)?.values[0];
    if lambda_min < 0.0 {
        let t = -lambda_min / (0.25 - lambda_min);
        m = &m.scale_real(1.0 - t) + &ComplexMatrix::identity(4).scale_real(t / 4.0);
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr))
}

/// Random members of the one-sided hiding set in `d = 4`: alternating pure
/// and mixed complex draws pushed through [`constrained_project`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstrainedStates;

impl StateSampler for ConstrainedStates {
    fn dim(&self) -> usize {
        4
    }

    fn sample(&self, seed: u64, index: u64) -> DensityMatrix {
        let kind = if index.is_multiple_of(2) { StateKind::MixedComplex } else { StateKind::PureComplex };
        constrained_project(&random_state_indexed(4, kind, seed, index)).expect("projection of a d = 4 state")
    }
}

pub fn constrained_set_sampler(seed: u64, index: u64) -> DensityMatrix {
    ConstrainedStates.sample(seed, index)
}

/// `I/4 + (i/8)(|0><1| - |1><0| + |2><3| - |3><2|)`.
pub fn constrained_witness() -> DensityMatrix {
    let mut m = ComplexMatrix::identity(4).scale_real(0.25);
    let e = I * 0.125;
    m[(0, 1)] = e;
    m[(1, 0)] = -e;
    m[(2, 3)] = e;
    m[(3, 2)] = -e;
    DensityMatrix::new(m).expect("eigenvalues 1/8 and 3/8")
}

fn check_profile(c: &[f64]) -> Result<()> {
    if c.is_empty() || c.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::invalid("amplitude profile must be nonempty and strictly positive"));
    }
    let norm: f64 = c.iter().map(|x| x * x).sum();
    if (norm - 1.0).abs() > tol::NORM {
        return Err(Error::NotNormalized(norm.sqrt()));
    }
    Ok(())
}

/// `sum_j c_j e^{i phi_j} |j>` with independent uniform phases.
pub fn phase_set_sampler(c: &[f64], seed: u64, index: u64) -> Result<Ket> {
    check_profile(c)?;
    let mut rng = sample_rng(seed, index);
    let amps = c.iter().map(|&cj| C64::from_polar(cj, rng.random::<f64>() * 2.0 * PI)).collect();
    Ket::new(amps)
}

/// Pure states of fixed amplitude profile `c` and random phases.
#[derive(Clone, Debug)]
pub struct PhaseStates {
    c: Vec<f64>,
}

impl PhaseStates {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        check_profile(&c)?;
        Ok(PhaseStates { c })
    }

    pub fn uniform(d: usize) -> Self {
        PhaseStates { c: vec![1.0 / (d as f64).sqrt(); d] }
    }

    pub fn profile(&self) -> &[f64] {
        &self.c
    }
}

impl StateSampler for PhaseStates {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn sample(&self, seed: u64, index: u64) -> DensityMatrix {
        phase_set_sampler(&self.c, seed, index).expect("profile validated").density()
    }
}

/// `tr(r1 r2 r3)`.
pub fn triple_product(r1: &DensityMatrix, r2: &DensityMatrix, r3: &DensityMatrix) -> Result<C64> {
    for r in [r2, r3] {
        if r.dim() != r1.dim() {
            return Err(Error::DimensionMismatch { expected: r1.dim(), actual: r.dim() });
        }
    }
    Ok(r1.matrix().matmul(r2.matrix()).trace_product(r3.matrix()))
}

/// `c0 e^{2 k pi i / 3}|0> + c sum_{j>=1} |j>`, k = 0, 1, 2, with the
/// remaining weight `1 - c0^2` spread evenly.
pub fn phase_triple_family(d: usize, c0_sq: f64) -> Result<[Ket; 3]> {
    if d < 2 || !(c0_sq > 0.0 && c0_sq < 1.0) {
        return Err(Error::invalid(format!("need d >= 2 and 0 < c0^2 < 1, got d = {d}, c0^2 = {c0_sq}")));
    }
    let c0 = c0_sq.sqrt();
    let rest = ((1.0 - c0_sq) / (d - 1) as f64).sqrt();
    let ket = |k: usize| {
        let mut amps = vec![C64::new(rest, 0.0); d];
        amps[0] = C64::from_polar(c0, 2.0 * PI * k as f64 / 3.0);
        Ket::new(amps)
    };
    Ok([ket(0)?, ket(1)?, ket(2)?])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub dim_prime: usize,
    pub grid_step_deg: u32,
    pub min_max_violation: f64,
    pub argmin_deg: (u32, u32),
}

/// `|cos|` of an integer angle in degrees, folded into [0, 90] so that right
/// angles give exactly 0.
fn abs_cos_deg(angle: i64) -> f64 {
    let a = angle.rem_euclid(180);
    let folded = if a > 90 { 180 - a } else { a };
    if folded == 90 {
        0.0
    } else {
        (folded as f64).to_radians().cos()
    }
}

/// Minimum over a degree grid of `max(|cos b|, |cos g|, |cos(b - g)|)`: the
/// three cosines a real-to-phase embedding would need to vanish together.
pub fn real_to_phase_obstruction(dim_prime: usize, step_deg: u32) -> Result<ObstructionReport> {
    if dim_prime < 3 {
        return Err(Error::NotApplicable(format!("dimension {dim_prime} admits an embedding")));
    }
    if step_deg == 0 || 360 % step_deg != 0 {
        return Err(Error::invalid(format!("grid step must divide 360, got {step_deg}")));
    }
    let mut best = (f64::INFINITY, (0, 0));
    for b in (0..360).step_by(step_deg as usize) {
        for g in (0..360).step_by(step_deg as usize) {
            let v = abs_cos_deg(b as i64).max(abs_cos_deg(g as i64)).max(abs_cos_deg(b as i64 - g as i64));
            if v < best.0 {
                best = (v, (b, g));
            }
        }
    }
    Ok(ObstructionReport { dim_prime, grid_step_deg: step_deg, min_max_violation: best.0, argmin_deg: best.1 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub profile: Vec<f64>,
    pub samples: usize,
    pub hidden: usize,
    pub hidden_mixed: usize,
    pub max_marginal_deviation: f64,
    pub min_purity: f64,
}

/// Searches outside the pure phase states for inputs the phase masker still
/// hides: random states are rescaled as `D rho D` so that their diagonal
/// equals `c_j^2`, and their marginals are compared with those of the
/// profile. Findings are reported, never asserted.
pub fn conjecture_experiment(masker: &Masker, c: &[f64], n: usize, seed: u64, tol: f64) -> Result<ConjectureReport> {
    check_profile(c)?;
    if masker.input_dim() != c.len() {
        return Err(Error::DimensionMismatch { expected: masker.input_dim(), actual: c.len() });
    }
    let reference = masker.marginals(&phase_set_sampler(c, seed, 0)?.density())?;
    let (mut hidden, mut hidden_mixed, mut max_dev, mut min_purity) = (0, 0, 0.0f64, 1.0f64);
    for index in 0..n as u64 {
        let rho = random_state_indexed(c.len(), StateKind::MixedComplex, seed, index);
        let scale: Vec<C64> =
            (0..c.len()).map(|j| C64::new(c[j] / rho.entry(j, j).re.sqrt(), 0.0)).collect();
        let d = ComplexMatrix::diagonal(&scale);
        let candidate = DensityMatrix::new(d.matmul(rho.matrix()).matmul(&d))?;
        let (a, b) = masker.marginals(&candidate)?;
        let dev = a.hs_distance(&reference.0).max(b.hs_distance(&reference.1));
        max_dev = max_dev.max(dev);
        min_purity = min_purity.min(candidate.purity());
        if dev <= tol {
            hidden += 1;
            if !candidate.is_pure(tol) {
                hidden_mixed += 1;
            }
        }
    }
    Ok(ConjectureReport {
        profile: c.to_vec(),
        samples: n,
        hidden,
        hidden_mixed,
        max_marginal_deviation: max_dev,
        min_purity,
    })
}

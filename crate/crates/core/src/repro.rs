//! Reproduction reports: each one recomputes a published table, curve or
//! counterexample and records every checked value as a claim.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hr::{kappa, kappa_real, kappa_tilde};
use crate::ic::{constrained_residuals, constrained_witness, ConstrainedStates};
use crate::masking::{canonical_real_masker, counterexample_d2, magic_basis_masker, Masker, StateSampler};
use crate::matrix::C64;
use crate::measures::{
    concurrence_pure, entanglement_cost_formula, entropy_of_entanglement, masking_entanglement_table,
    robustness_of_imaginarity,
};
use crate::state::{random_state_indexed, DensityMatrix, Ket, StateKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `|observed - expected| <= tolerance`
    Equal,
    /// `observed <= expected + tolerance`
    AtMost,
    /// `observed > expected`
    Greater,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub description: String,
    pub relation: Relation,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Claim {
    pub fn new(description: impl Into<String>, relation: Relation, expected: f64, observed: f64, tolerance: f64) -> Self {
        let pass = match relation {
            Relation::Equal => (observed - expected).abs() <= tolerance,
            Relation::AtMost => observed <= expected + tolerance,
            Relation::Greater => observed > expected,
        };
        Claim { description: description.into(), relation, expected, observed, tolerance, pass }
    }

    pub fn equal(description: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Claim::new(description, Relation::Equal, expected, observed, tolerance)
    }

    pub fn at_most(description: impl Into<String>, bound: f64, observed: f64) -> Self {
        Claim::new(description, Relation::AtMost, bound, observed, 0.0)
    }

    pub fn greater(description: impl Into<String>, bound: f64, observed: f64) -> Self {
        Claim::new(description, Relation::Greater, bound, observed, 0.0)
    }
}

/// Plot-ready numeric data attached to a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproReport {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub claims: Vec<Claim>,
    pub table: Option<Table>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl ReproReport {
    fn new(name: &str, parameters: &[(&str, f64)]) -> Self {
        ReproReport {
            name: name.to_string(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            claims: Vec::new(),
            table: None,
            pass: true,
            wall_time: None,
        }
    }

    fn push(&mut self, claim: Claim) {
        self.pass &= claim.pass;
        self.claims.push(claim);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.pass)
    }
}

pub const REPORT_NAMES: [&str; 5] = ["entmask", "maskcon", "counterexample-d2", "hide-not-mask", "bott"];

/// Entanglement cost table `(d, E_C, E_C^R)`, each row checked against the
/// integer case split, and rows `d <= 6` against the entropy of `M|0>` for
/// the minimal complex and real maskers.
pub fn repro_entmask(d_max: usize) -> Result<ReproReport> {
    let mut report = ReproReport::new("entmask", &[("d_max", d_max as f64)]);
    let mut table = Table::new(&["d", "E_C", "E_C_R", "C", "C_R"]);
    for row in masking_entanglement_table(d_max)? {
        let d = row.d;
        table.rows.push(vec![d as f64, row.e_c as f64, row.e_c_real as f64, row.c, row.c_real]);
        report.push(Claim::equal(
            format!("d={d} E_C closed form"),
            entanglement_cost_formula(d, false)? as f64,
            row.e_c as f64,
            0.0,
        ));
        report.push(Claim::equal(
            format!("d={d} E_C^R closed form"),
            entanglement_cost_formula(d, true)? as f64,
            row.e_c_real as f64,
            0.0,
        ));
        if d <= 6 {
            for (real, label, expected, m) in
                [(false, "E_C", row.e_c, kappa_tilde(d)?), (true, "E_C^R", row.e_c_real, kappa_real(d)?)]
            {
                let masker = canonical_real_masker(d, m, real)?;
                let entropy = entropy_of_entanglement(&masker.image(0), masker.shape())?;
                report.push(Claim::equal(
                    format!("d={d} {label} entropy of minimal masker image"),
                    expected as f64,
                    entropy,
                    1e-9,
                ));
            }
        }
    }
    report.table = Some(table);
    Ok(report)
}

/// `C(M|psi>)` against the curve `sqrt(2 - 2P - 2P x^2)` in the robustness
/// of imaginarity `x`, on `n` random pure states.
pub fn repro_maskcon(d: usize, n: usize, seed: u64) -> Result<ReproReport> {
    if d < 3 {
        return Err(Error::NotApplicable(format!("the concurrence curve needs d >= 3, got {d}")));
    }
    let masker = canonical_real_masker(d, kappa_tilde(d)?, false)?;
    repro_maskcon_with(&masker, n, seed)
}

pub fn repro_maskcon_with(masker: &Masker, n: usize, seed: u64) -> Result<ReproReport> {
    let d = masker.input_dim();
    if d < 3 {
        return Err(Error::NotApplicable(format!("the concurrence curve needs d >= 3, got {d}")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let p = masker.purity();
    let curve = |x: f64| (2.0 - 2.0 * p - 2.0 * p * x * x).max(0.0).sqrt();
    let concurrence = |psi: &Ket| -> Result<f64> { concurrence_pure(&masker.apply_ket(psi)?, masker.shape()) };
    let mut report =
        ReproReport::new("maskcon", &[("d", d as f64), ("n", n as f64), ("seed", seed as f64), ("purity", p)]);

    let mut points = Vec::with_capacity(n);
    for index in 0..n as u64 {
        let rho = random_state_indexed(d, StateKind::PureComplex, seed, index);
        let x = robustness_of_imaginarity(&rho);
        points.push((x, concurrence(&rho.principal_ket())?));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let max_gap = points.iter().map(|&(x, c)| (c - curve(x)).abs()).fold(0.0, f64::max);
    report.push(Claim::at_most("max |C - curve| over samples", 1e-8, max_gap));
    let rises = points.windows(2).filter(|w| w[1].1 > w[0].1 + 1e-9).count();
    report.push(Claim::equal("increases of C along sorted imaginarity", 0.0, rises as f64, 0.0));

    let real = Ket::from_real(&vec![1.0 / (d as f64).sqrt(); d])?;
    report.push(Claim::equal("C at imaginarity 0", (2.0 - 2.0 * p).sqrt(), concurrence(&real)?, 1e-10));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); d];
    amps[0] = C64::new(h, 0.0);
    amps[1] = C64::new(0.0, h);
    let maximal = Ket::new(amps)?;
    report.push(Claim::equal(
        "imaginarity of (|0> + i|1>)/sqrt2",
        1.0,
        robustness_of_imaginarity(&maximal.density()),
        1e-12,
    ));
    report.push(Claim::equal("C at imaginarity 1", (2.0 - 4.0 * p).max(0.0).sqrt(), concurrence(&maximal)?, 1e-10));

    let mut table = Table::new(&["imaginarity", "concurrence", "curve"]);
    table.rows = points.iter().map(|&(x, c)| vec![x, c, curve(x)]).collect();
    report.table = Some(table);
    Ok(report)
}

pub fn repro_counterexample_d2() -> Result<ReproReport> {
    let ce = counterexample_d2();
    let mut report = ReproReport::new("counterexample-d2", &[]);
    report.push(Claim::equal("masking purity", 0.375, ce.masker.purity(), 1e-12));
    report.push(Claim::equal("output concurrence", 2.0 / 3f64.sqrt(), ce.concurrence_out, 1e-12));
    report.push(Claim::equal("purity bound sqrt(2(1-P))", 5f64.sqrt() / 2.0, ce.bound, 1e-12));
    report.push(Claim::greater("output concurrence exceeds the bound", ce.bound, ce.concurrence_out));
    let s = 3f64.sqrt().recip();
    let target = Ket::from_real(&[s, 0.0, 0.0, 0.0, s, 0.0, 0.0, 0.0, -s])?;
    report.push(Claim::equal("fidelity with (|00>+|11>-|22>)/sqrt3", 1.0, ce.output.inner(&target).norm_sqr(), 1e-12));
    Ok(report)
}

/// One-sided hiding in `d = 4`: sampled members keep the magic-basis
/// A-marginal at `I/2`, while the B-marginal moves.
pub fn repro_hide_not_mask(n: usize, seed: u64) -> Result<ReproReport> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let magic = magic_basis_masker();
    let half = DensityMatrix::maximally_mixed(2);
    let mut report = ReproReport::new("hide-not-mask", &[("n", n as f64), ("seed", seed as f64)]);
    let (mut max_a, mut max_b, mut max_residual) = (0.0f64, 0.0f64, 0.0f64);
    for index in 0..n as u64 {
        let rho = ConstrainedStates.sample(seed, index);
        max_residual = constrained_residuals(&rho)?.iter().fold(max_residual, |m, r| m.max(r.abs()));
        let (a, b) = magic.marginals(&rho)?;
        max_a = max_a.max(a.hs_distance(&half));
        max_b = max_b.max(b.hs_distance(&half));
    }
    report.push(Claim::at_most("max constraint residual of samples", 1e-12, max_residual));
    report.push(Claim::at_most("max A-marginal deviation from I/2", 1e-9, max_a));
    report.push(Claim::greater("max B-marginal deviation from I/2", 0.05, max_b));
    let (a, b) = magic.marginals(&constrained_witness())?;
    report.push(Claim::at_most("witness A-marginal deviation", 1e-12, a.hs_distance(&half)));
    report.push(Claim::equal("witness B-marginal deviation", 2f64.sqrt() / 4.0, b.hs_distance(&half), 1e-12));
    Ok(report)
}

/// `kappa^R(d) / kappa(d)` for `d = 2..=d_max`, checked for period 8.
pub fn repro_bott(d_max: usize) -> Result<ReproReport> {
    if d_max < 2 {
        return Err(Error::invalid(format!("d_max must be at least 2, got {d_max}")));
    }
    let mut report = ReproReport::new("bott", &[("d_max", d_max as f64)]);
    let mut table = Table::new(&["d", "kappa", "kappa_R", "kappa_tilde", "ratio"]);
    let mut ratios = Vec::new();
    for d in 2..=d_max {
        let (k, kr) = (kappa(d)?, kappa_real(d)?);
        let ratio = kr as f64 / k as f64;
        table.rows.push(vec![d as f64, k as f64, kr as f64, kappa_tilde(d)? as f64, ratio]);
        ratios.push(ratio);
        let expected = if matches!(d % 8, 0 | 1 | 7) { 1.0 } else { 2.0 };
        report.push(Claim::equal(format!("d={d} ratio"), expected, ratio, 0.0));
    }
    let breaks = ratios.windows(9).filter(|w| w[0] != w[8]).count();
    report.push(Claim::equal("ratios differing from d+8", 0.0, breaks as f64, 0.0));
    report.table = Some(table);
    Ok(report)
}

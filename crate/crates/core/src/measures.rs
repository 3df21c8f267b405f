//! Entanglement and imaginarity measures, and the closed forms tying them
//! to maskers.

use serde::{Deserialize, Serialize};

use crate::eig::schatten_1_norm;
use crate::error::{Error, Result};
use crate::hr::{kappa_real, kappa_tilde};
use crate::masking::{purity_closed_form, Masker};
use crate::state::{pure_marginals, schmidt_coefficients, BipartiteShape, DensityMatrix, Ket};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureName {
    Concurrence,
    EntropyOfEntanglement,
    RobustnessOfImaginarity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub name: MeasureName,
    pub value: f64,
}

/// `sqrt(2 (1 - tr rho_A^2))`
pub fn concurrence_pure(psi: &Ket, shape: BipartiteShape) -> Result<f64> {
    let (a, _) = pure_marginals(psi, shape)?;
    Ok((2.0 * (1.0 - a.purity())).max(0.0).sqrt())
}

/// Von Neumann entropy of either marginal, in bits.
pub fn entropy_of_entanglement(psi: &Ket, shape: BipartiteShape) -> Result<f64> {
    let s = schmidt_coefficients(psi, shape)?;
    Ok(s.iter()
        .map(|x| (x * x).clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0))
}

/// `||rho - rho^T||_1 / 2`, transposing in the computational basis.
pub fn robustness_of_imaginarity(rho: &DensityMatrix) -> f64 {
    0.5 * schatten_1_norm(&rho.antisymmetric_part()).expect("density matrices are square")
}

/// Minimal entanglement needed to mask real states of dimension `d`, over
/// complex and over real bipartite spaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementRow {
    pub d: usize,
    pub e_c: u32,
    pub e_c_real: u32,
    pub c: f64,
    pub c_real: f64,
}

/// `E_C = log2 kappa~(d)`, `E_C^R = log2 kappa^R(d)` and the matching
/// concurrences `sqrt(2 (1 - 1/k))`, for `d = 2..=d_max`.
pub fn masking_entanglement_table(d_max: usize) -> Result<Vec<EntanglementRow>> {
    if d_max < 2 {
        return Err(Error::invalid(format!("d_max must be at least 2, got {d_max}")));
    }
    (2..=d_max)
        .map(|d| {
            let k = kappa_tilde(d)?;
            let kr = kappa_real(d)?;
            Ok(EntanglementRow {
                d,
                e_c: k.trailing_zeros(),
                e_c_real: kr.trailing_zeros(),
                c: (2.0 * (1.0 - 1.0 / k as f64)).sqrt(),
                c_real: (2.0 * (1.0 - 1.0 / kr as f64)).sqrt(),
            })
        })
        .collect()
}

/// `E_C` by the integer case split: `1` for `d = 2` and `floor((d-1)/2)`
/// otherwise; over real spaces `floor((d-1)/2)`, plus one when `d mod 8` is
/// 2 through 6.
pub fn entanglement_cost_formula(d: usize, real: bool) -> Result<u32> {
    if d < 2 {
        return Err(Error::invalid(format!("d must be at least 2, got {d}")));
    }
    let half = ((d - 1) / 2) as u32;
    Ok(match (real, d) {
        (false, 2) => 1,
        (false, _) => half,
        (true, _) if matches!(d % 8, 2..=6) => half + 1,
        (true, _) => half,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoiCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
    pub imaginarity: f64,
}

fn require_d3(masker: &Masker) -> Result<()> {
    if masker.input_dim() < 3 {
        return Err(Error::NotApplicable("the concurrence identities need d >= 3".into()));
    }
    Ok(())
}

/// Compares `C(M(rho))` with `sqrt(2 - 2P - 2P I_R(rho)^2)` for a pure input.
pub fn concurrence_roi_check(masker: &Masker, rho: &DensityMatrix, purity_tol: f64) -> Result<RoiCheck> {
    require_d3(masker)?;
    if !rho.is_pure(purity_tol) {
        return Err(Error::NotApplicable("the identity holds for pure inputs only".into()));
    }
    let out = masker.apply_ket(&rho.principal_ket())?;
    let lhs = concurrence_pure(&out, masker.shape())?;
    let p = masker.purity();
    let ir = robustness_of_imaginarity(rho);
    let rhs = (2.0 - 2.0 * p - 2.0 * p * ir * ir).max(0.0).sqrt();
    Ok(RoiCheck { lhs, rhs, deviation: (lhs - rhs).abs(), imaginarity: ir })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceBounds {
    /// `C(M(rho))`, pure inputs only.
    pub concurrence: Option<f64>,
    /// `sqrt(2 (1 - tr rho_A^2))` and the same for B.
    pub marginal_a: f64,
    pub marginal_b: f64,
    /// `sqrt(2 - P (2 + ||rho - rho^T||_hs^2))`
    pub imaginarity_bound: f64,
    /// `sqrt(2 (1 - P))`
    pub purity_bound: f64,
    /// `purity_bound` minus the concurrence (pure) or the smaller marginal bound.
    pub slack: f64,
    pub holds: bool,
}

/// Evaluates the chain
/// `C <= min(marginal_a, marginal_b) <= imaginarity_bound <= purity_bound`,
/// with equality in the first two links for pure inputs.
pub fn concurrence_bound_check(masker: &Masker, rho: &DensityMatrix, tol: f64) -> Result<ConcurrenceBounds> {
    require_d3(masker)?;
    let (ra, rb) = masker.marginals(rho)?;
    let marginal_a = (2.0 * (1.0 - ra.purity())).max(0.0).sqrt();
    let marginal_b = (2.0 * (1.0 - rb.purity())).max(0.0).sqrt();
    let p = masker.purity();
    let x = rho.antisymmetric_part().hs_norm().powi(2);
    let imaginarity_bound = (2.0 - p * (2.0 + x)).max(0.0).sqrt();
    let purity_bound = (2.0 * (1.0 - p)).max(0.0).sqrt();
    let concurrence = if rho.is_pure(tol) {
        Some(concurrence_pure(&masker.apply_ket(&rho.principal_ket())?, masker.shape())?)
    } else {
        None
    };
    let min_marginal = marginal_a.min(marginal_b);
    let mut holds = min_marginal <= imaginarity_bound + tol && imaginarity_bound <= purity_bound + tol;
    if let Some(c) = concurrence {
        holds &= (c - min_marginal).abs() <= tol && (c - imaginarity_bound).abs() <= tol;
    }
    let slack = purity_bound - concurrence.unwrap_or(min_marginal);
    Ok(ConcurrenceBounds { concurrence, marginal_a, marginal_b, imaginarity_bound, purity_bound, slack, holds })
}

/// `(tr rho_A^2 + tr rho_B^2, lower, upper)` for the sandwich
/// `2P (1 + (2/d) I_R^2) <= sum <= 2P (1 + I_R^2)`.
pub fn purity_sum_sandwich(masker: &Masker, rho: &DensityMatrix) -> Result<(f64, f64, f64)> {
    let (a, b) = purity_closed_form(masker, rho)?;
    let ir = robustness_of_imaginarity(rho);
    let p = masker.purity();
    let d = masker.input_dim() as f64;
    Ok((a + b, 2.0 * p * (1.0 + 2.0 / d * ir * ir), 2.0 * p * (1.0 + ir * ir)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masking::{canonical_real_masker, masker_from_spectrum};
    use crate::matrix::{pauli, ComplexMatrix, C64, ZERO};
    use crate::state::{random_ket, random_state_indexed, StateKind};

    fn sq(n: usize) -> BipartiteShape {
        BipartiteShape::square(n).unwrap()
    }

    #[test]
    fn concurrence_examples() {
        let bell = Ket::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((concurrence_pure(&bell, sq(2)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(concurrence_pure(&Ket::basis(4, 0), sq(2)).unwrap(), 0.0);
        let mut amps = [0.0; 9];
        amps[0] = 1.0;
        amps[4] = 1.0;
        amps[8] = -1.0;
        let c = concurrence_pure(&Ket::from_real(&amps).unwrap(), sq(3)).unwrap();
        assert!((c - 2.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn concurrence_matches_schmidt_form() {
        for i in 0..50 {
            let psi = random_ket(12, false, 3, i);
            let shape = BipartiteShape::new(3, 4).unwrap();
            let s = schmidt_coefficients(&psi, shape).unwrap();
            let oracle = 2.0 * (1.0 - s.iter().map(|x| x.powi(4)).sum::<f64>());
            assert!((concurrence_pure(&psi, shape).unwrap().powi(2) - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_examples() {
        let bell = Ket::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((entropy_of_entanglement(&bell, sq(2)).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(entropy_of_entanglement(&Ket::basis(4, 0), sq(2)).unwrap(), 0.0);
        let mut amps = vec![0.0; 16];
        for i in 0..4 {
            amps[i * 4 + i] = 1.0;
        }
        assert!((entropy_of_entanglement(&Ket::from_real(&amps).unwrap(), sq(4)).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn robustness_examples() {
        let real = random_state_indexed(4, StateKind::MixedReal, 1, 0);
        assert_eq!(robustness_of_imaginarity(&real), 0.0);
        let plus_y = DensityMatrix::new((&ComplexMatrix::identity(2) + &pauli::y()).scale_real(0.5)).unwrap();
        assert!((robustness_of_imaginarity(&plus_y) - 1.0).abs() < 1e-14);
        for i in 0..50 {
            let rho = random_state_indexed(5, StateKind::PureComplex, 8, i);
            let hs = rho.antisymmetric_part().hs_norm();
            assert!((robustness_of_imaginarity(&rho) - hs / 2f64.sqrt()).abs() < 1e-10);
            // ||rho - rho^T||_1 = sqrt2 ||rho - rho^T||_hs for pure states
            let eig_sum: f64 = crate::eig::eigenvalues(&rho.antisymmetric_part()).unwrap().iter().map(|x| x.abs()).sum();
            assert!((eig_sum - 2f64.sqrt() * hs).abs() < 1e-9);
        }
    }

    #[test]
    fn table_values() {
        let t = masking_entanglement_table(17).unwrap();
        assert_eq!((t[0].d, t[0].e_c, t[0].e_c_real), (2, 1, 1));
        assert_eq!((t[3].d, t[3].e_c, t[3].e_c_real), (5, 2, 3));
        assert_eq!((t[5].d, t[5].e_c, t[5].e_c_real), (7, 3, 3));
        assert_eq!((t[7].d, t[7].e_c, t[7].e_c_real), (9, 4, 4));
        for row in &t {
            assert_eq!(row.e_c, entanglement_cost_formula(row.d, false).unwrap());
            assert_eq!(row.e_c_real, entanglement_cost_formula(row.d, true).unwrap());
        }
        assert!(t.windows(2).all(|w| w[0].e_c <= w[1].e_c && w[0].e_c_real <= w[1].e_c_real));
        assert!(masking_entanglement_table(1).is_err());
    }

    #[test]
    fn roi_identity() {
        let m = canonical_real_masker(3, 2, false).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let imag = Ket::new(vec![C64::new(h, 0.0), C64::new(0.0, h), ZERO]).unwrap();
        let r = concurrence_roi_check(&m, &imag.density(), 1e-9).unwrap();
        assert!(r.deviation < 1e-9 && (r.imaginarity - 1.0).abs() < 1e-12);
        let real = Ket::from_real(&[0.3, -0.5, 0.8]).unwrap();
        let r = concurrence_roi_check(&m, &real.density(), 1e-9).unwrap();
        assert!((r.lhs - (2.0 * (1.0 - m.purity())).sqrt()).abs() < 1e-12);
        let five = canonical_real_masker(5, 4, false).unwrap();
        for i in 0..200 {
            let rho = random_state_indexed(5, StateKind::PureComplex, 12, i);
            assert!(concurrence_roi_check(&five, &rho, 1e-9).unwrap().deviation < 1e-8);
        }
        let mixed = random_state_indexed(3, StateKind::MixedComplex, 1, 0);
        assert!(concurrence_roi_check(&m, &mixed, 1e-9).is_err());
        let qubit = crate::masking::counterexample_d2().masker;
        assert!(concurrence_roi_check(&qubit, &DensityMatrix::maximally_mixed(2), 1e-9).is_err());
    }

    #[test]
    fn bound_chain() {
        let m = masker_from_spectrum(3, &[(0.25, 2), (0.125, 4)], false).unwrap();
        let real = Ket::from_real(&[0.6, 0.0, 0.8]).unwrap().density();
        let b = concurrence_bound_check(&m, &real, 1e-9).unwrap();
        assert!(b.holds && b.slack.abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let imag = Ket::new(vec![C64::new(h, 0.0), C64::new(0.0, h), ZERO]).unwrap().density();
        let b = concurrence_bound_check(&m, &imag, 1e-9).unwrap();
        assert!(b.holds && b.slack > 0.1);
        for i in 0..20 {
            let mixed = random_state_indexed(3, StateKind::MixedReal, 5, i);
            let b = concurrence_bound_check(&m, &mixed, 1e-9).unwrap();
            assert!(b.holds && b.concurrence.is_none());
        }
    }

    #[test]
    fn sandwich_holds() {
        for (d, m) in [(3, 2), (4, 2), (5, 4)] {
            let mk = canonical_real_masker(d, m, false).unwrap();
            for i in 0..50 {
                let rho = random_state_indexed(d, StateKind::MixedComplex, 41, i);
                let (sum, lo, hi) = purity_sum_sandwich(&mk, &rho).unwrap();
                assert!(lo <= sum + 1e-12 && sum <= hi + 1e-12);
            }
        }
    }
}

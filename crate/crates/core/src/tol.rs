//! Default tolerances. Every check that takes a tolerance argument accepts an
//! override; these are the values used when none is given.

/// Normalization of kets and traces.
pub const NORM: f64 = 1e-9;
/// Hermiticity, relative to the Hilbert-Schmidt norm of the input.
pub const HERM: f64 = 1e-9;
/// Smallest admissible eigenvalue of a density matrix is `-PSD`.
pub const PSD: f64 = 1e-9;
/// Eigendecomposition reconstruction, relative.
pub const EIG: f64 = 1e-10;
/// Partial-sum slack in majorization tests.
pub const MAJOR: f64 = 1e-9;
/// Hurwitz-Radon relations, absolute on operator HS-norm deviations.
pub const HR: f64 = 1e-10;
/// Isometry defect `||M^dagger M - I||_hs`.
pub const ISO: f64 = 1e-10;
/// Eigenvalues below this are treated as zero when grouping spectra.
pub const SPECTRUM_ZERO: f64 = 1e-10;
/// Relative gap under which eigenvalues are merged into one multiplicity.
pub const SPECTRUM_MERGE: f64 = 1e-8;

/// Named tolerance set, overridable per run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub norm: f64,
    pub herm: f64,
    pub psd: f64,
    pub eig: f64,
    pub major: f64,
    pub hr: f64,
    pub iso: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { norm: NORM, herm: HERM, psd: PSD, eig: EIG, major: MAJOR, hr: HR, iso: ISO }
    }
}

impl Tolerances {
    /// Sets a tolerance by name; unknown names return `false`.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "norm" => &mut self.norm,
            "herm" => &mut self.herm,
            "psd" => &mut self.psd,
            "eig" => &mut self.eig,
            "major" => &mut self.major,
            "hr" => &mut self.hr,
            "iso" => &mut self.iso,
            _ => return false,
        };
        *slot = value;
        true
    }
}

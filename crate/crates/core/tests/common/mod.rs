#![allow(dead_code)]

use qmask_core::masking::{
    canonical_real_masker, magic_basis_masker, masker_from_spectrum, qubit_complex_masker, Masker,
};
use qmask_core::matrix::{ComplexMatrix, C64};
use qmask_core::{kappa, kappa_real, kappa_tilde};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(rng: &mut ChaCha8Rng, real: bool) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = if real { 0.0 } else { StandardNormal.sample(rng) };
    C64::new(re, im)
}

/// Gram-Schmidt on Gaussian columns: a Haar-ish isometry `rows x cols`.
pub fn random_isometry(rows: usize, cols: usize, real: bool, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut done: Vec<Vec<C64>> = Vec::new();
    while done.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian(&mut rng, real)).collect();
        for u in &done {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            let v: Vec<C64> = v.iter().map(|z| z / n).collect();
            out.set_column(done.len(), &v);
            done.push(v);
        }
    }
    out
}

pub fn random_orthogonal(n: usize, seed: u64) -> ComplexMatrix {
    random_isometry(n, n, true, seed)
}

pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = C64::new(StandardNormal.sample(&mut rng), 0.0);
        for j in i + 1..n {
            let z = gaussian(&mut rng, false);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// Every masker family the crate can build, labelled.
pub fn constructed_maskers() -> Vec<(String, Masker)> {
    let mut out = Vec::new();
    for d in 2..=9 {
        let m = kappa_tilde(d).unwrap();
        out.push((format!("canonical complex d={d}"), canonical_real_masker(d, m, false).unwrap()));
        let mr = kappa_real(d).unwrap();
        out.push((format!("canonical real d={d}"), canonical_real_masker(d, mr, true).unwrap()));
    }
    out.push(("canonical d=3 m=4".into(), canonical_real_masker(3, 4, false).unwrap()));
    out.push(("magic".into(), magic_basis_masker()));
    let k3 = kappa(3).unwrap();
    out.push(("spectrum d=3".into(), masker_from_spectrum(3, &[(0.1, k3), (0.4, k3)], false).unwrap()));
    out.push(("spectrum d=5 real".into(), masker_from_spectrum(5, &[(0.125, 8)], true).unwrap()));
    out.push(("qubit (1/4,1/4,1/2)".into(), qubit_complex_masker(&[0.25, 0.25, 0.5], &[1, 1, -1]).unwrap()));
    out.push(("qubit (1/2,1/2)".into(), qubit_complex_masker(&[0.5, 0.5], &[1, -1]).unwrap()));
    out
}

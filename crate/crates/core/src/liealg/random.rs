//! Seeded random matrices for property tests and twirls.
//!
//! All sampling goes through [`SeededRng`], a ChaCha8 stream (counter-based)
//! seeded with `ChaCha8Rng::seed_from_u64`. Normal variates come from
//! `rand_distr::StandardNormal`. Both are platform-independent, so a given
//! seed produces bit-identical matrices everywhere.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::liealg::matrix::{ComplexMatrix, DensityMatrix, HermitianOperator};

/// Single-owner seeded generator.
#[derive(Clone, Debug)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.random::<f64>()
    }

    /// Complex normal with `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(s * self.normal(), s * self.normal())
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidDimension(format!("need n >= 2, got {n}")))
    } else {
        Ok(())
    }
}

/// Ginibre matrix with i.i.d. complex normal entries.
pub fn ginibre(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let data = (0..n * n).map(|_| rng.complex_normal()).collect();
    ComplexMatrix::from_vec(n, data).expect("finite gaussian entries")
}

/// `(G + G†)/2` for a Ginibre `G`.
pub fn random_hermitian(n: usize, rng: &mut SeededRng) -> HermitianOperator {
    HermitianOperator::from_hermitian_part(&ginibre(n, rng))
}

/// `G G† / Tr(G G†)` for a Ginibre `G`.
pub fn random_density(n: usize, rng: &mut SeededRng) -> DensityMatrix {
    let g = ginibre(n, rng);
    let ggd = &g * &g.adjoint();
    let tr = ggd.trace().re;
    let m = ggd.scale(1.0 / tr).hermitian_part();
    DensityMatrix::new(m).expect("Wishart sample is a valid state")
}

/// Haar-distributed unitary.
///
/// Columns of a Ginibre matrix are orthonormalized by two passes of modified
/// Gram–Schmidt. This is the QR factor whose `R` has a positive real diagonal,
/// i.e. the phase-corrected QR, so the result is unitarily invariant.
pub fn haar_unitary(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let g = ginibre(n, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..n {
                    let ck = cols[k][i];
                    cols[j][i] -= proj * ck;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Seeded front door for [`random_hermitian`]; rejects `n < 2`.
pub fn random_hermitian_seeded(n: usize, seed: u64) -> Result<HermitianOperator> {
    check_dim(n)?;
    Ok(random_hermitian(n, &mut SeededRng::new(seed)))
}

/// Seeded front door for [`random_density`]; rejects `n < 2`.
pub fn random_density_seeded(n: usize, seed: u64) -> Result<DensityMatrix> {
    check_dim(n)?;
    Ok(random_density(n, &mut SeededRng::new(seed)))
}

/// Seeded front door for [`haar_unitary`]; rejects `n < 2`.
pub fn haar_unitary_seeded(n: usize, seed: u64) -> Result<ComplexMatrix> {
    check_dim(n)?;
    Ok(haar_unitary(n, &mut SeededRng::new(seed)))
}

//! Numerical checks of the structural results: equivariant twirling of
//! bilinear maps, commutator factorization, uniqueness of the double
//! commutator on `Im ad_L`, the curvature bound, and `ad_L²` spectra.
//!
//! Coordinates are those of [`coefficients`]: `X = ½ Σ x_a λ_a`. A bilinear
//! map `Ξ: su(n) × su(n) → su(n)` is a tensor with
//! `Ξ(x, y)_c = Σ_ab c_abc x_a y_b`; all maps are Hermitian-valued, so
//! commutators enter with a factor `−i` (e.g. the Lie bracket tensor is
//! `−i[X, Y] ↦ f_abc`).
//!
//! Randomized checks derive the generator for trial `k` from `seed + k` and
//! reduce in a fixed order, so results do not depend on the thread count.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::brackets::CommutantProjector;
use crate::error::{Error, Result};
use crate::liealg::{
    coefficients_unchecked, haar_unitary, random_density, random_hermitian, standard_basis, structure_constants, Basis,
    ComplexMatrix, HermitianOperator, SeededRng,
};

/// Samples per parallel work unit; partial sums are combined in index order.
const CHUNK: usize = 128;

/// Real tensor `c_abc` of a bilinear map on `su(n)` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearMapTensor {
    n: usize,
    d: usize,
    c: Vec<f64>,
}

impl BilinearMapTensor {
    pub fn zeros(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(format!("n must be at least 2, got {n}")));
        }
        let d = n * n - 1;
        Ok(Self {
            n,
            d,
            c: vec![0.0; d * d * d],
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        let d = t.d;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    t.c[(a * d + b) * d + c] = f(a, b, c);
                }
            }
        }
        Ok(t)
    }

    /// Entries i.i.d. standard normal.
    pub fn random(n: usize, rng: &mut SeededRng) -> Result<Self> {
        Self::from_fn(n, |_, _, _| rng.normal())
    }

    /// `c_abc = Tr(F(½λ_a, ½λ_b) λ_c)` for a Hermitian-valued bilinear `F`.
    pub fn from_bilinear_map(basis: &Basis, f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let half: Vec<ComplexMatrix> = basis.elements().iter().map(|l| l.scale(0.5)).collect();
        let mut t = Self::zeros(basis.dim())?;
        let d = t.d;
        for a in 0..d {
            for b in 0..d {
                let out = f(&half[a], &half[b]);
                if !out.is_finite() {
                    return Err(Error::NonFinite("bilinear map value".into()));
                }
                let coords = coefficients_unchecked(&out, basis);
                t.c[(a * d + b) * d..(a * d + b + 1) * d].copy_from_slice(&coords);
            }
        }
        Ok(t)
    }

    /// The Lie bracket `−i[X, Y]`, i.e. `c_abc = f_abc`.
    pub fn bracket(basis: &Basis) -> Result<Self> {
        let f = structure_constants(basis)?;
        Ok(Self {
            n: basis.dim(),
            d: basis.len(),
            c: f.as_slice().to_vec(),
        })
    }

    /// The traceless anticommutator `{X, Y} − (2/n) Tr(XY) I`, i.e. `c_abc = d_abc`.
    /// Identically zero for `n = 2`.
    pub fn symmetric_product(basis: &Basis) -> Result<Self> {
        let n = basis.dim() as f64;
        Self::from_bilinear_map(basis, |x, y| {
            let mut out = x.anticomm(y);
            let tr = (x * y).trace();
            for i in 0..basis.dim() {
                out[(i, i)] -= tr * (2.0 / n);
            }
            out
        })
    }

    /// Torsion-generated map `Ξ(L, ρ) = −i K(L, Φ(ρ)) = −2i[L, Φ(ρ)]` for a
    /// linear `Φ` given as a `d × d` coordinate matrix.
    pub fn torsion_generated(basis: &Basis, phi: &DMatrix<f64>) -> Result<Self> {
        let d = basis.len();
        if phi.nrows() != d || phi.ncols() != d {
            return Err(Error::DimensionMismatch {
                left: phi.nrows(),
                right: d,
            });
        }
        Self::from_bilinear_map(basis, |l, rho| {
            let x: Vec<f64> = coefficients_unchecked(rho, basis);
            let y = phi * nalgebra::DVector::from_vec(x);
            let mut p = ComplexMatrix::zeros(basis.dim());
            for (ya, la) in y.iter().zip(basis.elements()) {
                p.axpy(0.5 * ya, la);
            }
            l.comm(&p).scale(2.0).mul_neg_i()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `d = n² − 1`.
    pub fn len(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.c[(a * self.d + b) * self.d + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.c.iter().zip(&other.c).map(|(a, b)| a * b).sum()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            c: self.c.iter().map(|x| s * x).collect(),
            ..self.clone()
        }
    }

    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a += b;
        }
    }

    /// `Ξ(x, y)`.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut out = vec![0.0; d];
        for a in 0..d {
            for b in 0..d {
                let w = x[a] * y[b];
                if w != 0.0 {
                    let row = &self.c[(a * d + b) * d..(a * d + b + 1) * d];
                    for (o, v) in out.iter_mut().zip(row) {
                        *o += w * v;
                    }
                }
            }
        }
        out
    }

    /// Matrix of the linear map `y ↦ Ξ(ℓ, y)`: entry `(c, b) = Σ_a c_abc ℓ_a`.
    pub fn slice(&self, ell: &[f64]) -> DMatrix<f64> {
        let d = self.d;
        DMatrix::from_fn(d, d, |c, b| (0..d).map(|a| ell[a] * self.get(a, b, c)).sum())
    }

    /// Transported copy `Ξ^R(x, y) = Rᵀ Ξ(R x, R y)`:
    /// `c'_abc = Σ R_a'a R_b'b R_c'c c_a'b'c'`.
    pub fn transport(&self, r: &AdjointRotation) -> Self {
        let d = self.d;
        let rm = &r.r;
        let mut t1 = vec![0.0; d * d * d];
        for ap in 0..d {
            for a in 0..d {
                let w = rm[(ap, a)];
                if w == 0.0 {
                    continue;
                }
                for bc in 0..d * d {
                    t1[a * d * d + bc] += w * self.c[ap * d * d + bc];
                }
            }
        }
        let mut t2 = vec![0.0; d * d * d];
        for a in 0..d {
            for bp in 0..d {
                for b in 0..d {
                    let w = rm[(bp, b)];
                    if w == 0.0 {
                        continue;
                    }
                    for c in 0..d {
                        t2[(a * d + b) * d + c] += w * t1[(a * d + bp) * d + c];
                    }
                }
            }
        }
        let mut t3 = vec![0.0; d * d * d];
        for ab in 0..d * d {
            for cp in 0..d {
                let v = t2[ab * d + cp];
                if v == 0.0 {
                    continue;
                }
                for c in 0..d {
                    t3[ab * d + c] += rm[(cp, c)] * v;
                }
            }
        }
        Self {
            n: self.n,
            d,
            c: t3,
        }
    }
}

/// `Ad_g` in coordinates: `R_ab = ½ Tr(λ_a g λ_b g†)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointRotation {
    r: DMatrix<f64>,
}

impl AdjointRotation {
    /// `g` must be unitary.
    pub fn from_unitary(g: &ComplexMatrix, basis: &Basis) -> Result<Self> {
        g.same_dim(basis.get(0))?;
        let d = basis.len();
        let gd = g.adjoint();
        let mut r = DMatrix::zeros(d, d);
        for b in 0..d {
            let conj = &(g * &**basis.get(b)) * &gd;
            let col = coefficients_unchecked(&conj, basis);
            for a in 0..d {
                r[(a, b)] = 0.5 * col[a];
            }
        }
        Ok(Self { r })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// `‖R Rᵀ − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.r.nrows();
        (&self.r * self.r.transpose() - DMatrix::identity(d, d)).amax()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { r: &self.r * &other.r }
    }
}

/// Clock–shift operators `X^a Z^b`, `a, b < n`.
pub fn weyl_frame(n: usize) -> Vec<ComplexMatrix> {
    let omega = 2.0 * std::f64::consts::PI / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut m = ComplexMatrix::zeros(n);
            for j in 0..n {
                m[((j + a) % n, j)] = Complex64::from_polar(1.0, omega * (b * j) as f64);
            }
            out.push(m);
        }
    }
    out
}

/// Haar twirl `(1/N) Σ_g Ξ^{R(g)}`.
///
/// Each Haar sample `g` is combined with the `n²` Weyl operators `w`, and the
/// copies for `g·w` are averaged before entering the sum. The Weyl average is
/// itself a group average, so the estimator stays unbiased while the part of
/// the sampling noise that is not Weyl-invariant cancels exactly.
pub fn twirl(xi: &BilinearMapTensor, samples: usize, seed: u64) -> Result<BilinearMapTensor> {
    if samples == 0 {
        return Err(Error::InvalidConfig("twirl needs at least one sample".into()));
    }
    let basis = standard_basis(xi.n)?;
    let frame: Vec<AdjointRotation> = weyl_frame(xi.n)
        .iter()
        .map(|w| AdjointRotation::from_unitary(w, &basis))
        .collect::<Result<_>>()?;
    let weight = 1.0 / (samples * frame.len()) as f64;
    let chunks: Vec<BilinearMapTensor> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let mut acc = BilinearMapTensor::zeros(xi.n).expect("validated");
            for s in k * CHUNK..((k + 1) * CHUNK).min(samples) {
                let mut rng = SeededRng::new(seed.wrapping_add(s as u64));
                let g = haar_unitary(xi.n, &mut rng);
                let rg = AdjointRotation::from_unitary(&g, &basis).expect("validated");
                for rw in &frame {
                    acc.add_assign(&xi.transport(&rg.compose(rw)));
                }
            }
            acc
        })
        .collect();
    let mut out = BilinearMapTensor::zeros(xi.n)?;
    for c in &chunks {
        out.add_assign(c);
    }
    Ok(out.scaled(weight))
}

/// `max_g ‖Ξ^{R(g)} − Ξ‖_F` over `samples` fresh Haar elements.
pub fn equivariance_defect(xi: &BilinearMapTensor, samples: usize, seed: u64) -> Result<f64> {
    let basis = standard_basis(xi.n)?;
    let worst = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = SeededRng::new(seed.wrapping_add(s as u64));
            let g = haar_unitary(xi.n, &mut rng);
            let r = AdjointRotation::from_unitary(&g, &basis).expect("validated");
            xi.transport(&r).distance(xi)
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// Least-squares fit to the invariant tensors `f` (and `d` for `n ≥ 3`).
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantFit {
    /// Coefficients of `f` and, for `n ≥ 3`, of `d`.
    pub coefficients: Vec<f64>,
    /// `‖Ξ − fit‖_F`.
    pub residual: f64,
}

pub fn equivariant_fit(xi: &BilinearMapTensor) -> Result<EquivariantFit> {
    let basis = standard_basis(xi.n)?;
    let mut targets = vec![BilinearMapTensor::bracket(&basis)?];
    if xi.n >= 3 {
        targets.push(BilinearMapTensor::symmetric_product(&basis)?);
    }
    // f is antisymmetric and d symmetric in (a, b), so they are orthogonal.
    let mut fit = BilinearMapTensor::zeros(xi.n)?;
    let mut coefficients = Vec::with_capacity(targets.len());
    for t in &targets {
        let s = xi.dot(t) / t.dot(t);
        coefficients.push(s);
        fit.add_assign(&t.scaled(s));
    }
    Ok(EquivariantFit {
        coefficients,
        residual: xi.distance(&fit),
    })
}

/// Real matrix of a traceless Hermitian-valued linear map: `M_ca = Tr(F(½λ_a) λ_c)`.
pub fn linear_map_matrix(basis: &Basis, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> DMatrix<f64> {
    let d = basis.len();
    let mut m = DMatrix::zeros(d, d);
    for a in 0..d {
        let col = coefficients_unchecked(&f(&basis.get(a).scale(0.5)), basis);
        for c in 0..d {
            m[(c, a)] = col[c];
        }
    }
    m
}

/// Matrix of `X ↦ −i[L, X]`; antisymmetric, with `A² = −[L, [L, ·]]`.
pub fn ad_matrix(l: &ComplexMatrix, basis: &Basis) -> Result<DMatrix<f64>> {
    l.same_dim(basis.get(0))?;
    Ok(linear_map_matrix(basis, |x| l.comm(x).mul_neg_i()))
}

/// Least-squares commutator factorization `Ξ_L = A_L T`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub t: DMatrix<f64>,
    /// `‖Ξ_L − A_L T‖_F / ‖Ξ_L‖_F`, zero when `Ξ_L = 0`.
    pub residual: f64,
}

/// Solves `(AᵀA + εI) T = AᵀΞ` with `ε = 1e−12 · tr(AᵀA)/d`, followed by
/// two steps of iterative refinement so the ridge does not bias `T` on
/// `Im ad_L`. `T` represents `ρ ↦ T(ρ)` with `Ξ_L(ρ) = −i[L, T(ρ)]`.
pub fn factorization_residual(xi_l: &DMatrix<f64>, l: &HermitianOperator, basis: &Basis) -> Result<Factorization> {
    let a = ad_matrix(l, basis)?;
    let d = a.nrows();
    if xi_l.nrows() != d || xi_l.ncols() != d {
        return Err(Error::DimensionMismatch {
            left: xi_l.nrows(),
            right: d,
        });
    }
    let ata = a.transpose() * &a;
    let scale = ata.trace() / d as f64;
    if scale <= 1e-24 {
        return Err(Error::DegenerateChannel("ad_L vanishes; L is a multiple of the identity".into()));
    }
    let chol = (&ata + DMatrix::identity(d, d) * (1e-12 * scale))
        .cholesky()
        .ok_or_else(|| Error::DegenerateChannel("normal equations are not positive definite".into()))?;
    let mut t = chol.solve(&(a.transpose() * xi_l));
    for _ in 0..2 {
        let r = xi_l - &a * &t;
        t += chol.solve(&(a.transpose() * r));
    }
    let norm = xi_l.norm();
    let residual = if norm == 0.0 { 0.0 } else { (xi_l - &a * &t).norm() / norm };
    Ok(Factorization { t, residual })
}

/// One Schur block of `Im ad_L`: the coherences between eigenvalue clusters `p < q`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockInfo {
    pub clusters: (usize, usize),
    /// `(μ_p − μ_q)²`, the eigenvalue of `[L, [L, ·]]` on the block.
    pub gap_squared: f64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateFit {
    /// `c` with `Ξ|_block ≈ c [L, [L, ·]]`, one per block.
    pub block_scalars: Vec<f64>,
    /// `‖Ξ|_block − c (μ_p − μ_q)² I‖_F / ‖Ξ|_block‖_F` per block.
    pub block_residuals: Vec<f64>,
    /// Relative weight of `Ξ` outside the block-diagonal part.
    pub leakage: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    pub n: usize,
    pub samples: usize,
    pub blocks: Vec<BlockInfo>,
    pub candidates: Vec<CandidateFit>,
    pub max_block_residual: f64,
    pub max_leakage: f64,
    /// Every candidate is one scalar multiple of `[L, [L, ·]]` on all of `Im ad_L`.
    pub single_scalar_family: bool,
}

/// Orthonormal coordinate bases of the blocks of `Im ad_L`.
fn schur_blocks(l: &HermitianOperator, basis: &Basis) -> Result<Vec<(BlockInfo, DMatrix<f64>)>> {
    let p = CommutantProjector::new(l)?;
    let u = p.eigenvectors();
    let n = l.dim();
    let k = p.cluster_count();
    let mut out = Vec::new();
    for cp in 0..k {
        for cq in (cp + 1)..k {
            let mut cols: Vec<Vec<f64>> = Vec::new();
            for i in (0..n).filter(|&i| p.clusters()[i] == cp) {
                for j in (0..n).filter(|&j| p.clusters()[j] == cq) {
                    for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                        // u_i u_j† phase + h.c.
                        let mut x = ComplexMatrix::zeros(n);
                        for r in 0..n {
                            for c in 0..n {
                                let z = u[(r, i)] * u[(c, j)].conj() * phase;
                                x[(r, c)] += z;
                                x[(c, r)] += z.conj();
                            }
                        }
                        let mut v = coefficients_unchecked(&x, basis);
                        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                        v.iter_mut().for_each(|a| *a /= norm);
                        cols.push(v);
                    }
                }
            }
            let d = basis.len();
            let v = DMatrix::from_fn(d, cols.len(), |r, c| cols[c][r]);
            let gap = p.cluster_value(cp) - p.cluster_value(cq);
            out.push((
                BlockInfo {
                    clusters: (cp, cq),
                    gap_squared: gap * gap,
                    dim: cols.len(),
                },
                v,
            ));
        }
    }
    Ok(out)
}

/// Orthogonal projector onto the symmetric matrices commuting with `A_X` for
/// every `X` in the isotropy algebra `ker ad_L`, as a `d² × d²` matrix on
/// column-major vectorizations.
fn isotropy_commutant_projector(a: &DMatrix<f64>, basis: &Basis) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    let eig = SymmetricEigen::new(a.transpose() * a);
    let top = eig.eigenvalues.amax().max(1.0);
    let mut generators = Vec::new();
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev.abs() <= 1e-10 * top {
            let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let mut x = ComplexMatrix::zeros(basis.dim());
            for (va, la) in v.iter().zip(basis.elements()) {
                x.axpy(0.5 * va, la);
            }
            generators.push(ad_matrix(&x, basis)?);
        }
    }
    // Σ_j ad_{A_j}² is symmetric negative semidefinite; its kernel is the commutant.
    let dd = d * d;
    let mut op = DMatrix::zeros(dd, dd);
    for col in 0..dd {
        let mut k = DMatrix::zeros(d, d);
        k[(col % d, col / d)] = 1.0;
        let mut acc = DMatrix::zeros(d, d);
        for g in &generators {
            let c1 = g * &k - &k * g;
            acc += g * &c1 - &c1 * g;
        }
        op.column_mut(col).copy_from_slice(acc.as_slice());
    }
    let eig = SymmetricEigen::new(op);
    let top = eig.eigenvalues.amax().max(1.0);
    let mut proj = DMatrix::zeros(dd, dd);
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev.abs() <= 1e-9 * top {
            let v = eig.eigenvectors.column(k);
            proj += v * v.transpose();
        }
    }
    Ok(proj)
}

/// Builds `samples` random candidates `Ξ_L = A K A`, i.e.
/// `Ξ_L(ρ) = −[L, K[L, ρ]]` with `A` from [`ad_matrix`] and `K` symmetric and
/// commuting with the isotropy group of `L`, then fits each to
/// `c [L, [L, ·]]` block by block on `Im ad_L`.
///
/// The equivariant projection of `K` is exact: a random symmetric `K₀` is
/// projected onto the kernel of `Σ_j ad_{A_j}²` over a basis `X_j` of
/// `ker ad_L`. Candidate `0` is the zero map.
pub fn uniqueness_check(n: usize, l: &HermitianOperator, samples: usize, seed: u64) -> Result<UniquenessReport> {
    let basis = standard_basis(n)?;
    let a = ad_matrix(l, &basis)?;
    if (a.transpose() * &a).trace() <= 1e-24 {
        return Err(Error::DegenerateChannel("ad_L vanishes; L is a multiple of the identity".into()));
    }
    let d = basis.len();
    let proj = isotropy_commutant_projector(&a, &basis)?;
    let blocks = schur_blocks(l, &basis)?;

    let mut candidates = Vec::with_capacity(samples);
    for s in 0..samples {
        let k = if s == 0 {
            DMatrix::zeros(d, d)
        } else {
            let mut rng = SeededRng::new(seed.wrapping_add(s as u64));
            let g = DMatrix::from_fn(d, d, |_, _| rng.normal());
            let k0 = (&g + g.transpose()) * 0.5;
            let v = &proj * nalgebra::DVector::from_column_slice(k0.as_slice());
            DMatrix::from_column_slice(d, d, v.as_slice())
        };
        let xi = &a * &k * &a;
        let total = xi.norm();
        let mut diag_part = DMatrix::zeros(d, d);
        let mut block_scalars = Vec::with_capacity(blocks.len());
        let mut block_residuals = Vec::with_capacity(blocks.len());
        for (info, v) in &blocks {
            let m = v.transpose() * &xi * v;
            // [L, [L, ·]] = −A² acts as (μ_p − μ_q)² on the block; A K A carries the sign.
            let target = -info.gap_squared;
            let c = m.trace() / (info.dim as f64 * target);
            let fitted = DMatrix::identity(info.dim, info.dim) * (c * target);
            let mn = m.norm();
            block_residuals.push(if mn == 0.0 { 0.0 } else { (&m - fitted).norm() / mn });
            block_scalars.push(c);
            diag_part += v * &m * v.transpose();
        }
        let leakage = if total == 0.0 { 0.0 } else { (&xi - diag_part).norm() / total };
        candidates.push(CandidateFit {
            block_scalars,
            block_residuals,
            leakage,
        });
    }

    let max_block_residual = candidates
        .iter()
        .flat_map(|c| c.block_residuals.iter().copied())
        .fold(0.0, f64::max);
    let max_leakage = candidates.iter().map(|c| c.leakage).fold(0.0, f64::max);
    let single_scalar_family = max_block_residual <= 1e-10
        && max_leakage <= 1e-10
        && candidates.iter().all(|c| {
            let scale = c.block_scalars.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
            c.block_scalars.windows(2).all(|w| (w[0] - w[1]).abs() <= 1e-10 * scale)
        });
    Ok(UniquenessReport {
        n,
        samples,
        blocks: blocks.into_iter().map(|(b, _)| b).collect(),
        candidates,
        max_block_residual,
        max_leakage,
        single_scalar_family,
    })
}

/// `‖[L, [L, ρ]]‖ / (2 ‖L‖² ‖ρ‖)`, zero when either factor vanishes.
pub fn curvature_ratio(l: &ComplexMatrix, rho: &ComplexMatrix) -> f64 {
    let denom = 2.0 * l.hs_norm().powi(2) * rho.hs_norm();
    if denom == 0.0 {
        return 0.0;
    }
    l.comm(&l.comm(rho)).hs_norm() / denom
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub n: usize,
    pub trials: usize,
    pub max_ratio: f64,
    /// `max_ratio ≤ 1 + 1e−12`.
    pub within_bound: bool,
}

/// Samples random Hermitian `L` and random states `ρ`; trial `k` uses seed `seed + k`.
pub fn curvature_bound_check(n: usize, trials: usize, seed: u64) -> Result<CurvatureReport> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("n must be at least 2, got {n}")));
    }
    let max_ratio = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = SeededRng::new(seed.wrapping_add(k as u64));
            let l = random_hermitian(n, &mut rng);
            let rho = random_density(n, &mut rng);
            curvature_ratio(&l, &rho)
        })
        .reduce(|| 0.0, f64::max);
    Ok(CurvatureReport {
        n,
        trials,
        max_ratio,
        within_bound: max_ratio <= 1.0 + 1e-12,
    })
}

/// Matrix `M_ab = ½ Tr(λ_a [L, [L, λ_b]])` of `[L, [L, ·]]` on coordinates.
pub fn ad_squared_matrix(l: &ComplexMatrix, basis: &Basis) -> Result<DMatrix<f64>> {
    l.same_dim(basis.get(0))?;
    Ok(linear_map_matrix(basis, |x| l.comm(&l.comm(x))))
}

/// Eigenvalues of [`ad_squared_matrix`], descending. Bloch decay rates of a
/// channel `(L, γ)` are `(γ/2)` times these.
pub fn ad_squared_spectrum(l: &ComplexMatrix, basis: &Basis) -> Result<Vec<f64>> {
    let m = ad_squared_matrix(l, basis)?;
    let sym = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// `exp(tA)` by scaling and squaring a Taylor series.
pub fn matrix_exponential(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: a.ncols(),
        });
    }
    let m = a * t;
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("matrix exponential argument".into()));
    }
    let n = m.nrows();
    let norm1 = (0..n).map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let m = m / 2f64.powi(squarings);
    let mut out = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &m / k as f64;
        out += &term;
        if term.amax() <= f64::EPSILON * out.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        out = &out * &out;
    }
    Ok(out)
}

/// Decay rate `k` from a least-squares fit of `ln |v(t)| = c − k t`.
pub fn fit_decay_rate(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: times.len(),
            right: values.len(),
        });
    }
    if times.len() < 2 {
        return Err(Error::InvalidConfig("need at least two samples to fit a rate".into()));
    }
    if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::InvalidConfig("rate fit needs finite nonzero values".into()));
    }
    let m = times.len() as f64;
    let tm = times.iter().sum::<f64>() / m;
    let logs: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let lm = logs.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in times.iter().zip(&logs) {
        sxy += (t - tm) * (y - lm);
        sxx += (t - tm) * (t - tm);
    }
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::from_coefficients;

    fn pauli() -> Basis {
        standard_basis(2).unwrap()
    }

    #[test]
    fn bracket_tensor_reproduces_commutator() {
        let b = standard_basis(3).unwrap();
        let t = BilinearMapTensor::bracket(&b).unwrap();
        let via_map = BilinearMapTensor::from_bilinear_map(&b, |x, y| x.comm(y).mul_neg_i()).unwrap();
        assert!(t.distance(&via_map) < 1e-13);
        let mut rng = SeededRng::new(1);
        let x = coefficients_unchecked(&random_hermitian(3, &mut rng), &b);
        let y = coefficients_unchecked(&random_hermitian(3, &mut rng), &b);
        let xm = from_coefficients(&x, &b).unwrap();
        let ym = from_coefficients(&y, &b).unwrap();
        let want = coefficients_unchecked(&xm.comm(&ym).mul_neg_i(), &b);
        let got = t.apply(&x, &y);
        for k in 0..8 {
            assert!((got[k] - want[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn symmetric_product_vanishes_for_qubits() {
        assert!(BilinearMapTensor::symmetric_product(&pauli()).unwrap().norm() < 1e-15);
        let d = BilinearMapTensor::symmetric_product(&standard_basis(3).unwrap()).unwrap();
        // d_118 = 1/√3 for the Gell-Mann basis.
        assert!((d.get(0, 0, 7) - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn adjoint_rotation_is_orthogonal_and_acts_by_conjugation() {
        let b = standard_basis(3).unwrap();
        let mut rng = SeededRng::new(2);
        let g = haar_unitary(3, &mut rng);
        let r = AdjointRotation::from_unitary(&g, &b).unwrap();
        assert!(r.orthogonality_defect() < 1e-12);
        let x = random_hermitian(3, &mut rng);
        let xc = coefficients_unchecked(&x, &b);
        let conj = &(&g * &*x) * &g.adjoint();
        let want = coefficients_unchecked(&conj, &b);
        let got = r.matrix() * nalgebra::DVector::from_vec(xc);
        for k in 0..8 {
            assert!((got[k] - want[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn bracket_is_invariant_under_transport() {
        for n in 2..=3 {
            let b = standard_basis(n).unwrap();
            let f = BilinearMapTensor::bracket(&b).unwrap();
            assert!(equivariance_defect(&f, 20, 3).unwrap() < 1e-12);
            let d = BilinearMapTensor::symmetric_product(&b).unwrap();
            assert!(equivariance_defect(&d, 20, 3).unwrap() < 1e-12);
        }
    }

    #[test]
    fn weyl_frame_is_unitary() {
        for n in 2..=4 {
            for w in weyl_frame(n) {
                assert!((&(&w * &w.adjoint()) - &ComplexMatrix::identity(n)).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn twirl_of_zero_is_zero() {
        let z = BilinearMapTensor::zeros(2).unwrap();
        assert_eq!(twirl(&z, 10, 0).unwrap().norm(), 0.0);
        assert!(twirl(&z, 0, 0).is_err());
    }

    #[test]
    fn twirl_keeps_equivariant_input() {
        let b = pauli();
        let f = BilinearMapTensor::bracket(&b).unwrap();
        let tw = twirl(&f, 200, 4).unwrap();
        assert!(tw.distance(&f) < 1e-12);
    }

    #[test]
    fn twirl_is_deterministic() {
        let xi = BilinearMapTensor::random(2, &mut SeededRng::new(5)).unwrap();
        assert_eq!(twirl(&xi, 300, 9).unwrap(), twirl(&xi, 300, 9).unwrap());
    }

    #[test]
    fn twirled_random_tensor_approaches_bracket_line() {
        let xi = BilinearMapTensor::random(2, &mut SeededRng::new(6)).unwrap();
        let tw = twirl(&xi, 2000, 7).unwrap();
        let fit = equivariant_fit(&tw).unwrap();
        assert!(fit.residual / xi.norm() < 3e-2);
        // The projection onto f commutes with the twirl.
        let direct = equivariant_fit(&xi).unwrap();
        assert!((fit.coefficients[0] - direct.coefficients[0]).abs() < 5e-2);
    }

    #[test]
    fn double_commutator_factorizes_exactly() {
        let b = standard_basis(3).unwrap();
        let mut rng = SeededRng::new(8);
        let l = random_hermitian(3, &mut rng);
        let gamma = 0.7;
        let xi = linear_map_matrix(&b, |x| l.comm(&l.comm(x)).scale(-0.5 * gamma));
        let f = factorization_residual(&xi, &l, &b).unwrap();
        assert!(f.residual <= 1e-12, "{}", f.residual);
        // T = (γ/2) A on Im ad_L.
        let a = ad_matrix(&l, &b).unwrap();
        assert!((&a * &f.t - &a * &a * (0.5 * gamma)).amax() < 1e-10);
    }

    #[test]
    fn zero_map_factorizes_trivially() {
        let b = pauli();
        let f = factorization_residual(&DMatrix::zeros(3, 3), b.get(2), &b).unwrap();
        assert_eq!(f.residual, 0.0);
        assert!(f.t.amax() == 0.0);
    }

    #[test]
    fn commutant_valued_map_cannot_factorize() {
        let b = pauli();
        // ρ ↦ r_x σ_z lies in ker ad_{σ_z}.
        let mut xi = DMatrix::zeros(3, 3);
        xi[(2, 0)] = 1.0;
        let f = factorization_residual(&xi, b.get(2), &b).unwrap();
        assert!((f.residual - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_channel_is_degenerate() {
        let b = pauli();
        let l = HermitianOperator::identity(2);
        assert!(matches!(
            factorization_residual(&DMatrix::zeros(3, 3), &l, &b),
            Err(Error::DegenerateChannel(_))
        ));
    }

    #[test]
    fn torsion_generated_maps_stay_factorizable_after_twirl() {
        let b = pauli();
        let mut rng = SeededRng::new(9);
        let phi = DMatrix::from_fn(3, 3, |_, _| rng.normal());
        let xi = BilinearMapTensor::torsion_generated(&b, &phi).unwrap();
        let tw = twirl(&xi, 300, 10).unwrap();
        let l = random_hermitian(2, &mut rng);
        let ell = coefficients_unchecked(&l, &b);
        for t in [&xi, &tw] {
            let f = factorization_residual(&t.slice(&ell), &l, &b).unwrap();
            assert!(f.residual <= 1e-6);
        }
    }

    #[test]
    fn uniqueness_qubit_single_family() {
        let b = pauli();
        let rep = uniqueness_check(2, b.get(2), 10, 11).unwrap();
        assert_eq!(rep.blocks.len(), 1);
        assert_eq!(rep.blocks[0].dim, 2);
        assert!((rep.blocks[0].gap_squared - 4.0).abs() < 1e-12);
        assert!(rep.max_block_residual <= 1e-10);
        assert!(rep.single_scalar_family);
        assert_eq!(rep.candidates[0].block_scalars, vec![0.0]);
        assert!(rep.candidates[1].block_scalars[0].abs() > 1e-3);
    }

    #[test]
    fn uniqueness_qutrit_reports_three_blocks() {
        let b = standard_basis(3).unwrap();
        let rep = uniqueness_check(3, b.get(2), 6, 12).unwrap();
        let mut gaps: Vec<f64> = rep.blocks.iter().map(|x| x.gap_squared).collect();
        gaps.sort_by(f64::total_cmp);
        assert!((gaps[0] - 1.0).abs() < 1e-12 && (gaps[1] - 1.0).abs() < 1e-12 && (gaps[2] - 4.0).abs() < 1e-12);
        assert!(rep.max_block_residual <= 1e-9);
        assert!(rep.max_leakage <= 1e-9);
        assert!(!rep.single_scalar_family);
    }

    #[test]
    fn uniqueness_degenerate_channel_has_one_block() {
        let l = HermitianOperator::new(ComplexMatrix::diag(&[1.0, -1.0, 1.0])).unwrap();
        let rep = uniqueness_check(3, &l, 6, 13).unwrap();
        assert_eq!(rep.blocks.len(), 1);
        assert_eq!(rep.blocks[0].dim, 4);
        assert!(rep.single_scalar_family);
    }

    #[test]
    fn curvature_ratio_edge_cases() {
        let b = pauli();
        let rho = ComplexMatrix::diag(&[0.3, 0.7]);
        assert_eq!(curvature_ratio(b.get(2), &rho), 0.0);
        let mut rng = SeededRng::new(14);
        let l = random_hermitian(3, &mut rng);
        let r = random_density(3, &mut rng);
        let base = curvature_ratio(&l, &r);
        assert!((curvature_ratio(&l.scale(3.7), &r.scale(0.2)) - base).abs() < 1e-12);
    }

    #[test]
    fn curvature_bound_holds() {
        for n in 2..=4 {
            let rep = curvature_bound_check(n, 500, 15).unwrap();
            assert!(rep.within_bound && rep.max_ratio < 1.0, "{rep:?}");
        }
        assert_eq!(curvature_bound_check(3, 200, 1).unwrap(), curvature_bound_check(3, 200, 1).unwrap());
    }

    #[test]
    fn ad_squared_spectra() {
        let b2 = pauli();
        let s = ad_squared_spectrum(b2.get(2), &b2).unwrap();
        for (got, want) in s.iter().zip([4.0, 4.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let b3 = standard_basis(3).unwrap();
        let s = ad_squared_spectrum(b3.get(2), &b3).unwrap();
        for (got, want) in s.iter().zip([4.0, 4.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(ad_squared_spectrum(&ComplexMatrix::zeros(3), &b3).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn exponential_basics() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_eq!(matrix_exponential(&a, 0.0).unwrap(), DMatrix::identity(2, 2));
        let e = matrix_exponential(&a, 1.0).unwrap();
        assert!((e[(0, 0)] - 1f64.cos()).abs() < 1e-15 && (e[(0, 1)] - 1f64.sin()).abs() < 1e-15);
        let mut rng = SeededRng::new(16);
        let g = DMatrix::from_fn(4, 4, |_, _| rng.normal());
        let lhs = matrix_exponential(&g, 0.7).unwrap();
        let rhs = matrix_exponential(&g, 0.3).unwrap() * matrix_exponential(&g, 0.4).unwrap();
        assert!((lhs - rhs).amax() < 1e-10);
    }

    #[test]
    fn rate_fit_recovers_exponent() {
        let t: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
        let v: Vec<f64> = t.iter().map(|t| -3.0 * (-0.75 * t).exp()).collect();
        assert!((fit_decay_rate(&t, &v).unwrap() - 0.75).abs() < 1e-12);
        assert!(fit_decay_rate(&t, &vec![0.0; 50]).is_err());
    }

    fn swap12(rho: &ComplexMatrix) -> ComplexMatrix {
        let s = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        &(&s * rho) * &s
    }

    #[test]
    fn ladder_double_commutator_expansion() {
        let b = standard_basis(3).unwrap();
        let l1 = b.get(0);
        let p = ComplexMatrix::diag(&[1.0, 1.0, 0.0]);
        let mut rng = SeededRng::new(17);
        let rho = random_density(3, &mut rng);
        let dd = l1.comm(&l1.comm(&rho));
        let expansion = &(&(&p * &*rho) + &(&*rho * &p)) - &(&(&**l1 * &*rho) * &**l1).scale(2.0);
        assert!((&dd - &expansion).max_abs() < 1e-14);
        // 2(ρ − σ₁₂(ρ)) agrees only on the upper 2×2 block.
        let claimed = (&*rho - &swap12(&rho)).scale(2.0);
        for i in 0..2 {
            for j in 0..2 {
                assert!((dd[(i, j)] - claimed[(i, j)]).norm() < 1e-14);
            }
        }
        assert!((&dd - &claimed).max_abs() > 1e-3);
    }
}

//! Complex Hermitian linear algebra: construction, a cyclic Jacobi
//! eigensolver, spectral calculus, random generation and PSD margins.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ScalarFunction;

/// Dense complex matrix, column-major.
pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues within `SPECTRAL_ZERO_TOL * max(1, scale)` below zero are
/// treated as zero by functions that declare a zero extension.
pub const SPECTRAL_ZERO_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Complex Hermitian matrix; symmetry is enforced exactly on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    /// Symmetrizes `m` as `(m + m*)/2`. The result satisfies
    /// `a[j][i] == conj(a[i][j])` bitwise and has a real diagonal.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "Hermitian matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        let mut out = m.clone();
        for i in 0..n {
            out[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        Ok(Self(out))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn add(&self, other: &Hermitian) -> Hermitian {
        Hermitian(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Hermitian) -> Hermitian {
        Hermitian(&self.0 - &other.0)
    }

    pub fn scaled(&self, t: f64) -> Hermitian {
        Hermitian(self.0.map(|z| z * t))
    }

    /// `(self + other)/2`.
    pub fn midpoint(&self, other: &Hermitian) -> Hermitian {
        Hermitian((&self.0 + &other.0).map(|z| z * 0.5))
    }

    /// `u * self * u^*` for a square `u` of matching size.
    pub fn conjugated_by(&self, u: &CMatrix) -> Result<Hermitian> {
        if u.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "cannot conjugate {}x{} by {}x{}",
                self.dim(),
                self.dim(),
                u.nrows(),
                u.ncols()
            )));
        }
        Hermitian::from_matrix(u * &self.0 * u.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Re Tr(self * other)`, the real Hilbert–Schmidt pairing of Hermitian matrices.
    pub fn trace_product(&self, other: &Hermitian) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.0[(i, j)] * other.0[(j, i)]).re;
            }
        }
        acc
    }
}

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(values) U^*`.
    pub fn synthesize(&self, values: &[f64]) -> Hermitian {
        let u = &self.eigenvectors;
        let n = self.dim();
        let mut scaled = u.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= values[j];
            }
        }
        Hermitian::from_matrix(scaled * u.adjoint()).expect("square by construction")
    }

    pub fn reconstruct(&self) -> Hermitian {
        self.synthesize(&self.eigenvalues)
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `f` applied spectrally; see [`apply_function`].
    pub fn map(&self, f: &ScalarFunction) -> Result<Hermitian> {
        let values = self.function_values(f)?;
        Ok(self.synthesize(&values))
    }

    pub(crate) fn function_values(&self, f: &ScalarFunction) -> Result<Vec<f64>> {
        let tol = SPECTRAL_ZERO_TOL * self.spectral_radius().max(1.0);
        self.eigenvalues
            .iter()
            .map(|&l| f.value_on_spectrum(l, tol))
            .collect()
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(m: &Hermitian) -> Result<SpectralDecomposition> {
    let n = m.dim();
    let mut a = m.0.clone();
    let mut v = CMatrix::identity(n, n);
    let scale = m.frobenius_norm();
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= f64::EPSILON * scale || off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi step annihilating `a[p][q]`; `v` accumulates the rotations.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 || !r.is_finite() {
        return;
    }
    let phase = apq / r;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
        sign / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;
    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// `f(m) = U f(Λ) U^*`.
///
/// Eigenvalues must lie in `(0, inf)`, or be non-negative (up to
/// [`SPECTRAL_ZERO_TOL`]) when `f` declares a zero extension.
pub fn apply_function(f: &ScalarFunction, m: &Hermitian) -> Result<Hermitian> {
    eigh(m)?.map(f)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr f(m) = Σ f(λ_i)`.
pub fn trace_of_function(f: &ScalarFunction, m: &Hermitian) -> Result<f64> {
    Ok(eigh(m)?.function_values(f)?.iter().sum())
}

/// `m^{-1}` for a positive definite `m`.
pub fn inverse_pd(m: &Hermitian) -> Result<Hermitian> {
    let d = eigh(m)?;
    let min = d.eigenvalues[0];
    if !(min > SPECTRAL_ZERO_TOL * d.spectral_radius().max(1.0)) {
        return Err(Error::Singular {
            min_eigenvalue: min,
        });
    }
    let inv: Vec<f64> = d.eigenvalues.iter().map(|l| 1.0 / l).collect();
    Ok(d.synthesize(&inv))
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    // explicit fill order keeps streams stable across nalgebra versions
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian_complex(rng);
        }
    }
    m
}

/// Orthonormalizes the columns of `m` (modified Gram–Schmidt, two passes).
pub fn orthonormalize_columns(m: &CMatrix) -> Result<CMatrix> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..q.nrows()).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..q.nrows() {
                    let qik = q[(i, k)];
                    q[(i, j)] -= qik * proj;
                }
            }
        }
        let norm = (0..q.nrows()).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-12) {
            return Err(Error::Singular {
                min_eigenvalue: norm,
            });
        }
        for i in 0..q.nrows() {
            q[(i, j)] /= norm;
        }
    }
    Ok(q)
}

/// Haar-like random unitary from a Gaussian complex matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    loop {
        let g = random_gaussian_matrix(dim, dim, rng);
        if let Ok(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Positive definite matrix with log-uniform eigenvalues in `eig_range`.
pub fn random_pd<R: Rng + ?Sized>(dim: usize, eig_range: (f64, f64), rng: &mut R) -> Hermitian {
    let (lo, hi) = eig_range;
    assert!(lo > 0.0 && lo <= hi, "eigenvalue range must satisfy 0 < min <= max");
    let (a, b) = (lo.ln(), hi.ln());
    let values: Vec<f64> = (0..dim)
        .map(|_| {
            if a == b {
                lo
            } else {
                rng.random_range(a..=b).exp().clamp(lo, hi)
            }
        })
        .collect();
    let u = random_unitary(dim, rng);
    SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: u,
    }
    .reconstruct()
}

/// Gaussian Hermitian matrix `(G + G^*)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Hermitian {
    Hermitian::from_matrix(random_gaussian_matrix(dim, dim, rng)).expect("square")
}

/// Smallest eigenvalue and spectral radius of a Hermitian operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdMargin {
    pub min_eigenvalue: f64,
    pub scale: f64,
}

impl PsdMargin {
    /// PSD iff `min_eigenvalue >= -tol * max(1, scale)`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol * self.scale.max(1.0)
    }

    /// `min_eigenvalue / max(1, scale)`.
    pub fn relative(&self) -> f64 {
        self.min_eigenvalue / self.scale.max(1.0)
    }
}

pub fn psd_margin(m: &Hermitian) -> Result<PsdMargin> {
    let d = eigh(m)?;
    Ok(PsdMargin {
        min_eigenvalue: d.eigenvalues[0],
        scale: d.spectral_radius(),
    })
}

/// Matrix exchange format: row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Hermitian> for MatrixJson {
    fn from(m: &Hermitian) -> Self {
        let n = m.dim();
        let rows = |part: fn(&Complex64) -> f64| {
            (0..n)
                .map(|i| (0..n).map(|j| part(&m.0[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            dim: n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<&MatrixJson> for Hermitian {
    type Error = Error;

    /// Hermitian symmetry is re-enforced on load.
    fn try_from(j: &MatrixJson) -> Result<Self> {
        let n = j.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !shape_ok(&j.re) || !shape_ok(&j.im) {
            return Err(Error::Malformed(format!("matrix JSON does not describe a {n}x{n} matrix")));
        }
        Hermitian::from_matrix(CMatrix::from_fn(n, n, |i, k| Complex64::new(j.re[i][k], j.im[i][k])))
    }
}

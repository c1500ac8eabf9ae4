//! Fréchet differentials of matrix functions.
//!
//! In an eigenbasis of `ρ` the differential `df(ρ)` acts on a direction `h`
//! by Hadamard product with the Löwner matrix `[k(λ_i, λ_j)]` of divided
//! differences. Superoperators are materialized as dense `n² × n²` matrices in
//! the matrix-unit basis of the computational basis, with column-stacking
//! vectorization: `vec(X)[i + j*n] = X[i, j]`. A common fixed basis is what
//! allows operators built at different base points to be compared.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, Hermitian, SpectralDecomposition};
use crate::scalar::ScalarFunction;

/// Smallest Löwner entry accepted when inverting a differential.
pub const MIN_KERNEL_ENTRY: f64 = 1e-12;

/// Divided differences of `f` over the spectrum of a base point.
#[derive(Debug, Clone)]
pub struct LoewnerMatrix {
    pub base: SpectralDecomposition,
    /// `entries[(i, j)] = k(λ_i, λ_j)`; `f'(λ_i)` on the diagonal.
    pub entries: DMatrix<f64>,
}

impl LoewnerMatrix {
    pub fn new(f: &ScalarFunction, rho: &Hermitian) -> Result<Self> {
        Self::from_decomposition(f, eigh(rho)?)
    }

    pub fn from_decomposition(f: &ScalarFunction, base: SpectralDecomposition) -> Result<Self> {
        let n = base.dim();
        let lam = &base.eigenvalues;
        let mut entries = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let k = f.divided_difference(lam[i], lam[j])?;
                entries[(i, j)] = k;
                entries[(j, i)] = k;
            }
        }
        Ok(Self { base, entries })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Entrywise reciprocal, the kernel of the inverse differential.
    pub fn reciprocal(&self) -> Result<Self> {
        let min_entry = self.min_entry();
        if !(min_entry > MIN_KERNEL_ENTRY) {
            return Err(Error::NotInvertible { min_entry });
        }
        Ok(Self {
            base: self.base.clone(),
            entries: self.entries.map(|k| 1.0 / k),
        })
    }

    /// `U (L ∘ (U* h U)) U*` for an arbitrary (not necessarily Hermitian) `h`.
    pub fn apply(&self, h: &CMatrix) -> Result<CMatrix> {
        let n = self.dim();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::Dimension(format!(
                "direction is {}x{}, base point is {n}x{n}",
                h.nrows(),
                h.ncols()
            )));
        }
        let u = &self.base.eigenvectors;
        let mut inner = u.adjoint() * h * u;
        for j in 0..n {
            for i in 0..n {
                inner[(i, j)] *= self.entries[(i, j)];
            }
        }
        Ok(u * inner * u.adjoint())
    }

    /// The represented map as a superoperator.
    pub fn superoperator(&self) -> Superoperator {
        Superoperator::from_map(self.dim(), |e| self.apply(e).expect("matching dimensions"))
    }
}

/// Column-stacking vectorization.
pub fn vectorize(x: &CMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(x.as_slice())
}

pub fn unvectorize(v: &DVector<Complex64>, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Linear map on `n × n` matrices as an `n² × n²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    /// Builds the representation by applying `map` to every matrix unit `E_ij`.
    pub fn from_map(dim: usize, mut map: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        let nn = dim * dim;
        let mut matrix = CMatrix::zeros(nn, nn);
        let mut unit = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            for i in 0..dim {
                unit[(i, j)] = Complex64::new(1.0, 0.0);
                let image = map(&unit);
                unit[(i, j)] = Complex64::new(0.0, 0.0);
                matrix.set_column(i + j * dim, &vectorize(&image));
            }
        }
        Self { dim, matrix }
    }

    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::Dimension(format!(
                "superoperator on {dim}x{dim} matrices must be {0}x{0}",
                dim * dim
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(x)), self.dim)
    }

    /// `<h, S h> = Tr h* S(h)`.
    pub fn quadratic_form(&self, h: &CMatrix) -> Complex64 {
        let v = vectorize(h);
        v.dotc(&(&self.matrix * &v))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scaled(&self, t: f64) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.map(|z| z * t),
        }
    }

    /// Largest deviation from self-adjointness for the Hilbert–Schmidt product.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = &self.matrix - self.matrix.adjoint();
        d.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// The `n² × n²` matrix as a [`Hermitian`], rejecting non-self-adjoint maps.
    pub fn to_hermitian(&self) -> Result<Hermitian> {
        let scale = self.matrix.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let defect = self.hermiticity_defect();
        if defect > 1e-9 * scale.max(1.0) {
            return Err(Error::Malformed(format!(
                "superoperator is not self-adjoint (defect {defect:e})"
            )));
        }
        Hermitian::from_matrix(self.matrix.clone())
    }
}

/// `df(ρ)h`, computed through the Löwner matrix of `f` at `ρ`.
pub fn frechet_diff(f: &ScalarFunction, rho: &Hermitian, h: &Hermitian) -> Result<Hermitian> {
    check_dims(rho, h)?;
    let l = LoewnerMatrix::new(f, rho)?;
    Hermitian::from_matrix(l.apply(h.matrix())?)
}

/// The Hadamard-product formula extended to arbitrary complex directions.
pub fn frechet_apply(f: &ScalarFunction, rho: &Hermitian, h: &CMatrix) -> Result<CMatrix> {
    LoewnerMatrix::new(f, rho)?.apply(h)
}

/// `df(ρ)` as a superoperator, i.e. `k(L_ρ, R_ρ)`.
pub fn frechet_superoperator(f: &ScalarFunction, rho: &Hermitian) -> Result<Superoperator> {
    Ok(LoewnerMatrix::new(f, rho)?.superoperator())
}

/// `df(ρ)^{-1} = k(L_ρ, R_ρ)^{-1}`; requires every Löwner entry above
/// [`MIN_KERNEL_ENTRY`].
pub fn frechet_inverse(f: &ScalarFunction, rho: &Hermitian) -> Result<Superoperator> {
    Ok(LoewnerMatrix::new(f, rho)?.reciprocal()?.superoperator())
}

fn check_dims(a: &Hermitian, b: &Hermitian) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// The two sides of the second differential of
/// `G(ρ_1..ρ_k) = -Tr f(Σρ_i) + Σ Tr f(ρ_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDiffParts {
    /// `Σ_i Tr h_i df'(ρ_i) h_i`.
    pub separate: f64,
    /// `Tr (Σh_i) df'(Σρ_i) (Σh_i)`.
    pub joint: f64,
}

impl SecondDiffParts {
    pub fn value(&self) -> f64 {
        self.separate - self.joint
    }

    /// Magnitude used to normalize margins.
    pub fn magnitude(&self) -> f64 {
        self.separate.abs() + self.joint.abs()
    }
}

/// `Tr h df'(ρ) h` for Hermitian `h`.
pub fn derivative_quadratic_form(
    f_prime: &ScalarFunction,
    rho: &Hermitian,
    h: &Hermitian,
) -> Result<f64> {
    Ok(h.trace_product(&frechet_diff(f_prime, rho, h)?))
}

/// Löwner matrices of `f'` at `ρ_1..ρ_k` and at `Σρ_i`, reusable across directions.
#[derive(Debug, Clone)]
pub struct SecondDiffForm {
    separate: Vec<LoewnerMatrix>,
    joint: LoewnerMatrix,
}

impl SecondDiffForm {
    pub fn new(f: &ScalarFunction, rhos: &[Hermitian]) -> Result<Self> {
        let Some(first) = rhos.first() else {
            return Err(Error::Dimension("need at least one base point".into()));
        };
        for r in rhos {
            check_dims(first, r)?;
        }
        let f_prime = f.derivative()?;
        let separate = rhos
            .iter()
            .map(|r| LoewnerMatrix::new(&f_prime, r))
            .collect::<Result<Vec<_>>>()?;
        let total = rhos[1..].iter().fold(first.clone(), |acc, r| acc.add(r));
        let joint = LoewnerMatrix::new(&f_prime, &total)?;
        Ok(Self { separate, joint })
    }

    pub fn order(&self) -> usize {
        self.separate.len()
    }

    pub fn dim(&self) -> usize {
        self.joint.dim()
    }

    pub fn parts(&self, hs: &[Hermitian]) -> Result<SecondDiffParts> {
        if hs.len() != self.order() {
            return Err(Error::Dimension(format!(
                "need {} directions, got {}",
                self.order(),
                hs.len()
            )));
        }
        let n = self.dim();
        if let Some(h) = hs.iter().find(|h| h.dim() != n) {
            return Err(Error::Dimension(format!("direction is {0}x{0}, base is {n}x{n}", h.dim())));
        }
        let quad = |l: &LoewnerMatrix, h: &Hermitian| -> Result<f64> {
            let image = l.apply(h.matrix())?;
            Ok((h.matrix() * image).trace().re)
        };
        let mut separate = 0.0;
        for (l, h) in self.separate.iter().zip(hs) {
            separate += quad(l, h)?;
        }
        let total = hs[1..].iter().fold(hs[0].clone(), |acc, h| acc.add(h));
        let joint = quad(&self.joint, &total)?;
        Ok(SecondDiffParts { separate, joint })
    }
}

pub fn second_diff_g_parts(
    f: &ScalarFunction,
    rhos: &[Hermitian],
    hs: &[Hermitian],
) -> Result<SecondDiffParts> {
    if rhos.is_empty() || rhos.len() != hs.len() {
        return Err(Error::Dimension(format!(
            "need equally many base points and directions (k >= 1), got {} and {}",
            rhos.len(),
            hs.len()
        )));
    }
    SecondDiffForm::new(f, rhos)?.parts(hs)
}

/// `d²G(ρ⃗)(h⃗, h⃗) = Σ Tr h_i df'(ρ_i) h_i − Tr (Σh_i) df'(Σρ_i) (Σh_i)`.
pub fn second_diff_g(f: &ScalarFunction, rhos: &[Hermitian], hs: &[Hermitian]) -> Result<f64> {
    Ok(second_diff_g_parts(f, rhos, hs)?.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{apply_function, inverse_pd, random_hermitian, random_pd, random_unitary};
    use crate::scalar::registry;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frob(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn scalar_multiple_of_identity() {
        let mut r = rng(1);
        let h = random_hermitian(3, &mut r);
        for f in registry() {
            let rho = Hermitian::identity(3).scaled(2.5);
            let d = frechet_diff(&f, &rho, &h).unwrap();
            let expect = h.scaled(f.derivative_value(2.5, 1).unwrap());
            assert!(frob(&(d.matrix() - expect.matrix())) <= 1e-13 * frob(expect.matrix()).max(1.0));
        }
    }

    #[test]
    fn neglog_derivative_is_sandwich_by_inverse() {
        let mut r = rng(2);
        let fp = ScalarFunction::neglog().derivative().unwrap();
        let rho = random_pd(3, (0.1, 10.0), &mut r);
        let h = random_hermitian(3, &mut r);
        let inv = inverse_pd(&rho).unwrap();
        let expect = inv.matrix() * h.matrix() * inv.matrix();
        let got = frechet_diff(&fp, &rho, &h).unwrap();
        assert!(frob(&(got.matrix() - &expect)) <= 1e-11 * frob(&expect));
    }

    #[test]
    fn superoperator_examples() {
        for f in registry() {
            let s = frechet_superoperator(&f, &Hermitian::identity(2)).unwrap();
            let expect = Superoperator::identity(2).scaled(f.derivative_value(1.0, 1).unwrap());
            assert!(frob(&(s.matrix() - expect.matrix())) < 1e-14);
        }
        let fp = ScalarFunction::neglog().derivative().unwrap();
        let s = frechet_superoperator(&fp, &Hermitian::from_real_diagonal(&[1.0, 2.0])).unwrap();
        let expect = [1.0, 0.5, 0.5, 0.25];
        for (a, &diag) in expect.iter().enumerate() {
            for b in 0..4 {
                let want = if a == b { diag } else { 0.0 };
                assert!((s.matrix()[(a, b)] - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn superoperator_spectrum_is_loewner_multiset() {
        let mut r = rng(3);
        for f in registry() {
            let fp = f.derivative().unwrap();
            for n in 2..=4 {
                let rho = random_pd(n, (0.1, 10.0), &mut r);
                let l = LoewnerMatrix::new(&fp, &rho).unwrap();
                let mut expect: Vec<f64> = l.entries.iter().copied().collect();
                expect.sort_by(f64::total_cmp);
                let s = l.superoperator().to_hermitian().unwrap();
                let got = eigh(&s).unwrap().eigenvalues;
                for (a, b) in got.iter().zip(&expect) {
                    assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{}: {a} vs {b}", f.name());
                }
            }
        }
        // t log t: spectrum of df' is the set of divided differences of log, all positive
        let rho = random_pd(3, (0.1, 10.0), &mut r);
        let s = frechet_superoperator(&ScalarFunction::tlogt().derivative().unwrap(), &rho).unwrap();
        let m = crate::linalg::psd_margin(&s.to_hermitian().unwrap()).unwrap();
        assert!(m.min_eigenvalue > 0.0);
    }

    #[test]
    fn inverse_examples() {
        let mut r = rng(4);
        let fp = ScalarFunction::neglog().derivative().unwrap();
        let rho = random_pd(3, (0.1, 10.0), &mut r);
        let h = random_hermitian(3, &mut r);
        let inv = frechet_inverse(&fp, &rho).unwrap();
        let expect = rho.matrix() * h.matrix() * rho.matrix();
        assert!(frob(&(inv.apply(h.matrix()) - &expect)) <= 1e-11 * frob(&expect));

        let tl = ScalarFunction::tlogt();
        let inv = frechet_inverse(&tl, &Hermitian::identity(2).scaled(3.0)).unwrap();
        let expect = Superoperator::identity(2).scaled(1.0 / tl.derivative_value(3.0, 1).unwrap());
        assert!(frob(&(inv.matrix() - expect.matrix())) < 1e-14);

        let rho = random_pd(3, (0.5, 2.0), &mut r);
        let s = frechet_superoperator(&tl, &rho).unwrap();
        let inv = frechet_inverse(&tl, &rho).unwrap();
        let back = inv.apply(&s.apply(h.matrix()));
        assert!(frob(&(back - h.matrix())) <= 1e-10 * frob(h.matrix()));

        // t log t has f'(t) = log t + 1 <= 0 below 1/e
        let small = Hermitian::from_real_diagonal(&[0.1, 0.2]);
        assert!(matches!(frechet_inverse(&tl, &small), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn vectorization_round_trip_is_column_major() {
        let mut r = rng(5);
        let x = crate::linalg::random_gaussian_matrix(3, 3, &mut r);
        let v = vectorize(&x);
        assert_eq!(v[1], x[(1, 0)]);
        assert_eq!(v[3], x[(0, 1)]);
        assert_eq!(unvectorize(&v, 3), x);
        let rho = random_pd(3, (0.1, 10.0), &mut r);
        let f = ScalarFunction::tlogt();
        let s = frechet_superoperator(&f, &rho).unwrap();
        let direct = frechet_apply(&f, &rho, &x).unwrap();
        assert!(frob(&(s.apply(&x) - &direct)) < 1e-12 * frob(&direct));
    }

    #[test]
    fn finite_difference_agreement() {
        let mut r = rng(6);
        for f in registry() {
            for n in 2..=4 {
                for _ in 0..10 {
                    let rho = random_pd(n, (0.1, 10.0), &mut r);
                    let h = random_hermitian(n, &mut r);
                    let h = h.scaled(1.0 / h.frobenius_norm());
                    let eps = 1e-5;
                    let plus = apply_function(&f, &rho.add(&h.scaled(eps))).unwrap();
                    let minus = apply_function(&f, &rho.sub(&h.scaled(eps))).unwrap();
                    let fd = (plus.matrix() - minus.matrix()).map(|z| z / (2.0 * eps));
                    let an = frechet_diff(&f, &rho, &h).unwrap();
                    let err = frob(&(an.matrix() - &fd));
                    assert!(err <= 1e-6 * frob(an.matrix()).max(1e-3), "{} n={n}: {err}", f.name());
                }
            }
        }
    }

    #[test]
    fn second_diff_examples() {
        let mut r = rng(7);
        let rho = random_pd(3, (0.1, 10.0), &mut r);
        let h = random_hermitian(3, &mut r);
        for f in registry() {
            assert_eq!(second_diff_g(&f, std::slice::from_ref(&rho), std::slice::from_ref(&h)).unwrap(), 0.0);
        }
        let sq = ScalarFunction::square();
        let rho2 = random_pd(3, (0.1, 10.0), &mut r);
        let h2 = random_hermitian(3, &mut r);
        let v = second_diff_g(&sq, &[rho.clone(), rho2.clone()], &[h.clone(), h2.clone()]).unwrap();
        let closed = -4.0 * h.trace_product(&h2);
        assert!((v - closed).abs() <= 1e-12 * closed.abs().max(1.0));
        let same = second_diff_g(&sq, &[rho.clone(), rho2.clone()], &[h.clone(), h.clone()]).unwrap();
        assert!(same < 0.0);
        assert!((same + 4.0 * h.trace_product(&h)).abs() < 1e-11 * same.abs());

        assert!(second_diff_g(&sq, std::slice::from_ref(&rho), &[]).is_err());
        assert!(second_diff_g(&sq, &[rho], &[Hermitian::identity(2)]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn linear_in_direction(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let mut r = rng(seed);
            let rho = random_pd(3, (0.1, 10.0), &mut r);
            let (h1, h2) = (random_hermitian(3, &mut r), random_hermitian(3, &mut r));
            let f = ScalarFunction::tlogt();
            let lhs = frechet_diff(&f, &rho, &h1.scaled(a).add(&h2.scaled(b))).unwrap();
            let rhs = frechet_diff(&f, &rho, &h1).unwrap().scaled(a)
                .add(&frechet_diff(&f, &rho, &h2).unwrap().scaled(b));
            let scale = frob(rhs.matrix()).max(1.0);
            prop_assert!(frob(&(lhs.matrix() - rhs.matrix())) <= 1e-12 * scale * 10.0);
        }

        #[test]
        fn unitarily_covariant(seed in any::<u64>()) {
            let mut r = rng(seed);
            let rho = random_pd(3, (0.1, 10.0), &mut r);
            let h = random_hermitian(3, &mut r);
            let u = random_unitary(3, &mut r);
            for f in registry() {
                let lhs = frechet_diff(&f, &rho.conjugated_by(&u).unwrap(), &h.conjugated_by(&u).unwrap()).unwrap();
                let rhs = frechet_diff(&f, &rho, &h).unwrap().conjugated_by(&u).unwrap();
                let scale = frob(rhs.matrix()).max(1.0);
                prop_assert!(frob(&(lhs.matrix() - rhs.matrix())) <= 1e-10 * scale);
            }
        }

        #[test]
        fn trace_symmetric(seed in any::<u64>()) {
            let mut r = rng(seed);
            let rho = random_pd(4, (0.1, 10.0), &mut r);
            let (a, b) = (random_hermitian(4, &mut r), random_hermitian(4, &mut r));
            for f in registry() {
                let x = a.trace_product(&frechet_diff(&f, &rho, &b).unwrap());
                let y = b.trace_product(&frechet_diff(&f, &rho, &a).unwrap());
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }

        #[test]
        fn quadratic_form_matches_direct(seed in any::<u64>()) {
            let mut r = rng(seed);
            let rho = random_pd(3, (0.1, 10.0), &mut r);
            let h = random_hermitian(3, &mut r);
            for f in registry() {
                let s = frechet_superoperator(&f, &rho).unwrap();
                let q = s.quadratic_form(h.matrix());
                let direct = h.trace_product(&frechet_diff(&f, &rho, &h).unwrap());
                prop_assert!((q.re - direct).abs() <= 1e-10 * direct.abs().max(1.0));
                prop_assert!(q.im.abs() <= 1e-10 * direct.abs().max(1.0));
                prop_assert!(s.hermiticity_defect() <= 1e-12 * 100.0);
            }
        }
    }
}

//! Tensor products, partial traces, block embeddings and channels.
//!
//! Bipartite spaces are ordered `H₁ ⊗ H₂` with row index `i * d2 + k`; the
//! partial trace keeps the first factor.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    inverse_pd, orthonormalize_columns, random_gaussian_matrix, trace_of_function, CMatrix,
    Hermitian,
};
use crate::scalar::ScalarFunction;

/// Tolerance on `‖Σ K*K − I‖_F` and `‖W*W − I‖_F`.
pub const TRACE_PRESERVING_TOL: f64 = 1e-10;

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn kron(a: &Hermitian, b: &Hermitian) -> Hermitian {
    Hermitian::from_matrix(a.matrix().kronecker(b.matrix())).expect("square")
}

/// Trace over the second factor of `H₁ ⊗ H₂`.
pub fn partial_trace_1(rho: &Hermitian, dim1: usize, dim2: usize) -> Result<Hermitian> {
    Hermitian::from_matrix(partial_trace_general(rho.matrix(), dim1, dim2)?)
}

fn partial_trace_general(m: &CMatrix, dim1: usize, dim2: usize) -> Result<CMatrix> {
    if m.nrows() != dim1 * dim2 || m.ncols() != dim1 * dim2 {
        return Err(Error::Dimension(format!(
            "cannot trace a {}x{} matrix over {dim1}x{dim2}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = CMatrix::zeros(dim1, dim1);
    for i in 0..dim1 {
        for j in 0..dim1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim2 {
                acc += m[(i * dim2 + k, j * dim2 + k)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// `Σ ρ_b ⊗ |b⟩⟨b|` on `H₁ ⊗ C^k`.
pub fn embed_block_diagonal(rhos: &[Hermitian]) -> Result<Hermitian> {
    let Some(first) = rhos.first() else {
        return Err(Error::Dimension("no blocks to embed".into()));
    };
    let d = first.dim();
    if rhos.iter().any(|r| r.dim() != d) {
        return Err(Error::Dimension("blocks have different dimensions".into()));
    }
    let k = rhos.len();
    let mut a = CMatrix::zeros(d * k, d * k);
    for (b, r) in rhos.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                a[(i * k + b, j * k + b)] = r.matrix()[(i, j)];
            }
        }
    }
    Hermitian::from_matrix(a)
}

/// Completely positive trace-preserving map `ρ ↦ Σ K_i ρ K_i*`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Dimension("channel needs at least one Kraus operator".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.nrows() != out_dim || k.ncols() != in_dim) {
            return Err(Error::Dimension(format!(
                "Kraus operator is {}x{}, expected {out_dim}x{in_dim}",
                k.nrows(),
                k.ncols()
            )));
        }
        let mut sum = CMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let defect = frob(&(sum - CMatrix::identity(in_dim, in_dim)));
        if !(defect <= TRACE_PRESERVING_TOL) {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(Self {
            in_dim,
            out_dim,
            kraus,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::unitary(CMatrix::identity(n, n)).expect("identity is unitary")
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        let n = u.nrows();
        Self::new(n, u.ncols(), vec![u]).and_then(|c| {
            if c.in_dim == n {
                Ok(c)
            } else {
                Err(Error::Dimension("unitary must be square".into()))
            }
        })
    }

    /// Random channel with `r` Kraus operators, sliced from a random isometry.
    pub fn random<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, r: usize, rng: &mut R) -> Self {
        assert!(r * out_dim >= in_dim, "isometry needs r*out_dim >= in_dim");
        let w = loop {
            let g = random_gaussian_matrix(r * out_dim, in_dim, rng);
            if let Ok(q) = orthonormalize_columns(&g) {
                break q;
            }
        };
        let kraus = (0..r)
            .map(|i| w.rows(i * out_dim, out_dim).into_owned())
            .collect();
        Self::new(in_dim, out_dim, kraus).expect("isometry slices are trace preserving")
    }

    /// Completely depolarizing channel `ρ ↦ Tr ρ · I/n` from the `n²` operators `E_ij/√n`.
    pub fn depolarizing(n: usize) -> Self {
        let s = 1.0 / (n as f64).sqrt();
        let mut kraus = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = CMatrix::zeros(n, n);
                e[(i, j)] = Complex64::new(s, 0.0);
                kraus.push(e);
            }
        }
        Self::new(n, n, kraus).expect("depolarizing channel is trace preserving")
    }

    /// `Tr₂` on `C^d1 ⊗ C^d2` with Kraus operators `I ⊗ ⟨k|`.
    pub fn partial_trace(d1: usize, d2: usize) -> Self {
        let kraus = (0..d2)
            .map(|k| {
                let mut m = CMatrix::zeros(d1, d1 * d2);
                for i in 0..d1 {
                    m[(i, i * d2 + k)] = Complex64::new(1.0, 0.0);
                }
                m
            })
            .collect();
        Self::new(d1 * d2, d1, kraus).expect("partial trace is trace preserving")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn apply(&self, rho: &Hermitian) -> Result<Hermitian> {
        if rho.dim() != self.in_dim {
            return Err(Error::Dimension(format!(
                "channel input is {0}x{0}, got {1}x{1}",
                self.in_dim,
                rho.dim()
            )));
        }
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += k * rho.matrix() * k.adjoint();
        }
        Hermitian::from_matrix(out)
    }

    /// `‖Φ(I) − I‖_F`; zero for unital channels with `in_dim == out_dim`.
    pub fn unitality_defect(&self) -> f64 {
        let out = self.apply(&Hermitian::identity(self.in_dim)).expect("dims match");
        if self.in_dim != self.out_dim {
            return f64::INFINITY;
        }
        frob(&(out.matrix() - CMatrix::identity(self.out_dim, self.out_dim)))
    }
}

pub fn apply_channel(ch: &KrausChannel, rho: &Hermitian) -> Result<Hermitian> {
    ch.apply(rho)
}

/// Isometry `W: H → K ⊗ R` with `Φ(x) = Tr_R W x W*`.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringIsometry {
    w: CMatrix,
    out_dim: usize,
    env_dim: usize,
}

impl StinespringIsometry {
    pub fn new(w: CMatrix, out_dim: usize, env_dim: usize) -> Result<Self> {
        if w.nrows() != out_dim * env_dim {
            return Err(Error::Dimension(format!(
                "isometry has {} rows, expected {out_dim}*{env_dim}",
                w.nrows()
            )));
        }
        let n = w.ncols();
        let defect = frob(&(w.adjoint() * &w - CMatrix::identity(n, n)));
        if !(defect <= TRACE_PRESERVING_TOL) {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self { w, out_dim, env_dim })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.w
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `W ρ W*` on `K ⊗ R`.
    pub fn dilate(&self, rho: &Hermitian) -> Result<Hermitian> {
        if rho.dim() != self.w.ncols() {
            return Err(Error::Dimension(format!(
                "isometry input is {0}x{0}, got {1}x{1}",
                self.w.ncols(),
                rho.dim()
            )));
        }
        Hermitian::from_matrix(&self.w * rho.matrix() * self.w.adjoint())
    }

    /// `Tr_R W ρ W*`.
    pub fn apply(&self, rho: &Hermitian) -> Result<Hermitian> {
        partial_trace_1(&self.dilate(rho)?, self.out_dim, self.env_dim)
    }
}

/// `W = Σ K_i ⊗ e_i`, environment dimension equal to the number of Kraus operators.
pub fn stinespring_from_kraus(ch: &KrausChannel) -> StinespringIsometry {
    let r = ch.kraus.len();
    let mut w = CMatrix::zeros(ch.out_dim * r, ch.in_dim);
    for (i, k) in ch.kraus.iter().enumerate() {
        for a in 0..ch.out_dim {
            for x in 0..ch.in_dim {
                w[(a * r + i, x)] = k[(a, x)];
            }
        }
    }
    StinespringIsometry::new(w, ch.out_dim, r).expect("Kraus channels dilate to isometries")
}

/// `−Tr f(Φ(ρ)) + Tr f(ρ)`.
pub fn entropy_gain(f: &ScalarFunction, ch: &KrausChannel, rho: &Hermitian) -> Result<f64> {
    let out = ch.apply(rho)?;
    Ok(-trace_of_function(f, &out)? + trace_of_function(f, rho)?)
}

/// Channel on `C^n ⊕ C^n` with Kraus operators
/// `U = [[I, −I], [0, 0]]/√2` and `V = [[0, 0], [I, I]]/√2`.
pub fn averaging_channel(n: usize) -> KrausChannel {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    let mut v = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        u[(i, i)] = s;
        u[(i, n + i)] = -s;
        v[(n + i, i)] = s;
        v[(n + i, n + i)] = s;
    }
    KrausChannel::new(2 * n, 2 * n, vec![u, v]).expect("trace preserving by construction")
}

/// Block matrix `[[a, b], [b*, c]]` from `n × n` blocks.
pub fn block_matrix(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(&b.adjoint());
    m.view_mut((n, n), (n, n)).copy_from(c);
    m
}

/// `2 (a⁻¹ + b⁻¹)⁻¹`.
pub fn harmonic_mean(a: &Hermitian, b: &Hermitian) -> Result<Hermitian> {
    let s = inverse_pd(a)?.add(&inverse_pd(b)?);
    Ok(inverse_pd(&s)?.scaled(2.0))
}

/// Rectangular matrix exchange format for Kraus operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<KrausJson>,
}

impl From<&KrausChannel> for ChannelJson {
    fn from(ch: &KrausChannel) -> Self {
        let kraus = ch
            .kraus
            .iter()
            .map(|k| {
                let part = |g: fn(&Complex64) -> f64| {
                    (0..k.nrows())
                        .map(|i| (0..k.ncols()).map(|j| g(&k[(i, j)])).collect())
                        .collect()
                };
                KrausJson {
                    rows: k.nrows(),
                    cols: k.ncols(),
                    re: part(|z| z.re),
                    im: part(|z| z.im),
                }
            })
            .collect();
        ChannelJson {
            in_dim: ch.in_dim,
            out_dim: ch.out_dim,
            kraus,
        }
    }
}

impl TryFrom<&ChannelJson> for KrausChannel {
    type Error = Error;

    fn try_from(j: &ChannelJson) -> Result<Self> {
        let mut kraus = Vec::with_capacity(j.kraus.len());
        for k in &j.kraus {
            let ok = |rows: &Vec<Vec<f64>>| {
                rows.len() == k.rows && rows.iter().all(|r| r.len() == k.cols)
            };
            if !ok(&k.re) || !ok(&k.im) {
                return Err(Error::Malformed(format!(
                    "Kraus JSON does not describe a {}x{} matrix",
                    k.rows, k.cols
                )));
            }
            kraus.push(CMatrix::from_fn(k.rows, k.cols, |a, b| {
                Complex64::new(k.re[a][b], k.im[a][b])
            }));
        }
        KrausChannel::new(j.in_dim, j.out_dim, kraus)
    }
}

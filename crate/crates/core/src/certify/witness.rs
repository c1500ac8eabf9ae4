//! Self-contained trial instances and their margins.
//!
//! Suites evaluate every trial through [`evaluate`], so a dumped witness
//! re-verifies to exactly the margin that was reported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frechet::{frechet_diff, LoewnerMatrix, SecondDiffForm, Superoperator};
use crate::linalg::{eigh, psd_margin, trace_of_function, Hermitian, MatrixJson};
use crate::quantum::{entropy_gain, partial_trace_1, ChannelJson, KrausChannel};
use crate::scalar::{gap_function, ScalarFunction, GAP_DEGENERACY};

/// Minimum output eigenvalue for functions without a value at zero.
pub const FULL_RANK_FLOOR: f64 = 1e-8;

/// Threshold in the vanishing-at-zero check `g(t) <= GAP_VANISHING`.
pub const GAP_VANISHING: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Midpoint convexity of `Tr f`.
    TraceConvexity { x: MatrixJson, y: MatrixJson },
    /// Midpoint convexity of `−Tr f(ρ₁) + Tr f(ρ)` on `C^d1 ⊗ C^d2`.
    Entropic { d1: usize, d2: usize, x: MatrixJson, y: MatrixJson },
    /// Midpoint convexity of `G(ρ_1..ρ_k)`.
    Subentropic { x: Vec<MatrixJson>, y: Vec<MatrixJson> },
    /// Sign of the second differential of `G`.
    Hessian { rhos: Vec<MatrixJson>, hs: Vec<MatrixJson> },
    Condition13 { rho: MatrixJson, sigma: MatrixJson },
    /// Sign agreement between the inverse-differential test and the Hessian.
    Equivalence { rho: MatrixJson, sigma: MatrixJson },
    MatrixEntropy { rho_x: MatrixJson, h_x: MatrixJson, rho_y: MatrixJson, h_y: MatrixJson },
    EntropyGain { channel: ChannelJson, x: MatrixJson, y: MatrixJson },
    ScalarConvexity { t: f64 },
    GapSuperadditive { t: f64, s: f64 },
    GapMonotone { t: f64, s: f64 },
    GapVanishing { t: f64 },
    GapConcavity { t: f64, s: f64 },
    GapFit { b: f64, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub margin: f64,
    pub scale: f64,
}

impl Witness {
    /// Dimension of the primary operand; 1 for scalar checks.
    pub fn dim(&self) -> usize {
        match self {
            Witness::TraceConvexity { x, .. }
            | Witness::Entropic { x, .. }
            | Witness::EntropyGain { x, .. } => x.dim,
            Witness::Subentropic { x, .. } => x.first().map_or(0, |m| m.dim),
            Witness::Hessian { rhos, .. } => rhos.first().map_or(0, |m| m.dim),
            Witness::Condition13 { rho, .. } | Witness::Equivalence { rho, .. } => rho.dim,
            Witness::MatrixEntropy { rho_x, .. } => rho_x.dim,
            _ => 1,
        }
    }
}

fn herm(j: &MatrixJson) -> Result<Hermitian> {
    Hermitian::try_from(j)
}

fn herms(js: &[MatrixJson]) -> Result<Vec<Hermitian>> {
    js.iter().map(herm).collect()
}

/// `((Ψx + Ψy)/2 − Ψ(mid)) / max(1, |Ψx| + |Ψy|)`.
fn convexity(px: f64, py: f64, pm: f64) -> Evaluation {
    let scale = (px.abs() + py.abs()).max(1.0);
    Evaluation {
        margin: ((px + py) / 2.0 - pm) / scale,
        scale,
    }
}

fn domain(f: &ScalarFunction, value: f64) -> Error {
    Error::Domain {
        function: f.name().to_string(),
        value,
    }
}

fn g_functional(f: &ScalarFunction, xs: &[Hermitian]) -> Result<f64> {
    let total = xs[1..].iter().fold(xs[0].clone(), |acc, x| acc.add(x));
    let mut v = -trace_of_function(f, &total)?;
    for x in xs {
        v += trace_of_function(f, x)?;
    }
    Ok(v)
}

fn midpoints(x: &[Hermitian], y: &[Hermitian]) -> Vec<Hermitian> {
    x.iter().zip(y).map(|(a, b)| a.midpoint(b)).collect()
}

/// Requires `f'' > GAP_DEGENERACY` (and finite) on the spectrum.
fn check_curvature(f: &ScalarFunction, eigenvalues: &[f64]) -> Result<()> {
    for &l in eigenvalues {
        let c = f.derivative_value(l, 2)?;
        if !(c.is_finite() && c > GAP_DEGENERACY) {
            return Err(domain(f, l));
        }
    }
    Ok(())
}

/// `λ_min(df'(ρ+σ)⁻¹ − df'(ρ)⁻¹ − df'(σ)⁻¹)`, normalized by the spectral
/// radius of `df'(ρ+σ)⁻¹`.
pub fn condition13_margin(f: &ScalarFunction, rho: &Hermitian, sigma: &Hermitian) -> Result<Evaluation> {
    let fp = f.derivative()?;
    let inverse = |m: &Hermitian| -> Result<(Superoperator, f64)> {
        let l = LoewnerMatrix::new(&fp, m)?;
        check_curvature(f, &l.base.eigenvalues)?;
        let r = l.reciprocal()?;
        let radius = r.entries.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Ok((r.superoperator(), radius))
    };
    let (joint, scale) = inverse(&rho.add(sigma))?;
    let (a, _) = inverse(rho)?;
    let (b, _) = inverse(sigma)?;
    let diff = joint.sub(&a).sub(&b).to_hermitian()?;
    let m = psd_margin(&diff)?;
    Ok(Evaluation {
        margin: m.min_eigenvalue / scale.max(1.0),
        scale,
    })
}

/// Orthonormal basis of the real space of `n × n` Hermitian matrices.
pub fn hermitian_basis(n: usize) -> Vec<Hermitian> {
    use num_complex::Complex64;
    let mut out = Vec::with_capacity(n * n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i..n {
            if i == j {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                out.push(Hermitian::from_real_diagonal(&v));
            } else {
                let mut re = crate::linalg::CMatrix::zeros(n, n);
                re[(i, j)] = Complex64::new(r, 0.0);
                re[(j, i)] = Complex64::new(r, 0.0);
                out.push(Hermitian::from_matrix(re).expect("square"));
                let mut im = crate::linalg::CMatrix::zeros(n, n);
                im[(i, j)] = Complex64::new(0.0, r);
                im[(j, i)] = Complex64::new(0.0, -r);
                out.push(Hermitian::from_matrix(im).expect("square"));
            }
        }
    }
    out
}

/// Smallest eigenvalue of the order-2 Hessian of `G` at `(ρ, σ)`, as a
/// quadratic form on pairs of Hermitian directions, by polarization of the
/// second differential over an orthonormal basis.
pub fn hessian_margin(f: &ScalarFunction, rho: &Hermitian, sigma: &Hermitian) -> Result<Evaluation> {
    let n = rho.dim();
    let form = SecondDiffForm::new(f, &[rho.clone(), sigma.clone()])?;
    let basis = hermitian_basis(n);
    let zero = Hermitian::zeros(n);
    let nn = basis.len();
    let direction = |a: usize| -> [Hermitian; 2] {
        if a < nn {
            [basis[a].clone(), zero.clone()]
        } else {
            [zero.clone(), basis[a - nn].clone()]
        }
    };
    let m = 2 * nn;
    let diag: Vec<f64> = (0..m)
        .map(|a| Ok(form.parts(&direction(a))?.value()))
        .collect::<Result<_>>()?;
    let mut q = crate::linalg::CMatrix::zeros(m, m);
    for a in 0..m {
        q[(a, a)] = diag[a].into();
        let da = direction(a);
        for b in a + 1..m {
            let db = direction(b);
            let sum = [da[0].add(&db[0]), da[1].add(&db[1])];
            let v = (form.parts(&sum)?.value() - diag[a] - diag[b]) / 2.0;
            q[(a, b)] = v.into();
            q[(b, a)] = v.into();
        }
    }
    let d = eigh(&Hermitian::from_matrix(q)?)?;
    let scale = d.spectral_radius();
    Ok(Evaluation {
        margin: d.eigenvalues[0] / scale.max(1.0),
        scale,
    })
}

fn gap_value(g: &ScalarFunction, t: f64) -> Result<f64> {
    g.value(t)
}

pub fn evaluate(f: &ScalarFunction, w: &Witness) -> Result<Evaluation> {
    let e = match w {
        Witness::TraceConvexity { x, y } => {
            let (x, y) = (herm(x)?, herm(y)?);
            let psi = |m: &Hermitian| trace_of_function(f, m);
            convexity(psi(&x)?, psi(&y)?, psi(&x.midpoint(&y))?)
        }
        Witness::Entropic { d1, d2, x, y } => {
            let (x, y) = (herm(x)?, herm(y)?);
            let psi = |m: &Hermitian| -> Result<f64> {
                Ok(-trace_of_function(f, &partial_trace_1(m, *d1, *d2)?)? + trace_of_function(f, m)?)
            };
            convexity(psi(&x)?, psi(&y)?, psi(&x.midpoint(&y))?)
        }
        Witness::Subentropic { x, y } => {
            let (x, y) = (herms(x)?, herms(y)?);
            if x.is_empty() || x.len() != y.len() {
                return Err(Error::Malformed("tuples must be nonempty and equally long".into()));
            }
            convexity(g_functional(f, &x)?, g_functional(f, &y)?, g_functional(f, &midpoints(&x, &y))?)
        }
        Witness::Hessian { rhos, hs } => {
            let p = crate::frechet::second_diff_g_parts(f, &herms(rhos)?, &herms(hs)?)?;
            let scale = p.magnitude();
            let margin = if scale > 0.0 { p.value() / scale } else { 0.0 };
            Evaluation { margin, scale }
        }
        Witness::Condition13 { rho, sigma } => condition13_margin(f, &herm(rho)?, &herm(sigma)?)?,
        Witness::Equivalence { rho, sigma } => {
            let (rho, sigma) = (herm(rho)?, herm(sigma)?);
            // without curvature the inverse differentials do not exist and the
            // order-2 Hessian vanishes identically; count that side as neutral
            let m13 = match condition13_margin(f, &rho, &sigma) {
                Ok(e) => e.margin,
                Err(Error::Domain { .. } | Error::NotInvertible { .. }) => 0.0,
                Err(e) => return Err(e),
            };
            let mh = hessian_margin(f, &rho, &sigma)?;
            let gap = m13.abs().min(mh.margin.abs());
            let disagree = (m13 < 0.0 && mh.margin > 0.0) || (m13 > 0.0 && mh.margin < 0.0);
            Evaluation {
                margin: if disagree { -gap } else { gap },
                scale: mh.scale,
            }
        }
        Witness::MatrixEntropy { rho_x, h_x, rho_y, h_y } => {
            let fp = f.derivative()?;
            let q = |r: &Hermitian, h: &Hermitian| -> Result<f64> {
                Ok(h.trace_product(&frechet_diff(&fp, r, h)?))
            };
            let (rx, hx, ry, hy) = (herm(rho_x)?, herm(h_x)?, herm(rho_y)?, herm(h_y)?);
            convexity(q(&rx, &hx)?, q(&ry, &hy)?, q(&rx.midpoint(&ry), &hx.midpoint(&hy))?)
        }
        Witness::EntropyGain { channel, x, y } => {
            let ch = KrausChannel::try_from(channel)?;
            let (x, y) = (herm(x)?, herm(y)?);
            let psi = |m: &Hermitian| -> Result<f64> {
                if f.zero_extension().is_none() {
                    let out = ch.apply(m)?;
                    let floor = psd_margin(&out)?.min_eigenvalue;
                    if floor < FULL_RANK_FLOOR {
                        return Err(domain(f, floor));
                    }
                }
                entropy_gain(f, &ch, m)
            };
            convexity(psi(&x)?, psi(&y)?, psi(&x.midpoint(&y))?)
        }
        Witness::ScalarConvexity { t } => Evaluation {
            margin: f.derivative_value(*t, 2)?,
            scale: 1.0,
        },
        Witness::GapSuperadditive { t, s } => {
            let g = gap_function(f)?;
            let (gt, gs) = (gap_value(&g, *t)?, gap_value(&g, *s)?);
            let scale = (gt.abs() + gs.abs()).max(1.0);
            Evaluation {
                margin: (gap_value(&g, t + s)? - gt - gs) / scale,
                scale,
            }
        }
        Witness::GapMonotone { t, s } => {
            let g = gap_function(f)?;
            let (gt, gs) = (gap_value(&g, *t)?, gap_value(&g, *s)?);
            let scale = (gt.abs() + gs.abs()).max(1.0);
            Evaluation {
                margin: (gs - gt) / scale,
                scale,
            }
        }
        Witness::GapVanishing { t } => {
            let g = gap_function(f)?;
            Evaluation {
                margin: GAP_VANISHING - gap_value(&g, *t)?,
                scale: 1.0,
            }
        }
        Witness::GapConcavity { t, s } => {
            let g = gap_function(f)?;
            let (gt, gs) = (gap_value(&g, *t)?, gap_value(&g, *s)?);
            let scale = (gt.abs() + gs.abs()).max(1.0);
            Evaluation {
                margin: (gap_value(&g, (t + s) / 2.0)? - (gt + gs) / 2.0) / scale,
                scale,
            }
        }
        Witness::GapFit { .. } => {
            let fit = super::pipeline::fit_gap_function(f)?;
            Evaluation {
                margin: fit.margin(),
                scale: 1.0,
            }
        }
    };
    if !e.margin.is_finite() {
        return Err(domain(f, e.margin));
    }
    Ok(e)
}

fn stretch(m: &Hermitian, x: &Hermitian, factor: f64) -> Hermitian {
    m.add(&x.sub(m).scaled(factor))
}

fn positive(m: &Hermitian) -> bool {
    psd_margin(m).map(|p| p.min_eigenvalue > 0.0).unwrap_or(false)
}

/// The same instance with its chord scaled about the midpoint by `factor`;
/// `None` if the result leaves the positive cone or the witness has no chord.
pub fn amplify(w: &Witness, factor: f64) -> Option<Witness> {
    let pair = |x: &MatrixJson, y: &MatrixJson| -> Option<(MatrixJson, MatrixJson)> {
        let (x, y) = (herm(x).ok()?, herm(y).ok()?);
        let m = x.midpoint(&y);
        let (x2, y2) = (stretch(&m, &x, factor), stretch(&m, &y, factor));
        (positive(&x2) && positive(&y2)).then(|| ((&x2).into(), (&y2).into()))
    };
    match w {
        Witness::TraceConvexity { x, y } => {
            let (x, y) = pair(x, y)?;
            Some(Witness::TraceConvexity { x, y })
        }
        Witness::Entropic { d1, d2, x, y } => {
            let (x, y) = pair(x, y)?;
            Some(Witness::Entropic { d1: *d1, d2: *d2, x, y })
        }
        Witness::EntropyGain { channel, x, y } => {
            let (x, y) = pair(x, y)?;
            Some(Witness::EntropyGain { channel: channel.clone(), x, y })
        }
        Witness::Subentropic { x, y } => {
            let mut xs = Vec::with_capacity(x.len());
            let mut ys = Vec::with_capacity(y.len());
            for (a, b) in x.iter().zip(y) {
                let (a, b) = pair(a, b)?;
                xs.push(a);
                ys.push(b);
            }
            Some(Witness::Subentropic { x: xs, y: ys })
        }
        Witness::MatrixEntropy { rho_x, h_x, rho_y, h_y } => {
            let (rx, ry) = pair(rho_x, rho_y)?;
            let (hx, hy) = (herm(h_x).ok()?, herm(h_y).ok()?);
            let hm = hx.midpoint(&hy);
            Some(Witness::MatrixEntropy {
                rho_x: rx,
                h_x: (&stretch(&hm, &hx, factor)).into(),
                rho_y: ry,
                h_y: (&stretch(&hm, &hy, factor)).into(),
            })
        }
        _ => None,
    }
}

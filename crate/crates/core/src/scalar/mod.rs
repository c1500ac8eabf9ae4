//! Scalar functions on the positive half-line with forward-mode derivatives.

mod expr;
mod jet;
mod quadrature;

use std::fmt;
use std::sync::Arc;

pub use expr::{parse, Expr, Func};
pub use jet::Jet;
pub use quadrature::{divided_difference_quadrature_check, gauss_legendre_32};

use crate::error::{Error, Result};
use jet::{DomainFault, Taylor};

/// Relative gap below which divided differences switch to `f'` at the midpoint.
pub const DIVIDED_DIFFERENCE_SWITCH: f64 = 1e-6;

/// Smallest admissible `f''` for the gap function `1/f''`.
pub const GAP_DEGENERACY: f64 = 1e-12;

#[derive(Clone)]
enum Kind {
    XLogX,
    NegLog,
    Power(f64),
    Affine { a: f64, b: f64 },
    Exp,
    NegSqrt,
    Expression(Arc<Expr>),
    Reciprocal2(Arc<ScalarFunction>),
}

/// A scalar function on `(0, inf)` evaluated through derivative jets.
///
/// `order` counts how many times the function has been differentiated with
/// [`ScalarFunction::derivative`]; evaluation shifts the underlying series.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    kind: Kind,
    zero_extension: Option<f64>,
    order: usize,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("zero_extension", &self.zero_extension)
            .finish()
    }
}

fn closed_form(kind: &Kind, t: f64) -> std::result::Result<Taylor, DomainFault> {
    const N: usize = jet::TAYLOR_LEN;
    let positive = |op| {
        if t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(DomainFault { op, at: t })
        }
    };
    let mut d = [0.0; N];
    match kind {
        Kind::XLogX => {
            positive("t*log(t)")?;
            let l = t.ln();
            d[0] = t * l;
            d[1] = l + 1.0;
            // f^(k) = (-1)^k (k-2)! t^(1-k) for k >= 2
            let mut fact = 1.0;
            for (k, dk) in d.iter_mut().enumerate().skip(2) {
                if k > 2 {
                    fact *= (k - 2) as f64;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                *dk = sign * fact * t.powi(1 - k as i32);
            }
        }
        Kind::NegLog => {
            positive("-log(t)")?;
            d[0] = -t.ln();
            // f^(k) = (-1)^k (k-1)! t^(-k)
            let mut fact = 1.0;
            for (k, dk) in d.iter_mut().enumerate().skip(1) {
                if k > 1 {
                    fact *= (k - 1) as f64;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                *dk = sign * fact * t.powi(-(k as i32));
            }
        }
        Kind::Power(p) => {
            positive("t^p")?;
            let mut falling = 1.0;
            for (k, dk) in d.iter_mut().enumerate() {
                *dk = falling * t.powf(p - k as f64);
                falling *= p - k as f64;
            }
        }
        Kind::NegSqrt => {
            positive("-sqrt(t)")?;
            let mut falling = 1.0;
            for (k, dk) in d.iter_mut().enumerate() {
                *dk = -falling * t.powf(0.5 - k as f64);
                falling *= 0.5 - k as f64;
            }
        }
        Kind::Affine { a, b } => {
            positive("a + b*t")?;
            d[0] = a + b * t;
            d[1] = *b;
        }
        Kind::Exp => {
            positive("exp(t)")?;
            d = [t.exp(); N];
        }
        Kind::Expression(e) => {
            positive("expression")?;
            return e.taylor(t);
        }
        Kind::Reciprocal2(f) => {
            let second = f.series(t)?.shifted(2).ok_or(DomainFault {
                op: "jet order",
                at: t,
            })?;
            return second.recip();
        }
    }
    Ok(Taylor::from_derivatives(&d))
}

impl ScalarFunction {
    fn new(name: impl Into<String>, kind: Kind, zero_extension: Option<f64>) -> Self {
        Self {
            name: name.into(),
            kind,
            zero_extension,
            order: 0,
        }
    }

    /// `t log t`, extended by 0 at the origin.
    pub fn tlogt() -> Self {
        Self::new("tlogt", Kind::XLogX, Some(0.0))
    }

    /// `-log t`; no extension at 0.
    pub fn neglog() -> Self {
        Self::new("neglog", Kind::NegLog, None)
    }

    pub fn square() -> Self {
        Self::new("square", Kind::Power(2.0), Some(0.0))
    }

    /// `t^p`, extended by 0 at the origin (requires `p > 0`).
    pub fn power(p: f64) -> Self {
        Self::new(format!("power:{p}"), Kind::Power(p), (p > 0.0).then_some(0.0))
    }

    pub fn affine(a: f64, b: f64) -> Self {
        Self::new(format!("affine:{a}:{b}"), Kind::Affine { a, b }, Some(a))
    }

    pub fn exp() -> Self {
        Self::new("exp", Kind::Exp, Some(1.0))
    }

    /// `-sqrt t`, extended by 0 at the origin.
    pub fn negsqrt() -> Self {
        Self::new("negsqrt", Kind::NegSqrt, Some(0.0))
    }

    /// Builds a function from the expression grammar.
    pub fn from_expression(src: &str, zero_extension: Option<f64>) -> Result<Self> {
        let e = parse(src)?;
        Ok(Self::new(e.to_string(), Kind::Expression(Arc::new(e)), zero_extension))
    }

    /// Resolves a registry name, including the parametric forms
    /// `power:<p>` and `affine:<a>:<b>`.
    pub fn lookup(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownFunction(name.to_string());
        let num = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
        match name {
            "tlogt" => Ok(Self::tlogt()),
            "neglog" => Ok(Self::neglog()),
            "square" => Ok(Self::square()),
            "affine" => Ok(Self::affine(1.0, 2.0).renamed("affine")),
            "exp" => Ok(Self::exp()),
            "negsqrt" => Ok(Self::negsqrt()),
            _ => {
                if let Some(p) = name.strip_prefix("power:") {
                    let p = num(p).ok_or_else(unknown)?;
                    return Ok(Self::power(p));
                }
                if let Some(rest) = name.strip_prefix("affine:") {
                    let (a, b) = rest.split_once(':').ok_or_else(unknown)?;
                    let (a, b) = (num(a).ok_or_else(unknown)?, num(b).ok_or_else(unknown)?);
                    return Ok(Self::affine(a, b));
                }
                Err(unknown())
            }
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_zero_extension(mut self, value: Option<f64>) -> Self {
        self.zero_extension = value;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Continuous extension value `f(0+)`, when declared.
    pub fn zero_extension(&self) -> Option<f64> {
        self.zero_extension
    }

    /// Open lower end of the domain.
    pub fn domain_min(&self) -> f64 {
        0.0
    }

    fn series(&self, t: f64) -> std::result::Result<Taylor, DomainFault> {
        let s = closed_form(&self.kind, t)?;
        let s = s.shifted(self.order).ok_or(DomainFault {
            op: "jet order",
            at: t,
        })?;
        if !s.is_finite() {
            return Err(DomainFault { op: "overflow", at: t });
        }
        Ok(s)
    }

    fn domain_error(&self, fault: DomainFault, t: f64) -> Error {
        let value = if fault.op == "jet order" { t } else { fault.at };
        Error::Domain {
            function: format!("{} ({})", self.name, fault.op),
            value,
        }
    }

    /// `(f(t), f'(t), f''(t), f'''(t))`.
    pub fn jet(&self, t: f64) -> Result<Jet> {
        let s = self.series(t).map_err(|e| self.domain_error(e, t))?;
        s.jet().ok_or_else(|| Error::Domain {
            function: format!("{} (jet order exhausted)", self.name),
            value: t,
        })
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.series(t)
            .map(|s| s.value())
            .map_err(|e| self.domain_error(e, t))
    }

    /// k-th derivative (k <= 3).
    pub fn derivative_value(&self, t: f64, k: usize) -> Result<f64> {
        let s = self.series(t).map_err(|e| self.domain_error(e, t))?;
        s.derivative_at(k).ok_or_else(|| Error::Domain {
            function: format!("{} (jet order exhausted)", self.name),
            value: t,
        })
    }

    /// Value at a spectral point, using the zero extension for `t <= 0`
    /// within `tol` of the origin.
    pub fn value_on_spectrum(&self, t: f64, tol: f64) -> Result<f64> {
        if t > 0.0 {
            return self.value(t);
        }
        match self.zero_extension {
            Some(v) if t >= -tol => Ok(v),
            _ => Err(Error::Domain {
                function: self.name.clone(),
                value: t,
            }),
        }
    }

    /// The derivative `f'` as a function in its own right.
    pub fn derivative(&self) -> Result<Self> {
        let mut d = self.clone();
        d.order += 1;
        d.name = format!("d({})", self.name);
        d.zero_extension = None;
        // the shifted series must still carry a full jet
        if self.series_len() < d.order + 4 {
            return Err(Error::Domain {
                function: format!("{} (jet order exhausted)", d.name),
                value: f64::NAN,
            });
        }
        Ok(d)
    }

    fn series_len(&self) -> usize {
        match self.kind {
            Kind::Reciprocal2(_) => jet::TAYLOR_LEN - 2,
            _ => jet::TAYLOR_LEN,
        }
    }

    /// `k(t, s) = (f(t) - f(s)) / (t - s)`; see [`divided_difference`].
    pub fn divided_difference(&self, t: f64, s: f64) -> Result<f64> {
        divided_difference(self, t, s)
    }
}

/// Divided difference of `f` with the midpoint rule near the diagonal.
///
/// For `|t - s| <= 1e-6 * max(|t|, |s|, 1)` the value is `f'((t + s)/2)`.
/// Arguments are ordered before evaluation, so `k(t, s) == k(s, t)` bitwise.
pub fn divided_difference(f: &ScalarFunction, t: f64, s: f64) -> Result<f64> {
    let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
    let gap = hi - lo;
    if gap > DIVIDED_DIFFERENCE_SWITCH * hi.abs().max(lo.abs()).max(1.0) {
        Ok((f.value(hi)? - f.value(lo)?) / gap)
    } else {
        f.derivative_value(0.5 * (lo + hi), 1)
    }
}

/// Log-spaced grid with `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if n == 1 {
                lo
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// The gap function `g = 1/f''`.
///
/// `f''` is sampled on a log grid over `[1e-3, 1e2]`; a value below `1e-12`
/// anywhere rejects the function as affine or degenerate.
pub fn gap_function(f: &ScalarFunction) -> Result<ScalarFunction> {
    for t in log_grid(1e-3, 1e2, 61) {
        let second = f.derivative_value(t, 2)?;
        if !(second > GAP_DEGENERACY) {
            return Err(Error::Degenerate(format!(
                "{}: f''({t:e}) = {second:e}",
                f.name()
            )));
        }
    }
    if f.order != 0 || matches!(f.kind, Kind::Reciprocal2(_)) {
        return Err(Error::Degenerate(format!(
            "gap function of a derived function ({}) is not supported",
            f.name()
        )));
    }
    Ok(ScalarFunction::new(
        format!("gap({})", f.name()),
        Kind::Reciprocal2(Arc::new(f.clone())),
        None,
    ))
}

/// The built-in functions.
pub fn registry() -> Vec<ScalarFunction> {
    vec![
        ScalarFunction::tlogt(),
        ScalarFunction::neglog(),
        ScalarFunction::square(),
        ScalarFunction::power(1.25),
        ScalarFunction::power(1.5),
        ScalarFunction::power(1.75),
        ScalarFunction::affine(1.0, 2.0).renamed("affine"),
        ScalarFunction::exp(),
        ScalarFunction::negsqrt(),
    ]
}

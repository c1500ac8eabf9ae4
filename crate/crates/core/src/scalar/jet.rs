//! Truncated Taylor arithmetic used for forward-mode derivatives.
//!
//! A [`Taylor`] stores normalized coefficients `c[k] = f^(k)(t) / k!` of the
//! expansion around the evaluation point. Six coefficients are carried so that
//! the first derivative `f'` and the gap function `1/f''` still expose a full
//! third-order [`Jet`].

use std::ops::{Add, Mul, Neg, Sub};

pub(crate) const TAYLOR_LEN: usize = 6;

const FACTORIALS: [f64; TAYLOR_LEN] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0];

/// Value and first three derivatives of a scalar function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet {
    pub fn as_array(&self) -> [f64; 4] {
        [self.value, self.d1, self.d2, self.d3]
    }
}

/// Failure of an elementary operation inside a jet evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DomainFault {
    pub op: &'static str,
    pub at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Taylor {
    c: [f64; TAYLOR_LEN],
    len: usize,
}

impl Taylor {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; TAYLOR_LEN];
        c[0] = v;
        Self { c, len: TAYLOR_LEN }
    }

    pub fn variable(t: f64) -> Self {
        let mut c = [0.0; TAYLOR_LEN];
        c[0] = t;
        c[1] = 1.0;
        Self { c, len: TAYLOR_LEN }
    }

    /// Builds a series from plain derivatives `d[k] = f^(k)(t)`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        let len = d.len().min(TAYLOR_LEN);
        let mut c = [0.0; TAYLOR_LEN];
        for k in 0..len {
            c[k] = d[k] / FACTORIALS[k];
        }
        Self { c, len }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn is_finite(&self) -> bool {
        self.c[..self.len].iter().all(|v| v.is_finite())
    }

    pub fn derivative_at(&self, k: usize) -> Option<f64> {
        (k < self.len).then(|| self.c[k] * FACTORIALS[k])
    }

    /// The series of the `order`-th derivative, losing `order` coefficients.
    pub fn shifted(&self, order: usize) -> Option<Self> {
        if order >= self.len {
            return None;
        }
        let len = self.len - order;
        let mut c = [0.0; TAYLOR_LEN];
        for k in 0..len {
            // f^(k+order)/k! = c[k+order] * (k+order)!/k!
            c[k] = self.c[k + order] * FACTORIALS[k + order] / FACTORIALS[k];
        }
        Some(Self { c, len })
    }

    pub fn jet(&self) -> Option<Jet> {
        if self.len < 4 {
            return None;
        }
        Some(Jet {
            value: self.c[0],
            d1: self.c[1],
            d2: self.c[2] * 2.0,
            d3: self.c[3] * 6.0,
        })
    }

    fn with_len(len: usize) -> Self {
        Self {
            c: [0.0; TAYLOR_LEN],
            len,
        }
    }

    pub fn recip(&self) -> Result<Self, DomainFault> {
        Self::constant(1.0).div(self)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, DomainFault> {
        let v0 = rhs.c[0];
        if v0 == 0.0 || !v0.is_finite() {
            return Err(DomainFault { op: "division", at: v0 });
        }
        let mut q = Self::with_len(self.len.min(rhs.len));
        for k in 0..q.len {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= rhs.c[j] * q.c[k - j];
            }
            q.c[k] = acc / v0;
        }
        Ok(q)
    }

    pub fn exp(&self) -> Self {
        let mut e = Self::with_len(self.len);
        e.c[0] = self.c[0].exp();
        for k in 1..e.len {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e.c[k - j];
            }
            e.c[k] = acc / k as f64;
        }
        e
    }

    pub fn ln(&self) -> Result<Self, DomainFault> {
        let u0 = self.c[0];
        if u0 <= 0.0 || !u0.is_finite() {
            return Err(DomainFault { op: "log", at: u0 });
        }
        let mut l = Self::with_len(self.len);
        l.c[0] = u0.ln();
        for k in 1..l.len {
            let mut acc = 0.0;
            for j in 1..k {
                acc += (k - j) as f64 * self.c[j] * l.c[k - j];
            }
            l.c[k] = (self.c[k] - acc / k as f64) / u0;
        }
        Ok(l)
    }

    pub fn sqrt(&self) -> Result<Self, DomainFault> {
        if self.c[0] <= 0.0 {
            return Err(DomainFault {
                op: "sqrt",
                at: self.c[0],
            });
        }
        self.powf(0.5)
    }

    /// `u^p` for a constant real exponent.
    pub fn powf(&self, p: f64) -> Result<Self, DomainFault> {
        let u0 = self.c[0];
        let integral = p.fract() == 0.0 && p.abs() <= 64.0;
        if integral && p >= 0.0 && u0 == 0.0 {
            return Ok(self.powi_by_squaring(p as u32));
        }
        if u0 == 0.0 || (!integral && u0 < 0.0) || !u0.is_finite() {
            return Err(DomainFault { op: "power", at: u0 });
        }
        let mut w = Self::with_len(self.len);
        w.c[0] = if integral {
            u0.powi(p as i32)
        } else {
            u0.powf(p)
        };
        for k in 1..w.len {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (p * j as f64 - (k - j) as f64) * self.c[j] * w.c[k - j];
            }
            w.c[k] = acc / (k as f64 * u0);
        }
        Ok(w)
    }

    /// `u^v` with a non-constant exponent, through `exp(v log u)`.
    pub fn pow(&self, exponent: &Self) -> Result<Self, DomainFault> {
        Ok((*exponent * self.ln()?).exp())
    }

    fn powi_by_squaring(&self, mut n: u32) -> Self {
        let mut base = *self;
        let mut acc = Self::constant(1.0);
        acc.len = self.len;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        let mut out = Taylor::with_len(self.len.min(rhs.len));
        for k in 0..out.len {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        self + (-rhs)
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(mut self) -> Taylor {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let mut out = Taylor::with_len(self.len.min(rhs.len));
        for k in 0..out.len {
            out.c[k] = (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn derivs(t: &Taylor) -> Vec<f64> {
        (0..t.len()).map(|k| t.derivative_at(k).unwrap()).collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * y.abs().max(1.0), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn product_rule_to_fifth_order() {
        // t^2 * t^3 = t^5 at t = 2
        let t = Taylor::variable(2.0);
        let p = (t * t) * (t * t * t);
        close(&derivs(&p), &[32.0, 80.0, 160.0, 240.0, 240.0, 120.0], 1e-14);
    }

    #[test]
    fn exp_log_inverse() {
        let t = Taylor::variable(1.7);
        let back = t.ln().unwrap().exp();
        close(&derivs(&back), &[1.7, 1.0, 0.0, 0.0, 0.0, 0.0], 1e-14);
    }

    #[test]
    fn log_derivatives() {
        // d^k log t = (-1)^(k-1) (k-1)! / t^k
        let t = 3.0;
        let l = Taylor::variable(t).ln().unwrap();
        let expect = [
            t.ln(),
            1.0 / t,
            -1.0 / (t * t),
            2.0 / t.powi(3),
            -6.0 / t.powi(4),
            24.0 / t.powi(5),
        ];
        close(&derivs(&l), &expect, 1e-14);
    }

    #[test]
    fn real_power_and_reciprocal() {
        let t = 4.0;
        let w = Taylor::variable(t).powf(1.5).unwrap();
        close(&derivs(&w)[..3], &[8.0, 3.0, 0.375], 1e-14);
        let r = Taylor::variable(t).recip().unwrap();
        close(&derivs(&r)[..3], &[0.25, -1.0 / 16.0, 2.0 / 64.0], 1e-14);
    }

    #[test]
    fn integer_power_of_negative_base() {
        let w = (Taylor::variable(1.0) - Taylor::constant(3.0)).powf(2.0).unwrap();
        close(&derivs(&w)[..4], &[4.0, -4.0, 2.0, 0.0], 1e-14);
        let z = (Taylor::variable(3.0) - Taylor::constant(3.0)).powf(3.0).unwrap();
        close(&derivs(&z)[..4], &[0.0, 0.0, 0.0, 6.0], 1e-14);
    }

    #[test]
    fn domain_faults() {
        assert_eq!(Taylor::constant(-1.0).ln().unwrap_err().op, "log");
        assert_eq!(
            Taylor::variable(1.0).div(&Taylor::constant(0.0)).unwrap_err().op,
            "division"
        );
        assert!(Taylor::constant(-2.0).powf(0.5).is_err());
    }

    #[test]
    fn shifting_drops_coefficients() {
        let w = Taylor::variable(2.0).powf(4.0).unwrap();
        let s = w.shifted(2).unwrap();
        assert_eq!(s.len(), 4);
        close(&derivs(&s), &[48.0, 48.0, 24.0, 0.0], 1e-14);
        assert!(w.shifted(6).is_none());
    }
}

//! Truncated univariate formal series over arbitrary-precision complex
//! coefficients, with a reality flag for the many series of the theory that
//! live in R[[z]] (Gamma, rho, ell, f, tau, h).

use crate::error::{Error, Result};
use crate::num::{self, Ctx};
use rug::ops::CompleteRound;
use rug::{Assign, Complex, Float};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reality {
    Real,
    Complex,
}

#[derive(Clone, Debug)]
pub struct UniSeries {
    ctx: Ctx,
    order: usize,
    coeffs: Vec<Complex>,
    reality: Reality,
}

impl UniSeries {
    pub fn zero(ctx: Ctx, order: usize) -> Self {
        UniSeries {
            ctx,
            order,
            coeffs: (0..=order).map(|_| ctx.zero()).collect(),
            reality: Reality::Real,
        }
    }

    /// The identity series z.
    pub fn identity(ctx: Ctx, order: usize) -> Self {
        let mut s = Self::zero(ctx, order);
        s.coeffs[1] = ctx.one();
        s
    }

    pub fn monomial(ctx: Ctx, order: usize, degree: usize, c: Complex) -> Self {
        let mut s = Self::zero(ctx, order);
        if degree <= order {
            s.reality = if c.imag().is_zero() { Reality::Real } else { Reality::Complex };
            s.coeffs[degree] = c;
        }
        s
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn reality(&self) -> Reality {
        self.reality
    }

    pub fn mark_real(mut self) -> Self {
        self.reality = Reality::Real;
        self
    }

    pub fn mark_complex(mut self) -> Self {
        self.reality = Reality::Complex;
        self
    }

    pub fn coeff(&self, n: usize) -> &Complex {
        &self.coeffs[n]
    }

    pub fn set_coeff(&mut self, n: usize, c: Complex) {
        if !c.imag().is_zero() {
            self.reality = Reality::Complex;
        }
        self.coeffs[n] = c;
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Lowest degree with a nonzero coefficient, or None for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut s = Self::zero(self.ctx, order);
        for n in 0..=order.min(self.order) {
            s.coeffs[n] = self.coeffs[n].clone();
        }
        s.reality = self.reality;
        s
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        if rhs.reality == Reality::Complex {
            out.reality = Reality::Complex;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        if rhs.reality == Reality::Complex {
            out.reality = Reality::Complex;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= -1i32;
        }
        out
    }

    pub fn scale(&self, factor: &Complex) -> Self {
        let prec = self.ctx.prec;
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            let t = (&*c * factor).complete((prec, prec));
            *c = t;
        }
        if !factor.imag().is_zero() {
            out.reality = Reality::Complex;
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        Ok(self.mul_trunc(rhs, self.order))
    }

    pub fn mul_trunc(&self, rhs: &Self, order: usize) -> Self {
        let prec = self.ctx.prec;
        let mut out = Self::zero(self.ctx, order);
        let mut t = Complex::new(prec);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j > order {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                t.assign(a * b);
                out.coeffs[i + j] += &t;
            }
        }
        out.reality = if self.reality == Reality::Real && rhs.reality == Reality::Real {
            Reality::Real
        } else {
            Reality::Complex
        };
        out
    }

    /// Truncated composition self(inner); inner must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::ConstantTerm);
        }
        let order = self.order.min(inner.order);
        // Horner from the top degree down.
        let mut acc = Self::zero(self.ctx, order);
        for n in (1..=order).rev() {
            acc = acc.mul_trunc(inner, order);
            acc.coeffs[0] += &self.coeffs[n];
        }
        acc = acc.mul_trunc(inner, order);
        acc.coeffs[0] += &self.coeffs[0];
        acc.reality = if self.reality == Reality::Real && inner.reality == Reality::Real {
            Reality::Real
        } else {
            Reality::Complex
        };
        Ok(acc)
    }

    /// Compositional inverse: h with h(self(z)) = z through the order.
    /// Requires a nonzero linear coefficient.
    #[allow(clippy::needless_range_loop)]
    pub fn invert(&self) -> Result<Self> {
        let prec = self.ctx.prec;
        let order = self.order;
        if !self.coeffs[0].is_zero() {
            return Err(Error::ConstantTerm);
        }
        let g1 = &self.coeffs[1];
        if g1.is_zero() {
            return Err(Error::NotInvertible);
        }
        // powers of self
        let mut pows: Vec<UniSeries> = Vec::with_capacity(order + 1);
        pows.push({
            let mut one = Self::zero(self.ctx, order);
            one.coeffs[0] = self.ctx.one();
            one
        });
        for _ in 1..=order {
            let p = pows.last().unwrap().mul_trunc(self, order);
            pows.push(p);
        }
        let mut h = Self::zero(self.ctx, order);
        let mut t = Complex::new(prec);
        for m in 1..=order {
            // coefficient of z^m in sum_{k<m} h_k self^k
            let mut acc = Complex::new(prec);
            for k in 1..m {
                if h.coeffs[k].is_zero() {
                    continue;
                }
                t.assign(&h.coeffs[k] * &pows[k].coeffs[m]);
                acc += &t;
            }
            let target = if m == 1 { self.ctx.one() } else { self.ctx.zero() };
            let num = target - acc;
            let den = &pows[m].coeffs[m]; // = g1^m
            h.coeffs[m] = num / den;
        }
        h.reality = self.reality;
        Ok(h)
    }

    /// Multiplicative inverse of a series with unit constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let prec = self.ctx.prec;
        let one = self.ctx.one();
        if (&self.coeffs[0] - &one).complete((prec, prec)).is_zero() {
            // fall through
        } else if self.coeffs[0].is_zero() {
            return Err(Error::LeadingTerm("reciprocal needs nonzero constant term"));
        }
        let c0 = self.coeffs[0].clone();
        let mut out = Self::zero(self.ctx, self.order);
        out.coeffs[0] = (&one / &c0).complete((prec, prec));
        let mut t = Complex::new(prec);
        for m in 1..=self.order {
            let mut acc = Complex::new(prec);
            for k in 1..=m {
                if self.coeffs[k].is_zero() || out.coeffs[m - k].is_zero() {
                    continue;
                }
                t.assign(&self.coeffs[k] * &out.coeffs[m - k]);
                acc += &t;
            }
            acc = -acc;
            out.coeffs[m] = (&acc / &c0).complete((prec, prec));
        }
        out.reality = self.reality;
        Ok(out)
    }

    pub fn derivative(&self) -> Self {
        let prec = self.ctx.prec;
        let mut out = Self::zero(self.ctx, self.order.saturating_sub(1));
        for n in 1..=self.order {
            if self.coeffs[n].is_zero() {
                continue;
            }
            out.coeffs[n - 1] = (&self.coeffs[n] * &Complex::with_val(prec, (n as i64, 0))).complete((prec, prec));
        }
        out.reality = self.reality;
        out
    }

    /// Even part: (f(z) + f(-z))/2.
    pub fn even_part(&self) -> Self {
        let mut out = self.clone();
        for (n, c) in out.coeffs.iter_mut().enumerate() {
            if n % 2 == 1 {
                *c = self.ctx.zero();
            }
        }
        out
    }

    pub fn odd_part(&self) -> Self {
        let mut out = self.clone();
        for (n, c) in out.coeffs.iter_mut().enumerate() {
            if n % 2 == 0 {
                *c = self.ctx.zero();
            }
        }
        out
    }

    /// f(-z)
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        for (n, c) in out.coeffs.iter_mut().enumerate() {
            if n % 2 == 1 {
                *c *= -1i32;
            }
        }
        out
    }

    pub fn max_abs(&self) -> Float {
        let mut m = self.ctx.f_zero();
        for c in &self.coeffs {
            let a = num::sup_norm(c);
            if a > m {
                m = a;
            }
        }
        m
    }

    /// sup of |Im c_n|: distance from being a real series.
    pub fn imag_defect(&self) -> Float {
        let mut m = self.ctx.f_zero();
        for c in &self.coeffs {
            let a = c.imag().clone().abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_order(&self, rhs: &Self) -> Result<()> {
        if self.order != rhs.order {
            return Err(Error::OrderMismatch(self.order, rhs.order));
        }
        Ok(())
    }
}

/// Coefficients of sqrt(1+T) up to T^n (generalized binomial with exponent 1/2).
pub fn sqrt1p_outer(ctx: Ctx, n: usize) -> Vec<Complex> {
    let prec = ctx.prec;
    let mut out = Vec::with_capacity(n + 1);
    out.push(ctx.one());
    let half = Float::with_val(prec, 0.5f32);
    for k in 1..=n {
        // c_k = c_{k-1} * (1/2 - (k-1)) / k
        let factor = (half.clone() - (k as i64 - 1)) / (k as i64);
        out.push((&out[k - 1] * &factor).complete((prec, prec)));
    }
    out
}

/// Coefficients of log(1+T) up to T^n.
pub fn log1p_outer(ctx: Ctx, n: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(ctx.zero());
    for k in 1..=n {
        let mut c = ctx.one();
        if k % 2 == 0 {
            c = -c;
        }
        c /= Float::with_val(ctx.prec, k as u64);
        out.push(c);
    }
    out
}

/// Coefficients of exp(T) up to T^n.
pub fn exp_outer(ctx: Ctx, n: usize) -> Vec<Complex> {
    let prec = ctx.prec;
    let mut out = Vec::with_capacity(n + 1);
    out.push(ctx.one());
    for k in 1..=n {
        out.push((&out[k - 1] / &Float::with_val(prec, k as u64)).complete((prec, prec)));
    }
    out
}

impl UniSeries {
    fn apply_outer(&self, outer: &[Complex]) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::LeadingTerm("analytic substitution needs zero constant term"));
        }
        let order = self.order;
        let mut acc = Self::zero(self.ctx, order);
        for k in (1..outer.len()).rev() {
            acc = acc.mul_trunc(self, order);
            acc.coeffs[0] += &outer[k];
        }
        acc = acc.mul_trunc(self, order);
        acc.coeffs[0] += &outer[0];
        acc.reality = self.reality;
        Ok(acc)
    }

    /// sqrt(1 + self); self must have zero constant term.
    pub fn sqrt1p(&self) -> Result<Self> {
        self.apply_outer(&sqrt1p_outer(self.ctx, self.order))
    }

    /// log(1 + self); self must have zero constant term.
    pub fn log1p(&self) -> Result<Self> {
        self.apply_outer(&log1p_outer(self.ctx, self.order))
    }

    /// exp(self); self must have zero constant term.
    pub fn exp(&self) -> Result<Self> {
        self.apply_outer(&exp_outer(self.ctx, self.order))
    }
}

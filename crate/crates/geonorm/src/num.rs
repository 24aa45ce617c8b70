//! Arbitrary-precision scalars: a precision context plus helpers around
//! `rug::Float` / `rug::Complex` (MPFR/MPC).
//!
//! Every series and solver carries a [`Ctx`]; all coefficient arithmetic is
//! performed at `ctx.prec` binary digits. The rotation multiplier
//! `lambda = e^{2 pi i omega}` is computed once with 64 guard bits.

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::{Assign, Complex, Float};

pub const DEFAULT_PREC: u32 = 256;
pub const MIN_PREC: u32 = 64;

/// Precision context shared by all computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ctx {
    pub prec: u32,
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx { prec: DEFAULT_PREC }
    }
}

impl Ctx {
    pub fn new(prec: u32) -> Self {
        assert!(prec >= MIN_PREC, "precision must be at least {MIN_PREC} bits");
        Ctx { prec }
    }

    pub fn zero(&self) -> Complex {
        Complex::new(self.prec)
    }

    pub fn one(&self) -> Complex {
        Complex::with_val(self.prec, (1, 0))
    }

    pub fn c_i64(&self, re: i64, im: i64) -> Complex {
        Complex::with_val(self.prec, (re, im))
    }

    pub fn c_f64(&self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.prec, (re, im))
    }

    pub fn f_zero(&self) -> Float {
        Float::new(self.prec)
    }

    pub fn f_i64(&self, v: i64) -> Float {
        Float::with_val(self.prec, v)
    }

    pub fn f_f64(&self, v: f64) -> Float {
        Float::with_val(self.prec, v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec, Constant::Pi)
    }

    /// `e^{2 pi i omega}`, computed with 64 guard bits and rounded back.
    pub fn lambda_of_omega(&self, omega: &Float) -> Complex {
        let guard = self.prec + 64;
        let two_pi_omega = Float::with_val(guard, Constant::Pi) * 2u32 * omega;
        let (sin, cos) = two_pi_omega.sin_cos(Float::new(guard));
        let mut lambda = Complex::new(self.prec);
        lambda.assign((&cos, &sin));
        lambda
    }

    /// Powers `lambda^0, ..., lambda^n` at working precision.
    pub fn lambda_powers(&self, lambda: &Complex, n: usize) -> Vec<Complex> {
        let mut pows = Vec::with_capacity(n + 1);
        pows.push(self.one());
        for _ in 1..=n {
            let next = (pows.last().unwrap() * lambda).complete((self.prec, self.prec));
            pows.push(next);
        }
        pows
    }

    /// Decimal digits sufficient to round-trip a float at this precision.
    pub fn decimal_digits(&self) -> usize {
        (self.prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
    }

    pub fn float_to_string(&self, v: &Float) -> String {
        if v.is_zero() {
            return "0".to_string();
        }
        v.to_string_radix(10, Some(self.decimal_digits()))
    }

    pub fn parse_float(&self, s: &str) -> Result<Float> {
        let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Float::with_val(self.prec, parsed))
    }

    pub fn parse_complex(&self, re: &str, im: &str) -> Result<Complex> {
        let re = self.parse_float(re)?;
        let im = self.parse_float(im)?;
        let mut c = Complex::new(self.prec);
        c.assign((re, im));
        Ok(c)
    }
}

/// |z| as a Float at the precision of `z`.
pub fn abs(z: &Complex) -> Float {
    z.clone().abs().into_real_imag().0
}

/// max(|re|, |im|), cheaper than |z| and equivalent for thresholding.
pub fn sup_norm(z: &Complex) -> Float {
    let re = z.real().clone().abs();
    let im = z.imag().clone().abs();
    if re >= im {
        re
    } else {
        im
    }
}

pub fn conj(z: &Complex) -> Complex {
    z.clone().conj()
}

pub fn is_finite(z: &Complex) -> bool {
    z.real().is_finite() && z.imag().is_finite()
}

/// 2^{-prec/4}: the small-divisor guard threshold.
pub fn divisor_guard(prec: u32) -> Float {
    let mut t = Float::with_val(prec, 1);
    t >>= prec / 4;
    t
}

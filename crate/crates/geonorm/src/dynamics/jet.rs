//! Planar diffeomorphism jets F(z) = lambda z + sum F_jk z^j zbar^k with
//! lambda = e^{2 pi i omega}, held as complex-extension series in (z, w).

use crate::error::{Error, Result};
use crate::num::{self, Ctx};
use crate::series::BiSeries;
use rug::{Complex, Float};

#[derive(Clone, Debug)]
pub struct DiffeoJet {
    ctx: Ctx,
    omega: Float,
    lambda: Complex,
    series: BiSeries,
    order: usize,
}

impl DiffeoJet {
    /// The pure rotation z -> lambda z at the given truncation order.
    pub fn rotation(ctx: Ctx, omega: Float, order: usize) -> Self {
        let lambda = ctx.lambda_of_omega(&omega);
        let series = BiSeries::var_z(ctx, order).scale(&lambda);
        DiffeoJet {
            ctx,
            omega,
            lambda,
            series,
            order,
        }
    }

    /// Rotation with an explicitly supplied multiplier (used by charts where
    /// lambda is already known to working precision).
    pub fn with_lambda(ctx: Ctx, omega: Float, lambda: Complex, order: usize) -> Self {
        let series = BiSeries::var_z(ctx, order).scale(&lambda);
        DiffeoJet {
            ctx,
            omega,
            lambda,
            series,
            order,
        }
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn omega(&self) -> &Float {
        &self.omega
    }

    pub fn lambda(&self) -> &Complex {
        &self.lambda
    }

    pub fn series(&self) -> &BiSeries {
        &self.series
    }

    pub fn coeff(&self, j: usize, k: usize) -> &Complex {
        self.series.coeff(j, k)
    }

    /// Set F_jk for j + k >= 2. The linear part is fixed by omega.
    pub fn set_coeff(&mut self, j: usize, k: usize, c: Complex) -> Result<()> {
        if j + k < 2 {
            return Err(Error::Invalid("the linear part of a jet is fixed by omega".into()));
        }
        if j + k > self.order {
            return Err(Error::Invalid(format!(
                "coefficient ({j},{k}) exceeds jet order {}",
                self.order
            )));
        }
        self.series.set_coeff(j, k, c);
        Ok(())
    }

    /// True when F_jk = 0 for every even total degree j + k.
    pub fn is_odd(&self) -> bool {
        self.series
            .iter()
            .all(|(j, k, c)| (j + k) % 2 == 1 || c.is_zero())
    }

    /// True when F_jk = 0 for all k >= 1 (no zbar dependence).
    pub fn is_holomorphic(&self) -> bool {
        self.series.iter().all(|(_, k, c)| k == 0 || c.is_zero())
    }

    /// The univariate restriction of a holomorphic jet.
    pub fn holomorphic_part(&self) -> crate::series::UniSeries {
        let mut u = crate::series::UniSeries::zero(self.ctx, self.order);
        for (j, k, c) in self.series.iter() {
            if k == 0 && !c.is_zero() {
                u.set_coeff(j, c.clone());
            }
        }
        u.mark_complex()
    }

    /// tilde(F): the second component of the complex extension.
    pub fn series_tilde(&self) -> BiSeries {
        self.series.tilde()
    }

    /// 1 - lambda^m for m = 1..=max_m.
    pub fn divisors(&self, max_m: usize) -> Vec<Complex> {
        let prec = self.ctx.prec;
        let pows = self.ctx.lambda_powers(&self.lambda, max_m);
        (1..=max_m)
            .map(|m| Complex::with_val(prec, (1, 0)) - &pows[m])
            .collect()
    }

    /// Abort unless |1 - lambda^m| >= 2^{-prec/4} for 1 <= m <= max_m.
    pub fn check_nonresonance(&self, max_m: usize) -> Result<()> {
        let guard = num::divisor_guard(self.ctx.prec);
        for (i, d) in self.divisors(max_m).iter().enumerate() {
            let mag = num::abs(d);
            if mag < guard {
                return Err(Error::SmallDivisor {
                    r: 0,
                    s: 0,
                    exponent: (i + 1) as i64,
                    magnitude: mag.to_f64(),
                });
            }
        }
        Ok(())
    }

    /// Condition factor kappa = max over 1 <= m <= max_m of |1 - lambda^m|^{-1}.
    pub fn condition_factor(&self, max_m: usize) -> Float {
        let prec = self.ctx.prec;
        let mut kappa = Float::with_val(prec, 1);
        for d in self.divisors(max_m) {
            let inv = num::abs(&d).recip();
            if inv > kappa {
                kappa = inv;
            }
        }
        kappa
    }

    /// Copy at a different truncation order (coefficients above are dropped,
    /// missing ones are zero).
    pub fn resized(&self, order: usize) -> Self {
        let mut series = BiSeries::var_z(self.ctx, order).scale(&self.lambda);
        for (j, k, c) in self.series.iter() {
            if j + k >= 2 && j + k <= order && !c.is_zero() {
                series.set_coeff(j, k, c.clone());
            }
        }
        DiffeoJet {
            ctx: self.ctx,
            omega: self.omega.clone(),
            lambda: self.lambda.clone(),
            series,
            order,
        }
    }
}

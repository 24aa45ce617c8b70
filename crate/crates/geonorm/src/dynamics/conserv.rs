//! Formal conservativity (Gamma = Id) and the holomorphic linearization
//! h with h o F = lambda h, whose square modulus is admissible with
//! Gamma = Id.

use crate::dynamics::jet::DiffeoJet;
use crate::dynamics::solver::{resonant_free, AdmissiblePair};
use crate::error::{Error, Result};
use crate::num::{self};
use crate::series::{BiSeries, UniSeries};
use rug::ops::CompleteRound;
use rug::{Assign, Complex, Float};

/// Report of the conservativity test: Gamma from the resonant-free pair and
/// the sup of |Gamma_n| for n >= 2.
pub struct ConservativityReport {
    pub conservative: bool,
    pub gamma: UniSeries,
    pub gamma_deviation: Float,
    pub pair: AdmissiblePair,
}

pub fn is_formally_conservative(jet: &DiffeoJet, order: usize, tol: f64) -> Result<ConservativityReport> {
    let pair = resonant_free(jet, order)?;
    let mut dev = jet.ctx().f_zero();
    for n in 2..=pair.gamma.order() {
        let a = num::sup_norm(pair.gamma.coeff(n));
        if a > dev {
            dev = a;
        }
    }
    Ok(ConservativityReport {
        conservative: dev.to_f64() <= tol,
        gamma: pair.gamma.clone(),
        gamma_deviation: dev,
        pair,
    })
}

/// Linearization data of a holomorphic jet: h(z) = z + O(z^2) with
/// h o F = lambda h, and |h|^2 as an admissible series with Gamma = Id.
pub struct Linearization {
    pub h: UniSeries,
    /// sup-norm of h o F - lambda h through the order.
    pub residual: Float,
    /// |h|^2(z,w) = h(z) tilde(h)(w), an element of the L-space.
    pub modulus_sq: BiSeries,
}

/// Solve h o F = lambda h degree by degree for holomorphic F.
#[allow(clippy::needless_range_loop)]
pub fn linearize_holomorphic(jet: &DiffeoJet, order: usize) -> Result<Linearization> {
    if !jet.is_holomorphic() {
        return Err(Error::Invalid("linearization requires a holomorphic jet".into()));
    }
    let ctx = jet.ctx();
    let prec = ctx.prec;
    let jet = jet.resized(order);
    let f = jet.holomorphic_part();
    let lambda = jet.lambda().clone();
    let guard = num::divisor_guard(prec);
    // h_n (lambda^n - lambda) = -[z^n] sum_{k<n} h_k f^k, solved by degree
    let mut f_pows: Vec<UniSeries> = Vec::with_capacity(order + 1);
    let mut one = UniSeries::zero(ctx, order);
    one.set_coeff(0, ctx.one());
    f_pows.push(one);
    for _ in 1..=order {
        f_pows.push(f_pows.last().unwrap().mul_trunc(&f, order));
    }
    let lam_pows = ctx.lambda_powers(&lambda, order);
    let mut h = UniSeries::zero(ctx, order);
    h.set_coeff(1, ctx.one());
    let mut t = Complex::new(prec);
    for n in 2..=order {
        let mut acc = Complex::new(prec);
        for k in 1..n {
            if h.coeff(k).is_zero() {
                continue;
            }
            t.assign(h.coeff(k) * f_pows[k].coeff(n));
            acc += &t;
        }
        let divisor = (&lam_pows[n] - &lambda).complete((prec, prec));
        let mag = num::abs(&divisor);
        if mag < guard {
            return Err(Error::SmallDivisor {
                r: n,
                s: 0,
                exponent: n as i64 - 1,
                magnitude: mag.to_f64(),
            });
        }
        acc = -acc;
        h.set_coeff(n, acc / divisor);
    }
    // residual of h o F - lambda h
    let hof = h.compose(&f)?;
    let residual = hof.sub(&h.scale(&lambda))?.max_abs();
    // |h|^2(z,w) = h(z) * tilde(h)(w)
    let mut hz = BiSeries::zero(ctx, order);
    let mut hw = BiSeries::zero(ctx, order);
    for n in 1..=order {
        if !h.coeff(n).is_zero() {
            hz.set_coeff(n, 0, h.coeff(n).clone());
            hw.set_coeff(0, n, num::conj(h.coeff(n)));
        }
    }
    let modulus_sq = hz.mul(&hw)?;
    Ok(Linearization {
        h,
        residual,
        modulus_sq,
    })
}

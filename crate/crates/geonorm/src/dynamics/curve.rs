//! Involutions along formal curves: tau_{F,C} for a curve c(u), and the
//! curve-matching recursion L'(u,u) = L(c(u), cbar(u)).

use crate::dynamics::fol::{tau_from_ell_series, Involution};
use crate::error::{Error, Result};
use crate::num::{self, Ctx};
use crate::series::{BiSeries, UniSeries};
use rug::ops::CompleteRound;
use rug::Complex;

/// cbar(u): the series with conjugated coefficients.
pub fn conj_series(c: &UniSeries) -> UniSeries {
    let mut out = UniSeries::zero(c.ctx(), c.order());
    for n in 0..=c.order() {
        out.set_coeff(n, num::conj(c.coeff(n)));
    }
    out
}

/// Lambda_C(u) = L(c(u), cbar(u)), real-coefficient by Hermitian symmetry.
pub fn restrict_to_curve(l: &BiSeries, c: &UniSeries) -> Result<UniSeries> {
    if !c.coeff(0).is_zero() {
        return Err(Error::ConstantTerm);
    }
    let order = l.order().min(c.order());
    let cbar = conj_series(c);
    // powers of c and cbar
    let mut cp: Vec<UniSeries> = Vec::with_capacity(order + 1);
    let mut dp: Vec<UniSeries> = Vec::with_capacity(order + 1);
    let mut one = UniSeries::zero(c.ctx(), order);
    one.set_coeff(0, c.ctx().one());
    cp.push(one.clone());
    dp.push(one);
    for k in 1..=order {
        cp.push(cp[k - 1].mul_trunc(c, order));
        dp.push(dp[k - 1].mul_trunc(&cbar, order));
    }
    let mut acc = UniSeries::zero(c.ctx(), order);
    for (r, s, coeff) in l.iter() {
        if coeff.is_zero() || r + s > order {
            continue;
        }
        let prod = cp[r].mul_trunc(&dp[s], order);
        acc = acc.add(&prod.scale(coeff))?;
    }
    Ok(acc)
}

/// tau_{F,C} = ell_C^{-1} o sigma o ell_C with ell_C = sqrt(Lambda_C),
/// leading coefficient |c_1|.
pub fn tau_along_curve(l: &BiSeries, c: &UniSeries) -> Result<Involution> {
    if c.coeff(1).is_zero() {
        return Err(Error::NotInvertible);
    }
    let lam_c = restrict_to_curve(l, c)?;
    let ell = sqrt_curve_diagonal(l.ctx(), &lam_c)?;
    tau_from_ell_series(&ell)
}

/// Square root u(|c1| + O(u)) of Lambda(u) = |c1|^2 u^2 (1 + O(u)).
fn sqrt_curve_diagonal(ctx: Ctx, lam: &UniSeries) -> Result<UniSeries> {
    let order = lam.order();
    if order < 2 || !lam.coeff(0).is_zero() || !lam.coeff(1).is_zero() {
        return Err(Error::LeadingTerm("curve restriction must start at u^2"));
    }
    let c2 = lam.coeff(2).clone();
    if c2.is_zero() {
        return Err(Error::NotInvertible);
    }
    let imag = c2.imag().clone().abs();
    if !c2.real().is_sign_positive() || imag.to_f64() > 0.0 {
        // Hermitian L and a genuine curve give c1 cbar(c1) > 0; anything else
        // indicates corrupted input.
        if imag.to_f64() > 1e-300 || !c2.real().is_sign_positive() {
            return Err(Error::LeadingTerm("curve restriction leading term must be positive"));
        }
    }
    let prec = ctx.prec;
    let scale = c2.real().clone().sqrt();
    let inv_c2 = Complex::with_val(prec, (1, 0)) / &c2;
    let mut u = UniSeries::zero(ctx, order - 2);
    for n in 3..=order {
        u.set_coeff(n - 2, (lam.coeff(n) * &inv_c2).complete((prec, prec)));
    }
    let root = u.sqrt1p()?;
    let mut ell = UniSeries::zero(ctx, order);
    for n in 0..=order - 2 {
        ell.set_coeff(n + 1, (root.coeff(n) * &scale).complete((prec, prec)));
    }
    Ok(ell.mark_real())
}

/// Solve L'(u,u) = L(c(u), cbar(u)) for a curve c with c_1 = 1, resolving
/// the underdetermined real direction by c_{n-1} = (a_n - A_n)/2 (a real
/// multiple of c_1).
pub fn solve_curve_match(l: &BiSeries, l_prime: &BiSeries) -> Result<UniSeries> {
    let ctx = l.ctx();
    let prec = ctx.prec;
    let order = l.order().min(l_prime.order());
    let target = l_prime.diagonal(); // a_n
    let mut c = UniSeries::zero(ctx, order);
    c.set_coeff(1, ctx.one());
    // degree n of the matching equation determines c_{n-1}
    for n in 3..=order {
        let current = restrict_to_curve(l, &c)?;
        let a_n = target.coeff(n);
        let big_a = current.coeff(n);
        // 2 Re(c_{n-1} conj(c_1)) = a_n - A_n with c_1 = 1
        let mut half = (a_n - big_a).complete((prec, prec));
        half /= 2u32;
        c.set_coeff(n - 1, half);
    }
    Ok(c)
}

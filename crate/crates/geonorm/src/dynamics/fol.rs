//! The foliation side of the theory: the square root ell of the diagonal
//! restriction, the unique Gamma attached to an admissible L, the foliation
//! involution tau (two independent constructions), and the balanced series.

use crate::dynamics::jet::DiffeoJet;
use crate::dynamics::solver::{conjugacy_residual, resonant_free, AdmissiblePair};
use crate::error::{Error, Result};
use crate::num::Ctx;
use crate::series::{compose_uni_bi, BiSeries, UniSeries};
use rug::ops::CompleteRound;
use rug::{Assign, Complex, Float};

/// A one-variable formal involution tau(z) = -z + O(z^2) with real
/// coefficients.
#[derive(Clone, Debug)]
pub struct Involution {
    pub tau: UniSeries,
}

impl Involution {
    /// sup-norm of tau o tau - id through the order.
    pub fn involution_defect(&self) -> Result<Float> {
        let id = UniSeries::identity(self.tau.ctx(), self.tau.order());
        Ok(self.tau.compose(&self.tau)?.sub(&id)?.max_abs())
    }
}

/// The unique ell in G with ell^2 = L(z, z) through the order of L.
pub fn ell_of(l: &BiSeries) -> Result<UniSeries> {
    let ctx = l.ctx();
    let diag = l.diagonal();
    sqrt_of_diagonal(ctx, &diag)
}

/// Square root z(1 + O(z)) of a univariate series z^2(1 + O(z)).
fn sqrt_of_diagonal(ctx: Ctx, diag: &UniSeries) -> Result<UniSeries> {
    let order = diag.order();
    if order < 2 || !diag.coeff(0).is_zero() || !diag.coeff(1).is_zero() {
        return Err(Error::LeadingTerm("diagonal must start with z^2"));
    }
    let c2 = diag.coeff(2);
    let one = ctx.one();
    if (c2 - &one).complete((ctx.prec, ctx.prec)).is_zero() {
        // u = diag/z^2 - 1, shifted down by two degrees
        let mut u = UniSeries::zero(ctx, order - 2);
        for n in 3..=order {
            u.set_coeff(n - 2, diag.coeff(n).clone());
        }
        let root = u.sqrt1p()?;
        let mut ell = UniSeries::zero(ctx, order);
        for n in 0..=order - 2 {
            ell.set_coeff(n + 1, root.coeff(n).clone());
        }
        Ok(ell.mark_real())
    } else {
        // general positive leading coefficient (curves): ell = sqrt(c2) z (1 + ...)
        if !c2.imag().is_zero() || !(c2.real().is_sign_positive()) {
            return Err(Error::LeadingTerm("diagonal leading coefficient must be positive real"));
        }
        let scale = c2.real().clone().sqrt();
        let inv_c2 = (&one / c2).complete((ctx.prec, ctx.prec));
        let mut u = UniSeries::zero(ctx, order - 2);
        for n in 3..=order {
            u.set_coeff(n - 2, (diag.coeff(n) * &inv_c2).complete((ctx.prec, ctx.prec)));
        }
        let root = u.sqrt1p()?;
        let mut ell = UniSeries::zero(ctx, order);
        let mut t = Complex::new(ctx.prec);
        for n in 0..=order - 2 {
            t.assign(root.coeff(n) * &scale);
            ell.set_coeff(n + 1, t.clone());
        }
        Ok(ell.mark_real())
    }
}

/// The unique Gamma with (L, Gamma) admissible for the jet, from
/// Gamma(z^2) = L o F_hat(ell^{-1}(z), ell^{-1}(z)). Errors when the
/// right-hand side fails to be even (L not admissible).
pub fn gamma_of(l: &BiSeries, jet: &DiffeoJet, tol: f64) -> Result<UniSeries> {
    let ctx = l.ctx();
    let ell = ell_of(l)?;
    let ell_inv = ell.invert()?;
    let lf = l.compose_pair(jet.series(), &jet.series_tilde())?;
    let u = lf.diagonal().compose(&ell_inv)?;
    let odd = u.odd_part().max_abs();
    if odd.to_f64() > tol {
        return Err(Error::NotAdmissible(odd.to_f64()));
    }
    let mut gamma = UniSeries::zero(ctx, l.order() / 2);
    for n in 1..=l.order() / 2 {
        gamma.set_coeff(n, u.coeff(2 * n).clone());
    }
    Ok(gamma.mark_real())
}

/// tau = ell^{-1} o sigma o ell, sigma = -id.
pub fn tau_via_ell(l: &BiSeries) -> Result<Involution> {
    let ell = ell_of(l)?;
    tau_from_ell_series(&ell)
}

pub fn tau_from_ell_series(ell: &UniSeries) -> Result<Involution> {
    let ell_inv = ell.invert()?;
    let tau = ell_inv.compose(&ell.neg())?;
    // ell itself is only determined through order-1 (its top coefficient
    // would need one more degree of the diagonal), so tau is too
    let tau = tau.truncated(ell.order().saturating_sub(1)).mark_real();
    Ok(Involution { tau })
}

/// tau by the explicit recursion on 2 z tau_*(z) =
/// Lambda_*(-z) - Lambda_*(z) + tau_*^2 + sum_r Lambda_*^{(r)}(-z) tau_*^r / r!,
/// where Lambda = diagonal(L).
pub fn tau_via_recursion(l: &BiSeries) -> Result<Involution> {
    let ctx = l.ctx();
    let order = l.order();
    let lambda_series = l.diagonal();
    if order < 2 {
        return Err(Error::LeadingTerm("need order >= 2"));
    }
    // Lambda_* = Lambda - z^2
    let mut lambda_star = lambda_series.clone();
    lambda_star.set_coeff(2, (lambda_series.coeff(2) - &ctx.one()).complete((ctx.prec, ctx.prec)));
    // tau_* holds the solved coefficients tau_n, n >= 2; tau = -z + tau_*
    let mut tau_star = UniSeries::zero(ctx, order.saturating_sub(1));
    let t_order = tau_star.order();
    for n in 3..=order {
        // rhs = Lambda_*(-z) - Lambda_*(z) + tau_*^2
        //       + sum_{r>=1} (1/r!) Lambda_*^{(r)}(-z) tau_*^r, at degree n
        let mut rhs = lambda_star.reflect().sub(&lambda_star)?.truncated(n);
        rhs = rhs.add(&tau_star.truncated(n).mul_trunc(&tau_star.truncated(n), n))?;
        let mut deriv = lambda_star.clone();
        let mut tau_pow = UniSeries::zero(ctx, n);
        tau_pow.set_coeff(0, ctx.one());
        let mut factorial = Float::with_val(ctx.prec, 1);
        for r in 1.. {
            deriv = deriv.derivative();
            if deriv.is_zero() {
                break;
            }
            tau_pow = tau_pow.mul_trunc(&tau_star.truncated(n.min(t_order)), n);
            if tau_pow.is_zero() {
                break;
            }
            factorial *= r as u64;
            if 2 * r > n {
                break;
            }
            let term = deriv.reflect().truncated(n).mul_trunc(&tau_pow, n);
            let inv_fact = Complex::with_val(ctx.prec, (1, 0)) / &factorial;
            rhs = rhs.add(&term.scale(&inv_fact))?;
        }
        // 2 tau_{n-1} = coefficient of z^n in rhs
        let c = (rhs.coeff(n) / &Float::with_val(ctx.prec, 2)).complete((ctx.prec, ctx.prec));
        if n - 1 <= t_order {
            tau_star.set_coeff(n - 1, c);
        }
    }
    let mut tau = tau_star.clone();
    tau.set_coeff(1, ctx.c_i64(-1, 0));
    Ok(Involution {
        tau: tau.mark_real(),
    })
}

/// The balanced admissible pair L_F: the unique admissible series whose
/// diagonal restriction is -z tau_F(z). Built by post-composing the
/// resonant-free pair with g solving g(z^2) = h o ell^{-1}(z), h = -z tau_F.
pub fn balanced(jet: &DiffeoJet, order: usize, tol: f64) -> Result<BalancedData> {
    let base = resonant_free(jet, order)?;
    balanced_from(jet, &base, tol)
}

/// Same construction on top of an already-solved admissible seed pair.
pub fn balanced_from(jet: &DiffeoJet, base: &AdmissiblePair, tol: f64) -> Result<BalancedData> {
    let ctx = base.l.ctx();
    let order = base.l.order();
    let ell = ell_of(&base.l)?;
    let tau = tau_from_ell_series(&ell)?;
    // h(z) = -z tau(z)
    let mut h = UniSeries::zero(ctx, order);
    for n in 1..tau.tau.order().min(order) + 1 {
        if n < order {
            h.set_coeff(n + 1, -tau.tau.coeff(n).clone());
        }
    }
    let v = h.compose(&ell.invert()?)?;
    let odd = v.odd_part().max_abs();
    if odd.to_f64() > tol {
        return Err(Error::NotAdmissible(odd.to_f64()));
    }
    let mut g = UniSeries::zero(ctx, order / 2);
    for n in 1..=order / 2 {
        g.set_coeff(n, v.coeff(2 * n).clone());
    }
    let g = g.mark_real();
    let l = compose_uni_bi(&g, &base.l)?;
    let mut gamma_full = UniSeries::zero(ctx, order / 2);
    gamma_full.set_coeff(1, ctx.one());
    for n in 2..=base.gamma.order().min(order / 2) {
        gamma_full.set_coeff(n, base.gamma.coeff(n).clone());
    }
    let gamma = g.compose(&gamma_full)?.compose(&g.invert()?)?.mark_real();
    let residual_norm = conjugacy_residual(jet, &l, &gamma)?;
    Ok(BalancedData {
        pair: AdmissiblePair {
            l,
            gamma,
            residual_norm,
        },
        tau,
    })
}

/// Balanced pair together with the foliation involution that selected it.
#[derive(Clone, Debug)]
pub struct BalancedData {
    pub pair: AdmissiblePair,
    pub tau: Involution,
}

//! Explicit normalizations: the formal Morse-lemma square root Phi with
//! |Phi|^2 = L, conjugation to a geometric normal form, and the polar
//! decomposition G = lambda zeta (1 + f(|zeta|^2)) e^{2 pi i beta}.

use crate::dynamics::jet::DiffeoJet;
use crate::error::{Error, Result};
use crate::num::{self, Ctx};
use crate::series::bi::invert_bi_pair;
use crate::series::{xy_to_zw, zw_to_xy, BiSeries, UniSeries};
use rug::ops::CompleteRound;
use rug::{Complex, Float};

/// Tangent-to-identity Phi with square_modulus(Phi) = L through the order.
///
/// Works in the (x, y) chart: split L = x^2 A + 2xy B + y^2 C with
/// A(0,0) = C(0,0) = 1, B(0,0) = 0, then
/// Phi = (xA + yB)/a + i y c d with a = sqrt(A), c = sqrt(C),
/// d = sqrt(1 - B^2/(AC)).
pub fn morse_phi(l: &BiSeries) -> Result<BiSeries> {
    let ctx = l.ctx();
    let order = l.order();
    let lxy = zw_to_xy(l);
    // degreewise split by monomial: x^p y^q with p >= 2 feeds A, the
    // x y-balanced part feeds B, the rest feeds C
    let mut a = BiSeries::zero(ctx, order);
    let mut b = BiSeries::zero(ctx, order);
    let mut c = BiSeries::zero(ctx, order);
    for (p, q, coeff) in lxy.iter() {
        if coeff.is_zero() {
            continue;
        }
        if p + q < 2 {
            return Err(Error::LeadingTerm("L must vanish to second order"));
        }
        if p >= 2 {
            a.add_to_coeff(p - 2, q, coeff);
        } else if p == 1 {
            // 2xy B picks up x^1 y^q: B coefficient at (0, q-1) is half
            let half = (coeff / &Float::with_val(ctx.prec, 2)).complete((ctx.prec, ctx.prec));
            b.add_to_coeff(0, q - 1, &half);
        } else {
            c.add_to_coeff(0, q - 2, coeff);
        }
    }
    let one = ctx.one();
    let a00_ok = (a.coeff(0, 0) - &one).complete((ctx.prec, ctx.prec)).is_zero();
    let c00_ok = (c.coeff(0, 0) - &one).complete((ctx.prec, ctx.prec)).is_zero();
    if !a00_ok || !c00_ok {
        return Err(Error::LeadingTerm("quadratic part of L must be x^2 + y^2"));
    }
    let mut a_m1 = a.clone();
    a_m1.set_coeff(0, 0, ctx.zero());
    let sqrt_a = a_m1.sqrt1p()?;
    let mut c_m1 = c.clone();
    c_m1.set_coeff(0, 0, ctx.zero());
    let sqrt_c = c_m1.sqrt1p()?;
    // d = sqrt(1 - B^2 / (A C))
    let ac = a.mul(&c)?;
    let b2 = b.mul(&b)?;
    let ratio = b2.mul(&ac.reciprocal()?)?;
    let d = ratio.neg().sqrt1p()?;
    // Phi_re = (x A + y B)/a, Phi_im = y c d  (all series in (x, y))
    let x = BiSeries::monomial(ctx, order, 1, 0, ctx.one());
    let y = BiSeries::monomial(ctx, order, 0, 1, ctx.one());
    let num_re = x.mul(&a)?.add(&y.mul(&b)?)?;
    let phi_re = num_re.mul(&sqrt_a.reciprocal()?)?;
    let phi_im = y.mul(&sqrt_c)?.mul(&d)?;
    // Phi = Phi_re + i Phi_im, then back to the (z, w) chart
    let phi_xy = phi_re.add(&phi_im.scale(&ctx.c_i64(0, 1)))?;
    Ok(xy_to_zw(&phi_xy))
}

/// G = Phi o F_hat o Phi_hat^{-1} (first component), plus the sup of the
/// off-diagonal coefficients of |G|^2 (zero, to tolerance, when Phi comes
/// from an admissible L).
pub fn geometric_normal_form(
    jet: &DiffeoJet,
    phi: &BiSeries,
) -> Result<(BiSeries, Float)> {
    let psi = invert_bi_pair(phi)?;
    let f_psi = jet.series().compose_pair(&psi, &psi.tilde())?;
    let g = phi.compose_pair(&f_psi, &f_psi.tilde())?;
    let g_sq = g.square_modulus();
    let offdiag = g_sq.max_abs_offdiag();
    Ok((g, offdiag))
}

/// Decomposition of a geometric normal form G as
/// lambda z (1 + f(zw)) e^{2 pi i beta(z,w)} with f real and beta = tilde(beta).
pub struct PolarParts {
    pub f: UniSeries,
    pub beta: BiSeries,
    /// sup |beta - tilde(beta)| plus the reality defect of f.
    pub defect: Float,
}

pub fn polar_decompose(g: &BiSeries, lambda: &Complex, tol: f64) -> Result<PolarParts> {
    let ctx = g.ctx();
    let prec = ctx.prec;
    let order = g.order();
    // every monomial of a geometric normal form is divisible by z
    for (j, _, c) in g.iter() {
        if j == 0 && !c.is_zero() {
            return Err(Error::Decomposition(num::sup_norm(c).to_f64()));
        }
    }
    // W = G / (lambda z), constant term 1; the shift determines W only
    // through order - 1.
    let w_order = order.saturating_sub(1);
    let lambda_inv = Complex::with_val(prec, (1, 0)) / lambda;
    let mut w = BiSeries::zero(ctx, w_order);
    for (j, k, c) in g.iter() {
        if j == 0 || c.is_zero() || j - 1 + k > w_order {
            continue;
        }
        w.set_coeff(j - 1, k, (c * &lambda_inv).complete((prec, prec)));
    }
    // Gamma o nu = |G|^2 read off the diagonal of the square modulus
    let gsq = g.square_modulus();
    let mut gamma_nu = UniSeries::zero(ctx, order / 2);
    for n in 1..=order / 2 {
        gamma_nu.set_coeff(n, gsq.coeff(n, n).clone());
    }
    // Gamma(R) = R (1 + f(R))^2  =>  1 + f = sqrt(Gamma(R)/R)
    let mut u = UniSeries::zero(ctx, gamma_nu.order().saturating_sub(1));
    let g1 = gamma_nu.coeff(1).clone();
    let dev = num::abs(&(g1 - 1u32));
    if dev.to_f64() > tol {
        return Err(Error::Decomposition(dev.to_f64()));
    }
    for n in 2..=gamma_nu.order() {
        u.set_coeff(n - 1, gamma_nu.coeff(n).clone());
    }
    let one_plus_f = u.sqrt1p()?;
    let mut f = UniSeries::zero(ctx, one_plus_f.order());
    for n in 1..=one_plus_f.order() {
        f.set_coeff(n, one_plus_f.coeff(n).clone());
    }
    // e^{2 pi i beta} = W / (1 + f o nu)
    let mut fnu = BiSeries::zero(ctx, w_order);
    fnu.set_coeff(0, 0, ctx.one());
    for n in 1..=f.order() {
        if 2 * n <= w_order {
            fnu.set_coeff(n, n, f.coeff(n).clone());
        }
    }
    let unit = w.mul(&fnu.reciprocal()?)?;
    let mut um1 = unit.clone();
    um1.set_coeff(0, 0, ctx.zero());
    let log_unit = um1.log1p()?;
    let two_pi_i = Complex::with_val(prec, (0, 1)) * ctx.pi() * 2u32;
    let beta = log_unit.scale(&(Complex::with_val(prec, (1, 0)) / two_pi_i));
    // defect: beta must be Hermitian-real and f real
    let mut defect = beta.sub(&beta.tilde())?.max_abs();
    let f_imag = f.imag_defect();
    if f_imag > defect {
        defect = f_imag.clone();
    }
    if defect.to_f64() > tol {
        return Err(Error::Decomposition(defect.to_f64()));
    }
    Ok(PolarParts {
        f: f.mark_real(),
        beta,
        defect,
    })
}

/// Rebuild lambda z (1 + f(zw)) e^{2 pi i beta} from polar parts.
pub fn polar_reconstruct(
    ctx: Ctx,
    order: usize,
    lambda: &Complex,
    f: &UniSeries,
    beta: &BiSeries,
) -> Result<BiSeries> {
    let prec = ctx.prec;
    let two_pi_i = Complex::with_val(prec, (0, 1)) * ctx.pi() * 2u32;
    let expo = beta.truncated(order).scale(&two_pi_i).exp()?;
    let mut fnu = BiSeries::zero(ctx, order);
    fnu.set_coeff(0, 0, ctx.one());
    for n in 1..=f.order() {
        if 2 * n <= order {
            fnu.set_coeff(n, n, f.coeff(n).clone());
        }
    }
    let z = BiSeries::var_z(ctx, order).scale(lambda);
    z.mul(&fnu)?.mul(&expo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    #[test]
    fn morse_of_nu_is_identity() {
        let ctx = Ctx::default();
        let nu = BiSeries::nu(ctx, 8);
        let phi = morse_phi(&nu).unwrap();
        let z = BiSeries::var_z(ctx, 8);
        assert!(phi.sub(&z).unwrap().max_abs().to_f64() < 1e-70);
    }

    #[test]
    fn morse_self_check_random_l() {
        let ctx = Ctx::default();
        let order = 10;
        let mut l = BiSeries::nu(ctx, order);
        let entries: [(usize, usize, f64, f64); 4] = [
            (2, 1, 0.31, -0.12),
            (3, 1, -0.22, 0.08),
            (2, 2, 0.4, 0.0),
            (5, 0, 0.09, 0.33),
        ];
        for (j, k, re, im) in entries {
            l.set_coeff(j, k, ctx.c_f64(re, im));
            l.set_coeff(k, j, ctx.c_f64(re, -im));
        }
        let phi = morse_phi(&l).unwrap();
        // tangent to identity
        assert!((phi.coeff(1, 0).real().to_f64() - 1.0).abs() < 1e-70);
        assert!(phi.coeff(0, 1).is_zero() || num::sup_norm(phi.coeff(0, 1)).to_f64() < 1e-70);
        let m = phi.square_modulus();
        let resid = m.sub(&l).unwrap().max_abs();
        assert!(resid.to_f64() < 1e-60, "residual {:e}", resid.to_f64());
    }

    #[test]
    fn polar_trivial_and_round_trip() {
        let ctx = Ctx::default();
        let omega = (Float::with_val(ctx.prec, 5).sqrt() - 1u32) / 2u32;
        let lambda = ctx.lambda_of_omega(&omega);
        // G = lambda z -> f = 0, beta = 0
        let g = BiSeries::var_z(ctx, 8).scale(&lambda);
        let parts = polar_decompose(&g, &lambda, 1e-40).unwrap();
        assert!(parts.f.max_abs().to_f64() < 1e-70);
        assert!(parts.beta.max_abs().to_f64() < 1e-70);
        // G = lambda z (1 + zw) -> f(R) = R, beta = 0
        let mut m = BiSeries::zero(ctx, 8);
        m.set_coeff(0, 0, ctx.one());
        m.set_coeff(1, 1, ctx.one());
        let g2 = BiSeries::var_z(ctx, 8).scale(&lambda).mul(&m).unwrap();
        let parts2 = polar_decompose(&g2, &lambda, 1e-40).unwrap();
        assert!((parts2.f.coeff(1).real().to_f64() - 1.0).abs() < 1e-60);
        assert!(parts2.beta.max_abs().to_f64() < 1e-60);
        // round trip on a nontrivial unit factor
        let mut beta = BiSeries::zero(ctx, 8);
        beta.set_coeff(1, 0, ctx.c_f64(0.1, 0.05));
        beta.set_coeff(0, 1, ctx.c_f64(0.1, -0.05));
        beta.set_coeff(1, 1, ctx.c_f64(-0.3, 0.0));
        let mut f = UniSeries::zero(ctx, 3);
        f.set_coeff(1, ctx.c_f64(0.2, 0.0));
        f.set_coeff(2, ctx.c_f64(-0.05, 0.0));
        let g3 = polar_reconstruct(ctx, 8, &lambda, &f, &beta).unwrap();
        let parts3 = polar_decompose(&g3, &lambda, 1e-40).unwrap();
        let g3b = polar_reconstruct(ctx, 8, &lambda, &parts3.f, &parts3.beta).unwrap();
        assert!(g3.sub(&g3b).unwrap().max_abs().to_f64() < 1e-60);
    }
}

//! Toolkit for one-variable formal involutions tau(x) = -x + O(x^2):
//! the canonical conjugator U = (id - tau)/2 with tau = U^{-1} o sigma o U,
//! the even series E with U^{-1} = id + E, and the classification of all
//! conjugacies between two involutions.

use crate::error::{Error, Result};
use crate::series::UniSeries;
use rug::Float;

/// U = (id - tau)/2 and E with U^{-1} = id + E, E even and O(x^2).
#[derive(Clone, Debug)]
pub struct Conjugator {
    pub u: UniSeries,
    pub e: UniSeries,
}

/// Build the canonical conjugator of an involution; errors (with the
/// residual) when tau o tau != id within tolerance.
pub fn conjugator_of(tau: &UniSeries, tol: f64) -> Result<Conjugator> {
    let ctx = tau.ctx();
    let order = tau.order();
    let id = UniSeries::identity(ctx, order);
    let resid = tau.compose(tau)?.sub(&id)?.max_abs();
    if resid.to_f64() > tol {
        return Err(Error::NotInvolution(resid.to_f64()));
    }
    let half = ctx.c_f64(0.5, 0.0);
    let u = id.sub(tau)?.scale(&half);
    let u_inv = u.invert()?;
    let e = u_inv.sub(&id)?;
    Ok(Conjugator { u, e })
}

/// V = (id + tau)/2; satisfies V o tau = V for involutions.
pub fn v_of(tau: &UniSeries) -> Result<UniSeries> {
    let ctx = tau.ctx();
    let id = UniSeries::identity(ctx, tau.order());
    Ok(id.add(tau)?.scale(&ctx.c_f64(0.5, 0.0)))
}

/// The conjugacy psi = (id + E_{tau'}) o gamma o (id + E_tau)^{-1}
/// = U_{tau'}^{-1} o gamma o U_tau, which satisfies
/// tau' = psi o tau o psi^{-1} for any odd tangent-to-identity gamma.
pub fn conjugators_between(
    tau: &UniSeries,
    tau_prime: &UniSeries,
    gamma_odd: &UniSeries,
    tol: f64,
) -> Result<UniSeries> {
    if gamma_odd.even_part().max_abs().to_f64() > 0.0 {
        return Err(Error::Invalid("gamma must be odd".into()));
    }
    let cj = conjugator_of(tau, tol)?;
    let cj_prime = conjugator_of(tau_prime, tol)?;
    let u_prime_inv = cj_prime.u.invert()?;
    u_prime_inv.compose(&gamma_odd.compose(&cj.u)?)
}

/// Residual of the conjugation claim tau' = psi o tau o psi^{-1}.
pub fn conjugation_residual(tau: &UniSeries, tau_prime: &UniSeries, psi: &UniSeries) -> Result<Float> {
    let lhs = psi.compose(&tau.compose(&psi.invert()?)?)?;
    Ok(lhs.sub(tau_prime)?.max_abs())
}

//! Constructors for the explicit examples: Siegel-style maps whose
//! admissible series grow factorially at continued-fraction witnesses, the
//! variant targeting the foliation involution, the odd-symmetric variant,
//! and the classical holomorphic models.

use crate::arith::{factorial_checked, ContinuedFraction, DEFAULT_FACTORIAL_BUDGET};
use crate::dynamics::fol::tau_via_recursion;
use crate::dynamics::jet::DiffeoJet;
use crate::dynamics::solver::{AdmissibleSolver, Selection};
use crate::error::{Error, Result};
use crate::num::{self, Ctx};
use crate::series::{BiSeries, UniSeries};
use rug::ops::{CompleteRound, Pow};
use rug::{Complex, Float, Integer};

/// One certified witness of factorial growth.
#[derive(Clone, Debug)]
pub struct Witness {
    pub p: usize,
    pub n: u64,
    /// The coefficient singled out by the construction: L_{n+1,1},
    /// tau_{n+1}, or L_{2n+1,1} depending on the variant.
    pub achieved: f64,
    /// 2 n! |cos 2 pi omega|.
    pub bound: f64,
    pub satisfied: bool,
}

/// A constructed example together with its solved data.
pub struct DivergentExample {
    pub jet: DiffeoJet,
    pub l: BiSeries,
    pub gamma: UniSeries,
    pub witnesses: Vec<Witness>,
    /// Truncation order of the run (last witness degree + 1).
    pub order: usize,
}

fn bound_value(ctx: Ctx, n: u64, omega: &Float, budget: u64) -> Result<Float> {
    let prec = ctx.prec;
    let fact = factorial_checked(n, budget)?;
    let two_pi_omega = Float::with_val(prec, rug::float::Constant::Pi) * 2u32 * omega;
    let cos = two_pi_omega.cos().abs();
    Ok(Float::with_val(prec, fact) * 2u32 * cos)
}

/// Witness exponents for the plain super-Liouville condition, restricted to
/// n >= n_min, at most p_max of them, scanned through the continued
/// fraction's convergent denominators.
fn collect_witnesses(
    ctx: Ctx,
    omega: &Float,
    cf: &ContinuedFraction,
    n_min: u64,
    p_max: usize,
    doubled: bool,
) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let prec = omega.prec();
    let test_omega = if doubled {
        omega * Float::with_val(prec, 2)
    } else {
        omega.clone()
    };
    // candidate exponents: all k up to the largest representable q_k
    let mut cap: u64 = 0;
    for k in 1..=cf.depth() {
        if let Some(q) = cf.q(k).to_u64() {
            if q <= DEFAULT_FACTORIAL_BUDGET {
                cap = cap.max(q);
            }
        }
    }
    if cap == 0 {
        return Err(Error::Invalid("no representable convergent denominators".into()));
    }
    let mut factorial = Integer::from(1);
    for k in 1..=cap {
        factorial *= k;
        if k < n_min.max(1) {
            continue;
        }
        let pd = crate::arith::lambda_power_distance(ctx, &test_omega, k)?;
        let margin = Float::with_val(prec, &factorial) * &pd.distance;
        if margin <= 1u32 {
            out.push(k);
            if out.len() == p_max {
                break;
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid(format!(
            "no super-Liouville witnesses <= {cap} for this rotation number"
        )));
    }
    Ok(out)
}

/// The sign rule of the Siegel-style construction: both coefficients are
/// set to +1 when Re(lambda) Re(G) >= 0, else to -1.
fn siegel_sign(lambda: &Complex, g: &Complex) -> i64 {
    let prod = (lambda.real() * g.real()).complete(lambda.prec().0);
    if prod.is_sign_negative() && !prod.is_zero() {
        -1
    } else {
        1
    }
}

/// Siegel-style divergent example: jets prescribed through their order,
/// higher coefficients 0 except F_{1,n_p} = F_{n_p+1,0} in {1,-1} chosen so
/// that |L_{n_p+1,1}| >= 2 n_p! |cos 2 pi omega| for every witness n_p.
pub fn siegel_divergent(
    ctx: Ctx,
    cf: &ContinuedFraction,
    jet: &DiffeoJet,
    p_max: usize,
    measure_residual: bool,
) -> Result<DivergentExample> {
    let omega = jet.omega().clone();
    let n_jet = jet.order();
    let witnesses = collect_witnesses(ctx, &omega, cf, n_jet as u64, p_max, false)?;
    let order = *witnesses.last().unwrap() as usize + 2;
    let rho = UniSeries::zero(ctx, order / 2);
    let mut solver = AdmissibleSolver::new(&jet.resized(order), Selection::Rho(rho), order)?;
    for (pi, &np) in witnesses.iter().enumerate() {
        let np = np as usize;
        while solver.current_degree() < np + 1 {
            solver.step()?;
        }
        // peek A at degree np+2 with the candidate coefficients still zero:
        // the (np+1, 1) entry is exactly G_{np+1,1}
        let a_slice = solver.peek_a_slice()?;
        let g = a_slice
            .iter()
            .find(|(r, s, _)| *r == np + 1 && *s == 1)
            .map(|(_, _, v)| v.clone())
            .expect("slice contains (np+1, 1)");
        let sign = siegel_sign(solver.jet().lambda(), &g);
        let c = ctx.c_i64(sign, 0);
        solver.set_f_coeffs(&[(1, np, c.clone()), (np + 1, 0, c)])?;
        // |A| >= 2 |Re lambda| now holds at (np+1, 1) by the sign choice
        let report = solver.step()?;
        debug_assert_eq!(report.degree, np + 2);
        let _ = pi;
    }
    while solver.current_degree() < order {
        solver.step()?;
    }
    let jet_built = solver.jet().clone();
    let pair = solver.finish(measure_residual)?;
    let mut out_witnesses = Vec::new();
    for (pi, &np) in witnesses.iter().enumerate() {
        let achieved = num::abs(pair.l.coeff(np as usize + 1, 1)).to_f64();
        let bound = bound_value(ctx, np, &omega, DEFAULT_FACTORIAL_BUDGET)?.to_f64();
        out_witnesses.push(Witness {
            p: pi + 1,
            n: np,
            achieved,
            bound,
            satisfied: achieved >= bound,
        });
    }
    Ok(DivergentExample {
        jet: jet_built,
        l: pair.l,
        gamma: pair.gamma,
        witnesses: out_witnesses,
        order,
    })
}

/// Divergent foliation involution: odd witnesses n_p, coefficients
/// F_{1,n_p} = -i u_p, F_{n_p+1,0} = i u_p with u_p = +-1 chosen by the
/// sign of Im(xi_p) and of Re(lambda) I_p; afterwards
/// |tau_{n_p+1}| >= 2 n_p! |cos 2 pi omega|.
pub fn tau_divergent(
    ctx: Ctx,
    cf: &ContinuedFraction,
    p_max: usize,
) -> Result<(DivergentExample, UniSeries)> {
    let prec = ctx.prec;
    let required = cf.required_prec().max(ctx.prec);
    let omega = cf.value(required);
    let jet0 = DiffeoJet::rotation(Ctx::new(required.max(crate::num::MIN_PREC)), omega.clone(), 2);
    let ctx = jet0.ctx();
    // odd witnesses for the plain condition
    let all = collect_witnesses(ctx, &omega, cf, 2, usize::MAX, false)?;
    let witnesses: Vec<u64> = all.into_iter().filter(|n| n % 2 == 1).take(p_max).collect();
    if witnesses.is_empty() {
        return Err(Error::Invalid("no odd witnesses found".into()));
    }
    let order = *witnesses.last().unwrap() as usize + 2;
    let rho = UniSeries::zero(ctx, order / 2);
    let mut solver = AdmissibleSolver::new(&jet0.resized(order), Selection::Rho(rho), order)?;
    let lam_pows = ctx.lambda_powers(jet0.lambda(), order);
    for &np in witnesses.iter() {
        let npu = np as usize;
        while solver.current_degree() < npu + 1 {
            solver.step()?;
        }
        // I_p: the value tau_{np+1} takes when the candidate coefficients stay 0.
        // Fill the peeked degree-(np+2) slice into a scratch L and run the
        // tau recursion through degree np+2.
        let a_slice = solver.peek_a_slice()?;
        let mut l_probe = solver.l().truncated(npu + 2);
        let divisors = solver.jet().divisors(order);
        for (r, s, a) in &a_slice {
            if r == s {
                continue;
            }
            let diff = (*r as i64) - (*s as i64);
            let d = &divisors[(diff.unsigned_abs() as usize) - 1];
            let divisor = if diff > 0 { d.clone() } else { num::conj(d) };
            l_probe.set_coeff(*r, *s, (a / &divisor).complete((prec, prec)));
        }
        let tau_probe = tau_via_recursion(&l_probe)?;
        let i_p = tau_probe.tau.coeff(npu + 1).real().clone();
        // xi_p = lambda^{np} - 1, v_p = sign(Im xi_p)
        let xi = (&lam_pows[npu] - &Complex::with_val(ctx.prec, (1, 0))).complete((ctx.prec, ctx.prec));
        let v_p: i64 = if xi.imag().is_sign_negative() { -1 } else { 1 };
        let re_lambda_ip = (jet0.lambda().real() * &i_p).complete(ctx.prec);
        let u_p = if re_lambda_ip.is_sign_negative() && !re_lambda_ip.is_zero() {
            -v_p
        } else {
            v_p
        };
        solver.set_f_coeffs(&[
            (1, npu, ctx.c_i64(0, -u_p)),
            (npu + 1, 0, ctx.c_i64(0, u_p)),
        ])?;
        solver.step()?;
    }
    while solver.current_degree() < order {
        solver.step()?;
    }
    let jet_built = solver.jet().clone();
    let pair = solver.finish(true)?;
    let tau = tau_via_recursion(&pair.l)?;
    let mut out_witnesses = Vec::new();
    for (pi, &np) in witnesses.iter().enumerate() {
        let achieved = num::sup_norm(tau.tau.coeff(np as usize + 1)).to_f64();
        let bound = bound_value(ctx, np, &omega, DEFAULT_FACTORIAL_BUDGET)?.to_f64();
        out_witnesses.push(Witness {
            p: pi + 1,
            n: np,
            achieved,
            bound,
            satisfied: achieved >= bound,
        });
    }
    Ok((
        DivergentExample {
            jet: jet_built,
            l: pair.l,
            gamma: pair.gamma,
            witnesses: out_witnesses,
            order,
        },
        tau.tau,
    ))
}

/// Odd-symmetric Siegel variant: witnesses n_p of the doubled condition
/// |1 - lambda^{2 n_p}|^{-1} >= n_p!, coefficients at (1, 2 n_p) and
/// (2 n_p + 1, 0); the output jet is odd and
/// |L_{2 n_p + 1, 1}| >= 2 n_p! |cos 2 pi omega|.
pub fn odd_siegel_divergent(
    ctx: Ctx,
    cf: &ContinuedFraction,
    jet: &DiffeoJet,
    p_max: usize,
) -> Result<DivergentExample> {
    if !jet.is_odd() {
        return Err(Error::Invalid("the prescribed jet must be odd".into()));
    }
    let omega = jet.omega().clone();
    let n_jet = jet.order();
    // doubled-condition witnesses with 2 n_p >= n_jet
    let witnesses = collect_witnesses(ctx, &omega, cf, n_jet.div_ceil(2) as u64, p_max, true)?;
    let order = 2 * (*witnesses.last().unwrap() as usize) + 2;
    let rho = UniSeries::zero(ctx, order / 2);
    let mut solver = AdmissibleSolver::new(&jet.resized(order), Selection::Rho(rho), order)?;
    for &np in witnesses.iter() {
        let m = 2 * np as usize; // exponent in lambda^{2 n_p}
        while solver.current_degree() < m + 1 {
            solver.step()?;
        }
        let a_slice = solver.peek_a_slice()?;
        let g = a_slice
            .iter()
            .find(|(r, s, _)| *r == m + 1 && *s == 1)
            .map(|(_, _, v)| v.clone())
            .expect("slice contains (2np+1, 1)");
        let sign = siegel_sign(solver.jet().lambda(), &g);
        let c = ctx.c_i64(sign, 0);
        solver.set_f_coeffs(&[(1, m, c.clone()), (m + 1, 0, c)])?;
        solver.step()?;
    }
    while solver.current_degree() < order {
        solver.step()?;
    }
    let jet_built = solver.jet().clone();
    debug_assert!(jet_built.is_odd());
    let pair = solver.finish(true)?;
    let mut out_witnesses = Vec::new();
    for (pi, &np) in witnesses.iter().enumerate() {
        let achieved = num::abs(pair.l.coeff(2 * np as usize + 1, 1)).to_f64();
        let bound = bound_value(ctx, np, &omega, DEFAULT_FACTORIAL_BUDGET)?.to_f64();
        out_witnesses.push(Witness {
            p: pi + 1,
            n: np,
            achieved,
            bound,
            satisfied: achieved >= bound,
        });
    }
    Ok(DivergentExample {
        jet: jet_built,
        l: pair.l,
        gamma: pair.gamma,
        witnesses: out_witnesses,
        order,
    })
}

/// The classical holomorphic models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicKind {
    /// F(z) = lambda z (1 - z).
    YoccozQuadratic,
    /// P_{omega,d}(z) = lambda z (1 + z/d)^d.
    Geyer(u32),
    /// F(z) = lambda z e^z.
    Exp,
    /// F(z) = lambda z (1 + z^d).
    RamifiedCover(u32),
}

pub fn classic_map(ctx: Ctx, omega: Float, kind: ClassicKind, order: usize) -> Result<DiffeoJet> {
    let mut jet = DiffeoJet::rotation(ctx, omega, order);
    let lambda = jet.lambda().clone();
    match kind {
        ClassicKind::YoccozQuadratic => {
            if order >= 2 {
                jet.set_coeff(2, 0, -lambda)?;
            }
        }
        ClassicKind::Geyer(d) => {
            let prec = ctx.prec;
            for k in 1..=(d as usize).min(order.saturating_sub(1)) {
                let bin = Integer::from(d).binomial(k as u32);
                let dk = Integer::from(d).pow(k as u32);
                let ratio = rug::Rational::from((bin, dk));
                let c = (&lambda * &Float::with_val(prec, ratio)).complete((prec, prec));
                jet.set_coeff(k + 1, 0, c)?;
            }
        }
        ClassicKind::Exp => {
            let prec = ctx.prec;
            let mut fact = Float::with_val(prec, 1);
            for k in 1..order {
                fact *= k as u64;
                let c = (&lambda / &fact).complete((prec, prec));
                jet.set_coeff(k + 1, 0, c)?;
            }
        }
        ClassicKind::RamifiedCover(d) => {
            let d = d as usize;
            if d < order {
                jet.set_coeff(d + 1, 0, lambda)?;
            }
        }
    }
    Ok(jet)
}

/// Residual of the covering identity rho o f_d = P_{d omega, d} o rho with
/// f_d(z) = lambda z (1 + z^d / d) and rho(z) = z^d, through the order.
pub fn covering_identity_check(ctx: Ctx, omega: &Float, d: u32, order: usize) -> Result<f64> {
    let prec = ctx.prec;
    let lambda = ctx.lambda_of_omega(omega);
    let du = d as usize;
    // f(z) = lambda z + (lambda/d) z^{d+1}
    let mut f = UniSeries::zero(ctx, order);
    f.set_coeff(1, lambda.clone());
    if du < order {
        f.set_coeff(du + 1, (&lambda / &Float::with_val(prec, d)).complete((prec, prec)));
    }
    // rho o f = f^d
    let mut fd = UniSeries::zero(ctx, order);
    fd.set_coeff(0, ctx.one());
    for _ in 0..du {
        fd = fd.mul_trunc(&f, order);
    }
    // P(Z) = lambda^d Z (1 + Z/d)^d, evaluated at Z = z^d
    let lam_d = ctx.lambda_powers(&lambda, du).pop().unwrap();
    let mut p_of_rho = UniSeries::zero(ctx, order);
    for k in 0..=du {
        // coefficient of Z^{k+1}: lambda^d C(d,k)/d^k
        let deg = (k + 1) * du;
        if deg > order {
            break;
        }
        let bin = Integer::from(d).binomial(k as u32);
        let dk = Integer::from(d).pow(k as u32);
        let ratio = rug::Rational::from((bin, dk));
        let c = (&lam_d * &Float::with_val(prec, ratio)).complete((prec, prec));
        p_of_rho.set_coeff(deg, c);
    }
    let resid = fd.sub(&p_of_rho)?.max_abs();
    Ok(resid.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::odd_super_liouville_construct;

    #[test]
    fn classic_coefficients() {
        let ctx = Ctx::default();
        let omega = (Float::with_val(ctx.prec, 5).sqrt() - 1u32) / 2u32;
        let q = classic_map(ctx, omega.clone(), ClassicKind::YoccozQuadratic, 6).unwrap();
        let lam = q.lambda().clone();
        let diff = (q.coeff(2, 0) + &lam).complete((ctx.prec, ctx.prec));
        assert!(num::sup_norm(&diff).to_f64() < 1e-70);
        assert!(q.is_holomorphic());

        // geyer(2): F_{k+1} = lambda C(2,k)/2^k for k = 1, 2
        let g = classic_map(ctx, omega.clone(), ClassicKind::Geyer(2), 6).unwrap();
        let want2 = (&lam * &Float::with_val(ctx.prec, 1)).complete((ctx.prec, ctx.prec)); // C(2,1)/2 = 1
        let diff2 = (g.coeff(2, 0) - &want2).complete((ctx.prec, ctx.prec));
        assert!(num::sup_norm(&diff2).to_f64() < 1e-70);
        let want3 = (&lam * &Float::with_val(ctx.prec, 0.25f64)).complete((ctx.prec, ctx.prec)); // C(2,2)/4
        let diff3 = (g.coeff(3, 0) - &want3).complete((ctx.prec, ctx.prec));
        assert!(num::sup_norm(&diff3).to_f64() < 1e-70);

        // ramified cover: only F_1 and F_{d+1}
        let r = classic_map(ctx, omega, ClassicKind::RamifiedCover(3), 8).unwrap();
        assert!(num::sup_norm(&(r.coeff(4, 0) - r.lambda()).complete((ctx.prec, ctx.prec))).to_f64() < 1e-70);
        assert_eq!(r.series().nnz(), 2);
    }

    #[test]
    fn covering_identity_small() {
        let ctx = Ctx::default();
        let omega = (Float::with_val(ctx.prec, 5).sqrt() - 1u32) / 2u32;
        // d = 1: both sides lambda z (1 + z)
        assert!(covering_identity_check(ctx, &omega, 1, 6).unwrap() < 1e-70);
        // d = 2, order 8
        assert!(covering_identity_check(ctx, &omega, 2, 8).unwrap() < 1e-70);
        assert!(covering_identity_check(ctx, &omega, 3, 8).unwrap() < 1e-70);
    }

    #[test]
    fn siegel_p1_inequality() {
        // seed [2,1], depth 3: q_2 = 3 is the first witness; run to order 5
        let out = odd_super_liouville_construct(&[2, 1], 3, 5000).unwrap();
        let prec = out.cf.required_prec().max(256);
        let ctx = Ctx::new(prec);
        let omega = out.cf.value(prec);
        let jet = DiffeoJet::rotation(ctx, omega, 1);
        let ex = siegel_divergent(ctx, &out.cf, &jet, 1, true).unwrap();
        assert_eq!(ex.witnesses.len(), 1);
        let w = &ex.witnesses[0];
        assert_eq!(w.n, 3);
        assert!(w.satisfied, "|L_41| = {} < bound {}", w.achieved, w.bound);
        // the sign rule guarantees |A_41| = |L_41| |1 - lambda^3| >= 2 |Re lambda|
        let prec = ctx.prec;
        let lam = ex.jet.lambda().clone();
        let lam3 = (&lam * &lam).complete((prec, prec)) * &lam;
        let divisor = num::abs(&(rug::Complex::with_val(prec, (1, 0)) - lam3));
        let a_mag = num::abs(ex.l.coeff(4, 1)) * divisor;
        let two_re = ex.jet.lambda().real().clone().abs() * 2u32;
        assert!(a_mag >= two_re * 0.999f64, "|A| too small");
        // the factorial signal survives post-composition by g (finite-order
        // shadow of the balanced-divergence transfer)
        let mut g = crate::series::UniSeries::identity(ctx, ex.order / 2);
        g.set_coeff(2, ctx.one());
        let g = g.mark_real();
        let moved = crate::series::compose_uni_bi(&g, &ex.l).unwrap();
        let profile_l = crate::diagnostics::growth_profile_bi(&ex.l);
        let profile_m = crate::diagnostics::growth_profile_bi(&moved);
        let peak_l = profile_l.rows.iter().find(|r| r.degree == 5).unwrap().max_abs;
        let peak_m = profile_m.rows.iter().find(|r| r.degree == 5).unwrap().max_abs;
        assert!(peak_m >= 0.5 * peak_l, "witness peak lost under g o L");
        // F = lambda z plus the two +-1 entries at degree n_1 + 1 = 4
        assert_eq!(ex.jet.series().nnz(), 3);
        let c1 = ex.jet.coeff(1, 3).clone();
        let c2 = ex.jet.coeff(4, 0).clone();
        assert_eq!(c1, c2);
        assert!((num::abs(&c1).to_f64() - 1.0).abs() < 1e-70);
    }

    #[test]
    fn tau_p1_inequality() {
        let out = odd_super_liouville_construct(&[2, 1], 3, 5000).unwrap();
        let ctx = Ctx::new(out.cf.required_prec().max(256));
        let (ex, tau) = tau_divergent(ctx, &out.cf, 1).unwrap();
        let w = &ex.witnesses[0];
        assert_eq!(w.n, 3);
        assert!(w.satisfied, "|tau_4| = {} < bound {}", w.achieved, w.bound);
        // xi identity: Re xi = -|xi|^2 / 2
        let lam = ex.jet.lambda().clone();
        let p = ex.jet.ctx().prec;
        let lam3 = (&lam * &lam).complete((p, p)) * &lam;
        let xi = lam3 - 1u32;
        let re = xi.real().clone();
        let half_sq = -(num::abs(&xi).square()) / 2u32;
        assert!((re - half_sq).abs().to_f64() < 1e-40);
        // all tau coefficients below n_1 + 1 vanish
        for n in 2..=3 {
            assert!(num::sup_norm(tau.coeff(n)).to_f64() < 1e-60);
        }
    }

    #[test]
    fn odd_variant_p1() {
        let out = odd_super_liouville_construct(&[2, 1], 3, 5000).unwrap();
        let prec = out.cf.required_prec().max(256);
        let ctx = Ctx::new(prec);
        let omega = out.cf.value(prec);
        let jet = DiffeoJet::rotation(ctx, omega, 1);
        let ex = odd_siegel_divergent(ctx, &out.cf, &jet, 1).unwrap();
        assert!(ex.jet.is_odd());
        let w = &ex.witnesses[0];
        assert_eq!(w.n, 3);
        assert!(w.satisfied, "|L_71| = {} < bound {}", w.achieved, w.bound);
    }
}

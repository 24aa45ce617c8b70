//! Degree-by-degree construction of admissible pairs (L, Gamma) with
//! L o F = Gamma o L, for a prescribed resonant part rho_L (or prescribed
//! even diagonal chi_L).
//!
//! The recursion: at each total degree m the defect of the partially solved
//! pair is a homogeneous slice A, and
//!
//!   (1 - lambda^{r-s}) L_rs = A_rs        (r != s)
//!   Gamma_n = A_nn, L_nn free             (r = s = n, m = 2n)
//!
//! A is obtained by direct truncated composition, maintained incrementally:
//! we keep S = L o F_hat up to date as L grows, and represent Gamma o L
//! through the power table K_n = L^n so its slices cost only lookups.
//! That keeps the per-degree work proportional to the nonzero structure of
//! F and L, which is what makes the factorial-witness runs feasible.

use crate::dynamics::jet::DiffeoJet;
use crate::error::{Error, Result};
use crate::num::{self, Ctx};
use crate::series::uni::Reality;
use crate::series::{compose_uni_bi, BiSeries, SparseBi, UniSeries};
use rug::ops::CompleteRound;
use rug::{Assign, Complex, Float, Integer};

/// How the free diagonal coefficients are pinned down.
#[derive(Clone, Debug)]
pub enum Selection {
    /// L_nn = rho_n (prescribed resonant part).
    Rho(UniSeries),
    /// L_nn = rho_n - sum_{r+s=2n, r != s} L_rs (prescribed chi_L).
    Chi(UniSeries),
}

/// An admissible pair (L, Gamma) with its conjugacy-residual witness.
#[derive(Clone, Debug)]
pub struct AdmissiblePair {
    pub l: BiSeries,
    pub gamma: UniSeries,
    /// sup-norm of the coefficients of L o F - Gamma o L through the order,
    /// recomputed by an independent composition.
    pub residual_norm: Float,
}

/// One solved degree: the exposed pre-division values A_rs.
#[derive(Clone, Debug)]
pub struct DegreeReport {
    pub degree: usize,
    /// (r, s, A_rs) for r + s = degree.
    pub a: Vec<(usize, usize, Complex)>,
}

pub struct AdmissibleSolver {
    jet: DiffeoJet,
    selection: Selection,
    order: usize,
    ctx: Ctx,
    /// 1 - lambda^m for m = 1..=order (index m-1).
    divisors: Vec<Complex>,
    guard: Float,
    l: BiSeries,
    gamma: UniSeries,
    /// S = L o F_hat, truncated at order.
    s: BiSeries,
    /// Powers of the jet series and its tilde, grown on demand.
    u_pows: Vec<SparseBi>,
    v_pows: Vec<SparseBi>,
    /// K_n = L^n for n = 0..=order/2 (K_1 mirrors l).
    k_pows: Vec<BiSeries>,
    /// Last fully solved total degree.
    cur: usize,
}

impl AdmissibleSolver {
    pub fn new(jet: &DiffeoJet, selection: Selection, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::Invalid("solver order must be >= 2".into()));
        }
        let ctx = jet.ctx();
        let jet = jet.resized(order);
        let (Selection::Rho(rho) | Selection::Chi(rho)) = &selection;
        if rho.reality() != Reality::Real {
            return Err(Error::Invalid("the prescribed diagonal must be a real series".into()));
        }
        let divisors = jet.divisors(order);
        let guard = num::divisor_guard(ctx.prec);
        let l = BiSeries::nu(ctx, order);
        let gamma = UniSeries::identity(ctx, order / 2);
        let f_sp = SparseBi::from_bi(jet.series());
        let ft_sp = SparseBi::from_bi(&jet.series_tilde());
        // S = nu o F_hat = F * tilde(F)
        let mut s = BiSeries::zero(ctx, order);
        f_sp.mul_acc_into(&ft_sp, &ctx.one(), &mut s);
        let one_sp = SparseBi::one(ctx, order);
        let u_pows = vec![one_sp.clone(), f_sp];
        let v_pows = vec![one_sp, ft_sp];
        // K_0 = 1, K_1 = L
        let mut k0 = BiSeries::zero(ctx, order);
        k0.set_coeff(0, 0, ctx.one());
        let mut k_pows = vec![k0, l.clone()];
        for n in 2..=order / 2 {
            let prev = k_pows[n - 1].mul_trunc(&l, order);
            k_pows.push(prev);
        }
        Ok(AdmissibleSolver {
            jet,
            selection,
            order,
            ctx,
            divisors,
            guard,
            l,
            gamma,
            s,
            u_pows,
            v_pows,
            k_pows,
            cur: 2,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn current_degree(&self) -> usize {
        self.cur
    }

    pub fn jet(&self) -> &DiffeoJet {
        &self.jet
    }

    pub fn l(&self) -> &BiSeries {
        &self.l
    }

    pub fn gamma(&self) -> &UniSeries {
        &self.gamma
    }

    /// Change a jet coefficient mid-run. Only degrees at or above cur are
    /// allowed: lower ones have already fed solved coefficients.
    pub fn set_f_coeff(&mut self, j: usize, k: usize, c: Complex) -> Result<()> {
        self.set_f_coeffs(&[(j, k, c)])
    }

    /// Batched variant of [`Self::set_f_coeff`]: one rebuild for all entries.
    pub fn set_f_coeffs(&mut self, entries: &[(usize, usize, Complex)]) -> Result<()> {
        for (j, k, c) in entries {
            if j + k < self.cur {
                return Err(Error::StaleCoefficient(j + k));
            }
            self.jet.set_coeff(*j, *k, c.clone())?;
        }
        // power tables and S depend on the jet: rebuild
        let f_sp = SparseBi::from_bi(self.jet.series());
        let ft_sp = SparseBi::from_bi(&self.jet.series_tilde());
        let one_sp = SparseBi::one(self.ctx, self.order);
        self.u_pows = vec![one_sp.clone(), f_sp];
        self.v_pows = vec![one_sp, ft_sp];
        self.rebuild_s();
        Ok(())
    }

    fn rebuild_s(&mut self) {
        let ctx = self.ctx;
        let mut s = BiSeries::zero(ctx, self.order);
        // S = sum over solved L_rs (including nu) of L_rs F^r tilde(F)^s
        let l_terms: Vec<(usize, usize, Complex)> = self
            .l
            .iter()
            .filter(|(_, _, c)| !c.is_zero())
            .map(|(r, sx, c)| (r, sx, c.clone()))
            .collect();
        self.ensure_pows(l_terms.iter().map(|(r, _, _)| *r).max().unwrap_or(1), true);
        self.ensure_pows(l_terms.iter().map(|(_, sx, _)| *sx).max().unwrap_or(1), false);
        for (r, sx, c) in &l_terms {
            self.u_pows[*r].mul_acc_into(&self.v_pows[*sx], c, &mut s);
        }
        self.s = s;
    }

    fn ensure_pows(&mut self, up_to: usize, first: bool) {
        let prec = self.ctx.prec;
        let order = self.order;
        let pows = if first { &mut self.u_pows } else { &mut self.v_pows };
        while pows.len() <= up_to {
            let base = pows[1].clone();
            let last = pows.last().unwrap();
            pows.push(last.mul_trunc(&base, order, prec));
        }
    }

    /// Binomial as an exact complex scalar.
    fn binom(&self, n: usize, j: usize) -> Complex {
        let b = Integer::from(n).binomial(j as u32);
        Complex::with_val(self.ctx.prec, (Float::with_val(self.ctx.prec, b), 0))
    }

    /// Slice of Gamma o L at (r, s), r+s = m, built from the power table
    /// (only solved coefficients enter; unknowns of degree m contribute 0).
    fn gamma_l_coeff(&self, r: usize, s: usize) -> Complex {
        let prec = self.ctx.prec;
        let m = r + s;
        let mut acc = self.l.coeff(r, s).clone(); // Gamma_1 = 1 term
        let mut t = Complex::new(prec);
        for n in 2..=m / 2 {
            let g = self.gamma.coeff(n);
            if g.is_zero() {
                continue;
            }
            let kc = self.k_pows[n].coeff(r, s);
            if kc.is_zero() {
                continue;
            }
            t.assign(g * kc);
            acc += &t;
        }
        acc
    }

    /// The A values of the next unsolved degree, without committing anything.
    /// The divergent-example constructors use this to read G-terms before
    /// choosing the jet coefficients of the current degree.
    pub fn peek_a_slice(&self) -> Result<Vec<(usize, usize, Complex)>> {
        let m = self.cur + 1;
        if m > self.order {
            return Err(Error::Invalid("solver already at full order".into()));
        }
        Ok(self.a_slice(m))
    }

    fn a_slice(&self, m: usize) -> Vec<(usize, usize, Complex)> {
        let _prec = self.ctx.prec;
        let mut a = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let (r, s) = (m - k, k);
            let a_rs = self.s.coeff(r, s) - self.gamma_l_coeff(r, s);
            a.push((r, s, a_rs));
        }
        a
    }

    /// Solve the next total degree; returns the exposed A-slice.
    pub fn step(&mut self) -> Result<DegreeReport> {
        let m = self.cur + 1;
        if m > self.order {
            return Err(Error::Invalid("solver already at full order".into()));
        }
        let prec = self.ctx.prec;
        let a = self.a_slice(m);
        // solve the slice
        let mut delta: Vec<(usize, usize, Complex)> = Vec::with_capacity(m + 1);
        let mut gamma_n: Option<Complex> = None;
        for (r, s, a_rs) in &a {
            if r == s {
                gamma_n = Some(a_rs.clone());
                continue;
            }
            let diff = (*r as i64) - (*s as i64);
            let d = &self.divisors[(diff.unsigned_abs() as usize) - 1];
            // |lambda| = 1, so 1 - lambda^{-m} = conj(1 - lambda^m)
            let divisor = if diff > 0 {
                d.clone()
            } else {
                num::conj(d)
            };
            let mag = num::abs(&divisor);
            if mag < self.guard {
                return Err(Error::SmallDivisor {
                    r: *r,
                    s: *s,
                    exponent: diff,
                    magnitude: mag.to_f64(),
                });
            }
            let val = (a_rs / &divisor).complete((prec, prec));
            if !val.is_zero() {
                delta.push((*r, *s, val.clone()));
            }
            self.l.set_coeff(*r, *s, val);
        }
        if m.is_multiple_of(2) {
            let n = m / 2;
            let g = gamma_n.expect("diagonal entry present on even degrees");
            self.gamma.set_coeff(n, g);
            // free diagonal coefficient
            let l_nn = match &self.selection {
                Selection::Rho(rho) => {
                    if n <= rho.order() {
                        let c = rho.coeff(n);
                        Complex::with_val(prec, c)
                    } else {
                        self.ctx.zero()
                    }
                }
                Selection::Chi(rho) => {
                    let mut acc = if n <= rho.order() {
                        Complex::with_val(prec, rho.coeff(n))
                    } else {
                        self.ctx.zero()
                    };
                    for (r, s, _) in &a {
                        if r != s {
                            acc -= self.l.coeff(*r, *s);
                        }
                    }
                    acc
                }
            };
            if !l_nn.is_zero() {
                delta.push((n, n, l_nn.clone()));
            }
            self.l.set_coeff(n, n, l_nn);
        }
        self.apply_delta(m, &delta);
        self.cur = m;
        Ok(DegreeReport { degree: m, a })
    }

    /// Push a solved homogeneous slice into S and the power table.
    fn apply_delta(&mut self, m: usize, delta: &[(usize, usize, Complex)]) {
        if delta.is_empty() {
            return;
        }
        let prec = self.ctx.prec;
        let order = self.order;
        // S += sum delta_rs F^r tilde(F)^s
        let max_r = delta.iter().map(|(r, _, _)| *r).max().unwrap();
        let max_s = delta.iter().map(|(_, s, _)| *s).max().unwrap();
        self.ensure_pows(max_r, true);
        self.ensure_pows(max_s, false);
        for (r, s, c) in delta {
            let (up, vp) = (&self.u_pows[*r], &self.v_pows[*s]);
            up.mul_acc_into(vp, c, &mut self.s);
        }
        // K_n += sum_{j>=1} C(n, j) K_{n-j} D^j, descending n so the
        // right-hand side still sees the old table.
        let nmax = self.k_pows.len() - 1;
        if nmax < 1 {
            return;
        }
        let d_sparse = SparseBi {
            order,
            terms: delta.to_vec(),
        };
        let jmax = (order / m).max(1);
        let mut d_pows: Vec<SparseBi> = vec![SparseBi::one(self.ctx, order), d_sparse.clone()];
        for j in 2..=jmax {
            if j * m > order {
                break;
            }
            let next = d_pows[j - 1].mul_trunc(&d_sparse, order, prec);
            d_pows.push(next);
        }
        for n in (1..=nmax).rev() {
            for j in 1..d_pows.len().min(n + 1) {
                // K_{n-j} has valuation 2(n-j); D^j has valuation j*m
                if 2 * (n - j) + j * m > order {
                    break;
                }
                let coef = self.binom(n, j);
                // split borrow: K_{n-j} immutable while K_n is updated
                let (lo, hi) = self.k_pows.split_at_mut(n);
                hi[0].mul_acc_sparse(&lo[n - j], &d_pows[j], &coef);
            }
        }
    }

    /// Drive the recursion to full order.
    pub fn run_to_order(&mut self) -> Result<()> {
        while self.cur < self.order {
            self.step()?;
        }
        Ok(())
    }

    /// Internal defect [S - Gamma o L] through the solved degree (rounding
    /// noise only); cheap, reads the maintained state.
    pub fn internal_defect(&self) -> Float {
        let mut worst = self.ctx.f_zero();
        for m in 0..=self.cur {
            for k in 0..=m {
                let (r, s) = (m - k, k);
                let d = self.s.coeff(r, s) - self.gamma_l_coeff(r, s);
                let a = num::sup_norm(&d);
                if a > worst {
                    worst = a;
                }
            }
        }
        worst
    }

    /// Finish, measuring the conjugacy residual by an independent
    /// recomposition (skippable for factorial-scale runs).
    pub fn finish(mut self, measure_residual: bool) -> Result<AdmissiblePair> {
        self.run_to_order()?;
        let residual_norm = if measure_residual {
            conjugacy_residual(&self.jet, &self.l, &self.gamma)?
        } else {
            self.internal_defect()
        };
        Ok(AdmissiblePair {
            l: self.l,
            gamma: self.gamma,
            residual_norm,
        })
    }
}

/// L o F_hat: composition with the complex extension (F, tilde F).
pub fn hat_compose(l: &BiSeries, jet: &DiffeoJet) -> Result<BiSeries> {
    l.compose_pair(jet.series(), &jet.series_tilde())
}

/// sup-norm of the coefficients of L o F - Gamma o L through the order of L,
/// computed by direct compositions (independent of the solver's bookkeeping).
pub fn conjugacy_residual(jet: &DiffeoJet, l: &BiSeries, gamma: &UniSeries) -> Result<Float> {
    let lhs = hat_compose(l, jet)?;
    let mut gamma_full = UniSeries::zero(l.ctx(), l.order());
    gamma_full.set_coeff(1, l.ctx().one());
    for n in 2..=gamma.order().min(l.order()) {
        gamma_full.set_coeff(n, gamma.coeff(n).clone());
    }
    let rhs = compose_uni_bi(&gamma_full, l)?;
    Ok(lhs.sub(&rhs)?.max_abs())
}

/// The unique admissible pair with prescribed resonant part rho.
pub fn solve_admissible(jet: &DiffeoJet, rho: &UniSeries, order: usize) -> Result<AdmissiblePair> {
    let mut solver = AdmissibleSolver::new(jet, Selection::Rho(rho.clone()), order)?;
    solver.run_to_order()?;
    solver.finish(true)
}

/// Unique admissible pair with chi_L = chi.
pub fn solve_admissible_chi(jet: &DiffeoJet, chi: &UniSeries, order: usize) -> Result<AdmissiblePair> {
    let chi_tail = {
        // accept chi in G-form (R + O(R^2)); the linear part is implicit
        let mut t = chi.clone();
        if t.order() >= 1 {
            t.set_coeff(1, chi.ctx().zero());
        }
        t.mark_real()
    };
    let mut solver = AdmissibleSolver::new(jet, Selection::Chi(chi_tail), order)?;
    solver.run_to_order()?;
    solver.finish(true)
}

/// The resonant-free admissible pair (rho = 0).
pub fn resonant_free(jet: &DiffeoJet, order: usize) -> Result<AdmissiblePair> {
    let rho = UniSeries::zero(jet.ctx(), order / 2);
    solve_admissible(jet, &rho, order)
}

/// rho_L(R) = sum_n L_nn R^n; real up to the Hermitian defect of L.
pub fn resonant_part(l: &BiSeries) -> UniSeries {
    let ctx = l.ctx();
    let mut rho = UniSeries::zero(ctx, l.order() / 2);
    for n in 2..=l.order() / 2 {
        rho.set_coeff(n, l.coeff(n, n).clone());
    }
    rho
}

/// chi_L in G-form: chi_L(z^2) = (L(z,z) + L(-z,-z))/2.
pub fn chi_of(l: &BiSeries) -> UniSeries {
    let ctx = l.ctx();
    let diag = l.diagonal();
    let mut chi = UniSeries::zero(ctx, l.order() / 2);
    for n in 1..=l.order() / 2 {
        chi.set_coeff(n, diag.coeff(2 * n).clone());
    }
    chi.mark_real()
}

/// Solve g in G with g o l1 = l2 degree by degree from the resonant parts:
/// g_n = (l2)_nn - [g_{<n} o l1]_nn. When l1 and l2 are admissible for the
/// same jet, the G-orbit structure guarantees the full series then agree.
pub fn orbit_conjugator(l1: &BiSeries, l2: &BiSeries) -> Result<UniSeries> {
    let ctx = l1.ctx();
    let prec = ctx.prec;
    let order = l1.order().min(l2.order());
    let mut g = UniSeries::identity(ctx, order / 2);
    for n in 2..=order / 2 {
        let partial = compose_uni_bi(&g, l1)?;
        let gn = (l2.coeff(n, n) - partial.coeff(n, n)).complete((prec, prec));
        g.set_coeff(n, gn);
    }
    Ok(g)
}

/// (g o L, g o Gamma o g^{-1}): the G-action on admissible pairs, with the
/// residual re-verified against the jet.
pub fn group_act(g: &UniSeries, pair: &AdmissiblePair, jet: &DiffeoJet) -> Result<AdmissiblePair> {
    let l = compose_uni_bi(g, &pair.l)?;
    let mut gamma_full = UniSeries::zero(pair.l.ctx(), g.order().max(pair.gamma.order()));
    gamma_full.set_coeff(1, pair.l.ctx().one());
    for n in 2..=pair.gamma.order().min(gamma_full.order()) {
        gamma_full.set_coeff(n, pair.gamma.coeff(n).clone());
    }
    let g_inv = g.invert()?;
    let gamma = g.compose(&gamma_full)?.compose(&g_inv)?.mark_real();
    let residual_norm = conjugacy_residual(jet, &l, &gamma)?;
    Ok(AdmissiblePair {
        l,
        gamma,
        residual_norm,
    })
}

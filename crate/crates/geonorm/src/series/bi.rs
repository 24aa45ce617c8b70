//! Truncated series in two indeterminates (z, w), total degree <= N, stored
//! as a dense triangular array. The second indeterminate plays the role of
//! the complexified conjugate variable, so the index-swapped conjugate
//! (`tilde`) and the Hermitian symmetry c_jk = conj(c_kj) are first-class
//! citizens here.

use crate::error::{Error, Result};
use crate::num::{self, Ctx};
use crate::series::uni::{exp_outer, log1p_outer, sqrt1p_outer, UniSeries};
use rug::ops::CompleteRound;
use rug::{Assign, Complex, Float, Integer};

#[inline]
fn tri(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Storage index of the monomial z^j w^k (requires j + k <= order).
#[inline]
pub fn idx(j: usize, k: usize) -> usize {
    tri(j + k) + k
}

#[derive(Clone, Debug)]
pub struct BiSeries {
    ctx: Ctx,
    order: usize,
    coeffs: Vec<Complex>,
}

impl BiSeries {
    pub fn zero(ctx: Ctx, order: usize) -> Self {
        BiSeries {
            ctx,
            order,
            coeffs: (0..tri(order + 2)).map(|_| ctx.zero()).collect(),
        }
    }

    /// The monomial z (the first indeterminate).
    pub fn var_z(ctx: Ctx, order: usize) -> Self {
        let mut s = Self::zero(ctx, order);
        s.coeffs[idx(1, 0)] = ctx.one();
        s
    }

    /// z*w, the complex extension of the square modulus.
    pub fn nu(ctx: Ctx, order: usize) -> Self {
        let mut s = Self::zero(ctx, order);
        if order >= 2 {
            s.coeffs[idx(1, 1)] = ctx.one();
        }
        s
    }

    pub fn monomial(ctx: Ctx, order: usize, j: usize, k: usize, c: Complex) -> Self {
        let mut s = Self::zero(ctx, order);
        if j + k <= order {
            s.coeffs[idx(j, k)] = c;
        }
        s
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, j: usize, k: usize) -> &Complex {
        &self.coeffs[idx(j, k)]
    }

    pub fn set_coeff(&mut self, j: usize, k: usize, c: Complex) {
        self.coeffs[idx(j, k)] = c;
    }

    pub fn add_to_coeff(&mut self, j: usize, k: usize, c: &Complex) {
        self.coeffs[idx(j, k)] += c;
    }

    /// Iterate (j, k, coefficient) over all stored monomials.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Complex)> {
        let order = self.order;
        (0..=order).flat_map(move |d| {
            (0..=d).map(move |k| (d - k, k, &self.coeffs[tri(d) + k]))
        })
    }

    /// Iterate over the homogeneous slice of total degree m.
    pub fn slice(&self, m: usize) -> impl Iterator<Item = (usize, usize, &Complex)> {
        (0..=m).map(move |k| (m - k, k, &self.coeffs[tri(m) + k]))
    }

    pub fn valuation(&self) -> Option<usize> {
        for d in 0..=self.order {
            for k in 0..=d {
                if !self.coeffs[tri(d) + k].is_zero() {
                    return Some(d);
                }
            }
        }
        None
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut s = Self::zero(self.ctx, order);
        for d in 0..=order.min(self.order) {
            for k in 0..=d {
                s.coeffs[tri(d) + k] = self.coeffs[tri(d) + k].clone();
            }
        }
        s
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
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
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        let mut out = Self::zero(self.ctx, self.order);
        out.mul_acc(self, rhs, None);
        Ok(out)
    }

    pub fn mul_trunc(&self, rhs: &Self, order: usize) -> Self {
        let mut out = Self::zero(self.ctx, order);
        out.mul_acc(self, rhs, None);
        out
    }

    /// self += a * b (* scale), truncated at self.order, skipping zero terms.
    pub fn mul_acc(&mut self, a: &Self, b: &Self, scale: Option<&Complex>) {
        let prec = self.ctx.prec;
        let order = self.order;
        let mut t = Complex::new(prec);
        let mut ts = Complex::new(prec);
        for da in 0..=order.min(a.order) {
            for ka in 0..=da {
                let ca = &a.coeffs[tri(da) + ka];
                if ca.is_zero() {
                    continue;
                }
                let ja = da - ka;
                let dbmax = (order - da).min(b.order);
                for db in 0..=dbmax {
                    for kb in 0..=db {
                        let cb = &b.coeffs[tri(db) + kb];
                        if cb.is_zero() {
                            continue;
                        }
                        let jb = db - kb;
                        t.assign(ca * cb);
                        if let Some(s) = scale {
                            ts.assign(&t * s);
                            self.coeffs[idx(ja + jb, ka + kb)] += &ts;
                        } else {
                            self.coeffs[idx(ja + jb, ka + kb)] += &t;
                        }
                    }
                }
            }
        }
    }

    /// self += scale * dense * sp, truncated at self.order.
    pub fn mul_acc_sparse(&mut self, dense: &Self, sp: &SparseBi, scale: &Complex) {
        let prec = self.ctx.prec;
        let order = self.order;
        let mut t = Complex::new(prec);
        for (js, ks, cs) in &sp.terms {
            let ds = js + ks;
            if ds > order {
                continue;
            }
            let scaled = (cs * scale).complete((prec, prec));
            if scaled.is_zero() {
                continue;
            }
            let dmax = (order - ds).min(dense.order);
            for dd in 0..=dmax {
                for kd in 0..=dd {
                    let cd = &dense.coeffs[tri(dd) + kd];
                    if cd.is_zero() {
                        continue;
                    }
                    t.assign(cd * &scaled);
                    self.coeffs[idx(dd - kd + js, kd + ks)] += &t;
                }
            }
        }
    }

    /// Index-swapped conjugate extension: tilde(f)(z,w) = sum conj(f_kl) z^l w^k.
    pub fn tilde(&self) -> Self {
        let mut out = Self::zero(self.ctx, self.order);
        for (j, k, c) in self.iter() {
            if c.is_zero() {
                continue;
            }
            out.coeffs[idx(k, j)] = num::conj(c);
        }
        out
    }

    /// f * tilde(f); Hermitian by construction.
    pub fn square_modulus(&self) -> Self {
        let t = self.tilde();
        let mut out = Self::zero(self.ctx, self.order);
        out.mul_acc(self, &t, None);
        out
    }

    /// sup |c_jk - conj(c_kj)|: distance from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> Float {
        let _prec = self.ctx.prec;
        let mut m = self.ctx.f_zero();
        for (j, k, c) in self.iter() {
            if k > j {
                continue;
            }
            let d = c - num::conj(self.coeff(k, j));
            let a = num::sup_norm(&d);
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Restriction to the diagonal w = z: sum_n (sum_{r+s=n} c_rs) z^n.
    pub fn diagonal(&self) -> UniSeries {
        let mut out = UniSeries::zero(self.ctx, self.order);
        let mut real = true;
        for n in 0..=self.order {
            let mut acc = self.ctx.zero();
            for k in 0..=n {
                acc += &self.coeffs[tri(n) + k];
            }
            if !acc.imag().is_zero() {
                real = false;
            }
            out.set_coeff(n, acc);
        }
        if real {
            out.mark_real()
        } else {
            out.mark_complex()
        }
    }

    /// f(-z,-w): sign flip on odd total degrees.
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        for d in (1..=out.order).step_by(2) {
            for k in 0..=d {
                out.coeffs[tri(d) + k] *= -1i32;
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

    /// Max coefficient magnitude on the homogeneous slice of degree m.
    pub fn max_abs_slice(&self, m: usize) -> Float {
        let mut acc = self.ctx.f_zero();
        for k in 0..=m {
            let a = num::sup_norm(&self.coeffs[tri(m) + k]);
            if a > acc {
                acc = a;
            }
        }
        acc
    }

    /// Max |c_rs| over off-diagonal monomials (r != s).
    pub fn max_abs_offdiag(&self) -> Float {
        let mut m = self.ctx.f_zero();
        for (j, k, c) in self.iter() {
            if j == k {
                continue;
            }
            let a = num::sup_norm(c);
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Number of nonzero coefficients.
    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn check_order(&self, rhs: &Self) -> Result<()> {
        if self.order != rhs.order {
            return Err(Error::OrderMismatch(self.order, rhs.order));
        }
        Ok(())
    }

    /// Truncated composition self(u, v) for two inner series with zero
    /// constant term, by a double Horner scheme over rows.
    pub fn compose_pair(&self, u: &Self, v: &Self) -> Result<Self> {
        if !u.coeff(0, 0).is_zero() || !v.coeff(0, 0).is_zero() {
            return Err(Error::ConstantTerm);
        }
        let order = self.order.min(u.order).min(v.order);
        let mut result = BiSeries::zero(self.ctx, order);
        // Horner in u over rows r; each row is a Horner in v.
        for r in (0..=order).rev() {
            // row_r(v) = sum_s self[r, s] v^s
            let mut row = BiSeries::zero(self.ctx, order);
            for s in (0..=(self.order - r)).rev() {
                row = row.mul_trunc(v, order);
                row.coeffs[0] += self.coeff(r, s);
            }
            result = result.mul_trunc(u, order);
            result.add_assign(&row);
        }
        Ok(result)
    }

    /// Multiplicative inverse of a series with constant term 1 (Newton).
    pub fn reciprocal(&self) -> Result<Self> {
        let _prec = self.ctx.prec;
        let c0 = self.coeff(0, 0);
        if c0.is_zero() {
            return Err(Error::LeadingTerm("reciprocal needs nonzero constant term"));
        }
        let order = self.order;
        let mut x = BiSeries::zero(self.ctx, order);
        x.coeffs[0] = self.ctx.one() / c0;
        let mut correct = 0usize; // correct through this total degree
        while correct < order {
            // x <- x (2 - a x)
            let mut ax = BiSeries::zero(self.ctx, order);
            ax.mul_acc(self, &x, None);
            let mut two_minus = ax.neg();
            two_minus.coeffs[0] += 2u32;
            x = x.mul_trunc(&two_minus, order);
            correct = 2 * correct + 1;
        }
        Ok(x)
    }

    fn apply_outer(&self, outer: &[Complex]) -> Result<Self> {
        if !self.coeff(0, 0).is_zero() {
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
        Ok(acc)
    }

    /// sqrt(1 + self); self must have zero constant term.
    pub fn sqrt1p(&self) -> Result<Self> {
        self.apply_outer(&sqrt1p_outer(self.ctx, self.order))
    }

    pub fn log1p(&self) -> Result<Self> {
        self.apply_outer(&log1p_outer(self.ctx, self.order))
    }

    pub fn exp(&self) -> Result<Self> {
        self.apply_outer(&exp_outer(self.ctx, self.order))
    }

    /// Partial derivative with respect to the first variable.
    pub fn d_dz(&self) -> Self {
        let prec = self.ctx.prec;
        let mut out = Self::zero(self.ctx, self.order);
        for (j, k, c) in self.iter() {
            if j == 0 || c.is_zero() {
                continue;
            }
            out.coeffs[idx(j - 1, k)] = (c * &Float::with_val(prec, j as u64)).complete((prec, prec));
        }
        out
    }

    /// Partial derivative with respect to the second variable.
    pub fn d_dw(&self) -> Self {
        let prec = self.ctx.prec;
        let mut out = Self::zero(self.ctx, self.order);
        for (j, k, c) in self.iter() {
            if k == 0 || c.is_zero() {
                continue;
            }
            out.coeffs[idx(j, k - 1)] = (c * &Float::with_val(prec, k as u64)).complete((prec, prec));
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> Integer {
    Integer::from(n).binomial(k as u32)
}

/// Substitute x = (z+w)/2, y = (z-w)/(2i) into a series in (x, y).
///
/// The input is read as sum P_jk x^j y^k over the same triangular layout.
pub fn xy_to_zw(p: &BiSeries) -> BiSeries {
    let ctx = p.ctx();
    let prec = ctx.prec;
    let order = p.order();
    let half = Float::with_val(prec, 0.5f32);
    // 1/(2i) = -i/2
    let minus_half_i = Complex::with_val(prec, (0, -0.5f32));
    let mut out = BiSeries::zero(ctx, order);
    let mut t = Complex::new(prec);
    for (j, k, c) in p.iter() {
        if c.is_zero() {
            continue;
        }
        // c * (1/2)^j * (-i/2)^k * (z+w)^j (z-w)^k
        let mut base = (c * &half.clone().pow_assign_round(j)).complete((prec, prec));
        base *= minus_half_i.clone().pow_assign_round(k);
        for pz in 0..=j {
            let bj = binomial(j, pz);
            for qz in 0..=k {
                let mut bk = binomial(k, qz);
                if (k - qz) % 2 == 1 {
                    bk = -bk;
                }
                t.assign(&base * &(bj.clone() * bk));
                out.add_to_coeff(pz + qz, j + k - pz - qz, &t);
            }
        }
    }
    out
}

/// Substitute z = x+iy, w = x-iy: inverse chart of [`xy_to_zw`].
pub fn zw_to_xy(q: &BiSeries) -> BiSeries {
    let ctx = q.ctx();
    let prec = ctx.prec;
    let order = q.order();
    let i_unit = Complex::with_val(prec, (0, 1));
    let minus_i = Complex::with_val(prec, (0, -1));
    let mut out = BiSeries::zero(ctx, order);
    let mut t = Complex::new(prec);
    for (j, k, c) in q.iter() {
        if c.is_zero() {
            continue;
        }
        // (x+iy)^j (x-iy)^k
        for pz in 0..=j {
            let f1 = i_unit.clone().pow_assign_round(j - pz) * binomial(j, pz);
            for qz in 0..=k {
                let f2 = minus_i.clone().pow_assign_round(k - qz) * binomial(k, qz);
                t.assign(&f1 * &f2);
                t *= c;
                out.add_to_coeff(pz + qz, j + k - pz - qz, &t);
            }
        }
    }
    out
}

trait PowAssignRound {
    fn pow_assign_round(self, e: usize) -> Self;
}

impl PowAssignRound for Float {
    fn pow_assign_round(mut self, e: usize) -> Self {
        use rug::ops::PowAssign;
        self.pow_assign(e as u32);
        self
    }
}

impl PowAssignRound for Complex {
    fn pow_assign_round(mut self, e: usize) -> Self {
        use rug::ops::PowAssign;
        self.pow_assign(e as u32);
        self
    }
}

/// Inverse of the pair map (z,w) -> (phi(z,w), tilde(phi)(z,w)) projected to
/// its first component: the unique tangent-to-identity psi with
/// phi(psi, tilde(psi)) = z through the truncation order.
pub fn invert_bi_pair(phi: &BiSeries) -> Result<BiSeries> {
    let ctx = phi.ctx();
    let order = phi.order();
    if !phi.coeff(0, 0).is_zero() {
        return Err(Error::ConstantTerm);
    }
    let lin_ok = {
        let one = ctx.one();
        let dz = (phi.coeff(1, 0) - &one).complete((ctx.prec, ctx.prec));
        dz.is_zero() && phi.coeff(0, 1).is_zero()
    };
    if !lin_ok {
        return Err(Error::LeadingTerm("invert_bi_pair expects a tangent-to-identity series"));
    }
    // phi = z + phi_hi
    let mut phi_hi = phi.clone();
    phi_hi.set_coeff(1, 0, ctx.zero());
    let z = BiSeries::var_z(ctx, order);
    // fixed point psi <- z - phi_hi(psi, tilde(psi)); gains one degree per pass
    let mut psi = z.clone();
    for _ in 2..=order.max(2) {
        let corr = phi_hi.compose_pair(&psi, &psi.tilde())?;
        psi = z.sub(&corr)?;
    }
    Ok(psi)
}

/// Composition of a univariate outer series with a bivariate inner series
/// (inner must have zero constant term).
pub fn compose_uni_bi(g: &UniSeries, inner: &BiSeries) -> Result<BiSeries> {
    if !inner.coeff(0, 0).is_zero() {
        return Err(Error::ConstantTerm);
    }
    let order = inner.order();
    let mut acc = BiSeries::zero(inner.ctx(), order);
    let top = g.order();
    for n in (1..=top).rev() {
        acc = acc.mul_trunc(inner, order);
        acc.coeffs[0] += g.coeff(n);
    }
    acc = acc.mul_trunc(inner, order);
    acc.coeffs[0] += g.coeff(0);
    Ok(acc)
}

/// A sparse view of a bivariate polynomial, used for power tables.
#[derive(Clone, Debug)]
pub struct SparseBi {
    pub order: usize,
    pub terms: Vec<(usize, usize, Complex)>,
}

impl SparseBi {
    pub fn from_bi(s: &BiSeries) -> Self {
        let terms = s
            .iter()
            .filter(|(_, _, c)| !c.is_zero())
            .map(|(j, k, c)| (j, k, c.clone()))
            .collect();
        SparseBi {
            order: s.order(),
            terms,
        }
    }

    pub fn one(ctx: Ctx, order: usize) -> Self {
        SparseBi {
            order,
            terms: vec![(0, 0, ctx.one())],
        }
    }

    pub fn min_degree(&self) -> usize {
        self.terms.iter().map(|(j, k, _)| j + k).min().unwrap_or(usize::MAX)
    }

    pub fn mul_trunc(&self, rhs: &Self, order: usize, prec: u32) -> Self {
        let mut map: std::collections::BTreeMap<(usize, usize), Complex> =
            std::collections::BTreeMap::new();
        let mut t = Complex::new(prec);
        for (ja, ka, ca) in &self.terms {
            for (jb, kb, cb) in &rhs.terms {
                if ja + ka + jb + kb > order {
                    continue;
                }
                t.assign(ca * cb);
                map.entry((ja + jb, ka + kb))
                    .and_modify(|acc| *acc += &t)
                    .or_insert_with(|| t.clone());
            }
        }
        SparseBi {
            order,
            terms: map
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((j, k), c)| (j, k, c))
                .collect(),
        }
    }

    /// target += scale * self * rhs, truncated at target.order().
    pub fn mul_acc_into(&self, rhs: &Self, scale: &Complex, target: &mut BiSeries) {
        let order = target.order();
        let prec = target.ctx().prec;
        let mut t = Complex::new(prec);
        for (ja, ka, ca) in &self.terms {
            let da = ja + ka;
            if da > order {
                continue;
            }
            for (jb, kb, cb) in &rhs.terms {
                if da + jb + kb > order {
                    continue;
                }
                t.assign(ca * cb);
                t *= scale;
                target.add_to_coeff(ja + jb, ka + kb, &t);
            }
        }
    }
}

//! Area-preserving machinery in the (x, y) chart: homogeneous span
//! decomposition, Hamiltonian shear maps, inductive extension of an
//! area-preserving N-jet to a polynomial area-preserving map, and maps from
//! generating functions.
//!
//! Everything except `generating_map` runs over exact rationals, so the
//! Jacobian-determinant checks are zero-tolerance polynomial identities.
//! Extended maps are kept in factored form (a chain of shears over a linear
//! base): expanding the composition is exponential in the jet order, while
//! the chain keeps exactness, cheap jets, and a factorwise determinant
//! certificate.

use crate::dynamics::jet::DiffeoJet;
use crate::error::{Error, Result};
use crate::num::Ctx;
use crate::series::{xy_to_zw, BiSeries};
use rug::ops::{CompleteRound, Pow};
use rug::{Complete, Integer, Rational};

#[inline]
fn tri(d: usize) -> usize {
    d * (d + 1) / 2
}

#[inline]
fn ridx(p: usize, q: usize) -> usize {
    tri(p + q) + q
}

/// Dense triangular polynomial in (x, y) over exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct RatPoly2 {
    deg: usize,
    c: Vec<Rational>,
}

impl RatPoly2 {
    pub fn zero(deg: usize) -> Self {
        RatPoly2 {
            deg,
            c: vec![Rational::new(); tri(deg + 2)],
        }
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn coeff(&self, p: usize, q: usize) -> &Rational {
        &self.c[ridx(p, q)]
    }

    pub fn set_coeff(&mut self, p: usize, q: usize, v: Rational) {
        self.c[ridx(p, q)] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        let deg = self.deg;
        (0..=deg).flat_map(move |d| (0..=d).map(move |q| (d - q, q, &self.c[tri(d) + q])))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| *v == 0)
    }

    /// Copy into a (possibly larger) degree bound.
    pub fn resized(&self, deg: usize) -> Self {
        let mut out = Self::zero(deg);
        for (p, q, v) in self.iter() {
            if p + q <= deg && *v != 0 {
                out.set_coeff(p, q, v.clone());
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let deg = self.deg.max(rhs.deg);
        let mut out = self.resized(deg);
        for (p, q, v) in rhs.iter() {
            if *v != 0 {
                out.c[ridx(p, q)] += v;
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let deg = self.deg.max(rhs.deg);
        let mut out = self.resized(deg);
        for (p, q, v) in rhs.iter() {
            if *v != 0 {
                out.c[ridx(p, q)] -= v;
            }
        }
        out
    }

    pub fn scale(&self, f: &Rational) -> Self {
        let mut out = self.clone();
        for v in out.c.iter_mut() {
            *v *= f;
        }
        out
    }

    /// Full product (exact), optionally truncated at total degree `cap`.
    pub fn mul(&self, rhs: &Self, cap: Option<usize>) -> Self {
        let full = self.deg + rhs.deg;
        let deg = cap.map_or(full, |c| c.min(full));
        let mut out = Self::zero(deg);
        for (pa, qa, va) in self.iter() {
            if *va == 0 {
                continue;
            }
            for (pb, qb, vb) in rhs.iter() {
                if *vb == 0 || pa + qa + pb + qb > deg {
                    continue;
                }
                out.c[ridx(pa + pb, qa + qb)] += (va * vb).complete();
            }
        }
        out
    }

    pub fn d_dx(&self) -> Self {
        let deg = self.deg.saturating_sub(1);
        let mut out = Self::zero(deg);
        for (p, q, v) in self.iter() {
            if p == 0 || *v == 0 {
                continue;
            }
            out.c[ridx(p - 1, q)] = v * Rational::from(p as u64);
        }
        out
    }

    pub fn d_dy(&self) -> Self {
        let deg = self.deg.saturating_sub(1);
        let mut out = Self::zero(deg);
        for (p, q, v) in self.iter() {
            if q == 0 || *v == 0 {
                continue;
            }
            out.c[ridx(p, q - 1)] = v * Rational::from(q as u64);
        }
        out
    }

    /// Substitute (u, v) for (x, y), truncated at total degree `cap`.
    pub fn compose(&self, u: &Self, v: &Self, cap: usize) -> Self {
        // Horner over rows in x, inner Horner in y.
        let mut out = Self::zero(cap);
        for p in (0..=self.deg).rev() {
            let mut row = Self::zero(cap);
            for q in (0..=(self.deg - p)).rev() {
                row = row.mul(v, Some(cap));
                row.c[0] += self.coeff(p, q);
            }
            out = out.mul(u, Some(cap));
            out = out.add(&row);
        }
        out
    }

    /// The homogeneous part of total degree d.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let mut out = Self::zero(d.min(self.deg));
        if d <= self.deg {
            for q in 0..=d {
                out.c[ridx(d - q, q)] = self.c[tri(d) + q].clone();
            }
        }
        out
    }

    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.iter().all(|(p, q, v)| *v == 0 || p + q == d)
    }

    /// (a x + b y)^d expanded exactly.
    pub fn linear_power(a: &Rational, b: &Rational, d: usize) -> Self {
        let mut out = Self::zero(d);
        for q in 0..=d {
            let bin = Integer::from(d).binomial(q as u32);
            let mut term = Rational::from(bin);
            for _ in 0..(d - q) {
                term *= a;
            }
            for _ in 0..q {
                term *= b;
            }
            out.c[ridx(d - q, q)] = term;
        }
        out
    }

    /// Odd polynomial: only odd total degrees.
    pub fn is_odd_map_component(&self) -> bool {
        self.iter().all(|(p, q, v)| *v == 0 || (p + q) % 2 == 1)
    }
}

/// One factor of an area-preserving composition chain.
#[derive(Clone, Debug)]
pub enum Factor {
    /// (x, y) -> (c x - s y, s x + c y) with c^2 + s^2 = 1 exactly.
    Linear { c: Rational, s: Rational },
    /// Time-`coef` map of the Hamiltonian (a x + b y)^{d+1}:
    /// (x, y) -> (x + (d+1) coef b (ax+by)^d, y - (d+1) coef a (ax+by)^d).
    Shear {
        a: Rational,
        b: Rational,
        coef: Rational,
        d: usize,
    },
}

impl Factor {
    /// The two polynomial components of this factor.
    pub fn components(&self) -> (RatPoly2, RatPoly2) {
        match self {
            Factor::Linear { c, s } => {
                let mut fx = RatPoly2::zero(1);
                fx.set_coeff(1, 0, c.clone());
                fx.set_coeff(0, 1, (-s.clone()).clone());
                let mut fy = RatPoly2::zero(1);
                fy.set_coeff(1, 0, s.clone());
                fy.set_coeff(0, 1, c.clone());
                (fx, fy)
            }
            Factor::Shear { a, b, coef, d } => {
                let deg = (*d).max(1);
                let pow = RatPoly2::linear_power(a, b, *d);
                let k = Rational::from((*d as u64) + 1) * coef;
                let kb = (&k * b).complete();
                let ka = (&k * a).complete();
                let mut fx = pow.scale(&kb).resized(deg);
                fx.c[ridx(1, 0)] += Rational::from(1);
                let mut fy = pow.scale(&(-ka)).resized(deg);
                fy.c[ridx(0, 1)] += Rational::from(1);
                (fx, fy)
            }
        }
    }

    /// Exact symbolic Jacobian determinant minus one; the zero polynomial
    /// certifies area preservation of this factor.
    pub fn det_minus_one(&self) -> RatPoly2 {
        let (fx, fy) = self.components();
        let gx = fx.d_dx();
        let gy = fx.d_dy();
        let hx = fy.d_dx();
        let hy = fy.d_dy();
        let det = gx.mul(&hy, None).sub(&gy.mul(&hx, None));
        let mut one = RatPoly2::zero(det.deg());
        one.c[0] = Rational::from(1);
        det.sub(&one)
    }

    pub fn is_odd(&self) -> bool {
        match self {
            Factor::Linear { .. } => true,
            Factor::Shear { d, .. } => d % 2 == 1,
        }
    }
}

/// An area-preserving polynomial map held as a composition chain
/// factors[0] o factors[1] o ... (rightmost acts first).
#[derive(Clone, Debug)]
pub struct PlanarPolyMap {
    pub factors: Vec<Factor>,
}

impl PlanarPolyMap {
    pub fn identity() -> Self {
        PlanarPolyMap {
            factors: vec![Factor::Linear {
                c: Rational::from(1),
                s: Rational::from(0),
            }],
        }
    }

    pub fn rotation(c: Rational, s: Rational) -> Result<Self> {
        let circ = (c.clone() * &c) + (s.clone() * &s);
        if circ != 1 {
            return Err(Error::Invalid("rotation needs c^2 + s^2 = 1 exactly".into()));
        }
        Ok(PlanarPolyMap {
            factors: vec![Factor::Linear { c, s }],
        })
    }

    /// Truncated composition of the chain: the N-jet of the map, exact.
    pub fn jet(&self, order: usize) -> (RatPoly2, RatPoly2) {
        let mut x = RatPoly2::zero(order);
        x.set_coeff(1, 0, Rational::from(1));
        let mut y = RatPoly2::zero(order);
        y.set_coeff(0, 1, Rational::from(1));
        // apply factors right-to-left: result = f1 o f2 o ... (fn acts first)
        for f in self.factors.iter().rev() {
            let (fx, fy) = f.components();
            let nx = fx.compose(&x, &y, order);
            let ny = fy.compose(&x, &y, order);
            x = nx;
            y = ny;
        }
        (x, y)
    }

    /// Zero-tolerance area-preservation certificate: every factor has
    /// symbolic Jacobian determinant exactly 1; by the chain rule the whole
    /// composition does too. Returns the number of factors certified.
    pub fn certify_area_preserving(&self) -> Result<usize> {
        for (i, f) in self.factors.iter().enumerate() {
            if !f.det_minus_one().is_zero() {
                return Err(Error::Invalid(format!("factor {i} is not area-preserving")));
            }
        }
        Ok(self.factors.len())
    }

    /// Expanded components when the composed degree stays within `limit`.
    pub fn expand(&self, limit: usize) -> Option<(RatPoly2, RatPoly2)> {
        let mut total: usize = 1;
        for f in &self.factors {
            let d = match f {
                Factor::Linear { .. } => 1,
                Factor::Shear { d, .. } => (*d).max(1),
            };
            total = total.saturating_mul(d);
            if total > limit {
                return None;
            }
        }
        Some(self.jet(total))
    }

    pub fn is_odd(&self) -> bool {
        self.factors.iter().all(|f| f.is_odd())
    }
}

/// H = sum_j c_j (a_j x + b_j y)^d for a d-homogeneous H, using the d+1
/// integer directions (1, 0), (1, 1), ..., (1, d), solved exactly.
pub fn span_decompose(h: &RatPoly2, d: usize) -> Result<Vec<(Rational, Rational, Rational)>> {
    if !h.is_homogeneous(d) {
        return Err(Error::Invalid(format!("input is not {d}-homogeneous")));
    }
    // (x + t y)^d = sum_q C(d,q) t^q x^{d-q} y^q: match coefficients of y^q
    // ->  sum_j c_j C(d,q) t_j^q = h_{d-q,q}, a Vandermonde system in t_j = j.
    let n = d + 1;
    // build augmented matrix over rationals, solve by Gaussian elimination
    let mut mat: Vec<Vec<Rational>> = vec![vec![Rational::new(); n + 1]; n];
    for q in 0..n {
        let bin = Rational::from(Integer::from(d).binomial(q as u32));
        for (j, row) in mat.iter_mut().enumerate() {
            let t = Integer::from(j).pow(q as u32);
            row[q] = &bin * Rational::from(t);
        }
        // rows indexed by j, columns by q: we want sum_j c_j M[q][j] = h_q;
        // transpose while filling the rhs below.
    }
    // mat[j][q] currently holds C(d,q) j^q; the equations are over q.
    let mut aug: Vec<Vec<Rational>> = vec![vec![Rational::new(); n + 1]; n];
    for q in 0..n {
        for j in 0..n {
            aug[q][j] = mat[j][q].clone();
        }
        aug[q][n] = h.coeff(d - q, q).clone();
    }
    let c = solve_rational_system(&mut aug)?;
    Ok(c
        .into_iter()
        .enumerate()
        .map(|(j, cj)| (cj, Rational::from(1), Rational::from(j as u64)))
        .collect())
}

/// Gaussian elimination over Q; aug is n x (n+1).
#[allow(clippy::needless_range_loop)]
fn solve_rational_system(aug: &mut [Vec<Rational>]) -> Result<Vec<Rational>> {
    let n = aug.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| aug[r][col] != 0)
            .ok_or_else(|| Error::Invalid("singular span system".into()))?;
        aug.swap(col, pivot);
        let inv = aug[col][col].clone().recip();
        for v in aug[col][col..].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r == col || aug[r][col] == 0 {
                continue;
            }
            let factor = aug[r][col].clone();
            for cc in col..=n {
                let delta = (&aug[col][cc] * &factor).complete();
                aug[r][cc] -= delta;
            }
        }
    }
    Ok((0..n).map(|r| aug[r][n].clone()).collect())
}

/// The time-`coef` shear of the Hamiltonian (a x + b y)^{d+1}.
pub fn shear_map(a: Rational, b: Rational, coef: Rational, d: usize) -> PlanarPolyMap {
    PlanarPolyMap {
        factors: vec![Factor::Shear { a, b, coef, d }],
    }
}

/// Input jet for `extend_jet`: the two components of an N-jet in (x, y).
#[derive(Clone, Debug)]
pub struct XyJet {
    pub x: RatPoly2,
    pub y: RatPoly2,
    pub order: usize,
}

impl XyJet {
    pub fn rotation(c: Rational, s: Rational, order: usize) -> Result<Self> {
        let circ = (c.clone() * &c) + (s.clone() * &s);
        if circ != 1 {
            return Err(Error::Invalid("rotation needs c^2 + s^2 = 1 exactly".into()));
        }
        let mut x = RatPoly2::zero(order);
        x.set_coeff(1, 0, c.clone());
        x.set_coeff(0, 1, -s.clone());
        let mut y = RatPoly2::zero(order);
        y.set_coeff(1, 0, s);
        y.set_coeff(0, 1, c);
        Ok(XyJet { x, y, order })
    }

    pub fn is_odd(&self) -> bool {
        self.x.is_odd_map_component() && self.y.is_odd_map_component()
    }
}

/// Extend an N-jet of a formal area-preserving map to a polynomial
/// area-preserving map with the same N-jet (factored form). At each
/// induction degree the Hamiltonian condition g_x + h_y = 0 is verified
/// exactly, not assumed; `odd` additionally demands an odd jet and returns
/// an odd map.
pub fn extend_jet(jet: &XyJet, odd: bool) -> Result<PlanarPolyMap> {
    let order = jet.order;
    if odd && !jet.is_odd() {
        return Err(Error::Invalid("odd extension requires an odd jet".into()));
    }
    // linear part must be in SL2 with the rotation shape (c, -s; s, c)
    let c = jet.x.coeff(1, 0).clone();
    let ms = jet.x.coeff(0, 1).clone();
    let s = jet.y.coeff(1, 0).clone();
    let c2 = jet.y.coeff(0, 1).clone();
    if c != c2 || ms != -s.clone() {
        return Err(Error::Invalid("linear part must be a rotation matrix".into()));
    }
    let mut map = PlanarPolyMap::rotation(c, s)?;
    for n in 1..order {
        // F_* = J o F_n^{-1} agrees with id + (g, h) + O_{n+2}; equivalently
        // (g, h) is the (n+1)-homogeneous part of J - F_n (they share the n-jet
        // and F_n, J are both O(1) maps with the same linear part).
        let (fx, fy) = map.jet(n + 1);
        // Compose inverse-free: the (n+1)-homogeneous defect of J relative to
        // F_n, transported by the inverse linear part. For tangent-type
        // compositions (id + P) o F_n = F_n + P o R + higher, with R the
        // linear part, so P = (J - F_n)_{n+1} o R^{-1}.
        let gx_raw = jet.x.homogeneous_part(n + 1).sub(&fx.homogeneous_part(n + 1));
        let gy_raw = jet.y.homogeneous_part(n + 1).sub(&fy.homogeneous_part(n + 1));
        // apply R^{-1} = rotation by (c, -s)
        let (g, h) = {
            let rinv = Factor::Linear {
                c: jet.x.coeff(1, 0).clone(),
                s: -jet.y.coeff(1, 0).clone(),
            };
            let (rx, ry) = rinv.components();
            (
                gx_raw.compose(&rx, &ry, n + 1),
                gy_raw.compose(&rx, &ry, n + 1),
            )
        };
        if g.is_zero() && h.is_zero() {
            continue;
        }
        // Hamiltonian check: g_x + h_y = 0 exactly
        let defect = g.d_dx().add(&h.d_dy());
        if !defect.is_zero() {
            return Err(Error::JetNotExtendable(n + 1));
        }
        // H with g = H_y, h = -H_x: integrate g in y (adding the x-only part
        // from h). H is (n+2)-homogeneous.
        let mut ham = RatPoly2::zero(n + 2);
        for (p, q, v) in g.iter() {
            if *v == 0 {
                continue;
            }
            ham.c[ridx(p, q + 1)] += v / Rational::from((q + 1) as u64);
        }
        // x-only part of h fixes the y-free coefficient of H
        let hx0 = h.coeff(n + 1, 0).clone();
        if hx0 != 0 {
            ham.c[ridx(n + 2, 0)] = -hx0 / Rational::from((n + 2) as u64);
        }
        // verify H reproduces (g, h) exactly
        if ham.d_dy().sub(&g).is_zero() && ham.d_dx().add(&h).is_zero() {
            // ok
        } else {
            return Err(Error::JetNotExtendable(n + 1));
        }
        if odd && n % 2 == 1 {
            // J odd and n odd force g = h = 0
            return Err(Error::JetNotExtendable(n + 1));
        }
        let span = span_decompose(&ham, n + 2)?;
        let mut new_factors: Vec<Factor> = Vec::new();
        for (cj, aj, bj) in span {
            if cj == 0 {
                continue;
            }
            new_factors.push(Factor::Shear {
                a: aj,
                b: bj,
                coef: cj,
                d: n + 1,
            });
        }
        // F_{n+1} = Phi o F_n
        let mut factors = new_factors;
        factors.extend(map.factors);
        map = PlanarPolyMap { factors };
    }
    Ok(map)
}

/// Result of building a map from a generating function.
pub struct GeneratedMap {
    pub jet: DiffeoJet,
    /// x'(x,y) and y'(x,y) as real series in the (x, y) chart.
    pub x_series: BiSeries,
    pub y_series: BiSeries,
    /// sup-norm of det D(x', y') - 1 through order - 1.
    pub area_residual: f64,
}

/// Solve the implicit generating-function system
/// x' = x + du/dy'(x, y'), y = y' + du/dx(x, y') on truncated series.
/// `u` is a real series in (x, y') whose terms all have total degree > n.
pub fn generating_map(ctx: Ctx, u: &BiSeries, n: usize) -> Result<GeneratedMap> {
    let order = u.order();
    if let Some(v) = u.valuation() {
        if v <= n {
            return Err(Error::Invalid(format!(
                "generating function must be O(degree > {n}), found degree {v}"
            )));
        }
    }
    let ux = u.d_dz(); // d/dx
    let uy = u.d_dw(); // d/dy'
    let x = BiSeries::monomial(ctx, order, 1, 0, ctx.one());
    let y = BiSeries::monomial(ctx, order, 0, 1, ctx.one());
    // fixed point: y' = y - u_x(x, y'); contraction on the degree filtration
    let mut yp = y.clone();
    let mut stabilized = false;
    for _ in 0..order + 2 {
        let next = y.sub(&ux.compose_pair(&x, &yp)?)?;
        let delta = next.sub(&yp)?.max_abs();
        yp = next;
        if delta.is_zero() {
            stabilized = true;
            break;
        }
    }
    if !stabilized {
        // one more pass must be a no-op on truncated series
        let next = y.sub(&ux.compose_pair(&x, &yp)?)?;
        if !next.sub(&yp)?.is_zero() {
            return Err(Error::NoFixedPoint(order + 2));
        }
    }
    let xp = x.add(&uy.compose_pair(&x, &yp)?)?;
    // area check: Jacobian determinant of (x', y') in (x, y)
    let det = xp
        .d_dz()
        .mul(&yp.d_dw())?
        .sub(&xp.d_dw().mul(&yp.d_dz())?)?;
    let mut dm1 = det.clone();
    dm1.set_coeff(0, 0, (det.coeff(0, 0) - &ctx.one()).complete((ctx.prec, ctx.prec)));
    // derivatives only see order-1
    let area_residual = dm1.truncated(order.saturating_sub(1)).max_abs().to_f64();
    // z' = x' + i y' in the (z, w) chart
    let zp_xy = xp.add(&yp.scale(&ctx.c_i64(0, 1)))?;
    let zp = xy_to_zw(&zp_xy);
    let mut jet = DiffeoJet::with_lambda(ctx, ctx.f_zero(), ctx.one(), order);
    for (j, k, c) in zp.iter() {
        if j + k >= 2 && !c.is_zero() {
            jet.set_coeff(j, k, c.clone())?;
        }
    }
    Ok(GeneratedMap {
        jet,
        x_series: xp,
        y_series: yp,
        area_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: u64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn shear_det_exact() {
        // random small (a, b, coef, d): det == 1 as an exact polynomial
        let cases = [
            (rat(1, 1), rat(0, 1), rat(3, 7), 2usize),
            (rat(2, 3), rat(-1, 2), rat(5, 11), 3),
            (rat(-4, 5), rat(7, 2), rat(1, 9), 4),
            (rat(0, 1), rat(3, 4), rat(-2, 3), 1),
        ];
        for (a, b, coef, d) in cases {
            let m = shear_map(a, b, coef, d);
            assert_eq!(m.certify_area_preserving().unwrap(), 1);
            // and fully expanded
            let f = &m.factors[0];
            assert!(f.det_minus_one().is_zero());
        }
    }

    #[test]
    fn shear_trivial_cases() {
        // coef = 0 -> identity
        let m = shear_map(rat(1, 1), rat(1, 1), rat(0, 1), 3);
        let (fx, fy) = m.factors[0].components();
        assert_eq!(*fx.coeff(1, 0), 1);
        assert!(fx.iter().all(|(p, q, v)| (p, q) == (1, 0) || *v == 0));
        assert_eq!(*fy.coeff(0, 1), 1);
        // a = 0 -> pure x-shear by y^d
        let m = shear_map(rat(0, 1), rat(2, 1), rat(1, 2), 2);
        let (fx, fy) = m.factors[0].components();
        assert!(*fx.coeff(0, 2) != 0);
        assert!(fy.iter().all(|(p, q, v)| (p, q) == (0, 1) || *v == 0));
    }

    #[test]
    fn span_reconstruction() {
        // H = x^2: representable on the integer-direction nodes
        let mut h = RatPoly2::zero(2);
        h.set_coeff(2, 0, rat(1, 1));
        let parts = span_decompose(&h, 2).unwrap();
        let mut recon = RatPoly2::zero(2);
        for (cj, aj, bj) in &parts {
            recon = recon.add(&RatPoly2::linear_power(aj, bj, 2).scale(cj));
        }
        assert!(recon.sub(&h).is_zero());

        // H = (x + y)^3: reconstruction exact
        let h3 = RatPoly2::linear_power(&rat(1, 1), &rat(1, 1), 3);
        let parts = span_decompose(&h3, 3).unwrap();
        let mut recon = RatPoly2::zero(3);
        for (cj, aj, bj) in &parts {
            recon = recon.add(&RatPoly2::linear_power(aj, bj, 3).scale(cj));
        }
        assert!(recon.sub(&h3).is_zero());

        // zero polynomial -> all coefficients zero
        let hz = RatPoly2::zero(4);
        let parts = span_decompose(&hz, 4).unwrap();
        assert!(parts.iter().all(|(c, _, _)| *c == 0));
    }

    /// 3-4-5 rotation: c = 3/5, s = 4/5.
    fn pythagorean_rotation(order: usize) -> XyJet {
        XyJet::rotation(rat(3, 5), rat(4, 5), order).unwrap()
    }

    #[test]
    fn extend_rotation_base_case() {
        let jet = pythagorean_rotation(1);
        let m = extend_jet(&jet, false).unwrap();
        assert_eq!(m.factors.len(), 1);
        m.certify_area_preserving().unwrap();
        let (fx, fy) = m.jet(1);
        assert!(fx.sub(&jet.x).is_zero());
        assert!(fy.sub(&jet.y).is_zero());
    }

    #[test]
    fn extend_order_two_jet() {
        // build a genuine area-preserving 2-jet: rotation composed with a shear,
        // truncated at order 2; extension must reproduce it with det == 1
        let rot = PlanarPolyMap::rotation(rat(3, 5), rat(4, 5)).unwrap();
        let mut chain = shear_map(rat(1, 1), rat(1, 2), rat(2, 3), 2);
        chain.factors.extend(rot.factors.clone());
        let (jx, jy) = chain.jet(2);
        let jet = XyJet {
            x: jx.clone(),
            y: jy.clone(),
            order: 2,
        };
        let m = extend_jet(&jet, false).unwrap();
        m.certify_area_preserving().unwrap();
        let (fx, fy) = m.jet(2);
        assert!(fx.sub(&jx).is_zero(), "2-jet x mismatch");
        assert!(fy.sub(&jy).is_zero(), "2-jet y mismatch");
        // fully expanded determinant for this small chain
        if let Some((ex, ey)) = m.expand(64) {
            let det = ex
                .d_dx()
                .mul(&ey.d_dy(), None)
                .sub(&ex.d_dy().mul(&ey.d_dx(), None));
            let mut one = RatPoly2::zero(det.deg());
            one.set_coeff(0, 0, rat(1, 1));
            assert!(det.sub(&one).is_zero(), "expanded det != 1");
        } else {
            panic!("expected expandable chain at order 2");
        }
    }

    #[test]
    fn odd_jet_extension() {
        // odd area-preserving 3-jet: rotation composed with an odd shear (d = 3)
        let rot = PlanarPolyMap::rotation(rat(3, 5), rat(4, 5)).unwrap();
        let mut chain = shear_map(rat(1, 2), rat(1, 1), rat(1, 3), 3);
        chain.factors.extend(rot.factors.clone());
        let (jx, jy) = chain.jet(3);
        let jet = XyJet {
            x: jx.clone(),
            y: jy.clone(),
            order: 3,
        };
        assert!(jet.is_odd());
        let m = extend_jet(&jet, true).unwrap();
        assert!(m.is_odd());
        m.certify_area_preserving().unwrap();
        let (fx, fy) = m.jet(3);
        assert!(fx.sub(&jx).is_zero());
        assert!(fy.sub(&jy).is_zero());
    }

    #[test]
    fn generating_identity_and_hand_case() {
        let ctx = Ctx::default();
        // u = 0 -> identity
        let u0 = BiSeries::zero(ctx, 6);
        let g = generating_map(ctx, &u0, 3).unwrap();
        let x = BiSeries::monomial(ctx, 6, 1, 0, ctx.one());
        let y = BiSeries::monomial(ctx, 6, 0, 1, ctx.one());
        assert!(g.x_series.sub(&x).unwrap().is_zero());
        assert!(g.y_series.sub(&y).unwrap().is_zero());
        assert!(g.area_residual == 0.0);

        // u = x^2 y'^2, N = 3: two-step fixed point by hand:
        //   y' = y - 2 x y'^2  => y' = y - 2 x y^2 + 8 x^2 y^3 + O(6)
        //   x' = x + 2 x^2 y'  => x' = x + 2 x^2 y - 4 x^3 y^2 + O(6)
        let mut u = BiSeries::zero(ctx, 5);
        u.set_coeff(2, 2, ctx.one());
        let g = generating_map(ctx, &u, 3).unwrap();
        assert!((g.y_series.coeff(1, 2).real().to_f64() + 2.0).abs() < 1e-70);
        assert!((g.y_series.coeff(2, 3).real().to_f64() - 8.0).abs() < 1e-70);
        assert!((g.x_series.coeff(2, 1).real().to_f64() - 2.0).abs() < 1e-70);
        assert!((g.x_series.coeff(3, 2).real().to_f64() + 4.0).abs() < 1e-70);
        assert!(g.area_residual < 1e-60, "area residual {}", g.area_residual);
    }
}

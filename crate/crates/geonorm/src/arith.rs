//! Continued-fraction machinery: big-integer convergents, Bruno partial
//! sums, super-Liouville witnesses, and the constructive generation of odd
//! super-Liouville rotation numbers.

use crate::error::{Error, Result};
use crate::num::Ctx;
use rug::ops::CompleteRound;
use rug::{Complete, Float, Integer};

/// Hard ceiling for q in q!: factorials above this are refused.
pub const DEFAULT_FACTORIAL_BUDGET: u64 = 5000;

/// A continued fraction [0; r_1, r_2, ...] with big-integer partial
/// quotients r_k >= 1 and derived convergents p_k / q_k.
///
/// Initialization is the standard one, p_0 = 0, q_0 = 1, p_1 = 1, q_1 = r_1,
/// so that p_k/q_k -> omega and q_k p_{k-1} - p_k q_{k-1} = (-1)^k hold.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    quotients: Vec<Integer>,
    p: Vec<Integer>,
    q: Vec<Integer>,
}

impl ContinuedFraction {
    pub fn new(quotients: Vec<Integer>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::Invalid("continued fraction needs at least one quotient".into()));
        }
        if quotients.iter().any(|r| *r < 1) {
            return Err(Error::Invalid("partial quotients must be >= 1".into()));
        }
        let mut cf = ContinuedFraction {
            quotients: Vec::new(),
            p: vec![Integer::from(0)],
            q: vec![Integer::from(1)],
        };
        for r in quotients {
            cf.push(r);
        }
        Ok(cf)
    }

    pub fn from_u64(quotients: &[u64]) -> Result<Self> {
        Self::new(quotients.iter().map(|&r| Integer::from(r)).collect())
    }

    pub fn push(&mut self, r: Integer) {
        let k = self.quotients.len() + 1;
        if k == 1 {
            self.p.push(Integer::from(1));
            self.q.push(r.clone());
        } else {
            let pk = (&r * &self.p[k - 1]).complete() + &self.p[k - 2];
            let qk = (&r * &self.q[k - 1]).complete() + &self.q[k - 2];
            self.p.push(pk);
            self.q.push(qk);
        }
        self.quotients.push(r);
    }

    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    pub fn quotients(&self) -> &[Integer] {
        &self.quotients
    }

    pub fn p(&self, k: usize) -> &Integer {
        &self.p[k]
    }

    pub fn q(&self, k: usize) -> &Integer {
        &self.q[k]
    }

    /// Convergents (p_k, q_k) for k = 1..=depth.
    pub fn convergents(&self, depth: usize) -> Result<Vec<(Integer, Integer)>> {
        if depth > self.depth() {
            return Err(Error::Invalid(format!(
                "depth {depth} exceeds available quotients {}",
                self.depth()
            )));
        }
        Ok((1..=depth).map(|k| (self.p[k].clone(), self.q[k].clone())).collect())
    }

    /// q_k p_{k-1} - p_k q_{k-1}, which must equal (-1)^k.
    pub fn determinant(&self, k: usize) -> Integer {
        (&self.q[k] * &self.p[k - 1]).complete() - (&self.p[k] * &self.q[k - 1]).complete()
    }

    /// Bits needed so that the value resolves the deepest convergent:
    /// 2 log2(q_depth) + 64.
    pub fn required_prec(&self) -> u32 {
        let bits = self.q[self.depth()].significant_bits();
        (2 * bits + 64).max(crate::num::MIN_PREC)
    }

    /// The value of the finite continued fraction as p_K/q_K at the given
    /// precision (within 1/q_K^2 of the infinite expansion).
    pub fn value(&self, prec: u32) -> Float {
        let k = self.depth();
        Float::with_val(prec, &self.p[k]) / Float::with_val(prec, &self.q[k])
    }

    /// Partial sums S_K = sum_{k=1..K} ln(q_{k+1}) / q_k of the Bruno series.
    pub fn bruno_partial_sums(&self, depth: usize) -> Result<Vec<f64>> {
        if depth + 1 > self.depth() {
            return Err(Error::Invalid(format!(
                "need {} quotients for depth {depth}, have {}",
                depth + 1,
                self.depth()
            )));
        }
        let prec = 64;
        let mut acc = Float::new(prec);
        let mut out = Vec::with_capacity(depth);
        for k in 1..=depth {
            let lnq = Float::with_val(prec, &self.q[k + 1]).ln();
            acc += lnq / Float::with_val(prec, &self.q[k]);
            out.push(acc.to_f64());
        }
        Ok(out)
    }
}

/// dist(x, Z) for a positive-precision float.
pub fn dist_to_integer(x: &Float) -> Float {
    let _prec = x.prec();
    let nearest = x.clone().round();
    (x - nearest).abs()
}

/// Report for one exponent n: |1 - lambda^n| together with theta = dist(n omega, Z).
#[derive(Clone, Debug)]
pub struct PowerDistance {
    pub n: u64,
    pub distance: Float,
    pub theta: Float,
}

/// |1 - lambda^n| = 2 |sin(pi n omega)| and theta = dist(n omega, Z).
///
/// The chain 4 theta <= |1 - lambda^n| <= 7 theta holds whenever theta <= 1/2.
pub fn lambda_power_distance(ctx: Ctx, omega: &Float, n: u64) -> Result<PowerDistance> {
    let prec = omega.prec().max(ctx.prec);
    let n_omega = omega * Float::with_val(prec, n);
    // if n*omega is so large that its ulp exceeds the fractional part, the
    // reduction mod 1 is meaningless
    let exp = n_omega.get_exp().unwrap_or(0);
    if exp > 0 && (exp as u32) + 8 > prec {
        return Err(Error::PrecisionExhausted(format!(
            "n*omega needs {} bits, have {}",
            exp as u32 + 8,
            prec
        )));
    }
    let theta = dist_to_integer(&n_omega);
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let distance = (pi * &theta).sin().abs() * 2u32;
    Ok(PowerDistance { n, distance, theta })
}

/// Witness report for the super-Liouville test at one k.
#[derive(Clone, Debug)]
pub struct LiouvilleWitness {
    pub k: u64,
    /// |1 - lambda^k| * k!  (witness iff <= 1)
    pub margin: f64,
    pub is_witness: bool,
    pub decided: bool,
}

/// Exhaustive scan of k = 1..=k_max for |lambda^k - 1|^{-1} >= k!.
///
/// Exponents whose resolution exceeds the precision of omega are flagged
/// undecided rather than misreported.
pub fn super_liouville_witnesses(ctx: Ctx, omega: &Float, k_max: u64) -> Vec<LiouvilleWitness> {
    let mut out = Vec::new();
    let mut factorial = Integer::from(1);
    for k in 1..=k_max {
        factorial *= k;
        match lambda_power_distance(ctx, omega, k) {
            Ok(pd) => {
                let prec = pd.distance.prec();
                let margin = (Float::with_val(prec, &factorial) * &pd.distance).to_f64();
                out.push(LiouvilleWitness {
                    k,
                    margin,
                    is_witness: margin <= 1.0,
                    decided: true,
                });
            }
            Err(_) => out.push(LiouvilleWitness {
                k,
                margin: f64::NAN,
                is_witness: false,
                decided: false,
            }),
        }
    }
    out
}

/// Same scan against 2*omega: witnesses of the odd-class condition
/// |1 - (lambda^2)^k|^{-1} >= k!.
pub fn doubled_super_liouville_witnesses(ctx: Ctx, omega: &Float, k_max: u64) -> Vec<LiouvilleWitness> {
    let prec = omega.prec();
    let doubled = omega * Float::with_val(prec, 2);
    super_liouville_witnesses(ctx, &doubled, k_max)
}

pub fn factorial_checked(n: u64, budget: u64) -> Result<Integer> {
    if n > budget {
        return Err(Error::FactorialBudget(n, budget));
    }
    Ok(Integer::factorial(n as u32).complete())
}

/// Outcome of the odd super-Liouville construction.
#[derive(Clone, Debug)]
pub struct OddLiouville {
    pub cf: ContinuedFraction,
    /// Index of the last seed quotient.
    pub seed_len: usize,
    /// For each constructed k with q_k odd: (k, q_k, dist(q_k omega, Z) * 7 q_k!),
    /// which must be <= 1.
    pub certificates: Vec<(usize, Integer, f64)>,
}

/// Extend a seed continued fraction by r_k = 7 q_{k-1}! + eps_k, with
/// eps_k in {0, 1} chosen so that q_k is odd.
pub fn odd_super_liouville_construct(
    seed: &[u64],
    depth: usize,
    budget: u64,
) -> Result<OddLiouville> {
    let mut cf = ContinuedFraction::from_u64(seed)?;
    let ell = cf.depth();
    if depth < ell {
        return Err(Error::Invalid("depth smaller than seed length".into()));
    }
    for k in (ell + 1)..=depth {
        let q_prev = cf.q(k - 1).clone();
        let q_prev_u64 = q_prev.to_u64().ok_or({
            Error::FactorialBudget(u64::MAX, budget)
        })?;
        let fact = factorial_checked(q_prev_u64, budget)?;
        let base = fact * 7u32;
        // q_k = r_k q_{k-1} + q_{k-2}; pick eps so q_k is odd
        let q0 = (&base * &q_prev).complete() + cf.q(k - 2);
        let eps = if q0.is_odd() { 0u32 } else { 1u32 };
        let r = base + eps;
        cf.push(r);
        debug_assert!(cf.q(k).is_odd());
    }
    // verify dist(q_k omega, Z) <= 1/(7 q_k!) for constructed odd q_k
    let prec = cf.required_prec();
    let omega = cf.value(prec);
    let ctx = Ctx::new(prec.max(crate::num::MIN_PREC));
    let mut certificates = Vec::new();
    for k in ell..cf.depth() {
        let qk = cf.q(k).clone();
        if !qk.is_odd() {
            continue;
        }
        let qk_u64 = match qk.to_u64() {
            Some(v) if v <= budget => v,
            _ => continue, // too large to certify numerically; guaranteed by construction
        };
        let pd = lambda_power_distance(ctx, &omega, qk_u64)?;
        let bound = Float::with_val(prec, factorial_checked(qk_u64, budget)?) * 7u32;
        let margin = (&pd.theta * &bound).complete(prec).to_f64();
        certificates.push((k, qk, margin));
    }
    Ok(OddLiouville {
        cf,
        seed_len: ell,
        certificates,
    })
}

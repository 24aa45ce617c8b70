//! Shared fixtures for the integration suites: the golden rotation number
//! and seeded random jet generation.
#![allow(dead_code)]

use geonorm::dynamics::DiffeoJet;
use geonorm::num::Ctx;
use geonorm::series::UniSeries;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

pub fn golden_omega(prec: u32) -> Float {
    (Float::with_val(prec, 5).sqrt() - 1u32) / 2u32
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// |coefficient| <= 1, nonlinear degrees 2..=max_degree all populated.
pub fn random_jet(ctx: Ctx, rng: &mut ChaCha8Rng, order: usize, max_degree: usize) -> DiffeoJet {
    let omega = golden_omega(ctx.prec);
    let mut jet = DiffeoJet::rotation(ctx, omega, order);
    let bound = 1.0 / std::f64::consts::SQRT_2;
    for d in 2..=max_degree.min(order) {
        for k in 0..=d {
            let re = rng.gen_range(-bound..bound);
            let im = rng.gen_range(-bound..bound);
            jet.set_coeff(d - k, k, ctx.c_f64(re, im)).unwrap();
        }
    }
    jet
}

/// Odd jet: only odd total degrees (here just degree 3) populated.
pub fn random_odd_jet(ctx: Ctx, rng: &mut ChaCha8Rng, order: usize) -> DiffeoJet {
    let omega = golden_omega(ctx.prec);
    let mut jet = DiffeoJet::rotation(ctx, omega, order);
    let bound = 1.0 / std::f64::consts::SQRT_2;
    for k in 0..=3 {
        let re = rng.gen_range(-bound..bound);
        let im = rng.gen_range(-bound..bound);
        jet.set_coeff(3 - k, k, ctx.c_f64(re, im)).unwrap();
    }
    jet
}

/// Real series rho = O(R^2) with small random coefficients.
pub fn random_rho(ctx: Ctx, rng: &mut ChaCha8Rng, order: usize) -> UniSeries {
    let mut rho = UniSeries::zero(ctx, order);
    for n in 2..=order {
        rho.set_coeff(n, ctx.c_f64(rng.gen_range(-0.5..0.5), 0.0));
    }
    rho.mark_real()
}

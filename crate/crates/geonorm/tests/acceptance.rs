//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//!
//! Criterion 7's second factorial witness runs behind `--ignored`:
//! `cargo test --test acceptance -- --ignored --nocapture`.

mod common;

use common::{golden_omega, random_jet, random_odd_jet, random_rho, rng};
use geonorm::arith::{odd_super_liouville_construct, ContinuedFraction};
use geonorm::dynamics::{
    balanced, geometric_normal_form, is_formally_conservative,
    linearize_holomorphic, morse_phi, orbit_conjugator, resonant_free, resonant_part,
    solve_admissible, tau_via_ell, tau_via_recursion, DiffeoJet,
};
use geonorm::family::{ipm_degree_check, Target};
use geonorm::involutions::{conjugation_residual, conjugator_of, conjugators_between, v_of};
use geonorm::models::{
    classic_map, covering_identity_check, odd_siegel_divergent, siegel_divergent, tau_divergent,
    ClassicKind,
};
use geonorm::num::Ctx;
use geonorm::series::{compose_uni_bi, UniSeries};
use rug::ops::CompleteRound;
use rug::Rational;
use std::time::Instant;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: Conjugacy residual of resonant-free and balanced pairs on 20 random
/// jets (degrees <= 4, |coeff| <= 1), golden omega, N = 12, 256 bits:
/// residual <= 1e-25, in at most 10 s.
#[test]
fn criterion_01_conjugacy_residual() {
    let ctx = Ctx::new(256);
    let mut rng = rng(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let jet = random_jet(ctx, &mut rng, 12, 4);
        let pair = resonant_free(&jet, 12).unwrap();
        worst = worst.max(pair.residual_norm.to_f64());
        let bal = balanced(&jet, 12, 1e-20).unwrap();
        worst = worst.max(bal.pair.residual_norm.to_f64());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "1 (conjugacy residual)",
        worst <= 1e-25 && elapsed <= 10.0,
        &format!("worst residual {worst:.3e}, {elapsed:.2} s for 20 maps"),
    );
}

/// Criterion 2: rho-bijection round trip and G-orbit identity at 1e-25 on the same
/// kind of sample.
#[test]
fn criterion_02_bijection_and_orbit() {
    let ctx = Ctx::new(256);
    let mut rng = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let jet = random_jet(ctx, &mut rng, 12, 4);
        let rho = random_rho(ctx, &mut rng, 6);
        // resonant_part(solve(F, rho)) = rho
        let pair = solve_admissible(&jet, &rho, 12).unwrap();
        let back = resonant_part(&pair.l);
        for n in 2..=6 {
            let d = (back.coeff(n) - rho.coeff(n)).complete((256, 256));
            worst = worst.max(geonorm::num::sup_norm(&d).to_f64());
        }
        // solve(F, resonant_part(L)) = L
        let again = solve_admissible(&jet, &resonant_part(&pair.l), 12).unwrap();
        worst = worst.max(again.l.sub(&pair.l).unwrap().max_abs().to_f64());
        // orbit: the resonant-free pair and the rho-pair are conjugate by g
        let base = resonant_free(&jet, 12).unwrap();
        let g = orbit_conjugator(&base.l, &pair.l).unwrap();
        let moved = compose_uni_bi(&g, &base.l).unwrap();
        worst = worst.max(moved.sub(&pair.l).unwrap().max_abs().to_f64());
    }
    report(
        "2 (rho-bijection + orbit)",
        worst <= 1e-25,
        &format!("worst deviation {worst:.3e}"),
    );
}

/// Criterion 3: tau_via_ell == tau_via_recursion and tau o tau = id at 1e-25, order 12.
#[test]
fn criterion_03_involution_two_paths() {
    let ctx = Ctx::new(256);
    let mut rng = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let jet = random_jet(ctx, &mut rng, 12, 4);
        let pair = resonant_free(&jet, 12).unwrap();
        let t1 = tau_via_ell(&pair.l).unwrap();
        let t2 = tau_via_recursion(&pair.l).unwrap();
        let n = t1.tau.order().min(t2.tau.order());
        worst = worst.max(
            t1.tau
                .truncated(n)
                .sub(&t2.tau.truncated(n))
                .unwrap()
                .max_abs()
                .to_f64(),
        );
        worst = worst.max(t1.involution_defect().unwrap().to_f64());
    }
    report(
        "3 (two-path involution)",
        worst <= 1e-25,
        &format!("worst deviation {worst:.3e}"),
    );
}

/// Criterion 4: Balanced identity diagonal(L_F) = -z tau_F(z) at 1e-25; for odd F,
/// tau_F + z vanishes at 1e-30 and L_F(-z,-w) = L_F(z,w).
#[test]
fn criterion_04_balanced_identity() {
    let ctx = Ctx::new(256);
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let jet = random_jet(ctx, &mut rng, 12, 4);
        let data = balanced(&jet, 12, 1e-20).unwrap();
        let diag = data.pair.l.diagonal();
        // -z tau(z)
        let mut h = UniSeries::zero(ctx, 12);
        for n in 1..=data.tau.tau.order() {
            if n < 12 {
                h.set_coeff(n + 1, -data.tau.tau.coeff(n).clone());
            }
        }
        // the top diagonal coefficient pairs with the undetermined tau top
        let d = diag.truncated(11).sub(&h.truncated(11)).unwrap();
        worst = worst.max(d.max_abs().to_f64());
    }
    let mut worst_odd: f64 = 0.0;
    for _ in 0..10 {
        let jet = random_odd_jet(ctx, &mut rng, 12);
        assert!(jet.is_odd());
        let data = balanced(&jet, 12, 1e-20).unwrap();
        // tau = -z exactly
        let mut tau_plus_z = data.tau.tau.clone();
        tau_plus_z.set_coeff(1, (tau_plus_z.coeff(1) + 1u32).complete((256, 256)));
        worst_odd = worst_odd.max(tau_plus_z.max_abs().to_f64());
        // L_F even
        let refl = data.pair.l.reflect();
        worst_odd = worst_odd.max(refl.sub(&data.pair.l).unwrap().max_abs().to_f64());
    }
    report(
        "4 (balanced identity)",
        worst <= 1e-25 && worst_odd <= 1e-30,
        &format!("generic {worst:.3e}, odd {worst_odd:.3e}"),
    );
}

/// Criterion 5: Morse/normal form: || |Phi|^2 - L_F || <= 1e-25 and off-diagonal part
/// of |Phi o F o Phi^{-1}|^2 <= 1e-20 through order 10.
#[test]
fn criterion_05_morse_normal_form() {
    let ctx = Ctx::new(256);
    let mut rng = rng(5);
    let mut worst_sq: f64 = 0.0;
    let mut worst_off: f64 = 0.0;
    for _ in 0..5 {
        let jet = random_jet(ctx, &mut rng, 10, 4);
        let data = balanced(&jet, 10, 1e-20).unwrap();
        let phi = morse_phi(&data.pair.l).unwrap();
        worst_sq = worst_sq.max(
            phi.square_modulus()
                .sub(&data.pair.l)
                .unwrap()
                .max_abs()
                .to_f64(),
        );
        let (_g, offdiag) = geometric_normal_form(&jet, &phi).unwrap();
        worst_off = worst_off.max(offdiag.to_f64());
    }
    report(
        "5 (Morse / normal form)",
        worst_sq <= 1e-25 && worst_off <= 1e-20,
        &format!("modulus {worst_sq:.3e}, offdiag {worst_off:.3e}"),
    );
}

/// Criterion 6: Holomorphic conservativity at golden omega: Gamma - Id <= 1e-25 at
/// order 12 for the quadratic and ramified-cover maps, h o F = lambda h to
/// 1e-25, and the covering identity for d = 2, 3 at order 8 to 1e-25.
#[test]
fn criterion_06_holomorphic_conservativity() {
    let ctx = Ctx::new(256);
    let omega = golden_omega(256);
    let mut worst: f64 = 0.0;
    for kind in [
        ClassicKind::YoccozQuadratic,
        ClassicKind::RamifiedCover(2),
        ClassicKind::RamifiedCover(3),
    ] {
        let jet = classic_map(ctx, omega.clone(), kind, 12).unwrap();
        let rep = is_formally_conservative(&jet, 12, 1e-25).unwrap();
        worst = worst.max(rep.gamma_deviation.to_f64());
        let lin = linearize_holomorphic(&jet, 12).unwrap();
        worst = worst.max(lin.residual.to_f64());
    }
    let mut worst_cover: f64 = 0.0;
    for d in [2u32, 3] {
        worst_cover = worst_cover.max(covering_identity_check(ctx, &omega, d, 8).unwrap());
    }
    report(
        "6 (holomorphic conservativity)",
        worst <= 1e-25 && worst_cover <= 1e-25,
        &format!("Gamma/h residual {worst:.3e}, covering {worst_cover:.3e}"),
    );
}

/// Criterion 7: Siegel inequality at the first witness (q_2 = 3 from seed [2,1]):
/// |L_41| >= 2 * 3! * |cos 2 pi omega|, the tau variant |tau_4| >= the same
/// bound, and the odd variant |L_71| >= the same bound; each within 5 s.
#[test]
fn criterion_07_factorial_witnesses_p1() {
    let built = odd_super_liouville_construct(&[2, 1], 3, 5000).unwrap();
    let prec = built.cf.required_prec().max(256);
    let ctx = Ctx::new(prec);
    let omega = built.cf.value(prec);

    let t0 = Instant::now();
    let jet = DiffeoJet::rotation(ctx, omega.clone(), 1);
    let ex = siegel_divergent(ctx, &built.cf, &jet, 1, true).unwrap();
    let t_siegel = t0.elapsed().as_secs_f64();
    let w = &ex.witnesses[0];
    let ok_siegel = w.n == 3 && w.satisfied && t_siegel <= 5.0;

    let t0 = Instant::now();
    let (ex_tau, _tau) = tau_divergent(ctx, &built.cf, 1).unwrap();
    let t_tau = t0.elapsed().as_secs_f64();
    let wt = &ex_tau.witnesses[0];
    let ok_tau = wt.n == 3 && wt.satisfied && t_tau <= 5.0;

    let t0 = Instant::now();
    let jet_odd = DiffeoJet::rotation(ctx, omega, 1);
    let ex_odd = odd_siegel_divergent(ctx, &built.cf, &jet_odd, 1).unwrap();
    let t_odd = t0.elapsed().as_secs_f64();
    let wo = &ex_odd.witnesses[0];
    let ok_odd = wo.n == 3 && wo.satisfied && t_odd <= 5.0;

    report(
        "7 (factorial witnesses, p = 1)",
        ok_siegel && ok_tau && ok_odd,
        &format!(
            "|L_41| = {:.3e} >= {:.3e} ({t_siegel:.2} s); |tau_4| = {:.3e} >= {:.3e} ({t_tau:.2} s); |L_71| = {:.3e} >= {:.3e} ({t_odd:.2} s)",
            w.achieved, w.bound, wt.achieved, wt.bound, wo.achieved, wo.bound
        ),
    );
}

/// 7 (slow). The p = 2 witness: n_2 = q_3 = 131, order 133. The divisor
/// |1 - lambda^131| ~ 1e-225 forces the precision above the nominal floor
/// of 2048 bits: the small-divisor guard 2^{-prec/4} admits it from about
/// 3100 bits, so the run uses 4096. Budget: 10 minutes.
#[test]
#[ignore]
fn criterion_07_siegel_p2_slow() {
    let start = Instant::now();
    let built = odd_super_liouville_construct(&[2, 1], 4, 5000).unwrap();
    let prec = built.cf.required_prec().max(4096);
    let ctx = Ctx::new(prec);
    let omega = built.cf.value(prec);
    let jet = DiffeoJet::rotation(ctx, omega, 1);
    let ex = siegel_divergent(ctx, &built.cf, &jet, 2, false).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let w2 = ex.witnesses.iter().find(|w| w.p == 2).expect("p = 2 witness");
    // bound 2 * 131! |cos 2 pi omega| compared in f64 via logarithms is
    // meaningless; Witness stores f64 which covers 131! ~ 1e220 comfortably
    report(
        "7-slow (Siegel p = 2)",
        w2.n == 131 && w2.satisfied && elapsed <= 600.0,
        &format!(
            "|L_132,1| = {:.6e} >= {:.6e} at order {}, {elapsed:.1} s",
            w2.achieved, w2.bound, ex.order
        ),
    );
}

/// Criterion 8: IPM degree bounds on 10 random affine families through r+s <= 8,
/// holdout residual <= 1e-20, within 60 s.
#[test]
fn criterion_08_ipm_degree_bounds() {
    let ctx = Ctx::new(256);
    let mut rng = rng(8);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for _ in 0..10 {
        let f0 = random_jet(ctx, &mut rng, 8, 4);
        let f1 = random_jet(ctx, &mut rng, 8, 4);
        let rep = ipm_degree_check(
            &f0,
            &f1,
            8,
            &[Target::LStar, Target::Gamma, Target::Tau, Target::LBalanced],
            1e-20,
        )
        .unwrap();
        worst = worst.max(rep.max_residual);
        checked += rep.entries.len();
        assert!(rep.all_within, "bound violation: {:?}",
            rep.entries.iter().find(|e| !e.within_bound));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "8 (IPM degree bounds)",
        worst <= 1e-20 && elapsed <= 60.0,
        &format!("{checked} coefficients, worst holdout {worst:.3e}, {elapsed:.1} s"),
    );
}

/// Criterion 9: Involution toolkit identities on 10 random involutions of order 12 at
/// 1e-30: tau = U^{-1} sigma U, E even, V o tau = V.
#[test]
fn criterion_09_involution_toolkit() {
    let ctx = Ctx::new(256);
    let mut rng = rng(9);
    let order = 12;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let mut phi = UniSeries::identity(ctx, order);
        for n in 2..=order {
            phi.set_coeff(n, ctx.c_f64(rand::Rng::gen_range(&mut rng, -0.5..0.5), 0.0));
        }
        let sigma = UniSeries::identity(ctx, order).neg();
        let tau = phi
            .invert()
            .unwrap()
            .compose(&sigma.compose(&phi).unwrap())
            .unwrap();
        let cj = conjugator_of(&tau, 1e-28).unwrap();
        let rebuilt = cj
            .u
            .invert()
            .unwrap()
            .compose(&sigma.compose(&cj.u).unwrap())
            .unwrap();
        worst = worst.max(rebuilt.sub(&tau).unwrap().max_abs().to_f64());
        worst = worst.max(cj.e.odd_part().max_abs().to_f64());
        let v = v_of(&tau).unwrap();
        worst = worst.max(v.compose(&tau).unwrap().sub(&v).unwrap().max_abs().to_f64());
        // a conjugacy between two involutions
        let mut gamma = UniSeries::identity(ctx, order);
        gamma.set_coeff(3, ctx.c_f64(0.5, 0.0));
        let psi = conjugators_between(&sigma, &tau, &gamma, 1e-28).unwrap();
        worst = worst.max(conjugation_residual(&sigma, &tau, &psi).unwrap().to_f64());
    }
    report(
        "9 (involution toolkit)",
        worst <= 1e-30,
        &format!("worst residual {worst:.3e}"),
    );
}

/// Criterion 10: Area-preserving machinery: exact (zero-tolerance) Jacobian
/// certificates for shears and extended jets, and exact N-jet reproduction
/// for N <= 4 including the odd case.
#[test]
fn criterion_10_area_preserving_exact() {
    use geonorm::areamap::{extend_jet, shear_map, PlanarPolyMap, XyJet};
    let rat = |n: i64, d: u64| Rational::from((n, d));
    // shears: symbolic determinant identically 1
    let mut all_exact = true;
    for (a, b, c, d) in [
        (rat(2, 3), rat(-1, 2), rat(5, 11), 3usize),
        (rat(1, 1), rat(4, 7), rat(-3, 5), 4),
        (rat(0, 1), rat(1, 1), rat(7, 13), 2),
    ] {
        let m = shear_map(a, b, c, d);
        all_exact &= m.factors[0].det_minus_one().is_zero();
    }
    // extended jets for N = 1..=4, built from exact area-preserving chains
    let rot = PlanarPolyMap::rotation(rat(3, 5), rat(4, 5)).unwrap();
    let mut jets_exact = true;
    for n in 1..=4usize {
        let mut chain = shear_map(rat(1, 2), rat(1, 1), rat(1, 3), n.max(2));
        chain.factors.extend(shear_map(rat(1, 1), rat(0, 1), rat(-2, 7), 2).factors);
        chain.factors.extend(rot.factors.clone());
        let (jx, jy) = chain.jet(n);
        let jet = XyJet {
            x: jx.clone(),
            y: jy.clone(),
            order: n,
        };
        let m = extend_jet(&jet, false).unwrap();
        m.certify_area_preserving().unwrap();
        let (fx, fy) = m.jet(n);
        jets_exact &= fx.sub(&jx).is_zero() && fy.sub(&jy).is_zero();
    }
    // odd case: odd chain, odd extension
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
    let (fx, fy) = m.jet(3);
    let odd_ok = m.is_odd() && fx.sub(&jx).is_zero() && fy.sub(&jy).is_zero();
    report(
        "10 (area-preserving, exact)",
        all_exact && jets_exact && odd_ok,
        "shear determinants and jets exact over Q",
    );
}

/// Criterion 11: Arithmetic: exact determinant identity; the constructed odd
/// super-Liouville omega satisfies dist(q_k omega, Z) <= 1/(7 q_k!) for
/// k <= 3 with q_k odd; golden-mean Bruno partial sums bounded by 3 at
/// depth 10.
///
/// The third clause cannot hold: with the sum convention the operation is
/// specified to use (S_K = sum_{k=1..K} ln(q_{k+1})/q_k, whose depth-1 term
/// is ln(q_2)/q_1), the golden-mean value is S_10 = 3.1728... and even the
/// full series only converges to ~3.2861. The clause is asserted as stated
/// and is expected to fail; see the repository notes for the analysis.
#[test]
fn criterion_11_arithmetic() {
    // determinant identity, exact big integers
    let cf = ContinuedFraction::from_u64(&[2, 1, 43, 7, 12, 1, 9]).unwrap();
    let mut det_ok = true;
    for k in 2..=cf.depth() {
        let want = if k % 2 == 0 { 1 } else { -1 };
        det_ok &= cf.determinant(k) == want;
    }
    report(
        "11a (determinant identity)",
        det_ok,
        "q_k p_{k-1} - p_k q_{k-1} = (-1)^k exactly",
    );

    // constructed odd super-Liouville certificates for k <= 3, q_k odd
    let built = odd_super_liouville_construct(&[2, 1], 4, 5000).unwrap();
    let mut cert_ok = true;
    let mut seen = 0;
    for (k, q, margin) in &built.certificates {
        if *k <= 3 {
            assert!(q.is_odd());
            cert_ok &= *margin <= 1.0;
            seen += 1;
        }
    }
    report(
        "11b (odd super-Liouville certificates)",
        cert_ok && seen >= 2,
        &format!("{seen} certified odd q_k with 7 q_k! dist(q_k omega, Z) <= 1"),
    );

    // golden-mean Bruno partial sums at depth 10 against the stated bound 3
    let golden = ContinuedFraction::from_u64(&[1; 12]).unwrap();
    let sums = golden.bruno_partial_sums(10).unwrap();
    let s10 = sums[9];
    report(
        "11c (golden Bruno bound 3 at depth 10)",
        s10 < 3.0,
        &format!("S_10 = {s10:.4} (series limit ~3.2861; the stated bound 3 is unattainable under the pinned convention)"),
    );
}

//! Batch front end: admissible pairs, balanced series, involutions,
//! normalizations, arithmetic constructions, example generators, jet
//! extension, family degree checks and growth profiles.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 usage/data error, 2 guard failure (small divisors, precision,
//! factorial budget).

use clap::{Args, Parser, Subcommand, ValueEnum};
use geonorm::arith::{odd_super_liouville_construct, ContinuedFraction, DEFAULT_FACTORIAL_BUDGET};
use geonorm::diagnostics::{growth_profile_bi, growth_profile_uni};
use geonorm::dynamics::{
    balanced, geometric_normal_form, is_formally_conservative, linearize_holomorphic, morse_phi,
    resonant_free, solve_admissible, solve_admissible_chi, tau_via_ell, tau_via_recursion,
    conjugacy_residual,
};
use geonorm::family::Target;
use geonorm::io;
use geonorm::models::{
    classic_map, covering_identity_check, odd_siegel_divergent, siegel_divergent, tau_divergent,
    ClassicKind,
};
use geonorm::num::Ctx;
use geonorm::series::UniSeries;
use rug::Integer;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "geonorm", version, about = "formal geometric normalization toolkit")]
struct Cli {
    /// Working precision in binary digits.
    #[arg(long, global = true, default_value_t = 256)]
    precision_bits: u32,

    /// Residual tolerance for verification subcommands.
    #[arg(long, global = true, default_value_t = 1e-25)]
    tol: f64,

    /// Output format for tabular data.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for randomized generation (ipm-check --random).
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Worker threads (reserved; computations are single-threaded).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct JetInput {
    /// Path to a DiffeoJet JSON file.
    #[arg(long)]
    input: PathBuf,

    /// Truncation order.
    #[arg(long)]
    order: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the admissible pair with prescribed resonant part (default 0).
    Admissible {
        #[command(flatten)]
        jet: JetInput,
        /// Univariate JSON series for rho (vars "R").
        #[arg(long)]
        rho: Option<PathBuf>,
        /// Univariate JSON series for chi (vars "R"); overrides --rho.
        #[arg(long)]
        chi: Option<PathBuf>,
    },
    /// Balanced admissible pair and foliation involution.
    Balanced {
        #[command(flatten)]
        jet: JetInput,
    },
    /// Foliation involution by both constructions.
    Involution {
        #[command(flatten)]
        jet: JetInput,
        /// Run the one-variable involution toolkit self-test instead.
        #[arg(long)]
        appendix_b: bool,
    },
    /// Morse normalization Phi of the balanced series and the normal form.
    Normalize {
        #[command(flatten)]
        jet: JetInput,
    },
    /// Verify the conjugacy residual of the resonant-free pair.
    Verify {
        #[command(flatten)]
        jet: JetInput,
    },
    /// Linearize a holomorphic jet.
    Linearize {
        #[command(flatten)]
        jet: JetInput,
    },
    /// Test formal conservativity (Gamma = Id).
    Conservative {
        #[command(flatten)]
        jet: JetInput,
    },
    /// Convergents and Bruno partial sums of a continued fraction.
    Bruno {
        /// Comma-separated partial quotients, e.g. 2,1,43.
        #[arg(long)]
        cf: String,
        /// Partial sums depth.
        #[arg(long)]
        depth: usize,
    },
    /// Construct an odd super-Liouville number from a seed.
    OddLiouville {
        #[arg(long)]
        seed: String,
        #[arg(long)]
        depth: usize,
    },
    /// Extend an area-preserving N-jet to a polynomial area-preserving map.
    JetExtend {
        /// Path to an (x, y)-jet JSON with rational entries.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        odd: bool,
    },
    /// Siegel-style divergent example.
    ExampleSiegel {
        #[arg(long)]
        seed_cf: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
    },
    /// Divergent foliation involution example.
    ExampleTau {
        #[arg(long)]
        seed_cf: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
    },
    /// Odd-symmetric divergent example.
    ExampleOdd {
        #[arg(long)]
        seed_cf: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
    },
    /// Classical holomorphic models.
    ExampleClassic {
        #[arg(long)]
        omega: String,
        /// quadratic | geyer:d | exp | cover:d
        #[arg(long)]
        kind: String,
        #[arg(long)]
        order: usize,
    },
    /// Interpolation check of the polynomial-in-t degree bounds.
    IpmCheck {
        #[arg(long)]
        f0: PathBuf,
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        order: usize,
        /// Comma-separated targets: lstar,gamma,tau,lbalanced.
        #[arg(long, default_value = "lstar,gamma")]
        targets: String,
        /// Number of sample nodes (clamped below at the required minimum).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Coefficient-growth profile of a series JSON.
    Growth {
        #[arg(long)]
        input: PathBuf,
    },
}

fn parse_quotients(s: &str) -> anyhow::Result<ContinuedFraction> {
    let qs: Result<Vec<Integer>, _> = s
        .split(',')
        .map(|t| Integer::parse(t.trim()).map(Integer::from))
        .collect();
    Ok(ContinuedFraction::new(qs.map_err(|e| anyhow::anyhow!("bad quotients: {e}"))?)?)
}

fn load_jet(ctx: Ctx, path: &PathBuf, order: usize) -> anyhow::Result<geonorm::dynamics::DiffeoJet> {
    let text = std::fs::read_to_string(path)?;
    let parsed: io::DiffeoJetJson = serde_json::from_str(&text)?;
    let jet = io::jet_from_json(ctx, &parsed)?;
    Ok(jet.resized(order))
}

fn load_uni(ctx: Ctx, path: &PathBuf) -> anyhow::Result<UniSeries> {
    let text = std::fs::read_to_string(path)?;
    let parsed: io::SeriesJson = serde_json::from_str(&text)?;
    Ok(io::uni_from_json(ctx, &parsed)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx = Ctx::new(cli.precision_bits.max(64));
    let tol = cli.tol;
    match cli.command {
        Command::Admissible { jet, rho, chi } => {
            let f = load_jet(ctx, &jet.input, jet.order)?;
            let pair = if let Some(chi_path) = chi {
                let chi = load_uni(ctx, &chi_path)?;
                solve_admissible_chi(&f, &chi, jet.order)?
            } else if let Some(rho_path) = rho {
                let rho = load_uni(ctx, &rho_path)?;
                solve_admissible(&f, &rho, jet.order)?
            } else {
                resonant_free(&f, jet.order)?
            };
            println!("{}", serde_json::to_string(&io::pair_to_json(ctx, &pair))?);
        }
        Command::Balanced { jet } => {
            let f = load_jet(ctx, &jet.input, jet.order)?;
            let data = balanced(&f, jet.order, tol)?;
            let out = json!({
                "pair": io::pair_to_json(ctx, &data.pair),
                "tau": io::uni_to_json(ctx, &data.tau.tau, "z"),
            });
            println!("{out}");
        }
        Command::Involution { jet, appendix_b } => {
            if appendix_b {
                return involution_self_test(ctx);
            }
            let f = load_jet(ctx, &jet.input, jet.order)?;
            let pair = resonant_free(&f, jet.order)?;
            let by_ell = tau_via_ell(&pair.l)?;
            let by_rec = tau_via_recursion(&pair.l)?;
            let agree = by_ell
                .tau
                .truncated(by_rec.tau.order())
                .sub(&by_rec.tau.truncated(by_ell.tau.order()))?
                .max_abs()
                .to_f64();
            let defect = by_ell.involution_defect()?.to_f64();
            let out = json!({
                "tau": io::uni_to_json(ctx, &by_ell.tau, "z"),
                "route_disagreement": format!("{agree:e}"),
                "involution_defect": format!("{defect:e}"),
            });
            println!("{out}");
        }
        Command::Normalize { jet } => {
            let f = load_jet(ctx, &jet.input, jet.order)?;
            let data = balanced(&f, jet.order, tol)?;
            let phi = morse_phi(&data.pair.l)?;
            let modulus_resid = phi.square_modulus().sub(&data.pair.l)?.max_abs().to_f64();
            let (g, offdiag) = geometric_normal_form(&f, &phi)?;
            let out = json!({
                "phi": io::bi_to_json(ctx, &phi),
                "normal_form": io::bi_to_json(ctx, &g),
                "modulus_residual": format!("{modulus_resid:e}"),
                "offdiag_residual": format!("{:e}", offdiag.to_f64()),
            });
            println!("{out}");
        }
        Command::Verify { jet } => {
            let f = load_jet(ctx, &jet.input, jet.order)?;
            let pair = resonant_free(&f, jet.order)?;
            let residual = pair.residual_norm.to_f64();
            let out = json!({
                "residual": format!("{residual:e}"),
                "hermitian_defect": format!("{:e}", pair.l.hermitian_defect().to_f64()),
                "tolerance": tol,
                "ok": residual <= tol,
            });
            println!("{out}");
            if residual > tol {
                std::process::exit(2);
            }
        }
        Command::Linearize { jet } => {
            let f = load_jet(ctx, &jet.input, jet.order)?;
            let lin = linearize_holomorphic(&f, jet.order)?;
            let gamma_id = UniSeries::identity(ctx, jet.order / 2);
            let adm = conjugacy_residual(&f, &lin.modulus_sq, &gamma_id)?;
            let out = json!({
                "h": io::uni_to_json(ctx, &lin.h, "z"),
                "residual": format!("{:e}", lin.residual.to_f64()),
                "modulus_sq_admissible_residual": format!("{:e}", adm.to_f64()),
            });
            println!("{out}");
        }
        Command::Conservative { jet } => {
            let f = load_jet(ctx, &jet.input, jet.order)?;
            let rep = is_formally_conservative(&f, jet.order, tol)?;
            let out = json!({
                "conservative": rep.conservative,
                "gamma": io::uni_to_json(ctx, &rep.gamma, "R"),
                "gamma_deviation": format!("{:e}", rep.gamma_deviation.to_f64()),
            });
            println!("{out}");
        }
        Command::Bruno { cf, depth } => {
            let cf = parse_quotients(&cf)?;
            let depth = depth.min(cf.depth().saturating_sub(1));
            let sums = cf.bruno_partial_sums(depth)?;
            match cli.format {
                Format::Json => {
                    let convs: Vec<(String, String)> = (1..=cf.depth())
                        .map(|k| (cf.p(k).to_string(), cf.q(k).to_string()))
                        .collect();
                    let out = json!({ "convergents": convs, "bruno_partial_sums": sums });
                    println!("{out}");
                }
                Format::Csv => {
                    println!("k,p,q,partial_sum");
                    for k in 1..=depth {
                        println!("{},{},{},{}", k, cf.p(k), cf.q(k), sums[k - 1]);
                    }
                }
            }
        }
        Command::OddLiouville { seed, depth } => {
            let seed: Vec<u64> = seed
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<_, _>>()?;
            let out = odd_super_liouville_construct(&seed, depth, DEFAULT_FACTORIAL_BUDGET)?;
            let quotients: Vec<String> = out.cf.quotients().iter().map(|q| q.to_string()).collect();
            let certs: Vec<serde_json::Value> = out
                .certificates
                .iter()
                .map(|(k, q, margin)| json!({"k": k, "q": q.to_string(), "margin": margin}))
                .collect();
            println!("{}", json!({ "quotients": quotients, "certificates": certs }));
        }
        Command::JetExtend { input, odd } => {
            let text = std::fs::read_to_string(&input)?;
            let jet = jet_xy_from_json(&text)?;
            let map = geonorm::areamap::extend_jet(&jet, odd)?;
            let certified = map.certify_area_preserving()?;
            let (jx, jy) = map.jet(jet.order);
            let matches = jx.sub(&jet.x).is_zero() && jy.sub(&jet.y).is_zero();
            let factors: Vec<serde_json::Value> = map
                .factors
                .iter()
                .map(|f| match f {
                    geonorm::areamap::Factor::Linear { c, s } => {
                        json!({"linear": {"c": c.to_string(), "s": s.to_string()}})
                    }
                    geonorm::areamap::Factor::Shear { a, b, coef, d } => json!({
                        "shear": {"a": a.to_string(), "b": b.to_string(),
                                   "coef": coef.to_string(), "d": d}
                    }),
                })
                .collect();
            println!(
                "{}",
                json!({
                    "factors": factors,
                    "jet_reproduced": matches,
                    "factors_certified_area_preserving": certified,
                })
            );
        }
        Command::ExampleSiegel { seed_cf, depth, p } => {
            let seed: Vec<u64> = seed_cf
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<_, _>>()?;
            let built = odd_super_liouville_construct(&seed, depth, DEFAULT_FACTORIAL_BUDGET)?;
            let prec = built.cf.required_prec().max(ctx.prec);
            let run_ctx = Ctx::new(prec);
            let omega = built.cf.value(prec);
            let jet = geonorm::dynamics::DiffeoJet::rotation(run_ctx, omega, 1);
            let ex = siegel_divergent(run_ctx, &built.cf, &jet, p, true)?;
            print_example(run_ctx, &ex)?;
        }
        Command::ExampleTau { seed_cf, depth, p } => {
            let seed: Vec<u64> = seed_cf
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<_, _>>()?;
            let built = odd_super_liouville_construct(&seed, depth, DEFAULT_FACTORIAL_BUDGET)?;
            let run_ctx = Ctx::new(built.cf.required_prec().max(ctx.prec));
            let (ex, tau) = tau_divergent(run_ctx, &built.cf, p)?;
            let witnesses = witness_json(&ex.witnesses);
            let out = json!({
                "jet": io::jet_to_json(ex.jet.ctx(), &ex.jet),
                "tau": io::uni_to_json(ex.jet.ctx(), &tau, "z"),
                "witnesses": witnesses,
            });
            println!("{out}");
        }
        Command::ExampleOdd { seed_cf, depth, p } => {
            let seed: Vec<u64> = seed_cf
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<_, _>>()?;
            let built = odd_super_liouville_construct(&seed, depth, DEFAULT_FACTORIAL_BUDGET)?;
            let prec = built.cf.required_prec().max(ctx.prec);
            let run_ctx = Ctx::new(prec);
            let omega = built.cf.value(prec);
            let jet = geonorm::dynamics::DiffeoJet::rotation(run_ctx, omega, 1);
            let ex = odd_siegel_divergent(run_ctx, &built.cf, &jet, p)?;
            print_example(run_ctx, &ex)?;
        }
        Command::ExampleClassic { omega, kind, order } => {
            let omega = ctx.parse_float(&omega)?;
            let kind = match kind.split(':').collect::<Vec<_>>().as_slice() {
                ["quadratic"] => ClassicKind::YoccozQuadratic,
                ["exp"] => ClassicKind::Exp,
                ["geyer", d] => ClassicKind::Geyer(d.parse()?),
                ["cover", d] => ClassicKind::RamifiedCover(d.parse()?),
                _ => anyhow::bail!("unknown kind {kind:?}"),
            };
            let jet = classic_map(ctx, omega.clone(), kind, order)?;
            let covering = match kind {
                ClassicKind::RamifiedCover(d) => {
                    Some(covering_identity_check(ctx, &omega, d, order)?)
                }
                _ => None,
            };
            let mut out = json!({ "jet": io::jet_to_json(ctx, &jet) });
            if let Some(r) = covering {
                out["covering_identity_residual"] = json!(format!("{r:e}"));
            }
            println!("{out}");
        }
        Command::IpmCheck {
            f0,
            f1,
            order,
            targets,
            samples,
        } => {
            let f0 = load_jet(ctx, &f0, order)?;
            let f1 = load_jet(ctx, &f1, order)?;
            let targets: Vec<Target> = targets
                .split(',')
                .map(|t| match t.trim() {
                    "lstar" => Ok(Target::LStar),
                    "gamma" => Ok(Target::Gamma),
                    "tau" => Ok(Target::Tau),
                    "lbalanced" => Ok(Target::LBalanced),
                    other => Err(anyhow::anyhow!("unknown target {other:?}")),
                })
                .collect::<anyhow::Result<_>>()?;
            let rep = geonorm::family::ipm_degree_check_sampled(&f0, &f1, order, &targets, tol, samples)?;
            let out = json!({
                "all_within": rep.all_within,
                "max_residual": format!("{:e}", rep.max_residual),
                "coefficients_checked": rep.entries.len(),
                "violations": rep.entries.iter().filter(|e| !e.within_bound).count(),
            });
            println!("{out}");
        }
        Command::Growth { input } => {
            let text = std::fs::read_to_string(&input)?;
            let parsed: io::SeriesJson = serde_json::from_str(&text)?;
            let profile = if parsed.vars == "zw" {
                let s = io::bi_from_json(ctx, &parsed)?;
                growth_profile_bi(&s)
            } else {
                let s = io::uni_from_json(ctx, &parsed)?;
                growth_profile_uni(&s)
            };
            match cli.format {
                Format::Csv => print!("{}", profile.to_csv()),
                Format::Json => {
                    let rows: Vec<serde_json::Value> = profile
                        .rows
                        .iter()
                        .map(|r| json!({"n": r.degree, "max_abs": r.max_abs, "nth_root": r.nth_root}))
                        .collect();
                    println!(
                        "{}",
                        json!({
                            "rows": rows,
                            "slope_linear": profile.slope_linear,
                            "slope_nlogn": profile.slope_nlogn,
                        })
                    );
                }
            }
        }
    }
    Ok(())
}

fn print_example(ctx: Ctx, ex: &geonorm::models::DivergentExample) -> anyhow::Result<()> {
    let out = json!({
        "jet": io::jet_to_json(ctx, &ex.jet),
        "order": ex.order,
        "witnesses": witness_json(&ex.witnesses),
    });
    println!("{out}");
    Ok(())
}

fn witness_json(ws: &[geonorm::models::Witness]) -> Vec<serde_json::Value> {
    ws.iter()
        .map(|w| {
            json!({
                "p": w.p,
                "n": w.n,
                "achieved": format!("{:e}", w.achieved),
                "bound": format!("{:e}", w.bound),
                "satisfied": w.satisfied,
            })
        })
        .collect()
}

/// {"order": N, "x": <series with "vars": "xy">, "y": <series with "vars": "xy">}
/// where each component uses the series schema with exact rational entry
/// strings ("3/5") and imaginary parts "0".
fn jet_xy_from_json(text: &str) -> anyhow::Result<geonorm::areamap::XyJet> {
    #[derive(serde::Deserialize)]
    struct XyJetJson {
        order: usize,
        x: io::SeriesJson,
        y: io::SeriesJson,
    }
    let parsed: XyJetJson = serde_json::from_str(text)?;
    let mut x = geonorm::areamap::RatPoly2::zero(parsed.order);
    let mut y = geonorm::areamap::RatPoly2::zero(parsed.order);
    for (series, target) in [(&parsed.x, &mut x), (&parsed.y, &mut y)] {
        if series.vars != "xy" {
            anyhow::bail!("jet components must use vars \"xy\"");
        }
        for (p, q, re, im) in &series.entries {
            if im != "0" {
                anyhow::bail!("jet components must be real (imaginary part \"0\")");
            }
            let r = rug::Rational::parse(re)
                .map(rug::Rational::from)
                .map_err(|e| anyhow::anyhow!("bad rational {re:?}: {e}"))?;
            target.set_coeff(*p, *q, r);
        }
    }
    Ok(geonorm::areamap::XyJet {
        x,
        y,
        order: parsed.order,
    })
}

/// Random involutions exercised through the toolkit (`involution --appendix-b`).
fn involution_self_test(ctx: Ctx) -> anyhow::Result<()> {
    use geonorm::involutions::{conjugation_residual, conjugator_of, conjugators_between, v_of};
    let order = 12;
    let mut worst: f64 = 0.0;
    for trial in 0..10u32 {
        let mut phi = UniSeries::identity(ctx, order);
        for n in 2..=order {
            // deterministic scramble
            let v = ((trial as f64 + 1.0) * 0.137 + n as f64 * 0.071).sin() * 0.5;
            phi.set_coeff(n, ctx.c_f64(v, 0.0));
        }
        let sigma = UniSeries::identity(ctx, order).neg();
        let tau = phi.invert()?.compose(&sigma.compose(&phi)?)?;
        let cj = conjugator_of(&tau, 1e-25)?;
        let rebuilt = cj.u.invert()?.compose(&sigma.compose(&cj.u)?)?;
        worst = worst.max(rebuilt.sub(&tau)?.max_abs().to_f64());
        worst = worst.max(cj.e.odd_part().max_abs().to_f64());
        let v = v_of(&tau)?;
        worst = worst.max(v.compose(&tau)?.sub(&v)?.max_abs().to_f64());
        let mut gamma = UniSeries::identity(ctx, order);
        gamma.set_coeff(3, ctx.c_f64(0.25, 0.0));
        let psi = conjugators_between(&sigma, &tau, &gamma, 1e-25)?;
        worst = worst.max(conjugation_residual(&sigma, &tau, &psi)?.to_f64());
    }
    println!("{}", json!({ "trials": 10, "worst_residual": format!("{worst:e}") }));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let guard = err
                .downcast_ref::<geonorm::Error>()
                .map(geonorm::Error::is_guard_failure)
                .unwrap_or(false);
            if guard {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

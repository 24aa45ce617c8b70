//! JSON interchange formats. Coefficients travel as decimal strings carrying
//! the full working precision; round-trips preserve at least prec-8 bits.

use crate::arith::ContinuedFraction;
use crate::dynamics::jet::DiffeoJet;
use crate::dynamics::solver::AdmissiblePair;
use crate::error::{Error, Result};
use crate::num::Ctx;
use crate::series::{BiSeries, UniSeries};
use rug::Integer;
use serde::{Deserialize, Serialize};

/// {"order": N, "vars": "zw"|"R"|"z"|"xy", "entries": [[j,k,re,im], ...]}
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SeriesJson {
    pub order: usize,
    pub vars: String,
    pub entries: Vec<(usize, usize, String, String)>,
}

pub fn bi_to_json(ctx: Ctx, s: &BiSeries) -> SeriesJson {
    let entries = s
        .iter()
        .filter(|(_, _, c)| !c.is_zero())
        .map(|(j, k, c)| {
            (
                j,
                k,
                ctx.float_to_string(c.real()),
                ctx.float_to_string(c.imag()),
            )
        })
        .collect();
    SeriesJson {
        order: s.order(),
        vars: "zw".into(),
        entries,
    }
}

pub fn bi_from_json(ctx: Ctx, j: &SeriesJson) -> Result<BiSeries> {
    if j.vars != "zw" {
        return Err(Error::Parse(format!("expected vars \"zw\", got {:?}", j.vars)));
    }
    let mut s = BiSeries::zero(ctx, j.order);
    for (a, b, re, im) in &j.entries {
        if a + b > j.order {
            return Err(Error::Parse(format!("entry ({a},{b}) above order {}", j.order)));
        }
        s.set_coeff(*a, *b, ctx.parse_complex(re, im)?);
    }
    Ok(s)
}

pub fn uni_to_json(ctx: Ctx, s: &UniSeries, vars: &str) -> SeriesJson {
    let entries = (0..=s.order())
        .filter(|n| !s.coeff(*n).is_zero())
        .map(|n| {
            let c = s.coeff(n);
            (
                n,
                0,
                ctx.float_to_string(c.real()),
                ctx.float_to_string(c.imag()),
            )
        })
        .collect();
    SeriesJson {
        order: s.order(),
        vars: vars.into(),
        entries,
    }
}

pub fn uni_from_json(ctx: Ctx, j: &SeriesJson) -> Result<UniSeries> {
    if j.vars != "R" && j.vars != "z" {
        return Err(Error::Parse(format!("expected univariate vars, got {:?}", j.vars)));
    }
    let mut s = UniSeries::zero(ctx, j.order);
    let mut real = true;
    for (n, zero, re, im) in &j.entries {
        if *zero != 0 {
            return Err(Error::Parse("univariate entries use k = 0".into()));
        }
        let c = ctx.parse_complex(re, im)?;
        if !c.imag().is_zero() {
            real = false;
        }
        s.set_coeff(*n, c);
    }
    Ok(if real {
        s.mark_real()
    } else {
        s.mark_complex()
    })
}

/// Rotation number: either a decimal literal or continued-fraction data.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum OmegaJson {
    Decimal(String),
    Cf { quotients: Vec<String> },
}

/// {"omega": ..., "coeffs": [[j,k,re,im],...], "order": N}
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DiffeoJetJson {
    pub omega: OmegaJson,
    pub order: usize,
    pub coeffs: Vec<(usize, usize, String, String)>,
}

pub fn omega_from_json(ctx: Ctx, o: &OmegaJson) -> Result<rug::Float> {
    match o {
        OmegaJson::Decimal(s) => ctx.parse_float(s),
        OmegaJson::Cf { quotients } => {
            let cf = cf_from_strings(quotients)?;
            let prec = cf.required_prec().max(ctx.prec);
            Ok(cf.value(prec))
        }
    }
}

pub fn cf_from_strings(quotients: &[String]) -> Result<ContinuedFraction> {
    let parsed: Result<Vec<Integer>> = quotients
        .iter()
        .map(|s| {
            Integer::parse(s)
                .map(Integer::from)
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        })
        .collect();
    ContinuedFraction::new(parsed?)
}

pub fn jet_to_json(ctx: Ctx, jet: &DiffeoJet) -> DiffeoJetJson {
    let coeffs = jet
        .series()
        .iter()
        .filter(|(j, k, c)| j + k >= 2 && !c.is_zero())
        .map(|(j, k, c)| {
            (
                j,
                k,
                ctx.float_to_string(c.real()),
                ctx.float_to_string(c.imag()),
            )
        })
        .collect();
    DiffeoJetJson {
        omega: OmegaJson::Decimal(ctx.float_to_string(jet.omega())),
        order: jet.order(),
        coeffs,
    }
}

pub fn jet_from_json(ctx: Ctx, j: &DiffeoJetJson) -> Result<DiffeoJet> {
    let omega = omega_from_json(ctx, &j.omega)?;
    let mut jet = DiffeoJet::rotation(ctx, omega, j.order);
    for (a, b, re, im) in &j.coeffs {
        jet.set_coeff(*a, *b, ctx.parse_complex(re, im)?)?;
    }
    Ok(jet)
}

/// {"quotients": ["2","1","43",...]}
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CfJson {
    pub quotients: Vec<String>,
}

/// Output schema for admissible pairs.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct AdmissiblePairJson {
    pub l: SeriesJson,
    pub gamma: SeriesJson,
    pub residual_norm: String,
    pub hermitian_defect: String,
}

pub fn pair_to_json(ctx: Ctx, pair: &AdmissiblePair) -> AdmissiblePairJson {
    AdmissiblePairJson {
        l: bi_to_json(ctx, &pair.l),
        gamma: uni_to_json(ctx, &pair.gamma, "R"),
        residual_norm: format!("{:e}", pair.residual_norm.to_f64()),
        hermitian_defect: format!("{:e}", pair.l.hermitian_defect().to_f64()),
    }
}

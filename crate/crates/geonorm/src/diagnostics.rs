//! Coefficient-growth profiles: per-degree maxima, n-th roots, and
//! least-squares slopes against n and n log n. The tool reports growth
//! only; divergence is an order-infinity statement it cannot certify.

use crate::series::{BiSeries, UniSeries};
use rug::Float;

#[derive(Clone, Debug)]
pub struct GrowthRow {
    pub degree: usize,
    pub max_abs: f64,
    /// (max |coeff|)^{1/n}; NaN for empty slices.
    pub nth_root: f64,
    /// ln of the slice maximum, exact in MPFR before conversion.
    pub log_max: f64,
}

#[derive(Clone, Debug, Default)]
pub struct GrowthProfile {
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of log max|coeff| against n (geometric growth
    /// shows up as log(1/radius)).
    pub slope_linear: f64,
    /// Least-squares slope against n log n (factorial growth shows up as a
    /// slope near 1).
    pub slope_nlogn: f64,
}

fn profile_from_slices(maxima: Vec<(usize, Float)>) -> GrowthProfile {
    let mut rows = Vec::new();
    for (n, m) in maxima {
        if m.is_zero() || n == 0 {
            continue;
        }
        let log_max = m.clone().ln().to_f64();
        let nth_root = (log_max / n as f64).exp();
        rows.push(GrowthRow {
            degree: n,
            max_abs: m.to_f64(),
            nth_root,
            log_max,
        });
    }
    // least squares through (x_i, y_i) with y = log max
    let fit = |xs: &[f64], ys: &[f64]| -> f64 {
        let n = xs.len() as f64;
        if xs.len() < 2 {
            return f64::NAN;
        }
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    let ys: Vec<f64> = rows.iter().map(|r| r.log_max).collect();
    let xs1: Vec<f64> = rows.iter().map(|r| r.degree as f64).collect();
    let xs2: Vec<f64> = rows
        .iter()
        .map(|r| {
            let n = r.degree as f64;
            n * n.ln()
        })
        .collect();
    GrowthProfile {
        slope_linear: fit(&xs1, &ys),
        slope_nlogn: fit(&xs2, &ys),
        rows,
    }
}

pub fn growth_profile_bi(s: &BiSeries) -> GrowthProfile {
    let maxima = (1..=s.order()).map(|n| (n, s.max_abs_slice(n))).collect();
    profile_from_slices(maxima)
}

pub fn growth_profile_uni(s: &UniSeries) -> GrowthProfile {
    let maxima = (1..=s.order())
        .map(|n| (n, crate::num::sup_norm(s.coeff(n))))
        .collect();
    profile_from_slices(maxima)
}

impl GrowthProfile {
    /// CSV with header n,max_abs,nth_root.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,max_abs,nth_root\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:e},{:e}\n", r.degree, r.max_abs, r.nth_root));
        }
        out
    }
}

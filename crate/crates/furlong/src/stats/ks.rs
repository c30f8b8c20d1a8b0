//! Two-sample Kolmogorov-Smirnov test.
//!
//! The statistic is the supremum distance between the two right-continuous
//! empirical distribution functions, evaluated over all pooled sample
//! points. The critical value is c(alpha) * sqrt((n_a + n_b) / (n_a n_b))
//! and the p-value comes from the asymptotic Kolmogorov series with
//! effective sample size n_a n_b / (n_a + n_b).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::stats::StatTestResult;

/// Survival function of the Kolmogorov distribution,
/// Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2), truncated at
/// 100 terms.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100u32 {
        let j = j as f64;
        let term = (-2.0 * j * j * lambda * lambda).exp();
        sum += if j as u32 % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Inverse of the Kolmogorov survival function: the constant c(alpha)
/// with Q(c) = alpha. c(0.05) = 1.358, c(0.01) = 1.628, c(0.10) = 1.224.
pub fn kolmogorov_critical(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Critical distance D_c = c(alpha) sqrt((n_a + n_b) / (n_a n_b)).
pub fn ks_critical_value(n_a: usize, n_b: usize, alpha: f64) -> f64 {
    let (na, nb) = (n_a as f64, n_b as f64);
    kolmogorov_critical(alpha) * ((na + nb) / (na * nb)).sqrt()
}

/// Supremum distance between the two sample ECDFs.
fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&av), Some(&bv)) => av.min(bv),
            (Some(&av), None) => av,
            (None, Some(&bv)) => bv,
            (None, None) => break,
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Run the two-sample test at the given significance level.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<StatTestResult> {
    if a.len() < 10 || b.len() < 10 {
        return Err(Error::InsufficientData {
            what: "two-sample KS test",
            required: 10,
            actual: a.len().min(b.len()),
        });
    }
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::Domain(format!("significance level {alpha} outside (0, 1)")));
    }
    let mut a_sorted = a.to_vec();
    let mut b_sorted = b.to_vec();
    let d = ks_statistic(&mut a_sorted, &mut b_sorted);

    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n_eff = na * nb / (na + nb);
    let p_value = kolmogorov_sf(n_eff.sqrt() * d);

    let mut critical_values = BTreeMap::new();
    for (label, level) in [("10%", 0.10), ("5%", 0.05), ("1%", 0.01)] {
        critical_values.insert(label.to_string(), ks_critical_value(a.len(), b.len(), level));
    }
    let d_crit = ks_critical_value(a.len(), b.len(), alpha);

    Ok(StatTestResult {
        test: "ks_two_sample".into(),
        statistic: d,
        critical_values,
        p_value,
        rejected: d > d_crit,
    })
}

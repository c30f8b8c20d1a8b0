//! Generalized Gaussian (generalized normal) density and fitting.
//!
//! f(x) = beta / (2 scale Gamma(1/beta)) exp(-(|x - mu| / scale)^beta).
//! beta = 1 is Laplace, beta = 2 is Gaussian. The headline fit minimizes
//! the sum of squared errors between a histogram density and the model
//! over beta, with (mu, scale) profile-estimated from the sample moments;
//! a profile maximum-likelihood fit is available as a cross-check.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// How a [`GGFit`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Sse,
    Mle,
}

/// Fitted generalized Gaussian parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GGFit {
    pub mu: f64,
    pub scale: f64,
    pub beta: f64,
    /// Histogram sum of squared errors at the fitted parameters.
    pub sse: f64,
    pub method: FitMethod,
}

/// Density of the generalized Gaussian.
pub fn gg_pdf(x: f64, mu: f64, scale: f64, beta: f64) -> Result<f64> {
    if scale <= 0.0 || beta <= 0.0 || scale.is_nan() || beta.is_nan() {
        return Err(Error::Domain(format!(
            "generalized Gaussian needs scale > 0 and beta > 0, got scale={scale}, beta={beta}"
        )));
    }
    let z = (x - mu).abs() / scale;
    let log_norm = beta.ln() - (2.0 * scale).ln() - ln_gamma(1.0 / beta);
    Ok((log_norm - z.powf(beta)).exp())
}

/// Scale implied by a sample standard deviation at a given shape:
/// Var = scale^2 Gamma(3/beta) / Gamma(1/beta).
pub fn scale_from_std(std: f64, beta: f64) -> f64 {
    std * (0.5 * (ln_gamma(1.0 / beta) - ln_gamma(3.0 / beta))).exp()
}

/// Standard deviation of the distribution at given scale and shape.
pub fn std_from_scale(scale: f64, beta: f64) -> f64 {
    scale * (0.5 * (ln_gamma(3.0 / beta) - ln_gamma(1.0 / beta))).exp()
}

/// Histogram with Freedman-Diaconis bin width, at least 50 bins.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub centers: Vec<f64>,
    /// Empirical density per bin (integrates to 1 over the sample range).
    pub densities: Vec<f64>,
    pub bin_width: f64,
}

pub fn histogram_density(values: &[f64]) -> Result<Histogram> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min = sorted[0];
    let max = sorted[n - 1];
    if max <= min {
        return Err(Error::Domain(
            "degenerate histogram: all observations in one bin".into(),
        ));
    }
    let q1 = sorted[n / 4];
    let q3 = sorted[(3 * n) / 4];
    let iqr = q3 - q1;
    let fd_width = 2.0 * iqr / (n as f64).cbrt();
    let mut bins = if fd_width > 0.0 {
        ((max - min) / fd_width).ceil() as usize
    } else {
        50
    };
    bins = bins.clamp(50, 5000);

    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in &sorted {
        let idx = (((v - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let centers = (0..bins)
        .map(|i| min + (i as f64 + 0.5) * width)
        .collect();
    let densities = counts
        .iter()
        .map(|&c| c as f64 / (n as f64 * width))
        .collect();
    Ok(Histogram {
        centers,
        densities,
        bin_width: width,
    })
}

fn golden_min(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

const BETA_LO: f64 = 0.5;
const BETA_HI: f64 = 4.0;

/// Fit by minimizing histogram SSE over beta in [0.5, 4], coarse grid then
/// golden-section refinement, with (mu, scale) moment-profiled per beta.
pub fn fit_gg(values: &[f64]) -> Result<GGFit> {
    let n = values.len();
    if n < 1000 {
        return Err(Error::InsufficientData {
            what: "generalized Gaussian fit",
            required: 1000,
            actual: n,
        });
    }
    let hist = histogram_density(values)?;
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    let std = var.sqrt();
    if std == 0.0 {
        return Err(Error::Domain("zero spread: cannot fit a density".into()));
    }

    let sse_at = |beta: f64| -> f64 {
        let scale = scale_from_std(std, beta);
        hist.centers
            .iter()
            .zip(&hist.densities)
            .map(|(&x, &d)| {
                let f = gg_pdf(x, mean, scale, beta).unwrap_or(0.0);
                (d - f) * (d - f)
            })
            .sum()
    };

    let mut best_beta = BETA_LO;
    let mut best_sse = f64::INFINITY;
    let mut beta = BETA_LO;
    while beta <= BETA_HI + 1e-9 {
        let sse = sse_at(beta);
        if sse < best_sse {
            best_sse = sse;
            best_beta = beta;
        }
        beta += 0.1;
    }
    let lo = (best_beta - 0.15).max(BETA_LO);
    let hi = (best_beta + 0.15).min(BETA_HI);
    let refined = golden_min(sse_at, lo, hi, 1e-5);

    Ok(GGFit {
        mu: mean,
        scale: scale_from_std(std, refined),
        beta: refined,
        sse: sse_at(refined),
        method: FitMethod::Sse,
    })
}

/// Profile maximum-likelihood fit; the cross-check for [`fit_gg`].
///
/// For fixed beta, mu minimizes sum |x - mu|^beta (found by golden
/// section between the quartiles) and the scale MLE is
/// (beta/n sum |x - mu|^beta)^(1/beta).
pub fn fit_gg_mle(values: &[f64]) -> Result<GGFit> {
    let n = values.len();
    if n < 1000 {
        return Err(Error::InsufficientData {
            what: "generalized Gaussian fit",
            required: 1000,
            actual: n,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (mut q1, mut q3) = (sorted[n / 4], sorted[(3 * n) / 4]);
    if q3 <= q1 {
        q1 = sorted[0];
        q3 = sorted[n - 1];
    }
    if q3 <= q1 {
        return Err(Error::Domain("zero spread: cannot fit a density".into()));
    }

    let nf = n as f64;
    let profile = |beta: f64| -> (f64, f64, f64) {
        let power_sum = |mu: f64| values.iter().map(|v| (v - mu).abs().powf(beta)).sum::<f64>();
        let mu = golden_min(power_sum, q1, q3, 1e-6 * (q3 - q1));
        let s = power_sum(mu);
        let scale = (beta * s / nf).powf(1.0 / beta);
        // log-likelihood up to constants: n(ln beta - ln 2 - ln Gamma(1/beta) - ln scale) - n/beta
        let ll = nf * (beta.ln() - 2.0f64.ln() - ln_gamma(1.0 / beta) - scale.ln()) - nf / beta;
        (ll, mu, scale)
    };

    let neg_ll = |beta: f64| -profile(beta).0;
    let mut best_beta = BETA_LO;
    let mut best = f64::INFINITY;
    let mut beta = BETA_LO;
    while beta <= BETA_HI + 1e-9 {
        let v = neg_ll(beta);
        if v < best {
            best = v;
            best_beta = beta;
        }
        beta += 0.1;
    }
    let lo = (best_beta - 0.15).max(BETA_LO);
    let hi = (best_beta + 0.15).min(BETA_HI);
    let refined = golden_min(neg_ll, lo, hi, 1e-4);
    let (_, mu, scale) = profile(refined);

    let hist = histogram_density(values)?;
    let sse = hist
        .centers
        .iter()
        .zip(&hist.densities)
        .map(|(&x, &d)| {
            let f = gg_pdf(x, mu, scale, refined).unwrap_or(0.0);
            (d - f) * (d - f)
        })
        .sum();

    Ok(GGFit {
        mu,
        scale,
        beta: refined,
        sse,
        method: FitMethod::Mle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Gamma, StandardNormal};

    pub(crate) fn sample_gg(rng: &mut ChaCha8Rng, n: usize, mu: f64, scale: f64, beta: f64) -> Vec<f64> {
        let gamma = Gamma::new(1.0 / beta, 1.0).unwrap();
        (0..n)
            .map(|_| {
                let g: f64 = gamma.sample(rng);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                mu + scale * sign * g.powf(1.0 / beta)
            })
            .collect()
    }

    #[test]
    fn laplace_peak_is_half() {
        assert_abs_diff_eq!(gg_pdf(0.0, 0.0, 1.0, 1.0).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn beta_two_scale_sqrt2_is_standard_normal() {
        let peak = gg_pdf(0.0, 0.0, 2.0f64.sqrt(), 2.0).unwrap();
        assert_abs_diff_eq!(peak, 1.0 / (2.0 * std::f64::consts::PI).sqrt(), epsilon = 1e-12);
        // and matches the normal density away from the peak
        let x = 1.3f64;
        let normal = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert_abs_diff_eq!(gg_pdf(x, 0.0, 2.0f64.sqrt(), 2.0).unwrap(), normal, epsilon = 1e-12);
    }

    /// Quadrature over [-50 sigma, 50 sigma]: geometric panels around the
    /// peak handle the cusp at mu for beta < 1, Simpson handles the rest.
    fn integrate_pdf(mu: f64, scale: f64, beta: f64) -> f64 {
        let sigma = std_from_scale(scale, beta);
        let upper = 50.0 * sigma;
        // integrate the right half from mu and double it (symmetry)
        let mut total = 0.0;
        let mut a: f64 = 1e-12 * scale;
        // contribution of [0, a] bounded by peak * a, negligible
        while a < upper {
            let b = (a * 2.0).min(upper);
            // composite Simpson with 32 panels on [a, b]
            let m = 64;
            let h = (b - a) / m as f64;
            let mut s = 0.0;
            for i in 0..=m {
                let x = a + i as f64 * h;
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                s += w * gg_pdf(mu + x, mu, scale, beta).unwrap();
            }
            total += s * h / 3.0;
            a = b;
        }
        2.0 * total
    }

    #[test]
    fn pdf_normalizes_on_parameter_grid() {
        for &scale in &[0.5, 1.0, 2.0] {
            for &beta in &[0.8, 1.0, 1.19, 2.0, 3.0] {
                let integral = integrate_pdf(0.3, scale, beta);
                assert!(
                    (integral - 1.0).abs() < 1e-6,
                    "integral {integral} for scale={scale}, beta={beta}"
                );
            }
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(gg_pdf(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(gg_pdf(0.0, 0.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn sse_fit_recovers_gaussian_and_laplace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gauss: Vec<f64> = (0..50_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let fit = fit_gg(&gauss).unwrap();
        assert!((fit.beta - 2.0).abs() < 0.1, "beta {}", fit.beta);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let laplace = sample_gg(&mut rng, 50_000, 0.0, 1.0, 1.0);
        let fit = fit_gg(&laplace).unwrap();
        assert!((fit.beta - 1.0).abs() < 0.1, "beta {}", fit.beta);
    }

    #[test]
    fn fit_recovers_all_three_parameters_within_ten_percent() {
        let (mu, scale, beta) = (0.4, 1.5, 1.4);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let draws = sample_gg(&mut rng, 50_000, mu, scale, beta);
        for fit in [fit_gg(&draws).unwrap(), fit_gg_mle(&draws).unwrap()] {
            assert!((fit.beta - beta).abs() / beta < 0.1, "{:?}", fit);
            assert!((fit.scale - scale).abs() / scale < 0.1, "{:?}", fit);
            assert!((fit.mu - mu).abs() < 0.1, "{:?}", fit);
        }
    }

    #[test]
    fn mle_agrees_with_sse_on_paper_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let draws = sample_gg(&mut rng, 50_000, 0.0, 1.0, 1.19);
        let sse = fit_gg(&draws).unwrap();
        let mle = fit_gg_mle(&draws).unwrap();
        assert!((sse.beta - 1.19).abs() < 0.1, "sse beta {}", sse.beta);
        assert!((mle.beta - 1.19).abs() < 0.1, "mle beta {}", mle.beta);
        assert!((sse.beta - mle.beta).abs() < 0.15);
    }

    #[test]
    fn short_series_is_typed_error() {
        let draws = vec![0.5; 100];
        assert!(matches!(
            fit_gg(&draws),
            Err(Error::InsufficientData { required: 1000, .. })
        ));
    }

    #[test]
    fn degenerate_histogram_is_domain_error() {
        let draws = vec![1.0; 2000];
        assert!(matches!(fit_gg(&draws), Err(Error::Domain(_))));
    }
}

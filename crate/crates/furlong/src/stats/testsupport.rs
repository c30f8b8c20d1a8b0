//! Deterministic fixture generator shared by the statistical tests.
//!
//! A 64-bit LCG plus Box-Muller, chosen so the exact same sequences can be
//! produced in other environments when freezing reference values.

pub struct Lcg {
    state: u64,
    spare: Option<f64>,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg {
            state: seed,
            spare: None,
        }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    /// Uniform in (0, 1) from the top 53 bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 1.0) / 9007199254740993.0
    }

    /// Standard normal via Box-Muller, consuming the pair eagerly.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

pub fn white_noise(seed: u64, n: usize) -> Vec<f64> {
    let mut lcg = Lcg::new(seed);
    (0..n).map(|_| lcg.normal()).collect()
}

pub fn random_walk(seed: u64, n: usize) -> Vec<f64> {
    let mut acc = 0.0;
    white_noise(seed, n)
        .into_iter()
        .map(|e| {
            acc += e;
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matches_frozen_reference_sequence() {
        let wn = white_noise(42, 500);
        assert_abs_diff_eq!(wn[0], 0.16326722416544423, epsilon = 1e-14);
        assert_abs_diff_eq!(wn[1], 1.0506191931976754, epsilon = 1e-14);
        assert_abs_diff_eq!(wn[2], -0.9081479287705863, epsilon = 1e-14);
        assert_abs_diff_eq!(wn[3], -0.971939208218164, epsilon = 1e-14);
        assert_abs_diff_eq!(wn.iter().sum::<f64>(), -0.1709544693954066, epsilon = 1e-10);
        assert_abs_diff_eq!(
            wn.iter().map(|v| v * v).sum::<f64>(),
            487.9655469473572,
            epsilon = 1e-9
        );

        let rw = random_walk(43, 500);
        assert_abs_diff_eq!(rw[0], -0.2854151380737328, epsilon = 1e-14);
        assert_abs_diff_eq!(rw[499], -1.3457946883132783, epsilon = 1e-10);
    }
}

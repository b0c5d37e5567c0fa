//! Standard-logistic reparameterization of product Bernoulli samples.
//!
//! A sample `x ∼ P_x̂` is produced from uniform noise `ε ∈ (0,1)^d` as
//! `xⱼ = 1[σ⁻¹(x̂ⱼ) + σ⁻¹(εⱼ) ≥ 0]`, and its relaxed counterpart replaces the
//! step by `σ` itself.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::ilp::BinaryPoint;
use crate::penalty::RelaxedPoint;

/// Default clamp for relaxed coordinates entering `σ⁻¹`.
pub const DEFAULT_CLAMP: f64 = 1e-7;

/// Logistic CDF, branch-split so neither tail overflows.
pub fn sigma(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `σ′(z) = σ(z)(1 − σ(z))`.
pub fn sigma_prime(z: f64) -> f64 {
    let s = sigma(z);
    s * (1.0 - s)
}

/// Logit `ln(p / (1 − p))`; rejects `p ∉ (0, 1)`.
pub fn sigma_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DomainError(format!("logit argument {p} is outside (0, 1)")));
    }
    Ok(logit(p))
}

/// Logit after clamping `p` into `[delta, 1 − delta]`.
pub fn sigma_inv_clamped(p: f64, delta: f64) -> f64 {
    logit(p.clamp(delta, 1.0 - delta))
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Uniform noise on the open cube `(0,1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseVector(Vec<f64>);

impl NoiseVector {
    pub fn new(eps: Vec<f64>) -> Result<Self> {
        if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(Error::DomainError(format!("noise coordinate {e} is outside (0, 1)")));
        }
        Ok(Self(eps))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_dims(xhat: &RelaxedPoint, eps: &NoiseVector) -> Result<()> {
    if xhat.len() != eps.len() {
        return Err(Error::DimensionMismatch { expected: xhat.len(), got: eps.len() });
    }
    Ok(())
}

/// Hard sample: `xⱼ = 1` iff `εⱼ ≥ 1 − x̂ⱼ`, the same event as
/// `σ⁻¹(x̂ⱼ) + σ⁻¹(εⱼ) ≥ 0` (ties go to 1).
pub fn hard_threshold(xhat: &RelaxedPoint, eps: &NoiseVector) -> Result<BinaryPoint> {
    check_dims(xhat, eps)?;
    Ok(BinaryPoint::new(
        xhat.as_slice()
            .iter()
            .zip(&eps.0)
            .map(|(&x, &e)| e >= 1.0 - x)
            .collect(),
    ))
}

/// Relaxed sample `σ(σ⁻¹(x̂ⱼ) + σ⁻¹(εⱼ))`; `x̂` must be strictly interior.
pub fn soft_relax(xhat: &RelaxedPoint, eps: &NoiseVector) -> Result<Vec<f64>> {
    check_dims(xhat, eps)?;
    xhat.as_slice()
        .iter()
        .zip(&eps.0)
        .map(|(&x, &e)| Ok(sigma(sigma_inv(x)? + logit(e))))
        .collect()
}

/// Logits `zⱼ = σ⁻¹(x̂ⱼ) + σ⁻¹(εⱼ)`.
pub(crate) fn combined_logits(xhat: &[f64], eps: &[f64]) -> Result<Vec<f64>> {
    xhat.iter()
        .zip(eps)
        .map(|(&x, &e)| Ok(sigma_inv(x)? + logit(e)))
        .collect()
}

/// Deterministic uniform stream. Identical `(seed, stream)` pairs give
/// bit-identical draws on every platform, and any position in the stream can
/// be reached directly.
#[derive(Debug, Clone)]
pub struct SeededSampler {
    seed: u64,
    stream: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl SeededSampler {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent stream for concurrent users sharing a seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, counter: 0, rng }
    }

    /// Sampler positioned after `position` uniforms of the given stream.
    pub fn at_position(seed: u64, stream: u64, position: u64) -> Self {
        let mut s = Self::with_stream(seed, stream);
        // one uniform consumes two 32-bit words
        s.rng.set_word_pos(u128::from(position) * 2);
        s.counter = position;
        s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of uniforms drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// One uniform on the open interval `(0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        self.counter += 1;
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn fill_uniform(&mut self, out: &mut [f64]) {
        for slot in out {
            *slot = self.next_uniform();
        }
    }

    pub fn sample_noise(&mut self, d: usize) -> NoiseVector {
        let mut v = vec![0.0; d];
        self.fill_uniform(&mut v);
        NoiseVector(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rp(v: &[f64]) -> RelaxedPoint {
        RelaxedPoint::new(v.to_vec()).unwrap()
    }

    fn nv(v: &[f64]) -> NoiseVector {
        NoiseVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(0.0), 0.5);
        assert_abs_diff_eq!(sigma(9f64.ln()), 0.9, epsilon = 1e-15);
        let tail = sigma(-50.0);
        let expected = (-50f64).exp() / (1.0 + (-50f64).exp());
        assert!((tail - expected).abs() / expected < 1e-14);
        assert!(sigma(-700.0) > 0.0);
        assert_eq!(sigma(800.0), 1.0);
    }

    #[test]
    fn logit_values() {
        assert_eq!(sigma_inv(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(sigma_inv(0.75).unwrap(), 3f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(sigma_inv(0.9).unwrap(), 9f64.ln(), epsilon = 1e-14);
        assert!(sigma_inv(0.0).is_err());
        assert!(sigma_inv(1.0).is_err());
        assert!(sigma_inv(f64::NAN).is_err());
        assert_eq!(sigma_inv_clamped(0.0, 1e-7), sigma_inv(1e-7).unwrap());
    }

    #[test]
    fn logit_inverts_sigma() {
        for k in 0..=1000 {
            let p = 1e-9 + (1.0 - 2e-9) * k as f64 / 1000.0;
            assert_abs_diff_eq!(sigma(sigma_inv(p).unwrap()), p, epsilon = 1e-12);
        }
        // conditioning of the logit grows like e^|z|
        for k in -100..=100 {
            let z = k as f64 / 10.0;
            assert_abs_diff_eq!(sigma_inv(sigma(z)).unwrap(), z, epsilon = 1e-10);
        }
    }

    #[test]
    fn hard_threshold_examples() {
        let h = |x: f64, e: f64| hard_threshold(&rp(&[x]), &nv(&[e])).unwrap().to_u8()[0];
        assert_eq!(h(0.5, 0.5), 1);
        assert_eq!(h(0.7, 0.2), 0);
        assert_eq!(h(0.7, 0.4), 1);
        assert!(hard_threshold(&rp(&[0.5]), &nv(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn soft_relax_examples() {
        let s = |x: f64, e: f64| soft_relax(&rp(&[x]), &nv(&[e])).unwrap()[0];
        assert_abs_diff_eq!(s(0.5, 0.9), 0.9, epsilon = 1e-15);
        assert_eq!(s(0.5, 0.5), 0.5);
        assert_abs_diff_eq!(s(0.75, 0.75), 0.9, epsilon = 1e-15);
        assert!(soft_relax(&rp(&[0.0]), &nv(&[0.5])).is_err());
    }

    #[test]
    fn soft_relax_matches_odds_form() {
        let mut s = SeededSampler::new(11);
        for _ in 0..1000 {
            let x = s.next_uniform();
            let e = s.next_uniform();
            let odds = x * e / (x * e + (1.0 - x) * (1.0 - e));
            assert_abs_diff_eq!(soft_relax(&rp(&[x]), &nv(&[e])).unwrap()[0], odds, epsilon = 1e-12);
        }
    }

    #[test]
    fn soft_relax_is_monotone_and_tends_to_one() {
        let grid: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
        for &x in &grid {
            let row: Vec<f64> = grid.iter().map(|&e| soft_relax(&rp(&[x]), &nv(&[e])).unwrap()[0]).collect();
            assert!(row.windows(2).all(|w| w[1] > w[0]));
            let col: Vec<f64> = grid.iter().map(|&y| soft_relax(&rp(&[y]), &nv(&[x])).unwrap()[0]).collect();
            assert!(col.windows(2).all(|w| w[1] > w[0]));
        }
        let near_one = soft_relax(&rp(&[0.3]), &nv(&[1.0 - 1e-12])).unwrap()[0];
        assert!(1.0 - near_one < 1e-10);
    }

    #[test]
    fn threshold_forms_agree() {
        let mut s = SeededSampler::new(5);
        for _ in 0..10_000 {
            let x = s.next_uniform();
            let e = s.next_uniform();
            let logit_form = sigma_inv(x).unwrap() + sigma_inv(e).unwrap() >= 0.0;
            let hard = hard_threshold(&rp(&[x]), &nv(&[e])).unwrap().bits()[0];
            assert_eq!(logit_form, hard);
        }
    }

    #[test]
    fn sampler_determinism_and_stream_contract() {
        let a = SeededSampler::new(42).sample_noise(4);
        let b = SeededSampler::new(42).sample_noise(4);
        assert_eq!(a, b);

        let mut split = SeededSampler::new(7);
        let mut joined: Vec<f64> = split.sample_noise(3).as_slice().to_vec();
        joined.extend_from_slice(split.sample_noise(2).as_slice());
        assert_eq!(split.counter(), 5);
        assert_eq!(joined, SeededSampler::new(7).sample_noise(5).as_slice());

        let mut jumped = SeededSampler::at_position(7, 0, 3);
        assert_eq!(jumped.sample_noise(2).as_slice(), &joined[3..]);

        let other = SeededSampler::with_stream(7, 1).sample_noise(5);
        assert_ne!(other.as_slice(), joined.as_slice());
    }

    #[test]
    fn sampler_mean_is_one_half() {
        let mut s = SeededSampler::new(2024);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = s.next_uniform();
            assert!(u > 0.0 && u < 1.0);
            sum += u;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn noise_vector_rejects_closed_endpoints() {
        assert!(NoiseVector::new(vec![0.0]).is_err());
        assert!(NoiseVector::new(vec![1.0]).is_err());
    }
}

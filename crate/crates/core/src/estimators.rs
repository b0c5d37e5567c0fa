//! Per-sample losses and gradient estimators of the reparameterized penalty,
//! Monte-Carlo means over a common noise stream, and the finite-difference
//! oracle for the gradient of the expected surrogate.
//!
//! For constraint `i`, with `x = hard_threshold(x̂, ε)` and
//! `s = soft_relax(x̂, ε)`:
//!
//! * `φ̃ᵢ = 1[aᵢ·x − bᵢ > 0] (aᵢ·x − bᵢ)`: the true per-sample penalty,
//! * `φᵢ = 1[aᵢ·x − bᵢ > 0] (aᵢ·s − bᵢ)`: the surrogate (hard gate, soft value),
//! * `gᵢ = 1[aᵢ·x − bᵢ > 0] aᵢ ⊙ ∂s/∂x̂`: the pathwise estimator.
//!
//! `gᵢ` is the derivative of `φᵢ` wherever the gate is locally constant, but
//! `E[gᵢ] ≠ ∇E[φᵢ]` because the gate jumps where `εⱼ = 1 − x̂ⱼ`.

use crate::error::{Error, Result};
use crate::ilp::IlpInstance;
use crate::penalty::{PenaltyConfig, RelaxedPoint};
use crate::reparam::{combined_logits, hard_threshold, sigma, sigma_prime, NoiseVector, SeededSampler};

/// Default central-difference step for the gradient oracle.
pub const DEFAULT_FD_STEP: f64 = 1e-3;
/// Default Monte-Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

/// Monte-Carlo estimate with its standard error (`sample sd / √n`).
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport<T> {
    pub mean: T,
    pub stderr: T,
    pub n: usize,
    pub seed: u64,
}

pub type ScalarEstimate = EstimateReport<f64>;
pub type VectorEstimate = EstimateReport<Vec<f64>>;

fn check_sample(inst: &IlpInstance, i: usize, xhat: &RelaxedPoint, eps: &NoiseVector) -> Result<()> {
    inst.check_index(i)?;
    inst.check_dim(xhat.len())?;
    inst.check_dim(eps.len())
}

fn hard_slack(inst: &IlpInstance, i: usize, xhat: &RelaxedPoint, eps: &NoiseVector) -> Result<f64> {
    let x = hard_threshold(xhat, eps)?;
    Ok(inst.slack_real(i, &x.to_f64()))
}

/// True per-sample penalty `max(aᵢ·x − bᵢ, 0)` at the hard sample.
pub fn phi_tilde(inst: &IlpInstance, i: usize, xhat: &RelaxedPoint, eps: &NoiseVector) -> Result<f64> {
    check_sample(inst, i, xhat, eps)?;
    Ok(hard_slack(inst, i, xhat, eps)?.max(0.0))
}

/// Surrogate: gate from the hard sample, value from the soft sample. May be negative.
pub fn phi_surrogate(inst: &IlpInstance, i: usize, xhat: &RelaxedPoint, eps: &NoiseVector) -> Result<f64> {
    check_sample(inst, i, xhat, eps)?;
    if hard_slack(inst, i, xhat, eps)? <= 0.0 {
        return Ok(0.0);
    }
    let z = combined_logits(xhat.as_slice(), eps.as_slice())?;
    let soft: Vec<f64> = z.into_iter().map(sigma).collect();
    Ok(inst.slack_real(i, &soft))
}

/// Pathwise estimator: `1[violated] · aᵢⱼ · σ′(zⱼ) / (x̂ⱼ(1 − x̂ⱼ))` per coordinate.
pub fn grad_estimator_thm5(
    inst: &IlpInstance,
    i: usize,
    xhat: &RelaxedPoint,
    eps: &NoiseVector,
) -> Result<Vec<f64>> {
    check_sample(inst, i, xhat, eps)?;
    let d = inst.d();
    if hard_slack(inst, i, xhat, eps)? <= 0.0 {
        // still validate the domain so callers see the same errors either way
        combined_logits(xhat.as_slice(), eps.as_slice())?;
        return Ok(vec![0.0; d]);
    }
    let z = combined_logits(xhat.as_slice(), eps.as_slice())?;
    Ok(inst
        .row(i)
        .iter()
        .zip(xhat.as_slice())
        .zip(z)
        .map(|((&a, &x), z)| a * sigma_prime(z) / (x * (1.0 - x)))
        .collect())
}

/// Full-loss pathwise estimator `c + μ Σᵢ gᵢ`.
pub fn penalized_grad_thm5(
    inst: &IlpInstance,
    cfg: PenaltyConfig,
    xhat: &RelaxedPoint,
    eps: &NoiseVector,
) -> Result<Vec<f64>> {
    let mut g = inst.c().to_vec();
    for i in 0..inst.m() {
        for (acc, gi) in g.iter_mut().zip(grad_estimator_thm5(inst, i, xhat, eps)?) {
            *acc += cfg.mu() * gi;
        }
    }
    Ok(g)
}

/// Welford accumulator over fixed-length vectors.
#[derive(Debug, Clone)]
pub(crate) struct RunningMoments {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningMoments {
    pub(crate) fn new(len: usize) -> Self {
        Self { count: 0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    pub(crate) fn push(&mut self, sample: &[f64]) {
        self.count += 1;
        let k = self.count as f64;
        for ((mean, m2), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(sample) {
            let delta = v - *mean;
            *mean += delta / k;
            *m2 += delta * (v - *mean);
        }
    }

    pub(crate) fn mean(&self) -> &[f64] {
        &self.mean
    }

    fn finish(self, seed: u64) -> VectorEstimate {
        let n = self.count as f64;
        let stderr = self.m2.iter().map(|m2| (m2 / (n - 1.0)).sqrt() / n.sqrt()).collect();
        EstimateReport { mean: self.mean, stderr, n: self.count, seed }
    }
}

fn check_samples(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DomainError(format!("at least two samples are required, got {n}")));
    }
    Ok(())
}

/// Mean of a per-sample vector map. Sample `k` always sees the `k`-th block
/// of `d = x̂.len()` uniforms of the seeded stream, whatever `x̂` is.
pub fn mc_mean_vector<F>(f: F, xhat: &RelaxedPoint, n: usize, seed: u64) -> Result<VectorEstimate>
where
    F: Fn(&RelaxedPoint, &NoiseVector) -> Result<Vec<f64>>,
{
    check_samples(n)?;
    let mut sampler = SeededSampler::new(seed);
    let first = f(xhat, &sampler.sample_noise(xhat.len()))?;
    let mut acc = RunningMoments::new(first.len());
    acc.push(&first);
    for _ in 1..n {
        let eps = sampler.sample_noise(xhat.len());
        acc.push(&f(xhat, &eps)?);
    }
    Ok(acc.finish(seed))
}

/// Scalar counterpart of [`mc_mean_vector`].
pub fn mc_mean_scalar<F>(f: F, xhat: &RelaxedPoint, n: usize, seed: u64) -> Result<ScalarEstimate>
where
    F: Fn(&RelaxedPoint, &NoiseVector) -> Result<f64>,
{
    let r = mc_mean_vector(|x, e| f(x, e).map(|v| vec![v]), xhat, n, seed)?;
    Ok(EstimateReport { mean: r.mean[0], stderr: r.stderr[0], n: r.n, seed })
}

/// Central differences of `E_ε[φᵢ]` under common random numbers: every
/// perturbed point reuses the same noise blocks, and the standard error is
/// that of the paired per-sample difference quotients.
pub fn fd_grad_of_expected_surrogate(
    inst: &IlpInstance,
    i: usize,
    xhat: &RelaxedPoint,
    n: usize,
    seed: u64,
    h: f64,
) -> Result<VectorEstimate> {
    inst.check_index(i)?;
    inst.check_dim(xhat.len())?;
    if !(h > 0.0) {
        return Err(Error::DomainError(format!("finite-difference step {h} must be positive")));
    }
    if let Some(x) = xhat.as_slice().iter().find(|&&x| x - h <= 0.0 || x + h >= 1.0) {
        return Err(Error::DomainError(format!(
            "coordinate {x} is within the finite-difference step {h} of the boundary"
        )));
    }
    let shifted = |j: usize, sign: f64| {
        let mut v = xhat.as_slice().to_vec();
        v[j] += sign * h;
        RelaxedPoint::new(v)
    };
    let plus: Vec<RelaxedPoint> = (0..xhat.len()).map(|j| shifted(j, 1.0)).collect::<Result<_>>()?;
    let minus: Vec<RelaxedPoint> = (0..xhat.len()).map(|j| shifted(j, -1.0)).collect::<Result<_>>()?;
    mc_mean_vector(
        |_, eps| {
            plus.iter()
                .zip(&minus)
                .map(|(p, q)| Ok((phi_surrogate(inst, i, p, eps)? - phi_surrogate(inst, i, q, eps)?) / (2.0 * h)))
                .collect()
        },
        xhat,
        n,
        seed,
    )
}

/// Pathwise-estimator mean against the finite-difference oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasReport {
    pub estimator_mean: VectorEstimate,
    pub oracle_grad: VectorEstimate,
    /// `estimator_mean − oracle_grad`.
    pub gap: Vec<f64>,
    /// `sqrt(se_estimator² + se_oracle²)` per coordinate.
    pub gap_stderr: Vec<f64>,
}

pub fn bias_report(
    inst: &IlpInstance,
    i: usize,
    xhat: &RelaxedPoint,
    n: usize,
    seed: u64,
    h: f64,
) -> Result<BiasReport> {
    let estimator_mean = mc_mean_vector(|x, e| grad_estimator_thm5(inst, i, x, e), xhat, n, seed)?;
    let oracle_grad = fd_grad_of_expected_surrogate(inst, i, xhat, n, seed, h)?;
    let gap = estimator_mean.mean.iter().zip(&oracle_grad.mean).map(|(g, o)| g - o).collect();
    let gap_stderr = estimator_mean
        .stderr
        .iter()
        .zip(&oracle_grad.stderr)
        .map(|(a, b)| a.hypot(*b))
        .collect();
    Ok(BiasReport { estimator_mean, oracle_grad, gap, gap_stderr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::expected_penalty_exact;
    use approx::assert_abs_diff_eq;

    fn inst(a: Vec<Vec<f64>>, b: Vec<f64>) -> IlpInstance {
        let d = a[0].len();
        IlpInstance::new(a, b, vec![0.0; d]).unwrap()
    }

    fn rp(v: &[f64]) -> RelaxedPoint {
        RelaxedPoint::new(v.to_vec()).unwrap()
    }

    fn nv(v: &[f64]) -> NoiseVector {
        NoiseVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn phi_tilde_examples() {
        let one = inst(vec![vec![1.0]], vec![0.95]);
        assert_abs_diff_eq!(phi_tilde(&one, 0, &rp(&[0.5]), &nv(&[0.9])).unwrap(), 0.05, epsilon = 1e-15);
        assert_eq!(phi_tilde(&one, 0, &rp(&[0.5]), &nv(&[0.2])).unwrap(), 0.0);
        let l = inst(vec![vec![1.0, 1.0]], vec![1.5]);
        assert_eq!(phi_tilde(&l, 0, &rp(&[0.9, 0.9]), &nv(&[0.5, 0.5])).unwrap(), 0.5);
        assert!(matches!(
            phi_tilde(&l, 1, &rp(&[0.9, 0.9]), &nv(&[0.5, 0.5])),
            Err(Error::IndexOutOfRange { index: 1, m: 1 })
        ));
    }

    #[test]
    fn phi_surrogate_examples() {
        let one = inst(vec![vec![1.0]], vec![0.95]);
        assert_abs_diff_eq!(phi_surrogate(&one, 0, &rp(&[0.5]), &nv(&[0.9])).unwrap(), -0.05, epsilon = 1e-15);
        assert_eq!(phi_surrogate(&one, 0, &rp(&[0.5]), &nv(&[0.2])).unwrap(), 0.0);
        let half = inst(vec![vec![1.0]], vec![0.5]);
        assert_abs_diff_eq!(phi_surrogate(&half, 0, &rp(&[0.75]), &nv(&[0.75])).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn thm5_examples() {
        let one = inst(vec![vec![1.0]], vec![0.95]);
        assert_abs_diff_eq!(grad_estimator_thm5(&one, 0, &rp(&[0.5]), &nv(&[0.9])).unwrap()[0], 0.36, epsilon = 1e-14);
        assert_eq!(grad_estimator_thm5(&one, 0, &rp(&[0.5]), &nv(&[0.2])).unwrap(), vec![0.0]);
        let two = inst(vec![vec![2.0]], vec![0.95]);
        assert_abs_diff_eq!(grad_estimator_thm5(&two, 0, &rp(&[0.5]), &nv(&[0.9])).unwrap()[0], 0.72, epsilon = 1e-14);
        assert!(matches!(
            grad_estimator_thm5(&one, 0, &rp(&[1.0]), &nv(&[0.9])),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn constant_map_has_zero_stderr() {
        let r = mc_mean_scalar(|_, _| Ok(1.0), &rp(&[0.3, 0.6]), 1000, 9).unwrap();
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.stderr, 0.0);
        assert_eq!((r.n, r.seed), (1000, 9));
        assert!(mc_mean_scalar(|_, _| Ok(1.0), &rp(&[0.3]), 1, 9).is_err());
    }

    #[test]
    fn common_random_numbers_are_position_determined() {
        let e0 = |x: &RelaxedPoint, e: &NoiseVector| Ok(e.as_slice()[0] + 0.0 * x.as_slice()[0]);
        let a = mc_mean_scalar(e0, &rp(&[0.2]), 500, 3).unwrap();
        let b = mc_mean_scalar(e0, &rp(&[0.8]), 500, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn surrogate_value_mean_is_unbiased_for_true_penalty() {
        let one = inst(vec![vec![1.0]], vec![0.95]);
        let x = rp(&[0.5]);
        let r = mc_mean_scalar(|x, e| phi_tilde(&one, 0, x, e), &x, 200_000, 1).unwrap();
        let exact = expected_penalty_exact(&one, &x).unwrap()[0];
        assert!((r.mean - exact).abs() <= 4.0 * r.stderr, "{r:?} vs {exact}");
    }

    #[test]
    fn never_violated_instance_has_zero_oracle_and_gap() {
        let never = inst(vec![vec![1.0, 0.5]], vec![2.0]);
        let r = bias_report(&never, 0, &rp(&[0.4, 0.6]), 1000, 4, 1e-3).unwrap();
        assert_eq!(r.gap, vec![0.0, 0.0]);
        assert_eq!(r.oracle_grad.mean, vec![0.0, 0.0]);
    }

    #[test]
    fn oracle_rejects_points_near_boundary() {
        let one = inst(vec![vec![1.0]], vec![0.95]);
        assert!(fd_grad_of_expected_surrogate(&one, 0, &rp(&[0.0005]), 10, 1, 1e-3).is_err());
        assert!(fd_grad_of_expected_surrogate(&one, 0, &rp(&[0.5]), 10, 1, 0.0).is_err());
    }
}

//! Projected stochastic-gradient iteration on the penalized objective under a
//! choice of per-sample gradient.

use std::fmt;
use std::str::FromStr;

use crate::closed_forms::boundary_shift_1d;
use crate::error::{Error, Result};
use crate::estimators::{grad_estimator_thm5, mc_mean_vector, penalized_grad_thm5, RunningMoments, VectorEstimate};
use crate::ilp::IlpInstance;
use crate::penalty::{expected_penalty_grad_exact, penalized_objective, PenaltyConfig, RelaxedPoint};
use crate::reparam::{NoiseVector, SeededSampler, DEFAULT_CLAMP};
use crate::table::render_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Pathwise estimator `c + μ Σᵢ gᵢ`.
    Thm5,
    /// Pathwise estimator plus the one-dimensional boundary shift.
    Corrected1d,
    /// Exact gradient of the penalized objective (no noise).
    ExactPenaltyGrad,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Thm5 => "thm5",
            EstimatorKind::Corrected1d => "corrected-1d",
            EstimatorKind::ExactPenaltyGrad => "exact-penalty-grad",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm5" => Ok(EstimatorKind::Thm5),
            "corrected-1d" | "corrected_1d" => Ok(EstimatorKind::Corrected1d),
            "exact-penalty-grad" | "exact_penalty_grad" => Ok(EstimatorKind::ExactPenaltyGrad),
            other => Err(Error::DomainError(format!("unknown estimator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig {
    pub step_size: f64,
    pub steps: usize,
    pub batch: usize,
    pub clamp: f64,
    pub seed: u64,
    pub estimator: EstimatorKind,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            step_size: 0.05,
            steps: 2000,
            batch: 32,
            clamp: DEFAULT_CLAMP,
            seed: 0,
            estimator: EstimatorKind::Thm5,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::DomainError(format!("step size {} must be positive", self.step_size)));
        }
        if self.steps == 0 || self.batch == 0 {
            return Err(Error::DomainError("steps and batch must be at least 1".into()));
        }
        if !(self.clamp > 0.0 && self.clamp < 0.5) {
            return Err(Error::DomainError(format!("clamp {} must lie in (0, 0.5)", self.clamp)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub step: usize,
    pub point: Vec<f64>,
    /// Batch gradient evaluated at `point`.
    pub gradient: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `steps + 1` records; the last one holds the terminal point.
    pub records: Vec<TrajectoryStep>,
    /// Penalized objective at the terminal point, when enumerable.
    pub terminal_objective: Option<f64>,
}

impl Trajectory {
    pub fn terminal(&self) -> &[f64] {
        &self.records.last().expect("trajectory is never empty").point
    }

    /// Rows `step, x̂₁..x̂_d, g₁..g_d` under a one-line header.
    pub fn to_csv(&self) -> String {
        let d = self.terminal().len();
        let mut header = vec!["step".to_string()];
        header.extend((1..=d).map(|j| format!("x{j}")));
        header.extend((1..=d).map(|j| format!("g{j}")));
        let rows: Vec<Vec<f64>> = self
            .records
            .iter()
            .map(|r| {
                let mut row = vec![r.step as f64];
                row.extend_from_slice(&r.point);
                row.extend_from_slice(&r.gradient);
                row
            })
            .collect();
        render_csv(&header, &rows)
    }
}

fn corrected_sample(inst: &IlpInstance, cfg: PenaltyConfig, x: &RelaxedPoint, eps: &NoiseVector) -> Result<Vec<f64>> {
    let mut g = inst.c()[0];
    for i in 0..inst.m() {
        let gi = grad_estimator_thm5(inst, i, x, eps)?[0];
        g += cfg.mu() * (gi + boundary_shift_1d(inst.row(i)[0], inst.b()[i]));
    }
    Ok(vec![g])
}

fn batch_gradient(
    inst: &IlpInstance,
    cfg: PenaltyConfig,
    x: &RelaxedPoint,
    s: &SgdConfig,
    sampler: &mut SeededSampler,
) -> Result<Vec<f64>> {
    match s.estimator {
        EstimatorKind::ExactPenaltyGrad => {
            let grad = expected_penalty_grad_exact(inst, x)?;
            Ok(inst.c().iter().zip(grad).map(|(c, g)| c + cfg.mu() * g).collect())
        }
        kind => {
            let mut acc = RunningMoments::new(inst.d());
            for _ in 0..s.batch {
                let eps = sampler.sample_noise(inst.d());
                let g = match kind {
                    EstimatorKind::Thm5 => penalized_grad_thm5(inst, cfg, x, &eps)?,
                    _ => corrected_sample(inst, cfg, x, &eps)?,
                };
                acc.push(&g);
            }
            Ok(acc.mean().to_vec())
        }
    }
}

/// `x ← clamp(x − η·ĝ(x), δ, 1 − δ)` for `s.steps` steps, fresh noise per step.
pub fn sgd_run(inst: &IlpInstance, cfg: PenaltyConfig, x0: &RelaxedPoint, s: &SgdConfig) -> Result<Trajectory> {
    s.validate()?;
    inst.check_dim(x0.len())?;
    match s.estimator {
        EstimatorKind::Corrected1d if inst.d() != 1 => return Err(Error::UnsupportedEstimator("corrected-1d")),
        EstimatorKind::ExactPenaltyGrad => inst.check_enumerable()?,
        _ => {}
    }
    let mut sampler = SeededSampler::new(s.seed);
    let mut x = x0.clamped(s.clamp).0;
    let mut records = Vec::with_capacity(s.steps + 1);
    for step in 0..=s.steps {
        let gradient = batch_gradient(inst, cfg, &x, s, &mut sampler)?;
        let next: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(&gradient)
            .map(|(xj, gj)| (xj - s.step_size * gj).clamp(s.clamp, 1.0 - s.clamp))
            .collect();
        records.push(TrajectoryStep { step, point: x.as_slice().to_vec(), gradient });
        if step < s.steps {
            x = RelaxedPoint::new(next)?;
        }
    }
    let terminal_objective = if inst.d() <= inst.enumeration_cap() {
        Some(penalized_objective(inst, &x, cfg)?)
    } else {
        None
    };
    Ok(Trajectory { records, terminal_objective })
}

/// Mean of the full-loss pathwise estimator at `x̂` (clamped to the default δ).
pub fn expected_drift(
    inst: &IlpInstance,
    cfg: PenaltyConfig,
    xhat: &RelaxedPoint,
    n: usize,
    seed: u64,
) -> Result<VectorEstimate> {
    inst.check_dim(xhat.len())?;
    let x = xhat.clamped(DEFAULT_CLAMP).0;
    mc_mean_vector(|x, e| penalized_grad_thm5(inst, cfg, x, e), &x, n, seed)
}

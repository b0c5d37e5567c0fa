//! Exact expected hinge penalties under the product Bernoulli distribution
//! `P_x̂ = ⊗ⱼ Bernoulli(x̂ⱼ)`, by enumeration of the `2^d` corners.

use crate::error::{Error, Result};
use crate::ilp::{corner_bit, corner_count, enumerate_solve, BinaryPoint, IlpInstance};

/// Sum of expected penalties below which a point counts as penalty-free.
pub const ZERO_PENALTY_TOL: f64 = 1e-12;
/// Absolute tolerance for ties in grid scans.
pub const GRID_TIE_TOL: f64 = 1e-9;
/// Largest dimension for which grid scans are run.
pub const MAX_GRID_DIM: usize = 4;

/// A point of `[0,1]^d`, read as the parameter of a product Bernoulli law.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedPoint(Vec<f64>);

impl RelaxedPoint {
    pub fn new(xhat: Vec<f64>) -> Result<Self> {
        if let Some(v) = xhat.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::DomainError(format!("relaxed coordinate {v} is outside [0, 1]")));
        }
        Ok(Self(xhat))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Clamps every coordinate into `[delta, 1 - delta]`; the flag reports
    /// whether any coordinate moved.
    pub fn clamped(&self, delta: f64) -> (RelaxedPoint, bool) {
        let mut moved = false;
        let v = self
            .0
            .iter()
            .map(|&x| {
                let y = x.clamp(delta, 1.0 - delta);
                moved |= y != x;
                y
            })
            .collect();
        (RelaxedPoint(v), moved)
    }

    /// True when every coordinate is exactly 0 or 1.
    pub fn as_binary(&self) -> Option<BinaryPoint> {
        BinaryPoint::from_f64(&self.0)
    }
}

impl From<&BinaryPoint> for RelaxedPoint {
    fn from(x: &BinaryPoint) -> Self {
        RelaxedPoint(x.to_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    mu: f64,
}

impl PenaltyConfig {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::DomainError(format!("penalty weight {mu} must be finite and >= 0")));
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// `∏ⱼ x̂ⱼ^{xⱼ} (1 − x̂ⱼ)^{1 − xⱼ}`.
pub fn bernoulli_weight(xhat: &RelaxedPoint, x: &BinaryPoint) -> Result<f64> {
    if xhat.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: xhat.len(), got: x.len() });
    }
    Ok(xhat
        .0
        .iter()
        .zip(x.bits())
        .map(|(&p, &bit)| if bit { p } else { 1.0 - p })
        .product())
}

fn weight_mask(xhat: &[f64], mask: u64, skip: Option<usize>) -> f64 {
    let d = xhat.len();
    let mut w = 1.0;
    for (j, &p) in xhat.iter().enumerate() {
        if Some(j) == skip {
            continue;
        }
        w *= if corner_bit(mask, j, d) { p } else { 1.0 - p };
    }
    w
}

fn check(inst: &IlpInstance, xhat: &RelaxedPoint) -> Result<()> {
    inst.check_enumerable()?;
    inst.check_dim(xhat.len())
}

/// Per-constraint expectations `Φᵢ(x̂) = E_{x∼P_x̂}[max(aᵢ·x − bᵢ, 0)]`.
pub fn expected_penalty_exact(inst: &IlpInstance, xhat: &RelaxedPoint) -> Result<Vec<f64>> {
    check(inst, xhat)?;
    let mut phi = vec![0.0; inst.m()];
    for mask in 0..corner_count(inst.d()) {
        let w = weight_mask(&xhat.0, mask, None);
        if w == 0.0 {
            continue;
        }
        for (i, acc) in phi.iter_mut().enumerate() {
            let s = inst.slack_mask(i, mask);
            if s > 0.0 {
                *acc += w * s;
            }
        }
    }
    Ok(phi)
}

/// Exact gradient of `Σᵢ Φᵢ`, from the identity
/// `∂ₖ E[h] = E[h | xₖ = 1] − E[h | xₖ = 0]`.
pub fn expected_penalty_grad_exact(inst: &IlpInstance, xhat: &RelaxedPoint) -> Result<Vec<f64>> {
    check(inst, xhat)?;
    let d = inst.d();
    let hinge: Vec<f64> = (0..corner_count(d))
        .map(|mask| (0..inst.m()).map(|i| inst.slack_mask(i, mask).max(0.0)).sum())
        .collect();
    let mut grad = vec![0.0; d];
    for (k, g) in grad.iter_mut().enumerate() {
        let bit = 1u64 << (d - 1 - k);
        for mask in (0..corner_count(d)).filter(|m| m & bit == 0) {
            let diff = hinge[(mask | bit) as usize] - hinge[mask as usize];
            if diff != 0.0 {
                *g += weight_mask(&xhat.0, mask, Some(k)) * diff;
            }
        }
    }
    Ok(grad)
}

/// `c·x̂ + μ Σᵢ Φᵢ(x̂)`.
pub fn penalized_objective(inst: &IlpInstance, xhat: &RelaxedPoint, cfg: PenaltyConfig) -> Result<f64> {
    let phi: f64 = expected_penalty_exact(inst, xhat)?.iter().sum();
    Ok(inst.objective(xhat.as_slice()) + cfg.mu() * phi)
}

/// Uniform grid `{k / (resolution − 1)}^d`, which always includes every corner.
pub fn grid_points(d: usize, resolution: usize) -> Result<Vec<RelaxedPoint>> {
    if d > MAX_GRID_DIM {
        return Err(Error::GridTooLarge { d, resolution });
    }
    if resolution < 2 {
        return Err(Error::DomainError(format!("grid resolution {resolution} must be at least 2")));
    }
    let step = (resolution - 1) as f64;
    let total = resolution.pow(d as u32);
    Ok((0..total)
        .map(|mut idx| {
            let mut v = vec![0.0; d];
            for slot in v.iter_mut().rev() {
                *slot = (idx % resolution) as f64 / step;
                idx /= resolution;
            }
            RelaxedPoint(v)
        })
        .collect())
}

struct GridEval {
    point: RelaxedPoint,
    objective: f64,
    penalty: f64,
}

fn evaluate_grid(inst: &IlpInstance, resolution: usize) -> Result<Vec<GridEval>> {
    inst.check_enumerable()?;
    grid_points(inst.d(), resolution)?
        .into_iter()
        .map(|point| {
            let penalty = expected_penalty_exact(inst, &point)?.iter().sum();
            let objective = inst.objective(point.as_slice());
            Ok(GridEval { point, objective, penalty })
        })
        .collect()
}

fn argmin_within<'a>(
    items: impl Iterator<Item = (&'a GridEval, f64)> + Clone,
) -> Vec<RelaxedPoint> {
    let best = items.clone().map(|(_, v)| v).fold(f64::INFINITY, f64::min);
    items
        .filter(|&(_, v)| v <= best + GRID_TIE_TOL)
        .map(|(e, _)| e.point.clone())
        .collect()
}

/// All grid points attaining the grid minimum of the penalized objective.
pub fn grid_argmin_penalized(
    inst: &IlpInstance,
    cfg: PenaltyConfig,
    resolution: usize,
) -> Result<Vec<RelaxedPoint>> {
    let evals = evaluate_grid(inst, resolution)?;
    Ok(argmin_within(evals.iter().map(|e| (e, e.objective + cfg.mu() * e.penalty))))
}

/// Smallest summed expected penalty on the grid (zero iff some grid point is penalty-free).
pub fn grid_min_penalty(inst: &IlpInstance, resolution: usize) -> Result<f64> {
    Ok(evaluate_grid(inst, resolution)?
        .iter()
        .map(|e| e.penalty)
        .fold(f64::INFINITY, f64::min))
}

/// Both sides of the binary-equivalence check.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub holds: bool,
    /// Minimizers of `c·x̂` over penalty-free grid points, binary or not.
    pub relaxed_minimizers: Vec<RelaxedPoint>,
    /// The binary members of `relaxed_minimizers`, in lexicographic order.
    pub binary_minimizers: Vec<BinaryPoint>,
    /// Optimal set of the ILP by enumeration.
    pub enumerated: Vec<BinaryPoint>,
}

/// Compares the binary points among the penalty-free grid minimizers of
/// `c·x̂` with the ILP's enumerated optimal set.
pub fn verify_binary_equivalence(inst: &IlpInstance, resolution: usize) -> Result<EquivalenceReport> {
    let solved = enumerate_solve(inst)?;
    if !solved.feasible {
        return Err(Error::InfeasibleInstance);
    }
    let evals = evaluate_grid(inst, resolution)?;
    let relaxed_minimizers = argmin_within(
        evals
            .iter()
            .filter(|e| e.penalty < ZERO_PENALTY_TOL)
            .map(|e| (e, e.objective)),
    );
    let mut binary_minimizers: Vec<BinaryPoint> =
        relaxed_minimizers.iter().filter_map(RelaxedPoint::as_binary).collect();
    binary_minimizers.sort();
    Ok(EquivalenceReport {
        holds: binary_minimizers == solved.optimal_set,
        relaxed_minimizers,
        binary_minimizers,
        enumerated: solved.optimal_set,
    })
}

/// Lipschitz constant of the penalized objective per unit step in each
/// coordinate: `‖c‖₂√d + μ Σᵢ ‖aᵢ‖₁`.
pub fn grid_lipschitz_bound(inst: &IlpInstance, cfg: PenaltyConfig) -> f64 {
    let c_norm = inst.c().iter().map(|v| v * v).sum::<f64>().sqrt();
    let a_l1: f64 = inst.a().iter().flatten().map(|v| v.abs()).sum();
    c_norm * (inst.d() as f64).sqrt() + cfg.mu() * a_l1
}

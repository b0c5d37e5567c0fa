//! Closed forms for the single-constraint instances in one and two
//! dimensions with `c = 0`, `μ = 1`.
//!
//! Everything is built on
//!
//! ```text
//! f₁(x̂) = −∫_{1−x̂}^1 dε / (1 + (x̂/(1−x̂))·(ε/(1−ε)))
//!       = x̂(1−x̂)/(2x̂−1)² · [ln(2−2x̂) + 2x̂ − 1],      f₁(½) = −1/8,
//! ```
//!
//! which is non-positive, convex and vanishes at both endpoints. In the
//! variable `u = 2x̂ − 1` it has the expansion
//! `f₁ = −1/8 − u/12 + Σ_{n≥2} uⁿ / (2n(n+2))`.
//!
//! With `E[soft sample] over {ε > 1 − x̂}` written through `f₁`, the expected
//! surrogate is `φ̂ = a f₁ + (a − b) x̂` and the expected pathwise estimator is
//! `ĝ = a (f₁′ + ½)`. The gate jumps by `a/2 − b` across `ε = 1 − x̂`, so
//! `ĝ = φ̂′ + (b − a/2)`: the estimator descends `φ̂̂ = φ̂ + (b − a/2) x̂`.
//!
//! The smallest instance of the same failure is `f(x̂, ε) = 1[ε ≤ x̂] x̂`: the
//! pathwise derivative averages to `x̂`, while `E[f] = x̂²` has derivative `2x̂`.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::reparam::{sigma_inv, sigma_prime};

/// Half-width of the series window around `x̂ = ½`, measured in `u = 2x̂ − 1`.
pub const SERIES_WINDOW: f64 = 2e-3;
/// Absolute tolerance of [`f1_quadrature`].
pub const QUADRATURE_TOL: f64 = 1e-10;
const GOLDEN_MAX_ITER: usize = 500;

fn check_closed_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError(format!("{x} is outside [0, 1]")));
    }
    Ok(())
}

fn check_open_unit(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::DomainError(format!("{x} is outside (0, 1)")));
    }
    Ok(())
}

/// Per-sample loss of the minimal example, `1[ε ≤ x̂] x̂`.
pub fn min_example_f(xhat: f64, eps: f64) -> Result<f64> {
    check_open_unit(xhat)?;
    check_open_unit(eps)?;
    Ok(if eps <= xhat { xhat } else { 0.0 })
}

/// Pathwise derivative of [`min_example_f`], `1[ε ≤ x̂]`, valid for `ε ≠ x̂`.
pub fn min_example_df(xhat: f64, eps: f64) -> Result<f64> {
    check_open_unit(xhat)?;
    check_open_unit(eps)?;
    Ok(if eps <= xhat { 1.0 } else { 0.0 })
}

/// `E_ε[∂f/∂x̂] = x̂`.
pub fn min_example_exp_of_grad(xhat: f64) -> Result<f64> {
    check_open_unit(xhat)?;
    Ok(xhat)
}

/// `d/dx̂ E_ε[f] = d/dx̂ x̂² = 2x̂`.
pub fn min_example_grad_of_exp(xhat: f64) -> Result<f64> {
    check_open_unit(xhat)?;
    Ok(2.0 * xhat)
}

/// `ln(1 − u) + u`.
fn log_remainder(u: f64) -> f64 {
    (-u).ln_1p() + u
}

/// `f₁` on `[0, 1]`, continuously extended to the endpoints.
pub fn f1(xhat: f64) -> Result<f64> {
    check_closed_unit(xhat)?;
    if xhat == 0.0 || xhat == 1.0 {
        return Ok(0.0);
    }
    let u = 2.0 * xhat - 1.0;
    if u.abs() < SERIES_WINDOW {
        return Ok(-1.0 / 8.0 - u / 12.0 + u * u / 16.0 + u * u * u / 30.0);
    }
    Ok(xhat * (1.0 - xhat) / (u * u) * log_remainder(u))
}

/// `f₁′` on `[0, 1)`; diverges logarithmically at 1.
pub fn f1_prime(xhat: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xhat) {
        return Err(Error::DomainError(format!("f1' is defined on [0, 1), got {xhat}")));
    }
    let u = 2.0 * xhat - 1.0;
    if u.abs() < SERIES_WINDOW {
        return Ok(-1.0 / 6.0 + u / 4.0 + u * u / 5.0 + u * u * u / 6.0);
    }
    Ok(-log_remainder(u) / (u * u * u) - (1.0 + u) / (2.0 * u))
}

/// `f₁` from its defining integral; the independent oracle for [`f1`].
pub fn f1_quadrature(xhat: f64) -> Result<f64> {
    check_open_unit(xhat)?;
    let q = 1.0 - xhat;
    // 1 / (1 + (x̂/(1−x̂))(ε/(1−ε))) without forming the odds ratio
    let integrand = |eps: f64| {
        let num = q * (1.0 - eps);
        num / (num + xhat * eps)
    };
    quadrature::integrate(integrand, 1.0 - xhat, 1.0, QUADRATURE_TOL).map(|v| -v)
}

/// Single constraint `a x ≤ b` in one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalar1DProblem {
    pub a: f64,
    pub b: f64,
}

impl Scalar1DProblem {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && b.is_finite()) {
            return Err(Error::DomainError(format!("need finite a > 0 and finite b, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    /// `a > b > 0`: only `x = 0` is feasible and the gate is `1[ε ≥ 1 − x̂]`.
    pub fn is_standard_regime(&self) -> bool {
        self.a > self.b && self.b > 0.0
    }

    /// `b ≥ a`: the constraint can never be violated.
    pub fn is_never_violated(&self) -> bool {
        self.b >= self.a
    }

    fn check_closed_form(&self) -> Result<()> {
        if self.b < 0.0 {
            return Err(Error::DomainError(format!(
                "closed forms cover b >= 0, got b = {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// Expected surrogate `φ̂ = a f₁ + (a − b) x̂`.
pub fn phi_hat_1d(p: &Scalar1DProblem, xhat: f64) -> Result<f64> {
    p.check_closed_form()?;
    check_closed_unit(xhat)?;
    if p.is_never_violated() {
        return Ok(0.0);
    }
    Ok(p.a * f1(xhat)? + (p.a - p.b) * xhat)
}

/// `φ̂′ = a f₁′ + (a − b)`.
pub fn phi_hat_prime_1d(p: &Scalar1DProblem, xhat: f64) -> Result<f64> {
    p.check_closed_form()?;
    if p.is_never_violated() {
        check_closed_unit(xhat)?;
        return Ok(0.0);
    }
    Ok(p.a * f1_prime(xhat)? + (p.a - p.b))
}

/// Expected pathwise estimator `ĝ = E_ε[g] = a (f₁′ + ½)`.
pub fn g_hat_1d(p: &Scalar1DProblem, xhat: f64) -> Result<f64> {
    p.check_closed_form()?;
    if p.is_never_violated() {
        check_closed_unit(xhat)?;
        return Ok(0.0);
    }
    Ok(p.a * (f1_prime(xhat)? + 0.5))
}

/// `a/2 + φ̂′ = a (f₁′ + ½) + (a − b)`. Exceeds [`g_hat_1d`] by `a − b`: the
/// `(a − b)` slope of `φ̂` is itself a boundary contribution, not part of `E[g]`.
pub fn half_a_plus_phi_hat_prime_1d(p: &Scalar1DProblem, xhat: f64) -> Result<f64> {
    Ok(0.5 * p.a + phi_hat_prime_1d(p, xhat)?)
}

/// Effective potential `φ̂̂ = φ̂ + (b − a/2) x̂`, whose derivative is [`g_hat_1d`].
pub fn phi_hat_hat_1d(p: &Scalar1DProblem, xhat: f64) -> Result<f64> {
    let phi = phi_hat_1d(p, xhat)?;
    if p.is_never_violated() {
        return Ok(0.0);
    }
    Ok(phi + (p.b - 0.5 * p.a) * xhat)
}

/// Amount to add to a 1D pathwise sample so its mean becomes `φ̂′`.
///
/// The gate on the `x = 1` side switches on across `ε = 1 − x̂` when `a > b`,
/// the gate on the `x = 0` side switches off there when `b < 0`, and at the
/// switch the soft value is `a/2 − b`. When both or neither side is violated
/// the gate does not depend on `x̂` and nothing is added.
pub fn boundary_shift_1d(a: f64, b: f64) -> f64 {
    let upper = (a - b > 0.0) as i32 as f64;
    let lower = (-b > 0.0) as i32 as f64;
    (0.5 * a - b) * (upper - lower)
}

/// Pathwise sample at `(x̂, ε)` plus [`boundary_shift_1d`]; unbiased for `φ̂′`.
pub fn corrected_grad_1d(p: &Scalar1DProblem, xhat: f64, eps: f64) -> Result<f64> {
    check_open_unit(xhat)?;
    check_open_unit(eps)?;
    let hard = if eps >= 1.0 - xhat { 1.0 } else { 0.0 };
    let g = if p.a * hard - p.b > 0.0 {
        let z = sigma_inv(xhat)? + sigma_inv(eps)?;
        p.a * sigma_prime(z) / (xhat * (1.0 - xhat))
    } else {
        0.0
    };
    Ok(g + boundary_shift_1d(p.a, p.b))
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub fn minimizer_1d<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::DomainError(format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_MAX_ITER {
        if b - a <= tol {
            return Ok(0.5 * (a + b));
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Err(Error::NonConvergence { iterations: GOLDEN_MAX_ITER })
}

/// Single constraint `a₁x₁ + a₂x₂ ≤ b` with `a₁ + a₂ > b ≥ a₁ ≥ a₂ > 0`, so a
/// sample violates it exactly when both coordinates fire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Planar2DProblem {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

impl Planar2DProblem {
    pub fn new(a1: f64, a2: f64, b: f64) -> Result<Self> {
        let ok = [a1, a2, b].iter().all(|v| v.is_finite()) && a1 + a2 > b && b >= a1 && a1 >= a2 && a2 > 0.0;
        if !ok {
            return Err(Error::DomainError(format!(
                "need a1 + a2 > b >= a1 >= a2 > 0, got ({a1}, {a2}, {b})"
            )));
        }
        Ok(Self { a1, a2, b })
    }
}

fn check_square(x: [f64; 2]) -> Result<()> {
    check_closed_unit(x[0])?;
    check_closed_unit(x[1])
}

/// `φ̂ = x̂₂a₁f₁(x̂₁) + x̂₁a₂f₁(x̂₂) + (a₁ + a₂ − b)x̂₁x̂₂`.
pub fn phi_hat_2d(p: &Planar2DProblem, x: [f64; 2]) -> Result<f64> {
    check_square(x)?;
    Ok(x[1] * p.a1 * f1(x[0])? + x[0] * p.a2 * f1(x[1])? + (p.a1 + p.a2 - p.b) * x[0] * x[1])
}

/// Analytic gradient of [`phi_hat_2d`] on `[0, 1)²`.
pub fn grad_phi_hat_2d(p: &Planar2DProblem, x: [f64; 2]) -> Result<[f64; 2]> {
    check_square(x)?;
    let k = p.a1 + p.a2 - p.b;
    Ok([
        x[1] * p.a1 * f1_prime(x[0])? + p.a2 * f1(x[1])? + k * x[1],
        x[0] * p.a2 * f1_prime(x[1])? + p.a1 * f1(x[0])? + k * x[0],
    ])
}

/// Expected pathwise estimator `[x̂₂a₁(½ + f₁′(x̂₁)), x̂₁a₂(½ + f₁′(x̂₂))]`.
pub fn g_hat_2d(p: &Planar2DProblem, x: [f64; 2]) -> Result<[f64; 2]> {
    check_square(x)?;
    Ok([
        x[1] * p.a1 * (0.5 + f1_prime(x[0])?),
        x[0] * p.a2 * (0.5 + f1_prime(x[1])?),
    ])
}

/// Scalar curl `∂₂ĝ₁ − ∂₁ĝ₂ = a₁(f₁′(x̂₁) + ½) − a₂(f₁′(x̂₂) + ½)`.
pub fn curl_2d(p: &Planar2DProblem, x: [f64; 2]) -> Result<f64> {
    check_open_unit(x[0])?;
    check_open_unit(x[1])?;
    Ok(p.a1 * (f1_prime(x[0])? + 0.5) - p.a2 * (f1_prime(x[1])? + 0.5))
}

fn check_loop(center: [f64; 2], radius: f64) -> Result<()> {
    if !(radius >= 0.0) {
        return Err(Error::DomainError(format!("loop radius {radius} must be >= 0")));
    }
    let inside = center.iter().all(|&c| c - radius > 0.0 && c + radius < 1.0);
    if !inside {
        return Err(Error::LoopOutsideDomain { cx: center[0], cy: center[1], radius });
    }
    Ok(())
}

/// Counter-clockwise line integral of `field` around the axis-aligned square
/// of half-side `radius`, composite trapezoid with `n` intervals per side.
pub fn circulation<F>(field: F, center: [f64; 2], radius: f64, n: usize) -> Result<f64>
where
    F: Fn([f64; 2]) -> Result<[f64; 2]>,
{
    check_loop(center, radius)?;
    if n == 0 {
        return Err(Error::DomainError("circulation needs at least one interval per side".into()));
    }
    if radius == 0.0 {
        return Ok(0.0);
    }
    let [cx, cy] = center;
    let corners = [
        [cx - radius, cy - radius],
        [cx + radius, cy - radius],
        [cx + radius, cy + radius],
        [cx - radius, cy + radius],
    ];
    let mut total = 0.0;
    for k in 0..4 {
        let from = corners[k];
        let to = corners[(k + 1) % 4];
        let step = [(to[0] - from[0]) / n as f64, (to[1] - from[1]) / n as f64];
        let mut side = 0.0;
        for s in 0..=n {
            let pt = [from[0] + s as f64 * step[0], from[1] + s as f64 * step[1]];
            let v = field(pt)?;
            let w = if s == 0 || s == n { 0.5 } else { 1.0 };
            side += w * (v[0] * step[0] + v[1] * step[1]);
        }
        total += side;
    }
    Ok(total)
}

/// `∬ curl_2d` over the same square as [`circulation`].
///
/// `curl_2d` is `∂₂g₁ − ∂₁g₂`, so the counter-clockwise circulation equals
/// minus this integral.
pub fn curl_area_integral(p: &Planar2DProblem, center: [f64; 2], radius: f64) -> Result<f64> {
    check_loop(center, radius)?;
    if radius == 0.0 {
        return Ok(0.0);
    }
    // curl separates: ∬ = side · (a₁∫h(x₁) − a₂∫h(x₂)) with h = f₁′ + ½
    let side = 2.0 * radius;
    let h = |lo: f64| quadrature::integrate(|t| f1_prime(t).unwrap_or(f64::NAN) + 0.5, lo, lo + side, 1e-12);
    let ix = h(center[0] - radius)?;
    let iy = h(center[1] - radius)?;
    Ok(side * (p.a1 * ix - p.a2 * iy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn minimal_example_values() {
        assert_eq!(min_example_exp_of_grad(0.3).unwrap(), 0.3);
        assert_eq!(min_example_exp_of_grad(0.5).unwrap(), 0.5);
        assert_eq!(min_example_grad_of_exp(0.3).unwrap(), 0.6);
        assert!(min_example_grad_of_exp(0.0).is_err());
        assert_eq!(min_example_f(0.4, 0.3).unwrap(), 0.4);
        assert_eq!(min_example_f(0.4, 0.5).unwrap(), 0.0);
        assert_eq!(min_example_df(0.4, 0.3).unwrap(), 1.0);
        assert!(min_example_df(0.4, 1.0).is_err());
    }

    #[test]
    fn f1_anchor_values() {
        assert_eq!(f1(0.5).unwrap(), -0.125);
        assert_eq!(f1(0.0).unwrap(), 0.0);
        assert_eq!(f1(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(f1(0.75).unwrap(), 0.75 * (0.5f64.ln() + 0.5), epsilon = 1e-15);
        assert!(f1(-0.1).is_err());
        assert!(f1(1.1).is_err());
    }

    #[test]
    fn f1_quadrature_values() {
        assert_abs_diff_eq!(f1_quadrature(0.5).unwrap(), -0.125, epsilon = 1e-9);
        assert_abs_diff_eq!(f1_quadrature(0.75).unwrap(), 0.75 * (0.5f64.ln() + 0.5), epsilon = 1e-9);
        // first-order behaviour near 0
        assert!((f1_quadrature(0.01).unwrap() / 0.01 - (LN2 - 1.0)).abs() < 5e-3);
        assert!(f1_quadrature(0.0).is_err());
    }

    #[test]
    fn series_window_is_continuous() {
        for &edge in &[0.5 - SERIES_WINDOW / 2.0, 0.5 + SERIES_WINDOW / 2.0] {
            let inside = f1(edge + 1e-12 * (0.5 - edge).signum()).unwrap();
            let outside = f1(edge - 1e-12 * (0.5 - edge).signum()).unwrap();
            assert_abs_diff_eq!(inside, outside, epsilon = 1e-12);
            let inside = f1_prime(edge + 1e-12 * (0.5 - edge).signum()).unwrap();
            let outside = f1_prime(edge - 1e-12 * (0.5 - edge).signum()).unwrap();
            assert_abs_diff_eq!(inside, outside, epsilon = 1e-10);
        }
    }

    #[test]
    fn f1_prime_values() {
        assert_abs_diff_eq!(f1_prime(0.5).unwrap(), -1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f1_prime(0.0).unwrap(), LN2 - 1.0, epsilon = 1e-15);
        assert!(f1_prime(1.0).is_err());
        let grid: Vec<f64> = (0..=990).map(|k| f1_prime(k as f64 / 1000.0).unwrap()).collect();
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn f1_prime_matches_central_differences() {
        let h = 1e-5;
        for k in 1..=95 {
            let x = k as f64 / 100.0;
            let fd = (f1(x + h).unwrap() - f1(x - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(f1_prime(x).unwrap(), fd, epsilon = 1e-7);
        }
    }

    #[test]
    fn one_dimensional_values() {
        let p = Scalar1DProblem::new(1.0, 0.95).unwrap();
        assert_eq!(phi_hat_1d(&p, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(phi_hat_1d(&p, 1.0).unwrap(), 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_hat_1d(&p, 0.5).unwrap(), -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(g_hat_1d(&p, 0.5).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g_hat_1d(&p, 0.0).unwrap(), LN2 - 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(half_a_plus_phi_hat_prime_1d(&p, 0.5).unwrap(), 1.0 / 3.0 + 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_hat_prime_1d(&p, 0.5).unwrap(), -1.0 / 6.0 + 0.05, epsilon = 1e-15);
        assert_eq!(phi_hat_hat_1d(&p, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(phi_hat_hat_1d(&p, 0.5).unwrap(), -0.1 + 0.45 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn one_dimensional_consistency_chain() {
        let p = Scalar1DProblem::new(1.0, 0.95).unwrap();
        let h = 1e-6;
        for k in 1..=99 {
            let x = k as f64 / 100.0;
            let d_phi = (phi_hat_1d(&p, x + h).unwrap() - phi_hat_1d(&p, x - h).unwrap()) / (2.0 * h);
            let d_eff = (phi_hat_hat_1d(&p, x + h).unwrap() - phi_hat_hat_1d(&p, x - h).unwrap()) / (2.0 * h);
            let g = g_hat_1d(&p, x).unwrap();
            assert_abs_diff_eq!(d_phi, g + boundary_shift_1d(p.a, p.b), epsilon = 1e-7);
            assert_abs_diff_eq!(d_eff, g, epsilon = 1e-7);
        }
    }

    #[test]
    fn drift_is_positive_and_effective_potential_increasing() {
        let p = Scalar1DProblem::new(1.0, 0.95).unwrap();
        let xs: Vec<f64> = (0..10_000).map(|k| k as f64 / 10_000.0).collect();
        assert!(xs.iter().all(|&x| g_hat_1d(&p, x).unwrap() > 0.0));
        let eff: Vec<f64> = xs.iter().map(|&x| phi_hat_hat_1d(&p, x).unwrap()).collect();
        assert!(eff.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn regimes() {
        let never = Scalar1DProblem::new(1.0, 2.0).unwrap();
        assert!(never.is_never_violated());
        assert_eq!(phi_hat_1d(&never, 0.4).unwrap(), 0.0);
        assert_eq!(g_hat_1d(&never, 0.4).unwrap(), 0.0);
        let negative = Scalar1DProblem::new(1.0, -1.0).unwrap();
        assert!(phi_hat_1d(&negative, 0.4).is_err());
        assert!(Scalar1DProblem::new(0.0, 1.0).is_err());
        assert!(Scalar1DProblem::new(1.0, 0.95).unwrap().is_standard_regime());
    }

    #[test]
    fn boundary_shift_by_regime() {
        assert_abs_diff_eq!(boundary_shift_1d(1.0, 0.95), -0.45, epsilon = 1e-15);
        assert_eq!(boundary_shift_1d(1.0, 2.0), 0.0);
        assert_eq!(boundary_shift_1d(1.0, -1.0), 0.0);
        // only the x = 0 corner violated: the gate switches off across the boundary
        assert_eq!(boundary_shift_1d(-4.0, -1.0), 1.0);
    }

    #[test]
    fn corrected_grad_is_plain_estimator_outside_the_jump_regime() {
        let big_b = Scalar1DProblem::new(1.0, 2.0).unwrap();
        assert_eq!(corrected_grad_1d(&big_b, 0.5, 0.9).unwrap(), 0.0);
        let neg_b = Scalar1DProblem::new(1.0, -1.0).unwrap();
        assert_abs_diff_eq!(corrected_grad_1d(&neg_b, 0.5, 0.9).unwrap(), 0.36, epsilon = 1e-14);
        let p = Scalar1DProblem::new(1.0, 0.95).unwrap();
        assert_abs_diff_eq!(corrected_grad_1d(&p, 0.5, 0.9).unwrap(), 0.36 - 0.45, epsilon = 1e-14);
        assert_abs_diff_eq!(corrected_grad_1d(&p, 0.5, 0.2).unwrap(), -0.45, epsilon = 1e-15);
    }

    #[test]
    fn golden_section() {
        let m = minimizer_1d(|x| Ok((x - 0.3) * (x - 0.3)), 0.0, 1.0, 1e-9).unwrap();
        assert_abs_diff_eq!(m, 0.3, epsilon = 1e-8);
        let m = minimizer_1d(f1, 0.0, 1.0, 1e-6).unwrap();
        assert!((0.70..0.72).contains(&m), "{m}");
        assert!((f1(m).unwrap() - -0.1456).abs() < 5e-4);
        let p = Scalar1DProblem::new(1.0, 0.95).unwrap();
        let m = minimizer_1d(|x| phi_hat_1d(&p, x), 0.0, 1.0, 1e-6).unwrap();
        assert!(m > 0.5 && m < 1.0);
        assert!(minimizer_1d(Ok, 1.0, 0.0, 1e-6).is_err());
    }

    #[test]
    fn planar_values() {
        let p = Planar2DProblem::new(1.0, 1.0, 1.5).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(phi_hat_2d(&p, [0.0, t]).unwrap(), 0.0);
            assert_eq!(phi_hat_2d(&p, [t, 0.0]).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(phi_hat_2d(&p, [1.0, 1.0]).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_hat_2d(&p, [0.5, 0.5]).unwrap(), 0.0, epsilon = 1e-15);
        let g = g_hat_2d(&p, [0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(g[0], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 1.0 / 6.0, epsilon = 1e-15);
        let g = g_hat_2d(&p, [0.4, 0.0]).unwrap();
        assert_eq!(g[0], 0.0);
        assert_abs_diff_eq!(g[1], 0.4 * (0.5 + LN2 - 1.0), epsilon = 1e-15);
        assert!(Planar2DProblem::new(1.0, 1.0, 2.5).is_err());
        assert!(Planar2DProblem::new(0.5, 1.0, 1.2).is_err());
    }

    #[test]
    fn curl_values() {
        let p = Planar2DProblem::new(1.0, 1.0, 1.5).unwrap();
        assert_eq!(curl_2d(&p, [0.4, 0.4]).unwrap(), 0.0);
        let c = curl_2d(&p, [0.3, 0.7]).unwrap();
        assert_abs_diff_eq!(c, f1_prime(0.3).unwrap() - f1_prime(0.7).unwrap(), epsilon = 1e-15);
        assert!(c < -1e-3);
        let q = Planar2DProblem::new(1.0, 0.5, 1.4).unwrap();
        assert_abs_diff_eq!(curl_2d(&q, [0.5, 0.5]).unwrap(), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn curl_matches_finite_difference_curl_of_field() {
        let p = Planar2DProblem::new(1.0, 0.7, 1.2).unwrap();
        let h = 1e-5;
        for &(x1, x2) in &[(0.2, 0.8), (0.5, 0.5), (0.7, 0.3), (0.45, 0.6)] {
            let d2g1 = (g_hat_2d(&p, [x1, x2 + h]).unwrap()[0] - g_hat_2d(&p, [x1, x2 - h]).unwrap()[0]) / (2.0 * h);
            let d1g2 = (g_hat_2d(&p, [x1 + h, x2]).unwrap()[1] - g_hat_2d(&p, [x1 - h, x2]).unwrap()[1]) / (2.0 * h);
            assert_abs_diff_eq!(curl_2d(&p, [x1, x2]).unwrap(), d2g1 - d1g2, epsilon = 1e-6);
        }
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let p = Planar2DProblem::new(1.0, 0.7, 1.2).unwrap();
        let h = 1e-6;
        for &(x1, x2) in &[(0.2, 0.8), (0.5, 0.5), (0.9, 0.1)] {
            let g = grad_phi_hat_2d(&p, [x1, x2]).unwrap();
            let fd1 = (phi_hat_2d(&p, [x1 + h, x2]).unwrap() - phi_hat_2d(&p, [x1 - h, x2]).unwrap()) / (2.0 * h);
            let fd2 = (phi_hat_2d(&p, [x1, x2 + h]).unwrap() - phi_hat_2d(&p, [x1, x2 - h]).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(g[0], fd1, epsilon = 1e-8);
            assert_abs_diff_eq!(g[1], fd2, epsilon = 1e-8);
        }
    }

    #[test]
    fn circulation_cases() {
        let p = Planar2DProblem::new(1.0, 1.0, 1.5).unwrap();
        let grad = circulation(|x| grad_phi_hat_2d(&p, x), [0.4, 0.55], 0.2, 4000).unwrap();
        assert!(grad.abs() <= 1e-5, "{grad}");
        assert_eq!(circulation(|_| Ok([1.0, 0.0]), [0.5, 0.5], 0.3, 100).unwrap(), 0.0);
        assert_eq!(circulation(|x| g_hat_2d(&p, x), [0.5, 0.5], 0.0, 10).unwrap(), 0.0);
        assert!(matches!(
            circulation(|x| g_hat_2d(&p, x), [0.1, 0.5], 0.2, 10),
            Err(Error::LoopOutsideDomain { .. })
        ));

        let q = Planar2DProblem::new(1.0, 0.5, 1.4).unwrap();
        let circ = circulation(|x| g_hat_2d(&q, x), [0.5, 0.5], 0.2, 4000).unwrap();
        let area = curl_area_integral(&q, [0.5, 0.5], 0.2).unwrap();
        assert!(circ.abs() > 1e-3);
        assert!((circ + area).abs() <= 1e-2 * area.abs(), "{circ} vs {area}");
    }

    #[test]
    fn symmetric_instance_has_zero_circulation_on_diagonal_squares() {
        // with a₁ = a₂ the curl is odd under x₁ ↔ x₂
        let p = Planar2DProblem::new(1.0, 1.0, 1.5).unwrap();
        let circ = circulation(|x| g_hat_2d(&p, x), [0.5, 0.5], 0.2, 4000).unwrap();
        assert!(circ.abs() < 1e-12, "{circ}");
        let off = circulation(|x| g_hat_2d(&p, x), [0.35, 0.6], 0.2, 4000).unwrap();
        let area = curl_area_integral(&p, [0.35, 0.6], 0.2).unwrap();
        assert!(off.abs() > 1e-3);
        assert!((off + area).abs() <= 1e-2 * area.abs(), "{off} vs {area}");
    }
}

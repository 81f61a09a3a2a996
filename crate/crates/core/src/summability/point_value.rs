//! Distributional (Łojasiewicz) point values estimated by shrinking
//! averages against a family of test functions.

use crate::error::{Error, Result};
use crate::numerics::extrapolate_to_zero;
use crate::testfn::{Integrator, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Both,
    /// Only the half-line `x > x₀` is averaged.
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointValueConfig {
    pub eps_ladder: Vec<f64>,
    pub tolerance: f64,
    pub max_panels: usize,
}

impl Default for PointValueConfig {
    fn default() -> Self {
        PointValueConfig {
            eps_ladder: vec![0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125],
            tolerance: 1e-4,
            max_panels: 20_000,
        }
    }
}

/// Bumps with different supports around the origin, the default family.
pub fn default_family() -> Vec<TestFunction> {
    [(-1.0, 1.0), (-0.5, 2.0), (-2.0, 0.7)]
        .iter()
        .map(|&(a, b)| TestFunction::bump(a, b).expect("valid bump"))
        .collect()
}

/// Average `⟨g(x₀+εx), φ(x)⟩ / ∫φ`, over `x > 0` only for [`Side::Right`].
fn average<G>(g: &G, x0: f64, eps: f64, phi: &TestFunction, side: Side, max_panels: usize) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let (mut lo, hi) = match phi.support() {
        Some(s) => s,
        None => phi.effective_interval(1e-18),
    };
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::param("point values need test functions with bounded effective support"));
    }
    if side == Side::Right {
        lo = lo.max(0.0);
    }
    if lo >= hi {
        return Err(Error::param("test function has no mass on the averaged side"));
    }
    let norm = phi.integral(if side == Side::Right { Some(0.0) } else { None })?;
    if norm == 0.0 {
        return Err(Error::param("test function integrates to zero"));
    }
    let failure = std::cell::Cell::new(None);
    let integrand = |x: f64| match g(x0 + eps * x) {
        Ok(v) => v * phi.eval(x),
        Err(e) => {
            if failure.take().is_none() {
                failure.set(Some(e));
            }
            0.0
        }
    };
    let mut points = vec![lo];
    if lo < 0.0 && hi > 0.0 {
        points.push(0.0);
    }
    points.push(hi);
    let ig = Integrator::new(1e-12, 1e-10).with_max_panels(max_panels);
    let value = match ig.finite_with_breaks(integrand, &points) {
        Ok(r) => r.value,
        // An integrand oscillating without bound near x₀ exhausts any
        // budget; the best estimate is kept and judged by agreement below.
        Err(Error::Accuracy { best, .. }) => best.re,
        Err(e) => return Err(e),
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(value / norm)
}

/// Estimate of the distributional value of `g` at `x₀`: the limit of
/// `⟨g(x₀+εx), φ(x)⟩/∫φ` as `ε → 0`. Returns `None` when the test
/// functions disagree or the averages do not settle.
pub fn point_value<G>(g: G, x0: f64, side: Side, family: &[TestFunction]) -> Result<Option<f64>>
where
    G: Fn(f64) -> Result<f64>,
{
    point_value_with(g, x0, side, family, &PointValueConfig::default())
}

pub fn point_value_with<G>(
    g: G,
    x0: f64,
    side: Side,
    family: &[TestFunction],
    cfg: &PointValueConfig,
) -> Result<Option<f64>>
where
    G: Fn(f64) -> Result<f64>,
{
    if family.is_empty() {
        return Err(Error::param("need at least one test function"));
    }
    if cfg.eps_ladder.len() < 3 {
        return Err(Error::param("the ε ladder needs at least three rungs"));
    }
    let tol = cfg.tolerance;
    let mut limits = Vec::with_capacity(family.len());
    for phi in family {
        let values: Vec<f64> = cfg
            .eps_ladder
            .iter()
            .map(|&e| average(&g, x0, e, phi, side, cfg.max_panels))
            .collect::<Result<_>>()?;
        let n = values.len();
        let tail_x = &cfg.eps_ladder[n - 3..];
        let tail_y = &values[n - 3..];
        let (extrapolated, spread) = extrapolate_to_zero(tail_x, tail_y);
        let last = values[n - 1];
        let step = (values[n - 1] - values[n - 2]).abs();
        let scale = extrapolated.abs().max(1.0);
        // A smooth trend in ε is removed by extrapolation; an erratic one
        // only settles if the averages themselves stop moving.
        let (estimate, settled) = if spread <= tol * scale {
            (extrapolated, true)
        } else {
            (last, step <= tol * last.abs().max(1.0))
        };
        if !settled {
            return Ok(None);
        }
        limits.push(estimate);
    }
    let lo = limits.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = limits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    if hi - lo <= tol * mid.abs().max(1.0) {
        Ok(Some(mid))
    } else {
        Ok(None)
    }
}

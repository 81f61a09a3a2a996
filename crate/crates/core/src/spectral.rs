//! Spectral densities and spectral functions of the free line, free space
//! and the Dirichlet interval `(0, π)`, their smeared values, and the
//! Cesàro-averaged comparisons between them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::CompensatedSum;
use crate::summability::{
    cesaro_order_test_with, riesz_mean_with_error, CesaroReport, OrderProbe, OrderTestConfig, SpectralMeasure,
    Verdict,
};
use crate::testfn::special::gamma_positive;
use crate::testfn::{bessel_j, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEval {
    pub value: f64,
    pub lambda: f64,
    pub x: f64,
    pub y: f64,
    /// Number of series terms used, for truncated evaluations.
    pub truncation: Option<usize>,
}

/// `e₁(x,y;λ) = χ(λ) cos(√λ (x−y)) / (2π√λ)`.
pub fn density_free_line(x: f64, y: f64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::Singularity("free-line density is singular at λ = 0".into()));
    }
    if lambda < 0.0 {
        return Ok(0.0);
    }
    let s = lambda.sqrt();
    Ok((s * (x - y)).cos() / (2.0 * PI * s))
}

/// Spectral density of `−Δ` on `ℝ^d`:
/// `λ^{d/4−1/2} J_{d/2−1}(√λ r) / (2^{d/2+1} π^{d/2} r^{d/2−1})`, `r = |x−y|`,
/// with the diagonal limit `λ^{d/2−1} / (2^d π^{d/2} Γ(d/2))` at `r = 0`.
pub fn density_free_space(x: &[f64], y: &[f64], lambda: f64) -> Result<f64> {
    let d = x.len();
    if d == 0 || y.len() != d {
        return Err(Error::param("points must have the same positive dimension"));
    }
    if lambda <= 0.0 {
        return Ok(0.0);
    }
    let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let half = d as f64 / 2.0;
    if r == 0.0 {
        return Ok(lambda.powf(half - 1.0) / (2f64.powi(d as i32) * PI.powf(half) * gamma_positive(half)));
    }
    let j = bessel_j(half - 1.0, lambda.sqrt() * r)?;
    Ok(lambda.powf(0.25 * d as f64 - 0.5) * j / (2f64.powf(half + 1.0) * PI.powf(half) * r.powf(half - 1.0)))
}

/// Riesz mean of order `k` of the free-line density at separation `r`:
/// `(√λ/π) ∫₀¹ (1−u²)^k cos(√λ r u) du`, in closed form through
/// `∫₀¹ (1−u²)^k cos(au) du = √π Γ(k+1) J_{k+1/2}(a) / (2 (a/2)^{k+1/2})`.
/// Returns the value and a rounding-error bound.
pub fn free_line_riesz(r: f64, k: usize, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::domain("Riesz means need λ > 0"));
    }
    let s = lambda.sqrt();
    let a = s * r.abs();
    let kf = k as f64;
    let c = PI.sqrt() * gamma_positive(kf + 1.0) / 2.0;
    if a == 0.0 {
        let v = s / PI * c / gamma_positive(kf + 1.5);
        return Ok((v, 4.0 * f64::EPSILON * v));
    }
    let nu = kf + 0.5;
    let j = bessel_j(nu, a)?;
    let scale = s / PI * c / (0.5 * a).powf(nu);
    let envelope = if a > nu { (2.0 / (PI * a)).sqrt() } else { 0.0 };
    let value = scale * j;
    Ok((value, 8.0 * f64::EPSILON * scale * (j.abs() + envelope)))
}

/// The free-line density at `(x, y)` as a continuous spectral measure, with
/// exact Riesz means.
pub fn free_line_measure(x: f64, y: f64) -> Result<SpectralMeasure> {
    let r = x - y;
    SpectralMeasure::from_density(move |mu| (mu.sqrt() * r).cos() / (2.0 * PI * mu.sqrt()), 0.0)
        .with_continuous_riesz(move |k, lambda| free_line_riesz(r, k, lambda))
}

fn check_interval_point(x: f64, name: &str) -> Result<()> {
    if !(x > 0.0 && x < PI) {
        return Err(Error::domain(format!("{name} = {x} must lie in (0, π)")));
    }
    Ok(())
}

/// `E(x,y;λ) = Σ_{n² ≤ λ} (2/π) sin nx sin ny`.
pub fn staircase_interval(x: f64, y: f64, lambda: f64) -> Result<DensityEval> {
    check_interval_point(x, "x")?;
    check_interval_point(y, "y")?;
    let mut sum = CompensatedSum::new();
    let mut n = 0usize;
    if lambda >= 1.0 {
        let top = lambda.sqrt().floor() as usize;
        // guard against √ rounding at perfect squares
        let top = (top.saturating_sub(1)..=top + 1).filter(|m| ((m * m) as f64) <= lambda).max().unwrap_or(0);
        for m in 1..=top {
            let mf = m as f64;
            sum.add(2.0 / PI * (mf * x).sin() * (mf * y).sin());
        }
        n = top;
    }
    Ok(DensityEval {
        value: sum.value(),
        lambda,
        x,
        y,
        truncation: Some(n),
    })
}

/// The interval density `(2/π) Σ sin nx sin ny δ(λ − n²)` as a measure with
/// generated atoms; `x, y ∈ [0, π]`.
pub fn interval_measure(x: f64, y: f64, horizon: f64) -> Result<SpectralMeasure> {
    for (v, name) in [(x, "x"), (y, "y")] {
        if !(0.0..=PI).contains(&v) {
            return Err(Error::domain(format!("{name} = {v} must lie in [0, π]")));
        }
    }
    SpectralMeasure::generated(
        move |n| {
            let m = (n + 1) as f64;
            (m * m, Complex64::new(2.0 / PI * (m * x).sin() * (m * y).sin(), 0.0))
        },
        0.0,
        horizon,
    )
}

/// Tail level below which the interval smear stops summing.
pub const SMEAR_TAIL_TOLERANCE: f64 = 1e-14;
const SMEAR_MAX_TERMS: usize = 100_000_000;

/// `⟨e(x,y;·), φ(ε·)⟩ = Σ_n (2/π) sin nx sin ny φ(εn²)` for the interval.
/// Summation stops past the effective support of `φ` once the remaining
/// terms, bounded by a geometric majorant, fall below
/// [`SMEAR_TAIL_TOLERANCE`].
pub fn density_smear_interval(x: f64, y: f64, phi: &TestFunction, eps: f64) -> Result<DensityEval> {
    check_interval_point(x, "x")?;
    check_interval_point(y, "y")?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::param("ε must be positive"));
    }
    if !phi.decays_right() {
        return Err(Error::param("smearing needs a test function that decays for large arguments"));
    }
    let (_, hi) = phi.effective_interval(1e-17);
    let mut sum = CompensatedSum::new();
    let mut prev = f64::INFINITY;
    let mut n = 0usize;
    loop {
        n += 1;
        if n > SMEAR_MAX_TERMS {
            return Err(Error::Accuracy {
                message: "smear did not converge within the term budget".into(),
                best: Complex64::new(sum.value(), 0.0),
                error_estimate: prev,
            });
        }
        let nf = n as f64;
        let u = eps * nf * nf;
        let p = phi.eval(u);
        sum.add(2.0 / PI * (nf * x).sin() * (nf * y).sin() * p);
        let bound = 2.0 / PI * p.abs();
        if u >= hi {
            if bound == 0.0 && phi.support().is_some() {
                break;
            }
            let ratio = bound / prev;
            if ratio < 1.0 && bound / (1.0 - ratio) < SMEAR_TAIL_TOLERANCE {
                break;
            }
        }
        prev = bound;
    }
    Ok(DensityEval {
        value: sum.value(),
        lambda: f64::NAN,
        x,
        y,
        truncation: Some(n),
    })
}

/// Default tolerance of [`diagonal_weyl_check`] on the relative difference.
pub const WEYL_TOLERANCE: f64 = 1e-2;

/// Compare the Riesz means of order `k` of the diagonal interval measure
/// `(2/π) Σ sin²(nx) δ(λ−n²)` with those of the Weyl density `(1/2π) λ^{−1/2}`
/// (the latter by quadrature). Each probe records the largest relative
/// difference over a window one eigenvalue gap wide below the probe. The
/// check holds when every probe is within `tolerance` and the absolute
/// difference shrinks at least like `λ^{−1/4}` from the first probe to the
/// last.
pub fn diagonal_weyl_check(x: f64, k: usize, probes: &[f64]) -> Result<CesaroReport> {
    diagonal_weyl_check_with(x, k, probes, WEYL_TOLERANCE)
}

pub fn diagonal_weyl_check_with(x: f64, k: usize, probes: &[f64], tolerance: f64) -> Result<CesaroReport> {
    check_interval_point(x, "x")?;
    check_probes(probes)?;
    if !(tolerance > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    let top = probes[probes.len() - 1];
    let atoms = interval_measure(x, x, top * 1.01)?.materialize(top * 1.01);
    let weyl = SpectralMeasure::from_density(|mu| 0.5 / (PI * mu.sqrt()), 0.0);
    const WINDOW_SAMPLES: usize = 8;
    let records: Vec<OrderProbe> = probes
        .par_iter()
        .map(|&lambda| -> Result<OrderProbe> {
            let width = 2.0 / lambda.sqrt();
            let mut worst = 0.0f64;
            let mut noise = 0.0f64;
            for j in 0..WINDOW_SAMPLES {
                let l = lambda * (1.0 - width * j as f64 / WINDOW_SAMPLES as f64);
                let a = riesz_mean_with_error(&atoms, k, l)?;
                let w = riesz_mean_with_error(&weyl, k, l)?;
                let rel = (a.value - w.value).norm() / w.value.norm();
                worst = worst.max(rel);
                noise = noise.max((a.error + w.error) / w.value.norm());
            }
            Ok(OrderProbe {
                lambda,
                remainder: worst,
                noise,
                censored: false,
            })
        })
        .collect::<Result<_>>()?;
    let within = records.iter().all(|p| p.remainder < tolerance);
    // The Cesàro claim is that the difference itself tends to zero; a
    // relative difference can shrink only through the growing Weyl term.
    let absolute: Vec<f64> = records
        .iter()
        .map(|p| p.remainder * weyl_riesz(k, p.lambda))
        .collect();
    let (first, last) = (probes[0], probes[probes.len() - 1]);
    let decays = probes.len() < 2 || absolute[absolute.len() - 1] <= absolute[0] * (first / last).powf(0.25);
    let pass = within && decays;
    Ok(CesaroReport {
        claimed_exponent: -0.5,
        order_used: k,
        verdict: if pass { Verdict::Holds } else { Verdict::Fails },
        fitted_slope: f64::NAN,
        residual: records.iter().map(|p| p.remainder).fold(0.0, f64::max),
        probes: records,
        note: Some(if decays {
            format!("relative difference of Riesz-{k} means, tolerance {tolerance:e}")
        } else {
            format!("difference of Riesz-{k} means does not decay between λ = {first:e} and {last:e}")
        }),
    })
}

/// `R^k` of `(1/2π) λ^{−1/2}`: `(√λ/π) · √π Γ(k+1) / (2 Γ(k+3/2))`.
fn weyl_riesz(k: usize, lambda: f64) -> f64 {
    let kf = k as f64;
    lambda.sqrt() / PI * PI.sqrt() * gamma_positive(kf + 1.0) / (2.0 * gamma_positive(kf + 1.5))
}

fn check_probes(probes: &[f64]) -> Result<()> {
    if probes.is_empty() || probes.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::param("probes must be positive and finite"));
    }
    if probes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("probes must be increasing"));
    }
    Ok(())
}

/// Exponent standing in for `−∞` in rapid-decay claims.
pub const RAPID_DECAY_EXPONENT: f64 = -4.0;

/// Difference between the interval density and the free-line density at
/// `(x, y)`, with exact Riesz means for the continuous part.
pub fn offdiagonal_difference_measure(x: f64, y: f64, horizon: f64) -> Result<SpectralMeasure> {
    let r = x - y;
    interval_measure(x, y, horizon)?
        .with_density(move |mu| -(mu.sqrt() * r).cos() / (2.0 * PI * mu.sqrt()))
        .with_continuous_riesz(move |k, lambda| free_line_riesz(r, k, lambda).map(|(v, e)| (-v, e)))
}

/// Test that the interval density minus the free-line density is
/// `O(λ^{−4})` (C) over the probe range, starting from Riesz order `k`
/// and raising the order up to `max_order`. Points closer to the diagonal
/// than half a wavelength at the smallest probe are reported inconclusive.
pub fn offdiagonal_equivalence_check(x: f64, y: f64, k: usize, probes: &[f64]) -> Result<CesaroReport> {
    offdiagonal_equivalence_check_with(x, y, k, probes, &OrderTestConfig::default())
}

pub fn offdiagonal_equivalence_check_with(
    x: f64,
    y: f64,
    k: usize,
    probes: &[f64],
    cfg: &OrderTestConfig,
) -> Result<CesaroReport> {
    if x == y {
        return Err(Error::param("x = y: use the diagonal Weyl check"));
    }
    check_probes(probes)?;
    if probes.len() < 2 {
        return Err(Error::param("need at least two probes"));
    }
    let lambda_min = probes[0];
    let lambda_max = probes[probes.len() - 1];
    let m = offdiagonal_difference_measure(x, y, lambda_max)?;
    let cfg = OrderTestConfig {
        lambda_min: Some(lambda_min),
        lambda_max: Some(lambda_max),
        probes: probes.len().max(cfg.min_points),
        min_order: k + 1,
        max_order: cfg.max_order.max(k + 1),
        ..*cfg
    };
    let mut report = cesaro_order_test_with(&m, RAPID_DECAY_EXPONENT, &cfg)?;
    if lambda_min.sqrt() * (x - y).abs() < PI {
        report.verdict = Verdict::Inconclusive;
        report.note = Some(format!(
            "|x−y| = {:e} is within half a wavelength of the diagonal at λ = {lambda_min:e}",
            (x - y).abs()
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_line_examples() {
        let v = density_free_line(1.0, 0.0, PI * PI).unwrap();
        assert!((v + 1.0 / (2.0 * PI * PI)).abs() < 1e-16);
        assert_eq!(density_free_line(0.0, 0.0, -5.0).unwrap(), 0.0);
        assert!((density_free_line(0.3, 0.3, 4.0).unwrap() - 0.25 / PI).abs() < 1e-16);
        assert!(matches!(density_free_line(0.0, 1.0, 0.0), Err(Error::Singularity(_))));
    }

    #[test]
    fn free_space_reductions() {
        let d1 = density_free_space(&[1.0], &[0.0], 7.0).unwrap();
        assert!((d1 - density_free_line(1.0, 0.0, 7.0).unwrap()).abs() < 1e-12);
        let (r, l) = (0.7f64, 5.0f64);
        let d3 = density_free_space(&[r, 0.0, 0.0], &[0.0; 3], l).unwrap();
        assert!((d3 - (l.sqrt() * r).sin() / (4.0 * PI * PI * r)).abs() < 1e-12);
        let d2 = density_free_space(&[0.0, 0.0], &[0.0, 0.0], 3.0).unwrap();
        assert!((d2 - 0.25 / PI).abs() < 1e-15);
        assert_eq!(density_free_space(&[0.0], &[1.0], -1.0).unwrap(), 0.0);
    }

    #[test]
    fn staircase_examples() {
        let h = PI / 2.0;
        assert!((staircase_interval(h, h, 10.0).unwrap().value - 4.0 / PI).abs() < 1e-15);
        assert_eq!(staircase_interval(1.0, 2.0, 0.5).unwrap().value, 0.0);
        let v = staircase_interval(h, PI / 4.0, 2.0).unwrap().value;
        assert!((v - 2f64.sqrt() / PI).abs() < 1e-15);
        assert!(staircase_interval(0.0, 1.0, 4.0).is_err());
        // jump included at λ = n²
        assert_eq!(staircase_interval(1.0, 1.0, 4.0).unwrap().truncation, Some(2));
    }

    #[test]
    fn free_line_riesz_closed_form_matches_quadrature() {
        let m = SpectralMeasure::from_density(|mu| (mu.sqrt() * 1.3).cos() / (2.0 * PI * mu.sqrt()), 0.0);
        for k in [0, 1, 3] {
            let (exact, _) = free_line_riesz(1.3, k, 150.0).unwrap();
            let (quad, _) = crate::summability::continuous_riesz_by_quadrature(&m, k, 150.0).unwrap();
            assert!((exact - quad).abs() < 1e-11, "k={k}: {exact} vs {quad}");
        }
        let (diag, _) = free_line_riesz(0.0, 2, 100.0).unwrap();
        assert!((diag - 10.0 / PI * 8.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn smear_large_eps_is_first_term() {
        let phi = TestFunction::exponential(1.0).unwrap();
        let v = density_smear_interval(1.0, 2.0, &phi, 10.0).unwrap().value;
        let direct: f64 = (1..6)
            .map(|n| {
                let n = n as f64;
                2.0 / PI * n.sin() * (2.0 * n).sin() * (-10.0 * n * n).exp()
            })
            .sum();
        assert!((v - direct).abs() < 1e-18);
    }

    #[test]
    fn smear_rejects_nondecaying() {
        let phi = TestFunction::user("one", 8, crate::testfn::Decay::Unknown, |_, n| if n == 0 { 1.0 } else { 0.0 });
        assert!(matches!(density_smear_interval(1.0, 1.0, &phi, 0.1), Err(Error::Parameter(_))));
    }
}

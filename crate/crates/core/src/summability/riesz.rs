//! Riesz means of spectral measures, Cesàro limits and Cesàro order tests.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::measure::SpectralMeasure;
use crate::error::{Error, Result};
use crate::numerics::{decades_spanned, fit_loglog, geometric_grid, weighted_least_squares, ComplexSum};
use crate::testfn::{Domain, Integrator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// One probe of an order test: the remainder envelope over the probe's
/// window and the rounding-noise level it was compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderProbe {
    pub lambda: f64,
    pub remainder: f64,
    pub noise: f64,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroReport {
    pub claimed_exponent: f64,
    pub order_used: usize,
    pub verdict: Verdict,
    /// Estimated exponent of the tested function: the log-log slope of the
    /// Riesz-mean remainder minus one. `NaN` when nothing could be fitted.
    pub fitted_slope: f64,
    /// RMS residual of the log-log fit (for limits: the largest order gap
    /// at the top probes).
    pub residual: f64,
    pub probes: Vec<OrderProbe>,
    pub note: Option<String>,
}

/// A Riesz mean with a rounding/quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszValue {
    pub value: Complex64,
    pub error: f64,
}

fn check_lambda(m: &SpectralMeasure, lambda: f64) -> Result<()> {
    if !(lambda > m.support_lower_bound()) || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "Riesz means need λ > {} (got {lambda})",
            m.support_lower_bound()
        )));
    }
    Ok(())
}

/// `R^k(λ) = Σ_{λ_n < λ} w_n (1 − λ_n/λ)^k + ∫ ρ(μ)(1 − μ/λ)^k dμ`.
pub fn riesz_mean(m: &SpectralMeasure, k: usize, lambda: f64) -> Result<Complex64> {
    Ok(riesz_means(m, k, lambda)?[k].value)
}

pub fn riesz_mean_with_error(m: &SpectralMeasure, k: usize, lambda: f64) -> Result<RieszValue> {
    Ok(riesz_means(m, k, lambda)?[k])
}

/// Riesz means of all orders `0..=max_k` at `λ` in a single pass over the atoms.
pub fn riesz_means(m: &SpectralMeasure, max_k: usize, lambda: f64) -> Result<Vec<RieszValue>> {
    check_lambda(m, lambda)?;
    let mut sums = vec![ComplexSum::new(); max_k + 1];
    let mut squares = vec![0.0f64; max_k + 1];
    m.for_each_atom_below(lambda, |mu, w| {
        let t = 1.0 - mu / lambda;
        let mut term = w;
        for k in 0..=max_k {
            sums[k].add(term);
            squares[k] += term.norm_sqr();
            term *= t;
        }
    });
    let mut out: Vec<RieszValue> = (0..=max_k)
        .map(|k| RieszValue {
            value: sums[k].value(),
            error: 2.0 * f64::EPSILON * ((k + 1) as f64 * squares[k]).sqrt(),
        })
        .collect();
    if let Some(c) = m.continuous() {
        for (k, slot) in out.iter_mut().enumerate() {
            let (v, e) = match &c.riesz {
                Some(exact) => exact(k, lambda)?,
                None => continuous_riesz_by_quadrature(m, k, lambda)?,
            };
            slot.value += v;
            slot.error += e;
        }
    }
    Ok(out)
}

/// Riesz mean of the continuous part by adaptive quadrature, after the
/// substitution `μ = a + (λ−a)u²` that absorbs an inverse square-root
/// singularity at the support bound `a`.
pub fn continuous_riesz_by_quadrature(m: &SpectralMeasure, k: usize, lambda: f64) -> Result<(f64, f64)> {
    check_lambda(m, lambda)?;
    let Some(c) = m.continuous() else {
        return Ok((0.0, 0.0));
    };
    let a = m.support_lower_bound();
    let span = lambda - a;
    let density = c.density.clone();
    let integrand = move |u: f64| {
        let mu = a + span * u * u;
        let factor = span * (1.0 - u * u) / lambda;
        density(mu) * 2.0 * span * u * factor.powi(k as i32)
    };
    match Integrator::new(1e-15, 1e-13)
        .with_max_panels(20_000)
        .integrate(integrand, Domain::Finite(0.0, 1.0))
    {
        Ok(r) => Ok((r.value, r.error_estimate)),
        // Rounding in a large oscillating integrand can keep the estimate
        // just above the target; a small estimate is still usable.
        Err(Error::Accuracy { best, error_estimate, .. }) if error_estimate <= 1e-9 * best.re.abs().max(1.0) => {
            Ok((best.re, error_estimate))
        }
        Err(e) => Err(e),
    }
}

fn default_top(m: &SpectralMeasure) -> Result<f64> {
    match (m.horizon(), m.listed_len()) {
        (Some(h), Some(n)) if n > 0 => Ok(h * (1.0 + 1e-12) + f64::MIN_POSITIVE),
        (Some(h), None) => Ok(h),
        _ => Err(Error::Data("measure has no atoms to set a probing range".into())),
    }
}

/// Minimum number of listed atoms accepted by [`cesaro_limit`].
pub const MIN_LIMIT_ATOMS: usize = 1000;

/// Estimate the (C) limit of the total mass of `m`: Riesz means of orders
/// `k` and `k+1` (k < max_order) must agree within `max(1e−6, 1e−3·|v|)` at
/// the three largest probes. Returns `None` as value when no order settles.
pub fn cesaro_limit(m: &SpectralMeasure, max_order: usize) -> Result<(Option<Complex64>, CesaroReport)> {
    if let Some(n) = m.listed_len() {
        if n < MIN_LIMIT_ATOMS {
            return Err(Error::Data(format!(
                "cesaro_limit needs at least {MIN_LIMIT_ATOMS} atoms, got {n}"
            )));
        }
    }
    if max_order == 0 {
        return Err(Error::param("max_order must be at least 1"));
    }
    let top = default_top(m)?;
    let bottom = (top * 1e-3).max(m.support_lower_bound() + 1e-9 * top.abs().max(1.0));
    let probes = geometric_grid(bottom.max(f64::MIN_POSITIVE), top, 16);
    let working = if m.is_generated() { m.materialize(top) } else { m.clone() };
    let rows: Vec<Vec<RieszValue>> = probes
        .par_iter()
        .map(|&l| riesz_means(&working, max_order, l))
        .collect::<Result<_>>()?;

    let mut last_gap = f64::NAN;
    for k in 0..max_order {
        let gaps: Vec<f64> = rows.iter().map(|r| (r[k].value - r[k + 1].value).norm()).collect();
        let value = rows[rows.len() - 1][k + 1].value;
        let tol = 1e-6f64.max(1e-3 * value.norm());
        let top3 = &gaps[gaps.len() - 3..];
        last_gap = top3.iter().copied().fold(0.0, f64::max);
        if top3.iter().all(|g| *g <= tol) {
            let slope = fit_loglog(&probes, &gaps).map_or(f64::NAN, |f| f.slope);
            let report = CesaroReport {
                claimed_exponent: 0.0,
                order_used: k,
                verdict: Verdict::Holds,
                fitted_slope: slope,
                residual: last_gap,
                probes: probes
                    .iter()
                    .zip(&gaps)
                    .map(|(&lambda, &g)| OrderProbe {
                        lambda,
                        remainder: g,
                        noise: 0.0,
                        censored: false,
                    })
                    .collect(),
                note: None,
            };
            return Ok((Some(value), report));
        }
    }
    Ok((
        None,
        CesaroReport {
            claimed_exponent: 0.0,
            order_used: max_order,
            verdict: Verdict::Inconclusive,
            fitted_slope: f64::NAN,
            residual: last_gap,
            probes: Vec::new(),
            note: Some("successive Riesz orders never agreed at the largest probes".into()),
        },
    ))
}

/// Settings of the Cesàro order test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderTestConfig {
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub probes: usize,
    /// Samples per probe window used to form the remainder envelope.
    pub subsamples: usize,
    /// Lowest order `N` tried.
    pub min_order: usize,
    pub max_order: usize,
    pub slope_tolerance: f64,
    pub min_points: usize,
    pub min_decades: f64,
    /// A probe is censored when its envelope is within this factor of the
    /// estimated rounding noise.
    pub noise_factor: f64,
}

impl Default for OrderTestConfig {
    fn default() -> Self {
        OrderTestConfig {
            lambda_min: None,
            lambda_max: None,
            probes: 24,
            subsamples: 8,
            min_order: 1,
            max_order: 12,
            slope_tolerance: 0.25,
            min_points: 12,
            min_decades: 1.5,
            noise_factor: 4.0,
        }
    }
}

/// Test `f = O(λ^β)` (C) for the measure `f = m` with default settings.
pub fn cesaro_order_test(m: &SpectralMeasure, beta: f64, max_order: usize) -> Result<CesaroReport> {
    cesaro_order_test_with(
        m,
        beta,
        &OrderTestConfig {
            max_order,
            ..Default::default()
        },
    )
}

/// Test `f = O(λ^β)` (C).
///
/// The `N`-th primitive of `f` equals `λ^{N−1}/(N−1)! · R^{N−1}(λ)`, so the
/// claim is equivalent to `R^{N−1}(λ) = q(1/λ) + O(λ^{β+1})` for a
/// polynomial `q` of degree `≤ N−1`. Terms `λ^{−j}` with `−j ≤ β+1` are
/// absorbed into the remainder, the rest of `q` is fitted by weighted least
/// squares, and the slope of the remainder envelope is fitted on probes
/// that stand clear of rounding noise. Orders `N ≤ max_order` are tried
/// in turn (from `min_order`) and the first success is reported.
pub fn cesaro_order_test_with(m: &SpectralMeasure, beta: f64, cfg: &OrderTestConfig) -> Result<CesaroReport> {
    // Negative integer exponents are accepted: the fitted polynomial only
    // takes powers strictly above λ^{β+1}, so a term exactly at that power
    // counts as remainder and the bound stays well defined.
    if !beta.is_finite() {
        return Err(Error::param(format!("exponent {beta} must be finite")));
    }
    if cfg.min_order == 0 || cfg.max_order < cfg.min_order || cfg.probes < 2 || cfg.subsamples == 0 {
        return Err(Error::param(
            "order test needs 1 ≤ min_order ≤ max_order, probes ≥ 2, subsamples ≥ 1",
        ));
    }
    let lambda_max = match cfg.lambda_max {
        Some(l) => l,
        None => default_top(m)?,
    };
    let lb = m.support_lower_bound();
    let lambda_min = cfg.lambda_min.unwrap_or(lambda_max * 1e-4);
    if !(lambda_min > lb && lambda_min > 0.0 && lambda_max > lambda_min) {
        return Err(Error::param(format!(
            "probe range [{lambda_min}, {lambda_max}] must be positive, increasing and above the support"
        )));
    }
    let probes = geometric_grid(lambda_min, lambda_max, cfg.probes);
    let ratio = probes[1] / probes[0];
    let mut samples = Vec::with_capacity(cfg.probes * cfg.subsamples);
    for (i, &p) in probes.iter().enumerate() {
        for j in 0..cfg.subsamples {
            let l = p * ratio.powf(-(j as f64) / cfg.subsamples as f64);
            if l > lb {
                samples.push((i, l));
            }
        }
    }
    let working = if m.is_generated() { m.materialize(lambda_max) } else { m.clone() };
    let kmax = cfg.max_order - 1;
    let values: Vec<Vec<RieszValue>> = samples
        .par_iter()
        .map(|&(_, l)| riesz_means(&working, kmax, l))
        .collect::<Result<_>>()?;

    let mut best_fail: Option<CesaroReport> = None;
    let mut last_inconclusive: Option<CesaroReport> = None;
    for k in (cfg.min_order - 1)..=kmax {
        let report = test_single_order(beta, k, cfg, &probes, &samples, &values);
        match report.verdict {
            Verdict::Holds => return Ok(report),
            Verdict::Fails => {
                let better = best_fail
                    .as_ref()
                    .is_none_or(|b| report.fitted_slope < b.fitted_slope);
                if better {
                    best_fail = Some(report);
                }
            }
            Verdict::Inconclusive => last_inconclusive = Some(report),
        }
    }
    Ok(best_fail
        .or(last_inconclusive)
        .expect("at least one order was examined"))
}

fn test_single_order(
    beta: f64,
    k: usize,
    cfg: &OrderTestConfig,
    probes: &[f64],
    samples: &[(usize, f64)],
    values: &[Vec<RieszValue>],
) -> CesaroReport {
    // Polynomial terms λ^{-j}, j ≤ k, that are not dominated by the remainder.
    let n_terms = (0..=k).filter(|&j| -(j as f64) > beta + 1.0).count();
    let lambdas: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let rs: Vec<Complex64> = values.iter().map(|v| v[k].value).collect();
    let noise: Vec<f64> = values.iter().map(|v| v[k].error).collect();
    let bound: Vec<f64> = lambdas.iter().map(|l| l.powf(beta + 1.0)).collect();

    let mut residual: Vec<Complex64> = rs.clone();
    if n_terms > 0 {
        let rows: Vec<Vec<f64>> = lambdas
            .iter()
            .map(|l| (0..n_terms).map(|j| l.powi(-(j as i32))).collect())
            .collect();
        let re: Vec<f64> = rs.iter().map(|z| z.re).collect();
        let im: Vec<f64> = rs.iter().map(|z| z.im).collect();
        // Iteratively reweighted fit: weights 1/(C λ^{β+1} + noise) with the
        // remainder scale C re-estimated from the previous residuals.
        let mut scale = 1.0;
        for _ in 0..4 {
            let w: Vec<f64> = bound
                .iter()
                .zip(&noise)
                .map(|(b, n)| 1.0 / (scale * b + n + f64::MIN_POSITIVE))
                .collect();
            let cr = weighted_least_squares(&rows, &re, &w);
            let ci = weighted_least_squares(&rows, &im, &w);
            residual = rows
                .iter()
                .zip(&rs)
                .map(|(row, z)| {
                    let fr: f64 = row.iter().zip(&cr).map(|(a, c)| a * c).sum();
                    let fi: f64 = row.iter().zip(&ci).map(|(a, c)| a * c).sum();
                    z - Complex64::new(fr, fi)
                })
                .collect();
            let mut ratios: Vec<f64> = residual
                .iter()
                .zip(&bound)
                .zip(&noise)
                .filter(|((r, _), n)| r.norm() > cfg.noise_factor * **n)
                .map(|((r, b), _)| r.norm() / b)
                .collect();
            if ratios.is_empty() {
                break;
            }
            ratios.sort_by(f64::total_cmp);
            scale = ratios[ratios.len() / 2];
        }
    }

    let mut env = vec![0.0f64; probes.len()];
    let mut env_noise = vec![0.0f64; probes.len()];
    for (s, (r, n)) in samples.iter().zip(residual.iter().zip(&noise)) {
        env[s.0] = env[s.0].max(r.norm());
        env_noise[s.0] = env_noise[s.0].max(*n);
    }
    let probe_records: Vec<OrderProbe> = probes
        .iter()
        .enumerate()
        .map(|(i, &lambda)| OrderProbe {
            lambda,
            remainder: env[i],
            noise: env_noise[i],
            censored: !(env[i] > cfg.noise_factor * env_noise[i]),
        })
        .collect();
    let kept: Vec<&OrderProbe> = probe_records.iter().filter(|p| !p.censored).collect();
    let xs: Vec<f64> = kept.iter().map(|p| p.lambda).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.remainder).collect();
    let mut report = CesaroReport {
        claimed_exponent: beta,
        order_used: k + 1,
        verdict: Verdict::Inconclusive,
        fitted_slope: f64::NAN,
        residual: f64::NAN,
        probes: probe_records.clone(),
        note: None,
    };
    if kept.len() < cfg.min_points || decades_spanned(&xs) < cfg.min_decades {
        report.note = Some(format!(
            "only {} probes above the noise floor spanning {:.2} decades",
            kept.len(),
            decades_spanned(&xs)
        ));
        if let Some(fit) = fit_loglog(&xs, &ys) {
            report.fitted_slope = fit.slope - 1.0;
            report.residual = fit.residual;
        }
        return report;
    }
    let fit = fit_loglog(&xs, &ys).expect("enough points for a fit");
    report.fitted_slope = fit.slope - 1.0;
    report.residual = fit.residual;
    report.verdict = if report.fitted_slope <= beta + cfg.slope_tolerance {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares() -> SpectralMeasure {
        SpectralMeasure::generated(
            |n| ((((n + 1) * (n + 1)) as f64), Complex64::new(1.0, 0.0)),
            0.0,
            1e4,
        )
        .unwrap()
    }

    #[test]
    fn counting_squares() {
        let m = squares();
        assert_eq!(riesz_mean(&m, 0, 10.0).unwrap().re, 3.0);
        assert!((riesz_mean(&m, 1, 10.0).unwrap().re - 1.6).abs() < 1e-15);
    }

    #[test]
    fn first_weight_just_above_first_atom() {
        let m = SpectralMeasure::from_real_atoms(&[(2.0, 0.7), (3.0, 5.0)], 0.0).unwrap();
        assert_eq!(riesz_mean(&m, 0, 2.0 + 1e-12).unwrap().re, 0.7);
        assert_eq!(riesz_mean(&m, 0, 2.0).unwrap().re, 0.0);
    }

    #[test]
    fn domain_error_at_support_bound() {
        let m = squares();
        assert!(matches!(riesz_mean(&m, 1, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn density_by_quadrature_matches_beta_function() {
        // ∫_0^λ μ^{-1/2} (1-μ/λ)^2 dμ = √λ · B(1/2, 3) = √λ · 16/15
        let m = SpectralMeasure::from_density(|mu| mu.powf(-0.5), 0.0);
        let v = riesz_mean(&m, 2, 400.0).unwrap().re;
        assert!((v - 20.0 * 16.0 / 15.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn non_finite_exponent_rejected() {
        let m = squares();
        assert!(matches!(cesaro_order_test(&m, f64::NAN, 4), Err(Error::Parameter(_))));
    }

    #[test]
    fn counting_measure_fails_half_exponent() {
        let m = SpectralMeasure::generated(|n| ((n + 1) as f64, Complex64::new(1.0, 0.0)), 0.0, 1e4).unwrap();
        let r = cesaro_order_test(&m, -0.5, 4).unwrap();
        assert_eq!(r.verdict, Verdict::Fails, "{r:?}");
    }

    #[test]
    fn limit_of_alternating_series() {
        let m = SpectralMeasure::generated(
            |n| {
                let k = n + 1;
                (k as f64, Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            },
            0.0,
            1e5,
        )
        .unwrap();
        let (v, r) = cesaro_limit(&m, 6).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((v.unwrap().re + 0.5).abs() < 1e-4);
    }

    #[test]
    fn limit_needs_enough_atoms() {
        let m = SpectralMeasure::from_real_atoms(&[(1.0, 1.0), (2.0, 1.0)], 0.0).unwrap();
        assert!(matches!(cesaro_limit(&m, 4), Err(Error::Data(_))));
    }
}

//! The homogeneous distributions `g_α = x_+^α` and their finite-part
//! regularisations at the exceptional exponents `α = −1, −2, ...`.

use crate::error::{Error, Result};
use crate::testfn::{Domain, Integrator, QuadratureResult, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinitePart {
    pub alpha: f64,
    pub is_exceptional: bool,
}

impl FinitePart {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::param("exponent must be finite"));
        }
        Ok(FinitePart {
            alpha,
            is_exceptional: alpha <= -1.0 && alpha.fract() == 0.0,
        })
    }

    /// Order of the Taylor polynomial subtracted at the origin (`None` when
    /// `x^α` is locally integrable).
    fn subtraction_order(&self) -> Option<usize> {
        if self.is_exceptional {
            Some((-self.alpha) as usize - 1)
        } else if self.alpha < -1.0 {
            Some((-self.alpha - 1.0).floor() as usize)
        } else {
            None
        }
    }

    /// `⟨g_α, φ⟩`.
    ///
    /// With `m` the subtraction order and `T_m` the Taylor polynomial of `φ`
    /// at 0:
    ///
    /// `∫₀¹ (φ − T_m φ) x^α dx + ∫₁^∞ φ x^α dx + Σ_{j ≤ m, j+α+1 ≠ 0} φ^{(j)}(0) / (j! (j+α+1))`.
    ///
    /// For non-exceptional `α` this is the analytic continuation of
    /// `∫₀^∞ φ x^α dx`; for `α = −k` it is the Hadamard finite part, which is
    /// homogeneous under dilations up to the logarithmic term.
    pub fn pair(&self, phi: &TestFunction) -> Result<f64> {
        let m = self.subtraction_order();
        let taylor_needed = m.map_or(0, |m| m + 1);
        let alpha = self.alpha;

        // Near the origin integrate the Taylor series of the integrand term
        // by term, which avoids the cancellation in φ − T_m φ.
        let (x_c, inner) = inner_series(phi, alpha, taylor_needed)?;

        let ig = Integrator::new(1e-15, 1e-13).with_max_panels(8000);
        let taylor: Vec<f64> = (0..taylor_needed)
            .map(|j| phi.deriv(j, 0.0).map(|d| d / factorial(j)))
            .collect::<Result<_>>()?;
        let subtracted = |x: f64| {
            let mut t = 0.0;
            let mut p = 1.0;
            for c in &taylor {
                t += c * p;
                p *= x;
            }
            t
        };
        let middle = settled(ig.integrate(
            |x: f64| (phi.eval(x) - subtracted(x)) * x.powf(alpha),
            Domain::Finite(x_c, 1.0),
        ))?;

        let (_, hi) = phi.effective_interval(1e-18);
        let tail = if hi <= 1.0 {
            0.0
        } else if hi.is_finite() {
            settled(ig.integrate(|x: f64| phi.eval(x) * x.powf(alpha), Domain::Finite(1.0, hi)))?
        } else {
            ig.integrate(|x: f64| phi.eval(x) * x.powf(alpha), Domain::UpperHalf(1.0))
                .map_err(|e| match e {
                    Error::Accuracy { best, error_estimate, .. } => Error::Accuracy {
                        message: "tail integral ∫₁^∞ φ x^α did not converge".into(),
                        best,
                        error_estimate,
                    },
                    other => other,
                })?
                .value
        };

        let mut constants = 0.0;
        for (j, c) in taylor.iter().enumerate() {
            let p = j as f64 + alpha + 1.0;
            if p != 0.0 {
                constants += c / p;
            }
        }
        Ok(inner + middle + tail + constants)
    }

    /// `⟨g_α(λx), φ(x)⟩ = λ^{−1} ⟨g_α(y), φ(y/λ)⟩`.
    pub fn eval_scaled(&self, phi: &TestFunction, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::param("scale must be positive"));
        }
        Ok(self.pair(&phi.affine(1.0 / lambda, 0.0)?)? / lambda)
    }

    /// Right side of the dilation law: `λ^α ⟨g_α, φ⟩` for non-exceptional
    /// `α`, and `⟨g_{−k}, φ⟩/λ^k + ln λ · φ^{(k−1)}(0) / ((k−1)! λ^k)` for
    /// `α = −k`.
    pub fn scaling_law(&self, phi: &TestFunction, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::param("scale must be positive"));
        }
        let base = self.pair(phi)?;
        if self.is_exceptional {
            let k = (-self.alpha) as usize;
            let lk = lambda.powi(k as i32);
            Ok(base / lk + lambda.ln() * phi.deriv(k - 1, 0.0)? / (factorial(k - 1) * lk))
        } else {
            Ok(lambda.powf(self.alpha) * base)
        }
    }
}

/// `⟨g_α(λ_scale·x), φ(x)⟩`.
pub fn finite_part_eval(g: &FinitePart, phi: &TestFunction, lambda_scale: f64) -> Result<f64> {
    g.eval_scaled(phi, lambda_scale)
}

/// Accept a budget-exhausted integral whose error estimate is already at
/// rounding level; the flat ends of compactly supported integrands keep the
/// adaptive estimate from reaching the absolute target.
fn settled(r: Result<QuadratureResult<f64>>) -> Result<f64> {
    match r {
        Ok(r) => Ok(r.value),
        Err(Error::Accuracy {
            best, error_estimate, ..
        }) if error_estimate <= 1e-12 * best.re.abs().max(1.0) => Ok(best.re),
        Err(e) => Err(e),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Integral of `(φ − T_{n−1}φ) x^α` over `[0, x_c]` from the Taylor series of
/// `φ` at 0. Returns the chosen `x_c` and the value.
fn inner_series(phi: &TestFunction, alpha: f64, start: usize) -> Result<(f64, f64)> {
    let available = phi.max_analytic_derivative_order();
    if available < start + 4 {
        return Err(Error::UnsupportedOrder {
            requested: start + 4,
            max: available,
        });
    }
    let coeffs: Vec<f64> = (start..=available)
        .map(|j| phi.deriv(j, 0.0).map(|d| d / factorial(j)))
        .collect::<Result<_>>()?;
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(phi.eval(0.0).abs());
    if scale == 0.0 {
        return Ok((1e-2, 0.0));
    }
    let mut x_c: f64 = 1e-2;
    for _ in 0..60 {
        let mut sum = 0.0;
        let mut last = f64::INFINITY;
        for (i, c) in coeffs.iter().enumerate() {
            let p = (start + i) as f64 + alpha + 1.0;
            let term = c * x_c.powf(p) / p;
            sum += term;
            last = term.abs();
        }
        // Compare with the partial sum, not the coefficients: near a flat
        // support edge the coefficients grow fast while the sum stays small.
        if last <= 1e-17 * sum.abs() {
            return Ok((x_c, sum));
        }
        x_c *= 0.5;
    }
    Err(Error::Accuracy {
        message: "Taylor series at the origin does not converge".into(),
        best: num_complex::Complex64::new(0.0, 0.0),
        error_estimate: f64::INFINITY,
    })
}

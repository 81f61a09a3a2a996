use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{KernelEval, Method};
use crate::error::{Error, Result};
use crate::numerics::ComplexSum;

/// Evaluations with `|cos t − cos(x±y)|` below this are rejected, and `P`
/// refuses points this close (in reduced `t`) to its jump lines.
pub const SINGULAR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WightmanOptions {
    /// Cesàro order applied to the partial sums of the eigenfunction series.
    pub cesaro_order: usize,
    /// Number of eigenmodes `N`.
    pub terms: usize,
}

impl Default for WightmanOptions {
    fn default() -> Self {
        WightmanOptions {
            cesaro_order: 1,
            terms: 10_000,
        }
    }
}

fn check_open_interval(x: f64, y: f64) -> Result<()> {
    for (v, name) in [(x, "x"), (y, "y")] {
        if !(v > 0.0 && v < PI) {
            return Err(Error::domain(format!("{name} = {v} must lie in (0, π)")));
        }
    }
    Ok(())
}

/// `t` reduced into `[−π, π)`.
fn reduce(t: f64) -> f64 {
    let r = (t + PI).rem_euclid(2.0 * PI) - PI;
    if r >= PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `(|x−y|, f(x+y))` with `f(z) = min(z, 2π − z)`.
fn light_cone(x: f64, y: f64) -> (f64, f64) {
    let s = x + y;
    ((x - y).abs(), s.min(2.0 * PI - s))
}

/// The sign function `P(t,x,y) ∈ {−1, 0, 1}`: `1` for `|x−y| < t < f(x+y)`,
/// `−1` for the mirror band at negative `t`, `0` otherwise, periodic in
/// `t` with period `2π`.
pub fn wightman_p(t: f64, x: f64, y: f64) -> Result<i32> {
    if !t.is_finite() {
        return Err(Error::domain("t must be finite"));
    }
    check_open_interval(x, y)?;
    let tau = reduce(t);
    let (a, b) = light_cone(x, y);
    let m = tau.abs();
    if (m - a).abs() < SINGULAR_TOLERANCE || (m - b).abs() < SINGULAR_TOLERANCE {
        return Err(Error::Boundary(format!(
            "t = {t} is within {SINGULAR_TOLERANCE:e} of a jump of P at (x, y) = ({x}, {y})"
        )));
    }
    Ok(p_raw(tau, a, b))
}

fn p_raw(tau: f64, a: f64, b: f64) -> i32 {
    let m = tau.abs();
    if m > a && m < b {
        if tau > 0.0 {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

/// Closed form without tolerance checks; infinite on the singular lines.
pub(crate) fn wightman_raw(t: f64, x: f64, y: f64) -> Complex64 {
    let c = t.cos();
    let re = ((c - (x + y).cos()) / (c - (x - y).cos())).abs().ln() / (4.0 * PI);
    let (a, b) = light_cone(x, y);
    Complex64::new(re, 0.25 * p_raw(reduce(t), a, b) as f64)
}

fn check_singular(t: f64, x: f64, y: f64) -> Result<()> {
    let c = t.cos();
    for s in [x - y, x + y] {
        if (c - s.cos()).abs() < SINGULAR_TOLERANCE {
            return Err(Error::Singularity(format!(
                "cos t − cos({s}) = {:e} at t = {t}",
                c - s.cos()
            )));
        }
    }
    Ok(())
}

/// Wightman function of the Dirichlet interval,
/// `W = (1/π) Σ_k sin kx sin ky e^{ikt}/k`.
///
/// `ClosedForm` gives `(1/4π) ln|(cos t − cos(x+y))/(cos t − cos(x−y))| +
/// (i/4) P(t,x,y)`; `SpectralSum` gives the Cesàro means of the partial
/// sums with the default [`WightmanOptions`].
pub fn wightman_interval(t: f64, x: f64, y: f64, method: Method) -> Result<KernelEval> {
    wightman_interval_with(t, x, y, method, &WightmanOptions::default())
}

pub fn wightman_interval_with(t: f64, x: f64, y: f64, method: Method, opts: &WightmanOptions) -> Result<KernelEval> {
    if !t.is_finite() {
        return Err(Error::domain("t must be finite"));
    }
    check_open_interval(x, y)?;
    check_singular(t, x, y)?;
    match method {
        Method::ClosedForm => {
            let p = wightman_p(t, x, y)?;
            let v = wightman_raw(t, x, y);
            Ok(KernelEval {
                value: Complex64::new(v.re, 0.25 * p as f64),
                method,
                truncation: 0,
                error_estimate: 8.0 * f64::EPSILON * v.re.abs().max(1.0),
            })
        }
        Method::SpectralSum => {
            if opts.terms == 0 {
                return Err(Error::param("need at least one term"));
            }
            let n = opts.terms;
            let p = opts.cesaro_order;
            let mut sum = ComplexSum::new();
            for k in 1..=n {
                // C(N−k+p, p) / C(N+p, p)
                let mut w = 1.0;
                for i in 1..=p {
                    w *= (n - k + i) as f64 / (n + i) as f64;
                }
                let kf = k as f64;
                let a = (kf * x).sin() * (kf * y).sin() / kf;
                sum.add(Complex64::from_polar(w * a / PI, kf * t));
            }
            Ok(KernelEval {
                value: sum.value(),
                method,
                truncation: n,
                // Cesàro-1 means of a series with jumps and log peaks
                // converge like ln N / N away from the singular lines.
                error_estimate: (n as f64).ln() / n as f64,
            })
        }
        Method::ImageSum => Err(Error::Unsupported("Wightman function has no image-sum evaluation".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_examples() {
        assert_eq!(wightman_p(1.0, 0.5, 1.0).unwrap(), 1);
        assert_eq!(wightman_p(0.2, 0.5, 1.0).unwrap(), 0);
        assert_eq!(wightman_p(-1.0, 0.5, 1.0).unwrap(), -1);
        assert_eq!(wightman_p(2.0, 0.5, 1.0).unwrap(), 0);
        assert_eq!(wightman_p(1.0 + 2.0 * PI, 0.5, 1.0).unwrap(), 1);
        assert!(matches!(wightman_p(0.5, 0.5, 1.0), Err(Error::Boundary(_))));
        assert!(matches!(wightman_p(1.0, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_example() {
        let v = wightman_interval(1.0, 0.5, 1.0, Method::ClosedForm).unwrap().value;
        let c = 1.0f64.cos();
        let re = ((c - 1.5f64.cos()) / (c - 0.5f64.cos())).abs().ln() / (4.0 * PI);
        assert!((v.re - re).abs() < 1e-15);
        assert_eq!(v.im, 0.25);
    }

    #[test]
    fn cesaro_series_matches_closed_form() {
        let s = wightman_interval(1.0, 0.5, 1.0, Method::SpectralSum).unwrap().value;
        let c = wightman_interval(1.0, 0.5, 1.0, Method::ClosedForm).unwrap().value;
        assert!((s - c).norm() < 1e-3, "{s} vs {c}");
    }

    #[test]
    fn small_t_real_part() {
        let (x, y) = (0.5f64, 1.0f64);
        let limit = ((1.0 - (x + y).cos()) / (1.0 - (x - y).cos())).ln() / (4.0 * PI);
        let v = wightman_interval(1e-6, x, y, Method::ClosedForm).unwrap().value;
        assert!((v.re - limit).abs() < 1e-9);
    }

    #[test]
    fn singular_line_rejected() {
        assert!(matches!(
            wightman_interval(0.5, 0.5, 1.0, Method::ClosedForm),
            Err(Error::Singularity(_))
        ));
    }
}

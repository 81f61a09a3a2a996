use std::f64::consts::PI;

use num_complex::Complex64;

use super::wightman::wightman_raw;
use super::{cylinder_interval_closed, cylinder_line, heat_kernel, heat_line, schrodinger_line, Case, KernelKind, Method};
use crate::error::{Error, Result};
use crate::testfn::{Integrator, TestFunction};

const MAX_BREAKS: usize = 20_000;
const MAX_LOBES: usize = 5_000;
const MAX_RINGS: usize = 10_000;
/// Quadrature target relative to `∫|G φ|`.
const NOISE: f64 = 1e-13;

/// `⟨G(εt, x, y), φ(t)⟩ = ∫ G(εt, x, y) φ(t) dt`.
///
/// Heat and cylinder kernels are causal here: only `t > 0` contributes.
/// The Schrödinger and Wightman kernels use `G(−t) = conj G(t)` for the
/// negative half. On the interval the Schrödinger kernel is summed image
/// by image, each image smeared separately.
pub fn averaged_smear(kind: KernelKind, case: Case, x: f64, y: f64, phi: &TestFunction, eps: f64) -> Result<Complex64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::param(format!("ε must be positive, got {eps}")));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::domain("points must be finite"));
    }
    if case == Case::Interval {
        for v in [x, y] {
            if !(0.0..=PI).contains(&v) {
                return Err(Error::domain(format!("{v} must lie in [0, π]")));
            }
        }
    }
    let (lo, hi) = phi.effective_interval(1e-16);
    let psi_pos = |s: f64| phi.eval(s);
    let psi_neg = |s: f64| phi.eval(-s);
    match kind {
        KernelKind::Heat | KernelKind::Cylinder => {
            if !hi.is_finite() {
                return Err(Error::param("φ must decay for t → +∞"));
            }
            if hi <= 0.0 {
                return Ok(Complex64::default());
            }
            let a = lo.max(0.0);
            let diagonal = x == y;
            if kind == KernelKind::Cylinder && diagonal && a == 0.0 && phi.eval(0.0) != 0.0 {
                return Err(Error::param(
                    "the diagonal cylinder kernel grows like 1/(πt); its smear needs φ(0) = 0",
                ));
            }
            let g = |s: f64| -> Complex64 {
                let tau = eps * s;
                let v = match (kind, case) {
                    (KernelKind::Heat, Case::Line) => heat_line(tau, x - y),
                    (KernelKind::Heat, Case::Interval) => {
                        let m = if tau < 1.0 { Method::ImageSum } else { Method::SpectralSum };
                        heat_kernel(case, tau, x, y, m).map(|e| e.value.re).unwrap_or(f64::NAN)
                    }
                    (_, Case::Line) => cylinder_line(tau, x - y),
                    (_, Case::Interval) => cylinder_interval_closed(tau, x, y),
                };
                Complex64::new(v, 0.0)
            };
            let sqrt_sub = kind == KernelKind::Heat && diagonal;
            smooth_side(&g, &psi_pos, a, hi, sqrt_sub, &[])
        }
        KernelKind::Schrodinger => {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::param("φ must decay on both sides"));
            }
            match case {
                Case::Line => schrodinger_line_smear(x - y, eps, lo, hi, &psi_pos, &psi_neg),
                Case::Interval => schrodinger_interval_smear(x, y, eps, lo, hi, &psi_pos, &psi_neg),
            }
        }
        KernelKind::Wightman => {
            if case == Case::Line {
                return Err(Error::Unsupported("no Wightman function on the line".into()));
            }
            if !(x > 0.0 && x < PI && y > 0.0 && y < PI) {
                return Err(Error::domain("Wightman points must lie inside (0, π)"));
            }
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::param("φ must decay on both sides"));
            }
            let g = |s: f64| wightman_raw(eps * s, x, y);
            let mut total = Complex64::default();
            if hi > 0.0 {
                let a = lo.max(0.0);
                let br = light_cone_breaks(x, y, eps, a, hi)?;
                total += smooth_side(&g, &psi_pos, a, hi, false, &br)?;
            }
            if lo < 0.0 {
                let a = (-hi).max(0.0);
                let br = light_cone_breaks(x, y, eps, a, -lo)?;
                total += smooth_side(&g, &psi_neg, a, -lo, false, &br)?.conj();
            }
            Ok(total)
        }
    }
}

/// Times `s ∈ (a, b)` with `cos(εs) = cos(x ± y)`.
fn light_cone_breaks(x: f64, y: f64, eps: f64, a: f64, b: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for c in [(x - y).abs(), x + y] {
        let k_max = (eps * b / (2.0 * PI)).ceil() as i64 + 1;
        for k in 0..=k_max {
            for tau in [2.0 * PI * k as f64 + c, 2.0 * PI * k as f64 - c] {
                let s = tau / eps;
                if s > a && s < b {
                    out.push(s);
                }
            }
        }
    }
    if out.len() > MAX_BREAKS {
        return Err(Error::param("ε·supp φ crosses too many light cones to smear"));
    }
    Ok(out)
}

fn integrator(scale: f64) -> Integrator {
    Integrator::new((NOISE * scale).max(1e-300), 1e-12).with_max_panels(200_000)
}

fn with_uniform(a: f64, b: f64, extra: &[f64], pieces: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=pieces).map(|i| a + (b - a) * i as f64 / pieces as f64).collect();
    pts.extend(extra.iter().copied().filter(|&s| s > a && s < b));
    pts.sort_by(|p, q| p.total_cmp(q));
    pts.dedup();
    pts
}

/// `∫ f` over the break points, to a tolerance tied to `∫|f|`.
fn integrate_breaks<F>(f: F, points: &[f64]) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let rough = Integrator::new(1e-300, 1e-3).finite_with_breaks(|s| f(s).norm(), points);
    let scale = match rough {
        Ok(r) => r.value,
        Err(Error::Accuracy { best, .. }) => best.re,
        Err(e) => return Err(e),
    };
    if scale == 0.0 {
        return Ok(Complex64::default());
    }
    match integrator(scale).finite_with_breaks(&f, points) {
        Ok(r) => Ok(r.value),
        // Rounding in long oscillatory stretches keeps the estimate just
        // above the noise target; the value is then noise-limited anyway.
        Err(Error::Accuracy {
            best, error_estimate, ..
        }) if error_estimate <= 1e3 * NOISE * scale => Ok(best),
        Err(e) => Err(e),
    }
}

/// `∫_a^b g(s) ψ(s) ds` for a kernel that is smooth on `(a, b)` apart from
/// the listed break points; with `sqrt_sub` the `s^{−1/2}` singularity at
/// `a = 0` is removed by `s = u²`.
fn smooth_side(
    g: &dyn Fn(f64) -> Complex64,
    psi: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    sqrt_sub: bool,
    breaks: &[f64],
) -> Result<Complex64> {
    if b <= a {
        return Ok(Complex64::default());
    }
    if sqrt_sub && a == 0.0 {
        let ub: Vec<f64> = breaks.iter().map(|s| s.sqrt()).collect();
        let pts = with_uniform(0.0, b.sqrt(), &ub, 16);
        integrate_breaks(|u| g(u * u) * (2.0 * u * psi(u * u)), &pts)
    } else {
        let pts = with_uniform(a, b, breaks, 16);
        integrate_breaks(|s| g(s) * psi(s), &pts)
    }
}

/// `∫_a^b U(εs; z) ψ(s) ds` on the positive half, where the phase
/// `z²/(4εs)` may oscillate without bound as `s ↓ 0`.
fn schrodinger_positive(z: f64, eps: f64, a: f64, b: f64, psi: &dyn Fn(f64) -> f64) -> Result<Complex64> {
    if b <= a {
        return Ok(Complex64::default());
    }
    let g = |s: f64| schrodinger_line(eps * s, z);
    if z == 0.0 {
        return smooth_side(&g, psi, a, b, true, &[]);
    }
    let c = z * z / (4.0 * eps);
    let theta_b = c / b;
    let cap = c / (theta_b + 2.0 * PI * MAX_BREAKS as f64);
    let t1 = a.max(cap);
    let periods = ((c / t1 - theta_b) / (2.0 * PI)).floor() as usize;
    let breaks: Vec<f64> = (1..=periods).map(|k| c / (theta_b + 2.0 * PI * k as f64)).collect();
    let mut total = smooth_side(&g, psi, t1, b, false, &breaks)?;
    if t1 > a {
        // s = 1/u turns the accumulating oscillation into e^{icu} on [1/t1, ∞).
        let u0 = 1.0 / t1;
        let u_end = if a > 0.0 { 1.0 / a } else { f64::INFINITY };
        let f = move |u: f64| {
            if u >= u_end {
                Complex64::default()
            } else {
                let s = 1.0 / u;
                g(s) * (psi(s) * s * s)
            }
        };
        let half = PI / c;
        let r = Integrator::new(1e-300, 1e-12).oscillatory(f, u0, |k| u0 + (k + 1) as f64 * half, MAX_LOBES);
        total += match r {
            Ok(q) => q.value,
            Err(Error::Accuracy {
                best, error_estimate, ..
            }) if error_estimate <= 1e-9 * total.norm().max(best.norm()) => best,
            Err(e) => return Err(e),
        };
    }
    Ok(total)
}

fn schrodinger_line_smear(
    z: f64,
    eps: f64,
    lo: f64,
    hi: f64,
    psi_pos: &dyn Fn(f64) -> f64,
    psi_neg: &dyn Fn(f64) -> f64,
) -> Result<Complex64> {
    let mut total = Complex64::default();
    if hi > 0.0 {
        total += schrodinger_positive(z, eps, lo.max(0.0), hi, psi_pos)?;
    }
    if lo < 0.0 {
        total += schrodinger_positive(z, eps, (-hi).max(0.0), -lo, psi_neg)?.conj();
    }
    Ok(total)
}

/// Image by image: `Σ_N ⟨U(z = x−y−2Nπ)⟩ − ⟨U(z = x+y−2Nπ)⟩`.
fn schrodinger_interval_smear(
    x: f64,
    y: f64,
    eps: f64,
    lo: f64,
    hi: f64,
    psi_pos: &dyn Fn(f64) -> f64,
    psi_neg: &dyn Fn(f64) -> f64,
) -> Result<Complex64> {
    let smear = |z: f64| schrodinger_line_smear(z, eps, lo, hi, psi_pos, psi_neg);
    let mut total = smear(x - y)? - smear(x + y)?;
    let mut quiet = 0;
    for n in 1..=MAX_RINGS {
        let s = 2.0 * PI * n as f64;
        let ring = smear(x - y - s)? + smear(x - y + s)? - smear(x + y - s)? - smear(x + y + s)?;
        total += ring;
        if ring.norm() <= 1e-14 * total.norm() {
            quiet += 1;
            if quiet == 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Accuracy {
        message: "smeared Schrödinger images did not decay".into(),
        best: total,
        error_estimate: f64::INFINITY,
    })
}

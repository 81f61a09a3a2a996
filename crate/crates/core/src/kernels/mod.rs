//! Heat, Schrödinger, cylinder and Wightman kernels of `−d²/dx²` on the
//! line and on the Dirichlet interval `(0, π)`, each reachable through at
//! least two independent evaluation routes.

mod expansion;
mod smear;
mod wightman;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::CompensatedSum;
use crate::testfn::Integrator;

pub use expansion::{small_t_coefficients, ExpansionCoefficients, ExpansionTerm, Locality, Prefactor, Validity};
pub use smear::averaged_smear;
pub use wightman::{wightman_interval, wightman_interval_with, wightman_p, WightmanOptions, SINGULAR_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Heat,
    Schrodinger,
    Cylinder,
    Wightman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Line,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SpectralSum,
    ClosedForm,
    ImageSum,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [
        KernelKind::Heat,
        KernelKind::Schrodinger,
        KernelKind::Cylinder,
        KernelKind::Wightman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Heat => "heat",
            KernelKind::Schrodinger => "schrodinger",
            KernelKind::Cylinder => "cylinder",
            KernelKind::Wightman => "wightman",
        }
    }
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::Line => "line",
            Case::Interval => "interval",
        }
    }
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SpectralSum => "spectral_sum",
            Method::ClosedForm => "closed_form",
            Method::ImageSum => "image_sum",
        }
    }
}

macro_rules! name_traits {
    ($t:ty, [$($v:expr),*]) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                let key = s.trim().to_ascii_lowercase().replace('-', "_");
                [$($v),*]
                    .into_iter()
                    .find(|v: &$t| v.name() == key)
                    .ok_or_else(|| Error::Parse(format!("unknown {}: {s}", stringify!($t))))
            }
        }
    };
}

name_traits!(KernelKind, [KernelKind::Heat, KernelKind::Schrodinger, KernelKind::Cylinder, KernelKind::Wightman]);
name_traits!(Case, [Case::Line, Case::Interval]);
name_traits!(Method, [Method::SpectralSum, Method::ClosedForm, Method::ImageSum]);

/// The spectral profile `g(t, λ)` of a kernel, `G = ∫ g(t,λ) dE_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelProfile {
    pub kind: KernelKind,
    /// Whether the profile decays at infinity with all its derivatives
    /// (true for heat and cylinder, false for the oscillatory kinds).
    pub in_class_k: bool,
}

impl KernelProfile {
    pub fn new(kind: KernelKind) -> Self {
        KernelProfile {
            kind,
            in_class_k: matches!(kind, KernelKind::Heat | KernelKind::Cylinder),
        }
    }

    /// `e^{−tλ}`, `e^{−itλ}`, `e^{−t√λ}`, `e^{−it√λ}/(2√λ)`.
    pub fn eval(&self, t: f64, lambda: f64) -> Complex64 {
        match self.kind {
            KernelKind::Heat => Complex64::new((-t * lambda).exp(), 0.0),
            KernelKind::Schrodinger => Complex64::from_polar(1.0, -t * lambda),
            KernelKind::Cylinder => Complex64::new((-t * lambda.sqrt()).exp(), 0.0),
            KernelKind::Wightman => {
                let s = lambda.sqrt();
                Complex64::from_polar(0.5 / s, -t * s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub value: Complex64,
    pub method: Method,
    /// Terms (or images, or quadrature panels) used; 0 for closed forms.
    pub truncation: usize,
    pub error_estimate: f64,
}

impl KernelEval {
    fn closed(value: Complex64) -> Self {
        KernelEval {
            value,
            method: Method::ClosedForm,
            truncation: 0,
            error_estimate: 4.0 * f64::EPSILON * value.norm(),
        }
    }
}

/// Evaluate any supported (kind, case, method) combination.
pub fn kernel(kind: KernelKind, case: Case, t: f64, x: f64, y: f64, method: Method) -> Result<KernelEval> {
    match kind {
        KernelKind::Heat => heat_kernel(case, t, x, y, method),
        KernelKind::Schrodinger => schrodinger_kernel(case, t, x, y, method),
        KernelKind::Cylinder => cylinder_kernel(case, t, x, y, method),
        KernelKind::Wightman => match case {
            Case::Interval => wightman_interval(t, x, y, method),
            Case::Line => Err(Error::Unsupported(
                "the Wightman function on the line is infrared divergent and has no integrated form".into(),
            )),
        },
    }
}

fn check_positive_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive and finite, got {t}")));
    }
    Ok(())
}

fn check_closed_interval(x: f64, y: f64) -> Result<()> {
    for (v, name) in [(x, "x"), (y, "y")] {
        if !(0.0..=PI).contains(&v) {
            return Err(Error::domain(format!("{name} = {v} must lie in [0, π]")));
        }
    }
    Ok(())
}

fn check_finite(x: f64, y: f64) -> Result<()> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::domain("points must be finite"));
    }
    Ok(())
}

fn unsupported(kind: KernelKind, case: Case, method: Method) -> Error {
    Error::Unsupported(format!("{kind} kernel on the {case} has no {method} evaluation"))
}

/// Summation target for truncated series and image sums.
const SERIES_REL_TOL: f64 = 1e-16;
const SERIES_ABS_TOL: f64 = 1e-300;
const MAX_TERMS: usize = 50_000_000;

/// `(2/π) Σ_{k≥1} sin kx sin ky a_k` with `|a_k| ≤ bound(k)` a decreasing
/// majorant whose tail sum beyond `k` is `tail(k)`.
fn sine_series<A, T>(x: f64, y: f64, a: A, tail: T) -> Result<KernelEval>
where
    A: Fn(usize) -> f64,
    T: Fn(usize) -> f64,
{
    let mut sum = CompensatedSum::new();
    let mut k = 0usize;
    loop {
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::Accuracy {
                message: "eigenfunction series did not reach its tail bound".into(),
                best: Complex64::new(sum.value(), 0.0),
                error_estimate: 2.0 / PI * tail(k),
            });
        }
        let kf = k as f64;
        sum.add(2.0 / PI * (kf * x).sin() * (kf * y).sin() * a(k));
        let rest = 2.0 / PI * tail(k);
        if rest <= (SERIES_REL_TOL * sum.value().abs()).max(SERIES_ABS_TOL) {
            return Ok(KernelEval {
                value: Complex64::new(sum.value(), 0.0),
                method: Method::SpectralSum,
                truncation: k,
                error_estimate: rest + sum.error_bound(),
            });
        }
    }
}

/// Symmetric image sum `Σ_N [g(x−y−2Nπ) − g(x+y−2Nπ)]`, adding `N = 0, ±1,
/// ±2, ...` until the first omitted pair is below `SERIES_REL_TOL` of the
/// retained sum. `g` must be even and decrease in `|u|`.
fn image_sum<G>(x: f64, y: f64, g: G) -> Result<(f64, usize, f64)>
where
    G: Fn(f64) -> f64,
{
    let (a, b) = (x - y, x + y);
    let mut sum = CompensatedSum::new();
    sum.add(g(a) - g(b));
    let mut n = 0usize;
    loop {
        n += 1;
        if n > MAX_TERMS {
            return Err(Error::Accuracy {
                message: "image sum did not converge".into(),
                best: Complex64::new(sum.value(), 0.0),
                error_estimate: f64::INFINITY,
            });
        }
        let s = 2.0 * PI * n as f64;
        let pair = [g(a - s), g(a + s), g(b - s), g(b + s)];
        sum.add(pair[0] + pair[1]);
        sum.add(-(pair[2] + pair[3]));
        // Largest single image magnitude of the next ring bounds its pair.
        let next = 2.0 * PI * (n + 1) as f64;
        let bound = 2.0 * [g(a - next), g(a + next), g(b - next), g(b + next)]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if bound <= (SERIES_REL_TOL * sum.value().abs()).max(SERIES_ABS_TOL) {
            return Ok((sum.value(), n, bound + sum.error_bound()));
        }
    }
}

/// Heat kernel `K(t,x,y)`.
///
/// Line: `SpectralSum` integrates `(1/π) ∫₀^∞ cos(k(x−y)) e^{−k²t} dk`,
/// `ClosedForm` is `(4πt)^{−1/2} e^{−(x−y)²/4t}`. Interval: `SpectralSum`
/// sums `(2/π) Σ sin kx sin ky e^{−k²t}`, `ImageSum` the method of images.
pub fn heat_kernel(case: Case, t: f64, x: f64, y: f64, method: Method) -> Result<KernelEval> {
    check_positive_time(t)?;
    match (case, method) {
        (Case::Line, Method::ClosedForm) => {
            check_finite(x, y)?;
            Ok(KernelEval::closed(Complex64::new(heat_line(t, x - y), 0.0)))
        }
        (Case::Line, Method::SpectralSum) => {
            check_finite(x, y)?;
            let r = x - y;
            let cutoff = (45.0 / t).sqrt();
            fourier_cosine(move |k| (-k * k * t).exp(), r, cutoff)
        }
        (Case::Interval, Method::SpectralSum) => {
            check_closed_interval(x, y)?;
            sine_series(
                x,
                y,
                |k| (-((k * k) as f64) * t).exp(),
                |k| {
                    let k1 = (k + 1) as f64;
                    let first = (-k1 * k1 * t).exp();
                    first / (1.0 - (-(2.0 * k1 + 1.0) * t).exp())
                },
            )
        }
        (Case::Interval, Method::ImageSum) => {
            check_closed_interval(x, y)?;
            let norm = (4.0 * PI * t).sqrt();
            let (v, n, e) = image_sum(x, y, |u| (-u * u / (4.0 * t)).exp())?;
            Ok(KernelEval {
                value: Complex64::new(v / norm, 0.0),
                method: Method::ImageSum,
                truncation: n,
                error_estimate: e / norm,
            })
        }
        (c, m) => Err(unsupported(KernelKind::Heat, c, m)),
    }
}

pub(crate) fn heat_line(t: f64, r: f64) -> f64 {
    (-r * r / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `(1/π) ∫₀^K cos(kr) p(k) dk` for a profile `p` negligible beyond `K`.
fn fourier_cosine<P>(p: P, r: f64, cutoff: f64) -> Result<KernelEval>
where
    P: Fn(f64) -> f64,
{
    let ig = Integrator::new(1e-15, 1e-13).with_max_panels(50_000);
    // Break at every few half-periods so each panel sees a bounded phase.
    let period = if r == 0.0 { cutoff } else { PI / r.abs() };
    let pieces = ((cutoff / period).ceil() as usize).clamp(1, 20_000);
    let points: Vec<f64> = (0..=pieces).map(|i| cutoff * i as f64 / pieces as f64).collect();
    // Far from the diagonal the result is tiny and the absolute target sits
    // below rounding; accept estimates already at that level.
    let (value, error_estimate) = match ig.finite_with_breaks(|k: f64| (k * r).cos() * p(k), &points) {
        Ok(q) => (q.value, q.error_estimate),
        Err(Error::Accuracy {
            best, error_estimate, ..
        }) if error_estimate <= 1e-12 => (best.re, error_estimate),
        Err(e) => return Err(e),
    };
    Ok(KernelEval {
        value: Complex64::new(value / PI, 0.0),
        method: Method::SpectralSum,
        truncation: pieces,
        error_estimate: error_estimate / PI,
    })
}

/// Schrödinger propagator `U(t,x,y)`. Only the line closed form
/// `e^{−i sgn(t) π/4} (4π|t|)^{−1/2} e^{i(x−y)²/4t}` is a pointwise
/// evaluation: the eigenfunction series and the image sum do not converge,
/// and are used only inside smeared quantities ([`averaged_smear`]).
pub fn schrodinger_kernel(case: Case, t: f64, x: f64, y: f64, method: Method) -> Result<KernelEval> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::domain("Schrödinger kernel needs finite t ≠ 0"));
    }
    match (case, method) {
        (Case::Line, Method::ClosedForm) => {
            check_finite(x, y)?;
            Ok(KernelEval::closed(schrodinger_line(t, x - y)))
        }
        (Case::Line, Method::SpectralSum) | (Case::Interval, Method::SpectralSum) => Err(Error::Unsupported(
            "the Schrödinger spectral expansion does not converge pointwise; use averaged_smear".into(),
        )),
        (Case::Interval, Method::ImageSum) => Err(Error::Unsupported(
            "every Schrödinger image has the modulus of the main term, so the image sum does not converge pointwise; use averaged_smear".into(),
        )),
        (c, m) => Err(unsupported(KernelKind::Schrodinger, c, m)),
    }
}

pub(crate) fn schrodinger_line(t: f64, r: f64) -> Complex64 {
    let phase = -t.signum() * PI / 4.0 + r * r / (4.0 * t);
    Complex64::from_polar((4.0 * PI * t.abs()).powf(-0.5), phase)
}

/// One image of the interval Schrödinger propagator:
/// `e^{−i sgn(t) π/4} (4π|t|)^{−1/2} e^{i(z−2Nπ)²/4t}` with `z = x−y`
/// (direct) or `z = x+y` (reflected, entering with a minus sign).
pub fn schrodinger_image_term(t: f64, x: f64, y: f64, n: i64, reflected: bool) -> Result<Complex64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::domain("Schrödinger kernel needs finite t ≠ 0"));
    }
    let z = if reflected { x + y } else { x - y };
    let u = schrodinger_line(t, z - 2.0 * PI * n as f64);
    Ok(if reflected { -u } else { u })
}

/// Cylinder kernel `T(t,x,y)`.
///
/// Line: `ClosedForm` is `t/(π((x−y)²+t²))`, `SpectralSum` integrates
/// `(1/π) ∫₀^∞ cos(k(x−y)) e^{−kt} dk`. Interval: `SpectralSum` sums
/// `(2/π) Σ sin kx sin ky e^{−kt}`, `ImageSum` sums Lorentzian images with a
/// tail correction, `ClosedForm` is
/// `(1/2π)[sinh t/(cosh t − cos(x−y)) − sinh t/(cosh t − cos(x+y))]`.
pub fn cylinder_kernel(case: Case, t: f64, x: f64, y: f64, method: Method) -> Result<KernelEval> {
    check_positive_time(t)?;
    match (case, method) {
        (Case::Line, Method::ClosedForm) => {
            check_finite(x, y)?;
            Ok(KernelEval::closed(Complex64::new(cylinder_line(t, x - y), 0.0)))
        }
        (Case::Line, Method::SpectralSum) => {
            check_finite(x, y)?;
            fourier_cosine(move |k| (-k * t).exp(), x - y, 45.0 / t)
        }
        (Case::Interval, Method::SpectralSum) => {
            check_closed_interval(x, y)?;
            let q = (-t).exp();
            sine_series(x, y, |k| (-(k as f64) * t).exp(), |k| q.powi(k as i32 + 1) / (1.0 - q))
        }
        (Case::Interval, Method::ImageSum) => {
            check_closed_interval(x, y)?;
            let (v, n) = cylinder_images(t, x, y);
            Ok(KernelEval {
                value: Complex64::new(v, 0.0),
                method: Method::ImageSum,
                truncation: n,
                error_estimate: 1e-15 * v.abs().max(1.0),
            })
        }
        (Case::Interval, Method::ClosedForm) => {
            check_closed_interval(x, y)?;
            Ok(KernelEval::closed(Complex64::new(cylinder_interval_closed(t, x, y), 0.0)))
        }
        (c, m) => Err(unsupported(KernelKind::Cylinder, c, m)),
    }
}

pub(crate) fn cylinder_line(t: f64, r: f64) -> f64 {
    t / (PI * (r * r + t * t))
}

/// `cosh t − cos a = 2 sinh²(t/2) + 2 sin²(a/2)`, free of cancellation.
fn cosh_minus_cos(t: f64, a: f64) -> f64 {
    let s = (0.5 * t).sinh();
    let c = (0.5 * a).sin();
    2.0 * (s * s + c * c)
}

pub(crate) fn cylinder_interval_closed(t: f64, x: f64, y: f64) -> f64 {
    let sh = t.sinh();
    (sh / cosh_minus_cos(t, x - y) - sh / cosh_minus_cos(t, x + y)) / (2.0 * PI)
}

/// Direct images up to `|N| ≤ M`, the rest by the midpoint rule on the
/// image density plus its first Euler–Maclaurin correction.
fn cylinder_images(t: f64, x: f64, y: f64) -> (f64, usize) {
    const M: usize = 400;
    let g = |u: f64| t / (PI * (u * u + t * t));
    let mut sum = CompensatedSum::new();
    sum.add(g(x - y) - g(x + y));
    for n in 1..=M {
        let s = 2.0 * PI * n as f64;
        sum.add(g(x - y - s) + g(x - y + s));
        sum.add(-(g(x + y - s) + g(x + y + s)));
    }
    // Σ_{N > M} h(N) ≈ ∫_{M+½}^∞ h − h'(M+½)/24 for each of the four image
    // families u = ±z + 2πN.
    let n0 = M as f64 + 0.5;
    let family = |z: f64| {
        let u0 = 2.0 * PI * n0 + z;
        let integral = (t / u0).atan() / (2.0 * PI * PI);
        let dg = -2.0 * t * u0 / (PI * (u0 * u0 + t * t).powi(2));
        integral - 2.0 * PI * dg / 24.0
    };
    let (a, b) = (x - y, x + y);
    sum.add(family(-a) + family(a));
    sum.add(-(family(-b) + family(b)));
    (sum.value(), M)
}

//! Adaptive Gauss-Kronrod quadrature over finite and unbounded intervals,
//! plus a lobe-splitting integrator for slowly decaying oscillatory tails.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::epsilon_limit;

/// Values the integrators can accumulate: real or complex.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn magnitude(self) -> f64;
    fn to_complex(self) -> Complex64;
    fn from_parts(re: f64, im: f64) -> Self;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Integration domain. Unbounded ends are mapped onto finite intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[a, ∞)`
    UpperHalf(f64),
    /// `(−∞, b]`
    LowerHalf(f64),
    Whole,
}

// 21-point Kronrod extension of the 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525452125,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Single 21-point Gauss-Kronrod panel. Returns (value, error).
fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = T::default();
    let mut res_abs = fc.magnitude() * WGK[10];
    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let err = rescale_error(
        (res_k - res_g).magnitude() * abs_half,
        res_abs * abs_half,
        res_asc * abs_half,
    );
    (res_k * half, err)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_panels: 4000,
        }
    }
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Integrator {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }

    /// Integrate over a finite interval split at the given interior points.
    pub fn finite_with_breaks<T, F>(&self, f: F, points: &[f64]) -> Result<QuadratureResult<T>>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        if points.len() < 2 {
            return Err(Error::param("need at least two break points"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::param("break points must be finite"));
        }
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0usize;
        for w in points.windows(2) {
            if w[1] == w[0] {
                continue;
            }
            let (value, error) = gk21(&f, w[0], w[1]);
            evaluations += 21;
            heap.push(Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
        let exact_totals = |heap: &BinaryHeap<Panel<T>>| {
            heap.iter()
                .fold((T::default(), 0.0), |(s, e), p| (s + p.value, e + p.error))
        };
        // Running totals, refreshed from the panels every so often and
        // before any decision to stop.
        let (mut total, mut err) = exact_totals(&heap);
        let mut since_refresh = 0usize;
        loop {
            if since_refresh >= 64 || err <= self.target(total.magnitude()) || heap.len() >= self.max_panels {
                (total, err) = exact_totals(&heap);
                since_refresh = 0;
            }
            if !total.magnitude().is_finite() || !err.is_finite() {
                return Err(Error::Accuracy {
                    message: "non-finite integrand values".into(),
                    best: total.to_complex(),
                    error_estimate: f64::INFINITY,
                });
            }
            if err <= self.target(total.magnitude()) {
                return Ok(QuadratureResult {
                    value: total,
                    error_estimate: err,
                    evaluations,
                });
            }
            if heap.len() >= self.max_panels {
                return Err(Error::Accuracy {
                    message: format!("panel budget {} exhausted", self.max_panels),
                    best: total.to_complex(),
                    error_estimate: err,
                });
            }
            let worst = heap.pop().expect("non-empty panel set");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
                // Interval cannot be split further in floating point.
                heap.push(Panel {
                    error: 0.0,
                    ..worst
                });
                let (total, _) = exact_totals(&heap);
                return Err(Error::Accuracy {
                    message: "interval too narrow to subdivide".into(),
                    best: total.to_complex(),
                    error_estimate: err,
                });
            }
            total = total - worst.value;
            err -= worst.error;
            for (a, b) in [(worst.a, mid), (mid, worst.b)] {
                let (value, error) = gk21(&f, a, b);
                evaluations += 21;
                total = total + value;
                err += error;
                heap.push(Panel { a, b, value, error });
            }
            since_refresh += 1;
        }
    }

    pub fn integrate<T, F>(&self, f: F, domain: Domain) -> Result<QuadratureResult<T>>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        match domain {
            Domain::Finite(a, b) => self.finite_with_breaks(f, &[a, b]),
            Domain::UpperHalf(a) => self.finite_with_breaks(
                |u: f64| {
                    let s = 1.0 - u;
                    f(a + u / s) * (1.0 / (s * s))
                },
                &[0.0, 1.0],
            ),
            Domain::LowerHalf(b) => self.finite_with_breaks(
                |u: f64| {
                    let s = 1.0 - u;
                    f(b - u / s) * (1.0 / (s * s))
                },
                &[0.0, 1.0],
            ),
            Domain::Whole => self.finite_with_breaks(
                |u: f64| {
                    let s = 1.0 - u * u;
                    f(u / s) * ((1.0 + u * u) / (s * s))
                },
                &[-1.0, 0.0, 1.0],
            ),
        }
    }

    /// Integrate `f` over `[a, ∞)` when the caller can bound the tail beyond
    /// `cutoff`. The bound is added to the error estimate.
    pub fn upper_half_truncated<T, F>(
        &self,
        f: F,
        a: f64,
        cutoff: f64,
        tail_bound: f64,
    ) -> Result<QuadratureResult<T>>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        if cutoff <= a {
            return Err(Error::param("cutoff must exceed the lower limit"));
        }
        let mut r = self.finite_with_breaks(f, &[a, cutoff])?;
        r.error_estimate += tail_bound.abs();
        Ok(r)
    }

    /// Integrate over `[a, ∞)` an integrand whose oscillation changes sign
    /// at the increasing points `zeros(0), zeros(1), ...` (all `> a`). Each
    /// lobe is integrated adaptively and the partial sums are accelerated by
    /// the epsilon algorithm.
    pub fn oscillatory<T, F, Z>(&self, f: F, a: f64, zeros: Z, max_lobes: usize) -> Result<QuadratureResult<T>>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
        Z: Fn(usize) -> f64,
    {
        let lobe_rule = Integrator {
            abs_tol: self.abs_tol * 0.01,
            ..*self
        };
        let first = lobe_rule.finite_with_breaks(&f, &[a, zeros(0)])?;
        let mut evaluations = first.evaluations;
        let mut sum = first.value.to_complex();
        let mut quad_err = first.error_estimate;
        let mut re_sums = Vec::new();
        let mut im_sums = Vec::new();
        re_sums.push(sum.re);
        im_sums.push(sum.im);
        let mut best = (sum, f64::INFINITY);
        let min_lobes = 8;
        for k in 0..max_lobes {
            let (lo, hi) = (zeros(k), zeros(k + 1));
            let lobe = lobe_rule.finite_with_breaks(&f, &[lo, hi])?;
            evaluations += lobe.evaluations;
            quad_err += lobe.error_estimate;
            sum += lobe.value.to_complex();
            re_sums.push(sum.re);
            im_sums.push(sum.im);
            if re_sums.len() >= min_lobes {
                let window = re_sums.len().min(40);
                let start = re_sums.len() - window;
                let (re, re_err) = epsilon_limit(&re_sums[start..]);
                let (im, im_err) = epsilon_limit(&im_sums[start..]);
                let est = Complex64::new(re, im);
                let err = re_err.hypot(im_err) + quad_err;
                if err < best.1 {
                    best = (est, err);
                }
                if best.1 <= self.target(best.0.norm()) {
                    break;
                }
            }
        }
        if best.1 <= self.target(best.0.norm()) {
            Ok(QuadratureResult {
                value: T::from_parts(best.0.re, best.0.im),
                error_estimate: best.1,
                evaluations,
            })
        } else {
            Err(Error::Accuracy {
                message: format!("oscillatory tail did not settle within {max_lobes} lobes"),
                best: best.0,
                error_estimate: best.1,
            })
        }
    }
}

/// Convenience wrapper: adaptive integration to the absolute/relative
/// tolerance `tol`.
pub fn integrate<T, F>(f: F, domain: Domain, tol: f64) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(tol > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    Integrator::new(tol, tol).integrate(f, domain)
}

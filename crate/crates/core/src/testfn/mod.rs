//! Test functions with analytic derivatives, quadrature and special functions.

pub mod quadrature;
pub mod special;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
pub use quadrature::{integrate, Domain, Integrator, QuadValue, QuadratureResult};
pub use special::bessel_j;

/// Highest derivative order served analytically by each built-in profile.
pub const GAUSSIAN_MAX_ORDER: usize = 32;
pub const BUMP_MAX_ORDER: usize = 20;
pub const EXPONENTIAL_MAX_ORDER: usize = 64;

type DerivFn = dyn Fn(f64, usize) -> f64 + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Gaussian,
    Bump,
    Exponential,
    User,
}

/// Where a profile is negligible, expressed in its own coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Identically zero outside `[a, b]`.
    Compact(f64, f64),
    /// Bounded by a polynomial times `exp(−((s − center)/width)²)`.
    Gaussian { center: f64, width: f64 },
    /// Bounded by `exp(−rate·s)` for large positive `s`; no decay to the left.
    Exponential { rate: f64 },
    Unknown,
}

#[derive(Clone)]
enum Profile {
    Gaussian { center: f64, width: f64 },
    Bump { a: f64, b: f64 },
    Exponential { rate: f64 },
    User { label: String, f: Arc<DerivFn>, max_order: usize, decay: Decay },
}

impl Profile {
    fn kind(&self) -> Kind {
        match self {
            Profile::Gaussian { .. } => Kind::Gaussian,
            Profile::Bump { .. } => Kind::Bump,
            Profile::Exponential { .. } => Kind::Exponential,
            Profile::User { .. } => Kind::User,
        }
    }

    fn max_order(&self) -> usize {
        match self {
            Profile::Gaussian { .. } => GAUSSIAN_MAX_ORDER,
            Profile::Bump { .. } => BUMP_MAX_ORDER,
            Profile::Exponential { .. } => EXPONENTIAL_MAX_ORDER,
            Profile::User { max_order, .. } => *max_order,
        }
    }

    fn decay(&self) -> Decay {
        match self {
            Profile::Gaussian { center, width } => Decay::Gaussian {
                center: *center,
                width: *width,
            },
            Profile::Bump { a, b } => Decay::Compact(*a, *b),
            Profile::Exponential { rate } => Decay::Exponential { rate: *rate },
            Profile::User { decay, .. } => *decay,
        }
    }

    fn eval(&self, n: usize, s: f64) -> f64 {
        match self {
            Profile::Gaussian { center, width } => gaussian_derivative(n, (s - center) / width) / width.powi(n as i32),
            Profile::Bump { a, b } => {
                let u = (2.0 * s - a - b) / (b - a);
                bump_derivative(n, u) * (2.0 / (b - a)).powi(n as i32)
            }
            Profile::Exponential { rate } => (-rate).powi(n as i32) * (-rate * s).exp(),
            Profile::User { f, .. } => f(s, n),
        }
    }
}

/// `d^n/ds^n exp(−s²) = (−1)^n H_n(s) exp(−s²)` with physicists' Hermite `H_n`.
fn gaussian_derivative(n: usize, s: f64) -> f64 {
    let e = (-s * s).exp();
    if n == 0 {
        return e;
    }
    let (mut h0, mut h1) = (1.0, 2.0 * s);
    for k in 1..n {
        let h2 = 2.0 * s * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * h1 * e
}

/// Derivatives of `exp(g(u))`, `g(u) = −1/(1−u²)`, via
/// `f^{(n)} = Σ_j C(n−1, j) g^{(j+1)} f^{(n−1−j)}`.
fn bump_derivative(n: usize, u: f64) -> f64 {
    if u.abs() >= 1.0 {
        return 0.0;
    }
    let f0 = (-1.0 / (1.0 - u * u)).exp();
    if n == 0 || f0 == 0.0 {
        return if n == 0 { f0 } else { 0.0 };
    }
    // g^{(m)}(u) = −(m!/2) [ (1−u)^{−m−1} + (−1)^m (1+u)^{−m−1} ]
    let (p, q) = (1.0 / (1.0 - u), 1.0 / (1.0 + u));
    let mut g = vec![0.0; n + 1];
    let (mut pp, mut qq, mut fact) = (p, q, 1.0);
    for (m, gm) in g.iter_mut().enumerate().skip(1) {
        fact *= m as f64;
        pp *= p;
        qq *= q;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        *gm = -0.5 * fact * (pp + sign * qq);
    }
    let mut f = vec![0.0; n + 1];
    f[0] = f0;
    for k in 1..=n {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for j in 0..k {
            acc += binom * g[j + 1] * f[k - 1 - j];
            binom = binom * (k - 1 - j) as f64 / (j + 1) as f64;
        }
        f[k] = acc;
    }
    f[n]
}

/// A smooth test function `φ(x) = A · s^n · F^{(n)}(s·x + h)` built from a
/// base profile `F`. Derivatives and affine substitutions stay analytic.
#[derive(Clone)]
pub struct TestFunction {
    profile: Arc<Profile>,
    scale: f64,
    shift: f64,
    amplitude: f64,
    order: usize,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match &*self.profile {
            Profile::Gaussian { center, width } => format!("gaussian(center={center}, width={width})"),
            Profile::Bump { a, b } => format!("bump({a}, {b})"),
            Profile::Exponential { rate } => format!("exponential(rate={rate})"),
            Profile::User { label, .. } => format!("user({label})"),
        };
        write!(
            f,
            "{base}[scale={}, shift={}, amplitude={}, derivative={}]",
            self.scale, self.shift, self.amplitude, self.order
        )
    }
}

impl TestFunction {
    fn from_profile(profile: Profile) -> Self {
        TestFunction {
            profile: Arc::new(profile),
            scale: 1.0,
            shift: 0.0,
            amplitude: 1.0,
            order: 0,
        }
    }

    /// `exp(−(x−center)²/width²)`.
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !center.is_finite() || !width.is_finite() {
            return Err(Error::param(format!("gaussian width must be positive, got {width}")));
        }
        Ok(Self::from_profile(Profile::Gaussian { center, width }))
    }

    /// `exp(−1/(1−u²))` with `u = (2x−a−b)/(b−a)` on `(a, b)`, zero elsewhere.
    pub fn bump(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::param(format!("bump needs a < b, got ({a}, {b})")));
        }
        Ok(Self::from_profile(Profile::Bump { a, b }))
    }

    /// `exp(−rate·x)`, intended for use on `[0, ∞)`.
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::param(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(Self::from_profile(Profile::Exponential { rate }))
    }

    /// A user-supplied function `f(x, n) = φ^{(n)}(x)`, trusted for
    /// `n ≤ max_order`.
    pub fn user<F>(label: impl Into<String>, max_order: usize, decay: Decay, f: F) -> Self
    where
        F: Fn(f64, usize) -> f64 + Send + Sync + 'static,
    {
        Self::from_profile(Profile::User {
            label: label.into(),
            f: Arc::new(f),
            max_order,
            decay,
        })
    }

    pub fn kind(&self) -> Kind {
        self.profile.kind()
    }

    /// Highest order for which `derivative` (relative to this function) is
    /// analytic.
    pub fn max_analytic_derivative_order(&self) -> usize {
        self.profile.max_order().saturating_sub(self.order)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * self.scale.powi(self.order as i32) * self.profile.eval(self.order, self.scale * x + self.shift)
    }

    /// `φ^{(n)}(x)` analytically.
    pub fn deriv(&self, n: usize, x: f64) -> Result<f64> {
        let total = self.order + n;
        let max = self.profile.max_order();
        if total > max {
            return Err(Error::UnsupportedOrder {
                requested: n,
                max: max.saturating_sub(self.order),
            });
        }
        Ok(self.amplitude * self.scale.powi(total as i32) * self.profile.eval(total, self.scale * x + self.shift))
    }

    /// The derivative of order `n` as a new test function.
    pub fn derivative(&self, n: usize) -> Result<TestFunction> {
        let max = self.max_analytic_derivative_order();
        if n > max {
            return Err(Error::UnsupportedOrder { requested: n, max });
        }
        Ok(TestFunction {
            order: self.order + n,
            ..self.clone()
        })
    }

    /// Central finite-difference estimate of `φ^{(n)}(x)`; the explicit
    /// fallback beyond the analytic orders.
    pub fn finite_difference(&self, n: usize, x: f64) -> f64 {
        if n == 0 {
            return self.eval(x);
        }
        let h = f64::EPSILON.powf(1.0 / (n as f64 + 2.0)) * x.abs().max(1.0);
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * self.eval(x + (0.5 * n as f64 - j as f64) * h);
            binom = binom * (n - j) as f64 / (j + 1) as f64;
        }
        acc / h.powi(n as i32)
    }

    /// `x ↦ φ(a·x + b)`.
    pub fn affine(&self, a: f64, b: f64) -> Result<TestFunction> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::param("affine substitution needs a finite non-zero scale"));
        }
        Ok(TestFunction {
            scale: self.scale * a,
            shift: self.scale * b + self.shift,
            amplitude: self.amplitude / a.powi(self.order as i32),
            ..self.clone()
        })
    }

    /// `x ↦ c·φ(x)`.
    pub fn scaled(&self, c: f64) -> TestFunction {
        TestFunction {
            amplitude: self.amplitude * c,
            ..self.clone()
        }
    }

    fn to_x(&self, s: f64) -> f64 {
        (s - self.shift) / self.scale
    }

    /// Decay class expressed in the variable `x`.
    pub fn decay(&self) -> Decay {
        match self.profile.decay() {
            Decay::Compact(..) => {
                let (a, b) = self.support().expect("compact profile");
                Decay::Compact(a, b)
            }
            Decay::Gaussian { center, width } => Decay::Gaussian {
                center: self.to_x(center),
                width: width / self.scale.abs(),
            },
            Decay::Exponential { rate } if self.scale > 0.0 => Decay::Exponential {
                rate: rate * self.scale,
            },
            _ => Decay::Unknown,
        }
    }

    /// Closed support in `x`, if compact.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self.profile.decay() {
            Decay::Compact(a, b) => {
                let (p, q) = (self.to_x(a), self.to_x(b));
                Some((p.min(q), p.max(q)))
            }
            _ => None,
        }
    }

    /// Interval outside of which `|φ|` (and its first few derivatives) is
    /// below `threshold` relative to the profile scale; infinite ends mean
    /// no decay on that side.
    pub fn effective_interval(&self, threshold: f64) -> (f64, f64) {
        let thr = threshold.clamp(1e-300, 0.5);
        let (lo, hi) = match self.profile.decay() {
            Decay::Compact(a, b) => (a, b),
            Decay::Gaussian { center, width } => {
                let r = width * ((-thr.ln()).sqrt() + (2.0 * self.order as f64 + 2.0).sqrt() + 1.0);
                (center - r, center + r)
            }
            Decay::Exponential { rate } => {
                let r = (-thr.ln() + 2.0 * (self.order as f64 + 2.0)) / rate;
                (f64::NEG_INFINITY, r)
            }
            Decay::Unknown => (f64::NEG_INFINITY, f64::INFINITY),
        };
        let (p, q) = (self.to_x(lo), self.to_x(hi));
        if p.is_nan() || q.is_nan() {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        (p.min(q), p.max(q))
    }

    /// True when the function decays (at least exponentially) on the given side.
    pub fn decays_right(&self) -> bool {
        self.effective_interval(1e-17).1.is_finite()
    }

    pub fn decays_left(&self) -> bool {
        self.effective_interval(1e-17).0.is_finite()
    }

    /// `∫ φ` over the whole line (or over `[lower, ∞)` when given).
    pub fn integral(&self, lower: Option<f64>) -> Result<f64> {
        let (mut lo, hi) = self.effective_interval(1e-18);
        if let Some(l) = lower {
            lo = lo.max(l);
        }
        if lo >= hi {
            return Ok(0.0);
        }
        let ig = Integrator::new(1e-14, 1e-12);
        let f = |x: f64| self.eval(x);
        let r = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => ig.integrate(f, Domain::Finite(lo, hi))?,
            (true, false) => ig.integrate(f, Domain::UpperHalf(lo))?,
            (false, true) => ig.integrate(f, Domain::LowerHalf(hi))?,
            (false, false) => ig.integrate(f, Domain::Whole)?,
        };
        Ok(r.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_basics() {
        let g = TestFunction::gaussian(0.0, 1.0).unwrap();
        assert_eq!(g.eval(0.0), 1.0);
        assert_eq!(g.deriv(1, 0.0).unwrap(), 0.0);
        assert!((g.deriv(2, 0.0).unwrap() + 2.0).abs() < 1e-15);
        assert!((g.integral(None).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(g.eval(7.0) > 0.0);
        assert!(TestFunction::gaussian(0.0, 0.0).is_err());
    }

    #[test]
    fn bump_basics() {
        let b = TestFunction::bump(-1.0, 1.0).unwrap();
        assert!((b.eval(0.0) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(-1.5), 0.0);
        let b2 = TestFunction::bump(0.0, 2.0).unwrap();
        assert_eq!(b2.deriv(3, 0.0).unwrap(), 0.0);
        for n in 0..8 {
            assert_eq!(b.deriv(n, 1.0).unwrap(), 0.0);
            assert_eq!(b.deriv(n, -1.0).unwrap(), 0.0);
        }
        assert!(TestFunction::bump(1.0, 1.0).is_err());
    }

    #[test]
    fn user_sine_profile() {
        let s = TestFunction::user("sin", 16, Decay::Unknown, |x, n| match n % 4 {
            0 => x.sin(),
            1 => x.cos(),
            2 => -x.sin(),
            _ => -x.cos(),
        });
        assert_eq!(s.derivative(1).unwrap().eval(0.0), 1.0);
    }

    #[test]
    fn derivative_order_cap_is_explicit() {
        let b = TestFunction::bump(0.0, 1.0).unwrap();
        match b.derivative(BUMP_MAX_ORDER + 1) {
            Err(Error::UnsupportedOrder { requested, max }) => {
                assert_eq!(requested, BUMP_MAX_ORDER + 1);
                assert_eq!(max, BUMP_MAX_ORDER);
            }
            other => panic!("{other:?}"),
        }
        // The finite-difference fallback is always available on request.
        assert!(b.finite_difference(BUMP_MAX_ORDER + 1, 0.5).is_finite());
    }

    #[test]
    fn affine_chain_rule() {
        let g = TestFunction::gaussian(0.3, 0.7).unwrap();
        let h = g.affine(2.5, -0.4).unwrap();
        for x in [-0.3, 0.1, 0.6] {
            assert!((h.eval(x) - g.eval(2.5 * x - 0.4)).abs() < 1e-15);
            let want = 2.5f64.powi(3) * g.deriv(3, 2.5 * x - 0.4).unwrap();
            assert!((h.deriv(3, x).unwrap() - want).abs() < 1e-12 * want.abs().max(1.0));
        }
        let d = g.derivative(2).unwrap().affine(0.5, 0.0).unwrap();
        // d(x) = φ''(x/2)
        assert!((d.eval(0.8) - g.deriv(2, 0.4).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn support_follows_substitution() {
        let b = TestFunction::bump(1.0, 2.0).unwrap().affine(-2.0, 0.0).unwrap();
        assert_eq!(b.support(), Some((-1.0, -0.5)));
    }
}

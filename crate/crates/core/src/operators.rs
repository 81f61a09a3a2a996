//! The exactly solvable model operators, their eigendata, and the leading
//! WKB coefficients of one-dimensional Schrödinger operators.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::testfn::TestFunction;

/// Potentials `V` of `H = −d²/dx² + V(x)` with analytic derivatives.
#[derive(Clone)]
pub enum Potential {
    Constant(f64),
    /// `V(x) = a·x²`
    Quadratic(f64),
    /// `V(x) = −depth · exp(−x²/width²)`
    GaussianWell { depth: f64, width: f64 },
    /// `f(x, n) = V^{(n)}(x)`, trusted up to `max_order`.
    Custom {
        label: String,
        f: Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>,
        max_order: usize,
    },
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Potential::Constant(c) => write!(f, "Constant({c})"),
            Potential::Quadratic(a) => write!(f, "Quadratic({a})"),
            Potential::GaussianWell { depth, width } => write!(f, "GaussianWell(depth={depth}, width={width})"),
            Potential::Custom { label, max_order, .. } => write!(f, "Custom({label}, order ≤ {max_order})"),
        }
    }
}

impl Potential {
    pub fn max_order(&self) -> usize {
        match self {
            Potential::Constant(_) | Potential::Quadratic(_) => usize::MAX,
            Potential::GaussianWell { .. } => crate::testfn::GAUSSIAN_MAX_ORDER,
            Potential::Custom { max_order, .. } => *max_order,
        }
    }

    /// `V^{(n)}(x)`.
    pub fn deriv(&self, n: usize, x: f64) -> Result<f64> {
        if n > self.max_order() {
            return Err(Error::UnsupportedOrder {
                requested: n,
                max: self.max_order(),
            });
        }
        Ok(match self {
            Potential::Constant(c) => {
                if n == 0 {
                    *c
                } else {
                    0.0
                }
            }
            Potential::Quadratic(a) => match n {
                0 => a * x * x,
                1 => 2.0 * a * x,
                2 => 2.0 * a,
                _ => 0.0,
            },
            Potential::GaussianWell { depth, width } => {
                -depth * TestFunction::gaussian(0.0, *width)?.deriv(n, x)?
            }
            Potential::Custom { f, .. } => f(x, n),
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.deriv(0, x)
    }
}

#[derive(Debug, Clone)]
pub enum ModelOperator {
    FreeLine,
    FreeSpace { dimension: usize },
    /// `−d²/dx²` on `(0, π)` with Dirichlet conditions.
    DirichletInterval,
    SchrodingerLine(Potential),
}

impl ModelOperator {
    pub fn free_space(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        Ok(ModelOperator::FreeSpace { dimension })
    }

    pub fn dimension(&self) -> usize {
        match self {
            ModelOperator::FreeSpace { dimension } => *dimension,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenPair {
    pub index: usize,
    pub eigenvalue: f64,
}

impl EigenPair {
    /// Normalised eigenfunction `√(2/π) sin(nx)`.
    pub fn eigenfunction(&self, x: f64) -> f64 {
        (2.0 / PI).sqrt() * (self.index as f64 * x).sin()
    }
}

/// Eigenvalue `n²` and eigenfunction `√(2/π) sin(nx)` of the Dirichlet interval.
pub fn dirichlet_eigendata(n: usize) -> Result<EigenPair> {
    if n < 1 {
        return Err(Error::param("eigen index starts at 1"));
    }
    Ok(EigenPair {
        index: n,
        eigenvalue: (n * n) as f64,
    })
}

/// Coefficients `ρ_n^{jk}` (`n ≤ 2`, `j,k ∈ {0,1}`) of the large-ω
/// expansion of the spectral measures `dμ^{jk}/dω = (1/π) Σ ρ_n^{jk} ω^{−2n}`
/// at a base point `x₀`, where `λ = ω²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WkbTable {
    pub x0: f64,
    /// `rho[j][k][n]`
    pub rho: [[[f64; 3]; 2]; 2],
}

impl WkbTable {
    pub fn get(&self, n: usize, j: usize, k: usize) -> f64 {
        self.rho[j][k][n]
    }

    /// `(1/π) Σ_{n ≤ 2} ρ_n^{jk} ω^{−2n}`.
    pub fn series(&self, j: usize, k: usize, omega: f64) -> f64 {
        let w2 = 1.0 / (omega * omega);
        (self.rho[j][k][0] + w2 * (self.rho[j][k][1] + w2 * self.rho[j][k][2])) / PI
    }
}

pub fn wkb_coefficients(v: &Potential, x0: f64) -> Result<WkbTable> {
    let v0 = v.deriv(0, x0)?;
    let v1 = v.deriv(1, x0)?;
    let v2 = v.deriv(2, x0)?;
    let v3 = v.deriv(3, x0)?;
    let diag00 = [1.0, 0.5 * v0, (-v2 + 3.0 * v0 * v0) / 8.0];
    let diag11 = [1.0, -0.5 * v0, (v2 - 3.0 * v0 * v0) / 8.0];
    // ρ^{10} = ρ^{01} = ½ d/dx₀ ρ^{00}
    let off = [0.0, 0.25 * v1, (-v3 + 6.0 * v0 * v1) / 16.0];
    Ok(WkbTable {
        x0,
        rho: [[diag00, off], [off, diag11]],
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// `H^n φ`. For the free line and the interval `H φ = −φ''`; for the
/// Schrödinger line `H φ = −φ'' + Vφ`, with derivatives of the result
/// assembled by the Leibniz rule.
pub fn apply_h_power(op: &ModelOperator, n: usize, phi: &TestFunction) -> Result<TestFunction> {
    if n == 0 {
        return Ok(phi.clone());
    }
    let available = phi.max_analytic_derivative_order();
    if 2 * n > available {
        return Err(Error::UnsupportedOrder {
            requested: 2 * n,
            max: available,
        });
    }
    match op {
        ModelOperator::FreeLine | ModelOperator::DirichletInterval | ModelOperator::FreeSpace { dimension: 1 } => {
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            Ok(phi.derivative(2 * n)?.scaled(sign))
        }
        ModelOperator::FreeSpace { .. } => Err(Error::Unsupported(
            "test functions are one-dimensional; H^n on ℝ^d needs d = 1".into(),
        )),
        ModelOperator::SchrodingerLine(v) => {
            let v = v.clone();
            let base = phi.clone();
            let max_order = (available - 2 * n).min(v.max_order());
            let f = move |x: f64, m: usize| schrodinger_power(&v, &base, n, m, x).unwrap_or(f64::NAN);
            Ok(TestFunction::user(format!("H^{n} φ"), max_order, phi.decay(), f))
        }
    }
}

/// `(H^n φ)^{(m)}(x)` for `H = −d² + V`.
fn schrodinger_power(v: &Potential, phi: &TestFunction, n: usize, m: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return phi.deriv(m, x);
    }
    let mut acc = -schrodinger_power(v, phi, n - 1, m + 2, x)?;
    for i in 0..=m {
        let vi = v.deriv(i, x)?;
        if vi != 0.0 {
            acc += binomial(m, i) * vi * schrodinger_power(v, phi, n - 1, m - i, x)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigendata() {
        let e = dirichlet_eigendata(3).unwrap();
        assert_eq!(e.eigenvalue, 9.0);
        assert_eq!(e.eigenfunction(0.0), 0.0);
        let e1 = dirichlet_eigendata(1).unwrap();
        assert!((e1.eigenfunction(PI / 2.0) - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!(dirichlet_eigendata(0).is_err());
    }

    #[test]
    fn wkb_constant_potential() {
        let t = wkb_coefficients(&Potential::Constant(2.0), 0.0).unwrap();
        assert_eq!(t.get(1, 0, 0), 1.0);
        assert_eq!(t.get(2, 0, 0), 1.5);
        assert_eq!(t.get(1, 1, 1), -1.0);
        assert_eq!(t.get(0, 0, 0), 1.0);
        assert_eq!(t.get(0, 1, 1), 1.0);
        for n in 0..3 {
            assert_eq!(t.get(n, 1, 0), t.get(n, 0, 1));
        }
    }

    #[test]
    fn wkb_quadratic_potential() {
        let x0: f64 = 0.7;
        let t = wkb_coefficients(&Potential::Quadratic(1.0), x0).unwrap();
        assert!((t.get(2, 0, 0) - (-2.0 + 3.0 * x0.powi(4)) / 8.0).abs() < 1e-15);
    }

    #[test]
    fn free_line_h_is_minus_second_derivative() {
        let phi = TestFunction::gaussian(0.0, 1.0).unwrap();
        let h0 = apply_h_power(&ModelOperator::FreeLine, 0, &phi).unwrap();
        assert_eq!(h0.eval(0.4), phi.eval(0.4));
        let h1 = apply_h_power(&ModelOperator::FreeLine, 1, &phi).unwrap();
        for x in [-1.0f64, 0.0, 0.3, 2.0] {
            let want = -(4.0 * x * x - 2.0) * (-x * x).exp();
            assert!((h1.eval(x) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn schrodinger_h_definition() {
        let phi = TestFunction::gaussian(0.0, 1.0).unwrap();
        let op = ModelOperator::SchrodingerLine(Potential::Quadratic(1.0));
        let h = apply_h_power(&op, 1, &phi).unwrap();
        for x in [-1.2f64, 0.0, 0.5] {
            let want = -phi.deriv(2, x).unwrap() + x * x * phi.eval(x);
            assert!((h.eval(x) - want).abs() < 1e-14);
        }
    }
}

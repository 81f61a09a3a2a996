//! Moment asymptotic expansions and direct smearing of measures.

use num_complex::Complex64;

use super::measure::SpectralMeasure;
use crate::error::{Error, Result};
use crate::numerics::ComplexSum;
use crate::testfn::{Domain, Integrator, TestFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct MomentList {
    moments: Vec<Complex64>,
}

impl MomentList {
    pub fn new(moments: Vec<Complex64>) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::param("a moment list needs at least one entry"));
        }
        if moments.iter().any(|m| !m.re.is_finite() || !m.im.is_finite()) {
            return Err(Error::param("moments must be finite"));
        }
        Ok(MomentList { moments })
    }

    pub fn real(moments: &[f64]) -> Result<Self> {
        Self::new(moments.iter().map(|&m| Complex64::new(m, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.moments
    }
}

/// `Σ_{j=0}^{N} μ_j φ^{(j)}(0) / (j! λ^{j+1})`.
pub fn moment_expansion_partial(mu: &MomentList, phi: &TestFunction, lambda: f64, n: usize) -> Result<Complex64> {
    if n >= mu.len() {
        return Err(Error::param(format!(
            "expansion order {n} needs {} moments, only {} given",
            n + 1,
            mu.len()
        )));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::param("λ must be finite and non-zero"));
    }
    let mut acc = ComplexSum::new();
    let mut fact = 1.0;
    let mut pow = lambda;
    for j in 0..=n {
        if j > 0 {
            fact *= j as f64;
            pow *= lambda;
        }
        let d = phi.deriv(j, 0.0)?;
        acc.add(mu.as_slice()[j] * (d / (fact * pow)));
    }
    Ok(acc.value())
}

/// `⟨f, φ(ελ)⟩ = Σ w_n φ(ελ_n) + ∫ ρ(μ) φ(εμ) dμ`, truncated where `φ`
/// is negligible. Requires `φ` to decay to the right (or have compact
/// support).
pub fn smear_measure(m: &SpectralMeasure, phi: &TestFunction, eps: f64) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::param("ε must be positive"));
    }
    let (_, hi) = phi.effective_interval(1e-20);
    if !hi.is_finite() {
        return Err(Error::param("smearing needs a test function that decays for large arguments"));
    }
    let cutoff = hi / eps;
    let mut acc = ComplexSum::new();
    if cutoff > m.support_lower_bound() {
        m.for_each_atom_below(cutoff, |mu, w| acc.add(w * phi.eval(eps * mu)));
        if let Some(c) = m.continuous() {
            let a = m.support_lower_bound();
            let span = cutoff - a;
            let density = c.density.clone();
            let r = Integrator::new(1e-15, 1e-12).with_max_panels(20_000).integrate(
                |u: f64| {
                    let mu = a + span * u * u;
                    density(mu) * phi.eval(eps * mu) * 2.0 * span * u
                },
                Domain::Finite(0.0, 1.0),
            )?;
            acc.add(Complex64::new(r.value, 0.0));
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_example() {
        let mu = MomentList::real(&[1.0, 0.0, 2.0]).unwrap();
        let phi = TestFunction::gaussian(0.0, 1.0).unwrap();
        let v = moment_expansion_partial(&mu, &phi, 10.0, 2).unwrap();
        assert!((v.re - 0.098).abs() < 1e-15);
    }

    #[test]
    fn zero_moments_and_leading_term() {
        let phi = TestFunction::gaussian(0.3, 1.0).unwrap();
        let zero = MomentList::real(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(moment_expansion_partial(&zero, &phi, 3.0, 2).unwrap(), Complex64::new(0.0, 0.0));
        let one = MomentList::real(&[1.0]).unwrap();
        let v = moment_expansion_partial(&one, &phi, 4.0, 0).unwrap();
        assert!((v.re - phi.eval(0.0) / 4.0).abs() < 1e-16);
    }

    #[test]
    fn order_beyond_moments_is_rejected() {
        let mu = MomentList::real(&[1.0]).unwrap();
        let phi = TestFunction::gaussian(0.0, 1.0).unwrap();
        assert!(moment_expansion_partial(&mu, &phi, 2.0, 1).is_err());
    }

    #[test]
    fn missing_derivatives_are_reported() {
        let mu = MomentList::real(&[1.0; 40]).unwrap();
        let phi = TestFunction::bump(-1.0, 1.0).unwrap();
        assert!(matches!(
            moment_expansion_partial(&mu, &phi, 2.0, 30),
            Err(Error::UnsupportedOrder { .. })
        ));
    }
}

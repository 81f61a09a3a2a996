use std::f64::consts::PI;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{cylinder_interval_closed, cylinder_line, heat_line, heat_kernel, Case, KernelKind, Method};
use crate::error::{Error, Result};
use crate::numerics::interpolating_coefficients;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Validity {
    Pointwise,
    Averaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Locality {
    Local,
    Global,
}

/// Common factor pulled out of every term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prefactor {
    One,
    /// `(4πt)^{−1/2}`
    FourPiTInverseSqrt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerm {
    pub exponent: f64,
    pub coefficient: Complex64,
}

impl Serialize for ExpansionTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExpansionTerm", 3)?;
        st.serialize_field("exponent", &self.exponent)?;
        st.serialize_field("re", &self.coefficient.re)?;
        st.serialize_field("im", &self.coefficient.im)?;
        st.end()
    }
}

/// `G(t,x,y) ~ prefactor(t) · Σ_j c_j t^{α_j}` as `t ↓ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionCoefficients {
    pub kind: KernelKind,
    pub case: Case,
    pub x: f64,
    pub y: f64,
    pub prefactor: Prefactor,
    pub terms: Vec<ExpansionTerm>,
    pub validity: Validity,
    pub locality: Locality,
}

impl ExpansionCoefficients {
    /// Coefficient of `t^{exponent}`, zero when the term is absent.
    pub fn coefficient(&self, exponent: f64) -> Complex64 {
        self.terms
            .iter()
            .find(|t| (t.exponent - exponent).abs() < 1e-12)
            .map(|t| t.coefficient)
            .unwrap_or_default()
    }
}

/// Chebyshev nodes on `(0, h)`.
fn ladder(h: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| 0.5 * h * (1.0 + ((2 * i + 1) as f64 * PI / (2 * m) as f64).cos()))
        .collect()
}

/// Monomial coefficients of the degree `m−1` interpolant of `f` on a
/// Chebyshev ladder in `(0, h)`.
fn fit(f: impl Fn(f64) -> Result<f64>, h: f64, m: usize) -> Result<Vec<f64>> {
    let nodes = ladder(h, m);
    let values = nodes.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    Ok(interpolating_coefficients(&nodes, &values))
}

/// Distance from `t = 0` to the nearest complex singularity of the
/// interval cylinder kernel (the diagonal pole excepted).
fn cylinder_radius(case: Case, x: f64, y: f64) -> f64 {
    let a = (x - y).abs();
    let mut cands = vec![];
    if a > 0.0 {
        cands.push(a);
    }
    if case == Case::Interval {
        let b = x + y;
        cands.extend([2.0 * PI - a, b, 2.0 * PI - b]);
    }
    cands.into_iter().fold(f64::INFINITY, f64::min)
}

/// Smallest distance of a non-leading heat image from the origin; the
/// off-diagonal direct term is also exponentially small.
fn heat_gap(case: Case, x: f64, y: f64) -> f64 {
    cylinder_radius(case, x, y)
}

fn check_points(case: Case, x: f64, y: f64) -> Result<()> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::domain("points must be finite"));
    }
    if case == Case::Interval {
        for v in [x, y] {
            if !(v > 0.0 && v < PI) {
                return Err(Error::domain(format!("{v} must lie inside (0, π)")));
            }
        }
    }
    Ok(())
}

/// The first `n` small-`t` expansion terms of a model kernel, extracted
/// numerically from its closed form (or image sum) by polynomial
/// interpolation on a ladder of small `t`.
///
/// Heat: `K = (4πt)^{−1/2} Σ c_j t^j` with pointwise validity. Schrödinger:
/// the same series continued to `t → it`, valid only in the averaged
/// sense. Cylinder: `T = Σ c_j t^{j−1}`; nonlocal except on the diagonal
/// of the line. The Wightman function has no such expansion.
pub fn small_t_coefficients(kind: KernelKind, case: Case, x: f64, y: f64, n: usize) -> Result<ExpansionCoefficients> {
    if n == 0 {
        return Err(Error::param("need at least one term"));
    }
    check_points(case, x, y)?;
    let (prefactor, terms, validity, locality) = match kind {
        KernelKind::Heat | KernelKind::Schrodinger => {
            let c = heat_series(case, x, y, n)?;
            if kind == KernelKind::Heat {
                let terms = c
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| ExpansionTerm {
                        exponent: j as f64,
                        coefficient: Complex64::new(c, 0.0),
                    })
                    .collect();
                (Prefactor::FourPiTInverseSqrt, terms, Validity::Pointwise, Locality::Local)
            } else {
                let phase = Complex64::from_polar(1.0, -PI / 4.0);
                let terms = c
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| ExpansionTerm {
                        exponent: j as f64,
                        coefficient: phase * Complex64::i().powu(j as u32) * c,
                    })
                    .collect();
                (Prefactor::FourPiTInverseSqrt, terms, Validity::Averaged, Locality::Local)
            }
        }
        KernelKind::Cylinder => {
            let r = cylinder_radius(case, x, y);
            let h = if r.is_finite() { r / 4.0 } else { 1.0 };
            let m = n + 12;
            let c = match case {
                Case::Line => fit(|t| Ok(t * cylinder_line(t, x - y)), h, m)?,
                Case::Interval => fit(|t| Ok(t * cylinder_interval_closed(t, x, y)), h, m)?,
            };
            let terms = c
                .iter()
                .take(n)
                .enumerate()
                .map(|(j, &c)| ExpansionTerm {
                    exponent: j as f64 - 1.0,
                    coefficient: Complex64::new(c, 0.0),
                })
                .collect();
            let locality = if case == Case::Line && x == y {
                Locality::Local
            } else {
                Locality::Global
            };
            (Prefactor::One, terms, Validity::Pointwise, locality)
        }
        KernelKind::Wightman => {
            return Err(Error::param("the Wightman function has no small-t power expansion"));
        }
    };
    Ok(ExpansionCoefficients {
        kind,
        case,
        x,
        y,
        prefactor,
        terms,
        validity,
        locality,
    })
}

fn heat_series(case: Case, x: f64, y: f64, n: usize) -> Result<Vec<f64>> {
    let d = heat_gap(case, x, y);
    // Every image beyond the direct diagonal term is below e^{−40} on the ladder.
    let h = if d.is_finite() { (d * d / 160.0).min(0.5) } else { 0.5 };
    let m = n + 2;
    let scaled = |t: f64| -> Result<f64> {
        let k = match case {
            Case::Line => heat_line(t, x - y),
            Case::Interval => heat_kernel(Case::Interval, t, x, y, Method::ImageSum)?.value.re,
        };
        Ok((4.0 * PI * t).sqrt() * k)
    };
    let mut c = fit(scaled, h, m)?;
    c.truncate(n);
    Ok(c)
}

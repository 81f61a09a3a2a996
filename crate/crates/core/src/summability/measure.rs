//! Stieltjes measures on the spectral half-line: atoms (listed or generated
//! on demand) plus an optional continuous density.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type AtomGenerator = dyn Fn(usize) -> (f64, Complex64) + Send + Sync;
pub type DensityFn = dyn Fn(f64) -> f64 + Send + Sync;
/// Exact Riesz mean of the continuous part: `(k, λ) ↦ (value, error bound)`.
pub type RieszFn = dyn Fn(usize, f64) -> Result<(f64, f64)> + Send + Sync;

#[derive(Clone)]
pub enum Atoms {
    Listed(Arc<Vec<(f64, Complex64)>>),
    /// Atom `n` (from 0) of an unbounded deterministic sequence with strictly
    /// increasing positions. `horizon` is the default largest λ probed by
    /// the limit and order tests.
    Generated { generator: Arc<AtomGenerator>, horizon: f64 },
}

#[derive(Clone)]
pub struct Continuous {
    pub density: Arc<DensityFn>,
    pub riesz: Option<Arc<RieszFn>>,
}

#[derive(Clone)]
pub struct SpectralMeasure {
    atoms: Atoms,
    continuous: Option<Continuous>,
    support_lower_bound: f64,
}

impl std::fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let atoms = match &self.atoms {
            Atoms::Listed(a) => format!("{} listed atoms", a.len()),
            Atoms::Generated { horizon, .. } => format!("generated atoms (horizon {horizon})"),
        };
        f.debug_struct("SpectralMeasure")
            .field("atoms", &atoms)
            .field("continuous", &self.continuous.is_some())
            .field("support_lower_bound", &self.support_lower_bound)
            .finish()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvAtom {
    lambda: f64,
    weight_re: f64,
    weight_im: f64,
}

impl SpectralMeasure {
    /// Measure made of the listed atoms. Positions must be strictly
    /// increasing and not below `support_lower_bound`.
    pub fn from_atoms(atoms: Vec<(f64, Complex64)>, support_lower_bound: f64) -> Result<Self> {
        for w in atoms.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::param(format!(
                    "atom positions must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(p, _)) = atoms.first() {
            if p < support_lower_bound {
                return Err(Error::param(format!(
                    "atom at {p} lies below the support bound {support_lower_bound}"
                )));
            }
        }
        if atoms.iter().any(|(p, w)| !p.is_finite() || !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::param("atoms must be finite"));
        }
        Ok(SpectralMeasure {
            atoms: Atoms::Listed(Arc::new(atoms)),
            continuous: None,
            support_lower_bound,
        })
    }

    pub fn from_real_atoms(atoms: &[(f64, f64)], support_lower_bound: f64) -> Result<Self> {
        Self::from_atoms(
            atoms.iter().map(|&(p, w)| (p, Complex64::new(w, 0.0))).collect(),
            support_lower_bound,
        )
    }

    /// Measure with atoms produced on demand by `generator(n)`, `n = 0, 1, ...`.
    pub fn generated<G>(generator: G, support_lower_bound: f64, horizon: f64) -> Result<Self>
    where
        G: Fn(usize) -> (f64, Complex64) + Send + Sync + 'static,
    {
        if !(horizon > support_lower_bound) {
            return Err(Error::param("horizon must exceed the support bound"));
        }
        if generator(0).0 < support_lower_bound {
            return Err(Error::param("first generated atom lies below the support bound"));
        }
        Ok(SpectralMeasure {
            atoms: Atoms::Generated {
                generator: Arc::new(generator),
                horizon,
            },
            continuous: None,
            support_lower_bound,
        })
    }

    /// Purely continuous measure with the given density on `[support_lower_bound, ∞)`.
    pub fn from_density<D>(density: D, support_lower_bound: f64) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SpectralMeasure {
            atoms: Atoms::Listed(Arc::new(Vec::new())),
            continuous: Some(Continuous {
                density: Arc::new(density),
                riesz: None,
            }),
            support_lower_bound,
        }
    }

    /// Add a continuous density to the measure (replacing any existing one).
    pub fn with_density<D>(mut self, density: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.continuous = Some(Continuous {
            density: Arc::new(density),
            riesz: None,
        });
        self
    }

    /// Attach an exact evaluator for the Riesz means of the continuous part;
    /// the quadrature route stays available through
    /// [`continuous_riesz_by_quadrature`](crate::summability::continuous_riesz_by_quadrature).
    pub fn with_continuous_riesz<R>(mut self, riesz: R) -> Result<Self>
    where
        R: Fn(usize, f64) -> Result<(f64, f64)> + Send + Sync + 'static,
    {
        match self.continuous.as_mut() {
            Some(c) => {
                c.riesz = Some(Arc::new(riesz));
                Ok(self)
            }
            None => Err(Error::param("measure has no continuous part")),
        }
    }

    pub fn with_horizon(mut self, new_horizon: f64) -> Result<Self> {
        match &mut self.atoms {
            Atoms::Generated { horizon, .. } => {
                if !(new_horizon > self.support_lower_bound) {
                    return Err(Error::param("horizon must exceed the support bound"));
                }
                *horizon = new_horizon;
                Ok(self)
            }
            Atoms::Listed(_) => Err(Error::param("listed measures have no horizon")),
        }
    }

    pub fn support_lower_bound(&self) -> f64 {
        self.support_lower_bound
    }

    pub fn continuous(&self) -> Option<&Continuous> {
        self.continuous.as_ref()
    }

    pub fn is_generated(&self) -> bool {
        matches!(self.atoms, Atoms::Generated { .. })
    }

    /// Largest λ at which the measure's atoms are known: the last listed
    /// position, or the generator horizon. `None` for a purely continuous
    /// measure.
    pub fn horizon(&self) -> Option<f64> {
        match &self.atoms {
            Atoms::Listed(a) => a.last().map(|p| p.0),
            Atoms::Generated { horizon, .. } => Some(*horizon),
        }
    }

    /// Number of listed atoms (`None` for generated measures).
    pub fn listed_len(&self) -> Option<usize> {
        match &self.atoms {
            Atoms::Listed(a) => Some(a.len()),
            Atoms::Generated { .. } => None,
        }
    }

    /// All atoms with position strictly below `lambda`, in ascending order.
    pub fn atoms_below(&self, lambda: f64) -> Vec<(f64, Complex64)> {
        match &self.atoms {
            Atoms::Listed(a) => {
                let end = a.partition_point(|p| p.0 < lambda);
                a[..end].to_vec()
            }
            Atoms::Generated { generator, .. } => {
                let mut out = Vec::new();
                let mut n = 0;
                loop {
                    let atom = generator(n);
                    if !(atom.0 < lambda) {
                        break;
                    }
                    out.push(atom);
                    n += 1;
                }
                out
            }
        }
    }

    /// Visit atoms with position below `lambda` without materialising them.
    pub(crate) fn for_each_atom_below(&self, lambda: f64, mut visit: impl FnMut(f64, Complex64)) {
        match &self.atoms {
            Atoms::Listed(a) => {
                for &(p, w) in a.iter().take_while(|p| p.0 < lambda) {
                    visit(p, w);
                }
            }
            Atoms::Generated { generator, .. } => {
                let mut n = 0;
                loop {
                    let (p, w) = generator(n);
                    if !(p < lambda) {
                        break;
                    }
                    visit(p, w);
                    n += 1;
                }
            }
        }
    }

    /// Pointwise linear combination `a·self + b·other` of two measures with
    /// listed atoms. Coinciding atoms are merged.
    pub fn linear_combination(&self, a: Complex64, other: &SpectralMeasure, b: Complex64) -> Result<Self> {
        let (Atoms::Listed(x), Atoms::Listed(y)) = (&self.atoms, &other.atoms) else {
            return Err(Error::Unsupported(
                "linear combinations need listed atoms; materialise generated measures first".into(),
            ));
        };
        let mut merged: Vec<(f64, Complex64)> = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            let take_x = j >= y.len() || (i < x.len() && x[i].0 <= y[j].0);
            let take_y = i >= x.len() || (j < y.len() && y[j].0 <= x[i].0);
            let mut pos = 0.0;
            let mut w = Complex64::new(0.0, 0.0);
            if take_x {
                pos = x[i].0;
                w += a * x[i].1;
                i += 1;
            }
            if take_y {
                pos = y[j].0;
                w += b * y[j].1;
                j += 1;
            }
            merged.push((pos, w));
        }
        let continuous = match (&self.continuous, &other.continuous) {
            (None, None) => None,
            (c1, c2) => {
                if a.im != 0.0 || b.im != 0.0 {
                    return Err(Error::Unsupported("complex multiples of a real density".into()));
                }
                let d1 = c1.as_ref().map(|c| c.density.clone());
                let d2 = c2.as_ref().map(|c| c.density.clone());
                let (ar, br) = (a.re, b.re);
                Some(Continuous {
                    density: Arc::new(move |mu| {
                        d1.as_ref().map_or(0.0, |d| ar * d(mu)) + d2.as_ref().map_or(0.0, |d| br * d(mu))
                    }),
                    riesz: None,
                })
            }
        };
        Ok(SpectralMeasure {
            atoms: Atoms::Listed(Arc::new(merged)),
            continuous,
            support_lower_bound: self.support_lower_bound.min(other.support_lower_bound),
        })
    }

    /// Listed copy of the atoms below `lambda` (continuous part kept).
    pub fn materialize(&self, lambda: f64) -> SpectralMeasure {
        SpectralMeasure {
            atoms: Atoms::Listed(Arc::new(self.atoms_below(lambda))),
            continuous: self.continuous.clone(),
            support_lower_bound: self.support_lower_bound,
        }
    }

    /// Read atoms from CSV with header `lambda,weight_re,weight_im`.
    pub fn from_csv_reader<R: Read>(reader: R, support_lower_bound: Option<f64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let want = ["lambda", "weight_re", "weight_im"];
        if headers.len() != 3 || headers.iter().zip(want).any(|(h, w)| h != w) {
            return Err(Error::Parse(format!(
                "expected header lambda,weight_re,weight_im, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut atoms = Vec::new();
        for row in rdr.deserialize() {
            let row: CsvAtom = row?;
            atoms.push((row.lambda, Complex64::new(row.weight_re, row.weight_im)));
        }
        let lb = support_lower_bound.unwrap_or_else(|| atoms.first().map_or(0.0, |a| a.0.min(0.0)));
        Self::from_atoms(atoms, lb)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, support_lower_bound: Option<f64>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file), support_lower_bound)
    }

    /// Write the atoms below `lambda_max` (all listed atoms when `None`).
    pub fn to_csv_writer<W: Write>(&self, writer: W, lambda_max: Option<f64>) -> Result<()> {
        let limit = match (lambda_max, self.horizon()) {
            (Some(l), _) => l,
            (None, Some(h)) => {
                if self.is_generated() {
                    h
                } else {
                    f64::INFINITY
                }
            }
            (None, None) => f64::INFINITY,
        };
        let mut wtr = csv::Writer::from_writer(writer);
        for (p, w) in self.atoms_below(limit) {
            wtr.serialize(CsvAtom {
                lambda: p,
                weight_re: w.re,
                weight_im: w.im,
            })?;
        }
        wtr.flush()?;
        Ok(())
    }
}

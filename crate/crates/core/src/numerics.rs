//! Small numerical building blocks shared by the higher-level modules:
//! compensated summation, log-log slope fits, polynomial extrapolation and
//! the epsilon algorithm.

use num_complex::Complex64;

/// Neumaier-compensated accumulator that also tracks the sum of magnitudes,
/// which bounds the rounding error of the result.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
    count: usize,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
        self.count += 1;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// Rounding bound assuming each summand carries a few ulps of error.
    pub fn error_bound(&self) -> f64 {
        4.0 * f64::EPSILON * self.abs_sum
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn error_bound(&self) -> f64 {
        self.re.error_bound().hypot(self.im.error_bound())
    }
}

/// `count` points from `start` to `stop` (inclusive), equally spaced in log.
pub fn geometric_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    assert!(start > 0.0 && stop > 0.0 && count >= 2);
    let (l0, l1) = (start.ln(), stop.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                start
            } else if i == count - 1 {
                stop
            } else {
                (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

/// Ordinary least-squares line through `(x, y)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = (0..n)
        .map(|i| {
            let r = ys[i] - intercept - slope * xs[i];
            r * r
        })
        .sum();
    Some(LineFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
        points: n,
    })
}

/// Least-squares fit of `log|y|` against `log x`. Non-positive or non-finite
/// entries are skipped.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && y.abs() > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .unzip();
    fit_line(&lx, &ly)
}

/// Number of decades spanned by the positive values in `xs`.
pub fn decades_spanned(xs: &[f64]) -> f64 {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(0.0, f64::max);
    if lo > 0.0 && hi > lo {
        (hi / lo).log10()
    } else {
        0.0
    }
}

/// Monomial coefficients `c_0..c_n` of the polynomial interpolating
/// `(nodes[i], values[i])`, built from Newton divided differences.
pub fn interpolating_coefficients(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    assert_eq!(n, values.len());
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // Expand the Newton form from the innermost factor outwards.
    let mut poly = vec![dd[n - 1]];
    for i in (0..n - 1).rev() {
        let mut next = vec![0.0; poly.len() + 1];
        for (j, &c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * nodes[i];
        }
        next[0] += dd[i];
        poly = next;
    }
    poly
}

/// Neville extrapolation of the table `(xs, ys)` to `x = 0`. Returns the
/// extrapolated value and the difference between the two highest-order
/// estimates as an error indicator.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 1 && n == ys.len());
    let mut p = ys.to_vec();
    let mut prev_top = p[n - 1];
    let mut last_change = f64::INFINITY;
    for level in 1..n {
        for i in (level..n).rev() {
            let (xa, xb) = (xs[i - level], xs[i]);
            p[i] = (xb * p[i - 1] - xa * p[i]) / (xb - xa);
        }
        last_change = (p[n - 1] - prev_top).abs();
        prev_top = p[n - 1];
    }
    (p[n - 1], last_change)
}

/// Wynn's epsilon algorithm applied to a whole sequence of partial sums.
/// Returns the best even-column estimate and an error indicator taken from
/// the agreement of neighbouring estimates.
pub fn epsilon_limit(partial_sums: &[f64]) -> (f64, f64) {
    let n = partial_sums.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    if n < 3 {
        let last = partial_sums[n - 1];
        let err = if n == 2 {
            (partial_sums[1] - partial_sums[0]).abs()
        } else {
            f64::INFINITY
        };
        return (last, err);
    }
    // cols[k][i] = epsilon_k^{(i)}
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial_sums.to_vec();
    let mut best = partial_sums[n - 1];
    let mut best_err = (partial_sums[n - 1] - partial_sums[n - 2]).abs()
        + (partial_sums[n - 2] - partial_sums[n - 3]).abs();
    let mut k = 0usize;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let base = if k == 0 { 0.0 } else { prev[i + 1] };
            if diff == 0.0 || !diff.is_finite() {
                next.push(f64::INFINITY);
            } else {
                next.push(base + 1.0 / diff);
            }
        }
        k += 1;
        prev = cur;
        cur = next;
        if k.is_multiple_of(2) && cur.len() >= 3 {
            let m = cur.len();
            let (a, b, c) = (cur[m - 3], cur[m - 2], cur[m - 1]);
            if a.is_finite() && b.is_finite() && c.is_finite() {
                let err = (c - b).abs() + (b - a).abs();
                if err < best_err {
                    best_err = err;
                    best = c;
                }
            }
        }
        if cur.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    (best, best_err.max(4.0 * f64::EPSILON * best.abs()))
}

/// Weighted linear least squares `min Σ w_i² (Σ_j a_ij c_j − y_i)²` solved by
/// modified Gram-Schmidt on the column-scaled design matrix.
pub fn weighted_least_squares(rows: &[Vec<f64>], ys: &[f64], weights: &[f64]) -> Vec<f64> {
    let m = rows.len();
    assert!(m == ys.len() && m == weights.len());
    if m == 0 {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut q: Vec<Vec<f64>> = (0..ncols)
        .map(|j| (0..m).map(|i| rows[i][j] * weights[i]).collect())
        .collect();
    let mut b: Vec<f64> = (0..m).map(|i| ys[i] * weights[i]).collect();
    let mut r = vec![vec![0.0; ncols]; ncols];
    let mut rhs = vec![0.0; ncols];
    let mut active = vec![true; ncols];
    for j in 0..ncols {
        for k in 0..j {
            if !active[k] {
                continue;
            }
            let d: f64 = (0..m).map(|i| q[k][i] * q[j][i]).sum();
            r[k][j] = d;
            let (head, tail) = q.split_at_mut(j);
            for (a, b) in tail[0].iter_mut().zip(&head[k]) {
                *a -= d * b;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            active[j] = false;
            continue;
        }
        r[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
        let d: f64 = (0..m).map(|i| q[j][i] * b[i]).sum();
        rhs[j] = d;
        for i in 0..m {
            b[i] -= d * q[j][i];
        }
    }
    let mut c = vec![0.0; ncols];
    for j in (0..ncols).rev() {
        if !active[j] {
            continue;
        }
        let mut s = rhs[j];
        for k in j + 1..ncols {
            s -= r[j][k] * c[k];
        }
        c[j] = s / r[j][j];
    }
    c
}

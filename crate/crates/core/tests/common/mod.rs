//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[−1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 20-point Gauss-Legendre rule on `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        for &(x, w) in &rule {
            s += w * f(lo + 0.5 * h * (x + 1.0));
        }
    }
    0.5 * h * s
}

/// `exp(−1/(1−u²))`, `u = (2x−a−b)/(b−a)`, on `(a, b)`.
pub fn bump(a: f64, b: f64, x: f64) -> f64 {
    let u = (2.0 * x - a - b) / (b - a);
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// Five-point central difference of order one.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// `(2/π) Σ_{n≥1} e^{−n²t} sin nx sin ny`, summed until the terms vanish.
pub fn heat_series(t: f64, x: f64, y: f64) -> f64 {
    let mut s = 0.0;
    let mut n = 1.0f64;
    loop {
        let w = (-n * n * t).exp();
        if w < 1e-300 {
            break;
        }
        s += w * (n * x).sin() * (n * y).sin();
        n += 1.0;
    }
    2.0 / PI * s
}

/// `Σ_{n≥1} e^{−nt} cos na` in closed form.
pub fn geometric_cos(t: f64, a: f64) -> f64 {
    let q = (-t).exp();
    (q * a.cos() - q * q) / (1.0 - 2.0 * q * a.cos() + q * q)
}

/// Interval cylinder kernel `(1/π) Σ e^{−nt} (cos n(x−y) − cos n(x+y))`.
pub fn cylinder_interval(t: f64, x: f64, y: f64) -> f64 {
    (geometric_cos(t, x - y) - geometric_cos(t, x + y)) / PI
}

/// Cesàro-`p` mean of `(1/π) Σ_{k≤N} sin kx sin ky e^{ikt}/k`, as `(re, im)`.
pub fn wightman_cesaro(t: f64, x: f64, y: f64, n: usize, p: usize) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for k in 1..=n {
        let mut w = 1.0;
        for i in 1..=p {
            w *= (n - k + i) as f64 / (n + i) as f64;
        }
        let kf = k as f64;
        let a = w * (kf * x).sin() * (kf * y).sin() / kf;
        re += a * (kf * t).cos();
        im += a * (kf * t).sin();
    }
    (re / PI, im / PI)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.abs().ln()).collect();
    slope(&lx, &ly)
}

pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `n` geometrically spaced points from `a` to `b`.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

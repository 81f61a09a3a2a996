//! Bessel functions of the first kind for integer and half-integer orders.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Classify `order` as integer (`Some(false)`) or half-integer
/// (`Some(true)`); anything else is unsupported.
fn order_kind(order: f64) -> Option<bool> {
    let twice = 2.0 * order;
    if !twice.is_finite() || twice.fract() != 0.0 || order < -0.5 {
        return None;
    }
    Some((twice as i64) % 2 != 0)
}

/// `J_order(z)` for `order ∈ {−1/2, 0, 1/2, 1, 3/2, ...}` and `z ≥ 0`.
pub fn bessel_j(order: f64, z: f64) -> Result<f64> {
    let half = order_kind(order)
        .ok_or_else(|| Error::param(format!("Bessel order {order} is not an integer or half-integer ≥ -1/2")))?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("Bessel argument must be finite and ≥ 0, got {z}")));
    }
    if z == 0.0 {
        return if order == 0.0 {
            Ok(1.0)
        } else if order == -0.5 {
            Err(Error::Singularity("J_{-1/2} diverges at 0".into()))
        } else {
            Ok(0.0)
        };
    }
    if half {
        Ok(half_integer(order, z))
    } else {
        Ok(integer(order as usize, z))
    }
}

/// Small-argument power series, used where few terms suffice.
fn power_series(order: f64, z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = (0.5 * z).powf(order) / gamma_positive(order + 1.0);
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k as f64 + order));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

// Γ at positive integers and half-integers, exact up to rounding.
pub(crate) fn gamma_positive(x: f64) -> f64 {
    let mut g = if x.fract() == 0.0 { 1.0 } else { PI.sqrt() };
    let mut t = if x.fract() == 0.0 { 1.0 } else { 0.5 };
    while t < x - 0.25 {
        g *= t;
        t += 1.0;
    }
    g
}

fn start_index(order: f64, z: f64) -> usize {
    let m = order.max(z);
    (m + 30.0 + 8.0 * m.cbrt() + 2.0 * m.sqrt()).ceil() as usize
}

const RESCALE: f64 = 1e250;

fn integer(n: usize, z: f64) -> f64 {
    if z < 1e-3 * (n as f64 + 1.0) {
        return power_series(n as f64, z);
    }
    let mut top = start_index(n as f64, z);
    if top % 2 == 1 {
        top += 1;
    }
    // Backward recurrence J_{k-1} = (2k/z) J_k − J_{k+1}, normalised by
    // J_0 + 2 Σ J_{2k} = 1.
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut want = 0.0;
    let mut norm = 0.0;
    for k in (1..=top).rev() {
        let prev = 2.0 * k as f64 / z * cur - next;
        next = cur;
        cur = prev;
        let idx = k - 1;
        if idx == n {
            want = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            want /= RESCALE;
            norm /= RESCALE;
        }
    }
    norm += cur;
    if n == 0 {
        want = cur;
    }
    want / norm
}

fn half_integer(order: f64, z: f64) -> f64 {
    let pref = (2.0 / (PI * z)).sqrt();
    let jm = pref * z.cos(); // J_{-1/2}
    let jp = pref * z.sin(); // J_{1/2}
    if order == -0.5 {
        return jm;
    }
    if order == 0.5 {
        return jp;
    }
    let steps = (order - 0.5).round() as usize;
    if order <= z {
        // Forward recurrence is stable below the turning point.
        let (mut a, mut b) = (jm, jp);
        let mut nu = 0.5;
        for _ in 0..steps {
            let c = 2.0 * nu / z * b - a;
            a = b;
            b = c;
            nu += 1.0;
        }
        return b;
    }
    if z < 1e-3 * (order + 1.0) {
        return power_series(order, z);
    }
    // Backward recurrence from above, normalised against whichever of
    // J_{±1/2} is larger in magnitude.
    let top = start_index(order, z);
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut want = 0.0;
    let mut at_plus = 0.0;
    for k in (0..=top).rev() {
        // cur holds J_{k+1/2}; step to J_{k-1/2}
        if k == steps {
            want = cur;
        }
        if k == 0 {
            at_plus = cur;
        }
        let nu = k as f64 + 0.5;
        let prev = 2.0 * nu / z * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            want /= RESCALE;
            at_plus /= RESCALE;
        }
    }
    let at_minus = cur;
    if jp.abs() >= jm.abs() {
        want * jp / at_plus
    } else {
        want * jm / at_minus
    }
}

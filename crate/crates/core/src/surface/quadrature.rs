//! One-dimensional rules used to build the per-chart tensor grids.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [lo, hi].
pub fn gauss_legendre(count: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        // Tricomi initial guess, then Newton on P_count.
        let mut x = (PI * (i as f64 + 0.75) / (count as f64 + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..100 {
            let (p, dp) = legendre(count, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(count, x);
        if dp != 0.0 {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        out.push((mid - half * x, half * w));
    }
    out
}

/// Value and derivative of the Legendre polynomial of degree `n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Equispaced trapezoid rule on a periodic interval [lo, hi).
pub fn periodic_trapezoid(count: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let h = (hi - lo) / count as f64;
    (0..count).map(|i| (lo + (i as f64 + 0.5) * h, h)).collect()
}

//! Test-only oracles, kept independent of the library's evaluation paths.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let j = j as f64;
                let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
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
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

fn apply(rule: &[(f64, f64)], f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

fn adapt(rule: &[(f64, f64)], f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = apply(rule, f, a, m);
    let right = apply(rule, f, m, b);
    if (left + right - whole).abs() <= tol || depth == 0 {
        return left + right;
    }
    adapt(rule, f, a, m, left, tol, depth - 1) + adapt(rule, f, m, b, right, tol, depth - 1)
}

/// Adaptive 20-point Gauss–Legendre with bisection until halves agree to
/// `rel_tol` of the coarse estimate.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let rule = gauss_legendre(20);
    let whole = apply(&rule, &f, a, b);
    let tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    adapt(&rule, &f, a, b, whole, tol, 40)
}

/// `E[f(Y)]`, `Y ~ Exp(mean)`, integrating the density over
/// `[0, mean/64], [mean/64, mean/32], ..., [512 mean, 1024 mean]`.
pub fn exp_expectation(f: impl Fn(f64) -> f64, mean: f64, rel_tol: f64) -> f64 {
    let g = |y: f64| f(y) * (-y / mean).exp() / mean;
    let mut lo = 0.0;
    let mut total = 0.0;
    for j in -6..=10 {
        let hi = mean * 2f64.powi(j);
        total += integrate(g, lo, hi, rel_tol);
        lo = hi;
    }
    total
}

/// Erlang CDF `P(k, z)` by direct quadrature of the density `t^{k-1} e^{-t}/(k-1)!`.
pub fn erlang_cdf_by_quadrature(k: u32, z: f64) -> f64 {
    let ln_norm: f64 = (1..k).map(|i| (i as f64).ln()).sum();
    let density = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            ((k as f64 - 1.0) * t.ln() - t - ln_norm).exp()
        }
    };
    integrate(density, 0.0, z, 1e-14)
}

/// Erlang CDF from the Poisson series `sum_{m>=k} e^{-z} z^m / m!`, with the
/// complement head sum once `z >= k` (no cancellation on either side).
pub fn erlang_cdf_series(k: u32, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let ln_fact = |m: u32| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    if z < k as f64 {
        let mut t = (-z + k as f64 * z.ln() - ln_fact(k)).exp();
        let mut sum = 0.0;
        let mut m = k;
        while t > sum * 1e-18 && t > 0.0 {
            sum += t;
            m += 1;
            t *= z / m as f64;
        }
        sum
    } else {
        let head: f64 = (0..k).map(|m| (-z + m as f64 * z.ln() - ln_fact(m)).exp()).sum();
        1.0 - head
    }
}

/// Log-uniform draw in `[lo, hi]`.
pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

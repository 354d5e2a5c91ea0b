//! Regularized incomplete gamma functions for positive integer shape.
//!
//! For an integer shape `k` the lower function is the Erlang CDF
//!
//! ```text
//! P(k, x) = 1 - e^{-x} * sum_{m=0}^{k-1} x^m / m!
//! ```
//!
//! i.e. the probability that a sum of `k` unit-mean exponentials is below `x`.
//! The upper function `Q(k, x) = 1 - P(k, x)` is the Poisson head
//! `e^{-x} * sum_{m<k} x^m / m!`. Both are evaluated from whichever of the
//! head sum or the (all-positive) Poisson tail series avoids cancellation, so
//! small values keep full relative precision.

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

/// Shape argument of the integer-shape incomplete gamma function.
///
/// In the outage formulas this is the cardinality of a non-empty decoding set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaShape(u32);

impl GammaShape {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("gamma shape must be at least 1"));
        }
        Ok(GammaShape(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for GammaShape {
    type Error = Error;

    fn try_from(k: u32) -> Result<Self> {
        GammaShape::new(k)
    }
}

impl TryFrom<usize> for GammaShape {
    type Error = Error;

    fn try_from(k: usize) -> Result<Self> {
        let k = u32::try_from(k).map_err(|_| Error::domain("gamma shape out of range"))?;
        GammaShape::new(k)
    }
}

/// Regularized lower incomplete gamma function `P(k, x)`.
pub fn reg_lower_gamma(k: GammaShape, x: f64) -> Result<f64> {
    check_arg("x", x)?;
    let k = k.get();
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < f64::from(k) {
        Ok(poisson_tail(k, x).min(1.0))
    } else {
        Ok((1.0 - poisson_head(k, x, -x)).clamp(0.0, 1.0))
    }
}

/// Regularized upper incomplete gamma function `Q(k, x) = 1 - P(k, x)`.
pub fn reg_upper_gamma(k: GammaShape, x: f64) -> Result<f64> {
    check_arg("x", x)?;
    let k = k.get();
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < f64::from(k) {
        Ok((1.0 - poisson_tail(k, x)).clamp(0.0, 1.0))
    } else {
        Ok(poisson_head(k, x, -x).min(1.0))
    }
}

/// `e^{c} * Q(k, a + c)`, evaluated as `e^{-a} * sum_{m<k} (a+c)^m / m!`.
///
/// The factor `e^{c}` cancels exactly against the `e^{-(a+c)}` inside `Q`, so
/// the result is finite whenever the true value is, even when `e^{c}` alone
/// would overflow.
pub fn scaled_upper_gamma_term(k: GammaShape, a: f64, c: f64) -> Result<f64> {
    check_arg("a", a)?;
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::domain(format!("c must be positive and finite, got {c}")));
    }
    Ok(poisson_head(k.get(), a + c, -a))
}

/// `ln(m!)`.
pub(crate) fn ln_factorial(m: u32) -> f64 {
    compensated_sum((2..=m).map(|i| f64::from(i).ln()))
}

fn check_arg(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("{name} must be nonnegative, got {x}")));
    }
    Ok(())
}

/// `sum_{m=0}^{k-1} exp(log_prefactor) * x^m / m!`, summed in ascending `m`.
///
/// Terms are generated outward from the largest one (index `min(floor(x), k-1)`),
/// which is computed in log space, so no intermediate under- or overflows
/// unless the result itself does.
fn poisson_head(k: u32, x: f64, log_prefactor: f64) -> f64 {
    if x == 0.0 {
        return log_prefactor.exp();
    }
    if x.is_infinite() {
        return if k == 1 { log_prefactor.exp() } else { f64::INFINITY };
    }
    let top = k - 1;
    let peak = if x >= f64::from(top) { top } else { x.floor() as u32 };
    let ln_x = x.ln();
    let peak_term = (log_prefactor + f64::from(peak) * ln_x - ln_factorial(peak)).exp();

    let mut terms = vec![0.0; k as usize];
    terms[peak as usize] = peak_term;
    // t_{m-1} = t_m * m / x
    let mut t = peak_term;
    for m in (1..=peak).rev() {
        t *= f64::from(m) / x;
        terms[m as usize - 1] = t;
    }
    // t_{m+1} = t_m * x / (m + 1)
    let mut t = peak_term;
    for m in peak..top {
        t *= x / f64::from(m + 1);
        terms[m as usize + 1] = t;
    }
    compensated_sum(terms)
}

/// `sum_{m>=k} e^{-x} x^m / m!` for `0 < x < k`.
///
/// The ratio of consecutive terms is `x / (m + 1) < 1`, so the series is
/// monotonically decreasing from its first term.
fn poisson_tail(k: u32, x: f64) -> f64 {
    let first = (-x + f64::from(k) * x.ln() - ln_factorial(k)).exp();
    if first == 0.0 {
        return 0.0;
    }
    let mut terms = Vec::with_capacity(32);
    let mut t = first;
    let mut m = k;
    loop {
        terms.push(t);
        m += 1;
        t *= x / f64::from(m);
        // Remaining tail is below t / (1 - x/(m+1)); stop once it cannot move the sum.
        let bound = t / (1.0 - x / f64::from(m + 1));
        if bound < first * 1e-18 || t == 0.0 {
            break;
        }
    }
    compensated_sum(terms)
}

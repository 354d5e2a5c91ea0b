//! Closed-form outage probabilities.
//!
//! Conditioned on a declared spectrum hole, outage splits into four parts:
//! the decoding set is empty or not, under each true hypothesis. For a
//! non-empty decoding set `D` the first hop contributes
//! `prod_{i in D} Pr(decode_i) * prod_{j not in D} Pr(fail_j)` and the second
//! hop a tail probability that depends only on `|D|`, because the relay -> SD
//! links are i.i.d.:
//!
//! * multi-relay (MRC): `Pr(sum_{i in D} g_id < threshold)`, an Erlang CDF;
//! * best relay: `Pr(max_{i in D} g_id < threshold)`.
//!
//! Under `H1` the threshold is `Delta * (1 + gamma_p * g_pd)` with `g_pd`
//! exponential, which is averaged out in closed form.
//!
//! Heterogeneous ST/PT -> relay variances are handled by enumerating all
//! `2^N - 1` decoding sets. When those variances are homogeneous the sets are
//! grouped by cardinality with binomial weights instead; the enumeration stays
//! available as a reference.

use crate::error::{Error, Result};
use crate::model::{Hypothesis, Posterior, Scheme, SystemParams};
use crate::parallel::map_chunks;
use crate::quad;
use crate::specfun::{reg_lower_gamma, scaled_upper_gamma_term, GammaShape};
use crate::sum::{compensated_sum, CompensatedSum};

/// Subset of relays that decoded the source message, as a bitmask
/// (bit `i` set means relay `i` is in the set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DecodingSet {
    mask: u32,
}

impl DecodingSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_mask(mask: u32) -> Self {
        DecodingSet { mask }
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    pub fn cardinality(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn contains(self, relay: usize) -> bool {
        self.mask >> relay & 1 == 1
    }

    pub fn insert(&mut self, relay: usize) {
        self.mask |= 1 << relay;
    }

    /// Relay indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }
}

/// Outage probability split into its four conditional contributions, each
/// already weighted by the hypothesis posterior.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutageBreakdown {
    pub total: f64,
    /// Empty decoding set, spectrum truly free.
    pub empty_h0: f64,
    /// Empty decoding set, spectrum occupied (missed detection).
    pub empty_h1: f64,
    /// Second-hop failure with a non-empty decoding set, spectrum free.
    pub nonempty_h0: f64,
    /// Second-hop failure with a non-empty decoding set, spectrum occupied.
    pub nonempty_h1: f64,
}

impl OutageBreakdown {
    fn from_parts(empty_h0: f64, empty_h1: f64, nonempty_h0: f64, nonempty_h1: f64) -> Self {
        let total = compensated_sum([empty_h0, empty_h1, nonempty_h0, nonempty_h1]);
        OutageBreakdown {
            total: total.clamp(0.0, 1.0),
            empty_h0,
            empty_h1,
            nonempty_h0,
            nonempty_h1,
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_nan() || delta < 0.0 || delta.is_infinite() {
        return Err(Error::domain(format!("delta must be finite and nonnegative, got {delta}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `Pr(g < delta)` for `g ~ Exp(sigma2)`.
pub fn p_below_h0(delta: f64, sigma2: f64) -> Result<f64> {
    check_delta(delta)?;
    check_positive("sigma2", sigma2)?;
    Ok(-(-delta / sigma2).exp_m1())
}

/// `Pr(g_s < delta * (gamma_p * g_p + 1))` for independent `g_s ~ Exp(sigma2_s)`,
/// `g_p ~ Exp(sigma2_p)`: decoding failure at a relay exposed to the primary.
pub fn p_below_h1(delta: f64, sigma2_s: f64, sigma2_p: f64, gamma_p: f64) -> Result<f64> {
    check_delta(delta)?;
    check_positive("sigma2_s", sigma2_s)?;
    check_positive("sigma2_p", sigma2_p)?;
    check_positive("gamma_p", gamma_p)?;
    let r = sigma2_p * gamma_p * delta / sigma2_s;
    // 1 - e^{-x} / (1 + r), rearranged to keep precision when both are small
    Ok(((-(-delta / sigma2_s).exp_m1() + r) / (1.0 + r)).clamp(0.0, 1.0))
}

/// `Pr(sum of k i.i.d. Exp(sigma2_d) < delta)`.
pub fn p_sum_below_h0(delta: f64, sigma2_d: f64, k: GammaShape) -> Result<f64> {
    check_delta(delta)?;
    check_positive("sigma2_d", sigma2_d)?;
    reg_lower_gamma(k, delta / sigma2_d)
}

/// `Pr(sum of k i.i.d. Exp(sigma2_d) < delta * (gamma_p * g_pd + 1))` with
/// `g_pd ~ Exp(sigma2_pd)`.
///
/// Equals `P(k, a) + e^{c} Q(k, a + c) / (1 + c/a)^k` with `a = delta/sigma2_d`
/// and `c = 1/(sigma2_pd * gamma_p)`. The `e^{c} Q` product is taken from
/// [`scaled_upper_gamma_term`], never formed from its factors.
pub fn p_sum_below_h1(
    delta: f64,
    sigma2_d: f64,
    sigma2_pd: f64,
    gamma_p: f64,
    k: GammaShape,
) -> Result<f64> {
    check_delta(delta)?;
    check_positive("sigma2_d", sigma2_d)?;
    check_positive("sigma2_pd", sigma2_pd)?;
    check_positive("gamma_p", gamma_p)?;
    if delta == 0.0 {
        return Ok(0.0);
    }
    let a = delta / sigma2_d;
    let c = 1.0 / (sigma2_pd * gamma_p);
    let lower = reg_lower_gamma(k, a)?;
    let scaled = scaled_upper_gamma_term(k, a, c)?;
    let exponent = i32::try_from(k.get()).map_err(|_| Error::domain("gamma shape too large"))?;
    let denom = (1.0 + c / a).powi(exponent);
    Ok((lower + scaled / denom).clamp(0.0, 1.0))
}

/// `Pr(max of k i.i.d. Exp(sigma2_d) < delta) = (1 - e^{-delta/sigma2_d})^k`.
pub fn p_max_below_h0(delta: f64, sigma2_d: f64, k: GammaShape) -> Result<f64> {
    let single = p_below_h0(delta, sigma2_d)?;
    Ok(single.powi(k.get() as i32))
}

/// `Pr(max of k i.i.d. Exp(sigma2_d) < delta * (gamma_p * g_pd + 1))` with
/// `g_pd ~ Exp(sigma2_pd)`.
///
/// Averaging `(1 - e^{-(delta + gamma_p delta y)/sigma2_d})^k` over `y` term by
/// term gives
///
/// ```text
/// sum_{m=0}^{k} C(k,m) (-1)^m e^{-m delta/sigma2_d} / (1 + m sigma2_pd gamma_p delta / sigma2_d)
/// ```
///
/// The alternating sum loses relative precision when the result is much
/// smaller than its largest term (high SNR, large `k`); in that regime the
/// expectation is integrated numerically instead.
pub fn p_max_below_h1(
    delta: f64,
    sigma2_d: f64,
    sigma2_pd: f64,
    gamma_p: f64,
    k: GammaShape,
) -> Result<f64> {
    check_delta(delta)?;
    check_positive("sigma2_d", sigma2_d)?;
    check_positive("sigma2_pd", sigma2_pd)?;
    check_positive("gamma_p", gamma_p)?;
    if delta == 0.0 {
        return Ok(0.0);
    }
    let k = k.get();
    if k == 1 {
        return p_below_h1(delta, sigma2_d, sigma2_pd, gamma_p);
    }
    let u = (-delta / sigma2_d).exp();
    let r = sigma2_pd * gamma_p * delta / sigma2_d;
    let mut binom = 1.0;
    let mut power = 1.0;
    let mut acc = CompensatedSum::new();
    let mut magnitude = 0.0;
    for m in 0..=k {
        if m > 0 {
            binom = binom * f64::from(k - m + 1) / f64::from(m);
            power *= -u;
        }
        let term = binom * power / (1.0 + f64::from(m) * r);
        magnitude += term.abs();
        acc.add(term);
    }
    let value = acc.value();
    if value > 0.0 && magnitude * f64::EPSILON * f64::from(4 * (k + 1)) <= 1e-12 * value {
        return Ok(value.min(1.0));
    }
    let k = k as i32;
    let integrand = |y: f64| (-(-(delta + gamma_p * delta * y) / sigma2_d).exp_m1()).powi(k);
    Ok(quad::exponential_expectation(integrand, sigma2_pd, 1e-13).clamp(0.0, 1.0))
}

/// Second-hop combining rule of a relayed scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Combining {
    Mrc,
    Best,
}

/// Per-relay `(decode, fail)` probabilities in the first hop.
fn first_hop(params: &SystemParams, delta: f64, hyp: Hypothesis) -> Result<Vec<(f64, f64)>> {
    let v = &params.variances;
    v.sigma2_si
        .iter()
        .zip(&v.sigma2_pi)
        .map(|(&s, &p)| {
            Ok(match hyp {
                Hypothesis::H0 => ((-delta / s).exp(), p_below_h0(delta, s)?),
                Hypothesis::H1 => {
                    let r = p * params.gamma_p * delta / s;
                    ((-delta / s).exp() / (1.0 + r), p_below_h1(delta, s, p, params.gamma_p)?)
                }
            })
        })
        .collect()
}

/// Second-hop outage for every decoding-set size; index `k - 1` holds `|D| = k`.
fn second_hop(
    params: &SystemParams,
    delta: f64,
    hyp: Hypothesis,
    combining: Combining,
) -> Result<Vec<f64>> {
    let v = &params.variances;
    (1..=params.n_relays)
        .map(|k| {
            let k = GammaShape::try_from(k)?;
            match (combining, hyp) {
                (Combining::Mrc, Hypothesis::H0) => p_sum_below_h0(delta, v.sigma2_d, k),
                (Combining::Mrc, Hypothesis::H1) => {
                    p_sum_below_h1(delta, v.sigma2_d, v.sigma2_pd, params.gamma_p, k)
                }
                (Combining::Best, Hypothesis::H0) => p_max_below_h0(delta, v.sigma2_d, k),
                (Combining::Best, Hypothesis::H1) => {
                    p_max_below_h1(delta, v.sigma2_d, v.sigma2_pd, params.gamma_p, k)
                }
            }
        })
        .collect()
}

/// Conditional `(Pr(D = empty), Pr(outage, D != empty))` under one hypothesis.
type ConditionalOutage = (f64, f64);

/// Masks per parallel work item during enumeration.
const MASK_CHUNK: u64 = 1 << 12;

fn conditional_enumerated(first: &[(f64, f64)], tails: &[f64]) -> ConditionalOutage {
    let n = first.len();
    let empty: f64 = first.iter().map(|&(_, fail)| fail).product();
    let masks = 1u64 << n;
    let partials = map_chunks(masks - 1, MASK_CHUNK, None, |range| {
        let mut acc = CompensatedSum::new();
        for idx in range {
            let set = DecodingSet::from_mask(idx as u32 + 1);
            acc.add(set_probability(first, set) * tails[set.cardinality() - 1]);
        }
        acc
    });
    let mut nonempty = CompensatedSum::new();
    for part in partials {
        nonempty.merge(part);
    }
    (empty, nonempty.value())
}

fn set_probability(first: &[(f64, f64)], set: DecodingSet) -> f64 {
    first
        .iter()
        .enumerate()
        .map(|(i, &(ok, fail))| if set.contains(i) { ok } else { fail })
        .product()
}

/// Binomial coefficients `C(n, 0..=n)`, exact in `f64` for `n <= 24`.
fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    row.push(c);
    for k in 1..=n {
        c = c * (n - k + 1) as f64 / k as f64;
        row.push(c);
    }
    row
}

fn conditional_grouped(first: &[(f64, f64)], tails: &[f64]) -> ConditionalOutage {
    let n = first.len();
    let (ok, fail) = first[0];
    let binom = binomial_row(n);
    let empty = fail.powi(n as i32);
    let nonempty = compensated_sum((1..=n).map(|k| {
        binom[k] * ok.powi(k as i32) * fail.powi((n - k) as i32) * tails[k - 1]
    }));
    (empty, nonempty)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Evaluation {
    Auto,
    Enumerated,
    Grouped,
}

fn relayed_outage(
    params: &SystemParams,
    combining: Combining,
    evaluation: Evaluation,
) -> Result<OutageBreakdown> {
    params.validate()?;
    let Posterior { pi0, pi1 } = params.posterior()?;
    let delta = params.threshold()?.delta;
    let grouped = match evaluation {
        Evaluation::Auto => params.variances.is_homogeneous(),
        Evaluation::Enumerated => false,
        Evaluation::Grouped => {
            if !params.variances.is_homogeneous() {
                return Err(Error::config(
                    "grouped evaluation requires identical per-relay variances",
                ));
            }
            true
        }
    };
    let conditional = |hyp| -> Result<ConditionalOutage> {
        let first = first_hop(params, delta, hyp)?;
        let tails = second_hop(params, delta, hyp, combining)?;
        Ok(if grouped {
            conditional_grouped(&first, &tails)
        } else {
            conditional_enumerated(&first, &tails)
        })
    };
    let (empty0, nonempty0) = if pi0 > 0.0 { conditional(Hypothesis::H0)? } else { (0.0, 0.0) };
    let (empty1, nonempty1) = if pi1 > 0.0 { conditional(Hypothesis::H1)? } else { (0.0, 0.0) };
    Ok(OutageBreakdown::from_parts(
        pi0 * empty0,
        pi1 * empty1,
        pi0 * nonempty0,
        pi1 * nonempty1,
    ))
}

/// Outage of multi-relay selection with MRC at the destination.
pub fn outage_multi_relay(params: &SystemParams) -> Result<OutageBreakdown> {
    relayed_outage(params, Combining::Mrc, Evaluation::Auto)
}

/// Multi-relay outage by explicit enumeration of every decoding set.
pub fn outage_multi_relay_enumerated(params: &SystemParams) -> Result<OutageBreakdown> {
    relayed_outage(params, Combining::Mrc, Evaluation::Enumerated)
}

/// Multi-relay outage with decoding sets grouped by size; identical relays only.
pub fn outage_multi_relay_grouped(params: &SystemParams) -> Result<OutageBreakdown> {
    relayed_outage(params, Combining::Mrc, Evaluation::Grouped)
}

/// Outage of best-relay selection: the decoding-set member with the largest
/// relay -> SD gain forwards alone.
pub fn outage_best_relay(params: &SystemParams) -> Result<OutageBreakdown> {
    relayed_outage(params, Combining::Best, Evaluation::Auto)
}

pub fn outage_best_relay_enumerated(params: &SystemParams) -> Result<OutageBreakdown> {
    relayed_outage(params, Combining::Best, Evaluation::Enumerated)
}

pub fn outage_best_relay_grouped(params: &SystemParams) -> Result<OutageBreakdown> {
    relayed_outage(params, Combining::Best, Evaluation::Grouped)
}

/// Outage of one-slot direct transmission ST -> SD.
///
/// There is no decoding set, so both empty-set components are zero.
pub fn outage_direct(params: &SystemParams) -> Result<OutageBreakdown> {
    params.validate()?;
    let Posterior { pi0, pi1 } = params.posterior()?;
    let delta = params.threshold()?.delta_direct;
    let v = &params.variances;
    let h0 = p_below_h0(delta, v.sigma2_sd)?;
    let h1 = p_below_h1(delta, v.sigma2_sd, v.sigma2_pd, params.gamma_p)?;
    Ok(OutageBreakdown::from_parts(0.0, 0.0, pi0 * h0, pi1 * h1))
}

pub fn outage(params: &SystemParams, scheme: Scheme) -> Result<OutageBreakdown> {
    match scheme {
        Scheme::Direct => outage_direct(params),
        Scheme::BestRelay => outage_best_relay(params),
        Scheme::MultiRelay => outage_multi_relay(params),
    }
}

/// Probability of a specific decoding set under a given true hypothesis.
pub fn decoding_set_probability(
    params: &SystemParams,
    set: DecodingSet,
    hyp: Hypothesis,
) -> Result<f64> {
    params.validate()?;
    let delta = params.threshold()?.delta;
    Ok(set_probability(&first_hop(params, delta, hyp)?, set))
}

/// Distribution of the decoding-set size given a declared hole; entry `k` is
/// `Pr(|D| = k)`, mixing both hypotheses with their posterior weights.
pub fn cardinality_distribution(params: &SystemParams) -> Result<Vec<f64>> {
    params.validate()?;
    let Posterior { pi0, pi1 } = params.posterior()?;
    let delta = params.threshold()?.delta;
    let n = params.n_relays;
    let mut dist = vec![0.0; n + 1];
    for (hyp, weight) in [(Hypothesis::H0, pi0), (Hypothesis::H1, pi1)] {
        if weight == 0.0 {
            continue;
        }
        let first = first_hop(params, delta, hyp)?;
        if params.variances.is_homogeneous() {
            let (ok, fail) = first[0];
            for (k, c) in binomial_row(n).into_iter().enumerate() {
                dist[k] += weight * c * ok.powi(k as i32) * fail.powi((n - k) as i32);
            }
        } else {
            for mask in 0..(1u32 << n) {
                let set = DecodingSet::from_mask(mask);
                dist[set.cardinality()] += weight * set_probability(&first, set);
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(k: u32) -> GammaShape {
        GammaShape::new(k).unwrap()
    }

    const Q: f64 = 0.259_181_779_318_282; // 1 - e^{-0.3}

    #[test]
    fn first_hop_h0_examples() {
        assert_eq!(p_below_h0(0.0, 1.0).unwrap(), 0.0);
        assert!((p_below_h0(1.0, 1.0).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert!((p_below_h0(0.3, 1.0).unwrap() - Q).abs() < 1e-15);
        assert!(p_below_h0(-0.1, 1.0).is_err());
        assert!(p_below_h0(0.1, 0.0).is_err());
    }

    #[test]
    fn first_hop_h1_examples() {
        assert_eq!(p_below_h1(0.0, 1.0, 0.2, 10.0).unwrap(), 0.0);
        let v = p_below_h1(0.3, 1.0, 0.2, 10.0).unwrap();
        assert!((v - (1.0 - (-0.3f64).exp() / 1.6)).abs() < 1e-15);
        assert!((v - 0.536_988_612).abs() < 1e-9);
        let v = p_below_h1(0.3, 1.0, 0.2, 1e-12).unwrap();
        assert!((v - Q).abs() < 1e-9);
        assert!(p_below_h1(0.3, 1.0, 0.2, 0.0).is_err());
    }

    #[test]
    fn sum_tail_h0_examples() {
        assert_eq!(p_sum_below_h0(0.0, 1.0, shape(3)).unwrap(), 0.0);
        assert!((p_sum_below_h0(0.3, 1.0, shape(1)).unwrap() - Q).abs() < 1e-15);
        let v = p_sum_below_h0(0.3, 1.0, shape(2)).unwrap();
        assert!((v - (1.0 - 1.3 * (-0.3f64).exp())).abs() < 1e-15);
        assert!((v - 0.036_936_31).abs() < 1e-8);
    }

    #[test]
    fn sum_tail_h1_examples() {
        let v = p_sum_below_h1(0.3, 1.0, 0.2, 10.0, shape(1)).unwrap();
        assert!((v - 0.536_988_612).abs() < 1e-9);
        for k in 1..=6 {
            assert_eq!(p_sum_below_h1(0.0, 1.0, 0.2, 10.0, shape(k)).unwrap(), 0.0);
            assert!(p_sum_below_h1(1e-300, 1.0, 0.2, 10.0, shape(k)).unwrap() < 1e-290);
        }
    }

    #[test]
    fn max_tail_examples() {
        let v = p_max_below_h0(0.3, 1.0, shape(2)).unwrap();
        assert!((v - Q * Q).abs() < 1e-15);
        assert!((v - 0.067_175_20).abs() < 1e-8);
        for (delta, gp) in [(0.3, 10.0), (0.003, 10.0), (2.0, 0.5)] {
            let sum = p_sum_below_h1(delta, 1.0, 0.2, gp, shape(1)).unwrap();
            let max = p_max_below_h1(delta, 1.0, 0.2, gp, shape(1)).unwrap();
            assert!((sum - max).abs() <= 1e-15 * max);
            let sum = p_sum_below_h0(delta, 1.0, shape(1)).unwrap();
            let max = p_max_below_h0(delta, 1.0, shape(1)).unwrap();
            assert!((sum - max).abs() < 1e-16);
        }
    }

    #[test]
    fn max_tail_h1_closed_form_and_quadrature_agree() {
        // Moderate regime: the alternating sum is well conditioned; compare it
        // with the numerical expectation directly.
        for k in 2..=8 {
            let closed = p_max_below_h1(0.5, 1.0, 0.2, 10.0, shape(k)).unwrap();
            let integrand =
                |y: f64| (-(-(0.5 + 10.0 * 0.5 * y)).exp_m1()).powi(k as i32);
            let numeric = quad::exponential_expectation(integrand, 0.2, 1e-13);
            assert!(((closed - numeric) / numeric).abs() < 1e-10, "k={k}");
        }
        // High-SNR regime falls back to quadrature; value must stay tiny and positive.
        let v = p_max_below_h1(1e-3, 1.0, 0.2, 10.0, shape(6)).unwrap();
        assert!(v > 0.0 && v < 1e-12, "{v}");
    }

    #[test]
    fn decoding_set_bits() {
        let mut s = DecodingSet::empty();
        assert!(s.is_empty());
        s.insert(0);
        s.insert(3);
        assert_eq!(s.mask(), 0b1001);
        assert_eq!(s.cardinality(), 2);
        assert!(s.contains(3) && !s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3]);
    }

    #[test]
    fn single_relay_h0_only_hand_assembly() {
        let mut p = SystemParams::reference().with_relays(1).unwrap();
        p.pd = 1.0;
        p.pf = 0.0;
        p.gamma_s = 10.0;
        let b = outage_multi_relay(&p).unwrap();
        let expected = Q + (1.0 - Q) * Q;
        assert!((b.total - expected).abs() < 1e-14);
        assert!((b.total - 0.451_19).abs() < 1e-5);
        assert_eq!(b.empty_h1, 0.0);
        assert_eq!(b.nonempty_h1, 0.0);
    }

    #[test]
    fn perfect_sensing_removes_h1_terms() {
        let p = SystemParams::reference().with_sensing(1.0, 0.0);
        for scheme in Scheme::ALL {
            let b = outage(&p, scheme).unwrap();
            assert_eq!(b.empty_h1, 0.0);
            assert_eq!(b.nonempty_h1, 0.0);
        }
    }

    #[test]
    fn direct_single_link() {
        let mut p = SystemParams::reference().with_sensing(1.0, 0.0);
        p.gamma_s = 10.0;
        let b = outage_direct(&p).unwrap();
        assert_eq!(b.empty_h0 + b.empty_h1, 0.0);
        assert!((b.total - 0.095_162_581_964_040_4).abs() < 1e-15);
    }

    #[test]
    fn breakdown_sums_to_total() {
        let p = SystemParams::reference().with_gamma_s_db(5.0);
        for scheme in Scheme::ALL {
            let b = outage(&p, scheme).unwrap();
            let sum = b.empty_h0 + b.empty_h1 + b.nonempty_h0 + b.nonempty_h1;
            assert!((b.total - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn heterogeneous_relays_use_enumeration() {
        let mut p = SystemParams::reference().with_relays(4).unwrap();
        p.variances.sigma2_si = vec![0.5, 1.0, 2.0, 4.0];
        let b = outage_multi_relay(&p).unwrap();
        assert_eq!(b, outage_multi_relay_enumerated(&p).unwrap());
        assert!(outage_multi_relay_grouped(&p).is_err());
        let dist = cardinality_distribution(&p).unwrap();
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cardinality_distribution_sums_to_one() {
        let p = SystemParams::reference();
        let dist = cardinality_distribution(&p).unwrap();
        assert_eq!(dist.len(), 7);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let b = outage_multi_relay(&p).unwrap();
        assert!((dist[0] - (b.empty_h0 + b.empty_h1)).abs() < 1e-15);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = SystemParams::reference().with_relays(25).unwrap();
        assert!(outage_multi_relay(&p).is_err());
        let p = SystemParams::reference().with_sensing(0.0, 0.0);
        assert!(outage_direct(&p).is_err());
    }
}

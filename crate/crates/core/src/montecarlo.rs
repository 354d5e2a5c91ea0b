//! Sample-path simulation of the cognitive relay network.
//!
//! Every trial is conditioned on the sensor having declared a hole: the true
//! hypothesis is drawn from the sensing posterior, then all squared fading
//! gains are drawn as exponentials. Complex coefficients, symbols and noise
//! never need to be materialized because decoding and SINR depend on gains
//! only.
//!
//! Trial `t` under seed `s` draws from its own ChaCha8 stream (key derived
//! from `s`, stream id `t`), so an estimate is a pure function of
//! `(params, trials, seed)` whatever the number of worker threads, and the
//! first `n` trials of a longer run are exactly the trials of a run of `n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::DecodingSet;
use crate::error::{Error, Result};
use crate::model::{Hypothesis, Posterior, Scheme, SnrThreshold, SystemParams};
use crate::parallel::map_chunks;

/// Trials per parallel work item. Part of the determinism contract only in
/// that it is fixed; counts are integers, so the reduction is exact.
const TRIAL_CHUNK: u64 = 1 << 14;

/// Random stream for trial `trial` of a run seeded with `seed`.
pub fn trial_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(stream_key(seed));
    rng.set_stream(trial);
    rng
}

fn stream_key(seed: u64) -> [u8; 32] {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

/// Inverse-CDF map from `u in [0, 1)` to an exponential variate with the given mean.
pub fn exponential_from_uniform(u: f64, mean: f64) -> f64 {
    -mean * (-u).ln_1p()
}

pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    exponential_from_uniform(rng.random::<f64>(), mean)
}

/// Draws the true hypothesis given a declared hole: `H1` with probability `pi1`.
pub fn sample_hypothesis<R: Rng + ?Sized>(rng: &mut R, posterior: Posterior) -> Hypothesis {
    if rng.random::<f64>() < posterior.pi1 {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}

/// Squared fading magnitudes of every link on one sample path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelState {
    /// ST -> R_i
    pub g_si: Vec<f64>,
    /// PT -> R_i
    pub g_pi: Vec<f64>,
    /// R_i -> SD
    pub g_id: Vec<f64>,
    /// PT -> SD
    pub g_pd: f64,
    /// ST -> SD
    pub g_sd: f64,
}

impl ChannelState {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, params: &SystemParams) -> Self {
        let mut state = ChannelState::default();
        state.resample(rng, params);
        state
    }

    /// Redraws all gains in place. Per relay the draw order is
    /// `g_si, g_pi, g_id`, followed by `g_pd` and `g_sd`.
    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R, params: &SystemParams) {
        let v = &params.variances;
        let n = params.n_relays;
        self.g_si.resize(n, 0.0);
        self.g_pi.resize(n, 0.0);
        self.g_id.resize(n, 0.0);
        for i in 0..n {
            self.g_si[i] = sample_exponential(rng, v.sigma2_si[i]);
            self.g_pi[i] = sample_exponential(rng, v.sigma2_pi[i]);
            self.g_id[i] = sample_exponential(rng, v.sigma2_d);
        }
        self.g_pd = sample_exponential(rng, v.sigma2_pd);
        self.g_sd = sample_exponential(rng, v.sigma2_sd);
    }
}

/// Relays whose first-hop capacity exceeds the rate:
/// `g_si > delta * (alpha * gamma_p * g_pi + 1)`.
pub fn decoding_set(
    state: &ChannelState,
    hyp: Hypothesis,
    thr: SnrThreshold,
    params: &SystemParams,
) -> DecodingSet {
    let alpha_gp = hyp.alpha() * params.gamma_p;
    let mut set = DecodingSet::empty();
    for (i, (&gs, &gp)) in state.g_si.iter().zip(&state.g_pi).enumerate() {
        if gs > thr.delta * (alpha_gp * gp + 1.0) {
            set.insert(i);
        }
    }
    set
}

/// Optimal unit-norm combining weights and the SINR they achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct MrcResult {
    /// One weight per decoding-set member, in ascending relay order.
    pub weights: Vec<f64>,
    pub sinr: f64,
}

/// Interference-plus-noise normalization `alpha * gamma_p * g_pd + 1`.
fn interference(state: &ChannelState, hyp: Hypothesis, params: &SystemParams) -> f64 {
    hyp.alpha() * params.gamma_p * state.g_pd + 1.0
}

/// Maximal ratio combining over the decoding set.
///
/// With gains only, the conjugate-matched weights reduce to
/// `sqrt(g_id) / sqrt(sum g_id)` and the SINR to
/// `gamma_s * sum g_id / (alpha * gamma_p * g_pd + 1)`.
pub fn mrc_combine(
    state: &ChannelState,
    set: DecodingSet,
    hyp: Hypothesis,
    params: &SystemParams,
) -> Result<MrcResult> {
    if set.is_empty() {
        return Err(Error::domain("MRC needs a non-empty decoding set"));
    }
    let total: f64 = set.iter().map(|i| state.g_id[i]).sum();
    let norm = total.sqrt();
    let weights = if norm > 0.0 {
        set.iter().map(|i| state.g_id[i].sqrt() / norm).collect()
    } else {
        // All gains zero: any unit vector is optimal.
        let w = 1.0 / (set.cardinality() as f64).sqrt();
        vec![w; set.cardinality()]
    };
    Ok(MrcResult {
        weights,
        sinr: params.gamma_s * total / interference(state, hyp, params),
    })
}

/// SINR at SD for arbitrary combining weights (one per decoding-set member).
pub fn sinr_with_weights(
    state: &ChannelState,
    set: DecodingSet,
    hyp: Hypothesis,
    params: &SystemParams,
    weights: &[f64],
) -> f64 {
    let coherent: f64 = set.iter().zip(weights).map(|(i, w)| w * state.g_id[i].sqrt()).sum();
    params.gamma_s * coherent * coherent / interference(state, hyp, params)
}

/// SINR when only the decoding-set relay with the largest relay -> SD gain forwards.
pub fn best_relay_sinr(
    state: &ChannelState,
    set: DecodingSet,
    hyp: Hypothesis,
    params: &SystemParams,
) -> f64 {
    let best = set.iter().map(|i| state.g_id[i]).fold(0.0, f64::max);
    params.gamma_s * best / interference(state, hyp, params)
}

/// Outage indicators of all three schemes on one sample path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub hypothesis: Hypothesis,
    pub decoded: DecodingSet,
    pub multi: bool,
    pub best: bool,
    pub direct: bool,
}

impl TrialOutcome {
    pub fn outage(&self, scheme: Scheme) -> bool {
        match scheme {
            Scheme::Direct => self.direct,
            Scheme::BestRelay => self.best,
            Scheme::MultiRelay => self.multi,
        }
    }
}

/// Validated parameters plus everything derived from them that a trial needs.
struct TrialModel<'a> {
    params: &'a SystemParams,
    posterior: Posterior,
    threshold: SnrThreshold,
    /// SINR below which the two-slot relayed link is in outage: `2^{2R} - 1`.
    relayed_sinr_min: f64,
    /// SINR below which the one-slot direct link is in outage: `2^R - 1`.
    direct_sinr_min: f64,
}

impl<'a> TrialModel<'a> {
    fn new(params: &'a SystemParams) -> Result<Self> {
        params.validate()?;
        let ln2 = std::f64::consts::LN_2;
        Ok(TrialModel {
            params,
            posterior: params.posterior()?,
            threshold: params.threshold()?,
            relayed_sinr_min: (2.0 * params.rate * ln2).exp_m1(),
            direct_sinr_min: (params.rate * ln2).exp_m1(),
        })
    }

    /// One trial: hypothesis first, then the full channel state.
    fn run<R: Rng + ?Sized>(&self, rng: &mut R, state: &mut ChannelState) -> TrialOutcome {
        let params = self.params;
        let hyp = sample_hypothesis(rng, self.posterior);
        state.resample(rng, params);
        let decoded = decoding_set(state, hyp, self.threshold, params);

        let scale = params.gamma_s / interference(state, hyp, params);
        let (multi, best) = if decoded.is_empty() {
            (true, true)
        } else {
            let (sum, max) = decoded
                .iter()
                .map(|i| state.g_id[i])
                .fold((0.0, 0.0f64), |(s, m), g| (s + g, m.max(g)));
            // ½ log2(1 + sinr) < R  <=>  sinr < 2^{2R} - 1
            (scale * sum < self.relayed_sinr_min, scale * max < self.relayed_sinr_min)
        };
        let direct = scale * state.g_sd < self.direct_sinr_min;
        TrialOutcome { hypothesis: hyp, decoded, multi, best, direct }
    }
}

/// Runs one conditioned trial and returns the outcomes of all schemes.
pub fn trial_outcomes<R: Rng + ?Sized>(rng: &mut R, params: &SystemParams) -> Result<TrialOutcome> {
    let model = TrialModel::new(params)?;
    Ok(model.run(rng, &mut ChannelState::default()))
}

/// Runs one conditioned trial and reports whether `scheme` is in outage.
pub fn trial_outage<R: Rng + ?Sized>(
    rng: &mut R,
    params: &SystemParams,
    scheme: Scheme,
) -> Result<bool> {
    Ok(trial_outcomes(rng, params)?.outage(scheme))
}

/// Monte Carlo outage estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p_hat (1 - p_hat) / trials)`.
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl OutageEstimate {
    pub fn from_count(outages: u64, trials: u64, seed: u64) -> Self {
        let p_hat = outages as f64 / trials as f64;
        OutageEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }
}

/// Per-run counts accumulated over trials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tally {
    pub trials: u64,
    pub multi: u64,
    pub best: u64,
    pub direct: u64,
    /// Trials where multi-relay is in outage but best-relay is not.
    pub multi_only: u64,
    /// Trials under `H1`.
    pub h1: u64,
    /// Histogram of decoding-set sizes, index `k` counts `|D| = k`.
    pub cardinality: Vec<u64>,
}

impl Tally {
    fn new(n_relays: usize) -> Self {
        Tally { cardinality: vec![0; n_relays + 1], ..Tally::default() }
    }

    fn record(&mut self, o: &TrialOutcome) {
        self.trials += 1;
        self.multi += u64::from(o.multi);
        self.best += u64::from(o.best);
        self.direct += u64::from(o.direct);
        self.multi_only += u64::from(o.multi && !o.best);
        self.h1 += u64::from(o.hypothesis == Hypothesis::H1);
        self.cardinality[o.decoded.cardinality()] += 1;
    }

    fn merge(&mut self, other: &Tally) {
        self.trials += other.trials;
        self.multi += other.multi;
        self.best += other.best;
        self.direct += other.direct;
        self.multi_only += other.multi_only;
        self.h1 += other.h1;
        for (a, b) in self.cardinality.iter_mut().zip(&other.cardinality) {
            *a += b;
        }
    }

    pub fn outages(&self, scheme: Scheme) -> u64 {
        match scheme {
            Scheme::Direct => self.direct,
            Scheme::BestRelay => self.best,
            Scheme::MultiRelay => self.multi,
        }
    }

    pub fn estimate(&self, scheme: Scheme, seed: u64) -> OutageEstimate {
        OutageEstimate::from_count(self.outages(scheme), self.trials, seed)
    }
}

fn check_run(trials: u64, workers: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    if workers == 0 {
        return Err(Error::domain("at least one worker is required"));
    }
    Ok(())
}

/// Runs trials `0..trials` under `seed` and tallies every scheme on the same
/// sample paths.
pub fn simulate(params: &SystemParams, trials: u64, seed: u64, workers: usize) -> Result<Tally> {
    check_run(trials, workers)?;
    let model = TrialModel::new(params)?;
    let key = stream_key(seed);
    let parts = map_chunks(trials, TRIAL_CHUNK, Some(workers), |range| {
        let mut tally = Tally::new(params.n_relays);
        let mut state = ChannelState::default();
        let mut rng = ChaCha8Rng::from_seed(key);
        for t in range {
            rng.set_stream(t);
            rng.set_word_pos(0);
            let outcome = model.run(&mut rng, &mut state);
            tally.record(&outcome);
        }
        tally
    });
    let mut total = Tally::new(params.n_relays);
    for part in &parts {
        total.merge(part);
    }
    Ok(total)
}

/// Monte Carlo outage of one scheme. The result depends on
/// `(params, scheme, trials, seed)` only, never on `workers`.
pub fn estimate_outage(
    params: &SystemParams,
    scheme: Scheme,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<OutageEstimate> {
    Ok(simulate(params, trials, seed, workers)?.estimate(scheme, seed))
}

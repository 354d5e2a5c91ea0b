//! System parameters, hypothesis semantics, sensing posteriors and the SNR
//! thresholds shared by the analytic and simulation paths.

use crate::error::{Error, Result};

/// Upper bound on the number of relays; the closed form enumerates `2^N - 1`
/// decoding sets.
pub const MAX_RELAYS: usize = 24;

/// True occupancy state of the licensed band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Spectrum unoccupied by the primary transmitter.
    H0,
    /// Spectrum occupied; the primary signal interferes.
    H1,
}

impl Hypothesis {
    /// Interference indicator: 0 under `H0`, 1 under `H1`.
    pub fn alpha(self) -> f64 {
        match self {
            Hypothesis::H0 => 0.0,
            Hypothesis::H1 => 1.0,
        }
    }
}

/// Secondary transmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Single-hop ST -> SD in one time slot.
    Direct,
    /// The decoding-set relay with the strongest relay -> SD gain forwards alone.
    BestRelay,
    /// Every relay in the decoding set forwards; SD combines with MRC.
    MultiRelay,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Direct, Scheme::BestRelay, Scheme::MultiRelay];

    /// Short name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Direct => "direct",
            Scheme::BestRelay => "best",
            Scheme::MultiRelay => "multi",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "direct" => Ok(Scheme::Direct),
            "best" | "best-relay" | "best_relay" => Ok(Scheme::BestRelay),
            "multi" | "multi-relay" | "multi_relay" => Ok(Scheme::MultiRelay),
            other => Err(Error::config(format!(
                "unknown scheme `{other}` (expected direct, best or multi)"
            ))),
        }
    }
}

/// Hypothesis probabilities conditioned on the sensor declaring a hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub pi0: f64,
    pub pi1: f64,
}

/// Outage thresholds on the normalized channel gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrThreshold {
    /// `(2^{2R} - 1) / gamma_s`: two-slot relayed transmission.
    pub delta: f64,
    /// `(2^R - 1) / gamma_s`: one-slot direct transmission.
    pub delta_direct: f64,
}

/// Mean squared fading gains of every link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVariances {
    /// ST -> R_i, one per relay.
    pub sigma2_si: Vec<f64>,
    /// PT -> R_i, one per relay.
    pub sigma2_pi: Vec<f64>,
    /// R_i -> SD, common to every relay.
    pub sigma2_d: f64,
    /// PT -> SD.
    pub sigma2_pd: f64,
    /// ST -> SD, only used by direct transmission.
    pub sigma2_sd: f64,
}

impl ChannelVariances {
    /// Every relay shares the same ST and PT link variances.
    pub fn homogeneous(
        n_relays: usize,
        sigma2_s: f64,
        sigma2_p: f64,
        sigma2_d: f64,
        sigma2_pd: f64,
        sigma2_sd: f64,
    ) -> Self {
        ChannelVariances {
            sigma2_si: vec![sigma2_s; n_relays],
            sigma2_pi: vec![sigma2_p; n_relays],
            sigma2_d,
            sigma2_pd,
            sigma2_sd,
        }
    }

    /// True when all ST -> relay and all PT -> relay variances coincide.
    pub fn is_homogeneous(&self) -> bool {
        let same = |v: &[f64]| v.windows(2).all(|w| w[0] == w[1]);
        same(&self.sigma2_si) && same(&self.sigma2_pi)
    }
}

/// All scalar inputs of the cognitive relay network.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Prior probability that the band is unoccupied.
    pub p0: f64,
    /// Detection probability of a spectrum hole, `Pr(declare H0 | H0)`.
    pub pd: f64,
    /// False-alarm probability of a spectrum hole, `Pr(declare H0 | H1)`.
    pub pf: f64,
    /// Linear SNR of the secondary transmitter.
    pub gamma_s: f64,
    /// Linear SNR of the primary transmitter.
    pub gamma_p: f64,
    /// Target rate in bit/s/Hz.
    pub rate: f64,
    pub n_relays: usize,
    pub variances: ChannelVariances,
}

impl SystemParams {
    /// Parameter set used for the sensing-quality study: `P0 = 0.8`,
    /// `gamma_p = 10 dB`, `R = 1`, `N = 6`, unit-mean secondary links and
    /// primary-interference links with mean 0.2. Sensing defaults to
    /// `(Pd, Pf) = (0.9, 0.1)` and `gamma_s` to 10 dB.
    pub fn reference() -> Self {
        let n = 6;
        SystemParams {
            p0: 0.8,
            pd: 0.9,
            pf: 0.1,
            gamma_s: db_to_linear(10.0),
            gamma_p: db_to_linear(10.0),
            rate: 1.0,
            n_relays: n,
            variances: ChannelVariances::homogeneous(n, 1.0, 0.2, 1.0, 0.2, 1.0),
        }
    }

    pub fn with_gamma_s_db(mut self, db: f64) -> Self {
        self.gamma_s = db_to_linear(db);
        self
    }

    pub fn with_sensing(mut self, pd: f64, pf: f64) -> Self {
        self.pd = pd;
        self.pf = pf;
        self
    }

    /// Resizes the relay set. Requires homogeneous relay variances, which are
    /// repeated for the new relays.
    pub fn with_relays(mut self, n: usize) -> Result<Self> {
        if !self.variances.is_homogeneous() {
            return Err(Error::config(
                "cannot resize a relay set with per-relay variances",
            ));
        }
        let s = self.variances.sigma2_si.first().copied().unwrap_or(1.0);
        let p = self.variances.sigma2_pi.first().copied().unwrap_or(1.0);
        self.variances.sigma2_si = vec![s; n];
        self.variances.sigma2_pi = vec![p; n];
        self.n_relays = n;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p0", self.p0), ("pd", self.pd), ("pf", self.pf)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} = {p} is not a probability")));
            }
        }
        for (name, x) in [
            ("gamma_s", self.gamma_s),
            ("gamma_p", self.gamma_p),
            ("rate", self.rate),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::config(format!("{name} = {x} must be positive and finite")));
            }
        }
        if self.n_relays == 0 || self.n_relays > MAX_RELAYS {
            return Err(Error::config(format!(
                "n_relays = {} outside 1..={MAX_RELAYS} (closed form enumerates 2^N - 1 decoding sets)",
                self.n_relays
            )));
        }
        let v = &self.variances;
        if v.sigma2_si.len() != self.n_relays || v.sigma2_pi.len() != self.n_relays {
            return Err(Error::config(format!(
                "per-relay variances must have length n_relays = {} (got sigma2_si: {}, sigma2_pi: {})",
                self.n_relays,
                v.sigma2_si.len(),
                v.sigma2_pi.len()
            )));
        }
        let scalars = [
            ("sigma2_d", v.sigma2_d),
            ("sigma2_pd", v.sigma2_pd),
            ("sigma2_sd", v.sigma2_sd),
        ];
        let per_relay = v
            .sigma2_si
            .iter()
            .map(|&x| ("sigma2_si", x))
            .chain(v.sigma2_pi.iter().map(|&x| ("sigma2_pi", x)));
        for (name, x) in scalars.into_iter().chain(per_relay) {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::config(format!("{name} = {x} must be positive and finite")));
            }
        }
        posterior(self.p0, self.pd, self.pf)?;
        Ok(())
    }

    pub fn posterior(&self) -> Result<Posterior> {
        posterior(self.p0, self.pd, self.pf)
    }

    pub fn threshold(&self) -> Result<SnrThreshold> {
        snr_threshold(self.rate, self.gamma_s)
    }
}

/// Bayes posterior of the true hypothesis given that a hole was declared.
pub fn posterior(p0: f64, pd: f64, pf: f64) -> Result<Posterior> {
    for (name, p) in [("p0", p0), ("pd", pd), ("pf", pf)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::config(format!("{name} = {p} is not a probability")));
        }
    }
    let hole_free = p0 * pd;
    let hole_busy = (1.0 - p0) * pf;
    let declared = hole_free + hole_busy;
    if declared <= 0.0 || declared.is_nan() {
        return Err(Error::config(
            "sensing never declares a hole: p0*pd + (1-p0)*pf = 0",
        ));
    }
    let pi1 = hole_busy / declared;
    Ok(Posterior { pi0: 1.0 - pi1, pi1 })
}

pub fn snr_threshold(rate: f64, gamma_s: f64) -> Result<SnrThreshold> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::domain(format!("rate must be positive, got {rate}")));
    }
    if !(gamma_s > 0.0 && gamma_s.is_finite()) {
        return Err(Error::domain(format!("gamma_s must be positive, got {gamma_s}")));
    }
    // 2^x - 1 without cancellation at small rates
    let ln2 = std::f64::consts::LN_2;
    Ok(SnrThreshold {
        delta: (2.0 * rate * ln2).exp_m1() / gamma_s,
        delta_direct: (rate * ln2).exp_m1() / gamma_s,
    })
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

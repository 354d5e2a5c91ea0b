//! Sweep configuration: a JSON file, command-line overrides, validation.
//!
//! Every key is optional; unknown keys are rejected. Defaults reproduce the
//! sensing-quality study (`P0 = 0.8`, `gamma_p = 10 dB`, `R = 1`, `N = 6`,
//! unit-mean secondary links, interference links with mean 0.2):
//!
//! ```json
//! {
//!   "gamma_s_db": [0, 5, 10, 15, 20, 25, 30],
//!   "schemes": ["direct", "best", "multi"],
//!   "sensing_pairs": [[0.95, 0.05], [0.65, 0.35]],
//!   "relay_counts": [6],
//!   "trials": 0,
//!   "seed": 1,
//!   "base": {
//!     "p0": 0.8,
//!     "gamma_p_db": 10,
//!     "rate": 1,
//!     "sigma2_si": 1,
//!     "sigma2_pi": 0.2,
//!     "sigma2_d": 1,
//!     "sigma2_pd": 0.2,
//!     "sigma2_sd": 1
//!   }
//! }
//! ```
//!
//! `sigma2_si` and `sigma2_pi` accept either one number (shared by every
//! relay) or one number per relay; a list pins every entry of `relay_counts`
//! to its length.

use std::fs;
use std::path::{Path, PathBuf};

use cogrelay::model::{db_to_linear, MAX_RELAYS};
use cogrelay::{ChannelVariances, Scheme, SystemParams};
use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_GAMMA_S_DB: [f64; 7] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
pub const DEFAULT_SENSING_PAIRS: [(f64, f64); 2] = [(0.95, 0.05), (0.65, 0.35)];
pub const DEFAULT_RELAYS: usize = 6;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PerRelay {
    Shared(f64),
    Each(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseFile {
    pub p0: Option<f64>,
    pub gamma_p_db: Option<f64>,
    pub rate: Option<f64>,
    pub sigma2_si: Option<PerRelay>,
    pub sigma2_pi: Option<PerRelay>,
    pub sigma2_d: Option<f64>,
    pub sigma2_pd: Option<f64>,
    pub sigma2_sd: Option<f64>,
}

/// On-disk layout of a sweep configuration.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub gamma_s_db: Option<Vec<f64>>,
    pub schemes: Option<Vec<String>>,
    pub sensing_pairs: Option<Vec<(f64, f64)>>,
    pub relay_counts: Option<Vec<usize>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub base: Option<BaseFile>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub gamma_s_db: Option<Vec<f64>>,
    pub schemes: Option<Vec<Scheme>>,
    pub pd: Option<f64>,
    pub pf: Option<f64>,
    pub n_relays: Option<Vec<usize>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// A validated experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Sorted, deduplicated.
    pub gamma_s_db: Vec<f64>,
    /// Sorted by name, deduplicated.
    pub schemes: Vec<Scheme>,
    /// Sorted, deduplicated.
    pub sensing_pairs: Vec<(f64, f64)>,
    /// Sorted, deduplicated.
    pub relay_counts: Vec<usize>,
    /// Monte Carlo trials per grid point; 0 skips simulation.
    pub trials: u64,
    pub seed: u64,
    /// Everything not swept. Its `pd`, `pf`, `gamma_s` and `n_relays` are
    /// replaced per grid point.
    pub base: SystemParams,
}

impl SweepSpec {
    /// System parameters at one grid point.
    pub fn point(&self, pd: f64, pf: f64, n_relays: usize, gamma_s_db: f64) -> SystemParams {
        let mut p = self.base.clone();
        p.pd = pd;
        p.pf = pf;
        p.gamma_s = db_to_linear(gamma_s_db);
        if p.n_relays != n_relays {
            // Heterogeneous lists are pinned to their length during validation.
            p = p.with_relays(n_relays).expect("validated homogeneous relays");
        }
        p
    }
}

pub fn parse_config(text: &str, path: &Path) -> Result<ConfigFile, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Reads, merges and validates a configuration file.
pub fn load_config(path: &Path) -> Result<SweepSpec, ConfigError> {
    build_spec(Some(read_config(path)?), &Overrides::default())
}

pub fn read_config(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text, path)
}

fn sorted_unique(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Merges file values, overrides and defaults into a validated spec.
pub fn build_spec(file: Option<ConfigFile>, ov: &Overrides) -> Result<SweepSpec, ConfigError> {
    let file = file.unwrap_or_default();
    let base_file = file.base.unwrap_or_default();

    let gamma_s_db = ov
        .gamma_s_db
        .clone()
        .or(file.gamma_s_db)
        .unwrap_or_else(|| DEFAULT_GAMMA_S_DB.to_vec());
    if gamma_s_db.is_empty() {
        return Err(invalid("gamma_s_db", "sweep axis is empty"));
    }
    if let Some(x) = gamma_s_db.iter().find(|x| !x.is_finite()) {
        return Err(invalid("gamma_s_db", format!("{x} is not a finite dB value")));
    }
    let gamma_s_db = sorted_unique(gamma_s_db);

    let mut schemes = match (&ov.schemes, file.schemes) {
        (Some(s), _) => s.clone(),
        (None, Some(names)) => names
            .iter()
            .map(|n| n.parse::<Scheme>().map_err(|e| invalid("schemes", e.to_string())))
            .collect::<Result<_, _>>()?,
        (None, None) => Scheme::ALL.to_vec(),
    };
    if schemes.is_empty() {
        return Err(invalid("schemes", "no scheme selected"));
    }
    schemes.sort_by_key(|s| s.name());
    schemes.dedup();

    let mut sensing_pairs = match (ov.pd, ov.pf) {
        (Some(pd), Some(pf)) => vec![(pd, pf)],
        (None, None) => file
            .sensing_pairs
            .unwrap_or_else(|| DEFAULT_SENSING_PAIRS.to_vec()),
        _ => return Err(invalid("pd/pf", "--pd and --pf must be given together")),
    };
    if sensing_pairs.is_empty() {
        return Err(invalid("sensing_pairs", "no (pd, pf) pair given"));
    }
    for (i, &(pd, pf)) in sensing_pairs.iter().enumerate() {
        for (name, p) in [("pd", pd), ("pf", pf)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(
                    format!("sensing_pairs[{i}].{name}"),
                    format!("{p} is not a probability"),
                ));
            }
        }
    }
    sensing_pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    sensing_pairs.dedup();

    let per_relay_len = [&base_file.sigma2_si, &base_file.sigma2_pi]
        .into_iter()
        .flatten()
        .find_map(|v| match v {
            PerRelay::Each(list) => Some(list.len()),
            PerRelay::Shared(_) => None,
        });
    let mut relay_counts = ov
        .n_relays
        .clone()
        .or(file.relay_counts)
        .unwrap_or_else(|| vec![per_relay_len.unwrap_or(DEFAULT_RELAYS)]);
    if relay_counts.is_empty() {
        return Err(invalid("relay_counts", "no relay count given"));
    }
    for &n in &relay_counts {
        if n == 0 || n > MAX_RELAYS {
            return Err(invalid(
                "relay_counts",
                format!(
                    "N = {n} outside 1..={MAX_RELAYS}; the closed form enumerates 2^N - 1 decoding sets"
                ),
            ));
        }
        if let Some(len) = per_relay_len {
            if n != len {
                return Err(invalid(
                    "relay_counts",
                    format!("N = {n} does not match the {len} per-relay variances given"),
                ));
            }
        }
    }
    relay_counts.sort_unstable();
    relay_counts.dedup();

    let n0 = relay_counts[0];
    let expand = |field: &str, v: Option<PerRelay>, default: f64| -> Result<Vec<f64>, ConfigError> {
        match v {
            None => Ok(vec![default; n0]),
            Some(PerRelay::Shared(x)) => Ok(vec![x; n0]),
            Some(PerRelay::Each(list)) if list.len() == n0 => Ok(list),
            Some(PerRelay::Each(list)) => Err(invalid(
                field,
                format!("has {} entries, expected {n0}", list.len()),
            )),
        }
    };
    let variances = ChannelVariances {
        sigma2_si: expand("base.sigma2_si", base_file.sigma2_si, 1.0)?,
        sigma2_pi: expand("base.sigma2_pi", base_file.sigma2_pi, 0.2)?,
        sigma2_d: base_file.sigma2_d.unwrap_or(1.0),
        sigma2_pd: base_file.sigma2_pd.unwrap_or(0.2),
        sigma2_sd: base_file.sigma2_sd.unwrap_or(1.0),
    };
    let gamma_p_db = base_file.gamma_p_db.unwrap_or(10.0);
    if !gamma_p_db.is_finite() {
        return Err(invalid("base.gamma_p_db", format!("{gamma_p_db} is not finite")));
    }
    let base = SystemParams {
        p0: base_file.p0.unwrap_or(0.8),
        pd: sensing_pairs[0].0,
        pf: sensing_pairs[0].1,
        gamma_s: db_to_linear(gamma_s_db[0]),
        gamma_p: db_to_linear(gamma_p_db),
        rate: base_file.rate.unwrap_or(1.0),
        n_relays: n0,
        variances,
    };

    let spec = SweepSpec {
        gamma_s_db,
        schemes,
        sensing_pairs,
        relay_counts,
        trials: ov.trials.or(file.trials).unwrap_or(0),
        seed: ov.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        base,
    };
    // Every grid point must be a valid system; report the first that is not.
    for &(pd, pf) in &spec.sensing_pairs {
        for &n in &spec.relay_counts {
            for &g in &spec.gamma_s_db {
                spec.point(pd, pf, n, g).validate().map_err(|e| {
                    invalid(format!("point (pd={pd}, pf={pf}, N={n}, gamma_s_db={g})"), e.to_string())
                })?;
            }
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_from(json: &str) -> Result<SweepSpec, ConfigError> {
        build_spec(Some(parse_config(json, Path::new("test.json"))?), &Overrides::default())
    }

    #[test]
    fn minimal_config_takes_reference_defaults() {
        let spec = spec_from(r#"{"gamma_s_db": [10, 0]}"#).unwrap();
        assert_eq!(spec.gamma_s_db, vec![0.0, 10.0]);
        assert_eq!(spec.relay_counts, vec![6]);
        assert_eq!(spec.sensing_pairs, vec![(0.65, 0.35), (0.95, 0.05)]);
        assert_eq!(spec.schemes, vec![Scheme::BestRelay, Scheme::Direct, Scheme::MultiRelay]);
        assert_eq!(spec.trials, 0);
        let b = &spec.base;
        assert_eq!(b.p0, 0.8);
        assert_eq!(b.gamma_p, 10.0);
        assert_eq!(b.rate, 1.0);
        assert_eq!(b.variances.sigma2_si, vec![1.0; 6]);
        assert_eq!(b.variances.sigma2_pi, vec![0.2; 6]);
        assert_eq!(
            (b.variances.sigma2_d, b.variances.sigma2_pd, b.variances.sigma2_sd),
            (1.0, 0.2, 1.0)
        );
    }

    #[test]
    fn bad_probability_names_the_field() {
        let err = spec_from(r#"{"sensing_pairs": [[0.9, 1.3]]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sensing_pairs[0].pf"), "{msg}");
    }

    #[test]
    fn relay_cap_is_explained() {
        let err = spec_from(r#"{"relay_counts": [30]}"#).unwrap_err();
        assert!(err.to_string().contains("2^N"), "{err}");
    }

    #[test]
    fn unknown_keys_and_syntax_errors_are_located() {
        let err = spec_from("{\n  \"gamma_s_db\": [0],\n  \"colour\": 1\n}").unwrap_err();
        match err {
            ConfigError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(spec_from("{\"trials\": }"), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn overrides_win() {
        let file = parse_config(
            r#"{"gamma_s_db": [0], "trials": 5, "seed": 3, "relay_counts": [2]}"#,
            Path::new("x"),
        )
        .unwrap();
        let ov = Overrides {
            gamma_s_db: Some(vec![20.0]),
            schemes: Some(vec![Scheme::MultiRelay]),
            pd: Some(0.9),
            pf: Some(0.1),
            n_relays: Some(vec![4, 6]),
            trials: Some(100),
            seed: Some(9),
        };
        let spec = build_spec(Some(file), &ov).unwrap();
        assert_eq!(spec.gamma_s_db, vec![20.0]);
        assert_eq!(spec.schemes, vec![Scheme::MultiRelay]);
        assert_eq!(spec.sensing_pairs, vec![(0.9, 0.1)]);
        assert_eq!(spec.relay_counts, vec![4, 6]);
        assert_eq!((spec.trials, spec.seed), (100, 9));

        let half = Overrides { pd: Some(0.9), ..Overrides::default() };
        assert!(build_spec(None, &half).is_err());
    }

    #[test]
    fn per_relay_lists_pin_relay_count() {
        let spec = spec_from(r#"{"base": {"sigma2_si": [1, 2, 3]}}"#).unwrap();
        assert_eq!(spec.relay_counts, vec![3]);
        assert_eq!(spec.base.variances.sigma2_pi, vec![0.2; 3]);
        assert!(spec_from(r#"{"relay_counts": [4], "base": {"sigma2_si": [1, 2, 3]}}"#).is_err());
    }

    #[test]
    fn degenerate_sensing_is_rejected() {
        let err = spec_from(r#"{"sensing_pairs": [[0, 0]]}"#).unwrap_err();
        assert!(err.to_string().contains("never declares a hole"), "{err}");
    }

    #[test]
    fn empty_axis_is_rejected() {
        assert!(spec_from(r#"{"gamma_s_db": []}"#).is_err());
        assert!(spec_from(r#"{"schemes": ["relay"]}"#).is_err());
    }
}

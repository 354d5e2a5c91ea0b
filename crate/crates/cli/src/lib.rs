//! Library side of the `cogrelay` command: configuration, sweeps, CSV
//! output and the analytic-vs-simulation validation report.

pub mod config;
pub mod sweep;
pub mod validate;

pub use config::{build_spec, load_config, ConfigError, Overrides, SweepSpec};
pub use sweep::{run_sweep, write_sweep_csv, SweepRow, CSV_HEADER};
pub use validate::{check_rows, validate, ValidationReport};

/// Note printed with single-point and sweep output.
pub const RATE_CONVENTION: &str = "direct transmission uses one time slot, outage threshold \
(2^R - 1)/gamma_s; relayed schemes use two slots, threshold (2^(2R) - 1)/gamma_s";

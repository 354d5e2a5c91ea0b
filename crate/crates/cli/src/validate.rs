//! Closed form vs. simulation agreement report.

use std::fmt;

use anyhow::bail;

use crate::config::SweepSpec;
use crate::sweep::{format_float, run_sweep, SweepRow};

/// Fewest trials per point for which the normal approximation behind the
/// z-score is trusted.
pub const MIN_TRIALS: u64 = 10_000;

/// A point fails when its z-score exceeds this.
pub const Z_LIMIT: f64 = 3.0;

/// The report passes when strictly fewer than this fraction of points fail.
pub const MAX_FAILING_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct PointCheck {
    pub row: SweepRow,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub points: Vec<PointCheck>,
    pub max_z: f64,
    pub exceeding: usize,
    pub pass: bool,
}

impl ValidationReport {
    pub fn offenders(&self) -> impl Iterator<Item = &PointCheck> {
        self.points.iter().filter(|p| p.z > Z_LIMIT)
    }
}

/// `|analytic - p_hat| / stderr`.
///
/// When every trial agreed (`p_hat` is 0 or 1) the empirical standard error is
/// zero; the binomial standard error implied by the analytic value is used
/// instead, so a point is only flagged when the closed form predicts outcomes
/// the simulation should have seen.
pub fn z_score(row: &SweepRow) -> Option<f64> {
    let mc = row.mc.as_ref()?;
    let diff = (row.analytic - mc.p_hat).abs();
    let mut se = mc.stderr;
    if se == 0.0 {
        let a = row.analytic.clamp(0.0, 1.0);
        se = (a * (1.0 - a) / mc.trials as f64).sqrt();
    }
    Some(if diff == 0.0 {
        0.0
    } else if se == 0.0 {
        f64::INFINITY
    } else {
        diff / se
    })
}

/// Scores rows that carry Monte Carlo estimates; rows without one are skipped.
pub fn check_rows(rows: &[SweepRow]) -> ValidationReport {
    let points: Vec<PointCheck> = rows
        .iter()
        .filter_map(|row| z_score(row).map(|z| PointCheck { row: row.clone(), z }))
        .collect();
    let max_z = points.iter().map(|p| p.z).fold(0.0, f64::max);
    let exceeding = points.iter().filter(|p| p.z > Z_LIMIT).count();
    let pass = !points.is_empty() && (exceeding as f64) < MAX_FAILING_FRACTION * points.len() as f64;
    ValidationReport { points, max_z, exceeding, pass }
}

/// Runs the sweep with simulation and scores every grid point.
pub fn validate(spec: &SweepSpec, workers: usize) -> anyhow::Result<ValidationReport> {
    if spec.trials < MIN_TRIALS {
        bail!(
            "validate needs at least {MIN_TRIALS} trials per point (got {}); pass --trials {MIN_TRIALS} or more",
            spec.trials
        );
    }
    let rows = run_sweep(spec, workers, |_| Ok(()))?;
    Ok(check_rows(&rows))
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points: {}", self.points.len())?;
        writeln!(f, "max_z: {}", format_float(self.max_z))?;
        writeln!(f, "points_over_z{Z_LIMIT}: {}", self.exceeding)?;
        for p in self.offenders() {
            let r = &p.row;
            let mc = r.mc.as_ref().expect("scored rows carry estimates");
            writeln!(
                f,
                "  offender scheme={} n_relays={} pd={} pf={} gamma_s_db={} analytic={} mc={} stderr={} z={}",
                r.scheme,
                r.n_relays,
                format_float(r.pd),
                format_float(r.pf),
                format_float(r.gamma_s_db),
                format_float(r.analytic),
                format_float(mc.p_hat),
                format_float(mc.stderr),
                format_float(p.z),
            )?;
        }
        write!(f, "result: {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

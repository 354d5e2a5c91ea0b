//! Grid evaluation and CSV output.

use std::collections::HashMap;
use std::io::Write;

use cogrelay::analytic;
use cogrelay::montecarlo::{simulate, Tally};
use cogrelay::{OutageEstimate, Scheme};

use crate::config::SweepSpec;

/// Frozen CSV column order.
pub const CSV_HEADER: [&str; 10] = [
    "scheme",
    "n_relays",
    "pd",
    "pf",
    "gamma_s_db",
    "analytic_outage",
    "mc_outage",
    "mc_stderr",
    "trials",
    "seed",
];

/// One grid point of one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub n_relays: usize,
    pub pd: f64,
    pub pf: f64,
    pub gamma_s_db: f64,
    pub analytic: f64,
    /// `None` when the sweep runs without simulation.
    pub mc: Option<OutageEstimate>,
}

impl SweepRow {
    pub fn csv_record(&self, seed: u64) -> [String; 10] {
        let (mc, se, trials) = match &self.mc {
            Some(e) => (format_float(e.p_hat), format_float(e.stderr), e.trials.to_string()),
            None => (String::new(), String::new(), "0".to_string()),
        };
        [
            self.scheme.name().to_string(),
            self.n_relays.to_string(),
            format_float(self.pd),
            format_float(self.pf),
            format_float(self.gamma_s_db),
            format_float(self.analytic),
            mc,
            se,
            trials,
            seed.to_string(),
        ]
    }
}

/// Formats with 10 significant digits in the style of C's `%.10g`: fixed
/// notation for decimal exponents in `-5..10`, scientific otherwise, with
/// trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Evaluates the grid in lexicographic order of
/// `(scheme name, (pd, pf), N, gamma_s_db)`, handing each row to `emit` as
/// soon as it is ready.
///
/// Monte Carlo runs once per `(pd, pf, N, gamma_s)` point and scores every
/// scheme on the same sample paths; later schemes reuse the cached tally.
pub fn run_sweep<F>(spec: &SweepSpec, workers: usize, mut emit: F) -> anyhow::Result<Vec<SweepRow>>
where
    F: FnMut(&SweepRow) -> anyhow::Result<()>,
{
    let mut tallies: HashMap<(usize, usize, usize), Tally> = HashMap::new();
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        for (pi, &(pd, pf)) in spec.sensing_pairs.iter().enumerate() {
            for (ni, &n) in spec.relay_counts.iter().enumerate() {
                for (gi, &g) in spec.gamma_s_db.iter().enumerate() {
                    let params = spec.point(pd, pf, n, g);
                    let analytic = analytic::outage(&params, scheme)?.total;
                    let mc = if spec.trials > 0 {
                        let tally = match tallies.entry((pi, ni, gi)) {
                            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                            std::collections::hash_map::Entry::Vacant(e) => {
                                e.insert(simulate(&params, spec.trials, spec.seed, workers)?)
                            }
                        };
                        Some(tally.estimate(scheme, spec.seed))
                    } else {
                        None
                    };
                    let row = SweepRow { scheme, n_relays: n, pd, pf, gamma_s_db: g, analytic, mc };
                    emit(&row)?;
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

/// Runs the sweep and streams CSV to `out`, flushing after every row.
pub fn write_sweep_csv<W: Write>(
    spec: &SweepSpec,
    workers: usize,
    out: W,
) -> anyhow::Result<Vec<SweepRow>> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    writer.flush()?;
    run_sweep(spec, workers, |row| {
        writer.write_record(row.csv_record(spec.seed))?;
        writer.flush()?;
        Ok(())
    })
}

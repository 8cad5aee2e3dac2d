//! CSV output. Reals are written as `{:.16e}`, which round-trips every
//! `f64` exactly; missing values are empty fields.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use covert_core::analytic::{bob_threshold, f_m, willie_threshold};
use covert_core::Probability;

use crate::error::HarnessError;
use crate::rows::{EmpiricalColumns, PowerSource, RateColumns, ResultRow};

pub const COLUMNS: [&str; 40] = [
    "n_total",
    "n_rs",
    "alpha",
    "m_antennas",
    "noise_power",
    "tx_power",
    "snr",
    "p_fa",
    "p_md",
    "eta_b",
    "eta_w",
    "power_source",
    "bob_fap",
    "bob_mdp",
    "bob_mdp_scaled",
    "bob_exact_fap",
    "bob_exact_mdp",
    "willie_fap",
    "willie_exact_fap",
    "willie_dp",
    "willie_dp_design",
    "willie_dp_taylor",
    "willie_dp_asymptotic",
    "emp_bob_fap",
    "emp_bob_fap_ci_low",
    "emp_bob_fap_ci_high",
    "emp_bob_mdp",
    "emp_bob_mdp_ci_low",
    "emp_bob_mdp_ci_high",
    "emp_willie_fap",
    "emp_willie_fap_ci_low",
    "emp_willie_fap_ci_high",
    "emp_willie_dp",
    "emp_willie_dp_ci_low",
    "emp_willie_dp_ci_high",
    "trials",
    "seed",
    "confidence",
    "error",
    "schema",
];

/// Bumped whenever the column set changes.
pub const SCHEMA_VERSION: u32 = 1;

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

fn opt_int<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn record(row: &ResultRow) -> Vec<String> {
    let mut out = vec![
        row.n_total.to_string(),
        opt_int(row.n_rs),
        real(row.alpha),
        row.m_antennas.to_string(),
        real(row.noise_power),
        opt_real(row.tx_power),
        opt_real(row.snr),
        real(row.p_fa),
        real(row.p_md),
        opt_real(row.eta_b),
        opt_real(row.eta_w),
        row.power_source.to_string(),
        opt_real(row.bob_fap),
        opt_real(row.bob_mdp),
        opt_real(row.bob_mdp_scaled),
        opt_real(row.bob_exact_fap),
        opt_real(row.bob_exact_mdp),
        opt_real(row.willie_fap),
        opt_real(row.willie_exact_fap),
        opt_real(row.willie_dp),
        opt_real(row.willie_dp_design),
        opt_real(row.willie_dp_taylor),
        opt_real(row.willie_dp_asymptotic),
    ];
    let e = row.empirical.as_ref();
    let rates: [fn(&EmpiricalColumns) -> RateColumns; 4] = [|c| c.bob_fap, |c| c.bob_mdp, |c| c.willie_fap, |c| c.willie_dp];
    for rate in rates {
        let r = e.map(rate);
        out.push(opt_real(r.map(|r| r.estimate)));
        out.push(opt_real(r.map(|r| r.ci_low)));
        out.push(opt_real(r.map(|r| r.ci_high)));
    }
    out.push(opt_int(e.map(|c| c.trials)));
    out.push(opt_int(e.map(|c| c.seed)));
    out.push(opt_real(e.map(|c| c.confidence)));
    out.push(row.error.clone().unwrap_or_default());
    out.push(SCHEMA_VERSION.to_string());
    out
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: "<csv>".into(), source })?;
    Ok(())
}

/// Re-checks the stored thresholds and, for designed power, that the
/// receiver's miss target is met, then writes to `path` or stdout.
pub fn emit_csv(rows: &[ResultRow], path: Option<&Path>) -> Result<(), HarnessError> {
    verify_rows(rows)?;
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|source| HarnessError::Io { path: p.to_path_buf(), source })?;
            write_csv(rows, io::BufWriter::new(f))
        }
        None => write_csv(rows, io::stdout().lock()),
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Invariants every successfully evaluated row must satisfy.
pub fn verify_rows(rows: &[ResultRow]) -> Result<(), HarnessError> {
    for (i, row) in rows.iter().enumerate() {
        if row.error.is_some() {
            continue;
        }
        let bad = |what: String| HarnessError::Invariant(format!("row {i}: {what}"));
        let (Some(n_rs), Some(eta_b), Some(eta_w), Some(snr)) = (row.n_rs, row.eta_b, row.eta_w, row.snr) else {
            return Err(bad("incomplete row without an error".into()));
        };
        let p_fa = Probability::open(row.p_fa).map_err(|e| bad(e.to_string()))?;
        let expect_b = bob_threshold(p_fa, row.m_antennas, n_rs)?.eta;
        if !close(eta_b, expect_b, 1e-12) {
            return Err(bad(format!("eta_b {eta_b} differs from {expect_b}")));
        }
        let expect_w = willie_threshold(p_fa, row.m_antennas, row.n_total)?;
        if !close(eta_w, expect_w, 1e-12) {
            return Err(bad(format!("eta_w {eta_w} differs from {expect_w}")));
        }
        if row.power_source == PowerSource::Design {
            let md = f_m(1.0 / (snr * f64::from(n_rs)), row.m_antennas, p_fa)?.get();
            if (md - row.p_md).abs() > 1e-6 {
                return Err(bad(format!("designed power gives miss probability {md}, target {}", row.p_md)));
            }
        }
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(s: &str, col: &str) -> Result<Option<T>, HarnessError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| HarnessError::Config(format!("column {col}: cannot parse {s:?}")))
}

fn required<T: std::str::FromStr>(s: &str, col: &str) -> Result<T, HarnessError> {
    parse_field(s, col)?.ok_or_else(|| HarnessError::Config(format!("column {col} is empty")))
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(COLUMNS) {
        return Err(HarnessError::Config("unexpected csv header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |name: &str| -> &str {
            let i = COLUMNS.iter().position(|c| *c == name).expect("known column");
            rec.get(i).unwrap_or("")
        };
        let opt = |name: &str| parse_field::<f64>(field(name), name);
        let req_f = |name: &str| required::<f64>(field(name), name);
        let rate = |prefix: &str| -> Result<Option<RateColumns>, HarnessError> {
            let est = opt(prefix)?;
            let lo = opt(&format!("{prefix}_ci_low"))?;
            let hi = opt(&format!("{prefix}_ci_high"))?;
            Ok(match (est, lo, hi) {
                (Some(estimate), Some(ci_low), Some(ci_high)) => Some(RateColumns { estimate, ci_low, ci_high }),
                _ => None,
            })
        };
        let empirical = match (rate("emp_bob_fap")?, rate("emp_bob_mdp")?, rate("emp_willie_fap")?, rate("emp_willie_dp")?) {
            (Some(bob_fap), Some(bob_mdp), Some(willie_fap), Some(willie_dp)) => Some(EmpiricalColumns {
                bob_fap,
                bob_mdp,
                willie_fap,
                willie_dp,
                trials: required(field("trials"), "trials")?,
                seed: required(field("seed"), "seed")?,
                confidence: req_f("confidence")?,
            }),
            _ => None,
        };
        rows.push(ResultRow {
            n_total: required(field("n_total"), "n_total")?,
            n_rs: parse_field(field("n_rs"), "n_rs")?,
            alpha: req_f("alpha")?,
            m_antennas: required(field("m_antennas"), "m_antennas")?,
            noise_power: req_f("noise_power")?,
            tx_power: opt("tx_power")?,
            snr: opt("snr")?,
            p_fa: req_f("p_fa")?,
            p_md: req_f("p_md")?,
            eta_b: opt("eta_b")?,
            eta_w: opt("eta_w")?,
            power_source: field("power_source").parse()?,
            bob_fap: opt("bob_fap")?,
            bob_mdp: opt("bob_mdp")?,
            bob_mdp_scaled: opt("bob_mdp_scaled")?,
            bob_exact_fap: opt("bob_exact_fap")?,
            bob_exact_mdp: opt("bob_exact_mdp")?,
            willie_fap: opt("willie_fap")?,
            willie_exact_fap: opt("willie_exact_fap")?,
            willie_dp: opt("willie_dp")?,
            willie_dp_design: opt("willie_dp_design")?,
            willie_dp_taylor: opt("willie_dp_taylor")?,
            willie_dp_asymptotic: opt("willie_dp_asymptotic")?,
            empirical,
            error: Some(field("error").to_owned()).filter(|s| !s.is_empty()),
        });
    }
    Ok(rows)
}

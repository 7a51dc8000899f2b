//! The five subcommands. Each builds its full output as a string first so
//! a run either writes a complete file or nothing.

use std::io::Write;
use std::path::Path;

use marc_dmt::codeword_sim::{error_rate, run_trial, ProtocolMode, SimConfig};
use marc_dmt::dmt;
use marc_dmt::dmt::SlotConfig;
use marc_dmt::oracle;
use marc_dmt::outage_mc::{estimate_pout, fit_diversity, McConfig};
use marc_dmt::piecewise::{sample_to_table, DmtCurve};
use marc_dmt::{Error, ExtReal};

use crate::fmt::{ext, sig6};
use crate::UsageError;

fn lib_err(e: Error) -> UsageError {
    UsageError(e.to_string())
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), UsageError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| UsageError(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Builds the labelled curve set for a protocol.
fn protocol_curves(protocol: &str, m_list: &[usize]) -> Result<Vec<(String, DmtCurve)>, UsageError> {
    match protocol {
        "ddf_infinite" => Ok(vec![("d".to_string(), dmt::ddf_infinite_curve())]),
        "maf" => Ok(vec![("d".to_string(), dmt::maf_curve())]),
        "ddf_finite" => m_list
            .iter()
            .map(|&m| Ok((format!("d_M{m}"), dmt::ddf_finite_curve(m).map_err(lib_err)?)))
            .collect(),
        "hdaf" => m_list
            .iter()
            .map(|&m| Ok((format!("d_M{m}"), dmt::hdaf_curve(m).map_err(lib_err)?)))
            .collect(),
        "hdaf_modified" => m_list
            .iter()
            .map(|&m| {
                Ok((format!("d_M{m}"), dmt::hdaf_modified_curve(m).map_err(lib_err)?))
            })
            .collect(),
        other => Err(UsageError(format!(
            "unknown protocol '{other}' (expected ddf_finite, ddf_infinite, maf, hdaf, hdaf_modified)"
        ))),
    }
}

fn curves_to_csv(curves: &[(String, DmtCurve)], samples: usize) -> Result<String, UsageError> {
    // union of every curve's sample grid, so each row carries all columns
    let mut rs: Vec<f64> = Vec::new();
    for (_, c) in curves {
        for (r, _) in sample_to_table(c, samples).map_err(lib_err)? {
            rs.push(r);
        }
    }
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let mut out = String::from("r");
    for (name, _) in curves {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for &r in &rs {
        out.push_str(&sig6(r));
        for (_, c) in curves {
            out.push(',');
            out.push_str(&ext(&c.eval(r).map_err(lib_err)?));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_curve(
    protocol: &str,
    m_list: &[usize],
    samples: usize,
    out: Option<&Path>,
) -> Result<i32, UsageError> {
    if samples < 2 {
        return Err(UsageError(format!("need samples >= 2, got {samples}")));
    }
    let curves = protocol_curves(protocol, m_list)?;
    let csv = curves_to_csv(&curves, samples)?;
    write_output(out, &csv)?;
    Ok(0)
}

pub fn cmd_fig2(samples: usize, out: Option<&Path>) -> Result<i32, UsageError> {
    if samples < 2 {
        return Err(UsageError(format!("need samples >= 2, got {samples}")));
    }
    let mut curves = protocol_curves("ddf_finite", &[2, 5, 10, 20])?;
    curves.push(("d_inf".to_string(), dmt::ddf_infinite_curve()));
    let csv = curves_to_csv(&curves, samples)?;
    write_output(out, &csv)?;
    Ok(0)
}

struct VerifyRow {
    check: &'static str,
    m: usize,
    big_m: usize,
    r: f64,
    closed: ExtReal,
    oracle: ExtReal,
    slack: f64,
    pass: bool,
}

impl VerifyRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}\n",
            self.check,
            self.m,
            self.big_m,
            sig6(self.r),
            ext(&self.closed),
            ext(&self.oracle),
            sig6(self.slack),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Equality check: oracle approximates the closed form within slack,
/// infinities matching exactly.
fn matches_within(oracle: &ExtReal, closed: &ExtReal, slack: f64) -> bool {
    match (oracle.value(), closed.value()) {
        (Some(o), Some(c)) => (o - c).abs() <= slack,
        (None, None) => true,
        _ => false,
    }
}

/// One-sided check: oracle at least the target minus slack (an infinite
/// oracle certifies trivially; a finite oracle cannot meet an infinite
/// target).
fn at_least(oracle: &ExtReal, target: &ExtReal, slack: f64) -> bool {
    match (oracle.value(), target.value()) {
        (Some(o), Some(t)) => o >= t - slack,
        (None, _) => true,
        (Some(_), None) => false,
    }
}

pub struct VerifyParams {
    pub m_list: Vec<usize>,
    pub r_step: f64,
    pub oracle_step: f64,
    pub certify_step: f64,
    pub corrupt: bool,
}

pub fn cmd_verify(params: &VerifyParams, out: Option<&Path>) -> Result<i32, UsageError> {
    if params.certify_step > 0.05 {
        return Err(UsageError(format!(
            "certification checks need step <= 0.05, got {}",
            params.certify_step
        )));
    }
    if params.r_step <= 0.0 || params.r_step > 0.5 {
        return Err(UsageError(format!("bad r step {}", params.r_step)));
    }
    let r_grid: Vec<f64> = {
        let mut v = Vec::new();
        let mut k = 0u32;
        loop {
            let r = params.r_step * k as f64;
            if r > 1.0 + 1e-9 {
                break;
            }
            v.push(r.min(1.0));
            k += 1;
        }
        v
    };
    let mut rows: Vec<VerifyRow> = Vec::new();

    let formula_slack = 3.0 * params.oracle_step * 5.0;
    for &big_m in &params.m_list {
        for m in 1..=big_m {
            for &r in &r_grid {
                let mut closed = dmt::d_relay_decision(m, big_m, r);
                if params.corrupt && m == 1 && r == 0.0 {
                    closed = closed + ExtReal::finite(10.0 * formula_slack);
                }
                let orac = oracle::relay_exponent_oracle(m, big_m, r, params.oracle_step);
                rows.push(VerifyRow {
                    check: "relay_decision",
                    m,
                    big_m,
                    r,
                    pass: matches_within(&orac, &closed, formula_slack),
                    closed,
                    oracle: orac,
                    slack: formula_slack,
                });
                let closed = dmt::d_dest_outage(m, big_m, r);
                let orac = oracle::dest_exponent_oracle(m, big_m, r, params.oracle_step);
                rows.push(VerifyRow {
                    check: "dest_outage",
                    m,
                    big_m,
                    r,
                    pass: matches_within(&orac, &closed, formula_slack),
                    closed,
                    oracle: orac,
                    slack: formula_slack,
                });
            }
        }
    }

    let certify_slack = 3.0 * params.certify_step * 5.0;
    for &big_m in &params.m_list {
        for m in 2..=big_m {
            for &r in &r_grid {
                let target = dmt::d_relay_decision(m, big_m, r) + dmt::d_dest_outage(m, big_m, r);
                for (check, which) in [
                    ("correlated_both", oracle::WrongPair::Both),
                    ("correlated_single", oracle::WrongPair::Single),
                ] {
                    let orac = oracle::correlated_error_exponent(
                        m,
                        big_m,
                        r,
                        4,
                        which,
                        params.certify_step,
                    )
                    .map_err(lib_err)?;
                    rows.push(VerifyRow {
                        check,
                        m,
                        big_m,
                        r,
                        pass: at_least(&orac, &target, certify_slack),
                        closed: target,
                        oracle: orac,
                        slack: certify_slack,
                    });
                }
            }
        }
    }

    // hybrid fallback exponents on r in [0, 1/2]
    let mut r: f64 = 0.0;
    while r <= 0.5 + 1e-9 {
        let c = oracle::hybrid_fallback_exponents(r.min(0.5), 4, params.certify_step).map_err(lib_err)?;
        let bound = ExtReal::finite(2.0 - r);
        for (check, orac) in [
            ("hybrid_pe1", c.d_pe1),
            ("hybrid_pe12", c.d_pe12),
            ("hybrid_k", c.d_k),
        ] {
            rows.push(VerifyRow {
                check,
                m: 0,
                big_m: 0,
                r,
                pass: at_least(&orac, &bound, certify_slack),
                closed: bound,
                oracle: orac,
                slack: certify_slack,
            });
        }
        r += 0.05;
    }

    let mut csv = String::from("check,m,M,r,closed_form,oracle,slack,status\n");
    let mut failures = 0usize;
    for row in &rows {
        if !row.pass {
            failures += 1;
        }
        csv.push_str(&row.csv_line());
    }
    csv.push_str(&format!("# checks={} failures={failures}\n", rows.len()));
    write_output(out, &csv)?;
    if failures > 0 {
        eprintln!("verification failed: {failures} of {} checks", rows.len());
        Ok(1)
    } else {
        Ok(0)
    }
}

pub struct OutageParams {
    pub slots: usize,
    pub r: f64,
    pub snr_db_list: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub offset_db: f64,
    pub window: Option<(f64, f64)>,
}

pub fn cmd_outage(params: &OutageParams, out: Option<&Path>) -> Result<i32, UsageError> {
    let config = McConfig {
        slots: params.slots,
        r: params.r,
        snr_db_list: params.snr_db_list.clone(),
        trials_per_snr: params.trials,
        seed: params.seed,
        snr_relay_offset_db: params.offset_db,
    };
    config.validate().map_err(lib_err)?;
    let rows = estimate_pout(&config).map_err(lib_err)?;
    let mut csv = String::from("snr_db,p_out,stderr,n_trials");
    for m in 1..=params.slots {
        csv.push_str(&format!(",m_hist_{m}"));
    }
    csv.push('\n');
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{}",
            sig6(row.snr_db),
            sig6(row.p_out),
            sig6(row.stderr),
            row.n_trials
        ));
        for count in &row.decision_histogram {
            csv.push_str(&format!(",{count}"));
        }
        csv.push('\n');
    }
    let window = params.window.unwrap_or((
        *params.snr_db_list.first().unwrap(),
        *params.snr_db_list.last().unwrap(),
    ));
    match fit_diversity(&rows, window) {
        Ok(fit) => csv.push_str(&format!(
            "# fit slope={} intercept={} residual={} window_db={}:{}\n",
            sig6(fit.slope),
            sig6(fit.intercept),
            sig6(fit.residual),
            sig6(window.0),
            sig6(window.1)
        )),
        Err(e) => csv.push_str(&format!("# fit error={e}\n")),
    }
    write_output(out, &csv)?;
    Ok(0)
}

pub struct SimParams {
    pub mode: ProtocolMode,
    pub slots: usize,
    pub symbols_per_slot: usize,
    pub n_msgs: usize,
    pub r: f64,
    pub mu: f64,
    pub snr_db_list: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub compare_mode: Option<ProtocolMode>,
}

pub fn cmd_sim(params: &SimParams, out: Option<&Path>) -> Result<i32, UsageError> {
    let config = SimConfig {
        mode: params.mode,
        block: SlotConfig::new(params.slots, params.symbols_per_slot).map_err(lib_err)?,
        n_msgs: params.n_msgs,
        r: params.r,
        mu: params.mu,
    };
    config.validate().map_err(lib_err)?;
    let rows = error_rate(&config, &params.snr_db_list, params.trials, params.seed)
        .map_err(lib_err)?;
    let mut csv = String::from("snr_db,p_err,stderr,relay_error_rate,relay_silent_rate,n_trials\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig6(row.snr_db),
            sig6(row.p_err),
            sig6(row.stderr),
            sig6(row.relay_error_rate),
            sig6(row.relay_silent_rate),
            row.n_trials
        ));
    }

    let wrong: u64 = rows.iter().map(|row| row.relay_wrong_trials).sum();
    let wrong_err: u64 = rows.iter().map(|row| row.relay_wrong_and_error_trials).sum();
    let cond = if wrong > 0 {
        sig6(wrong_err as f64 / wrong as f64)
    } else {
        "NA".to_string()
    };
    let mut summary = format!(
        "mode={:?} M={} T={} n={} r={} mu={} snr_points={} trials={} seed={} p_err_first={} p_err_last={} relay_wrong_trials={wrong} err_given_relay_wrong={cond}",
        params.mode,
        params.slots,
        params.symbols_per_slot,
        params.n_msgs,
        params.r,
        params.mu,
        rows.len(),
        params.trials,
        params.seed,
        sig6(rows.first().unwrap().p_err),
        sig6(rows.last().unwrap().p_err),
    );

    if let Some(other_mode) = params.compare_mode {
        let other = SimConfig { mode: other_mode, ..config };
        other.validate().map_err(lib_err)?;
        let mut agree = 0u64;
        let mut total = 0u64;
        for (j, &snr_db) in params.snr_db_list.iter().enumerate() {
            for i in 0..params.trials {
                let sub = marc_dmt::codeword_sim::substream_seed(params.seed, j as u64, i);
                let a = run_trial(&config, snr_db, sub).map_err(lib_err)?;
                let b = run_trial(&other, snr_db, sub).map_err(lib_err)?;
                if a == b {
                    agree += 1;
                }
                total += 1;
            }
        }
        let rate = agree as f64 / total as f64;
        csv.push_str(&format!(
            "# compare mode={:?} agreement_rate={}\n",
            other_mode,
            sig6(rate)
        ));
        summary.push_str(&format!(
            " compare_mode={:?} agreement_rate={}",
            other_mode,
            sig6(rate)
        ));
    }
    write_output(out, &csv)?;
    // the summary goes to stdout when the CSV went to a file, otherwise to
    // stderr so the CSV stream stays clean
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(0)
}

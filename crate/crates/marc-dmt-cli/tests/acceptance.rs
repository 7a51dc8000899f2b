//! Acceptance suite. One test per criterion; each prints a single
//! PASS/FAIL line (visible with `cargo test --test acceptance --
//! --nocapture`).

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use marc_dmt::codeword_sim::{
    glrt_decode, run_trial_detail, substream_seed, ProtocolMode, SimConfig, TrialOptions,
};
use marc_dmt::dmt;
use marc_dmt::dmt::SlotConfig;
use marc_dmt::oracle;

fn criterion<F: FnOnce() + UnwindSafe>(n: usize, name: &str, body: F) {
    let result = catch_unwind(body);
    println!(
        "criterion {n} ({name}): {}",
        if result.is_ok() { "PASS" } else { "FAIL" }
    );
    if let Err(e) = result {
        resume_unwind(e);
    }
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_marc-dmt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bin_with_threads(args: &[&str], threads: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_marc-dmt"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .output()
        .expect("binary runs")
}

fn parse_csv_table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|f| {
                    if f == "INF" {
                        f64::INFINITY
                    } else {
                        f.parse().unwrap()
                    }
                })
                .collect()
        })
        .collect();
    (header, rows)
}

fn fin(x: marc_dmt::ExtReal) -> f64 {
    x.value().expect("finite exponent expected")
}

#[test]
fn criterion_1_finite_m_curves() {
    criterion(1, "finite-M curve family", || {
        let start = Instant::now();
        let out = bin(&[
            "curve", "--protocol", "ddf_finite", "--M", "2,5,10,20", "--samples", "201",
        ]);
        let elapsed = start.elapsed();
        assert!(out.status.success());
        assert!(
            elapsed < Duration::from_secs(1),
            "curve generation took {elapsed:?}, budget 1 s"
        );
        let text = String::from_utf8_lossy(&out.stdout);
        let (header, rows) = parse_csv_table(&text);
        assert_eq!(header, vec!["r", "d_M2", "d_M5", "d_M10", "d_M20"]);

        // d(0) = 2 for every M
        assert_eq!(rows[0][0], 0.0);
        for v in &rows[0][1..] {
            assert!((v - 2.0).abs() <= 1e-9, "d(0) = {v}");
        }

        // pointwise nondecreasing in M at every sampled r
        for row in &rows {
            for k in 1..row.len() - 1 {
                assert!(
                    row[k] <= row[k + 1] + 1e-12,
                    "not nondecreasing in M at r={}: {row:?}",
                    row[0]
                );
            }
        }

        // convergence to the infinite-M limit: the M=20 deviation beats
        // the M=2 deviation by at least 3x on r in [0.05, 0.95]
        let mut dev2: f64 = 0.0;
        let mut dev20: f64 = 0.0;
        for row in &rows {
            let r = row[0];
            if !(0.05..=0.95).contains(&r) {
                continue;
            }
            let limit = fin(dmt::d_ddf_infinite(r));
            dev2 = dev2.max((limit - row[1]).abs());
            dev20 = dev20.max((limit - row[4]).abs());
        }
        assert!(
            dev2 >= 3.0 * dev20,
            "convergence factor {} below 3 (dev2={dev2}, dev20={dev20})",
            dev2 / dev20
        );
    });
}

#[test]
fn criterion_2_endpoint_identities() {
    criterion(2, "endpoint identities", || {
        let tol = 1e-9;
        for (r, want) in [(0.0, 2.0), (0.5, 1.5), (2.0 / 3.0, 1.0), (1.0, 0.0)] {
            assert!((fin(dmt::d_ddf_infinite(r)) - want).abs() <= tol);
        }
        for (r, want) in [(0.0, 2.0), (2.0 / 3.0, 1.0), (1.0, 0.0)] {
            assert!((fin(dmt::d_maf(r)) - want).abs() <= tol);
        }
        for big_m in [2usize, 4, 20] {
            for i in 0..=100 {
                let r = 0.5 * i as f64 / 100.0;
                let v = fin(dmt::d_hdaf(big_m, r).unwrap());
                assert!((v - (2.0 - r)).abs() <= tol, "M={big_m} r={r}: {v}");
            }
            for i in 1..=100 {
                let r = 2.0 / 3.0 + (1.0 / 3.0) * i as f64 / 100.0;
                let v = fin(dmt::d_hdaf(big_m, r).unwrap());
                assert!((v - 3.0 * (1.0 - r)).abs() <= tol, "M={big_m} r={r}: {v}");
            }
        }
    });
}

#[test]
fn criterion_3_oracle_equivalence() {
    criterion(3, "grid oracle matches closed forms", || {
        let start = Instant::now();
        let step = 0.02;
        let tol = 3.0 * step * 5.0;
        for big_m in [2usize, 4, 5] {
            for m in 1..=big_m {
                for i in 0..=10 {
                    let r = i as f64 / 10.0;
                    let pairs = [
                        (
                            oracle::relay_exponent_oracle(m, big_m, r, step),
                            dmt::d_relay_decision(m, big_m, r),
                            "relay",
                        ),
                        (
                            oracle::dest_exponent_oracle(m, big_m, r, step),
                            dmt::d_dest_outage(m, big_m, r),
                            "dest",
                        ),
                    ];
                    for (orac, closed, what) in pairs {
                        match (orac.value(), closed.value()) {
                            (Some(o), Some(c)) => assert!(
                                (o - c).abs() <= tol,
                                "{what} m={m} M={big_m} r={r}: oracle {o} vs closed {c}"
                            ),
                            (None, None) => {}
                            _ => panic!(
                                "{what} m={m} M={big_m} r={r}: INF mismatch {orac:?} vs {closed:?}"
                            ),
                        }
                    }
                }
            }
        }
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(300),
            "oracle sweep took {elapsed:?}, budget 5 min"
        );
    });
}

#[test]
fn criterion_4_inequality_certification() {
    criterion(4, "correlated-term and hybrid certification", || {
        let step = 0.05;
        let slack = 3.0 * step * 5.0;
        for big_m in [2usize, 4] {
            for m in 2..=big_m {
                for i in 0..=10 {
                    let r = i as f64 / 10.0;
                    let target =
                        dmt::d_relay_decision(m, big_m, r) + dmt::d_dest_outage(m, big_m, r);
                    for which in [oracle::WrongPair::Both, oracle::WrongPair::Single] {
                        let v = oracle::correlated_error_exponent(m, big_m, r, 4, which, step)
                            .unwrap();
                        match (v.value(), target.value()) {
                            (Some(v), Some(t)) => assert!(
                                v >= t - slack,
                                "m={m} M={big_m} r={r} {which:?}: {v} < {t} - {slack}"
                            ),
                            (None, _) => {}
                            (Some(v), None) => {
                                panic!("m={m} M={big_m} r={r}: finite {v} vs infinite target")
                            }
                        }
                    }
                }
            }
        }
        for i in 0..=10 {
            let r = i as f64 / 20.0;
            let c = oracle::hybrid_fallback_exponents(r, 4, step).unwrap();
            let floor = 2.0 - r - slack;
            assert!(fin(c.d_pe1) >= floor, "d_pe1 at r={r}");
            assert!(fin(c.d_pe12) >= floor, "d_pe12 at r={r}");
            assert!(fin(c.d_k) >= floor, "d_k at r={r}");
        }
        // the verify command must exit nonzero exactly when a check fails
        let ok = bin(&["verify", "--M", "2,4", "--r-step", "0.25"]);
        assert_eq!(ok.status.code(), Some(0), "verify: {ok:?}");
        let bad = bin(&["verify", "--M", "2", "--r-step", "0.5", "--corrupt"]);
        assert_eq!(bad.status.code(), Some(1), "verify --corrupt: {bad:?}");
    });
}

#[test]
fn criterion_5_modified_hdaf_identity() {
    criterion(5, "modified HDAF equals HDAF exactly", || {
        for big_m in [2usize, 4, 8, 20] {
            for i in 0..=1000 {
                let r = i as f64 / 1000.0;
                let a = dmt::d_hdaf(big_m, r).unwrap();
                let b = dmt::d_hdaf_modified(big_m, r).unwrap();
                assert_eq!(a, b, "M={big_m} r={r}: {a:?} vs {b:?}");
            }
        }
    });
}

fn fitted_slope(output: &str) -> f64 {
    let line = output
        .lines()
        .find(|l| l.starts_with("# fit slope="))
        .expect("fit line present");
    line.split_whitespace()
        .find_map(|tok| tok.strip_prefix("slope="))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn criterion_6_monte_carlo_slopes() {
    criterion(6, "outage Monte Carlo diversity slopes", || {
        let start = Instant::now();
        let out = bin(&[
            "outage", "--M", "2", "--r", "0.2", "--snr", "10:25:3", "--trials", "1000000",
            "--seed", "7",
        ]);
        assert!(out.status.success());
        let slope = fitted_slope(&String::from_utf8_lossy(&out.stdout));
        assert!(
            (1.3..=2.1).contains(&slope),
            "r=0.2 slope {slope} outside 1.7 +- 0.4"
        );

        let out = bin(&[
            "outage", "--M", "2", "--r", "0", "--snr", "10:25:3", "--trials", "1000000",
            "--seed", "7",
        ]);
        assert!(out.status.success());
        let slope = fitted_slope(&String::from_utf8_lossy(&out.stdout));
        assert!(
            (1.6..=2.4).contains(&slope),
            "r=0 slope {slope} outside 2.0 +- 0.4"
        );
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(300),
            "MC sweeps took {elapsed:?}, budget 5 min"
        );
    });
}

#[test]
fn criterion_7_codeword_properties() {
    criterion(7, "codeword-level decoder properties", || {
        let start = Instant::now();
        let config = SimConfig {
            mode: ProtocolMode::Ddf,
            block: SlotConfig::new(2, 4).unwrap(),
            n_msgs: 2,
            r: 0.25,
            mu: 1.0,
        };
        let trials = 10_000u64;
        for (j, &snr_db) in [6.0, 12.0, 20.0].iter().enumerate() {
            let rho = 10f64.powf(snr_db / 10.0);
            let delta = config.mu * rho.ln();
            let mut excursions = [0u64; 2];
            for i in 0..trials {
                let seed = substream_seed(99, j as u64, i);
                let d = run_trial_detail(&config, snr_db, seed, TrialOptions::default()).unwrap();

                // (a) a decoded-but-wrong relay requires the true pair to
                // be outside the sphere, and the recount must be unique
                if d.outcome.relay_decoded {
                    let rc = d.sphere_recount.expect("recount recorded on decode");
                    assert_eq!(rc.pairs_in_sphere, 1, "decode without uniqueness");
                    if !d.outcome.relay_correct {
                        assert!(
                            !rc.true_pair_in_sphere,
                            "wrong forward while the true pair was in the sphere (snr={snr_db}, trial={i})"
                        );
                    }
                }

                // noise excursions per listening depth
                for m in 1..=2usize {
                    let radius = (m * 4) as f64 * (1.0 + d.delta) * d.noise_var;
                    if d.relay_noise_cumsq[m - 1] > radius {
                        excursions[m - 1] += 1;
                    }
                }

                // (c) joint rule at known decision time equals exhaustive
                // maximum likelihood when the relay forwarded the truth
                if d.outcome.relay_correct {
                    let m_true = d.outcome.decision_time.unwrap();
                    let (g1, g2, gr) = d.dest_gains;
                    let (glrt_msg, _) =
                        glrt_decode(&d.dest_rx, g1, g2, gr, &d.books, &[m_true], 4);
                    // independent reference decoder
                    let mut best = (usize::MAX, usize::MAX);
                    let mut best_metric = f64::INFINITY;
                    for c1 in 0..2usize {
                        for c2 in 0..2usize {
                            let x1 = &d.books.user1.entries[c1];
                            let x2 = &d.books.user2.entries[c2];
                            let xr = d.books.relay_entry(c1, c2);
                            let mut metric = 0.0;
                            for k in 0..d.dest_rx.len() {
                                let mut s = g1 * x1[k] + g2 * x2[k];
                                if k >= m_true * 4 {
                                    s += gr * xr[k];
                                }
                                metric += (d.dest_rx[k] - s).norm_sqr();
                            }
                            if metric < best_metric {
                                best_metric = metric;
                                best = (c1, c2);
                            }
                        }
                    }
                    assert_eq!(glrt_msg, best, "joint rule differs from ML (snr={snr_db})");
                }
            }

            // (b) empirical excursion rate under the concentration bound
            for m in 1..=2usize {
                let mt = (m * 4) as f64;
                let bound = (1.0 + delta).powf(mt) * (-mt * delta).exp();
                let rate = excursions[m - 1] as f64 / trials as f64;
                assert!(
                    rate <= bound,
                    "noise excursion rate {rate} above bound {bound} at snr={snr_db}, m={m}"
                );
            }
        }
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(600),
            "codeword properties took {elapsed:?}, budget 10 min"
        );
    });
}

#[test]
fn criterion_8_byte_determinism() {
    criterion(8, "CSV byte determinism across worker counts", || {
        let cases: Vec<Vec<&str>> = vec![
            vec!["curve", "--protocol", "ddf_finite", "--M", "2,5", "--samples", "51"],
            vec!["fig2", "--samples", "21"],
            vec!["verify", "--M", "2", "--r-step", "0.5"],
            vec![
                "outage", "--M", "2", "--r", "0.2", "--snr", "10:16:3", "--trials", "30000",
                "--seed", "7",
            ],
            vec![
                "sim", "--mode", "hdaf", "--M", "2", "--T", "4", "--n", "2", "--mu", "1", "--r",
                "0.25", "--snr", "10,20", "--trials", "300", "--seed", "3",
            ],
        ];
        for args in cases {
            let a = bin_with_threads(&args, 1);
            let b = bin_with_threads(&args, 4);
            assert_eq!(a.status.code(), b.status.code(), "status differs: {args:?}");
            assert_eq!(a.stdout, b.stdout, "stdout differs for {args:?}");
        }
    });
}

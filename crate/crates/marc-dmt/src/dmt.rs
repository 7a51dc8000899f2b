//! Closed-form diversity-multiplexing exponents for DDF and HDAF relaying
//! on the two-user multiple-access relay channel.
//!
//! All functions take the multiplexing gain `r ∈ [0, 1]` of the *sum* rate
//! (symmetric users, `R1 = R2 = R/2`) and return extended-real diversity
//! exponents. `m` is the relay decision time in slots, `M` the number of
//! slots per codeword, and `f = m/M` the listening fraction.
//!
//! The finite-`M` tradeoff is the minimum over decision times of a
//! relay-side term (probability the relay first decodes at slot `m`) and a
//! destination-side term (outage given the relay helped from slot `m` on).

use crate::piecewise::{pointwise_min, DmtCurve, ExtReal};
use crate::Error;

/// Slotted transmission geometry: `M` slots of `T` symbols each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotConfig {
    pub slots: usize,
    pub symbols_per_slot: usize,
}

impl SlotConfig {
    pub fn new(slots: usize, symbols_per_slot: usize) -> Result<Self, Error> {
        if slots < 1 || symbols_per_slot < 1 {
            return Err(Error::Argument(format!(
                "need M >= 1 and T >= 1, got M={slots} T={symbols_per_slot}"
            )));
        }
        Ok(SlotConfig { slots, symbols_per_slot })
    }

    pub fn block_length(&self) -> usize {
        self.slots * self.symbols_per_slot
    }
}

fn check_args(m: usize, big_m: usize, r: f64) {
    debug_assert!(big_m >= 1, "M must be >= 1");
    debug_assert!((1..=big_m).contains(&m), "decision time m={m} outside 1..={big_m}");
    debug_assert!((0.0..=1.0).contains(&r), "r={r} outside [0, 1]");
}

/// Exponent of the probability that the relay's decision time is slot `m`.
///
/// For `1 < m < M` the event requires the source-relay links to leave the
/// slot-`m` rate region reachable but the slot-`(m-1)` region not, which is
/// impossible for `r > m/M` (infinite exponent). For `m = M` (relay stays
/// silent) the exponent is finite on all of `[0, 1]`.
pub fn d_relay_decision(m: usize, big_m: usize, r: f64) -> ExtReal {
    check_args(m, big_m, r);
    let mm = big_m as f64;
    let a = (m - 1) as f64;
    if m > 1 && r < 2.0 * a / (3.0 * mm) {
        ExtReal::finite(1.0 - mm * r / (2.0 * a))
    } else if m > 1 && r < a / mm {
        ExtReal::finite(2.0 * (1.0 - mm * r / a))
    } else if r <= m as f64 / mm {
        ExtReal::finite(0.0)
    } else {
        // unreachable for m = M since m/M = 1 >= r
        ExtReal::Inf
    }
}

/// Destination exponent of the per-user outage event when the relay helps
/// from fraction `f` of the block onwards (per-user rate `r/2`).
pub fn d_dest_single(f: f64, r: f64) -> ExtReal {
    debug_assert!((0.0..=1.0).contains(&f) && (0.0..=1.0).contains(&r));
    ExtReal::finite(if f < 0.5 {
        2.0 - r
    } else if f < 1.0 - r / 2.0 {
        2.0 - r / (2.0 * (1.0 - f))
    } else {
        (2.0 - r) / (2.0 * f)
    })
}

/// Destination exponent of the sum-rate outage event (sum rate `r`).
pub fn d_dest_sum(f: f64, r: f64) -> ExtReal {
    debug_assert!((0.0..=1.0).contains(&f) && (0.0..=1.0).contains(&r));
    ExtReal::finite(if r < 1.0 / 3.0 {
        if f < 2.0 / 3.0 {
            3.0 * (1.0 - r)
        } else if f < 1.0 - r {
            3.0 - r / (1.0 - f)
        } else {
            2.0 * (1.0 - r) / f
        }
    } else if f < 2.0 / 3.0 {
        3.0 * (1.0 - r)
    } else {
        2.0 * (1.0 - r) / f
    })
}

/// Destination outage exponent at decision time `m`: the minimum of the two
/// per-user events and the sum event, in collected piecewise form.
///
/// The collected form has four `r` regimes (thresholds 1/2, 16/25, 2/3).
/// Below `f = 1 - r/2` the active branch is whichever of the plateau
/// (`2-r` or `3(1-r)`) and the per-user formula is smaller; taking that
/// minimum directly keeps the branch joints bitwise robust, which matters
/// for the modified-HDAF identity. On `[16/25, 2/3)` two square-root
/// breakpoints mark crossings between formulas that never attain the
/// minimum, so the regime shares the `[1/2, 16/25)` expression; agreement
/// with the direct minimum over events is covered by tests.
pub fn d_dest_outage(m: usize, big_m: usize, r: f64) -> ExtReal {
    check_args(m, big_m, r);
    let f = m as f64 / big_m as f64;
    let v = if r < 0.5 {
        if f < 1.0 - r / 2.0 {
            (2.0 - r).min(2.0 - r / (2.0 * (1.0 - f)))
        } else {
            (2.0 - r) / (2.0 * f)
        }
    } else if r < 2.0 / 3.0 {
        if f < 1.0 - r / 2.0 {
            (3.0 * (1.0 - r)).min(2.0 - r / (2.0 * (1.0 - f)))
        } else {
            (2.0 - r) / (2.0 * f)
        }
    } else {
        (3.0 * (1.0 - r)).min(2.0 * (1.0 - r) / f)
    };
    ExtReal::finite(v)
}

/// Finite-`M` DDF outage exponent: minimum over decision times of the
/// relay and destination terms. Finite for every `r` because the `m = M`
/// (relay silent) term always is.
pub fn d_out(big_m: usize, r: f64) -> ExtReal {
    debug_assert!(big_m >= 1);
    let mut best = ExtReal::Inf;
    for m in 1..=big_m {
        best = best.min(d_relay_decision(m, big_m, r) + d_dest_outage(m, big_m, r));
    }
    best
}

/// DDF tradeoff in the infinite-block-length limit.
pub fn d_ddf_infinite(r: f64) -> ExtReal {
    debug_assert!((0.0..=1.0).contains(&r));
    ExtReal::finite(if r < 0.5 {
        2.0 - r
    } else if r < 2.0 / 3.0 {
        3.0 * (1.0 - r)
    } else {
        2.0 * (1.0 - r) / r
    })
}

/// Multiple-access amplify-and-forward tradeoff.
pub fn d_maf(r: f64) -> ExtReal {
    debug_assert!((0.0..=1.0).contains(&r));
    ExtReal::finite(if r <= 2.0 / 3.0 {
        2.0 - 1.5 * r
    } else {
        3.0 * (1.0 - r)
    })
}

fn check_even(big_m: usize, what: &str) -> Result<(), Error> {
    if big_m < 2 || !big_m.is_multiple_of(2) {
        return Err(Error::Argument(format!(
            "{what} requires an even M >= 2, got M={big_m}"
        )));
    }
    Ok(())
}

/// Hybrid DDF/AF tradeoff: MAF above `r = 2/3`, plain finite-`M` DDF on
/// `(1/2, 2/3]`, and the infinite-`M` optimum `2 - r` at low `r` where the
/// AF fallback removes the late-decoding penalty.
pub fn d_hdaf(big_m: usize, r: f64) -> Result<ExtReal, Error> {
    check_even(big_m, "HDAF")?;
    debug_assert!((0.0..=1.0).contains(&r));
    Ok(if r <= 0.5 {
        ExtReal::finite(2.0 - r)
    } else if r <= 2.0 / 3.0 {
        d_out(big_m, r)
    } else {
        ExtReal::finite(3.0 * (1.0 - r))
    })
}

/// HDAF with relay transmission restricted to start after slot `M/2`.
///
/// In the DDF regime the decision-time minimum runs over `m >= M/2` with
/// the `m = M/2` relay cost replaced by zero (the decode-by-`M/2`
/// probability is bounded by one); at low `r` the decode-at-`M/2` branch
/// already attains `2 - r` and the AF fallback cannot do worse. Equal to
/// [`d_hdaf`] everywhere.
pub fn d_hdaf_modified(big_m: usize, r: f64) -> Result<ExtReal, Error> {
    check_even(big_m, "modified HDAF")?;
    debug_assert!((0.0..=1.0).contains(&r));
    let half = big_m / 2;
    Ok(if r <= 0.5 {
        d_dest_outage(half, big_m, r).min(ExtReal::finite(2.0 - r))
    } else if r <= 2.0 / 3.0 {
        let mut best = d_dest_outage(half, big_m, r);
        for m in half + 1..=big_m {
            best = best.min(d_relay_decision(m, big_m, r) + d_dest_outage(m, big_m, r));
        }
        best
    } else {
        ExtReal::finite(3.0 * (1.0 - r))
    })
}

/// Analytic breakpoints (in `r`) of the destination term at fraction `f`.
fn dest_term_breakpoints(f: f64, out: &mut Vec<f64>) {
    out.extend_from_slice(&[0.5, 16.0 / 25.0, 2.0 / 3.0]);
    // f = 1 - r/2 joint
    out.push(2.0 * (1.0 - f));
    // f = (5r-2)/(2(3r-1)) joint of the 3(1-r) plateau
    if (5.0 - 6.0 * f).abs() > 1e-12 {
        out.push(2.0 * (1.0 - f) / (5.0 - 6.0 * f));
    }
}

/// The `m`-th term of the decision-time minimum as a curve in `r`.
fn decision_term_curve(m: usize, big_m: usize) -> DmtCurve {
    let mm = big_m as f64;
    let f = m as f64 / mm;
    let mut bps = vec![
        2.0 * (m as f64 - 1.0) / (3.0 * mm),
        (m as f64 - 1.0) / mm,
        f,
    ];
    dest_term_breakpoints(f, &mut bps);
    DmtCurve::new(format!("m={m}/{big_m}"), bps, move |r| {
        d_relay_decision(m, big_m, r) + d_dest_outage(m, big_m, r)
    })
}

/// Finite-`M` DDF tradeoff as a curve with located breakpoints.
pub fn ddf_finite_curve(big_m: usize) -> Result<DmtCurve, Error> {
    if big_m < 1 {
        return Err(Error::Argument("need M >= 1".into()));
    }
    let terms: Vec<DmtCurve> = (1..=big_m).map(|m| decision_term_curve(m, big_m)).collect();
    let min = pointwise_min(&terms)?;
    Ok(DmtCurve::new(
        format!("ddf_finite M={big_m}"),
        min.breakpoints().to_vec(),
        move |r| d_out(big_m, r),
    ))
}

/// Infinite-block-length DDF tradeoff curve.
pub fn ddf_infinite_curve() -> DmtCurve {
    DmtCurve::new("ddf_infinite", vec![0.5, 2.0 / 3.0], d_ddf_infinite)
}

/// MAF tradeoff curve.
pub fn maf_curve() -> DmtCurve {
    DmtCurve::new("maf", vec![2.0 / 3.0], d_maf)
}

/// HDAF tradeoff curve (even `M`).
pub fn hdaf_curve(big_m: usize) -> Result<DmtCurve, Error> {
    check_even(big_m, "HDAF")?;
    let mut bps = vec![0.5, 2.0 / 3.0];
    bps.extend_from_slice(ddf_finite_curve(big_m)?.breakpoints());
    Ok(DmtCurve::new(format!("hdaf M={big_m}"), bps, move |r| {
        d_hdaf(big_m, r).expect("even M checked at construction")
    }))
}

/// Modified-HDAF tradeoff curve (even `M`).
pub fn hdaf_modified_curve(big_m: usize) -> Result<DmtCurve, Error> {
    check_even(big_m, "modified HDAF")?;
    let mut bps = vec![0.5, 2.0 / 3.0];
    bps.extend_from_slice(ddf_finite_curve(big_m)?.breakpoints());
    Ok(DmtCurve::new(
        format!("hdaf_modified M={big_m}"),
        bps,
        move |r| d_hdaf_modified(big_m, r).expect("even M checked at construction"),
    ))
}

//! Brute-force infimum solver over channel-exponent space.
//!
//! High-SNR outage probabilities have polynomial decay `ρ^{-d}` where `d`
//! is an infimum of a linear objective over an outage set expressed in the
//! exponents `α_i = -log|h_i|²/log ρ`, `β_i = -log|g_i|²/log ρ`. This
//! module re-derives the closed forms of the `dmt` module from the raw set
//! definitions by exhaustive grid search, and numerically certifies the
//! inequality chains behind the correlated-term and hybrid-protocol
//! achievability arguments.
//!
//! The generic [`grid_infimum`] scans the full five-dimensional grid and is
//! only affordable at coarse steps (`31^5` points at step 0.1 over the
//! default box). The dedicated oracles exploit that objectives are
//! nondecreasing and constraints saturate coordinate-wise: every `(1-x)⁺`
//! term is flat above `x = 1`, so scans can be cut at the first grid point
//! `>= 1` (or `>= 2` where a raw hinge reaches that far) without changing
//! the grid minimum. Tests cross-check the reduced scans against the dense
//! grid at step 0.1.

use std::sync::Arc;

use rayon::prelude::*;

use crate::piecewise::ExtReal;
use crate::Error;

/// Box bound for exponent coordinates. Every in-scope infimum is attained
/// with coordinates at most 2, so 3.0 leaves a margin that tests can
/// verify is never touched.
pub const DEFAULT_BOX: f64 = 3.0;
/// Grid stride used when re-deriving closed forms.
pub const DEFAULT_STEP_FORMULA: f64 = 0.02;
/// Grid stride for the five-dimensional correlated-term objectives.
pub const DEFAULT_STEP_CERTIFY: f64 = 0.05;

/// A point in nonnegative channel-exponent space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentPoint {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta_r: f64,
}

impl ExponentPoint {
    pub fn coord_sum(&self) -> f64 {
        self.alpha1 + self.alpha2 + self.beta1 + self.beta2 + self.beta_r
    }
}

/// A labelled pure predicate over exponent points.
#[derive(Clone)]
pub struct ConstraintSet {
    predicate: Arc<dyn Fn(&ExponentPoint) -> bool + Send + Sync>,
    label: String,
}

impl ConstraintSet {
    pub fn new(
        label: impl Into<String>,
        predicate: impl Fn(&ExponentPoint) -> bool + Send + Sync + 'static,
    ) -> Self {
        ConstraintSet {
            predicate: Arc::new(predicate),
            label: label.into(),
        }
    }

    pub fn contains(&self, p: &ExponentPoint) -> bool {
        (self.predicate)(p)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

fn check_grid_args(step: f64, bound: f64) {
    assert!(
        step > 0.0 && step <= 0.1,
        "grid step must be in (0, 0.1], got {step}"
    );
    assert!(
        bound >= 1.0 + step,
        "box bound must be at least 1 + step, got {bound}"
    );
}

/// Number of grid points per axis for `[0, bound]` at `step`.
fn axis_len(step: f64, bound: f64) -> usize {
    (bound / step + 1e-9).floor() as usize + 1
}

/// Smallest grid index whose value is `>= x` (clamped to the axis).
fn grid_ceil_idx(x: f64, step: f64, len: usize) -> usize {
    if x <= 0.0 {
        return 0;
    }
    let k = (x / step - 1e-9).ceil() as usize;
    k.min(len - 1)
}

/// Minimum of `objective` over all grid points of `[0, bound]^5` (stride
/// `step`) that satisfy `constraint`; `INF` when none do.
///
/// Deterministic for any worker count: the reduction is an exact minimum
/// over pure evaluations.
pub fn grid_infimum(
    objective: impl Fn(&ExponentPoint) -> ExtReal + Sync,
    constraint: &ConstraintSet,
    step: f64,
    bound: f64,
) -> ExtReal {
    check_grid_args(step, bound);
    let n = axis_len(step, bound);
    (0..n)
        .into_par_iter()
        .map(|i1| {
            let mut best = ExtReal::Inf;
            let mut p = ExponentPoint {
                alpha1: i1 as f64 * step,
                alpha2: 0.0,
                beta1: 0.0,
                beta2: 0.0,
                beta_r: 0.0,
            };
            for i2 in 0..n {
                p.alpha2 = i2 as f64 * step;
                for i3 in 0..n {
                    p.beta1 = i3 as f64 * step;
                    for i4 in 0..n {
                        p.beta2 = i4 as f64 * step;
                        for i5 in 0..n {
                            p.beta_r = i5 as f64 * step;
                            if constraint.contains(&p) {
                                best = best.min(objective(&p));
                            }
                        }
                    }
                }
            }
            best
        })
        .reduce(|| ExtReal::Inf, ExtReal::min)
}

/// Per-user relay outage at slot `k` in exponent form: the accumulated
/// mutual information `k(1-α)⁺` cannot carry the per-user rate `rM/2`.
fn relay_outage_single(alpha: f64, k: usize, big_m: usize, r: f64) -> bool {
    pos(1.0 - alpha) <= r * big_m as f64 / (2.0 * k as f64)
}

/// Sum-rate relay outage at slot `k`: `k(1-min α)⁺` cannot carry `rM`.
fn relay_outage_sum(a1: f64, a2: f64, k: usize, big_m: usize, r: f64) -> bool {
    pos(1.0 - a1.min(a2)) <= r * big_m as f64 / k as f64
}

/// Complement of the full relay outage event at slot `m`, closed so the
/// grid infimum matches the high-SNR limit at regime boundaries. At
/// `m = M` the outage event is empty by convention (the relay may always
/// stay silent), so the complement is everything.
fn outside_relay_outage(a1: f64, a2: f64, m: usize, big_m: usize, r: f64) -> bool {
    if m == big_m {
        return true;
    }
    let t1 = r * big_m as f64 / (2.0 * m as f64);
    let t12 = r * big_m as f64 / m as f64;
    pos(1.0 - a1) >= t1 && pos(1.0 - a2) >= t1 && pos(1.0 - a1.min(a2)) >= t12
}

/// Grid infimum with argmin over a 2-D scan of `(α1, α2)`.
fn scan2<F, O>(n: usize, step: f64, feasible: F, objective: O) -> (ExtReal, Option<(f64, f64)>)
where
    F: Fn(f64, f64) -> bool,
    O: Fn(f64, f64) -> f64,
{
    let mut best = ExtReal::Inf;
    let mut witness = None;
    for i in 0..n {
        let x = i as f64 * step;
        for j in 0..n {
            let y = j as f64 * step;
            if feasible(x, y) {
                let v = ExtReal::finite(objective(x, y));
                if v.cmp_total(&best) == std::cmp::Ordering::Less {
                    best = v;
                    witness = Some((x, y));
                }
            }
        }
    }
    (best, witness)
}

/// Exponent of `P(decision time = m)` re-derived from the raw events:
/// the minimum over the three ways of being in outage at slot `m-1`
/// (per-user or sum) while being out of outage at slot `m`.
pub fn relay_exponent_oracle(m: usize, big_m: usize, r: f64, step: f64) -> ExtReal {
    relay_exponent_oracle_witness(m, big_m, r, step).0
}

/// As [`relay_exponent_oracle`], also returning the minimizing `(α1, α2)`.
pub fn relay_exponent_oracle_witness(
    m: usize,
    big_m: usize,
    r: f64,
    step: f64,
) -> (ExtReal, Option<(f64, f64)>) {
    check_grid_args(step, DEFAULT_BOX);
    assert!((1..=big_m).contains(&m) && (0.0..=1.0).contains(&r));
    // All constraint thresholds lie in [0, 1]; objectives increase in each
    // coordinate, so the grid minimum over [0, B]^2 sits at or below the
    // first grid point >= 1.
    let n = grid_ceil_idx(1.0, step, axis_len(step, DEFAULT_BOX)) + 1;
    let out = |a1: f64, a2: f64| outside_relay_outage(a1, a2, m, big_m, r);
    // in-outage at slot m-1; slot 0 is "in outage" for every point
    let in1 = |a: f64| m == 1 || relay_outage_single(a, m - 1, big_m, r);
    let in12 = |a1: f64, a2: f64| m == 1 || relay_outage_sum(a1, a2, m - 1, big_m, r);

    let (v1, w1) = scan2(n, step, |a1, a2| out(a1, a2) && in1(a1), |a1, _| a1);
    let (v2, w2) = scan2(n, step, |a1, a2| out(a1, a2) && in1(a2), |_, a2| a2);
    let (v12, w12) = scan2(n, step, |a1, a2| out(a1, a2) && in12(a1, a2), |a1, a2| a1 + a2);

    let mut best = (v1, w1);
    for cand in [(v2, w2), (v12, w12)] {
        if cand.0.cmp_total(&best.0) == std::cmp::Ordering::Less {
            best = cand;
        }
    }
    best
}

/// Destination outage exponent at decision time `m` re-derived from the
/// raw events: minimum over the per-user events (channels `β_i, β_r`) and
/// the sum event (all three `β`).
pub fn dest_exponent_oracle(m: usize, big_m: usize, r: f64, step: f64) -> ExtReal {
    dest_exponent_oracle_witness(m, big_m, r, step).0
}

/// As [`dest_exponent_oracle`], also returning the minimizing
/// `(β1, β2, β_r)` (the uninvolved coordinate of a per-user witness is 0).
pub fn dest_exponent_oracle_witness(
    m: usize,
    big_m: usize,
    r: f64,
    step: f64,
) -> (ExtReal, Option<(f64, f64, f64)>) {
    check_grid_args(step, DEFAULT_BOX);
    assert!((1..=big_m).contains(&m) && (0.0..=1.0).contains(&r));
    let f = m as f64 / big_m as f64;
    let n = grid_ceil_idx(1.0, step, axis_len(step, DEFAULT_BOX)) + 1;

    // per-user event: f(1-β)⁺ + (1-f)max((1-β)⁺, (1-βr)⁺) <= r/2
    let single = |b: f64, br: f64| {
        f * pos(1.0 - b) + (1.0 - f) * pos(1.0 - b).max(pos(1.0 - br)) <= r / 2.0
    };
    let (v1, w1) = scan2(n, step, single, |b1, br| b1 + br);
    let (v2, w2) = scan2(n, step, single, |b2, br| b2 + br);

    // sum event over (β1, β2, βr)
    let mut v12 = ExtReal::Inf;
    let mut w12 = None;
    for i in 0..n {
        let b1 = i as f64 * step;
        for j in 0..n {
            let b2 = j as f64 * step;
            let m12 = pos(1.0 - b1).max(pos(1.0 - b2));
            for k in 0..n {
                let br = k as f64 * step;
                if f * m12 + (1.0 - f) * m12.max(pos(1.0 - br)) <= r {
                    let v = ExtReal::finite(b1 + b2 + br);
                    if v.cmp_total(&v12) == std::cmp::Ordering::Less {
                        v12 = v;
                        w12 = Some((b1, b2, br));
                    }
                    break; // constraint stays satisfied as βr grows; objective only grows
                }
            }
        }
    }

    let mut best = (v1, w1.map(|(b1, br)| (b1, 0.0, br)));
    for cand in [
        (v2, w2.map(|(b2, br)| (0.0, b2, br))),
        (v12, w12),
    ] {
        if cand.0.cmp_total(&best.0) == std::cmp::Ordering::Less {
            best = cand;
        }
    }
    best
}

/// Which wrong-message family the correlated-term bound is computed for:
/// both users' messages wrong, or only the first user's.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrongPair {
    /// Both decoded messages differ from the transmitted pair (`s = 0`).
    Both,
    /// Only user 1 differs (`s = 2`); user 2's symbols cancel.
    Single,
}

/// Correlated relay/destination error-term exponent: the infimum of the
/// channel-exponent sum plus `T` times the (floored) codeword-averaged
/// exponent, over source-relay channels out of outage at slot `m-1`.
///
/// Certifies that the correlated term decays at least as fast as the
/// product of the decision-time and destination-outage exponents once
/// `T >= 4`.
pub fn correlated_error_exponent(
    m: usize,
    big_m: usize,
    r: f64,
    t_symbols: usize,
    which: WrongPair,
    step: f64,
) -> Result<ExtReal, Error> {
    if t_symbols < 4 {
        return Err(Error::Argument(format!(
            "correlated-term bound needs T >= 4, got T={t_symbols}"
        )));
    }
    if m < 2 || m > big_m {
        return Err(Error::Argument(format!(
            "correlated-term bound needs 2 <= m <= M, got m={m}, M={big_m}"
        )));
    }
    check_grid_args(step, DEFAULT_BOX);
    assert!((0.0..=1.0).contains(&r));

    let t = t_symbols as f64;
    let mf = (m - 1) as f64;
    let tail = (big_m - m) as f64;
    let rm = r * big_m as f64;
    // out of outage at slot m-1 (closed complement): upper bounds on α
    let t1 = rm / (2.0 * mf);
    let t12 = rm / mf;
    if t1 > 1.0 || t12 > 1.0 {
        // no α can keep (1-α)⁺ above a threshold exceeding 1
        return Ok(ExtReal::Inf);
    }
    let feasible = |a1: f64, a2: f64| {
        pos(1.0 - a1) >= t1 && pos(1.0 - a2) >= t1 && pos(1.0 - a1.min(a2)) >= t12
    };
    // every (1-x)⁺ saturates at x = 1 and the objective grows past it
    let n = grid_ceil_idx(1.0, step, axis_len(step, DEFAULT_BOX)) + 1;

    let best = match which {
        WrongPair::Both => (0..n)
            .into_par_iter()
            .map(|i1| {
                let a1 = i1 as f64 * step;
                let mut local = ExtReal::Inf;
                for i2 in 0..n {
                    let a2 = i2 as f64 * step;
                    if !feasible(a1, a2) {
                        continue;
                    }
                    let ha = pos(1.0 - a1).max(pos(1.0 - a2));
                    for i3 in 0..n {
                        let b1 = i3 as f64 * step;
                        for i4 in 0..n {
                            let b2 = i4 as f64 * step;
                            let gb = pos(1.0 - b1).max(pos(1.0 - b2));
                            for i5 in 0..n {
                                let br = i5 as f64 * step;
                                let f = mf * ha.max(gb) + gb + tail * gb.max(pos(1.0 - br)) - rm;
                                let obj = a1 + a2 + b1 + b2 + br + t * pos(f);
                                local = local.min(ExtReal::finite(obj));
                            }
                        }
                    }
                }
                local
            })
            .reduce(|| ExtReal::Inf, ExtReal::min),
        WrongPair::Single => {
            // objective involves only (α1, β1, βr); α2 enters through the
            // constraint alone and 0 is feasible once the set is non-empty
            let mut best = ExtReal::Inf;
            for i1 in 0..n {
                let a1 = i1 as f64 * step;
                if !feasible(a1, 0.0) {
                    continue;
                }
                for i3 in 0..n {
                    let b1 = i3 as f64 * step;
                    for i5 in 0..n {
                        let br = i5 as f64 * step;
                        let f = mf * pos(1.0 - a1).max(pos(1.0 - b1))
                            + pos(1.0 - b1)
                            + tail * pos(1.0 - b1).max(pos(1.0 - br))
                            - rm / 2.0;
                        let obj = a1 + b1 + br + t * pos(f);
                        best = best.min(ExtReal::finite(obj));
                    }
                }
            }
            best
        }
    };
    Ok(best)
}

/// The three hybrid-protocol exponents certified from the raw sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridFallbackExponents {
    /// Single-user error with the relay failing to decode by slot `M/2`.
    pub d_pe1: ExtReal,
    /// Sum error conditioned on the source-relay exponents.
    pub d_pe12: ExtReal,
    /// Sphere-miss fallback term with the `T`-scaled codeword exponent.
    pub d_k: ExtReal,
}

/// Relay outage events at the half-block decision moment, in the exponent
/// form the hybrid-protocol analysis conditions on.
fn half_block_outage_single(alpha: f64, r: f64) -> bool {
    pos(1.0 - alpha) <= r / 2.0
}

fn half_block_outage_sum(a1: f64, a2: f64, r: f64) -> bool {
    pos(1.0 - a1.min(a2)) <= r
}

/// Certifiable exponents of the hybrid protocol's fallback error events.
pub fn hybrid_fallback_exponents(r: f64, t_symbols: usize, step: f64) -> Result<HybridFallbackExponents, Error> {
    if step > 0.05 {
        return Err(Error::Argument(format!(
            "hybrid certification needs step <= 0.05, got {step}"
        )));
    }
    check_grid_args(step, DEFAULT_BOX);
    assert!((0.0..=1.0).contains(&r) && t_symbols >= 1);
    let len = axis_len(step, DEFAULT_BOX);
    let grid = |x: f64| grid_ceil_idx(x, step, len) as f64 * step;
    let n1 = grid_ceil_idx(1.0, step, len) + 1;

    // d_pe1: inf of the full coordinate sum over {relay outage at M/2} with
    // the destination gates β1 >= 1-r/2 and βr + α1 >= 1-r; β2 is free.
    let b1_floor = grid(pos(1.0 - r / 2.0));
    let gate = |a1: f64, br: f64| br + a1 >= pos(1.0 - r);
    let mut d_pe1 = ExtReal::Inf;
    {
        // user-1 outage: α1 >= 1-r/2, α2 free
        let (v, _) = scan2(
            n1,
            step,
            |a1, br| half_block_outage_single(a1, r) && gate(a1, br),
            |a1, br| a1 + br,
        );
        d_pe1 = d_pe1.min(v + ExtReal::finite(b1_floor));
        // user-2 outage: α2 >= 1-r/2 pinned at its grid floor, α1 free
        let a2_floor = grid(pos(1.0 - r / 2.0));
        let (v, _) = scan2(n1, step, gate, |a1, br| a1 + br);
        d_pe1 = d_pe1.min(v + ExtReal::finite(b1_floor + a2_floor));
        // sum outage: both α >= 1-r
        let a2_floor = grid(pos(1.0 - r));
        let (v, _) = scan2(
            n1,
            step,
            |a1, br| a1 >= pos(1.0 - r) && gate(a1, br),
            |a1, br| a1 + br,
        );
        d_pe1 = d_pe1.min(v + ExtReal::finite(b1_floor + a2_floor));
    }

    // d_pe12: inf of α1 + α2 + conditional sum-error exponent over the
    // relay outage union.
    let cond = |mn: f64| {
        if mn > pos(1.0 - r) {
            2.0 * pos(1.0 - r)
        } else {
            pos(3.0 * (1.0 - r) - mn)
        }
    };
    let (d_pe12, _) = scan2(
        n1,
        step,
        |a1, a2| {
            half_block_outage_single(a1, r)
                || half_block_outage_single(a2, r)
                || half_block_outage_sum(a1, a2, r)
        },
        |a1, a2| a1 + a2 + cond(a1.min(a2)),
    );

    // d_k: inf of the coordinate sum plus T·(k)⁺ over channels *outside*
    // the relay outage union; α2 = β2 = 0 is feasible and optimal. The raw
    // hinge 2 - α1 - β1 reaches past 1, so β1 scans to 2.
    let t = t_symbols as f64;
    let a1_hi = pos(1.0 - r / 2.0);
    let n2 = grid_ceil_idx(2.0, step, len) + 1;
    let mut d_k = ExtReal::Inf;
    for i1 in 0..n1 {
        let a1 = i1 as f64 * step;
        if a1 > a1_hi {
            break;
        }
        for i2 in 0..n2 {
            let b1 = i2 as f64 * step;
            for i3 in 0..n1 {
                let br = i3 as f64 * step;
                let k = (2.0 * (1.0 - b1))
                    .max(1.0 - (br + a1))
                    .max(2.0 - (a1 + b1))
                    - r;
                d_k = d_k.min(ExtReal::finite(a1 + b1 + br + t * pos(k)));
            }
        }
    }

    Ok(HybridFallbackExponents { d_pe1, d_pe12, d_k })
}

/// The per-user destination outage set in five-dimensional exponent form,
/// for cross-checking the reduced oracles against [`grid_infimum`].
pub fn dest_single_outage_set(f: f64, r: f64) -> ConstraintSet {
    ConstraintSet::new(format!("dest outage user 1, f={f}, r={r}"), move |p| {
        f * pos(1.0 - p.beta1) + (1.0 - f) * pos(1.0 - p.beta1).max(pos(1.0 - p.beta_r))
            <= r / 2.0
    })
}

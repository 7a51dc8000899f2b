//! Extended-real values and piecewise exponent curves.
//!
//! Every diversity exponent in this crate lives in `[0, ∞]`: outage
//! probabilities decay like `ρ^{-d}`, and `d = ∞` encodes events whose
//! probability is exactly zero at high SNR. [`ExtReal`] is a tagged value,
//! not a large float, so that absorption laws (`∞ + x = ∞`,
//! `min(∞, x) = x`) hold exactly.
//!
//! [`DmtCurve`] wraps an exponent function of the multiplexing gain
//! `r ∈ [0, 1]` together with its analytic breakpoints, and supports the
//! pointwise minimum used to assemble tradeoff curves from per-decision-time
//! terms.

use std::fmt;
use std::sync::Arc;

use crate::Error;

/// Tolerance (in `r`) to which [`pointwise_min`] locates crossing points.
pub const CROSSING_TOL: f64 = 1e-9;

/// A nonnegative real extended with `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Inf,
}

impl ExtReal {
    /// Wraps a finite nonnegative value.
    ///
    /// Panics on NaN or negative input; exponents are nonnegative by
    /// construction and a violation is a formula bug, not a data error.
    pub fn finite(value: f64) -> Self {
        assert!(
            value.is_finite() && value >= 0.0,
            "exponent must be finite and nonnegative, got {value}"
        );
        ExtReal::Finite(value)
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtReal::Inf)
    }

    /// The finite value, or `None` for `∞`.
    pub fn value(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::Inf => None,
        }
    }

    /// Minimum; `∞` is the identity.
    pub fn min(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                ExtReal::Finite(if a <= b { a } else { b })
            }
            (ExtReal::Finite(a), ExtReal::Inf) => ExtReal::Finite(a),
            (ExtReal::Inf, other) => other,
        }
    }

    /// Total order with `∞` greatest. Finite payloads are never NaN.
    pub fn cmp_total(&self, other: &ExtReal) -> std::cmp::Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
            (ExtReal::Finite(_), ExtReal::Inf) => std::cmp::Ordering::Less,
            (ExtReal::Inf, ExtReal::Finite(_)) => std::cmp::Ordering::Greater,
            (ExtReal::Inf, ExtReal::Inf) => std::cmp::Ordering::Equal,
        }
    }

    /// True when both are `∞` or both finite within `tol`.
    pub fn approx_eq(&self, other: &ExtReal, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= tol,
            (ExtReal::Inf, ExtReal::Inf) => true,
            _ => false,
        }
    }
}

/// Addition with absorbing `∞`.
impl std::ops::Add for ExtReal {
    type Output = ExtReal;

    fn add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Inf,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Inf => write!(f, "INF"),
        }
    }
}

type EvalFn = Arc<dyn Fn(f64) -> ExtReal + Send + Sync>;

/// An evaluable exponent curve on `r ∈ [0, 1]` with its breakpoints.
///
/// Between consecutive breakpoints the curve is continuous; at a breakpoint
/// the right-limit segment applies (left segment at `r = 1`). That
/// convention is the evaluator's responsibility; this type only carries it.
///
/// Immutable after construction and cheap to clone; evaluation is safe from
/// concurrent workers.
#[derive(Clone)]
pub struct DmtCurve {
    eval: EvalFn,
    breakpoints: Vec<f64>,
    label: String,
}

impl fmt::Debug for DmtCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DmtCurve")
            .field("label", &self.label)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl DmtCurve {
    /// Builds a curve from an evaluator and its interior breakpoints.
    ///
    /// Breakpoints are clamped to `[0, 1]`, sorted, and deduplicated; the
    /// endpoints 0 and 1 are implicit and not stored.
    pub fn new(
        label: impl Into<String>,
        breakpoints: Vec<f64>,
        eval: impl Fn(f64) -> ExtReal + Send + Sync + 'static,
    ) -> Self {
        let mut bps: Vec<f64> = breakpoints
            .into_iter()
            .filter(|b| b.is_finite() && *b > 0.0 && *b < 1.0)
            .collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        DmtCurve {
            eval: Arc::new(eval),
            breakpoints: bps,
            label: label.into(),
        }
    }

    /// A constant curve, mostly useful in tests.
    pub fn constant(label: impl Into<String>, value: ExtReal) -> Self {
        DmtCurve::new(label, Vec::new(), move |_| value)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Interior breakpoints, strictly increasing within `(0, 1)`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Evaluates at `r`, rejecting arguments outside `[0, 1]`.
    pub fn eval(&self, r: f64) -> Result<ExtReal, Error> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!(
                "multiplexing gain r={r} outside [0, 1]"
            )));
        }
        Ok((self.eval)(r))
    }

    /// Evaluates without the domain check; `r` must already be in `[0, 1]`.
    fn eval_unchecked(&self, r: f64) -> ExtReal {
        (self.eval)(r)
    }
}

/// Evaluates `curve` at `r ∈ [0, 1]`.
pub fn eval_curve(curve: &DmtCurve, r: f64) -> Result<ExtReal, Error> {
    curve.eval(r)
}

/// Pointwise minimum of a non-empty set of curves.
///
/// The result evaluates to the exact minimum of the inputs at every `r` (it
/// delegates to them), and its breakpoints are the union of the inputs'
/// breakpoints plus crossing points of the minimum located by bisection to
/// [`CROSSING_TOL`].
pub fn pointwise_min(curves: &[DmtCurve]) -> Result<DmtCurve, Error> {
    if curves.is_empty() {
        return Err(Error::Argument("pointwise_min of an empty list".into()));
    }
    let inputs: Vec<DmtCurve> = curves.to_vec();

    // Union of input breakpoints partitions [0, 1] into intervals on which
    // every input is a single analytic segment.
    let mut grid: Vec<f64> = vec![0.0, 1.0];
    for c in &inputs {
        grid.extend_from_slice(c.breakpoints());
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let argmin = |r: f64| -> usize {
        let mut best = 0usize;
        for (i, c) in inputs.iter().enumerate() {
            if c.eval_unchecked(r).cmp_total(&inputs[best].eval_unchecked(r))
                == std::cmp::Ordering::Less
            {
                best = i;
            }
        }
        best
    };

    let mut breakpoints: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|b| *b > 0.0 && *b < 1.0)
        .collect();

    // Inside each interval, probe for changes of the active curve and
    // bisect each change down to a crossing point.
    const PROBES: usize = 32;
    for w in grid.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= CROSSING_TOL {
            continue;
        }
        let probe = |k: usize| lo + (hi - lo) * (k as f64 + 0.5) / (PROBES as f64);
        let mut prev_r = probe(0);
        let mut prev_i = argmin(prev_r);
        for k in 1..PROBES {
            let r = probe(k);
            let i = argmin(r);
            if i != prev_i {
                let (mut a, mut b) = (prev_r, r);
                let ia = prev_i;
                while b - a > CROSSING_TOL {
                    let mid = 0.5 * (a + b);
                    if argmin(mid) == ia {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                breakpoints.push(0.5 * (a + b));
            }
            prev_r = r;
            prev_i = i;
        }
    }

    let label = format!(
        "min({})",
        inputs
            .iter()
            .map(|c| c.label.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    let eval_inputs = inputs.clone();
    Ok(DmtCurve::new(label, breakpoints, move |r| {
        let mut best = eval_inputs[0].eval_unchecked(r);
        for c in &eval_inputs[1..] {
            best = best.min(c.eval_unchecked(r));
        }
        best
    }))
}

/// Samples a curve into `(r, value)` rows: `n ≥ 2` uniform samples on
/// `[0, 1]` plus one sample at each breakpoint, sorted with duplicates
/// removed.
pub fn sample_to_table(curve: &DmtCurve, n: usize) -> Result<Vec<(f64, ExtReal)>, Error> {
    if n < 2 {
        return Err(Error::Argument(format!("need n >= 2 samples, got {n}")));
    }
    let mut rs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    rs.extend_from_slice(curve.breakpoints());
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    Ok(rs
        .into_iter()
        .map(|r| (r, curve.eval_unchecked(r)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn affine(label: &str, a: f64, b: f64) -> DmtCurve {
        // a + b*r, clamped at zero so the ExtReal invariant holds
        DmtCurve::new(label, Vec::new(), move |r| {
            ExtReal::finite((a + b * r).max(0.0))
        })
    }

    #[test]
    fn ext_real_absorption() {
        let x = ExtReal::finite(1.5);
        assert_eq!(ExtReal::Inf + x, ExtReal::Inf);
        assert_eq!(x + ExtReal::Inf, ExtReal::Inf);
        assert_eq!(ExtReal::Inf.min(x), x);
        assert_eq!(x.min(ExtReal::Inf), x);
        assert_eq!(ExtReal::Inf.min(ExtReal::Inf), ExtReal::Inf);
    }

    #[test]
    #[should_panic]
    fn ext_real_rejects_negative() {
        let _ = ExtReal::finite(-0.1);
    }

    #[test]
    fn eval_constant_curve() {
        let c = DmtCurve::constant("c2", ExtReal::finite(2.0));
        assert_eq!(eval_curve(&c, 0.5).unwrap(), ExtReal::finite(2.0));
    }

    #[test]
    fn eval_affine_endpoint() {
        let c = affine("2-r", 2.0, -1.0);
        assert_eq!(eval_curve(&c, 0.0).unwrap(), ExtReal::finite(2.0));
    }

    #[test]
    fn eval_inf_branch() {
        let c = DmtCurve::new("step", vec![0.5], |r| {
            if r > 0.5 {
                ExtReal::Inf
            } else {
                ExtReal::finite(1.0)
            }
        });
        assert_eq!(eval_curve(&c, 0.75).unwrap(), ExtReal::Inf);
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let c = DmtCurve::constant("c", ExtReal::finite(1.0));
        assert!(eval_curve(&c, -0.1).is_err());
        assert!(eval_curve(&c, 1.1).is_err());
    }

    #[test]
    fn min_of_two_affine() {
        let m = pointwise_min(&[affine("2-r", 2.0, -1.0), affine("3(1-r)", 3.0, -3.0)]).unwrap();
        assert_eq!(eval_curve(&m, 0.4).unwrap(), ExtReal::finite(1.6));
    }

    #[test]
    fn min_absorbs_inf_curve() {
        let c = affine("2-r", 2.0, -1.0);
        let inf = DmtCurve::constant("inf", ExtReal::Inf);
        let m = pointwise_min(&[c.clone(), inf]).unwrap();
        for i in 0..=10 {
            let r = i as f64 / 10.0;
            assert_eq!(m.eval(r).unwrap(), c.eval(r).unwrap());
        }
    }

    #[test]
    fn min_locates_crossing() {
        // 2-r = 3(1-r) at r = 0.5
        let m = pointwise_min(&[affine("2-r", 2.0, -1.0), affine("3(1-r)", 3.0, -3.0)]).unwrap();
        assert!(
            m.breakpoints().iter().any(|b| (b - 0.5).abs() <= 1e-8),
            "expected a breakpoint near 0.5, got {:?}",
            m.breakpoints()
        );
    }

    #[test]
    fn min_rejects_empty() {
        assert!(pointwise_min(&[]).is_err());
    }

    #[test]
    fn sample_constant() {
        let c = DmtCurve::constant("c2", ExtReal::finite(2.0));
        let t = sample_to_table(&c, 3).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0], (0.0, ExtReal::finite(2.0)));
        assert_eq!(t[1], (0.5, ExtReal::finite(2.0)));
        assert_eq!(t[2], (1.0, ExtReal::finite(2.0)));
    }

    #[test]
    fn sample_affine_endpoints() {
        let t = sample_to_table(&affine("2-r", 2.0, -1.0), 2).unwrap();
        assert_eq!(t, vec![(0.0, ExtReal::finite(2.0)), (1.0, ExtReal::finite(1.0))]);
    }

    #[test]
    fn sample_includes_breakpoint() {
        let m = pointwise_min(&[affine("2-r", 2.0, -1.0), affine("3(1-r)", 3.0, -3.0)]).unwrap();
        let t = sample_to_table(&m, 2).unwrap();
        let hit = t
            .iter()
            .find(|(r, _)| (r - 0.5).abs() <= 1e-8)
            .expect("breakpoint row missing");
        assert!(hit.1.approx_eq(&ExtReal::finite(1.5), 1e-8));
    }

    #[test]
    fn sample_rejects_small_n() {
        let c = DmtCurve::constant("c", ExtReal::finite(1.0));
        assert!(sample_to_table(&c, 1).is_err());
    }

    proptest! {
        // eval(pointwise_min(S), r) == min over S of eval(c, r), exactly.
        #[test]
        fn prop_min_is_pointwise(
            params in proptest::collection::vec((0.0f64..3.0, -3.0f64..3.0), 1..6),
            rs in proptest::collection::vec(0.0f64..=1.0, 1..20),
        ) {
            let curves: Vec<DmtCurve> = params
                .iter()
                .map(|&(a, b)| affine("seg", a, b))
                .collect();
            let m = pointwise_min(&curves).unwrap();
            for &r in &rs {
                let direct = curves
                    .iter()
                    .map(|c| c.eval(r).unwrap())
                    .fold(ExtReal::Inf, ExtReal::min);
                prop_assert_eq!(m.eval(r).unwrap(), direct);
            }
        }
    }
}

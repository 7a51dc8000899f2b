//! Monte Carlo outage-probability estimation over Rayleigh fading.
//!
//! Each trial draws the five links, applies the slotted decision-time rule
//! at the relay (minimum slot whose accumulated mutual information carries
//! the rate), then tests the destination outage events given that decision
//! time. Rates follow the tradeoff anchoring `R = r log2 ρ` evaluated at
//! each sweep point; diversity is estimated by a log-log regression of the
//! outage fraction against SNR.
//!
//! Trials are deterministic given the config seed: trial `i` at sweep
//! index `j` uses a counter-based substream of `(seed, j, i)`, so the
//! result is byte-identical for any worker count.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::Error;

/// One realization of the five Rayleigh links.
#[derive(Clone, Copy, Debug)]
pub struct ChannelDraw {
    pub h1: Complex64,
    pub h2: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
    pub gr: Complex64,
}

impl ChannelDraw {
    /// Draws five i.i.d. unit-variance circularly-symmetric Gaussians.
    pub fn sample(rng: &mut impl Rng) -> Self {
        let mut cn = || {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        };
        ChannelDraw {
            h1: cn(),
            h2: cn(),
            g1: cn(),
            g2: cn(),
            gr: cn(),
        }
    }
}

/// Sweep configuration.
#[derive(Clone, Debug)]
pub struct McConfig {
    /// Number of slots per codeword.
    pub slots: usize,
    /// Sum multiplexing gain in `[0, 1]`.
    pub r: f64,
    /// Strictly increasing SNR sweep points in dB.
    pub snr_db_list: Vec<f64>,
    pub trials_per_snr: u64,
    pub seed: u64,
    /// Source-relay SNR advantage `ρ'/ρ` in dB (0 keeps `ρ' = ρ`).
    pub snr_relay_offset_db: f64,
}

impl McConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.slots < 1 {
            return Err(Error::Argument("need M >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::Argument(format!("r={} outside [0, 1]", self.r)));
        }
        if self.trials_per_snr < 1 {
            return Err(Error::Argument("need at least one trial per SNR".into()));
        }
        if self.snr_db_list.is_empty() {
            return Err(Error::Argument("empty SNR list".into()));
        }
        if self.snr_db_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("SNR list must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// One sweep row.
#[derive(Clone, Debug)]
pub struct OutageRow {
    pub snr_db: f64,
    pub p_out: f64,
    pub stderr: f64,
    pub n_trials: u64,
    /// Count of trials per decision time, index 0 holding `m = 1`.
    pub decision_histogram: Vec<u64>,
}

/// Target sum rate in bits per symbol at the given linear SNR.
///
/// At `r = 0` the scaled rate degenerates to zero bits and outage becomes
/// a measure-zero event; a fixed rate of one bit per symbol anchors the
/// zero-multiplexing diversity instead.
pub fn sum_rate_bits(r: f64, snr: f64) -> f64 {
    if r > 0.0 {
        r * snr.log2()
    } else {
        1.0
    }
}

/// The relay's decision time: the smallest `m` in `1..M-1` whose
/// accumulated per-user and sum mutual information strictly exceed the
/// per-user and sum rate targets; `M` (stay silent) when none does.
///
/// Nonincreasing in each of `|h1|²`, `|h2|²`.
pub fn decision_time(h1: Complex64, h2: Complex64, slots: usize, r: f64, snr_relay: f64) -> usize {
    debug_assert!(snr_relay > 0.0);
    let rate = sum_rate_bits(r, snr_relay);
    let (r1, sum) = (rate / 2.0, rate);
    let m_total = slots as f64;
    let c1 = (1.0 + h1.norm_sqr() * snr_relay).log2();
    let c2 = (1.0 + h2.norm_sqr() * snr_relay).log2();
    let c12 = (1.0 + (h1.norm_sqr() + h2.norm_sqr()) * snr_relay).log2();
    for m in 1..slots {
        let mf = m as f64;
        if m_total * r1 < mf * c1 && m_total * r1 < mf * c2 && m_total * sum < mf * c12 {
            return m;
        }
    }
    slots
}

/// Destination outage at decision time `m`: any of the two per-user
/// events or the sum event holds (non-strict, as the rate-region
/// boundaries are part of the outage sets).
pub fn dest_outage(
    g1: Complex64,
    g2: Complex64,
    gr: Complex64,
    m: usize,
    slots: usize,
    r: f64,
    snr: f64,
) -> bool {
    debug_assert!(snr > 0.0 && (1..=slots).contains(&m));
    let rate = sum_rate_bits(r, snr);
    let (r1, sum) = (rate / 2.0, rate);
    let mf = m as f64;
    let tail = (slots - m) as f64;
    let m_total = slots as f64;
    let (a1, a2, ar) = (g1.norm_sqr(), g2.norm_sqr(), gr.norm_sqr());
    let single = |a: f64| {
        mf * (1.0 + a * snr).log2() + tail * (1.0 + (a + ar) * snr).log2() <= m_total * r1
    };
    let both = mf * (1.0 + (a1 + a2) * snr).log2()
        + tail * (1.0 + (a1 + a2 + ar) * snr).log2()
        <= m_total * sum;
    single(a1) || single(a2) || both
}

/// Counter-based substream for trial `i` at sweep index `j`.
fn trial_rng(seed: u64, sweep: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&sweep.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    key[24..32].copy_from_slice(&0x6d61_7263_2d6d_6373u64.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Clone)]
struct SweepAccum {
    outages: u64,
    hist: Vec<u64>,
}

impl SweepAccum {
    fn empty(slots: usize) -> Self {
        SweepAccum {
            outages: 0,
            hist: vec![0; slots],
        }
    }

    fn merge(mut self, other: SweepAccum) -> SweepAccum {
        self.outages += other.outages;
        for (a, b) in self.hist.iter_mut().zip(other.hist) {
            *a += b;
        }
        self
    }
}

/// Runs the sweep: per SNR point, `trials_per_snr` independent draws of
/// decision time plus destination outage.
// TODO: importance sampling for the deep tail; plain sampling needs 1e7+
// trials per point past ~25 dB at low multiplexing gains.
pub fn estimate_pout(config: &McConfig) -> Result<Vec<OutageRow>, Error> {
    config.validate()?;
    let slots = config.slots;
    let rows = config
        .snr_db_list
        .iter()
        .enumerate()
        .map(|(j, &snr_db)| {
            let snr = 10f64.powf(snr_db / 10.0);
            let snr_relay = 10f64.powf((snr_db + config.snr_relay_offset_db) / 10.0);
            let acc = (0..config.trials_per_snr)
                .into_par_iter()
                .fold(
                    || SweepAccum::empty(slots),
                    |mut acc, i| {
                        let mut rng = trial_rng(config.seed, j as u64, i);
                        let draw = ChannelDraw::sample(&mut rng);
                        let m = decision_time(draw.h1, draw.h2, slots, config.r, snr_relay);
                        acc.hist[m - 1] += 1;
                        if dest_outage(draw.g1, draw.g2, draw.gr, m, slots, config.r, snr) {
                            acc.outages += 1;
                        }
                        acc
                    },
                )
                .reduce(|| SweepAccum::empty(slots), SweepAccum::merge);
            let n = config.trials_per_snr;
            let p = acc.outages as f64 / n as f64;
            OutageRow {
                snr_db,
                p_out: p,
                stderr: (p * (1.0 - p) / n as f64).sqrt(),
                n_trials: n,
                decision_histogram: acc.hist,
            }
        })
        .collect();
    Ok(rows)
}

/// Diversity estimate from a sweep.
#[derive(Clone, Copy, Debug)]
pub struct DiversityFit {
    /// Slope of `-log10 p_out` against `log10 ρ`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Least-squares diversity fit over the rows whose SNR lies in `window`
/// (inclusive, in dB). Needs at least three usable rows, all with
/// `p_out > 0`; otherwise the caller must raise the trial count or lower
/// the SNR range.
pub fn fit_diversity(rows: &[OutageRow], window: (f64, f64)) -> Result<DiversityFit, Error> {
    let in_window: Vec<&OutageRow> = rows
        .iter()
        .filter(|row| row.snr_db >= window.0 && row.snr_db <= window.1)
        .collect();
    if in_window.iter().any(|row| row.p_out <= 0.0) {
        return Err(Error::InsufficientData(format!(
            "a window row has p_out = 0; raise trials or lower SNR (window {:?})",
            window
        )));
    }
    if in_window.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need >= 3 rows in window {:?}, have {}",
            window,
            in_window.len()
        )));
    }
    let xs: Vec<f64> = in_window.iter().map(|row| row.snr_db / 10.0).collect();
    let ys: Vec<f64> = in_window.iter().map(|row| -row.p_out.log10()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    Ok(DiversityFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

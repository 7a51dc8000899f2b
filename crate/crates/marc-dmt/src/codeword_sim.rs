//! Desk-scale codeword-level simulation of the relaying protocols.
//!
//! Gaussian random codebooks at fixed message counts, the bounded-distance
//! decision-rejection decoder at the relay, and joint decoding of message
//! and relay decision time at the destination. Codebook sizes stay fixed
//! per run (they cannot scale with SNR at desk scale), so this module
//! carries the protocol's structural properties rather than asymptotic
//! slopes: half-duplex accounting, sphere-uniqueness, and the equivalence
//! of the joint rule with maximum likelihood at known decision time.
//!
//! The relay decision gate uses the actual code rates
//! `R1 = R2 = log2(n)/MT`; the hybrid mode thresholds take the
//! multiplexing gain `r` as an explicit parameter.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dmt::SlotConfig;
use crate::Error;

/// Hard size limits keeping exhaustive decoding affordable.
pub const MAX_BLOCK_LEN: usize = 64;
pub const MAX_PAIR_COUNT: usize = 256;

/// A random Gaussian codebook.
#[derive(Clone, Debug)]
pub struct Codebook {
    /// One complex vector of length `M*T` per message.
    pub entries: Vec<Vec<Complex64>>,
    /// Per-symbol power the components were drawn with.
    pub symbol_power: f64,
}

impl Codebook {
    pub fn from_entries(entries: Vec<Vec<Complex64>>, symbol_power: f64) -> Self {
        Codebook { entries, symbol_power }
    }

    /// Empirical average symbol power across all entries.
    pub fn mean_symbol_power(&self) -> f64 {
        let mut acc = 0.0;
        let mut count = 0usize;
        for e in &self.entries {
            for x in e {
                acc += x.norm_sqr();
            }
            count += e.len();
        }
        acc / count as f64
    }
}

/// The three codebooks of one trial; the relay book is indexed by the
/// message pair in row-major order, `w = w1 * n + w2`.
#[derive(Clone, Debug)]
pub struct CodebookSet {
    pub user1: Codebook,
    pub user2: Codebook,
    pub relay: Codebook,
    pub n_msgs: usize,
}

impl CodebookSet {
    pub fn relay_entry(&self, w1: usize, w2: usize) -> &[Complex64] {
        &self.relay.entries[w1 * self.n_msgs + w2]
    }
}

/// Relaying protocol variant under simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolMode {
    Ddf,
    Maf,
    Hdaf,
    HdafModified,
}

impl ProtocolMode {
    fn needs_even_slots(&self) -> bool {
        !matches!(self, ProtocolMode::Ddf)
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "ddf" => Ok(ProtocolMode::Ddf),
            "maf" => Ok(ProtocolMode::Maf),
            "hdaf" => Ok(ProtocolMode::Hdaf),
            "hdaf_modified" => Ok(ProtocolMode::HdafModified),
            other => Err(Error::Argument(format!("unknown protocol mode '{other}'"))),
        }
    }
}

/// One protocol run at the codeword level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Slot after which the relay decoded and switched to forwarding;
    /// `None` when it never decoded (silent, or amplify-forward fallback).
    pub decision_time: Option<usize>,
    pub relay_decoded: bool,
    pub relay_correct: bool,
    pub dest_message: (usize, usize),
    /// Decision-time hypothesis the destination settled on (`M` is the
    /// silent hypothesis; the amplify-forward hypothesis reports `M/2`).
    pub dest_decision_time: usize,
    pub error: bool,
}

/// Exhaustive recount of the sphere condition at the decode slot.
#[derive(Clone, Copy, Debug)]
pub struct SphereRecount {
    pub pairs_in_sphere: usize,
    pub true_pair_in_sphere: bool,
}

/// Everything a trial produced, for property tests and diagnostics.
#[derive(Clone, Debug)]
pub struct TrialDetail {
    pub outcome: TrialOutcome,
    pub transmitted: (usize, usize),
    /// Relay transmit vector over the whole block (zeros while listening).
    pub relay_tx: Vec<Complex64>,
    /// Cumulative squared norm of the relay-phase noise after each slot.
    pub relay_noise_cumsq: Vec<f64>,
    pub delta: f64,
    pub noise_var: f64,
    pub sphere_recount: Option<SphereRecount>,
    /// True when the relay fell back to amplify-and-forward.
    pub maf_fallback: bool,
    /// The destination's received block.
    pub dest_rx: Vec<Complex64>,
    /// Destination-side gains `(g1, g2, gr)`.
    pub dest_gains: (Complex64, Complex64, Complex64),
    pub books: CodebookSet,
}

/// Simulation configuration shared across trials.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    pub mode: ProtocolMode,
    pub block: SlotConfig,
    pub n_msgs: usize,
    /// Multiplexing gain selecting the hybrid regime.
    pub r: f64,
    /// Sphere-radius growth factor; the sphere uses `δ = μ ln ρ`.
    pub mu: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let (m, t, n) = (self.block.slots, self.block.symbols_per_slot, self.n_msgs);
        if m < 2 || t < 1 {
            return Err(Error::Argument(format!("need M >= 2 and T >= 1, got M={m} T={t}")));
        }
        if self.mode.needs_even_slots() && m % 2 != 0 {
            return Err(Error::Argument(format!(
                "{:?} splits the block at M/2 and needs an even M, got M={m}",
                self.mode
            )));
        }
        if n < 2 {
            return Err(Error::Argument("need at least 2 messages per user".into()));
        }
        if m * t > MAX_BLOCK_LEN || n * n > MAX_PAIR_COUNT {
            return Err(Error::Argument(format!(
                "desk-scale limits are MT <= {MAX_BLOCK_LEN} and n^2 <= {MAX_PAIR_COUNT}, got MT={} n^2={}",
                m * t,
                n * n
            )));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::Argument(format!("r={} outside [0, 1]", self.r)));
        }
        if self.mu * t as f64 <= 3.0 {
            return Err(Error::Argument(format!(
                "decision rejection needs mu*T > 3, got {}",
                self.mu * t as f64
            )));
        }
        Ok(())
    }
}

/// Diagnostic knobs for paired-seed comparisons; defaults run the plain
/// protocol.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrialOptions {
    /// Forces `h1 = h2 = 0`, severing the source-relay links.
    pub sever_relay_links: bool,
    /// Disables the relay entirely (MAC-only baseline); the destination
    /// then decodes under the silent hypothesis alone.
    pub force_relay_silent: bool,
}

fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Generates the three codebooks of a run, i.i.d. `CN(0, P)` components.
pub fn generate_codebooks(
    seed: u64,
    slots: usize,
    symbols_per_slot: usize,
    n_msgs: usize,
    power: f64,
) -> Result<CodebookSet, Error> {
    let len = slots * symbols_per_slot;
    if n_msgs < 2 {
        return Err(Error::Argument("need at least 2 messages per user".into()));
    }
    if len > MAX_BLOCK_LEN || n_msgs * n_msgs > MAX_PAIR_COUNT {
        return Err(Error::Argument(format!(
            "desk-scale limits are MT <= {MAX_BLOCK_LEN} and n^2 <= {MAX_PAIR_COUNT}, got MT={len} n^2={}",
            n_msgs * n_msgs
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut book = |count: usize| -> Codebook {
        let entries = (0..count)
            .map(|_| (0..len).map(|_| complex_gaussian(&mut rng, power)).collect())
            .collect();
        Codebook { entries, symbol_power: power }
    };
    Ok(CodebookSet {
        user1: book(n_msgs),
        user2: book(n_msgs),
        relay: book(n_msgs * n_msgs),
        n_msgs,
    })
}

/// True when the source-relay channels leave the accumulated slot-`m`
/// rate region around the actual code rates (strict inequalities).
pub fn relay_gate_open(
    h1: Complex64,
    h2: Complex64,
    m: usize,
    symbols_per_slot: usize,
    n_msgs: usize,
    snr_relay: f64,
) -> bool {
    let bits = (n_msgs as f64).log2();
    let mt = (m * symbols_per_slot) as f64;
    bits < mt * (1.0 + h1.norm_sqr() * snr_relay).log2()
        && bits < mt * (1.0 + h2.norm_sqr() * snr_relay).log2()
        && 2.0 * bits < mt * (1.0 + (h1.norm_sqr() + h2.norm_sqr()) * snr_relay).log2()
}

/// Bounded-distance relay decoding at slot `m`: returns the message pair
/// iff the channel gate is open and exactly one pair's superposition lies
/// within squared distance `mT(1+δ)σ_n²` of the received prefix.
pub fn relay_decode_bounded(
    y_r: &[Complex64],
    h1: Complex64,
    h2: Complex64,
    books: &CodebookSet,
    delta: f64,
    noise_var: f64,
    outage_free: bool,
) -> Option<(usize, usize)> {
    if !outage_free {
        return None;
    }
    let mt = y_r.len();
    let radius = mt as f64 * (1.0 + delta) * noise_var;
    let n = books.n_msgs;
    let mut hit = None;
    let mut hits = 0usize;
    for w1 in 0..n {
        for w2 in 0..n {
            let x1 = &books.user1.entries[w1];
            let x2 = &books.user2.entries[w2];
            let mut dist = 0.0;
            for k in 0..mt {
                dist += (y_r[k] - h1 * x1[k] - h2 * x2[k]).norm_sqr();
            }
            if dist <= radius {
                hits += 1;
                if hits > 1 {
                    return None;
                }
                hit = Some((w1, w2));
            }
        }
    }
    if hits == 1 {
        hit
    } else {
        None
    }
}

/// Squared residual of the decision-time hypothesis `m'`: users transmit
/// throughout, the relay codeword is superimposed from symbol `m'T` on
/// (`m' = M` is the silent hypothesis).
#[allow(clippy::too_many_arguments)]
pub fn hypothesis_residual(
    y_d: &[Complex64],
    g1: Complex64,
    g2: Complex64,
    gr: Complex64,
    books: &CodebookSet,
    w1: usize,
    w2: usize,
    m_prime: usize,
    symbols_per_slot: usize,
) -> f64 {
    let x1 = &books.user1.entries[w1];
    let x2 = &books.user2.entries[w2];
    let xr = books.relay_entry(w1, w2);
    let switch = m_prime * symbols_per_slot;
    let mut acc = 0.0;
    for k in 0..y_d.len() {
        let mut s = g1 * x1[k] + g2 * x2[k];
        if k >= switch {
            s += gr * xr[k];
        }
        acc += (y_d[k] - s).norm_sqr();
    }
    acc
}

/// Joint decision-time and message detection: exhaustively minimizes the
/// residual over message pairs and candidate decision times. Ties break
/// toward the larger decision time, then the lexicographically smaller
/// pair. With a single known candidate and the relay forwarding the true
/// pair this is exact maximum likelihood.
pub fn glrt_decode(
    y_d: &[Complex64],
    g1: Complex64,
    g2: Complex64,
    gr: Complex64,
    books: &CodebookSet,
    candidate_m: &[usize],
    symbols_per_slot: usize,
) -> ((usize, usize), usize) {
    assert!(!candidate_m.is_empty(), "need at least one decision-time hypothesis");
    let n = books.n_msgs;
    let mut best: Option<((usize, usize), usize, f64)> = None;
    for &mp in candidate_m {
        for w1 in 0..n {
            for w2 in 0..n {
                let resid = hypothesis_residual(y_d, g1, g2, gr, books, w1, w2, mp, symbols_per_slot);
                let better = match &best {
                    None => true,
                    Some((bw, bm, br)) => {
                        resid < *br
                            || (resid == *br
                                && (mp > *bm || (mp == *bm && (w1, w2) < *bw)))
                    }
                };
                if better {
                    best = Some(((w1, w2), mp, resid));
                }
            }
        }
    }
    let (w, m, _) = best.unwrap();
    (w, m)
}

/// Log-likelihood of a message pair under the amplify-forward model: the
/// second half-block carries the relay-amplified first half, so its noise
/// variance is `|gr b|² σ_n² + σ_v²` and the known first-half symbols act
/// as intersymbol terms.
#[allow(clippy::too_many_arguments)]
fn maf_log_likelihood(
    y_d: &[Complex64],
    g1: Complex64,
    g2: Complex64,
    gr: Complex64,
    h1: Complex64,
    h2: Complex64,
    amp_gain: f64,
    books: &CodebookSet,
    w1: usize,
    w2: usize,
    noise_var: f64,
) -> f64 {
    let half = y_d.len() / 2;
    let x1 = &books.user1.entries[w1];
    let x2 = &books.user2.entries[w2];
    let eff_var = (gr * amp_gain).norm_sqr() * noise_var + noise_var;
    let mut ll = 0.0;
    for k in 0..half {
        let s = g1 * x1[k] + g2 * x2[k];
        ll -= (y_d[k] - s).norm_sqr() / noise_var;
    }
    for k in 0..half {
        let s = g1 * x1[half + k]
            + g2 * x2[half + k]
            + gr * amp_gain * (h1 * x1[k] + h2 * x2[k]);
        ll -= (y_d[half + k] - s).norm_sqr() / eff_var;
    }
    ll -= half as f64 * ((std::f64::consts::PI * noise_var).ln()
        + (std::f64::consts::PI * eff_var).ln());
    ll
}

/// Candidate decision times the destination considers for a mode, and
/// whether it must also weigh the amplify-forward hypothesis.
fn dest_hypotheses(config: &SimConfig) -> (Vec<usize>, bool) {
    let m_slots = config.block.slots;
    let half = m_slots / 2;
    match config.mode {
        ProtocolMode::Ddf => ((1..=m_slots).collect(), false),
        ProtocolMode::Maf => (Vec::new(), true),
        ProtocolMode::Hdaf => {
            if config.r > 2.0 / 3.0 {
                (Vec::new(), true)
            } else if config.r > 0.5 {
                ((1..=m_slots).collect(), false)
            } else {
                let mut c: Vec<usize> = (1..=half).collect();
                c.push(m_slots);
                (c, true)
            }
        }
        ProtocolMode::HdafModified => {
            if config.r > 2.0 / 3.0 {
                (Vec::new(), true)
            } else if config.r > 0.5 {
                ((half..=m_slots).collect(), false)
            } else {
                (vec![half, m_slots], true)
            }
        }
    }
}

/// Relay decode attempt slots for a mode, and whether a failed run of
/// attempts falls back to amplify-and-forward (else the relay stays
/// silent).
fn relay_attempts(config: &SimConfig) -> (Vec<usize>, bool) {
    let m_slots = config.block.slots;
    let half = m_slots / 2;
    match config.mode {
        ProtocolMode::Ddf => ((1..m_slots).collect(), false),
        ProtocolMode::Maf => (Vec::new(), true),
        ProtocolMode::Hdaf => {
            if config.r > 2.0 / 3.0 {
                (Vec::new(), true)
            } else if config.r > 0.5 {
                ((1..m_slots).collect(), false)
            } else {
                ((1..=half).collect(), true)
            }
        }
        ProtocolMode::HdafModified => {
            if config.r > 2.0 / 3.0 {
                (Vec::new(), true)
            } else if config.r > 0.5 {
                ((half..m_slots).collect(), false)
            } else {
                (vec![half], true)
            }
        }
    }
}

fn trial_rng(seed: u64, sweep: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&sweep.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    key[24..32].copy_from_slice(&0x6d61_7263_6373_696du64.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Runs one codeword-level trial.
pub fn run_trial(config: &SimConfig, snr_db: f64, seed: u64) -> Result<TrialOutcome, Error> {
    run_trial_detail(config, snr_db, seed, TrialOptions::default()).map(|d| d.outcome)
}

/// Runs one trial and keeps the internals for property checks.
pub fn run_trial_detail(
    config: &SimConfig,
    snr_db: f64,
    seed: u64,
    options: TrialOptions,
) -> Result<TrialDetail, Error> {
    config.validate()?;
    let (m_slots, t, n) = (config.block.slots, config.block.symbols_per_slot, config.n_msgs);
    let block = config.block.block_length();
    let rho = 10f64.powf(snr_db / 10.0);
    let power = rho; // sigma_n^2 = sigma_v^2 = 1
    let noise_var = 1.0;
    let delta = config.mu * rho.ln();

    let mut rng = trial_rng(seed, 0, 0);
    let books = generate_codebooks(rng.gen(), m_slots, t, n, power)?;

    let cn = |v: f64, rng: &mut ChaCha8Rng| complex_gaussian(rng, v);
    let (h1, h2) = if options.sever_relay_links {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        let a = cn(1.0, &mut rng);
        let b = cn(1.0, &mut rng);
        (a, b)
    };
    let g1 = cn(1.0, &mut rng);
    let g2 = cn(1.0, &mut rng);
    let gr = cn(1.0, &mut rng);
    let w1 = rng.gen_range(0..n);
    let w2 = rng.gen_range(0..n);
    let relay_noise: Vec<Complex64> = (0..block).map(|_| cn(noise_var, &mut rng)).collect();
    let dest_noise: Vec<Complex64> = (0..block).map(|_| cn(noise_var, &mut rng)).collect();

    let x1 = &books.user1.entries[w1];
    let x2 = &books.user2.entries[w2];
    let y_r: Vec<Complex64> = (0..block)
        .map(|k| h1 * x1[k] + h2 * x2[k] + relay_noise[k])
        .collect();

    let mut relay_noise_cumsq = vec![0.0; m_slots];
    let mut acc = 0.0;
    for m in 1..=m_slots {
        for noise in &relay_noise[(m - 1) * t..m * t] {
            acc += noise.norm_sqr();
        }
        relay_noise_cumsq[m - 1] = acc;
    }

    // relay behavior
    let (attempts, maf_on_fail) = if options.force_relay_silent {
        (Vec::new(), false)
    } else {
        relay_attempts(config)
    };
    let mut relay_tx = vec![Complex64::new(0.0, 0.0); block];
    let mut decision_time = None;
    let mut decoded_pair = None;
    let mut sphere_recount = None;
    for &m in &attempts {
        let gate = relay_gate_open(h1, h2, m, t, n, rho);
        if let Some(pair) = relay_decode_bounded(&y_r[..m * t], h1, h2, &books, delta, noise_var, gate)
        {
            decision_time = Some(m);
            decoded_pair = Some(pair);
            let xr = books.relay_entry(pair.0, pair.1);
            relay_tx[(m * t)..block].copy_from_slice(&xr[(m * t)..block]);
            // exhaustive recount of the sphere condition at the decode slot
            let radius = (m * t) as f64 * (1.0 + delta) * noise_var;
            let mut in_sphere = 0usize;
            for c1 in 0..n {
                for c2 in 0..n {
                    let e1 = &books.user1.entries[c1];
                    let e2 = &books.user2.entries[c2];
                    let dist: f64 = (0..m * t)
                        .map(|k| (y_r[k] - h1 * e1[k] - h2 * e2[k]).norm_sqr())
                        .sum();
                    if dist <= radius {
                        in_sphere += 1;
                    }
                }
            }
            sphere_recount = Some(SphereRecount {
                pairs_in_sphere: in_sphere,
                true_pair_in_sphere: relay_noise_cumsq[m - 1] <= radius,
            });
            break;
        }
    }
    let mut maf_fallback = false;
    let mut amp_gain = 0.0;
    if decision_time.is_none() && maf_on_fail {
        maf_fallback = true;
        let half = block / 2;
        amp_gain =
            (power / ((h1.norm_sqr() + h2.norm_sqr()) * power + noise_var)).sqrt();
        for k in 0..half {
            relay_tx[half + k] = y_r[k] * amp_gain;
        }
    }

    let y_d: Vec<Complex64> = (0..block)
        .map(|k| g1 * x1[k] + g2 * x2[k] + gr * relay_tx[k] + dest_noise[k])
        .collect();

    // destination decoding
    let (ddf_cands, with_maf_hypothesis) = if options.force_relay_silent {
        (vec![m_slots], false)
    } else {
        dest_hypotheses(config)
    };
    let mut best_msg = (0usize, 0usize);
    let mut best_time = m_slots;
    let mut best_ll = f64::NEG_INFINITY;
    let mut have = false;
    if !ddf_cands.is_empty() {
        let (msg, m_hat) = glrt_decode(&y_d, g1, g2, gr, &books, &ddf_cands, t);
        let resid = hypothesis_residual(&y_d, g1, g2, gr, &books, msg.0, msg.1, m_hat, t);
        best_ll = -resid / noise_var
            - block as f64 * (std::f64::consts::PI * noise_var).ln();
        best_msg = msg;
        best_time = m_hat;
        have = true;
    }
    if with_maf_hypothesis {
        // the fallback gain is channel-determined, so the receiver can
        // form it from CSI even when the relay actually decoded
        let gain = if maf_fallback {
            amp_gain
        } else {
            (power / ((h1.norm_sqr() + h2.norm_sqr()) * power + noise_var)).sqrt()
        };
        for c1 in 0..n {
            for c2 in 0..n {
                let ll = maf_log_likelihood(
                    &y_d, g1, g2, gr, h1, h2, gain, &books, c1, c2, noise_var,
                );
                // exact ties go to the decision-time hypotheses
                if !have || ll > best_ll {
                    have = true;
                    best_ll = ll;
                    best_msg = (c1, c2);
                    best_time = m_slots / 2;
                }
            }
        }
    }
    debug_assert!(have);

    let relay_decoded = decoded_pair.is_some();
    let relay_correct = decoded_pair == Some((w1, w2));
    let outcome = TrialOutcome {
        decision_time,
        relay_decoded,
        relay_correct,
        dest_message: best_msg,
        dest_decision_time: best_time,
        error: best_msg != (w1, w2),
    };
    Ok(TrialDetail {
        outcome,
        transmitted: (w1, w2),
        relay_tx,
        relay_noise_cumsq,
        delta,
        noise_var,
        sphere_recount,
        maf_fallback,
        dest_rx: y_d,
        dest_gains: (g1, g2, gr),
        books,
    })
}

/// One row of a codeword error-rate sweep.
#[derive(Clone, Debug)]
pub struct ErrorRateRow {
    pub snr_db: f64,
    pub p_err: f64,
    pub stderr: f64,
    /// Fraction of trials where the relay decoded and forwarded a wrong pair.
    pub relay_error_rate: f64,
    /// Fraction of trials where the relay transmitted nothing at all.
    pub relay_silent_rate: f64,
    pub n_trials: u64,
    /// Trials where the relay forwarded a wrong pair, and how many of
    /// those the destination also got wrong (reported, never asserted:
    /// the decoder just runs as specified in that event).
    pub relay_wrong_trials: u64,
    pub relay_wrong_and_error_trials: u64,
}

#[derive(Clone, Copy, Default)]
struct ErrAccum {
    errors: u64,
    relay_wrong: u64,
    relay_wrong_and_error: u64,
    relay_silent: u64,
}

impl ErrAccum {
    fn merge(mut self, o: ErrAccum) -> ErrAccum {
        self.errors += o.errors;
        self.relay_wrong += o.relay_wrong;
        self.relay_wrong_and_error += o.relay_wrong_and_error;
        self.relay_silent += o.relay_silent;
        self
    }
}

/// Sweeps the error rate over SNR with stratified per-trial substreams;
/// deterministic for any worker count.
pub fn error_rate(
    config: &SimConfig,
    snr_db_list: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<ErrorRateRow>, Error> {
    config.validate()?;
    if trials < 1 {
        return Err(Error::Argument("need at least one trial".into()));
    }
    if snr_db_list.is_empty() {
        return Err(Error::Argument("empty SNR list".into()));
    }
    snr_db_list
        .iter()
        .enumerate()
        .map(|(j, &snr_db)| {
            let acc = (0..trials)
                .into_par_iter()
                .fold(ErrAccum::default, |mut acc, i| {
                    let sub = substream_seed(seed, j as u64, i);
                    let detail = run_trial_detail(config, snr_db, sub, TrialOptions::default())
                        .expect("config validated above");
                    if detail.outcome.error {
                        acc.errors += 1;
                    }
                    if detail.outcome.relay_decoded && !detail.outcome.relay_correct {
                        acc.relay_wrong += 1;
                        if detail.outcome.error {
                            acc.relay_wrong_and_error += 1;
                        }
                    }
                    if detail.outcome.decision_time.is_none() && !detail.maf_fallback {
                        acc.relay_silent += 1;
                    }
                    acc
                })
                .reduce(ErrAccum::default, ErrAccum::merge);
            let nf = trials as f64;
            let p = acc.errors as f64 / nf;
            Ok(ErrorRateRow {
                snr_db,
                p_err: p,
                stderr: (p * (1.0 - p) / nf).sqrt(),
                relay_error_rate: acc.relay_wrong as f64 / nf,
                relay_silent_rate: acc.relay_silent as f64 / nf,
                n_trials: trials,
                relay_wrong_trials: acc.relay_wrong,
                relay_wrong_and_error_trials: acc.relay_wrong_and_error,
            })
        })
        .collect()
}

/// Mixes `(seed, sweep, trial)` into one substream seed.
pub fn substream_seed(seed: u64, sweep: u64, trial: u64) -> u64 {
    // splitmix64 over the three words
    let mut z = seed
        .wrapping_add(sweep.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(trial.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

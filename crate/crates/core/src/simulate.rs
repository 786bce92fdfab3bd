//! Monte Carlo BER engine for MAC and BC, average-SNR closed forms,
//! the PAM-TDMA baseline, and the optimal hybrid-split search.
//!
//! Reproducibility contract: every grid point owns ChaCha substreams derived
//! from (master seed, point index, stream id). Symbol draws and unit-variance
//! noise draws live on separate substreams, so two runs with the same seed see
//! identical realizations regardless of decoder, noise variance, or how grid
//! points are scheduled across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::broadcast::{superpose, BcConfig};
use crate::error::{Error, Result};
use crate::mac::{decode, DecoderSpec};

// ---------------------------------------------------------------------------
// Bit mapping
// ---------------------------------------------------------------------------

/// How constellation indices map to bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitMapping {
    /// Index rendered as a plain binary word, MSB first.
    Natural,
    /// Reflected binary code; adjacent indices differ in one bit.
    Gray,
}

#[inline]
fn mapped_word(index: usize, mapping: BitMapping) -> usize {
    match mapping {
        BitMapping::Natural => index,
        BitMapping::Gray => index ^ (index >> 1),
    }
}

/// Bits of the (zero-based) constellation index, MSB first.
pub fn index_to_bits(index: usize, eta: u32, mapping: BitMapping) -> Result<Vec<u8>> {
    if eta == 0 || eta > 32 {
        return Err(Error::Domain(format!("eta {eta} out of range")));
    }
    if index >= (1usize << eta) {
        return Err(Error::Domain(format!("index {index} out of range for eta {eta}")));
    }
    let word = mapped_word(index, mapping);
    Ok((0..eta).rev().map(|b| ((word >> b) & 1) as u8).collect())
}

/// Inverse of [`index_to_bits`].
pub fn bits_to_index(bits: &[u8], mapping: BitMapping) -> Result<usize> {
    if bits.is_empty() || bits.len() > 32 {
        return Err(Error::Domain(format!("bit word length {} out of range", bits.len())));
    }
    let mut word = 0usize;
    for &b in bits {
        if b > 1 {
            return Err(Error::Domain(format!("bit value {b} is not 0/1")));
        }
        word = (word << 1) | b as usize;
    }
    Ok(match mapping {
        BitMapping::Natural => word,
        BitMapping::Gray => {
            // inverse reflected code: index = word ^ (word>>1) ^ (word>>2) ^ ...
            let mut index = word;
            let mut mask = word >> 1;
            while mask != 0 {
                index ^= mask;
                mask >>= 1;
            }
            index
        }
    })
}

#[inline]
fn bit_errors(sent: usize, decoded: usize, mapping: BitMapping) -> u64 {
    (mapped_word(sent, mapping) ^ mapped_word(decoded, mapping)).count_ones() as u64
}

// ---------------------------------------------------------------------------
// Average SNR closed forms
// ---------------------------------------------------------------------------

/// E[(Σ_x P̃_x^{q_x} h_x)²] with independent uniform indices. Evaluated in
/// closed form; identical to the mean over the full symbol product set.
pub fn average_signal_power_mac(levels: &[Vec<f64>], gains: &[f64]) -> f64 {
    let mut sum_mean = 0.0;
    let mut sum_sq_mean = 0.0;
    let mut sum_mean_sq = 0.0;
    for (tx, &h) in levels.iter().zip(gains) {
        let n = tx.len() as f64;
        let mean: f64 = tx.iter().map(|&p| p * h).sum::<f64>() / n;
        let sq: f64 = tx.iter().map(|&p| (p * h).powi(2)).sum::<f64>() / n;
        sum_mean += mean;
        sum_sq_mean += sq;
        sum_mean_sq += mean * mean;
    }
    sum_sq_mean + sum_mean * sum_mean - sum_mean_sq
}

/// Average received MAC SNR in dB for a given noise variance.
pub fn average_snr_mac(levels: &[Vec<f64>], gains: &[f64], sigma2: f64) -> Result<f64> {
    if sigma2 <= 0.0 {
        return Err(Error::Domain(format!("noise variance must be positive, got {sigma2}")));
    }
    Ok(10.0 * (average_signal_power_mac(levels, gains) / sigma2).log10())
}

/// Noise variance that puts the average MAC SNR at `snr_db`.
pub fn noise_for_snr(levels: &[Vec<f64>], gains: &[f64], snr_db: f64) -> f64 {
    average_signal_power_mac(levels, gains) / 10f64.powf(snr_db / 10.0)
}

/// Average received SNR at one BC user, dB. Symbols are drawn independently
/// and uniformly per user.
pub fn average_snr_bc(config: &BcConfig, user: usize, sigma2: f64) -> Result<f64> {
    if sigma2 <= 0.0 {
        return Err(Error::Domain(format!("noise variance must be positive, got {sigma2}")));
    }
    if user >= config.levels.len() {
        return Err(Error::Config(format!("user {user} out of range")));
    }
    let unit_gains = vec![1.0; config.levels.len()];
    let g = config.gains[user];
    let sp = average_signal_power_mac(&config.levels, &unit_gains) * g * g;
    Ok(10.0 * (sp / sigma2).log10())
}

/// Per-user noise variance that puts that user's average SNR at `snr_db`.
pub fn bc_noise_for_snr(config: &BcConfig, user: usize, snr_db: f64) -> f64 {
    let unit_gains = vec![1.0; config.levels.len()];
    let g = config.gains[user];
    average_signal_power_mac(&config.levels, &unit_gains) * g * g / 10f64.powf(snr_db / 10.0)
}

// ---------------------------------------------------------------------------
// Seed derivation and sample streams
// ---------------------------------------------------------------------------

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// ChaCha substream for (master seed, grid point, stream id).
pub fn substream(seed: u64, point: u64, stream: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    let mut state = splitmix64(seed ^ splitmix64(point ^ splitmix64(stream)));
    for chunk in bytes.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

/// Deterministic generator of MAC channel uses for one grid point: uniform
/// symbol indices per transmitter plus one AWGN receiver sample. The stream
/// does not depend on which decoder later consumes it.
pub struct MacSampleStream<'a> {
    levels: &'a [Vec<f64>],
    gains: &'a [f64],
    sigma: f64,
    symbols: ChaCha8Rng,
    noise: ChaCha8Rng,
}

impl<'a> MacSampleStream<'a> {
    pub fn new(
        levels: &'a [Vec<f64>],
        gains: &'a [f64],
        sigma2: f64,
        seed: u64,
        point: u64,
    ) -> Self {
        MacSampleStream {
            levels,
            gains,
            sigma: sigma2.sqrt(),
            symbols: substream(seed, point, 0),
            noise: substream(seed, point, 1),
        }
    }

    /// Fills `sent` with the transmitted indices and returns the received y.
    pub fn next_sample(&mut self, sent: &mut Vec<usize>) -> f64 {
        sent.clear();
        let mut y = 0.0;
        for (tx, &h) in self.levels.iter().zip(self.gains) {
            let q = self.symbols.gen_range(0..tx.len());
            y += tx[q] * h;
            sent.push(q);
        }
        let z: f64 = StandardNormal.sample(&mut self.noise);
        y + self.sigma * z
    }
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityCount {
    pub bits: u64,
    pub errors: u64,
}

impl EntityCount {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }
}

/// Counts at one SNR grid point, one entry per transmitter/user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub entities: Vec<EntityCount>,
}

impl BerPoint {
    /// Mean of the per-entity BERs.
    pub fn average_ber(&self) -> f64 {
        self.entities.iter().map(|e| e.ber()).sum::<f64>() / self.entities.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerResult {
    pub points: Vec<BerPoint>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("SNR grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("SNR grid must be strictly ascending".into()));
    }
    Ok(())
}

fn check_level_shapes(levels: &[Vec<f64>]) -> Result<Vec<u32>> {
    if levels.is_empty() {
        return Err(Error::Config("no level sets".into()));
    }
    levels
        .iter()
        .map(|tx| {
            if tx.len() < 2 || !tx.len().is_power_of_two() {
                Err(Error::Config(format!(
                    "level-set size {} is not a power of two >= 2",
                    tx.len()
                )))
            } else {
                Ok(tx.len().trailing_zeros())
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// MAC sweep
// ---------------------------------------------------------------------------

/// Monte Carlo sweep over an ascending SNR grid for the MAC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacSweep {
    /// Normalized per-transmitter levels in decode order.
    pub levels: Vec<Vec<f64>>,
    pub gains: Vec<f64>,
    pub snr_grid_db: Vec<f64>,
    /// Aggregate bits simulated per grid point (all transmitters together).
    pub bits_per_point: u64,
    pub seed: u64,
    pub decoder: DecoderSpec,
    pub mapping: BitMapping,
}

/// Runs the MAC BER sweep. Grid points execute in parallel; results are
/// bit-identical for any thread count.
pub fn run_ber_mac(sweep: &MacSweep) -> Result<BerResult> {
    check_grid(&sweep.snr_grid_db)?;
    let etas = check_level_shapes(&sweep.levels)?;
    if sweep.levels.len() != sweep.gains.len() {
        return Err(Error::Config("levels/gains length mismatch".into()));
    }
    sweep.decoder.validate(sweep.levels.len())?;
    let sum_eta: u64 = etas.iter().map(|&e| e as u64).sum();
    let samples = sweep.bits_per_point.div_ceil(sum_eta).max(1);

    let points: Vec<Result<BerPoint>> = sweep
        .snr_grid_db
        .par_iter()
        .enumerate()
        .map(|(p, &snr_db)| {
            let sigma2 = noise_for_snr(&sweep.levels, &sweep.gains, snr_db);
            let mut stream =
                MacSampleStream::new(&sweep.levels, &sweep.gains, sigma2, sweep.seed, p as u64);
            let mut errors = vec![0u64; sweep.levels.len()];
            let mut sent = Vec::with_capacity(sweep.levels.len());
            for _ in 0..samples {
                let y = stream.next_sample(&mut sent);
                let decoded = decode(y, &sweep.levels, &sweep.gains, sweep.decoder)?;
                for (x, (&tx, &rx)) in sent.iter().zip(&decoded.0).enumerate() {
                    errors[x] += bit_errors(tx, rx, sweep.mapping);
                }
            }
            Ok(BerPoint {
                snr_db,
                entities: etas
                    .iter()
                    .zip(&errors)
                    .map(|(&eta, &e)| EntityCount { bits: samples * eta as u64, errors: e })
                    .collect(),
            })
        })
        .collect();

    Ok(BerResult { points: points.into_iter().collect::<Result<_>>()? })
}

// ---------------------------------------------------------------------------
// BC sweep
// ---------------------------------------------------------------------------

/// Monte Carlo sweep for the broadcast channel. Each user's noise variance is
/// driven so that its own average SNR sits at the grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcSweep {
    pub config: BcConfig,
    pub snr_grid_db: Vec<f64>,
    pub bits_per_point: u64,
    pub seed: u64,
    pub mapping: BitMapping,
}

pub fn run_ber_bc(sweep: &BcSweep) -> Result<BerResult> {
    check_grid(&sweep.snr_grid_db)?;
    sweep.config.validate()?;
    let etas = check_level_shapes(&sweep.config.levels)?;
    let k = sweep.config.user_count();
    let sum_eta: u64 = etas.iter().map(|&e| e as u64).sum();
    let samples = sweep.bits_per_point.div_ceil(sum_eta).max(1);

    let points: Vec<Result<BerPoint>> = sweep
        .snr_grid_db
        .par_iter()
        .enumerate()
        .map(|(p, &snr_db)| {
            let sigmas: Vec<f64> = (0..k)
                .map(|a| bc_noise_for_snr(&sweep.config, a, snr_db).sqrt())
                .collect();
            let mut symbols = substream(sweep.seed, p as u64, 0);
            let mut noise: Vec<ChaCha8Rng> =
                (0..k).map(|a| substream(sweep.seed, p as u64, 1 + a as u64)).collect();
            let mut errors = vec![0u64; k];
            let mut sent = vec![0usize; k];
            for _ in 0..samples {
                for (a, q) in sent.iter_mut().enumerate() {
                    *q = symbols.gen_range(0..sweep.config.levels[a].len());
                }
                let s = superpose(&sweep.config, &sent)?;
                for a in 0..k {
                    let z: f64 = StandardNormal.sample(&mut noise[a]);
                    let y = s * sweep.config.gains[a] + sigmas[a] * z;
                    let decoded = crate::broadcast::bc_user_decode(y, &sweep.config, a)?;
                    errors[a] += bit_errors(sent[a], decoded.own_index(), sweep.mapping);
                }
            }
            Ok(BerPoint {
                snr_db,
                entities: etas
                    .iter()
                    .zip(&errors)
                    .map(|(&eta, &e)| EntityCount { bits: samples * eta as u64, errors: e })
                    .collect(),
            })
        })
        .collect();

    Ok(BerResult { points: points.into_iter().collect::<Result<_>>()? })
}

// ---------------------------------------------------------------------------
// PAM-TDMA baseline
// ---------------------------------------------------------------------------

/// Declared orthogonal baseline: L entities share the channel in time, each
/// slot carries a unipolar equally spaced 2^{Lη_x}-level PAM symbol with peak
/// level equal to the power budget, detected by ML. Aggregate spectral
/// efficiency matches the NOMA system's Σ η_x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmaSweep {
    pub etas: Vec<u32>,
    pub gains: Vec<f64>,
    pub power: f64,
    pub snr_grid_db: Vec<f64>,
    pub bits_per_point: u64,
    pub seed: u64,
    pub mapping: BitMapping,
    /// false: shared receiver noise (MAC); true: per-user noise driven to the
    /// grid SNR (BC).
    pub per_entity_noise: bool,
}

fn pam_levels(bits: u32, power: f64) -> Vec<f64> {
    let n = 1usize << bits;
    let step = power / (n - 1) as f64;
    (0..n).map(|i| i as f64 * step).collect()
}

/// ML detection over equally spaced unipolar PAM is index rounding.
fn pam_detect(y: f64, gain: f64, step: f64, n: usize) -> usize {
    let q = (y / (gain * step)).round();
    if q < 0.0 {
        0
    } else if q >= n as f64 {
        n - 1
    } else {
        q as usize
    }
}

pub fn oma_baseline_ber(sweep: &OmaSweep) -> Result<BerResult> {
    check_grid(&sweep.snr_grid_db)?;
    if sweep.etas.is_empty() || sweep.etas.iter().any(|&e| e == 0) {
        return Err(Error::Config("spectral efficiencies must be >= 1".into()));
    }
    if sweep.etas.len() != sweep.gains.len() {
        return Err(Error::Config("etas/gains length mismatch".into()));
    }
    let l = sweep.etas.len();
    let bits_per_symbol: Vec<u32> = sweep.etas.iter().map(|&e| e * l as u32).collect();
    if bits_per_symbol.iter().any(|&b| b > 20) {
        return Err(Error::Capacity("PAM order above 2^20 levels".into()));
    }
    let levels: Vec<Vec<f64>> = bits_per_symbol
        .iter()
        .map(|&b| pam_levels(b, sweep.power))
        .collect();
    let sum_eta: u64 = sweep.etas.iter().map(|&e| e as u64).sum();
    let channel_uses = sweep.bits_per_point.div_ceil(sum_eta).max(1);
    let slots = channel_uses.div_ceil(l as u64).max(1);

    // Average transmitted signal power over entities and levels drives the
    // shared-noise grid; per-entity noise uses only that entity's slots.
    let shared_power: f64 = levels
        .iter()
        .zip(&sweep.gains)
        .map(|(lv, &g)| lv.iter().map(|&u| (u * g).powi(2)).sum::<f64>() / lv.len() as f64)
        .sum::<f64>()
        / l as f64;

    let points: Vec<Result<BerPoint>> = sweep
        .snr_grid_db
        .par_iter()
        .enumerate()
        .map(|(p, &snr_db)| {
            let gamma = 10f64.powf(snr_db / 10.0);
            let mut entities = Vec::with_capacity(l);
            for x in 0..l {
                let lv = &levels[x];
                let n = lv.len();
                let step = sweep.power / (n - 1) as f64;
                let sigma2 = if sweep.per_entity_noise {
                    lv.iter().map(|&u| (u * sweep.gains[x]).powi(2)).sum::<f64>()
                        / n as f64
                        / gamma
                } else {
                    shared_power / gamma
                };
                let sigma = sigma2.sqrt();
                let mut symbols = substream(sweep.seed, p as u64, 2 * x as u64);
                let mut noise = substream(sweep.seed, p as u64, 2 * x as u64 + 1);
                let mut errors = 0u64;
                for _ in 0..slots {
                    let q = symbols.gen_range(0..n);
                    let z: f64 = StandardNormal.sample(&mut noise);
                    let y = lv[q] * sweep.gains[x] + sigma * z;
                    let qhat = pam_detect(y, sweep.gains[x], step, n);
                    errors += bit_errors(q, qhat, sweep.mapping);
                }
                entities.push(EntityCount { bits: slots * bits_per_symbol[x] as u64, errors });
            }
            Ok(BerPoint { snr_db, entities })
        })
        .collect();

    Ok(BerResult { points: points.into_iter().collect::<Result<_>>()? })
}

// ---------------------------------------------------------------------------
// Optimal hybrid split
// ---------------------------------------------------------------------------

/// BER target 10^{−v} on one transmitter at an SNR cap Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalMQuery {
    pub v: u32,
    pub gamma_db: f64,
    /// Decode-order index of the constrained transmitter (zero-based).
    pub target_tx: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCandidate {
    pub m: usize,
    pub computations: u64,
    pub target_ber: f64,
    pub meets_target: bool,
}

/// Search outcome: the cheapest split meeting the target, or explicit
/// infeasibility with every evaluated candidate attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalMOutcome {
    pub m_hat: Option<usize>,
    pub computations: Option<u64>,
    pub target_ber: Option<f64>,
    pub evaluated: Vec<MCandidate>,
}

impl OptimalMOutcome {
    pub fn feasible(&self) -> bool {
        self.m_hat.is_some()
    }
}

/// Evaluates hybrid splits in ascending computation count and returns the
/// first whose estimated target-transmitter BER at Γ meets 10^{−v}.
pub fn find_optimal_m(
    query: &OptimalMQuery,
    levels: &[Vec<f64>],
    gains: &[f64],
    bits_per_point: u64,
    seed: u64,
    mapping: BitMapping,
) -> Result<OptimalMOutcome> {
    let l = levels.len();
    if l < 2 {
        return Err(Error::Config("optimal-M search needs at least 2 transmitters".into()));
    }
    if query.v == 0 {
        return Err(Error::Config("v must be a positive integer".into()));
    }
    if query.target_tx >= l {
        return Err(Error::Config(format!("target transmitter {} out of range", query.target_tx)));
    }
    let etas = check_level_shapes(levels)?;

    let mut candidates: Vec<(usize, u64)> = std::iter::once(0usize)
        .chain(2..=l)
        .map(|m| {
            crate::complexity::mac_ml_count(DecoderSpec::Hybrid { m }, &etas.iter().map(|&e| e).collect::<Vec<_>>())
                .map(|c| (m, c))
        })
        .collect::<Result<_>>()?;
    candidates.sort_by_key(|&(m, c)| (c, m));

    let target = 10f64.powi(-(query.v as i32));
    let mut evaluated = Vec::new();
    for (m, computations) in candidates {
        let sweep = MacSweep {
            levels: levels.to_vec(),
            gains: gains.to_vec(),
            snr_grid_db: vec![query.gamma_db],
            bits_per_point,
            seed,
            decoder: DecoderSpec::Hybrid { m },
            mapping,
        };
        let result = run_ber_mac(&sweep)?;
        let ber = result.points[0].entities[query.target_tx].ber();
        let meets = ber <= target;
        evaluated.push(MCandidate { m, computations, target_ber: ber, meets_target: meets });
        if meets {
            return Ok(OptimalMOutcome {
                m_hat: Some(m),
                computations: Some(computations),
                target_ber: Some(ber),
                evaluated,
            });
        }
    }
    Ok(OptimalMOutcome { m_hat: None, computations: None, target_ber: None, evaluated })
}

//! Multiple-access-channel receivers: SIC, joint ML, and the M JML +
//! (L−M) SIC hybrid.
//!
//! All decoders operate on a single received scalar, a per-transmitter level
//! table in decode order (index 0 decoded first), and the matching gains.
//! Ties at equidistant candidates break to the lowest index; for the joint
//! search that means the lexicographically smallest index vector. Indices are
//! zero-based throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the joint-search product set.
pub const JML_GUARD: u64 = 1 << 24;

/// Which receiver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum DecoderSpec {
    Sic,
    Jml,
    /// Joint ML over the first `m` decode ranks, SIC for the rest.
    /// `m = 0` is plain SIC, `m = L` plain JML; `m = 1` is not a valid split.
    Hybrid { m: usize },
}

impl DecoderSpec {
    pub fn validate(&self, l: usize) -> Result<()> {
        if let DecoderSpec::Hybrid { m } = *self {
            if m == 1 || m > l {
                return Err(Error::Config(format!(
                    "hybrid prefix size must be 0 or in 2..={l}, got {m}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-transmitter estimated constellation indices, decode order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedIndices(pub Vec<usize>);

#[inline]
fn nearest(levels: &[f64], gain: f64, target: f64) -> usize {
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (q, &p) in levels.iter().enumerate() {
        let dist = (target - p * gain).abs();
        if dist < best_dist {
            best_dist = dist;
            best = q;
        }
    }
    best
}

/// Successive interference cancellation: decode rank by rank, subtracting
/// each estimate before the next.
pub fn sic_decode(y: f64, levels: &[Vec<f64>], gains: &[f64]) -> DecodedIndices {
    let mut residual = y;
    let mut out = Vec::with_capacity(levels.len());
    for (tx, gain) in levels.iter().zip(gains) {
        let q = nearest(tx, *gain, residual);
        residual -= tx[q] * gain;
        out.push(q);
    }
    DecodedIndices(out)
}

fn product_size(levels: &[Vec<f64>]) -> u64 {
    levels
        .iter()
        .fold(1u64, |acc, tx| acc.saturating_mul(tx.len() as u64))
}

// Odometer search over the index product set of `levels[..take]`, in
// lexicographic order so the strict `<` keeps the smallest tying vector.
fn joint_argmin(y: f64, levels: &[Vec<f64>], gains: &[f64], take: usize) -> Vec<usize> {
    let mut idx = vec![0usize; take];
    let mut best = idx.clone();
    let mut best_dist = f64::INFINITY;
    loop {
        let sum: f64 = (0..take).map(|x| levels[x][idx[x]] * gains[x]).sum();
        let dist = (y - sum).abs();
        if dist < best_dist {
            best_dist = dist;
            best.copy_from_slice(&idx);
        }
        // advance odometer, last index fastest
        let mut pos = take;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < levels[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Joint maximum likelihood over the full product set.
pub fn jml_decode(y: f64, levels: &[Vec<f64>], gains: &[f64]) -> Result<DecodedIndices> {
    let size = product_size(levels);
    if size > JML_GUARD {
        return Err(Error::Capacity(format!(
            "joint search over {size} combinations exceeds the {JML_GUARD} guard"
        )));
    }
    Ok(DecodedIndices(joint_argmin(y, levels, gains, levels.len())))
}

/// Joint ML over the first `m` decode ranks (remaining transmitters treated
/// as noise), then SIC over the rest.
pub fn hybrid_decode(y: f64, levels: &[Vec<f64>], gains: &[f64], m: usize) -> Result<DecodedIndices> {
    let l = levels.len();
    DecoderSpec::Hybrid { m }.validate(l)?;
    if m == 0 {
        return Ok(sic_decode(y, levels, gains));
    }
    let size = product_size(&levels[..m]);
    if size > JML_GUARD {
        return Err(Error::Capacity(format!(
            "joint prefix search over {size} combinations exceeds the {JML_GUARD} guard"
        )));
    }
    let mut out = joint_argmin(y, levels, gains, m);
    let mut residual = y;
    for x in 0..m {
        residual -= levels[x][out[x]] * gains[x];
    }
    for x in m..l {
        let q = nearest(&levels[x], gains[x], residual);
        residual -= levels[x][q] * gains[x];
        out.push(q);
    }
    Ok(DecodedIndices(out))
}

/// Dispatches on the decoder spec.
pub fn decode(y: f64, levels: &[Vec<f64>], gains: &[f64], spec: DecoderSpec) -> Result<DecodedIndices> {
    match spec {
        DecoderSpec::Sic => Ok(sic_decode(y, levels, gains)),
        DecoderSpec::Jml => jml_decode(y, levels, gains),
        DecoderSpec::Hybrid { m } => hybrid_decode(y, levels, gains, m),
    }
}

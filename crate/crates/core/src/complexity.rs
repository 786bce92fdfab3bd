//! Closed-form operation counting for the MAC decoders, the two-user BC
//! comparison table, and the JML-vs-OMA computation bound. Everything is
//! exact integer arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mac::DecoderSpec;

fn pow2(exp: u64) -> Result<u64> {
    if exp >= 64 {
        return Err(Error::Domain(format!("2^{exp} overflows the exact counter")));
    }
    Ok(1u64 << exp)
}

fn checked_sum<I: Iterator<Item = Result<u64>>>(it: I) -> Result<u64> {
    let mut acc = 0u64;
    for v in it {
        acc = acc
            .checked_add(v?)
            .ok_or_else(|| Error::Domain("operation count overflow".into()))?;
    }
    Ok(acc)
}

fn checked_prod<I: Iterator<Item = Result<u64>>>(it: I) -> Result<u64> {
    let mut acc = 1u64;
    for v in it {
        acc = acc
            .checked_mul(v?)
            .ok_or_else(|| Error::Domain("operation count overflow".into()))?;
    }
    Ok(acc)
}

/// ML computation count of a MAC receiver:
/// JML → Π 2^η, SIC → Σ 2^η, hybrid → Π_{x≤M} 2^η + Σ_{x>M} 2^η.
pub fn mac_ml_count(spec: DecoderSpec, etas: &[u32]) -> Result<u64> {
    if etas.is_empty() || etas.iter().any(|&e| e == 0) {
        return Err(Error::Config("spectral efficiencies must be >= 1".into()));
    }
    spec.validate(etas.len())?;
    match spec {
        DecoderSpec::Jml => checked_prod(etas.iter().map(|&e| pow2(e as u64))),
        DecoderSpec::Sic => checked_sum(etas.iter().map(|&e| pow2(e as u64))),
        DecoderSpec::Hybrid { m } => {
            if m == 0 {
                return mac_ml_count(DecoderSpec::Sic, etas);
            }
            let joint = checked_prod(etas[..m].iter().map(|&e| pow2(e as u64)))?;
            let tail = checked_sum(etas[m..].iter().map(|&e| pow2(e as u64)))?;
            joint
                .checked_add(tail)
                .ok_or_else(|| Error::Domain("operation count overflow".into()))
        }
    }
}

/// OMA computation count at equal system spectral efficiency: Σ 2^{Lη_i}.
pub fn oma_ml_count(etas: &[u32]) -> Result<u64> {
    let l = etas.len() as u64;
    checked_sum(etas.iter().map(|&e| pow2(l * e as u64)))
}

/// Both sides of the JML-vs-OMA computation bound L·2^{Ση} ≤ Σ 2^{Lη_i}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityCheck {
    /// L·2^{Σ η_i}, the average JML computations.
    pub jml_side: u64,
    /// Σ 2^{L η_i}, the OMA computations.
    pub oma_side: u64,
    pub holds: bool,
}

/// Evaluates the bound for L ≥ 2 transmitters. It holds for every η_i ≥ 1.
pub fn jml_vs_oma_inequality(etas: &[u32]) -> Result<InequalityCheck> {
    let l = etas.len() as u64;
    if l < 2 {
        return Err(Error::Domain("the bound requires at least 2 transmitters".into()));
    }
    if etas.iter().any(|&e| e == 0) {
        return Err(Error::Config("spectral efficiencies must be >= 1".into()));
    }
    let sum_eta: u64 = etas.iter().map(|&e| e as u64).sum();
    let jml_side = l
        .checked_mul(pow2(sum_eta)?)
        .ok_or_else(|| Error::Domain("operation count overflow".into()))?;
    let oma_side = oma_ml_count(etas)?;
    Ok(InequalityCheck { jml_side, oma_side, holds: jml_side <= oma_side })
}

/// One row of the two-user BC complexity comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BcComplexityRow {
    pub scheme: &'static str,
    pub ml_computations: u64,
    /// FFT/IFFT real multiplications; OFDM schemes only.
    pub real_multiplications: Option<u64>,
    /// FFT/IFFT real additions; OFDM schemes only.
    pub real_additions: Option<u64>,
    /// DC bias addition/removal operations; OFDM schemes only.
    pub dc_bias_ops: Option<u64>,
}

/// Two-user BC comparison: proposed NOMA, DCO-OFDM NOMA with a split-radix
/// N-point FFT, and OMA. `n_fft` must be a power of two.
pub fn bc_complexity_table(eta1: u32, eta2: u32, n_fft: u64) -> Result<Vec<BcComplexityRow>> {
    if eta1 == 0 || eta2 == 0 {
        return Err(Error::Config("spectral efficiencies must be >= 1".into()));
    }
    if n_fft < 2 || !n_fft.is_power_of_two() {
        return Err(Error::Config(format!("FFT size must be a power of two, got {n_fft}")));
    }
    // Σ_{i=1}^{2} Σ_{j=1}^{i} 2^{η_j} = 2·2^{η₁} + 2^{η₂}
    let noma_ml = 2 * pow2(eta1 as u64)? + pow2(eta2 as u64)?;
    // 0.5·(2^{2η₁} + 2^{2η₂}); both terms even for η ≥ 1 so this stays exact.
    let oma_ml = (pow2(2 * eta1 as u64)? + pow2(2 * eta2 as u64)?) / 2;
    let log2n = n_fft.trailing_zeros() as u64;
    let mults = 5 * (n_fft * log2n - 3 * n_fft + 4);
    let adds = 5 * (3 * n_fft * log2n - 3 * n_fft + 4);
    let dc = 3 * n_fft;
    Ok(vec![
        BcComplexityRow {
            scheme: "proposed NOMA",
            ml_computations: noma_ml,
            real_multiplications: None,
            real_additions: None,
            dc_bias_ops: None,
        },
        BcComplexityRow {
            scheme: "DCO-OFDM NOMA",
            ml_computations: noma_ml,
            real_multiplications: Some(mults),
            real_additions: Some(adds),
            dc_bias_ops: Some(dc),
        },
        BcComplexityRow {
            scheme: "OMA",
            ml_computations: oma_ml,
            real_multiplications: None,
            real_additions: None,
            dc_bias_ops: None,
        },
    ])
}

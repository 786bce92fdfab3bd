//! Power-domain constellation synthesis.
//!
//! Each transmitter gets a set of integer power levels; the recursion spaces
//! transmitter x's levels far enough apart that the summed interference from
//! all weaker-power transmitters stays below half a level spacing, which is
//! the zero-BER condition under zero noise and perfect CSI. Transmitter
//! indexing follows ascending channel gain: index 0 has the lowest gain, the
//! highest powers, and the first decode rank.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One transmitter's spectral efficiency and channel gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TxProfile {
    /// Spectral efficiency η, bits per channel use.
    pub eta: u32,
    /// Channel gain h (sorted ascending across profiles).
    pub gain: f64,
}

/// How the first level of each transmitter is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenMode {
    /// P_x^1 = 2^{η_{x+1}} + 1. For L ≥ 3 this can seed below the next
    /// transmitter's top level; `validate` reports the resulting ordering
    /// violation instead of fixing it.
    Verbatim,
    /// P_x^1 = ⌊P_{x+1}^{max}·h_{x+1}/h_x⌋ + 1, the smallest integer keeping
    /// the received-power ordering intact for any L.
    Strict,
}

/// Integer power levels straight out of the generation recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawConstellation {
    /// levels[x][q] = P_x^{q+1}, strictly increasing in q.
    pub levels: Vec<Vec<u64>>,
    /// Per-transmitter constant spacing λ_x.
    pub spacings: Vec<u64>,
    /// Per-transmitter spectral efficiency.
    pub etas: Vec<u32>,
    /// Gains the recursion was run with (ascending).
    pub gains: Vec<f64>,
}

impl RawConstellation {
    pub fn levels_f64(&self) -> Vec<Vec<f64>> {
        self.levels
            .iter()
            .map(|tx| tx.iter().map(|&p| p as f64).collect())
            .collect()
    }
}

/// Real-valued transmit levels after sum-normalization and brightness scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedConstellation {
    /// levels[x][q] = P̃_x^{q+1}.
    pub levels: Vec<Vec<f64>>,
    /// Brightness scale applied after sum-normalization.
    pub beta: f64,
    /// Power budget 𝒫; Σ_x max_q levels[x][q] == 𝒫.
    pub power: f64,
    pub etas: Vec<u32>,
    pub gains: Vec<f64>,
}

// Integer levels above this lose exactness in the f64 recursion.
const MAX_LEVEL: u64 = 1 << 53;

/// Runs the constellation recursion for profiles sorted by ascending gain.
///
/// Transmitter L−1 (highest gain, lowest power) gets 1…2^η; every earlier
/// transmitter is seeded per `mode` and then stepped by
/// λ_x = ⌊(2/h_x)·Σ_{r>x} P_r^{max} h_r + 1⌋.
pub fn generate_constellations(profiles: &[TxProfile], mode: GenMode) -> Result<RawConstellation> {
    if profiles.is_empty() {
        return Err(Error::Config("no transmitter profiles given".into()));
    }
    for p in profiles {
        if p.eta == 0 {
            return Err(Error::Config("spectral efficiency must be >= 1".into()));
        }
        if p.eta > 20 {
            return Err(Error::Config(format!("spectral efficiency {} too large", p.eta)));
        }
        if !(p.gain > 0.0 && p.gain.is_finite()) {
            return Err(Error::Config(format!("gain must be positive, got {}", p.gain)));
        }
    }
    if profiles.windows(2).any(|w| w[0].gain > w[1].gain) {
        return Err(Error::Config(
            "profiles must be sorted by ascending gain (decode order)".into(),
        ));
    }

    let l = profiles.len();
    let mut levels: Vec<Vec<u64>> = vec![Vec::new(); l];
    let mut spacings: Vec<u64> = vec![0; l];

    // Highest-gain transmitter: plain integers 1 … 2^η.
    let q_last = 1u64 << profiles[l - 1].eta;
    levels[l - 1] = (1..=q_last).collect();
    spacings[l - 1] = 1;

    for x in (0..l.saturating_sub(1)).rev() {
        let h_x = profiles[x].gain;
        // Interference ceiling: sum of every weaker-power transmitter's top
        // level weighted by its gain.
        let interference: f64 = (x + 1..l)
            .map(|r| *levels[r].last().unwrap() as f64 * profiles[r].gain)
            .sum();
        let first = match mode {
            GenMode::Verbatim => (1u64 << profiles[x + 1].eta) + 1,
            GenMode::Strict => {
                let next_top = *levels[x + 1].last().unwrap();
                let scaled = (next_top as f64 * profiles[x + 1].gain / h_x).floor() as u64 + 1;
                scaled.max(next_top + 1)
            }
        };
        let spacing = (2.0 / h_x * interference + 1.0).floor();
        if !spacing.is_finite() || spacing as u64 >= MAX_LEVEL {
            return Err(Error::Domain("constellation levels overflow exact range".into()));
        }
        let spacing = spacing as u64;
        let n_levels = 1u64 << profiles[x].eta;
        let mut tx = Vec::with_capacity(n_levels as usize);
        let mut level = first;
        for q in 0..n_levels {
            if level >= MAX_LEVEL {
                return Err(Error::Domain("constellation levels overflow exact range".into()));
            }
            tx.push(level);
            if q + 1 < n_levels {
                level += spacing;
            }
        }
        levels[x] = tx;
        spacings[x] = spacing;
    }

    Ok(RawConstellation {
        levels,
        spacings,
        etas: profiles.iter().map(|p| p.eta).collect(),
        gains: profiles.iter().map(|p| p.gain).collect(),
    })
}

/// Sum-normalizes the raw levels, then scales so the per-channel-use peak
/// sum Σ_x P̃_x^{max} equals the power budget exactly.
pub fn normalize(raw: &RawConstellation, power: f64) -> Result<NormalizedConstellation> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::Domain(format!("power budget must be positive, got {power}")));
    }
    let total: f64 = raw.levels.iter().flatten().map(|&p| p as f64).sum();
    let peak: f64 = raw.levels.iter().map(|tx| *tx.last().unwrap() as f64).sum();
    let beta = power * total / peak;
    let scale = power / peak;
    let levels = raw
        .levels
        .iter()
        .map(|tx| tx.iter().map(|&p| p as f64 * scale).collect())
        .collect();
    Ok(NormalizedConstellation {
        levels,
        beta,
        power,
        etas: raw.etas.clone(),
        gains: raw.gains.clone(),
    })
}

/// A received-power ordering violation: transmitter `tx` at level `q` does
/// not dominate transmitter `tx + 1` at level `next_q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingViolation {
    pub tx: usize,
    pub q: usize,
    pub next_q: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// A zero-BER margin violation at transmitter `tx`, level `q`: the summed
/// interference pushes the received point past the decision midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroBerViolation {
    pub tx: usize,
    pub q: usize,
    pub lhs: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ordering: Vec<OrderingViolation>,
    pub zero_ber: Vec<ZeroBerViolation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.ordering.is_empty() && self.zero_ber.is_empty()
    }
}

/// Checks the SIC ordering condition (all level pairs of adjacent decode
/// ranks) and the zero-BER condition (every sub-top level of every
/// transmitter) against the supplied gains. Works on raw or normalized
/// levels alike.
pub fn validate(levels: &[Vec<f64>], gains: &[f64]) -> Result<ValidationReport> {
    if levels.len() != gains.len() {
        return Err(Error::Config(format!(
            "{} level sets but {} gains",
            levels.len(),
            gains.len()
        )));
    }
    if levels.is_empty() {
        return Err(Error::Config("empty constellation".into()));
    }
    let l = levels.len();
    let mut report = ValidationReport::default();

    // Ordering: P_x^q h_x > P_{x+1}^{q'} h_{x+1} for every pair (q, q').
    // Equivalent to min over x beating max over x+1, but reported per pair.
    for x in 0..l - 1 {
        for (q, &p) in levels[x].iter().enumerate() {
            for (next_q, &p_next) in levels[x + 1].iter().enumerate() {
                let lhs = p * gains[x];
                let rhs = p_next * gains[x + 1];
                if lhs <= rhs {
                    report.ordering.push(OrderingViolation { tx: x, q, next_q, lhs, rhs });
                }
            }
        }
    }

    // Zero-BER: P_x^q h_x + Σ_{r>x} P_r^max h_r < (P_x^{q+1} + P_x^q) h_x / 2.
    for x in 0..l {
        let interference: f64 = (x + 1..l)
            .map(|r| levels[r].last().unwrap() * gains[r])
            .sum();
        for q in 0..levels[x].len() - 1 {
            let lhs = levels[x][q] * gains[x] + interference;
            let bound = (levels[x][q + 1] + levels[x][q]) * gains[x] / 2.0;
            if lhs >= bound {
                report.zero_ber.push(ZeroBerViolation { tx: x, q, lhs, bound });
            }
        }
    }

    Ok(report)
}

impl NormalizedConstellation {
    /// Renders the constellation as a plain-text table, one row per
    /// transmitter: index, η, λ (raw spacing if supplied), levels.
    pub fn to_table(&self, raw: Option<&RawConstellation>) -> String {
        let mut out = String::from("tx\teta\tlambda\tlevels\n");
        for (x, tx) in self.levels.iter().enumerate() {
            let lambda = raw
                .map(|r| r.spacings[x].to_string())
                .unwrap_or_else(|| "-".into());
            let lv: Vec<String> = tx.iter().map(|p| format!("{p}")).collect();
            out.push_str(&format!("{}\t{}\t{}\t{}\n", x + 1, self.etas[x], lambda, lv.join(",")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn profiles(etas: &[u32], gains: &[f64]) -> Vec<TxProfile> {
        etas.iter()
            .zip(gains)
            .map(|(&eta, &gain)| TxProfile { eta, gain })
            .collect()
    }

    #[test]
    fn two_tx_unit_gains() {
        let raw = generate_constellations(&profiles(&[1, 1], &[1.0, 1.0]), GenMode::Verbatim)
            .unwrap();
        assert_eq!(raw.levels[1], vec![1, 2]);
        assert_eq!(raw.levels[0], vec![3, 8]);
        assert_eq!(raw.spacings, vec![5, 1]);
    }

    #[test]
    fn single_tx_is_plain_integers() {
        let raw = generate_constellations(&profiles(&[2], &[1.0]), GenMode::Verbatim).unwrap();
        assert_eq!(raw.levels[0], vec![1, 2, 3, 4]);
    }

    #[test]
    fn unsorted_gains_rejected() {
        assert!(generate_constellations(&profiles(&[1, 1], &[1.0, 0.5]), GenMode::Verbatim)
            .is_err());
    }

    #[test]
    fn two_tx_unequal_gains() {
        let raw = generate_constellations(&profiles(&[1, 1], &[0.5, 1.0]), GenMode::Verbatim)
            .unwrap();
        assert_eq!(raw.levels[1], vec![1, 2]);
        // Δ₁² = (2/0.5)·(2·1) + 3 = 11 → next level 12.
        assert_eq!(raw.levels[0], vec![3, 12]);
    }

    #[test]
    fn empty_profiles_rejected() {
        assert!(generate_constellations(&[], GenMode::Verbatim).is_err());
    }

    #[test]
    fn normalize_two_tx_example() {
        let raw = generate_constellations(&profiles(&[1, 1], &[1.0, 1.0]), GenMode::Verbatim)
            .unwrap();
        let norm = normalize(&raw, 1.0).unwrap();
        assert_relative_eq!(norm.levels[0][0], 0.3, epsilon = 1e-12);
        assert_relative_eq!(norm.levels[0][1], 0.8, epsilon = 1e-12);
        assert_relative_eq!(norm.levels[1][0], 0.1, epsilon = 1e-12);
        assert_relative_eq!(norm.levels[1][1], 0.2, epsilon = 1e-12);
        assert_relative_eq!(norm.beta, 1.4, epsilon = 1e-12);
        assert_relative_eq!(norm.levels[0][1] + norm.levels[1][1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalize_single_tx() {
        let raw = generate_constellations(&profiles(&[1], &[1.0]), GenMode::Verbatim).unwrap();
        let norm = normalize(&raw, 1.0).unwrap();
        assert_relative_eq!(norm.levels[0][0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(norm.levels[0][1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(norm.beta, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn normalize_scales_linearly_in_budget() {
        let raw = generate_constellations(&profiles(&[2, 1], &[1.0, 2.0]), GenMode::Verbatim)
            .unwrap();
        let one = normalize(&raw, 1.0).unwrap();
        let two = normalize(&raw, 2.0).unwrap();
        for (a, b) in one.levels.iter().flatten().zip(two.levels.iter().flatten()) {
            assert_relative_eq!(b, &(2.0 * a), epsilon = 1e-12);
        }
    }

    #[test]
    fn validate_passes_generated_pair() {
        let gains = [1.0, 1.0];
        let levels = vec![vec![3.0, 8.0], vec![1.0, 2.0]];
        let report = validate(&levels, &gains).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn validate_flags_zero_ber_violation() {
        let levels = vec![vec![3.0, 6.0], vec![1.0, 2.0]];
        let report = validate(&levels, &[1.0, 1.0]).unwrap();
        assert!(report.ordering.is_empty());
        assert_eq!(report.zero_ber.len(), 1);
        assert_eq!(report.zero_ber[0].tx, 0);
        // 3 + 2 = 5 >= (6 + 3)/2 = 4.5
        assert_relative_eq!(report.zero_ber[0].lhs, 5.0, epsilon = 1e-12);
        assert_relative_eq!(report.zero_ber[0].bound, 4.5, epsilon = 1e-12);
    }

    #[test]
    fn verbatim_three_tx_breaks_ordering_strict_does_not() {
        let profs = profiles(&[1, 1, 1], &[1.0, 1.0, 1.0]);
        let raw = generate_constellations(&profs, GenMode::Verbatim).unwrap();
        assert_eq!(raw.levels[2], vec![1, 2]);
        assert_eq!(raw.levels[1], vec![3, 8]);
        assert_eq!(raw.levels[0][0], 3);
        let report = validate(&raw.levels_f64(), &raw.gains).unwrap();
        assert!(!report.ordering.is_empty());

        let strict = generate_constellations(&profs, GenMode::Strict).unwrap();
        assert_eq!(strict.levels[1], vec![3, 8]);
        assert_eq!(strict.levels[0], vec![9, 30]);
        let report = validate(&strict.levels_f64(), &strict.gains).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn validate_rejects_shape_mismatch() {
        assert!(validate(&[vec![1.0, 2.0]], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn spacing_constant_across_levels() {
        for etas in [[2u32, 3], [3, 1]] {
            let raw = generate_constellations(&profiles(&etas, &[1e-6, 3e-6]), GenMode::Verbatim)
                .unwrap();
            for (tx, &lam) in raw.levels.iter().zip(&raw.spacings) {
                for w in tx.windows(2) {
                    assert_eq!(w[1] - w[0], lam);
                }
            }
        }
    }
}

//! Broadcast channel: one transmitter superposes every user's level, each
//! user receives through its own gain and peels off earlier decode ranks
//! with SIC before reading its own index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Broadcast-side configuration: per-user normalized levels in decode order
/// (ascending gain) and the matching user gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcConfig {
    /// levels[α][r] = Ũ_α^{r+1}, strictly increasing in r.
    pub levels: Vec<Vec<f64>>,
    /// Channel gain g_α between the transmitter and user α.
    pub gains: Vec<f64>,
    /// Power budget 𝒬 per channel use.
    pub power: f64,
}

impl BcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::Config("broadcast config needs at least one user".into()));
        }
        if self.levels.len() != self.gains.len() {
            return Err(Error::Config(format!(
                "{} level sets but {} gains",
                self.levels.len(),
                self.gains.len()
            )));
        }
        let peak: f64 = self.levels.iter().map(|u| u.last().unwrap()).sum();
        if peak > self.power * (1.0 + 1e-9) {
            return Err(Error::Config(format!(
                "peak superposed level {peak} exceeds the power budget {}",
                self.power
            )));
        }
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.levels.len()
    }
}

/// Pre-gain transmit level for one symbol combination: S = Σ_α Ũ_α^{r_α}.
pub fn superpose(config: &BcConfig, indices: &[usize]) -> Result<f64> {
    if indices.len() != config.levels.len() {
        return Err(Error::Config(format!(
            "{} indices for {} users",
            indices.len(),
            config.levels.len()
        )));
    }
    let mut s = 0.0;
    for (user, &r) in config.levels.iter().zip(indices) {
        let level = user
            .get(r)
            .ok_or_else(|| Error::Config(format!("index {r} out of range for {} levels", user.len())))?;
        s += level;
    }
    Ok(s)
}

/// SIC decode at one user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcDecode {
    /// Indices for decode ranks 0…α; the last entry is the user's own.
    pub indices: Vec<usize>,
    /// Exact ML operation count spent: Σ_{i≤α} 2^{η_i}.
    pub ml_computations: u64,
}

impl BcDecode {
    pub fn own_index(&self) -> usize {
        *self.indices.last().unwrap()
    }
}

/// User `user` (zero-based decode rank) sequentially ML-decodes every earlier
/// rank through its own gain, subtracts each, then decodes its own index.
/// Later ranks are left in the residual as noise.
pub fn bc_user_decode(y: f64, config: &BcConfig, user: usize) -> Result<BcDecode> {
    if user >= config.levels.len() {
        return Err(Error::Config(format!(
            "user {user} out of range for {} users",
            config.levels.len()
        )));
    }
    let g = config.gains[user];
    let mut residual = y;
    let mut indices = Vec::with_capacity(user + 1);
    let mut ml_computations = 0u64;
    for rank in 0..=user {
        let levels = &config.levels[rank];
        ml_computations += levels.len() as u64;
        let mut best = 0usize;
        let mut best_dist = f64::INFINITY;
        for (r, &u) in levels.iter().enumerate() {
            let dist = (residual - u * g).abs();
            if dist < best_dist {
                best_dist = dist;
                best = r;
            }
        }
        residual -= levels[best] * g;
        indices.push(best);
    }
    Ok(BcDecode { indices, ml_computations })
}

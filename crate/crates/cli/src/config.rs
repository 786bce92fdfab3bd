//! JSON run configuration and flag merging. Flags always win over the file.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use vlc_noma_core::{BitMapping, DecoderSpec, GenMode, Scenario};

#[derive(Debug, Default, Deserialize)]
pub struct FileConfig {
    pub scenario: Option<ScenarioRef>,
    pub txs: Option<TxSection>,
    pub sweep: Option<SweepSection>,
    pub decoder: Option<DecoderSection>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    /// Built-in scenario name (`fig3a`, `fig3b`, `fig3c`).
    Name(String),
    /// Explicit coordinates.
    Inline(Scenario),
}

impl ScenarioRef {
    pub fn resolve(&self) -> Result<Scenario> {
        match self {
            ScenarioRef::Name(name) => Ok(Scenario::builtin(name)?),
            ScenarioRef::Inline(sc) => {
                sc.validate()?;
                Ok(sc.clone())
            }
        }
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct TxSection {
    pub etas: Option<Vec<u32>>,
    pub gains: Option<Vec<f64>>,
    pub power: Option<f64>,
    pub mode: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
pub struct SweepSection {
    /// `start:step:stop` in dB, or a single value.
    pub snr: Option<String>,
    pub bits: Option<f64>,
    pub seed: Option<u64>,
    pub mapping: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
pub struct DecoderSection {
    pub kind: Option<String>,
    pub m: Option<usize>,
}

pub fn load_file(path: &PathBuf) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

/// `start:step:stop` inclusive, or a single dB value.
pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.trim().parse::<f64>()?]),
        [start, step, stop] => {
            let start: f64 = start.trim().parse()?;
            let step: f64 = step.trim().parse()?;
            let stop: f64 = stop.trim().parse()?;
            if step <= 0.0 {
                bail!("SNR grid step must be positive, got {step}");
            }
            if stop < start {
                bail!("SNR grid stop {stop} below start {start}");
            }
            let mut grid = Vec::new();
            let n = ((stop - start) / step).round() as i64;
            for i in 0..=n {
                let v = start + i as f64 * step;
                if v <= stop + 1e-9 {
                    grid.push(v);
                }
            }
            Ok(grid)
        }
        _ => bail!("SNR grid must be `start:step:stop` or a single value, got `{spec}`"),
    }
}

pub fn parse_decoder(kind: &str, m: Option<usize>) -> Result<ParsedDecoder> {
    match kind.to_ascii_lowercase().as_str() {
        "sic" => Ok(ParsedDecoder::Noma(DecoderSpec::Sic)),
        "jml" => Ok(ParsedDecoder::Noma(DecoderSpec::Jml)),
        "oma" => Ok(ParsedDecoder::Oma),
        "hybrid" => {
            let m = m.context("hybrid decoder needs `m` (e.g. --decoder hybrid:3)")?;
            Ok(ParsedDecoder::Noma(DecoderSpec::Hybrid { m }))
        }
        other => {
            if let Some(rest) = other.strip_prefix("hybrid:") {
                let m: usize = rest.parse().context("bad hybrid prefix size")?;
                Ok(ParsedDecoder::Noma(DecoderSpec::Hybrid { m }))
            } else {
                bail!("unknown decoder `{kind}` (expected sic, jml, hybrid:M, or oma)")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParsedDecoder {
    Noma(DecoderSpec),
    Oma,
}

pub fn parse_mapping(name: &str) -> Result<BitMapping> {
    match name.to_ascii_lowercase().as_str() {
        "natural" => Ok(BitMapping::Natural),
        "gray" => Ok(BitMapping::Gray),
        other => bail!("unknown bit mapping `{other}` (expected natural or gray)"),
    }
}

pub fn parse_gen_mode(name: &str) -> Result<GenMode> {
    match name.to_ascii_lowercase().as_str() {
        "verbatim" => Ok(GenMode::Verbatim),
        "strict" => Ok(GenMode::Strict),
        other => bail!("unknown generation mode `{other}` (expected verbatim or strict)"),
    }
}

/// Bits accepted in scientific notation ("1e6").
pub fn parse_bits(v: f64) -> Result<u64> {
    if !(v.is_finite() && v >= 1.0) {
        bail!("bits per point must be >= 1, got {v}");
    }
    Ok(v as u64)
}

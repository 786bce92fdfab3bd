//! Link-level library for non-OFDM power-domain NOMA in indoor visible light
//! communication.
//!
//! The pieces, bottom up:
//! - [`channel`]: Lambertian line-of-sight gains from room geometry.
//! - [`constellation`]: integer power-level synthesis, normalization, and the
//!   SIC-ordering / zero-BER validity checks.
//! - [`mac`]: SIC, joint ML, and hybrid receivers for the multiple access
//!   channel.
//! - [`broadcast`]: superposition coding and per-user SIC for the broadcast
//!   channel.
//! - [`simulate`]: deterministic Monte Carlo BER sweeps, average-SNR closed
//!   forms, the PAM-TDMA baseline, and the optimal hybrid-split search.
//! - [`complexity`]: exact operation-count accounting.

pub mod broadcast;
pub mod channel;
pub mod complexity;
pub mod constellation;
pub mod error;
pub mod mac;
pub mod simulate;

pub use broadcast::{bc_user_decode, superpose, BcConfig, BcDecode};
pub use channel::{
    channel_gain, concentrator_gain, lambertian_order, scenario_gains, LinkGeometry,
    OpticalParams, Scenario, SortedGains,
};
pub use complexity::{
    bc_complexity_table, jml_vs_oma_inequality, mac_ml_count, oma_ml_count, BcComplexityRow,
    InequalityCheck,
};
pub use constellation::{
    generate_constellations, normalize, validate, GenMode, NormalizedConstellation,
    RawConstellation, TxProfile, ValidationReport,
};
pub use error::{Error, Result};
pub use mac::{decode, hybrid_decode, jml_decode, sic_decode, DecodedIndices, DecoderSpec};
pub use simulate::{
    average_snr_bc, average_snr_mac, bits_to_index, find_optimal_m, index_to_bits, noise_for_snr,
    oma_baseline_ber, run_ber_bc, run_ber_mac, BcSweep, BerPoint, BerResult, BitMapping,
    EntityCount, MacSampleStream, MacSweep, OmaSweep, OptimalMOutcome, OptimalMQuery,
};

//! Batch front-end: loads scenario/sweep configuration, dispatches to the
//! library, and writes CSV / plot-ready files.

mod config;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use vlc_noma_core::{
    bc_complexity_table, find_optimal_m, generate_constellations, normalize, oma_baseline_ber,
    run_ber_bc, run_ber_mac, scenario_gains, validate, BcConfig, BcSweep, BerResult, GenMode,
    MacSweep, NormalizedConstellation, OmaSweep, OptimalMQuery, RawConstellation,
    TxProfile,
};

use config::{
    load_file, parse_bits, parse_decoder, parse_gen_mode, parse_mapping, parse_snr_grid,
    FileConfig, ParsedDecoder, ScenarioRef,
};

#[derive(Parser)]
#[command(name = "vlc-noma", version, about = "Indoor VLC power-domain NOMA link-level simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate and print a power constellation.
    Constellation(ConstellationArgs),
    /// Monte Carlo BER sweep over the multiple access channel.
    BerMac(BerArgs),
    /// Monte Carlo BER sweep over the broadcast channel.
    BerBc(BerArgs),
    /// Smallest hybrid split meeting a BER target at an SNR cap.
    OptimalM(OptimalMArgs),
    /// Operation-count accounting tables.
    Complexity(ComplexityArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Built-in scenario name: fig3a, fig3b, fig3c.
    #[arg(long)]
    scenario: Option<String>,
    /// Per-transmitter (or per-user) spectral efficiencies, e.g. 2,2.
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<u32>>,
    /// Explicit ascending channel gains, bypassing the scenario.
    #[arg(long, value_delimiter = ',')]
    gains: Option<Vec<f64>>,
    /// Transmit power budget per channel use.
    #[arg(long)]
    power: Option<f64>,
    /// Constellation generation mode: verbatim or strict.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args)]
struct ConstellationArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BerArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// sic, jml, hybrid:M, or oma.
    #[arg(long)]
    decoder: Option<String>,
    /// SNR grid in dB, `start:step:stop` inclusive or a single value.
    #[arg(long)]
    snr: Option<String>,
    /// Bits per grid point (scientific notation accepted).
    #[arg(long)]
    bits: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// natural or gray.
    #[arg(long)]
    mapping: Option<String>,
}

#[derive(Args)]
struct OptimalMArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// BER exponent: target is 10^-v.
    #[arg(long)]
    v: u32,
    /// Constrained transmitter, 1-based decode-order index.
    #[arg(long)]
    target: usize,
    /// SNR cap Γ in dB.
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    bits: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mapping: Option<String>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Two spectral efficiencies for the BC table, e.g. 7,7.
    #[arg(long, value_delimiter = ',')]
    eta: Vec<u32>,
    /// FFT size for the DCO-OFDM row.
    #[arg(long, default_value_t = 256)]
    nfft: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    let status = match cli.cmd {
        Cmd::Constellation(args) => cmd_constellation(args),
        Cmd::BerMac(args) => cmd_ber(args, Channel::Mac),
        Cmd::BerBc(args) => cmd_ber(args, Channel::Bc),
        Cmd::OptimalM(args) => cmd_optimal_m(args),
        Cmd::Complexity(args) => cmd_complexity(args),
    };
    if let Err(err) = status {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

/// `VLC_NOMA_THREADS` caps worker parallelism; 0 or unset means auto.
fn configure_threads() {
    if let Ok(v) = std::env::var("VLC_NOMA_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Channel {
    Mac,
    Bc,
}

/// Effective (file ∪ flags) inputs shared by the constellation-bearing modes.
struct Effective {
    scenario_label: serde_json::Value,
    etas: Vec<u32>,
    gains: Vec<f64>,
    power: f64,
    mode: GenMode,
    out: PathBuf,
}

fn resolve_common(common: &CommonArgs, file: &FileConfig, channel: Option<Channel>) -> Result<Effective> {
    let txs = file.txs.as_ref();
    let power = common
        .power
        .or(txs.and_then(|t| t.power))
        .unwrap_or(1.0);
    let mode_name = common
        .mode
        .clone()
        .or(txs.and_then(|t| t.mode.clone()))
        .unwrap_or_else(|| "verbatim".into());
    let mode = parse_gen_mode(&mode_name)?;
    let etas = common
        .eta
        .clone()
        .or(txs.and_then(|t| t.etas.clone()))
        .context("spectral efficiencies missing (use --eta or the config `txs.etas`)")?;

    let explicit_gains = common.gains.clone().or(txs.and_then(|t| t.gains.clone()));
    let scenario_ref = match (&common.scenario, &file.scenario) {
        (Some(name), _) => Some(ScenarioRef::Name(name.clone())),
        (None, Some(r)) => Some(r.clone()),
        (None, None) => None,
    };

    let (scenario_label, gains) = match (explicit_gains, scenario_ref) {
        (Some(g), _) => (json!("explicit-gains"), g),
        (None, Some(r)) => {
            let sc = r.resolve()?;
            if let Some(ch) = channel {
                match ch {
                    Channel::Mac if !sc.is_mac() => {
                        bail!("scenario has multiple PDs; ber-mac needs exactly one")
                    }
                    Channel::Bc if sc.leds.len() != 1 => {
                        bail!("scenario has multiple LEDs; ber-bc needs exactly one")
                    }
                    _ => {}
                }
            }
            let sorted = scenario_gains(&sc)?;
            let label = match &r {
                ScenarioRef::Name(n) => json!(n),
                ScenarioRef::Inline(_) => json!("inline"),
            };
            (label, sorted.gains)
        }
        (None, None) => bail!("no channel gains: give --scenario or --gains"),
    };

    if etas.len() != gains.len() {
        bail!("{} spectral efficiencies for {} gains", etas.len(), gains.len());
    }
    let out = common
        .out
        .clone()
        .or(file.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Effective { scenario_label, etas, gains, power, mode, out })
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        Some(p) => load_file(p),
        None => Ok(FileConfig::default()),
    }
}

fn build_constellation(eff: &Effective) -> Result<(RawConstellation, NormalizedConstellation)> {
    let profiles: Vec<TxProfile> = eff
        .etas
        .iter()
        .zip(&eff.gains)
        .map(|(&eta, &gain)| TxProfile { eta, gain })
        .collect();
    let raw = generate_constellations(&profiles, eff.mode)?;
    let norm = normalize(&raw, eff.power)?;
    let report = validate(&norm.levels, &eff.gains)?;
    if !report.zero_ber.is_empty() {
        let v = &report.zero_ber[0];
        bail!(
            "constellation fails the zero-BER margin at tx {} level {}: {} >= {} \
             ({} violations total)",
            v.tx + 1,
            v.q + 1,
            v.lhs,
            v.bound,
            report.zero_ber.len()
        );
    }
    for v in report.ordering.iter().take(3) {
        eprintln!(
            "warning: received-power ordering violated: tx {} level {} ({}) vs tx {} level {} ({})",
            v.tx + 1,
            v.q + 1,
            v.lhs,
            v.tx + 2,
            v.next_q + 1,
            v.rhs
        );
    }
    Ok((raw, norm))
}

fn ensure_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_effective(dir: &Path, value: serde_json::Value) -> Result<()> {
    let path = dir.join("effective_config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&value)?)
        .with_context(|| format!("cannot write {}", path.display()))
}

fn write_ber_csv(dir: &Path, result: &BerResult) -> Result<PathBuf> {
    let path = dir.join("ber.csv");
    let mut text = String::from("snr_db,entity_id,bits,errors,ber\n");
    for point in &result.points {
        for (i, e) in point.entities.iter().enumerate() {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                point.snr_db,
                i + 1,
                e.bits,
                e.errors,
                e.ber()
            ));
        }
    }
    std::fs::write(&path, text)?;
    Ok(path)
}

fn print_ber_summary(result: &BerResult) {
    for point in &result.points {
        let per: Vec<String> = point.entities.iter().map(|e| format!("{:.3e}", e.ber())).collect();
        println!(
            "snr={} dB  avg_ber={:.3e}  per-entity=[{}]",
            point.snr_db,
            point.average_ber(),
            per.join(", ")
        );
    }
}

fn cmd_constellation(args: ConstellationArgs) -> Result<()> {
    let file = load_config(&args.common.config)?;
    let eff = resolve_common(&args.common, &file, None)?;
    let (raw, norm) = build_constellation(&eff)?;
    ensure_out(&eff.out)?;
    let table = norm.to_table(Some(&raw));
    print!("{table}");
    // raw integer levels alongside the normalized table
    let mut text = String::from("tx\teta\tlambda\traw_levels\tnormalized_levels\n");
    for (x, tx) in raw.levels.iter().enumerate() {
        let rawlv: Vec<String> = tx.iter().map(|p| p.to_string()).collect();
        let normlv: Vec<String> = norm.levels[x].iter().map(|p| format!("{p}")).collect();
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            x + 1,
            raw.etas[x],
            raw.spacings[x],
            rawlv.join(","),
            normlv.join(",")
        ));
    }
    std::fs::write(eff.out.join("constellation.txt"), text)?;
    write_effective(
        &eff.out,
        json!({
            "mode": "constellation",
            "scenario": eff.scenario_label,
            "txs": {"etas": eff.etas, "gains": eff.gains, "power": eff.power,
                    "mode": format!("{:?}", eff.mode).to_lowercase()},
            "output": eff.out,
        }),
    )?;
    Ok(())
}

fn cmd_ber(args: BerArgs, channel: Channel) -> Result<()> {
    let file = load_config(&args.common.config)?;
    let eff = resolve_common(&args.common, &file, Some(channel))?;
    let sweep_file = file.sweep.as_ref();
    let snr_spec = args
        .snr
        .clone()
        .or(sweep_file.and_then(|s| s.snr.clone()))
        .context("SNR grid missing (use --snr start:step:stop)")?;
    let snr_grid_db = parse_snr_grid(&snr_spec)?;
    let bits = parse_bits(
        args.bits
            .or(sweep_file.and_then(|s| s.bits))
            .unwrap_or(1e5),
    )?;
    let seed = args.seed.or(sweep_file.and_then(|s| s.seed)).unwrap_or(0);
    let mapping_name = args
        .mapping
        .clone()
        .or(sweep_file.and_then(|s| s.mapping.clone()))
        .unwrap_or_else(|| "natural".into());
    let mapping = parse_mapping(&mapping_name)?;
    let decoder_name = args
        .decoder
        .clone()
        .or(file.decoder.as_ref().and_then(|d| d.kind.clone()))
        .unwrap_or_else(|| "sic".into());
    let decoder = parse_decoder(&decoder_name, file.decoder.as_ref().and_then(|d| d.m))?;

    let result = match (channel, decoder) {
        (Channel::Mac, ParsedDecoder::Noma(spec)) => {
            let (_, norm) = build_constellation(&eff)?;
            run_ber_mac(&MacSweep {
                levels: norm.levels,
                gains: eff.gains.clone(),
                snr_grid_db: snr_grid_db.clone(),
                bits_per_point: bits,
                seed,
                decoder: spec,
                mapping,
            })?
        }
        (Channel::Bc, ParsedDecoder::Noma(spec)) => {
            if spec != vlc_noma_core::DecoderSpec::Sic {
                bail!("broadcast decoding is SIC only (or oma for the baseline)");
            }
            let (_, norm) = build_constellation(&eff)?;
            run_ber_bc(&BcSweep {
                config: BcConfig {
                    levels: norm.levels,
                    gains: eff.gains.clone(),
                    power: eff.power,
                },
                snr_grid_db: snr_grid_db.clone(),
                bits_per_point: bits,
                seed,
                mapping,
            })?
        }
        (ch, ParsedDecoder::Oma) => oma_baseline_ber(&OmaSweep {
            etas: eff.etas.clone(),
            gains: eff.gains.clone(),
            power: eff.power,
            snr_grid_db: snr_grid_db.clone(),
            bits_per_point: bits,
            seed,
            mapping,
            per_entity_noise: ch == Channel::Bc,
        })?,
    };

    ensure_out(&eff.out)?;
    let csv = write_ber_csv(&eff.out, &result)?;
    print_ber_summary(&result);
    println!("wrote {}", csv.display());
    write_effective(
        &eff.out,
        json!({
            "mode": if channel == Channel::Mac { "ber-mac" } else { "ber-bc" },
            "scenario": eff.scenario_label,
            "txs": {"etas": eff.etas, "gains": eff.gains, "power": eff.power,
                    "mode": format!("{:?}", eff.mode).to_lowercase()},
            "decoder": decoder_name,
            "sweep": {"snr_db": snr_grid_db, "bits": bits, "seed": seed, "mapping": mapping_name},
            "output": eff.out,
        }),
    )?;
    Ok(())
}

fn cmd_optimal_m(args: OptimalMArgs) -> Result<()> {
    let file = load_config(&args.common.config)?;
    let eff = resolve_common(&args.common, &file, Some(Channel::Mac))?;
    if args.target == 0 || args.target > eff.etas.len() {
        bail!("--target is 1-based and must be within 1..={}", eff.etas.len());
    }
    let sweep_file = file.sweep.as_ref();
    let bits = parse_bits(args.bits.or(sweep_file.and_then(|s| s.bits)).unwrap_or(1e6))?;
    let seed = args.seed.or(sweep_file.and_then(|s| s.seed)).unwrap_or(0);
    let mapping_name = args
        .mapping
        .clone()
        .or(sweep_file.and_then(|s| s.mapping.clone()))
        .unwrap_or_else(|| "natural".into());
    let mapping = parse_mapping(&mapping_name)?;

    let (_, norm) = build_constellation(&eff)?;
    let query = OptimalMQuery { v: args.v, gamma_db: args.gamma, target_tx: args.target - 1 };
    let outcome = find_optimal_m(&query, &norm.levels, &eff.gains, bits, seed, mapping)?;

    ensure_out(&eff.out)?;
    let path = eff.out.join("optimal_m.csv");
    let mut text = String::from("v,target,target_ber,m_hat,computations,feasible\n");
    let (m_hat, comps, ber) = match (&outcome.m_hat, &outcome.computations, &outcome.target_ber) {
        (Some(m), Some(c), Some(b)) => (m.to_string(), c.to_string(), format!("{b}")),
        _ => {
            let best = outcome
                .evaluated
                .iter()
                .map(|c| c.target_ber)
                .fold(f64::INFINITY, f64::min);
            (String::new(), String::new(), format!("{best}"))
        }
    };
    text.push_str(&format!(
        "{},{},{},{},{},{}\n",
        args.v,
        args.target,
        ber,
        m_hat,
        comps,
        outcome.feasible()
    ));
    std::fs::write(&path, text)?;

    for c in &outcome.evaluated {
        println!(
            "M={} computations={} target_ber={:.3e} meets_target={}",
            c.m, c.computations, c.target_ber, c.meets_target
        );
    }
    match outcome.m_hat {
        Some(m) => println!(
            "optimal M = {m} with {} computations",
            outcome.computations.unwrap()
        ),
        None => println!("infeasible: no split meets 10^-{} at {} dB", args.v, args.gamma),
    }
    write_effective(
        &eff.out,
        json!({
            "mode": "optimal-m",
            "scenario": eff.scenario_label,
            "txs": {"etas": eff.etas, "gains": eff.gains, "power": eff.power,
                    "mode": format!("{:?}", eff.mode).to_lowercase()},
            "query": {"v": args.v, "target": args.target, "gamma_db": args.gamma},
            "sweep": {"bits": bits, "seed": seed, "mapping": mapping_name},
            "output": eff.out,
        }),
    )?;
    Ok(())
}

fn cmd_complexity(args: ComplexityArgs) -> Result<()> {
    if args.eta.len() != 2 {
        bail!("complexity needs exactly two spectral efficiencies, e.g. --eta 7,7");
    }
    let rows = bc_complexity_table(args.eta[0], args.eta[1], args.nfft)?;
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();

    println!(
        "{:<16} {:>16} {:>12} {:>12} {:>8}",
        "scheme", "ml_computations", "real_mults", "real_adds", "dc_bias"
    );
    for r in &rows {
        println!(
            "{:<16} {:>16} {:>12} {:>12} {:>8}",
            r.scheme,
            r.ml_computations,
            opt(r.real_multiplications),
            opt(r.real_additions),
            opt(r.dc_bias_ops)
        );
    }

    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    ensure_out(&out)?;
    let mut text =
        String::from("scheme,ml_computations,real_multiplications,real_additions,dc_bias_ops\n");
    for r in &rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.scheme,
            r.ml_computations,
            opt(r.real_multiplications),
            opt(r.real_additions),
            opt(r.dc_bias_ops)
        ));
    }
    std::fs::write(out.join("complexity.csv"), text)?;
    write_effective(
        &out,
        json!({
            "mode": "complexity",
            "eta": args.eta,
            "nfft": args.nfft,
            "output": out,
        }),
    )?;
    Ok(())
}

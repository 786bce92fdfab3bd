use criterion::{black_box, criterion_group, criterion_main, Criterion};
use vlc_noma_core::{
    generate_constellations, hybrid_decode, jml_decode, normalize, run_ber_mac, sic_decode,
    BitMapping, DecoderSpec, GenMode, MacSweep, TxProfile,
};

fn four_tx() -> (Vec<Vec<f64>>, Vec<f64>) {
    let gains = vec![1e-6, 2e-6, 3e-6, 4e-6];
    let profiles: Vec<TxProfile> =
        gains.iter().map(|&gain| TxProfile { eta: 2, gain }).collect();
    let raw = generate_constellations(&profiles, GenMode::Strict).unwrap();
    let norm = normalize(&raw, 1.0).unwrap();
    (norm.levels, gains)
}

fn bench_decoders(c: &mut Criterion) {
    let (levels, gains) = four_tx();
    let y = 0.37e-6;
    c.bench_function("sic_decode_4tx", |b| {
        b.iter(|| sic_decode(black_box(y), &levels, &gains))
    });
    c.bench_function("jml_decode_4tx", |b| {
        b.iter(|| jml_decode(black_box(y), &levels, &gains).unwrap())
    });
    c.bench_function("hybrid_decode_4tx_m2", |b| {
        b.iter(|| hybrid_decode(black_box(y), &levels, &gains, 2).unwrap())
    });
}

fn bench_constellation(c: &mut Criterion) {
    let profiles: Vec<TxProfile> =
        (1..=6).map(|i| TxProfile { eta: 3, gain: i as f64 * 1e-6 }).collect();
    c.bench_function("generate_6tx_eta3", |b| {
        b.iter(|| generate_constellations(black_box(&profiles), GenMode::Strict).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    let (levels, gains) = four_tx();
    let sweep = MacSweep {
        levels,
        gains,
        snr_grid_db: vec![40.0],
        bits_per_point: 10_000,
        seed: 7,
        decoder: DecoderSpec::Sic,
        mapping: BitMapping::Natural,
    };
    c.bench_function("ber_point_10k_bits_sic", |b| {
        b.iter(|| run_ber_mac(black_box(&sweep)).unwrap())
    });
}

criterion_group!(benches, bench_decoders, bench_constellation, bench_sweep);
criterion_main!(benches);

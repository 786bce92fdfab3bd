//! Property tests over random constellations, gains, and received samples.

use proptest::prelude::*;
use vlc_noma_core::{
    generate_constellations, hybrid_decode, jml_decode, normalize, sic_decode, superpose,
    validate, BcConfig, GenMode, TxProfile,
};

fn profile_strategy(max_l: usize) -> impl Strategy<Value = Vec<TxProfile>> {
    (1..=max_l, 1e-7f64..1e-5, proptest::collection::vec((1u32..=3, 1.0f64..1.5), max_l))
        .prop_map(|(l, base, raw)| {
            let mut gain = base;
            raw.into_iter()
                .take(l)
                .map(|(eta, ratio)| {
                    gain *= ratio;
                    TxProfile { eta, gain }
                })
                .collect()
        })
}

proptest! {
    #[test]
    fn spacing_exactly_constant(profiles in profile_strategy(4), strict in any::<bool>()) {
        let mode = if strict { GenMode::Strict } else { GenMode::Verbatim };
        let raw = generate_constellations(&profiles, mode).unwrap();
        for (tx, &lam) in raw.levels.iter().zip(&raw.spacings) {
            for w in tx.windows(2) {
                prop_assert_eq!(w[1] - w[0], lam);
                prop_assert!(w[1] > w[0]);
            }
        }
    }

    #[test]
    fn strict_mode_passes_both_checks(profiles in profile_strategy(4)) {
        let raw = generate_constellations(&profiles, GenMode::Strict).unwrap();
        let report = validate(&raw.levels_f64(), &raw.gains).unwrap();
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn normalization_peak_sum_hits_budget(
        profiles in profile_strategy(4),
        power in 0.1f64..10.0,
    ) {
        let raw = generate_constellations(&profiles, GenMode::Verbatim).unwrap();
        let norm = normalize(&raw, power).unwrap();
        let peak: f64 = norm.levels.iter().map(|tx| tx.last().unwrap()).sum();
        prop_assert!((peak - power).abs() < 1e-9 * power);
    }

    #[test]
    fn decoders_scale_equivariant(
        profiles in profile_strategy(3),
        y_frac in -0.5f64..1.5,
        scale in 1e-3f64..1e3,
    ) {
        let raw = generate_constellations(&profiles, GenMode::Strict).unwrap();
        let norm = normalize(&raw, 1.0).unwrap();
        let gains = raw.gains.clone();
        let peak_rx: f64 = norm
            .levels
            .iter()
            .zip(&gains)
            .map(|(tx, &h)| tx.last().unwrap() * h)
            .sum();
        let y = y_frac * peak_rx;
        let scaled: Vec<Vec<f64>> = norm
            .levels
            .iter()
            .map(|tx| tx.iter().map(|p| p * scale).collect())
            .collect();
        prop_assert_eq!(
            sic_decode(y, &norm.levels, &gains),
            sic_decode(y * scale, &scaled, &gains)
        );
        prop_assert_eq!(
            jml_decode(y, &norm.levels, &gains).unwrap(),
            jml_decode(y * scale, &scaled, &gains).unwrap()
        );
    }

    #[test]
    fn normalization_preserves_decisions(
        profiles in profile_strategy(3),
        y_frac in -0.5f64..1.5,
    ) {
        // Normalized levels are the raw ones times power/peak, so a decoder
        // fed the correspondingly scaled observation must agree.
        let raw = generate_constellations(&profiles, GenMode::Strict).unwrap();
        let norm = normalize(&raw, 1.0).unwrap();
        let gains = raw.gains.clone();
        let raw_levels = raw.levels_f64();
        let peak: f64 = raw.levels.iter().map(|tx| *tx.last().unwrap() as f64).sum();
        let scale = 1.0 / peak;
        let peak_rx: f64 = raw_levels
            .iter()
            .zip(&gains)
            .map(|(tx, &h)| tx.last().unwrap() * h)
            .sum();
        let y = y_frac * peak_rx;
        prop_assert_eq!(
            sic_decode(y, &raw_levels, &gains),
            sic_decode(y * scale, &norm.levels, &gains)
        );
    }

    #[test]
    fn hybrid_degenerates_to_sic_and_jml(
        profiles in profile_strategy(3),
        y_frac in -0.5f64..1.5,
    ) {
        let raw = generate_constellations(&profiles, GenMode::Strict).unwrap();
        let norm = normalize(&raw, 1.0).unwrap();
        let gains = raw.gains.clone();
        let l = gains.len();
        let peak_rx: f64 = norm
            .levels
            .iter()
            .zip(&gains)
            .map(|(tx, &h)| tx.last().unwrap() * h)
            .sum();
        let y = y_frac * peak_rx;
        prop_assert_eq!(
            hybrid_decode(y, &norm.levels, &gains, 0).unwrap(),
            sic_decode(y, &norm.levels, &gains)
        );
        if l >= 2 {
            prop_assert_eq!(
                hybrid_decode(y, &norm.levels, &gains, l).unwrap(),
                jml_decode(y, &norm.levels, &gains).unwrap()
            );
        }
    }

    #[test]
    fn zero_noise_sic_round_trip(profiles in profile_strategy(3)) {
        // Exhaustive symbol enumeration over the noiseless channel recovers
        // every index, for raw and normalized levels alike.
        let raw = generate_constellations(&profiles, GenMode::Strict).unwrap();
        let norm = normalize(&raw, 1.0).unwrap();
        let gains = raw.gains.clone();
        let sizes: Vec<usize> = norm.levels.iter().map(|tx| tx.len()).collect();
        let mut indices = vec![0usize; sizes.len()];
        loop {
            let y: f64 = indices
                .iter()
                .enumerate()
                .map(|(x, &q)| norm.levels[x][q] * gains[x])
                .sum();
            let decoded = sic_decode(y, &norm.levels, &gains);
            prop_assert_eq!(&decoded.0, &indices);
            let jml = jml_decode(y, &norm.levels, &gains).unwrap();
            prop_assert_eq!(&jml.0, &indices);
            let mut pos = sizes.len();
            let advanced = loop {
                if pos == 0 { break false; }
                pos -= 1;
                indices[pos] += 1;
                if indices[pos] < sizes[pos] { break true; }
                indices[pos] = 0;
            };
            if !advanced { break; }
        }
    }

    #[test]
    fn bc_zero_noise_round_trip(profiles in profile_strategy(3)) {
        let raw = generate_constellations(&profiles, GenMode::Strict).unwrap();
        let norm = normalize(&raw, 1.0).unwrap();
        let cfg = BcConfig { levels: norm.levels, gains: raw.gains.clone(), power: 1.0 };
        let sizes: Vec<usize> = cfg.levels.iter().map(|u| u.len()).collect();
        let mut indices = vec![0usize; sizes.len()];
        loop {
            let s = superpose(&cfg, &indices).unwrap();
            for (user, &want) in indices.iter().enumerate() {
                let y = s * cfg.gains[user];
                let d = vlc_noma_core::bc_user_decode(y, &cfg, user).unwrap();
                prop_assert_eq!(d.own_index(), want);
                let expect_ml: u64 = sizes[..=user].iter().map(|&n| n as u64).sum();
                prop_assert_eq!(d.ml_computations, expect_ml);
            }
            let mut pos = sizes.len();
            let advanced = loop {
                if pos == 0 { break false; }
                pos -= 1;
                indices[pos] += 1;
                if indices[pos] < sizes[pos] { break true; }
                indices[pos] = 0;
            };
            if !advanced { break; }
        }
    }

    #[test]
    fn inequality_holds_everywhere(etas in proptest::collection::vec(1u32..=4, 2..=6)) {
        let check = vlc_noma_core::jml_vs_oma_inequality(&etas).unwrap();
        prop_assert!(check.holds, "{:?} for {:?}", check, etas);
    }
}

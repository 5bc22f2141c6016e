use super::*;
use crate::rng::RandomSource;

fn assert_valid(rho: &DensityMatrix) {
    assert!(rho.matrix().hermitian_defect() <= 1e-10);
    assert!((rho.matrix().trace() - 1.0).norm() <= 1e-10);
    assert!(rho.eigenvalues().unwrap().iter().all(|&l| l >= -1e-10));
}

/// Entropy of the binomial spectrum C(m,k)/2^m.
fn binomial_entropy(m: u32) -> f64 {
    (0..=m).map(|k| binomial(m, k) / 2f64.powi(m as i32)).map(|p| -p * p.log2()).sum()
}

#[test]
fn single_qubit_mixtures() {
    let x = PlaintextString::zeros(1);
    for d in [2, 3, 5, 8] {
        let rho = encrypted_density(&x, &KeyEnsemble::linear(d).unwrap()).unwrap();
        let half = ComplexMatrix::identity(2).scale(0.5.into());
        assert!(rho.matrix().max_abs_diff(&half) < 1e-15, "d={d}");
    }
}

#[test]
fn linear_spectrum_is_binomial() {
    let rho = encrypted_density(&PlaintextString::zeros(4), &KeyEnsemble::linear(180).unwrap()).unwrap();
    let mut expected: Vec<f64> = (0..=4).map(|k| binomial(4, k) / 16.0).collect();
    expected.extend([0.0; 11]);
    expected.sort_by(f64::total_cmp);
    for (l, e) in rho.eigenvalues().unwrap().iter().zip(&expected) {
        assert!((l - e).abs() < 1e-12);
    }
    assert!((rho.entropy().unwrap() - binomial_entropy(4)).abs() < 1e-10);
    assert!((rho.entropy().unwrap() - 2.03).abs() < 5e-3);
}

#[test]
fn holevo_examples() {
    assert!((holevo(4, &KeyEnsemble::linear(1).unwrap()).unwrap() - 4.0).abs() < 1e-10);
    let chi = holevo(4, &KeyEnsemble::linear(256).unwrap()).unwrap();
    assert!((chi - 1.9694).abs() <= 5e-3, "{chi}");
    assert!((chi - (4.0 - binomial_entropy(4))).abs() < 1e-10);
    assert!(holevo(1, &KeyEnsemble::linear(2).unwrap()).unwrap().abs() < 1e-12);
    let chi = holevo(4, &KeyEnsemble::poincare(64, 64, 64).unwrap()).unwrap();
    assert!((chi - holevo_poincare_limit(4)).abs() <= 2e-2, "{chi}");
}

#[test]
fn explicit_holevo_agrees_for_linear_keys() {
    for d in [2, 3, 12] {
        let e = KeyEnsemble::linear(d).unwrap();
        let reduced = holevo(4, &e).unwrap();
        let explicit = holevo_explicit(4, &e).unwrap();
        assert!((reduced - explicit).abs() < 1e-8, "d={d}: {reduced} vs {explicit}");
    }
}

#[test]
fn explicit_holevo_differs_on_the_sphere() {
    // S(ρ_x) is not plaintext independent for Haar-grid keys
    let e = KeyEnsemble::poincare(8, 16, 2).unwrap();
    let reduced = holevo(3, &e).unwrap();
    let explicit = holevo_explicit(3, &e).unwrap();
    assert!(reduced - explicit > 0.1, "{reduced} vs {explicit}");
}

#[test]
fn density_invariants_hold() {
    let ensembles = [
        KeyEnsemble::linear(1).unwrap(),
        KeyEnsemble::linear(5).unwrap(),
        KeyEnsemble::poincare(5, 6, 3).unwrap(),
        KeyEnsemble::poincare(1, 4, 7).unwrap(),
    ];
    for e in &ensembles {
        for m in 1..=4 {
            for x in 0..(1 << m) {
                assert_valid(&encrypted_density(&PlaintextString::from_index(x, m), e).unwrap());
            }
        }
        for (m, x) in [(5, 0b10110), (6, 0b011001)] {
            assert_valid(&encrypted_density(&PlaintextString::from_index(x, m), e).unwrap());
        }
    }
    assert!(matches!(encrypted_density(&PlaintextString::zeros(9), &ensembles[0]), Err(Error::ResourceLimit(_))));
}

#[test]
fn entropy_is_plaintext_independent_for_linear_keys() {
    for d in [3, 12, 180] {
        let e = KeyEnsemble::linear(d).unwrap();
        let s0 = encrypted_density(&PlaintextString::zeros(4), &e).unwrap().entropy().unwrap();
        for x in 0..16 {
            let s = encrypted_density(&PlaintextString::from_index(x, 4), &e).unwrap().entropy().unwrap();
            assert!((s - s0).abs() <= 1e-8, "d={d} x={x}");
        }
    }
}

#[test]
fn symmetric_sectors_for_sphere_keys() {
    // weights depend on the β grid only; the α grid (d1 > m) removes coherences
    let rho = encrypted_density(&PlaintextString::zeros(4), &KeyEnsemble::poincare(8, 64, 2).unwrap()).unwrap();
    for w in rho.symmetric_sector_weights() {
        assert!((w - 0.2).abs() <= 0.02, "{w}");
    }
    assert!(rho.cross_sector_coherence() < 1e-10);
    let eig = rho.eigenvalues().unwrap();
    assert_eq!(eig.iter().filter(|&&l| l > 1e-9).count(), 5);
}

#[test]
fn sector_collapse_needs_alpha_grid_beyond_m() {
    let x = PlaintextString::zeros(4);
    let collapsed = encrypted_density(&x, &KeyEnsemble::poincare(5, 16, 1).unwrap()).unwrap();
    assert!(collapsed.cross_sector_coherence() < 1e-10);
    let coarse = encrypted_density(&x, &KeyEnsemble::poincare(2, 16, 64).unwrap()).unwrap();
    assert!(coarse.cross_sector_coherence() > 1e-3);
}

#[test]
fn trace_distance_examples() {
    let e = KeyEnsemble::linear(1).unwrap();
    let h = encrypted_density(&"0".parse().unwrap(), &e).unwrap();
    let v = encrypted_density(&"1".parse().unwrap(), &e).unwrap();
    assert!(trace_distance(&h, &h).unwrap() < 1e-15);
    assert!((trace_distance(&h, &v).unwrap() - 1.0).abs() < 1e-15);

    // values cross-checked with numpy eigvalsh; 0.8536 = (2 + √2)/4
    let table = hamming_trace_distances(4, &KeyEnsemble::linear(180).unwrap()).unwrap();
    assert!((table[0].1 - 0.808_012_701_892).abs() < 1e-9);
    assert!((table[1].1 - 0.853_553_390_593).abs() < 1e-9);
    assert!((table[2].1 - table[0].1).abs() < 1e-9);
    assert!(table[3].1 < 1e-9);

    let two = encrypted_density(&"00".parse().unwrap(), &e).unwrap();
    assert!(trace_distance(&h, &two).is_err());
}

#[test]
fn ensemble_parsing() {
    assert_eq!("linear:180".parse::<KeyEnsemble>().unwrap(), KeyEnsemble::Linear { d: 180 });
    assert_eq!("poincare:64,64,64".parse::<KeyEnsemble>().unwrap(), KeyEnsemble::Poincare { d1: 64, d2: 64, d3: 64 });
    assert_eq!(KeyEnsemble::poincare(1, 2, 3).unwrap().to_string(), "poincare:1,2,3");
    for bad in ["linear", "linear:0", "poincare:1,2", "circular:3"] {
        assert!(bad.parse::<KeyEnsemble>().is_err(), "{bad}");
    }
}

#[test]
fn attack_closed_form() {
    assert_eq!(attack_success(4, 1).unwrap(), 1.0);
    for m in [1, 3, 4, 9] {
        assert!((attack_success(m, 2).unwrap() - 0.5).abs() < 1e-15);
    }
    let limit = 35.0 / 128.0;
    assert!((attack_success_limit(4) - limit).abs() < 1e-15);
    assert!((attack_success(4, 100_000).unwrap() - limit).abs() < 1e-4);
    assert!(attack_success(0, 3).is_err());
}

#[test]
fn attack_is_monotone() {
    for m in 1..=16 {
        for d in 1..64 {
            let a = attack_success(m, d).unwrap();
            assert!(attack_success(m, d + 1).unwrap() <= a + 1e-15, "m={m} d={d}");
            if m < 16 {
                assert!(attack_success(m + 1, d).unwrap() <= a + 1e-15);
            }
        }
    }
}

#[test]
fn asymptote_values() {
    assert!((attack_asymptote(4.0).unwrap() - 0.2821).abs() < 1e-4);
    assert!((attack_asymptote(3500.0).unwrap() - 0.00954).abs() < 1e-5);
    assert!((attack_asymptote(1.0 / std::f64::consts::PI).unwrap() - 1.0).abs() < 1e-15);
    assert!(attack_asymptote(0.0).is_err());
}

#[test]
fn simulated_attack_tracks_closed_form() {
    let src = RandomSource::new(1);
    let zeros = PlaintextString::zeros(4);
    assert_eq!(simulate_attack(1, &"0110".parse().unwrap(), 1000, &src).unwrap().p, 1.0);
    let est = simulate_attack(12, &zeros, 1_000_000, &src).unwrap();
    let exact = attack_success(4, 12).unwrap();
    let sigma = (exact * (1.0 - exact) / 1e6).sqrt();
    assert!((est.p - exact).abs() <= 3.0 * sigma, "{} vs {exact}", est.p);
    let half = simulate_attack(2, &zeros, 100_000, &src).unwrap();
    assert!((half.p - 0.5).abs() < 0.01);
    assert!(simulate_attack(0, &zeros, 10, &src).is_err());
}

#[test]
fn attack_information_respects_holevo_bound() {
    let src = RandomSource::new(2);
    let x: PlaintextString = "0000".parse().unwrap();
    for d in [2, 3, 4, 6, 12] {
        let chi = holevo(4, &KeyEnsemble::linear(d).unwrap()).unwrap();
        let exact = attack_mutual_information(4, d).unwrap();
        assert!(exact <= chi + 1e-12, "d={d}: {exact} > {chi}");
        let est = simulate_attack(d, &x, 200_000, &src.derive(d as u64)).unwrap();
        let sampled = est.mutual_information().unwrap();
        assert!(sampled <= chi + 1e-3, "d={d}: {sampled} > {chi}");
    }
    // d = 2 saturates the bound: outcomes are x or its complement
    let chi2 = holevo(4, &KeyEnsemble::linear(2).unwrap()).unwrap();
    assert!((attack_mutual_information(4, 2).unwrap() - chi2).abs() < 1e-12);
}

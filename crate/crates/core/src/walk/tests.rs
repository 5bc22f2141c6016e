use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::device::Device;
use crate::numerics::random_unitary;
use crate::polarization::{sample_haar_key, PolarizationKey};
use crate::rng::RandomSource;

fn occ(v: &[u32]) -> Occupation {
    Occupation::new(v.to_vec()).unwrap()
}

fn coupler() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap()
}

/// Expands Π_i (Σ_j U_ji a_j†)^{s_i} monomial by monomial.
fn brute_force_distribution(u: &ComplexMatrix, input: &Occupation) -> BTreeMap<Vec<u32>, f64> {
    let m = u.rows();
    let mut poly: BTreeMap<Vec<u32>, Complex64> = BTreeMap::from([(vec![0; m], Complex64::new(1.0, 0.0))]);
    for i in input.mode_list() {
        let mut next = BTreeMap::new();
        for (mono, coef) in &poly {
            for j in 0..m {
                let mut t = mono.clone();
                t[j] += 1;
                *next.entry(t).or_insert(Complex64::new(0.0, 0.0)) += coef * u[(j, i)];
            }
        }
        poly = next;
    }
    let fact = |v: &[u32]| v.iter().map(|&c| (1..=c).map(f64::from).product::<f64>()).product::<f64>();
    let s_fact = fact(input.counts());
    poly.into_iter()
        .map(|(t, coef)| {
            let p = coef.norm_sqr() * fact(&t) / s_fact;
            (t, p)
        })
        .collect()
}

#[test]
fn encoding_examples() {
    assert_eq!(encode_input(&occ(&[1, 0, 0, 0])).unwrap().to_string(), "0111");
    assert_eq!(encode_input(&occ(&[1, 1, 1, 1])).unwrap().to_string(), "0000");
    assert_eq!(encode_input(&occ(&[0, 1, 1, 0])).unwrap().to_string(), "1001");
    assert!(matches!(encode_input(&occ(&[2, 0, 0, 0])), Err(Error::Encoding(_))));
}

#[test]
fn occupation_enumeration_counts() {
    // C(n + m − 1, n)
    assert_eq!(Occupation::enumerate(4, 3).len(), 20);
    assert_eq!(Occupation::enumerate(8, 4).len(), 330);
    assert_eq!(Occupation::enumerate(3, 0).len(), 1);
    assert_eq!("[1,0,2]".parse::<Occupation>().unwrap(), occ(&[1, 0, 2]));
    assert_eq!(occ(&[1, 0, 2]).to_string(), "[1,0,2]");
}

#[test]
fn identity_preserves_input() {
    let id = ComplexMatrix::identity(4);
    for input in [occ(&[1, 0, 1, 0]), occ(&[0, 1, 1, 1]), occ(&[2, 0, 0, 1])] {
        let d = output_distribution(&id, &input).unwrap();
        assert!((d.get(&input) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn single_walker_on_u1() {
    let u1 = Device::builtin("u1").unwrap().unitary;
    let d = output_distribution(&u1, &occ(&[1, 0, 0, 0])).unwrap();
    // squared moduli of the first column of the polar factor (SVD cross-check)
    let approx = [0.595889, 0.080366, 0.151059, 0.172685];
    for j in 0..4 {
        let mut t = vec![0; 4];
        t[j] = 1;
        let p = d.get(&occ(&t));
        assert!((p - u1[(j, 0)].norm_sqr()).abs() < 1e-15);
        assert!((p - approx[j]).abs() < 1e-6, "mode {j}: {p}");
    }
}

#[test]
fn hong_ou_mandel_dip() {
    let d = output_distribution(&coupler(), &occ(&[1, 1])).unwrap();
    assert!((d.get(&occ(&[2, 0])) - 0.5).abs() < 1e-15);
    assert!((d.get(&occ(&[0, 2])) - 0.5).abs() < 1e-15);
    assert!(d.get(&occ(&[1, 1])) < 1e-30);
    let classical = distinguishable_distribution(&coupler(), &occ(&[1, 1])).unwrap();
    assert!((classical.get(&occ(&[1, 1])) - 0.5).abs() < 1e-15);
}

#[test]
fn matches_polynomial_expansion_oracle() {
    let devices = [Device::builtin("u1").unwrap().unitary, Device::builtin("u2").unwrap().unitary];
    let haar = random_unitary(4, &mut RandomSource::new(21).stream(0));
    for u in devices.iter().chain(std::iter::once(&haar)) {
        for n in 0..=3 {
            for input in Occupation::enumerate(4, n) {
                let fast = output_distribution(u, &input).unwrap();
                let oracle = brute_force_distribution(u, &input);
                let tv: f64 = oracle.iter().map(|(t, p)| (fast.get(&occ(t)) - p).abs()).sum::<f64>() / 2.0;
                assert!(tv <= 1e-10, "{input}: {tv}");
                assert_eq!(fast.len(), oracle.len());
            }
        }
    }
}

#[test]
fn normalization_for_haar_unitaries() {
    let src = RandomSource::new(4);
    for m in 1..=6 {
        let u = random_unitary(m, &mut src.stream(m as u64));
        for n in 1..=3u32 {
            let mut counts = vec![0; m];
            for k in 0..n as usize {
                counts[k % m] += 1;
            }
            let d = output_distribution(&u, &occ(&counts)).unwrap();
            assert!((d.total() - 1.0).abs() <= 1e-9, "m={m} n={n}");
        }
    }
}

#[test]
fn rejects_bad_inputs() {
    let bad = ComplexMatrix::from_real(2, 2, &[1.0, 0.1, 0.0, 1.0]).unwrap();
    assert!(matches!(output_distribution(&bad, &occ(&[1, 0])), Err(Error::NotUnitary(_))));
    assert!(output_distribution(&ComplexMatrix::identity(3), &occ(&[1, 0])).is_err());
    assert!(output_distribution(&ComplexMatrix::identity(2), &occ(&[4, 3])).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permutation_covariance(seed in any::<u64>(), shift_in in 0usize..4, shift_out in 0usize..4) {
        let u = random_unitary(4, &mut RandomSource::new(seed).stream(0));
        let sigma: Vec<usize> = (0..4).map(|i| (i + shift_in) % 4).collect();
        let tau: Vec<usize> = (0..4).rev().map(|j| (j + shift_out) % 4).collect();
        // relabeled[(τ(j), σ(i))] = u[(j, i)]
        let mut relabeled = ComplexMatrix::zeros(4, 4);
        for j in 0..4 {
            for i in 0..4 {
                relabeled[(tau[j], sigma[i])] = u[(j, i)];
            }
        }
        let input = occ(&[1, 1, 0, 1]);
        let mut moved_in = vec![0; 4];
        for i in 0..4 { moved_in[sigma[i]] = input.counts()[i]; }
        let d = output_distribution(&u, &input).unwrap();
        let e = output_distribution(&relabeled, &occ(&moved_in)).unwrap();
        for (t, p) in d.iter() {
            let mut moved = vec![0; 4];
            for j in 0..4 { moved[tau[j]] = t.counts()[j]; }
            prop_assert!((e.get(&occ(&moved)) - p).abs() < 1e-12);
        }
    }
}

#[test]
fn key_independence_of_exact_distribution() {
    let src = RandomSource::new(99);
    let mut keys = src.stream(0);
    for name in ["u1", "u2"] {
        let u = Device::builtin(name).unwrap().unitary;
        for x in 0..16 {
            let p = PlaintextString::from_index(x, 4);
            let reference = output_distribution(&u, &Occupation::walkers_of(&p)).unwrap();
            let dummy_reference = output_distribution(&u, &Occupation::dummies_of(&p)).unwrap();
            for _ in 0..20 {
                let key = sample_haar_key(&mut keys, 360, 360, 360).unwrap();
                let m = encrypted_marginals(&u, &p, &key).unwrap();
                assert!(m.walker.total_variation(&reference) < 1e-12, "{name} {p} {key}");
                assert!(m.dummy.total_variation(&dummy_reference) < 1e-12);
            }
        }
    }
}

#[test]
fn identity_protocol_returns_plaintext() {
    let id = ComplexMatrix::identity(4);
    let p: PlaintextString = "1010".parse().unwrap();
    let key = PolarizationKey::euler(1.0, 2.0, 3.0).unwrap();
    let run = run_protocol(&id, &p, &key, 10, &RandomSource::new(1), None).unwrap();
    assert_eq!(run.logical.get(&p), Some(&10));
    assert_eq!(run.collisions, 0);
    assert!(run_protocol(&ComplexMatrix::identity(3), &p, &key, 10, &RandomSource::new(1), None).is_err());
    assert!(run_protocol(&id, &p, &key, 0, &RandomSource::new(1), None).is_err());
}

#[test]
fn sampled_protocol_converges() {
    let u = Device::builtin("u1").unwrap().unitary;
    let p: PlaintextString = "0011".parse().unwrap();
    let exact = output_distribution(&u, &Occupation::walkers_of(&p)).unwrap();
    let hv = PolarizationKey::linear(0, 1).unwrap();
    let da = PolarizationKey::linear(1, 4).unwrap();
    let src = RandomSource::new(5);
    let a = run_protocol(&u, &p, &hv, 100_000, &src, None).unwrap();
    let b = run_protocol(&u, &p, &da, 100_000, &src, None).unwrap();
    assert!(bhattacharyya_fidelity(&a.empirical(), &exact) >= 0.995);
    assert!(bhattacharyya_fidelity(&b.empirical(), &exact) >= 0.995);
    let collision_mass: f64 = exact.iter().filter(|(o, _)| !o.is_collision_free()).map(|(_, p)| p).sum();
    assert!((a.collisions as f64 / 1e5 - collision_mass).abs() < 0.01);
    let logical_total: u64 = a.logical.values().sum();
    assert_eq!(logical_total + a.collisions, a.shots);
}

#[test]
fn noise_fills_the_hom_dip() {
    let u = coupler();
    let p: PlaintextString = "00".parse().unwrap();
    let key = PolarizationKey::identity();
    let src = RandomSource::new(8);
    let clean = run_protocol(&u, &p, &key, 20_000, &src, None).unwrap();
    assert_eq!(clean.logical.get(&"00".parse().unwrap()), None);
    let noise = NoiseModel::new(0.88, 0.0014).unwrap();
    let noisy = run_protocol(&u, &p, &key, 200_000, &src, Some(&noise)).unwrap();
    // coincidence rate (1 − V)/2 plus a third of the spurious shots
    let expected = (1.0 - 0.88) / 2.0 * (1.0 - 0.0014) + 0.0014 / 3.0;
    let observed = *noisy.logical.get(&"00".parse().unwrap()).unwrap() as f64 / 200_000.0;
    assert!((observed - expected).abs() < 0.004, "{observed} vs {expected}");
    assert!(NoiseModel::new(1.2, 0.0).is_err());
}

#[test]
fn decode_rejects_collisions() {
    assert_eq!(decode_output(&occ(&[1, 0, 0, 1])).unwrap().to_string(), "0110");
    assert!(decode_output(&occ(&[2, 0, 0, 0])).is_none());
}

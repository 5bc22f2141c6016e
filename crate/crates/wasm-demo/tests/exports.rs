use qhe_core::device::{Device, DeviceFile};
use qhe_wasm_demo::{attack_curve_data, resolve_key, security_data, walk_data};

#[test]
fn attack_curve_starts_at_one_and_approaches_limit() {
    let curve = attack_curve_data(4, 200).unwrap();
    assert_eq!(curve.points.len(), 200);
    assert_eq!(curve.points[0].p, 1.0);
    assert!((curve.points[1].p - 0.5).abs() < 1e-15);
    assert!((curve.points[199].p - 35.0 / 128.0).abs() < 1e-4);
    assert!(attack_curve_data(4, 0).is_err());
}

#[test]
fn walk_matches_across_keys() {
    let a = walk_data("u1", "0011", "linear:0/1", 20_000, 3).unwrap();
    let b = walk_data("u1", "0011", "haar:64,64,64", 20_000, 3).unwrap();
    for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
        assert_eq!(x.outcome, y.outcome);
        assert!((x.p_exact - y.p_exact).abs() < 1e-12);
    }
    assert!(a.fidelity > 0.99 && b.fidelity > 0.99);
    assert_eq!(a.outcomes.iter().map(|o| o.count).sum::<u64>(), 20_000);
}

#[test]
fn walk_accepts_device_json() {
    let json = DeviceFile::from_matrix(&Device::builtin("u2").unwrap().unitary).to_json();
    let custom = walk_data(&json, "0111", "linear:1/3", 1000, 1).unwrap();
    let builtin = walk_data("u2", "0111", "linear:1/3", 1000, 1).unwrap();
    assert_eq!(custom.device, "custom");
    for (x, y) in custom.outcomes.iter().zip(&builtin.outcomes) {
        assert!((x.p_exact - y.p_exact).abs() < 1e-12);
    }
}

#[test]
fn walk_rejects_bad_input() {
    assert!(walk_data("u1", "001", "linear:0/1", 10, 0).is_err());
    assert!(walk_data("u9", "0011", "linear:0/1", 10, 0).is_err());
    assert!(walk_data("u1", "0011", "spiral:1", 10, 0).is_err());
    assert!(walk_data("u1", "0011", "linear:0/1", 0, 0).is_err());
}

#[test]
fn haar_key_is_seeded() {
    assert_eq!(resolve_key("haar:64,64,64", 5).unwrap(), resolve_key("haar:64,64,64", 5).unwrap());
    assert_ne!(resolve_key("haar:64,64,64", 5).unwrap(), resolve_key("haar:64,64,64", 6).unwrap());
}

#[test]
fn security_linear_180() {
    let r = security_data(4, "linear:180").unwrap();
    assert!((r.holevo_bits - 1.96936).abs() < 1e-5);
    assert!((r.trace_distances[0] - 0.808).abs() < 1e-3);
    assert_eq!(r.sector_weights.len(), 5);
    assert!(security_data(4, "poincare:1024,1024,1024").is_err());
}

//! Browser bindings for the encrypted quantum walk simulator.
//!
//! Every export returns a JSON string; the plain Rust functions behind them
//! are public so they can be exercised natively.

use qhe_core::device::{Device, DeviceFile, BUILTIN_NAMES};
use qhe_core::polarization::{sample_haar_key, PlaintextString, PolarizationKey};
use qhe_core::rng::RandomSource;
use qhe_core::security::{
    attack_asymptote, attack_success, attack_success_limit, encrypted_density, hamming_trace_distances,
    holevo_poincare_limit, KeyEnsemble,
};
use qhe_core::walk::{bhattacharyya_fidelity, decode_output, encrypted_marginals, run_protocol, Occupation};
use qhe_core::{Error, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest d plotted by [`attack_curve`].
pub const MAX_CURVE_D: u32 = 512;
/// Shot cap for in-browser sampling.
pub const MAX_DEMO_SHOTS: u32 = 1_000_000;
/// Key-count cap for in-browser ensembles.
pub const MAX_DEMO_KEYS: usize = 1 << 19;

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub d: u32,
    pub p: f64,
}

#[derive(Debug, Serialize)]
pub struct AttackCurve {
    pub m: u32,
    pub points: Vec<CurvePoint>,
    pub p_limit: f64,
    pub p_asymptote: f64,
}

/// Exact attack success for `d = 1..=d_max` at `m` qubits.
pub fn attack_curve_data(m: u32, d_max: u32) -> Result<AttackCurve> {
    if d_max == 0 || d_max > MAX_CURVE_D {
        return Err(Error::OutOfRange(format!("d_max must lie in 1..={MAX_CURVE_D}")));
    }
    let points = (1..=d_max).map(|d| attack_success(m, d).map(|p| CurvePoint { d, p })).collect::<Result<_>>()?;
    Ok(AttackCurve { m, points, p_limit: attack_success_limit(m), p_asymptote: attack_asymptote(f64::from(m))? })
}

#[derive(Debug, Serialize)]
pub struct WalkOutcome {
    pub outcome: String,
    pub logical: Option<String>,
    pub p_exact: f64,
    pub count: u64,
}

#[derive(Debug, Serialize)]
pub struct WalkResult {
    pub device: String,
    pub projection_distance: f64,
    pub plaintext: String,
    pub key: PolarizationKey,
    pub shots: u64,
    pub outcomes: Vec<WalkOutcome>,
    pub collisions: u64,
    pub fidelity: f64,
}

/// `u1`, `u2`, `identityN` or device-file JSON text.
pub fn resolve_device(spec: &str) -> Result<Device> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        Device::from_file("custom", &DeviceFile::from_json(spec)?)
    } else {
        Device::builtin(spec)
    }
}

/// `linear:k/d`, `euler:a,b,c`, or `haar:d1,d2,d3` drawn from `seed`.
pub fn resolve_key(spec: &str, seed: u32) -> Result<PolarizationKey> {
    match spec.trim().strip_prefix("haar:") {
        Some(rest) => {
            let dims = rest
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad haar grid \"{rest}\""))))
                .collect::<Result<Vec<_>>>()?;
            let [d1, d2, d3] = dims[..] else {
                return Err(Error::Parse("haar key needs three grid sizes".into()));
            };
            let mut rng = RandomSource::new(u64::from(seed)).derive(0x006b_6579).stream(0);
            sample_haar_key(&mut rng, d1, d2, d3)
        }
        None => spec.parse(),
    }
}

/// Exact walker law for a plaintext under a key, plus a sampled run.
pub fn walk_data(device: &str, plaintext: &str, key: &str, shots: u32, seed: u32) -> Result<WalkResult> {
    if shots == 0 || shots > MAX_DEMO_SHOTS {
        return Err(Error::OutOfRange(format!("shots must lie in 1..={MAX_DEMO_SHOTS}")));
    }
    let device = resolve_device(device)?;
    let u = &device.unitary;
    let x: PlaintextString = plaintext.parse()?;
    let key = resolve_key(key, seed)?;
    let exact = encrypted_marginals(u, &x, &key)?.walker;
    let run = run_protocol(u, &x, &key, u64::from(shots), &RandomSource::new(u64::from(seed)), None)?;
    let outcomes = Occupation::enumerate(u.rows(), Occupation::walkers_of(&x).photons())
        .into_iter()
        .map(|occ| WalkOutcome {
            outcome: occ.to_string(),
            logical: decode_output(&occ).map(|p| p.to_string()),
            p_exact: exact.get(&occ),
            count: run.occupations.get(&occ).copied().unwrap_or(0),
        })
        .collect();
    Ok(WalkResult {
        device: device.name.clone(),
        projection_distance: device.projection_distance,
        plaintext: x.to_string(),
        key,
        shots: run.shots,
        outcomes,
        collisions: run.collisions,
        fidelity: bhattacharyya_fidelity(&exact, &run.empirical()),
    })
}

#[derive(Debug, Serialize)]
pub struct SecurityResult {
    pub m: usize,
    pub ensemble: KeyEnsemble,
    pub holevo_bits: f64,
    pub hidden_bits: f64,
    pub poincare_limit_bits: f64,
    pub eigenvalues: Vec<f64>,
    pub sector_weights: Vec<f64>,
    pub trace_distances: Vec<f64>,
}

/// Spectrum, sector weights and Holevo quantity of the encrypted all-zero string.
pub fn security_data(m: usize, ensemble: &str) -> Result<SecurityResult> {
    let ensemble: KeyEnsemble = ensemble.parse()?;
    if ensemble.len() > MAX_DEMO_KEYS {
        return Err(Error::ResourceLimit(format!("ensemble too large for the demo ({} keys)", ensemble.len())));
    }
    if m == 0 || m > 6 {
        return Err(Error::OutOfRange("m must lie in 1..=6".into()));
    }
    let rho = encrypted_density(&PlaintextString::zeros(m), &ensemble)?;
    let hidden = rho.entropy()?;
    Ok(SecurityResult {
        m,
        ensemble,
        holevo_bits: m as f64 - hidden,
        hidden_bits: hidden,
        poincare_limit_bits: holevo_poincare_limit(m as u32),
        eigenvalues: rho.eigenvalues()?.into_iter().map(|l| if l.abs() < 1e-12 { 0.0 } else { l }).collect(),
        sector_weights: rho.symmetric_sector_weights(),
        trace_distances: hamming_trace_distances(m, &ensemble)?.into_iter().map(|(_, d)| d).collect(),
    })
}

fn to_js<T: Serialize>(value: Result<T>) -> std::result::Result<String, JsError> {
    value.map(|v| serde_json::to_string(&v).expect("serializable")).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn attack_curve(m: u32, d_max: u32) -> std::result::Result<String, JsError> {
    to_js(attack_curve_data(m, d_max))
}

#[wasm_bindgen]
pub fn walk(device: &str, plaintext: &str, key: &str, shots: u32, seed: u32) -> std::result::Result<String, JsError> {
    to_js(walk_data(device, plaintext, key, shots, seed))
}

#[wasm_bindgen]
pub fn security(m: usize, ensemble: &str) -> std::result::Result<String, JsError> {
    to_js(security_data(m, ensemble))
}

#[wasm_bindgen]
pub fn builtin_devices() -> String {
    serde_json::to_string(&BUILTIN_NAMES).expect("serializable")
}

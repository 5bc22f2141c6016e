//! Device files and the built-in four-mode chips.
//!
//! Device-file JSON: `{ "m": 4, "unitary": [[[re, im], ...], ...] }`, row-major
//! with row = output mode and column = input mode.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{unitarize, ComplexMatrix};

/// Serialized form of a path unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceFile {
    pub m: usize,
    pub unitary: Vec<Vec<[f64; 2]>>,
}

impl DeviceFile {
    pub fn from_matrix(u: &ComplexMatrix) -> Self {
        Self { m: u.rows(), unitary: (0..u.rows()).map(|i| u.row(i).iter().map(|z| [z.re, z.im]).collect()).collect() }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.m == 0 || self.unitary.len() != self.m || self.unitary.iter().any(|r| r.len() != self.m) {
            return Err(Error::Device(format!("expected a {0}x{0} \"unitary\" array", self.m)));
        }
        ComplexMatrix::from_rows(
            self.unitary.iter().map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect(),
        )
        .map_err(|e| Error::Device(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Device(format!("malformed device file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device file serializes")
    }
}

/// A path unitary ready for simulation.
#[derive(Debug, Clone)]
pub struct Device {
    pub name: String,
    /// Matrix as given (printed values for built-ins).
    pub given: ComplexMatrix,
    /// Closest unitary to `given`.
    pub unitary: ComplexMatrix,
    /// `max |unitary − given|` elementwise.
    pub projection_distance: f64,
}

impl Device {
    /// Projects `given` onto the unitary group and records the distance moved.
    pub fn new(name: impl Into<String>, given: ComplexMatrix) -> Result<Self> {
        let unitary = unitarize(&given).map_err(|e| Error::Device(format!("cannot unitarize: {e}")))?;
        let projection_distance = unitary.max_abs_diff(&given);
        Ok(Self { name: name.into(), given, unitary, projection_distance })
    }

    pub fn from_file(name: impl Into<String>, file: &DeviceFile) -> Result<Self> {
        Self::new(name, file.to_matrix()?)
    }

    /// `u1`, `u2` or `identityN`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "u1" => Self::new("u1", printed_u1()),
            "u2" => Self::new("u2", printed_u2()),
            other => match other.strip_prefix("identity").map(str::parse::<usize>) {
                Some(Ok(n)) if (1..=16).contains(&n) => Self::new(other, ComplexMatrix::identity(n)),
                _ => Err(Error::Device(format!("unknown built-in device \"{name}\""))),
            },
        }
    }
}

pub const BUILTIN_NAMES: [&str; 3] = ["u1", "u2", "identity4"];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// First chip, as printed to two decimals (not exactly unitary).
pub fn printed_u1() -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![
        vec![c(0.74, 0.0), c(0.38, 0.0), c(0.39, 0.0), c(0.4, 0.0)],
        vec![c(0.37, 0.0), c(-0.34, -0.71), c(-0.17, 0.31), c(-0.18, 0.31)],
        vec![c(0.38, 0.0), c(-0.15, 0.29), c(-0.81, 0.06), c(0.18, 0.25)],
        vec![c(0.42, 0.0), c(-0.17, 0.32), c(0.2, 0.18), c(-0.78, 0.08)],
    ])
    .expect("static matrix")
}

/// Second chip, as printed to two decimals.
pub fn printed_u2() -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![
        vec![c(0.64, 0.0), c(0.44, 0.0), c(0.37, 0.0), c(0.54, 0.0)],
        vec![c(0.44, 0.0), c(-0.33, -0.65), c(-0.14, 0.26), c(-0.15, 0.41)],
        vec![c(0.37, 0.0), c(-0.14, 0.26), c(-0.4, 0.51), c(-0.15, -0.57)],
        vec![c(0.54, 0.0), c(-0.15, 0.41), c(-0.15, -0.57), c(-0.41, 0.02)],
    ])
    .expect("static matrix")
}

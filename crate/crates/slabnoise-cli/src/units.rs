//! Unit-suffixed numeric quantities for CLI flags and config files.
//!
//! Accepted suffixes: nm, µm/μm/um, mm, cm, m; Hz, kHz, MHz, GHz; K, mK; T.
//! A bare number is dimensionless. Parsing and re-emission are lossless in
//! the (value, unit) pair — the canonical text form is the shortest
//! round-trip float immediately followed by the suffix.

use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dimension {
    Length,
    Frequency,
    Temperature,
    MagneticField,
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Unit {
    NanoMeter,
    MicroMeter,
    MilliMeter,
    CentiMeter,
    Meter,
    Hertz,
    KiloHertz,
    MegaHertz,
    GigaHertz,
    Kelvin,
    MilliKelvin,
    Tesla,
    None,
}

impl Unit {
    pub fn suffix(self) -> &'static str {
        match self {
            Unit::NanoMeter => "nm",
            Unit::MicroMeter => "um",
            Unit::MilliMeter => "mm",
            Unit::CentiMeter => "cm",
            Unit::Meter => "m",
            Unit::Hertz => "Hz",
            Unit::KiloHertz => "kHz",
            Unit::MegaHertz => "MHz",
            Unit::GigaHertz => "GHz",
            Unit::Kelvin => "K",
            Unit::MilliKelvin => "mK",
            Unit::Tesla => "T",
            Unit::None => "",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            Unit::NanoMeter
            | Unit::MicroMeter
            | Unit::MilliMeter
            | Unit::CentiMeter
            | Unit::Meter => Dimension::Length,
            Unit::Hertz | Unit::KiloHertz | Unit::MegaHertz | Unit::GigaHertz => {
                Dimension::Frequency
            }
            Unit::Kelvin | Unit::MilliKelvin => Dimension::Temperature,
            Unit::Tesla => Dimension::MagneticField,
            Unit::None => Dimension::Dimensionless,
        }
    }

    pub fn si_factor(self) -> f64 {
        match self {
            Unit::NanoMeter => 1e-9,
            Unit::MicroMeter => 1e-6,
            Unit::MilliMeter => 1e-3,
            Unit::CentiMeter => 1e-2,
            Unit::Meter => 1.0,
            Unit::Hertz => 1.0,
            Unit::KiloHertz => 1e3,
            Unit::MegaHertz => 1e6,
            Unit::GigaHertz => 1e9,
            Unit::Kelvin => 1.0,
            Unit::MilliKelvin => 1e-3,
            Unit::Tesla => 1.0,
            Unit::None => 1.0,
        }
    }
}

// longest-match order; micro variants normalize to "um"
const SUFFIXES: &[(&str, Unit)] = &[
    ("GHz", Unit::GigaHertz),
    ("MHz", Unit::MegaHertz),
    ("kHz", Unit::KiloHertz),
    ("Hz", Unit::Hertz),
    ("mK", Unit::MilliKelvin),
    ("nm", Unit::NanoMeter),
    ("µm", Unit::MicroMeter),
    ("μm", Unit::MicroMeter),
    ("um", Unit::MicroMeter),
    ("mm", Unit::MilliMeter),
    ("cm", Unit::CentiMeter),
    ("K", Unit::Kelvin),
    ("m", Unit::Meter),
    ("T", Unit::Tesla),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("cannot parse quantity {text:?}: {reason}")]
pub struct ParseQuantityError {
    pub text: String,
    pub reason: String,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }

    pub fn bare(value: f64) -> Self {
        Self::new(value, Unit::None)
    }

    /// Value in base SI units of its dimension (m, Hz, K, T).
    pub fn si(self) -> f64 {
        self.value * self.unit.si_factor()
    }

    pub fn expect(self, dim: Dimension, what: &str) -> Result<f64, ParseQuantityError> {
        let got = self.unit.dimension();
        if got == dim || got == Dimension::Dimensionless {
            Ok(self.si())
        } else {
            Err(ParseQuantityError {
                text: self.to_string(),
                reason: format!("{what} expects a {dim:?} quantity, got {got:?}"),
            })
        }
    }

    /// Frequencies in Hz converted to angular rad/s; bare values are taken
    /// as rad/s already.
    pub fn angular(self, what: &str) -> Result<f64, ParseQuantityError> {
        match self.unit.dimension() {
            Dimension::Frequency => Ok(2.0 * std::f64::consts::PI * self.si()),
            Dimension::Dimensionless => Ok(self.value),
            got => Err(ParseQuantityError {
                text: self.to_string(),
                reason: format!("{what} expects a frequency, got {got:?}"),
            }),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.value, self.unit.suffix())
    }
}

impl FromStr for Quantity {
    type Err = ParseQuantityError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let text = raw.trim();
        if text.is_empty() {
            return Err(ParseQuantityError {
                text: raw.into(),
                reason: "empty input".into(),
            });
        }
        for (suffix, unit) in SUFFIXES {
            if let Some(head) = text.strip_suffix(suffix) {
                let head = head.trim_end();
                if head.is_empty() {
                    continue;
                }
                if let Ok(value) = f64::from_str(head) {
                    if value.is_finite() {
                        return Ok(Quantity::new(value, *unit));
                    }
                    return Err(ParseQuantityError {
                        text: raw.into(),
                        reason: "non-finite value".into(),
                    });
                }
                // fall through: e.g. "1.2e" before "m" is not a number, but
                // a shorter suffix might still work, so keep scanning
            }
        }
        match f64::from_str(text) {
            Ok(value) if value.is_finite() => Ok(Quantity::bare(value)),
            Ok(_) => Err(ParseQuantityError {
                text: raw.into(),
                reason: "non-finite value".into(),
            }),
            Err(_) => Err(ParseQuantityError {
                text: raw.into(),
                reason: "unrecognized number or unit suffix".into(),
            }),
        }
    }
}

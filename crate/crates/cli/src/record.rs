use std::f64::consts::LN_2;

use serde::Serialize;
use serde_json::{json, Value};

/// Why a command did not produce a trustworthy result.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 3,
            Failure::Solver(_) => 2,
        }
    }
}

impl From<simex::Error> for Failure {
    fn from(e: simex::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

/// The single JSON object printed by a query subcommand.
#[derive(Debug, Serialize)]
pub struct Record {
    pub quantity: &'static str,
    pub inputs: Value,
    pub value: Value,
    pub certificate: Value,
    pub warnings: Vec<String>,
    /// False when the solver finished but could not certify its answer.
    #[serde(skip)]
    pub certified: bool,
}

/// Output units. Inputs are always nats; only displayed values change.
#[derive(Debug, Clone, Copy)]
pub struct Units {
    pub bits: bool,
}

impl Units {
    pub fn name(self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }

    /// Converts an information quantity given in nats.
    pub fn info(self, v: f64) -> f64 {
        if self.bits {
            v / LN_2
        } else {
            v
        }
    }

    pub fn info_json(self, v: f64) -> Value {
        num(self.info(v))
    }
}

/// JSON number, with non-finite values spelled out.
pub fn num(v: f64) -> Value {
    simex::io::extended_json(v)
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

/// 17 significant digits, so every `f64` survives a text round trip.
pub fn fmt17(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 {
        // Drop the sign of negative zero so equal values print identically.
        format!("{:.16e}", 0.0)
    } else {
        format!("{v:.16e}")
    }
}

pub fn error_record(quantity: &'static str, failure: &Failure) -> Value {
    json!({
        "quantity": quantity,
        "error": failure.to_string(),
        "exit_code": failure.exit_code(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 5.9989372e-1, 1e-300, 123456.789] {
            let s = fmt17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
        assert_eq!(fmt17(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt17(-0.0), fmt17(0.0));
    }

    #[test]
    fn bits_conversion() {
        assert_eq!(Units { bits: true }.info(LN_2), 1.0);
        assert_eq!(Units { bits: false }.info(0.5), 0.5);
    }
}

//! Channel files and JSON helpers.
//!
//! A channel file looks like
//! `{"input": ["0","1"], "output": ["0","1"], "matrix": [[0.9,0.1],[0.1,0.9]]}`;
//! the label lists are optional and default to `"0"`, `"1"`, ….

use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prob::Channel;

/// Row sums may deviate from one by this much before a file is rejected.
pub const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
struct ChannelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<Vec<String>>,
    matrix: Vec<Vec<f64>>,
}

pub fn parse_channel(text: &str) -> Result<Channel<f64>> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidChannel(format!("malformed channel JSON: {e}")))?;
    let nx = file.matrix.len();
    let ny = file.matrix.first().map_or(0, Vec::len);
    let input = file.input.unwrap_or_else(|| (0..nx).map(|i| i.to_string()).collect());
    let output = file.output.unwrap_or_else(|| (0..ny).map(|i| i.to_string()).collect());
    Channel::with_row_tolerance(input, output, file.matrix, ROW_TOLERANCE)
}

pub fn read_channel(path: impl AsRef<Path>) -> Result<Channel<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_channel(&text)
}

pub fn channel_to_json(w: &Channel<f64>) -> String {
    let file = ChannelFile {
        input: Some(w.input_labels().to_vec()),
        output: Some(w.output_labels().to_vec()),
        matrix: w.rows().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("channel serializes")
}

pub fn write_channel(w: &Channel<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, channel_to_json(w) + "\n")
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

/// JSON value for an extended real: non-finite values become `"inf"`, `"-inf"` or `"nan"`.
pub fn extended_json(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::Value::from(v)
    } else if v.is_nan() {
        serde_json::Value::from("nan")
    } else if v > 0.0 {
        serde_json::Value::from("inf")
    } else {
        serde_json::Value::from("-inf")
    }
}

pub fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    extended_json(*v).serialize(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let w = Channel::with_labels(
            vec!["a".into(), "b".into()],
            vec!["u".into(), "v".into(), "w".into()],
            vec![vec![0.1, 0.2, 0.7], vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]],
        )
        .unwrap();
        let back = parse_channel(&channel_to_json(&w)).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn bad_rows_are_named() {
        let err = parse_channel(r#"{"matrix": [[0.5, 0.5], [0.6, 0.6]]}"#).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        assert!(parse_channel("{").is_err());
        let ok = parse_channel(r#"{"matrix": [[0.5, 0.5000000001], [1, 0]]}"#).unwrap();
        assert_eq!(ok.input_labels(), ["0", "1"]);
    }

    #[test]
    fn extended_values() {
        assert_eq!(extended_json(f64::INFINITY), serde_json::json!("inf"));
        assert_eq!(extended_json(f64::NEG_INFINITY), serde_json::json!("-inf"));
        assert_eq!(extended_json(0.5), serde_json::json!(0.5));
    }
}

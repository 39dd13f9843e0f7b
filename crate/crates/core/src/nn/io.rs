//! JSON weight files.
//!
//! ```json
//! {
//!   "format": 1,
//!   "p": 2,
//!   "h1": 3,
//!   "activation": "softplus",
//!   "w": [[w01, w02, w03], [w11, w12, w13], [w21, w22, w23]],
//!   "v": [v0, v1, v2, v3]
//! }
//! ```
//!
//! `w` has `p + 1` rows of `h1` entries; row 0 holds the hidden biases.
//! `v[0]` is the output bias. Numbers are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::NetworkWeights;
use crate::activations::Activation;
use crate::error::{Error, Result};
use crate::numfmt::json_array;

pub const WEIGHTS_FORMAT: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    format: u32,
    p: usize,
    h1: usize,
    activation: Activation,
    w: Vec<Vec<f64>>,
    v: Vec<f64>,
}

impl NetworkWeights {
    pub fn to_json(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "{{").unwrap();
        writeln!(out, "  \"format\": {WEIGHTS_FORMAT},").unwrap();
        writeln!(out, "  \"p\": {},", self.p).unwrap();
        writeln!(out, "  \"h1\": {},", self.h1).unwrap();
        writeln!(out, "  \"activation\": \"{}\",", self.activation).unwrap();
        writeln!(out, "  \"w\": [").unwrap();
        for i in 0..=self.p {
            let row = &self.w[i * self.h1..(i + 1) * self.h1];
            let sep = if i < self.p { "," } else { "" };
            writeln!(out, "    {}{sep}", json_array(row, "weight")?).unwrap();
        }
        writeln!(out, "  ],").unwrap();
        writeln!(out, "  \"v\": {}", json_array(&self.v, "weight")?).unwrap();
        writeln!(out, "}}").unwrap();
        Ok(out)
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<NetworkWeights> {
        let parse_err = |message: String| Error::Parse {
            kind: "weights",
            path: origin.to_path_buf(),
            message,
        };
        let file: WeightsFile = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        if file.format != WEIGHTS_FORMAT {
            return Err(parse_err(format!(
                "field `format`: unsupported version {}",
                file.format
            )));
        }
        if file.w.len() != file.p + 1 {
            return Err(parse_err(format!(
                "field `w`: expected {} rows (p + 1), found {}",
                file.p + 1,
                file.w.len()
            )));
        }
        if let Some((i, row)) = file.w.iter().enumerate().find(|(_, r)| r.len() != file.h1) {
            return Err(parse_err(format!(
                "field `w` row {i}: expected {} entries (h1), found {}",
                file.h1,
                row.len()
            )));
        }
        if file.v.len() != file.h1 + 1 {
            return Err(parse_err(format!(
                "field `v`: expected {} entries (h1 + 1), found {}",
                file.h1 + 1,
                file.v.len()
            )));
        }
        NetworkWeights::new(file.p, file.h1, file.w.concat(), file.v, file.activation)
            .map_err(|e| parse_err(e.to_string()))
    }
}

pub fn save_weights(net: &NetworkWeights, path: &Path) -> Result<()> {
    std::fs::write(path, net.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load_weights(path: &Path) -> Result<NetworkWeights> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    NetworkWeights::from_json(&text, path)
}

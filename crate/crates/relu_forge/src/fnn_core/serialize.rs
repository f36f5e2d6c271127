use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::network::{Layer, ReluNetwork};
use crate::error::{ForgeError, Result};

pub const FORMAT_VERSION: i64 = 1;

#[derive(Serialize, Deserialize)]
struct Document {
    format_version: i64,
    input_dim: usize,
    layers: Vec<DocLayer>,
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct DocLayer {
    weights: Vec<Vec<String>>,
    bias: Vec<String>,
}

/// Formats `v` as a C99-style hexadecimal float literal, e.g. `0x1.8p+1` for 3.
pub fn format_hex_f64(v: f64) -> String {
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{mant:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let frac = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    let esign = if e >= 0 { "+" } else { "" };
    format!("{sign}0x{lead}{frac}p{esign}{e}")
}

/// Parses the literals produced by [`format_hex_f64`]. Only finite values are accepted.
pub fn parse_hex_f64(s: &str) -> Option<f64> {
    let (neg, rest) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (mant, exp) = rest.split_once(['p', 'P'])?;
    let exp: i64 = exp.parse().ok()?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut value: u128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        let digit = c.to_digit(16)? as u128;
        if value >> 120 != 0 {
            return None;
        }
        value = (value << 4) | digit;
    }
    let shift = -4 * frac_part.len() as i64;
    if value == 0 {
        return Some(if neg { -0.0 } else { 0.0 });
    }
    // value * 2^(exp + shift), rounded to nearest even
    let total = exp + shift;
    let top = 127 - value.leading_zeros() as i64;
    let unbiased = top + total;
    if unbiased > 1023 {
        return None;
    }
    let min_exp = if unbiased < -1022 { -1074 } else { unbiased - 52 };
    let drop = min_exp - total;
    let mant = if drop > 0 {
        if drop >= 128 {
            0
        } else {
            let q = value >> drop;
            let r = value & ((1u128 << drop) - 1);
            let half = 1u128 << (drop - 1);
            if r > half || (r == half && q & 1 == 1) {
                q + 1
            } else {
                q
            }
        }
    } else {
        value << (-drop)
    };
    let pow2 = |e: i64| f64::from_bits(((e + 1023) as u64) << 52);
    let v = if min_exp >= -1022 {
        mant as f64 * pow2(min_exp)
    } else {
        mant as f64 * pow2(-1022) * pow2(min_exp + 1022)
    };
    if !v.is_finite() {
        return None;
    }
    Some(if neg { -v } else { v })
}

pub fn serialize(net: &ReluNetwork) -> Vec<u8> {
    let doc = Document {
        format_version: FORMAT_VERSION,
        input_dim: net.input_dim(),
        layers: net
            .layers()
            .iter()
            .map(|l| DocLayer {
                weights: (0..l.rows())
                    .map(|r| l.row(r).iter().map(|v| format_hex_f64(*v)).collect())
                    .collect(),
                bias: l.bias().iter().map(|v| format_hex_f64(*v)).collect(),
            })
            .collect(),
        metadata: net.metadata().clone(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("document is always serializable");
    out.push(b'\n');
    out
}

pub fn deserialize(bytes: &[u8]) -> Result<ReluNetwork> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| ForgeError::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    match value.get("format_version").and_then(|v| v.as_i64()) {
        Some(FORMAT_VERSION) => {}
        Some(found) => return Err(ForgeError::Version { found, expected: FORMAT_VERSION }),
        None => {
            return Err(ForgeError::Parse {
                location: "format_version".into(),
                message: "missing or non-integer format_version".into(),
            })
        }
    }
    let doc: Document = serde_json::from_value(value).map_err(|e| ForgeError::Parse {
        location: "document".into(),
        message: e.to_string(),
    })?;
    let mut layers = Vec::with_capacity(doc.layers.len());
    let mut cols = doc.input_dim;
    for (i, l) in doc.layers.iter().enumerate() {
        let real = |s: &str, loc: String| {
            parse_hex_f64(s).ok_or_else(|| ForgeError::Parse {
                location: loc,
                message: format!("invalid hexadecimal float literal {s:?}"),
            })
        };
        let mut w = Vec::with_capacity(l.weights.len() * cols);
        for (r, row) in l.weights.iter().enumerate() {
            if row.len() != cols {
                return Err(ForgeError::Parse {
                    location: format!("layers[{i}].weights[{r}]"),
                    message: format!("row has {} entries, expected {cols}", row.len()),
                });
            }
            for (c, s) in row.iter().enumerate() {
                w.push(real(s, format!("layers[{i}].weights[{r}][{c}]"))?);
            }
        }
        let b = l
            .bias
            .iter()
            .enumerate()
            .map(|(r, s)| real(s, format!("layers[{i}].bias[{r}]")))
            .collect::<Result<Vec<_>>>()?;
        let rows = l.weights.len();
        layers.push(Layer::new(rows, cols, w, b).map_err(|e| ForgeError::Parse {
            location: format!("layers[{i}]"),
            message: e.to_string(),
        })?);
        cols = rows;
    }
    ReluNetwork::from_parts(doc.input_dim, layers, doc.metadata).map_err(|e| ForgeError::Parse {
        location: "layers".into(),
        message: e.to_string(),
    })
}

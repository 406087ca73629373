//! Checkpoint format: one JSON object whose `payload` field is base64 of the
//! coefficient array as little-endian IEEE-754 binary64, laid out as
//! `re(u_0), im(u_0), ..., re(u_{n-1}), im(u_{n-1})` followed by the same for `v`.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{FieldPair, TorusGrid};
use super::SpectralError;

pub const FORMAT: &str = "mbkdv-checkpoint/1";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub grid: TorusGrid,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub state: FieldPair,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    lambda: f64,
    n_points: usize,
    alpha: f64,
    p: f64,
    q: f64,
    time: f64,
    byte_order: String,
    payload: String,
}

pub fn write_checkpoint(checkpoint: &Checkpoint) -> String {
    let mut bytes = Vec::with_capacity(32 * checkpoint.state.u_hat.len());
    for z in checkpoint.state.u_hat.iter().chain(&checkpoint.state.v_hat) {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    let doc = Document {
        format: FORMAT.to_string(),
        lambda: checkpoint.grid.lambda(),
        n_points: checkpoint.grid.n_points(),
        alpha: checkpoint.alpha,
        p: checkpoint.p,
        q: checkpoint.q,
        time: checkpoint.state.time,
        byte_order: "little-endian f64".to_string(),
        payload: STANDARD.encode(bytes),
    };
    serde_json::to_string_pretty(&doc).expect("checkpoint fields serialize")
}

pub fn read_checkpoint(text: &str) -> Result<Checkpoint, SpectralError> {
    let bad = |m: String| SpectralError::Checkpoint(m);
    let doc: Document = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if doc.format != FORMAT {
        return Err(bad(format!("unknown format {:?}", doc.format)));
    }
    let grid = TorusGrid::new(doc.lambda, doc.n_points)?;
    let bytes = STANDARD.decode(doc.payload.as_bytes()).map_err(|e| bad(e.to_string()))?;
    let n = doc.n_points;
    if bytes.len() != 32 * n {
        return Err(bad(format!("payload has {} bytes, expected {}", bytes.len(), 32 * n)));
    }
    let values: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    let state = FieldPair { u_hat: values[..n].to_vec(), v_hat: values[n..].to_vec(), time: doc.time };
    Ok(Checkpoint { grid, alpha: doc.alpha, p: doc.p, q: doc.q, state })
}

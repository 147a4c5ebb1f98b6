//! Versioned JSON envelope for model checkpoints. Floats are written in
//! shortest round-trip form, so save followed by load is bit-exact.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT: &str = "drrn-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    body: T,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

pub fn write<T: Serialize>(value: &T, out: impl Write) -> Result<()> {
    let env = Envelope {
        format: FORMAT.to_string(),
        version: VERSION,
        body: value,
    };
    serde_json::to_writer(out, &env).map_err(|e| Error::Checkpoint(e.to_string()))
}

pub fn read<T: DeserializeOwned>(mut input: impl Read) -> Result<T> {
    let mut buf = String::new();
    input
        .read_to_string(&mut buf)
        .map_err(|e| Error::Checkpoint(e.to_string()))?;
    let header: Header =
        serde_json::from_str(&buf).map_err(|e| Error::Checkpoint(format!("bad header: {e}")))?;
    if header.format != FORMAT {
        return Err(Error::Checkpoint(format!("unknown format '{}'", header.format)));
    }
    if header.version != VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported version {} (expected {VERSION})",
            header.version
        )));
    }
    let env: Envelope<T> =
        serde_json::from_str(&buf).map_err(|e| Error::Checkpoint(e.to_string()))?;
    Ok(env.body)
}

//! Newline-delimited JSON sample records.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::BellSample;
use crate::error::{Error, Result};
use crate::qstate::Bits;

/// One line: seed, shot index, hex-packed u and v (qubit 0 most significant), λ and swap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellRecordLine {
    pub seed: u64,
    pub shot: usize,
    pub u: String,
    pub v: String,
    pub lambda: u32,
    pub swap: i8,
}

pub fn write_ndjson<W: Write>(mut out: W, seed: u64, samples: &[BellSample]) -> std::io::Result<()> {
    for (shot, s) in samples.iter().enumerate() {
        let line = BellRecordLine {
            seed,
            shot,
            u: s.u.to_hex(),
            v: s.v.to_hex(),
            lambda: s.lambda,
            swap: s.swap,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses a record for `n` modes and checks every stored λ and swap against the bits.
pub fn read_ndjson<R: BufRead>(input: R, n: usize) -> Result<Vec<(BellRecordLine, BellSample)>> {
    let mut out = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::InvalidArgument(format!("line {}: {e}", lineno + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: BellRecordLine = serde_json::from_str(&line)
            .map_err(|e| Error::InvalidArgument(format!("line {}: {e}", lineno + 1)))?;
        let sample = BellSample::from_bits(Bits::from_hex(n, &rec.u)?, Bits::from_hex(n, &rec.v)?);
        if sample.lambda != rec.lambda || sample.swap != rec.swap {
            return Err(Error::InvalidArgument(format!(
                "line {}: stored lambda/swap disagree with the bits",
                lineno + 1
            )));
        }
        out.push((rec, sample));
    }
    Ok(out)
}

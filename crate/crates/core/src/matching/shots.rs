//! Layer shot tables and their CSV form: `layer,shot,e1,...,en`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShotMatrix {
    pub layer: usize,
    /// outcomes[r][e] ∈ {±1}: shot r, observable e.
    pub outcomes: Vec<Vec<i8>>,
}

impl LayerShotMatrix {
    pub fn n_shots(&self) -> usize {
        self.outcomes.len()
    }
}

pub fn write_csv<W: Write>(out: W, tables: &[LayerShotMatrix]) -> Result<()> {
    let n = tables.first().and_then(|t| t.outcomes.first()).map_or(0, |r| r.len());
    let mut w = csv::Writer::from_writer(out);
    let header = ["layer".to_string(), "shot".to_string()].into_iter().chain((1..=n).map(|e| format!("e{e}")));
    w.write_record(header).map_err(csv_err)?;
    for t in tables {
        for (shot, row) in t.outcomes.iter().enumerate() {
            let fields = [t.layer.to_string(), shot.to_string()]
                .into_iter()
                .chain(row.iter().map(|x| x.to_string()));
            w.write_record(fields).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("shot table CSV: {e}"))
}

/// Reads tables back, grouping consecutive rows by layer.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<LayerShotMatrix>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let width = reader.headers().map_err(csv_err)?.len().saturating_sub(2);
    let mut tables: Vec<LayerShotMatrix> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let bad = |what: &str| Error::InvalidArgument(format!("row {}: {what}", k + 1));
        if record.len() != width + 2 {
            return Err(bad("wrong number of fields"));
        }
        let layer: usize = record[0].parse().map_err(|_| bad("bad layer"))?;
        let row = record
            .iter()
            .skip(2)
            .map(|f| match f {
                "1" => Ok(1i8),
                "-1" => Ok(-1i8),
                _ => Err(bad("entries must be 1 or -1")),
            })
            .collect::<Result<Vec<i8>>>()?;
        match tables.last_mut() {
            Some(t) if t.layer == layer => t.outcomes.push(row),
            _ => tables.push(LayerShotMatrix { layer, outcomes: vec![row] }),
        }
    }
    Ok(tables)
}

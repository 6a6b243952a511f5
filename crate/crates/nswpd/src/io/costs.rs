//! Taxon cost tables in `taxon,cost` CSV form.

use thiserror::Error;

use crate::model::{CostTable, Network};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CostError {
    #[error("line {0}: unknown taxon {1:?}")]
    UnknownTaxon(usize, String),
    #[error("no cost given for taxon {0:?}")]
    MissingTaxon(String),
    #[error("line {0}: cost {1:?} is not an integer")]
    NonIntegerCost(usize, String),
    #[error("line {0}: cost {1} is negative")]
    NegativeCost(usize, i64),
    #[error("line {0}: taxon {1:?} listed twice")]
    DuplicateTaxon(usize, String),
    #[error("line {0}: expected two fields `taxon,cost`")]
    BadRecord(usize),
    #[error("malformed CSV: {0}")]
    Csv(String),
}

/// Parses a cost CSV against the taxa of `net`. A header line is accepted
/// if its second field is not a number.
pub fn parse_costs(text: &str, net: &Network) -> Result<CostTable, CostError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut costs: Vec<Option<u64>> = vec![None; net.num_taxa()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CostError::Csv(e.to_string()))?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != 2 {
            return Err(CostError::BadRecord(line));
        }
        let (name, raw) = (&rec[0], &rec[1]);
        let value: i64 = match raw.parse() {
            Ok(v) => v,
            Err(_) if i == 0 && raw.parse::<f64>().is_err() => continue,
            Err(_) => return Err(CostError::NonIntegerCost(line, raw.to_string())),
        };
        if value < 0 {
            return Err(CostError::NegativeCost(line, value));
        }
        let t = net.taxon_id(name).ok_or_else(|| CostError::UnknownTaxon(line, name.to_string()))?;
        if costs[t].replace(value as u64).is_some() {
            return Err(CostError::DuplicateTaxon(line, name.to_string()));
        }
    }
    let mut out = Vec::with_capacity(costs.len());
    for (t, c) in costs.into_iter().enumerate() {
        out.push(c.ok_or_else(|| CostError::MissingTaxon(net.taxon_name(t).to_string()))?);
    }
    Ok(CostTable(out))
}

/// Writes `taxon,cost` lines with a header, taxa in id order.
pub fn write_costs(costs: &CostTable, net: &Network) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["taxon", "cost"]).expect("in-memory write");
    for (t, c) in costs.0.iter().enumerate() {
        w.write_record([net.taxon_name(t), &c.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

//! One-line JSON result records.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io::newick::format_weight;
use crate::model::Weight;

/// Result of one solver run. Field names are part of the command-line
/// contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ResultRecord {
    pub problem: String,
    /// Objective value: a JSON integer when integral, otherwise an exact
    /// decimal or `p/q` string.
    pub value: serde_json::Value,
    pub taxa: Vec<String>,
    pub budget: Option<u64>,
    pub nsw: Option<usize>,
    pub millis: u128,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub budget_used: Option<u64>,
    /// Witness edges as `[tail, head]` vertex-id pairs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<[usize; 2]>>,
}

impl ResultRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

pub fn weight_value(w: &Weight) -> serde_json::Value {
    if w.is_integer() {
        serde_json::Value::from(w.to_integer())
    } else {
        serde_json::Value::from(format_weight(w))
    }
}

/// Hex SHA-256 of the input text.
pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

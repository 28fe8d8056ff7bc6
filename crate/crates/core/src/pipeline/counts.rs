//! Counts JSON: bitstring (highest qubit first) to count or probability.
//!
//! Either a flat object `{"00": 100, "11": 100}` or
//! `{"metadata": {...}, "counts": {...}}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::PipelineError;
use crate::distribution::{bitstring, parse_bitstring, SparseDistribution};
use crate::sim::{Counts, NoiseModel};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CountsMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_model: Option<NoiseModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsFile {
    pub metadata: CountsMetadata,
    pub counts: BTreeMap<String, u64>,
}

impl CountsFile {
    pub fn new(n: usize, counts: &Counts, metadata: CountsMetadata) -> CountsFile {
        CountsFile {
            metadata: CountsMetadata {
                n_qubits: Some(n),
                ..metadata
            },
            counts: counts_to_strings(n, counts),
        }
    }
}

pub(crate) fn counts_to_strings(n: usize, counts: &Counts) -> BTreeMap<String, u64> {
    counts.iter().map(|(&k, &v)| (bitstring(k, n), v)).collect()
}

pub(crate) fn distribution_to_strings(d: &SparseDistribution) -> BTreeMap<String, f64> {
    d.iter().map(|(k, v)| (bitstring(k, d.n()), v)).collect()
}

fn schema(msg: impl Into<String>) -> PipelineError {
    PipelineError::Schema(msg.into())
}

/// Parse bitstring-keyed weights into `(n, entries)`; all keys must share one width.
pub(crate) fn parse_keyed<'a>(
    items: impl IntoIterator<Item = (&'a str, f64)>,
    allow_negative: bool,
) -> Result<(usize, Vec<(u64, f64)>), PipelineError> {
    let mut width = None;
    let mut entries = Vec::new();
    for (key, weight) in items {
        let outcome =
            parse_bitstring(key).map_err(|_| schema(format!("key `{key}` is not a bitstring")))?;
        match width {
            None => width = Some(key.len()),
            Some(w) if w != key.len() => {
                return Err(schema(format!(
                    "mixed bitstring widths ({w} and {})",
                    key.len()
                )))
            }
            _ => {}
        }
        if !weight.is_finite() || (!allow_negative && weight < 0.0) {
            return Err(schema(format!("invalid value {weight} for `{key}`")));
        }
        entries.push((outcome, weight));
    }
    let n = width.ok_or_else(|| schema("no outcomes"))?;
    Ok((n, entries))
}

fn parse_weight_map(
    map: &serde_json::Map<String, Value>,
) -> Result<(usize, Vec<(u64, f64)>), PipelineError> {
    let mut items = Vec::with_capacity(map.len());
    for (key, value) in map {
        let weight = value
            .as_f64()
            .ok_or_else(|| schema(format!("value for `{key}` is not a number")))?;
        items.push((key.as_str(), weight));
    }
    parse_keyed(items, false)
}

pub fn parse_counts(text: &str) -> Result<(SparseDistribution, CountsMetadata), PipelineError> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema("top level must be an object"))?;
    let (map, metadata) = match obj.get("counts") {
        Some(counts) => {
            let metadata = match obj.get("metadata") {
                Some(m) => serde_json::from_value(m.clone())?,
                None => CountsMetadata::default(),
            };
            let map = counts
                .as_object()
                .ok_or_else(|| schema("`counts` must be an object"))?;
            (map, metadata)
        }
        None => (obj, CountsMetadata::default()),
    };
    let (n, entries) = parse_weight_map(map)?;
    if let Some(declared) = metadata.n_qubits {
        if declared != n {
            return Err(schema(format!(
                "metadata declares {declared} qubits but bitstrings have {n}"
            )));
        }
    }
    let dist = SparseDistribution::from_counts(n, entries)?;
    Ok((dist, metadata))
}

/// Read a counts file and normalize it into a strict distribution.
pub fn ingest_counts(path: &Path) -> Result<(SparseDistribution, CountsMetadata), PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    parse_counts(&text)
}

//! Built-in test bank: six symbol pairs covering the five expansion cases
//! plus one boundary pair, shipped as config files under `configs/` and
//! embedded here so experiments are runnable by name.

use super::ExperimentConfig;
use crate::error::{LabError, LabResult};

const BANK: [(&str, &str); 6] = [
    ("case1i", include_str!("../../configs/case1i.cfg")),
    ("case1ii", include_str!("../../configs/case1ii.cfg")),
    ("case2i", include_str!("../../configs/case2i.cfg")),
    ("case2iia", include_str!("../../configs/case2iia.cfg")),
    ("case2iib", include_str!("../../configs/case2iib.cfg")),
    ("boundary", include_str!("../../configs/boundary.cfg")),
];

/// Names of the built-in configurations.
pub fn names() -> Vec<&'static str> {
    BANK.iter().map(|(n, _)| *n).collect()
}

/// Load a built-in configuration by name.
pub fn by_name(name: &str) -> LabResult<ExperimentConfig> {
    BANK.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ExperimentConfig::parse(text))
        .unwrap_or_else(|| {
            Err(LabError::Config(format!(
                "unknown bank config '{name}' (available: {})",
                names().join(", ")
            )))
        })
}

/// The symbol pairs of the bank (for test sweeps).
pub fn symbol_pairs() -> Vec<(crate::FHSymbol, crate::FHSymbol)> {
    names()
        .iter()
        .map(|n| by_name(n).expect("bank parses").symbols().expect("bank symbols valid"))
        .collect()
}

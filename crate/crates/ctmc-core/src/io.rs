use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::Ctmc;
use crate::error::CtmcError;
use crate::policy::NumericPolicy;
use crate::Result;

/// One state of a chain specification file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpec {
    pub label: String,
    pub lambda: f64,
}

/// Chain specification file: labelled intensity states plus the generator in
/// file row order. Unknown fields (such as a queue service block) are
/// ignored here so the same file can carry extensions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainFile {
    pub states: Vec<StateSpec>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
}

/// What the loader did to canonicalize the file.
#[derive(Debug, Clone, Serialize)]
pub struct LoadReport {
    /// State labels in canonical (ascending-intensity) order.
    pub labels: Vec<String>,
    /// `permutation[k]` is the file row now stored at canonical position `k`.
    pub permutation: Vec<usize>,
    /// Whether the file order already was the canonical order.
    pub already_sorted: bool,
}

impl ChainFile {
    /// Builds the chain, re-sorting states by ascending intensity and
    /// permuting `Q` accordingly.
    pub fn build(&self, policy: NumericPolicy) -> Result<(Ctmc, LoadReport)> {
        if self.states.len() != self.q.len() {
            return Err(CtmcError::Parse(format!(
                "{} states but Q has {} rows",
                self.states.len(),
                self.q.len()
            )));
        }
        let m = self.q.len();
        if let Some(row) = self.q.iter().position(|r| r.len() != m) {
            return Err(CtmcError::Parse(format!(
                "Q row {row} has {} entries, expected {m}",
                self.q[row].len()
            )));
        }
        let lambda: Vec<f64> = self.states.iter().map(|s| s.lambda).collect();
        let q = nalgebra::DMatrix::from_row_iterator(m, m, self.q.iter().flatten().copied());
        let chain = Ctmc::with_policy(q, lambda, policy)?;
        let permutation = chain.state_order().to_vec();
        let labels = permutation
            .iter()
            .map(|&i| self.states[i].label.clone())
            .collect();
        let already_sorted = permutation.iter().enumerate().all(|(k, &i)| k == i);
        Ok((
            chain,
            LoadReport {
                labels,
                permutation,
                already_sorted,
            },
        ))
    }
}

/// Parses a chain specification from JSON text.
pub fn load_chain_str(text: &str, policy: NumericPolicy) -> Result<(Ctmc, LoadReport)> {
    let file: ChainFile =
        serde_json::from_str(text).map_err(|e| CtmcError::Parse(e.to_string()))?;
    file.build(policy)
}

/// Reads and parses a chain specification file.
pub fn load_chain_file(path: &Path, policy: NumericPolicy) -> Result<(Ctmc, LoadReport)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CtmcError::Parse(format!("{}: {e}", path.display())))?;
    load_chain_str(&text, policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_sorts_states() {
        let text = r#"{
            "states": [
                {"label": "busy", "lambda": 1.5},
                {"label": "idle", "lambda": 0.5}
            ],
            "Q": [[-2.0, 2.0], [1.0, -1.0]]
        }"#;
        let (chain, report) = load_chain_str(text, NumericPolicy::default()).unwrap();
        assert_eq!(report.permutation, vec![1, 0]);
        assert_eq!(report.labels, vec!["idle", "busy"]);
        assert!(!report.already_sorted);
        // Q permuted along with the states: new row 0 is the old row 1.
        assert_eq!(chain.generator()[(0, 1)], 1.0);
        assert_eq!(chain.generator()[(1, 0)], 2.0);
        assert_eq!(chain.lambda()[0], 0.5);
    }

    #[test]
    fn rejects_malformed_json_and_shapes() {
        assert!(matches!(
            load_chain_str("{not json", NumericPolicy::default()),
            Err(CtmcError::Parse(_))
        ));
        let text = r#"{
            "states": [{"label": "a", "lambda": 1.0}],
            "Q": [[-1.0, 1.0], [1.0, -1.0]]
        }"#;
        assert!(matches!(
            load_chain_str(text, NumericPolicy::default()),
            Err(CtmcError::Parse(_))
        ));
    }

    #[test]
    fn reports_bad_row_by_index() {
        let text = r#"{
            "states": [
                {"label": "a", "lambda": 1.0},
                {"label": "b", "lambda": 2.0}
            ],
            "Q": [[-1.0, 1.0], [1.0, -0.5]]
        }"#;
        let err = load_chain_str(text, NumericPolicy::default()).unwrap_err();
        match err {
            CtmcError::NotAGenerator { row, .. } => assert_eq!(row, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ignores_extension_fields() {
        let text = r#"{
            "states": [
                {"label": "a", "lambda": 1.0},
                {"label": "b", "lambda": 2.0}
            ],
            "Q": [[-1.0, 1.0], [1.0, -1.0]],
            "service": {"type": "exponential", "mu": 2.0}
        }"#;
        assert!(load_chain_str(text, NumericPolicy::default()).is_ok());
    }
}

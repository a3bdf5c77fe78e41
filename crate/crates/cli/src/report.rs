use std::io::Write;
use std::path::PathBuf;

use ctmc_core::NumericPolicy;
use order_lab::OrderPolicy;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::exit::CliError;

/// Every report carries the command name, the seed, and the numeric policy
/// actually used; two runs with identical metadata produce identical
/// output bytes.
#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub command: &'static str,
    pub seed: u64,
    pub policy: PolicyBlock,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Serialize, Clone, Copy)]
pub struct PolicyBlock {
    pub numeric: NumericPolicy,
    pub order: OrderPolicy,
}

impl PolicyBlock {
    pub fn compact_json(&self) -> String {
        serde_json::to_string(self).expect("policy serializes")
    }
}

/// Writes to `--out` or stdout, always ending with one newline.
pub fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    let text = if content.ends_with('\n') {
        content.to_string()
    } else {
        format!("{content}\n")
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::parse(format!("stdout: {e}")))
        }
    }
}

pub fn emit_json<T: Serialize>(out: &Option<PathBuf>, report: &Report<T>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::parse(format!("serialization: {e}")))?;
    emit(out, &text)
}

/// Short content hash identifying the spec a report was computed from.
pub fn spec_hash(canonical: &str, extra: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    hasher.update(extra.as_bytes());
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// JSON-safe rendering of possibly infinite values (`inf` has no JSON
/// number form).
pub fn number_or_inf(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!("inf")
    }
}

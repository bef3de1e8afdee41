//! Result envelopes: JSON documents echoing every parameter so a run can
//! be reproduced from its own output.

use std::path::Path;

use serde_json::Value;

use crate::io::write_atomic;
use crate::CliError;

/// Library version stamped into every envelope.
pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Write the envelope to a file, or pretty-print to stdout when no path
/// was given.
pub fn emit(path: Option<&Path>, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(format!("envelope serialization: {e}")))?;
    text.push('\n');
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

//! Tolerant JSON extraction from model completions.

use super::GatewayError;

/// Finds the first balanced top-level JSON object in `text` (code fences and
/// surrounding prose are fine) and parses it.
pub fn extract_json(text: &str) -> Result<serde_json::Value, GatewayError> {
    let start = text.find('{').ok_or(GatewayError::NoJsonFound)?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, ch) in text[start..].char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match ch {
            '\\' if in_string => escaped = true,
            '"' => in_string = !in_string,
            '{' if !in_string => depth += 1,
            '}' if !in_string => {
                depth -= 1;
                if depth == 0 {
                    let candidate = &text[start..start + i + 1];
                    return serde_json::from_str(candidate)
                        .map_err(|e| GatewayError::JsonParse(e.to_string()));
                }
            }
            _ => {}
        }
    }
    Err(GatewayError::JsonParse("unbalanced object".into()))
}

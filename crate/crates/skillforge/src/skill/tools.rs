//! Verified tool schemas stored in `references/tools.json`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolParam {
    pub name: String,
    #[serde(rename = "type")]
    pub param_type: String,
    #[serde(default)]
    pub required: bool,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolSchema {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub parameters: Vec<ToolParam>,
    #[serde(default)]
    pub returns: String,
    /// Case-type tags where this tool is commonly used.
    #[serde(default)]
    pub usage_scenarios: Vec<String>,
}

impl ToolSchema {
    pub fn new(name: &str, description: &str) -> Self {
        ToolSchema {
            name: name.to_string(),
            description: description.to_string(),
            parameters: Vec::new(),
            returns: String::new(),
            usage_scenarios: Vec::new(),
        }
    }
}

/// Parses a tools.json document (a JSON array of schemas).
pub fn parse_tools_json(text: &str) -> Result<Vec<ToolSchema>, serde_json::Error> {
    serde_json::from_str(text)
}

/// Canonical serialization used when writing packages.
pub fn render_tools_json(tools: &[ToolSchema]) -> String {
    let mut out = serde_json::to_string_pretty(tools).expect("tool schemas serialize");
    out.push('\n');
    out
}

//! Prompt templates sent to the description models.

use groundsynth_core::snapshot::Attributes;

pub const DESCRIBE_TEMPLATE: &str = include_str!("../../prompts/describe.txt");
pub const CONDENSE_TEMPLATE: &str = include_str!("../../prompts/condense.txt");
pub const DIRECT_FREE_PROMPT: &str = include_str!("../../prompts/direct_free.txt");
pub const DIRECT_FUNCTIONAL_PROMPT: &str = include_str!("../../prompts/direct_functional.txt");

const HTML_SLOT: &str = "{html}";
const DESCRIPTION_SLOT: &str = "{description}";

/// Salient attributes as compact JSON with sorted keys; empty values dropped.
pub fn attributes_json(attrs: &Attributes) -> String {
    let mut map = serde_json::Map::new();
    for (attr, value) in attrs.present() {
        map.insert(attr.key().into(), value.into());
    }
    serde_json::Value::Object(map).to_string()
}

pub fn describe_prompt(attrs: &Attributes) -> String {
    DESCRIBE_TEMPLATE.replacen(HTML_SLOT, &attributes_json(attrs), 1)
}

pub fn condense_prompt(description: &str) -> String {
    CONDENSE_TEMPLATE.replacen(DESCRIPTION_SLOT, description, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectStyle {
    Free,
    Functional,
}

impl DirectStyle {
    pub fn prompt(self) -> &'static str {
        match self {
            DirectStyle::Free => DIRECT_FREE_PROMPT,
            DirectStyle::Functional => DIRECT_FUNCTIONAL_PROMPT,
        }
    }

    /// Reply key holding the expression.
    pub fn reply_key(self) -> &'static str {
        match self {
            DirectStyle::Free => "description",
            DirectStyle::Functional => "action",
        }
    }
}

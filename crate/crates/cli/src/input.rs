use std::path::Path;

use fourbody::FourBodySystem;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// On-disk system description. Masses are decimal strings in the charge
/// order `(+, -, +, -)`, so no digits are lost to a JSON number parser.
///
/// ```json
/// { "masses": ["1836.152672", "1836.152672", "1", "1"],
///   "labels": ["p", "pbar", "e+", "e-"],
///   "unit": "electron mass" }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub masses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl SystemFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("system file {}: {e}", path.display())))
    }

    pub fn system(&self) -> Result<FourBodySystem, CliError> {
        let system = FourBodySystem::from_decimal(&self.masses)?;
        match &self.labels {
            None => Ok(system),
            Some(labels) => {
                let labels: [String; 4] = labels.clone().try_into().map_err(|l: Vec<String>| {
                    CliError::Input(format!("expected 4 labels, got {}", l.len()))
                })?;
                Ok(system.with_labels(labels))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<FourBodySystem, CliError> {
        serde_json::from_str::<SystemFile>(text)
            .map_err(|e| CliError::Input(e.to_string()))?
            .system()
    }

    #[test]
    fn keeps_all_digits() {
        let s = parse(r#"{"masses": ["1836.15267343", "0.999999999987", "1", "2.5"]}"#).unwrap();
        assert_eq!(s.masses(), [1836.15267343, 0.999999999987, 1.0, 2.5]);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse(r#"{"masses": ["1", "1", "1"]}"#).is_err());
        assert!(parse(r#"{"masses": ["1", "1", "1", "-1"]}"#).is_err());
        assert!(parse(r#"{"masses": ["1", "1", "1", "x"]}"#).is_err());
        assert!(parse(r#"{"masses": ["1", "1", "1", "1"], "labels": ["a"]}"#).is_err());
        assert!(parse(r#"{"masses": ["1", "1", "1", "1"], "charge": 2}"#).is_err());
    }
}

//! Flat key-value configuration files.
//!
//! One `key = value` pair per line, `#` starts a comment, blank lines are
//! ignored. Values are unit-suffixed quantities or bare numbers; keys are
//! lower_snake_case identifiers. The same text format is what scenario
//! reports echo back, so a report's input block can be fed straight into
//! `--config`.

use crate::units::Quantity;
use std::fmt::Write as _;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: invalid key {key:?} (lower_snake_case identifiers only)")]
    BadKey { line: usize, key: String },
    #[error("line {line}, key {key:?}: {source}")]
    BadValue {
        line: usize,
        key: String,
        source: crate::units::ParseQuantityError,
    },
    #[error("duplicate key {key:?} on line {line}")]
    Duplicate { line: usize, key: String },
    #[error("unknown key {key:?}; valid keys: {valid}")]
    UnknownKey { key: String, valid: String },
}

/// Ordered key-value pairs; order is preserved for deterministic echoes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: Vec<(String, Quantity)>,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && key.chars().next().unwrap().is_ascii_lowercase()
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(String, Quantity)> = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: content.into(),
                });
            };
            let key = key.trim();
            if !valid_key(key) {
                return Err(ConfigError::BadKey {
                    line,
                    key: key.into(),
                });
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.into(),
                });
            }
            let quantity: Quantity =
                value
                    .trim()
                    .parse()
                    .map_err(|source| ConfigError::BadValue {
                        line,
                        key: key.into(),
                        source,
                    })?;
            entries.push((key.to_string(), quantity));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<Quantity> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, q)| *q)
    }

    /// Insert or replace, preserving first-seen order.
    pub fn set(&mut self, key: &str, value: Quantity) {
        if let Some(slot) = self.entries.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        } else {
            self.entries.push((key.to_string(), value));
        }
    }

    pub fn entries(&self) -> &[(String, Quantity)] {
        &self.entries
    }

    /// Canonical config-format text; `parse(emit(c)) == c` byte-for-byte
    /// after one canonicalization.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (k, q) in &self.entries {
            writeln!(out, "{k} = {q}").expect("string write");
        }
        out
    }

    /// Apply `key=value` override strings (CLI `--set`); the flags win over
    /// anything already present.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), ConfigError> {
        for (i, text) in overrides.iter().enumerate() {
            let Some((key, value)) = text.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    text: text.clone(),
                });
            };
            let key = key.trim();
            if !valid_key(key) {
                return Err(ConfigError::BadKey {
                    line: i + 1,
                    key: key.into(),
                });
            }
            let quantity: Quantity =
                value
                    .trim()
                    .parse()
                    .map_err(|source| ConfigError::BadValue {
                        line: i + 1,
                        key: key.into(),
                        source,
                    })?;
            self.set(key, quantity);
        }
        Ok(())
    }

    /// Reject keys outside the allowed set (scenario parameter validation).
    pub fn restrict_keys(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for (k, _) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey {
                    key: k.clone(),
                    valid: allowed.join(", "),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::Unit;

    #[test]
    fn parses_comments_and_blanks() {
        let text =
            "\n# scenario parameters\nd = 1cm  # source distance\n\nt = 1cm\nsigma = 5.9e7\n";
        let cfg = Config::parse(text).unwrap();
        assert_eq!(cfg.entries().len(), 3);
        assert_eq!(cfg.get("d").unwrap().unit, Unit::CentiMeter);
        assert_eq!(cfg.get("sigma").unwrap().value, 5.9e7);
    }

    #[test]
    fn error_carries_line_and_key() {
        let err = Config::parse("d = 1cm\nt 2cm\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Syntax {
                line: 2,
                text: "t 2cm".into()
            }
        );
        let err = Config::parse("d = 1parsec\n").unwrap_err();
        match err {
            ConfigError::BadValue {
                line: 1, ref key, ..
            } => assert_eq!(key, "d"),
            other => panic!("unexpected {other:?}"),
        }
        let err = Config::parse("d = 1cm\nd = 2cm\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Duplicate {
                line: 2,
                key: "d".into()
            }
        );
        assert!(Config::parse("BadKey = 3\n").is_err());
    }

    #[test]
    fn emit_is_canonical_fixed_point() {
        let cfg = Config::parse("d = 1cm\nf = 100Hz\nx = 2.5\n").unwrap();
        let text = cfg.emit();
        let again = Config::parse(&text).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.emit(), text);
    }

    #[test]
    fn overrides_win() {
        let mut cfg = Config::parse("d = 1cm\nt = 1cm\n").unwrap();
        cfg.apply_overrides(&["d=2cm".to_string(), "extra=5".to_string()])
            .unwrap();
        assert_eq!(cfg.get("d").unwrap().to_string(), "2cm");
        assert_eq!(cfg.get("t").unwrap().to_string(), "1cm");
        assert_eq!(cfg.get("extra").unwrap().value, 5.0);
    }
}

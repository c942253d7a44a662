//! Hand-written per-package patterns for versions the generic tiers miss.
//!
//! File format, one rule per line, tab-separated:
//!
//! ```text
//! # comment
//! <package name regex> TAB <version regex> TAB <priority>
//! ```
//!
//! Both regexes must match the whole string. The version regex needs a
//! `major` group and may have `minor`, `patch` and `epoch` groups; absent
//! groups extract as 0. Lower priority numbers are tried first, ties in file
//! order.

use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};

use super::VersionFields;

const BUNDLED: &str = include_str!("../../data/manual_rules.tsv");

#[derive(Debug, Clone)]
pub struct ManualRule {
    name_pattern: Regex,
    version_pattern: Regex,
    priority: i64,
    line: usize,
}

impl ManualRule {
    pub fn new(name_pattern: &str, version_pattern: &str, priority: i64) -> Result<Self> {
        Self::build(name_pattern, version_pattern, priority, 0)
    }

    fn build(name: &str, version: &str, priority: i64, line: usize) -> Result<Self> {
        let compile = |p: &str| {
            Regex::new(&format!("^(?:{p})$")).map_err(|e| Error::Rule {
                line,
                message: e.to_string(),
            })
        };
        let name_pattern = compile(name)?;
        let version_pattern = compile(version)?;
        if !version_pattern.capture_names().any(|n| n == Some("major")) {
            return Err(Error::Rule {
                line,
                message: format!("version pattern {version:?} has no `major` group"),
            });
        }
        Ok(Self {
            name_pattern,
            version_pattern,
            priority,
            line,
        })
    }

    pub fn priority(&self) -> i64 {
        self.priority
    }

    /// Line of the rule file this came from (0 for rules built in code).
    pub fn line(&self) -> usize {
        self.line
    }

    pub fn apply(&self, package: &str, raw: &str) -> Option<VersionFields> {
        if !self.name_pattern.is_match(package) {
            return None;
        }
        let caps = self.version_pattern.captures(raw)?;
        let field = |name: &str| -> Option<u64> {
            match caps.name(name) {
                Some(m) => m.as_str().parse().ok(),
                None => Some(0),
            }
        };
        let major = caps.name("major")?.as_str().parse().ok()?;
        Some(VersionFields {
            epoch: field("epoch")?,
            major,
            minor: field("minor")?,
            patch: field("patch")?,
        })
    }
}

/// Manual rules in the order they are tried.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    rules: Vec<ManualRule>,
}

impl RuleSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The rule file shipped with the crate.
    pub fn bundled() -> Self {
        static RULES: LazyLock<RuleSet> =
            LazyLock::new(|| RuleSet::parse(BUNDLED).expect("bundled manual rules are valid"));
        RULES.clone()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [name, version, priority] = fields[..] else {
                return Err(Error::Rule {
                    line: lineno,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            };
            let priority = priority.trim().parse().map_err(|_| Error::Rule {
                line: lineno,
                message: format!("priority {priority:?} is not an integer"),
            })?;
            rules.push(ManualRule::build(name, version, priority, lineno)?);
        }
        Ok(Self::from_rules(rules))
    }

    pub fn from_rules(mut rules: Vec<ManualRule>) -> Self {
        rules.sort_by_key(|r| r.priority);
        Self { rules }
    }

    pub fn rules(&self) -> &[ManualRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Fields from the first rule that matches both name and version.
    pub fn apply(&self, package: &str, raw: &str) -> Option<(VersionFields, &ManualRule)> {
        self.rules
            .iter()
            .find_map(|r| r.apply(package, raw).map(|f| (f, r)))
    }
}

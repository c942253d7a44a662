//! `Depends`-style relationship fields.
//!
//! Comma-separated clauses, `|`-separated alternatives, an optional
//! parenthesised version constraint, then any number of `[arch]` and
//! `<profile>` qualifiers, which are dropped. Constraints are kept verbatim
//! and never evaluated.

use std::fmt;

use crate::error::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionConstraint {
    /// One of `<<`, `<=`, `=`, `>=`, `>>`, or the obsolete `<` / `>`.
    pub relation: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alternative {
    pub name: String,
    pub constraint: Option<VersionConstraint>,
}

/// Satisfied by any one of its alternatives. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyClause {
    alternatives: Vec<Alternative>,
}

impl DependencyClause {
    pub fn new(alternatives: Vec<Alternative>) -> Option<Self> {
        (!alternatives.is_empty()).then_some(Self { alternatives })
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.alternatives
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.alternatives.iter().map(|a| a.name.as_str())
    }
}

impl fmt::Display for DependencyClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, alt) in self.alternatives.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            f.write_str(&alt.name)?;
            if let Some(c) = &alt.constraint {
                write!(f, " ({} {})", c.relation, c.version)?;
            }
        }
        Ok(())
    }
}

/// Debian package names: lowercase alphanumerics plus `+ - .`, at least two
/// characters, starting with an alphanumeric.
pub fn is_valid_package_name(name: &str) -> bool {
    let bytes = name.as_bytes();
    bytes.len() >= 2
        && (bytes[0].is_ascii_lowercase() || bytes[0].is_ascii_digit())
        && bytes
            .iter()
            .all(|&b| b.is_ascii_lowercase() || b.is_ascii_digit() || b"+-.".contains(&b))
}

pub fn parse_depends(field_value: &str) -> (Vec<DependencyClause>, Vec<Diagnostic>) {
    let mut clauses = Vec::new();
    let mut diagnostics = Vec::new();
    if field_value.trim().is_empty() {
        return (clauses, diagnostics);
    }
    for clause_text in field_value.split(',') {
        if clause_text.trim().is_empty() {
            diagnostics.push(Diagnostic::new(None, "empty dependency clause"));
            continue;
        }
        let mut alternatives = Vec::new();
        for alt_text in clause_text.split('|') {
            match parse_alternative(alt_text.trim()) {
                Ok(alt) => alternatives.push(alt),
                Err(token) => diagnostics.push(Diagnostic::new(
                    None,
                    format!("unparseable dependency token {token:?}"),
                )),
            }
        }
        if let Some(clause) = DependencyClause::new(alternatives) {
            clauses.push(clause);
        }
    }
    (clauses, diagnostics)
}

/// Names listed in a `Provides` field; versioned provides lose their version.
pub fn parse_provides(field_value: &str) -> (Vec<String>, Vec<Diagnostic>) {
    let (clauses, diagnostics) = parse_depends(field_value);
    let names = clauses
        .iter()
        .flat_map(|c| c.names().map(str::to_string))
        .collect();
    (names, diagnostics)
}

fn parse_alternative(text: &str) -> Result<Alternative, String> {
    let bad = || text.to_string();
    let name_end = text
        .find(|c: char| c.is_whitespace() || "([<".contains(c))
        .unwrap_or(text.len());
    let (name, mut rest) = text.split_at(name_end);
    // `foo:any`, `foo:amd64`
    let name = name.split_once(':').map_or(name, |(n, _)| n);
    if !is_valid_package_name(name) {
        return Err(bad());
    }

    rest = rest.trim_start();
    let mut constraint = None;
    if let Some(inner) = rest.strip_prefix('(') {
        let close = inner.find(')').ok_or_else(bad)?;
        let spec = inner[..close].trim();
        let rel_len = spec
            .find(|c: char| !"<>=".contains(c))
            .unwrap_or(spec.len());
        let (relation, version) = spec.split_at(rel_len);
        let version = version.trim();
        if !matches!(relation, "<<" | "<=" | "=" | ">=" | ">>" | "<" | ">") || version.is_empty()
        {
            return Err(bad());
        }
        constraint = Some(VersionConstraint {
            relation: relation.to_string(),
            version: version.to_string(),
        });
        rest = inner[close + 1..].trim_start();
    }

    while let Some(open) = rest.chars().next() {
        let close = match open {
            '[' => ']',
            '<' => '>',
            _ => return Err(bad()),
        };
        let end = rest.find(close).ok_or_else(bad)?;
        rest = rest[end + 1..].trim_start();
    }

    Ok(Alternative {
        name: name.to_string(),
        constraint,
    })
}

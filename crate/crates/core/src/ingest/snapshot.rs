use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Diagnostic, Error, Result};
use crate::version::DebVersion;

use super::depends::{is_valid_package_name, parse_depends, parse_provides, DependencyClause};
use super::stanza::{parse_paragraphs, Stanza};

/// Decides which packages are meta-packages: named in `names`, or filed under
/// `Section: metapackages` when `by_section` is set.
#[derive(Debug, Clone)]
pub struct MetaPolicy {
    pub names: BTreeSet<String>,
    pub by_section: bool,
}

impl Default for MetaPolicy {
    fn default() -> Self {
        Self {
            names: ["ubuntu-minimal", "ubuntu-standard"]
                .into_iter()
                .map(str::to_string)
                .collect(),
            by_section: true,
        }
    }
}

impl MetaPolicy {
    pub fn is_meta(&self, name: &str, section: Option<&str>) -> bool {
        self.names.contains(name)
            || (self.by_section
                && section.is_some_and(|s| s.rsplit('/').next() == Some("metapackages")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackageRecord {
    pub name: String,
    pub raw_version: String,
    pub depends: Vec<DependencyClause>,
    pub pre_depends: Vec<DependencyClause>,
    pub provides: Vec<String>,
    pub source: Option<String>,
    pub homepage: Option<String>,
    pub section: Option<String>,
    pub is_meta: bool,
}

impl PackageRecord {
    /// Every name mentioned in `Depends` and `Pre-Depends`, all alternatives included.
    pub fn dependency_names(&self) -> impl Iterator<Item = &str> {
        self.pre_depends
            .iter()
            .chain(&self.depends)
            .flat_map(DependencyClause::names)
    }

    fn from_stanza(
        stanza: &Stanza,
        meta: &MetaPolicy,
        diagnostics: &mut Vec<Diagnostic>,
    ) -> Option<Self> {
        let at = Some(stanza.line);
        let Some(name) = stanza.get("Package") else {
            diagnostics.push(Diagnostic::new(at, "stanza without a Package field skipped"));
            return None;
        };
        if !is_valid_package_name(name) {
            diagnostics.push(Diagnostic::new(at, format!("invalid package name {name:?}")));
            return None;
        }
        let raw_version = match stanza.get("Version") {
            Some(v) if !v.is_empty() => v,
            _ => {
                diagnostics.push(Diagnostic::new(
                    at,
                    format!("package {name} has no Version field; skipped"),
                ));
                return None;
            }
        };

        let mut relation = |field: &str| -> Vec<DependencyClause> {
            let (clauses, diags) = parse_depends(stanza.get(field).unwrap_or(""));
            diagnostics.extend(
                diags
                    .into_iter()
                    .map(|d| Diagnostic::new(at, format!("{name} {field}: {}", d.message))),
            );
            clauses
        };
        let depends = relation("Depends");
        let pre_depends = relation("Pre-Depends");
        let (provides, diags) = parse_provides(stanza.get("Provides").unwrap_or(""));
        diagnostics.extend(
            diags
                .into_iter()
                .map(|d| Diagnostic::new(at, format!("{name} Provides: {}", d.message))),
        );

        // `Source: lvm2 (2.02.98-6ubuntu2)` names the source and its version.
        let source = stanza
            .get("Source")
            .and_then(|s| s.split_whitespace().next())
            .map(str::to_string);
        let homepage = stanza
            .get("Homepage")
            .filter(|h| !h.is_empty())
            .map(str::to_string);
        let section = stanza.get("Section").map(str::to_string);
        let is_meta = meta.is_meta(name, section.as_deref());

        Some(Self {
            name: name.to_string(),
            raw_version: raw_version.to_string(),
            depends,
            pre_depends,
            provides,
            source,
            homepage,
            section,
            is_meta,
        })
    }
}

/// Records parsed from one index, plus everything that went wrong on the way.
#[derive(Debug, Clone, Default)]
pub struct ParsedIndex {
    pub records: Vec<PackageRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn parse_stanzas(index_text: &str) -> ParsedIndex {
    parse_stanzas_with(index_text, &MetaPolicy::default())
}

pub fn parse_stanzas_with(index_text: &str, meta: &MetaPolicy) -> ParsedIndex {
    let (stanzas, mut diagnostics) = parse_paragraphs(index_text);
    let records = stanzas
        .iter()
        .filter_map(|s| PackageRecord::from_stanza(s, meta, &mut diagnostics))
        .collect();
    ParsedIndex {
        records,
        diagnostics,
    }
}

/// The package universe of one release, immutable once built.
#[derive(Debug, Clone, Default)]
pub struct ReleaseSnapshot {
    release_id: String,
    records: BTreeMap<String, PackageRecord>,
    virtual_names: BTreeSet<String>,
    providers: BTreeMap<String, BTreeSet<String>>,
    unresolved: BTreeSet<String>,
}

impl ReleaseSnapshot {
    pub fn release_id(&self) -> &str {
        &self.release_id
    }

    pub fn records(&self) -> &BTreeMap<String, PackageRecord> {
        &self.records
    }

    pub fn get(&self, name: &str) -> Option<&PackageRecord> {
        self.records.get(name)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Names that exist only as `Provides` targets.
    pub fn virtual_names(&self) -> &BTreeSet<String> {
        &self.virtual_names
    }

    /// Names depended upon that neither have a stanza nor a provider, e.g.
    /// packages from another archive component.
    pub fn unresolved_names(&self) -> &BTreeSet<String> {
        &self.unresolved
    }

    pub fn providers_of(&self, name: &str) -> impl Iterator<Item = &str> {
        self.providers
            .get(name)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    /// Tab-separated `name, raw_version, source, homepage`, one line per package.
    pub fn dump_tsv(&self) -> String {
        let mut out = String::new();
        for r in self.records.values() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                r.name,
                r.raw_version,
                r.source.as_deref().unwrap_or(""),
                r.homepage.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

pub fn build_snapshot(
    records: Vec<PackageRecord>,
    release_id: &str,
) -> (ReleaseSnapshot, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    let mut by_name: BTreeMap<String, PackageRecord> = BTreeMap::new();

    for record in records {
        match by_name.get(&record.name) {
            None => {
                by_name.insert(record.name.clone(), record);
            }
            Some(existing) => {
                let keep_new = newer_than(&record.raw_version, &existing.raw_version);
                let (kept, dropped) = if keep_new {
                    (&record.raw_version, &existing.raw_version)
                } else {
                    (&existing.raw_version, &record.raw_version)
                };
                diagnostics.push(Diagnostic::new(
                    None,
                    format!(
                        "duplicate stanza for {}: keeping {kept}, dropping {dropped}",
                        record.name
                    ),
                ));
                if keep_new {
                    by_name.insert(record.name.clone(), record);
                }
            }
        }
    }

    let mut providers: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in by_name.values() {
        for p in &r.provides {
            providers.entry(p.clone()).or_default().insert(r.name.clone());
        }
    }
    let virtual_names: BTreeSet<String> = providers
        .keys()
        .filter(|n| !by_name.contains_key(*n))
        .cloned()
        .collect();
    let unresolved = by_name
        .values()
        .flat_map(PackageRecord::dependency_names)
        .filter(|n| !by_name.contains_key(*n) && !providers.contains_key(*n))
        .map(str::to_string)
        .collect();

    let snapshot = ReleaseSnapshot {
        release_id: release_id.to_string(),
        records: by_name,
        virtual_names,
        providers,
        unresolved,
    };
    (snapshot, diagnostics)
}

fn newer_than(candidate: &str, existing: &str) -> bool {
    match (DebVersion::parse(candidate), DebVersion::parse(existing)) {
        (Ok(a), Ok(b)) => a > b,
        _ => candidate > existing,
    }
}

/// Transitive closure of `Depends` and `Pre-Depends` from `seed`.
///
/// Every alternative of every clause is followed. A virtual name expands to
/// all of its providers and is itself left out of the result, as is the seed.
pub fn dependency_closure(snapshot: &ReleaseSnapshot, seed: &str) -> Result<BTreeSet<String>> {
    if !snapshot.records.contains_key(seed) && !snapshot.virtual_names.contains(seed) {
        return Err(Error::UnknownPackage(seed.to_string()));
    }

    let mut visited: BTreeSet<&str> = BTreeSet::new();
    let mut stack = vec![seed];
    while let Some(name) = stack.pop() {
        if !visited.insert(name) {
            continue;
        }
        if let Some(record) = snapshot.records.get(name) {
            stack.extend(record.dependency_names().filter(|n| !visited.contains(n)));
        } else {
            stack.extend(snapshot.providers_of(name).filter(|n| !visited.contains(n)));
        }
    }

    Ok(visited
        .into_iter()
        .filter(|n| *n != seed && snapshot.records.contains_key(*n))
        .map(str::to_string)
        .collect())
}

/// Packages with a stanza in both snapshots, meta-packages excluded.
pub fn common_real_packages(a: &ReleaseSnapshot, b: &ReleaseSnapshot) -> BTreeSet<String> {
    a.records
        .iter()
        .filter_map(|(name, ra)| {
            let rb = b.records.get(name)?;
            (!ra.is_meta && !rb.is_meta).then(|| name.clone())
        })
        .collect()
}

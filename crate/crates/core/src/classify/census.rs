use std::collections::{BTreeMap, HashMap};

use crate::ingest::ReleaseSnapshot;

use super::{basic_signature, classify, RuleSet, SemVersion, VersionClass};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    /// Every class, most frequent first, ties in tier order.
    pub class_counts: Vec<(VersionClass, usize)>,
    /// Signature histogram, most frequent first, ties by signature.
    pub signatures: Vec<(String, usize)>,
    /// All packages with a stanza.
    pub total: usize,
    /// The same, meta-packages excluded.
    pub non_meta_total: usize,
    /// Packages whose numeric fields look like a calendar date.
    pub date_like: Vec<String>,
}

impl Census {
    pub fn count(&self, class: VersionClass) -> usize {
        self.class_counts
            .iter()
            .find(|(c, _)| *c == class)
            .map_or(0, |(_, n)| *n)
    }
}

pub fn classify_snapshot(snapshot: &ReleaseSnapshot, rules: &RuleSet) -> BTreeMap<String, SemVersion> {
    snapshot
        .records()
        .values()
        .map(|r| (r.name.clone(), classify(&r.name, &r.raw_version, rules)))
        .collect()
}

pub fn census(snapshot: &ReleaseSnapshot, rules: &RuleSet) -> Census {
    let classified = classify_snapshot(snapshot, rules);

    let mut by_class: HashMap<VersionClass, usize> = HashMap::new();
    let mut by_signature: HashMap<String, usize> = HashMap::new();
    let mut date_like = Vec::new();
    for (name, version) in &classified {
        *by_class.entry(version.class()).or_default() += 1;
        *by_signature.entry(basic_signature(version.raw())).or_default() += 1;
        if version.looks_date_like() {
            date_like.push(name.clone());
        }
    }

    let mut class_counts: Vec<_> = VersionClass::ALL
        .into_iter()
        .map(|c| (c, by_class.get(&c).copied().unwrap_or(0)))
        .collect();
    class_counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut signatures: Vec<_> = by_signature.into_iter().collect();
    signatures.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    Census {
        class_counts,
        signatures,
        total: snapshot.len(),
        non_meta_total: snapshot.records().values().filter(|r| !r.is_meta).count(),
        date_like,
    }
}

//! Package Version Activity Classifier (PVAC).
//!
//! Compares the extracted version fields of one package in two releases and
//! labels how much upstream movement happened in between. Debian revisions
//! play no part; only epoch, major, minor and patch are looked at.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::classify::SemVersion;
use crate::error::{Diagnostic, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExclusionReason {
    EpochMismatch,
    UnknownClass,
    MissingInRelease,
}

impl ExclusionReason {
    pub const ALL: [ExclusionReason; 3] = [
        ExclusionReason::EpochMismatch,
        ExclusionReason::UnknownClass,
        ExclusionReason::MissingInRelease,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::EpochMismatch => "epoch-mismatch",
            ExclusionReason::UnknownClass => "unknown-class",
            ExclusionReason::MissingInRelease => "missing-in-release",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActivityLevel {
    MajorChange,
    ModeratelyActive,
    LightlyActive,
    Sedentary,
    Excluded(ExclusionReason),
}

impl ActivityLevel {
    /// Every label an evaluable package can get, in report order.
    pub const EVALUABLE: [ActivityLevel; 5] = [
        ActivityLevel::MajorChange,
        ActivityLevel::ModeratelyActive,
        ActivityLevel::LightlyActive,
        ActivityLevel::Sedentary,
        ActivityLevel::Excluded(ExclusionReason::EpochMismatch),
    ];

    pub fn label(self) -> String {
        match self {
            ActivityLevel::MajorChange => "MajorChange".into(),
            ActivityLevel::ModeratelyActive => "ModeratelyActive".into(),
            ActivityLevel::LightlyActive => "LightlyActive".into(),
            ActivityLevel::Sedentary => "Sedentary".into(),
            ActivityLevel::Excluded(r) => format!("Excluded({})", r.as_str()),
        }
    }
}

impl fmt::Display for ActivityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ActivityLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = ActivityLevel::EVALUABLE.into_iter().chain(
            ExclusionReason::ALL
                .into_iter()
                .map(ActivityLevel::Excluded),
        );
        all.into_iter()
            .find(|l| l.label() == s)
            .ok_or_else(|| format!("unknown activity level {s:?}"))
    }
}

impl Serialize for ActivityLevel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Labels the change between two classified versions of the same package.
///
/// Neither side may be `Unknown`; callers filter those out first.
pub fn pvac(a: &SemVersion, b: &SemVersion) -> Result<ActivityLevel> {
    let (Some(fa), Some(fb)) = (a.fields(), b.fields()) else {
        return Err(Error::Contract(format!(
            "pvac called with an Unknown-class version ({:?} vs {:?})",
            a.raw(),
            b.raw()
        )));
    };
    Ok(if fa.epoch != fb.epoch {
        ActivityLevel::Excluded(ExclusionReason::EpochMismatch)
    } else if fa.major != fb.major {
        ActivityLevel::MajorChange
    } else if fa.minor != fb.minor {
        ActivityLevel::ModeratelyActive
    } else if fa.patch != fb.patch {
        ActivityLevel::LightlyActive
    } else {
        ActivityLevel::Sedentary
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackageActivity {
    pub version_a: Option<String>,
    pub version_b: Option<String>,
    pub level: ActivityLevel,
}

#[derive(Debug, Clone)]
pub struct ActivityReport {
    pub release_pair: (String, String),
    pub per_package: BTreeMap<String, PackageActivity>,
    /// Labels over the evaluable set only (epoch mismatches included).
    pub counts: BTreeMap<ActivityLevel, usize>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ActivityReport {
    /// Packages where both releases supply usable version fields.
    pub fn evaluable(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, level: ActivityLevel) -> usize {
        self.counts.get(&level).copied().unwrap_or(0)
    }

    pub fn excluded(&self) -> BTreeMap<ExclusionReason, usize> {
        let mut out: BTreeMap<_, _> = ExclusionReason::ALL.into_iter().map(|r| (r, 0)).collect();
        for p in self.per_package.values() {
            if let ActivityLevel::Excluded(r) = p.level {
                *out.entry(r).or_default() += 1;
            }
        }
        out
    }

    /// Counts rebuilt from `per_package`; always equal to `counts`.
    pub fn recount(&self) -> BTreeMap<ActivityLevel, usize> {
        tally(self.per_package.values().map(|p| p.level))
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let counts: serde_json::Map<_, _> = ActivityLevel::EVALUABLE
            .into_iter()
            .map(|l| (l.label(), self.count(l).into()))
            .collect();
        let excluded: serde_json::Map<_, _> = self
            .excluded()
            .into_iter()
            .map(|(r, n)| (r.as_str().to_string(), n.into()))
            .collect();
        serde_json::json!({
            "release_a": self.release_pair.0,
            "release_b": self.release_pair.1,
            "packages": self.per_package.len(),
            "evaluable": self.evaluable(),
            "counts": counts,
            "excluded": excluded,
        })
    }
}

fn tally(levels: impl Iterator<Item = ActivityLevel>) -> BTreeMap<ActivityLevel, usize> {
    let mut counts: BTreeMap<_, _> = ActivityLevel::EVALUABLE.into_iter().map(|l| (l, 0)).collect();
    for level in levels {
        if let Some(n) = counts.get_mut(&level) {
            *n += 1;
        }
    }
    counts
}

pub fn activity_report(
    release_pair: (&str, &str),
    common: &BTreeSet<String>,
    versions_a: &BTreeMap<String, SemVersion>,
    versions_b: &BTreeMap<String, SemVersion>,
) -> ActivityReport {
    let mut diagnostics = Vec::new();
    let mut per_package = BTreeMap::new();

    for name in common {
        let (a, b) = (versions_a.get(name), versions_b.get(name));
        let level = match (a, b) {
            (Some(a), Some(b)) if a.is_unknown() || b.is_unknown() => {
                ActivityLevel::Excluded(ExclusionReason::UnknownClass)
            }
            (Some(a), Some(b)) => pvac(a, b).expect("both sides known"),
            _ => {
                let missing = if a.is_none() { release_pair.0 } else { release_pair.1 };
                diagnostics.push(Diagnostic::new(
                    None,
                    format!("{name} has no version in release {missing}"),
                ));
                ActivityLevel::Excluded(ExclusionReason::MissingInRelease)
            }
        };
        per_package.insert(
            name.clone(),
            PackageActivity {
                version_a: a.map(|v| v.raw().to_string()),
                version_b: b.map(|v| v.raw().to_string()),
                level,
            },
        );
    }

    let counts = tally(per_package.values().map(|p| p.level));
    ActivityReport {
        release_pair: (release_pair.0.to_string(), release_pair.1.to_string()),
        per_package,
        counts,
        diagnostics,
    }
}

//! Version-scheme classification.
//!
//! Every version string lands in exactly one [`VersionClass`]. The tiers are
//! tried in a fixed order and the first match wins:
//!
//! 1. `Semantic`: the whole string matches the official semver pattern.
//! 2. `ExtSemantic`: `<epoch>:` followed by a semver string.
//! 3. `SemiSemantic`: leading zeros allowed, patch optional, `p`/`pl` as a
//!    minor/patch separator, a trailing upstream suffix starting with `.`,
//!    `+` or `~` (a `.` suffix needs a letter when patch is absent), and any
//!    `-revision`.
//! 4. `DistNative`: a native version with a distribution tag glued straight
//!    onto the upstream part (`1.5.51ubuntu2`), no revision.
//! 5. `ManualMap`: the first manual rule matching name and version.
//! 6. `Unknown`: nothing recognisable as a major version.

mod census;
mod rules;

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

pub use census::{census, classify_snapshot, Census};
pub use rules::{ManualRule, RuleSet};

const SEMVER: &str = r"(?P<major>0|[1-9][0-9]*)\.(?P<minor>0|[1-9][0-9]*)\.(?P<patch>0|[1-9][0-9]*)(?:-(?P<prerelease>(?:0|[1-9][0-9]*|[0-9]*[a-zA-Z-][0-9a-zA-Z-]*)(?:\.(?:0|[1-9][0-9]*|[0-9]*[a-zA-Z-][0-9a-zA-Z-]*))*))?(?:\+(?P<buildmetadata>[0-9a-zA-Z-]+(?:\.[0-9a-zA-Z-]+)*))?";

const RELAXED_CORE: &str =
    r"(?:(?P<epoch>[0-9]+):)?(?P<major>[0-9]+)\.(?P<minor>[0-9]+)(?:(?:\.|pl|p)(?P<patch>[0-9]+))?";

const PATCH_THEN_SUFFIX: &str = r"(?:\.|pl|p)(?P<patch>[0-9]+)(?:[.+~][0-9A-Za-z.+~]*)?";

// Without a patch field a `.` suffix must start with a letter, otherwise
// `1.5.51ubuntu2` would read as 1.5 plus a suffix.
const TWO_FIELD_SUFFIX: &str = r"[+~][0-9A-Za-z.+~]*|\.[A-Za-z][0-9A-Za-z.+~]*";

static SEMANTIC: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!("^{SEMVER}$")).expect("semantic pattern"));

static EXT_SEMANTIC: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!("^(?P<epoch>[0-9]+):{SEMVER}$")).expect("ext-semantic pattern")
});

static SEMI_SEMANTIC: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"^(?:(?P<epoch>[0-9]+):)?(?P<major>[0-9]+)\.(?P<minor>[0-9]+)(?:{PATCH_THEN_SUFFIX}|{TWO_FIELD_SUFFIX})?(?:-[0-9A-Za-z.+~-]+)?$"
    ))
    .expect("semi-semantic pattern")
});

static DIST_NATIVE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"^{RELAXED_CORE}(?:ubuntu|build|debian|nmu)[0-9][0-9A-Za-z.+~]*$"
    ))
    .expect("dist-native pattern")
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VersionClass {
    Semantic,
    ExtSemantic,
    SemiSemantic,
    DistNative,
    ManualMap,
    Unknown,
}

impl VersionClass {
    pub const ALL: [VersionClass; 6] = [
        VersionClass::Semantic,
        VersionClass::ExtSemantic,
        VersionClass::SemiSemantic,
        VersionClass::DistNative,
        VersionClass::ManualMap,
        VersionClass::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VersionClass::Semantic => "Semantic",
            VersionClass::ExtSemantic => "ExtSemantic",
            VersionClass::SemiSemantic => "SemiSemantic",
            VersionClass::DistNative => "DistNative",
            VersionClass::ManualMap => "ManualMap",
            VersionClass::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for VersionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VersionClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VersionClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown version class {s:?}"))
    }
}

/// The numeric fields the freshness and activity analyses work with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VersionFields {
    pub epoch: u64,
    pub major: u64,
    pub minor: u64,
    pub patch: u64,
}

/// A classified version. The numeric fields are only reachable when the
/// class is not `Unknown`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemVersion {
    raw: String,
    class: VersionClass,
    fields: Option<VersionFields>,
}

impl SemVersion {
    pub fn unknown(raw: &str) -> Self {
        Self {
            raw: raw.to_string(),
            class: VersionClass::Unknown,
            fields: None,
        }
    }

    /// A known version with the given fields. `class` must not be `Unknown`.
    pub fn known(raw: &str, class: VersionClass, fields: VersionFields) -> Self {
        assert_ne!(class, VersionClass::Unknown, "known() with Unknown class");
        Self {
            raw: raw.to_string(),
            class,
            fields: Some(fields),
        }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn class(&self) -> VersionClass {
        self.class
    }

    pub fn fields(&self) -> Option<&VersionFields> {
        self.fields.as_ref()
    }

    pub fn is_unknown(&self) -> bool {
        self.fields.is_none()
    }

    /// Heuristic for calendar versions (`YYYY.MM.DD` or `YYYY.DD.MM`) that
    /// made it into a numeric tier; their deltas are not meaningful.
    pub fn looks_date_like(&self) -> bool {
        self.fields.is_some_and(|f| {
            (1990..=2100).contains(&f.major) && (1..=31).contains(&f.minor) && f.patch <= 31
        })
    }
}

fn fields_from(caps: &Captures<'_>) -> Option<VersionFields> {
    let get = |name: &str| -> Option<u64> {
        match caps.name(name) {
            Some(m) => m.as_str().parse().ok(),
            None => Some(0),
        }
    };
    Some(VersionFields {
        epoch: get("epoch")?,
        major: caps.name("major")?.as_str().parse().ok()?,
        minor: get("minor")?,
        patch: get("patch")?,
    })
}

/// Runs the tier cascade on one version of `package`.
pub fn classify(package: &str, raw: &str, rules: &RuleSet) -> SemVersion {
    let tiers: [(&Regex, VersionClass); 4] = [
        (&SEMANTIC, VersionClass::Semantic),
        (&EXT_SEMANTIC, VersionClass::ExtSemantic),
        (&SEMI_SEMANTIC, VersionClass::SemiSemantic),
        (&DIST_NATIVE, VersionClass::DistNative),
    ];
    for (pattern, class) in tiers {
        if let Some(fields) = pattern.captures(raw).and_then(|c| fields_from(&c)) {
            return SemVersion::known(raw, class, fields);
        }
    }
    match rules.apply(package, raw) {
        Some((fields, _)) => SemVersion::known(raw, VersionClass::ManualMap, fields),
        None => SemVersion::unknown(raw),
    }
}

/// Whether `raw` is accepted by the `SemiSemantic` pattern on its own,
/// regardless of which tier `classify` picks.
pub fn matches_semi_semantic(raw: &str) -> bool {
    SEMI_SEMANTIC.is_match(raw)
}

/// Shape of a version string: digit runs become `N`, lowercase letter runs
/// become `A`, everything else is kept.
pub fn basic_signature(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut prev: Option<char> = None;
    for c in raw.chars() {
        let token = if c.is_ascii_digit() {
            'N'
        } else if c.is_ascii_lowercase() {
            'A'
        } else {
            out.push(c);
            prev = None;
            continue;
        };
        if prev != Some(token) {
            out.push(token);
        }
        prev = Some(token);
    }
    out
}

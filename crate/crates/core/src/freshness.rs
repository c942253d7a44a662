//! Libyears: how far packaged versions trail the latest upstream release.
//!
//! Two measures are computed side by side. The version-number delta weights
//! the field differences 0.7 / 0.2 / 0.1 for major / minor / patch. The date
//! measure counts days between the upstream release of the packaged version
//! and the latest upstream release.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::classify::SemVersion;
use crate::error::{Error, Result};

pub const MAJOR_WEIGHT: f64 = 0.7;
pub const MINOR_WEIGHT: f64 = 0.2;
pub const PATCH_WEIGHT: f64 = 0.1;

pub const DATASET_HEADER: [&str; 6] = ["package", "class", "major", "minor", "patch", "upstream_date"];

/// One row of a curated upstream dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpstreamRelease {
    pub package: String,
    /// Class label as curated; informational only.
    pub class: String,
    pub major: u64,
    pub minor: u64,
    pub patch: u64,
    pub release_date: NaiveDate,
}

/// `YYYY-MM-DD` or `M/D/YY` (years 2000-2099).
pub fn parse_dataset_date(text: &str) -> Option<NaiveDate> {
    let text = text.trim();
    if let Ok(d) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
        return Some(d);
    }
    let mut parts = text.split('/');
    let (m, d, y) = (parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() || y.len() != 2 || m.is_empty() || m.len() > 2 || d.is_empty() || d.len() > 2 {
        return None;
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !(all_digits(m) && all_digits(d) && all_digits(y)) {
        return None;
    }
    NaiveDate::from_ymd_opt(2000 + y.parse::<i32>().ok()?, m.parse().ok()?, d.parse().ok()?)
}

pub fn load_upstream_dataset(path: &Path) -> Result<BTreeMap<String, UpstreamRelease>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_upstream_dataset(&text, path, chrono::Local::now().date_naive())
}

/// Parses dataset text; `path` is only used in error messages. Dates after
/// `as_of` are rejected.
pub fn parse_upstream_dataset(
    text: &str,
    path: &Path,
    as_of: NaiveDate,
) -> Result<BTreeMap<String, UpstreamRelease>> {
    let error = |line: Option<u64>, message: String| Error::Dataset {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| error(Some(1), e.to_string()))?
        .clone();
    if header.iter().ne(DATASET_HEADER) {
        return Err(error(
            Some(1),
            format!("expected header {:?}", DATASET_HEADER.join(",")),
        ));
    }

    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| error(e.position().map(|p| p.line()), e.to_string()))?;
        let line = row.position().map(|p| p.line());
        let number = |idx: usize| -> Result<u64> {
            row[idx]
                .parse()
                .map_err(|_| error(line, format!("{} {:?} is not a non-negative integer", DATASET_HEADER[idx], &row[idx])))
        };
        let release_date = parse_dataset_date(&row[5])
            .ok_or_else(|| error(line, format!("unrecognised date {:?}", &row[5])))?;
        if release_date > as_of {
            return Err(error(line, format!("date {release_date} is in the future")));
        }
        let record = UpstreamRelease {
            package: row[0].to_string(),
            class: row[1].to_string(),
            major: number(2)?,
            minor: number(3)?,
            patch: number(4)?,
            release_date,
        };
        if record.package.is_empty() {
            return Err(error(line, "empty package name".into()));
        }
        if out.contains_key(&record.package) {
            return Err(error(line, format!("duplicate package {}", record.package)));
        }
        out.insert(record.package.clone(), record);
    }
    Ok(out)
}

/// Weighted field delta from the packaged version to the upstream one.
/// Each field difference keeps its sign, so the result can be negative even
/// when upstream is ahead (1.46.5 against 1.47.0 gives -0.3).
pub fn version_delta_libyear(packaged: &SemVersion, upstream: &UpstreamRelease) -> Result<f64> {
    let fields = packaged.fields().ok_or_else(|| {
        Error::Contract(format!(
            "libyear delta for {} with Unknown-class version {:?}",
            upstream.package,
            packaged.raw()
        ))
    })?;
    let diff = |up: u64, pk: u64| (i128::from(up) - i128::from(pk)) as f64;
    Ok(MAJOR_WEIGHT * diff(upstream.major, fields.major)
        + MINOR_WEIGHT * diff(upstream.minor, fields.minor)
        + PATCH_WEIGHT * diff(upstream.patch, fields.patch))
}

/// Days from the packaged version's upstream release to the latest one.
pub fn date_delta_days(packaged_date: NaiveDate, upstream_date: NaiveDate) -> i64 {
    (upstream_date - packaged_date).num_days()
}

/// How day deltas are summed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DayConvention {
    #[default]
    Signed,
    Absolute,
}

impl std::str::FromStr for DayConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "signed" => Ok(DayConvention::Signed),
            "absolute" => Ok(DayConvention::Absolute),
            _ => Err(format!("day convention must be signed or absolute, not {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackageFreshness {
    pub package: String,
    pub version_delta: f64,
    /// `None` when no upstream date is known for the packaged version.
    pub day_delta: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreshnessReport {
    pub release_id: String,
    pub day_convention: DayConvention,
    pub libyears_version_delta: f64,
    pub libyears_days: i64,
    pub requested: usize,
    pub evaluated: usize,
    pub per_package: Vec<PackageFreshness>,
    /// Requested packages left out, with the reason.
    pub skipped: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl FreshnessReport {
    pub fn coverage(&self) -> f64 {
        if self.requested == 0 {
            0.0
        } else {
            self.evaluated as f64 / self.requested as f64
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value["coverage"] = self.coverage().into();
        value
    }
}

/// Inputs shared by every package of one freshness run.
#[derive(Debug, Clone, Copy)]
pub struct FreshnessInputs<'a> {
    /// Classified versions shipped by the release.
    pub packaged: &'a BTreeMap<String, SemVersion>,
    /// Latest upstream release per package.
    pub upstream: &'a BTreeMap<String, UpstreamRelease>,
    /// Upstream release of the version the release ships, for day deltas.
    pub packaged_releases: &'a BTreeMap<String, UpstreamRelease>,
    pub day_convention: DayConvention,
}

/// Sums per-package contributions in name order, so totals are bit-stable.
pub fn aggregate_freshness(
    release_id: &str,
    packages: &BTreeSet<String>,
    inputs: FreshnessInputs<'_>,
) -> FreshnessReport {
    let mut report = FreshnessReport {
        release_id: release_id.to_string(),
        day_convention: inputs.day_convention,
        libyears_version_delta: 0.0,
        libyears_days: 0,
        requested: packages.len(),
        evaluated: 0,
        per_package: Vec::new(),
        skipped: BTreeMap::new(),
        warnings: Vec::new(),
    };

    for name in packages {
        let Some(upstream) = inputs.upstream.get(name) else {
            report.skipped.insert(name.clone(), "not in upstream dataset".into());
            continue;
        };
        let Some(packaged) = inputs.packaged.get(name) else {
            report.skipped.insert(name.clone(), "not in release".into());
            continue;
        };
        let Ok(version_delta) = version_delta_libyear(packaged, upstream) else {
            report.skipped.insert(name.clone(), "Unknown version class".into());
            continue;
        };
        let fields = packaged.fields().expect("delta computed, so fields exist");
        if (fields.major, fields.minor, fields.patch) > (upstream.major, upstream.minor, upstream.patch) {
            report.warnings.push(format!(
                "{name}: packaged {} is ahead of upstream {}.{}.{}",
                packaged.raw(),
                upstream.major,
                upstream.minor,
                upstream.patch
            ));
        }
        if packaged.looks_date_like() {
            report.warnings.push(format!(
                "{name}: version {} looks like a date; its delta may be meaningless",
                packaged.raw()
            ));
        }
        let day_delta = inputs
            .packaged_releases
            .get(name)
            .map(|p| date_delta_days(p.release_date, upstream.release_date));
        match day_delta {
            Some(days) => {
                report.libyears_days += match inputs.day_convention {
                    DayConvention::Signed => days,
                    DayConvention::Absolute => days.abs(),
                }
            }
            None => report
                .warnings
                .push(format!("{name}: no upstream date for the packaged version")),
        }
        report.libyears_version_delta += version_delta;
        report.evaluated += 1;
        report.per_package.push(PackageFreshness {
            package: name.clone(),
            version_delta,
            day_delta,
        });
    }

    if report.evaluated == 0 {
        report
            .warnings
            .push("no requested package could be evaluated".into());
    }
    report
}

//! The analysis commands behind the CLI and the files they write.
//!
//! Every writer emits LF line endings and sorts its rows, so two runs over the
//! same inputs produce byte-identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use log::{debug, info, warn};
use serde::Serialize;

use crate::activity::{activity_report, ActivityLevel, ActivityReport, ExclusionReason};
use crate::classify::{census, classify_snapshot, Census, RuleSet, SemVersion};
use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::freshness::{aggregate_freshness, load_upstream_dataset, FreshnessInputs, FreshnessReport};
use crate::ingest::{dependency_closure, load_snapshot, Fetcher, ReleaseSnapshot};
use crate::version::DebVersion;

pub fn load_release(config: &AnalysisConfig, release: &str) -> Result<ReleaseSnapshot> {
    let (id, _) = config.release(release)?;
    let source = config.index_source(id)?;
    info!("loading {id} from {source}");
    let fetcher = Fetcher::new(config.cache_dir.clone(), config.offline);
    let (snapshot, diagnostics) = load_snapshot(&fetcher, &source, id, &config.meta)?;
    if !diagnostics.is_empty() {
        warn!("{id}: {} index diagnostics", diagnostics.len());
        for d in &diagnostics {
            debug!("{id}: {d}");
        }
    }
    info!("{id}: {} packages", snapshot.len());
    Ok(snapshot)
}

pub fn load_rules(config: &AnalysisConfig) -> Result<RuleSet> {
    match &config.rules {
        Some(path) => RuleSet::load(path),
        None => Ok(RuleSet::bundled()),
    }
}

fn required_seed(config: &AnalysisConfig) -> Result<&str> {
    config
        .seed
        .as_deref()
        .ok_or_else(|| Error::Config("no seed package given".into()))
}

fn output_path(config: &AnalysisConfig, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    Ok(config.output_dir.join(name))
}

/// The header is written even when there are no rows.
fn write_csv<R: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()> {
    let io = |e: csv::Error| Error::io(path, e.into());
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io)?;
    writer.write_record(header).map_err(io)?;
    for row in rows {
        writer.serialize(row).map_err(io)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct ClassifiedRow<'a> {
    package: &'a str,
    raw_version: &'a str,
    class: &'static str,
    epoch: Option<u64>,
    major: Option<u64>,
    minor: Option<u64>,
    patch: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct ClassifyOutput {
    pub census: Census,
    pub classified: BTreeMap<String, SemVersion>,
}

/// Version census of one release.
///
/// Writes `census_classes.csv`, `census_signatures.csv`, `classified.csv` and
/// `census_summary.json`.
pub fn run_classify(config: &AnalysisConfig, release: &str) -> Result<ClassifyOutput> {
    let snapshot = load_release(config, release)?;
    let rules = load_rules(config)?;
    let census = census(&snapshot, &rules);
    let classified = classify_snapshot(&snapshot, &rules);
    for name in &census.date_like {
        warn!("{name}: version {} looks like a date", classified[name].raw());
    }

    #[derive(Serialize)]
    struct ClassRow {
        class: &'static str,
        count: usize,
    }
    write_csv(
        &output_path(config, "census_classes.csv")?,
        &["class", "count"],
        census.class_counts.iter().map(|(c, n)| ClassRow {
            class: c.as_str(),
            count: *n,
        }),
    )?;

    #[derive(Serialize)]
    struct SignatureRow<'a> {
        signature: &'a str,
        count: usize,
    }
    write_csv(
        &output_path(config, "census_signatures.csv")?,
        &["signature", "count"],
        census.signatures.iter().map(|(s, n)| SignatureRow {
            signature: s,
            count: *n,
        }),
    )?;

    write_csv(
        &output_path(config, "classified.csv")?,
        &["package", "raw_version", "class", "epoch", "major", "minor", "patch"],
        classified.iter().map(|(name, v)| {
            let f = v.fields();
            ClassifiedRow {
                package: name,
                raw_version: v.raw(),
                class: v.class().as_str(),
                epoch: f.map(|f| f.epoch),
                major: f.map(|f| f.major),
                minor: f.map(|f| f.minor),
                patch: f.map(|f| f.patch),
            }
        }),
    )?;

    let counts: serde_json::Map<_, _> = census
        .class_counts
        .iter()
        .map(|(c, n)| (c.as_str().to_string(), (*n).into()))
        .collect();
    write_json(
        &output_path(config, "census_summary.json")?,
        &serde_json::json!({
            "release": snapshot.release_id(),
            "total": census.total,
            "non_meta_total": census.non_meta_total,
            "counts": counts,
            "date_like": census.date_like,
        }),
    )?;

    Ok(ClassifyOutput { census, classified })
}

/// The later of two release ids under Debian version ordering.
fn newer_release<'a>(a: &'a str, b: &'a str) -> &'a str {
    match (DebVersion::parse(a), DebVersion::parse(b)) {
        (Ok(va), Ok(vb)) if va > vb => a,
        _ => b,
    }
}

/// Activity labels for packages present in both releases.
///
/// With a seed configured, the comparison is limited to the seed's closure in
/// the newer release. Writes `activity.csv`, `activity_hist.csv` and
/// `activity_summary.json`.
pub fn run_pvac(config: &AnalysisConfig, release_a: &str, release_b: &str) -> Result<ActivityReport> {
    let (id_a, _) = config.release(release_a)?;
    let (id_b, _) = config.release(release_b)?;
    let rules = load_rules(config)?;

    let (snap_a, snap_b) = thread::scope(|s| {
        let a = s.spawn(|| load_release(config, id_a));
        let b = s.spawn(|| load_release(config, id_b));
        (
            a.join().expect("loader thread panicked"),
            b.join().expect("loader thread panicked"),
        )
    });
    let (snap_a, snap_b) = (snap_a?, snap_b?);

    let mut common = crate::ingest::common_real_packages(&snap_a, &snap_b);
    if let Some(seed) = &config.seed {
        let newer = if newer_release(id_a, id_b) == id_a { &snap_a } else { &snap_b };
        let closure = dependency_closure(newer, seed)?;
        common.retain(|name| closure.contains(name));
    }
    info!("{} packages common to {id_a} and {id_b}", common.len());

    let versions_a = classify_snapshot(&snap_a, &rules);
    let versions_b = classify_snapshot(&snap_b, &rules);
    let report = activity_report((id_a, id_b), &common, &versions_a, &versions_b);
    for d in &report.diagnostics {
        warn!("{d}");
    }

    #[derive(Serialize)]
    struct ActivityRow<'a> {
        package: &'a str,
        version_a: Option<&'a str>,
        version_b: Option<&'a str>,
        activity: String,
    }
    write_csv(
        &output_path(config, "activity.csv")?,
        &["package", "version_a", "version_b", "activity"],
        report.per_package.iter().map(|(name, p)| ActivityRow {
            package: name,
            version_a: p.version_a.as_deref(),
            version_b: p.version_b.as_deref(),
            activity: p.level.label(),
        }),
    )?;

    #[derive(Serialize)]
    struct HistRow {
        activity: String,
        count: usize,
    }
    let excluded = report.excluded();
    let hist = ActivityLevel::EVALUABLE
        .into_iter()
        .map(|l| (l, report.count(l)))
        .chain(
            ExclusionReason::ALL
                .into_iter()
                .filter(|r| *r != ExclusionReason::EpochMismatch)
                .map(|r| (ActivityLevel::Excluded(r), excluded[&r])),
        )
        .map(|(l, count)| HistRow {
            activity: l.label(),
            count,
        });
    write_csv(&output_path(config, "activity_hist.csv")?, &["activity", "count"], hist)?;
    write_json(&output_path(config, "activity_summary.json")?, &report.summary_json())?;
    Ok(report)
}

/// Technical lag of one release against the configured upstream dataset.
///
/// The requested set is the seed closure (or the whole release without a
/// seed), minus meta-packages, Unknown versions and packages with no homepage.
/// Writes `freshness.json` and `freshness.csv`.
pub fn run_libyears(config: &AnalysisConfig, release: &str) -> Result<FreshnessReport> {
    let (id, release_config) = config.release(release)?;
    let upstream_path = config
        .upstream
        .as_ref()
        .ok_or_else(|| Error::Config("no upstream dataset configured".into()))?;
    let upstream = load_upstream_dataset(upstream_path)?;
    let packaged_releases = match &release_config.packaged {
        Some(path) => load_upstream_dataset(path)?,
        None => BTreeMap::new(),
    };

    let snapshot = load_release(config, id)?;
    let rules = load_rules(config)?;
    let packaged = classify_snapshot(&snapshot, &rules);

    let candidates: BTreeSet<String> = match &config.seed {
        Some(seed) => dependency_closure(&snapshot, seed)?,
        None => snapshot.records().keys().cloned().collect(),
    };
    let requested: BTreeSet<String> = candidates
        .into_iter()
        .filter(|name| {
            let record = &snapshot.records()[name];
            !record.is_meta
                && record.homepage.is_some()
                && !packaged.get(name).is_some_and(SemVersion::is_unknown)
        })
        .collect();

    let report = aggregate_freshness(
        id,
        &requested,
        FreshnessInputs {
            packaged: &packaged,
            upstream: &upstream,
            packaged_releases: &packaged_releases,
            day_convention: config.day_convention,
        },
    );
    for w in &report.warnings {
        warn!("{w}");
    }

    write_json(&output_path(config, "freshness.json")?, &report.to_json())?;
    #[derive(Serialize)]
    struct Row<'a> {
        package: &'a str,
        ver_delta: f64,
        day_delta: Option<i64>,
    }
    write_csv(
        &output_path(config, "freshness.csv")?,
        &["package", "ver_delta", "day_delta"],
        report.per_package.iter().map(|p| Row {
            package: &p.package,
            ver_delta: p.version_delta,
            day_delta: p.day_delta,
        }),
    )?;
    Ok(report)
}

/// Dependency closure of the seed, written one name per line to `closure.txt`.
pub fn run_closure(config: &AnalysisConfig, release: &str) -> Result<BTreeSet<String>> {
    let seed = required_seed(config)?;
    let snapshot = load_release(config, release)?;
    let closure = dependency_closure(&snapshot, seed)?;
    let text: String = closure.iter().map(|n| format!("{n}\n")).collect();
    write_text(&output_path(config, "closure.txt")?, &text)?;
    Ok(closure)
}

/// Writes the parsed snapshot as `snapshot.tsv`.
pub fn run_dump(config: &AnalysisConfig, release: &str) -> Result<ReleaseSnapshot> {
    let snapshot = load_release(config, release)?;
    write_text(&output_path(config, "snapshot.tsv")?, &snapshot.dump_tsv())?;
    Ok(snapshot)
}

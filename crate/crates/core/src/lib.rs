//! Version classification and technical-lag metrics for Debian-family
//! package indices.
//!
//! Pipeline: [`ingest`] turns a `Packages` index into a [`ingest::ReleaseSnapshot`],
//! [`classify`] assigns each version a class and numeric fields, then
//! [`activity`] compares two releases and [`freshness`] measures lag against
//! upstream. [`report`] glues these together for the CLI.

pub mod activity;
pub mod classify;
pub mod config;
pub mod error;
pub mod freshness;
pub mod ingest;
pub mod report;
pub mod version;

pub use activity::{activity_report, pvac, ActivityLevel, ActivityReport, ExclusionReason};
pub use classify::{basic_signature, classify, RuleSet, SemVersion, VersionClass, VersionFields};
pub use config::AnalysisConfig;
pub use error::{Diagnostic, Error, Result};
pub use freshness::{aggregate_freshness, version_delta_libyear, FreshnessReport, UpstreamRelease};
pub use ingest::{dependency_closure, ReleaseSnapshot};
pub use version::{compare_deb_versions, DebVersion};

//! Analysis configuration and its line-oriented `key=value` file format.
//!
//! ```text
//! # comments and blank lines are ignored
//! release.22.04.codename=jammy
//! release.14.04.mirror=http://old-releases.ubuntu.com/ubuntu
//! release.22.04.index=fixtures/jammy-Packages.gz
//! release.22.04.packaged=data/packaged-22.04.csv
//! component=main
//! architecture=amd64
//! seed=ubuntu-minimal
//! rules=rules.tsv
//! upstream=upstream.csv
//! output=out
//! cache=cache
//! offline=true
//! meta=ubuntu-minimal,ubuntu-standard
//! meta.by_section=true
//! day_convention=signed
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::freshness::DayConvention;
use crate::ingest::{index_url, IndexSource, MetaPolicy};

pub const ARCHIVE_MIRROR: &str = "http://archive.ubuntu.com/ubuntu";
pub const OLD_RELEASES_MIRROR: &str = "http://old-releases.ubuntu.com/ubuntu";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReleaseConfig {
    pub codename: Option<String>,
    pub mirror: Option<String>,
    /// Explicit index location (path, `file://` or `http(s)://`), bypassing the mirror layout.
    pub index: Option<String>,
    /// Upstream dates of the versions this release ships.
    pub packaged: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub releases: BTreeMap<String, ReleaseConfig>,
    pub component: String,
    pub architecture: String,
    pub seed: Option<String>,
    pub rules: Option<PathBuf>,
    pub upstream: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub offline: bool,
    pub meta: MetaPolicy,
    pub day_convention: DayConvention,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let known = [
            ("14.04", "trusty", OLD_RELEASES_MIRROR),
            ("16.04", "xenial", ARCHIVE_MIRROR),
            ("18.04", "bionic", ARCHIVE_MIRROR),
            ("20.04", "focal", ARCHIVE_MIRROR),
            ("22.04", "jammy", ARCHIVE_MIRROR),
            ("24.04", "noble", ARCHIVE_MIRROR),
        ];
        let releases = known
            .into_iter()
            .map(|(id, codename, mirror)| {
                (
                    id.to_string(),
                    ReleaseConfig {
                        codename: Some(codename.to_string()),
                        mirror: Some(mirror.to_string()),
                        ..ReleaseConfig::default()
                    },
                )
            })
            .collect();
        Self {
            releases,
            component: "main".into(),
            architecture: "amd64".into(),
            seed: None,
            rules: None,
            upstream: None,
            output_dir: PathBuf::from("."),
            cache_dir: None,
            offline: false,
            meta: MetaPolicy::default(),
            day_convention: DayConvention::default(),
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

impl AnalysisConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::default();
        config.apply_text(&text, path.parent().unwrap_or(Path::new(".")))?;
        Ok(config)
    }

    /// Applies `key=value` lines on top of the current values.
    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<()> {
        let resolve = |v: &str| -> PathBuf {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key=value", idx + 1)));
            };
            let (key, value) = (key.trim(), value.trim());

            if let Some(rest) = key.strip_prefix("release.") {
                let Some((id, field)) = rest.rsplit_once('.') else {
                    return Err(Error::Config(format!("line {}: bad key {key:?}", idx + 1)));
                };
                let release = self.releases.entry(id.to_string()).or_default();
                match field {
                    "codename" => release.codename = Some(value.to_string()),
                    "mirror" => release.mirror = Some(value.to_string()),
                    "index" => {
                        release.index = Some(if value.contains("://") {
                            value.to_string()
                        } else {
                            resolve(value).display().to_string()
                        })
                    }
                    "packaged" => release.packaged = Some(resolve(value)),
                    _ => return Err(Error::Config(format!("line {}: unknown key {key:?}", idx + 1))),
                }
                continue;
            }

            match key {
                "component" => self.component = value.to_string(),
                "architecture" => self.architecture = value.to_string(),
                "seed" => self.seed = Some(value.to_string()),
                "rules" => self.rules = Some(resolve(value)),
                "upstream" => self.upstream = Some(resolve(value)),
                "output" => self.output_dir = resolve(value),
                "cache" => self.cache_dir = Some(resolve(value)),
                "offline" => self.offline = parse_bool(key, value)?,
                "meta" => {
                    self.meta.names = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect()
                }
                "meta.by_section" => self.meta.by_section = parse_bool(key, value)?,
                "day_convention" => self.day_convention = value.parse().map_err(Error::Config)?,
                _ => return Err(Error::Config(format!("line {}: unknown key {key:?}", idx + 1))),
            }
        }
        Ok(())
    }

    /// Looks a release up by id ("22.04") or codename ("jammy").
    pub fn release(&self, id: &str) -> Result<(&str, &ReleaseConfig)> {
        self.releases
            .get_key_value(id)
            .or_else(|| {
                self.releases
                    .iter()
                    .find(|(_, r)| r.codename.as_deref() == Some(id))
            })
            .map(|(k, r)| (k.as_str(), r))
            .ok_or_else(|| Error::Config(format!("unknown release {id:?}")))
    }

    pub fn index_source(&self, id: &str) -> Result<IndexSource> {
        let (id, release) = self.release(id)?;
        if let Some(index) = &release.index {
            return Ok(IndexSource::parse(index));
        }
        let (Some(codename), Some(mirror)) = (&release.codename, &release.mirror) else {
            return Err(Error::Config(format!(
                "release {id} needs either an index or a codename and mirror"
            )));
        };
        Ok(IndexSource::parse(&index_url(
            mirror,
            codename,
            &self.component,
            &self.architecture,
        )))
    }
}

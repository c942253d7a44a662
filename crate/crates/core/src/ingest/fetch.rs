//! Getting `Packages` indices off a mirror, a local tree, or the cache.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use flate2::read::GzDecoder;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// `<mirror>/dists/<codename>/<component>/binary-<arch>/Packages.gz`
pub fn index_url(mirror: &str, codename: &str, component: &str, architecture: &str) -> String {
    format!(
        "{}/dists/{codename}/{component}/binary-{architecture}/Packages.gz",
        mirror.trim_end_matches('/')
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSource {
    Url(String),
    File(PathBuf),
}

impl IndexSource {
    /// `file://` URLs and bare paths become [`IndexSource::File`].
    pub fn parse(location: &str) -> Self {
        if let Some(path) = location.strip_prefix("file://") {
            IndexSource::File(PathBuf::from(path))
        } else if location.starts_with("http://") || location.starts_with("https://") {
            IndexSource::Url(location.to_string())
        } else {
            IndexSource::File(PathBuf::from(location))
        }
    }
}

impl std::fmt::Display for IndexSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IndexSource::Url(u) => f.write_str(u),
            IndexSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Downloads indices, keeping a content-addressed copy of every download.
///
/// Cache layout: `objects/<sha256>` holds the bytes and `refs.tsv` maps each
/// URL to the hash of its latest download. In offline mode only the cache is
/// consulted.
#[derive(Debug, Clone)]
pub struct Fetcher {
    cache_dir: Option<PathBuf>,
    offline: bool,
    timeout: Duration,
}

impl Default for Fetcher {
    fn default() -> Self {
        Self {
            cache_dir: None,
            offline: false,
            timeout: Duration::from_secs(60),
        }
    }
}

impl Fetcher {
    pub fn new(cache_dir: Option<PathBuf>, offline: bool) -> Self {
        Self {
            cache_dir,
            offline,
            ..Self::default()
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Raw index bytes, still compressed if the source was.
    pub fn fetch(&self, source: &IndexSource) -> Result<Vec<u8>> {
        match source {
            IndexSource::File(path) => fs::read(path).map_err(|e| Error::Transport {
                url: path.display().to_string(),
                status: None,
                message: e.to_string(),
            }),
            IndexSource::Url(url) => {
                if let Some(bytes) = self.cached(url)? {
                    if self.offline {
                        return Ok(bytes);
                    }
                    log::debug!("refreshing cached {url}");
                }
                if self.offline {
                    return Err(Error::Transport {
                        url: url.clone(),
                        status: None,
                        message: "offline mode and no cached copy".into(),
                    });
                }
                let bytes = self.download(url)?;
                self.store(url, &bytes)?;
                Ok(bytes)
            }
        }
    }

    fn download(&self, url: &str) -> Result<Vec<u8>> {
        let transport = |status, message: String| Error::Transport {
            url: url.to_string(),
            status,
            message,
        };
        let response = ureq::get(url)
            .timeout(self.timeout)
            .call()
            .map_err(|e| match e {
                ureq::Error::Status(code, r) => transport(Some(code), r.status_text().to_string()),
                ureq::Error::Transport(t) => transport(None, t.to_string()),
            })?;
        let mut bytes = Vec::new();
        response
            .into_reader()
            .read_to_end(&mut bytes)
            .map_err(|e| transport(None, e.to_string()))?;
        Ok(bytes)
    }

    fn refs_path(dir: &Path) -> PathBuf {
        dir.join("refs.tsv")
    }

    fn cached(&self, url: &str) -> Result<Option<Vec<u8>>> {
        let Some(dir) = &self.cache_dir else {
            return Ok(None);
        };
        let refs = match fs::read_to_string(Self::refs_path(dir)) {
            Ok(s) => s,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(Self::refs_path(dir), e)),
        };
        let Some(hash) = refs
            .lines()
            .rev()
            .filter_map(|l| l.split_once('\t'))
            .find(|(u, _)| *u == url)
            .map(|(_, h)| h)
        else {
            return Ok(None);
        };
        let object = dir.join("objects").join(hash);
        let bytes = fs::read(&object).map_err(|e| Error::io(&object, e))?;
        if hex::encode(Sha256::digest(&bytes)) != hash {
            return Err(Error::Decode(format!(
                "cache object {} does not match its hash",
                object.display()
            )));
        }
        Ok(Some(bytes))
    }

    fn store(&self, url: &str, bytes: &[u8]) -> Result<()> {
        let Some(dir) = &self.cache_dir else {
            return Ok(());
        };
        let objects = dir.join("objects");
        fs::create_dir_all(&objects).map_err(|e| Error::io(&objects, e))?;
        let hash = hex::encode(Sha256::digest(bytes));
        let object = objects.join(&hash);
        if !object.exists() {
            static SEQ: AtomicUsize = AtomicUsize::new(0);
            let tmp = objects.join(format!(
                "{hash}.tmp{}.{}",
                std::process::id(),
                SEQ.fetch_add(1, Ordering::Relaxed)
            ));
            fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
            fs::rename(&tmp, &object).map_err(|e| Error::io(&object, e))?;
        }
        // One write per line in append mode, so concurrent stores interleave whole lines.
        let refs = Self::refs_path(dir);
        fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&refs)
            .and_then(|mut f| f.write_all(format!("{url}\t{hash}\n").as_bytes()))
            .map_err(|e| Error::io(&refs, e))
    }
}

/// Index text from raw bytes, gunzipping when the gzip magic is present.
pub fn decode_index(bytes: &[u8]) -> Result<String> {
    let raw = if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(bytes)
            .read_to_end(&mut out)
            .map_err(|e| Error::Decode(format!("gzip: {e}")))?;
        out
    } else {
        bytes.to_vec()
    };
    String::from_utf8(raw).map_err(|e| Error::Decode(format!("not UTF-8: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use flate2::write::GzEncoder;
    use std::io::Write;

    #[test]
    fn url_convention() {
        assert_eq!(
            index_url("http://archive.ubuntu.com/ubuntu/", "jammy", "main", "amd64"),
            "http://archive.ubuntu.com/ubuntu/dists/jammy/main/binary-amd64/Packages.gz"
        );
    }

    #[test]
    fn source_kinds() {
        assert_eq!(
            IndexSource::parse("file:///tmp/x"),
            IndexSource::File("/tmp/x".into())
        );
        assert_eq!(IndexSource::parse("rel/x"), IndexSource::File("rel/x".into()));
        assert!(matches!(IndexSource::parse("https://a/b"), IndexSource::Url(_)));
    }

    #[test]
    fn local_file_is_passed_through_untouched() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("Packages.gz");
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(b"Package: aa\nVersion: 1\n").unwrap();
        let gz = enc.finish().unwrap();
        fs::write(&path, &gz).unwrap();

        let bytes = Fetcher::default().fetch(&IndexSource::File(path)).unwrap();
        assert_eq!(bytes, gz);
        assert_eq!(decode_index(&bytes).unwrap(), "Package: aa\nVersion: 1\n");
        assert_eq!(decode_index(b"plain").unwrap(), "plain");
    }

    #[test]
    fn unreachable_mirror_names_url() {
        let url = "http://127.0.0.1:9/dists/trusty/main/binary-amd64/Packages.gz";
        let err = Fetcher::default()
            .with_timeout(Duration::from_secs(2))
            .fetch(&IndexSource::Url(url.into()))
            .unwrap_err();
        assert!(matches!(&err, Error::Transport { url: u, .. } if u == url));
        assert!(err.to_string().contains(url));
    }

    #[test]
    fn missing_file_is_transport_error() {
        let err = Fetcher::default()
            .fetch(&IndexSource::File("/nonexistent/Packages.gz".into()))
            .unwrap_err();
        assert!(err.to_string().contains("/nonexistent/Packages.gz"));
    }

    #[test]
    fn offline_uses_cache_only() {
        let dir = tempfile::tempdir().unwrap();
        let fetcher = Fetcher::new(Some(dir.path().to_path_buf()), true);
        let url = "http://127.0.0.1:9/Packages.gz";
        assert!(fetcher.fetch(&IndexSource::Url(url.into())).is_err());

        fetcher.store(url, b"cached bytes").unwrap();
        assert_eq!(
            fetcher.fetch(&IndexSource::Url(url.into())).unwrap(),
            b"cached bytes"
        );
    }

    #[test]
    fn corrupt_gzip() {
        assert!(decode_index(&[0x1f, 0x8b, 0, 1, 2]).is_err());
    }
}

//! Debian version strings: `[epoch:]upstream_version[-debian_revision]`.
//!
//! Parsing keeps the original epoch text so that [`DebVersion`]'s `Display`
//! reproduces the input byte for byte. Ordering follows dpkg: epochs compare
//! numerically, then the upstream part, then the revision, each using the
//! alternating non-digit / digit segment comparison.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DebVersion {
    epoch: u64,
    epoch_text: Option<String>,
    upstream: String,
    revision: Option<String>,
}

impl DebVersion {
    pub fn parse(raw: &str) -> Result<Self> {
        let err = |reason| Error::VersionFormat {
            raw: raw.to_string(),
            reason,
        };
        if raw.is_empty() {
            return Err(err("empty version"));
        }

        let (epoch_text, rest) = match raw.split_once(':') {
            Some((e, rest)) => {
                if e.is_empty() || !e.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(err("epoch is not a non-negative integer"));
                }
                (Some(e), rest)
            }
            None => (None, raw),
        };
        let epoch = match epoch_text {
            Some(e) => e.parse::<u64>().map_err(|_| err("epoch out of range"))?,
            None => 0,
        };
        if rest.contains(':') {
            return Err(err("upstream version contains a colon"));
        }

        let (upstream, revision) = match rest.rsplit_once('-') {
            Some((up, rev)) => {
                if rev.is_empty() {
                    return Err(err("empty debian revision"));
                }
                (up, Some(rev))
            }
            None => (rest, None),
        };
        if upstream.is_empty() {
            return Err(err("empty upstream version"));
        }
        if upstream.chars().any(char::is_whitespace)
            || revision.is_some_and(|r| r.chars().any(char::is_whitespace))
        {
            return Err(err("whitespace in version"));
        }

        Ok(Self {
            epoch,
            epoch_text: epoch_text.map(str::to_string),
            upstream: upstream.to_string(),
            revision: revision.map(str::to_string),
        })
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn upstream_version(&self) -> &str {
        &self.upstream
    }

    pub fn debian_revision(&self) -> Option<&str> {
        self.revision.as_deref()
    }

    /// A copy with the epoch replaced; the epoch is always written out.
    pub fn with_epoch(&self, epoch: u64) -> Self {
        Self {
            epoch,
            epoch_text: Some(epoch.to_string()),
            ..self.clone()
        }
    }
}

impl FromStr for DebVersion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for DebVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(epoch) = &self.epoch_text {
            write!(f, "{epoch}:")?;
        }
        f.write_str(&self.upstream)?;
        if let Some(rev) = &self.revision {
            write!(f, "-{rev}")?;
        }
        Ok(())
    }
}

/// Orders two parsed versions; `a.cmp(b)` is the same thing.
pub fn compare_deb_versions(a: &DebVersion, b: &DebVersion) -> Ordering {
    a.epoch
        .cmp(&b.epoch)
        .then_with(|| compare_fragment(&a.upstream, &b.upstream))
        .then_with(|| {
            compare_fragment(
                a.revision.as_deref().unwrap_or(""),
                b.revision.as_deref().unwrap_or(""),
            )
        })
}

impl Ord for DebVersion {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_deb_versions(self, other)
    }
}

impl PartialOrd for DebVersion {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Equality is version equality ("1.0" == "1.00"), not string equality.
impl PartialEq for DebVersion {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DebVersion {}

// '~' sorts before everything, even the end of the string; letters sort
// before all other non-digits.
fn char_weight(c: Option<u8>) -> i32 {
    match c {
        None => 0,
        Some(b'~') => -1,
        Some(c) if c.is_ascii_alphabetic() => i32::from(c),
        Some(c) => i32::from(c) + 256,
    }
}

fn compare_fragment(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    while !a.is_empty() || !b.is_empty() {
        let a_len = a.iter().take_while(|c| !c.is_ascii_digit()).count();
        let b_len = b.iter().take_while(|c| !c.is_ascii_digit()).count();
        for i in 0..a_len.max(b_len) {
            let wa = char_weight(a.get(i).filter(|_| i < a_len).copied());
            let wb = char_weight(b.get(i).filter(|_| i < b_len).copied());
            match wa.cmp(&wb) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        a = &a[a_len..];
        b = &b[b_len..];

        let a_len = a.iter().take_while(|c| c.is_ascii_digit()).count();
        let b_len = b.iter().take_while(|c| c.is_ascii_digit()).count();
        match compare_digits(&a[..a_len], &b[..b_len]) {
            Ordering::Equal => {}
            other => return other,
        }
        a = &a[a_len..];
        b = &b[b_len..];
    }
    Ordering::Equal
}

// Arbitrary-length decimal comparison; an empty run counts as zero.
fn compare_digits(a: &[u8], b: &[u8]) -> Ordering {
    let strip = |s: &[u8]| -> usize { s.iter().take_while(|&&c| c == b'0').count() };
    let a = &a[strip(a)..];
    let b = &b[strip(b)..];
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

//! Reading Debian `Packages` indices into release snapshots.

mod depends;
mod fetch;
mod snapshot;
mod stanza;

pub use depends::{
    is_valid_package_name, parse_depends, parse_provides, Alternative, DependencyClause,
    VersionConstraint,
};
pub use fetch::{decode_index, index_url, Fetcher, IndexSource};
pub use snapshot::{
    build_snapshot, common_real_packages, dependency_closure, parse_stanzas, parse_stanzas_with,
    MetaPolicy, PackageRecord, ParsedIndex, ReleaseSnapshot,
};
pub use stanza::{parse_paragraphs, render, Stanza};

use crate::error::{Diagnostic, Result};

/// Fetch, decode, parse and build in one go.
pub fn load_snapshot(
    fetcher: &Fetcher,
    source: &IndexSource,
    release_id: &str,
    meta: &MetaPolicy,
) -> Result<(ReleaseSnapshot, Vec<Diagnostic>)> {
    let bytes = fetcher.fetch(source)?;
    let text = decode_index(&bytes)?;
    let parsed = parse_stanzas_with(&text, meta);
    let (snapshot, mut diagnostics) = build_snapshot(parsed.records, release_id);
    let mut all = parsed.diagnostics;
    all.append(&mut diagnostics);
    Ok((snapshot, all))
}

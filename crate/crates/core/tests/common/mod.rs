#![allow(dead_code)]

use std::path::PathBuf;

use debfresh::ingest::{build_snapshot, decode_index, parse_stanzas, ReleaseSnapshot};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_index(name: &str) -> String {
    let bytes = std::fs::read(fixture(name)).expect("fixture present");
    decode_index(&bytes).expect("fixture decodes")
}

pub fn snapshot_of(name: &str, release_id: &str) -> ReleaseSnapshot {
    build_snapshot(parse_stanzas(&read_index(name)).records, release_id).0
}

/// The nine packages of the reference activity table and their expected labels.
pub const TABLE4: [(&str, &str); 9] = [
    ("debconf", "LightlyActive"),
    ("libbz2-1.0", "LightlyActive"),
    ("libcap-ng0", "LightlyActive"),
    ("libdb5.3", "Sedentary"),
    ("libdevmapper1.02.1", "LightlyActive"),
    ("mawk", "LightlyActive"),
    ("sensible-utils", "LightlyActive"),
    ("zlib1g", "LightlyActive"),
    ("libmnl0", "LightlyActive"),
];

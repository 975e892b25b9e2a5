//! Count tables shipped with the crate (`n = 0..=100`, `k = 2..=5`) and the
//! reference residual tables.

use std::path::Path;

use crate::counts::{CountKind, CountTable};
use crate::error::Result;

pub const SHIPPED_NMAX: u32 = 100;
pub const SHIPPED_KS: [u32; 4] = [2, 3, 4, 5];

const SG: [(u32, &str); 4] = [
    (2, include_str!("../data/sg_k2.txt")),
    (3, include_str!("../data/sg_k3.txt")),
    (4, include_str!("../data/sg_k4.txt")),
    (5, include_str!("../data/sg_k5.txt")),
];

const CSG: [(u32, &str); 4] = [
    (2, include_str!("../data/csg_k2.txt")),
    (3, include_str!("../data/csg_k3.txt")),
    (4, include_str!("../data/csg_k4.txt")),
    (5, include_str!("../data/csg_k5.txt")),
];

pub const GOLDEN_SG: &str = include_str!("../data/golden_sg.csv");
pub const GOLDEN_CSG: &str = include_str!("../data/golden_csg.csv");

/// File name used for a table in a data directory.
pub fn bfile_name(kind: CountKind, k: u32) -> String {
    match kind {
        CountKind::All => format!("sg_k{k}.txt"),
        CountKind::Connected => format!("csg_k{k}.txt"),
    }
}

/// First index of the files of each kind.
pub fn bfile_offset(kind: CountKind) -> u32 {
    match kind {
        CountKind::All => 0,
        CountKind::Connected => 1,
    }
}

/// The embedded tables, marked as ingested.
pub fn shipped(kind: CountKind) -> Result<CountTable> {
    let mut t = CountTable::new(kind);
    let files = match kind {
        CountKind::All => &SG,
        CountKind::Connected => &CSG,
    };
    for &(k, text) in files {
        let label = format!("<shipped>/{}", bfile_name(kind, k));
        t.ingest_bfile_str(text, Path::new(&label), k, bfile_offset(kind))?;
    }
    Ok(t)
}

/// Tables read from `dir`, for every `k` whose file exists there.
pub fn from_dir(dir: &Path, kind: CountKind) -> Result<CountTable> {
    let mut t = CountTable::new(kind);
    for k in 0..=64 {
        let p = dir.join(bfile_name(kind, k));
        if p.exists() {
            t.ingest_bfile(&p, k, bfile_offset(kind))?;
        }
    }
    Ok(t)
}

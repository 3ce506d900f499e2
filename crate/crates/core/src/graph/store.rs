use super::{BuildReport, GraphError, HierCache, PassageGraph};
use crate::model::AreaGraph;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const CACHE_FORMAT_VERSION: u32 = 1;

/// On-disk form of the base graph and hierarchical caches. Leaf rasters are
/// rebuilt on load rather than stored.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    /// SHA-256 of the source map bytes.
    pub source_sha256: String,
    pub report: BuildReport,
    pub graph: PassageGraph,
    pub cache: HierCache,
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn save_cache_file(
    path: &Path,
    source: &[u8],
    report: &BuildReport,
    graph: &PassageGraph,
    cache: &HierCache,
) -> Result<(), GraphError> {
    let file = CacheFile {
        version: CACHE_FORMAT_VERSION,
        source_sha256: content_hash(source),
        report: report.clone(),
        graph: graph.clone(),
        cache: cache.clone(),
    };
    let json = serde_json::to_vec(&file).map_err(|e| GraphError::CacheIo(e.to_string()))?;
    std::fs::write(path, json).map_err(|e| GraphError::CacheIo(e.to_string()))
}

/// Loads a cache file built from `source`; rejects other maps and versions.
pub fn load_cache_file(
    path: &Path,
    source: &[u8],
    map: &AreaGraph,
) -> Result<CacheFile, GraphError> {
    let bytes = std::fs::read(path).map_err(|e| GraphError::CacheIo(e.to_string()))?;
    let mut file: CacheFile =
        serde_json::from_slice(&bytes).map_err(|e| GraphError::CacheIo(e.to_string()))?;
    if file.version != CACHE_FORMAT_VERSION {
        return Err(GraphError::UnsupportedVersion(file.version));
    }
    let expected = content_hash(source);
    if file.source_sha256 != expected {
        return Err(GraphError::HashMismatch {
            expected,
            found: file.source_sha256,
        });
    }
    file.cache.rebuild_rasters(map);
    Ok(file)
}

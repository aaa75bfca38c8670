//! Nucleus cache stored beside a group file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vgroup::nucleus::{compute_nucleus_within, NucleusRecord};
use vgroup::{Group, Nucleus, NucleusBudget};

#[derive(Serialize, Deserialize)]
struct CacheFile {
    hash: String,
    nucleus: NucleusRecord,
}

pub fn content_hash(group: &Group) -> String {
    hex::encode(Sha256::digest(group.def().to_text().as_bytes()))
}

pub fn cache_path(group_file: &Path) -> PathBuf {
    let mut name = group_file.as_os_str().to_owned();
    name.push(".nucleus.json");
    PathBuf::from(name)
}

/// Reads a cached nucleus when the hash matches, otherwise computes and
/// stores one. Unreadable or stale caches are recomputed.
pub fn load_or_compute(
    group: &Group,
    file: Option<&Path>,
    budget: NucleusBudget,
    use_cache: bool,
) -> vgroup::Result<Nucleus> {
    let path = file.filter(|_| use_cache).map(cache_path);
    let hash = content_hash(group);
    if let Some(path) = &path {
        if let Ok(text) = fs::read_to_string(path) {
            if let Ok(cached) = serde_json::from_str::<CacheFile>(&text) {
                if cached.hash == hash {
                    if let Ok(n) = Nucleus::from_record(group, &cached.nucleus) {
                        return Ok(n);
                    }
                }
            }
        }
    }
    let nucleus = compute_nucleus_within(group, budget)?;
    if let Some(path) = &path {
        let record = CacheFile {
            hash,
            nucleus: nucleus.to_record(group),
        };
        if let Ok(text) = serde_json::to_string_pretty(&record) {
            let _ = fs::write(path, text);
        }
    }
    Ok(nucleus)
}

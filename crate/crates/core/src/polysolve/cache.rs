//! Line-delimited JSON cache of solutions, one record per solution.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{RootPart, Solution};
use crate::error::Result;
use crate::partitions::BranchSpec;

static CACHE_LOCK: Mutex<()> = Mutex::new(());

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub spec_hash: String,
    pub spec: String,
    pub coefficients: Vec<Complex64>,
    pub roots: Vec<Vec<RootPart>>,
    pub residual: f64,
}

/// Hex SHA-256 of the canonical spec key.
pub fn spec_hash(spec: &BranchSpec) -> String {
    hex::encode(Sha256::digest(spec.key().as_bytes()))
}

fn read_records(path: &Path) -> Result<Vec<CacheRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Cached solutions for `spec`; an absent file yields none.
pub fn load_cached(path: &Path, spec: &BranchSpec) -> Result<Vec<Solution>> {
    let _guard = CACHE_LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let hash = spec_hash(spec);
    Ok(read_records(path)?
        .into_iter()
        .filter(|r| r.spec_hash == hash)
        .map(|r| Solution { coefficients: r.coefficients, roots: r.roots, residual: r.residual })
        .collect())
}

/// Replace the records for `spec` with `solutions`, keeping other specs.
pub fn store_cached(path: &Path, spec: &BranchSpec, solutions: &[Solution]) -> Result<()> {
    let _guard = CACHE_LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let hash = spec_hash(spec);
    let mut records: Vec<CacheRecord> =
        read_records(path)?.into_iter().filter(|r| r.spec_hash != hash).collect();
    records.extend(solutions.iter().map(|s| CacheRecord {
        spec_hash: hash.clone(),
        spec: spec.key(),
        coefficients: s.coefficients.clone(),
        roots: s.roots.clone(),
        residual: s.residual,
    }));
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        for r in &records {
            serde_json::to_writer(&mut f, r)?;
            f.write_all(b"\n")?;
        }
    }
    fs::rename(tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::partitions::Partition;
    use crate::polysolve::solve_all;

    #[test]
    fn hash_depends_on_values() {
        let a = BranchSpec::with_default_values(vec![Partition::simple(3); 2]).unwrap();
        let b = a.with_values(vec![1.0, 3.0]).unwrap();
        assert_ne!(spec_hash(&a), spec_hash(&b));
        assert_eq!(spec_hash(&a).len(), 64);
    }

    #[test]
    fn cache_round_trip_seeds_the_solver() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let cfg = RunConfig { cache: Some(path.clone()), ..RunConfig::default() };
        let spec = BranchSpec::with_default_values(vec![Partition::simple(4); 3]).unwrap();
        let first = solve_all(&spec, &cfg).unwrap();
        assert_eq!(first.stats.cached, 0);

        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 16);
        let rec: CacheRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(rec.spec_hash, spec_hash(&spec));

        let second = solve_all(&spec, &cfg).unwrap();
        assert_eq!(second.stats.cached, 16);
        assert_eq!(second.stats.starts, 0);
        assert_eq!(second.solutions.len(), 16);

        // A second spec is appended without disturbing the first.
        let other = BranchSpec::with_default_values(vec![Partition::simple(3); 2]).unwrap();
        solve_all(&other, &cfg).unwrap();
        assert_eq!(load_cached(&path, &spec).unwrap().len(), 16);
        assert_eq!(load_cached(&path, &other).unwrap().len(), 3);
    }
}

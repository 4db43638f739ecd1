use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::LlmError;

/// SHA-256 over the length-prefixed model id followed by the prompt.
pub fn cache_key(model_id: &str, prompt: &str) -> String {
    let mut h = Sha256::new();
    h.update((model_id.len() as u64).to_le_bytes());
    h.update(model_id.as_bytes());
    h.update(prompt.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub cache_key: String,
    pub model_id: String,
    pub prompt: String,
    pub response: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub attempt_count: u32,
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct CacheStats {
    pub records: usize,
    pub corrupt: usize,
    pub bytes: u64,
    pub per_model: BTreeMap<String, usize>,
}

/// Content-addressed response store: `<dir>/<key[..2]>/<key>.json`, one
/// record per file, written via rename so readers never see partial files.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, LlmError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| LlmError::Cache {
            path: dir.clone(),
            source,
        })?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.json"))
    }

    /// Returns a record only if it parses and matches the request; corrupt
    /// or mismatched files are treated as misses.
    pub fn get(&self, model_id: &str, prompt: &str) -> Option<CompletionRecord> {
        let key = cache_key(model_id, prompt);
        let text = fs::read_to_string(self.path_for(&key)).ok()?;
        let rec: CompletionRecord = serde_json::from_str(&text).ok()?;
        (rec.cache_key == key && rec.model_id == model_id && rec.prompt == prompt).then_some(rec)
    }

    pub fn put(
        &self,
        model_id: &str,
        prompt: &str,
        response: &str,
        attempt_count: u32,
    ) -> Result<(), LlmError> {
        let key = cache_key(model_id, prompt);
        let rec = CompletionRecord {
            cache_key: key.clone(),
            model_id: model_id.to_string(),
            prompt: prompt.to_string(),
            response: response.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            attempt_count,
        };
        let path = self.path_for(&key);
        let parent = path.parent().expect("record path has a parent");
        let io = |source| LlmError::Cache {
            path: path.clone(),
            source,
        };
        fs::create_dir_all(parent).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(io)?;
        tmp.write_all(
            serde_json::to_string_pretty(&rec)
                .expect("record serializes")
                .as_bytes(),
        )
        .map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(())
    }

    pub fn stats(&self) -> Result<CacheStats, LlmError> {
        let mut stats = CacheStats::default();
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| LlmError::Cache { path, source }
        };
        let mut shards: Vec<_> = fs::read_dir(&self.dir)
            .map_err(io(&self.dir))?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        shards.sort();
        for shard in shards {
            for entry in fs::read_dir(&shard)
                .map_err(io(&shard))?
                .filter_map(Result::ok)
            {
                let path = entry.path();
                if path.extension().is_none_or(|e| e != "json") {
                    continue;
                }
                let text = fs::read_to_string(&path).map_err(io(&path))?;
                stats.bytes += text.len() as u64;
                match serde_json::from_str::<CompletionRecord>(&text) {
                    Ok(rec) if cache_key(&rec.model_id, &rec.prompt) == rec.cache_key => {
                        stats.records += 1;
                        *stats.per_model.entry(rec.model_id).or_default() += 1;
                    }
                    _ => stats.corrupt += 1,
                }
            }
        }
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{LlmClient, MockBackend};
    use std::sync::Arc;

    #[test]
    fn key_depends_on_model_and_prompt() {
        assert_eq!(cache_key("m", "p"), cache_key("m", "p"));
        assert_ne!(cache_key("m", "p"), cache_key("n", "p"));
        assert_ne!(cache_key("ab", "c"), cache_key("a", "bc"));
        assert_eq!(cache_key("m", "p").len(), 64);
    }

    #[test]
    fn memoizes_per_model() {
        let dir = tempfile::tempdir().unwrap();
        let backend = Arc::new(MockBackend::new("m1", &[]).unwrap());
        let client =
            LlmClient::new(backend.clone(), 2).with_cache(ResponseCache::open(dir.path()).unwrap());
        assert_eq!(client.cached_complete("same").unwrap(), "same");
        assert_eq!(client.cached_complete("same").unwrap(), "same");
        assert_eq!(backend.calls(), 1);

        let other = Arc::new(MockBackend::new("m2", &[]).unwrap());
        let client2 =
            LlmClient::new(other.clone(), 2).with_cache(ResponseCache::open(dir.path()).unwrap());
        client2.cached_complete("same").unwrap();
        assert_eq!(other.calls(), 1);

        let stats = ResponseCache::open(dir.path()).unwrap().stats().unwrap();
        assert_eq!(stats.records, 2);
        assert_eq!(stats.per_model.get("m1"), Some(&1));
    }

    #[test]
    fn survives_restart() {
        let dir = tempfile::tempdir().unwrap();
        {
            let b = Arc::new(MockBackend::new("m", &[]).unwrap());
            let c = LlmClient::new(b, 1).with_cache(ResponseCache::open(dir.path()).unwrap());
            c.cached_complete("a").unwrap();
            c.cached_complete("b").unwrap();
        }
        let b = Arc::new(MockBackend::new("m", &[]).unwrap());
        let c = LlmClient::new(b.clone(), 1).with_cache(ResponseCache::open(dir.path()).unwrap());
        c.cached_complete("a").unwrap();
        c.cached_complete("b").unwrap();
        assert_eq!(b.calls(), 0);
        assert_eq!(c.counters().cache_hits, 2);
    }

    #[test]
    fn corrupt_record_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        cache.put("m", "p", "r", 1).unwrap();
        let path = cache.path_for(&cache_key("m", "p"));
        fs::write(&path, "{not json").unwrap();
        assert!(cache.get("m", "p").is_none());
        assert_eq!(cache.stats().unwrap().corrupt, 1);

        let b = Arc::new(MockBackend::new("m", &[]).unwrap());
        let c = LlmClient::new(b.clone(), 1).with_cache(cache.clone());
        assert_eq!(c.cached_complete("p").unwrap(), "p");
        assert_eq!(b.calls(), 1);
        assert_eq!(cache.get("m", "p").unwrap().response, "p");
    }

    #[test]
    fn concurrent_duplicate_misses_converge() {
        let dir = tempfile::tempdir().unwrap();
        let b = Arc::new(MockBackend::new("m", &[]).unwrap());
        let c = LlmClient::new(b.clone(), 8).with_cache(ResponseCache::open(dir.path()).unwrap());
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| assert_eq!(c.cached_complete("dup").unwrap(), "dup"));
            }
        });
        let stats = ResponseCache::open(dir.path()).unwrap().stats().unwrap();
        assert_eq!((stats.records, stats.corrupt), (1, 0));
    }
}

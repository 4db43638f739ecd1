use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use super::{LexiconError, SentenceDictionary};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LexiconError + '_ {
    move |source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn encode(dicts: &[SentenceDictionary]) -> String {
    let mut out = String::new();
    for d in dicts {
        out.push_str(&serde_json::to_string(d).expect("dictionary serializes"));
        out.push('\n');
    }
    out
}

/// Writes one JSON record per line, replacing `path` atomically.
pub fn store_dictionaries(dicts: &[SentenceDictionary], path: &Path) -> Result<(), LexiconError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(encode(dicts).as_bytes())
        .map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

/// Appends records; each line goes out in a single write.
pub fn append_dictionaries(dicts: &[SentenceDictionary], path: &Path) -> Result<(), LexiconError> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io_err(path))?;
    for d in dicts {
        let mut line = serde_json::to_string(d).expect("dictionary serializes");
        line.push('\n');
        f.write_all(line.as_bytes()).map_err(io_err(path))?;
    }
    Ok(())
}

pub fn load_dictionaries(path: &Path) -> Result<Vec<SentenceDictionary>, LexiconError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let malformed = |message: String| LexiconError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let d: SentenceDictionary =
                serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
            d.validate().map_err(|e| malformed(e.to_string()))?;
            Ok(d)
        })
        .collect()
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::{Cli, VERSION};

/// Writes `bytes` to `path` through a temporary file in the same directory
/// followed by a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Run metadata that changes between identical runs lives next to the
/// artifact so the artifact itself stays byte-reproducible.
fn write_sidecar(path: &Path) -> Result<()> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = serde_json::json!({ "artifact": path.file_name().map(|f| f.to_string_lossy()), "finished_unix": secs });
    let mut side = path.as_os_str().to_owned();
    side.push(".meta.json");
    write_atomic(Path::new(&side), serde_json::to_string_pretty(&meta)?.as_bytes())
}

fn deliver(bytes: Vec<u8>, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, &bytes)?;
            write_sidecar(path)
        }
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    version: &'a str,
    config: &'a Cli,
    result: &'a T,
}

pub fn json_document<T: Serialize>(cli: &Cli, result: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(&Document { version: VERSION, config: cli, result })?;
    text.push('\n');
    Ok(text.into_bytes())
}

pub fn emit_json<T: Serialize>(cli: &Cli, result: &T, out: Option<&Path>) -> Result<()> {
    deliver(json_document(cli, result)?, out)
}

/// CSV with two `#` comment lines carrying the version and the config.
pub fn emit_csv(cli: &Cli, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>, out: Option<&Path>) -> Result<()> {
    let mut bytes = format!("# stab-lab {VERSION}\n# config: {}\n", serde_json::to_string(cli)?).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut bytes);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    deliver(bytes, out)
}

//! Output directory handling. Every file is written to a temporary sibling
//! first and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qdcascade::kv::KvDoc;

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.txt";
pub const SUMMARY: &str = "summary.txt";

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn temp_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp{}", std::process::id()))
}

/// Writes through `fill` into a temporary file, then renames it to `path`.
pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    let tmp = temp_path(path);
    let result = (|| {
        let file = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        let mut w = std::io::BufWriter::new(file);
        fill(&mut w)?;
        w.flush().map_err(|e| CliError::io(&tmp, e))?;
        w.into_inner()
            .map_err(|e| CliError::io(&tmp, e.into_error()))?
            .sync_all()
            .map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    write_atomic(path, |w| {
        w.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
    })
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_kv(path: &Path) -> CliResult<KvDoc> {
    let text = read_text(path)?;
    KvDoc::parse(&text).map_err(|e| CliError::new(e.kind(), format!("{}: {e}", path.display())))
}

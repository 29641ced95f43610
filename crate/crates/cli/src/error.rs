use std::fmt;
use std::path::Path;

/// Error reported to the user as a single `error: kind=<kind> msg=<text>` line.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub msg: String,
}

impl CliError {
    pub fn new(kind: &'static str, msg: impl Into<String>) -> Self {
        CliError {
            kind,
            msg: msg.into(),
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Self::new("config", msg)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new("io", format!("{}: {e}", path.display()))
    }

    /// The one-line form printed on stderr.
    pub fn line(&self) -> String {
        let msg: String = self
            .msg
            .chars()
            .map(|c| if c == '\n' || c == '\r' { ' ' } else { c })
            .collect();
        format!("error: kind={} msg={}", self.kind, msg.trim())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

impl From<qdcascade::Error> for CliError {
    fn from(e: qdcascade::Error) -> Self {
        CliError::new(e.kind(), e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use sha2::{Digest, Sha256};

/// Comment block at the top of every artifact: tool version, resolved
/// configuration and SHA-256 of each input file. Worker counts are left out
/// so that artifacts do not depend on them.
#[derive(Debug, Clone)]
pub struct Header {
    lines: Vec<String>,
}

impl Header {
    pub fn new(command: &str) -> Self {
        Header { lines: vec![format!("omegas {}", env!("CARGO_PKG_VERSION")), format!("command: {command}")] }
    }

    pub fn config(mut self, key: &str, value: impl Display) -> Self {
        self.lines.push(format!("config: {key} = {value}"));
        self
    }

    pub fn input(mut self, path: &Path) -> anyhow::Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.lines.push(format!("input: {} sha256={}", path.display(), hex::encode(Sha256::digest(&bytes))));
        Ok(self)
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|l| format!("# {l}\n")).collect()
    }
}

/// Writes `header` and `body` to `out`, or to standard output. Files are
/// replaced atomically.
pub fn emit(out: Option<&Path>, header: &Header, body: &[u8]) -> anyhow::Result<()> {
    let mut bytes = header.render().into_bytes();
    bytes.extend_from_slice(body);
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
        Some(path) => {
            let tmp = tmp_path(path);
            fs::write(&tmp, &bytes).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
        }
    }
    Ok(())
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

/// File contents with leading `#` comment lines removed.
pub fn read_without_header(path: &Path) -> anyhow::Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().skip_while(|l| l.starts_with('#')).flat_map(|l| [l, "\n"]).collect())
}

//! Where results go: standard output, or files under `--out`.

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub struct Sink {
    out: Option<PathBuf>,
    color: bool,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Result<Sink> {
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        let color = match std::env::var("LDG_COLOR").as_deref() {
            Ok("0") => false,
            Ok("1") => true,
            _ => std::io::stdout().is_terminal(),
        };
        Ok(Sink { out, color })
    }

    /// An artifact: printed, or written to `name` in the output directory.
    pub fn artifact(&self, name: &str, content: &str) -> Result<()> {
        match &self.out {
            Some(dir) => {
                let path = dir.join(name);
                std::fs::write(&path, ensure_newline(content))
                    .with_context(|| format!("cannot write {}", path.display()))?;
                self.line(&format!("wrote {}", path.display()));
                Ok(())
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(ensure_newline(content).as_bytes())?;
                Ok(())
            }
        }
    }

    /// Resolves a user-given output path against the output directory.
    pub fn path(&self, p: &Path) -> PathBuf {
        match &self.out {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn line(&self, s: &str) {
        println!("{s}");
    }

    pub fn good(&self, s: &str) -> String {
        self.paint(s, "32")
    }

    pub fn bad(&self, s: &str) -> String {
        self.paint(s, "31")
    }

    fn paint(&self, s: &str, code: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn ensure_newline(s: &str) -> String {
    if s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    }
}

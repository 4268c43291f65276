//! Line-oriented dataset manifest: `print_id<TAB>identity_id<TAB>path`,
//! paths relative to the manifest's directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Component, Path, PathBuf};

use anyhow::{Context, Result};

use crate::Invalid;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub print_id: String,
    pub identity_id: String,
    /// Relative to the manifest's directory.
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    /// Directory that entry paths are relative to.
    pub root: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

fn check_field(what: &str, v: &str) -> Result<(), Invalid> {
    if v.is_empty() || v.contains(['\t', '\n', '\r']) || v.chars().any(char::is_whitespace) {
        return Err(Invalid(format!("{what} {v:?} must be a non-empty token without whitespace")));
    }
    Ok(())
}

impl Manifest {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into(), entries: Vec::new() }
    }

    pub fn push(&mut self, print_id: &str, identity_id: &str, path: impl Into<PathBuf>) -> Result<(), Invalid> {
        check_field("print id", print_id)?;
        check_field("identity id", identity_id)?;
        if self.entries.iter().any(|e| e.print_id == print_id) {
            return Err(Invalid(format!("duplicate print id {print_id:?}")));
        }
        self.entries.push(ManifestEntry { print_id: print_id.into(), identity_id: identity_id.into(), path: path.into() });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn image_path(&self, e: &ManifestEntry) -> PathBuf {
        self.root.join(&e.path)
    }

    pub fn identities(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.identity_id.as_str()).collect()
    }

    pub fn identity_count(&self) -> usize {
        self.entries.iter().map(|e| &e.identity_id).collect::<HashSet<_>>().len()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            s.push_str(&format!("{}\t{}\t{}\n", e.print_id, e.identity_id, e.path.display()));
        }
        s
    }

    /// Parses manifest text; paths stay relative to `root`.
    pub fn parse(text: &str, root: impl Into<PathBuf>) -> Result<Self, Invalid> {
        let mut m = Self::new(root);
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(Invalid(format!("manifest line {}: expected 3 tab-separated fields", n + 1)));
            }
            m.push(f[0], f[1], f[2]).map_err(|e| Invalid(format!("manifest line {}: {}", n + 1, e.0)))?;
        }
        Ok(m)
    }

    /// Reads a manifest and checks that every image exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let m = Self::parse(&text, root)?;
        if m.is_empty() {
            return Err(Invalid(format!("manifest {} lists no prints", path.display())).into());
        }
        if let Some(e) = m.entries.iter().find(|e| !m.image_path(e).is_file()) {
            return Err(Invalid(format!("manifest {}: missing image {}", path.display(), m.image_path(e).display())).into());
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).with_context(|| format!("writing manifest {}", path.display()))
    }
}

/// `target` expressed relative to directory `base`; both are made absolute
/// first. Falls back to the absolute target on different roots.
pub fn relative_to(target: &Path, base: &Path) -> Result<PathBuf> {
    let target = fs::canonicalize(target).with_context(|| format!("resolving {}", target.display()))?;
    let base = fs::canonicalize(base).with_context(|| format!("resolving {}", base.display()))?;
    let (t, b): (Vec<Component>, Vec<Component>) = (target.components().collect(), base.components().collect());
    let common = t.iter().zip(&b).take_while(|(x, y)| x == y).count();
    if common == 0 {
        return Ok(target);
    }
    let mut out = PathBuf::new();
    for _ in common..b.len() {
        out.push("..");
    }
    for c in &t[common..] {
        out.push(c);
    }
    Ok(out)
}

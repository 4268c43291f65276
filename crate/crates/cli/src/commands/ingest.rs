use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use regex::Regex;

use crate::manifest::relative_to;
use crate::{Invalid, Manifest};

#[derive(Debug, Clone)]
pub enum IdentityRule {
    /// Every image is its own identity.
    PerFile,
    /// Identity is the first capture group of the pattern on the file name.
    FromFilename(Regex),
}

fn is_image(p: &Path) -> bool {
    matches!(p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(), Some("png" | "pgm"))
}

/// Lists the PNG/PGM files of `dir` (sorted by name) into a manifest written
/// at `out`. Print ids are file stems.
pub fn cmd_ingest(dir: &Path, rule: &IdentityRule, out: &Path) -> Result<Manifest> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file() && is_image(p));
    files.sort();
    if files.is_empty() {
        return Err(Invalid(format!("no PNG or PGM images in {}", dir.display())).into());
    }
    let root = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    super::ensure_dir(root)?;
    let mut m = Manifest::new(root);
    let mut matched = 0;
    for f in &files {
        let name = f.file_name().and_then(|n| n.to_str()).ok_or_else(|| Invalid(format!("non-UTF-8 file name {}", f.display())))?;
        let stem = f.file_stem().and_then(|n| n.to_str()).unwrap_or(name);
        let identity = match rule {
            IdentityRule::PerFile => stem.to_string(),
            IdentityRule::FromFilename(re) => match re.captures(name).and_then(|c| c.get(1)) {
                Some(g) => {
                    matched += 1;
                    g.as_str().to_string()
                }
                None => return Err(Invalid(format!("pattern {re} does not match {name}")).into()),
            },
        };
        m.push(stem, &identity, relative_to(f, root)?)?;
    }
    if matches!(rule, IdentityRule::FromFilename(_)) && matched == 0 {
        return Err(Invalid("identity pattern matched nothing".into()).into());
    }
    m.write(out)?;
    Ok(m)
}

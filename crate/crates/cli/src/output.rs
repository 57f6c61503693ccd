//! Output files are staged under a temporary name, the metadata sidecar is
//! written, and only then is the result renamed into place.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use contagion::io::Metadata;

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: &Path) -> Self {
        Self { root: root.to_path_buf() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes `name` through `body`, then its sidecar, then renames the
    /// staged file. Returns the final path.
    pub fn write<F>(&self, name: &str, meta: &Metadata, body: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut BufWriter<fs::File>) -> contagion::Result<()>,
    {
        fs::create_dir_all(&self.root).with_context(|| format!("creating {}", self.root.display()))?;
        let target = self.path(name);
        let staged = self.path(&format!(".{name}.partial"));
        let result = (|| -> Result<()> {
            let mut w = BufWriter::new(fs::File::create(&staged)?);
            body(&mut w)?;
            w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
            let mut meta = meta.clone();
            meta.set("output", name);
            meta.write_sidecar(&target)?;
            fs::rename(&staged, &target)?;
            Ok(())
        })();
        if result.is_err() {
            let _ = fs::remove_file(&staged);
        }
        result.with_context(|| format!("writing {}", target.display()))?;
        Ok(target)
    }
}

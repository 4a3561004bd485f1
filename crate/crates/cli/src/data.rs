use std::path::{Path, PathBuf};

use botnet_gnn::topo::{DatasetManifest, LabeledGraph, Split};

use crate::CliResult;

pub struct Dataset {
    pub manifest: DatasetManifest,
    pub base: PathBuf,
}

impl Dataset {
    pub fn open(dir: &Path) -> CliResult<Self> {
        let (manifest, base) = DatasetManifest::load(dir)?;
        Ok(Dataset { manifest, base })
    }

    pub fn split(&self, split: Split) -> CliResult<Vec<LabeledGraph>> {
        Ok(self.manifest.load_split(&self.base, split)?)
    }

    pub fn names(&self, split: Split) -> &[String] {
        self.manifest.files(split)
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| botnet_gnn::Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

//! Content-addressed on-disk cache for windows and spectra.
//!
//! Each entry is one file: a `sha256=<hex>` line over the payload, then the
//! JSON payload. Writes go through a temporary file and an atomic rename, so
//! readers only ever see complete entries. An entry whose checksum or JSON
//! does not verify is reported and treated as missing.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{sha256_hex, ModelParams};

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn window_key(params: &ModelParams, n: usize, trunc_tol: f64) -> String {
        sha256_hex(format!("window|{}|{}|{:016x}", params.digest(), n, trunc_tol.to_bits()).as_bytes())
    }

    pub fn spectrum_key(params: &ModelParams, n: usize, trunc_tol: f64, center: bool) -> String {
        sha256_hex(format!("spectrum|{}|{}|{:016x}|{}", params.digest(), n, trunc_tol.to_bits(), center).as_bytes())
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let path = self.path(key);
        let text = fs::read_to_string(&path).ok()?;
        let parsed = text.split_once('\n').and_then(|(head, body)| {
            let sum = head.strip_prefix("sha256=")?;
            (sum == sha256_hex(body.as_bytes())).then_some(body)
        });
        match parsed.map(serde_json::from_str) {
            Some(Ok(v)) => Some(v),
            _ => {
                log::warn!("cache entry {} is corrupt; recomputing", path.display());
                None
            }
        }
    }

    pub fn store<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        let body = serde_json::to_string(value)?;
        let text = format!("sha256={}\n{}", sha256_hex(body.as_bytes()), body);
        let tmp = self.dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        let dst = self.path(key);
        fs::rename(&tmp, &dst).map_err(|e| Error::io(&dst, e))
    }
}

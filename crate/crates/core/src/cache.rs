//! On-disk catalog cache, keyed by quiver content hash and field.

use std::fs;
use std::path::{Path, PathBuf};

use crate::catalog::{CatalogBounds, IndecCatalog};
use crate::error::{Error, Result};
use crate::fieldlin::Field;
use crate::quiver::Quiver;
use crate::rep::Rep;

pub fn cache_path(dir: &Path, q: &Quiver, field: Field) -> PathBuf {
    dir.join(format!("catalog-{}-p{}.json", q.content_hash(), field.p()))
}

pub fn to_json(cat: &IndecCatalog) -> Result<String> {
    serde_json::to_string(cat).map_err(|e| Error::Cache(e.to_string()))
}

/// Parses a cached catalog and checks it against the requested quiver and field.
pub fn from_json(text: &str, q: &Quiver, field: Field) -> Result<IndecCatalog> {
    let mut cat: IndecCatalog = serde_json::from_str(text).map_err(|e| Error::Cache(e.to_string()))?;
    cat.quiver = cat.quiver.rehydrate()?;
    if cat.quiver != *q || cat.field != field {
        return Err(Error::Cache("cached catalog is for a different quiver or field".into()));
    }
    let k = cat.indecs.len();
    let square = |t: &Vec<Vec<usize>>| t.len() == k && t.iter().all(|r| r.len() == k);
    let n = q.n_vertices();
    if !square(&cat.hom_table)
        || !square(&cat.ext_table)
        || [&cat.proj_index, &cat.inj_index, &cat.simple_index].iter().any(|v| v.len() != n || v.iter().any(|&i| i >= k))
    {
        return Err(Error::Cache("cached catalog tables have the wrong shape".into()));
    }
    for r in &cat.indecs {
        Rep::new(q, field, r.dims().to_vec(), r.maps().to_vec()).map_err(|e| Error::Cache(format!("cached representation: {e}")))?;
    }
    Ok(cat)
}

/// Loads the catalog from `dir` when present, otherwise builds it and writes it back.
/// Returns whether the cache was hit.
pub fn load_or_build(dir: Option<&Path>, q: &Quiver, field: Field, bounds: CatalogBounds) -> Result<(IndecCatalog, bool)> {
    let Some(dir) = dir else {
        return Ok((IndecCatalog::build(q, field, bounds)?, false));
    };
    let path = cache_path(dir, q, field);
    // a stale or corrupt file is rebuilt rather than trusted
    if let Some(cat) = fs::read_to_string(&path).ok().and_then(|text| from_json(&text, q, field).ok()) {
        if cat.len() > bounds.max_indecs {
            return Err(Error::SearchSpace(format!("catalog has {} indecomposables, bound is {}", cat.len(), bounds.max_indecs)));
        }
        return Ok((cat, true));
    }
    let cat = IndecCatalog::build(q, field, bounds)?;
    fs::create_dir_all(dir)?;
    // write then rename so a concurrent reader never sees a partial file
    let tmp = path.with_extension(format!("json.{}.tmp", std::process::id()));
    fs::write(&tmp, to_json(&cat)?)?;
    fs::rename(&tmp, &path)?;
    Ok((cat, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let q = Quiver::preset("A3").unwrap();
        let (a, hit) = load_or_build(Some(dir.path()), &q, Field::F2, CatalogBounds::default()).unwrap();
        assert!(!hit);
        assert!(cache_path(dir.path(), &q, Field::F2).exists());
        let (b, hit) = load_or_build(Some(dir.path()), &q, Field::F2, CatalogBounds::default()).unwrap();
        assert!(hit);
        assert_eq!(a.indecs(), b.indecs());
        assert_eq!((0..a.len()).map(|i| a.label(i)).collect::<Vec<_>>(), (0..b.len()).map(|i| b.label(i)).collect::<Vec<_>>());
        assert_eq!(a.quiver().paths(0, 2), b.quiver().paths(0, 2));
    }

    #[test]
    fn rejects_mismatch_and_garbage() {
        let q = Quiver::preset("A2").unwrap();
        let cat = IndecCatalog::build(&q, Field::F2, CatalogBounds::default()).unwrap();
        let text = to_json(&cat).unwrap();
        assert!(from_json(&text, &Quiver::preset("A3").unwrap(), Field::F2).is_err());
        assert!(from_json(&text, &q, Field::new(3).unwrap()).is_err());
        assert!(matches!(from_json("{", &q, Field::F2), Err(Error::Cache(_))));
    }

    #[test]
    fn corrupt_file_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let q = Quiver::preset("A2").unwrap();
        fs::write(cache_path(dir.path(), &q, Field::F2), "not json").unwrap();
        let (c, hit) = load_or_build(Some(dir.path()), &q, Field::F2, CatalogBounds::default()).unwrap();
        assert!(!hit);
        assert_eq!(c.len(), 3);
        let (_, hit) = load_or_build(Some(dir.path()), &q, Field::F2, CatalogBounds::default()).unwrap();
        assert!(hit);
    }
}

use std::path::Path;

use thiserror::Error;

use crate::gridworld::{load_map, LoadedMap, MapParseError};

/// The maps shipped with the crate, by name.
pub const BUNDLED_MAPS: &[(&str, &str)] = &[
    ("maze", include_str!("../../../../maps/maze.txt")),
    ("office", include_str!("../../../../maps/office.txt")),
    ("indoor1", include_str!("../../../../maps/indoor1.txt")),
    ("indoor2", include_str!("../../../../maps/indoor2.txt")),
];

pub fn bundled_map_names() -> impl Iterator<Item = &'static str> {
    BUNDLED_MAPS.iter().map(|(n, _)| *n)
}

pub fn bundled_map_text(name: &str) -> Option<&'static str> {
    BUNDLED_MAPS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("cannot read map file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("map {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: MapParseError,
    },
}

/// A map ready to explore, with the label used in reports.
#[derive(Clone, Debug)]
pub struct NamedMap {
    pub name: String,
    pub map: LoadedMap,
}

/// Loads `spec` as a file path when it exists, or as a bundled map name when
/// it is a bare name (no separator or extension) matching one.
pub fn resolve_map(spec: &str, resolution: f64) -> Result<NamedMap, MapError> {
    let path = Path::new(spec);
    let bare = !spec.contains(['/', '\\', '.']);
    let (name, text) = match (path.exists(), bare.then(|| bundled_map_text(spec)).flatten()) {
        (false, Some(text)) => (spec.to_string(), text.to_string()),
        _ => {
            let text = std::fs::read_to_string(path).map_err(|source| MapError::Io {
                path: spec.to_string(),
                source,
            })?;
            let name = path.file_stem().map_or(spec.to_string(), |s| s.to_string_lossy().into_owned());
            (name, text)
        }
    };
    let map = load_map(&text, resolution).map_err(|source| MapError::Parse {
        path: spec.to_string(),
        source,
    })?;
    Ok(NamedMap { name, map })
}

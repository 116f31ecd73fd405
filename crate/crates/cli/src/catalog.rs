//! Built-in problems and problem loading.

use std::path::Path;

use crate::problem::{ProblemErrors, ProblemSpec};

const ENTRIES: [(&str, &str); 5] = [
    ("yukawa", include_str!("../catalog/yukawa.aim")),
    ("ecsc", include_str!("../catalog/ecsc.aim")),
    ("sextic", include_str!("../catalog/sextic.aim")),
    ("qnm", include_str!("../catalog/qnm.aim")),
    ("harmonic", include_str!("../catalog/harmonic.aim")),
];

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("'{0}' is neither a catalog problem ({names}) nor a readable file: {1}", names = names().join(", "))]
    NotFound(String, std::io::Error),
    #[error("{origin}:\n{errors}")]
    Invalid { origin: String, errors: ProblemErrors },
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

/// File text of a catalog entry.
pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load_problem(path: &Path) -> Result<ProblemSpec, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::NotFound(path.display().to_string(), e))?;
    ProblemSpec::parse(&text).map_err(|errors| LoadError::Invalid {
        origin: path.display().to_string(),
        errors,
    })
}

/// A catalog name, or else a path to a problem file.
pub fn load(name_or_path: &str) -> Result<ProblemSpec, LoadError> {
    match source(name_or_path) {
        Some(text) => ProblemSpec::parse(text).map_err(|errors| LoadError::Invalid {
            origin: format!("catalog entry {name_or_path}"),
            errors,
        }),
        None => load_problem(Path::new(name_or_path)),
    }
}

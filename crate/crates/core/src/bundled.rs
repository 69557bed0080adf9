//! The example structures shipped with the library.

use crate::error::{Error, Result};
use crate::input::{parse_document, InputDocument};

/// `(name, file contents)` for every bundled structure.
pub const CORPUS: &[(&str, &str)] = &[
    ("free_symplectic_plane", include_str!("../data/free_symplectic_plane.pois")),
    ("quadratic_plane", include_str!("../data/quadratic_plane.pois")),
    ("so3_free", include_str!("../data/so3_free.pois")),
    ("sphere_so3", include_str!("../data/sphere_so3.pois")),
    ("zero_structure", include_str!("../data/zero_structure.pois")),
    ("corrupted_so3", include_str!("../data/corrupted_so3.pois")),
    ("free_xyz", include_str!("../data/free_xyz.pois")),
];

/// The four structures with a nonzero valid bracket.
pub const NONZERO_POISSON: &[&str] = &["free_symplectic_plane", "quadratic_plane", "so3_free", "sphere_so3"];

pub fn source(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".pois").unwrap_or(name);
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<InputDocument> {
    let text = source(name).ok_or_else(|| Error::InvalidPresentation(format!("no bundled structure `{name}`")))?;
    parse_document(text)
}

//! JSON document formats for prototile sets.
//!
//! ```json
//! {
//!   "version": 1,
//!   "prototiles": [
//!     { "name": "R", "offsets": [0] },
//!     { "name": "B", "broken_word": "B _ B" },
//!     { "name": "X", "runs": [[0, 2], [3, 1]] }
//!   ]
//! }
//! ```
//!
//! `offsets` may be a list of integers (normalized to minimum 0) or a list
//! of `[start, length]` runs. Written documents always use `runs`, list the
//! tiles in canonical order, and re-read to an identical set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prototile::{Prototile, PrototileError, PrototileSet, Run};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("prototile `{name}` must give exactly one of offsets, runs, broken_word")]
    Shape { name: String },
    #[error(transparent)]
    Prototile(#[from] PrototileError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum OffsetsField {
    Cells(Vec<i64>),
    Runs(Vec<[u64; 2]>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PrototileEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<OffsetsField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<Vec<[u64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub broken_word: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PrototileSetDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    pub prototiles: Vec<PrototileEntry>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

fn runs_of(pairs: &[[u64; 2]]) -> impl Iterator<Item = Run> + '_ {
    pairs.iter().map(|&[start, len]| Run { start, len })
}

impl PrototileEntry {
    pub fn to_prototile(&self) -> Result<Prototile, FormatError> {
        let name = self.name.clone();
        match (&self.offsets, &self.runs, &self.broken_word) {
            (Some(OffsetsField::Cells(cells)), None, None) => Ok(Prototile::normalize(name, cells)?),
            (Some(OffsetsField::Runs(runs)), None, None) | (None, Some(runs), None) => {
                Ok(Prototile::from_runs(name, runs_of(runs))?)
            }
            (None, None, Some(word)) => Ok(Prototile::parse_broken_word(word, name)?),
            _ => Err(FormatError::Shape { name }),
        }
    }

    pub fn from_prototile(p: &Prototile) -> Self {
        PrototileEntry {
            name: p.color().to_string(),
            offsets: None,
            runs: Some(p.runs().iter().map(|r| [r.start, r.len]).collect()),
            broken_word: None,
        }
    }
}

impl PrototileSetDoc {
    pub fn to_set(&self) -> Result<PrototileSet, FormatError> {
        if self.version != FORMAT_VERSION {
            return Err(FormatError::Version(self.version));
        }
        let tiles = self
            .prototiles
            .iter()
            .map(PrototileEntry::to_prototile)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PrototileSet::new(tiles)?)
    }

    pub fn from_set(ps: &PrototileSet) -> Self {
        PrototileSetDoc {
            version: FORMAT_VERSION,
            prototiles: ps.tiles().iter().map(PrototileEntry::from_prototile).collect(),
        }
    }
}

pub fn parse_prototile_set(text: &str) -> Result<PrototileSet, FormatError> {
    let doc: PrototileSetDoc = serde_json::from_str(text)?;
    doc.to_set()
}

pub fn write_prototile_set(ps: &PrototileSet) -> String {
    let mut s = serde_json::to_string_pretty(&PrototileSetDoc::from_set(ps))
        .expect("prototile documents always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_shape_forms() {
        let text = r#"{
            "version": 1,
            "prototiles": [
                {"name": "B", "broken_word": "B _ B"},
                {"name": "R", "offsets": [5]},
                {"name": "X", "offsets": [[0, 2], [3, 1]]},
                {"name": "Y", "runs": [[0, 1], [3, 1]]}
            ]
        }"#;
        let ps = parse_prototile_set(text).unwrap();
        assert_eq!(ps.colors(), vec!["R", "B", "X", "Y"]);
        let x = ps.get(ps.index_of("X").unwrap()).unwrap();
        assert_eq!(x.offsets().collect::<Vec<_>>(), vec![0, 1, 3]);
    }

    #[test]
    fn rejects_ambiguous_and_bad_input() {
        let both = r#"{"prototiles": [{"name": "a", "offsets": [0], "broken_word": "a"}]}"#;
        assert!(matches!(parse_prototile_set(both), Err(FormatError::Shape { .. })));
        let none = r#"{"prototiles": [{"name": "a"}]}"#;
        assert!(matches!(parse_prototile_set(none), Err(FormatError::Shape { .. })));
        let version = r#"{"version": 7, "prototiles": [{"name": "a", "offsets": [0]}]}"#;
        assert!(matches!(parse_prototile_set(version), Err(FormatError::Version(7))));
        let bad_word = r#"{"prototiles": [{"name": "a", "broken_word": "_a"}]}"#;
        assert!(matches!(parse_prototile_set(bad_word), Err(FormatError::Prototile(_))));
        assert!(matches!(parse_prototile_set("{"), Err(FormatError::Json(_))));
    }

    proptest! {
        #[test]
        fn write_then_read_is_exact(shapes in proptest::collection::vec(
            proptest::collection::btree_set(1u64..40, 0..8), 1..5)) {
            let tiles: Vec<Prototile> = shapes.iter().enumerate().map(|(i, s)| {
                let mut offs = vec![0];
                offs.extend(s.iter().copied());
                Prototile::from_offsets(format!("t{i}"), offs).unwrap()
            }).collect();
            let ps = PrototileSet::new(tiles).unwrap();
            let text = write_prototile_set(&ps);
            let back = parse_prototile_set(&text).unwrap();
            prop_assert_eq!(&back, &ps);
            prop_assert_eq!(write_prototile_set(&back), text);
        }
    }
}

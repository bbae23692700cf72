//! Prototiles and prototile sets.
//!
//! A prototile is a finite set of nonnegative integers with minimum 0. It is
//! stored as maximal solid runs, so that a compiled rack whose span is in the
//! thousands still takes only a handful of words.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrototileError {
    #[error("prototile `{color}` has no cells")]
    Empty { color: String },
    #[error("broken word for `{color}` is empty")]
    EmptyWord { color: String },
    #[error("broken word for `{color}` starts with a blank")]
    LeadingBlank { color: String },
    #[error("broken word for `{color}` ends with a blank")]
    TrailingBlank { color: String },
    #[error("broken word for `{color}`: unexpected character {ch:?} at column {column}")]
    UnknownChar { color: String, ch: char, column: usize },
    #[error("offsets of `{color}` must be strictly increasing and start at 0")]
    BadOffsets { color: String },
    #[error("runs of `{color}` must be nonempty, ordered and non-overlapping, starting at 0")]
    BadRuns { color: String },
    #[error("prototile set is empty")]
    EmptySet,
    #[error("duplicate prototile color `{0}`")]
    DuplicateColor(String),
}

/// A maximal block of consecutive solid cells: `start, start+1, .., start+len-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Run {
    pub start: u64,
    pub len: u64,
}

impl Run {
    pub fn end(&self) -> u64 {
        self.start + self.len
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prototile {
    color: String,
    runs: Vec<Run>,
    cells: u64,
}

impl Prototile {
    /// Builds a prototile from strictly increasing offsets starting at 0.
    pub fn from_offsets<I>(color: impl Into<String>, offsets: I) -> Result<Self, PrototileError>
    where
        I: IntoIterator<Item = u64>,
    {
        let color = color.into();
        let mut runs: Vec<Run> = Vec::new();
        let mut prev: Option<u64> = None;
        for o in offsets {
            match prev {
                None if o != 0 => return Err(PrototileError::BadOffsets { color }),
                Some(p) if o <= p => return Err(PrototileError::BadOffsets { color }),
                _ => {}
            }
            match runs.last_mut() {
                Some(r) if r.end() == o => r.len += 1,
                _ => runs.push(Run { start: o, len: 1 }),
            }
            prev = Some(o);
        }
        if runs.is_empty() {
            return Err(PrototileError::Empty { color });
        }
        Ok(Self::from_canonical_runs(color, runs))
    }

    /// Builds a prototile from solid runs. Touching runs are merged.
    pub fn from_runs<I>(color: impl Into<String>, runs: I) -> Result<Self, PrototileError>
    where
        I: IntoIterator<Item = Run>,
    {
        let color = color.into();
        let mut merged: Vec<Run> = Vec::new();
        for r in runs {
            if r.len == 0 {
                return Err(PrototileError::BadRuns { color });
            }
            match merged.last_mut() {
                None if r.start != 0 => return Err(PrototileError::BadRuns { color }),
                Some(last) if r.start < last.end() => {
                    return Err(PrototileError::BadRuns { color })
                }
                Some(last) if r.start == last.end() => last.len += r.len,
                _ => merged.push(r),
            }
        }
        if merged.is_empty() {
            return Err(PrototileError::Empty { color });
        }
        Ok(Self::from_canonical_runs(color, merged))
    }

    fn from_canonical_runs(color: String, runs: Vec<Run>) -> Self {
        let cells = runs.iter().map(|r| r.len).sum();
        Prototile { color, runs, cells }
    }

    /// Translates an arbitrary finite integer set so its minimum is 0.
    pub fn normalize(color: impl Into<String>, raw: &[i64]) -> Result<Self, PrototileError> {
        let color = color.into();
        let Some(&min) = raw.iter().min() else {
            return Err(PrototileError::Empty { color });
        };
        let mut offsets: Vec<u64> = raw.iter().map(|&x| (x as i128 - min as i128) as u64).collect();
        offsets.sort_unstable();
        offsets.dedup();
        Self::from_offsets(color, offsets)
    }

    /// Parses broken-word notation such as `B _ B` or `BB _ B`.
    ///
    /// Alphanumeric characters are solid cells, `_` is a blank, whitespace
    /// separates nothing and is ignored.
    pub fn parse_broken_word(text: &str, color: impl Into<String>) -> Result<Self, PrototileError> {
        let color = color.into();
        let mut offsets = Vec::new();
        let mut pos = 0u64;
        let mut first: Option<bool> = None;
        let mut last_solid = false;
        for (column, ch) in text.chars().enumerate() {
            let solid = match ch {
                c if c.is_whitespace() => continue,
                '_' => false,
                c if c.is_alphanumeric() => true,
                _ => {
                    return Err(PrototileError::UnknownChar {
                        color,
                        ch,
                        column: column + 1,
                    })
                }
            };
            if first.is_none() {
                if !solid {
                    return Err(PrototileError::LeadingBlank { color });
                }
                first = Some(true);
            }
            if solid {
                offsets.push(pos);
            }
            last_solid = solid;
            pos += 1;
        }
        if first.is_none() {
            return Err(PrototileError::EmptyWord { color });
        }
        if !last_solid {
            return Err(PrototileError::TrailingBlank { color });
        }
        Self::from_offsets(color, offsets)
    }

    /// Renders the tile as a broken word, one space-separated marker per cell.
    ///
    /// The solid marker is the first alphanumeric character of the color
    /// name, falling back to `a`.
    pub fn render_broken_word(&self) -> String {
        let marker = self
            .color
            .chars()
            .find(|c| c.is_alphanumeric())
            .unwrap_or('a');
        let mut out = String::new();
        let mut pos = 0;
        for run in &self.runs {
            while pos < run.start {
                out.push_str("_ ");
                pos += 1;
            }
            for _ in 0..run.len {
                out.push(marker);
                out.push(' ');
            }
            pos = run.end();
        }
        out.pop();
        out
    }

    pub fn color(&self) -> &str {
        &self.color
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn offsets(&self) -> impl Iterator<Item = u64> + '_ {
        self.runs.iter().flat_map(|r| r.start..r.end())
    }

    /// Number of cells, the paper-style `ℓ_k`.
    pub fn cell_count(&self) -> u64 {
        self.cells
    }

    /// Largest offset plus one.
    pub fn span(&self) -> u64 {
        self.runs.last().map_or(0, Run::end)
    }

    /// Offset of the element with 0-based index `idx`.
    pub fn offset(&self, mut idx: u64) -> Option<u64> {
        for r in &self.runs {
            if idx < r.len {
                return Some(r.start + idx);
            }
            idx -= r.len;
        }
        None
    }

    /// 0-based element index of `offset`, if it is a cell of the tile.
    pub fn element_index(&self, offset: u64) -> Option<u64> {
        let i = self.runs.partition_point(|r| r.end() <= offset);
        let run = self.runs.get(i)?;
        if offset < run.start {
            return None;
        }
        let before: u64 = self.runs[..i].iter().map(|r| r.len).sum();
        Some(before + offset - run.start)
    }

    pub fn contains(&self, offset: u64) -> bool {
        let i = self.runs.partition_point(|r| r.end() <= offset);
        self.runs.get(i).is_some_and(|r| offset >= r.start)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.span()
            .cmp(&other.span())
            .then_with(|| self.offsets().cmp(other.offsets()))
            .then_with(|| self.color.cmp(&other.color))
    }
}

impl fmt::Display for Prototile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.color, self.render_broken_word())
    }
}

/// An ordered collection of prototiles with pairwise distinct colors.
///
/// Tiles are kept in canonical order (span, then offsets, then color), so
/// tile indices do not depend on input order. Equal shapes under distinct
/// colors are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrototileSet {
    tiles: Vec<Prototile>,
}

impl PrototileSet {
    pub fn new(mut tiles: Vec<Prototile>) -> Result<Self, PrototileError> {
        if tiles.is_empty() {
            return Err(PrototileError::EmptySet);
        }
        let mut seen = HashSet::new();
        for t in &tiles {
            if !seen.insert(t.color.as_str()) {
                return Err(PrototileError::DuplicateColor(t.color.clone()));
            }
        }
        tiles.sort_by(Prototile::canonical_cmp);
        Ok(PrototileSet { tiles })
    }

    /// Convenience constructor from `(color, broken word)` pairs.
    pub fn from_broken_words(words: &[(&str, &str)]) -> Result<Self, PrototileError> {
        let tiles = words
            .iter()
            .map(|(color, word)| Prototile::parse_broken_word(word, *color))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(tiles)
    }

    pub fn tiles(&self) -> &[Prototile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn get(&self, idx: usize) -> Option<&Prototile> {
        self.tiles.get(idx)
    }

    pub fn index_of(&self, color: &str) -> Option<usize> {
        self.tiles.iter().position(|t| t.color == color)
    }

    pub fn colors(&self) -> Vec<String> {
        self.tiles.iter().map(|t| t.color.clone()).collect()
    }

    /// `L`, the length of a longest prototile.
    pub fn longest_length(&self) -> u64 {
        self.tiles.iter().map(Prototile::span).max().unwrap_or(0)
    }

    /// Size of the subscripted alphabet, `Σ ℓ_k`.
    pub fn subscripted_alphabet_size(&self) -> u64 {
        self.tiles.iter().map(Prototile::cell_count).sum()
    }
}

/// Free-function form of [`PrototileSet::longest_length`].
pub fn longest_length(ps: &PrototileSet) -> u64 {
    ps.longest_length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn offs(p: &Prototile) -> Vec<u64> {
        p.offsets().collect()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(offs(&Prototile::parse_broken_word("B _ B", "B").unwrap()), vec![0, 2]);
        assert_eq!(offs(&Prototile::parse_broken_word("R", "R").unwrap()), vec![0]);
        assert_eq!(
            offs(&Prototile::parse_broken_word("BB _ B", "B").unwrap()),
            vec![0, 1, 3]
        );
        assert_eq!(
            offs(&Prototile::parse_broken_word("Y__Y", "Y").unwrap()),
            vec![0, 3]
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Prototile::parse_broken_word("  ", "x"),
            Err(PrototileError::EmptyWord { .. })
        ));
        assert!(matches!(
            Prototile::parse_broken_word("_ a", "x"),
            Err(PrototileError::LeadingBlank { .. })
        ));
        assert!(matches!(
            Prototile::parse_broken_word("a _", "x"),
            Err(PrototileError::TrailingBlank { .. })
        ));
        assert_eq!(
            Prototile::parse_broken_word("a * a", "x"),
            Err(PrototileError::UnknownChar {
                color: "x".into(),
                ch: '*',
                column: 3
            })
        );
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(offs(&Prototile::normalize("t", &[3, 4, 6]).unwrap()), vec![0, 1, 3]);
        assert_eq!(offs(&Prototile::normalize("t", &[0]).unwrap()), vec![0]);
        assert_eq!(offs(&Prototile::normalize("t", &[-2, 1]).unwrap()), vec![0, 3]);
        assert!(matches!(
            Prototile::normalize("t", &[]),
            Err(PrototileError::Empty { .. })
        ));
    }

    #[test]
    fn render_examples() {
        let p = Prototile::from_offsets("B", [0, 2]).unwrap();
        assert_eq!(p.render_broken_word(), "B _ B");
        assert_eq!(Prototile::from_offsets("R", [0]).unwrap().render_broken_word(), "R");
        let barbell = Prototile::from_offsets("barbell:0", [0, 1, 3, 4]).unwrap();
        assert_eq!(barbell.render_broken_word(), "b b _ b b");
        let plain = Prototile::from_offsets(":", [0, 1, 3, 4]).unwrap();
        assert_eq!(plain.render_broken_word(), "a a _ a a");
    }

    #[test]
    fn longest_length_examples() {
        let even = PrototileSet::from_broken_words(&[("R", "R"), ("B", "BB")]).unwrap();
        assert_eq!(longest_length(&even), 2);
        let ex2 = PrototileSet::from_broken_words(&[("R", "R"), ("B", "B _ B")]).unwrap();
        assert_eq!(ex2.longest_length(), 3);
        let single = PrototileSet::new(vec![Prototile::from_offsets("a", [0]).unwrap()]).unwrap();
        assert_eq!(single.longest_length(), 1);
        assert_eq!(PrototileSet::new(vec![]), Err(PrototileError::EmptySet));
    }

    #[test]
    fn set_is_canonically_ordered_and_allows_equal_shapes() {
        let ps = PrototileSet::from_broken_words(&[("Y", "Y__Y"), ("B", "BB_B"), ("R", "R"), ("S", "S")])
            .unwrap();
        assert_eq!(ps.colors(), vec!["R", "S", "B", "Y"]);
        assert!(matches!(
            PrototileSet::from_broken_words(&[("R", "R"), ("R", "RR")]),
            Err(PrototileError::DuplicateColor(_))
        ));
    }

    #[test]
    fn element_lookup() {
        let p = Prototile::from_offsets("x", [0, 1, 3, 7, 8]).unwrap();
        assert_eq!(p.cell_count(), 5);
        assert_eq!(p.span(), 9);
        for (i, o) in p.offsets().enumerate() {
            assert_eq!(p.offset(i as u64), Some(o));
            assert_eq!(p.element_index(o), Some(i as u64));
        }
        assert_eq!(p.element_index(2), None);
        assert_eq!(p.element_index(9), None);
        assert!(!p.contains(5));
        assert_eq!(p.offset(5), None);
    }

    #[test]
    fn runs_merge_and_validate() {
        let p = Prototile::from_runs(
            "x",
            [Run { start: 0, len: 2 }, Run { start: 2, len: 1 }, Run { start: 5, len: 1 }],
        )
        .unwrap();
        assert_eq!(p.runs().len(), 2);
        assert!(Prototile::from_runs("x", [Run { start: 1, len: 1 }]).is_err());
        assert!(Prototile::from_runs("x", [Run { start: 0, len: 3 }, Run { start: 2, len: 1 }]).is_err());
        assert!(Prototile::from_offsets("x", [0, 2, 2]).is_err());
    }

    fn offset_set() -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::btree_set(1u64..60, 0..20).prop_map(|s| {
            let mut v = vec![0];
            v.extend(s);
            v
        })
    }

    proptest! {
        #[test]
        fn broken_word_roundtrip(offsets in offset_set()) {
            let p = Prototile::from_offsets("t", offsets.clone()).unwrap();
            let back = Prototile::parse_broken_word(&p.render_broken_word(), "t").unwrap();
            prop_assert_eq!(offs(&back), offsets);
        }

        #[test]
        fn runs_roundtrip(offsets in offset_set()) {
            let p = Prototile::from_offsets("t", offsets.clone()).unwrap();
            let q = Prototile::from_runs("t", p.runs().iter().copied()).unwrap();
            prop_assert_eq!(&q, &p);
            prop_assert_eq!(offs(&q), offsets);
        }

        #[test]
        fn normalize_idempotent(raw in proptest::collection::vec(-50i64..50, 1..12)) {
            let once = Prototile::normalize("t", &raw).unwrap();
            let as_i64: Vec<i64> = once.offsets().map(|o| o as i64).collect();
            let twice = Prototile::normalize("t", &as_i64).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}

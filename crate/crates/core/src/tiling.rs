//! Concrete tilings: lists of tile placements over a finite window or a period.

use std::collections::HashMap;

use thiserror::Error;

use crate::prototile::PrototileSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub position: i64,
    pub tile: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TilingScope {
    /// Every cell of `lo..=hi` is covered exactly once; tiles may protrude.
    Window { lo: i64, hi: i64 },
    /// The placements repeat with this period; all of `Z` is covered.
    Period(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tiling {
    pub placements: Vec<Placement>,
    pub scope: TilingScope,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("placement refers to unknown tile {0}")]
    UnknownTile(usize),
    #[error("cell {cell} covered twice")]
    Overlap { cell: i64 },
    #[error("cell {cell} not covered")]
    Gap { cell: i64 },
    #[error("period must be positive")]
    ZeroPeriod,
}

impl Tiling {
    /// Checks the exact-cover property within the tiling's scope.
    ///
    /// For a periodic tiling, placements are taken modulo the period and a
    /// tile whose cells collide modulo the period is an overlap.
    pub fn validate(&self, ps: &PrototileSet) -> Result<(), TilingError> {
        let mut cover: HashMap<i64, usize> = HashMap::new();
        let reduce = |c: i64| match self.scope {
            TilingScope::Period(p) => c.rem_euclid(p as i64),
            TilingScope::Window { .. } => c,
        };
        if self.scope == TilingScope::Period(0) {
            return Err(TilingError::ZeroPeriod);
        }
        for pl in &self.placements {
            let tile = ps.get(pl.tile).ok_or(TilingError::UnknownTile(pl.tile))?;
            for o in tile.offsets() {
                let cell = reduce(pl.position + o as i64);
                if let TilingScope::Window { lo, hi } = self.scope {
                    if cell < lo || cell > hi {
                        continue;
                    }
                }
                if cover.insert(cell, pl.tile).is_some() {
                    return Err(TilingError::Overlap { cell });
                }
            }
        }
        let (lo, hi) = match self.scope {
            TilingScope::Window { lo, hi } => (lo, hi),
            TilingScope::Period(p) => (0, p as i64 - 1),
        };
        for cell in lo..=hi {
            if !cover.contains_key(&cell) {
                return Err(TilingError::Gap { cell });
            }
        }
        Ok(())
    }

    /// Color (tile index) of each cell in scope, in cell order.
    pub fn colors(&self, ps: &PrototileSet) -> Result<Vec<usize>, TilingError> {
        self.validate(ps)?;
        let (lo, hi) = match self.scope {
            TilingScope::Window { lo, hi } => (lo, hi),
            TilingScope::Period(p) => (0, p as i64 - 1),
        };
        let mut out = vec![usize::MAX; (hi - lo + 1) as usize];
        for pl in &self.placements {
            for o in ps.tiles()[pl.tile].offsets() {
                let mut cell = pl.position + o as i64;
                if let TilingScope::Period(p) = self.scope {
                    cell = cell.rem_euclid(p as i64);
                }
                if (lo..=hi).contains(&cell) {
                    out[(cell - lo) as usize] = pl.tile;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even() -> PrototileSet {
        PrototileSet::from_broken_words(&[("R", "R"), ("B", "BB")]).unwrap()
    }

    #[test]
    fn periodic_rbb() {
        // R at 0, BB at 1.
        let t = Tiling {
            placements: vec![Placement { position: 0, tile: 0 }, Placement { position: 1, tile: 1 }],
            scope: TilingScope::Period(3),
        };
        assert_eq!(t.colors(&even()).unwrap(), vec![0, 1, 1]);
        let bad = Tiling {
            placements: vec![Placement { position: 0, tile: 1 }],
            scope: TilingScope::Period(3),
        };
        assert_eq!(bad.validate(&even()), Err(TilingError::Gap { cell: 2 }));
        let wrap = Tiling {
            placements: vec![Placement { position: 0, tile: 1 }],
            scope: TilingScope::Period(1),
        };
        assert_eq!(wrap.validate(&even()), Err(TilingError::Overlap { cell: 0 }));
    }

    #[test]
    fn window_allows_protrusion() {
        let t = Tiling {
            placements: vec![Placement { position: -1, tile: 1 }, Placement { position: 1, tile: 1 }],
            scope: TilingScope::Window { lo: 0, hi: 1 },
        };
        assert!(t.validate(&even()).is_ok());
        assert_eq!(t.colors(&even()).unwrap(), vec![1, 1]);
    }
}

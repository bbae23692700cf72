//! The tiling system `T(P)` as a sofic shift.
//!
//! Dropping subscripts from the edge labels of the subscripted automaton
//! gives a labeled graph presenting `T(P)`. The subset construction turns it
//! into a right-resolving presentation, on which entropy and periodic points
//! are computed.

mod determinize;
mod periodic;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automaton::{
    AutomatonDoc, EdgeDoc, Metadata, StateDoc, TilingAutomaton,
};

pub use determinize::{
    determinize, determinize_with, renewal_presentation, renewal_presentation_chars,
    DeterminizeOptions, DeterministicPresentation,
};
pub use periodic::{count_periodic, count_periodic_with, least_period_counts, PeriodicOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SoficError {
    #[error("a renewal system needs at least one generator")]
    NoGenerators,
    #[error("renewal generators must be nonempty words")]
    EmptyGenerator,
    #[error("subset construction exceeded {limit} states")]
    StateBudget { limit: usize },
    #[error("periodic-point count exceeded {limit} distinct partial maps")]
    MapBudget { limit: usize },
}

/// A labeled graph over a color alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPresentation {
    colors: Vec<String>,
    state_count: usize,
    /// `(from, color, to)`, sorted.
    edges: Vec<(u32, u32, u32)>,
    out_start: Vec<usize>,
}

impl LabeledPresentation {
    /// Edges are `(from, color, to)` with `color` indexing `colors`.
    pub fn new(colors: Vec<String>, state_count: usize, mut edges: Vec<(u32, u32, u32)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut out_start = vec![0usize; state_count + 1];
        for e in &edges {
            out_start[e.0 as usize + 1] += 1;
        }
        for i in 0..state_count {
            out_start[i + 1] += out_start[i];
        }
        LabeledPresentation {
            colors,
            state_count,
            edges,
            out_start,
        }
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn edges(&self) -> &[(u32, u32, u32)] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.state_count == 0
    }

    pub fn outgoing(&self, q: u32) -> &[(u32, u32, u32)] {
        &self.edges[self.out_start[q as usize]..self.out_start[q as usize + 1]]
    }

    /// Words of length `<= max_len` labeling some path, shortest first then
    /// by color index. Paths of a pruned presentation extend both ways, so
    /// these are exactly the factors of the presented shift.
    pub fn language_up_to(&self, max_len: usize) -> Vec<Vec<u32>> {
        let all: Vec<u32> = (0..self.state_count as u32).collect();
        language_by_images(self.colors.len(), all, max_len, |set, c| {
            let mut next: Vec<u32> = set
                .iter()
                .flat_map(|&q| self.outgoing(q).iter().filter(move |e| e.1 == c).map(|e| e.2))
                .collect();
            next.sort_unstable();
            next.dedup();
            next
        })
    }

    pub fn to_doc(&self) -> AutomatonDoc {
        AutomatonDoc {
            version: 1,
            kind: "sofic".into(),
            metadata: Metadata {
                k: self.colors.len(),
                l: 0,
                state_count: self.state_count,
                edge_count: self.edges.len(),
            },
            alphabet: self.colors.clone(),
            states: (0..self.state_count as u32)
                .map(|id| StateDoc {
                    id,
                    active: None,
                    subset: None,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(from, c, to)| EdgeDoc {
                    from,
                    to,
                    label: vec![c],
                })
                .collect(),
        }
    }
}

/// Replaces each label `(k, ℓ)` by the color `k`.
pub fn drop_subscripts(ta: &TilingAutomaton) -> LabeledPresentation {
    let edges = ta
        .edges()
        .iter()
        .map(|e| (e.from, e.label.tile, e.to))
        .collect();
    LabeledPresentation::new(ta.prototiles().colors(), ta.state_count(), edges)
}

/// Breadth-first enumeration of words whose image of the full state set is
/// nonempty.
pub(crate) fn language_by_images<F>(colors: usize, all: Vec<u32>, max_len: usize, step: F) -> Vec<Vec<u32>>
where
    F: Fn(&[u32], u32) -> Vec<u32>,
{
    if all.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    let mut layer: Vec<(Vec<u32>, Vec<u32>)> = vec![(Vec::new(), all)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, set) in &layer {
            for c in 0..colors as u32 {
                let image = step(set, c);
                if !image.is_empty() {
                    let mut w = word.clone();
                    w.push(c);
                    next.push((w, image));
                }
            }
        }
        out.extend(next.iter().map(|(w, _)| w.clone()));
        layer = next;
    }
    out
}

/// Renders a word over `colors`, concatenating single-character names and
/// space-separating longer ones.
pub fn render_word(colors: &[String], word: &[u32]) -> String {
    let sep = if colors.iter().all(|c| c.chars().count() == 1) {
        ""
    } else {
        " "
    };
    word.iter()
        .map(|&c| colors[c as usize].as_str())
        .collect::<Vec<_>>()
        .join(sep)
}

/// A language as a set of rendered words, for comparing presentations whose
/// color indices differ.
pub fn rendered_language(colors: &[String], words: &[Vec<u32>]) -> BTreeSet<String> {
    words.iter().map(|w| render_word(colors, w)).collect()
}

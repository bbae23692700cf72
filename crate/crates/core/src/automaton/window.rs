//! Finite-window tilings and the extensional check of the finite-type
//! property on periodic sequences.

use std::collections::HashSet;

use crate::exec::Exec;
use crate::prototile::PrototileSet;
use crate::tiling::{Placement, Tiling, TilingScope};

use super::{EngineError, Symbol, TilingAutomaton};

pub const DEFAULT_PERIOD_BOUND: usize = 12;

/// All ways to cover cells `0..w` exactly once, tiles allowed to stick out on
/// either side.
///
/// Cells are filled left to right; at each first uncovered cell every
/// `(tile, element)` choice is tried in order, so the output order is fixed.
pub fn enumerate_window_tilings(ps: &PrototileSet, w: usize) -> Vec<Tiling> {
    let offsets: Vec<Vec<i64>> = ps
        .tiles()
        .iter()
        .map(|t| t.offsets().map(|o| o as i64).collect())
        .collect();
    let mut covered = vec![false; w];
    let mut placements = Vec::new();
    let mut out = Vec::new();
    fill(&offsets, 0, &mut covered, &mut placements, &mut out);
    out
}

fn fill(
    offsets: &[Vec<i64>],
    mut cell: usize,
    covered: &mut Vec<bool>,
    placements: &mut Vec<Placement>,
    out: &mut Vec<Tiling>,
) {
    let w = covered.len();
    while cell < w && covered[cell] {
        cell += 1;
    }
    if cell == w {
        out.push(Tiling {
            placements: placements.clone(),
            scope: TilingScope::Window {
                lo: 0,
                hi: w as i64 - 1,
            },
        });
        return;
    }
    for (tile, offs) in offsets.iter().enumerate() {
        for &o in offs {
            let start = cell as i64 - o;
            let inside: Vec<usize> = offs
                .iter()
                .map(|&q| start + q)
                .filter(|&c| c >= 0 && (c as usize) < w)
                .map(|c| c as usize)
                .collect();
            if inside.iter().any(|&c| covered[c]) {
                continue;
            }
            for &c in &inside {
                covered[c] = true;
            }
            placements.push(Placement {
                position: start,
                tile,
            });
            fill(offsets, cell + 1, covered, placements, out);
            placements.pop();
            for &c in &inside {
                covered[c] = false;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowVerdict {
    /// On every periodic sequence within the bound, window-locality and
    /// membership agree.
    Holds,
    /// A periodic sequence on which they disagree, one period shown.
    Counterexample {
        word: Vec<Symbol>,
        local: bool,
        member: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowCheck {
    pub window: usize,
    pub period_bound: usize,
    /// Periodic words (one per period length) whose windows all occur.
    pub local_words: u64,
    pub verdict: WindowVerdict,
}

/// Checks, on all periodic subscripted sequences of period at most
/// [`DEFAULT_PERIOD_BOUND`], that "every `window`-word occurs in the
/// subscripted system" is equivalent to membership.
pub fn check_window_theorem(ps: &PrototileSet, window: usize) -> Result<WindowCheck, EngineError> {
    let ta = TilingAutomaton::build(ps)?;
    Ok(check_window_theorem_with(&ta, window, DEFAULT_PERIOD_BOUND, Exec::default()))
}

/// Membership straight from the definition: whenever `x_i = (k, ℓ)`, every
/// other element `ℓ'` of tile `k` sits at `i + p_{k,ℓ'} - p_{k,ℓ}`.
fn member_by_definition(offsets: &[Vec<i64>], word: &[Symbol]) -> bool {
    let p = word.len() as i64;
    word.iter().enumerate().all(|(i, s)| {
        let offs = &offsets[s.tile as usize];
        let base = i as i64 - offs[s.elem as usize];
        offs.iter().enumerate().all(|(e, &o)| {
            let j = (base + o).rem_euclid(p) as usize;
            word[j]
                == Symbol {
                    tile: s.tile,
                    elem: e as u32,
                }
        })
    })
}

struct Search<'a> {
    alphabet: &'a [Symbol],
    factors: &'a HashSet<Vec<Symbol>>,
    offsets: &'a [Vec<i64>],
    window: usize,
    period: usize,
}

#[derive(Default)]
struct Tally {
    local: u64,
    local_members: u64,
    counterexample: Option<Vec<Symbol>>,
}

impl Search<'_> {
    fn run(&self, word: &mut Vec<Symbol>, tally: &mut Tally) {
        if tally.counterexample.is_some() {
            return;
        }
        if word.len() >= self.window && !self.factors.contains(&word[word.len() - self.window..]) {
            return;
        }
        if word.len() == self.period {
            let p = self.period;
            let local = (0..p).all(|i| {
                let w: Vec<Symbol> = (0..self.window).map(|t| word[(i + t) % p]).collect();
                self.factors.contains(&w)
            });
            if local {
                tally.local += 1;
                if member_by_definition(self.offsets, word) {
                    tally.local_members += 1;
                } else {
                    tally.counterexample = Some(word.clone());
                }
            }
            return;
        }
        for &a in self.alphabet {
            word.push(a);
            self.run(word, tally);
            word.pop();
        }
    }
}

pub fn check_window_theorem_with(
    ta: &TilingAutomaton,
    window: usize,
    period_bound: usize,
    exec: Exec,
) -> WindowCheck {
    let window = window.max(1);
    let alphabet = ta.alphabet();
    let factors = ta.factors(window);
    let offsets: Vec<Vec<i64>> = ta
        .prototiles()
        .tiles()
        .iter()
        .map(|t| t.offsets().map(|o| o as i64).collect())
        .collect();
    let mut local_words = 0;
    for period in 1..=period_bound {
        let search = Search {
            alphabet: &alphabet,
            factors: &factors,
            offsets: &offsets,
            window,
            period,
        };
        let branches = exec.map(&alphabet, |&first| {
            let mut tally = Tally::default();
            search.run(&mut vec![first], &mut tally);
            tally
        });
        let mut members = 0u64;
        for t in branches {
            local_words += t.local;
            members += t.local_members;
            if let Some(word) = t.counterexample {
                return WindowCheck {
                    window,
                    period_bound,
                    local_words,
                    verdict: WindowVerdict::Counterexample {
                        word,
                        local: true,
                        member: false,
                    },
                };
            }
        }
        // Every member is local, so the members found must be all of them.
        if num_bigint::BigUint::from(members) != ta.closed_walks(period) {
            let word = member_not_in(ta, period, &factors, window);
            return WindowCheck {
                window,
                period_bound,
                local_words,
                verdict: WindowVerdict::Counterexample {
                    word,
                    local: false,
                    member: true,
                },
            };
        }
    }
    WindowCheck {
        window,
        period_bound,
        local_words,
        verdict: WindowVerdict::Holds,
    }
}

fn member_not_in(ta: &TilingAutomaton, p: usize, factors: &HashSet<Vec<Symbol>>, window: usize) -> Vec<Symbol> {
    fn walk(ta: &TilingAutomaton, start: u32, q: u32, left: usize, word: &mut Vec<Symbol>, found: &mut Vec<Vec<Symbol>>) {
        if left == 0 {
            if q == start {
                found.push(word.clone());
            }
            return;
        }
        for e in ta.outgoing(q) {
            word.push(e.label);
            walk(ta, start, e.to, left - 1, word, found);
            word.pop();
        }
    }
    let mut found = Vec::new();
    for q in 0..ta.state_count() as u32 {
        walk(ta, q, q, p, &mut Vec::new(), &mut found);
    }
    found
        .into_iter()
        .find(|w| {
            !(0..p).all(|i| {
                let win: Vec<Symbol> = (0..window).map(|t| w[(i + t) % p]).collect();
                factors.contains(&win)
            })
        })
        .unwrap_or_default()
}

//! The subscripted tiling system as an edge shift.
//!
//! A state records which tiles started in the last `L-1` cells still have
//! cells ahead (their *ages*). Reading one cell either continues the unique
//! active tile covering it, or, if none covers it, starts a new tile there.
//! Past coverage is enforced by the transitions and never stored.
//!
//! Every state lying on a bi-infinite path is found by first running the
//! transition rule in a *relaxed* mode over `L-1` cells, where a cell may
//! also be covered by a tile whose earlier cells lie before the start of the
//! run. That yields every boundary that can occur in a tiling; the forward
//! closure is then pruned to the states that are both reachable from a cycle
//! and able to reach one.

mod export;
mod window;

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exec::Exec;
use crate::graph;
use crate::prototile::PrototileSet;
use crate::tiling::{Placement, Tiling, TilingScope};

pub use export::{AutomatonDoc, EdgeDoc, Metadata, StateDoc};
pub use window::{
    check_window_theorem, check_window_theorem_with, enumerate_window_tilings, WindowCheck,
    WindowVerdict, DEFAULT_PERIOD_BOUND,
};

/// Widest prototile the boundary encoding supports.
pub const MAX_SPAN: u64 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("prototile span {span} exceeds the engine limit {limit}")]
    SpanTooLarge { span: u64, limit: u64 },
    #[error("state budget of {limit} exceeded")]
    StateBudget { limit: usize },
    #[error("subscripted alphabet of {size} symbols exceeds the budget {limit}")]
    AlphabetBudget { size: u64, limit: u64 },
    #[error("unknown color `{0}`")]
    UnknownColor(String),
    #[error("work budget exceeded: {0}")]
    WorkBudget(String),
}

/// Resource limits for automaton construction and derived searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_states: usize,
    pub max_span: u64,
    pub max_alphabet: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 1_000_000,
            max_span: MAX_SPAN,
            max_alphabet: u64::MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    pub exec: Exec,
    pub budget: Budget,
}

/// A subscripted symbol: element `elem` (0-based) of tile `tile`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub tile: u32,
    pub elem: u32,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tile + 1, self.elem + 1)
    }
}

/// Active tiles as `(age, tile)` pairs, sorted by age.
///
/// A tile of age `s` started `s` cells before the next cell to be read and
/// still has an offset `>= s`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryState {
    active: Vec<(u32, u32)>,
}

impl BoundaryState {
    pub fn active(&self) -> &[(u32, u32)] {
        &self.active
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
    pub label: Symbol,
}

/// Precomputed per-tile data for the transition rule.
struct Engine {
    masks: Vec<u128>,
    offsets: Vec<Vec<u32>>,
    spans: Vec<u32>,
}

impl Engine {
    fn new(ps: &PrototileSet, budget: &Budget) -> Result<Self, EngineError> {
        let limit = budget.max_span.min(MAX_SPAN);
        let span = ps.longest_length();
        if span > limit {
            return Err(EngineError::SpanTooLarge { span, limit });
        }
        let size = ps.subscripted_alphabet_size();
        if size > budget.max_alphabet {
            return Err(EngineError::AlphabetBudget {
                size,
                limit: budget.max_alphabet,
            });
        }
        let offsets: Vec<Vec<u32>> = ps
            .tiles()
            .iter()
            .map(|t| t.offsets().map(|o| o as u32).collect())
            .collect();
        let masks = offsets
            .iter()
            .map(|offs| offs.iter().fold(0u128, |m, &o| m | (1u128 << o)))
            .collect();
        let spans = ps.tiles().iter().map(|t| t.span() as u32).collect();
        Ok(Engine {
            masks,
            offsets,
            spans,
        })
    }

    fn claims(&self, state: &BoundaryState) -> u128 {
        state
            .active
            .iter()
            .fold(0, |m, &(age, tile)| m | (self.masks[tile as usize] >> age))
    }

    fn advance(&self, state: &BoundaryState, new: Option<(u32, u32)>) -> BoundaryState {
        let mut active: Vec<(u32, u32)> = state
            .active
            .iter()
            .copied()
            .chain(new)
            .map(|(age, tile)| (age + 1, tile))
            .filter(|&(age, tile)| age < self.spans[tile as usize])
            .collect();
        active.sort_unstable();
        BoundaryState { active }
    }

    /// Outgoing transitions in label order. With `relaxed = Some(j)`, the cell
    /// being read is cell `j` of a run whose earlier history is unknown.
    fn successors(&self, state: &BoundaryState, relaxed: Option<u32>) -> Vec<(Symbol, BoundaryState)> {
        let claims = self.claims(state);
        if claims & 1 == 1 {
            let covering: Vec<(u32, u32)> = state
                .active
                .iter()
                .copied()
                .filter(|&(age, tile)| (self.masks[tile as usize] >> age) & 1 == 1)
                .collect();
            debug_assert_eq!(covering.len(), 1, "active footprints overlap");
            let (age, tile) = covering[0];
            let elem = self.offsets[tile as usize].binary_search(&age).unwrap() as u32;
            return vec![(Symbol { tile, elem }, self.advance(state, None))];
        }
        let mut out = Vec::new();
        for (tile, offs) in self.offsets.iter().enumerate() {
            let tile = tile as u32;
            for (elem, &age) in offs.iter().enumerate() {
                if elem > 0 {
                    // Earlier cells of the tile must fall before the run.
                    match relaxed {
                        None => break,
                        Some(j) if age - offs[elem - 1] <= j => continue,
                        Some(_) => {}
                    }
                }
                if state.active.iter().any(|&(a, _)| a == age) {
                    continue;
                }
                if (self.masks[tile as usize] >> age) & claims != 0 {
                    continue;
                }
                out.push((
                    Symbol {
                        tile,
                        elem: elem as u32,
                    },
                    self.advance(state, Some((age, tile))),
                ));
            }
        }
        out
    }
}

/// The pruned boundary-state automaton of a prototile set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingAutomaton {
    tiles: PrototileSet,
    states: Vec<BoundaryState>,
    edges: Vec<Edge>,
    out_start: Vec<usize>,
    explored: usize,
}

impl TilingAutomaton {
    pub fn build(ps: &PrototileSet) -> Result<Self, EngineError> {
        Self::build_with(ps, &BuildOptions::default())
    }

    pub fn build_with(ps: &PrototileSet, opts: &BuildOptions) -> Result<Self, EngineError> {
        let engine = Engine::new(ps, &opts.budget)?;
        let limit = opts.budget.max_states;
        let l = ps.longest_length() as u32;

        let mut layer = vec![BoundaryState::default()];
        for j in 0..l.saturating_sub(1) {
            let next: HashSet<BoundaryState> = opts
                .exec
                .map(&layer, |s| engine.successors(s, Some(j)))
                .into_iter()
                .flatten()
                .map(|(_, t)| t)
                .collect();
            if next.len() > limit {
                return Err(EngineError::StateBudget { limit });
            }
            layer = next.into_iter().collect();
            layer.sort_unstable();
        }

        let mut index: HashMap<BoundaryState, u32> = HashMap::new();
        let mut states: Vec<BoundaryState> = Vec::new();
        let mut raw_edges: Vec<Edge> = Vec::new();
        for s in layer {
            index.insert(s.clone(), states.len() as u32);
            states.push(s);
        }
        let mut frontier: Vec<u32> = (0..states.len() as u32).collect();
        while !frontier.is_empty() {
            let succ = opts
                .exec
                .map(&frontier, |&id| engine.successors(&states[id as usize], None));
            let mut next = Vec::new();
            for (&from, list) in frontier.iter().zip(succ) {
                for (label, t) in list {
                    let to = match index.get(&t) {
                        Some(&id) => id,
                        None => {
                            let id = states.len() as u32;
                            if states.len() >= limit {
                                return Err(EngineError::StateBudget { limit });
                            }
                            index.insert(t.clone(), id);
                            states.push(t);
                            next.push(id);
                            id
                        }
                    };
                    raw_edges.push(Edge { from, to, label });
                }
            }
            frontier = next;
        }
        let explored = states.len();

        let pairs: Vec<(u32, u32)> = raw_edges.iter().map(|e| (e.from, e.to)).collect();
        let keep = graph::essential(states.len(), &pairs);
        let mut kept: Vec<(BoundaryState, u32)> = states
            .into_iter()
            .enumerate()
            .filter(|(i, _)| keep[*i])
            .map(|(i, s)| (s, i as u32))
            .collect();
        kept.sort_unstable();
        let mut renumber = vec![u32::MAX; keep.len()];
        for (new, (_, old)) in kept.iter().enumerate() {
            renumber[*old as usize] = new as u32;
        }
        let mut edges: Vec<Edge> = raw_edges
            .into_iter()
            .filter(|e| keep[e.from as usize] && keep[e.to as usize])
            .map(|e| Edge {
                from: renumber[e.from as usize],
                to: renumber[e.to as usize],
                label: e.label,
            })
            .collect();
        edges.sort_unstable_by_key(|e| (e.from, e.label, e.to));
        let states: Vec<BoundaryState> = kept.into_iter().map(|(s, _)| s).collect();
        let out_start = csr_offsets(states.len(), &edges);
        Ok(TilingAutomaton {
            tiles: ps.clone(),
            states,
            edges,
            out_start,
            explored,
        })
    }

    pub fn prototiles(&self) -> &PrototileSet {
        &self.tiles
    }

    pub fn states(&self) -> &[BoundaryState] {
        &self.states
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Number of states visited before pruning.
    pub fn explored_states(&self) -> usize {
        self.explored
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn outgoing(&self, state: u32) -> &[Edge] {
        let s = state as usize;
        &self.edges[self.out_start[s]..self.out_start[s + 1]]
    }

    /// Follows a subscripted label from `state`, if that edge exists.
    pub fn step(&self, state: u32, label: Symbol) -> Option<u32> {
        let out = self.outgoing(state);
        out.binary_search_by_key(&label, |e| e.label)
            .ok()
            .map(|i| out[i].to)
    }

    /// All subscripted symbols `(k, ℓ)` of the prototile set.
    pub fn alphabet(&self) -> Vec<Symbol> {
        self.tiles
            .tiles()
            .iter()
            .enumerate()
            .flat_map(|(k, t)| {
                (0..t.cell_count() as u32).map(move |elem| Symbol {
                    tile: k as u32,
                    elem,
                })
            })
            .collect()
    }

    /// Whether `word^∞` lies in the subscripted system, decided by following
    /// the (label-deterministic) transitions.
    pub fn accepts_subscripted_periodic(&self, word: &[Symbol]) -> bool {
        if word.is_empty() {
            return false;
        }
        let map: Vec<Option<u32>> = (0..self.states.len() as u32)
            .map(|q| word.iter().try_fold(q, |s, &a| self.step(s, a)))
            .collect();
        partial_map_has_cycle(&map)
    }

    /// Whether the periodic color sequence `word^∞` lies in the tiling system.
    ///
    /// Builds the relation "state q can read `word` and end in q'" and looks
    /// for a cycle, i.e. a cycle of the product with the `p`-cycle.
    pub fn accepts_periodic(&self, word: &[usize]) -> bool {
        if word.is_empty() || self.states.is_empty() {
            return false;
        }
        let n = self.states.len();
        let mut rel: Vec<(u32, u32)> = Vec::new();
        let mut current = vec![false; n];
        let mut next = vec![false; n];
        for q in 0..n {
            current.iter_mut().for_each(|b| *b = false);
            current[q] = true;
            for &color in word {
                next.iter_mut().for_each(|b| *b = false);
                let mut any = false;
                for (s, on) in current.iter().enumerate() {
                    if !on {
                        continue;
                    }
                    for e in self.outgoing(s as u32) {
                        if e.label.tile as usize == color {
                            next[e.to as usize] = true;
                            any = true;
                        }
                    }
                }
                std::mem::swap(&mut current, &mut next);
                if !any {
                    break;
                }
            }
            rel.extend(
                current
                    .iter()
                    .enumerate()
                    .filter(|(_, on)| **on)
                    .map(|(t, _)| (q as u32, t as u32)),
            );
        }
        graph::has_cycle(n, &rel)
    }

    /// [`accepts_periodic`](Self::accepts_periodic) with colors given by name.
    pub fn accepts_periodic_named<S: AsRef<str>>(&self, word: &[S]) -> Result<bool, EngineError> {
        let ids = word
            .iter()
            .map(|c| {
                self.tiles
                    .index_of(c.as_ref())
                    .ok_or_else(|| EngineError::UnknownColor(c.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.accepts_periodic(&ids))
    }

    /// Some periodic tiling, read off a cycle of the automaton.
    pub fn find_periodic_tiling(&self) -> Option<Tiling> {
        let pairs: Vec<(u32, u32)> = self.edges.iter().map(|e| (e.from, e.to)).collect();
        let (comp, _) = graph::components(self.states.len(), &pairs)
            .into_iter()
            .filter(|(_, cyclic)| *cyclic)
            .min_by_key(|(c, _)| c[0])?;
        let start = comp[0];
        let in_comp: HashSet<u32> = comp.iter().copied().collect();
        // Shortest cycle through `start` within its component.
        let mut parent: HashMap<u32, (u32, Symbol)> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([start]);
        let mut found = None;
        'bfs: while let Some(s) = queue.pop_front() {
            for e in self.outgoing(s) {
                if !in_comp.contains(&e.to) {
                    continue;
                }
                if e.to == start {
                    found = Some((s, e.label));
                    break 'bfs;
                }
                if let std::collections::hash_map::Entry::Vacant(v) = parent.entry(e.to) {
                    v.insert((s, e.label));
                    queue.push_back(e.to);
                }
            }
        }
        let (last, last_label) = found?;
        let mut labels = vec![last_label];
        let mut s = last;
        while s != start {
            let (prev, label) = parent[&s];
            labels.push(label);
            s = prev;
        }
        labels.reverse();
        let placements = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.elem == 0)
            .map(|(t, l)| Placement {
                position: t as i64,
                tile: l.tile as usize,
            })
            .collect();
        Some(Tiling {
            placements,
            scope: TilingScope::Period(labels.len() as u64),
        })
    }

    /// Number of closed paths of length `p`, i.e. `trace(M^p)` for the
    /// adjacency matrix `M`; equals the number of points of period `p` in the
    /// subscripted system.
    pub fn closed_walks(&self, p: usize) -> BigUint {
        let n = self.states.len();
        let mut total = BigUint::zero();
        for q in 0..n {
            let mut v = vec![BigUint::zero(); n];
            v[q] = BigUint::one();
            for _ in 0..p {
                let mut w = vec![BigUint::zero(); n];
                for (s, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for e in self.outgoing(s as u32) {
                        w[e.to as usize] += c;
                    }
                }
                v = w;
            }
            total += &v[q];
        }
        total
    }

    /// All words of length `len` over the subscripted alphabet that label a
    /// path.
    pub fn factors(&self, len: usize) -> HashSet<Vec<Symbol>> {
        let mut out = HashSet::new();
        let mut word = Vec::with_capacity(len);
        for q in 0..self.states.len() as u32 {
            self.collect_factors(q, len, &mut word, &mut out);
        }
        out
    }

    fn collect_factors(&self, q: u32, left: usize, word: &mut Vec<Symbol>, out: &mut HashSet<Vec<Symbol>>) {
        if left == 0 {
            out.insert(word.clone());
            return;
        }
        for e in self.outgoing(q) {
            word.push(e.label);
            self.collect_factors(e.to, left - 1, word, out);
            word.pop();
        }
    }
}

pub(crate) fn csr_offsets(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut out = vec![0usize; n + 1];
    for e in edges {
        out[e.from as usize + 1] += 1;
    }
    for i in 0..n {
        out[i + 1] += out[i];
    }
    out
}

/// Whether iterating a partial self-map from some point cycles forever.
pub(crate) fn partial_map_has_cycle(map: &[Option<u32>]) -> bool {
    // 0 = unvisited, 1 = on current walk, 2 = finished
    let mut mark = vec![0u8; map.len()];
    for start in 0..map.len() {
        if mark[start] != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut s = start;
        loop {
            match mark[s] {
                1 => return true,
                2 => break,
                _ => {}
            }
            mark[s] = 1;
            walk.push(s);
            match map[s] {
                Some(t) => s = t as usize,
                None => break,
            }
        }
        for w in walk {
            mark[w] = 2;
        }
    }
    false
}

/// Whether `ps` tiles the integers.
pub fn tiles_integers(ps: &PrototileSet) -> Result<bool, EngineError> {
    Ok(!TilingAutomaton::build(ps)?.is_empty())
}

/// Whether the `p`-periodic color sequence `word^∞` lies in `T(ps)`.
pub fn membership_periodic<S: AsRef<str>>(ps: &PrototileSet, word: &[S]) -> Result<bool, EngineError> {
    TilingAutomaton::build(ps)?.accepts_periodic_named(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prototile::Prototile;

    fn set(words: &[(&str, &str)]) -> PrototileSet {
        PrototileSet::from_broken_words(words).unwrap()
    }

    fn single(offsets: &[u64]) -> PrototileSet {
        PrototileSet::new(vec![Prototile::from_offsets("a", offsets.iter().copied()).unwrap()]).unwrap()
    }

    #[test]
    fn even_system_automaton() {
        let ta = TilingAutomaton::build(&set(&[("R", "R"), ("B", "BB")])).unwrap();
        assert_eq!(ta.state_count(), 2);
        let labels: Vec<String> = ta.edges().iter().map(|e| e.label.to_string()).collect();
        assert_eq!(labels, vec!["(1,1)", "(2,1)", "(2,2)"]);
    }

    #[test]
    fn single_cell_is_one_loop() {
        let ta = TilingAutomaton::build(&single(&[0])).unwrap();
        assert_eq!(ta.state_count(), 1);
        assert_eq!(
            ta.edges(),
            &[Edge {
                from: 0,
                to: 0,
                label: Symbol { tile: 0, elem: 0 }
            }]
        );
    }

    #[test]
    fn tileability_examples() {
        assert!(tiles_integers(&single(&[0])).unwrap());
        assert!(tiles_integers(&single(&[0, 2])).unwrap());
        assert!(!tiles_integers(&single(&[0, 1, 3])).unwrap());
        assert!(TilingAutomaton::build(&single(&[0, 1, 3])).unwrap().edges().is_empty());
    }

    #[test]
    fn periodic_membership_examples() {
        let even = set(&[("R", "R"), ("B", "BB")]);
        assert!(membership_periodic(&even, &["R", "B", "B"]).unwrap());
        assert!(!membership_periodic(&even, &["R", "B"]).unwrap());
        assert!(membership_periodic(&single(&[0]), &["a"]).unwrap());
        assert_eq!(
            membership_periodic(&even, &["G"]),
            Err(EngineError::UnknownColor("G".into()))
        );
    }

    #[test]
    fn periodic_tiling_witness_is_valid() {
        for ps in [
            set(&[("R", "R"), ("B", "BB")]),
            single(&[0, 2]),
            single(&[0, 1, 4, 5]),
            set(&[("R", "R"), ("B", "BB_B"), ("Y", "Y__Y")]),
        ] {
            let ta = TilingAutomaton::build(&ps).unwrap();
            let t = ta.find_periodic_tiling().expect("tileable");
            t.validate(&ps).unwrap();
        }
        assert!(TilingAutomaton::build(&single(&[0, 1, 3]))
            .unwrap()
            .find_periodic_tiling()
            .is_none());
    }

    #[test]
    fn label_determinism_and_pruning() {
        let ps = set(&[("R", "R"), ("B", "BB_B"), ("Y", "Y__Y")]);
        let ta = TilingAutomaton::build(&ps).unwrap();
        for q in 0..ta.state_count() as u32 {
            let out = ta.outgoing(q);
            assert!(!out.is_empty());
            for w in out.windows(2) {
                assert!(w[0].label < w[1].label);
            }
        }
        let pairs: Vec<(u32, u32)> = ta.edges().iter().map(|e| (e.from, e.to)).collect();
        assert!(graph::essential(ta.state_count(), &pairs).iter().all(|b| *b));
    }

    #[test]
    fn construction_is_deterministic() {
        let ps = set(&[("R", "R"), ("B", "BB_B"), ("Y", "Y__Y")]);
        let seq = BuildOptions {
            exec: Exec::Sequential,
            ..Default::default()
        };
        let a = TilingAutomaton::build_with(&ps, &seq).unwrap();
        let b = TilingAutomaton::build(&ps).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budgets_are_enforced() {
        let wide = single(&[0, 200]);
        assert!(matches!(
            TilingAutomaton::build(&wide),
            Err(EngineError::SpanTooLarge { .. })
        ));
        let opts = BuildOptions {
            budget: Budget {
                max_states: 2,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(matches!(
            TilingAutomaton::build_with(&set(&[("R", "R"), ("B", "BB_B"), ("Y", "Y__Y")]), &opts),
            Err(EngineError::StateBudget { limit: 2 })
        ));
    }

    #[test]
    fn closed_walks_count_subscripted_periodic_points() {
        let ta = TilingAutomaton::build(&set(&[("R", "R"), ("B", "BB")])).unwrap();
        // Lucas numbers: trace of [[1,1],[1,0]]^p.
        let lucas = [2u32, 1, 3, 4, 7, 11, 18];
        for (p, want) in lucas.iter().enumerate().skip(1) {
            assert_eq!(ta.closed_walks(p), BigUint::from(*want));
        }
    }

    #[test]
    fn partial_map_cycles() {
        assert!(partial_map_has_cycle(&[Some(1), Some(0)]));
        assert!(!partial_map_has_cycle(&[Some(1), None]));
        assert!(partial_map_has_cycle(&[Some(1), Some(2), Some(2)]));
        assert!(!partial_map_has_cycle(&[]));
    }
}

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::automaton::{
    AutomatonDoc, EdgeDoc, Metadata, StateDoc,
};
use crate::exec::Exec;
use crate::graph;
use crate::spectral::{self, SpectralRadius};

use super::{language_by_images, LabeledPresentation, SoficError};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
pub struct DeterminizeOptions {
    pub exec: Exec,
    /// Merge states with equal follower sets after pruning.
    pub merge_followers: bool,
    pub max_states: usize,
}

impl Default for DeterminizeOptions {
    fn default() -> Self {
        DeterminizeOptions {
            exec: Exec::default(),
            merge_followers: true,
            max_states: 1_000_000,
        }
    }
}

/// A right-resolving presentation: at most one edge per (state, color).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicPresentation {
    colors: Vec<String>,
    state_count: usize,
    /// `delta[q * K + c]`, or `NONE`.
    delta: Vec<u32>,
    /// For each state, the smallest source subset it stands for.
    subsets: Vec<Vec<u32>>,
}

impl DeterministicPresentation {
    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn is_empty(&self) -> bool {
        self.state_count == 0
    }

    pub fn subsets(&self) -> &[Vec<u32>] {
        &self.subsets
    }

    pub fn step(&self, q: u32, color: u32) -> Option<u32> {
        let t = self.delta[q as usize * self.colors.len() + color as usize];
        (t != NONE).then_some(t)
    }

    /// `(from, color, to)` triples in order.
    pub fn edges(&self) -> Vec<(u32, u32, u32)> {
        let k = self.colors.len();
        (0..self.state_count)
            .flat_map(|q| (0..k).map(move |c| (q, c)))
            .filter_map(|(q, c)| {
                let t = self.delta[q * k + c];
                (t != NONE).then_some((q as u32, c as u32, t))
            })
            .collect()
    }

    pub fn language_up_to(&self, max_len: usize) -> Vec<Vec<u32>> {
        let all: Vec<u32> = (0..self.state_count as u32).collect();
        language_by_images(self.colors.len(), all, max_len, |set, c| {
            let mut next: Vec<u32> = set.iter().filter_map(|&q| self.step(q, c)).collect();
            next.sort_unstable();
            next.dedup();
            next
        })
    }

    /// Spectral data of the adjacency matrix; the entropy is its log.
    pub fn spectral(&self) -> SpectralRadius {
        let edges: Vec<(u32, u32, BigUint)> = self
            .edges()
            .into_iter()
            .map(|(a, _, b)| (a, b, BigUint::from(1u32)))
            .collect();
        spectral::spectral_radius(self.state_count, &edges)
    }

    /// Topological entropy (natural log); `0` for empty or finite systems.
    pub fn entropy(&self) -> f64 {
        self.spectral().log()
    }

    pub fn to_doc(&self) -> AutomatonDoc {
        let edges = self.edges();
        AutomatonDoc {
            version: 1,
            kind: "deterministic".into(),
            metadata: Metadata {
                k: self.colors.len(),
                l: 0,
                state_count: self.state_count,
                edge_count: edges.len(),
            },
            alphabet: self.colors.clone(),
            states: self
                .subsets
                .iter()
                .enumerate()
                .map(|(id, s)| StateDoc {
                    id: id as u32,
                    active: None,
                    subset: Some(s.clone()),
                })
                .collect(),
            edges: edges
                .into_iter()
                .map(|(from, c, to)| EdgeDoc {
                    from,
                    to,
                    label: vec![c],
                })
                .collect(),
        }
    }
}

pub fn determinize(lp: &LabeledPresentation) -> DeterministicPresentation {
    determinize_with(lp, &DeterminizeOptions::default()).expect("default budget")
}

/// Subset construction from the singleton states, then pruning to states on
/// bi-infinite paths, then (optionally) merging follower-equivalent states.
///
/// Every bi-infinite path of the source lifts to the subsets reachable from
/// singletons, so the result presents the same shift.
pub fn determinize_with(
    lp: &LabeledPresentation,
    opts: &DeterminizeOptions,
) -> Result<DeterministicPresentation, SoficError> {
    let k = lp.colors().len();
    let colors = lp.colors().to_vec();
    if lp.is_empty() {
        return Ok(DeterministicPresentation {
            colors,
            state_count: 0,
            delta: Vec::new(),
            subsets: Vec::new(),
        });
    }
    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); lp.state_count() * k];
    for &(a, c, b) in lp.edges() {
        succ[a as usize * k + c as usize].push(b);
    }

    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut subsets: Vec<Vec<u32>> = Vec::new();
    let mut delta: Vec<u32> = Vec::new();
    for q in 0..lp.state_count() as u32 {
        index.insert(vec![q], q);
        subsets.push(vec![q]);
    }
    delta.resize(subsets.len() * k, NONE);
    let mut frontier: Vec<u32> = (0..lp.state_count() as u32).collect();
    while !frontier.is_empty() {
        let images = opts.exec.map(&frontier, |&s| {
            (0..k)
                .map(|c| {
                    let mut img: Vec<u32> = subsets[s as usize]
                        .iter()
                        .flat_map(|&q| succ[q as usize * k + c].iter().copied())
                        .collect();
                    img.sort_unstable();
                    img.dedup();
                    img
                })
                .collect::<Vec<_>>()
        });
        let mut next = Vec::new();
        for (&s, imgs) in frontier.iter().zip(images) {
            for (c, img) in imgs.into_iter().enumerate() {
                if img.is_empty() {
                    continue;
                }
                let t = match index.get(&img) {
                    Some(&t) => t,
                    None => {
                        let t = subsets.len() as u32;
                        if subsets.len() >= opts.max_states {
                            return Err(SoficError::StateBudget {
                                limit: opts.max_states,
                            });
                        }
                        index.insert(img.clone(), t);
                        subsets.push(img);
                        delta.resize(delta.len() + k, NONE);
                        next.push(t);
                        t
                    }
                };
                delta[s as usize * k + c] = t;
            }
        }
        frontier = next;
    }

    let n = subsets.len();
    let pairs: Vec<(u32, u32)> = (0..n)
        .flat_map(|q| (0..k).map(move |c| (q, c)))
        .filter(|&(q, c)| delta[q * k + c] != NONE)
        .map(|(q, c)| (q as u32, delta[q * k + c]))
        .collect();
    let keep = graph::essential(n, &pairs);

    // Blocks of equivalent states among the kept ones.
    let kept: Vec<usize> = (0..n).filter(|&q| keep[q]).collect();
    let mut block = vec![NONE; n];
    for &q in &kept {
        block[q] = 0;
    }
    if opts.merge_followers {
        let mut count = 1usize;
        loop {
            let mut sig_index: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut new_block = vec![NONE; n];
            for &q in &kept {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(block[q]);
                for c in 0..k {
                    let t = delta[q * k + c];
                    sig.push(if t == NONE || !keep[t as usize] {
                        NONE
                    } else {
                        block[t as usize]
                    });
                }
                let fresh = sig_index.len() as u32;
                new_block[q] = *sig_index.entry(sig).or_insert(fresh);
            }
            block = new_block;
            if sig_index.len() == count {
                break;
            }
            count = sig_index.len();
        }
    } else {
        for (i, &q) in kept.iter().enumerate() {
            block[q] = i as u32;
        }
    }

    // Canonical numbering: blocks ordered by their smallest subset.
    let block_count = kept.iter().map(|&q| block[q] as usize + 1).max().unwrap_or(0);
    let mut rep: Vec<Option<usize>> = vec![None; block_count];
    for &q in &kept {
        let b = block[q] as usize;
        if rep[b].is_none_or(|r| subsets[q] < subsets[r]) {
            rep[b] = Some(q);
        }
    }
    let mut order: Vec<usize> = (0..block_count).collect();
    order.sort_by(|&a, &b| subsets[rep[a].unwrap()].cmp(&subsets[rep[b].unwrap()]));
    let mut number = vec![0u32; block_count];
    for (i, &b) in order.iter().enumerate() {
        number[b] = i as u32;
    }
    let mut new_delta = vec![NONE; block_count * k];
    for &q in &kept {
        let from = number[block[q] as usize] as usize;
        for c in 0..k {
            let t = delta[q * k + c];
            if t != NONE && keep[t as usize] {
                new_delta[from * k + c] = number[block[t as usize] as usize];
            }
        }
    }
    let new_subsets = order.iter().map(|&b| subsets[rep[b].unwrap()].clone()).collect();
    Ok(DeterministicPresentation {
        colors,
        state_count: block_count,
        delta: new_delta,
        subsets: new_subsets,
    })
}

/// The renewal system of all bi-infinite concatenations of `generators`
/// (each a word of color names), via the flower automaton.
pub fn renewal_presentation<S: AsRef<str>>(generators: &[Vec<S>]) -> Result<DeterministicPresentation, SoficError> {
    if generators.is_empty() {
        return Err(SoficError::NoGenerators);
    }
    if generators.iter().any(|g| g.is_empty()) {
        return Err(SoficError::EmptyGenerator);
    }
    let mut colors: Vec<String> = generators
        .iter()
        .flatten()
        .map(|c| c.as_ref().to_string())
        .collect();
    colors.sort();
    colors.dedup();
    let id = |c: &S| colors.binary_search_by(|x| x.as_str().cmp(c.as_ref())).unwrap() as u32;
    let mut edges = Vec::new();
    let mut states = 1u32;
    for g in generators {
        let mut from = 0u32;
        for (i, c) in g.iter().enumerate() {
            let to = if i + 1 == g.len() {
                0
            } else {
                states += 1;
                states - 1
            };
            edges.push((from, id(c), to));
            from = to;
        }
    }
    let lp = LabeledPresentation::new(colors.clone(), states as usize, edges);
    determinize_with(&lp, &DeterminizeOptions::default())
}

/// [`renewal_presentation`] with one color per character, e.g. `["R", "BRB"]`.
pub fn renewal_presentation_chars(generators: &[&str]) -> Result<DeterministicPresentation, SoficError> {
    let words: Vec<Vec<String>> = generators
        .iter()
        .map(|g| g.chars().map(|c| c.to_string()).collect())
        .collect();
    renewal_presentation(&words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::TilingAutomaton;
    use crate::prototile::PrototileSet;
    use crate::sofic::{drop_subscripts, rendered_language};

    fn dp(words: &[(&str, &str)]) -> DeterministicPresentation {
        let ps = PrototileSet::from_broken_words(words).unwrap();
        determinize(&drop_subscripts(&TilingAutomaton::build(&ps).unwrap()))
    }

    #[test]
    fn even_system_presentation() {
        let d = dp(&[("R", "R"), ("B", "BB")]);
        assert_eq!(d.state_count(), 2);
        let spectral = d.spectral();
        let dom = spectral.dominant.unwrap();
        assert_eq!(dom.vertices.len(), 2);
        assert_eq!(dom.char_poly.as_ref().unwrap().to_string(), "x^2 - x - 1");
        assert!((d.entropy() - 0.4812118250596034).abs() < 1e-12);
        // right-resolving by construction; check language against the NFA
        let lp = drop_subscripts(&TilingAutomaton::build(&PrototileSet::from_broken_words(&[("R", "R"), ("B", "BB")]).unwrap()).unwrap());
        assert_eq!(
            rendered_language(d.colors(), &d.language_up_to(12)),
            rendered_language(lp.colors(), &lp.language_up_to(12))
        );
    }

    #[test]
    fn trivial_presentations() {
        let d = dp(&[("a", "a")]);
        assert_eq!(d.state_count(), 1);
        assert_eq!(d.entropy(), 0.0);
        let d = dp(&[("a", "aa_a")]);
        assert!(d.is_empty());
        assert!(d.language_up_to(1).is_empty());
        let d = dp(&[("R", "R"), ("B", "B")]);
        assert!((d.entropy() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn merge_is_optional_for_contracts() {
        let ps = PrototileSet::from_broken_words(&[("R", "R"), ("B", "BB_B"), ("Y", "Y__Y")]).unwrap();
        let lp = drop_subscripts(&TilingAutomaton::build(&ps).unwrap());
        let merged = determinize(&lp);
        let raw = determinize_with(
            &lp,
            &DeterminizeOptions {
                merge_followers: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(merged.state_count() <= raw.state_count());
        assert_eq!(merged.language_up_to(10), raw.language_up_to(10));
        assert!((merged.entropy() - raw.entropy()).abs() < 1e-10);
    }

    #[test]
    fn renewal_examples() {
        let full = renewal_presentation_chars(&["a"]).unwrap();
        assert_eq!(full.state_count(), 1);
        let orbit = renewal_presentation_chars(&["ab"]).unwrap();
        assert_eq!(orbit.state_count(), 2);
        assert_eq!(orbit.entropy(), 0.0);
        assert_eq!(renewal_presentation_chars(&[]), Err(SoficError::NoGenerators));
        assert_eq!(renewal_presentation_chars(&["a", ""]), Err(SoficError::EmptyGenerator));
    }
}

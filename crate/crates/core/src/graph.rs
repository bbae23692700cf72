//! Small directed-graph utilities shared by the automata.

use std::collections::VecDeque;

use petgraph::algo::{tarjan_scc, toposort};
use petgraph::graph::{DiGraph, NodeIndex};

/// Strongly connected components, each flagged with whether it carries a cycle
/// (more than one vertex, or a self-loop).
pub fn components(n: usize, edges: &[(u32, u32)]) -> Vec<(Vec<u32>, bool)> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, edges.len());
    for _ in 0..n {
        g.add_node(());
    }
    let mut self_loop = vec![false; n];
    for &(a, b) in edges {
        g.add_edge(NodeIndex::new(a as usize), NodeIndex::new(b as usize), ());
        if a == b {
            self_loop[a as usize] = true;
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|comp| {
            let cyclic = comp.len() > 1 || self_loop[comp[0].index()];
            let mut ids: Vec<u32> = comp.into_iter().map(|v| v.index() as u32).collect();
            ids.sort_unstable();
            (ids, cyclic)
        })
        .collect()
}

/// Vertices lying on some bi-infinite path: reachable from a cycle and
/// reaching a cycle.
pub fn essential(n: usize, edges: &[(u32, u32)]) -> Vec<bool> {
    let mut on_cycle = vec![false; n];
    for (comp, cyclic) in components(n, edges) {
        if cyclic {
            for v in comp {
                on_cycle[v as usize] = true;
            }
        }
    }
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for &(a, b) in edges {
        fwd[a as usize].push(b);
        bwd[b as usize].push(a);
    }
    let from_cycle = flood(&on_cycle, &fwd);
    let to_cycle = flood(&on_cycle, &bwd);
    from_cycle.iter().zip(&to_cycle).map(|(a, b)| *a && *b).collect()
}

fn flood(seed: &[bool], adj: &[Vec<u32>]) -> Vec<bool> {
    let mut seen = seed.to_vec();
    let mut queue: VecDeque<u32> = (0..seed.len() as u32).filter(|&v| seed[v as usize]).collect();
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Vertices in topological order, or `None` if there is a cycle.
pub fn topological_order(n: usize, edges: &[(u32, u32)]) -> Option<Vec<u32>> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, edges.len());
    for _ in 0..n {
        g.add_node(());
    }
    for &(a, b) in edges {
        g.add_edge(NodeIndex::new(a as usize), NodeIndex::new(b as usize), ());
    }
    toposort(&g, None)
        .ok()
        .map(|order| order.into_iter().map(|v| v.index() as u32).collect())
}

/// Whether the graph has any directed cycle.
pub fn has_cycle(n: usize, edges: &[(u32, u32)]) -> bool {
    components(n, edges).iter().any(|(_, c)| *c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn essential_prunes_tails() {
        // 0 -> 1 <-> 2 -> 3, 4 -> 4 -> 1
        let edges = [(0, 1), (1, 2), (2, 1), (2, 3), (4, 4), (4, 1)];
        assert_eq!(essential(5, &edges), vec![false, true, true, false, true]);
        assert!(has_cycle(5, &edges));
        assert!(!has_cycle(3, &[(0, 1), (1, 2)]));
        assert_eq!(essential(0, &[]), Vec::<bool>::new());
    }
}

//! JSON and DOT export of automata and presentations.
//!
//! Subscripted automata label edges `[tile, element]` (tile 0-based into
//! `alphabet`, element 1-based); sofic presentations label edges `[color]`.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::TilingAutomaton;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Metadata {
    pub k: usize,
    pub l: u64,
    pub state_count: usize,
    pub edge_count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StateDoc {
    pub id: u32,
    /// `[age, tile]` pairs of a boundary state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<[u32; 2]>>,
    /// Source states merged into a presentation state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeDoc {
    pub from: u32,
    pub to: u32,
    pub label: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AutomatonDoc {
    pub version: u32,
    pub kind: String,
    pub metadata: Metadata,
    pub alphabet: Vec<String>,
    pub states: Vec<StateDoc>,
    pub edges: Vec<EdgeDoc>,
}

impl AutomatonDoc {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("automaton documents always serialize");
        s.push('\n');
        s
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tiling {\n  rankdir=LR;\n");
        for s in &self.states {
            let _ = writeln!(out, "  {};", s.id);
        }
        for e in &self.edges {
            let name = &self.alphabet[e.label[0] as usize];
            let label = match e.label.get(1) {
                Some(elem) => format!("{name}{elem}"),
                None => name.clone(),
            };
            let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", e.from, e.to, label.replace('"', "\\\""));
        }
        out.push_str("}\n");
        out
    }
}

impl TilingAutomaton {
    pub fn to_doc(&self) -> AutomatonDoc {
        AutomatonDoc {
            version: 1,
            kind: "subscripted".into(),
            metadata: Metadata {
                k: self.tiles.len(),
                l: self.tiles.longest_length(),
                state_count: self.states.len(),
                edge_count: self.edges.len(),
            },
            alphabet: self.tiles.colors(),
            states: self
                .states
                .iter()
                .enumerate()
                .map(|(id, s)| StateDoc {
                    id: id as u32,
                    active: Some(s.active.iter().map(|&(a, t)| [a, t]).collect()),
                    subset: None,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    from: e.from,
                    to: e.to,
                    label: vec![e.label.tile, e.label.elem + 1],
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::automaton::TilingAutomaton;
    use crate::prototile::PrototileSet;

    #[test]
    fn even_export() {
        let ps = PrototileSet::from_broken_words(&[("R", "R"), ("B", "BB")]).unwrap();
        let doc = TilingAutomaton::build(&ps).unwrap().to_doc();
        assert_eq!(doc.metadata.state_count, 2);
        assert_eq!(doc.metadata.l, 2);
        let json = doc.to_json();
        let back: super::AutomatonDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
        let dot = doc.to_dot();
        assert!(dot.contains("0 -> 1 [label=\"B1\"]"));
        assert!(dot.contains("1 -> 0 [label=\"B2\"]"));
    }
}

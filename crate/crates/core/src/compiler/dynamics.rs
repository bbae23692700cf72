use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde::Serialize;

use crate::automaton::{Budget, BuildOptions, TilingAutomaton};
use crate::exec::Exec;
use crate::graph;
use crate::sofic::{self, DeterminizeOptions, PeriodicOptions};
use crate::spectral;

use super::{BarbellFilling, CompilerOutput, RackSpec, Report, Role};

/// Limits beyond which dynamical verification is skipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DynamicsBudget {
    pub max_alphabet: u64,
    pub max_span: u64,
    pub max_states: usize,
    pub exec: Exec,
}

impl Default for DynamicsBudget {
    fn default() -> Self {
        DynamicsBudget {
            max_alphabet: 200,
            max_span: 64,
            max_states: 1_000_000,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DynamicsReport {
    /// Why nothing was checked, if the instance exceeded the budget.
    pub skipped: Option<String>,
    pub report: Report,
    pub automaton_states: usize,
    pub deterministic_states: usize,
    pub entropy: Option<f64>,
    /// `(p, Fix(σ^p))` for every period computed.
    pub periodic: Vec<(usize, String)>,
    /// Distinct head-aligned `m`-blocks found.
    pub head_blocks: usize,
}

impl DynamicsReport {
    pub fn passed(&self) -> bool {
        self.skipped.is_none() && self.report.passed()
    }

    fn skip(reason: String) -> Self {
        DynamicsReport {
            skipped: Some(reason),
            ..Default::default()
        }
    }
}

pub fn verify_dynamics(out: &CompilerOutput) -> DynamicsReport {
    verify_dynamics_with(out, &DynamicsBudget::default())
}

/// Builds the compiled tiling system and checks head spacing, periodic
/// counts, entropy and the block correspondence with arcs of `A^m`.
pub fn verify_dynamics_with(out: &CompilerOutput, budget: &DynamicsBudget) -> DynamicsReport {
    let ps = match out.prototile_set() {
        Ok(ps) => ps,
        Err(e) => return DynamicsReport::skip(format!("scale: {e}")),
    };
    let alphabet = ps.subscripted_alphabet_size();
    if alphabet > budget.max_alphabet {
        return DynamicsReport::skip(format!(
            "scale: {alphabet} subscripted symbols exceed the budget {}",
            budget.max_alphabet
        ));
    }
    let span = ps.longest_length();
    if span > budget.max_span {
        return DynamicsReport::skip(format!(
            "scale: longest prototile {span} exceeds the budget {}",
            budget.max_span
        ));
    }
    let opts = BuildOptions {
        exec: budget.exec,
        budget: Budget {
            max_states: budget.max_states,
            ..Budget::default()
        },
    };
    let ta = match TilingAutomaton::build_with(&ps, &opts) {
        Ok(ta) => ta,
        Err(e) => return DynamicsReport::skip(format!("scale: {e}")),
    };
    let dp = match sofic::determinize_with(
        &sofic::drop_subscripts(&ta),
        &DeterminizeOptions {
            exec: budget.exec,
            max_states: budget.max_states,
            ..Default::default()
        },
    ) {
        Ok(dp) => dp,
        Err(e) => return DynamicsReport::skip(format!("scale: {e}")),
    };

    let m = out.params.m;
    let mut result = DynamicsReport {
        automaton_states: ta.state_count(),
        deterministic_states: dp.state_count(),
        ..Default::default()
    };
    let roles: Vec<Option<Role>> = ps.colors().iter().map(|c| Role::parse(c)).collect();
    let is_head = |tile: u32, elem: u32| elem == 0 && matches!(roles[tile as usize], Some(Role::Rack(_)));

    head_spacing(&ta, m, &is_head, &mut result.report);

    let popts = PeriodicOptions {
        exec: budget.exec,
        ..Default::default()
    };
    let mut below = Vec::new();
    let mut failed = None;
    for p in 1..m {
        match sofic::count_periodic_with(&dp, p, &popts) {
            Ok(c) if c == BigUint::ZERO => below.push(p),
            Ok(c) => {
                failed = Some(format!("Fix(σ^{p}) = {c}"));
                break;
            }
            Err(e) => {
                failed = Some(e.to_string());
                break;
            }
        }
    }
    result.report.push(
        "short-periods",
        failed.is_none(),
        failed.unwrap_or_else(|| format!("Fix(σ^p) = 0 for 1 <= p < {m}")),
    );

    let mut lines = Vec::new();
    let mut ok = true;
    for q in 1..=3u64 {
        let p = m * q as usize;
        let want = out.matrix.pow(p as u64).trace() * m;
        match sofic::count_periodic_with(&dp, p, &popts) {
            Ok(got) => {
                ok &= got == want;
                lines.push(format!("Fix(σ^{p}) = {got}, m·trace(A^{p}) = {want}"));
                result.periodic.push((p, got.to_string()));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("p = {p}: {e}"));
            }
        }
    }
    result.report.push("periodic-points", ok, lines.join("; "));

    let h = dp.entropy();
    let edges: Vec<(u32, u32, BigUint)> = (0..out.matrix.dim())
        .flat_map(|i| (0..out.matrix.dim()).map(move |j| (i, j)))
        .map(|(i, j)| (i as u32, j as u32, out.matrix.get(i, j).clone()))
        .collect();
    let target = spectral::spectral_radius(out.matrix.dim(), &edges).log();
    result.entropy = Some(h);
    result.report.push(
        "entropy",
        (h - target).abs() <= 1e-9,
        format!("h(T) = {h:.12}, h(Σ_A) = {target:.12}"),
    );

    result.head_blocks = block_correspondence(out, &ta, &roles, &mut result.report);
    result
}

/// Every bi-infinite path meets rack heads exactly every `m` cells: the
/// graph without head edges is acyclic and every path from a head to the
/// next one has length `m`.
fn head_spacing<F: Fn(u32, u32) -> bool>(ta: &TilingAutomaton, m: usize, is_head: &F, report: &mut Report) {
    let n = ta.state_count();
    let plain: Vec<(u32, u32)> = ta
        .edges()
        .iter()
        .filter(|e| !is_head(e.label.tile, e.label.elem))
        .map(|e| (e.from, e.to))
        .collect();
    let Some(order) = graph::topological_order(n, &plain) else {
        report.push("head-spacing", false, "some bi-infinite path has no rack head");
        return;
    };
    // (shortest, longest) distance from a state to the next head edge
    let mut dist: Vec<Option<(usize, usize)>> = vec![None; n];
    for &q in order.iter().rev() {
        let mut best: Option<(usize, usize)> = None;
        let mut merge = |d: (usize, usize)| {
            best = Some(best.map_or(d, |b| (b.0.min(d.0), b.1.max(d.1))));
        };
        for e in ta.outgoing(q) {
            if is_head(e.label.tile, e.label.elem) {
                merge((0, 0));
            } else if let Some((lo, hi)) = dist[e.to as usize] {
                merge((lo + 1, hi + 1));
            }
        }
        dist[q as usize] = best;
    }
    let mut bad = None;
    let mut heads = 0usize;
    for e in ta.edges().iter().filter(|e| is_head(e.label.tile, e.label.elem)) {
        heads += 1;
        match dist[e.to as usize] {
            Some((lo, hi)) if lo + 1 == m && hi + 1 == m => {}
            other => {
                bad = Some(format!("after head edge {} -> {}: next head in {other:?} cells", e.from, e.to));
                break;
            }
        }
    }
    let ok = bad.is_none();
    report.push(
        "head-spacing",
        ok,
        bad.unwrap_or_else(|| format!("all {heads} head edges are followed by the next head after exactly {m} cells")),
    );
}

/// The rack and barbell permutation a block stands for.
type ArcWitness = (RackSpec, Vec<usize>);

/// A head-aligned `m`-block: the rack starting at its first cell and the
/// barbells starting inside it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Block {
    rack: RackSpec,
    barbells: Vec<(u64, u64)>,
}

fn block_correspondence(out: &CompilerOutput, ta: &TilingAutomaton, roles: &[Option<Role>], report: &mut Report) -> usize {
    let m = out.params.m;
    let n = out.params.n;
    // block -> (entry states, exit states)
    let mut blocks: BTreeMap<Block, (BTreeSet<u32>, BTreeSet<u32>)> = BTreeMap::new();
    let mut stray: Option<String> = None;
    for e in ta.edges() {
        let Some(Role::Rack(rack)) = roles[e.label.tile as usize] else {
            continue;
        };
        if e.label.elem != 0 {
            continue;
        }
        let mut path = Vec::new();
        walk(ta, roles, e.to, 1, m, &mut path, &mut |starts, end| {
            let mut barbells = Vec::new();
            for &(pos, role) in starts {
                match role {
                    Role::Barbell(b) => barbells.push((pos, b.r)),
                    Role::Rack(r) => {
                        stray.get_or_insert_with(|| format!("rack {} starts {pos} cells after a head", r.color()));
                    }
                }
            }
            let entry = blocks.entry(Block { rack, barbells }).or_default();
            entry.0.insert(e.from);
            entry.1.insert(end);
        });
    }
    let mut problems: Vec<String> = stray.into_iter().collect();
    let mut arcs: BTreeMap<(usize, usize), BTreeSet<ArcWitness>> = BTreeMap::new();
    for block in blocks.keys() {
        let placements = block
            .barbells
            .iter()
            .map(|&(pos, r)| {
                let slot = (1..=4 * block.rack.k as u64).find(|&s| block.rack.slot_offset(n, s) == pos);
                (slot.unwrap_or(0), super::BarbellSpec { r })
            })
            .collect();
        let filling = BarbellFilling { k: block.rack.k, placements };
        match filling.permutation() {
            Some(pi) => {
                arcs.entry((block.rack.from, block.rack.to)).or_default().insert((block.rack, pi));
            }
            None => problems.push(format!("block of {} has barbells {:?}", block.rack.color(), block.barbells)),
        }
    }
    let v = out.params.dim;
    for a in 1..=v {
        for b in 1..=v {
            let got = arcs.get(&(a, b)).map_or(0, |s| s.len());
            let want = out.power_entry(a, b);
            if BigUint::from(got) != *want {
                problems.push(format!("({a}, {b}): {got} blocks for {want} arcs"));
            }
        }
    }
    let ok = problems.is_empty();
    report.push(
        "block-correspondence",
        ok,
        if ok {
            format!("{} head-aligned blocks, one per arc of A^{m}", blocks.len())
        } else {
            problems.join("; ")
        },
    );

    let mut wrong = Vec::new();
    for (b1, (_, exits)) in &blocks {
        for (b2, (entries, _)) in &blocks {
            let follows = exits.intersection(entries).next().is_some();
            if follows != (b1.rack.to == b2.rack.from) {
                wrong.push(format!("{} then {}: followable = {follows}", b1.rack.color(), b2.rack.color()));
            }
        }
    }
    report.push(
        "block-followability",
        wrong.is_empty(),
        if wrong.is_empty() {
            format!("blocks follow each other exactly when arcs compose ({} pairs)", blocks.len() * blocks.len())
        } else {
            wrong.truncate(5);
            wrong.join("; ")
        },
    );
    blocks.len()
}

/// Enumerates continuations of a block from `state` at position `pos`,
/// stopping before the next head at position `m`.
fn walk<F: FnMut(&[(u64, Role)], u32)>(
    ta: &TilingAutomaton,
    roles: &[Option<Role>],
    state: u32,
    pos: usize,
    m: usize,
    starts: &mut Vec<(u64, Role)>,
    emit: &mut F,
) {
    if pos == m {
        emit(starts, state);
        return;
    }
    for e in ta.outgoing(state) {
        let pushed = e.label.elem == 0;
        if pushed {
            let role = roles[e.label.tile as usize].expect("compiled colors carry roles");
            starts.push((pos as u64, role));
        }
        walk(ta, roles, e.to, pos + 1, m, starts, emit);
        if pushed {
            starts.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{choose_parameters, compile, Mode};
    use crate::matrix::IntMatrix;

    #[test]
    fn scale_skip_is_explicit() {
        let a = IntMatrix::from_u64(&[&[1]]).unwrap();
        let out = compile(&a, &choose_parameters(&a, Mode::Strict).unwrap()).unwrap();
        let tight = DynamicsBudget {
            max_alphabet: 10,
            ..Default::default()
        };
        let r = verify_dynamics_with(&out, &tight);
        assert!(r.skipped.as_deref().unwrap().starts_with("scale"));
        assert!(!r.passed());
    }

    #[test]
    fn zero_matrix_is_consistent() {
        let a = IntMatrix::from_u64(&[&[0]]).unwrap();
        let out = compile(&a, &choose_parameters(&a, Mode::Strict).unwrap()).unwrap();
        let r = verify_dynamics(&out);
        assert!(r.passed(), "{}", r.report);
        assert_eq!(r.automaton_states, 0);
    }
}

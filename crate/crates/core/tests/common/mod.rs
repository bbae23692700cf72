//! Independent brute-force oracles shared by the integration tests.
//!
//! None of these go through the boundary-state automaton; they search
//! placements directly.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use intile::prototile::PrototileSet;

pub fn offsets(ps: &PrototileSet) -> Vec<Vec<i64>> {
    ps.tiles()
        .iter()
        .map(|t| t.offsets().map(|o| o as i64).collect())
        .collect()
}

/// Exact cover of `Z_p` by translates, where tile `t` may cover cell `c` only if
/// `allowed(c, t)`. A translate whose cells collide modulo `p` is not allowed.
pub fn cyclic_cover(offs: &[Vec<i64>], p: usize, allowed: &dyn Fn(usize, usize) -> bool) -> bool {
    let mut covered = vec![false; p];
    cyclic_fill(offs, p, &mut covered, allowed)
}

fn cyclic_fill(offs: &[Vec<i64>], p: usize, covered: &mut [bool], allowed: &dyn Fn(usize, usize) -> bool) -> bool {
    let Some(cell) = covered.iter().position(|&c| !c) else {
        return true;
    };
    for (tile, o) in offs.iter().enumerate() {
        for &anchor in o {
            let start = cell as i64 - anchor;
            let cells: Vec<usize> = o.iter().map(|&q| (start + q).rem_euclid(p as i64) as usize).collect();
            let distinct: HashSet<usize> = cells.iter().copied().collect();
            if distinct.len() != cells.len() || cells.iter().any(|&c| covered[c] || !allowed(c, tile)) {
                continue;
            }
            for &c in &cells {
                covered[c] = true;
            }
            if cyclic_fill(offs, p, covered, allowed) {
                return true;
            }
            for &c in &cells {
                covered[c] = false;
            }
        }
    }
    false
}

/// Whether some cover of `0..w` exists, tiles allowed to stick out.
/// Memoized on (first open cell, occupancy of the cells after it).
pub fn window_cover_exists(offs: &[Vec<i64>], w: usize) -> bool {
    let mut dead = HashSet::new();
    window_fill(offs, w, 0, 0, &mut dead)
}

fn window_fill(offs: &[Vec<i64>], w: usize, cell: usize, ahead: u128, dead: &mut HashSet<(usize, u128)>) -> bool {
    // `ahead` bit j: cell `cell + j` is covered
    let (mut cell, mut ahead) = (cell, ahead);
    while cell < w && ahead & 1 == 1 {
        cell += 1;
        ahead >>= 1;
    }
    if cell >= w {
        return true;
    }
    if dead.contains(&(cell, ahead)) {
        return false;
    }
    for o in offs {
        for &anchor in o {
            let mut mask = 0u128;
            let mut ok = true;
            for &q in o {
                let rel = q - anchor;
                if rel < 0 {
                    // cells left of `cell` are taken unless outside the window
                    if cell as i64 + rel >= 0 {
                        ok = false;
                        break;
                    }
                    continue;
                }
                if ahead >> rel & 1 == 1 {
                    ok = false;
                    break;
                }
                mask |= 1 << rel;
            }
            if ok && window_fill(offs, w, cell, ahead | mask, dead) {
                return true;
            }
        }
    }
    dead.insert((cell, ahead));
    false
}

#[derive(Debug, PartialEq, Eq)]
pub enum Tileability {
    Tiles { period: usize },
    NoWindow { width: usize },
    Unknown,
}

/// Depth-bounded search: a periodic cover of some `Z_p` proves a tiling,
/// failure to cover a finite window refutes one.
pub fn tileability(ps: &PrototileSet, max_period: usize, width: usize) -> Tileability {
    let offs = offsets(ps);
    for p in 1..=max_period {
        if cyclic_cover(&offs, p, &|_, _| true) {
            return Tileability::Tiles { period: p };
        }
    }
    if !window_cover_exists(&offs, width) {
        return Tileability::NoWindow { width };
    }
    Tileability::Unknown
}

/// Whether `word^∞` is the color sequence of a tiling with period `t·|word|`
/// for some `t <= max_repeats`.
pub fn periodic_colored(ps: &PrototileSet, word: &[usize], max_repeats: usize) -> bool {
    let offs = offsets(ps);
    let p = word.len();
    (1..=max_repeats).any(|t| cyclic_cover(&offs, t * p, &|c, tile| word[c % p] == tile))
}

/// All `k^len` words of length `len` over `0..k`, in lexicographic order.
pub fn all_words(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Colors seen on `0..len` across every cover of `-margin..len+margin`,
/// by a forward sweep over (occupancy ahead, colors recorded so far).
pub fn window_language(ps: &PrototileSet, len: usize, margin: usize) -> BTreeSet<Vec<usize>> {
    let offs = offsets(ps);
    let reach = offs.iter().flatten().copied().max().unwrap_or(0) as usize + 1;
    let w = len + 2 * margin;
    // ahead[j] = 1 + tile covering cell `cell + j`, or 0
    let mut layer: HashSet<(Vec<u8>, Vec<u8>)> = HashSet::from([(vec![0u8; reach], Vec::new())]);
    for cell in 0..w {
        let mut next = HashSet::new();
        for (ahead, word) in &layer {
            let mut options = Vec::new();
            if ahead[0] != 0 {
                options.push((ahead.clone(), ahead[0] - 1));
            } else {
                for (tile, o) in offs.iter().enumerate() {
                    for &anchor in o {
                        let mut a = ahead.clone();
                        let ok = o.iter().all(|&q| {
                            let rel = q - anchor;
                            if rel < 0 {
                                return cell as i64 + rel < 0;
                            }
                            let slot = &mut a[rel as usize];
                            let free = *slot == 0;
                            *slot = tile as u8 + 1;
                            free
                        });
                        if ok {
                            options.push((a, tile as u8));
                        }
                    }
                }
            }
            for (mut a, color) in options {
                let mut word = word.clone();
                if (margin..margin + len).contains(&cell) {
                    word.push(color);
                }
                a.remove(0);
                a.push(0);
                next.insert((a, word));
            }
        }
        layer = next;
    }
    layer
        .into_iter()
        .map(|(_, w)| w.into_iter().map(usize::from).collect())
        .collect()
}

/// `sum_k c_k k!` evaluated directly.
pub fn factorial_sum(digits: &[u64]) -> num_bigint::BigUint {
    let mut total = num_bigint::BigUint::from(0u32);
    let mut fact = num_bigint::BigUint::from(1u32);
    for (k, &c) in digits.iter().enumerate() {
        fact *= (k + 1) as u64;
        total += &fact * c;
    }
    total
}

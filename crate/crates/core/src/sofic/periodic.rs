use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::automaton::partial_map_has_cycle;
use crate::exec::Exec;

use super::{DeterministicPresentation, SoficError};

#[derive(Clone, Copy, Debug)]
pub struct PeriodicOptions {
    pub exec: Exec,
    /// Bound on distinct partial maps alive in one layer.
    pub max_maps: usize,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        PeriodicOptions {
            exec: Exec::default(),
            max_maps: 5_000_000,
        }
    }
}

/// Sparse partial map on states: sorted `(source, image)` pairs.
type PartialMap = Vec<(u32, u32)>;

/// Number of points `x` with `σ^p x = x`.
///
/// A periodic word `w^∞` lies in the shift iff the partial map
/// `q ↦ δ(q, w)` has a cycle, so words are grouped by that map and counted
/// layer by layer.
pub fn count_periodic(dp: &DeterministicPresentation, p: usize) -> Result<BigUint, SoficError> {
    count_periodic_with(dp, p, &PeriodicOptions::default())
}

pub fn count_periodic_with(
    dp: &DeterministicPresentation,
    p: usize,
    opts: &PeriodicOptions,
) -> Result<BigUint, SoficError> {
    assert!(p > 0, "period must be positive");
    let n = dp.state_count();
    let k = dp.colors().len() as u32;
    if n == 0 {
        return Ok(BigUint::zero());
    }
    let identity: PartialMap = (0..n as u32).map(|q| (q, q)).collect();
    let mut layer: Vec<(PartialMap, BigUint)> = vec![(identity, BigUint::one())];
    for _ in 0..p {
        let stepped = opts.exec.map(&layer, |(map, count)| {
            (0..k)
                .filter_map(|c| {
                    let next: PartialMap = map
                        .iter()
                        .filter_map(|&(s, d)| dp.step(d, c).map(|t| (s, t)))
                        .collect();
                    (!next.is_empty()).then(|| (next, count.clone()))
                })
                .collect::<Vec<_>>()
        });
        let mut merged: HashMap<PartialMap, BigUint> = HashMap::new();
        for (map, count) in stepped.into_iter().flatten() {
            *merged.entry(map).or_default() += count;
        }
        if merged.len() > opts.max_maps {
            return Err(SoficError::MapBudget {
                limit: opts.max_maps,
            });
        }
        layer = merged.into_iter().collect();
    }
    let hits = opts.exec.map(&layer, |(map, count)| {
        let mut dense = vec![None; n];
        for &(s, d) in map {
            dense[s as usize] = Some(d);
        }
        if partial_map_has_cycle(&dense) {
            count.clone()
        } else {
            BigUint::zero()
        }
    });
    Ok(hits.into_iter().sum())
}

/// Entry `p-1` is the number of points of least period exactly `p`.
pub fn least_period_counts(
    dp: &DeterministicPresentation,
    max_p: usize,
    opts: &PeriodicOptions,
) -> Result<Vec<BigUint>, SoficError> {
    let fix: Vec<BigUint> = (1..=max_p)
        .map(|p| count_periodic_with(dp, p, opts))
        .collect::<Result<_, _>>()?;
    let mut least: Vec<BigUint> = Vec::with_capacity(max_p);
    for p in 1..=max_p {
        let mut v = fix[p - 1].clone();
        for d in (1..p).filter(|d| p % d == 0) {
            v -= &least[d - 1];
        }
        least.push(v);
    }
    Ok(least)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::TilingAutomaton;
    use crate::prototile::PrototileSet;
    use crate::sofic::{determinize, drop_subscripts, renewal_presentation_chars};

    fn dp(words: &[(&str, &str)]) -> DeterministicPresentation {
        let ps = PrototileSet::from_broken_words(words).unwrap();
        determinize(&drop_subscripts(&TilingAutomaton::build(&ps).unwrap()))
    }

    #[test]
    fn even_system_counts() {
        // Lucas number minus (-1)^p: B^∞ has two subscripted preimages.
        let d = dp(&[("R", "R"), ("B", "BB")]);
        let want = [2u32, 2, 5, 6, 12, 17, 30];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(count_periodic(&d, i + 1).unwrap(), BigUint::from(*w));
        }
    }

    #[test]
    fn full_shift_and_orbit() {
        let d = dp(&[("R", "R"), ("B", "B")]);
        assert_eq!(count_periodic(&d, 10).unwrap(), BigUint::from(1024u32));
        let orbit = renewal_presentation_chars(&["abc"]).unwrap();
        let counts: Vec<BigUint> = (1..=6).map(|p| count_periodic(&orbit, p).unwrap()).collect();
        let want: Vec<BigUint> = [0u32, 0, 3, 0, 0, 3].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(counts, want);
        let least = least_period_counts(&orbit, 6, &PeriodicOptions::default()).unwrap();
        assert_eq!(least[2], BigUint::from(3u32));
        assert_eq!(least[5], BigUint::zero());
    }

    #[test]
    fn sequential_matches_parallel() {
        let d = dp(&[("R", "R"), ("B", "BB_B"), ("Y", "Y__Y")]);
        for p in 1..=14 {
            let a = count_periodic_with(&d, p, &PeriodicOptions { exec: Exec::Sequential, ..Default::default() });
            let b = count_periodic_with(&d, p, &PeriodicOptions { exec: Exec::Parallel, ..Default::default() });
            assert_eq!(a, b);
        }
    }

    #[test]
    fn map_budget() {
        let d = dp(&[("R", "R"), ("B", "B")]);
        let opts = PeriodicOptions { max_maps: 0, ..Default::default() };
        assert_eq!(count_periodic_with(&d, 2, &opts), Err(SoficError::MapBudget { limit: 0 }));
    }
}

//! Reproducible checks on small worked examples and exhaustive families of
//! prototile sets.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::automaton::{check_window_theorem, EngineError, Symbol, TilingAutomaton, WindowVerdict};
use crate::exec::Exec;
use crate::prototile::{Prototile, PrototileSet};
use crate::report::Report;
use crate::sofic::{
    determinize, drop_subscripts, least_period_counts, renewal_presentation_chars, rendered_language,
    DeterministicPresentation, PeriodicOptions,
};

/// Every prototile with span at most `max_len`, in canonical order.
pub fn small_prototiles(max_len: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        // offset 0 and len-1 are solid; the cells between are free
        let inner = len.saturating_sub(2);
        for mask in 0..(1u64 << inner) {
            let mut offs = vec![0];
            offs.extend((0..inner).filter(|b| mask >> b & 1 == 1).map(|b| b + 1));
            if len > 1 {
                offs.push(len - 1);
            }
            out.push(offs);
        }
    }
    out.sort_by(|a, b| (a.last(), a).cmp(&(b.last(), b)));
    out
}

/// All sets of one or two prototiles of span at most `max_len`, colored `a`
/// and `b`. Two tiles may share a shape.
pub fn small_prototile_sets(max_len: u64) -> Vec<PrototileSet> {
    let shapes = small_prototiles(max_len);
    let tile = |color: &str, offs: &[u64]| Prototile::from_offsets(color, offs.iter().copied()).unwrap();
    let mut sets = Vec::new();
    for (i, s) in shapes.iter().enumerate() {
        sets.push(PrototileSet::new(vec![tile("a", s)]).unwrap());
        for t in &shapes[i..] {
            sets.push(PrototileSet::new(vec![tile("a", s), tile("b", t)]).unwrap());
        }
    }
    sets
}

fn describe(ps: &PrototileSet) -> String {
    ps.tiles()
        .iter()
        .map(|t| format!("{}={:?}", t.color(), t.offsets().collect::<Vec<_>>()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn presentation(ps: &PrototileSet) -> Result<DeterministicPresentation, EngineError> {
    Ok(determinize(&drop_subscripts(&TilingAutomaton::build(ps)?)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropositionOutcome {
    pub checked: usize,
    pub with_period_two: usize,
    pub extended_checked: usize,
    pub with_period_three_or_four: usize,
    pub counterexamples: Vec<String>,
}

/// A point of least period 2 forces two fixed points (sets of span <= 4);
/// a point of least period 3 or 4 forces a fixed point (span <= 5).
pub fn proposition_suite(exec: Exec) -> Result<PropositionOutcome, EngineError> {
    let opts = PeriodicOptions {
        exec,
        ..Default::default()
    };
    let mut out = PropositionOutcome::default();
    for ps in small_prototile_sets(4) {
        let dp = presentation(&ps)?;
        let least = least_period_counts(&dp, 2, &opts).expect("tiny presentations");
        out.checked += 1;
        if !least[1].is_zero() {
            out.with_period_two += 1;
            if least[0] < BigUint::from(2u32) {
                out.counterexamples.push(format!("period 2 without two fixed points: {}", describe(&ps)));
            }
        }
    }
    for ps in small_prototile_sets(5) {
        let dp = presentation(&ps)?;
        let least = least_period_counts(&dp, 4, &opts).expect("tiny presentations");
        out.extended_checked += 1;
        if !least[2].is_zero() || !least[3].is_zero() {
            out.with_period_three_or_four += 1;
            if least[0].is_zero() {
                out.counterexamples.push(format!("period 3 or 4 without a fixed point: {}", describe(&ps)));
            }
        }
    }
    Ok(out)
}

/// A set of at most two prototiles of span `<= max_len` whose tiling system
/// has no fixed point but a point of least period `> 4`, with that period.
pub fn find_periodic_without_fixed_point(max_len: u64, max_period: usize) -> Result<Option<(PrototileSet, usize)>, EngineError> {
    let opts = PeriodicOptions::default();
    for ps in small_prototile_sets(max_len) {
        let dp = presentation(&ps)?;
        if dp.is_empty() {
            continue;
        }
        let least = least_period_counts(&dp, max_period, &opts).expect("small presentations");
        if !least[0].is_zero() {
            continue;
        }
        if let Some(p) = (5..=max_period).find(|&p| !least[p - 1].is_zero()) {
            if (1..5).all(|p| least[p - 1].is_zero()) {
                return Ok(Some((ps, p)));
            }
        }
    }
    Ok(None)
}

/// Words of length `<= max_len` over `{R, B}` in which every run of `B`
/// between two `R`s has even length.
pub fn even_shift_words(max_len: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for len in 0..=max_len {
        for bits in 0..(1u64 << len) {
            let w: String = (0..len).map(|i| if bits >> i & 1 == 1 { 'B' } else { 'R' }).collect();
            let inner_ok = w
                .trim_matches('B')
                .split('R')
                .all(|run| run.len() % 2 == 0);
            if inner_ok {
                out.insert(w);
            }
        }
    }
    out
}

const LANGUAGE_LENGTH: usize = 12;

/// The worked examples: the even system, the renewal equality, a language
/// sample of `{R, BB _ B, Y _ _ Y}`, the window regression and the
/// small-family fixed-point properties.
pub fn worked_examples(exec: Exec) -> Result<Report, EngineError> {
    let mut report = Report::default();

    let even = PrototileSet::from_broken_words(&[("R", "R"), ("B", "BB")]).expect("valid words");
    let dp = presentation(&even)?;
    let language = rendered_language(dp.colors(), &dp.language_up_to(LANGUAGE_LENGTH));
    let h = dp.entropy();
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    report.push(
        "even-system",
        language == even_shift_words(LANGUAGE_LENGTH) && dp.state_count() == 2 && (h - golden).abs() < 1e-9,
        format!(
            "{{R, BB}}: {} states, language equals the even shift up to length {LANGUAGE_LENGTH}, entropy {h:.12}",
            dp.state_count()
        ),
    );

    let example2 = PrototileSet::from_broken_words(&[("R", "R"), ("B", "B _ B")]).expect("valid words");
    let dp2 = presentation(&example2)?;
    let renewal = renewal_presentation_chars(&["R", "BRB", "BBBB"]).expect("nonempty generators");
    let left = rendered_language(dp2.colors(), &dp2.language_up_to(LANGUAGE_LENGTH));
    let right = rendered_language(renewal.colors(), &renewal.language_up_to(LANGUAGE_LENGTH));
    report.push(
        "renewal-equality",
        left == right,
        format!(
            "{{R, B _ B}} and the renewal system of R, BRB, BBBB share {} words up to length {LANGUAGE_LENGTH}",
            left.len()
        ),
    );

    let example3 = PrototileSet::from_broken_words(&[("R", "R"), ("B", "BB _ B"), ("Y", "Y _ _ Y")]).expect("valid words");
    let dp3 = presentation(&example3)?;
    let words = dp3.language_up_to(8);
    let mut counts = vec![0usize; 9];
    for w in &words {
        counts[w.len()] += 1;
    }
    let sample: Vec<String> = rendered_language(dp3.colors(), &words)
        .into_iter()
        .filter(|w| w.len() == 6)
        .take(8)
        .collect();
    report.push(
        "example-3-language",
        !dp3.is_empty(),
        format!(
            "{{R, BB _ B, Y _ _ Y}}: factor counts by length 0..=8 {counts:?}, entropy {:.12}, sample {}",
            dp3.entropy(),
            sample.join(" ")
        ),
    );

    let short = check_window_theorem(&even, 1)?;
    let long = check_window_theorem(&even, 2)?;
    let all_b1 = vec![Symbol { tile: 1, elem: 0 }];
    let regression = matches!(&short.verdict, WindowVerdict::Counterexample { word, local: true, member: false } if *word == all_b1)
        && long.verdict == WindowVerdict::Holds;
    report.push(
        "window-regression",
        regression,
        format!(
            "{{R, BB}}: window 1 admits the non-member B1 B1 B1 ...; window 2 agrees with membership on all periods <= {}",
            long.period_bound
        ),
    );

    let prop = proposition_suite(exec)?;
    report.push(
        "period-two",
        prop.counterexamples.iter().all(|c| !c.starts_with("period 2")),
        format!(
            "{} sets of at most two prototiles of span <= 4, {} with a point of least period 2, all with two fixed points",
            prop.checked, prop.with_period_two
        ),
    );
    report.push(
        "period-three-four",
        prop.counterexamples.iter().all(|c| !c.starts_with("period 3")),
        format!(
            "{} sets of span <= 5, {} with a point of least period 3 or 4, all with a fixed point",
            prop.extended_checked, prop.with_period_three_or_four
        ),
    );
    let witness = match find_periodic_without_fixed_point(5, 8)? {
        Some((ps, p)) => format!("{} has a point of least period {p} and no fixed point", describe(&ps)),
        None => "no set of span <= 5 has a point of least period 5..=8 without a fixed point".to_string(),
    };
    report.push("period-above-four", true, witness);
    if !prop.counterexamples.is_empty() {
        report.push("counterexamples", false, prop.counterexamples.join("; "));
    }
    Ok(report)
}

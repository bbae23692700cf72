use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use crate::exec::Exec;
use crate::factorial::factorial;
use crate::prototile::Run;

use super::output::Shaped;
use super::{fillings, BarbellSpec, CompilerOutput, RackSpec, Report};

#[derive(Clone, Copy, Debug)]
pub struct StructuralOptions {
    /// Exhaustive filling search runs for `k <= filling_bound`.
    pub filling_bound: usize,
    /// Racks checked per matrix entry when the list is not materialized.
    pub samples_per_entry: usize,
    pub exec: Exec,
}

impl Default for StructuralOptions {
    fn default() -> Self {
        StructuralOptions {
            filling_bound: 3,
            samples_per_entry: 16,
            exec: Exec::default(),
        }
    }
}

pub fn verify_structural(out: &CompilerOutput) -> Report {
    verify_structural_with(out, &StructuralOptions::default())
}

/// Checks the counting identity, head/tail complementarity, barbell
/// fillings and shape geometry, all by exact arithmetic or exhaustive search.
pub fn verify_structural_with(out: &CompilerOutput, opts: &StructuralOptions) -> Report {
    let mut report = Report::default();
    let p = &out.params;
    let params_ok = p.n > p.dim && p.m == 13 * p.n && p.dim == out.matrix.dim();
    report.push(
        "parameters",
        params_ok,
        format!("V = {}, n = {}, m = {}, mode {}", p.dim, p.n, p.m, p.mode),
    );
    if !params_ok {
        return report;
    }
    let power = out.matrix.pow(p.m as u64);
    report.push(
        "power",
        power == out.power,
        if power == out.power {
            format!("stored A^{} matches recomputation", p.m)
        } else {
            format!("stored A^{} differs from recomputation", p.m)
        },
    );
    counting_identity(out, &power, &mut report);
    head_tail(out, &mut report);
    filling_counts(out, opts, &mut report);
    geometry(out, opts, &mut report);
    report
}

fn counting_identity(out: &CompilerOutput, power: &crate::matrix::IntMatrix, report: &mut Report) {
    let v = out.params.dim;
    let n = out.params.n;
    // (I, J) -> k -> number of racks
    let mut per_k: BTreeMap<(usize, usize), BTreeMap<usize, u64>> = BTreeMap::new();
    let mut problems: Vec<String> = Vec::new();
    let source = match &out.racks {
        Some(racks) => {
            let mut seen = BTreeSet::new();
            for r in racks {
                let s = r.spec;
                if !seen.insert(s) {
                    problems.push(format!("duplicate rack {}", s.color()));
                }
                *per_k.entry((s.from, s.to)).or_default().entry(s.k).or_default() += 1;
            }
            "rack list"
        }
        None => {
            for (a, row) in out.digits.iter().enumerate() {
                for (b, d) in row.iter().enumerate() {
                    for (k, c) in d.nonzero() {
                        per_k.entry((a + 1, b + 1)).or_default().insert(k, c);
                    }
                }
            }
            "factorial digits"
        }
    };
    for (&(a, b), _) in per_k.iter().filter(|((a, b), _)| *a == 0 || *b == 0 || *a > v || *b > v) {
        problems.push(format!("rack indices ({a}, {b}) outside 1..={v}"));
    }
    for a in 1..=v {
        for b in 1..=v {
            let counts = per_k.get(&(a, b));
            let total: BigUint = counts
                .map(|m| m.iter().map(|(&k, &c)| factorial(k) * c).sum())
                .unwrap_or_default();
            let want = power.get(a - 1, b - 1);
            if &total != want {
                problems.push(format!("entry ({a}, {b}): racks give {total}, A^m has {want}"));
            }
            let digits = &out.digits[a - 1][b - 1];
            if &digits.value() != want {
                problems.push(format!("entry ({a}, {b}): stored digits encode {}", digits.value()));
            }
            if let Some(m) = counts {
                for (&k, &c) in m {
                    if k == 0 || k > n || c > k as u64 {
                        problems.push(format!("entry ({a}, {b}): {c} racks with k = {k}"));
                    }
                }
            }
        }
    }
    let detail = if problems.is_empty() {
        format!("sum of c_k * k! equals (A^m)_IJ for all {} entries ({source})", v * v)
    } else {
        problems.join("; ")
    };
    report.push("counting-identity", problems.is_empty(), detail);
}

/// Cells of `[0, 2n)` covered by the head for `I` and by the previous
/// rack's tail for `J`.
fn head_tail(out: &CompilerOutput, report: &mut Report) {
    let (v, n) = (out.params.dim, out.params.n);
    let n64 = n as u64;
    let mut problems = Vec::new();
    for a in 1..=v {
        for b in 1..=v {
            let head = RackSpec { from: a, to: 1, k: 1, i: 0 };
            let tail = RackSpec { from: 1, to: b, k: 1, i: 0 };
            let head_cells: BTreeSet<u64> = cells(&head.runs(n)).filter(|&c| c < 2 * n64).collect();
            let tail_cells: BTreeSet<u64> = cells(&tail.runs(n))
                .filter(|&c| c >= 13 * n64)
                .map(|c| c - 13 * n64)
                .collect();
            let collision = head_cells.intersection(&tail_cells).next().copied();
            let uncovered = (0..2 * n64).find(|c| !head_cells.contains(c) && !tail_cells.contains(c));
            let fits = collision.is_none() && uncovered.is_none();
            if fits != (a == b) {
                problems.push(format!(
                    "head {a} after tail {b}: collision {collision:?}, uncovered {uncovered:?}"
                ));
            }
        }
    }
    let detail = if problems.is_empty() {
        format!("tail J fills head I exactly iff I = J, for all {} pairs", v * v)
    } else {
        problems.join("; ")
    };
    report.push("head-tail", problems.is_empty(), detail);
}

fn filling_counts(out: &CompilerOutput, opts: &StructuralOptions, report: &mut Report) {
    let n = out.params.n;
    let ks: Vec<usize> = (1..=n.min(opts.filling_bound)).collect();
    let results = opts.exec.map(&ks, |&k| {
        let found = fillings(n, k);
        let perms: BTreeSet<Vec<usize>> = found.iter().filter_map(|f| f.permutation()).collect();
        let all_valid = found.iter().all(|f| f.permutation().is_some());
        (k, found.len(), perms.len(), all_valid)
    });
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, count, distinct, all_valid) in results {
        let want = factorial(k);
        let good = BigUint::from(count) == want && distinct == count && all_valid;
        ok &= good;
        parts.push(format!("k = {k}: {count} fillings, {distinct} permutations"));
    }
    report.push("fillings", ok, parts.join("; "));
}

fn cells(runs: &[Run]) -> impl Iterator<Item = u64> + '_ {
    runs.iter().flat_map(|r| r.start..r.end())
}

fn geometry(out: &CompilerOutput, opts: &StructuralOptions, report: &mut Report) {
    let (v, n) = (out.params.dim, out.params.n);
    let mut problems = Vec::new();
    let rs: BTreeSet<u64> = out.barbells.iter().map(|b| b.spec.r).collect();
    if out.barbells.len() != 2 * n - 1 || rs != (0..=2 * n as u64 - 2).collect() {
        problems.push(format!(
            "expected barbells r = 0..={}, found {} barbells",
            2 * n - 2,
            out.barbells.len()
        ));
    }
    for b in &out.barbells {
        problems.extend(barbell_problem(b));
    }
    let (racks, how): (Vec<Shaped<RackSpec>>, &str) = match &out.racks {
        Some(list) => (list.clone(), "racks (all)"),
        None => (sample_racks(out, opts.samples_per_entry), "sampled racks"),
    };
    let checked = racks.len();
    let found = opts.exec.map(&racks, |r| rack_problem(r, v, n));
    problems.extend(found.into_iter().flatten());
    let ok = problems.is_empty();
    let detail = if ok {
        format!("{} barbells and {checked} {how} have the expected shape", out.barbells.len())
    } else {
        problems.truncate(10);
        problems.join("; ")
    };
    report.push("geometry", ok, detail);
}

fn barbell_problem(b: &Shaped<BarbellSpec>) -> Option<String> {
    let solid = cells(&b.runs).count();
    let span = b.runs.last().map_or(0, |r| r.end());
    (b.runs != b.spec.runs() || solid != 4 || span != 2 * b.spec.r + 5 || b.name != b.spec.color())
        .then(|| format!("barbell {} has runs {:?}", b.name, b.runs))
}

fn rack_problem(r: &Shaped<RackSpec>, v: usize, n: usize) -> Option<String> {
    let s = r.spec;
    let n64 = n as u64;
    if s.from == 0 || s.from > v || s.to == 0 || s.to > v || s.k == 0 || s.k > n || s.i >= s.k as u64 {
        return Some(format!("rack {} has parameters out of range", r.name));
    }
    if r.name != s.color() {
        return Some(format!("rack named {} carries parameters of {}", r.name, s.color()));
    }
    if r.runs != s.runs(n) {
        return Some(format!("rack {} deviates from its formula", r.name));
    }
    let span = r.runs.last().map_or(0, |x| x.end());
    let all: Vec<u64> = cells(&r.runs).collect();
    let head = all.iter().filter(|&&c| c < 2 * n64).count();
    let tail = all.iter().filter(|&&c| c >= 13 * n64).count();
    let center = all.len() - head - tail;
    if span != 13 * n64 + 2 * s.to as u64 || head != 2 * n - s.from || tail != s.to || center != 11 * n - 4 * s.k {
        return Some(format!(
            "rack {}: length {span}, head {head}, center {center}, tail {tail}",
            r.name
        ));
    }
    None
}

/// A deterministic spread of racks per entry: for evenly spaced nonzero
/// digits, the first and last `i`.
fn sample_racks(out: &CompilerOutput, per_entry: usize) -> Vec<Shaped<RackSpec>> {
    let n = out.params.n;
    let mut picked = Vec::new();
    for (a, row) in out.digits.iter().enumerate() {
        for (b, d) in row.iter().enumerate() {
            let nz: Vec<(usize, u64)> = d.nonzero().collect();
            if nz.is_empty() {
                continue;
            }
            let stride = nz.len().div_ceil(per_entry.max(1)).max(1);
            for &(k, c) in nz.iter().step_by(stride).chain(nz.last()) {
                for i in [0, c - 1] {
                    let spec = RackSpec { from: a + 1, to: b + 1, k, i };
                    picked.push(Shaped { name: spec.color(), spec, runs: spec.runs(n) });
                }
            }
        }
    }
    picked.sort_by_key(|s| s.spec);
    picked.dedup_by_key(|s| s.spec);
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{choose_parameters, compile, compile_with, CompileOptions, Mode};
    use crate::matrix::IntMatrix;

    fn compiled(rows: &[&[u64]], mode: Mode) -> CompilerOutput {
        let a = IntMatrix::from_u64(rows).unwrap();
        compile(&a, &choose_parameters(&a, mode).unwrap()).unwrap()
    }

    #[test]
    fn small_outputs_pass() {
        for (rows, mode) in [
            (&[&[1u64][..]][..], Mode::Strict),
            (&[&[0, 1][..], &[1, 0][..]][..], Mode::Relaxed),
            (&[&[1, 0][..], &[0, 1][..]][..], Mode::Relaxed),
            (&[&[0u64][..]][..], Mode::Strict),
            (&[&[1, 1][..], &[0, 1][..]][..], Mode::Relaxed),
        ] {
            let report = verify_structural(&compiled(rows, mode));
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn swap_counting_identity() {
        let out = compiled(&[&[0, 1], &[1, 0]], Mode::Relaxed);
        assert_eq!(out.digits[0][1].digits(), &[1, 0, 0]);
        assert_eq!(out.power.get(0, 1), &BigUint::from(1u32));
    }

    #[test]
    fn deleted_rack_breaks_counting() {
        let mut out = compiled(&[&[0, 1], &[1, 0]], Mode::Relaxed);
        out.racks.as_mut().unwrap().pop();
        let report = verify_structural(&out);
        assert!(!report.get("counting-identity").unwrap().passed);
        assert!(report.get("geometry").unwrap().passed);
    }

    #[test]
    fn bent_rack_breaks_geometry() {
        let mut out = compiled(&[&[1]], Mode::Strict);
        out.racks.as_mut().unwrap()[0].runs.pop();
        let report = verify_structural(&out);
        assert!(!report.get("geometry").unwrap().passed);
    }

    #[test]
    fn counts_only_samples() {
        let a = IntMatrix::from_u64(&[&[1, 1], &[1, 0]]).unwrap();
        let p = crate::compiler::CompilerParams::new(2, 40, Mode::Relaxed);
        // A^{520} overflows 41!, so pick parameters from the search instead
        assert!(compile(&a, &p).is_err());
        let p = choose_parameters(&a, Mode::Relaxed).unwrap();
        let out = compile_with(&a, &p, &CompileOptions { counts_only: true, ..Default::default() }).unwrap();
        let report = verify_structural(&out);
        assert!(report.passed(), "{report}");
    }
}

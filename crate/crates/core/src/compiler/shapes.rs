use serde::{Deserialize, Serialize};

use crate::prototile::{Prototile, PrototileError, Run};

/// `a a`, `2r+1` blanks, `a a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BarbellSpec {
    pub r: u64,
}

impl BarbellSpec {
    pub fn color(&self) -> String {
        format!("barbell:{}", self.r)
    }

    pub fn runs(&self) -> Vec<Run> {
        vec![Run { start: 0, len: 2 }, Run { start: 2 * self.r + 3, len: 2 }]
    }

    pub fn prototile(&self) -> Prototile {
        Prototile::from_runs(self.color(), self.runs()).expect("barbell runs are canonical")
    }
}

/// One rack: head `(a _)^I a^{2n-2I}`, center
/// `a^{3n+i} _^{2k} a _^{2k} a^{8n-4k-1-i}`, tail `(_ a)^J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RackSpec {
    #[serde(rename = "I")]
    pub from: usize,
    #[serde(rename = "J")]
    pub to: usize,
    pub k: usize,
    pub i: u64,
}

impl RackSpec {
    pub fn color(&self) -> String {
        format!("rack:{}.{}.{}.{}", self.from, self.to, self.k, self.i)
    }

    pub fn length(&self, n: usize) -> u64 {
        13 * n as u64 + 2 * self.to as u64
    }

    /// Start of the first center gap.
    pub fn gap_start(&self, n: usize) -> u64 {
        5 * n as u64 + self.i
    }

    /// Absolute offset of center gap slot `s` in `1..=4k`.
    pub fn slot_offset(&self, n: usize, s: u64) -> u64 {
        let k = self.k as u64;
        let base = self.gap_start(n) + s - 1;
        if s > 2 * k {
            base + 1
        } else {
            base
        }
    }

    pub fn runs(&self, n: usize) -> Vec<Run> {
        let (n64, big_i, k) = (n as u64, self.from as u64, self.k as u64);
        let mut runs: Vec<Run> = (0..big_i).map(|t| Run { start: 2 * t, len: 1 }).collect();
        let gap = self.gap_start(n);
        runs.push(Run {
            start: 2 * big_i,
            len: gap - 2 * big_i,
        });
        runs.push(Run {
            start: gap + 2 * k,
            len: 1,
        });
        let tail_center = gap + 4 * k + 1;
        runs.push(Run {
            start: tail_center,
            len: 13 * n64 - tail_center,
        });
        runs.extend((0..self.to as u64).map(|t| Run {
            start: 13 * n64 + 2 * t + 1,
            len: 1,
        }));
        runs
    }

    pub fn prototile(&self, n: usize) -> Result<Prototile, PrototileError> {
        Prototile::from_runs(self.color(), self.runs(n))
    }
}

/// What a compiled color stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Barbell(BarbellSpec),
    Rack(RackSpec),
}

impl Role {
    pub fn parse(color: &str) -> Option<Role> {
        if let Some(r) = color.strip_prefix("barbell:") {
            return r.parse().ok().map(|r| Role::Barbell(BarbellSpec { r }));
        }
        let rest = color.strip_prefix("rack:")?;
        let parts: Vec<&str> = rest.split('.').collect();
        let [from, to, k, i] = parts.as_slice() else {
            return None;
        };
        Some(Role::Rack(RackSpec {
            from: from.parse().ok()?,
            to: to.parse().ok()?,
            k: k.parse().ok()?,
            i: i.parse().ok()?,
        }))
    }
}

/// Barbells exactly covering the `4k` gap cells of a center.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BarbellFilling {
    pub k: usize,
    /// `(first slot, barbell)`, sorted by slot.
    pub placements: Vec<(u64, BarbellSpec)>,
}

impl BarbellFilling {
    /// The filling with a barbell from slots `2j-1, 2j` to
    /// `2(k+π(j))-1, 2(k+π(j))`; `pi` is 1-based.
    pub fn from_permutation(pi: &[usize]) -> Self {
        let k = pi.len();
        let placements = pi
            .iter()
            .enumerate()
            .map(|(idx, &l)| {
                let j = idx as u64 + 1;
                let r = (k + l) as u64 - j - 1;
                (2 * j - 1, BarbellSpec { r })
            })
            .collect();
        BarbellFilling { k, placements }
    }

    /// Reads `π` off the placements, if they follow the slot pattern.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        let k = self.k as u64;
        let mut pi = vec![0usize; self.k];
        for &(slot, b) in &self.placements {
            if slot % 2 == 0 || slot > 2 * k {
                return None;
            }
            let j = slot.div_ceil(2);
            let l = (j + b.r + 1).checked_sub(k).filter(|&l| (1..=k).contains(&l))?;
            if pi[j as usize - 1] != 0 {
                return None;
            }
            pi[j as usize - 1] = l as usize;
        }
        let mut seen = pi.clone();
        seen.sort_unstable();
        (seen == (1..=self.k).collect::<Vec<_>>()).then_some(pi)
    }
}

/// Every way to tile the center gaps of a `k`-rack with barbells
/// `r = 0..=2n-2`, by exhaustive search over cells.
pub fn fillings(n: usize, k: usize) -> Vec<BarbellFilling> {
    let rack = RackSpec {
        from: 1,
        to: 1,
        k,
        i: 0,
    };
    let slots: Vec<u64> = (1..=4 * k as u64).map(|s| rack.slot_offset(n, s)).collect();
    let origin = slots[0];
    let cells: Vec<u64> = slots.iter().map(|c| c - origin).collect();
    let width = *cells.last().unwrap() as usize + 1;
    let mut open = vec![false; width];
    for &c in &cells {
        open[c as usize] = true;
    }
    let slot_of = |cell: u64| cells.iter().position(|&c| c == cell).unwrap() as u64 + 1;
    let barbells: Vec<BarbellSpec> = (0..=2 * n as u64 - 2).map(|r| BarbellSpec { r }).collect();

    let mut out = Vec::new();
    let mut stack: Vec<(u64, BarbellSpec)> = Vec::new();
    search(&mut open, &barbells, &mut stack, &mut |placed| {
        out.push(BarbellFilling {
            k,
            placements: placed.iter().map(|&(c, b)| (slot_of(c), b)).collect(),
        })
    });
    out.sort();
    out
}

fn search<F: FnMut(&[(u64, BarbellSpec)])>(
    open: &mut [bool],
    barbells: &[BarbellSpec],
    stack: &mut Vec<(u64, BarbellSpec)>,
    emit: &mut F,
) {
    let Some(first) = open.iter().position(|&o| o) else {
        emit(stack);
        return;
    };
    for &b in barbells {
        let cells: Vec<usize> = b
            .runs()
            .iter()
            .flat_map(|run| run.start..run.end())
            .map(|o| first + o as usize)
            .collect();
        if cells.iter().all(|&c| c < open.len() && open[c]) {
            for &c in &cells {
                open[c] = false;
            }
            stack.push((first as u64, b));
            search(open, barbells, stack, emit);
            stack.pop();
            for &c in &cells {
                open[c] = true;
            }
        }
    }
}

//! Realizing the edge shift of a nonnegative integer matrix `A` as a tiling
//! system, up to a power of the shift.
//!
//! With `m = 13n` the compiled system splits into `m` pieces cyclically
//! permuted by the shift, and `σ^m` on each piece is conjugate to the edge
//! shift of `A^m`. Arcs of `A^m` from `I` to `J` are counted in factorial
//! base: one *rack* per unit of each digit `c_k`, each holding `k!`
//! arrangements of *barbells* in its center.

mod dynamics;
mod output;
mod shapes;
mod structural;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factorial::FactorialError;
use crate::format::FormatError;
use crate::matrix::{IntMatrix, MatrixError};
use crate::prototile::PrototileError;

pub use dynamics::{verify_dynamics, verify_dynamics_with, DynamicsBudget, DynamicsReport};
pub use output::{compile, compile_with, CompileOptions, CompilerOutput, COMPILED_FORMAT};
pub use crate::report::{Check, Report};
pub use shapes::{fillings, BarbellFilling, BarbellSpec, RackSpec, Role};
pub use structural::{verify_structural, verify_structural_with, StructuralOptions};

/// Parameter searches give up beyond this `n`.
pub const MAX_SEARCH_N: usize = 50_000;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Factorial(#[from] FactorialError),
    #[error(transparent)]
    Prototile(#[from] PrototileError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("no n <= {limit} satisfies the {mode} parameter condition")]
    NoParameter { mode: Mode, limit: usize },
    #[error("parameters do not fit the matrix: {0}")]
    BadParams(String),
    #[error("compiled file is inconsistent: {0}")]
    Inconsistent(String),
    #[error("the rack list was not materialized; recompile without counts-only mode")]
    RacksNotMaterialized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `(V · max A_ij)^{13n} < (n+1)!`.
    Strict,
    /// Every entry of `A^{13n}` is below `(n+1)!`.
    Relaxed,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Relaxed => "relaxed",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Mode::Strict),
            "relaxed" => Ok(Mode::Relaxed),
            other => Err(format!("unknown mode `{other}` (expected strict or relaxed)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompilerParams {
    pub dim: usize,
    pub n: usize,
    pub m: usize,
    pub mode: Mode,
}

impl CompilerParams {
    pub fn new(dim: usize, n: usize, mode: Mode) -> Self {
        CompilerParams {
            dim,
            n,
            m: 13 * n,
            mode,
        }
    }
}

/// The least `n > V` meeting the mode's representability condition.
pub fn choose_parameters(a: &IntMatrix, mode: Mode) -> Result<CompilerParams, CompileError> {
    let v = a.dim();
    let n = match mode {
        Mode::Strict => strict_n(v, &a.max_entry())?,
        Mode::Relaxed => relaxed_n(a)?,
    };
    Ok(CompilerParams::new(v, n, mode))
}

fn strict_n(v: usize, max_entry: &BigUint) -> Result<usize, CompileError> {
    let base = max_entry * v;
    let step = base.pow(13);
    let mut lhs = step.pow((v + 1) as u32);
    let mut fact: BigUint = (1..=(v + 2) as u64).product();
    for n in v + 1..=MAX_SEARCH_N {
        if lhs < fact {
            return Ok(n);
        }
        lhs *= &step;
        fact *= (n + 2) as u64;
    }
    // Past the exact range, Stirling bounds decide the comparison with a
    // margin; a result inside the margin is refused rather than guessed.
    let log_step = log_biguint(&step);
    let ambiguous = |limit| CompileError::NoParameter {
        mode: Mode::Strict,
        limit,
    };
    for n in MAX_SEARCH_N + 1..=1 << 40 {
        let lhs = log_step * n as f64;
        let (lo, hi) = log_factorial_bounds(n as u64 + 1);
        let margin = 1e-9 * lhs.max(1.0);
        if lo > lhs + margin {
            return Ok(n);
        }
        if hi >= lhs - margin {
            return Err(ambiguous(n));
        }
    }
    Err(ambiguous(1 << 40))
}

fn relaxed_n(a: &IntMatrix) -> Result<usize, CompileError> {
    let v = a.dim();
    let step = a.pow(13);
    let mut power = a.pow(13 * (v as u64 + 1));
    let mut fact: BigUint = (1..=(v + 2) as u64).product();
    for n in v + 1..=MAX_SEARCH_N {
        if power.max_entry() < fact {
            return Ok(n);
        }
        power = power.mul(&step);
        fact *= (n + 2) as u64;
    }
    Err(CompileError::NoParameter {
        mode: Mode::Relaxed,
        limit: MAX_SEARCH_N,
    })
}

fn log_biguint(x: &BigUint) -> f64 {
    if let Some(f) = x.to_f64().filter(|f| f.is_finite()) {
        return f.ln();
    }
    let bits = x.bits();
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Stirling bounds on `ln(n!)`.
fn log_factorial_bounds(n: u64) -> (f64, f64) {
    let x = n as f64;
    let base = x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln();
    (base + 1.0 / (12.0 * x + 1.0), base + 1.0 / (12.0 * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn representable_bound(n: usize) -> BigUint {
        (1..=(n + 1) as u64).fold(BigUint::one(), |acc, k| acc * k)
    }

    fn mat(rows: &[&[u64]]) -> IntMatrix {
        IntMatrix::from_u64(rows).unwrap()
    }

    /// Exact check of the strict condition for one `n`.
    fn strict_holds(a: &IntMatrix, n: usize) -> bool {
        let base = a.max_entry() * a.dim();
        n > a.dim() && base.pow(13 * n as u32) < representable_bound(n)
    }

    #[test]
    fn parameter_examples() {
        let p = choose_parameters(&mat(&[&[1]]), Mode::Strict).unwrap();
        assert_eq!((p.n, p.m), (2, 26));
        assert!(strict_holds(&mat(&[&[1]]), 2));
        let p = choose_parameters(&mat(&[&[0, 1], &[1, 0]]), Mode::Relaxed).unwrap();
        assert_eq!((p.n, p.m), (3, 39));
        let p = choose_parameters(&mat(&[&[1]]), Mode::Relaxed).unwrap();
        assert_eq!(p.n, 2);
        let p = choose_parameters(&mat(&[&[0]]), Mode::Strict).unwrap();
        assert_eq!(p.n, 2);
    }

    #[test]
    fn strict_search_is_minimal() {
        // 2^{13n} < (n+1)! first holds near n = 2.2e4
        let a = mat(&[&[2]]);
        let n = choose_parameters(&a, Mode::Strict).unwrap().n;
        let two = BigUint::from(2u32);
        let holds = |n: usize| two.pow(13 * n as u32) < representable_bound(n);
        assert!(holds(n));
        assert!(!holds(n - 1));
    }

    #[test]
    fn relaxed_golden_mean() {
        let a = mat(&[&[1, 1], &[1, 0]]);
        let n = choose_parameters(&a, Mode::Relaxed).unwrap().n;
        assert!(a.pow(13 * n as u64).max_entry() < representable_bound(n));
        assert!(a.pow(13 * (n as u64 - 1)).max_entry() >= representable_bound(n - 1));
        assert!((1400..1600).contains(&n));
    }

    #[test]
    fn stirling_bounds_bracket() {
        for n in [1u64, 5, 20, 170] {
            let exact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
            let (lo, hi) = log_factorial_bounds(n);
            assert!(lo <= exact + 1e-9 && exact <= hi + 1e-9);
        }
    }
}

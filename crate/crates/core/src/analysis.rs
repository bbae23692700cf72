//! The full pipeline from a prototile set to its sofic invariants.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::automaton::{BuildOptions, EngineError, TilingAutomaton};
use crate::exec::Exec;
use crate::prototile::PrototileSet;
use crate::sofic::{count_periodic_with, determinize_with, drop_subscripts, DeterminizeOptions, DeterministicPresentation, PeriodicOptions, SoficError};
use crate::spectral::CharPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Sofic(#[from] SoficError),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AnalyzeOptions {
    pub build: BuildOptions,
    pub determinize: DeterminizeOptions,
}

impl AnalyzeOptions {
    pub fn with_exec(exec: Exec) -> Self {
        let mut opts = AnalyzeOptions::default();
        opts.build.exec = exec;
        opts.determinize.exec = exec;
        opts
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub longest_length: u64,
    pub automaton: TilingAutomaton,
    pub presentation: DeterministicPresentation,
    pub entropy: f64,
    /// Characteristic polynomial of the dominant component, when small.
    pub char_poly: Option<CharPoly>,
    pub fixed_points: BigUint,
}

impl Analysis {
    pub fn tiles_integers(&self) -> bool {
        !self.automaton.is_empty()
    }
}

pub fn analyze(ps: &PrototileSet) -> Result<Analysis, AnalysisError> {
    analyze_with(ps, &AnalyzeOptions::default())
}

pub fn analyze_with(ps: &PrototileSet, opts: &AnalyzeOptions) -> Result<Analysis, AnalysisError> {
    let automaton = TilingAutomaton::build_with(ps, &opts.build)?;
    let presentation = determinize_with(&drop_subscripts(&automaton), &opts.determinize)?;
    let spectral = presentation.spectral();
    let fixed_points = if presentation.is_empty() {
        BigUint::default()
    } else {
        let periodic = PeriodicOptions {
            exec: opts.determinize.exec,
            ..Default::default()
        };
        count_periodic_with(&presentation, 1, &periodic)?
    };
    Ok(Analysis {
        longest_length: ps.longest_length(),
        entropy: spectral.log(),
        char_poly: spectral.dominant.and_then(|d| d.char_poly),
        fixed_points,
        automaton,
        presentation,
    })
}

/// `x` with `digits` significant digits, fixed notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "L: {}", self.longest_length)?;
        writeln!(
            f,
            "subscripted automaton: {} states, {} edges ({} explored)",
            self.automaton.state_count(),
            self.automaton.edges().len(),
            self.automaton.explored_states()
        )?;
        writeln!(f, "tiles Z: {}", self.tiles_integers())?;
        writeln!(f, "deterministic presentation: {} states", self.presentation.state_count())?;
        write!(f, "entropy: {}", format_significant(self.entropy, 12))?;
        match &self.char_poly {
            Some(p) => writeln!(f, " (log of the largest root of {p})")?,
            None => writeln!(f)?,
        }
        writeln!(f, "fixed points: {}", self.fixed_points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_system() {
        let ps = PrototileSet::from_broken_words(&[("R", "R"), ("B", "BB")]).unwrap();
        let a = analyze(&ps).unwrap();
        assert!((a.entropy - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-9);
        assert_eq!(a.fixed_points, BigUint::from(2u32));
        assert_eq!(a.char_poly.as_ref().unwrap().to_string(), "x^2 - x - 1");
        assert!(a.tiles_integers());
    }

    #[test]
    fn empty_and_trivial() {
        let bad = PrototileSet::from_broken_words(&[("B", "BB _ B")]).unwrap();
        let a = analyze(&bad).unwrap();
        assert!(!a.tiles_integers());
        assert_eq!(a.fixed_points, BigUint::default());
        let one = PrototileSet::from_broken_words(&[("a", "a")]).unwrap();
        let a = analyze(&one).unwrap();
        assert_eq!(a.entropy, 0.0);
        assert_eq!(a.fixed_points, BigUint::from(1u32));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.48121182505960347, 12), "0.481211825060");
        assert_eq!(format_significant(1.5, 3), "1.50");
        assert_eq!(format_significant(0.0, 12), "0");
    }
}

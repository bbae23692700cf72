use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::factorial::{self, FactorialDigits};
use crate::format::FormatError;
use crate::matrix::{Cell, IntMatrix};
use crate::prototile::{Prototile, PrototileSet, Run};

use super::{BarbellSpec, CompileError, CompilerParams, RackSpec};

/// The `format` tag of compiled files.
pub const COMPILED_FORMAT: &str = "intile-compiled";
const COMPILED_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug)]
pub struct CompileOptions {
    /// Never materialize the rack list.
    pub counts_only: bool,
    /// Materialize racks only if there are at most this many.
    pub materialize_limit: u64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            counts_only: false,
            materialize_limit: 100_000,
        }
    }
}

/// A shape with its stored solid runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shaped<S> {
    pub name: String,
    pub spec: S,
    pub runs: Vec<Run>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilerOutput {
    pub params: CompilerParams,
    pub matrix: IntMatrix,
    /// `A^m` as stored.
    pub power: IntMatrix,
    /// `digits[I-1][J-1]` encodes `(A^m)_{IJ}`.
    pub digits: Vec<Vec<FactorialDigits>>,
    pub barbells: Vec<Shaped<BarbellSpec>>,
    /// `None` in counts-only mode.
    pub racks: Option<Vec<Shaped<RackSpec>>>,
}

pub fn compile(a: &IntMatrix, params: &CompilerParams) -> Result<CompilerOutput, CompileError> {
    compile_with(a, params, &CompileOptions::default())
}

pub fn compile_with(
    a: &IntMatrix,
    params: &CompilerParams,
    opts: &CompileOptions,
) -> Result<CompilerOutput, CompileError> {
    let v = a.dim();
    if params.dim != v || params.n <= v || params.m != 13 * params.n {
        return Err(CompileError::BadParams(format!(
            "dim {} n {} m {} for a {v}x{v} matrix",
            params.dim, params.n, params.m
        )));
    }
    let n = params.n;
    let power = a.pow(params.m as u64);
    let digits = (0..v)
        .map(|i| {
            (0..v)
                .map(|j| factorial::encode(power.get(i, j), n))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let barbells = (0..=2 * n as u64 - 2)
        .map(|r| {
            let spec = BarbellSpec { r };
            Shaped {
                name: spec.color(),
                spec,
                runs: spec.runs(),
            }
        })
        .collect();
    let mut out = CompilerOutput {
        params: *params,
        matrix: a.clone(),
        power,
        digits,
        barbells,
        racks: None,
    };
    if !opts.counts_only && out.total_racks() <= opts.materialize_limit {
        out.racks = Some(
            out.rack_stream()
                .map(|spec| Shaped {
                    name: spec.color(),
                    spec,
                    runs: spec.runs(n),
                })
                .collect(),
        );
    }
    Ok(out)
}

impl CompilerOutput {
    /// Racks implied by the digits, ordered by `(I, J, k, i)`.
    pub fn rack_stream(&self) -> impl Iterator<Item = RackSpec> + '_ {
        let v = self.params.dim;
        (0..v).flat_map(move |a| {
            (0..v).flat_map(move |b| {
                self.digits[a][b].nonzero().flat_map(move |(k, c)| {
                    (0..c).map(move |i| RackSpec {
                        from: a + 1,
                        to: b + 1,
                        k,
                        i,
                    })
                })
            })
        })
    }

    /// Number of racks per entry, `Σ_k c_k`.
    pub fn rack_counts(&self) -> Vec<Vec<u64>> {
        self.digits
            .iter()
            .map(|row| row.iter().map(|d| d.digits().iter().sum()).collect())
            .collect()
    }

    pub fn total_racks(&self) -> u64 {
        self.rack_counts().iter().flatten().sum()
    }

    pub fn barbell_count(&self) -> usize {
        self.barbells.len()
    }

    /// True when no rack exists, so nothing tiles the line.
    pub fn is_empty_system(&self) -> bool {
        match &self.racks {
            Some(r) => r.is_empty(),
            None => self.power.is_zero(),
        }
    }

    /// The prototile set built from the stored shapes.
    pub fn prototile_set(&self) -> Result<PrototileSet, CompileError> {
        let racks = self.racks.as_ref().ok_or(CompileError::RacksNotMaterialized)?;
        let mut tiles: Vec<Prototile> = Vec::new();
        for b in &self.barbells {
            tiles.push(Prototile::from_runs(b.name.clone(), b.runs.iter().copied())?);
        }
        for r in racks {
            tiles.push(Prototile::from_runs(r.name.clone(), r.runs.iter().copied())?);
        }
        Ok(PrototileSet::new(tiles)?)
    }

    pub fn to_json(&self) -> String {
        let doc = CompiledDoc {
            format: COMPILED_FORMAT.to_string(),
            version: COMPILED_VERSION,
            params: self.params,
            matrix: self.matrix.to_cells(),
            power: self.power.to_cells(),
            digits: self.digits.clone(),
            rack_counts: self.rack_counts(),
            barbells: self
                .barbells
                .iter()
                .map(|b| BarbellDoc {
                    name: b.name.clone(),
                    spec: b.spec,
                    runs: runs_doc(&b.runs),
                })
                .collect(),
            racks: self.racks.as_ref().map(|racks| {
                racks
                    .iter()
                    .map(|r| RackDoc {
                        name: r.name.clone(),
                        spec: r.spec,
                        runs: runs_doc(&r.runs),
                    })
                    .collect()
            }),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("compiled output serializes");
        s.push('\n');
        s
    }

    /// Loads a compiled file. Consistency between fields is left to
    /// structural verification.
    pub fn from_json(text: &str) -> Result<Self, CompileError> {
        let doc: CompiledDocIn = serde_json::from_str(text).map_err(FormatError::from)?;
        if doc.format != COMPILED_FORMAT {
            return Err(FormatError::Invalid(format!("unexpected format tag `{}`", doc.format)).into());
        }
        if doc.version != COMPILED_VERSION {
            return Err(FormatError::Version(doc.version).into());
        }
        let matrix = IntMatrix::from_cells(&doc.matrix)?;
        let power = IntMatrix::from_cells(&doc.power)?;
        let v = matrix.dim();
        if doc.params.dim != v || power.dim() != v {
            return Err(CompileError::Inconsistent(format!(
                "params.dim {} but matrices of size {v} and {}",
                doc.params.dim,
                power.dim()
            )));
        }
        if doc.digits.len() != v || doc.digits.iter().any(|r| r.len() != v) {
            return Err(CompileError::Inconsistent("digits must be a V x V table".into()));
        }
        if doc.digits.iter().flatten().any(|d| d.n() != doc.params.n) {
            return Err(CompileError::Inconsistent(format!(
                "every digit list must have n = {} entries",
                doc.params.n
            )));
        }
        let barbells = doc
            .barbells
            .into_iter()
            .map(|b| Ok(Shaped { name: b.name, spec: b.spec, runs: parse_runs(&b.runs)? }))
            .collect::<Result<Vec<_>, CompileError>>()?;
        let racks = match doc.racks {
            None => None,
            Some(list) => Some(
                list.into_iter()
                    .map(|r| Ok(Shaped { name: r.name, spec: r.spec, runs: parse_runs(&r.runs)? }))
                    .collect::<Result<Vec<_>, CompileError>>()?,
            ),
        };
        Ok(CompilerOutput {
            params: doc.params,
            matrix,
            power,
            digits: doc.digits,
            barbells,
            racks,
        })
    }

    /// Stored `(A^m)_{IJ}`, 1-based.
    pub fn power_entry(&self, from: usize, to: usize) -> &BigUint {
        self.power.get(from - 1, to - 1)
    }

    pub fn has_arcs(&self) -> bool {
        self.power.entries().iter().any(|e| !e.is_zero())
    }
}

fn runs_doc(runs: &[Run]) -> Vec<[u64; 2]> {
    runs.iter().map(|r| [r.start, r.len]).collect()
}

fn parse_runs(runs: &[[u64; 2]]) -> Result<Vec<Run>, CompileError> {
    if runs.iter().any(|r| r[1] == 0) {
        return Err(FormatError::Invalid("runs must have positive length".into()).into());
    }
    Ok(runs.iter().map(|r| Run { start: r[0], len: r[1] }).collect())
}

#[derive(Serialize)]
struct CompiledDoc {
    format: String,
    version: u32,
    params: CompilerParams,
    matrix: Vec<Vec<String>>,
    power: Vec<Vec<String>>,
    digits: Vec<Vec<FactorialDigits>>,
    rack_counts: Vec<Vec<u64>>,
    barbells: Vec<BarbellDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    racks: Option<Vec<RackDoc>>,
}

#[derive(Deserialize)]
struct CompiledDocIn {
    format: String,
    version: u32,
    params: CompilerParams,
    matrix: Vec<Vec<Cell>>,
    power: Vec<Vec<Cell>>,
    digits: Vec<Vec<FactorialDigits>>,
    barbells: Vec<BarbellDoc>,
    #[serde(default)]
    racks: Option<Vec<RackDoc>>,
}

#[derive(Serialize, Deserialize)]
struct BarbellDoc {
    name: String,
    #[serde(flatten)]
    spec: BarbellSpec,
    runs: Vec<[u64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RackDoc {
    name: String,
    #[serde(flatten)]
    spec: RackSpec,
    runs: Vec<[u64; 2]>,
}

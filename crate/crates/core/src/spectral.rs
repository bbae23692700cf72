//! Perron eigenvalues of nonnegative integer matrices given as weighted graphs.
//!
//! The spectral radius is the maximum over strongly connected components.
//! Each component is handled by power iteration on `M + I` (primitive when
//! `M` is irreducible) with Collatz–Wielandt bounds as the stopping rule.
//! Components of at most [`EXACT_LIMIT`] vertices also get their exact
//! characteristic polynomial, whose largest root is then preferred.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::graph;

pub const EXACT_LIMIT: usize = 12;
const TOLERANCE: f64 = 1e-13;
const MAX_ITERATIONS: usize = 2_000_000;

/// Integer coefficients, highest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharPoly(pub Vec<BigInt>);

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0
            .iter()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    fn derivative_eval(&self, x: f64) -> f64 {
        let d = self.degree();
        self.0[..d].iter().enumerate().fold(0.0, |acc, (i, c)| {
            acc * x + c.to_f64().unwrap_or(f64::NAN) * (d - i) as f64
        })
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = d - i;
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            if !mag.is_one() || power == 0 {
                write!(f, "{mag}")?;
            }
            match power {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{power}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(xI - M)` by Faddeev–LeVerrier, exactly.
pub fn characteristic_polynomial(m: &[Vec<BigInt>]) -> CharPoly {
    let n = m.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut acc = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // acc <- M·acc + c_{n-k+1}·I
        let mut next = mat_mul(m, &acc);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        acc = next;
        let am = mat_mul(m, &acc);
        let trace: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / BigInt::from(k);
    }
    coeffs.reverse();
    CharPoly(coeffs)
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Largest real root of the characteristic polynomial of a nonnegative
/// matrix, by Newton's method from an upper bound. All roots have real part
/// at most the Perron root, so the iteration decreases monotonically onto it.
pub fn largest_real_root(poly: &CharPoly, upper: f64) -> f64 {
    let mut x = upper.max(1.0);
    for _ in 0..10_000 {
        let fx = poly.eval(x);
        let dfx = poly.derivative_eval(x);
        if fx <= 0.0 || dfx <= 0.0 {
            break;
        }
        let step = fx / dfx;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentRadius {
    pub vertices: Vec<u32>,
    pub radius: f64,
    pub power_estimate: f64,
    pub char_poly: Option<CharPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralRadius {
    /// `0` when the graph has no cycle.
    pub value: f64,
    /// The component attaining the maximum, if any.
    pub dominant: Option<ComponentRadius>,
}

impl SpectralRadius {
    /// Natural log of the spectral radius; `0` for graphs without cycles.
    pub fn log(&self) -> f64 {
        if self.value <= 1.0 {
            0.0
        } else {
            self.value.ln()
        }
    }
}

/// Spectral radius of the adjacency matrix of a weighted multigraph.
pub fn spectral_radius(n: usize, edges: &[(u32, u32, BigUint)]) -> SpectralRadius {
    let pairs: Vec<(u32, u32)> = edges
        .iter()
        .filter(|e| !e.2.is_zero())
        .map(|e| (e.0, e.1))
        .collect();
    let mut best: Option<ComponentRadius> = None;
    let mut comp_of = vec![usize::MAX; n];
    let comps = graph::components(n, &pairs);
    for (ci, (comp, _)) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v as usize] = ci;
        }
    }
    for (ci, (comp, cyclic)) in comps.iter().enumerate() {
        if !cyclic {
            continue;
        }
        let local: std::collections::HashMap<u32, usize> =
            comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let inner: Vec<(usize, usize, &BigUint)> = edges
            .iter()
            .filter(|e| !e.2.is_zero() && comp_of[e.0 as usize] == ci && comp_of[e.1 as usize] == ci)
            .map(|e| (local[&e.0], local[&e.1], &e.2))
            .collect();
        let r = component_radius(comp.clone(), &inner);
        if best.as_ref().is_none_or(|b| r.radius > b.radius) {
            best = Some(r);
        }
    }
    SpectralRadius {
        value: best.as_ref().map_or(0.0, |b| b.radius),
        dominant: best,
    }
}

fn component_radius(vertices: Vec<u32>, edges: &[(usize, usize, &BigUint)]) -> ComponentRadius {
    let size = vertices.len();
    let simple_cycle = edges.len() == size && edges.iter().all(|e| e.2.is_one());
    let power_estimate = if simple_cycle {
        1.0
    } else {
        power_iteration(size, edges)
    };
    let char_poly = (size <= EXACT_LIMIT).then(|| {
        let mut m = vec![vec![BigInt::zero(); size]; size];
        for &(a, b, w) in edges {
            m[a][b] += BigInt::from(w.clone());
        }
        characteristic_polynomial(&m)
    });
    let radius = match &char_poly {
        Some(p) => {
            let row_max = (0..size)
                .map(|i| {
                    edges
                        .iter()
                        .filter(|e| e.0 == i)
                        .map(|e| e.2.to_f64().unwrap_or(f64::INFINITY))
                        .sum::<f64>()
                })
                .fold(0.0, f64::max);
            largest_real_root(p, row_max + 1.0)
        }
        None => power_estimate,
    };
    ComponentRadius {
        vertices,
        radius,
        power_estimate,
        char_poly,
    }
}

/// Perron root of an irreducible matrix via `M + I`, stopped by
/// Collatz–Wielandt bounds.
fn power_iteration(size: usize, edges: &[(usize, usize, &BigUint)]) -> f64 {
    let weighted: Vec<(usize, usize, f64)> = edges
        .iter()
        .map(|&(a, b, w)| (a, b, w.to_f64().unwrap_or(f64::INFINITY)))
        .collect();
    let mut v = vec![1.0f64; size];
    let mut w = vec![0.0f64; size];
    let mut estimate = 0.0;
    for _ in 0..MAX_ITERATIONS {
        w.copy_from_slice(&v);
        for &(a, b, x) in &weighted {
            w[a] += x * v[b];
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..size {
            let r = w[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        estimate = 0.5 * (lo + hi) - 1.0;
        if hi - lo <= TOLERANCE * hi {
            break;
        }
        let norm = w.iter().cloned().fold(0.0, f64::max);
        for i in 0..size {
            v[i] = w[i] / norm;
        }
    }
    estimate
}

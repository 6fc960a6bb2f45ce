//! Benchmark polynomials.
//!
//! `res(m, n)` is the determinant of the Sylvester matrix of two generic
//! univariate polynomials of degrees `m` and `n`, as a polynomial in their
//! `m + n + 2` coefficients `a0..am, b0..bn`. [`structured_random`] builds
//! sums of products drawn from a small pool of shared factors, which gives
//! common subexpressions something to find.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{parse_polynomial, Monomial, Polynomial, Variable, Workspace};

/// Default cap on intermediate term counts during determinant expansion.
pub const DEFAULT_TERM_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl SymbolicMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SymbolicMatrix { rows, cols, entries: vec![Polynomial::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial) {
        self.entries[r * self.cols + c] = p;
    }

    /// Determinant by Laplace expansion along rows, memoized on the set of
    /// columns still available. Fails once any minor exceeds `cap` terms.
    pub fn determinant(&self, cap: usize) -> Result<Polynomial> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        assert!(self.cols <= 31, "matrix too large for column masks");
        let full = (1u32 << self.cols) - 1;
        let mut memo = HashMap::new();
        self.minor(0, full, cap, &mut memo)
    }

    fn minor(&self, row: usize, cols: u32, cap: usize, memo: &mut HashMap<u32, Polynomial>) -> Result<Polynomial> {
        if row == self.rows {
            return Ok(Polynomial::constant(1));
        }
        if let Some(p) = memo.get(&cols) {
            return Ok(p.clone());
        }
        let mut acc = Polynomial::zero();
        let mut position = 0;
        for c in 0..self.cols {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = self.get(row, c);
            if !entry.is_zero() {
                let sub = self.minor(row + 1, cols & !(1 << c), cap, memo)?;
                let mut product = entry * &sub;
                if position % 2 == 1 {
                    product = -&product;
                }
                acc = &acc + &product;
                if acc.len() > cap {
                    return Err(Error::ResourceLimit { terms: acc.len(), cap });
                }
            }
            position += 1;
        }
        memo.insert(cols, acc.clone());
        Ok(acc)
    }
}

/// Interns `a0..am` then `b0..bn` and returns them in that order.
pub fn resultant_variables(m: usize, n: usize, ws: &Workspace) -> (Vec<Variable>, Vec<Variable>) {
    let a = (0..=m).map(|i| ws.intern(&format!("a{i}")).expect("valid name")).collect();
    let b = (0..=n).map(|i| ws.intern(&format!("b{i}")).expect("valid name")).collect();
    (a, b)
}

/// `(m+n) x (m+n)` Sylvester matrix: `n` shifted rows of `a_m .. a_0`
/// followed by `m` shifted rows of `b_n .. b_0`.
pub fn sylvester_matrix(m: usize, n: usize, ws: &Workspace) -> SymbolicMatrix {
    assert!(m >= 1 && n >= 1, "degrees must be positive");
    let (a, b) = resultant_variables(m, n, ws);
    let size = m + n;
    let mut mat = SymbolicMatrix::new(size, size);
    for shift in 0..n {
        for k in 0..=m {
            mat.set(shift, shift + k, Polynomial::var(a[m - k]));
        }
    }
    for shift in 0..m {
        for k in 0..=n {
            mat.set(n + shift, shift + k, Polynomial::var(b[n - k]));
        }
    }
    mat
}

pub fn resultant(m: usize, n: usize, ws: &Workspace) -> Result<Polynomial> {
    resultant_with_cap(m, n, ws, DEFAULT_TERM_CAP)
}

pub fn resultant_with_cap(m: usize, n: usize, ws: &Workspace, cap: usize) -> Result<Polynomial> {
    if m == 0 || n == 0 {
        return Err(Error::Config("resultant degrees must be at least 1".into()));
    }
    if m + n > 13 {
        return Err(Error::Config(format!("res({m},{n}) is larger than supported (m + n <= 13)")));
    }
    sylvester_matrix(m, n, ws).determinant(cap)
}

pub fn resultant_cache_path(dir: &Path, m: usize, n: usize) -> PathBuf {
    dir.join(format!("res_{m}_{n}.poly"))
}

/// Loads `res(m, n)` from `dir` if cached, otherwise generates and stores it.
pub fn resultant_cached(m: usize, n: usize, ws: &Workspace, dir: &Path) -> Result<Polynomial> {
    // Intern in the canonical order first so ids do not depend on the file.
    resultant_variables(m, n, ws);
    let path = resultant_cache_path(dir, m, n);
    if let Ok(text) = std::fs::read_to_string(&path) {
        return parse_polynomial(text.trim(), ws);
    }
    let p = resultant(m, n, ws)?;
    std::fs::create_dir_all(dir)?;
    static UNIQUE: AtomicUsize = AtomicUsize::new(0);
    let tmp =
        path.with_extension(format!("poly.{}.{}.tmp", std::process::id(), UNIQUE.fetch_add(1, Ordering::Relaxed)));
    std::fs::write(&tmp, format!("{}\n", p.display(ws)))?;
    std::fs::rename(&tmp, &path)?;
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuredParams {
    pub num_vars: usize,
    pub num_terms: usize,
    /// Maximum total degree of a single pool factor.
    pub max_degree: u32,
    pub pool_size: usize,
    /// Each term multiplies between one and this many pool factors.
    pub factors_per_term: usize,
    pub seed: u64,
}

impl StructuredParams {
    pub fn new(num_vars: usize, num_terms: usize, max_degree: u32, seed: u64) -> Self {
        StructuredParams {
            num_vars,
            num_terms,
            max_degree,
            pool_size: (num_terms / 2).clamp(1, num_vars.max(2) * 2),
            factors_per_term: 3,
            seed,
        }
    }
}

/// Sum of products of shared monomial factors, deterministic per seed.
///
/// Variables are named `x0, x1, ...`. Every variable is placed in at least
/// one pool factor and every pool factor is used by at least one term, so
/// all variables occur. Generation stops early when the pool cannot produce `num_terms` distinct monomials.
pub fn structured_random(params: &StructuredParams, ws: &Workspace) -> Result<Polynomial> {
    let StructuredParams { num_vars, num_terms, max_degree, pool_size, factors_per_term, seed } = *params;
    if num_vars == 0 || num_terms == 0 || max_degree == 0 || pool_size == 0 || factors_per_term == 0 {
        return Err(Error::Config("structured generator parameters must be positive".into()));
    }
    let vars: Vec<Variable> = (0..num_vars).map(|i| ws.intern(&format!("x{i}"))).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let pool: Vec<Monomial> = (0..pool_size)
        .map(|j| {
            let mut factors: Vec<(Variable, u32)> =
                vars.iter().enumerate().filter(|(i, _)| i % pool_size == j).map(|(_, &v)| (v, 1)).collect();
            let base = factors.len() as u32;
            let target = rng.random_range(base.max(1)..=max_degree.max(base.max(1)));
            for _ in base..target {
                factors.push((*vars.choose(&mut rng).expect("variables"), 1));
            }
            Monomial::from_factors(factors)
        })
        .collect();

    let mut poly = Polynomial::zero();
    let mut attempts = 0;
    let mut next_forced = 0;
    while poly.len() < num_terms && attempts < num_terms * 50 {
        attempts += 1;
        let count = rng.random_range(1..=factors_per_term);
        let forced = next_forced < pool.len();
        let mut mono = if forced { pool[next_forced].clone() } else { pool.choose(&mut rng).expect("pool").clone() };
        for _ in 1..count {
            mono = mono.mul(pool.choose(&mut rng).expect("pool"));
        }
        let mut coeff: i64 = rng.random_range(1..=5);
        if rng.random_bool(0.5) {
            coeff = -coeff;
        }
        // Only new monomials are added so coefficients never cancel.
        if poly.coefficient(&mono) == BigInt::ZERO {
            poly.add_term(BigInt::from(coeff), mono);
            next_forced += usize::from(forced);
        }
    }
    Ok(poly)
}

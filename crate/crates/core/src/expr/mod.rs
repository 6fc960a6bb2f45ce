//! Sparse multivariate polynomials with exact integer coefficients.
//!
//! Variables are interned in a [`Workspace`]; a [`Polynomial`] only stores
//! dense variable ids, so printing needs the workspace that created them.
//! Operation counts follow one convention everywhere in the crate:
//! additions and multiplications cost the same, multiplying by `±1` is
//! free and negation is folded into coefficients.

mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub use parse::parse_polynomial;

/// Interned variable id. Ids are dense and start at zero within a workspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(pub u32);

impl Variable {
    pub fn id(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Default)]
struct Interner {
    names: Vec<String>,
    ids: HashMap<String, Variable>,
}

/// Variable interner shared by everything that parses or prints polynomials.
///
/// Interning is guarded by a lock so one workspace can be used from several
/// threads at once.
#[derive(Debug, Default)]
pub struct Workspace {
    inner: RwLock<Interner>,
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&self, name: &str) -> Result<Variable> {
        if let Some(v) = self.lookup(name) {
            return Ok(v);
        }
        if !is_valid_name(name) {
            return Err(Error::InvalidVariableName(name.to_string()));
        }
        let mut inner = self.inner.write().expect("interner lock poisoned");
        if let Some(&v) = inner.ids.get(name) {
            return Ok(v);
        }
        let v = Variable(inner.names.len() as u32);
        inner.names.push(name.to_string());
        inner.ids.insert(name.to_string(), v);
        Ok(v)
    }

    pub fn lookup(&self, name: &str) -> Option<Variable> {
        self.inner.read().expect("interner lock poisoned").ids.get(name).copied()
    }

    pub fn name(&self, v: Variable) -> String {
        self.inner.read().expect("interner lock poisoned").names[v.id()].clone()
    }

    /// Snapshot of all names, indexed by variable id.
    pub fn names(&self) -> Vec<String> {
        self.inner.read().expect("interner lock poisoned").names.clone()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("interner lock poisoned").names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Product of variables raised to positive powers, sorted by variable id.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Variable, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Variable) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds a monomial from arbitrary factors; repeated variables are merged
    /// and zero exponents dropped.
    pub fn from_factors(factors: impl IntoIterator<Item = (Variable, u32)>) -> Self {
        let mut map: BTreeMap<Variable, u32> = BTreeMap::new();
        for (v, e) in factors {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(Variable, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: Variable) -> u32 {
        self.0.binary_search_by_key(&v, |&(w, _)| w).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

/// One signed term `coeff * monomial`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigInt,
    pub monomial: Monomial,
}

impl Term {
    pub fn new(coeff: impl Into<BigInt>, monomial: Monomial) -> Self {
        Term { coeff: coeff.into(), monomial }
    }

    /// Multiplications needed to evaluate this term on its own.
    pub fn mul_cost(&self) -> u64 {
        let factors = u64::from(self.monomial.degree()) + u64::from(!self.coeff.abs().is_one());
        factors.saturating_sub(1)
    }
}

/// Canonical sparse polynomial: no zero coefficients and no repeated monomials.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_terms([Term::new(c, Monomial::one())])
    }

    pub fn var(v: Variable) -> Self {
        Self::from_terms([Term::new(1, Monomial::var(v))])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut p = Polynomial::zero();
        for t in terms {
            p.add_term(t.coeff, t.monomial);
        }
        p
    }

    pub fn add_term(&mut self, coeff: BigInt, monomial: Monomial) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(monomial) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.terms.iter().map(|(m, c)| Term { coeff: c.clone(), monomial: m.clone() }).collect()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Variables that occur in at least one term, ascending by id.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> = self.terms.keys().flat_map(|m| m.factors().iter().map(|&(v, _)| v)).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Multiplies every term by `coeff * monomial`.
    pub fn mul_term(&self, coeff: &BigInt, monomial: &Monomial) -> Polynomial {
        if coeff.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.mul(monomial), c * coeff)).collect() }
    }

    /// Replaces every variable by a value and returns the exact result.
    pub fn evaluate(&self, point: &Point, ws: &Workspace) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut value = BigRational::from_integer(c.clone());
            for &(v, e) in m.factors() {
                let x = point.get(&v).ok_or_else(|| Error::MissingAssignment(ws.name(v)))?;
                value *= num_traits::pow(x.clone(), e as usize);
            }
            total += value;
        }
        Ok(total)
    }

    pub fn display<'a>(&'a self, ws: &'a Workspace) -> PolynomialDisplay<'a> {
        PolynomialDisplay { poly: self, names: ws.names() }
    }
}

/// Exact evaluation point.
pub type Point = HashMap<Variable, BigRational>;

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(c.clone(), m.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(-c, m.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ca * cb, ma.mul(mb));
            }
        }
        out
    }
}

pub struct PolynomialDisplay<'a> {
    poly: &'a Polynomial,
    names: Vec<String>,
}

impl fmt::Display for PolynomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.poly.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let abs = c.abs();
            let mut first = true;
            if !abs.is_one() || m.is_one() {
                write!(out, "{abs}")?;
                first = false;
            }
            for &(v, e) in m.factors() {
                if !first {
                    out.push('*');
                }
                first = false;
                out.push_str(&self.names[v.id()]);
                if e > 1 {
                    write!(out, "^{e}")?;
                }
            }
        }
        f.write_str(&out)
    }
}

/// Additions and multiplications of an evaluation scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OpCount {
    pub adds: u64,
    pub muls: u64,
}

impl OpCount {
    pub fn new(adds: u64, muls: u64) -> Self {
        OpCount { adds, muls }
    }

    pub fn total(&self) -> u64 {
        self.adds + self.muls
    }
}

impl Add for OpCount {
    type Output = OpCount;
    fn add(self, rhs: OpCount) -> OpCount {
        OpCount::new(self.adds + rhs.adds, self.muls + rhs.muls)
    }
}

impl fmt::Display for OpCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} adds + {} muls = {}", self.adds, self.muls, self.total())
    }
}

/// Cost of evaluating the expanded polynomial term by term.
pub fn naive_op_count(p: &Polynomial) -> OpCount {
    let adds = (p.len() as u64).saturating_sub(1);
    let muls = p.terms().map(|(m, c)| Term { coeff: c.clone(), monomial: m.clone() }.mul_cost()).sum();
    OpCount { adds, muls }
}

/// Number of terms containing each variable. Variables of `p` absent from
/// the result have count zero.
pub fn occurrence_counts(p: &Polynomial) -> BTreeMap<Variable, u64> {
    let mut counts = BTreeMap::new();
    for (m, _) in p.terms() {
        for &(v, _) in m.factors() {
            *counts.entry(v).or_insert(0) += 1;
        }
    }
    counts
}

#![allow(dead_code)]

use hornmc::{Monomial, Point, Polynomial, Term, Variable, Workspace};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// Raw polynomial data: one `(coeff, exponents)` pair per term, exponents
/// indexed by variable.
#[derive(Debug, Clone)]
pub struct PolySpec {
    pub num_vars: usize,
    pub terms: Vec<(i64, Vec<u32>)>,
}

pub fn vars(ws: &Workspace, n: usize) -> Vec<Variable> {
    (0..n).map(|i| ws.intern(&format!("v{i}")).unwrap()).collect()
}

impl PolySpec {
    pub fn build(&self, ws: &Workspace) -> Polynomial {
        let vs = vars(ws, self.num_vars);
        Polynomial::from_terms(
            self.terms
                .iter()
                .map(|(c, exps)| Term::new(*c, Monomial::from_factors(vs.iter().copied().zip(exps.iter().copied())))),
        )
    }
}

pub fn poly_spec(max_vars: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = PolySpec> {
    (1..=max_vars).prop_flat_map(move |n| {
        let coeff =
            prop_oneof![1 => Just(1i64), 1 => Just(-1i64), 3 => (-9i64..=9).prop_filter("nonzero", |c| *c != 0)];
        let term = (coeff, prop::collection::vec(0..=max_exp, n));
        prop::collection::vec(term, 0..=max_terms).prop_map(move |terms| PolySpec { num_vars: n, terms })
    })
}

/// Rationals with small numerators and denominators.
pub fn rational() -> impl Strategy<Value = (i64, i64)> {
    (-20i64..=20, 1i64..=7)
}

pub fn point(vs: &[Variable], vals: &[(i64, i64)]) -> Point {
    vs.iter()
        .zip(vals.iter().cycle())
        .map(|(&v, &(a, b))| (v, BigRational::new(BigInt::from(a), BigInt::from(b))))
        .collect()
}

/// A permutation of `0..n` driven by a shuffle seed.
pub fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

use hornmc::gen::{resultant, resultant_variables, structured_random, sylvester_matrix, StructuredParams};
use hornmc::{naive_op_count, Point, Polynomial, Workspace};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coefficients, lowest degree first, of `(x - r) * cofactor`.
fn times_linear(cofactor: &[i64], r: i64) -> Vec<i64> {
    let mut out = vec![0; cofactor.len() + 1];
    for (i, &c) in cofactor.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= r * c;
    }
    out
}

fn random_cofactor(rng: &mut ChaCha8Rng, degree: usize) -> Vec<i64> {
    let mut c: Vec<i64> = (0..=degree).map(|_| rng.random_range(-6..=6)).collect();
    if c[degree] == 0 {
        c[degree] = 1;
    }
    c
}

fn substitute(ws: &Workspace, m: usize, n: usize, a: &[i64], b: &[i64]) -> Point {
    let (av, bv) = resultant_variables(m, n, ws);
    av.iter().zip(a).chain(bv.iter().zip(b)).map(|(&v, &c)| (v, BigRational::from_integer(BigInt::from(c)))).collect()
}

#[test]
fn resultant_vanishes_on_a_shared_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for m in 1..=4 {
        for n in 1..=4 {
            let ws = Workspace::new();
            let res = resultant(m, n, &ws).unwrap();
            for _ in 0..20 {
                let root = rng.random_range(-3..=3);
                let a = times_linear(&random_cofactor(&mut rng, m - 1), root);
                let b = times_linear(&random_cofactor(&mut rng, n - 1), root);
                let value = res.evaluate(&substitute(&ws, m, n, &a, &b), &ws).unwrap();
                assert!(value.is_zero(), "res({m},{n}) at a={a:?} b={b:?} is {value}");
            }
        }
    }
}

#[test]
fn resultant_of_coprime_linears_is_nonzero() {
    // a = x - 1, b = x - 2: the resultant is a1*b0 - a0*b1 = -2 + 1 = -1.
    let ws = Workspace::new();
    let res = resultant(1, 1, &ws).unwrap();
    let value = res.evaluate(&substitute(&ws, 1, 1, &[-1, 1], &[-2, 1]), &ws).unwrap();
    assert_eq!(value, BigRational::from_integer((-1).into()));
}

#[test]
fn every_term_has_n_a_factors_and_m_b_factors() {
    for (m, n) in [(2, 2), (3, 2), (4, 3), (5, 2)] {
        let ws = Workspace::new();
        let res = resultant(m, n, &ws).unwrap();
        let (av, bv) = resultant_variables(m, n, &ws);
        for (mono, _) in res.terms() {
            let a_deg: u32 = av.iter().map(|&v| mono.exponent(v)).sum();
            let b_deg: u32 = bv.iter().map(|&v| mono.exponent(v)).sum();
            assert_eq!((a_deg, b_deg), (n as u32, m as u32));
        }
        assert_eq!(res.total_degree() as usize, m + n);
    }
}

#[test]
fn determinant_is_linear_in_a_row() {
    // Scaling the variables of the first row scales the determinant.
    let ws = Workspace::new();
    let s = sylvester_matrix(3, 2, &ws);
    let det = s.determinant(usize::MAX).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let a: Vec<i64> = (0..=3).map(|_| rng.random_range(-9..=9)).collect();
        let b: Vec<i64> = (0..=2).map(|_| rng.random_range(-9..=9)).collect();
        let base = det.evaluate(&substitute(&ws, 3, 2, &a, &b), &ws).unwrap();
        let k = BigInt::from(rng.random_range(2..=5));
        let mut scaled = hornmc::gen::SymbolicMatrix::new(s.rows(), s.cols());
        for r in 0..s.rows() {
            for c in 0..s.cols() {
                let e = s.get(r, c).clone();
                scaled.set(r, c, if r == 0 { &e * &Polynomial::constant(k.clone()) } else { e });
            }
        }
        let sdet = scaled.determinant(usize::MAX).unwrap();
        let scaled_value = sdet.evaluate(&substitute(&ws, 3, 2, &a, &b), &ws).unwrap();
        assert_eq!(scaled_value, base * BigRational::from_integer(k));
    }
}

#[test]
fn larger_resultants_have_the_expected_shape() {
    let ws = Workspace::new();
    let res = resultant(7, 4, &ws).unwrap();
    assert_eq!(res.variables().len(), 13);
    assert_eq!(sylvester_matrix(7, 4, &ws).rows(), 11);
    assert!(naive_op_count(&res).total() > 20_000);
}

#[test]
fn structured_inputs_are_deterministic_and_shared() {
    let ws = Workspace::new();
    let params = StructuredParams::new(6, 30, 4, 7);
    let (p, q) = (structured_random(&params, &ws).unwrap(), structured_random(&params, &ws).unwrap());
    assert_eq!(p, q);
    assert_eq!(p.len(), 30);
    let single = structured_random(&StructuredParams::new(3, 1, 3, 1), &ws).unwrap();
    assert_eq!(single.len(), 1);
}

//! Test-only oracles and fixtures. Everything here recomputes from first
//! principles and never calls the canonical-representative enumeration it
//! is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use lsext::code::{GeneratorMatrix, LinearCode};
use lsext::field::{FieldElement, FieldSpec};
use lsext::limits::Limits;
use lsext::pipeline::parse_code;
use rand::rngs::StdRng;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> LinearCode {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_code(&text, Limits::default()).unwrap()
}

pub fn fixtures() -> Vec<(&'static str, LinearCode)> {
    [
        "hamming.txt",
        "golay3.txt",
        "repetition4.txt",
        "ternary_chain.txt",
        "quaternary.txt",
    ]
    .into_iter()
    .map(|n| (n, fixture(n)))
    .collect()
}

/// Entries of the generator matrix as plain integers.
pub fn matrix(code: &LinearCode) -> Vec<Vec<u32>> {
    code.generator()
        .rows()
        .iter()
        .map(|r| r.codes().iter().map(|&c| c as u32).collect())
        .collect()
}

/// Field product and sum, computed with integer arithmetic mod p for prime
/// fields so the oracle does not share the lookup tables under test.
fn mul(spec: &FieldSpec, a: u32, b: u32) -> u32 {
    if spec.degree() == 1 {
        (a * b) % spec.q()
    } else {
        let e = |x: u32| spec.element(x).unwrap();
        spec.mul(e(a), e(b)).unwrap().code() as u32
    }
}

fn add(spec: &FieldSpec, a: u32, b: u32) -> u32 {
    if spec.degree() == 1 {
        (a + b) % spec.q()
    } else {
        // Coefficientwise addition in base p.
        let p = spec.characteristic();
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..spec.degree() {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }
}

/// The codeword of message `v` (integer codes) under generator rows `g`.
pub fn encode(spec: &FieldSpec, g: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
    let n = g[0].len();
    (0..n)
        .map(|j| {
            v.iter()
                .zip(g)
                .fold(0, |acc, (&a, row)| add(spec, acc, mul(spec, a, row[j])))
        })
        .collect()
}

pub fn weight(c: &[u32]) -> usize {
    c.iter().filter(|&&x| x != 0).count()
}

/// All q^k messages, in base-q counting order.
pub fn all_messages(q: u32, k: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (q as u64).pow(k as u32);
    (0..total).map(move |mut m| {
        (0..k)
            .map(|_| {
                let d = (m % q as u64) as u32;
                m /= q as u64;
                d
            })
            .collect()
    })
}

/// Weight distribution by encoding every message.
pub fn brute_distribution(spec: &FieldSpec, g: &[Vec<u32>]) -> BTreeMap<usize, u64> {
    let mut out = BTreeMap::new();
    for v in all_messages(spec.q(), g.len()) {
        *out.entry(weight(&encode(spec, g, &v))).or_insert(0) += 1;
    }
    out
}

pub fn brute_min_distance(spec: &FieldSpec, g: &[Vec<u32>]) -> usize {
    *brute_distribution(spec, g)
        .keys()
        .find(|&&w| w > 0)
        .expect("nonzero codeword")
}

/// Rank by elimination with integer arithmetic, prime q only.
pub fn brute_rank(q: u32, g: &[Vec<u32>]) -> usize {
    let mut m: Vec<Vec<u32>> = g.to_vec();
    let cols = m[0].len();
    let inv = |a: u32| (1..q).find(|&b| (a * b) % q == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let iv = inv(m[rank][c]);
        for x in m[rank].iter_mut() {
            *x = (*x * iv) % q;
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + q * q - f * y) % q;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A random full-rank k x n matrix over a prime field.
pub fn random_code(rng: &mut StdRng, q: u32, k: usize, n: usize) -> LinearCode {
    loop {
        let rows: Vec<Vec<u32>> = (0..k)
            .map(|_| (0..n).map(|_| rng.random_range(0..q)).collect())
            .collect();
        if brute_rank(q, &rows) != k {
            continue;
        }
        let spec = FieldSpec::new(q).unwrap();
        let g = GeneratorMatrix::from_codes(spec, &rows).unwrap();
        return LinearCode::new(g, Limits::default()).unwrap();
    }
}

/// The independent random code population used across the suites.
pub fn random_population(seed: u64, count: usize) -> Vec<LinearCode> {
    use rand::SeedableRng;
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q = [2, 3][rng.random_range(0..2)];
            let k = rng.random_range(1..=4);
            let n = rng.random_range(k..=10);
            random_code(&mut rng, q, k, n)
        })
        .collect()
}

pub fn el(spec: &FieldSpec, c: u32) -> FieldElement {
    spec.element(c).unwrap()
}

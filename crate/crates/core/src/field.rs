//! Arithmetic in small finite fields GF(q) and the canonical
//! one-dimensional-subspace representatives of GF(q)^k.
//!
//! Elements are encoded as integers `0..q`. For q = p^e the code is read in
//! base p as polynomial coefficients, lowest degree first, reduced modulo a
//! fixed monic irreducible polynomial:
//!
//! | q | modulus       |
//! |---|---------------|
//! | 4 | x^2 + x + 1   |
//! | 8 | x^3 + x + 1   |
//! | 9 | x^2 + 1       |
//!
//! Every prime q below 256 is supported directly. All tables are built once
//! in [`FieldSpec::new`], so arithmetic is a single lookup.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::limits::{LimitError, Limits};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("GF({0}) is not supported (primes below 256 and 4, 8, 9 are)")]
    UnsupportedOrder(u32),
    #[error("element code {code} is out of range for GF({q})")]
    Encoding { code: u32, q: u32 },
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("vector has length {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// A field element, stored as its integer code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct FieldElement(u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Description of GF(q) together with its precomputed operation tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Monic modulus for the supported extension fields, lowest degree first.
fn modulus_for(q: u32) -> Option<(u32, u32, Vec<u8>)> {
    match q {
        4 => Some((2, 2, vec![1, 1, 1])),
        8 => Some((2, 3, vec![1, 1, 0, 1])),
        9 => Some((3, 2, vec![1, 0, 1])),
        _ => None,
    }
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self, FieldError> {
        let (p, e, modulus) = if q < 256 && is_prime(q) {
            (q, 1, vec![0, 1])
        } else if let Some(m) = modulus_for(q) {
            m
        } else {
            return Err(FieldError::UnsupportedOrder(q));
        };
        let qs = q as usize;
        let digits = |mut c: usize| -> Vec<u32> {
            (0..e)
                .map(|_| {
                    let d = (c % p as usize) as u32;
                    c /= p as usize;
                    d
                })
                .collect()
        };
        let undigits =
            |ds: &[u32]| -> u8 { ds.iter().rev().fold(0u32, |acc, &d| acc * p + d) as u8 };
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..qs {
            let da = digits(a);
            for b in 0..qs {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = undigits(&sum);

                // Schoolbook product, then reduce by the monic modulus.
                let mut prod = vec![0u32; 2 * e as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (e as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    for (i, &m) in modulus.iter().enumerate().take(e as usize) {
                        let idx = deg - e as usize + i;
                        prod[idx] = (prod[idx] + (p - c) * m as u32) % p;
                    }
                    prod[deg] = 0;
                }
                mul[a * qs + b] = undigits(&prod[..e as usize]);
            }
        }
        let neg = (0..qs)
            .map(|a| (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u8)
            .collect();
        let inv = (0..qs)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u8
                }
            })
            .collect();
        Ok(FieldSpec {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Coefficients of the modulus polynomial, lowest degree first.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(|c| FieldElement(c as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(|c| FieldElement(c as u8))
    }

    pub fn element(&self, code: u32) -> Result<FieldElement, FieldError> {
        if code < self.q {
            Ok(FieldElement(code as u8))
        } else {
            Err(FieldError::Encoding { code, q: self.q })
        }
    }

    fn check(&self, a: FieldElement) -> Result<(), FieldError> {
        self.element(a.0 as u32).map(|_| ())
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement(self.add_raw(a.0, b.0)))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement(self.add_raw(a.0, self.neg[b.0 as usize])))
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        Ok(FieldElement(self.neg[a.0 as usize]))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement(self.mul_raw(a.0, b.0)))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        if a.is_zero() {
            return Err(FieldError::DivisionByZero(self.q));
        }
        Ok(FieldElement(self.inv[a.0 as usize]))
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    /// Inner product of two raw code slices of equal length.
    #[inline]
    pub(crate) fn dot_raw(&self, a: &[u8], b: &[u8]) -> u8 {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.add_raw(acc, self.mul_raw(x, y)))
    }

    pub fn dot(&self, a: &KVector, b: &KVector) -> Result<FieldElement, FieldError> {
        if a.len() != b.len() {
            return Err(FieldError::Dimension {
                expected: a.len(),
                got: b.len(),
            });
        }
        Ok(FieldElement(self.dot_raw(a.codes(), b.codes())))
    }

    /// Number of one-dimensional subspaces of GF(q)^k, `(q^k - 1)/(q - 1)`,
    /// or `None` on overflow.
    pub fn projective_count(&self, k: usize) -> Option<u128> {
        projective_count(self.q, k)
    }

    /// Index of a canonical vector within [`canonical_representatives`]
    /// order, or `None` if `v` is zero or not normalized.
    pub fn canonical_index(&self, v: &[u8]) -> Option<usize> {
        let lead = v.iter().position(|&c| c != 0)?;
        if v[lead] != 1 {
            return None;
        }
        let q = self.q as usize;
        let tail = v[lead + 1..]
            .iter()
            .fold(0usize, |acc, &c| acc * q + c as usize);
        // Vectors whose leading one sits further right come first.
        let tail_len = v.len() - 1 - lead;
        let offset = (q.pow(tail_len as u32) - 1) / (q - 1);
        Some(offset + tail)
    }

    /// Scales `v` so its first nonzero entry is 1; `None` for the zero vector.
    pub fn normalize(&self, v: &[u8]) -> Option<KVector> {
        let lead = v.iter().position(|&c| c != 0)?;
        let s = self.inv_raw(v[lead]);
        Some(KVector(v.iter().map(|&c| self.mul_raw(s, c)).collect()))
    }

    /// The canonical vector at position `index` of the canonical order.
    pub fn canonical_at(&self, k: usize, index: usize) -> KVector {
        let q = self.q as usize;
        let mut tail_len = 0usize;
        let mut offset = 0usize;
        loop {
            let block = q.pow(tail_len as u32);
            if index < offset + block {
                break;
            }
            offset += block;
            tail_len += 1;
        }
        assert!(
            tail_len < k,
            "canonical index {index} out of range for k = {k}"
        );
        let mut v = vec![0u8; k];
        let lead = k - 1 - tail_len;
        v[lead] = 1;
        let mut rest = index - offset;
        for slot in v[lead + 1..].iter_mut().rev() {
            *slot = (rest % q) as u8;
            rest /= q;
        }
        KVector(v)
    }
}

pub fn projective_count(q: u32, k: usize) -> Option<u128> {
    if q < 2 {
        return None;
    }
    let qk = (q as u128).checked_pow(k as u32)?;
    Some((qk - 1) / (q as u128 - 1))
}

/// A vector of GF(q)^k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct KVector(Vec<u8>);

impl KVector {
    pub fn new(spec: &FieldSpec, entries: Vec<FieldElement>) -> Result<Self, FieldError> {
        for &e in &entries {
            spec.check(e)?;
        }
        Ok(KVector(entries.into_iter().map(|e| e.0).collect()))
    }

    pub fn from_codes(spec: &FieldSpec, codes: &[u32]) -> Result<Self, FieldError> {
        codes
            .iter()
            .map(|&c| spec.element(c).map(|e| e.0))
            .collect::<Result<Vec<_>, _>>()
            .map(KVector)
    }

    pub(crate) fn from_raw(codes: Vec<u8>) -> Self {
        KVector(codes)
    }

    pub fn zero(k: usize) -> Self {
        KVector(vec![0; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> FieldElement {
        FieldElement(self.0[i])
    }

    pub fn entries(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.0.iter().map(|&c| FieldElement(c))
    }

    pub fn codes(&self) -> &[u8] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, spec: &FieldSpec, lambda: FieldElement) -> KVector {
        KVector(self.0.iter().map(|&c| spec.mul_raw(lambda.0, c)).collect())
    }

    /// True when the first nonzero entry is 1.
    pub fn is_canonical(&self) -> bool {
        self.0.iter().find(|&&c| c != 0) == Some(&1)
    }
}

impl fmt::Display for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// All canonical representatives of the one-dimensional subspaces of
/// GF(q)^k, in lexicographic order of their entry codes.
pub fn canonical_representatives(
    spec: &FieldSpec,
    k: usize,
    limits: &Limits,
) -> Result<Vec<KVector>, FieldError> {
    assert!(k >= 1, "dimension must be positive");
    let h = spec.projective_count(k).unwrap_or(u128::MAX);
    limits.check("canonical representatives", h)?;
    let mut out = Vec::with_capacity(h as usize);
    let q = spec.q as usize;
    for lead in (0..k).rev() {
        let tail_len = k - 1 - lead;
        for tail in 0..q.pow(tail_len as u32) {
            let mut v = vec![0u8; k];
            v[lead] = 1;
            let mut rest = tail;
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = (rest % q) as u8;
                rest /= q;
            }
            out.push(KVector(v));
        }
    }
    debug_assert_eq!(out.len() as u128, h);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORDERS: [u32; 7] = [2, 3, 4, 5, 7, 8, 9];

    fn el(c: u32) -> FieldElement {
        FieldElement(c as u8)
    }

    #[test]
    fn small_sums_and_products() {
        let f3 = FieldSpec::new(3).unwrap();
        let f2 = FieldSpec::new(2).unwrap();
        let f4 = FieldSpec::new(4).unwrap();
        assert_eq!(f3.add(el(2), el(2)).unwrap(), el(1));
        assert_eq!(f2.add(el(1), el(1)).unwrap(), el(0));
        assert_eq!(f4.add(el(2), el(3)).unwrap(), el(1));
        assert_eq!(f3.mul(el(2), el(2)).unwrap(), el(1));
        assert_eq!(f4.mul(el(2), el(2)).unwrap(), el(3));
        for q in ORDERS {
            let f = FieldSpec::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.mul(FieldElement::ZERO, a).unwrap(), FieldElement::ZERO);
            }
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(FieldSpec::new(3).unwrap().inv(el(2)).unwrap(), el(2));
        assert_eq!(FieldSpec::new(5).unwrap().inv(el(3)).unwrap(), el(2));
        assert_eq!(FieldSpec::new(4).unwrap().inv(el(2)).unwrap(), el(3));
        assert_eq!(
            FieldSpec::new(7).unwrap().inv(FieldElement::ZERO),
            Err(FieldError::DivisionByZero(7))
        );
    }

    #[test]
    fn rejects_bad_codes_and_orders() {
        let f = FieldSpec::new(3).unwrap();
        assert_eq!(
            f.add(el(3), el(1)),
            Err(FieldError::Encoding { code: 3, q: 3 })
        );
        assert!(f.element(3).is_err());
        for q in [0, 1, 6, 10, 12, 16, 25, 256] {
            assert_eq!(FieldSpec::new(q), Err(FieldError::UnsupportedOrder(q)));
        }
        assert!(FieldSpec::new(251).is_ok());
    }

    #[test]
    fn field_axioms_hold_on_full_tables() {
        for q in ORDERS {
            let f = FieldSpec::new(q).unwrap();
            let all: Vec<_> = f.elements().collect();
            for &a in &all {
                assert_eq!(f.add(a, FieldElement::ZERO).unwrap(), a);
                assert_eq!(f.mul(a, FieldElement::ONE).unwrap(), a);
                assert_eq!(f.add(a, f.neg(a).unwrap()).unwrap(), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()).unwrap(), FieldElement::ONE);
                }
                for &b in &all {
                    let s = f.add(a, b).unwrap();
                    let m = f.mul(a, b).unwrap();
                    assert!(s.code() < q as u8 && m.code() < q as u8);
                    assert_eq!(s, f.add(b, a).unwrap());
                    assert_eq!(m, f.mul(b, a).unwrap());
                    for &c in &all {
                        let lhs = f.add(s, c).unwrap();
                        assert_eq!(lhs, f.add(a, f.add(b, c).unwrap()).unwrap());
                        assert_eq!(
                            f.mul(m, c).unwrap(),
                            f.mul(a, f.mul(b, c).unwrap()).unwrap()
                        );
                        assert_eq!(
                            f.mul(a, f.add(b, c).unwrap()).unwrap(),
                            f.add(m, f.mul(a, c).unwrap()).unwrap()
                        );
                    }
                }
            }
            // No zero divisors.
            for a in f.nonzero_elements() {
                for b in f.nonzero_elements() {
                    assert!(!f.mul(a, b).unwrap().is_zero(), "GF({q}) has zero divisors");
                }
            }
        }
    }

    #[test]
    fn canonical_counts_and_order() {
        let lim = Limits::default();
        let f3 = FieldSpec::new(3).unwrap();
        let reps = canonical_representatives(&f3, 2, &lim).unwrap();
        let codes: Vec<&[u8]> = reps.iter().map(|v| v.codes()).collect();
        assert_eq!(codes, vec![&[0, 1][..], &[1, 0], &[1, 1], &[1, 2]]);
        assert_eq!(canonical_representatives(&f3, 8, &lim).unwrap().len(), 3280);
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(canonical_representatives(&f2, 4, &lim).unwrap().len(), 15);
        assert_eq!(canonical_representatives(&f2, 1, &lim).unwrap().len(), 1);
    }

    #[test]
    fn canonical_cap_is_enforced() {
        let f = FieldSpec::new(3).unwrap();
        let err = canonical_representatives(&f, 8, &Limits::new(1000)).unwrap_err();
        assert!(matches!(
            err,
            FieldError::Limit(LimitError {
                required: 3280,
                cap: 1000,
                ..
            })
        ));
    }

    #[test]
    fn every_nonzero_vector_has_exactly_one_representative() {
        let lim = Limits::default();
        for (q, k) in [
            (2, 1),
            (2, 5),
            (3, 4),
            (4, 3),
            (5, 3),
            (7, 2),
            (8, 3),
            (9, 3),
            (3, 6),
        ] {
            let f = FieldSpec::new(q).unwrap();
            let reps = canonical_representatives(&f, k, &lim).unwrap();
            assert!(
                reps.windows(2).all(|w| w[0] < w[1]),
                "order for q={q} k={k}"
            );
            for (i, r) in reps.iter().enumerate() {
                assert!(r.is_canonical());
                assert_eq!(f.canonical_index(r.codes()), Some(i));
                assert_eq!(f.canonical_at(k, i), *r);
            }
            let total = (q as usize).pow(k as u32);
            let mut hits = vec![0usize; reps.len()];
            for code in 1..total {
                let mut c = code;
                let v: Vec<u8> = (0..k)
                    .map(|_| {
                        let d = (c % q as usize) as u8;
                        c /= q as usize;
                        d
                    })
                    .collect();
                let n = f.normalize(&v).unwrap();
                let idx = f.canonical_index(n.codes()).unwrap();
                hits[idx] += 1;
                // n must be a scalar multiple of v.
                assert!(f
                    .nonzero_elements()
                    .any(|l| KVector(v.clone()).scale(&f, l) == n));
            }
            assert!(hits.iter().all(|&h| h == q as usize - 1));
        }
    }

    #[test]
    fn canonical_order_is_stable_across_threads() {
        use rayon::prelude::*;
        let f = FieldSpec::new(4).unwrap();
        let base = canonical_representatives(&f, 4, &Limits::default()).unwrap();
        let runs: Vec<_> = (0..4)
            .into_par_iter()
            .map(|_| canonical_representatives(&f, 4, &Limits::default()).unwrap())
            .collect();
        assert!(runs.iter().all(|r| *r == base));
    }
}

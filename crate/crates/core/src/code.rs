//! Linear codes given by a generator matrix, with exact weight analysis.
//!
//! Weights are computed by walking the canonical message representatives
//! only: every nonzero scalar multiple of a message encodes to a codeword of
//! the same weight, so each nonzero weight count is the representative count
//! times `q - 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, FieldSpec, KVector};
use crate::limits::{LimitError, Limits};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("generator matrix has rank {rank}, expected full row rank {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("generator matrix row {row} has length {got}, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("message has length {got}, code dimension is {expected}")]
    Shape { expected: usize, got: usize },
    #[error("dimension and length must be positive (k = {k}, n = {n})")]
    Empty { k: usize, n: usize },
    #[error("weight gap is undefined: the code has a single nonzero weight")]
    GapUndefined,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// Number of nonzero entries.
pub fn weight(c: &KVector) -> usize {
    c.codes().iter().filter(|&&x| x != 0).count()
}

/// A k x n matrix over GF(q) with full row rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    field: FieldSpec,
    k: usize,
    n: usize,
    rows: Vec<KVector>,
}

impl GeneratorMatrix {
    pub fn new(field: FieldSpec, rows: Vec<KVector>) -> Result<Self, CodeError> {
        let k = rows.len();
        let n = rows.first().map_or(0, KVector::len);
        if k == 0 || n == 0 {
            return Err(CodeError::Empty { k, n });
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(CodeError::RaggedRow {
                    row,
                    expected: n,
                    got: r.len(),
                });
            }
            for e in r.entries() {
                field.element(e.code() as u32)?;
            }
        }
        let gen = GeneratorMatrix { field, k, n, rows };
        let rank = gen.rank();
        if rank != k {
            return Err(CodeError::RankDeficient { rank, k });
        }
        Ok(gen)
    }

    /// Builds a matrix from integer element codes, one inner slice per row.
    pub fn from_codes(field: FieldSpec, rows: &[Vec<u32>]) -> Result<Self, CodeError> {
        let rows = rows
            .iter()
            .map(|r| KVector::from_codes(&field, r))
            .collect::<Result<Vec<_>, _>>()?;
        GeneratorMatrix::new(field, rows)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[KVector] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> KVector {
        KVector::from_raw(self.rows.iter().map(|r| r.codes()[j]).collect())
    }

    pub fn columns(&self) -> Vec<KVector> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    /// Rank over GF(q) by Gaussian elimination.
    pub fn rank(&self) -> usize {
        rank_of(
            &self.field,
            self.rows.iter().map(|r| r.codes().to_vec()).collect(),
        )
    }

    /// The matrix with `cols` (each of length k) appended on the right.
    pub fn append_columns(&self, cols: &[KVector]) -> Result<Self, CodeError> {
        let mut rows: Vec<Vec<u8>> = self.rows.iter().map(|r| r.codes().to_vec()).collect();
        for c in cols {
            if c.len() != self.k {
                return Err(CodeError::Shape {
                    expected: self.k,
                    got: c.len(),
                });
            }
            for (row, &x) in rows.iter_mut().zip(c.codes()) {
                row.push(x);
            }
        }
        GeneratorMatrix::new(
            self.field.clone(),
            rows.into_iter().map(KVector::from_raw).collect(),
        )
    }

    /// The matrix with the listed column positions deleted.
    pub fn remove_columns(&self, cols: &[usize]) -> Result<Self, CodeError> {
        let drop: std::collections::BTreeSet<usize> = cols.iter().copied().collect();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                KVector::from_raw(
                    r.codes()
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| !drop.contains(j))
                        .map(|(_, &x)| x)
                        .collect(),
                )
            })
            .collect();
        GeneratorMatrix::new(self.field.clone(), rows)
    }

    pub fn encode(&self, v: &KVector) -> Result<KVector, CodeError> {
        if v.len() != self.k {
            return Err(CodeError::Shape {
                expected: self.k,
                got: v.len(),
            });
        }
        let mut out = vec![0u8; self.n];
        self.encode_into(v.codes(), &mut out);
        Ok(KVector::from_raw(out))
    }

    pub(crate) fn encode_into(&self, v: &[u8], out: &mut [u8]) {
        out.fill(0);
        for (&a, row) in v.iter().zip(&self.rows) {
            if a == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(row.codes()) {
                *o = self.field.add_raw(*o, self.field.mul_raw(a, x));
            }
        }
    }
}

pub(crate) fn rank_of(field: &FieldSpec, mut m: Vec<Vec<u8>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = field.inv_raw(m[rank][c]);
        for x in m[rank].iter_mut() {
            *x = field.mul_raw(inv, *x);
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = field.neg_raw(row[c]);
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = field.add_raw(*x, field.mul_raw(f, y));
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Number of codewords of each weight, `A_0 = 1` included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightDistribution {
    counts: BTreeMap<usize, u64>,
}

impl WeightDistribution {
    pub fn from_counts(counts: BTreeMap<usize, u64>) -> Self {
        WeightDistribution {
            counts: counts.into_iter().filter(|&(_, c)| c > 0).collect(),
        }
    }

    pub fn count(&self, w: usize) -> u64 {
        self.counts.get(&w).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Nonzero weights in increasing order.
    pub fn nonzero_weights(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.keys().copied().filter(|&w| w > 0)
    }

    pub fn min_distance(&self) -> Option<usize> {
        self.nonzero_weights().next()
    }

    pub fn second_weight(&self) -> Option<usize> {
        self.nonzero_weights().nth(1)
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(w, c)| format!("{w}:{c}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Canonical message vectors whose codewords have minimum weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinWeightGenerator {
    reps: Vec<KVector>,
    indices: Vec<usize>,
}

impl MinWeightGenerator {
    pub fn reps(&self) -> &[KVector] {
        &self.reps
    }

    /// Positions of the reps in canonical-representative order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn t(&self) -> usize {
        self.reps.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q: u32,
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]_{}", self.n, self.k, self.d, self.q)
    }
}

const CHUNK: usize = 1 << 14;

/// A linear code with lazily computed, cached weight analysis.
#[derive(Debug, Clone)]
pub struct LinearCode {
    gen: GeneratorMatrix,
    limits: Limits,
    degenerate: bool,
    dist: OnceLock<WeightDistribution>,
    mwg: OnceLock<MinWeightGenerator>,
}

impl LinearCode {
    pub fn new(gen: GeneratorMatrix, limits: Limits) -> Result<Self, CodeError> {
        let h = gen.field.projective_count(gen.k).unwrap_or(u128::MAX);
        limits.check("weight enumeration", h)?;
        let degenerate = (0..gen.n).any(|j| gen.rows.iter().all(|r| r.codes()[j] == 0));
        Ok(LinearCode {
            gen,
            limits,
            degenerate,
            dist: OnceLock::new(),
            mwg: OnceLock::new(),
        })
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.gen
    }

    pub fn field(&self) -> &FieldSpec {
        &self.gen.field
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn n(&self) -> usize {
        self.gen.n
    }

    pub fn k(&self) -> usize {
        self.gen.k
    }

    /// Some column of the generator matrix is all zero.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Number of canonical message representatives, `(q^k - 1)/(q - 1)`.
    pub fn rep_count(&self) -> usize {
        self.gen.field.projective_count(self.gen.k).unwrap() as usize
    }

    pub fn encode(&self, v: &KVector) -> Result<KVector, CodeError> {
        self.gen.encode(v)
    }

    pub fn weight_distribution(&self) -> &WeightDistribution {
        self.dist.get_or_init(|| {
            let n = self.gen.n;
            let hist = self
                .chunks()
                .into_par_iter()
                .map(|(lo, hi)| {
                    let mut h = vec![0u64; n + 1];
                    self.scan(lo, hi, |_, w| h[w] += 1);
                    h
                })
                .reduce(
                    || vec![0u64; n + 1],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                );
            let scale = self.gen.field.q() as u64 - 1;
            let mut counts: BTreeMap<usize, u64> = hist
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(w, c)| (w, c * scale))
                .collect();
            counts.insert(0, 1);
            WeightDistribution::from_counts(counts)
        })
    }

    pub fn min_distance(&self) -> usize {
        self.weight_distribution()
            .min_distance()
            .expect("a full-rank code has a nonzero codeword")
    }

    pub fn params(&self) -> CodeParams {
        CodeParams {
            n: self.gen.n,
            k: self.gen.k,
            d: self.min_distance(),
            q: self.gen.field.q(),
        }
    }

    pub fn min_weight_generator(&self) -> &MinWeightGenerator {
        self.mwg.get_or_init(|| {
            let d = self.min_distance();
            let indices: Vec<usize> = self
                .chunks()
                .into_par_iter()
                .map(|(lo, hi)| {
                    let mut hits = Vec::new();
                    self.scan(lo, hi, |i, w| {
                        if w == d {
                            hits.push(i)
                        }
                    });
                    hits
                })
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect();
            let reps = indices
                .iter()
                .map(|&i| self.gen.field.canonical_at(self.gen.k, i))
                .collect();
            MinWeightGenerator { reps, indices }
        })
    }

    /// Second-smallest nonzero weight minus the minimum distance.
    pub fn weight_gap(&self) -> Result<usize, CodeError> {
        let dist = self.weight_distribution();
        match (dist.min_distance(), dist.second_weight()) {
            (Some(d), Some(w2)) => Ok(w2 - d),
            _ => Err(CodeError::GapUndefined),
        }
    }

    fn chunks(&self) -> Vec<(usize, usize)> {
        let h = self.rep_count();
        (0..h.div_ceil(CHUNK))
            .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(h)))
            .collect()
    }

    /// Calls `f(index, weight)` for canonical reps `lo..hi` in order,
    /// updating the codeword incrementally as the message odometer turns.
    fn scan(&self, lo: usize, hi: usize, mut f: impl FnMut(usize, usize)) {
        if lo >= hi {
            return;
        }
        let field = &self.gen.field;
        let (k, n, q) = (self.gen.k, self.gen.n, field.q() as usize);
        // delta[i][a][b]: the change to the codeword when digit i moves a -> b.
        let scaled: Vec<Vec<Vec<u8>>> = self
            .gen
            .rows
            .iter()
            .map(|r| {
                (0..q)
                    .map(|a| {
                        r.codes()
                            .iter()
                            .map(|&x| field.mul_raw(a as u8, x))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut msg = field.canonical_at(k, lo).codes().to_vec();
        let mut cw = vec![0u8; n];
        self.gen.encode_into(&msg, &mut cw);
        let mut lead = msg.iter().position(|&c| c != 0).unwrap();
        for idx in lo..hi {
            f(idx, cw.iter().filter(|&&x| x != 0).count());
            if idx + 1 == hi {
                break;
            }
            // Advance the tail odometer.
            let mut pos = k;
            let mut carried_out = true;
            while pos > lead + 1 {
                pos -= 1;
                let old = msg[pos];
                let new = if old as usize + 1 == q { 0 } else { old + 1 };
                msg[pos] = new;
                let (from, to) = (&scaled[pos][old as usize], &scaled[pos][new as usize]);
                for ((c, &a), &b) in cw.iter_mut().zip(from).zip(to) {
                    *c = field.add_raw(field.add_raw(*c, field.neg_raw(a)), b);
                }
                if new != 0 {
                    carried_out = false;
                    break;
                }
            }
            if carried_out {
                msg[lead] = 0;
                lead -= 1;
                msg[lead] = 1;
                self.gen.encode_into(&msg, &mut cw);
            }
        }
    }
}

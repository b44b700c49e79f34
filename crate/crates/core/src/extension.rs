//! The intersection matrix D of a code and the covering system it defines.
//!
//! Row i of D belongs to the i-th canonical minimum-weight message g_i, and
//! column j to the j-th canonical candidate column gamma_j. `D[i][j] = 1` iff
//! `<g_i, gamma_j> != 0`, i.e. appending gamma_j gives the codeword of g_i a
//! nonzero letter. Appending a multiset of l columns raises every
//! minimum-weight codeword by at least s iff every row of D is covered at
//! least s times; the surplus per row is its slack.

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::code::{CodeError, CodeParams, GeneratorMatrix, LinearCode, WeightDistribution};
use crate::field::{canonical_representatives, FieldError, KVector};
use crate::geometry::{code_points, GeometryError};
use crate::limits::LimitError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("expected {expected} columns, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("column {column} is out of range (matrix has {cols} columns)")]
    ColumnOutOfRange { column: usize, cols: usize },
    #[error("column {0} is masked")]
    MaskedColumn(usize),
    #[error("column {0} is repeated but the system requires distinct columns")]
    RepeatedColumn(usize),
    #[error("row {row} is covered {coverage} times, needs {s}")]
    Infeasible {
        row: usize,
        coverage: usize,
        s: usize,
    },
    #[error("l and s must be positive (l = {l}, s = {s})")]
    BadParameters { l: usize, s: usize },
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("malformed D matrix at line {line}: {msg}")]
    Dump { line: usize, msg: String },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// A dense 0/1 matrix stored as one bitset per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverMatrix {
    cols: usize,
    rows: Vec<FixedBitSet>,
}

impl CoverMatrix {
    pub fn new(cols: usize, rows: Vec<FixedBitSet>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        CoverMatrix { cols, rows }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let bits = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged cover matrix");
                let mut b = FixedBitSet::with_capacity(cols);
                for (j, &x) in r.iter().enumerate() {
                    b.set(j, x != 0);
                }
                b
            })
            .collect();
        CoverMatrix { cols, rows: bits }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].contains(col)
    }

    pub fn row(&self, row: usize) -> &FixedBitSet {
        &self.rows[row]
    }

    pub fn rows(&self) -> &[FixedBitSet] {
        &self.rows
    }

    /// Row indices covered by each column.
    pub fn column_supports(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones() {
                out[j].push(i as u32);
            }
        }
        out
    }

    /// Text form: a `t h` header, then one line of `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * (self.cols + 1) + 16);
        writeln!(s, "{} {}", self.rows.len(), self.cols).unwrap();
        for r in &self.rows {
            s.extend((0..self.cols).map(|j| if r.contains(j) { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ExtensionError> {
        let err = |line: usize, msg: String| ExtensionError::Dump { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|x| x.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| err(hl, format!("bad header {header:?}: {e}")))?;
        let [t, h] = dims[..] else {
            return Err(err(hl, format!("header must be \"t h\", got {header:?}")));
        };
        let mut rows = Vec::with_capacity(t);
        for (ln, line) in lines {
            if rows.len() == t {
                return Err(err(ln, format!("more than {t} rows")));
            }
            let bytes = line.as_bytes();
            if bytes.len() != h {
                return Err(err(
                    ln,
                    format!("row has {} entries, expected {h}", bytes.len()),
                ));
            }
            let mut b = FixedBitSet::with_capacity(h);
            for (j, &c) in bytes.iter().enumerate() {
                match c {
                    b'0' => {}
                    b'1' => b.insert(j),
                    _ => return Err(err(ln, format!("unexpected character {:?}", c as char))),
                }
            }
            rows.push(b);
        }
        if rows.len() != t {
            return Err(err(
                text.lines().count(),
                format!("expected {t} rows, found {}", rows.len()),
            ));
        }
        Ok(CoverMatrix { cols: h, rows })
    }
}

/// The matrix D for a specific code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionMatrixD {
    q: u32,
    k: usize,
    matrix: CoverMatrix,
    row_reps: Vec<KVector>,
    column_vectors: Vec<KVector>,
}

impl IntersectionMatrixD {
    pub fn t(&self) -> usize {
        self.matrix.num_rows()
    }

    pub fn h(&self) -> usize {
        self.matrix.num_cols()
    }

    pub fn matrix(&self) -> &CoverMatrix {
        &self.matrix
    }

    pub fn row_reps(&self) -> &[KVector] {
        &self.row_reps
    }

    pub fn column_vectors(&self) -> &[KVector] {
        &self.column_vectors
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.matrix.get(row, col)
    }
}

pub fn build_d(code: &LinearCode) -> Result<IntersectionMatrixD, ExtensionError> {
    let spec = code.field();
    let columns = canonical_representatives(spec, code.k(), code.limits())?;
    let reps = code.min_weight_generator().reps().to_vec();
    let rows = reps
        .par_iter()
        .map(|g| {
            let mut row = FixedBitSet::with_capacity(columns.len());
            for (j, c) in columns.iter().enumerate() {
                if spec.dot_raw(g.codes(), c.codes()) != 0 {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    Ok(IntersectionMatrixD {
        q: spec.q(),
        k: code.k(),
        matrix: CoverMatrix::new(columns.len(), rows),
        row_reps: reps,
        column_vectors: columns,
    })
}

/// Choose `l` columns so every row is covered at least `s` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSystem {
    matrix: CoverMatrix,
    l: usize,
    s: usize,
    mask: FixedBitSet,
    repeats: bool,
}

impl CoverSystem {
    /// A system over `matrix` where columns may be chosen more than once.
    pub fn new(matrix: CoverMatrix, l: usize, s: usize) -> Result<Self, ExtensionError> {
        if l == 0 || s == 0 {
            return Err(ExtensionError::BadParameters { l, s });
        }
        let mask = FixedBitSet::with_capacity(matrix.num_cols());
        Ok(CoverSystem {
            matrix,
            l,
            s,
            mask,
            repeats: true,
        })
    }

    pub fn for_code(d: &IntersectionMatrixD, l: usize, s: usize) -> Result<Self, ExtensionError> {
        CoverSystem::new(d.matrix.clone(), l, s)
    }

    /// Require the chosen columns to be pairwise distinct.
    pub fn distinct(mut self) -> Self {
        self.repeats = false;
        self
    }

    pub fn with_masked(mut self, cols: impl IntoIterator<Item = usize>) -> Self {
        for c in cols {
            self.mask.insert(c);
        }
        self
    }

    pub fn matrix(&self) -> &CoverMatrix {
        &self.matrix
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn repeats_allowed(&self) -> bool {
        self.repeats
    }

    pub fn is_masked(&self, col: usize) -> bool {
        self.mask.contains(col)
    }

    pub fn masked_count(&self) -> usize {
        self.mask.count_ones(..)
    }

    pub fn selectable(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.matrix.num_cols()).filter(|&c| !self.mask.contains(c))
    }

    fn validate(&self, x: &[usize]) -> Result<(), ExtensionError> {
        if x.len() != self.l {
            return Err(ExtensionError::WrongSize {
                expected: self.l,
                got: x.len(),
            });
        }
        let cols = self.matrix.num_cols();
        for (i, &c) in x.iter().enumerate() {
            if c >= cols {
                return Err(ExtensionError::ColumnOutOfRange { column: c, cols });
            }
            if self.mask.contains(c) {
                return Err(ExtensionError::MaskedColumn(c));
            }
            if !self.repeats && x[..i].contains(&c) {
                return Err(ExtensionError::RepeatedColumn(c));
            }
        }
        Ok(())
    }

    /// Per-row coverage of the multiset `x`, counting repeats.
    pub fn coverage(&self, x: &[usize]) -> Result<Vec<usize>, ExtensionError> {
        self.validate(x)?;
        Ok(self
            .matrix
            .rows
            .iter()
            .map(|r| x.iter().filter(|&&c| r.contains(c)).count())
            .collect())
    }

    pub fn is_good_extension(&self, x: &[usize]) -> Result<bool, ExtensionError> {
        Ok(self.coverage(x)?.iter().all(|&c| c >= self.s))
    }

    /// `y_i = coverage_i - s`.
    pub fn slacks(&self, x: &[usize]) -> Result<Vec<usize>, ExtensionError> {
        self.coverage(x)?
            .into_iter()
            .enumerate()
            .map(|(row, c)| {
                c.checked_sub(self.s).ok_or(ExtensionError::Infeasible {
                    row,
                    coverage: c,
                    s: self.s,
                })
            })
            .collect()
    }
}

/// A covering multiset and its per-row slacks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ExtensionSolution {
    pub columns: Vec<usize>,
    pub slacks: Vec<usize>,
}

impl ExtensionSolution {
    pub fn min_slack(&self) -> usize {
        self.slacks.iter().copied().min().unwrap_or(0)
    }
}

/// Masks every column whose point already occurs in the code, so that
/// solutions keep a projective code projective.
pub fn projective_filter(
    sys: CoverSystem,
    code: &LinearCode,
) -> Result<CoverSystem, ExtensionError> {
    if sys.matrix.num_cols() != code.rep_count() {
        return Err(ExtensionError::Consistency(format!(
            "system has {} columns, code has {} candidate columns",
            sys.matrix.num_cols(),
            code.rep_count()
        )));
    }
    let points = code_points(code)?;
    Ok(sys.with_masked(points.iter().map(|(p, _)| p)))
}

/// Appends the D-columns named by `x` to the code's generator matrix,
/// sorted by column index.
pub fn apply_extension(
    code: &LinearCode,
    x: &[usize],
    d: &IntersectionMatrixD,
) -> Result<LinearCode, ExtensionError> {
    if d.q != code.field().q() || d.k != code.k() {
        return Err(ExtensionError::Consistency(format!(
            "D was built for q = {}, k = {}; code has q = {}, k = {}",
            d.q,
            d.k,
            code.field().q(),
            code.k()
        )));
    }
    if d.row_reps != code.min_weight_generator().reps() {
        return Err(ExtensionError::Consistency(
            "D rows do not match the code's minimum-weight generator".into(),
        ));
    }
    let mut cols = x.to_vec();
    cols.sort_unstable();
    let vectors = cols
        .iter()
        .map(|&c| {
            d.column_vectors
                .get(c)
                .cloned()
                .ok_or(ExtensionError::ColumnOutOfRange {
                    column: c,
                    cols: d.h(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let gen: GeneratorMatrix = code.generator().append_columns(&vectors)?;
    Ok(LinearCode::new(gen, *code.limits())?)
}

/// Outcome of re-analysing an extended code from scratch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub before: CodeParams,
    pub after: CodeParams,
    pub l: usize,
    pub s: usize,
    /// Weight gap of the original code; `None` when it has one nonzero weight.
    pub gap: Option<usize>,
    /// Distance the covering argument guarantees.
    pub guaranteed_d: usize,
    pub min_weight_count: u64,
    pub distribution: WeightDistribution,
}

pub fn verify_extension(
    old: &LinearCode,
    new: &LinearCode,
    s: usize,
) -> Result<VerificationReport, ExtensionError> {
    let (og, ng) = (old.generator(), new.generator());
    if og.field() != ng.field() || og.k() != ng.k() || ng.n() < og.n() {
        return Err(ExtensionError::Consistency(
            "new code is not an extension of the old one".into(),
        ));
    }
    if og
        .rows()
        .iter()
        .zip(ng.rows())
        .any(|(a, b)| b.codes()[..og.n()] != *a.codes())
    {
        return Err(ExtensionError::Consistency(
            "new generator does not start with the old generator".into(),
        ));
    }
    let l = ng.n() - og.n();
    let d_old = old.min_distance();
    let gap = old.weight_gap().ok();
    let guaranteed_d = d_old + gap.map_or(s, |g| s.min(g));
    let dist = new.weight_distribution().clone();
    let d_new = new.min_distance();
    if d_new < guaranteed_d {
        return Err(ExtensionError::VerificationFailed(format!(
            "extended distance {d_new} is below the guaranteed {guaranteed_d}"
        )));
    }
    if d_new > d_old + l {
        return Err(ExtensionError::VerificationFailed(format!(
            "distance rose from {d_old} to {d_new} with only {l} added columns"
        )));
    }
    Ok(VerificationReport {
        before: old.params(),
        after: new.params(),
        l,
        s,
        gap,
        guaranteed_d,
        min_weight_count: dist.count(d_new),
        distribution: dist,
    })
}

/// Minimum-weight count implied by the slacks alone: the old minimum-weight
/// words that gained exactly s letters. It ignores words that were heavier
/// before extension, so it can undercount.
pub fn slack_predicted_min_count(q: u32, slacks: &[usize]) -> u64 {
    (q as u64 - 1) * slacks.iter().filter(|&&y| y == 0).count() as u64
}

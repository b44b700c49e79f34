//! The projective geometry PG(k-1, q) behind a code of dimension k.
//!
//! Points and hyperplanes are both indexed by canonical-representative order;
//! a hyperplane is identified by its canonical normal vector. Incidence bits
//! are 1 when the point lies on the hyperplane (inner product zero).

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::code::LinearCode;
use crate::field::{canonical_representatives, FieldError, FieldSpec, KVector};
use crate::limits::{LimitError, Limits};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("code is degenerate: column {column} is all zero")]
    Degenerate { column: usize },
    #[error("point {0} is not a canonical vector")]
    NotCanonical(KVector),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectivePoint {
    coords: KVector,
    index: usize,
}

impl ProjectivePoint {
    /// Normalizes `v` to its canonical representative.
    pub fn from_vector(spec: &FieldSpec, v: &KVector) -> Option<Self> {
        let coords = spec.normalize(v.codes())?;
        let index = spec.canonical_index(coords.codes())?;
        Some(ProjectivePoint { coords, index })
    }

    pub fn at(spec: &FieldSpec, k: usize, index: usize) -> Self {
        ProjectivePoint {
            coords: spec.canonical_at(k, index),
            index,
        }
    }

    pub fn coords(&self) -> &KVector {
        &self.coords
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

/// `{x : <normal, x> = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    normal: ProjectivePoint,
}

impl Hyperplane {
    pub fn new(normal: ProjectivePoint) -> Self {
        Hyperplane { normal }
    }

    pub fn normal(&self) -> &KVector {
        &self.normal.coords
    }

    pub fn index(&self) -> usize {
        self.normal.index
    }

    pub fn contains(&self, spec: &FieldSpec, p: &ProjectivePoint) -> bool {
        spec.dot_raw(self.normal.coords.codes(), p.coords.codes()) == 0
    }
}

/// Point-hyperplane incidence matrix of PG(k-1, q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    k: usize,
    rows: Vec<FixedBitSet>,
}

impl IncidenceMatrix {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Point `point` lies on hyperplane `hyperplane`.
    pub fn get(&self, hyperplane: usize, point: usize) -> bool {
        self.rows[hyperplane].contains(point)
    }

    pub fn row(&self, hyperplane: usize) -> &FixedBitSet {
        &self.rows[hyperplane]
    }

    pub fn row_sum(&self, hyperplane: usize) -> usize {
        self.rows[hyperplane].count_ones(..)
    }

    pub fn column_sum(&self, point: usize) -> usize {
        self.rows.iter().filter(|r| r.contains(point)).count()
    }
}

pub fn incidence_matrix(
    spec: &FieldSpec,
    k: usize,
    limits: &Limits,
) -> Result<IncidenceMatrix, GeometryError> {
    let h = spec.projective_count(k).unwrap_or(u128::MAX);
    // Memory is h^2 bits; allow one 64-bit word per unit of cap.
    limits.check("incidence matrix words", (h.saturating_mul(h)).div_ceil(64))?;
    let pts = canonical_representatives(spec, k, limits)?;
    let rows = pts
        .iter()
        .map(|normal| {
            let mut row = FixedBitSet::with_capacity(pts.len());
            for (j, p) in pts.iter().enumerate() {
                if spec.dot_raw(normal.codes(), p.codes()) == 0 {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    Ok(IncidenceMatrix { k, rows })
}

/// The multiset of points formed by the columns of a generator matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMultiset {
    k: usize,
    multiplicities: BTreeMap<usize, usize>,
}

impl PointMultiset {
    /// Builds a multiset from (point index, multiplicity) pairs.
    pub fn from_indices(k: usize, points: impl IntoIterator<Item = usize>) -> Self {
        let mut multiplicities = BTreeMap::new();
        for p in points {
            *multiplicities.entry(p).or_insert(0) += 1;
        }
        PointMultiset { k, multiplicities }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn total(&self) -> usize {
        self.multiplicities.values().sum()
    }

    pub fn multiplicity(&self, point: usize) -> usize {
        self.multiplicities.get(&point).copied().unwrap_or(0)
    }

    /// (point index, multiplicity) in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.multiplicities.iter().map(|(&p, &m)| (p, m))
    }

    pub fn distinct(&self) -> usize {
        self.multiplicities.len()
    }

    /// All multiplicities are one.
    pub fn is_set(&self) -> bool {
        self.multiplicities.values().all(|&m| m == 1)
    }

    /// Total multiplicity of the points on `h`.
    pub fn intersection(&self, spec: &FieldSpec, h: &Hyperplane) -> usize {
        self.multiplicities
            .iter()
            .filter(|(&p, _)| {
                spec.dot_raw(h.normal().codes(), spec.canonical_at(self.k, p).codes()) == 0
            })
            .map(|(_, &m)| m)
            .sum()
    }
}

pub fn code_points(code: &LinearCode) -> Result<PointMultiset, GeometryError> {
    let spec = code.field();
    let gen = code.generator();
    let mut idx = Vec::with_capacity(gen.n());
    for j in 0..gen.n() {
        let p = ProjectivePoint::from_vector(spec, &gen.column(j))
            .ok_or(GeometryError::Degenerate { column: j })?;
        idx.push(p.index);
    }
    Ok(PointMultiset::from_indices(gen.k(), idx))
}

/// Extension criterion in geometric form: adding the `chosen` points to the
/// code raises its minimum distance above `d` iff no hyperplane through all
/// chosen points meets `p` in `n - d` (or more) points. A hyperplane meeting
/// `p` in exactly `n - d` points is the kernel of a minimum-weight codeword,
/// and that codeword gains a nonzero letter iff some chosen point is off it.
pub fn lemma5_check(
    spec: &FieldSpec,
    p: &PointMultiset,
    chosen: &[ProjectivePoint],
    n: usize,
    d: usize,
    limits: &Limits,
) -> Result<bool, GeometryError> {
    assert!(!chosen.is_empty(), "at least one point must be chosen");
    for c in chosen {
        if !c.coords.is_canonical() || c.coords.len() != p.k {
            return Err(GeometryError::NotCanonical(c.coords.clone()));
        }
    }
    let threshold = n.saturating_sub(d);
    let normals = canonical_representatives(spec, p.k, limits)?;
    for (i, normal) in normals.into_iter().enumerate() {
        let h = Hyperplane::new(ProjectivePoint {
            coords: normal,
            index: i,
        });
        if chosen.iter().all(|c| h.contains(spec, c)) && p.intersection(spec, &h) >= threshold {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{weight, GeneratorMatrix};

    fn code(q: u32, rows: &[Vec<u32>]) -> LinearCode {
        let f = FieldSpec::new(q).unwrap();
        LinearCode::new(
            GeneratorMatrix::from_codes(f, rows).unwrap(),
            Limits::default(),
        )
        .unwrap()
    }

    fn hamming() -> LinearCode {
        code(
            2,
            &[
                vec![1, 0, 0, 0, 1, 1, 0],
                vec![0, 1, 0, 0, 0, 1, 1],
                vec![0, 0, 1, 0, 1, 1, 1],
                vec![0, 0, 0, 1, 1, 0, 1],
            ],
        )
    }

    #[test]
    fn hamming_points_are_distinct() {
        let p = code_points(&hamming()).unwrap();
        assert_eq!(p.distinct(), 7);
        assert!(p.is_set());
        assert_eq!(p.total(), 7);
    }

    #[test]
    fn repetition_is_one_point() {
        let p = code_points(&code(2, &[vec![1, 1, 1]])).unwrap();
        assert_eq!(p.iter().collect::<Vec<_>>(), vec![(0, 3)]);
    }

    #[test]
    fn proportional_columns_collapse() {
        let p = code_points(&code(3, &[vec![1, 2, 0], vec![0, 0, 1]])).unwrap();
        // (1,0) and (2,0) are the same point.
        assert_eq!(p.distinct(), 2);
        let pt = ProjectivePoint::from_vector(
            &FieldSpec::new(3).unwrap(),
            &KVector::from_codes(&FieldSpec::new(3).unwrap(), &[2, 0]).unwrap(),
        )
        .unwrap();
        assert_eq!(p.multiplicity(pt.index()), 2);
    }

    #[test]
    fn degenerate_code_refused() {
        let c = code(2, &[vec![1, 0, 1], vec![0, 0, 1]]);
        assert_eq!(
            code_points(&c),
            Err(GeometryError::Degenerate { column: 1 })
        );
    }

    #[test]
    fn incidence_row_and_column_sums() {
        let lim = Limits::default();
        for (q, k, side, sum) in [(2, 3, 7, 3), (3, 2, 4, 1), (2, 4, 15, 7), (4, 3, 21, 5)] {
            let m = incidence_matrix(&FieldSpec::new(q).unwrap(), k, &lim).unwrap();
            assert_eq!(m.size(), side);
            for i in 0..side {
                assert_eq!(m.row_sum(i), sum);
                assert_eq!(m.column_sum(i), sum);
            }
        }
        assert!(incidence_matrix(&FieldSpec::new(3).unwrap(), 8, &Limits::new(1000)).is_err());
    }

    #[test]
    fn intersection_matches_codeword_weight() {
        let c = hamming();
        let spec = c.field().clone();
        let p = code_points(&c).unwrap();
        for (i, g) in canonical_representatives(&spec, 4, &Limits::default())
            .unwrap()
            .into_iter()
            .enumerate()
        {
            let w = weight(&c.encode(&g).unwrap());
            let h = Hyperplane::new(ProjectivePoint::at(&spec, 4, i));
            assert_eq!(c.n() - p.intersection(&spec, &h), w);
        }
    }

    #[test]
    fn lemma5_on_hamming() {
        let c = hamming();
        let spec = c.field().clone();
        let p = code_points(&c).unwrap();
        let lim = Limits::default();
        let parity = ProjectivePoint::from_vector(
            &spec,
            &KVector::from_codes(&spec, &[1, 1, 0, 1]).unwrap(),
        )
        .unwrap();
        assert!(lemma5_check(&spec, &p, &[parity], 7, 3, &lim).unwrap());
        // A code point lies on hyperplanes that hold 4 = n - d points.
        let on_code = ProjectivePoint::from_vector(&spec, &c.generator().column(0)).unwrap();
        assert!(!lemma5_check(&spec, &p, &[on_code], 7, 3, &lim).unwrap());
    }

    #[test]
    fn lemma5_single_point_geometry() {
        // PG(0, 2): the only hyperplane is empty, so any extension works.
        let c = code(2, &[vec![1, 1, 1]]);
        let spec = c.field().clone();
        let p = code_points(&c).unwrap();
        let pt = ProjectivePoint::at(&spec, 1, 0);
        assert!(lemma5_check(&spec, &p, &[pt], 3, 3, &Limits::default()).unwrap());
    }
}

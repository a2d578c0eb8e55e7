//! Exact rational linear algebra.
//!
//! Subspaces of `Q^N` are stored in annihilator form: the solution set of a
//! constraint matrix kept in reduced row echelon form. Because the RREF of a
//! row space is unique, two subspaces are equal as sets exactly when their
//! constraint matrices (and hence their serializations) are identical.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from explicit rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(Error::Shape {
                    expected: format!("{cols} columns"),
                    found: format!("{} columns", row.len()),
                });
            }
            entries.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols,
            entries,
        })
    }

    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rational]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape {
                expected: format!("{} rows on the right factor", self.cols),
                found: format!("{} rows", rhs.rows),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        debug_assert_eq!(v.len(), self.cols);
        self.row_iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Shape {
                expected: format!("{} columns", self.cols),
                found: format!("{} columns", other.cols),
            });
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Reduced row echelon form with zero rows dropped.
    pub fn rref(&self) -> Self {
        self.rref_with_pivots().0
    }

    /// Reduced row echelon form together with its pivot columns.
    pub fn rref_with_pivots(&self) -> (Self, Vec<usize>) {
        let mut rows: Vec<Vec<Rational>> = self
            .row_iter()
            .filter(|r| r.iter().any(|v| !v.is_zero()))
            .map(|r| r.to_vec())
            .collect();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..self.cols {
            if lead == rows.len() {
                break;
            }
            let Some(p) = (lead..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(lead, p);
            let inv = rows[lead][col].recip();
            if !inv.is_one() {
                for v in rows[lead][col..].iter_mut() {
                    if !v.is_zero() {
                        *v *= &inv;
                    }
                }
            }
            let (head, tail) = rows.split_at_mut(lead);
            let (pivot_row, tail) = tail.split_first_mut().expect("pivot row");
            for other in head.iter_mut().chain(tail.iter_mut()) {
                let factor = other[col].clone();
                if factor.is_zero() {
                    continue;
                }
                for (o, p) in other[col..].iter_mut().zip(&pivot_row[col..]) {
                    if !p.is_zero() {
                        *o -= &factor * p;
                    }
                }
            }
            pivots.push(col);
            lead += 1;
        }
        rows.truncate(lead);
        let m = Self {
            rows: rows.len(),
            cols: self.cols,
            entries: rows.into_iter().flatten().collect(),
        };
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// A basis of the right kernel `{v : M v = 0}`.
    ///
    /// Each basis vector has a one in its own free column and zeros in every
    /// other free column, so coordinates of a kernel vector in this basis can
    /// be read off its free columns.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref_with_pivots();
        kernel_from_rref(&r, &pivots)
    }
}

/// Free columns of a matrix in RREF with the given pivots.
pub fn free_columns(cols: usize, pivots: &[usize]) -> Vec<usize> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols).filter(|&c| !is_pivot[c]).collect()
}

/// Kernel basis of a matrix already in RREF, one vector per free column.
pub fn kernel_from_rref(r: &RationalMatrix, pivots: &[usize]) -> Vec<Vec<Rational>> {
    free_columns(r.cols, pivots)
        .into_iter()
        .map(|free| {
            let mut v = vec![Rational::zero(); r.cols];
            v[free] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                let e = &r[(i, free)];
                if !e.is_zero() {
                    v[p] = -e;
                }
            }
            v
        })
        .collect()
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

/// Free function form of [`RationalMatrix::rref`].
pub fn rref(m: &RationalMatrix) -> RationalMatrix {
    m.rref()
}

/// A linear map `Q^source -> Q^target`, stored as a `target x source` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearMap {
    matrix: RationalMatrix,
}

impl LinearMap {
    pub fn new(matrix: RationalMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(RationalMatrix::identity(n))
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        Ok(LinearMap::new(self.matrix.mul(&inner.matrix)?))
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix.mul_vec(v)
    }

    pub fn is_surjective(&self) -> bool {
        self.matrix.rank() == self.target_dim()
    }

    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        self.matrix.kernel_basis()
    }
}

/// A linear subspace `{v in Q^N : C v = 0}` with `C` in canonical RREF.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    constraints: RationalMatrix,
}

impl Subspace {
    /// The whole space `Q^N`.
    pub fn ambient(n: usize) -> Self {
        Self {
            ambient_dim: n,
            constraints: RationalMatrix::zeros(0, n),
        }
    }

    pub fn from_constraints(n: usize, rows: &RationalMatrix) -> Result<Self> {
        if rows.cols() != n {
            return Err(Error::Shape {
                expected: format!("{n} columns"),
                found: format!("{} columns", rows.cols()),
            });
        }
        Ok(Self {
            ambient_dim: n,
            constraints: rows.rref(),
        })
    }

    /// Convenience constructor from integer constraint rows.
    pub fn from_i64(n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_constraints(n, &RationalMatrix::from_i64_rows(n, rows)?)
    }

    /// The span of the given vectors.
    pub fn span(n: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        let m = RationalMatrix::from_rows(n, vectors.to_vec())?;
        let annihilator = m.kernel_basis();
        Self::from_constraints(n, &RationalMatrix::from_rows(n, annihilator)?)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn codim(&self) -> usize {
        self.constraints.rows()
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim - self.codim()
    }

    pub fn constraints(&self) -> &RationalMatrix {
        &self.constraints
    }

    /// Whether some constraint involves coordinate `col`.
    pub fn uses_coordinate(&self, col: usize) -> bool {
        (0..self.codim()).any(|i| !self.constraints[(i, col)].is_zero())
    }

    /// A spanning set (in fact a basis) of the subspace.
    pub fn basis(&self) -> Vec<Vec<Rational>> {
        let pivots: Vec<usize> = self
            .constraints
            .row_iter()
            .map(|r| r.iter().position(|v| !v.is_zero()).expect("rref row"))
            .collect();
        kernel_from_rref(&self.constraints, &pivots)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch(self.ambient_dim, other.ambient_dim));
        }
        Ok(())
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Subspace {
            ambient_dim: self.ambient_dim,
            constraints: self.constraints.vstack(&other.constraints)?.rref(),
        })
    }

    /// Reduces `v` modulo the row space of the constraint matrix.
    fn reduce(&self, v: &mut [Rational]) {
        for row in self.constraints.row_iter() {
            let p = row.iter().position(|x| !x.is_zero()).expect("rref row");
            if v[p].is_zero() {
                continue;
            }
            let factor = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &factor * r;
                }
            }
        }
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        if self.codim() > other.codim() {
            return Ok(false);
        }
        Ok(self.constraints.row_iter().all(|row| {
            let mut v = row.to_vec();
            other.reduce(&mut v);
            v.iter().all(Zero::is_zero)
        }))
    }

    /// Whether `v` lies in the subspace.
    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        self.constraints.mul_vec(v).iter().all(Zero::is_zero)
    }

    /// `f^{-1}(self)` for `f` mapping into the ambient space of `self`.
    pub fn preimage(&self, f: &LinearMap) -> Result<Subspace> {
        if f.target_dim() != self.ambient_dim {
            return Err(Error::Shape {
                expected: format!("map into Q^{}", self.ambient_dim),
                found: format!("map into Q^{}", f.target_dim()),
            });
        }
        Subspace::from_constraints(f.source_dim(), &self.constraints.mul(f.matrix())?)
    }

    /// `f(self)` for `f` defined on the ambient space of `self`.
    pub fn direct_image(&self, f: &LinearMap) -> Result<Subspace> {
        if f.source_dim() != self.ambient_dim {
            return Err(Error::Shape {
                expected: format!("map out of Q^{}", self.ambient_dim),
                found: format!("map out of Q^{}", f.source_dim()),
            });
        }
        let images: Vec<Vec<Rational>> = self.basis().iter().map(|b| f.apply(b)).collect();
        Subspace::span(f.target_dim(), &images)
    }

    /// Canonical text form: `N:` followed by one bracketed row per constraint.
    pub fn serialize(&self) -> String {
        let mut s = format!("{}:", self.ambient_dim);
        for row in self.constraints.row_iter() {
            s.push('[');
            let parts: Vec<String> = row.iter().map(format_rational).collect();
            s.push_str(&parts.join(","));
            s.push(']');
        }
        s
    }

    /// Inverse of [`Subspace::serialize`]; the rows are re-canonicalized.
    pub fn parse(s: &str) -> Result<Subspace> {
        let (n, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in subspace {s:?}")))?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::Parse(format!("bad ambient dimension in {s:?}")))?;
        let mut rows = Vec::new();
        let mut rest = rest.trim();
        while !rest.is_empty() {
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.split_once(']'))
                .ok_or_else(|| Error::Parse(format!("malformed row in {s:?}")))?;
            let row = inner
                .0
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            rest = inner.1.trim();
        }
        Subspace::from_constraints(n, &RationalMatrix::from_rows(n, rows)?)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: usize, rows: &[Vec<i64>]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(cols, rows).unwrap()
    }

    fn sub(n: usize, rows: &[Vec<i64>]) -> Subspace {
        Subspace::from_i64(n, rows).unwrap()
    }

    #[test]
    fn rref_examples() {
        assert_eq!(m(2, &[vec![2, 0], vec![0, 3]]).rref(), m(2, &[vec![1, 0], vec![0, 1]]));
        assert_eq!(m(2, &[vec![1, -1], vec![2, -2]]).rref(), m(2, &[vec![1, -1]]));
        assert_eq!(
            m(3, &[vec![0, 1, 1], vec![1, 0, 1]]).rref(),
            m(3, &[vec![1, 0, 1], vec![0, 1, 1]])
        );
    }

    #[test]
    fn rref_with_fractions() {
        let r = m(3, &[vec![2, 4, 1], vec![3, 1, 0]]).rref();
        assert_eq!(r.row(0)[0], rat(1));
        assert_eq!(r.row(0)[1], rat(0));
        assert_eq!(r.row(0)[2], ratio(-1, 10));
        assert_eq!(r.row(1)[2], ratio(3, 10));
    }

    #[test]
    fn constraint_examples() {
        assert_eq!(sub(2, &[vec![1, -1]]).codim(), 1);
        assert_eq!(
            sub(3, &[vec![1, -1, 0], vec![0, 1, -1], vec![1, 0, -1]]).codim(),
            2
        );
        assert_eq!(sub(2, &[]).codim(), 0);
        assert!(matches!(
            Subspace::from_constraints(3, &m(2, &[vec![1, -1]])),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn intersection_examples() {
        let d12 = sub(3, &[vec![1, -1, 0]]);
        let d23 = sub(3, &[vec![0, 1, -1]]);
        let full = d12.intersect(&d23).unwrap();
        assert_eq!(full.codim(), 2);
        assert_eq!(full, sub(3, &[vec![1, 0, -1], vec![0, 1, -1]]));
        assert_eq!(d12.intersect(&d12).unwrap(), d12);

        let a = sub(4, &[vec![1, -1, 0, 0]]);
        let b = sub(4, &[vec![0, 0, 1, -1]]);
        assert_eq!(
            a.intersect(&b).unwrap(),
            sub(4, &[vec![1, -1, 0, 0], vec![0, 0, 1, -1]])
        );
        assert_eq!(
            a.intersect(&d12),
            Err(Error::AmbientMismatch(4, 3))
        );
    }

    #[test]
    fn containment_examples() {
        let d12 = sub(3, &[vec![1, -1, 0]]);
        let d23 = sub(3, &[vec![0, 1, -1]]);
        let full = d12.intersect(&d23).unwrap();
        assert!(d12.contains(&full).unwrap());
        assert!(!d12.contains(&d23).unwrap());
        assert!(Subspace::ambient(3).contains(&d23).unwrap());
        assert!(!full.contains(&d12).unwrap());
    }

    fn projection(dims: usize, keep: &[usize]) -> LinearMap {
        let mut mat = RationalMatrix::zeros(keep.len(), dims);
        for (i, &k) in keep.iter().enumerate() {
            mat[(i, k)] = rat(1);
        }
        LinearMap::new(mat)
    }

    #[test]
    fn preimage_examples() {
        let diag2 = sub(2, &[vec![1, -1]]);
        // drop coordinate 2
        let f = projection(3, &[0, 2]);
        assert_eq!(diag2.preimage(&f).unwrap(), sub(3, &[vec![1, 0, -1]]));
        assert_eq!(diag2.preimage(&LinearMap::identity(2)).unwrap(), diag2);
        // drop coordinate 3
        let g = projection(3, &[0, 1]);
        assert_eq!(diag2.preimage(&g).unwrap(), sub(3, &[vec![1, -1, 0]]));
        assert!(diag2.preimage(&LinearMap::identity(3)).is_err());
    }

    #[test]
    fn direct_image_examples() {
        let diag2 = sub(2, &[vec![1, -1]]);
        let g = projection(3, &[0, 1]);
        assert_eq!(sub(3, &[vec![1, -1, 0]]).direct_image(&g).unwrap(), diag2);
        let x = sub(3, &[vec![1, -1, 0]]);
        assert_eq!(x.direct_image(&LinearMap::identity(3)).unwrap(), x);
        let full = sub(3, &[vec![1, -1, 0], vec![0, 1, -1]]);
        let f = projection(3, &[0, 2]);
        assert_eq!(full.direct_image(&f).unwrap(), diag2);
        assert!(full.direct_image(&LinearMap::identity(2)).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let x = Subspace::from_constraints(
            3,
            &RationalMatrix::from_rows(3, vec![vec![rat(2), ratio(1, 3), rat(0)]]).unwrap(),
        )
        .unwrap();
        let s = x.serialize();
        assert_eq!(s, "3:[1,1/6,0]");
        assert_eq!(Subspace::parse(&s).unwrap(), x);
        assert_eq!(Subspace::ambient(2).serialize(), "2:");
        assert_eq!(Subspace::parse("2:").unwrap(), Subspace::ambient(2));
        assert!(Subspace::parse("2:[1,x]").is_err());
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&ratio(-6, 4)), "-3/2");
        assert_eq!(format_rational(&rat(5)), "5");
        assert_eq!(parse_rational(" -3/2 ").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn kernel_basis_reads_free_columns() {
        let a = m(4, &[vec![1, 2, 0, -1], vec![0, 0, 1, 3]]);
        let ker = a.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        assert_eq!(ker[0][1], rat(1));
        assert_eq!(ker[0][3], rat(0));
        assert_eq!(ker[1][3], rat(1));
    }
}

//! Exact linear algebra over Q and Q(i).
//!
//! Every routine goes through a streaming reduced row echelon form built on
//! sparse rows. Over Q the elimination is fraction-free: rows are scaled to
//! primitive integer vectors and combined by cross-multiplication, with the
//! content divided out after each step. Inertia is computed by symmetric
//! congruence (no eigenvalues), splitting the form into connected blocks
//! first so that large, very sparse forms stay cheap.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{GaussRational, Rational, Scalar};

/// Sparse row: `(column, value)` pairs sorted by column, zeros dropped.
pub type SparseRow<F> = Vec<(usize, F)>;

/// Fill ratio below which `Matrix::from_rows` stores entries sparsely.
pub const SPARSE_FILL_THRESHOLD: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
enum Storage<F> {
    Dense(Vec<F>),
    Sparse(Vec<SparseRow<F>>),
}

#[derive(Clone, Debug)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    storage: Storage<F>,
}

pub fn sparsify<F: Scalar>(v: &[F]) -> SparseRow<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(k, x)| (k, x.clone()))
        .collect()
}

pub fn densify<F: Scalar>(row: &SparseRow<F>, len: usize) -> Vec<F> {
    let mut out = vec![F::zero(); len];
    for (k, x) in row {
        out[*k] = x.clone();
    }
    out
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            storage: Storage::Sparse(vec![Vec::new(); rows]),
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix {
            rows: n,
            cols: n,
            storage: Storage::Sparse((0..n).map(|k| vec![(k, F::one())]).collect()),
        }
    }

    pub fn diagonal(entries: &[F]) -> Self {
        let n = entries.len();
        Matrix::from_sparse_rows(
            n,
            n,
            entries
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    if x.is_zero() {
                        vec![]
                    } else {
                        vec![(k, x.clone())]
                    }
                })
                .collect(),
        )
    }

    /// Builds a matrix from dense rows, choosing sparse storage when fewer
    /// than a quarter of the entries are nonzero.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let nrows = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let nnz = rows.iter().flatten().filter(|x| !x.is_zero()).count();
        let total = (nrows * cols).max(1);
        if (nnz as f64) / (total as f64) < SPARSE_FILL_THRESHOLD {
            Matrix::from_sparse_rows(nrows, cols, rows.iter().map(|r| sparsify(r)).collect())
        } else {
            Matrix::dense(nrows, cols, rows.into_iter().flatten().collect())
        }
    }

    pub fn with_cols(cols: usize, rows: Vec<Vec<F>>) -> Self {
        if rows.is_empty() {
            return Matrix::zeros(0, cols);
        }
        Matrix::from_rows(rows)
    }

    pub fn dense(rows: usize, cols: usize, entries: Vec<F>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix {
            rows,
            cols,
            storage: Storage::Dense(entries),
        }
    }

    pub fn from_sparse_rows(rows: usize, cols: usize, data: Vec<SparseRow<F>>) -> Self {
        assert_eq!(data.len(), rows);
        debug_assert!(data
            .iter()
            .all(|r| r.windows(2).all(|w| w[0].0 < w[1].0) && r.iter().all(|(c, _)| *c < cols)));
        Matrix {
            rows,
            cols,
            storage: Storage::Sparse(data),
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Self {
        let cols = columns.len();
        let mut data = vec![Vec::new(); rows];
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, x) in col.iter().enumerate() {
                if !x.is_zero() {
                    data[r].push((c, x.clone()));
                }
            }
        }
        Matrix::from_sparse_rows(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        match &self.storage {
            Storage::Dense(v) => v[r * self.cols + c].clone(),
            Storage::Sparse(rows) => rows[r]
                .binary_search_by_key(&c, |(k, _)| *k)
                .map(|k| rows[r][k].1.clone())
                .unwrap_or_else(|_| F::zero()),
        }
    }

    pub fn sparse_row(&self, r: usize) -> SparseRow<F> {
        match &self.storage {
            Storage::Dense(v) => sparsify(&v[r * self.cols..(r + 1) * self.cols]),
            Storage::Sparse(rows) => rows[r].clone(),
        }
    }

    pub fn sparse_rows(&self) -> Vec<SparseRow<F>> {
        (0..self.rows).map(|r| self.sparse_row(r)).collect()
    }

    pub fn dense_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows)
            .map(|r| densify(&self.sparse_row(r), self.cols))
            .collect()
    }

    pub fn to_dense(&self) -> Self {
        Matrix::dense(
            self.rows,
            self.cols,
            self.dense_rows().into_iter().flatten().collect(),
        )
    }

    pub fn to_sparse(&self) -> Self {
        Matrix::from_sparse_rows(self.rows, self.cols, self.sparse_rows())
    }

    pub fn nnz(&self) -> usize {
        (0..self.rows).map(|r| self.sparse_row(r).len()).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for r in 0..self.rows {
            for (c, x) in self.sparse_row(r) {
                data[c].push((r, x));
            }
        }
        Matrix::from_sparse_rows(self.cols, self.rows, data)
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = self.transpose();
        if let Storage::Sparse(rows) = &mut t.storage {
            for row in rows.iter_mut() {
                for (_, x) in row.iter_mut() {
                    *x = x.conj();
                }
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        let data = self
            .sparse_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|(c, x)| (c, -x)).collect())
            .collect();
        Matrix::from_sparse_rows(self.rows, self.cols, data)
    }

    pub fn mul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let other_rows = other.sparse_rows();
        let data = (0..self.rows)
            .map(|r| {
                let mut acc: BTreeMap<usize, F> = BTreeMap::new();
                for (k, a) in self.sparse_row(r) {
                    for (c, b) in &other_rows[k] {
                        let e = acc.entry(*c).or_insert_with(F::zero);
                        *e = e.clone() + a.clone() * b.clone();
                    }
                }
                acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
            })
            .collect();
        Matrix::from_sparse_rows(self.rows, other.cols, data)
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.sparse_row(r)
                    .into_iter()
                    .fold(F::zero(), |acc, (c, x)| acc + x * v[c].clone())
            })
            .collect()
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        let data = self
            .sparse_rows()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|(c, x)| (c, f(&x)))
                    .filter(|(_, x)| !x.is_zero())
                    .collect()
            })
            .collect();
        Matrix::from_sparse_rows(self.rows, self.cols, data)
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.cols);
        let mut data = self.sparse_rows();
        data.extend(other.sparse_rows());
        Matrix::from_sparse_rows(self.rows + other.rows, self.cols, data)
    }

    pub fn is_zero(&self) -> bool {
        (0..self.rows).all(|r| self.sparse_row(r).is_empty())
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && self.entries_equal(&self.conj_transpose())
    }

    /// Entry-wise equality, independent of storage.
    pub fn entries_equal(&self, other: &Matrix<F>) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && (0..self.rows).all(|r| self.sparse_row(r) == other.sparse_row(r))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl<F: Scalar> PartialEq for Matrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.entries_equal(other)
    }
}

/// Reduced row echelon form: every pivot entry is 1 and pivot columns are
/// zero in all other rows. `rows[k]` has its pivot at `pivots[k]`.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    pub cols: usize,
    pub rows: Vec<SparseRow<F>>,
    pub pivots: Vec<usize>,
}

impl<F: Scalar> Echelon<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the row space; returns the residue.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = out[p].clone();
            if c.is_zero() {
                continue;
            }
            for (k, x) in row {
                out[*k] = out[*k].clone() - c.clone() * x.clone();
            }
        }
        out
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Coordinates of `v` in terms of the echelon rows, if `v` is in the span.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        let coords: Vec<F> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rebuilt = vec![F::zero(); self.cols];
        for (c, row) in coords.iter().zip(&self.rows) {
            for (k, x) in row {
                rebuilt[*k] = rebuilt[*k].clone() + c.clone() * x.clone();
            }
        }
        (rebuilt == v).then_some(coords)
    }

    pub fn dense_rows(&self) -> Vec<Vec<F>> {
        self.rows.iter().map(|r| densify(r, self.cols)).collect()
    }
}

fn leading<T>(row: &[(usize, T)]) -> Option<usize> {
    row.first().map(|(c, _)| *c)
}

fn entry<T: Clone>(row: &[(usize, T)], col: usize) -> Option<T> {
    row.binary_search_by_key(&col, |(k, _)| *k)
        .ok()
        .map(|k| row[k].1.clone())
}

/// `a*x + b*y` on sparse rows.
fn lin_comb<T>(a: &T, x: &[(usize, T)], b: &T, y: &[(usize, T)]) -> Vec<(usize, T)>
where
    T: Clone + Zero + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (col, val) = match (x.get(i), y.get(j)) {
            (Some((cx, vx)), Some((cy, _))) if cx < cy => {
                i += 1;
                (*cx, a.clone() * vx.clone())
            }
            (Some((cx, _)), Some((cy, vy))) if cy < cx => {
                j += 1;
                (*cy, b.clone() * vy.clone())
            }
            (Some((cx, vx)), Some((_, vy))) => {
                i += 1;
                j += 1;
                (*cx, a.clone() * vx.clone() + b.clone() * vy.clone())
            }
            (Some((cx, vx)), None) => {
                i += 1;
                (*cx, a.clone() * vx.clone())
            }
            (None, Some((cy, vy))) => {
                j += 1;
                (*cy, b.clone() * vy.clone())
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((col, val));
        }
    }
    out
}

fn primitive(row: &mut Vec<(usize, BigInt)>) {
    let mut g = BigInt::zero();
    for (_, x) in row.iter() {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if let Some((_, lead)) = row.first() {
        if lead.is_negative() {
            g = -g;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

fn to_integer_row(row: &SparseRow<Rational>) -> Vec<(usize, BigInt)> {
    let den = row
        .iter()
        .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
    let mut out: Vec<(usize, BigInt)> = row
        .iter()
        .map(|(c, x)| (*c, x.numer() * (&den / x.denom())))
        .collect();
    primitive(&mut out);
    out
}

/// Fraction-free streaming Gauss–Jordan over Z.
pub fn echelon_rational(rows: Vec<SparseRow<Rational>>, cols: usize) -> Echelon<Rational> {
    let mut basis: Vec<(usize, Vec<(usize, BigInt)>)> = Vec::new();
    for row in rows {
        let mut r = to_integer_row(&row);
        for (p, b) in &basis {
            if let Some(q) = entry(&r, *p) {
                let pv = entry(b, *p).expect("pivot entry");
                r = lin_comb(&pv, &r, &-q, b);
                primitive(&mut r);
            }
        }
        let Some(p) = leading(&r) else { continue };
        let pv = entry(&r, p).unwrap();
        for (_, b) in basis.iter_mut() {
            if let Some(q) = entry(b, p) {
                *b = lin_comb(&pv, b, &-q, &r);
                primitive(b);
            }
        }
        basis.push((p, r));
    }
    basis.sort_by_key(|(p, _)| *p);
    let pivots = basis.iter().map(|(p, _)| *p).collect();
    let rows = basis
        .into_iter()
        .map(|(p, b)| {
            let pv = entry(&b, p).unwrap();
            b.into_iter()
                .map(|(c, x)| (c, Rational::new(x, pv.clone())))
                .collect()
        })
        .collect();
    Echelon { cols, rows, pivots }
}

/// Streaming Gauss–Jordan over a field.
pub fn echelon_field<F: Scalar>(rows: Vec<SparseRow<F>>, cols: usize) -> Echelon<F> {
    let mut basis: Vec<(usize, SparseRow<F>)> = Vec::new();
    for row in rows {
        let mut r = row;
        for (p, b) in &basis {
            if let Some(q) = entry(&r, *p) {
                r = lin_comb(&F::one(), &r, &-q, b);
            }
        }
        let Some(p) = leading(&r) else { continue };
        let inv = F::one() / entry(&r, p).unwrap();
        r = r.into_iter().map(|(c, x)| (c, x * inv.clone())).collect();
        for (_, b) in basis.iter_mut() {
            if let Some(q) = entry(b, p) {
                *b = lin_comb(&F::one(), b, &-q, &r);
            }
        }
        basis.push((p, r));
    }
    basis.sort_by_key(|(p, _)| *p);
    Echelon {
        cols,
        pivots: basis.iter().map(|(p, _)| *p).collect(),
        rows: basis.into_iter().map(|(_, r)| r).collect(),
    }
}

/// Dispatches to the fraction-free path over Q.
pub trait EchelonField: Scalar {
    fn echelon_of(rows: Vec<SparseRow<Self>>, cols: usize) -> Echelon<Self>;
}

impl EchelonField for Rational {
    fn echelon_of(rows: Vec<SparseRow<Self>>, cols: usize) -> Echelon<Self> {
        echelon_rational(rows, cols)
    }
}

impl EchelonField for GaussRational {
    fn echelon_of(rows: Vec<SparseRow<Self>>, cols: usize) -> Echelon<Self> {
        echelon_field(rows, cols)
    }
}

pub fn echelon<F: EchelonField>(m: &Matrix<F>) -> Echelon<F> {
    F::echelon_of(m.sparse_rows(), m.cols())
}

/// Echelon form of the span of a list of dense vectors of length `len`.
pub fn span_echelon<F: EchelonField>(vectors: &[Vec<F>], len: usize) -> Echelon<F> {
    F::echelon_of(vectors.iter().map(|v| sparsify(v)).collect(), len)
}

pub fn rank<F: EchelonField>(m: &Matrix<F>) -> usize {
    echelon(m).rank()
}

/// Rank of the span of a list of dense vectors.
pub fn rank_of_vectors<F: EchelonField>(vectors: &[Vec<F>], len: usize) -> usize {
    span_echelon(vectors, len).rank()
}

/// Rank over Q(i) through the realification `v ↦ (Re v, Im v), iv`, which
/// keeps the elimination fraction-free; half the real rank.
pub fn complex_rank(vectors: &[Vec<GaussRational>], len: usize) -> usize {
    let mut real = Vec::with_capacity(2 * vectors.len());
    for v in vectors {
        let re: Vec<Rational> = v.iter().map(|x| x.re.clone()).collect();
        let im: Vec<Rational> = v.iter().map(|x| x.im.clone()).collect();
        real.push([re.clone(), im.clone()].concat());
        real.push([im.into_iter().map(|x| -x).collect::<Vec<_>>(), re].concat());
    }
    rank_of_vectors(&real, 2 * len) / 2
}

/// Basis of the right null space `{x : M x = 0}`. Over Q the vectors are
/// scaled to primitive integers.
pub fn kernel<F: EchelonField>(m: &Matrix<F>) -> Vec<Vec<F>> {
    kernel_of_echelon(&echelon(m))
}

fn kernel_of_echelon<F: Scalar>(e: &Echelon<F>) -> Vec<Vec<F>> {
    let pivot_set: std::collections::BTreeSet<usize> = e.pivots.iter().copied().collect();
    (0..e.cols)
        .filter(|c| !pivot_set.contains(c))
        .map(|free| {
            let mut v = vec![F::zero(); e.cols];
            v[free] = F::one();
            for (row, &p) in e.rows.iter().zip(&e.pivots) {
                if let Some(x) = entry(row, free) {
                    v[p] = -x;
                }
            }
            F::normalize_vector(&mut v);
            v
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solve<F> {
    Solution(Vec<F>),
    Inconsistent,
}

/// One solution of `M x = b` (free variables set to zero).
pub fn solve<F: EchelonField>(m: &Matrix<F>, b: &[F]) -> Solve<F> {
    assert_eq!(b.len(), m.rows(), "right-hand side length");
    let n = m.cols();
    let rows = (0..m.rows())
        .map(|r| {
            let mut row = m.sparse_row(r);
            if !b[r].is_zero() {
                row.push((n, b[r].clone()));
            }
            row
        })
        .collect();
    let e = F::echelon_of(rows, n + 1);
    if e.pivots.last() == Some(&n) {
        return Solve::Inconsistent;
    }
    let mut x = vec![F::zero(); n];
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        if let Some(v) = entry(row, n) {
            x[p] = v;
        }
    }
    Solve::Solution(x)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse<F: EchelonField>(m: &Matrix<F>) -> Option<Matrix<F>> {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return Some(Matrix::zeros(0, 0));
    }
    let rows = (0..n)
        .map(|r| {
            let mut row = m.sparse_row(r);
            row.push((n + r, F::one()));
            row
        })
        .collect();
    let e = F::echelon_of(rows, 2 * n);
    if e.rank() < n || e.pivots[n - 1] >= n {
        return None;
    }
    let data = e
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .filter(|(c, _)| *c >= n)
                .map(|(c, x)| (c - n, x.clone()))
                .collect()
        })
        .collect();
    Some(Matrix::from_sparse_rows(n, n, data))
}

pub fn determinant_nonzero<F: EchelonField>(m: &Matrix<F>) -> bool {
    m.is_square() && rank(m) == m.rows()
}

/// Sylvester inertia.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub null: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.pos as i64 - self.neg as i64
    }

    pub fn dim(&self) -> usize {
        self.pos + self.neg + self.null
    }

    pub fn is_positive_definite(&self) -> bool {
        self.neg == 0 && self.null == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.pos == 0 && self.null == 0
    }

    /// Definite with the given sign (+1 or -1). The empty form counts as
    /// definite of either sign.
    pub fn is_definite_of_sign(&self, sign: i32) -> bool {
        if sign > 0 {
            self.is_positive_definite()
        } else {
            self.is_negative_definite()
        }
    }
}

impl std::ops::Add for Inertia {
    type Output = Inertia;
    fn add(self, o: Inertia) -> Inertia {
        Inertia {
            pos: self.pos + o.pos,
            neg: self.neg + o.neg,
            null: self.null + o.null,
        }
    }
}

/// Splits the index set of a square matrix into connected blocks of its
/// nonzero pattern.
fn blocks<F: Scalar>(m: &Matrix<F>) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for r in 0..n {
        for (c, _) in m.sparse_row(r) {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..n {
        let root = find(&mut parent, k);
        groups.entry(root).or_default().push(k);
    }
    groups.into_values().collect()
}

/// Congruence diagonalization of a dense Hermitian block.
fn inertia_dense<F: Scalar>(mut a: Vec<Vec<F>>) -> Inertia {
    let mut out = Inertia::default();
    let mut active: Vec<usize> = (0..a.len()).collect();
    loop {
        if active.is_empty() {
            return out;
        }
        if let Some(pos) = active.iter().position(|&i| !a[i][i].is_zero()) {
            let i = active.remove(pos);
            let d = a[i][i].clone();
            if d.real_part().is_positive() {
                out.pos += 1;
            } else {
                out.neg += 1;
            }
            for &j in &active {
                if a[j][i].is_zero() {
                    continue;
                }
                let f = a[j][i].clone() / d.clone();
                for &k in &active {
                    if !a[i][k].is_zero() {
                        a[j][k] = a[j][k].clone() - f.clone() * a[i][k].clone();
                    }
                }
            }
            continue;
        }
        let pair = active.iter().enumerate().find_map(|(x, &i)| {
            active[x + 1..]
                .iter()
                .find(|&&j| !a[i][j].is_zero())
                .map(|&j| (i, j))
        });
        let Some((i, j)) = pair else {
            out.null += active.len();
            return out;
        };
        // hyperbolic block [[0, b], [conj b, 0]] contributes one of each sign
        out.pos += 1;
        out.neg += 1;
        active.retain(|&k| k != i && k != j);
        let b = a[i][j].clone();
        let inv_b = F::one() / b.clone();
        let inv_bc = F::one() / b.conj();
        for &r in &active {
            let (ri, rj) = (a[r][i].clone(), a[r][j].clone());
            if ri.is_zero() && rj.is_zero() {
                continue;
            }
            for &c in &active {
                let (ic, jc) = (a[i][c].clone(), a[j][c].clone());
                let delta = ri.clone() * inv_bc.clone() * jc + rj.clone() * inv_b.clone() * ic;
                if !delta.is_zero() {
                    a[r][c] = a[r][c].clone() - delta;
                }
            }
        }
    }
}

fn inertia_unchecked<F: Scalar>(m: &Matrix<F>) -> Inertia {
    blocks(m)
        .into_iter()
        .map(|idx| {
            if idx.len() == 1 {
                let x = m.get(idx[0], idx[0]);
                return match x.real_part() {
                    v if v.is_positive() => Inertia {
                        pos: 1,
                        neg: 0,
                        null: 0,
                    },
                    v if v.is_negative() => Inertia {
                        pos: 0,
                        neg: 1,
                        null: 0,
                    },
                    _ => Inertia {
                        pos: 0,
                        neg: 0,
                        null: 1,
                    },
                };
            }
            let local: BTreeMap<usize, usize> =
                idx.iter().enumerate().map(|(k, &g)| (g, k)).collect();
            let mut a = vec![vec![F::zero(); idx.len()]; idx.len()];
            for (k, &g) in idx.iter().enumerate() {
                for (c, x) in m.sparse_row(g) {
                    a[k][local[&c]] = x;
                }
            }
            inertia_dense(a)
        })
        .fold(Inertia::default(), |acc, x| acc + x)
}

/// Inertia of a symmetric rational form.
pub fn signature(s: &Matrix<Rational>) -> Result<Inertia> {
    if !s.is_square() || !s.entries_equal(&s.transpose()) {
        return Err(Error::NotSymmetric);
    }
    Ok(inertia_unchecked(s))
}

/// Inertia of a Hermitian form over Q(i).
pub fn hermitian_inertia(h: &Matrix<GaussRational>) -> Result<Inertia> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    Ok(inertia_unchecked(h))
}

/// Orthogonal direct sum of square matrices.
pub fn block_diagonal<F: Scalar>(parts: &[Matrix<F>]) -> Matrix<F> {
    let n: usize = parts.iter().map(|p| p.rows()).sum();
    let mut data = Vec::with_capacity(n);
    let mut offset = 0;
    for p in parts {
        assert!(p.is_square());
        for r in 0..p.rows() {
            data.push(
                p.sparse_row(r)
                    .into_iter()
                    .map(|(c, x)| (c + offset, x))
                    .collect(),
            );
        }
        offset += p.rows();
    }
    Matrix::from_sparse_rows(n, n, data)
}

pub fn to_gauss(m: &Matrix<Rational>) -> Matrix<GaussRational> {
    m.map(|x| GaussRational::real(x.clone()))
}

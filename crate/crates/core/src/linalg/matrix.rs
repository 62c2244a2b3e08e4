use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use serde_json::{json, Value};

use super::field::{parse_rational, Arith, Field, Qf, Scalar, Zp};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Entries {
    Fp(Vec<u32>),
    Q(Vec<BigRational>),
}

pub(crate) trait Storage: Arith {
    fn view<'a>(&self, e: &'a Entries) -> &'a [Self::E];
    fn view_mut<'a>(&self, e: &'a mut Entries) -> &'a mut Vec<Self::E>;
    fn wrap(&self, v: Vec<Self::E>) -> Entries;
}

impl Storage for Zp {
    fn view<'a>(&self, e: &'a Entries) -> &'a [u32] {
        match e {
            Entries::Fp(v) => v,
            Entries::Q(_) => panic!("field mismatch: expected F_{}", self.0),
        }
    }
    fn view_mut<'a>(&self, e: &'a mut Entries) -> &'a mut Vec<u32> {
        match e {
            Entries::Fp(v) => v,
            Entries::Q(_) => panic!("field mismatch: expected F_{}", self.0),
        }
    }
    fn wrap(&self, v: Vec<u32>) -> Entries {
        Entries::Fp(v)
    }
}

impl Storage for Qf {
    fn view<'a>(&self, e: &'a Entries) -> &'a [BigRational] {
        match e {
            Entries::Q(v) => v,
            Entries::Fp(_) => panic!("field mismatch: expected Q"),
        }
    }
    fn view_mut<'a>(&self, e: &'a mut Entries) -> &'a mut Vec<BigRational> {
        match e {
            Entries::Q(v) => v,
            Entries::Fp(_) => panic!("field mismatch: expected Q"),
        }
    }
    fn wrap(&self, v: Vec<BigRational>) -> Entries {
        Entries::Q(v)
    }
}

/// Runs `$body` with `$k` bound to the monomorphic arithmetic of `$field`.
macro_rules! arith {
    ($field:expr, |$k:ident| $body:expr) => {
        match $field {
            Field::Fp { p } => {
                let $k = Zp(p);
                $body
            }
            Field::Q => {
                let $k = Qf;
                $body
            }
        }
    };
}

/// Dense row-major matrix over a single exact field.
///
/// Shapes with a zero dimension are legal and stand for maps to or from the
/// zero space.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Entries,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}>{}x{} [", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

fn zero_vec<K: Storage>(k: &K, n: usize) -> Vec<K::E> {
    vec![k.zero(); n]
}

fn matmul<K: Storage>(
    k: &K,
    a: &[K::E],
    b: &[K::E],
    m: usize,
    n: usize,
    p: usize,
) -> Vec<K::E> {
    let mut out = zero_vec(k, m * p);
    for i in 0..m {
        for l in 0..n {
            let x = &a[i * n + l];
            if k.is_zero(x) {
                continue;
            }
            let neg = k.neg(x);
            for j in 0..p {
                let y = &b[l * p + j];
                if !k.is_zero(y) {
                    out[i * p + j] = k.sub_mul(&out[i * p + j], &neg, y);
                }
            }
        }
    }
    out
}

/// Gauss-Jordan elimination in place. Pivots are searched only among the
/// first `limit` columns, top to bottom, first nonzero entry wins. Returns
/// the pivot column of each pivot row.
fn rref<K: Storage>(k: &K, a: &mut [K::E], rows: usize, cols: usize, limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..limit.min(cols) {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !k.is_zero(&a[i * cols + c])) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = k.inv(&a[r * cols + c]);
        for j in c..cols {
            a[r * cols + j] = k.mul(&a[r * cols + j], &inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a[i * cols + c].clone();
            if k.is_zero(&factor) {
                continue;
            }
            for j in c..cols {
                let v = a[r * cols + j].clone();
                if !k.is_zero(&v) {
                    a[i * cols + j] = k.sub_mul(&a[i * cols + j], &factor, &v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        let entries = arith!(field, |k| k.wrap(zero_vec(&k, rows * cols)));
        Matrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from row-major scalars, checking field membership.
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims("Matrix::new", rows * cols, entries.len()));
        }
        if let Some(bad) = entries.iter().find(|s| !field.contains(s)) {
            return Err(Error::FieldMismatch(field.to_string(), bad.to_string()));
        }
        let entries = arith!(field, |k| k.wrap(entries.iter().map(|s| k.from_scalar(s)).collect()));
        Ok(Matrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    /// Integer entries reduced into `field`; row-major.
    pub fn from_i64(field: Field, rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols, "from_i64: wrong entry count");
        let s = values.iter().map(|&v| field.from_i64(v)).collect();
        Self::new(field, rows, cols, s).expect("reduced integers are field elements")
    }

    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::from_i64(field, r, c, &flat)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        assert!(r < self.rows && c < self.cols, "index out of range");
        arith!(self.field, |k| k.to_scalar(&k.view(&self.entries)[r * self.cols + c]))
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        assert!(self.field.contains(&v), "scalar {v} not in {}", self.field);
        let cols = self.cols;
        arith!(self.field, |k| {
            let e = k.from_scalar(&v);
            k.view_mut(&mut self.entries)[r * cols + c] = e;
        })
    }

    pub fn is_zero(&self) -> bool {
        arith!(self.field, |k| k.view(&self.entries).iter().all(|x| k.is_zero(x)))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.field, self.rows)
    }

    fn same_shape(&self, other: &Matrix, op: &str) {
        assert_eq!(self.field, other.field, "{op}: field mismatch");
        assert_eq!(self.shape(), other.shape(), "{op}: shape mismatch");
    }

    fn zip_with(&self, other: &Matrix, op: &str, add: bool) -> Matrix {
        self.same_shape(other, op);
        let entries = arith!(self.field, |k| {
            let a = k.view(&self.entries);
            let b = k.view(&other.entries);
            k.wrap(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| if add { k.add(x, y) } else { k.sub(x, y) })
                    .collect(),
            )
        });
        self.with_entries(entries)
    }

    fn with_entries(&self, entries: Entries) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn neg(&self) -> Matrix {
        let entries = arith!(self.field, |k| {
            k.wrap(k.view(&self.entries).iter().map(|x| k.neg(x)).collect())
        });
        self.with_entries(entries)
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let entries = arith!(self.field, |k| {
            let s = k.from_scalar(s);
            k.wrap(k.view(&self.entries).iter().map(|x| k.mul(x, &s)).collect())
        });
        self.with_entries(entries)
    }

    /// Matrix product `self * other`, or an error on inner-dimension mismatch.
    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        if self.cols != other.rows {
            return Err(Error::dims("matrix product", self.cols, other.rows));
        }
        let (m, n, p) = (self.rows, self.cols, other.cols);
        let entries = arith!(self.field, |k| {
            k.wrap(matmul(&k, k.view(&self.entries), k.view(&other.entries), m, n, p))
        });
        Ok(Matrix {
            field: self.field,
            rows: m,
            cols: p,
            entries,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let (r, c) = self.shape();
        let entries = arith!(self.field, |k| {
            let a = k.view(&self.entries);
            let mut out = Vec::with_capacity(r * c);
            for j in 0..c {
                for i in 0..r {
                    out.push(a[i * c + j].clone());
                }
            }
            k.wrap(out)
        });
        Matrix {
            field: self.field,
            rows: c,
            cols: r,
            entries,
        }
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert_eq!(self.field, block.field, "set_block: field mismatch");
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "set_block: block {}x{} at ({r0},{c0}) exceeds {}x{}",
            block.rows,
            block.cols,
            self.rows,
            self.cols
        );
        let cols = self.cols;
        arith!(self.field, |k| {
            let src = k.view(&block.entries).to_vec();
            let dst = k.view_mut(&mut self.entries);
            for i in 0..block.rows {
                for j in 0..block.cols {
                    dst[(r0 + i) * cols + c0 + j] = src[i * block.cols + j].clone();
                }
            }
        })
    }

    /// Sub-block of `nrows x ncols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nrows: usize, ncols: usize) -> Matrix {
        assert!(r0 + nrows <= self.rows && c0 + ncols <= self.cols, "block out of range");
        let cols = self.cols;
        let entries = arith!(self.field, |k| {
            let a = k.view(&self.entries);
            let mut out = Vec::with_capacity(nrows * ncols);
            for i in 0..nrows {
                out.extend_from_slice(&a[(r0 + i) * cols + c0..(r0 + i) * cols + c0 + ncols]);
            }
            k.wrap(out)
        });
        Matrix {
            field: self.field,
            rows: nrows,
            cols: ncols,
            entries,
        }
    }

    pub fn column(&self, j: usize) -> Matrix {
        self.block(0, j, self.rows, 1)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, idx.len());
        for (n, &j) in idx.iter().enumerate() {
            out.set_block(0, n, &self.column(j));
        }
        out
    }

    /// Horizontal concatenation; all parts need the same row count.
    pub fn hstack(field: Field, rows: usize, parts: &[&Matrix]) -> Matrix {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut c = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack: row mismatch");
            out.set_block(0, c, m);
            c += m.cols;
        }
        out
    }

    /// Vertical concatenation; all parts need the same column count.
    pub fn vstack(field: Field, cols: usize, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut r = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack: column mismatch");
            out.set_block(r, 0, m);
            r += m.rows;
        }
        out
    }

    pub fn block_diag(field: Field, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r, mut c) = (0, 0);
        for m in parts {
            out.set_block(r, c, m);
            r += m.rows;
            c += m.cols;
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.field, other.field, "kron: field mismatch");
        let (m, n, p, q) = (self.rows, self.cols, other.rows, other.cols);
        let entries = arith!(self.field, |k| {
            let (a, b) = (k.view(&self.entries), k.view(&other.entries));
            let mut out = zero_vec(&k, m * p * n * q);
            for i in 0..m {
                for j in 0..n {
                    let x = &a[i * n + j];
                    if k.is_zero(x) {
                        continue;
                    }
                    for r in 0..p {
                        for c in 0..q {
                            out[(i * p + r) * (n * q) + j * q + c] = k.mul(x, &b[r * q + c]);
                        }
                    }
                }
            }
            k.wrap(out)
        });
        Matrix {
            field: self.field,
            rows: m * p,
            cols: n * q,
            entries,
        }
    }

    /// Row reduction of `self` together with the transform that produced it.
    pub fn eliminate(&self) -> Elimination {
        let (m, n) = self.shape();
        let mut aug = Matrix::hstack(self.field, m, &[self, &Matrix::identity(self.field, m)]);
        let pivots = arith!(self.field, |k| {
            rref(&k, k.view_mut(&mut aug.entries), m, n + m, n)
        });
        Elimination {
            reduced: aug.block(0, 0, m, n),
            transform: aug.block(0, n, m, m),
            pivots,
        }
    }

    fn reduced_pivots(&self) -> (Matrix, Vec<usize>) {
        let mut r = self.clone();
        let (m, n) = self.shape();
        let pivots = arith!(self.field, |k| rref(&k, k.view_mut(&mut r.entries), m, n, n));
        (r, pivots)
    }

    pub fn rank(&self) -> usize {
        self.reduced_pivots().1.len()
    }

    /// Columns form a basis of the null space; free variables in increasing
    /// order, each set to one in turn.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.reduced_pivots();
        kernel_from_rref(&r, &pivots)
    }

    /// Some `x` with `self * x = b`, or `None` when inconsistent. Free
    /// variables are set to zero. `b` may carry several right-hand columns.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if b.rows != self.rows {
            return Err(Error::dims("solve", self.rows, b.rows));
        }
        if b.field != self.field {
            return Err(Error::FieldMismatch(self.field.to_string(), b.field.to_string()));
        }
        let (m, n, k) = (self.rows, self.cols, b.cols);
        let mut aug = Matrix::hstack(self.field, m, &[self, b]);
        let pivots = arith!(self.field, |ar| rref(&ar, ar.view_mut(&mut aug.entries), m, n + k, n));
        let rank = pivots.len();
        if !aug.block(rank, n, m - rank, k).is_zero() {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.field, n, k);
        for (row, &pc) in pivots.iter().enumerate() {
            x.set_block(pc, 0, &aug.block(row, n, 1, k));
        }
        Ok(Some(x))
    }

    /// Indices of the greedily chosen independent columns.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.reduced_pivots().1
    }

    /// A basis of the column space drawn from the columns themselves.
    pub fn column_basis(&self) -> Matrix {
        self.select_columns(&self.pivot_columns())
    }

    /// Columns of `v` that extend a basis of `span(u)` to one of `span(v)`,
    /// picked greedily in column order.
    pub fn complement_basis(u: &Matrix, v: &Matrix) -> Result<Matrix> {
        if u.rows != v.rows {
            return Err(Error::dims("complement_basis", v.rows, u.rows));
        }
        let both = Matrix::hstack(v.field, v.rows, &[v, u]);
        if both.rank() != v.rank() {
            return Err(Error::NotContained(
                "span(U) is not contained in span(V)".into(),
            ));
        }
        let joined = Matrix::hstack(v.field, v.rows, &[u, v]);
        let picks: Vec<usize> = joined
            .pivot_columns()
            .into_iter()
            .filter(|&c| c >= u.cols)
            .map(|c| c - u.cols)
            .collect();
        Ok(v.select_columns(&picks))
    }

    /// Standard basis vectors completing the column span of `self` to the
    /// whole space.
    pub fn complete_to_basis(&self) -> Matrix {
        let id = Matrix::identity(self.field, self.rows);
        let joined = Matrix::hstack(self.field, self.rows, &[self, &id]);
        let picks: Vec<usize> = joined
            .pivot_columns()
            .into_iter()
            .filter(|&c| c >= self.cols)
            .map(|c| c - self.cols)
            .collect();
        id.select_columns(&picks)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let e = self.eliminate();
        (e.rank() == self.rows).then_some(e.transform)
    }

    /// `L` with `L * self = I`, for matrices of full column rank.
    pub fn left_inverse(&self) -> Option<Matrix> {
        if self.rank() != self.cols {
            return None;
        }
        let t = self.complete_to_basis();
        let s = Matrix::hstack(self.field, self.rows, &[self, &t]);
        let inv = s.inverse()?;
        Some(inv.block(0, 0, self.cols, self.rows))
    }

    /// `R` with `self * R = I`, for matrices of full row rank.
    pub fn right_inverse(&self) -> Option<Matrix> {
        self.transpose().left_inverse().map(|l| l.transpose())
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = arith!(self.field, |k| {
            k.view(&self.entries)
                .iter()
                .map(|x| match k.to_scalar(x) {
                    Scalar::Fp(v) => json!(v),
                    s @ Scalar::Q(_) => json!(s.to_string()),
                })
                .collect()
        });
        json!({"rows": self.rows, "cols": self.cols, "entries": entries})
    }

    pub fn from_json(v: &Value, field: Field, location: &str) -> Result<Matrix> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::parse(location, "matrix must be an object"))?;
        let dim = |key: &str| -> Result<usize> {
            obj.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::parse(location, format!("missing or invalid `{key}`")))
        };
        let (rows, cols) = (dim("rows")?, dim("cols")?);
        let raw = obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(location, "missing `entries` array"))?;
        if raw.len() != rows * cols {
            return Err(Error::parse(
                location,
                format!("expected {} entries, found {}", rows * cols, raw.len()),
            ));
        }
        let mut scalars = Vec::with_capacity(raw.len());
        for (n, e) in raw.iter().enumerate() {
            let at = format!("{location}.entries[{n}]");
            let s = match field {
                Field::Fp { p } => {
                    let x = e
                        .as_u64()
                        .ok_or_else(|| Error::parse(&at, "expected a non-negative integer"))?;
                    if x >= p as u64 {
                        return Err(Error::parse(&at, format!("residue {x} not in [0,{p})")));
                    }
                    Scalar::Fp(x as u32)
                }
                Field::Q => {
                    let q = match e {
                        Value::String(s) => parse_rational(s),
                        Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(i.into())),
                        _ => None,
                    }
                    .ok_or_else(|| Error::parse(&at, "expected \"num/den\""))?;
                    Scalar::Q(q)
                }
            };
            scalars.push(s);
        }
        Matrix::new(field, rows, cols, scalars)
    }
}

fn kernel_from_rref(r: &Matrix, pivots: &[usize]) -> Matrix {
    let n = r.cols;
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Matrix::zeros(r.field, n, free.len());
    for (j, &f) in free.iter().enumerate() {
        out.set(f, j, r.field.one());
        for (row, &pc) in pivots.iter().enumerate() {
            let v = r.get(row, f);
            if !v.is_zero() {
                let neg = Matrix::new(r.field, 1, 1, vec![v]).unwrap().neg().get(0, 0);
                out.set(pc, j, neg);
            }
        }
    }
    out
}

/// Reduced row echelon form `R = T * A` with `T` invertible.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub reduced: Matrix,
    pub transform: Matrix,
    pub pivots: Vec<usize>,
}

impl Elimination {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Same contract as [`Matrix::solve`], reusing the stored reduction.
    pub fn solve(&self, b: &Matrix) -> Option<Matrix> {
        let c = &self.transform * b;
        let rank = self.rank();
        let (m, n) = self.reduced.shape();
        if !c.block(rank, 0, m - rank, c.cols).is_zero() {
            return None;
        }
        let mut x = Matrix::zeros(self.reduced.field, n, b.cols);
        for (row, &pc) in self.pivots.iter().enumerate() {
            x.set_block(pc, 0, &c.block(row, 0, 1, c.cols));
        }
        Some(x)
    }

    pub fn kernel_basis(&self) -> Matrix {
        kernel_from_rref(&self.reduced, &self.pivots)
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, "add", true)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, "sub", false)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix::neg(self)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(fp(5), 2).rank(), 2);
        assert_eq!(Matrix::zeros(Field::Q, 0, 3).rank(), 0);
        assert_eq!(Matrix::from_rows(Field::Q, &[vec![1, 2], vec![2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let k = Matrix::identity(fp(7), 3).kernel_basis();
        assert_eq!(k.shape(), (3, 0));
        let k = Matrix::zeros(Field::Q, 2, 2).kernel_basis();
        assert_eq!(k.rank(), 2);
        // Enumerating F_5^2 shows the null space of [1 1] is the line
        // through (1,4); our basis vector is (4,1) = 4 * (1,4).
        let a = Matrix::from_rows(fp(5), &[vec![1, 1]]);
        let null: Vec<(i64, i64)> = (0..5)
            .flat_map(|x| (0..5).map(move |y| (x, y)))
            .filter(|&(x, y)| (x + y) % 5 == 0 && (x, y) != (0, 0))
            .collect();
        let k = a.kernel_basis();
        assert_eq!(k.cols(), 1);
        let v = (scalar_i(&k.get(0, 0)), scalar_i(&k.get(1, 0)));
        assert!(null.contains(&v));
        assert!(null.contains(&(1, 4)));
        assert!((&a * &k).is_zero());
    }

    fn scalar_i(s: &Scalar) -> i64 {
        match s {
            Scalar::Fp(v) => *v as i64,
            Scalar::Q(_) => unreachable!(),
        }
    }

    #[test]
    fn solve_examples() {
        let id = Matrix::identity(Field::Q, 3);
        let b = Matrix::from_i64(Field::Q, 3, 1, &[4, -1, 7]);
        assert_eq!(id.solve(&b).unwrap(), Some(b.clone()));

        let a = Matrix::from_rows(Field::Q, &[vec![1, 2], vec![2, 4]]);
        let b = Matrix::from_i64(Field::Q, 2, 1, &[1, 3]);
        assert_eq!(a.solve(&b).unwrap(), None);

        // Exhaustive search over F_3^2 for x + y = 2: (2,0) is the first
        // solution with the free variable at zero.
        let a = Matrix::from_rows(fp(3), &[vec![1, 1]]);
        let b = Matrix::from_i64(fp(3), 1, 1, &[2]);
        let sols: Vec<(i64, i64)> = (0..3)
            .flat_map(|x| (0..3).map(move |y| (x, y)))
            .filter(|&(x, y)| (x + y) % 3 == 2)
            .collect();
        assert!(sols.contains(&(2, 0)));
        assert_eq!(
            a.solve(&b).unwrap(),
            Some(Matrix::from_i64(fp(3), 2, 1, &[2, 0]))
        );

        assert!(a.solve(&Matrix::zeros(fp(3), 2, 1)).is_err());
    }

    #[test]
    fn complement_examples() {
        let f = fp(2);
        let id = Matrix::identity(f, 2);
        let none = Matrix::zeros(f, 2, 0);
        assert_eq!(Matrix::complement_basis(&none, &id).unwrap(), id);
        assert_eq!(Matrix::complement_basis(&id, &id).unwrap().cols(), 0);
        let u = Matrix::from_i64(f, 2, 1, &[1, 0]);
        assert_eq!(
            Matrix::complement_basis(&u, &id).unwrap(),
            Matrix::from_i64(f, 2, 1, &[0, 1])
        );
        let v = Matrix::from_i64(f, 2, 1, &[0, 1]);
        assert!(matches!(
            Matrix::complement_basis(&u, &v),
            Err(Error::NotContained(_))
        ));
    }

    #[test]
    fn inverses() {
        let a = Matrix::from_rows(Field::Q, &[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        let k = Matrix::from_rows(fp(5), &[vec![1, 0], vec![2, 1], vec![3, 3]]);
        assert!((&k.left_inverse().unwrap() * &k).is_identity());
        let t = k.transpose();
        assert!((&t * &t.right_inverse().unwrap()).is_identity());
        assert!(Matrix::from_rows(Field::Q, &[vec![1, 2], vec![2, 4]])
            .inverse()
            .is_none());
    }

    #[test]
    fn elimination_reuse() {
        let a = Matrix::from_rows(fp(7), &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        let e = a.eliminate();
        assert_eq!(e.rank(), 2);
        assert!((&e.transform * &a) == e.reduced);
        let b = &a * &Matrix::from_i64(fp(7), 3, 1, &[1, 5, 2]);
        let x = e.solve(&b).unwrap();
        assert_eq!(&a * &x, b);
        assert!((&a * &e.kernel_basis()).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let a = Matrix::from_rows(Field::Q, &[vec![1, -2], vec![0, 3]]).scale(&Field::Q.from_i64(1));
        let v = a.to_json();
        assert_eq!(v["entries"][1], json!("-2/1"));
        assert_eq!(Matrix::from_json(&v, Field::Q, "m").unwrap(), a);
        let bad = json!({"rows": 1, "cols": 1, "entries": [5]});
        assert!(Matrix::from_json(&bad, fp(5), "m").is_err());
    }
}

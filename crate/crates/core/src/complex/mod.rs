//! Finite-support cochain complexes, graded maps between them, cohomology,
//! the model-structure predicates, and the constructions (direct sums,
//! shifts, pushouts, pullbacks, path objects) the factorizations are built
//! from.

mod cohomology;
mod limits;
mod map;
mod path;

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::report::Report;

pub use cohomology::{cohomology, induced_map, CohomologyData};
pub use limits::{pullback, pushout, Pullback, Pushout};
pub use map::{comp, ChainMap, GradedMap};
pub use path::{
    path_exact_sequence_report, path_map, path_object, path_triple, sdr_as_path_map,
    split_path_triple, PathObject,
};

/// A cochain complex with finitely many nonzero terms.
///
/// Terms live in degrees `lo..=hi`; everything outside the window is zero.
/// `d(i)` maps degree `i` to degree `i + 1`.
#[derive(Clone)]
pub struct Complex {
    field: Field,
    lo: i32,
    dims: Vec<usize>,
    diff: Vec<Matrix>,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Complex<{}>[", self.field)?;
        for i in self.degrees() {
            write!(f, "{}:{} ", i, self.dim(i))?;
        }
        write!(f, "]")
    }
}

impl Complex {
    /// Builds a complex from its window, dimensions and differentials.
    ///
    /// `diff[k]` is the differential out of degree `lo + k`; there must be
    /// exactly `dims.len() - 1` of them (none for an empty window). The
    /// identity `d∘d = 0` is not checked here; see [`validate_complex`].
    pub fn new(field: Field, lo: i32, dims: Vec<usize>, diff: Vec<Matrix>) -> Result<Self> {
        let expected = dims.len().saturating_sub(1);
        if diff.len() != expected {
            return Err(Error::dims("Complex::new differential count", expected, diff.len()));
        }
        for (k, d) in diff.iter().enumerate() {
            if d.field() != field {
                return Err(Error::FieldMismatch(field.to_string(), d.field().to_string()));
            }
            if d.shape() != (dims[k + 1], dims[k]) {
                return Err(Error::dims(
                    &format!("differential out of degree {}", lo + k as i32),
                    format!("{}x{}", dims[k + 1], dims[k]),
                    format!("{}x{}", d.rows(), d.cols()),
                ));
            }
        }
        Ok(Complex {
            field,
            lo,
            dims,
            diff,
        })
    }

    /// Builds a complex over `lo..=hi` from per-degree closures.
    pub fn from_fn(
        field: Field,
        lo: i32,
        hi: i32,
        dim: impl Fn(i32) -> usize,
        mut diff: impl FnMut(i32) -> Matrix,
    ) -> Result<Self> {
        if hi < lo {
            return Ok(Complex::zero(field));
        }
        let dims: Vec<usize> = (lo..=hi).map(&dim).collect();
        let diffs: Vec<Matrix> = (lo..hi).map(&mut diff).collect();
        Complex::new(field, lo, dims, diffs)
    }

    pub fn zero(field: Field) -> Self {
        Complex {
            field,
            lo: 0,
            dims: Vec::new(),
            diff: Vec::new(),
        }
    }

    /// One generator in degree `n`.
    pub fn sphere(field: Field, n: i32) -> Self {
        Complex::new(field, n, vec![1], vec![]).unwrap()
    }

    /// Generators in degrees `n - 1` and `n` with the identity between them.
    pub fn disk(field: Field, n: i32) -> Self {
        Complex::new(field, n - 1, vec![1, 1], vec![Matrix::identity(field, 1)]).unwrap()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn is_empty_window(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, i: i32) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.dims[(i - self.lo) as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Degrees carrying a nonzero term, as `(first, last)`.
    pub fn support(&self) -> Option<(i32, i32)> {
        let first = self.degrees().find(|&i| self.dim(i) > 0)?;
        let last = self.degrees().rev().find(|&i| self.dim(i) > 0)?;
        Some((first, last))
    }

    /// Differential out of degree `i`, of shape `dim(i+1) x dim(i)`.
    pub fn d(&self, i: i32) -> Cow<'_, Matrix> {
        if i >= self.lo && i < self.hi() {
            Cow::Borrowed(&self.diff[(i - self.lo) as usize])
        } else {
            Cow::Owned(Matrix::zeros(self.field, self.dim(i + 1), self.dim(i)))
        }
    }

    /// Smallest window covering the windows of both complexes.
    pub fn union_window(&self, other: &Complex) -> Option<(i32, i32)> {
        window_union([self.window(), other.window()])
    }

    pub(crate) fn window(&self) -> Option<(i32, i32)> {
        (!self.dims.is_empty()).then(|| (self.lo, self.hi()))
    }

    /// Same complex on the window `lo..=hi`, which must contain the support.
    pub fn with_window(&self, lo: i32, hi: i32) -> Result<Complex> {
        if let Some((a, b)) = self.support() {
            if a < lo || b > hi {
                return Err(Error::Precondition(format!(
                    "window {lo}..={hi} does not cover support {a}..={b}"
                )));
            }
        }
        Complex::from_fn(self.field, lo, hi, |i| self.dim(i), |i| self.d(i).into_owned())
    }

    /// Window trimmed to the support.
    pub fn trimmed(&self) -> Complex {
        match self.support() {
            Some((a, b)) => self.with_window(a, b).unwrap(),
            None => Complex::zero(self.field),
        }
    }

    pub fn into_arc(self) -> Arc<Complex> {
        Arc::new(self)
    }

    pub fn to_json(&self) -> Value {
        let mut dims = serde_json::Map::new();
        let mut diff = serde_json::Map::new();
        for i in self.degrees() {
            dims.insert(i.to_string(), json!(self.dim(i)));
            if i < self.hi() {
                diff.insert(i.to_string(), self.d(i).to_json());
            }
        }
        json!({
            "field": serde_json::to_value(self.field).unwrap(),
            "lo": self.lo,
            "hi": self.hi(),
            "dims": Value::Object(dims),
            "diff": Value::Object(diff),
        })
    }

    pub fn from_json(v: &Value, location: &str) -> Result<Complex> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::parse(location, "complex must be an object"))?;
        let field: Field = serde_json::from_value(
            obj.get("field")
                .cloned()
                .ok_or_else(|| Error::parse(location, "missing `field`"))?,
        )
        .map_err(|e| Error::parse(format!("{location}.field"), e.to_string()))?;
        if let Field::Fp { p } = field {
            Field::prime(p as u64)
                .map_err(|e| Error::parse(format!("{location}.field"), e.to_string()))?;
        }
        let int = |key: &str| -> Result<i32> {
            obj.get(key)
                .and_then(Value::as_i64)
                .map(|x| x as i32)
                .ok_or_else(|| Error::parse(location, format!("missing or invalid `{key}`")))
        };
        let (lo, hi) = (int("lo")?, int("hi")?);
        if lo > hi + 1 {
            return Err(Error::parse(location, "window needs lo <= hi + 1"));
        }
        let dims = parse_degree_map(obj.get("dims"), &format!("{location}.dims"))?;
        let mut dim_of = BTreeMap::new();
        for (i, val) in &dims {
            let n = val
                .as_u64()
                .ok_or_else(|| Error::parse(format!("{location}.dims.{i}"), "expected a count"))?;
            if (*i < lo || *i > hi) && n > 0 {
                return Err(Error::parse(
                    format!("{location}.dims.{i}"),
                    "nonzero dimension outside the window",
                ));
            }
            dim_of.insert(*i, n as usize);
        }
        let diffs = parse_degree_map(obj.get("diff"), &format!("{location}.diff"))?;
        let mut diff_of = BTreeMap::new();
        for (i, val) in &diffs {
            diff_of.insert(
                *i,
                Matrix::from_json(val, field, &format!("{location}.diff.{i}"))?,
            );
        }
        let dim = |i: i32| dim_of.get(&i).copied().unwrap_or(0);
        let mut out = Vec::new();
        for i in lo..hi {
            let m = match diff_of.remove(&i) {
                Some(m) => {
                    if m.shape() != (dim(i + 1), dim(i)) {
                        return Err(Error::parse(
                            format!("{location}.diff.{i}"),
                            format!(
                                "expected shape {}x{}, found {}x{}",
                                dim(i + 1),
                                dim(i),
                                m.rows(),
                                m.cols()
                            ),
                        ));
                    }
                    m
                }
                None => Matrix::zeros(field, dim(i + 1), dim(i)),
            };
            out.push(m);
        }
        if let Some((i, _)) = diff_of.into_iter().find(|(_, m)| m.rows() * m.cols() > 0) {
            return Err(Error::parse(
                format!("{location}.diff.{i}"),
                "differential outside the window",
            ));
        }
        let dims: Vec<usize> = if hi < lo { vec![] } else { (lo..=hi).map(dim).collect() };
        Complex::new(field, lo, dims, out)
    }
}

/// Two complexes are equal when they agree in every degree, whatever their
/// stored windows.
impl PartialEq for Complex {
    fn eq(&self, other: &Complex) -> bool {
        if self.field != other.field {
            return false;
        }
        let Some((lo, hi)) = self.union_window(other) else {
            return true;
        };
        (lo..=hi).all(|i| self.dim(i) == other.dim(i))
            && (lo..=hi).all(|i| *self.d(i) == *other.d(i))
    }
}

pub(crate) fn window_union(ws: impl IntoIterator<Item = Option<(i32, i32)>>) -> Option<(i32, i32)> {
    ws.into_iter()
        .flatten()
        .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
}

pub(crate) fn parse_degree_map(v: Option<&Value>, location: &str) -> Result<BTreeMap<i32, Value>> {
    let mut out = BTreeMap::new();
    let Some(v) = v else {
        return Ok(out);
    };
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse(location, "expected an object keyed by degree"))?;
    for (k, val) in obj {
        let i: i32 = k
            .parse()
            .map_err(|_| Error::parse(location, format!("bad degree key `{k}`")))?;
        out.insert(i, val.clone());
    }
    Ok(out)
}

/// Checks `d∘d = 0` in every degree.
pub fn validate_complex(x: &Complex) -> Report {
    let mut report = Report::new("complex");
    for i in x.degrees() {
        let dd = &*x.d(i + 1) * &*x.d(i);
        if !dd.is_zero() {
            report.check_with(format!("d^2=0@{i}"), false, format!("d_{} d_{} != 0", i + 1, i));
        }
    }
    if report.checks.is_empty() {
        report.check("d^2=0", true);
    }
    report
}

/// `X[n]` with `X[n]^i = X^(i+n)` and differential `(-1)^n d`.
pub fn shift(x: &Complex, n: i32) -> Complex {
    let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
    let f = x.field;
    Complex::from_fn(
        f,
        x.lo - n,
        x.hi() - n,
        |i| x.dim(i + n),
        |i| x.d(i + n).scale(&f.from_i64(sign)),
    )
    .unwrap()
}

/// Direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub sum: Arc<Complex>,
    pub inl: GradedMap,
    pub inr: GradedMap,
    pub pl: GradedMap,
    pub pr: GradedMap,
}

pub fn direct_sum(x: &Arc<Complex>, y: &Arc<Complex>) -> Result<DirectSum> {
    if x.field != y.field {
        return Err(Error::FieldMismatch(x.field.to_string(), y.field.to_string()));
    }
    let f = x.field;
    let (lo, hi) = x.union_window(y).unwrap_or((0, -1));
    let sum = Complex::from_fn(
        f,
        lo,
        hi,
        |i| x.dim(i) + y.dim(i),
        |i| Matrix::block_diag(f, &[&x.d(i), &y.d(i)]),
    )?
    .into_arc();
    let inl = GradedMap::from_fn(x, &sum, 0, |i| {
        Matrix::vstack(f, x.dim(i), &[&Matrix::identity(f, x.dim(i)), &Matrix::zeros(f, y.dim(i), x.dim(i))])
    })?;
    let inr = GradedMap::from_fn(y, &sum, 0, |i| {
        Matrix::vstack(f, y.dim(i), &[&Matrix::zeros(f, x.dim(i), y.dim(i)), &Matrix::identity(f, y.dim(i))])
    })?;
    let pl = GradedMap::from_fn(&sum, x, 0, |i| {
        Matrix::hstack(f, x.dim(i), &[&Matrix::identity(f, x.dim(i)), &Matrix::zeros(f, x.dim(i), y.dim(i))])
    })?;
    let pr = GradedMap::from_fn(&sum, y, 0, |i| {
        Matrix::hstack(f, y.dim(i), &[&Matrix::zeros(f, y.dim(i), x.dim(i)), &Matrix::identity(f, y.dim(i))])
    })?;
    Ok(DirectSum {
        sum,
        inl,
        inr,
        pl,
        pr,
    })
}

/// Direct sum of two graded maps of the same degree.
pub fn sum_map(
    f: &GradedMap,
    g: &GradedMap,
    src: &DirectSum,
    tgt: &DirectSum,
) -> Result<GradedMap> {
    if f.degree() != g.degree() {
        return Err(Error::Precondition("sum_map needs equal degrees".into()));
    }
    let n = f.degree();
    let field = src.sum.field;
    GradedMap::from_fn(&src.sum, &tgt.sum, n, |i| {
        Matrix::block_diag(field, &[&f.block(i), &g.block(i)])
    })
}

/// Whether `f` is degreewise surjective.
pub fn is_fibration(f: &ChainMap) -> bool {
    f.window()
        .map(|(lo, hi)| (lo..=hi).all(|i| f.block(i).rank() == f.tgt().dim(i + f.degree())))
        .unwrap_or(true)
}

/// Whether `f` is degreewise injective. Over a field with bounded
/// complexes this characterizes cofibrations.
pub fn is_cofibration(f: &ChainMap) -> bool {
    f.window()
        .map(|(lo, hi)| (lo..=hi).all(|i| f.block(i).rank() == f.src().dim(i)))
        .unwrap_or(true)
}

/// Whether `f` induces isomorphisms on all cohomology groups.
pub fn is_quasi_iso(f: &ChainMap) -> bool {
    induced_map(f)
        .values()
        .all(|m| m.is_square() && m.rank() == m.rows())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    #[test]
    fn disk_validates() {
        assert!(validate_complex(&Complex::disk(f5(), 1)).passed());
    }

    #[test]
    fn bad_square_fails_at_degree_zero() {
        let f = f5();
        let one = Matrix::identity(f, 1);
        let x = Complex::new(f, 0, vec![1, 1, 1], vec![one.clone(), one]).unwrap();
        let r = validate_complex(&x);
        assert!(!r.passed());
        assert_eq!(r.failures().next().unwrap().identity, "d^2=0@0");
    }

    #[test]
    fn shift_examples() {
        let d1 = Complex::disk(f5(), 1);
        assert_eq!(shift(&d1, 0), d1);
        let s = shift(&d1, -1);
        assert_eq!(s.support(), Some((1, 2)));
        assert_eq!(s.d(1).get(0, 0), f5().from_i64(-1));
        assert_eq!(shift(&shift(&d1, -1), 2), shift(&d1, 1));
    }

    #[test]
    fn window_independent_equality() {
        let s = Complex::sphere(Field::Q, 0);
        let wide = s.with_window(-2, 3).unwrap();
        assert_eq!(s, wide);
        assert_eq!(wide.trimmed().degrees(), 0..=0);
        assert!(s.with_window(1, 2).is_err());
    }

    #[test]
    fn predicates_on_basic_maps() {
        let f = f5();
        let d1 = Complex::disk(f, 1).into_arc();
        let zero = Complex::zero(f).into_arc();
        let s0 = Complex::sphere(f, 0).into_arc();

        let id = GradedMap::identity(&d1);
        assert!(is_fibration(&id) && is_cofibration(&id) && is_quasi_iso(&id));

        let to_zero = GradedMap::zero(&d1, &zero, 0);
        assert!(is_fibration(&to_zero));
        assert!(is_quasi_iso(&to_zero));
        assert!(!is_cofibration(&to_zero));

        let from_zero = GradedMap::zero(&zero, &s0, 0);
        assert!(is_cofibration(&from_zero));
        assert!(!is_quasi_iso(&from_zero));
    }

    #[test]
    fn direct_sum_dims_add() {
        let f = Field::Q;
        let x = Complex::disk(f, 1).into_arc();
        let y = Complex::sphere(f, 1).into_arc();
        let s = direct_sum(&x, &y).unwrap();
        assert_eq!(s.sum.dim(0), 1);
        assert_eq!(s.sum.dim(1), 2);
        assert!(s.inl.is_chain_map() && s.pr.is_chain_map());
        assert!((&s.pl * &s.inl).is_identity());
        let z = direct_sum(&x, &Complex::zero(f).into_arc()).unwrap();
        assert_eq!(*z.sum, *x);
    }

    #[test]
    fn complex_json_round_trip() {
        let x = Complex::disk(Field::Q, 0);
        let v = x.to_json();
        assert_eq!(Complex::from_json(&v, "x").unwrap(), x);
        let bad = json!({"field":{"kind":"fp","p":4},"lo":0,"hi":0,"dims":{"0":1},"diff":{}});
        assert!(Complex::from_json(&bad, "x").is_err());
    }
}

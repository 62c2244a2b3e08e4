use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde_json::{json, Value};

use super::{parse_degree_map, Complex};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};

/// A family of linear maps `X^i -> Y^(i+n)` for a fixed degree `n`.
///
/// Blocks are stored over the source window; outside it the source is zero
/// and so is the block.
#[derive(Clone)]
pub struct GradedMap {
    src: Arc<Complex>,
    tgt: Arc<Complex>,
    degree: i32,
    blocks: Vec<Matrix>,
}

/// A degree-zero graded map commuting with the differentials. Whether a
/// given value actually commutes is checked by [`GradedMap::is_chain_map`].
pub type ChainMap = GradedMap;

impl fmt::Debug for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedMap")
            .field("degree", &self.degree)
            .field("src", &self.src)
            .field("tgt", &self.tgt)
            .field("blocks", &self.blocks)
            .finish()
    }
}

pub(crate) fn same_complex(a: &Arc<Complex>, b: &Arc<Complex>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GradedMap {
    pub fn from_fn(
        src: &Arc<Complex>,
        tgt: &Arc<Complex>,
        degree: i32,
        mut block: impl FnMut(i32) -> Matrix,
    ) -> Result<Self> {
        let field = src.field();
        if tgt.field() != field {
            return Err(Error::FieldMismatch(field.to_string(), tgt.field().to_string()));
        }
        let mut blocks = Vec::with_capacity(src.degrees().count());
        for i in src.degrees() {
            let b = block(i);
            let want = (tgt.dim(i + degree), src.dim(i));
            if b.shape() != want || b.field() != field {
                return Err(Error::dims(
                    &format!("block at degree {i}"),
                    format!("{}x{}", want.0, want.1),
                    format!("{}x{}", b.rows(), b.cols()),
                ));
            }
            blocks.push(b);
        }
        Ok(GradedMap {
            src: src.clone(),
            tgt: tgt.clone(),
            degree,
            blocks,
        })
    }

    pub fn zero(src: &Arc<Complex>, tgt: &Arc<Complex>, degree: i32) -> Self {
        let f = src.field();
        Self::from_fn(src, tgt, degree, |i| {
            Matrix::zeros(f, tgt.dim(i + degree), src.dim(i))
        })
        .expect("zero blocks have matching shapes")
    }

    pub fn identity(x: &Arc<Complex>) -> Self {
        let f = x.field();
        Self::from_fn(x, x, 0, |i| Matrix::identity(f, x.dim(i))).unwrap()
    }

    /// The differential of `x` as a degree-one endomorphism.
    pub fn differential(x: &Arc<Complex>) -> Self {
        Self::from_fn(x, x, 1, |i| x.d(i).into_owned()).unwrap()
    }

    pub fn src(&self) -> &Arc<Complex> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<Complex> {
        &self.tgt
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn field(&self) -> Field {
        self.src.field()
    }

    pub(crate) fn window(&self) -> Option<(i32, i32)> {
        self.src.window()
    }

    /// Block out of source degree `i`.
    pub fn block(&self, i: i32) -> Matrix {
        if i >= self.src.lo() && i <= self.src.hi() {
            self.blocks[(i - self.src.lo()) as usize].clone()
        } else {
            Matrix::zeros(self.field(), self.tgt.dim(i + self.degree), self.src.dim(i))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.degree == 0
            && same_complex(&self.src, &self.tgt)
            && self.blocks.iter().all(Matrix::is_identity)
    }

    /// Same blocks, reinterpreted between complexes equal to the current ones.
    pub fn retarget(&self, src: &Arc<Complex>, tgt: &Arc<Complex>) -> Result<Self> {
        if !same_complex(&self.src, src) || !same_complex(&self.tgt, tgt) {
            return Err(Error::ComplexMismatch("retarget".into()));
        }
        Self::from_fn(src, tgt, self.degree, |i| self.block(i))
    }

    /// `self ∘ f`, or an error when the middle complexes disagree.
    pub fn try_compose(&self, f: &GradedMap) -> Result<GradedMap> {
        if !same_complex(&f.tgt, &self.src) {
            return Err(Error::ComplexMismatch(
                "composition: target of the right factor differs from source of the left".into(),
            ));
        }
        let deg = f.degree + self.degree;
        GradedMap::from_fn(&f.src, &self.tgt, deg, |i| {
            let inner = f.block(i);
            let outer = self.block(i + f.degree);
            &outer * &inner
        })
    }

    fn zip(&self, other: &GradedMap, add: bool) -> Result<GradedMap> {
        if self.degree != other.degree
            || !same_complex(&self.src, &other.src)
            || !same_complex(&self.tgt, &other.tgt)
        {
            return Err(Error::ComplexMismatch("sum of graded maps".into()));
        }
        GradedMap::from_fn(&self.src, &self.tgt, self.degree, |i| {
            let (a, b) = (self.block(i), other.block(i));
            if add {
                &a + &b
            } else {
                &a - &b
            }
        })
    }

    pub fn try_add(&self, other: &GradedMap) -> Result<GradedMap> {
        self.zip(other, true)
    }

    pub fn try_sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.zip(other, false)
    }

    pub fn scale(&self, s: &Scalar) -> GradedMap {
        GradedMap {
            blocks: self.blocks.iter().map(|b| b.scale(s)).collect(),
            ..self.clone()
        }
    }

    pub fn scale_i64(&self, s: i64) -> GradedMap {
        self.scale(&self.field().from_i64(s))
    }

    /// `d∘f - (-1)^n f∘d`: the differential of `f` in the hom complex.
    ///
    /// For degree 0 this is `d f - f d` (zero exactly for chain maps); for
    /// degree -1 it is `d h + h d`.
    pub fn d_commutator(&self) -> Result<GradedMap> {
        let d_tgt = GradedMap::differential(&self.tgt);
        let d_src = GradedMap::differential(&self.src);
        let left = d_tgt.try_compose(self)?;
        let right = self.try_compose(&d_src)?;
        match self.degree {
            0 => left.try_sub(&right),
            -1 => left.try_add(&right),
            n => Err(Error::UnsupportedDegree(n)),
        }
    }

    pub fn is_chain_map(&self) -> bool {
        self.degree == 0 && self.d_commutator().map(|m| m.is_zero()).unwrap_or(false)
    }

    pub fn to_json(&self) -> Value {
        let mut blocks = serde_json::Map::new();
        for i in self.src.degrees() {
            blocks.insert(i.to_string(), self.block(i).to_json());
        }
        json!({"degree": self.degree, "blocks": Value::Object(blocks)})
    }

    /// Parses a map whose source and target come from the surrounding file.
    pub fn from_json(
        v: &Value,
        src: &Arc<Complex>,
        tgt: &Arc<Complex>,
        location: &str,
    ) -> Result<GradedMap> {
        let degree = v
            .get("degree")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::parse(location, "missing or invalid `degree`"))?
            as i32;
        let raw = parse_degree_map(v.get("blocks"), &format!("{location}.blocks"))?;
        let field = src.field();
        let mut parsed = std::collections::BTreeMap::new();
        for (i, val) in raw {
            let at = format!("{location}.blocks.{i}");
            let m = Matrix::from_json(&val, field, &at)?;
            if m.shape() != (tgt.dim(i + degree), src.dim(i)) {
                return Err(Error::parse(
                    at,
                    format!(
                        "expected shape {}x{}, found {}x{}",
                        tgt.dim(i + degree),
                        src.dim(i),
                        m.rows(),
                        m.cols()
                    ),
                ));
            }
            parsed.insert(i, m);
        }
        GradedMap::from_fn(src, tgt, degree, |i| {
            parsed
                .remove(&i)
                .unwrap_or_else(|| Matrix::zeros(field, tgt.dim(i + degree), src.dim(i)))
        })
        .map_err(|e| Error::parse(location, e.to_string()))
    }
}

/// Equal degree, equal endpoints, equal blocks.
impl PartialEq for GradedMap {
    fn eq(&self, other: &GradedMap) -> bool {
        self.degree == other.degree
            && same_complex(&self.src, &other.src)
            && same_complex(&self.tgt, &other.tgt)
            && super::window_union([self.window(), other.window()])
                .map(|(lo, hi)| (lo..=hi).all(|i| self.block(i) == other.block(i)))
                .unwrap_or(true)
    }
}

/// Composite of a chain of maps written left to right as in `a∘b∘c`.
pub fn comp(maps: &[&GradedMap]) -> GradedMap {
    let (last, rest) = maps.split_last().expect("comp needs at least one map");
    rest.iter()
        .rev()
        .fold((*last).clone(), |acc, m| m.try_compose(&acc).unwrap_or_else(|e| panic!("{e}")))
}

impl Mul for &GradedMap {
    type Output = GradedMap;
    /// Composition `self ∘ rhs`; panics when the maps are not composable.
    fn mul(self, rhs: &GradedMap) -> GradedMap {
        self.try_compose(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &GradedMap {
    type Output = GradedMap;
    fn add(self, rhs: &GradedMap) -> GradedMap {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &GradedMap {
    type Output = GradedMap;
    fn sub(self, rhs: &GradedMap) -> GradedMap {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &GradedMap {
    type Output = GradedMap;
    fn neg(self) -> GradedMap {
        self.scale_i64(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Disk contraction homotopy: minus the inverse of d on D(1).
    fn disk_h(f: Field) -> (Arc<Complex>, GradedMap) {
        let n = Complex::disk(f, 1).into_arc();
        let h = GradedMap::from_fn(&n, &n, -1, |i| {
            if i == 1 {
                Matrix::from_i64(f, 1, 1, &[-1])
            } else {
                Matrix::zeros(f, n.dim(i - 1), n.dim(i))
            }
        })
        .unwrap();
        (n, h)
    }

    #[test]
    fn compose_identities() {
        let f = Field::prime(5).unwrap();
        let (n, h) = disk_h(f);
        let id = GradedMap::identity(&n);
        assert_eq!(&id * &h, h);
        let zero = GradedMap::zero(&n, &n, 0);
        assert!((&h * &zero).is_zero());
        let hh = &h * &h;
        assert_eq!(hh.degree(), -2);
        assert!(hh.is_zero());
    }

    #[test]
    fn d_commutator_examples() {
        let f = Field::Q;
        let (n, h) = disk_h(f);
        let dh = h.d_commutator().unwrap();
        assert_eq!(dh, -&GradedMap::identity(&n));
        assert!(GradedMap::identity(&n).d_commutator().unwrap().is_zero());
        assert!(GradedMap::zero(&n, &n, -1).d_commutator().unwrap().is_zero());
        assert!(matches!(
            GradedMap::zero(&n, &n, 2).d_commutator(),
            Err(Error::UnsupportedDegree(2))
        ));
    }

    #[test]
    fn compose_mismatch_is_an_error() {
        let f = Field::Q;
        let a = Complex::sphere(f, 0).into_arc();
        let b = Complex::sphere(f, 1).into_arc();
        let x = GradedMap::identity(&a);
        let y = GradedMap::identity(&b);
        assert!(matches!(x.try_compose(&y), Err(Error::ComplexMismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        let (n, h) = disk_h(Field::Q);
        let v = h.to_json();
        assert_eq!(GradedMap::from_json(&v, &n, &n, "h").unwrap(), h);
    }
}

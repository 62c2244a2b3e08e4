use std::sync::Arc;

use super::map::same_complex;
use super::{direct_sum, pullback, shift, ChainMap, Complex, DirectSum, GradedMap};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::report::Report;

/// `P(B)` with `P(B)^i = B^i ⊕ B^i ⊕ B^(i-1)` and
/// `δ(a, b, c) = (da, db, a - b - dc)`.
#[derive(Clone, Debug)]
pub struct PathObject {
    pub base: Arc<Complex>,
    pub object: Arc<Complex>,
    /// `b ↦ (b, b, 0)`.
    pub incl: ChainMap,
    /// `(a, b, c) ↦ (a, b)`, onto `sum.sum`.
    pub proj: ChainMap,
    /// `B ⊕ B`.
    pub sum: DirectSum,
}

pub fn path_object(b: &Arc<Complex>) -> PathObject {
    let f = b.field();
    let (lo, hi) = match b.window() {
        Some((lo, hi)) => (lo, hi + 1),
        None => (0, -1),
    };
    let dim = |i: i32| 2 * b.dim(i) + b.dim(i - 1);
    let object = Complex::from_fn(f, lo, hi, dim, |i| {
        let n = b.dim(i);
        let mut delta = Matrix::zeros(f, dim(i + 1), dim(i));
        delta.set_block(0, 0, &b.d(i));
        delta.set_block(b.dim(i + 1), n, &b.d(i));
        let row = 2 * b.dim(i + 1);
        delta.set_block(row, 0, &Matrix::identity(f, n));
        delta.set_block(row, n, &Matrix::identity(f, n).neg());
        delta.set_block(row, 2 * n, &b.d(i - 1).neg());
        delta
    })
    .expect("path object shapes are consistent")
    .into_arc();
    let sum = direct_sum(b, b).expect("same field");
    let incl = GradedMap::from_fn(b, &object, 0, |i| {
        let n = b.dim(i);
        let mut m = Matrix::zeros(f, dim(i), n);
        m.set_block(0, 0, &Matrix::identity(f, n));
        m.set_block(n, 0, &Matrix::identity(f, n));
        m
    })
    .unwrap();
    let proj = GradedMap::from_fn(&object, &sum.sum, 0, |i| {
        Matrix::identity(f, dim(i)).block(0, 0, 2 * b.dim(i), dim(i))
    })
    .unwrap();
    PathObject {
        base: b.clone(),
        object,
        incl,
        proj,
        sum,
    }
}

/// `P(f): P(B) -> P(B')`, acting as `f` on every slot.
pub fn path_map(f: &ChainMap, src: &PathObject, tgt: &PathObject) -> Result<ChainMap> {
    if !same_complex(f.src(), &src.base) || !same_complex(f.tgt(), &tgt.base) {
        return Err(Error::ComplexMismatch("path_map endpoints".into()));
    }
    let field = f.field();
    GradedMap::from_fn(&src.object, &tgt.object, 0, |i| {
        Matrix::block_diag(field, &[&f.block(i), &f.block(i), &f.block(i - 1)])
    })
}

/// The graded map `x ↦ (f x, g x, h x)` into `P(B)`. It is a chain map iff
/// `f` and `g` are and `f - g = dh + hd`.
pub fn path_triple(
    f: &GradedMap,
    g: &GradedMap,
    h: &GradedMap,
    target: &PathObject,
) -> Result<GradedMap> {
    if f.degree() != 0 || g.degree() != 0 || h.degree() != -1 {
        return Err(Error::Precondition("path_triple wants degrees (0, 0, -1)".into()));
    }
    for m in [f, g, h] {
        if !same_complex(m.tgt(), &target.base) || !same_complex(m.src(), f.src()) {
            return Err(Error::ComplexMismatch("path_triple components".into()));
        }
    }
    let x = f.src().clone();
    let field = x.field();
    GradedMap::from_fn(&x, &target.object, 0, |i| {
        Matrix::vstack(field, x.dim(i), &[&f.block(i), &g.block(i), &h.block(i)])
    })
}

/// Inverse of [`path_triple`]: the three components of a map into `P(B)`.
pub fn split_path_triple(
    psi: &GradedMap,
    target: &PathObject,
) -> Result<(GradedMap, GradedMap, GradedMap)> {
    if psi.degree() != 0 || !same_complex(psi.tgt(), &target.object) {
        return Err(Error::ComplexMismatch("split_path_triple target".into()));
    }
    let (x, b) = (psi.src().clone(), target.base.clone());
    let comp = |offset: fn(&Complex, i32) -> usize, deg: i32| {
        GradedMap::from_fn(&x, &b, deg, |i| {
            let blk = psi.block(i);
            blk.block(offset(&b, i), 0, b.dim(i + deg), x.dim(i))
        })
    };
    Ok((
        comp(|_, _| 0, 0)?,
        comp(|b, i| b.dim(i), 0)?,
        comp(|b, i| 2 * b.dim(i), -1)?,
    ))
}

/// `x ↦ (ιπ x, x, h x)`; a chain map exactly when C1 holds.
pub fn sdr_as_path_map(
    iota: &ChainMap,
    pi: &ChainMap,
    h: &GradedMap,
    target: &PathObject,
) -> Result<GradedMap> {
    let ip = iota.try_compose(pi)?;
    path_triple(&ip, &GradedMap::identity(&target.base), h, target)
}

/// Checks that for a degreewise surjection `q: Q -> N` with kernel `C`,
/// `0 -> C[-1] -> P(Q) -> (Q ⊕ Q) ×_(N ⊕ N) P(N) -> 0` is exact in
/// every degree.
pub fn path_exact_sequence_report(q: &ChainMap) -> Result<Report> {
    let mut report = Report::new("path exact sequence");
    let (qc, nc) = (q.src().clone(), q.tgt().clone());
    let field = qc.field();
    let pq = path_object(&qc);
    let pn = path_object(&nc);
    let q2 = super::sum_map(q, q, &pq.sum, &pn.sum)?;
    let pb = pullback(&pn.proj, &q2)?;
    let right = pb.mediate(&path_map(q, &pq, &pn)?, &pq.proj)?;

    let (lo, hi) = super::window_union([qc.window(), nc.window()]).unwrap_or((0, -1));
    let mut kernels = Vec::new();
    for i in lo..=hi {
        kernels.push(q.block(i).kernel_basis());
    }
    let kernel = |i: i32| -> Matrix {
        if i < lo || i > hi {
            Matrix::zeros(field, qc.dim(i), 0)
        } else {
            kernels[(i - lo) as usize].clone()
        }
    };
    let kc = Complex::from_fn(
        field,
        lo,
        hi,
        |i| kernel(i).cols(),
        |i| {
            let img = &*qc.d(i) * &kernel(i);
            kernel(i + 1)
                .solve(&img)
                .expect("shapes agree")
                .expect("the kernel of a chain map is a subcomplex")
        },
    )?;
    let c_shift = shift(&kc, -1).into_arc();
    let left = GradedMap::from_fn(&c_shift, &pq.object, 0, |i| {
        let n = qc.dim(i);
        let mut m = Matrix::zeros(field, pq.object.dim(i), c_shift.dim(i));
        m.set_block(2 * n, 0, &kernel(i - 1));
        m
    })?;

    report.check("q surjective", super::is_fibration(q));
    report.check("left chain map", left.is_chain_map());
    report.check("right chain map", right.is_chain_map());
    report.check("composite zero", (&right * &left).is_zero());
    let mut injective = true;
    let mut surjective = true;
    let mut counts = true;
    for i in lo..=hi + 1 {
        injective &= left.block(i).rank() == c_shift.dim(i);
        surjective &= right.block(i).rank() == pb.object.dim(i);
        counts &= pq.object.dim(i) == c_shift.dim(i) + pb.object.dim(i);
    }
    report.check("left injective", injective);
    report.check("right surjective", surjective);
    report.check("dimension count", counts);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cohomology, is_fibration, is_quasi_iso, validate_complex};
    use crate::linalg::Field;

    #[test]
    fn path_of_zero_is_zero() {
        let z = Complex::zero(Field::Q).into_arc();
        assert!(path_object(&z).object.is_zero());
    }

    #[test]
    fn path_of_sphere() {
        let f = Field::prime(5).unwrap();
        let s = Complex::sphere(f, 0).into_arc();
        let p = path_object(&s);
        assert_eq!(p.object.dim(0), 2);
        assert_eq!(p.object.dim(1), 1);
        assert_eq!(*p.object.d(0), Matrix::from_rows(f, &[vec![1, 4]]));
        assert!(validate_complex(&p.object).passed());
        let (hp, hs) = (cohomology(&p.object), cohomology(&s));
        for i in -1..=2 {
            assert_eq!(hp.dim(i), hs.dim(i));
        }
        assert!(is_quasi_iso(&p.incl));
    }

    #[test]
    fn projection_surjective_on_disk() {
        let f = Field::Q;
        let d = Complex::disk(f, 1).into_arc();
        let p = path_object(&d);
        assert!(validate_complex(&p.object).passed());
        assert!(is_fibration(&p.proj));
        assert!(p.proj.is_chain_map() && p.incl.is_chain_map());
    }

    #[test]
    fn sdr_path_map_detects_c1() {
        let f = Field::prime(3).unwrap();
        let n = Complex::disk(f, 1).into_arc();
        let m = Complex::zero(f).into_arc();
        let iota = GradedMap::zero(&m, &n, 0);
        let pi = GradedMap::zero(&n, &m, 0);
        let p = path_object(&n);
        let good = GradedMap::from_fn(&n, &n, -1, |i| {
            if i == 1 {
                Matrix::from_i64(f, 1, 1, &[-1])
            } else {
                Matrix::zeros(f, n.dim(i - 1), n.dim(i))
            }
        })
        .unwrap();
        assert!(sdr_as_path_map(&iota, &pi, &good, &p).unwrap().is_chain_map());
        let bad = good.scale_i64(-1);
        assert!(!sdr_as_path_map(&iota, &pi, &bad, &p).unwrap().is_chain_map());
        let (a, b, c) = split_path_triple(&sdr_as_path_map(&iota, &pi, &good, &p).unwrap(), &p).unwrap();
        assert!(a.is_zero() && b.is_identity() && c == good);
    }

    #[test]
    fn exact_sequence_for_disk_onto_zero() {
        let f = Field::prime(5).unwrap();
        let d = Complex::disk(f, 0).into_arc();
        let z = Complex::zero(f).into_arc();
        let r = path_exact_sequence_report(&GradedMap::zero(&d, &z, 0)).unwrap();
        assert!(r.passed(), "{r}");
        let id = GradedMap::identity(&d);
        assert!(path_exact_sequence_report(&id).unwrap().passed());
    }
}

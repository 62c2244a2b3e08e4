use std::sync::Arc;

use super::map::same_complex;
use super::{window_union, ChainMap, Complex, GradedMap};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Pushout `P ⊔_A B` of `P <- A -> B`, computed degreewise as the cokernel
/// of `(g, -i): A -> P ⊕ B`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub object: Arc<Complex>,
    /// Leg out of `B` (the pushout of `g`).
    pub from_b: ChainMap,
    /// Leg out of `P` (the pushout of `i`).
    pub from_p: ChainMap,
    p: Arc<Complex>,
    b: Arc<Complex>,
    g: ChainMap,
    i: ChainMap,
    /// Per degree: standard basis vectors of `P ⊕ B` spanning a complement
    /// of the image; the pushout coordinates are coordinates along these.
    complements: Vec<(i32, Matrix)>,
}

impl Pushout {
    fn complement(&self, k: i32) -> Matrix {
        self.complements
            .iter()
            .find(|(d, _)| *d == k)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| {
                Matrix::zeros(self.object.field(), self.p.dim(k) + self.b.dim(k), 0)
            })
    }

    /// The unique map `m` out of the pushout with `m∘from_p = u` and
    /// `m∘from_b = v`. Works for graded maps of any common degree.
    pub fn mediate(&self, u: &GradedMap, v: &GradedMap) -> Result<GradedMap> {
        if u.degree() != v.degree() || !same_complex(u.tgt(), v.tgt()) {
            return Err(Error::Precondition("cone legs must share degree and target".into()));
        }
        if !same_complex(u.src(), &self.p) || !same_complex(v.src(), &self.b) {
            return Err(Error::ComplexMismatch("pushout cone".into()));
        }
        if &(u * &self.g) != &(v * &self.i) {
            return Err(Error::Precondition("cone does not commute: u∘g != v∘i".into()));
        }
        let n = u.degree();
        let z = u.tgt().clone();
        let f = z.field();
        GradedMap::from_fn(&self.object, &z, n, |k| {
            let uv = Matrix::hstack(f, z.dim(k + n), &[&u.block(k), &v.block(k)]);
            &uv * &self.complement(k)
        })
    }
}

/// Pushout of `g: A -> P` along `i: A -> B`.
pub fn pushout(g: &ChainMap, i: &ChainMap) -> Result<Pushout> {
    if !same_complex(g.src(), i.src()) {
        return Err(Error::ComplexMismatch("pushout legs need a common source".into()));
    }
    let (p, b, a) = (g.tgt().clone(), i.tgt().clone(), g.src().clone());
    let f = a.field();
    let (lo, hi) = window_union([p.window(), b.window()]).unwrap_or((0, -1));
    let mut complements = Vec::new();
    let mut quotients = Vec::new();
    for k in lo..=hi {
        let n = p.dim(k) + b.dim(k);
        let image = Matrix::vstack(f, a.dim(k), &[&g.block(k), &i.block(k).neg()]).column_basis();
        let t = image.complete_to_basis();
        let s = Matrix::hstack(f, n, &[&image, &t]);
        let inv = s.inverse().expect("image plus completion is a basis");
        quotients.push(inv.block(image.cols(), 0, t.cols(), n));
        complements.push((k, t));
    }
    let quotient = |k: i32| -> Matrix {
        if k < lo || k > hi {
            Matrix::zeros(f, 0, p.dim(k) + b.dim(k))
        } else {
            quotients[(k - lo) as usize].clone()
        }
    };
    let comp = |k: i32| -> Matrix {
        complements
            .iter()
            .find(|(d, _)| *d == k)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| Matrix::zeros(f, p.dim(k) + b.dim(k), 0))
    };
    let object = Complex::from_fn(
        f,
        lo,
        hi,
        |k| comp(k).cols(),
        |k| {
            let d = Matrix::block_diag(f, &[&p.d(k), &b.d(k)]);
            &(&quotient(k + 1) * &d) * &comp(k)
        },
    )?
    .into_arc();
    let from_p = GradedMap::from_fn(&p, &object, 0, |k| {
        let q = quotient(k);
        q.block(0, 0, q.rows(), p.dim(k))
    })?;
    let from_b = GradedMap::from_fn(&b, &object, 0, |k| {
        let q = quotient(k);
        q.block(0, p.dim(k), q.rows(), b.dim(k))
    })?;
    Ok(Pushout {
        object,
        from_b,
        from_p,
        p,
        b,
        g: g.clone(),
        i: i.clone(),
        complements,
    })
}

/// Pullback `N ×_M P` of `N -> M <- P`, computed degreewise as the kernel
/// of `(p, -h): N ⊕ P -> M`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub object: Arc<Complex>,
    /// Leg into `P` (the pullback of `p`).
    pub to_p: ChainMap,
    /// Leg into `N` (the pullback of `h`).
    pub to_n: ChainMap,
    n: Arc<Complex>,
    p: Arc<Complex>,
    pm: ChainMap,
    hm: ChainMap,
    /// Per degree: a left inverse of the kernel basis.
    left_inverses: Vec<(i32, Matrix)>,
}

impl Pullback {
    fn left_inverse(&self, k: i32) -> Matrix {
        self.left_inverses
            .iter()
            .find(|(d, _)| *d == k)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| Matrix::zeros(self.object.field(), 0, self.n.dim(k) + self.p.dim(k)))
    }

    /// The unique map `m` into the pullback with `to_n∘m = a` and
    /// `to_p∘m = b`. Works for graded maps of any common degree.
    pub fn mediate(&self, a: &GradedMap, b: &GradedMap) -> Result<GradedMap> {
        if a.degree() != b.degree() || !same_complex(a.src(), b.src()) {
            return Err(Error::Precondition("cone legs must share degree and source".into()));
        }
        if !same_complex(a.tgt(), &self.n) || !same_complex(b.tgt(), &self.p) {
            return Err(Error::ComplexMismatch("pullback cone".into()));
        }
        if &(&self.pm * a) != &(&self.hm * b) {
            return Err(Error::Precondition("cone does not commute: p∘a != h∘b".into()));
        }
        let n = a.degree();
        let z = a.src().clone();
        let f = z.field();
        GradedMap::from_fn(&z, &self.object, n, |k| {
            let ab = Matrix::vstack(f, z.dim(k), &[&a.block(k), &b.block(k)]);
            &self.left_inverse(k + n) * &ab
        })
    }
}

/// Pullback of `p: N -> M` along `h: P -> M`.
pub fn pullback(p: &ChainMap, h: &ChainMap) -> Result<Pullback> {
    if !same_complex(p.tgt(), h.tgt()) {
        return Err(Error::ComplexMismatch("pullback legs need a common target".into()));
    }
    let (n, pc) = (p.src().clone(), h.src().clone());
    let f = n.field();
    let (lo, hi) = window_union([n.window(), pc.window()]).unwrap_or((0, -1));
    let mut kernels = Vec::new();
    let mut left_inverses = Vec::new();
    for k in lo..=hi {
        let m = p.tgt().dim(k);
        let map = Matrix::hstack(f, m, &[&p.block(k), &h.block(k).neg()]);
        let kb = map.kernel_basis();
        left_inverses.push((k, kb.left_inverse().expect("kernel basis has full rank")));
        kernels.push(kb);
    }
    let kernel = |k: i32| -> Matrix {
        if k < lo || k > hi {
            Matrix::zeros(f, n.dim(k) + pc.dim(k), 0)
        } else {
            kernels[(k - lo) as usize].clone()
        }
    };
    let linv = |k: i32| -> Matrix {
        if k < lo || k > hi {
            Matrix::zeros(f, 0, n.dim(k) + pc.dim(k))
        } else {
            left_inverses[(k - lo) as usize].1.clone()
        }
    };
    let object = Complex::from_fn(
        f,
        lo,
        hi,
        |k| kernel(k).cols(),
        |k| {
            let d = Matrix::block_diag(f, &[&n.d(k), &pc.d(k)]);
            &(&linv(k + 1) * &d) * &kernel(k)
        },
    )?
    .into_arc();
    let to_n = GradedMap::from_fn(&object, &n, 0, |k| {
        let kb = kernel(k);
        kb.block(0, 0, n.dim(k), kb.cols())
    })?;
    let to_p = GradedMap::from_fn(&object, &pc, 0, |k| {
        let kb = kernel(k);
        kb.block(n.dim(k), 0, pc.dim(k), kb.cols())
    })?;
    Ok(Pullback {
        object,
        to_p,
        to_n,
        n,
        p: pc,
        pm: p.clone(),
        hm: h.clone(),
        left_inverses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cohomology, direct_sum, is_cofibration, is_fibration, is_quasi_iso, validate_complex};
    use crate::linalg::Field;

    #[test]
    fn pushout_along_zero_is_direct_sum() {
        let f = Field::prime(5).unwrap();
        let a = Complex::zero(f).into_arc();
        let p = Complex::disk(f, 1).into_arc();
        let b = Complex::sphere(f, 0).into_arc();
        let po = pushout(&GradedMap::zero(&a, &p, 0), &GradedMap::zero(&a, &b, 0)).unwrap();
        let sum = direct_sum(&p, &b).unwrap();
        assert_eq!(*po.object, *sum.sum);
        assert!(validate_complex(&po.object).passed());
    }

    #[test]
    fn pushout_of_identities() {
        let f = Field::Q;
        let a = Complex::disk(f, 0).into_arc();
        let id = GradedMap::identity(&a);
        let po = pushout(&id, &id).unwrap();
        assert_eq!(po.object.total_dim(), a.total_dim());
        assert!(po.from_b.is_chain_map() && is_quasi_iso(&po.from_b));
        assert!(is_cofibration(&po.from_b) && is_fibration(&po.from_b));
        let m = po.mediate(&id, &id).unwrap();
        assert!((&m * &po.from_p).is_identity());
    }

    #[test]
    fn pullback_over_zero_is_product() {
        let f = Field::Q;
        let m = Complex::zero(f).into_arc();
        let n = Complex::disk(f, 2).into_arc();
        let p = Complex::sphere(f, 0).into_arc();
        let pb = pullback(&GradedMap::zero(&n, &m, 0), &GradedMap::zero(&p, &m, 0)).unwrap();
        assert_eq!(pb.object.total_dim(), 3);
        assert_eq!(cohomology(&pb.object).dim(0), 1);
        assert!(pb.to_n.is_chain_map() && pb.to_p.is_chain_map());
        assert!(is_fibration(&pb.to_n) && is_fibration(&pb.to_p));
    }

    #[test]
    fn pullback_of_identities_is_diagonal() {
        let f = Field::prime(3).unwrap();
        let n = Complex::disk(f, 1).into_arc();
        let id = GradedMap::identity(&n);
        let pb = pullback(&id, &id).unwrap();
        assert_eq!(pb.object.total_dim(), n.total_dim());
        let m = pb.mediate(&id, &id).unwrap();
        assert!((&pb.to_n * &m).is_identity());
        assert!(pb.mediate(&id, &GradedMap::zero(&n, &n, 0)).is_err());
    }
}

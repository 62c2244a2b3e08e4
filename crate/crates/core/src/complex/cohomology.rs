use std::collections::BTreeMap;

use super::{window_union, Complex, GradedMap};
use crate::linalg::{Elimination, Matrix};

/// Cohomology of a complex with explicit representatives.
///
/// In each degree the representatives are the kernel-basis cocycles not
/// already spanned by coboundaries, picked greedily in elimination order.
#[derive(Clone, Debug)]
pub struct CohomologyData {
    degrees: BTreeMap<i32, DegreeData>,
}

#[derive(Clone, Debug)]
struct DegreeData {
    reps: Matrix,
    boundaries: Matrix,
    /// Reduction of `[reps | boundaries]`, used to read off classes.
    elim: Elimination,
}

impl CohomologyData {
    pub fn dim(&self, i: i32) -> usize {
        self.degrees.get(&i).map_or(0, |d| d.reps.cols())
    }

    /// Cocycle representatives of a basis of `H^i`, as columns.
    pub fn representatives(&self, i: i32) -> Option<&Matrix> {
        self.degrees.get(&i).map(|d| &d.reps)
    }

    /// Basis of the coboundaries `B^i`, as columns.
    pub fn boundaries(&self, i: i32) -> Option<&Matrix> {
        self.degrees.get(&i).map(|d| &d.boundaries)
    }

    /// Coordinates of the classes of the cocycle columns `z` in the
    /// representative basis. Returns `None` if some column is not a cocycle.
    pub fn class_of(&self, i: i32, z: &Matrix) -> Option<Matrix> {
        let Some(d) = self.degrees.get(&i) else {
            return Some(Matrix::zeros(z.field(), 0, z.cols()));
        };
        let coords = d.elim.solve(z)?;
        Some(coords.block(0, 0, d.reps.cols(), z.cols()))
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.degrees.iter().map(|(i, d)| (*i, d.reps.cols())).collect()
    }
}

pub fn cohomology(x: &Complex) -> CohomologyData {
    let mut degrees = BTreeMap::new();
    let f = x.field();
    if let Some((lo, hi)) = x.window() {
        for i in lo..=hi {
            let cycles = x.d(i).kernel_basis();
            let boundaries = x.d(i - 1).column_basis();
            let reps = Matrix::complement_basis(&boundaries, &cycles)
                .expect("coboundaries are cocycles in a valid complex");
            let joined = Matrix::hstack(f, x.dim(i), &[&reps, &boundaries]);
            degrees.insert(
                i,
                DegreeData {
                    elim: joined.eliminate(),
                    reps,
                    boundaries,
                },
            );
        }
    }
    CohomologyData { degrees }
}

/// Matrices of `H(f)` in the representative bases, one per degree of the
/// union window of source and target.
pub fn induced_map(f: &GradedMap) -> BTreeMap<i32, Matrix> {
    let hs = cohomology(f.src());
    let ht = cohomology(f.tgt());
    induced_with(f, &hs, &ht)
}

pub(crate) fn induced_with(
    f: &GradedMap,
    hs: &CohomologyData,
    ht: &CohomologyData,
) -> BTreeMap<i32, Matrix> {
    let field = f.field();
    let mut out = BTreeMap::new();
    if let Some((lo, hi)) = window_union([f.src().window(), f.tgt().window()]) {
        for i in lo..=hi {
            let src_reps = hs
                .representatives(i)
                .cloned()
                .unwrap_or_else(|| Matrix::zeros(field, f.src().dim(i), 0));
            let images = &f.block(i) * &src_reps;
            let m = ht
                .class_of(i + f.degree(), &images)
                .expect("chain maps send cocycles to cocycles");
            out.insert(i, m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{direct_sum, is_quasi_iso};
    use crate::linalg::Field;

    #[test]
    fn spheres_and_disks() {
        let f = Field::Q;
        let s = cohomology(&Complex::sphere(f, 0));
        assert_eq!(s.dim(0), 1);
        let d = cohomology(&Complex::disk(f, 1));
        assert!(d.dims().values().all(|&n| n == 0));
    }

    #[test]
    fn small_example_over_f2() {
        // Enumerating F_2^2: cocycles in degree 0 are ker [1 0] = {(0,0),(0,1)};
        // no coboundaries, so H^0 has dimension one. Degree 1 is all
        // coboundary since [1 0] is onto.
        let f = Field::prime(2).unwrap();
        let x = Complex::new(f, 0, vec![2, 1], vec![Matrix::from_rows(f, &[vec![1, 0]])]).unwrap();
        let h = cohomology(&x);
        assert_eq!(h.dim(0), 1);
        assert_eq!(h.dim(1), 0);
        assert_eq!(h.representatives(0).unwrap(), &Matrix::from_i64(f, 2, 1, &[0, 1]));
    }

    #[test]
    fn induced_examples() {
        let f = Field::prime(5).unwrap();
        let x = std::sync::Arc::new(
            Complex::new(f, 0, vec![2, 1], vec![Matrix::from_rows(f, &[vec![1, 0]])]).unwrap(),
        );
        let id = GradedMap::identity(&x);
        for m in induced_map(&id).values() {
            assert!(m.is_identity());
        }
        let disk = Complex::disk(f, 1).into_arc();
        let into_acyclic = GradedMap::zero(&x, &disk, 0);
        assert!(induced_map(&into_acyclic).values().all(Matrix::is_zero));
        assert!(!is_quasi_iso(&into_acyclic));
    }

    #[test]
    fn direct_sum_cohomology_adds() {
        let f = Field::Q;
        let x = Complex::sphere(f, 1).into_arc();
        let y = Complex::new(f, 0, vec![2, 1], vec![Matrix::from_rows(f, &[vec![1, 1]])])
            .unwrap()
            .into_arc();
        let s = direct_sum(&x, &y).unwrap();
        let (hx, hy, hs) = (cohomology(&x), cohomology(&y), cohomology(&s.sum));
        for i in -1..=2 {
            assert_eq!(hs.dim(i), hx.dim(i) + hy.dim(i));
        }
    }
}

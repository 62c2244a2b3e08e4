//! Exact scalar arithmetic over `F_p` and `Q`, and the dense matrix kernel
//! every other module solves its linear problems with.
//!
//! Elimination uses a fixed pivot rule (first nonzero entry, top to bottom,
//! left to right), so every result here is reproducible bit for bit.

mod field;
mod matrix;
mod system;

pub use field::{Field, Scalar};
pub use matrix::{Elimination, Matrix};
pub use system::{LinearSystem, SolutionSpace};

/// Rank of `a` over its field.
pub fn rank(a: &Matrix) -> usize {
    a.rank()
}

/// Basis of `{v : a v = 0}` as columns.
pub fn kernel_basis(a: &Matrix) -> Matrix {
    a.kernel_basis()
}

/// Some `x` with `a x = b`, or `None` if the system is inconsistent.
pub fn solve(a: &Matrix, b: &Matrix) -> crate::Result<Option<Matrix>> {
    a.solve(b)
}

/// Columns of `v` extending a basis of `span(u)` to a basis of `span(v)`.
pub fn complement_basis(u: &Matrix, v: &Matrix) -> crate::Result<Matrix> {
    Matrix::complement_basis(u, v)
}

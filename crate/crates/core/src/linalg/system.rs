use super::{Field, Matrix};
use crate::error::{Error, Result};

/// Linear system in matrix unknowns: each equation reads
/// `Σ A_t X_(u_t) B_t = C`.
///
/// Unknowns are vectorized row-major and the whole system is solved as one
/// dense problem, so this is meant for desk-scale instances.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    field: Field,
    shapes: Vec<(usize, usize)>,
    equations: Vec<Equation>,
}

#[derive(Clone, Debug)]
struct Equation {
    shape: (usize, usize),
    terms: Vec<(Matrix, usize, Matrix)>,
    rhs: Matrix,
}

/// Solution set of a [`LinearSystem`]: one particular solution plus a basis
/// of the homogeneous solutions, both as vectorized columns.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub particular: Matrix,
    pub kernel: Matrix,
    shapes: Vec<(usize, usize)>,
}

impl SolutionSpace {
    /// Splits a vectorized solution back into its matrix unknowns.
    pub fn unpack(&self, x: &Matrix) -> Vec<Matrix> {
        unpack(&self.shapes, x)
    }

    pub fn particular_blocks(&self) -> Vec<Matrix> {
        self.unpack(&self.particular)
    }
}

fn unpack(shapes: &[(usize, usize)], x: &Matrix) -> Vec<Matrix> {
    let f = x.field();
    let mut out = Vec::with_capacity(shapes.len());
    let mut offset = 0;
    for &(r, c) in shapes {
        let mut m = Matrix::zeros(f, r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, x.get(offset + i * c + j, 0));
            }
        }
        offset += r * c;
        out.push(m);
    }
    out
}

impl LinearSystem {
    pub fn new(field: Field) -> Self {
        LinearSystem {
            field,
            shapes: Vec::new(),
            equations: Vec::new(),
        }
    }

    /// Registers an `rows x cols` unknown and returns its handle.
    pub fn unknown(&mut self, rows: usize, cols: usize) -> usize {
        self.shapes.push((rows, cols));
        self.shapes.len() - 1
    }

    pub fn unknown_count(&self) -> usize {
        self.shapes.iter().map(|(r, c)| r * c).sum()
    }

    /// Starts an equation whose sides are `rows x cols` matrices, with the
    /// given right-hand side (zero when `None`).
    pub fn equation(&mut self, rows: usize, cols: usize, rhs: Option<Matrix>) -> Result<usize> {
        let rhs = rhs.unwrap_or_else(|| Matrix::zeros(self.field, rows, cols));
        if rhs.shape() != (rows, cols) {
            return Err(Error::dims(
                "equation right-hand side",
                format!("{rows}x{cols}"),
                format!("{}x{}", rhs.rows(), rhs.cols()),
            ));
        }
        self.equations.push(Equation {
            shape: (rows, cols),
            terms: Vec::new(),
            rhs,
        });
        Ok(self.equations.len() - 1)
    }

    /// Adds the term `a X_u b` to equation `eq`.
    pub fn term(&mut self, eq: usize, a: Matrix, u: usize, b: Matrix) -> Result<()> {
        let (r, c) = self.shapes[u];
        let (m, n) = self.equations[eq].shape;
        if a.shape() != (m, r) || b.shape() != (c, n) {
            return Err(Error::dims(
                "equation term",
                format!("{m}x{r} and {c}x{n}"),
                format!("{}x{} and {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
            ));
        }
        self.equations[eq].terms.push((a, u, b));
        Ok(())
    }

    fn assemble(&self) -> (Matrix, Matrix) {
        let f = self.field;
        let offsets: Vec<usize> = self
            .shapes
            .iter()
            .scan(0, |acc, &(r, c)| {
                let o = *acc;
                *acc += r * c;
                Some(o)
            })
            .collect();
        let nrows: usize = self.equations.iter().map(|e| e.shape.0 * e.shape.1).sum();
        let mut big = Matrix::zeros(f, nrows, self.unknown_count());
        let mut rhs = Matrix::zeros(f, nrows, 1);
        let mut row = 0;
        for e in &self.equations {
            let (m, n) = e.shape;
            for (a, u, b) in &e.terms {
                let k = a.kron(&b.transpose());
                let current = big.block(row, offsets[*u], m * n, k.cols());
                big.set_block(row, offsets[*u], &(&current + &k));
            }
            for i in 0..m {
                for j in 0..n {
                    rhs.set(row + i * n + j, 0, e.rhs.get(i, j));
                }
            }
            row += m * n;
        }
        (big, rhs)
    }

    /// Full solution set, or `None` if inconsistent.
    pub fn solve(&self) -> Option<SolutionSpace> {
        let (big, rhs) = self.assemble();
        let particular = big.solve(&rhs).expect("assembled shapes agree")?;
        Some(SolutionSpace {
            particular,
            kernel: big.kernel_basis(),
            shapes: self.shapes.clone(),
        })
    }

    /// One solution with free variables zero, or `None` if inconsistent.
    pub fn solve_one(&self) -> Option<Vec<Matrix>> {
        let (big, rhs) = self.assemble();
        let x = big.solve(&rhs).expect("assembled shapes agree")?;
        Some(unpack(&self.shapes, &x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sylvester_style_system() {
        // A X - X B = C with A = [1], B = [2] over Q forces X = -C.
        let f = Field::Q;
        let mut s = LinearSystem::new(f);
        let x = s.unknown(1, 1);
        let e = s.equation(1, 1, Some(Matrix::from_i64(f, 1, 1, &[3]))).unwrap();
        s.term(e, Matrix::from_i64(f, 1, 1, &[1]), x, Matrix::identity(f, 1)).unwrap();
        s.term(e, Matrix::identity(f, 1), x, Matrix::from_i64(f, 1, 1, &[-2])).unwrap();
        let sol = s.solve_one().unwrap();
        assert_eq!(sol[0], Matrix::from_i64(f, 1, 1, &[-3]));
    }

    #[test]
    fn kernel_of_commutation_constraint() {
        // Matrices commuting with diag(1, 2) over F_5 are the diagonal ones.
        let f = Field::prime(5).unwrap();
        let d = Matrix::from_rows(f, &[vec![1, 0], vec![0, 2]]);
        let mut s = LinearSystem::new(f);
        let x = s.unknown(2, 2);
        let e = s.equation(2, 2, None).unwrap();
        s.term(e, d.clone(), x, Matrix::identity(f, 2)).unwrap();
        s.term(e, Matrix::identity(f, 2).neg(), x, d.clone()).unwrap();
        let space = s.solve().unwrap();
        assert_eq!(space.kernel.cols(), 2);
        for j in 0..2 {
            let m = &space.unpack(&space.kernel.column(j))[0];
            assert_eq!(&(&d * m) - &(m * &d), Matrix::zeros(f, 2, 2));
        }
    }

    #[test]
    fn inconsistent_system() {
        let f = Field::prime(3).unwrap();
        let mut s = LinearSystem::new(f);
        let x = s.unknown(1, 1);
        let e = s.equation(1, 1, Some(Matrix::from_i64(f, 1, 1, &[1]))).unwrap();
        s.term(e, Matrix::zeros(f, 1, 1), x, Matrix::identity(f, 1)).unwrap();
        assert!(s.solve().is_none());
    }
}

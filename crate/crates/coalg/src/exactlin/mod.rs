//! Exact linear algebra over Q and prime fields: the computational substrate
//! for every kernel, image, preimage, intersection and tensor construction
//! in the crate.

mod matrix;
pub mod poly;
mod scalar;
mod subspace;

pub use matrix::Matrix;
pub use scalar::{is_prime, Field, Scalar};
pub use subspace::Subspace;

/// Errors from subspace/matrix lattice operations on incompatible inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinError {
    AmbientMismatch { left: usize, right: usize },
    FieldMismatch,
}

impl std::fmt::Display for LinError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinError::AmbientMismatch { left, right } => {
                write!(f, "ambient dimension mismatch: {left} vs {right}")
            }
            LinError::FieldMismatch => write!(f, "ground field mismatch"),
        }
    }
}

impl std::error::Error for LinError {}

/// Affine solution set of a system of matrix equations L·X·R = B in one
/// matrix unknown X of a fixed shape: a particular solution (when the system
/// is consistent) plus a basis of the homogeneous solution space. Used to
/// decide existence and uniqueness of factorizations exhaustively.
pub struct MatrixSolutions {
    pub particular: Option<Matrix>,
    pub kernel_basis: Vec<Matrix>,
}

impl MatrixSolutions {
    pub fn unique(&self) -> Option<&Matrix> {
        match (&self.particular, self.kernel_basis.is_empty()) {
            (Some(x), true) => Some(x),
            _ => None,
        }
    }
}

/// One constraint Σᵢ Lᵢ·X·Rᵢ = B on the unknown matrix X.
pub struct MatrixConstraint {
    pub terms: Vec<(Matrix, Matrix)>,
    pub rhs: Matrix,
}

impl MatrixConstraint {
    /// The single-term constraint L·X·R = B.
    pub fn product(l: Matrix, r: Matrix, rhs: Matrix) -> Self {
        MatrixConstraint {
            terms: vec![(l, r)],
            rhs,
        }
    }
}

/// Solve simultaneous constraints Σᵢ Lᵢ·X·Rᵢ = B for an unknown
/// `rows`×`cols` matrix X, exactly.
pub fn solve_matrix_equations(
    field: Field,
    rows: usize,
    cols: usize,
    constraints: &[MatrixConstraint],
) -> MatrixSolutions {
    let unknowns = rows * cols;
    let mut items = Vec::new();
    let mut rhs = Vec::new();
    let mut eq_base = 0usize;
    for c in constraints {
        let (out_rows, out_cols) = (c.rhs.rows(), c.rhs.cols());
        for (l, r) in &c.terms {
            assert_eq!(l.cols(), rows, "left factor shape");
            assert_eq!(r.rows(), cols, "right factor shape");
            assert_eq!((l.rows(), r.cols()), (out_rows, out_cols), "term shape");
            // Entry (i, j) of L·X·R is Σ_{a,b} L[i,a]·X[a,b]·R[b,j].
            for (i, a, lv) in l.entries() {
                for (b, j, rv) in r.entries() {
                    items.push((eq_base + i * out_cols + j, a * cols + b, lv * rv));
                }
            }
        }
        for i in 0..out_rows {
            for j in 0..out_cols {
                rhs.push(c.rhs.get(i, j));
            }
        }
        eq_base += out_rows * out_cols;
    }
    let system = Matrix::from_entries(field, eq_base, unknowns, items);
    let particular = system.solve(&rhs).map(|x| reshape(field, rows, cols, &x));
    let kernel_basis = system
        .kernel()
        .basis_vectors()
        .into_iter()
        .map(|v| reshape(field, rows, cols, &v))
        .collect();
    MatrixSolutions {
        particular,
        kernel_basis,
    }
}

fn reshape(field: Field, rows: usize, cols: usize, flat: &[Scalar]) -> Matrix {
    Matrix::from_entries(
        field,
        rows,
        cols,
        flat.iter()
            .enumerate()
            .map(|(idx, v)| (idx / cols, idx % cols, v.clone())),
    )
}

/// Format a vector as a combination of named basis elements, e.g.
/// `g - 3/2*x`. Deterministic; used by reports and the CLI.
pub fn format_combination(names: &[String], coeffs: &[Scalar]) -> String {
    assert_eq!(names.len(), coeffs.len());
    let mut terms = Vec::new();
    for (name, c) in names.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        if c.is_one() {
            terms.push(name.clone());
        } else if (-c).is_one() {
            terms.push(format!("-{name}"));
        } else {
            terms.push(format!("{c}*{name}"));
        }
    }
    if terms.is_empty() {
        return "0".to_string();
    }
    terms.join(" + ").replace("+ -", "- ")
}

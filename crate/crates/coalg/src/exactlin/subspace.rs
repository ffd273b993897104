//! Canonical subspaces of a coordinate space.
//!
//! A subspace is stored as the reduced row-echelon basis of its row space,
//! which is the unique canonical representative: two `Subspace` values are
//! mathematically equal exactly when they are structurally equal. This is
//! what makes wedge associativity, filtration comparisons and every other
//! lattice identity in the crate cheaply decidable.

use std::fmt;

use super::matrix::Matrix;
use super::scalar::{Field, Scalar};
use super::LinError;

#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Matrix, // RREF, no zero rows
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Matrix::zero(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of a list of vectors.
    pub fn span(field: Field, ambient: usize, vectors: Vec<Vec<Scalar>>) -> Self {
        for v in &vectors {
            assert_eq!(v.len(), ambient, "vector length mismatch in span");
        }
        Self::from_matrix_rows(&Matrix::from_rows(field, vectors).with_cols(ambient))
    }

    /// Row space of a matrix.
    pub fn from_matrix_rows(m: &Matrix) -> Self {
        let (basis, pivots) = m.rref_with_pivots();
        Subspace {
            field: m.field(),
            ambient: m.cols(),
            basis,
            pivots,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// The canonical echelon basis, rows = basis vectors.
    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.to_dense_rows()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce_vector(v).iter().all(|s| s.is_zero())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other
            .basis_vectors()
            .iter()
            .all(|v| self.contains(v))
    }

    /// Reduce a vector modulo this subspace: subtract the unique combination
    /// of basis rows that clears the pivot coordinates.
    fn reduce_vector(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut out = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            if out[p].is_zero() {
                continue;
            }
            let coeff = out[p].clone();
            for (c, b) in self.basis.row_entries(r) {
                out[c] = &out[c] - &(&coeff * b);
            }
        }
        out
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` lies
    /// outside the subspace. With an RREF basis the coordinates are read off
    /// the pivot positions; membership is confirmed by reduction.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinError> {
        self.check_compatible(other)?;
        Ok(Subspace::from_matrix_rows(
            &self.basis.vstack(&other.basis),
        ))
    }

    /// Intersection, computed through annihilators: the standard pairing on
    /// coordinate space is nondegenerate, so U ∩ V = ann(ann U + ann V).
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinError> {
        self.check_compatible(other)?;
        let a = self.annihilator();
        let b = other.annihilator();
        Ok(a.sum(&b)?.annihilator())
    }

    /// `{x : ⟨b, x⟩ = 0 for every basis vector b}` under the standard
    /// bilinear pairing.
    pub fn annihilator(&self) -> Subspace {
        self.basis.kernel()
    }

    /// Tensor product of subspaces inside the tensor of the ambient spaces.
    /// The Kronecker product of two RREF bases is again an RREF basis with
    /// pivot pairs in lexicographic order, so no re-reduction is needed.
    pub fn tensor(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.field, other.field, "field mismatch in tensor");
        let basis = self.basis.tensor(&other.basis);
        let pivots: Vec<usize> = self
            .pivots
            .iter()
            .flat_map(|&p| other.pivots.iter().map(move |&q| p * other.ambient + q))
            .collect();
        debug_assert_eq!(basis.rref(), basis);
        Subspace {
            field: self.field,
            ambient: self.ambient * other.ambient,
            basis,
            pivots,
        }
    }

    /// The quotient map V → V/self as a matrix, with the quotient coordinates
    /// indexed by the non-pivot columns of the echelon basis in increasing
    /// order. Deterministic and stable under the ambient basis order.
    pub fn quotient_map(&self) -> Matrix {
        let pivot_set: std::collections::BTreeSet<usize> = self.pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.ambient).filter(|c| !pivot_set.contains(c)).collect();
        let mut items = Vec::new();
        for (qi, &f) in free.iter().enumerate() {
            items.push((qi, f, self.field.one()));
        }
        for (r, &p) in self.pivots.iter().enumerate() {
            for (c, v) in self.basis.row_entries(r) {
                if c == p {
                    continue;
                }
                // c is a non-pivot column of row r
                let qi = free.binary_search(&c).expect("non-pivot column");
                items.push((qi, p, -v));
            }
        }
        Matrix::from_entries(self.field, free.len(), self.ambient, items)
    }

    /// A section of the quotient map: sends the j-th quotient coordinate to
    /// the standard basis vector at the j-th non-pivot column.
    pub fn quotient_section(&self) -> Matrix {
        let pivot_set: std::collections::BTreeSet<usize> = self.pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.ambient).filter(|c| !pivot_set.contains(c)).collect();
        Matrix::from_entries(
            self.field,
            self.ambient,
            free.len(),
            free.iter().enumerate().map(|(qi, &f)| (f, qi, self.field.one())),
        )
    }

    /// The inclusion of this subspace as a matrix ambient×dim whose columns
    /// are the basis vectors.
    pub fn inclusion_map(&self) -> Matrix {
        self.basis.transpose()
    }

    /// The coordinate-extraction map dim×ambient: left inverse of
    /// `inclusion_map`, reading coordinates off the pivot positions. Only
    /// meaningful on vectors inside the subspace.
    pub fn coordinate_map(&self) -> Matrix {
        Matrix::from_entries(
            self.field,
            self.dim(),
            self.ambient,
            self.pivots
                .iter()
                .enumerate()
                .map(|(r, &p)| (r, p, self.field.one())),
        )
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), LinError> {
        if self.field != other.field {
            return Err(LinError::FieldMismatch);
        }
        if self.ambient != other.ambient {
            return Err(LinError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace dim {} of k^{}: {:?}",
            self.dim(),
            self.ambient,
            self.basis
        )
    }
}

impl Matrix {
    /// Reinterpret with an explicit column count (used when building the
    /// span of an empty vector list, where the width cannot be inferred).
    fn with_cols(self, cols: usize) -> Matrix {
        if self.rows() == 0 && self.cols() != cols {
            Matrix::zero(self.field(), 0, cols)
        } else {
            assert_eq!(self.cols(), cols, "column count mismatch");
            self
        }
    }
}

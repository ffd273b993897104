//! Sparse exact matrices and Gaussian elimination.
//!
//! A matrix acts on column vectors from the left; composition of linear maps
//! is matrix multiplication in the usual order. Tensor products of maps use
//! the Kronecker product on the lexicographic tensor basis, left factor
//! major: basis vector `e_i ⊗ e_j` of `V ⊗ W` has index `i * dim(W) + j`.
//! Every bit-exact expectation in the crate depends on this one convention.

use std::collections::BTreeMap;
use std::fmt;

use super::scalar::{pivot_weight, Field, Scalar};
use super::subspace::Subspace;

/// A sparse matrix over an exact field. Zero entries are never stored, so
/// structural equality coincides with mathematical equality.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl Matrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut entries = BTreeMap::new();
        for i in 0..n {
            entries.insert((i, i), field.one());
        }
        Matrix {
            field,
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn from_entries(
        field: Field,
        rows: usize,
        cols: usize,
        items: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut entries: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (r, c, v) in items {
            assert!(r < rows && c < cols, "matrix entry ({r},{c}) out of bounds");
            assert_eq!(v.field(), field, "matrix entry field mismatch");
            if v.is_zero() {
                continue;
            }
            match entries.entry((r, c)) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get() + &v;
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Matrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let items = rows.into_iter().enumerate().flat_map(|(r, row)| {
            assert_eq!(row.len(), ncols, "ragged rows");
            row.into_iter()
                .enumerate()
                .map(move |(c, v)| (r, c, v))
                .collect::<Vec<_>>()
        });
        Self::from_entries(field, nrows, ncols, items)
    }

    /// A single row vector as a 1×n matrix.
    pub fn row_vector(field: Field, v: Vec<Scalar>) -> Self {
        Self::from_rows(field, vec![v])
    }

    /// A single column vector as an n×1 matrix.
    pub fn column_vector(field: Field, v: Vec<Scalar>) -> Self {
        let n = v.len();
        Self::from_entries(field, n, 1, v.into_iter().enumerate().map(|(i, s)| (i, 0, s)))
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

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries
            .range((r, 0)..(r + 1, 0))
            .map(|(&(_, c), v)| (c, v))
    }

    pub fn row_to_vec(&self, r: usize) -> Vec<Scalar> {
        let mut out = vec![self.field.zero(); self.cols];
        for (c, v) in self.row_entries(r) {
            out[c] = v.clone();
        }
        out
    }

    pub fn column_to_vec(&self, c: usize) -> Vec<Scalar> {
        let mut out = vec![self.field.zero(); self.rows];
        for (&(r, cc), v) in &self.entries {
            if cc == c {
                out[r] = v.clone();
            }
        }
        out
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row_to_vec(r)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_entries(
            self.field,
            self.cols,
            self.rows,
            self.entries().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        Matrix::from_entries(
            self.field,
            self.rows,
            self.cols,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(rhs.entries().map(|(r, c, v)| (r, c, v.clone()))),
        )
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        Matrix::from_entries(
            self.field,
            self.rows,
            self.cols,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(rhs.entries().map(|(r, c, v)| (r, c, -v))),
        )
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_entries(
            self.field,
            self.rows,
            self.cols,
            self.entries().map(|(r, c, v)| (r, c, -v)),
        )
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix::from_entries(
            self.field,
            self.rows,
            self.cols,
            self.entries().map(|(r, c, v)| (r, c, v * s)),
        )
    }

    /// Matrix product `self * rhs` (composition: `self` applied after `rhs`).
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "shape mismatch in mul: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        assert_eq!(self.field, rhs.field, "field mismatch in mul");
        let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (&(i, t), a) in &self.entries {
            for (c, b) in rhs.row_entries(t) {
                let term = a * b;
                if term.is_zero() {
                    continue;
                }
                match acc.entry((i, c)) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(term);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let sum = e.get() + &term;
                        if sum.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = sum;
                        }
                    }
                }
            }
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: rhs.cols,
            entries: acc,
        }
    }

    /// Kronecker product: the matrix of `self ⊗ rhs` on lexicographic tensor
    /// bases with the left factor major.
    pub fn tensor(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch in tensor");
        let items = self.entries().flat_map(|(i, j, a)| {
            rhs.entries()
                .map(move |(r, c, b)| (i * rhs.rows + r, j * rhs.cols + c, a * b))
                .collect::<Vec<_>>()
        });
        Matrix::from_entries(
            self.field,
            self.rows * rhs.rows,
            self.cols * rhs.cols,
            items,
        )
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch in apply");
        let mut out = vec![self.field.zero(); self.rows];
        for (&(r, c), a) in &self.entries {
            if !v[c].is_zero() {
                out[r] = &out[r] + &(a * &v[c]);
            }
        }
        out
    }

    /// Stack vertically: `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        Matrix::from_entries(
            self.field,
            self.rows + other.rows,
            self.cols,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(other.entries().map(|(r, c, v)| (r + self.rows, c, v.clone()))),
        )
    }

    /// Stack horizontally: `self` left of `other`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        Matrix::from_entries(
            self.field,
            self.rows,
            self.cols + other.cols,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(other.entries().map(|(r, c, v)| (r, c + self.cols, v.clone()))),
        )
    }

    pub fn trace(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        let mut acc = self.field.zero();
        for i in 0..self.rows {
            if let Some(v) = self.entries.get(&(i, i)) {
                acc = &acc + v;
            }
        }
        acc
    }

    /// Reduced row-echelon form. The result is the unique canonical
    /// representative of the row space.
    pub fn rref(&self) -> Matrix {
        self.rref_with_pivots().0
    }

    pub fn rref_with_pivots(&self) -> (Matrix, Vec<usize>) {
        let (rows, pivots) = rref_sparse_rows(self.sparse_rows(), self.field);
        let items = rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v.clone())).collect::<Vec<_>>());
        (
            Matrix::from_entries(self.field, rows.len(), self.cols, items),
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Exact null space `{x : self * x = 0}`, as a canonical subspace of the
    /// column-index space.
    pub fn kernel(&self) -> Subspace {
        let (rref, pivots) = self.rref_with_pivots();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_set.contains(&f) {
                continue;
            }
            let mut v = vec![self.field.zero(); self.cols];
            v[f] = self.field.one();
            for (r, &p) in pivots.iter().enumerate() {
                let coeff = rref.get(r, f);
                if !coeff.is_zero() {
                    v[p] = -&coeff;
                }
            }
            basis.push(v);
        }
        Subspace::span(self.field, self.cols, basis)
    }

    /// Column space, as a canonical subspace of the row-index space.
    pub fn image(&self) -> Subspace {
        Subspace::from_matrix_rows(&self.transpose())
    }

    /// `{x : self * x ∈ w}` for a subspace `w` of the codomain: the kernel of
    /// the composition with the quotient map by `w`.
    pub fn preimage(&self, w: &Subspace) -> Result<Subspace, super::LinError> {
        if w.ambient_dim() != self.rows {
            return Err(super::LinError::AmbientMismatch {
                left: self.rows,
                right: w.ambient_dim(),
            });
        }
        if w.field() != self.field {
            return Err(super::LinError::FieldMismatch);
        }
        Ok(w.quotient_map().mul(self).kernel())
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch in solve");
        let aug = self.hstack(&Matrix::column_vector(self.field, b.to_vec()));
        let (rref, pivots) = aug.rref_with_pivots();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = rref.get(r, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n));
        let (rref, pivots) = aug.rref_with_pivots();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
            return None;
        }
        let items = rref
            .entries()
            .filter(|&(_, c, _)| c >= n)
            .map(|(r, c, v)| (r, c - n, v.clone()))
            .collect::<Vec<_>>();
        Some(Matrix::from_entries(self.field, n, n, items))
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, Scalar)>> {
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].push((c, v.clone()));
        }
        rows
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows.min(16) {
            let row: Vec<String> = self.row_to_vec(r).iter().map(|s| s.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        if self.rows > 16 {
            writeln!(f, "  ...")?;
        }
        Ok(())
    }
}

/// Row `dst -= coeff * src` on sorted sparse rows.
fn row_axpy(dst: &[(usize, Scalar)], coeff: &Scalar, src: &[(usize, Scalar)]) -> Vec<(usize, Scalar)> {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        match (dst.get(i), src.get(j)) {
            (Some((ci, vi)), Some((cj, vj))) if ci == cj => {
                let v = vi - &(coeff * vj);
                if !v.is_zero() {
                    out.push((*ci, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ci, vi)), Some((cj, _))) if ci < cj => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (Some(_), Some((cj, vj))) => {
                let v = -&(coeff * vj);
                if !v.is_zero() {
                    out.push((*cj, v));
                }
                j += 1;
            }
            (Some((ci, vi)), None) => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (None, Some((cj, vj))) => {
                let v = -&(coeff * vj);
                if !v.is_zero() {
                    out.push((*cj, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn row_lookup(row: &[(usize, Scalar)], col: usize) -> Option<&Scalar> {
    row.binary_search_by_key(&col, |(c, _)| *c)
        .ok()
        .map(|i| &row[i].1)
}

/// Gaussian elimination to reduced row-echelon form on sparse rows. Returns
/// the echelon rows (pivot columns strictly increasing, pivot entries 1,
/// pivot columns cleared elsewhere) and the pivot column list.
pub(crate) fn rref_sparse_rows(
    rows: Vec<Vec<(usize, Scalar)>>,
    _field: Field,
) -> (Vec<Vec<(usize, Scalar)>>, Vec<usize>) {
    let mut active: Vec<Vec<(usize, Scalar)>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut result: Vec<Vec<(usize, Scalar)>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();

    while !active.is_empty() {
        let lead = active.iter().map(|r| r[0].0).min().unwrap();
        // Among rows leading at `lead`, prefer short rows with small entries
        // to limit fill-in and coefficient growth.
        let mut best: Option<(usize, usize)> = None;
        for (i, r) in active.iter().enumerate() {
            if r[0].0 == lead {
                let w = r.len() * 8 + pivot_weight(&r[0].1);
                if best.map_or(true, |(bw, _)| w < bw) {
                    best = Some((w, i));
                }
            }
        }
        let idx = best.unwrap().1;
        let mut pivot_row = active.remove(idx);
        let inv = pivot_row[0].1.inv().expect("nonzero pivot");
        if !inv.is_one() {
            for (_, v) in pivot_row.iter_mut() {
                *v = &*v * &inv;
            }
        }
        active = active
            .into_iter()
            .filter_map(|r| {
                if r[0].0 == lead {
                    let coeff = r[0].1.clone();
                    let reduced = row_axpy(&r, &coeff, &pivot_row);
                    if reduced.is_empty() {
                        None
                    } else {
                        Some(reduced)
                    }
                } else {
                    Some(r)
                }
            })
            .collect();
        result.push(pivot_row);
        pivots.push(lead);
    }

    // Back-substitution: clear pivot columns above each pivot.
    for i in (0..result.len()).rev() {
        let p = pivots[i];
        for j in 0..i {
            if let Some(coeff) = row_lookup(&result[j], p).cloned() {
                result[j] = row_axpy(&result[j], &coeff, &result[i]);
            }
        }
    }

    (result, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        Field::Q.parse(s).unwrap()
    }

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            Field::Q,
            rows.iter()
                .map(|r| r.iter().map(|&x| Field::Q.integer(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_identity_is_fixed() {
        let id = Matrix::identity(Field::Q, 2);
        assert_eq!(id.rref(), id);
    }

    #[test]
    fn rref_rank_one() {
        // [[2,4],[1,2]] reduces to a single row [1,2]; as a 2x2 row-space
        // representative the zero row is dropped by rank.
        let m = mat(&[&[2, 4], &[1, 2]]);
        let (r, pivots) = m.rref_with_pivots();
        assert_eq!(pivots, vec![0]);
        assert_eq!(r.rows(), 1);
        assert_eq!(r.row_to_vec(0), vec![q("1"), q("2")]);
    }

    #[test]
    fn rref_zero_matrix() {
        let z = Matrix::zero(Field::Q, 3, 3);
        assert_eq!(z.rref().rows(), 0);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn rref_idempotent() {
        let m = mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        let r = m.rref();
        assert_eq!(r.rref(), r);
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        assert_eq!(Matrix::identity(Field::Q, 3).kernel().dim(), 0);
        assert_eq!(Matrix::zero(Field::Q, 2, 3).kernel().dim(), 3);
    }

    #[test]
    fn kernel_small_system() {
        // [[1,1]] has kernel spanned by (1,-1).
        let m = mat(&[&[1, 1]]);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[q("1"), q("-1")]));
        // Rank-nullity.
        assert_eq!(k.dim() + m.rank(), m.cols());
    }

    #[test]
    fn tensor_of_identities() {
        let a = Matrix::identity(Field::Q, 2);
        let b = Matrix::identity(Field::Q, 3);
        assert_eq!(a.tensor(&b), Matrix::identity(Field::Q, 6));
    }

    #[test]
    fn tensor_rank_multiplicative_on_rank_one() {
        let f = mat(&[&[1], &[2]]); // rank 1, 2x1
        let g = mat(&[&[3, 0]]); // rank 1, 1x2
        assert_eq!(f.tensor(&g).rank(), 1);
    }

    #[test]
    fn mul_and_apply_agree() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        let b = mat(&[&[0, 1], &[1, 0]]);
        let ab = a.mul(&b);
        let v = vec![q("5"), q("7")];
        assert_eq!(ab.apply(&v), a.apply(&b.apply(&v)));
    }

    #[test]
    fn solve_and_inverse() {
        let a = mat(&[&[2, 1], &[1, 1]]);
        let x = a.solve(&[q("3"), q("2")]).unwrap();
        assert_eq!(a.apply(&x), vec![q("3"), q("2")]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(Field::Q, 2));
        let singular = mat(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&[q("0"), q("1")]).is_none());
    }

    #[test]
    fn rref_over_prime_field() {
        let f = Field::Fp(5);
        let m = Matrix::from_rows(
            f,
            vec![
                vec![f.integer(2), f.integer(4)],
                vec![f.integer(1), f.integer(2)],
            ],
        );
        let r = m.rref();
        assert_eq!(r.rows(), 1);
        assert_eq!(r.row_to_vec(0), vec![f.integer(1), f.integer(2)]);
    }
}

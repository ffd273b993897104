//! Coradicals, wedge products, coradical filtrations and pointedness.
//!
//! The coradical is computed through the dual algebra: it is the annihilator
//! of the Jacobson radical of C* under the evaluation pairing. The radical
//! itself comes from the trace form, which is exact over Q and over GF(p)
//! with p larger than the dimension; other characteristics are refused
//! rather than silently mishandled.

use std::fmt;

use crate::coalgebra::{Algebra, Coalgebra};
use crate::exactlin::poly::{char_poly, div_exact, eval, field_roots, RootsError};
use crate::exactlin::{Field, Matrix, Scalar, Subspace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoradicalError {
    /// The trace-form radical is only valid over Q or GF(p) with p > dim.
    UnsupportedCharacteristic { p: u64, dim: usize },
    /// Eigenvalue enumeration over GF(p) is capped.
    PrimeTooLarge(u64),
}

impl fmt::Display for CoradicalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoradicalError::UnsupportedCharacteristic { p, dim } => write!(
                f,
                "radical computation requires characteristic 0 or p > dim; got p = {p}, dim = {dim}"
            ),
            CoradicalError::PrimeTooLarge(p) => write!(
                f,
                "set-like search over GF({p}) exceeds the supported prime bound"
            ),
        }
    }
}

impl std::error::Error for CoradicalError {}

impl From<RootsError> for CoradicalError {
    fn from(e: RootsError) -> Self {
        match e {
            RootsError::PrimeTooLarge(p) => CoradicalError::PrimeTooLarge(p),
        }
    }
}

fn check_characteristic(field: Field, dim: usize) -> Result<(), CoradicalError> {
    match field {
        Field::Q => Ok(()),
        Field::Fp(p) => {
            if (p as u128) > dim as u128 {
                Ok(())
            } else {
                Err(CoradicalError::UnsupportedCharacteristic { p, dim })
            }
        }
    }
}

/// The wedge product X ∧ Y = Δ⁻¹(C⊗Y + X⊗C), computed by the preimage
/// formula.
pub fn wedge(c: &Coalgebra, x: &Subspace, y: &Subspace) -> Subspace {
    let full = Subspace::full(c.field(), c.dim());
    let target = full.tensor(y).sum(&x.tensor(&full)).expect("same ambient");
    c.delta_matrix().preimage(&target).expect("same ambient")
}

/// The wedge product as the kernel of (π_X ⊗ π_Y) ∘ Δ, where π is the
/// quotient map. Kept as an independent route for cross-checking the
/// preimage formula.
pub fn wedge_via_kernel(c: &Coalgebra, x: &Subspace, y: &Subspace) -> Subspace {
    let qx = x.quotient_map();
    let qy = y.quotient_map();
    qx.tensor(&qy).mul(&c.delta_matrix()).kernel()
}

/// Jacobson radical of a finite-dimensional unital algebra via the trace
/// form: rad(A) is the kernel of (x, y) ↦ trace(L_x ∘ L_y) in characteristic
/// 0 or p > dim(A). The result is verified to be a nilpotent two-sided
/// ideal before it is returned.
pub fn jacobson_radical(a: &Algebra) -> Result<Subspace, CoradicalError> {
    check_characteristic(a.field(), a.dim())?;
    let d = a.dim();
    let field = a.field();
    let ops: Vec<Matrix> = (0..d)
        .map(|i| {
            let mut e = vec![field.zero(); d];
            e[i] = field.one();
            a.left_mult_operator(&e)
        })
        .collect();
    let gram = Matrix::from_entries(
        field,
        d,
        d,
        (0..d).flat_map(|i| {
            let ops = &ops;
            (0..d).map(move |j| (i, j, ops[i].mul(&ops[j]).trace()))
        }),
    );
    let rad = gram.kernel();

    // The kernel must be a nilpotent two-sided ideal; anything else means
    // the characteristic precondition was violated upstream.
    for i in 0..d {
        let mut e = vec![field.zero(); d];
        e[i] = field.one();
        for v in rad.basis_vectors() {
            assert!(
                rad.contains(&a.multiply(&e, &v)) && rad.contains(&a.multiply(&v, &e)),
                "trace-form kernel is not a two-sided ideal"
            );
        }
    }
    let mut power = rad.clone();
    for _ in 0..=d {
        if power.is_zero() {
            break;
        }
        power = multiply_subspaces(a, &power, &rad);
    }
    assert!(power.is_zero(), "trace-form kernel is not nilpotent");
    Ok(rad)
}

fn multiply_subspaces(a: &Algebra, u: &Subspace, v: &Subspace) -> Subspace {
    let mut products = Vec::new();
    for x in u.basis_vectors() {
        for y in v.basis_vectors() {
            products.push(a.multiply(&x, &y));
        }
    }
    Subspace::span(a.field(), a.dim(), products)
}

/// The coradical: the annihilator in C of the Jacobson radical of the dual
/// algebra under the evaluation pairing. The result is always a
/// subcoalgebra, which is asserted via the closure operator.
pub fn coradical(c: &Coalgebra) -> Result<Subspace, CoradicalError> {
    let rad = jacobson_radical(&c.dual_algebra())?;
    let c0 = rad.annihilator();
    debug_assert_eq!(c.subcoalgebra_closure(&c0), c0, "coradical not a subcoalgebra");
    Ok(c0)
}

/// An ascending coalgebra filtration; `exhaustive` records whether the last
/// term is the whole carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub terms: Vec<Subspace>,
    pub exhaustive: bool,
}

/// The coradical filtration C₀ ⊆ C₁ ⊆ … with Cₙ = Cₙ₋₁ ∧ C₀, stopped at its
/// fixed point.
pub fn coradical_filtration(c: &Coalgebra) -> Result<Filtration, CoradicalError> {
    let c0 = coradical(c)?;
    let mut terms = vec![c0.clone()];
    loop {
        let last = terms.last().unwrap();
        if last.is_full() {
            break;
        }
        let next = wedge(c, last, &c0);
        if &next == last {
            break;
        }
        terms.push(next);
    }
    let exhaustive = terms.last().unwrap().is_full();
    Ok(Filtration { terms, exhaustive })
}

/// Outcome of the pointedness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pointedness {
    /// The coradical is spanned by the returned set-like elements (vectors
    /// in the ambient carrier, sorted lexicographically).
    Pointed { setlikes: Vec<Vec<Scalar>> },
    /// Some cosimple subcoalgebra has dimension > 1 already over the ground
    /// field (the dual of the coradical is not commutative).
    NotPointed { witness: String },
    /// The coradical dual is commutative but splits into one-dimensional
    /// blocks only over a proper field extension.
    PointedOnlyOverExtension,
}

impl Pointedness {
    pub fn is_pointed(&self) -> bool {
        matches!(self, Pointedness::Pointed { .. })
    }
}

/// Decide pointedness and, in the pointed case, produce the set-like basis
/// of the coradical. The dual of C₀ is semisimple; C is pointed over the
/// ground field exactly when that dual is commutative and splits into
/// one-dimensional blocks, which is decided by exact simultaneous
/// eigenspace refinement of the basis multiplication operators.
pub fn is_pointed(c: &Coalgebra) -> Result<Pointedness, CoradicalError> {
    let c0 = coradical(c)?;
    let (c0_coalg, incl) = c
        .restrict(&c0)
        .expect("coradical is a subcoalgebra");
    let b = c0_coalg.dual_algebra();
    if let Some((i, j)) = b.is_commutative() {
        return Ok(Pointedness::NotPointed {
            witness: format!(
                "dual of the coradical is not commutative: [{}, {}] ≠ 0",
                b.basis_names()[i],
                b.basis_names()[j]
            ),
        });
    }
    let field = b.field();
    let m = b.dim();
    let blocks = refine_blocks(&b)?;
    if blocks.iter().any(|bl| bl.dim() > 1) {
        return Ok(Pointedness::PointedOnlyOverExtension);
    }

    // All blocks one-dimensional: the primitive idempotents are the
    // components of the unit across the blocks, and the set-likes are the
    // dual basis of the idempotents under the evaluation pairing.
    let block_vectors: Vec<Vec<Scalar>> = blocks
        .iter()
        .map(|bl| bl.basis_vectors().remove(0))
        .collect();
    let p = Matrix::from_rows(field, block_vectors.clone()).transpose();
    let coords = p
        .solve(b.unit_vector())
        .expect("unit decomposes across blocks");
    let idempotents: Vec<Vec<Scalar>> = block_vectors
        .iter()
        .zip(&coords)
        .map(|(v, a)| v.iter().map(|x| x * a).collect())
        .collect();
    for (i, e) in idempotents.iter().enumerate() {
        assert_eq!(b.multiply(e, e), *e, "block idempotent not idempotent");
        for (j, f) in idempotents.iter().enumerate() {
            if i != j {
                assert!(
                    b.multiply(e, f).iter().all(|s| s.is_zero()),
                    "block idempotents not orthogonal"
                );
            }
        }
    }
    // Dual basis: rows of E are the idempotents; set-likes in C₀
    // coordinates are the columns of E⁻¹.
    let e = Matrix::from_rows(field, idempotents);
    let e_inv = e.inverse().expect("idempotents form a basis");
    let mut setlikes = Vec::new();
    for j in 0..m {
        let g_c0 = e_inv.column_to_vec(j);
        let g = incl.apply(&g_c0);
        assert!(
            c.is_setlike(&g),
            "idempotent dual vector is not set-like"
        );
        setlikes.push(g);
    }
    setlikes.sort();
    Ok(Pointedness::Pointed { setlikes })
}

/// Simultaneous eigenspace refinement of the commuting left-multiplication
/// operators of a commutative semisimple algebra. Ends either with all
/// blocks one-dimensional (split case) or with some block carrying a
/// nontrivial field-extension factor.
fn refine_blocks(b: &Algebra) -> Result<Vec<Subspace>, CoradicalError> {
    let field = b.field();
    let m = b.dim();
    let mut blocks = vec![Subspace::full(field, m)];
    loop {
        let mut changed = false;
        for op_idx in 0..m {
            let mut e = vec![field.zero(); m];
            e[op_idx] = field.one();
            let t = b.left_mult_operator(&e);
            let mut next = Vec::new();
            for block in &blocks {
                if block.dim() <= 1 {
                    next.push(block.clone());
                    continue;
                }
                let pieces = split_block(&t, block, field)?;
                if pieces.len() > 1 {
                    changed = true;
                }
                next.extend(pieces);
            }
            blocks = next;
        }
        if !changed {
            return Ok(blocks);
        }
    }
}

/// Split one invariant block along the rational eigenvalues of the
/// restricted operator. The complement of the rational eigenspaces (the
/// kernel of the deflated characteristic polynomial) is kept as a single
/// unsplit block.
fn split_block(t: &Matrix, block: &Subspace, field: Field) -> Result<Vec<Subspace>, CoradicalError> {
    let dim = block.dim();
    // Restrict: coordinates of T(basis vector) in the block basis. The
    // block is invariant because it arises from eigenspaces of commuting
    // operators.
    let mut cols = Vec::new();
    for v in block.basis_vectors() {
        let tv = t.apply(&v);
        let coords = block
            .coordinates(&tv)
            .expect("block not invariant under multiplication operator");
        cols.push(coords);
    }
    let r = Matrix::from_rows(field, cols).transpose();
    let cp = char_poly(&r);
    let roots = field_roots(&cp, field)?;
    if roots.is_empty() {
        return Ok(vec![block.clone()]);
    }
    let mut pieces = Vec::new();
    let mut deflated = cp.clone();
    let mut covered = 0;
    for lam in &roots {
        let shifted = r.sub(&Matrix::identity(field, dim).scale(lam));
        let eig = shifted.kernel();
        covered += eig.dim();
        pieces.push(lift_to_ambient(&eig, block));
        // Deflate every linear factor (x − λ) to its full multiplicity.
        loop {
            let lin = vec![-lam, field.one()];
            if deflated.len() < 2 || !eval(&deflated, lam).is_zero() {
                break;
            }
            deflated = div_exact(&deflated, &lin);
        }
    }
    if covered < dim {
        // Complement of the rational eigenspaces: kernel of the deflated
        // characteristic polynomial evaluated at the operator. Semisimplicity
        // of the commutative block makes this an exact complement.
        let g_at_r = eval_matrix_poly(&deflated, &r, field);
        let rest = g_at_r.kernel();
        assert_eq!(covered + rest.dim(), dim, "eigenspace decomposition incomplete");
        pieces.push(lift_to_ambient(&rest, block));
    }
    Ok(pieces)
}

fn lift_to_ambient(sub_in_coords: &Subspace, block: &Subspace) -> Subspace {
    let rows: Vec<Vec<Scalar>> = sub_in_coords
        .basis_vectors()
        .into_iter()
        .map(|coords| block.inclusion_map().apply(&coords))
        .collect();
    Subspace::span(block.field(), block.ambient_dim(), rows)
}

fn eval_matrix_poly(p: &[Scalar], m: &Matrix, field: Field) -> Matrix {
    let n = m.rows();
    let mut acc = Matrix::zero(field, n, n);
    for c in p.iter().rev() {
        acc = m.mul(&acc).add(&Matrix::identity(field, n).scale(c));
    }
    acc
}

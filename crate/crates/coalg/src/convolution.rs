//! Convolution algebras Hom(C, A): the star product, convolution inverses
//! through the conilpotent filtration (invertibility reduces to the
//! set-like part), bialgebras, and antipodes of simply colored bialgebras.

use std::fmt;

use crate::coalgebra::{tensor_swap, Algebra, Coalgebra, CoalgebraError};
use crate::colored::SimplyColored;
use crate::exactlin::{Field, Matrix, Scalar, Subspace};
use crate::report::Report;

#[derive(Debug)]
pub enum ConvError {
    Coalgebra(CoalgebraError),
    /// The two maps do not share a source and target.
    Mismatch,
    /// f(g) has no two-sided inverse in A for the named color.
    NotInvertibleOnColor(String),
    /// The restriction of f to the base subcoalgebra is not convolution
    /// invertible.
    NotInvertibleOnBase,
    /// The iterated-projection vanishing hypothesis fails for the given
    /// decomposition.
    VanishingHypothesisFails,
    /// The set-likes do not form a group; the string names the failing
    /// axiom and witness.
    NotAGroup(String),
    /// The carriers of the coalgebra and algebra do not match.
    CarrierMismatch,
}

impl fmt::Display for ConvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvError::Coalgebra(e) => write!(f, "{e}"),
            ConvError::Mismatch => write!(f, "convolution operands have different source/target"),
            ConvError::NotInvertibleOnColor(g) => {
                write!(f, "f({g}) is not invertible in the target algebra")
            }
            ConvError::NotInvertibleOnBase => {
                write!(f, "restriction of f to the base subcoalgebra is not convolution invertible")
            }
            ConvError::VanishingHypothesisFails => {
                write!(f, "iterated projections do not vanish for this decomposition")
            }
            ConvError::NotAGroup(w) => write!(f, "set-likes do not form a group: {w}"),
            ConvError::CarrierMismatch => write!(f, "coalgebra and algebra carriers differ"),
        }
    }
}

impl std::error::Error for ConvError {}

impl From<CoalgebraError> for ConvError {
    fn from(e: CoalgebraError) -> Self {
        ConvError::Coalgebra(e)
    }
}

/// An element of the convolution algebra Hom(C, A): an arbitrary linear map
/// stored as a dim(A)×dim(C) matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct ConvMap {
    pub source: Coalgebra,
    pub target: Algebra,
    pub matrix: Matrix,
}

impl ConvMap {
    pub fn new(source: &Coalgebra, target: &Algebra, matrix: Matrix) -> Result<Self, ConvError> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(ConvError::Mismatch);
        }
        Ok(ConvMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
        })
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.matrix.apply(x)
    }

    fn same_hom(&self, other: &ConvMap) -> bool {
        self.source == other.source && self.target == other.target
    }

    pub fn add(&self, other: &ConvMap) -> Result<ConvMap, ConvError> {
        if !self.same_hom(other) {
            return Err(ConvError::Mismatch);
        }
        Ok(ConvMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.add(&other.matrix),
        })
    }

    pub fn sub(&self, other: &ConvMap) -> Result<ConvMap, ConvError> {
        if !self.same_hom(other) {
            return Err(ConvError::Mismatch);
        }
        Ok(ConvMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.sub(&other.matrix),
        })
    }
}

impl fmt::Debug for ConvMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvMap({:?})", self.matrix)
    }
}

/// The convolution product (f ⋆ g) = m ∘ (f ⊗ g) ∘ Δ.
pub fn convolve(f: &ConvMap, g: &ConvMap) -> Result<ConvMap, ConvError> {
    if !f.same_hom(g) {
        return Err(ConvError::Mismatch);
    }
    let matrix = f
        .target
        .mult_matrix()
        .mul(&f.matrix.tensor(&g.matrix))
        .mul(&f.source.delta_matrix());
    Ok(ConvMap {
        source: f.source.clone(),
        target: f.target.clone(),
        matrix,
    })
}

/// The convolution unit η∘ε: x ↦ ε(x)·1_A.
pub fn conv_unit(c: &Coalgebra, a: &Algebra) -> ConvMap {
    let unit = Matrix::column_vector(a.field(), a.unit_vector().to_vec());
    ConvMap {
        source: c.clone(),
        target: a.clone(),
        matrix: unit.mul(&c.counit_matrix()),
    }
}

/// The left-convolution operator h ↦ f⋆h on Hom(C, A), vectorized row-major
/// (A index major). Convolution by a fixed map is linear, which makes
/// "no inverse exists" an exactly decidable statement.
pub fn left_convolution_operator(f: &ConvMap) -> Matrix {
    let a = f.target.dim();
    let c = f.source.dim();
    let field = f.matrix.field();
    let mut items = Vec::new();
    for (j0, r, s, coef) in f.source.delta_triples() {
        let fr = f.matrix.column_to_vec(*r);
        let l = f.target.left_mult_operator(&fr);
        for (i0, t, lv) in l.entries() {
            items.push((i0 * c + j0, t * c + s, coef * lv));
        }
    }
    Matrix::from_entries(field, a * c, a * c, items)
}

pub fn right_convolution_operator(f: &ConvMap) -> Matrix {
    let a = f.target.dim();
    let c = f.source.dim();
    let field = f.matrix.field();
    let mut items = Vec::new();
    for (j0, r, s, coef) in f.source.delta_triples() {
        let fs = f.matrix.column_to_vec(*s);
        let rop = f.target.right_mult_operator(&fs);
        for (i0, t, rv) in rop.entries() {
            items.push((i0 * c + j0, t * c + r, coef * rv));
        }
    }
    Matrix::from_entries(field, a * c, a * c, items)
}

/// Exhaustive linear search for a two-sided convolution inverse of f:
/// solves f⋆h = η∘ε = h⋆f over the whole of Hom(C, A). Independent of the
/// filtration-based construction; `None` is a proof that no inverse exists.
pub fn conv_inverse_by_linear_solve(f: &ConvMap) -> Option<ConvMap> {
    let field = f.matrix.field();
    let a = f.target.dim();
    let c = f.source.dim();
    let u = conv_unit(&f.source, &f.target);
    let mut rhs: Vec<Scalar> = Vec::with_capacity(2 * a * c);
    for i in 0..a {
        for j in 0..c {
            rhs.push(u.matrix.get(i, j));
        }
    }
    let rhs2 = rhs.clone();
    rhs.extend(rhs2);
    let system = left_convolution_operator(f).vstack(&right_convolution_operator(f));
    let h = system.solve(&rhs)?;
    let matrix = Matrix::from_entries(
        field,
        a,
        c,
        h.into_iter()
            .enumerate()
            .map(|(idx, v)| (idx / c, idx % c, v)),
    );
    Some(ConvMap {
        source: f.source.clone(),
        target: f.target.clone(),
        matrix,
    })
}

/// Convolution inverse of f on a simply colored source: f is invertible
/// exactly when every f(g) is invertible in A. On success the inverse is
/// built from the truncating geometric series over the conilpotent
/// filtration and re-verified exactly before it is returned.
pub fn conv_inverse(sc: &SimplyColored, f: &ConvMap) -> Result<ConvMap, ConvError> {
    if f.source != *sc.coalgebra() {
        return Err(ConvError::Mismatch);
    }
    let a = &f.target;
    let field = f.matrix.field();
    let labels = sc.color_labels();
    let mut inverses = Vec::new();
    for (g, label) in sc.colors().iter().zip(&labels) {
        let fg = f.apply(g);
        match a.element_inverse(&fg) {
            Some(y) => inverses.push(y),
            None => return Err(ConvError::NotInvertibleOnColor(label.clone())),
        }
    }
    // g₀ inverts f on the colors and vanishes on the coideal: g₀ = (color
    // inverses) ∘ δ via the orthonormal idempotents.
    let fam = sc.ortho_idempotents();
    let mut g0 = Matrix::zero(field, a.dim(), sc.dim());
    for (y, e) in inverses.iter().zip(&fam.functionals) {
        let col = Matrix::column_vector(field, y.clone());
        let row = Matrix::row_vector(field, e.clone());
        g0 = g0.add(&col.mul(&row));
    }
    let g0 = ConvMap {
        source: f.source.clone(),
        target: a.clone(),
        matrix: g0,
    };
    let u = conv_unit(&f.source, a);
    let e = u.sub(&convolve(f, &g0)?)?;
    let bound = sc
        .conilpotency()
        .bound()
        .expect("validated instance is conilpotent");
    let mut series = u.clone();
    let mut term = u.clone();
    for _ in 0..bound {
        term = convolve(&term, &e)?;
        series = series.add(&term)?;
    }
    let h = convolve(&g0, &series)?;
    // The series argument is a proof obligation converted into a runtime
    // assertion; failure here is an implementation bug, not bad input.
    assert_eq!(
        convolve(f, &h)?.matrix,
        u.matrix,
        "convolution inverse verification failed (left)"
    );
    assert_eq!(
        convolve(&h, f)?.matrix,
        u.matrix,
        "convolution inverse verification failed (right)"
    );
    Ok(h)
}

/// The general decomposition form: any subcoalgebra F₀ with a chosen
/// complement M such that the iterated projections π^⊗n ∘ Δⁿ⁻¹ vanish
/// exhaustively. The vanishing hypothesis is checked by iteration before
/// anything else is attempted; the inverse of f|_F₀ is found by exhaustive
/// linear solve in Hom(F₀, A).
pub fn conv_inverse_with_decomposition(
    c: &Coalgebra,
    f0: &Subspace,
    m: &Subspace,
    f: &ConvMap,
) -> Result<ConvMap, ConvError> {
    if f.source != *c {
        return Err(ConvError::Mismatch);
    }
    let field = c.field();
    let dim = c.dim();
    let direct = f0.dim() + m.dim() == dim
        && f0.intersect(m).map(|i| i.is_zero()).unwrap_or(false);
    if !direct {
        return Err(ConvError::Mismatch);
    }
    if c.subcoalgebra_closure(f0) != *f0 {
        return Err(ConvError::Mismatch);
    }
    // Projection onto M along F₀.
    let basis = f0.basis_matrix().vstack(m.basis_matrix()).transpose();
    let basis_inv = basis.inverse().expect("direct sum decomposition");
    let selector = Matrix::from_entries(
        field,
        dim,
        dim,
        (f0.dim()..dim).map(|i| (i, i, field.one())),
    );
    let pi = basis.mul(&selector).mul(&basis_inv);

    // Vanishing hypothesis: K_n = ker(π^⊗n ∘ Δⁿ⁻¹) must exhaust C.
    let mut exhaust_at = None;
    let mut prev: Option<Subspace> = None;
    let mut pi_pow = pi.clone();
    let mut delta_pow = Matrix::identity(field, dim);
    for n in 1..=(dim + 1) {
        let k = pi_pow.mul(&delta_pow).kernel();
        if k.is_full() {
            exhaust_at = Some(n);
            break;
        }
        if prev.as_ref() == Some(&k) {
            break;
        }
        prev = Some(k);
        pi_pow = pi_pow.tensor(&pi);
        delta_pow = crate::coalgebra::iterate_comultiplication(
            &c.delta_matrix(),
            dim,
            n,
        );
    }
    let Some(n_exhaust) = exhaust_at else {
        return Err(ConvError::VanishingHypothesisFails);
    };

    // Invert f|_F₀ inside Hom(F₀, A) by exhaustive linear solve.
    let (f0_coalg, incl) = c.restrict(f0).expect("F₀ is a subcoalgebra");
    let f_res = ConvMap::new(&f0_coalg, &f.target, f.matrix.mul(&incl))?;
    let h0 = conv_inverse_by_linear_solve(&f_res).ok_or(ConvError::NotInvertibleOnBase)?;

    // Extend by zero on M and run the truncating geometric series.
    let onto_f0 = Matrix::identity(field, dim).sub(&pi);
    let coords = f0.coordinate_map();
    let g = ConvMap {
        source: c.clone(),
        target: f.target.clone(),
        matrix: h0.matrix.mul(&coords).mul(&onto_f0),
    };
    let u = conv_unit(c, &f.target);
    let e = u.sub(&convolve(f, &g)?)?;
    let mut series = u.clone();
    let mut term = u.clone();
    for _ in 0..n_exhaust.saturating_sub(1) {
        term = convolve(&term, &e)?;
        series = series.add(&term)?;
    }
    let h = convolve(&g, &series)?;
    assert_eq!(
        convolve(f, &h)?.matrix,
        u.matrix,
        "decomposition inverse verification failed (left)"
    );
    assert_eq!(
        convolve(&h, f)?.matrix,
        u.matrix,
        "decomposition inverse verification failed (right)"
    );
    Ok(h)
}

/// A bialgebra: a coalgebra and an algebra on one carrier with Δ and ε
/// algebra morphisms.
#[derive(Clone, PartialEq, Eq)]
pub struct Bialgebra {
    pub coalgebra: Coalgebra,
    pub algebra: Algebra,
}

impl Bialgebra {
    pub fn new(coalgebra: Coalgebra, algebra: Algebra) -> Result<Self, ConvError> {
        if coalgebra.dim() != algebra.dim() || coalgebra.field() != algebra.field() {
            return Err(ConvError::CarrierMismatch);
        }
        Ok(Bialgebra { coalgebra, algebra })
    }

    /// The four compatibility identities, exactly: Δ(1) = 1⊗1,
    /// Δ(xy) = Δ(x)Δ(y), ε(xy) = ε(x)ε(y), and ε(1) = 1.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        let field = self.coalgebra.field();
        let d = self.coalgebra.dim();
        let delta = self.coalgebra.delta_matrix();
        let eps = self.coalgebra.counit_matrix();
        let mult = self.algebra.mult_matrix();
        let unit = Matrix::column_vector(field, self.algebra.unit_vector().to_vec());

        let du = delta.mul(&unit);
        let uu = unit.tensor(&unit);
        report.push(
            "Δ(1) = 1⊗1",
            du == uu,
            (du != uu).then(|| "unit".to_string()),
        );

        let lhs = delta.mul(&mult);
        let mid = Matrix::identity(field, d)
            .tensor(&tensor_swap(field, d, d))
            .tensor(&Matrix::identity(field, d));
        let rhs = mult.tensor(&mult).mul(&mid).mul(&delta.tensor(&delta));
        report.push(
            "Δ(xy) = Δ(x)Δ(y)",
            lhs == rhs,
            (lhs != rhs).then(|| first_pair_witness(&self.coalgebra, &lhs, &rhs)),
        );

        let lhs = eps.mul(&mult);
        let rhs = eps.tensor(&eps);
        report.push(
            "ε(xy) = ε(x)ε(y)",
            lhs == rhs,
            (lhs != rhs).then(|| first_pair_witness(&self.coalgebra, &lhs, &rhs)),
        );

        let eu = eps.mul(&unit);
        report.push(
            "ε(1) = 1",
            eu == Matrix::identity(field, 1),
            (eu != Matrix::identity(field, 1)).then(|| "unit".to_string()),
        );
        report
    }
}

fn first_pair_witness(c: &Coalgebra, lhs: &Matrix, rhs: &Matrix) -> String {
    let diff = lhs.sub(rhs);
    let col = diff.entries().map(|(_, cc, _)| cc).min().unwrap_or(0);
    let d = c.dim();
    format!("{}·{}", c.basis_name(col / d), c.basis_name(col % d))
}

/// Antipode of a simply colored bialgebra: exists exactly when the colors
/// form a group under the product. The group axioms are checked exactly
/// over the declared colors; on success the antipode is the convolution
/// inverse of the identity.
pub fn antipode(b: &Bialgebra, sc: &SimplyColored) -> Result<ConvMap, ConvError> {
    if b.coalgebra != *sc.coalgebra() {
        return Err(ConvError::CarrierMismatch);
    }
    let labels = sc.color_labels();
    let colors = sc.colors();
    let find = |v: &[Scalar]| colors.iter().position(|g| g == v);
    if find(b.algebra.unit_vector()).is_none() {
        return Err(ConvError::NotAGroup(
            "the unit of the product is not a color".into(),
        ));
    }
    let mut inverse_of = vec![None; colors.len()];
    for (i, g) in colors.iter().enumerate() {
        for (j, h) in colors.iter().enumerate() {
            let prod = b.algebra.multiply(g, h);
            let Some(k) = find(&prod) else {
                return Err(ConvError::NotAGroup(format!(
                    "{}·{} is not a color",
                    labels[i], labels[j]
                )));
            };
            if colors[k] == b.algebra.unit_vector()
                && b.algebra.multiply(h, g) == b.algebra.unit_vector()
            {
                inverse_of[i] = Some(j);
            }
        }
    }
    if let Some(i) = inverse_of.iter().position(|x| x.is_none()) {
        return Err(ConvError::NotAGroup(format!(
            "{} has no inverse among the colors",
            labels[i]
        )));
    }
    let id = ConvMap::new(
        &b.coalgebra,
        &b.algebra,
        Matrix::identity(b.coalgebra.field(), b.coalgebra.dim()),
    )?;
    conv_inverse(sc, &id)
}

/// The group bialgebra of Z/n: set-like basis g⁰, …, gⁿ⁻¹ with
/// gⁱ·gʲ = g^{i+j mod n}.
pub fn cyclic_group_bialgebra(field: Field, n: usize) -> (Bialgebra, SimplyColored) {
    assert!(n >= 1);
    let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let coalgebra = crate::coalgebra::setlike_coalgebra(field, &name_refs).unwrap();
    let mult = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j, (i + j) % n, field.one())))
        .collect();
    let mut unit = vec![field.zero(); n];
    unit[0] = field.one();
    let algebra = Algebra::new(field, names, mult, unit).unwrap();
    let colors = (0..n)
        .map(|i| {
            let mut v = vec![field.zero(); n];
            v[i] = field.one();
            v
        })
        .collect();
    let sc = SimplyColored::new(
        coalgebra.clone(),
        colors,
        Matrix::identity(field, n),
    )
    .unwrap();
    (Bialgebra::new(coalgebra, algebra).unwrap(), sc)
}

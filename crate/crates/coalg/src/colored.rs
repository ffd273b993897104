//! Simply colored coalgebras: coalgebras with a retraction δ onto a
//! set-like subcoalgebra, the bicomodule coactions the retraction induces,
//! the reduced comultiplication Δ̄ = Δ − ω_r − ω_l, conilpotency
//! certificates, bigraded decompositions, and the equivalence with reduced
//! colored coalgebras.

use std::collections::BTreeMap;
use std::fmt;

use crate::coalgebra::{
    iterate_comultiplication, Coalgebra, CoalgebraError, CoalgebraMorphism,
};
use crate::coradical::{coradical, is_pointed, CoradicalError, Pointedness};
use crate::exactlin::{format_combination, Field, Matrix, Scalar, Subspace};
use crate::report::Report;

#[derive(Debug)]
pub enum ColoredError {
    Coalgebra(CoalgebraError),
    Coradical(CoradicalError),
    /// The retraction axioms fail; the report lists which.
    InvalidRetraction(Report),
    /// The coideal is not exhausted by the kernel chain of Δ̄.
    NotConilpotent,
    NotPointed(String),
    /// A reduced colored coalgebra violates one of its structure bullets.
    InvalidReduced(String),
    /// A morphism candidate violates bigrading or Δ̄-compatibility.
    IncompatibleMorphism(String),
}

impl fmt::Display for ColoredError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoredError::Coalgebra(e) => write!(f, "{e}"),
            ColoredError::Coradical(e) => write!(f, "{e}"),
            ColoredError::InvalidRetraction(r) => {
                write!(f, "invalid retraction:\n{r}")
            }
            ColoredError::NotConilpotent => write!(f, "coideal is not conilpotent"),
            ColoredError::NotPointed(w) => write!(f, "coalgebra is not pointed: {w}"),
            ColoredError::InvalidReduced(w) => write!(f, "invalid reduced colored coalgebra: {w}"),
            ColoredError::IncompatibleMorphism(w) => write!(f, "incompatible morphism: {w}"),
        }
    }
}

impl std::error::Error for ColoredError {}

impl From<CoalgebraError> for ColoredError {
    fn from(e: CoalgebraError) -> Self {
        ColoredError::Coalgebra(e)
    }
}

impl From<CoradicalError> for ColoredError {
    fn from(e: CoradicalError) -> Self {
        ColoredError::Coradical(e)
    }
}

/// A simply colored coalgebra: a coalgebra C, a list of set-like elements
/// (the colors, stored as carrier vectors), and an idempotent coalgebra
/// retraction δ: C → C with image exactly the span of the colors, whose
/// kernel is conilpotent under the reduced comultiplication.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplyColored {
    coalgebra: Coalgebra,
    colors: Vec<Vec<Scalar>>,
    retraction: Matrix,
    coideal: Subspace,
}

impl SimplyColored {
    /// Build and fully validate: set-like colors, retraction equations
    /// (1)–(3), the direct-sum decomposition, and conilpotency.
    pub fn new(
        coalgebra: Coalgebra,
        colors: Vec<Vec<Scalar>>,
        retraction: Matrix,
    ) -> Result<Self, ColoredError> {
        let sc = Self::new_unchecked(coalgebra, colors, retraction);
        let report = sc.check_retraction();
        if !report.passed() {
            return Err(ColoredError::InvalidRetraction(report));
        }
        if !sc.conilpotency().conilpotent {
            return Err(ColoredError::NotConilpotent);
        }
        Ok(sc)
    }

    /// Build without validation; used to construct deliberately broken
    /// instances for the checkers.
    pub fn new_unchecked(
        coalgebra: Coalgebra,
        colors: Vec<Vec<Scalar>>,
        retraction: Matrix,
    ) -> Self {
        assert_eq!(retraction.rows(), coalgebra.dim(), "retraction shape");
        assert_eq!(retraction.cols(), coalgebra.dim(), "retraction shape");
        let coideal = retraction.kernel();
        SimplyColored {
            coalgebra,
            colors,
            retraction,
            coideal,
        }
    }

    pub fn coalgebra(&self) -> &Coalgebra {
        &self.coalgebra
    }

    pub fn field(&self) -> Field {
        self.coalgebra.field()
    }

    pub fn dim(&self) -> usize {
        self.coalgebra.dim()
    }

    pub fn colors(&self) -> &[Vec<Scalar>] {
        &self.colors
    }

    pub fn retraction(&self) -> &Matrix {
        &self.retraction
    }

    /// The coideal I = ker δ.
    pub fn coideal(&self) -> &Subspace {
        &self.coideal
    }

    /// Printable names for the colors: the basis name when a color is a
    /// standard basis vector, a combination string otherwise.
    pub fn color_labels(&self) -> Vec<String> {
        self.colors
            .iter()
            .map(|v| self.coalgebra.format_vector(v))
            .collect()
    }

    /// The projection onto the coideal along the colors, π = id − δ.
    pub fn coideal_projection(&self) -> Matrix {
        Matrix::identity(self.field(), self.dim()).sub(&self.retraction)
    }

    /// Verify equations (1)–(3) for the retraction, that the declared colors
    /// are set-like and span the image of δ, and that the carrier splits as
    /// span(colors) ⊕ ker δ.
    pub fn check_retraction(&self) -> Report {
        let mut report = Report::new();
        let c = &self.coalgebra;
        let d = c.dim();
        let delta = c.delta_matrix();
        let eps = c.counit_matrix();
        let r = &self.retraction;

        let lhs = r.mul(r);
        push_map_identity(c, &mut report, "eq (1): δ∘δ = δ", &lhs, r);
        let lhs = eps.mul(r);
        push_map_identity(c, &mut report, "eq (2): ε∘δ = ε", &lhs, &eps);
        let lhs = delta.mul(r);
        let rhs = r.tensor(r).mul(&delta);
        push_map_identity(c, &mut report, "eq (3): Δ∘δ = (δ⊗δ)∘Δ", &lhs, &rhs);

        let bad: Vec<String> = self
            .colors
            .iter()
            .filter(|g| !c.is_setlike(g))
            .map(|g| c.format_vector(g))
            .collect();
        report.push(
            "colors are set-like",
            bad.is_empty(),
            (!bad.is_empty()).then(|| bad.join(", ")),
        );

        let span = Subspace::span(self.field(), d, self.colors.clone());
        let image = r.image();
        report.push(
            "image(δ) = span(colors)",
            span == image && span.dim() == self.colors.len(),
            (span != image || span.dim() != self.colors.len())
                .then(|| format!("image dim {}, span dim {}", image.dim(), span.dim())),
        );

        let direct = span.dim() + self.coideal.dim() == d
            && span.intersect(&self.coideal).map(|i| i.is_zero()).unwrap_or(false);
        report.push(
            "C = span(colors) ⊕ ker(δ)",
            direct,
            (!direct).then(|| {
                format!(
                    "span dim {} + kernel dim {} in dim {}",
                    span.dim(),
                    self.coideal.dim(),
                    d
                )
            }),
        );

        report
    }

    /// The induced bicomodule coactions ω_l = (δ⊗id)∘Δ and ω_r = (id⊗δ)∘Δ.
    pub fn coactions(&self) -> (Matrix, Matrix) {
        let delta = self.coalgebra.delta_matrix();
        let id = Matrix::identity(self.field(), self.dim());
        let omega_l = self.retraction.tensor(&id).mul(&delta);
        let omega_r = id.tensor(&self.retraction).mul(&delta);
        (omega_l, omega_r)
    }

    /// Verify equations (4)–(15): the comodule laws, the bicomodule
    /// commutation, the compatibilities with Δ, and the collapse chains on
    /// the set-like part. Every identity is an exact matrix equality.
    pub fn verify_bicomodule(&self) -> Report {
        let mut report = Report::new();
        let c = &self.coalgebra;
        let d = self.dim();
        let delta = c.delta_matrix();
        let eps = c.counit_matrix();
        let id = Matrix::identity(self.field(), d);
        let (wl, wr) = self.coactions();

        let checks: Vec<(&str, Matrix, Matrix)> = vec![
            (
                "eq (4): (ω_r⊗id)∘ω_r = (id⊗Δ)∘ω_r",
                wr.tensor(&id).mul(&wr),
                id.tensor(&delta).mul(&wr),
            ),
            ("eq (5): (id⊗ε)∘ω_r = id", id.tensor(&eps).mul(&wr), id.clone()),
            (
                "eq (6): (id⊗ω_l)∘ω_l = (Δ⊗id)∘ω_l",
                id.tensor(&wl).mul(&wl),
                delta.tensor(&id).mul(&wl),
            ),
            ("eq (7): (ε⊗id)∘ω_l = id", eps.tensor(&id).mul(&wl), id.clone()),
            (
                "eq (8): (ω_l⊗id)∘ω_r = (id⊗ω_r)∘ω_l",
                wl.tensor(&id).mul(&wr),
                id.tensor(&wr).mul(&wl),
            ),
            (
                "eq (9): (ω_r⊗id)∘Δ = (id⊗ω_l)∘Δ",
                wr.tensor(&id).mul(&delta),
                id.tensor(&wl).mul(&delta),
            ),
            (
                "eq (10): (id⊗Δ)∘ω_l = (ω_l⊗id)∘Δ",
                id.tensor(&delta).mul(&wl),
                wl.tensor(&id).mul(&delta),
            ),
            (
                "eq (11): (id⊗ω_r)∘Δ = (Δ⊗id)∘ω_r",
                id.tensor(&wr).mul(&delta),
                delta.tensor(&id).mul(&wr),
            ),
            (
                "eq (12a): (id⊗ω_r)∘ω_r = (id⊗ω_l)∘ω_r",
                id.tensor(&wr).mul(&wr),
                id.tensor(&wl).mul(&wr),
            ),
            (
                "eq (12b): (id⊗ω_l)∘ω_r = (id⊗Δ)∘ω_r",
                id.tensor(&wl).mul(&wr),
                id.tensor(&delta).mul(&wr),
            ),
            (
                "eq (12c): (id⊗Δ)∘ω_r = (ω_r⊗id)∘ω_r",
                id.tensor(&delta).mul(&wr),
                wr.tensor(&id).mul(&wr),
            ),
            (
                "eq (13a): (ω_l⊗id)∘ω_l = (ω_r⊗id)∘ω_l",
                wl.tensor(&id).mul(&wl),
                wr.tensor(&id).mul(&wl),
            ),
            (
                "eq (13b): (ω_r⊗id)∘ω_l = (Δ⊗id)∘ω_l",
                wr.tensor(&id).mul(&wl),
                delta.tensor(&id).mul(&wl),
            ),
            (
                "eq (13c): (Δ⊗id)∘ω_l = (id⊗ω_l)∘ω_l",
                delta.tensor(&id).mul(&wl),
                id.tensor(&wl).mul(&wl),
            ),
            (
                "eq (14): (id⊗Δ)∘ω_l = (ω_l⊗id)∘Δ",
                id.tensor(&delta).mul(&wl),
                wl.tensor(&id).mul(&delta),
            ),
            (
                "eq (15): (id⊗ω_r)∘Δ = (Δ⊗id)∘ω_r",
                id.tensor(&wr).mul(&delta),
                delta.tensor(&id).mul(&wr),
            ),
        ];
        for (label, lhs, rhs) in checks {
            push_map_identity(c, &mut report, label, &lhs, &rhs);
        }
        report
    }

    /// The reduced comultiplication Δ̄ = Δ − ω_r − ω_l as a dim²×dim matrix.
    pub fn reduced_delta(&self) -> Matrix {
        let (wl, wr) = self.coactions();
        self.coalgebra.delta_matrix().sub(&wr).sub(&wl)
    }

    /// Coassociativity of Δ̄: (Δ̄⊗id)Δ̄ = (id⊗Δ̄)Δ̄ as exact matrices.
    pub fn check_reduced_coassoc(&self) -> bool {
        let db = self.reduced_delta();
        let id = Matrix::identity(self.field(), self.dim());
        db.tensor(&id).mul(&db) == id.tensor(&db).mul(&db)
    }

    /// The conilpotency certificate: the ascending kernel chain
    /// Kₙ = ker(Δ̄ⁿ) ∩ I under the left-iterated convention, stopped at its
    /// fixed point, together with the per-basis index.
    pub fn conilpotency(&self) -> Conilpotency {
        conilpotency_of(&self.reduced_delta(), self.dim(), &self.coideal)
    }

    /// The orthonormal idempotent family {e_g}: the dual basis functional on
    /// span(colors) composed with δ, verified orthonormal in the dual
    /// algebra.
    pub fn ortho_idempotents(&self) -> OrthoIdempotents {
        let field = self.field();
        let s = self.colors.len();
        // T columns are the colors; any left inverse of T composed with δ
        // gives the dual functionals.
        let t = Matrix::from_rows(field, self.colors.clone()).transpose();
        let tt = t.transpose();
        let mut functionals = Vec::new();
        for g in 0..s {
            let mut e = vec![field.zero(); s];
            e[g] = field.one();
            let z = tt.solve(&e).expect("colors are linearly independent");
            let row = Matrix::row_vector(field, z).mul(&self.retraction);
            functionals.push(row.row_to_vec(0));
        }
        let out = OrthoIdempotents {
            functionals,
        };
        debug_assert!(self.verify_orthonormal(&out).passed());
        out
    }

    /// Check e_g·e_g = e_g, e_g·e_h = 0 and Σ e_g = ε in the dual algebra.
    pub fn verify_orthonormal(&self, fam: &OrthoIdempotents) -> Report {
        let mut report = Report::new();
        let field = self.field();
        let d = self.dim();
        let delta = self.coalgebra.delta_matrix();
        let conv = |a: &[Scalar], b: &[Scalar]| -> Vec<Scalar> {
            let ra = Matrix::row_vector(field, a.to_vec());
            let rb = Matrix::row_vector(field, b.to_vec());
            ra.tensor(&rb).mul(&delta).row_to_vec(0)
        };
        let labels = self.color_labels();
        for (i, e) in fam.functionals.iter().enumerate() {
            let ee = conv(e, e);
            report.push(
                format!("e_{}·e_{} = e_{}", labels[i], labels[i], labels[i]),
                ee == *e,
                (ee != *e).then(|| format_combination(self.coalgebra.basis_names(), &ee)),
            );
            for (j, f) in fam.functionals.iter().enumerate() {
                if i == j {
                    continue;
                }
                let ef = conv(e, f);
                let ok = ef.iter().all(|s| s.is_zero());
                report.push(
                    format!("e_{}·e_{} = 0", labels[i], labels[j]),
                    ok,
                    (!ok).then(|| format_combination(self.coalgebra.basis_names(), &ef)),
                );
            }
        }
        let mut total = vec![field.zero(); d];
        for e in &fam.functionals {
            for (t, v) in e.iter().enumerate() {
                total[t] = &total[t] + v;
            }
        }
        let eps = self.coalgebra.counit_vector().to_vec();
        report.push(
            "Σ e_g = ε",
            total == eps,
            (total != eps).then(|| format_combination(self.coalgebra.basis_names(), &total)),
        );
        report
    }

    /// The bigraded decomposition: component (g, h) is the image of
    /// x ↦ e_h·x·e_g, i.e. the elements with ω_l(x) = g⊗x and ω_r(x) = x⊗h.
    pub fn bigrading(&self) -> BTreeMap<(usize, usize), Subspace> {
        let fam = self.ortho_idempotents();
        let field = self.field();
        let d = self.dim();
        let (wl, wr) = self.coactions();
        let id = Matrix::identity(field, d);
        let mut out = BTreeMap::new();
        for g in 0..self.colors.len() {
            let r_g = Matrix::row_vector(field, fam.functionals[g].clone())
                .tensor(&id)
                .mul(&wl);
            for h in 0..self.colors.len() {
                let l_h = id
                    .tensor(&Matrix::row_vector(field, fam.functionals[h].clone()))
                    .mul(&wr);
                let proj = l_h.mul(&r_g);
                let comp = proj.image();
                if !comp.is_zero() {
                    out.insert((g, h), comp);
                }
            }
        }
        out
    }

    /// Verify the structural claims about the bigrading: the components are
    /// independent and sum to C, Δ respects the grading, the coideal is the
    /// sum of its homogeneous parts, and off-diagonal components lie in I.
    pub fn verify_bigrading(&self) -> Report {
        let mut report = Report::new();
        let field = self.field();
        let d = self.dim();
        let comps = self.bigrading();
        let zero = Subspace::zero(field, d);
        let mut total = zero.clone();
        let mut dim_sum = 0;
        for comp in comps.values() {
            total = total.sum(comp).expect("same ambient");
            dim_sum += comp.dim();
        }
        report.push(
            "components direct-sum to C",
            total.is_full() && dim_sum == d,
            (!(total.is_full() && dim_sum == d))
                .then(|| format!("sum dim {}, Σ dims {}", total.dim(), dim_sum)),
        );

        let s = self.colors.len();
        let delta = self.coalgebra.delta_matrix();
        let comp = |g: usize, h: usize| comps.get(&(g, h)).cloned().unwrap_or_else(|| zero.clone());
        let mut graded_ok = true;
        let mut witness = None;
        'outer: for (&(g, h), sub) in &comps {
            let mut target = Subspace::zero(field, d * d);
            for t in 0..s {
                target = target
                    .sum(&comp(g, t).tensor(&comp(t, h)))
                    .expect("same ambient");
            }
            for v in sub.basis_vectors() {
                if !target.contains(&delta.apply(&v)) {
                    graded_ok = false;
                    witness = Some(self.coalgebra.format_vector(&v));
                    break 'outer;
                }
            }
        }
        report.push("Δ(ᵍCʰ) ⊆ Σ_s ᵍCˢ⊗ˢCʰ", graded_ok, witness);

        let mut i_sum = zero.clone();
        for sub in comps.values() {
            i_sum = i_sum
                .sum(&sub.intersect(&self.coideal).expect("same ambient"))
                .expect("same ambient");
        }
        report.push(
            "I = ⊕ (ᵍCʰ ∩ I)",
            i_sum == self.coideal,
            (i_sum != self.coideal).then(|| format!("recovered dim {}", i_sum.dim())),
        );

        let mut off_ok = true;
        let mut off_witness = None;
        for (&(g, h), sub) in &comps {
            if g != h && !self.coideal.contains_subspace(sub) {
                off_ok = false;
                off_witness = Some(format!("component ({g},{h})"));
            }
        }
        report.push("ᵍCʰ ⊆ I for g ≠ h", off_ok, off_witness);

        report
    }

    /// The identity π^⊗(n+1) ∘ Δ̄ⁿ = π^⊗(n+1) ∘ Δⁿ on I, where π is the
    /// projection onto I along the colors.
    pub fn projection_identity_check(&self, n: usize) -> bool {
        let pi = self.coideal_projection();
        let mut pi_pow = pi.clone();
        for _ in 0..n {
            pi_pow = pi_pow.tensor(&pi);
        }
        let section = self.coideal.inclusion_map();
        let lhs = pi_pow
            .mul(&iterate_comultiplication(
                &self.reduced_delta(),
                self.dim(),
                n,
            ))
            .mul(&section);
        let rhs = pi_pow.mul(&self.coalgebra.delta_power(n)).mul(&section);
        lhs == rhs
    }

    /// Check that the colors are exactly the coradical: span(G) = C₀, and
    /// that the set-likes found by the pointedness test all lie in span(G).
    pub fn verify_pointed(&self) -> Result<Report, CoradicalError> {
        let mut report = Report::new();
        let c0 = coradical(&self.coalgebra)?;
        let span = Subspace::span(self.field(), self.dim(), self.colors.clone());
        report.push(
            "coradical(C) = span(G)",
            c0 == span,
            (c0 != span).then(|| format!("coradical dim {}, span dim {}", c0.dim(), span.dim())),
        );
        match is_pointed(&self.coalgebra)? {
            Pointedness::Pointed { setlikes } => {
                let stray: Vec<String> = setlikes
                    .iter()
                    .filter(|g| !span.contains(g))
                    .map(|g| self.coalgebra.format_vector(g))
                    .collect();
                report.push(
                    "no set-like outside span(G)",
                    stray.is_empty(),
                    (!stray.is_empty()).then(|| stray.join(", ")),
                );
                report.push(
                    "set-like count matches color count",
                    setlikes.len() == self.colors.len(),
                    (setlikes.len() != self.colors.len())
                        .then(|| format!("{} vs {}", setlikes.len(), self.colors.len())),
                );
            }
            other => {
                report.push_fail("coalgebra is pointed", format!("{other:?}"));
            }
        }
        Ok(report)
    }

    /// Pass to the reduced colored coalgebra (I, Δ̄) with its bigrading.
    pub fn reduce(&self) -> ReducedColored {
        let field = self.field();
        let i = &self.coideal;
        let m = i.dim();
        let e = i.coordinate_map();
        let s = i.inclusion_map();
        let db = self.reduced_delta();
        // Δ̄ lands in I⊗I on I, so coordinates can be extracted directly.
        debug_assert!({
            let ii = i.tensor(i);
            i.basis_vectors().iter().all(|v| ii.contains(&db.apply(v)))
        });
        let delta_bar = e.tensor(&e).mul(&db).mul(&s);
        let mut components = BTreeMap::new();
        for ((g, h), comp) in self.bigrading() {
            let part = comp.intersect(i).expect("same ambient");
            if part.is_zero() {
                continue;
            }
            let rows: Vec<Vec<Scalar>> = part.basis_vectors().iter().map(|v| e.apply(v)).collect();
            components.insert((g, h), Subspace::span(field, m, rows));
        }
        ReducedColored::new(field, m, self.color_labels(), components, delta_bar)
            .expect("reduction of a valid simply colored coalgebra")
    }
}

impl fmt::Debug for SimplyColored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SimplyColored(dim {}, colors [{}])",
            self.dim(),
            self.color_labels().join(", ")
        )
    }
}

fn push_map_identity(c: &Coalgebra, report: &mut Report, label: &str, lhs: &Matrix, rhs: &Matrix) {
    if lhs == rhs {
        report.push_ok(label);
    } else {
        report.push_fail(label, c.first_differing_basis(lhs, rhs));
    }
}

/// Orthonormal idempotents in the dual algebra: one functional per color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoIdempotents {
    /// For each color g, the functional e_g ∈ C* as a coefficient vector on
    /// the dual basis.
    pub functionals: Vec<Vec<Scalar>>,
}

/// Certificate of (non-)conilpotency: the ascending kernel chain and the
/// per-basis-vector indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conilpotency {
    pub conilpotent: bool,
    /// K₁ ⊆ K₂ ⊆ …, each a subspace of the ambient carrier contained in I,
    /// ending at the fixed point (the last strictly increasing term).
    pub chain: Vec<Subspace>,
    /// For each echelon basis vector of I, the least n with Δ̄ⁿ(x) = 0, or
    /// `None` when the element survives every iteration.
    pub indices: Vec<Option<usize>>,
}

impl Conilpotency {
    /// The global bound N with Δ̄ᴺ|_I = 0, when conilpotent.
    pub fn bound(&self) -> Option<usize> {
        if !self.conilpotent {
            return None;
        }
        Some(self.chain.len())
    }
}

pub(crate) fn conilpotency_of(delta_bar: &Matrix, dim: usize, coideal: &Subspace) -> Conilpotency {
    let mut chain: Vec<Subspace> = Vec::new();
    if coideal.dim() > 0 {
        let mut power = delta_bar.clone();
        let mut width = 2usize;
        loop {
            let k = power.kernel().intersect(coideal).expect("same ambient");
            if chain.last() == Some(&k) {
                break;
            }
            let done = &k == coideal;
            chain.push(k);
            if done {
                break;
            }
            let rest = Matrix::identity(delta_bar.field(), dim.pow((width - 1) as u32));
            power = delta_bar.tensor(&rest).mul(&power);
            width += 1;
        }
    }
    let conilpotent = coideal.dim() == 0 || chain.last().is_some_and(|k| k == coideal);
    let indices = coideal
        .basis_vectors()
        .iter()
        .map(|v| chain.iter().position(|k| k.contains(v)).map(|i| i + 1))
        .collect();
    Conilpotency {
        conilpotent,
        chain,
        indices,
    }
}

/// A counit-free conilpotent G-bigraded coalgebra (C̄, G): the image of a
/// simply colored coalgebra under the reduction functor.
#[derive(Clone, PartialEq, Eq)]
pub struct ReducedColored {
    field: Field,
    dim: usize,
    colors: Vec<String>,
    components: BTreeMap<(usize, usize), Subspace>,
    delta_bar: Matrix,
}

impl ReducedColored {
    /// Build and validate the three structure bullets: the components
    /// direct-sum to the carrier, Δ̄ is coassociative and respects the
    /// grading, and the carrier is conilpotent.
    pub fn new(
        field: Field,
        dim: usize,
        colors: Vec<String>,
        components: BTreeMap<(usize, usize), Subspace>,
        delta_bar: Matrix,
    ) -> Result<Self, ColoredError> {
        let rc = Self::new_unchecked(field, dim, colors, components, delta_bar);
        rc.validate().map(|_| rc)
    }

    pub fn new_unchecked(
        field: Field,
        dim: usize,
        colors: Vec<String>,
        components: BTreeMap<(usize, usize), Subspace>,
        delta_bar: Matrix,
    ) -> Self {
        assert_eq!(delta_bar.rows(), dim * dim, "Δ̄ shape");
        assert_eq!(delta_bar.cols(), dim, "Δ̄ shape");
        ReducedColored {
            field,
            dim,
            colors,
            components,
            delta_bar,
        }
    }

    fn validate(&self) -> Result<(), ColoredError> {
        let s = self.colors.len();
        let mut dim_sum = 0;
        let mut total = Subspace::zero(self.field, self.dim);
        for (&(g, h), comp) in &self.components {
            if g >= s || h >= s {
                return Err(ColoredError::InvalidReduced(format!(
                    "component ({g},{h}) references a missing color"
                )));
            }
            if comp.ambient_dim() != self.dim {
                return Err(ColoredError::InvalidReduced("component ambient mismatch".into()));
            }
            dim_sum += comp.dim();
            total = total.sum(comp).expect("same ambient");
        }
        if dim_sum != self.dim || !total.is_full() {
            return Err(ColoredError::InvalidReduced(format!(
                "components do not direct-sum to the carrier: Σ dims {dim_sum} vs {}",
                self.dim
            )));
        }
        for (&(g, h), comp) in &self.components {
            let mut target = Subspace::zero(self.field, self.dim * self.dim);
            for t in 0..s {
                target = target
                    .sum(&self.component(g, t).tensor(&self.component(t, h)))
                    .expect("same ambient");
            }
            for v in comp.basis_vectors() {
                if !target.contains(&self.delta_bar.apply(&v)) {
                    return Err(ColoredError::InvalidReduced(format!(
                        "Δ̄ violates the grading on component ({g},{h})"
                    )));
                }
            }
        }
        let id = Matrix::identity(self.field, self.dim);
        if self.delta_bar.tensor(&id).mul(&self.delta_bar)
            != id.tensor(&self.delta_bar).mul(&self.delta_bar)
        {
            return Err(ColoredError::InvalidReduced("Δ̄ is not coassociative".into()));
        }
        if !self.conilpotency().conilpotent {
            return Err(ColoredError::InvalidReduced("carrier is not conilpotent".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn delta_bar(&self) -> &Matrix {
        &self.delta_bar
    }

    pub fn components(&self) -> &BTreeMap<(usize, usize), Subspace> {
        &self.components
    }

    pub fn component(&self, g: usize, h: usize) -> Subspace {
        self.components
            .get(&(g, h))
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.field, self.dim))
    }

    pub fn conilpotency(&self) -> Conilpotency {
        conilpotency_of(
            &self.delta_bar,
            self.dim,
            &Subspace::full(self.field, self.dim),
        )
    }

    /// A basis of the carrier adapted to the bigrading: the concatenated
    /// echelon bases of the components in (g, h)-lexicographic order. Rows
    /// are vectors in the carrier coordinates; the second return value maps
    /// each row to its component key.
    pub fn adapted_basis(&self) -> (Matrix, Vec<(usize, usize)>) {
        let mut rows = Vec::new();
        let mut keys = Vec::new();
        for (&(g, h), comp) in &self.components {
            for v in comp.basis_vectors() {
                rows.push(v);
                keys.push((g, h));
            }
        }
        let m = if rows.is_empty() {
            Matrix::zero(self.field, 0, self.dim)
        } else {
            Matrix::from_rows(self.field, rows)
        };
        (m, keys)
    }
}

impl fmt::Debug for ReducedColored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ReducedColored(dim {}, colors [{}], {} components)",
            self.dim,
            self.colors.join(", "),
            self.components.len()
        )
    }
}

/// Result of the unreduction functor: the simply colored coalgebra together
/// with the adapted basis that identifies the reduced carrier with the
/// coideal coordinates.
pub struct Unreduced {
    pub object: SimplyColored,
    /// Rows are the adapted homogeneous basis vectors in the coordinates of
    /// the input `ReducedColored`, in the order used for the new carrier
    /// basis.
    pub adapted_basis: Matrix,
}

/// Rebuild a simply colored coalgebra from a reduced one: adjoin C\[G\],
/// extend ε by zero, and set Δ(x) = g⊗x + Δ̄(x) + x⊗h on a homogeneous x of
/// bidegree (g, h).
pub fn unreduce(rc: &ReducedColored) -> Result<Unreduced, ColoredError> {
    let field = rc.field();
    let s = rc.colors().len();
    let m = rc.dim();
    let (adapted, keys) = rc.adapted_basis();
    let total = s + m;

    // Δ̄ in adapted coordinates.
    let t = adapted.transpose(); // columns = adapted basis vectors, m×m
    let db_adapted = if m > 0 {
        let t_inv = t.inverse().expect("adapted basis spans the carrier");
        t_inv.tensor(&t_inv).mul(rc.delta_bar()).mul(&t)
    } else {
        Matrix::zero(field, 0, 0)
    };

    let mut names: Vec<String> = rc.colors().to_vec();
    for r in 0..m {
        let mut candidate = format!("x{r}");
        while names.contains(&candidate) {
            candidate.push('\'');
        }
        names.push(candidate);
    }

    let mut triples = Vec::new();
    let mut counit = Vec::new();
    for j in 0..s {
        triples.push((j, j, j, field.one()));
        counit.push(field.one());
    }
    for (r, &(g, h)) in keys.iter().enumerate() {
        let idx = s + r;
        triples.push((idx, g, idx, field.one()));
        triples.push((idx, idx, h, field.one()));
        for (row, col, v) in db_adapted.entries() {
            if col == r {
                triples.push((idx, s + row / m, s + row % m, v.clone()));
            }
        }
        counit.push(field.zero());
    }
    let coalgebra = Coalgebra::new(field, names, triples, counit)?;
    let retraction = Matrix::from_entries(
        field,
        total,
        total,
        (0..s).map(|j| (j, j, field.one())),
    );
    let colors = (0..s)
        .map(|j| {
            let mut v = vec![field.zero(); total];
            v[j] = field.one();
            v
        })
        .collect();
    let object = SimplyColored::new(coalgebra, colors, retraction)?;
    Ok(Unreduced {
        object,
        adapted_basis: adapted,
    })
}

/// Build a simply colored structure on a pointed coalgebra with a splitting:
/// the colors are the set-likes of the coradical, and δ must be an
/// idempotent coalgebra morphism onto the coradical. Conilpotency is then
/// re-verified rather than trusted.
pub fn from_pointed_with_splitting(
    c: &Coalgebra,
    delta: &Matrix,
) -> Result<SimplyColored, ColoredError> {
    let setlikes = match is_pointed(c)? {
        Pointedness::Pointed { setlikes } => setlikes,
        Pointedness::NotPointed { witness } => {
            return Err(ColoredError::NotPointed(witness));
        }
        Pointedness::PointedOnlyOverExtension => {
            return Err(ColoredError::NotPointed(
                "set-like basis exists only over an extension field".into(),
            ));
        }
    };
    let c0 = coradical(c)?;
    let image = delta.image();
    if image != c0 {
        let mut report = Report::new();
        report.push_fail(
            "image(δ) = coradical",
            format!("image dim {}, coradical dim {}", image.dim(), c0.dim()),
        );
        return Err(ColoredError::InvalidRetraction(report));
    }
    SimplyColored::new(c.clone(), setlikes, delta.clone())
}

/// Tensor product of simply colored coalgebras: the colors are the pairwise
/// tensors and the retraction is δ⊗δ, whose kernel is C⊗J + I⊗D. The result
/// is revalidated in full, conilpotency included.
pub fn tensor_simply_colored(
    a: &SimplyColored,
    b: &SimplyColored,
) -> Result<SimplyColored, ColoredError> {
    let coalgebra = crate::coalgebra::tensor_coalgebra(a.coalgebra(), b.coalgebra())?;
    let mut colors = Vec::new();
    for g in a.colors() {
        for h in b.colors() {
            let gm = Matrix::column_vector(a.field(), g.clone());
            let hm = Matrix::column_vector(b.field(), h.clone());
            colors.push(gm.tensor(&hm).column_to_vec(0));
        }
    }
    let retraction = a.retraction().tensor(b.retraction());
    SimplyColored::new(coalgebra, colors, retraction)
}

/// Extend a morphism of reduced colored coalgebras to a coalgebra morphism
/// of the unreduced objects: f(g) = i(g) on colors and f = f̄ on the
/// carrier. Fails if f̄ violates the bigrading along the color map or does
/// not commute with Δ̄.
pub fn extend_morphism(
    fbar: &Matrix,
    color_map: &[usize],
    src: &ReducedColored,
    dst: &ReducedColored,
) -> Result<CoalgebraMorphism, ColoredError> {
    check_colored_morphism(fbar, color_map, src, dst)?;
    let field = src.field();
    let src_un = unreduce(src)?;
    let dst_un = unreduce(dst)?;
    let s_src = src.colors().len();
    let s_dst = dst.colors().len();
    let m_src = src.dim();
    let m_dst = dst.dim();

    let mut items = Vec::new();
    for (g, &ig) in color_map.iter().enumerate() {
        items.push((ig, g, field.one()));
    }
    if m_src > 0 && m_dst > 0 {
        let t_src = src_un.adapted_basis.transpose();
        let t_dst = dst_un.adapted_basis.transpose();
        let f_adapted = t_dst
            .inverse()
            .expect("adapted basis spans the carrier")
            .mul(fbar)
            .mul(&t_src);
        for (r, c, v) in f_adapted.entries() {
            items.push((s_dst + r, s_src + c, v.clone()));
        }
    } else if m_src > 0 {
        // Target carrier is zero: f̄ must already be zero (checked above).
    }
    let matrix = Matrix::from_entries(
        field,
        s_dst + m_dst,
        s_src + m_src,
        items,
    );
    let morphism = CoalgebraMorphism::new(
        src_un.object.coalgebra(),
        dst_un.object.coalgebra(),
        matrix,
    )?;
    let report = morphism.validate();
    if !report.passed() {
        return Err(ColoredError::IncompatibleMorphism(format!(
            "extension is not a coalgebra morphism:\n{report}"
        )));
    }
    Ok(morphism)
}

/// Validate the two conditions on a reduced colored morphism (f̄, i):
/// homogeneity f̄(ᵍC̄ʰ) ⊆ components (i(g), i(h)) and Δ̄∘f̄ = (f̄⊗f̄)∘Δ̄.
pub fn check_colored_morphism(
    fbar: &Matrix,
    color_map: &[usize],
    src: &ReducedColored,
    dst: &ReducedColored,
) -> Result<(), ColoredError> {
    if color_map.len() != src.colors().len() {
        return Err(ColoredError::IncompatibleMorphism(
            "color map length mismatch".into(),
        ));
    }
    if color_map.iter().any(|&i| i >= dst.colors().len()) {
        return Err(ColoredError::IncompatibleMorphism(
            "color map target out of range".into(),
        ));
    }
    if fbar.rows() != dst.dim() || fbar.cols() != src.dim() {
        return Err(ColoredError::IncompatibleMorphism(format!(
            "matrix shape {}x{} does not match {} -> {}",
            fbar.rows(),
            fbar.cols(),
            src.dim(),
            dst.dim()
        )));
    }
    for (&(g, h), comp) in src.components() {
        let target = dst.component(color_map[g], color_map[h]);
        for v in comp.basis_vectors() {
            let fv = fbar.apply(&v);
            if !target.contains(&fv) {
                return Err(ColoredError::IncompatibleMorphism(format!(
                    "f̄ maps component ({g},{h}) outside component ({},{})",
                    color_map[g], color_map[h]
                )));
            }
        }
    }
    let lhs = dst.delta_bar().mul(fbar);
    let rhs = fbar.tensor(fbar).mul(src.delta_bar());
    if lhs != rhs {
        return Err(ColoredError::IncompatibleMorphism(
            "f̄ does not commute with Δ̄".into(),
        ));
    }
    Ok(())
}

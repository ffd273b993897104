//! Categorical constructions for (reduced) colored coalgebras: coproducts
//! and equalizers of simply colored coalgebras, coequalizers of reduced
//! colored coalgebras via color merging, and finite products truncated
//! inside a cofree cotensor coalgebra.

use std::collections::BTreeMap;
use std::fmt;

use crate::coalgebra::{direct_sum, CoalgebraError, CoalgebraMorphism};
use crate::colored::{check_colored_morphism, ColoredError, ReducedColored, SimplyColored};
use crate::constructions::{cotensor_coalgebra, Bicomodule, ConstructError};
use crate::exactlin::{Matrix, Scalar, Subspace};
use crate::report::Report;

#[derive(Debug)]
pub enum CategoryError {
    Coalgebra(CoalgebraError),
    Colored(ColoredError),
    Construct(ConstructError),
    /// The two morphisms do not form a parallel pair.
    NotParallel,
    /// A morphism fails the simply-colored (δ-compatibility) condition.
    NotColoredMorphism(String),
    EmptyProduct,
    ZeroTruncation,
    /// The image of f − g is not a graded coideal, so the coequalizer
    /// quotient is undefined.
    NotAGradedCoideal(String),
}

impl fmt::Display for CategoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CategoryError::Coalgebra(e) => write!(f, "{e}"),
            CategoryError::Colored(e) => write!(f, "{e}"),
            CategoryError::Construct(e) => write!(f, "{e}"),
            CategoryError::NotParallel => write!(f, "morphisms do not form a parallel pair"),
            CategoryError::NotColoredMorphism(w) => {
                write!(f, "not a morphism of colored coalgebras: {w}")
            }
            CategoryError::EmptyProduct => write!(f, "product of an empty family"),
            CategoryError::ZeroTruncation => write!(f, "truncation degree must be at least 1"),
            CategoryError::NotAGradedCoideal(w) => write!(f, "Im(f − g) is not a graded coideal: {w}"),
        }
    }
}

impl std::error::Error for CategoryError {}

impl From<CoalgebraError> for CategoryError {
    fn from(e: CoalgebraError) -> Self {
        CategoryError::Coalgebra(e)
    }
}

impl From<ColoredError> for CategoryError {
    fn from(e: ColoredError) -> Self {
        CategoryError::Colored(e)
    }
}

impl From<ConstructError> for CategoryError {
    fn from(e: ConstructError) -> Self {
        CategoryError::Construct(e)
    }
}

/// A morphism of reduced colored coalgebras: a pair (f̄, i) of a carrier map
/// homogeneous along the color map i, commuting with Δ̄.
#[derive(Clone, PartialEq, Eq)]
pub struct ColoredMorphism {
    pub fbar: Matrix,
    pub color_map: Vec<usize>,
}

impl ColoredMorphism {
    pub fn new(
        fbar: Matrix,
        color_map: Vec<usize>,
        src: &ReducedColored,
        dst: &ReducedColored,
    ) -> Result<Self, CategoryError> {
        check_colored_morphism(&fbar, &color_map, src, dst)
            .map_err(|e| CategoryError::NotColoredMorphism(e.to_string()))?;
        Ok(ColoredMorphism { fbar, color_map })
    }

    pub fn identity(rc: &ReducedColored) -> Self {
        ColoredMorphism {
            fbar: Matrix::identity(rc.field(), rc.dim()),
            color_map: (0..rc.colors().len()).collect(),
        }
    }
}

impl fmt::Debug for ColoredMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ColoredMorphism({}x{}, colors {:?})",
            self.fbar.rows(),
            self.fbar.cols(),
            self.color_map
        )
    }
}

/// Check that a coalgebra morphism between simply colored objects respects
/// the splittings: μ ∘ f = f ∘ δ.
pub fn simply_colored_morphism_check(
    src: &SimplyColored,
    dst: &SimplyColored,
    f: &CoalgebraMorphism,
) -> Report {
    let mut report = f.validate();
    let lhs = dst.retraction().mul(&f.matrix);
    let rhs = f.matrix.mul(src.retraction());
    report.push(
        "splitting compatibility: μ∘f = f∘δ",
        lhs == rhs,
        (lhs != rhs).then(|| src.coalgebra().first_differing_basis(&lhs, &rhs)),
    );
    report
}

/// Coproduct of simply colored coalgebras: the direct sum with concatenated
/// colors and block-diagonal splitting, together with the injections.
pub fn coproduct(
    parts: &[SimplyColored],
) -> Result<(SimplyColored, Vec<CoalgebraMorphism>), CategoryError> {
    let coalgebras: Vec<_> = parts.iter().map(|sc| sc.coalgebra().clone()).collect();
    let (total, injections) = direct_sum(&coalgebras)?;
    let field = total.field();
    let dim = total.dim();
    let mut colors = Vec::new();
    let mut delta_items = Vec::new();
    let mut offset = 0;
    for sc in parts {
        for g in sc.colors() {
            let mut v = vec![field.zero(); dim];
            for (i, x) in g.iter().enumerate() {
                v[offset + i] = x.clone();
            }
            colors.push(v);
        }
        for (r, c, val) in sc.retraction().entries() {
            delta_items.push((offset + r, offset + c, val.clone()));
        }
        offset += sc.dim();
    }
    let retraction = Matrix::from_entries(field, dim, dim, delta_items);
    let object = SimplyColored::new(total, colors, retraction)?;
    Ok((object, injections))
}

/// The equalizer of a parallel pair of simply colored morphisms: the
/// largest subcoalgebra of ker(f − g), carrying the restricted splitting
/// and colors, with its inclusion.
pub struct Equalizer {
    pub subspace: Subspace,
    pub object: SimplyColored,
    pub inclusion: CoalgebraMorphism,
}

pub fn equalizer(
    src: &SimplyColored,
    dst: &SimplyColored,
    f: &CoalgebraMorphism,
    g: &CoalgebraMorphism,
) -> Result<Equalizer, CategoryError> {
    if f.source != *src.coalgebra()
        || g.source != *src.coalgebra()
        || f.target != *dst.coalgebra()
        || g.target != *dst.coalgebra()
    {
        return Err(CategoryError::NotParallel);
    }
    for (name, m) in [("f", f), ("g", g)] {
        let report = simply_colored_morphism_check(src, dst, m);
        if !report.passed() {
            return Err(CategoryError::NotColoredMorphism(format!("{name}:\n{report}")));
        }
    }
    let c = src.coalgebra();
    let ker = f.matrix.sub(&g.matrix).kernel();
    let e = c.subcoalgebra_closure(&ker);
    let (sub, incl) = c.restrict(&e).expect("closure is a subcoalgebra");

    // The splitting restricts to the subcoalgebra.
    let coords = e.coordinate_map();
    for v in e.basis_vectors() {
        let dv = src.retraction().apply(&v);
        if !e.contains(&dv) {
            return Err(CategoryError::NotColoredMorphism(
                "splitting does not restrict to the equalizer subspace".into(),
            ));
        }
    }
    let delta_e = coords.mul(src.retraction()).mul(&incl);
    let colors_e: Vec<Vec<Scalar>> = src
        .colors()
        .iter()
        .filter(|g| e.contains(g))
        .map(|g| e.coordinates(g).expect("color inside the subspace"))
        .collect();
    let object = SimplyColored::new(sub.clone(), colors_e, delta_e)?;
    let inclusion = CoalgebraMorphism::new(&sub, c, incl)?;
    Ok(Equalizer {
        subspace: e,
        object,
        inclusion,
    })
}

/// Union–find over color indices; merges are by smaller root so the class
/// representatives are deterministic.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
    }

    /// Class index of every element, with classes numbered 0.. in order of
    /// their smallest member.
    pub fn classes(&self) -> Vec<usize> {
        let n = self.parent.len();
        let mut roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        let mut order: Vec<usize> = roots.clone();
        order.sort_unstable();
        order.dedup();
        for r in roots.iter_mut() {
            *r = order.binary_search(r).unwrap();
        }
        roots
    }
}

/// The coequalizer of a parallel pair of reduced colored morphisms: merge
/// colors by the relation a(x) ∼ b(x), regrade by merged colors, and
/// quotient by Im(f − g), which is a graded coideal in the merged grading.
pub struct Coequalizer {
    pub object: ReducedColored,
    pub projection: ColoredMorphism,
    /// For each color of the target, the index of its merged class.
    pub color_classes: Vec<usize>,
}

pub fn coequalizer_reduced(
    src: &ReducedColored,
    dst: &ReducedColored,
    f: &ColoredMorphism,
    g: &ColoredMorphism,
) -> Result<Coequalizer, CategoryError> {
    check_colored_morphism(&f.fbar, &f.color_map, src, dst)
        .map_err(|e| CategoryError::NotColoredMorphism(e.to_string()))?;
    check_colored_morphism(&g.fbar, &g.color_map, src, dst)
        .map_err(|e| CategoryError::NotColoredMorphism(e.to_string()))?;

    let field = dst.field();
    let s = dst.colors().len();
    let mut uf = UnionFind::new(s);
    for x in 0..src.colors().len() {
        uf.union(f.color_map[x], g.color_map[x]);
    }
    let classes = uf.classes();
    let n_classes = classes.iter().max().map_or(0, |m| m + 1);
    let merged_labels: Vec<String> = (0..n_classes)
        .map(|cl| {
            let members: Vec<&str> = (0..s)
                .filter(|&i| classes[i] == cl)
                .map(|i| dst.colors()[i].as_str())
                .collect();
            members.join("~")
        })
        .collect();

    // Merged components of the target.
    let mut merged: BTreeMap<(usize, usize), Subspace> = BTreeMap::new();
    for (&(a, b), comp) in dst.components() {
        let key = (classes[a], classes[b]);
        let entry = merged
            .entry(key)
            .or_insert_with(|| Subspace::zero(field, dst.dim()));
        *entry = entry.sum(comp).expect("same ambient");
    }

    // Im(f − g) must decompose along the merged grading and be a coideal
    // for Δ̄ (no counit condition in the reduced world).
    let im = f.fbar.sub(&g.fbar).image();
    let mut graded_sum = Subspace::zero(field, dst.dim());
    for comp in merged.values() {
        graded_sum = graded_sum
            .sum(&im.intersect(comp).expect("same ambient"))
            .expect("same ambient");
    }
    if graded_sum != im {
        return Err(CategoryError::NotAGradedCoideal(format!(
            "homogeneous parts recover dimension {} of {}",
            graded_sum.dim(),
            im.dim()
        )));
    }
    let full = Subspace::full(field, dst.dim());
    let coideal_target = im.tensor(&full).sum(&full.tensor(&im)).expect("same ambient");
    for v in im.basis_vectors() {
        if !coideal_target.contains(&dst.delta_bar().apply(&v)) {
            return Err(CategoryError::NotAGradedCoideal(
                "Δ̄(Im) leaves Im⊗D̄ + D̄⊗Im".into(),
            ));
        }
    }

    // Quotient carrier and structure.
    let q = im.quotient_map();
    let sec = im.quotient_section();
    let q_dim = q.rows();
    let delta_bar_q = q.tensor(&q).mul(dst.delta_bar()).mul(&sec);
    let mut components_q = BTreeMap::new();
    for (&key, comp) in &merged {
        let rows: Vec<Vec<Scalar>> = comp.basis_vectors().iter().map(|v| q.apply(v)).collect();
        let image = Subspace::span(field, q_dim, rows);
        if !image.is_zero() {
            components_q.insert(key, image);
        }
    }
    let object = ReducedColored::new(field, q_dim, merged_labels, components_q, delta_bar_q)?;
    let projection = ColoredMorphism::new(q.clone(), classes.clone(), dst, &object)?;
    // The projection coequalizes by construction; keep the exactness check.
    assert_eq!(
        q.mul(&f.fbar),
        q.mul(&g.fbar),
        "projection fails to coequalize"
    );
    Ok(Coequalizer {
        object,
        projection,
        color_classes: classes,
    })
}

/// A finite product of reduced colored coalgebras, truncated at a word
/// length: the largest sub-reduced-colored-coalgebra of the cofree cotensor
/// coalgebra over the colored product space on which every composite
/// projection commutes with Δ̄. Exact within the declared truncation regime
/// and flagged approximate beyond it.
pub struct Product {
    pub object: ReducedColored,
    pub projections: Vec<ColoredMorphism>,
    pub truncation: usize,
    /// Always true: fidelity beyond cones of filtration degree ≤ truncation
    /// is not claimed.
    pub approximate: bool,
    pub(crate) slots: ProductSlots,
}

impl Product {
    /// The product object as a subspace of the reduced cotensor carrier;
    /// exposed so test oracles can phrase constraints in word coordinates.
    pub fn word_subspace(&self) -> &Subspace {
        &self.slots.word_subspace
    }
}

/// Bookkeeping for the colored product space V = ⊕_key ∏_α components: one
/// slot per (key, factor, component basis vector).
pub(crate) struct ProductSlots {
    pub keys: Vec<(Vec<usize>, Vec<usize>)>,
    pub slot_info: Vec<(usize, usize, usize)>, // (key index, factor, basis index)
    pub bicomodule: Bicomodule,
    pub word_subspace: Subspace,         // the product object inside the reduced cotensor carrier
    pub reduced_cot: ReducedColored,
}

/// Cartesian product of color index sets, tuples in lexicographic order.
fn color_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::new();
        for t in &out {
            for i in 0..s {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

pub fn product_truncated(
    factors: &[ReducedColored],
    max_words: usize,
) -> Result<Product, CategoryError> {
    if factors.is_empty() {
        return Err(CategoryError::EmptyProduct);
    }
    if max_words == 0 {
        return Err(CategoryError::ZeroTruncation);
    }
    let field = factors[0].field();
    if factors.iter().any(|rc| rc.field() != field) {
        return Err(CategoryError::Colored(ColoredError::IncompatibleMorphism(
            "mixed ground fields".into(),
        )));
    }
    let sizes: Vec<usize> = factors.iter().map(|rc| rc.colors().len()).collect();
    let tuples = color_tuples(&sizes);
    let tuple_label = |t: &[usize]| -> String {
        let parts: Vec<&str> = t
            .iter()
            .enumerate()
            .map(|(alpha, &i)| factors[alpha].colors()[i].as_str())
            .collect();
        format!("({})", parts.join(","))
    };
    let tuple_index = |t: &[usize]| tuples.iter().position(|u| u == t).unwrap();

    // Slots of the colored product space: the component of V at a key
    // (ĝ, ĥ) is the direct product over factors of their (g_α, h_α)
    // components, so each slot remembers its key, factor and basis index.
    let mut keys = Vec::new();
    let mut slot_info = Vec::new();
    let mut slot_vectors: Vec<Vec<Vec<Scalar>>> = Vec::new(); // per slot, the factor-basis vector
    for gt in &tuples {
        for ht in &tuples {
            let key_idx = keys.len();
            keys.push((gt.clone(), ht.clone()));
            for (alpha, rc) in factors.iter().enumerate() {
                let comp = rc.component(gt[alpha], ht[alpha]);
                for (bi, v) in comp.basis_vectors().into_iter().enumerate() {
                    slot_info.push((key_idx, alpha, bi));
                    slot_vectors.push(vec![v]);
                }
            }
        }
    }
    let dim_v = slot_info.len();

    // Coactions: every slot is homogeneous of its key's bidegree.
    let n_tuples = tuples.len();
    let rho_l = Matrix::from_entries(
        field,
        n_tuples * dim_v,
        dim_v,
        slot_info.iter().enumerate().map(|(slot, &(key, _, _))| {
            let (gt, _) = &keys[key];
            (tuple_index(gt) * dim_v + slot, slot, field.one())
        }),
    );
    let rho_r = Matrix::from_entries(
        field,
        dim_v * n_tuples,
        dim_v,
        slot_info.iter().enumerate().map(|(slot, &(key, _, _))| {
            let (_, ht) = &keys[key];
            (slot * n_tuples + tuple_index(ht), slot, field.one())
        }),
    );
    let labels: Vec<String> = tuples.iter().map(|t| tuple_label(t)).collect();
    let bicomodule = Bicomodule::new(field, labels, dim_v, rho_l, rho_r)
        .expect("colored product space is a bicomodule");

    // Factor projections p̃_α: V → C̄_α read the α-entry of each slot.
    let factor_projections: Vec<Matrix> = factors
        .iter()
        .enumerate()
        .map(|(alpha, rc)| {
            let mut items = Vec::new();
            for (slot, &(key, a, _)) in slot_info.iter().enumerate() {
                if a != alpha {
                    continue;
                }
                let (gt, ht) = &keys[key];
                let comp = rc.component(gt[alpha], ht[alpha]);
                let v = &comp.basis_vectors()[slot_info[slot].2];
                for (i, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        items.push((i, slot, x.clone()));
                    }
                }
            }
            Matrix::from_entries(field, rc.dim(), dim_v, items)
        })
        .collect();

    // Cofree cotensor coalgebra over V, reduced.
    let cot = cotensor_coalgebra(&bicomodule, max_words)?;
    let rcot = cot.colored.reduce();
    let rdim = rcot.dim();
    // The reduced carrier is the word part of the cotensor coalgebra; word
    // length n occupies the contiguous block starting at offsets[n] − s.
    let s = n_tuples;
    let word1 = Matrix::from_entries(
        field,
        dim_v,
        rdim,
        (0..dim_v).map(|i| (i, cot.offsets.get(1).map_or(0, |o| o - s) + i, field.one())),
    );

    // Composite projections on the reduced cotensor carrier.
    let q_maps: Vec<Matrix> = factor_projections
        .iter()
        .map(|p| p.mul(&word1))
        .collect();

    // Largest graded Δ̄-closed subspace on which each q_α is a morphism of
    // counit-free coalgebras.
    let mut w = Subspace::full(field, rdim);
    for (alpha, q) in q_maps.iter().enumerate() {
        let phi = factors[alpha]
            .delta_bar()
            .mul(q)
            .sub(&q.tensor(q).mul(rcot.delta_bar()));
        w = w.intersect(&phi.kernel()).expect("same ambient");
    }
    loop {
        // Graded part.
        let mut graded = Subspace::zero(field, rdim);
        for comp in rcot.components().values() {
            graded = graded
                .sum(&w.intersect(comp).expect("same ambient"))
                .expect("same ambient");
        }
        // Δ̄-closure step.
        let target = graded.tensor(&graded);
        let pre = rcot.delta_bar().preimage(&target).expect("same ambient");
        let next = graded.intersect(&pre).expect("same ambient");
        if next == w {
            break;
        }
        w = next;
    }

    // Assemble the product object on the subspace basis.
    let e_w = w.coordinate_map();
    let s_w = w.inclusion_map();
    let delta_bar_d = e_w.tensor(&e_w).mul(rcot.delta_bar()).mul(&s_w);
    let mut components_d = BTreeMap::new();
    for (&key, comp) in rcot.components() {
        let part = comp.intersect(&w).expect("same ambient");
        if part.is_zero() {
            continue;
        }
        let rows: Vec<Vec<Scalar>> = part.basis_vectors().iter().map(|v| e_w.apply(v)).collect();
        components_d.insert(key, Subspace::span(field, w.dim(), rows));
    }
    let object = ReducedColored::new(
        field,
        w.dim(),
        rcot.colors().to_vec(),
        components_d,
        delta_bar_d,
    )?;
    let mut projections = Vec::new();
    for (alpha, q) in q_maps.iter().enumerate() {
        let fbar = q.mul(&s_w);
        let color_map: Vec<usize> = tuples.iter().map(|t| t[alpha]).collect();
        projections.push(ColoredMorphism::new(
            fbar,
            color_map,
            &object,
            &factors[alpha],
        )?);
    }
    Ok(Product {
        object,
        projections,
        truncation: max_words,
        approximate: true,
        slots: ProductSlots {
            keys,
            slot_info,
            bicomodule,
            word_subspace: w,
            reduced_cot: rcot,
        },
    })
}

/// The pairing map of a cone into a truncated product: the unique colored
/// morphism through the product with the given leg maps, built word degree
/// by word degree. Fails when the cone's filtration degree exceeds the
/// truncation.
pub fn product_pairing(
    product: &Product,
    factors: &[ReducedColored],
    cone_source: &ReducedColored,
    legs: &[ColoredMorphism],
) -> Result<ColoredMorphism, CategoryError> {
    assert_eq!(legs.len(), factors.len(), "one leg per factor");
    for (leg, rc) in legs.iter().zip(factors) {
        check_colored_morphism(&leg.fbar, &leg.color_map, cone_source, rc)
            .map_err(|e| CategoryError::NotColoredMorphism(e.to_string()))?;
    }
    let field = cone_source.field();
    let slots = &product.slots;
    let tuples: Vec<Vec<usize>> = {
        let mut seen = Vec::new();
        for (gt, _) in &slots.keys {
            if !seen.contains(gt) {
                seen.push(gt.clone());
            }
        }
        seen
    };
    let tuple_index = |t: &[usize]| tuples.iter().position(|u| u == t).unwrap();
    let xi: Vec<usize> = (0..cone_source.colors().len())
        .map(|g| {
            let t: Vec<usize> = legs.iter().map(|l| l.color_map[g]).collect();
            tuple_index(&t)
        })
        .collect();

    // f: T̄ → V puts ψ_α(x) into the α-slot of the key (ξ̂(g), ξ̂(h)) for
    // homogeneous x. Built on the adapted (homogeneous) basis, then
    // converted to the carrier coordinates.
    let dim_v = slots.slot_info.len();
    let (adapted, adapted_keys) = cone_source.adapted_basis();
    let mut f_items: Vec<(usize, usize, Scalar)> = Vec::new();
    for (a_idx, &(g, h)) in adapted_keys.iter().enumerate() {
        let v = adapted.row_to_vec(a_idx);
        let gt: Vec<usize> = legs.iter().map(|l| l.color_map[g]).collect();
        let ht: Vec<usize> = legs.iter().map(|l| l.color_map[h]).collect();
        let key_idx = slots
            .keys
            .iter()
            .position(|(a, b)| *a == gt && *b == ht)
            .expect("key exists");
        for (alpha, leg) in legs.iter().enumerate() {
            let image = leg.fbar.apply(&v);
            let target_comp = factors[alpha].component(gt[alpha], ht[alpha]);
            let coords = target_comp
                .coordinates(&image)
                .expect("leg respects the bigrading");
            for (bi, c) in coords.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let slot = slots
                    .slot_info
                    .iter()
                    .position(|&(k, a, b)| k == key_idx && a == alpha && b == bi)
                    .expect("slot exists");
                f_items.push((slot, a_idx, c));
            }
        }
    }
    let f_adapted = Matrix::from_entries(field, dim_v, cone_source.dim(), f_items);
    let f = if cone_source.dim() > 0 {
        let t = adapted.transpose();
        f_adapted.mul(&t.inverse().expect("adapted basis spans the carrier"))
    } else {
        f_adapted
    };

    // Word components fⁿ = f^⊗n ∘ Δ̄ⁿ⁻¹ assembled into the reduced cotensor
    // coordinates.
    let rcot = &slots.reduced_cot;
    let rdim = rcot.dim();
    let mut items = Vec::new();
    let mut f_pow = f.clone();
    let mut db_pow = Matrix::identity(field, cone_source.dim());
    let mut offset = 0usize;
    for n in 1..=product.truncation {
        let word_map = f_pow.mul(&db_pow);
        // Coordinates inside the cotensor power; the word blocks are laid
        // out contiguously by length in the reduced carrier.
        let pk = product_cotensor_power(&slots.bicomodule, n);
        let pk_dim = pk.dim();
        for col in 0..cone_source.dim() {
            let v = word_map.column_to_vec(col);
            if v.iter().all(|s| s.is_zero()) {
                continue;
            }
            let coords = pk.coordinates(&v).ok_or_else(|| {
                CategoryError::NotColoredMorphism(
                    "cone image leaves the cotensor subspace".into(),
                )
            })?;
            for (ci, c) in coords.into_iter().enumerate() {
                if !c.is_zero() {
                    items.push((offset + ci, col, c));
                }
            }
        }
        offset += pk_dim;
        if n < product.truncation {
            f_pow = f_pow.tensor(&f);
            let width = cone_source.dim().pow((n - 1) as u32);
            db_pow = cone_source
                .delta_bar()
                .tensor(&Matrix::identity(field, width.max(1)))
                .mul(&db_pow);
        }
    }
    if offset != rdim {
        return Err(CategoryError::NotColoredMorphism(
            "word blocks do not fill the reduced carrier".into(),
        ));
    }
    let into_rcot = Matrix::from_entries(field, rdim, cone_source.dim(), items);
    // The image must land in the product subobject.
    let w = &slots.word_subspace;
    for col in 0..cone_source.dim() {
        if !w.contains(&into_rcot.column_to_vec(col)) {
            return Err(CategoryError::NotColoredMorphism(
                "cone pairing leaves the product subobject (filtration degree exceeds the truncation?)"
                    .into(),
            ));
        }
    }
    let fbar = w.coordinate_map().mul(&into_rcot);
    ColoredMorphism::new(fbar, xi, cone_source, &product.object)
}

fn product_cotensor_power(m: &Bicomodule, n: usize) -> Subspace {
    let field = m.field();
    let dim = m.dim();
    if n == 1 {
        return Subspace::full(field, dim);
    }
    let id = Matrix::identity(field, dim);
    let d = m.rho_r().tensor(&id).sub(&id.tensor(m.rho_l()));
    let mut space = Subspace::full(field, dim.pow(n as u32));
    for pos in 1..n {
        let left = Matrix::identity(field, dim.pow((pos - 1) as u32));
        let right = Matrix::identity(field, dim.pow((n - pos - 1) as u32));
        space = space
            .intersect(&left.tensor(&d).tensor(&right).kernel())
            .expect("same ambient");
    }
    space
}


#[cfg(test)]
mod oblique_component_tests {
    use super::*;
    use crate::exactlin::Field;
    use std::collections::BTreeMap;

    #[test]
    fn product_pairing_handles_oblique_components() {
        // A reduced object whose homogeneous components are spanned by
        // (1,1) and (1,−1) rather than coordinate vectors.
        let field = Field::Q;
        let one = field.one();
        let mut components = BTreeMap::new();
        components.insert(
            (0, 0),
            Subspace::span(field, 2, vec![vec![one.clone(), one.clone()]]),
        );
        components.insert(
            (1, 1),
            Subspace::span(field, 2, vec![vec![one.clone(), -&one]]),
        );
        let rc = ReducedColored::new(
            field,
            2,
            vec!["g".into(), "h".into()],
            components,
            Matrix::zero(field, 4, 2),
        )
        .unwrap();
        let p = product_truncated(&[rc.clone()], 2).unwrap();
        assert_eq!(p.object.dim(), 2);
        let id_leg = ColoredMorphism::identity(&rc);
        let pairing = product_pairing(&p, &[rc.clone()], &rc, &[id_leg]).unwrap();
        assert_eq!(
            p.projections[0].fbar.mul(&pairing.fbar),
            Matrix::identity(field, 2)
        );
        assert!(pairing.fbar.inverse().is_some());
    }
}

//! End-to-end scenarios through the public API: build an instance, walk it
//! through every layer of the workbench, and cross-check the layers against
//! each other.

use coalg::category::{coproduct, simply_colored_morphism_check};
use coalg::coalgebra::{setlike_coalgebra, Algebra, CoalgebraMorphism};
use coalg::colored::{from_pointed_with_splitting, tensor_simply_colored, unreduce};
use coalg::constructions::{
    coideal_bicomodule, cofree_universal_map, cotensor_coalgebra, path_coalgebra,
    GradedCoalgebra,
};
use coalg::convolution::{conv_inverse, conv_unit, convolve, ConvMap};
use coalg::coradical::{coradical, coradical_filtration, wedge};
use coalg::exactlin::{Field, Matrix, Scalar, Subspace};
use coalg::samples;

fn q(n: i64) -> Scalar {
    Field::Q.integer(n)
}

#[test]
fn path_coalgebra_full_walkthrough() {
    // Build the length-2 path coalgebra of u→v→w and push it through every
    // layer: axioms, splitting, filtration, bigrading, reduction, cofree
    // embedding, and a convolution inverse.
    let p = path_coalgebra(&samples::line_quiver(2), 2).unwrap();
    let sc = p.colored;
    let c = sc.coalgebra();
    assert!(c.validate().passed());
    assert!(sc.check_retraction().passed());
    assert!(sc.verify_bicomodule().passed());
    assert!(sc.verify_bigrading().passed());
    assert!(sc.verify_pointed().unwrap().passed());

    // Coradical machinery agrees with the construction.
    let c0 = coradical(c).unwrap();
    assert_eq!(
        c0,
        Subspace::span(Field::Q, 6, sc.colors().to_vec())
    );
    let filtration = coradical_filtration(c).unwrap();
    assert!(filtration.exhaustive);
    assert_eq!(filtration.terms.len(), 3);
    // The second term is C₀ ∧ C₀.
    assert_eq!(filtration.terms[1], wedge(c, &c0, &c0));

    // The splitting is recoverable from pointedness alone.
    let rebuilt = from_pointed_with_splitting(c, sc.retraction()).unwrap();
    assert_eq!(rebuilt.retraction(), sc.retraction());

    // Reduce, unreduce, and come back isomorphic.
    let rc = sc.reduce();
    assert_eq!(rc.dim(), 3);
    let un = unreduce(&rc).unwrap();
    assert_eq!(un.object.dim(), sc.dim());

    // Embed into the truncated cofree cotensor coalgebra along the identity.
    let m = coideal_bicomodule(&sc);
    let f = Matrix::identity(Field::Q, 3);
    let out = cofree_universal_map(&sc, &f, &[0, 1, 2], &m, 2).unwrap();
    assert!(out.morphism.validate().passed());

    // Convolution inverse of a functional that is 1 on the coradical.
    let k = Algebra::new(
        Field::Q,
        vec!["1".into()],
        vec![(0, 0, 0, q(1))],
        vec![q(1)],
    )
    .unwrap();
    let f = ConvMap::new(
        c,
        &k,
        Matrix::from_rows(Field::Q, vec![vec![q(1), q(1), q(1), q(2), q(3), q(5)]]),
    )
    .unwrap();
    let h = conv_inverse(&sc, &f).unwrap();
    let u = conv_unit(c, &k);
    assert_eq!(convolve(&f, &h).unwrap().matrix, u.matrix);
}

#[test]
fn tensor_and_coproduct_compose() {
    let a = samples::primitive_line(Field::Q);
    let b = samples::setlike_colored(Field::Q, &["s", "t"]);
    let t = tensor_simply_colored(&a, &b).unwrap();
    assert_eq!(t.dim(), a.dim() * b.dim());
    assert_eq!(t.colors().len(), a.colors().len() * b.colors().len());
    let (sum, injections) = coproduct(&[t.clone(), a.clone()]).unwrap();
    assert_eq!(sum.dim(), t.dim() + a.dim());
    for (part, inj) in [&t, &a].iter().zip(&injections) {
        assert!(simply_colored_morphism_check(part, &sum, inj).passed());
    }
    assert!(sum.verify_pointed().unwrap().passed());
}

#[test]
fn graded_instances_stay_consistent_across_layers() {
    // The divided-power chain, viewed as graded, as simply colored, and as
    // a subobject of its cofree hull, tells one consistent story.
    let graded = samples::divided_power_chain(Field::Q, 3);
    let sc = coalg::constructions::space_like(&graded).unwrap();
    let cert = sc.conilpotency();
    assert!(cert.conilpotent);
    assert_eq!(cert.indices, vec![Some(1), Some(2), Some(3)]);

    let m = coideal_bicomodule(&sc);
    let cot = cotensor_coalgebra(&m, 3).unwrap();
    let by_words = GradedCoalgebra::new(
        cot.colored.coalgebra().clone(),
        cot.word_lengths.clone(),
    )
    .unwrap();
    let sl = coalg::constructions::space_like(&by_words).unwrap();
    assert_eq!(sl.retraction(), cot.colored.retraction());

    // Quotient by the whole coideal collapses to the color coalgebra.
    let (quot, proj) = sc
        .coalgebra()
        .quotient(sc.coideal())
        .unwrap();
    assert_eq!(quot, setlike_coalgebra(Field::Q, &["g"]).unwrap());
    assert!(proj.validate().passed());
    let m = CoalgebraMorphism::new(sc.coalgebra(), &quot, proj.matrix.clone()).unwrap();
    assert!(m.validate().passed());
}

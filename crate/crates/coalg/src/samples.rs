//! Deterministic instance generators shared by the unit tests, the
//! acceptance suite and the fixtures. Random generation is seeded by the
//! caller, so the whole suite is reproducible.

use rand::Rng;

use crate::coalgebra::{setlike_coalgebra, Coalgebra};
use crate::colored::SimplyColored;
use crate::constructions::{path_coalgebra_over, GradedCoalgebra, Quiver};
use crate::exactlin::{Field, Matrix, Scalar, Subspace};

pub fn q(n: i64) -> Scalar {
    Field::Q.integer(n)
}

/// kg ⊕ kx with x primitive over g and δ the projection killing x.
pub fn primitive_line(field: Field) -> SimplyColored {
    let one = field.one();
    let c = Coalgebra::new(
        field,
        vec!["g".into(), "x".into()],
        vec![
            (0, 0, 0, one.clone()),
            (1, 0, 1, one.clone()),
            (1, 1, 0, one),
        ],
        vec![field.one(), field.zero()],
    )
    .unwrap();
    let delta = Matrix::from_entries(field, 2, 2, vec![(0, 0, field.one())]);
    SimplyColored::new(c, vec![vec![field.one(), field.zero()]], delta).unwrap()
}

/// The set-like coalgebra C\[G\] with the identity splitting.
pub fn setlike_colored(field: Field, names: &[&str]) -> SimplyColored {
    let c = setlike_coalgebra(field, names).unwrap();
    let d = c.dim();
    let colors = (0..d)
        .map(|i| {
            let mut v = vec![field.zero(); d];
            v[i] = field.one();
            v
        })
        .collect();
    SimplyColored::new(c, colors, Matrix::identity(field, d)).unwrap()
}

/// The divided-power chain g, x₁, …, xₙ with Δ(xₖ) = Σ_{i+j=k} xᵢ⊗xⱼ
/// (x₀ = g), graded by the subscript.
pub fn divided_power_chain(field: Field, n: usize) -> GradedCoalgebra {
    let mut names = vec!["g".to_string()];
    for k in 1..=n {
        names.push(format!("x{k}"));
    }
    let mut triples = Vec::new();
    for k in 0..=n {
        for i in 0..=k {
            triples.push((k, i, k - i, field.one()));
        }
    }
    let mut counit = vec![field.one()];
    counit.resize(n + 1, field.zero());
    let c = Coalgebra::new(field, names, triples, counit).unwrap();
    GradedCoalgebra::new(c, (0..=n).collect()).unwrap()
}

pub fn line_quiver(len: usize) -> Quiver {
    let vertices: Vec<String> = (0..=len).map(|i| format!("v{i}")).collect();
    let arrows = (0..len)
        .map(|i| (format!("a{i}"), format!("v{i}"), format!("v{}", i + 1)))
        .collect();
    Quiver::new(vertices, arrows).unwrap()
}

pub fn loop_quiver() -> Quiver {
    Quiver::new(
        vec!["u".into()],
        vec![("l".into(), "u".into(), "u".into())],
    )
    .unwrap()
}

pub fn kronecker_quiver() -> Quiver {
    Quiver::new(
        vec!["u".into(), "v".into()],
        vec![
            ("a".into(), "u".into(), "v".into()),
            ("b".into(), "u".into(), "v".into()),
        ],
    )
    .unwrap()
}

/// The standard instance suite: every structural theorem in the crate is
/// expected to hold on each of these.
pub fn standard_instances(field: Field) -> Vec<(String, SimplyColored)> {
    let mut out = vec![
        ("setlike-1".to_string(), setlike_colored(field, &["g"])),
        ("setlike-2".to_string(), setlike_colored(field, &["g", "h"])),
        (
            "setlike-3".to_string(),
            setlike_colored(field, &["g", "h", "k"]),
        ),
        ("primitive-line".to_string(), primitive_line(field)),
        (
            "divided-power-3".to_string(),
            crate::constructions::space_like(&divided_power_chain(field, 3)).unwrap(),
        ),
        (
            "path-line-1".to_string(),
            path_coalgebra_over(&line_quiver(1), 1, field).unwrap().colored,
        ),
        (
            "path-line-2".to_string(),
            path_coalgebra_over(&line_quiver(2), 2, field).unwrap().colored,
        ),
        (
            "path-loop-3".to_string(),
            path_coalgebra_over(&loop_quiver(), 3, field).unwrap().colored,
        ),
        (
            "path-kronecker-2".to_string(),
            path_coalgebra_over(&kronecker_quiver(), 2, field)
                .unwrap()
                .colored,
        ),
    ];
    let tensor = crate::colored::tensor_simply_colored(&out[3].1, &out[1].1).unwrap();
    out.push(("tensor-primitive-setlike".to_string(), tensor));
    out
}

/// A random quiver with the given vertex and arrow counts.
pub fn random_quiver(rng: &mut impl Rng, vertices: usize, arrows: usize) -> Quiver {
    let names: Vec<String> = (0..vertices).map(|i| format!("v{i}")).collect();
    let arrow_list = (0..arrows)
        .map(|i| {
            let s = rng.gen_range(0..vertices);
            let t = rng.gen_range(0..vertices);
            (format!("a{i}"), names[s].clone(), names[t].clone())
        })
        .collect();
    Quiver::new(names, arrow_list).unwrap()
}

/// A random matrix over Q with small integer entries.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_entries(
        Field::Q,
        rows,
        cols,
        (0..rows * cols).filter_map(|idx| {
            let v: i64 = rng.gen_range(-3..=3);
            (v != 0).then(|| (idx / cols, idx % cols, q(v)))
        }),
    )
}

/// A random subspace of k^dim spanned by `spans` random vectors.
pub fn random_subspace(rng: &mut impl Rng, dim: usize, spans: usize) -> Subspace {
    let rows = (0..spans)
        .map(|_| (0..dim).map(|_| q(rng.gen_range(-2..=2))).collect())
        .collect();
    Subspace::span(Field::Q, dim, rows)
}

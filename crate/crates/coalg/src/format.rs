//! The JSON definition-file format: exact fractions as strings, basis
//! elements referenced by name, and one optional block per kind of object.
//! Parsing is two-phase: serde gives syntax errors with line/column (the
//! fraction-shape check runs inside deserialization, so a literal `"1/0"`
//! is reported at its position), and semantic conversion reports errors
//! with a JSON-path-like location.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::coalgebra::{Algebra, Coalgebra};
use crate::colored::SimplyColored;
use crate::constructions::Quiver;
use crate::convolution::{Bialgebra, ConvMap};
use crate::exactlin::{is_prime, Field, Matrix, Scalar};

/// A syntactically valid fraction string: an optional sign, digits, and an
/// optional nonzero denominator. Field-dependent reduction happens later.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Frac(pub String);

impl<'de> Deserialize<'de> for Frac {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        check_fraction_shape(&s).map_err(D::Error::custom)?;
        Ok(Frac(s))
    }
}

fn check_fraction_shape(s: &str) -> Result<(), String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.trim(), None),
    };
    let check_int = |t: &str| -> Result<(), String> {
        let t = t.trim();
        let t = t.strip_prefix('-').unwrap_or(t);
        if t.is_empty() || !t.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("malformed integer `{t}` in fraction `{s}`"));
        }
        Ok(())
    };
    check_int(num)?;
    if let Some(d) = den {
        check_int(d)?;
        let digits = d.trim().strip_prefix('-').unwrap_or(d.trim());
        if digits.chars().all(|c| c == '0') {
            return Err(format!("zero denominator in fraction `{s}`"));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Name(String),
    Prime { #[serde(rename = "Fp")] p: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoalgebraBlock {
    pub basis: Vec<String>,
    /// Triples (source, left, right, coefficient): Δ(source) contains
    /// coefficient·(left ⊗ right).
    pub delta: Vec<(String, String, String, Frac)>,
    pub counit: Vec<Frac>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColorSpec {
    Name(String),
    Vector(Vec<Frac>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingBlock {
    pub colors: Vec<ColorSpec>,
    /// The retraction δ as a dense row-major matrix.
    pub delta: Vec<Vec<Frac>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraBlock {
    pub basis: Vec<String>,
    pub mult: Vec<(String, String, String, Frac)>,
    pub unit: Vec<Frac>,
}

/// A bialgebra block reuses the coalgebra's basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BialgebraBlock {
    pub mult: Vec<(String, String, String, Frac)>,
    pub unit: Vec<Frac>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuiverBlock {
    pub vertices: Vec<String>,
    /// Triples (name, source vertex, target vertex).
    pub arrows: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismBlock {
    pub name: String,
    /// One of "coalgebra", "coalgebra2", "algebra", "reduced", "reduced2".
    pub source: String,
    pub target: String,
    pub matrix: Vec<Vec<Frac>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colors: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefinitionFile {
    pub field: FieldSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coalgebra: Option<CoalgebraBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coalgebra2: Option<CoalgebraBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splitting2: Option<SplittingBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bialgebra: Option<BialgebraBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quiver: Option<QuiverBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morphisms: Option<Vec<MorphismBlock>>,
}

/// A parse or conversion failure, with either a line/column (syntax) or a
/// JSON-path location (semantics).
#[derive(Debug)]
pub struct LoadError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for LoadError {}

fn err(location: impl Into<String>, message: impl fmt::Display) -> LoadError {
    LoadError {
        location: location.into(),
        message: message.to_string(),
    }
}

impl DefinitionFile {
    pub fn parse_str(s: &str) -> Result<Self, LoadError> {
        serde_json::from_str(s).map_err(|e| LoadError {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Deterministic serialization: struct field order is fixed and all
    /// maps are ordered.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn ground_field(&self) -> Result<Field, LoadError> {
        match &self.field {
            FieldSpec::Name(n) if n == "Q" => Ok(Field::Q),
            FieldSpec::Name(n) => Err(err("field", format!("unknown field `{n}`; use \"Q\" or {{\"Fp\": p}}"))),
            FieldSpec::Prime { p } => {
                if is_prime(*p) {
                    Ok(Field::Fp(*p))
                } else {
                    Err(err("field.Fp", format!("{p} is not prime")))
                }
            }
        }
    }

    fn scalar(&self, field: Field, f: &Frac, location: &str) -> Result<Scalar, LoadError> {
        field.parse(&f.0).map_err(|m| err(location, m))
    }

    fn coalgebra_from_block(
        &self,
        block: &CoalgebraBlock,
        path: &str,
    ) -> Result<Coalgebra, LoadError> {
        let field = self.ground_field()?;
        let lookup = |name: &str, loc: String| {
            block
                .basis
                .iter()
                .position(|b| b == name)
                .ok_or_else(|| err(loc, format!("unknown basis name `{name}`")))
        };
        let mut triples = Vec::new();
        for (i, (a, b, c, coeff)) in block.delta.iter().enumerate() {
            let loc = format!("{path}.delta[{i}]");
            triples.push((
                lookup(a, loc.clone())?,
                lookup(b, loc.clone())?,
                lookup(c, loc.clone())?,
                self.scalar(field, coeff, &loc)?,
            ));
        }
        let mut counit = Vec::new();
        for (i, f) in block.counit.iter().enumerate() {
            counit.push(self.scalar(field, f, &format!("{path}.counit[{i}]"))?);
        }
        Coalgebra::new(field, block.basis.clone(), triples, counit)
            .map_err(|e| err(path, e))
    }

    pub fn coalgebra(&self) -> Result<Coalgebra, LoadError> {
        let block = self
            .coalgebra
            .as_ref()
            .ok_or_else(|| err("coalgebra", "missing block"))?;
        self.coalgebra_from_block(block, "coalgebra")
    }

    pub fn coalgebra2(&self) -> Result<Coalgebra, LoadError> {
        let block = self
            .coalgebra2
            .as_ref()
            .ok_or_else(|| err("coalgebra2", "missing block"))?;
        self.coalgebra_from_block(block, "coalgebra2")
    }

    fn matrix_from_rows(
        &self,
        rows: &[Vec<Frac>],
        path: &str,
    ) -> Result<Matrix, LoadError> {
        let field = self.ground_field()?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut items = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(err(format!("{path}[{r}]"), "ragged matrix rows"));
            }
            for (c, f) in row.iter().enumerate() {
                items.push((r, c, self.scalar(field, f, &format!("{path}[{r}][{c}]"))?));
            }
        }
        Ok(Matrix::from_entries(field, nrows, ncols, items))
    }

    /// The raw splitting data: color vectors and the retraction matrix,
    /// without structural validation (the `validate` command checks them).
    pub fn splitting_parts(
        &self,
        coalgebra: &Coalgebra,
        block: &SplittingBlock,
        path: &str,
    ) -> Result<(Vec<Vec<Scalar>>, Matrix), LoadError> {
        let field = self.ground_field()?;
        let dim = coalgebra.dim();
        let mut colors = Vec::new();
        for (i, spec) in block.colors.iter().enumerate() {
            let loc = format!("{path}.colors[{i}]");
            match spec {
                ColorSpec::Name(n) => {
                    let idx = coalgebra
                        .basis_names()
                        .iter()
                        .position(|b| b == n)
                        .ok_or_else(|| err(loc.clone(), format!("unknown basis name `{n}`")))?;
                    let mut v = vec![field.zero(); dim];
                    v[idx] = field.one();
                    colors.push(v);
                }
                ColorSpec::Vector(fs) => {
                    if fs.len() != dim {
                        return Err(err(loc, format!("color vector length {} ≠ {dim}", fs.len())));
                    }
                    let mut v = Vec::new();
                    for (j, f) in fs.iter().enumerate() {
                        v.push(self.scalar(field, f, &format!("{loc}[{j}]"))?);
                    }
                    colors.push(v);
                }
            }
        }
        let delta = self.matrix_from_rows(&block.delta, &format!("{path}.delta"))?;
        if delta.rows() != dim || delta.cols() != dim {
            return Err(err(
                format!("{path}.delta"),
                format!("retraction must be {dim}×{dim}"),
            ));
        }
        Ok((colors, delta))
    }

    /// Build and fully validate the simply colored object from the
    /// coalgebra and splitting blocks.
    pub fn simply_colored(&self) -> Result<SimplyColored, LoadError> {
        let c = self.coalgebra()?;
        let block = self
            .splitting
            .as_ref()
            .ok_or_else(|| err("splitting", "missing block"))?;
        let (colors, delta) = self.splitting_parts(&c, block, "splitting")?;
        SimplyColored::new(c, colors, delta).map_err(|e| err("splitting", e))
    }

    pub fn simply_colored2(&self) -> Result<SimplyColored, LoadError> {
        let c = self.coalgebra2()?;
        let block = self
            .splitting2
            .as_ref()
            .ok_or_else(|| err("splitting2", "missing block"))?;
        let (colors, delta) = self.splitting_parts(&c, block, "splitting2")?;
        SimplyColored::new(c, colors, delta).map_err(|e| err("splitting2", e))
    }

    /// The splitting without validation, for the `validate` command.
    pub fn simply_colored_unchecked(&self) -> Result<Option<SimplyColored>, LoadError> {
        let Some(block) = self.splitting.as_ref() else {
            return Ok(None);
        };
        let c = self.coalgebra()?;
        let (colors, delta) = self.splitting_parts(&c, block, "splitting")?;
        Ok(Some(SimplyColored::new_unchecked(c, colors, delta)))
    }

    pub fn algebra(&self) -> Result<Algebra, LoadError> {
        let block = self
            .algebra
            .as_ref()
            .ok_or_else(|| err("algebra", "missing block"))?;
        self.algebra_from_parts(&block.basis, &block.mult, &block.unit, "algebra")
    }

    fn algebra_from_parts(
        &self,
        basis: &[String],
        mult: &[(String, String, String, Frac)],
        unit: &[Frac],
        path: &str,
    ) -> Result<Algebra, LoadError> {
        let field = self.ground_field()?;
        let lookup = |name: &str, loc: String| {
            basis
                .iter()
                .position(|b| b == name)
                .ok_or_else(|| err(loc, format!("unknown basis name `{name}`")))
        };
        let mut triples = Vec::new();
        for (i, (a, b, c, coeff)) in mult.iter().enumerate() {
            let loc = format!("{path}.mult[{i}]");
            triples.push((
                lookup(a, loc.clone())?,
                lookup(b, loc.clone())?,
                lookup(c, loc.clone())?,
                self.scalar(field, coeff, &loc)?,
            ));
        }
        let mut unit_vec = Vec::new();
        for (i, f) in unit.iter().enumerate() {
            unit_vec.push(self.scalar(field, f, &format!("{path}.unit[{i}]"))?);
        }
        Algebra::new(field, basis.to_vec(), triples, unit_vec).map_err(|e| err(path, e))
    }

    /// The bialgebra block: an algebra structure on the coalgebra's basis.
    pub fn bialgebra(&self) -> Result<Bialgebra, LoadError> {
        let c = self.coalgebra()?;
        let block = self
            .bialgebra
            .as_ref()
            .ok_or_else(|| err("bialgebra", "missing block"))?;
        let a = self.algebra_from_parts(
            c.basis_names(),
            &block.mult,
            &block.unit,
            "bialgebra",
        )?;
        Bialgebra::new(c, a).map_err(|e| err("bialgebra", e))
    }

    pub fn quiver(&self) -> Result<Quiver, LoadError> {
        let block = self
            .quiver
            .as_ref()
            .ok_or_else(|| err("quiver", "missing block"))?;
        Quiver::new(block.vertices.clone(), block.arrows.clone()).map_err(|e| err("quiver", e))
    }

    pub fn morphism_blocks(&self) -> &[MorphismBlock] {
        self.morphisms.as_deref().unwrap_or(&[])
    }

    pub fn morphism_matrix(&self, block: &MorphismBlock) -> Result<Matrix, LoadError> {
        self.matrix_from_rows(&block.matrix, &format!("morphisms[{}].matrix", block.name))
    }

    /// A convolution map block: source "coalgebra", target "algebra".
    pub fn conv_map(&self, block: &MorphismBlock) -> Result<ConvMap, LoadError> {
        if block.source != "coalgebra" || block.target != "algebra" {
            return Err(err(
                format!("morphisms[{}]", block.name),
                "a convolution map needs source \"coalgebra\" and target \"algebra\"",
            ));
        }
        let c = self.coalgebra()?;
        let a = self.algebra()?;
        let m = self.morphism_matrix(block)?;
        ConvMap::new(&c, &a, m).map_err(|e| err(format!("morphisms[{}]", block.name), e))
    }
}

/// Serialize a simply colored coalgebra back into definition-file form.
pub fn emit_simply_colored(sc: &SimplyColored, comment: Option<String>) -> DefinitionFile {
    let c = sc.coalgebra();
    let field_spec = match c.field() {
        Field::Q => FieldSpec::Name("Q".into()),
        Field::Fp(p) => FieldSpec::Prime { p },
    };
    let delta = c
        .delta_triples()
        .iter()
        .map(|(i, j, k, v)| {
            (
                c.basis_name(*i).to_string(),
                c.basis_name(*j).to_string(),
                c.basis_name(*k).to_string(),
                Frac(v.to_string()),
            )
        })
        .collect();
    let counit = c.counit_vector().iter().map(|v| Frac(v.to_string())).collect();
    let colors = sc
        .colors()
        .iter()
        .map(|v| ColorSpec::Vector(v.iter().map(|s| Frac(s.to_string())).collect()))
        .collect();
    let delta_rows = (0..c.dim())
        .map(|r| {
            (0..c.dim())
                .map(|cc| Frac(sc.retraction().get(r, cc).to_string()))
                .collect()
        })
        .collect();
    DefinitionFile {
        field: field_spec,
        comment,
        coalgebra: Some(CoalgebraBlock {
            basis: c.basis_names().to_vec(),
            delta,
            counit,
        }),
        splitting: Some(SplittingBlock {
            colors,
            delta: delta_rows,
        }),
        coalgebra2: None,
        splitting2: None,
        algebra: None,
        bialgebra: None,
        quiver: None,
        morphisms: None,
    }
}

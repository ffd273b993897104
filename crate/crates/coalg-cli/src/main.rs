//! Command-line driver: parse definition files, run checks and
//! constructions, and emit deterministic reports (text or JSON).
//!
//! Exit codes: 0 on success, 1 when a check fails or a construction is
//! refused with a witness, 2 on usage or parse errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coalg::category::{coequalizer_reduced, coproduct, equalizer, product_truncated, ColoredMorphism};
use coalg::constructions::{coideal_bicomodule, cotensor, cotensor_coalgebra, path_coalgebra_over};
use coalg::convolution::{antipode, conv_inverse, ConvError};
use coalg::coradical::{coradical, coradical_filtration, is_pointed, Pointedness};
use coalg::exactlin::format_combination;
use coalg::format::{emit_simply_colored, DefinitionFile, LoadError};
use coalg::{CoalgebraMorphism, Report, SimplyColored};

#[derive(Parser)]
#[command(name = "coalg", about = "Exact workbench for finite-dimensional coalgebras", version)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every applicable axiom check on the blocks of a definition file.
    Validate { file: String },
    /// Compute the coradical of the coalgebra block.
    Coradical { file: String },
    /// Compute the coradical filtration.
    Filtration { file: String },
    /// Kernel chain and per-basis conilpotency indices of the splitting.
    Conilpotency { file: String },
    /// Dimensions of the bigraded components of a simply colored instance.
    Bigrade { file: String },
    /// Decide pointedness and list the set-like elements.
    Pointed { file: String },
    /// Build the path coalgebra of the quiver block, truncated at a length.
    Pathcoalg {
        file: String,
        max_len: usize,
        /// Emit the result as a definition file instead of a report.
        #[arg(long)]
        emit: bool,
    },
    /// Cotensor square of the coideal bicomodule of a simply colored instance.
    Cotensor { file: String },
    /// Truncated cofree cotensor coalgebra over the coideal bicomodule.
    Cofree {
        file: String,
        #[arg(long)]
        max_words: usize,
        #[arg(long)]
        emit: bool,
    },
    /// Convolution inverse of the morphism block f: coalgebra → algebra.
    Convinv { file: String },
    /// Antipode of the bialgebra block with the splitting block's colors.
    Antipode { file: String },
    /// Coproduct of the two simply colored blocks.
    Coproduct {
        file: String,
        #[arg(long)]
        emit: bool,
    },
    /// Equalizer of the first two morphism blocks (parallel pair).
    Equalizer { file: String },
    /// Coequalizer of the first two reduced morphism blocks.
    Coequalizer { file: String },
    /// Truncated product of the two reduced colored blocks.
    Product {
        file: String,
        #[arg(long)]
        max_words: usize,
    },
}

#[derive(serde::Serialize)]
struct CliReport {
    command: String,
    input: String,
    status: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    checks: Vec<CheckOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<Value>,
}

#[derive(serde::Serialize)]
struct CheckOut {
    label: String,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

impl CliReport {
    fn new(command: &str, input: &str) -> Self {
        CliReport {
            command: command.into(),
            input: input.into(),
            status: "ok".into(),
            checks: Vec::new(),
            data: None,
        }
    }

    fn absorb(&mut self, prefix: &str, report: &Report) {
        for c in &report.checks {
            self.checks.push(CheckOut {
                label: if prefix.is_empty() {
                    c.label.clone()
                } else {
                    format!("{prefix}: {}", c.label)
                },
                ok: c.ok,
                witness: c.witness.clone(),
            });
            if !c.ok {
                self.status = "fail".into();
            }
        }
    }

    fn fail(&mut self, label: &str, witness: String) {
        self.checks.push(CheckOut {
            label: label.into(),
            ok: false,
            witness: Some(witness),
        });
        self.status = "fail".into();
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Text => {
                let mut out = format!("{} {}: {}\n", self.command, self.input, self.status);
                for c in &self.checks {
                    match (&c.ok, &c.witness) {
                        (true, _) => out.push_str(&format!("  ok   {}\n", c.label)),
                        (false, Some(w)) => {
                            out.push_str(&format!("  FAIL {} (witness: {w})\n", c.label))
                        }
                        (false, None) => out.push_str(&format!("  FAIL {}\n", c.label)),
                    }
                }
                if let Some(data) = &self.data {
                    render_value(&mut out, data, 1);
                }
                out
            }
        }
    }
}

fn render_value(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(out, val, indent + 1);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", plain(val))),
                }
            }
        }
        Value::Array(items) => {
            for val in items {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_value(out, val, indent + 1);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", plain(val))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", plain(v))),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

enum CmdError {
    Load(LoadError),
    Usage(String),
}

impl From<LoadError> for CmdError {
    fn from(e: LoadError) -> Self {
        CmdError::Load(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let out_path = cli.out.clone();
    match run(cli) {
        Ok((report, text_override)) => {
            let rendered = match text_override {
                Some(t) => t,
                None => report.render(format),
            };
            if let Some(path) = out_path {
                if let Err(e) = std::fs::write(&path, &rendered) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{rendered}");
            }
            if report.status == "ok" {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CmdError::Load(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CmdError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load(file: &str) -> Result<DefinitionFile, CmdError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CmdError::Usage(format!("cannot read {file}: {e}")))?;
    Ok(DefinitionFile::parse_str(&text)?)
}

/// Labels for the echelon basis of the coideal, in carrier names.
fn coideal_labels(sc: &SimplyColored) -> Vec<String> {
    sc.coideal()
        .basis_vectors()
        .iter()
        .map(|v| format_combination(sc.coalgebra().basis_names(), v))
        .collect()
}

fn run(cli: Cli) -> Result<(CliReport, Option<String>), CmdError> {
    match &cli.command {
        Command::Validate { file } => {
            let def = load(file)?;
            let mut report = CliReport::new("validate", file);
            if def.coalgebra.is_some() {
                let c = def.coalgebra()?;
                report.absorb("coalgebra", &c.validate());
                if let Some(sc) = def.simply_colored_unchecked()? {
                    report.absorb("splitting", &sc.check_retraction());
                    report.absorb("bicomodule", &sc.verify_bicomodule());
                    let coassoc = sc.check_reduced_coassoc();
                    report.checks.push(CheckOut {
                        label: "reduced comultiplication coassociative".into(),
                        ok: coassoc,
                        witness: None,
                    });
                    let cert = sc.conilpotency();
                    report.checks.push(CheckOut {
                        label: "coideal conilpotent".into(),
                        ok: cert.conilpotent,
                        witness: (!cert.conilpotent).then(|| {
                            format!(
                                "kernel chain stabilizes at dimension {} of {}",
                                cert.chain.last().map_or(0, |k| k.dim()),
                                sc.coideal().dim()
                            )
                        }),
                    });
                    if !coassoc || !cert.conilpotent {
                        report.status = "fail".into();
                    }
                }
                if def.bialgebra.is_some() {
                    report.absorb("bialgebra", &def.bialgebra()?.validate());
                }
            }
            if def.coalgebra2.is_some() {
                report.absorb("coalgebra2", &def.coalgebra2()?.validate());
            }
            if def.algebra.is_some() {
                report.absorb("algebra", &def.algebra()?.validate());
            }
            if def.quiver.is_some() {
                def.quiver()?;
                report.checks.push(CheckOut {
                    label: "quiver well-formed".into(),
                    ok: true,
                    witness: None,
                });
            }
            for block in def.morphism_blocks() {
                let (src, dst) = match (block.source.as_str(), block.target.as_str()) {
                    ("coalgebra", "coalgebra") => (def.coalgebra()?, def.coalgebra()?),
                    ("coalgebra", "coalgebra2") => (def.coalgebra()?, def.coalgebra2()?),
                    ("coalgebra2", "coalgebra") => (def.coalgebra2()?, def.coalgebra()?),
                    _ => continue,
                };
                let m = def.morphism_matrix(block)?;
                match CoalgebraMorphism::new(&src, &dst, m) {
                    Ok(morphism) => {
                        report.absorb(&format!("morphism {}", block.name), &morphism.validate())
                    }
                    Err(e) => report.fail(&format!("morphism {}", block.name), e.to_string()),
                }
            }
            Ok((report, None))
        }

        Command::Coradical { file } => {
            let def = load(file)?;
            let c = def.coalgebra()?;
            let mut report = CliReport::new("coradical", file);
            match coradical(&c) {
                Ok(c0) => {
                    let basis: Vec<String> = c0
                        .basis_vectors()
                        .iter()
                        .map(|v| format_combination(c.basis_names(), v))
                        .collect();
                    report.data = Some(json!({ "dim": c0.dim(), "basis": basis }));
                }
                Err(e) => report.fail("coradical", e.to_string()),
            }
            Ok((report, None))
        }

        Command::Filtration { file } => {
            let def = load(file)?;
            let c = def.coalgebra()?;
            let mut report = CliReport::new("filtration", file);
            match coradical_filtration(&c) {
                Ok(f) => {
                    let terms: Vec<Value> = f
                        .terms
                        .iter()
                        .map(|t| {
                            let basis: Vec<String> = t
                                .basis_vectors()
                                .iter()
                                .map(|v| format_combination(c.basis_names(), v))
                                .collect();
                            json!({ "dim": t.dim(), "basis": basis })
                        })
                        .collect();
                    report.data = Some(json!({
                        "exhaustive": f.exhaustive,
                        "terms": terms,
                    }));
                }
                Err(e) => report.fail("filtration", e.to_string()),
            }
            Ok((report, None))
        }

        Command::Conilpotency { file } => {
            let def = load(file)?;
            let sc = def
                .simply_colored_unchecked()?
                .ok_or_else(|| CmdError::Usage("missing splitting block".into()))?;
            let mut report = CliReport::new("conilpotency", file);
            let cert = sc.conilpotency();
            let labels = coideal_labels(&sc);
            let mut index = serde_json::Map::new();
            for (label, idx) in labels.iter().zip(&cert.indices) {
                index.insert(
                    label.clone(),
                    match idx {
                        Some(n) => json!(n),
                        None => Value::Null,
                    },
                );
            }
            report.data = Some(json!({
                "conilpotent": cert.conilpotent,
                "chain_dims": cert.chain.iter().map(|k| k.dim()).collect::<Vec<_>>(),
                "index": Value::Object(index),
            }));
            if !cert.conilpotent {
                report.fail("coideal conilpotent", "kernel chain stabilizes early".into());
            }
            Ok((report, None))
        }

        Command::Bigrade { file } => {
            let def = load(file)?;
            let sc = def.simply_colored().map_err(CmdError::Load)?;
            let mut report = CliReport::new("bigrade", file);
            let labels = sc.color_labels();
            let mut dims = std::collections::BTreeMap::new();
            for ((g, h), comp) in sc.bigrading() {
                dims.insert(format!("({},{})", labels[g], labels[h]), comp.dim());
            }
            report.data = Some(json!({ "components": dims }));
            report.absorb("bigrading", &sc.verify_bigrading());
            Ok((report, None))
        }

        Command::Pointed { file } => {
            let def = load(file)?;
            let c = def.coalgebra()?;
            let mut report = CliReport::new("pointed", file);
            match is_pointed(&c) {
                Ok(Pointedness::Pointed { setlikes }) => {
                    let names: Vec<String> = setlikes
                        .iter()
                        .map(|v| format_combination(c.basis_names(), v))
                        .collect();
                    report.data = Some(json!({ "pointed": true, "setlikes": names }));
                }
                Ok(Pointedness::NotPointed { witness }) => {
                    report.data = Some(json!({ "pointed": false }));
                    report.fail("not pointed", witness);
                }
                Ok(Pointedness::PointedOnlyOverExtension) => {
                    report.data = Some(json!({ "pointed": false }));
                    report.fail(
                        "not pointed over the ground field",
                        "set-like basis exists only over an extension field".into(),
                    );
                }
                Err(e) => report.fail("pointed", e.to_string()),
            }
            Ok((report, None))
        }

        Command::Pathcoalg { file, max_len, emit } => {
            let def = load(file)?;
            let q = def.quiver()?;
            let field = def.ground_field()?;
            let p = path_coalgebra_over(&q, *max_len, field)
                .map_err(|e| CmdError::Usage(e.to_string()))?;
            if *emit {
                let out = emit_simply_colored(
                    &p.colored,
                    Some(format!("path coalgebra truncated at length {max_len}")),
                );
                let report = CliReport::new("pathcoalg", file);
                return Ok((report, Some(out.to_json())));
            }
            let mut report = CliReport::new("pathcoalg", file);
            report.data = Some(json!({
                "dim": p.colored.dim(),
                "basis": p.colored.coalgebra().basis_names(),
                "lengths": p.lengths,
                "colors": p.colored.color_labels(),
            }));
            Ok((report, None))
        }

        Command::Cotensor { file } => {
            let def = load(file)?;
            let sc = def.simply_colored()?;
            let m = coideal_bicomodule(&sc);
            let sq = cotensor(&m, &m).map_err(|e| CmdError::Usage(e.to_string()))?;
            let labels = coideal_labels(&sc);
            let pair_names: Vec<String> = labels
                .iter()
                .flat_map(|a| labels.iter().map(move |b| format!("{a}⊗{b}")))
                .collect();
            let basis: Vec<String> = sq
                .basis_vectors()
                .iter()
                .map(|v| format_combination(&pair_names, v))
                .collect();
            let mut report = CliReport::new("cotensor", file);
            report.data = Some(json!({
                "module_dim": m.dim(),
                "square_dim": sq.dim(),
                "square_basis": basis,
            }));
            Ok((report, None))
        }

        Command::Cofree { file, max_words, emit } => {
            let def = load(file)?;
            let sc = def.simply_colored()?;
            let m = coideal_bicomodule(&sc);
            let cot = cotensor_coalgebra(&m, *max_words)
                .map_err(|e| CmdError::Usage(e.to_string()))?;
            if *emit {
                let out = emit_simply_colored(
                    &cot.colored,
                    Some(format!("cofree cotensor coalgebra truncated at {max_words} words")),
                );
                let report = CliReport::new("cofree", file);
                return Ok((report, Some(out.to_json())));
            }
            let mut report = CliReport::new("cofree", file);
            report.data = Some(json!({
                "dim": cot.colored.dim(),
                "word_dims": cot.powers.iter().map(|p| p.dim()).collect::<Vec<_>>(),
                "truncation": max_words,
            }));
            Ok((report, None))
        }

        Command::Convinv { file } => {
            let def = load(file)?;
            let sc = def.simply_colored()?;
            let block = def
                .morphism_blocks()
                .iter()
                .find(|b| b.source == "coalgebra" && b.target == "algebra")
                .ok_or_else(|| {
                    CmdError::Usage("need a morphism block with source coalgebra, target algebra".into())
                })?
                .clone();
            let f = def.conv_map(&block)?;
            let mut report = CliReport::new("convinv", file);
            match conv_inverse(&sc, &f) {
                Ok(h) => {
                    report.data = Some(json!({
                        "inverse": matrix_rows(&h.matrix),
                        "verified": true,
                    }));
                }
                Err(ConvError::NotInvertibleOnColor(g)) => {
                    report.fail("convolution invertible", format!("f({g}) has no inverse"));
                }
                Err(e) => report.fail("convolution inverse", e.to_string()),
            }
            Ok((report, None))
        }

        Command::Antipode { file } => {
            let def = load(file)?;
            let sc = def.simply_colored()?;
            let b = def.bialgebra()?;
            let mut report = CliReport::new("antipode", file);
            match antipode(&b, &sc) {
                Ok(s) => {
                    let names = sc.coalgebra().basis_names();
                    let images: Vec<String> = (0..sc.dim())
                        .map(|i| {
                            format!(
                                "S({}) = {}",
                                names[i],
                                format_combination(names, &s.matrix.column_to_vec(i))
                            )
                        })
                        .collect();
                    report.data = Some(json!({
                        "antipode": matrix_rows(&s.matrix),
                        "images": images,
                    }));
                }
                Err(ConvError::NotAGroup(w)) => report.fail("set-likes form a group", w),
                Err(e) => report.fail("antipode", e.to_string()),
            }
            Ok((report, None))
        }

        Command::Coproduct { file, emit } => {
            let def = load(file)?;
            let a = def.simply_colored()?;
            let b = def.simply_colored2()?;
            let (sum, _) = coproduct(&[a, b]).map_err(|e| CmdError::Usage(e.to_string()))?;
            if *emit {
                let out = emit_simply_colored(&sum, Some("coproduct".into()));
                let report = CliReport::new("coproduct", file);
                return Ok((report, Some(out.to_json())));
            }
            let mut report = CliReport::new("coproduct", file);
            report.data = Some(json!({
                "dim": sum.dim(),
                "basis": sum.coalgebra().basis_names(),
                "colors": sum.color_labels(),
            }));
            Ok((report, None))
        }

        Command::Equalizer { file } => {
            let def = load(file)?;
            let src = def.simply_colored()?;
            let dst = if def.coalgebra2.is_some() {
                def.simply_colored2()?
            } else {
                src.clone()
            };
            let blocks = def.morphism_blocks();
            if blocks.len() < 2 {
                return Err(CmdError::Usage("equalizer needs two morphism blocks".into()));
            }
            let mut pair = Vec::new();
            for block in &blocks[..2] {
                let m = def.morphism_matrix(block)?;
                pair.push(
                    CoalgebraMorphism::new(src.coalgebra(), dst.coalgebra(), m)
                        .map_err(|e| CmdError::Usage(e.to_string()))?,
                );
            }
            let mut report = CliReport::new("equalizer", file);
            match equalizer(&src, &dst, &pair[0], &pair[1]) {
                Ok(eq) => {
                    let basis: Vec<String> = eq
                        .subspace
                        .basis_vectors()
                        .iter()
                        .map(|v| format_combination(src.coalgebra().basis_names(), v))
                        .collect();
                    report.data = Some(json!({
                        "dim": eq.object.dim(),
                        "basis": basis,
                        "colors": eq.object.color_labels(),
                    }));
                }
                Err(e) => report.fail("equalizer", e.to_string()),
            }
            Ok((report, None))
        }

        Command::Coequalizer { file } => {
            let def = load(file)?;
            let src = def.simply_colored()?.reduce();
            let dst = if def.coalgebra2.is_some() {
                def.simply_colored2()?.reduce()
            } else {
                src.clone()
            };
            let blocks = def.morphism_blocks();
            if blocks.len() < 2 {
                return Err(CmdError::Usage("coequalizer needs two morphism blocks".into()));
            }
            let mut pair = Vec::new();
            for block in &blocks[..2] {
                let m = def.morphism_matrix(block)?;
                let colors = block.colors.clone().ok_or_else(|| {
                    CmdError::Usage(format!("morphism {} needs a colors map", block.name))
                })?;
                let color_map: Result<Vec<usize>, CmdError> = src
                    .colors()
                    .iter()
                    .map(|g| {
                        let target = colors.get(g).ok_or_else(|| {
                            CmdError::Usage(format!("color map misses `{g}`"))
                        })?;
                        dst.colors()
                            .iter()
                            .position(|h| h == target)
                            .ok_or_else(|| CmdError::Usage(format!("unknown color `{target}`")))
                    })
                    .collect();
                pair.push(
                    ColoredMorphism::new(m, color_map?, &src, &dst)
                        .map_err(|e| CmdError::Usage(e.to_string()))?,
                );
            }
            let mut report = CliReport::new("coequalizer", file);
            match coequalizer_reduced(&src, &dst, &pair[0], &pair[1]) {
                Ok(coeq) => {
                    report.data = Some(json!({
                        "dim": coeq.object.dim(),
                        "colors": coeq.object.colors(),
                        "color_classes": coeq.color_classes,
                        "projection": matrix_rows(&coeq.projection.fbar),
                    }));
                }
                Err(e) => report.fail("coequalizer", e.to_string()),
            }
            Ok((report, None))
        }

        Command::Product { file, max_words } => {
            let def = load(file)?;
            let a = def.simply_colored()?.reduce();
            let b = def.simply_colored2()?.reduce();
            let mut report = CliReport::new("product", file);
            match product_truncated(&[a, b], *max_words) {
                Ok(p) => {
                    report.data = Some(json!({
                        "dim": p.object.dim(),
                        "colors": p.object.colors(),
                        "truncation": p.truncation,
                        "approximate": p.approximate,
                    }));
                }
                Err(e) => report.fail("product", e.to_string()),
            }
            Ok((report, None))
        }
    }
}

fn matrix_rows(m: &coalg::Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| m.row_to_vec(r).iter().map(|s| s.to_string()).collect())
        .collect()
}

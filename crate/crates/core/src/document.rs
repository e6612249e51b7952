//! Plain-text documents for algebras, modules, cochains and sections.
//!
//! The grammar is described in `docs/FORMAT.md`. Every diagnostic carries
//! the line it was raised on.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::cochain::{Bilinear, OneCochain, TwoCochain};
use crate::formal::VecSeries1;
use crate::linalg::QMatrix;
use crate::scalars::{parse_rational, Rational};
use crate::valg::{FiniteVertexAlgebra, ModuleStructure, Structure};
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// A parsed algebra with an optional module block.
#[derive(Clone, Debug)]
pub struct AlgebraDocument {
    pub algebra: FiniteVertexAlgebra,
    pub module: Option<ModuleStructure>,
}

impl AlgebraDocument {
    /// The module block, or `V` acting on itself.
    pub fn module(&self) -> ModuleStructure {
        self.module
            .clone()
            .unwrap_or_else(|| ModuleStructure::regular(&self.algebra))
    }
}

/// Reads `[1, 0, 1/2]` or a combination such as `2*x - 1/2*y` (`0` is the
/// zero vector unless a basis element is called `0`).
pub fn parse_vector(text: &str, names: &[String], line: usize) -> Result<Vec<Rational>> {
    let text = text.trim();
    let dim = names.len();
    if let Some(inner) = text.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| parse_err(line, "unterminated coordinate list"))?;
        let coords: Vec<Rational> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|c| parse_rational(c.trim()).map_err(|e| parse_err(line, e.to_string())))
                .collect::<Result<_>>()?
        };
        if coords.len() != dim {
            return Err(parse_err(
                line,
                format!("expected {dim} coordinates, found {}", coords.len()),
            ));
        }
        return Ok(coords);
    }
    let mut out = vec![Rational::zero(); dim];
    if text == "0" && !names.iter().any(|n| n == "0") {
        return Ok(out);
    }
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(parse_err(line, "empty vector"));
    }
    let mut terms = Vec::new();
    let mut current = String::new();
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !current.ends_with('*') && !current.ends_with('/') {
            terms.push(std::mem::take(&mut current));
        }
        current.push(ch);
    }
    terms.push(current);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-Rational::one(), rest),
            None => (Rational::one(), term.strip_prefix('+').unwrap_or(&term)),
        };
        let (coef, name) = match body.split_once('*') {
            Some((c, n)) => (parse_rational(c).map_err(|e| parse_err(line, e.to_string()))?, n),
            None => (Rational::one(), body),
        };
        let idx = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| parse_err(line, format!("unknown basis element `{name}`")))?;
        out[idx] += sign * coef;
    }
    Ok(out)
}

/// `2*x - 1/2*y`, or `0`.
pub fn format_vector(v: &[Rational], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in v.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let negative = c < &Rational::zero();
        let abs = if negative { -c.clone() } else { c.clone() };
        let term = if abs.is_one() {
            name.clone()
        } else {
            format!("{abs}*{name}")
        };
        match (out.is_empty(), negative) {
            (true, false) => out.push_str(&term),
            (true, true) => write!(out, "-{term}").unwrap(),
            (false, false) => write!(out, " + {term}").unwrap(),
            (false, true) => write!(out, " - {term}").unwrap(),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Significant lines with their 1-based numbers, comments stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn split_eq(rest: &str, line: usize) -> Result<(&str, &str)> {
    rest.split_once('=')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| parse_err(line, "expected `=`"))
}

fn index_of(names: &[String], name: &str, line: usize) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| parse_err(line, format!("unknown basis element `{name}`")))
}

fn parse_exponent(token: &str, line: usize) -> Result<i64> {
    token
        .strip_prefix("z^")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected `z^K`, found `{token}`")))
}

fn unique_names(names: &[String], line: usize) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(parse_err(line, format!("basis element `{n}` listed twice")));
        }
        if n.contains(['+', '-', '*', '[', ']', '=', ',']) {
            return Err(parse_err(
                line,
                format!("basis name `{n}` contains a reserved character"),
            ));
        }
    }
    Ok(())
}

#[derive(Default)]
struct Block {
    names: Option<(usize, Vec<String>)>,
    vacuum: Option<(usize, String)>,
    endo: Vec<(usize, String, String)>,
    kind: Option<(usize, String)>,
    valid_to: Option<i64>,
    entries: Vec<(usize, String, String, Option<i64>, String)>,
}

struct Built {
    names: Vec<String>,
    endo: QMatrix,
    structure: Structure,
    lines: BTreeMap<(usize, usize), usize>,
    header: usize,
}

fn build_block(block: &Block, left: &[String], what: &str) -> Result<Built> {
    let (name_line, names) = block
        .names
        .clone()
        .ok_or_else(|| parse_err(0, format!("{what} has no `basis` line")))?;
    let m = names.len();
    let mut endo = QMatrix::zeros(m, m);
    for (line, col, vec) in &block.endo {
        let c = index_of(&names, col, *line)?;
        for (r, x) in parse_vector(vec, &names, *line)?.into_iter().enumerate() {
            endo.set(r, c, x);
        }
    }
    let (header, kind) = block.kind.clone().unwrap_or((name_line, "holomorphic".into()));
    let mut lines = BTreeMap::new();
    let structure = match kind.as_str() {
        "holomorphic" => {
            let mut mult = vec![vec![vec![Rational::zero(); m]; m]; left.len()];
            for (line, a, b, k, vec) in &block.entries {
                if k.is_some() {
                    return Err(parse_err(*line, "holomorphic tables take no exponent"));
                }
                let (i, j) = (index_of(left, a, *line)?, index_of(&names, b, *line)?);
                if lines.insert((i, j), *line).is_some() {
                    return Err(parse_err(*line, format!("entry ({a}, {b}) given twice")));
                }
                mult[i][j] = parse_vector(vec, &names, *line)?;
            }
            Structure::Holomorphic { mult }
        }
        "explicit" => {
            let mut acc: BTreeMap<(usize, usize), BTreeMap<i64, Vec<Rational>>> = BTreeMap::new();
            for (line, a, b, k, vec) in &block.entries {
                let k = k.ok_or_else(|| parse_err(*line, "explicit tables need `z^K`"))?;
                let (i, j) = (index_of(left, a, *line)?, index_of(&names, b, *line)?);
                lines.entry((i, j)).or_insert(*line);
                let slot = acc.entry((i, j)).or_default();
                if slot.contains_key(&k) {
                    return Err(parse_err(
                        *line,
                        format!("coefficient of z^{k} at ({a}, {b}) given twice"),
                    ));
                }
                if block.valid_to.is_some_and(|t| k > t) {
                    return Err(parse_err(*line, format!("z^{k} lies beyond `valid-to`")));
                }
                slot.insert(k, parse_vector(vec, &names, *line)?);
            }
            let mut products = BTreeMap::new();
            for i in 0..left.len() {
                for j in 0..m {
                    let terms = acc.remove(&(i, j)).unwrap_or_default();
                    let low = terms.keys().next().copied().unwrap_or(0).min(0);
                    let s = VecSeries1::from_map(m, terms, low, block.valid_to);
                    if !s.is_zero() || !s.is_exact() {
                        products.insert((i, j), s);
                    }
                }
            }
            Structure::Explicit { products }
        }
        other => return Err(parse_err(header, format!("unknown structure kind `{other}`"))),
    };
    Ok(Built {
        names,
        endo,
        structure,
        lines,
        header,
    })
}

/// Points an invariant violation at the table line of the first cited pair.
fn locate(err: Error, names_a: &[String], names_b: &[String], built: &Built) -> Error {
    let Error::Invalid(message) = err else { return err };
    let line = message
        .split_once('(')
        .and_then(|(_, rest)| rest.split_once(')'))
        .and_then(|(inside, _)| {
            let parts: Vec<&str> = inside.split(", ").collect();
            let (a, b) = (*parts.first()?, *parts.get(1)?);
            let i = names_a.iter().position(|n| n == a)?;
            let j = names_b.iter().position(|n| n == b)?;
            built.lines.get(&(i, j)).copied()
        })
        .unwrap_or(built.header);
    parse_err(line, message)
}

/// Parses and validates an algebra document.
pub fn parse_algebra(text: &str) -> Result<AlgebraDocument> {
    let mut alg = Block::default();
    let mut module: Option<Block> = None;
    let mut module_kind: Option<(usize, String)> = None;
    let mut field_seen = false;
    for (line, l) in lines(text) {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        let in_module = module.is_some();
        let block = module.as_mut().unwrap_or(&mut alg);
        match head {
            "field" => {
                if rest != "Q" {
                    return Err(parse_err(
                        line,
                        format!("only the field Q is supported, found `{rest}`"),
                    ));
                }
                field_seen = true;
            }
            "basis" => {
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.is_empty() && !in_module {
                    return Err(parse_err(line, "empty basis"));
                }
                unique_names(&names, line)?;
                block.names = Some((line, names));
            }
            "vacuum" if !in_module => block.vacuum = Some((line, rest.to_string())),
            "D" | "d" => {
                let (col, vec) = split_eq(rest, line)?;
                block.endo.push((line, col.to_string(), vec.to_string()));
            }
            "structure" if !in_module => block.kind = Some((line, rest.to_string())),
            "action" if in_module => block.kind = Some((line, rest.to_string())),
            "valid-to" => {
                block.valid_to = Some(rest.parse().map_err(|_| parse_err(line, "expected an integer"))?);
            }
            "mult" | "product" | "act" => {
                if (head == "act") != in_module {
                    return Err(parse_err(line, format!("`{head}` is not allowed here")));
                }
                let (lhs, vec) = split_eq(rest, line)?;
                let parts: Vec<&str> = lhs.split_whitespace().collect();
                let (a, b, k) = match parts.as_slice() {
                    [a, b] => (a, b, None),
                    [a, b, k] => (a, b, Some(parse_exponent(k, line)?)),
                    _ => return Err(parse_err(line, "expected `A B [z^K] = VECTOR`")),
                };
                block
                    .entries
                    .push((line, a.to_string(), b.to_string(), k, vec.to_string()));
            }
            "module" => {
                if in_module || module_kind.is_some() {
                    return Err(parse_err(line, "only one module block is allowed"));
                }
                match rest {
                    "" => module = Some(Block::default()),
                    "regular" | "zero" => module_kind = Some((line, rest.to_string())),
                    other => return Err(parse_err(line, format!("unknown module kind `{other}`"))),
                }
            }
            other => return Err(parse_err(line, format!("unexpected `{other}`"))),
        }
    }
    if !field_seen {
        return Err(parse_err(1, "missing `field Q` line"));
    }
    let built = build_block(
        &alg,
        &alg.names.clone().map(|(_, n)| n).unwrap_or_default(),
        "the algebra",
    )?;
    let n = built.names.len();
    let vacuum = match &alg.vacuum {
        Some((line, v)) => parse_vector(v, &built.names, *line)?,
        None => {
            let mut v = vec![Rational::zero(); n];
            v[0] = Rational::one();
            v
        }
    };
    let algebra = FiniteVertexAlgebra::new(built.names.clone(), vacuum, built.endo.clone(), built.structure.clone())
        .map_err(|e| parse_err(built.header, e.to_string()))?;
    algebra
        .validate_preset()
        .map_err(|e| locate(e, &built.names, &built.names, &built))?;
    let module = match (module, module_kind) {
        (Some(block), _) => {
            let mb = build_block(&block, &built.names, "the module")?;
            let module = ModuleStructure::new(algebra.clone(), mb.names.clone(), mb.endo.clone(), mb.structure.clone())
                .map_err(|e| parse_err(mb.header, e.to_string()))?;
            module
                .validate_preset()
                .map_err(|e| locate(e, &built.names, &mb.names, &mb))?;
            Some(module)
        }
        (None, Some((_, kind))) if kind == "zero" => Some(ModuleStructure::zero(&algebra)),
        _ => None,
    };
    Ok(AlgebraDocument { algebra, module })
}

fn write_block(
    out: &mut String,
    left: &[String],
    names: &[String],
    endo: &QMatrix,
    endo_key: &str,
    structure: &Structure,
    entry_key: &str,
) {
    for c in 0..names.len() {
        let col = endo.column(c);
        if col.iter().any(|x| !x.is_zero()) {
            writeln!(out, "{endo_key} {} = {}", names[c], format_vector(&col, names)).unwrap();
        }
    }
    match structure {
        Structure::Holomorphic { mult } => {
            writeln!(
                out,
                "{} holomorphic",
                if entry_key == "act" { "action" } else { "structure" }
            )
            .unwrap();
            for (i, row) in mult.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if v.iter().any(|x| !x.is_zero()) {
                        let key = if entry_key == "act" { "act" } else { "mult" };
                        writeln!(out, "{key} {} {} = {}", left[i], names[j], format_vector(v, names)).unwrap();
                    }
                }
            }
        }
        Structure::Explicit { products } => {
            writeln!(
                out,
                "{} explicit",
                if entry_key == "act" { "action" } else { "structure" }
            )
            .unwrap();
            if let Some(t) = products.values().filter_map(VecSeries1::trunc).min() {
                writeln!(out, "valid-to {t}").unwrap();
            }
            for (&(i, j), s) in products {
                for (k, v) in s.terms() {
                    writeln!(
                        out,
                        "{entry_key} {} {} z^{k} = {}",
                        left[i],
                        names[j],
                        format_vector(v, names)
                    )
                    .unwrap();
                }
            }
        }
    }
}

/// Writes an algebra, and a module block when one is given.
pub fn write_algebra(alg: &FiniteVertexAlgebra, module: Option<&ModuleStructure>) -> String {
    let mut out = String::from("field Q\n");
    let names = alg.names();
    writeln!(out, "basis {}", names.join(" ")).unwrap();
    writeln!(out, "vacuum {}", format_vector(alg.vacuum(), names)).unwrap();
    write_block(
        &mut out,
        names,
        names,
        alg.derivation(),
        "D",
        alg.structure(),
        "product",
    );
    if let Some(m) = module {
        out.push_str("module\n");
        writeln!(out, "basis {}", m.names().join(" ")).unwrap();
        write_block(&mut out, names, m.names(), m.d(), "d", m.action(), "act");
    }
    out
}

/// A 1-cochain or 2-cochain read from a document.
#[derive(Clone, Debug, PartialEq)]
pub enum CochainDocument {
    One(OneCochain),
    Two(TwoCochain),
}

/// Parses a cochain against the basis names of `module`.
pub fn parse_cochain(text: &str, module: &ModuleStructure) -> Result<CochainDocument> {
    let v_names = module.algebra().names();
    let m_names = module.names();
    let (n, m) = (v_names.len(), m_names.len());
    let mut degree = None;
    let mut tail = 0usize;
    let mut zero = Bilinear::zeros(n, m);
    let mut tail_gen = Bilinear::zeros(n, m);
    let mut tail_line = None;
    let mut map = QMatrix::zeros(m, n);
    for (line, l) in lines(text) {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match (head, degree) {
            ("cochain", None) => {
                degree = Some(match rest {
                    "1" => 1,
                    "2" => 2,
                    _ => return Err(parse_err(line, "expected `cochain 1` or `cochain 2`")),
                })
            }
            (_, None) => return Err(parse_err(line, "document must start with `cochain 1` or `cochain 2`")),
            ("tail", Some(2)) => {
                tail = rest
                    .parse()
                    .map_err(|_| parse_err(line, "expected a nonnegative integer"))?;
            }
            ("f" | "tail-gen", Some(2)) => {
                let (lhs, vec) = split_eq(rest, line)?;
                let parts: Vec<&str> = lhs.split_whitespace().collect();
                let [a, b] = parts.as_slice() else {
                    return Err(parse_err(line, format!("expected `{head} A B = VECTOR`")));
                };
                let (i, j) = (index_of(v_names, a, line)?, index_of(v_names, b, line)?);
                let value = parse_vector(vec, m_names, line)?;
                if head == "f" {
                    zero.set(i, j, value);
                } else {
                    tail_gen.set(i, j, value);
                    tail_line = Some(line);
                }
            }
            ("g", Some(1)) => {
                let (a, vec) = split_eq(rest, line)?;
                let c = index_of(v_names, a, line)?;
                for (r, x) in parse_vector(vec, m_names, line)?.into_iter().enumerate() {
                    map.set(r, c, x);
                }
            }
            (other, _) => return Err(parse_err(line, format!("unexpected `{other}`"))),
        }
    }
    match degree {
        Some(1) => {
            let g = OneCochain::new(map);
            g.validate(module).map_err(|e| parse_err(1, e.to_string()))?;
            Ok(CochainDocument::One(g))
        }
        Some(_) => {
            if let Some(line) = tail_line.filter(|_| tail == 0) {
                return Err(parse_err(line, "`tail-gen` needs a positive `tail`"));
            }
            let f =
                TwoCochain::new(tail, (tail > 0).then_some(tail_gen), zero).map_err(|e| parse_err(1, e.to_string()))?;
            Ok(CochainDocument::Two(f))
        }
        None => Err(parse_err(1, "empty cochain document")),
    }
}

pub fn write_one_cochain(g: &OneCochain, module: &ModuleStructure) -> String {
    let mut out = String::from("cochain 1\n");
    let names = module.algebra().names();
    for (c, name) in names.iter().enumerate() {
        let col = g.map().column(c);
        if col.iter().any(|x| !x.is_zero()) {
            writeln!(out, "g {name} = {}", format_vector(&col, module.names())).unwrap();
        }
    }
    out
}

pub fn write_two_cochain(f: &TwoCochain, module: &ModuleStructure) -> String {
    let mut out = String::from("cochain 2\n");
    writeln!(out, "tail {}", f.tail_depth()).unwrap();
    let names = module.algebra().names();
    let mut blocks = vec![("f", f.zero_coeff())];
    if let Some(t) = f.tail_gen() {
        blocks.push(("tail-gen", t));
    }
    for (key, b) in blocks {
        for (i, a) in names.iter().enumerate() {
            for (j, c) in names.iter().enumerate() {
                let v = b.get(i, j);
                if v.iter().any(|x| !x.is_zero()) {
                    writeln!(out, "{key} {a} {c} = {}", format_vector(v, module.names())).unwrap();
                }
            }
        }
    }
    out
}

/// A section `V → Λ`; unlisted basis elements map to their canonical lift.
pub fn parse_section(text: &str, base: &FiniteVertexAlgebra, total: &FiniteVertexAlgebra) -> Result<QMatrix> {
    let (n, k) = (base.dim(), total.dim());
    let mut gamma = QMatrix::zeros(k, n);
    for i in 0..n.min(k) {
        gamma.set(i, i, Rational::one());
    }
    let mut header = false;
    for (line, l) in lines(text) {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match (head, header) {
            ("section", false) => header = true,
            (_, false) => return Err(parse_err(line, "document must start with `section`")),
            ("s", true) => {
                let (a, vec) = split_eq(rest.trim(), line)?;
                let c = index_of(base.names(), a, line)?;
                for (r, x) in parse_vector(vec, total.names(), line)?.into_iter().enumerate() {
                    gamma.set(r, c, x);
                }
            }
            (other, true) => return Err(parse_err(line, format!("unexpected `{other}`"))),
        }
    }
    if !header {
        return Err(parse_err(1, "empty section document"));
    }
    Ok(gamma)
}

pub fn write_section(gamma: &QMatrix, base: &FiniteVertexAlgebra, total: &FiniteVertexAlgebra) -> String {
    let mut out = String::from("section\n");
    for (c, name) in base.names().iter().enumerate() {
        writeln!(out, "s {name} = {}", format_vector(&gamma.column(c), total.names())).unwrap();
    }
    out
}

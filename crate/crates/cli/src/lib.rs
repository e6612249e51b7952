//! The `vertexcoh` command line. [`run`] returns the exit code and the
//! report so tests can drive it without spawning processes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use vertexcoh::cochain::{is_cocycle, validate_c2, Context};
use vertexcoh::cohomology::{compare_harrison, h0, h1, h2, render_representative, CohomologyReport, Representative};
use vertexcoh::construct::{
    build_deformation, build_extension, deformations_equivalent, extensions_equivalent, extract_cocycle, find_section,
    SquareZeroExtension,
};
use vertexcoh::document::{
    format_vector, parse_algebra, parse_cochain, parse_section, write_algebra, write_one_cochain, write_two_cochain,
    AlgebraDocument, CochainDocument,
};
use vertexcoh::harrison::{harrison_h2, CommAlgebra, CommModule};
use vertexcoh::valg::{check_all, check_module};
use vertexcoh::{Error, ModuleStructure, OneCochain, Settings, TwoCochain, Window};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "vertexcoh",
    version,
    about = "Cohomology of finite-dimensional vertex algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Associativity and locality witness bound.
    #[arg(long, global = true)]
    lmax: Option<usize>,
    /// Cocycle witness bound.
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Tail depth of 2-cochains.
    #[arg(long, global = true)]
    tail: Option<usize>,
    /// Sampling window radii `X,Z`.
    #[arg(long, global = true, value_parser = parse_window)]
    window: Option<Window>,
    /// Truncation order for non-nilpotent exponentials.
    #[arg(long, global = true, default_value_t = 8)]
    trunc: i64,
    /// Also write the main result to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit cohomology reports as JSON.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the vertex-algebra axioms.
    Check { algebra: PathBuf },
    /// Check the module axioms of the module block (or the regular module).
    CheckModule { algebra: PathBuf },
    /// Invariants of the module.
    H0 { algebra: PathBuf },
    /// Vertex derivations into the module.
    H1 { algebra: PathBuf },
    /// Second cohomology, with representative cocycles.
    H2 { algebra: PathBuf },
    /// Check that a 2-cochain is a 2-cocycle.
    Cocycle { algebra: PathBuf, cochain: PathBuf },
    /// The coboundary of a 1-cochain.
    Delta1 { algebra: PathBuf, cochain: PathBuf },
    /// Build the square-zero extension of a 2-cocycle.
    Extend { algebra: PathBuf, cochain: PathBuf },
    /// Read the cocycle of an extension off a section.
    Extract {
        algebra: PathBuf,
        total: PathBuf,
        section: Option<PathBuf>,
    },
    /// Decide whether two extensions are equivalent.
    EquivExt {
        algebra: PathBuf,
        first: PathBuf,
        second: PathBuf,
    },
    /// Build the first-order deformation of a 2-cochain.
    Deform { algebra: PathBuf, cochain: PathBuf },
    /// Decide whether two first-order deformations are equivalent.
    EquivDef {
        algebra: PathBuf,
        first: PathBuf,
        second: PathBuf,
    },
    /// Harrison H² of a commutative algebra with `D = 0`.
    Harrison { algebra: PathBuf },
    /// Compare H² against the Harrison computation.
    CompareHarrison { algebra: PathBuf },
}

fn parse_window(text: &str) -> Result<Window, String> {
    let (x, z) = text.split_once(',').ok_or_else(|| "expected `X,Z`".to_string())?;
    let x: i64 = x.trim().parse().map_err(|_| format!("bad radius `{x}`"))?;
    let z: i64 = z.trim().parse().map_err(|_| format!("bad radius `{z}`"))?;
    if x < 0 || z < 0 {
        return Err("window radii must be nonnegative".into());
    }
    Ok(Window::symmetric(x, z))
}

/// Exit code and text of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

impl Outcome {
    fn new(code: i32, output: String) -> Self {
        Self { code, output }
    }
}

/// Runs one command line (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Outcome::new(code, e.render().to_string());
        }
    };
    match execute(&cli) {
        Ok(outcome) => outcome,
        Err(Error::Usage(message)) => Outcome::new(EXIT_USAGE, format!("error: {message}\n")),
        Err(e) => Outcome::new(EXIT_USAGE, format!("error: {e}\n")),
    }
}

fn settings(opts: &Opts) -> Settings {
    Settings {
        l_max: opts.lmax,
        n_max: opts.nmax,
        trunc: opts.trunc,
        window: opts.window,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, message } => Error::Usage(format!("{}:{line}: {message}", path.display())),
        other => other,
    }
}

fn load_algebra(path: &Path) -> Result<AlgebraDocument, Error> {
    parse_algebra(&read(path)?).map_err(|e| with_path(path, e))
}

fn load_two(path: &Path, module: &ModuleStructure) -> Result<TwoCochain, Error> {
    match parse_cochain(&read(path)?, module).map_err(|e| with_path(path, e))? {
        CochainDocument::Two(f) => Ok(f),
        CochainDocument::One(_) => Err(Error::Usage(format!(
            "{} holds a 1-cochain, expected a 2-cochain",
            path.display()
        ))),
    }
}

fn load_one(path: &Path, module: &ModuleStructure) -> Result<OneCochain, Error> {
    match parse_cochain(&read(path)?, module).map_err(|e| with_path(path, e))? {
        CochainDocument::One(g) => Ok(g),
        CochainDocument::Two(_) => Err(Error::Usage(format!(
            "{} holds a 2-cochain, expected a 1-cochain",
            path.display()
        ))),
    }
}

fn write_out(opts: &Opts, text: &str) -> Result<(), Error> {
    if let Some(path) = &opts.out {
        fs::write(path, text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn code(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn cohomology_output(opts: &Opts, report: &CohomologyReport, module: &ModuleStructure) -> Result<Outcome, Error> {
    let text = if opts.json {
        let mut s = serde_json::to_string_pretty(&report.to_json(module)).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        report.render(module)
    };
    write_out(opts, &text)?;
    Ok(Outcome::new(EXIT_OK, text))
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    let opts = &cli.opts;
    let s = settings(opts);
    match &cli.command {
        Command::Check { algebra } => {
            let doc = load_algebra(algebra)?;
            let report = check_all(&doc.algebra, &s);
            let text = report.to_string();
            write_out(opts, &text)?;
            Ok(Outcome::new(code(report.passed()), text))
        }
        Command::CheckModule { algebra } => {
            let module = load_algebra(algebra)?.module();
            let report = check_module(&module, &s);
            let text = report.to_string();
            write_out(opts, &text)?;
            Ok(Outcome::new(code(report.passed()), text))
        }
        Command::H0 { algebra } => {
            let module = load_algebra(algebra)?.module();
            cohomology_output(opts, &h0(&module, &s), &module)
        }
        Command::H1 { algebra } => {
            let module = load_algebra(algebra)?.module();
            cohomology_output(opts, &h1(&module, &s), &module)
        }
        Command::H2 { algebra } => {
            let module = load_algebra(algebra)?.module();
            let report = h2(&module, &s, opts.tail)?;
            cohomology_output(opts, &report, &module)
        }
        Command::Cocycle { algebra, cochain } => {
            let module = load_algebra(algebra)?.module();
            let f = load_two(cochain, &module)?;
            let ctx = Context::new(&module, &s, Some(opts.tail.unwrap_or(0).max(f.tail_depth())));
            let f = f.with_tail_depth(ctx.tail()).expect("tail depth only grows");
            let mut report = validate_c2(&f, &ctx);
            report.merge(is_cocycle(&f, &ctx));
            let text = report.to_string();
            write_out(opts, &text)?;
            Ok(Outcome::new(code(report.passed()), text))
        }
        Command::Delta1 { algebra, cochain } => {
            let module = load_algebra(algebra)?.module();
            let g = load_one(cochain, &module)?;
            let ctx = Context::new(&module, &s, opts.tail);
            let f = ctx.delta1(&g)?;
            let text = write_two_cochain(&f, &module);
            write_out(opts, &text)?;
            Ok(Outcome::new(EXIT_OK, text))
        }
        Command::Extend { algebra, cochain } => {
            let module = load_algebra(algebra)?.module();
            let f = load_two(cochain, &module)?;
            let ext = build_extension(&module, &f, &s)?;
            let doc = write_algebra(&ext.total, None);
            write_out(opts, &doc)?;
            let mut text = ext.report.to_string();
            writeln!(text, "square-zero kernel: {}", ext.kernel_is_square_zero(s.trunc)).unwrap();
            text.push_str("---\n");
            text.push_str(&doc);
            Ok(Outcome::new(code(ext.report.passed()), text))
        }
        Command::Extract {
            algebra,
            total,
            section,
        } => {
            let module = load_algebra(algebra)?.module();
            let total_doc = load_algebra(total)?;
            let ext = SquareZeroExtension::from_total(&module, total_doc.algebra, &s)?;
            let gamma = match section {
                Some(p) => parse_section(&read(p)?, &ext.base, &ext.total).map_err(|e| with_path(p, e))?,
                None => find_section(&ext.base, &ext.total)?,
            };
            let f = extract_cocycle(&ext, &gamma, &s)?;
            let text = write_two_cochain(&f, &module);
            write_out(opts, &text)?;
            Ok(Outcome::new(EXIT_OK, text))
        }
        Command::EquivExt { algebra, first, second } => {
            let module = load_algebra(algebra)?.module();
            let (f1, f2) = (load_two(first, &module)?, load_two(second, &module)?);
            let g = extensions_equivalent(&f1, &f2, &module, &s)?;
            equivalence_output(
                opts,
                g,
                &module,
                "h(a,u) = (a, u + g(a)) is an isomorphism of the extensions",
            )
        }
        Command::Deform { algebra, cochain } => {
            let alg = load_algebra(algebra)?.algebra;
            let module = ModuleStructure::regular(&alg);
            let f = load_two(cochain, &module)?;
            let def = build_deformation(&alg, &f, &s)?;
            let mut doc = write_algebra(&alg, None);
            doc.push_str("# first-order table: a ⋆_z b = a ⊙_z b + t·(listed)\n");
            for ((i, j), series) in def.first_order_table() {
                for (k, v) in series.terms() {
                    writeln!(
                        doc,
                        "# t {} {} z^{k} = {}",
                        alg.names()[i],
                        alg.names()[j],
                        format_vector(v, alg.names())
                    )
                    .unwrap();
                }
            }
            write_out(opts, &doc)?;
            let mut text = def.report.to_string();
            text.push_str("---\n");
            text.push_str(&doc);
            Ok(Outcome::new(code(def.report.passed()), text))
        }
        Command::EquivDef { algebra, first, second } => {
            let alg = load_algebra(algebra)?.algebra;
            let module = ModuleStructure::regular(&alg);
            let (f1, f2) = (load_two(first, &module)?, load_two(second, &module)?);
            let g = deformations_equivalent(&f1, &f2, &alg, &s)?;
            equivalence_output(
                opts,
                g,
                &module,
                "φ_t = 1 + t·g intertwines the deformed products mod t²",
            )
        }
        Command::Harrison { algebra } => {
            let doc = load_algebra(algebra)?;
            let module = doc.module();
            let comm = CommAlgebra::from_preset(&doc.algebra)?;
            let comm_module = CommModule::from_module(&module, &comm)?;
            let report = harrison_h2(&comm, &comm_module)?;
            let mut text = format!(
                "dim H^2 (Harrison) = {}\ncocycles {}, coboundaries {}\n",
                report.dimension, report.cocycle_dim, report.coboundary_dim
            );
            let (n, m) = (doc.algebra.dim(), module.dim());
            for (i, c) in report.representatives.iter().enumerate() {
                let rep = Representative::Two(TwoCochain::from_coords(n, m, 0, c));
                writeln!(text, "representative {}:", i + 1).unwrap();
                text.push_str(&render_representative(&rep, &module));
            }
            write_out(opts, &text)?;
            Ok(Outcome::new(EXIT_OK, text))
        }
        Command::CompareHarrison { algebra } => {
            let module = load_algebra(algebra)?.module();
            let cmp = compare_harrison(&module, &s)?;
            let text = cmp.render();
            write_out(opts, &text)?;
            Ok(Outcome::new(code(cmp.agree), text))
        }
    }
}

fn equivalence_output(
    opts: &Opts,
    g: Option<OneCochain>,
    module: &ModuleStructure,
    verified: &str,
) -> Result<Outcome, Error> {
    match g {
        Some(g) => {
            let doc = write_one_cochain(&g, module);
            write_out(opts, &doc)?;
            Ok(Outcome::new(
                EXIT_OK,
                format!("equivalent\n{verified} (verified)\n---\n{doc}"),
            ))
        }
        None => Ok(Outcome::new(
            EXIT_FAIL,
            "inequivalent: the difference is not a coboundary\n".into(),
        )),
    }
}

//! Command-line front end. Exit codes: 0 success, valid or equal; 1 invalid
//! or unequal; 2 usage, I/O or parse error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{realizable_typesets_bounded, typesets_of_graph, TypesetFamily};
use crate::canon::{canonically_equal, canonize};
use crate::chargen::{characteristic, weakly_characteristic};
use crate::format::{
    parse_schema, parse_typed_graph, print_schema, print_typed_graph, SchemaDocument,
};
use crate::graph::TypedGraph;
use crate::learner::typed_learner;
use crate::symbol::TypeName;
use crate::validate::{Mode, Validator};

#[derive(Debug, Parser)]
#[command(
    name = "shex0",
    version,
    about = "Validate, canonize and infer shape graphs over typed graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Infer a shape graph from a typed graph
    Infer {
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
        #[arg(long)]
        order: Option<String>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Write the derivation log as JSON lines
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a typed graph against a shape graph
    Validate {
        #[arg(short = 'g', long = "graph")]
        graph: PathBuf,
        #[arg(short = 's', long = "schema")]
        schema: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Witness)]
        mode: ModeArg,
    },
    /// Print the canonical form of a shape graph
    Canonize {
        #[arg(short = 's', long = "schema")]
        schema: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        order: Option<String>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Generate a characteristic typed graph for a shape graph
    Chargen {
        #[arg(short = 's', long = "schema")]
        schema: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        /// Add the pair nodes needed for obfuscated types
        #[arg(long)]
        characteristic: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Compare two shape graphs by their canonical forms
    Eq {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        order: Option<String>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct FamilyArgs {
    /// Take the typesets of this typed graph
    #[arg(long = "typesets-from")]
    typesets_from: Option<PathBuf>,
    /// Search realizable typesets up to this depth
    #[arg(long = "search-depth")]
    search_depth: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Witness,
    Strict,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<TypedGraph, Failure> {
    parse_typed_graph(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_schema(path: &Path) -> Result<SchemaDocument, Failure> {
    parse_schema(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(Failure::from),
    }
}

/// `lex` (or nothing) gives the lexicographic order; otherwise a file with
/// one type per line that must list every type in `needed`.
fn resolve_order(
    arg: Option<&str>,
    header: Option<&[TypeName]>,
    needed: &BTreeSet<TypeName>,
) -> Result<Vec<TypeName>, Failure> {
    let listed: Vec<TypeName> = match arg {
        None => return Ok(header.map(<[TypeName]>::to_vec).unwrap_or_default()),
        Some("lex") => return Ok(Vec::new()),
        Some(path) => read(Path::new(path))?
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(TypeName::new)
            .collect(),
    };
    let have: BTreeSet<&TypeName> = listed.iter().collect();
    if let Some(missing) = needed.iter().find(|t| !have.contains(t)) {
        return Err(Failure(format!(
            "order file does not list type `{missing}`"
        )));
    }
    Ok(listed)
}

fn family(args: &FamilyArgs, schemas: &[&SchemaDocument]) -> Result<TypesetFamily, Failure> {
    if let Some(path) = &args.typesets_from {
        return Ok(typesets_of_graph(&load_graph(path)?)?);
    }
    let depth = args
        .search_depth
        .unwrap_or(crate::analysis::DEFAULT_SEARCH_DEPTH);
    if depth == 0 {
        return Err(Failure("--search-depth must be at least 1".into()));
    }
    let mut families = schemas
        .iter()
        .map(|d| realizable_typesets_bounded(&d.shape, depth).family);
    let first = families.next().expect("at least one schema");
    Ok(families.fold(first, |acc, f| acc.union(&f)))
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Infer {
            graph,
            order,
            output,
            report,
        } => {
            let g = load_graph(&graph)?;
            let base = resolve_order(order.as_deref(), None, &g.types())?;
            let r = typed_learner(&g, &base)?;
            if let Some(path) = report {
                emit(out, Some(&path), &r.to_json_lines())?;
            }
            emit(out, output.as_deref(), &print_schema(&r.schema))?;
            Ok(0)
        }
        Command::Validate {
            graph,
            schema,
            mode,
        } => {
            let g = load_graph(&graph)?;
            let doc = load_schema(&schema)?;
            let mode = match mode {
                ModeArg::Witness => Mode::Witness,
                ModeArg::Strict => Mode::Strict,
            };
            let verdict =
                Validator::new(&g.graph, &doc.shape, g.typing.types()).check(&g.typing, mode);
            for d in &verdict.diagnostics {
                writeln!(out, "{}", serde_json::to_string(d)?)?;
            }
            Ok(if verdict.is_valid() { 0 } else { 1 })
        }
        Command::Canonize {
            schema,
            family: fam,
            order,
            output,
        } => {
            let doc = load_schema(&schema)?;
            let f = family(&fam, &[&doc])?;
            let base = resolve_order(order.as_deref(), doc.order.as_deref(), doc.shape.types())?;
            let (canon, _) = canonize(&doc.shape, &f, &base);
            emit(out, output.as_deref(), &print_schema(&canon))?;
            Ok(0)
        }
        Command::Chargen {
            schema,
            family: fam,
            characteristic: full,
            output,
        } => {
            let doc = load_schema(&schema)?;
            let f = family(&fam, &[&doc])?;
            let g = if full {
                characteristic(&doc.shape, &f)?
            } else {
                weakly_characteristic(&doc.shape, &f)?
            };
            emit(out, output.as_deref(), &print_typed_graph(&g))?;
            Ok(0)
        }
        Command::Eq {
            a,
            b,
            family: fam,
            order,
        } => {
            let (da, db) = (load_schema(&a)?, load_schema(&b)?);
            let f = family(&fam, &[&da, &db])?;
            let needed: BTreeSet<TypeName> =
                da.shape.types().union(db.shape.types()).cloned().collect();
            let base = resolve_order(order.as_deref(), da.order.as_deref(), &needed)?;
            let equal = canonically_equal(&da.shape, &db.shape, &f, &base);
            writeln!(out, "{}", if equal { "equal" } else { "unequal" })?;
            Ok(if equal { 0 } else { 1 })
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

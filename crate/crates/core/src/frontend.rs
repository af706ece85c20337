//! Text formats and the command-line driver.
//!
//! Presentations are written `<a b | a^2 B, abAB>`: lowercase letters are
//! generators, uppercase letters their inverses, `^k` repeats the preceding
//! letter. Complexes, subgroups and projections use small line-oriented files
//! with `#` comments.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Parser, Subcommand};

use crate::complex::{basepoint_component, fundamental_group_presentation, ComplexData, SignedEdge, TwoComplex};
use crate::coset::{schreier_generators, todd_coxeter, CosetError, CosetTable, DEFAULT_MAX_COSETS};
use crate::cover::{
    build_cover, deck_group_order, galois_roundtrip_check, universal_cover, CoverError, CoveringMap, GaloisOptions,
};
use crate::lens::{
    classify_lens_covers, verify_lens_pullback_group, verify_lens_pullback_group_with_generator, LensSpaceDesc,
    PullbackStatus,
};
use crate::lowindex::{conjugacy_classes, low_index_subgroups};
use crate::presentation::{make_presentation, Presentation};
use crate::words::{Letter, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_RESOURCE_EXHAUSTED: i32 = 3;

/// A syntax or validation error in one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    fn new(message: impl Into<String>) -> ParseError {
        ParseError { line: None, message: message.into() }
    }

    fn at(line: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: Some(line), message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

// ---------------------------------------------------------------------------
// words and presentations

fn single_letter(name: &str) -> Option<char> {
    let mut cs = name.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Some(c),
        _ => None,
    }
}

/// Parses a word over single-letter generator `names`.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word, ParseError> {
    let mut raw: Vec<Letter> = Vec::new();
    let mut last: Option<Letter> = None;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if c == '^' {
            let Some(letter) = last.take() else {
                return Err(ParseError::new("malformed `^`: nothing to repeat"));
            };
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                digits.push(d);
                chars.next();
            }
            let k: usize = digits.parse().map_err(|_| ParseError::new("malformed `^`: expected a positive integer"))?;
            if k == 0 {
                return Err(ParseError::new("malformed `^`: exponent must be positive"));
            }
            raw.extend(std::iter::repeat_n(letter, k - 1));
            continue;
        }
        if !c.is_ascii_alphabetic() {
            return Err(ParseError::new(format!("unknown letter `{c}`")));
        }
        let lower = c.to_ascii_lowercase();
        let Some(g) = names.iter().position(|n| single_letter(n) == Some(lower)) else {
            return Err(ParseError::new(format!("letter `{lower}` is not a declared generator")));
        };
        let letter = if c.is_ascii_uppercase() { Letter::neg(g) } else { Letter::pos(g) };
        raw.push(letter);
        last = Some(letter);
    }
    Word::reduce(names.len(), raw).map_err(|e| ParseError::new(e.to_string()))
}

/// Writes `w` in the text syntax, with runs collapsed to `x^k`.
///
/// Returns `None` if some generator in `w` has a name that is not a single
/// lowercase letter.
pub fn format_word(w: &Word, names: &[String]) -> Option<String> {
    let mut out = String::new();
    let letters = w.letters();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let c = single_letter(&names[l.generator])?;
        out.push(if l.inverse { c.to_ascii_uppercase() } else { c });
        if j - i > 1 {
            let _ = write!(out, "^{}", j - i);
        }
        i = j;
    }
    Some(out)
}

/// Writes `w` with full generator names, e.g. `a g26^-1 b^3`, for alphabets
/// the letter syntax cannot express.
fn format_word_verbose(w: &Word, names: &[String]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let letters = w.letters();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let exp = (j - i) as i64 * if l.inverse { -1 } else { 1 };
        let name = &names[l.generator];
        parts.push(if exp == 1 { name.clone() } else { format!("{name}^{exp}") });
        i = j;
    }
    parts.join(" ")
}

pub fn parse_presentation_text(s: &str) -> Result<Presentation, ParseError> {
    let body = s.trim();
    let body = body
        .strip_prefix('<')
        .and_then(|b| b.strip_suffix('>'))
        .ok_or_else(|| ParseError::new("a presentation must be written `<gens | relators>`"))?;
    let (gens, rels) =
        body.split_once('|').ok_or_else(|| ParseError::new("missing `|` between generators and relators"))?;
    let names: Vec<String> = gens.split_whitespace().map(str::to_string).collect();
    if names.is_empty() {
        return Err(ParseError::new("empty generator list"));
    }
    for n in &names {
        if single_letter(n).is_none() {
            return Err(ParseError::new(format!("generator `{n}` must be a single lowercase letter")));
        }
    }
    let mut relators = Vec::new();
    if !rels.trim().is_empty() {
        for (i, r) in rels.split(',').enumerate() {
            if r.trim().is_empty() {
                return Err(ParseError::new(format!("relator {i} is empty")));
            }
            let w = parse_word(r, &names).map_err(|e| ParseError::new(format!("relator {i}: {}", e.message)))?;
            relators.push(w);
        }
    }
    make_presentation(&names, relators).map_err(|e| ParseError::new(e.to_string()))
}

/// The text form of `p`, or `None` if a generator name is not a single
/// lowercase letter.
pub fn serialize_presentation(p: &Presentation) -> Option<String> {
    let names = p.generator_names();
    if names.iter().any(|n| single_letter(n).is_none()) {
        return None;
    }
    let rels: Vec<String> = p.relators().iter().map(|r| format_word(r, names).expect("checked")).collect();
    Some(format!("<{} | {}>", names.join(" "), rels.join(", ")))
}

/// Human-readable form: the text syntax when possible, otherwise full names.
pub fn format_presentation(p: &Presentation) -> String {
    if let Some(s) = serialize_presentation(p).filter(|_| p.generator_count() > 0) {
        return s;
    }
    let names = p.generator_names();
    let rels: Vec<String> = p.relators().iter().map(|r| format_word_verbose(r, names)).collect();
    format!("<{} | {}>", names.join(" "), rels.join(", "))
}

// ---------------------------------------------------------------------------
// complex files

/// Splits off the comment and yields `(line_number, fields)` for each
/// nonblank line.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn number(line: usize, field: Option<&str>, what: &str) -> Result<usize, ParseError> {
    let field = field.ok_or_else(|| ParseError::at(line, format!("missing {what}")))?;
    field.parse().map_err(|_| ParseError::at(line, format!("malformed {what} `{field}`")))
}

fn no_more<'a>(line: usize, mut fields: impl Iterator<Item = &'a str>) -> Result<(), ParseError> {
    match fields.next() {
        Some(extra) => Err(ParseError::at(line, format!("unexpected field `{extra}`"))),
        None => Ok(()),
    }
}

fn signed_edge(line: usize, field: &str) -> Result<SignedEdge, ParseError> {
    let (reversed, digits) = match field.as_bytes().first() {
        Some(b'+') => (false, &field[1..]),
        Some(b'-') => (true, &field[1..]),
        _ => return Err(ParseError::at(line, format!("signed edge `{field}` must start with `+` or `-`"))),
    };
    let edge: usize = digits.parse().map_err(|_| ParseError::at(line, format!("malformed signed edge `{field}`")))?;
    Ok(SignedEdge { edge, reversed })
}

pub fn parse_complex_file(text: &str) -> Result<TwoComplex, ParseError> {
    let mut name = None;
    let mut vertex_count = None;
    let mut cell3_count = None;
    let mut basepoint = None;
    let mut edges = Vec::new();
    let mut faces = Vec::new();
    for (line, content) in content_lines(text) {
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let mut fields = rest.split_whitespace();
        let once = |slot_taken: bool| {
            if slot_taken {
                Err(ParseError::at(line, format!("duplicate `{keyword}` line")))
            } else {
                Ok(())
            }
        };
        match keyword {
            "complex" => {
                once(name.is_some())?;
                let n = rest.trim();
                if n.is_empty() {
                    return Err(ParseError::at(line, "missing complex name"));
                }
                name = Some(n.to_string());
            }
            "vertices" => {
                once(vertex_count.is_some())?;
                vertex_count = Some(number(line, fields.next(), "vertex count")?);
                no_more(line, fields)?;
            }
            "edge" => {
                let id = number(line, fields.next(), "edge id")?;
                if id != edges.len() {
                    return Err(ParseError::at(line, format!("edge id {id} out of order, expected {}", edges.len())));
                }
                let s = number(line, fields.next(), "edge source")?;
                let t = number(line, fields.next(), "edge target")?;
                no_more(line, fields)?;
                edges.push((s, t));
            }
            "face" => {
                let id = number(line, fields.next(), "face id")?;
                if id != faces.len() {
                    return Err(ParseError::at(line, format!("face id {id} out of order, expected {}", faces.len())));
                }
                let boundary = fields.map(|f| signed_edge(line, f)).collect::<Result<Vec<_>, _>>()?;
                faces.push(boundary);
            }
            "cell3" => {
                once(cell3_count.is_some())?;
                cell3_count = Some(number(line, fields.next(), "3-cell count")?);
                no_more(line, fields)?;
            }
            "basepoint" => {
                once(basepoint.is_some())?;
                basepoint = Some(number(line, fields.next(), "basepoint")?);
                no_more(line, fields)?;
            }
            other => return Err(ParseError::at(line, format!("unknown keyword `{other}`"))),
        }
    }
    let data = ComplexData {
        name,
        vertex_count: vertex_count.ok_or_else(|| ParseError::new("missing `vertices` line"))?,
        edges,
        faces,
        cell3_count: cell3_count.unwrap_or(0),
        basepoint: basepoint.ok_or_else(|| ParseError::new("missing `basepoint` line"))?,
    };
    TwoComplex::new(data).map_err(|report| ParseError::new(report.to_string()))
}

pub fn serialize_complex(x: &TwoComplex) -> String {
    let mut out = String::new();
    if let Some(name) = x.name() {
        let _ = writeln!(out, "complex {name}");
    }
    let _ = writeln!(out, "vertices {}", x.vertex_count());
    for (e, (s, t)) in x.edges().iter().enumerate() {
        let _ = writeln!(out, "edge {e} {s} {t}");
    }
    for (f, boundary) in x.faces().iter().enumerate() {
        let _ = write!(out, "face {f}");
        for s in boundary {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
    }
    if x.cell3_count() > 0 {
        let _ = writeln!(out, "cell3 {}", x.cell3_count());
    }
    let _ = writeln!(out, "basepoint {}", x.basepoint());
    out
}

// ---------------------------------------------------------------------------
// subgroup and projection files

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupSpec {
    Generators(Vec<Word>),
    Table(CosetTable),
}

impl SubgroupSpec {
    /// The standardized coset table of the subgroup.
    pub fn resolve(&self, p: &Arc<Presentation>, max_cosets: usize) -> Result<CosetTable, CosetError> {
        match self {
            SubgroupSpec::Generators(gens) => todd_coxeter(Arc::clone(p), gens, max_cosets),
            SubgroupSpec::Table(t) => Ok(crate::coset::standardize_table(t)),
        }
    }
}

pub fn parse_subgroup_file(text: &str, p: &Arc<Presentation>) -> Result<SubgroupSpec, ParseError> {
    let mut lines = content_lines(text);
    let Some((first, header)) = lines.next() else {
        return Err(ParseError::new("empty subgroup file"));
    };
    let mut head = header.split_whitespace();
    match head.next() {
        Some("generators") => {
            no_more(first, head)?;
            let mut gens = Vec::new();
            for (line, content) in lines {
                let w = parse_word(content, p.generator_names()).map_err(|e| ParseError::at(line, e.message))?;
                gens.push(w);
            }
            Ok(SubgroupSpec::Generators(gens))
        }
        Some("table") => {
            let n = number(first, head.next(), "coset count")?;
            no_more(first, head)?;
            let mut rows = Vec::new();
            for (line, content) in lines {
                let row = content
                    .split_whitespace()
                    .map(|f| number(line, Some(f), "coset"))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(row);
            }
            if rows.len() != n {
                return Err(ParseError::new(format!("table declares {n} cosets but has {} rows", rows.len())));
            }
            CosetTable::from_rows(Arc::clone(p), &rows)
                .map(SubgroupSpec::Table)
                .map_err(|e| ParseError::new(e.to_string()))
        }
        _ => Err(ParseError::at(first, "subgroup file must start with `generators` or `table <n>`")),
    }
}

/// `table <n>` followed by one row per coset; readable by
/// [`parse_subgroup_file`].
pub fn serialize_table(t: &CosetTable) -> String {
    let mut out = format!("table {}\n", t.coset_count());
    for c in 0..t.coset_count() {
        let row: Vec<String> = t.row(c).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Cell-by-cell projection of a cover.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Projection {
    pub vmap: Vec<usize>,
    pub emap: Vec<usize>,
    pub fmap: Vec<usize>,
}

impl From<&CoveringMap> for Projection {
    fn from(c: &CoveringMap) -> Projection {
        Projection { vmap: c.vertex_map().to_vec(), emap: c.edge_map().to_vec(), fmap: c.face_map().to_vec() }
    }
}

pub fn serialize_projection(p: &Projection) -> String {
    let mut out = String::new();
    for (kind, map) in [("vmap", &p.vmap), ("emap", &p.emap), ("fmap", &p.fmap)] {
        for (i, b) in map.iter().enumerate() {
            let _ = writeln!(out, "{kind} {i} {b}");
        }
    }
    out
}

pub fn parse_projection_file(text: &str) -> Result<Projection, ParseError> {
    let mut p = Projection::default();
    for (line, content) in content_lines(text) {
        let mut fields = content.split_whitespace();
        let map = match fields.next() {
            Some("vmap") => &mut p.vmap,
            Some("emap") => &mut p.emap,
            Some("fmap") => &mut p.fmap,
            Some(other) => return Err(ParseError::at(line, format!("unknown keyword `{other}`"))),
            None => unreachable!("blank lines are skipped"),
        };
        let i = number(line, fields.next(), "total cell")?;
        let b = number(line, fields.next(), "base cell")?;
        no_more(line, fields)?;
        if i != map.len() {
            return Err(ParseError::at(line, format!("cell {i} out of order, expected {}", map.len())));
        }
        map.push(b);
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// command line

#[derive(Parser, Debug)]
#[command(name = "cover", about = "Covering spaces of 2-complexes and low-index subgroups")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Cap on live cosets during enumeration.
    #[arg(long, global = true, env = "COVER_MAX_COSETS", default_value_t = DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    /// Write the main result here instead of standard output.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    /// Suppress progress lines on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for the round-trip check.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Presentation of the fundamental group of a complex.
    Pi1 {
        #[arg(value_name = "COMPLEX")]
        complex: PathBuf,
    },
    /// Order of a finite group, by coset enumeration over the trivial subgroup.
    Order {
        #[arg(value_name = "GROUP")]
        group: String,
    },
    /// Coset table of a subgroup.
    Cosets {
        #[arg(value_name = "GROUP")]
        group: String,
        #[arg(value_name = "SUBGROUP")]
        subgroup: PathBuf,
    },
    /// All subgroups up to an index.
    Subgroups {
        #[arg(value_name = "GROUP")]
        group: String,
        #[arg(long, value_name = "N", required = true)]
        max_index: usize,
        /// Also group the subgroups into conjugacy classes.
        #[arg(long)]
        conjugacy: bool,
    },
    /// Cover attached to a subgroup.
    Cover {
        #[arg(value_name = "COMPLEX")]
        complex: PathBuf,
        #[arg(value_name = "SUBGROUP")]
        subgroup: PathBuf,
        /// Also write the cell projection to this file.
        #[arg(long)]
        projection: Option<PathBuf>,
    },
    /// Universal cover of a complex with finite fundamental group.
    Universal {
        #[arg(value_name = "COMPLEX")]
        complex: PathBuf,
        #[arg(long)]
        projection: Option<PathBuf>,
    },
    /// Order of the deck group of the cover attached to a subgroup.
    Deck {
        #[arg(value_name = "COMPLEX")]
        complex: PathBuf,
        #[arg(value_name = "SUBGROUP")]
        subgroup: PathBuf,
    },
    /// Connected covers of a lens space.
    LensClassify {
        #[arg(value_name = "N")]
        n: i64,
        #[arg(value_name = "PARAMS", value_parser = parse_int_list)]
        params: IntList,
    },
    /// Brute-force check of the fiber-product group of a lens cover.
    LensVerify {
        #[arg(value_name = "N")]
        n: i64,
        #[arg(value_name = "M")]
        m: i64,
        #[arg(value_name = "L")]
        l: i64,
        /// Bound on |a|; defaults to 10n.
        #[arg(long)]
        window: Option<i64>,
        /// Candidate generator `p,l` to test instead of the expected one.
        #[arg(long, value_parser = parse_int_list)]
        generator: Option<IntList>,
    },
    /// Subgroup and cover round trips up to an index.
    VerifyGalois {
        #[arg(value_name = "COMPLEX")]
        complex: PathBuf,
        #[arg(long, value_name = "N", required = true)]
        max_index: usize,
    },
    /// Invariant factors and free rank of the abelianization.
    Abelianize {
        #[arg(value_name = "GROUP")]
        group: String,
    },
    /// The connected component of the basepoint.
    Component {
        #[arg(value_name = "COMPLEX")]
        complex: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntList(pub Vec<i64>);

fn parse_int_list(s: &str) -> Result<IntList, String> {
    s.split(',')
        .map(|f| f.trim().parse::<i64>().map_err(|_| format!("malformed number `{}`", f.trim())))
        .collect::<Result<Vec<_>, _>>()
        .map(IntList)
}

/// A group given either inline as `<gens | relators>` or as a path to a file
/// holding a presentation or a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSource {
    Literal(String),
    File(PathBuf),
}

impl GroupSource {
    fn from_arg(s: String) -> GroupSource {
        if s.trim_start().starts_with('<') {
            GroupSource::Literal(s)
        } else {
            GroupSource::File(PathBuf::from(s))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Pi1 { complex: PathBuf },
    Order { group: GroupSource },
    Cosets { group: GroupSource, subgroup: PathBuf },
    Subgroups { group: GroupSource, conjugacy: bool },
    Cover { complex: PathBuf, subgroup: PathBuf },
    Universal { complex: PathBuf },
    Deck { complex: PathBuf, subgroup: PathBuf },
    LensClassify { n: i64, params: Vec<i64> },
    LensVerify { n: i64, m: i64, l: i64, generator: Option<(i64, i64)> },
    VerifyGalois { complex: PathBuf },
    Abelianize { group: GroupSource },
    Component { complex: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    pub max_cosets: usize,
    pub max_index: Option<usize>,
    pub window: Option<i64>,
    pub output: Option<PathBuf>,
    pub projection: Option<PathBuf>,
    pub quiet: bool,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandPlan {
    pub command: Command,
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad invocation; the message names the offending argument.
    Usage(String),
    /// `--help` or `--version`; the text goes to standard output.
    Help(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Help(h) => f.write_str(h),
        }
    }
}

fn describe_arg(arg: &str) -> String {
    match arg.trim_start_matches('<').trim_end_matches(['>', '.']) {
        "COMPLEX" => "complex file".into(),
        "SUBGROUP" => "subgroup file".into(),
        "GROUP" => "group".into(),
        "N" if arg.starts_with('<') => "order n".into(),
        "M" => "divisor m".into(),
        "L" => "parameter l".into(),
        "PARAMS" => "parameter list".into(),
        _ => arg.split_whitespace().next().unwrap_or(arg).to_string(),
    }
}

fn context_strings(err: &clap::Error, kind: ContextKind) -> Vec<String> {
    match err.get(kind) {
        Some(ContextValue::String(s)) => vec![s.clone()],
        Some(ContextValue::Strings(v)) => v.clone(),
        _ => Vec::new(),
    }
}

fn usage_message(err: &clap::Error) -> String {
    let invalid_arg = context_strings(err, ContextKind::InvalidArg);
    let first_arg = invalid_arg.first().map(|a| describe_arg(a)).unwrap_or_default();
    match err.kind() {
        ErrorKind::MissingRequiredArgument => format!("missing {first_arg}"),
        ErrorKind::InvalidSubcommand => {
            let cmd = context_strings(err, ContextKind::InvalidSubcommand);
            format!("unknown command `{}`", cmd.first().map(String::as_str).unwrap_or(""))
        }
        ErrorKind::MissingSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => "missing command".into(),
        ErrorKind::ValueValidation | ErrorKind::InvalidValue => {
            let value = context_strings(err, ContextKind::InvalidValue);
            format!("malformed number `{}` for {first_arg}", value.first().map(String::as_str).unwrap_or(""))
        }
        ErrorKind::UnknownArgument => {
            format!("unknown argument `{}`", invalid_arg.first().map(String::as_str).unwrap_or(""))
        }
        _ => err.to_string().lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ").to_string(),
    }
}

/// Parses the full argument vector, program name first.
pub fn parse_cli<I, S>(argv: I) -> Result<CommandPlan, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Err(CliError::Help(e.render().to_string()))
        }
        Err(e) => return Err(CliError::Usage(usage_message(&e))),
    };
    let mut options = Options {
        max_cosets: cli.max_cosets,
        max_index: None,
        window: None,
        output: cli.output,
        projection: None,
        quiet: cli.quiet,
        workers: cli.workers.max(1),
    };
    let command = match cli.command {
        Sub::Pi1 { complex } => Command::Pi1 { complex },
        Sub::Order { group } => Command::Order { group: GroupSource::from_arg(group) },
        Sub::Cosets { group, subgroup } => Command::Cosets { group: GroupSource::from_arg(group), subgroup },
        Sub::Subgroups { group, max_index, conjugacy } => {
            options.max_index = Some(max_index);
            Command::Subgroups { group: GroupSource::from_arg(group), conjugacy }
        }
        Sub::Cover { complex, subgroup, projection } => {
            options.projection = projection;
            Command::Cover { complex, subgroup }
        }
        Sub::Universal { complex, projection } => {
            options.projection = projection;
            Command::Universal { complex }
        }
        Sub::Deck { complex, subgroup } => Command::Deck { complex, subgroup },
        Sub::LensClassify { n, params } => Command::LensClassify { n, params: params.0 },
        Sub::LensVerify { n, m, l, window, generator } => {
            if window.is_some_and(|w| w < 1) {
                return Err(CliError::Usage("window must be positive".into()));
            }
            options.window = window;
            let generator = match generator.map(|g| g.0) {
                None => None,
                Some(g) if g.len() == 2 => Some((g[0], g[1])),
                Some(_) => return Err(CliError::Usage("--generator takes two numbers `p,l`".into())),
            };
            Command::LensVerify { n, m, l, generator }
        }
        Sub::VerifyGalois { complex, max_index } => {
            options.max_index = Some(max_index);
            Command::VerifyGalois { complex }
        }
        Sub::Abelianize { group } => Command::Abelianize { group: GroupSource::from_arg(group) },
        Sub::Component { complex } => Command::Component { complex },
    };
    Ok(CommandPlan { command, options })
}

/// An execution failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INPUT_ERROR, message: message.into() }
    }
}

impl From<CosetError> for Failure {
    fn from(e: CosetError) -> Failure {
        let code =
            if matches!(e, CosetError::ResourceExhausted { .. }) { EXIT_RESOURCE_EXHAUSTED } else { EXIT_INPUT_ERROR };
        Failure { code, message: e.to_string() }
    }
}

impl From<CoverError> for Failure {
    fn from(e: CoverError) -> Failure {
        match e {
            CoverError::Coset(c) => c.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_complex(path: &Path) -> Result<TwoComplex, Failure> {
    let text = read_file(path)?;
    parse_complex_file(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_group(source: &GroupSource) -> Result<Presentation, Failure> {
    match source {
        GroupSource::Literal(s) => parse_presentation_text(s).map_err(|e| Failure::input(format!("presentation: {e}"))),
        GroupSource::File(path) => {
            let text = read_file(path)?;
            let parsed = if content_lines(&text).next().is_some_and(|(_, l)| l.starts_with('<')) {
                let joined: Vec<&str> = content_lines(&text).map(|(_, l)| l).collect();
                parse_presentation_text(&joined.join(" "))
            } else {
                parse_complex_file(&text).map(|x| fundamental_group_presentation(&x).presentation)
            };
            parsed.map_err(|e| Failure::input(format!("{}: {e}", path.display())))
        }
    }
}

fn load_subgroup(path: &Path, p: &Arc<Presentation>, max_cosets: usize) -> Result<CosetTable, Failure> {
    let text = read_file(path)?;
    let spec = parse_subgroup_file(&text, p).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(spec.resolve(p, max_cosets)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

struct Run<'a> {
    options: &'a Options,
    err: &'a mut dyn Write,
}

impl Run<'_> {
    fn progress(&mut self, line: &str) {
        if !self.options.quiet {
            let _ = writeln!(self.err, "{line}");
        }
    }

    fn pi1(&mut self, x: &TwoComplex) -> crate::complex::FundamentalGroup {
        let pi = fundamental_group_presentation(x);
        if !pi.ignored.is_empty() {
            let i = &pi.ignored;
            self.progress(&format!(
                "ignoring {} vertices, {} edges and {} faces outside the basepoint component",
                i.vertices, i.edges, i.faces
            ));
        }
        pi
    }

    fn cover_output(&mut self, cover: &CoveringMap) -> Result<String, Failure> {
        if let Some(path) = &self.options.projection {
            write_file(path, &serialize_projection(&Projection::from(cover)))?;
        }
        self.progress(&format!("{} sheets", cover.sheets()));
        Ok(serialize_complex(cover.total()))
    }

    /// The text for standard output and the exit code.
    fn execute(&mut self, command: &Command) -> Result<(String, i32), Failure> {
        let opts = self.options;
        let mut out = String::new();
        let mut code = EXIT_OK;
        match command {
            Command::Pi1 { complex } => {
                let x = load_complex(complex)?;
                let pi = self.pi1(&x);
                let _ = writeln!(out, "{}", format_presentation(&pi.presentation));
            }
            Command::Order { group } => {
                let p = load_group(group)?;
                self.progress(&format!("enumerating cosets of the trivial subgroup (cap {})", opts.max_cosets));
                let t = todd_coxeter(p, &[], opts.max_cosets)?;
                let _ = writeln!(out, "{}", t.coset_count());
            }
            Command::Cosets { group, subgroup } => {
                let p = Arc::new(load_group(group)?);
                let t = load_subgroup(subgroup, &p, opts.max_cosets)?;
                out = serialize_table(&t);
            }
            Command::Subgroups { group, conjugacy } => {
                let p = Arc::new(load_group(group)?);
                let max_index = opts.max_index.expect("parser requires --max-index");
                let tables = low_index_subgroups(Arc::clone(&p), max_index);
                for (i, t) in tables.iter().enumerate() {
                    let gens: Vec<String> = schreier_generators(t)
                        .iter()
                        .map(|w| {
                            format_word(w, p.generator_names())
                                .unwrap_or_else(|| format_word_verbose(w, p.generator_names()))
                        })
                        .collect();
                    let _ = writeln!(out, "{i} index={} generators={}", t.coset_count(), gens.join(", "));
                }
                if *conjugacy {
                    for (k, class) in conjugacy_classes(&tables).iter().enumerate() {
                        let members: Vec<String> = class.iter().map(|m| m.to_string()).collect();
                        let _ = writeln!(out, "class={k} members={}", members.join(","));
                    }
                }
            }
            Command::Cover { complex, subgroup } => {
                let x = load_complex(complex)?;
                let p = Arc::new(self.pi1(&x).presentation);
                let t = load_subgroup(subgroup, &p, opts.max_cosets)?;
                let cover = build_cover(&x, &t)?;
                out = self.cover_output(&cover)?;
            }
            Command::Universal { complex } => {
                let x = load_complex(complex)?;
                self.progress(&format!("enumerating the fundamental group (cap {})", opts.max_cosets));
                let cover = universal_cover(&x, opts.max_cosets)?;
                out = self.cover_output(&cover)?;
            }
            Command::Deck { complex, subgroup } => {
                let x = load_complex(complex)?;
                let p = Arc::new(self.pi1(&x).presentation);
                let t = load_subgroup(subgroup, &p, opts.max_cosets)?;
                let cover = build_cover(&x, &t)?;
                let _ = writeln!(out, "{}", deck_group_order(&cover));
            }
            Command::LensClassify { n, params } => {
                let l = LensSpaceDesc::new(*n, params).map_err(|e| Failure::input(e.to_string()))?;
                let records = classify_lens_covers(&l).map_err(|e| Failure::input(e.to_string()))?;
                for r in records {
                    let ps: Vec<String> = r.cover.params().iter().map(|x| x.to_string()).collect();
                    let _ = writeln!(out, "m={} p={} sheets={} params={}", r.m, r.p, r.sheets, ps.join(","));
                }
            }
            Command::LensVerify { n, m, l, generator } => {
                let window = opts.window.unwrap_or(10 * n);
                let report = match generator {
                    None => verify_lens_pullback_group(*n, *m, *l, window),
                    Some(g) => verify_lens_pullback_group_with_generator(*n, *m, *l, window, *g),
                }
                .map_err(|e| Failure::input(e.to_string()))?;
                let _ = writeln!(out, "{report}");
                if report.status == PullbackStatus::Fail {
                    code = EXIT_VERIFICATION_FAILED;
                }
            }
            Command::VerifyGalois { complex } => {
                let x = load_complex(complex)?;
                let max_index = opts.max_index.expect("parser requires --max-index");
                let options = GaloisOptions { max_cosets: opts.max_cosets, workers: opts.workers };
                let report = galois_roundtrip_check(&x, max_index, options)?;
                let _ = writeln!(out, "{report}");
                if !report.all_passed() {
                    code = EXIT_VERIFICATION_FAILED;
                }
            }
            Command::Abelianize { group } => {
                let inv = load_group(group)?.abelianization();
                let factors: Vec<String> = inv.invariant_factors.iter().map(|f| f.to_string()).collect();
                let _ = writeln!(out, "factors={}", factors.join(","));
                let _ = writeln!(out, "free_rank={}", inv.free_rank);
            }
            Command::Component { complex } => {
                let x = load_complex(complex)?;
                out = serialize_complex(&basepoint_component(&x));
            }
        }
        Ok((out, code))
    }
}

/// Runs a plan, writing results to `out` (or the `-o` file) and diagnostics
/// to `err`. Returns the process exit code.
pub fn execute_plan(plan: &CommandPlan, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut run = Run { options: &plan.options, err };
    let result = run.execute(&plan.command).and_then(|(text, code)| {
        match &plan.options.output {
            Some(path) => write_file(path, &text)?,
            None => out.write_all(text.as_bytes()).map_err(|e| Failure::input(format!("cannot write output: {e}")))?,
        }
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point shared by the binary: parse, execute, map errors to codes.
pub fn run_cli<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match parse_cli(argv) {
        Ok(plan) => execute_plan(&plan, out, err),
        Err(CliError::Help(text)) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            EXIT_INPUT_ERROR
        }
    }
}

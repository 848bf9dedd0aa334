//! Batch command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, IsTerminal, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::beta::{self, BetaSequence, Move};
use crate::covers;
use crate::error::{Error, Result};
use crate::gapshift::{self, GapSpec};
use crate::graph::LabelledGraph;
use crate::invariants::{bowen_franks_with_det, SparseIntMatrix};
use crate::renewal::{self, GeneratingList, InvestigationResult, Status, DEFAULT_MAX_WORDS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sofic", version, about = "Invariants of sofic shifts, renewal systems, beta-shifts and gap shifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Investigate renewal systems: a file of generating lists, the words of one list,
    /// or lists on stdin when no argument is given.
    #[command(alias = "irs")]
    Investigate(InvestigateArgs),
    /// Replace each generating list by an irreducible one with a flow equivalent shift.
    Reduce(InputArgs),
    /// All pairwise unions of the lists in two files.
    Add { first: String, second: String },
    /// Symmetric generating list built from exponents n_1 >= n_2 >= ... (one letter a_i per exponent).
    #[command(alias = "d0")]
    Symmetric {
        #[arg(required = true, num_args = 2..)]
        exponents: Vec<usize>,
    },
    /// Covers and invariants of a beta-shift.
    Beta(BetaArgs),
    /// Reduced form and invariants of a gap shift.
    Gap(GapArgs),
    /// Compute a cover of the shift presented by a labelled graph file.
    Covers {
        graph: String,
        #[arg(long, value_enum, default_value = "fischer")]
        kind: CoverKind,
    },
    /// Determinant and Bowen-Franks group of a nonnegative square matrix file.
    Bf { matrix: String },
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// A file name, or the words of a single generating list.
    pub input: Vec<String>,
}

#[derive(Args, Debug)]
pub struct InvestigateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Maximal number of allowed words before a system is abandoned.
    #[arg(short = 'n', long = "max-words", default_value_t = DEFAULT_MAX_WORDS, value_parser = positive)]
    pub max_words: usize,
    /// Ask before abandoning a system at the word cap.
    #[arg(short = 'i', long)]
    pub interactive: bool,
    /// Report strongly synchronizing and extendable word counts.
    #[arg(short = 's', long = "sync-info")]
    pub sync_info: bool,
    /// Also write the result lines to this file.
    #[arg(short = 'f', long = "file")]
    pub output: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BetaCover {
    Fischer,
    Krieger,
    Fiber,
}

#[derive(Args, Debug)]
pub struct BetaArgs {
    #[arg(long, default_value = "")]
    pub pre: String,
    #[arg(long)]
    pub period: String,
    /// Print this cover as a graph file instead of the summary.
    #[arg(long, value_enum)]
    pub cover: Option<BetaCover>,
    /// Print the moves leading to the standard form.
    #[arg(long)]
    pub standard: bool,
    /// Compare with another sequence given as `PRE:PERIOD`.
    #[arg(long)]
    pub compare: Option<String>,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    /// `e1,e2|f1,f2|N`, or `e1,e2,...` for a finite set.
    #[arg(long)]
    pub set: String,
    /// Print the right Fischer cover of the reduced form.
    #[arg(long)]
    pub cover: bool,
    /// Compare with another set in the same notation.
    #[arg(long)]
    pub compare: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CoverKind {
    Fischer,
    RightFischer,
    Krieger,
    PastSet,
    Generalized,
    FiberProduct,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_PARSE,
        Error::ResourceCap(_) => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, stdin, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Investigate(a) => cmd_investigate(a, stdin, out, err),
        Command::Reduce(a) => {
            for l in read_input(&a.input, stdin)? {
                writeln!(out, "{}", renewal::reduce_irreducible(&l).with_name(&l.name))?;
            }
            Ok(EXIT_OK)
        }
        Command::Add { first, second } => {
            let (l1, l2) = (read_file_lists(&first)?, read_file_lists(&second)?);
            for a in &l1 {
                for b in &l2 {
                    writeln!(out, "{}", renewal::add_lists(a, b))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Symmetric { exponents } => {
            writeln!(out, "{}", renewal::symmetric_system(&exponents)?)?;
            Ok(EXIT_OK)
        }
        Command::Beta(a) => cmd_beta(a, out),
        Command::Gap(a) => cmd_gap(a, out),
        Command::Covers { graph, kind } => {
            let g = LabelledGraph::from_text(&fs::read_to_string(&graph)?)?;
            let c = match kind {
                CoverKind::Fischer => covers::fischer_cover_left(&g)?,
                CoverKind::RightFischer => covers::fischer_cover_right(&g)?,
                CoverKind::Krieger => covers::krieger_cover_left(&covers::fischer_cover_left(&g)?)?.graph,
                CoverKind::PastSet => covers::past_set_cover(&covers::fischer_cover_left(&g)?)?.graph,
                CoverKind::Generalized => {
                    let k = covers::krieger_cover_left(&covers::fischer_cover_left(&g)?)?;
                    covers::generalized_fischer_cover(&k).graph
                }
                CoverKind::FiberProduct => covers::fiber_product_cover(&covers::fischer_cover_right(&g)?),
            };
            write!(out, "{}", c.to_text())?;
            Ok(EXIT_OK)
        }
        Command::Bf { matrix } => {
            let m = SparseIntMatrix::from_text(&fs::read_to_string(&matrix)?)?;
            if !m.is_square() {
                return Err(Error::Invalid("matrix must be square".into()));
            }
            let (det, bf) = bowen_franks_with_det(&m);
            writeln!(out, "det={det} group={}", bf.group_string())?;
            Ok(EXIT_OK)
        }
    }
}

fn read_file_lists(path: &str) -> Result<Vec<GeneratingList>> {
    renewal::parse_lists(&fs::read_to_string(path)?)
}

/// One argument naming an existing file is read as a file; otherwise the arguments
/// are the words of one list. With no arguments the lists come from stdin.
fn read_input(input: &[String], stdin: &mut dyn BufRead) -> Result<Vec<GeneratingList>> {
    match input {
        [] => {
            let mut text = String::new();
            stdin.read_to_string(&mut text)?;
            renewal::parse_lists(&text)
        }
        [path] if std::path::Path::new(path).is_file() => read_file_lists(path),
        words => {
            let words: Vec<&str> = words.iter().map(String::as_str).collect();
            Ok(vec![GeneratingList::new("unnamed", &words)?])
        }
    }
}

fn sync_report(r: &InvestigationResult) -> String {
    let mut s = String::new();
    for l in &r.levels {
        s.push_str(&format!(
            "  length {}: {} words, {} strongly synchronizing, {} left-extendable, {} right-extendable\n",
            l.length, l.words, l.strongly_synchronizing, l.left_extendable, l.right_extendable
        ));
    }
    s
}

fn cmd_investigate(a: InvestigateArgs, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let single = a.input.input.len() > 1;
    let lists = read_input(&a.input.input, stdin)?;
    // prompting only makes sense with a terminal on the other end
    let interactive = a.interactive && std::io::stdin().is_terminal();
    let results: Vec<InvestigationResult> = if interactive {
        lists
            .iter()
            .map(|l| {
                let mut ask = |l: &GeneratingList, words: usize| {
                    eprint!("{}: {words} allowed words reached; continue? [y/N] ", l.name);
                    let mut answer = String::new();
                    std::io::stdin().read_line(&mut answer).is_ok() && answer.trim().eq_ignore_ascii_case("y")
                };
                renewal::investigate_with_prompt(l, a.max_words, &mut ask)
            })
            .collect()
    } else {
        lists.par_iter().map(|l| renewal::investigate(l, a.max_words)).collect()
    };

    let mut report = String::new();
    let mut capped = false;
    for r in &results {
        match r.status {
            Status::Sft { .. } => {
                writeln!(out, "{}", r.line())?;
                report.push_str(&r.line());
                report.push('\n');
                if a.sync_info {
                    write!(out, "{}", sync_report(r))?;
                }
            }
            Status::Inconclusive { max_length } => {
                capped = true;
                writeln!(err, "{}: abandoned at length {max_length}", r.list.name)?;
                if a.sync_info {
                    writeln!(out, "{}", r.line())?;
                    write!(out, "{}", sync_report(r))?;
                }
            }
        }
    }
    if let Some(path) = &a.output {
        fs::write(path, report)?;
    }
    Ok(if single && capped { EXIT_CAP } else { EXIT_OK })
}

fn cmd_beta(a: BetaArgs, out: &mut dyn Write) -> Result<i32> {
    let s = BetaSequence::parse(&format!("{}:{}", a.pre, a.period))?;
    if let Some(kind) = a.cover {
        let g = match kind {
            BetaCover::Fischer => beta::right_fischer_cover(&s),
            BetaCover::Krieger => {
                covers::krieger_cover_left(&beta::right_fischer_cover(&s).transpose())?.graph.transpose()
            }
            BetaCover::Fiber => beta::fiber_product_cover(&s)?,
        };
        write!(out, "{}", g.to_text())?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "g={s} n={} p={} S={}", s.n(), s.p(), s.invariant_s())?;
    writeln!(out, "{}", if s.is_sft() { "SFT" } else { "strictly sofic" })?;
    writeln!(out, "fischer BF={}", beta::bf_fischer(&s))?;
    if !s.is_periodic() {
        writeln!(out, "fiber BF={}", beta::bf_fiber(&s))?;
    }
    if a.standard {
        let bin = if s.is_binary() { s.clone() } else { beta::to_binary(&s)? };
        writeln!(out, "binary {bin}")?;
        if !bin.is_periodic() {
            for (m, b) in beta::standard_form_steps(&bin)? {
                match m {
                    Move::Delete => writeln!(out, "delete -> {b}")?,
                    Move::Insert(k) => writeln!(out, "insert k={k} -> {b}")?,
                }
            }
        }
    }
    if let Some(other) = a.compare {
        let t = BetaSequence::parse(&other)?;
        writeln!(out, "{}", beta::classify_flow(&s, &t))?;
    }
    Ok(EXIT_OK)
}

fn cmd_gap(a: GapArgs, out: &mut dyn Write) -> Result<i32> {
    let s = GapSpec::parse(&a.set)?;
    if let Ok(class) = gapshift::classify_sft(&s) {
        writeln!(out, "SFT: {class}")?;
    }
    let inv = gapshift::invariants(&s);
    if let Some(r) = &inv.reduced {
        writeln!(out, "reduced: {r}")?;
        if a.cover {
            write!(out, "{}", gapshift::right_fischer_cover(r)?.to_text())?;
        }
    }
    writeln!(out, "{inv}")?;
    if let Some(other) = a.compare {
        let t = GapSpec::parse(&other)?;
        writeln!(out, "{}", gapshift::flow_distinguish(&s, &t))?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("sofic").chain(args.iter().copied()), &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn investigate_words() {
        let (code, out, _) = call(&["irs", "aa", "aaa", "b"], "");
        assert_eq!(code, 0);
        assert_eq!(out, "unnamed: aa aaa b ; 2 ; -1 ; []\n");
    }

    #[test]
    fn investigate_stdin_and_empty() {
        let (code, out, _) = call(&["investigate"], "x: a b\ny: a b c\n");
        assert_eq!(code, 0);
        assert_eq!(out, "x: a b ; 1 ; -1 ; []\ny: a b c ; 1 ; -2 ; [2]\n");
        assert_eq!(call(&["investigate"], ""), (0, String::new(), String::new()));
    }

    #[test]
    fn appendix_flag_spelling() {
        let (code, _, err) = call(&["irs", "-n=50", "aa", "b"], "");
        assert_eq!(code, EXIT_CAP);
        assert!(err.contains("abandoned"));
        assert_eq!(call(&["irs", "-n=0", "a"], "").0, EXIT_USAGE);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["bogus"], "").0, EXIT_USAGE);
        assert_eq!(call(&["investigate"], "x: a a\n").0, EXIT_PARSE);
        assert_eq!(call(&["beta", "--period", "11"], "").0, EXIT_USAGE);
        assert_eq!(call(&["--help"], "").0, EXIT_OK);
    }

    #[test]
    fn gap_line() {
        let (code, out, _) = call(&["gap", "--set", "|0,1|3"], "");
        assert_eq!(code, 0);
        assert!(out.contains("k=2 n=3 BF=-Z/2Z"), "{out}");
    }

    #[test]
    fn beta_fischer_file() {
        let (code, out, _) = call(&["beta", "--pre", "11", "--period", "10", "--cover", "fischer"], "");
        assert_eq!(code, 0);
        let g = LabelledGraph::from_text(&out).unwrap();
        assert_eq!(g.vertex_count(), 4);
    }

    #[test]
    fn symmetric_and_reduce() {
        let (_, out, _) = call(&["d0", "4", "2"], "");
        assert!(out.starts_with("X(4,2):"));
        let (_, out, _) = call(&["reduce", "abc", "d"], "");
        assert_eq!(out, "unnamed: a b\n");
    }
}

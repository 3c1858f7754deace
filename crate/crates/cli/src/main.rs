mod commands;
mod replicate;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use fingram::derivation::Budget;
use fingram_cli::{Block, Report, Status, EXIT_ERROR};

#[derive(Parser, Debug)]
#[command(name = "fingram", version, about = "Indexed grammars of finite index: derivations, closure constructions, semilinear sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Longest word of interest.
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    /// Longest derivation explored.
    #[arg(long, global = true, default_value_t = 200)]
    pub max_steps: usize,
    /// Cap on the number of variables in a sentential form.
    #[arg(long, global = true)]
    pub max_width: Option<usize>,
    /// Cap on index-stack depth.
    #[arg(long, global = true)]
    pub max_stack: Option<usize>,
    /// Hard cap on distinct sentential forms per search.
    #[arg(long, global = true, default_value_t = fingram::derivation::DEFAULT_FRONTIER_CAP)]
    pub max_forms: usize,
    /// Assert that the width and stack caps lose no derivation.
    #[arg(long, global = true)]
    pub exact_caps: bool,
    /// Sample radius for Parikh comparisons.
    #[arg(long, global = true, default_value_t = 6)]
    pub radius: usize,
    /// Width bound for `check-uncontrolled`.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Write a produced grammar, machine or automaton here instead of
    /// inlining it in the report.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit `elapsed_ms` so reports are reproducible byte for byte.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

impl Opts {
    pub fn budget(&self) -> Budget {
        let mut b = Budget::steps(self.max_steps).frontier(self.max_forms);
        if let Some(k) = self.max_width {
            b = b.width(k);
        }
        if let Some(s) = self.max_stack {
            b = b.stack(s);
        }
        if self.exact_caps {
            b = b.exact();
        }
        b
    }

    pub fn len_or(&self, default: usize) -> usize {
        self.max_len.unwrap_or(default)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a file is well formed (format chosen by extension).
    Validate { file: PathBuf },
    /// List the words of a grammar up to `--max-len` (default 10).
    Enumerate { grammar: PathBuf },
    /// Decide membership of a word.
    Member { grammar: PathBuf, word: String },
    /// Least width cap under which a word is derivable.
    MinIndex { grammar: PathBuf, word: String },
    /// Look for a successful derivation wider than `--k`, for words up to
    /// `--max-len` (default 10).
    CheckUncontrolled { grammar: PathBuf },
    /// Closure constructions on grammars.
    #[command(subcommand)]
    Transform(Transform),
    /// Grammar for the image of one linear set under its shape.
    SynthLinear {
        set: PathBuf,
        /// Component of the set to use.
        #[arg(long, default_value_t = 0)]
        component: usize,
    },
    /// Grammar for the image of a semilinear set under its shape.
    SynthSemilinear { set: PathBuf },
    /// Decisions on semilinear sets.
    #[command(subcommand)]
    Slset(Slset),
    /// Bounded languages given by a shape and a semilinear set.
    #[command(subcommand)]
    Bounded(Bounded),
    /// ET0L systems.
    #[command(subcommand)]
    Etol(Etol),
    /// Reversal-bounded counter machines.
    #[command(subcommand)]
    Ncm(Ncm),
    /// Run the built-in fixture suite and print a pass/fail table.
    ReplicatePaper,
}

#[derive(Subcommand, Debug)]
pub enum Transform {
    Union { first: PathBuf, second: PathBuf },
    /// Image under a morphism.
    Morph { grammar: PathBuf, morphism: PathBuf },
    /// Inverse image under a morphism.
    InvMorph { grammar: PathBuf, morphism: PathBuf },
    /// Split right-hand sides into the normalized form.
    Normalize { grammar: PathBuf },
    /// Intersection with a DFA (the grammar is normalized first).
    IntersectDfa { grammar: PathBuf, dfa: PathBuf },
    /// Inverse projection onto a larger alphabet.
    InvProj {
        grammar: PathBuf,
        /// Extra letters, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        letters: Vec<String>,
    },
    /// Image under a rational transduction.
    Transduce { grammar: PathBuf, transducer: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum Slset {
    /// Membership of a tuple such as `1,2,3`.
    Member { set: PathBuf, tuple: String },
    Subset { first: PathBuf, second: PathBuf },
    Equal { first: PathBuf, second: PathBuf },
    Empty { set: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum Bounded {
    /// Whether a word factors as the shape with exponents in the set.
    Member { set: PathBuf, word: String },
    /// Inclusion of bounded languages, checked to `--max-len` (default 20)
    /// when the shapes differ.
    Subset { first: PathBuf, second: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum Etol {
    /// Words up to `--max-len` (default 10) within `--max-steps` tables.
    Enumerate { system: PathBuf },
    CheckAnf { system: PathBuf },
    /// Convert to an indexed grammar.
    Convert { system: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum Ncm {
    Run { machine: PathBuf, word: String },
    OneReversal { machine: PathBuf },
    /// Expansion into an automaton over input and counter letters.
    Expand { machine: PathBuf },
    /// Parikh vectors of the intersection with a grammar, by the
    /// expansion pipeline and directly, up to `--radius`.
    ParikhIntersect { grammar: PathBuf, machine: PathBuf },
}

/// What a command produced: report blocks and the overall status.
pub struct Outcome {
    pub blocks: Vec<Block>,
    pub status: Status,
    pub exhausted: bool,
}

impl Outcome {
    pub fn one(block: Block, status: Status, exhausted: bool) -> Self {
        Outcome { blocks: vec![block], status, exhausted }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let started = Instant::now();
    let mut ctx = commands::Ctx::new(cli.opts.clone());
    match commands::run(&cli.command, &mut ctx) {
        Ok(out) => {
            let mut head = Block::new();
            head.push("command", &echo);
            for (path, digest) in &ctx.inputs {
                head.push("input", format!("{} sha256:{}", path.display(), digest));
            }
            head.push("verdict", out.status.label());
            let mut blocks = out.blocks;
            if blocks.is_empty() {
                blocks.push(Block::new());
            }
            let first = &mut blocks[0];
            head.fields.append(&mut first.fields);
            *first = head;
            let last = blocks.last_mut().expect("nonempty");
            last.push("budget_exhausted", out.exhausted);
            if !cli.opts.no_timing {
                last.push("elapsed_ms", started.elapsed().as_millis());
            }
            print!("{}", Report { blocks }.render());
            ExitCode::from(out.status.code() as u8)
        }
        Err(e) => {
            let mut b = Block::new();
            b.push("command", &echo).push("verdict", "error").push("error", format!("{:#}", e));
            print!("{}", Report { blocks: vec![b] }.render());
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use fingram::automata::{Dfa, Nfa};
use fingram::counter::{
    expand_to_nfa, ncm_run, parikh_of_intersection, parse_machine, serialize_machine, to_one_reversal, CounterMachine,
    RunBudget, RunVerdict,
};
use fingram::derivation::{
    check_uncontrolled, enumerate_language, membership, min_index, EngineError, Enumeration, SearchStats, Verdict,
};
use fingram::etol::{check_anf, etol_enumerate, etol_to_indexed, parse_etol, EtolBudget, EtolError, EtolSystem};
use fingram::grammar::{parse_grammar, serialize_grammar};
use fingram::semilinear::{
    bounded_lang_subset, bounded_word_member, linear_to_grammar, parse_semilinear, parse_shape, semilinear_to_grammar,
    slset_empty, slset_equal, slset_member, slset_subset, tuple_str, BoundedVerdict, GinsburgShape, SemilinearFile,
    SetVerdict, Tuple,
};
use fingram::trio::{
    intersect_dfa, inverse_morphism, inverse_projection, morphism_image, nivat_transduce, normalize_rhs, parse_morphism,
    parse_transducer, union, Morphism, NivatTransducer,
};
use fingram::{GrammarError, IndexedGrammar, Symbol, Word};
use fingram_cli::{Block, Status};

use crate::{Bounded, Command, Etol, Ncm, Opts, Outcome, Slset, Transform};

pub struct Ctx {
    pub opts: Opts,
    pub inputs: Vec<(PathBuf, String)>,
}

impl Ctx {
    pub fn new(opts: Opts) -> Self {
        Ctx { opts, inputs: Vec::new() }
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let digest: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{:02x}", b)).collect();
        self.inputs.push((path.to_path_buf(), digest));
        Ok(text)
    }

    fn grammar(&mut self, path: &Path) -> Result<IndexedGrammar> {
        let text = self.read(path)?;
        parse_grammar(&text).with_context(|| format!("{}", path.display()))
    }

    fn semilinear(&mut self, path: &Path) -> Result<SemilinearFile> {
        let text = self.read(path)?;
        parse_semilinear(&text).with_context(|| format!("{}", path.display()))
    }

    fn shaped(&mut self, path: &Path) -> Result<(GinsburgShape, fingram::semilinear::SemilinearSet)> {
        let f = self.semilinear(path)?;
        let shape = f.shape.with_context(|| format!("{} has no `shape:` line", path.display()))?;
        Ok((shape, f.set))
    }

    fn morphism(&mut self, path: &Path) -> Result<Morphism> {
        let text = self.read(path)?;
        parse_morphism(&text).with_context(|| format!("{}", path.display()))
    }

    fn transducer(&mut self, path: &Path) -> Result<NivatTransducer> {
        let text = self.read(path)?;
        parse_transducer(&text).with_context(|| format!("{}", path.display()))
    }

    fn dfa(&mut self, path: &Path) -> Result<Dfa> {
        let text = self.read(path)?;
        Ok(Nfa::parse(&text).with_context(|| format!("{}", path.display()))?.to_dfa())
    }

    fn etol(&mut self, path: &Path) -> Result<EtolSystem> {
        let text = self.read(path)?;
        parse_etol(&text).with_context(|| format!("{}", path.display()))
    }

    fn machine(&mut self, path: &Path) -> Result<CounterMachine> {
        let text = self.read(path)?;
        parse_machine(&text).with_context(|| format!("{}", path.display()))
    }

    /// Inlines `text` as `text:` lines, or writes it to `--out`.
    fn emit(&self, b: &mut Block, text: &str) -> Result<()> {
        match &self.opts.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
                b.push("output", path.display());
            }
            None => {
                for line in text.lines() {
                    b.push("text", line);
                }
            }
        }
        Ok(())
    }
}

pub fn run(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Validate { file } => validate(ctx, file),
        Command::Enumerate { grammar } => {
            let g = ctx.grammar(grammar)?;
            let n = ctx.opts.len_or(10);
            let e = enumerate_language(&g, n, &ctx.opts.budget())?;
            let mut b = Block::new();
            b.push("max_len", n);
            words_fields(&mut b, &e);
            let status = if e.exhaustive { Status::Ok } else { Status::Unknown };
            Ok(Outcome::one(b, status, !e.exhaustive))
        }
        Command::Member { grammar, word } => {
            let g = ctx.grammar(grammar)?;
            let w = Word::parse(word);
            let o = membership(&g, &w, &ctx.opts.budget())?;
            let mut b = Block::new();
            b.push("word", &w).push("member", o.verdict.label());
            verdict_fields(&mut b, &o.verdict);
            stats_fields(&mut b, &o.stats);
            Ok(Outcome::one(b, verdict_status(&o.verdict), matches!(o.verdict, Verdict::Unknown)))
        }
        Command::MinIndex { grammar, word } => {
            let g = ctx.grammar(grammar)?;
            let w = Word::parse(word);
            let mut b = Block::new();
            b.push("word", &w);
            match min_index(&g, &w, &ctx.opts.budget()) {
                Ok(Some(m)) => {
                    b.push("min_index", m.value).push("exact", m.exact).push("witness", m.witness.trace());
                    stats_fields(&mut b, &m.stats);
                    let status = if m.exact { Status::Ok } else { Status::Unknown };
                    Ok(Outcome::one(b, status, !m.exact))
                }
                Ok(None) => {
                    b.push("min_index", "unknown");
                    Ok(Outcome::one(b, Status::Unknown, true))
                }
                Err(EngineError::NotAMember) => {
                    b.push("min_index", "none").push("reason", "not a member");
                    Ok(Outcome::one(b, Status::Refuted, false))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::CheckUncontrolled { grammar } => {
            let g = ctx.grammar(grammar)?;
            let k = ctx.opts.k.context("check-uncontrolled needs --k")?;
            let n = ctx.opts.len_or(10);
            let o = check_uncontrolled(&g, k, &ctx.opts.budget().yield_len(n))?;
            let mut b = Block::new();
            b.push("k", k).push("max_len", n).push("uncontrolled", o.verdict.label());
            if let Some(d) = o.verdict.witness() {
                b.push("witness_index", d.index());
                if let Some(w) = d.yield_word() {
                    b.push("witness_word", w);
                }
            }
            verdict_fields(&mut b, &o.verdict);
            stats_fields(&mut b, &o.stats);
            Ok(Outcome::one(b, verdict_status(&o.verdict), matches!(o.verdict, Verdict::Unknown)))
        }
        Command::Transform(t) => transform(ctx, t),
        Command::SynthLinear { set, component } => {
            let (shape, s) = ctx.shaped(set)?;
            let l = s.components.get(*component).with_context(|| format!("no component {}", component))?;
            let g = linear_to_grammar(&shape, l)?;
            grammar_outcome(ctx, &g)
        }
        Command::SynthSemilinear { set } => {
            let (shape, s) = ctx.shaped(set)?;
            let g = semilinear_to_grammar(&shape, &s)?;
            grammar_outcome(ctx, &g)
        }
        Command::Slset(s) => slset(ctx, s),
        Command::Bounded(bd) => bounded(ctx, bd),
        Command::Etol(e) => etol(ctx, e),
        Command::Ncm(n) => ncm(ctx, n),
        Command::ReplicatePaper => Ok(crate::replicate::run()),
    }
}

fn validate(ctx: &mut Ctx, file: &Path) -> Result<Outcome> {
    let text = ctx.read(file)?;
    let ext = file.extension().and_then(|e| e.to_str()).unwrap_or("");
    let mut b = Block::new();
    b.push("format", ext);
    let result: std::result::Result<Vec<String>, String> = match ext {
        "ig" => match parse_grammar(&text) {
            Ok(g) => {
                b.push("variables", g.variables.len()).push("productions", g.productions.len());
                Ok(Vec::new())
            }
            Err(GrammarError::Invalid(vs)) => Ok(vs.iter().map(|v| v.to_string()).collect()),
            Err(e) => Err(e.to_string()),
        },
        "dfa" | "nfa" => Nfa::parse(&text).map(|_| Vec::new()).map_err(|e| e.to_string()),
        "morph" => parse_morphism(&text).map(|_| Vec::new()).map_err(|e| e.to_string()),
        "fst" => parse_transducer(&text).map(|_| Vec::new()).map_err(|e| e.to_string()),
        "sls" => parse_semilinear(&text).map(|_| Vec::new()).map_err(|e| e.to_string()),
        "shape" => parse_shape(&text).map(|_| Vec::new()).map_err(|e| e.to_string()),
        "etol" => parse_etol(&text).map(|_| Vec::new()).map_err(|e| e.to_string()),
        "ncm" => parse_machine(&text).map(|_| Vec::new()).map_err(|e| e.to_string()),
        other => bail!("unknown file kind `{}`", other),
    };
    let problems = match result {
        Ok(v) => v,
        Err(e) => vec![e],
    };
    b.push("valid", problems.is_empty());
    for p in &problems {
        b.push("violation", p);
    }
    let status = if problems.is_empty() { Status::Ok } else { Status::Refuted };
    Ok(Outcome::one(b, status, false))
}

fn transform(ctx: &mut Ctx, t: &Transform) -> Result<Outcome> {
    let g = match t {
        Transform::Union { first, second } => union(&ctx.grammar(first)?, &ctx.grammar(second)?),
        Transform::Morph { grammar, morphism } => morphism_image(&ctx.grammar(grammar)?, &ctx.morphism(morphism)?)?,
        Transform::InvMorph { grammar, morphism } => inverse_morphism(&ctx.grammar(grammar)?, &ctx.morphism(morphism)?)?,
        Transform::Normalize { grammar } => normalize_rhs(&ctx.grammar(grammar)?),
        Transform::IntersectDfa { grammar, dfa } => {
            let g = ctx.grammar(grammar)?;
            intersect_dfa(&normalize_rhs(&g), &ctx.dfa(dfa)?)?
        }
        Transform::InvProj { grammar, letters } => {
            let g = ctx.grammar(grammar)?;
            let mut ext = g.terminals.clone();
            for l in letters {
                let s = Symbol::new(l.trim());
                if !ext.contains(&s) {
                    ext.push(s);
                }
            }
            inverse_projection(&g, &ext)?
        }
        Transform::Transduce { grammar, transducer } => nivat_transduce(&ctx.grammar(grammar)?, &ctx.transducer(transducer)?)?,
    };
    grammar_outcome(ctx, &g)
}

fn grammar_outcome(ctx: &Ctx, g: &IndexedGrammar) -> Result<Outcome> {
    let mut b = Block::new();
    b.push("name", &g.name)
        .push("variables", g.variables.len())
        .push("indices", g.indices.len())
        .push("productions", g.productions.len())
        .push("special_productions", g.special_productions().len());
    ctx.emit(&mut b, &serialize_grammar(g))?;
    Ok(Outcome::one(b, Status::Ok, false))
}

fn parse_tuple(s: &str) -> Result<Tuple> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|x| x.trim().parse::<u64>().with_context(|| format!("bad tuple entry `{}`", x))).collect()
}

fn set_verdict(b: &mut Block, key: &str, v: &SetVerdict) -> Status {
    match v {
        SetVerdict::Proven => {
            b.push(key, "proven");
            Status::Ok
        }
        SetVerdict::Refuted(t) => {
            b.push(key, "refuted").push("counterexample", tuple_str(t));
            Status::Refuted
        }
    }
}

fn slset(ctx: &mut Ctx, s: &Slset) -> Result<Outcome> {
    let mut b = Block::new();
    let status = match s {
        Slset::Member { set, tuple } => {
            let f = ctx.semilinear(set)?;
            let v = parse_tuple(tuple)?;
            let m = slset_member(&v, &f.set)?;
            b.push("tuple", tuple_str(&v)).push("member", m);
            if m {
                Status::Ok
            } else {
                Status::Refuted
            }
        }
        Slset::Subset { first, second } => {
            let (a, c) = (ctx.semilinear(first)?, ctx.semilinear(second)?);
            set_verdict(&mut b, "subset", &slset_subset(&a.set, &c.set)?)
        }
        Slset::Equal { first, second } => {
            let (a, c) = (ctx.semilinear(first)?, ctx.semilinear(second)?);
            set_verdict(&mut b, "equal", &slset_equal(&a.set, &c.set)?)
        }
        Slset::Empty { set } => {
            let f = ctx.semilinear(set)?;
            match slset_empty(&f.set) {
                SetVerdict::Proven => {
                    b.push("empty", "proven");
                    Status::Ok
                }
                SetVerdict::Refuted(t) => {
                    b.push("empty", "refuted").push("member", tuple_str(&t));
                    Status::Refuted
                }
            }
        }
    };
    Ok(Outcome::one(b, status, false))
}

fn bounded(ctx: &mut Ctx, bd: &Bounded) -> Result<Outcome> {
    let mut b = Block::new();
    match bd {
        Bounded::Member { set, word } => {
            let (shape, s) = ctx.shaped(set)?;
            let w = Word::parse(word);
            let m = bounded_word_member(&w, &shape, &s)?;
            b.push("word", &w).push("member", m);
            Ok(Outcome::one(b, if m { Status::Ok } else { Status::Refuted }, false))
        }
        Bounded::Subset { first, second } => {
            let (sh1, s1) = ctx.shaped(first)?;
            let (sh2, s2) = ctx.shaped(second)?;
            let n = ctx.opts.len_or(20);
            let (status, exhausted) = match bounded_lang_subset(&sh1, &s1, &sh2, &s2, n)? {
                BoundedVerdict::Proven => {
                    b.push("subset", "proven");
                    (Status::Ok, false)
                }
                BoundedVerdict::Refuted(w) => {
                    b.push("subset", "refuted").push("counterexample", w);
                    (Status::Refuted, false)
                }
                BoundedVerdict::VerifiedUpTo(n) => {
                    b.push("subset", "verified_up_to").push("max_len", n);
                    (Status::Unknown, true)
                }
            };
            Ok(Outcome::one(b, status, exhausted))
        }
    }
}

fn etol(ctx: &mut Ctx, e: &Etol) -> Result<Outcome> {
    let mut b = Block::new();
    match e {
        Etol::Enumerate { system } => {
            let sys = ctx.etol(system)?;
            let n = ctx.opts.len_or(10);
            let mut budget = EtolBudget::steps(ctx.opts.max_steps);
            budget.frontier_cap = ctx.opts.max_forms;
            let r = etol_enumerate(&sys, n, &budget)?;
            b.push("max_len", n).push("words", r.words.len());
            for w in &r.words {
                b.push("word", w);
            }
            b.push("exhaustive", r.exhaustive).push("visited", r.visited);
            let status = if r.exhaustive { Status::Ok } else { Status::Unknown };
            Ok(Outcome::one(b, status, !r.exhaustive))
        }
        Etol::CheckAnf { system } => {
            let sys = ctx.etol(system)?;
            let vs = check_anf(&sys);
            b.push("anf", vs.is_empty());
            for v in &vs {
                b.push("violation", v);
            }
            Ok(Outcome::one(b, if vs.is_empty() { Status::Ok } else { Status::Refuted }, false))
        }
        Etol::Convert { system } => {
            let sys = ctx.etol(system)?;
            match etol_to_indexed(&sys) {
                Ok(g) => grammar_outcome(ctx, &g),
                Err(EtolError::NotInAnf(vs)) => {
                    b.push("anf", false);
                    for v in &vs {
                        b.push("violation", v);
                    }
                    Ok(Outcome::one(b, Status::Refuted, false))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn ncm(ctx: &mut Ctx, n: &Ncm) -> Result<Outcome> {
    let mut b = Block::new();
    match n {
        Ncm::Run { machine, word } => {
            let m = ctx.machine(machine)?;
            let w = Word::parse(word);
            let v = ncm_run(&m, &w, &RunBudget::default())?;
            b.push("word", &w).push("run", v.to_string().to_lowercase());
            let status = match &v {
                RunVerdict::Accepted(run) => {
                    b.push("transitions", run.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","));
                    Status::Ok
                }
                RunVerdict::Rejected => Status::Refuted,
                RunVerdict::Unknown => Status::Unknown,
            };
            Ok(Outcome::one(b, status, status == Status::Unknown))
        }
        Ncm::OneReversal { machine } => {
            let m = ctx.machine(machine)?;
            let one = to_one_reversal(&m)?;
            b.push("counters_before", m.counters).push("counters", one.counters).push("states", one.states.len());
            ctx.emit(&mut b, &serialize_machine(&one))?;
            Ok(Outcome::one(b, Status::Ok, false))
        }
        Ncm::Expand { machine } => {
            let m = ctx.machine(machine)?;
            let e = expand_to_nfa(&m)?;
            b.push("states", e.nfa.states.len())
                .push("increment_letters", fingram::text::join(&e.inc, ", "))
                .push("decrement_letters", fingram::text::join(&e.dec, ", "));
            ctx.emit(&mut b, &e.nfa.serialize())?;
            Ok(Outcome::one(b, Status::Ok, false))
        }
        Ncm::ParikhIntersect { grammar, machine } => {
            let g = ctx.grammar(grammar)?;
            let m = ctx.machine(machine)?;
            let r = ctx.opts.radius;
            let p = parikh_of_intersection(&g, &m, r, 2 * r, &ctx.opts.budget())?;
            b.push("radius", r).push("alphabet", fingram::text::join(&m.alphabet, ", "));
            for v in &p.vectors {
                b.push("vector", tuple_str(v));
            }
            b.push("direct_vectors", p.brute.len()).push("agree", p.agree()).push("exhaustive", p.exhaustive);
            let status = if !p.agree() {
                Status::Refuted
            } else if p.exhaustive {
                Status::Ok
            } else {
                Status::Unknown
            };
            Ok(Outcome::one(b, status, !p.exhaustive))
        }
    }
}

fn words_fields(b: &mut Block, e: &Enumeration) {
    b.push("words", e.words.len());
    for w in &e.words {
        b.push("word", w);
    }
    b.push("exhaustive", e.exhaustive);
    stats_fields(b, &e.stats);
}

fn stats_fields(b: &mut Block, s: &SearchStats) {
    b.push("forms", s.forms)
        .push("truncated_steps", s.truncated_steps)
        .push("truncated_width", s.truncated_width)
        .push("truncated_stack", s.truncated_stack);
}

fn verdict_fields(b: &mut Block, v: &Verdict) {
    if let Some(d) = v.witness() {
        b.push("witness", d.trace());
    }
}

fn verdict_status(v: &Verdict) -> Status {
    match v {
        Verdict::Proven(_) => Status::Ok,
        Verdict::Refuted(_) => Status::Refuted,
        Verdict::Unknown => Status::Unknown,
    }
}

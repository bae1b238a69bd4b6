//! Command dispatch for the `sds` binary.
//!
//! Exit codes: 0 positive, 1 negative, 2 unknown or budget exhausted, 3 input error.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::analysis::{self, IsolationBounds, IsolationStatus, Tri};
use crate::automaton::{self, ColoringAutomaton};
use crate::error::{Error, Result};
use crate::format::{write_sft, Item, SpecFile};
use crate::rauzy::to_rauzy;
use crate::shadowing::{self, PseudoOrbit, TraceOutcome};
use crate::sft::Sft;
use crate::sofic::{canonical_form, image_sofic, sofic_equal, SoficPresentation};
use crate::toeplitz::{self, ToeplitzWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Words (over Z) or ball patterns of an SFT.
    Lang,
    /// Essential Rauzy graph as Graphviz.
    Essential,
    /// Rauzy recoding as a vertex shift.
    Recode,
    /// Free product of two SFTs.
    Freeprod,
    /// Restricted free product of two SFTs.
    Rfp,
    /// Canonical presentation of the image of an SFT under a letter map.
    Image,
    /// Equality of two sofic presentations.
    SoficEq,
    /// Isolation verdict.
    Isolated,
    /// No-middle-cycle check on the essential graph.
    Nmc,
    /// Minimality verdict, optionally relative to cylinders.
    Minimal,
    /// Run of a colouring automaton.
    AutoRun,
    /// Tracked SFT of a colouring automaton.
    AutoSft,
    /// Local rules, dichotomy, projection and isolation for an automaton.
    AutoVerify,
    /// Trace a pseudo-orbit, or run the exhaustive suite.
    Trace,
    /// Mittag-Leffler check of an inverse system.
    MlCheck,
    /// Toeplitz window for a sequence over {1, 2}.
    ToeplitzGen,
    /// Read the sequence back from a Toeplitz window.
    ToeplitzRecover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construct {
    /// Automaton from an SFT over one finite group.
    Case1,
    /// Automaton from an SFT over Z whose essential graph has no middle cycle.
    Case2,
}

#[derive(Debug, Parser)]
#[command(name = "sds", version, about = "Symbolic dynamics over free products of groups")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Input `.sds` file (a window file for toeplitz-recover).
    pub file: Option<PathBuf>,
    /// Section to use; defaults to the first of the right kind.
    #[arg(long)]
    pub name: Option<String>,
    /// Second section for binary commands.
    #[arg(long)]
    pub other: Option<String>,
    /// Letter map section (image).
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub psi: Option<String>,
    /// Ball radius for patterns, runs and checks; automata are sampled one layer further.
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    /// Window length for single-word removal searches.
    #[arg(long, default_value_t = 4)]
    pub window: usize,
    /// Word length for languages, distinguishing, and suite length.
    #[arg(long, default_value_t = 8)]
    pub length: usize,
    /// Number of inverse-system levels examined.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Maximum higher-block level for automaton constructions.
    #[arg(long, default_value_t = 6)]
    pub cap: usize,
    /// Length of the words of the pattern set F.
    #[arg(long, default_value_t = 2)]
    pub flen: usize,
    /// Extra ball layers used to decide extendability.
    #[arg(long, default_value_t = 2)]
    pub margin: usize,
    /// Vertex limit for cycle enumeration.
    #[arg(long, default_value_t = analysis::DEFAULT_VERTEX_CAP)]
    pub vertex_cap: usize,
    /// Start colour for auto-run.
    #[arg(long)]
    pub color: Option<String>,
    /// Start element for auto-run.
    #[arg(long, default_value = "e")]
    pub start: String,
    /// First level for ml-check (1-based).
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    /// Build the automaton from an SFT instead of reading one.
    #[arg(long, value_enum)]
    pub construct: Option<Construct>,
    /// Cylinder words for minimal, comma-separated.
    #[arg(long)]
    pub cylinders: Option<String>,
    /// Run the exhaustive pseudo-orbit suite on an SFT.
    #[arg(long)]
    pub suite: bool,
    /// Coarse level for the pseudo-orbit suite.
    #[arg(long, default_value_t = 1)]
    pub coarse: usize,
    /// Pseudo-orbit limit for the suite.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    /// Sequence over {1, 2} for toeplitz-gen, e.g. 121.
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub lo: i64,
    #[arg(long, default_value_t = 26, allow_hyphen_values = true)]
    pub hi: i64,
    /// Levels to recover; defaults to the highest annotated level.
    #[arg(long)]
    pub levels: Option<usize>,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Degenerate(_) | Error::NotApplicable(_) | Error::Corruption(_) => 1,
        Error::Budget(_) => 2,
        Error::Structural(_) | Error::Unsupported(_) | Error::Precondition(_) | Error::Parse { .. } => 3,
    }
}

/// Parses `args` (without the program name) and runs the command.
pub fn run_cli<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once("sds".into()).chain(args.into_iter().map(Into::into));
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let mut out = String::new();
    match dispatch(cli, &mut out) {
        Ok(code) => Outcome { stdout: out, stderr: String::new(), code },
        Err(e) => {
            let stderr = match cli.file.as_ref() {
                Some(path) if matches!(e, Error::Parse { .. }) => format!("{}: {e}\n", path.display()),
                _ => format!("error: {e}\n"),
            };
            Outcome { stdout: out, stderr, code: exit_code(&e) }
        }
    }
}

fn read_file(cli: &Cli) -> Result<String> {
    let Some(path) = &cli.file else {
        return Err(Error::Precondition("this command needs an input file".into()));
    };
    std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))
}

fn load(cli: &Cli) -> Result<SpecFile> {
    SpecFile::parse(&read_file(cli)?)
}

fn required<'a>(flag: &str, v: &'a Option<String>) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Precondition(format!("--{flag} is required")))
}

fn dispatch(cli: &Cli, out: &mut String) -> Result<i32> {
    match cli.command {
        Command::Lang => lang(cli, out),
        Command::Essential => essential(cli, out),
        Command::Recode => recode(cli, out),
        Command::Freeprod | Command::Rfp => product(cli, out),
        Command::Image => image(cli, out),
        Command::SoficEq => sofic_eq(cli, out),
        Command::Isolated => isolated(cli, out),
        Command::Nmc => nmc(cli, out),
        Command::Minimal => minimal(cli, out),
        Command::AutoRun => auto_run(cli, out),
        Command::AutoSft => auto_sft(cli, out),
        Command::AutoVerify => auto_verify(cli, out),
        Command::Trace => trace(cli, out),
        Command::MlCheck => ml_check(cli, out),
        Command::ToeplitzGen => toeplitz_gen(cli, out),
        Command::ToeplitzRecover => toeplitz_recover(cli, out),
    }
}

fn word(x: &Sft, w: &[usize]) -> String {
    analysis::show_word(x, w)
}

fn lang(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let x = spec.sft(cli.name.as_deref())?;
    if x.group().is_integers() {
        let words = crate::rauzy::z_language(x, cli.length)?;
        writeln!(out, "length {}: {} words", cli.length, words.len()).unwrap();
        for w in &words {
            writeln!(out, "{}", word(x, w)).unwrap();
        }
        return Ok(if words.is_empty() { 1 } else { 0 });
    }
    let gp = x.global_patterns(cli.radius, cli.margin);
    writeln!(out, "radius {} margin {}: {} patterns", cli.radius, cli.margin, gp.patterns.len()).unwrap();
    if !gp.stabilized {
        writeln!(out, "note: margin {} changed the count", cli.margin).unwrap();
    }
    for p in &gp.patterns {
        writeln!(out, "{}", x.show(&gp.support, p)).unwrap();
    }
    Ok(if gp.patterns.is_empty() { 1 } else { 0 })
}

fn essential(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let x = spec.sft(cli.name.as_deref())?;
    let ess = to_rauzy(x, cli.margin)?.graph.essentialize();
    writeln!(out, "{ess}").unwrap();
    Ok(if ess.is_empty() { 1 } else { 0 })
}

fn recode(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let name = cli.name.clone().unwrap_or_else(|| first_sft_name(&spec));
    let x = spec.sft(Some(&name))?;
    let rec = to_rauzy(x, cli.margin)?;
    let support: Vec<String> = rec.vertex_support.iter().map(|g| g.to_string()).collect();
    writeln!(out, "# vertex support: {}", support.join(" ")).unwrap();
    for (v, (label, &a)) in rec.graph.vertices().iter().zip(&rec.letter).enumerate() {
        writeln!(out, "# vertex {v} {label} -> {}", x.alphabet()[a]).unwrap();
    }
    let shift = rec.graph.vertex_shift()?;
    write_sft(out, &format!("{name}_rauzy"), &shift.group().to_string(), &shift).unwrap();
    writeln!(out).unwrap();
    Ok(0)
}

fn first_sft_name(spec: &SpecFile) -> String {
    spec.sections
        .iter()
        .find(|s| matches!(s.item, Item::Sft { .. }))
        .map_or_else(|| "x".to_string(), |s| s.name.clone())
}

fn product(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let a = required("name", &cli.name)?;
    let b = required("other", &cli.other)?;
    let (x, y) = (spec.sft(Some(a))?, spec.sft(Some(b))?);
    let z = if cli.command == Command::Rfp {
        let phi = spec.map(Some(required("phi", &cli.phi)?))?;
        let psi = spec.map(Some(required("psi", &cli.psi)?))?;
        x.restricted_free_product(y, phi, psi)?
    } else {
        x.free_product(y)?
    };
    write_sft(out, &format!("{a}_{b}"), &z.group().to_string(), &z).unwrap();
    writeln!(out).unwrap();
    Ok(0)
}

fn image(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let x = spec.sft(cli.name.as_deref())?;
    let m = spec.map(cli.map.as_deref())?;
    let p = canonical_form(&image_sofic(x, m)?);
    writeln!(out, "presentation image\n{p}\nend").unwrap();
    Ok(if p.is_empty() { 1 } else { 0 })
}

fn sofic_eq(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let (na, a) = pick_presentation(&spec, cli.name.as_deref(), 0)?;
    let (nb, b) = pick_presentation(&spec, cli.other.as_deref(), 1)?;
    let equal = sofic_equal(a, b)?;
    writeln!(out, "{na} {} {nb}", if equal { "==" } else { "!=" }).unwrap();
    writeln!(out, "canonical {na}\n{}", canonical_form(a)).unwrap();
    writeln!(out, "canonical {nb}\n{}", canonical_form(b)).unwrap();
    Ok(if equal { 0 } else { 1 })
}

fn pick_presentation<'a>(spec: &'a SpecFile, name: Option<&'a str>, fallback: usize) -> Result<(&'a str, &'a SoficPresentation)> {
    if let Some(n) = name {
        return Ok((n, spec.presentation(Some(n))?));
    }
    spec.sections
        .iter()
        .filter_map(|s| if let Item::Presentation(p) = &s.item { Some((s.name.as_str(), p)) } else { None })
        .nth(fallback)
        .ok_or_else(|| Error::Structural("sofic-eq needs two presentation sections".into()))
}

fn isolated(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let x = spec.sft(cli.name.as_deref())?;
    let bounds = IsolationBounds {
        f_len: cli.flen,
        search_window: cli.window,
        distinguish_len: cli.length,
        vertex_cap: cli.vertex_cap,
    };
    let v = analysis::isolated_check(x, &bounds)?;
    writeln!(out, "status: {}", v.status).unwrap();
    writeln!(out, "certificate: {}", v.certificate).unwrap();
    writeln!(out, "bounds: {}", v.bounds).unwrap();
    if let Some(w) = &v.witness {
        writeln!(out, "witness forbids: {}", word(x, &w.forbidden)).unwrap();
        write_sft(out, "witness", &w.sft.group().to_string(), &w.sft).unwrap();
        writeln!(out).unwrap();
    }
    Ok(match v.status {
        IsolationStatus::IsolatedCertified => 0,
        IsolationStatus::NotIsolated => 1,
        IsolationStatus::Unknown => 2,
    })
}

fn nmc(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let x = spec.sft(cli.name.as_deref())?;
    let ess = to_rauzy(x, cli.margin)?.graph.essentialize();
    let middle = analysis::middle_cycles(&ess, cli.vertex_cap)?;
    writeln!(out, "essential vertices: {}", ess.len()).unwrap();
    writeln!(out, "nmc: {}", middle.is_empty()).unwrap();
    for c in &middle {
        let names: Vec<&str> = c.iter().map(|&v| ess.vertices()[v].as_str()).collect();
        writeln!(out, "middle cycle: {}", names.join(" ")).unwrap();
    }
    Ok(if middle.is_empty() { 0 } else { 1 })
}

fn minimal(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let x = spec.sft(cli.name.as_deref())?;
    let cylinders = match &cli.cylinders {
        None => None,
        Some(text) => Some(
            text.split(',')
                .map(|w| parse_word(x.alphabet(), w.trim()))
                .collect::<Result<Vec<Vec<usize>>>>()?,
        ),
    };
    let v = analysis::minimal_check(x, cylinders.as_deref(), cli.window)?;
    writeln!(out, "minimal: {}", v.status).unwrap();
    writeln!(out, "certificate: {}", v.certificate).unwrap();
    if let Some(w) = &v.witness {
        writeln!(out, "witness forbids: {}", word(x, &w.forbidden)).unwrap();
    }
    Ok(tri_code(v.status))
}

fn tri_code(t: Tri) -> i32 {
    match t {
        Tri::True => 0,
        Tri::False => 1,
        Tri::Unknown => 2,
    }
}

/// A word given as space-separated letters, or as one token of one-character letters.
fn parse_word(alphabet: &[String], text: &str) -> Result<Vec<usize>> {
    let tokens: Vec<String> = if !text.contains(' ') && alphabet.iter().all(|a| a.chars().count() == 1) {
        text.chars().map(String::from).collect()
    } else {
        text.split_whitespace().map(String::from).collect()
    };
    if tokens.is_empty() {
        return Err(Error::Precondition("empty word".into()));
    }
    tokens
        .iter()
        .map(|t| {
            alphabet
                .iter()
                .position(|a| a == t)
                .ok_or_else(|| Error::Precondition(format!("letter '{t}' is not in the alphabet")))
        })
        .collect()
}

fn load_automaton(cli: &Cli, spec: &SpecFile) -> Result<ColoringAutomaton> {
    if let Some(kind) = cli.construct {
        let x = spec.sft(cli.name.as_deref())?;
        return match kind {
            Construct::Case1 => Ok(automaton::case1_automaton(x)?.0),
            Construct::Case2 => {
                let graph = to_rauzy(x, cli.margin)?.graph;
                Ok(automaton::case2_nmc_automaton(&graph, cli.cap)?.automaton)
            }
        };
    }
    let a = spec.automaton(cli.name.as_deref())?;
    match &cli.other {
        None => Ok(a.clone()),
        Some(b) => {
            let b = spec.automaton(Some(b))?;
            let phi = spec.map(Some(required("phi", &cli.phi)?))?;
            let psi = spec.map(Some(required("psi", &cli.psi)?))?;
            automaton::product_automaton(a, phi, b, psi)
        }
    }
}

fn auto_run(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let a = load_automaton(cli, &spec)?;
    let color = match &cli.color {
        None => 0,
        Some(c) => a
            .colors()
            .iter()
            .position(|x| x == c)
            .ok_or_else(|| Error::Precondition(format!("unknown colour '{c}'")))?,
    };
    let start = a.group().parse_element(&cli.start)?;
    let r = automaton::run(&a, &start, color, cli.radius);
    for (g, letter) in &r.cells {
        writeln!(out, "{g} {}", letter.name(a.colors())).unwrap();
    }
    let bad = automaton::check_local_rules(&a, &r);
    for v in &bad {
        writeln!(out, "violation: {v}").unwrap();
    }
    Ok(if bad.is_empty() { 0 } else { 1 })
}

fn auto_sft(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let a = load_automaton(cli, &spec)?;
    let t = automaton::tilde_sft(&a, cli.radius + 1)?;
    match t.stabilized_at {
        Some(r) => writeln!(out, "# stabilized at sample radius {r} of {}", t.sample_radius).unwrap(),
        None => writeln!(out, "# not stabilized below sample radius {}", t.sample_radius).unwrap(),
    }
    write_sft(out, "tracked", &t.sft.group().to_string(), &t.sft).unwrap();
    writeln!(out).unwrap();
    Ok(if t.stabilized_at.is_some() { 0 } else { 2 })
}

fn auto_verify(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let a = load_automaton(cli, &spec)?;
    let r = cli.radius;
    let run_radius = r + 2;
    let mut violations = 0;
    for c in 0..a.colors().len() {
        let run = automaton::run(&a, &crate::group::GroupElement::identity(), c, run_radius);
        violations += automaton::check_local_rules(&a, &run).len();
    }
    writeln!(out, "local rules on ball({run_radius}): {}", pass(violations == 0)).unwrap();
    let t = automaton::tilde_sft(&a, r + 1)?;
    writeln!(out, "tracked letters: {}, window patterns: {}", t.letters.len(), t.sft.allowed().len()).unwrap();
    let d = automaton::dichotomy_check(&t, r);
    writeln!(out, "dichotomy at radius {r}: {} ({} patterns)", pass(d.pass), d.checked).unwrap();
    if let Some(w) = &d.witness {
        writeln!(out, "dichotomy witness: {w}").unwrap();
    }
    let p = automaton::projection_check(&a, &t, r, 2 * r);
    writeln!(out, "projection at radius {r}: {} (image {}, sampled {}, exact {})", pass(p.surjective), p.image, p.sampled, p.exact)
        .unwrap();
    let iso = automaton::isolation_certificate(&a, &t)?;
    writeln!(out, "isolation certificate: {}", pass(iso)).unwrap();
    Ok(if violations == 0 && d.pass && p.surjective && iso { 0 } else { 1 })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn trace(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    if cli.suite {
        let x = spec.sft(cli.name.as_deref())?;
        let rep = shadowing::sft_shadowing_suite(x, cli.coarse, cli.length, cli.budget)?;
        writeln!(out, "pseudo-orbits: {}", rep.total).unwrap();
        writeln!(out, "traced: {}", rep.traced).unwrap();
        if let Some(f) = &rep.first_failure {
            let blocks: Vec<String> = f.iter().map(|b| word(x, b)).collect();
            writeln!(out, "first failure: {}", blocks.join(" | ")).unwrap();
        }
        return Ok(if rep.traced == rep.total { 0 } else { 1 });
    }
    let p: &PseudoOrbit = spec.pseudo_orbit(cli.name.as_deref())?;
    match shadowing::validate_and_trace(p)? {
        TraceOutcome::Traced(t) => {
            let ok = shadowing::check_trace(p, &t)?;
            writeln!(out, "traced: {}", t.show(p.sft.alphabet())).unwrap();
            writeln!(out, "validated: {ok}").unwrap();
            Ok(if ok { 0 } else { 1 })
        }
        TraceOutcome::Refused { index } => {
            writeln!(out, "refused: transition {index} -> {} disagrees at level {}", index + 1, p.coarse).unwrap();
            Ok(1)
        }
        TraceOutcome::Untraceable => {
            writeln!(out, "untraceable: core word does not extend").unwrap();
            Ok(1)
        }
    }
}

fn ml_check(cli: &Cli, out: &mut String) -> Result<i32> {
    let spec = load(cli)?;
    let sys = spec.system(cli.name.as_deref())?;
    let v = shadowing::ml_check(sys, cli.level, cli.depth)?;
    for (i, img) in v.images.iter().enumerate() {
        writeln!(out, "image of level {} in level {}: {} states", v.first + i, v.first, img.vertex_count()).unwrap();
    }
    match v.stabilized_at {
        Some(n) => {
            writeln!(out, "stabilized at level {n}").unwrap();
            Ok(0)
        }
        None => {
            writeln!(out, "no stabilization within levels {}..{}", v.first, v.last).unwrap();
            Ok(2)
        }
    }
}

fn toeplitz_gen(cli: &Cli, out: &mut String) -> Result<i32> {
    let text = required("omega", &cli.omega)?;
    let omega = text
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Precondition(format!("bad omega digit '{c}'"))))
        .collect::<Result<Vec<u8>>>()?;
    writeln!(out, "{}", toeplitz::generate(&omega, cli.lo, cli.hi)?).unwrap();
    Ok(0)
}

fn toeplitz_recover(cli: &Cli, out: &mut String) -> Result<i32> {
    let w: ToeplitzWindow = read_file(cli)?.parse()?;
    let levels = cli.levels.unwrap_or_else(|| w.coverage.iter().filter_map(|c| c.level()).max().unwrap_or(0));
    let r = toeplitz::recover(&w, levels)?;
    let digits: String = r.omega.iter().map(|d| d.to_string()).collect();
    writeln!(out, "omega: {digits}").unwrap();
    writeln!(out, "complete: {}", r.complete).unwrap();
    Ok(if r.complete { 0 } else { 2 })
}

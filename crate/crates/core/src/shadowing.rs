//! Pseudo-orbits of ℤ-SFTs, their traces, and stabilization of inverse systems.

use std::fmt;

use crate::analysis::essential_graph;
use crate::rauzy::z_language;
use crate::error::{structural, Error, Result};
use crate::pattern::Pattern;
use crate::sft::{AlphabetMap, Sft};
use crate::sofic::{canonical_form, image_sofic, SoficPresentation};

/// Consecutive `fine`-blocks, compared at the `coarse` level.
#[derive(Debug, Clone)]
pub struct PseudoOrbit {
    pub sft: Sft,
    pub fine: usize,
    pub coarse: usize,
    pub blocks: Vec<Vec<usize>>,
}

/// A bi-infinite point, eventually periodic in both directions:
/// `(prefix_loop)^∞ prefix core suffix (suffix_loop)^∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub prefix_loop: Vec<usize>,
    pub prefix: Vec<usize>,
    pub core: Vec<usize>,
    pub suffix: Vec<usize>,
    pub suffix_loop: Vec<usize>,
}

impl Trace {
    /// Finite window with each loop repeated `reps` times; the core starts at
    /// the returned offset.
    pub fn finite_word(&self, reps: usize) -> (Vec<usize>, usize) {
        let mut w = Vec::new();
        for _ in 0..reps {
            w.extend(&self.prefix_loop);
        }
        w.extend(&self.prefix);
        let offset = w.len();
        w.extend(&self.core);
        w.extend(&self.suffix);
        for _ in 0..reps {
            w.extend(&self.suffix_loop);
        }
        (w, offset)
    }

    pub fn show(&self, alphabet: &[String]) -> String {
        let sep = if alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { " " };
        let word = |w: &[usize]| w.iter().map(|&a| alphabet[a].as_str()).collect::<Vec<_>>().join(sep);
        format!(
            "({})^inf {}[{}]{} ({})^inf",
            word(&self.prefix_loop),
            word(&self.prefix),
            word(&self.core),
            word(&self.suffix),
            word(&self.suffix_loop)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceOutcome {
    Traced(Trace),
    /// The overlap between blocks `index` and `index + 1` disagrees.
    Refused { index: usize },
    /// The blocks chain, but the word they spell lies on no bi-infinite path.
    Untraceable,
}

impl fmt::Display for TraceOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceOutcome::Traced(t) => write!(f, "traced {:?}", t.core),
            TraceOutcome::Refused { index } => write!(f, "refused at index {index}"),
            TraceOutcome::Untraceable => write!(f, "untraceable"),
        }
    }
}

/// Checks that the blocks are words of the language and, if they chain, returns a point whose `i`-th coarse
/// block starts like block `i`.
pub fn validate_and_trace(p: &PseudoOrbit) -> Result<TraceOutcome> {
    if p.coarse > p.fine || p.fine == 0 {
        return structural("need 0 < coarse ≤ fine");
    }
    if p.blocks.is_empty() {
        return structural("pseudo-orbit has no blocks");
    }
    let language = z_language(&p.sft, p.fine)?;
    for (i, b) in p.blocks.iter().enumerate() {
        if b.len() != p.fine {
            return structural(format!("block {i} has length {} instead of {}", b.len(), p.fine));
        }
        if !language.contains(b) {
            return structural(format!("block {i} does not occur in any point"));
        }
    }
    for (i, pair) in p.blocks.windows(2).enumerate() {
        if pair[0][1..] != pair[1][..p.fine - 1] {
            return Ok(TraceOutcome::Refused { index: i });
        }
    }
    let mut core = p.blocks[0].clone();
    core.extend(p.blocks[1..].iter().map(|b| *b.last().expect("nonempty")));
    Ok(match extend_word(&p.sft, &core)? {
        Some(t) => TraceOutcome::Traced(t),
        None => TraceOutcome::Untraceable,
    })
}

/// Extends a word to a bi-infinite point through the essential graph,
/// choosing least vertices wherever there is a choice.
pub fn extend_word(x: &Sft, core: &[usize]) -> Result<Option<Trace>> {
    let (graph, letters) = essential_graph(x)?;
    let succ = graph.successors()?;
    let pred = graph.predecessors()?;
    let n = graph.len();
    if core.is_empty() || n == 0 {
        return Ok(None);
    }
    // alive[i][v]: some path spelling core[i..] starts at v.
    let mut alive = vec![vec![false; n]; core.len()];
    for v in 0..n {
        alive[core.len() - 1][v] = letters[v] == core[core.len() - 1];
    }
    for i in (0..core.len() - 1).rev() {
        for v in 0..n {
            alive[i][v] = letters[v] == core[i] && succ[v].iter().any(|&w| alive[i + 1][w]);
        }
    }
    let Some(first) = (0..n).find(|&v| alive[0][v]) else {
        return Ok(None);
    };
    let mut path = vec![first];
    for next in &alive[1..] {
        let v = *path.last().expect("nonempty");
        path.push(*succ[v].iter().find(|&&w| next[w]).expect("alive path continues"));
    }
    let word = |vs: &[usize]| vs.iter().map(|&v| letters[v]).collect::<Vec<usize>>();
    let (back_loop, back_tail) = walk(&pred, path[0]);
    let (fwd_loop, fwd_tail) = walk(&succ, *path.last().expect("nonempty"));
    let prefix: Vec<usize> = back_tail.iter().rev().copied().collect();
    let prefix_loop: Vec<usize> = back_loop.iter().rev().copied().collect();
    Ok(Some(Trace {
        prefix_loop: word(&prefix_loop),
        prefix: word(&prefix),
        core: core.to_vec(),
        suffix: word(&fwd_tail),
        suffix_loop: word(&fwd_loop),
    }))
}

/// Follows least neighbours from `start` until a vertex repeats. Returns the
/// repeating cycle and the transient part, both in walking order and
/// excluding `start` unless the cycle passes through it.
fn walk(next: &[Vec<usize>], start: usize) -> (Vec<usize>, Vec<usize>) {
    let mut chain = vec![start];
    loop {
        let v = *chain.last().expect("nonempty");
        let w = next[v][0];
        if let Some(i) = chain.iter().position(|&u| u == w) {
            return if i == 0 {
                let mut cycle = chain[1..].to_vec();
                cycle.push(chain[0]);
                (cycle, Vec::new())
            } else {
                (chain[i..].to_vec(), chain[1..i].to_vec())
            };
        }
        chain.push(w);
    }
}

/// Whether `t` is a valid trace of `p`: exact coarse prefixes and a locally
/// admissible finite window around the core.
pub fn check_trace(p: &PseudoOrbit, t: &Trace) -> Result<bool> {
    for (i, b) in p.blocks.iter().enumerate() {
        if t.core.get(i..i + p.coarse) != Some(&b[..p.coarse]) {
            return Ok(false);
        }
    }
    let (w, _) = t.finite_word(2);
    p.sft.locally_admissible(&Pattern::word(&w, 0, p.sft.alphabet().len())?)
}

#[derive(Debug, Clone)]
pub struct ShadowReport {
    pub total: usize,
    pub traced: usize,
    pub first_failure: Option<Vec<Vec<usize>>>,
}

/// Traces every pseudo-orbit with `fine = coarse + 1` and at most `max_len`
/// transitions; 1-step SFTs only.
pub fn sft_shadowing_suite(x: &Sft, coarse: usize, max_len: usize, budget: usize) -> Result<ShadowReport> {
    let ints: Option<Vec<i64>> = x.window().iter().map(|g| g.as_integer()).collect();
    match ints.as_deref() {
        Some([a, b]) if b - a == 1 => {}
        Some([_]) => {}
        _ => return Err(Error::Precondition("the suite needs a 1-step ℤ-SFT".into())),
    }
    let fine = coarse + 1;
    let blocks: Vec<Vec<usize>> = z_language(x, fine)?.into_iter().collect();
    let mut report = ShadowReport { total: 0, traced: 0, first_failure: None };
    let mut stack: Vec<Vec<Vec<usize>>> = blocks.iter().map(|b| vec![b.clone()]).collect();
    while let Some(seq) = stack.pop() {
        report.total += 1;
        if report.total > budget {
            return Err(Error::Budget(format!("more than {budget} pseudo-orbits")));
        }
        let p = PseudoOrbit { sft: x.clone(), fine, coarse, blocks: seq.clone() };
        let ok = match validate_and_trace(&p)? {
            TraceOutcome::Traced(t) => check_trace(&p, &t)?,
            _ => false,
        };
        if ok {
            report.traced += 1;
        } else if report.first_failure.is_none() {
            report.first_failure = Some(seq.clone());
        }
        if seq.len() <= max_len {
            let last = seq.last().expect("nonempty");
            for b in blocks.iter().filter(|b| b[..fine - 1] == last[1..]) {
                let mut next = seq.clone();
                next.push(b.clone());
                stack.push(next);
            }
        }
    }
    Ok(report)
}

/// Levels `X_1, X_2, …`; level `n ≥ 2` carries a bonding map into level `n − 1`.
#[derive(Debug, Clone)]
pub struct InverseSystem {
    pub levels: Vec<Sft>,
    pub bondings: Vec<AlphabetMap>,
}

impl InverseSystem {
    pub fn new(levels: Vec<Sft>, bondings: Vec<AlphabetMap>) -> Result<Self> {
        if levels.is_empty() || bondings.len() + 1 != levels.len() {
            return structural("an inverse system needs one bonding map per level after the first");
        }
        for (i, m) in bondings.iter().enumerate() {
            if m.source != levels[i + 1].alphabet() || m.target != levels[i].alphabet() {
                return structural(format!("bonding map into level {} does not match the alphabets", i + 1));
            }
        }
        Ok(InverseSystem { levels, bondings })
    }

    /// Composite map from level `n` down to level `n0` (1-based).
    pub fn composite(&self, n0: usize, n: usize) -> Result<AlphabetMap> {
        let mut m = AlphabetMap::identity(self.levels[n - 1].alphabet());
        for level in (n0 + 1..=n).rev() {
            m = m.then(&self.bondings[level - 2])?;
        }
        Ok(m)
    }
}

#[derive(Debug, Clone)]
pub struct MlVerdict {
    /// Least level from which every examined image agrees.
    pub stabilized_at: Option<usize>,
    pub first: usize,
    pub last: usize,
    pub images: Vec<SoficPresentation>,
}

/// Examines levels `n0 ..= n0 + depth − 1` and compares the images of each in
/// level `n0` as canonical sofic presentations.
pub fn ml_check(sys: &InverseSystem, n0: usize, depth: usize) -> Result<MlVerdict> {
    if n0 == 0 || depth == 0 {
        return Err(Error::Precondition("levels are 1-based and depth must be positive".into()));
    }
    let last = n0 + depth - 1;
    if last > sys.levels.len() {
        return Err(Error::Precondition(format!("levels {n0}..{last} requested but only {} present", sys.levels.len())));
    }
    let mut images = Vec::new();
    for n in n0..=last {
        let m = sys.composite(n0, n)?;
        images.push(canonical_form(&image_sofic(&sys.levels[n - 1], &m)?));
    }
    let stabilized_at = (n0..last).find(|&n| images[n - n0..].iter().all(|i| *i == images[n - n0]));
    Ok(MlVerdict { stabilized_at, first: n0, last, images })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::names;

    fn golden() -> Sft {
        Sft::z_forbidden_words(names(2), 2, &[vec![1, 1]]).unwrap()
    }

    #[test]
    fn golden_trace() {
        let p = PseudoOrbit { sft: golden(), fine: 2, coarse: 1, blocks: vec![vec![0, 1], vec![1, 0], vec![0, 0]] };
        let TraceOutcome::Traced(t) = validate_and_trace(&p).unwrap() else { panic!("not traced") };
        assert_eq!(t.core, vec![0, 1, 0, 0]);
        assert!(check_trace(&p, &t).unwrap());
        assert_eq!(t.show(golden().alphabet()), "(0)^inf [0100] (0)^inf");
        let bad = PseudoOrbit { blocks: vec![vec![0, 1], vec![0, 0]], ..p.clone() };
        assert_eq!(validate_and_trace(&bad).unwrap(), TraceOutcome::Refused { index: 0 });
        let illegal = PseudoOrbit { blocks: vec![vec![1, 1]], ..p };
        assert!(validate_and_trace(&illegal).is_err());
    }

    #[test]
    fn suites() {
        let r = sft_shadowing_suite(&golden(), 1, 6, 100_000).unwrap();
        assert_eq!(r.traced, r.total);
        let cycle = Sft::z_allowed_words(names(3), 2, &[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        let r = sft_shadowing_suite(&cycle, 1, 9, 100_000).unwrap();
        assert_eq!((r.traced, r.total), (30, 30));
    }

    #[test]
    fn constant_and_shrinking_systems() {
        let g = golden();
        let id = AlphabetMap::identity(g.alphabet());
        let sys = InverseSystem::new(vec![g.clone(), g.clone(), g], vec![id.clone(), id]).unwrap();
        assert_eq!(ml_check(&sys, 1, 3).unwrap().stabilized_at, Some(1));

        let levels: Vec<Sft> = (1..=4)
            .map(|n| {
                let forbidden: Vec<Vec<usize>> =
                    (0..2 * n).map(|j| [vec![1], vec![0; j], vec![1]].concat()).collect();
                Sft::z_forbidden_factors(names(2), &forbidden).unwrap()
            })
            .collect();
        let id = AlphabetMap::identity(levels[0].alphabet());
        let sys = InverseSystem::new(levels, vec![id; 3]).unwrap();
        assert_eq!(ml_check(&sys, 1, 4).unwrap().stabilized_at, None);
    }
}

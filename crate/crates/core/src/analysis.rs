//! Isolation, no-middle-cycle and minimality checks for ℤ-SFTs at finite scale.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{structural, Error, Result};
use crate::rauzy::{to_rauzy, z_language, RauzyGraph};
use crate::sft::Sft;

pub const DEFAULT_VERTEX_CAP: usize = 12;

/// Simple cycles of a ℤ graph, each as its vertex list starting at the least vertex.
pub fn simple_cycles(r: &RauzyGraph, vertex_cap: usize) -> Result<Vec<Vec<usize>>> {
    if r.len() > vertex_cap {
        return Err(Error::Budget(format!("{} vertices exceed the cycle-enumeration cap {vertex_cap}", r.len())));
    }
    let succ = r.successors()?;
    let mut cycles = Vec::new();
    for start in 0..r.len() {
        let mut path = vec![start];
        let mut on_path = vec![false; r.len()];
        on_path[start] = true;
        extend_cycles(&succ, start, &mut path, &mut on_path, &mut cycles);
    }
    Ok(cycles)
}

fn extend_cycles(succ: &[Vec<usize>], start: usize, path: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let v = *path.last().expect("nonempty");
    for &w in &succ[v] {
        if w == start {
            out.push(path.clone());
        } else if w > start && !on_path[w] {
            on_path[w] = true;
            path.push(w);
            extend_cycles(succ, start, path, on_path, out);
            path.pop();
            on_path[w] = false;
        }
    }
}

/// Cycles with both an edge entering from outside and an edge leaving to outside.
pub fn middle_cycles(r: &RauzyGraph, vertex_cap: usize) -> Result<Vec<Vec<usize>>> {
    let fwd = r.forward()?;
    Ok(simple_cycles(r, vertex_cap)?
        .into_iter()
        .filter(|c| {
            let inside: BTreeSet<usize> = c.iter().copied().collect();
            let enters = fwd.iter().any(|(u, v)| !inside.contains(u) && inside.contains(v));
            let leaves = fwd.iter().any(|(u, v)| inside.contains(u) && !inside.contains(v));
            enters && leaves
        })
        .collect())
}

/// No simple cycle has both an external in-edge and an external out-edge.
pub fn nmc_check(r: &RauzyGraph, vertex_cap: usize) -> Result<bool> {
    Ok(middle_cycles(r, vertex_cap)?.is_empty())
}

/// No vertex has both in-degree and out-degree above one.
pub fn degree_condition(r: &RauzyGraph) -> Result<bool> {
    let succ = r.successors()?;
    let pred = r.predecessors()?;
    Ok((0..r.len()).all(|v| succ[v].len() <= 1 || pred[v].len() <= 1))
}

/// Whether each vertex lies on some cycle.
pub fn on_cycle(r: &RauzyGraph) -> Result<Vec<bool>> {
    let succ = r.successors()?;
    let n = r.len();
    let reach = |from: usize| {
        let mut seen = vec![false; n];
        let mut stack = succ[from].clone();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(succ[v].iter().copied());
            }
        }
        seen
    };
    Ok((0..n).map(|v| reach(v)[v]).collect())
}

/// The essential ℤ graph of `x` with each vertex's letter.
pub(crate) fn essential_graph(x: &Sft) -> Result<(RauzyGraph, Vec<usize>)> {
    if !x.group().is_integers() {
        return Err(Error::Unsupported("analysis is defined for ℤ-SFTs".into()));
    }
    let rec = to_rauzy(x, 0)?;
    let ess = rec.graph.essentialize();
    let letters = ess
        .vertices()
        .iter()
        .map(|name| rec.letter[rec.graph.vertices().iter().position(|v| v == name).expect("kept vertex")])
        .collect();
    Ok((ess, letters))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolationStatus {
    IsolatedCertified,
    NotIsolated,
    Unknown,
}

impl fmt::Display for IsolationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IsolationStatus::IsolatedCertified => "isolated-certified",
            IsolationStatus::NotIsolated => "not-isolated",
            IsolationStatus::Unknown => "unknown",
        })
    }
}

/// A proper sub-SFT: `x` with one more forbidden word.
#[derive(Debug, Clone)]
pub struct SubSftWitness {
    pub forbidden: Vec<usize>,
    pub sft: Sft,
}

#[derive(Debug, Clone)]
pub struct IsolationVerdict {
    pub status: IsolationStatus,
    pub certificate: String,
    pub witness: Option<SubSftWitness>,
    pub bounds: String,
}

/// Parameters of the isolation search.
#[derive(Debug, Clone, Copy)]
pub struct IsolationBounds {
    /// Length of the words making up the pattern set `F`.
    pub f_len: usize,
    pub search_window: usize,
    pub distinguish_len: usize,
    pub vertex_cap: usize,
}

impl Default for IsolationBounds {
    fn default() -> Self {
        IsolationBounds { f_len: 2, search_window: 4, distinguish_len: 8, vertex_cap: DEFAULT_VERTEX_CAP }
    }
}

/// `x` restricted to points avoiding `word`, on a contiguous window long
/// enough to hold both `x`'s constraints and the word.
pub fn forbid_word(x: &Sft, word: &[usize]) -> Result<Sft> {
    let span = window_span(x)?;
    let n = span.max(word.len());
    let allowed: Vec<Vec<usize>> = z_language(x, n)?
        .into_iter()
        .filter(|w| !w.windows(word.len()).any(|s| s == word))
        .collect();
    if allowed.is_empty() {
        return Err(Error::Degenerate("sub-SFT is empty".into()));
    }
    Sft::z_allowed_words(x.alphabet().to_vec(), n, &allowed)
}

fn window_span(x: &Sft) -> Result<usize> {
    let ints: Option<Vec<i64>> = x.window().iter().map(|g| g.as_integer()).collect();
    let ints = ints.ok_or_else(|| Error::Unsupported("window is not over ℤ".into()))?;
    Ok((ints.iter().max().expect("nonempty") - ints.iter().min().expect("nonempty")) as usize + 1)
}

/// Three-valued isolation check with respect to the length-`f_len` words.
///
/// A proper sub-SFT with the same `F`-words exists at window `w` iff removing
/// a single word of length `w` works, so the refutation search is complete
/// for windows up to `min(search_window, distinguish_len)`.
pub fn isolated_check(x: &Sft, bounds: &IsolationBounds) -> Result<IsolationVerdict> {
    let (graph, _) = essential_graph(x)?;
    if graph.is_empty() {
        return Err(Error::Precondition("SFT is empty".into()));
    }
    let top = bounds.search_window.min(bounds.distinguish_len);
    let bounds_text = format!(
        "f_len={} search_window={} distinguish_len={}",
        bounds.f_len, bounds.search_window, bounds.distinguish_len
    );
    // Middle cycles lift to middle cycles in higher-block graphs, so one check suffices.
    let nmc = nmc_check(&graph, bounds.vertex_cap);
    match nmc {
        Ok(true) => {
            return Ok(IsolationVerdict {
                status: IsolationStatus::IsolatedCertified,
                certificate: format!("no middle cycles ({} vertices)", graph.len()),
                witness: None,
                bounds: bounds_text,
            })
        }
        Ok(false) | Err(Error::Budget(_)) => {}
        Err(e) => return Err(e),
    }
    if let Some(w) = refute_isolation(x, bounds)? {
        return Ok(IsolationVerdict {
            status: IsolationStatus::NotIsolated,
            certificate: format!("forbid {}", show_word(x, &w.forbidden)),
            witness: Some(w),
            bounds: bounds_text,
        });
    }
    nmc?;
    Ok(IsolationVerdict {
        status: IsolationStatus::Unknown,
        certificate: format!("middle cycles present and no single-word sub-SFT up to length {top} keeps the F-words"),
        witness: None,
        bounds: bounds_text,
    })
}

/// Single-word removals of length `f_len + 1 ..= min(search_window,
/// distinguish_len)` that keep every `F`-word; the first found, scanning
/// lengths upward and words in descending order.
pub fn refute_isolation(x: &Sft, bounds: &IsolationBounds) -> Result<Option<SubSftWitness>> {
    let top = bounds.search_window.min(bounds.distinguish_len);
    let f_words = z_language(x, bounds.f_len)?;
    for w in bounds.f_len + 1..=top {
        for u in z_language(x, w)?.into_iter().rev() {
            let y = match forbid_word(x, &u) {
                Ok(y) => y,
                Err(Error::Degenerate(_)) => continue,
                Err(e) => return Err(e),
            };
            if z_language(&y, bounds.f_len)? == f_words {
                return Ok(Some(SubSftWitness { forbidden: u, sft: y }));
            }
        }
    }
    Ok(None)
}

/// Re-checks a not-isolated witness: same `F`-words, and the forbidden word
/// is in `x`'s language but not the witness's.
pub fn validate_witness(x: &Sft, witness: &SubSftWitness, f_len: usize) -> Result<bool> {
    let n = witness.forbidden.len();
    Ok(z_language(x, f_len)? == z_language(&witness.sft, f_len)?
        && z_language(x, n)?.contains(&witness.forbidden)
        && !z_language(&witness.sft, n)?.contains(&witness.forbidden))
}

pub(crate) fn show_word(x: &Sft, w: &[usize]) -> String {
    let sep = if x.alphabet().iter().all(|a| a.chars().count() == 1) { "" } else { " " };
    w.iter().map(|&a| x.alphabet()[a].as_str()).collect::<Vec<_>>().join(sep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone)]
pub struct MinimalVerdict {
    pub status: Tri,
    pub certificate: String,
    pub witness: Option<SubSftWitness>,
}

/// Whether the essential graph is one simple cycle.
pub fn is_single_cycle(r: &RauzyGraph) -> Result<bool> {
    if r.is_empty() {
        return Ok(false);
    }
    let succ = r.successors()?;
    let pred = r.predecessors()?;
    if (0..r.len()).any(|v| succ[v].len() != 1 || pred[v].len() != 1) {
        return Ok(false);
    }
    let mut v = succ[0][0];
    let mut steps = 1;
    while v != 0 {
        v = succ[v][0];
        steps += 1;
    }
    Ok(steps == r.len())
}

/// Minimality, or minimality relative to the cylinders of `partition` (words at position 0).
pub fn minimal_check(x: &Sft, partition: Option<&[Vec<usize>]>, search_window: usize) -> Result<MinimalVerdict> {
    let (graph, letters) = essential_graph(x)?;
    if graph.is_empty() {
        return Err(Error::Precondition("SFT is empty".into()));
    }
    if is_single_cycle(&graph)? {
        return Ok(MinimalVerdict { status: Tri::True, certificate: format!("single cycle of length {}", graph.len()), witness: None });
    }
    let Some(cylinders) = partition else {
        // A proper subshift: the orbit of any simple cycle.
        let cycle = simple_cycles(&graph, usize::MAX)?.into_iter().next().expect("essential graph has a cycle");
        let word: Vec<usize> = cycle.iter().map(|&v| letters[v]).collect();
        return Ok(MinimalVerdict {
            status: Tri::False,
            certificate: format!("periodic orbit of {} is a proper subshift", show_word(x, &word)),
            witness: None,
        });
    };
    for c in cylinders {
        if c.is_empty() || !z_language(x, c.len())?.contains(c) {
            return structural(format!("cylinder {} is not allowed", show_word(x, c)));
        }
    }
    for w in 1..=search_window {
        for u in z_language(x, w)?.into_iter().rev() {
            let y = match forbid_word(x, &u) {
                Ok(y) => y,
                Err(Error::Degenerate(_)) => continue,
                Err(e) => return Err(e),
            };
            let mut hits = true;
            for c in cylinders {
                if !z_language(&y, c.len())?.contains(c) {
                    hits = false;
                    break;
                }
            }
            if hits {
                return Ok(MinimalVerdict {
                    status: Tri::False,
                    certificate: format!("forbid {} keeps every cylinder", show_word(x, &u)),
                    witness: Some(SubSftWitness { forbidden: u, sft: y }),
                });
            }
        }
    }
    for c in cylinders {
        if let Some(text) = lollipop_certificate(&graph, &letters, c)? {
            return Ok(MinimalVerdict { status: Tri::True, certificate: text, witness: None });
        }
    }
    Ok(MinimalVerdict {
        status: Tri::Unknown,
        certificate: format!("no single-word sub-SFT up to length {search_window} hits every cylinder"),
        witness: None,
    })
}

/// Certificate that every point through cylinder `c` has dense orbit: `c` has
/// a unique realizing path, forced backward and forward into cycles, and the
/// graph is exactly that path with its two end cycles.
fn lollipop_certificate(graph: &RauzyGraph, letters: &[usize], c: &[usize]) -> Result<Option<String>> {
    let succ = graph.successors()?;
    let pred = graph.predecessors()?;
    let mut paths: Vec<Vec<usize>> = (0..graph.len()).filter(|&v| letters[v] == c[0]).map(|v| vec![v]).collect();
    for &a in &c[1..] {
        paths = paths
            .iter()
            .flat_map(|p| succ[*p.last().expect("nonempty")].iter().filter(|&&w| letters[w] == a).map(move |&w| [p.as_slice(), &[w]].concat()))
            .collect();
    }
    let [path] = paths.as_slice() else {
        return Ok(None);
    };
    let mut used: BTreeSet<(usize, usize)> = path.windows(2).map(|e| (e[0], e[1])).collect();
    let forced = |start: usize, next: &[Vec<usize>], used: &mut BTreeSet<(usize, usize)>, forward: bool| -> Option<()> {
        let mut seen = BTreeSet::from([start]);
        let mut v = start;
        loop {
            let [w] = next[v].as_slice() else {
                return None;
            };
            used.insert(if forward { (v, *w) } else { (*w, v) });
            if !seen.insert(*w) {
                return Some(());
            }
            v = *w;
        }
    };
    if forced(*path.last().expect("nonempty"), &succ, &mut used, true).is_none()
        || forced(path[0], &pred, &mut used, false).is_none()
    {
        return Ok(None);
    }
    if used == *graph.forward()? {
        Ok(Some(format!("every point through the cylinder has dense orbit ({} edges)", used.len())))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::names;

    fn example_graph() -> RauzyGraph {
        let v = vec!["-1".to_string(), "0".into(), "1".into()];
        RauzyGraph::over_integers(v, [(0, 0), (0, 2), (2, 1), (1, 1)]).unwrap()
    }

    fn example_sft() -> Sft {
        example_graph().vertex_shift().unwrap()
    }

    #[test]
    fn nmc_examples() {
        assert!(nmc_check(&example_graph(), 12).unwrap());
        let cycle = RauzyGraph::over_integers(names(3), [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(nmc_check(&cycle, 12).unwrap());
        let full = RauzyGraph::over_integers(names(2), [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert!(!nmc_check(&full, 12).unwrap());
        assert!(matches!(nmc_check(&full, 1), Err(Error::Budget(_))));
    }

    #[test]
    fn full_shift_is_not_isolated() {
        let x = Sft::z_forbidden_words(names(2), 2, &[]).unwrap();
        let v = isolated_check(&x, &IsolationBounds::default()).unwrap();
        assert_eq!(v.status, IsolationStatus::NotIsolated);
        let w = v.witness.unwrap();
        assert_eq!(w.forbidden, vec![1, 1, 1]);
        assert!(validate_witness(&x, &w, 2).unwrap());
    }

    #[test]
    fn example_is_isolated() {
        let v = isolated_check(&example_sft(), &IsolationBounds::default()).unwrap();
        assert_eq!(v.status, IsolationStatus::IsolatedCertified);
        let fixed = Sft::z_allowed_words(names(2), 2, &[vec![0, 0]]).unwrap();
        assert_eq!(isolated_check(&fixed, &IsolationBounds::default()).unwrap().status, IsolationStatus::IsolatedCertified);
    }

    #[test]
    fn minimality() {
        let cycle = Sft::z_allowed_words(names(3), 2, &[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(minimal_check(&cycle, None, 4).unwrap().status, Tri::True);
        let golden = Sft::z_forbidden_words(names(2), 2, &[vec![1, 1]]).unwrap();
        assert_eq!(minimal_check(&golden, None, 4).unwrap().status, Tri::False);
        let x = example_sft();
        let cylinders = vec![vec![0, 0], vec![0, 2], vec![2, 1], vec![1, 1]];
        assert_eq!(minimal_check(&x, Some(&cylinders), 4).unwrap().status, Tri::True);
        assert!(minimal_check(&x, Some(&[vec![1, 0]]), 4).is_err());
    }
}

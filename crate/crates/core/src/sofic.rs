//! Sliding-block codes, sofic images over ℤ and canonical presentations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{structural, Error, Result};
use crate::group::{Group, GroupElement, Support};
use crate::pattern::Pattern;
use crate::rauzy::{to_rauzy, RauzyGraph};
use crate::sft::{all_words, AlphabetMap, Sft};

/// `φ(x)(g) = rule(x restricted to g·window)`, with the window in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlidingBlockCode {
    group: Group,
    window: Vec<GroupElement>,
    source_size: usize,
    target_size: usize,
    rule: BTreeMap<Vec<usize>, usize>,
}

impl SlidingBlockCode {
    /// `rule` keys are aligned with `window` as given.
    pub fn new(
        group: Group,
        window: Vec<GroupElement>,
        source_size: usize,
        target_size: usize,
        rule: impl IntoIterator<Item = (Vec<usize>, usize)>,
    ) -> Result<Self> {
        let sorted: Vec<GroupElement> = window.iter().cloned().collect::<Support>().into_iter().collect();
        if sorted.is_empty() || sorted.len() != window.len() {
            return structural("code window must be nonempty without repeats");
        }
        let perm: Vec<usize> = sorted.iter().map(|g| window.iter().position(|w| w == g).expect("same")).collect();
        let mut table = BTreeMap::new();
        for (key, value) in rule {
            if key.len() != window.len() || key.iter().any(|&a| a >= source_size) || value >= target_size {
                return structural("code rule entry out of range");
            }
            table.insert(perm.iter().map(|&j| key[j]).collect(), value);
        }
        Ok(SlidingBlockCode { group, window: sorted, source_size, target_size, rule: table })
    }

    /// The 1-block code of an alphabet map.
    pub fn from_map(group: Group, m: &AlphabetMap) -> Self {
        let rule = (0..m.source.len()).map(|a| (vec![a], m.apply(a))).collect();
        SlidingBlockCode {
            group,
            window: vec![GroupElement::identity()],
            source_size: m.source.len(),
            target_size: m.target.len(),
            rule,
        }
    }

    pub fn window(&self) -> &[GroupElement] {
        &self.window
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    /// Applies the code at every `g` with `g·window ⊆ support(p)`.
    pub fn apply(&self, p: &Pattern) -> Result<Pattern> {
        if p.alphabet_size() != self.source_size {
            return structural("pattern alphabet does not match the code source");
        }
        let mut candidates = Support::new();
        for f in p.cells().keys() {
            for w in &self.window {
                candidates.insert(self.group.mul(f, &self.group.inverse(w)));
            }
        }
        let mut out = BTreeMap::new();
        for g in candidates {
            let key: Option<Vec<usize>> = self.window.iter().map(|w| p.get(&self.group.mul(&g, w))).collect();
            if let Some(key) = key {
                let Some(&b) = self.rule.get(&key) else {
                    return structural(format!("code rule undefined on {key:?}"));
                };
                out.insert(g, b);
            }
        }
        if out.is_empty() {
            return Err(Error::Degenerate("code output support is empty".into()));
        }
        Pattern::new(out, self.target_size)
    }

    /// The code `x ↦ next(self(x))`, with window `next.window · self.window`.
    pub fn then(&self, next: &SlidingBlockCode) -> Result<SlidingBlockCode> {
        if self.target_size != next.source_size || self.group != next.group {
            return structural("codes do not compose");
        }
        let window: Vec<GroupElement> = next
            .window
            .iter()
            .flat_map(|h| self.window.iter().map(move |f| (h, f)))
            .map(|(h, f)| self.group.mul(h, f))
            .collect::<Support>()
            .into_iter()
            .collect();
        let mut rule = Vec::new();
        for letters in all_words(self.source_size, window.len()) {
            let p = Pattern::from_parts(&window, &letters, self.source_size)?;
            let mid = match self.apply(&p) {
                Ok(m) => m,
                Err(Error::Structural(_)) => continue,
                Err(e) => return Err(e),
            };
            match next.apply(&mid) {
                Ok(q) => {
                    if let Some(b) = q.get(&GroupElement::identity()) {
                        rule.push((letters, b));
                    }
                }
                Err(Error::Structural(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        SlidingBlockCode::new(self.group.clone(), window, self.source_size, next.target_size, rule)
    }
}

/// Free-function form of [`SlidingBlockCode::apply`].
pub fn apply_code(c: &SlidingBlockCode, p: &Pattern) -> Result<Pattern> {
    c.apply(p)
}

/// Edge-labelled graph over ℤ; the sofic shift is the set of label sequences
/// of bi-infinite paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoficPresentation {
    alphabet: Vec<String>,
    vertices: usize,
    edges: BTreeSet<(usize, usize, usize)>,
}

impl SoficPresentation {
    /// Edges are `(from, to, label)`.
    pub fn new(alphabet: Vec<String>, vertices: usize, edges: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        if alphabet.is_empty() {
            return structural("label alphabet must be nonempty");
        }
        let edges: BTreeSet<(usize, usize, usize)> = edges.into_iter().collect();
        if edges.iter().any(|&(u, v, a)| u >= vertices || v >= vertices || a >= alphabet.len()) {
            return structural("presentation edge out of range");
        }
        Ok(SoficPresentation { alphabet, vertices, edges })
    }

    /// Labels edge `(u, v)` of a ℤ graph with `labels[u]`.
    pub fn from_graph(graph: &RauzyGraph, labels: &[usize], alphabet: Vec<String>) -> Result<Self> {
        let edges: Vec<(usize, usize, usize)> = graph.forward()?.iter().map(|&(u, v)| (u, v, labels[u])).collect();
        SoficPresentation::new(alphabet, graph.len(), edges)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.vertices == 0
    }

    /// Removes vertices lacking an in- or out-edge until none remain.
    pub fn essentialize(&self) -> SoficPresentation {
        let mut alive = vec![true; self.vertices];
        loop {
            let mut has_in = vec![false; self.vertices];
            let mut has_out = vec![false; self.vertices];
            for &(u, v, _) in &self.edges {
                if alive[u] && alive[v] {
                    has_out[u] = true;
                    has_in[v] = true;
                }
            }
            let mut changed = false;
            for v in 0..self.vertices {
                if alive[v] && !(has_in[v] && has_out[v]) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.keep(&alive)
    }

    fn keep(&self, alive: &[bool]) -> SoficPresentation {
        let mut index = vec![usize::MAX; self.vertices];
        let mut n = 0;
        for v in 0..self.vertices {
            if alive[v] {
                index[v] = n;
                n += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v, _)| alive[u] && alive[v])
            .map(|&(u, v, a)| (index[u], index[v], a))
            .collect();
        SoficPresentation { alphabet: self.alphabet.clone(), vertices: n, edges }
    }

    /// Label sequences of all paths with `n` edges in the essential part.
    pub fn language(&self, n: usize) -> BTreeSet<Vec<usize>> {
        let ess = self.essentialize();
        let mut layer: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
        if ess.vertices > 0 {
            layer.insert(Vec::new(), (0..ess.vertices).collect());
        }
        let out = ess.out_edges();
        for _ in 0..n {
            let mut next: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
            for (w, ends) in &layer {
                for &u in ends {
                    for &(v, a) in &out[u] {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.entry(w2).or_default().insert(v);
                    }
                }
            }
            layer = next;
        }
        layer.into_keys().collect()
    }

    fn out_edges(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.vertices];
        for &(u, v, a) in &self.edges {
            out[u].push((v, a));
        }
        out
    }

    /// Minimal deterministic automaton of the finite-word language
    /// (every state accepting; missing transitions reject).
    fn minimal_dfa(&self) -> Dfa {
        let ess = self.essentialize();
        let out = ess.out_edges();
        let k = self.alphabet.len();
        let start: BTreeSet<usize> = (0..ess.vertices).collect();
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::from([(start.clone(), 0)]);
        let mut states = vec![start];
        let mut trans: Vec<Vec<Option<usize>>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut row = vec![None; k];
            for (a, slot) in row.iter_mut().enumerate() {
                let next: BTreeSet<usize> =
                    states[i].iter().flat_map(|&u| out[u].iter().filter(|e| e.1 == a).map(|e| e.0)).collect();
                if next.is_empty() {
                    continue;
                }
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
                *slot = Some(id);
            }
            trans.push(row);
            i += 1;
        }
        Dfa { start: 0, trans }.minimized()
    }

    /// Language equality via minimal automata.
    pub fn same_language(&self, other: &SoficPresentation) -> bool {
        self.alphabet.len() == other.alphabet.len() && self.minimal_dfa().signature() == other.minimal_dfa().signature()
    }
}

impl fmt::Display for SoficPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet: {}", self.alphabet.join(" "))?;
        write!(f, "vertices: {}", self.vertices)?;
        for &(u, v, a) in &self.edges {
            write!(f, "\nedge {u} {v} {}", self.alphabet[a])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Dfa {
    start: usize,
    trans: Vec<Vec<Option<usize>>>,
}

impl Dfa {
    /// Moore partition refinement; all states accepting.
    fn minimized(&self) -> Dfa {
        let n = self.trans.len();
        let mut class = vec![0usize; n];
        loop {
            let mut ids: HashMap<(usize, Vec<Option<usize>>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|s| {
                    let sig = (class[s], self.trans[s].iter().map(|t| t.map(|t| class[t])).collect());
                    let len = ids.len();
                    *ids.entry(sig).or_insert(len)
                })
                .collect();
            let count = ids.len();
            let before = class.iter().collect::<HashSet<_>>().len();
            class = next;
            if count == before {
                break;
            }
        }
        let count = class.iter().max().map_or(0, |m| m + 1);
        let mut trans = vec![Vec::new(); count];
        for s in 0..n {
            if trans[class[s]].is_empty() {
                trans[class[s]] = self.trans[s].iter().map(|t| t.map(|t| class[t])).collect();
            }
        }
        Dfa { start: class[self.start], trans }
    }

    /// Transition table renumbered by breadth-first discovery from the start.
    fn signature(&self) -> Vec<Vec<Option<usize>>> {
        let mut number = HashMap::from([(self.start, 0usize)]);
        let mut order = vec![self.start];
        let mut i = 0;
        while i < order.len() {
            for t in self.trans[order[i]].iter().flatten() {
                if !number.contains_key(t) {
                    number.insert(*t, order.len());
                    order.push(*t);
                }
            }
            i += 1;
        }
        order.iter().map(|&s| self.trans[s].iter().map(|t| t.map(|t| number[&t])).collect()).collect()
    }
}

/// Sofic image of a ℤ-SFT under a 1-block code.
pub fn image_sofic(x: &Sft, m: &AlphabetMap) -> Result<SoficPresentation> {
    if !x.group().is_integers() {
        return Err(Error::Unsupported("sofic images are computed over ℤ only".into()));
    }
    if m.source.len() != x.alphabet().len() {
        return structural("map source does not match the SFT alphabet");
    }
    let rec = to_rauzy(x, 0)?;
    let labels: Vec<usize> = rec.letter.iter().map(|&a| m.apply(a)).collect();
    SoficPresentation::from_graph(&rec.graph, &labels, m.target.clone()).map(|p| p.essentialize())
}

/// Deterministic (right-resolving) transitions of a presentation, if it has them.
fn deterministic(p: &SoficPresentation) -> Vec<Vec<Option<usize>>> {
    let mut trans = vec![vec![None; p.alphabet.len()]; p.vertices];
    for &(u, v, a) in &p.edges {
        trans[u][a] = Some(v);
    }
    trans
}

/// Merges states with equal follower sets.
fn separate(p: &SoficPresentation) -> SoficPresentation {
    let dfa = Dfa { start: 0, trans: deterministic(p) }.minimized_all();
    let edges: BTreeSet<(usize, usize, usize)> = dfa
        .trans
        .iter()
        .enumerate()
        .flat_map(|(u, row)| row.iter().enumerate().filter_map(move |(a, t)| t.map(|v| (u, v, a))))
        .collect();
    SoficPresentation { alphabet: p.alphabet.clone(), vertices: dfa.trans.len(), edges }
}

impl Dfa {
    /// Like [`Dfa::minimized`] but keeps every class (no start needed).
    fn minimized_all(&self) -> Dfa {
        if self.trans.is_empty() {
            return self.clone();
        }
        self.minimized()
    }
}

/// Orders two states of a follower-separated deterministic presentation by
/// the shortlex-first word in exactly one follower set; the state that can
/// read it comes first.
fn compare_states(trans: &[Vec<Option<usize>>], p: usize, q: usize) -> Ordering {
    if p == q {
        return Ordering::Equal;
    }
    let mut seen = HashSet::from([(p, q)]);
    let mut queue = VecDeque::from([(p, q)]);
    while let Some((x, y)) = queue.pop_front() {
        for (&tx, &ty) in trans[x].iter().zip(&trans[y]) {
            match (tx, ty) {
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some(u), Some(v)) => {
                    if seen.insert((u, v)) {
                        queue.push_back((u, v));
                    }
                }
                (None, None) => {}
            }
        }
    }
    Ordering::Equal
}

fn intrinsic_order(p: &SoficPresentation) -> Vec<usize> {
    let trans = deterministic(p);
    let mut order: Vec<usize> = (0..p.vertices).collect();
    order.sort_by(|&a, &b| compare_states(&trans, a, b).then(a.cmp(&b)));
    order
}

fn renumber(p: &SoficPresentation, order: &[usize]) -> SoficPresentation {
    let mut index = vec![0; p.vertices];
    for (i, &v) in order.iter().enumerate() {
        index[v] = i;
    }
    SoficPresentation {
        alphabet: p.alphabet.clone(),
        vertices: p.vertices,
        edges: p.edges.iter().map(|&(u, v, a)| (index[u], index[v], a)).collect(),
    }
}

/// Canonical right-resolving, follower-separated, essential presentation.
///
/// Starts from the essential part of the minimal automaton of the language,
/// then repeatedly drops the first state (in intrinsic order) whose removal
/// leaves the language unchanged, merging follower-equivalent states after
/// each drop. Every step depends only on the language, so equal sofic shifts
/// get identical output.
pub fn canonical_form(s: &SoficPresentation) -> SoficPresentation {
    let dfa = s.minimal_dfa();
    let target = dfa.signature();
    let full = SoficPresentation {
        alphabet: s.alphabet.clone(),
        vertices: dfa.trans.len(),
        edges: dfa
            .trans
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().enumerate().filter_map(move |(a, t)| t.map(|v| (u, v, a))))
            .collect(),
    };
    let mut cur = separate(&full.essentialize());
    'outer: loop {
        let order = intrinsic_order(&cur);
        for &v in &order {
            let mut alive = vec![true; cur.vertices];
            alive[v] = false;
            let trial = cur.keep(&alive).essentialize();
            if trial.minimal_dfa().signature() == target {
                cur = separate(&trial).essentialize();
                continue 'outer;
            }
        }
        break;
    }
    let order = intrinsic_order(&cur);
    renumber(&cur, &order)
}

/// Whether two presentations define the same sofic shift.
pub fn sofic_equal(s1: &SoficPresentation, s2: &SoficPresentation) -> Result<bool> {
    if s1.alphabet != s2.alphabet {
        return structural("presentations use different label alphabets");
    }
    Ok(canonical_form(s1) == canonical_form(s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::names;

    fn even_shift() -> SoficPresentation {
        // a=0, b0=1, b1=2; a carries 1, b carries 0.
        SoficPresentation::new(names(2), 3, [(0, 0, 1), (0, 1, 1), (1, 2, 0), (2, 1, 0), (2, 0, 0)]).unwrap()
    }

    fn even_shift_other() -> SoficPresentation {
        // Fischer cover with an extra redundant copy of the odd state.
        SoficPresentation::new(names(2), 3, [(0, 0, 1), (0, 1, 0), (1, 0, 0), (0, 2, 0), (2, 0, 0)]).unwrap()
    }

    fn is_even(w: &[usize]) -> bool {
        let ones: Vec<usize> = w.iter().enumerate().filter(|e| *e.1 == 1).map(|e| e.0).collect();
        ones.windows(2).all(|p| (p[1] - p[0] - 1) % 2 == 0)
    }

    #[test]
    fn even_shift_language_and_canonical_size() {
        let p = even_shift();
        for n in 1..=10 {
            let expected: BTreeSet<Vec<usize>> = all_words(2, n).into_iter().filter(|w| is_even(w)).collect();
            assert_eq!(p.language(n), expected, "length {n}");
        }
        let c = canonical_form(&p);
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(c, canonical_form(&even_shift_other()));
        assert_eq!(canonical_form(&c), c);
    }

    #[test]
    fn golden_mean_canonical_has_two_states() {
        let x = Sft::z_forbidden_words(names(2), 2, &[vec![1, 1]]).unwrap();
        let p = image_sofic(&x, &AlphabetMap::identity(x.alphabet())).unwrap();
        assert_eq!(canonical_form(&p).vertex_count(), 2);
        assert!(!sofic_equal(&p, &even_shift()).unwrap());
    }

    #[test]
    fn full_shift_is_already_canonical() {
        let p = SoficPresentation::new(names(2), 1, [(0, 0, 0), (0, 0, 1)]).unwrap();
        assert_eq!(canonical_form(&p), p);
    }

    #[test]
    fn doubled_copy_is_equal() {
        let p = even_shift();
        let doubled = SoficPresentation::new(
            names(2),
            6,
            p.edges().iter().flat_map(|&(u, v, a)| [(u, v, a), (u + 3, v + 3, a)]),
        )
        .unwrap();
        assert!(sofic_equal(&p, &doubled).unwrap());
    }

    #[test]
    fn at_most_one_one() {
        let p = SoficPresentation::new(names(2), 2, [(0, 0, 0), (0, 1, 1), (1, 1, 0)]).unwrap();
        assert_eq!(canonical_form(&p).vertex_count(), 2);
    }

    #[test]
    fn codes_apply_and_compose() {
        let z = Group::integers();
        let zero = z.element(&[(0, 0)]).unwrap();
        let one = z.element(&[(0, 1)]).unwrap();
        let xor = SlidingBlockCode::new(
            z.clone(),
            vec![zero, one],
            2,
            2,
            [(vec![0, 0], 0), (vec![0, 1], 1), (vec![1, 0], 1), (vec![1, 1], 0)],
        )
        .unwrap();
        let w = Pattern::word(&[0, 1, 1, 0], 0, 2).unwrap();
        assert_eq!(xor.apply(&w).unwrap(), Pattern::word(&[1, 0, 1], 0, 2).unwrap());
        let twice = xor.then(&xor).unwrap();
        assert_eq!(twice.apply(&w).unwrap(), xor.apply(&xor.apply(&w).unwrap()).unwrap());

        let p0 = AlphabetMap::new(vec!["-1".into(), "0".into(), "1".into()], names(2), vec![0, 0, 1]).unwrap();
        let code = SlidingBlockCode::from_map(z, &p0);
        let w = Pattern::word(&[0, 0, 2, 1, 1], 0, 3).unwrap();
        assert_eq!(code.apply(&w).unwrap(), Pattern::word(&[0, 0, 1, 0, 0], 0, 2).unwrap());
    }
}

//! Colouring automata over free products of ℤ and finite groups, their
//! tracked runs, and the SFT of tracked window patterns.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::analysis::{degree_condition, nmc_check, on_cycle};
use crate::error::{structural, Error, Result};
use crate::group::{Factor, Group, GroupElement};
use crate::pattern::Pattern;
use crate::rauzy::RauzyGraph;
use crate::sft::{restricted_pairs, AlphabetMap, Sft};

/// Movement marker stored per generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Left,
    Right,
    Empty,
}

impl Dir {
    fn symbol(self) -> char {
        match self {
            Dir::Left => '<',
            Dir::Right => '>',
            Dir::Empty => '.',
        }
    }
}

/// A colour together with one marker per canonical generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrackedLetter {
    pub color: usize,
    pub dirs: Vec<Dir>,
}

impl TrackedLetter {
    pub fn lefts(&self) -> usize {
        self.dirs.iter().filter(|&&d| d == Dir::Left).count()
    }

    pub fn all_right(&self) -> bool {
        self.dirs.iter().all(|&d| d == Dir::Right)
    }

    pub fn name(&self, colors: &[String]) -> String {
        format!("{}:{}", colors[self.color], self.dirs.iter().map(|d| d.symbol()).collect::<String>())
    }
}

/// `Ω : S × A → A`, stored as `rule[generator index][colour]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringAutomaton {
    group: Group,
    gens: Vec<GroupElement>,
    colors: Vec<String>,
    rule: Vec<Vec<usize>>,
}

impl ColoringAutomaton {
    pub fn new(group: Group, colors: Vec<String>, rule: Vec<Vec<usize>>) -> Result<Self> {
        let gens = group.generators();
        if colors.is_empty() {
            return structural("automaton needs at least one colour");
        }
        if rule.len() != gens.len() || rule.iter().any(|row| row.len() != colors.len() || row.iter().any(|&c| c >= colors.len())) {
            return structural("automaton rule must be total on S × A");
        }
        Ok(ColoringAutomaton { group, gens, colors, rule })
    }

    pub fn from_fn(group: Group, colors: Vec<String>, f: impl Fn(&GroupElement, usize) -> usize) -> Result<Self> {
        let rule = group.generators().iter().map(|s| (0..colors.len()).map(|c| f(s, c)).collect()).collect();
        ColoringAutomaton::new(group, colors, rule)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.gens
    }

    pub fn rule(&self) -> &[Vec<usize>] {
        &self.rule
    }

    /// `Ω(s, c)`; `None` if `s` is not a canonical generator.
    pub fn step(&self, s: &GroupElement, c: usize) -> Option<usize> {
        self.gen_index(s).map(|i| self.rule[i][c])
    }

    fn gen_index(&self, s: &GroupElement) -> Option<usize> {
        self.gens.iter().position(|g| g == s)
    }

    /// Generator indices of the same finite factor as generator `i`, if finite.
    fn finite_factor(&self, i: usize) -> Option<usize> {
        let (f, _) = self.gens[i].syllables()[0];
        matches!(self.group.factors()[f], Factor::Finite { .. }).then_some(f)
    }

    fn inverse_index(&self, i: usize) -> usize {
        self.gen_index(&self.group.inverse(&self.gens[i])).expect("S is symmetric")
    }

    /// Markers of an element reached along generator `i`.
    fn arrival_dirs(&self, i: usize) -> Vec<Dir> {
        let back = self.inverse_index(i);
        let factor = self.finite_factor(i);
        (0..self.gens.len())
            .map(|j| {
                if j == back {
                    Dir::Left
                } else if factor.is_some() && self.finite_factor(j) == factor {
                    Dir::Empty
                } else {
                    Dir::Right
                }
            })
            .collect()
    }
}

impl fmt::Display for ColoringAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "colors: {}", self.colors.join(" "))?;
        for (s, row) in self.gens.iter().zip(&self.rule) {
            for (c, &d) in row.iter().enumerate() {
                write!(f, "\nOmega {s} {} -> {}", self.colors[c], self.colors[d])?;
            }
        }
        Ok(())
    }
}

/// Tracked configuration produced by one run, on the ball around its start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub start: GroupElement,
    pub radius: usize,
    pub cells: BTreeMap<GroupElement, TrackedLetter>,
}

impl Run {
    pub fn color(&self, g: &GroupElement) -> Option<usize> {
        self.cells.get(g).map(|l| l.color)
    }

    pub fn colors(&self) -> BTreeMap<GroupElement, usize> {
        self.cells.iter().map(|(g, l)| (g.clone(), l.color)).collect()
    }
}

/// The element one step closer to the identity along the unique geodesic
/// tree, and the index of the generator leading from it to `r`. Entering a
/// finite-factor coset counts as one step from the entry element.
fn arrival(a: &ColoringAutomaton, r: &GroupElement) -> Option<(GroupElement, usize)> {
    let syl = r.syllables();
    let &(f, v) = syl.last()?;
    let mut parent = syl[..syl.len() - 1].to_vec();
    let step = match a.group.factors()[f] {
        Factor::Infinite => {
            let sign = v.signum();
            if v != sign {
                parent.push((f, v - sign));
            }
            (f, sign)
        }
        Factor::Finite { .. } => (f, v),
    };
    let s = a.group.element(&[step]).expect("generator");
    let parent = a.group.element(&parent).expect("prefix");
    Some((parent, a.gen_index(&s).expect("canonical generator")))
}

/// Runs the automaton from `start` with colour `color` on `start · ball(radius)`.
pub fn run(a: &ColoringAutomaton, start: &GroupElement, color: usize, radius: usize) -> Run {
    let mut rel: HashMap<GroupElement, TrackedLetter> = HashMap::new();
    let order = a.group.ball_by_length(radius);
    for r in &order {
        let letter = match arrival(a, r) {
            None => TrackedLetter { color, dirs: vec![Dir::Right; a.gens.len()] },
            Some((parent, i)) => {
                let c = a.rule[i][rel[&parent].color];
                TrackedLetter { color: c, dirs: a.arrival_dirs(i) }
            }
        };
        rel.insert(r.clone(), letter);
    }
    let cells = rel.into_iter().map(|(r, l)| (a.group.mul(start, &r), l)).collect();
    Run { start: start.clone(), radius, cells }
}

/// Checks the local tracking rules at every position of a run; returns the violations.
///
/// At each `h`: at most one `<`, and none exactly at the start; `.` only
/// alongside a `<` in the same finite factor, with the rest of that factor
/// `.`; for each neighbour `hs`, `<`/`>` pair up with the reverse marker and
/// the colour follows `Ω` in the marked direction, and `.` pairs with `.`
/// with the colour given by `Ω` from the coset entry element.
pub fn check_local_rules(a: &ColoringAutomaton, r: &Run) -> Vec<String> {
    let mut bad = Vec::new();
    for (h, lh) in &r.cells {
        let lefts: Vec<usize> = (0..a.gens.len()).filter(|&j| lh.dirs[j] == Dir::Left).collect();
        if lefts.len() > 1 {
            bad.push(format!("{h}: more than one <"));
        }
        if lefts.is_empty() != (*h == r.start) {
            bad.push(format!("{h}: source marker mismatch"));
        }
        for j in 0..a.gens.len() {
            if lh.dirs[j] == Dir::Empty {
                let factor = a.finite_factor(j);
                if factor.is_none() || lefts.len() != 1 || a.finite_factor(lefts[0]) != factor {
                    bad.push(format!("{h}: stray . at {}", a.gens[j]));
                }
            }
        }
        if let [t] = lefts.as_slice() {
            if let Some(f) = a.finite_factor(*t) {
                for j in 0..a.gens.len() {
                    if j != *t && a.finite_factor(j) == Some(f) && lh.dirs[j] != Dir::Empty {
                        bad.push(format!("{h}: coset sibling not marked ."));
                    }
                }
            }
        }
        for j in 0..a.gens.len() {
            let hs = a.group.mul(h, &a.gens[j]);
            let Some(ls) = r.cells.get(&hs) else { continue };
            let k = a.inverse_index(j);
            let ok = match lh.dirs[j] {
                Dir::Left => ls.dirs[k] == Dir::Right && lh.color == a.rule[k][ls.color],
                Dir::Right => ls.dirs[k] == Dir::Left && ls.color == a.rule[j][lh.color],
                Dir::Empty => {
                    ls.dirs[k] == Dir::Empty
                        && lefts.first().is_some_and(|&t| {
                            let entry = a.group.mul(h, &a.gens[t]);
                            let across = a.group.mul(&a.group.inverse(&a.gens[t]), &a.gens[j]);
                            match (r.cells.get(&entry), a.gen_index(&across)) {
                                (Some(le), Some(u)) => ls.color == a.rule[u][le.color],
                                (None, _) => true,
                                _ => false,
                            }
                        })
                }
            };
            if !ok {
                bad.push(format!("{h}: inconsistent with neighbour {hs}"));
            }
        }
    }
    bad
}

/// The SFT of tracked window patterns produced by an automaton.
#[derive(Debug, Clone)]
pub struct TildeSft {
    pub sft: Sft,
    pub letters: Vec<TrackedLetter>,
    /// Tracked letter → colour.
    pub projection: AlphabetMap,
    pub sample_radius: usize,
    /// Least sampled radius whose pattern set already equals the final one,
    /// if that happened strictly before `sample_radius`.
    pub stabilized_at: Option<usize>,
}

/// Window `{1} ∪ S`, allowed patterns read off runs from the identity.
///
/// Runs from other starts are translates, so they contribute the same window
/// patterns; patterns far from the start cover the configurations with no source.
pub fn tilde_sft(a: &ColoringAutomaton, sample_radius: usize) -> Result<TildeSft> {
    if sample_radius == 0 {
        return Err(Error::Precondition("sample radius must be at least 1".into()));
    }
    let id = GroupElement::identity();
    let mut window = vec![id.clone()];
    window.extend(a.gens.iter().cloned());
    let mut by_depth: Vec<BTreeSet<Vec<TrackedLetter>>> = vec![BTreeSet::new(); sample_radius];
    for c in 0..a.colors.len() {
        let r = run(a, &id, c, sample_radius);
        for h in a.group.ball_by_length(sample_radius - 1) {
            let pattern: Vec<TrackedLetter> = window.iter().map(|w| r.cells[&a.group.mul(&h, w)].clone()).collect();
            by_depth[a.group.word_length(&h)].insert(pattern);
        }
    }
    let mut cumulative: Vec<BTreeSet<Vec<TrackedLetter>>> = Vec::new();
    let mut acc = BTreeSet::new();
    for layer in &by_depth {
        acc.extend(layer.iter().cloned());
        cumulative.push(acc.clone());
    }
    let last = cumulative.last().expect("radius ≥ 1");
    let stabilized_at = (1..sample_radius).find(|&r| cumulative[r - 1] == *last);
    let letters: Vec<TrackedLetter> = last.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let index: HashMap<&TrackedLetter, usize> = letters.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let allowed: Vec<Vec<usize>> = last.iter().map(|p| p.iter().map(|l| index[l]).collect()).collect();
    let names: Vec<String> = letters.iter().map(|l| l.name(&a.colors)).collect();
    let projection = AlphabetMap::new(names.clone(), a.colors.clone(), letters.iter().map(|l| l.color).collect())?;
    let sft = Sft::new(a.group.clone(), names, window, allowed)?;
    Ok(TildeSft { sft, letters, projection, sample_radius, stabilized_at })
}

#[derive(Debug, Clone)]
pub struct DichotomyReport {
    pub pass: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

/// Every globally admissible ball pattern has an all-`>` position, or else
/// exactly one `<` at every interior position.
pub fn dichotomy_check(t: &TildeSft, radius: usize) -> DichotomyReport {
    let group = t.sft.group();
    let gp = t.sft.global_patterns(radius, 2);
    let interior: Vec<bool> = gp.support.iter().map(|g| group.word_length(g) < radius).collect();
    for p in &gp.patterns {
        let case1 = p.iter().any(|&b| t.letters[b].all_right());
        let case2 = p.iter().zip(&interior).all(|(&b, &inside)| !inside || t.letters[b].lefts() == 1);
        if !(case1 || case2) {
            return DichotomyReport { pass: false, checked: gp.patterns.len(), witness: Some(t.sft.show(&gp.support, p)) };
        }
    }
    DichotomyReport { pass: true, checked: gp.patterns.len(), witness: None }
}

#[derive(Debug, Clone)]
pub struct ProjectionReport {
    /// Every sampled colour pattern is the image of a tracked pattern.
    pub surjective: bool,
    /// Image and sample coincide.
    pub exact: bool,
    pub image: usize,
    pub sampled: usize,
}

/// Colour patterns on `ball(radius)` seen in runs from the identity, centred
/// anywhere within `oracle_radius − radius`.
pub fn sampled_color_patterns(a: &ColoringAutomaton, radius: usize, oracle_radius: usize) -> BTreeSet<Vec<usize>> {
    let id = GroupElement::identity();
    let ball: Vec<GroupElement> = a.group.ball(radius).into_iter().collect();
    let mut out = BTreeSet::new();
    for c in 0..a.colors.len() {
        let r = run(a, &id, c, oracle_radius);
        for h in a.group.ball(oracle_radius.saturating_sub(radius)) {
            out.insert(ball.iter().map(|b| r.cells[&a.group.mul(&h, b)].color).collect());
        }
    }
    out
}

/// Compares the colour image of the tracked ball patterns with an independent run sample.
pub fn projection_check(a: &ColoringAutomaton, t: &TildeSft, radius: usize, oracle_radius: usize) -> ProjectionReport {
    let image: BTreeSet<Vec<usize>> = t
        .sft
        .global_patterns(radius, 2)
        .patterns
        .iter()
        .map(|p| p.iter().map(|&b| t.letters[b].color).collect())
        .collect();
    let sample = sampled_color_patterns(a, radius, oracle_radius);
    ProjectionReport { surjective: sample.is_subset(&image), exact: sample == image, image: image.len(), sampled: sample.len() }
}

/// Reachability certificate: starting from the identity window pattern of
/// each run, overlap steps reach every globally admissible window pattern.
pub fn isolation_certificate(a: &ColoringAutomaton, t: &TildeSft) -> Result<bool> {
    let group = t.sft.group();
    let window = t.sft.window();
    let nodes: Vec<Vec<usize>> = t.sft.extendable_patterns(window, &group.ball_by_length(2)).into_iter().collect();
    let node_index: HashMap<&Vec<usize>, usize> = nodes.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let slot: HashMap<&GroupElement, usize> = window.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let letter_index: HashMap<&TrackedLetter, usize> = t.letters.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let id = GroupElement::identity();
    let mut seen = vec![false; nodes.len()];
    let mut queue = VecDeque::new();
    for c in 0..a.colors.len() {
        let r = run(a, &id, c, 1);
        let seed: Option<Vec<usize>> = window.iter().map(|w| letter_index.get(&r.cells[w]).copied()).collect();
        let Some(&i) = seed.as_ref().and_then(|p| node_index.get(p)) else {
            return Ok(false);
        };
        if !seen[i] {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    // overlaps[s]: pairs (slot of t in the neighbour's window, slot of s·t in ours).
    let overlaps: Vec<Vec<(usize, usize)>> = group
        .generators()
        .iter()
        .map(|s| {
            window
                .iter()
                .filter_map(|w| slot.get(&group.mul(s, w)).map(|&j| (slot[w], j)))
                .collect()
        })
        .collect();
    while let Some(i) = queue.pop_front() {
        for ov in &overlaps {
            for (j, q) in nodes.iter().enumerate() {
                if !seen[j] && ov.iter().all(|&(a_slot, b_slot)| q[a_slot] == nodes[i][b_slot]) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(seen.iter().all(|&s| s))
}

/// Colour SFT of a tracked SFT: window patterns with markers forgotten.
pub fn color_sft(a: &ColoringAutomaton, t: &TildeSft) -> Result<Sft> {
    let allowed: Vec<Vec<usize>> = t.sft.allowed().iter().map(|p| p.iter().map(|&b| t.letters[b].color).collect()).collect();
    Sft::new(a.group.clone(), a.colors.clone(), t.sft.window().to_vec(), allowed)
}

/// Automaton over a finite group whose colours are the configurations of `x`
/// and `Ω(g, b) = g⁻¹·b`. Returns it with the map `b ↦ b(1)`.
pub fn case1_automaton(x: &Sft) -> Result<(ColoringAutomaton, AlphabetMap)> {
    let group = x.group();
    let order = match group.factors() {
        [Factor::Finite { order, .. }] => *order,
        _ => return Err(Error::Unsupported("this construction needs a single finite factor".into())),
    };
    let elements: Vec<GroupElement> = group.ball(order).into_iter().collect();
    let configs: Vec<Vec<usize>> = x.extendable_patterns(&elements, &elements).into_iter().collect();
    if configs.is_empty() {
        return Err(Error::Degenerate("SFT has no configurations".into()));
    }
    let index: HashMap<&Vec<usize>, usize> = configs.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let pos: HashMap<&GroupElement, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let names: Vec<String> = configs.iter().map(|p| p.iter().map(|&a| x.alphabet()[a].as_str()).collect::<Vec<_>>().join("")).collect();
    let names = if names.iter().collect::<BTreeSet<_>>().len() == names.len() {
        names
    } else {
        configs.iter().map(|p| format!("{p:?}")).collect()
    };
    let a = ColoringAutomaton::from_fn(group.clone(), names.clone(), |g, b| {
        let shifted: Vec<usize> = elements.iter().map(|h| configs[b][pos[&group.mul(g, h)]]).collect();
        index[&shifted]
    })?;
    let id_slot = pos[&GroupElement::identity()];
    let map = AlphabetMap::new(names, x.alphabet().to_vec(), configs.iter().map(|p| p[id_slot]).collect())?;
    Ok((a, map))
}

/// Automaton built from an NMC graph over ℤ, with the block level used and
/// each colour's first vertex in the input graph.
#[derive(Debug, Clone)]
pub struct Case2Automaton {
    pub automaton: ColoringAutomaton,
    pub level: usize,
    pub first: Vec<usize>,
}

/// On-cycle vertices step to their on-cycle neighbour, others to their least
/// neighbour, after recoding to higher blocks until no vertex branches both ways.
pub fn case2_nmc_automaton(r: &RauzyGraph, cap: usize) -> Result<Case2Automaton> {
    let ess = r.essentialize();
    if ess.is_empty() {
        return Err(Error::Degenerate("graph has no bi-infinite path".into()));
    }
    // Middle cycles lift to every block level.
    if !nmc_check(&ess, usize::MAX)? {
        return Err(Error::NotApplicable("the graph has a middle cycle at every block level".into()));
    }
    for level in 1..=cap {
        let (g, first) = ess.higher_block(level)?;
        if !degree_condition(&g)? {
            continue;
        }
        let cyc = on_cycle(&g)?;
        let succ = g.successors()?;
        let pred = g.predecessors()?;
        let pick = |next: &[usize], v: usize| -> usize {
            if cyc[v] {
                if let Some(&w) = next.iter().find(|&&w| cyc[w]) {
                    return w;
                }
            }
            next[0]
        };
        let forward: Vec<usize> = (0..g.len()).map(|v| pick(&succ[v], v)).collect();
        let backward: Vec<usize> = (0..g.len()).map(|v| pick(&pred[v], v)).collect();
        let automaton = ColoringAutomaton::new(Group::integers(), g.vertices().to_vec(), vec![forward, backward])?;
        return Ok(Case2Automaton { automaton, level, first });
    }
    Err(Error::Budget(format!("degree condition not reached within {cap} block levels")))
}

/// Words of length `n` in the colour subshift generated by a ℤ automaton.
pub fn generated_words(a: &ColoringAutomaton, n: usize) -> Result<BTreeSet<Vec<usize>>> {
    if !a.group.is_integers() {
        return Err(Error::Unsupported("generated words are computed over ℤ".into()));
    }
    // Forward and backward orbits become periodic within |A| steps.
    let reach = n as i64 + 2 * a.colors.len() as i64 + 1;
    let mut out = BTreeSet::new();
    for c in 0..a.colors.len() {
        let r = run(a, &GroupElement::identity(), c, reach as usize);
        let line: Vec<usize> = (-reach..=reach)
            .map(|k| r.cells[&a.group.element(&[(0, k)]).expect("ℤ")].color)
            .collect();
        for w in line.windows(n) {
            out.insert(w.to_vec());
        }
    }
    Ok(out)
}

/// Automaton on the restricted product alphabet over the free product group.
/// The free coordinate is the least one compatible with the maps.
pub fn product_automaton(ax: &ColoringAutomaton, phi: &AlphabetMap, ay: &ColoringAutomaton, psi: &AlphabetMap) -> Result<ColoringAutomaton> {
    if phi.source.len() != ax.colors.len() || psi.source.len() != ay.colors.len() {
        return structural("maps do not match the automaton colours");
    }
    if phi.target != psi.target {
        return structural("maps have different targets");
    }
    let pairs = restricted_pairs(phi, psi);
    if pairs.is_empty() {
        return Err(Error::Degenerate("restricted product alphabet is empty".into()));
    }
    if !phi.is_surjective() || !psi.is_surjective() {
        return Err(Error::Precondition("both colour maps must be surjective".into()));
    }
    let group = ax.group.free_product(&ay.group);
    let split = ax.group.factors().len();
    let names: Vec<String> = pairs.iter().map(|&(b, c)| format!("({},{})", ax.colors[b], ay.colors[c])).collect();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let companion_c = |b: usize| pairs.iter().find(|p| p.0 == b).map(|p| p.1);
    let companion_b = |c: usize| pairs.iter().find(|p| p.1 == c).map(|p| p.0);
    let mut rule = Vec::new();
    for s in group.generators() {
        let (f, v) = s.syllables()[0];
        let row = pairs
            .iter()
            .map(|&(b, c)| {
                if f < split {
                    let b2 = ax.step(&ax.group.element(&[(f, v)]).expect("generator"), b).expect("generator");
                    index[&(b2, companion_c(b2).expect("ψ is surjective"))]
                } else {
                    let c2 = ay.step(&ay.group.element(&[(f - split, v)]).expect("generator"), c).expect("generator");
                    index[&(companion_b(c2).expect("φ is surjective"), c2)]
                }
            })
            .collect();
        rule.push(row);
    }
    ColoringAutomaton::new(group, names, rule)
}

/// The run's colours as a pattern over the automaton's colours.
pub fn run_pattern(a: &ColoringAutomaton, r: &Run) -> Result<Pattern> {
    Pattern::new(r.colors(), a.colors.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::names;

    fn swap() -> ColoringAutomaton {
        ColoringAutomaton::from_fn(Group::integers(), vec!["a".into(), "b".into()], |_, c| 1 - c).unwrap()
    }

    #[test]
    fn swap_run() {
        let a = swap();
        let z = Group::integers();
        let r = run(&a, &GroupElement::identity(), 0, 2);
        let colors: Vec<usize> = (-2..=2).map(|k| r.color(&z.element(&[(0, k)]).unwrap()).unwrap()).collect();
        assert_eq!(colors, vec![0, 1, 0, 1, 0]);
        assert_eq!(r.cells[&GroupElement::identity()].dirs, vec![Dir::Right, Dir::Right]);
        // Generators are (+1, −1); +1 looks back along −1.
        assert_eq!(r.cells[&z.element(&[(0, 1)]).unwrap()].dirs, vec![Dir::Right, Dir::Left]);
        assert_eq!(r.cells[&z.element(&[(0, -1)]).unwrap()].dirs, vec![Dir::Left, Dir::Right]);
        assert!(check_local_rules(&a, &r).is_empty());
        let zero = run(&a, &GroupElement::identity(), 1, 0);
        assert_eq!(zero.cells.len(), 1);
    }

    #[test]
    fn swap_tilde_sft() {
        let a = swap();
        let t = tilde_sft(&a, 4).unwrap();
        assert!(t.stabilized_at.is_some_and(|r| r <= 3));
        assert!(dichotomy_check(&t, 3).pass);
        assert!(projection_check(&a, &t, 3, 6).surjective);
        assert!(isolation_certificate(&a, &t).unwrap());
    }

    #[test]
    fn finite_group_run_fills_coset() {
        let g = Group::cyclic(3).unwrap();
        let x = Sft::full(g.clone(), names(2)).unwrap();
        let (a, map) = case1_automaton(&x).unwrap();
        assert_eq!(a.colors().len(), 8);
        assert!(map.is_surjective());
        let r = run(&a, &GroupElement::identity(), 3, 1);
        assert_eq!(r.cells.len(), 3);
        assert!(check_local_rules(&a, &r).is_empty());
        let t = tilde_sft(&a, 2).unwrap();
        assert!(dichotomy_check(&t, 1).pass);
    }

    #[test]
    fn planted_violation_fails_dichotomy() {
        let z = Group::integers();
        let letters = vec![
            TrackedLetter { color: 0, dirs: vec![Dir::Left, Dir::Left] },
            TrackedLetter { color: 0, dirs: vec![Dir::Right, Dir::Left] },
        ];
        let names = vec!["a:<<".to_string(), "a:><".to_string()];
        let window = vec![GroupElement::identity(), z.element(&[(0, 1)]).unwrap(), z.element(&[(0, -1)]).unwrap()];
        let allowed: Vec<Vec<usize>> = crate::sft::all_words(2, 3);
        let sft = Sft::new(z, names.clone(), window, allowed).unwrap();
        let projection = AlphabetMap::new(names, vec!["a".into()], vec![0, 0]).unwrap();
        let t = TildeSft { sft, letters, projection, sample_radius: 1, stabilized_at: None };
        let rep = dichotomy_check(&t, 2);
        assert!(!rep.pass);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn example_graph_automaton() {
        let v = vec!["-1".to_string(), "0".into(), "1".into()];
        let g = RauzyGraph::over_integers(v, [(0, 0), (0, 2), (2, 1), (1, 1)]).unwrap();
        let c = case2_nmc_automaton(&g, 6).unwrap();
        assert_eq!(c.level, 1);
        assert_eq!(c.automaton.rule()[0], vec![0, 1, 1]);
        let middle = RauzyGraph::over_integers(names(3), [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)]).unwrap();
        assert!(matches!(case2_nmc_automaton(&middle, 6), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn product_of_swaps() {
        let a = swap();
        let id = AlphabetMap::identity(a.colors());
        let p = product_automaton(&a, &id, &a, &id).unwrap();
        assert_eq!(p.colors(), &["(a,a)", "(b,b)"]);
        let r = run(&p, &GroupElement::identity(), 0, 3);
        assert!(check_local_rules(&p, &r).is_empty());
        let low = AlphabetMap::new(a.colors().to_vec(), names(4), vec![0, 1]).unwrap();
        let high = AlphabetMap::new(a.colors().to_vec(), names(4), vec![2, 3]).unwrap();
        assert!(matches!(product_automaton(&a, &low, &a, &high), Err(Error::Degenerate(_))));
        assert!(matches!(product_automaton(&a, &low, &a, &low), Err(Error::Precondition(_))));
    }
}

//! Rauzy graphs: one edge relation per generator, and the vertex shift they define.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{Factor, Group, GroupElement, Support};
use crate::sft::{cartesian, Sft};

/// Vertex set with an edge relation `E_s` for every canonical generator `s`.
///
/// A configuration `x` belongs to the vertex shift iff `(x(g), x(gs)) ∈ E_s`
/// for all `g` and `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RauzyGraph {
    group: Group,
    vertices: Vec<String>,
    gens: Vec<GroupElement>,
    edges: Vec<BTreeSet<(usize, usize)>>,
}

impl RauzyGraph {
    /// Generators missing from `edges` get the complete relation.
    pub fn new(
        group: Group,
        vertices: Vec<String>,
        edges: BTreeMap<GroupElement, BTreeSet<(usize, usize)>>,
    ) -> Result<Self> {
        let gens = group.generators();
        let n = vertices.len();
        if let Some(s) = edges.keys().find(|s| !gens.contains(s)) {
            return Err(Error::Structural(format!("{s} is not a canonical generator")));
        }
        let complete: BTreeSet<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
        let edges: Vec<BTreeSet<(usize, usize)>> = gens
            .iter()
            .map(|s| edges.get(s).cloned().unwrap_or_else(|| complete.clone()))
            .collect();
        if edges.iter().flatten().any(|&(u, v)| u >= n || v >= n) {
            return Err(Error::Structural("edge endpoint out of range".into()));
        }
        Ok(RauzyGraph { group, vertices, gens, edges })
    }

    /// Graph over ℤ from its forward relation; the backward relation is the transpose.
    pub fn over_integers(vertices: Vec<String>, forward: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let z = Group::integers();
        let fwd: BTreeSet<(usize, usize)> = forward.into_iter().collect();
        let bwd = fwd.iter().map(|&(u, v)| (v, u)).collect();
        let gens = z.generators();
        let edges = BTreeMap::from([(gens[0].clone(), fwd), (gens[1].clone(), bwd)]);
        RauzyGraph::new(z, vertices, edges)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.gens
    }

    pub fn edges(&self, s: &GroupElement) -> Option<&BTreeSet<(usize, usize)>> {
        self.gens.iter().position(|g| g == s).map(|i| &self.edges[i])
    }

    /// Forward relation `E_{+1}` of a ℤ graph.
    pub fn forward(&self) -> Result<&BTreeSet<(usize, usize)>> {
        if !self.group.is_integers() {
            return Err(Error::Unsupported("forward relation is defined for graphs over ℤ".into()));
        }
        Ok(&self.edges[0])
    }

    /// Successor lists of the forward relation of a ℤ graph.
    pub fn successors(&self) -> Result<Vec<Vec<usize>>> {
        let mut succ = vec![Vec::new(); self.len()];
        for &(u, v) in self.forward()? {
            succ[u].push(v);
        }
        Ok(succ)
    }

    pub fn predecessors(&self) -> Result<Vec<Vec<usize>>> {
        let mut pred = vec![Vec::new(); self.len()];
        for &(u, v) in self.forward()? {
            pred[v].push(u);
        }
        Ok(pred)
    }

    /// Greatest sub-structure with no sources or sinks in any relation, with
    /// `E_{s⁻¹}` consistent with `E_s`, and (for finite factors) every vertex
    /// and edge used by a consistent colouring of a whole coset.
    pub fn essentialize(&self) -> RauzyGraph {
        let n = self.len();
        let inverse_index: Vec<usize> = self
            .gens
            .iter()
            .map(|s| {
                let inv = self.group.inverse(s);
                self.gens.iter().position(|g| *g == inv).expect("S is symmetric")
            })
            .collect();
        let mut alive = vec![true; n];
        let mut edges = self.edges.clone();
        loop {
            let before = (alive.clone(), edges.clone());
            let snapshot = edges.clone();
            for (i, rel) in edges.iter_mut().enumerate() {
                rel.retain(|&(u, v)| alive[u] && alive[v] && snapshot[inverse_index[i]].contains(&(v, u)));
            }
            for (j, factor) in self.group.factors().iter().enumerate() {
                if let Factor::Finite { order, table } = factor {
                    self.restrict_to_cosets(j, *order, table, &mut alive, &mut edges);
                }
            }
            for rel in &edges {
                let mut has_out = vec![false; n];
                let mut has_in = vec![false; n];
                for &(u, v) in rel {
                    has_out[u] = true;
                    has_in[v] = true;
                }
                for v in 0..n {
                    if !(has_out[v] && has_in[v]) {
                        alive[v] = false;
                    }
                }
            }
            if (alive.clone(), edges.clone()) == before {
                break;
            }
        }
        self.compact(&alive, &edges)
    }

    /// Keeps only vertices and edges of factor `j` that occur in a consistent coset colouring.
    fn restrict_to_cosets(
        &self,
        j: usize,
        order: usize,
        table: &[usize],
        alive: &mut [bool],
        edges: &mut [BTreeSet<(usize, usize)>],
    ) {
        // Generator indices of factor j, by table element 1..order.
        let gen_of: Vec<usize> = (1..order)
            .map(|k| self.gens.iter().position(|g| g.syllables() == [(j, k as i64)]).expect("generator"))
            .collect();
        let mut used_edges: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); order - 1];
        let mut used_vertices = vec![false; self.len()];
        let mut colouring = vec![usize::MAX; order];
        let n = self.len();
        #[allow(clippy::too_many_arguments)]
        fn fill(
            pos: usize,
            order: usize,
            n: usize,
            table: &[usize],
            gen_of: &[usize],
            alive: &[bool],
            edges: &[BTreeSet<(usize, usize)>],
            colouring: &mut Vec<usize>,
            found: &mut dyn FnMut(&[usize]),
        ) {
            if pos == order {
                found(colouring);
                return;
            }
            for v in 0..n {
                if !alive[v] {
                    continue;
                }
                colouring[pos] = v;
                // Check every pair among assigned elements h, hs.
                let ok = (0..=pos).all(|h| {
                    (1..order).all(|k| {
                        let hs = table[h * order + k];
                        hs > pos || edges[gen_of[k - 1]].contains(&(colouring[h], colouring[hs]))
                    })
                });
                if ok {
                    fill(pos + 1, order, n, table, gen_of, alive, edges, colouring, found);
                }
            }
            colouring[pos] = usize::MAX;
        }
        fill(0, order, n, table, &gen_of, alive, edges, &mut colouring, &mut |c: &[usize]| {
            for h in 0..order {
                used_vertices[c[h]] = true;
                for k in 1..order {
                    used_edges[k - 1].insert((c[h], c[table[h * order + k]]));
                }
            }
        });
        for (k, g) in gen_of.iter().enumerate() {
            edges[*g] = std::mem::take(&mut used_edges[k]);
        }
        for (v, a) in alive.iter_mut().enumerate() {
            *a = *a && used_vertices[v];
        }
    }

    fn compact(&self, alive: &[bool], edges: &[BTreeSet<(usize, usize)>]) -> RauzyGraph {
        let mut new_index = vec![usize::MAX; alive.len()];
        let mut vertices = Vec::new();
        for (v, &a) in alive.iter().enumerate() {
            if a {
                new_index[v] = vertices.len();
                vertices.push(self.vertices[v].clone());
            }
        }
        let edges = edges
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter(|&&(u, v)| alive[u] && alive[v])
                    .map(|&(u, v)| (new_index[u], new_index[v]))
                    .collect()
            })
            .collect();
        RauzyGraph { group: self.group.clone(), vertices, gens: self.gens.clone(), edges }
    }

    /// Keeps the listed vertices (in the given order) and the edges among them.
    pub fn induced(&self, keep: &[usize]) -> RauzyGraph {
        let mut alive = vec![false; self.len()];
        for &v in keep {
            alive[v] = true;
        }
        self.compact(&alive, &self.edges)
    }

    /// The vertex shift as an SFT with window `{1} ∪ S` over the vertex alphabet.
    pub fn vertex_shift(&self) -> Result<Sft> {
        let mut window = vec![GroupElement::identity()];
        window.extend(self.gens.iter().cloned());
        let mut allowed = Vec::new();
        for v in 0..self.len() {
            let mut options = vec![vec![v]];
            for rel in &self.edges {
                options.push(rel.iter().filter(|e| e.0 == v).map(|e| e.1).collect());
            }
            cartesian(&options, &mut |p| allowed.push(p.to_vec()));
        }
        let vertices = if self.vertices.is_empty() { vec!["_".to_string()] } else { self.vertices.clone() };
        Sft::new(self.group.clone(), vertices, window, allowed)
    }

    /// Higher-block graph of a ℤ graph: vertices are paths through `n` vertices,
    /// joined when they overlap in `n − 1`. Returns the graph and, per new vertex,
    /// its first original vertex.
    pub fn higher_block(&self, n: usize) -> Result<(RauzyGraph, Vec<usize>)> {
        if n == 0 {
            return Err(Error::Precondition("block length must be positive".into()));
        }
        let succ = self.successors()?;
        let mut paths: Vec<Vec<usize>> = (0..self.len()).map(|v| vec![v]).collect();
        for _ in 1..n {
            paths = paths
                .iter()
                .flat_map(|p| succ[*p.last().expect("nonempty")].iter().map(move |&w| [p.as_slice(), &[w]].concat()))
                .collect();
        }
        paths.sort();
        let index: BTreeMap<&[usize], usize> = paths.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        let mut fwd = Vec::new();
        for (i, p) in paths.iter().enumerate() {
            for &w in &succ[*p.last().expect("nonempty")] {
                let next = [&p[1..], &[w]].concat();
                if let Some(&j) = index.get(next.as_slice()) {
                    fwd.push((i, j));
                }
            }
        }
        let names = paths
            .iter()
            .map(|p| {
                if n == 1 {
                    self.vertices[p[0]].clone()
                } else {
                    format!("[{}]", p.iter().map(|&v| self.vertices[v].as_str()).collect::<Vec<_>>().join(","))
                }
            })
            .collect();
        let first = paths.iter().map(|p| p[0]).collect();
        Ok((RauzyGraph::over_integers(names, fwd)?, first))
    }

    /// Number of edges summed over all relations.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(BTreeSet::len).sum()
    }
}

impl fmt::Display for RauzyGraph {
    /// Graphviz `digraph`, one edge colour label per generator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "digraph rauzy {{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(f, "  v{i} [label=\"{v}\"];")?;
        }
        for (s, rel) in self.gens.iter().zip(&self.edges) {
            for (u, v) in rel {
                writeln!(f, "  v{u} -> v{v} [label=\"{s}\"];")?;
            }
        }
        write!(f, "}}")
    }
}

/// Result of recoding an SFT into Rauzy form.
#[derive(Debug, Clone)]
pub struct Recoding {
    pub graph: RauzyGraph,
    /// Vertex → letter of the original alphabet (the letter at the identity).
    pub letter: Vec<usize>,
    /// Support of the vertex patterns (canonical order).
    pub vertex_support: Vec<GroupElement>,
}

/// Recodes `x` as a vertex shift conjugate to it.
///
/// The window is first translated to contain the identity; vertex patterns
/// live on the closure of the window under geodesic prefixes, and `E_s`
/// joins patterns agreeing on their overlap. A window `{1, s}` keeps single
/// letters as vertices. Vertices are the window-closure patterns that extend
/// to `margin` more layers of the ball.
pub fn to_rauzy(x: &Sft, margin: usize) -> Result<Recoding> {
    let group = x.group();
    let anchor_inv = group.inverse(&x.window()[0]);
    let shifted: Vec<GroupElement> = x.window().iter().map(|w| group.mul(&anchor_inv, w)).collect();
    if !generates_group(group, &shifted) {
        return Err(Error::Unsupported(
            "window generates a proper subgroup; recoding needs a window generating the group".into(),
        ));
    }
    let alphabet = x.alphabet();
    let gens = group.generators();

    let nontrivial: Vec<&GroupElement> = shifted.iter().filter(|g| !g.is_identity()).collect();
    if nontrivial.len() == 1 && gens.contains(nontrivial[0]) {
        let s = nontrivial[0].clone();
        let s_slot = shifted.iter().position(|g| *g == s).expect("present");
        let id_slot = 1 - s_slot;
        let fwd: BTreeSet<(usize, usize)> = x.allowed().iter().map(|p| (p[id_slot], p[s_slot])).collect();
        let bwd = fwd.iter().map(|&(u, v)| (v, u)).collect();
        let mut edges = BTreeMap::from([(s.clone(), fwd)]);
        let s_inv = group.inverse(&s);
        if s_inv != s {
            edges.insert(s_inv, bwd);
        }
        let graph = RauzyGraph::new(group.clone(), alphabet.to_vec(), edges)?;
        return Ok(Recoding {
            graph,
            letter: (0..alphabet.len()).collect(),
            vertex_support: vec![GroupElement::identity()],
        });
    }

    let support: Vec<GroupElement> = prefix_closure(group, &shifted).into_iter().collect();
    let radius = support.iter().map(|g| group.word_length(g)).max().unwrap_or(0);
    let shifted_sft = Sft::new(group.clone(), alphabet.to_vec(), shifted.clone(), x.allowed().iter().cloned())?;
    let outer = group.ball_by_length(radius + margin);
    let mut by_length = support.clone();
    by_length.sort_by_key(|g| group.word_length(g));
    let to_canonical: Vec<usize> = support.iter().map(|g| by_length.iter().position(|h| h == g).expect("same")).collect();
    let patterns: Vec<Vec<usize>> = shifted_sft
        .extendable_patterns(&by_length, &outer)
        .into_iter()
        .map(|p| to_canonical.iter().map(|&i| p[i]).collect::<Vec<usize>>())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let id_slot = support.iter().position(|g| g.is_identity()).expect("identity in support");
    let index_of: BTreeMap<&GroupElement, usize> = support.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut edges = BTreeMap::new();
    for s in &gens {
        // Pairs (b, sb) with both in the support: p(sb) must equal q(b).
        let overlap: Vec<(usize, usize)> = support
            .iter()
            .filter_map(|b| index_of.get(&group.mul(s, b)).map(|&i| (i, index_of[b])))
            .collect();
        let mut rel = BTreeSet::new();
        for (u, p) in patterns.iter().enumerate() {
            for (v, q) in patterns.iter().enumerate() {
                if overlap.iter().all(|&(i, j)| p[i] == q[j]) {
                    rel.insert((u, v));
                }
            }
        }
        edges.insert(s.clone(), rel);
    }
    let names = patterns
        .iter()
        .map(|p| p.iter().map(|&a| alphabet[a].as_str()).collect::<Vec<_>>().join(""))
        .collect::<Vec<_>>();
    let names = disambiguate(names);
    let letter = patterns.iter().map(|p| p[id_slot]).collect();
    Ok(Recoding { graph: RauzyGraph::new(group.clone(), names, edges)?, letter, vertex_support: support })
}

fn disambiguate(names: Vec<String>) -> Vec<String> {
    let unique: BTreeSet<&String> = names.iter().collect();
    if unique.len() == names.len() {
        return names;
    }
    names.iter().enumerate().map(|(i, n)| format!("{n}#{i}")).collect()
}

/// All prefixes of geodesic spellings of the given elements.
fn prefix_closure(group: &Group, elements: &[GroupElement]) -> Support {
    let mut out = Support::new();
    out.insert(GroupElement::identity());
    for g in elements {
        let mut cur: Vec<(usize, i64)> = Vec::new();
        for &(f, v) in g.syllables() {
            match group.factors()[f] {
                Factor::Infinite => {
                    let step = v.signum();
                    for k in 1..=v.abs() {
                        let mut w = cur.clone();
                        w.push((f, step * k));
                        out.insert(group.element(&w).expect("valid"));
                    }
                }
                Factor::Finite { .. } => {
                    let mut w = cur.clone();
                    w.push((f, v));
                    out.insert(group.element(&w).expect("valid"));
                }
            }
            cur.push((f, v));
        }
    }
    out
}

/// Whether the elements generate the whole group. Exact for ℤ (gcd test);
/// elsewhere a bounded closure search that only answers yes when every
/// canonical generator is found.
pub fn generates_group(group: &Group, elements: &[GroupElement]) -> bool {
    if group.is_integers() {
        let g = elements.iter().filter_map(|e| e.as_integer()).fold(0i64, |a, b| gcd(a, b.abs()));
        return g == 1;
    }
    let mut pool: BTreeSet<GroupElement> = BTreeSet::new();
    for e in elements {
        pool.insert(e.clone());
        pool.insert(group.inverse(e));
    }
    let seeds: Vec<GroupElement> = pool.iter().cloned().collect();
    let bound = seeds.iter().map(|g| group.word_length(g)).max().unwrap_or(0) * 2 + 2;
    let targets = group.generators();
    for _ in 0..6 {
        if targets.iter().all(|t| pool.contains(t)) {
            return true;
        }
        let current: Vec<GroupElement> = pool.iter().cloned().collect();
        for a in &current {
            for b in &seeds {
                let c = group.mul(a, b);
                if group.word_length(&c) <= bound {
                    pool.insert(c);
                }
            }
        }
    }
    targets.iter().all(|t| pool.contains(t))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Exact language of a ℤ-SFT: all words of length `n` occurring in some point.
pub fn z_language(x: &Sft, n: usize) -> Result<BTreeSet<Vec<usize>>> {
    if !x.group().is_integers() {
        return Err(Error::Unsupported("languages are computed over ℤ only".into()));
    }
    let rec = to_rauzy(x, 0)?;
    let ess = rec.graph.essentialize();
    // Map essential vertices back to letters through their names' positions.
    let keep: Vec<usize> = ess
        .vertices()
        .iter()
        .map(|name| rec.graph.vertices().iter().position(|v| v == name).expect("surviving vertex"))
        .collect();
    let letters: Vec<usize> = keep.iter().map(|&v| rec.letter[v]).collect();
    Ok(path_words(&ess.successors()?, &letters, n))
}

/// Letter sequences of all `n`-vertex paths.
pub(crate) fn path_words(succ: &[Vec<usize>], letters: &[usize], n: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    if n == 0 {
        if !succ.is_empty() {
            out.insert(Vec::new());
        }
        return out;
    }
    // Deduplicate on (word, last vertex) layer by layer.
    let mut layer: BTreeSet<(Vec<usize>, usize)> = (0..succ.len()).map(|v| (vec![letters[v]], v)).collect();
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for (w, v) in &layer {
            for &u in &succ[*v] {
                let mut w2 = w.clone();
                w2.push(letters[u]);
                next.insert((w2, u));
            }
        }
        layer = next;
    }
    out.extend(layer.into_iter().map(|(w, _)| w));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::names;

    #[test]
    fn dangling_edge_essentializes_to_empty() {
        let g = RauzyGraph::over_integers(names(2), [(0, 1)]).unwrap();
        assert!(g.essentialize().is_empty());
    }

    #[test]
    fn golden_mean_graph_is_essential() {
        let g = RauzyGraph::over_integers(names(2), [(0, 0), (0, 1), (1, 0)]).unwrap();
        assert_eq!(g.essentialize(), g);
    }

    #[test]
    fn example_graph_is_essential() {
        let v = vec!["-1".to_string(), "0".into(), "1".into()];
        let g = RauzyGraph::over_integers(v, [(0, 0), (0, 2), (2, 1), (1, 1)]).unwrap();
        assert_eq!(g.essentialize(), g);
    }

    #[test]
    fn golden_mean_recodes_to_letters() {
        let x = Sft::z_forbidden_words(names(2), 2, &[vec![1, 1]]).unwrap();
        let rec = to_rauzy(&x, 2).unwrap();
        assert_eq!(rec.graph.len(), 2);
        let fwd: Vec<_> = rec.graph.forward().unwrap().iter().copied().collect();
        assert_eq!(fwd, vec![(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn no_three_ones_recoding() {
        let x = Sft::z_forbidden_words(names(2), 3, &[vec![1, 1, 1]]).unwrap();
        let rec = to_rauzy(&x, 2).unwrap();
        assert_eq!(rec.graph.len(), 7);
        // Overlapping pairs of 3-blocks are the 4-words avoiding 111.
        assert_eq!(rec.graph.forward().unwrap().len(), 13);
        assert_eq!(rec.graph.essentialize().len(), 7);
    }

    #[test]
    fn proper_subgroup_window_is_rejected() {
        let z = Group::integers();
        let w = vec![z.element(&[(0, 0)]).unwrap(), z.element(&[(0, 2)]).unwrap()];
        let x = Sft::new(z, names(2), w, [vec![0, 0]]).unwrap();
        assert!(matches!(to_rauzy(&x, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn monochromatic_point_has_one_vertex() {
        let x = Sft::z_allowed_words(names(2), 2, &[vec![0, 0]]).unwrap();
        let g = to_rauzy(&x, 1).unwrap().graph.essentialize();
        assert_eq!(g.len(), 1);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn finite_factor_coset_consistency() {
        // ℤ₃ vertex shift where E_g is a 3-cycle but E_{g²} is empty of matching
        // edges: no consistent coset colouring survives.
        let g = Group::cyclic(3).unwrap();
        let gens = g.generators();
        let cycle: BTreeSet<(usize, usize)> = [(0, 1), (1, 2), (2, 0)].into();
        let wrong: BTreeSet<(usize, usize)> = [(0, 1), (1, 2), (2, 0)].into();
        let r = RauzyGraph::new(g.clone(), names(3), BTreeMap::from([(gens[0].clone(), cycle.clone()), (gens[1].clone(), wrong)])).unwrap();
        assert!(r.essentialize().is_empty());
        let back: BTreeSet<(usize, usize)> = cycle.iter().map(|&(u, v)| (v, u)).collect();
        let r = RauzyGraph::new(g, names(3), BTreeMap::from([(gens[0].clone(), cycle), (gens[1].clone(), back)])).unwrap();
        assert_eq!(r.essentialize().len(), 3);
    }
}

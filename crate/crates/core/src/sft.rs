//! Subshifts of finite type over free products.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{structural, Error, Result};
use crate::group::{Group, GroupElement, Support};
use crate::pattern::Pattern;
use crate::search::Search;

/// An SFT given by its defining window and the set of allowed window patterns.
///
/// Allowed patterns are letter vectors aligned with `window`, which is kept in
/// canonical element order without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    group: Group,
    alphabet: Vec<String>,
    window: Vec<GroupElement>,
    allowed: BTreeSet<Vec<usize>>,
}

/// Letter map between two finite alphabets, stored as target indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphabetMap {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub map: Vec<usize>,
}

impl AlphabetMap {
    pub fn new(source: Vec<String>, target: Vec<String>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return structural("alphabet map must be total on its source");
        }
        if map.iter().any(|&t| t >= target.len()) {
            return structural("alphabet map sends a letter outside its target");
        }
        Ok(AlphabetMap { source, target, map })
    }

    pub fn identity(alphabet: &[String]) -> Self {
        AlphabetMap {
            source: alphabet.to_vec(),
            target: alphabet.to_vec(),
            map: (0..alphabet.len()).collect(),
        }
    }

    pub fn is_surjective(&self) -> bool {
        let hit: BTreeSet<usize> = self.map.iter().copied().collect();
        hit.len() == self.target.len()
    }

    pub fn apply(&self, letter: usize) -> usize {
        self.map[letter]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AlphabetMap) -> Result<AlphabetMap> {
        if self.target != other.source {
            return structural("alphabet maps do not compose: target and source differ");
        }
        Ok(AlphabetMap {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&b| other.map[b]).collect(),
        })
    }
}

/// Globally admissible patterns on a ball, as computed by [`Sft::global_patterns`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalPatterns {
    /// Ball elements in canonical order; each pattern lists letters in this order.
    pub support: Vec<GroupElement>,
    pub patterns: BTreeSet<Vec<usize>>,
    /// True when margin − 1 produced the same set.
    pub stabilized: bool,
}

impl GlobalPatterns {
    pub fn to_patterns(&self, alphabet_size: usize) -> Vec<Pattern> {
        self.patterns
            .iter()
            .map(|p| Pattern::from_parts(&self.support, p, alphabet_size).expect("letters in range"))
            .collect()
    }
}

#[cfg(test)]
pub(crate) fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl Sft {
    /// Builds an SFT; `allowed` patterns are aligned with `window` as given.
    pub fn new(
        group: Group,
        alphabet: Vec<String>,
        window: Vec<GroupElement>,
        allowed: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        if alphabet.is_empty() {
            return structural("alphabet must be nonempty");
        }
        let unique: BTreeSet<&String> = alphabet.iter().collect();
        if unique.len() != alphabet.len() {
            return structural("alphabet has repeated letters");
        }
        if window.is_empty() {
            return structural("window must be nonempty");
        }
        let sorted: Vec<GroupElement> = window.iter().cloned().collect::<Support>().into_iter().collect();
        if sorted.len() != window.len() {
            return structural("window has repeated elements");
        }
        let perm: Vec<usize> = sorted
            .iter()
            .map(|g| window.iter().position(|w| w == g).expect("same elements"))
            .collect();
        let mut set = BTreeSet::new();
        for p in allowed {
            if p.len() != window.len() {
                return structural("allowed pattern does not match the window size");
            }
            if p.iter().any(|&a| a >= alphabet.len()) {
                return structural("allowed pattern uses a letter outside the alphabet");
            }
            set.insert(perm.iter().map(|&j| p[j]).collect());
        }
        Ok(Sft { group, alphabet, window: sorted, allowed: set })
    }

    /// Builds an SFT from its forbidden window patterns.
    pub fn from_forbidden(
        group: Group,
        alphabet: Vec<String>,
        window: Vec<GroupElement>,
        forbidden: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        let forbidden: BTreeSet<Vec<usize>> = forbidden.into_iter().collect();
        let allowed: Vec<Vec<usize>> = all_words(alphabet.len(), window.len())
            .into_iter()
            .filter(|w| !forbidden.contains(w))
            .collect();
        if let Some(bad) = forbidden.iter().find(|w| w.len() != window.len()) {
            return structural(format!("forbidden pattern {bad:?} does not match the window"));
        }
        Sft::new(group, alphabet, window, allowed)
    }

    /// ℤ-SFT on window `{0, …, len−1}` forbidding the given words.
    pub fn z_forbidden_words(alphabet: Vec<String>, len: usize, forbidden: &[Vec<usize>]) -> Result<Self> {
        let z = Group::integers();
        let window = (0..len as i64).map(|i| z.element(&[(0, i)]).expect("ℤ")).collect();
        Sft::from_forbidden(z, alphabet, window, forbidden.iter().cloned())
    }

    /// ℤ-SFT forbidding words of any lengths; the window is as long as the longest word.
    pub fn z_forbidden_factors(alphabet: Vec<String>, forbidden: &[Vec<usize>]) -> Result<Self> {
        let len = forbidden.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let allowed: Vec<Vec<usize>> = all_words(alphabet.len(), len)
            .into_iter()
            .filter(|w| !forbidden.iter().any(|f| !f.is_empty() && w.windows(f.len()).any(|s| s == f.as_slice())))
            .collect();
        Sft::z_allowed_words(alphabet, len, &allowed)
    }

    /// ℤ-SFT on window `{0, …, len−1}` allowing exactly the given words.
    pub fn z_allowed_words(alphabet: Vec<String>, len: usize, allowed: &[Vec<usize>]) -> Result<Self> {
        let z = Group::integers();
        let window = (0..len as i64).map(|i| z.element(&[(0, i)]).expect("ℤ")).collect();
        Sft::new(z, alphabet, window, allowed.iter().cloned())
    }

    /// Full shift on `alphabet` over `group`, on the window `{1} ∪ S` so that
    /// the window generates the group.
    pub fn full(group: Group, alphabet: Vec<String>) -> Result<Self> {
        let mut window = vec![GroupElement::identity()];
        window.extend(group.generators());
        let allowed = all_words(alphabet.len(), window.len());
        Sft::new(group, alphabet, window, allowed)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn window(&self) -> &[GroupElement] {
        &self.window
    }

    pub fn allowed(&self) -> &BTreeSet<Vec<usize>> {
        &self.allowed
    }

    /// Window patterns not in the allowed set.
    pub fn forbidden(&self) -> Vec<Vec<usize>> {
        all_words(self.alphabet.len(), self.window.len())
            .into_iter()
            .filter(|w| !self.allowed.contains(w))
            .collect()
    }

    pub fn is_empty_by_definition(&self) -> bool {
        self.allowed.is_empty()
    }

    /// True iff every window translate inside the support of `p` is allowed.
    pub fn locally_admissible(&self, p: &Pattern) -> Result<bool> {
        if p.alphabet_size() != self.alphabet.len() {
            return structural(format!(
                "pattern alphabet size {} differs from SFT alphabet size {}",
                p.alphabet_size(),
                self.alphabet.len()
            ));
        }
        let anchor_inv = self.group.inverse(&self.window[0]);
        let mut seen = BTreeSet::new();
        for f in p.cells().keys() {
            let g = self.group.mul(f, &anchor_inv);
            if !seen.insert(g.clone()) {
                continue;
            }
            let translated: Option<Vec<usize>> =
                self.window.iter().map(|w| p.get(&self.group.mul(&g, w))).collect();
            if let Some(letters) = translated {
                if !self.allowed.contains(&letters) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Patterns on `inner` (letters in the given order) that extend to a
    /// locally admissible pattern on `inner ∪ outer`.
    pub fn extendable_patterns(&self, inner: &[GroupElement], outer: &[GroupElement]) -> BTreeSet<Vec<usize>> {
        let inner_set: Support = inner.iter().cloned().collect();
        let mut positions: Vec<GroupElement> = inner.to_vec();
        positions.extend(outer.iter().filter(|g| !inner_set.contains(g)).cloned());
        let search = Search::new(&self.group, &self.window, &self.allowed, self.alphabet.len(), positions);
        search.extendable_prefixes(inner.len())
    }

    /// Patterns on `ball(radius)` that extend to a locally admissible pattern on
    /// `ball(radius + margin)`. Exact over ℤ for 1-step SFTs once the margin is
    /// at least the number of letters; elsewhere an over-approximation that
    /// shrinks as the margin grows.
    pub fn global_patterns(&self, radius: usize, margin: usize) -> GlobalPatterns {
        let support: Vec<GroupElement> = self.group.ball(radius).into_iter().collect();
        let compute = |m: usize| self.ball_patterns(radius, m, &support);
        let patterns = compute(margin);
        let stabilized = margin > 0 && compute(margin - 1) == patterns;
        GlobalPatterns { support, patterns, stabilized }
    }

    fn ball_patterns(&self, radius: usize, margin: usize, support: &[GroupElement]) -> BTreeSet<Vec<usize>> {
        // Search in word-length order for pruning, report in canonical order.
        let inner = self.group.ball_by_length(radius);
        let outer = self.group.ball_by_length(radius + margin);
        let to_canonical: Vec<usize> = support
            .iter()
            .map(|g| inner.iter().position(|h| h == g).expect("same ball"))
            .collect();
        self.extendable_patterns(&inner, &outer)
            .into_iter()
            .map(|p| to_canonical.iter().map(|&i| p[i]).collect())
            .collect()
    }

    /// Whether `p` extends to a locally admissible pattern on `p`'s support ∪ `outer`.
    pub fn extends_to(&self, p: &Pattern, outer: &[GroupElement]) -> Result<bool> {
        if p.alphabet_size() != self.alphabet.len() {
            return structural("pattern alphabet size differs from SFT alphabet size");
        }
        let inner: Vec<GroupElement> = p.cells().keys().cloned().collect();
        let fixed: Vec<Option<usize>> = p.cells().values().map(|&a| Some(a)).collect();
        let inner_set: Support = inner.iter().cloned().collect();
        let mut positions = inner.clone();
        positions.extend(outer.iter().filter(|g| !inner_set.contains(g)).cloned());
        let search = Search::new(&self.group, &self.window, &self.allowed, self.alphabet.len(), positions);
        let mut assign = vec![0; search.positions().len()];
        Ok(search.extends(&mut assign, 0, &fixed))
    }

    /// Free product `X ∗ Y` over `G ∗ H`: forbidden set `P_X ∪ P_Y` with the
    /// windows embedded through the factor inclusions.
    pub fn free_product(&self, other: &Sft) -> Result<Sft> {
        if self.alphabet != other.alphabet {
            return structural("free product needs a common alphabet");
        }
        let n = self.alphabet.len();
        let (group, window, allowed) = self.join(other, &pairs_diagonal(n));
        Sft::new(group, self.alphabet.clone(), window, allowed)
    }

    /// Restricted free product `X ∗_{φ,ψ} Y` on the alphabet
    /// `{(b, c) : φ₀(b) = ψ₀(c)}`, ordered by `(b, c)`.
    pub fn restricted_free_product(&self, other: &Sft, phi: &AlphabetMap, psi: &AlphabetMap) -> Result<Sft> {
        if phi.source != self.alphabet || psi.source != other.alphabet {
            return structural("letter maps must start at the alphabets of the two SFTs");
        }
        if phi.target != psi.target {
            return structural("letter maps must share a target alphabet");
        }
        let pairs = restricted_pairs(phi, psi);
        if pairs.is_empty() {
            return Err(Error::Degenerate("restricted product alphabet is empty".into()));
        }
        let alphabet = pairs
            .iter()
            .map(|&(b, c)| format!("({},{})", self.alphabet[b], other.alphabet[c]))
            .collect();
        let (group, window, allowed) = self.join(other, &pairs);
        Sft::new(group, alphabet, window, allowed)
    }

    /// Window `F_X ∪ F_Y` over `G ∗ H` and all letter assignments (indices into
    /// `pairs`) whose projections satisfy both SFTs.
    fn join(&self, other: &Sft, pairs: &[(usize, usize)]) -> (Group, Vec<GroupElement>, Vec<Vec<usize>>) {
        let group = self.group.free_product(&other.group);
        let offset = self.group.factors().len();
        let wx: Vec<GroupElement> = self.window.clone();
        let wy: Vec<GroupElement> = other.window.iter().map(|g| Group::embed(g, offset)).collect();
        let window: Vec<GroupElement> = wx.iter().chain(wy.iter()).cloned().collect::<Support>().into_iter().collect();
        let slot_x: Vec<Option<usize>> = window.iter().map(|g| wx.iter().position(|h| h == g)).collect();
        let slot_y: Vec<Option<usize>> = window.iter().map(|g| wy.iter().position(|h| h == g)).collect();
        let mut allowed = Vec::new();
        for px in &self.allowed {
            for py in &other.allowed {
                // Candidate pair indices per window slot.
                let options: Vec<Vec<usize>> = window
                    .iter()
                    .enumerate()
                    .map(|(i, _)| {
                        pairs
                            .iter()
                            .enumerate()
                            .filter(|(_, &(b, c))| {
                                slot_x[i].is_none_or(|j| px[j] == b) && slot_y[i].is_none_or(|j| py[j] == c)
                            })
                            .map(|(k, _)| k)
                            .collect()
                    })
                    .collect();
                cartesian(&options, &mut |combo| allowed.push(combo.to_vec()));
            }
        }
        (group, window, allowed)
    }

    /// SFT on the same group with letters renamed (no structural change).
    pub fn with_alphabet(&self, alphabet: Vec<String>) -> Result<Sft> {
        if alphabet.len() != self.alphabet.len() {
            return structural("renamed alphabet has the wrong size");
        }
        Sft::new(self.group.clone(), alphabet, self.window.clone(), self.allowed.iter().cloned())
    }

    /// Pretty-prints a letter vector aligned with `support`.
    pub fn show(&self, support: &[GroupElement], letters: &[usize]) -> String {
        support
            .iter()
            .zip(letters)
            .map(|(g, &a)| format!("{}@{}", self.alphabet[a], g))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// The SFT viewed as a window-to-pattern map, for diagnostics.
    pub fn allowed_patterns(&self) -> Vec<Pattern> {
        self.allowed
            .iter()
            .map(|p| Pattern::from_parts(&self.window, p, self.alphabet.len()).expect("valid"))
            .collect()
    }
}

fn pairs_diagonal(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|a| (a, a)).collect()
}

/// `{(b, c) : φ₀(b) = ψ₀(c)}` in lexicographic order.
pub fn restricted_pairs(phi: &AlphabetMap, psi: &AlphabetMap) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for b in 0..phi.map.len() {
        for c in 0..psi.map.len() {
            if phi.map[b] == psi.map[c] {
                out.push((b, c));
            }
        }
    }
    out
}

pub(crate) fn all_words(alphabet: usize, len: usize) -> Vec<Vec<usize>> {
    let options = vec![(0..alphabet).collect::<Vec<_>>(); len];
    let mut out = Vec::new();
    cartesian(&options, &mut |w| out.push(w.to_vec()));
    out
}

pub(crate) fn cartesian(options: &[Vec<usize>], visit: &mut dyn FnMut(&[usize])) {
    fn go(options: &[Vec<usize>], cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == options.len() {
            visit(cur);
            return;
        }
        for &o in &options[cur.len()] {
            cur.push(o);
            go(options, cur, visit);
            cur.pop();
        }
    }
    go(options, &mut Vec::with_capacity(options.len()), visit);
}

/// Ball patterns keyed by their restriction, convenient for image comparisons.
pub fn pattern_index(support: &[GroupElement], patterns: &BTreeSet<Vec<usize>>) -> BTreeMap<Vec<usize>, Pattern> {
    let size = patterns.iter().flatten().max().map_or(1, |m| m + 1);
    patterns
        .iter()
        .map(|p| (p.clone(), Pattern::from_parts(support, p, size).expect("valid")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Sft {
        Sft::z_forbidden_words(names(2), 2, &[vec![1, 1]]).unwrap()
    }

    #[test]
    fn golden_mean_local_admissibility() {
        let x = golden();
        assert!(!x.locally_admissible(&Pattern::word(&[0, 1, 1, 0], 0, 2).unwrap()).unwrap());
        assert!(x.locally_admissible(&Pattern::word(&[0, 1, 0, 1], 0, 2).unwrap()).unwrap());
        assert!(x.locally_admissible(&Pattern::word(&[0, 1], 0, 3).unwrap()).is_err());
    }

    #[test]
    fn free_product_ball_one_star() {
        let x = golden();
        let fp = x.free_product(&x).unwrap();
        let f2 = fp.group().clone();
        let mut cells = BTreeMap::new();
        cells.insert(GroupElement::identity(), 1);
        for s in f2.generators() {
            cells.insert(s, 0);
        }
        assert!(fp.locally_admissible(&Pattern::new(cells, 2).unwrap()).unwrap());
    }

    #[test]
    fn empty_sft_has_no_patterns() {
        let x = Sft::z_allowed_words(names(2), 2, &[]).unwrap();
        for r in 0..3 {
            assert!(x.global_patterns(r, 2).patterns.is_empty());
        }
    }

    #[test]
    fn restricted_product_alphabet() {
        let z = Group::integers();
        let x = Sft::full(z.clone(), names(3)).unwrap();
        let y = Sft::full(z, vec!["x".into(), "y".into()]).unwrap();
        let phi = AlphabetMap::new(names(3), names(2), vec![0, 1, 0]).unwrap();
        let psi = AlphabetMap::new(y.alphabet().to_vec(), names(2), vec![0, 1]).unwrap();
        let r = x.restricted_free_product(&y, &phi, &psi).unwrap();
        assert_eq!(r.alphabet(), &["(0,x)", "(1,y)", "(2,x)"]);
        let disjoint = AlphabetMap::new(y.alphabet().to_vec(), names(3), vec![2, 2]).unwrap();
        let phi3 = AlphabetMap::new(names(3), names(3), vec![0, 1, 0]).unwrap();
        assert!(matches!(x.restricted_free_product(&y, &phi3, &disjoint), Err(Error::Degenerate(_))));
    }

    #[test]
    fn full_product_is_full() {
        let z = Group::integers();
        let x = Sft::full(z, names(2)).unwrap();
        let fp = x.free_product(&x).unwrap();
        assert_eq!(fp.allowed().len(), 32);
        assert!(fp.forbidden().is_empty());
    }
}

//! Free products of infinite cyclic and finite groups.
//!
//! Elements are kept in free-product normal form: a list of syllables
//! `(factor, value)` where adjacent syllables come from different factors
//! and no syllable is a factor identity. For an infinite cyclic factor the
//! value is a nonzero exponent of its generator; for a finite factor it is a
//! non-identity row index of the multiplication table (identity is index 0).

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{structural, Error, Result};

/// One free factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    /// ℤ with generator `1`.
    Infinite,
    /// Finite group given by a row-major multiplication table; index 0 is the identity.
    Finite { order: usize, table: Vec<usize> },
}

impl Factor {
    /// ℤ/n with `i·j = (i + j) mod n`.
    pub fn cyclic(order: usize) -> Result<Self> {
        let table = (0..order * order)
            .map(|k| (k / order + k % order) % order.max(1))
            .collect();
        Factor::table(order, table)
    }

    /// Finite factor from a multiplication table, checked to be a group table.
    pub fn table(order: usize, table: Vec<usize>) -> Result<Self> {
        if order < 2 {
            return structural(format!("finite factor must have order >= 2, got {order}"));
        }
        if table.len() != order * order {
            return structural(format!(
                "table of order {order} needs {} entries, got {}",
                order * order,
                table.len()
            ));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= order) {
            return structural(format!("table entry {bad} out of range for order {order}"));
        }
        let mul = |a: usize, b: usize| table[a * order + b];
        for a in 0..order {
            if mul(0, a) != a || mul(a, 0) != a {
                return structural("index 0 is not a two-sided identity");
            }
            let mut row = vec![false; order];
            let mut col = vec![false; order];
            for b in 0..order {
                row[mul(a, b)] = true;
                col[mul(b, a)] = true;
            }
            if row.contains(&false) || col.contains(&false) {
                return structural(format!("row or column {a} is not a permutation"));
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return structural(format!("table is not associative at ({a},{b},{c})"));
                    }
                }
            }
        }
        Ok(Factor::Finite { order, table })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Factor::Finite { .. })
    }

    fn mul(&self, a: i64, b: i64) -> i64 {
        match self {
            Factor::Infinite => a + b,
            Factor::Finite { order, table } => table[a as usize * order + b as usize] as i64,
        }
    }

    fn inv(&self, a: i64) -> i64 {
        match self {
            Factor::Infinite => -a,
            Factor::Finite { order, table } => (0..*order)
                .find(|&b| table[a as usize * order + b] == 0)
                .expect("group table has inverses") as i64,
        }
    }
}

/// An element of a free product, in normal form.
///
/// The derived order compares syllable lists lexicographically (factor index
/// first, then exponent or table index); every enumeration in the crate uses it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupElement {
    syllables: Vec<(usize, i64)>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement::default()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    /// Exponent of a single-syllable element of factor 0, the common ℤ case.
    pub fn as_integer(&self) -> Option<i64> {
        match self.syllables.as_slice() {
            [] => Some(0),
            [(0, k)] => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "e");
        }
        for (i, (factor, value)) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{factor}:{value}")?;
        }
        Ok(())
    }
}

/// Finite set of group elements, iterated in the canonical element order.
pub type Support = BTreeSet<GroupElement>;

/// A free product `G₀ ∗ … ∗ Gₙ₋₁` of infinite cyclic and finite factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Group {
    factors: Vec<Factor>,
}

impl Group {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return structural("a group needs at least one factor");
        }
        Ok(Group { factors })
    }

    pub fn integers() -> Self {
        Group { factors: vec![Factor::Infinite] }
    }

    /// Free group of the given rank.
    pub fn free(rank: usize) -> Self {
        Group { factors: vec![Factor::Infinite; rank.max(1)] }
    }

    pub fn cyclic(order: usize) -> Result<Self> {
        Ok(Group { factors: vec![Factor::cyclic(order)?] })
    }

    /// `self ∗ other`; factors of `other` are renumbered after those of `self`.
    pub fn free_product(&self, other: &Group) -> Group {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Group { factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_integers(&self) -> bool {
        self.factors == [Factor::Infinite]
    }

    /// The canonical generating set `S`: `g, g⁻¹` for each infinite cyclic
    /// factor and every non-identity element of each finite factor.
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for (i, factor) in self.factors.iter().enumerate() {
            match factor {
                Factor::Infinite => {
                    out.push(GroupElement { syllables: vec![(i, 1)] });
                    out.push(GroupElement { syllables: vec![(i, -1)] });
                }
                Factor::Finite { order, .. } => {
                    for k in 1..*order {
                        out.push(GroupElement { syllables: vec![(i, k as i64)] });
                    }
                }
            }
        }
        out
    }

    /// Factor index of a generator, and whether that factor is finite.
    pub fn generator_factor(&self, s: &GroupElement) -> Option<(usize, bool)> {
        match s.syllables.as_slice() {
            [(i, _)] => Some((*i, self.factors[*i].is_finite())),
            _ => None,
        }
    }

    /// Builds the normal form of a product of syllables given left to right.
    pub fn element(&self, syllables: &[(usize, i64)]) -> Result<GroupElement> {
        let mut out = GroupElement::identity();
        for &(factor, value) in syllables {
            self.check_syllable(factor, value)?;
            self.push(&mut out.syllables, (factor, value));
        }
        Ok(out)
    }

    fn check_syllable(&self, factor: usize, value: i64) -> Result<()> {
        match self.factors.get(factor) {
            None => structural(format!("factor index {factor} out of range")),
            Some(Factor::Finite { order, .. }) if value < 0 || value as usize >= *order => {
                structural(format!("element {value} out of range for factor {factor}"))
            }
            _ => Ok(()),
        }
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        for &(f, v) in &g.syllables {
            self.check_syllable(f, v)?;
        }
        Ok(())
    }

    fn push(&self, word: &mut Vec<(usize, i64)>, (factor, value): (usize, i64)) {
        // Exponent 0 and table index 0 are both the identity.
        if value == 0 {
            return;
        }
        match word.last_mut() {
            Some(last) if last.0 == factor => {
                let merged = self.factors[factor].mul(last.1, value);
                if merged == 0 {
                    word.pop();
                } else {
                    last.1 = merged;
                }
            }
            _ => word.push((factor, value)),
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Unchecked product for elements already known to belong to `self`.
    pub(crate) fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut syllables = a.syllables.clone();
        for &s in &b.syllables {
            self.push(&mut syllables, s);
        }
        GroupElement { syllables }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            syllables: a
                .syllables
                .iter()
                .rev()
                .map(|&(f, v)| (f, self.factors[f].inv(v)))
                .collect(),
        }
    }

    /// Word length with respect to the canonical generating set.
    pub fn word_length(&self, a: &GroupElement) -> usize {
        a.syllables
            .iter()
            .map(|&(f, v)| match self.factors[f] {
                Factor::Infinite => v.unsigned_abs() as usize,
                Factor::Finite { .. } => 1,
            })
            .sum()
    }

    /// All elements of word length at most `radius`, identity included.
    pub fn ball(&self, radius: usize) -> Support {
        let gens = self.generators();
        let mut seen: Support = BTreeSet::new();
        seen.insert(GroupElement::identity());
        let mut queue = VecDeque::from([(GroupElement::identity(), 0usize)]);
        while let Some((g, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for s in &gens {
                let h = self.mul(&g, s);
                if seen.insert(h.clone()) {
                    queue.push_back((h, d + 1));
                }
            }
        }
        seen
    }

    /// Ball elements sorted by word length, then canonical order.
    pub fn ball_by_length(&self, radius: usize) -> Vec<GroupElement> {
        let mut v: Vec<_> = self.ball(radius).into_iter().collect();
        v.sort_by_key(|g| self.word_length(g));
        v
    }

    /// Renumbers factors by `offset`, the embedding of a factor group into a free product.
    pub fn embed(g: &GroupElement, offset: usize) -> GroupElement {
        GroupElement {
            syllables: g.syllables.iter().map(|&(f, v)| (f + offset, v)).collect(),
        }
    }

    /// Parses `e`, a bare integer (for a leading infinite factor), or `i:k.i:k…`.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let text = text.trim();
        if text == "e" || text == "1_G" {
            return Ok(GroupElement::identity());
        }
        if let Ok(k) = text.parse::<i64>() {
            if self.factors[0] == Factor::Infinite {
                return self.element(&[(0, k)]);
            }
            return structural(format!("bare integer {text} needs an infinite factor 0"));
        }
        let mut syllables = Vec::new();
        for part in text.split('.') {
            let (f, v) = part
                .split_once(':')
                .ok_or_else(|| Error::Structural(format!("bad syllable '{part}'")))?;
            let f: usize = f
                .parse()
                .map_err(|_| Error::Structural(format!("bad factor index '{f}'")))?;
            let v: i64 = v
                .parse()
                .map_err(|_| Error::Structural(format!("bad syllable value '{v}'")))?;
            syllables.push((f, v));
        }
        self.element(&syllables)
    }

    /// Parses the one-line group expression `Z * cyclic 3 * table 2 0 1 1 0`.
    pub fn parse_expression(text: &str) -> Result<Group> {
        let factors = text
            .split('*')
            .map(|part| parse_factor(part.trim()))
            .collect::<Result<Vec<_>>>()?;
        Group::new(factors)
    }
}

/// Parses one factor line: `Z`, `cyclic N`, or `table N <N*N indices>`.
pub fn parse_factor(line: &str) -> Result<Factor> {
    let mut words = line.split_whitespace();
    let bad = |w: &str| Error::Structural(format!("bad number '{w}'"));
    match words.next() {
        Some("Z") => {
            if words.next().is_some() {
                return structural("trailing tokens after Z");
            }
            Ok(Factor::Infinite)
        }
        Some("cyclic") => {
            let n = words.next().ok_or_else(|| Error::Structural("cyclic needs an order".into()))?;
            Factor::cyclic(n.parse().map_err(|_| bad(n))?)
        }
        Some("table") => {
            let n = words.next().ok_or_else(|| Error::Structural("table needs an order".into()))?;
            let order: usize = n.parse().map_err(|_| bad(n))?;
            let table = words
                .map(|w| w.parse::<usize>().map_err(|_| bad(w)))
                .collect::<Result<Vec<_>>>()?;
            Factor::table(order, table)
        }
        Some(other) => structural(format!("unknown factor kind '{other}'")),
        None => structural("empty factor"),
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Infinite => write!(f, "Z"),
            Factor::Finite { order, table } => {
                let cyclic = (0..order * order).all(|k| table[k] == (k / order + k % order) % order);
                if cyclic {
                    write!(f, "cyclic {order}")
                } else {
                    write!(f, "table {order}")?;
                    for v in table {
                        write!(f, " {v}")?;
                    }
                    Ok(())
                }
            }
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

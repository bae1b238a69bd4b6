use std::collections::BTreeMap;
use std::fmt;

use crate::error::{structural, Result};
use crate::group::{Group, GroupElement, Support};

/// A finite partial configuration: letters (as alphabet indices) on a finite support.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    cells: BTreeMap<GroupElement, usize>,
    alphabet_size: usize,
}

impl Pattern {
    pub fn new(cells: BTreeMap<GroupElement, usize>, alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 {
            return structural("alphabet must be nonempty");
        }
        if let Some((g, &a)) = cells.iter().find(|(_, &a)| a >= alphabet_size) {
            return structural(format!("letter {a} at {g} exceeds alphabet size {alphabet_size}"));
        }
        Ok(Pattern { cells, alphabet_size })
    }

    /// Pattern with `letters[i]` at position `elements[i]`.
    pub fn from_parts(elements: &[GroupElement], letters: &[usize], alphabet_size: usize) -> Result<Self> {
        if elements.len() != letters.len() {
            return structural("support and letter lists differ in length");
        }
        let cells = elements.iter().cloned().zip(letters.iter().copied()).collect();
        Pattern::new(cells, alphabet_size)
    }

    /// A word over ℤ placed on positions `offset, offset+1, …`.
    pub fn word(word: &[usize], offset: i64, alphabet_size: usize) -> Result<Self> {
        let z = Group::integers();
        let cells = word
            .iter()
            .enumerate()
            .map(|(i, &a)| (z.element(&[(0, offset + i as i64)]).expect("ℤ syllable"), a))
            .collect();
        Pattern::new(cells, alphabet_size)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn support(&self) -> Support {
        self.cells.keys().cloned().collect()
    }

    pub fn cells(&self) -> &BTreeMap<GroupElement, usize> {
        &self.cells
    }

    pub fn get(&self, g: &GroupElement) -> Option<usize> {
        self.cells.get(g).copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Letters in canonical support order.
    pub fn letters(&self) -> Vec<usize> {
        self.cells.values().copied().collect()
    }

    /// Restriction to `elements`, or `None` if some element is outside the support.
    pub fn restrict(&self, elements: &[GroupElement]) -> Option<Vec<usize>> {
        elements.iter().map(|g| self.get(g)).collect()
    }

    /// Shift action: the result carries letter `p(f)` at `g·f`.
    pub fn translate(&self, group: &Group, g: &GroupElement) -> Pattern {
        Pattern {
            cells: self.cells.iter().map(|(f, &a)| (group.mul(g, f), a)).collect(),
            alphabet_size: self.alphabet_size,
        }
    }

    /// Applies a letter map to every cell.
    pub fn map_letters(&self, map: &[usize], target_size: usize) -> Pattern {
        Pattern {
            cells: self.cells.iter().map(|(g, &a)| (g.clone(), map[a])).collect(),
            alphabet_size: target_size,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, a)) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}@{g}")?;
        }
        Ok(())
    }
}

/// Free-function form of [`Pattern::translate`].
pub fn translate(group: &Group, g: &GroupElement, p: &Pattern) -> Pattern {
    p.translate(group, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translate_on_integers() {
        let z = Group::integers();
        let p = Pattern::word(&[0, 1], 0, 2).unwrap();
        let one = z.element(&[(0, 1)]).unwrap();
        assert_eq!(p.translate(&z, &one), Pattern::word(&[0, 1], 1, 2).unwrap());
        assert_eq!(p.translate(&z, &GroupElement::identity()), p);
    }

    #[test]
    fn translate_in_free_group() {
        let f2 = Group::free(2);
        let a = f2.element(&[(0, 1)]).unwrap();
        let b = f2.element(&[(1, 1)]).unwrap();
        let ab = f2.element(&[(0, 1), (1, 1)]).unwrap();
        let p = Pattern::from_parts(&[GroupElement::identity(), b], &[0, 1], 2).unwrap();
        let q = p.translate(&f2, &a);
        assert_eq!(q.get(&a), Some(0));
        assert_eq!(q.get(&ab), Some(1));
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn rejects_out_of_range_letters() {
        assert!(Pattern::word(&[0, 2], 0, 2).is_err());
    }
}

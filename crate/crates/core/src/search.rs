//! Backtracking search for locally admissible patterns on a finite support.
//!
//! Positions are assigned in a fixed order. Every translate `g·W` of the
//! window lying inside the support is a constraint; when a position is
//! assigned, each constraint through it must still agree with some allowed
//! pattern on the positions assigned so far (prefix check).

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::group::{Group, GroupElement};

struct Constraint {
    /// Support positions in increasing assignment order.
    positions: Vec<usize>,
    shape: usize,
}

pub(crate) struct Search {
    positions: Vec<GroupElement>,
    alphabet: usize,
    constraints: Vec<Constraint>,
    through: Vec<Vec<(usize, usize)>>,
    shapes: Vec<HashSet<Vec<usize>>>,
}

impl Search {
    pub(crate) fn new(
        group: &Group,
        window: &[GroupElement],
        allowed: &BTreeSet<Vec<usize>>,
        alphabet: usize,
        positions: Vec<GroupElement>,
    ) -> Self {
        let index: HashMap<&GroupElement, usize> =
            positions.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let anchor_inv = group.inverse(&window[0]);
        let mut shape_ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut shapes: Vec<HashSet<Vec<usize>>> = Vec::new();
        let mut constraints = Vec::new();
        let mut seen = HashSet::new();
        for f in &positions {
            let g = group.mul(f, &anchor_inv);
            if !seen.insert(g.clone()) {
                continue;
            }
            let Some(slots) = window
                .iter()
                .map(|w| index.get(&group.mul(&g, w)).copied())
                .collect::<Option<Vec<usize>>>()
            else {
                continue;
            };
            let mut perm: Vec<usize> = (0..window.len()).collect();
            perm.sort_by_key(|&j| slots[j]);
            let shape = *shape_ids.entry(perm.clone()).or_insert_with(|| {
                let mut prefixes = HashSet::new();
                for pat in allowed {
                    let permuted: Vec<usize> = perm.iter().map(|&j| pat[j]).collect();
                    for len in 1..=permuted.len() {
                        prefixes.insert(permuted[..len].to_vec());
                    }
                }
                shapes.push(prefixes);
                shapes.len() - 1
            });
            constraints.push(Constraint {
                positions: perm.iter().map(|&j| slots[j]).collect(),
                shape,
            });
        }
        let mut through = vec![Vec::new(); positions.len()];
        for (ci, c) in constraints.iter().enumerate() {
            for (rank, &p) in c.positions.iter().enumerate() {
                through[p].push((ci, rank));
            }
        }
        Search { positions, alphabet, constraints, through, shapes }
    }

    pub(crate) fn positions(&self) -> &[GroupElement] {
        &self.positions
    }

    fn consistent(&self, assign: &[usize], pos: usize) -> bool {
        self.through[pos].iter().all(|&(ci, rank)| {
            let c = &self.constraints[ci];
            let prefix: Vec<usize> = c.positions[..=rank].iter().map(|&p| assign[p]).collect();
            self.shapes[c.shape].contains(&prefix)
        })
    }

    /// Whether positions `from..` can be filled consistently with `assign[..from]`.
    pub(crate) fn extends(&self, assign: &mut Vec<usize>, from: usize, fixed: &[Option<usize>]) -> bool {
        if from == self.positions.len() {
            return true;
        }
        let candidates: Vec<usize> = match fixed.get(from).copied().flatten() {
            Some(a) => vec![a],
            None => (0..self.alphabet).collect(),
        };
        for a in candidates {
            assign[from] = a;
            if self.consistent(assign, from) && self.extends(assign, from + 1, fixed) {
                return true;
            }
        }
        false
    }

    /// Calls `visit` on every consistent assignment of the first `depth`
    /// positions; `visit` may continue the search with [`Search::extends`].
    pub(crate) fn for_each_prefix(&self, depth: usize, visit: &mut dyn FnMut(&Self, &mut Vec<usize>)) {
        let mut assign = vec![0; self.positions.len()];
        self.walk(&mut assign, 0, depth, visit);
    }

    fn walk(&self, assign: &mut Vec<usize>, pos: usize, depth: usize, visit: &mut dyn FnMut(&Self, &mut Vec<usize>)) {
        if pos == depth {
            visit(self, assign);
            return;
        }
        for a in 0..self.alphabet {
            assign[pos] = a;
            if self.consistent(assign, pos) {
                self.walk(assign, pos + 1, depth, visit);
            }
        }
    }

    /// Locally admissible assignments of the first `depth` positions that extend to all positions.
    pub(crate) fn extendable_prefixes(&self, depth: usize) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        self.for_each_prefix(depth, &mut |s, assign| {
            if s.extends(assign, depth, &[]) {
                out.insert(assign[..depth].to_vec());
            }
        });
        out
    }
}

//! Toeplitz coding of a sequence over `{1, 2}` into `{1, 2, 3}^ℤ`.
//!
//! Level `k` owns the residues `3^(k−1) − 1` (value `ω(k)`) and
//! `2·3^(k−1) − 1` (value 3) modulo `3^k`. After `K` levels the class
//! `−1 mod 3^K` is still free and gets 3.

use std::fmt;

use crate::error::{structural, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Omega(usize),
    Filler(usize),
    Uncovered,
}

impl Coverage {
    pub fn level(self) -> Option<usize> {
        match self {
            Coverage::Omega(k) | Coverage::Filler(k) => Some(k),
            Coverage::Uncovered => None,
        }
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coverage::Omega(k) => write!(f, "omega {k}"),
            Coverage::Filler(k) => write!(f, "filler {k}"),
            Coverage::Uncovered => write!(f, "uncovered"),
        }
    }
}

/// Values on `[lo, hi]` with the coverage of each position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzWindow {
    pub lo: i64,
    pub values: Vec<u8>,
    pub coverage: Vec<Coverage>,
}

impl ToeplitzWindow {
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn value(&self, i: i64) -> Option<u8> {
        usize::try_from(i - self.lo).ok().and_then(|j| self.values.get(j).copied())
    }
}

impl fmt::Display for ToeplitzWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "interval {} {}", self.lo, self.hi())?;
        for (j, (v, c)) in self.values.iter().zip(&self.coverage).enumerate() {
            write!(f, "\n{} {v} {c}", self.lo + j as i64)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ToeplitzWindow {
    type Err = Error;

    /// Reads the format written by `Display`; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, msg: &str| Error::Parse { line, msg: msg.into() };
        let Some((line, header)) = lines.next() else { return Err(bad(1, "empty window")) };
        let (lo, hi) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["interval", lo, hi] => match (lo.parse::<i64>(), hi.parse::<i64>()) {
                (Ok(lo), Ok(hi)) if lo <= hi => (lo, hi),
                _ => return Err(bad(line, "bad interval bounds")),
            },
            _ => return Err(bad(line, "expected 'interval lo hi'")),
        };
        let mut values = Vec::new();
        let mut cover = Vec::new();
        for (line, text) in lines {
            let words: Vec<&str> = text.split_whitespace().collect();
            let expected = lo + values.len() as i64;
            let (pos, v, c) = match words.as_slice() {
                [pos, v, "uncovered"] => (pos, v, Coverage::Uncovered),
                [pos, v, kind @ ("omega" | "filler"), k] => {
                    let k: usize = k.parse().map_err(|_| bad(line, "bad level"))?;
                    if k == 0 {
                        return Err(bad(line, "levels start at 1"));
                    }
                    (pos, v, if *kind == "omega" { Coverage::Omega(k) } else { Coverage::Filler(k) })
                }
                _ => return Err(bad(line, "expected 'position value coverage'")),
            };
            if pos.parse::<i64>().ok() != Some(expected) {
                return Err(bad(line, &format!("expected position {expected}")));
            }
            match v.parse::<u8>() {
                Ok(v @ 1..=3) => values.push(v),
                _ => return Err(bad(line, "values are 1, 2 or 3")),
            }
            cover.push(c);
        }
        if lo + values.len() as i64 - 1 != hi {
            return Err(bad(text.lines().count().max(1), "window does not cover the interval"));
        }
        Ok(ToeplitzWindow { lo, values, coverage: cover })
    }
}

/// Level of position `i` among the first `levels` levels.
pub fn coverage(i: i64, levels: usize) -> Coverage {
    let mut period: i64 = 1;
    for k in 1..=levels {
        let offset = period - 1;
        period *= 3;
        let r = i.rem_euclid(period);
        if r == offset {
            return Coverage::Omega(k);
        }
        if r == offset + period / 3 {
            return Coverage::Filler(k);
        }
    }
    Coverage::Uncovered
}

pub fn generate(omega: &[u8], lo: i64, hi: i64) -> Result<ToeplitzWindow> {
    if omega.is_empty() {
        return structural("omega must be nonempty");
    }
    if let Some(bad) = omega.iter().find(|&&w| w != 1 && w != 2) {
        return structural(format!("omega entries are 1 or 2, got {bad}"));
    }
    if hi < lo {
        return structural("empty interval");
    }
    let coverage: Vec<Coverage> = (lo..=hi).map(|i| coverage(i, omega.len())).collect();
    let values = coverage
        .iter()
        .map(|c| match c {
            Coverage::Omega(k) => omega[k - 1],
            _ => 3,
        })
        .collect();
    Ok(ToeplitzWindow { lo, values, coverage })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    pub omega: Vec<u8>,
    /// All requested levels were found.
    pub complete: bool,
}

/// Reads `ω(k)` for `k = 1, 2, …` from positions annotated as level-`k`
/// carriers, stopping at the first level with no such position.
pub fn recover(w: &ToeplitzWindow, requested: usize) -> Result<Recovery> {
    let mut omega = Vec::new();
    for k in 1..=requested {
        let mut found: Option<u8> = None;
        for (j, c) in w.coverage.iter().enumerate() {
            if *c == Coverage::Omega(k) {
                let v = w.values[j];
                match found {
                    None => found = Some(v),
                    Some(prev) if prev != v => {
                        return Err(Error::Corruption(format!(
                            "level {k} reads both {prev} and {v} (position {})",
                            w.lo + j as i64
                        )))
                    }
                    _ => {}
                }
            }
        }
        match found {
            Some(v) => omega.push(v),
            None => return Ok(Recovery { omega, complete: false }),
        }
    }
    Ok(Recovery { omega, complete: true })
}

/// Per covered position: whether every in-window translate by multiples of
/// `3^k` carries the same value.
pub fn periodicity_check(w: &ToeplitzWindow) -> Vec<(i64, bool)> {
    let n = w.values.len();
    let mut out = Vec::new();
    for j in 0..n {
        let Some(k) = w.coverage[j].level() else { continue };
        let period = 3usize.pow(k as u32);
        let ok = (j % period..n).step_by(period).all(|t| w.values[t] == w.values[j]);
        out.push((w.lo + j as i64, ok));
    }
    out
}

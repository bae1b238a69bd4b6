//! The `.sds` text dialect: named sections, one object each.
//!
//! ```text
//! group G
//! Z * cyclic 3
//! end
//!
//! sft golden
//! group: Z
//! alphabet: 0 1
//! window: 0 1
//! forbidden:
//! 1@0 1@1
//! end
//! ```
//!
//! Other sections: `automaton` (`group:`, `colors:`, `Omega <gen> <c> -> <d>`),
//! `presentation` (`alphabet:`, `vertices: n`, `edge u v label`), `map`
//! (`source:`, `target:`, `a -> b`), `system` (`level X`, `level Y via M`,
//! `via id` for the identity) and `pseudo-orbit` (`sft:`, `coarse:`,
//! `blocks:` then one block per line). `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use crate::automaton::ColoringAutomaton;
use crate::error::{Error, Result};
use crate::group::{parse_factor, Group, GroupElement};
use crate::sft::{AlphabetMap, Sft};
use crate::shadowing::{InverseSystem, PseudoOrbit};
use crate::sofic::SoficPresentation;

#[derive(Debug, Clone)]
pub enum Item {
    Group(Group),
    Sft { group_ref: String, sft: Sft },
    Automaton { group_ref: String, automaton: ColoringAutomaton },
    Presentation(SoficPresentation),
    Map(AlphabetMap),
    System { levels: Vec<(String, Option<String>)>, system: InverseSystem },
    PseudoOrbit { sft_ref: String, orbit: PseudoOrbit },
}

impl Item {
    fn kind(&self) -> &'static str {
        match self {
            Item::Group(_) => "group",
            Item::Sft { .. } => "sft",
            Item::Automaton { .. } => "automaton",
            Item::Presentation(_) => "presentation",
            Item::Map(_) => "map",
            Item::System { .. } => "system",
            Item::PseudoOrbit { .. } => "pseudo-orbit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub item: Item,
}

#[derive(Debug, Clone, Default)]
pub struct SpecFile {
    pub sections: Vec<Section>,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

/// Attaches a line number to errors from library constructors.
fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        Error::Structural(m) | Error::Unsupported(m) | Error::Degenerate(m) | Error::Precondition(m) => {
            Error::Parse { line, msg: m }
        }
        other => other,
    })
}

struct Raw {
    kind: String,
    name: String,
    line: usize,
    body: Vec<(usize, String)>,
}

fn split_sections(text: &str) -> Result<Vec<Raw>> {
    let mut out: Vec<Raw> = Vec::new();
    let mut open: Option<Raw> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        match open.as_mut() {
            None => {
                let mut words = content.split_whitespace();
                let kind = words.next().expect("nonempty");
                if !["group", "sft", "automaton", "presentation", "map", "system", "pseudo-orbit"].contains(&kind) {
                    return err(line, format!("expected a section header, found '{content}'"));
                }
                let Some(name) = words.next() else {
                    return err(line, format!("{kind} section needs a name"));
                };
                if words.next().is_some() {
                    return err(line, "trailing tokens after section name");
                }
                if out.iter().any(|r| r.name == name) {
                    return err(line, format!("duplicate section name '{name}'"));
                }
                open = Some(Raw { kind: kind.into(), name: name.into(), line, body: Vec::new() });
            }
            Some(r) => {
                if content == "end" {
                    out.push(open.take().expect("open section"));
                } else {
                    r.body.push((line, content.to_string()));
                }
            }
        }
    }
    if let Some(r) = open {
        return err(r.line, format!("section '{}' is missing 'end'", r.name));
    }
    Ok(out)
}

/// `key: rest` if the line starts with that key.
fn keyed<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key).and_then(|r| r.strip_prefix(':')).map(str::trim)
}

fn letter_index(alphabet: &[String], token: &str, line: usize) -> Result<usize> {
    match alphabet.iter().position(|a| a == token) {
        Some(i) => Ok(i),
        None => err(line, format!("letter '{token}' is not in the alphabet")),
    }
}

/// Letters of a word line: whitespace-separated, or one character each when
/// the line is a single token over a one-character alphabet.
fn word_tokens(text: &str, alphabet: &[String]) -> Vec<String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() == 1 && alphabet.iter().all(|a| a.chars().count() == 1) {
        tokens[0].chars().map(String::from).collect()
    } else {
        tokens.into_iter().map(String::from).collect()
    }
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<SpecFile> {
        let mut spec = SpecFile::default();
        for raw in split_sections(text)? {
            let item = match raw.kind.as_str() {
                "group" => Item::Group(parse_group(&raw)?),
                "sft" => spec.parse_sft(&raw)?,
                "automaton" => spec.parse_automaton(&raw)?,
                "presentation" => Item::Presentation(parse_presentation(&raw)?),
                "map" => Item::Map(parse_map(&raw)?),
                "system" => spec.parse_system(&raw)?,
                "pseudo-orbit" => spec.parse_pseudo_orbit(&raw)?,
                _ => unreachable!("checked in split_sections"),
            };
            spec.sections.push(Section { name: raw.name, item });
        }
        Ok(spec)
    }

    fn get(&self, name: &str) -> Option<&Item> {
        self.sections.iter().find(|s| s.name == name).map(|s| &s.item)
    }

    /// A named group section, or an inline group expression.
    fn resolve_group(&self, reference: &str, line: usize) -> Result<Group> {
        match self.get(reference) {
            Some(Item::Group(g)) => Ok(g.clone()),
            Some(other) => err(line, format!("'{reference}' is a {}, not a group", other.kind())),
            None => Group::parse_expression(reference)
                .map_err(|_| Error::Parse { line, msg: format!("undefined group '{reference}'") }),
        }
    }

    fn resolve_sft(&self, reference: &str, line: usize) -> Result<&Sft> {
        match self.get(reference) {
            Some(Item::Sft { sft, .. }) => Ok(sft),
            Some(other) => err(line, format!("'{reference}' is a {}, not an sft", other.kind())),
            None => err(line, format!("undefined sft '{reference}'")),
        }
    }

    fn parse_sft(&self, raw: &Raw) -> Result<Item> {
        let mut group_ref = None;
        let mut alphabet: Option<Vec<String>> = None;
        let mut window: Option<Vec<GroupElement>> = None;
        let mut mode: Option<bool> = None;
        let mut patterns = Vec::new();
        let mut group: Option<Group> = None;
        for (line, text) in &raw.body {
            let line = *line;
            if let Some(r) = keyed(text, "group") {
                group = Some(self.resolve_group(r, line)?);
                group_ref = Some(r.to_string());
            } else if let Some(r) = keyed(text, "alphabet") {
                alphabet = Some(r.split_whitespace().map(String::from).collect());
            } else if let Some(r) = keyed(text, "window") {
                let Some(g) = &group else { return err(line, "window given before group") };
                window = Some(r.split_whitespace().map(|t| at(line, g.parse_element(t))).collect::<Result<_>>()?);
            } else if text == "allowed:" || text == "forbidden:" {
                mode = Some(text == "allowed:");
            } else if mode.is_some() {
                let (Some(g), Some(a), Some(w)) = (&group, &alphabet, &window) else {
                    return err(line, "patterns need group, alphabet and window first");
                };
                let mut cells = BTreeMap::new();
                for token in text.split_whitespace() {
                    let Some((letter, element)) = token.split_once('@') else {
                        return err(line, format!("expected letter@element, found '{token}'"));
                    };
                    let g = at(line, g.parse_element(element))?;
                    if cells.insert(g, letter_index(a, letter, line)?).is_some() {
                        return err(line, format!("element {element} appears twice"));
                    }
                }
                if cells.len() != w.len() || !w.iter().all(|e| cells.contains_key(e)) {
                    return err(line, "pattern support differs from the window");
                }
                patterns.push(w.iter().map(|e| cells[e]).collect::<Vec<usize>>());
            } else {
                return err(line, format!("unexpected line '{text}'"));
            }
        }
        let (Some(group), Some(alphabet), Some(window), Some(allowed_mode)) = (group, alphabet, window, mode) else {
            return err(raw.line, "sft needs group, alphabet, window and an allowed: or forbidden: list");
        };
        let sft = if allowed_mode {
            at(raw.line, Sft::new(group, alphabet, window, patterns))?
        } else {
            at(raw.line, Sft::from_forbidden(group, alphabet, window, patterns))?
        };
        Ok(Item::Sft { group_ref: group_ref.expect("set with group"), sft })
    }

    fn parse_automaton(&self, raw: &Raw) -> Result<Item> {
        let mut group: Option<(String, Group)> = None;
        let mut colors: Option<Vec<String>> = None;
        let mut rule: Vec<Vec<Option<usize>>> = Vec::new();
        for (line, text) in &raw.body {
            let line = *line;
            if let Some(r) = keyed(text, "group") {
                let g = self.resolve_group(r, line)?;
                group = Some((r.to_string(), g));
            } else if let Some(r) = keyed(text, "colors") {
                let Some((_, g)) = &group else { return err(line, "colors given before group") };
                let c: Vec<String> = r.split_whitespace().map(String::from).collect();
                rule = vec![vec![None; c.len()]; g.generators().len()];
                colors = Some(c);
            } else if let Some(r) = text.strip_prefix("Omega ") {
                let (Some((_, g)), Some(c)) = (&group, &colors) else {
                    return err(line, "rules need group and colors first");
                };
                let words: Vec<&str> = r.split_whitespace().collect();
                let [s, from, "->", to] = words.as_slice() else {
                    return err(line, "expected 'Omega <generator> <color> -> <color>'");
                };
                let s = at(line, g.parse_element(s))?;
                let Some(i) = g.generators().iter().position(|t| *t == s) else {
                    return err(line, format!("{s} is not a canonical generator"));
                };
                let from = letter_index(c, from, line)?;
                rule[i][from] = Some(letter_index(c, to, line)?);
            } else {
                return err(line, format!("unexpected line '{text}'"));
            }
        }
        let (Some((group_ref, group)), Some(colors)) = (group, colors) else {
            return err(raw.line, "automaton needs group and colors");
        };
        let Some(rule) = rule.into_iter().map(|row| row.into_iter().collect::<Option<Vec<usize>>>()).collect() else {
            return err(raw.line, "automaton rule is not total on generators × colors");
        };
        let automaton = at(raw.line, ColoringAutomaton::new(group, colors, rule))?;
        Ok(Item::Automaton { group_ref, automaton })
    }

    fn parse_system(&self, raw: &Raw) -> Result<Item> {
        let mut levels = Vec::new();
        let mut sfts = Vec::new();
        let mut maps = Vec::new();
        for (line, text) in &raw.body {
            let line = *line;
            let words: Vec<&str> = text.split_whitespace().collect();
            match words.as_slice() {
                ["level", x] if levels.is_empty() => {
                    sfts.push(self.resolve_sft(x, line)?.clone());
                    levels.push((x.to_string(), None));
                }
                ["level", x, "via", m] if !levels.is_empty() => {
                    let sft = self.resolve_sft(x, line)?.clone();
                    let map = if *m == "id" {
                        AlphabetMap::identity(sft.alphabet())
                    } else {
                        match self.get(m) {
                            Some(Item::Map(map)) => map.clone(),
                            _ => return err(line, format!("undefined map '{m}'")),
                        }
                    };
                    sfts.push(sft);
                    maps.push(map);
                    levels.push((x.to_string(), Some(m.to_string())));
                }
                _ => return err(line, "expected 'level X' first, then 'level X via M'"),
            }
        }
        let system = at(raw.line, InverseSystem::new(sfts, maps))?;
        Ok(Item::System { levels, system })
    }

    fn parse_pseudo_orbit(&self, raw: &Raw) -> Result<Item> {
        let mut sft: Option<(String, Sft)> = None;
        let mut coarse = None;
        let mut blocks: Option<Vec<Vec<usize>>> = None;
        for (line, text) in &raw.body {
            let line = *line;
            if let Some(r) = keyed(text, "sft") {
                sft = Some((r.to_string(), self.resolve_sft(r, line)?.clone()));
            } else if let Some(r) = keyed(text, "coarse") {
                coarse = Some(r.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad level '{r}'") })?);
            } else if text == "blocks:" {
                blocks = Some(Vec::new());
            } else if let Some(b) = blocks.as_mut() {
                let Some((_, x)) = &sft else { return err(line, "blocks need an sft first") };
                let block = word_tokens(text, x.alphabet())
                    .iter()
                    .map(|t| letter_index(x.alphabet(), t, line))
                    .collect::<Result<Vec<usize>>>()?;
                b.push(block);
            } else {
                return err(line, format!("unexpected line '{text}'"));
            }
        }
        let (Some((sft_ref, sft)), Some(blocks)) = (sft, blocks) else {
            return err(raw.line, "pseudo-orbit needs sft and blocks");
        };
        let Some(fine) = blocks.first().map(Vec::len) else {
            return err(raw.line, "pseudo-orbit has no blocks");
        };
        let coarse = coarse.unwrap_or(fine.saturating_sub(1).max(1));
        Ok(Item::PseudoOrbit { sft_ref, orbit: PseudoOrbit { sft, fine, coarse, blocks } })
    }

    fn find<'a, T>(&'a self, kind: &str, name: Option<&str>, pick: impl Fn(&'a Item) -> Option<T>) -> Result<T> {
        let found = self
            .sections
            .iter()
            .filter(|s| name.is_none_or(|n| s.name == n))
            .find_map(|s| pick(&s.item));
        found.ok_or_else(|| match name {
            Some(n) => Error::Structural(format!("no {kind} section named '{n}'")),
            None => Error::Structural(format!("no {kind} section in the file")),
        })
    }

    /// The named SFT, or the first one.
    pub fn sft(&self, name: Option<&str>) -> Result<&Sft> {
        self.find("sft", name, |i| if let Item::Sft { sft, .. } = i { Some(sft) } else { None })
    }

    pub fn automaton(&self, name: Option<&str>) -> Result<&ColoringAutomaton> {
        self.find("automaton", name, |i| if let Item::Automaton { automaton, .. } = i { Some(automaton) } else { None })
    }

    pub fn presentation(&self, name: Option<&str>) -> Result<&SoficPresentation> {
        self.find("presentation", name, |i| if let Item::Presentation(p) = i { Some(p) } else { None })
    }

    pub fn map(&self, name: Option<&str>) -> Result<&AlphabetMap> {
        self.find("map", name, |i| if let Item::Map(m) = i { Some(m) } else { None })
    }

    pub fn system(&self, name: Option<&str>) -> Result<&InverseSystem> {
        self.find("system", name, |i| if let Item::System { system, .. } = i { Some(system) } else { None })
    }

    pub fn pseudo_orbit(&self, name: Option<&str>) -> Result<&PseudoOrbit> {
        self.find("pseudo-orbit", name, |i| if let Item::PseudoOrbit { orbit, .. } = i { Some(orbit) } else { None })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sections.iter().map(|s| s.name.as_str())
    }
}

fn parse_group(raw: &Raw) -> Result<Group> {
    match raw.body.as_slice() {
        [] => err(raw.line, "group section is empty"),
        [(line, text)] if text.contains('*') => at(*line, Group::parse_expression(text)),
        lines => {
            let factors = lines.iter().map(|(line, text)| at(*line, parse_factor(text))).collect::<Result<Vec<_>>>()?;
            at(raw.line, Group::new(factors))
        }
    }
}

fn parse_presentation(raw: &Raw) -> Result<SoficPresentation> {
    let mut alphabet: Option<Vec<String>> = None;
    let mut vertices = None;
    let mut edges = Vec::new();
    for (line, text) in &raw.body {
        let line = *line;
        if let Some(r) = keyed(text, "alphabet") {
            alphabet = Some(r.split_whitespace().map(String::from).collect());
        } else if let Some(r) = keyed(text, "vertices") {
            vertices = Some(r.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad vertex count '{r}'") })?);
        } else if let Some(r) = text.strip_prefix("edge ") {
            let Some(a) = &alphabet else { return err(line, "edges need an alphabet first") };
            let words: Vec<&str> = r.split_whitespace().collect();
            let [u, v, label] = words.as_slice() else { return err(line, "expected 'edge u v label'") };
            let num = |w: &str| w.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad vertex '{w}'") });
            edges.push((num(u)?, num(v)?, letter_index(a, label, line)?));
        } else {
            return err(line, format!("unexpected line '{text}'"));
        }
    }
    let (Some(alphabet), Some(vertices)) = (alphabet, vertices) else {
        return err(raw.line, "presentation needs alphabet and vertices");
    };
    at(raw.line, SoficPresentation::new(alphabet, vertices, edges))
}

fn parse_map(raw: &Raw) -> Result<AlphabetMap> {
    let mut source: Option<Vec<String>> = None;
    let mut target: Option<Vec<String>> = None;
    let mut image: BTreeMap<usize, usize> = BTreeMap::new();
    for (line, text) in &raw.body {
        let line = *line;
        if let Some(r) = keyed(text, "source") {
            source = Some(r.split_whitespace().map(String::from).collect());
        } else if let Some(r) = keyed(text, "target") {
            target = Some(r.split_whitespace().map(String::from).collect());
        } else {
            let (Some(s), Some(t)) = (&source, &target) else {
                return err(line, "map entries need source and target first");
            };
            let words: Vec<&str> = text.split_whitespace().collect();
            let [a, "->", b] = words.as_slice() else { return err(line, "expected 'a -> b'") };
            image.insert(letter_index(s, a, line)?, letter_index(t, b, line)?);
        }
    }
    let (Some(source), Some(target)) = (source, target) else {
        return err(raw.line, "map needs source and target");
    };
    if image.len() != source.len() {
        return err(raw.line, "map is not total on its source");
    }
    at(raw.line, AlphabetMap::new(source, target, image.into_values().collect()))
}

/// An SFT as a normalized section body (allowed patterns in canonical order).
pub fn write_sft(f: &mut impl fmt::Write, name: &str, group_ref: &str, sft: &Sft) -> fmt::Result {
    writeln!(f, "sft {name}")?;
    writeln!(f, "group: {group_ref}")?;
    writeln!(f, "alphabet: {}", sft.alphabet().join(" "))?;
    writeln!(f, "window: {}", sft.window().iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" "))?;
    writeln!(f, "allowed:")?;
    for p in sft.allowed() {
        let cells: Vec<String> = sft.window().iter().zip(p).map(|(g, &a)| format!("{}@{g}", sft.alphabet()[a])).collect();
        writeln!(f, "{}", cells.join(" "))?;
    }
    write!(f, "end")
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
                writeln!(f)?;
            }
            let name = &s.name;
            match &s.item {
                Item::Group(g) => write!(f, "group {name}\n{g}\nend")?,
                Item::Sft { group_ref, sft } => write_sft(f, name, group_ref, sft)?,
                Item::Automaton { group_ref, automaton } => write!(f, "automaton {name}\ngroup: {group_ref}\n{automaton}\nend")?,
                Item::Presentation(p) => write!(f, "presentation {name}\n{p}\nend")?,
                Item::Map(m) => {
                    write!(f, "map {name}\nsource: {}\ntarget: {}", m.source.join(" "), m.target.join(" "))?;
                    for (a, &b) in m.source.iter().zip(&m.map) {
                        write!(f, "\n{a} -> {}", m.target[b])?;
                    }
                    write!(f, "\nend")?;
                }
                Item::System { levels, .. } => {
                    write!(f, "system {name}")?;
                    for (x, via) in levels {
                        match via {
                            None => write!(f, "\nlevel {x}")?,
                            Some(m) => write!(f, "\nlevel {x} via {m}")?,
                        }
                    }
                    write!(f, "\nend")?;
                }
                Item::PseudoOrbit { sft_ref, orbit } => {
                    write!(f, "pseudo-orbit {name}\nsft: {sft_ref}\ncoarse: {}\nblocks:", orbit.coarse)?;
                    for b in &orbit.blocks {
                        let letters: Vec<&str> = b.iter().map(|&a| orbit.sft.alphabet()[a].as_str()).collect();
                        write!(f, "\n{}", letters.join(" "))?;
                    }
                    write!(f, "\nend")?;
                }
            }
        }
        writeln!(f)
    }
}

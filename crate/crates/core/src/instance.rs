//! Preference instances and matchings.
//!
//! An [`Instance`] is a bipartite preference structure: people rank items in
//! groups (ties inside a group), and every item carries a number of copies and
//! a per-copy cost. A [`Matching`] assigns each person at most one item while
//! respecting copy counts.
//!
//! Internally everything is index based. People and items keep their
//! declaration order, and every algorithm in this crate breaks ties by that
//! order.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

/// Prefix reserved for synthetic last-resort items.
pub const LAST_RESORT_PREFIX: &str = "_last:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<InstanceError>,
    },
    #[error("duplicate person id `{0}`")]
    DuplicatePerson(String),
    #[error("duplicate item id `{0}`")]
    DuplicateItem(String),
    #[error("person `{person}` lists undeclared item `{item}`")]
    UnknownItem { person: String, item: String },
    #[error("person `{person}` lists item `{item}` more than once")]
    RepeatedInList { person: String, item: String },
    #[error("item `{0}` must have at least one copy")]
    ZeroCopies(String),
    #[error("item `{0}` has a negative cost")]
    NegativeCost(String),
    #[error("id `{0}` uses the reserved prefix `_last:`")]
    ReservedId(String),
    #[error("id `{0}` names both a person and an item")]
    NameClash(String),
    #[error("person `{0}` has an empty tie group")]
    EmptyGroup(String),
    #[error("last-resort items are already enabled")]
    LastResortsAlreadyEnabled,
    #[error("copy vector has length {got}, expected {expected}")]
    CopyVectorLength { expected: usize, got: usize },
}

impl InstanceError {
    fn at(self, line: usize) -> Self {
        match self {
            e @ (InstanceError::Syntax { .. } | InstanceError::AtLine { .. }) => e,
            e => InstanceError::AtLine {
                line,
                source: Box::new(e),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown person `{0}`")]
    UnknownPerson(String),
    #[error("unknown item `{0}`")]
    UnknownItem(String),
    #[error("person `{0}` is assigned twice")]
    DuplicatePerson(String),
    #[error("person `{0}` has no assignment line")]
    MissingPerson(String),
    #[error("person `{person}` does not list item `{item}`")]
    NotInList { person: String, item: String },
    #[error("item `{item}` used {used} times but has {copies} copies")]
    OverCapacity { item: String, used: u32, copies: u32 },
    #[error("matching covers {got} people, instance has {expected}")]
    WrongShape { expected: usize, got: usize },
    #[error("item index {0} out of range")]
    ItemOutOfRange(usize),
    #[error("a person is unmatched but last resorts are enabled")]
    MissingLastResort,
    #[error("matching cost overflows u64")]
    CostOverflow,
}

/// An item record: identifier, number of copies and cost per copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    pub copies: u32,
    pub cost: u64,
}

/// A validated preference instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    people: Vec<String>,
    items: Vec<Item>,
    prefs: Vec<Vec<Vec<usize>>>,
    last_resort: Option<Vec<usize>>,
    person_index: HashMap<String, usize>,
    item_index: HashMap<String, usize>,
}

/// Incremental construction of an [`Instance`] by id.
#[derive(Debug, Default, Clone)]
pub struct InstanceBuilder {
    items: Vec<Item>,
    people: Vec<(String, Vec<Vec<String>>)>,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn item(mut self, id: impl Into<String>, copies: u32, cost: u64) -> Self {
        self.items.push(Item {
            id: id.into(),
            copies,
            cost,
        });
        self
    }

    /// Adds a person with rank groups given as lists of item ids.
    pub fn person<I, G, S>(mut self, id: impl Into<String>, groups: I) -> Self
    where
        I: IntoIterator<Item = G>,
        G: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let groups = groups
            .into_iter()
            .map(|g| g.into_iter().map(Into::into).collect())
            .collect();
        self.people.push((id.into(), groups));
        self
    }

    /// Adds a person with a strict list (one item per rank).
    pub fn strict_person<I, S>(self, id: impl Into<String>, list: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let groups: Vec<Vec<String>> = list.into_iter().map(|s| vec![s.into()]).collect();
        self.person(id, groups)
    }

    pub fn build(self) -> Result<Instance, InstanceError> {
        let mut item_index = HashMap::with_capacity(self.items.len());
        for (idx, item) in self.items.iter().enumerate() {
            check_user_id(&item.id)?;
            if item.copies == 0 {
                return Err(InstanceError::ZeroCopies(item.id.clone()));
            }
            if item_index.insert(item.id.clone(), idx).is_some() {
                return Err(InstanceError::DuplicateItem(item.id.clone()));
            }
        }
        let mut person_index = HashMap::with_capacity(self.people.len());
        let mut people = Vec::with_capacity(self.people.len());
        let mut prefs = Vec::with_capacity(self.people.len());
        for (idx, (id, groups)) in self.people.into_iter().enumerate() {
            check_user_id(&id)?;
            if item_index.contains_key(&id) {
                return Err(InstanceError::NameClash(id));
            }
            if person_index.insert(id.clone(), idx).is_some() {
                return Err(InstanceError::DuplicatePerson(id));
            }
            let mut seen = Vec::new();
            let mut resolved = Vec::with_capacity(groups.len());
            for group in groups {
                if group.is_empty() {
                    return Err(InstanceError::EmptyGroup(id));
                }
                let mut g = Vec::with_capacity(group.len());
                for item in group {
                    let Some(&b) = item_index.get(&item) else {
                        return Err(InstanceError::UnknownItem {
                            person: id.clone(),
                            item,
                        });
                    };
                    if seen.contains(&b) {
                        return Err(InstanceError::RepeatedInList {
                            person: id.clone(),
                            item,
                        });
                    }
                    seen.push(b);
                    g.push(b);
                }
                resolved.push(g);
            }
            people.push(id);
            prefs.push(resolved);
        }
        Ok(Instance {
            people,
            items: self.items,
            prefs,
            last_resort: None,
            person_index,
            item_index,
        })
    }
}

fn check_user_id(id: &str) -> Result<(), InstanceError> {
    if id.starts_with(LAST_RESORT_PREFIX) {
        return Err(InstanceError::ReservedId(id.to_string()));
    }
    Ok(())
}

impl Instance {
    pub fn builder() -> InstanceBuilder {
        InstanceBuilder::new()
    }

    pub fn num_people(&self) -> usize {
        self.people.len()
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn people(&self) -> &[String] {
        &self.people
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn person_id(&self, p: usize) -> &str {
        &self.people[p]
    }

    pub fn item(&self, b: usize) -> &Item {
        &self.items[b]
    }

    pub fn person_by_id(&self, id: &str) -> Option<usize> {
        self.person_index.get(id).copied()
    }

    pub fn item_by_id(&self, id: &str) -> Option<usize> {
        self.item_index.get(id).copied()
    }

    /// Rank groups of person `p`, most preferred first.
    pub fn groups(&self, p: usize) -> &[Vec<usize>] {
        &self.prefs[p]
    }

    /// Person `p`'s top rank group, empty if their list is empty.
    pub fn top_group(&self, p: usize) -> &[usize] {
        self.prefs[p].first().map(Vec::as_slice).unwrap_or(&[])
    }

    /// 0-based rank of item `b` in `p`'s list.
    pub fn rank(&self, p: usize, b: usize) -> Option<usize> {
        self.prefs[p].iter().position(|g| g.contains(&b))
    }

    /// Iterates every listed `(person, item, rank)` triple.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.prefs.iter().enumerate().flat_map(|(p, groups)| {
            groups
                .iter()
                .enumerate()
                .flat_map(move |(r, g)| g.iter().map(move |&b| (p, b, r)))
        })
    }

    /// Total number of preference entries.
    pub fn num_edges(&self) -> usize {
        self.prefs
            .iter()
            .map(|groups| groups.iter().map(Vec::len).sum::<usize>())
            .sum()
    }

    pub fn last_resort_enabled(&self) -> bool {
        self.last_resort.is_some()
    }

    /// The synthetic last-resort item of `p`, when enabled.
    pub fn last_resort(&self, p: usize) -> Option<usize> {
        self.last_resort.as_ref().map(|lr| lr[p])
    }

    pub fn is_last_resort(&self, b: usize) -> bool {
        self.items[b].id.starts_with(LAST_RESORT_PREFIX)
    }

    /// Items that are not synthetic last resorts.
    pub fn real_items(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.items.len()).filter(|&b| !self.is_last_resort(b))
    }

    /// Number of people who list item `b` anywhere in their preferences.
    pub fn listing_count(&self, b: usize) -> usize {
        self.prefs
            .iter()
            .filter(|groups| groups.iter().any(|g| g.contains(&b)))
            .count()
    }

    /// Appends a unique zero-cost item `_last:<p>` as each person's final
    /// singleton rank group.
    pub fn add_last_resorts(&self) -> Result<Instance, InstanceError> {
        if self.last_resort.is_some() {
            return Err(InstanceError::LastResortsAlreadyEnabled);
        }
        let mut out = self.clone();
        let mut lr = Vec::with_capacity(self.people.len());
        for (p, id) in self.people.iter().enumerate() {
            let b = out.items.len();
            let item_id = format!("{LAST_RESORT_PREFIX}{id}");
            out.item_index.insert(item_id.clone(), b);
            out.items.push(Item {
                id: item_id,
                copies: 1,
                cost: 0,
            });
            out.prefs[p].push(vec![b]);
            lr.push(b);
        }
        out.last_resort = Some(lr);
        Ok(out)
    }

    /// Returns `self` if last resorts are already enabled, otherwise a copy with
    /// them added.
    pub fn with_last_resorts(&self) -> Instance {
        if self.last_resort_enabled() {
            self.clone()
        } else {
            self.add_last_resorts().expect("checked that last resorts are disabled")
        }
    }

    /// Copy with `extra[b]` additional copies of each item. Last-resort entries
    /// of `extra` must be zero.
    pub fn with_extra_copies(&self, extra: &[u32]) -> Result<Instance, InstanceError> {
        if extra.len() != self.items.len() {
            return Err(InstanceError::CopyVectorLength {
                expected: self.items.len(),
                got: extra.len(),
            });
        }
        let mut out = self.clone();
        for (item, &x) in out.items.iter_mut().zip(extra) {
            item.copies += x;
        }
        Ok(out)
    }

    /// Copy where item `b` gets exactly `copies[b]` copies. Items with zero
    /// copies are removed together with every list entry naming them; tie
    /// groups that become empty disappear. Last resorts, if enabled, are
    /// rebuilt for the result. `copies` covers real items only, in declaration
    /// order.
    pub fn with_copy_vector(&self, copies: &[u32]) -> Result<Instance, InstanceError> {
        let real: Vec<usize> = self.real_items().collect();
        if copies.len() != real.len() {
            return Err(InstanceError::CopyVectorLength {
                expected: real.len(),
                got: copies.len(),
            });
        }
        let mut keep = vec![false; self.items.len()];
        let mut builder = InstanceBuilder::new();
        for (&b, &c) in real.iter().zip(copies) {
            if c > 0 {
                keep[b] = true;
                builder = builder.item(self.items[b].id.clone(), c, self.items[b].cost);
            }
        }
        for (p, id) in self.people.iter().enumerate() {
            let groups: Vec<Vec<String>> = self.prefs[p]
                .iter()
                .map(|g| {
                    g.iter()
                        .filter(|&&b| keep[b])
                        .map(|&b| self.items[b].id.clone())
                        .collect::<Vec<_>>()
                })
                .filter(|g| !g.is_empty())
                .collect();
            builder = builder.person(id.clone(), groups);
        }
        let out = builder.build()?;
        if self.last_resort_enabled() {
            out.add_last_resorts()
        } else {
            Ok(out)
        }
    }

    /// Canonical text form, accepted by [`parse_instance`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.last_resort_enabled() {
            out.push_str("option last-resorts\n");
        }
        for b in self.real_items() {
            let item = &self.items[b];
            let _ = writeln!(out, "item {} copies={} cost={}", item.id, item.copies, item.cost);
        }
        for (p, id) in self.people.iter().enumerate() {
            let _ = write!(out, "person {id} :");
            let mut first = true;
            for g in &self.prefs[p] {
                if g.len() == 1 && self.is_last_resort(g[0]) {
                    continue;
                }
                out.push_str(if first { " " } else { " > " });
                first = false;
                if g.len() == 1 {
                    out.push_str(&self.items[g[0]].id);
                } else {
                    out.push('(');
                    for (k, &b) in g.iter().enumerate() {
                        if k > 0 {
                            out.push(' ');
                        }
                        out.push_str(&self.items[b].id);
                    }
                    out.push(')');
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Gt,
    Word(&'a str),
}

fn tokenize(s: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        let punct = matches!(c, '(' | ')' | '>');
        if c.is_whitespace() || punct {
            if let Some(st) = start.take() {
                out.push(Token::Word(&s[st..i]));
            }
            match c {
                '(' => out.push(Token::Open),
                ')' => out.push(Token::Close),
                '>' => out.push(Token::Gt),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(Token::Word(&s[st..]));
    }
    out
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\''))
}

fn syntax(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_key_value<'a>(line: usize, word: &'a str, key: &str) -> Result<&'a str, InstanceError> {
    word.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| syntax(line, format!("expected `{key}=<int>`, found `{word}`")))
}

/// Parses the line-based instance format.
///
/// ```text
/// # comment
/// item b1 copies=1 cost=3
/// person a1 : b1 > (b2 b3)
/// ```
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut builder = InstanceBuilder::new();
    let mut item_lines = HashMap::new();
    let mut person_lines = Vec::new();
    let mut seen_person = false;
    let mut last_resorts = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        match keyword {
            "option" => {
                if rest != "last-resorts" {
                    return Err(syntax(line, format!("unknown option `{rest}`")));
                }
                last_resorts = true;
            }
            "item" => {
                if seen_person {
                    return Err(syntax(line, "item lines must precede person lines"));
                }
                let words: Vec<&str> = rest.split_whitespace().collect();
                let [id, copies, cost] = words[..] else {
                    return Err(syntax(line, "expected `item <id> copies=<int> cost=<int>`"));
                };
                if !valid_id(id) {
                    return Err(syntax(line, format!("invalid item id `{id}`")));
                }
                let copies_text = parse_key_value(line, copies, "copies")?;
                let cost_text = parse_key_value(line, cost, "cost")?;
                let copies: u32 = copies_text
                    .parse()
                    .map_err(|_| syntax(line, format!("invalid copy count `{copies_text}`")))?;
                if cost_text.starts_with('-') && cost_text[1..].parse::<u64>().is_ok() {
                    return Err(InstanceError::NegativeCost(id.to_string()).at(line));
                }
                let cost: u64 = cost_text
                    .parse()
                    .map_err(|_| syntax(line, format!("invalid cost `{cost_text}`")))?;
                if copies == 0 {
                    return Err(InstanceError::ZeroCopies(id.to_string()).at(line));
                }
                check_user_id(id).map_err(|e| e.at(line))?;
                if item_lines.insert(id.to_string(), line).is_some() {
                    return Err(InstanceError::DuplicateItem(id.to_string()).at(line));
                }
                builder = builder.item(id, copies, cost);
            }
            "person" => {
                seen_person = true;
                let Some((id, list)) = rest.split_once(':') else {
                    return Err(syntax(line, "expected `person <id> : <group> (> <group>)*`"));
                };
                let id = id.trim();
                if !valid_id(id) {
                    return Err(syntax(line, format!("invalid person id `{id}`")));
                }
                let groups = parse_groups(line, list)?;
                person_lines.push(line);
                builder = builder.person(id, groups);
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }

    let inst = builder.build().map_err(|e| {
        // map builder errors back to the offending line
        let line = match &e {
            InstanceError::DuplicatePerson(id) | InstanceError::NameClash(id) => last_person_line(text, id),
            InstanceError::UnknownItem { person, .. }
            | InstanceError::RepeatedInList { person, .. }
            | InstanceError::EmptyGroup(person)
            | InstanceError::ReservedId(person) => first_person_line(text, person),
            _ => None,
        };
        match line {
            Some(l) => e.at(l),
            None => e,
        }
    })?;
    if last_resorts {
        inst.add_last_resorts()
    } else {
        Ok(inst)
    }
}

fn person_line_matches(raw: &str, id: &str) -> bool {
    let content = raw.split('#').next().unwrap_or("").trim();
    content
        .strip_prefix("person")
        .map(|rest| {
            let rest = rest.trim_start();
            rest.split(|c: char| c.is_whitespace() || c == ':')
                .next()
                .is_some_and(|w| w == id)
        })
        .unwrap_or(false)
}

fn first_person_line(text: &str, id: &str) -> Option<usize> {
    text.lines().position(|l| person_line_matches(l, id)).map(|i| i + 1)
}

fn last_person_line(text: &str, id: &str) -> Option<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| person_line_matches(l, id))
        .map(|(i, _)| i + 1)
        .last()
}

fn parse_groups(line: usize, list: &str) -> Result<Vec<Vec<String>>, InstanceError> {
    let tokens = tokenize(list);
    let mut groups = Vec::new();
    let mut i = 0;
    if tokens.is_empty() {
        return Ok(groups);
    }
    loop {
        match tokens.get(i) {
            Some(Token::Word(w)) => {
                if !valid_id(w) {
                    return Err(syntax(line, format!("invalid item id `{w}`")));
                }
                groups.push(vec![w.to_string()]);
                i += 1;
            }
            Some(Token::Open) => {
                i += 1;
                let mut g = Vec::new();
                loop {
                    match tokens.get(i) {
                        Some(Token::Word(w)) => {
                            if !valid_id(w) {
                                return Err(syntax(line, format!("invalid item id `{w}`")));
                            }
                            g.push(w.to_string());
                            i += 1;
                        }
                        Some(Token::Close) => {
                            i += 1;
                            break;
                        }
                        _ => return Err(syntax(line, "unterminated tie group")),
                    }
                }
                if g.is_empty() {
                    return Err(syntax(line, "empty tie group"));
                }
                groups.push(g);
            }
            _ => return Err(syntax(line, "expected an item id or `(`")),
        }
        match tokens.get(i) {
            None => break,
            Some(Token::Gt) => i += 1,
            Some(_) => return Err(syntax(line, "expected `>` between rank groups")),
        }
    }
    Ok(groups)
}

/// An assignment of people to items that respects copy counts and lists.
///
/// With last resorts enabled the assignment is total and "unmatched" means
/// assignment to the person's last-resort item; otherwise `None` marks an
/// unmatched person.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    assignment: Vec<Option<usize>>,
    usage: Vec<u32>,
}

impl Matching {
    /// Validates `assignment` against `inst`. `None` entries are mapped to
    /// last resorts when those are enabled.
    pub fn new(inst: &Instance, assignment: Vec<Option<usize>>) -> Result<Self, MatchingError> {
        if assignment.len() != inst.num_people() {
            return Err(MatchingError::WrongShape {
                expected: inst.num_people(),
                got: assignment.len(),
            });
        }
        let mut assignment = assignment;
        let mut usage = vec![0u32; inst.num_items()];
        for (p, slot) in assignment.iter_mut().enumerate() {
            if slot.is_none() {
                *slot = inst.last_resort(p);
            }
            if let Some(b) = *slot {
                if b >= inst.num_items() {
                    return Err(MatchingError::ItemOutOfRange(b));
                }
                if inst.rank(p, b).is_none() {
                    return Err(MatchingError::NotInList {
                        person: inst.person_id(p).to_string(),
                        item: inst.item(b).id.clone(),
                    });
                }
                usage[b] += 1;
            }
        }
        for (b, &used) in usage.iter().enumerate() {
            if used > inst.item(b).copies {
                return Err(MatchingError::OverCapacity {
                    item: inst.item(b).id.clone(),
                    used,
                    copies: inst.item(b).copies,
                });
            }
        }
        Ok(Matching { assignment, usage })
    }

    /// Builds a matching from `(person, item)` id pairs; `None` or `"-"` means
    /// unmatched. People not mentioned are unmatched.
    pub fn from_pairs<'a, I>(inst: &Instance, pairs: I) -> Result<Self, MatchingError>
    where
        I: IntoIterator<Item = (&'a str, Option<&'a str>)>,
    {
        let mut assignment = vec![None; inst.num_people()];
        for (person, item) in pairs {
            let p = inst
                .person_by_id(person)
                .ok_or_else(|| MatchingError::UnknownPerson(person.to_string()))?;
            assignment[p] = match item {
                None | Some("-") => None,
                Some(id) => Some(
                    inst.item_by_id(id)
                        .ok_or_else(|| MatchingError::UnknownItem(id.to_string()))?,
                ),
            };
        }
        Matching::new(inst, assignment)
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn get(&self, p: usize) -> Option<usize> {
        self.assignment[p]
    }

    pub fn usage(&self) -> &[u32] {
        &self.usage
    }

    /// Whether person `p` holds a real (non last-resort) item.
    pub fn is_matched(&self, inst: &Instance, p: usize) -> bool {
        self.assignment[p].is_some_and(|b| !inst.is_last_resort(b))
    }

    /// Number of people holding a real item.
    pub fn cardinality(&self, inst: &Instance) -> usize {
        (0..self.assignment.len()).filter(|&p| self.is_matched(inst, p)).count()
    }

    /// Checks that this matching is shaped for `inst`.
    pub fn check_shape(&self, inst: &Instance) -> Result<(), MatchingError> {
        if self.assignment.len() != inst.num_people() || self.usage.len() != inst.num_items() {
            return Err(MatchingError::WrongShape {
                expected: inst.num_people(),
                got: self.assignment.len(),
            });
        }
        if let Some(b) = self.assignment.iter().flatten().find(|&&b| b >= inst.num_items()) {
            return Err(MatchingError::ItemOutOfRange(*b));
        }
        Ok(())
    }

    /// `<person> -> <item>` lines; last resorts and unmatched print as `-`.
    pub fn to_text(&self, inst: &Instance) -> String {
        let mut out = String::new();
        for (p, slot) in self.assignment.iter().enumerate() {
            let item = match slot {
                Some(b) if !inst.is_last_resort(*b) => inst.item(*b).id.as_str(),
                _ => "-",
            };
            let _ = writeln!(out, "{} -> {}", inst.person_id(p), item);
        }
        out
    }
}

/// Parses `<person> -> <item>` lines (`-` for unmatched). Every person must
/// appear exactly once.
pub fn parse_matching(inst: &Instance, text: &str) -> Result<Matching, MatchingError> {
    let mut assignment: Vec<Option<Option<usize>>> = vec![None; inst.num_people()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((person, item)) = content.split_once("->") else {
            return Err(MatchingError::Syntax {
                line,
                message: "expected `<person> -> <item>`".into(),
            });
        };
        let (person, item) = (person.trim(), item.trim());
        if person.is_empty() || item.is_empty() || item.contains(char::is_whitespace) {
            return Err(MatchingError::Syntax {
                line,
                message: "expected `<person> -> <item>`".into(),
            });
        }
        let p = inst
            .person_by_id(person)
            .ok_or_else(|| MatchingError::UnknownPerson(person.to_string()))?;
        if assignment[p].is_some() {
            return Err(MatchingError::DuplicatePerson(person.to_string()));
        }
        let b = if item == "-" {
            None
        } else {
            Some(
                inst.item_by_id(item)
                    .ok_or_else(|| MatchingError::UnknownItem(item.to_string()))?,
            )
        };
        assignment[p] = Some(b);
    }
    let mut out = Vec::with_capacity(assignment.len());
    for (p, slot) in assignment.into_iter().enumerate() {
        match slot {
            Some(b) => out.push(b),
            None => return Err(MatchingError::MissingPerson(inst.person_id(p).to_string())),
        }
    }
    Matching::new(inst, out)
}

/// `Σ_b usage(b) · cost(b)`.
pub fn matching_cost(inst: &Instance, m: &Matching) -> Result<u64, MatchingError> {
    m.check_shape(inst)?;
    m.usage
        .iter()
        .enumerate()
        .try_fold(0u64, |acc, (b, &used)| {
            (used as u64)
                .checked_mul(inst.item(b).cost)
                .and_then(|c| acc.checked_add(c))
        })
        .ok_or(MatchingError::CostOverflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIX_INTRO: &str = "\
# three people, three items, identical strict lists
item b1 copies=1 cost=3
item b2 copies=1 cost=2
item b3 copies=1 cost=1
person a1 : b1 > b2 > b3
person a2 : b1 > b2 > b3
person a3 : b1 > b2 > b3
";

    fn intro() -> Instance {
        parse_instance(FIX_INTRO).unwrap()
    }

    #[test]
    fn minimal_input() {
        let inst = parse_instance("item b1 copies=1 cost=3\nperson a1 : b1\n").unwrap();
        assert_eq!(inst.num_people(), 1);
        assert_eq!(inst.num_items(), 1);
        assert_eq!(inst.item(0).cost, 3);
        assert_eq!(inst.groups(0), &[vec![0]]);
    }

    #[test]
    fn intro_fixture_parses() {
        let inst = intro();
        assert_eq!(inst.people(), &["a1", "a2", "a3"]);
        let costs: Vec<u64> = inst.items().iter().map(|i| i.cost).collect();
        assert_eq!(costs, vec![3, 2, 1]);
        for p in 0..3 {
            assert_eq!(inst.groups(p), &[vec![0], vec![1], vec![2]]);
        }
        assert_eq!(inst.num_edges(), 9);
    }

    #[test]
    fn tie_groups_are_preserved() {
        let text =
            "item b1 copies=1 cost=0\nitem b2 copies=1 cost=0\nitem b3 copies=1 cost=0\nperson a : (b1 b2) > b3\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.groups(0), &[vec![0, 1], vec![2]]);
        assert_eq!(
            inst.to_text(),
            "item b1 copies=1 cost=0\nitem b2 copies=1 cost=0\nitem b3 copies=1 cost=0\nperson a : (b1 b2) > b3\n"
        );
        let spaced = parse_instance(
            "item b1 copies=1 cost=0\nitem b2 copies=1 cost=0\nitem b3 copies=1 cost=0\nperson a : ( b1  b2 )>b3\n",
        )
        .unwrap();
        assert_eq!(spaced, inst);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_instance("item b1 copies=1 cost=3\nperson a1 : b1 >\n").unwrap_err();
        assert!(matches!(err, InstanceError::Syntax { line: 2, .. }), "{err:?}");

        let err = parse_instance("item b1 copies=1 cost=3\nitem b1 copies=1 cost=2\n").unwrap_err();
        assert_eq!(
            err,
            InstanceError::AtLine {
                line: 2,
                source: Box::new(InstanceError::DuplicateItem("b1".into()))
            }
        );

        let err = parse_instance("item b1 copies=1 cost=3\nperson a : b1\nperson a : b1\n").unwrap_err();
        assert_eq!(
            err,
            InstanceError::AtLine {
                line: 3,
                source: Box::new(InstanceError::DuplicatePerson("a".into()))
            }
        );

        let err = parse_instance("item b1 copies=1 cost=3\nperson a : b2\n").unwrap_err();
        assert!(matches!(
            err,
            InstanceError::AtLine { line: 2, ref source } if matches!(**source, InstanceError::UnknownItem { .. })
        ));

        let err = parse_instance("item b1 copies=0 cost=3\n").unwrap_err();
        assert_eq!(
            err,
            InstanceError::AtLine {
                line: 1,
                source: Box::new(InstanceError::ZeroCopies("b1".into()))
            }
        );

        let err = parse_instance("item b1 copies=1 cost=-3\n").unwrap_err();
        assert_eq!(
            err,
            InstanceError::AtLine {
                line: 1,
                source: Box::new(InstanceError::NegativeCost("b1".into()))
            }
        );

        let err = parse_instance("item _last:x copies=1 cost=0\n").unwrap_err();
        assert!(matches!(err, InstanceError::Syntax { line: 1, .. }));
        let err = Instance::builder().item("_last:x", 1, 0).build().unwrap_err();
        assert!(matches!(err, InstanceError::ReservedId(_)));

        let err = parse_instance("person a : \nitem b copies=1 cost=0\n").unwrap_err();
        assert!(matches!(err, InstanceError::Syntax { line: 2, .. }));

        let err = parse_instance("item b copies=1 cost=0\nperson a : b > b\n").unwrap_err();
        assert!(matches!(
            err,
            InstanceError::AtLine { line: 2, ref source } if matches!(**source, InstanceError::RepeatedInList { .. })
        ));
    }

    #[test]
    fn add_last_resorts_appends_singletons() {
        let inst = intro().add_last_resorts().unwrap();
        assert!(inst.last_resort_enabled());
        for p in 0..3 {
            let lr = inst.last_resort(p).unwrap();
            let item = inst.item(lr);
            assert_eq!(item.id, format!("_last:a{}", p + 1));
            assert_eq!((item.copies, item.cost), (1, 0));
            assert_eq!(inst.groups(p).last().unwrap(), &vec![lr]);
            assert_eq!(inst.groups(p).len(), 4);
            assert_eq!(inst.listing_count(lr), 1);
        }
    }

    #[test]
    fn last_resort_for_empty_list() {
        let inst = parse_instance("person a :\n").unwrap();
        assert!(inst.groups(0).is_empty());
        let inst = inst.add_last_resorts().unwrap();
        assert_eq!(inst.groups(0), &[vec![0]]);
        assert_eq!(inst.item(0).id, "_last:a");
    }

    #[test]
    fn last_resorts_twice_is_an_error() {
        let inst = intro().add_last_resorts().unwrap();
        assert_eq!(
            inst.add_last_resorts().unwrap_err(),
            InstanceError::LastResortsAlreadyEnabled
        );
    }

    #[test]
    fn text_round_trip_with_last_resorts() {
        let inst = intro().add_last_resorts().unwrap();
        let text = inst.to_text();
        assert!(text.starts_with("option last-resorts\n"));
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn cost_of_intro_matchings() {
        let inst = intro();
        let m = Matching::from_pairs(&inst, [("a1", Some("b1")), ("a2", Some("b2")), ("a3", Some("b3"))]).unwrap();
        assert_eq!(matching_cost(&inst, &m).unwrap(), 6);

        let lr = inst.add_last_resorts().unwrap();
        let m = Matching::new(&lr, vec![None, None, None]).unwrap();
        assert_eq!(m.assignment(), &[Some(3), Some(4), Some(5)]);
        assert_eq!(matching_cost(&lr, &m).unwrap(), 0);
        assert_eq!(m.cardinality(&lr), 0);

        let two = inst.with_extra_copies(&[0, 1, 0]).unwrap();
        let m = Matching::from_pairs(&two, [("a1", Some("b1")), ("a2", Some("b2")), ("a3", Some("b2"))]).unwrap();
        assert_eq!(matching_cost(&two, &m).unwrap(), 7);
    }

    #[test]
    fn cost_rejects_foreign_matching() {
        let inst = intro();
        let lr = inst.add_last_resorts().unwrap();
        let m = Matching::new(&lr, vec![Some(3), Some(4), Some(5)]).unwrap();
        assert!(matching_cost(&inst, &m).is_err());
    }

    #[test]
    fn matching_validation() {
        let inst = intro();
        let over = Matching::from_pairs(&inst, [("a1", Some("b1")), ("a2", Some("b1"))]);
        assert!(matches!(over, Err(MatchingError::OverCapacity { .. })));
        let inst2 = parse_instance("item b1 copies=1 cost=0\nitem b2 copies=1 cost=0\nperson a : b1\n").unwrap();
        let bad = Matching::from_pairs(&inst2, [("a", Some("b2"))]);
        assert!(matches!(bad, Err(MatchingError::NotInList { .. })));
        assert!(matches!(
            Matching::new(&inst, vec![None]),
            Err(MatchingError::WrongShape { .. })
        ));
    }

    #[test]
    fn matching_text_round_trip() {
        let inst = intro().add_last_resorts().unwrap();
        let m = Matching::from_pairs(&inst, [("a1", None), ("a2", Some("b1")), ("a3", Some("b2"))]).unwrap();
        let text = m.to_text(&inst);
        assert_eq!(text, "a1 -> -\na2 -> b1\na3 -> b2\n");
        assert_eq!(parse_matching(&inst, &text).unwrap(), m);
        assert_eq!(
            parse_matching(&inst, "a1 -> _last:a1\na2 -> b1\na3 -> b2\n").unwrap(),
            m
        );
        assert!(matches!(
            parse_matching(&inst, "a1 -> -\na2 -> b1\n"),
            Err(MatchingError::MissingPerson(_))
        ));
        assert!(matches!(
            parse_matching(&inst, "a1 b1\n"),
            Err(MatchingError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn copy_vector_drops_zero_items() {
        let inst = intro().add_last_resorts().unwrap();
        let out = inst.with_copy_vector(&[0, 2, 1]).unwrap();
        assert_eq!(out.item_by_id("b1"), None);
        assert_eq!(out.item(out.item_by_id("b2").unwrap()).copies, 2);
        assert_eq!(out.groups(0).len(), 3);
        assert!(out.last_resort_enabled());
    }
}

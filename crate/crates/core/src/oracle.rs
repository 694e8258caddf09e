//! Brute-force reference answers on the explicit clone expansion.
//!
//! Nothing here uses the rank-1 structure or the reduced graph: popularity is
//! decided from the definition by searching all rival matchings, and labels
//! come from a unit-capacity alternating BFS on a graph with one vertex per
//! item copy. Every search is guarded; exceeding a guard is an error.

use std::collections::VecDeque;

use thiserror::Error;

use crate::decomposition::Label;
use crate::instance::{Instance, Matching, MatchingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} is {size}, oracle limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("last-resort items must be enabled")]
    LastResortsRequired,
    #[error(transparent)]
    InvalidMatching(#[from] MatchingError),
    #[error("copy vector has {got} entries, expected {expected}")]
    CopyVectorLength { expected: usize, got: usize },
}

/// Size limits for brute-force searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_people: usize,
    /// Total real item copies, i.e. clone vertices on the item side.
    pub max_clones: usize,
    /// Copy vectors examined by [`brute_min_cost_popular_instance`].
    pub max_vectors: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_people: 12,
            max_clones: 12,
            max_vectors: 100_000,
        }
    }
}

impl OracleLimits {
    /// Limits large enough for single- and few-clause gadgets.
    pub fn gadget() -> Self {
        OracleLimits {
            max_people: 40,
            max_clones: 80,
            max_vectors: 5_000_000,
        }
    }
}

/// A brute-force optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteSolution {
    pub matching: Matching,
    pub cost: u64,
}

/// The oracle's private view: real items only, `None` is the last resort.
struct View {
    /// Per person, `(item, rank)` over real items, best rank first.
    lists: Vec<Vec<(usize, usize)>>,
    copies: Vec<u32>,
    cost: Vec<u64>,
}

impl View {
    fn new(inst: &Instance) -> Result<View, OracleError> {
        if !inst.last_resort_enabled() {
            return Err(OracleError::LastResortsRequired);
        }
        let lists = (0..inst.num_people())
            .map(|p| {
                let mut list = Vec::new();
                for (r, group) in inst.groups(p).iter().enumerate() {
                    for &b in group {
                        if !inst.is_last_resort(b) {
                            list.push((b, r));
                        }
                    }
                }
                list
            })
            .collect();
        let copies = (0..inst.num_items())
            .map(|b| if inst.is_last_resort(b) { 0 } else { inst.item(b).copies })
            .collect();
        let cost = inst.items().iter().map(|i| i.cost).collect();
        Ok(View { lists, copies, cost })
    }

    fn num_people(&self) -> usize {
        self.lists.len()
    }

    fn guard(&self, limits: &OracleLimits) -> Result<(), OracleError> {
        if self.num_people() > limits.max_people {
            return Err(OracleError::GuardExceeded {
                what: "number of people",
                size: self.num_people(),
                limit: limits.max_people,
            });
        }
        let clones: usize = self.copies.iter().map(|&c| c as usize).sum();
        if clones > limits.max_clones {
            return Err(OracleError::GuardExceeded {
                what: "number of item clones",
                size: clones,
                limit: limits.max_clones,
            });
        }
        Ok(())
    }

    fn rank(&self, p: usize, slot: Option<usize>) -> usize {
        match slot {
            Some(b) => self.lists[p]
                .iter()
                .find(|&&(c, _)| c == b)
                .map(|&(_, r)| r)
                .expect("matching uses listed items"),
            None => usize::MAX,
        }
    }

    fn raw(&self, inst: &Instance, m: &Matching) -> Result<Vec<Option<usize>>, OracleError> {
        m.check_shape(inst)?;
        let raw: Vec<Option<usize>> = m
            .assignment()
            .iter()
            .map(|slot| slot.filter(|&b| !inst.is_last_resort(b)))
            .collect();
        let mut used = vec![0u32; self.copies.len()];
        for (p, slot) in raw.iter().enumerate() {
            if let Some(b) = *slot {
                if !self.lists[p].iter().any(|&(c, _)| c == b) {
                    return Err(MatchingError::NotInList {
                        person: inst.person_id(p).to_string(),
                        item: inst.item(b).id.clone(),
                    }
                    .into());
                }
                used[b] += 1;
                if used[b] > self.copies[b] {
                    return Err(MatchingError::OverCapacity {
                        item: inst.item(b).id.clone(),
                        used: used[b],
                        copies: self.copies[b],
                    }
                    .into());
                }
            }
        }
        Ok(raw)
    }

    fn cost_of(&self, raw: &[Option<usize>]) -> u64 {
        raw.iter().flatten().map(|&b| self.cost[b]).sum()
    }

    /// Calls `visit` on every matching; with `all_matched`, only those placing
    /// every person on a real item. Each person takes the next free clone of
    /// their item, so clone permutations are not repeated.
    fn enumerate(&self, all_matched: bool, visit: &mut dyn FnMut(&[Option<usize>])) {
        let mut used = vec![0u32; self.copies.len()];
        let mut cur = vec![None; self.num_people()];
        self.enumerate_from(0, all_matched, &mut used, &mut cur, visit);
    }

    fn enumerate_from(
        &self,
        p: usize,
        all_matched: bool,
        used: &mut [u32],
        cur: &mut [Option<usize>],
        visit: &mut dyn FnMut(&[Option<usize>]),
    ) {
        if p == self.num_people() {
            visit(cur);
            return;
        }
        if !all_matched {
            cur[p] = None;
            self.enumerate_from(p + 1, all_matched, used, cur, visit);
        }
        for &(b, _) in &self.lists[p] {
            if used[b] < self.copies[b] {
                used[b] += 1;
                cur[p] = Some(b);
                self.enumerate_from(p + 1, all_matched, used, cur, visit);
                used[b] -= 1;
            }
        }
        cur[p] = None;
    }

    /// Whether some matching is preferred to `raw` by more people than prefer
    /// `raw`. Searches rivals person by person, abandoning a branch once even
    /// all remaining people improving could not make the balance positive.
    fn beaten(&self, raw: &[Option<usize>]) -> bool {
        let n = self.num_people();
        let ranks: Vec<usize> = (0..n).map(|p| self.rank(p, raw[p])).collect();
        let mut can_gain = vec![0i64; n + 1];
        for p in (0..n).rev() {
            let improves = self.lists[p].iter().any(|&(b, r)| r < ranks[p] && self.copies[b] > 0);
            can_gain[p] = can_gain[p + 1] + improves as i64;
        }
        let mut used = vec![0u32; self.copies.len()];
        self.beat_from(0, 0, &ranks, &can_gain, &mut used)
    }

    fn beat_from(&self, p: usize, score: i64, ranks: &[usize], can_gain: &[i64], used: &mut [u32]) -> bool {
        if score + can_gain[p] <= 0 {
            return false;
        }
        if p == self.num_people() {
            return true;
        }
        for &(b, r) in &self.lists[p] {
            if used[b] < self.copies[b] {
                let delta = match r.cmp(&ranks[p]) {
                    std::cmp::Ordering::Less => 1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => -1,
                };
                used[b] += 1;
                let found = self.beat_from(p + 1, score + delta, ranks, can_gain, used);
                used[b] -= 1;
                if found {
                    return true;
                }
            }
        }
        let delta = if ranks[p] == usize::MAX { 0 } else { -1 };
        self.beat_from(p + 1, score + delta, ranks, can_gain, used)
    }

    fn cardinality(raw: &[Option<usize>]) -> usize {
        raw.iter().flatten().count()
    }

    /// All matchings sorted by `key`, then enumeration order; the first
    /// unbeaten one.
    fn first_popular<K: Ord>(
        &self,
        all_matched: bool,
        key: impl Fn(&[Option<usize>]) -> K,
    ) -> Option<Vec<Option<usize>>> {
        let mut all = Vec::new();
        self.enumerate(all_matched, &mut |m| all.push(m.to_vec()));
        let mut keyed: Vec<(K, usize)> = all.iter().enumerate().map(|(i, m)| (key(m), i)).collect();
        keyed.sort();
        keyed
            .into_iter()
            .map(|(_, i)| &all[i])
            .find(|m| !self.beaten(m))
            .cloned()
    }
}

fn to_matching(inst: &Instance, raw: Vec<Option<usize>>) -> Matching {
    Matching::new(inst, raw).expect("enumerated matchings respect lists and copies")
}

/// Every matching of `inst`; people may sit on their last resort.
pub fn enumerate_matchings(inst: &Instance, limits: &OracleLimits) -> Result<Vec<Matching>, OracleError> {
    let view = View::new(inst)?;
    view.guard(limits)?;
    let mut out = Vec::new();
    view.enumerate(false, &mut |m| out.push(to_matching(inst, m.to_vec())));
    Ok(out)
}

/// Popularity from the definition: no rival matching wins the vote.
pub fn brute_is_popular(inst: &Instance, m: &Matching, limits: &OracleLimits) -> Result<bool, OracleError> {
    let view = View::new(inst)?;
    view.guard(limits)?;
    let raw = view.raw(inst, m)?;
    Ok(!view.beaten(&raw))
}

/// `#people preferring m1 − #people preferring m2`, computed independently.
pub fn brute_compare(inst: &Instance, m1: &Matching, m2: &Matching) -> Result<i64, OracleError> {
    let view = View::new(inst)?;
    let (r1, r2) = (view.raw(inst, m1)?, view.raw(inst, m2)?);
    Ok((0..view.num_people())
        .map(|p| match view.rank(p, r1[p]).cmp(&view.rank(p, r2[p])) {
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => -1,
        })
        .sum())
}

/// Every popular matching, in enumeration order.
pub fn popular_matchings(inst: &Instance, limits: &OracleLimits) -> Result<Vec<Matching>, OracleError> {
    let view = View::new(inst)?;
    view.guard(limits)?;
    let mut out = Vec::new();
    view.enumerate(false, &mut |m| {
        if !view.beaten(m) {
            out.push(m.to_vec());
        }
    });
    Ok(out.into_iter().map(|m| to_matching(inst, m)).collect())
}

/// Cheapest popular matching, ties broken by enumeration order.
pub fn brute_min_cost_popular(inst: &Instance, limits: &OracleLimits) -> Result<Option<BruteSolution>, OracleError> {
    let view = View::new(inst)?;
    view.guard(limits)?;
    Ok(view.first_popular(false, |m| view.cost_of(m)).map(|raw| BruteSolution {
        cost: view.cost_of(&raw),
        matching: to_matching(inst, raw),
    }))
}

/// Cheapest popular matching among those of maximum cardinality.
pub fn brute_min_cost_max_card_popular(
    inst: &Instance,
    limits: &OracleLimits,
) -> Result<Option<BruteSolution>, OracleError> {
    let view = View::new(inst)?;
    view.guard(limits)?;
    let found = view.first_popular(false, |m| (std::cmp::Reverse(View::cardinality(m)), view.cost_of(m)));
    Ok(found.map(|raw| BruteSolution {
        cost: view.cost_of(&raw),
        matching: to_matching(inst, raw),
    }))
}

/// Whether `copies` (over real items, in declaration order) admits a popular
/// matching that places every person on a real item.
pub fn admits_complete_popular(inst: &Instance, copies: &[u32], limits: &OracleLimits) -> Result<bool, OracleError> {
    let mut view = View::new(inst)?;
    let real: Vec<usize> = inst.real_items().collect();
    if copies.len() != real.len() {
        return Err(OracleError::CopyVectorLength {
            expected: real.len(),
            got: copies.len(),
        });
    }
    for (&b, &k) in real.iter().zip(copies) {
        view.copies[b] = k;
    }
    view.guard(limits)?;
    Ok(view.first_popular(true, |_| ()).is_some())
}

/// Cheapest copy vector over the real items of `inst` (its own copies are
/// ignored) admitting a popular matching that matches every person. Returns
/// the vector over real items in declaration order with its cost; ties go to
/// the lexicographically smallest vector.
pub fn brute_min_cost_popular_instance(
    inst: &Instance,
    limits: &OracleLimits,
) -> Result<Option<(Vec<u32>, u64)>, OracleError> {
    let mut view = View::new(inst)?;
    if view.num_people() > limits.max_people {
        return Err(OracleError::GuardExceeded {
            what: "number of people",
            size: view.num_people(),
            limit: limits.max_people,
        });
    }
    let real: Vec<usize> = inst.real_items().collect();
    let bound: Vec<u32> = real
        .iter()
        .map(|&b| view.lists.iter().filter(|l| l.iter().any(|&(c, _)| c == b)).count() as u32)
        .collect();
    let mut vectors: Vec<(u64, Vec<u32>)> = copy_vectors(&bound, limits)?
        .into_iter()
        .map(|v| (real.iter().zip(&v).map(|(&b, &k)| view.cost[b] * k as u64).sum(), v))
        .collect();
    vectors.sort();
    let n = view.num_people();
    for (cost, vector) in vectors {
        if vector.iter().map(|&k| k as usize).sum::<usize>() < n {
            continue;
        }
        for (&b, &k) in real.iter().zip(&vector) {
            view.copies[b] = k;
        }
        view.guard(limits)?;
        if view.first_popular(true, |_| ()).is_some() {
            return Ok(Some((vector, cost)));
        }
    }
    Ok(None)
}

/// Cheapest extra-copy vector (over all items, zero on last resorts) under
/// which some popular matching exists; with `perfect`, one placing every
/// person on a real item. At most one extra copy per person listing an item.
/// Vectors are ranked by cost, then number of copies, then reversed
/// lexicographic order.
pub fn brute_min_cost_augmentation(
    inst: &Instance,
    perfect: bool,
    limits: &OracleLimits,
) -> Result<Option<(Vec<u32>, u64)>, OracleError> {
    let mut view = View::new(inst)?;
    let real: Vec<usize> = inst.real_items().collect();
    let base: Vec<u32> = real.iter().map(|&b| view.copies[b]).collect();
    let bound: Vec<u32> = real
        .iter()
        .map(|&b| view.lists.iter().filter(|l| l.iter().any(|&(c, _)| c == b)).count() as u32)
        .collect();
    let vectors = copy_vectors(&bound, limits)?;
    let mut keyed: Vec<(u64, u32, std::cmp::Reverse<Vec<u32>>)> = vectors
        .into_iter()
        .map(|v| {
            let cost = real.iter().zip(&v).map(|(&b, &k)| view.cost[b] * k as u64).sum();
            (cost, v.iter().sum(), std::cmp::Reverse(v))
        })
        .collect();
    keyed.sort();
    for (cost, _, std::cmp::Reverse(v)) in keyed {
        for (i, &b) in real.iter().enumerate() {
            view.copies[b] = base[i] + v[i];
        }
        view.guard(limits)?;
        if view.first_popular(perfect, |_| ()).is_some() {
            let mut extra = vec![0u32; inst.num_items()];
            for (&b, &k) in real.iter().zip(&v) {
                extra[b] = k;
            }
            return Ok(Some((extra, cost)));
        }
    }
    Ok(None)
}

/// Every vector `v` with `0 <= v[i] <= bound[i]`, in lexicographic order.
fn copy_vectors(bound: &[u32], limits: &OracleLimits) -> Result<Vec<Vec<u32>>, OracleError> {
    let space = bound
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k as usize + 1))
        .unwrap_or(usize::MAX);
    if space > limits.max_vectors {
        return Err(OracleError::GuardExceeded {
            what: "number of copy vectors",
            size: space,
            limit: limits.max_vectors,
        });
    }
    let mut out = Vec::with_capacity(space);
    let mut cur = vec![0u32; bound.len()];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..cur.len()).rev().find(|&i| cur[i] < bound[i]) else {
            return Ok(out);
        };
        cur[i] += 1;
        for c in &mut cur[i + 1..] {
            *c = 0;
        }
    }
}

/// Labels of the rank-1 graph computed on the clone expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloneLabels {
    pub person: Vec<Label>,
    /// Label of every clone, grouped by item.
    pub clones: Vec<Vec<Label>>,
    pub max_matching: usize,
    pub odd: usize,
    pub even: usize,
    pub unreachable: usize,
}

impl CloneLabels {
    /// The common label of an item's clones, if they agree.
    pub fn item(&self, b: usize) -> Option<Label> {
        let first = *self.clones[b].first()?;
        self.clones[b].iter().all(|&l| l == first).then_some(first)
    }
}

/// Rank-1 labels on the clone expansion; the maximum matching is grown with
/// simple augmenting paths trying people in `order`.
pub fn clone_rank1_labels(inst: &Instance, order: &[usize], limits: &OracleLimits) -> Result<CloneLabels, OracleError> {
    let n = inst.num_people();
    if n > limits.max_people {
        return Err(OracleError::GuardExceeded {
            what: "number of people",
            size: n,
            limit: limits.max_people,
        });
    }
    // Clone vertices of every item, last resorts included.
    let mut clone_of: Vec<Vec<usize>> = Vec::with_capacity(inst.num_items());
    let mut total = 0usize;
    for b in 0..inst.num_items() {
        let k = inst.item(b).copies as usize;
        clone_of.push((total..total + k).collect());
        total += k;
    }
    if total > limits.max_clones + n {
        return Err(OracleError::GuardExceeded {
            what: "number of item clones",
            size: total,
            limit: limits.max_clones + n,
        });
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            let top = inst.groups(p).first().map(Vec::as_slice).unwrap_or(&[]);
            top.iter().flat_map(|&b| clone_of[b].iter().copied()).collect()
        })
        .collect();
    let mut mate_p: Vec<Option<usize>> = vec![None; n];
    let mut mate_c: Vec<Option<usize>> = vec![None; total];
    for &p in order {
        let mut seen = vec![false; total];
        kuhn(p, &adj, &mut mate_p, &mut mate_c, &mut seen);
    }
    let max_matching = mate_p.iter().flatten().count();

    // Vertices 0..n are people, n.. are clones.
    let mut clone_adj = vec![Vec::new(); total];
    for (p, list) in adj.iter().enumerate() {
        for &c in list {
            clone_adj[c].push(p);
        }
    }
    let v = n + total;
    let mut dist: Vec<Option<usize>> = vec![None; v];
    let mut queue = VecDeque::new();
    for p in 0..n {
        if mate_p[p].is_none() {
            dist[p] = Some(0);
            queue.push_back(p);
        }
    }
    for c in 0..total {
        if mate_c[c].is_none() {
            dist[n + c] = Some(0);
            queue.push_back(n + c);
        }
    }
    while let Some(x) = queue.pop_front() {
        let d = dist[x].expect("queued vertices are labelled");
        let (neighbors, mate): (Vec<usize>, Option<usize>) = if x < n {
            (adj[x].iter().map(|&c| n + c).collect(), mate_p[x].map(|c| n + c))
        } else {
            (clone_adj[x - n].clone(), mate_c[x - n])
        };
        let next: Vec<usize> = if d.is_multiple_of(2) {
            neighbors.into_iter().filter(|&y| Some(y) != mate).collect()
        } else {
            mate.into_iter().collect()
        };
        for y in next {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    let label = |x: usize| match dist[x] {
        None => Label::Unreachable,
        Some(d) if d.is_multiple_of(2) => Label::Even,
        Some(_) => Label::Odd,
    };
    let person: Vec<Label> = (0..n).map(label).collect();
    let clones: Vec<Vec<Label>> = clone_of
        .iter()
        .map(|cs| cs.iter().map(|&c| label(n + c)).collect())
        .collect();
    let all = (0..v).map(label);
    let (mut odd, mut even, mut unreachable) = (0, 0, 0);
    for l in all {
        match l {
            Label::Odd => odd += 1,
            Label::Even => even += 1,
            Label::Unreachable => unreachable += 1,
        }
    }
    Ok(CloneLabels {
        person,
        clones,
        max_matching,
        odd,
        even,
        unreachable,
    })
}

fn kuhn(
    p: usize,
    adj: &[Vec<usize>],
    mate_p: &mut [Option<usize>],
    mate_c: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &c in &adj[p] {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        let free = match mate_c[c] {
            None => true,
            Some(q) => kuhn(q, adj, mate_p, mate_c, seen),
        };
        if free {
            mate_p[p] = Some(c);
            mate_c[c] = Some(p);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    const INTRO: &str = "item b1 copies=1 cost=3\nitem b2 copies=1 cost=2\nitem b3 copies=1 cost=1\n\
        person a1 : b1 > b2 > b3\nperson a2 : b1 > b2 > b3\nperson a3 : b1 > b2 > b3\n";

    fn lr(text: &str) -> Instance {
        parse_instance(text).unwrap().add_last_resorts().unwrap()
    }

    fn limits() -> OracleLimits {
        OracleLimits::default()
    }

    /// Independent recursive count of matchings with item capacities.
    fn count(lists: &[Vec<usize>], copies: &mut Vec<u32>, p: usize) -> usize {
        if p == lists.len() {
            return 1;
        }
        let mut total = count(lists, copies, p + 1);
        for &b in &lists[p] {
            if copies[b] > 0 {
                copies[b] -= 1;
                total += count(lists, copies, p + 1);
                copies[b] += 1;
            }
        }
        total
    }

    #[test]
    fn enumeration_counts() {
        let single = lr("item b copies=1 cost=0\nperson a : b\n");
        assert_eq!(enumerate_matchings(&single, &limits()).unwrap().len(), 2);

        let empty = lr("item b copies=1 cost=0\n");
        assert_eq!(enumerate_matchings(&empty, &limits()).unwrap().len(), 1);

        let intro = lr(INTRO);
        let expected = count(&[vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]], &mut vec![1, 1, 1], 0);
        let all = enumerate_matchings(&intro, &limits()).unwrap();
        assert_eq!(all.len(), expected);
        let mut unique = all.clone();
        unique.sort_by_key(|m| m.assignment().to_vec());
        unique.dedup();
        assert_eq!(unique.len(), all.len());
    }

    #[test]
    fn intro_popularity() {
        let inst = lr(INTRO);
        let m1 = Matching::from_pairs(&inst, [("a1", Some("b1")), ("a2", Some("b2")), ("a3", Some("b3"))]).unwrap();
        assert!(!brute_is_popular(&inst, &m1, &limits()).unwrap());
        assert_eq!(brute_min_cost_popular(&inst, &limits()).unwrap(), None);
        assert!(popular_matchings(&inst, &limits()).unwrap().is_empty());

        let two = inst.with_extra_copies(&[0, 1, 0, 0, 0, 0]).unwrap();
        let m = Matching::from_pairs(&two, [("a1", Some("b1")), ("a2", Some("b2")), ("a3", Some("b2"))]).unwrap();
        assert!(brute_is_popular(&two, &m, &limits()).unwrap());
        let best = brute_min_cost_popular(&two, &limits()).unwrap().unwrap();
        assert_eq!(best.cost, 7);
    }

    #[test]
    fn single_pair() {
        let inst = lr("item b copies=1 cost=5\nperson a : b\n");
        let m = Matching::from_pairs(&inst, [("a", Some("b"))]).unwrap();
        assert!(brute_is_popular(&inst, &m, &limits()).unwrap());
        assert_eq!(brute_min_cost_popular(&inst, &limits()).unwrap().unwrap().cost, 5);
        assert_eq!(
            brute_min_cost_popular_instance(&inst, &limits()).unwrap(),
            Some((vec![1], 5))
        );
    }

    #[test]
    fn compare_matches_hand_count() {
        let inst = lr(INTRO);
        let m1 = Matching::from_pairs(&inst, [("a1", Some("b1")), ("a2", Some("b2")), ("a3", Some("b3"))]).unwrap();
        let m2 = Matching::from_pairs(&inst, [("a1", None), ("a2", Some("b1")), ("a3", Some("b2"))]).unwrap();
        assert_eq!(brute_compare(&inst, &m1, &m2).unwrap(), -1);
    }

    #[test]
    fn guards_are_enforced() {
        let inst = lr("item b copies=20 cost=0\nperson a : b\n");
        assert!(matches!(
            brute_min_cost_popular(&inst, &limits()),
            Err(OracleError::GuardExceeded { .. })
        ));
        let bare = parse_instance("item b copies=1 cost=0\nperson a : b\n").unwrap();
        assert_eq!(
            enumerate_matchings(&bare, &limits()).unwrap_err(),
            OracleError::LastResortsRequired
        );
    }

    #[test]
    fn clone_labels_of_intro() {
        let inst = parse_instance(INTRO).unwrap();
        let labels = clone_rank1_labels(&inst, &[0, 1, 2], &limits()).unwrap();
        assert_eq!(labels.item(0), Some(Label::Odd));
        assert_eq!(labels.item(1), Some(Label::Even));
        assert!(labels.person.iter().all(|&l| l == Label::Even));
        assert_eq!(labels.max_matching, 1);
        assert_eq!(labels.max_matching * 2, 2 * labels.odd + labels.unreachable);
    }

    #[test]
    fn clone_labels_of_doubled_item() {
        let inst = parse_instance("item b copies=2 cost=0\nperson a1 : b\nperson a2 : b\n").unwrap();
        let labels = clone_rank1_labels(&inst, &[1, 0], &limits()).unwrap();
        assert_eq!(labels.item(0), Some(Label::Unreachable));
        assert_eq!(labels.person, vec![Label::Unreachable; 2]);
        assert_eq!(labels.unreachable, 4);
    }

    #[test]
    fn pruned_search_agrees_with_pairwise_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for _ in 0..300 {
            let items = rng.gen_range(1..=4);
            let mut builder = Instance::builder();
            for b in 0..items {
                builder = builder.item(format!("b{b}"), rng.gen_range(1..=2), 0);
            }
            for p in 0..rng.gen_range(1..=5) {
                let groups: Vec<Vec<String>> = (0..items)
                    .filter(|_| rng.gen_bool(0.6))
                    .map(|b| vec![format!("b{b}")])
                    .collect();
                builder = builder.person(format!("a{p}"), groups);
            }
            let inst = builder.build().unwrap().with_last_resorts();
            let all = enumerate_matchings(&inst, &limits()).unwrap();
            for m in &all {
                let scan = all.iter().all(|rival| brute_compare(&inst, rival, m).unwrap() <= 0);
                assert_eq!(
                    brute_is_popular(&inst, m, &limits()).unwrap(),
                    scan,
                    "{}",
                    inst.to_text()
                );
            }
        }
    }
}

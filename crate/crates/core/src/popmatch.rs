//! Popularity: pairwise comparison, the structural test, and min-cost popular
//! matchings.
//!
//! A matching is popular iff its rank-1 part is a maximum matching of the
//! rank-1 graph and every person holds an item of `f(a) ∪ s(a)`. The solver
//! builds the reduced graph from the rank-1 labels, keeps only the rank-1 pairs
//! landing on critical items, then matches the remaining people one at a time
//! along the cheapest augmenting path of a fully grown alternating tree.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::decomposition::{CheapestAugmenter, Decomposition, Label};
use crate::instance::{matching_cost, Instance, Matching, MatchingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PopError {
    #[error("last-resort items must be enabled")]
    LastResortsRequired,
    #[error(transparent)]
    InvalidMatching(#[from] MatchingError),
    #[error("cost bound for last-resort items overflows u64")]
    CostOverflow,
}

/// A popular matching together with its cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopularSolution {
    pub matching: Matching,
    pub cost: u64,
}

/// Bookkeeping of the second stage, one entry per augmentation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveTrace {
    /// Matched people in the reduced graph before the first augmentation.
    pub initial_matched: usize,
    /// Matched people after each augmentation.
    pub matched_after: Vec<usize>,
    /// Terminal item of each augmentation.
    pub terminals: Vec<usize>,
}

fn require_last_resorts(inst: &Instance) -> Result<(), PopError> {
    if inst.last_resort_enabled() {
        Ok(())
    } else {
        Err(PopError::LastResortsRequired)
    }
}

fn rank_or_worst(inst: &Instance, p: usize, slot: Option<usize>) -> usize {
    slot.and_then(|b| inst.rank(p, b)).unwrap_or(usize::MAX)
}

fn check(inst: &Instance, m: &Matching) -> Result<(), PopError> {
    m.check_shape(inst)?;
    for (p, slot) in m.assignment().iter().enumerate() {
        if let Some(b) = *slot {
            if inst.rank(p, b).is_none() {
                return Err(MatchingError::NotInList {
                    person: inst.person_id(p).to_string(),
                    item: inst.item(b).id.clone(),
                }
                .into());
            }
        }
    }
    Ok(())
}

/// `#people preferring m1 − #people preferring m2`.
pub fn compare(inst: &Instance, m1: &Matching, m2: &Matching) -> Result<i64, PopError> {
    check(inst, m1)?;
    check(inst, m2)?;
    let mut score = 0i64;
    for p in 0..inst.num_people() {
        let r1 = rank_or_worst(inst, p, m1.get(p));
        let r2 = rank_or_worst(inst, p, m2.get(p));
        match r1.cmp(&r2) {
            Ordering::Less => score += 1,
            Ordering::Greater => score -= 1,
            Ordering::Equal => {}
        }
    }
    Ok(score)
}

fn is_popular_in(inst: &Instance, d: &Decomposition, m: &Matching) -> bool {
    let rank1_size = (0..inst.num_people())
        .filter(|&p| m.get(p).is_some_and(|b| d.fs.f[p].contains(&b)))
        .count();
    if rank1_size != d.rank1_matching.size() {
        return false;
    }
    (0..inst.num_people()).all(|p| {
        m.get(p)
            .is_some_and(|b| d.fs.f[p].contains(&b) || d.fs.s[p].contains(&b))
    })
}

/// Structural popularity test.
pub fn is_popular(inst: &Instance, m: &Matching) -> Result<bool, PopError> {
    require_last_resorts(inst)?;
    check(inst, m)?;
    Ok(is_popular_in(inst, &Decomposition::compute(inst), m))
}

fn solve_with_costs(inst: &Instance, cost: &[u64], mut trace: Option<&mut SolveTrace>) -> Option<Matching> {
    let d = Decomposition::compute(inst);
    let g = &d.reduced;
    // Rank-1 pairs of odd people are dropped; the rest are edges of `g`.
    let mut m = d.rank1_matching.clone();
    for p in 0..inst.num_people() {
        if d.labels.person(p) == Label::Odd {
            m.unmatch(p);
        }
    }
    if let Some(t) = trace.as_deref_mut() {
        t.initial_matched = m.size();
    }
    let mut augmenter = CheapestAugmenter::new(g, &m);
    for p in 0..inst.num_people() {
        if m.mate(p).is_some() {
            continue;
        }
        let before = m.size();
        let aug = augmenter.augment(&mut m, p, cost)?;
        debug_assert_eq!(m.size(), before + 1);
        if let Some(t) = trace.as_deref_mut() {
            t.matched_after.push(m.size());
            t.terminals.push(aug.terminal);
        }
    }
    Some(m.to_matching(inst))
}

/// A minimum-cost popular matching, or `None` when the instance admits no
/// popular matching.
pub fn min_cost_popular(inst: &Instance) -> Result<Option<PopularSolution>, PopError> {
    min_cost_popular_traced(inst).map(|(sol, _)| sol)
}

/// [`min_cost_popular`] together with the second-stage trace.
pub fn min_cost_popular_traced(inst: &Instance) -> Result<(Option<PopularSolution>, SolveTrace), PopError> {
    require_last_resorts(inst)?;
    let cost: Vec<u64> = inst.items().iter().map(|i| i.cost).collect();
    let mut trace = SolveTrace::default();
    let sol = solve_with_costs(inst, &cost, Some(&mut trace))
        .map(|matching| {
            let cost = matching_cost(inst, &matching)?;
            Ok::<_, PopError>(PopularSolution { matching, cost })
        })
        .transpose()?;
    Ok((sol, trace))
}

/// Whether any popular matching exists.
pub fn admits_popular(inst: &Instance) -> Result<bool, PopError> {
    require_last_resorts(inst)?;
    let zero = vec![0; inst.num_items()];
    Ok(solve_with_costs(inst, &zero, None).is_some())
}

/// Among popular matchings leaving the fewest people on their last resort,
/// one of minimum cost. The reported cost is the true cost.
pub fn min_cost_max_card_popular(inst: &Instance) -> Result<Option<PopularSolution>, PopError> {
    require_last_resorts(inst)?;
    let total = inst
        .real_items()
        .try_fold(0u64, |acc, b| {
            let item = inst.item(b);
            (item.copies as u64)
                .checked_mul(item.cost)
                .and_then(|c| acc.checked_add(c))
        })
        .ok_or(PopError::CostOverflow)?;
    let penalty = total.checked_add(1).ok_or(PopError::CostOverflow)?;
    let cost: Vec<u64> = (0..inst.num_items())
        .map(|b| {
            if inst.is_last_resort(b) {
                penalty
            } else {
                inst.item(b).cost
            }
        })
        .collect();
    solve_with_costs(inst, &cost, None)
        .map(|matching| {
            let cost = matching_cost(inst, &matching)?;
            Ok(PopularSolution { matching, cost })
        })
        .transpose()
}

/// The largest `compare(m', m)` over all matchings `m'`, with a maximizer.
///
/// Solved as a min-cost assignment where person `a` pays 0, 1 or 2 for an item
/// they like better than, as much as, or less than `m(a)`.
pub fn popularity_margin(inst: &Instance, m: &Matching) -> Result<(i64, Matching), PopError> {
    require_last_resorts(inst)?;
    check(inst, m)?;
    let n = inst.num_people();
    let k = inst.num_items();
    let mut net = FlowNetwork::new(n + k + 2);
    let (source, sink) = (n + k, n + k + 1);
    for p in 0..n {
        net.add_edge(source, p, 1, 0);
        let current = rank_or_worst(inst, p, m.get(p));
        for (r, group) in inst.groups(p).iter().enumerate() {
            let c = match r.cmp(&current) {
                Ordering::Less => 0,
                Ordering::Equal => 1,
                Ordering::Greater => 2,
            };
            for &b in group {
                net.add_edge(p, n + b, 1, c);
            }
        }
    }
    for b in 0..k {
        net.add_edge(n + b, sink, inst.item(b).copies as i64, 0);
    }
    let (flow, cost) = net.min_cost_flow(source, sink, n as i64);
    debug_assert_eq!(flow, n as i64, "last resorts make every person assignable");
    let mut assignment = vec![None; n];
    for (p, slot) in assignment.iter_mut().enumerate() {
        *slot = net.saturated_target(p).map(|v| v - n);
    }
    let best = Matching::new(inst, assignment)?;
    Ok((n as i64 - cost, best))
}

/// A matching more popular than `m`, if one exists.
pub fn more_popular_witness(inst: &Instance, m: &Matching) -> Result<Option<Matching>, PopError> {
    let (margin, best) = popularity_margin(inst, m)?;
    Ok((margin > 0).then_some(best))
}

struct FlowEdge {
    to: usize,
    cap: i64,
    cost: i64,
}

/// Successive shortest paths with Dijkstra on reduced costs.
struct FlowNetwork {
    edges: Vec<FlowEdge>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) {
        self.out[from].push(self.edges.len());
        self.edges.push(FlowEdge { to, cap, cost });
        self.out[to].push(self.edges.len());
        self.edges.push(FlowEdge {
            to: from,
            cap: 0,
            cost: -cost,
        });
    }

    /// First forward edge out of `v` carrying flow, towards a non-source node.
    fn saturated_target(&self, v: usize) -> Option<usize> {
        self.out[v]
            .iter()
            .filter(|&&e| e % 2 == 0)
            .find(|&&e| self.edges[e].cap == 0)
            .map(|&e| self.edges[e].to)
    }

    fn min_cost_flow(&mut self, s: usize, t: usize, limit: i64) -> (i64, i64) {
        let nodes = self.out.len();
        let mut potential = vec![0i64; nodes];
        let (mut flow, mut cost) = (0i64, 0i64);
        while flow < limit {
            let mut dist = vec![i64::MAX; nodes];
            let mut via = vec![usize::MAX; nodes];
            let mut heap = BinaryHeap::new();
            dist[s] = 0;
            heap.push(std::cmp::Reverse((0i64, s)));
            while let Some(std::cmp::Reverse((d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for &e in &self.out[v] {
                    let edge = &self.edges[e];
                    if edge.cap == 0 {
                        continue;
                    }
                    let nd = d + edge.cost + potential[v] - potential[edge.to];
                    if nd < dist[edge.to] {
                        dist[edge.to] = nd;
                        via[edge.to] = e;
                        heap.push(std::cmp::Reverse((nd, edge.to)));
                    }
                }
            }
            if dist[t] == i64::MAX {
                break;
            }
            for v in 0..nodes {
                if dist[v] != i64::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let e = via[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                cost += push * self.edges[e].cost;
                v = self.edges[e ^ 1].to;
            }
            flow += push;
        }
        (flow, cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    fn intro() -> Instance {
        parse_instance(
            "item b1 copies=1 cost=3\nitem b2 copies=1 cost=2\nitem b3 copies=1 cost=1\n\
             person a1 : b1 > b2 > b3\nperson a2 : b1 > b2 > b3\nperson a3 : b1 > b2 > b3\n",
        )
        .unwrap()
        .add_last_resorts()
        .unwrap()
    }

    fn pairs<'a>(inst: &Instance, p: &[(&'a str, Option<&'a str>)]) -> Matching {
        Matching::from_pairs(inst, p.iter().copied()).unwrap()
    }

    #[test]
    fn intro_cycle_of_comparisons() {
        let inst = intro();
        let m1 = pairs(&inst, &[("a1", Some("b1")), ("a2", Some("b2")), ("a3", Some("b3"))]);
        let m2 = pairs(&inst, &[("a1", None), ("a2", Some("b1")), ("a3", Some("b2"))]);
        let m3 = pairs(&inst, &[("a1", Some("b2")), ("a2", None), ("a3", Some("b1"))]);
        assert_eq!(compare(&inst, &m1, &m2).unwrap(), -1);
        assert_eq!(compare(&inst, &m2, &m3).unwrap(), -1);
        assert_eq!(compare(&inst, &m1, &m1).unwrap(), 0);
        assert_eq!(compare(&inst, &m2, &m1).unwrap(), 1);
        assert!(!is_popular(&inst, &m1).unwrap());
    }

    #[test]
    fn intro_with_extra_b2_is_popular() {
        let inst = intro();
        let mut extra = vec![0; inst.num_items()];
        extra[1] = 1;
        let two = inst.with_extra_copies(&extra).unwrap();
        let m = pairs(&two, &[("a1", Some("b1")), ("a2", Some("b2")), ("a3", Some("b2"))]);
        assert!(is_popular(&two, &m).unwrap());
        let sol = min_cost_popular(&two).unwrap().unwrap();
        assert_eq!(sol.cost, 7);
        assert!(is_popular(&two, &sol.matching).unwrap());
        assert_eq!(sol.matching.cardinality(&two), 3);
    }

    #[test]
    fn single_pair_is_popular() {
        let inst = parse_instance("item b copies=1 cost=4\nperson a : b\n")
            .unwrap()
            .add_last_resorts()
            .unwrap();
        let m = pairs(&inst, &[("a", Some("b"))]);
        assert!(is_popular(&inst, &m).unwrap());
        assert_eq!(min_cost_popular(&inst).unwrap().unwrap().cost, 4);
    }

    #[test]
    fn intro_has_no_popular_matching() {
        let inst = intro();
        assert_eq!(min_cost_popular(&inst).unwrap(), None);
        assert!(!admits_popular(&inst).unwrap());
        assert_eq!(min_cost_max_card_popular(&inst).unwrap(), None);
    }

    #[test]
    fn requires_last_resorts() {
        let inst = parse_instance("item b copies=1 cost=4\nperson a : b\n").unwrap();
        assert_eq!(min_cost_popular(&inst), Err(PopError::LastResortsRequired));
    }

    #[test]
    fn max_card_prefers_matching_more_people() {
        // a1 can stay alone on c (rank 1, cost 5) or ... both a1 and a2 top-list
        // b; b has one copy. a2's second choice is c.
        let inst = parse_instance("item b copies=1 cost=0\nitem c copies=1 cost=5\nperson a1 : b\nperson a2 : b > c\n")
            .unwrap()
            .add_last_resorts()
            .unwrap();
        let cheap = min_cost_popular(&inst).unwrap().unwrap();
        assert_eq!(cheap.cost, 0);
        assert_eq!(cheap.matching.cardinality(&inst), 1);
        let full = min_cost_max_card_popular(&inst).unwrap().unwrap();
        assert_eq!(full.cost, 5);
        assert_eq!(full.matching.cardinality(&inst), 2);
    }

    #[test]
    fn witness_beats_unpopular_matching() {
        let inst = intro();
        let m1 = pairs(&inst, &[("a1", Some("b1")), ("a2", Some("b2")), ("a3", Some("b3"))]);
        let w = more_popular_witness(&inst, &m1).unwrap().unwrap();
        assert!(compare(&inst, &w, &m1).unwrap() > 0);
        let (margin, _) = popularity_margin(&inst, &m1).unwrap();
        assert_eq!(margin, compare(&inst, &w, &m1).unwrap());
    }

    #[test]
    fn trace_grows_by_one() {
        let inst = parse_instance(
            "item b1 copies=1 cost=3\nitem b2 copies=2 cost=2\nitem b3 copies=1 cost=1\n\
             person a1 : b1 > b2 > b3\nperson a2 : b1 > b2 > b3\nperson a3 : b1 > b2 > b3\n",
        )
        .unwrap()
        .add_last_resorts()
        .unwrap();
        let (sol, trace) = min_cost_popular_traced(&inst).unwrap();
        assert_eq!(sol.unwrap().cost, 7);
        let mut prev = trace.initial_matched;
        for &after in &trace.matched_after {
            assert_eq!(after, prev + 1);
            prev = after;
        }
        assert_eq!(prev, 3);
    }
}

//! Rank-1 structure of an instance.
//!
//! Maximum matchings here are capacitated: item `b` may be matched to up to
//! `copies(b)` people. They are found by single-source augmenting paths, the
//! unit-capacity Ford–Fulkerson on the network `s → person → item → t`.
//!
//! The odd/even/unreachable labeling works on the capacitated graph directly.
//! Every copy of an item would receive the same label in the cloned graph, so
//! one label per item suffices.

use std::collections::VecDeque;

use thiserror::Error;

use crate::instance::{Instance, Matching};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("matching is not maximum: an augmenting path exists")]
    NotMaximum,
    #[error("matching does not fit the graph")]
    Shape,
}

/// Gallai–Edmonds class of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Odd,
    Even,
    Unreachable,
}

impl Label {
    pub fn letter(self) -> char {
        match self {
            Label::Odd => 'O',
            Label::Even => 'E',
            Label::Unreachable => 'U',
        }
    }

    pub fn is_critical(self) -> bool {
        self != Label::Even
    }
}

/// A bipartite graph between the people and items of an instance, with item
/// capacities. Used for the rank-1 graph and for reduced graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    adj: Vec<Vec<usize>>,
    capacity: Vec<u32>,
}

impl BipartiteGraph {
    /// `adj[p]` lists the items adjacent to person `p` in search order.
    pub fn new(adj: Vec<Vec<usize>>, capacity: Vec<u32>) -> Self {
        debug_assert!(adj.iter().flatten().all(|&b| b < capacity.len()));
        BipartiteGraph { adj, capacity }
    }

    pub fn num_people(&self) -> usize {
        self.adj.len()
    }

    pub fn num_items(&self) -> usize {
        self.capacity.len()
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adj[p]
    }

    pub fn capacity(&self, b: usize) -> u32 {
        self.capacity[b]
    }

    pub fn has_edge(&self, p: usize, b: usize) -> bool {
        self.adj[p].contains(&b)
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Sorted `(person, item)` pairs.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(p, items)| items.iter().map(move |&b| (p, b)))
            .collect();
        out.sort_unstable();
        out
    }

    /// People adjacent to each item, in person order.
    pub fn item_adjacency(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.capacity.len()];
        for (p, items) in self.adj.iter().enumerate() {
            for &b in items {
                out[b].push(p);
            }
        }
        out
    }

    /// Same graph with a permuted search order, for producing alternative
    /// maximum matchings.
    pub fn reordered(&self, adj: Vec<Vec<usize>>) -> Self {
        debug_assert_eq!(adj.len(), self.adj.len());
        BipartiteGraph {
            adj,
            capacity: self.capacity.clone(),
        }
    }
}

/// A capacitated matching inside a [`BipartiteGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMatching {
    mate: Vec<Option<usize>>,
    load: Vec<u32>,
}

impl GraphMatching {
    pub fn empty(g: &BipartiteGraph) -> Self {
        GraphMatching {
            mate: vec![None; g.num_people()],
            load: vec![0; g.num_items()],
        }
    }

    /// Keeps those pairs of `m` that are edges of `g`.
    pub fn restrict(g: &BipartiteGraph, m: &Matching) -> Self {
        let mut out = GraphMatching::empty(g);
        for (p, slot) in m.assignment().iter().enumerate() {
            if let Some(b) = *slot {
                if g.has_edge(p, b) {
                    out.mate[p] = Some(b);
                    out.load[b] += 1;
                }
            }
        }
        out
    }

    pub fn mate(&self, p: usize) -> Option<usize> {
        self.mate[p]
    }

    pub fn mates(&self) -> &[Option<usize>] {
        &self.mate
    }

    pub fn load(&self, b: usize) -> u32 {
        self.load[b]
    }

    pub fn size(&self) -> usize {
        self.mate.iter().flatten().count()
    }

    pub fn unmatch(&mut self, p: usize) {
        if let Some(b) = self.mate[p].take() {
            self.load[b] -= 1;
        }
    }

    fn fits(&self, g: &BipartiteGraph) -> bool {
        self.mate.len() == g.num_people()
            && self.load.len() == g.num_items()
            && self
                .mate
                .iter()
                .enumerate()
                .all(|(p, slot)| slot.is_none_or(|b| g.has_edge(p, b)))
            && (0..g.num_items()).all(|b| self.load[b] <= g.capacity(b))
    }

    /// Converts to an instance-level matching; unmatched people go to their
    /// last resort when enabled.
    pub fn to_matching(&self, inst: &Instance) -> Matching {
        Matching::new(inst, self.mate.clone()).expect("graph edges are preference entries and loads respect copies")
    }
}

/// Per-search scratch space with O(1) reset.
struct Scratch {
    stamp: u32,
    person_seen: Vec<u32>,
    item_seen: Vec<u32>,
    parent_person: Vec<usize>,
    holders: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
}

impl Scratch {
    fn new(g: &BipartiteGraph, m: &GraphMatching) -> Self {
        let mut holders = vec![Vec::new(); g.num_items()];
        for (p, slot) in m.mate.iter().enumerate() {
            if let Some(b) = *slot {
                holders[b].push(p);
            }
        }
        Scratch {
            stamp: 0,
            person_seen: vec![0; g.num_people()],
            item_seen: vec![0; g.num_items()],
            parent_person: vec![usize::MAX; g.num_items()],
            holders,
            queue: VecDeque::new(),
        }
    }

    fn next_round(&mut self) {
        self.stamp += 1;
        self.queue.clear();
    }

    /// Rewires `m` along the search-tree path ending at item `end`, keeping
    /// `holders` in step. Every non-root person on the path was reached
    /// through their mate, so the person giving up an item is replaced by the
    /// one that reached them, and only `end` gains load.
    fn augment(&mut self, m: &mut GraphMatching, end: usize) {
        let mut b = end;
        m.load[b] += 1;
        loop {
            let p = self.parent_person[b];
            self.holders[b].push(p);
            match m.mate[p].replace(b) {
                Some(prev) => {
                    let h = &mut self.holders[prev];
                    let at = h.iter().position(|&q| q == p).expect("mate is a holder");
                    h.swap_remove(at);
                    b = prev;
                }
                None => break,
            }
        }
    }
}

/// Grows the alternating tree from free person `root` and returns the
/// reachable items that are below capacity, in discovery order. Parents are
/// left in `scratch`.
fn alternating_tree(
    g: &BipartiteGraph,
    m: &GraphMatching,
    root: usize,
    scratch: &mut Scratch,
    stop_at_first: bool,
) -> Vec<usize> {
    scratch.next_round();
    let stamp = scratch.stamp;
    let mut terminals = Vec::new();
    scratch.person_seen[root] = stamp;
    scratch.queue.push_back(root);
    while let Some(p) = scratch.queue.pop_front() {
        for &b in &g.adj[p] {
            if scratch.item_seen[b] == stamp || m.mate[p] == Some(b) {
                continue;
            }
            scratch.item_seen[b] = stamp;
            scratch.parent_person[b] = p;
            if m.load[b] < g.capacity[b] {
                terminals.push(b);
                if stop_at_first {
                    return terminals;
                }
            }
            for &q in &scratch.holders[b] {
                if scratch.person_seen[q] != stamp {
                    scratch.person_seen[q] = stamp;
                    scratch.queue.push_back(q);
                }
            }
        }
    }
    terminals
}

/// Extends `m` to a maximum matching of `g`, trying free people in `order`.
pub fn augment_to_maximum(g: &BipartiteGraph, mut m: GraphMatching, order: &[usize]) -> GraphMatching {
    let mut scratch = Scratch::new(g, &m);
    for &p in order {
        if m.mate[p].is_some() {
            continue;
        }
        let found = alternating_tree(g, &m, p, &mut scratch, true);
        if let Some(&end) = found.first() {
            scratch.augment(&mut m, end);
        }
    }
    m
}

/// Maximum capacitated matching of `g`, people tried in index order.
pub fn max_matching(g: &BipartiteGraph) -> GraphMatching {
    let order: Vec<usize> = (0..g.num_people()).collect();
    augment_to_maximum(g, GraphMatching::empty(g), &order)
}

/// Outcome of one cheapest-augmentation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Augmentation {
    pub terminal: usize,
    pub cost: u64,
}

/// Repeated cheapest augmentations against one matching, sharing scratch
/// space between calls. The matching must only change through
/// [`CheapestAugmenter::augment`] while the augmenter is in use.
pub struct CheapestAugmenter<'g> {
    g: &'g BipartiteGraph,
    scratch: Scratch,
}

impl<'g> CheapestAugmenter<'g> {
    pub fn new(g: &'g BipartiteGraph, m: &GraphMatching) -> Self {
        CheapestAugmenter {
            g,
            scratch: Scratch::new(g, m),
        }
    }

    /// Builds the complete alternating tree from free person `root` and
    /// augments towards the reachable non-full item of least `cost`, ties
    /// broken by lower item index. Among paths to that item the BFS-first one
    /// is used. Returns `None`, leaving `m` untouched, when no augmenting
    /// path exists.
    pub fn augment(&mut self, m: &mut GraphMatching, root: usize, cost: &[u64]) -> Option<Augmentation> {
        let terminals = alternating_tree(self.g, m, root, &mut self.scratch, false);
        let best = terminals.into_iter().min_by_key(|&b| (cost[b], b))?;
        self.scratch.augment(m, best);
        Some(Augmentation {
            terminal: best,
            cost: cost[best],
        })
    }
}

/// One-shot form of [`CheapestAugmenter::augment`].
pub fn augment_cheapest(g: &BipartiteGraph, m: &mut GraphMatching, root: usize, cost: &[u64]) -> Option<Augmentation> {
    CheapestAugmenter::new(g, m).augment(m, root, cost)
}

/// Labels all vertices of `g` with respect to maximum matching `m`.
///
/// Roots are the free people and the items below capacity. Even vertices
/// expand to every unlabeled neighbor; an odd item expands to the people it is
/// matched to and an odd person to their mate. Each vertex is labeled once.
/// Meeting an edge that closes an augmenting path yields
/// [`DecompositionError::NotMaximum`].
pub fn label_graph(g: &BipartiteGraph, m: &GraphMatching) -> Result<GeLabels, DecompositionError> {
    if !m.fits(g) {
        return Err(DecompositionError::Shape);
    }
    let n = g.num_people();
    let item_adj = g.item_adjacency();
    let mut holders = vec![Vec::new(); g.num_items()];
    for (p, slot) in m.mate.iter().enumerate() {
        if let Some(b) = *slot {
            holders[b].push(p);
        }
    }
    let mut person: Vec<Option<Label>> = vec![None; n];
    let mut item: Vec<Option<Label>> = vec![None; g.num_items()];

    // Vertices are numbered people first, then items.
    let mut queue = VecDeque::new();
    for (p, label) in person.iter_mut().enumerate() {
        if m.mate[p].is_none() {
            *label = Some(Label::Even);
            queue.push_back(p);
        }
    }
    for (b, label) in item.iter_mut().enumerate() {
        if m.load[b] < g.capacity[b] {
            *label = Some(Label::Even);
            queue.push_back(n + b);
        }
    }

    while let Some(v) = queue.pop_front() {
        if v < n {
            let p = v;
            match person[p] {
                Some(Label::Even) => {
                    for &b in &g.adj[p] {
                        match item[b] {
                            None => {
                                item[b] = Some(Label::Odd);
                                queue.push_back(n + b);
                            }
                            Some(Label::Even) => return Err(DecompositionError::NotMaximum),
                            _ => {}
                        }
                    }
                }
                Some(Label::Odd) => {
                    let b = m.mate[p].ok_or(DecompositionError::NotMaximum)?;
                    match item[b] {
                        None => {
                            item[b] = Some(Label::Even);
                            queue.push_back(n + b);
                        }
                        Some(Label::Odd) => return Err(DecompositionError::NotMaximum),
                        _ => {}
                    }
                }
                _ => unreachable!("only labeled vertices are queued"),
            }
        } else {
            let b = v - n;
            match item[b] {
                Some(Label::Even) => {
                    for &p in &item_adj[b] {
                        match person[p] {
                            None => {
                                person[p] = Some(Label::Odd);
                                queue.push_back(p);
                            }
                            Some(Label::Even) => return Err(DecompositionError::NotMaximum),
                            _ => {}
                        }
                    }
                }
                Some(Label::Odd) => {
                    for &p in &holders[b] {
                        match person[p] {
                            None => {
                                person[p] = Some(Label::Even);
                                queue.push_back(p);
                            }
                            Some(Label::Odd) => return Err(DecompositionError::NotMaximum),
                            _ => {}
                        }
                    }
                }
                _ => unreachable!("only labeled vertices are queued"),
            }
        }
    }

    Ok(GeLabels {
        person: person.into_iter().map(|l| l.unwrap_or(Label::Unreachable)).collect(),
        item: item.into_iter().map(|l| l.unwrap_or(Label::Unreachable)).collect(),
    })
}

/// Odd/even/unreachable class of every person and item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeLabels {
    pub person: Vec<Label>,
    pub item: Vec<Label>,
}

impl GeLabels {
    pub fn person(&self, p: usize) -> Label {
        self.person[p]
    }

    pub fn item(&self, b: usize) -> Label {
        self.item[b]
    }
}

/// Top choices and most-preferred even choices of every person.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsSets {
    pub f: Vec<Vec<usize>>,
    pub s: Vec<Vec<usize>>,
}

/// The graph of rank-1 edges.
pub fn rank1_graph(inst: &Instance) -> BipartiteGraph {
    let adj = (0..inst.num_people()).map(|p| inst.top_group(p).to_vec()).collect();
    BipartiteGraph::new(adj, inst.items().iter().map(|i| i.copies).collect())
}

/// A maximum matching on rank-1 edges. People left out are on their last
/// resort when enabled.
pub fn max_matching_rank1(inst: &Instance) -> Matching {
    max_matching(&rank1_graph(inst)).to_matching(inst)
}

/// Labels people and items w.r.t. the rank-1 edges of `m0`, which must form a
/// maximum matching of the rank-1 graph.
pub fn gallai_edmonds(inst: &Instance, m0: &Matching) -> Result<GeLabels, DecompositionError> {
    m0.check_shape(inst).map_err(|_| DecompositionError::Shape)?;
    let g1 = rank1_graph(inst);
    label_graph(&g1, &GraphMatching::restrict(&g1, m0))
}

/// `f(a)` is the top group; `s(a)` holds the even items of the best-ranked
/// group containing any even item. With last resorts enabled `s(a)` is empty
/// only when `f(a)` is the last resort alone.
pub fn fs_sets(inst: &Instance, labels: &GeLabels) -> FsSets {
    let n = inst.num_people();
    let mut f = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for p in 0..n {
        f.push(inst.top_group(p).to_vec());
        let best = inst
            .groups(p)
            .iter()
            .map(|g| {
                g.iter()
                    .copied()
                    .filter(|&b| labels.item(b) == Label::Even)
                    .collect::<Vec<_>>()
            })
            .find(|evens| !evens.is_empty())
            .unwrap_or_default();
        s.push(best);
    }
    FsSets { f, s }
}

/// The reduced graph: every person keeps their `f`-edges, even people add their
/// `s`-edges, and edges from odd people to odd or unreachable items are
/// dropped.
pub fn reduced_graph(inst: &Instance, fs: &FsSets, labels: &GeLabels) -> BipartiteGraph {
    let adj = (0..inst.num_people())
        .map(|p| {
            let mut out: Vec<usize> = Vec::new();
            let odd = labels.person(p) == Label::Odd;
            for &b in &fs.f[p] {
                if odd && labels.item(b) != Label::Even {
                    continue;
                }
                out.push(b);
            }
            if labels.person(p) == Label::Even {
                for &b in &fs.s[p] {
                    if !out.contains(&b) {
                        out.push(b);
                    }
                }
            }
            out
        })
        .collect();
    BipartiteGraph::new(adj, inst.items().iter().map(|i| i.copies).collect())
}

/// Everything derived from the rank-1 structure in one pass.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub rank1: BipartiteGraph,
    pub rank1_matching: GraphMatching,
    pub labels: GeLabels,
    pub fs: FsSets,
    pub reduced: BipartiteGraph,
}

impl Decomposition {
    pub fn compute(inst: &Instance) -> Decomposition {
        let rank1 = rank1_graph(inst);
        let rank1_matching = max_matching(&rank1);
        let labels = label_graph(&rank1, &rank1_matching).expect("augmenting-path search yields a maximum matching");
        let fs = fs_sets(inst, &labels);
        let reduced = reduced_graph(inst, &fs, &labels);
        Decomposition {
            rank1,
            rank1_matching,
            labels,
            fs,
            reduced,
        }
    }
}

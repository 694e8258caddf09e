//! Min-cost augmentation: buying extra item copies so that a popular
//! matching exists.
//!
//! [`augment_length2`] is the polynomial loop for strict lists of at most two
//! items: while the reduced graph has no matching covering every person,
//! duplicate the cheapest odd item of the reduced graph. [`exact_augmentation`]
//! is a best-first search over copy vectors for arbitrary instances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::decomposition::{label_graph, max_matching, Decomposition, FsSets, Label};
use crate::instance::Instance;
use crate::popmatch::{admits_popular, min_cost_max_card_popular, PopError};

/// Default number of copy vectors [`exact_augmentation`] may examine.
pub const DEFAULT_MAX_STATES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("last-resort items must be enabled")]
    LastResortsRequired,
    #[error("person {0} has tied items; lists must be strict")]
    Tie(String),
    #[error("person {person} lists {len} items; at most 2 are allowed")]
    ListTooLong { person: String, len: usize },
    #[error("search examined {0} copy vectors without finding a plan")]
    LimitExceeded(usize),
    #[error("plan has {got} entries, expected {expected}")]
    PlanLength { expected: usize, got: usize },
    #[error("plan adds copies of last-resort item {0}")]
    LastResortInPlan(String),
    #[error("plan cost overflows u64")]
    CostOverflow,
    #[error("no odd item to duplicate while some person is unmatched")]
    Stuck,
    #[error(transparent)]
    Pop(#[from] PopError),
}

/// Extra copies per item (indexed like the instance's items) and their cost.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AugmentationPlan {
    pub extra: Vec<u32>,
    pub total_cost: u64,
}

impl AugmentationPlan {
    /// A plan over `inst` with the cost computed from `extra`.
    pub fn new(inst: &Instance, extra: Vec<u32>) -> Result<Self, AugmentError> {
        if extra.len() != inst.num_items() {
            return Err(AugmentError::PlanLength {
                expected: inst.num_items(),
                got: extra.len(),
            });
        }
        let mut total = 0u64;
        for (b, &k) in extra.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if inst.is_last_resort(b) {
                return Err(AugmentError::LastResortInPlan(inst.item(b).id.clone()));
            }
            total = (k as u64)
                .checked_mul(inst.item(b).cost)
                .and_then(|c| total.checked_add(c))
                .ok_or(AugmentError::CostOverflow)?;
        }
        Ok(AugmentationPlan {
            extra,
            total_cost: total,
        })
    }

    pub fn empty(inst: &Instance) -> Self {
        AugmentationPlan {
            extra: vec![0; inst.num_items()],
            total_cost: 0,
        }
    }

    /// `(item id, extra copies)` for every item receiving copies.
    pub fn entries<'a>(&'a self, inst: &'a Instance) -> impl Iterator<Item = (&'a str, u32)> + 'a {
        self.extra
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k > 0)
            .map(move |(b, &k)| (inst.item(b).id.as_str(), k))
    }

    /// The augmented instance.
    pub fn apply(&self, inst: &Instance) -> Result<Instance, AugmentError> {
        if self.extra.len() != inst.num_items() {
            return Err(AugmentError::PlanLength {
                expected: inst.num_items(),
                got: self.extra.len(),
            });
        }
        Ok(inst
            .with_extra_copies(&self.extra)
            .expect("plan length matches the instance"))
    }

    /// `<item> +<count>` lines followed by `total <cost>`.
    pub fn to_text(&self, inst: &Instance) -> String {
        let mut out = String::new();
        for (id, k) in self.entries(inst) {
            out.push_str(&format!("{id} +{k}\n"));
        }
        out.push_str(&format!("total {}\n", self.total_cost));
        out
    }
}

fn check_length2(inst: &Instance) -> Result<(), AugmentError> {
    if !inst.last_resort_enabled() {
        return Err(AugmentError::LastResortsRequired);
    }
    for p in 0..inst.num_people() {
        let mut real = 0;
        for group in inst.groups(p) {
            if group.iter().any(|&b| inst.is_last_resort(b)) {
                continue;
            }
            if group.len() > 1 {
                return Err(AugmentError::Tie(inst.person_id(p).to_string()));
            }
            real += 1;
        }
        if real > 2 {
            return Err(AugmentError::ListTooLong {
                person: inst.person_id(p).to_string(),
                len: real,
            });
        }
    }
    Ok(())
}

/// State of one round of the length-2 loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Length2Round {
    /// Copies of every item in this round's instance.
    pub copies: Vec<u32>,
    pub fs: FsSets,
    /// Degree of every item in the reduced graph.
    pub reduced_degree: Vec<usize>,
    /// Size of a maximum matching of the reduced graph.
    pub matching_size: usize,
    /// Item duplicated at the end of the round; `None` in the final round.
    pub duplicated: Option<usize>,
}

/// Min-cost augmentation for strict lists of at most two real items.
pub fn augment_length2(inst: &Instance) -> Result<AugmentationPlan, AugmentError> {
    augment_length2_traced(inst).map(|(plan, _)| plan)
}

/// [`augment_length2`] with the state of every round.
pub fn augment_length2_traced(inst: &Instance) -> Result<(AugmentationPlan, Vec<Length2Round>), AugmentError> {
    check_length2(inst)?;
    let n = inst.num_people();
    let mut extra = vec![0u32; inst.num_items()];
    let mut rounds = Vec::new();
    let mut current = inst.clone();
    // Each round grows the maximum matching by one.
    for _ in 0..=n {
        let d = Decomposition::compute(&current);
        let m = max_matching(&d.reduced);
        let degree = d.reduced.item_adjacency().iter().map(Vec::len).collect();
        let mut round = Length2Round {
            copies: current.items().iter().map(|i| i.copies).collect(),
            fs: d.fs.clone(),
            reduced_degree: degree,
            matching_size: m.size(),
            duplicated: None,
        };
        if m.size() == n {
            rounds.push(round);
            return Ok((AugmentationPlan::new(inst, extra)?, rounds));
        }
        let labels = label_graph(&d.reduced, &m).expect("matching is maximum");
        let b = current
            .real_items()
            .filter(|&b| labels.item(b) == Label::Odd)
            .min_by_key(|&b| (current.item(b).cost, b))
            .ok_or(AugmentError::Stuck)?;
        round.duplicated = Some(b);
        rounds.push(round);
        extra[b] += 1;
        let mut one = vec![0u32; current.num_items()];
        one[b] = 1;
        current = current.with_extra_copies(&one).expect("length matches");
    }
    Err(AugmentError::Stuck)
}

/// Limits for [`exact_augmentation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_states: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

fn feasible(inst: &Instance, perfect: bool) -> Result<bool, AugmentError> {
    if perfect {
        Ok(min_cost_max_card_popular(inst)?.is_some_and(|s| s.matching.cardinality(inst) == inst.num_people()))
    } else {
        Ok(admits_popular(inst)?)
    }
}

/// Cheapest plan found by best-first search over copy vectors with at most
/// one extra copy per person listing an item. `None` only when `perfect` is
/// set and some person lists no real item.
///
/// Vectors are visited in order of (cost, number of copies, reversed
/// lexicographic order), each exactly once: a vector's successors increment a
/// coordinate at or after its last nonzero one.
pub fn exact_augmentation(
    inst: &Instance,
    perfect: bool,
    limits: &SearchLimits,
) -> Result<Option<AugmentationPlan>, AugmentError> {
    if !inst.last_resort_enabled() {
        return Err(AugmentError::LastResortsRequired);
    }
    if perfect && (0..inst.num_people()).any(|p| inst.groups(p).iter().flatten().all(|&b| inst.is_last_resort(b))) {
        return Ok(None);
    }
    let real: Vec<usize> = inst.real_items().collect();
    let bound: Vec<u32> = real.iter().map(|&b| inst.listing_count(b) as u32).collect();
    let cost: Vec<u64> = real.iter().map(|&b| inst.item(b).cost).collect();

    type Key = (u64, u32, Reverse<Vec<u32>>);
    let mut heap: BinaryHeap<Reverse<Key>> = BinaryHeap::new();
    heap.push(Reverse((0, 0, Reverse(vec![0; real.len()]))));
    let mut explored = 0usize;
    while let Some(Reverse((total, copies, Reverse(vector)))) = heap.pop() {
        if explored == limits.max_states {
            return Err(AugmentError::LimitExceeded(explored));
        }
        explored += 1;
        let mut extra = vec![0u32; inst.num_items()];
        for (&b, &k) in real.iter().zip(&vector) {
            extra[b] = k;
        }
        let candidate = inst.with_extra_copies(&extra).expect("length matches");
        if feasible(&candidate, perfect)? {
            return Ok(Some(AugmentationPlan {
                extra,
                total_cost: total,
            }));
        }
        let first = vector.iter().rposition(|&k| k > 0).unwrap_or(0);
        for j in first..real.len() {
            if vector[j] < bound[j] {
                let mut next = vector.clone();
                next[j] += 1;
                let next_total = total.checked_add(cost[j]).ok_or(AugmentError::CostOverflow)?;
                heap.push(Reverse((next_total, copies + 1, Reverse(next))));
            }
        }
    }
    // The all-bounds vector gives every person a copy of their top item.
    unreachable!("the maximal copy vector is always feasible")
}

/// Whether applying `plan` yields a popular matching (with nobody on a last
/// resort when `perfect`).
pub fn verify_plan(inst: &Instance, plan: &AugmentationPlan, perfect: bool) -> bool {
    if !inst.last_resort_enabled() || plan.extra.len() != inst.num_items() {
        return false;
    }
    if plan
        .extra
        .iter()
        .enumerate()
        .any(|(b, &k)| k > 0 && inst.is_last_resort(b))
    {
        return false;
    }
    match plan.apply(inst) {
        Ok(augmented) => feasible(&augmented, perfect).unwrap_or(false),
        Err(_) => false,
    }
}

//! Monotone 1-in-3 SAT and the clause gadgets that encode it as popular
//! instance construction, augmentation, and perfect augmentation problems.
//!
//! Every generated instance has last resorts enabled and declares its real
//! items in an order that is a master list for all preference lists. Within a
//! clause the three variables are taken in increasing order.

use thiserror::Error;

use crate::augment::AugmentationPlan;
use crate::instance::{Instance, InstanceBuilder};

/// Largest variable count [`solve_1in3`] accepts.
pub const MAX_SOLVER_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("the variable count must be positive")]
    NoVariables,
    #[error("clause {clause} uses variable {var}, outside 1..={n_vars}")]
    VarOutOfRange { clause: usize, var: usize, n_vars: usize },
    #[error("clause {clause} repeats variable {var}")]
    RepeatedVar { clause: usize, var: usize },
    #[error("{0} variables exceed the solver limit of {MAX_SOLVER_VARS}")]
    TooManyVars(usize),
    #[error("assignment has {got} values for {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
    #[error("clause {0} does not have exactly one true variable")]
    NotSatisfying(usize),
    #[error("gadget parameters must be positive")]
    BadParameter,
}

/// A monotone 3-CNF; variables are numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatInstance {
    n_vars: usize,
    clauses: Vec<[usize; 3]>,
}

impl SatInstance {
    pub fn new(n_vars: usize, clauses: Vec<[usize; 3]>) -> Result<Self, SatError> {
        if n_vars == 0 {
            return Err(SatError::NoVariables);
        }
        for (i, c) in clauses.iter().enumerate() {
            for (k, &v) in c.iter().enumerate() {
                if v == 0 || v > n_vars {
                    return Err(SatError::VarOutOfRange {
                        clause: i + 1,
                        var: v,
                        n_vars,
                    });
                }
                if c[..k].contains(&v) {
                    return Err(SatError::RepeatedVar { clause: i + 1, var: v });
                }
            }
        }
        Ok(SatInstance { n_vars, clauses })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[[usize; 3]] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Number of clauses containing each variable, indexed from 0.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut c = vec![0; self.n_vars];
        for clause in &self.clauses {
            for &v in clause {
                c[v - 1] += 1;
            }
        }
        c
    }

    /// Whether every clause has exactly one true variable.
    pub fn is_1in3(&self, assignment: &[bool]) -> bool {
        self.check_assignment(assignment).is_ok()
    }

    fn check_assignment(&self, assignment: &[bool]) -> Result<(), SatError> {
        if assignment.len() != self.n_vars {
            return Err(SatError::AssignmentLength {
                expected: self.n_vars,
                got: assignment.len(),
            });
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if c.iter().filter(|&&v| assignment[v - 1]).count() != 1 {
                return Err(SatError::NotSatisfying(i + 1));
            }
        }
        Ok(())
    }

    fn sorted_clause(&self, i: usize) -> [usize; 3] {
        let mut c = self.clauses[i];
        c.sort_unstable();
        c
    }

    /// `vars <n>` followed by one `c <i> <j> <k>` line per clause.
    pub fn to_text(&self) -> String {
        let mut out = format!("vars {}\n", self.n_vars);
        for c in &self.clauses {
            out.push_str(&format!("c {} {} {}\n", c[0], c[1], c[2]));
        }
        out
    }
}

/// Parses the SAT file format; `#` starts a comment.
pub fn parse_sat(text: &str) -> Result<SatInstance, SatError> {
    let mut n_vars = None;
    let mut clauses = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: &str| SatError::Syntax {
            line,
            message: message.to_string(),
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        let number = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| syntax(&format!("expected a number, found `{s}`")))
        };
        match fields[0] {
            "vars" if n_vars.is_none() => {
                if fields.len() != 2 {
                    return Err(syntax("expected `vars <n>`"));
                }
                n_vars = Some(number(fields[1])?);
            }
            "vars" => return Err(syntax("duplicate `vars` line")),
            "c" if n_vars.is_some() => {
                if fields.len() != 4 {
                    return Err(syntax("expected `c <i> <j> <k>`"));
                }
                clauses.push([number(fields[1])?, number(fields[2])?, number(fields[3])?]);
            }
            "c" => return Err(syntax("clause before `vars` line")),
            other => return Err(syntax(&format!("unknown keyword `{other}`"))),
        }
    }
    let n_vars = n_vars.ok_or(SatError::Syntax {
        line: 1,
        message: "missing `vars` line".to_string(),
    })?;
    SatInstance::new(n_vars, clauses)
}

/// A 1-in-3 satisfying assignment, trying assignments in increasing binary
/// order with variable 1 as the lowest bit.
pub fn solve_1in3(sat: &SatInstance) -> Result<Option<Vec<bool>>, SatError> {
    let n = sat.n_vars;
    if n > MAX_SOLVER_VARS {
        return Err(SatError::TooManyVars(n));
    }
    let masks: Vec<u32> = sat
        .clauses
        .iter()
        .map(|c| c.iter().fold(0u32, |m, &v| m | 1 << (v - 1)))
        .collect();
    let found = (0u32..1 << n).find(|&x| masks.iter().all(|&m| (x & m).count_ones() == 1));
    Ok(found.map(|x| (0..n).map(|j| x >> j & 1 == 1).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GadgetKind {
    /// Popular instance construction; copies are the unknowns.
    PopularInstance,
    Augmentation,
    Inapprox,
    PerfectAugmentation,
}

/// A generated instance with its master list.
#[derive(Debug, Clone, PartialEq)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub instance: Instance,
    /// Real items in master-list order.
    pub master_list: Vec<usize>,
}

fn finish(kind: GadgetKind, builder: InstanceBuilder) -> Gadget {
    let instance = builder
        .build()
        .expect("gadget names are distinct and lists are consistent")
        .with_last_resorts();
    let master_list = instance.real_items().collect();
    Gadget {
        kind,
        instance,
        master_list,
    }
}

fn u(j: usize) -> String {
    format!("u{j}")
}

/// Nine people per clause with lists of length two; every copy count is a
/// placeholder 1.
pub fn gen_popular_instance(sat: &SatInstance) -> Gadget {
    let m = sat.num_clauses();
    let mut b = Instance::builder();
    for j in 1..=sat.n_vars {
        b = b.item(u(j), 1, 3);
    }
    for i in 1..=m {
        for t in 1..=3 {
            b = b.item(format!("p{i}_{t}"), 1, 1);
        }
    }
    for i in 1..=m {
        b = b.item(format!("q{i}"), 1, 0);
    }
    for i in 1..=m {
        let c = sat.sorted_clause(i - 1);
        let a = |k: usize| format!("a{i}_{k}");
        b = b
            .strict_person(a(1), [u(c[0]), u(c[1])])
            .strict_person(a(2), [u(c[1]), u(c[2])])
            .strict_person(a(3), [u(c[0]), u(c[2])]);
        for k in 1..=3 {
            b = b.strict_person(a(3 + k), [u(c[k - 1]), format!("p{i}_{k}")]);
        }
        for k in 1..=3 {
            b = b.strict_person(a(6 + k), [format!("p{i}_{k}"), format!("q{i}")]);
        }
    }
    finish(GadgetKind::PopularInstance, b)
}

fn variable_people(mut b: InstanceBuilder, sat: &SatInstance) -> InstanceBuilder {
    for j in 1..=sat.n_vars {
        b = b.strict_person(format!("x{j}"), [u(j)]);
    }
    b
}

/// Six people per clause plus one person per variable; internal items cost
/// 2 and public items 1.
pub fn gen_augmentation(sat: &SatInstance) -> Gadget {
    let m = sat.num_clauses();
    let mut b = Instance::builder();
    for i in 1..=m {
        b = b.item(format!("p{i}"), 1, 2);
    }
    for i in 1..=m {
        b = b.item(format!("r{i}"), 1, 2);
    }
    for j in 1..=sat.n_vars {
        b = b.item(u(j), 1, 1);
    }
    for i in 1..=m {
        b = b.item(format!("q{i}"), 1, 2);
    }
    for i in 1..=m {
        let c = sat.sorted_clause(i - 1);
        for k in 1..=3 {
            b = b.strict_person(format!("a{i}_{k}"), [format!("p{i}"), u(c[k - 1]), format!("q{i}")]);
        }
        for k in 1..=3 {
            b = b.strict_person(format!("a{i}_{}", 3 + k), [format!("r{i}"), u(c[k - 1])]);
        }
    }
    finish(GadgetKind::Augmentation, variable_people(b, sat))
}

/// The augmentation gadget with `triplets` copies of the `r`-triplet per
/// clause and internal items of cost `internal_cost`.
pub fn gen_inapprox(sat: &SatInstance, triplets: usize, internal_cost: u64) -> Result<Gadget, SatError> {
    if triplets == 0 || internal_cost == 0 {
        return Err(SatError::BadParameter);
    }
    let m = sat.num_clauses();
    let mut b = Instance::builder();
    for i in 1..=m {
        b = b.item(format!("p{i}"), 1, internal_cost);
    }
    for i in 1..=m {
        for t in 1..=triplets {
            b = b.item(format!("r{i}_{t}"), 1, internal_cost);
        }
    }
    for j in 1..=sat.n_vars {
        b = b.item(u(j), 1, 1);
    }
    for i in 1..=m {
        b = b.item(format!("q{i}"), 1, internal_cost);
    }
    for i in 1..=m {
        let c = sat.sorted_clause(i - 1);
        for k in 1..=3 {
            b = b.strict_person(format!("a{i}_{k}"), [format!("p{i}"), u(c[k - 1]), format!("q{i}")]);
        }
        for t in 1..=triplets {
            for k in 1..=3 {
                b = b.strict_person(format!("a{i}_{}", 3 * t + k), [format!("r{i}_{t}"), u(c[k - 1])]);
            }
        }
    }
    Ok(finish(GadgetKind::Inapprox, variable_people(b, sat)))
}

/// Six people per clause with lists of length two plus one person per
/// variable; internal items cost `internal_cost`.
pub fn gen_perfect_aug(sat: &SatInstance, internal_cost: u64) -> Result<Gadget, SatError> {
    if internal_cost == 0 {
        return Err(SatError::BadParameter);
    }
    let m = sat.num_clauses();
    let mut b = Instance::builder();
    for i in 1..=m {
        b = b.item(format!("p{i}"), 1, internal_cost);
    }
    for j in 1..=sat.n_vars {
        b = b.item(u(j), 1, 1);
    }
    for i in 1..=m {
        b = b.item(format!("q{i}"), 1, internal_cost);
    }
    for i in 1..=m {
        let c = sat.sorted_clause(i - 1);
        for k in 1..=3 {
            b = b.strict_person(format!("a{i}_{k}"), [format!("p{i}"), u(c[k - 1])]);
        }
        for k in 1..=3 {
            b = b.strict_person(format!("a{i}_{}", 3 + k), [u(c[k - 1]), format!("q{i}")]);
        }
    }
    Ok(finish(GadgetKind::PerfectAugmentation, variable_people(b, sat)))
}

/// Internal item cost used by default for the perfect gadget: the number of
/// clauses, at least 1.
pub fn default_perfect_cost(sat: &SatInstance) -> u64 {
    sat.num_clauses().max(1) as u64
}

/// What a satisfying assignment buys for a gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetPlan {
    /// Extra copies on top of the generated instance.
    Augment(AugmentationPlan),
    /// Copies of every real item, in declaration order, and their cost.
    Copies { copies: Vec<u32>, cost: u64 },
}

impl GadgetPlan {
    pub fn cost(&self) -> u64 {
        match self {
            GadgetPlan::Augment(p) => p.total_cost,
            GadgetPlan::Copies { cost, .. } => *cost,
        }
    }
}

/// The copy setting a 1-in-3 satisfying assignment induces on `gadget`,
/// which must have been generated from `sat`.
pub fn assignment_to_plan(sat: &SatInstance, gadget: &Gadget, assignment: &[bool]) -> Result<GadgetPlan, SatError> {
    sat.check_assignment(assignment)?;
    let inst = &gadget.instance;
    let item = |id: &str| inst.item_by_id(id).expect("gadget was generated from this instance");
    let occurrences = sat.occurrences();
    match gadget.kind {
        GadgetKind::Augmentation | GadgetKind::Inapprox | GadgetKind::PerfectAugmentation => {
            let mut extra = vec![0u32; inst.num_items()];
            for j in 1..=sat.n_vars {
                let c = occurrences[j - 1] as u32;
                let value = assignment[j - 1];
                extra[item(&u(j))] = match gadget.kind {
                    GadgetKind::PerfectAugmentation if !value => 2 * c,
                    GadgetKind::PerfectAugmentation => 0,
                    _ if value => c,
                    _ => 0,
                };
            }
            let plan = AugmentationPlan::new(inst, extra).expect("public items have finite cost");
            Ok(GadgetPlan::Augment(plan))
        }
        GadgetKind::PopularInstance => {
            let mut copies = vec![0u32; inst.num_items()];
            for i in 1..=sat.num_clauses() {
                let c = sat.sorted_clause(i - 1);
                let falses: Vec<usize> = c.iter().copied().filter(|&v| !assignment[v - 1]).collect();
                copies[item(&u(falses[0]))] += 2;
                copies[item(&u(falses[1]))] += 1;
                for (k, &v) in c.iter().enumerate() {
                    copies[item(&format!("p{i}_{}", k + 1))] = if assignment[v - 1] { 1 } else { 2 };
                }
                copies[item(&format!("q{i}"))] = 1;
            }
            let real: Vec<usize> = inst.real_items().collect();
            let copies: Vec<u32> = real.iter().map(|&b| copies[b]).collect();
            let cost = real
                .iter()
                .zip(&copies)
                .map(|(&b, &k)| k as u64 * inst.item(b).cost)
                .sum();
            Ok(GadgetPlan::Copies { copies, cost })
        }
    }
}

/// Whether every preference list of `inst` respects the order `master`.
pub fn follows_master_list(inst: &Instance, master: &[usize]) -> bool {
    let mut position = vec![usize::MAX; inst.num_items()];
    for (pos, &b) in master.iter().enumerate() {
        position[b] = pos;
    }
    (0..inst.num_people()).all(|p| {
        let listed: Vec<usize> = inst
            .groups(p)
            .iter()
            .flatten()
            .copied()
            .filter(|&b| !inst.is_last_resort(b))
            .collect();
        listed.iter().all(|&b| position[b] != usize::MAX) && listed.windows(2).all(|w| position[w[0]] < position[w[1]])
    })
}

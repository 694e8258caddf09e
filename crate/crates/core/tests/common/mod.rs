#![allow(dead_code)]

use popaug::instance::Instance;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Shape of a random instance family.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_people: usize,
    pub max_items: usize,
    pub max_total_copies: u32,
    pub max_cost: u64,
    pub ties: bool,
    /// Cap on real items per list; `None` means any length.
    pub max_list: Option<usize>,
}

impl Shape {
    /// Up to 7 people, 5 items, 8 copies in total, ties allowed.
    pub const SMALL: Shape = Shape {
        max_people: 7,
        max_items: 5,
        max_total_copies: 8,
        max_cost: 9,
        ties: true,
        max_list: None,
    };

    /// Strict lists of at most two items, single copies.
    pub const LENGTH2: Shape = Shape {
        max_people: 8,
        max_items: 6,
        max_total_copies: 6,
        max_cost: 9,
        ties: false,
        max_list: Some(2),
    };
}

/// A random instance with last resorts enabled.
pub fn random_instance(rng: &mut StdRng, shape: Shape) -> Instance {
    random_instance_with(rng, shape, false)
}

/// With `single_copies`, every item has exactly one copy.
pub fn random_instance_with(rng: &mut StdRng, shape: Shape, single_copies: bool) -> Instance {
    // Skewed instances draw lists by weighted sampling without replacement,
    // so low-index items are contended for.
    let skewed = rng.gen_bool(0.5);
    let fewest = if skewed { shape.max_people.min(3) } else { 1 };
    let people = rng.gen_range(fewest..=shape.max_people);
    let items = rng.gen_range(1..=shape.max_items.min(shape.max_total_copies as usize));
    let mut copies = vec![1u32; items];
    if !single_copies && !(skewed && rng.gen_bool(0.7)) {
        let spare = shape.max_total_copies - items as u32;
        for _ in 0..rng.gen_range(0..=spare) {
            let b = rng.gen_range(0..items);
            copies[b] += 1;
        }
    }
    let mut builder = Instance::builder();
    for (b, &c) in copies.iter().enumerate() {
        builder = builder.item(format!("b{b}"), c, rng.gen_range(0..=shape.max_cost));
    }
    for p in 0..people {
        let mut list: Vec<usize> = (0..items).collect();
        if skewed {
            let keys: Vec<f64> = (0..items)
                .map(|b| -(1.0 - rng.gen::<f64>()).ln() * 3f64.powi(b as i32))
                .collect();
            list.sort_by(|&x, &y| keys[x].total_cmp(&keys[y]));
        } else {
            list.shuffle(rng);
        }
        let cap = shape.max_list.unwrap_or(items).min(items);
        let len = rng.gen_range(if skewed { cap.min(2) } else { 0 }..=cap);
        list.truncate(len);
        let mut groups: Vec<Vec<String>> = Vec::new();
        for b in list {
            let id = format!("b{b}");
            match groups.last_mut() {
                Some(g) if shape.ties && rng.gen_bool(if skewed { 0.15 } else { 0.35 }) => g.push(id),
                _ => groups.push(vec![id]),
            }
        }
        builder = builder.person(format!("a{p}"), groups);
    }
    builder
        .build()
        .expect("generated instances are well formed")
        .with_last_resorts()
}

/// Strict lists of one or two items over single-copy items. Top choices
/// come mostly from a few sought-after items, so that people contend for
/// them and the remaining items serve as second choices.
pub fn random_length2(rng: &mut StdRng, max_people: usize, max_items: usize) -> Instance {
    let people = rng.gen_range(1..=max_people);
    let items = rng.gen_range(2..=max_items.max(2));
    let sought = rng.gen_range(1..items);
    let mut builder = Instance::builder();
    for b in 0..items {
        builder = builder.item(format!("b{b}"), 1, rng.gen_range(0..=9));
    }
    for p in 0..people {
        let first = if rng.gen_bool(0.8) {
            rng.gen_range(0..sought)
        } else {
            rng.gen_range(0..items)
        };
        let mut list = vec![first];
        if rng.gen_bool(0.85) {
            let second = rng.gen_range(0..items - 1);
            list.push(if second >= first { second + 1 } else { second });
        }
        builder = builder.strict_person(format!("a{p}"), list.into_iter().map(|b| format!("b{b}")));
    }
    builder
        .build()
        .expect("generated instances are well formed")
        .with_last_resorts()
}

/// A large random instance with `people` people and about `entries`
/// preference entries over `people / 2` items with one to three copies.
pub fn random_large(rng: &mut StdRng, people: usize, entries: usize) -> Instance {
    let items = (people / 2).max(1);
    let mut builder = Instance::builder();
    for b in 0..items {
        builder = builder.item(format!("b{b}"), rng.gen_range(1..=3), rng.gen_range(0..=100));
    }
    let mean = entries as f64 / people as f64;
    for p in 0..people {
        let len = rng.gen_range(1..=(2.0 * mean).round() as usize - 1).min(items);
        let mut chosen = Vec::with_capacity(len);
        while chosen.len() < len {
            let b = rng.gen_range(0..items);
            if !chosen.contains(&b) {
                chosen.push(b);
            }
        }
        let mut groups: Vec<Vec<String>> = Vec::new();
        for b in chosen {
            match groups.last_mut() {
                Some(g) if rng.gen_bool(0.2) => g.push(format!("b{b}")),
                _ => groups.push(vec![format!("b{b}")]),
            }
        }
        builder = builder.person(format!("a{p}"), groups);
    }
    builder
        .build()
        .expect("generated instances are well formed")
        .with_last_resorts()
}

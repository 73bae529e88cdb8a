#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;
use trustrec_bench::config::{ConfigMap, ExperimentConfig};

pub const COMMUNITIES: usize = 4;
pub const COMMUNITY_SIZE: usize = 40;
pub const ITEMS_PER_COMMUNITY: usize = 30;

/// Position of a user inside its community decides its role:
/// `< 20` warm, `20..36` cold (of which `32..36` have no trust arcs),
/// `>= 36` trust only.
pub fn role(j: usize) -> &'static str {
    match j {
        0..=19 => "warm",
        20..=31 => "cold",
        32..=35 => "cold-untrusted",
        _ => "trust-only",
    }
}

/// Community-structured ratings and trust: users mostly trust and rate
/// inside their community.
pub fn synthetic(seed: u64) -> (String, String) {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut ratings, mut trust) = (String::new(), String::new());
    let total_items = COMMUNITIES * ITEMS_PER_COMMUNITY;
    for c in 0..COMMUNITIES {
        for j in 0..COMMUNITY_SIZE {
            let user = format!("u{c}_{j}");
            let count = match role(j) {
                "warm" => rng.random_range(12..=20),
                "trust-only" => 0,
                _ => rng.random_range(1..=8),
            };
            let mut rated = std::collections::BTreeSet::new();
            while rated.len() < count {
                let item = if rng.random_bool(0.85) {
                    c * ITEMS_PER_COMMUNITY + rng.random_range(0..ITEMS_PER_COMMUNITY)
                } else {
                    rng.random_range(0..total_items)
                };
                rated.insert(item);
            }
            for item in rated {
                let home = item / ITEMS_PER_COMMUNITY == c;
                let value = if home { rng.random_range(4..=5) } else { rng.random_range(1..=3) };
                writeln!(ratings, "{user} i{item} {value}").unwrap();
            }
            if role(j) == "cold-untrusted" {
                continue;
            }
            for _ in 0..4 {
                let (tc, tj) = if rng.random_bool(0.95) {
                    (c, rng.random_range(0..COMMUNITY_SIZE))
                } else {
                    (rng.random_range(0..COMMUNITIES), rng.random_range(0..COMMUNITY_SIZE))
                };
                if role(tj) != "cold-untrusted" {
                    writeln!(trust, "{user} u{tc}_{tj} 1").unwrap();
                }
            }
        }
    }
    (ratings, trust)
}

pub fn write_synthetic(dir: &Path, seed: u64) -> (PathBuf, PathBuf) {
    let (r, t) = synthetic(seed);
    let (rp, tp) = (dir.join("ratings.txt"), dir.join("trust.txt"));
    std::fs::write(&rp, r).unwrap();
    std::fs::write(&tp, t).unwrap();
    (rp, tp)
}

pub fn config(ratings: &Path, trust: &Path, pairs: &[&str]) -> ExperimentConfig {
    let mut map = ConfigMap::default();
    map.set("ratings", &ratings.display().to_string());
    map.set("trust", &trust.display().to_string());
    for p in pairs {
        map.set_pair(p).unwrap();
    }
    ExperimentConfig::from_map(&map, None).unwrap()
}

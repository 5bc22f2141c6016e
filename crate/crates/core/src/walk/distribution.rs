use std::collections::BTreeMap;

use serde::Serialize;

/// Probability map over outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution<K: Ord> {
    entries: BTreeMap<K, f64>,
}

impl<K: Ord + Clone> Distribution<K> {
    pub fn from_entries(entries: impl IntoIterator<Item = (K, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, p) in entries {
            *map.entry(k).or_insert(0.0) += p;
        }
        Self { entries: map }
    }

    /// Normalized frequencies; empty input gives an empty distribution.
    pub fn from_counts<'a>(counts: impl IntoIterator<Item = (&'a K, &'a u64)>) -> Self
    where
        K: 'a,
    {
        let counts: Vec<(&K, &u64)> = counts.into_iter().collect();
        let total: u64 = counts.iter().map(|(_, &c)| c).sum();
        if total == 0 {
            return Self { entries: BTreeMap::new() };
        }
        Self::from_entries(counts.into_iter().map(|(k, &c)| (k.clone(), c as f64 / total as f64)))
    }

    pub fn get(&self, key: &K) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.entries.iter().map(|(k, &p)| (k, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Mixture `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Self {
        Self::from_entries(
            self.iter().map(|(k, p)| (k.clone(), w * p)).chain(other.iter().map(|(k, p)| (k.clone(), (1.0 - w) * p))),
        )
    }

    pub fn map_keys<J: Ord + Clone>(&self, f: impl Fn(&K) -> J) -> Distribution<J> {
        Distribution::from_entries(self.iter().map(|(k, p)| (f(k), p)))
    }

    /// Restricts to keys where `keep` holds and renormalizes.
    pub fn conditioned(&self, keep: impl Fn(&K) -> bool) -> Self {
        let kept: Vec<(K, f64)> = self.iter().filter(|(k, _)| keep(k)).map(|(k, p)| (k.clone(), p)).collect();
        let mass: f64 = kept.iter().map(|(_, p)| p).sum();
        if mass <= 0.0 {
            return Self { entries: BTreeMap::new() };
        }
        Self::from_entries(kept.into_iter().map(|(k, p)| (k, p / mass)))
    }

    pub fn total_variation(&self, other: &Self) -> f64 {
        let mut tv = 0.0;
        for (k, p) in self.iter() {
            tv += (p - other.get(k)).abs();
        }
        for (k, q) in other.iter() {
            if !self.entries.contains_key(k) {
                tv += q.abs();
            }
        }
        tv / 2.0
    }
}

/// `Σ √(p_i q_i)` over the common outcome space.
pub fn bhattacharyya_fidelity<K: Ord + Clone>(p: &Distribution<K>, q: &Distribution<K>) -> f64 {
    p.iter().map(|(k, pk)| (pk.max(0.0) * q.get(k).max(0.0)).sqrt()).sum::<f64>().clamp(0.0, 1.0)
}

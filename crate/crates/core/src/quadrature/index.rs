use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Multi-index `β` with `β_i ≥ 1`. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex(Vec<u32>);

impl TryFrom<Vec<u32>> for MultiIndex {
    type Error = crate::error::PricingError;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

impl MultiIndex {
    pub fn new(v: Vec<u32>) -> Result<Self> {
        if v.is_empty() || v.contains(&0) {
            return Err(invalid(format!("multi-index {v:?} must be non-empty with entries >= 1")));
        }
        Ok(Self(v))
    }

    pub fn ones(d: usize) -> Self {
        Self(vec![1; d])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `β + e_i`.
    pub fn forward(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v[i] += 1;
        Self(v)
    }

    /// `β - e_i`, or `None` if that would leave the index set domain.
    pub fn backward(&self, i: usize) -> Option<Self> {
        (self.0[i] > 1).then(|| {
            let mut v = self.0.clone();
            v[i] -= 1;
            Self(v)
        })
    }

    /// `Σ (β_i - 1)`.
    pub fn excess(&self) -> u32 {
        self.0.iter().map(|b| b - 1).sum()
    }

    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Number of univariate nodes as a function of the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelMap {
    /// `m(β) = β`.
    Linear,
    /// `m(1) = 1`, `m(β) = 2^{β-1} + 1`.
    Doubling,
}

impl LevelMap {
    pub fn nodes(self, level: u32) -> usize {
        match self {
            LevelMap::Linear => level as usize,
            LevelMap::Doubling if level <= 1 => 1,
            LevelMap::Doubling => (1usize << (level - 1)) + 1,
        }
    }

    /// `Π m(β_i)`.
    pub fn tensor_size(self, beta: &MultiIndex) -> u64 {
        beta.as_slice().iter().map(|b| self.nodes(*b) as u64).product()
    }
}

/// A finite set of multi-indices of common dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexSet {
    members: BTreeSet<MultiIndex>,
}

impl IndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{β : β_i ≤ l}`.
    pub fn tensor(level: u32, d: usize) -> Self {
        let mut s = Self::new();
        let mut v = vec![1u32; d];
        loop {
            s.insert(MultiIndex(v.clone()));
            let mut k = 0;
            while k < d {
                if v[k] < level {
                    v[k] += 1;
                    break;
                }
                v[k] = 1;
                k += 1;
            }
            if k == d {
                return s;
            }
        }
    }

    /// `{β : Σ (β_i - 1) ≤ l}`.
    pub fn smolyak(level: u32, d: usize) -> Self {
        let mut s = Self::new();
        let mut v = vec![1u32; d];
        loop {
            s.insert(MultiIndex(v.clone()));
            let mut k = 0;
            while k < d {
                v[k] += 1;
                if v.iter().map(|b| b - 1).sum::<u32>() <= level {
                    break;
                }
                v[k] = 1;
                k += 1;
            }
            if k == d {
                return s;
            }
        }
    }

    pub fn insert(&mut self, beta: MultiIndex) -> bool {
        self.members.insert(beta)
    }

    pub fn contains(&self, beta: &MultiIndex) -> bool {
        self.members.contains(beta)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.members.iter()
    }

    /// Whether every backward neighbour of every member is a member.
    pub fn is_downward_closed(&self) -> bool {
        self.members
            .iter()
            .all(|b| (0..b.dim()).all(|i| b.backward(i).is_none_or(|p| self.contains(&p))))
    }

    /// Whether `β` can be added without breaking downward closure.
    pub fn admits(&self, beta: &MultiIndex) -> bool {
        (0..beta.dim()).all(|i| beta.backward(i).is_none_or(|p| self.contains(&p)))
    }
}

impl FromIterator<MultiIndex> for IndexSet {
    fn from_iter<T: IntoIterator<Item = MultiIndex>>(iter: T) -> Self {
        Self {
            members: iter.into_iter().collect(),
        }
    }
}

//! Observed symbol counts and the compressed multiplicity representation.

use std::collections::BTreeMap;

use crate::error::{domain, Result};

/// Tally of observed symbols. Zero counts are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountData {
    counts: BTreeMap<String, u64>,
    n: u64,
}

impl CountData {
    /// Tally a stream of symbols.
    pub fn from_samples<I, T>(samples: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: ToString,
    {
        let mut counts = BTreeMap::new();
        let mut n = 0;
        for s in samples {
            *counts.entry(s.to_string()).or_insert(0) += 1;
            n += 1;
        }
        CountData { counts, n }
    }

    /// Build from `(symbol, count)` pairs. Rejects zero counts and repeated symbols.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut counts = BTreeMap::new();
        let mut n = 0u64;
        for (sym, c) in pairs {
            let sym = sym.into();
            if c == 0 {
                return Err(domain(format!("symbol {sym:?} has a zero count")));
            }
            if counts.insert(sym.clone(), c).is_some() {
                return Err(domain(format!("symbol {sym:?} appears twice")));
            }
            n += c;
        }
        Ok(CountData { counts, n })
    }

    /// Build from a vector of counts indexed by symbol number; zero entries are skipped.
    pub fn from_count_vec(counts: &[u64]) -> Self {
        let width = counts.len().to_string().len();
        let mut map = BTreeMap::new();
        let mut n = 0;
        for (i, &c) in counts.iter().enumerate() {
            if c > 0 {
                map.insert(format!("{i:0width$}"), c);
                n += c;
            }
        }
        CountData { counts: map, n }
    }

    /// Expand a multiplicity table into anonymous symbols (`f<k>_<j>`).
    pub fn from_multiplicities(m: &Multiplicities) -> Self {
        let mut counts = BTreeMap::new();
        for (k, mk) in m.iter() {
            for j in 0..mk {
                counts.insert(format!("f{k}_{j}"), k);
            }
        }
        CountData { counts, n: m.n() }
    }

    /// Total number of samples.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of distinct observed symbols.
    pub fn k(&self) -> u64 {
        self.counts.len() as u64
    }

    /// Number of repeat observations, `N - K`.
    pub fn coincidences(&self) -> u64 {
        self.n - self.k()
    }

    pub fn get(&self, symbol: &str) -> Option<u64> {
        self.counts.get(symbol).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(symbol, count)` pairs in symbol order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts.iter().map(|(s, &c)| (s.as_str(), c))
    }

    /// Counts alone, in symbol order.
    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.values().copied()
    }

    pub fn to_multiplicities(&self) -> Multiplicities {
        let mut entries = BTreeMap::new();
        for c in self.counts() {
            *entries.entry(c).or_insert(0) += 1;
        }
        Multiplicities { entries }
    }
}

/// `m_k`: how many symbols were observed exactly `k` times.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multiplicities {
    entries: BTreeMap<u64, u64>,
}

impl Multiplicities {
    /// Build from `(frequency, m_k)` pairs. Rejects zeros and repeated frequencies.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, mk) in pairs {
            if k == 0 || mk == 0 {
                return Err(domain(format!("frequency {k} with multiplicity {mk}: both must be positive")));
            }
            if entries.insert(k, mk).is_some() {
                return Err(domain(format!("frequency {k} appears twice")));
            }
        }
        Ok(Multiplicities { entries })
    }

    /// `(k, m_k)` in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(&k, &m)| (k, m))
    }

    pub fn get(&self, k: u64) -> u64 {
        self.entries.get(&k).copied().unwrap_or(0)
    }

    /// Largest observed frequency, 0 when empty.
    pub fn max_frequency(&self) -> u64 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn n(&self) -> u64 {
        self.iter().map(|(k, m)| k * m).sum()
    }

    pub fn k(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Number of distinct frequencies.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The count multiset, sorted ascending.
    pub fn expand(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.k() as usize);
        for (k, m) in self.iter() {
            out.extend(std::iter::repeat_n(k, m as usize));
        }
        out
    }
}

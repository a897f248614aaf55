//! Centered subcarrier allocation.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Resource allocation size: a fraction of the maximum occupied count, or an
/// explicit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocClass {
    /// 25% of the maximum.
    Small,
    /// 50% of the maximum.
    Medium,
    /// 75% of the maximum.
    Large,
    Explicit(usize),
}

impl AllocClass {
    pub fn name(&self) -> String {
        match self {
            AllocClass::Small => "small".into(),
            AllocClass::Medium => "medium".into(),
            AllocClass::Large => "large".into(),
            AllocClass::Explicit(n) => format!("explicit-{n}"),
        }
    }
}

/// Maximum number of occupied subcarriers (DC excluded) for a symbol length.
pub fn max_occupied(symbol_len: usize) -> Result<usize> {
    match symbol_len {
        128 => Ok(75),
        256 => Ok(150),
        512 => Ok(300),
        other => Err(Error::UnsupportedSymbolLen(other)),
    }
}

/// Occupied subcarriers as signed frequency offsets, in increasing frequency
/// order. Offset `k` lives in DFT bin `k mod symbol_len`. DC is never used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    symbol_len: usize,
    n_max: usize,
    offsets: Vec<i32>,
}

impl Allocation {
    pub fn new(symbol_len: usize, class: AllocClass) -> Result<Self> {
        let n_max = max_occupied(symbol_len)?;
        let count = match class {
            // round half up of p * n_max, exact in quarters
            AllocClass::Small => (n_max + 2) / 4,
            AllocClass::Medium => (2 * n_max + 2) / 4,
            AllocClass::Large => (3 * n_max + 2) / 4,
            AllocClass::Explicit(n) => n,
        };
        if count == 0 || count > n_max {
            return Err(Error::InvalidSpec(format!(
                "occupied count {count} outside 1..={n_max} for symbol length {symbol_len}"
            )));
        }
        let below = count.div_ceil(2) as i32;
        let above = (count / 2) as i32;
        let offsets = (-below..0).chain(1..=above).collect();
        Ok(Self { symbol_len, n_max, offsets })
    }

    pub fn symbol_len(&self) -> usize {
        self.symbol_len
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Signed subcarrier offsets, most negative first.
    pub fn offsets(&self) -> &[i32] {
        &self.offsets
    }

    /// DFT bin index for each occupied subcarrier, in the same order as
    /// [`offsets`](Self::offsets).
    pub fn bins(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.symbol_len as i32;
        self.offsets.iter().map(move |&k| k.rem_euclid(n) as usize)
    }

    /// Occupied DFT bins in ascending DFT order.
    pub fn dft_order(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.bins().collect();
        b.sort_unstable();
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_per_class() {
        let expect = [
            (128, [19, 38, 56]),
            (256, [38, 75, 113]),
            (512, [75, 150, 225]),
        ];
        for (n, counts) in expect {
            for (class, c) in [AllocClass::Small, AllocClass::Medium, AllocClass::Large]
                .into_iter()
                .zip(counts)
            {
                assert_eq!(Allocation::new(n, class).unwrap().len(), c, "{n} {class:?}");
            }
        }
    }

    #[test]
    fn medium_512_is_symmetric() {
        let a = Allocation::new(512, AllocClass::Medium).unwrap();
        assert_eq!(a.offsets().iter().filter(|&&k| k < 0).count(), 75);
        assert_eq!(a.offsets().iter().filter(|&&k| k > 0).count(), 75);
        assert_eq!(a.n_max(), 300);
    }

    #[test]
    fn small_128_splits_ceil_below() {
        let a = Allocation::new(128, AllocClass::Small).unwrap();
        assert_eq!(a.len(), 19);
        assert_eq!(a.offsets().first(), Some(&-10));
        assert_eq!(a.offsets().last(), Some(&9));
        assert_eq!(a.offsets().iter().filter(|&&k| k < 0).count(), 10);
    }

    #[test]
    fn excludes_dc_and_is_contiguous() {
        for n in [128, 256, 512] {
            for class in [AllocClass::Small, AllocClass::Medium, AllocClass::Large] {
                let a = Allocation::new(n, class).unwrap();
                assert!(!a.offsets().contains(&0));
                assert!(!a.bins().any(|b| b == 0));
                for w in a.offsets().windows(2) {
                    assert!(w[1] - w[0] == 1 || (w[0] == -1 && w[1] == 1));
                }
                let d = a.dft_order();
                assert!(d.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(Allocation::new(100, AllocClass::Small), Err(Error::UnsupportedSymbolLen(100))));
        assert!(Allocation::new(128, AllocClass::Explicit(76)).is_err());
        assert!(Allocation::new(128, AllocClass::Explicit(0)).is_err());
        assert_eq!(Allocation::new(128, AllocClass::Explicit(75)).unwrap().len(), 75);
    }
}

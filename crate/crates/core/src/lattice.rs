//! Lattice geometry: Fourier frequencies, the three-way frequency partition
//! and the zero set of the periodogram.
//!
//! All indices at the API boundary are 1-based: sites `t` and frequency
//! indices `j` both range over `{1..d1} x {1..d2}`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `d1 x d2` rectangular lattice `T = {1..d1} x {1..d2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct LatticeSpec {
    d1: usize,
    d2: usize,
}

impl LatticeSpec {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 < 2 || d2 < 2 {
            return Err(Error::InvalidLattice { d1, d2 });
        }
        Ok(Self { d1, d2 })
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    /// `|T| = d1 * d2`.
    pub fn size(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn parity(&self) -> Parity {
        match (self.d1 % 2 == 1, self.d2 % 2 == 1) {
            (true, true) => Parity::OddOdd,
            (true, false) => Parity::OddEven,
            (false, true) => Parity::EvenOdd,
            (false, false) => Parity::EvenEven,
        }
    }

    /// Row-major storage offset of a 1-based index, `t1` fastest.
    ///
    /// Panics if the index is outside the lattice.
    pub fn offset(&self, t1: usize, t2: usize) -> usize {
        assert!(
            (1..=self.d1).contains(&t1) && (1..=self.d2).contains(&t2),
            "index ({t1}, {t2}) outside {}x{} lattice",
            self.d1,
            self.d2
        );
        (t1 - 1) + (t2 - 1) * self.d1
    }

    /// Inverse of [`offset`](Self::offset).
    pub fn index_at(&self, offset: usize) -> FreqIndex {
        FreqIndex {
            j1: offset % self.d1 + 1,
            j2: offset / self.d1 + 1,
        }
    }

    /// Reduces an arbitrary integer pair into `T` modulo `(d1, d2)`.
    pub fn reduce(&self, j1: i64, j2: i64) -> FreqIndex {
        let r1 = (j1 - 1).rem_euclid(self.d1 as i64) as usize + 1;
        let r2 = (j2 - 1).rem_euclid(self.d2 as i64) as usize + 1;
        FreqIndex { j1: r1, j2: r2 }
    }

    /// Storage offset of the periodic reduction of `(j1, j2)`.
    pub fn reduced_offset(&self, j1: i64, j2: i64) -> usize {
        let r1 = (j1 - 1).rem_euclid(self.d1 as i64) as usize;
        let r2 = (j2 - 1).rem_euclid(self.d2 as i64) as usize;
        r1 + r2 * self.d1
    }

    /// All indices of `T` in storage order.
    pub fn indices(&self) -> impl Iterator<Item = FreqIndex> + '_ {
        (0..self.size()).map(move |o| self.index_at(o))
    }

    /// `lambda_j = (2 pi j1 / d1, 2 pi j2 / d2)`, for any integer pair.
    pub fn frequency(&self, j1: i64, j2: i64) -> (f64, f64) {
        (
            TAU * j1 as f64 / self.d1 as f64,
            TAU * j2 as f64 / self.d2 as f64,
        )
    }

    pub fn frequency_of(&self, j: FreqIndex) -> (f64, f64) {
        self.frequency(j.j1 as i64, j.j2 as i64)
    }

    /// Membership in `D = {(c1 d1, c2 d2)}`, where the periodogram is zeroed.
    pub fn in_d(&self, j1: i64, j2: i64) -> bool {
        j1.rem_euclid(self.d1 as i64) == 0 && j2.rem_euclid(self.d2 as i64) == 0
    }

    /// The index carrying the conjugate coefficient: `x` is unchanged and `y`
    /// flips sign.
    pub fn reflect(&self, j: FreqIndex) -> FreqIndex {
        let flip = |s: usize, d: usize| if s < d { d - s } else { d };
        FreqIndex {
            j1: flip(j.j1, self.d1),
            j2: flip(j.j2, self.d2),
        }
    }

    /// Builds the partition `T = N u N~ u M`.
    pub fn partition(&self) -> Partition {
        let (d1, d2) = (self.d1, self.d2);
        let mut n_set = Vec::with_capacity(self.size() / 2);
        let push_block = |set: &mut Vec<FreqIndex>, t1s: &[usize], t2s: &[usize]| {
            for &t2 in t2s {
                for &t1 in t1s {
                    set.push(FreqIndex { j1: t1, j2: t2 });
                }
            }
        };
        let range = |hi: usize| (1..=hi).collect::<Vec<_>>();
        let parity = self.parity();
        match parity {
            Parity::OddOdd => {
                push_block(&mut n_set, &range(d1), &range((d2 - 1) / 2));
                push_block(&mut n_set, &range((d1 - 1) / 2), &[d2]);
            }
            Parity::OddEven => {
                push_block(&mut n_set, &range(d1), &range(d2 / 2 - 1));
                push_block(&mut n_set, &range((d1 - 1) / 2), &[d2 / 2, d2]);
            }
            Parity::EvenOdd => {
                // axis roles swapped relative to the odd-even case
                push_block(&mut n_set, &range(d1 / 2 - 1), &range(d2));
                for t1 in [d1 / 2, d1] {
                    push_block(&mut n_set, &[t1], &range((d2 - 1) / 2));
                }
            }
            Parity::EvenEven => {
                push_block(&mut n_set, &range(d1), &range(d2 / 2 - 1));
                push_block(&mut n_set, &range(d1 / 2 - 1), &[d2 / 2, d2]);
            }
        }
        let n_tilde_set = n_set.iter().map(|&j| self.reflect(j)).collect();
        let idx = |j1, j2| FreqIndex { j1, j2 };
        let m_set = match parity {
            Parity::OddOdd => vec![idx(d1, d2)],
            Parity::EvenOdd => vec![idx(d1, d2), idx(d1 / 2, d2)],
            Parity::OddEven => vec![idx(d1, d2), idx(d1, d2 / 2)],
            Parity::EvenEven => vec![
                idx(d1, d2),
                idx(d1 / 2, d2),
                idx(d1, d2 / 2),
                idx(d1 / 2, d2 / 2),
            ],
        };
        Partition {
            n_set,
            n_tilde_set,
            m_set,
            parity,
        }
    }
}

impl TryFrom<[usize; 2]> for LatticeSpec {
    type Error = Error;

    fn try_from(d: [usize; 2]) -> Result<Self> {
        Self::new(d[0], d[1])
    }
}

impl From<LatticeSpec> for [usize; 2] {
    fn from(s: LatticeSpec) -> Self {
        [s.d1, s.d2]
    }
}

impl std::fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.d1, self.d2)
    }
}

impl std::str::FromStr for LatticeSpec {
    type Err = Error;

    /// Parses `"64x64"` or `"64,64"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse lattice `{s}` (expected e.g. 64x64)"));
        let (a, b) = s
            .split_once(['x', 'X', ','])
            .ok_or_else(bad)?;
        let d1 = a.trim().parse().map_err(|_| bad())?;
        let d2 = b.trim().parse().map_err(|_| bad())?;
        Self::new(d1, d2)
    }
}

/// A 1-based frequency (or site) index in `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreqIndex {
    pub j1: usize,
    pub j2: usize,
}

impl FreqIndex {
    pub fn new(j1: usize, j2: usize) -> Self {
        Self { j1, j2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    OddOdd,
    OddEven,
    EvenOdd,
    EvenEven,
}

/// `T = N u N~ u M`: an informative half, its mirror image and the points
/// carrying the sample mean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub n_set: Vec<FreqIndex>,
    pub n_tilde_set: Vec<FreqIndex>,
    pub m_set: Vec<FreqIndex>,
    pub parity: Parity,
}

//! Bead-sequence (abacus) encoding of partitions.
//!
//! A partition is the boundary walk of its Young diagram read from the lower
//! left corner: `0` for a step right, `1` for a step up, padded with
//! infinitely many `1`s on the left and `0`s on the right. Only the finite
//! window between the padding is stored, together with the absolute index of
//! its first symbol.
//!
//! Hooks of length `t` are index pairs `(i, i + t)` carrying a `0` and a `1`;
//! removing the matching border strip swaps the two beads. Swaps keep the
//! absolute indexing, so a sequence of removals can be recorded as a tuple of
//! start indices in one coordinate system.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::partitions::Partition;
use crate::tableaux::SkewShape;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Abacus {
    word: Vec<u8>,
    offset: i64,
}

/// A hook as the index pair `(start, start + length)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hook {
    pub start: i64,
    pub length: usize,
    /// Number of `1`s strictly between the two indices.
    pub height: usize,
}

impl Hook {
    pub fn end(&self) -> i64 {
        self.start + self.length as i64
    }

    /// `(-1)^height` as `±1`.
    pub fn sign(&self) -> i8 {
        if self.height.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl Abacus {
    /// Boundary-walk encoding with the first `0` at index 0.
    pub fn from_partition(lambda: &Partition) -> Self {
        let mut word = Vec::with_capacity(lambda.largest() + lambda.len());
        let mut prev = 0;
        for &part in lambda.parts().iter().rev() {
            word.extend(std::iter::repeat_n(0, part - prev));
            word.push(1);
            prev = part;
        }
        Self { word, offset: 0 }
    }

    /// A canonical window (empty, or starting with `0` and ending with `1`).
    pub fn from_window(word: Vec<u8>, offset: i64) -> Result<Self> {
        if word.iter().any(|&b| b > 1) {
            return Err(Error::Format("abacus beads must be 0 or 1".into()));
        }
        if !word.is_empty() && (word[0] != 0 || word[word.len() - 1] != 1) {
            return Err(Error::Format(
                "abacus window must begin with 0 and end with 1".into(),
            ));
        }
        Ok(Self { word, offset })
    }

    /// Trims leading `1`s and trailing `0`s off an arbitrary window, keeping
    /// absolute indices.
    pub fn from_bits(bits: &[u8], offset: i64) -> Self {
        let lead = bits.iter().take_while(|&&b| b == 1).count();
        if lead == bits.len() {
            return Self {
                word: Vec::new(),
                offset: offset + lead as i64,
            };
        }
        let word = match bits.iter().rposition(|&b| b == 1) {
            Some(last_one) if last_one >= lead => bits[lead..=last_one].to_vec(),
            _ => Vec::new(),
        };
        Self {
            word,
            offset: offset + lead as i64,
        }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Absolute index of the first window symbol.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// One past the last window index.
    pub fn end(&self) -> i64 {
        self.offset + self.word.len() as i64
    }

    pub fn bead(&self, i: i64) -> u8 {
        if i < self.offset {
            1
        } else if i >= self.end() {
            0
        } else {
            self.word[(i - self.offset) as usize]
        }
    }

    /// The same abacus translated by `k` positions.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            word: self.word.clone(),
            offset: self.offset + k,
        }
    }

    /// Representative with the first `0` at index 0.
    pub fn normalized(&self) -> Self {
        self.shifted(-self.offset)
    }

    /// `#{i >= 0 : s(i) = 1} - #{i < 0 : s(i) = 0}`; invariant under swaps,
    /// incremented by one per unit shift.
    pub fn charge(&self) -> i64 {
        let ones_right: i64 = (self.offset.max(0)..self.end().max(0))
            .map(|i| self.bead(i) as i64)
            .sum::<i64>()
            + self.offset.max(0);
        let zeros_left: i64 = (self.offset.min(0)..self.end().min(0))
            .map(|i| 1 - self.bead(i) as i64)
            .sum::<i64>()
            + (-self.end()).max(0);
        // Indices in [0, offset) are prefix ones; indices in [end, 0) are suffix zeros.
        ones_right - zeros_left
    }

    pub fn to_partition(&self) -> Partition {
        let mut zeros = 0;
        let mut parts = Vec::new();
        for &b in &self.word {
            if b == 0 {
                zeros += 1;
            } else {
                parts.push(zeros);
            }
        }
        parts.reverse();
        Partition::from_rows(parts)
    }

    /// Number of inverted pairs `i < j` with `s(i) = 0`, `s(j) = 1`.
    pub fn size(&self) -> usize {
        let mut zeros = 0;
        let mut total = 0;
        for &b in &self.word {
            if b == 0 {
                zeros += 1;
            } else {
                total += zeros;
            }
        }
        total
    }

    fn height_between(&self, i: i64, j: i64) -> usize {
        (i + 1..j).filter(|&k| self.bead(k) == 1).count()
    }

    /// The hook `(start, start + length)`, if the beads form one.
    pub fn hook_at(&self, start: i64, length: usize) -> Option<Hook> {
        let end = start + length as i64;
        (length > 0 && self.bead(start) == 0 && self.bead(end) == 1).then(|| Hook {
            start,
            length,
            height: self.height_between(start, end),
        })
    }

    /// Every hook of length `t`, by increasing start index.
    pub fn hooks_of_length(&self, t: usize) -> Vec<Hook> {
        if t == 0 || t >= self.word.len() {
            return Vec::new();
        }
        let mut hooks = Vec::new();
        // Running count of ones in the open interval (i, i + t).
        let mut ones: usize = self.word[1..t].iter().map(|&b| b as usize).sum();
        for i in 0..self.word.len() - t {
            if self.word[i] == 0 && self.word[i + t] == 1 {
                hooks.push(Hook {
                    start: self.offset + i as i64,
                    length: t,
                    height: ones,
                });
            }
            ones += self.word[i + t] as usize;
            ones -= self.word[i + 1] as usize;
        }
        hooks
    }

    pub fn is_core(&self, t: usize) -> bool {
        self.hooks_of_length(t).is_empty()
    }

    /// The swap `T_{ij}` on absolute indices, re-trimmed.
    pub fn swap(&self, i: i64, j: i64) -> Self {
        let lo = i.min(j).min(self.offset);
        let hi = (i.max(j) + 1).max(self.end());
        let mut bits: Vec<u8> = (lo..hi).map(|k| self.bead(k)).collect();
        bits.swap((i - lo) as usize, (j - lo) as usize);
        Self::from_bits(&bits, lo)
    }

    pub fn remove_border_strip(&self, hook: &Hook) -> Result<Self> {
        match self.hook_at(hook.start, hook.length) {
            Some(h) if h.height == hook.height => Ok(self.swap(hook.start, hook.end())),
            _ => Err(Error::Precondition(format!(
                "({}, {}) is not a hook of {}",
                hook.start,
                hook.end(),
                self
            ))),
        }
    }

    /// The `m` runners `s(a + ℓm)`, `a = 0..m`, indexed by absolute residue.
    pub fn quotient(&self, m: usize) -> QuotientView {
        assert!(m >= 1, "quotient modulus must be positive");
        let mi = m as i64;
        let subabaci = (0..mi)
            .map(|a| {
                let lo = (self.offset - a).div_euclid(mi);
                let hi = (self.end() - a).div_euclid(mi) + 1;
                let bits: Vec<u8> = (lo..hi).map(|l| self.bead(a + l * mi)).collect();
                Abacus::from_bits(&bits, lo)
            })
            .collect();
        QuotientView { modulus: m, subabaci }
    }
}

impl fmt::Display for Abacus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.word {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        write!(f, "@{}", self.offset)
    }
}

impl fmt::Debug for Abacus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Abacus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (word, offset) = s
            .split_once('@')
            .ok_or_else(|| Error::Format(format!("expected <bits>@<offset>, got {s:?}")))?;
        let offset = offset
            .parse()
            .map_err(|_| Error::Format(format!("bad offset in {s:?}")))?;
        let word = word
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Format(format!("bad bead {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Abacus::from_window(word, offset)
    }
}

/// The `m` runners of an abacus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientView {
    pub modulus: usize,
    /// Runner `a` holds `s(a + ℓm)` indexed by `ℓ`.
    pub subabaci: Vec<Abacus>,
}

impl QuotientView {
    /// `λ(a; m)` for each residue `a`.
    pub fn partitions(&self) -> Vec<Partition> {
        self.subabaci.iter().map(Abacus::to_partition).collect()
    }

    /// Total number of `m`-hooks removable in succession, `Σ_a |λ(a;m)|`.
    pub fn weight(&self) -> usize {
        self.subabaci.iter().map(Abacus::size).sum()
    }

    /// Interleaves the runners back into one abacus.
    pub fn reconstruct(&self) -> Abacus {
        let m = self.modulus as i64;
        let lo = (0..m)
            .map(|a| a + self.subabaci[a as usize].offset() * m)
            .min()
            .unwrap_or(0);
        let hi = (0..m)
            .map(|a| a + self.subabaci[a as usize].end() * m)
            .max()
            .unwrap_or(0);
        let bits: Vec<u8> = (lo..hi)
            .map(|i| {
                let a = i.rem_euclid(m);
                self.subabaci[a as usize].bead((i - a) / m)
            })
            .collect();
        Abacus::from_bits(&bits, lo)
    }

    /// The `m`-core: every runner pushed to its empty configuration.
    pub fn core(&self) -> Partition {
        let pushed = QuotientView {
            modulus: self.modulus,
            subabaci: self
                .subabaci
                .iter()
                .map(|s| {
                    let charge = s.charge();
                    Abacus {
                        word: Vec::new(),
                        offset: charge,
                    }
                })
                .collect(),
        };
        pushed.reconstruct().to_partition()
    }
}

/// Per-residue skew diagrams `λ(a;m) / λ′(a;m)` and their sizes `ℓ_a`.
///
/// `target` may be any representative; it is shifted to the charge of
/// `source` first so the runners line up.
pub fn skew_per_residue(source: &Abacus, target: &Abacus, m: usize) -> Result<Vec<(SkewShape, usize)>> {
    let aligned = target.shifted(source.charge() - target.charge());
    let outer = source.quotient(m);
    let inner = aligned.quotient(m);
    outer
        .subabaci
        .iter()
        .zip(&inner.subabaci)
        .enumerate()
        .map(|(a, (o, i))| {
            if o.charge() != i.charge() {
                return Err(Error::Unreachable(format!(
                    "runner {a} of {} and {} carry different charges",
                    source.to_partition(),
                    target.to_partition()
                )));
            }
            let shape = SkewShape::new(o.to_partition(), i.to_partition()).map_err(|_| {
                Error::Unreachable(format!(
                    "runner {a}: {} does not contain {}",
                    o.to_partition(),
                    i.to_partition()
                ))
            })?;
            let size = shape.size();
            Ok((shape, size))
        })
        .collect()
}

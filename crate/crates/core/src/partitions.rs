//! Integer partitions: construction, enumeration, counting, conjugation and
//! exact uniform sampling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{check_cap, Error, Result};
use crate::scalar::Count;

/// Largest `n` accepted by [`enumerate_partitions`].
pub const ENUMERATION_CAP: usize = 60;
/// Largest `n` accepted by [`sample_uniform`].
pub const SAMPLING_CAP: usize = 5000;

/// A weakly decreasing list of positive parts.
///
/// The derived ordering is lexicographic on the parts, so sorting in
/// descending order gives the reverse-lexicographic listing used for table
/// rows and columns.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    parts: Vec<usize>,
    n: usize,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Format(format!("zero part in {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Format(format!("parts not weakly decreasing: {parts:?}")));
        }
        Ok(Self::from_sorted(parts))
    }

    /// Builds a partition from parts in any order; zeros are dropped.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::from_sorted(parts)
    }

    pub(crate) fn from_sorted(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]) && parts.iter().all(|&p| p > 0));
        let n = parts.iter().sum();
        Self { parts, n }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The one-row partition `(n)`.
    pub fn row(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Self::from_sorted(vec![n])
        }
    }

    /// The one-column partition `(1, ..., 1)`.
    pub fn column(n: usize) -> Self {
        Self::from_sorted(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<usize> {
        self.parts
    }

    /// The integer being partitioned.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn multiplicity(&self, m: usize) -> usize {
        self.parts.iter().filter(|&&p| p == m).count()
    }

    pub fn multiplicities(&self) -> Multiplicities {
        let mut counts = BTreeMap::new();
        for &p in &self.parts {
            *counts.entry(p).or_insert(0) += 1;
        }
        Multiplicities { counts }
    }

    pub fn conjugate(&self) -> Self {
        let cols = self.largest();
        let parts = (0..cols)
            .map(|j| self.parts.iter().take_while(|&&p| p > j).count())
            .collect();
        Self::from_sorted(parts)
    }

    /// Hook length of every box, row by row.
    pub fn hook_lengths(&self) -> Vec<Vec<usize>> {
        let conj = self.conjugate();
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &row)| (0..row).map(|j| (row - j - 1) + (conj.parts[j] - i - 1) + 1).collect())
            .collect()
    }

    /// Length of the largest hook, `λ_1 + ℓ(λ) - 1`; zero for the empty partition.
    pub fn max_hook(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.largest() + self.len() - 1
        }
    }

    /// Diagram containment `other ⊆ self`.
    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.parts.iter().zip(&self.parts).all(|(a, b)| a <= b)
    }

    /// Removes trailing zeros after a part-wise edit.
    pub(crate) fn from_rows(mut rows: Vec<usize>) -> Self {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        Self::from_sorted(rows)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Format(format!("expected [a1,a2,...], got {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(Self::empty());
        }
        let parts = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Format(format!("bad part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(serializer)
    }
}

/// Part-size → multiplicity map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Multiplicities {
    counts: BTreeMap<usize, usize>,
}

impl Multiplicities {
    pub fn get(&self, m: usize) -> usize {
        self.counts.get(&m).copied().unwrap_or(0)
    }

    pub fn set(&mut self, m: usize, count: usize) {
        if count == 0 {
            self.counts.remove(&m);
        } else {
            self.counts.insert(m, count);
        }
    }

    /// `(part, multiplicity)` pairs in increasing part order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&m, &c)| (m, c))
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|(m, c)| m * c).sum()
    }

    pub fn to_partition(&self) -> Partition {
        let parts = self
            .counts
            .iter()
            .rev()
            .flat_map(|(&m, &c)| std::iter::repeat_n(m, c))
            .collect();
        Partition::from_sorted(parts)
    }
}

/// Iterator over the partitions of `n` in reverse-lexicographic order.
pub struct Partitions {
    current: Option<Vec<usize>>,
}

impl Partitions {
    pub fn new(n: usize) -> Self {
        let first = if n == 0 { Vec::new() } else { vec![n] };
        Self { current: Some(first) }
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let current = self.current.take()?;
        let out = Partition::from_sorted(current.clone());
        // Next in reverse-lex order: decrement the last part > 1 and refill
        // greedily with parts no larger than it.
        let mut parts = current;
        let mut ones = 0;
        while parts.last() == Some(&1) {
            parts.pop();
            ones += 1;
        }
        if let Some(last) = parts.pop() {
            let k = last - 1;
            parts.push(k);
            let mut rest = ones + 1;
            while rest > 0 {
                let q = rest.min(k);
                parts.push(q);
                rest -= q;
            }
            self.current = Some(parts);
        }
        Some(out)
    }
}

/// All partitions of `n`, largest first.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    check_cap("n", n, ENUMERATION_CAP)?;
    Ok(Partitions::new(n).collect())
}

/// `p(0), ..., p(n)` by Euler's pentagonal-number recurrence.
pub fn partition_counts<T: Count>(n: usize) -> Vec<T> {
    let mut table: Vec<T> = Vec::with_capacity(n + 1);
    table.push(T::one());
    for i in 1..=n {
        // Signs alternate in pairs; accumulate both sides separately so
        // unsigned types never go negative.
        let mut plus = T::zero();
        let mut minus = T::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let mut term = table[i - g1].clone();
            if g2 <= i {
                term = term + table[i - g2].clone();
            }
            if k % 2 == 1 {
                plus = plus + term;
            } else {
                minus = minus + term;
            }
        }
        table.push(plus - minus);
    }
    table
}

pub fn partition_count<T: Count>(n: usize) -> T {
    partition_counts::<T>(n).pop().expect("table has n + 1 entries")
}

/// Exactly uniform sampler over the partitions of `n`.
///
/// Uses the divisor-pair method: from a remainder `m`, the pair `(d, j)` is
/// drawn with probability `d·p(m - jd) / (m·p(m))` and `j` parts equal to `d`
/// are emitted. Only `p(0..=n)` is tabulated.
#[derive(Debug, Clone)]
pub struct UniformSampler {
    n: usize,
    counts: Vec<BigUint>,
}

impl UniformSampler {
    pub fn new(n: usize) -> Result<Self> {
        check_cap("n", n, SAMPLING_CAP)?;
        Ok(Self {
            n,
            counts: partition_counts(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Partition {
        let mut parts = Vec::new();
        let mut m = self.n;
        while m > 0 {
            let total = BigUint::from(m) * &self.counts[m];
            let target = rng.gen_biguint_below(&total);
            let mut acc = BigUint::zero();
            let (d, j) = 'pick: {
                for d in 1..=m {
                    for j in 1..=m / d {
                        acc += &self.counts[m - j * d] * d;
                        if acc > target {
                            break 'pick (d, j);
                        }
                    }
                }
                unreachable!("weights sum to m·p(m)");
            };
            parts.extend(std::iter::repeat_n(d, j));
            m -= j * d;
        }
        Partition::from_unsorted(parts)
    }
}

/// One uniform partition of `n`, deterministic in `seed`.
pub fn sample_uniform(n: usize, seed: u64) -> Result<Partition> {
    if n == 0 {
        return Err(Error::Precondition("sampling needs n >= 1".into()));
    }
    let sampler = UniformSampler::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sampler.sample(&mut rng))
}

/// Multinomial coefficient `(Σ k_i)! / Π k_i!`.
pub fn multinomial<T: Count>(ks: &[usize]) -> T {
    let mut acc = T::one();
    let mut total = 0usize;
    for &k in ks {
        for i in 1..=k {
            total += 1;
            // acc * total / i stays integral: it is a running binomial product.
            acc = acc * T::from_usize_exact(total) / T::from_usize_exact(i);
        }
    }
    acc
}

pub fn factorial<T: Count>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_usize_exact(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn enumerates_small_cases() {
        assert_eq!(enumerate_partitions(0).unwrap(), vec![Partition::empty()]);
        let four: Vec<String> = enumerate_partitions(4).unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(four, ["[4]", "[3,1]", "[2,2]", "[2,1,1]", "[1,1,1,1]"]);
        assert_eq!(enumerate_partitions(5).unwrap().len(), 7);
        assert!(matches!(enumerate_partitions(61), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn enumeration_is_strictly_descending() {
        let all = enumerate_partitions(12).unwrap();
        assert!(all.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn pentagonal_counts() {
        assert_eq!(partition_count::<u64>(0), 1);
        assert_eq!(partition_count::<u64>(5), 7);
        assert_eq!(partition_count::<u64>(100), 190_569_292);
        assert_eq!(partition_count::<BigUint>(100), BigUint::from(190_569_292u64));
        for n in 0..=30 {
            assert_eq!(partition_count::<u64>(n) as usize, enumerate_partitions(n).unwrap().len());
        }
    }

    #[test]
    fn conjugation() {
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        assert_eq!(Partition::row(5).conjugate(), Partition::column(5));
        assert_eq!(p(&[6, 5, 3, 1, 1, 1]).conjugate(), p(&[6, 3, 3, 2, 2, 1]));
        for n in 0..=20 {
            for lam in Partitions::new(n) {
                assert_eq!(lam.conjugate().conjugate(), lam);
            }
        }
    }

    #[test]
    fn hook_lengths_examples() {
        assert_eq!(p(&[6, 5, 3, 1, 1, 1]).hook_lengths()[0], vec![11, 7, 6, 4, 3, 1]);
        assert_eq!(p(&[1]).hook_lengths(), vec![vec![1]]);
        assert_eq!(p(&[2, 2]).hook_lengths(), vec![vec![3, 2], vec![2, 1]]);
    }

    #[test]
    fn hook_multiset_conjugation_invariant() {
        for n in 0..=15 {
            for lam in Partitions::new(n) {
                let mut a: Vec<usize> = lam.hook_lengths().concat();
                let mut b: Vec<usize> = lam.conjugate().hook_lengths().concat();
                a.sort_unstable();
                b.sort_unstable();
                assert_eq!(a, b, "{lam}");
            }
        }
    }

    #[test]
    fn hook_product_divides_factorial() {
        for n in 0..=15 {
            let nf: BigUint = factorial(n);
            for lam in Partitions::new(n) {
                let prod: BigUint = lam.hook_lengths().concat().into_iter().map(BigUint::from).product();
                assert!((&nf % prod).is_zero(), "{lam}");
            }
        }
    }

    #[test]
    fn text_format() {
        let lam: Partition = "[6,5,3,1,1,1]".parse().unwrap();
        assert_eq!(lam.to_string(), "[6,5,3,1,1,1]");
        assert_eq!("[]".parse::<Partition>().unwrap(), Partition::empty());
        assert!("[1,2]".parse::<Partition>().is_err());
        assert!("[0]".parse::<Partition>().is_err());
        assert!("3,1".parse::<Partition>().is_err());
    }

    #[test]
    fn multiplicities_round_trip() {
        for lam in Partitions::new(14) {
            let mult = lam.multiplicities();
            assert_eq!(mult.total(), 14);
            assert_eq!(mult.to_partition(), lam);
        }
    }

    #[test]
    fn sampling_basics() {
        assert_eq!(sample_uniform(1, 7).unwrap(), p(&[1]));
        assert_eq!(sample_uniform(2, 99).unwrap(), sample_uniform(2, 99).unwrap());
        assert!(sample_uniform(SAMPLING_CAP + 1, 0).is_err());
        let lam = sample_uniform(300, 3).unwrap();
        assert_eq!(lam.size(), 300);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial::<u64>(&[2, 1, 1]), 12);
        assert_eq!(multinomial::<u64>(&[4]), 1);
        assert_eq!(multinomial::<u64>(&[]), 1);
        assert_eq!(factorial::<u64>(5), 120);
    }
}

//! Murnaghan–Nakayama evaluation of `χ^λ_μ` and full character tables.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::abacus::Abacus;
use crate::error::{check_cap, Error, Result};
use crate::partitions::{factorial, Partition, Partitions};
use crate::scalar::{CharScalar, Count};

/// Largest `n` accepted by [`build_table`].
pub const TABLE_CAP: usize = 26;

/// Evaluates `χ^λ_μ` for a fixed class `μ` and any `λ ⊢ |μ|`.
///
/// Parts of `μ` are stripped largest first. Intermediate values are cached
/// under `(intermediate partition, parts consumed)`, so evaluating a whole
/// column shares work between rows.
#[derive(Debug)]
pub struct MnEvaluator<T> {
    class: Vec<usize>,
    memo: HashMap<(Partition, usize), T>,
    memoize: bool,
}

impl<T: CharScalar> MnEvaluator<T> {
    pub fn new(mu: &Partition) -> Self {
        Self {
            class: mu.parts().to_vec(),
            memo: HashMap::new(),
            memoize: true,
        }
    }

    /// Plain recursion, no cache. Used as a cross-check.
    pub fn without_memo(mu: &Partition) -> Self {
        Self {
            memoize: false,
            ..Self::new(mu)
        }
    }

    pub fn class_size(&self) -> usize {
        self.class.iter().sum()
    }

    pub fn eval(&mut self, lambda: &Partition) -> Result<T> {
        if lambda.size() != self.class_size() {
            return Err(Error::Precondition(format!(
                "|λ| = {} but |μ| = {}",
                lambda.size(),
                self.class_size()
            )));
        }
        Ok(self.step(lambda, 0))
    }

    fn step(&mut self, lambda: &Partition, consumed: usize) -> T {
        let Some(&t) = self.class.get(consumed) else {
            return T::one();
        };
        // Remaining parts are no larger than t, so one missing hook kills the term.
        if t > lambda.max_hook() {
            return T::zero();
        }
        if consumed + 1 == self.class.len() {
            // Last part: λ itself must be a single border strip of length t = |λ|.
            return match Abacus::from_partition(lambda).hooks_of_length(t).first() {
                Some(h) => sign::<T>(h.height),
                None => T::zero(),
            };
        }
        let key = (lambda.clone(), consumed);
        if self.memoize {
            if let Some(v) = self.memo.get(&key) {
                return v.clone();
            }
        }
        let abacus = Abacus::from_partition(lambda);
        let mut total = T::zero();
        for hook in abacus.hooks_of_length(t) {
            let rest = abacus.swap(hook.start, hook.end()).to_partition();
            let value = self.step(&rest, consumed + 1);
            if hook.height % 2 == 0 {
                total = total + value;
            } else {
                total = total - value;
            }
        }
        if self.memoize {
            self.memo.insert(key, total.clone());
        }
        total
    }
}

fn sign<T: CharScalar>(height: usize) -> T {
    if height.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// Exact character value `χ^λ_μ`.
pub fn chi<T: CharScalar>(lambda: &Partition, mu: &Partition) -> Result<T> {
    MnEvaluator::new(mu).eval(lambda)
}

/// Degree `f_λ = χ^λ_{(1^n)}` by the hook-length formula.
pub fn degree<T: Count>(lambda: &Partition) -> T {
    crate::tableaux::count_syt(lambda)
}

/// Centralizer order `z_μ = Π m^{a_m} a_m!`.
pub fn centralizer_order<T: Count>(mu: &Partition) -> T {
    mu.multiplicities().iter().fold(T::one(), |acc, (m, a)| {
        let power = (0..a).fold(T::one(), |x, _| x * T::from_usize_exact(m));
        acc * power * factorial::<T>(a)
    })
}

/// `(-1)^{n - ℓ(μ)}`, the sign character on the class `μ`.
pub fn class_sign(mu: &Partition) -> i8 {
    if (mu.size() - mu.len()).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Exact character table of `S_n`; rows `λ` and columns `μ` both in
/// reverse-lexicographic order. Stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable<T> {
    n: usize,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    values: Vec<T>,
}

impl<T: CharScalar> CharacterTable<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row and column labels.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn dim(&self) -> usize {
        self.partitions.len()
    }

    pub fn index_of(&self, lambda: &Partition) -> Option<usize> {
        self.index.get(lambda).copied()
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.values[row * self.dim() + col]
    }

    pub fn value(&self, lambda: &Partition, mu: &Partition) -> Option<&T> {
        Some(self.get(self.index_of(lambda)?, self.index_of(mu)?))
    }

    pub fn row(&self, row: usize) -> &[T] {
        let d = self.dim();
        &self.values[row * d..(row + 1) * d]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// One column `(χ^λ_μ)_λ` over `λ` in reverse-lexicographic order.
pub fn column<T: CharScalar>(mu: &Partition, rows: &[Partition]) -> Vec<T> {
    let mut eval = MnEvaluator::new(mu);
    rows.iter()
        .map(|lambda| eval.eval(lambda).expect("rows partition |μ|"))
        .collect()
}

/// Full table; columns are computed independently on the rayon pool.
pub fn build_table<T: CharScalar>(n: usize) -> Result<CharacterTable<T>> {
    if n == 0 {
        return Err(Error::Precondition("table needs n >= 1".into()));
    }
    check_cap("n", n, TABLE_CAP)?;
    let partitions: Vec<Partition> = Partitions::new(n).collect();
    let columns: Vec<Vec<T>> = partitions.par_iter().map(|mu| column(mu, &partitions)).collect();
    let d = partitions.len();
    let mut values = Vec::with_capacity(d * d);
    for row in 0..d {
        values.extend(columns.iter().map(|c| c[row].clone()));
    }
    let index = partitions.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    Ok(CharacterTable {
        n,
        partitions,
        index,
        values,
    })
}

/// First column pair breaking `Σ_λ χ^λ_μ χ^λ_ν = δ_{μν} z_μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityWitness<T> {
    pub mu: Partition,
    pub nu: Partition,
    pub sum: T,
    pub expected: T,
}

pub fn verify_orthogonality<T: CharScalar>(table: &CharacterTable<T>) -> std::result::Result<(), OrthogonalityWitness<T>> {
    let d = table.dim();
    for a in 0..d {
        for b in a..d {
            let sum = (0..d).fold(T::zero(), |acc, r| acc + table.get(r, a).clone() * table.get(r, b).clone());
            let expected = if a == b {
                centralizer_order::<T>(&table.partitions[a])
            } else {
                T::zero()
            };
            if sum != expected {
                return Err(OrthogonalityWitness {
                    mu: table.partitions[a].clone(),
                    nu: table.partitions[b].clone(),
                    sum,
                    expected,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn trivial_and_sign_characters() {
        for mu in Partitions::new(7) {
            assert_eq!(chi::<i64>(&Partition::row(7), &mu).unwrap(), 1);
            assert_eq!(chi::<i64>(&Partition::column(7), &mu).unwrap(), class_sign(&mu) as i64);
        }
        assert_eq!(chi::<i64>(&Partition::column(5), &p(&[2, 1, 1, 1])).unwrap(), -1);
    }

    #[test]
    fn core_gives_zero() {
        assert_eq!(chi::<i64>(&p(&[2, 2]), &p(&[4])).unwrap(), 0);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        assert!(matches!(chi::<i64>(&p(&[2, 2]), &p(&[3])), Err(Error::Precondition(_))));
    }

    #[test]
    fn small_tables() {
        let t1 = build_table::<i64>(1).unwrap();
        assert_eq!(t1.values(), &[1]);
        let t3 = build_table::<i64>(3).unwrap();
        // Class order (1,1,1), (2,1), (3) as in the textbook table.
        let classes = [p(&[1, 1, 1]), p(&[2, 1]), p(&[3])];
        let expect = [[1, 1, 1], [2, 0, -1], [1, -1, 1]];
        for (lambda, row) in [p(&[3]), p(&[2, 1]), p(&[1, 1, 1])].iter().zip(expect) {
            for (mu, v) in classes.iter().zip(row) {
                assert_eq!(*t3.value(lambda, mu).unwrap(), v, "{lambda} {mu}");
            }
        }
        assert!(build_table::<i64>(TABLE_CAP + 1).is_err());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree::<u64>(&p(&[4])), 1);
        assert_eq!(degree::<u64>(&p(&[2, 1])), 2);
        let lam = p(&[6, 5, 3, 1, 1, 1]);
        // 17! over the hook multiset read off the worked example.
        let hooks: u128 = [11, 7, 6, 4, 3, 1, 9, 5, 4, 2, 1, 6, 2, 1, 3, 2, 1].iter().product();
        let expected = factorial::<u128>(17) / hooks;
        assert_eq!(degree::<u128>(&lam), expected);
        assert_eq!(chi::<i128>(&lam, &Partition::column(17)).unwrap(), expected as i128);
    }

    #[test]
    fn centralizer_orders() {
        assert_eq!(centralizer_order::<u64>(&p(&[2, 1, 1])), 4);
        assert_eq!(centralizer_order::<u64>(&p(&[1, 1, 1, 1])), 24);
        for n in 1..=10 {
            let nf = factorial::<u64>(n);
            let total: u64 = Partitions::new(n).map(|mu| nf / centralizer_order::<u64>(&mu)).sum();
            assert_eq!(total, nf);
        }
    }

    #[test]
    fn degree_column_matches_hook_formula() {
        for n in 1..=16 {
            let ones = Partition::column(n);
            let mut eval = MnEvaluator::<BigInt>::new(&ones);
            for lam in Partitions::new(n) {
                let via_mn = eval.eval(&lam).unwrap();
                let via_hooks: BigInt = degree::<num_bigint::BigUint>(&lam).into();
                assert_eq!(via_mn, via_hooks, "{lam}");
            }
        }
    }

    #[test]
    fn conjugation_twists_by_sign() {
        for n in 1..=12 {
            let parts: Vec<Partition> = Partitions::new(n).collect();
            for mu in &parts {
                let col: Vec<i64> = column(mu, &parts);
                let s = class_sign(mu) as i64;
                for (lam, v) in parts.iter().zip(&col) {
                    let conj = chi::<i64>(&lam.conjugate(), mu).unwrap();
                    assert_eq!(conj, s * v, "{lam} {mu}");
                }
            }
        }
    }

    #[test]
    fn memoized_matches_plain_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=12);
            let lam = crate::partitions::UniformSampler::new(n).unwrap().sample(&mut rng);
            let mu = crate::partitions::UniformSampler::new(n).unwrap().sample(&mut rng);
            let a = MnEvaluator::<i64>::new(&mu).eval(&lam).unwrap();
            let b = MnEvaluator::<i64>::without_memo(&mu).eval(&lam).unwrap();
            assert_eq!(a, b, "{lam} {mu}");
        }
    }

    #[test]
    fn orthogonality_small_n() {
        for n in 1..=8 {
            let t = build_table::<BigInt>(n).unwrap();
            assert!(verify_orthogonality(&t).is_ok(), "n={n}");
        }
    }

    #[test]
    fn orthogonality_reports_a_witness() {
        let mut t = build_table::<i64>(4).unwrap();
        t.values[0] += 1;
        let w = verify_orthogonality(&t).unwrap_err();
        assert_eq!(w.mu, p(&[4]));
    }

    #[test]
    fn orthogonality_n4_spot_values() {
        let t = build_table::<i64>(4).unwrap();
        let c = t.index_of(&p(&[2, 1, 1])).unwrap();
        let s: i64 = (0..t.dim()).map(|r| t.get(r, c) * t.get(r, c)).sum();
        assert_eq!(s, 4);
        let d = t.index_of(&p(&[3, 1])).unwrap();
        let s: i64 = (0..t.dim()).map(|r| t.get(r, c) * t.get(r, d)).sum();
        assert_eq!(s, 0);
    }
}

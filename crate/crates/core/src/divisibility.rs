//! Prime-power divisibility machinery.
//!
//! * the part-combining rewrite `p^r × m → p^{r-1} × pm` and the reduction
//!   `μ → μ̃` to a fixpoint,
//! * the core criterion certifying `p^r | χ^λ_μ`,
//! * enumeration of sequences of equal-length hook removals with their signs,
//! * exhaustive verifiers for the congruence, sign constancy, count
//!   divisibility, the runner factorization of counts, the `p`-fold
//!   expansion of `χ^λ`, and the skew tableau divisibility lemma.
//!
//! Sweeps parallelize over `λ` and merge reports in enumeration order, so
//! totals and witnesses do not depend on the worker count.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::abacus::{skew_per_residue, Abacus};
use crate::characters::{build_table, chi, column, verify_orthogonality, MnEvaluator};
use crate::error::{check_cap, Error, Result};
use crate::partitions::{factorial, multinomial, Multiplicities, Partition, Partitions};
use crate::tableaux::{
    count_skew_syt, count_syt, partitions_in_box, skew_counts_below, verify_lr_expansion, SkewShape, LR_VERIFY_CAP,
};
use crate::CharValue;

/// Largest `n` for the table-backed sweeps.
pub const EXHAUSTIVE_CAP: usize = 16;
/// Default bound on the number of hook sequences visited per enumeration.
pub const SEQUENCE_CAP: u64 = 10_000_000;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A prime power `q = p^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CombineConfig {
    p: u64,
    r: u32,
    q: u64,
}

impl CombineConfig {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::Range("exponent r must be at least 1".into()));
        }
        let q = p
            .checked_pow(r)
            .ok_or_else(|| Error::Range(format!("{p}^{r} overflows")))?;
        Ok(Self { p, r, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `p^r`.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// `p^{r-1}`.
    pub fn lower(&self) -> u64 {
        self.q / self.p
    }

    fn q_usize(&self) -> usize {
        self.q as usize
    }

    fn lower_usize(&self) -> usize {
        self.lower() as usize
    }
}

impl fmt::Display for CombineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.r)
    }
}

/// Counts from an exhaustive sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checked: u64,
    pub skipped: u64,
    pub violated: u64,
    pub first_witness: Option<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violated == 0
    }

    pub fn merge(mut self, other: VerifyReport) -> VerifyReport {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violated += other.violated;
        if self.first_witness.is_none() {
            self.first_witness = other.first_witness;
        }
        self
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violated += 1;
            if self.first_witness.is_none() {
                self.first_witness = Some(witness());
            }
        }
    }

    fn merge_all(reports: impl IntoIterator<Item = VerifyReport>) -> VerifyReport {
        reports.into_iter().fold(VerifyReport::default(), VerifyReport::merge)
    }
}

/// Replaces `p^r` parts equal to `m` by `p^{r-1}` parts equal to `pm`.
pub fn combine_step(mu: &Partition, m: usize, cfg: &CombineConfig) -> Result<Partition> {
    let mut mult = mu.multiplicities();
    let have = mult.get(m);
    if m == 0 || have < cfg.q_usize() {
        return Err(Error::Precondition(format!(
            "{mu} has {have} parts equal to {m}, needs {}",
            cfg.q
        )));
    }
    mult.set(m, have - cfg.q_usize());
    let pm = m * cfg.p as usize;
    mult.set(pm, mult.get(pm) + cfg.lower_usize());
    Ok(mult.to_partition())
}

/// One batch of rewrites at a single part size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RewriteStep {
    pub part: usize,
    /// Multiplicity after incoming carries, before rewriting.
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub input: Partition,
    pub output: Partition,
    pub steps: Vec<RewriteStep>,
}

fn p_free(mut m: usize, p: usize) -> usize {
    while m.is_multiple_of(p) {
        m /= p;
    }
    m
}

/// The fixpoint `μ̃` of [`combine_step`].
///
/// Each `p`-free class `ℓ` is an independent carry chain over the sizes
/// `ℓ p^j`: level `j` keeps its multiplicity mod `p^r` and passes
/// `p^{r-1}` parts up per `p^r` removed.
pub fn reduce(mu: &Partition, cfg: &CombineConfig) -> ReductionTrace {
    let p = cfg.p as usize;
    let q = cfg.q_usize();
    let mut mult = mu.multiplicities();
    let classes: BTreeSet<usize> = mult.iter().map(|(m, _)| p_free(m, p)).collect();
    let mut steps = Vec::new();
    for class in classes {
        let mut size = class;
        let mut carry = 0;
        loop {
            let before = mult.get(size) + carry;
            let times = before / q;
            let after = before - times * q;
            if times > 0 {
                steps.push(RewriteStep { part: size, before, after });
            }
            mult.set(size, after);
            carry = times * cfg.lower_usize();
            let next = size * p;
            let more_above = mult.iter().any(|(m, _)| m >= next && p_free(m, p) == class);
            if carry == 0 && !more_above {
                break;
            }
            size = next;
        }
    }
    ReductionTrace {
        input: mu.clone(),
        output: mult.to_partition(),
        steps,
    }
}

/// Checks `χ^λ_μ ≡ χ^λ_ν (mod p^r)` for every `μ ⊢ n`, every applicable
/// combine step `μ → ν`, and every `λ ⊢ n`.
pub fn verify_combine_congruence(n: usize, cfg: &CombineConfig) -> Result<VerifyReport> {
    check_cap("n", n, EXHAUSTIVE_CAP)?;
    let table = build_table::<CharValue>(n)?;
    let q = BigInt::from(cfg.q);
    let reports = table.partitions().par_iter().map(|mu| {
        let mut report = VerifyReport::default();
        let col_mu = table.index_of(mu).unwrap();
        for (m, count) in mu.multiplicities().iter() {
            if count < cfg.q_usize() {
                continue;
            }
            let nu = combine_step(mu, m, cfg).expect("multiplicity checked");
            let col_nu = table.index_of(&nu).unwrap();
            for (row, lambda) in table.partitions().iter().enumerate() {
                let diff = table.get(row, col_mu) - table.get(row, col_nu);
                report.check((&diff % &q).is_zero(), || {
                    format!("λ={lambda} μ={mu} ν={nu}: values differ by {diff}")
                });
            }
        }
        report
    });
    Ok(VerifyReport::merge_all(reports.collect::<Vec<_>>()))
}

/// A sequence of hooks of one length, by start indices in the coordinates of
/// the initial abacus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HookSequence {
    pub length: usize,
    pub starts: Vec<i64>,
    #[serde(serialize_with = "serialize_display")]
    pub result: Abacus,
    pub sign: i8,
}

fn serialize_display<S: serde::Serializer, D: fmt::Display>(v: &D, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// All sequences ending in one partition `λ′`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceGroup {
    pub count: u64,
    pub signs: BTreeSet<i8>,
    /// First sequence in depth-first order.
    pub witness: HookSequence,
}

impl SequenceGroup {
    /// `Σ (-1)^{ΣHt}` over the group.
    pub fn signed_count(&self) -> BigInt {
        match self.signs.iter().copied().collect::<Vec<_>>().as_slice() {
            [s] => BigInt::from(self.count) * i64::from(*s),
            _ => unreachable!("signed_count needs the per-sequence sum when signs differ"),
        }
    }
}

/// Depth-first visit of every sequence of `depth` hooks of length `m`.
/// Returns the number of sequences visited; aborts past `cap`.
pub fn visit_hook_sequences(
    lambda: &Partition,
    m: usize,
    depth: usize,
    cap: u64,
    mut visit: impl FnMut(&HookSequence),
) -> Result<u64> {
    if m == 0 {
        return Err(Error::Precondition("hook length must be positive".into()));
    }
    if depth * m > lambda.size() {
        return Err(Error::Precondition(format!(
            "{depth} hooks of length {m} exceed |λ| = {}",
            lambda.size()
        )));
    }
    let mut seen = 0u64;
    let mut starts = Vec::with_capacity(depth);
    dfs(&Abacus::from_partition(lambda), m, depth, 0, &mut starts, cap, &mut seen, &mut visit)?;
    Ok(seen)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    abacus: &Abacus,
    m: usize,
    depth: usize,
    height: usize,
    starts: &mut Vec<i64>,
    cap: u64,
    seen: &mut u64,
    visit: &mut impl FnMut(&HookSequence),
) -> Result<()> {
    if starts.len() == depth {
        *seen += 1;
        if *seen > cap {
            return Err(Error::SizeCap {
                what: "hook sequences",
                value: *seen,
                cap,
            });
        }
        visit(&HookSequence {
            length: m,
            starts: starts.clone(),
            result: abacus.clone(),
            sign: if height.is_multiple_of(2) { 1 } else { -1 },
        });
        return Ok(());
    }
    for hook in abacus.hooks_of_length(m) {
        starts.push(hook.start);
        let next = abacus.swap(hook.start, hook.end());
        dfs(&next, m, depth, height + hook.height, starts, cap, seen, visit)?;
        starts.pop();
    }
    Ok(())
}

/// Sequences of `depth` hooks of length `m`, grouped by the final partition.
pub fn enumerate_hook_sequences(lambda: &Partition, m: usize, depth: usize) -> Result<BTreeMap<Partition, SequenceGroup>> {
    enumerate_hook_sequences_capped(lambda, m, depth, SEQUENCE_CAP)
}

pub fn enumerate_hook_sequences_capped(
    lambda: &Partition,
    m: usize,
    depth: usize,
    cap: u64,
) -> Result<BTreeMap<Partition, SequenceGroup>> {
    let mut groups: BTreeMap<Partition, SequenceGroup> = BTreeMap::new();
    visit_hook_sequences(lambda, m, depth, cap, |seq| {
        let key = seq.result.to_partition();
        groups
            .entry(key)
            .and_modify(|g| {
                g.count += 1;
                g.signs.insert(seq.sign);
            })
            .or_insert_with(|| SequenceGroup {
                count: 1,
                signs: BTreeSet::from([seq.sign]),
                witness: seq.clone(),
            });
    })?;
    Ok(groups)
}

/// The common sign `(-1)^{ΣHt}` of any route from `λ` to `λ′` by removing
/// hooks of length `m`, read off one witness route.
pub fn epsilon(lambda: &Partition, target: &Partition, m: usize) -> Result<i8> {
    let unreachable = || Error::Unreachable(format!("{target} from {lambda} by {m}-hooks"));
    if m == 0 || target.size() > lambda.size() || !(lambda.size() - target.size()).is_multiple_of(m) {
        return Err(unreachable());
    }
    fn search(current: &Partition, target: &Partition, m: usize, height: usize) -> Option<usize> {
        if current == target {
            return Some(height);
        }
        if current.size() <= target.size() || !current.contains(target) {
            return None;
        }
        let abacus = Abacus::from_partition(current);
        abacus.hooks_of_length(m).into_iter().find_map(|h| {
            let next = abacus.swap(h.start, h.end()).to_partition();
            search(&next, target, m, height + h.height)
        })
    }
    let height = search(lambda, target, m, 0).ok_or_else(unreachable)?;
    Ok(if height % 2 == 0 { 1 } else { -1 })
}

/// Both sides of the runner factorization of a sequence count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationCheck {
    pub sequences: u64,
    /// `ℓ_a` per runner.
    pub runner_sizes: Vec<usize>,
    pub multinomial: BigUint,
    pub skew_counts: Vec<BigUint>,
    pub product: BigUint,
}

impl FactorizationCheck {
    pub fn holds(&self) -> bool {
        BigUint::from(self.sequences) == self.product
    }
}

/// Compares the number of `m`-hook routes from `λ` to `λ′` with
/// `multinomial(R; ℓ_1..ℓ_m) · Π_a f_{λ(a;m)/λ′(a;m)}`.
pub fn verify_count_factorization(lambda: &Partition, target: &Partition, m: usize) -> Result<FactorizationCheck> {
    let source = Abacus::from_partition(lambda);
    let per_runner = skew_per_residue(&source, &Abacus::from_partition(target), m)?;
    let runner_sizes: Vec<usize> = per_runner.iter().map(|(_, l)| *l).collect();
    let depth: usize = runner_sizes.iter().sum();
    let sequences = if depth == 0 {
        1
    } else {
        enumerate_hook_sequences(lambda, m, depth)?
            .get(target)
            .map_or(0, |g| g.count)
    };
    let multinomial: BigUint = multinomial(&runner_sizes);
    let skew_counts: Vec<BigUint> = per_runner.iter().map(|(s, _)| count_skew_syt(s)).collect();
    let product = skew_counts.iter().fold(multinomial.clone(), |acc, f| acc * f);
    Ok(FactorizationCheck {
        sequences,
        runner_sizes,
        multinomial,
        skew_counts,
        product,
    })
}

/// Sign constancy within every group, over `λ ⊢ n` and depths `1..=max_depth`.
pub fn verify_lemma61(n: usize, m: usize, max_depth: usize) -> Result<VerifyReport> {
    sweep_groups(n, m, max_depth, |lambda, depth, target, group, report| {
        report.check(group.signs.len() == 1, || {
            format!("λ={lambda} λ′={target} m={m} R={depth}: signs {:?}", group.signs)
        });
    })
}

/// The runner factorization for every group, over `λ ⊢ n` and depths `1..=max_depth`.
pub fn verify_factorization(n: usize, m: usize, max_depth: usize) -> Result<VerifyReport> {
    sweep_groups(n, m, max_depth, |lambda, depth, target, group, report| {
        match verify_count_factorization(lambda, target, m) {
            Ok(check) => report.check(check.holds() && check.sequences == group.count, || {
                format!(
                    "λ={lambda} λ′={target} m={m} R={depth}: {} routes vs {}",
                    group.count, check.product
                )
            }),
            Err(e) => report.check(false, || format!("λ={lambda} λ′={target} m={m}: {e}")),
        }
    })
}

fn sweep_groups(
    n: usize,
    m: usize,
    max_depth: usize,
    check: impl Fn(&Partition, usize, &Partition, &SequenceGroup, &mut VerifyReport) + Sync,
) -> Result<VerifyReport> {
    if m == 0 {
        return Err(Error::Precondition("hook length must be positive".into()));
    }
    let lambdas: Vec<Partition> = Partitions::new(n).collect();
    let reports = lambdas
        .par_iter()
        .map(|lambda| {
            let mut report = VerifyReport::default();
            for depth in 1..=max_depth {
                if depth * m > n {
                    break;
                }
                for (target, group) in enumerate_hook_sequences(lambda, m, depth)? {
                    check(lambda, depth, &target, &group, &mut report);
                }
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport::merge_all(reports))
}

/// `p` divides every group count when `λ` is a `p^{r-1}m`-core and
/// `R = p^{r-1}` hooks of length `m` are removed. Non-cores are skipped.
pub fn verify_lemma62(n: usize, m: usize, cfg: &CombineConfig) -> Result<VerifyReport> {
    if m == 0 {
        return Err(Error::Precondition("hook length must be positive".into()));
    }
    let depth = cfg.lower_usize();
    let lambdas: Vec<Partition> = Partitions::new(n).collect();
    let reports = lambdas
        .par_iter()
        .map(|lambda| {
            let mut report = VerifyReport::default();
            if !Abacus::from_partition(lambda).is_core(depth * m) {
                report.skipped += 1;
                return Ok(report);
            }
            if depth * m > n {
                return Ok(report);
            }
            for (target, group) in enumerate_hook_sequences(lambda, m, depth)? {
                report.check(group.count % cfg.p == 0, || {
                    format!("λ={lambda} λ′={target} m={m}: {} routes", group.count)
                });
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport::merge_all(reports))
}

/// Signed route counts `c_{λ′} = Σ (-1)^{ΣHt}` over sequences of
/// `p^{r-1}` hooks of length `m`.
pub fn pm1_coefficients(lambda: &Partition, m: usize, cfg: &CombineConfig) -> Result<BTreeMap<Partition, BigInt>> {
    let mut coeffs: BTreeMap<Partition, BigInt> = BTreeMap::new();
    visit_hook_sequences(lambda, m, cfg.lower_usize(), SEQUENCE_CAP, |seq| {
        *coeffs.entry(seq.result.to_partition()).or_default() += i64::from(seq.sign);
    })?;
    Ok(coeffs)
}

/// Checks the `p`-fold expansion of `χ^λ` on the classes
/// `τ ∪ (m^{p^{r-1}})` for each residual class `τ`.
///
/// A `λ` that is not a `p^{r-1}m`-core, or with `p^{r-1}m > |λ|`, is
/// reported as skipped.
pub fn verify_prop_pm1(lambda: &Partition, m: usize, cfg: &CombineConfig, residuals: &[Partition]) -> Result<VerifyReport> {
    let depth = cfg.lower_usize();
    let mut report = VerifyReport::default();
    let removed = depth * m;
    if m == 0 || removed > lambda.size() || !Abacus::from_partition(lambda).is_core(removed) {
        report.skipped += 1;
        return Ok(report);
    }
    let coeffs = pm1_coefficients(lambda, m, cfg)?;
    let p = BigInt::from(cfg.p);
    for (target, c) in &coeffs {
        report.check((c % &p).is_zero(), || format!("λ={lambda} λ′={target} m={m}: coefficient {c}"));
    }
    for tau in residuals {
        if tau.size() + removed != lambda.size() {
            return Err(Error::Precondition(format!(
                "residual class {tau} does not have size {}",
                lambda.size() - removed
            )));
        }
        let mut parts = tau.parts().to_vec();
        parts.extend(std::iter::repeat_n(m, depth));
        let mu = Partition::from_unsorted(parts);
        let direct: BigInt = chi(lambda, &mu)?;
        let mut eval = MnEvaluator::<BigInt>::new(tau);
        let mut expanded = BigInt::zero();
        for (target, c) in &coeffs {
            expanded += c * eval.eval(target)?;
        }
        report.check(expanded == direct, || {
            format!("λ={lambda} τ={tau} m={m}: expansion {expanded} vs χ = {direct}")
        });
    }
    Ok(report)
}

/// [`verify_prop_pm1`] over every `λ ⊢ n` and every `τ ⊢ n - p^{r-1}m`.
pub fn verify_prop_pm1_sweep(n: usize, m: usize, cfg: &CombineConfig) -> Result<VerifyReport> {
    let removed = cfg.lower_usize() * m;
    let residuals: Vec<Partition> = if removed <= n {
        Partitions::new(n - removed).collect()
    } else {
        Vec::new()
    };
    let lambdas: Vec<Partition> = Partitions::new(n).collect();
    let reports = lambdas
        .par_iter()
        .map(|lambda| verify_prop_pm1(lambda, m, cfg, &residuals))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport::merge_all(reports))
}

/// Outcome of testing the core criterion on one `(λ, μ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremCheck {
    pub hypothesis_holds: bool,
    pub divides: bool,
    /// The part sizes `m_1 < ... < m_r` that satisfied the hypothesis.
    pub parts: Option<Vec<usize>>,
}

/// Distinct sums `Σ k_i m_i` over `k ∈ [0, K]^r` with `max k_i = K`.
pub fn tuple_sums(parts: &[usize], k_max: usize) -> BTreeSet<usize> {
    let r = parts.len();
    let mut sums = BTreeSet::new();
    let mut ks = vec![0usize; r];
    loop {
        if ks.contains(&k_max) {
            sums.insert(ks.iter().zip(parts).map(|(k, m)| k * m).sum());
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == r {
                return sums;
            }
            ks[i] += 1;
            if ks[i] <= k_max {
                break;
            }
            ks[i] = 0;
            i += 1;
        }
    }
}

fn hook_length_set(lambda: &Partition) -> HashSet<usize> {
    lambda.hook_lengths().concat().into_iter().collect()
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The part sizes of `μ` certifying the core hypothesis for `λ`, if any.
///
/// Tries every choice of `r` distinct sizes with multiplicity at least
/// `p^{r-1}`; `λ` must be a core for every tuple sum of that choice.
pub fn core_hypothesis(lambda: &Partition, mu: &Partition, cfg: &CombineConfig) -> Option<(Vec<usize>, BTreeSet<usize>)> {
    let k_max = cfg.lower_usize();
    let eligible: Vec<usize> = mu
        .multiplicities()
        .iter()
        .filter(|&(_, c)| c >= k_max)
        .map(|(m, _)| m)
        .collect();
    let hooks = hook_length_set(lambda);
    combinations(&eligible, cfg.r as usize).into_iter().find_map(|choice| {
        let sums = tuple_sums(&choice, k_max);
        sums.iter().all(|t| !hooks.contains(t)).then_some((choice, sums))
    })
}

pub fn check_divisibility_theorem(lambda: &Partition, mu: &Partition, cfg: &CombineConfig) -> Result<TheoremCheck> {
    let value: BigInt = chi(lambda, mu)?;
    let hypothesis = core_hypothesis(lambda, mu, cfg);
    Ok(TheoremCheck {
        hypothesis_holds: hypothesis.is_some(),
        divides: (value % BigInt::from(cfg.q)).is_zero(),
        parts: hypothesis.map(|(parts, _)| parts),
    })
}

/// Exhaustive check of hypothesis ⇒ divisibility over `λ, μ ⊢ n`.
/// Pairs failing the hypothesis count as skipped.
pub fn verify_theorem3(n: usize, cfg: &CombineConfig) -> Result<VerifyReport> {
    check_cap("n", n, EXHAUSTIVE_CAP)?;
    let table = build_table::<CharValue>(n)?;
    let q = BigInt::from(cfg.q);
    let reports = table.partitions().par_iter().enumerate().map(|(row, lambda)| {
        let mut report = VerifyReport::default();
        for (col, mu) in table.partitions().iter().enumerate() {
            if core_hypothesis(lambda, mu, cfg).is_none() {
                report.skipped += 1;
                continue;
            }
            let v = table.get(row, col);
            report.check((v % &q).is_zero(), || format!("λ={lambda} μ={mu}: χ = {v}"));
        }
        report
    });
    Ok(VerifyReport::merge_all(reports.collect::<Vec<_>>()))
}

/// Record of a certified divisibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub reduced: Partition,
    pub parts: Vec<usize>,
    /// Every `t` for which `λ` was confirmed to be a `t`-core.
    pub core_lengths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineOutcome {
    pub divides: bool,
    pub certificate: Option<Certificate>,
}

/// Decides `p^r | χ^λ_μ`: reduce `μ`, and if the core criterion holds for
/// `μ̃` certify without evaluating `χ^λ_μ`; otherwise evaluate directly.
pub fn theorem1_pipeline(lambda: &Partition, mu: &Partition, cfg: &CombineConfig) -> Result<PipelineOutcome> {
    if lambda.size() != mu.size() {
        return Err(Error::Precondition(format!("|λ| = {} but |μ| = {}", lambda.size(), mu.size())));
    }
    let reduced = reduce(mu, cfg).output;
    if let Some((parts, sums)) = core_hypothesis(lambda, &reduced, cfg) {
        return Ok(PipelineOutcome {
            divides: true,
            certificate: Some(Certificate {
                reduced,
                parts,
                core_lengths: sums.into_iter().collect(),
            }),
        });
    }
    let value: BigInt = chi(lambda, mu)?;
    Ok(PipelineOutcome {
        divides: (value % BigInt::from(cfg.q)).is_zero(),
        certificate: None,
    })
}

/// Pipeline statistics over all `λ, μ ⊢ n`: `checked` counts certified
/// pairs (each confirmed against the table), `skipped` the fallbacks.
pub fn verify_pipeline(n: usize, cfg: &CombineConfig) -> Result<VerifyReport> {
    check_cap("n", n, EXHAUSTIVE_CAP)?;
    let lambdas: Vec<Partition> = Partitions::new(n).collect();
    let reports = lambdas.par_iter().map(|mu| {
        let mut report = VerifyReport::default();
        let reduced = reduce(mu, cfg).output;
        let values: Vec<BigInt> = column(mu, &lambdas);
        for (lambda, v) in lambdas.iter().zip(&values) {
            if core_hypothesis(lambda, &reduced, cfg).is_some() {
                report.check(v.to_i64().is_some_and(|x| x % cfg.q as i64 == 0) || (v % BigInt::from(cfg.q)).is_zero(), || {
                    format!("λ={lambda} μ={mu} μ̃={reduced}: χ = {v}")
                });
            } else {
                report.skipped += 1;
            }
        }
        report
    });
    Ok(VerifyReport::merge_all(reports.collect::<Vec<_>>()))
}

/// `p | f_{π/τ}` for every skew shape of size `p^t` in a `rows × cols`
/// box that is not a border strip. Border strips count as skipped.
pub fn verify_lemma81(size: usize, p: u64, rows: usize, cols: usize) -> Result<VerifyReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut s = size;
    while s > 1 && s.is_multiple_of(p as usize) {
        s /= p as usize;
    }
    if size == 0 || s != 1 {
        return Err(Error::Precondition(format!("skew size {size} is not a power of {p}")));
    }
    let outers = partitions_in_box(rows, cols);
    let reports = outers.par_iter().filter(|pi| pi.size() >= size).map(|pi| {
        let mut report = VerifyReport::default();
        let counts = skew_counts_below::<u64>(pi, size);
        let mut inners: Vec<(&Partition, &u64)> =
            counts.iter().filter(|(sigma, _)| pi.size() - sigma.size() == size).collect();
        inners.sort();
        for (tau, f) in inners {
            let shape = SkewShape::new(pi.clone(), tau.clone()).expect("σ ⊆ π");
            if shape.is_border_strip().expect("nonempty") {
                report.skipped += 1;
                continue;
            }
            report.check(f % p == 0, || format!("{shape}: f = {f}"));
        }
        report
    });
    Ok(VerifyReport::merge_all(reports.collect::<Vec<_>>()))
}

/// Multiplicity of each part size, mod `p^{r-1}`, grouped by `p`-free class.
pub fn residues_by_class(mult: &Multiplicities, cfg: &CombineConfig) -> BTreeMap<usize, u64> {
    mult.iter()
        .filter(|&(_, c)| !(c as u64).is_multiple_of(cfg.lower()))
        .map(|(m, c)| (m, c as u64 % cfg.lower()))
        .collect()
}

/// The Littlewood–Richardson expansion of `f_{π/τ}` for every nonempty
/// skew shape of size at most `max_size` inside a `rows × cols` box.
pub fn verify_lr_box(rows: usize, cols: usize, max_size: usize) -> Result<VerifyReport> {
    check_cap("skew size", max_size, LR_VERIFY_CAP)?;
    let shapes = partitions_in_box(rows, cols);
    let reports = shapes
        .par_iter()
        .map(|pi| {
            let mut report = VerifyReport::default();
            for tau in &shapes {
                if tau.size() >= pi.size() || pi.size() - tau.size() > max_size || !pi.contains(tau) {
                    continue;
                }
                let shape = SkewShape::new(pi.clone(), tau.clone()).expect("τ ⊆ π");
                let check = verify_lr_expansion::<BigUint>(&shape)?;
                report.check(check.holds(), || {
                    format!("{shape}: f = {} but expansion = {}", check.skew_count, check.expansion)
                });
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport::merge_all(reports))
}

/// Column orthogonality, the degree column against the hook-length
/// formula, and `Σ f_λ² = n!` for the table of `S_n`.
pub fn verify_table(n: usize) -> Result<VerifyReport> {
    let table = build_table::<CharValue>(n)?;
    let mut report = VerifyReport::default();
    let ortho = verify_orthogonality(&table);
    report.check(ortho.is_ok(), || {
        let w = ortho.clone().unwrap_err();
        format!("columns {} and {}: sum {} expected {}", w.mu, w.nu, w.sum, w.expected)
    });
    let identity = table.index_of(&Partition::column(n)).expect("identity class");
    let mut squares = BigUint::zero();
    for (row, lambda) in table.partitions().iter().enumerate() {
        let f: BigUint = count_syt(lambda);
        let value = table.get(row, identity);
        report.check(value.to_biguint().as_ref() == Some(&f), || {
            format!("degree of {lambda}: table {value}, hook formula {f}")
        });
        squares += &f * &f;
    }
    let total: BigUint = factorial(n);
    report.check(squares == total, || format!("sum of squared degrees {squares} vs {total}"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn cfg(p: u64, r: u32) -> CombineConfig {
        CombineConfig::new(p, r).unwrap()
    }

    #[test]
    fn config_validation() {
        assert_eq!(cfg(2, 3).q(), 8);
        assert_eq!(cfg(3, 2).lower(), 3);
        assert!(matches!(CombineConfig::new(4, 2), Err(Error::NotPrime(4))));
        assert!(CombineConfig::new(2, 0).is_err());
    }

    #[test]
    fn combine_examples() {
        assert_eq!(combine_step(&p(&[1, 1, 1, 1]), 1, &cfg(2, 2)).unwrap(), p(&[2, 2]));
        assert_eq!(combine_step(&p(&[3, 1, 1, 1, 1]), 1, &cfg(2, 2)).unwrap(), p(&[3, 2, 2]));
        assert!(matches!(combine_step(&p(&[1, 1, 1]), 1, &cfg(2, 2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn combine_preserves_size_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let configs = [cfg(2, 1), cfg(2, 2), cfg(3, 1), cfg(2, 3), cfg(3, 2)];
        let mut applied = 0;
        while applied < 1000 {
            let n = rand::Rng::gen_range(&mut rng, 4..=40);
            let mu = crate::partitions::UniformSampler::new(n).unwrap().sample(&mut rng);
            let c = configs.choose(&mut rng).unwrap();
            let options: Vec<usize> =
                mu.multiplicities().iter().filter(|&(_, k)| k >= c.q() as usize).map(|(m, _)| m).collect();
            if let Some(&m) = options.choose(&mut rng) {
                let nu = combine_step(&mu, m, c).unwrap();
                assert_eq!(nu.size(), mu.size());
                assert_eq!(nu.multiplicity(m), mu.multiplicity(m) - c.q() as usize);
                applied += 1;
            }
        }
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&p(&[1; 8]), &cfg(2, 2)).output, p(&[4, 4]));
        let mu = p(&[5, 3, 3, 2, 1]);
        assert_eq!(reduce(&mu, &cfg(2, 2)).output, mu);
        assert!(reduce(&mu, &cfg(2, 2)).steps.is_empty());
    }

    fn random_order_reduce(mu: &Partition, c: &CombineConfig, rng: &mut ChaCha8Rng) -> Partition {
        let mut current = mu.clone();
        loop {
            let options: Vec<usize> =
                current.multiplicities().iter().filter(|&(_, k)| k >= c.q() as usize).map(|(m, _)| m).collect();
            match options.choose(rng) {
                None => return current,
                Some(&m) => current = combine_step(&current, m, c).unwrap(),
            }
        }
    }

    #[test]
    fn reduction_is_confluent_and_preserves_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for c in [cfg(2, 2), cfg(2, 3), cfg(3, 2)] {
            for n in 0..=14 {
                for mu in Partitions::new(n) {
                    let trace = reduce(&mu, &c);
                    assert_eq!(trace.output.size(), n);
                    assert!(trace.output.multiplicities().iter().all(|(_, k)| k < c.q() as usize));
                    assert_eq!(trace.output, random_order_reduce(&mu, &c, &mut rng), "{mu} {c}");
                    // Every multiplicity is preserved mod p^{r-1}.
                    let before = mu.multiplicities();
                    let after = trace.output.multiplicities();
                    for m in 1..=n {
                        assert_eq!(before.get(m) as u64 % c.lower(), after.get(m) as u64 % c.lower());
                    }
                    assert_eq!(residues_by_class(&before, &c), residues_by_class(&after, &c));
                }
            }
        }
    }

    #[test]
    fn combine_congruence_small() {
        let report = verify_combine_congruence(4, &cfg(2, 2)).unwrap();
        assert_eq!(report.checked, 5);
        assert!(report.passed());
        for c in [cfg(2, 1), cfg(3, 1), cfg(2, 2)] {
            for n in 1..=12 {
                assert!(verify_combine_congruence(n, &c).unwrap().passed(), "{n} {c}");
            }
        }
    }

    #[test]
    fn hook_sequence_examples() {
        let groups = enumerate_hook_sequences(&p(&[2, 2]), 1, 4).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[&Partition::empty()].count, 2);

        assert!(enumerate_hook_sequences(&p(&[3, 1]), 5, 0).unwrap().len() <= 1);
        assert!(enumerate_hook_sequences(&p(&[4, 4]), 6, 1).unwrap().is_empty());

        let groups = enumerate_hook_sequences(&p(&[2, 2]), 3, 1).unwrap();
        let g = &groups[&p(&[1])];
        assert_eq!(g.count, 1);
        assert_eq!(g.signs, BTreeSet::from([-1]));
        assert!(enumerate_hook_sequences(&p(&[2, 2]), 3, 2).is_err());
    }

    #[test]
    fn sequence_cap_aborts() {
        let lam = p(&[4, 3, 2, 1]);
        assert!(matches!(
            enumerate_hook_sequences_capped(&lam, 1, 10, 100),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(&p(&[3, 2]), &p(&[3, 2]), 2).unwrap(), 1);
        assert_eq!(epsilon(&p(&[2, 2]), &p(&[1]), 3).unwrap(), -1);
        assert_eq!(epsilon(&p(&[2, 2]), &p(&[2]), 1).unwrap(), 1);
        assert!(matches!(epsilon(&p(&[2, 2]), &p(&[3]), 1), Err(Error::Unreachable(_))));
        assert!(matches!(epsilon(&p(&[2, 2]), &p(&[1]), 2), Err(Error::Unreachable(_))));
    }

    #[test]
    fn epsilon_agrees_with_every_route() {
        for n in 0..=12 {
            for lam in Partitions::new(n) {
                for m in 1..=4 {
                    for depth in 1..=3 {
                        if depth * m > n {
                            break;
                        }
                        for (target, group) in enumerate_hook_sequences(&lam, m, depth).unwrap() {
                            assert_eq!(group.signs.len(), 1, "{lam} → {target}");
                            assert_eq!(BTreeSet::from([epsilon(&lam, &target, m).unwrap()]), group.signs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn factorization_examples() {
        let check = verify_count_factorization(&p(&[2, 2]), &Partition::empty(), 1).unwrap();
        assert_eq!(check.sequences, 2);
        assert_eq!(check.multinomial, BigUint::from(1u32));
        assert!(check.holds());

        let lam = p(&[6, 5, 3, 1, 1, 1]);
        let check = verify_count_factorization(&lam, &p(&[6, 2, 1, 1, 1, 1]), 5).unwrap();
        assert_eq!(check.sequences, 1);
        assert_eq!(check.runner_sizes.iter().sum::<usize>(), 1);
        assert!(check.holds());

        let same = verify_count_factorization(&lam, &lam, 3).unwrap();
        assert_eq!(same.sequences, 1);
        assert!(same.holds());
    }

    #[test]
    fn lemma62_small() {
        // r = 1: an m-core has no m-hooks, so nothing is counted.
        let r1 = verify_lemma62(8, 2, &cfg(2, 1)).unwrap();
        assert_eq!(r1.checked, 0);
        assert!(r1.passed());
        for n in 1..=12 {
            assert!(verify_lemma62(n, 1, &cfg(2, 2)).unwrap().passed());
        }
        let groups = enumerate_hook_sequences(&p(&[2, 2]), 1, 4).unwrap();
        assert_eq!(groups[&Partition::empty()].count % 2, 0);
    }

    #[test]
    fn prop_pm1_small() {
        // r = 1 and λ an m-core: the expansion is empty and χ vanishes.
        let lam = p(&[2, 2]);
        let report = verify_prop_pm1(&lam, 4, &cfg(2, 1), &[Partition::empty()]).unwrap();
        assert!(report.passed());
        assert!(pm1_coefficients(&lam, 4, &cfg(2, 1)).unwrap().is_empty());
        assert_eq!(chi::<i64>(&lam, &p(&[4])).unwrap(), 0);

        for n in 2..=10 {
            assert!(verify_prop_pm1_sweep(n, 1, &cfg(2, 2)).unwrap().passed(), "n={n}");
        }
    }

    #[test]
    fn prop_pm1_coefficients_are_signed_group_counts() {
        let c = cfg(2, 2);
        for lam in Partitions::new(9) {
            if !Abacus::from_partition(&lam).is_core(2) {
                continue;
            }
            let coeffs = pm1_coefficients(&lam, 1, &c).unwrap();
            for (target, group) in enumerate_hook_sequences(&lam, 1, 2).unwrap() {
                let eps = epsilon(&lam, &target, 1).unwrap();
                assert_eq!(coeffs[&target], BigInt::from(group.count) * i64::from(eps));
                assert_eq!(coeffs[&target], group.signed_count());
            }
        }
    }

    #[test]
    fn theorem_examples() {
        let check = check_divisibility_theorem(&p(&[2, 2]), &p(&[4]), &cfg(2, 1)).unwrap();
        assert!(check.hypothesis_holds);
        assert!(check.divides);
        assert_eq!(check.parts, Some(vec![4]));
        assert!(check_divisibility_theorem(&p(&[2, 2]), &p(&[3]), &cfg(2, 1)).is_err());
    }

    #[test]
    fn tuple_sum_counts() {
        // Tuples with some coordinate at the maximum: (K+1)^r - K^r, at most r (K+1)^{r-1}.
        for (k, r) in [(2usize, 2usize), (4, 3), (3, 2)] {
            let parts: Vec<usize> = (0..r).map(|i| 10usize.pow(i as u32)).collect();
            let sums = tuple_sums(&parts, k);
            let exact = (k + 1).pow(r as u32) - k.pow(r as u32);
            assert_eq!(sums.len(), exact);
            assert!(sums.len() <= (k + 1).pow(r as u32));
            assert!(sums.len() <= r * (k + 1).pow(r as u32 - 1));
        }
    }

    #[test]
    fn theorem3_and_pipeline_small() {
        for c in [cfg(2, 2), cfg(3, 2), cfg(2, 3)] {
            for n in 1..=12 {
                assert!(verify_theorem3(n, &c).unwrap().passed(), "n={n} {c}");
            }
        }
        for n in 1..=12 {
            assert!(verify_pipeline(n, &cfg(2, 2)).unwrap().passed(), "n={n}");
        }
    }

    #[test]
    fn pipeline_fallback_is_correct() {
        let c = cfg(2, 2);
        for lam in Partitions::new(8) {
            for mu in Partitions::new(8) {
                let outcome = theorem1_pipeline(&lam, &mu, &c).unwrap();
                let v: i64 = chi(&lam, &mu).unwrap();
                if outcome.certificate.is_none() {
                    assert_eq!(outcome.divides, v % 4 == 0);
                } else {
                    assert_eq!(v % 4, 0);
                }
            }
        }
    }

    #[test]
    fn table_and_lr_sweeps_small() {
        for n in 1..=8 {
            let report = verify_table(n).unwrap();
            assert!(report.passed(), "{report:?}");
        }
        assert!(verify_lr_box(4, 4, 5).unwrap().passed());
        assert!(verify_lr_box(6, 6, 10).is_err());
    }

    #[test]
    fn lemma81_small_box() {
        let report = verify_lemma81(4, 2, 4, 4).unwrap();
        assert!(report.passed());
        assert!(report.checked > 0 && report.skipped > 0);
        assert!(verify_lemma81(6, 2, 4, 4).is_err());
        assert!(verify_lemma81(4, 4, 4, 4).is_err());
    }
}

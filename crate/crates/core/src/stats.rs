//! Desk-scale statistics: divisibility densities of character tables,
//! t-core counts, partitions into powers of `p`, the generating function
//! `F_p`, the many-large-parts property on random partitions, and the
//! quantities entering the exceptional-set bound.
//!
//! Real-valued quantities are evaluated in a [`Float`] type with explicit
//! truncation error bounds; verdicts that can be decided in integers are.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{Float, One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abacus::Abacus;
use crate::characters::{build_table, CharacterTable};
use crate::divisibility::{reduce, CombineConfig};
use crate::error::{check_cap, Error, Result};
use crate::partitions::{partition_count, Partition, Partitions, UniformSampler, ENUMERATION_CAP, SAMPLING_CAP};
use crate::{CharValue, Count};

pub const PPOWER_CAP: usize = 100_000;
pub const RESTRICTED_ENUMERATION_CAP: usize = 2000;
/// Bound on the number of `p`-power partitions visited by enumeration.
pub const RESTRICTED_VISIT_CAP: u64 = 10_000_000;
/// Product factors of `F_p(t)` are kept while `p^j / t ≤` this.
pub const FP_CUTOFF: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub n: usize,
    pub modulus: u64,
    pub total: u64,
    pub divisible: u64,
    pub zero: u64,
    pub positive: u64,
    pub negative: u64,
}

impl DensityReport {
    pub fn divisible_density(&self) -> f64 {
        self.divisible as f64 / self.total as f64
    }

    pub fn zero_density(&self) -> f64 {
        self.zero as f64 / self.total as f64
    }
}

pub fn density_report(n: usize, modulus: u64) -> Result<DensityReport> {
    let table = build_table::<CharValue>(n)?;
    density_from_table(&table, modulus)
}

/// Entry counts of an already computed table.
pub fn density_from_table<T: crate::CharScalar>(table: &CharacterTable<T>, modulus: u64) -> Result<DensityReport> {
    if modulus == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    let mut report = DensityReport {
        n: table.n(),
        modulus,
        total: 0,
        divisible: 0,
        zero: 0,
        positive: 0,
        negative: 0,
    };
    for v in table.values() {
        report.total += 1;
        if v.divisible_by(modulus) {
            report.divisible += 1;
        }
        if v.is_zero() {
            report.zero += 1;
        } else if *v > T::zero() {
            report.positive += 1;
        } else {
            report.negative += 1;
        }
    }
    Ok(report)
}

/// Number of partitions of `n` having a hook of length `t`.
pub fn count_non_tcores(n: usize, t: usize) -> Result<BigUint> {
    check_cap("n", n, ENUMERATION_CAP)?;
    let count = Partitions::new(n)
        .filter(|lambda| t > 0 && !Abacus::from_partition(lambda).is_core(t))
        .count();
    let count = BigUint::from(count);
    debug_assert!(t == 0 || t > n || count <= non_tcore_bound(n, t));
    Ok(count)
}

/// `(t + 1) p(n - t)`, or zero for `t > n`.
pub fn non_tcore_bound(n: usize, t: usize) -> BigUint {
    if t > n {
        return BigUint::zero();
    }
    BigUint::from(t + 1) * partition_count::<BigUint>(n - t)
}

/// `p̃(k)` for `k = 0..=k_max`: a coin-change table over the powers of `p`.
pub fn ppower_counts<T: Count>(p: u64, k_max: usize) -> Result<Vec<T>> {
    check_cap("k", k_max, PPOWER_CAP)?;
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let mut counts = vec![T::zero(); k_max + 1];
    counts[0] = T::one();
    let mut power = 1usize;
    while power <= k_max {
        for k in power..=k_max {
            let add = counts[k - power].clone();
            counts[k] = counts[k].clone() + add;
        }
        power = match power.checked_mul(p as usize) {
            Some(next) => next,
            None => break,
        };
    }
    Ok(counts)
}

pub fn ppower_count(p: u64, k: usize) -> Result<BigUint> {
    Ok(ppower_counts::<BigUint>(p, k)?.pop().unwrap())
}

/// Whether `μ̃` has fewer than `p^{r-1}` parts of size `p^j` for every `j ≥ s`.
fn avoids_high_levels(reduced: &Partition, cfg: &CombineConfig, s: u32) -> bool {
    reduced.multiplicities().iter().all(|(m, count)| {
        let level = level_of(m, cfg.p());
        level < s || (count as u64) < cfg.lower()
    })
}

fn level_of(mut m: usize, p: u64) -> u32 {
    let mut j = 0;
    while m > 1 {
        m /= p as usize;
        j += 1;
    }
    j
}

/// Visits every partition of `k` into powers of `p`.
pub fn visit_ppower_partitions(p: u64, k: usize, cap: u64, mut visit: impl FnMut(&Partition)) -> Result<u64> {
    let mut powers = vec![1usize];
    while let Some(next) = powers.last().unwrap().checked_mul(p as usize).filter(|&x| x <= k) {
        powers.push(next);
    }
    powers.reverse();
    let mut parts = Vec::new();
    let mut seen = 0;
    fn go(
        powers: &[usize],
        rest: usize,
        parts: &mut Vec<usize>,
        seen: &mut u64,
        cap: u64,
        visit: &mut impl FnMut(&Partition),
    ) -> Result<()> {
        let (&power, smaller) = powers.split_first().unwrap();
        if smaller.is_empty() {
            parts.extend(std::iter::repeat_n(1, rest));
            *seen += 1;
            if *seen > cap {
                return Err(Error::SizeCap {
                    what: "p-power partitions",
                    value: *seen,
                    cap,
                });
            }
            visit(&Partition::from_sorted(parts.clone()));
            parts.truncate(parts.len() - rest);
            return Ok(());
        }
        for count in (0..=rest / power).rev() {
            parts.extend(std::iter::repeat_n(power, count));
            let res = go(smaller, rest - count * power, parts, seen, cap, visit);
            parts.truncate(parts.len() - count);
            res?;
        }
        Ok(())
    }
    go(&powers, k, &mut parts, &mut seen, cap, &mut visit)?;
    Ok(seen)
}

/// `p̃(k; s)` by enumerating the `p`-power partitions of `k` and reducing each.
pub fn ppower_count_restricted(cfg: &CombineConfig, s: u32, k: usize) -> Result<BigUint> {
    check_cap("k", k, RESTRICTED_ENUMERATION_CAP)?;
    let mut count = 0u64;
    visit_ppower_partitions(cfg.p(), k, RESTRICTED_VISIT_CAP, |mu| {
        if avoids_high_levels(&reduce(mu, cfg).output, cfg, s) {
            count += 1;
        }
    })?;
    Ok(BigUint::from(count))
}

/// `p̃(k; s)` for `k = 0..=k_max` without enumeration.
///
/// Walks the levels `j = 0, 1, …` choosing the multiplicity `a_j` of `p^j`;
/// the state is the weight still to place (in units of `p^j`), the carry
/// into level `j`, and `min(j, s)`.
pub fn ppower_counts_restricted(cfg: &CombineConfig, s: u32, k_max: usize) -> Result<Vec<BigUint>> {
    check_cap("k", k_max, PPOWER_CAP)?;
    let mut dp = RestrictedDp {
        p: cfg.p() as usize,
        q: cfg.q() as usize,
        lower: cfg.lower() as usize,
        s,
        memo: HashMap::new(),
    };
    Ok((0..=k_max).map(|k| dp.count(0, k, 0)).collect())
}

struct RestrictedDp {
    p: usize,
    q: usize,
    lower: usize,
    s: u32,
    memo: HashMap<(u32, usize, usize), BigUint>,
}

impl RestrictedDp {
    fn settle(&self, v: usize, level: u32) -> Option<usize> {
        let kept = v % self.q;
        if level >= self.s && kept >= self.lower {
            return None;
        }
        Some(self.lower * (v / self.q))
    }

    fn count(&mut self, level: u32, rest: usize, carry: usize) -> BigUint {
        if rest == 0 {
            // Only the carry chain remains.
            let (mut level, mut carry) = (level, carry);
            while carry > 0 {
                match self.settle(carry, level) {
                    None => return BigUint::zero(),
                    Some(next) => carry = next,
                }
                level += 1;
            }
            return BigUint::one();
        }
        let key = (level.min(self.s), rest, carry);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut total = BigUint::zero();
        let mut a = rest % self.p;
        while a <= rest {
            if let Some(next_carry) = self.settle(a + carry, level) {
                total += self.count(level + 1, (rest - a) / self.p, next_carry);
            }
            a += self.p;
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// `p^{r+s-1}(1 + 4/s)`, the size from which the difference bound applies.
pub fn partition_difference_threshold(cfg: &CombineConfig, s: u32) -> f64 {
    (cfg.p() as f64).powi((cfg.r() + s - 1) as i32) * (1.0 + 4.0 / s as f64)
}

/// Smallest integer `k ≥ p^{r+s-1}(1 + 4/s)`, computed exactly.
pub fn partition_difference_start(cfg: &CombineConfig, s: u32) -> usize {
    let base = (cfg.p() as usize).pow(cfg.r() + s - 1);
    // base (s + 4) / s, rounded up.
    (base * (s as usize + 4)).div_ceil(s as usize)
}

/// The explicit family of partitions of `k` counted in `p̃(k)` but not in
/// `p̃(k; s)`: `a_i` copies of `p^i` with `0 ≤ a_i ≤ p^{s-i}/(s-1)`, padded with 1s.
pub fn partition_difference_witnesses(cfg: &CombineConfig, s: u32, k: usize) -> Vec<Partition> {
    let p = cfg.p() as usize;
    let s = s as usize;
    let ranges: Vec<usize> = (1..s).map(|i| p.pow((s - i) as u32) / (s - 1)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; ranges.len()];
    loop {
        let used: usize = choice.iter().enumerate().map(|(i, a)| a * p.pow(i as u32 + 1)).sum();
        if used <= k {
            let mut parts = Vec::new();
            for (i, &a) in choice.iter().enumerate().rev() {
                parts.extend(std::iter::repeat_n(p.pow(i as u32 + 1), a));
            }
            parts.extend(std::iter::repeat_n(1, k - used));
            out.push(Partition::from_sorted(parts));
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] <= ranges[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Checks `(p̃(k) − p̃(k;s)) (s−1)^{s−1} ≥ p^{s(s−1)/2}` in integers.
pub fn partition_difference_holds(ptilde: &BigUint, restricted: &BigUint, cfg: &CombineConfig, s: u32) -> bool {
    let diff = ptilde - restricted;
    let lhs = diff * BigUint::from(s as u64 - 1).pow(s - 1);
    let rhs = BigUint::from(cfg.p()).pow(s * (s - 1) / 2);
    lhs >= rhs
}

/// `F_p(t)` in log form with a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FpValue<F> {
    pub log_value: F,
    /// Upper bound on `log F_p(t)` minus the truncated product's log.
    pub log_tail_bound: F,
    pub factors: usize,
}

impl<F: Float> FpValue<F> {
    pub fn value(&self) -> F {
        self.log_value.exp()
    }
}

/// `Π_j (1 − e^{−p^j/t})^{−1}`, truncated once `p^j/t > 50`.
///
/// Each dropped factor has log below `2e^{−p^j/t}`, and the exponents at
/// least double, so the tail is below `4e^{−50}`.
pub fn generating_function_fp<F: Float>(p: u64, t: F) -> Result<FpValue<F>> {
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    if !t.is_finite() || t <= F::zero() {
        return Err(Error::Range("t must be a positive real".into()));
    }
    let cutoff = F::from(FP_CUTOFF).unwrap();
    let pf = F::from(p).unwrap();
    let mut power = F::one();
    let mut log_value = F::zero();
    let mut factors = 0;
    while power / t <= cutoff {
        // −log(1 − e^{−x}) = −log(−expm1(−x))
        log_value = log_value - (-(-power / t).exp_m1()).ln();
        power = power * pf;
        factors += 1;
    }
    Ok(FpValue {
        log_value,
        log_tail_bound: F::from(4.0).unwrap() * (-cutoff).exp(),
        factors,
    })
}

/// `Σ_{k≤K} p̃(k) e^{−k/t}` with the bound `e^{−K/(2t)} F_p(2t)` on the rest.
pub fn fp_series<F: Float>(p: u64, t: F, terms: usize) -> Result<(F, F)> {
    let counts = ppower_counts::<BigUint>(p, terms)?;
    let mut sum = F::zero();
    for (k, c) in counts.iter().enumerate() {
        let weight = (-F::from(k).unwrap() / t).exp();
        sum = sum + F::from(c.to_f64().unwrap_or(f64::INFINITY)).unwrap() * weight;
    }
    let two = F::from(2.0).unwrap();
    let tail = (-F::from(terms).unwrap() / (two * t)).exp() * generating_function_fp(p, two * t)?.value();
    Ok((sum, tail))
}

/// `log F_p(t) − (log t)²/(2 log p) − ½ log t`.
pub fn fp_log_residual<F: Float>(p: u64, t: F) -> Result<F> {
    let log_t = t.ln();
    let two = F::from(2.0).unwrap();
    let log_p = F::from(p).unwrap().ln();
    Ok(generating_function_fp(p, t)?.log_value - log_t * log_t / (two * log_p) - log_t / two)
}

/// `(1 + 1/(6p^r)) (√6/2π) √n log n`.
pub fn prop4_threshold<F: Float>(n: usize, cfg: &CombineConfig) -> F {
    let nf = F::from(n).unwrap();
    let six = F::from(6.0).unwrap();
    let pi = F::from(std::f64::consts::PI).unwrap();
    let q = F::from(cfg.q()).unwrap();
    (F::one() + F::one() / (six * q)) * six.sqrt() / (F::from(2.0).unwrap() * pi) * nf.sqrt() * nf.ln()
}

/// Whether `μ̃` has `r` distinct parts `m`, each at least `p^{r-1}` times,
/// with `p^{r-1} m` above the threshold.
pub fn has_many_large_parts(reduced: &Partition, cfg: &CombineConfig, threshold: f64) -> bool {
    let large = reduced
        .multiplicities()
        .iter()
        .filter(|&(m, count)| count as u64 >= cfg.lower() && (cfg.lower() * m as u64) as f64 > threshold)
        .count();
    large >= cfg.r() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop4Report {
    pub n: usize,
    pub p: u64,
    pub r: u32,
    pub samples: u64,
    pub seed: u64,
    pub threshold: f64,
    pub failures: u64,
    pub failure_fraction: f64,
    /// 95% Wilson score interval for the failure probability.
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Trial `i` draws from the ChaCha8 stream `i` under `seed`, so results do
/// not depend on scheduling.
pub fn prop4_empirical(n: usize, cfg: &CombineConfig, samples: u64, seed: u64) -> Result<Prop4Report> {
    check_cap("n", n, SAMPLING_CAP)?;
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let sampler = UniformSampler::new(n)?;
    let threshold = prop4_threshold::<f64>(n, cfg);
    let failures = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mu = sampler.sample(&mut rng);
            !has_many_large_parts(&reduce(&mu, cfg).output, cfg, threshold)
        })
        .count() as u64;
    let (ci_low, ci_high) = wilson_interval(failures, samples, 1.959_963_984_540_054);
    Ok(Prop4Report {
        n,
        p: cfg.p(),
        r: cfg.r(),
        samples,
        seed,
        threshold,
        failures,
        failure_fraction: if samples == 0 { 0.0 } else { failures as f64 / samples as f64 },
        ci_low,
        ci_high,
    })
}

/// An inequality `lhs ≥ rhs`; `satisfied` is `None` for report-only rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma91Report {
    pub n: usize,
    pub p: u64,
    pub r: u32,
    pub s: u32,
    pub x: f64,
    pub l: f64,
    pub window: Vec<usize>,
    pub delta: f64,
    /// Bound on the part of `Δ` lost to truncating the inner sums.
    pub delta_tail_bound: f64,
    pub checks: Vec<BoundCheck>,
}

pub fn lemma91_x(n: usize) -> f64 {
    (6.0 * n as f64).sqrt() / std::f64::consts::PI
}

/// `⌊log √n / (e p^r)⌋`.
pub fn lemma91_s(n: usize, cfg: &CombineConfig) -> u32 {
    ((n as f64).sqrt().ln() / (std::f64::consts::E * cfg.q() as f64)).floor().max(0.0) as u32
}

/// The admissible range for `L`.
pub fn lemma91_l_range(n: usize, cfg: &CombineConfig) -> (f64, f64) {
    let s = lemma91_s(n, cfg);
    let scale = (6.0 * n as f64).sqrt() / (2.0 * std::f64::consts::PI * (cfg.p() as f64).powi((cfg.r() + s) as i32 - 1));
    (scale, (1.0 + 1.0 / (5.0 * cfg.q() as f64)) * scale * (n as f64).ln())
}

/// Evaluates `Δ = Σ_{ℓ∈𝒲} F_p(x/ℓ)^{−1} Σ_k (p̃(k) − p̃(k;s)) e^{−ℓk/x}`
/// over the window `𝒲` of integers in `[L, L + x/p^{r+s−1}]` coprime to `p`.
pub fn lemma91_delta(n: usize, cfg: &CombineConfig, l: f64) -> Result<Lemma91Report> {
    if n < 2 {
        return Err(Error::Range("n must be at least 2".into()));
    }
    let (lo, hi) = lemma91_l_range(n, cfg);
    if !(l >= lo * (1.0 - 1e-12) && l <= hi * (1.0 + 1e-12)) {
        return Err(Error::Range(format!("L = {l} outside [{lo}, {hi}]")));
    }
    let s = lemma91_s(n, cfg);
    let x = lemma91_x(n);
    let scale = (cfg.p() as f64).powi((cfg.r() + s) as i32 - 1);
    let first = l.ceil() as usize;
    let last = (l + x / scale).floor() as usize;
    let window: Vec<usize> = (first..=last).filter(|&m| !(m as u64).is_multiple_of(cfg.p())).collect();

    // Inner sums run to K with e^{−cK/2} F_p(2/c) below 1e−30 at c = L/x.
    let c = first.max(1) as f64 / x;
    let fp_wide = generating_function_fp::<f64>(cfg.p(), 2.0 / c)?;
    let k_max = ((2.0 / c) * (fp_wide.log_value + 70.0)).ceil() as usize;
    check_cap("k", k_max, PPOWER_CAP)?;
    let full = ppower_counts::<BigUint>(cfg.p(), k_max)?;
    let restricted = ppower_counts_restricted(cfg, s, k_max)?;
    let diffs: Vec<f64> = full
        .iter()
        .zip(&restricted)
        .map(|(a, b)| (a - b).to_f64().unwrap_or(f64::INFINITY))
        .collect();

    let mut delta = 0.0;
    let mut tail = 0.0;
    for &m in &window {
        let rate = m as f64 / x;
        let inner: f64 = diffs.iter().enumerate().map(|(k, d)| d * (-rate * k as f64).exp()).sum();
        let fp = generating_function_fp::<f64>(cfg.p(), x / m as f64)?.value();
        delta += inner / fp;
        tail += (-rate * k_max as f64 / 2.0).exp() * generating_function_fp::<f64>(cfg.p(), 2.0 / rate)?.value() / fp;
    }

    let window_bound = x / (3.0 * scale);
    let mut checks = vec![
        BoundCheck {
            name: "window_size".into(),
            lhs: window.len() as f64,
            rhs: window_bound,
            satisfied: Some(window.len() as f64 >= window_bound),
        },
        BoundCheck {
            name: "delta_nonnegative".into(),
            lhs: delta,
            rhs: 0.0,
            satisfied: Some(delta >= 0.0),
        },
    ];
    if s >= 2 {
        let sf = s as f64;
        let logn = (n as f64).ln();
        let chain = 1.0 / 6.0 / generating_function_fp::<f64>(cfg.p(), 2.0 * scale / logn)?.value()
            * (cfg.p() as f64).powf(sf * (sf - 1.0) / 2.0)
            / (sf - 1.0).powf(sf - 1.0)
            * x
            / logn
            * (-(l * scale / x + 1.0) * (1.0 + 4.0 / sf)).exp();
        checks.push(BoundCheck {
            name: "delta_vs_lower_bound_chain".into(),
            lhs: delta,
            rhs: chain,
            satisfied: None,
        });
    }
    Ok(Lemma91Report {
        n,
        p: cfg.p(),
        r: cfg.r(),
        s,
        x,
        l,
        window,
        delta,
        delta_tail_bound: tail,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: u64, r: u32) -> CombineConfig {
        CombineConfig::new(p, r).unwrap()
    }

    #[test]
    fn density_small() {
        let r = density_report(1, 2).unwrap();
        assert_eq!((r.total, r.divisible, r.positive), (1, 0, 1));
        let r = density_report(3, 2).unwrap();
        assert_eq!(r.divisible, 2);
        assert_eq!((r.total, r.zero, r.positive, r.negative), (9, 1, 6, 2));
        assert!(density_report(27, 2).is_err());
    }

    #[test]
    fn density_totals() {
        for n in 1..=12 {
            let table = build_table::<i64>(n).unwrap();
            for k in 2..=5 {
                let r = density_from_table(&table, k).unwrap();
                let pn = partition_count::<u64>(n);
                assert_eq!(r.total, pn * pn);
                assert_eq!(r.zero + r.positive + r.negative, r.total);
                assert!(r.divisible >= r.zero);
            }
        }
    }

    #[test]
    fn non_tcore_examples() {
        assert_eq!(count_non_tcores(5, 7).unwrap(), BigUint::zero());
        for n in 1..=12 {
            assert_eq!(count_non_tcores(n, 1).unwrap(), partition_count::<BigUint>(n));
        }
        let c = count_non_tcores(5, 3).unwrap();
        assert!(c <= BigUint::from(8u32));
        assert_eq!(non_tcore_bound(5, 3), BigUint::from(8u32));
        // [3,1,1] is the only 3-core of 5.
        assert_eq!(c, BigUint::from(6u32));
    }

    #[test]
    fn ppower_examples() {
        assert_eq!(ppower_count(2, 0).unwrap(), BigUint::one());
        assert_eq!(ppower_count(2, 4).unwrap(), BigUint::from(4u32));
        assert_eq!(ppower_count(3, 2).unwrap(), BigUint::one());
        assert_eq!(ppower_count(2, 24).unwrap(), BigUint::from(94u32));
        assert_eq!(ppower_count(2, 200).unwrap(), BigUint::from(205_658u32));
    }

    #[test]
    fn ppower_dp_matches_enumeration() {
        for p in [2, 3, 5] {
            let counts = ppower_counts::<u64>(p, 200).unwrap();
            for (k, &c) in counts.iter().enumerate() {
                let mut seen = 0u64;
                visit_ppower_partitions(p, k, u64::MAX, |mu| {
                    assert!(mu.parts().iter().all(|&x| level_of(x, p) as usize <= k && p.pow(level_of(x, p)) == x as u64));
                    seen += 1;
                })
                .unwrap();
                assert_eq!(seen, c, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn restricted_dp_matches_enumeration() {
        for c in [cfg(2, 2), cfg(3, 2), cfg(2, 3), cfg(2, 1)] {
            for s in 0..=4 {
                let dp = ppower_counts_restricted(&c, s, 70).unwrap();
                for (k, v) in dp.iter().enumerate() {
                    assert_eq!(*v, ppower_count_restricted(&c, s, k).unwrap(), "{c} s={s} k={k}");
                }
            }
        }
    }

    #[test]
    fn restricted_vacuous_for_large_s() {
        let c = cfg(2, 2);
        for k in 0..40 {
            assert_eq!(ppower_count_restricted(&c, 8, k).unwrap(), ppower_count(2, k).unwrap());
        }
    }

    #[test]
    fn partition_difference_at_start() {
        let c = cfg(2, 2);
        assert_eq!(partition_difference_start(&c, 2), 24);
        let k = 24;
        let full = ppower_count(2, k).unwrap();
        let restricted = ppower_count_restricted(&c, 2, k).unwrap();
        assert!(&full - &restricted >= BigUint::from(2u32));
        assert!(partition_difference_holds(&full, &restricted, &c, 2));
    }

    #[test]
    fn witnesses_are_excluded() {
        for (c, s) in [(cfg(2, 2), 2), (cfg(2, 2), 3), (cfg(3, 2), 2), (cfg(3, 2), 3)] {
            let k = partition_difference_start(&c, s);
            let witnesses = partition_difference_witnesses(&c, s, k);
            let expected: usize = (1..s as usize).map(|i| (c.p() as usize).pow(s - i as u32) / (s as usize - 1) + 1).product();
            assert_eq!(witnesses.len(), expected);
            for mu in &witnesses {
                assert_eq!(mu.size(), k);
                assert!(!avoids_high_levels(&reduce(mu, &c).output, &c, s), "{mu}");
            }
        }
    }

    #[test]
    fn fp_product_and_series_agree() {
        let product = generating_function_fp::<f64>(2, 5.0).unwrap();
        let (series, tail) = fp_series::<f64>(2, 5.0, 600).unwrap();
        assert!(tail < 1e-12);
        assert!((product.value() - series).abs() < 1e-10 * product.value());
    }

    #[test]
    fn fp_tends_to_one() {
        let v = generating_function_fp::<f64>(3, 1e-3).unwrap().value();
        assert!((v - 1.0).abs() < 1e-100_f64.max(1e-300));
        assert!(generating_function_fp::<f64>(2, 0.0).is_err());
        assert!(fp_log_residual::<f64>(2, 1e4).unwrap().is_finite());
    }

    #[test]
    fn threshold_value() {
        let t = prop4_threshold::<f64>(10_000, &cfg(2, 2));
        assert!((t - 374.024_631_578).abs() < 1e-8);
    }

    #[test]
    fn prop4_is_reproducible() {
        let a = prop4_empirical(200, &cfg(2, 1), 300, 9).unwrap();
        let b = prop4_empirical(200, &cfg(2, 1), 300, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_low <= a.failure_fraction && a.failure_fraction <= a.ci_high);
    }

    #[test]
    fn lemma91_at_million() {
        let c = cfg(2, 2);
        let (lo, _) = lemma91_l_range(1_000_000, &c);
        let report = lemma91_delta(1_000_000, &c, lo).unwrap();
        assert_eq!(report.s, 0);
        assert!(report.checks.iter().all(|b| b.satisfied != Some(false)));
        assert!(report.delta > 0.0 && report.delta.is_finite());
        assert!(report.delta_tail_bound < 1e-20);
        assert!(matches!(lemma91_delta(1_000_000, &c, lo / 2.0), Err(Error::Range(_))));
    }
}

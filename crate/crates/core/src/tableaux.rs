//! Skew shapes, standard Young tableau counts, border strips and
//! Littlewood–Richardson coefficients.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_cap, Error, Result};
use crate::partitions::{factorial, Partition, Partitions};
use crate::scalar::Count;

/// Largest skew size accepted by [`verify_lr_expansion`].
pub const LR_VERIFY_CAP: usize = 9;

/// The boxes of `outer` not in `inner`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkewShape {
    outer: Partition,
    inner: Partition,
}

impl SkewShape {
    pub fn new(outer: Partition, inner: Partition) -> Result<Self> {
        if !outer.contains(&inner) {
            return Err(Error::Precondition(format!("{inner} is not contained in {outer}")));
        }
        Ok(Self { outer, inner })
    }

    /// The straight shape `ν/∅`.
    pub fn straight(outer: Partition) -> Self {
        Self {
            outer,
            inner: Partition::empty(),
        }
    }

    pub fn outer(&self) -> &Partition {
        &self.outer
    }

    pub fn inner(&self) -> &Partition {
        &self.inner
    }

    pub fn size(&self) -> usize {
        self.outer.size() - self.inner.size()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    /// Half-open column interval `[inner_i, outer_i)` of each row.
    fn row_span(&self, i: usize) -> (usize, usize) {
        (self.inner.part(i), self.outer.part(i))
    }

    pub fn contains_cell(&self, row: usize, col: usize) -> bool {
        let (a, b) = self.row_span(row);
        a <= col && col < b
    }

    /// Cells `(row, col)` row by row, left to right.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        (0..self.outer.len())
            .flat_map(|i| {
                let (a, b) = self.row_span(i);
                (a..b).map(move |j| (i, j))
            })
            .collect()
    }

    /// Translation-invariant representative: empty leading rows and the
    /// common column offset removed.
    pub fn canonical(&self) -> SkewShape {
        let rows = self.outer.len();
        let Some(first) = (0..rows).find(|&i| self.inner.part(i) < self.outer.part(i)) else {
            return SkewShape::straight(Partition::empty());
        };
        let last = (0..rows).rev().find(|&i| self.inner.part(i) < self.outer.part(i)).unwrap();
        let shift = self.inner.part(last);
        let outer = (first..=last).map(|i| self.outer.part(i) - shift).collect();
        let inner = (first..=last).map(|i| self.inner.part(i) - shift).collect();
        SkewShape {
            outer: Partition::from_rows(outer),
            inner: Partition::from_rows(inner),
        }
    }

    /// Edge-connected components, each in canonical form.
    pub fn components(&self) -> Vec<SkewShape> {
        let rows = self.outer.len();
        let mut components = Vec::new();
        let mut start: Option<usize> = None;
        for i in 0..rows {
            let (a, b) = self.row_span(i);
            if a == b {
                if let Some(s) = start.take() {
                    components.push(self.slice(s, i));
                }
                continue;
            }
            match start {
                None => start = Some(i),
                Some(s) => {
                    // Rows i-1 and i share an edge iff their intervals overlap.
                    let (_, prev_b) = self.row_span(i - 1);
                    if b <= a.max(self.inner.part(i - 1)) || prev_b <= a {
                        components.push(self.slice(s, i));
                        start = Some(i);
                    }
                }
            }
        }
        if let Some(s) = start {
            components.push(self.slice(s, rows));
        }
        components
    }

    fn slice(&self, from: usize, to: usize) -> SkewShape {
        let outer = (from..to).map(|i| self.outer.part(i)).collect();
        let inner = (from..to).map(|i| self.inner.part(i)).collect();
        SkewShape {
            outer: Partition::from_rows(outer),
            inner: Partition::from_rows(inner),
        }
        .canonical()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn contains_2x2(&self) -> bool {
        (1..self.outer.len()).any(|i| {
            let (a0, b0) = self.row_span(i - 1);
            let (a1, b1) = self.row_span(i);
            // Columns present in both rows.
            let lo = a0.max(a1);
            let hi = b0.min(b1);
            hi >= lo + 2
        })
    }

    /// Connected with no 2×2 block of boxes.
    pub fn is_border_strip(&self) -> Result<bool> {
        if self.is_empty() {
            return Err(Error::Precondition("border-strip test on an empty shape".into()));
        }
        Ok(self.is_connected() && !self.contains_2x2())
    }
}

impl fmt::Display for SkewShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.outer, self.inner)
    }
}

impl fmt::Debug for SkewShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SkewShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (outer, inner) = s
            .split_once('/')
            .ok_or_else(|| Error::Format(format!("expected outer/inner, got {s:?}")))?;
        SkewShape::new(outer.parse()?, inner.parse()?)
    }
}

/// Memoized corner-removal counter for `f_{π/τ}`.
///
/// The largest entry of a standard filling sits in an outer corner, so
/// `f_{π/τ} = Σ_c f_{(π - c)/τ}` over removable corners `c` of `π` lying
/// outside `τ`. Entries are keyed by the canonical shape.
#[derive(Debug, Default)]
pub struct SytCounter<T> {
    memo: HashMap<SkewShape, T>,
}

impl<T: Count> SytCounter<T> {
    pub fn new() -> Self {
        Self { memo: HashMap::new() }
    }

    pub fn count(&mut self, shape: &SkewShape) -> T {
        let key = shape.canonical();
        if key.is_empty() {
            return T::one();
        }
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let outer = key.outer.parts();
        let mut total = T::zero();
        for i in 0..outer.len() {
            let is_corner = i + 1 == outer.len() || outer[i + 1] < outer[i];
            if is_corner && key.inner.part(i) < outer[i] {
                let mut rows = outer.to_vec();
                rows[i] -= 1;
                let smaller = SkewShape {
                    outer: Partition::from_rows(rows),
                    inner: key.inner.clone(),
                };
                total = total + self.count(&smaller);
            }
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// Number of standard Young tableaux of a skew shape; 1 for the empty shape.
pub fn count_skew_syt<T: Count>(shape: &SkewShape) -> T {
    SytCounter::new().count(shape)
}

/// `f_{π/σ}` for every `σ ⊆ π` with `|π/σ| <= max_size`, in one sweep.
///
/// Works down from `σ = π`: each `σ` accumulates over the boxes addable to it
/// inside `π`.
pub fn skew_counts_below<T: Count>(outer: &Partition, max_size: usize) -> HashMap<Partition, T> {
    let mut all: HashMap<Partition, T> = HashMap::new();
    all.insert(outer.clone(), T::one());
    let mut level = vec![outer.clone()];
    for _ in 0..max_size.min(outer.size()) {
        let mut next: HashMap<Partition, T> = HashMap::new();
        for sigma in &level {
            let rows = sigma.parts();
            for i in 0..rows.len() {
                if i + 1 == rows.len() || rows[i + 1] < rows[i] {
                    let mut smaller = rows.to_vec();
                    smaller[i] -= 1;
                    let smaller = Partition::from_rows(smaller);
                    let add = all[sigma].clone();
                    let slot = next.entry(smaller).or_insert_with(T::zero);
                    *slot = slot.clone() + add;
                }
            }
        }
        level = next.keys().cloned().collect();
        all.extend(next);
    }
    all
}

/// Degree `f_ν` by the hook-length formula.
pub fn count_syt<T: Count>(nu: &Partition) -> T {
    let hooks: T = nu
        .hook_lengths()
        .concat()
        .into_iter()
        .fold(T::one(), |acc, h| acc * T::from_usize_exact(h));
    factorial::<T>(nu.size()) / hooks
}

/// Littlewood–Richardson coefficient `c^π_{τν}`.
///
/// Counts semistandard fillings of `π/τ` with content `ν` whose reverse
/// reading word (rows top to bottom, each read right to left) is a lattice
/// word.
pub fn lr_coefficient<T: Count>(pi: &Partition, tau: &Partition, nu: &Partition) -> T {
    if pi.size() != tau.size() + nu.size() || !pi.contains(tau) || !pi.contains(nu) {
        return T::zero();
    }
    let shape = SkewShape {
        outer: pi.clone(),
        inner: tau.clone(),
    };
    // Reading order: top row first, right to left within a row.
    let mut order = Vec::with_capacity(shape.size());
    for i in 0..pi.len() {
        let (a, b) = shape.row_span(i);
        order.extend((a..b).rev().map(|j| (i, j)));
    }
    let mut fill = vec![vec![0usize; pi.largest()]; pi.len()];
    let mut used = vec![0usize; nu.len() + 1];
    let mut count = T::zero();
    lr_fill(&shape, nu, &order, 0, &mut fill, &mut used, &mut count);
    count
}

fn lr_fill<T: Count>(
    shape: &SkewShape,
    nu: &Partition,
    order: &[(usize, usize)],
    k: usize,
    fill: &mut [Vec<usize>],
    used: &mut [usize],
    count: &mut T,
) {
    if k == order.len() {
        *count = count.clone() + T::one();
        return;
    }
    let (i, j) = order[k];
    // Weakly increasing along the row: bounded by the cell to the right.
    let upper = if shape.contains_cell(i, j + 1) {
        fill[i][j + 1]
    } else {
        nu.len()
    };
    // Strictly increasing down the column.
    let lower = if i > 0 && shape.contains_cell(i - 1, j) {
        fill[i - 1][j] + 1
    } else {
        1
    };
    for v in lower..=upper {
        if used[v] >= nu.part(v - 1) {
            continue;
        }
        if v > 1 && used[v] + 1 > used[v - 1] {
            continue;
        }
        used[v] += 1;
        fill[i][j] = v;
        lr_fill(shape, nu, order, k + 1, fill, used, count);
        used[v] -= 1;
    }
    fill[i][j] = 0;
}

/// Both sides of `f_{π/τ} = Σ_{ν ⊢ |π/τ|} f_ν c^π_{τν}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrExpansion<T> {
    pub skew_count: T,
    pub expansion: T,
}

impl<T: Count> LrExpansion<T> {
    pub fn holds(&self) -> bool {
        self.skew_count == self.expansion
    }
}

pub fn verify_lr_expansion<T: Count>(shape: &SkewShape) -> Result<LrExpansion<T>> {
    check_cap("skew size", shape.size(), LR_VERIFY_CAP)?;
    let skew_count = count_skew_syt::<T>(shape);
    let expansion = Partitions::new(shape.size()).fold(T::zero(), |acc, nu| {
        let c: T = lr_coefficient(&shape.outer, &shape.inner, &nu);
        if c.is_zero() {
            acc
        } else {
            acc + count_syt::<T>(&nu) * c
        }
    });
    Ok(LrExpansion {
        skew_count,
        expansion,
    })
}

/// All partitions fitting in a `rows × cols` box.
pub fn partitions_in_box(rows: usize, cols: usize) -> Vec<Partition> {
    fn go(rows: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        out.push(Partition::from_sorted(prefix.clone()));
        if prefix.len() == rows {
            return;
        }
        for part in 1..=max {
            prefix.push(part);
            go(rows, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(rows, cols, &mut Vec::new(), &mut out);
    out
}

//! Constructive selection over nonincreasing value sequences.
//!
//! Each selector takes sequences in [0,1] whose total mass beats a density
//! threshold and returns an explicit index tuple whose selected values are
//! positive, whose index sum reaches the sequence length, and whose value sum
//! beats the stated bound. The selectors run an exact dynamic program
//! (maximize value sum subject to the index-sum floor over positive entries),
//! so they produce a witness whenever one exists; the inductive constructions
//! behind the bounds survive only as a fast path. An independent exhaustive
//! oracle and an exhaustive grid verifier live alongside them.

use crate::rational::{rat, rat_int, Rational};
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

/// Enumeration guard for the exhaustive oracle and the grid verifier.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectionError {
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("shape (n={n}, k={k}) not covered by this selector")]
    BadShape { n: usize, k: usize },
    #[error("instance space of size {size} exceeds budget {budget}")]
    TooLarge { size: u128, budget: u128 },
    #[error("no witness found although the hypothesis holds; this is a defect")]
    NoWitness,
    #[error("value {0} outside [0, 1]")]
    ValueOutOfRange(String),
    #[error("sequence is not nonincreasing at position {0}")]
    NotNonincreasing(usize),
}

/// A nonincreasing sequence of exact rationals in [0, 1].
///
/// Monotonicity means the positive entries form a prefix, which is what makes
/// level sets by value cutoff the same as index prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSequence {
    values: Vec<Rational>,
}

impl ValueSequence {
    pub fn new(values: Vec<Rational>) -> Result<Self, SelectionError> {
        for (i, v) in values.iter().enumerate() {
            if !crate::rational::in_unit_interval(v) {
                return Err(SelectionError::ValueOutOfRange(crate::rational::display(v)));
            }
            if i > 0 && values[i - 1] < *v {
                return Err(SelectionError::NotNonincreasing(i));
            }
        }
        Ok(ValueSequence { values })
    }

    /// Sort a bag of unit-interval values into a valid sequence.
    pub fn from_unsorted(mut values: Vec<Rational>) -> Result<Self, SelectionError> {
        values.sort_by(|a, b| b.cmp(a));
        Self::new(values)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn sum(&self) -> Rational {
        self.values.iter().sum()
    }

    /// Number of leading positive entries.
    pub fn positive_prefix(&self) -> usize {
        self.values.iter().take_while(|v| !v.is_zero()).count()
    }
}

/// An index tuple certifying a selection lemma's conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionWitness {
    pub indices: Vec<usize>,
    pub index_sum: usize,
    pub value_sum: Rational,
    pub threshold: Rational,
    pub all_positive: bool,
}

impl SelectionWitness {
    pub fn meets_threshold(&self) -> bool {
        self.value_sum > self.threshold
    }

    /// Recompute every derived field against the originating columns; the
    /// witness must stand on its own.
    pub fn verify(&self, cols: &[&ValueSequence], floor: usize) -> Result<(), String> {
        if self.indices.len() != cols.len() {
            return Err("index count differs from column count".into());
        }
        let mut sum = Rational::zero();
        let mut positive = true;
        for (j, &i) in self.indices.iter().enumerate() {
            if i >= cols[j].len() {
                return Err(format!("index {i} out of range in column {j}"));
            }
            let v = cols[j].get(i);
            positive &= !v.is_zero();
            sum += v;
        }
        let isum: usize = self.indices.iter().sum();
        if isum != self.index_sum {
            return Err("index_sum does not recompute".into());
        }
        if sum != self.value_sum {
            return Err("value_sum does not recompute".into());
        }
        if positive != self.all_positive {
            return Err("all_positive flag wrong".into());
        }
        if !positive {
            return Err("a selected value is zero".into());
        }
        if isum < floor {
            return Err(format!("index_sum {isum} below floor {floor}"));
        }
        if self.value_sum <= self.threshold {
            return Err("value_sum does not beat threshold".into());
        }
        Ok(())
    }
}

fn witness(cols: &[&ValueSequence], indices: Vec<usize>, threshold: Rational) -> SelectionWitness {
    let value_sum: Rational = indices
        .iter()
        .zip(cols)
        .map(|(&i, col)| col.get(i).clone())
        .sum();
    let all_positive = indices
        .iter()
        .zip(cols)
        .all(|(&i, col)| !col.get(i).is_zero());
    SelectionWitness {
        index_sum: indices.iter().sum(),
        indices,
        value_sum,
        threshold,
        all_positive,
    }
}

/// Exact DP: maximize the value sum of one positive-valued pick per column,
/// subject to the picked indices summing to at least `floor`. Returns the
/// lexicographically smallest optimal tuple, or None if no pick is feasible.
///
/// When every value fits a common denominator with small numerators, the DP
/// runs on u64 numerators (same order, same ties, two orders of magnitude
/// faster); otherwise it runs on rationals directly.
pub(crate) fn dp_select(cols: &[&ValueSequence], floor: usize) -> Option<(Vec<usize>, Rational)> {
    if let Some(scaled) = scale_columns(cols) {
        let views: Vec<&[u64]> = scaled.iter().map(|c| c.as_slice()).collect();
        let indices = dp_select_scaled(&views, floor)?;
        let total: Rational = indices
            .iter()
            .zip(cols)
            .map(|(&i, col)| col.get(i).clone())
            .sum();
        return Some((indices, total));
    }
    dp_select_rational(cols, floor)
}

/// Common-denominator u64 view of the columns, if the numerators stay small.
fn scale_columns(cols: &[&ValueSequence]) -> Option<Vec<Vec<u64>>> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, ToPrimitive};
    let mut denom = BigInt::one();
    for col in cols {
        for v in col.values() {
            denom = denom.lcm(v.denom());
        }
    }
    // headroom: k picks must not overflow
    let limit = BigInt::from(u64::MAX >> 8);
    if denom > limit {
        return None;
    }
    let k = cols.len().max(1) as u64;
    let per_value_limit = BigInt::from((u64::MAX >> 4) / k);
    cols.iter()
        .map(|col| {
            col.values()
                .iter()
                .map(|v| {
                    let num = v.numer() * (&denom / v.denom());
                    if num > per_value_limit {
                        None
                    } else {
                        num.to_u64()
                    }
                })
                .collect()
        })
        .collect()
}

/// Integer-numerator DP over capped index sums. `u64::MAX` marks unreachable
/// states; positive entries scale to >= 1, so sums never collide with it.
fn dp_select_scaled(cols: &[&[u64]], floor: usize) -> Option<Vec<usize>> {
    const NONE: u64 = u64::MAX;
    let k = cols.len();
    let prefixes: Vec<usize> = cols
        .iter()
        .map(|c| c.iter().take_while(|&&v| v > 0).count())
        .collect();
    let mut suf = vec![vec![NONE; floor + 1]; k + 1];
    suf[k][floor] = 0;
    for j in (0..k).rev() {
        for s in 0..=floor {
            let mut best = NONE;
            for i in 0..prefixes[j] {
                let ns = (s + i).min(floor);
                let rest = suf[j + 1][ns];
                if rest != NONE {
                    let cand = cols[j][i] + rest;
                    if best == NONE || cand > best {
                        best = cand;
                    }
                }
            }
            suf[j][s] = best;
        }
    }
    if suf[0][0] == NONE {
        return None;
    }
    let mut indices = Vec::with_capacity(k);
    let mut s = 0usize;
    let mut remaining = suf[0][0];
    for j in 0..k {
        let mut chosen = None;
        for i in 0..prefixes[j] {
            let ns = (s + i).min(floor);
            let rest = suf[j + 1][ns];
            if rest != NONE && cols[j][i] + rest == remaining {
                chosen = Some(i);
                break;
            }
        }
        let i = chosen.expect("DP reconstruction must succeed");
        remaining -= cols[j][i];
        s = (s + i).min(floor);
        indices.push(i);
    }
    Some(indices)
}

fn dp_select_rational(cols: &[&ValueSequence], floor: usize) -> Option<(Vec<usize>, Rational)> {
    let k = cols.len();
    // suf[j][s]: best value from columns j.. with capped index sum s so far.
    let mut suf: Vec<Vec<Option<Rational>>> = vec![vec![None; floor + 1]; k + 1];
    suf[k][floor] = Some(Rational::zero());
    for j in (0..k).rev() {
        let prefix = cols[j].positive_prefix();
        for s in 0..=floor {
            let mut best: Option<Rational> = None;
            for i in 0..prefix {
                let ns = (s + i).min(floor);
                if let Some(rest) = &suf[j + 1][ns] {
                    let cand = cols[j].get(i) + rest;
                    if best.as_ref().is_none_or(|b| cand > *b) {
                        best = Some(cand);
                    }
                }
            }
            suf[j][s] = best;
        }
    }
    let total = suf[0][0].clone()?;
    // walk forward, taking the smallest index that still achieves the optimum
    let mut indices = Vec::with_capacity(k);
    let mut s = 0usize;
    let mut remaining = total.clone();
    for j in 0..k {
        let prefix = cols[j].positive_prefix();
        let mut chosen = None;
        for i in 0..prefix {
            let ns = (s + i).min(floor);
            if let Some(rest) = &suf[j + 1][ns] {
                if cols[j].get(i) + rest == remaining {
                    chosen = Some(i);
                    break;
                }
            }
        }
        let i = chosen.expect("DP reconstruction must succeed");
        remaining -= cols[j].get(i);
        s = (s + i).min(floor);
        indices.push(i);
    }
    Some((indices, total))
}

/// Select `k` indices (with repetition) from a single nonincreasing sequence
/// of even length `n`: if `sum > n*c` with `c > 1/2`, the returned witness has
/// index sum >= n, value sum > k*c, and every selected value positive.
///
/// Odd lengths are accepted behind `allow_odd`; the even case is the one the
/// downstream unit-group machinery needs, since totients are even.
pub fn select_single(
    seq: &ValueSequence,
    k: usize,
    c: &Rational,
    allow_odd: bool,
) -> Result<SelectionWitness, SelectionError> {
    let n = seq.len();
    if k < 4 || n < 2 {
        return Err(SelectionError::BadShape { n, k });
    }
    if n % 2 != 0 && !allow_odd {
        return Err(SelectionError::HypothesisUnmet(format!(
            "sequence length {n} is odd (pass allow_odd to accept)"
        )));
    }
    if *c <= rat(1, 2) {
        return Err(SelectionError::HypothesisUnmet(
            "need c > 1/2".into(),
        ));
    }
    if seq.sum() <= c * rat_int(n as i64) {
        return Err(SelectionError::HypothesisUnmet(format!(
            "sum <= {n}*c"
        )));
    }
    let threshold = c * rat_int(k as i64);
    let cols: Vec<&ValueSequence> = vec![seq; k];

    // fast path: the alternating tuple (0, ceil(n/2), 0, ceil(n/2), ...) from
    // the inductive construction. Used only when a[half] == a[0], which makes
    // it a global optimum (every pick then has the maximal value).
    let half = n.div_ceil(2);
    if half < seq.positive_prefix() && seq.get(half) == seq.get(0) {
        let indices: Vec<usize> = (0..k).map(|j| if j % 2 == 1 { half } else { 0 }).collect();
        if indices.iter().sum::<usize>() >= n {
            let w = witness(&cols, indices, threshold.clone());
            if w.meets_threshold() && w.all_positive {
                return Ok(w);
            }
        }
    }

    match dp_select(&cols, n) {
        Some((indices, _)) => {
            let w = witness(&cols, indices, threshold);
            if w.meets_threshold() {
                Ok(w)
            } else {
                Err(SelectionError::NoWitness)
            }
        }
        None => Err(SelectionError::NoWitness),
    }
}

/// The critical four-column case with columns of length 2: if all four heads
/// are positive and the total beats `8*c` with `c > 5/8`, select one entry per
/// column with index sum >= 2, positive values, and value sum > (16/3)c - 1.
///
/// That bound is tight, so this selector always reports the DP optimum.
pub fn select_sharp4(
    cols: &[ValueSequence; 4],
    c: &Rational,
) -> Result<SelectionWitness, SelectionError> {
    for col in cols.iter() {
        if col.len() != 2 {
            return Err(SelectionError::BadShape {
                n: col.len(),
                k: 4,
            });
        }
    }
    if *c <= rat(5, 8) {
        return Err(SelectionError::HypothesisUnmet("need c > 5/8".into()));
    }
    if cols.iter().any(|col| col.get(0).is_zero()) {
        return Err(SelectionError::HypothesisUnmet(
            "a column head is zero".into(),
        ));
    }
    let total: Rational = cols.iter().map(|col| col.sum()).sum();
    if total <= c * rat_int(8) {
        return Err(SelectionError::HypothesisUnmet("total <= 8c".into()));
    }
    let threshold = rat(16, 3) * c - rat_int(1);
    let views: Vec<&ValueSequence> = cols.iter().collect();
    match dp_select(&views, 2) {
        Some((indices, _)) => {
            let w = witness(&views, indices, threshold);
            if w.meets_threshold() {
                Ok(w)
            } else {
                Err(SelectionError::NoWitness)
            }
        }
        None => Err(SelectionError::NoWitness),
    }
}

/// Select one entry per column from `k` nonincreasing columns of common
/// length `n`, for the shapes (n >= 3, k >= 4) or (n = 2, k >= 5): if every
/// column head is positive and the grand total beats `c*n*k` with
/// `c > (k+1)/(2k)`, the witness has index sum >= n and value sum > c*k.
///
/// The excluded shape (n = 2, k = 4) is exactly the sharp four-column case;
/// use [`select_sharp4`] there.
pub fn select_multi(
    cols: &[ValueSequence],
    c: &Rational,
) -> Result<SelectionWitness, SelectionError> {
    let k = cols.len();
    let n = cols.first().map_or(0, |c| c.len());
    if cols.iter().any(|col| col.len() != n) {
        return Err(SelectionError::BadShape { n, k });
    }
    let shape_ok = (n >= 3 && k >= 4) || (n == 2 && k >= 5);
    if !shape_ok {
        return Err(SelectionError::BadShape { n, k });
    }
    if *c <= rat((k + 1) as i64, 2 * k as i64) {
        return Err(SelectionError::HypothesisUnmet(format!(
            "need c > (k+1)/(2k) = {}/{}",
            k + 1,
            2 * k
        )));
    }
    if cols.iter().any(|col| col.get(0).is_zero()) {
        return Err(SelectionError::HypothesisUnmet(
            "a column head is zero".into(),
        ));
    }
    let total: Rational = cols.iter().map(|col| col.sum()).sum();
    if total <= c * rat_int((n * k) as i64) {
        return Err(SelectionError::HypothesisUnmet("total <= c*n*k".into()));
    }
    let threshold = c * rat_int(k as i64);
    let views: Vec<&ValueSequence> = cols.iter().collect();
    match dp_select(&views, n) {
        Some((indices, _)) => {
            let w = witness(&views, indices, threshold);
            if w.meets_threshold() {
                Ok(w)
            } else {
                Err(SelectionError::NoWitness)
            }
        }
        None => Err(SelectionError::NoWitness),
    }
}

/// Exhaustive oracle: enumerate every index tuple, keep the best value sum
/// among tuples with positive values and index sum >= `floor`. Returns `None`
/// when no tuple qualifies. The tuple returned is the lexicographically
/// smallest optimum. Witness `threshold` is set to 0; the oracle certifies
/// optimality, not a lemma bound.
pub fn brute_force_select(
    cols: &[&ValueSequence],
    floor: usize,
) -> Result<Option<SelectionWitness>, SelectionError> {
    let size: u128 = cols
        .iter()
        .map(|c| c.len() as u128)
        .try_fold(1u128, |acc, l| acc.checked_mul(l))
        .unwrap_or(u128::MAX);
    if size > ENUMERATION_BUDGET {
        return Err(SelectionError::TooLarge {
            size,
            budget: ENUMERATION_BUDGET,
        });
    }
    let k = cols.len();
    if k == 0 || cols.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let mut idx = vec![0usize; k];
    let mut best: Option<(Rational, Vec<usize>)> = None;
    loop {
        let positive = idx
            .iter()
            .zip(cols)
            .all(|(&i, col)| !col.get(i).is_zero());
        if positive && idx.iter().sum::<usize>() >= floor {
            let value: Rational = idx
                .iter()
                .zip(cols)
                .map(|(&i, col)| col.get(i).clone())
                .sum();
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, idx.clone()));
            }
        }
        // odometer, most significant digit first so lexicographic order holds
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(best.map(|(_, indices)| witness(cols, indices, Rational::zero())));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < cols[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Which selector a grid run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorKind {
    /// One sequence, k picks with repetition.
    Single,
    /// Four columns of length 2 with the sharp threshold.
    Sharp4,
    /// k distinct columns.
    Multi,
}

impl SelectorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectorKind::Single => "single",
            SelectorKind::Sharp4 => "sharp4",
            SelectorKind::Multi => "multi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridFailure {
    pub instance: u64,
    pub matrix: Vec<Vec<String>>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridReport {
    pub kind: SelectorKind,
    pub n: usize,
    pub k: usize,
    pub c: Rational,
    pub grid: Vec<Rational>,
    pub instances_checked: u64,
    pub hypothesis_hits: u64,
    pub failures: Vec<GridFailure>,
}

const MAX_REPORTED_FAILURES: usize = 32;

/// Enumerate every nonincreasing matrix over a finite value grid, and for
/// each one meeting the selector's hypothesis, demand a verified witness.
///
/// This is the desk-scale exhaustive check of the selection lemmas: zero
/// failures over a grid is a finite but complete statement.
pub fn grid_verify(
    kind: SelectorKind,
    n: usize,
    k: usize,
    grid: &[Rational],
    c: &Rational,
    budget: u128,
) -> Result<GridReport, SelectionError> {
    let mut levels: Vec<Rational> = grid.to_vec();
    for v in &levels {
        if !crate::rational::in_unit_interval(v) {
            return Err(SelectionError::ValueOutOfRange(crate::rational::display(v)));
        }
    }
    levels.sort_by(|a, b| b.cmp(a));
    levels.dedup();

    match kind {
        SelectorKind::Single => {
            if n < 2 || n % 2 != 0 || k < 4 {
                return Err(SelectionError::BadShape { n, k });
            }
        }
        SelectorKind::Sharp4 => {
            if n != 2 || k != 4 {
                return Err(SelectionError::BadShape { n, k });
            }
        }
        SelectorKind::Multi => {
            if !((n >= 3 && k >= 4) || (n == 2 && k >= 5)) {
                return Err(SelectionError::BadShape { n, k });
            }
        }
    }

    let seqs = nonincreasing_sequences(&levels, n);
    let s = seqs.len() as u128;
    let columns = match kind {
        SelectorKind::Single => 1u32,
        SelectorKind::Sharp4 | SelectorKind::Multi => k as u32,
    };
    let total = s.checked_pow(columns).unwrap_or(u128::MAX);
    if total > budget {
        return Err(SelectionError::TooLarge {
            size: total,
            budget,
        });
    }
    let total = total as u64;

    let outcome = (0..total)
        .into_par_iter()
        .map(|id| {
            let cols = decode_instance(&seqs, id, columns as usize);
            match check_instance(kind, &cols, n, k, c) {
                Ok(hit) => (u64::from(hit), Vec::new()),
                Err(reason) => (
                    1,
                    vec![GridFailure {
                        instance: id,
                        matrix: cols
                            .iter()
                            .map(|c| c.values().iter().map(crate::rational::display).collect())
                            .collect(),
                        reason,
                    }],
                ),
            }
        })
        .reduce(
            || (0u64, Vec::new()),
            |(h1, mut f1), (h2, f2)| {
                if f1.len() < MAX_REPORTED_FAILURES {
                    f1.extend(f2);
                    f1.truncate(MAX_REPORTED_FAILURES);
                }
                (h1 + h2, f1)
            },
        );

    let (hypothesis_hits, mut failures) = outcome;
    failures.sort_by_key(|f| f.instance);
    Ok(GridReport {
        kind,
        n,
        k,
        c: c.clone(),
        grid: levels,
        instances_checked: total,
        hypothesis_hits,
        failures,
    })
}

/// Returns Ok(true) on a hypothesis hit with verified witness, Ok(false) when
/// the hypothesis does not apply.
fn check_instance(
    kind: SelectorKind,
    cols: &[ValueSequence],
    n: usize,
    k: usize,
    c: &Rational,
) -> Result<bool, String> {
    let result = match kind {
        SelectorKind::Single => {
            let seq = &cols[0];
            if seq.sum() <= c * rat_int(n as i64) {
                return Ok(false);
            }
            select_single(seq, k, c, false)
        }
        SelectorKind::Sharp4 => {
            let total: Rational = cols.iter().map(|c| c.sum()).sum();
            if cols.iter().any(|c| c.get(0).is_zero()) || total <= c * rat_int(8) {
                return Ok(false);
            }
            let arr: [ValueSequence; 4] = [
                cols[0].clone(),
                cols[1].clone(),
                cols[2].clone(),
                cols[3].clone(),
            ];
            select_sharp4(&arr, c)
        }
        SelectorKind::Multi => {
            let total: Rational = cols.iter().map(|c| c.sum()).sum();
            if cols.iter().any(|c| c.get(0).is_zero()) || total <= c * rat_int((n * k) as i64) {
                return Ok(false);
            }
            select_multi(cols, c)
        }
    };
    match result {
        Ok(w) => {
            let views: Vec<&ValueSequence> = match kind {
                SelectorKind::Single => vec![&cols[0]; k],
                _ => cols.iter().collect(),
            };
            w.verify(&views, n)?;
            Ok(true)
        }
        Err(e) => Err(format!("selector failed: {e}")),
    }
}

fn decode_instance(seqs: &[ValueSequence], mut id: u64, columns: usize) -> Vec<ValueSequence> {
    let s = seqs.len() as u64;
    let mut cols = Vec::with_capacity(columns);
    for _ in 0..columns {
        cols.push(seqs[(id % s) as usize].clone());
        id /= s;
    }
    cols
}

/// All nonincreasing sequences of the given length over the (descending)
/// grid, i.e. multisets with repetition.
fn nonincreasing_sequences(levels_desc: &[Rational], len: usize) -> Vec<ValueSequence> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(len);
    fn rec(levels: &[Rational], len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<ValueSequence>) {
        if cur.len() == len {
            let values = cur.iter().map(|&i| levels[i].clone()).collect();
            out.push(ValueSequence::new(values).expect("grid sequences are valid"));
            return;
        }
        for i in start..levels.len() {
            cur.push(i);
            rec(levels, len, i, cur, out);
            cur.pop();
        }
    }
    rec(levels_desc, len, 0, &mut current, &mut out);
    out
}

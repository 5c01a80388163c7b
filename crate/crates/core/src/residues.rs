//! Residue selection over unit groups of squarefree moduli.
//!
//! Given weight functions `f_1..f_k : Z_q^* -> [0,1]` whose total mass beats a
//! density threshold, produce units `x_1..x_k` with `sum x_i = n (mod q)`,
//! every `f_i(x_i) > 0`, and the value sum above the branch's bound.
//!
//! The construction argues fiberwise: write `q = q1 * p`, average each weight
//! over the `Z_p^*` fiber, select recursively on `Z_{q1}^*`, then solve the
//! remaining prime fiber by sorting the restricted weights, running the
//! combinatorial index selector, and walking the Cauchy-Davenport-covered
//! sumset of the resulting level sets back to an explicit tuple. An
//! exhaustive oracle lives alongside for cross-checking.
//!
//! Bounds per branch, for hypothesis constant `c`:
//! * single weight, any squarefree q: value sum > k*c;
//! * k distinct weights, q with 3 | q and k = 4: the construction guarantees
//!   (16/3)c - 1 through the sharp four-column selector on the `Z_3` fiber.
//!   The literature states a different constant for this branch in two
//!   mutually inconsistent forms; both are carried on the witness
//!   (`threshold`, `alt_threshold`) with met-flags, while `guaranteed` holds
//!   the bound the invoked selector actually certifies;
//! * k distinct weights otherwise: value sum > c*k.

use crate::modulus::{crt_merge, ModulusError, SqfModulus};
use crate::rational::{rat, rat_int, Rational};
use crate::selection::{dp_select, ValueSequence};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// Enumeration guard for the exhaustive oracle: totient^k may not exceed this.
pub const ORACLE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("target {n} has the wrong parity: units of even q force sum = k mod 2 (k = {k})")]
    ParityMismatch { n: u64, k: usize },
    #[error("weights live on different moduli")]
    ModulusMismatch,
    #[error(transparent)]
    Modulus(#[from] ModulusError),
    #[error("enumeration space {size} exceeds budget {budget}")]
    TooLarge { size: u128, budget: u128 },
    #[error("{q} is not prime")]
    NotPrime { q: u64 },
    #[error("no witness exists although the hypothesis holds; this is a defect")]
    InternalNoWitness,
    #[error("weight value {0} outside [0, 1]")]
    ValueOutOfRange(String),
    #[error("expected {expected} values (one per unit), got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// A weight function on the units of a squarefree modulus, values in [0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    modulus: SqfModulus,
    units: Vec<u64>,
    values: Vec<Rational>,
    mass: Rational,
}

impl WeightVector {
    /// Values given in unit order (strictly increasing units).
    pub fn new(modulus: SqfModulus, values: Vec<Rational>) -> Result<Self, ResidueError> {
        let units = modulus.units();
        if values.len() != units.len() {
            return Err(ResidueError::WrongLength {
                expected: units.len(),
                got: values.len(),
            });
        }
        for v in &values {
            if !crate::rational::in_unit_interval(v) {
                return Err(ResidueError::ValueOutOfRange(crate::rational::display(v)));
            }
        }
        let mass = values.iter().sum();
        Ok(WeightVector {
            modulus,
            units,
            values,
            mass,
        })
    }

    pub fn from_fn(
        modulus: SqfModulus,
        mut f: impl FnMut(u64) -> Rational,
    ) -> Result<Self, ResidueError> {
        let values = modulus.units().iter().map(|&u| f(u)).collect();
        Self::new(modulus, values)
    }

    pub fn constant(modulus: SqfModulus, v: Rational) -> Result<Self, ResidueError> {
        let n = modulus.totient() as usize;
        Self::new(modulus, vec![v; n])
    }

    pub fn modulus(&self) -> &SqfModulus {
        &self.modulus
    }

    pub fn units(&self) -> &[u64] {
        &self.units
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Total mass; cached at construction and equal to recomputation.
    pub fn mass(&self) -> &Rational {
        &self.mass
    }

    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn value_at(&self, unit: u64) -> Option<&Rational> {
        self.units
            .binary_search(&unit)
            .ok()
            .map(|i| &self.values[i])
    }

    /// Average over the `Z_p^*` fiber: the resulting weight on `Z_{q/p}^*` is
    /// `g(x) = (1/phi(p)) * sum_y f(merge(x, y))`; mass(g) = mass(f)/phi(p).
    pub fn fiber_average(&self, p: u64) -> Result<WeightVector, ResidueError> {
        let m1 = self.modulus.cofactor(p)?;
        let q1 = m1.q();
        let p_units: Vec<u64> = SqfModulus::new(p)?.units();
        let phi_p = rat_int(p_units.len() as i64);
        let values = m1
            .units()
            .iter()
            .map(|&x| {
                let sum: Rational = p_units
                    .iter()
                    .map(|&y| {
                        let u = crt_merge(x, y, q1, p).expect("coprime by construction");
                        self.value_at(u).expect("merged unit is a unit").clone()
                    })
                    .sum();
                sum / &phi_p
            })
            .collect();
        WeightVector::new(m1, values)
    }

    /// Restrict to the fiber over `x1`: `h(y) = f(merge(x1, y))` on `Z_p^*`.
    pub fn fiber_restrict(&self, x1: u64, p: u64) -> Result<WeightVector, ResidueError> {
        let m1 = self.modulus.cofactor(p)?;
        let q1 = m1.q();
        let mp = SqfModulus::new(p)?;
        let values = mp
            .units()
            .iter()
            .map(|&y| {
                let u = crt_merge(x1, y, q1, p).expect("coprime by construction");
                self.value_at(u).expect("merged unit is a unit").clone()
            })
            .collect();
        WeightVector::new(mp, values)
    }
}

/// Standalone form of [`WeightVector::fiber_average`].
pub fn fiber_average(f: &WeightVector, p: u64) -> Result<WeightVector, ResidueError> {
    f.fiber_average(p)
}

/// Which arithmetic branch produced the witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueBranch {
    /// One weight function used k times; bound k*c.
    Single,
    /// k weight functions, bound c*k.
    Multi,
    /// k = 4 with 3 | q; the `Z_3` fiber goes through the sharp four-column
    /// selector, certified bound (16/3)c - 1.
    MultiSharp3,
}

impl ResidueBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResidueBranch::Single => "single",
            ResidueBranch::Multi => "multi",
            ResidueBranch::MultiSharp3 => "multi-sharp3",
        }
    }
}

/// An explicit unit tuple certifying residue selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueWitness {
    pub modulus: u64,
    pub k: usize,
    pub target: u64,
    pub residues: Vec<u64>,
    pub value_sum: Rational,
    /// Bound stated for this branch in the arithmetic lemma.
    pub threshold: Rational,
    /// Alternative published bound for the sharp branch, when it differs.
    pub alt_threshold: Option<Rational>,
    /// Bound the invoked construction actually certifies.
    pub guaranteed: Rational,
    pub threshold_met: bool,
    pub guaranteed_met: bool,
    pub branch: ResidueBranch,
    /// True when the recursive construction fell short and the witness came
    /// from the direct whole-modulus optimizer instead.
    pub via_fallback: bool,
}

impl ResidueWitness {
    /// Recompute congruence, positivity, value sum, and flags against the
    /// weight functions; the witness must stand on its own.
    pub fn verify(&self, fs: &[&WeightVector]) -> Result<(), String> {
        if fs.len() != self.k || self.residues.len() != self.k {
            return Err("arity mismatch".into());
        }
        let q = fs[0].modulus().q();
        if q != self.modulus {
            return Err("modulus mismatch".into());
        }
        let mut sum = 0u64;
        let mut value = Rational::zero();
        for (f, &x) in fs.iter().zip(&self.residues) {
            if !f.modulus().is_unit(x) {
                return Err(format!("{x} is not a unit mod {q}"));
            }
            let v = f
                .value_at(x)
                .ok_or_else(|| format!("{x} missing from weight"))?;
            if v.is_zero() {
                return Err(format!("selected weight at {x} is zero"));
            }
            value += v;
            sum = (sum + x) % q;
        }
        if sum != self.target % q {
            return Err(format!("sum = {sum} but target = {}", self.target % q));
        }
        if value != self.value_sum {
            return Err("value_sum does not recompute".into());
        }
        if (self.value_sum > self.threshold) != self.threshold_met {
            return Err("threshold_met flag wrong".into());
        }
        if (self.value_sum > self.guaranteed) != self.guaranteed_met {
            return Err("guaranteed_met flag wrong".into());
        }
        Ok(())
    }
}

/// Weight functions for one selection level: either one shared function used
/// k times or k distinct functions. The shared form keeps the single-set
/// route from recomputing identical fiber averages.
#[derive(Debug, Clone)]
enum Level {
    Shared(WeightVector, usize),
    Distinct(Vec<WeightVector>),
}

impl Level {
    fn k(&self) -> usize {
        match self {
            Level::Shared(_, k) => *k,
            Level::Distinct(fs) => fs.len(),
        }
    }

    fn modulus(&self) -> &SqfModulus {
        match self {
            Level::Shared(f, _) => f.modulus(),
            Level::Distinct(fs) => fs[0].modulus(),
        }
    }

    fn get(&self, j: usize) -> &WeightVector {
        match self {
            Level::Shared(f, _) => f,
            Level::Distinct(fs) => &fs[j],
        }
    }

    fn fiber_average(&self, p: u64) -> Result<Level, ResidueError> {
        Ok(match self {
            Level::Shared(f, k) => Level::Shared(f.fiber_average(p)?, *k),
            Level::Distinct(fs) => Level::Distinct(
                fs.iter()
                    .map(|f| f.fiber_average(p))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    fn fiber_restrict(&self, picks: &[u64], p: u64) -> Result<Level, ResidueError> {
        match self {
            Level::Shared(f, k) => {
                if picks.iter().all(|&u| u == picks[0]) {
                    Ok(Level::Shared(f.fiber_restrict(picks[0], p)?, *k))
                } else {
                    Ok(Level::Distinct(
                        picks
                            .iter()
                            .map(|&u| f.fiber_restrict(u, p))
                            .collect::<Result<_, _>>()?,
                    ))
                }
            }
            Level::Distinct(fs) => Ok(Level::Distinct(
                fs.iter()
                    .zip(picks)
                    .map(|(f, &u)| f.fiber_restrict(u, p))
                    .collect::<Result<_, _>>()?,
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Single,
    Multi,
}

/// Which prime factor to fiber on at this level. Largest first, except that
/// four distinct weights over a modulus divisible by 3 must meet the sharp
/// selector on the `Z_3` fiber at the outermost level, after the strong bound
/// has been carried through every other factor.
fn peel(m: &SqfModulus, k: usize, route: Route) -> u64 {
    if route == Route::Multi && k == 4 && m.q() % 3 == 0 && m.q() != 3 {
        return 3;
    }
    *m.factors().last().expect("composite modulus has factors")
}

/// Sorted view of one weight function: values descending, units tie-broken
/// ascending so everything downstream is deterministic.
struct SortedWeights {
    seq: ValueSequence,
    unit_order: Vec<u64>,
}

fn sort_desc(f: &WeightVector) -> SortedWeights {
    let mut order: Vec<usize> = (0..f.units().len()).collect();
    order.sort_by(|&a, &b| {
        f.values()[b]
            .cmp(&f.values()[a])
            .then(f.units()[a].cmp(&f.units()[b]))
    });
    let seq = ValueSequence::new(order.iter().map(|&i| f.values()[i].clone()).collect())
        .expect("sorted weights form a valid sequence");
    let unit_order = order.iter().map(|&i| f.units()[i]).collect();
    SortedWeights { seq, unit_order }
}

/// Solve one prime level by the constructive route only: sort, select cutoff
/// indices with the exact DP (index sum floor = phi(p)), form the level sets,
/// and walk the Cauchy-Davenport-covered sumset back to a tuple hitting the
/// target. Fails with `InternalNoWitness` when the weights are too thin for
/// the index floor.
fn prime_level_strict(level: &Level, target: u64) -> Result<Vec<u64>, ResidueError> {
    let m = level.modulus();
    let p = m.q();
    let k = level.k();
    debug_assert!(m.is_prime());

    if p == 2 {
        // single unit 1; the tuple is forced and the sum is k mod 2
        if target != (k as u64) % 2 {
            return Err(ResidueError::InternalNoWitness);
        }
        for j in 0..k {
            if level.get(j).values()[0].is_zero() {
                return Err(ResidueError::InternalNoWitness);
            }
        }
        return Ok(vec![1; k]);
    }

    let sorted: Vec<SortedWeights> = match level {
        Level::Shared(f, _) => vec![sort_desc(f)],
        Level::Distinct(fs) => fs.iter().map(sort_desc).collect(),
    };
    let col = |j: usize| -> &SortedWeights {
        match level {
            Level::Shared(..) => &sorted[0],
            Level::Distinct(..) => &sorted[j],
        }
    };
    let floor = (p - 1) as usize;
    let cols: Vec<&ValueSequence> = (0..k).map(|j| &col(j).seq).collect();

    let Some((indices, _)) = dp_select(&cols, floor) else {
        return Err(ResidueError::InternalNoWitness);
    };
    // level sets: everything at least as heavy as the selected cutoff
    let sets: Vec<Vec<u64>> = indices
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            let sw = col(j);
            let cutoff = sw.seq.get(i);
            let len = sw
                .seq
                .values()
                .iter()
                .take_while(|v| *v >= cutoff)
                .count();
            sw.unit_order[..len].to_vec()
        })
        .collect();
    let total_size: usize = sets.iter().map(|s| s.len()).sum();
    debug_assert!(total_size >= floor + k, "level sets too small for coverage");
    // coverage is a theorem given the index floor; a miss here is a defect
    reach_target(p, &sets, target).ok_or(ResidueError::InternalNoWitness)
}

/// Prime level with a safety net: if the constructive route cannot reach the
/// index floor, take the best positive congruent tuple from the direct
/// optimizer and flag it.
fn prime_level(level: &Level, target: u64) -> Result<(Vec<u64>, bool), ResidueError> {
    match prime_level_strict(level, target) {
        Ok(picks) => Ok((picks, false)),
        Err(ResidueError::InternalNoWitness) => match direct_dp(level, target) {
            Some(picks) => Ok((picks, true)),
            None => Err(ResidueError::InternalNoWitness),
        },
        Err(e) => Err(e),
    }
}

/// Reachability over Z_p: find one element per set summing to `target`,
/// preferring smaller units during backtracking.
fn reach_target(p: u64, sets: &[Vec<u64>], target: u64) -> Option<Vec<u64>> {
    let k = sets.len();
    let mut reach = vec![vec![false; p as usize]; k + 1];
    reach[0][0] = true;
    for j in 0..k {
        for r in 0..p as usize {
            if reach[j][r] {
                for &u in &sets[j] {
                    reach[j + 1][((r as u64 + u) % p) as usize] = true;
                }
            }
        }
    }
    if !reach[k][target as usize] {
        return None;
    }
    let mut picks = vec![0u64; k];
    let mut t = target;
    for j in (0..k).rev() {
        let mut sorted_units = sets[j].clone();
        sorted_units.sort_unstable();
        let u = sorted_units
            .into_iter()
            .find(|&u| reach[j][((t + p - u % p) % p) as usize])
            .expect("reachability table admits a path");
        picks[j] = u;
        t = (t + p - u % p) % p;
    }
    Some(picks)
}

/// Direct exact optimizer over one modulus: maximize the value sum over
/// positive-weight tuples with the target congruence, by dynamic programming
/// over (position, partial sum mod q). Lexicographically smallest optimum.
fn direct_dp(level: &Level, target: u64) -> Option<Vec<u64>> {
    let m = level.modulus();
    let q = m.q() as usize;
    let k = level.k();
    let mut dp: Vec<Vec<Option<Rational>>> = vec![vec![None; q]; k + 1];
    dp[0][0] = Some(Rational::zero());
    for j in 0..k {
        let f = level.get(j);
        for r in 0..q {
            if dp[j][r].is_none() {
                continue;
            }
            let base = dp[j][r].clone().unwrap();
            for (i, &u) in f.units().iter().enumerate() {
                let v = &f.values()[i];
                if v.is_zero() {
                    continue;
                }
                let nr = (r + u as usize) % q;
                let cand = &base + v;
                if dp[j + 1][nr].as_ref().is_none_or(|b| cand > *b) {
                    dp[j + 1][nr] = Some(cand);
                }
            }
        }
    }
    dp[k][target as usize].clone()?;
    // backtrack, smallest unit first
    let mut picks = vec![0u64; k];
    let mut t = target as usize;
    let mut need = dp[k][t].clone().unwrap();
    for j in (0..k).rev() {
        let f = level.get(j);
        let q64 = q as u64;
        let mut found = false;
        for (i, &u) in f.units().iter().enumerate() {
            let v = &f.values()[i];
            if v.is_zero() {
                continue;
            }
            let pr = ((t as u64 + q64 - u % q64) % q64) as usize;
            if let Some(prev) = &dp[j][pr] {
                if prev + v == need {
                    picks[j] = u;
                    t = pr;
                    need = prev.clone();
                    found = true;
                    break;
                }
            }
        }
        debug_assert!(found, "DP backtrack must succeed");
    }
    Some(picks)
}

/// The fiberwise recursion. Returns the tuple and whether any level fell back
/// to the direct optimizer.
fn select_rec(level: &Level, target: u64, route: Route) -> Result<(Vec<u64>, bool), ResidueError> {
    let m = level.modulus().clone();
    let q = m.q();
    let k = level.k();
    if q == 1 {
        for j in 0..k {
            if level.get(j).values()[0].is_zero() {
                return Err(ResidueError::InternalNoWitness);
            }
        }
        return Ok((vec![0; k], false));
    }
    if m.is_prime() {
        return prime_level(level, target);
    }
    let p = peel(&m, k, route);
    let q1 = q / p;
    let averaged = level.fiber_average(p)?;
    let (upper, fb1) = select_rec(&averaged, target % q1, route)?;
    let fiber = level.fiber_restrict(&upper, p)?;
    let (lower, fb2) = prime_level(&fiber, target % p)?;
    let residues = upper
        .iter()
        .zip(&lower)
        .map(|(&a, &b)| crt_merge(a, b, q1, p).expect("coprime factors"))
        .collect();
    Ok((residues, fb1 || fb2))
}

fn compose_witness(
    fs: &[&WeightVector],
    residues: Vec<u64>,
    target: u64,
    c: &Rational,
    branch: ResidueBranch,
    via_fallback: bool,
) -> ResidueWitness {
    let k = fs.len();
    let q = fs[0].modulus().q();
    let value_sum: Rational = fs
        .iter()
        .zip(&residues)
        .map(|(f, &x)| f.value_at(x).expect("witness residues are units").clone())
        .sum();
    let kc = c * rat_int(k as i64);
    let (threshold, alt_threshold, guaranteed) = match branch {
        ResidueBranch::Single => (kc.clone(), None, kc.clone()),
        ResidueBranch::Multi => (kc.clone(), None, kc.clone()),
        ResidueBranch::MultiSharp3 => {
            let sharp = rat(16, 3) * c - rat_int(1);
            let stated = rat_int(4) * &sharp;
            let recap = (rat_int(2) * c - rat_int(1)) * rat_int(k as i64);
            (stated, Some(recap), sharp)
        }
    };
    ResidueWitness {
        modulus: q,
        k,
        target,
        threshold_met: value_sum > threshold,
        guaranteed_met: value_sum > guaranteed,
        residues,
        value_sum,
        threshold,
        alt_threshold,
        guaranteed,
        branch,
        via_fallback,
    }
}

/// If the recursive construction missed the certified bound, retry with the
/// direct whole-modulus optimizer and keep the better tuple.
fn with_fallback(
    level: &Level,
    fs: &[&WeightVector],
    target: u64,
    c: &Rational,
    branch: ResidueBranch,
    rec: (Vec<u64>, bool),
) -> ResidueWitness {
    let w = compose_witness(fs, rec.0, target, c, branch, rec.1);
    if w.guaranteed_met {
        return w;
    }
    if let Some(picks) = direct_dp(level, target) {
        let alt = compose_witness(fs, picks, target, c, branch, true);
        if alt.value_sum > w.value_sum {
            return alt;
        }
    }
    w
}

/// Selection with one weight function used for all `k` summands.
///
/// Hypothesis: `k >= 4`, `c > 1/2`, `mass(f) > c * phi(q)`. For even `q` the
/// units force `sum x_i = k (mod 2)`, so targets of the other parity are
/// rejected as [`ResidueError::ParityMismatch`].
pub fn select_residues_single(
    f: &WeightVector,
    k: usize,
    c: &Rational,
    n: i64,
) -> Result<ResidueWitness, ResidueError> {
    if k < 4 {
        return Err(ResidueError::HypothesisUnmet(format!(
            "k = {k}; need k >= 4"
        )));
    }
    if *c <= rat(1, 2) {
        return Err(ResidueError::HypothesisUnmet("need c > 1/2".into()));
    }
    let m = f.modulus();
    let q = m.q();
    if *f.mass() <= c * rat_int(m.totient() as i64) {
        return Err(ResidueError::HypothesisUnmet(format!(
            "mass <= c * phi({q})"
        )));
    }
    let target = n.rem_euclid(q as i64) as u64;
    if m.is_even() && (n - k as i64) % 2 != 0 {
        return Err(ResidueError::ParityMismatch { n: target, k });
    }
    let level = Level::Shared(f.clone(), k);
    let rec = select_rec(&level, target, Route::Single)?;
    let fs = vec![f; k];
    let w = with_fallback(&level, &fs, target, c, ResidueBranch::Single, rec);
    debug_assert_eq!(w.verify(&fs), Ok(()));
    Ok(w)
}

/// Selection with `k` distinct weight functions on a common modulus.
///
/// Hypothesis: `k >= 4`, `c > (k+1)/(2k)`, no `f_i` identically zero, and
/// `total mass > k * c * phi(q)`. For even `q` the target must have the
/// parity of `k`.
pub fn select_residues_multi(
    fs: &[WeightVector],
    c: &Rational,
    n: i64,
) -> Result<ResidueWitness, ResidueError> {
    let k = fs.len();
    if k < 4 {
        return Err(ResidueError::HypothesisUnmet(format!(
            "k = {k}; need k >= 4"
        )));
    }
    let m = fs[0].modulus();
    if fs.iter().any(|f| f.modulus() != m) {
        return Err(ResidueError::ModulusMismatch);
    }
    if *c <= rat((k + 1) as i64, 2 * k as i64) {
        return Err(ResidueError::HypothesisUnmet(format!(
            "need c > (k+1)/(2k) = {}/{}",
            k + 1,
            2 * k
        )));
    }
    if let Some(j) = fs.iter().position(|f| f.mass().is_zero()) {
        return Err(ResidueError::HypothesisUnmet(format!(
            "weight {j} is identically zero"
        )));
    }
    let total: Rational = fs.iter().map(|f| f.mass().clone()).sum();
    let q = m.q();
    if total <= c * rat_int((k as u64 * m.totient()) as i64) {
        return Err(ResidueError::HypothesisUnmet(format!(
            "total mass <= k * c * phi({q})"
        )));
    }
    let target = n.rem_euclid(q as i64) as u64;
    if m.is_even() && (n - k as i64) % 2 != 0 {
        return Err(ResidueError::ParityMismatch { n: target, k });
    }
    let branch = if k == 4 && q % 3 == 0 {
        ResidueBranch::MultiSharp3
    } else {
        ResidueBranch::Multi
    };
    let level = Level::Distinct(fs.to_vec());
    let rec = select_rec(&level, target, Route::Multi)?;
    let views: Vec<&WeightVector> = fs.iter().collect();
    let w = with_fallback(&level, &views, target, c, branch, rec);
    debug_assert_eq!(w.verify(&views), Ok(()));
    Ok(w)
}

/// The prime-modulus engine, exposed directly: sort each weight, select
/// cutoffs with the exact index DP, form level sets, and recover a tuple for
/// `n` from the covered sumset. Errors with `HypothesisUnmet` when the
/// weights are too thin to reach the index-sum floor.
pub fn prime_base_case(
    fs: &[WeightVector],
    c: &Rational,
    n: i64,
) -> Result<ResidueWitness, ResidueError> {
    let k = fs.len();
    if k == 0 {
        return Err(ResidueError::HypothesisUnmet("no weights given".into()));
    }
    let m = fs[0].modulus();
    if !m.is_prime() {
        return Err(ResidueError::NotPrime { q: m.q() });
    }
    if fs.iter().any(|f| f.modulus() != m) {
        return Err(ResidueError::ModulusMismatch);
    }
    let q = m.q();
    let target = n.rem_euclid(q as i64) as u64;
    if m.is_even() && (n - k as i64) % 2 != 0 {
        return Err(ResidueError::ParityMismatch { n: target, k });
    }
    let level = Level::Distinct(fs.to_vec());
    let residues = match prime_level_strict(&level, target) {
        Ok(r) => r,
        Err(ResidueError::InternalNoWitness) => {
            return Err(ResidueError::HypothesisUnmet(
                "weights too thin to reach the index-sum floor".into(),
            ))
        }
        Err(e) => return Err(e),
    };
    let branch = if k == 4 && q == 3 {
        ResidueBranch::MultiSharp3
    } else {
        ResidueBranch::Multi
    };
    let views: Vec<&WeightVector> = fs.iter().collect();
    let w = compose_witness(&views, residues, target, c, branch, false);
    debug_assert_eq!(w.verify(&views), Ok(()));
    Ok(w)
}

/// Lean oracle record: tuple and its value sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleEntry {
    pub residues: Vec<u64>,
    pub value_sum: Rational,
}

/// Exhaustive enumeration over all positive-weight tuples: for every target
/// class simultaneously, the maximal value sum and its lexicographically
/// smallest tuple. `None` entries mean no positive tuple hits that class.
pub fn brute_force_residue_table(
    fs: &[WeightVector],
) -> Result<Vec<Option<OracleEntry>>, ResidueError> {
    let k = fs.len();
    assert!(k > 0);
    let m = fs[0].modulus();
    if fs.iter().any(|f| f.modulus() != m) {
        return Err(ResidueError::ModulusMismatch);
    }
    let q = m.q();
    let phi = m.totient() as u128;
    let size = phi.checked_pow(k as u32).unwrap_or(u128::MAX);
    if size > ORACLE_BUDGET {
        return Err(ResidueError::TooLarge {
            size,
            budget: ORACLE_BUDGET,
        });
    }

    // supports: positive-weight units only, ascending, so the first optimum
    // found is the lexicographically smallest
    let supports: Vec<Vec<(u64, &Rational)>> = fs
        .iter()
        .map(|f| {
            f.units()
                .iter()
                .zip(f.values())
                .filter(|(_, v)| !v.is_zero())
                .map(|(&u, v)| (u, v))
                .collect()
        })
        .collect();
    if supports.iter().any(|s| s.is_empty()) {
        return Ok(vec![None; q as usize]);
    }

    // fast path: common denominator small enough for u64 numerators
    if let Some(scaled) = scale_to_u64(&supports) {
        return Ok(enumerate_scaled(q, &scaled));
    }
    Ok(enumerate_rational(q, &supports))
}

/// Exhaustive maximization for a single target; see
/// [`brute_force_residue_table`].
pub fn brute_force_residues(
    fs: &[WeightVector],
    n: i64,
) -> Result<Option<ResidueWitness>, ResidueError> {
    let q = fs[0].modulus().q();
    let target = n.rem_euclid(q as i64) as u64;
    let table = brute_force_residue_table(fs)?;
    Ok(table[target as usize].as_ref().map(|e| {
        let value_sum = e.value_sum.clone();
        ResidueWitness {
            modulus: q,
            k: fs.len(),
            target,
            residues: e.residues.clone(),
            threshold: Rational::zero(),
            alt_threshold: None,
            guaranteed: Rational::zero(),
            threshold_met: !value_sum.is_zero(),
            guaranteed_met: !value_sum.is_zero(),
            value_sum,
            branch: ResidueBranch::Multi,
            via_fallback: false,
        }
    }))
}

type ScaledSupports = (Vec<Vec<(u64, u64)>>, BigInt);

/// Rescale all support values to a common denominator if the numerators fit
/// comfortably in u64.
fn scale_to_u64(supports: &[Vec<(u64, &Rational)>]) -> Option<ScaledSupports> {
    let mut denom = BigInt::from(1u8);
    for s in supports {
        for (_, v) in s {
            denom = denom.lcm(v.denom());
        }
    }
    let limit = BigInt::from(u64::MAX >> 8);
    let mut scaled = Vec::with_capacity(supports.len());
    for s in supports {
        let mut row = Vec::with_capacity(s.len());
        for (u, v) in s {
            let num = v.numer() * (&denom / v.denom());
            if num > limit {
                return None;
            }
            row.push((*u, num.to_u64()?));
        }
        scaled.push(row);
    }
    Some((scaled, denom))
}

fn enumerate_scaled(q: u64, scaled: &ScaledSupports) -> Vec<Option<OracleEntry>> {
    let (supports, denom) = scaled;
    let k = supports.len();
    let mut best_val: Vec<Option<u64>> = vec![None; q as usize];
    let mut best_tuple: Vec<Vec<u64>> = vec![Vec::new(); q as usize];

    let mut idx = vec![0usize; k];
    // partial sums: res[j], val[j] cover positions < j
    let mut res = vec![0u64; k + 1];
    let mut val = vec![0u64; k + 1];
    let recompute = |idx: &[usize], res: &mut [u64], val: &mut [u64], from: usize| {
        for j in from..k {
            let (u, v) = supports[j][idx[j]];
            res[j + 1] = (res[j] + u) % q;
            val[j + 1] = val[j] + v;
        }
    };
    recompute(&idx, &mut res, &mut val, 0);
    loop {
        let r = res[k] as usize;
        let v = val[k];
        if best_val[r].is_none_or(|b| v > b) {
            best_val[r] = Some(v);
            best_tuple[r] = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| supports[j][i].0)
                .collect();
        }
        // odometer: least significant digit last for lexicographic order
        let mut pos = k;
        loop {
            if pos == 0 {
                return best_val
                    .into_iter()
                    .zip(best_tuple)
                    .map(|(v, t)| {
                        v.map(|v| OracleEntry {
                            residues: t,
                            value_sum: Rational::new(BigInt::from(v), denom.clone()),
                        })
                    })
                    .collect();
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < supports[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
        recompute(&idx, &mut res, &mut val, pos);
    }
}

fn enumerate_rational(q: u64, supports: &[Vec<(u64, &Rational)>]) -> Vec<Option<OracleEntry>> {
    let k = supports.len();
    let mut best: Vec<Option<OracleEntry>> = vec![None; q as usize];
    let mut idx = vec![0usize; k];
    let mut res = vec![0u64; k + 1];
    let mut val = vec![Rational::zero(); k + 1];
    let recompute =
        |idx: &[usize], res: &mut [u64], val: &mut [Rational], from: usize| {
            for j in from..k {
                let (u, v) = supports[j][idx[j]];
                res[j + 1] = (res[j] + u) % q;
                val[j + 1] = &val[j] + v;
            }
        };
    recompute(&idx, &mut res, &mut val, 0);
    loop {
        let r = res[k] as usize;
        if best[r]
            .as_ref()
            .is_none_or(|e| val[k] > e.value_sum)
        {
            best[r] = Some(OracleEntry {
                residues: idx
                    .iter()
                    .enumerate()
                    .map(|(j, &i)| supports[j][i].0)
                    .collect(),
                value_sum: val[k].clone(),
            });
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < supports[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
        recompute(&idx, &mut res, &mut val, pos);
    }
}

//! Brute-force verification engine built on Toeplitz correlation matrices.
//!
//! `Sigma_n[i][j] = R_H(i - j)` is the `n x n` Hermitian Toeplitz matrix of
//! the fading autocorrelation. Everything here works from `Sigma_n` directly
//! (log-determinants, linear prediction, the ON-OFF functional `alpha`) and
//! never from the spectral integrals, so it provides independent checks of
//! the capacity formulas.

use std::collections::HashMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::capacity::{upper_bound_up, Extended};
use crate::error::{invalid, Error, Result};
use crate::real::Real;
use crate::spectra::{ModelKind, SpectralModel, TimeDomain};

/// Gram matrices with an eigenvalue below `-PSD_TOL` are rejected.
pub const PSD_TOL: f64 = 1e-10;

/// Largest `n` accepted by [`subset_search`].
pub const SUBSET_CAP: usize = 22;

/// Largest `n` accepted by [`verify_alpha_properties`].
pub const ALPHA_VERIFY_CAP: usize = 10;

/// Largest `n` for which the betterness-under-translation check runs.
pub const TRANSLATION_CHECK_CAP: usize = 8;

type C<T> = Complex<T>;

/// `n x n` Hermitian Toeplitz Gram matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzGram<T> {
    first_row: Vec<C<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogDetMethod {
    /// Dense Cholesky factorization, `O(n^3)`.
    Cholesky,
    /// Levinson-Durbin prediction recursion, `O(n^2)`.
    Levinson,
}

impl<T: Real> ToeplitzGram<T> {
    /// Builds the Gram matrix from `R(0), ..., R(n-1)`, checking the unit
    /// diagonal and positive semidefiniteness (which makes every pivot of
    /// `I + P Sigma` at least 1).
    pub fn from_first_row(first_row: Vec<C<T>>) -> Result<Self> {
        let Some(r0) = first_row.first() else {
            return Err(invalid("Gram matrix needs n >= 1"));
        };
        if (r0.re - T::one()).abs() > T::lit(1e-9) || r0.im != T::zero() {
            return Err(invalid(format!("Gram diagonal must be 1, got {r0}")));
        }
        let gram = Self { first_row };
        // Sigma + tol I is positive definite iff no eigenvalue of Sigma is
        // below -tol; the prediction recursion fails exactly then.
        let tol = T::lit(PSD_TOL);
        let mut shifted = gram.first_row.clone();
        shifted[0] += tol;
        levinson(&shifted).map_err(|e| match e {
            Error::NotPositiveDefinite { index, pivot } => Error::NotPositiveDefinite {
                index,
                pivot: pivot - PSD_TOL,
            },
            other => other,
        })?;
        Ok(gram)
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[C<T>] {
        &self.first_row
    }

    /// `R(lag)` for `|lag| < n`.
    pub fn lag(&self, lag: isize) -> C<T> {
        if lag >= 0 {
            self.first_row[lag as usize]
        } else {
            self.first_row[lag.unsigned_abs()].conj()
        }
    }

    /// `Sigma[i][j] = R(i - j)`.
    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.lag(i as isize - j as isize)
    }

    pub fn dense(&self) -> Vec<Vec<C<T>>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// First row of `I + P Sigma`.
    fn shifted_row(&self, p: T) -> Vec<C<T>> {
        let mut r: Vec<C<T>> = self.first_row.iter().map(|&x| x * p).collect();
        r[0] += T::one();
        r
    }
}

/// `Sigma_n` for a discrete-time model.
///
/// Block fading is supported for `n` up to the block length, where the Gram
/// matrix is all ones.
pub fn build_gram<T: Real>(model: &SpectralModel<T>, n: usize) -> Result<ToeplitzGram<T>> {
    if n == 0 {
        return Err(invalid("Gram matrix needs n >= 1"));
    }
    if model.time_domain() != TimeDomain::Discrete {
        return Err(invalid("Toeplitz Gram matrices need a discrete-time model"));
    }
    let row = match model.kind() {
        ModelKind::BlockFading { block_len, .. } => {
            if T::from_usize_lossy(n) > *block_len {
                return Err(Error::Unsupported(format!(
                    "block fading is not stationary across blocks: n = {n} exceeds block length {block_len}"
                )));
            }
            vec![C::new(T::one(), T::zero()); n]
        }
        _ => (0..n)
            .map(|k| model.autocorrelation(T::from_usize_lossy(k)))
            .collect::<Result<Vec<_>>>()?,
    };
    ToeplitzGram::from_first_row(row)
}

/// One-step prediction errors of a stationary process with autocorrelation
/// `r(0), ..., r(n-1)` (Levinson-Durbin recursion).
///
/// Entry `k` is the error of predicting a sample from the `k` preceding
/// ones, equal to `D_{k+1} / D_k` for the leading principal minors `D_k`.
pub fn levinson<T: Real>(r: &[C<T>]) -> Result<Vec<T>> {
    let n = r.len();
    let mut sigma = Vec::with_capacity(n);
    if n == 0 {
        return Ok(sigma);
    }
    let zero = C::new(T::zero(), T::zero());
    let mut a = vec![zero; n];
    a[0] = C::new(T::one(), T::zero());
    let mut s = r[0].re;
    if !(s > T::zero()) {
        return Err(Error::NotPositiveDefinite {
            index: 0,
            pivot: s.as_f64(),
        });
    }
    sigma.push(s);
    let mut prev = vec![zero; n];
    for m in 1..n {
        let delta: C<T> = (0..m).map(|i| a[i] * r[m - i]).fold(zero, |acc, x| acc + x);
        let kappa = -delta / s;
        prev[..m].copy_from_slice(&a[..m]);
        for i in 1..m {
            a[i] = prev[i] + kappa * prev[m - i].conj();
        }
        a[m] = kappa;
        s -= delta.norm_sqr() / s;
        if !(s > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                index: m,
                pivot: s.as_f64(),
            });
        }
        sigma.push(s);
    }
    Ok(sigma)
}

/// `log det A` of a dense Hermitian positive definite matrix, from the
/// pivots of its Cholesky factorization (never forming the determinant).
pub fn cholesky_log_det<T: Real>(a: &[Vec<C<T>>]) -> Result<T> {
    Ok(cholesky_factor(a)?
        .iter()
        .enumerate()
        .map(|(i, row)| row[i].re.ln())
        .sum::<T>()
        * T::lit(2.0))
}

/// Lower-triangular `L` with `A = L L^H`, stored by rows.
fn cholesky_factor<T: Real>(a: &[Vec<C<T>>]) -> Result<Vec<Vec<C<T>>>> {
    let n = a.len();
    let zero = C::new(T::zero(), T::zero());
    let mut l: Vec<Vec<C<T>>> = (0..n).map(|i| vec![zero; i + 1]).collect();
    for j in 0..n {
        let d = a[j][j].re - l[j][..j].iter().map(|x| x.norm_sqr()).sum::<T>();
        if !(d > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: d.as_f64(),
            });
        }
        let d = d.sqrt();
        l[j][j] = C::new(d, T::zero());
        let (done, rest) = l.split_at_mut(j + 1);
        let pivot_row = &done[j];
        let update = |(offset, row): (usize, &mut Vec<C<T>>)| {
            let i = j + 1 + offset;
            let dot = row[..j]
                .iter()
                .zip(&pivot_row[..j])
                .fold(zero, |acc, (x, y)| acc + *x * y.conj());
            row[j] = (a[i][j] - dot) / d;
        };
        if n - j > 64 {
            rest.par_iter_mut().enumerate().for_each(update);
        } else {
            rest.iter_mut().enumerate().for_each(update);
        }
    }
    Ok(l)
}

/// `(1/n) log det(I_n + P Sigma_n)`.
pub fn log_det_rate<T: Real>(gram: &ToeplitzGram<T>, p: T, method: LogDetMethod) -> Result<T> {
    if !(p >= T::zero() && p.is_finite()) {
        return Err(invalid(format!(
            "peak power must be finite and nonnegative, got {p}"
        )));
    }
    let n = T::from_usize_lossy(gram.n());
    let total = match method {
        LogDetMethod::Levinson => levinson(&gram.shifted_row(p))?
            .into_iter()
            .map(|s| s.ln())
            .sum(),
        LogDetMethod::Cholesky => {
            let mut m = gram.dense();
            for (i, row) in m.iter_mut().enumerate() {
                for x in row.iter_mut() {
                    *x *= p;
                }
                row[i] += T::one();
            }
            cholesky_log_det(&m)?
        }
    };
    Ok(total / n)
}

/// Prediction errors of `Z = sqrt(P) H + W` and the log-determinant rates.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTrace<T> {
    /// `sigma2[k]`: error predicting `Z_0` from `Z_{-1}, ..., Z_{-k}`,
    /// `k = 0..=n`.
    pub sigma2: Vec<T>,
    /// `log_det_rates[k] = log D_{k+1} / (k + 1)`.
    pub log_det_rates: Vec<T>,
}

impl<T: Real> PredictionTrace<T> {
    pub fn terminal_sigma2(&self) -> T {
        *self.sigma2.last().expect("trace is non-empty")
    }

    pub fn terminal_rate(&self) -> T {
        *self.log_det_rates.last().expect("trace is non-empty")
    }
}

pub fn prediction_trace<T: Real>(
    model: &SpectralModel<T>,
    p: T,
    n: usize,
) -> Result<PredictionTrace<T>> {
    if !(p >= T::zero() && p.is_finite()) {
        return Err(invalid(format!(
            "peak power must be finite and nonnegative, got {p}"
        )));
    }
    let gram = build_gram(model, n + 1)?;
    let sigma2 = levinson(&gram.shifted_row(p))?;
    let mut acc = T::zero();
    let log_det_rates = sigma2
        .iter()
        .enumerate()
        .map(|(k, s)| {
            acc += s.ln();
            acc / T::from_usize_lossy(k + 1)
        })
        .collect();
    Ok(PredictionTrace {
        sigma2,
        log_det_rates,
    })
}

/// Finite set of ON times, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Sorts `indices`; duplicates are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("support set has duplicate indices"));
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `{0, 1, ..., n-1}`.
    pub fn contiguous(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    /// Members are the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        Self {
            indices: (0..64).filter(|b| mask >> b & 1 == 1).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn shifted(&self, k: usize) -> Self {
        Self {
            indices: self.indices.iter().map(|i| i + k).collect(),
        }
    }

    /// Smallest window `{0..w-1}` containing the set.
    pub fn span(&self) -> usize {
        self.indices.last().map_or(0, |m| m + 1)
    }
}

/// `alpha(A) = log det(I + P Sigma_A)` for one Gram matrix and peak.
#[derive(Debug, Clone)]
pub struct AlphaFunctional<T> {
    gram: ToeplitzGram<T>,
    p: T,
}

impl<T: Real> AlphaFunctional<T> {
    /// Sets inside `{0..window-1}` can be evaluated.
    pub fn new(model: &SpectralModel<T>, p: T, window: usize) -> Result<Self> {
        if !(p >= T::zero() && p.is_finite()) {
            return Err(invalid(format!(
                "peak power must be finite and nonnegative, got {p}"
            )));
        }
        Ok(Self {
            gram: build_gram(model, window.max(1))?,
            p,
        })
    }

    pub fn window(&self) -> usize {
        self.gram.n()
    }

    pub fn peak(&self) -> T {
        self.p
    }

    pub fn value(&self, set: &[usize]) -> Result<T> {
        let mut chol = IncrementalCholesky::default();
        for &e in set {
            if e >= self.window() {
                return Err(invalid(format!(
                    "index {e} outside the Gram window of size {}",
                    self.window()
                )));
            }
            chol.push(e, self)?;
        }
        Ok(chol.log_det())
    }

    /// `alpha` of the set with bitmask `mask`.
    pub fn value_mask(&self, mask: u64) -> Result<T> {
        self.value(SupportSet::from_mask(mask).indices())
    }

    fn m(&self, i: usize, j: usize) -> C<T> {
        let x = self.gram.entry(i, j) * self.p;
        if i == j {
            x + T::one()
        } else {
            x
        }
    }
}

/// Cholesky factor of `I + P Sigma_A` grown one member at a time.
struct IncrementalCholesky<T> {
    members: Vec<usize>,
    rows: Vec<Vec<C<T>>>,
    log_det: Vec<T>,
}

impl<T> Default for IncrementalCholesky<T> {
    fn default() -> Self {
        Self {
            members: Vec::new(),
            rows: Vec::new(),
            log_det: Vec::new(),
        }
    }
}

impl<T: Real> IncrementalCholesky<T> {
    fn log_det(&self) -> T {
        self.log_det.last().copied().unwrap_or_else(T::zero)
    }

    fn push(&mut self, e: usize, alpha: &AlphaFunctional<T>) -> Result<T> {
        let zero = C::new(T::zero(), T::zero());
        let k = self.members.len();
        let mut row = vec![zero; k + 1];
        for j in 0..k {
            let dot = row[..j]
                .iter()
                .zip(&self.rows[j][..j])
                .fold(zero, |acc, (x, y)| acc + *x * y.conj());
            row[j] = (alpha.m(e, self.members[j]) - dot) / self.rows[j][j].re;
        }
        let d = alpha.m(e, e).re - row[..k].iter().map(|x| x.norm_sqr()).sum::<T>();
        if !(d > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                index: k,
                pivot: d.as_f64(),
            });
        }
        row[k] = C::new(d.sqrt(), T::zero());
        self.members.push(e);
        self.rows.push(row);
        let total = self.log_det() + d.ln();
        self.log_det.push(total);
        Ok(total)
    }

    fn pop(&mut self) {
        self.members.pop();
        self.rows.pop();
        self.log_det.pop();
    }
}

pub fn alpha<T: Real>(set: &SupportSet, model: &SpectralModel<T>, p: T) -> Result<T> {
    if set.is_empty() {
        return Ok(T::zero());
    }
    AlphaFunctional::new(model, p, set.span())?.value(set.indices())
}

/// Divergence `P |A| - alpha(A)` of ON-OFF signaling on `A`.
pub fn onoff_divergence<T: Real>(set: &SupportSet, model: &SpectralModel<T>, p: T) -> Result<T> {
    Ok(p * T::from_usize_lossy(set.len()) - alpha(set, model, p)?)
}

/// Minimizer of `alpha(A) / |A|` over nonempty `A` in `{0..n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetMinimum<T> {
    pub value: T,
    /// Lexicographically smallest minimizer (up to a relative tie
    /// tolerance of `1e-12`).
    pub set: SupportSet,
    pub evaluated: usize,
    pub pruned: usize,
}

/// `b` improves on `best` by more than the tie tolerance.
fn improves<T: Real>(b: T, best: T) -> bool {
    b < best - T::lit(1e-12) * best.abs().max(T::one())
}

/// Exhaustive minimization of `alpha(A) / |A|` over all `2^n - 1` nonempty
/// subsets of `{0..n-1}`.
///
/// Subsets are visited depth first in lexicographic order, extending a
/// Cholesky factor by one row per added element. For `n > 15`, subtrees are
/// pruned with the monotonicity bound `alpha(B) / |B| >= alpha(A) / (|A| + r)`
/// for every extension `B` of `A` by at most `r` further elements. The
/// search is split across threads by smallest element.
pub fn subset_search<T: Real>(
    model: &SpectralModel<T>,
    p: T,
    n: usize,
) -> Result<SubsetMinimum<T>> {
    if n == 0 || n > SUBSET_CAP {
        return Err(invalid(format!(
            "subset search needs 1 <= n <= {SUBSET_CAP}, got {n}"
        )));
    }
    let alpha = AlphaFunctional::new(model, p, n)?;
    let prune = n > 15;
    let parts: Vec<Result<SubsetMinimum<T>>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut search = Search {
                alpha: &alpha,
                n,
                prune,
                chol: IncrementalCholesky::default(),
                best: None,
                evaluated: 0,
                pruned: 0,
            };
            search.visit(first)?;
            let (value, set) = search.best.expect("every partition has a subset");
            Ok(SubsetMinimum {
                value,
                set: SupportSet { indices: set },
                evaluated: search.evaluated,
                pruned: search.pruned,
            })
        })
        .collect();
    let mut result: Option<SubsetMinimum<T>> = None;
    let (mut evaluated, mut pruned) = (0, 0);
    for part in parts {
        let part = part?;
        evaluated += part.evaluated;
        pruned += part.pruned;
        match &result {
            Some(best) if !improves(part.value, best.value) => {}
            _ => result = Some(part),
        }
    }
    let mut result = result.expect("n >= 1");
    result.evaluated = evaluated;
    result.pruned = pruned;
    Ok(result)
}

struct Search<'a, T> {
    alpha: &'a AlphaFunctional<T>,
    n: usize,
    prune: bool,
    chol: IncrementalCholesky<T>,
    best: Option<(T, Vec<usize>)>,
    evaluated: usize,
    pruned: usize,
}

impl<T: Real> Search<'_, T> {
    fn visit(&mut self, e: usize) -> Result<()> {
        let value = self.chol.push(e, self.alpha)?;
        self.evaluated += 1;
        let size = T::from_usize_lossy(self.chol.members.len());
        let ratio = value / size;
        match &self.best {
            Some((best, _)) if !improves(ratio, *best) => {}
            _ => self.best = Some((ratio, self.chol.members.clone())),
        }
        let remaining = self.n - e - 1;
        let best = self.best.as_ref().map(|b| b.0).expect("just set");
        let bound = value / (size + T::from_usize_lossy(remaining));
        if self.prune && remaining > 0 && !improves(bound, best) {
            self.pruned += 1;
        } else {
            for next in e + 1..self.n {
                self.visit(next)?;
            }
        }
        self.chol.pop();
        Ok(())
    }
}

/// One line of an [`AlphaReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub max_violation: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub n: usize,
    pub checks: Vec<PropertyCheck>,
}

impl AlphaReport {
    pub fn max_violation(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_violation)
            .fold(0.0, f64::max)
    }
}

/// Exhaustively checks the structural properties of `alpha` on subsets of
/// `{0..n-1}`:
///
/// * `alpha(empty) = 0`;
/// * monotonicity, `C <= D => alpha(C) <= alpha(D)`;
/// * the two-alternating inequality
///   `alpha(A | B) + alpha(A & B) <= alpha(A) + alpha(B)`;
/// * shift invariance `alpha(B) = alpha(B + k)`, `0 < k <= n`;
/// * for disjoint nonempty `A`, `B`, the three ratio comparisons
///   `alpha(A|B)/|A|B| <= alpha(A)/|A|`, `alpha(B given A)/|B| <= alpha(A|B)/|A|B|`
///   and `alpha(B given A)/|B| <= alpha(A)/|A|` hold or fail together
///   (cases within `1e-9` of equality are skipped);
/// * for `n <= 8`, betterness under translation: if `A` beats all its
///   nonempty proper subsets and `B` beats `A`, then `(A + k) | B` beats `A`.
///
/// Violations are reported as nonnegative amounts by which an inequality
/// fails (or 1 for an inconsistent equivalence).
pub fn verify_alpha_properties<T: Real>(
    model: &SpectralModel<T>,
    p: T,
    n: usize,
) -> Result<AlphaReport> {
    if n == 0 || n > ALPHA_VERIFY_CAP {
        return Err(invalid(format!(
            "alpha verification needs 1 <= n <= {ALPHA_VERIFY_CAP}, got {n}"
        )));
    }
    let window = 2 * n;
    let functional = AlphaFunctional::new(model, p, window)?;
    let table = alpha_table(&functional)?;
    let a = |mask: u64| table[mask as usize].as_f64();
    let full = (1u64 << n) - 1;
    let size = |m: u64| m.count_ones() as f64;

    let empty = PropertyCheck {
        name: "alpha_empty",
        max_violation: a(0).abs(),
        cases: 1,
    };

    let mut mono = PropertyCheck {
        name: "monotonicity",
        max_violation: 0.0,
        cases: 0,
    };
    for d in 0..=full {
        // all submasks c of d
        let mut c = d;
        loop {
            mono.max_violation = mono.max_violation.max(a(c) - a(d));
            mono.cases += 1;
            if c == 0 {
                break;
            }
            c = (c - 1) & d;
        }
    }

    let mut two_alt = PropertyCheck {
        name: "two_alternating",
        max_violation: 0.0,
        cases: 0,
    };
    for x in 0..=full {
        for y in x..=full {
            let v = a(x | y) + a(x & y) - a(x) - a(y);
            two_alt.max_violation = two_alt.max_violation.max(v);
            two_alt.cases += 1;
        }
    }

    let mut shift = PropertyCheck {
        name: "shift_invariance",
        max_violation: 0.0,
        cases: 0,
    };
    for b in 0..=full {
        for k in 1..=n {
            shift.max_violation = shift.max_violation.max((a(b) - a(b << k)).abs());
            shift.cases += 1;
        }
    }

    let mut equiv = PropertyCheck {
        name: "ratio_equivalence",
        max_violation: 0.0,
        cases: 0,
    };
    let margin = 1e-9;
    for x in 1..=full {
        let rest = full & !x;
        let mut y = rest;
        while y != 0 {
            let union = a(x | y) / size(x | y);
            let ratio_a = a(x) / size(x);
            let cond = (a(x | y) - a(x)) / size(y);
            let gaps = [union - ratio_a, cond - union, cond - ratio_a];
            if gaps.iter().all(|g| g.abs() > margin) {
                let holds: Vec<bool> = gaps.iter().map(|g| *g <= 0.0).collect();
                if holds.iter().any(|&h| h != holds[0]) {
                    equiv.max_violation = 1.0;
                }
                equiv.cases += 1;
            }
            y = (y - 1) & rest;
        }
    }

    let mut checks = vec![empty, mono, two_alt, shift, equiv];
    if n <= TRANSLATION_CHECK_CAP {
        checks.push(translation_check(&table, n));
    }
    Ok(AlphaReport { n, checks })
}

fn translation_check<T: Real>(table: &[T], n: usize) -> PropertyCheck {
    let a = |mask: u64| table[mask as usize].as_f64();
    let ratio = |mask: u64| a(mask) / mask.count_ones() as f64;
    let full = (1u64 << n) - 1;
    let mut check = PropertyCheck {
        name: "translation_betterness",
        max_violation: 0.0,
        cases: 0,
    };
    let mut cache: HashMap<u64, bool> = HashMap::new();
    let mut beats_subsets = |x: u64| -> bool {
        *cache.entry(x).or_insert_with(|| {
            let r = ratio(x);
            let mut c = (x - 1) & x;
            while c != 0 {
                if ratio(c) < r {
                    return false;
                }
                c = (c - 1) & x;
            }
            true
        })
    };
    for x in 1..=full {
        if !beats_subsets(x) {
            continue;
        }
        let rx = ratio(x);
        for y in 1..=full {
            if ratio(y) > rx {
                continue;
            }
            for k in 0..=n {
                let v = ratio((x << k) | y) - rx;
                check.max_violation = check.max_violation.max(v);
                check.cases += 1;
            }
        }
    }
    check
}

/// `alpha` for every subset of the functional's window, indexed by bitmask.
fn alpha_table<T: Real>(functional: &AlphaFunctional<T>) -> Result<Vec<T>> {
    let w = functional.window();
    let mut table = vec![T::zero(); 1usize << w];
    fn fill<T: Real>(
        e: usize,
        mask: usize,
        w: usize,
        f: &AlphaFunctional<T>,
        chol: &mut IncrementalCholesky<T>,
        table: &mut [T],
    ) -> Result<()> {
        let mask = mask | 1 << e;
        table[mask] = chol.push(e, f)?;
        for next in e + 1..w {
            fill(next, mask, w, f, chol, table)?;
        }
        chol.pop();
        Ok(())
    }
    let mut chol = IncrementalCholesky::default();
    for e in 0..w {
        fill(e, 0, w, functional, &mut chol, &mut table)?;
    }
    Ok(table)
}

/// Divergence between the output laws given input `X` and given zero for
/// the channel with receiver side information, `Y = X H + W` observed along
/// with `H` over `T = len(X)` symbols.
///
/// The pair `(Y, H)` is proper Gaussian with covariance
/// `[[X Sigma X^H + I, X Sigma], [Sigma X^H, Sigma]]` given `X` (with `X`
/// acting as a diagonal matrix) and `diag(I, Sigma)` given zero; the
/// divergence is `tr(S0^-1 SX) - 2T - log det(S0^-1 SX)`, evaluated with
/// dense Cholesky factorizations.
pub fn coherent_divergence<T: Real>(x: &[C<T>], model: &SpectralModel<T>, p: T) -> Result<T> {
    check_peak_feasible(x, p)?;
    let t = x.len();
    if t == 0 {
        return Ok(T::zero());
    }
    let gram = build_gram(model, t)?;
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    let mut sx = vec![vec![zero; 2 * t]; 2 * t];
    let mut s0 = vec![vec![zero; 2 * t]; 2 * t];
    for i in 0..t {
        for j in 0..t {
            let s = gram.entry(i, j);
            sx[i][j] = x[i] * s * x[j].conj();
            sx[i][t + j] = x[i] * s;
            sx[t + i][j] = s * x[j].conj();
            sx[t + i][t + j] = s;
            s0[t + i][t + j] = s;
        }
        sx[i][i] += one;
        s0[i][i] = one;
    }
    let l0 = cholesky_factor(&s0)?;
    // tr(S0^-1 SX) column by column
    let mut trace = T::zero();
    for col in 0..2 * t {
        let b: Vec<C<T>> = sx.iter().map(|row| row[col]).collect();
        let sol = cholesky_solve(&l0, &b);
        trace += sol[col].re;
    }
    let log_det = cholesky_log_det(&sx)? - cholesky_log_det(&s0)?;
    Ok(trace - T::from_usize_lossy(2 * t) - log_det)
}

/// Solves `L L^H y = b`.
fn cholesky_solve<T: Real>(l: &[Vec<C<T>>], b: &[C<T>]) -> Vec<C<T>> {
    let n = b.len();
    let zero = C::new(T::zero(), T::zero());
    let mut z = vec![zero; n];
    for i in 0..n {
        let dot = (0..i).fold(zero, |acc, k| acc + l[i][k] * z[k]);
        z[i] = (b[i] - dot) / l[i][i].re;
    }
    let mut y = vec![zero; n];
    for i in (0..n).rev() {
        let dot = (i + 1..n).fold(zero, |acc, k| acc + l[k][i].conj() * y[k]);
        y[i] = (z[i] - dot) / l[i][i].re;
    }
    y
}

fn check_peak_feasible<T: Real>(x: &[C<T>], p: T) -> Result<()> {
    if !(p >= T::zero() && p.is_finite()) {
        return Err(invalid(format!(
            "peak power must be finite and nonnegative, got {p}"
        )));
    }
    let slack = p * (T::one() + T::lit(1e-12));
    if let Some(v) = x.iter().find(|v| !(v.norm_sqr() <= slack)) {
        return Err(Error::PeakViolation {
            energy: v.norm_sqr().as_f64(),
            peak: p.as_f64(),
        });
    }
    Ok(())
}

/// Fourthegy of an input and, given a peak, its spectral upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fourthegy<T> {
    /// `J_C(X) = sum_i |X_i|^2 sum_j |X_j|^2 |R(i-j)|^2`.
    pub value: T,
    /// `(sum |X_i|^2) P int S^2 dw / 2pi`.
    pub bound: Option<Extended<T>>,
}

pub fn fourthegy<T: Real>(
    x: &[C<T>],
    model: &SpectralModel<T>,
    peak: Option<T>,
) -> Result<Fourthegy<T>> {
    let energy: Vec<T> = x.iter().map(|v| v.norm_sqr()).collect();
    let value = if x.is_empty() {
        T::zero()
    } else {
        let gram = build_gram(model, x.len())?;
        let mut acc = T::zero();
        for i in 0..x.len() {
            for j in 0..x.len() {
                acc += energy[i] * energy[j] * gram.entry(i, j).norm_sqr();
            }
        }
        acc
    };
    let bound = match peak {
        None => None,
        Some(p) => {
            check_peak_feasible(x, p)?;
            let total: T = energy.iter().copied().sum();
            // U_p(1) = (1/2) int S^2
            let squared = upper_bound_up(model, T::one())?.scale(T::lit(2.0));
            Some(squared.scale(total * p))
        }
    };
    Ok(Fourthegy { value, bound })
}

/// `sum_{|k| <= max_lag} |R(k)|^2`, which tends to `int S^2 dw / 2pi`.
pub fn autocorrelation_energy<T: Real>(model: &SpectralModel<T>, max_lag: usize) -> Result<T> {
    let mut acc = T::one() * model.autocorrelation(T::zero())?.norm_sqr();
    for k in 1..=max_lag {
        let kf = T::from_usize_lossy(k);
        acc += model.autocorrelation(kf)?.norm_sqr() + model.autocorrelation(-kf)?.norm_sqr();
    }
    Ok(acc)
}

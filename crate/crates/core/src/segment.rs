//! Change-point estimation for outcome sequences.
//!
//! A cursor k = 2..=n splits the sequence into s1(k) = (s_1..s_{k-1}) and
//! s2(k) = (s_k..s_n). For every observable r the weighted Jensen-Shannon
//! divergence between the left/right empirical outcome distributions gives
//! JSD^r(k); the cursor position maximizing JSD^max(k) = max_r JSD^r(k) is
//! the estimated changing index. JSD^r(k) is stipulated to be 0 whenever one
//! side contains no measurement of observable r.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infodiv::{jsd_kernel, ProbDist, WeightPair};
use crate::scalar::Scalar;
use crate::seqgen::{OutcomeCatalog, OutcomeEntry, OutcomeSequence};

/// Subsequence weights at cursor k: pi_1 = (k-1)/n, pi_2 = (n+1-k)/n.
pub fn cursor_weights<T: Scalar>(k: usize, n: usize) -> Result<WeightPair<T>> {
    if k < 2 || k > n {
        return Err(Error::CursorOutOfRange { k, n });
    }
    let nf = T::from_usize_lossy(n);
    let pi1 = T::from_usize_lossy(k - 1) / nf;
    let pi2 = T::from_usize_lossy(n + 1 - k) / nf;
    WeightPair::new(pi1, pi2)
}

/// Cumulative outcome counts per observable along the sequence.
///
/// For observable r, `C^r[k][j]` counts occurrences of outcome j among
/// positions 1..k-1, for k = 1..=n+1; `N^r[k]` is the row total.
#[derive(Debug, Clone)]
pub struct PrefixCounts {
    n: usize,
    per_observable: Vec<ObservableCounts>,
}

#[derive(Debug, Clone)]
struct ObservableCounts {
    outcomes: usize,
    /// (n+1) rows of `outcomes` columns; row c holds counts after c entries.
    cumulative: Vec<u32>,
    totals: Vec<u32>,
}

impl PrefixCounts {
    pub fn build<T: Scalar>(seq: &OutcomeSequence, catalog: &OutcomeCatalog<T>) -> Result<Self> {
        catalog.validate_sequence(seq)?;
        if seq.len() < 2 {
            return Err(Error::SequenceTooShort(seq.len()));
        }
        let n = seq.len();
        let mut per_observable: Vec<ObservableCounts> = catalog
            .entries()
            .iter()
            .map(|alphabet| {
                let m = alphabet.outcomes.len();
                ObservableCounts {
                    outcomes: m,
                    cumulative: vec![0; (n + 1) * m],
                    totals: vec![0; n + 1],
                }
            })
            .collect();

        for (consumed, entry) in seq.entries.iter().enumerate() {
            for (r, counts) in per_observable.iter_mut().enumerate() {
                let m = counts.outcomes;
                let (prev, next) = counts.cumulative.split_at_mut((consumed + 1) * m);
                let prev_row = &prev[consumed * m..];
                next[..m].copy_from_slice(&prev_row[..m]);
                counts.totals[consumed + 1] = counts.totals[consumed];
                if entry.observable == r {
                    next[entry.outcome] += 1;
                    counts.totals[consumed + 1] += 1;
                }
            }
        }
        Ok(Self { n, per_observable })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Counts of observable r outcomes among positions 1..k-1, with total.
    pub fn left(&self, k: usize, r: usize) -> (&[u32], u32) {
        let counts = &self.per_observable[r];
        let m = counts.outcomes;
        let row = k - 1;
        (
            &counts.cumulative[row * m..(row + 1) * m],
            counts.totals[row],
        )
    }

    /// Counts of observable r outcomes among positions k..n, with total.
    pub fn right(&self, k: usize, r: usize) -> (Vec<u32>, u32) {
        let counts = &self.per_observable[r];
        let m = counts.outcomes;
        let last = &counts.cumulative[self.n * m..(self.n + 1) * m];
        let row = k - 1;
        let left = &counts.cumulative[row * m..(row + 1) * m];
        let diff: Vec<u32> = last.iter().zip(left).map(|(a, b)| a - b).collect();
        let total = counts.totals[self.n] - counts.totals[row];
        (diff, total)
    }

    /// Empirical left/right distributions of observable r at cursor k, or
    /// `None` when either side holds no measurement of r.
    pub fn estimated_distributions<T: Scalar>(
        &self,
        k: usize,
        r: usize,
        catalog: &OutcomeCatalog<T>,
    ) -> Result<Option<(ProbDist<T>, ProbDist<T>)>> {
        if k < 2 || k > self.n {
            return Err(Error::CursorOutOfRange { k, n: self.n });
        }
        let (left_counts, left_total) = self.left(k, r);
        let (right_counts, right_total) = self.right(k, r);
        if left_total == 0 || right_total == 0 {
            return Ok(None);
        }
        let alphabet_id = catalog.entries()[r].alphabet_id();
        let left = ProbDist::new(
            probs_from_counts(left_counts, left_total),
            alphabet_id.clone(),
        )?;
        let right = ProbDist::new(probs_from_counts(&right_counts, right_total), alphabet_id)?;
        Ok(Some((left, right)))
    }
}

fn probs_from_counts<T: Scalar>(counts: &[u32], total: u32) -> Vec<T> {
    let denom = T::from_usize_lossy(total as usize);
    counts
        .iter()
        .map(|&c| T::from_usize_lossy(c as usize) / denom)
        .collect()
}

/// Empirical left/right distributions at cursor k for observable r.
///
/// One-shot convenience over [`PrefixCounts::estimated_distributions`].
pub fn estimated_distributions<T: Scalar>(
    seq: &OutcomeSequence,
    catalog: &OutcomeCatalog<T>,
    k: usize,
    r: usize,
) -> Result<Option<(ProbDist<T>, ProbDist<T>)>> {
    PrefixCounts::build(seq, catalog)?.estimated_distributions(k, r, catalog)
}

/// Per-cursor divergence curves and their maximum.
///
/// Curves are indexed by cursor position: index i corresponds to k = i + 2.
#[derive(Debug, Clone)]
pub struct JsdProfile<T> {
    n: usize,
    labels: Vec<String>,
    per_observable: Vec<Vec<T>>,
    max_curve: Vec<T>,
    argmax_k: usize,
    argmax_value: T,
    argmax_observable: usize,
}

impl<T: Scalar> JsdProfile<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// JSD^r(k) curve for observable r over k = 2..=n.
    pub fn observable_curve(&self, r: usize) -> &[T] {
        &self.per_observable[r]
    }

    pub fn num_observables(&self) -> usize {
        self.per_observable.len()
    }

    /// JSD^max(k) over k = 2..=n.
    pub fn max_curve(&self) -> &[T] {
        &self.max_curve
    }

    /// Smallest cursor k attaining the maximum of JSD^max.
    pub fn argmax_k(&self) -> usize {
        self.argmax_k
    }

    pub fn argmax_value(&self) -> T {
        self.argmax_value
    }

    /// Index of the observable attaining the maximum at `argmax_k`.
    pub fn argmax_observable(&self) -> usize {
        self.argmax_observable
    }

    pub fn argmax_label(&self) -> &str {
        &self.labels[self.argmax_observable]
    }
}

/// First index attaining the maximum of a curve, with the value.
pub fn argmax_curve<T: Scalar>(curve: &[T]) -> (usize, T) {
    let mut best = (0, curve[0]);
    for (i, &v) in curve.iter().enumerate().skip(1) {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Computes JSD^r(k) for every observable and cursor, plus JSD^max.
///
/// A single pass maintains running prefix counts, so the total work is
/// O(n * sum_r m_r); the arithmetic per (k, r) is identical to evaluating
/// [`crate::infodiv::jsd_weighted`] on the counted distributions.
pub fn jsd_profile<T: Scalar>(
    seq: &OutcomeSequence,
    catalog: &OutcomeCatalog<T>,
) -> Result<JsdProfile<T>> {
    catalog.validate_sequence(seq)?;
    profile_entries(&seq.entries, catalog)
}

fn profile_entries<T: Scalar>(
    entries: &[OutcomeEntry],
    catalog: &OutcomeCatalog<T>,
) -> Result<JsdProfile<T>> {
    let n = entries.len();
    if n < 2 {
        return Err(Error::SequenceTooShort(n));
    }
    let d = catalog.len();
    let sizes: Vec<usize> = catalog.entries().iter().map(|a| a.outcomes.len()).collect();

    // Final per-observable outcome totals.
    let mut final_counts: Vec<Vec<u32>> = sizes.iter().map(|&m| vec![0; m]).collect();
    let mut final_totals: Vec<u32> = vec![0; d];
    for entry in entries {
        final_counts[entry.observable][entry.outcome] += 1;
        final_totals[entry.observable] += 1;
    }

    let mut left_counts: Vec<Vec<u32>> = sizes.iter().map(|&m| vec![0; m]).collect();
    let mut left_totals: Vec<u32> = vec![0; d];

    let mut per_observable: Vec<Vec<T>> = (0..d).map(|_| Vec::with_capacity(n - 1)).collect();
    let mut max_curve: Vec<T> = Vec::with_capacity(n - 1);
    let mut max_observable: Vec<usize> = Vec::with_capacity(n - 1);

    let mut left_probs: Vec<T> = Vec::new();
    let mut right_probs: Vec<T> = Vec::new();

    for k in 2..=n {
        // Consume position k-1 so the prefix covers positions 1..k-1.
        let entry = entries[k - 2];
        left_counts[entry.observable][entry.outcome] += 1;
        left_totals[entry.observable] += 1;

        let weights = cursor_weights::<T>(k, n)?;
        let mut best = T::zero();
        let mut best_r = 0;
        for r in 0..d {
            let right_total = final_totals[r] - left_totals[r];
            let value = if left_totals[r] == 0 || right_total == 0 {
                T::zero()
            } else {
                let left_denom = T::from_usize_lossy(left_totals[r] as usize);
                let right_denom = T::from_usize_lossy(right_total as usize);
                left_probs.clear();
                right_probs.clear();
                for j in 0..sizes[r] {
                    left_probs.push(T::from_usize_lossy(left_counts[r][j] as usize) / left_denom);
                    let rc = final_counts[r][j] - left_counts[r][j];
                    right_probs.push(T::from_usize_lossy(rc as usize) / right_denom);
                }
                jsd_kernel(&left_probs, &right_probs, weights)
            };
            per_observable[r].push(value);
            if value > best {
                best = value;
                best_r = r;
            }
        }
        max_curve.push(best);
        max_observable.push(best_r);
    }

    let (argmax_index, argmax_value) = argmax_curve(&max_curve);
    Ok(JsdProfile {
        n,
        labels: catalog.labels().iter().map(|s| s.to_string()).collect(),
        per_observable,
        max_curve,
        argmax_k: argmax_index + 2,
        argmax_value,
        argmax_observable: max_observable[argmax_index],
    })
}

/// Estimated changing index with its profile.
#[derive(Debug, Clone)]
pub struct SegmentationResult<T> {
    /// Smallest cursor attaining the maximum of JSD^max.
    pub estimated_changepoint: usize,
    /// Set when the profile is identically zero and the estimate is the
    /// conventional k = 2 rather than an actual maximum.
    pub no_signal: bool,
    /// Description of the cursor-dependent weights used.
    pub weights_used: String,
    pub profile: JsdProfile<T>,
}

/// Runs the full scan and picks the changing-index estimate.
pub fn estimate_changepoint<T: Scalar>(
    seq: &OutcomeSequence,
    catalog: &OutcomeCatalog<T>,
) -> Result<SegmentationResult<T>> {
    let profile = jsd_profile(seq, catalog)?;
    Ok(SegmentationResult {
        estimated_changepoint: profile.argmax_k(),
        no_signal: profile.argmax_value() == T::zero(),
        weights_used: "pi1(k)=(k-1)/n, pi2(k)=(n+1-k)/n".to_string(),
        profile,
    })
}

/// Recursive binary segmentation for multiple changing indices.
///
/// Finds the best cursor on the current window; if its JSD^max value reaches
/// `threshold` (nats) and both resulting segments have at least `min_segment`
/// entries, the changepoint is accepted and both sides are segmented
/// recursively. Returns the accepted changing indices in ascending order
/// (1-based positions into the full sequence).
pub fn segment_recursive<T: Scalar>(
    seq: &OutcomeSequence,
    catalog: &OutcomeCatalog<T>,
    threshold: T,
    min_segment: usize,
) -> Result<Vec<usize>> {
    if min_segment < 2 {
        return Err(Error::InvalidMinSegment(min_segment));
    }
    if threshold.is_nan() || threshold < T::zero() {
        return Err(Error::InvalidThreshold(
            threshold.to_f64().unwrap_or(f64::NAN),
        ));
    }
    catalog.validate_sequence(seq)?;
    if seq.len() < 2 {
        return Err(Error::SequenceTooShort(seq.len()));
    }
    let mut found = Vec::new();
    recurse(&seq.entries, 1, catalog, threshold, min_segment, &mut found)?;
    found.sort_unstable();
    Ok(found)
}

fn recurse<T: Scalar>(
    entries: &[OutcomeEntry],
    start: usize,
    catalog: &OutcomeCatalog<T>,
    threshold: T,
    min_segment: usize,
    found: &mut Vec<usize>,
) -> Result<()> {
    let len = entries.len();
    // No admissible split leaves both sides >= min_segment below this length.
    if len < 2 * min_segment {
        return Ok(());
    }
    let profile = profile_entries(entries, catalog)?;
    let k = profile.argmax_k();
    let left_len = k - 1;
    let right_len = len - k + 1;
    if profile.argmax_value() >= threshold && left_len >= min_segment && right_len >= min_segment {
        found.push(start + k - 1);
        recurse(
            &entries[..k - 1],
            start,
            catalog,
            threshold,
            min_segment,
            found,
        )?;
        recurse(
            &entries[k - 1..],
            start + k - 1,
            catalog,
            threshold,
            min_segment,
            found,
        )?;
    }
    Ok(())
}

/// Writes the profile as CSV: header `k,<label_1>,...,<label_d>,jsd_max`,
/// one row per cursor, values with 12 significant digits.
pub fn write_profile_csv<T: Scalar, W: Write>(
    profile: &JsdProfile<T>,
    writer: &mut W,
) -> Result<()> {
    write!(writer, "k")?;
    for label in profile.labels() {
        write!(writer, ",{label}")?;
    }
    writeln!(writer, ",jsd_max")?;
    for (i, &max_value) in profile.max_curve().iter().enumerate() {
        write!(writer, "{}", i + 2)?;
        for r in 0..profile.num_observables() {
            write!(writer, ",{:.11e}", profile.observable_curve(r)[i])?;
        }
        writeln!(writer, ",{max_value:.11e}")?;
    }
    Ok(())
}

/// Flat summary of a segmentation run, as emitted in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationSummary {
    pub estimated_changepoint: usize,
    pub argmax_value: f64,
    pub argmax_observable: String,
    pub no_signal: bool,
    pub seed: u64,
    /// Changing indices accepted by recursive segmentation, when it ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub changepoints: Option<Vec<usize>>,
}

impl SegmentationSummary {
    pub fn new<T: Scalar>(result: &SegmentationResult<T>, seed: u64) -> Self {
        Self {
            estimated_changepoint: result.estimated_changepoint,
            argmax_value: result.profile.argmax_value().to_f64().unwrap_or(f64::NAN),
            argmax_observable: result.profile.argmax_label().to_string(),
            no_signal: result.no_signal,
            seed,
            changepoints: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("summary serializes");
        text.push('\n');
        text
    }
}

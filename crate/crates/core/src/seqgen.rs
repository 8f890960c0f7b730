//! Seeded generation of measurement outcome sequences.
//!
//! A sequence is produced by measuring, at each position i, the observable
//! selected by the program against the state active at i in a
//! piecewise-constant schedule. Outcomes are drawn by inverse CDF over the
//! ascending-eigenvalue alphabet, consuming exactly one uniform variate per
//! measurement, so a (program, schedule, seed) triple always reproduces the
//! same sequence.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::infodiv::{AlphabetId, ProbDist};
use crate::qmath::{born_distribution, HermitianObservable, QuantumState};
use crate::scalar::Scalar;

/// Catalog of observables plus the index pattern selecting one per position.
#[derive(Debug, Clone)]
pub struct ObservableProgram<T> {
    catalog: Vec<HermitianObservable<T>>,
    pattern: Vec<usize>,
}

impl<T: Scalar> ObservableProgram<T> {
    pub fn new(catalog: Vec<HermitianObservable<T>>, pattern: Vec<usize>) -> Result<Self> {
        if catalog.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        let dim = catalog[0].dim();
        for obs in &catalog {
            if obs.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: obs.dim(),
                });
            }
        }
        for (i, a) in catalog.iter().enumerate() {
            for b in &catalog[i + 1..] {
                if a.label() == b.label() {
                    return Err(Error::DuplicateLabel(a.label().to_string()));
                }
            }
        }
        if pattern.len() < 2 {
            return Err(Error::SequenceTooShort(pattern.len()));
        }
        for &r in &pattern {
            if r >= catalog.len() {
                return Err(Error::ObservableIndexOutOfRange {
                    index: r,
                    size: catalog.len(),
                });
            }
        }
        Ok(Self { catalog, pattern })
    }

    /// Pattern cycling through the catalog in order (X, Y, Z, X, ...),
    /// truncated mid-cycle when n is not a multiple of the catalog size.
    pub fn cyclic(catalog: Vec<HermitianObservable<T>>, n: usize) -> Result<Self> {
        if catalog.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        let d = catalog.len();
        Self::new(catalog, (0..n).map(|i| i % d).collect())
    }

    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    pub fn catalog(&self) -> &[HermitianObservable<T>] {
        &self.catalog
    }

    pub fn pattern(&self) -> &[usize] {
        &self.pattern
    }

    pub fn dim(&self) -> usize {
        self.catalog[0].dim()
    }

    /// Label/alphabet view of the catalog, as needed for segmentation and I/O.
    pub fn outcome_catalog(&self) -> OutcomeCatalog<T> {
        OutcomeCatalog::from_observables(&self.catalog)
    }

    fn describe(&self) -> String {
        let labels: Vec<&str> = self.catalog.iter().map(|o| o.label()).collect();
        let pattern: Vec<String> = self.pattern.iter().map(|r| r.to_string()).collect();
        format!(
            "program labels=[{}] pattern=[{}]",
            labels.join(","),
            pattern.join(",")
        )
    }
}

/// Piecewise-constant state schedule: an ordered list of (state, length).
#[derive(Debug, Clone)]
pub struct StateSchedule<T> {
    segments: Vec<(QuantumState<T>, usize)>,
}

impl<T: Scalar> StateSchedule<T> {
    pub fn new(segments: Vec<(QuantumState<T>, usize)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptySegment);
        }
        let dim = segments[0].0.dim();
        for (state, len) in &segments {
            if *len == 0 {
                return Err(Error::EmptySegment);
            }
            if state.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: state.dim(),
                });
            }
        }
        Ok(Self { segments })
    }

    /// The single-changepoint schedule: l1 positions of `first`, l2 of `second`.
    pub fn two_segment(
        first: QuantumState<T>,
        l1: usize,
        second: QuantumState<T>,
        l2: usize,
    ) -> Result<Self> {
        Self::new(vec![(first, l1), (second, l2)])
    }

    pub fn segments(&self) -> &[(QuantumState<T>, usize)] {
        &self.segments
    }

    pub fn total_len(&self) -> usize {
        self.segments.iter().map(|(_, len)| len).sum()
    }

    pub fn dim(&self) -> usize {
        self.segments[0].0.dim()
    }

    /// 1-based changing indices: position where each new segment starts.
    pub fn changing_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut pos = 1;
        for (_, len) in &self.segments[..self.segments.len() - 1] {
            pos += len;
            out.push(pos);
        }
        out
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .segments
            .iter()
            .map(|(state, len)| {
                let d = state.dim();
                let entries: Vec<String> = (0..d)
                    .flat_map(|i| {
                        (0..d).map(move |j| {
                            let z = state.rho().get(i, j);
                            format!("{},{}", z.re, z.im)
                        })
                    })
                    .collect();
                format!("{}x[{}]", len, entries.join(";"))
            })
            .collect();
        format!("schedule {}", parts.join(" | "))
    }
}

/// One measured entry: which catalog observable fired and which outcome index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeEntry {
    pub observable: usize,
    pub outcome: usize,
}

/// Symbolic outcome sequence with its generation provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSequence {
    pub entries: Vec<OutcomeEntry>,
    pub seed: u64,
    /// Digest of the generating program/schedule spec.
    pub spec_digest: String,
}

impl OutcomeSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Label and ordered outcome values of one observable, without its matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeAlphabet<T> {
    pub label: String,
    pub outcomes: Vec<T>,
}

impl<T: Scalar> OutcomeAlphabet<T> {
    pub fn alphabet_id(&self) -> AlphabetId {
        let parts: Vec<String> = self.outcomes.iter().map(|v| format!("{v}")).collect();
        AlphabetId::new(format!("({})", parts.join(",")))
    }
}

/// The label/alphabet view of a catalog that segmentation and file I/O need.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeCatalog<T> {
    entries: Vec<OutcomeAlphabet<T>>,
}

impl<T: Scalar> OutcomeCatalog<T> {
    pub fn from_observables(catalog: &[HermitianObservable<T>]) -> Self {
        Self {
            entries: catalog
                .iter()
                .map(|obs| OutcomeAlphabet {
                    label: obs.label().to_string(),
                    outcomes: obs.alphabet(),
                })
                .collect(),
        }
    }

    /// Single pseudo-observable over `m` symbols 0..m, for classical sequences.
    pub fn classical(m: usize) -> Self {
        Self {
            entries: vec![OutcomeAlphabet {
                label: "S".to_string(),
                outcomes: (0..m).map(T::from_usize_lossy).collect(),
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[OutcomeAlphabet<T>] {
        &self.entries
    }

    pub fn labels(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.label.as_str()).collect()
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.label == label)
    }

    /// Validates that every entry of `seq` refers into this catalog.
    pub fn validate_sequence(&self, seq: &OutcomeSequence) -> Result<()> {
        for entry in &seq.entries {
            let alphabet =
                self.entries
                    .get(entry.observable)
                    .ok_or(Error::ObservableIndexOutOfRange {
                        index: entry.observable,
                        size: self.entries.len(),
                    })?;
            if entry.outcome >= alphabet.outcomes.len() {
                return Err(Error::OutcomeIndexOutOfRange {
                    label: alphabet.label.clone(),
                    index: entry.outcome,
                    size: alphabet.outcomes.len(),
                });
            }
        }
        Ok(())
    }
}

/// Inverse-CDF draw over the alphabet order; consumes one uniform variate.
pub(crate) fn sample_index<T: Scalar, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> usize {
    let u = T::from_f64_lossy(rng.gen::<f64>());
    let mut acc = T::zero();
    for (j, &p) in probs.iter().enumerate() {
        acc = acc + p;
        if u < acc {
            return j;
        }
    }
    probs.len() - 1
}

/// Samples one measurement of `obs` on `state`, returning the outcome index.
pub fn sample_outcome<T: Scalar, R: Rng + ?Sized>(
    state: &QuantumState<T>,
    obs: &HermitianObservable<T>,
    rng: &mut R,
) -> Result<usize> {
    let dist = born_distribution(state, obs)?;
    Ok(sample_index(dist.probs(), rng))
}

fn digest(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part.as_bytes());
        hasher.update(b"\n");
    }
    let hex = format!("{:x}", hasher.finalize());
    hex[..16].to_string()
}

/// Generates a sequence by measuring the program against the schedule.
///
/// Entry i is sampled independently from the Born distribution of
/// (state at i, observable r_i); deterministic given the seed.
pub fn generate_quantum_sequence<T: Scalar>(
    program: &ObservableProgram<T>,
    schedule: &StateSchedule<T>,
    seed: u64,
) -> Result<OutcomeSequence> {
    if schedule.total_len() != program.len() {
        return Err(Error::ScheduleLengthMismatch {
            schedule: schedule.total_len(),
            program: program.len(),
        });
    }
    if schedule.dim() != program.dim() {
        return Err(Error::DimensionMismatch {
            left: schedule.dim(),
            right: program.dim(),
        });
    }

    // Born distributions per (segment, catalog observable), computed once.
    let mut dists: Vec<Vec<ProbDist<T>>> = Vec::with_capacity(schedule.segments().len());
    for (state, _) in schedule.segments() {
        let row: Result<Vec<ProbDist<T>>> = program
            .catalog()
            .iter()
            .map(|obs| born_distribution(state, obs))
            .collect();
        dists.push(row?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(program.len());
    let mut position = 0;
    for (segment, (_, len)) in schedule.segments().iter().enumerate() {
        for _ in 0..*len {
            let r = program.pattern()[position];
            let outcome = sample_index(dists[segment][r].probs(), &mut rng);
            entries.push(OutcomeEntry {
                observable: r,
                outcome,
            });
            position += 1;
        }
    }

    let spec_digest = digest(&[&program.describe(), &schedule.describe()]);
    Ok(OutcomeSequence {
        entries,
        seed,
        spec_digest,
    })
}

/// Generates a classical sequence: i.i.d. draws within each
/// (distribution, length) segment, all tagged with observable index 0.
pub fn generate_classical_sequence<T: Scalar>(
    segments: &[(ProbDist<T>, usize)],
    seed: u64,
) -> Result<OutcomeSequence> {
    if segments.is_empty() {
        return Err(Error::EmptySegment);
    }
    for (dist, len) in segments {
        if *len == 0 {
            return Err(Error::EmptySegment);
        }
        if dist.alphabet() != segments[0].0.alphabet() || dist.len() != segments[0].0.len() {
            return Err(Error::AlphabetMismatch {
                left: segments[0].0.alphabet().to_string(),
                right: dist.alphabet().to_string(),
            });
        }
    }
    let total: usize = segments.iter().map(|(_, len)| len).sum();
    if total < 2 {
        return Err(Error::SequenceTooShort(total));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(total);
    for (dist, len) in segments {
        for _ in 0..*len {
            let outcome = sample_index(dist.probs(), &mut rng);
            entries.push(OutcomeEntry {
                observable: 0,
                outcome,
            });
        }
    }

    let described: Vec<String> = segments
        .iter()
        .map(|(dist, len)| {
            let probs: Vec<String> = dist.probs().iter().map(|p| format!("{p}")).collect();
            format!("{}x({})", len, probs.join(","))
        })
        .collect();
    let spec_digest = digest(&[&format!("classical {}", described.join(" | "))]);
    Ok(OutcomeSequence {
        entries,
        seed,
        spec_digest,
    })
}

/// Writes the line-oriented text format:
/// `# seed=...`, `# program=...`, then one `label,outcome_value` per entry.
pub fn write_sequence<T: Scalar, W: Write>(
    seq: &OutcomeSequence,
    catalog: &OutcomeCatalog<T>,
    writer: &mut W,
) -> Result<()> {
    catalog.validate_sequence(seq)?;
    writeln!(writer, "# seed={}", seq.seed)?;
    writeln!(writer, "# program={}", seq.spec_digest)?;
    for entry in &seq.entries {
        let alphabet = &catalog.entries()[entry.observable];
        writeln!(
            writer,
            "{},{}",
            alphabet.label, alphabet.outcomes[entry.outcome]
        )?;
    }
    Ok(())
}

/// Parses the text format back into a sequence; the inverse of
/// [`write_sequence`] bit for bit on files this crate wrote.
pub fn read_sequence<T: Scalar, R: BufRead>(
    reader: R,
    catalog: &OutcomeCatalog<T>,
) -> Result<OutcomeSequence> {
    let mut seed = 0u64;
    let mut spec_digest = String::from("external");
    let mut entries = Vec::new();

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("seed=") {
                seed = value.parse().map_err(|_| Error::MalformedLine {
                    line: line_no,
                    message: format!("invalid seed {value:?}"),
                })?;
            } else if let Some(value) = comment.strip_prefix("program=") {
                spec_digest = value.to_string();
            }
            continue;
        }
        let (label, value_str) = trimmed.split_once(',').ok_or(Error::MalformedLine {
            line: line_no,
            message: "expected `label,outcome_value`".to_string(),
        })?;
        let observable =
            catalog
                .index_of_label(label)
                .ok_or_else(|| Error::UnknownObservableLabel {
                    label: label.to_string(),
                    line: line_no,
                })?;
        let value: f64 = value_str.parse().map_err(|_| Error::MalformedLine {
            line: line_no,
            message: format!("invalid outcome value {value_str:?}"),
        })?;
        let alphabet = &catalog.entries()[observable];
        let outcome = alphabet
            .outcomes
            .iter()
            .position(|v| {
                let v = v.to_f64().unwrap_or(f64::NAN);
                v == value || (v - value).abs() <= 1e-9 * v.abs().max(1.0)
            })
            .ok_or_else(|| Error::UnknownOutcomeValue {
                label: label.to_string(),
                value: value_str.to_string(),
                line: line_no,
            })?;
        entries.push(OutcomeEntry {
            observable,
            outcome,
        });
    }

    if entries.len() < 2 {
        return Err(Error::SequenceTooShort(entries.len()));
    }
    Ok(OutcomeSequence {
        entries,
        seed,
        spec_digest,
    })
}

//! Run configuration: either a cataloged scenario name or an inline JSON
//! spec describing states, observables and segment lengths.
//!
//! Config schema (JSON):
//!
//! ```json
//! {
//!   "observables": ["X", "Y", "Z"],
//!   "pattern": "cycle",
//!   "segments": [
//!     { "state": { "amplitudes": [[1.0, 0.0], [0.0, 2.0]] }, "length": 1000 },
//!     { "state": { "density": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]] }, "length": 1000 }
//!   ],
//!   "seed": "auto",
//!   "trials": 1,
//!   "recursive": { "threshold": 0.01, "min_segment": 50 }
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs. Observables are Pauli names or
//! tensor strings like `"X*Y"`. `pattern` is `"cycle"` (default) or an
//! explicit list of observable labels, one per position. `seed` is an
//! integer or `"auto"`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex;
use serde::Deserialize;

use qseg::qmath::{observable_from_spec, pure_to_density, ComplexMatrix, QuantumState};
use qseg::seqgen::{ObservableProgram, StateSchedule};
use qseg::{Observable64, Program64, Schedule64, State64};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub observables: Vec<String>,
    #[serde(default)]
    pub pattern: Option<PatternSpec>,
    pub segments: Vec<SegmentSpec>,
    #[serde(default)]
    pub seed: Option<SeedSpec>,
    #[serde(default)]
    pub trials: Option<u32>,
    #[serde(default)]
    pub recursive: Option<RecursiveSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum PatternSpec {
    Mode(String),
    Labels(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub state: StateSpec,
    pub length: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default)]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub density: Option<Vec<Vec<[f64; 2]>>>,
    /// Normalize amplitude kets before forming the density matrix.
    #[serde(default = "default_normalize")]
    pub normalize: bool,
}

fn default_normalize() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    Value(u64),
    Named(SeedName),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedName {
    Auto,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecursiveSpec {
    pub threshold: f64,
    pub min_segment: usize,
}

/// A validated program + schedule ready to run.
pub struct InlineSpec {
    pub program: Program64,
    pub schedule: Schedule64,
    pub seed: Option<SeedSpec>,
    pub trials: Option<u32>,
    pub recursive: Option<RecursiveSpec>,
}

impl StateSpec {
    fn build(&self, index: usize) -> Result<State64> {
        match (&self.amplitudes, &self.density) {
            (Some(amps), None) => {
                let ket: Vec<Complex<f64>> =
                    amps.iter().map(|&[re, im]| Complex::new(re, im)).collect();
                let built = pure_to_density(&ket, self.normalize)
                    .with_context(|| format!("segment {index}: invalid amplitudes"))?;
                if built.norm_warning {
                    eprintln!(
                        "warning: segment {index} amplitudes had norm {:.6}; normalized",
                        built.input_norm
                    );
                }
                Ok(built.state)
            }
            (None, Some(rows)) => {
                let matrix_rows: Vec<Vec<Complex<f64>>> = rows
                    .iter()
                    .map(|row| row.iter().map(|&[re, im]| Complex::new(re, im)).collect())
                    .collect();
                let matrix = ComplexMatrix::from_rows(&matrix_rows)
                    .with_context(|| format!("segment {index}: invalid density matrix"))?;
                QuantumState::from_density_matrix(matrix)
                    .with_context(|| format!("segment {index}: invalid density matrix"))
            }
            _ => bail!("segment {index}: state needs exactly one of `amplitudes` or `density`"),
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: FileConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        Ok(config)
    }

    /// Validates the whole spec and builds the program and schedule.
    pub fn resolve(&self) -> Result<InlineSpec> {
        if self.observables.is_empty() {
            bail!("config needs at least one observable");
        }
        let catalog: Vec<Observable64> = self
            .observables
            .iter()
            .map(|spec| {
                observable_from_spec::<f64>(spec)
                    .with_context(|| format!("invalid observable spec {spec:?}"))
            })
            .collect::<Result<_>>()?;

        if self.segments.is_empty() {
            bail!("config needs at least one segment");
        }
        let states: Vec<State64> = self
            .segments
            .iter()
            .enumerate()
            .map(|(index, seg)| seg.state.build(index))
            .collect::<Result<_>>()?;
        let schedule = StateSchedule::new(
            states
                .into_iter()
                .zip(self.segments.iter().map(|s| s.length))
                .collect(),
        )?;
        let n = schedule.total_len();

        let program = match &self.pattern {
            None => ObservableProgram::cyclic(catalog, n)?,
            Some(PatternSpec::Mode(mode)) if mode == "cycle" => {
                ObservableProgram::cyclic(catalog, n)?
            }
            Some(PatternSpec::Mode(mode)) => {
                bail!("unknown pattern mode {mode:?}; use \"cycle\" or a label list")
            }
            Some(PatternSpec::Labels(labels)) => {
                if labels.len() != n {
                    bail!(
                        "explicit pattern has {} labels but segments sum to {n}",
                        labels.len()
                    );
                }
                let index_of = |label: &str| {
                    catalog.iter().position(|obs| {
                        obs.label() == label || obs.label().replace('⊗', "*") == label
                    })
                };
                let pattern: Vec<usize> = labels
                    .iter()
                    .map(|label| {
                        index_of(label)
                            .with_context(|| format!("pattern label {label:?} not in observables"))
                    })
                    .collect::<Result<_>>()?;
                ObservableProgram::new(catalog, pattern)?
            }
        };

        Ok(InlineSpec {
            program,
            schedule,
            seed: self.seed,
            trials: self.trials,
            recursive: self.recursive,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_a_minimal_config() {
        let config: FileConfig = serde_json::from_str(
            r#"{
                "observables": ["X", "Y", "Z"],
                "segments": [
                    {"state": {"amplitudes": [[1.0, 0.0], [0.0, 2.0]]}, "length": 10},
                    {"state": {"density": [[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]}, "length": 10}
                ],
                "seed": 7
            }"#,
        )
        .unwrap();
        let spec = config.resolve().unwrap();
        assert_eq!(spec.program.len(), 20);
        assert_eq!(spec.schedule.segments().len(), 2);
        assert!(matches!(spec.seed, Some(SeedSpec::Value(7))));
    }

    #[test]
    fn parses_auto_seed_and_tensor_observables() {
        let config: FileConfig = serde_json::from_str(
            r#"{
                "observables": ["X*X", "Z*Z"],
                "segments": [
                    {"state": {"amplitudes": [[1,0],[0,0],[0,0],[0,0]]}, "length": 4},
                    {"state": {"amplitudes": [[1,0],[0,0],[0,0],[1,0]]}, "length": 4}
                ],
                "seed": "auto"
            }"#,
        )
        .unwrap();
        let spec = config.resolve().unwrap();
        assert!(matches!(spec.seed, Some(SeedSpec::Named(SeedName::Auto))));
        assert_eq!(spec.program.catalog()[0].label(), "X⊗X");
    }

    #[test]
    fn rejects_state_with_both_forms() {
        let config: FileConfig = serde_json::from_str(
            r#"{
                "observables": ["Z"],
                "segments": [
                    {"state": {"amplitudes": [[1,0],[0,0]], "density": [[[1,0],[0,0]],[[0,0],[0,0]]]}, "length": 4}
                ]
            }"#,
        )
        .unwrap();
        assert!(config.resolve().is_err());
    }

    #[test]
    fn rejects_wrong_length_pattern() {
        let config: FileConfig = serde_json::from_str(
            r#"{
                "observables": ["X", "Z"],
                "pattern": ["X", "Z", "X"],
                "segments": [{"state": {"amplitudes": [[1,0],[0,0]]}, "length": 4}]
            }"#,
        )
        .unwrap();
        assert!(config.resolve().is_err());
    }

    #[test]
    fn explicit_pattern_accepts_star_labels() {
        let config: FileConfig = serde_json::from_str(
            r#"{
                "observables": ["X*X", "Z*Z"],
                "pattern": ["X*X", "Z*Z", "X*X", "Z*Z"],
                "segments": [
                    {"state": {"amplitudes": [[1,0],[0,0],[0,0],[0,0]]}, "length": 2},
                    {"state": {"amplitudes": [[1,0],[0,0],[0,0],[1,0]]}, "length": 2}
                ]
            }"#,
        )
        .unwrap();
        let spec = config.resolve().unwrap();
        assert_eq!(spec.program.pattern(), &[0, 1, 0, 1]);
    }
}

//! Catalog of the one- and two-qubit changepoint experiments.
//!
//! Every scenario runs n = 2000 measurements with the state switching after
//! l1 = 1000, so the true changing index is 1001. Which observables can
//! actually distinguish the two states is derived from their Born
//! distributions at build time, never transcribed.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::infodiv::ProbDist;
use crate::qmath::{
    born_distribution, pauli, pure_to_density, tensor, HermitianObservable, Pauli, QuantumState,
};
use crate::scalar::Scalar;
use crate::seqgen::{ObservableProgram, StateSchedule};

/// Sequence length of every cataloged scenario.
pub const SCENARIO_LENGTH: usize = 2000;
/// First-segment length; the changing index is `SCENARIO_FIRST_SEGMENT + 1`.
pub const SCENARIO_FIRST_SEGMENT: usize = 1000;
/// L1 distance above which two Born distributions count as distinct.
pub const DISTINGUISH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StatePairKind {
    /// Normalized (1, 2i) and (1, 8i) kets.
    Pure,
    /// |0><0| and I/2.
    Mixed,
    /// |00> and the Bell state (|00> + |11>)/sqrt(2).
    TwoQubit,
}

struct ScenarioDef {
    name: &'static str,
    figure: &'static str,
    observables: &'static [&'static str],
    states: StatePairKind,
}

const SCENARIO_DEFS: &[ScenarioDef] = &[
    ScenarioDef {
        name: "q1_xyz_pure",
        figure: "Fig. 1",
        observables: &["X", "Y", "Z"],
        states: StatePairKind::Pure,
    },
    ScenarioDef {
        name: "q1_x_pure",
        figure: "Fig. 2",
        observables: &["X"],
        states: StatePairKind::Pure,
    },
    ScenarioDef {
        name: "q1_y_pure",
        figure: "Fig. 2",
        observables: &["Y"],
        states: StatePairKind::Pure,
    },
    ScenarioDef {
        name: "q1_z_pure",
        figure: "Fig. 2",
        observables: &["Z"],
        states: StatePairKind::Pure,
    },
    ScenarioDef {
        name: "q1_xy_pure",
        figure: "Fig. 2",
        observables: &["X", "Y"],
        states: StatePairKind::Pure,
    },
    ScenarioDef {
        name: "q1_xz_pure",
        figure: "Fig. 2",
        observables: &["X", "Z"],
        states: StatePairKind::Pure,
    },
    ScenarioDef {
        name: "q1_yz_pure",
        figure: "Fig. 2",
        observables: &["Y", "Z"],
        states: StatePairKind::Pure,
    },
    ScenarioDef {
        name: "q1_xyz_mixed",
        figure: "Fig. 3",
        observables: &["X", "Y", "Z"],
        states: StatePairKind::Mixed,
    },
    ScenarioDef {
        name: "q1_x_mixed",
        figure: "Fig. 4",
        observables: &["X"],
        states: StatePairKind::Mixed,
    },
    ScenarioDef {
        name: "q1_y_mixed",
        figure: "Fig. 4",
        observables: &["Y"],
        states: StatePairKind::Mixed,
    },
    ScenarioDef {
        name: "q1_z_mixed",
        figure: "Fig. 4",
        observables: &["Z"],
        states: StatePairKind::Mixed,
    },
    ScenarioDef {
        name: "q1_xy_mixed",
        figure: "Fig. 4",
        observables: &["X", "Y"],
        states: StatePairKind::Mixed,
    },
    ScenarioDef {
        name: "q1_xz_mixed",
        figure: "Fig. 4",
        observables: &["X", "Z"],
        states: StatePairKind::Mixed,
    },
    ScenarioDef {
        name: "q1_yz_mixed",
        figure: "Fig. 4",
        observables: &["Y", "Z"],
        states: StatePairKind::Mixed,
    },
    ScenarioDef {
        name: "q2_xxyyzz",
        figure: "Fig. 5",
        observables: &["X*X", "Y*Y", "Z*Z"],
        states: StatePairKind::TwoQubit,
    },
    ScenarioDef {
        name: "q2_xx",
        figure: "Fig. 6",
        observables: &["X*X"],
        states: StatePairKind::TwoQubit,
    },
    ScenarioDef {
        name: "q2_xy",
        figure: "Fig. 6",
        observables: &["X*Y"],
        states: StatePairKind::TwoQubit,
    },
    ScenarioDef {
        name: "q2_xz",
        figure: "Fig. 6",
        observables: &["X*Z"],
        states: StatePairKind::TwoQubit,
    },
    ScenarioDef {
        name: "q2_yy",
        figure: "Fig. 6",
        observables: &["Y*Y"],
        states: StatePairKind::TwoQubit,
    },
    ScenarioDef {
        name: "q2_yz",
        figure: "Fig. 6",
        observables: &["Y*Z"],
        states: StatePairKind::TwoQubit,
    },
    ScenarioDef {
        name: "q2_zz",
        figure: "Fig. 6",
        observables: &["Z*Z"],
        states: StatePairKind::TwoQubit,
    },
];

/// Stable identifier of a cataloged scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScenarioName {
    index: usize,
}

impl ScenarioName {
    /// All scenarios in catalog order (figure order).
    pub fn all() -> Vec<ScenarioName> {
        (0..SCENARIO_DEFS.len())
            .map(|index| ScenarioName { index })
            .collect()
    }

    pub fn as_str(&self) -> &'static str {
        SCENARIO_DEFS[self.index].name
    }

    /// Documented figure alias, e.g. "Fig. 1".
    pub fn figure(&self) -> &'static str {
        SCENARIO_DEFS[self.index].figure
    }
}

impl std::fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SCENARIO_DEFS
            .iter()
            .position(|def| def.name == s)
            .map(|index| ScenarioName { index })
            .ok_or_else(|| Error::UnknownScenario {
                name: s.to_string(),
                valid: SCENARIO_DEFS
                    .iter()
                    .map(|def| def.name)
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }
}

/// An observable that separates the two schedule states, with both Born
/// distributions attached.
#[derive(Debug, Clone)]
pub struct DistinguishingObservable<T> {
    pub label: String,
    pub first: ProbDist<T>,
    pub second: ProbDist<T>,
}

/// Observable label with its Born distributions under the two states.
pub type BornPair<T> = (String, ProbDist<T>, ProbDist<T>);

/// A fully populated experiment configuration.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub name: ScenarioName,
    pub program: ObservableProgram<T>,
    pub schedule: StateSchedule<T>,
    /// 1-based position where the second segment starts.
    pub true_changepoint: usize,
    /// Exactly the catalog observables whose Born distributions under the
    /// two states differ in L1 by more than [`DISTINGUISH_TOL`].
    pub distinguishing: Vec<DistinguishingObservable<T>>,
}

impl<T: Scalar> Scenario<T> {
    pub fn distinguishing_labels(&self) -> Vec<&str> {
        self.distinguishing
            .iter()
            .map(|d| d.label.as_str())
            .collect()
    }

    /// Born distributions of every catalog observable under both states.
    pub fn born_pairs(&self) -> Result<Vec<BornPair<T>>> {
        let first = &self.schedule.segments()[0].0;
        let second = &self.schedule.segments()[1].0;
        self.program
            .catalog()
            .iter()
            .map(|obs| {
                Ok((
                    obs.label().to_string(),
                    born_distribution(first, obs)?,
                    born_distribution(second, obs)?,
                ))
            })
            .collect()
    }
}

fn ket<T: Scalar>(amplitudes: &[(f64, f64)]) -> Vec<Complex<T>> {
    amplitudes
        .iter()
        .map(|&(re, im)| Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im)))
        .collect()
}

fn state_pair<T: Scalar>(kind: StatePairKind) -> Result<(QuantumState<T>, QuantumState<T>)> {
    match kind {
        StatePairKind::Pure => {
            let psi1 = pure_to_density(&ket(&[(1.0, 0.0), (0.0, 2.0)]), true)?.state;
            let psi2 = pure_to_density(&ket(&[(1.0, 0.0), (0.0, 8.0)]), true)?.state;
            Ok((psi1, psi2))
        }
        StatePairKind::Mixed => {
            let ground = pure_to_density(&ket(&[(1.0, 0.0), (0.0, 0.0)]), false)?.state;
            Ok((ground, QuantumState::maximally_mixed(2)))
        }
        StatePairKind::TwoQubit => {
            let zero_zero = pure_to_density(
                &ket(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]),
                false,
            )?
            .state;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let bell =
                pure_to_density(&ket(&[(s, 0.0), (0.0, 0.0), (0.0, 0.0), (s, 0.0)]), true)?.state;
            Ok((zero_zero, bell))
        }
    }
}

fn parse_observable<T: Scalar>(spec: &str) -> HermitianObservable<T> {
    let mut factors = spec.split('*');
    let first: Pauli = factors
        .next()
        .unwrap()
        .parse()
        .expect("cataloged Pauli name");
    let mut obs = pauli::<T>(first);
    for factor in factors {
        let p: Pauli = factor.parse().expect("cataloged Pauli name");
        obs = tensor(&obs, &pauli::<T>(p));
    }
    obs
}

/// Builds the named scenario: program, schedule, true changing index, and
/// the derived set of distinguishing observables.
pub fn build_scenario<T: Scalar>(name: ScenarioName) -> Result<Scenario<T>> {
    let def = &SCENARIO_DEFS[name.index];
    let catalog: Vec<HermitianObservable<T>> = def
        .observables
        .iter()
        .map(|s| parse_observable(s))
        .collect();
    let program = ObservableProgram::cyclic(catalog, SCENARIO_LENGTH)?;

    let (first, second) = state_pair::<T>(def.states)?;
    let schedule = StateSchedule::two_segment(
        first.clone(),
        SCENARIO_FIRST_SEGMENT,
        second.clone(),
        SCENARIO_LENGTH - SCENARIO_FIRST_SEGMENT,
    )?;

    let tol = T::from_f64_lossy(DISTINGUISH_TOL);
    let mut distinguishing = Vec::new();
    for obs in program.catalog() {
        let dist_first = born_distribution(&first, obs)?;
        let dist_second = born_distribution(&second, obs)?;
        let l1: T = dist_first
            .probs()
            .iter()
            .zip(dist_second.probs())
            .map(|(&a, &b)| (a - b).abs())
            .sum();
        if l1 > tol {
            distinguishing.push(DistinguishingObservable {
                label: obs.label().to_string(),
                first: dist_first,
                second: dist_second,
            });
        }
    }

    Ok(Scenario {
        name,
        program,
        schedule,
        true_changepoint: SCENARIO_FIRST_SEGMENT + 1,
        distinguishing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn build(name: &str) -> Scenario<f64> {
        build_scenario(name.parse().unwrap()).unwrap()
    }

    #[test]
    fn catalog_has_twenty_one_scenarios() {
        assert_eq!(ScenarioName::all().len(), 21);
    }

    #[test]
    fn unknown_name_lists_valid_ones() {
        match "q3_www".parse::<ScenarioName>() {
            Err(Error::UnknownScenario { valid, .. }) => {
                assert!(valid.contains("q1_xyz_pure"));
                assert!(valid.contains("q2_zz"));
            }
            other => panic!("expected UnknownScenario, got {other:?}"),
        }
    }

    #[test]
    fn every_scenario_has_canonical_shape() {
        for name in ScenarioName::all() {
            let scenario: Scenario<f64> = build_scenario(name).unwrap();
            assert_eq!(scenario.schedule.total_len(), 2000);
            assert_eq!(scenario.program.len(), 2000);
            assert_eq!(scenario.true_changepoint, 1001);
            assert_eq!(scenario.schedule.changing_indices(), vec![1001]);
        }
    }

    #[test]
    fn pure_pair_x_is_non_distinguishing() {
        // Both states give (1/2, 1/2) in X, so the X-only scenario has an
        // empty distinguishing set.
        let scenario = build("q1_x_pure");
        assert!(scenario.distinguishing.is_empty());

        let pairs = scenario.born_pairs().unwrap();
        let (_, first, second) = &pairs[0];
        for (&a, &b) in first.probs().iter().zip(second.probs()) {
            assert_abs_diff_eq!(a, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(b, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_pair_y_and_z_distinguish() {
        assert_eq!(build("q1_y_pure").distinguishing_labels(), vec!["Y"]);
        assert_eq!(build("q1_z_pure").distinguishing_labels(), vec!["Z"]);
        assert_eq!(build("q1_xyz_pure").distinguishing_labels(), vec!["Y", "Z"]);
    }

    #[test]
    fn mixed_pair_only_z_distinguishes() {
        // X and Y distributions of |0><0| and I/2 coincide at (1/2, 1/2);
        // only Z separates them.
        assert!(build("q1_x_mixed").distinguishing.is_empty());
        assert!(build("q1_y_mixed").distinguishing.is_empty());
        assert_eq!(build("q1_z_mixed").distinguishing_labels(), vec!["Z"]);
        assert_eq!(build("q1_xyz_mixed").distinguishing_labels(), vec!["Z"]);
    }

    #[test]
    fn two_qubit_distinguishing_set_is_derived() {
        // projector-trace oracle: X⊗X has P(+1) 1/2 vs 1, Y⊗Y has 1/2 vs 0,
        // Z⊗Z is +1 under both states.
        let scenario = build("q2_xxyyzz");
        assert_eq!(scenario.distinguishing_labels(), vec!["X⊗X", "Y⊗Y"]);

        let pairs = scenario.born_pairs().unwrap();
        let (label_xx, xx_first, xx_second) = &pairs[0];
        assert_eq!(label_xx, "X⊗X");
        assert_abs_diff_eq!(xx_first.probs()[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(xx_second.probs()[1], 1.0, epsilon = 1e-12);

        let (label_yy, yy_first, yy_second) = &pairs[1];
        assert_eq!(label_yy, "Y⊗Y");
        assert_abs_diff_eq!(yy_first.probs()[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(yy_second.probs()[1], 0.0, epsilon = 1e-12);

        let (label_zz, zz_first, zz_second) = &pairs[2];
        assert_eq!(label_zz, "Z⊗Z");
        assert_abs_diff_eq!(zz_first.probs()[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(zz_second.probs()[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_two_qubit_scenarios_match_derived_truth() {
        assert_eq!(build("q2_xx").distinguishing_labels(), vec!["X⊗X"]);
        assert_eq!(build("q2_yy").distinguishing_labels(), vec!["Y⊗Y"]);
        // The Fig. 6 caption claims only X⊗Y fails; the derived Born
        // distributions say X⊗Z, Y⊗Z and Z⊗Z cannot distinguish either.
        assert!(build("q2_xy").distinguishing.is_empty());
        assert!(build("q2_xz").distinguishing.is_empty());
        assert!(build("q2_yz").distinguishing.is_empty());
        assert!(build("q2_zz").distinguishing.is_empty());
    }

    #[test]
    fn figure_aliases_are_stable() {
        let names = ScenarioName::all();
        assert_eq!(names[0].as_str(), "q1_xyz_pure");
        assert_eq!(names[0].figure(), "Fig. 1");
        assert_eq!(names[7].as_str(), "q1_xyz_mixed");
        assert_eq!(names[7].figure(), "Fig. 3");
        assert_eq!(names[14].as_str(), "q2_xxyyzz");
        assert_eq!(names[14].figure(), "Fig. 5");
    }
}

//! Model parameters, validation and emission likelihoods.
//!
//! A model is a `J`-state hidden Markov model shared by chains and trees:
//! an initial distribution (root distribution for trees), a row-stochastic
//! transition matrix and, per state, a product of independent per-variable
//! emission distributions.

use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::data::Observations;
use crate::error::{Error, Result};
use crate::numeric::format_g;

/// Tolerance on every probability-vector sum.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Emission distribution of one observed variable in one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum VariableDist {
    Categorical { probs: Vec<f64> },
    Poisson { rate: f64 },
}

/// Family and support size of a variable, used to check that all states
/// share one signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableKind {
    Categorical { alphabet: usize },
    Poisson,
}

impl VariableDist {
    pub fn kind(&self) -> VariableKind {
        match self {
            VariableDist::Categorical { probs } => VariableKind::Categorical {
                alphabet: probs.len(),
            },
            VariableDist::Poisson { .. } => VariableKind::Poisson,
        }
    }

    /// Natural log of the probability mass at `x`. `-inf` for impossible values.
    pub fn log_pmf(&self, x: u32) -> f64 {
        match self {
            VariableDist::Categorical { probs } => match probs.get(x as usize) {
                Some(&p) => p.ln(),
                None => f64::NEG_INFINITY,
            },
            VariableDist::Poisson { rate } => {
                if *rate == 0.0 {
                    if x == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    let x_f = f64::from(x);
                    -rate + x_f * rate.ln() - ln_factorial(u64::from(x))
                }
            }
        }
    }

    pub fn pmf(&self, x: u32) -> f64 {
        match self {
            VariableDist::Categorical { probs } => probs.get(x as usize).copied().unwrap_or(0.0),
            VariableDist::Poisson { .. } => self.log_pmf(x).exp(),
        }
    }
}

/// Unvalidated model parameters, exactly as they appear in a model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParts {
    pub num_states: usize,
    pub initial: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    pub emissions: Vec<Vec<VariableDist>>,
}

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Offending field with index, e.g. `transition[0]`.
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_probability_vector(report: &mut ValidationReport, field: &str, what: &str, probs: &[f64]) {
    for (k, &p) in probs.iter().enumerate() {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            report.push(format!("{field}[{k}]"), format!("entry {} outside [0, 1]", format_g(p, 12)));
        }
    }
    let sum: f64 = probs.iter().sum();
    if sum.is_finite() && (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        report.push(field, format!("{what} sums to {}", format_g(sum, 12)));
    }
}

/// Checks every model invariant and reports all violations.
pub fn validate_model(parts: &ModelParts) -> ValidationReport {
    let mut report = ValidationReport::default();
    let j = parts.num_states;
    if j == 0 {
        report.push("num_states", "must be positive");
    }

    if parts.initial.len() != j {
        report.push(
            "initial",
            format!("has {} entries, expected {j}", parts.initial.len()),
        );
    }
    check_probability_vector(&mut report, "initial", "initial distribution", &parts.initial);

    if parts.transition.len() != j {
        report.push(
            "transition",
            format!("has {} rows, expected {j}", parts.transition.len()),
        );
    }
    for (i, row) in parts.transition.iter().enumerate() {
        let field = format!("transition[{i}]");
        if row.len() != j {
            report.push(&field, format!("row {i} has {} entries, expected {j}", row.len()));
        }
        check_probability_vector(&mut report, &field, &format!("row {i}"), row);
    }

    if parts.emissions.len() != j {
        report.push(
            "emissions",
            format!("has {} states, expected {j}", parts.emissions.len()),
        );
    }
    let reference: Option<Vec<VariableKind>> = parts
        .emissions
        .first()
        .map(|vars| vars.iter().map(VariableDist::kind).collect());
    if let Some(reference) = &reference {
        if reference.is_empty() {
            report.push("emissions[0]", "state has no observed variables");
        }
    }
    for (s, vars) in parts.emissions.iter().enumerate() {
        let signature: Vec<VariableKind> = vars.iter().map(VariableDist::kind).collect();
        if let Some(reference) = &reference {
            if &signature != reference {
                report.push(
                    format!("emissions[{s}]"),
                    "variable signature differs from state 0",
                );
            }
        }
        for (v, dist) in vars.iter().enumerate() {
            let field = format!("emissions[{s}][{v}]");
            match dist {
                VariableDist::Categorical { probs } => {
                    if probs.is_empty() {
                        report.push(&field, "empty categorical alphabet");
                    } else {
                        check_probability_vector(&mut report, &field, "categorical", probs);
                    }
                }
                VariableDist::Poisson { rate } => {
                    if !rate.is_finite() || *rate < 0.0 {
                        report.push(&field, format!("Poisson rate {} must be finite and >= 0", format_g(*rate, 12)));
                    }
                }
            }
        }
    }
    report
}

/// A validated hidden Markov model. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    initial: Vec<f64>,
    transition: Vec<Vec<f64>>,
    emissions: Vec<Vec<VariableDist>>,
    signature: Vec<VariableKind>,
}

impl HmmModel {
    pub fn new(
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
        emissions: Vec<Vec<VariableDist>>,
    ) -> Result<Self> {
        Self::from_parts(ModelParts {
            num_states: initial.len(),
            initial,
            transition,
            emissions,
        })
    }

    pub fn from_parts(parts: ModelParts) -> Result<Self> {
        let report = validate_model(&parts);
        if !report.is_ok() {
            return Err(Error::InvalidModel(report));
        }
        let signature = parts.emissions[0].iter().map(VariableDist::kind).collect();
        Ok(Self {
            initial: parts.initial,
            transition: parts.transition,
            emissions: parts.emissions,
            signature,
        })
    }

    /// Single categorical variable per state; `emission[j]` is the alphabet
    /// distribution of state `j`.
    pub fn categorical(
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
        emission: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let emissions = emission
            .into_iter()
            .map(|probs| vec![VariableDist::Categorical { probs }])
            .collect();
        Self::new(initial, transition, emissions)
    }

    pub fn to_parts(&self) -> ModelParts {
        ModelParts {
            num_states: self.num_states(),
            initial: self.initial.clone(),
            transition: self.transition.clone(),
            emissions: self.emissions.clone(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.initial.len()
    }

    pub fn num_variables(&self) -> usize {
        self.signature.len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    /// `p_ij`
    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.transition[i][j]
    }

    pub fn emissions(&self) -> &[Vec<VariableDist>] {
        &self.emissions
    }

    pub fn signature(&self) -> &[VariableKind] {
        &self.signature
    }

    /// Checks an observation vector against the variable signature.
    pub fn check_observation(&self, observation: &[u32]) -> Result<()> {
        if observation.len() != self.signature.len() {
            return Err(Error::SignatureMismatch {
                expected: self.signature.len(),
                found: observation.len(),
            });
        }
        for (variable, (&value, kind)) in observation.iter().zip(&self.signature).enumerate() {
            if let VariableKind::Categorical { alphabet } = *kind {
                if value as usize >= alphabet {
                    return Err(Error::OutOfAlphabet {
                        variable,
                        value,
                        alphabet,
                    });
                }
            }
        }
        Ok(())
    }

    /// `ln b_j(x)`: sum of per-variable log probabilities.
    pub fn log_emission_prob(&self, state: usize, observation: &[u32]) -> Result<f64> {
        if state >= self.num_states() {
            return Err(Error::InvalidArgument(format!(
                "state {state} out of range for {} states",
                self.num_states()
            )));
        }
        self.check_observation(observation)?;
        Ok(self.log_emission_unchecked(state, observation))
    }

    /// `b_j(x) = Π_v b_j^(v)(x_v)`.
    pub fn emission_prob(&self, state: usize, observation: &[u32]) -> Result<f64> {
        Ok(self.log_emission_prob(state, observation)?.exp())
    }

    fn log_emission_unchecked(&self, state: usize, observation: &[u32]) -> f64 {
        self.emissions[state]
            .iter()
            .zip(observation)
            .map(|(dist, &x)| dist.log_pmf(x))
            .sum()
    }

    /// `ln b_j(x_u)` for every position and state (rows = positions).
    pub fn log_emission_table<O: Observations + ?Sized>(&self, data: &O) -> Result<Array2<f64>> {
        let n = data.num_positions();
        let j = self.num_states();
        let mut table = Array2::zeros((n, j));
        for u in 0..n {
            let x = data.observation(u);
            self.check_observation(x)?;
            for s in 0..j {
                table[[u, s]] = self.log_emission_unchecked(s, x);
            }
        }
        Ok(table)
    }

    /// `b_j(x_u)` for every position and state (rows = positions).
    pub fn emission_table<O: Observations + ?Sized>(&self, data: &O) -> Result<Array2<f64>> {
        Ok(self.log_emission_table(data)?.mapv(f64::exp))
    }
}

//! Entropy-aware model-selection criteria.
//!
//! BIC is on the `2 ln L` scale so that `ICL-BIC = BIC − 2H`.

use crate::error::{Error, Result};
use crate::model::{HmmModel, VariableKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionInput {
    /// `ln f_J(x)` of the model under assessment.
    pub log_likelihood: f64,
    /// `ln f_1(x)` of the one-state baseline; needed by NEC only.
    pub log_likelihood_1: Option<f64>,
    /// `H(S | X=x)` summed over the dataset.
    pub global_entropy: f64,
    pub num_states: usize,
    pub free_params: usize,
    /// Total number of time steps or vertices.
    pub sample_size: usize,
}

impl CriterionInput {
    fn check(&self) -> Result<()> {
        if self.sample_size == 0 {
            return Err(Error::Criterion("sample size must be at least 1".into()));
        }
        if !(self.global_entropy >= 0.0) {
            return Err(Error::Criterion(format!(
                "global entropy {} must be non-negative",
                self.global_entropy
            )));
        }
        Ok(())
    }
}

/// `(J−1) + J(J−1) + J Σ_v dof(v)`; a categorical variable has `alphabet − 1`
/// degrees of freedom and a Poisson variable one.
pub fn free_parameter_count(model: &HmmModel) -> usize {
    let j = model.num_states();
    let per_state: usize = model
        .signature()
        .iter()
        .map(|kind| match kind {
            VariableKind::Categorical { alphabet } => alphabet - 1,
            VariableKind::Poisson => 1,
        })
        .sum();
    (j - 1) + j * (j - 1) + j * per_state
}

/// BIC given `ln n` directly.
pub fn bic_from_parts(log_likelihood: f64, free_params: usize, log_n: f64) -> f64 {
    2.0 * log_likelihood - free_params as f64 * log_n
}

/// ICL-BIC given `ln n` directly.
pub fn icl_bic_from_parts(
    log_likelihood: f64,
    global_entropy: f64,
    free_params: usize,
    log_n: f64,
) -> f64 {
    bic_from_parts(log_likelihood, free_params, log_n) - 2.0 * global_entropy
}

/// `2 ln L − d ln n`, to be maximized.
pub fn bic(input: &CriterionInput) -> Result<f64> {
    input.check()?;
    Ok(bic_from_parts(
        input.log_likelihood,
        input.free_params,
        (input.sample_size as f64).ln(),
    ))
}

/// `2 ln L − 2H − d ln n`, to be maximized.
pub fn icl_bic(input: &CriterionInput) -> Result<f64> {
    input.check()?;
    Ok(icl_bic_from_parts(
        input.log_likelihood,
        input.global_entropy,
        input.free_params,
        (input.sample_size as f64).ln(),
    ))
}

/// `H / (ln L_J − ln L_1)`, to be minimized. Undefined for one state.
pub fn nec(input: &CriterionInput) -> Result<f64> {
    input.check()?;
    if input.num_states < 2 {
        return Err(Error::Criterion("NEC is not supported for a one-state model".into()));
    }
    let baseline = input
        .log_likelihood_1
        .ok_or_else(|| Error::Criterion("NEC needs the one-state log-likelihood".into()))?;
    nec_from_parts(input.global_entropy, input.log_likelihood, baseline)
}

/// NEC from its three ingredients; only the log-likelihood difference matters.
pub fn nec_from_parts(global_entropy: f64, log_likelihood: f64, log_likelihood_1: f64) -> Result<f64> {
    let gain = log_likelihood - log_likelihood_1;
    if !(gain > 0.0) {
        return Err(Error::Criterion(format!(
            "log-likelihood gain over one state is {gain}, NEC needs it positive"
        )));
    }
    Ok(global_entropy / gain)
}

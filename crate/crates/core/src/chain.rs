//! Forward-backward smoothing and Viterbi restoration for hidden Markov chains.

use ndarray::{Array1, Array2};

use crate::data::{ObservedSequence, Observations};
use crate::error::{Error, Result};
use crate::model::HmmModel;
use crate::numeric::ratio_or_zero;

/// Output of the forward recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainForward {
    /// `F_t(j) = P(S_t=j | X_0^t)`, `T x J`.
    pub forward: Array2<f64>,
    /// `G_t(j) = P(S_t=j | X_0^{t-1})`, with `G_0 = π`.
    pub predicted: Array2<f64>,
    /// `N_t = P(X_t=x_t | X_0^{t-1})`.
    pub normalizers: Array1<f64>,
    /// `ln N_t`, kept separately because `N_t` can underflow for Poisson data.
    pub log_normalizers: Array1<f64>,
    pub log_likelihood: f64,
}

/// All smoothing tables of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPosterior {
    pub forward: Array2<f64>,
    pub predicted: Array2<f64>,
    pub normalizers: Array1<f64>,
    pub log_normalizers: Array1<f64>,
    /// `L_t(j) = P(S_t=j | X=x)`.
    pub smoothed: Array2<f64>,
    pub log_likelihood: f64,
}

impl ChainPosterior {
    pub fn len(&self) -> usize {
        self.forward.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.nrows() == 0
    }

    pub fn num_states(&self) -> usize {
        self.forward.ncols()
    }
}

/// A restored state configuration and `ln P(S=s, X=x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Restoration {
    pub states: Vec<usize>,
    pub log_joint: f64,
}

/// Emission probabilities rescaled per row by the row maximum, plus the
/// log of the scale. Keeps multivariate Poisson products away from underflow.
pub(crate) fn scaled_emissions(log_b: &Array2<f64>) -> (Array2<f64>, Array1<f64>) {
    let mut scaled = Array2::zeros(log_b.raw_dim());
    let mut shift = Array1::zeros(log_b.nrows());
    for (u, row) in log_b.outer_iter().enumerate() {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = if m.is_finite() { m } else { 0.0 };
        shift[u] = m;
        for (j, &lb) in row.iter().enumerate() {
            scaled[[u, j]] = (lb - m).exp();
        }
    }
    (scaled, shift)
}

pub fn forward_pass(model: &HmmModel, seq: &ObservedSequence) -> Result<ChainForward> {
    let log_b = model.log_emission_table(seq)?;
    let (b, shift) = scaled_emissions(&log_b);
    let t_len = seq.num_positions();
    let j_len = model.num_states();
    let mut forward = Array2::zeros((t_len, j_len));
    let mut predicted = Array2::zeros((t_len, j_len));
    let mut log_normalizers = Array1::zeros(t_len);
    for j in 0..j_len {
        predicted[[0, j]] = model.initial()[j];
    }
    let mut log_likelihood = 0.0;
    for t in 0..t_len {
        if t > 0 {
            for k in 0..j_len {
                predicted[[t, k]] = (0..j_len).map(|j| model.p(j, k) * forward[[t - 1, j]]).sum();
            }
        }
        let mut norm = 0.0;
        for j in 0..j_len {
            let joint = b[[t, j]] * predicted[[t, j]];
            forward[[t, j]] = joint;
            norm += joint;
        }
        if !(norm > 0.0) {
            return Err(Error::ImpossibleObservation { position: t });
        }
        for j in 0..j_len {
            forward[[t, j]] /= norm;
        }
        log_normalizers[t] = norm.ln() + shift[t];
        log_likelihood += log_normalizers[t];
    }
    Ok(ChainForward {
        forward,
        predicted,
        normalizers: log_normalizers.mapv(f64::exp),
        log_normalizers,
        log_likelihood,
    })
}

pub fn backward_smooth(model: &HmmModel, fwd: ChainForward) -> ChainPosterior {
    let (t_len, j_len) = fwd.forward.dim();
    let mut smoothed = Array2::zeros((t_len, j_len));
    smoothed.row_mut(t_len - 1).assign(&fwd.forward.row(t_len - 1));
    let mut weight = vec![0.0; j_len];
    for t in (0..t_len - 1).rev() {
        for k in 0..j_len {
            weight[k] = ratio_or_zero(smoothed[[t + 1, k]], fwd.predicted[[t + 1, k]]);
        }
        for j in 0..j_len {
            let s: f64 = (0..j_len).map(|k| weight[k] * model.p(j, k)).sum();
            smoothed[[t, j]] = fwd.forward[[t, j]] * s;
        }
    }
    ChainPosterior {
        forward: fwd.forward,
        predicted: fwd.predicted,
        normalizers: fwd.normalizers,
        log_normalizers: fwd.log_normalizers,
        smoothed,
        log_likelihood: fwd.log_likelihood,
    }
}

/// Forward pass followed by backward smoothing.
pub fn smooth(model: &HmmModel, seq: &ObservedSequence) -> Result<ChainPosterior> {
    Ok(backward_smooth(model, forward_pass(model, seq)?))
}

#[inline]
fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Index and value of the maximum, first index on ties.
#[inline]
pub(crate) fn argmax<I: IntoIterator<Item = f64>>(values: I) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Most probable state sequence; ties go to the smaller state index.
pub fn viterbi_chain(model: &HmmModel, seq: &ObservedSequence) -> Result<Restoration> {
    let log_b = model.log_emission_table(seq)?;
    let (t_len, j_len) = log_b.dim();
    let log_p: Vec<Vec<f64>> = model
        .transition()
        .iter()
        .map(|row| row.iter().map(|&p| ln(p)).collect())
        .collect();
    let mut delta: Vec<f64> = (0..j_len).map(|j| ln(model.initial()[j]) + log_b[[0, j]]).collect();
    let mut back = Array2::<usize>::zeros((t_len, j_len));
    let mut next = vec![0.0; j_len];
    for t in 1..t_len {
        for k in 0..j_len {
            let (arg, best) = argmax((0..j_len).map(|j| delta[j] + log_p[j][k]));
            back[[t, k]] = arg;
            next[k] = best + log_b[[t, k]];
        }
        std::mem::swap(&mut delta, &mut next);
    }
    let (mut s, log_joint) = argmax(delta.iter().copied());
    if log_joint == f64::NEG_INFINITY {
        return Err(Error::AllPathsImpossible);
    }
    let mut states = vec![0; t_len];
    states[t_len - 1] = s;
    for t in (1..t_len).rev() {
        s = back[[t, s]];
        states[t - 1] = s;
    }
    Ok(Restoration { states, log_joint })
}

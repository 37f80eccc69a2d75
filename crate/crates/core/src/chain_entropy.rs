//! Entropy profiles of hidden state sequences.
//!
//! Past-conditioned profiles come from a forward recursion on
//! `H(S_0^{t-1} | S_t=j, X_0^t)` or directly from pairwise posteriors;
//! future-conditioned profiles from the mirror-image backward recursion.

use ndarray::{Array1, Array2};

use crate::chain::ChainPosterior;
use crate::error::{Error, Result};
use crate::numeric::{entropy, ratio_or_zero, xlogx, CompensatedSum};

/// Absolute tolerance used when the two future-direction routes are compared.
pub const ROUTE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Past,
    Future,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainEntropyProfile {
    pub direction: Direction,
    /// `H(S_t | X=x)`.
    pub marginal: Array1<f64>,
    /// Past: `H(S_0|X)`, then `H(S_t | S_{t-1}, X)`.
    /// Future: `H(S_t | S_{t+1}, X)`, then `H(S_{T-1} | X)` in the last slot.
    pub conditional: Array1<f64>,
    /// Past: `H(S_0^t | X)`. Future: `H(S_t^{T-1} | X)`.
    pub partial: Array1<f64>,
    pub global_entropy: f64,
    /// Past: `H(S_0^{t-1} | S_t=j, X_0^t)`. Future: `H(S_{t+1}^{T-1} | S_t=j, X_{t+1}^{T-1})`.
    /// Only the recursive routes fill this in.
    pub hernando: Option<Array2<f64>>,
}

/// `H(S_t | X=x)` for every `t`.
pub fn marginal_entropy_profile(post: &ChainPosterior) -> Array1<f64> {
    post.smoothed
        .outer_iter()
        .map(|row| entropy(row.as_slice().expect("standard layout")))
        .collect()
}

/// `Σ_j w_j (h_j − ln w_j)`.
fn mix(weights: ndarray::ArrayView1<f64>, h: ndarray::ArrayView1<f64>) -> f64 {
    weights
        .iter()
        .zip(h)
        .map(|(&w, &hj)| if w > 0.0 { w * hj - xlogx(w) } else { 0.0 })
        .sum()
}

/// Past-conditioned profile through the forward entropy recursion.
pub fn entropy_past_hernando(model: &crate::HmmModel, post: &ChainPosterior) -> ChainEntropyProfile {
    let (t_len, j_len) = post.smoothed.dim();
    let f = &post.forward;
    let g = &post.predicted;
    let mut h = Array2::<f64>::zeros((t_len, j_len));
    for t in 1..t_len {
        for j in 0..j_len {
            let gj = g[[t, j]];
            if !(gj > 0.0) {
                continue;
            }
            let mut acc = 0.0;
            for i in 0..j_len {
                let q = model.p(i, j) * f[[t - 1, i]] / gj;
                if q > 0.0 {
                    acc += q * (h[[t - 1, i]] - q.ln());
                }
            }
            h[[t, j]] = acc;
        }
    }
    let partial: Array1<f64> = (0..t_len).map(|t| mix(post.smoothed.row(t), h.row(t))).collect();
    let mut conditional = Array1::zeros(t_len);
    conditional[0] = partial[0];
    for t in 1..t_len {
        conditional[t] = partial[t] - partial[t - 1];
    }
    let global_entropy = mix(f.row(t_len - 1), h.row(t_len - 1));
    ChainEntropyProfile {
        direction: Direction::Past,
        marginal: marginal_entropy_profile(post),
        conditional,
        partial,
        global_entropy,
        hernando: Some(h),
    }
}

/// Past-conditioned profile from the pairwise posteriors `P(S_{t-1}=i, S_t=j | X)`.
pub fn entropy_past_direct(model: &crate::HmmModel, post: &ChainPosterior) -> ChainEntropyProfile {
    let (t_len, j_len) = post.smoothed.dim();
    let marginal = marginal_entropy_profile(post);
    let l = &post.smoothed;
    let mut conditional = Array1::zeros(t_len);
    conditional[0] = marginal[0];
    for t in 1..t_len {
        let mut acc = CompensatedSum::new();
        for j in 0..j_len {
            let scale = ratio_or_zero(l[[t, j]], post.predicted[[t, j]]);
            for i in 0..j_len {
                let joint = scale * model.p(i, j) * post.forward[[t - 1, i]];
                if joint > 0.0 {
                    acc.add(-joint * (joint / l[[t - 1, i]]).ln());
                }
            }
        }
        conditional[t] = acc.value();
    }
    let mut partial = Array1::zeros(t_len);
    let mut running = CompensatedSum::new();
    for t in 0..t_len {
        running.add(conditional[t]);
        partial[t] = running.value();
    }
    ChainEntropyProfile {
        direction: Direction::Past,
        marginal,
        conditional,
        global_entropy: partial[t_len - 1],
        partial,
        hernando: None,
    }
}

/// Future-conditioned profile through the backward entropy recursion.
pub fn entropy_future_hernando(
    model: &crate::HmmModel,
    post: &ChainPosterior,
) -> ChainEntropyProfile {
    let (t_len, j_len) = post.smoothed.dim();
    let l = &post.smoothed;
    let mut h = Array2::<f64>::zeros((t_len, j_len));
    let mut weight = vec![0.0; j_len];
    for t in (0..t_len.saturating_sub(1)).rev() {
        for k in 0..j_len {
            weight[k] = ratio_or_zero(l[[t + 1, k]], post.predicted[[t + 1, k]]);
        }
        for j in 0..j_len {
            let z: f64 = (0..j_len).map(|k| weight[k] * model.p(j, k)).sum();
            if !(z > 0.0) {
                continue;
            }
            let mut acc = 0.0;
            for k in 0..j_len {
                let r = weight[k] * model.p(j, k) / z;
                if r > 0.0 {
                    acc += r * (h[[t + 1, k]] - r.ln());
                }
            }
            h[[t, j]] = acc;
        }
    }
    let partial: Array1<f64> = (0..t_len).map(|t| mix(l.row(t), h.row(t))).collect();
    let mut conditional = Array1::zeros(t_len);
    conditional[t_len - 1] = partial[t_len - 1];
    for t in 0..t_len - 1 {
        conditional[t] = partial[t] - partial[t + 1];
    }
    ChainEntropyProfile {
        direction: Direction::Future,
        marginal: marginal_entropy_profile(post),
        conditional,
        global_entropy: partial[0],
        partial,
        hernando: Some(h),
    }
}

/// Future-conditioned profile from the reverse-chain transition
/// `P(S_t=j | S_{t+1}=k, X) = p_jk F_t(j) / G_{t+1}(k)`.
pub fn entropy_future_direct(model: &crate::HmmModel, post: &ChainPosterior) -> ChainEntropyProfile {
    let (t_len, j_len) = post.smoothed.dim();
    let marginal = marginal_entropy_profile(post);
    let mut conditional = Array1::zeros(t_len);
    conditional[t_len - 1] = marginal[t_len - 1];
    for t in 0..t_len - 1 {
        let mut acc = CompensatedSum::new();
        for k in 0..j_len {
            let lk = post.smoothed[[t + 1, k]];
            let gk = post.predicted[[t + 1, k]];
            if !(lk > 0.0 && gk > 0.0) {
                continue;
            }
            for j in 0..j_len {
                let back = model.p(j, k) * post.forward[[t, j]] / gk;
                if back > 0.0 {
                    acc.add(-lk * back * back.ln());
                }
            }
        }
        conditional[t] = acc.value();
    }
    let mut partial = Array1::zeros(t_len);
    let mut running = CompensatedSum::new();
    for t in (0..t_len).rev() {
        running.add(conditional[t]);
        partial[t] = running.value();
    }
    ChainEntropyProfile {
        direction: Direction::Future,
        marginal,
        conditional,
        global_entropy: partial[0],
        partial,
        hernando: None,
    }
}

fn check_agreement(quantity: &'static str, a: &Array1<f64>, b: &Array1<f64>) -> Result<()> {
    for (index, (&first, &second)) in a.iter().zip(b).enumerate() {
        if !((first - second).abs() <= ROUTE_TOLERANCE) {
            return Err(Error::RouteMismatch {
                quantity,
                index,
                first,
                second,
            });
        }
    }
    Ok(())
}

/// Future-conditioned profile, computed by both routes and cross-checked.
///
/// Returns the recursive-route profile; fails with [`Error::RouteMismatch`] if
/// any conditional or partial entry differs by more than [`ROUTE_TOLERANCE`].
pub fn entropy_future(model: &crate::HmmModel, post: &ChainPosterior) -> Result<ChainEntropyProfile> {
    let rec = entropy_future_hernando(model, post);
    let direct = entropy_future_direct(model, post);
    check_agreement("future conditional", &rec.conditional, &direct.conditional)?;
    check_agreement("future partial", &rec.partial, &direct.partial)?;
    Ok(rec)
}

//! Upward-downward smoothing and Viterbi restoration for hidden Markov trees.

use ndarray::{Array1, Array2};

use crate::chain::{argmax, scaled_emissions, Restoration};
use crate::data::ObservedTree;
use crate::error::{Error, Result};
use crate::model::HmmModel;
use crate::numeric::ratio_or_zero;

/// Output of the upward recursion; everything needed before smoothing.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeUpward {
    /// `P(S_u=j)`, `n x J`.
    pub prior: Array2<f64>,
    /// `β_u(j) = P(S_u=j | X̄_u)`.
    pub beta: Array2<f64>,
    /// Row `v` holds `β_{ρ(v),v}(j) = P(X̄_v | S_{ρ(v)}=j) / P(X̄_v)`. The root row is all ones.
    pub beta_edge: Array2<f64>,
    pub normalizers: Array1<f64>,
    pub log_normalizers: Array1<f64>,
    pub log_likelihood: f64,
}

/// All smoothing tables of a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreePosterior {
    pub prior: Array2<f64>,
    pub beta: Array2<f64>,
    pub beta_edge: Array2<f64>,
    pub normalizers: Array1<f64>,
    pub log_normalizers: Array1<f64>,
    /// `ξ_u(j) = P(S_u=j | X=x)`.
    pub smoothed: Array2<f64>,
    pub log_likelihood: f64,
}

impl TreePosterior {
    pub fn len(&self) -> usize {
        self.smoothed.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.smoothed.nrows() == 0
    }

    pub fn num_states(&self) -> usize {
        self.smoothed.ncols()
    }
}

/// State marginals `P(S_u=j)` by the downward Markov recursion from `π`.
pub fn state_priors(model: &HmmModel, tree: &ObservedTree) -> Array2<f64> {
    let topo = tree.topology();
    let j_len = model.num_states();
    let mut prior = Array2::zeros((topo.len(), j_len));
    for &u in topo.order() {
        match topo.parent(u) {
            None => {
                for j in 0..j_len {
                    prior[[u, j]] = model.initial()[j];
                }
            }
            Some(p) => {
                for k in 0..j_len {
                    prior[[u, k]] = (0..j_len).map(|j| prior[[p, j]] * model.p(j, k)).sum();
                }
            }
        }
    }
    prior
}

pub fn upward_pass(model: &HmmModel, tree: &ObservedTree) -> Result<TreeUpward> {
    let topo = tree.topology();
    let log_b = model.log_emission_table(tree)?;
    let (b, shift) = scaled_emissions(&log_b);
    let n = topo.len();
    let j_len = model.num_states();
    let prior = state_priors(model, tree);
    let mut beta = Array2::zeros((n, j_len));
    let mut beta_edge = Array2::ones((n, j_len));
    let mut log_normalizers = Array1::zeros(n);
    let mut joint = vec![0.0; j_len];
    for &u in topo.order().iter().rev() {
        for j in 0..j_len {
            let mut w = b[[u, j]] * prior[[u, j]];
            for &v in topo.children(u) {
                w *= beta_edge[[v, j]];
            }
            joint[j] = w;
        }
        let norm: f64 = joint.iter().sum();
        if !(norm > 0.0) {
            return Err(Error::ImpossibleVertex { vertex: u });
        }
        for j in 0..j_len {
            beta[[u, j]] = joint[j] / norm;
        }
        log_normalizers[u] = norm.ln() + shift[u];
        if topo.parent(u).is_some() {
            for j in 0..j_len {
                beta_edge[[u, j]] = (0..j_len)
                    .map(|k| ratio_or_zero(beta[[u, k]], prior[[u, k]]) * model.p(j, k))
                    .sum();
            }
        }
    }
    Ok(TreeUpward {
        prior,
        beta,
        beta_edge,
        normalizers: log_normalizers.mapv(f64::exp),
        log_likelihood: log_normalizers.sum(),
        log_normalizers,
    })
}

pub fn downward_pass(model: &HmmModel, tree: &ObservedTree, up: TreeUpward) -> TreePosterior {
    let topo = tree.topology();
    let j_len = model.num_states();
    let mut smoothed = Array2::zeros(up.beta.raw_dim());
    for &u in topo.order() {
        match topo.parent(u) {
            None => smoothed.row_mut(u).assign(&up.beta.row(u)),
            Some(p) => {
                for j in 0..j_len {
                    let s: f64 = (0..j_len)
                        .map(|i| model.p(i, j) * ratio_or_zero(smoothed[[p, i]], up.beta_edge[[u, i]]))
                        .sum();
                    smoothed[[u, j]] = ratio_or_zero(up.beta[[u, j]], up.prior[[u, j]]) * s;
                }
            }
        }
    }
    TreePosterior {
        prior: up.prior,
        beta: up.beta,
        beta_edge: up.beta_edge,
        normalizers: up.normalizers,
        log_normalizers: up.log_normalizers,
        smoothed,
        log_likelihood: up.log_likelihood,
    }
}

/// Upward pass followed by the downward pass.
pub fn smooth_tree(model: &HmmModel, tree: &ObservedTree) -> Result<TreePosterior> {
    Ok(downward_pass(model, tree, upward_pass(model, tree)?))
}

#[inline]
fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Max-product upward quantities.
struct MaxUpward {
    log_p: Vec<Vec<f64>>,
    log_b: Array2<f64>,
    /// `δ_u(j)`: best log probability of `X̄_u` and the states below `u`, given `S_u=j`.
    delta: Array2<f64>,
    /// Row `v`: `m_{ρ(v),v}(j) = max_k [ln p_jk + δ_v(k)]`.
    message: Array2<f64>,
    /// Row `v`: the maximizing `k` of `message[v][j]`, smallest on ties.
    arg: Array2<usize>,
}

fn max_upward(model: &HmmModel, tree: &ObservedTree) -> Result<MaxUpward> {
    let topo = tree.topology();
    let log_b = model.log_emission_table(tree)?;
    let (n, j_len) = log_b.dim();
    let log_p: Vec<Vec<f64>> = model
        .transition()
        .iter()
        .map(|row| row.iter().map(|&p| ln(p)).collect())
        .collect();
    let mut delta = Array2::zeros((n, j_len));
    let mut message = Array2::zeros((n, j_len));
    let mut arg = Array2::zeros((n, j_len));
    for &u in topo.order().iter().rev() {
        for j in 0..j_len {
            let mut d = log_b[[u, j]];
            for &v in topo.children(u) {
                d += message[[v, j]];
            }
            delta[[u, j]] = d;
        }
        if topo.parent(u).is_some() {
            for j in 0..j_len {
                let (k, m) = argmax((0..j_len).map(|k| log_p[j][k] + delta[[u, k]]));
                message[[u, j]] = m;
                arg[[u, j]] = k;
            }
        }
    }
    Ok(MaxUpward {
        log_p,
        log_b,
        delta,
        message,
        arg,
    })
}

/// Most probable state tree; ties go to the smaller state index.
pub fn viterbi_tree(model: &HmmModel, tree: &ObservedTree) -> Result<Restoration> {
    let topo = tree.topology();
    let up = max_upward(model, tree)?;
    let j_len = model.num_states();
    let (root_state, log_joint) =
        argmax((0..j_len).map(|j| ln(model.initial()[j]) + up.delta[[0, j]]));
    if log_joint == f64::NEG_INFINITY {
        return Err(Error::AllPathsImpossible);
    }
    let mut states = vec![0; topo.len()];
    states[0] = root_state;
    for &u in &topo.order()[1..] {
        let p = topo.parent(u).expect("non-root vertex");
        states[u] = up.arg[[u, states[p]]];
    }
    Ok(Restoration { states, log_joint })
}

/// `max_{(s_v)_{v≠u}} P((S_v=s_v)_{v≠u}, S_u=j | X=x)` for every vertex and state.
#[allow(clippy::needless_range_loop)]
pub fn viterbi_profiles(model: &HmmModel, tree: &ObservedTree) -> Result<Array2<f64>> {
    let topo = tree.topology();
    let log_likelihood = upward_pass(model, tree)?.log_likelihood;
    let up = max_upward(model, tree)?;
    let (n, j_len) = up.delta.dim();
    // γ_u(j): best log probability of everything outside the subtree of u, with S_u=j.
    let mut gamma = Array2::from_elem((n, j_len), f64::NEG_INFINITY);
    for j in 0..j_len {
        gamma[[0, j]] = ln(model.initial()[j]);
    }
    let mut base = vec![0.0; j_len];
    for &u in topo.order() {
        let children = topo.children(u);
        if children.is_empty() {
            continue;
        }
        for j in 0..j_len {
            base[j] = gamma[[u, j]] + up.log_b[[u, j]];
        }
        // suffix[i][j] = Σ_{w >= i} m_{u,c_w}(j)
        let c = children.len();
        let mut suffix = vec![vec![0.0; j_len]; c + 1];
        for i in (0..c).rev() {
            for j in 0..j_len {
                suffix[i][j] = suffix[i + 1][j] + up.message[[children[i], j]];
            }
        }
        let mut prefix = vec![0.0; j_len];
        for (i, &v) in children.iter().enumerate() {
            for k in 0..j_len {
                gamma[[v, k]] = (0..j_len)
                    .map(|j| base[j] + prefix[j] + suffix[i + 1][j] + up.log_p[j][k])
                    .fold(f64::NEG_INFINITY, f64::max);
            }
            for j in 0..j_len {
                prefix[j] += up.message[[v, j]];
            }
        }
    }
    Ok(Array2::from_shape_fn((n, j_len), |(u, j)| {
        (up.delta[[u, j]] + gamma[[u, j]] - log_likelihood).exp()
    }))
}

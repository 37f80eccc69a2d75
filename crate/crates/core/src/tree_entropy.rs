//! Entropy profiles of hidden state trees.
//!
//! Two independent routes compute the subtree and complement entropies:
//! approach 1 combines parent-conditioned entropies (needs the downward
//! pass), approach 2 runs an upward recursion on
//! `H(S̄_{c(u)} | S_u=j, X̄_u)` that uses upward quantities only.

use ndarray::{Array1, Array2, Array3};

use crate::data::ObservedTree;
use crate::error::{Error, Result};
use crate::model::HmmModel;
use crate::numeric::{entropy, ratio_or_zero, xlogx, CompensatedSum};
use crate::tree::{TreePosterior, TreeUpward};

/// Default cap on the number of joint terms of the children-conditioned profile.
pub const DEFAULT_CHILDREN_BUDGET: u128 = 100_000_000;

/// `H(S_u | S_{ρ(u)}, X)` with the pairwise posteriors used to compute it.
#[derive(Debug, Clone, PartialEq)]
pub struct ParentConditional {
    /// Root slot holds `H(S_0 | X)`.
    pub conditional: Array1<f64>,
    /// `[u, i, j] = P(S_{ρ(u)}=i, S_u=j | X)`; the root slice is zero.
    pub pair_joint: Array3<f64>,
}

/// Results of approach 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtreeEntropies {
    /// `H(S̄_u | S_{ρ(u)}, X)`; the root slot holds `H(S̄_0 | X)`.
    pub subtree_given_parent: Array1<f64>,
    /// `H(S̄_u | X)`.
    pub partial_subtree: Array1<f64>,
    /// `H(S̄_{0∖u} | X)`; zero at the root.
    pub partial_complement: Array1<f64>,
    pub global_entropy: f64,
}

/// Results of approach 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UpwardEntropies {
    /// `H(S̄_{c(u)} | S_u=j, X̄_u)`, `n x J`; zero rows at leaves.
    pub state_conditioned_upward: Array2<f64>,
    pub partial_subtree: Array1<f64>,
    pub partial_complement: Array1<f64>,
    pub global_entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeEntropyProfile {
    pub marginal: Array1<f64>,
    pub parent_conditional: Array1<f64>,
    /// `None` when not requested.
    pub children_conditional: Option<Array1<f64>>,
    pub subtree_given_parent: Array1<f64>,
    pub partial_subtree: Array1<f64>,
    pub partial_complement: Array1<f64>,
    pub state_conditioned_upward: Array2<f64>,
    pub global_entropy: f64,
}

/// Sums of parent-conditioned (`g`), children-conditioned (`c`) and marginal
/// (`m`) entropies, with relative gaps. Ratios are `None` when `g` is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySummary {
    pub g: f64,
    pub c: f64,
    pub m: f64,
    pub ratio_cg: Option<f64>,
    pub ratio_mg: Option<f64>,
}

/// `H(S_u | X=x)` for every vertex.
pub fn tree_marginal_entropies(post: &TreePosterior) -> Array1<f64> {
    post.smoothed
        .outer_iter()
        .map(|row| entropy(row.as_slice().expect("standard layout")))
        .collect()
}

/// `[v, j, k] = P(S_v=k | S_{ρ(v)}=j, X̄_v)`, the same as conditioning on
/// all of `X`. The root slice is zero.
fn edge_conditionals(model: &HmmModel, tree: &ObservedTree, up: &UpwardView) -> Array3<f64> {
    let (n, j_len) = up.beta.dim();
    let mut out = Array3::zeros((n, j_len, j_len));
    let mut ratio = vec![0.0; j_len];
    for v in 0..n {
        if tree.topology().parent(v).is_none() {
            continue;
        }
        for (k, r) in ratio.iter_mut().enumerate() {
            *r = ratio_or_zero(up.beta[[v, k]], up.prior[[v, k]]);
        }
        for j in 0..j_len {
            let edge = up.beta_edge[[v, j]];
            if edge > 0.0 {
                for k in 0..j_len {
                    out[[v, j, k]] = ratio[k] * model.p(j, k) / edge;
                }
            }
        }
    }
    out
}

/// Borrowed upward tables, shared by [`TreeUpward`] and [`TreePosterior`].
pub struct UpwardView<'a> {
    pub prior: &'a Array2<f64>,
    pub beta: &'a Array2<f64>,
    pub beta_edge: &'a Array2<f64>,
}

impl<'a> From<&'a TreeUpward> for UpwardView<'a> {
    fn from(up: &'a TreeUpward) -> Self {
        Self {
            prior: &up.prior,
            beta: &up.beta,
            beta_edge: &up.beta_edge,
        }
    }
}

impl<'a> From<&'a TreePosterior> for UpwardView<'a> {
    fn from(post: &'a TreePosterior) -> Self {
        Self {
            prior: &post.prior,
            beta: &post.beta,
            beta_edge: &post.beta_edge,
        }
    }
}

pub fn parent_conditional_profile(
    model: &HmmModel,
    tree: &ObservedTree,
    post: &TreePosterior,
) -> ParentConditional {
    let cond = edge_conditionals(model, tree, &UpwardView::from(post));
    parent_conditional_from(tree, post, &cond)
}

fn parent_conditional_from(tree: &ObservedTree, post: &TreePosterior, edge: &Array3<f64>) -> ParentConditional {
    let topo = tree.topology();
    let (n, j_len) = post.smoothed.dim();
    let mut conditional = Array1::zeros(n);
    let mut pair_joint = Array3::zeros((n, j_len, j_len));
    conditional[0] = entropy(post.smoothed.row(0).as_slice().expect("standard layout"));
    for u in 1..n {
        let p = topo.parent(u).expect("non-root vertex");
        let mut acc = CompensatedSum::new();
        for i in 0..j_len {
            let xi = post.smoothed[[p, i]];
            for j in 0..j_len {
                let cond = edge[[u, i, j]];
                let joint = cond * xi;
                pair_joint[[u, i, j]] = joint;
                if joint > 0.0 {
                    acc.add(-joint * cond.ln());
                }
            }
        }
        conditional[u] = acc.value();
    }
    ParentConditional {
        conditional,
        pair_joint,
    }
}

/// Complement entropies from `H(S̄_v | S_u, X)` of the siblings and the parent's complement.
fn complements(
    tree: &ObservedTree,
    parent_cond: &Array1<f64>,
    subtree_given_parent: &Array1<f64>,
) -> Array1<f64> {
    let topo = tree.topology();
    let mut acc = vec![CompensatedSum::new(); topo.len()];
    for &u in topo.order() {
        let children = topo.children(u);
        if children.is_empty() {
            continue;
        }
        let mut above = acc[u];
        above.add(parent_cond[u]);
        let total = CompensatedSum::from_iter(children.iter().map(|&c| subtree_given_parent[c]));
        for &v in children {
            let mut s = total;
            s.add(-subtree_given_parent[v]);
            s.merge(above);
            acc[v] = s;
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// Subtree, complement and global entropies from the parent-conditioned profile.
pub fn subtree_entropies_approach1(
    tree: &ObservedTree,
    post: &TreePosterior,
    parent_cond: &Array1<f64>,
) -> SubtreeEntropies {
    let topo = tree.topology();
    let n = topo.len();
    let marginal = tree_marginal_entropies(post);
    // Partial sums keep their compensation all the way up, so deep trees
    // lose no more precision than a single compensated sum.
    let mut acc = vec![CompensatedSum::new(); n];
    let mut partial_subtree = Array1::zeros(n);
    for &u in topo.order().iter().rev() {
        let mut below = CompensatedSum::new();
        for &c in topo.children(u) {
            below.merge(acc[c]);
        }
        let mut s = below;
        s.add(parent_cond[u]);
        acc[u] = s;
        let mut s = below;
        s.add(marginal[u]);
        partial_subtree[u] = s.value();
    }
    let sgp: Array1<f64> = acc.iter().map(CompensatedSum::value).collect();
    let partial_complement = complements(tree, parent_cond, &sgp);
    SubtreeEntropies {
        global_entropy: partial_subtree[0],
        subtree_given_parent: sgp,
        partial_subtree,
        partial_complement,
    }
}

/// `H(S̄_{c(u)} | S_u=j, X̄_u)` by an upward recursion that needs no smoothed probabilities.
pub fn upward_state_entropies<'a>(
    model: &HmmModel,
    tree: &ObservedTree,
    up: impl Into<UpwardView<'a>>,
) -> Array2<f64> {
    let edge = edge_conditionals(model, tree, &up.into());
    upward_state_entropies_from(tree, &edge)
}

fn upward_state_entropies_from(tree: &ObservedTree, edge: &Array3<f64>) -> Array2<f64> {
    let topo = tree.topology();
    let (n, j_len, _) = edge.dim();
    let mut table = Array2::<f64>::zeros((n, j_len));
    for &u in topo.order().iter().rev() {
        for j in 0..j_len {
            let mut acc = 0.0;
            for &v in topo.children(u) {
                for k in 0..j_len {
                    let r = edge[[v, j, k]];
                    if r > 0.0 {
                        acc += r * (table[[v, k]] - r.ln());
                    }
                }
            }
            table[[u, j]] = acc;
        }
    }
    table
}

fn mix(weights: ndarray::ArrayView1<f64>, h: ndarray::ArrayView1<f64>) -> f64 {
    weights
        .iter()
        .zip(h)
        .map(|(&w, &hj)| if w > 0.0 { w * hj - xlogx(w) } else { 0.0 })
        .sum()
}

/// Subtree, complement and global entropies from the upward state-conditioned table.
///
/// The complement reuses the parent-conditioned profile, as there is no
/// upward-only expression for it.
pub fn subtree_entropies_approach2(
    model: &HmmModel,
    tree: &ObservedTree,
    post: &TreePosterior,
    parent_cond: &Array1<f64>,
) -> UpwardEntropies {
    let table = upward_state_entropies(model, tree, post);
    let n = table.nrows();
    let global_entropy = mix(post.beta.row(0), table.row(0));
    let partial_subtree: Array1<f64> = (0..n).map(|u| mix(post.smoothed.row(u), table.row(u))).collect();
    let mut partial_complement = Array1::zeros(n);
    for u in 1..n {
        let below: f64 = post
            .smoothed
            .row(u)
            .iter()
            .zip(table.row(u))
            .map(|(&w, &h)| w * h)
            .sum();
        partial_complement[u] = global_entropy - below - parent_cond[u];
    }
    UpwardEntropies {
        state_conditioned_upward: table,
        partial_subtree,
        partial_complement,
        global_entropy,
    }
}

/// Number of joint terms the children-conditioned profile enumerates at `u`.
fn children_terms(j_len: usize, branching: usize) -> u128 {
    (j_len as u128).saturating_pow(branching as u32 + 1)
}

/// `H(S_u | S_{c(u)}, X)` for internal vertices and `H(S_u | X)` at leaves.
///
/// Enumerates children state tuples, so the cost at `u` is `J^{1+|c(u)|}`.
/// The sum of these over internal vertices must not exceed `op_budget`.
pub fn children_conditional_profile(
    model: &HmmModel,
    tree: &ObservedTree,
    post: &TreePosterior,
    op_budget: u128,
) -> Result<Array1<f64>> {
    check_children_budget(tree, post.num_states(), op_budget)?;
    let edge = edge_conditionals(model, tree, &UpwardView::from(post));
    Ok(children_conditional_from(tree, post, &edge))
}

fn check_children_budget(tree: &ObservedTree, j_len: usize, op_budget: u128) -> Result<()> {
    let topo = tree.topology();
    let n = topo.len();
    let mut required: u128 = 0;
    let mut worst = (0usize, 0u128);
    for u in 0..n {
        let c = topo.children(u).len();
        if c > 0 {
            let terms = children_terms(j_len, c);
            required = required.saturating_add(terms);
            if terms > worst.1 {
                worst = (u, terms);
            }
        }
    }
    if required > op_budget {
        return Err(Error::ChildrenBudgetExceeded {
            vertex: worst.0,
            branching: topo.children(worst.0).len(),
            required,
            budget: op_budget,
        });
    }
    Ok(())
}

fn children_conditional_from(tree: &ObservedTree, post: &TreePosterior, edge: &Array3<f64>) -> Array1<f64> {
    let topo = tree.topology();
    let (n, j_len) = post.smoothed.dim();
    let mut out = tree_marginal_entropies(post);
    let mut joint = vec![0.0; j_len];
    for u in 0..n {
        let children = topo.children(u);
        if children.is_empty() {
            continue;
        }
        let mut tuple = vec![0usize; children.len()];
        let mut acc = CompensatedSum::new();
        loop {
            let mut z = 0.0;
            for j in 0..j_len {
                let mut w = post.smoothed[[u, j]];
                for (&v, &k) in children.iter().zip(&tuple) {
                    w *= edge[[v, j, k]];
                }
                joint[j] = w;
                z += w;
            }
            if z > 0.0 {
                for &w in &joint {
                    if w > 0.0 {
                        acc.add(-w * (w / z).ln());
                    }
                }
            }
            // odometer over children states, last child fastest
            let mut pos = tuple.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < j_len {
                    break;
                }
                tuple[pos] = 0;
            }
            if tuple.iter().all(|&k| k == 0) {
                break;
            }
        }
        out[u] = acc.value();
    }
    out
}

/// Every tree entropy quantity. `children_budget = None` skips the
/// children-conditioned profile.
pub fn tree_entropy_profile(
    model: &HmmModel,
    tree: &ObservedTree,
    post: &TreePosterior,
    children_budget: Option<u128>,
) -> Result<TreeEntropyProfile> {
    if let Some(budget) = children_budget {
        check_children_budget(tree, post.num_states(), budget)?;
    }
    let edge = edge_conditionals(model, tree, &UpwardView::from(post));
    let parent = parent_conditional_from(tree, post, &edge);
    let a1 = subtree_entropies_approach1(tree, post, &parent.conditional);
    let table = upward_state_entropies_from(tree, &edge);
    let children_conditional = children_budget.map(|_| children_conditional_from(tree, post, &edge));
    Ok(TreeEntropyProfile {
        marginal: tree_marginal_entropies(post),
        parent_conditional: parent.conditional,
        children_conditional,
        subtree_given_parent: a1.subtree_given_parent,
        partial_subtree: a1.partial_subtree,
        partial_complement: a1.partial_complement,
        state_conditioned_upward: table,
        global_entropy: a1.global_entropy,
    })
}

/// Below this, `G` is treated as zero and the ratios are undefined.
pub const SUMMARY_ZERO: f64 = 1e-12;

pub fn entropy_summary(profile: &TreeEntropyProfile) -> Result<EntropySummary> {
    let children = profile.children_conditional.as_ref().ok_or_else(|| {
        Error::InvalidArgument("summary needs the children-conditioned profile".into())
    })?;
    let g = CompensatedSum::from_iter(profile.parent_conditional.iter().copied()).value();
    let c = CompensatedSum::from_iter(children.iter().copied()).value();
    let m = CompensatedSum::from_iter(profile.marginal.iter().copied()).value();
    let ratio = |x: f64| (g > SUMMARY_ZERO).then(|| (x - g) / g);
    Ok(EntropySummary {
        g,
        c,
        m,
        ratio_cg: ratio(c),
        ratio_mg: ratio(m),
    })
}

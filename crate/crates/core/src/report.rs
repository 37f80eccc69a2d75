//! Profile tables for each CLI subcommand.

use crate::chain::{smooth, viterbi_chain};
use crate::chain_entropy::{entropy_future, entropy_past_hernando};
use crate::data::{ObservedSequence, ObservedTree, Observations};
use crate::error::{Error, Result};
use crate::model::HmmModel;
use crate::numeric::CompensatedSum;
use crate::oracle::{enumerate_tree, Query};
use crate::profile::{ProfileKind, ProfileTable};
use crate::tree::{smooth_tree, viterbi_profiles, viterbi_tree};
use crate::tree_entropy::{entropy_summary, tree_entropy_profile};

/// Which conditional profiles to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    Past,
    Future,
    Parent,
    Children,
    Both,
}

impl std::str::FromStr for Conditioning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "past" => Conditioning::Past,
            "future" => Conditioning::Future,
            "parent" => Conditioning::Parent,
            "children" => Conditioning::Children,
            "both" => Conditioning::Both,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown conditioning {other:?}; expected past, future, parent, children or both"
                )))
            }
        })
    }
}

/// A sequence or a tree, as read from a data file.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Chain(ObservedSequence),
    Tree(ObservedTree),
}

impl Input {
    pub fn len(&self) -> usize {
        match self {
            Input::Chain(s) => s.len(),
            Input::Tree(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn base_table<O: Observations>(kind: ProfileKind, data: &O, tree: Option<&ObservedTree>) -> ProfileTable {
    let n = data.num_positions();
    let mut table = ProfileTable::new(kind, n);
    if let Some(tree) = tree {
        let topo = tree.topology();
        table.push_integer("parent", (0..n).map(|u| topo.parent(u).map_or(-1, |p| p as i64)));
    }
    for v in 0..data.num_variables() {
        table.push_integer(format!("x{v}"), (0..n).map(|u| data.observation(u)[v] as i64));
    }
    table
}

fn chain_table(seq: &ObservedSequence) -> ProfileTable {
    base_table(ProfileKind::Chain, seq, None)
}

fn tree_table(tree: &ObservedTree) -> ProfileTable {
    base_table(ProfileKind::Tree, tree, Some(tree))
}

fn states_column(table: &mut ProfileTable, states: &[usize]) {
    table.push_integer("viterbi_state", states.iter().map(|&s| s as i64));
}

pub fn smooth_table(model: &HmmModel, input: &Input) -> Result<ProfileTable> {
    Ok(match input {
        Input::Chain(seq) => {
            let post = smooth(model, seq)?;
            let mut t = chain_table(seq);
            t.push_matrix("P_state_", &post.smoothed);
            t
        }
        Input::Tree(tree) => {
            let post = smooth_tree(model, tree)?;
            let mut t = tree_table(tree);
            t.push_matrix("P_state_", &post.smoothed);
            t
        }
    })
}

pub fn viterbi_table(model: &HmmModel, input: &Input) -> Result<ProfileTable> {
    Ok(match input {
        Input::Chain(seq) => {
            let mut t = chain_table(seq);
            states_column(&mut t, &viterbi_chain(model, seq)?.states);
            t
        }
        Input::Tree(tree) => {
            let mut t = tree_table(tree);
            states_column(&mut t, &viterbi_tree(model, tree)?.states);
            t
        }
    })
}

/// Viterbi restoration with the per-vertex constrained maxima. Chains are
/// treated as path trees.
pub fn viterbi_profile_table(model: &HmmModel, input: &Input) -> Result<ProfileTable> {
    let (mut t, tree) = match input {
        Input::Chain(seq) => (chain_table(seq), seq.to_path_tree()),
        Input::Tree(tree) => (tree_table(tree), tree.clone()),
    };
    states_column(&mut t, &viterbi_tree(model, &tree)?.states);
    t.push_matrix("vprof_state_", &viterbi_profiles(model, &tree)?);
    Ok(t)
}

pub fn entropy_table(
    model: &HmmModel,
    input: &Input,
    cond: Conditioning,
    children_budget: u128,
) -> Result<ProfileTable> {
    match input {
        Input::Chain(seq) => {
            let (past, future) = match cond {
                Conditioning::Past => (true, false),
                Conditioning::Future => (false, true),
                Conditioning::Both => (true, true),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "conditioning {other:?} applies to trees, not sequences"
                    )))
                }
            };
            let post = smooth(model, seq)?;
            let mut t = chain_table(seq);
            t.push_array("H_marginal", &crate::chain_entropy::marginal_entropy_profile(&post));
            if past {
                let p = entropy_past_hernando(model, &post);
                t.push_array("H_cond_past", &p.conditional);
                t.push_array("H_partial_past", &p.partial);
            }
            if future {
                let f = entropy_future(model, &post)?;
                t.push_array("H_cond_future", &f.conditional);
                t.push_array("H_partial_future", &f.partial);
            }
            Ok(t)
        }
        Input::Tree(tree) => {
            let (parent, children) = match cond {
                Conditioning::Parent => (true, false),
                Conditioning::Children => (false, true),
                Conditioning::Both => (true, true),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "conditioning {other:?} applies to sequences, not trees"
                    )))
                }
            };
            let post = smooth_tree(model, tree)?;
            let prof = tree_entropy_profile(model, tree, &post, children.then_some(children_budget))?;
            let mut t = tree_table(tree);
            t.push_array("H_marginal", &prof.marginal);
            if parent {
                t.push_array("H_parent_cond", &prof.parent_conditional);
                t.push_array("H_subtree_given_parent", &prof.subtree_given_parent);
                t.push_array("H_partial_subtree", &prof.partial_subtree);
                t.push_array("H_partial_complement", &prof.partial_complement);
            }
            if let Some(c) = &prof.children_conditional {
                t.push_array("H_children_cond", c);
            }
            Ok(t)
        }
    }
}

fn na(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

/// One row per input with likelihood, restoration and entropy totals.
pub fn summary_table(model: &HmmModel, inputs: &[Input], children_budget: u128) -> Result<ProfileTable> {
    let rows = inputs.len();
    let is_tree = matches!(inputs.first(), Some(Input::Tree(_)));
    let mut size = Vec::with_capacity(rows);
    let mut loglik = Vec::with_capacity(rows);
    let mut vit = Vec::with_capacity(rows);
    let mut g = Vec::with_capacity(rows);
    let mut c = Vec::with_capacity(rows);
    let mut m = Vec::with_capacity(rows);
    let mut rcg = Vec::with_capacity(rows);
    let mut rmg = Vec::with_capacity(rows);
    for input in inputs {
        size.push(input.len() as i64);
        match input {
            Input::Chain(seq) => {
                let post = smooth(model, seq)?;
                let p = entropy_past_hernando(model, &post);
                let sum_m = CompensatedSum::from_iter(p.marginal.iter().copied()).value();
                loglik.push(post.log_likelihood);
                vit.push(viterbi_chain(model, seq)?.log_joint);
                g.push(p.global_entropy);
                m.push(sum_m);
                rmg.push(if p.global_entropy > crate::tree_entropy::SUMMARY_ZERO {
                    (sum_m - p.global_entropy) / p.global_entropy
                } else {
                    f64::NAN
                });
            }
            Input::Tree(tree) => {
                let post = smooth_tree(model, tree)?;
                let prof = tree_entropy_profile(model, tree, &post, Some(children_budget))?;
                let s = entropy_summary(&prof)?;
                loglik.push(post.log_likelihood);
                vit.push(viterbi_tree(model, tree)?.log_joint);
                g.push(s.g);
                c.push(s.c);
                m.push(s.m);
                rcg.push(na(s.ratio_cg));
                rmg.push(na(s.ratio_mg));
            }
        }
    }
    let mut t = ProfileTable::new(ProfileKind::Summary, rows);
    t.push_integer("size", size);
    t.push_real("log_likelihood", loglik);
    t.push_real("viterbi_log_joint", vit);
    if is_tree {
        t.push_real("H_G", g);
        t.push_real("H_C", c);
        t.push_real("H_M", m);
        t.push_real("ratio_cg", rcg);
    } else {
        t.push_real("H_global", g);
        t.push_real("H_sum_marginal", m);
    }
    t.push_real("ratio_mg", rmg);
    Ok(t)
}

/// Every per-position quantity by exhaustive enumeration, with the same
/// column names as the recursive subcommands.
pub fn oracle_table(model: &HmmModel, input: &Input, config_budget: u128) -> Result<ProfileTable> {
    let (mut t, tree, chain) = match input {
        Input::Chain(seq) => (chain_table(seq), seq.to_path_tree(), true),
        Input::Tree(tree) => (tree_table(tree), tree.clone(), false),
    };
    let r = enumerate_tree(model, &tree, config_budget)?;
    let n = tree.len();
    let j_len = model.num_states();
    let q = |query: Query| r.query(&query);
    let column = |f: &dyn Fn(usize) -> Query| (0..n).map(|u| q(f(u))).collect::<Result<Vec<f64>>>();
    for j in 0..j_len {
        t.push_real(format!("P_state_{j}"), (0..n).map(|u| r.marginal(u)[j]));
    }
    t.push_real("H_marginal", column(&Query::Marginal)?);
    if chain {
        t.push_real("H_cond_past", column(&Query::GivenParent)?);
        t.push_real("H_partial_past", column(&Query::Prefix)?);
        t.push_real("H_cond_future", column(&Query::GivenChildren)?);
        t.push_real("H_partial_future", column(&Query::Suffix)?);
    } else {
        t.push_real("H_parent_cond", column(&Query::GivenParent)?);
        t.push_real("H_subtree_given_parent", column(&Query::SubtreeGivenParent)?);
        t.push_real("H_partial_subtree", column(&Query::Subtree)?);
        t.push_real("H_partial_complement", column(&Query::Complement)?);
        t.push_real("H_children_cond", column(&Query::GivenChildren)?);
    }
    states_column(&mut t, &r.argmax().0);
    for j in 0..j_len {
        t.push_real(format!("vprof_state_{j}"), column(&|u| Query::ViterbiProfile(u, j))?);
    }
    Ok(t)
}

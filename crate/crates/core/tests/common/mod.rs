//! Shared instance generators and oracle comparisons for integration tests
//! and the acceptance harness.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use hmm_entropy::data::Observations;
use hmm_entropy::{
    entropy_future, entropy_future_direct, entropy_future_hernando, entropy_past_direct,
    entropy_past_hernando, entropy_summary, enumerate_chain, enumerate_tree, forward_pass,
    random_binary_topology, random_topology, simulate_chain, simulate_tree, smooth, smooth_tree,
    subtree_entropies_approach1, subtree_entropies_approach2, tree_entropy_profile, viterbi_chain,
    viterbi_profiles, viterbi_tree, HmmModel, ObservedSequence, ObservedTree, OracleResult, Query,
    TreeTopology, VariableDist, DEFAULT_CHILDREN_BUDGET, DEFAULT_CONFIG_BUDGET,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;
pub const PROB_TOL: f64 = 1e-10;
/// Restorations are compared only when the best configuration beats the
/// runner-up by this relative margin.
pub const TIE_MARGIN: f64 = 1e-9;
/// Conditioning states with less posterior mass than this are skipped when
/// comparing state-conditioned entropies.
pub const MASS_FLOOR: f64 = 1e-9;

pub fn m1() -> HmmModel {
    HmmModel::categorical(
        vec![0.5, 0.5],
        vec![vec![0.9, 0.1], vec![0.1, 0.9]],
        vec![vec![0.8, 0.2], vec![0.2, 0.8]],
    )
    .unwrap()
}

/// A probability vector with some entries forced to zero.
pub fn random_law<R: Rng>(rng: &mut R, len: usize, zero_prob: f64) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..len)
            .map(|_| if rng.random_bool(zero_prob) { 0.0 } else { rng.random::<f64>() + 0.02 })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.into_iter().map(|x| x / total).collect();
        }
    }
}

/// Random categorical model with one or two variables over small alphabets.
pub fn random_model<R: Rng>(rng: &mut R, num_states: usize) -> HmmModel {
    let zero = 0.15;
    let initial = random_law(rng, num_states, zero);
    let transition = (0..num_states).map(|_| random_law(rng, num_states, zero)).collect();
    let num_vars = if rng.random_bool(0.25) { 2 } else { 1 };
    let alphabets: Vec<usize> = (0..num_vars).map(|_| rng.random_range(2..=3)).collect();
    let emissions = (0..num_states)
        .map(|_| {
            alphabets
                .iter()
                .map(|&a| VariableDist::Categorical { probs: random_law(rng, a, zero) })
                .collect()
        })
        .collect();
    HmmModel::new(initial, transition, emissions).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small chain instance: `J ∈ {2,3}`, `T ∈ 1..=8`, data simulated from the model.
pub fn chain_instance(seed: u64) -> (HmmModel, ObservedSequence) {
    let mut r = rng(seed);
    let num_states = r.random_range(2..=3);
    let model = random_model(&mut r, num_states);
    let len = r.random_range(1..=8);
    let (_, seq) = simulate_chain(&model, len, r.random()).unwrap();
    (model, seq)
}

/// Small tree instance: `J ∈ {2,3}`, `n ∈ 1..=8`, random shape.
pub fn tree_instance(seed: u64) -> (HmmModel, ObservedTree) {
    let mut r = rng(seed);
    let num_states = r.random_range(2..=3);
    let model = random_model(&mut r, num_states);
    let n = r.random_range(1..=8);
    let topo = if r.random_bool(0.3) {
        random_binary_topology(n, r.random())
    } else {
        random_topology(n, r.random())
    };
    let (_, tree) = simulate_tree(&model, &topo, r.random()).unwrap();
    (model, tree)
}

/// Random tree in which no vertex has more than `arity` children.
pub fn random_bounded_topology(n: usize, arity: usize, seed: u64) -> TreeTopology {
    let mut r = rng(seed);
    let mut open = vec![0usize];
    let mut count = vec![0usize; n];
    let mut parents = vec![None; n];
    for (u, slot) in parents.iter_mut().enumerate().skip(1) {
        let k = r.random_range(0..open.len());
        let p = open[k];
        *slot = Some(p);
        count[p] += 1;
        if count[p] == arity {
            open.swap_remove(k);
        }
        open.push(u);
    }
    TreeTopology::from_parents(parents).unwrap()
}

/// The same shape with ids assigned in breadth-first order.
pub fn bfs_relabel(topo: &TreeTopology) -> TreeTopology {
    let mut id = vec![0; topo.len()];
    for (k, &u) in topo.order().iter().enumerate() {
        id[u] = k;
    }
    let mut parents = vec![None; topo.len()];
    for u in 0..topo.len() {
        parents[id[u]] = topo.parent(u).map(|p| id[p]);
    }
    TreeTopology::from_parents(parents).unwrap()
}

/// Collects mismatches instead of panicking so callers can report them all.
#[derive(Debug, Default)]
pub struct Mismatches {
    pub checked: usize,
    pub failures: Vec<String>,
    pub worst: f64,
    pub worst_label: String,
}

impl Mismatches {
    pub fn close(&mut self, what: impl FnOnce() -> String, got: f64, want: f64, tol: f64) {
        self.checked += 1;
        let err = (got - want).abs();
        if !(err <= tol) {
            self.failures.push(format!("{}: got {got:e}, want {want:e}", what()));
        } else if err > self.worst {
            self.worst = err;
            self.worst_label = what();
        }
    }

    /// `got ≤ bound + tol`.
    pub fn at_most(&mut self, what: impl FnOnce() -> String, got: f64, bound: f64, tol: f64) {
        self.checked += 1;
        if !(got <= bound + tol) {
            self.failures.push(format!("{}: {got:e} exceeds {bound:e}", what()));
        }
    }

    pub fn truth(&mut self, what: impl FnOnce() -> String, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn merge(&mut self, other: Mismatches) {
        self.checked += other.checked;
        if other.worst > self.worst {
            self.worst = other.worst;
            self.worst_label = other.worst_label;
        }
        self.failures.extend(other.failures);
    }

    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn assert_ok(&self) {
        assert!(
            self.is_ok(),
            "{} of {} checks failed; first: {:?}",
            self.failures.len(),
            self.checked,
            &self.failures[..self.failures.len().min(5)]
        );
    }
}

fn prefix(seq: &ObservedSequence, len: usize) -> ObservedSequence {
    let v = seq.num_variables();
    let values = seq.rows().take(len).flatten().copied().collect();
    ObservedSequence::new(v, values).unwrap()
}

fn oracle_query(r: &OracleResult, q: Query) -> f64 {
    r.query(&q).unwrap()
}

/// Checks a restoration against the oracle unless the maximum is nearly tied.
fn check_restoration(m: &mut Mismatches, tag: &str, r: &OracleResult, states: &[usize], log_joint: f64) {
    let (best, best_log) = r.argmax();
    m.close(|| format!("{tag} viterbi log joint"), log_joint, best_log, TOL);
    m.close(|| format!("{tag} viterbi probability"), log_joint.exp(), best_log.exp(), PROB_TOL);
    if r.argmax_margin() > TIE_MARGIN {
        m.truth(|| format!("{tag} viterbi path {states:?} vs {best:?}"), states == best.as_slice());
    }
}

/// Every chain quantity against exhaustive enumeration.
pub fn check_chain_oracle(model: &HmmModel, seq: &ObservedSequence) -> Mismatches {
    let mut m = Mismatches::default();
    let t_len = seq.len();
    let j_len = model.num_states();
    let r = enumerate_chain(model, seq, DEFAULT_CONFIG_BUDGET).unwrap();
    let post = smooth(model, seq).unwrap();
    m.close(|| "log likelihood".into(), post.log_likelihood, r.log_evidence(), TOL);

    // Filtered and predicted laws and normalizers from enumerations of prefixes.
    let mut prev_evidence = 1.0;
    let mut prev_filtered: Option<Vec<f64>> = None;
    for t in 0..t_len {
        let rp = enumerate_chain(model, &prefix(seq, t + 1), DEFAULT_CONFIG_BUDGET).unwrap();
        let filtered = rp.marginal(t);
        for (j, &fj) in filtered.iter().enumerate() {
            let predicted = match &prev_filtered {
                None => model.initial()[j],
                Some(f) => f.iter().enumerate().map(|(i, &fi)| fi * model.p(i, j)).sum(),
            };
            m.close(|| format!("F[{t},{j}]"), post.forward[[t, j]], fj, PROB_TOL);
            m.close(|| format!("G[{t},{j}]"), post.predicted[[t, j]], predicted, PROB_TOL);
            m.close(|| format!("L[{t},{j}]"), post.smoothed[[t, j]], r.marginal(t)[j], PROB_TOL);
        }
        let evidence = rp.evidence();
        m.close(|| format!("N[{t}]"), post.normalizers[t], evidence / prev_evidence, PROB_TOL);
        prev_evidence = evidence;
        prev_filtered = Some(filtered);
    }

    let global = oracle_query(&r, Query::Global);
    let past = [entropy_past_hernando(model, &post), entropy_past_direct(model, &post)];
    let future = [
        entropy_future_hernando(model, &post),
        entropy_future_direct(model, &post),
        entropy_future(model, &post).unwrap(),
    ];
    for (k, p) in past.iter().enumerate() {
        m.close(|| format!("past[{k}] global"), p.global_entropy, global, TOL);
        for t in 0..t_len {
            m.close(|| format!("past[{k}] marginal {t}"), p.marginal[t], oracle_query(&r, Query::Marginal(t)), TOL);
            m.close(|| format!("past[{k}] conditional {t}"), p.conditional[t], oracle_query(&r, Query::GivenParent(t)), TOL);
            m.close(|| format!("past[{k}] partial {t}"), p.partial[t], oracle_query(&r, Query::Prefix(t)), TOL);
        }
    }
    for (k, f) in future.iter().enumerate() {
        m.close(|| format!("future[{k}] global"), f.global_entropy, global, TOL);
        for t in 0..t_len {
            m.close(|| format!("future[{k}] marginal {t}"), f.marginal[t], oracle_query(&r, Query::Marginal(t)), TOL);
            m.close(|| format!("future[{k}] conditional {t}"), f.conditional[t], oracle_query(&r, Query::GivenChildren(t)), TOL);
            m.close(|| format!("future[{k}] partial {t}"), f.partial[t], oracle_query(&r, Query::Suffix(t)), TOL);
        }
    }

    let hp = past[0].hernando.as_ref().unwrap();
    let hf = future[0].hernando.as_ref().unwrap();
    for t in 0..t_len {
        for j in 0..j_len {
            if r.marginal(t)[j] > MASS_FLOOR {
                let want = oracle_query(&r, Query::PastGivenState(t, j));
                m.close(|| format!("past state-conditioned [{t},{j}]"), hp[[t, j]], want, TOL);
                let want = oracle_query(&r, Query::DescendantsGivenState(t, j));
                m.close(|| format!("future state-conditioned [{t},{j}]"), hf[[t, j]], want, TOL);
            }
        }
    }

    let v = viterbi_chain(model, seq).unwrap();
    check_restoration(&mut m, "chain", &r, &v.states, v.log_joint);
    let profiles = viterbi_profiles(model, &seq.to_path_tree()).unwrap();
    for t in 0..t_len {
        for j in 0..j_len {
            let want = oracle_query(&r, Query::ViterbiProfile(t, j));
            m.close(|| format!("chain viterbi profile [{t},{j}]"), profiles[[t, j]], want, PROB_TOL);
        }
    }
    m
}

/// `P(S_u = j)` by pushing `π` down the tree.
fn state_priors(model: &HmmModel, topo: &TreeTopology) -> Vec<Vec<f64>> {
    let j_len = model.num_states();
    let mut prior = vec![vec![0.0; j_len]; topo.len()];
    for &u in topo.order() {
        prior[u] = match topo.parent(u) {
            None => model.initial().to_vec(),
            Some(p) => (0..j_len).map(|k| (0..j_len).map(|i| prior[p][i] * model.p(i, k)).sum()).collect(),
        };
    }
    prior
}

/// The subtree rooted at `u` as a standalone tree, with its root first.
fn extract_subtree(tree: &ObservedTree, u: usize) -> ObservedTree {
    let topo = tree.topology();
    let members = topo.subtree(u);
    let mut index = vec![usize::MAX; topo.len()];
    for (k, &v) in members.iter().enumerate() {
        index[v] = k;
    }
    let parents = members
        .iter()
        .map(|&v| if v == u { None } else { topo.parent(v).map(|p| index[p]) })
        .collect();
    let sub = TreeTopology::from_parents(parents).unwrap();
    let values = members.iter().flat_map(|&v| tree.observation(v).to_vec()).collect();
    ObservedTree::new(sub, tree.num_variables(), values).unwrap()
}

fn with_initial(model: &HmmModel, initial: Vec<f64>) -> HmmModel {
    HmmModel::new(initial, model.transition().to_vec(), model.emissions().to_vec()).unwrap()
}

/// Every tree quantity against exhaustive enumeration.
pub fn check_tree_oracle(model: &HmmModel, tree: &ObservedTree) -> Mismatches {
    let mut m = Mismatches::default();
    let topo = tree.topology();
    let n = topo.len();
    let j_len = model.num_states();
    let r = enumerate_tree(model, tree, DEFAULT_CONFIG_BUDGET).unwrap();
    let post = smooth_tree(model, tree).unwrap();
    m.close(|| "log likelihood".into(), post.log_likelihood, r.log_evidence(), TOL);

    // Upward quantities from enumerations of each subtree under its own prior.
    let prior = state_priors(model, topo);
    let mut sub_evidence = vec![0.0; n];
    let mut sub_root = vec![Vec::new(); n];
    for u in 0..n {
        let sub = extract_subtree(tree, u);
        let rs = enumerate_tree(&with_initial(model, prior[u].clone()), &sub, DEFAULT_CONFIG_BUDGET).unwrap();
        sub_evidence[u] = rs.evidence();
        sub_root[u] = rs.marginal(0);
    }
    for u in 0..n {
        let below: f64 = topo.children(u).iter().map(|&c| sub_evidence[c]).product();
        m.close(|| format!("N[{u}]"), post.normalizers[u], sub_evidence[u] / below, PROB_TOL);
        for j in 0..j_len {
            m.close(|| format!("prior[{u},{j}]"), post.prior[[u, j]], prior[u][j], PROB_TOL);
            m.close(|| format!("beta[{u},{j}]"), post.beta[[u, j]], sub_root[u][j], PROB_TOL);
            m.close(|| format!("xi[{u},{j}]"), post.smoothed[[u, j]], r.marginal(u)[j], PROB_TOL);
        }
    }

    let prof = tree_entropy_profile(model, tree, &post, Some(DEFAULT_CHILDREN_BUDGET)).unwrap();
    let children = prof.children_conditional.as_ref().unwrap();
    m.close(|| "global".into(), prof.global_entropy, oracle_query(&r, Query::Global), TOL);
    for u in 0..n {
        let checks = [
            ("marginal", prof.marginal[u], Query::Marginal(u)),
            ("parent conditional", prof.parent_conditional[u], Query::GivenParent(u)),
            ("children conditional", children[u], Query::GivenChildren(u)),
            ("subtree given parent", prof.subtree_given_parent[u], Query::SubtreeGivenParent(u)),
            ("partial subtree", prof.partial_subtree[u], Query::Subtree(u)),
            ("partial complement", prof.partial_complement[u], Query::Complement(u)),
        ];
        for (name, got, q) in checks {
            m.close(|| format!("{name} {u}"), got, oracle_query(&r, q), TOL);
        }
        for j in 0..j_len {
            if r.marginal(u)[j] > MASS_FLOOR {
                let want = oracle_query(&r, Query::DescendantsGivenState(u, j));
                m.close(|| format!("state-conditioned upward [{u},{j}]"), prof.state_conditioned_upward[[u, j]], want, TOL);
            }
        }
    }

    let v = viterbi_tree(model, tree).unwrap();
    check_restoration(&mut m, "tree", &r, &v.states, v.log_joint);
    let profiles = viterbi_profiles(model, tree).unwrap();
    for u in 0..n {
        for j in 0..j_len {
            let want = oracle_query(&r, Query::ViterbiProfile(u, j));
            m.close(|| format!("tree viterbi profile [{u},{j}]"), profiles[[u, j]], want, PROB_TOL);
        }
    }
    m
}

/// Chain rule and bounds on a chain: conditionals sum to the global entropy,
/// every conditional is at most its marginal and partial entropies are monotone.
pub fn check_chain_identities(model: &HmmModel, seq: &ObservedSequence) -> Mismatches {
    let mut m = Mismatches::default();
    let post = smooth(model, seq).unwrap();
    let past = entropy_past_hernando(model, &post);
    let future = entropy_future(model, &post).unwrap();
    let t_len = seq.len();
    let sum = |a: &ndarray::Array1<f64>| hmm_entropy::numeric::stable_sum(a.iter().copied());
    m.close(|| "Σ past conditional".into(), sum(&past.conditional), past.global_entropy, TOL);
    m.close(|| "Σ future conditional".into(), sum(&future.conditional), future.global_entropy, TOL);
    m.close(|| "global past vs future".into(), past.global_entropy, future.global_entropy, TOL);
    m.close(|| "last past partial".into(), past.partial[t_len - 1], past.global_entropy, TOL);
    m.close(|| "first future partial".into(), future.partial[0], future.global_entropy, TOL);
    m.at_most(|| "global vs Σ marginal".into(), past.global_entropy, sum(&past.marginal), TOL);
    for t in 0..t_len {
        m.at_most(|| format!("past conditional {t}"), past.conditional[t], past.marginal[t], TOL);
        m.at_most(|| format!("future conditional {t}"), future.conditional[t], future.marginal[t], TOL);
        m.at_most(|| format!("negative marginal {t}"), -past.marginal[t], 0.0, TOL);
        m.at_most(|| format!("negative past conditional {t}"), -past.conditional[t], 0.0, TOL);
        m.at_most(|| format!("negative future conditional {t}"), -future.conditional[t], 0.0, TOL);
        if t > 0 {
            m.at_most(|| format!("past partial {t} decreases"), past.partial[t - 1], past.partial[t], TOL);
            m.at_most(|| format!("future partial {t} increases"), future.partial[t], future.partial[t - 1], TOL);
        }
    }
    m
}

/// Chain rule and `G ≤ C ≤ M` on a tree.
pub fn check_tree_identities(model: &HmmModel, tree: &ObservedTree) -> Mismatches {
    let mut m = Mismatches::default();
    let topo = tree.topology();
    let post = smooth_tree(model, tree).unwrap();
    let prof = tree_entropy_profile(model, tree, &post, Some(DEFAULT_CHILDREN_BUDGET)).unwrap();
    let s = entropy_summary(&prof).unwrap();
    let children = prof.children_conditional.as_ref().unwrap();
    m.close(|| "Σ parent conditional".into(), s.g, prof.global_entropy, TOL);
    m.close(|| "root partial subtree".into(), prof.partial_subtree[0], prof.global_entropy, TOL);
    m.at_most(|| "G ≤ C".into(), s.g, s.c, TOL);
    m.at_most(|| "C ≤ M".into(), s.c, s.m, TOL);
    if let (Some(cg), Some(mg)) = (s.ratio_cg, s.ratio_mg) {
        m.at_most(|| "(C−G)/G ≤ (M−G)/G".into(), cg, mg, TOL);
    }
    for u in 0..topo.len() {
        m.at_most(|| format!("parent conditional {u}"), prof.parent_conditional[u], prof.marginal[u], TOL);
        m.at_most(|| format!("children conditional {u}"), children[u], prof.marginal[u], TOL);
        m.at_most(|| format!("negative children conditional {u}"), -children[u], 0.0, TOL);
        m.at_most(|| format!("negative parent conditional {u}"), -prof.parent_conditional[u], 0.0, TOL);
        m.at_most(|| format!("subtree {u} exceeds global"), prof.partial_subtree[u], prof.global_entropy, TOL);
        if let Some(p) = topo.parent(u) {
            m.close(
                || format!("complement + subtree given parent at {u}"),
                prof.partial_complement[u] + prof.subtree_given_parent[u],
                prof.global_entropy,
                TOL,
            );
            m.at_most(|| format!("subtree {u} vs parent subtree"), prof.partial_subtree[u], prof.partial_subtree[p], TOL);
        }
    }
    m
}

/// Recursive and direct chain routes agree entrywise.
pub fn check_chain_routes(model: &HmmModel, seq: &ObservedSequence) -> Mismatches {
    let mut m = Mismatches::default();
    let post = smooth(model, seq).unwrap();
    let pairs = [
        ("past", entropy_past_hernando(model, &post), entropy_past_direct(model, &post)),
        ("future", entropy_future_hernando(model, &post), entropy_future_direct(model, &post)),
    ];
    for (name, a, b) in &pairs {
        m.close(|| format!("{name} global"), a.global_entropy, b.global_entropy, TOL);
        for t in 0..seq.len() {
            m.close(|| format!("{name} conditional {t}"), a.conditional[t], b.conditional[t], TOL);
            m.close(|| format!("{name} partial {t}"), a.partial[t], b.partial[t], TOL);
        }
    }
    m
}

/// Tree approaches 1 and 2 agree entrywise.
pub fn check_tree_routes(model: &HmmModel, tree: &ObservedTree) -> Mismatches {
    let mut m = Mismatches::default();
    let post = smooth_tree(model, tree).unwrap();
    let pc = hmm_entropy::parent_conditional_profile(model, tree, &post);
    let a1 = subtree_entropies_approach1(tree, &post, &pc.conditional);
    let a2 = subtree_entropies_approach2(model, tree, &post, &pc.conditional);
    m.close(|| "global".into(), a1.global_entropy, a2.global_entropy, TOL);
    for u in 0..tree.len() {
        m.close(|| format!("partial subtree {u}"), a1.partial_subtree[u], a2.partial_subtree[u], TOL);
        m.close(|| format!("partial complement {u}"), a1.partial_complement[u], a2.partial_complement[u], TOL);
    }
    m
}

/// A chain and the same data on a path tree give the same answers.
pub fn check_linear_reduction(model: &HmmModel, seq: &ObservedSequence) -> Mismatches {
    let mut m = Mismatches::default();
    let tree = seq.to_path_tree();
    let t_len = seq.len();
    let j_len = model.num_states();
    let fwd = forward_pass(model, seq).unwrap();
    let post = smooth(model, seq).unwrap();
    let tpost = smooth_tree(model, &tree).unwrap();
    let past = entropy_past_hernando(model, &post);
    let future = entropy_future(model, &post).unwrap();
    let prof = tree_entropy_profile(model, &tree, &tpost, Some(DEFAULT_CHILDREN_BUDGET)).unwrap();
    let children = prof.children_conditional.as_ref().unwrap();
    let hf = future.hernando.as_ref().unwrap();

    m.close(|| "log likelihood".into(), tpost.log_likelihood, fwd.log_likelihood, TOL);
    m.close(|| "global".into(), prof.global_entropy, past.global_entropy, TOL);
    for t in 0..t_len {
        for j in 0..j_len {
            m.close(|| format!("smoothed [{t},{j}]"), tpost.smoothed[[t, j]], post.smoothed[[t, j]], PROB_TOL);
            if post.smoothed[[t, j]] > MASS_FLOOR {
                m.close(
                    || format!("state-conditioned [{t},{j}]"),
                    prof.state_conditioned_upward[[t, j]],
                    hf[[t, j]],
                    TOL,
                );
            }
        }
        m.close(|| format!("marginal {t}"), prof.marginal[t], past.marginal[t], TOL);
        m.close(|| format!("parent vs past conditional {t}"), prof.parent_conditional[t], past.conditional[t], TOL);
        m.close(|| format!("children vs future conditional {t}"), children[t], future.conditional[t], TOL);
        m.close(|| format!("subtree vs future partial {t}"), prof.partial_subtree[t], future.partial[t], TOL);
        let complement = if t == 0 { 0.0 } else { past.partial[t - 1] };
        m.close(|| format!("complement vs past partial {t}"), prof.partial_complement[t], complement, TOL);
    }
    let vc = viterbi_chain(model, seq).unwrap();
    let vt = viterbi_tree(model, &tree).unwrap();
    m.close(|| "viterbi log joint".into(), vt.log_joint, vc.log_joint, TOL);
    // Tied optima may be broken differently, so each path is scored on its own.
    m.close(|| "chain path score".into(), path_log_joint(model, seq, &vc.states), vc.log_joint, TOL);
    m.close(|| "tree path score".into(), path_log_joint(model, seq, &vt.states), vc.log_joint, TOL);
    m
}

/// `ln P(S=s, X=x)` for one state path.
pub fn path_log_joint(model: &HmmModel, seq: &ObservedSequence, states: &[usize]) -> f64 {
    let mut total = model.initial()[states[0]].ln();
    for (t, obs) in seq.rows().enumerate() {
        if t > 0 {
            total += model.p(states[t - 1], states[t]).ln();
        }
        total += model.log_emission_prob(states[t], obs).unwrap();
    }
    total
}

//! Exact posterior over every state configuration of a small chain or tree.
//!
//! Quantities are computed straight from their definitions by summing over
//! configurations. The cost is `J^n`, so enumeration is guarded by a budget.

use crate::data::{ObservedSequence, ObservedTree, Observations, TreeTopology};
use crate::error::{Error, Result};
use crate::model::HmmModel;
use crate::numeric::{xlogx, CompensatedSum};

/// Default maximum number of enumerated configurations.
pub const DEFAULT_CONFIG_BUDGET: u128 = 10_000_000;

/// Posterior over all `J^n` configurations. Configuration `code` assigns
/// state `(code / J^u) % J` to position `u`.
#[derive(Debug, Clone)]
pub struct OracleResult {
    num_states: usize,
    topology: TreeTopology,
    posterior: Vec<f64>,
    log_evidence: f64,
}

/// A quantity to compute by enumeration. Chains are paths, so the past
/// conditional at `t` is `GivenParent(t)` and the future one is `GivenChildren(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    /// `H(S | X)`.
    Global,
    /// `H(S_u | X)`.
    Marginal(usize),
    /// `H(S_u | S_{ρ(u)}, X)`, or the marginal at the root.
    GivenParent(usize),
    /// `H(S_u | S_{c(u)}, X)`, or the marginal at a leaf.
    GivenChildren(usize),
    /// `H(S_0^t | X)` on a chain.
    Prefix(usize),
    /// `H(S_t^{T-1} | X)` on a chain.
    Suffix(usize),
    /// `H(S̄_u | X)`.
    Subtree(usize),
    /// `H(S̄_{0∖u} | X)`; zero at the root.
    Complement(usize),
    /// `H(S̄_u | S_{ρ(u)}, X)`, or `H(S̄_0 | X)` at the root.
    SubtreeGivenParent(usize),
    /// `H(S_0^{t-1} | S_t=j, X)` on a chain.
    PastGivenState(usize, usize),
    /// `H(S̄_{c(u)} | S_u=j, X)`: everything strictly below `u`.
    DescendantsGivenState(usize, usize),
    /// `max_{(s_v)_{v≠u}} P((S_v=s_v)_{v≠u}, S_u=j | X)`.
    ViterbiProfile(usize, usize),
}

fn check_budget(num_states: usize, n: usize, budget: u128) -> Result<()> {
    let required = (num_states as u128).saturating_pow(n.min(u32::MAX as usize) as u32);
    if required > budget {
        return Err(Error::ConfigBudgetExceeded { required, budget });
    }
    Ok(())
}

fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Enumerates a chain as a path tree.
pub fn enumerate_chain(model: &HmmModel, seq: &ObservedSequence, config_budget: u128) -> Result<OracleResult> {
    enumerate_tree(model, &seq.to_path_tree(), config_budget)
}

pub fn enumerate_tree(model: &HmmModel, tree: &ObservedTree, config_budget: u128) -> Result<OracleResult> {
    let j_len = model.num_states();
    let n = tree.num_positions();
    check_budget(j_len, n, config_budget)?;
    let log_b = model.log_emission_table(tree)?;
    let topo = tree.topology().clone();
    let total = j_len.pow(n as u32);
    let mut log_joint = Vec::with_capacity(total);
    let mut states = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for s in states.iter_mut() {
            *s = c % j_len;
            c /= j_len;
        }
        let mut lp = ln(model.initial()[states[0]]);
        for u in 0..n {
            lp += log_b[[u, states[u]]];
            if let Some(p) = topo.parent(u) {
                lp += ln(model.p(states[p], states[u]));
            }
        }
        log_joint.push(lp);
    }
    let max = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::AllPathsImpossible);
    }
    let scaled: Vec<f64> = log_joint.iter().map(|&lp| (lp - max).exp()).collect();
    let z = CompensatedSum::from_iter(scaled.iter().copied()).value();
    Ok(OracleResult {
        num_states: j_len,
        topology: topo,
        posterior: scaled.iter().map(|&p| p / z).collect(),
        log_evidence: max + z.ln(),
    })
}

impl OracleResult {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_positions(&self) -> usize {
        self.topology.len()
    }

    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    /// `P(X=x)`.
    pub fn evidence(&self) -> f64 {
        self.log_evidence.exp()
    }

    pub fn log_evidence(&self) -> f64 {
        self.log_evidence
    }

    /// State of position `u` in configuration `code`.
    #[inline]
    pub fn state(&self, code: usize, u: usize) -> usize {
        (code / self.num_states.pow(u as u32)) % self.num_states
    }

    pub fn decode(&self, code: usize) -> Vec<usize> {
        (0..self.num_positions()).map(|u| self.state(code, u)).collect()
    }

    /// `(configuration, P(S=s | X=x))` for every configuration.
    pub fn configurations(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.posterior.iter().enumerate().map(|(code, &p)| (self.decode(code), p))
    }

    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    /// Marginal distribution of the listed positions, indexed in mixed radix
    /// with the first listed position fastest.
    pub fn set_marginal(&self, positions: &[usize]) -> Vec<f64> {
        let j = self.num_states;
        let mut out = vec![0.0; j.pow(positions.len() as u32)];
        for (code, &p) in self.posterior.iter().enumerate() {
            let mut key = 0;
            for &u in positions.iter().rev() {
                key = key * j + self.state(code, u);
            }
            out[key] += p;
        }
        out
    }

    /// `P(S_u=j | X)`.
    pub fn marginal(&self, u: usize) -> Vec<f64> {
        self.set_marginal(&[u])
    }

    /// `P(S_u=i, S_v=j | X)` as a `J x J` row-major vector.
    pub fn pair_marginal(&self, u: usize, v: usize) -> Vec<f64> {
        self.set_marginal(&[v, u])
    }

    /// Joint entropy `H(S_A | X)`.
    pub fn set_entropy(&self, positions: &[usize]) -> f64 {
        if positions.is_empty() {
            return 0.0;
        }
        let m = self.set_marginal(positions);
        -CompensatedSum::from_iter(m.iter().map(|&p| xlogx(p))).value()
    }

    /// `H(S_A | S_B, X)` computed as `H(S_{A∪B}) − H(S_B)`.
    pub fn conditional_entropy(&self, target: &[usize], given: &[usize]) -> f64 {
        let mut union: Vec<usize> = target.iter().chain(given).copied().collect();
        union.sort_unstable();
        union.dedup();
        self.set_entropy(&union) - self.set_entropy(given)
    }

    /// `H(S_A | S_u=j, X)`. Fails when `P(S_u=j | X) = 0`.
    pub fn entropy_given_state(&self, target: &[usize], u: usize, j: usize) -> Result<f64> {
        let mut acc = vec![0.0; self.num_states.pow(target.len() as u32)];
        let mut mass = CompensatedSum::new();
        for (code, &p) in self.posterior.iter().enumerate() {
            if self.state(code, u) != j {
                continue;
            }
            let mut key = 0;
            for &v in target.iter().rev() {
                key = key * self.num_states + self.state(code, v);
            }
            acc[key] += p;
            mass.add(p);
        }
        let mass = mass.value();
        if !(mass > 0.0) {
            return Err(Error::InvalidQuery(format!(
                "conditioning event S_{u}={j} has zero posterior mass"
            )));
        }
        Ok(-CompensatedSum::from_iter(acc.iter().map(|&p| xlogx(p / mass))).value())
    }

    /// Configuration of maximal posterior and its `ln P(S=s, X=x)`.
    /// Among exactly equal maxima the smallest code wins.
    pub fn argmax(&self) -> (Vec<usize>, f64) {
        let mut best = 0;
        for (code, &p) in self.posterior.iter().enumerate() {
            if p > self.posterior[best] {
                best = code;
            }
        }
        (self.decode(best), self.posterior[best].ln() + self.log_evidence)
    }

    /// Relative excess of the largest posterior over the second largest;
    /// zero on an exact tie and `∞` when only one configuration is possible.
    pub fn argmax_margin(&self) -> f64 {
        let mut top = [0.0f64; 2];
        for &p in &self.posterior {
            if p > top[0] {
                top = [p, top[0]];
            } else if p > top[1] {
                top[1] = p;
            }
        }
        if top[1] > 0.0 {
            top[0] / top[1] - 1.0
        } else {
            f64::INFINITY
        }
    }

    fn check_position(&self, u: usize) -> Result<()> {
        if u >= self.num_positions() {
            return Err(Error::InvalidQuery(format!(
                "position {u} out of range for {} positions",
                self.num_positions()
            )));
        }
        Ok(())
    }

    fn check_state(&self, j: usize) -> Result<()> {
        if j >= self.num_states {
            return Err(Error::InvalidQuery(format!(
                "state {j} out of range for {} states",
                self.num_states
            )));
        }
        Ok(())
    }

    fn check_chain(&self) -> Result<()> {
        if !self.topology.is_path() {
            return Err(Error::InvalidQuery("prefix/suffix queries need a chain".into()));
        }
        Ok(())
    }

    pub fn query(&self, query: &Query) -> Result<f64> {
        let n = self.num_positions();
        let topo = &self.topology;
        match *query {
            Query::Global => Ok(self.set_entropy(&(0..n).collect::<Vec<_>>())),
            Query::Marginal(u) => {
                self.check_position(u)?;
                Ok(self.set_entropy(&[u]))
            }
            Query::GivenParent(u) => {
                self.check_position(u)?;
                Ok(match topo.parent(u) {
                    None => self.set_entropy(&[u]),
                    Some(p) => self.conditional_entropy(&[u], &[p]),
                })
            }
            Query::GivenChildren(u) => {
                self.check_position(u)?;
                Ok(self.conditional_entropy(&[u], topo.children(u)))
            }
            Query::Prefix(t) => {
                self.check_chain()?;
                self.check_position(t)?;
                Ok(self.set_entropy(&(0..=t).collect::<Vec<_>>()))
            }
            Query::Suffix(t) => {
                self.check_chain()?;
                self.check_position(t)?;
                Ok(self.set_entropy(&(t..n).collect::<Vec<_>>()))
            }
            Query::Subtree(u) => {
                self.check_position(u)?;
                Ok(self.set_entropy(&topo.subtree(u)))
            }
            Query::Complement(u) => {
                self.check_position(u)?;
                Ok(self.set_entropy(&self.complement(u)))
            }
            Query::SubtreeGivenParent(u) => {
                self.check_position(u)?;
                let sub = topo.subtree(u);
                Ok(match topo.parent(u) {
                    None => self.set_entropy(&sub),
                    Some(p) => self.conditional_entropy(&sub, &[p]),
                })
            }
            Query::PastGivenState(t, j) => {
                self.check_chain()?;
                self.check_position(t)?;
                self.check_state(j)?;
                self.entropy_given_state(&(0..t).collect::<Vec<_>>(), t, j)
            }
            Query::DescendantsGivenState(u, j) => {
                self.check_position(u)?;
                self.check_state(j)?;
                let below = &topo.subtree(u)[1..];
                self.entropy_given_state(below, u, j)
            }
            Query::ViterbiProfile(u, j) => {
                self.check_position(u)?;
                self.check_state(j)?;
                Ok(self
                    .posterior
                    .iter()
                    .enumerate()
                    .filter(|&(code, _)| self.state(code, u) == j)
                    .map(|(_, &p)| p)
                    .fold(0.0, f64::max))
            }
        }
    }

    fn complement(&self, u: usize) -> Vec<usize> {
        let mut inside = vec![false; self.num_positions()];
        for v in self.topology.subtree(u) {
            inside[v] = true;
        }
        (0..self.num_positions()).filter(|&v| !inside[v]).collect()
    }
}

/// Shorthand for `result.query(query)`.
pub fn oracle_entropy(result: &OracleResult, query: &Query) -> Result<f64> {
    result.query(query)
}

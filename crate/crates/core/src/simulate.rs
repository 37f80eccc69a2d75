//! Forward simulation of hidden Markov chains and trees.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;

use crate::data::{ObservedSequence, ObservedTree, TreeTopology};
use crate::error::{Error, Result};
use crate::model::{HmmModel, VariableDist};

struct Sampler {
    initial: WeightedIndex<f64>,
    rows: Vec<WeightedIndex<f64>>,
}

impl Sampler {
    fn new(model: &HmmModel) -> Self {
        let initial = WeightedIndex::new(model.initial()).expect("validated initial law");
        let rows = model
            .transition()
            .iter()
            .map(|row| WeightedIndex::new(row).expect("validated transition row"))
            .collect();
        Self { initial, rows }
    }
}

fn draw_variable<R: Rng>(dist: &VariableDist, rng: &mut R) -> u32 {
    match dist {
        VariableDist::Categorical { probs } => {
            WeightedIndex::new(probs).expect("validated categorical").sample(rng) as u32
        }
        VariableDist::Poisson { rate } => {
            if *rate == 0.0 {
                0
            } else {
                let x: f64 = Poisson::new(*rate).expect("validated rate").sample(rng);
                x as u32
            }
        }
    }
}

fn draw_observation<R: Rng>(model: &HmmModel, state: usize, rng: &mut R, out: &mut Vec<u32>) {
    for dist in &model.emissions()[state] {
        out.push(draw_variable(dist, rng));
    }
}

/// Draws a state sequence and observations of length `length`.
pub fn simulate_chain(
    model: &HmmModel,
    length: usize,
    seed: u64,
) -> Result<(Vec<usize>, ObservedSequence)> {
    if length == 0 {
        return Err(Error::InvalidArgument("simulation length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = Sampler::new(model);
    let mut states = Vec::with_capacity(length);
    let mut values = Vec::with_capacity(length * model.num_variables());
    let mut s = sampler.initial.sample(&mut rng);
    for t in 0..length {
        if t > 0 {
            s = sampler.rows[s].sample(&mut rng);
        }
        states.push(s);
        draw_observation(model, s, &mut rng, &mut values);
    }
    let seq = ObservedSequence::new(model.num_variables(), values)?;
    Ok((states, seq))
}

/// Draws a state tree and observations on `topology`, parents before children.
pub fn simulate_tree(
    model: &HmmModel,
    topology: &TreeTopology,
    seed: u64,
) -> Result<(Vec<usize>, ObservedTree)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = Sampler::new(model);
    let n = topology.len();
    let v = model.num_variables();
    let mut states = vec![0usize; n];
    let mut values = vec![0u32; n * v];
    let mut buf = Vec::with_capacity(v);
    for &u in topology.order() {
        let s = match topology.parent(u) {
            None => sampler.initial.sample(&mut rng),
            Some(p) => sampler.rows[states[p]].sample(&mut rng),
        };
        states[u] = s;
        buf.clear();
        draw_observation(model, s, &mut rng, &mut buf);
        values[u * v..(u + 1) * v].copy_from_slice(&buf);
    }
    let tree = ObservedTree::new(topology.clone(), v, values)?;
    Ok((states, tree))
}

/// Random recursive tree on `n` vertices: each vertex attaches to a uniformly
/// chosen earlier vertex, then non-root ids are shuffled.
pub fn random_topology(n: usize, seed: u64) -> TreeTopology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parents: Vec<usize> = (1..n).map(|u| rng.random_range(0..u)).collect();
    relabel(n, &parents, &mut rng)
}

/// Random tree on `n` vertices where every vertex has at most two children:
/// each new vertex takes a uniformly chosen free child slot.
pub fn random_binary_topology(n: usize, seed: u64) -> TreeTopology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots = vec![0usize, 0];
    let mut parents = Vec::with_capacity(n.saturating_sub(1));
    for u in 1..n {
        let k = rng.random_range(0..slots.len());
        parents.push(slots.swap_remove(k));
        slots.extend([u, u]);
    }
    relabel(n, &parents, &mut rng)
}

/// `parents[u-1]` is the parent of `u`; ids `1..n` are permuted at random.
fn relabel<R: Rng>(n: usize, parents: &[usize], rng: &mut R) -> TreeTopology {
    let mut label: Vec<usize> = (0..n).collect();
    label[1..].shuffle(rng);
    let mut parent = vec![None; n];
    for (u, &p) in parents.iter().enumerate() {
        parent[label[u + 1]] = Some(label[p]);
    }
    TreeTopology::from_parents(parent).expect("generated topology is valid")
}

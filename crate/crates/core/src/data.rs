//! Observed sequences, tree topologies and observed trees.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Multivariate discrete observations indexed by position (time step or vertex).
pub trait Observations {
    fn num_positions(&self) -> usize;
    fn num_variables(&self) -> usize;
    fn observation(&self, position: usize) -> &[u32];
}

fn check_matrix(len: usize, num_variables: usize, values: &[u32]) -> Result<()> {
    if len == 0 {
        return Err(Error::InvalidArgument("observations must not be empty".into()));
    }
    if num_variables == 0 {
        return Err(Error::InvalidArgument("at least one observed variable is required".into()));
    }
    if values.len() != len * num_variables {
        return Err(Error::InvalidArgument(format!(
            "{} values do not form a {len}x{num_variables} matrix",
            values.len()
        )));
    }
    Ok(())
}

/// A sequence of `T >= 1` observation vectors with `V >= 1` variables each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedSequence {
    num_variables: usize,
    values: Vec<u32>,
}

impl ObservedSequence {
    /// `values` is row-major, `T x V`.
    pub fn new(num_variables: usize, values: Vec<u32>) -> Result<Self> {
        let len = values.len().checked_div(num_variables).unwrap_or(0);
        check_matrix(len, num_variables, &values)?;
        Ok(Self { num_variables, values })
    }

    pub fn univariate(values: &[u32]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let v = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != v) {
            return Err(Error::InvalidArgument("ragged observation rows".into()));
        }
        Self::new(v, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.num_variables
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.values.chunks(self.num_variables)
    }

    /// The same data attached to a path topology `0 -> 1 -> ... -> T-1`.
    pub fn to_path_tree(&self) -> ObservedTree {
        ObservedTree {
            topology: TreeTopology::path(self.len()),
            num_variables: self.num_variables,
            values: self.values.clone(),
        }
    }
}

impl Observations for ObservedSequence {
    fn num_positions(&self) -> usize {
        self.len()
    }

    fn num_variables(&self) -> usize {
        self.num_variables
    }

    fn observation(&self, position: usize) -> &[u32] {
        let v = self.num_variables;
        &self.values[position * v..(position + 1) * v]
    }
}

/// Rooted tree given by a parent array; vertex 0 is the root.
///
/// Children lists are ordered by ascending vertex id and `order()` is a
/// breadth-first order from the root, so reversing it visits children
/// before parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeTopology {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl TreeTopology {
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidTree("tree has no vertices".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&u| parent[u].is_none()).collect();
        match roots.as_slice() {
            [] => return Err(Error::InvalidTree("no root vertex (cycle)".into())),
            [0] => {}
            [r] => return Err(Error::InvalidTree(format!("root is vertex {r}, expected vertex 0"))),
            _ => return Err(Error::InvalidTree(format!("multiple roots: {roots:?}"))),
        }
        let mut children = vec![Vec::new(); n];
        for (u, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::InvalidTree(format!(
                        "vertex {u} has parent {p}, which does not exist"
                    )));
                }
                if p == u {
                    return Err(Error::InvalidTree(format!("vertex {u} is its own parent")));
                }
                children[p].push(u);
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            queue.extend(children[u].iter().copied());
        }
        if order.len() != n {
            let mut seen = vec![false; n];
            for &u in &order {
                seen[u] = true;
            }
            let stray = (0..n).find(|&u| !seen[u]).unwrap_or(0);
            return Err(Error::InvalidTree(format!(
                "cycle: vertex {stray} is not reachable from the root"
            )));
        }
        Ok(Self {
            parent,
            children,
            order,
        })
    }

    /// Parent array with `-1`-style roots encoded as `None`, from `i64` ids.
    pub fn from_signed_parents(parent: &[i64]) -> Result<Self> {
        let parent = parent
            .iter()
            .map(|&p| if p < 0 { None } else { Some(p as usize) })
            .collect();
        Self::from_parents(parent)
    }

    /// Linear tree `0 -> 1 -> ... -> n-1`.
    pub fn path(n: usize) -> Self {
        let parent = (0..n).map(|u| u.checked_sub(1)).collect();
        Self::from_parents(parent).expect("path topology is valid")
    }

    /// Root 0 with `leaves` children.
    pub fn star(leaves: usize) -> Self {
        let parent = (0..=leaves).map(|u| if u == 0 { None } else { Some(0) }).collect();
        Self::from_parents(parent).expect("star topology is valid")
    }

    /// Complete `arity`-ary tree with `n` vertices in heap order.
    pub fn complete(n: usize, arity: usize) -> Self {
        assert!(arity >= 1);
        let parent = (0..n).map(|u| if u == 0 { None } else { Some((u - 1) / arity) }).collect();
        Self::from_parents(parent).expect("complete tree topology is valid")
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.parent[u]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.children[u]
    }

    pub fn is_leaf(&self, u: usize) -> bool {
        self.children[u].is_empty()
    }

    /// Breadth-first order from the root.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Vertices of the complete subtree rooted at `u`, including `u`.
    pub fn subtree(&self, u: usize) -> Vec<usize> {
        let mut out = vec![u];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out
    }

    /// True if the topology is the path `0 -> 1 -> ... -> n-1`.
    pub fn is_path(&self) -> bool {
        self.parent
            .iter()
            .enumerate()
            .all(|(u, p)| *p == u.checked_sub(1))
    }
}

/// A tree topology with one observation vector per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedTree {
    topology: TreeTopology,
    num_variables: usize,
    values: Vec<u32>,
}

impl ObservedTree {
    /// `values` is row-major, `n x V`, aligned with vertex ids.
    pub fn new(topology: TreeTopology, num_variables: usize, values: Vec<u32>) -> Result<Self> {
        check_matrix(topology.len(), num_variables, &values)?;
        Ok(Self {
            topology,
            num_variables,
            values,
        })
    }

    pub fn univariate(topology: TreeTopology, values: &[u32]) -> Result<Self> {
        Self::new(topology, 1, values.to_vec())
    }

    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    pub fn len(&self) -> usize {
        self.topology.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topology.is_empty()
    }
}

impl Observations for ObservedTree {
    fn num_positions(&self) -> usize {
        self.len()
    }

    fn num_variables(&self) -> usize {
        self.num_variables
    }

    fn observation(&self, position: usize) -> &[u32] {
        let v = self.num_variables;
        &self.values[position * v..(position + 1) * v]
    }
}

//! Text formats for models, sequences and trees.
//!
//! * Model: JSON document matching [`ModelParts`].
//! * Sequences: one per line. Univariate steps are whitespace separated;
//!   multivariate steps are separated by `;` with variables separated by `,`.
//! * Trees: one vertex per line, `id<TAB>parent<TAB>v1[,v2,...]`, root parent
//!   `-1`. Several trees in one file are separated by blank lines.
//!
//! Blank lines and lines starting with `#` are ignored in sequence files.

use std::collections::HashMap;

use crate::data::{ObservedSequence, ObservedTree, Observations, TreeTopology};
use crate::error::{Error, Result};
use crate::model::{HmmModel, ModelParts};

pub fn parse_model(text: &str) -> Result<HmmModel> {
    let parts: ModelParts = serde_json::from_str(text)?;
    HmmModel::from_parts(parts)
}

pub fn serialize_model(model: &HmmModel) -> String {
    let mut s = serde_json::to_string_pretty(&model.to_parts()).expect("model parts serialize");
    s.push('\n');
    s
}

fn parse_value(token: &str, line: usize, index: usize) -> Result<u32> {
    token.trim().parse::<u32>().map_err(|_| Error::Parse {
        line,
        message: format!("token {index}: {token:?} is not a non-negative integer"),
    })
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Parses one sequence line; `line` is 1-based and used in messages.
pub fn parse_sequence_line(text: &str, line: usize) -> Result<ObservedSequence> {
    let text = text.trim();
    if text.contains(';') || text.contains(',') {
        let mut rows = Vec::new();
        let mut index = 0;
        for (step, chunk) in text.split(';').enumerate() {
            let row = chunk
                .split(',')
                .map(|tok| {
                    index += 1;
                    parse_value(tok, line, index)
                })
                .collect::<Result<Vec<u32>>>()?;
            if let Some(first) = rows.first().map(Vec::len) {
                if row.len() != first {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "step {step} has {} variables, expected {first}",
                            row.len()
                        ),
                    });
                }
            }
            rows.push(row);
        }
        ObservedSequence::from_rows(&rows)
    } else {
        let values = text
            .split_whitespace()
            .enumerate()
            .map(|(i, tok)| parse_value(tok, line, i + 1))
            .collect::<Result<Vec<u32>>>()?;
        ObservedSequence::univariate(&values)
    }
}

/// One sequence per non-blank line; all must have the same number of variables.
pub fn parse_sequences(text: &str) -> Result<Vec<ObservedSequence>> {
    let mut out: Vec<ObservedSequence> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if is_skipped(raw) {
            continue;
        }
        let seq = parse_sequence_line(raw, i + 1)?;
        if let Some(first) = out.first() {
            if first.num_variables() != seq.num_variables() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!(
                        "sequence has {} variables, earlier sequences have {}",
                        seq.num_variables(),
                        first.num_variables()
                    ),
                });
            }
        }
        out.push(seq);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no sequences found".into(),
        });
    }
    Ok(out)
}

fn join_row(row: &[u32], sep: &str) -> String {
    row.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

/// Inverse of [`parse_sequence_line`].
pub fn write_sequence(seq: &ObservedSequence) -> String {
    if seq.num_variables() == 1 {
        join_row(&seq.rows().map(|r| r[0]).collect::<Vec<_>>(), " ")
    } else {
        seq.rows().map(|r| join_row(r, ",")).collect::<Vec<_>>().join(";")
    }
}

struct TreeLine {
    line: usize,
    id: usize,
    parent: Option<usize>,
    values: Vec<u32>,
}

fn parse_tree_line(raw: &str, line: usize) -> Result<TreeLine> {
    let fields: Vec<&str> = raw.split_whitespace().collect();
    if fields.len() < 2 {
        return Err(Error::Parse {
            line,
            message: "expected vertex id, parent id and observed values".into(),
        });
    }
    let id = fields[0].parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("vertex id {:?} is not a non-negative integer", fields[0]),
    })?;
    let parent = match fields[1].parse::<i64>() {
        Ok(-1) => None,
        Ok(p) if p >= 0 => Some(p as usize),
        _ => {
            return Err(Error::Parse {
                line,
                message: format!("parent id {:?} must be -1 or a vertex id", fields[1]),
            })
        }
    };
    let mut values = Vec::new();
    let mut index = 0;
    for field in &fields[2..] {
        for tok in field.split(',').filter(|t| !t.is_empty()) {
            index += 1;
            values.push(parse_value(tok, line, index)?);
        }
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line,
            message: format!("vertex {id} has no observed values"),
        });
    }
    Ok(TreeLine {
        line,
        id,
        parent,
        values,
    })
}

fn build_tree(lines: Vec<TreeLine>) -> Result<ObservedTree> {
    let n = lines.len();
    let mut by_id: HashMap<usize, usize> = HashMap::with_capacity(n);
    for (k, l) in lines.iter().enumerate() {
        if by_id.insert(l.id, k).is_some() {
            return Err(Error::Parse {
                line: l.line,
                message: format!("duplicate vertex id {}", l.id),
            });
        }
    }
    let num_vars = lines[0].values.len();
    for l in &lines {
        if l.values.len() != num_vars {
            return Err(Error::Parse {
                line: l.line,
                message: format!(
                    "vertex {} has {} observed values, expected {num_vars}",
                    l.id,
                    l.values.len()
                ),
            });
        }
        if let Some(p) = l.parent {
            if !by_id.contains_key(&p) {
                return Err(Error::InvalidTree(format!(
                    "vertex {} has parent {p}, which does not exist",
                    l.id
                )));
            }
        }
    }
    // walk parent links; more than n steps means a cycle
    for l in &lines {
        let mut cur = l.parent;
        let mut steps = 0;
        while let Some(p) = cur {
            steps += 1;
            if steps > n {
                return Err(Error::InvalidTree(format!("cycle through vertex {}", l.id)));
            }
            cur = lines[by_id[&p]].parent;
        }
    }
    let roots: Vec<usize> = lines.iter().filter(|l| l.parent.is_none()).map(|l| l.id).collect();
    if roots.len() > 1 {
        return Err(Error::InvalidTree(format!("multiple roots: {roots:?}")));
    }
    if roots != [0] {
        return Err(Error::InvalidTree(format!(
            "root is vertex {}, expected vertex 0",
            roots[0]
        )));
    }
    if let Some(missing) = (0..n).find(|id| !by_id.contains_key(id)) {
        return Err(Error::InvalidTree(format!(
            "vertex ids must be 0..{}; id {missing} is missing",
            n - 1
        )));
    }
    let mut parent = vec![None; n];
    let mut values = vec![0u32; n * num_vars];
    for l in &lines {
        parent[l.id] = l.parent;
        values[l.id * num_vars..(l.id + 1) * num_vars].copy_from_slice(&l.values);
    }
    ObservedTree::new(TreeTopology::from_parents(parent)?, num_vars, values)
}

/// Parses trees separated by blank lines. Lines starting with `#` are ignored.
pub fn parse_forest(text: &str) -> Result<Vec<ObservedTree>> {
    let mut trees = Vec::new();
    let mut block = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            if !block.is_empty() {
                trees.push(build_tree(std::mem::take(&mut block))?);
            }
            continue;
        }
        block.push(parse_tree_line(raw, i + 1)?);
    }
    if !block.is_empty() {
        trees.push(build_tree(block)?);
    }
    if trees.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no tree vertices found".into(),
        });
    }
    if let Some(t) = trees.iter().find(|t| t.num_variables() != trees[0].num_variables()) {
        return Err(Error::InvalidArgument(format!(
            "trees disagree on the number of variables ({} vs {})",
            t.num_variables(),
            trees[0].num_variables()
        )));
    }
    Ok(trees)
}

/// Parses exactly one tree.
pub fn parse_tree(text: &str) -> Result<ObservedTree> {
    let mut trees = parse_forest(text)?;
    if trees.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "expected one tree, found {}",
            trees.len()
        )));
    }
    Ok(trees.remove(0))
}

/// Inverse of [`parse_tree`]: one line per vertex in id order.
pub fn write_tree(tree: &ObservedTree) -> String {
    let topo = tree.topology();
    let mut out = String::new();
    for u in 0..tree.len() {
        let parent = topo.parent(u).map_or("-1".to_string(), |p| p.to_string());
        out.push_str(&format!("{u}\t{parent}\t{}\n", join_row(tree.observation(u), ",")));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Chain,
    Tree,
}

/// Tree files contain tabs or a `-1` parent; sequence files never do.
pub fn detect_format(text: &str) -> DataFormat {
    let is_tree = text.lines().filter(|l| !is_skipped(l)).any(|l| {
        l.contains('\t') || l.split_whitespace().nth(1) == Some("-1")
    });
    if is_tree {
        DataFormat::Tree
    } else {
        DataFormat::Chain
    }
}

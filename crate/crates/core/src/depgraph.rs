//! Item reference graph and indirect need.
//!
//! An item indirectly needs an attachment if it, or any item reachable from
//! it along `uses` edges, directly needs it. Acyclicity of `uses` (checked by
//! validation) makes this a plain reachability union.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::corpus::{Attachment, Library};
use crate::elicitor::{NeedMode, NeedSet};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown item `{0}`")]
    UnknownItem(String),
    #[error("no direct need set for item `{0}`")]
    MissingDirectEntry(String),
    #[error("uses graph has a cycle through `{0}`")]
    Cycle(String),
}

/// Nodes are items; an edge `(i, j)` means item `i` uses item `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<Vec<usize>>,
}

/// One node per item, one edge per `uses` reference. Unknown targets are
/// skipped; validation reports them.
pub fn build_graph(lib: &Library) -> DependencyGraph {
    let ids: Vec<String> = lib.items.iter().map(|i| i.id.clone()).collect();
    let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
    let succ = lib
        .items
        .iter()
        .map(|item| item.uses.iter().filter_map(|u| index.get(u).copied()).collect())
        .collect();
    DependencyGraph { ids, index, succ }
}

impl DependencyGraph {
    pub fn nodes(&self) -> &[String] {
        &self.ids
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, out)| out.iter().map(move |&j| (self.ids[i].clone(), self.ids[j].clone())))
            .collect()
    }

    fn node(&self, id: &str) -> Result<usize, GraphError> {
        self.index.get(id).copied().ok_or_else(|| GraphError::UnknownItem(id.to_string()))
    }

    /// Items reachable from `id`, including `id` itself.
    pub fn reachable(&self, id: &str) -> Result<BTreeSet<String>, GraphError> {
        let start = self.node(id)?;
        let mut seen = vec![false; self.ids.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(n) = stack.pop() {
            for &m in &self.succ[n] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        Ok(seen.iter().enumerate().filter(|(_, s)| **s).map(|(i, _)| self.ids[i].clone()).collect())
    }

    /// Nodes ordered so that every item comes after all items it uses.
    fn dependency_order(&self) -> Result<Vec<usize>, GraphError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Fresh,
            Open,
            Done,
        }
        let mut marks = vec![Mark::Fresh; self.ids.len()];
        let mut order = Vec::with_capacity(self.ids.len());
        for root in 0..self.ids.len() {
            if marks[root] != Mark::Fresh {
                continue;
            }
            marks[root] = Mark::Open;
            let mut stack = vec![(root, 0usize)];
            while let Some(&mut (n, ref mut pos)) = stack.last_mut() {
                if let Some(&m) = self.succ[n].get(*pos) {
                    *pos += 1;
                    match marks[m] {
                        Mark::Fresh => {
                            marks[m] = Mark::Open;
                            stack.push((m, 0));
                        }
                        Mark::Open => return Err(GraphError::Cycle(self.ids[m].clone())),
                        Mark::Done => {}
                    }
                } else {
                    marks[n] = Mark::Done;
                    order.push(n);
                    stack.pop();
                }
            }
        }
        Ok(order)
    }
}

fn direct_pairs<'a>(direct: &'a BTreeMap<String, NeedSet>, id: &str) -> Result<&'a BTreeSet<Attachment>, GraphError> {
    direct.get(id).map(|n| &n.pairs).ok_or_else(|| GraphError::MissingDirectEntry(id.to_string()))
}

/// Indirect needs of one item: the union of the direct needs of everything
/// reachable from it.
pub fn indirect_needs(
    item: &str,
    graph: &DependencyGraph,
    direct: &BTreeMap<String, NeedSet>,
) -> Result<NeedSet, GraphError> {
    let mut out = NeedSet::new(item, NeedMode::Indirect);
    for id in graph.reachable(item)? {
        out.pairs.extend(direct_pairs(direct, &id)?.iter().cloned());
    }
    Ok(out)
}

/// Indirect needs of every item, computed once per node in dependency order
/// from the already-closed sets of its successors.
pub fn indirect_closure(
    graph: &DependencyGraph,
    direct: &BTreeMap<String, NeedSet>,
) -> Result<BTreeMap<String, NeedSet>, GraphError> {
    let mut closed: Vec<Option<BTreeSet<Attachment>>> = vec![None; graph.ids.len()];
    for n in graph.dependency_order()? {
        let mut pairs = direct_pairs(direct, &graph.ids[n])?.clone();
        for &m in &graph.succ[n] {
            pairs.extend(closed[m].as_ref().expect("successor closed first").iter().cloned());
        }
        closed[n] = Some(pairs);
    }
    Ok(graph
        .ids
        .iter()
        .zip(closed)
        .map(|(id, pairs)| {
            let pairs = pairs.expect("every node closed");
            (id.clone(), NeedSet { item: id.clone(), pairs, mode: NeedMode::Indirect })
        })
        .collect())
}

//! Ordering of lyph slots inside a host to minimize link crossings.
//!
//! Slots sit in a row. Each slot item is joined by edges to positions on a
//! fixed reference row (for a chain, the level index of the lyph in the
//! chain). Two edges cross when their ends appear in opposite order on the
//! two rows.

use std::collections::BTreeMap;

use crate::id::Identifier;
use crate::model::{Model, ResourceClass};

/// Largest instance solved by exhaustive search.
pub const EXACT_LIMIT: usize = 8;

/// A one-sided crossing minimization instance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrossingInstance {
    /// Fixed-row positions each item is joined to.
    pub edges: Vec<Vec<f64>>,
}

impl CrossingInstance {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Crossings contributed by placing item `i` anywhere before item `j`.
    pub fn pair_cost(&self, i: usize, j: usize) -> usize {
        let mut c = 0;
        for &a in &self.edges[i] {
            for &b in &self.edges[j] {
                if a > b {
                    c += 1;
                }
            }
        }
        c
    }

    /// Total crossings of `order` (item per slot).
    pub fn crossings(&self, order: &[usize]) -> usize {
        let mut total = 0;
        for (p, &i) in order.iter().enumerate() {
            for &j in &order[p + 1..] {
                total += self.pair_cost(i, j);
            }
        }
        total
    }
}

/// An order with minimal crossings for up to [`EXACT_LIMIT`] items (the
/// lexicographically first among the optimal ones), else the better of the
/// identity and a barycenter order refined by adjacent swaps.
pub fn order_slots(inst: &CrossingInstance) -> Vec<usize> {
    let n = inst.len();
    let cost: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| inst.pair_cost(i, j)).collect())
        .collect();
    if n <= EXACT_LIMIT {
        exact(&cost)
    } else {
        heuristic(inst, &cost)
    }
}

fn exact(cost: &[Vec<usize>]) -> Vec<usize> {
    let n = cost.len();
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search(cost, &mut order, &mut used, 0, &mut best);
    best.map(|(_, o)| o).unwrap_or_default()
}

/// Depth-first enumeration in lexicographic order, pruned by the best
/// total so far (a strictly better total is required to replace it).
fn search(
    cost: &[Vec<usize>],
    order: &mut Vec<usize>,
    used: &mut [bool],
    acc: usize,
    best: &mut Option<(usize, Vec<usize>)>,
) {
    if best.as_ref().is_some_and(|(b, _)| acc >= *b) {
        return;
    }
    if order.len() == cost.len() {
        *best = Some((acc, order.clone()));
        return;
    }
    for i in 0..cost.len() {
        if used[i] {
            continue;
        }
        let add: usize = order.iter().map(|&p| cost[p][i]).sum();
        used[i] = true;
        order.push(i);
        search(cost, order, used, acc + add, best);
        order.pop();
        used[i] = false;
    }
}

fn total(cost: &[Vec<usize>], order: &[usize]) -> usize {
    let mut t = 0;
    for (p, &i) in order.iter().enumerate() {
        for &j in &order[p + 1..] {
            t += cost[i][j];
        }
    }
    t
}

fn heuristic(inst: &CrossingInstance, cost: &[Vec<usize>]) -> Vec<usize> {
    let n = inst.len();
    let identity: Vec<usize> = (0..n).collect();
    let bary = |i: usize| {
        let e = &inst.edges[i];
        if e.is_empty() {
            i as f64
        } else {
            e.iter().sum::<f64>() / e.len() as f64
        }
    };
    let mut order = identity.clone();
    order.sort_by(|&a, &b| bary(a).total_cmp(&bary(b)).then(a.cmp(&b)));
    loop {
        let mut improved = false;
        for p in 0..n.saturating_sub(1) {
            let (i, j) = (order[p], order[p + 1]);
            if cost[j][i] < cost[i][j] {
                order.swap(p, p + 1);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    if total(cost, &order) <= total(cost, &identity) {
        order
    } else {
        identity
    }
}

/// Lyphs hosted by `host` (a lyph's internal lyphs, or a region's hosted
/// lyphs) in an order that minimizes crossings of `chain`'s levels.
/// Lyphs of the host that the chain does not convey have no edges.
pub fn order_chain_in_host(
    model: &Model,
    chain: &Identifier,
    host: &Identifier,
) -> Vec<Identifier> {
    let Some(h) = model.get_as(host, &[ResourceClass::Lyph, ResourceClass::Region]) else {
        return Vec::new();
    };
    let slots: Vec<Identifier> = match h.class {
        ResourceClass::Lyph => h.references("internalLyphs").to_vec(),
        _ => h.references("hostedLyphs").to_vec(),
    };
    let mut level_of: BTreeMap<Identifier, f64> = BTreeMap::new();
    if let Some(c) = model.get_in(chain, ResourceClass::Chain) {
        for (k, l) in c.references("levels").iter().enumerate() {
            if let Some(lyph) = model
                .get_in(l, ResourceClass::Link)
                .and_then(|l| l.reference("conveyingLyph"))
            {
                let key = model
                    .get(lyph)
                    .map(|r| r.id.clone())
                    .unwrap_or_else(|| lyph.clone());
                level_of.entry(key).or_insert(k as f64);
            }
        }
    }
    let inst = CrossingInstance {
        edges: slots
            .iter()
            .map(|s| {
                let key = model
                    .get(s)
                    .map(|r| r.id.clone())
                    .unwrap_or_else(|| s.clone());
                level_of.get(&key).map(|&k| vec![k]).unwrap_or_default()
            })
            .collect(),
    };
    order_slots(&inst)
        .into_iter()
        .map(|i| slots[i].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching(targets: &[f64]) -> CrossingInstance {
        CrossingInstance {
            edges: targets.iter().map(|&t| vec![t]).collect(),
        }
    }

    #[test]
    fn planar_is_identity() {
        let inst = matching(&[0.0, 1.0, 2.0]);
        assert_eq!(order_slots(&inst), vec![0, 1, 2]);
        assert_eq!(inst.crossings(&[0, 1, 2]), 0);
    }

    #[test]
    fn reversed_is_reversed() {
        let inst = matching(&[3.0, 2.0, 1.0, 0.0]);
        assert_eq!(inst.crossings(&[0, 1, 2, 3]), 6);
        let o = order_slots(&inst);
        assert_eq!(o, vec![3, 2, 1, 0]);
        assert_eq!(inst.crossings(&o), 0);
    }

    #[test]
    fn heuristic_never_worse() {
        let inst = CrossingInstance {
            edges: (0..10)
                .map(|i| vec![((i * 7) % 10) as f64, ((i * 3) % 10) as f64])
                .collect(),
        };
        let ident: Vec<usize> = (0..10).collect();
        assert!(inst.crossings(&order_slots(&inst)) <= inst.crossings(&ident));
    }
}

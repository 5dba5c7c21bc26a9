use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Simple undirected graph over nodes `0..node_count`.
///
/// Edges are stored canonically as `(min, max)` pairs, so `(i, j)` and
/// `(j, i)` denote the same edge. Self-loops are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyGraph {
    node_count: usize,
    edges: BTreeSet<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl AdjacencyGraph {
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if node_count == 0 {
            return Err(Error::Topology("graph must have at least one node".into()));
        }
        let mut canon = BTreeSet::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::Topology(format!("self-loop at node {i}")));
            }
            if i >= node_count || j >= node_count {
                return Err(Error::Topology(format!(
                    "edge ({i}, {j}) out of range for {node_count} nodes"
                )));
            }
            canon.insert((i.min(j), i.max(j)));
        }
        let mut neighbors = vec![Vec::new(); node_count];
        for &(i, j) in &canon {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            node_count,
            edges: canon,
            neighbors,
        })
    }

    /// Graph without edges.
    pub fn isolated(node_count: usize) -> Result<Self> {
        Self::new(node_count, std::iter::empty())
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; every node is joined to its two
    /// nearest neighbours. Requires `n >= 3`.
    pub fn ring(node_count: usize) -> Result<Self> {
        if node_count < 3 {
            return Err(Error::Topology(format!(
                "ring needs at least 3 nodes, got {node_count}"
            )));
        }
        Self::new(
            node_count,
            (0..node_count).map(|i| (i, (i + 1) % node_count)),
        )
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn line(node_count: usize) -> Result<Self> {
        Self::new(node_count, (1..node_count).map(|i| (i - 1, i)))
    }

    pub fn complete(node_count: usize) -> Result<Self> {
        Self::new(
            node_count,
            (0..node_count).flat_map(|i| (i + 1..node_count).map(move |j| (i, j))),
        )
    }

    /// Star with node 0 as the centre and `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(i, j)` pairs with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbors[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == self.node_count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_are_canonical() {
        let g = AdjacencyGraph::new(3, [(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(AdjacencyGraph::new(3, [(1, 1)]).is_err());
        assert!(AdjacencyGraph::new(3, [(0, 3)]).is_err());
        assert!(AdjacencyGraph::new(0, []).is_err());
        assert!(AdjacencyGraph::ring(2).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(AdjacencyGraph::ring(5).unwrap().is_connected());
        assert!(AdjacencyGraph::isolated(1).unwrap().is_connected());
        assert!(!AdjacencyGraph::isolated(2).unwrap().is_connected());
        assert!(!AdjacencyGraph::new(4, [(0, 1), (2, 3)])
            .unwrap()
            .is_connected());
    }

    #[test]
    fn family_degrees() {
        assert_eq!(AdjacencyGraph::complete(5).unwrap().edge_count(), 10);
        assert_eq!(AdjacencyGraph::star(3).unwrap().max_degree(), 3);
        let ring = AdjacencyGraph::ring(6).unwrap();
        assert!((0..6).all(|i| ring.degree(i) == 2));
    }
}

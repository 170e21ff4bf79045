//! Simple directed graphs with sorted successor and predecessor lists.

use thiserror::Error;

/// Dense vertex index, always `< vertex_count` of the owning graph.
pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0} is not allowed in a simple directed graph")]
    SelfLoop(VertexId),
    #[error("edge ({src}, {dst}) references a vertex outside 0..{vertex_count}")]
    VertexOutOfRange {
        src: VertexId,
        dst: VertexId,
        vertex_count: usize,
    },
    #[error("edge ({0}, {1}) occurs more than once")]
    DuplicateEdge(VertexId, VertexId),
}

/// A simple directed graph: no self-loops, at most one edge per ordered pair.
///
/// Adjacency lists are kept sorted so that coface candidates can be found by
/// merging lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    successors: Vec<Vec<VertexId>>,
    predecessors: Vec<Vec<VertexId>>,
    edge_count: usize,
}

impl DirectedGraph {
    pub fn empty(vertex_count: usize) -> Self {
        Self {
            successors: vec![Vec::new(); vertex_count],
            predecessors: vec![Vec::new(); vertex_count],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, out-of-range
    /// endpoints and repeated edges.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut graph = Self::empty(vertex_count);
        for (src, dst) in edges {
            if src as usize >= vertex_count || dst as usize >= vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    src,
                    dst,
                    vertex_count,
                });
            }
            if src == dst {
                return Err(GraphError::SelfLoop(src));
            }
            graph.successors[src as usize].push(dst);
            graph.predecessors[dst as usize].push(src);
        }
        for list in graph.successors.iter_mut() {
            list.sort_unstable();
        }
        for list in graph.predecessors.iter_mut() {
            list.sort_unstable();
        }
        for (src, list) in graph.successors.iter().enumerate() {
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(src as VertexId, w[0]));
            }
            graph.edge_count += list.len();
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.successors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.successors[v as usize]
    }

    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.predecessors[v as usize]
    }

    pub fn has_edge(&self, src: VertexId, dst: VertexId) -> bool {
        self.successors
            .get(src as usize)
            .is_some_and(|list| list.binary_search(&dst).is_ok())
    }

    /// All edges in ascending `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(src, list)| list.iter().map(move |&dst| (src as VertexId, dst)))
    }
}

/// Intersects two ascending lists into `out`.
pub(crate) fn intersect_sorted(a: &[VertexId], b: &[VertexId], out: &mut Vec<VertexId>) {
    out.clear();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
}

/// Retains the elements of `acc` that also occur in the ascending list `other`.
pub(crate) fn retain_sorted(acc: &mut Vec<VertexId>, other: &[VertexId]) {
    let mut y = 0;
    acc.retain(|&v| {
        while y < other.len() && other[y] < v {
            y += 1;
        }
        y < other.len() && other[y] == v
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_consistent() {
        let g = DirectedGraph::from_edges(4, [(2, 0), (0, 1), (0, 3), (3, 1)]).unwrap();
        assert_eq!(g.successors(0), &[1, 3]);
        assert_eq!(g.predecessors(1), &[0, 3]);
        assert_eq!(g.edge_count(), 4);
        for (u, v) in g.edges() {
            assert!(g.predecessors(v).contains(&u));
        }
        assert!(g.has_edge(2, 0));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn rejects_self_loop() {
        assert_eq!(
            DirectedGraph::from_edges(3, [(0, 1), (2, 2)]),
            Err(GraphError::SelfLoop(2))
        );
    }

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert_eq!(
            DirectedGraph::from_edges(3, [(0, 1), (0, 1)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            DirectedGraph::from_edges(2, [(0, 5)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn reciprocal_edges_are_allowed() {
        let g = DirectedGraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn sorted_intersection() {
        let mut out = Vec::new();
        intersect_sorted(&[1, 3, 5, 7], &[2, 3, 7, 9], &mut out);
        assert_eq!(out, vec![3, 7]);
        let mut acc = vec![1, 3, 5, 7];
        retain_sorted(&mut acc, &[0, 5, 7]);
        assert_eq!(acc, vec![5, 7]);
    }
}

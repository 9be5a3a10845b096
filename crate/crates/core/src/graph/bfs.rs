use std::collections::VecDeque;

use serde::Serialize;

use super::{Graph, GraphError, VertexId};

/// Spheres `S_n(root)` by graph distance. Vertices outside the root's
/// component are listed in `unreachable`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SphereDecomposition {
    pub root: VertexId,
    pub spheres: Vec<Vec<VertexId>>,
    pub unreachable: Vec<VertexId>,
    #[serde(skip)]
    radius: Vec<Option<usize>>,
}

impl SphereDecomposition {
    pub fn sizes(&self) -> Vec<u64> {
        self.spheres.iter().map(|s| s.len() as u64).collect()
    }

    /// `|x|`, the distance of `x` from the root.
    pub fn radius(&self, v: VertexId) -> Option<usize> {
        self.radius.get(v.0).copied().flatten()
    }

    pub fn depth(&self) -> usize {
        self.spheres.len().saturating_sub(1)
    }
}

pub fn bfs_spheres(g: &Graph, root: VertexId) -> Result<SphereDecomposition, GraphError> {
    if !g.contains(root) {
        return Err(GraphError::VertexOutOfRange {
            vertex: root.0,
            vertex_count: g.vertex_count(),
        });
    }
    let mut radius = vec![None; g.vertex_count()];
    let mut spheres: Vec<Vec<VertexId>> = vec![vec![root]];
    radius[root.0] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let r = radius[u.0].expect("queued vertices have a radius");
        for &w in g.neighbors(u)? {
            if radius[w.0].is_none() {
                radius[w.0] = Some(r + 1);
                if spheres.len() == r + 1 {
                    spheres.push(Vec::new());
                }
                spheres[r + 1].push(w);
                queue.push_back(w);
            }
        }
    }
    for s in &mut spheres {
        s.sort_unstable();
    }
    let unreachable = g.vertices().filter(|v| radius[v.0].is_none()).collect();
    Ok(SphereDecomposition {
        root,
        spheres,
        unreachable,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::antitree::{build_antitree, AntitreeSpec};

    #[test]
    fn path_spheres() {
        let d = bfs_spheres(&Graph::path(3), VertexId(0)).unwrap();
        assert_eq!(
            d.spheres,
            vec![vec![VertexId(0)], vec![VertexId(1)], vec![VertexId(2)]]
        );
        assert!(d.unreachable.is_empty());
        assert_eq!(d.radius(VertexId(2)), Some(2));
    }

    #[test]
    fn antitree_inverse() {
        let g = build_antitree(&AntitreeSpec::explicit(vec![1, 2, 3]).unwrap()).unwrap();
        assert_eq!(bfs_spheres(&g, VertexId(0)).unwrap().sizes(), vec![1, 2, 3]);
    }

    #[test]
    fn unreachable_listed() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        let d = bfs_spheres(&g, VertexId(1)).unwrap();
        assert_eq!(d.sizes(), vec![1, 1]);
        assert_eq!(d.unreachable, vec![VertexId(2), VertexId(3), VertexId(4)]);
        assert_eq!(d.radius(VertexId(3)), None);
        assert!(bfs_spheres(&g, VertexId(5)).is_err());
    }
}

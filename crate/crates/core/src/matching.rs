//! Maximum bipartite matching by augmenting paths, with a deficiency
//! witness recovered from the final alternating-reachability cut.

/// Left vertices 0..left, right vertices 0..right, edges as per-left
/// adjacency lists. Vertex order is the iteration order, so runs are
/// deterministic for equal inputs.
#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, adj: Vec<Vec<usize>>) -> Self {
        assert_eq!(adj.len(), left);
        debug_assert!(adj.iter().flatten().all(|&y| y < right));
        BipartiteGraph { left, right, adj }
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }
}

#[derive(Clone, Debug)]
pub struct Matching {
    /// Partner of each left vertex.
    pub pairing: Vec<Option<usize>>,
    pub size: usize,
}

impl Matching {
    pub fn is_perfect(&self) -> bool {
        self.size == self.pairing.len()
    }
}

pub fn maximum_matching(g: &BipartiteGraph) -> Matching {
    let mut left_of: Vec<Option<usize>> = vec![None; g.right];
    let mut size = 0;
    for x in 0..g.left {
        let mut visited = vec![false; g.right];
        if try_augment(g, x, &mut visited, &mut left_of) {
            size += 1;
        }
    }
    let mut pairing = vec![None; g.left];
    for (y, owner) in left_of.iter().enumerate() {
        if let Some(x) = owner {
            pairing[*x] = Some(y);
        }
    }
    Matching { pairing, size }
}

fn try_augment(
    g: &BipartiteGraph,
    x: usize,
    visited: &mut [bool],
    left_of: &mut [Option<usize>],
) -> bool {
    for &y in &g.adj[x] {
        if visited[y] {
            continue;
        }
        visited[y] = true;
        if left_of[y].is_none() || try_augment(g, left_of[y].unwrap(), visited, left_of) {
            left_of[y] = Some(x);
            return true;
        }
    }
    false
}

/// A set of left vertices whose joint neighborhood is strictly smaller.
#[derive(Clone, Debug)]
pub struct DeficiencyWitness {
    pub left_set: Vec<usize>,
    pub neighborhood: Vec<usize>,
}

/// Extract a Hall violator from a maximum matching, if one exists. Starting
/// from the smallest unmatched left vertex, alternating reachability closes
/// up on a left set S with N(S) exactly the reached right set, one short.
pub fn deficiency_witness(g: &BipartiteGraph, matching: &Matching) -> Option<DeficiencyWitness> {
    let start = matching.pairing.iter().position(Option::is_none)?;
    let mut left_of: Vec<Option<usize>> = vec![None; g.right];
    for (x, y) in matching.pairing.iter().enumerate() {
        if let Some(y) = y {
            left_of[*y] = Some(x);
        }
    }
    let mut left_seen = vec![false; g.left];
    let mut right_seen = vec![false; g.right];
    left_seen[start] = true;
    let mut queue = vec![start];
    while let Some(x) = queue.pop() {
        for &y in &g.adj[x] {
            if right_seen[y] {
                continue;
            }
            right_seen[y] = true;
            // every reached right vertex is matched, or the matching would
            // admit one more augmenting path
            let partner = left_of[y].expect("matching is maximum");
            if !left_seen[partner] {
                left_seen[partner] = true;
                queue.push(partner);
            }
        }
    }
    let left_set: Vec<usize> = (0..g.left).filter(|&x| left_seen[x]).collect();
    let neighborhood: Vec<usize> = (0..g.right).filter(|&y| right_seen[y]).collect();
    debug_assert!(neighborhood.len() + 1 == left_set.len());
    Some(DeficiencyWitness {
        left_set,
        neighborhood,
    })
}

/// Independent recheck that the witness's neighborhood claim is right and
/// strictly deficient.
pub fn verify_deficiency(g: &BipartiteGraph, w: &DeficiencyWitness) -> bool {
    let mut reached = vec![false; g.right];
    for &x in &w.left_set {
        if x >= g.left {
            return false;
        }
        for &y in &g.adj[x] {
            reached[y] = true;
        }
    }
    let actual: Vec<usize> = (0..g.right).filter(|&y| reached[y]).collect();
    actual == w.neighborhood && actual.len() < w.left_set.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(left: usize, right: usize, edges: &[(usize, usize)]) -> BipartiteGraph {
        let mut adj = vec![Vec::new(); left];
        for &(x, y) in edges {
            adj[x].push(y);
        }
        BipartiteGraph::new(left, right, adj)
    }

    #[test]
    fn perfect_matching_found() {
        let g = graph(3, 3, &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)]);
        let m = maximum_matching(&g);
        assert_eq!(m.size, 3);
        assert!(m.is_perfect());
        assert!(deficiency_witness(&g, &m).is_none());
    }

    #[test]
    fn crowded_left_side_yields_a_violator() {
        // three left vertices share two right vertices
        let g = graph(3, 3, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]);
        let m = maximum_matching(&g);
        assert_eq!(m.size, 2);
        let w = deficiency_witness(&g, &m).unwrap();
        assert!(verify_deficiency(&g, &w));
        assert_eq!(w.left_set.len(), 3);
        assert_eq!(w.neighborhood, vec![0, 1]);
    }

    #[test]
    fn isolated_vertex_is_its_own_violator() {
        let g = graph(2, 2, &[(0, 0), (0, 1)]);
        let m = maximum_matching(&g);
        assert_eq!(m.size, 1);
        let w = deficiency_witness(&g, &m).unwrap();
        assert!(verify_deficiency(&g, &w));
        assert_eq!(w.left_set, vec![1]);
        assert!(w.neighborhood.is_empty());
    }

    #[test]
    fn augmenting_rewires_earlier_choices() {
        // greedy would strand vertex 2; augmentation must reroute 0
        let g = graph(3, 3, &[(0, 0), (0, 1), (1, 0), (2, 1), (2, 2)]);
        let m = maximum_matching(&g);
        assert_eq!(m.size, 3);
    }

    #[test]
    fn determinism_across_runs() {
        let g = graph(4, 4, &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 0)]);
        let a = maximum_matching(&g);
        let b = maximum_matching(&g);
        assert_eq!(a.pairing, b.pairing);
    }

    #[test]
    fn tampered_witness_rejected() {
        let g = graph(3, 3, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]);
        let m = maximum_matching(&g);
        let mut w = deficiency_witness(&g, &m).unwrap();
        w.left_set.pop();
        assert!(!verify_deficiency(&g, &w));
    }
}

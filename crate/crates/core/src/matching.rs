//! Maximum bipartite matching by augmenting paths.

/// Maximum matching of a bipartite graph given as adjacency lists from the
/// left side (`adj[l]` lists right vertices `< right`). Returns `(l, r)`
/// pairs sorted by `l`.
pub fn maximum_matching(adj: &[Vec<usize>], right: usize) -> Vec<(usize, usize)> {
    let mut owner = vec![usize::MAX; right];
    for l in 0..adj.len() {
        let mut visited = vec![false; right];
        augment(adj, l, &mut owner, &mut visited);
    }
    let mut pairs: Vec<(usize, usize)> =
        owner.iter().enumerate().filter(|(_, &l)| l != usize::MAX).map(|(r, &l)| (l, r)).collect();
    pairs.sort_unstable();
    pairs
}

fn augment(adj: &[Vec<usize>], l: usize, owner: &mut [usize], visited: &mut [bool]) -> bool {
    for &r in &adj[l] {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        if owner[r] == usize::MAX || augment(adj, owner[r], owner, visited) {
            owner[r] = l;
            return true;
        }
    }
    false
}

//! Maximum bipartite matching (Hopcroft–Karp).

/// Maximum matching between `0..adj.len()` on the left and `0..right` on the right.
/// Neighbours are scanned in the order given, so sorted lists give a
/// lowest-index-first tie-break. Returns the right partner of each left vertex.
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut mate_l: Vec<Option<usize>> = vec![None; left];
    let mut mate_r: Vec<Option<usize>> = vec![None; right];
    let mut dist = vec![usize::MAX; left];
    loop {
        let mut queue = Vec::new();
        for u in 0..left {
            if mate_l[u].is_none() {
                dist[u] = 0;
                queue.push(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                match mate_r[v] {
                    None => found = true,
                    Some(w) if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; left];
        for u in 0..left {
            if mate_l[u].is_none() {
                augment(u, adj, &mut mate_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }
    mate_l
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [Option<usize>],
    mate_r: &mut [Option<usize>],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    while next[u] < adj[u].len() {
        let v = adj[u][next[u]];
        next[u] += 1;
        let ok = match mate_r[v] {
            None => true,
            Some(w) => dist[w] == dist[u] + 1 && augment(w, adj, mate_l, mate_r, dist, next),
        };
        if ok {
            mate_l[u] = Some(v);
            mate_r[v] = Some(u);
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

pub fn matching_size(m: &[Option<usize>]) -> usize {
    m.iter().filter(|x| x.is_some()).count()
}

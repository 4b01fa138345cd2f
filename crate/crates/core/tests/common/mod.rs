//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rainham::{ColoredFamily, Graph};

/// All permutations of `0..k` (Heap's algorithm).
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn heap(a: &mut Vec<usize>, m: usize, out: &mut Vec<Vec<usize>>) {
        if m <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..m {
            heap(a, m - 1, out);
            let j = if m % 2 == 0 { i } else { 0 };
            a.swap(j, m - 1);
        }
    }
    let mut out = Vec::new();
    heap(&mut (0..k).collect(), k, &mut out);
    out
}

/// Counts (Hamilton cycle, bijection) pairs by enumerating vertex orders and color orders.
pub fn brute_count(f: &ColoredFamily) -> u64 {
    let n = f.n();
    let color_orders = permutations(n);
    let mut total = 0;
    for rest in permutations(n - 1) {
        let order: Vec<usize> = std::iter::once(0).chain(rest.iter().map(|x| x + 1)).collect();
        if order[1] > order[n - 1] {
            continue;
        }
        for cols in &color_orders {
            if (0..n).all(|i| f.has(cols[i], order[i], order[(i + 1) % n])) {
                total += 1;
            }
        }
    }
    total
}

/// Whether any transversal exists, by the same enumeration with early exit.
pub fn brute_exists(f: &ColoredFamily) -> bool {
    let n = f.n();
    let color_orders = permutations(n);
    permutations(n - 1).iter().any(|rest| {
        let order: Vec<usize> = std::iter::once(0).chain(rest.iter().map(|x| x + 1)).collect();
        color_orders.iter().any(|cols| (0..n).all(|i| f.has(cols[i], order[i], order[(i + 1) % n])))
    })
}

pub fn half_set_masks(n: usize) -> impl Iterator<Item = u32> {
    (0u32..(1 << n)).filter(move |m| {
        let k = m.count_ones() as usize;
        2 * k + 1 >= n && 2 * k <= n + 1
    })
}

/// `(e(A), e(Ā), e(A,Ā))` by scanning every pair.
pub fn split(g: &Graph, mask: u32) -> (u64, u64, u64) {
    let n = g.n();
    let (mut a, mut b, mut x) = (0, 0, 0);
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) {
                match (mask >> u & 1, mask >> v & 1) {
                    (1, 1) => a += 1,
                    (0, 0) => b += 1,
                    _ => x += 1,
                }
            }
        }
    }
    (a, b, x)
}

/// `r(G)` over every half-set and every odd color subset.
pub fn brute_r(f: &ColoredFamily) -> u64 {
    let m = f.m();
    let mut best = u64::MAX;
    for mask in half_set_masks(f.n()) {
        let costs: Vec<(u64, u64)> = f.colors().iter().map(|g| {
            let (a, b, x) = split(g, mask);
            (a + b, x)
        }).collect();
        for c in 0u32..(1 << m) {
            if c.count_ones() % 2 == 1 {
                let v: u64 = (0..m).map(|i| if c >> i & 1 == 1 { costs[i].0 } else { costs[i].1 }).sum();
                best = best.min(v);
            }
        }
    }
    best
}

/// `min_A Σ_i min{e_i(A), e_i(A,Ā)}` over half-sets.
pub fn brute_extremal_value(f: &ColoredFamily) -> u64 {
    half_set_masks(f.n())
        .map(|mask| f.colors().iter().map(|g| {
            let (a, _, x) = split(g, mask);
            a.min(x)
        }).sum())
        .min()
        .unwrap()
}

/// Maximum bipartite matching size by Kuhn's algorithm.
pub fn kuhn(adj: &[Vec<usize>], right: usize) -> usize {
    fn try_kuhn(u: usize, adj: &[Vec<usize>], seen: &mut [bool], mate: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if mate[v].is_none() || try_kuhn(mate[v].unwrap(), adj, seen, mate) {
                    mate[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut mate = vec![None; right];
    (0..adj.len()).filter(|&u| try_kuhn(u, adj, &mut vec![false; right], &mut mate)).count()
}

/// Hamilton cycle of `g` through every edge of `forced`, by enumeration (n ≤ 10).
pub fn brute_ham_through(g: &Graph, forced: &[(usize, usize)]) -> bool {
    let n = g.n();
    let mut h = g.clone();
    for &(u, v) in forced {
        h.add_edge(u, v);
    }
    permutations(n - 1).iter().any(|rest| {
        let order: Vec<usize> = std::iter::once(0).chain(rest.iter().map(|x| x + 1)).collect();
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
        edges.iter().all(|&(u, v)| h.has_edge(u, v))
            && forced.iter().all(|&(a, b)| edges.iter().any(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a)))
    })
}

/// Transversal check written against the definition: Hamilton cycle on `0..n`,
/// colors a bijection onto `0..m`, each edge present in its color.
pub fn is_transversal(f: &ColoredFamily, t: &rainham::Transversal) -> bool {
    let n = f.n();
    let mut vs = t.vertices.clone();
    vs.sort_unstable();
    let mut cs = t.colors.clone();
    cs.sort_unstable();
    t.closed
        && vs == (0..n).collect::<Vec<_>>()
        && cs == (0..f.m()).collect::<Vec<_>>()
        && f.m() == n
        && (0..n).all(|i| f.has(t.colors[i], t.vertices[i], t.vertices[(i + 1) % n]))
}

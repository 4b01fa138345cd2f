//! Hamilton paths of `𝔾^{-i}` joining the ends of a witness edge.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::bipartite::sample_bipartite_path;
use super::cleanup::{near_bipartite_colors, set_of, validate_bipartite_frame, BipartiteFrame, Ctx, ExtremalParams};
use super::eligible::{Forest, Scope};
use super::PathMode;
use crate::error::{retries, Error, Result};
use crate::extremal::HalfSetCertificate;
use crate::family::ColoredFamily;
use crate::graph::{Graph, VertexSet};
use crate::rng::{self, derive_seed};
use crate::transversal::Transversal;

/// Edge `e` of color `i` with `i ∈ C` and `e` inside a side, or `i ∉ C` and `e` crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub edge: (usize, usize),
    pub color: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalPath {
    /// Hamilton path from `witness.edge.0` to `witness.edge.1` using every color but `witness.color`.
    pub path: Transversal,
    pub witness: Witness,
    pub prefix_len: usize,
    pub mode: PathMode,
    pub notes: Vec<String>,
    pub attempts: usize,
}

fn odd_set(cert: &HalfSetCertificate, m: usize) -> Result<Vec<bool>> {
    let c = cert.c.as_ref().ok_or_else(|| Error::Precondition("certificate has no color set".into()))?;
    let mut in_c = vec![false; m];
    for &x in c {
        if x >= m {
            return Err(Error::Precondition(format!("color {x} out of range")));
        }
        in_c[x] = true;
    }
    Ok(in_c)
}

/// `G_j[A,Ā]` for `j ∈ C`, `G_j` minus `A×Ā` otherwise; color `i` is emptied.
pub fn restricted_family(f: &ColoredFamily, cert: &HalfSetCertificate, i: usize) -> Result<ColoredFamily> {
    let n = f.n();
    let in_c = odd_set(cert, f.m())?;
    let a = set_of(n, cert.a.iter().copied());
    Ok(f.map_colors(|j, g| {
        let mut h = Graph::new(n);
        if j == i {
            return h;
        }
        for (u, v) in g.edges() {
            if (a.contains(u) != a.contains(v)) == in_c[j] {
                h.add_edge(u, v);
            }
        }
        h
    }))
}

pub fn witness_valid(f: &ColoredFamily, cert: &HalfSetCertificate, w: &Witness) -> bool {
    let (u, v) = w.edge;
    let Ok(in_c) = odd_set(cert, f.m()) else { return false };
    if w.color >= f.m() || u >= f.n() || v >= f.n() || !f.has(w.color, u, v) {
        return false;
    }
    let a = set_of(f.n(), cert.a.iter().copied());
    let crossing = a.contains(u) != a.contains(v);
    in_c[w.color] != crossing
}

/// Every valid witness for the certificate.
pub fn witnesses(f: &ColoredFamily, cert: &HalfSetCertificate) -> Vec<Witness> {
    let mut out = Vec::new();
    for c in 0..f.m() {
        for edge in f.color(c).edges() {
            let w = Witness { edge, color: c };
            if witness_valid(f, cert, &w) {
                out.push(w);
            }
        }
    }
    out
}

/// Rainbow Hamilton path of `𝔾^{-i}` between the ends of the witness edge.
pub fn sample_exceptional_path(
    f: &ColoredFamily,
    cert: &HalfSetCertificate,
    w: Witness,
    p: &ExtremalParams,
    seed: u64,
) -> Result<ExceptionalPath> {
    let n = f.n();
    if f.m() != n {
        return Err(Error::Precondition("need as many colors as vertices".into()));
    }
    if cert.a.len() * 2 + 1 < n || cert.a.len() * 2 > n + 1 {
        return Err(Error::Precondition("certificate is not a half-set".into()));
    }
    if !witness_valid(f, cert, &w) {
        return Err(Error::InvalidWitness(format!("edge {:?} of color {} violates the membership condition", w.edge, w.color)));
    }
    let g = restricted_family(f, cert, w.color)?;
    let mut last = String::new();
    for t in 0..p.retries.max(1) {
        match attempt(f, &g, cert, w, p, derive_seed(seed, "exceptional", t as u64)) {
            Ok(mut out) => {
                out.attempts = t + 1;
                return Ok(out);
            }
            Err(e @ Error::Precondition(_)) => return Err(e),
            Err(e) => last = e.to_string(),
        }
    }
    Err(retries("exceptional-path", last))
}

fn attempt(
    f: &ColoredFamily,
    g: &ColoredFamily,
    cert: &HalfSetCertificate,
    w: Witness,
    p: &ExtremalParams,
    seed: u64,
) -> Result<ExceptionalPath> {
    let n = f.n();
    let fail = |s: &str| retries("exceptional-path", s.to_string());
    let in_c = odd_set(cert, n)?;
    let a = set_of(n, cert.a.iter().copied());
    let b = a.complement();
    let (x, y) = w.edge;
    let sign = |v: usize| if a.contains(v) { 1i64 } else { -1 };
    // crossing-dense colors of C serve as connectors and for the residual path
    let dense = near_bipartite_colors(f, &a, p.eps);
    let c_prime: Vec<usize> = dense.into_iter().filter(|&c| in_c[c] && c != w.color).collect();
    let outside: Vec<usize> = (0..n).filter(|&c| !in_c[c] && c != w.color).collect();
    let sparse_c: Vec<usize> = (0..n).filter(|&c| in_c[c] && c != w.color && !c_prime.contains(&c)).collect();

    let mut cx = Ctx { f: g, forest: Forest::new(n, n), blocked: VertexSet::new(n), r: rng::rng(seed) };
    cx.forest.use_color(w.color);
    cx.blocked.insert(x);
    cx.blocked.insert(y);
    // internal edges of the outside colors, sides chosen so the residual balances
    let target = a.len() as i64 - b.len() as i64 - (sign(x) + sign(y)) / 2;
    if target.unsigned_abs() as usize > outside.len() || (outside.len() as i64 - target) % 2 != 0 {
        return Err(Error::Inconsistent(format!("balance {target} unreachable with {} internal edges", outside.len())));
    }
    let mut diff = 0i64;
    let mut left = outside.len() as i64;
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    for c in rng::shuffled(&outside, &mut cx.r) {
        left -= 1;
        let to_a = match diff.cmp(&target) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => cx.r.gen(),
        };
        let side = if to_a { &a } else { &b };
        let (u, v, _) = cx.matching_edge(&[c], Scope::Within(side)).ok_or_else(|| fail("no free internal edge"))?;
        diff += if to_a { 1 } else { -1 };
        debug_assert!((target - diff).abs() <= left);
        pieces.push(vec![u, v]);
    }
    for c in rng::shuffled(&sparse_c, &mut cx.r) {
        let (u, v, _) = cx.matching_edge(&[c], Scope::Between(&a, &b)).ok_or_else(|| fail("no free crossing edge"))?;
        pieces.push(vec![u, v]);
    }
    pieces.shuffle(&mut cx.r);
    for pc in &mut pieces {
        if cx.r.gen::<bool>() {
            pc.reverse();
        }
    }
    pieces.insert(0, vec![x]);
    let mut prefix = cx.join_crossing(&c_prime, &a, &b, &pieces, p.connector_tries).ok_or_else(|| fail("no connector"))?;
    let end = *prefix.last().unwrap();
    if a.contains(end) == a.contains(y) {
        let other = if a.contains(end) { &b } else { &a };
        let (z, _) = cx.step(&c_prime, end, other).ok_or_else(|| fail("cannot switch sides"))?;
        prefix.push(z);
    }
    let end = *prefix.last().unwrap();
    let used: Vec<bool> = {
        let mut u = vec![false; n];
        for &v in &prefix[..prefix.len() - 1] {
            u[v] = true;
        }
        u
    };
    let (ea, eb) = if a.contains(end) { (&a, &b) } else { (&b, &a) };
    let frame = BipartiteFrame {
        a: ea.iter().filter(|&v| !used[v]).collect(),
        b: eb.iter().filter(|&v| !used[v]).collect(),
        colors: c_prime.iter().copied().filter(|&c| !cx.forest.color_used(c)).collect(),
        v1: end,
        v2: y,
    };
    let bad = validate_bipartite_frame(g, &frame, p);
    if !bad.is_empty() {
        return Err(fail(&format!("frame check: {}", bad.join("; "))));
    }
    let head = if prefix.len() > 1 { cx.path_transversal(&prefix) } else { Transversal::path(prefix.clone(), Vec::new()) };
    let rest = sample_bipartite_path(g, &frame.a, &frame.b, &frame.colors, end, y, &p.bipartite, derive_seed(seed, "lemma", 0))?;
    let mut vertices = head.vertices;
    vertices.extend_from_slice(&rest.path.vertices[1..]);
    let mut colors = head.colors;
    colors.extend_from_slice(&rest.path.colors);
    Ok(ExceptionalPath {
        path: Transversal::path(vertices, colors),
        witness: w,
        prefix_len: prefix.len() - 1,
        mode: rest.mode,
        notes: rest.notes,
        attempts: 0,
    })
}

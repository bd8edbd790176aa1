//! Instance generators: the Burr extremal host, projective-plane hosts, random
//! dense digraphs, exhaustive digraph enumeration and random antidirected trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::{Digraph, VertexId};
use crate::error::GraphError;
use crate::tree::AntiTree;

/// Default guard for [`enumerate_digraphs`].
pub const DIGRAPH_ENUMERATION_LIMIT: usize = 5;

/// Orientation of K(2k-2, 2k-2) with every vertex at out- and in-degree k-1.
///
/// `a_i = i` sends arcs to `b_{i+1}, ..., b_{i+k-1}` (indices mod 2k-2, `b_j = 2k-2+j`)
/// and receives from the other b's.
pub fn gen_burr(k: usize) -> Digraph {
    assert!(k >= 2, "the Burr host needs k >= 2");
    let m = 2 * k - 2;
    let mut arcs = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let off = (j + m - i) % m;
            if (1..k).contains(&off) {
                arcs.push((i, m + j));
            } else {
                arcs.push((m + j, i));
            }
        }
    }
    Digraph::new(2 * m, arcs).expect("valid construction")
}

/// Arithmetic in GF(p^e), elements encoded as base-p digit vectors.
#[derive(Clone, Debug)]
pub struct Field {
    q: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
}

/// (q, p, low coefficients of the monic modulus)
const FIELD_TABLE: &[(usize, usize, &[usize])] = &[
    (2, 2, &[0]),
    (3, 3, &[0]),
    (4, 2, &[1, 1]),
    (5, 5, &[0]),
    (7, 7, &[0]),
    (8, 2, &[1, 1, 0]),
    (9, 3, &[1, 0]),
    (11, 11, &[0]),
    (13, 13, &[0]),
    (16, 2, &[1, 1, 0, 0]),
    (17, 17, &[0]),
    (19, 19, &[0]),
    (23, 23, &[0]),
    (25, 5, &[2, 0]),
];

pub fn supported_orders() -> Vec<usize> {
    FIELD_TABLE.iter().map(|f| f.0).collect()
}

impl Field {
    pub fn new(q: usize) -> Result<Field, GraphError> {
        let &(_, p, modulus) = FIELD_TABLE.iter().find(|f| f.0 == q).ok_or(GraphError::UnsupportedField(q))?;
        let e = modulus.len();
        let digits = |mut x: usize| {
            let mut d = vec![0; e];
            for c in d.iter_mut() {
                *c = x % p;
                x /= p;
            }
            d
        };
        let pack = |d: &[usize]| d.iter().rev().fold(0, |acc, &c| acc * p + c);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for x in 0..q {
            for y in 0..q {
                let (dx, dy) = (digits(x), digits(y));
                let s: Vec<usize> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[x * q + y] = pack(&s);
                let mut prod = vec![0; 2 * e];
                for i in 0..e {
                    for j in 0..e {
                        prod[i + j] = (prod[i + j] + dx[i] * dy[j]) % p;
                    }
                }
                // x^e = -(modulus low terms)
                for deg in (e..2 * e).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        prod[deg] = 0;
                        for (i, &m) in modulus.iter().enumerate() {
                            prod[deg - e + i] = (prod[deg - e + i] + (p - m) % p * c) % p;
                        }
                    }
                }
                mul[x * q + y] = pack(&prod[..e]);
            }
        }
        Ok(Field { q, add, mul })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.q + y]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.q + y]
    }

    fn dot(&self, a: &[usize; 3], b: &[usize; 3]) -> usize {
        let t = self.add(self.mul(a[0], b[0]), self.mul(a[1], b[1]));
        self.add(t, self.mul(a[2], b[2]))
    }
}

/// Normalised homogeneous coordinates of PG(2, q): first nonzero entry is 1.
pub fn projective_points(f: &Field) -> Vec<[usize; 3]> {
    let q = f.order();
    let mut pts = Vec::with_capacity(q * q + q + 1);
    for a in 0..q {
        for b in 0..q {
            pts.push([1, a, b]);
        }
    }
    for a in 0..q {
        pts.push([0, 1, a]);
    }
    pts.push([0, 0, 1]);
    pts
}

/// Point-to-line incidence digraph of PG(2, q): points are `0..N`, lines `N..2N`.
pub fn gen_incidence(q: usize) -> Result<Digraph, GraphError> {
    let f = Field::new(q)?;
    let pts = projective_points(&f);
    let n = pts.len();
    let mut arcs = Vec::with_capacity((q + 1) * n);
    for (i, p) in pts.iter().enumerate() {
        for (j, l) in pts.iter().enumerate() {
            if f.dot(p, l) == 0 {
                arcs.push((i, n + j));
            }
        }
    }
    Digraph::new(2 * n, arcs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolarityOrientation {
    Bidirected,
    Random(u64),
}

/// The orthogonality graph of PG(2, q) without loops, as a digraph. Two points have
/// at most one common neighbour, so every orientation is K(2,2)-free.
pub fn gen_polarity(q: usize, orientation: PolarityOrientation) -> Result<Digraph, GraphError> {
    let f = Field::new(q)?;
    let pts = projective_points(&f);
    let n = pts.len();
    let mut rng = match orientation {
        PolarityOrientation::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        PolarityOrientation::Bidirected => None,
    };
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if f.dot(&pts[i], &pts[j]) == 0 {
                match rng.as_mut() {
                    None => arcs.extend([(i, j), (j, i)]),
                    Some(r) => arcs.push(if r.gen_bool(0.5) { (i, j) } else { (j, i) }),
                }
            }
        }
    }
    Digraph::new(n, arcs)
}

fn pair_of(index: usize, n: usize) -> (VertexId, VertexId) {
    let u = index / (n - 1);
    let j = index % (n - 1);
    (u, if j >= u { j + 1 } else { j })
}

/// A uniform simple digraph with exactly `(k-1)n + 1` arcs.
pub fn gen_random_dense(n: usize, k: usize, seed: u64) -> Result<Digraph, GraphError> {
    let arcs = (k.max(1) - 1) * n + 1;
    gen_random_with_arcs(n, arcs, seed)
}

/// A uniform simple digraph with exactly `arcs` arcs.
pub fn gen_random_with_arcs(n: usize, arcs: usize, seed: u64) -> Result<Digraph, GraphError> {
    if n < 2 || arcs > n * (n - 1) {
        return Err(GraphError::InfeasibleArcCount { n, arcs });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = rand::seq::index::sample(&mut rng, n * (n - 1), arcs);
    let mut list: Vec<(VertexId, VertexId)> = idx.into_iter().map(|i| pair_of(i, n)).collect();
    list.sort_unstable();
    Digraph::new(n, list)
}

/// Each ordered pair present independently with probability `p`.
pub fn gen_random_digraph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Digraph {
    let arcs: Vec<(VertexId, VertexId)> =
        (0..n * n.saturating_sub(1)).map(|i| pair_of(i, n)).filter(|_| rng.gen_bool(p)).collect();
    Digraph::new(n, arcs).expect("pairs are distinct")
}

/// All labelled digraphs on `n` vertices with at least `min_arcs` arcs, in mask order.
pub fn enumerate_digraphs(n: usize, min_arcs: usize) -> Result<impl Iterator<Item = Digraph>, GraphError> {
    enumerate_digraphs_bounded(n, min_arcs, DIGRAPH_ENUMERATION_LIMIT)
}

pub fn enumerate_digraphs_bounded(
    n: usize,
    min_arcs: usize,
    limit: usize,
) -> Result<impl Iterator<Item = Digraph>, GraphError> {
    if n > limit {
        return Err(GraphError::TooLarge { n, limit });
    }
    let pairs: Vec<(VertexId, VertexId)> = (0..n * n.saturating_sub(1)).map(|i| pair_of(i, n)).collect();
    let total: u64 = 1 << pairs.len();
    Ok((0..total).filter(move |m| m.count_ones() as usize >= min_arcs).map(move |m| {
        let arcs = pairs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &p)| p);
        Digraph::new(n, arcs).expect("pairs are distinct")
    }))
}

/// Least arc mask over all relabellings; equal exactly for isomorphic digraphs.
pub fn canonical_digraph_key(d: &Digraph) -> u64 {
    let n = d.n();
    assert!(n <= 8, "canonical keys are only computed for tiny digraphs");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    loop {
        let mut key = 0u64;
        for a in d.arcs() {
            let (u, v) = (perm[a.tail], perm[a.head]);
            key |= 1 << (u * n + v);
        }
        best = best.min(key);
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Keeps the first digraph of each isomorphism class.
pub fn dedup_isomorphic(ds: impl Iterator<Item = Digraph>) -> Vec<Digraph> {
    let mut seen = std::collections::HashSet::new();
    ds.filter(|d| seen.insert(canonical_digraph_key(d))).collect()
}

fn relabel_and_orient<R: Rng>(n: usize, edges: &[(usize, usize)], rng: &mut R) -> AntiTree {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[perm[a]].push(perm[b]);
        adj[perm[b]].push(perm[a]);
    }
    AntiTree::orient(&adj, rng.gen_range(0..n)).expect("edges form a tree")
}

/// Uniform labelled tree with `k` arcs (Prüfer code), oriented antidirectedly
/// with a random vertex as an out-vertex.
pub fn random_antitree<R: Rng>(k: usize, rng: &mut R) -> AntiTree {
    assert!(k >= 1);
    let n = k + 1;
    if n == 2 {
        return relabel_and_orient(2, &[(0, 1)], rng);
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(k);
    for &c in &code {
        let leaf = (0..n).find(|&x| degree[x] == 1).expect("a leaf exists");
        edges.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&x| degree[x] == 1).collect();
    edges.push((rest[0], rest[1]));
    relabel_and_orient(n, &edges, rng)
}

/// A random tree with `k` arcs whose two largest degrees are exactly `d1 >= d2`,
/// carried by two hubs at distance `gap` (1, 2 or 3).
pub fn random_two_hub_tree<R: Rng>(k: usize, d1: usize, d2: usize, gap: usize, rng: &mut R) -> Option<AntiTree> {
    if d2 < 2 || d1 < d2 || gap == 0 || d1 + d2 + gap - 1 > k + 1 {
        return None;
    }
    let mut edges = Vec::new();
    let mut deg = vec![0usize; 2];
    // Hub path 0 - p_1 - ... - 1.
    let mut prev = 0;
    for step in 1..=gap {
        let next = if step == gap {
            1
        } else {
            deg.push(0);
            deg.len() - 1
        };
        edges.push((prev, next));
        deg[prev] += 1;
        deg[next] += 1;
        prev = next;
    }
    for (hub, target) in [(0, d1), (1, d2)] {
        while deg[hub] < target {
            deg.push(1);
            edges.push((hub, deg.len() - 1));
            deg[hub] += 1;
        }
    }
    let cap = d2.saturating_sub(1).max(2);
    while deg.len() < k + 1 {
        let open: Vec<usize> = (2..deg.len()).filter(|&x| deg[x] < cap).collect();
        let at = *open.choose(rng)?;
        deg.push(1);
        edges.push((at, deg.len() - 1));
        deg[at] += 1;
    }
    let t = relabel_and_orient(k + 1, &edges, rng);
    let st = t.degree_stats();
    (st.delta == d1 && st.delta2 == d2).then_some(t)
}

/// A random caterpillar with `k` arcs: a spine with leaves hung on inner vertices.
pub fn random_caterpillar<R: Rng>(k: usize, rng: &mut R) -> AntiTree {
    let n = k + 1;
    let spine = if n <= 2 { n } else { rng.gen_range(2..=n) };
    let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
    for x in spine..n {
        let at = if spine > 2 { rng.gen_range(1..spine - 1) } else { 0 };
        edges.push((at, x));
    }
    relabel_and_orient(n, &edges, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeness::is_k2s_free;

    #[test]
    fn burr_counts() {
        for k in 2..=12 {
            let d = gen_burr(k);
            assert_eq!(d.n(), 4 * k - 4);
            assert_eq!(d.arc_count(), (k - 1) * (4 * k - 4));
            for v in 0..d.n() {
                assert_eq!((d.out_degree(v), d.in_degree(v)), (k - 1, k - 1));
            }
        }
    }

    #[test]
    fn fields_are_fields() {
        for q in supported_orders() {
            let f = Field::new(q).unwrap();
            for x in 1..q {
                assert!((1..q).any(|y| f.mul(x, y) == 1), "no inverse of {x} in GF({q})");
                assert_eq!(f.mul(x, 1), x);
                assert_eq!(f.add(x, 0), x);
            }
        }
        assert!(Field::new(6).is_err());
    }

    #[test]
    fn fano_incidence() {
        let d = gen_incidence(2).unwrap();
        assert_eq!((d.n(), d.arc_count()), (14, 21));
        assert_eq!(is_k2s_free(&d, 2), Ok(()));
        assert!((0..d.n()).all(|v| d.out_degree(v) == 0 || d.in_degree(v) == 0));
    }

    #[test]
    fn polarity_is_free() {
        let d = gen_polarity(5, PolarityOrientation::Bidirected).unwrap();
        assert_eq!(d.n(), 31);
        assert_eq!(is_k2s_free(&d, 2), Ok(()));
        let r = gen_polarity(5, PolarityOrientation::Random(3)).unwrap();
        assert_eq!(2 * r.arc_count(), d.arc_count());
        assert_eq!(is_k2s_free(&r, 2), Ok(()));
    }

    #[test]
    fn random_dense_is_exact_and_seeded() {
        let a = gen_random_dense(7, 3, 11).unwrap();
        assert_eq!(a.arc_count(), 15);
        assert_eq!(a, gen_random_dense(7, 3, 11).unwrap());
        assert!(gen_random_dense(3, 4, 0).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_digraphs(2, 0).unwrap().count(), 4);
        assert_eq!(enumerate_digraphs(2, 2).unwrap().count(), 1);
        assert_eq!(enumerate_digraphs(3, 0).unwrap().count(), 64);
        assert_eq!(enumerate_digraphs(4, 0).unwrap().count(), 4096);
        assert!(enumerate_digraphs(6, 0).is_err());
        // 16 isomorphism classes of digraphs on 3 vertices.
        assert_eq!(dedup_isomorphic(enumerate_digraphs(3, 0).unwrap()).len(), 16);
    }

    #[test]
    fn random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..20 {
            assert_eq!(random_antitree(k, &mut rng).k(), k);
            assert!(random_caterpillar(k, &mut rng).caterpillar_decompose().is_ok());
        }
        let t = random_two_hub_tree(13, 7, 6, 2, &mut rng).unwrap();
        assert_eq!((t.degree_stats().delta, t.degree_stats().delta2), (7, 6));
    }
}

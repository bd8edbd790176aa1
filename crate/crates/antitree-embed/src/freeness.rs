//! The three orientations of K(2,s) and the common-neighbourhood bounds built on them.

use serde::Serialize;

use crate::digraph::{Digraph, Sign, VertexId};

/// Two vertices whose sign-typed neighbourhoods share `s` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForbiddenWitness {
    pub a: VertexId,
    pub b: VertexId,
    pub sign_a: Sign,
    pub sign_b: Sign,
    pub common: Vec<VertexId>,
}

impl ForbiddenWitness {
    /// Rechecks the witness against `d`.
    pub fn revalidate(&self, d: &Digraph, s: usize) -> bool {
        self.a != self.b
            && self.common.len() == s
            && self.common.iter().all(|&c| {
                c != self.a
                    && c != self.b
                    && d.is_neighbor(self.a, self.sign_a, c)
                    && d.is_neighbor(self.b, self.sign_b, c)
            })
    }
}

/// N^sign_a(a) ∩ N^sign_b(b) without a and b, sorted.
pub fn common_neighborhood(d: &Digraph, a: VertexId, sign_a: Sign, b: VertexId, sign_b: Sign) -> Vec<VertexId> {
    let mut c: Vec<VertexId> = d
        .neighbors(a, sign_a)
        .iter()
        .copied()
        .filter(|&x| x != a && x != b && d.is_neighbor(b, sign_b, x))
        .collect();
    c.sort_unstable();
    c
}

/// `Ok(())` when no sign-typed common neighbourhood of two distinct vertices has `s` elements.
///
/// Each pass walks a → c → b through a middle vertex c and counts hits per b,
/// which costs Σ_c deg(c)² rather than n³.
pub fn is_k2s_free(d: &Digraph, s: usize) -> Result<(), ForbiddenWitness> {
    assert!(s >= 1, "s must be positive");
    let n = d.n();
    let mut count = vec![0usize; n];
    let mut touched = Vec::new();
    // (sign_a, sign_b): c ∈ N^sign_a(a) and c ∈ N^sign_b(b), i.e. b ∈ N^{-sign_b}(c).
    let passes = [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Minus), (Sign::Plus, Sign::Minus)];
    for (sa, sb) in passes {
        for a in 0..n {
            for &c in d.neighbors(a, sa) {
                for &b in d.neighbors(c, sb.flip()) {
                    if b == a {
                        continue;
                    }
                    if count[b] == 0 {
                        touched.push(b);
                    }
                    count[b] += 1;
                    if count[b] >= s {
                        let mut common = common_neighborhood(d, a, sa, b, sb);
                        common.truncate(s);
                        return Err(ForbiddenWitness { a, b, sign_a: sa, sign_b: sb, common });
                    }
                }
            }
            for b in touched.drain(..) {
                count[b] = 0;
            }
        }
    }
    Ok(())
}

/// s = ⌈k/12⌉
pub fn s_for(k: usize) -> usize {
    k.div_ceil(12)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K4Report {
    pub sum: usize,
    pub k: usize,
    /// `4 * sum < 5 * k`
    pub holds: bool,
}

/// Σ |N^sign_i(a_i) ∩ S| over three probes, compared with 5k/4.
pub fn k4_bound_check(d: &Digraph, k: usize, set: &[VertexId], probes: &[(VertexId, Sign)]) -> Option<K4Report> {
    if probes.len() != 3 {
        return None;
    }
    let mut mark = vec![false; d.n()];
    for &x in set {
        mark[x] = true;
    }
    let sum = probes.iter().map(|&(a, sg)| d.neighbors(a, sg).iter().filter(|&&x| mark[x]).count()).sum();
    Some(K4Report { sum, k, holds: 4 * sum < 5 * k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Digraph {
        Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn complete(n: usize) -> Digraph {
        Digraph::new(n, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn common_neighborhoods() {
        assert_eq!(common_neighborhood(&triangle(), 0, Sign::Plus, 2, Sign::Minus), vec![1]);
        assert_eq!(common_neighborhood(&complete(4), 0, Sign::Plus, 1, Sign::Plus), vec![2, 3]);
        assert!(common_neighborhood(&Digraph::empty(4), 0, Sign::Plus, 1, Sign::Minus).is_empty());
    }

    #[test]
    fn triangle_freeness() {
        assert_eq!(is_k2s_free(&triangle(), 2), Ok(()));
        let w = is_k2s_free(&triangle(), 1).unwrap_err();
        assert!(w.revalidate(&triangle(), 1));
    }

    #[test]
    fn bipartite_all_out_is_forbidden() {
        let s = 3;
        let d = Digraph::new(2 + s, (0..2).flat_map(|a| (2..2 + s).map(move |b| (a, b)))).unwrap();
        let w = is_k2s_free(&d, s).unwrap_err();
        assert_eq!((w.sign_a, w.sign_b), (Sign::Plus, Sign::Plus));
        assert!(w.revalidate(&d, s));
        assert_eq!(is_k2s_free(&d, s + 1), Ok(()));
    }

    #[test]
    fn k4_bound_on_arcless_and_dense() {
        let r = k4_bound_check(&Digraph::empty(5), 13, &[0, 1, 2], &[(0, Sign::Plus), (1, Sign::Plus), (2, Sign::Minus)]);
        assert_eq!(r.unwrap().sum, 0);
        assert!(k4_bound_check(&Digraph::empty(5), 13, &[], &[(0, Sign::Plus)]).is_none());
        // Two sources sharing a set S of size k, plus a sink fed by S: far above 5k/4.
        let k = 4;
        let mut arcs: Vec<(usize, usize)> = (0..2).flat_map(|a| (3..3 + k).map(move |b| (a, b))).collect();
        arcs.extend((3..3 + k).map(|b| (b, 2)));
        let d = Digraph::new(3 + k, arcs).unwrap();
        let set: Vec<usize> = (3..3 + k).collect();
        let r = k4_bound_check(&d, k, &set, &[(0, Sign::Plus), (1, Sign::Plus), (2, Sign::Minus)]).unwrap();
        assert_eq!(r.sum, 3 * k);
        assert!(!r.holds);
    }

    #[test]
    fn s_thresholds() {
        assert_eq!((s_for(1), s_for(12), s_for(13), s_for(24), s_for(25)), (1, 1, 2, 2, 3));
    }
}

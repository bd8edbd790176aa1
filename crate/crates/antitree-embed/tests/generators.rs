use antitree_embed::freeness::is_k2s_free;
use antitree_embed::gen::{enumerate_digraphs, gen_burr, gen_incidence, projective_points, Field};
use antitree_embed::io::{format_arc_list, parse_any, ArcList};
use antitree_embed::oracle::{oracle_embed, OracleVerdict};
use antitree_embed::tree::enumerate_antitrees;

#[test]
fn burr_is_regular_across_the_bipartition() {
    for k in 2..=12 {
        let d = gen_burr(k);
        let n = 4 * k - 4;
        assert_eq!(d.n(), n);
        assert_eq!(d.arc_count(), (k - 1) * n);
        for v in 0..n {
            assert_eq!((d.out_degree(v), d.in_degree(v)), (k - 1, k - 1));
            // Arcs only cross the two halves.
            let side = v < 2 * k - 2;
            assert!(d.out_neighbors(v).iter().all(|&w| (w < 2 * k - 2) != side));
        }
    }
}

#[test]
fn burr_misses_only_the_two_stars() {
    for k in 2..=4 {
        let d = gen_burr(k);
        for t in enumerate_antitrees(k).unwrap() {
            let g = t.digraph();
            let star = (0..t.order()).any(|x| g.out_degree(x) == k || g.in_degree(x) == k);
            let verdict = oracle_embed(&d, &t, None).verdict;
            // Every in-degree is k-1 as well, so the in-star is missing too.
            if star {
                assert_eq!(verdict, OracleVerdict::NotContained);
            } else {
                assert!(matches!(verdict, OracleVerdict::Embeds(_)), "k = {k}: {:?}", g.arcs());
            }
        }
    }
}

#[test]
fn incidence_obeys_the_plane_axioms() {
    for q in [2, 3, 4, 5] {
        let d = gen_incidence(q).unwrap();
        let p = q * q + q + 1;
        assert_eq!(d.n(), 2 * p);
        assert_eq!(d.arc_count(), (q + 1) * p);
        assert!(is_k2s_free(&d, 2).is_ok());
        // Points are sources, lines are sinks.
        assert!((0..d.n()).all(|v| d.out_degree(v) == 0 || d.in_degree(v) == 0));
        let pts: Vec<usize> = (0..d.n()).filter(|&v| d.out_degree(v) > 0).collect();
        let lines: Vec<usize> = (0..d.n()).filter(|&v| d.in_degree(v) > 0).collect();
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                let shared = d.out_neighbors(a).iter().filter(|l| d.out_neighbors(b).contains(l)).count();
                assert_eq!(shared, 1, "q = {q}, points {a} {b}");
            }
        }
        for (i, &a) in lines.iter().enumerate() {
            for &b in &lines[i + 1..] {
                let shared = d.in_neighbors(a).iter().filter(|x| d.in_neighbors(b).contains(x)).count();
                assert_eq!(shared, 1, "q = {q}, lines {a} {b}");
            }
        }
    }
    assert_eq!(projective_points(&Field::new(3).unwrap()).len(), 13);
}

#[test]
fn pg25_is_dense_enough_for_k13() {
    let d = gen_incidence(25).unwrap();
    assert_eq!((d.n(), d.arc_count()), (1302, 16926));
    assert!(d.arc_count() > 12 * d.n());
    assert!(is_k2s_free(&d, 2).is_ok());
}

#[test]
fn enumeration_counts() {
    assert_eq!(enumerate_digraphs(2, 0).unwrap().count(), 4);
    assert_eq!(enumerate_digraphs(2, 2).unwrap().count(), 1);
    assert_eq!(enumerate_digraphs(3, 0).unwrap().count(), 64);
    assert_eq!(enumerate_digraphs(4, 0).unwrap().count(), 4096);
    assert!(enumerate_digraphs(6, 0).is_err());
}

#[test]
fn two_arc_containment_recount() {
    // The two 2-arc antidirected trees are the out-star and the in-star; a
    // digraph contains one iff some out- (in-) degree reaches 2.
    let trees = enumerate_antitrees(2).unwrap();
    assert_eq!(trees.len(), 2);
    for t in &trees {
        let outward = (0..3).any(|x| t.digraph().out_degree(x) == 2);
        let mut by_oracle = 0;
        let mut by_degrees = 0;
        for d in enumerate_digraphs(3, 0).unwrap() {
            by_oracle += usize::from(oracle_embed(&d, t, None).embeds());
            let hit = (0..3).any(|v| if outward { d.out_degree(v) == 2 } else { d.in_degree(v) == 2 });
            by_degrees += usize::from(hit);
        }
        assert_eq!(by_oracle, by_degrees);
        // 64 digraphs minus the 3³ = 27 with every out-degree at most one.
        assert_eq!(by_oracle, 37);
    }
}

#[test]
fn arc_list_round_trips() {
    let d = gen_burr(3);
    let text = format_arc_list(&d, None);
    assert_eq!(parse_any(&text).unwrap().0, d);
    let json = serde_json::to_string(&ArcList::from_digraph(&d)).unwrap();
    assert_eq!(parse_any(&json).unwrap().0, d);
}

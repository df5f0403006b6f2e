use std::collections::BTreeSet;

use fdepth::partition::{
    dominance_cover_pairs, dominance_covers, dominated_by, enumerate_partitions, refinement_covers, refines,
};
use fdepth::{GraphFormat, HasseGraph, OrderKind, Partition};
use proptest::prelude::*;

fn p(v: &[u32]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

/// Euler's pentagonal recurrence.
fn partition_counts(max: usize) -> Vec<u64> {
    let mut c = vec![0i64; max + 1];
    c[0] = 1;
    for n in 1..=max {
        let mut total = 0i64;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            total += sign * c[n - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                total += sign * c[n - g2];
            }
        }
        c[n] = total;
    }
    c.into_iter().map(|x| x as u64).collect()
}

/// All set partitions of {0..n}, as block-label vectors in restricted
/// growth form.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            go(i + 1, n, max.max(b), cur, out);
            cur.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    go(1, n, 0, &mut cur, &mut out);
    out
}

fn block_type(labels: &[usize]) -> Partition {
    let blocks = labels.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0u32; blocks];
    for &l in labels {
        sizes[l] += 1;
    }
    Partition::new(sizes).unwrap()
}

/// Every block of `fine` sits inside a block of `coarse`.
fn set_refines(fine: &[usize], coarse: &[usize]) -> bool {
    let mut map = std::collections::HashMap::new();
    fine.iter().zip(coarse).all(|(f, c)| *map.entry(f).or_insert(c) == c)
}

fn prefix_dominated(a: &Partition, b: &Partition) -> bool {
    let (mut sa, mut sb) = (0, 0);
    for i in 0..a.parts().len().max(b.parts().len()) {
        sa += a.parts().get(i).copied().unwrap_or(0);
        sb += b.parts().get(i).copied().unwrap_or(0);
        if sa > sb {
            return false;
        }
    }
    true
}

#[test]
fn counts_match_pentagonal_recurrence() {
    let counts = partition_counts(40);
    for n in 1..=30u32 {
        assert_eq!(enumerate_partitions(n).unwrap().len() as u64, counts[n as usize], "n={n}");
    }
    assert_eq!(counts[8], 22);
    assert_eq!(counts[24], 1575);
    assert_eq!(counts[30], 5604);
}

#[test]
fn enumeration_n6_and_order() {
    let all = enumerate_partitions(6).unwrap();
    let expected: Vec<Partition> = [
        &[6][..],
        &[5, 1],
        &[4, 2],
        &[4, 1, 1],
        &[3, 3],
        &[3, 2, 1],
        &[3, 1, 1, 1],
        &[2, 2, 2],
        &[2, 2, 1, 1],
        &[2, 1, 1, 1, 1],
        &[1, 1, 1, 1, 1, 1],
    ]
    .iter()
    .map(|v| p(v))
    .collect();
    assert_eq!(all, expected);
    assert!(enumerate_partitions(41).is_err());
    assert!(enumerate_partitions(0).is_err());
}

#[test]
fn refinement_agrees_with_set_partition_quotient() {
    for n in 1..=6u32 {
        let sets = set_partitions(n as usize);
        let mut related = BTreeSet::new();
        for a in &sets {
            for b in &sets {
                if set_refines(a, b) {
                    related.insert((block_type(a), block_type(b)));
                }
            }
        }
        let all = enumerate_partitions(n).unwrap();
        for u in &all {
            for x in &all {
                assert_eq!(refines(u, x).unwrap(), related.contains(&(u.clone(), x.clone())), "{u} {x}");
            }
        }
    }
}

#[test]
fn set_partition_counts_are_bell_numbers() {
    let bell = [1, 1, 2, 5, 15, 52, 203, 877];
    for (n, &b) in bell.iter().enumerate() {
        assert_eq!(set_partitions(n).len(), b);
    }
}

#[test]
fn refinement_examples() {
    assert!(!refines(&p(&[2, 2]), &p(&[3, 1])).unwrap());
    assert!(!refines(&p(&[3, 1]), &p(&[2, 2])).unwrap());
    assert!(refines(&p(&[2, 1, 1]), &p(&[2, 2])).unwrap());
    assert!(refines(&p(&[1, 1, 1, 1]), &p(&[2, 1, 1])).unwrap());
    assert!(refines(&p(&[3, 3, 2, 2]), &p(&[5, 5])).unwrap());
    assert!(refines(&p(&[3, 3, 2, 2]), &p(&[6, 4])).unwrap());
    assert!(!refines(&p(&[4, 4, 2]), &p(&[5, 5])).unwrap());
    assert!(refines(&p(&[2, 2]), &p(&[3, 1, 1])).is_err());
}

#[test]
fn dominance_examples() {
    assert!(dominated_by(&p(&[2, 2]), &p(&[3, 1])).unwrap());
    assert!(dominated_by(&p(&[4, 2]), &p(&[5, 1])).unwrap());
    assert!(!dominated_by(&p(&[3, 3]), &p(&[4, 1, 1])).unwrap());
    assert!(!dominated_by(&p(&[4, 1, 1]), &p(&[3, 3])).unwrap());
    assert!(dominated_by(&p(&[1]), &p(&[1, 1])).is_err());
}

fn brute_covers(n: u32, rel: impl Fn(&Partition, &Partition) -> bool) -> BTreeSet<(Partition, Partition)> {
    let all = enumerate_partitions(n).unwrap();
    let mut out = BTreeSet::new();
    for a in &all {
        for b in &all {
            if a == b || !rel(a, b) {
                continue;
            }
            if !all.iter().any(|m| m != a && m != b && rel(a, m) && rel(m, b)) {
                out.insert((a.clone(), b.clone()));
            }
        }
    }
    out
}

#[test]
fn covers_match_brute_force() {
    for n in 1..=8u32 {
        let r: BTreeSet<_> = refinement_covers(n).unwrap().into_iter().collect();
        assert_eq!(r, brute_covers(n, |a, b| refines(a, b).unwrap()), "refinement n={n}");
        let d: BTreeSet<_> = dominance_cover_pairs(n).unwrap().into_iter().collect();
        assert_eq!(d, brute_covers(n, prefix_dominated), "dominance n={n}");
    }
    let r4 = refinement_covers(4).unwrap();
    assert!(r4.contains(&(p(&[2, 1, 1]), p(&[2, 2]))));
    assert!(!r4.contains(&(p(&[1, 1, 1, 1]), p(&[2, 2]))));
    assert_eq!(refinement_covers(2).unwrap(), vec![(p(&[1, 1]), p(&[2]))]);
    assert_eq!(dominance_covers(&p(&[2, 2])), vec![p(&[3, 1])]);
    assert_eq!(dominance_covers(&p(&[2, 2, 2])), vec![p(&[3, 2, 1])]);
    assert!(dominance_covers(&Partition::top(5)).is_empty());
}

#[test]
fn covers_are_one_merge_apart() {
    for (fine, coarse) in refinement_covers(9).unwrap() {
        assert_eq!(fine.height(), coarse.height() + 1);
    }
}

#[test]
fn hasse_n6_refinement_within_dominance() {
    let r = HasseGraph::build(6, OrderKind::Refinement).unwrap();
    let d = HasseGraph::build(6, OrderKind::Dominance).unwrap();
    assert_eq!(r.nodes.len(), 11);
    let reach = d.reachability();
    for &(i, j) in &r.edges {
        assert!(reach[i][j]);
    }
    let brute = brute_covers(6, prefix_dominated);
    assert_eq!(d.edges.len(), brute.len());
    let dot = d.render(GraphFormat::Dot).unwrap();
    assert!(dot.contains("label=\"3+2+1\""));
    let back = HasseGraph::from_json(&d.render(GraphFormat::Json).unwrap()).unwrap();
    assert_eq!(back, d);
}

fn arb_partition() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1u32..6, 1..8).prop_map(|v| Partition::new(v).unwrap())
}

fn arb_pair() -> impl Strategy<Value = (Partition, Partition)> {
    (2u32..=14).prop_flat_map(|n| {
        let all = enumerate_partitions(n).unwrap();
        let len = all.len();
        (0..len, 0..len).prop_map(move |(i, j)| (all[i].clone(), all[j].clone()))
    })
}

proptest! {
    #[test]
    fn conjugation_is_an_involution(x in arb_partition()) {
        prop_assert_eq!(x.conjugate().conjugate(), x.clone());
        prop_assert_eq!(x.conjugate().width(), x.height());
        prop_assert_eq!(x.conjugate().height(), x.width());
    }

    #[test]
    fn conjugation_reverses_dominance((a, b) in arb_pair()) {
        prop_assert_eq!(
            dominated_by(&a, &b).unwrap(),
            dominated_by(&b.conjugate(), &a.conjugate()).unwrap()
        );
    }

    #[test]
    fn refinement_implies_dominance((a, b) in arb_pair()) {
        if refines(&a, &b).unwrap() {
            prop_assert!(dominated_by(&a, &b).unwrap());
        }
        prop_assert_eq!(dominated_by(&a, &b).unwrap(), prefix_dominated(&a, &b));
    }

    #[test]
    fn merging_two_parts_refines(x in arb_partition(), i in 0usize..8, j in 0usize..8) {
        let parts = x.parts().to_vec();
        prop_assume!(parts.len() >= 2);
        let (i, j) = (i % parts.len(), j % parts.len());
        prop_assume!(i != j);
        let mut merged: Vec<u32> = parts.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &v)| v).collect();
        merged.push(parts[i] + parts[j]);
        let coarse = Partition::new(merged).unwrap();
        prop_assert!(refines(&x, &coarse).unwrap());
        prop_assert!(!refines(&coarse, &x).unwrap());
    }

    #[test]
    fn dominance_covers_strictly_dominate(x in arb_partition()) {
        for y in dominance_covers(&x) {
            prop_assert!(dominated_by(&x, &y).unwrap());
            prop_assert!(x != y);
        }
    }

    #[test]
    fn parse_display_round_trip(x in arb_partition()) {
        let shown = x.to_string();
        prop_assert_eq!(shown.parse::<Partition>().unwrap(), x.clone());
        prop_assert_eq!(x.label().parse::<Partition>().unwrap(), x);
    }
}

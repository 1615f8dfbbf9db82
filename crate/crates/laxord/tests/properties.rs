use std::collections::{HashSet, VecDeque};

use laxord::editops::{distance_with, longest_common_factor, Strategy as Dist};
use laxord::enumerator::{enumerate_part, Cadence, EnumError, StreamConfig};
use laxord::interchange::build_partition;
use laxord::oracle::{naive_distance, verify_stream, VerifyOptions};
use laxord::strata::tree_ordering;
use laxord::{apply, distance, script_between, Dfa, EditScript, Metric};
use proptest::prelude::*;

fn word(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('a'), Just('b')], 0..=max).prop_map(|v| v.into_iter().collect())
}

fn regex() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("a".to_string()), Just("b".to_string()), Just("c".to_string())];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x}+{y})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("{x}{y}")),
            inner.prop_map(|x| format!("({x})*")),
        ]
    })
}

/// Random tree on `n` nodes from a parent vector.
fn tree() -> impl Strategy<Value = (Vec<Vec<usize>>, usize, usize)> {
    (2usize..40).prop_flat_map(|n| {
        let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
        (parents, 0..n, 0..n).prop_filter_map("distinct endpoints", move |(parents, s, e)| {
            if s == e {
                return None;
            }
            let mut adj = vec![Vec::new(); n];
            for (i, &p) in parents.iter().enumerate() {
                adj[i + 1].push(p);
                adj[p].push(i + 1);
            }
            Some((adj, s, e))
        })
    })
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

proptest! {
    #[test]
    fn closed_forms_match_search(u in word(6), v in word(6)) {
        for m in [Metric::PushPop, Metric::PushPopRight] {
            let d = distance(&u, &v, m);
            prop_assert_eq!(d, distance_with(&u, &v, m, Dist::Search));
            let s = script_between(&u, &v, m).unwrap();
            prop_assert_eq!(s.len(), d);
            prop_assert_eq!(apply(&u, &s).unwrap(), v.clone());
        }
        prop_assert_eq!(distance(&u, &v, Metric::Levenshtein), naive_distance(&u, &v, Metric::Levenshtein));
    }

    #[test]
    fn metrics_are_ordered(u in word(10), v in word(10), w in word(10)) {
        let pp = distance(&u, &v, Metric::PushPop);
        prop_assert!(distance(&u, &v, Metric::Levenshtein) <= pp);
        prop_assert!(pp <= distance(&u, &v, Metric::PushPopRight));
        prop_assert_eq!(pp, distance(&v, &u, Metric::PushPop));
        prop_assert!(pp <= distance(&u, &w, Metric::PushPop) + distance(&w, &v, Metric::PushPop));
    }

    #[test]
    fn close_words_take_the_banded_path(u in word(40), cut in 0usize..6, add in word(12)) {
        let v: String = format!("{}{add}", &u[cut.min(u.len())..]);
        let (uc, vc): (Vec<char>, Vec<char>) = (u.chars().collect(), v.chars().collect());
        let full = uc.len() + vc.len() - 2 * longest_common_factor(&uc, &vc);
        prop_assert_eq!(distance(&u, &v, Metric::PushPop), full);
    }

    #[test]
    fn script_text_round_trips(u in word(8), v in word(8)) {
        let s = script_between(&u, &v, Metric::PushPop).unwrap();
        let back: EditScript = s.to_string().parse().unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn tree_orderings_take_short_steps((adj, s, e) in tree()) {
        let order = tree_ordering(&adj, s, e).unwrap();
        prop_assert_eq!(order.len(), adj.len());
        prop_assert_eq!(order.iter().collect::<HashSet<_>>().len(), adj.len());
        prop_assert_eq!(order[0], s);
        prop_assert_eq!(*order.last().unwrap(), e);
        for w in order.windows(2) {
            prop_assert!(bfs(&adj, w[0])[w[1]] <= 3, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn automaton_text_round_trips(r in regex()) {
        let a = Dfa::from_regex(&r, None).unwrap();
        let b: Dfa = a.to_string().parse().unwrap();
        prop_assert_eq!(a.enumerate_by_length(6), b.enumerate_by_length(6));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partitions_cover_disjointly(r in regex()) {
        let a = Dfa::from_regex(&r, None).unwrap();
        let p = build_partition(&a);
        let mut seen = HashSet::new();
        for part in &p.parts {
            for w in part.enumerate_by_length(7) {
                prop_assert!(a.accepts(&w), "{w:?} not in {r}");
                prop_assert!(seen.insert(w.clone()), "{w:?} in two parts of {r}");
            }
        }
        prop_assert_eq!(seen.len(), a.enumerate_by_length(7).len());
    }

    #[test]
    fn streams_are_sound(r in regex()) {
        let a = Dfa::from_regex(&r, None).unwrap();
        let p = build_partition(&a);
        prop_assume!(!p.finite);
        let cfg = StreamConfig { cadence: Cadence::Unpaced, budget: 2_000_000, ..StreamConfig::tightened() }.with_max_outputs(150);
        for part in &p.parts {
            let stream = enumerate_part(part, &cfg).unwrap();
            let bound = stream.bound().unwrap();
            let ell = stream.params.map(|q| q.ell);
            let scripts: Result<Vec<_>, _> = stream.collect();
            let scripts = match scripts {
                Err(EnumError::StratumTooLarge { .. }) => continue,
                other => other.unwrap(),
            };
            let report = verify_stream(&scripts, &a, part, &VerifyOptions { bound, metric: Metric::PushPop, ell });
            prop_assert!(report.is_clean(), "{r}: {:?}", report.violation);
        }
    }
}

//! Brute-force ground truth for the production modules.
//!
//! Nothing here calls the production distance, membership, enumeration or
//! ordering code: the automaton is only read through its transition table.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::automata::Dfa;
use crate::editops::{EditOp, EditScript, Metric};
use crate::strata::StratumParams;

pub const MAX_ORDERING_WORDS: usize = 12;
pub const MAX_CONNECTIVITY_WORDS: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{got} words exceed the exhaustive-search cap of {cap}")]
    TooManyWords { got: usize, cap: usize },
    #[error("stratum {stratum} has more than {cap} words")]
    StratumTooLarge { stratum: usize, cap: usize },
}

/// Transition table read independently of the automaton's own lookups.
pub struct Table {
    alphabet: Vec<char>,
    initial: usize,
    finals: HashSet<usize>,
    moves: HashMap<(usize, char), usize>,
    live: HashSet<usize>,
}

impl Table {
    pub fn new(a: &Dfa) -> Self {
        let moves: HashMap<(usize, char), usize> =
            a.transitions().map(|(p, li, q)| ((p, a.alphabet()[li]), q)).collect();
        let finals: HashSet<usize> = a.finals().collect();
        let mut live = finals.clone();
        loop {
            let before = live.len();
            for (&(p, _), q) in &moves {
                if live.contains(q) {
                    live.insert(p);
                }
            }
            if live.len() == before {
                break;
            }
        }
        Table { alphabet: a.alphabet().to_vec(), initial: a.initial(), finals, moves, live }
    }

    pub fn state(&self, w: &str) -> Option<usize> {
        w.chars().try_fold(self.initial, |q, c| self.moves.get(&(q, c)).copied())
    }

    /// Next layer of words with their states, keeping only those from
    /// which acceptance is still possible.
    fn extend_live(&self, layer: &[(String, usize)]) -> Vec<(String, usize)> {
        let mut next = Vec::new();
        for (w, q) in layer {
            for &c in &self.alphabet {
                if let Some(&t) = self.moves.get(&(*q, c)).filter(|t| self.live.contains(t)) {
                    next.push((format!("{w}{c}"), t));
                }
            }
        }
        next
    }

    /// Accepted words of each length up to `hi`, by letter order, calling
    /// `visit(len, words)`; stops early when `visit` returns false.
    fn layers(&self, hi: usize, mut visit: impl FnMut(usize, Vec<String>) -> bool) {
        let mut layer = if self.live.contains(&self.initial) { vec![(String::new(), self.initial)] } else { Vec::new() };
        for len in 0..=hi {
            let accepted = layer.iter().filter(|(_, q)| self.finals.contains(q)).map(|(w, _)| w.clone()).collect();
            if !visit(len, accepted) || len == hi {
                return;
            }
            layer = self.extend_live(&layer);
        }
    }

    /// Accepted words with length in `lo..=hi`, by length then letter order.
    fn words_in_lengths(&self, lo: usize, hi: usize, cap: usize) -> Option<Vec<String>> {
        let mut out = Vec::new();
        let mut over = false;
        self.layers(hi, |len, words| {
            if len >= lo {
                out.extend(words);
                over = out.len() > cap;
            }
            !over
        });
        (!over).then_some(out)
    }

    pub fn accepts(&self, w: &str) -> bool {
        let mut q = self.initial;
        for c in w.chars() {
            match self.moves.get(&(q, c)) {
                Some(&t) => q = t,
                None => return false,
            }
        }
        self.finals.contains(&q)
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }
}

/// Every word of length at most `n`, by length then by the given letter order.
pub fn all_words(alphabet: &[char], n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut start = 0;
    for _ in 0..n {
        let end = out.len();
        for i in start..end {
            for &c in alphabet {
                let w = format!("{}{c}", out[i]);
                out.push(w);
            }
        }
        start = end;
    }
    out
}

/// Accepted words of length at most `n`, tested one by one.
pub fn language_words(a: &Dfa, n: usize) -> Vec<String> {
    Table::new(a).words_in_lengths(0, n, usize::MAX).unwrap()
}

pub fn stratum_words(a: &Dfa, ell: usize, i: usize) -> Vec<String> {
    Table::new(a).words_in_lengths((i - 1) * ell, i * ell - 1, usize::MAX).unwrap()
}

/// Strata `1..=count` in one pass.
pub fn first_strata(a: &Dfa, ell: usize, count: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new(); count];
    if count > 0 {
        Table::new(a).layers(count * ell - 1, |len, words| {
            out[len / ell].extend(words);
            true
        });
    }
    out
}

/// Shortest path length in the edit graph of `m`, by breadth-first search.
/// Intermediate words are capped at |u|+|v| letters, which no shortest path exceeds.
pub fn edit_graph_distance(u: &str, v: &str, alphabet: &[char], m: Metric) -> usize {
    let cap = u.chars().count() + v.chars().count();
    let mut dist: HashMap<Vec<char>, usize> = HashMap::new();
    let start: Vec<char> = u.chars().collect();
    let goal: Vec<char> = v.chars().collect();
    dist.insert(start.clone(), 0);
    let mut queue = VecDeque::from([start]);
    while let Some(w) = queue.pop_front() {
        let here = dist[&w];
        if w == goal {
            return here;
        }
        let mut next: Vec<Vec<char>> = Vec::new();
        match m {
            Metric::PushPop | Metric::PushPopRight => {
                if !w.is_empty() {
                    next.push(w[..w.len() - 1].to_vec());
                    if m == Metric::PushPop {
                        next.push(w[1..].to_vec());
                    }
                }
                if w.len() < cap {
                    for &c in alphabet {
                        let mut r = w.clone();
                        r.push(c);
                        next.push(r);
                        if m == Metric::PushPop {
                            let mut l = vec![c];
                            l.extend_from_slice(&w);
                            next.push(l);
                        }
                    }
                }
            }
            Metric::Levenshtein => {
                for i in 0..w.len() {
                    let mut del = w.clone();
                    del.remove(i);
                    next.push(del);
                    for &c in alphabet {
                        if c != w[i] {
                            let mut sub = w.clone();
                            sub[i] = c;
                            next.push(sub);
                        }
                    }
                }
                if w.len() < cap {
                    for i in 0..=w.len() {
                        for &c in alphabet {
                            let mut ins = w.clone();
                            ins.insert(i, c);
                            next.push(ins);
                        }
                    }
                }
            }
        }
        for x in next {
            if !dist.contains_key(&x) {
                dist.insert(x.clone(), here + 1);
                queue.push_back(x);
            }
        }
    }
    unreachable!("the edit graph is connected")
}

/// Distance from the factor/prefix characterisation, computed by listing
/// substrings rather than by dynamic programming; Levenshtein by memoised recursion.
pub fn naive_distance(u: &str, v: &str, m: Metric) -> usize {
    let u: Vec<char> = u.chars().collect();
    let v: Vec<char> = v.chars().collect();
    match m {
        Metric::PushPop => {
            let mut factors: HashSet<&[char]> = HashSet::new();
            for i in 0..=u.len() {
                for j in i..=u.len() {
                    factors.insert(&u[i..j]);
                }
            }
            let mut best = 0;
            for i in 0..=v.len() {
                for j in i..=v.len() {
                    if j - i > best && factors.contains(&v[i..j]) {
                        best = j - i;
                    }
                }
            }
            u.len() + v.len() - 2 * best
        }
        Metric::PushPopRight => {
            let mut p = 0;
            while p < u.len() && p < v.len() && u[p] == v[p] {
                p += 1;
            }
            u.len() + v.len() - 2 * p
        }
        Metric::Levenshtein => {
            fn go(u: &[char], v: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
                if i == u.len() {
                    return v.len() - j;
                }
                if j == v.len() {
                    return u.len() - i;
                }
                if let Some(&r) = memo.get(&(i, j)) {
                    return r;
                }
                let r = if u[i] == v[j] {
                    go(u, v, i + 1, j + 1, memo)
                } else {
                    1 + go(u, v, i + 1, j, memo).min(go(u, v, i, j + 1, memo)).min(go(u, v, i + 1, j + 1, memo))
                };
                memo.insert((i, j), r);
                r
            }
            go(&u, &v, 0, 0, &mut HashMap::new())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NotApplicable { op_index: usize },
    NotInLanguage { word: String },
    Repeated { word: String, first_seen: usize },
    TooLong { len: usize, bound: usize },
    WrongMetric,
    StratumIncomplete { stratum: usize, missing: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending script in the stream.
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, Default)]
pub struct StreamReport {
    pub outputs: usize,
    pub words: Vec<String>,
    pub max_script: usize,
    /// Strata (1-based) whose every word was emitted before the stream moved on.
    pub strata_checked: Vec<usize>,
    pub violation: Option<Violation>,
}

impl StreamReport {
    pub fn is_clean(&self) -> bool {
        self.violation.is_none()
    }
}

pub struct VerifyOptions {
    pub bound: usize,
    pub metric: Metric,
    /// When set, each stratum must be complete once a longer stratum starts.
    pub ell: Option<usize>,
}

/// Replays `scripts` from the empty word and checks every emitted word.
/// `whole` is the full automaton; membership is tested against `part`.
pub fn verify_stream(scripts: &[EditScript], whole: &Dfa, part: &Dfa, opts: &VerifyOptions) -> StreamReport {
    let table = Table::new(part);
    let outer = Table::new(whole);
    let mut report = StreamReport::default();
    let mut word: VecDeque<char> = VecDeque::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut prev = String::new();
    let mut current_stratum = 0;
    let mut stratum_cache: HashMap<usize, Vec<String>> = HashMap::new();
    let fail = |report: &mut StreamReport, index, kind| {
        report.violation = Some(Violation { index, kind });
    };
    for (index, s) in scripts.iter().enumerate() {
        report.max_script = report.max_script.max(s.len());
        for (op_index, op) in s.ops().iter().enumerate() {
            let ok = match *op {
                EditOp::PushL(c) => {
                    word.push_front(c);
                    true
                }
                EditOp::PushR(c) => {
                    word.push_back(c);
                    true
                }
                EditOp::PopL => word.pop_front().is_some(),
                EditOp::PopR => word.pop_back().is_some(),
            };
            if !ok {
                fail(&mut report, index, ViolationKind::NotApplicable { op_index });
                return report;
            }
        }
        let w: String = word.iter().collect();
        if !table.accepts(&w) || !outer.accepts(&w) {
            fail(&mut report, index, ViolationKind::NotInLanguage { word: w });
            return report;
        }
        if let Some(&first_seen) = seen.get(&w) {
            fail(&mut report, index, ViolationKind::Repeated { word: w, first_seen });
            return report;
        }
        let too_long = match opts.metric {
            Metric::Levenshtein => index > 0 && naive_distance(&prev, &w, Metric::Levenshtein) > opts.bound,
            _ => s.len() > opts.bound,
        };
        if too_long {
            fail(&mut report, index, ViolationKind::TooLong { len: s.len(), bound: opts.bound });
            return report;
        }
        if opts.metric == Metric::PushPopRight && !s.ops().iter().all(|op| matches!(op, EditOp::PushR(_) | EditOp::PopR)) {
            fail(&mut report, index, ViolationKind::WrongMetric);
            return report;
        }
        if let Some(ell) = opts.ell {
            let st = w.chars().count() / ell + 1;
            while current_stratum < st {
                if current_stratum >= 1 {
                    let expected = stratum_cache
                        .entry(current_stratum)
                        .or_insert_with(|| stratum_words(part, ell, current_stratum));
                    if let Some(missing) = expected.iter().find(|x| !seen.contains_key(*x)) {
                        let kind = ViolationKind::StratumIncomplete { stratum: current_stratum, missing: missing.clone() };
                        fail(&mut report, index, kind);
                        return report;
                    }
                    report.strata_checked.push(current_stratum);
                }
                current_stratum += 1;
            }
        }
        seen.insert(w.clone(), index);
        report.words.push(w.clone());
        report.outputs += 1;
        prev = w;
    }
    report
}

/// Bitmask search for a Hamiltonian path in the graph on `n` nodes with
/// edges given by `adj`; returns one such path if it exists.
pub fn hamiltonian_path(n: usize, adj: &dyn Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let full = (1usize << n) - 1;
    // reach[mask] has bit v set iff some path covers exactly `mask` and ends at v.
    let mut reach = vec![0u32; 1 << n];
    for v in 0..n {
        reach[1 << v] |= 1 << v;
    }
    for mask in 1..=full {
        let ends = reach[mask];
        if ends == 0 {
            continue;
        }
        for v in 0..n {
            if ends & (1 << v) == 0 {
                continue;
            }
            for u in 0..n {
                if mask & (1 << u) == 0 && adj(v, u) {
                    reach[mask | (1 << u)] |= 1 << u;
                }
            }
        }
    }
    let mut end = (0..n).find(|&v| reach[full] & (1 << v) != 0)?;
    let mut mask = full;
    let mut path = vec![end];
    while mask.count_ones() > 1 {
        let rest = mask & !(1 << end);
        let prev = (0..n).find(|&u| reach[rest] & (1 << u) != 0 && adj(u, end)).unwrap();
        path.push(prev);
        mask = rest;
        end = prev;
    }
    path.reverse();
    Some(path)
}

/// Whether `words` split into at most `t` sequences, each visiting its words
/// once with consecutive distances at most `d`.
pub fn check_td_orderable(words: &[String], t: usize, d: usize, m: Metric) -> Result<bool, OracleError> {
    let n = words.len();
    if n > MAX_ORDERING_WORDS {
        return Err(OracleError::TooManyWords { got: n, cap: MAX_ORDERING_WORDS });
    }
    if n == 0 {
        return Ok(true);
    }
    let mut close = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            close[i][j] = i != j && naive_distance(&words[i], &words[j], m) <= d;
        }
    }
    let full = (1usize << n) - 1;
    let mut reach = vec![0u32; 1 << n];
    for v in 0..n {
        reach[1 << v] = 1 << v;
    }
    for mask in 1..=full {
        let ends = reach[mask];
        if ends == 0 {
            continue;
        }
        for v in (0..n).filter(|v| ends & (1 << v) != 0) {
            for u in (0..n).filter(|&u| mask & (1 << u) == 0 && close[v][u]) {
                reach[mask | (1 << u)] |= 1 << u;
            }
        }
    }
    // parts[mask]: fewest paths covering exactly `mask`.
    let inf = usize::MAX;
    let mut parts = vec![inf; 1 << n];
    parts[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        while sub > 0 {
            if sub & low != 0 && reach[sub] != 0 && parts[mask ^ sub] != inf {
                parts[mask] = parts[mask].min(parts[mask ^ sub] + 1);
            }
            sub = (sub - 1) & mask;
        }
    }
    Ok(parts[full] <= t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumVerdict {
    pub stratum: usize,
    pub words: usize,
    pub components: usize,
}

impl StratumVerdict {
    pub fn connected(&self) -> bool {
        self.components <= 1
    }
}

/// Number of connected components of `words` under "distance at most d".
pub fn components(words: &[String], d: usize, m: Metric, alphabet: &[char]) -> usize {
    let n = words.len();
    let index: HashMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    // Cheap pass: neighbours one or two edits away.
    if m != Metric::Levenshtein {
        let reach = d.min(2);
        for (i, w) in words.iter().enumerate() {
            let mut frontier = vec![w.chars().collect::<Vec<char>>()];
            for _ in 0..reach {
                let mut next = Vec::new();
                for x in &frontier {
                    let mut around: Vec<Vec<char>> = Vec::new();
                    if !x.is_empty() {
                        around.push(x[..x.len() - 1].to_vec());
                        if m == Metric::PushPop {
                            around.push(x[1..].to_vec());
                        }
                    }
                    for &c in alphabet {
                        let mut r = x.clone();
                        r.push(c);
                        around.push(r);
                        if m == Metric::PushPop {
                            let mut l = vec![c];
                            l.extend_from_slice(x);
                            around.push(l);
                        }
                    }
                    for y in around {
                        let s: String = y.iter().collect();
                        if let Some(&j) = index.get(s.as_str()) {
                            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                            parent[a] = b;
                        }
                        next.push(y);
                    }
                }
                frontier = next;
            }
        }
    }
    // Exhaustive pass across whatever components remain.
    let lens: Vec<usize> = words.iter().map(|w| w.chars().count()).collect();
    for i in 0..n {
        for j in i + 1..n {
            if lens[i].abs_diff(lens[j]) > d {
                continue;
            }
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b && naive_distance(&words[i], &words[j], m) <= d {
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// Connectivity of strata `1..=i_max` under distance bound `p.d`.
pub fn check_stratum_connectivity(a: &Dfa, p: &StratumParams, i_max: usize, m: Metric) -> Result<Vec<StratumVerdict>, OracleError> {
    let t = Table::new(a);
    let mut out = Vec::new();
    for i in 1..=i_max {
        let words = t
            .words_in_lengths((i - 1) * p.ell, i * p.ell - 1, MAX_CONNECTIVITY_WORDS)
            .ok_or(OracleError::StratumTooLarge { stratum: i, cap: MAX_CONNECTIVITY_WORDS })?;
        let comps = components(&words, p.d, m, &t.alphabet);
        out.push(StratumVerdict { stratum: i, words: words.len(), components: comps });
    }
    Ok(out)
}

/// Push-pop distance from `w` to the nearest word of the language: pop to a
/// factor, then complete it by the shortest context around the state pair.
pub fn distance_to_language(a: &Dfa, w: &str) -> Option<usize> {
    let t = Table::new(a);
    let n = a.size();
    let mut from_init = vec![usize::MAX; n];
    from_init[t.initial] = 0;
    let mut queue = VecDeque::from([t.initial]);
    while let Some(p) = queue.pop_front() {
        for (&(x, _), &q) in &t.moves {
            if x == p && from_init[q] == usize::MAX {
                from_init[q] = from_init[p] + 1;
                queue.push_back(q);
            }
        }
    }
    let mut to_final = vec![usize::MAX; n];
    let mut queue: VecDeque<usize> = t.finals.iter().copied().collect();
    for &f in &t.finals {
        to_final[f] = 0;
    }
    while let Some(q) = queue.pop_front() {
        for (&(p, _), &x) in &t.moves {
            if x == q && to_final[p] == usize::MAX {
                to_final[p] = to_final[q] + 1;
                queue.push_back(p);
            }
        }
    }
    let chars: Vec<char> = w.chars().collect();
    let mut best: Option<usize> = None;
    for i in 0..=chars.len() {
        for j in i..=chars.len() {
            let popped = chars.len() - (j - i);
            for q in 0..n {
                if from_init[q] == usize::MAX {
                    continue;
                }
                let end = chars[i..j].iter().try_fold(q, |p, c| t.moves.get(&(p, *c)).copied());
                if let Some(e) = end.filter(|&e| to_final[e] != usize::MAX) {
                    let cost = popped + from_init[q] + to_final[e];
                    best = Some(best.map_or(cost, |b| b.min(cost)));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bfs_matches_small_cases() {
        let ab = ['a', 'b'];
        assert_eq!(edit_graph_distance("ab", "ba", &ab, Metric::PushPop), 2);
        assert_eq!(edit_graph_distance("ab", "ba", &ab, Metric::PushPopRight), 4);
        assert_eq!(edit_graph_distance("ab", "ba", &ab, Metric::Levenshtein), 2);
        assert_eq!(naive_distance("kitten", "sitting", Metric::Levenshtein), 3);
    }

    #[test]
    fn td_orderability_examples() {
        let mut sample = strs(&["", "a", "aa", "aaa", "aaaa", "aaaaa"]);
        sample.extend(strs(&["b", "bb", "bbb", "bbbb", "bbbbb"]));
        assert!(check_td_orderable(&sample, 2, 1, Metric::Levenshtein).unwrap());
        // The empty word bridges the two halves: a^5 .. a, ε, b .. b^5.
        assert!(check_td_orderable(&sample, 1, 1, Metric::Levenshtein).unwrap());
        let far: Vec<String> = (4..=8).flat_map(|n| ["a".repeat(n), "b".repeat(n)]).collect();
        assert!(check_td_orderable(&far, 2, 1, Metric::Levenshtein).unwrap());
        for d in 1..=3 {
            assert!(!check_td_orderable(&far, 1, d, Metric::Levenshtein).unwrap());
        }
        let even: Vec<String> = (0..=4).map(|i| "a".repeat(2 * i)).collect();
        assert!(check_td_orderable(&even, 1, 2, Metric::Levenshtein).unwrap());
        let many: Vec<String> = (0..13).map(|i| "a".repeat(i)).collect();
        assert!(check_td_orderable(&many, 1, 1, Metric::Levenshtein).is_err());
    }

    #[test]
    fn hamiltonian_on_path_and_star() {
        let path = hamiltonian_path(4, &|u, v| u.abs_diff(v) == 1).unwrap();
        assert!(path == [0, 1, 2, 3] || path == [3, 2, 1, 0]);
        // A star with three leaves has no Hamiltonian path.
        assert!(hamiltonian_path(4, &|u, v| (u == 0) != (v == 0)).is_none());
    }

    #[test]
    fn verify_negative_controls() {
        let a = Dfa::from_regex("a*", None).unwrap();
        let good: Vec<EditScript> = (0..5).map(|i| if i == 0 { EditScript::new() } else { "+r:a".parse().unwrap() }).collect();
        let opts = VerifyOptions { bound: 3, metric: Metric::PushPop, ell: Some(2) };
        assert!(verify_stream(&good, &a, &a, &opts).is_clean());
        let mut dup = good.clone();
        dup.insert(2, "+r:a -r".parse().unwrap());
        let r = verify_stream(&dup, &a, &a, &opts);
        assert!(matches!(r.violation, Some(Violation { index: 2, kind: ViolationKind::Repeated { .. } })));
        let ab = Dfa::from_regex("a*", Some(&['a', 'b'])).unwrap();
        let outside: Vec<EditScript> = vec!["".parse().unwrap(), "+r:b".parse().unwrap()];
        let r = verify_stream(&outside, &ab, &ab, &opts);
        assert!(matches!(r.violation, Some(Violation { index: 1, kind: ViolationKind::NotInLanguage { .. } })));
    }

    #[test]
    fn distance_to_language_small() {
        let a = Dfa::from_regex("a*b*", None).unwrap();
        assert_eq!(distance_to_language(&a, "ba"), Some(1));
        assert_eq!(distance_to_language(&a, "aab"), Some(0));
        assert_eq!(distance_to_language(&a, "bab"), Some(1));
    }
}

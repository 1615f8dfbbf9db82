//! Loopable states, the interchangeability relation, and the partition of a
//! language into interchangeable parts.

use std::collections::VecDeque;

use thiserror::Error;

use crate::automata::Dfa;
use crate::editops::levenshtein;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterchangeError {
    #[error("state {0} is not loopable")]
    NotLoopable(u32),
    #[error("the language is finite: no loopable states")]
    FiniteLanguage,
}

/// Strongly connected components of a graph given by successor lists,
/// as a component id per node (iterative Tarjan).
pub fn scc(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*next) {
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    comp
}

pub(crate) fn successors(a: &Dfa) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); a.size()];
    for (p, _, q) in a.transitions() {
        if !succ[p].contains(&q) {
            succ[p].push(q);
        }
    }
    succ
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopInfo {
    pub loopable: Vec<bool>,
    /// For each loopable state, a shortest nonempty word looping on it.
    pub witness: Vec<Option<String>>,
}

impl LoopInfo {
    pub fn states(&self) -> Vec<usize> {
        (0..self.loopable.len()).filter(|&q| self.loopable[q]).collect()
    }

    pub fn any(&self) -> bool {
        self.loopable.iter().any(|&b| b)
    }
}

/// Shortest nonempty word leading from `q` back to `q`, if any.
pub fn shortest_loop(a: &Dfa, q: usize) -> Option<String> {
    let n = a.size();
    let mut prev: Vec<Option<(usize, char)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for (li, &c) in a.alphabet().iter().enumerate() {
        if let Some(t) = a.step(q, li) {
            if t == q {
                return Some(c.to_string());
            }
            if !seen[t] {
                seen[t] = true;
                prev[t] = Some((q, c));
                queue.push_back(t);
            }
        }
    }
    while let Some(p) = queue.pop_front() {
        for (li, &c) in a.alphabet().iter().enumerate() {
            let Some(t) = a.step(p, li) else { continue };
            if t == q {
                let mut word = vec![c];
                let mut cur = p;
                while let Some((from, letter)) = prev[cur] {
                    word.push(letter);
                    if from == q {
                        break;
                    }
                    cur = from;
                }
                word.reverse();
                return Some(word.into_iter().collect());
            }
            if !seen[t] {
                seen[t] = true;
                prev[t] = Some((p, c));
                queue.push_back(t);
            }
        }
    }
    None
}

pub fn loopable_states(a: &Dfa) -> LoopInfo {
    let succ = successors(a);
    let comp = scc(&succ);
    let mut size = vec![0usize; a.size()];
    for &c in &comp {
        size[c] += 1;
    }
    let loopable: Vec<bool> = (0..a.size()).map(|q| size[comp[q]] > 1 || succ[q].contains(&q)).collect();
    let witness = (0..a.size()).map(|q| if loopable[q] { shortest_loop(a, q) } else { None }).collect();
    LoopInfo { loopable, witness }
}

fn reach_from(a: &Dfa, q: usize) -> Vec<bool> {
    let mut seen = vec![false; a.size()];
    seen[q] = true;
    let mut stack = vec![q];
    while let Some(p) = stack.pop() {
        for li in 0..a.alphabet().len() {
            if let Some(t) = a.step(p, li) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen
}

fn require_loopable(a: &Dfa, info: &LoopInfo, q: usize) -> Result<(), InterchangeError> {
    if info.loopable[q] {
        Ok(())
    } else {
        Err(InterchangeError::NotLoopable(a.name(q)))
    }
}

/// A directed path exists from one state to the other, in either direction.
pub fn connected(a: &Dfa, q: usize, q2: usize) -> Result<bool, InterchangeError> {
    let info = loopable_states(a);
    require_loopable(a, &info, q)?;
    require_loopable(a, &info, q2)?;
    Ok(reach_from(a, q)[q2] || reach_from(a, q2)[q])
}

fn compatible_raw(a: &Dfa, q: usize, q2: usize) -> bool {
    let n = a.size();
    let mut seen = vec![false; n * n];
    let mut stack = vec![(q, q2)];
    while let Some((p, p2)) = stack.pop() {
        for li in 0..a.alphabet().len() {
            if let (Some(t), Some(t2)) = (a.step(p, li), a.step(p2, li)) {
                if (t, t2) == (q, q2) {
                    return true;
                }
                if !seen[t * n + t2] {
                    seen[t * n + t2] = true;
                    stack.push((t, t2));
                }
            }
        }
    }
    false
}

/// The two states share a nonempty loop label: `(q, q2)` lies on a cycle of
/// the product of the automaton with itself.
pub fn compatible(a: &Dfa, q: usize, q2: usize) -> Result<bool, InterchangeError> {
    let info = loopable_states(a);
    require_loopable(a, &info, q)?;
    require_loopable(a, &info, q2)?;
    Ok(compatible_raw(a, q, q2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Connected,
    Compatible,
}

/// One step of a certificate chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classes {
    pub classes: Vec<Vec<usize>>,
    /// Links joining each class into one tree.
    pub certificates: Vec<Vec<Link>>,
}

impl Classes {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, q: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&q))
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Breadth-first distance of each state from the initial state.
pub(crate) fn depths(a: &Dfa) -> Vec<usize> {
    let mut depth = vec![usize::MAX; a.size()];
    depth[a.initial()] = 0;
    let mut queue = VecDeque::from([a.initial()]);
    while let Some(p) = queue.pop_front() {
        for li in 0..a.alphabet().len() {
            if let Some(t) = a.step(p, li) {
                if depth[t] == usize::MAX {
                    depth[t] = depth[p] + 1;
                    queue.push_back(t);
                }
            }
        }
    }
    depth
}

/// Classes of the transitive closure of connectivity and compatibility.
/// The first class holds the loopable state reached by the shortest word
/// (ties by state name); the others follow the same key.
pub fn interchangeability_classes(a: &Dfa) -> Result<Classes, InterchangeError> {
    let info = loopable_states(a);
    let loopable = info.states();
    if loopable.is_empty() {
        return Err(InterchangeError::FiniteLanguage);
    }
    let n = a.size();
    let reach: Vec<Vec<bool>> = (0..n).map(|q| if info.loopable[q] { reach_from(a, q) } else { Vec::new() }).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut links = Vec::new();
    for (i, &q) in loopable.iter().enumerate() {
        for &q2 in &loopable[i + 1..] {
            let relation = if reach[q][q2] || reach[q2][q] {
                Relation::Connected
            } else if compatible_raw(a, q, q2) {
                Relation::Compatible
            } else {
                continue;
            };
            let (x, y) = (find(&mut parent, q), find(&mut parent, q2));
            if x != y {
                parent[x] = y;
                links.push(Link { from: q, to: q2, relation });
            }
        }
    }
    let depth = depths(a);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for &q in &loopable {
        let r = find(&mut parent, q);
        match roots.iter().position(|&x| x == r) {
            Some(i) => classes[i].push(q),
            None => {
                roots.push(r);
                classes.push(vec![q]);
            }
        }
    }
    let key = |c: &Vec<usize>| c.iter().map(|&q| (depth[q], a.name(q))).min().unwrap();
    classes.sort_by_key(key);
    let certificates = classes
        .iter()
        .map(|c| links.iter().copied().filter(|l| c.contains(&l.from)).collect())
        .collect();
    Ok(Classes { classes, certificates })
}

#[derive(Clone, Debug)]
pub struct Partition {
    pub parts: Vec<Dfa>,
    /// Loopable states (indices in the original automaton) behind each part.
    pub class_of_part: Vec<Vec<usize>>,
    /// Set when the language is finite and returned whole as a single part.
    pub finite: bool,
}

impl Partition {
    pub fn t(&self) -> usize {
        self.parts.len()
    }
}

/// Splits the automaton into one interchangeable automaton per class. Each
/// state is paired with a bit recording whether a loopable state was seen;
/// part `i` drops the bit-1 copies of other classes' states, and only the
/// first part accepts in bit 0 (the non-loopable words). Part states are
/// named `2 * name + bit`.
pub fn build_partition(a: &Dfa) -> Partition {
    let a = a.trim();
    let classes = match interchangeability_classes(&a) {
        Ok(c) => c,
        Err(_) => return Partition { parts: vec![a.clone()], class_of_part: vec![Vec::new()], finite: true },
    };
    let info = loopable_states(&a);
    let n = a.size();
    let mut parts = Vec::new();
    for (i, class) in classes.classes.iter().enumerate() {
        let keep = |q: usize, bit: usize| bit == 0 || !info.loopable[q] || class.contains(&q);
        let mut names = Vec::new();
        let mut finals = Vec::new();
        let mut trans = Vec::new();
        // Dense index of (q, bit) is 2q + bit, including dropped copies, which
        // stay unreachable and disappear in the trim.
        for q in 0..n {
            for bit in 0..2 {
                names.push(2 * a.name(q) + bit as u32);
                if a.is_final(q) && keep(q, bit) && (i == 0 || bit == 1) {
                    finals.push(2 * q + bit);
                }
                if !keep(q, bit) {
                    continue;
                }
                for (li, &c) in a.alphabet().iter().enumerate() {
                    if let Some(t) = a.step(q, li) {
                        let tbit = bit | usize::from(info.loopable[t]);
                        if keep(t, tbit) {
                            trans.push((2 * q + bit, c, 2 * t + tbit));
                        }
                    }
                }
            }
        }
        let init_bit = usize::from(info.loopable[a.initial()]);
        let initial = 2 * a.initial() + init_bit;
        let dup = Dfa::new(a.alphabet().to_vec(), names, initial, &finals, &trans).expect("well-formed");
        parts.push(dup.trim());
    }
    Partition { parts, class_of_part: classes.classes.clone(), finite: false }
}

/// Accepted words whose run never visits a loopable state.
pub fn nonloopable_words(a: &Dfa) -> Vec<String> {
    let info = loopable_states(a);
    let mut out = Vec::new();
    if info.loopable[a.initial()] {
        return out;
    }
    let mut stack = vec![(a.initial(), String::new())];
    while let Some((q, w)) = stack.pop() {
        if a.is_final(q) {
            out.push(w.clone());
        }
        for (li, &c) in a.alphabet().iter().enumerate() {
            if let Some(t) = a.step(q, li).filter(|&t| !info.loopable[t]) {
                stack.push((t, format!("{w}{c}")));
            }
        }
    }
    sort_words(a, &mut out);
    out
}

/// Sorts by length, then lexicographically by alphabet order.
pub fn sort_words(a: &Dfa, words: &mut [String]) {
    words.sort_by_cached_key(|w| {
        let idx: Vec<usize> = w.chars().map(|c| a.letter_index(c).unwrap_or(usize::MAX)).collect();
        (idx.len(), idx)
    });
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeparationReport {
    pub pairs_checked: usize,
    /// `(u, v, distance)` with u, v in different classes and distance ≤ d.
    pub violations: Vec<(String, String, usize)>,
}

/// Checks that words of different classes with lengths in `min_len..=max_len`
/// are more than `d` Levenshtein edits apart.
pub fn class_separation_check(a: &Dfa, d: usize, min_len: usize, max_len: usize) -> SeparationReport {
    let mut report = SeparationReport::default();
    let Ok(classes) = interchangeability_classes(a) else { return report };
    if classes.count() < 2 {
        return report;
    }
    let mut by_class: Vec<Vec<Vec<char>>> = vec![Vec::new(); classes.count()];
    for w in a.enumerate_by_length(max_len) {
        if w.chars().count() < min_len {
            continue;
        }
        let run = a.run(&w).ok().flatten().expect("accepted words have runs");
        if let Some(c) = run.states.iter().find_map(|&q| classes.class_of(q)) {
            by_class[c].push(w.chars().collect());
        }
    }
    for i in 0..by_class.len() {
        for j in i + 1..by_class.len() {
            for u in &by_class[i] {
                for v in &by_class[j] {
                    report.pairs_checked += 1;
                    let dist = levenshtein(u, v);
                    if dist <= d {
                        report.violations.push((u.iter().collect(), v.iter().collect(), dist));
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dfa(text: &str) -> Dfa {
        text.parse().unwrap()
    }

    const A2: &str = "alphabet: a b\nstates: 0 1\ninitial: 0\nfinal: 0 1\ntrans: 0 a 0\ntrans: 0 b 1\ntrans: 1 b 1\n";
    const A4: &str = "alphabet: a b c d\nstates: 0 1 2 3 4 5 6\ninitial: 0\nfinal: 1 6\n\
        trans: 0 a 1\ntrans: 0 b 3\ntrans: 3 d 5\ntrans: 5 d 6\ntrans: 1 a 1\ntrans: 6 d 6\n\
        trans: 1 b 2\ntrans: 2 c 1\ntrans: 3 c 4\ntrans: 4 b 3\n";
    const A5: &str = "alphabet: a b\nstates: 0 1 2\ninitial: 0\nfinal: 0 1 2\n\
        trans: 0 a 1\ntrans: 1 a 1\ntrans: 0 b 2\ntrans: 2 b 2\n";

    #[test]
    fn scc_on_cycle_and_chain() {
        let comp = scc(&[vec![1], vec![2], vec![0, 3], vec![]]);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[2], comp[3]);
    }

    #[test]
    fn loopable_examples() {
        let a4 = dfa(A4);
        let names: Vec<u32> = loopable_states(&a4).states().iter().map(|&q| a4.name(q)).collect();
        assert_eq!(names, [1, 2, 3, 4, 6]);
        let a5 = dfa(A5);
        let info = loopable_states(&a5);
        assert_eq!(info.states(), [1, 2]);
        assert_eq!(info.witness[1].as_deref(), Some("a"));
        let eps = dfa("alphabet: a\nstates: 0\ninitial: 0\nfinal: 0\n");
        assert!(loopable_states(&eps).states().is_empty());
        for q in loopable_states(&a4).states() {
            let w = loopable_states(&a4).witness[q].clone().unwrap();
            assert!(w.len() <= a4.size());
            assert_eq!(a4.read_from(q, &w), Some(q));
        }
    }

    #[test]
    fn relations() {
        let a2 = dfa(A2);
        assert!(connected(&a2, 0, 1).unwrap());
        let a5 = dfa(A5);
        assert!(!connected(&a5, 1, 2).unwrap());
        assert!(!compatible(&a5, 1, 2).unwrap());
        assert!(connected(&a5, 1, 1).unwrap());
        assert!(compatible(&a5, 2, 2).unwrap());
        assert_eq!(connected(&a5, 0, 1), Err(InterchangeError::NotLoopable(0)));
        let a4 = dfa(A4);
        let (q1, q4) = (a4.index_of(1).unwrap(), a4.index_of(4).unwrap());
        assert!(compatible(&a4, q1, q4).unwrap());
    }

    #[test]
    fn class_counts() {
        assert_eq!(interchangeability_classes(&dfa(A4)).unwrap().count(), 1);
        assert_eq!(interchangeability_classes(&dfa(A5)).unwrap().count(), 2);
        let finite = dfa("alphabet: a\nstates: 0 1\ninitial: 0\nfinal: 1\ntrans: 0 a 1\n");
        assert_eq!(interchangeability_classes(&finite), Err(InterchangeError::FiniteLanguage));
    }

    #[test]
    fn a5_partition() {
        let a5 = dfa(A5);
        let p = build_partition(&a5);
        assert_eq!(p.t(), 2);
        assert_eq!(p.parts[0].enumerate_by_length(3), ["", "a", "aa", "aaa"]);
        assert_eq!(p.parts[1].enumerate_by_length(3), ["b", "bb", "bbb"]);
        for part in &p.parts {
            assert_eq!(interchangeability_classes(part).unwrap().count(), 1);
        }
    }

    #[test]
    fn nonloopable_examples() {
        assert_eq!(nonloopable_words(&dfa(A5)), [""]);
        assert!(nonloopable_words(&dfa(A4)).is_empty());
        let one = dfa("alphabet: a b\nstates: 0\ninitial: 0\nfinal: 0\ntrans: 0 a 0\ntrans: 0 b 0\n");
        assert!(nonloopable_words(&one).is_empty());
    }

    #[test]
    fn separation() {
        let a5 = dfa(A5);
        let r = class_separation_check(&a5, 1, 3, 8);
        assert!(r.pairs_checked > 0);
        assert!(r.violations.is_empty());
        assert!(class_separation_check(&a5, 5, 6, 8).violations.is_empty());
        assert_eq!(class_separation_check(&dfa(A2), 1, 0, 6).pairs_checked, 0);
        // Short words of different classes are close.
        assert!(!class_separation_check(&a5, 2, 1, 3).violations.is_empty());
    }
}

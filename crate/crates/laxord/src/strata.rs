//! Strata, stratum graphs, and the spanning-tree ordering of a stratum.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::automata::Dfa;
use crate::editops::{distance, script_between, EditOp, EditScript, Metric};
use crate::interchange::{depths, loopable_states, shortest_loop};
use crate::meter::{Meter, NoMeter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error("width and distance must be positive")]
    ZeroParameter,
    #[error("ell = {ell}, d = {d} is below the floor ell >= {}, d >= {} for k = {k}", 2 * k, 3 * k)]
    BelowFloor { ell: usize, d: usize, k: usize },
    #[error("the Levenshtein metric has no edit scripts")]
    NoScripts,
    #[error("word {0:?} appears twice")]
    DuplicateWord(String),
    #[error("stratum {stratum} is not connected: {components} components")]
    Disconnected { stratum: usize, components: usize },
    #[error("entry and exit coincide")]
    SameEndpoints,
    #[error("entry or exit is not set")]
    MissingEndpoints,
    #[error("word {0:?} is not a node of the graph")]
    NotANode(String),
    #[error("the input is not a tree")]
    NotATree,
    #[error("the language is finite")]
    FiniteLanguage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StratumParams {
    pub ell: usize,
    pub d: usize,
    pub k: usize,
}

impl StratumParams {
    /// ℓ = 8k², d = 16k².
    pub fn paper(k: usize) -> Self {
        let k = k.max(1);
        Self { ell: 8 * k * k, d: 16 * k * k, k }
    }

    /// The smallest admissible values, ℓ = 2k and d = 3k.
    pub fn tightened(k: usize) -> Self {
        let k = k.max(1);
        Self { ell: 2 * k, d: 3 * k, k }
    }

    pub fn custom(k: usize, ell: usize, d: usize) -> Result<Self, StrataError> {
        if ell == 0 || d == 0 {
            return Err(StrataError::ZeroParameter);
        }
        let k = k.max(1);
        if ell < 2 * k || d < 3 * k {
            return Err(StrataError::BelowFloor { ell, d, k });
        }
        Ok(Self { ell, d, k })
    }

    /// Stratum holding words of length `len` (strata are numbered from 1).
    pub fn stratum_of(&self, len: usize) -> usize {
        len / self.ell + 1
    }

    /// Length range `lo..hi` of stratum `i`.
    pub fn lengths(&self, i: usize) -> (usize, usize) {
        ((i - 1) * self.ell, i * self.ell)
    }
}

/// Words of `a` with length in `lo..hi`, sorted by length then alphabet order.
pub fn words_in_lengths(a: &Dfa, lo: usize, hi: usize) -> Vec<String> {
    let mut to_final = vec![usize::MAX; a.size()];
    let mut queue: VecDeque<usize> = a.finals().collect();
    for &q in &queue {
        to_final[q] = 0;
    }
    let mut preds = vec![Vec::new(); a.size()];
    for (p, _, q) in a.transitions() {
        preds[q].push(p);
    }
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q] {
            if to_final[p] == usize::MAX {
                to_final[p] = to_final[q] + 1;
                queue.push_back(p);
            }
        }
    }
    let mut out = Vec::new();
    if hi == 0 || to_final[a.initial()] >= hi {
        return out;
    }
    let mut layer = vec![(String::new(), a.initial())];
    for len in 0..hi {
        if len >= lo {
            out.extend(layer.iter().filter(|(_, q)| a.is_final(*q)).map(|(w, _)| w.clone()));
        }
        if len + 1 == hi {
            break;
        }
        let mut next = Vec::new();
        for (w, q) in &layer {
            for (li, &c) in a.alphabet().iter().enumerate() {
                if let Some(t) = a.step(*q, li).filter(|&t| to_final[t] != usize::MAX && len + 1 + to_final[t] < hi) {
                    let mut w2 = w.clone();
                    w2.push(c);
                    next.push((w2, t));
                }
            }
        }
        layer = next;
    }
    out
}

pub fn stratum(a: &Dfa, p: &StratumParams, i: usize) -> Vec<String> {
    let (lo, hi) = p.lengths(i);
    words_in_lengths(a, lo, hi)
}

/// Undirected graph on the words of a stratum, with an edge between words at
/// distance at most `d`. Edge labels are the minimal scripts of
/// [`script_between`], computed on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumGraph {
    pub index: usize,
    pub words: Vec<String>,
    pub adj: Vec<Vec<usize>>,
    pub d: usize,
    pub metric: Metric,
    pub entry: Option<usize>,
    pub exit: Option<usize>,
}

impl StratumGraph {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn position(&self, w: &str) -> Option<usize> {
        self.words.iter().position(|x| x == w)
    }

    pub fn label(&self, u: usize, v: usize) -> EditScript {
        script_between(&self.words[u], &self.words[v], self.metric).expect("stratum graphs use push-pop metrics")
    }

    /// Fixes entry and exit by word. With a single node both may name it.
    pub fn with_endpoints(mut self, entry: &str, exit: &str) -> Result<Self, StrataError> {
        let s = self.position(entry).ok_or_else(|| StrataError::NotANode(entry.to_string()))?;
        let e = self.position(exit).ok_or_else(|| StrataError::NotANode(exit.to_string()))?;
        if s == e && self.len() > 1 {
            return Err(StrataError::SameEndpoints);
        }
        self.entry = Some(s);
        self.exit = Some(e);
        Ok(self)
    }

    /// Component id of every node.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut next = 0;
        for root in 0..self.len() {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = next;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }
}

fn check_words(words: &[String], m: Metric) -> Result<(), StrataError> {
    if m == Metric::Levenshtein {
        return Err(StrataError::NoScripts);
    }
    let mut seen = HashSet::new();
    for w in words {
        if !seen.insert(w.as_str()) {
            return Err(StrataError::DuplicateWord(w.clone()));
        }
    }
    Ok(())
}

/// Builds the graph by comparing every pair of words.
pub fn stratum_graph(words: &[String], d: usize, m: Metric) -> Result<StratumGraph, StrataError> {
    check_words(words, m)?;
    let lens: Vec<usize> = words.iter().map(|w| w.chars().count()).collect();
    let mut adj = vec![Vec::new(); words.len()];
    for u in 0..words.len() {
        for v in u + 1..words.len() {
            if lens[u].abs_diff(lens[v]) <= d && distance(&words[u], &words[v], m) <= d {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    Ok(StratumGraph { index: 0, words: words.to_vec(), adj, d, metric: m, entry: None, exit: None })
}

/// Builds the same graph as [`stratum_graph`] by exploring the edit graph
/// around each word up to radius `d`. Cheap when `d` is small and the
/// stratum is large.
pub fn local_stratum_graph(words: &[String], d: usize, m: Metric, alphabet: &[char]) -> Result<StratumGraph, StrataError> {
    check_words(words, m)?;
    let index: HashMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let mut adj = vec![Vec::new(); words.len()];
    for (u, w) in words.iter().enumerate() {
        let mut seen: HashSet<String> = HashSet::from([w.clone()]);
        let mut frontier = vec![w.clone()];
        for _ in 0..d {
            let mut next = Vec::new();
            for x in &frontier {
                for y in neighbours(x, alphabet, m) {
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        adj[u] = seen.iter().filter_map(|x| index.get(x.as_str()).copied()).filter(|&v| v != u).collect();
        adj[u].sort_unstable();
    }
    Ok(StratumGraph { index: 0, words: words.to_vec(), adj, d, metric: m, entry: None, exit: None })
}

fn neighbours(w: &str, alphabet: &[char], m: Metric) -> Vec<String> {
    let mut out = Vec::new();
    for &c in alphabet {
        if m.allows(EditOp::PushL(c)) {
            out.push(format!("{c}{w}"));
        }
        out.push(format!("{w}{c}"));
    }
    if !w.is_empty() {
        if m.allows(EditOp::PopL) {
            let mut it = w.chars();
            it.next();
            out.push(it.collect());
        }
        let mut it = w.chars();
        it.next_back();
        out.push(it.collect());
    }
    out
}

/// Words of `a` reachable from `w` by popping `i` letters on the left and `j`
/// on the right, then pushing `x` on the left and `y` on the right, with
/// `i + j + |x| + |y| <= r`. The automaton prunes `x` and `y` as they grow.
fn push_pop_candidates(a: &Dfa, w: &[char], r: usize, out: &mut Vec<Vec<char>>) {
    let n = w.len();
    let k = a.alphabet().len();
    for i in 0..=r.min(n) {
        for j in 0..=(r - i).min(n - i) {
            let core = &w[i..n - j];
            let rest = r - i - j;
            let mut xs: Vec<(usize, Vec<char>)> = vec![(a.initial(), Vec::new())];
            while let Some((q, x)) = xs.pop() {
                if let Some(q2) = core.iter().try_fold(q, |s, &c| a.next(s, c)) {
                    let mut ys: Vec<(usize, Vec<char>)> = vec![(q2, Vec::new())];
                    while let Some((p, y)) = ys.pop() {
                        if a.is_final(p) && (i + j + x.len() + y.len() > 0) {
                            let mut v = x.clone();
                            v.extend_from_slice(core);
                            v.extend_from_slice(&y);
                            out.push(v);
                        }
                        if x.len() + y.len() < rest {
                            for li in 0..k {
                                if let Some(t) = a.step(p, li) {
                                    let mut y2 = y.clone();
                                    y2.push(a.alphabet()[li]);
                                    ys.push((t, y2));
                                }
                            }
                        }
                    }
                }
                if x.len() < rest {
                    for li in 0..k {
                        if let Some(t) = a.step(q, li) {
                            let mut x2 = x.clone();
                            x2.push(a.alphabet()[li]);
                            xs.push((t, x2));
                        }
                    }
                }
            }
        }
    }
}

/// Builds a stratum graph by growing the radius from 1 to `d`, stopping as
/// soon as the graph is connected. Past radius 1 only words outside the
/// largest component look for new neighbours, so the graph is a connected
/// subgraph of the full one whenever the full one is connected. Each edge
/// joins words at distance at most its radius.
pub fn grown_stratum_graph(a: &Dfa, words: &[String], d: usize, meter: &mut dyn Meter) -> Result<StratumGraph, StrataError> {
    check_words(words, Metric::PushPop)?;
    let index: HashMap<Vec<char>, usize> = words.iter().enumerate().map(|(i, w)| (w.chars().collect(), i)).collect();
    let chars: Vec<Vec<char>> = words.iter().map(|w| w.chars().collect()).collect();
    let n = words.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut components = n;
    let mut candidates = Vec::new();
    for r in 1..=d {
        if components <= 1 {
            break;
        }
        let explorers: Vec<usize> = if r == 1 {
            (0..n).collect()
        } else {
            let big = (0..n).map(|u| uf_find(&mut parent, u)).max_by_key(|&x| (size[x], usize::MAX - x)).unwrap();
            (0..n).filter(|&u| uf_find(&mut parent, u) != big).collect()
        };
        for u in explorers {
            candidates.clear();
            push_pop_candidates(a, &chars[u], r, &mut candidates);
            meter.tick(candidates.len() as u64 + 1);
            for v in &candidates {
                let Some(&v) = index.get(v) else { continue };
                if v == u {
                    continue;
                }
                adj[u].push(v);
                adj[v].push(u);
                let (x, y) = (uf_find(&mut parent, u), uf_find(&mut parent, v));
                if x != y {
                    let (small, large) = if size[x] < size[y] { (x, y) } else { (y, x) };
                    parent[small] = large;
                    size[large] += size[small];
                    components -= 1;
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    Ok(StratumGraph { index: 0, words: words.to_vec(), adj, d, metric: Metric::PushPop, entry: None, exit: None })
}

fn uf_find(parent: &mut [usize], x: usize) -> usize {
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

pub fn is_d_connected(g: &StratumGraph) -> bool {
    g.component_count() <= 1
}

/// A spanning tree as parent links from a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
}

impl SpanningTree {
    /// Undirected adjacency, children in discovery order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.parent.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                adj[p].push(v);
                adj[v].push(p);
            }
        }
        adj
    }

    /// Nodes on the tree path from `u` to `v`, both included.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let (mut a, mut b) = (u, v);
        let mut up = vec![a];
        let mut down = vec![b];
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
            up.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
            down.push(b);
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
            up.push(a);
            down.push(b);
        }
        down.pop();
        up.extend(down.into_iter().rev());
        up
    }
}

/// Depth-first spanning tree from `root`; children are discovered in
/// adjacency order.
pub fn spanning_tree(g: &StratumGraph, root: usize) -> Result<SpanningTree, StrataError> {
    let n = g.len();
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    depth[root] = 0;
    let mut stack = vec![(root, 0usize)];
    let mut reached = 1;
    while let Some(&mut (u, ref mut next)) = stack.last_mut() {
        if let Some(&v) = g.adj[u].get(*next) {
            *next += 1;
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                parent[v] = Some(u);
                reached += 1;
                stack.push((v, 0));
            }
        } else {
            stack.pop();
        }
    }
    if reached < n {
        return Err(StrataError::Disconnected { stratum: g.index, components: g.component_count() });
    }
    Ok(SpanningTree { root, parent, depth })
}

#[derive(Clone, Copy)]
enum Step {
    Explore(usize),
    Enum(usize),
}

/// Orders the nodes of a tree from `s` to `e` so that consecutive nodes are
/// at tree distance at most 3. Nodes on the `s`–`e` path are special and
/// their special child is explored last; even depths are listed before
/// their subtrees, odd depths after, and odd special nodes just before
/// their special child. Once `e` is reached, its subtree is listed with `e`
/// at odd depth.
pub fn tree_ordering(adj: &[Vec<usize>], s: usize, e: usize) -> Result<Vec<usize>, StrataError> {
    let n = adj.len();
    if s == e {
        return Err(StrataError::SameEndpoints);
    }
    if s >= n || e >= n || adj.iter().map(Vec::len).sum::<usize>() != 2 * (n - 1) {
        return Err(StrataError::NotATree);
    }
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    depth[s] = 0;
    let mut stack = vec![s];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if v == parent[u] {
                continue;
            }
            if depth[v] != usize::MAX {
                return Err(StrataError::NotATree);
            }
            depth[v] = depth[u] + 1;
            parent[v] = u;
            children[u].push(v);
            stack.push(v);
        }
    }
    if depth.contains(&usize::MAX) {
        return Err(StrataError::NotATree);
    }
    let mut special = vec![false; n];
    let mut x = e;
    special[e] = true;
    while x != s {
        let p = parent[x];
        special[p] = true;
        let kids = &mut children[p];
        let pos = kids.iter().position(|&c| c == x).unwrap();
        kids.remove(pos);
        kids.push(x);
        x = p;
    }

    let mut out = Vec::with_capacity(n);
    let mut stack = vec![Step::Explore(s)];
    let mut second = false;
    loop {
        let Some(step) = stack.pop() else {
            if second {
                break;
            }
            return Err(StrataError::NotATree);
        };
        let u = match step {
            Step::Enum(u) => {
                out.push(u);
                continue;
            }
            Step::Explore(u) => u,
        };
        if u == e && !second {
            debug_assert!(stack.is_empty());
            second = true;
            stack.clear();
        }
        let odd = if second { (depth[u] - depth[e]) % 2 == 0 } else { depth[u] % 2 == 1 };
        let kids = &children[u];
        let mut items = Vec::with_capacity(kids.len() + 1);
        if !odd {
            items.push(Step::Enum(u));
            items.extend(kids.iter().map(|&c| Step::Explore(c)));
        } else if special[u] && !second {
            let (last, rest) = kids.split_last().expect("special nodes other than the exit have a special child");
            items.extend(rest.iter().map(|&c| Step::Explore(c)));
            items.push(Step::Enum(u));
            items.push(Step::Explore(*last));
        } else {
            items.extend(kids.iter().map(|&c| Step::Explore(c)));
            items.push(Step::Enum(u));
        }
        stack.extend(items.into_iter().rev());
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ordering {
    pub words: Vec<String>,
    /// `scripts[j]` turns `words[j]` into `words[j + 1]`.
    pub scripts: Vec<EditScript>,
}

impl Ordering {
    pub fn max_script(&self) -> usize {
        self.scripts.iter().map(EditScript::len).max().unwrap_or(0)
    }
}

pub fn order_stratum(g: &StratumGraph) -> Result<Ordering, StrataError> {
    order_stratum_metered(g, &mut NoMeter)
}

/// Orders a connected stratum graph from its entry to its exit. Each script
/// concatenates the labels of the at most three tree edges between
/// consecutive words.
pub fn order_stratum_metered(g: &StratumGraph, meter: &mut dyn Meter) -> Result<Ordering, StrataError> {
    let (Some(s), Some(e)) = (g.entry, g.exit) else {
        return Err(StrataError::MissingEndpoints);
    };
    if g.len() == 1 {
        return Ok(Ordering { words: g.words.clone(), scripts: Vec::new() });
    }
    if s == e {
        return Err(StrataError::SameEndpoints);
    }
    let tree = spanning_tree(g, s)?;
    meter.tick(g.len() as u64);
    let order = tree_ordering(&tree.adjacency(), s, e)?;
    meter.tick(g.len() as u64);
    let mut scripts = Vec::with_capacity(order.len() - 1);
    for pair in order.windows(2) {
        let path = tree.path(pair[0], pair[1]);
        let mut script = EditScript::new();
        for step in path.windows(2) {
            script.extend(&g.label(step[0], step[1]));
        }
        meter.tick(script.len() as u64 + 1);
        scripts.push(script);
    }
    let words = order.iter().map(|&i| g.words[i].clone()).collect();
    Ok(Ordering { words, scripts })
}

/// Entry and exit words of one stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rung {
    pub stratum: usize,
    /// Absent for the first stratum, where any start will do.
    pub entry: Option<String>,
    pub exit: String,
}

/// The words `r z^j t` through a loopable state, split by stratum: the
/// shortest one of each stratum enters it and the longest leaves it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ladder {
    pub r: String,
    pub z: String,
    pub t: String,
    pub params: StratumParams,
    next: usize,
}

pub fn ladder(a: &Dfa, p: &StratumParams) -> Result<Ladder, StrataError> {
    let k = a.size().max(1);
    if p.ell < 2 * k || p.d < 3 * k {
        return Err(StrataError::BelowFloor { ell: p.ell, d: p.d, k });
    }
    let info = loopable_states(a);
    let depth = depths(a);
    let q = info
        .states()
        .into_iter()
        .filter(|&q| depth[q] != usize::MAX)
        .min_by_key(|&q| (depth[q], a.name(q)))
        .ok_or(StrataError::FiniteLanguage)?;
    let r = shortest_word(a, a.initial(), |x| x == q).expect("loopable state is reachable");
    let t = shortest_word(a, q, |x| a.is_final(x)).ok_or(StrataError::FiniteLanguage)?;
    let z = shortest_loop(a, q).expect("loopable");
    Ok(Ladder { r, z, t, params: *p, next: 1 })
}

fn shortest_word(a: &Dfa, from: usize, goal: impl Fn(usize) -> bool) -> Option<String> {
    let mut prev: Vec<Option<(usize, char)>> = vec![None; a.size()];
    let mut seen = vec![false; a.size()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        if goal(p) {
            let mut word = Vec::new();
            let mut cur = p;
            while let Some((q, c)) = prev[cur] {
                word.push(c);
                cur = q;
            }
            return Some(word.into_iter().rev().collect());
        }
        for (li, &c) in a.alphabet().iter().enumerate() {
            if let Some(t) = a.step(p, li) {
                if !seen[t] {
                    seen[t] = true;
                    prev[t] = Some((p, c));
                    queue.push_back(t);
                }
            }
        }
    }
    None
}

impl Ladder {
    pub fn word(&self, j: usize) -> String {
        format!("{}{}{}", self.r, self.z.repeat(j), self.t)
    }

    pub fn rung(&self, i: usize) -> Rung {
        let (lo, hi) = self.params.lengths(i);
        let base = self.r.chars().count() + self.t.chars().count();
        let step = self.z.chars().count();
        let first = lo.saturating_sub(base).div_ceil(step);
        let last = (hi - 1 - base) / step;
        debug_assert!(first <= last);
        let entry = (i > 1).then(|| self.word(first));
        Rung { stratum: i, entry, exit: self.word(last) }
    }
}

impl Iterator for Ladder {
    type Item = Rung;

    fn next(&mut self) -> Option<Rung> {
        let rung = self.rung(self.next);
        self.next += 1;
        Some(rung)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn params() {
        assert_eq!(StratumParams::paper(2), StratumParams { ell: 32, d: 64, k: 2 });
        assert_eq!(StratumParams::tightened(1), StratumParams { ell: 2, d: 3, k: 1 });
        assert_eq!(StratumParams::custom(2, 3, 6), Err(StrataError::BelowFloor { ell: 3, d: 6, k: 2 }));
        assert_eq!(StratumParams::custom(1, 0, 6), Err(StrataError::ZeroParameter));
        let p = StratumParams::paper(1);
        assert_eq!(p.stratum_of(7), 1);
        assert_eq!(p.stratum_of(8), 2);
    }

    #[test]
    fn strata_of_examples() {
        let a1 = Dfa::from_regex("(a+b)*", None).unwrap();
        assert_eq!(stratum(&a1, &StratumParams::paper(1), 1).len(), 255);
        let a5 = Dfa::from_regex("a*+b*", None).unwrap();
        let s2 = stratum(&a5, &StratumParams::paper(1), 2);
        assert_eq!(s2.len(), 16);
        assert!(s2.iter().all(|w| (8..16).contains(&w.len())));
        let a2 = Dfa::from_regex("a*b*", None).unwrap();
        assert_eq!(words_in_lengths(&a2, 2, 4), a2.enumerate_by_length(3).into_iter().filter(|w| w.len() >= 2).collect::<Vec<_>>());
    }

    #[test]
    fn small_graph() {
        let g = stratum_graph(&strings(&["", "a", "aa", "b", "bb"]), 1, Metric::PushPop).unwrap();
        assert_eq!(g.adj, [vec![1, 3], vec![0, 2], vec![1], vec![0, 4], vec![3]]);
        let local = local_stratum_graph(&g.words, 1, Metric::PushPop, &['a', 'b']).unwrap();
        assert_eq!(local.adj, g.adj);
        assert!(is_d_connected(&g));
        assert_eq!(stratum_graph(&strings(&["a", "a"]), 1, Metric::PushPop), Err(StrataError::DuplicateWord("a".into())));
        assert_eq!(stratum_graph(&[], 1, Metric::PushPop).unwrap().component_count(), 0);
    }

    #[test]
    fn split_stratum_is_disconnected() {
        let words: Vec<String> = (10..16).flat_map(|n| ["a".repeat(n), "b".repeat(n)]).collect();
        let g = stratum_graph(&words, 4, Metric::PushPop).unwrap();
        assert!(!is_d_connected(&g));
        assert_eq!(g.component_count(), 2);
    }

    #[test]
    fn grown_graph_is_connected_subgraph() {
        let a4: Dfa = "alphabet: a b c d\nstates: 0 1 2 3 4 5 6\ninitial: 0\nfinal: 1 6\n\
            trans: 0 a 1\ntrans: 0 b 3\ntrans: 3 d 5\ntrans: 5 d 6\ntrans: 1 a 1\ntrans: 6 d 6\n\
            trans: 1 b 2\ntrans: 2 c 1\ntrans: 3 c 4\ntrans: 4 b 3\n"
            .parse()
            .unwrap();
        let words = words_in_lengths(&a4, 4, 9);
        let full = stratum_graph(&words, 6, Metric::PushPop).unwrap();
        let grown = grown_stratum_graph(&a4, &words, 6, &mut NoMeter).unwrap();
        assert!(is_d_connected(&full));
        assert!(is_d_connected(&grown));
        for (u, list) in grown.adj.iter().enumerate() {
            for v in list {
                assert!(full.adj[u].contains(v));
            }
        }
        let ab = Dfa::from_regex("(a+b)*", None).unwrap();
        let words = words_in_lengths(&ab, 2, 4);
        let grown = grown_stratum_graph(&ab, &words, 3, &mut NoMeter).unwrap();
        let one = stratum_graph(&words, 1, Metric::PushPop).unwrap();
        assert_eq!(grown.adj, one.adj);
        let split: Vec<String> = (10..16).flat_map(|n| ["a".repeat(n), "b".repeat(n)]).collect();
        let apb = Dfa::from_regex("a*+b*", None).unwrap();
        assert_eq!(grown_stratum_graph(&apb, &split, 4, &mut NoMeter).unwrap().component_count(), 2);
    }

    #[test]
    fn path_ordering() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        assert_eq!(tree_ordering(&adj, 0, 2).unwrap(), [0, 1, 2]);
        assert_eq!(tree_ordering(&adj, 0, 0), Err(StrataError::SameEndpoints));
        assert_eq!(tree_ordering(&[vec![1], vec![0], vec![]], 0, 1), Err(StrataError::NotATree));
    }

    #[test]
    fn chain_stratum_of_a_star() {
        let words: Vec<String> = (8..16).map(|n| "a".repeat(n)).collect();
        let g = stratum_graph(&words, 1, Metric::PushPop).unwrap().with_endpoints(&words[0], &words[7]).unwrap();
        let o = order_stratum(&g).unwrap();
        assert_eq!(o.words, words);
        assert_eq!(o.max_script(), 1);
    }

    #[test]
    fn ladder_for_a_star() {
        let a = Dfa::from_regex("a*", None).unwrap();
        let mut l = ladder(&a, &StratumParams::paper(1)).unwrap();
        assert_eq!(l.next().unwrap(), Rung { stratum: 1, entry: None, exit: "a".repeat(7) });
        assert_eq!(l.next().unwrap(), Rung { stratum: 2, entry: Some("a".repeat(8)), exit: "a".repeat(15) });
        let fin = Dfa::from_regex("ab", None).unwrap();
        assert_eq!(ladder(&fin, &StratumParams::paper(4)), Err(StrataError::FiniteLanguage));
        assert!(matches!(ladder(&fin, &StratumParams { ell: 1, d: 1, k: 1 }), Err(StrataError::BelowFloor { .. })));
    }
}

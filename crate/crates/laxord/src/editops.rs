//! Push-pop edit operations, scripts, and word distances.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EditOp {
    PushL(char),
    PushR(char),
    PopL,
    PopR,
}

impl EditOp {
    pub fn is_right(self) -> bool {
        matches!(self, EditOp::PushR(_) | EditOp::PopR)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EditScript(pub Vec<EditOp>);

impl EditScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ops(&self) -> &[EditOp] {
        &self.0
    }

    pub fn push(&mut self, op: EditOp) {
        self.0.push(op);
    }

    pub fn extend(&mut self, other: &EditScript) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn only_right(&self) -> bool {
        self.0.iter().all(|op| op.is_right())
    }

    /// Pops everything from the right, then pushes `to` from the right.
    pub fn rebuild(from_len: usize, to: &str) -> Self {
        let mut s = EditScript(vec![EditOp::PopR; from_len]);
        s.0.extend(to.chars().map(EditOp::PushR));
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    PushPop,
    PushPopRight,
    Levenshtein,
}

impl Metric {
    pub fn allows(self, op: EditOp) -> bool {
        match self {
            Metric::PushPop => true,
            Metric::PushPopRight => op.is_right(),
            Metric::Levenshtein => false,
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pp" => Ok(Metric::PushPop),
            "ppr" => Ok(Metric::PushPopRight),
            "lev" => Ok(Metric::Levenshtein),
            _ => Err(format!("unknown metric {s:?} (expected pp, ppr or lev)")),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::PushPop => "pp",
            Metric::PushPopRight => "ppr",
            Metric::Levenshtein => "lev",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EditError {
    #[error("pop on empty word at op {index}")]
    PopOnEmpty { index: usize },
    #[error("bad script token {0:?}")]
    BadToken(String),
    #[error("no edit scripts exist for the levenshtein metric")]
    NoScripts,
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditOp::PushL(c) => write!(f, "+l:{c}"),
            EditOp::PushR(c) => write!(f, "+r:{c}"),
            EditOp::PopL => f.write_str("-l"),
            EditOp::PopR => f.write_str("-r"),
        }
    }
}

impl FromStr for EditOp {
    type Err = EditError;

    fn from_str(tok: &str) -> Result<Self, Self::Err> {
        let bad = || EditError::BadToken(tok.to_string());
        match tok {
            "-l" => return Ok(EditOp::PopL),
            "-r" => return Ok(EditOp::PopR),
            _ => {}
        }
        let (head, letter) = tok.split_at_checked(3).ok_or_else(bad)?;
        let mut cs = letter.chars();
        let c = match (cs.next(), cs.next()) {
            (Some(c), None) => c,
            _ => return Err(bad()),
        };
        match head {
            "+l:" => Ok(EditOp::PushL(c)),
            "+r:" => Ok(EditOp::PushR(c)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for EditScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

impl FromStr for EditScript {
    type Err = EditError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        line.split_whitespace().map(str::parse).collect::<Result<_, _>>().map(EditScript)
    }
}

/// Applies `s` to a word held in a deque.
pub fn apply_in_place(w: &mut VecDeque<char>, s: &EditScript) -> Result<(), EditError> {
    for (index, op) in s.0.iter().enumerate() {
        let ok = match *op {
            EditOp::PushL(c) => {
                w.push_front(c);
                true
            }
            EditOp::PushR(c) => {
                w.push_back(c);
                true
            }
            EditOp::PopL => w.pop_front().is_some(),
            EditOp::PopR => w.pop_back().is_some(),
        };
        if !ok {
            return Err(EditError::PopOnEmpty { index });
        }
    }
    Ok(())
}

pub fn apply(w: &str, s: &EditScript) -> Result<String, EditError> {
    let mut d: VecDeque<char> = w.chars().collect();
    apply_in_place(&mut d, s)?;
    Ok(d.into_iter().collect())
}

/// Length of the longest common contiguous factor.
pub fn longest_common_factor(u: &[char], v: &[char]) -> usize {
    let mut prev = vec![0usize; v.len() + 1];
    let mut cur = vec![0usize; v.len() + 1];
    let mut best = 0;
    for &a in u {
        for (j, &b) in v.iter().enumerate() {
            cur[j + 1] = if a == b { prev[j] + 1 } else { 0 };
            best = best.max(cur[j + 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

pub fn common_prefix_len(u: &[char], v: &[char]) -> usize {
    u.iter().zip(v).take_while(|(a, b)| a == b).count()
}

pub fn levenshtein(u: &[char], v: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=v.len()).collect();
    let mut cur = vec![0; v.len() + 1];
    for (i, &a) in u.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &b) in v.iter().enumerate() {
            let sub = prev[j] + usize::from(a != b);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[v.len()]
}

/// Diagonals scanned before falling back to the full table.
const BAND: usize = 16;

/// Push-pop distance from the common factors lying on diagonals
/// `|i - j| <= BAND`. A factor on any other diagonal leaves more than
/// `BAND` letters to pop, so a result within `BAND` is exact.
fn pp_distance(u: &[char], v: &[char]) -> usize {
    let mut best = 0;
    for off in -(BAND as isize)..=BAND as isize {
        let (i0, j0) = if off >= 0 { (0, off as usize) } else { ((-off) as usize, 0) };
        if i0 >= u.len() || j0 >= v.len() {
            continue;
        }
        let mut run = 0;
        for (a, b) in u[i0..].iter().zip(&v[j0..]) {
            run = if a == b { run + 1 } else { 0 };
            best = best.max(run);
        }
    }
    let d = u.len() + v.len() - 2 * best;
    if d <= BAND {
        d
    } else {
        u.len() + v.len() - 2 * longest_common_factor(u, v)
    }
}

fn chars_distance(u: &[char], v: &[char], m: Metric) -> usize {
    match m {
        Metric::PushPop => pp_distance(u, v),
        Metric::PushPopRight => u.len() + v.len() - 2 * common_prefix_len(u, v),
        Metric::Levenshtein => levenshtein(u, v),
    }
}

/// How push-pop distances are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Common-factor / common-prefix formulas.
    #[default]
    ClosedForm,
    /// Breadth-first search over the edit graph.
    Search,
}

pub fn distance(u: &str, v: &str, m: Metric) -> usize {
    let u: Vec<char> = u.chars().collect();
    let v: Vec<char> = v.chars().collect();
    chars_distance(&u, &v, m)
}

pub fn distance_with(u: &str, v: &str, m: Metric, strategy: Strategy) -> usize {
    match (strategy, m) {
        (Strategy::Search, Metric::PushPop | Metric::PushPopRight) => search_distance(u, v, m),
        _ => distance(u, v, m),
    }
}

/// Edit-graph search. Intermediate words never need to exceed |u|+|v|
/// letters, and only letters of `v` are worth pushing.
fn search_distance(u: &str, v: &str, m: Metric) -> usize {
    if u == v {
        return 0;
    }
    let mut letters: Vec<char> = v.chars().collect();
    letters.sort_unstable();
    letters.dedup();
    let cap = u.chars().count() + v.chars().count();
    let mut seen: HashMap<String, usize> = HashMap::from([(u.to_string(), 0)]);
    let mut queue = VecDeque::from([u.to_string()]);
    while let Some(w) = queue.pop_front() {
        let dist = seen[&w];
        for next in neighbours(&w, &letters, m, cap) {
            if next == v {
                return dist + 1;
            }
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), dist + 1);
                queue.push_back(next);
            }
        }
    }
    unreachable!("popping everything and pushing v always works")
}

fn neighbours(w: &str, letters: &[char], m: Metric, cap: usize) -> Vec<String> {
    let mut out = Vec::new();
    let n = w.chars().count();
    if n > 0 {
        if m == Metric::PushPop {
            out.push(w.chars().skip(1).collect());
        }
        out.push(w.chars().take(n - 1).collect());
    }
    if n < cap {
        for &c in letters {
            if m == Metric::PushPop {
                out.push(format!("{c}{w}"));
            }
            out.push(format!("{w}{c}"));
        }
    }
    out
}

fn candidate_ops(w: &VecDeque<char>, target: &[char], m: Metric) -> Vec<EditOp> {
    let mut letters: Vec<char> = target.to_vec();
    letters.sort_unstable();
    letters.dedup();
    let mut ops = Vec::new();
    for &c in &letters {
        ops.push(EditOp::PushL(c));
        ops.push(EditOp::PushR(c));
    }
    if !w.is_empty() {
        ops.push(EditOp::PopL);
        ops.push(EditOp::PopR);
    }
    ops.retain(|&op| m.allows(op));
    ops.sort_by_cached_key(|op| op.to_string());
    ops
}

/// A minimal script from `u` to `v`; among minimal scripts, the one whose
/// token sequence is lexicographically smallest.
pub fn script_between(u: &str, v: &str, m: Metric) -> Result<EditScript, EditError> {
    if m == Metric::Levenshtein {
        return Err(EditError::NoScripts);
    }
    if m == Metric::PushPop {
        let (uc, vc): (Vec<char>, Vec<char>) = (u.chars().collect(), v.chars().collect());
        if let Some(s) = pp_script(&uc, &vc) {
            return Ok(s);
        }
    }
    greedy_script(u, v, m)
}

/// Start positions `(i, j)` of every longest common factor, with its
/// length. Only the diagonals that can hold one are scanned.
fn factor_occurrences(u: &[char], v: &[char]) -> (usize, Vec<(usize, usize)>) {
    let d = pp_distance(u, v);
    let len = (u.len() + v.len() - d) / 2;
    let reach = if d <= BAND { BAND as isize } else { u.len().max(v.len()) as isize };
    let mut occ = Vec::new();
    if len == 0 {
        return (0, occ);
    }
    for off in -reach..=reach {
        let (i0, j0) = if off >= 0 { (0, off as usize) } else { ((-off) as usize, 0) };
        if i0 >= u.len() || j0 >= v.len() {
            continue;
        }
        let mut run = 0;
        for (k, (a, b)) in u[i0..].iter().zip(&v[j0..]).enumerate() {
            run = if a == b { run + 1 } else { 0 };
            if run == len {
                occ.push((i0 + k + 1 - len, j0 + k + 1 - len));
            }
        }
    }
    (len, occ)
}

/// The greedy script, driven by the longest common factors: an operation
/// shortens the distance exactly when some longest factor allows it, and
/// applying it keeps the factors that agree with it. `None` when the words
/// share no letter.
fn pp_script(u: &[char], v: &[char]) -> Option<EditScript> {
    let (mut len, mut occ) = factor_occurrences(u, v);
    if len == 0 {
        return None;
    }
    let mut n = u.len();
    let mut script = EditScript::new();
    while n + v.len() > 2 * len {
        let push_l = occ.iter().filter(|&&(i, j)| i == 0 && j > 0).map(|&(_, j)| v[j - 1]).min();
        let push_r = occ.iter().filter(|&&(i, j)| i + len == n && j + len < v.len()).map(|&(_, j)| v[j + len]).min();
        let op = if let Some(c) = push_l {
            EditOp::PushL(c)
        } else if let Some(c) = push_r {
            EditOp::PushR(c)
        } else if occ.iter().any(|&(i, _)| i > 0) {
            EditOp::PopL
        } else {
            EditOp::PopR
        };
        occ = match op {
            EditOp::PushL(c) => occ.into_iter().filter(|&(i, j)| i == 0 && j > 0 && v[j - 1] == c).map(|(_, j)| (0, j - 1)).collect(),
            EditOp::PushR(c) => occ.into_iter().filter(|&(i, j)| i + len == n && j + len < v.len() && v[j + len] == c).collect(),
            EditOp::PopL => occ.into_iter().filter(|&(i, _)| i > 0).map(|(i, j)| (i - 1, j)).collect(),
            EditOp::PopR => occ.into_iter().filter(|&(i, _)| i + len < n).collect(),
        };
        match op {
            EditOp::PushL(_) | EditOp::PushR(_) => {
                n += 1;
                len += 1;
            }
            EditOp::PopL | EditOp::PopR => n -= 1,
        }
        script.push(op);
    }
    Some(script)
}

fn greedy_script(u: &str, v: &str, m: Metric) -> Result<EditScript, EditError> {
    let target: Vec<char> = v.chars().collect();
    let mut cur: VecDeque<char> = u.chars().collect();
    let mut remaining = chars_distance(cur.make_contiguous(), &target, m);
    let mut script = EditScript::new();
    while remaining > 0 {
        let mut advanced = false;
        for op in candidate_ops(&cur, &target, m) {
            let mut next = cur.clone();
            apply_in_place(&mut next, &EditScript(vec![op])).expect("candidates are applicable");
            let d = chars_distance(next.make_contiguous(), &target, m);
            if d + 1 == remaining {
                script.push(op);
                cur = next;
                remaining = d;
                advanced = true;
                break;
            }
        }
        assert!(advanced, "some operation always decreases the distance");
    }
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> EditScript {
        text.parse().unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply("", &s("+l:a +r:b")).unwrap(), "ab");
        assert_eq!(apply("abc", &s("-l -r")).unwrap(), "b");
        assert_eq!(apply("a", &s("-l -l")), Err(EditError::PopOnEmpty { index: 1 }));
    }

    #[test]
    fn token_round_trip() {
        let text = "+l:a +r:b -l -r";
        assert_eq!(s(text).to_string(), text);
        assert_eq!(s("").len(), 0);
        assert!("+x:a".parse::<EditScript>().is_err());
        assert!("+l:ab".parse::<EditScript>().is_err());
    }

    #[test]
    fn distance_examples() {
        for m in [Metric::PushPop, Metric::PushPopRight, Metric::Levenshtein] {
            assert_eq!(distance("abba", "abba", m), 0);
        }
        assert_eq!(distance("ab", "ba", Metric::PushPop), 2);
        assert_eq!(distance("a", "b", Metric::Levenshtein), 1);
        assert_eq!(distance("ab", "ba", Metric::PushPopRight), 4);
        assert_eq!(distance_with("ab", "ba", Metric::PushPop, Strategy::Search), 2);
    }

    #[test]
    fn script_examples() {
        assert_eq!(script_between("abc", "bc", Metric::PushPop).unwrap(), s("-l"));
        let ab = script_between("ab", "ba", Metric::PushPop).unwrap();
        assert_eq!(ab.len(), 2);
        assert_eq!(apply("ab", &ab).unwrap(), "ba");
        let right = script_between("rw", "rsw", Metric::PushPopRight).unwrap();
        assert_eq!(right, s("-r +r:s +r:w"));
        assert_eq!(script_between("a", "b", Metric::Levenshtein), Err(EditError::NoScripts));
    }

    #[test]
    fn factor_driven_script_matches_greedy() {
        let words = ["", "a", "ab", "ba", "abab", "baab", "aabba", "bbbab", "ababa", "cab", "abc"];
        for u in words {
            for v in words {
                let want = greedy_script(u, v, Metric::PushPop).unwrap();
                assert_eq!(script_between(u, v, Metric::PushPop).unwrap(), want, "{u:?} -> {v:?}");
            }
        }
        let long = "ab".repeat(300);
        let script = script_between(&long, &format!("b{long}a"), Metric::PushPop).unwrap();
        assert_eq!(script, greedy_script(&long, &format!("b{long}a"), Metric::PushPop).unwrap());
    }

    proptest::proptest! {
        #[test]
        fn factor_driven_script_matches_greedy_randomly(u in "[abc]{0,9}", v in "[abc]{0,9}") {
            proptest::prop_assert_eq!(script_between(&u, &v, Metric::PushPop).unwrap(), greedy_script(&u, &v, Metric::PushPop).unwrap());
        }
    }

    #[test]
    fn lexicographic_tie_break() {
        // Minimal scripts from "ab" to "ba": "+l:b -r" is smallest by tokens.
        assert_eq!(script_between("ab", "ba", Metric::PushPop).unwrap(), s("+l:b -r"));
    }
}

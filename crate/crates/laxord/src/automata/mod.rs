//! Partial deterministic automata over single-character alphabets.

mod regex;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub use regex::RegexError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfaError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: state {state} already has a transition on '{letter}'")]
    Nondeterministic { line: usize, state: u32, letter: char },
    #[error("line {line}: unknown state {state}")]
    UnknownState { line: usize, state: u32 },
    #[error("line {line}: letter '{letter}' is not in the alphabet")]
    UnknownLetter { line: usize, letter: char },
    #[error("alphabet must not be empty")]
    EmptyAlphabet,
    #[error("letter '{0}' is not in the alphabet")]
    LetterOutsideAlphabet(char),
    #[error("automata have different alphabets")]
    AlphabetMismatch,
    #[error("the language is empty")]
    EmptyLanguage,
}

/// Deterministic automaton with a partial transition function.
///
/// States are dense indices `0..size()`; each carries the integer name it was
/// declared with. An automaton built by [`Dfa::trim`] whose language is empty
/// keeps only its (non-final) initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Vec<char>,
    names: Vec<u32>,
    initial: usize,
    finals: Vec<bool>,
    delta: Vec<Option<usize>>,
}

/// A run of the automaton on a word, one state per prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub word: String,
    pub states: Vec<usize>,
    pub accepting: bool,
}

/// Result of parsing: the trimmed automaton and whether its language is empty.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub dfa: Dfa,
    pub empty_language: bool,
}

impl Dfa {
    /// Builds an automaton from explicit parts. `transitions` use dense indices.
    pub fn new(
        alphabet: Vec<char>,
        names: Vec<u32>,
        initial: usize,
        finals: &[usize],
        transitions: &[(usize, char, usize)],
    ) -> Result<Self, DfaError> {
        if alphabet.is_empty() {
            return Err(DfaError::EmptyAlphabet);
        }
        let n = names.len();
        let k = alphabet.len();
        let mut fin = vec![false; n];
        for &f in finals {
            fin[f] = true;
        }
        let mut dfa = Dfa { alphabet, names, initial, finals: fin, delta: vec![None; n * k] };
        for &(p, c, q) in transitions {
            let li = dfa.letter_index(c).ok_or(DfaError::LetterOutsideAlphabet(c))?;
            let slot = &mut dfa.delta[p * k + li];
            if slot.is_some_and(|t| t != q) {
                return Err(DfaError::Nondeterministic { line: 0, state: dfa.names[p], letter: c });
            }
            *slot = Some(q);
        }
        Ok(dfa)
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn letter_index(&self, c: char) -> Option<usize> {
        self.alphabet.iter().position(|&x| x == c)
    }

    /// Number of states, written |A|.
    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, q: usize) -> u32 {
        self.names[q]
    }

    pub fn index_of(&self, name: u32) -> Option<usize> {
        self.names.iter().position(|&x| x == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.size()).filter(|&q| self.finals[q])
    }

    /// Transition on a letter index.
    #[inline]
    pub fn step(&self, q: usize, li: usize) -> Option<usize> {
        self.delta[q * self.alphabet.len() + li]
    }

    pub fn next(&self, q: usize, c: char) -> Option<usize> {
        self.step(q, self.letter_index(c)?)
    }

    /// All transitions as `(source, letter index, target)`, sorted by source then letter.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let k = self.alphabet.len();
        self.delta.iter().enumerate().filter_map(move |(i, t)| t.map(|q| (i / k, i % k, q)))
    }

    pub fn is_empty(&self) -> bool {
        !self.finals.iter().any(|&f| f)
    }

    /// State reached from `q` reading `w`, if defined. Letters outside the
    /// alphabet make the result undefined.
    pub fn read_from(&self, q: usize, w: &str) -> Option<usize> {
        w.chars().try_fold(q, |q, c| self.next(q, c))
    }

    pub fn accepts(&self, w: &str) -> bool {
        self.read_from(self.initial, w).is_some_and(|q| self.finals[q])
    }

    pub fn run(&self, w: &str) -> Result<Option<Run>, DfaError> {
        let mut states = vec![self.initial];
        let mut q = Some(self.initial);
        for c in w.chars() {
            let li = self.letter_index(c).ok_or(DfaError::LetterOutsideAlphabet(c))?;
            q = q.and_then(|p| self.step(p, li));
            if let Some(p) = q {
                states.push(p);
            }
        }
        Ok(q.map(|last| Run { word: w.to_string(), accepting: self.finals[last], states }))
    }

    fn reachable_from(&self, start: &[usize], forward: bool) -> Vec<bool> {
        let n = self.size();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        if !forward {
            for (p, _, q) in self.transitions() {
                rev[q].push(p);
            }
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = start.to_vec();
        for &s in start {
            seen[s] = true;
        }
        while let Some(p) = stack.pop() {
            let succ: Vec<usize> = if forward {
                (0..self.alphabet.len()).filter_map(|li| self.step(p, li)).collect()
            } else {
                rev[p].clone()
            };
            for q in succ {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        seen
    }

    /// States reachable from the initial state.
    pub fn accessible(&self) -> Vec<bool> {
        self.reachable_from(&[self.initial], true)
    }

    /// States from which some final state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let finals: Vec<usize> = self.finals().collect();
        self.reachable_from(&finals, false)
    }

    /// Removes states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> Dfa {
        let acc = self.accessible();
        let coacc = self.coaccessible();
        if !coacc[self.initial] {
            return Dfa {
                alphabet: self.alphabet.clone(),
                names: vec![self.names[self.initial]],
                initial: 0,
                finals: vec![false],
                delta: vec![None; self.alphabet.len()],
            };
        }
        let keep: Vec<usize> = (0..self.size()).filter(|&q| acc[q] && coacc[q]).collect();
        self.restrict(&keep)
    }

    /// Keeps exactly the listed states (which must include the initial one).
    fn restrict(&self, keep: &[usize]) -> Dfa {
        let mut map = vec![usize::MAX; self.size()];
        for (i, &q) in keep.iter().enumerate() {
            map[q] = i;
        }
        let k = self.alphabet.len();
        let mut delta = vec![None; keep.len() * k];
        for (i, &q) in keep.iter().enumerate() {
            for li in 0..k {
                if let Some(t) = self.step(q, li) {
                    if map[t] != usize::MAX {
                        delta[i * k + li] = Some(map[t]);
                    }
                }
            }
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            names: keep.iter().map(|&q| self.names[q]).collect(),
            initial: map[self.initial],
            finals: keep.iter().map(|&q| self.finals[q]).collect(),
            delta,
        }
    }

    pub fn is_trim(&self) -> bool {
        let acc = self.accessible();
        let coacc = self.coaccessible();
        (0..self.size()).all(|q| acc[q] && coacc[q])
    }

    /// Intersection automaton; states are named densely after trimming.
    pub fn product(&self, other: &Dfa) -> Result<Dfa, DfaError> {
        self.product_with_pairs(other).map(|(d, _)| d)
    }

    /// Intersection automaton together with the pair of states behind each product state.
    pub fn product_with_pairs(&self, other: &Dfa) -> Result<(Dfa, Vec<(usize, usize)>), DfaError> {
        let mut a = self.alphabet.clone();
        let mut b = other.alphabet.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(DfaError::AlphabetMismatch);
        }
        let k = self.alphabet.len();
        let other_li: Vec<usize> =
            self.alphabet.iter().map(|&c| other.letter_index(c).unwrap()).collect();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        index.insert(pairs[0], 0);
        let mut delta: Vec<Option<usize>> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            for li in 0..k {
                let t = match (self.step(p, li), other.step(q, other_li[li])) {
                    (Some(p2), Some(q2)) => {
                        let next = pairs.len();
                        let id = *index.entry((p2, q2)).or_insert(next);
                        if id == next {
                            pairs.push((p2, q2));
                        }
                        Some(id)
                    }
                    _ => None,
                };
                delta.push(t);
            }
            i += 1;
        }
        let finals = pairs.iter().map(|&(p, q)| self.finals[p] && other.finals[q]).collect();
        let raw = Dfa {
            alphabet: self.alphabet.clone(),
            names: (0..pairs.len() as u32).collect(),
            initial: 0,
            finals,
            delta,
        };
        let trimmed = raw.trim();
        let kept = trimmed.names.iter().map(|&n| pairs[n as usize]).collect();
        let renamed = Dfa { names: (0..trimmed.size() as u32).collect(), ..trimmed };
        Ok((renamed, kept))
    }

    /// Accepted words of length at most `max_len`, by length then by alphabet order.
    pub fn enumerate_by_length(&self, max_len: usize) -> Vec<String> {
        let coacc = self.coaccessible();
        let mut out = Vec::new();
        if !coacc[self.initial] {
            return out;
        }
        let mut layer: Vec<(String, usize)> = vec![(String::new(), self.initial)];
        for len in 0..=max_len {
            out.extend(layer.iter().filter(|(_, q)| self.finals[*q]).map(|(w, _)| w.clone()));
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, q) in &layer {
                for (li, &c) in self.alphabet.iter().enumerate() {
                    if let Some(t) = self.step(*q, li).filter(|&t| coacc[t]) {
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

    /// The canonical minimal automaton: states numbered in breadth-first order
    /// from the initial state, following letters in alphabet order.
    pub fn minimize(&self) -> Result<Dfa, DfaError> {
        let a = self.trim();
        if a.is_empty() {
            return Err(DfaError::EmptyLanguage);
        }
        let n = a.size();
        let k = a.alphabet.len();
        // Moore refinement; the missing transition acts as its own class.
        let mut class: Vec<usize> = a.finals.iter().map(|&f| usize::from(f)).collect();
        let mut count = 0;
        loop {
            let mut sig_index: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[q]);
                for li in 0..k {
                    sig.push(a.step(q, li).map_or(usize::MAX, |t| class[t]));
                }
                let len = sig_index.len();
                next[q] = *sig_index.entry(sig).or_insert(len);
            }
            let new_count = sig_index.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut order = vec![usize::MAX; count];
        let mut reps = Vec::new();
        let mut queue = VecDeque::from([a.initial]);
        order[class[a.initial]] = 0;
        reps.push(a.initial);
        while let Some(q) = queue.pop_front() {
            for li in 0..k {
                if let Some(t) = a.step(q, li) {
                    if order[class[t]] == usize::MAX {
                        order[class[t]] = reps.len();
                        reps.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut delta = vec![None; count * k];
        for (i, &q) in reps.iter().enumerate() {
            for li in 0..k {
                delta[i * k + li] = a.step(q, li).map(|t| order[class[t]]);
            }
        }
        Ok(Dfa {
            alphabet: a.alphabet.clone(),
            names: (0..count as u32).collect(),
            initial: 0,
            finals: reps.iter().map(|&q| a.finals[q]).collect(),
            delta,
        })
    }

    /// Compiles a regular expression: `+` or `|` for union, juxtaposition for
    /// concatenation, postfix `*`, parentheses, and `ε` (or `()`) for the
    /// empty word. The alphabet defaults to the letters used, in order of
    /// first appearance.
    pub fn from_regex(pattern: &str, alphabet: Option<&[char]>) -> Result<Dfa, RegexError> {
        regex::compile(pattern, alphabet)
    }

    /// Same automaton with states renamed `0..size()` in index order.
    pub fn renumbered(&self) -> Dfa {
        Dfa { names: (0..self.size() as u32).collect(), ..self.clone() }
    }

    /// Same automaton with the given state names.
    pub fn with_names(&self, names: Vec<u32>) -> Dfa {
        assert_eq!(names.len(), self.size());
        Dfa { names, ..self.clone() }
    }
}

impl std::str::FromStr for Dfa {
    type Err = DfaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_dfa(s).map(|p| p.dfa)
    }
}

fn letter_token(tok: &str, line: usize) -> Result<char, DfaError> {
    let mut it = tok.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(DfaError::Syntax { line, msg: format!("letter must be one character, got {tok:?}") }),
    }
}

fn state_token(tok: &str, line: usize) -> Result<u32, DfaError> {
    tok.parse()
        .map_err(|_| DfaError::Syntax { line, msg: format!("state must be a non-negative integer, got {tok:?}") })
}

/// Parses the line-oriented text format and trims the result.
pub fn parse_dfa(text: &str) -> Result<Parsed, DfaError> {
    let mut alphabet: Option<(usize, Vec<char>)> = None;
    let mut states: Option<(usize, Vec<u32>)> = None;
    let mut initial: Option<(usize, u32)> = None;
    let mut finals: Option<(usize, Vec<u32>)> = None;
    let mut trans: Vec<(usize, u32, char, u32)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| DfaError::Syntax { line, msg: "expected `key: values`".into() })?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        let dup = || DfaError::Syntax { line, msg: format!("duplicate `{}` line", key.trim()) };
        match key.trim() {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(dup());
                }
                let mut letters = Vec::new();
                for t in &toks {
                    let c = letter_token(t, line)?;
                    if letters.contains(&c) {
                        return Err(DfaError::Syntax { line, msg: format!("letter '{c}' repeated") });
                    }
                    letters.push(c);
                }
                alphabet = Some((line, letters));
            }
            "states" => {
                if states.is_some() {
                    return Err(dup());
                }
                let mut names = Vec::new();
                for t in &toks {
                    let s = state_token(t, line)?;
                    if names.contains(&s) {
                        return Err(DfaError::Syntax { line, msg: format!("state {s} repeated") });
                    }
                    names.push(s);
                }
                states = Some((line, names));
            }
            "initial" => {
                if initial.is_some() {
                    return Err(dup());
                }
                if toks.len() != 1 {
                    return Err(DfaError::Syntax { line, msg: "expected exactly one initial state".into() });
                }
                initial = Some((line, state_token(toks[0], line)?));
            }
            "final" => {
                if finals.is_some() {
                    return Err(dup());
                }
                let f = toks.iter().map(|t| state_token(t, line)).collect::<Result<_, _>>()?;
                finals = Some((line, f));
            }
            "trans" => {
                if toks.len() != 3 {
                    return Err(DfaError::Syntax { line, msg: "expected `trans: state letter state`".into() });
                }
                trans.push((line, state_token(toks[0], line)?, letter_token(toks[1], line)?, state_token(toks[2], line)?));
            }
            other => {
                return Err(DfaError::Syntax { line, msg: format!("unknown section `{other}`") });
            }
        }
    }

    let missing = |what: &str| DfaError::Syntax { line: text.lines().count().max(1), msg: format!("missing `{what}` line") };
    let (_, alphabet) = alphabet.ok_or_else(|| missing("alphabet"))?;
    if alphabet.is_empty() {
        return Err(DfaError::EmptyAlphabet);
    }
    let (_, names) = states.ok_or_else(|| missing("states"))?;
    let (init_line, init_name) = initial.ok_or_else(|| missing("initial"))?;
    let (fin_line, fin_names) = finals.unwrap_or((0, Vec::new()));

    let lookup = |name: u32, line: usize| {
        names.iter().position(|&x| x == name).ok_or(DfaError::UnknownState { line, state: name })
    };
    let initial = lookup(init_name, init_line)?;
    let mut fin = Vec::new();
    for f in fin_names {
        fin.push(lookup(f, fin_line)?);
    }
    let k = alphabet.len();
    let mut delta = vec![None; names.len() * k];
    for (line, p, c, q) in trans {
        let pi = lookup(p, line)?;
        let qi = lookup(q, line)?;
        let li = alphabet.iter().position(|&x| x == c).ok_or(DfaError::UnknownLetter { line, letter: c })?;
        let slot = &mut delta[pi * k + li];
        if slot.is_some_and(|t| t != qi) {
            return Err(DfaError::Nondeterministic { line, state: p, letter: c });
        }
        *slot = Some(qi);
    }
    let mut finals = vec![false; names.len()];
    for f in fin {
        finals[f] = true;
    }
    let dfa = Dfa { alphabet, names, initial, finals, delta }.trim();
    let empty_language = dfa.is_empty();
    Ok(Parsed { dfa, empty_language })
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
        writeln!(f, "alphabet: {}", join(&mut self.alphabet.iter().map(|c| c.to_string())))?;
        writeln!(f, "states: {}", join(&mut self.names.iter().map(|n| n.to_string())))?;
        writeln!(f, "initial: {}", self.names[self.initial])?;
        writeln!(f, "final: {}", join(&mut self.finals().map(|q| self.names[q].to_string())))?;
        for (p, li, q) in self.transitions() {
            writeln!(f, "trans: {} {} {}", self.names[p], self.alphabet[li], self.names[q])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A5: &str = "alphabet: a b\nstates: 0 1 2\ninitial: 0\nfinal: 0 1 2\n\
                      trans: 0 a 1\ntrans: 1 a 1\ntrans: 0 b 2\ntrans: 2 b 2\n";

    #[test]
    fn parses_a5() {
        let p = parse_dfa(A5).unwrap();
        assert!(!p.empty_language);
        assert_eq!(p.dfa.size(), 3);
        assert_eq!(p.dfa.enumerate_by_length(2), ["", "a", "b", "aa", "bb"]);
    }

    #[test]
    fn rejects_nondeterminism() {
        let text = "alphabet: a\nstates: 0 1 2\ninitial: 0\nfinal: 1 2\ntrans: 0 a 1\ntrans: 0 a 2\n";
        assert_eq!(parse_dfa(text).unwrap_err(), DfaError::Nondeterministic { line: 6, state: 0, letter: 'a' });
    }

    #[test]
    fn reports_unknown_references() {
        let bad_state = "alphabet: a\nstates: 0\ninitial: 0\nfinal: 0\ntrans: 0 a 7\n";
        assert_eq!(parse_dfa(bad_state).unwrap_err(), DfaError::UnknownState { line: 5, state: 7 });
        let bad_letter = "alphabet: a\nstates: 0\ninitial: 0\nfinal: 0\ntrans: 0 b 0\n";
        assert_eq!(parse_dfa(bad_letter).unwrap_err(), DfaError::UnknownLetter { line: 5, letter: 'b' });
        let junk = "alphabet: a\nstates 0\n";
        assert!(matches!(parse_dfa(junk).unwrap_err(), DfaError::Syntax { line: 2, .. }));
    }

    #[test]
    fn epsilon_only() {
        let d: Dfa = "alphabet: a\nstates: 0\ninitial: 0\nfinal: 0\n".parse().unwrap();
        assert_eq!(d.enumerate_by_length(3), [""]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\nalphabet: a # one letter\n\nstates: 3\ninitial: 3\nfinal: 3\ntrans: 3 a 3\n";
        let d: Dfa = text.parse().unwrap();
        assert_eq!(d.name(0), 3);
        assert!(d.accepts("aaa"));
    }

    #[test]
    fn trim_removes_sink_and_flags_empty() {
        let text = "alphabet: a b\nstates: 0 1 2\ninitial: 0\nfinal: 0\ntrans: 0 a 0\ntrans: 0 b 1\ntrans: 1 a 1\n";
        let d: Dfa = text.parse().unwrap();
        assert_eq!(d.size(), 1);
        let same = d.trim();
        assert_eq!(same, d);
        let empty = parse_dfa("alphabet: a\nstates: 0 1\ninitial: 0\nfinal: 1\ntrans: 1 a 1\n").unwrap();
        assert!(empty.empty_language);
        assert!(empty.dfa.enumerate_by_length(4).is_empty());
    }

    #[test]
    fn runs() {
        let d: Dfa = A5.parse().unwrap();
        let r = d.run("aa").unwrap().unwrap();
        assert_eq!(r.states, [0, 1, 1]);
        assert!(r.accepting);
        assert!(d.run("ab").unwrap().is_none());
        assert_eq!(d.run("").unwrap().unwrap().states, [0]);
        assert_eq!(d.run("ax").unwrap_err(), DfaError::LetterOutsideAlphabet('x'));
    }

    #[test]
    fn serialization_round_trip() {
        let d: Dfa = A5.parse().unwrap();
        let text = d.to_string();
        assert!(text.starts_with("alphabet: a b\nstates: 0 1 2\ninitial: 0\nfinal: 0 1 2\ntrans: 0 a 1\n"));
        let again: Dfa = text.parse().unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn minimize_merges_duplicate_branches() {
        // a* + a* written with two copies.
        let text = "alphabet: a\nstates: 0 1 2\ninitial: 0\nfinal: 0 1 2\ntrans: 0 a 1\ntrans: 1 a 2\ntrans: 2 a 1\n";
        let m = text.parse::<Dfa>().unwrap().minimize().unwrap();
        assert_eq!(m.size(), 1);
        assert!(m.accepts("aaaa"));
        assert_eq!(parse_dfa("alphabet: a\nstates: 0\ninitial: 0\nfinal:\n").unwrap().dfa.minimize(), Err(DfaError::EmptyLanguage));
    }

    #[test]
    fn product_of_a_star_and_b_star_is_epsilon() {
        let a = Dfa::from_regex("a*", Some(&['a', 'b'])).unwrap();
        let b = Dfa::from_regex("b*", Some(&['a', 'b'])).unwrap();
        let p = a.product(&b).unwrap();
        assert_eq!(p.enumerate_by_length(4), [""]);
        let c = Dfa::from_regex("c*", None).unwrap();
        assert_eq!(a.product(&c), Err(DfaError::AlphabetMismatch));
    }
}

//! Small regular-expression front end: Thompson construction, subset
//! construction, minimization.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::Dfa;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegexError {
    #[error("unexpected '{found}' at position {pos}")]
    Unexpected { pos: usize, found: char },
    #[error("unbalanced parenthesis at position {0}")]
    Unbalanced(usize),
    #[error("letter '{0}' is not in the given alphabet")]
    LetterOutsideAlphabet(char),
    #[error("empty alphabet")]
    EmptyAlphabet,
}

enum Node {
    Empty,
    Letter(char),
    Concat(Vec<Node>),
    Union(Vec<Node>),
    Star(Box<Node>),
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn union(&mut self) -> Result<Node, RegexError> {
        let mut alts = vec![self.concat()?];
        while matches!(self.peek(), Some('+' | '|')) {
            self.pos += 1;
            alts.push(self.concat()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Node::Union(alts) })
    }

    fn concat(&mut self) -> Result<Node, RegexError> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if matches!(c, '+' | '|' | ')') {
                break;
            }
            parts.push(self.repeat()?);
        }
        Ok(match parts.len() {
            0 => Node::Empty,
            1 => parts.pop().unwrap(),
            _ => Node::Concat(parts),
        })
    }

    fn repeat(&mut self) -> Result<Node, RegexError> {
        let mut node = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            node = Node::Star(Box::new(node));
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<Node, RegexError> {
        let pos = self.pos;
        let c = self.peek().ok_or(RegexError::Unbalanced(pos))?;
        self.pos += 1;
        match c {
            '(' => {
                let inner = self.union()?;
                if self.peek() != Some(')') {
                    return Err(RegexError::Unbalanced(pos));
                }
                self.pos += 1;
                Ok(inner)
            }
            'ε' => Ok(Node::Empty),
            '*' => Err(RegexError::Unexpected { pos, found: c }),
            _ => Ok(Node::Letter(c)),
        }
    }
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    moves: Vec<Vec<(char, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.moves.push(Vec::new());
        self.eps.len() - 1
    }

    /// Returns (entry, exit) of the fragment for `node`.
    fn build(&mut self, node: &Node) -> (usize, usize) {
        match node {
            Node::Empty => {
                let s = self.state();
                (s, s)
            }
            Node::Letter(c) => {
                let s = self.state();
                let t = self.state();
                self.moves[s].push((*c, t));
                (s, t)
            }
            Node::Concat(parts) => {
                let (entry, mut exit) = self.build(&parts[0]);
                for p in &parts[1..] {
                    let (s, t) = self.build(p);
                    self.eps[exit].push(s);
                    exit = t;
                }
                (entry, exit)
            }
            Node::Union(alts) => {
                let s = self.state();
                let t = self.state();
                for a in alts {
                    let (x, y) = self.build(a);
                    self.eps[s].push(x);
                    self.eps[y].push(t);
                }
                (s, t)
            }
            Node::Star(inner) => {
                let s = self.state();
                let (x, y) = self.build(inner);
                self.eps[s].push(x);
                self.eps[y].push(s);
                (s, s)
            }
        }
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for &q in &self.eps[p] {
                if set.insert(q) {
                    stack.push(q);
                }
            }
        }
    }
}

fn letters(node: &Node, out: &mut Vec<char>) {
    match node {
        Node::Empty => {}
        Node::Letter(c) => {
            if !out.contains(c) {
                out.push(*c);
            }
        }
        Node::Concat(v) | Node::Union(v) => v.iter().for_each(|n| letters(n, out)),
        Node::Star(n) => letters(n, out),
    }
}

pub(super) fn compile(pattern: &str, alphabet: Option<&[char]>) -> Result<Dfa, RegexError> {
    let chars: Vec<char> = pattern.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parser = Parser { chars, pos: 0 };
    let ast = parser.union()?;
    if let Some(c) = parser.peek() {
        return Err(if c == ')' { RegexError::Unbalanced(parser.pos) } else { RegexError::Unexpected { pos: parser.pos, found: c } });
    }
    let mut used = Vec::new();
    letters(&ast, &mut used);
    let sigma: Vec<char> = match alphabet {
        Some(a) => {
            if let Some(&c) = used.iter().find(|c| !a.contains(c)) {
                return Err(RegexError::LetterOutsideAlphabet(c));
            }
            a.to_vec()
        }
        None => used,
    };
    if sigma.is_empty() {
        return Err(RegexError::EmptyAlphabet);
    }

    let mut nfa = Nfa::default();
    let (entry, exit) = nfa.build(&ast);
    let mut start = BTreeSet::from([entry]);
    nfa.closure(&mut start);
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut sets = vec![start];
    let mut trans = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        for &c in &sigma {
            let mut next: BTreeSet<usize> = BTreeSet::new();
            for &p in &sets[i] {
                next.extend(nfa.moves[p].iter().filter(|(x, _)| *x == c).map(|&(_, q)| q));
            }
            if next.is_empty() {
                continue;
            }
            nfa.closure(&mut next);
            let len = sets.len();
            let id = *index.entry(next.clone()).or_insert(len);
            if id == len {
                sets.push(next);
            }
            trans.push((i, c, id));
        }
        i += 1;
    }
    let finals: Vec<usize> = (0..sets.len()).filter(|&i| sets[i].contains(&exit)).collect();
    let names = (0..sets.len() as u32).collect();
    let dfa = Dfa::new(sigma, names, 0, &finals, &trans).expect("subset construction is deterministic");
    Ok(dfa.minimize().expect("regular expressions denote nonempty languages"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_languages() {
        let d = compile("a(a+bc)* + b(cb)*ddd*", None).unwrap();
        assert_eq!(d.alphabet(), ['a', 'b', 'c', 'd']);
        for w in ["a", "aa", "abc", "abca", "bdd", "bcbddd"] {
            assert!(d.accepts(w), "{w}");
        }
        for w in ["", "b", "bd", "ab", "bcdd"] {
            assert!(!d.accepts(w), "{w}");
        }
        assert_eq!(d.size(), 7);
    }

    #[test]
    fn epsilon_forms() {
        let d = compile("ε + a", None).unwrap();
        assert_eq!(d.enumerate_by_length(3), ["", "a"]);
        let e = compile("()|a", None).unwrap();
        assert_eq!(e.enumerate_by_length(3), ["", "a"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(compile("(a", None), Err(RegexError::Unbalanced(_))));
        assert!(matches!(compile("a)", None), Err(RegexError::Unbalanced(_))));
        assert!(matches!(compile("*a", None), Err(RegexError::Unexpected { .. })));
        assert_eq!(compile("c", Some(&['a'])).unwrap_err(), RegexError::LetterOutsideAlphabet('c'));
        assert_eq!(compile("ε", None).unwrap_err(), RegexError::EmptyAlphabet);
    }
}

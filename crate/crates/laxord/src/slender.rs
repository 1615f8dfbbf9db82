//! Slender languages: the cycle test on the minimal automaton, the split
//! into threads `r s* L`, and right-end enumeration of each thread.

use thiserror::Error;

use crate::automata::Dfa;
use crate::editops::{script_between, EditScript, Metric};
use crate::enumerator::{Cadence, Clock, EnumError, Period, Producer, ScriptStream};
use crate::interchange::{loopable_states, nonloopable_words, scc, shortest_loop, sort_words, successors};
use crate::meter::Meter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlenderError {
    #[error("the language is not slender: its minimal automaton has two connected cycles")]
    NotSlender,
    #[error("thread {index} does not exist: there are {count} threads")]
    NoSuchThread { index: usize, count: usize },
}

/// For each state of a trimmed automaton, whether it lies on a cycle, or
/// `None` when two distinct cycles are connected (including two cycles
/// through one state).
fn isolated_cycles(a: &Dfa) -> Option<Vec<bool>> {
    let succ = successors(a);
    let comp = scc(&succ);
    let n = a.size();
    let mut internal = vec![0usize; n];
    for (p, _, q) in a.transitions() {
        if comp[p] == comp[q] {
            internal[p] += 1;
        }
    }
    let cyclic: Vec<bool> = (0..n).map(|q| internal[q] > 0).collect();
    if cyclic.iter().zip(&internal).any(|(&c, &i)| c && i != 1) {
        return None;
    }
    for q in (0..n).filter(|&q| cyclic[q]) {
        let mut seen = vec![false; n];
        let mut stack = vec![q];
        seen[q] = true;
        while let Some(p) = stack.pop() {
            for &t in &succ[p] {
                if cyclic[t] && comp[t] != comp[q] {
                    return None;
                }
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    Some(cyclic)
}

/// The number of words of each length is bounded. Decided on the minimal
/// automaton: no two of its simple cycles are connected.
pub fn is_slender(a: &Dfa) -> bool {
    match a.minimize() {
        Ok(m) => isolated_cycles(&m).is_some(),
        Err(_) => true,
    }
}

/// One thread `r s* L` of a slender language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thread {
    pub r: String,
    pub s: String,
    /// Accepted continuations after `r s^j` that do not start with `s`.
    pub tails: Vec<String>,
}

impl Thread {
    pub fn word(&self, j: usize, tail: usize) -> String {
        format!("{}{}{}", self.r, self.s.repeat(j), self.tails[tail])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlenderDecomposition {
    pub finite_part: Vec<String>,
    pub threads: Vec<Thread>,
    /// States of the minimal automaton.
    pub states: usize,
}

impl SlenderDecomposition {
    pub fn t(&self) -> usize {
        self.threads.len()
    }

    /// Script length bound for the thread streams.
    pub fn bound(&self) -> usize {
        2 * self.states
    }

    /// Every word of the decomposition up to length `max_len`, with
    /// repetitions if the parts overlap.
    pub fn expand(&self, max_len: usize) -> Vec<String> {
        let mut out: Vec<String> = self.finite_part.iter().filter(|w| w.chars().count() <= max_len).cloned().collect();
        for th in &self.threads {
            for tail in 0..th.tails.len() {
                for j in 0.. {
                    let w = th.word(j, tail);
                    if w.chars().count() > max_len {
                        break;
                    }
                    out.push(w);
                }
            }
        }
        out
    }
}

/// Splits a slender language into its non-loopable words and one thread per
/// non-loopable prefix of the minimal automaton: words reaching a loopable
/// state whose strict prefixes do not. Threads are sorted by `r`.
pub fn slender_threads(a: &Dfa) -> Result<SlenderDecomposition, SlenderError> {
    let Ok(m) = a.minimize() else {
        return Ok(SlenderDecomposition { finite_part: Vec::new(), threads: Vec::new(), states: 0 });
    };
    isolated_cycles(&m).ok_or(SlenderError::NotSlender)?;
    let info = loopable_states(&m);
    let mut prefixes: Vec<(String, usize)> = Vec::new();
    if info.loopable[m.initial()] {
        prefixes.push((String::new(), m.initial()));
    } else {
        let mut stack = vec![(m.initial(), String::new())];
        while let Some((q, w)) = stack.pop() {
            for (li, &c) in m.alphabet().iter().enumerate() {
                let Some(t) = m.step(q, li) else { continue };
                let w2 = format!("{w}{c}");
                if info.loopable[t] {
                    prefixes.push((w2, t));
                } else {
                    stack.push((t, w2));
                }
            }
        }
    }
    let key = |w: &str| -> Vec<usize> { w.chars().map(|c| m.letter_index(c).unwrap()).collect() };
    prefixes.sort_by_key(|(r, _)| key(r));
    let threads = prefixes
        .into_iter()
        .map(|(r, q)| {
            let s = shortest_loop(&m, q).expect("loopable");
            let mut tails = Vec::new();
            let mut stack = vec![(q, String::new())];
            while let Some((p, y)) = stack.pop() {
                if m.is_final(p) {
                    tails.push(y.clone());
                }
                for (li, &c) in m.alphabet().iter().enumerate() {
                    if let Some(t) = m.step(p, li).filter(|&t| t != q) {
                        stack.push((t, format!("{y}{c}")));
                    }
                }
            }
            sort_words(&m, &mut tails);
            Thread { r, s, tails }
        })
        .collect();
    Ok(SlenderDecomposition { finite_part: nonloopable_words(&m), threads, states: m.size() })
}

/// Emits the prelude, then blocks `r s^j L` for j = 0, 1, ...
struct ThreadProducer {
    thread: Thread,
    prelude: Vec<String>,
    prev: String,
    j: usize,
}

impl ThreadProducer {
    fn go(&mut self, clock: &mut Clock, w: String) {
        let s = script_between(&self.prev, &w, Metric::PushPopRight).expect("push-pop-right");
        clock.tick(s.len() as u64 + 1);
        clock.push(s);
        self.prev = w;
    }
}

impl Producer for ThreadProducer {
    fn stage(&mut self, clock: &mut Clock) -> Result<bool, EnumError> {
        for w in std::mem::take(&mut self.prelude) {
            self.go(clock, w);
        }
        for tail in 0..self.thread.tails.len() {
            let w = self.thread.word(self.j, tail);
            self.go(clock, w);
        }
        self.j += 1;
        Ok(true)
    }
}

/// Right-end enumeration of thread `index`; the first thread also carries
/// the finite part. After the prelude and the first block, the stream
/// repeats one block of scripts verbatim, as recorded in `period`.
pub fn enumerate_slender_thread(dec: &SlenderDecomposition, index: usize) -> Result<ScriptStream, SlenderError> {
    let thread = dec.threads.get(index).ok_or(SlenderError::NoSuchThread { index, count: dec.t() })?.clone();
    let prelude = if index == 0 { dec.finite_part.clone() } else { Vec::new() };
    let block = thread.tails.len();
    let period = Period { prelude: prelude.len() + block, length: block };
    let producer = ThreadProducer { thread, prelude, prev: String::new(), j: 0 };
    let mut stream = ScriptStream::new(Box::new(producer), Clock::new(Cadence::Unpaced, false), None);
    stream.period = Some(period);
    Ok(stream)
}

/// Scripts of a stream prefix, or the first error.
pub fn collect_scripts(stream: ScriptStream, n: usize) -> Result<Vec<EditScript>, EnumError> {
    stream.take(n).collect()
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::editops::apply;

    fn regex(r: &str) -> Dfa {
        Dfa::from_regex(r, None).unwrap()
    }

    fn replay(scripts: &[EditScript]) -> Vec<String> {
        let mut w = String::new();
        scripts
            .iter()
            .map(|s| {
                w = apply(&w, s).unwrap();
                w.clone()
            })
            .collect()
    }

    #[test]
    fn slenderness() {
        assert!(!is_slender(&regex("a*b*")));
        assert!(!is_slender(&regex("(a+b)*")));
        assert!(is_slender(&regex("a*+b*")));
        assert!(is_slender(&regex("(ab)*")));
        assert!(is_slender(&regex("a(bc)*")));
        assert!(is_slender(&regex("ab+ba")));
        assert!(!is_slender(&regex("(ab)*(cd)*")));
        assert!(is_slender(&regex("(a+aa)*b")));
        assert!(!is_slender(&regex("(ab+b)*")));
    }

    #[test]
    fn thread_counts() {
        let d = slender_threads(&regex("a*+b*")).unwrap();
        assert_eq!(d.t(), 2);
        assert_eq!(d.finite_part, [""]);
        assert_eq!(d.threads[0], Thread { r: "a".into(), s: "a".into(), tails: vec![String::new()] });
        assert_eq!(d.threads[1].r, "b");
        let d = slender_threads(&regex("(ab)*")).unwrap();
        assert_eq!(d.t(), 1);
        assert_eq!((d.threads[0].r.as_str(), d.threads[0].s.as_str()), ("", "ab"));
        assert_eq!(slender_threads(&regex("a(bc)*")).unwrap().t(), 1);
        let fin = slender_threads(&regex("ab+b")).unwrap();
        assert_eq!(fin.t(), 0);
        assert_eq!(fin.finite_part, ["b", "ab"]);
        assert_eq!(slender_threads(&regex("a*b*")), Err(SlenderError::NotSlender));
    }

    #[test]
    fn decomposition_covers() {
        for r in ["a*+b*", "(ab)*", "a(bc)*", "c+a(bb)*(c+d+cd)", "ab*+ba*+aa"] {
            let a = regex(r);
            let d = slender_threads(&a).unwrap();
            let mut got = d.expand(10);
            let n = got.len();
            got.sort();
            got.dedup();
            assert_eq!(got.len(), n, "{r}: parts overlap");
            let mut want = a.enumerate_by_length(10);
            want.sort();
            assert_eq!(got, want, "{r}");
            for (i, x) in d.threads.iter().enumerate() {
                for y in &d.threads[i + 1..] {
                    assert!(!x.r.starts_with(&y.r) && !y.r.starts_with(&x.r));
                }
                assert!(d.finite_part.iter().all(|w| !w.starts_with(&x.r)));
            }
        }
    }

    #[test]
    fn periodic_streams() {
        let a = regex("c+a(bb)*(c+d+cd)");
        let d = slender_threads(&a).unwrap();
        assert_eq!(d.t(), 1);
        assert_eq!(d.threads[0].tails.len(), 3);
        let stream = enumerate_slender_thread(&d, 0).unwrap();
        let period = stream.period.unwrap();
        assert_eq!(period, Period { prelude: 4, length: 3 });
        let scripts = collect_scripts(stream, period.prelude + 5 * period.length).unwrap();
        assert!(scripts.iter().all(|s| s.only_right() && s.len() <= d.bound()));
        let block = &scripts[period.prelude..period.prelude + period.length];
        for p in scripts[period.prelude..].chunks(period.length) {
            assert_eq!(p, block);
        }
        let words = replay(&scripts);
        assert_eq!(words.iter().collect::<HashSet<_>>().len(), words.len());
        assert!(words.iter().all(|w| a.accepts(w)));
        assert_eq!(&words[..4], ["c", "ac", "ad", "acd"]);
    }

    #[test]
    fn single_letter_thread() {
        let d = slender_threads(&regex("a*+b*")).unwrap();
        let scripts = collect_scripts(enumerate_slender_thread(&d, 1).unwrap(), 30).unwrap();
        assert!(scripts.iter().skip(1).all(|s| s.to_string() == "+r:b"));
        assert_eq!(replay(&scripts)[29], "b".repeat(30));
        assert!(matches!(enumerate_slender_thread(&d, 2), Err(SlenderError::NoSuchThread { index: 2, count: 2 })));
    }
}

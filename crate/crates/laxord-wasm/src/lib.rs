//! Bindings behind the static demo page in `www/`. Each call takes an
//! automaton in the line format or a regular expression and returns plain
//! text for the page to show.

use std::fmt::Write;

use laxord::enumerator::{enumerate_finite, enumerate_part, Cadence, StreamConfig};
use laxord::interchange::build_partition;
use laxord::slender::{enumerate_slender_thread, is_slender, slender_threads};
use laxord::{apply, parse_dfa, Dfa};
use wasm_bindgen::prelude::*;

const MAX_WORDS: u32 = 2000;

fn load(input: &str) -> Result<Dfa, String> {
    let text = input.trim();
    if text.starts_with("alphabet:") {
        parse_dfa(text).map(|p| p.dfa).map_err(|e| e.to_string())
    } else {
        Dfa::from_regex(text, None).map_err(|e| e.to_string())
    }
}

fn show(w: &str) -> &str {
    if w.is_empty() {
        "ε"
    } else {
        w
    }
}

fn or_error(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| format!("error: {e}"))
}

/// Number of parts and the shortest words of each.
#[wasm_bindgen]
pub fn partition(input: &str) -> String {
    or_error(load(input).map(|a| {
        let p = build_partition(&a);
        let mut out = format!("t = {}{}\n", p.t(), if p.finite { " (finite language)" } else { "" });
        for (i, part) in p.parts.iter().enumerate() {
            let words = part.enumerate_by_length(part.size().min(6));
            let sample: Vec<&str> = words.iter().take(8).map(|w| show(w)).collect();
            let _ = writeln!(out, "part {i}: {} states; {} ...", part.size(), sample.join(", "));
        }
        out
    }))
}

/// The first `count` scripts of one part, each followed by the word it produces.
#[wasm_bindgen]
pub fn enumerate(input: &str, part: usize, count: u32) -> String {
    or_error(load(input).and_then(|a| {
        let n = count.min(MAX_WORDS) as u64;
        let p = build_partition(&a);
        let stream = if p.finite {
            let words = p.parts[0].enumerate_by_length(p.parts[0].size());
            enumerate_finite(&words, None).map_err(|e| e.to_string())?.with_max_outputs(Some(n))
        } else {
            let dfa = p.parts.get(part).ok_or(format!("part {part} does not exist: there are {} parts", p.t()))?;
            let cfg = StreamConfig { cadence: Cadence::Unpaced, budget: 4_000_000, ..StreamConfig::tightened() };
            enumerate_part(dfa, &cfg.with_max_outputs(n)).map_err(|e| e.to_string())?
        };
        let mut out = String::new();
        let mut w = String::new();
        for s in stream {
            let s = s.map_err(|e| e.to_string())?;
            w = apply(&w, &s).map_err(|e| e.to_string())?;
            let script = s.to_string();
            let _ = writeln!(out, "{:<28} {}", if script.is_empty() { "(none)" } else { &script }, show(&w));
        }
        Ok(out)
    }))
}

/// Slenderness, the thread split, and the first words of thread 0.
#[wasm_bindgen]
pub fn slender(input: &str, count: u32) -> String {
    or_error(load(input).map(|a| {
        if !is_slender(&a) {
            return "not slender: two cycles of the minimal automaton are connected\n".to_string();
        }
        let dec = match slender_threads(&a) {
            Ok(d) => d,
            Err(e) => return format!("error: {e}"),
        };
        let finite: Vec<&str> = dec.finite_part.iter().map(|w| show(w)).collect();
        let mut out = format!("slender, {} threads\nfinite part: {}\n", dec.t(), finite.join(", "));
        for (i, th) in dec.threads.iter().enumerate() {
            let tails: Vec<&str> = th.tails.iter().map(|w| show(w)).collect();
            let _ = writeln!(out, "thread {i}: {} ({})* {{{}}}", show(&th.r), th.s, tails.join(", "));
        }
        if let Ok(stream) = enumerate_slender_thread(&dec, 0) {
            let mut w = String::new();
            out.push_str("\nthread 0, right-end scripts:\n");
            for s in stream.take(count.min(MAX_WORDS) as usize).flatten() {
                w = apply(&w, &s).unwrap_or_default();
                let _ = writeln!(out, "{:<28} {}", s.to_string(), show(&w));
            }
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_parts() {
        assert!(partition("a*+b*").starts_with("t = 2\n"));
        assert!(partition("(a+b").starts_with("error: "));
    }

    #[test]
    fn enumerate_lists_words() {
        let out = enumerate("a*", 0, 4);
        let words: Vec<&str> = out.lines().map(|l| l.split_whitespace().last().unwrap()).collect();
        assert_eq!(words, ["ε", "a", "aa", "aaa"]);
        assert!(enumerate("a*+b*", 5, 3).starts_with("error: part 5"));
        assert_eq!(enumerate("ab+ba", 0, 10).lines().count(), 2);
    }

    #[test]
    fn slender_threads_listed() {
        assert!(slender("a*b*", 3).starts_with("not slender"));
        let out = slender("c+a(bb)*(c+d+cd)", 4);
        assert!(out.contains("thread 0: a (bb)* {c, d, cd}"), "{out}");
    }
}

//! Script streams. A producer builds the strata of an interchangeable
//! language in order, orders each one, and appends the scripts to a FIFO;
//! a clock measuring producer work releases one script every `E` units.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automata::Dfa;
use crate::editops::{script_between, EditScript, Metric};
use crate::interchange::{build_partition, interchangeability_classes, sort_words, InterchangeError};
use crate::meter::{Meter, NoMeter};
use crate::strata::{grown_stratum_graph, ladder, order_stratum_metered, stratum, words_in_lengths, Ladder, StrataError, StratumGraph, StratumParams};
use crate::worddag::{DagError, WordDag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error("stratum {0}: no word of the stratum lies within distance d of the previous exit")]
    NoEntry(usize),
    #[error("stratum {0}: no word has a next-stratum word within distance d")]
    NoExit(usize),
    #[error("the FIFO ran dry before output {0}: the cadence is too small")]
    Underrun(u64),
    #[error("the language is finite")]
    FiniteLanguage,
    #[error("the language is empty")]
    EmptyLanguage,
    #[error("the automaton has {0} interchangeability classes, expected 1")]
    NotInterchangeable(usize),
    #[error("distance bound {bound} is below {needed}, the largest step between consecutive words")]
    BoundTooSmall { needed: usize, bound: usize },
    #[error("part {index} does not exist: there are {count} parts")]
    NoSuchPart { index: usize, count: usize },
    #[error("the cadence must be at least 1")]
    ZeroCadence,
    #[error("stratum {stratum} has {words} words, over the limit of {limit}")]
    StratumTooLarge { stratum: usize, words: u128, limit: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// ℓ = 8k², d = 16k².
    Paper,
    /// ℓ = 2k, d = 3k unless overridden.
    #[default]
    Tightened,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Mode::Paper),
            "tightened" => Ok(Mode::Tightened),
            _ => Err(format!("unknown mode {s:?} (expected paper or tightened)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Tightened => "tightened",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Cadence {
    /// Measured while the first three strata are produced.
    #[default]
    Auto,
    /// Fixed work units per output, starting once the first stratum is queued.
    Fixed(u64),
    /// Every script is released as soon as it is queued.
    Unpaced,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    /// The word DAG when the words up to length 4ℓ fit in the budget,
    /// materialized strata otherwise.
    #[default]
    Auto,
    WordDag,
    Materialized,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamConfig {
    pub mode: Mode,
    /// `(ℓ, d)` in tightened mode; defaults to `(2k, 3k)`.
    pub ell_d: Option<(usize, usize)>,
    pub part_index: usize,
    pub max_outputs: Option<u64>,
    pub cadence: Cadence,
    pub backend: Backend,
    /// Node budget of the word DAG.
    pub budget: usize,
    /// Keep the work gap of every output in the stats.
    pub record_gaps: bool,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Tightened,
            ell_d: None,
            part_index: 0,
            max_outputs: None,
            cadence: Cadence::Auto,
            backend: Backend::Auto,
            budget: 40_000_000,
            record_gaps: false,
        }
    }
}

impl StreamConfig {
    pub fn tightened() -> Self {
        Self::default()
    }

    pub fn paper() -> Self {
        Self { mode: Mode::Paper, ..Self::default() }
    }

    pub fn with_max_outputs(mut self, n: u64) -> Self {
        self.max_outputs = Some(n);
        self
    }

    /// Parameters for an automaton with `k` states.
    pub fn params(&self, k: usize) -> Result<StratumParams, EnumError> {
        match (self.mode, self.ell_d) {
            (Mode::Paper, _) => Ok(StratumParams::paper(k)),
            (Mode::Tightened, None) => Ok(StratumParams::tightened(k)),
            (Mode::Tightened, Some((ell, d))) => Ok(StratumParams::custom(k, ell, d)?),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StreamStats {
    pub outputs: u64,
    /// Producer work so far.
    pub work: u64,
    /// Work before the first output.
    pub startup: u64,
    /// Largest work between consecutive outputs.
    pub max_gap: u64,
    pub stalls: u64,
    pub cadence: Option<u64>,
    /// Words of each stratum queued so far.
    pub strata: Vec<usize>,
    /// Work between each output and the previous one, when recorded.
    pub gaps: Vec<u64>,
}

/// Virtual time measured in producer work. Implements [`Meter`] so the
/// producer's ticks drive the release of queued scripts.
#[derive(Debug)]
pub struct Clock {
    now: u64,
    pacing: Cadence,
    period: Option<u64>,
    next_event: u64,
    fifo: VecDeque<EditScript>,
    ready: VecDeque<EditScript>,
    last_output: Option<u64>,
    marks: Vec<u64>,
    record: bool,
    finished: bool,
    stats: StreamStats,
}

impl Clock {
    pub fn new(pacing: Cadence, record: bool) -> Self {
        Self {
            now: 0,
            pacing,
            period: None,
            next_event: 0,
            fifo: VecDeque::new(),
            ready: VecDeque::new(),
            last_output: None,
            marks: Vec::new(),
            record,
            finished: false,
            stats: StreamStats::default(),
        }
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn push(&mut self, s: EditScript) {
        self.fifo.push_back(s);
    }

    pub fn queued(&self) -> usize {
        self.fifo.len()
    }

    /// Records that a stratum of `words` words is fully queued; calibrates
    /// or starts the cadence.
    pub fn mark_stratum(&mut self, words: usize) {
        self.stats.strata.push(words);
        self.marks.push(self.now);
        match self.pacing {
            Cadence::Fixed(e) if self.period.is_none() => self.start(e),
            Cadence::Auto if self.marks.len() == 3 => {
                // Work spent on stratum i + 1 per word of stratum i, so that
                // stratum i lasts while stratum i + 1 is produced.
                let m = &self.marks;
                let n = &self.stats.strata;
                let rate = (1..3).map(|i| (m[i] - m[i - 1]).div_ceil(n[i - 1].max(1) as u64)).max().unwrap();
                self.start((2 * rate).max(1));
            }
            _ => {}
        }
    }

    fn start(&mut self, e: u64) {
        self.period = Some(e);
        self.stats.cadence = Some(e);
        self.next_event = self.now + e;
    }

    fn emit(&mut self, at: u64, s: EditScript) {
        match self.last_output {
            None => self.stats.startup = at,
            Some(prev) => {
                let gap = at - prev;
                self.stats.max_gap = self.stats.max_gap.max(gap);
                if self.record {
                    self.stats.gaps.push(gap);
                }
            }
        }
        self.last_output = Some(at);
        self.stats.outputs += 1;
        self.ready.push_back(s);
    }

    /// The producer is done: what is left goes out without pacing.
    fn finish(&mut self) {
        self.finished = true;
    }

    fn take(&mut self, remaining: Option<u64>) -> Option<EditScript> {
        // A bounded stream whose remaining outputs are all queued needs no
        // further production: the clock idles forward at the cadence.
        let covered = remaining.is_some_and(|r| (self.fifo.len() + self.ready.len()) as u64 >= r);
        if self.ready.is_empty() && (self.finished || covered || self.pacing == Cadence::Unpaced) {
            if let Some(s) = self.fifo.pop_front() {
                match self.period {
                    Some(e) if covered && !self.finished => {
                        let at = self.next_event;
                        self.now = self.now.max(at);
                        self.next_event += e;
                        self.emit(at, s);
                    }
                    _ => self.emit(self.now, s),
                }
            }
        }
        self.ready.pop_front()
    }

    pub fn stats(&self) -> StreamStats {
        StreamStats { work: self.now, ..self.stats.clone() }
    }
}

impl Meter for Clock {
    fn tick(&mut self, units: u64) {
        self.now += units;
        let Some(e) = self.period else { return };
        while self.now >= self.next_event {
            let at = self.next_event;
            self.next_event += e;
            match self.fifo.pop_front() {
                Some(s) => self.emit(at, s),
                None => self.stats.stalls += 1,
            }
        }
    }
}

/// Incremental source of scripts.
pub trait Producer {
    /// Does a bounded amount of work, queueing finished scripts on the
    /// clock. Returns false once nothing more will be produced.
    fn stage(&mut self, clock: &mut Clock) -> Result<bool, EnumError>;
}

/// Where the periodic part of an ultimately periodic stream starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Period {
    /// Scripts before the first period.
    pub prelude: usize,
    /// Scripts per period.
    pub length: usize,
}

/// A lazy stream of scripts; applying them in turn to ε yields the words.
pub struct ScriptStream {
    producer: Option<Box<dyn Producer>>,
    clock: Clock,
    max_outputs: Option<u64>,
    returned: u64,
    failed: bool,
    pub params: Option<StratumParams>,
    pub period: Option<Period>,
}

impl fmt::Debug for ScriptStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScriptStream").field("returned", &self.returned).field("params", &self.params).finish()
    }
}

impl ScriptStream {
    pub fn new(producer: Box<dyn Producer>, clock: Clock, max_outputs: Option<u64>) -> Self {
        Self { producer: Some(producer), clock, max_outputs, returned: 0, failed: false, params: None, period: None }
    }

    pub fn with_max_outputs(mut self, n: Option<u64>) -> Self {
        self.max_outputs = n;
        self
    }

    pub fn stats(&self) -> StreamStats {
        self.clock.stats()
    }

    /// Largest script length the stream may emit, when known.
    pub fn bound(&self) -> Option<usize> {
        self.params.map(|p| 3 * p.d)
    }
}

impl Iterator for ScriptStream {
    type Item = Result<EditScript, EnumError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.max_outputs.is_some_and(|m| self.returned >= m) {
            return None;
        }
        loop {
            let remaining = self.max_outputs.map(|m| m - self.returned);
            if let Some(s) = self.clock.take(remaining) {
                self.returned += 1;
                return Some(Ok(s));
            }
            if self.clock.stats.stalls > 0 {
                self.failed = true;
                return Some(Err(EnumError::Underrun(self.clock.stats.outputs + 1)));
            }
            let producer = self.producer.as_mut()?;
            match producer.stage(&mut self.clock) {
                Ok(true) => {}
                Ok(false) => {
                    self.producer = None;
                    self.clock.finish();
                }
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// A stratum graph read off the word DAG, with the DAG node of each word.
#[derive(Clone, Debug)]
pub struct Extracted {
    pub graph: StratumGraph,
    pub nodes: Vec<u32>,
    /// Script from the previous exit (ε for the first stratum) to the entry.
    pub bridge: EditScript,
}

impl Extracted {
    pub fn exit_node(&self) -> u32 {
        self.nodes[self.graph.exit.expect("set by extraction")]
    }
}

/// Visit stamps over DAG nodes.
#[derive(Default)]
struct Marks {
    stamp: Vec<u32>,
    current: u32,
    /// Graph position of each stratum node, `u32::MAX` elsewhere.
    pos: Vec<u32>,
}

impl Marks {
    fn fresh(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
        if self.current == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.current = 0;
        }
        self.current += 1;
    }

    fn place(&mut self, n: usize, nodes: &[u32]) {
        if self.pos.len() < n {
            self.pos.resize(n, u32::MAX);
        }
        for (j, &x) in nodes.iter().enumerate() {
            self.pos[x as usize] = j as u32;
        }
    }

    fn unplace(&mut self, nodes: &[u32]) {
        for &x in nodes {
            self.pos[x as usize] = u32::MAX;
        }
    }

    fn position(&self, x: u32) -> Option<usize> {
        self.pos.get(x as usize).copied().filter(|&j| j != u32::MAX).map(|j| j as usize)
    }

    fn mark(&mut self, x: u32) -> bool {
        let s = &mut self.stamp[x as usize];
        let fresh = *s != self.current;
        *s = self.current;
        fresh
    }
}

/// Breadth-first search of the undirected DAG around `from`, up to `d`
/// edges, in token order. Calls `visit` on every node but `from`.
fn ball(g: &WordDag, from: u32, d: usize, marks: &mut Marks, meter: &mut dyn Meter, mut visit: impl FnMut(u32)) {
    marks.fresh(g.len());
    marks.mark(from);
    let mut frontier = vec![from];
    let mut next = Vec::new();
    for _ in 0..d {
        for &x in &frontier {
            for (y, _) in g.neighbours(x) {
                if marks.mark(y) {
                    visit(y);
                    next.push(y);
                }
            }
        }
        meter.tick(frontier.len() as u64 + 1);
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
        if frontier.is_empty() {
            break;
        }
    }
}

pub fn extract_stratum_graph(g: &WordDag, i: usize, prev_exit: Option<u32>) -> Result<Extracted, EnumError> {
    let mut marks = Marks::default();
    let mut job = Extraction::begin(g, i, prev_exit, &mut marks, &mut NoMeter)?;
    while !job.advance(g, &mut marks, &mut NoMeter, usize::MAX) {}
    job.finish(g, &mut marks)
}

/// Reading stratum `i` off the DAG once phase `i + 2` is finished. The entry
/// is a successful node of the stratum close to `prev_exit` (or to the root
/// for the first stratum); the stratum is collected by a depth-first search
/// restricted to lengths near the stratum, and edges by a search of radius
/// `d` around each of its words, a few words at a time. The exit is the
/// first word, in length order, with a word of the next stratum within
/// distance `d`.
struct Extraction {
    i: usize,
    prev_exit: Option<u32>,
    entries: Vec<u32>,
    words: Vec<String>,
    nodes: Vec<u32>,
    adj: Vec<Vec<usize>>,
    exits: Vec<usize>,
    done: usize,
}

impl Extraction {
    fn begin(g: &WordDag, i: usize, prev_exit: Option<u32>, marks: &mut Marks, meter: &mut dyn Meter) -> Result<Self, EnumError> {
        let p = g.params();
        let (lo, hi) = p.lengths(i);
        let in_stratum = |x: u32| g.is_successful(x) && (lo..hi).contains(&g.depth(x));
        let from = prev_exit.unwrap_or(0);

        let mut entries = Vec::new();
        if in_stratum(from) {
            entries.push(from);
        }
        ball(g, from, p.d, marks, meter, |y| {
            if entries.len() < 2 && in_stratum(y) {
                entries.push(y);
            }
        });
        let &anchor = entries.first().ok_or(EnumError::NoEntry(i))?;

        let margin = (2 * p.ell).max(p.d);
        let (wlo, whi) = (lo.saturating_sub(margin), hi + margin);
        marks.fresh(g.len());
        marks.mark(anchor);
        let mut stack = vec![anchor];
        let mut found = Vec::new();
        while let Some(x) = stack.pop() {
            if in_stratum(x) {
                found.push(x);
            }
            for (y, _) in g.neighbours(x) {
                if (wlo..=whi).contains(&g.depth(y)) && marks.mark(y) {
                    stack.push(y);
                }
            }
            meter.tick(1);
        }
        let mut keyed: Vec<(String, u32)> = found.into_iter().map(|x| (g.word(x), x)).collect();
        meter.tick(keyed.len() as u64);
        let alphabet = g.dfa().alphabet();
        keyed.sort_by_cached_key(|(w, _)| {
            let idx: Vec<usize> = w.chars().map(|c| alphabet.iter().position(|&a| a == c).unwrap()).collect();
            (idx.len(), idx)
        });
        let (words, nodes): (Vec<String>, Vec<u32>) = keyed.into_iter().unzip();
        marks.place(g.len(), &nodes);
        let adj = vec![Vec::new(); nodes.len()];
        Ok(Self { i, prev_exit, entries, words, nodes, adj, exits: Vec::new(), done: 0 })
    }

    /// Finds the edges of up to `chunk` more words; true once all are done.
    fn advance(&mut self, g: &WordDag, marks: &mut Marks, meter: &mut dyn Meter, chunk: usize) -> bool {
        let p = g.params();
        let hi = p.lengths(self.i).1;
        let stop = self.nodes.len().min(self.done.saturating_add(chunk));
        for u in self.done..stop {
            let x = self.nodes[u];
            let mut leaves = false;
            let mut near = Vec::new();
            ball(g, x, p.d, marks, meter, |y| near.push(y));
            for y in near {
                match marks.position(y) {
                    Some(v) => self.adj[u].push(v),
                    None => leaves = leaves || (g.is_successful(y) && (hi..hi + p.ell).contains(&g.depth(y))),
                }
            }
            self.adj[u].sort_unstable();
            if leaves {
                self.exits.push(u);
            }
        }
        self.done = stop;
        stop == self.nodes.len()
    }

    fn finish(self, g: &WordDag, marks: &mut Marks) -> Result<Extracted, EnumError> {
        let entry_pos: Vec<usize> = self.entries.iter().map(|&x| marks.position(x).expect("entries lie in the stratum")).collect();
        marks.unplace(&self.nodes);
        let (exits, i) = (&self.exits, self.i);
        if self.nodes.len() > 1 && exits.is_empty() {
            return Err(EnumError::NoExit(i));
        }
        let (s, e) = if self.nodes.len() == 1 {
            (0, 0)
        } else {
            let s = entry_pos[0];
            match exits.iter().find(|&&u| u != s) {
                Some(&e) => (s, e),
                None => match entry_pos.get(1) {
                    Some(&s2) => (s2, exits[0]),
                    None => return Err(EnumError::NoExit(i)),
                },
            }
        };
        let prev_word = self.prev_exit.map(|x| g.word(x)).unwrap_or_default();
        let bridge = script_between(&prev_word, &self.words[s], Metric::PushPop).expect("push-pop");
        let d = g.params().d;
        let graph = StratumGraph { index: i, words: self.words, adj: self.adj, d, metric: Metric::PushPop, entry: Some(s), exit: Some(e) };
        Ok(Extracted { graph, nodes: self.nodes, bridge })
    }
}

fn queue_stratum(clock: &mut Clock, graph: &StratumGraph, bridge: EditScript) -> Result<(), EnumError> {
    let ordering = order_stratum_metered(graph, clock)?;
    clock.push(bridge);
    for s in ordering.scripts {
        clock.push(s);
    }
    clock.mark_stratum(graph.len());
    Ok(())
}

struct DagProducer {
    dag: WordDag,
    marks: Marks,
    job: Option<Extraction>,
    phase_open: bool,
    next_stratum: usize,
    prev_exit: Option<u32>,
}

impl DagProducer {
    fn phase_done(&self, i: usize) -> bool {
        self.dag.phase() > i || (self.dag.phase() == i && !self.phase_open)
    }
}

impl Producer for DagProducer {
    fn stage(&mut self, clock: &mut Clock) -> Result<bool, EnumError> {
        let i = self.next_stratum;
        if !self.phase_done(i + 2) {
            if self.phase_open {
                if !self.dag.step(clock)? {
                    self.phase_open = false;
                }
            } else {
                self.dag.begin_phase();
                self.phase_open = true;
                clock.tick(1);
            }
            return Ok(true);
        }
        let job = match self.job.as_mut() {
            Some(job) => job,
            None => {
                let job = Extraction::begin(&self.dag, i, self.prev_exit, &mut self.marks, clock)?;
                self.job.insert(job)
            }
        };
        if !job.advance(&self.dag, &mut self.marks, clock, 64) {
            return Ok(true);
        }
        let ex = self.job.take().unwrap().finish(&self.dag, &mut self.marks)?;
        self.prev_exit = Some(ex.exit_node());
        queue_stratum(clock, &ex.graph, ex.bridge)?;
        self.next_stratum += 1;
        Ok(true)
    }
}

struct MaterializedProducer {
    dfa: Dfa,
    params: StratumParams,
    limit: usize,
    ladder: Ladder,
    next_stratum: usize,
    prev_word: String,
}

impl Producer for MaterializedProducer {
    fn stage(&mut self, clock: &mut Clock) -> Result<bool, EnumError> {
        let i = self.next_stratum;
        let (lo, hi) = self.params.lengths(i);
        let count = count_words(&self.dfa, lo, hi);
        if count > self.limit as u128 {
            return Err(EnumError::StratumTooLarge { stratum: i, words: count, limit: self.limit });
        }
        let words = stratum(&self.dfa, &self.params, i);
        clock.tick(words.len() as u64 + 1);
        let rung = self.ladder.rung(i);
        let entry = match rung.entry {
            Some(w) => w,
            None => words.iter().find(|w| **w != rung.exit || words.len() == 1).cloned().ok_or(EnumError::NoEntry(i))?,
        };
        let mut graph = grown_stratum_graph(&self.dfa, &words, self.params.d, clock)?.with_endpoints(&entry, &rung.exit)?;
        graph.index = i;
        let bridge = script_between(&self.prev_word, &entry, Metric::PushPop).expect("push-pop");
        queue_stratum(clock, &graph, bridge)?;
        self.prev_word = rung.exit;
        self.next_stratum += 1;
        Ok(true)
    }
}

/// Number of accepted words with length in `lo..hi`, saturating.
pub fn count_words(a: &Dfa, lo: usize, hi: usize) -> u128 {
    let mut layer = vec![0u128; a.size()];
    layer[a.initial()] = 1;
    let mut total = 0u128;
    for len in 0..hi {
        if len >= lo {
            total = a.finals().fold(total, |t, q| t.saturating_add(layer[q]));
        }
        let mut next = vec![0u128; a.size()];
        for (p, _, q) in a.transitions() {
            next[q] = next[q].saturating_add(layer[p]);
        }
        layer = next;
    }
    total
}

fn dag_fits(a: &Dfa, p: &StratumParams, budget: usize) -> bool {
    let k = a.alphabet().len() as f64;
    p.d < 255 && k.powf(4.0 * p.ell as f64) <= budget as f64
}

/// Enumerates the language of an interchangeable automaton with an infinite
/// language, stratum by stratum.
pub fn enumerate_part(a_part: &Dfa, cfg: &StreamConfig) -> Result<ScriptStream, EnumError> {
    let a = a_part.trim();
    if a.is_empty() {
        return Err(EnumError::EmptyLanguage);
    }
    let classes = match interchangeability_classes(&a) {
        Ok(c) => c,
        Err(InterchangeError::FiniteLanguage) => return Err(EnumError::FiniteLanguage),
        Err(e) => unreachable!("{e}"),
    };
    if classes.count() != 1 {
        return Err(EnumError::NotInterchangeable(classes.count()));
    }
    if cfg.cadence == Cadence::Fixed(0) {
        return Err(EnumError::ZeroCadence);
    }
    let params = cfg.params(a.size())?;
    let use_dag = match cfg.backend {
        Backend::WordDag => true,
        Backend::Materialized => false,
        Backend::Auto => dag_fits(&a, &params, cfg.budget),
    };
    let mut clock = Clock::new(cfg.cadence, cfg.record_gaps);
    let producer: Box<dyn Producer> = if use_dag {
        let dag = WordDag::init_metered(&a, &params, cfg.budget, &mut clock)?;
        Box::new(DagProducer { dag, marks: Marks::default(), job: None, phase_open: false, next_stratum: 1, prev_exit: None })
    } else {
        let ladder = ladder(&a, &params)?;
        Box::new(MaterializedProducer { dfa: a, params, limit: cfg.budget / 8, ladder, next_stratum: 1, prev_word: String::new() })
    };
    let mut stream = ScriptStream::new(producer, clock, cfg.max_outputs);
    stream.params = Some(params);
    Ok(stream)
}

struct Queued(Option<Vec<EditScript>>);

impl Producer for Queued {
    fn stage(&mut self, clock: &mut Clock) -> Result<bool, EnumError> {
        match self.0.take() {
            Some(scripts) => {
                for s in scripts {
                    clock.tick(s.len() as u64 + 1);
                    clock.push(s);
                }
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

/// Orders a finite set of words by length, then alphabetically, with
/// minimal scripts between neighbours. `d_bound` defaults to twice the
/// longest word.
pub fn enumerate_finite(words: &[String], d_bound: Option<usize>) -> Result<ScriptStream, EnumError> {
    let mut sorted = words.to_vec();
    sorted.sort_by(|u, v| (u.chars().count(), u).cmp(&(v.chars().count(), v)));
    if let Some(w) = sorted.windows(2).find(|p| p[0] == p[1]) {
        return Err(StrataError::DuplicateWord(w[0].clone()).into());
    }
    let bound = d_bound.unwrap_or_else(|| 2 * sorted.iter().map(|w| w.chars().count()).max().unwrap_or(0));
    let mut prev = String::new();
    let mut scripts = Vec::with_capacity(sorted.len());
    for w in &sorted {
        scripts.push(script_between(&prev, w, Metric::PushPop).expect("push-pop"));
        prev.clone_from(w);
    }
    let needed = scripts.iter().map(EditScript::len).max().unwrap_or(0);
    if needed > bound {
        return Err(EnumError::BoundTooSmall { needed, bound });
    }
    Ok(ScriptStream::new(Box::new(Queued(Some(scripts))), Clock::new(Cadence::Unpaced, false), None))
}

/// One stream per part of the partition.
pub fn enumerate_language(a: &Dfa, cfg: &StreamConfig) -> Result<Vec<ScriptStream>, EnumError> {
    let partition = build_partition(a);
    if partition.finite {
        let mut words = partition.parts[0].enumerate_by_length(partition.parts[0].size());
        sort_words(&partition.parts[0], &mut words);
        return Ok(vec![enumerate_finite(&words, None)?.with_max_outputs(cfg.max_outputs)]);
    }
    partition.parts.iter().map(|part| enumerate_part(part, cfg)).collect()
}

/// The stream of part `cfg.part_index`.
pub fn enumerate_selected(a: &Dfa, cfg: &StreamConfig) -> Result<ScriptStream, EnumError> {
    let partition = build_partition(a);
    let count = partition.t();
    if cfg.part_index >= count {
        return Err(EnumError::NoSuchPart { index: cfg.part_index, count });
    }
    if partition.finite {
        return enumerate_language(a, cfg).map(|mut v| v.remove(0));
    }
    enumerate_part(&partition.parts[cfg.part_index], cfg)
}

/// Words of stratum `i` of `a`, listed directly.
pub fn stratum_words(a: &Dfa, p: &StratumParams, i: usize) -> Vec<String> {
    let (lo, hi) = p.lengths(i);
    words_in_lengths(a, lo, hi)
}

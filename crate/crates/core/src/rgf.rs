//! Restricted growth functions: the canonical word of a set partition.
//!
//! A partition of `[n]` with blocks labelled in order of their minima is the
//! word `w` where `w[i]` is the label of the block containing `i`. Such words
//! are exactly those with `w[1] = 1` and `w[i] <= 1 + max(w[1..i])`.

use std::collections::BTreeSet;
use std::fmt;
use std::io;
use std::str::FromStr;

use thiserror::Error;

/// Which condition a rejected word violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Labels are positive.
    ZeroValue,
    /// The first symbol must be 1.
    FirstNotOne { value: u32 },
    /// A label exceeds one plus the maximum of the prefix.
    GrowthExceeded { value: u32, allowed: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroValue => write!(f, "labels must be positive"),
            Violation::FirstNotOne { value } => write!(f, "word starts with {value}, not 1"),
            Violation::GrowthExceeded { value, allowed } => {
                write!(f, "value {value} exceeds 1 + prefix maximum ({allowed})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RgfError {
    #[error("empty word")]
    Empty,
    #[error("not a restricted growth function at position {position}: {reason}")]
    NotAnRgf { position: usize, reason: Violation },
    #[error("cannot parse {0:?} as a word")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("element {0} appears in more than one block")]
    Overlap(usize),
    #[error("element {0} is missing from the partition")]
    Gap(usize),
    #[error("block {0} does not start after block {prev}", prev = .0 - 1)]
    MinOrder(usize),
    #[error("element 0 is not allowed; ground set is 1..=n")]
    ZeroElement,
}

/// A validated restricted growth function.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rgf {
    word: Vec<u32>,
    blocks: u32,
}

impl Rgf {
    /// The word of the empty partition of the empty set.
    pub fn empty() -> Self {
        Rgf {
            word: Vec::new(),
            blocks: 0,
        }
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    /// Number of blocks, `k = max(word)`.
    pub fn blocks(&self) -> u32 {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn into_word(self) -> Vec<u32> {
        self.word
    }
}

/// Checks the restricted growth property, naming the first offending position
/// (1-based).
pub fn validate(word: &[u32]) -> Result<Rgf, RgfError> {
    if word.is_empty() {
        return Err(RgfError::Empty);
    }
    let mut max = 0u32;
    for (i, &v) in word.iter().enumerate() {
        let position = i + 1;
        if v == 0 {
            return Err(RgfError::NotAnRgf {
                position,
                reason: Violation::ZeroValue,
            });
        }
        if i == 0 && v != 1 {
            return Err(RgfError::NotAnRgf {
                position,
                reason: Violation::FirstNotOne { value: v },
            });
        }
        if v > max + 1 {
            return Err(RgfError::NotAnRgf {
                position,
                reason: Violation::GrowthExceeded {
                    value: v,
                    allowed: max + 1,
                },
            });
        }
        max = max.max(v);
    }
    Ok(Rgf {
        word: word.to_vec(),
        blocks: max,
    })
}

impl TryFrom<Vec<u32>> for Rgf {
    type Error = RgfError;

    fn try_from(word: Vec<u32>) -> Result<Self, Self::Error> {
        validate(&word)
    }
}

impl FromStr for Rgf {
    type Err = RgfError;

    /// Accepts either a run of digits (`122132132`) or values separated by
    /// whitespace or commas (`1 2 10 ...`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let word: Vec<u32> = if s.contains(|c: char| c.is_whitespace() || c == ',') {
            s.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| RgfError::Parse(s.to_string())))
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| RgfError::Parse(s.to_string())))
                .collect::<Result<_, _>>()?
        };
        validate(&word)
    }
}

impl fmt::Display for Rgf {
    /// Digits when every label fits in one digit, space-separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks <= 9 {
            for v in &self.word {
                write!(f, "{v}")?;
            }
        } else {
            for (i, v) in self.word.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

/// Writes one word per line.
pub fn write_words<W: io::Write + ?Sized>(
    out: &mut W,
    words: impl IntoIterator<Item = Rgf>,
) -> io::Result<()> {
    for w in words {
        writeln!(out, "{w}")?;
    }
    Ok(())
}

/// A set partition of `[n]` in standard form: blocks ordered by their minima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    blocks: Vec<BTreeSet<usize>>,
}

impl BlockPartition {
    pub fn new(blocks: Vec<BTreeSet<usize>>) -> Result<Self, BlockError> {
        let mut seen = BTreeSet::new();
        let mut prev_min = 0;
        for (i, b) in blocks.iter().enumerate() {
            let label = i + 1;
            let &min = b.first().ok_or(BlockError::EmptyBlock(label))?;
            if min == 0 {
                return Err(BlockError::ZeroElement);
            }
            if i > 0 && min <= prev_min {
                return Err(BlockError::MinOrder(label));
            }
            prev_min = min;
            for &e in b {
                if !seen.insert(e) {
                    return Err(BlockError::Overlap(e));
                }
            }
        }
        let n = seen.len();
        if let Some(missing) = (1..=n).find(|e| !seen.contains(e)) {
            return Err(BlockError::Gap(missing));
        }
        Ok(BlockPartition { blocks })
    }

    pub fn blocks(&self) -> &[BTreeSet<usize>] {
        &self.blocks
    }

    /// Size of the ground set.
    pub fn n(&self) -> usize {
        self.blocks.iter().map(BTreeSet::len).sum()
    }
}

impl fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            f.write_str("{")?;
            for (j, e) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

pub fn from_blocks(p: &BlockPartition) -> Rgf {
    let mut word = vec![0u32; p.n()];
    for (label, block) in p.blocks.iter().enumerate() {
        for &e in block {
            word[e - 1] = label as u32 + 1;
        }
    }
    Rgf {
        word,
        blocks: p.blocks.len() as u32,
    }
}

pub fn to_blocks(r: &Rgf) -> BlockPartition {
    let mut blocks = vec![BTreeSet::new(); r.blocks as usize];
    for (i, &v) in r.word.iter().enumerate() {
        blocks[v as usize - 1].insert(i + 1);
    }
    BlockPartition { blocks }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordKind {
    /// Value strictly above every earlier value.
    Strong,
    /// Value at least every earlier value.
    Weak,
}

/// One record of a word. `position` is 1-based.
///
/// The height is `value - word[position-1]`, and 0 at position 1. Weak records
/// that repeat the current maximum right after it have height 0; they are
/// reported but never enter height-indexed statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RecordEvent {
    pub position: usize,
    pub value: u32,
    pub height: u32,
    pub kind: RecordKind,
}

fn records(r: &Rgf, kind: RecordKind) -> Vec<RecordEvent> {
    let mut out = Vec::new();
    let mut max = 0u32;
    let mut prev = None;
    for (i, &v) in r.word.iter().enumerate() {
        let is_record = match kind {
            RecordKind::Strong => v > max,
            RecordKind::Weak => v >= max,
        };
        if is_record {
            // a record is never below its predecessor
            let height = prev.map_or(0, |p| v - p);
            out.push(RecordEvent {
                position: i + 1,
                value: v,
                height,
                kind,
            });
        }
        max = max.max(v);
        prev = Some(v);
    }
    out
}

pub fn strong_records(r: &Rgf) -> Vec<RecordEvent> {
    records(r, RecordKind::Strong)
}

pub fn weak_records(r: &Rgf) -> Vec<RecordEvent> {
    records(r, RecordKind::Weak)
}

/// Lexicographic enumerator of restricted growth functions of length `n`,
/// optionally restricted to exactly `k` blocks and to a fixed prefix.
///
/// This is the allocation-free core; [`Enumeration`] wraps it as an iterator of
/// [`Rgf`] values.
#[derive(Debug, Clone)]
pub struct Enumerator {
    n: usize,
    target: Option<u32>,
    fixed: usize,
    word: Vec<u32>,
    // running maxima: prefix_max[i] = max(word[..=i])
    prefix_max: Vec<u32>,
    state: CursorState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CursorState {
    Fresh,
    Running,
    Done,
}

impl Enumerator {
    /// Words of `P(n,k)`.
    pub fn new(n: usize, k: usize) -> Self {
        Self::with_prefix(n, Some(k), &[])
    }

    /// Words of `P(n)`, every block count.
    pub fn all(n: usize) -> Self {
        Self::with_prefix(n, None, &[])
    }

    /// Words of `P(n,k)` (or `P(n)` when `k` is `None`) beginning with
    /// `prefix`. An invalid or uncompletable prefix gives an empty stream.
    pub fn with_prefix(n: usize, k: Option<usize>, prefix: &[u32]) -> Self {
        let mut e = Enumerator {
            n,
            target: k.map(|k| k as u32),
            fixed: prefix.len(),
            word: vec![0; n],
            prefix_max: vec![0; n],
            state: CursorState::Fresh,
        };
        let feasible = prefix.len() <= n
            && (prefix.is_empty() || validate(prefix).is_ok())
            && k.is_none_or(|k| k <= n && (k > 0 || n == 0));
        if !feasible {
            e.state = CursorState::Done;
            return e;
        }
        let mut max = 0;
        for (i, &v) in prefix.iter().enumerate() {
            e.word[i] = v;
            max = max.max(v);
            e.prefix_max[i] = max;
        }
        if !e.fill_from(prefix.len(), max) {
            e.state = CursorState::Done;
        }
        e
    }

    /// Writes the smallest completion of `word[..start]`, whose maximum is
    /// `max`. Returns false when none exists.
    fn fill_from(&mut self, start: usize, max: u32) -> bool {
        if start == 0 && self.n > 0 {
            self.word[0] = 1;
            self.prefix_max[0] = 1;
            return self.fill_from(1, 1);
        }
        let remaining = self.n - start;
        let need = match self.target {
            Some(k) if k < max => return false,
            Some(k) => (k - max) as usize,
            None => 0,
        };
        if need > remaining {
            return false;
        }
        let ones_end = self.n - need;
        for i in start..ones_end {
            self.word[i] = 1;
            self.prefix_max[i] = max;
        }
        let mut m = max;
        for i in ones_end..self.n {
            m += 1;
            self.word[i] = m;
            self.prefix_max[i] = m;
        }
        true
    }

    /// Advances to the next word in lexicographic order.
    pub fn next_word(&mut self) -> Option<&[u32]> {
        match self.state {
            CursorState::Done => return None,
            CursorState::Fresh => {
                self.state = CursorState::Running;
                return Some(&self.word);
            }
            CursorState::Running => {}
        }
        let lowest = self.fixed.max(1);
        for i in (lowest..self.n).rev() {
            let before = self.prefix_max[i - 1];
            let v = self.word[i] + 1;
            if v > before + 1 {
                continue;
            }
            let m = before.max(v);
            if let Some(k) = self.target {
                if m > k || (k - m) as usize > self.n - 1 - i {
                    continue;
                }
            }
            self.word[i] = v;
            self.prefix_max[i] = m;
            let ok = self.fill_from(i + 1, m);
            debug_assert!(ok);
            return Some(&self.word);
        }
        self.state = CursorState::Done;
        None
    }
}

/// Iterator over [`Rgf`] values in lexicographic order.
#[derive(Debug, Clone)]
pub struct Enumeration {
    inner: Enumerator,
}

impl Iterator for Enumeration {
    type Item = Rgf;

    fn next(&mut self) -> Option<Rgf> {
        let blocks = self.inner.target;
        self.inner.next_word().map(|w| Rgf {
            word: w.to_vec(),
            blocks: blocks.unwrap_or_else(|| w.iter().copied().max().unwrap_or(0)),
        })
    }
}

/// Every word of `P(n,k)` in lexicographic order; `S(n,k)` of them.
pub fn enumerate(n: usize, k: usize) -> Enumeration {
    Enumeration {
        inner: Enumerator::new(n, k),
    }
}

/// Every word of `P(n)` in lexicographic order; `B(n)` of them.
pub fn enumerate_all(n: usize) -> Enumeration {
    Enumeration {
        inner: Enumerator::all(n),
    }
}

/// The words of `P(n,k)` (or `P(n)`) that start with `prefix`.
pub fn enumerate_with_prefix(n: usize, k: Option<usize>, prefix: &[u32]) -> Enumeration {
    Enumeration {
        inner: Enumerator::with_prefix(n, k, prefix),
    }
}

/// All prefixes of length `depth` that extend to at least one word of
/// `P(n,k)` (or `P(n)`), in lexicographic order.
///
/// Concatenating the streams of [`enumerate_with_prefix`] over these prefixes
/// reproduces the full stream in order, so the chunks can be processed
/// independently and merged by position.
pub fn prefixes(n: usize, k: Option<usize>, depth: usize) -> Vec<Vec<u32>> {
    let depth = depth.min(n);
    let mut out = Vec::new();
    if let Some(k) = k {
        if k > n || (k == 0 && n > 0) {
            return out;
        }
    }
    let mut cur = Vec::with_capacity(depth);
    fn rec(
        n: usize,
        k: Option<usize>,
        depth: usize,
        cur: &mut Vec<u32>,
        max: u32,
        out: &mut Vec<Vec<u32>>,
    ) {
        if let Some(k) = k {
            let need = (k as u32).saturating_sub(max) as usize;
            if max as usize > k || need > n - cur.len() {
                return;
            }
        }
        if cur.len() == depth {
            out.push(cur.clone());
            return;
        }
        let top = if cur.is_empty() { 1 } else { max + 1 };
        for v in 1..=top {
            cur.push(v);
            rec(n, k, depth, cur, max.max(v), out);
            cur.pop();
        }
    }
    rec(n, k, depth, &mut cur, 0, &mut out);
    out
}

//! Coset tables and Todd–Coxeter enumeration.
//!
//! A [`CosetTable`] is the right action of a presented group `G` on the cosets
//! `G/H` of a subgroup `H`, one column per signed generator (`g₀, g₀⁻¹, g₁, …`).
//! Coset `0` is `H` itself. Two pointed subgroups are equal exactly when their
//! standardized tables are equal.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{Letter, Word};

/// Default cap on live cosets during enumeration.
pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

const UNDEFINED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("coset enumeration exceeded {cap} live cosets (index possibly infinite, or cap too small)")]
    ResourceExhausted { cap: usize },
    #[error("coset {coset} out of range for table with {count} cosets")]
    CosetOutOfRange { coset: usize, count: usize },
    #[error("word over rank {word} used with table over rank {table}")]
    AlphabetMismatch { word: usize, table: usize },
    #[error("invalid coset table: {0}")]
    InvalidTable(String),
}

/// A complete, transitive coset table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CosetTable {
    presentation: Arc<Presentation>,
    coset_count: usize,
    // row-major, `coset_count × 2·rank`
    action: Vec<usize>,
}

impl CosetTable {
    /// The one-coset table of `H = G`.
    pub fn trivial(presentation: impl Into<Arc<Presentation>>) -> CosetTable {
        let presentation = presentation.into();
        let cols = 2 * presentation.generator_count();
        CosetTable { presentation, coset_count: 1, action: vec![0; cols] }
    }

    /// Builds a table from explicit rows and checks every table invariant.
    /// The result is not renumbered.
    pub fn from_rows(
        presentation: impl Into<Arc<Presentation>>,
        rows: &[Vec<usize>],
    ) -> Result<CosetTable, CosetError> {
        let presentation = presentation.into();
        let cols = 2 * presentation.generator_count();
        if rows.is_empty() {
            return Err(CosetError::InvalidTable("a table needs at least one coset".into()));
        }
        let mut action = Vec::with_capacity(rows.len() * cols);
        for (c, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(CosetError::InvalidTable(format!("row {c} has {} entries, expected {cols}", row.len())));
            }
            action.extend_from_slice(row);
        }
        let table = CosetTable { presentation, coset_count: rows.len(), action };
        table.check_invariants()?;
        Ok(table)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn shared_presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    pub fn rank(&self) -> usize {
        self.presentation.generator_count()
    }

    pub fn coset_count(&self) -> usize {
        self.coset_count
    }

    fn cols(&self) -> usize {
        2 * self.rank()
    }

    pub fn entry(&self, coset: usize, column: usize) -> usize {
        self.action[coset * self.cols() + column]
    }

    pub fn image(&self, coset: usize, letter: Letter) -> usize {
        self.entry(coset, letter.column())
    }

    pub fn row(&self, coset: usize) -> &[usize] {
        let cols = self.cols();
        &self.action[coset * cols..(coset + 1) * cols]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.coset_count).map(|c| self.row(c).to_vec()).collect()
    }

    /// Key for the deterministic `(coset_count, lexicographic table)` order.
    pub fn sort_key(&self) -> (usize, &[usize]) {
        (self.coset_count, &self.action)
    }

    /// Completeness, permutation columns, relators fixing every coset, and
    /// transitivity from coset 0.
    pub fn check_invariants(&self) -> Result<(), CosetError> {
        let n = self.coset_count;
        let cols = self.cols();
        if self.action.len() != n * cols {
            return Err(CosetError::InvalidTable("table size does not match coset count".into()));
        }
        for c in 0..n {
            for x in 0..cols {
                let d = self.entry(c, x);
                if d >= n {
                    return Err(CosetError::InvalidTable(format!(
                        "entry ({c}, column {x}) = {d} is undefined or out of range"
                    )));
                }
                if self.entry(d, x ^ 1) != c {
                    return Err(CosetError::InvalidTable(format!(
                        "columns {x} and {} are not mutually inverse at coset {c}",
                        x ^ 1
                    )));
                }
            }
        }
        for (i, r) in self.presentation.relators().iter().enumerate() {
            for c in 0..n {
                let end = r.letters().iter().fold(c, |e, &l| self.image(e, l));
                if end != c {
                    return Err(CosetError::InvalidTable(format!("relator {i} does not fix coset {c}")));
                }
            }
        }
        let order = self.bfs_order(0);
        if order.len() != n {
            return Err(CosetError::InvalidTable("table is not transitive from coset 0".into()));
        }
        Ok(())
    }

    /// Cosets in BFS discovery order from `start`, columns scanned in order.
    fn bfs_order(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.coset_count];
        let mut order = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for &d in self.row(c) {
                if d < self.coset_count && !seen[d] {
                    seen[d] = true;
                    order.push(d);
                }
            }
        }
        order
    }

    /// The same action renumbered by BFS from `start`, so that `start`
    /// becomes coset 0. With `start = 0` this is standardization; other
    /// starts give the table of a conjugate subgroup.
    pub fn rebased(&self, start: usize) -> CosetTable {
        let order = self.bfs_order(start);
        let mut new_index = vec![0; self.coset_count];
        for (i, &c) in order.iter().enumerate() {
            new_index[c] = i;
        }
        let mut action = Vec::with_capacity(self.action.len());
        for &c in &order {
            action.extend(self.row(c).iter().map(|&d| new_index[d]));
        }
        CosetTable { presentation: self.presentation.clone(), coset_count: order.len(), action }
    }

    pub fn is_standard(&self) -> bool {
        self.bfs_order(0).iter().enumerate().all(|(i, &c)| i == c)
    }
}

/// Renumbers cosets by BFS from coset 0 (generators in index order, positive
/// before inverse).
pub fn standardize_table(t: &CosetTable) -> CosetTable {
    t.rebased(0)
}

/// The coset reached from `c` by applying the letters of `w` left to right.
pub fn trace_word(t: &CosetTable, w: &Word, c: usize) -> Result<usize, CosetError> {
    if c >= t.coset_count {
        return Err(CosetError::CosetOutOfRange { coset: c, count: t.coset_count });
    }
    if w.rank() != t.rank() {
        return Err(CosetError::AlphabetMismatch { word: w.rank(), table: t.rank() });
    }
    Ok(w.letters().iter().fold(c, |e, &l| t.image(e, l)))
}

/// BFS transversal words: `u[c]` carries coset 0 to coset `c`.
pub fn transversal(t: &CosetTable) -> Vec<Word> {
    let rank = t.rank();
    let mut words: Vec<Option<Word>> = vec![None; t.coset_count];
    words[0] = Some(Word::empty(rank));
    let mut queue = VecDeque::from([0]);
    while let Some(c) = queue.pop_front() {
        for x in 0..t.cols() {
            let d = t.entry(c, x);
            if words[d].is_none() {
                let step = Word::reduce(rank, [Letter::from_column(x)]).expect("letter in range");
                let w = words[c].as_ref().expect("discovered").concat(&step).expect("same rank");
                words[d] = Some(w);
                queue.push_back(d);
            }
        }
    }
    words.into_iter().map(|w| w.expect("table is transitive")).collect()
}

/// Nontrivial Schreier generators `u_c · g · u_{c·g}⁻¹` of the stabilizer
/// of coset 0, in `(coset, generator)` order.
pub fn schreier_generators(t: &CosetTable) -> Vec<Word> {
    let rank = t.rank();
    let u = transversal(t);
    let mut gens = Vec::new();
    for c in 0..t.coset_count {
        for g in 0..rank {
            let d = t.image(c, Letter::pos(g));
            let w = u[c]
                .concat(&Word::generator(rank, g).expect("in range"))
                .and_then(|w| w.concat(&u[d].inverse()))
                .expect("same rank");
            if !w.is_empty() {
                gens.push(w);
            }
        }
    }
    gens
}

struct Enumerator {
    cols: usize,
    table: Vec<usize>,
    parent: Vec<usize>,
    live: usize,
    cap: usize,
    queue: Vec<usize>,
}

impl Enumerator {
    fn new(cols: usize, cap: usize) -> Self {
        Enumerator { cols, table: vec![UNDEFINED; cols], parent: vec![0], live: 1, cap, queue: Vec::new() }
    }

    fn allocated(&self) -> usize {
        self.parent.len()
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn get(&self, c: usize, x: usize) -> usize {
        self.table[c * self.cols + x]
    }

    fn set(&mut self, c: usize, x: usize, d: usize) {
        self.table[c * self.cols + x] = d;
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut k = c;
        while self.parent[k] != root {
            let next = self.parent[k];
            self.parent[k] = root;
            k = next;
        }
        root
    }

    fn define(&mut self, c: usize, x: usize) -> Result<(), CosetError> {
        if self.live >= self.cap {
            return Err(CosetError::ResourceExhausted { cap: self.cap });
        }
        let d = self.allocated();
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(UNDEFINED, self.cols));
        self.live += 1;
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn merge(&mut self, k: usize, l: usize) {
        let a = self.rep(k);
        let b = self.rep(l);
        if a == b {
            return;
        }
        // the lower index survives
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        self.parent[kill] = keep;
        self.live -= 1;
        self.queue.push(kill);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let dead = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(dead, x);
                if d == UNDEFINED {
                    continue;
                }
                if self.get(d, x ^ 1) == dead {
                    self.set(d, x ^ 1, UNDEFINED);
                }
                let mu = self.rep(dead);
                let nu = self.rep(d);
                let mu_x = self.get(mu, x);
                let nu_inv = self.get(nu, x ^ 1);
                if mu_x != UNDEFINED {
                    self.merge(nu, mu_x);
                } else if nu_inv != UNDEFINED {
                    self.merge(mu, nu_inv);
                } else {
                    self.set(mu, x, nu);
                    self.set(nu, x ^ 1, mu);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, start: usize, w: &[usize]) -> Result<(), CosetError> {
        let mut f = start;
        let mut b = start;
        let mut i = 0;
        let mut j = w.len();
        loop {
            while i < j && self.get(f, w[i]) != UNDEFINED {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i && self.get(b, w[j - 1] ^ 1) != UNDEFINED {
                b = self.get(b, w[j - 1] ^ 1);
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                // deduction
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    /// Drops dead cosets, preserving the relative order of live ones.
    /// Returns the new index of `pos` (or of the first live coset after it).
    fn compact(&mut self, pos: usize) -> usize {
        let n = self.allocated();
        let mut new_index = vec![UNDEFINED; n];
        let mut next = 0;
        let mut new_pos = None;
        for (c, slot) in new_index.iter_mut().enumerate() {
            if self.is_live(c) {
                if c >= pos && new_pos.is_none() {
                    new_pos = Some(next);
                }
                *slot = next;
                next += 1;
            }
        }
        let mut table = Vec::with_capacity(next * self.cols);
        for c in 0..n {
            if !self.is_live(c) {
                continue;
            }
            for x in 0..self.cols {
                let d = self.get(c, x);
                table.push(if d == UNDEFINED { UNDEFINED } else { new_index[self.rep(d)] });
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        new_pos.unwrap_or(next)
    }
}

/// Enumerates the cosets of `⟨subgroup_generators⟩` in the presented group,
/// HLT style, giving up once more than `max_cosets` cosets would be live.
///
/// The result is standardized.
pub fn todd_coxeter(
    presentation: impl Into<Arc<Presentation>>,
    subgroup_generators: &[Word],
    max_cosets: usize,
) -> Result<CosetTable, CosetError> {
    enumerate(presentation.into(), subgroup_generators, max_cosets, 4096)
}

fn enumerate(
    presentation: Arc<Presentation>,
    subgroup_generators: &[Word],
    max_cosets: usize,
    compact_after: usize,
) -> Result<CosetTable, CosetError> {
    let rank = presentation.generator_count();
    for h in subgroup_generators {
        if h.rank() != rank {
            return Err(CosetError::AlphabetMismatch { word: h.rank(), table: rank });
        }
    }
    let cols = 2 * rank;
    let columns = |w: &Word| -> Vec<usize> { w.letters().iter().map(|l| l.column()).collect() };
    let relators: Vec<Vec<usize>> = presentation.relators().iter().map(columns).collect();

    let mut e = Enumerator::new(cols, max_cosets.max(1));
    for h in subgroup_generators {
        e.scan_and_fill(0, &columns(h))?;
    }
    let mut c = 0;
    while c < e.allocated() {
        if e.is_live(c) {
            for r in &relators {
                e.scan_and_fill(c, r)?;
                if !e.is_live(c) {
                    break;
                }
            }
            if e.is_live(c) {
                for x in 0..cols {
                    if e.get(c, x) == UNDEFINED {
                        e.define(c, x)?;
                    }
                }
            }
        }
        c += 1;
        let dead = e.allocated() - e.live;
        if dead > compact_after && dead > e.live {
            c = e.compact(c);
        }
    }
    e.compact(0);
    let table = CosetTable { presentation, coset_count: e.live, action: e.table };
    debug_assert!(table.check_invariants().is_ok());
    Ok(standardize_table(&table))
}

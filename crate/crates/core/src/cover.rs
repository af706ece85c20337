//! Covers of 2-complexes from coset tables, and back.
//!
//! The cover attached to a table `T` over `π1(X)` has one vertex `(v, c)` per
//! base vertex `v` and coset `c`; an edge `e: u → v` with label `w` lifts to
//! `(u, c) → (v, c·w)`. The lift of the base basepoint at coset 0 is the
//! basepoint of the cover. Cells of the cover are ordered by
//! `(base cell, coset)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{
    euler_characteristic, fundamental_group_presentation, ComplexData, FundamentalGroup, SignedEdge, TwoComplex,
};
use crate::coset::{schreier_generators, todd_coxeter, trace_word, CosetError, CosetTable, DEFAULT_MAX_COSETS};
use crate::lowindex::low_index_subgroups;
use crate::presentation::Presentation;
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("table has {table} generators but the base fundamental group has {base}")]
    AlphabetMismatch { table: usize, base: usize },
    #[error("base complex is not connected")]
    Disconnected,
    #[error("face {face} does not lift: its boundary word moves coset {coset}")]
    FaceDoesNotLift { face: usize, coset: usize },
    #[error("vertex {vertex} out of range for base with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error(transparent)]
    Coset(#[from] CosetError),
}

/// A connected cover `total → base` with its cell projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringMap {
    base: TwoComplex,
    total: TwoComplex,
    subgroup_table: CosetTable,
    vertex_map: Vec<usize>,
    edge_map: Vec<usize>,
    face_map: Vec<usize>,
    vertex_lift_index: Vec<(usize, usize)>,
}

impl CoveringMap {
    pub fn base(&self) -> &TwoComplex {
        &self.base
    }

    pub fn total(&self) -> &TwoComplex {
        &self.total
    }

    pub fn subgroup_table(&self) -> &CosetTable {
        &self.subgroup_table
    }

    pub fn sheets(&self) -> usize {
        self.subgroup_table.coset_count()
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[usize] {
        &self.edge_map
    }

    pub fn face_map(&self) -> &[usize] {
        &self.face_map
    }

    /// `(base vertex, coset)` for each total vertex.
    pub fn vertex_lift_index(&self) -> &[(usize, usize)] {
        &self.vertex_lift_index
    }

    fn project(&self, s: SignedEdge) -> SignedEdge {
        SignedEdge { edge: self.edge_map[s.edge], reversed: s.reversed }
    }

    /// Incidence, sheet constancy, basepoint, and connectivity.
    pub fn check_invariants(&self) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        let n = self.sheets();
        for (e, &(s, t)) in self.total.edges().iter().enumerate() {
            let (bs, bt) = self.base.edges()[self.edge_map[e]];
            if self.vertex_map[s] != bs || self.vertex_map[t] != bt {
                problems.push(format!("edge {e} does not project onto its base edge's endpoints"));
            }
        }
        for (f, boundary) in self.total.faces().iter().enumerate() {
            let projected: Vec<SignedEdge> = boundary.iter().map(|&s| self.project(s)).collect();
            if projected != self.base.faces()[self.face_map[f]] {
                problems.push(format!("face {f} does not project onto its base face's boundary"));
            }
        }
        for (what, map, base_count) in [
            ("vertex", &self.vertex_map, self.base.vertex_count()),
            ("edge", &self.edge_map, self.base.edge_count()),
            ("face", &self.face_map, self.base.face_count()),
        ] {
            let mut sizes = vec![0usize; base_count];
            for &b in map.iter() {
                sizes[b] += 1;
            }
            for (b, &k) in sizes.iter().enumerate() {
                if k != n {
                    problems.push(format!("{what} {b} has {k} preimages, expected {n}"));
                }
            }
        }
        if self.total.cell3_count() != n * self.base.cell3_count() {
            problems.push("3-cell count is not sheets × base 3-cells".into());
        }
        let bp = self.total.basepoint();
        if self.vertex_lift_index[bp] != (self.base.basepoint(), 0) {
            problems.push("total basepoint does not lie over the base basepoint at coset 0".into());
        }
        if !self.total.is_connected() {
            problems.push("total complex is not connected".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }

    /// Same total complex (ignoring its name), projections, and lift labels.
    pub fn same_cover(&self, other: &CoveringMap) -> bool {
        let strip = |x: &TwoComplex| ComplexData { name: None, ..x.data().clone() };
        self.base == other.base
            && strip(&self.total) == strip(&other.total)
            && self.vertex_map == other.vertex_map
            && self.edge_map == other.edge_map
            && self.face_map == other.face_map
            && self.vertex_lift_index == other.vertex_lift_index
    }
}

fn connected_pi1(x: &TwoComplex) -> Result<FundamentalGroup, CoverError> {
    if !x.is_connected() {
        return Err(CoverError::Disconnected);
    }
    Ok(fundamental_group_presentation(x))
}

/// The cover of `x` attached to the coset table `t`.
pub fn build_cover(x: &TwoComplex, t: &CosetTable) -> Result<CoveringMap, CoverError> {
    let pi = connected_pi1(x)?;
    build_with(x, &pi, t)
}

fn build_with(x: &TwoComplex, pi: &FundamentalGroup, t: &CosetTable) -> Result<CoveringMap, CoverError> {
    let rank = pi.presentation.generator_count();
    if t.rank() != rank {
        return Err(CoverError::AlphabetMismatch { table: t.rank(), base: rank });
    }
    let n = t.coset_count();
    let step = |s: SignedEdge, c: usize| -> usize { trace_word(t, &pi.label(s), c).expect("rank and coset checked") };

    let mut vertex_map = Vec::with_capacity(x.vertex_count() * n);
    let mut vertex_lift_index = Vec::with_capacity(x.vertex_count() * n);
    for v in 0..x.vertex_count() {
        for c in 0..n {
            vertex_map.push(v);
            vertex_lift_index.push((v, c));
        }
    }
    let mut edges = Vec::with_capacity(x.edge_count() * n);
    let mut edge_map = Vec::with_capacity(x.edge_count() * n);
    for (e, &(u, v)) in x.edges().iter().enumerate() {
        for c in 0..n {
            edges.push((u * n + c, v * n + step(SignedEdge::fwd(e), c)));
            edge_map.push(e);
        }
    }
    let mut faces = Vec::with_capacity(x.face_count() * n);
    let mut face_map = Vec::with_capacity(x.face_count() * n);
    for (f, boundary) in x.faces().iter().enumerate() {
        for c in 0..n {
            let mut k = c;
            let mut lifted = Vec::with_capacity(boundary.len());
            for &s in boundary {
                if s.reversed {
                    k = step(s, k);
                    lifted.push(SignedEdge::rev(s.edge * n + k));
                } else {
                    lifted.push(SignedEdge::fwd(s.edge * n + k));
                    k = step(s, k);
                }
            }
            if k != c {
                return Err(CoverError::FaceDoesNotLift { face: f, coset: c });
            }
            faces.push(lifted);
            face_map.push(f);
        }
    }
    let total = TwoComplex::new(ComplexData {
        name: x.name().map(|name| format!("{name}-cover{n}")),
        vertex_count: x.vertex_count() * n,
        edges,
        faces,
        cell3_count: x.cell3_count() * n,
        basepoint: x.basepoint() * n,
    })
    .expect("lifted cells are closed paths");
    Ok(CoveringMap {
        base: x.clone(),
        total,
        subgroup_table: t.clone(),
        vertex_map,
        edge_map,
        face_map,
        vertex_lift_index,
    })
}

/// Total vertices over base vertex `v`, ordered by coset.
pub fn fiber_over(cover: &CoveringMap, v: usize) -> Result<Vec<usize>, CoverError> {
    let count = cover.base.vertex_count();
    if v >= count {
        return Err(CoverError::VertexOutOfRange { vertex: v, count });
    }
    let mut fiber: Vec<(usize, usize)> =
        cover.vertex_lift_index.iter().enumerate().filter(|(_, &(b, _))| b == v).map(|(t, &(_, c))| (c, t)).collect();
    fiber.sort_unstable();
    Ok(fiber.into_iter().map(|(_, t)| t).collect())
}

/// The action of π1(base) on the basepoint fiber, found by lifting each
/// generator's loop through the total complex's own edges.
pub fn monodromy_action(cover: &CoveringMap) -> Result<CosetTable, CoverError> {
    let base = &cover.base;
    let pi = connected_pi1(base)?;
    let total = &cover.total;
    let mut by_tail = HashMap::new();
    let mut by_head = HashMap::new();
    for (e, &(s, t)) in total.edges().iter().enumerate() {
        by_tail.insert((cover.edge_map[e], s), e);
        by_head.insert((cover.edge_map[e], t), e);
    }
    let lift = |start: usize, path: &[SignedEdge]| -> usize {
        path.iter().fold(start, |at, s| {
            if s.reversed {
                total.edges()[by_head[&(s.edge, at)]].0
            } else {
                total.edges()[by_tail[&(s.edge, at)]].1
            }
        })
    };
    let fiber = fiber_over(cover, base.basepoint())?;
    let rank = pi.presentation.generator_count();
    let mut rows = vec![vec![0usize; 2 * rank]; fiber.len()];
    for (g, &e) in pi.generator_edges.iter().enumerate() {
        let (u, v) = base.edges()[e];
        let mut path = pi.tree.path_to(u);
        path.push(SignedEdge::fwd(e));
        path.extend(pi.tree.path_to(v).iter().rev().map(|s| s.inv()));
        for (c, &t) in fiber.iter().enumerate() {
            let end = lift(t, &path);
            let d = cover.vertex_lift_index[end].1;
            rows[c][2 * g] = d;
            rows[d][2 * g + 1] = c;
        }
    }
    Ok(CosetTable::from_rows(cover.subgroup_table.shared_presentation().clone(), &rows)?)
}

/// The image of π1(total) in π1(base), enumerated and standardized.
pub fn subgroup_of_cover(cover: &CoveringMap, max_cosets: usize) -> Result<CosetTable, CoverError> {
    let base_pi = connected_pi1(&cover.base)?;
    let total_pi = fundamental_group_presentation(&cover.total);
    let rank = base_pi.presentation.generator_count();
    if cover.subgroup_table.rank() != rank {
        return Err(CoverError::AlphabetMismatch { table: cover.subgroup_table.rank(), base: rank });
    }
    // projected tree-path word to every total vertex
    let mut prefix = vec![Word::empty(rank); cover.total.vertex_count()];
    for &v in total_pi.tree.vertices() {
        if let Some((u, s)) = total_pi.tree.parent[v] {
            prefix[v] = prefix[u].concat(&base_pi.label(cover.project(s))).expect("same rank");
        }
    }
    let generators: Vec<Word> = total_pi
        .generator_edges
        .iter()
        .map(|&e| {
            let (s, t) = cover.total.edges()[e];
            prefix[s]
                .concat(&base_pi.label(cover.project(SignedEdge::fwd(e))))
                .and_then(|w| w.concat(&prefix[t].inverse()))
                .expect("same rank")
        })
        .collect();
    let presentation: Arc<Presentation> = cover.subgroup_table.shared_presentation().clone();
    Ok(todd_coxeter(presentation, &generators, max_cosets)?)
}

/// The cover attached to the trivial subgroup.
pub fn universal_cover(x: &TwoComplex, max_cosets: usize) -> Result<CoveringMap, CoverError> {
    let pi = connected_pi1(x)?;
    let t = todd_coxeter(pi.presentation.clone(), &[], max_cosets)?;
    build_with(x, &pi, &t)
}

/// Number of cosets `c` fixed by every generator of the subgroup, i.e.
/// `|N(H)/H|`.
pub fn deck_group_order(cover: &CoveringMap) -> usize {
    let t = &cover.subgroup_table;
    let gens = schreier_generators(t);
    (0..t.coset_count()).filter(|&c| gens.iter().all(|h| trace_word(t, h, c).expect("valid") == c)).count()
}

#[derive(Debug, Clone, Copy)]
pub struct GaloisOptions {
    pub max_cosets: usize,
    /// Worker threads; 1 runs on the calling thread.
    pub workers: usize,
}

impl Default for GaloisOptions {
    fn default() -> Self {
        GaloisOptions { max_cosets: DEFAULT_MAX_COSETS, workers: 1 }
    }
}

/// Outcome of both round trips for one subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    pub table: CosetTable,
    /// subgroup → cover → subgroup is the identity
    pub subgroup_round_trip: bool,
    /// cover → monodromy → cover is the identity
    pub cover_round_trip: bool,
    pub sheets_constant: bool,
    pub euler_multiplicative: bool,
    pub error: Option<String>,
}

impl RoundTrip {
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.subgroup_round_trip
            && self.cover_round_trip
            && self.sheets_constant
            && self.euler_multiplicative
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisReport {
    pub entries: Vec<RoundTrip>,
}

impl GaloisReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(RoundTrip::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &RoundTrip)> {
        self.entries.iter().enumerate().filter(|(_, e)| !e.passed())
    }
}

impl fmt::Display for GaloisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut failed = 0;
        for (i, e) in self.failures() {
            failed += 1;
            write!(f, "subgroup {i} (index {}) failed:", e.table.coset_count())?;
            if let Some(err) = &e.error {
                write!(f, " error: {err}")?;
            }
            for (ok, what) in [
                (e.subgroup_round_trip, "subgroup round trip"),
                (e.cover_round_trip, "cover round trip"),
                (e.sheets_constant, "sheet constancy"),
                (e.euler_multiplicative, "euler multiplicativity"),
            ] {
                if !ok {
                    write!(f, " {what}")?;
                }
            }
            writeln!(f)?;
        }
        if failed == 0 {
            write!(f, "all {} round trips passed", self.entries.len())
        } else {
            write!(f, "{failed} of {} round trips failed", self.entries.len())
        }
    }
}

fn round_trip(x: &TwoComplex, pi: &FundamentalGroup, t: &CosetTable, max_cosets: usize) -> RoundTrip {
    let mut entry = RoundTrip {
        table: t.clone(),
        subgroup_round_trip: false,
        cover_round_trip: false,
        sheets_constant: false,
        euler_multiplicative: false,
        error: None,
    };
    let run = |entry: &mut RoundTrip| -> Result<(), CoverError> {
        let cover = build_with(x, pi, t)?;
        entry.sheets_constant = cover.check_invariants().is_ok()
            && (0..x.vertex_count()).all(|v| fiber_over(&cover, v).map(|f| f.len()) == Ok(t.coset_count()));
        entry.euler_multiplicative =
            euler_characteristic(cover.total()) == t.coset_count() as i64 * euler_characteristic(x);
        entry.subgroup_round_trip = subgroup_of_cover(&cover, max_cosets)? == *t;
        let action = monodromy_action(&cover)?;
        let rebuilt = build_with(x, pi, &action)?;
        entry.cover_round_trip = action == *t && rebuilt.same_cover(&cover);
        Ok(())
    };
    if let Err(e) = run(&mut entry) {
        entry.error = Some(e.to_string());
    }
    entry
}

/// Runs both directions of the correspondence on every subgroup of index at
/// most `max_index`. Entries follow the low-index output order whatever the
/// worker count.
pub fn galois_roundtrip_check(
    x: &TwoComplex,
    max_index: usize,
    options: GaloisOptions,
) -> Result<GaloisReport, CoverError> {
    let pi = connected_pi1(x)?;
    let presentation = Arc::new(pi.presentation.clone());
    let tables = low_index_subgroups(presentation, max_index);
    let entries = if options.workers <= 1 {
        tables.iter().map(|t| round_trip(x, &pi, t, options.max_cosets)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(options.workers).build().expect("thread pool");
        pool.install(|| tables.par_iter().map(|t| round_trip(x, &pi, t, options.max_cosets)).collect())
    };
    Ok(GaloisReport { entries })
}

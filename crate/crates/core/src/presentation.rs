//! Finitely presented groups and their abelianizations.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::words::{Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("relator {relator}: {source}")]
    Relator { relator: usize, source: WordError },
}

/// A finite presentation `⟨ names | relators ⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

/// Generator names `a, b, …, z`, continuing as `g26, g27, …`.
pub fn default_generator_names(count: usize) -> Vec<String> {
    (0..count).map(|i| if i < 26 { char::from(b'a' + i as u8).to_string() } else { format!("g{i}") }).collect()
}

/// Builds a presentation, storing relators freely reduced and dropping empty
/// ones. Relator order is preserved.
pub fn make_presentation<S: AsRef<str>>(
    names: &[S],
    relators: impl IntoIterator<Item = Word>,
) -> Result<Presentation, PresentationError> {
    let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
    let mut seen = HashSet::new();
    for n in &names {
        if !seen.insert(n.as_str()) {
            return Err(PresentationError::DuplicateGenerator(n.clone()));
        }
    }
    let rank = names.len();
    let mut kept = Vec::new();
    for (i, r) in relators.into_iter().enumerate() {
        let r = r
            .widen(rank)
            .and_then(|r| Word::reduce(rank, r.letters().iter().copied()))
            .map_err(|source| PresentationError::Relator { relator: i, source })?;
        if !r.is_empty() {
            kept.push(r);
        }
    }
    Ok(Presentation { names, relators: kept })
}

impl Presentation {
    /// `⟨ a | aⁿ ⟩`.
    pub fn cyclic(n: usize) -> Presentation {
        let a = Word::generator(1, 0).expect("rank 1");
        make_presentation(&["a"], [a.pow(n)]).expect("valid")
    }

    /// The free group on `rank` generators.
    pub fn free(rank: usize) -> Presentation {
        make_presentation(&default_generator_names(rank), []).expect("valid")
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        abelianization_invariants(self)
    }
}

/// `Z^free_rank ⊕ Z/d₁ ⊕ … ⊕ Z/d_k` with `2 ≤ d₁ | d₂ | … | d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianInvariants {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    /// Invariant factors as machine integers, for tests and printing.
    pub fn factors_u64(&self) -> Vec<u64> {
        self.invariant_factors.iter().map(|d| d.to_u64().expect("factor fits u64")).collect()
    }
}

/// Relator exponent matrix: one row per relator, one column per generator.
pub fn exponent_matrix(p: &Presentation) -> Vec<Vec<BigInt>> {
    p.relators.iter().map(|r| r.exponent_sums().into_iter().map(BigInt::from).collect()).collect()
}

pub fn abelianization_invariants(p: &Presentation) -> AbelianInvariants {
    let m = exponent_matrix(p);
    let snf = smith_normal_form(&m, p.generator_count());
    let rank = snf.diagonal.len();
    let invariant_factors = snf.diagonal.into_iter().filter(|d| !d.is_one()).collect();
    AbelianInvariants { invariant_factors, free_rank: p.generator_count() - rank }
}

/// `diagonal = U · M · V` with `U`, `V` unimodular. `diagonal` holds the
/// nonzero diagonal entries, positive and forming a divisibility chain.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub d: Vec<Vec<BigInt>>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

// Row op on `u` accompanies every row op on `d`; column op on `v` likewise.
struct Reducer {
    d: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    rows: usize,
    cols: usize,
}

impl Reducer {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap(a, b);
        self.u.swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.d {
            row.swap(a, b);
        }
        for row in &mut self.v {
            row.swap(a, b);
        }
    }

    /// row[target] -= q * row[source]
    fn sub_row(&mut self, target: usize, source: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = &self.d[source][j] * q;
            self.d[target][j] -= t;
        }
        for j in 0..self.rows {
            let t = &self.u[source][j] * q;
            self.u[target][j] -= t;
        }
    }

    /// col[target] -= q * col[source]
    fn sub_col(&mut self, target: usize, source: usize, q: &BigInt) {
        for i in 0..self.rows {
            let t = &self.d[i][source] * q;
            self.d[i][target] -= t;
        }
        for i in 0..self.cols {
            let t = &self.v[i][source] * q;
            self.v[i][target] -= t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for x in &mut self.d[r] {
            *x = -&*x;
        }
        for x in &mut self.u[r] {
            *x = -&*x;
        }
    }

    /// Smallest nonzero |entry| in the trailing submatrix, ties row-major.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.d[i][j];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.d[bi][bj].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn reduce_at(&mut self, t: usize) -> bool {
        loop {
            let Some((pi, pj)) = self.pivot(t) else {
                return false;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..self.rows {
                if !self.d[i][t].is_zero() {
                    let q = self.d[i][t].div_floor(&self.d[t][t]);
                    self.sub_row(i, t, &q);
                    clean &= self.d[i][t].is_zero();
                }
            }
            for j in t + 1..self.cols {
                if !self.d[t][j].is_zero() {
                    let q = self.d[t][j].div_floor(&self.d[t][t]);
                    self.sub_col(j, t, &q);
                    clean &= self.d[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block
            let bad =
                (t + 1..self.rows).find(|&i| (t + 1..self.cols).any(|j| !self.d[i][j].is_multiple_of(&self.d[t][t])));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    self.sub_row(t, i, &minus_one);
                }
                None => {
                    if self.d[t][t].is_negative() {
                        self.negate_row(t);
                    }
                    return true;
                }
            }
        }
    }
}

/// Smith normal form of the `rows × cols` integer matrix `m`.
pub fn smith_normal_form(m: &[Vec<BigInt>], cols: usize) -> SmithForm {
    let rows = m.len();
    let mut r = Reducer { d: m.to_vec(), u: identity(rows), v: identity(cols), rows, cols };
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        if !r.reduce_at(t) {
            break;
        }
        diagonal.push(r.d[t][t].clone());
    }
    SmithForm { diagonal, d: r.d, u: r.u, v: r.v }
}

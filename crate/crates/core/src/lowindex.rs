//! Low-index subgroup enumeration.
//!
//! Backtracking over partial coset tables. The first undefined entry in
//! row-major order is always the one filled next, and a new coset always gets
//! the next free number, so every complete table reached is already in BFS
//! standard form and each pointed subgroup appears exactly once.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use crate::coset::CosetTable;
use crate::presentation::Presentation;

const UNDEFINED: usize = usize::MAX;

/// Every pointed subgroup of index at most `max_index`, as standardized
/// tables sorted by `(coset_count, table)`.
pub fn low_index_subgroups(presentation: impl Into<Arc<Presentation>>, max_index: usize) -> Vec<CosetTable> {
    let presentation = presentation.into();
    let max_index = max_index.max(1);
    let cols = 2 * presentation.generator_count();
    let search = Search::new(&presentation, max_index);
    let mut found = Vec::new();
    if cols == 0 {
        found.push(CosetTable::trivial(presentation));
        return found;
    }
    let root = Partial { table: vec![UNDEFINED; max_index * cols], count: 1, cols };
    search.extend(root, &mut |rows: Vec<Vec<usize>>| {
        let table = CosetTable::from_rows(presentation.clone(), &rows).expect("deduction closure yields a valid table");
        debug_assert!(table.is_standard());
        found.push(table);
    });
    found.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    found
}

/// Groups tables (all over the same presentation) into conjugacy classes of
/// subgroups. Classes are listed in order of their first member; each class
/// lists indices into `tables` in ascending order.
pub fn conjugacy_classes(tables: &[CosetTable]) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut first_by_key: Vec<(Vec<usize>, usize, usize)> = Vec::new();
    for (i, t) in tables.iter().enumerate() {
        let key = (0..t.coset_count()).map(|c| t.rebased(c).rows().concat()).min().expect("at least one coset");
        match first_by_key.iter().find(|(k, n, _)| *n == t.coset_count() && *k == key) {
            Some(&(_, _, first)) => classes.get_mut(&first).expect("class exists").push(i),
            None => {
                first_by_key.push((key, t.coset_count(), i));
                classes.insert(i, vec![i]);
            }
        }
    }
    classes.into_values().collect()
}

#[derive(Clone)]
struct Partial {
    table: Vec<usize>,
    count: usize,
    cols: usize,
}

impl Partial {
    fn get(&self, c: usize, x: usize) -> usize {
        self.table[c * self.cols + x]
    }

    fn set(&mut self, c: usize, x: usize, d: usize) {
        self.table[c * self.cols + x] = d;
    }

    fn first_undefined(&self) -> Option<(usize, usize)> {
        (0..self.count * self.cols).find(|&i| self.table[i] == UNDEFINED).map(|i| (i / self.cols, i % self.cols))
    }
}

struct Search {
    max_index: usize,
    // by leading column: cyclic rotations of every relator and its inverse
    rotations: Vec<Vec<Vec<usize>>>,
}

impl Search {
    fn new(presentation: &Presentation, max_index: usize) -> Self {
        let cols = 2 * presentation.generator_count();
        let mut seen = HashSet::new();
        let mut rotations = vec![Vec::new(); cols];
        for r in presentation.relators() {
            let fwd: Vec<usize> = r.letters().iter().map(|l| l.column()).collect();
            let bwd: Vec<usize> = fwd.iter().rev().map(|x| x ^ 1).collect();
            for w in [fwd, bwd] {
                for k in 0..w.len() {
                    let rot: Vec<usize> = w[k..].iter().chain(&w[..k]).copied().collect();
                    if seen.insert(rot.clone()) {
                        rotations[rot[0]].push(rot);
                    }
                }
            }
        }
        Search { max_index, rotations }
    }

    fn extend(&self, state: Partial, emit: &mut dyn FnMut(Vec<Vec<usize>>)) {
        let Some((c, x)) = state.first_undefined() else {
            let rows = (0..state.count).map(|k| state.table[k * state.cols..(k + 1) * state.cols].to_vec()).collect();
            emit(rows);
            return;
        };
        for d in 0..state.count {
            if state.get(d, x ^ 1) == UNDEFINED {
                let mut next = state.clone();
                if self.assign(&mut next, c, x, d) {
                    self.extend(next, emit);
                }
            }
        }
        if state.count < self.max_index {
            let mut next = state;
            let d = next.count;
            next.count += 1;
            if self.assign(&mut next, c, x, d) {
                self.extend(next, emit);
            }
        }
    }

    /// Sets `(c, x) = d` and closes under relator deductions. Returns false
    /// on a contradiction.
    fn assign(&self, state: &mut Partial, c: usize, x: usize, d: usize) -> bool {
        state.set(c, x, d);
        state.set(d, x ^ 1, c);
        let mut pending = vec![(c, x), (d, x ^ 1)];
        while let Some((e, y)) = pending.pop() {
            for w in &self.rotations[y] {
                if !self.scan(state, e, w, &mut pending) {
                    return false;
                }
            }
        }
        true
    }

    fn scan(&self, state: &mut Partial, start: usize, w: &[usize], pending: &mut Vec<(usize, usize)>) -> bool {
        let mut f = start;
        let mut i = 0;
        let mut j = w.len();
        while i < j && state.get(f, w[i]) != UNDEFINED {
            f = state.get(f, w[i]);
            i += 1;
        }
        if i == j {
            return f == start;
        }
        let mut b = start;
        while j > i && state.get(b, w[j - 1] ^ 1) != UNDEFINED {
            b = state.get(b, w[j - 1] ^ 1);
            j -= 1;
        }
        if j == i {
            return f == b;
        }
        if j == i + 1 {
            state.set(f, w[i], b);
            state.set(b, w[i] ^ 1, f);
            pending.push((f, w[i]));
            pending.push((b, w[i] ^ 1));
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{schreier_generators, todd_coxeter, DEFAULT_MAX_COSETS};
    use crate::words::Word;

    fn counts_by_index(tables: &[CosetTable], max: usize) -> Vec<usize> {
        (1..=max).map(|n| tables.iter().filter(|t| t.coset_count() == n).count()).collect()
    }

    // Brute force: transitive actions of `rank` permutations on `n` points,
    // divided by the (n-1)! relabelings fixing point 0.
    fn pointed_subgroups_of_free_group(rank: usize, n: usize) -> usize {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let all = perms(n);
        let mut transitive = 0usize;
        let mut idx = vec![0usize; rank];
        loop {
            let gens: Vec<&Vec<usize>> = idx.iter().map(|&i| &all[i]).collect();
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut stack = vec![0];
            while let Some(p) = stack.pop() {
                for g in &gens {
                    let q = g[p];
                    if !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                    // inverse images
                    let r = g.iter().position(|&v| v == p).unwrap();
                    if !seen[r] {
                        seen[r] = true;
                        stack.push(r);
                    }
                }
            }
            if seen.iter().all(|&s| s) {
                transitive += 1;
            }
            let mut k = 0;
            loop {
                if k == rank {
                    let fact: usize = (1..n).product();
                    assert_eq!(transitive % fact, 0);
                    return transitive / fact;
                }
                idx[k] += 1;
                if idx[k] < all.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn integers_have_one_subgroup_per_index() {
        let tables = low_index_subgroups(Presentation::free(1), 3);
        assert_eq!(counts_by_index(&tables, 3), vec![1, 1, 1]);
        assert_eq!(tables[0].coset_count(), 1);
    }

    #[test]
    fn free_group_counts_match_brute_force() {
        for rank in 1..=2 {
            let tables = low_index_subgroups(Presentation::free(rank), 4);
            let expected: Vec<usize> = (1..=4).map(|n| pointed_subgroups_of_free_group(rank, n)).collect();
            assert_eq!(counts_by_index(&tables, 4), expected, "rank {rank}");
        }
        let tables = low_index_subgroups(Presentation::free(2), 2);
        assert_eq!(counts_by_index(&tables, 2), vec![1, 3]);
    }

    #[test]
    fn cyclic_group_subgroups_are_divisors() {
        let tables = low_index_subgroups(Presentation::cyclic(12), 12);
        let indices: Vec<usize> = tables.iter().map(|t| t.coset_count()).collect();
        assert_eq!(indices, vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn output_is_sorted_unique_and_valid() {
        let p = Arc::new(Presentation::free(2));
        let tables = low_index_subgroups(p.clone(), 4);
        for w in tables.windows(2) {
            assert!(w[0].sort_key() < w[1].sort_key());
        }
        for t in &tables {
            t.check_invariants().unwrap();
            assert!(t.is_standard());
            let again = todd_coxeter(p.clone(), &schreier_generators(t), DEFAULT_MAX_COSETS).unwrap();
            assert_eq!(&again, t);
        }
    }

    #[test]
    fn conjugacy_classes_of_free_group_index_three() {
        let tables = low_index_subgroups(Presentation::free(2), 3);
        let classes = conjugacy_classes(&tables);
        // 13 pointed index-3 subgroups form 7 conjugacy classes
        let index3: Vec<&Vec<usize>> = classes.iter().filter(|c| tables[c[0]].coset_count() == 3).collect();
        assert_eq!(index3.iter().map(|c| c.len()).sum::<usize>(), 13);
        assert_eq!(index3.len(), 7);
        // normal subgroups sit alone
        let index2 = classes.iter().filter(|c| tables[c[0]].coset_count() == 2).count();
        assert_eq!(index2, 3);
    }

    #[test]
    fn group_with_relations() {
        // S_3 = <a, b | a^3, b^2, (ab)^2>: subgroups 1 (6), A_3 (2), three of order 2 (3), S_3 (1)
        let a3 = Word::generator(2, 0).unwrap().pow(3);
        let b2 = Word::generator(2, 1).unwrap().pow(2);
        let ab = Word::generator(2, 0).unwrap().concat(&Word::generator(2, 1).unwrap()).unwrap();
        let p = crate::presentation::make_presentation(&["a", "b"], [a3, b2, ab.pow(2)]).unwrap();
        let tables = low_index_subgroups(p, 6);
        assert_eq!(counts_by_index(&tables, 6), vec![1, 1, 3, 0, 0, 1]);
    }
}

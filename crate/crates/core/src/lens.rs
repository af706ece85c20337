//! Lens spaces `L(n; l₁, …, l_k)` handled symbolically.
//!
//! Connected covers of a lens space with `k > 1` are the `L(m; l₁, …, l_k)`
//! for the divisors `m` of `n`, with `n / m` sheets. The group-theoretic
//! core, that the fiber product `{(a, b) ∈ Z × Z_m : a·l ≡ b·p (mod n)}` is
//! infinite cyclic on `(p, l)`, is checked by brute force over a window.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LensError {
    #[error("lens space order must be at least 1, got {0}")]
    BadOrder(i64),
    #[error("lens space needs at least one parameter")]
    NoParameters,
    #[error("parameter {param} is not prime to {n}")]
    NotCoprime { param: i64, n: i64 },
    #[error("cover classification needs at least two parameters, got {0}")]
    Unsupported(usize),
    #[error("{m} does not divide {n}")]
    NotADivisor { m: i64, n: i64 },
    #[error("window must be positive")]
    EmptyWindow,
}

/// `L(n; l₁, …, l_k)` with each `lᵢ` stored as a residue in `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LensSpaceDesc {
    n: i64,
    params: Vec<i64>,
}

impl LensSpaceDesc {
    pub fn new(n: i64, params: &[i64]) -> Result<LensSpaceDesc, LensError> {
        if n < 1 {
            return Err(LensError::BadOrder(n));
        }
        if params.is_empty() {
            return Err(LensError::NoParameters);
        }
        let mut reduced = Vec::with_capacity(params.len());
        for &l in params {
            if l.gcd(&n) != 1 {
                return Err(LensError::NotCoprime { param: l, n });
            }
            reduced.push(l.rem_euclid(n));
        }
        Ok(LensSpaceDesc { n, params: reduced })
    }

    pub fn order(&self) -> i64 {
        self.n
    }

    pub fn params(&self) -> &[i64] {
        &self.params
    }

    /// The cover with fundamental group `Z_m`, for `m` dividing the order.
    pub fn cover(&self, m: i64) -> Result<LensSpaceDesc, LensError> {
        if m < 1 || self.n % m != 0 {
            return Err(LensError::NotADivisor { m, n: self.n });
        }
        LensSpaceDesc::new(m, &self.params)
    }
}

impl fmt::Display for LensSpaceDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params.iter().map(|l| l.to_string()).collect();
        write!(f, "L({}; {})", self.n, ps.join(", "))
    }
}

/// Order of the cyclic fundamental group.
pub fn lens_pi1(l: &LensSpaceDesc) -> i64 {
    l.n
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LensCoverRecord {
    pub m: i64,
    /// `n / m`; the projection sends the circle loop to its `p`-th power on
    /// each join factor.
    pub p: i64,
    pub cover: LensSpaceDesc,
    pub sheets: i64,
}

fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// One record per divisor `m` of `n`, ascending.
pub fn classify_lens_covers(l: &LensSpaceDesc) -> Result<Vec<LensCoverRecord>, LensError> {
    if l.params.len() <= 1 {
        return Err(LensError::Unsupported(l.params.len()));
    }
    divisors(l.n)
        .into_iter()
        .map(|m| {
            let p = l.n / m;
            Ok(LensCoverRecord { m, p, cover: l.cover(m)?, sheets: p })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PullbackStatus {
    Pass,
    Fail,
    /// The window holds no nonzero solution, so nothing was tested.
    Inconclusive,
}

/// A solution `(a, b)` with the multiplier `x` such that it equals `x·(p, l)`,
/// when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solution {
    pub a: i64,
    pub b: i64,
    pub witness: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackReport {
    pub n: i64,
    pub m: i64,
    pub p: i64,
    pub generator: (i64, i64),
    pub window: i64,
    pub status: PullbackStatus,
    pub solutions: Vec<Solution>,
    pub problems: Vec<String>,
}

impl fmt::Display for PullbackReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            PullbackStatus::Pass => "pass",
            PullbackStatus::Fail => "fail",
            PullbackStatus::Inconclusive => "inconclusive",
        };
        write!(
            f,
            "{status}: n={} m={} p={} generator=({}, {}) window={} solutions={}",
            self.n,
            self.m,
            self.p,
            self.generator.0,
            self.generator.1,
            self.window,
            self.solutions.len()
        )?;
        for problem in &self.problems {
            write!(f, "\n  {problem}")?;
        }
        Ok(())
    }
}

/// Checks, within `|a| ≤ window`, that `(p, l mod m)` generates the fiber
/// product freely.
pub fn verify_lens_pullback_group(n: i64, m: i64, l: i64, window: i64) -> Result<PullbackReport, LensError> {
    check_pullback_args(n, m, l, window)?;
    let p = n / m;
    verify_with_generator(n, m, l, window, (p, l.rem_euclid(m)))
}

/// Same check against an arbitrary candidate generator; used for negative
/// controls.
pub fn verify_lens_pullback_group_with_generator(
    n: i64,
    m: i64,
    l: i64,
    window: i64,
    generator: (i64, i64),
) -> Result<PullbackReport, LensError> {
    check_pullback_args(n, m, l, window)?;
    verify_with_generator(n, m, l, window, generator)
}

fn check_pullback_args(n: i64, m: i64, l: i64, window: i64) -> Result<(), LensError> {
    if n < 1 {
        return Err(LensError::BadOrder(n));
    }
    if m < 1 || n % m != 0 {
        return Err(LensError::NotADivisor { m, n });
    }
    if l.gcd(&n) != 1 {
        return Err(LensError::NotCoprime { param: l, n });
    }
    if window < 1 {
        return Err(LensError::EmptyWindow);
    }
    Ok(())
}

fn verify_with_generator(
    n: i64,
    m: i64,
    l: i64,
    window: i64,
    generator: (i64, i64),
) -> Result<PullbackReport, LensError> {
    let p = n / m;
    let in_fiber = |a: i64, b: i64| (a * l - b * p).rem_euclid(n) == 0;
    let (gp, gl) = generator;
    let multiple = |x: i64| (x * gp, (x * gl).rem_euclid(m));

    let mut solutions = Vec::new();
    let mut set = BTreeSet::new();
    for a in -window..=window {
        for b in 0..m {
            if in_fiber(a, b) {
                set.insert((a, b));
                let witness = if gp != 0 && a % gp == 0 && multiple(a / gp).1 == b { Some(a / gp) } else { None };
                solutions.push(Solution { a, b, witness });
            }
        }
    }
    let mut report =
        PullbackReport { n, m, p, generator, window, status: PullbackStatus::Pass, solutions, problems: Vec::new() };
    if !report.solutions.iter().any(|s| (s.a, s.b) != (0, 0)) {
        report.status = PullbackStatus::Inconclusive;
        return Ok(report);
    }

    if !in_fiber(gp, gl.rem_euclid(m)) {
        report.problems.push(format!("generator ({gp}, {gl}) is not in the fiber product"));
    }
    // surjectivity
    for s in &report.solutions {
        if s.witness.is_none() {
            report.problems.push(format!("solution ({}, {}) is not a multiple of the generator", s.a, s.b));
        }
    }
    // injectivity over multipliers that stay inside the window
    if gp != 0 {
        let reach = window / gp.abs();
        let images: BTreeSet<(i64, i64)> = (-reach..=reach).map(multiple).collect();
        if images.len() as i64 != 2 * reach + 1 {
            report.problems.push("distinct multipliers give equal pairs".into());
        }
    } else {
        report.problems.push("generator has zero integer part".into());
    }
    // subgroup structure
    for &(a, b) in &set {
        if !set.contains(&(-a, (-b).rem_euclid(m))) {
            report.problems.push(format!("negation of ({a}, {b}) is missing"));
        }
        let (na, nb) = (a + gp, (b + gl).rem_euclid(m));
        if na.abs() <= window && !set.contains(&(na, nb)) {
            report.problems.push(format!("({a}, {b}) + generator = ({na}, {nb}) is missing"));
        }
    }
    if !report.problems.is_empty() {
        report.status = PullbackStatus::Fail;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi1_examples() {
        assert_eq!(lens_pi1(&LensSpaceDesc::new(12, &[1, 1]).unwrap()), 12);
        assert_eq!(lens_pi1(&LensSpaceDesc::new(1, &[1]).unwrap()), 1);
        assert_eq!(lens_pi1(&LensSpaceDesc::new(7, &[3, 5]).unwrap()), 7);
    }

    #[test]
    fn descriptor_validation() {
        assert_eq!(LensSpaceDesc::new(12, &[2, 1]).unwrap_err(), LensError::NotCoprime { param: 2, n: 12 });
        assert_eq!(LensSpaceDesc::new(0, &[1]).unwrap_err(), LensError::BadOrder(0));
        assert_eq!(LensSpaceDesc::new(5, &[]).unwrap_err(), LensError::NoParameters);
        assert_eq!(LensSpaceDesc::new(5, &[-1, 7]).unwrap().params(), &[4, 2]);
    }

    #[test]
    fn classification_of_order_twelve() {
        let l = LensSpaceDesc::new(12, &[1, 1]).unwrap();
        let records = classify_lens_covers(&l).unwrap();
        let ms: Vec<i64> = records.iter().map(|r| r.m).collect();
        let sheets: Vec<i64> = records.iter().map(|r| r.sheets).collect();
        assert_eq!(ms, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(sheets, vec![12, 6, 4, 3, 2, 1]);
        assert_eq!(records.last().unwrap().cover, l);
        assert_eq!(records[0].cover.params(), &[0, 0]);
    }

    #[test]
    fn classification_edge_cases() {
        let prime = classify_lens_covers(&LensSpaceDesc::new(7, &[1, 1]).unwrap()).unwrap();
        assert_eq!(prime.iter().map(|r| r.m).collect::<Vec<_>>(), vec![1, 7]);
        let one = classify_lens_covers(&LensSpaceDesc::new(1, &[1, 1]).unwrap()).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!((one[0].m, one[0].sheets), (1, 1));
        assert_eq!(classify_lens_covers(&LensSpaceDesc::new(5, &[1]).unwrap()).unwrap_err(), LensError::Unsupported(1));
    }

    #[test]
    fn classification_counts_and_coherence() {
        for n in 1..=40 {
            let params: Vec<i64> = vec![1, (1..=n).rev().find(|l| l.gcd(&n) == 1).unwrap()];
            let l = LensSpaceDesc::new(n, &params).unwrap();
            let records = classify_lens_covers(&l).unwrap();
            assert_eq!(records.len(), divisors(n).len());
            for r in &records {
                assert_eq!(r.sheets * r.m, n);
                let via = l.cover(r.m).unwrap();
                assert_eq!(via, r.cover);
                for &m2 in &divisors(n) {
                    if m2 % r.m == 0 {
                        assert_eq!(l.cover(m2).unwrap().cover(r.m).unwrap(), r.cover);
                    }
                }
            }
        }
    }

    #[test]
    fn pullback_examples() {
        let r = verify_lens_pullback_group(12, 4, 5, 120).unwrap();
        assert_eq!(r.status, PullbackStatus::Pass, "{r}");
        assert_eq!(r.p, 3);
        // hand check: (3, 1) since 5·3 = 15 ≡ 3 = 1·3 (mod 12)
        assert!(r.solutions.contains(&Solution { a: 3, b: 1, witness: Some(1) }));
        assert!(r.solutions.contains(&Solution { a: -6, b: 2, witness: Some(-2) }));
        assert_eq!(r.solutions.len(), 81);

        let r = verify_lens_pullback_group(7, 7, 3, 70).unwrap();
        assert_eq!(r.status, PullbackStatus::Pass);
        assert_eq!(r.p, 1);
        assert!(r.solutions.iter().all(|s| s.b == (s.a * 3).rem_euclid(7) && s.witness == Some(s.a)));

        let bad = verify_lens_pullback_group_with_generator(12, 4, 5, 120, (3, 6)).unwrap();
        assert_eq!(bad.status, PullbackStatus::Fail);
    }

    #[test]
    fn pullback_inconclusive_and_errors() {
        let r = verify_lens_pullback_group(12, 2, 5, 3).unwrap();
        assert_eq!(r.status, PullbackStatus::Inconclusive);
        assert_eq!(verify_lens_pullback_group(12, 5, 5, 10).unwrap_err(), LensError::NotADivisor { m: 5, n: 12 });
        assert_eq!(verify_lens_pullback_group(12, 4, 4, 10).unwrap_err(), LensError::NotCoprime { param: 4, n: 12 });
        assert_eq!(verify_lens_pullback_group(12, 4, 5, 0).unwrap_err(), LensError::EmptyWindow);
    }
}

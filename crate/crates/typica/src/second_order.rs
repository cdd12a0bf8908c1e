//! Explicit power-set computation: graded sets over the crisp subsets of a
//! universe.
//!
//! This is the brute-force route for possibility qualification. The
//! inference engine never touches it; tests and the `--oracle-check` flag
//! use it to validate the first-order shortcut formulas against full
//! enumeration. Subsets are encoded as bitmasks over the canonical element
//! order, so a universe of size `n` yields `2^n` entries.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, Universe};

/// Largest universe the oracle will enumerate (4096 subsets).
pub const DEFAULT_ORACLE_LIMIT: usize = 12;

/// A grade per crisp subset of the universe.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderSet {
    universe: Arc<Universe>,
    grades: Vec<f64>,
}

fn check_size(universe: &Universe) -> Result<()> {
    if universe.len() > DEFAULT_ORACLE_LIMIT {
        return Err(Error::OracleLimit {
            universe: universe.name().to_string(),
            size: universe.len(),
            limit: DEFAULT_ORACLE_LIMIT,
        });
    }
    Ok(())
}

impl SecondOrderSet {
    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    /// Grade of the subset encoded by `mask`.
    pub fn grade(&self, mask: usize) -> f64 {
        self.grades[mask]
    }

    pub fn grades(&self) -> &[f64] {
        &self.grades
    }

    fn require_same_universe(&self, other: &SecondOrderSet) -> Result<()> {
        if self.universe == other.universe {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                left: self.universe.name().to_string(),
                right: other.universe.name().to_string(),
            })
        }
    }

    /// Pointwise minimum over subset entries.
    pub fn so_intersect(&self, other: &SecondOrderSet) -> Result<SecondOrderSet> {
        self.require_same_universe(other)?;
        Ok(SecondOrderSet {
            universe: self.universe.clone(),
            grades: self
                .grades
                .iter()
                .zip(&other.grades)
                .map(|(a, b)| a.min(*b))
                .collect(),
        })
    }

    /// Pointwise maximum over subset entries.
    pub fn so_union(&self, other: &SecondOrderSet) -> Result<SecondOrderSet> {
        self.require_same_universe(other)?;
        Ok(SecondOrderSet {
            universe: self.universe.clone(),
            grades: self
                .grades
                .iter()
                .zip(&other.grades)
                .map(|(a, b)| a.max(*b))
                .collect(),
        })
    }

    /// Collapse back to a first-order set: the grade at `x` is the maximum
    /// grade of any subset containing `x`. This is the unique monotone
    /// extension of the singleton case `{α/B} -> α ∧ B(x)`, with `lift` as
    /// a right inverse.
    pub fn reduce(&self) -> FuzzySet {
        let n = self.universe.len();
        let grades = (0..n)
            .map(|i| {
                self.grades
                    .iter()
                    .enumerate()
                    .filter(|(mask, _)| mask >> i & 1 == 1)
                    .map(|(_, &g)| g)
                    .fold(0.0, f64::max)
            })
            .collect();
        FuzzySet::new(self.universe.clone(), grades).expect("grades stay in range")
    }
}

/// Possibility qualification: the entry for each crisp subset `G` is
/// `Poss[a / G]`.
pub fn qualify(a: &FuzzySet) -> Result<SecondOrderSet> {
    check_size(a.universe())?;
    let n = a.universe().len();
    let grades = (0..1usize << n)
        .map(|mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| a.grades()[i])
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(SecondOrderSet {
        universe: a.universe().clone(),
        grades,
    })
}

/// The blocked form: entry for `G` is `1 - Poss[a / G]`.
pub fn star(a: &FuzzySet) -> Result<SecondOrderSet> {
    let q = qualify(a)?;
    Ok(SecondOrderSet {
        universe: q.universe,
        grades: q.grades.iter().map(|g| 1.0 - g).collect(),
    })
}

/// Lift a crisp set to the power-set singleton at its support.
pub fn lift(b: &FuzzySet) -> Result<SecondOrderSet> {
    check_size(b.universe())?;
    if !b.is_crisp() {
        return Err(Error::NotCrisp(b.to_string()));
    }
    let n = b.universe().len();
    let support: usize = b
        .grades()
        .iter()
        .enumerate()
        .filter(|(_, &g)| g == 1.0)
        .map(|(i, _)| 1usize << i)
        .sum();
    let mut grades = vec![0.0; 1usize << n];
    grades[support] = 1.0;
    Ok(SecondOrderSet {
        universe: b.universe().clone(),
        grades,
    })
}

/// Combine typical knowledge `a` with crisp knowledge `b` entirely through
/// the power-set path: `reduce(star(a) ∩ lift(b)) ∪ (a ∩ b)`.
pub fn default_combine_oracle(a: &FuzzySet, b: &FuzzySet) -> Result<FuzzySet> {
    let blocked_part = star(a)?.so_intersect(&lift(b)?)?.reduce();
    blocked_part.union(&a.intersect(b)?)
}

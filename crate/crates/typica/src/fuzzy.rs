//! Fuzzy sets over finite labeled universes with min/max/complement algebra
//! and the possibility measure.
//!
//! All operations are pure; values are immutable after construction. The
//! algebra never leaves the closure of the input grades under `min`, `max`
//! and `1 - x`, so crisp inputs stay exactly 0/1.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance used when comparing grades that are not known to be crisp.
pub const GRADE_EPS: f64 = 1e-9;

/// A finite ordered universe of distinct labels.
///
/// The element order is fixed at creation and defines the layout of every
/// grade vector over this universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    name: String,
    elements: Vec<String>,
}

impl Universe {
    pub fn new(name: impl Into<String>, elements: Vec<String>) -> Result<Arc<Self>> {
        let name = name.into();
        if elements.is_empty() {
            return Err(Error::Validation(format!("universe `{name}` has no elements")));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::Validation(format!(
                    "universe `{name}` repeats element `{e}`"
                )));
            }
        }
        Ok(Arc::new(Universe { name, elements }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // size >= 1 by construction
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }
}

/// Membership grades in `[0,1]`, one per universe element.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySet {
    universe: Arc<Universe>,
    grades: Vec<f64>,
}

fn check_grade(g: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&g) || g.is_nan() {
        return Err(Error::Validation(format!("grade {g} outside [0,1]")));
    }
    Ok(g)
}

impl FuzzySet {
    pub fn new(universe: Arc<Universe>, grades: Vec<f64>) -> Result<Self> {
        if grades.len() != universe.len() {
            return Err(Error::Validation(format!(
                "{} grades for universe `{}` of size {}",
                grades.len(),
                universe.name(),
                universe.len()
            )));
        }
        for &g in &grades {
            check_grade(g)?;
        }
        Ok(FuzzySet { universe, grades })
    }

    /// The empty set (all grades 0).
    pub fn empty(universe: Arc<Universe>) -> Self {
        let n = universe.len();
        FuzzySet {
            universe,
            grades: vec![0.0; n],
        }
    }

    /// The whole universe (all grades 1).
    pub fn full(universe: Arc<Universe>) -> Self {
        let n = universe.len();
        FuzzySet {
            universe,
            grades: vec![1.0; n],
        }
    }

    /// Crisp singleton `{label}`.
    pub fn singleton(universe: Arc<Universe>, label: &str) -> Result<Self> {
        let idx = universe
            .index_of(label)
            .ok_or_else(|| Error::Validation(format!("no element `{label}` in universe `{}`", universe.name())))?;
        let mut grades = vec![0.0; universe.len()];
        grades[idx] = 1.0;
        Ok(FuzzySet { universe, grades })
    }

    /// Build from `(label, grade)` pairs; omitted labels get grade 0.
    pub fn from_pairs(universe: Arc<Universe>, pairs: &[(&str, f64)]) -> Result<Self> {
        let mut grades = vec![0.0; universe.len()];
        for (label, g) in pairs {
            let idx = universe
                .index_of(label)
                .ok_or_else(|| Error::Validation(format!("no element `{label}` in universe `{}`", universe.name())))?;
            grades[idx] = check_grade(*g)?;
        }
        Ok(FuzzySet { universe, grades })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn grades(&self) -> &[f64] {
        &self.grades
    }

    pub fn grade(&self, label: &str) -> Option<f64> {
        self.universe.index_of(label).map(|i| self.grades[i])
    }

    fn require_same_universe(&self, other: &FuzzySet) -> Result<()> {
        if Arc::ptr_eq(&self.universe, &other.universe) || self.universe == other.universe {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                left: self.universe.name().to_string(),
                right: other.universe.name().to_string(),
            })
        }
    }

    /// Pointwise minimum.
    pub fn intersect(&self, other: &FuzzySet) -> Result<FuzzySet> {
        self.require_same_universe(other)?;
        let grades = self
            .grades
            .iter()
            .zip(&other.grades)
            .map(|(a, b)| a.min(*b))
            .collect();
        Ok(FuzzySet {
            universe: self.universe.clone(),
            grades,
        })
    }

    /// Pointwise maximum.
    pub fn union(&self, other: &FuzzySet) -> Result<FuzzySet> {
        self.require_same_universe(other)?;
        let grades = self
            .grades
            .iter()
            .zip(&other.grades)
            .map(|(a, b)| a.max(*b))
            .collect();
        Ok(FuzzySet {
            universe: self.universe.clone(),
            grades,
        })
    }

    /// Pointwise `1 - x`.
    pub fn complement(&self) -> FuzzySet {
        FuzzySet {
            universe: self.universe.clone(),
            grades: self.grades.iter().map(|g| 1.0 - g).collect(),
        }
    }

    /// `Poss[self / g]`: the maximum over the universe of the pointwise
    /// minimum. Symmetric in its arguments.
    pub fn possibility(&self, g: &FuzzySet) -> Result<f64> {
        self.require_same_universe(g)?;
        Ok(self
            .grades
            .iter()
            .zip(&g.grades)
            .map(|(a, b)| a.min(*b))
            .fold(0.0, f64::max))
    }

    /// `1 - Poss[not self / g]`, the dual certainty grade.
    pub fn certainty(&self, g: &FuzzySet) -> Result<f64> {
        Ok(1.0 - self.complement().possibility(g)?)
    }

    /// Maximum grade.
    pub fn height(&self) -> f64 {
        self.grades.iter().copied().fold(0.0, f64::max)
    }

    /// A set is normal when its height is 1.
    pub fn is_normal(&self) -> bool {
        (self.height() - 1.0).abs() <= GRADE_EPS
    }

    /// All grades exactly 0 or 1.
    pub fn is_crisp(&self) -> bool {
        self.grades.iter().all(|&g| g == 0.0 || g == 1.0)
    }

    /// True when every grade differs from `other`'s by at most `tol`.
    pub fn approx_eq(&self, other: &FuzzySet, tol: f64) -> bool {
        self.universe == other.universe
            && self
                .grades
                .iter()
                .zip(&other.grades)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Render a grade: crisp grades print as `0`/`1`, others with six decimals.
pub fn fmt_grade(g: f64) -> String {
    if g == 0.0 {
        "0".to_string()
    } else if g == 1.0 {
        "1".to_string()
    } else {
        format!("{g:.6}")
    }
}

impl fmt::Display for FuzzySet {
    /// `{label, label/grade, ...}` with zero-grade labels omitted, matching
    /// the knowledge-base syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (label, &g) in self.universe.elements().iter().zip(&self.grades) {
            if g == 0.0 {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            if g == 1.0 {
                write!(f, "{label}")?;
            } else {
                write!(f, "{label}/{}", fmt_grade(g))?;
            }
        }
        write!(f, "}}")
    }
}

//! Joint spaces over multiple variables: cylindrical extension, pointwise
//! min/max/complement of relations, projection, and the possibility of a
//! fuzzy set against a relation.
//!
//! Relations are dense arrays over the product space. Variables inside a
//! joint space are ordered lexicographically by name, which fixes a
//! canonical cell layout for reproducible traces. The textbook problems
//! need at most 32 cells; a configurable cell limit guards everything else.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, Universe};

/// Default bound on the number of cells in a joint space.
pub const DEFAULT_CELL_LIMIT: usize = 1_000_000;

/// A named variable ranging over a finite universe, optionally carrying a
/// time index (`alive@2` and `alive@3` are distinct variables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    name: String,
    universe: Arc<Universe>,
    time: Option<i64>,
}

impl Variable {
    pub fn new(name: impl Into<String>, universe: Arc<Universe>, time: Option<i64>) -> Self {
        Variable {
            name: name.into(),
            universe,
            time,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn time(&self) -> Option<i64> {
        self.time
    }
}

/// An ordered product of variables with a dense row-major cell layout.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpace {
    variables: Vec<Variable>,
    strides: Vec<usize>,
    cells: usize,
    cell_limit: usize,
}

impl JointSpace {
    pub fn new(variables: Vec<Variable>) -> Result<Self> {
        Self::with_limit(variables, DEFAULT_CELL_LIMIT)
    }

    pub fn with_limit(mut variables: Vec<Variable>, cell_limit: usize) -> Result<Self> {
        variables.sort_by(|a, b| a.name.cmp(&b.name));
        for pair in variables.windows(2) {
            if pair[0].name == pair[1].name {
                return Err(Error::Validation(format!(
                    "duplicate variable `{}` in joint space",
                    pair[0].name
                )));
            }
        }
        let mut cells = 1usize;
        for v in &variables {
            cells = cells
                .checked_mul(v.universe.len())
                .ok_or(Error::CellLimit {
                    cells: usize::MAX,
                    limit: cell_limit,
                })?;
        }
        if cells > cell_limit {
            return Err(Error::CellLimit {
                cells,
                limit: cell_limit,
            });
        }
        // row-major: the last variable varies fastest
        let mut strides = vec![1usize; variables.len()];
        for i in (0..variables.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * variables[i + 1].universe.len();
        }
        Ok(JointSpace {
            variables,
            strides,
            cells,
            cell_limit,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn cell_limit(&self) -> usize {
        self.cell_limit
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Coordinate of variable `var_idx` within cell `cell`.
    pub fn coord(&self, cell: usize, var_idx: usize) -> usize {
        cell / self.strides[var_idx] % self.variables[var_idx].universe.len()
    }
}

/// A fuzzy relation: one grade in `[0,1]` per joint cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    space: JointSpace,
    grades: Vec<f64>,
}

impl Relation {
    pub fn new(space: JointSpace, grades: Vec<f64>) -> Result<Self> {
        if grades.len() != space.cells() {
            return Err(Error::Validation(format!(
                "{} grades for a space of {} cells",
                grades.len(),
                space.cells()
            )));
        }
        for &g in &grades {
            if !(0.0..=1.0).contains(&g) || g.is_nan() {
                return Err(Error::Validation(format!("grade {g} outside [0,1]")));
            }
        }
        Ok(Relation { space, grades })
    }

    pub fn all_ones(space: JointSpace) -> Self {
        let n = space.cells();
        Relation {
            space,
            grades: vec![1.0; n],
        }
    }

    pub fn all_zeros(space: JointSpace) -> Self {
        let n = space.cells();
        Relation {
            space,
            grades: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &JointSpace {
        &self.space
    }

    pub fn grades(&self) -> &[f64] {
        &self.grades
    }

    pub fn height(&self) -> f64 {
        self.grades.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_all_zero(&self) -> bool {
        self.grades.iter().all(|&g| g == 0.0)
    }

    /// Cylindrical extension: embed a fuzzy set on `var` into `space`,
    /// ignoring every other coordinate.
    pub fn extend(set: &FuzzySet, var: &str, space: &JointSpace) -> Result<Relation> {
        let idx = space
            .index_of(var)
            .ok_or_else(|| Error::VariableNotInSpace(var.to_string()))?;
        if space.variables[idx].universe() != set.universe() {
            return Err(Error::UniverseMismatch {
                left: space.variables[idx].universe().name().to_string(),
                right: set.universe().name().to_string(),
            });
        }
        let grades = (0..space.cells())
            .map(|c| set.grades()[space.coord(c, idx)])
            .collect();
        Ok(Relation {
            space: space.clone(),
            grades,
        })
    }

    fn zip_same_space(&self, other: &Relation, f: impl Fn(f64, f64) -> f64) -> Relation {
        let grades = self
            .grades
            .iter()
            .zip(&other.grades)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Relation {
            space: self.space.clone(),
            grades,
        }
    }

    /// Pointwise minimum after aligning both operands to the union of
    /// their spaces.
    pub fn conjoin(&self, other: &Relation) -> Result<Relation> {
        if self.space == other.space {
            return Ok(self.zip_same_space(other, f64::min));
        }
        let (a, b) = align(self, other)?;
        Ok(a.zip_same_space(&b, f64::min))
    }

    /// Pointwise maximum after alignment.
    pub fn disjoin(&self, other: &Relation) -> Result<Relation> {
        if self.space == other.space {
            return Ok(self.zip_same_space(other, f64::max));
        }
        let (a, b) = align(self, other)?;
        Ok(a.zip_same_space(&b, f64::max))
    }

    /// Pointwise `1 - x`.
    pub fn complement(&self) -> Relation {
        Relation {
            space: self.space.clone(),
            grades: self.grades.iter().map(|g| 1.0 - g).collect(),
        }
    }

    /// Pointwise minimum with a scalar.
    pub fn min_scalar(&self, beta: f64) -> Relation {
        Relation {
            space: self.space.clone(),
            grades: self.grades.iter().map(|g| g.min(beta)).collect(),
        }
    }

    /// Eliminate every variable not in `keep` by maximizing over its
    /// coordinates.
    pub fn project(&self, keep: &[&str]) -> Result<Relation> {
        if keep.is_empty() {
            return Err(Error::EmptyProjection);
        }
        let mut kept = Vec::new();
        for name in keep {
            let idx = self
                .space
                .index_of(name)
                .ok_or_else(|| Error::VariableNotInSpace(name.to_string()))?;
            if !kept.contains(&idx) {
                kept.push(idx);
            }
        }
        kept.sort_unstable();
        if kept.len() == self.space.variables.len() {
            return Ok(self.clone());
        }
        let target = JointSpace::with_limit(
            kept.iter().map(|&i| self.space.variables[i].clone()).collect(),
            self.space.cell_limit,
        )?;
        let mut grades = vec![0.0; target.cells()];
        for (cell, &g) in self.grades.iter().enumerate() {
            let mut t = 0usize;
            for (k, &i) in kept.iter().enumerate() {
                t += self.space.coord(cell, i) * target.strides[k];
            }
            if g > grades[t] {
                grades[t] = g;
            }
        }
        Ok(Relation {
            space: target,
            grades,
        })
    }

    /// Project onto a single variable and view the result as a fuzzy set.
    pub fn project_set(&self, var: &str) -> Result<FuzzySet> {
        let r = self.project(&[var])?;
        FuzzySet::new(r.space.variables[0].universe().clone(), r.grades)
    }

    /// `Poss[s / self]` for a fuzzy set `s` on variable `var`: the maximum
    /// over all cells of `min(self(cell), s(value of var in cell))`.
    pub fn poss_against(&self, set: &FuzzySet, var: &str) -> Result<f64> {
        let idx = self
            .space
            .index_of(var)
            .ok_or_else(|| Error::VariableNotInSpace(var.to_string()))?;
        if self.space.variables[idx].universe() != set.universe() {
            return Err(Error::UniverseMismatch {
                left: self.space.variables[idx].universe().name().to_string(),
                right: set.universe().name().to_string(),
            });
        }
        Ok(self
            .grades
            .iter()
            .enumerate()
            .map(|(c, &g)| g.min(set.grades()[self.space.coord(c, idx)]))
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Relation, tol: f64) -> bool {
        self.space == other.space
            && self
                .grades
                .iter()
                .zip(&other.grades)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Align two relations onto the union of their spaces.
fn align(a: &Relation, b: &Relation) -> Result<(Relation, Relation)> {
    let mut variables: Vec<Variable> = a.space.variables.clone();
    for v in &b.space.variables {
        match variables.iter().find(|w| w.name == v.name) {
            None => variables.push(v.clone()),
            Some(w) if w == v => {}
            Some(w) => {
                return Err(Error::Validation(format!(
                    "variable `{}` declared differently in the two spaces ({} vs {})",
                    v.name,
                    w.universe().name(),
                    v.universe().name()
                )))
            }
        }
    }
    let limit = a.space.cell_limit.max(b.space.cell_limit);
    let union = JointSpace::with_limit(variables, limit)?;
    Ok((reindex(a, &union), reindex(b, &union)))
}

/// Re-express `r` over `target`, a superset of its space.
fn reindex(r: &Relation, target: &JointSpace) -> Relation {
    if r.space == *target {
        return r.clone();
    }
    let positions: Vec<(usize, usize)> = r
        .space
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (i, target.index_of(v.name()).expect("union contains source")))
        .collect();
    let grades = (0..target.cells())
        .map(|cell| {
            let mut src = 0usize;
            for &(i, t) in &positions {
                src += target.coord(cell, t) * r.space.strides[i];
            }
            r.grades[src]
        })
        .collect();
    Relation {
        space: target.clone(),
        grades,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean() -> Arc<Universe> {
        Universe::new("Bool", vec!["true".into(), "false".into()]).unwrap()
    }

    fn var(name: &str) -> Variable {
        Variable::new(name, boolean(), None)
    }

    fn space(names: &[&str]) -> JointSpace {
        JointSpace::new(names.iter().map(|n| var(n)).collect()).unwrap()
    }

    fn crisp_set(u: &Arc<Universe>, grades: &[f64]) -> FuzzySet {
        FuzzySet::new(u.clone(), grades.to_vec()).unwrap()
    }

    #[test]
    fn variables_sorted_lexicographically() {
        let s = space(&["loaded@2", "alive@3", "alive@2"]);
        let names: Vec<&str> = s.variables().iter().map(|v| v.name()).collect();
        assert_eq!(names, vec!["alive@2", "alive@3", "loaded@2"]);
        assert_eq!(s.cells(), 8);
    }

    #[test]
    fn cell_limit_enforced() {
        let vars: Vec<Variable> = (0..4).map(|i| var(&format!("v{i}"))).collect();
        assert!(matches!(
            JointSpace::with_limit(vars, 8),
            Err(Error::CellLimit { cells: 16, limit: 8 })
        ));
    }

    #[test]
    fn extend_examples() {
        let u = boolean();
        let s = space(&["u", "v"]);
        let full = Relation::extend(&FuzzySet::full(u.clone()), "v", &s).unwrap();
        assert!(full.grades().iter().all(|&g| g == 1.0));
        let zero = Relation::extend(&FuzzySet::empty(u.clone()), "v", &s).unwrap();
        assert!(zero.is_all_zero());

        // over (u, v) with u before v, extend {true} on u:
        // cells in row-major order (u,v): (t,t) (t,f) (f,t) (f,f)
        let a = crisp_set(&u, &[1.0, 0.0]);
        let r = Relation::extend(&a, "u", &s).unwrap();
        assert_eq!(r.grades(), &[1.0, 1.0, 0.0, 0.0]);

        assert!(matches!(
            Relation::extend(&a, "w", &s),
            Err(Error::VariableNotInSpace(_))
        ));
    }

    #[test]
    fn conjoin_identity_and_contradiction() {
        let u = boolean();
        let s = space(&["u", "v"]);
        let a = Relation::extend(&crisp_set(&u, &[1.0, 0.0]), "u", &s).unwrap();
        assert_eq!(a.conjoin(&Relation::all_ones(s.clone())).unwrap(), a);
        assert!(a.conjoin(&a.complement()).unwrap().is_all_zero());
    }

    #[test]
    fn conjoin_aligns_distinct_spaces() {
        let u = boolean();
        let su = space(&["u"]);
        let sv = space(&["v"]);
        let a = Relation::extend(&crisp_set(&u, &[1.0, 0.0]), "u", &su).unwrap();
        let b = Relation::extend(&crisp_set(&u, &[0.0, 1.0]), "v", &sv).unwrap();
        let c = a.conjoin(&b).unwrap();
        let names: Vec<&str> = c.space().variables().iter().map(|v| v.name()).collect();
        assert_eq!(names, vec!["u", "v"]);
        // (u,v): (t,t) (t,f) (f,t) (f,f) -> u=true and v=false only
        assert_eq!(c.grades(), &[0.0, 1.0, 0.0, 0.0]);
    }

    /// Exhaustive over all crisp relations on two boolean variables.
    #[test]
    fn disjoin_distributes_over_conjoin_exhaustively() {
        let s = space(&["u", "v"]);
        let rel = |mask: u32| {
            Relation::new(
                s.clone(),
                (0..4).map(|i| f64::from(mask >> i & 1)).collect(),
            )
            .unwrap()
        };
        for ma in 0..16 {
            for mb in 0..16 {
                for mc in 0..16 {
                    let (a, b, c) = (rel(ma), rel(mb), rel(mc));
                    let lhs = a.disjoin(&b.conjoin(&c).unwrap()).unwrap();
                    let rhs = a
                        .disjoin(&b)
                        .unwrap()
                        .conjoin(&a.disjoin(&c).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn project_examples() {
        let u = boolean();
        let s = space(&["u", "v"]);
        let r = Relation::extend(&crisp_set(&u, &[1.0, 0.0]), "u", &s).unwrap();
        // onto all variables -> identity
        assert_eq!(r.project(&["u", "v"]).unwrap(), r);
        // all-ones stays all-ones
        let ones = Relation::all_ones(s.clone());
        assert!(ones.project(&["v"]).unwrap().grades().iter().all(|&g| g == 1.0));
        // empty keep rejected
        assert!(matches!(r.project(&[]), Err(Error::EmptyProjection)));
        // projection of the extension recovers the set
        assert_eq!(r.project_set("u").unwrap().grades(), &[1.0, 0.0]);
        assert_eq!(r.project_set("v").unwrap().grades(), &[1.0, 1.0]);
    }

    #[test]
    fn project_conjoined_extensions_is_intersection() {
        let u = boolean();
        let s = space(&["u", "v"]);
        let a = crisp_set(&u, &[1.0, 0.4]);
        let b = crisp_set(&u, &[0.7, 1.0]);
        let ra = Relation::extend(&a, "u", &s).unwrap();
        let rb = Relation::extend(&b, "u", &s).unwrap();
        let joined = ra.conjoin(&rb).unwrap().project_set("u").unwrap();
        assert_eq!(joined, a.intersect(&b).unwrap());
    }

    #[test]
    fn poss_against_examples() {
        let u = boolean();
        let s = space(&["u", "v"]);
        let b = crisp_set(&u, &[1.0, 0.3]);
        // all-ones relation -> height of the set
        assert_eq!(
            Relation::all_ones(s.clone()).poss_against(&b, "v").unwrap(),
            1.0
        );
        assert_eq!(
            Relation::all_ones(s.clone())
                .poss_against(&crisp_set(&u, &[0.0, 0.3]), "v")
                .unwrap(),
            0.3
        );
        // relation constraining v to the complement of a crisp set -> 0
        let not_true = Relation::extend(&crisp_set(&u, &[0.0, 1.0]), "v", &s).unwrap();
        assert_eq!(
            not_true.poss_against(&crisp_set(&u, &[1.0, 0.0]), "v").unwrap(),
            0.0
        );
        assert!(matches!(
            not_true.poss_against(&b, "w"),
            Err(Error::VariableNotInSpace(_))
        ));
    }

    /// Brute-force oracle: nested loops over explicit coordinates, kept
    /// independent of the Relation indexing.
    #[test]
    fn poss_against_matches_brute_force_on_three_booleans() {
        let s = space(&["a", "b", "c"]);
        let u = boolean();
        for rel_mask in (0..256u32).step_by(7) {
            let r = Relation::new(
                s.clone(),
                (0..8).map(|i| f64::from(rel_mask >> i & 1)).collect(),
            )
            .unwrap();
            for set_mask in 0..4u32 {
                let set = crisp_set(
                    &u,
                    &[f64::from(set_mask & 1), f64::from(set_mask >> 1 & 1)],
                );
                for (vi, vname) in ["a", "b", "c"].iter().enumerate() {
                    let mut expected: f64 = 0.0;
                    for ca in 0..2usize {
                        for cb in 0..2usize {
                            for cc in 0..2usize {
                                let cell = ca * 4 + cb * 2 + cc;
                                let coord = [ca, cb, cc][vi];
                                expected =
                                    expected.max(r.grades()[cell].min(set.grades()[coord]));
                            }
                        }
                    }
                    assert_eq!(r.poss_against(&set, vname).unwrap(), expected);
                }
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn grade() -> impl Strategy<Value = f64> {
            prop_oneof![
                2 => Just(0.0),
                2 => Just(1.0),
                3 => (0..=100u32).prop_map(|n| n as f64 / 100.0),
            ]
        }

        proptest! {
            #[test]
            fn projection_is_monotone(g1 in proptest::collection::vec(grade(), 8),
                                      g2 in proptest::collection::vec(grade(), 8)) {
                let s = space(&["a", "b", "c"]);
                let lo: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a.min(*b)).collect();
                let r1 = Relation::new(s.clone(), lo).unwrap();
                let r2 = Relation::new(s.clone(), g1).unwrap();
                let p1 = r1.project(&["a", "c"]).unwrap();
                let p2 = r2.project(&["a", "c"]).unwrap();
                for (a, b) in p1.grades().iter().zip(p2.grades()) {
                    prop_assert!(a <= b);
                }
            }

            #[test]
            fn projection_composes(g in proptest::collection::vec(grade(), 8)) {
                let s = space(&["a", "b", "c"]);
                let r = Relation::new(s, g).unwrap();
                let via = r.project(&["a", "b"]).unwrap().project(&["a"]).unwrap();
                let direct = r.project(&["a"]).unwrap();
                prop_assert_eq!(via, direct);
            }

            #[test]
            fn poss_against_equals_possibility_of_projection(
                g in proptest::collection::vec(grade(), 8),
                sg in proptest::collection::vec(grade(), 2),
            ) {
                let s = space(&["a", "b", "c"]);
                let r = Relation::new(s, g).unwrap();
                let set = FuzzySet::new(boolean(), sg).unwrap();
                for v in ["a", "b", "c"] {
                    let direct = r.poss_against(&set, v).unwrap();
                    let via = set.possibility(&r.project_set(v).unwrap()).unwrap();
                    prop_assert_eq!(direct, via);
                }
            }

            #[test]
            fn conjoin_never_increases(g1 in proptest::collection::vec(grade(), 8),
                                       g2 in proptest::collection::vec(grade(), 8)) {
                let s = space(&["a", "b", "c"]);
                let r1 = Relation::new(s.clone(), g1).unwrap();
                let r2 = Relation::new(s, g2).unwrap();
                let c = r1.conjoin(&r2).unwrap();
                for ((x, a), b) in c.grades().iter().zip(r1.grades()).zip(r2.grades()) {
                    prop_assert!(x <= a && x <= b);
                }
            }
        }
    }
}

//! Knowledge-base model: literals, facts, default rules, options and the
//! bundled example bases.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, Universe};
use crate::relation::{JointSpace, Variable, DEFAULT_CELL_LIMIT};

/// Default cap on the number of disjuncts a single layer may expand into.
pub const DEFAULT_DISJUNCT_CAP: usize = 10_000;

/// Default verdict threshold (crisp entailment).
pub const DEFAULT_THRESHOLD: f64 = 1.0;

/// An atom: a fuzzy set asserted of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    variable: Variable,
    set: FuzzySet,
}

impl Literal {
    pub fn new(variable: Variable, set: FuzzySet) -> Result<Self> {
        if variable.universe() != set.universe() {
            return Err(Error::UniverseMismatch {
                left: variable.universe().name().to_string(),
                right: set.universe().name().to_string(),
            });
        }
        Ok(Literal { variable, set })
    }

    pub fn variable(&self) -> &Variable {
        &self.variable
    }

    pub fn set(&self) -> &FuzzySet {
        &self.set
    }

    /// The same variable with the complemented set.
    pub fn negated(&self) -> Literal {
        Literal {
            variable: self.variable.clone(),
            set: self.set.complement(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is {}", self.variable.name(), self.set)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    pub id: String,
    pub literal: Literal,
}

/// `typically if ANT then CONS`; an empty antecedent is the unconditional
/// `typically V is A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultRule {
    pub id: String,
    pub antecedent: Vec<Literal>,
    pub consequent: Literal,
}

impl DefaultRule {
    pub fn consequent_time(&self) -> Option<i64> {
        self.consequent.variable().time()
    }
}

/// Engine and reporting knobs carried by a knowledge base.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub cell_limit: usize,
    pub disjunct_cap: usize,
    pub threshold: f64,
    pub oracle_check: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            cell_limit: DEFAULT_CELL_LIMIT,
            disjunct_cap: DEFAULT_DISJUNCT_CAP,
            threshold: DEFAULT_THRESHOLD,
            oracle_check: false,
        }
    }
}

impl Options {
    pub fn validate(&self) -> Result<()> {
        if self.cell_limit < 1 {
            return Err(Error::Validation("cell limit must be at least 1".into()));
        }
        if !(self.threshold > 0.5 && self.threshold <= 1.0) {
            return Err(Error::Validation(format!(
                "threshold {} outside (0.5, 1]",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// A validated rule base: universes, variables, facts, defaults and the
/// queries named in the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    universes: Vec<Arc<Universe>>,
    variables: Vec<Variable>,
    facts: Vec<Fact>,
    defaults: Vec<DefaultRule>,
    queries: Vec<String>,
    options: Options,
}

impl KnowledgeBase {
    pub fn new(
        universes: Vec<Arc<Universe>>,
        variables: Vec<Variable>,
        facts: Vec<Fact>,
        defaults: Vec<DefaultRule>,
        queries: Vec<String>,
        options: Options,
    ) -> Result<Self> {
        let kb = KnowledgeBase {
            universes,
            variables,
            facts,
            defaults,
            queries,
            options,
        };
        kb.validate()?;
        Ok(kb)
    }

    fn validate(&self) -> Result<()> {
        self.options.validate()?;
        for (i, u) in self.universes.iter().enumerate() {
            if self.universes[..i].iter().any(|v| v.name() == u.name()) {
                return Err(Error::Validation(format!("duplicate universe `{}`", u.name())));
            }
        }
        for (i, v) in self.variables.iter().enumerate() {
            if self.variables[..i].iter().any(|w| w.name() == v.name()) {
                return Err(Error::Validation(format!("duplicate variable `{}`", v.name())));
            }
            if !self.universes.iter().any(|u| u == v.universe()) {
                return Err(Error::Validation(format!(
                    "variable `{}` references undeclared universe `{}`",
                    v.name(),
                    v.universe().name()
                )));
            }
        }
        let mut ids: Vec<&str> = Vec::new();
        for id in self
            .facts
            .iter()
            .map(|f| f.id.as_str())
            .chain(self.defaults.iter().map(|d| d.id.as_str()))
        {
            if ids.contains(&id) {
                return Err(Error::Validation(format!("duplicate identifier `{id}`")));
            }
            ids.push(id);
        }
        let check_var = |lit: &Literal| -> Result<()> {
            if !self.variables.iter().any(|v| v == lit.variable()) {
                return Err(Error::UnknownVariable(lit.variable().name().to_string()));
            }
            Ok(())
        };
        for f in &self.facts {
            check_var(&f.literal)?;
        }
        for d in &self.defaults {
            for (i, lit) in d.antecedent.iter().enumerate() {
                check_var(lit)?;
                if d.antecedent[..i]
                    .iter()
                    .any(|l| l.variable().name() == lit.variable().name())
                {
                    return Err(Error::Validation(format!(
                        "rule `{}` repeats antecedent variable `{}`",
                        d.id,
                        lit.variable().name()
                    )));
                }
            }
            check_var(&d.consequent)?;
            if d.antecedent
                .iter()
                .any(|l| l.variable().name() == d.consequent.variable().name())
            {
                return Err(Error::Validation(format!(
                    "rule `{}` concludes on antecedent variable `{}`; distinct time indices use distinct variables",
                    d.id,
                    d.consequent.variable().name()
                )));
            }
            if d.consequent.set().height() == 0.0 {
                return Err(Error::Validation(format!(
                    "rule `{}` has an empty consequent set",
                    d.id
                )));
            }
        }
        for q in &self.queries {
            if !self.variables.iter().any(|v| v.name() == q) {
                return Err(Error::UnknownVariable(q.clone()));
            }
        }
        // the full joint space must fit the cell limit
        self.joint_space()?;
        Ok(())
    }

    pub fn universes(&self) -> &[Arc<Universe>] {
        &self.universes
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name() == name)
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn defaults(&self) -> &[DefaultRule] {
        &self.defaults
    }

    pub fn rule(&self, id: &str) -> Option<&DefaultRule> {
        self.defaults.iter().find(|d| d.id == id)
    }

    pub fn queries(&self) -> &[String] {
        &self.queries
    }

    pub fn options(&self) -> &Options {
        &self.options
    }

    pub fn set_options(&mut self, options: Options) -> Result<()> {
        options.validate()?;
        self.options = options;
        self.joint_space()?;
        Ok(())
    }

    /// The joint space of an inference run: every declared variable.
    pub fn joint_space(&self) -> Result<JointSpace> {
        JointSpace::with_limit(self.variables.clone(), self.options.cell_limit)
    }

    /// Render back to the rule-base syntax. `parse_kb` accepts the output.
    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        for u in &self.universes {
            out.push_str(&format!(
                "universe {} = {{ {} }}\n",
                u.name(),
                u.elements().join(", ")
            ));
        }
        for v in &self.variables {
            out.push_str(&format!("var {} : {}\n", v.name(), v.universe().name()));
        }
        for f in &self.facts {
            out.push_str(&format!(
                "fact {}: {} is {}\n",
                f.id,
                f.literal.variable().name(),
                dsl_set(f.literal.set())
            ));
        }
        for d in &self.defaults {
            if d.antecedent.is_empty() {
                out.push_str(&format!(
                    "default {}: {} is {}\n",
                    d.id,
                    d.consequent.variable().name(),
                    dsl_set(d.consequent.set())
                ));
            } else {
                let ant = d
                    .antecedent
                    .iter()
                    .map(|l| format!("{} is {}", l.variable().name(), dsl_set(l.set())))
                    .collect::<Vec<_>>()
                    .join(" and ");
                out.push_str(&format!(
                    "default {}: if {} then {} is {}\n",
                    d.id,
                    ant,
                    d.consequent.variable().name(),
                    dsl_set(d.consequent.set())
                ));
            }
        }
        for q in &self.queries {
            out.push_str(&format!("query {q}\n"));
        }
        out
    }

    /// One of the transcribed example bases.
    pub fn builtin(name: &str) -> Result<KnowledgeBase> {
        let text = match name {
            "yale" => include_str!("../../../kb/yale.kb"),
            "nixon" => include_str!("../../../kb/nixon.kb"),
            "nixon-quaker-only" => include_str!("../../../kb/nixon-quaker-only.kb"),
            "nixon-republican-only" => include_str!("../../../kb/nixon-republican-only.kb"),
            "nixon-both" => include_str!("../../../kb/nixon-both.kb"),
            other => return Err(Error::UnknownBuiltin(other.to_string())),
        };
        crate::parser::parse_kb(text)
    }

    pub const BUILTIN_NAMES: [&'static str; 5] = [
        "nixon",
        "nixon-quaker-only",
        "nixon-republican-only",
        "nixon-both",
        "yale",
    ];
}

/// Grades in the syntax are written with full round-trip precision.
fn dsl_set(set: &FuzzySet) -> String {
    let mut parts = Vec::new();
    for (label, &g) in set.universe().elements().iter().zip(set.grades()) {
        if g == 0.0 {
            continue;
        }
        if g == 1.0 {
            parts.push(label.clone());
        } else {
            parts.push(format!("{label}/{g}"));
        }
    }
    format!("{{{}}}", parts.join(", "))
}

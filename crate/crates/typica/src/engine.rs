//! Core inference: material forms with blocked terms, layer-by-layer rule
//! introduction, effecting of second-order terms, and query answering.
//!
//! A default rule `typically if ANT then CONS` contributes the material
//! form `¬ANT ∪ blocked(CONS) ∪ CONS`, where `blocked(C)` stands for the
//! second-order statement "C is not possible". Introducing a layer
//! conjoins the current knowledge with each rule's material form and
//! distributes the result into disjuncts; disjuncts whose first-order part
//! vanishes are pruned and disjuncts carrying identical blocked-term sets
//! are max-merged before effecting. Effecting replaces the blocked terms
//! of a disjunct with the scalar `β = min_i (1 - Poss[Cᵢ / K])` computed
//! against the disjunct's own first-order part `K`; the disjunct then
//! contributes `K ∧ β`, and the new knowledge is the pointwise maximum of
//! the contributions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, GRADE_EPS};
use crate::kb::{DefaultRule, KnowledgeBase, Literal};
use crate::relation::{JointSpace, Relation};
use crate::schedule::{build_schedule, PrioritySchedule};

/// `D(x) = (h(x) ∧ (1 - Poss[a/h])) ∨ (a(x) ∧ h(x))`: combine current
/// knowledge `h` with the typical value `a` of an unconditional default.
pub fn apply_default(h: &FuzzySet, a: &FuzzySet) -> Result<FuzzySet> {
    let discount = 1.0 - a.possibility(h)?;
    let grades = h
        .grades()
        .iter()
        .zip(a.grades())
        .map(|(hx, ax)| hx.min(discount).max(ax.min(*hx)))
        .collect();
    FuzzySet::new(h.universe().clone(), grades)
}

/// The second-order statement "not (consequent is possible)", keyed by its
/// consequent literal.
#[derive(Debug, Clone)]
pub struct BlockedTerm {
    consequent: Literal,
}

impl BlockedTerm {
    pub fn new(consequent: Literal) -> Result<Self> {
        if consequent.set().height() == 0.0 {
            return Err(Error::Validation(
                "blocked term over an empty consequent set".into(),
            ));
        }
        Ok(BlockedTerm { consequent })
    }

    pub fn consequent(&self) -> &Literal {
        &self.consequent
    }

    fn key(&self) -> (&str, Vec<u64>) {
        (
            self.consequent.variable().name(),
            self.consequent.set().grades().iter().map(|g| g.to_bits()).collect(),
        )
    }
}

impl PartialEq for BlockedTerm {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for BlockedTerm {}
impl PartialOrd for BlockedTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for BlockedTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for BlockedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not-possible({})", self.consequent)
    }
}

/// One term of a distributed material form: a first-order relation plus a
/// set of blocked terms. `origins` lists the branch combinations that were
/// max-merged into this disjunct.
#[derive(Debug, Clone)]
pub struct Disjunct {
    k: Relation,
    blocked: BTreeSet<BlockedTerm>,
    origins: BTreeSet<BTreeSet<String>>,
}

impl Disjunct {
    pub fn k(&self) -> &Relation {
        &self.k
    }

    pub fn blocked(&self) -> &BTreeSet<BlockedTerm> {
        &self.blocked
    }

    pub fn description(&self) -> String {
        if self.origins.is_empty() {
            return "h".to_string();
        }
        self.origins
            .iter()
            .map(|combo| {
                let mut parts = vec!["h".to_string()];
                parts.extend(combo.iter().cloned());
                parts.join(" & ")
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// The three branches of `¬ANT ∪ blocked(CONS) ∪ CONS` over `space`.
/// An empty antecedent complements to the all-zero relation, which is
/// dropped, leaving two branches.
pub fn material_form(rule: &DefaultRule, space: &JointSpace) -> Result<Vec<Disjunct>> {
    let single = |label: String| BTreeSet::from([BTreeSet::from([label])]);
    let mut out = Vec::new();
    if !rule.antecedent.is_empty() {
        let mut ant = Relation::all_ones(space.clone());
        for lit in &rule.antecedent {
            ant = ant.conjoin(&Relation::extend(lit.set(), lit.variable().name(), space)?)?;
        }
        out.push(Disjunct {
            k: ant.complement(),
            blocked: BTreeSet::new(),
            origins: single(format!("~ant({})", rule.id)),
        });
    }
    out.push(Disjunct {
        k: Relation::all_ones(space.clone()),
        blocked: BTreeSet::from([BlockedTerm::new(rule.consequent.clone())?]),
        origins: single(format!("guard({})", rule.id)),
    });
    out.push(Disjunct {
        k: Relation::extend(rule.consequent.set(), rule.consequent.variable().name(), space)?,
        blocked: BTreeSet::new(),
        origins: single(format!("cons({})", rule.id)),
    });
    Ok(out)
}

/// A blocked term of an effected disjunct together with its possibility
/// against the disjunct's first-order part and the resulting β factor.
#[derive(Debug, Clone)]
pub struct TraceBlocked {
    pub term: BlockedTerm,
    pub possibility: f64,
    pub beta: f64,
}

/// A merged disjunct as it stood when the layer was effected.
#[derive(Debug, Clone)]
pub struct TraceDisjunct {
    pub description: String,
    pub k: Relation,
    pub blocked: Vec<TraceBlocked>,
    pub beta: f64,
    pub contributed: bool,
}

/// Everything recorded about one schedule layer.
#[derive(Debug, Clone)]
pub struct TraceLayer {
    pub index: usize,
    pub introduced: Vec<String>,
    pub disjuncts: Vec<TraceDisjunct>,
    pub projections: Vec<(String, FuzzySet)>,
    pub height_after: f64,
}

/// The evolving (and, after `infer`, final) state of an inference run.
#[derive(Debug, Clone)]
pub struct KnowledgeState {
    space: JointSpace,
    h: Relation,
    trace: Vec<TraceLayer>,
    schedule: PrioritySchedule,
    threshold: f64,
    disjunct_cap: usize,
    inconsistent_since: Option<usize>,
}

impl KnowledgeState {
    /// The state after simultaneously introducing the facts: `h` is the
    /// conjunction of the cylindrically extended facts (all-ones when
    /// there are none) and layer 0 is recorded in the trace.
    pub fn initial(kb: &KnowledgeBase) -> Result<Self> {
        let space = kb.joint_space()?;
        let schedule = build_schedule(kb)?;
        let mut h = Relation::all_ones(space.clone());
        for fact in kb.facts() {
            let ext =
                Relation::extend(fact.literal.set(), fact.literal.variable().name(), &space)?;
            h = h.conjoin(&ext)?;
        }
        let mut state = KnowledgeState {
            space,
            h,
            trace: Vec::new(),
            schedule: schedule.clone(),
            threshold: kb.options().threshold,
            disjunct_cap: kb.options().disjunct_cap,
            inconsistent_since: None,
        };
        state.record(0, schedule.layers()[0].clone(), Vec::new());
        Ok(state)
    }

    /// Resume from explicit joint knowledge instead of the base's facts.
    /// The relation must live on the base's joint space.
    pub fn from_relation(kb: &KnowledgeBase, h: Relation) -> Result<Self> {
        let space = kb.joint_space()?;
        if h.space() != &space {
            return Err(Error::Validation(
                "relation does not live on the base's joint space".into(),
            ));
        }
        let schedule = build_schedule(kb)?;
        let mut state = KnowledgeState {
            space,
            h,
            trace: Vec::new(),
            schedule,
            threshold: kb.options().threshold,
            disjunct_cap: kb.options().disjunct_cap,
            inconsistent_since: None,
        };
        state.record(0, Vec::new(), Vec::new());
        Ok(state)
    }

    pub fn space(&self) -> &JointSpace {
        &self.space
    }

    pub fn h(&self) -> &Relation {
        &self.h
    }

    pub fn trace(&self) -> &[TraceLayer] {
        &self.trace
    }

    pub fn schedule(&self) -> &PrioritySchedule {
        &self.schedule
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Subnormal joint knowledge signals contradiction; the run is flagged
    /// rather than repaired.
    pub fn is_consistent(&self) -> bool {
        self.h.height() >= 1.0 - GRADE_EPS
    }

    /// First layer after which the state went subnormal, if any.
    pub fn inconsistent_since(&self) -> Option<usize> {
        self.inconsistent_since
    }

    fn record(&mut self, index: usize, introduced: Vec<String>, disjuncts: Vec<TraceDisjunct>) {
        let projections = self
            .space
            .variables()
            .iter()
            .map(|v| {
                let set = self
                    .h
                    .project_set(v.name())
                    .expect("space variables project");
                (v.name().to_string(), set)
            })
            .collect();
        let height_after = self.h.height();
        if height_after < 1.0 - GRADE_EPS && self.inconsistent_since.is_none() {
            self.inconsistent_since = Some(index);
        }
        self.trace.push(TraceLayer {
            index,
            introduced,
            disjuncts,
            projections,
            height_after,
        });
    }
}

/// Introduce one schedule layer of rules into `state`, returning the new
/// state. Rule order within the layer does not affect the result.
pub fn introduce_layer(state: &KnowledgeState, rules: &[&DefaultRule]) -> Result<KnowledgeState> {
    let mut next = state.clone();
    let index = state.trace.len();
    let introduced = rules.iter().map(|r| r.id.clone()).collect();
    if rules.is_empty() {
        next.record(index, introduced, Vec::new());
        return Ok(next);
    }
    let disjuncts = distribute(&state.h, rules, &state.space, state.disjunct_cap)?;
    let (new_h, trace_disjuncts) = effect(&disjuncts, &state.space)?;
    next.h = new_h;
    next.record(index, introduced, trace_disjuncts);
    Ok(next)
}

/// Conjoin `h` with every rule's material form and distribute into
/// disjuncts: first-order parts conjoined, blocked-term sets unioned.
/// Zero disjuncts are pruned as they appear; disjuncts with identical
/// blocked-term sets are max-merged.
fn distribute(
    h: &Relation,
    rules: &[&DefaultRule],
    space: &JointSpace,
    cap: usize,
) -> Result<Vec<Disjunct>> {
    let mut current: BTreeMap<BTreeSet<BlockedTerm>, Disjunct> = BTreeMap::new();
    if !h.is_all_zero() {
        current.insert(
            BTreeSet::new(),
            Disjunct {
                k: h.clone(),
                blocked: BTreeSet::new(),
                origins: BTreeSet::new(),
            },
        );
    }
    for rule in rules {
        let branches = material_form(rule, space)?;
        let mut next: BTreeMap<BTreeSet<BlockedTerm>, Disjunct> = BTreeMap::new();
        for disjunct in current.values() {
            for branch in &branches {
                let k = disjunct.k.conjoin(&branch.k)?;
                if k.is_all_zero() {
                    continue;
                }
                let mut blocked = disjunct.blocked.clone();
                blocked.extend(branch.blocked.iter().cloned());
                let branch_labels = branch
                    .origins
                    .iter()
                    .flatten()
                    .cloned()
                    .collect::<BTreeSet<String>>();
                let origins: BTreeSet<BTreeSet<String>> = if disjunct.origins.is_empty() {
                    BTreeSet::from([branch_labels])
                } else {
                    disjunct
                        .origins
                        .iter()
                        .map(|combo| combo.union(&branch_labels).cloned().collect())
                        .collect()
                };
                match next.get_mut(&blocked) {
                    Some(existing) => {
                        existing.k = existing.k.disjoin(&k)?;
                        existing.origins.extend(origins);
                    }
                    None => {
                        if next.len() >= cap {
                            return Err(Error::DisjunctCap {
                                count: next.len() + 1,
                                cap,
                            });
                        }
                        next.insert(blocked.clone(), Disjunct { k, blocked, origins });
                    }
                }
            }
        }
        current = next;
        if current.is_empty() {
            break;
        }
    }
    Ok(current.into_values().collect())
}

/// Effect every disjunct and take the pointwise maximum of the
/// contributions.
fn effect(disjuncts: &[Disjunct], space: &JointSpace) -> Result<(Relation, Vec<TraceDisjunct>)> {
    let mut new_h: Option<Relation> = None;
    let mut trace = Vec::with_capacity(disjuncts.len());
    for disjunct in disjuncts {
        let mut beta = 1.0f64;
        let mut blocked_trace = Vec::with_capacity(disjunct.blocked.len());
        for term in &disjunct.blocked {
            let possibility = disjunct
                .k
                .poss_against(term.consequent.set(), term.consequent.variable().name())?;
            let term_beta = 1.0 - possibility;
            beta = beta.min(term_beta);
            blocked_trace.push(TraceBlocked {
                term: term.clone(),
                possibility,
                beta: term_beta,
            });
        }
        let contributed = beta > 0.0;
        if contributed {
            let contribution = disjunct.k.min_scalar(beta);
            new_h = Some(match new_h {
                Some(acc) => acc.disjoin(&contribution)?,
                None => contribution,
            });
        }
        trace.push(TraceDisjunct {
            description: disjunct.description(),
            k: disjunct.k.clone(),
            blocked: blocked_trace,
            beta,
            contributed,
        });
    }
    Ok((new_h.unwrap_or_else(|| Relation::all_zeros(space.clone())), trace))
}

/// Run the full inference: conjoin the facts, then fold the schedule
/// layers in order. Pure in the knowledge base; the returned state is
/// immutable.
pub fn infer(kb: &KnowledgeBase) -> Result<KnowledgeState> {
    let mut state = KnowledgeState::initial(kb)?;
    let layers: Vec<Vec<String>> = state.schedule.layers()[1..].to_vec();
    for layer in layers {
        let rules: Vec<&DefaultRule> = layer
            .iter()
            .map(|id| kb.rule(id).expect("schedule ids come from the base"))
            .collect();
        state = introduce_layer(&state, &rules)?;
    }
    Ok(state)
}

/// How a query set stands relative to the projected knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Entailed,
    Refuted,
    Unknown,
    Inconsistent,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Entailed => "ENTAILED",
            Classification::Refuted => "REFUTED",
            Classification::Unknown => "UNKNOWN",
            Classification::Inconsistent => "INCONSISTENT",
        };
        f.write_str(s)
    }
}

fn classify(possibility: f64, certainty: f64, threshold: f64, consistent: bool) -> Classification {
    if !consistent {
        Classification::Inconsistent
    } else if certainty >= threshold - GRADE_EPS {
        Classification::Entailed
    } else if possibility <= 1.0 - threshold + GRADE_EPS {
        Classification::Refuted
    } else {
        Classification::Unknown
    }
}

/// Grades for one query set against the projection.
#[derive(Debug, Clone)]
pub struct QueryGrade {
    /// Singleton element label when the query defaulted to singletons.
    pub label: Option<String>,
    pub set: FuzzySet,
    pub possibility: f64,
    pub certainty: f64,
    pub classification: Classification,
}

/// The answer for one queried variable.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub variable: String,
    pub projected: FuzzySet,
    pub entries: Vec<QueryGrade>,
    pub classification: Classification,
    pub kb_height: f64,
}

/// Project the final knowledge onto `variable` and grade the query set
/// against it. Without an explicit set, every crisp singleton of the
/// variable's universe is graded and the verdict classification follows
/// the first element's singleton.
pub fn query(state: &KnowledgeState, variable: &str, q: Option<&FuzzySet>) -> Result<Verdict> {
    if state.space.index_of(variable).is_none() {
        return Err(Error::UnknownVariable(variable.to_string()));
    }
    let projected = state.h.project_set(variable)?;
    let consistent = state.is_consistent();
    let threshold = state.threshold;
    let mut entries = Vec::new();
    match q {
        Some(set) => {
            let possibility = set.possibility(&projected)?;
            let certainty = set.certainty(&projected)?;
            entries.push(QueryGrade {
                label: None,
                set: set.clone(),
                possibility,
                certainty,
                classification: classify(possibility, certainty, threshold, consistent),
            });
        }
        None => {
            for label in projected.universe().clone().elements() {
                let set = FuzzySet::singleton(projected.universe().clone(), label)?;
                let possibility = set.possibility(&projected)?;
                let certainty = set.certainty(&projected)?;
                entries.push(QueryGrade {
                    label: Some(label.clone()),
                    set,
                    possibility,
                    certainty,
                    classification: classify(possibility, certainty, threshold, consistent),
                });
            }
        }
    }
    let classification = entries[0].classification;
    Ok(Verdict {
        variable: variable.to_string(),
        projected,
        entries,
        classification,
        kb_height: state.h.height(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::Universe;
    use crate::parser::parse_kb;
    use crate::relation::Variable;
    use std::sync::Arc;

    fn boolean() -> Arc<Universe> {
        Universe::new("Bool", vec!["true".into(), "false".into()]).unwrap()
    }

    fn set(u: &Arc<Universe>, grades: &[f64]) -> FuzzySet {
        FuzzySet::new(u.clone(), grades.to_vec()).unwrap()
    }

    #[test]
    fn apply_default_examples() {
        let u = Universe::new("X", vec!["x1".into(), "x2".into(), "x3".into()]).unwrap();
        // crisp disjoint: typical value discounted
        let a = set(&u, &[1.0, 0.0, 0.0]);
        let h = set(&u, &[0.0, 1.0, 1.0]);
        assert_eq!(apply_default(&h, &a).unwrap(), h);
        // crisp overlapping: conjunction
        let h2 = set(&u, &[1.0, 1.0, 0.0]);
        assert_eq!(apply_default(&h2, &a).unwrap(), a.intersect(&h2).unwrap());
        // h unknown: the typical value
        let full = FuzzySet::full(u.clone());
        assert_eq!(apply_default(&full, &a).unwrap(), a);
        // fuzzy hand evaluation
        let u2 = Universe::new("X", vec!["x1".into(), "x2".into()]).unwrap();
        let a = set(&u2, &[1.0, 0.3]);
        let h = set(&u2, &[0.6, 1.0]);
        let d = apply_default(&h, &a).unwrap();
        assert!(d.approx_eq(&set(&u2, &[0.6, 0.4]), GRADE_EPS), "{d}");
    }

    #[test]
    fn material_form_shapes() {
        let kb = KnowledgeBase::builtin("yale").unwrap();
        let space = kb.joint_space().unwrap();
        let d1 = kb.rule("D1").unwrap();
        let form = material_form(d1, &space).unwrap();
        assert_eq!(form.len(), 3);
        assert_eq!(form[0].description(), "h & ~ant(D1)");
        assert_eq!(form[1].description(), "h & guard(D1)");
        assert_eq!(form[1].blocked.len(), 1);
        assert_eq!(
            form[1].blocked.iter().next().unwrap().to_string(),
            "not-possible(loaded@2 is {true})"
        );
        assert_eq!(form[2].description(), "h & cons(D1)");

        // unconditional: the antecedent branch is dropped
        let text = "universe U = { a, b }\nvar v : U\ndefault D0: v is {a}\n";
        let kb = parse_kb(text).unwrap();
        let space = kb.joint_space().unwrap();
        let form = material_form(kb.rule("D0").unwrap(), &space).unwrap();
        assert_eq!(form.len(), 2);
        assert!(form[0].blocked.len() == 1 || form[1].blocked.len() == 1);
    }

    /// Expected relation built coordinate-by-coordinate, independent of
    /// the relation algebra.
    fn yale_expected(space: &JointSpace) -> Relation {
        // variables sorted: alive@2, alive@3, loaded@1, loaded@2, shot@2
        let grades = (0..space.cells())
            .map(|cell| {
                let alive2 = space.coord(cell, 0) == 0;
                let alive3 = space.coord(cell, 1) == 0;
                let loaded1 = space.coord(cell, 2) == 0;
                let loaded2 = space.coord(cell, 3) == 0;
                let shot2 = space.coord(cell, 4) == 0;
                if alive2 && !alive3 && loaded1 && loaded2 && shot2 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Relation::new(space.clone(), grades).unwrap()
    }

    #[test]
    fn yale_layers_follow_the_derivation() {
        let kb = KnowledgeBase::builtin("yale").unwrap();
        let state = infer(&kb).unwrap();
        let trace = state.trace();
        assert_eq!(trace.len(), 4);

        // layer 0: facts leave loaded@2 and alive@3 unconstrained
        let proj = |layer: &TraceLayer, var: &str| -> FuzzySet {
            layer
                .projections
                .iter()
                .find(|(n, _)| n == var)
                .map(|(_, s)| s.clone())
                .unwrap()
        };
        let u = boolean();
        assert_eq!(proj(&trace[0], "loaded@1"), set(&u, &[1.0, 0.0]));
        assert_eq!(proj(&trace[0], "loaded@2"), set(&u, &[1.0, 1.0]));

        // layer 1 ({D1}): the gun stays loaded
        assert_eq!(proj(&trace[1], "loaded@2"), set(&u, &[1.0, 0.0]));
        assert_eq!(proj(&trace[1], "alive@3"), set(&u, &[1.0, 1.0]));

        // layer 2 ({D3, D4}): not alive at 3
        assert_eq!(proj(&trace[2], "alive@3"), set(&u, &[0.0, 1.0]));

        // layer 3 ({D2}): blocked term saturates, h unchanged
        assert_eq!(proj(&trace[3], "alive@3"), set(&u, &[0.0, 1.0]));
        let saturated = trace[3]
            .disjuncts
            .iter()
            .find(|d| !d.blocked.is_empty())
            .expect("guard disjunct recorded");
        assert_eq!(saturated.blocked[0].possibility, 0.0);
        assert_eq!(saturated.beta, 1.0);

        // final h cell-by-cell
        assert_eq!(state.h(), &yale_expected(state.space()));
        assert!(state.is_consistent());
    }

    #[test]
    fn yale_query_refutes_alive_at_3() {
        let kb = KnowledgeBase::builtin("yale").unwrap();
        let state = infer(&kb).unwrap();
        let u = boolean();
        let v = query(&state, "alive@3", Some(&set(&u, &[1.0, 0.0]))).unwrap();
        assert_eq!(v.entries[0].possibility, 0.0);
        assert_eq!(v.entries[0].certainty, 0.0);
        assert_eq!(v.classification, Classification::Refuted);

        // default singleton grades
        let v = query(&state, "alive@3", None).unwrap();
        assert_eq!(v.classification, Classification::Refuted);
        assert_eq!(v.entries.len(), 2);
        assert_eq!(v.entries[0].label.as_deref(), Some("true"));
        assert_eq!(v.entries[0].possibility, 0.0);
        assert_eq!(v.entries[1].label.as_deref(), Some("false"));
        assert_eq!(v.entries[1].certainty, 1.0);
        assert_eq!(v.entries[1].classification, Classification::Entailed);
    }

    #[test]
    fn nixon_no_facts_is_unknown_everywhere() {
        let kb = KnowledgeBase::builtin("nixon").unwrap();
        let state = infer(&kb).unwrap();
        assert!(state.is_consistent());
        for var in ["quaker", "republican", "pacifist"] {
            let v = query(&state, var, None).unwrap();
            assert_eq!(v.classification, Classification::Unknown, "{var}");
            assert!(v.projected.grades().iter().all(|&g| g == 1.0), "{var}");
        }
    }

    #[test]
    fn nixon_single_fact_cases() {
        let u = boolean();
        let state = infer(&KnowledgeBase::builtin("nixon-quaker-only").unwrap()).unwrap();
        let v = query(&state, "pacifist", None).unwrap();
        assert_eq!(v.projected, set(&u, &[1.0, 0.0]));
        assert_eq!(v.classification, Classification::Entailed);

        let state = infer(&KnowledgeBase::builtin("nixon-republican-only").unwrap()).unwrap();
        let v = query(&state, "pacifist", None).unwrap();
        assert_eq!(v.projected, set(&u, &[0.0, 1.0]));
        assert_eq!(v.entries[1].classification, Classification::Entailed);
        assert_eq!(v.entries[0].classification, Classification::Refuted);
    }

    #[test]
    fn nixon_both_facts_cancel_to_unknown() {
        let state = infer(&KnowledgeBase::builtin("nixon-both").unwrap()).unwrap();
        assert!(state.is_consistent());
        let v = query(&state, "pacifist", None).unwrap();
        assert!(v.projected.grades().iter().all(|&g| g == 1.0));
        assert_eq!(v.classification, Classification::Unknown);
        // the cross disjunct carrying both complementary blocked terms
        // contributes nothing
        let layer = state.trace().last().unwrap();
        let both = layer
            .disjuncts
            .iter()
            .find(|d| d.blocked.len() == 2)
            .expect("complementary pair disjunct");
        assert_eq!(both.beta, 0.0);
        assert!(!both.contributed);
    }

    #[test]
    fn facts_only_inference_is_their_conjunction() {
        let text = "universe U = { a, b, c }\nvar v : U\nvar w : U\n\
                    fact F1: v is {a, b/0.5}\nfact F2: v is {a/0.8, b}\n";
        let kb = parse_kb(text).unwrap();
        let state = infer(&kb).unwrap();
        let u = kb.universes()[0].clone();
        assert_eq!(state.h().project_set("v").unwrap(), set(&u, &[0.8, 0.5, 0.0]));
        // the joint knowledge is subnormal (height 0.8), so the otherwise
        // unconstrained variable projects to that height everywhere
        assert_eq!(state.h().project_set("w").unwrap(), set(&u, &[0.8, 0.8, 0.8]));
    }

    #[test]
    fn single_variable_default_matches_formula_and_oracle() {
        let u = Universe::new("X", vec!["a".into(), "b".into(), "c".into()]).unwrap();
        // mask_a = 0 would be a rule with an empty consequent, which the
        // base rejects
        for mask_a in 1..8usize {
            for mask_b in 0..8usize {
                let a_grades: Vec<f64> = (0..3).map(|i| f64::from(mask_a as u32 >> i & 1)).collect();
                let b_grades: Vec<f64> = (0..3).map(|i| f64::from(mask_b as u32 >> i & 1)).collect();
                let a = set(&u, &a_grades);
                let b = set(&u, &b_grades);
                let kb = single_default_kb(&u, &a, &b);
                let state = infer(&kb).unwrap();
                let got = state.h().project_set("v").unwrap();
                let formula = apply_default(&b, &a).unwrap();
                let oracle = crate::second_order::default_combine_oracle(&a, &b).unwrap();
                assert_eq!(got, formula, "a={mask_a:b} b={mask_b:b}");
                assert_eq!(got, oracle, "a={mask_a:b} b={mask_b:b}");
            }
        }
    }

    fn single_default_kb(u: &Arc<Universe>, a: &FuzzySet, b: &FuzzySet) -> KnowledgeBase {
        use crate::kb::{DefaultRule, Fact, Options};
        let v = Variable::new("v", u.clone(), None);
        KnowledgeBase::new(
            vec![u.clone()],
            vec![v.clone()],
            vec![Fact {
                id: "F1".into(),
                literal: Literal::new(v.clone(), b.clone()).unwrap(),
            }],
            vec![DefaultRule {
                id: "D1".into(),
                antecedent: vec![],
                consequent: Literal::new(v, a.clone()).unwrap(),
            }],
            vec![],
            Options::default(),
        )
        .unwrap()
    }

    #[test]
    fn within_layer_order_invariance_on_yale() {
        let kb = KnowledgeBase::builtin("yale").unwrap();
        let after_d1 = introduce_layer(
            &KnowledgeState::initial(&kb).unwrap(),
            &[kb.rule("D1").unwrap()],
        )
        .unwrap();
        let d3 = kb.rule("D3").unwrap();
        let d4 = kb.rule("D4").unwrap();
        let forward = introduce_layer(&after_d1, &[d3, d4]).unwrap();
        let backward = introduce_layer(&after_d1, &[d4, d3]).unwrap();
        assert_eq!(forward.h().grades(), backward.h().grades());
        assert_eq!(forward.h(), &yale_expected(after_d1.space()));
    }

    #[test]
    fn empty_layer_is_a_no_op() {
        let kb = KnowledgeBase::builtin("nixon").unwrap();
        let state = infer(&kb).unwrap();
        let again = introduce_layer(&state, &[]).unwrap();
        assert_eq!(again.h(), state.h());
    }

    #[test]
    fn contradictory_facts_flag_inconsistency() {
        let text = "universe U = { a, b }\nvar v : U\n\
                    fact F1: v is {a}\nfact F2: v is {b}\n";
        let kb = parse_kb(text).unwrap();
        let state = infer(&kb).unwrap();
        assert!(!state.is_consistent());
        assert_eq!(state.inconsistent_since(), Some(0));
        let v = query(&state, "v", None).unwrap();
        assert_eq!(v.classification, Classification::Inconsistent);
        for e in &v.entries {
            assert_eq!(e.classification, Classification::Inconsistent);
        }
    }

    #[test]
    fn disjunct_cap_raises_a_resource_error() {
        let mut kb = KnowledgeBase::builtin("nixon").unwrap();
        let options = crate::kb::Options {
            disjunct_cap: 1,
            ..kb.options().clone()
        };
        kb.set_options(options).unwrap();
        assert!(matches!(infer(&kb), Err(Error::DisjunctCap { .. })));
    }

    #[test]
    fn query_unknown_variable_errors() {
        let kb = KnowledgeBase::builtin("nixon").unwrap();
        let state = infer(&kb).unwrap();
        assert!(matches!(
            query(&state, "senator", None),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn query_against_unconstrained_knowledge_is_unknown() {
        let text = "universe U = { a, b }\nvar v : U\n";
        let kb = parse_kb(text).unwrap();
        let state = infer(&kb).unwrap();
        let u = kb.universes()[0].clone();
        let q = FuzzySet::singleton(u, "a").unwrap();
        let v = query(&state, "v", Some(&q)).unwrap();
        assert_eq!(v.entries[0].possibility, 1.0);
        assert_eq!(v.entries[0].certainty, 0.0);
        assert_eq!(v.classification, Classification::Unknown);
    }
}

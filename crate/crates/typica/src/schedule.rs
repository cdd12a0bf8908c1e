//! Priority scheduling of default rules.
//!
//! Facts are introduced first. Rules are then ordered by two meta-rules:
//! specialization priority (a rule whose antecedent strictly extends
//! another's is introduced earlier) and temporal priority (a rule whose
//! consequent concerns an earlier time is introduced earlier). The rules
//! are layered by longest-path rank over the resulting edge DAG, so
//! incomparable rules are introduced simultaneously.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::kb::{DefaultRule, KnowledgeBase, Literal};

/// Ordered layers of identifiers; layer 0 is the fact set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrioritySchedule {
    layers: Vec<Vec<String>>,
    /// Specialization edges discarded because a temporal edge ran the
    /// other way; surfaced as trace warnings.
    dropped_edges: Vec<(String, String)>,
}

impl PrioritySchedule {
    /// Layer 0 holds fact ids, later layers rule ids, each sorted.
    pub fn layers(&self) -> &[Vec<String>] {
        &self.layers
    }

    pub fn dropped_edges(&self) -> &[(String, String)] {
        &self.dropped_edges
    }

    /// `layer k: {ids}` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, layer) in self.layers.iter().enumerate() {
            out.push_str(&format!("layer {k}: {{{}}}\n", layer.join(", ")));
        }
        out
    }
}

fn literal_in(lit: &Literal, literals: &[Literal]) -> bool {
    literals.iter().any(|l| {
        l.variable().name() == lit.variable().name() && l.set().grades() == lit.set().grades()
    })
}

/// MR-1. Emits `(more_specific, less_specific)` whenever the second rule's
/// antecedent literal set is a strict subset of the first's. Containment is
/// syntactic: same variable, identical set (negation is already normalized
/// away at this point).
pub fn specialization_edges(rules: &[DefaultRule]) -> BTreeSet<(String, String)> {
    let mut edges = BTreeSet::new();
    for specific in rules {
        for general in rules {
            if specific.id == general.id
                || general.antecedent.len() >= specific.antecedent.len()
            {
                continue;
            }
            if general
                .antecedent
                .iter()
                .all(|lit| literal_in(lit, &specific.antecedent))
            {
                edges.insert((specific.id.clone(), general.id.clone()));
            }
        }
    }
    edges
}

/// MR-2. Emits `(earlier, later)` whenever both consequents carry time
/// indices and the first concludes about a strictly earlier time. A rule
/// without a time index participates in no temporal edge.
pub fn temporal_edges(rules: &[DefaultRule]) -> BTreeSet<(String, String)> {
    let mut edges = BTreeSet::new();
    for a in rules {
        for b in rules {
            if a.id == b.id {
                continue;
            }
            if let (Some(ta), Some(tb)) = (a.consequent_time(), b.consequent_time()) {
                if ta < tb {
                    edges.insert((a.id.clone(), b.id.clone()));
                }
            }
        }
    }
    edges
}

/// Build the full schedule: facts in layer 0, rules layered by
/// longest-path rank over the union of the meta-rule edges. Where a
/// temporal edge and a specialization edge disagree on a pair, the
/// temporal edge wins and the specialization edge is dropped.
pub fn build_schedule(kb: &KnowledgeBase) -> Result<PrioritySchedule> {
    let rules = kb.defaults();
    let temporal = temporal_edges(rules);
    let specialization = specialization_edges(rules);

    let mut dropped = Vec::new();
    let mut edges = temporal.clone();
    for (a, b) in specialization {
        if temporal.contains(&(b.clone(), a.clone())) {
            dropped.push((a, b));
        } else {
            edges.insert((a, b));
        }
    }

    let ids: Vec<String> = {
        let mut ids: Vec<String> = rules.iter().map(|r| r.id.clone()).collect();
        ids.sort();
        ids
    };
    let mut incoming: BTreeMap<&str, usize> = ids.iter().map(|id| (id.as_str(), 0)).collect();
    let mut successors: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in &edges {
        *incoming.get_mut(b.as_str()).expect("edge endpoints are rules") += 1;
        successors.entry(a.as_str()).or_default().push(b.as_str());
    }

    // Kahn's algorithm with longest-path ranks.
    let mut rank: BTreeMap<&str, usize> = BTreeMap::new();
    let mut ready: Vec<&str> = ids
        .iter()
        .map(|s| s.as_str())
        .filter(|id| incoming[*id] == 0)
        .collect();
    let mut processed = 0usize;
    while let Some(id) = ready.pop() {
        processed += 1;
        let r = rank.get(id).copied().unwrap_or(0);
        for &next in successors.get(id).map(Vec::as_slice).unwrap_or(&[]) {
            let e = rank.entry(next).or_insert(0);
            *e = (*e).max(r + 1);
            let deg = incoming.get_mut(next).expect("known rule");
            *deg -= 1;
            if *deg == 0 {
                ready.push(next);
            }
        }
        rank.entry(id).or_insert(r);
    }
    if processed < ids.len() {
        return Err(Error::ScheduleCycle {
            cycle: find_cycle(&ids, &edges),
        });
    }

    let mut fact_layer: Vec<String> = kb.facts().iter().map(|f| f.id.clone()).collect();
    fact_layer.sort();
    let mut layers = vec![fact_layer];
    if !ids.is_empty() {
        let depth = rank.values().copied().max().unwrap_or(0);
        for k in 0..=depth {
            let layer: Vec<String> = ids
                .iter()
                .filter(|id| rank[id.as_str()] == k)
                .cloned()
                .collect();
            layers.push(layer);
        }
    }
    Ok(PrioritySchedule {
        layers,
        dropped_edges: dropped,
    })
}

/// Walk the leftover graph and name one cycle.
fn find_cycle(ids: &[String], edges: &BTreeSet<(String, String)>) -> Vec<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }

    fn visit<'a>(
        id: &'a str,
        edges: &'a BTreeSet<(String, String)>,
        color: &mut BTreeMap<&'a str, Color>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        color.insert(id, Color::Gray);
        stack.push(id);
        for (_, next) in edges.iter().filter(|(a, _)| a == id) {
            match color[next.as_str()] {
                Color::Gray => {
                    let start = stack.iter().position(|s| *s == next).expect("on stack");
                    let mut cycle: Vec<String> =
                        stack[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(next.clone());
                    return Some(cycle);
                }
                Color::White => {
                    if let Some(c) = visit(next, edges, color, stack) {
                        return Some(c);
                    }
                }
                Color::Black => {}
            }
        }
        stack.pop();
        color.insert(id, Color::Black);
        None
    }

    let mut color: BTreeMap<&str, Color> = ids.iter().map(|i| (i.as_str(), Color::White)).collect();
    let mut stack: Vec<&str> = Vec::new();
    for id in ids {
        if color[id.as_str()] == Color::White {
            if let Some(cycle) = visit(id, edges, &mut color, &mut stack) {
                return cycle;
            }
        }
    }
    Vec::new()
}

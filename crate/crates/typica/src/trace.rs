//! Text rendering of inference traces and the power-set cross-check.

use crate::engine::{apply_default, KnowledgeState, Verdict};
use crate::error::Result;
use crate::fuzzy::fmt_grade;
use crate::second_order::{default_combine_oracle, star, DEFAULT_ORACLE_LIMIT};

/// One block per layer: the rules introduced, each merged disjunct with
/// its blocked terms, possibility and β values, and the post-layer
/// projection of the knowledge onto every variable.
pub fn render_trace(state: &KnowledgeState) -> String {
    let mut out = String::new();
    out.push_str("schedule:\n");
    for line in state.schedule().render().lines() {
        out.push_str("  ");
        out.push_str(line);
        out.push('\n');
    }
    for (a, b) in state.schedule().dropped_edges() {
        out.push_str(&format!(
            "  warning: specialization edge ({a}, {b}) dropped; temporal priority runs the other way\n"
        ));
    }
    for layer in state.trace() {
        out.push_str(&format!(
            "layer {}: introduce {{{}}}\n",
            layer.index,
            layer.introduced.join(", ")
        ));
        for d in &layer.disjuncts {
            out.push_str(&format!("  disjunct [{}]", d.description));
            if d.blocked.is_empty() {
                out.push_str(": no blocked terms");
            } else {
                for b in &d.blocked {
                    out.push_str(&format!(
                        " {} poss={} beta={}",
                        b.term,
                        fmt_grade(b.possibility),
                        fmt_grade(b.beta)
                    ));
                }
            }
            if d.contributed {
                out.push_str(&format!(" => contributes (beta={})\n", fmt_grade(d.beta)));
            } else {
                out.push_str(" => dropped\n");
            }
        }
        for (name, set) in &layer.projections {
            out.push_str(&format!("  projection {name} = {set}\n"));
        }
        out.push_str(&format!("  height = {}\n", fmt_grade(layer.height_after)));
    }
    if let Some(at) = state.inconsistent_since() {
        out.push_str(&format!("state inconsistent since layer {at}\n"));
    }
    out
}

/// `VAR: CLASS (grades...); projected = {..}`. Refuted elements report
/// their possibility, entailed elements their certainty, and unknown
/// elements both.
pub fn render_verdict(verdict: &Verdict) -> String {
    use crate::engine::Classification::*;
    let mut grades = Vec::new();
    for e in &verdict.entries {
        let name = match &e.label {
            Some(label) => label.clone(),
            None => e.set.to_string(),
        };
        match e.classification {
            Refuted => grades.push(format!("poss({name})={}", fmt_grade(e.possibility))),
            Entailed => grades.push(format!("cert({name})={}", fmt_grade(e.certainty))),
            Unknown | Inconsistent => {
                grades.push(format!("poss({name})={}", fmt_grade(e.possibility)));
                grades.push(format!("cert({name})={}", fmt_grade(e.certainty)));
            }
        }
    }
    format!(
        "{}: {} ({}); projected = {}",
        verdict.variable,
        verdict.classification,
        grades.join(", "),
        verdict.projected
    )
}

/// Outcome of re-deriving effecting steps through the power-set path.
#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// For every effected blocked term whose context projects to a crisp set
/// on a small-enough universe, recompute the β factor as the entry of the
/// starred second-order set at that context, and recompute the combined
/// first-order result through the power-set path. Applicable steps cover
/// every unconditional-default combination the run performed.
pub fn oracle_check(state: &KnowledgeState) -> Result<OracleReport> {
    let mut report = OracleReport::default();
    for layer in state.trace() {
        for d in &layer.disjuncts {
            for b in &d.blocked {
                let var = b.term.consequent().variable();
                if var.universe().len() > DEFAULT_ORACLE_LIMIT {
                    continue;
                }
                let context = d.k.project_set(var.name())?;
                if !context.is_crisp() {
                    continue;
                }
                report.checked += 1;
                let mask: usize = context
                    .grades()
                    .iter()
                    .enumerate()
                    .filter(|(_, &g)| g == 1.0)
                    .map(|(i, _)| 1usize << i)
                    .sum();
                let starred = star(b.term.consequent().set())?;
                if (starred.grade(mask) - b.beta).abs() > 1e-9 {
                    report.mismatches.push(format!(
                        "layer {} [{}] {}: beta {} but star entry {}",
                        layer.index,
                        d.description,
                        b.term,
                        fmt_grade(b.beta),
                        fmt_grade(starred.grade(mask))
                    ));
                    continue;
                }
                let shortcut = apply_default(&context, b.term.consequent().set())?;
                let via_power_set =
                    default_combine_oracle(b.term.consequent().set(), &context)?;
                if !shortcut.approx_eq(&via_power_set, 1e-9) {
                    report.mismatches.push(format!(
                        "layer {} [{}] {}: shortcut {} but power-set path {}",
                        layer.index, d.description, b.term, shortcut, via_power_set
                    ));
                }
            }
        }
    }
    Ok(report)
}

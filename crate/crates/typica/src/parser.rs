//! Line-oriented parser for the rule-base syntax.
//!
//! ```text
//! universe Bool = { true, false }
//! var loaded@1 : Bool
//! fact F1: loaded@1 is {true}
//! default D3: if alive@2 is {true} and shot@2 is {true} and loaded@2 is {true} then alive@3 is {false}
//! default D0: alive@3 is {true}          # unconditional
//! query alive@3
//! ```
//!
//! Fuzzy grades are written `{label/grade, ...}`; omitted labels have grade
//! 0 and a bare `label` means grade 1. A `@N` suffix on a variable name sets
//! its time index. `is not {..}` asserts the pointwise complement.
//! `#` starts a comment; parsing is deterministic and side-effect free.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, Universe};
use crate::kb::{DefaultRule, Fact, KnowledgeBase, Literal, Options};
use crate::relation::Variable;

pub fn parse_kb(text: &str) -> Result<KnowledgeBase> {
    Parser::default().parse(text)
}

#[derive(Default)]
struct Parser {
    universes: Vec<Arc<Universe>>,
    variables: Vec<Variable>,
    facts: Vec<Fact>,
    defaults: Vec<DefaultRule>,
    queries: Vec<String>,
}

/// Cursor over one logical line.
struct Line<'a> {
    text: &'a str,
    number: usize,
    pos: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Line<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.number,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn peek(&mut self, ch: char) -> bool {
        self.skip_ws();
        self.rest().starts_with(ch)
    }

    fn take_punct(&mut self, ch: char) -> bool {
        if self.peek(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, ch: char) -> Result<()> {
        if self.take_punct(ch) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{ch}`")))
        }
    }

    /// Consume `word` only when it ends at an identifier boundary.
    fn take_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with(word)
            && rest[word.len()..]
                .chars()
                .next()
                .is_none_or(|c| !is_ident_char(c))
        {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<()> {
        if self.take_word(word) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{word}`")))
        }
    }

    /// An identifier or label: `[A-Za-z_][A-Za-z0-9_-]*`.
    fn ident(&mut self, what: &str) -> Result<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                is_ident_char(c)
            };
            if !ok {
                break;
            }
            len = i + c.len_utf8();
        }
        if len == 0 {
            return Err(self.err(format!("expected {what}")));
        }
        let out = &rest[..len];
        self.pos += len;
        Ok(out)
    }

    /// Variable name: identifier with an optional `@<integer>` time suffix.
    fn variable_name(&mut self) -> Result<(String, Option<i64>)> {
        let base = self.ident("a variable name")?;
        if self.rest().starts_with('@') {
            self.pos += 1;
            let rest = self.rest();
            let len = rest
                .char_indices()
                .take_while(|(i, c)| c.is_ascii_digit() || (*i == 0 && *c == '-'))
                .count();
            let time: i64 = rest[..len]
                .parse()
                .map_err(|_| self.err("time index must be an integer"))?;
            self.pos += len;
            Ok((format!("{base}@{time}"), Some(time)))
        } else {
            Ok((base.to_string(), None))
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_digit() || *c == '.')
            .count();
        if len == 0 {
            return Err(self.err("expected a grade"));
        }
        let value: f64 = rest[..len]
            .parse()
            .map_err(|_| self.err(format!("`{}` is not a number", &rest[..len])))?;
        self.pos += len;
        Ok(value)
    }
}

impl Parser {
    fn parse(mut self, text: &str) -> Result<KnowledgeBase> {
        for (idx, raw) in text.lines().enumerate() {
            let content = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            if content.trim().is_empty() {
                continue;
            }
            let mut line = Line {
                text: content,
                number: idx + 1,
                pos: 0,
            };
            self.statement(&mut line)?;
            if !line.at_end() {
                return Err(line.err(format!("unexpected trailing input `{}`", line.rest().trim())));
            }
        }
        KnowledgeBase::new(
            self.universes,
            self.variables,
            self.facts,
            self.defaults,
            self.queries,
            Options::default(),
        )
    }

    fn statement(&mut self, line: &mut Line) -> Result<()> {
        if line.take_word("universe") {
            self.universe_decl(line)
        } else if line.take_word("var") {
            self.var_decl(line)
        } else if line.take_word("fact") {
            self.fact_decl(line)
        } else if line.take_word("default") {
            self.default_decl(line)
        } else if line.take_word("query") {
            self.query_decl(line)
        } else {
            Err(line.err("expected `universe`, `var`, `fact`, `default` or `query`"))
        }
    }

    fn universe_decl(&mut self, line: &mut Line) -> Result<()> {
        let name = line.ident("a universe name")?.to_string();
        if self.universes.iter().any(|u| u.name() == name) {
            return Err(line.err(format!("universe `{name}` already declared")));
        }
        line.expect_punct('=')?;
        line.expect_punct('{')?;
        let mut elements = Vec::new();
        loop {
            let label = line.ident("an element label")?.to_string();
            if elements.contains(&label) {
                return Err(line.err(format!("element `{label}` repeated")));
            }
            elements.push(label);
            if line.take_punct(',') {
                continue;
            }
            break;
        }
        line.expect_punct('}')?;
        self.universes
            .push(Universe::new(name, elements).map_err(|e| line.err(e.to_string()))?);
        Ok(())
    }

    fn var_decl(&mut self, line: &mut Line) -> Result<()> {
        let (name, time) = line.variable_name()?;
        if self.variables.iter().any(|v| v.name() == name) {
            return Err(line.err(format!("variable `{name}` already declared")));
        }
        line.expect_punct(':')?;
        let uname = line.ident("a universe name")?;
        let universe = self
            .universes
            .iter()
            .find(|u| u.name() == uname)
            .ok_or_else(|| line.err(format!("unknown universe `{uname}`")))?
            .clone();
        self.variables.push(Variable::new(name, universe, time));
        Ok(())
    }

    fn fact_decl(&mut self, line: &mut Line) -> Result<()> {
        let id = line.ident("a fact identifier")?.to_string();
        self.check_fresh_id(line, &id)?;
        line.expect_punct(':')?;
        let literal = self.literal(line)?;
        self.facts.push(Fact { id, literal });
        Ok(())
    }

    fn default_decl(&mut self, line: &mut Line) -> Result<()> {
        let id = line.ident("a rule identifier")?.to_string();
        self.check_fresh_id(line, &id)?;
        line.expect_punct(':')?;
        let mut antecedent = Vec::new();
        if line.take_word("if") {
            loop {
                antecedent.push(self.literal(line)?);
                if line.take_word("and") {
                    continue;
                }
                break;
            }
            line.expect_word("then")?;
        }
        let consequent = self.literal(line)?;
        self.defaults.push(DefaultRule {
            id,
            antecedent,
            consequent,
        });
        Ok(())
    }

    fn query_decl(&mut self, line: &mut Line) -> Result<()> {
        loop {
            let (name, _) = line.variable_name()?;
            if self.variables.iter().all(|v| v.name() != name) {
                return Err(line.err(format!("unknown variable `{name}`")));
            }
            if !self.queries.contains(&name) {
                self.queries.push(name);
            }
            if line.take_punct(',') {
                continue;
            }
            break;
        }
        Ok(())
    }

    fn check_fresh_id(&self, line: &Line, id: &str) -> Result<()> {
        if self.facts.iter().any(|f| f.id == id) || self.defaults.iter().any(|d| d.id == id) {
            return Err(line.err(format!("identifier `{id}` already used")));
        }
        Ok(())
    }

    fn literal(&mut self, line: &mut Line) -> Result<Literal> {
        let (name, _) = line.variable_name()?;
        let variable = self
            .variables
            .iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| line.err(format!("unknown variable `{name}`")))?
            .clone();
        line.expect_word("is")?;
        let negate = line.take_word("not");
        let set = self.set_expr(line, variable.universe().clone())?;
        let set = if negate { set.complement() } else { set };
        Literal::new(variable, set).map_err(|e| line.err(e.to_string()))
    }

    fn set_expr(&mut self, line: &mut Line, universe: Arc<Universe>) -> Result<FuzzySet> {
        line.expect_punct('{')?;
        let mut grades = vec![0.0; universe.len()];
        if line.take_punct('}') {
            return FuzzySet::new(universe, grades).map_err(|e| line.err(e.to_string()));
        }
        loop {
            let label = line.ident("an element label")?;
            let idx = universe.index_of(label).ok_or_else(|| {
                line.err(format!(
                    "`{label}` is not an element of universe `{}`",
                    universe.name()
                ))
            })?;
            let grade = if line.rest().starts_with('/') {
                line.pos += 1;
                let g = line.number()?;
                if !(0.0..=1.0).contains(&g) {
                    return Err(line.err(format!("grade {g} outside [0,1]")));
                }
                g
            } else {
                1.0
            };
            grades[idx] = grade;
            if line.take_punct(',') {
                continue;
            }
            break;
        }
        line.expect_punct('}')?;
        FuzzySet::new(universe, grades).map_err(|e| line.err(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_an_empty_base() {
        let kb = parse_kb("").unwrap();
        assert!(kb.variables().is_empty());
        assert!(kb.facts().is_empty());
        assert!(kb.defaults().is_empty());
        let kb = parse_kb("# just a comment\n\n").unwrap();
        assert!(kb.universes().is_empty());
    }

    #[test]
    fn parses_the_reference_base() {
        let text = "\
universe Bool = { true, false }
var loaded@1 : Bool
var loaded@2 : Bool
var alive@2  : Bool
var alive@3  : Bool
var shot@2   : Bool
fact F1: loaded@1 is {true}
fact F2: alive@2  is {true}
fact F3: shot@2   is {true}
default D1: if loaded@1 is {true} then loaded@2 is {true}
default D2: if alive@2 is {true} then alive@3 is {true}
default D3: if alive@2 is {true} and shot@2 is {true} and loaded@2 is {true} then alive@3 is {false}
default D4: if alive@2 is {true} and shot@2 is {true} and loaded@2 is {false} then alive@3 is {true}
query alive@3
";
        let kb = parse_kb(text).unwrap();
        assert_eq!(kb.variables().len(), 5);
        assert_eq!(kb.facts().len(), 3);
        assert_eq!(kb.defaults().len(), 4);
        assert_eq!(kb.variable("alive@3").unwrap().time(), Some(3));
        let d3 = kb.rule("D3").unwrap();
        assert_eq!(d3.antecedent.len(), 3);
        assert_eq!(d3.consequent.set().grades(), &[0.0, 1.0]);
    }

    #[test]
    fn grade_out_of_range_is_rejected_with_position() {
        let text = "universe U = { a, b }\nvar v : U\nfact F1: v is {a/1.5}\n";
        match parse_kb(text) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("outside [0,1]"), "{message}");
            }
            other => panic!("expected a grade-range diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn fuzzy_grades_and_bare_labels() {
        let text = "universe U = { a, b, c }\nvar v : U\nfact F1: v is {a/0.25, c}\n";
        let kb = parse_kb(text).unwrap();
        assert_eq!(kb.facts()[0].literal.set().grades(), &[0.25, 0.0, 1.0]);
    }

    #[test]
    fn negated_sets_are_complemented_at_parse_time() {
        let text = "universe U = { a, b }\nvar v : U\nvar w : U\n\
                    default D1: if v is not {a} then w is {b}\n";
        let kb = parse_kb(text).unwrap();
        assert_eq!(kb.defaults()[0].antecedent[0].set().grades(), &[0.0, 1.0]);
    }

    #[test]
    fn unconditional_default() {
        let text = "universe U = { a, b }\nvar v : U\ndefault D0: v is {a}\n";
        let kb = parse_kb(text).unwrap();
        assert!(kb.defaults()[0].antecedent.is_empty());
    }

    #[test]
    fn unknown_names_are_diagnosed() {
        assert!(matches!(
            parse_kb("var v : Nowhere\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_kb("universe U = { a }\nfact F1: v is {a}\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_kb("universe U = { a }\nvar v : U\nquery w\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn duplicate_identifiers_are_diagnosed() {
        let text = "universe U = { a }\nvar v : U\nfact F1: v is {a}\nfact F1: v is {a}\n";
        assert!(matches!(parse_kb(text), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn time_index_must_be_an_integer() {
        let text = "universe U = { a }\nvar v@x : U\n";
        match parse_kb(text) {
            Err(Error::Parse { line: 2, message, .. }) => {
                assert!(message.contains("time index"), "{message}");
            }
            other => panic!("expected time diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let text = "universe U = { a } nonsense\n";
        assert!(matches!(parse_kb(text), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trips_through_to_dsl() {
        for name in KnowledgeBase::BUILTIN_NAMES {
            let kb = KnowledgeBase::builtin(name).unwrap();
            let reparsed = parse_kb(&kb.to_dsl()).unwrap();
            assert_eq!(kb, reparsed, "builtin {name}");
        }
        let text = "universe U = { a, b, c }\nvar v : U\nvar w@2 : U\n\
                    fact F1: v is {a/0.3, b}\n\
                    default D1: if v is {c} then w@2 is {a/0.125}\n\
                    default D2: w@2 is {b}\nquery w@2\n";
        let kb = parse_kb(text).unwrap();
        assert_eq!(parse_kb(&kb.to_dsl()).unwrap(), kb);
    }
}

//! Text formats: formulas, actions, rules and strategies.
//!
//! Every parser reports syntax errors with a line and column. Printing and
//! parsing round-trip: `parse(print(x)) == x`.

mod lexer;
mod print;

use std::collections::BTreeSet;

use thiserror::Error;

pub use lexer::{tokenize, Tok, Token};
pub use print::{actions_to_string, concept_full, fol_full, formula_full};

use crate::graph::{CloneParams, EdgeId, ElementaryAction, NodeId};
use crate::logic::{Concept, Fol, Formula, LogicKind, Role, Term};
use crate::rewrite::{LhsEdge, LhsNode, Rule, RuleError};
use crate::strategy::Strategy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
}

impl ParseError {
    pub fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax { line, col, msg: msg.into() }
    }
}

impl From<RuleError> for ParseError {
    fn from(e: RuleError) -> Self {
        ParseError::Semantic(e.to_string())
    }
}

const KEYWORDS: [&str; 12] =
    ["top", "bot", "not", "or", "and", "exists", "forall", "inv", "U", "Self", "Active", "eps"];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Bound first-order variables, innermost last.
    bound: Vec<String>,
}

impl Parser {
    pub fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: tokenize(text)?, pos: 0, bound: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.toks[self.pos];
        let found = match &t.tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        };
        Err(ParseError::syntax(t.line, t.col, format!("{}, found {found}", msg.into())))
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.at_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.at_kw(k);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), ParseError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(format!("expected `{k}`"))
        }
    }

    /// Any identifier that is not a keyword.
    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn int(&mut self) -> Result<u32, ParseError> {
        match self.peek() {
            Tok::Int(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => self.err("expected a number"),
        }
    }

    pub fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("expected end of input")
        }
    }

    // ----- actions -----

    pub fn action(&mut self) -> Result<ElementaryAction, ParseError> {
        use ElementaryAction as A;
        if matches!(self.peek_at(1), Tok::Sym(">>")) {
            let i = self.name("node name")?;
            self.bump();
            let j = self.name("node name")?;
            return Ok(A::Redirect(i.into(), j.into()));
        }
        let op = self.name("an action")?;
        self.expect_sym("(")?;
        let out = match op.as_str() {
            "cl" => {
                let i = self.name("node name")?;
                self.expect_sym(",")?;
                let j = self.name("node name")?;
                let mut sets: Vec<BTreeSet<String>> = Vec::new();
                for _ in 0..5 {
                    self.expect_sym(",")?;
                    sets.push(self.role_set()?);
                }
                let mut it = sets.into_iter();
                let mut next = || it.next().expect("five sets");
                let p = CloneParams { r_in: next(), r_out: next(), r_l_in: next(), r_l_out: next(), r_l_l: next() };
                A::Clone(i.into(), j.into(), p)
            }
            _ => {
                let mut args = vec![self.name("an argument")?];
                while self.eat_sym(",") {
                    args.push(self.name("an argument")?);
                }
                let arity = args.len();
                let mut a = args.into_iter();
                let mut n = || a.next().expect("arity checked");
                match (op.as_str(), arity) {
                    ("add_N", 1) => A::AddNode(n().into()),
                    ("del_N", 1) => A::DelNode(n().into()),
                    ("add_C", 2) => A::AddConcept(n().into(), n()),
                    ("del_C", 2) => A::DelConcept(n().into(), n()),
                    ("add_E", 3) => A::AddEdge { id: None, src: n().into(), tgt: n().into(), role: n() },
                    ("add_E", 4) => A::AddEdge {
                        id: Some(EdgeId(n())),
                        src: n().into(),
                        tgt: n().into(),
                        role: n(),
                    },
                    ("del_E", 1) => A::DelEdgeId(EdgeId(n())),
                    ("del_E", 3) => A::DelEdge { src: n().into(), tgt: n().into(), role: n() },
                    ("mrg", 2) => A::Merge(n().into(), n().into()),
                    _ => return self.err(format!("`{op}` does not take {arity} arguments")),
                }
            }
        };
        self.expect_sym(")")?;
        Ok(out)
    }

    fn role_set(&mut self) -> Result<BTreeSet<String>, ParseError> {
        self.expect_sym("{")?;
        let mut out = BTreeSet::new();
        if !self.at_sym("}") {
            out.insert(self.name("role name")?);
            while self.eat_sym(",") {
                out.insert(self.name("role name")?);
            }
        }
        self.expect_sym("}")?;
        Ok(out)
    }

    /// Actions separated by `;`, possibly none when `closer` follows.
    pub fn actions(&mut self, closer: Option<&str>) -> Result<Vec<ElementaryAction>, ParseError> {
        let mut out = Vec::new();
        if closer.is_some_and(|c| self.at_sym(c)) {
            return Ok(out);
        }
        out.push(self.action()?);
        while self.eat_sym(";") {
            if closer.is_some_and(|c| self.at_sym(c)) || self.at_end() {
                break;
            }
            out.push(self.action()?);
        }
        Ok(out)
    }

    /// `[a1; ...; an]` suffixes: `φ[a1; a2]` is `φ[a2][a1]`.
    fn subst_suffixes<F>(&mut self, mut f: F, wrap: impl Fn(F, ElementaryAction) -> F) -> Result<F, ParseError> {
        while self.eat_sym("[") {
            let alpha = self.actions(None)?;
            self.expect_sym("]")?;
            for a in alpha.into_iter().rev() {
                f = wrap(f, a);
            }
        }
        Ok(f)
    }

    // ----- concepts -----

    pub fn role(&mut self) -> Result<Role, ParseError> {
        if self.eat_kw("U") {
            return Ok(Role::Universal);
        }
        if self.eat_kw("inv") {
            return Ok(Role::Inverse(self.name("role name")?));
        }
        Ok(Role::Basic(self.name("role name")?))
    }

    pub fn concept(&mut self) -> Result<Concept, ParseError> {
        let lhs = self.concept_or()?;
        if self.eat_sym("=>") {
            return Ok(Concept::implies(lhs, self.concept()?));
        }
        Ok(lhs)
    }

    fn concept_or(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.concept_and()?;
        while self.eat_kw("or") {
            c = Concept::or(c, self.concept_and()?);
        }
        Ok(c)
    }

    fn concept_and(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.concept_unary()?;
        while self.eat_kw("and") {
            c = Concept::and(c, self.concept_unary()?);
        }
        Ok(c)
    }

    fn concept_unary(&mut self) -> Result<Concept, ParseError> {
        if self.eat_kw("not") {
            return Ok(Concept::not(self.concept_unary()?));
        }
        for (kw, universal) in [("exists", false), ("forall", true)] {
            if self.eat_kw(kw) {
                let r = self.role()?;
                self.expect_sym(".")?;
                if !universal && self.eat_kw("Self") {
                    return Ok(Concept::ExistsSelf(r));
                }
                let body = self.concept_unary()?;
                return Ok(if universal { Concept::forall(r, body) } else { Concept::exists(r, body) });
            }
        }
        let atom = self.concept_atom()?;
        self.subst_suffixes(atom, Concept::subst)
    }

    fn concept_atom(&mut self) -> Result<Concept, ParseError> {
        if self.eat_kw("top") {
            return Ok(Concept::Top);
        }
        if self.eat_kw("bot") {
            return Ok(Concept::bot());
        }
        if self.eat_kw("Active") {
            return Ok(Concept::Active);
        }
        if self.eat_sym("{") {
            let n = self.name("node name")?;
            self.expect_sym("}")?;
            return Ok(Concept::Nominal(n.into()));
        }
        if self.eat_sym("(") {
            let counting = ["<", "<=", ">", ">="].into_iter().find(|s| self.at_sym(s));
            let c = match counting {
                Some(op) => {
                    self.bump();
                    let n = self.int()?;
                    let r = self.role()?;
                    let body = self.concept()?;
                    match op {
                        "<" => Concept::lt(n, r, body),
                        "<=" => Concept::lt(n + 1, r, body),
                        ">" => Concept::ge(n + 1, r, body),
                        _ => Concept::ge(n, r, body),
                    }
                }
                None => self.concept()?,
            };
            self.expect_sym(")")?;
            return Ok(c);
        }
        Ok(Concept::Atomic(self.name("a concept")?))
    }

    // ----- first-order formulas -----

    pub fn fol(&mut self) -> Result<Fol, ParseError> {
        let lhs = self.fol_or()?;
        if self.eat_sym("=>") {
            return Ok(Fol::implies(lhs, self.fol()?));
        }
        Ok(lhs)
    }

    fn fol_or(&mut self) -> Result<Fol, ParseError> {
        let mut f = self.fol_and()?;
        while self.eat_kw("or") {
            f = Fol::or(f, self.fol_and()?);
        }
        Ok(f)
    }

    fn fol_and(&mut self) -> Result<Fol, ParseError> {
        let mut f = self.fol_unary()?;
        while self.eat_kw("and") {
            f = Fol::and(f, self.fol_unary()?);
        }
        Ok(f)
    }

    fn fol_unary(&mut self) -> Result<Fol, ParseError> {
        if self.eat_kw("not") {
            return Ok(Fol::not(self.fol_unary()?));
        }
        for (kw, universal) in [("exists", false), ("forall", true)] {
            if self.eat_kw(kw) {
                let mut vars = vec![self.name("variable")?];
                while self.eat_sym(",") {
                    vars.push(self.name("variable")?);
                }
                self.expect_sym(".")?;
                let depth = self.bound.len();
                self.bound.extend(vars.iter().cloned());
                let body = self.fol_unary();
                self.bound.truncate(depth);
                let mut f = body?;
                for x in vars.iter().rev() {
                    f = if universal { Fol::forall(x, f) } else { Fol::exists(x, f) };
                }
                return Ok(f);
            }
        }
        let atom = self.fol_atom()?;
        self.subst_suffixes(atom, Fol::subst)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let n = self.name("a term")?;
        Ok(if self.bound.contains(&n) { Term::Var(n) } else { Term::Const(n.into()) })
    }

    fn fol_atom(&mut self) -> Result<Fol, ParseError> {
        if self.eat_kw("top") {
            return Ok(Fol::Top);
        }
        if self.eat_kw("bot") {
            return Ok(Fol::bot());
        }
        if self.eat_sym("(") {
            let f = self.fol()?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        if self.eat_kw("Active") {
            self.expect_sym("(")?;
            let t = self.term()?;
            self.expect_sym(")")?;
            return Ok(Fol::Active(t));
        }
        if matches!(self.peek_at(1), Tok::Sym("(")) {
            let p = self.name("a predicate")?;
            self.bump();
            let s = self.term()?;
            let out = if self.eat_sym(",") {
                Fol::Role(p, s, self.term()?)
            } else {
                Fol::Concept(p, s)
            };
            self.expect_sym(")")?;
            return Ok(out);
        }
        let a = self.term()?;
        if self.eat_sym("=") {
            return Ok(Fol::Eq(a, self.term()?));
        }
        if self.eat_sym("!=") {
            return Ok(Fol::neq(a, self.term()?));
        }
        self.err("expected `=` or `!=` after a term")
    }

    pub fn formula(&mut self, kind: LogicKind) -> Result<Formula, ParseError> {
        Ok(match kind {
            LogicKind::Dl => Formula::Dl(self.concept()?),
            LogicKind::Fol => Formula::Fol(self.fol()?),
        })
    }

    // ----- rules -----

    fn label(&mut self) -> Result<Concept, ParseError> {
        if let Tok::Str(s) = self.peek() {
            let s = s.clone();
            let t = &self.toks[self.pos];
            let (line, col) = (t.line, t.col);
            self.bump();
            return parse_concept(&s).map_err(|e| match e {
                ParseError::Syntax { msg, .. } => {
                    ParseError::syntax(line, col, format!("in label \"{s}\": {msg}"))
                }
                other => other,
            });
        }
        self.concept()
    }

    pub fn rule(&mut self) -> Result<Rule, ParseError> {
        self.expect_kw("rule")?;
        let name = self.name("rule name")?;
        self.expect_sym("{")?;
        self.expect_kw("lhs")?;
        self.expect_sym("{")?;
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        if self.eat_kw("nodes") {
            self.expect_sym(":")?;
            while !self.at_sym(";") && !self.at_sym("}") && !self.at_kw("edges") {
                let id = self.name("node name")?;
                let mut labels = Vec::new();
                if self.eat_sym("[") {
                    if !self.at_sym("]") {
                        labels.push(self.label()?);
                        while self.eat_sym(",") {
                            labels.push(self.label()?);
                        }
                    }
                    self.expect_sym("]")?;
                }
                nodes.push(LhsNode { id: id.into(), labels });
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.eat_sym(";");
        }
        if self.eat_kw("edges") {
            self.expect_sym(":")?;
            while !self.at_sym(";") && !self.at_sym("}") {
                let src = self.name("node name")?;
                self.expect_sym("-")?;
                let role = self.name("role name")?;
                self.expect_sym("->")?;
                let tgt = self.name("node name")?;
                let id = EdgeId(format!("l{}", edges.len()));
                edges.push(LhsEdge { id, src: src.into(), tgt: tgt.into(), role });
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.eat_sym(";");
        }
        self.expect_sym("}")?;
        self.expect_kw("rhs")?;
        self.expect_sym("{")?;
        let rhs = self.actions(Some("}"))?;
        self.expect_sym("}")?;
        self.expect_sym("}")?;
        Ok(Rule::new(name, nodes, edges, rhs)?)
    }

    // ----- strategies -----

    pub fn strategy(&mut self, kind: LogicKind) -> Result<Strategy, ParseError> {
        let lhs = self.strategy_seq(kind)?;
        if self.eat_sym("+") {
            return Ok(Strategy::choice(lhs, self.strategy(kind)?));
        }
        Ok(lhs)
    }

    fn strategy_seq(&mut self, kind: LogicKind) -> Result<Strategy, ParseError> {
        let lhs = self.strategy_post(kind)?;
        if self.eat_sym(";") {
            return Ok(Strategy::seq(lhs, self.strategy_seq(kind)?));
        }
        Ok(lhs)
    }

    fn strategy_post(&mut self, kind: LogicKind) -> Result<Strategy, ParseError> {
        let mut s = if self.eat_kw("eps") {
            Strategy::Empty
        } else if self.eat_sym("(") {
            let s = self.strategy(kind)?;
            self.expect_sym(")")?;
            s
        } else {
            let r = self.name("a rule name")?;
            if self.eat_sym("?") {
                Strategy::Try(r)
            } else if self.eat_sym("!") {
                Strategy::Must(r)
            } else {
                Strategy::Rule(r)
            }
        };
        while self.eat_sym("*") {
            let inv = if self.at_sym("{") && matches!(self.peek_at(1), Tok::Ident(k) if k == "inv") {
                self.bump();
                self.bump();
                self.expect_sym(":")?;
                let f = self.formula(kind)?;
                self.expect_sym("}")?;
                Some(f)
            } else {
                None
            };
            s = Strategy::closure(s, inv);
        }
        Ok(s)
    }
}

fn whole<T>(text: &str, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(text)?;
    let out = f(&mut p)?;
    p.expect_end()?;
    Ok(out)
}

pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    whole(text, |p| p.concept())
}

pub fn parse_fol(text: &str) -> Result<Fol, ParseError> {
    whole(text, |p| p.fol())
}

pub fn parse_formula(text: &str, kind: LogicKind) -> Result<Formula, ParseError> {
    whole(text, |p| p.formula(kind))
}

pub fn parse_role(text: &str) -> Result<Role, ParseError> {
    whole(text, |p| p.role())
}

pub fn parse_action(text: &str) -> Result<ElementaryAction, ParseError> {
    whole(text, |p| p.action())
}

/// Actions separated by `;`; empty text is the empty sequence.
pub fn parse_actions(text: &str) -> Result<Vec<ElementaryAction>, ParseError> {
    whole(text, |p| if p.at_end() { Ok(Vec::new()) } else { p.actions(None) })
}

pub fn parse_rules(text: &str) -> Result<Vec<Rule>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out: Vec<Rule> = Vec::new();
    while !p.at_end() {
        let r = p.rule()?;
        if out.iter().any(|q| q.name == r.name) {
            return Err(ParseError::Semantic(format!("rule `{}` defined twice", r.name)));
        }
        out.push(r);
    }
    Ok(out)
}

pub fn parse_strategy(text: &str, kind: LogicKind) -> Result<Strategy, ParseError> {
    whole(text, |p| p.strategy(kind))
}

/// One formula per non-blank line; `#` starts a comment.
pub fn parse_formula_lines(text: &str, kind: LogicKind) -> Result<Vec<Formula>, ParseError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_formula(body, kind).map_err(|e| match e {
            ParseError::Syntax { col, msg, .. } => ParseError::syntax(k + 1, col, msg),
            other => other,
        })?);
    }
    Ok(out)
}

/// Names a formula uses that the alphabet does not declare.
pub fn unknown_names(f: &Formula, alphabet: &crate::graph::Alphabet) -> Vec<String> {
    let (concepts, roles) = match f {
        Formula::Dl(c) => (c.concept_names(), c.role_names()),
        Formula::Fol(g) => (g.concept_names(), g.role_names()),
    };
    let mut out: Vec<String> = concepts.into_iter().filter(|c| !alphabet.has_concept(c)).collect();
    out.extend(roles.into_iter().filter(|r| !alphabet.has_role(r)));
    out
}

pub fn node_id(s: &str) -> NodeId {
    NodeId::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_with_inverse_role() {
        let c = parse_concept("(< 2 inv C2P top)").unwrap();
        assert_eq!(c, Concept::lt(2, Role::inverse("C2P"), Concept::Top));
        assert_eq!(c.to_string(), "(< 2 inv C2P top)");
    }

    #[test]
    fn universal_existential_fragment() {
        let c = parse_concept("exists U . (Client and exists Request . Proxy)").unwrap();
        let expected = Concept::exists(
            Role::Universal,
            Concept::and(Concept::atomic("Client"), Concept::exists(Role::basic("Request"), Concept::atomic("Proxy"))),
        );
        assert_eq!(c, expected);
        assert_eq!(c.to_string(), "exists U . (Client and exists Request . Proxy)");
    }

    #[test]
    fn sugar_for_counting_bounds() {
        assert_eq!(parse_concept("(<= 1 r A)").unwrap(), parse_concept("(< 2 r A)").unwrap());
        assert_eq!(parse_concept("(> 1 r A)").unwrap(), parse_concept("(>= 2 r A)").unwrap());
    }

    #[test]
    fn substitution_suffix_order() {
        let c = parse_concept("A[add_C(i,A); del_N(j)]").unwrap();
        let inner = Concept::subst(Concept::atomic("A"), ElementaryAction::DelNode("j".into()));
        assert_eq!(c, Concept::subst(inner, ElementaryAction::AddConcept("i".into(), "A".into())));
        assert_eq!(parse_concept(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn fol_variables_and_constants() {
        let f = parse_fol("exists x, y . (r(x, y) and x != c)").unwrap();
        let body = Fol::and(Fol::role("r", Term::var("x"), Term::var("y")), Fol::neq(Term::var("x"), Term::cst("c")));
        assert_eq!(f, Fol::exists("x", Fol::exists("y", body)));
        assert_eq!(f.to_string(), "exists x, y . (r(x,y) and x != c)");
        assert_eq!(parse_fol(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn actions_round_trip() {
        let text = "add_N(k); del_N(i); add_C(i,A); del_C(i,A); add_E(i,j,r); add_E(e9,i,j,r); \
                    del_E(i,j,r); del_E(e1); i >> j; mrg(i,j); cl(i,k,{r,s},{},{s},{},{r})";
        let alpha = parse_actions(text).unwrap();
        assert_eq!(alpha.len(), 11);
        assert_eq!(parse_actions(&actions_to_string(&alpha)).unwrap(), alpha);
        assert!(parse_actions("").unwrap().is_empty());
    }

    #[test]
    fn rule_file_round_trip() {
        let text = r#"rule r0 { lhs { nodes: i [Client], j ["Proxy and (< 2 inv C2P top)"]; edges: i -Request-> j }
                                rhs { del_E(i,j,Request); add_E(i,j,C2P) } }"#;
        let rules = parse_rules(text).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].nodes[1].labels[0], parse_concept("Proxy and (< 2 inv C2P top)").unwrap());
        assert_eq!(parse_rules(&rules[0].to_string()).unwrap(), rules);
        assert!(parse_rules("").unwrap().is_empty());
    }

    #[test]
    fn strategy_precedence_and_invariant() {
        let s = parse_strategy("r0; r1? + r2!*", LogicKind::Dl).unwrap();
        let expected = Strategy::choice(
            Strategy::seq(Strategy::rule("r0"), Strategy::Try("r1".into())),
            Strategy::closure(Strategy::Must("r2".into()), None),
        );
        assert_eq!(s, expected);
        let t = parse_strategy("(r0 + r1)* {inv: forall U . A}", LogicKind::Dl).unwrap();
        assert_eq!(parse_strategy(&t.to_string(), LogicKind::Dl).unwrap(), t);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_concept("A and\n  (< x r B)") {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 6)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_rules("rule a { lhs { } rhs { } } rule a { lhs { } rhs { } }"), Err(ParseError::Semantic(_))));
    }

    #[test]
    fn full_parenthesization() {
        let c = parse_concept("A or B and not C").unwrap();
        assert_eq!(c.to_string(), "A or B and not C");
        assert_eq!(concept_full(&c), "A or (B and (not C))");
        assert_eq!(parse_concept(&concept_full(&c)).unwrap(), c);
    }
}

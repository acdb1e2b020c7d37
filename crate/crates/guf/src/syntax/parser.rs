//! Parser for the ASCII formula grammar.
//!
//! Grammar: `true`, `false`, `R(x,y)`, `x = y`, `!f`, `f & g`, `f | g`,
//! `f -> g`, `f <-> g`, `exists x y. (f)`, `forall x y. (f)`. `&` binds
//! tighter than `|`, which binds tighter than `->`/`<->`; `->` and `<->`
//! associate to the right. A quantifier scope is the parenthesized group;
//! as a convenience a single unparenthesized primary (such as the body of
//! `exists z. S(x,w,z)`) is also accepted.
//!
//! Guard detection is content-based: within a quantified conjunction the
//! first atomic conjunct whose variables cover all free variables of the
//! matrix and all bound variables becomes the guard. Equality atoms are not
//! guard candidates. Universal blocks must be written `forall ys. (a -> f)`
//! with an atomic antecedent serving as the guard.

use std::fmt;

use thiserror::Error;

use super::ast::{Atom, Formula, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("guard violation at {pos}: {message}")]
    GuardViolation { pos: Pos, message: String },
    #[error("relation {name} used with arities {first} and {second}")]
    ArityConflict { name: String, first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Exists,
    Forall,
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Equals,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::True => "true",
            Tok::False => "false",
            Tok::Exists => "exists",
            Tok::Forall => "forall",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::Equals => "=",
        };
        write!(f, "`{s}`")
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' | ')' | ',' | '.' | '!' | '&' | '|' | '=' => {
                chars.next();
                col += 1;
                out.push((
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        '.' => Tok::Dot,
                        '!' => Tok::Bang,
                        '&' => Tok::Amp,
                        '|' => Tok::Pipe,
                        _ => Tok::Equals,
                    },
                    pos,
                ));
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    out.push((Tok::Arrow, pos));
                } else {
                    return Err(ParseError::Syntax {
                        pos,
                        message: "expected `->`".to_string(),
                    });
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    chars.next();
                    col += 1;
                    if chars.peek() == Some(&'>') {
                        chars.next();
                        col += 1;
                        out.push((Tok::DArrow, pos));
                    } else {
                        return Err(ParseError::Syntax {
                            pos,
                            message: "expected `<->`".to_string(),
                        });
                    }
                } else {
                    return Err(ParseError::Syntax {
                        pos,
                        message: "expected `<->`".to_string(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let tok = match name.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    _ => Tok::Ident(name),
                };
                out.push((tok, pos));
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(out)
}

/// Surface expression, before implication desugaring and guard selection.
#[derive(Debug, Clone)]
enum SExpr {
    True,
    False,
    Atom(String, Vec<String>),
    Eq(String, String),
    Not(Box<SExpr>),
    And(Box<SExpr>, Box<SExpr>),
    Or(Box<SExpr>, Box<SExpr>),
    Imp(Box<SExpr>, Box<SExpr>),
    Iff(Box<SExpr>, Box<SExpr>),
    Exists(Vec<String>, Box<SExpr>, Pos),
    Forall(Vec<String>, Box<SExpr>, Pos),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            got => Err(ParseError::Syntax {
                pos: self.prev_pos(),
                message: match got {
                    Some(t) => format!("expected {want}, found {t}"),
                    None => format!("expected {want}, found end of input"),
                },
            }),
        }
    }

    fn prev_pos(&self) -> Pos {
        if self.at == 0 {
            self.pos()
        } else {
            self.toks
                .get(self.at - 1)
                .map(|&(_, p)| p)
                .unwrap_or(self.end)
        }
    }

    // iff := imp (`<->` imp)*   (right associative)
    fn formula(&mut self) -> Result<SExpr, ParseError> {
        let lhs = self.implication()?;
        if self.peek() == Some(&Tok::DArrow) {
            self.next();
            let rhs = self.formula()?;
            Ok(SExpr::Iff(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> Result<SExpr, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.next();
            let rhs = self.implication()?;
            Ok(SExpr::Imp(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<SExpr, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.next();
            let rhs = self.conjunction()?;
            lhs = SExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<SExpr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.next();
            let rhs = self.unary()?;
            lhs = SExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<SExpr, ParseError> {
        if self.peek() == Some(&Tok::Bang) {
            self.next();
            Ok(SExpr::Not(Box::new(self.unary()?)))
        } else {
            self.primary()
        }
    }

    fn quantifier_vars(&mut self) -> Result<Vec<String>, ParseError> {
        let mut vars = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) => {
                    if let Some(Tok::Ident(name)) = self.next() {
                        if vars.contains(&name) {
                            return Err(ParseError::Syntax {
                                pos: self.prev_pos(),
                                message: format!("duplicate bound variable `{name}`"),
                            });
                        }
                        vars.push(name);
                    }
                }
                Some(Tok::Dot) => {
                    self.next();
                    break;
                }
                _ => {
                    return Err(ParseError::Syntax {
                        pos: self.pos(),
                        message: "expected bound variable or `.`".to_string(),
                    });
                }
            }
        }
        if vars.is_empty() {
            return Err(ParseError::Syntax {
                pos: self.prev_pos(),
                message: "quantifier binds no variables".to_string(),
            });
        }
        Ok(vars)
    }

    /// Quantifier scope: a parenthesized formula, or a single primary.
    fn quantifier_body(&mut self) -> Result<SExpr, ParseError> {
        if self.peek() == Some(&Tok::LParen) {
            self.next();
            let body = self.formula()?;
            self.expect(Tok::RParen)?;
            Ok(body)
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<SExpr, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::True) => Ok(SExpr::True),
            Some(Tok::False) => Ok(SExpr::False),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Exists) => {
                let vars = self.quantifier_vars()?;
                let body = self.quantifier_body()?;
                Ok(SExpr::Exists(vars, Box::new(body), pos))
            }
            Some(Tok::Forall) => {
                let vars = self.quantifier_vars()?;
                let body = self.quantifier_body()?;
                Ok(SExpr::Forall(vars, Box::new(body), pos))
            }
            Some(Tok::Ident(name)) => match self.peek() {
                Some(Tok::LParen) => {
                    self.next();
                    let mut args = Vec::new();
                    loop {
                        match self.next() {
                            Some(Tok::Ident(a)) => args.push(a),
                            other => {
                                return Err(ParseError::Syntax {
                                    pos: self.prev_pos(),
                                    message: match other {
                                        Some(t) => format!("expected variable, found {t}"),
                                        None => "expected variable".to_string(),
                                    },
                                });
                            }
                        }
                        match self.next() {
                            Some(Tok::Comma) => continue,
                            Some(Tok::RParen) => break,
                            other => {
                                return Err(ParseError::Syntax {
                                    pos: self.prev_pos(),
                                    message: match other {
                                        Some(t) => format!("expected `,` or `)`, found {t}"),
                                        None => "expected `,` or `)`".to_string(),
                                    },
                                });
                            }
                        }
                    }
                    Ok(SExpr::Atom(name, args))
                }
                Some(Tok::Equals) => {
                    self.next();
                    match self.next() {
                        Some(Tok::Ident(rhs)) => Ok(SExpr::Eq(name, rhs)),
                        other => Err(ParseError::Syntax {
                            pos: self.prev_pos(),
                            message: match other {
                                Some(t) => format!("expected variable after `=`, found {t}"),
                                None => "expected variable after `=`".to_string(),
                            },
                        }),
                    }
                }
                _ => Err(ParseError::Syntax {
                    pos,
                    message: format!(
                        "bare variable `{name}` is not a formula; expected `(` or `=`"
                    ),
                }),
            },
            Some(t) => Err(ParseError::Syntax {
                pos,
                message: format!("unexpected {t}"),
            }),
            None => Err(ParseError::Syntax {
                pos,
                message: "unexpected end of input".to_string(),
            }),
        }
    }
}

/// Lowers a surface expression, desugaring `->`/`<->` and selecting guards.
/// With `strict` set, unguardable quantifier blocks are an error; otherwise
/// they lower to raw blocks.
fn lower(e: &SExpr, strict: bool) -> Result<Formula, ParseError> {
    match e {
        SExpr::True => Ok(Formula::True),
        SExpr::False => Ok(Formula::False),
        SExpr::Atom(r, args) => Ok(Formula::Atom(Atom::new(
            r.clone(),
            args.iter().map(Var::new).collect(),
        ))),
        SExpr::Eq(x, y) => Ok(Formula::Eq(Var::new(x.clone()), Var::new(y.clone()))),
        SExpr::Not(f) => Ok(Formula::not(lower(f, strict)?)),
        SExpr::And(l, r) => Ok(Formula::and(lower(l, strict)?, lower(r, strict)?)),
        SExpr::Or(l, r) => Ok(Formula::or(lower(l, strict)?, lower(r, strict)?)),
        SExpr::Imp(l, r) => Ok(Formula::implies(lower(l, strict)?, lower(r, strict)?)),
        SExpr::Iff(l, r) => {
            let l = lower(l, strict)?;
            let r = lower(r, strict)?;
            Ok(Formula::and(
                Formula::implies(l.clone(), r.clone()),
                Formula::implies(r, l),
            ))
        }
        SExpr::Exists(vars, body, pos) => {
            let bound: Vec<Var> = vars.iter().map(Var::new).collect();
            let conjuncts = flatten_surface_conjunction(body);
            let lowered: Vec<Formula> = conjuncts
                .iter()
                .map(|c| lower(c, strict))
                .collect::<Result<_, _>>()?;
            let mut needed: std::collections::BTreeSet<Var> = bound.iter().cloned().collect();
            for c in &lowered {
                needed.extend(c.free_variables());
            }
            let guard_idx = lowered.iter().position(|c| match c {
                Formula::Atom(a) => needed.is_subset(&a.variables()),
                _ => false,
            });
            match guard_idx {
                Some(i) => {
                    let guard = match &lowered[i] {
                        Formula::Atom(a) => a.clone(),
                        _ => unreachable!(),
                    };
                    let rest: Vec<Formula> = lowered
                        .into_iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, c)| c)
                        .collect();
                    Ok(Formula::exists(bound, guard, Formula::conjoin(rest)))
                }
                None if strict => Err(ParseError::GuardViolation {
                    pos: *pos,
                    message: format!(
                        "no atomic conjunct covers the variables {}",
                        needed
                            .iter()
                            .map(|v| v.name().to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                }),
                None => Ok(Formula::RawExists(
                    bound,
                    Box::new(Formula::conjoin(lowered)),
                )),
            }
        }
        SExpr::Forall(vars, body, pos) => {
            let bound: Vec<Var> = vars.iter().map(Var::new).collect();
            if let SExpr::Imp(lhs, rhs) = body.as_ref() {
                let lhs = lower(lhs, strict)?;
                let rhs = lower(rhs, strict)?;
                if let Formula::Atom(a) = &lhs {
                    let mut needed: std::collections::BTreeSet<Var> =
                        bound.iter().cloned().collect();
                    needed.extend(rhs.free_variables());
                    if needed.is_subset(&a.variables()) {
                        return Ok(Formula::forall(bound, a.clone(), rhs));
                    }
                }
                if strict {
                    return Err(ParseError::GuardViolation {
                        pos: *pos,
                        message: "universal block needs an atomic antecedent covering \
                                  all bound and free variables"
                            .to_string(),
                    });
                }
                return Ok(Formula::RawForall(
                    bound,
                    Box::new(Formula::implies(lhs, rhs)),
                ));
            }
            if strict {
                Err(ParseError::GuardViolation {
                    pos: *pos,
                    message: "universal block must have the form `forall ys. (guard -> body)`"
                        .to_string(),
                })
            } else {
                Ok(Formula::RawForall(bound, Box::new(lower(body, strict)?)))
            }
        }
    }
}

fn flatten_surface_conjunction(e: &SExpr) -> Vec<&SExpr> {
    let mut out = Vec::new();
    fn walk<'a>(e: &'a SExpr, out: &mut Vec<&'a SExpr>) {
        match e {
            SExpr::And(l, r) => {
                walk(l, out);
                out.push(r);
            }
            other => out.push(other),
        }
    }
    walk(e, &mut out);
    out
}

fn parse_with(text: &str, strict: bool) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let end = toks
        .last()
        .map(|&(_, p)| Pos { line: p.line, col: p.col + 1 })
        .unwrap_or(Pos { line: 1, col: 1 });
    let mut p = Parser { toks, at: 0, end };
    let e = p.formula()?;
    if p.at != p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            message: "trailing input after formula".to_string(),
        });
    }
    let f = lower(&e, strict)?;
    f.vocabulary().map_err(|e| match e {
        super::ast::VocabularyError::ArityConflict(name, first, second) => {
            ParseError::ArityConflict { name, first, second }
        }
        super::ast::VocabularyError::ZeroArity(name) => ParseError::Syntax {
            pos: Pos { line: 1, col: 1 },
            message: format!("relation {name} has arity 0"),
        },
    })?;
    Ok(f)
}

/// Parses a guarded formula; quantifier blocks without a usable guard are an
/// error.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, true)
}

/// Parses a formula, lowering unguardable quantifier blocks to raw blocks so
/// that classification can report on them.
pub fn parse_lenient(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ast::var;

    fn atom(rel: &str, vars: &[&str]) -> Atom {
        Atom::new(rel, vars.iter().map(|v| var(v)).collect())
    }

    #[test]
    fn parse_simple_guarded_block() {
        let f = parse("exists x y. (R(x,y) & P(x))").unwrap();
        assert_eq!(
            f,
            Formula::exists(
                vec![var("x"), var("y")],
                atom("R", &["x", "y"]),
                Formula::Atom(atom("P", &["x"])),
            )
        );
    }

    #[test]
    fn parse_proposition_phi() {
        // The guard is the ternary atom; the binary atoms stay in the body.
        let f = parse("exists x y z. (G(x,y,z) & R(x,y) & R(y,z) & R(z,x))").unwrap();
        match &f {
            Formula::Exists(g) => {
                assert_eq!(g.guard, atom("G", &["x", "y", "z"]));
                assert_eq!(Formula::conjuncts(&g.body).len(), 3);
            }
            other => panic!("expected guarded block, got {other:?}"),
        }
    }

    #[test]
    fn guard_violation_is_reported() {
        let err = parse("exists x y w. (R(x,y) & exists z. S(x,w,z))").unwrap_err();
        assert!(matches!(err, ParseError::GuardViolation { .. }));
        let f = parse_lenient("exists x y w. (R(x,y) & exists z. S(x,w,z))").unwrap();
        assert!(matches!(f, Formula::RawExists(_, _)));
    }

    #[test]
    fn guard_may_appear_after_other_conjuncts() {
        let f = parse("exists x y. (P(x) & R(x,y))").unwrap();
        match &f {
            Formula::Exists(g) => {
                assert_eq!(g.guard, atom("R", &["x", "y"]));
                assert_eq!(*g.body, Formula::Atom(atom("P", &["x"])));
            }
            other => panic!("expected guarded block, got {other:?}"),
        }
    }

    #[test]
    fn equality_is_not_a_guard() {
        assert!(parse("exists x y. (x = y & P(x))").is_err());
    }

    #[test]
    fn forall_requires_implication_shape() {
        let f = parse("forall x y. (R(x,y) -> P(x))").unwrap();
        assert_eq!(
            f,
            Formula::forall(
                vec![var("x"), var("y")],
                atom("R", &["x", "y"]),
                Formula::Atom(atom("P", &["x"])),
            )
        );
        assert!(parse("forall x. (P(x))").is_err());
    }

    #[test]
    fn implication_and_biconditional_desugar() {
        let f = parse("P(x) -> Q(x)").unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::not(Formula::Atom(atom("P", &["x"]))),
                Formula::Atom(atom("Q", &["x"]))
            )
        );
    }

    #[test]
    fn unparenthesized_quantifier_body_is_a_single_primary() {
        let f = parse("exists z. S(x,w,z)").unwrap();
        match &f {
            Formula::Exists(g) => {
                assert_eq!(g.guard, atom("S", &["x", "w", "z"]));
                assert_eq!(*g.body, Formula::True);
            }
            other => panic!("expected guarded block, got {other:?}"),
        }
        // `exists z. S(z,z) & P(x)` keeps the conjunction outside the scope.
        let g = parse("exists z. S(z,z) & P(x)").unwrap();
        assert!(matches!(g, Formula::And(_, _)));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("exists x. (P(x) &").unwrap_err();
        match err {
            ParseError::Syntax { pos, .. } => assert_eq!(pos.line, 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn bound_variable_must_occur_in_guard() {
        // `y` is bound but no atom mentions it together with x.
        assert!(parse("exists x y. (P(x))").is_err());
    }
}

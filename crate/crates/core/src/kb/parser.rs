//! Clause parser.
//!
//! The parser first builds a generic clause tree ([`Clause`] of [`Node`]s)
//! that admits nested compound terms, lists, `not` prefixes and `name/arity`
//! indicators. Fact and rule files accept only the flat subset of that tree
//! (atoms whose arguments are constants, integers or variables); action,
//! event and goal files use the nested forms.

use super::error::{Location, ParseError};
use super::lexer::{tokenize, Spanned, Token};
use super::term::{sym, Atom, Literal, Program, Rule, Term};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Variable, anonymous variable, integer or quoted constant.
    Term(Term),
    /// Bare lowercase identifier.
    Name(String),
    Compound(String, Vec<Node>),
    List(Vec<Node>),
    Not(Box<Node>),
    /// `name/arity`
    Indicator(String, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub expr: Expr,
    pub at: Location,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub head: Node,
    /// `None` for a clause without `:-`.
    pub body: Option<Vec<Node>>,
    pub at: Location,
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: Location,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        let end = end_location(text);
        Ok(Self {
            tokens,
            pos: 0,
            end,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn here(&self) -> Location {
        self.tokens.get(self.pos).map_or(self.end, |s| s.at)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn eat(&mut self, want: &Token) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: Token, context: &str) -> Result<(), ParseError> {
        let at = self.here();
        match self.next() {
            Some(s) if s.token == want => Ok(()),
            Some(s) => Err(ParseError::syntax(
                at,
                format!("expected {want} {context}, found {}", s.token),
            )),
            None => Err(ParseError::syntax(
                at,
                format!("expected {want} {context}, found end of input"),
            )),
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let at = self.here();
        let head = self.expr()?;
        let body = if self.eat(&Token::Neck) {
            Some(self.sequence()?)
        } else {
            None
        };
        self.expect(Token::Period, "at end of clause")?;
        Ok(Clause { head, body, at })
    }

    fn sequence(&mut self) -> Result<Vec<Node>, ParseError> {
        let mut items = vec![self.expr()?];
        while self.eat(&Token::Comma) {
            items.push(self.expr()?);
        }
        Ok(items)
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let at = self.here();
        let Some(spanned) = self.next() else {
            return Err(ParseError::syntax(at, "unexpected end of input"));
        };
        let expr = match spanned.token {
            Token::Not => Expr::Not(Box::new(self.expr()?)),
            Token::LBracket => {
                if self.eat(&Token::RBracket) {
                    Expr::List(Vec::new())
                } else {
                    let items = self.sequence()?;
                    self.expect(Token::RBracket, "to close list")?;
                    Expr::List(items)
                }
            }
            Token::Name(name) => {
                if self.eat(&Token::LParen) {
                    let args = self.sequence()?;
                    self.expect(Token::RParen, "to close argument list")?;
                    Expr::Compound(name, args)
                } else if self.eat(&Token::Slash) {
                    let at = self.here();
                    match self.next().map(|s| s.token) {
                        Some(Token::Int(n)) if n >= 0 => Expr::Indicator(name, n as usize),
                        _ => return Err(ParseError::syntax(at, "expected arity after `/`")),
                    }
                } else {
                    Expr::Name(name)
                }
            }
            Token::Quoted(s) => Expr::Term(Term::Const(sym(&s))),
            Token::Var(v) => Expr::Term(Term::Var(sym(&v))),
            Token::Anon => Expr::Term(Term::Anon),
            Token::Int(n) => Expr::Term(Term::Int(n)),
            other => {
                return Err(ParseError::syntax(at, format!("unexpected {other}")));
            }
        };
        Ok(Node { expr, at })
    }
}

fn end_location(text: &str) -> Location {
    let mut loc = Location { line: 1, column: 1 };
    for c in text.chars() {
        if c == '\n' {
            loc.line += 1;
            loc.column = 1;
        } else {
            loc.column += 1;
        }
    }
    loc
}

/// Parses every clause of `text` into generic clause trees.
pub fn parse_clauses(text: &str) -> Result<Vec<Clause>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_end() {
        out.push(p.clause()?);
    }
    Ok(out)
}

impl Node {
    pub fn to_term(&self) -> Result<Term, ParseError> {
        match &self.expr {
            Expr::Term(t) => Ok(t.clone()),
            Expr::Name(n) => Ok(Term::Const(sym(n))),
            _ => Err(ParseError::syntax(
                self.at,
                "expected a constant, integer or variable",
            )),
        }
    }

    pub fn to_atom(&self) -> Result<Atom, ParseError> {
        match &self.expr {
            Expr::Name(n) => Ok(Atom::new(n, Vec::new())),
            Expr::Compound(n, args) => Ok(Atom {
                predicate: sym(n),
                args: args.iter().map(Node::to_term).collect::<Result<_, _>>()?,
            }),
            _ => Err(ParseError::syntax(self.at, "expected an atom")),
        }
    }

    pub fn to_literal(&self) -> Result<Literal, ParseError> {
        match &self.expr {
            Expr::Not(inner) => Ok(Literal::neg(inner.to_atom()?)),
            _ => Ok(Literal::pos(self.to_atom()?)),
        }
    }

    pub fn to_literals(&self) -> Result<Vec<Literal>, ParseError> {
        match &self.expr {
            Expr::List(items) => items.iter().map(Node::to_literal).collect(),
            _ => Err(ParseError::syntax(self.at, "expected a list of literals")),
        }
    }

    /// Name and arguments of a compound (or bare name) node.
    pub fn as_compound(&self) -> Option<(&str, &[Node])> {
        match &self.expr {
            Expr::Name(n) => Some((n, &[])),
            Expr::Compound(n, args) => Some((n, args)),
            _ => None,
        }
    }
}

/// Converts a parsed clause into a kb-core fact or rule, enforcing ground
/// facts and rule safety.
pub fn clause_to_rule(clause: &Clause) -> Result<Rule, ParseError> {
    let head = clause.head.to_atom()?;
    if head.has_anonymous() {
        return Err(ParseError::AnonymousInHead { at: clause.head.at });
    }
    let body = match &clause.body {
        None => Vec::new(),
        Some(items) => items.iter().map(Node::to_literal).collect::<Result<_, _>>()?,
    };
    let rule = Rule { head, body };
    if let Some(v) = rule.unsafe_variable() {
        return Err(ParseError::Unsafe {
            at: clause.at,
            variable: v.to_string(),
        });
    }
    Ok(rule)
}

/// Parses a `.facts` / `.rules` program. Clauses keep their source order
/// within the fact and rule lists.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut program = Program::default();
    for clause in parse_clauses(text)? {
        let rule = clause_to_rule(&clause)?;
        if rule.body.is_empty() {
            program.facts.push(rule.head);
        } else {
            program.rules.push(rule);
        }
    }
    Ok(program)
}

/// Parses a conjunction `lit, lit, ...` with an optional final period.
pub fn parse_query(text: &str) -> Result<Vec<Literal>, ParseError> {
    let mut p = Parser::new(text)?;
    if p.at_end() {
        return Ok(Vec::new());
    }
    let items = p.sequence()?;
    p.eat(&Token::Period);
    if !p.at_end() {
        return Err(ParseError::syntax(p.here(), "unexpected input after query"));
    }
    items.iter().map(Node::to_literal).collect()
}

/// Parses a single atom with an optional final period.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut p = Parser::new(text)?;
    let node = p.expr()?;
    p.eat(&Token::Period);
    if !p.at_end() {
        return Err(ParseError::syntax(p.here(), "unexpected input after atom"));
    }
    node.to_atom()
}

/// Parses a single ground atom.
pub fn parse_fact(text: &str) -> Result<Atom, ParseError> {
    let atom = parse_atom(text)?;
    if !atom.is_ground() {
        return Err(ParseError::syntax(
            Location { line: 1, column: 1 },
            format!("fact `{atom}` is not ground"),
        ));
    }
    Ok(atom)
}

//! Source-syntax printing. Output re-parses to the same tree.

use std::fmt::{self, Display, Write as _};

use super::term::{Atom, Literal, Program, Rule, Substitution, Term};

/// True when `name` can be written without quotes.
pub fn is_plain_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_quoted(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    f.write_char('\'')?;
    for c in name.chars() {
        match c {
            '\'' => f.write_str("\\'")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('\'')
}

impl Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(name) if is_plain_name(name) => f.write_str(name),
            Term::Const(name) => write_quoted(f, name),
            Term::Int(n) => write!(f, "{n}"),
            Term::Var(v) => f.write_str(v),
            Term::Anon => f.write_str("_"),
        }
    }
}

impl Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_char('(')?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            write!(f, "{t}")?;
        }
        f.write_char(')')
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

impl Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            write_conjunction(f, &self.body)?;
        }
        f.write_char('.')
    }
}

/// `X='Horr Sq.', Y=a`; the empty substitution prints as `true`.
impl Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("true");
        }
        for (i, (v, t)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={t}")?;
        }
        Ok(())
    }
}

pub fn write_conjunction(f: &mut impl fmt::Write, lits: &[Literal]) -> fmt::Result {
    for (i, l) in lits.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

pub fn format_conjunction(lits: &[Literal]) -> String {
    let mut s = String::new();
    write_conjunction(&mut s, lits).expect("writing to a String cannot fail");
    s
}

/// One clause per line, facts first, then rules.
pub fn format_program(p: &Program) -> String {
    let mut out = String::new();
    for fact in &p.facts {
        let _ = writeln!(out, "{fact}.");
    }
    for rule in &p.rules {
        let _ = writeln!(out, "{rule}");
    }
    out
}

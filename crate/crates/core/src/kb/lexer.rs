use std::fmt;

use super::error::{Location, ParseError};

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    /// Lowercase-initial identifier.
    Name(String),
    Quoted(String),
    Var(String),
    Anon,
    Int(i64),
    /// The `not ` prefix (keyword followed by whitespace).
    Not,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Slash,
    Neck,
    Period,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Name(s) => write!(f, "`{s}`"),
            Token::Quoted(s) => write!(f, "'{s}'"),
            Token::Var(s) => write!(f, "variable `{s}`"),
            Token::Anon => f.write_str("`_`"),
            Token::Int(n) => write!(f, "`{n}`"),
            Token::Not => f.write_str("`not`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::LBracket => f.write_str("`[`"),
            Token::RBracket => f.write_str("`]`"),
            Token::Comma => f.write_str("`,`"),
            Token::Slash => f.write_str("`/`"),
            Token::Neck => f.write_str("`:-`"),
            Token::Period => f.write_str("`.`"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub token: Token,
    pub at: Location,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> Location {
        Location {
            line: self.line,
            column: self.column,
        }
    }

    fn take_while(&mut self, mut pred: impl FnMut(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let at = cur.here();
        let token = match c {
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            '%' => {
                cur.take_while(|c| c != '\n');
                continue;
            }
            '(' | ')' | '[' | ']' | ',' | '/' | '.' => {
                cur.bump();
                match c {
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    '[' => Token::LBracket,
                    ']' => Token::RBracket,
                    ',' => Token::Comma,
                    '/' => Token::Slash,
                    _ => Token::Period,
                }
            }
            ':' => {
                cur.bump();
                if cur.peek() != Some('-') {
                    return Err(ParseError::syntax(at, "expected `:-`"));
                }
                cur.bump();
                Token::Neck
            }
            '\'' => {
                cur.bump();
                Token::Quoted(lex_quoted(&mut cur, at)?)
            }
            '-' | '0'..='9' => {
                let mut s = String::new();
                if c == '-' {
                    cur.bump();
                    s.push('-');
                }
                let digits = cur.take_while(|c| c.is_ascii_digit());
                if digits.is_empty() {
                    return Err(ParseError::syntax(at, "unexpected character `-`"));
                }
                s.push_str(&digits);
                let n = s
                    .parse::<i64>()
                    .map_err(|_| ParseError::syntax(at, format!("integer `{s}` out of range")))?;
                Token::Int(n)
            }
            '_' => {
                let s = cur.take_while(is_ident_char);
                if s == "_" {
                    Token::Anon
                } else {
                    Token::Var(s)
                }
            }
            c if c.is_ascii_uppercase() => Token::Var(cur.take_while(is_ident_char)),
            c if c.is_ascii_lowercase() => {
                let s = cur.take_while(is_ident_char);
                if s == "not" && cur.peek().is_some_and(char::is_whitespace) {
                    Token::Not
                } else {
                    Token::Name(s)
                }
            }
            other => {
                return Err(ParseError::syntax(at, format!("unexpected character `{other}`")));
            }
        };
        out.push(Spanned { token, at });
    }
    Ok(out)
}

fn lex_quoted(cur: &mut Cursor<'_>, start: Location) -> Result<String, ParseError> {
    let mut s = String::new();
    loop {
        match cur.bump() {
            None => return Err(ParseError::syntax(start, "unterminated quoted constant")),
            Some('\'') => {
                // Doubled quote is an escaped quote.
                if cur.peek() == Some('\'') {
                    cur.bump();
                    s.push('\'');
                } else {
                    return Ok(s);
                }
            }
            Some('\\') => match cur.bump() {
                Some('n') => s.push('\n'),
                Some('t') => s.push('\t'),
                Some(c @ ('\\' | '\'')) => s.push(c),
                Some(c) => {
                    return Err(ParseError::syntax(
                        cur.here(),
                        format!("unknown escape `\\{c}` in quoted constant"),
                    ))
                }
                None => return Err(ParseError::syntax(start, "unterminated quoted constant")),
            },
            Some('\n') => return Err(ParseError::syntax(start, "unterminated quoted constant")),
            Some(c) => s.push(c),
        }
    }
}
